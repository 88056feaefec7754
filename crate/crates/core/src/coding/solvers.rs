//! Solvers for every network family: extended Reed-Solomon scalar codes for
//! the combination network, companion-block vector codes, subspace-block
//! scalar codes with completion links for the star/plus/tilde variants, and
//! Gabidulin-block vector codes for the same, plus a streaming pair
//! verifier for middle layers too large to materialize as a network.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    CodingError, NetworkCode, ReceiverRecord, Scheme, VerificationReport,
};
use crate::algebra::{FieldCtx, FieldElement, Matrix};
use crate::network::{FamilyKind, Network};
use crate::rankmetric::{CompanionCode, GabidulinCode, RankCode};
use crate::subspace::{factor_prime_power, grassmannian, pairwise_distance_code, triple_span_search, SubspaceError};

/// Scheme requested on the command line; fields are built on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeSpec {
    Scalar { qs: u64 },
    Vector { q: u64, t: usize },
}

impl SchemeSpec {
    pub fn build(&self) -> Result<Scheme, CodingError> {
        match *self {
            SchemeSpec::Scalar { qs } => {
                let (p, m) = factor_prime_power(qs)
                    .ok_or(SubspaceError::NonPrimeBase(qs))?;
                Ok(Scheme::Scalar {
                    field: FieldCtx::new(p, m)?,
                })
            }
            SchemeSpec::Vector { q, t } => Ok(Scheme::Vector {
                field: FieldCtx::new(q, 1)?,
                t,
            }),
        }
    }
}

/// Solves a freshly generated network of any family under the requested
/// scheme. Transformed networks are not solved directly; solve the original
/// and carry the code across with [`super::transfer_code`].
pub fn solve(net: &Network, spec: &SchemeSpec) -> Result<NetworkCode, CodingError> {
    let fam = net.family();
    if !fam.transforms.is_empty() {
        return Err(CodingError::TransformedNetwork(fam.transforms.clone()));
    }
    match (fam.kind, spec) {
        (FamilyKind::Combination, SchemeSpec::Scalar { qs }) => {
            let (p, m) = factor_prime_power(*qs).ok_or(SubspaceError::NonPrimeBase(*qs))?;
            scalar_solve_combination(net, &FieldCtx::new(p, m)?)
        }
        (FamilyKind::Combination, SchemeSpec::Vector { q, t }) => {
            vector_solve_combination(net, &FieldCtx::new(*q, 1)?, *t)
        }
        (FamilyKind::Star | FamilyKind::Plus, SchemeSpec::Scalar { qs }) => {
            let (p, m) = factor_prime_power(*qs).ok_or(SubspaceError::NonPrimeBase(*qs))?;
            scalar_solve_star_or_plus(net, &FieldCtx::new(p, m)?)
        }
        (FamilyKind::Star | FamilyKind::Plus, SchemeSpec::Vector { q, t }) => {
            vector_solve_star_or_plus(net, &FieldCtx::new(*q, 1)?, *t)
        }
        (FamilyKind::Tilde, SchemeSpec::Scalar { qs }) => {
            let (p, m) = factor_prime_power(*qs).ok_or(SubspaceError::NonPrimeBase(*qs))?;
            scalar_solve_tilde(net, &FieldCtx::new(p, m)?)
        }
        (FamilyKind::Tilde, SchemeSpec::Vector { q, t }) => {
            vector_solve_tilde(net, &FieldCtx::new(*q, 1)?, *t)
        }
    }
}

fn expect_family(net: &Network, kinds: &[FamilyKind], name: &str) -> Result<(), CodingError> {
    let fam = net.family();
    if !fam.transforms.is_empty() {
        return Err(CodingError::TransformedNetwork(fam.transforms.clone()));
    }
    if !kinds.contains(&fam.kind) {
        return Err(CodingError::WrongFamily {
            expected: name.to_string(),
            got: format!("{:?}", fam.kind),
        });
    }
    // solvers are written for the families' native shapes; reject message
    // counts or link counts that were overridden after generation
    let shape_ok = match fam.kind {
        FamilyKind::Combination => net.h() == fam.s && fam.direct_links == 0,
        FamilyKind::Star => net.h() == 2 * fam.ell && fam.direct_links == 1,
        FamilyKind::Plus => net.h() == 2 * fam.ell && fam.direct_links == fam.ell - 1,
        FamilyKind::Tilde => net.h() == 3 && fam.direct_links == 1,
    };
    if !shape_ok {
        return Err(CodingError::WrongFamily {
            expected: format!("{name} with its native message and link counts"),
            got: format!(
                "{:?} with h = {}, direct links = {}",
                fam.kind,
                net.h(),
                fam.direct_links
            ),
        });
    }
    Ok(())
}

/// Assigns edge matrices from per-middle blocks plus per-receiver direct
/// completions. Middle out-edges repeat the node's in-edge bands; the band
/// of an edge is its multiplicity index.
fn assemble(
    net: &Network,
    scheme: Scheme,
    middle_blocks: Vec<Matrix>,
    direct_blocks: Vec<Option<Matrix>>,
    provenance: String,
) -> Result<NetworkCode, CodingError> {
    let t = scheme.t();
    let middle_rank: HashMap<usize, usize> = net
        .middles()
        .iter()
        .enumerate()
        .map(|(rank, &node)| (node, rank))
        .collect();
    let receiver_rank: HashMap<usize, usize> = net
        .receivers()
        .iter()
        .enumerate()
        .map(|(rank, r)| (r.node, rank))
        .collect();

    let mut matrices = Vec::with_capacity(net.edges().len());
    let mut notes = Vec::with_capacity(net.edges().len());
    for e in net.edges() {
        if let Some(&mi) = middle_rank.get(&e.head) {
            matrices.push(middle_blocks[mi].row_band(e.mult, t));
            notes.push(format!("block {} band {}", mi + 1, e.mult));
        } else if let Some(&mi) = middle_rank.get(&e.tail) {
            matrices.push(middle_blocks[mi].row_band(e.mult, t));
            notes.push(format!("block {} band {} (forwarded)", mi + 1, e.mult));
        } else if let Some(&ri) = receiver_rank.get(&e.head) {
            let d = direct_blocks[ri].as_ref().expect("direct block present");
            matrices.push(d.row_band(e.mult, t));
            notes.push(format!("completion for receiver {ri} band {}", e.mult));
        } else {
            unreachable!("generated families have no other edge kinds");
        }
    }
    Ok(NetworkCode::new(
        scheme,
        net.h(),
        matrices,
        notes,
        provenance,
    ))
}

/// Per-receiver standard-basis completion of the stacked watched blocks,
/// one band of `t` rows per direct link.
fn direct_completions(
    net: &Network,
    middle_blocks: &[Matrix],
    t: usize,
) -> Result<Vec<Option<Matrix>>, CodingError> {
    let links = net.family().direct_links;
    net.receivers()
        .iter()
        .map(|rec| {
            if links == 0 {
                return Ok(None);
            }
            let parts: Vec<&Matrix> = rec
                .middle_set
                .iter()
                .map(|&mi| &middle_blocks[mi])
                .collect();
            let stacked = Matrix::vstack(&parts);
            Ok(Some(stacked.complete_to_full_rank(links * t)?))
        })
        .collect()
}

/// Generator of a `[r, h]` MDS code over `F_q` from extended Reed-Solomon
/// constructions, columns in deterministic order: evaluation points by
/// ascending encoding, then the unit column `(0,..,0,1)`, then `(0,1,0)`
/// for the length-(q+2) cases. Supported exactly when `r <= q + 1`, or
/// `r <= q + 2` with `q` even and `h` equal to 3 or `q - 1`.
fn extended_rs_generator(
    field: &Arc<FieldCtx>,
    h: usize,
    r: usize,
) -> Result<Matrix, CodingError> {
    let q = field.order();
    let regime_ok = h >= 1
        && h <= r
        && (r as u64 <= q + 1
            || (field.p() == 2
                && (h == 3 || h as u64 == q - 1)
                && r as u64 <= q + 2));
    if !regime_ok {
        return Err(CodingError::UnsupportedMdsRegime { r, h, q });
    }

    if r as u64 > q + 1 && h as u64 == q - 1 && h != 3 {
        // dual of the length-(q+2) three-row generator
        let tri = triply_extended_rows(field);
        let g = tri.null_space_basis();
        return Ok(g.submatrix(0, g.rows(), 0, r));
    }
    if r as u64 > q + 1 {
        // h == 3, q even
        let g = triply_extended_rows(field);
        return Ok(g.submatrix(0, 3, 0, r));
    }

    // doubly extended: columns (1, x, ..., x^{h-1}) then (0, ..., 0, 1)
    let mut g = Matrix::zeros(field, h, (q + 1) as usize);
    for (col, x) in field.elements().enumerate() {
        let mut p = FieldElement::ONE;
        for row in 0..h {
            g.set(row, col, p);
            p = field.mul(p, x);
        }
    }
    g.set(h - 1, q as usize, FieldElement::ONE);
    Ok(g.submatrix(0, h, 0, r))
}

/// The `3 x (q+2)` generator `(1, x, x^2)` columns plus `(0,0,1)` and
/// `(0,1,0)`; MDS for even `q`.
fn triply_extended_rows(field: &Arc<FieldCtx>) -> Matrix {
    let q = field.order() as usize;
    let mut g = Matrix::zeros(field, 3, q + 2);
    for (col, x) in field.elements().enumerate() {
        g.set(0, col, FieldElement::ONE);
        g.set(1, col, x);
        g.set(2, col, field.mul(x, x));
    }
    g.set(2, q, FieldElement::ONE);
    g.set(1, q + 1, FieldElement::ONE);
    g
}

/// Scalar solution of the combination network from an extended
/// Reed-Solomon generator: middle node `i` carries column `i`.
pub fn scalar_solve_combination(
    net: &Network,
    qs: &Arc<FieldCtx>,
) -> Result<NetworkCode, CodingError> {
    expect_family(net, &[FamilyKind::Combination], "combination")?;
    let h = net.h();
    let r = net.family().r;
    let g = extended_rs_generator(qs, h, r)?;
    let blocks: Vec<Matrix> = (0..r)
        .map(|i| g.submatrix(0, h, i, i + 1).transpose())
        .collect();
    let direct = direct_completions(net, &blocks, 1)?;
    assemble(
        net,
        Scheme::Scalar { field: qs.clone() },
        blocks,
        direct,
        format!("extended-RS [{r},{h}] over F_{}", qs.order()),
    )
}

/// Vector solution of the combination network: middle node `i` carries the
/// block row `(I, C_i, C_i^2, ..., C_i^{h-1})` over companion-code words and
/// the last node carries `(0, ..., 0, I)`. For three messages over an
/// even-order code, one extra node carrying `(0, I, 0)` is also supported.
pub fn vector_solve_combination(
    net: &Network,
    q: &Arc<FieldCtx>,
    t: usize,
) -> Result<NetworkCode, CodingError> {
    expect_family(net, &[FamilyKind::Combination], "combination")?;
    let h = net.h();
    let r = net.family().r;
    let code = CompanionCode::new(q, t)?;
    let size = code.size();
    let base_bound = size + 1;
    let extension = h == 3 && q.p() == 2;
    let bound = if extension { size + 2 } else { base_bound };
    if r as u128 > bound {
        return Err(CodingError::SupplyExhausted {
            family: "combination (vector)".into(),
            r,
            bound: format!(
                "q^t + 1 = {base_bound}{}",
                if extension {
                    format!(" (+1 for h = 3 over even q^t: {bound})")
                } else {
                    String::new()
                }
            ),
        });
    }

    let mut blocks: Vec<Matrix> = Vec::with_capacity(r);
    if r as u128 == size + 2 {
        // all codewords, then (0,..,0,I), then (0,I,0)
        let mut iter = code.iter();
        for _ in 0..size {
            blocks.push(block_row(&iter.next().expect("size codewords"), h));
        }
        blocks.push(unit_block(q, t, h, h - 1));
        blocks.push(unit_block(q, t, h, 1));
    } else {
        let mut iter = code.iter();
        for _ in 0..r.saturating_sub(1) {
            blocks.push(block_row(&iter.next().expect("within code size"), h));
        }
        blocks.push(unit_block(q, t, h, h - 1));
    }
    let direct = direct_completions(net, &blocks, t)?;
    assemble(
        net,
        Scheme::Vector {
            field: q.clone(),
            t,
        },
        blocks,
        direct,
        format!(
            "companion blocks over F_{}^{t} (polynomial {:?})",
            q.order(),
            code.polynomial()
        ),
    )
}

fn block_row(word: &Matrix, h: usize) -> Matrix {
    let field = word.field();
    let t = word.rows();
    let mut parts = Vec::with_capacity(h);
    let mut power = Matrix::identity(field, t);
    for _ in 0..h {
        parts.push(power.clone());
        power = power.mul(word);
    }
    let refs: Vec<&Matrix> = parts.iter().collect();
    Matrix::hstack(&refs)
}

/// `t x (h t)` selector of message block `j`.
fn unit_block(field: &Arc<FieldCtx>, t: usize, h: usize, j: usize) -> Matrix {
    let mut m = Matrix::zeros(field, t, h * t);
    for i in 0..t {
        m.set(i, j * t + i, FieldElement::ONE);
    }
    m
}

/// Scalar solution of the star/plus variants: middle node `i` carries the
/// `l` rows of the i-th subspace block, and each receiver's direct links
/// carry completion rows. Star blocks pairwise intersect in dimension at
/// most one (one completion row suffices); plus blocks are the whole
/// Grassmannian (`l - 1` completion rows).
pub fn scalar_solve_star_or_plus(
    net: &Network,
    qs: &Arc<FieldCtx>,
) -> Result<NetworkCode, CodingError> {
    expect_family(net, &[FamilyKind::Star, FamilyKind::Plus], "star or plus")?;
    let fam = net.family().clone();
    let ell = fam.ell;
    let r = fam.r;
    let min_dist = match fam.kind {
        FamilyKind::Star => 2 * ell - 2,
        _ => 2,
    };
    let code = pairwise_distance_code(qs, 2 * ell, ell, min_dist)?;
    if r > code.len() {
        return Err(CodingError::SupplyExhausted {
            family: format!("{:?} (scalar)", fam.kind),
            r,
            bound: format!("{} subspace blocks over F_{}", code.len(), qs.order()),
        });
    }
    let blocks: Vec<Matrix> = code.words()[..r]
        .iter()
        .map(|w| w.basis().clone())
        .collect();
    let direct = direct_completions(net, &blocks, 1)?;
    assemble(
        net,
        Scheme::Scalar { field: qs.clone() },
        blocks,
        direct,
        format!(
            "subspace blocks (min distance {min_dist}) over F_{}",
            qs.order()
        ),
    )
}

/// Vector solution of the star/plus variants: middle node `i` carries the
/// block `(I, C_i)` over Gabidulin codewords of side `l t` (minimum rank
/// distance `(l-1) t` for star, `t` for plus), and the direct links carry
/// completion bands.
pub fn vector_solve_star_or_plus(
    net: &Network,
    q: &Arc<FieldCtx>,
    t: usize,
) -> Result<NetworkCode, CodingError> {
    expect_family(net, &[FamilyKind::Star, FamilyKind::Plus], "star or plus")?;
    let fam = net.family().clone();
    let ell = fam.ell;
    let r = fam.r;
    let delta = match fam.kind {
        FamilyKind::Star => (ell - 1) * t,
        _ => t,
    };
    let code = GabidulinCode::new(q, ell * t, delta)?;
    if r as u128 > code.size() {
        return Err(CodingError::SupplyExhausted {
            family: format!("{:?} (vector)", fam.kind),
            r,
            bound: format!("q^{} = {}", code.dim(), code.size()),
        });
    }
    let id = Matrix::identity(q, ell * t);
    let blocks: Vec<Matrix> = (0..r)
        .map(|i| {
            let w = code.codeword(i as u128)?;
            Ok(Matrix::hstack(&[&id, &w]))
        })
        .collect::<Result<Vec<_>, CodingError>>()?;
    let direct = direct_completions(net, &blocks, t)?;
    assemble(
        net,
        Scheme::Vector {
            field: q.clone(),
            t,
        },
        blocks,
        direct,
        format!(
            "identity-plus-Gabidulin blocks ({}x{}, delta {delta}) over F_{}",
            ell * t,
            2 * ell * t,
            q.order()
        ),
    )
}

/// Scalar solution of the tilde variant: middle node `i` carries the
/// representative row of line `i / 2` (each line of the projective plane
/// used at most twice), and the direct link completes each receiver to full
/// rank.
pub fn scalar_solve_tilde(net: &Network, qs: &Arc<FieldCtx>) -> Result<NetworkCode, CodingError> {
    expect_family(net, &[FamilyKind::Tilde], "tilde")?;
    let r = net.family().r;
    let lines: Vec<Matrix> = grassmannian(qs, 3, 1)?
        .map(|s| s.basis().clone())
        .collect();
    let bound = 2 * lines.len();
    if r > bound {
        return Err(CodingError::SupplyExhausted {
            family: "tilde (scalar)".into(),
            r,
            bound: format!("2(q_s^2 + q_s + 1) = {bound}"),
        });
    }
    let blocks: Vec<Matrix> = (0..r).map(|i| lines[i / 2].clone()).collect();
    let direct = direct_completions(net, &blocks, 1)?;
    assemble(
        net,
        Scheme::Scalar { field: qs.clone() },
        blocks,
        direct,
        format!("projective lines (each used at most twice) over F_{}", qs.order()),
    )
}

/// Vector solution of the tilde variant: middle node `i` carries the
/// canonical basis of the i-th codeword of a searched subspace code in
/// which any three codewords span at least `2t` dimensions, so the direct
/// link's `t` completion rows always reach full rank.
pub fn vector_solve_tilde(
    net: &Network,
    q: &Arc<FieldCtx>,
    t: usize,
) -> Result<NetworkCode, CodingError> {
    expect_family(net, &[FamilyKind::Tilde], "tilde")?;
    let r = net.family().r;
    let code = triple_span_search(q, 3 * t, t, 2 * t, r)?;
    if code.len() < r {
        return Err(CodingError::SupplyExhausted {
            family: "tilde (vector)".into(),
            r,
            bound: format!("triple-span search found {} codewords", code.len()),
        });
    }
    let blocks: Vec<Matrix> = code.words()[..r]
        .iter()
        .map(|w| w.basis().clone())
        .collect();
    let direct = direct_completions(net, &blocks, t)?;
    assemble(
        net,
        Scheme::Vector {
            field: q.clone(),
            t,
        },
        blocks,
        direct,
        format!(
            "triple-span subspace blocks ({t}-dim in {} ambient) over F_{}",
            3 * t,
            q.order()
        ),
    )
}

/// How the streaming pair verifier walks the receiver space.
#[derive(Debug, Clone, Copy)]
pub enum PairStreamMode {
    Exhaustive,
    /// A deterministic seeded sample of receivers.
    Sampled { cap: usize, seed: u64 },
}

/// Verifies the star/plus vector construction for a middle layer of `r`
/// nodes without materializing the network: receiver `(i, j)` passes when
/// the stacked blocks plus their completion bands reach full rank.
///
/// Receivers are indexed by the lexicographic rank of the pair. Only
/// failures are recorded.
pub fn verify_star_vector_streaming(
    kind: FamilyKind,
    q: &Arc<FieldCtx>,
    ell: usize,
    t: usize,
    r: usize,
    mode: PairStreamMode,
    workers: usize,
) -> Result<VerificationReport, CodingError> {
    assert!(matches!(kind, FamilyKind::Star | FamilyKind::Plus));
    let delta = match kind {
        FamilyKind::Star => (ell - 1) * t,
        _ => t,
    };
    let direct_links = match kind {
        FamilyKind::Star => 1,
        _ => ell - 1,
    };
    let code = GabidulinCode::new(q, ell * t, delta)?;
    if r as u128 > code.size() {
        return Err(CodingError::SupplyExhausted {
            family: format!("{kind:?} (vector, streaming)"),
            r,
            bound: format!("q^{} = {}", code.dim(), code.size()),
        });
    }
    let id = Matrix::identity(q, ell * t);
    let required = 2 * ell * t;
    let block_of = |i: usize| -> Matrix {
        let w = code.codeword(i as u128).expect("index below code size");
        Matrix::hstack(&[&id, &w])
    };
    let pair_ok = |a: &Matrix, b: &Matrix| -> bool {
        let stacked = Matrix::vstack(&[a, b]);
        match stacked.complete_to_full_rank(direct_links * t) {
            Ok(p) => Matrix::vstack(&[&stacked, &p]).rank() == required,
            Err(_) => false,
        }
    };
    let pair_rank = |i: usize, j: usize| -> usize {
        // lexicographic rank of the pair (i < j)
        i * r - i * (i + 1) / 2 + (j - i - 1)
    };

    let total = r * (r - 1) / 2;
    let start = Instant::now();
    let (checked, failures): (usize, Vec<ReceiverRecord>) = match mode {
        PairStreamMode::Exhaustive => {
            let blocks: Vec<Matrix> = (0..r).map(block_of).collect();
            let failures: Vec<ReceiverRecord> = run_in_pool(workers, || {
                (0..r)
                    .into_par_iter()
                    .flat_map_iter(|i| (i + 1..r).map(move |j| (i, j)))
                    .filter(|&(i, j)| !pair_ok(&blocks[i], &blocks[j]))
                    .map(|(i, j)| ReceiverRecord {
                        receiver: pair_rank(i, j),
                        rank: 0,
                        required,
                        pass: false,
                    })
                    .collect()
            });
            (total, failures)
        }
        PairStreamMode::Sampled { cap, seed } => {
            // blocks are built lazily: r may be far too large to materialize
            let cap = cap.min(total);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut ranks = rand::seq::index::sample(&mut rng, total, cap).into_vec();
            ranks.sort_unstable();
            let failures: Vec<ReceiverRecord> = run_in_pool(workers, || {
                ranks
                    .into_par_iter()
                    .map(|k| (k, unrank_pair(k, r)))
                    .filter(|&(_, (i, j))| !pair_ok(&block_of(i), &block_of(j)))
                    .map(|(k, _)| ReceiverRecord {
                        receiver: k,
                        rank: 0,
                        required,
                        pass: false,
                    })
                    .collect()
            });
            (cap, failures)
        }
    };

    let failed = failures.len();
    Ok(VerificationReport {
        records: failures,
        receivers_checked: checked,
        receivers_total: total,
        passed: checked - failed,
        failed,
        required_rank: required,
        truncated_to_failures: true,
        elapsed: start.elapsed(),
    })
}

fn run_in_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        job()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool");
        pool.install(job)
    }
}

/// Inverse of the lexicographic pair rank: rank `k` to `(i, j)` with `i < j < r`.
fn unrank_pair(k: usize, r: usize) -> (usize, usize) {
    let mut i = 0usize;
    let mut offset = 0usize;
    loop {
        let row = r - 1 - i;
        if k < offset + row {
            return (i, i + 1 + (k - offset));
        }
        offset += row;
        i += 1;
    }
}
