//! Grassmannian machinery: q-binomial counting, canonical subspaces,
//! subspace distance, deterministic enumeration, spreads, and greedy
//! searches for subspace codes with pairwise-distance or triple-span
//! guarantees.
//!
//! A subspace is stored as the reduced row echelon form of any spanning
//! matrix, which is the unique representative of its row space; two
//! subspaces are equal exactly when their canonical bases are equal.

use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FieldCtx, FieldElement, Matrix};

/// Cap on Grassmannian enumerations; beyond this the stream refuses to run.
const ENUM_CAP: u64 = 1_000_000;

#[derive(Debug, Error)]
pub enum SubspaceError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("q-binomial requires r <= n, got n = {n}, r = {r}")]
    BadBinomial { n: usize, r: usize },
    #[error("Grassmannian G_{q}({n},{k}) has {size} elements, beyond the enumeration cap")]
    EnumerationTooLarge {
        q: u64,
        n: usize,
        k: usize,
        size: BigUint,
    },
    #[error("ambient dimensions differ")]
    AmbientMismatch,
    #[error("spread requires k | n, got n = {n}, k = {k}")]
    SpreadDivisibility { n: usize, k: usize },
    #[error("spread construction needs a prime base field, got order {0}")]
    NonPrimeBase(u64),
    #[error("unsupported pairwise distance {min_dist} for dimension {dim}")]
    UnsupportedDistance { min_dist: usize, dim: usize },
    #[error("declared property fails: {0}")]
    PropertyViolation(String),
}

/// Exact q-binomial coefficient: the number of r-dimensional subspaces of an
/// n-dimensional space over `F_q`.
pub fn q_binomial(n: usize, r: usize, q: u64) -> Result<BigUint, SubspaceError> {
    if r > n {
        return Err(SubspaceError::BadBinomial { n, r });
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..r {
        num *= q.pow(n as u32) - q.pow(i as u32);
        den *= q.pow(r as u32) - q.pow(i as u32);
    }
    debug_assert!((&num % &den) == BigUint::ZERO);
    Ok(num / den)
}

/// A k-dimensional subspace of `F_q^n` in canonical (RREF) form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Canonicalizes the row space of any matrix; zero rows are dropped, so
    /// the dimension is the rank of the input.
    pub fn from_matrix(m: &Matrix) -> Subspace {
        let (r, pivots) = m.rref();
        let basis = r.submatrix(0, pivots.len(), 0, r.cols());
        Subspace { basis }
    }

    /// Wraps a matrix already known to be in RREF with full row rank.
    fn from_canonical(basis: Matrix) -> Subspace {
        Subspace { basis }
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols()
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    /// The canonical RREF basis, one row per dimension.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        self.basis.field()
    }

    /// Subspace distance: `2 dim(U + V) - dim U - dim V`.
    pub fn distance(&self, other: &Subspace) -> Result<usize, SubspaceError> {
        if self.ambient() != other.ambient() || !self.field().same_field(other.field()) {
            return Err(SubspaceError::AmbientMismatch);
        }
        let joint = Matrix::vstack(&[&self.basis, &other.basis]).rank();
        Ok(2 * joint - self.dim() - other.dim())
    }
}

/// Dimension of the sum of several subspaces: rank of the stacked bases.
pub fn span_dim(spaces: &[&Subspace]) -> Result<usize, SubspaceError> {
    assert!(!spaces.is_empty(), "span of nothing");
    let ambient = spaces[0].ambient();
    let field = spaces[0].field();
    for s in spaces {
        if s.ambient() != ambient || !s.field().same_field(field) {
            return Err(SubspaceError::AmbientMismatch);
        }
    }
    let bases: Vec<&Matrix> = spaces.iter().map(|s| s.basis()).collect();
    Ok(Matrix::vstack(&bases).rank())
}

/// Streams every k-dimensional subspace of `F_q^n` exactly once.
///
/// Order: pivot-column sets in lexicographic order; within a pivot set, the
/// free entries run as a base-q odometer over row-major positions (lowest
/// position is the fastest digit). This fixes all tie-breaks downstream.
pub fn grassmannian(
    field: &Arc<FieldCtx>,
    n: usize,
    k: usize,
) -> Result<impl Iterator<Item = Subspace>, SubspaceError> {
    let size = q_binomial(n, k, field.order())?;
    if size > BigUint::from(ENUM_CAP) {
        return Err(SubspaceError::EnumerationTooLarge {
            q: field.order(),
            n,
            k,
            size,
        });
    }
    Ok(GrassmannianIter::new(Arc::clone(field), n, k))
}

struct GrassmannianIter {
    field: Arc<FieldCtx>,
    n: usize,
    k: usize,
    pivots: Option<Vec<usize>>,
    /// Free positions (row, col) for the current pivot set, row-major.
    free: Vec<(usize, usize)>,
    /// Current odometer digits, one per free position.
    digits: Vec<u64>,
    exhausted_digits: bool,
}

impl GrassmannianIter {
    fn new(field: Arc<FieldCtx>, n: usize, k: usize) -> GrassmannianIter {
        let pivots: Option<Vec<usize>> = if k <= n { Some((0..k).collect()) } else { None };
        let mut it = GrassmannianIter {
            field,
            n,
            k,
            pivots,
            free: Vec::new(),
            digits: Vec::new(),
            exhausted_digits: false,
        };
        it.reset_free();
        it
    }

    fn reset_free(&mut self) {
        self.free.clear();
        if let Some(p) = &self.pivots {
            for (i, &pi) in p.iter().enumerate() {
                for j in pi + 1..self.n {
                    if !p.contains(&j) {
                        self.free.push((i, j));
                    }
                }
            }
        }
        self.digits = vec![0; self.free.len()];
        self.exhausted_digits = false;
    }

    fn advance_pivots(&mut self) {
        // next k-combination of 0..n in lexicographic order
        let p = self.pivots.as_mut().expect("pivots present");
        let n = self.n;
        let k = self.k;
        let mut i = k;
        loop {
            if i == 0 {
                self.pivots = None;
                return;
            }
            i -= 1;
            if p[i] + 1 <= n - (k - i) {
                p[i] += 1;
                for j in i + 1..k {
                    p[j] = p[j - 1] + 1;
                }
                break;
            }
        }
        self.reset_free();
    }

    fn current(&self) -> Subspace {
        let p = self.pivots.as_ref().expect("pivots present");
        let mut m = Matrix::zeros(&self.field, self.k, self.n);
        for (i, &pi) in p.iter().enumerate() {
            m.set(i, pi, FieldElement::ONE);
        }
        for (pos, &(i, j)) in self.free.iter().enumerate() {
            m.set(i, j, FieldElement(self.digits[pos]));
        }
        Subspace::from_canonical(m)
    }

    fn advance_digits(&mut self) {
        let q = self.field.order();
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < q {
                return;
            }
            *d = 0;
        }
        self.exhausted_digits = true;
    }
}

impl Iterator for GrassmannianIter {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        if self.k == 0 {
            // the single zero subspace
            if self.pivots.take().is_some() {
                return Some(Subspace::from_canonical(Matrix::zeros(
                    &self.field,
                    0,
                    self.n,
                )));
            }
            return None;
        }
        loop {
            self.pivots.as_ref()?;
            if !self.exhausted_digits {
                let out = self.current();
                self.advance_digits();
                return Some(out);
            }
            self.advance_pivots();
        }
    }
}

/// Declared property of a subspace code; verified before use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodeProperty {
    /// Every pair of distinct codewords at subspace distance >= d.
    MinSubspaceDistance { d: usize },
    /// Every 3 distinct codewords span a subspace of dimension >= s.
    TripleSpanAtLeast { s: usize },
    /// Every pair of distinct codewords intersects in dimension <= d.
    PairwiseIntersectionAtMost { d: usize },
}

/// A set of equal-dimension subspaces with a verified property.
#[derive(Debug, Clone)]
pub struct SubspaceCode {
    field: Arc<FieldCtx>,
    ambient: usize,
    dim: usize,
    words: Vec<Subspace>,
    property: CodeProperty,
}

impl SubspaceCode {
    /// Builds a code and verifies its declared property from scratch;
    /// construction fails when the property does not hold.
    pub fn new_verified(
        field: &Arc<FieldCtx>,
        ambient: usize,
        dim: usize,
        words: Vec<Subspace>,
        property: CodeProperty,
    ) -> Result<SubspaceCode, SubspaceError> {
        let code = SubspaceCode {
            field: Arc::clone(field),
            ambient,
            dim,
            words,
            property,
        };
        code.verify_property()?;
        Ok(code)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> &[Subspace] {
        &self.words
    }

    pub fn property(&self) -> &CodeProperty {
        &self.property
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    /// Re-verifies the declared property exhaustively (pairs or triples as
    /// the property requires), in parallel over index pairs/triples.
    pub fn verify_property(&self) -> Result<(), SubspaceError> {
        for w in &self.words {
            if w.ambient() != self.ambient || w.dim() != self.dim {
                return Err(SubspaceError::PropertyViolation(format!(
                    "codeword shape {}x{} does not match declared {}x{}",
                    w.dim(),
                    w.ambient(),
                    self.dim,
                    self.ambient
                )));
            }
        }
        let n = self.words.len();
        match self.property {
            CodeProperty::MinSubspaceDistance { d } => {
                let bad = pairs(n).par_bridge().find_map_any(|(i, j)| {
                    let dist = self.words[i].distance(&self.words[j]).ok()?;
                    (dist < d).then_some((i, j, dist))
                });
                if let Some((i, j, dist)) = bad {
                    return Err(SubspaceError::PropertyViolation(format!(
                        "pair ({i},{j}) has distance {dist} < {d}"
                    )));
                }
            }
            CodeProperty::PairwiseIntersectionAtMost { d } => {
                let bad = pairs(n).par_bridge().find_map_any(|(i, j)| {
                    let joint = span_dim(&[&self.words[i], &self.words[j]]).ok()?;
                    let meet = self.words[i].dim() + self.words[j].dim() - joint;
                    (meet > d).then_some((i, j, meet))
                });
                if let Some((i, j, meet)) = bad {
                    return Err(SubspaceError::PropertyViolation(format!(
                        "pair ({i},{j}) intersects in dimension {meet} > {d}"
                    )));
                }
            }
            CodeProperty::TripleSpanAtLeast { s } => {
                let bad = triples(n).par_bridge().find_map_any(|(i, j, k)| {
                    let span =
                        span_dim(&[&self.words[i], &self.words[j], &self.words[k]]).ok()?;
                    (span < s).then_some((i, j, k, span))
                });
                if let Some((i, j, k, span)) = bad {
                    return Err(SubspaceError::PropertyViolation(format!(
                        "triple ({i},{j},{k}) spans only {span} < {s}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> + Send {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> + Send {
    (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| (j + 1..n).map(move |k| (i, j, k)))
    })
}

/// Serializable form of a subspace code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubspaceCodeJson {
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub property: CodeProperty,
    /// Canonical bases, row-major encodings, one entry per codeword.
    pub bases: Vec<Vec<u64>>,
}

impl From<&SubspaceCode> for SubspaceCodeJson {
    fn from(c: &SubspaceCode) -> Self {
        SubspaceCodeJson {
            n: c.ambient,
            k: c.dim,
            q: c.field.order(),
            property: c.property.clone(),
            bases: c
                .words
                .iter()
                .map(|w| w.basis().entries().iter().map(|e| e.0).collect())
                .collect(),
        }
    }
}

impl SubspaceCodeJson {
    /// Rebuilds and re-verifies the code. Only prime-power orders that are
    /// reachable via `FieldCtx::new` round-trip; the field is rebuilt from
    /// `q` by factoring it as `p^m`.
    pub fn build(&self) -> Result<SubspaceCode, SubspaceError> {
        let (p, m) = factor_prime_power(self.q)
            .ok_or(SubspaceError::NonPrimeBase(self.q))?;
        let field = FieldCtx::new(p, m)?;
        let words = self
            .bases
            .iter()
            .map(|b| {
                let m = Matrix::from_encodings(&field, b.len() / self.n, self.n, b)?;
                Ok(Subspace::from_matrix(&m))
            })
            .collect::<Result<Vec<_>, SubspaceError>>()?;
        SubspaceCode::new_verified(&field, self.n, self.k, words, self.property.clone())
    }
}

/// Splits a prime power into (p, m); `None` when the input is not one.
pub fn factor_prime_power(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = q;
    for d in 2..=q {
        if d * d > q {
            break;
        }
        if q % d == 0 {
            p = d;
            break;
        }
    }
    let mut m = 0usize;
    let mut rest = q;
    while rest % p == 0 {
        rest /= p;
        m += 1;
    }
    (rest == 1).then_some((p, m))
}

/// Partitions the nonzero vectors of `F_q^n` into `(q^n - 1)/(q^k - 1)`
/// pairwise trivially-intersecting k-dimensional subspaces, via the
/// subfield structure of `F_{q^n}` over `F_{q^k}`.
pub fn spread(field: &Arc<FieldCtx>, n: usize, k: usize) -> Result<SubspaceCode, SubspaceError> {
    if field.m() != 1 {
        return Err(SubspaceError::NonPrimeBase(field.order()));
    }
    if k == 0 || n % k != 0 {
        return Err(SubspaceError::SpreadDivisibility { n, k });
    }
    let q = field.p();
    let ext = FieldCtx::new(q, n)?;
    let alpha = ext.primitive_element()?;
    let ext_units = ext.order() - 1;
    let sub_units = checked_pow_u64(q, k).expect("desk scale") - 1;
    let cosets = ext_units / sub_units;
    // gamma generates the multiplicative group of the subfield F_{q^k}
    let gamma = ext.pow(alpha, cosets);

    let mut words = Vec::with_capacity(cosets as usize);
    for j in 0..cosets {
        let beta = ext.pow(alpha, j);
        let mut basis = Matrix::zeros(field, k, n);
        let mut scale = FieldElement::ONE;
        for row in 0..k {
            let v = ext.mul(beta, scale);
            // polynomial-basis coordinates of v are its base-q digits
            let mut e = v.0;
            for col in 0..n {
                basis.set(row, col, FieldElement(e % q));
                e /= q;
            }
            scale = ext.mul(scale, gamma);
        }
        words.push(Subspace::from_matrix(&basis));
    }
    SubspaceCode::new_verified(
        field,
        n,
        k,
        words,
        CodeProperty::PairwiseIntersectionAtMost { d: 0 },
    )
}

/// Greedy deterministic search for a code in which every 3 distinct
/// codewords span at least `min_span` dimensions.
///
/// Seeded with a spread when `k | n` (any 3 subspaces containing a disjoint
/// pair span at least 2k), then scans the Grassmannian in enumeration order,
/// accepting a candidate when it keeps every triple valid. Stops at
/// `target_size` or exhaustion; the returned code is exhaustively
/// triple-verified and may be smaller than the target.
pub fn triple_span_search(
    field: &Arc<FieldCtx>,
    n: usize,
    k: usize,
    min_span: usize,
    target_size: usize,
) -> Result<SubspaceCode, SubspaceError> {
    let mut words: Vec<Subspace> = Vec::new();
    if k > 0 && n % k == 0 && field.m() == 1 {
        let seed = spread(field, n, k)?;
        words.extend(seed.words().iter().cloned());
        words.truncate(target_size);
    }
    if words.len() < target_size {
        for cand in grassmannian(field, n, k)? {
            if words.contains(&cand) {
                continue;
            }
            let ok = pairs(words.len()).all(|(i, j)| {
                span_dim(&[&words[i], &words[j], &cand]).map_or(false, |s| s >= min_span)
            });
            if ok {
                words.push(cand);
                if words.len() == target_size {
                    break;
                }
            }
        }
    }
    SubspaceCode::new_verified(
        field,
        n,
        k,
        words,
        CodeProperty::TripleSpanAtLeast { s: min_span },
    )
}

/// Codes of `dim`-dimensional subspaces of `F_q^{2 dim}` under a pairwise
/// distance floor.
///
/// `min_dist = 2` is satisfied by distinctness alone, so the whole
/// Grassmannian is returned. `min_dist = 2 dim - 2` (pairwise intersections
/// of dimension at most one) is built greedily in enumeration order. Both
/// results are exhaustively pair-verified.
pub fn pairwise_distance_code(
    field: &Arc<FieldCtx>,
    ambient: usize,
    dim: usize,
    min_dist: usize,
) -> Result<SubspaceCode, SubspaceError> {
    if min_dist == 2 {
        let words: Vec<Subspace> = grassmannian(field, ambient, dim)?.collect();
        return SubspaceCode::new_verified(
            field,
            ambient,
            dim,
            words,
            CodeProperty::MinSubspaceDistance { d: 2 },
        );
    }
    if dim >= 2 && min_dist == 2 * dim - 2 {
        let mut words: Vec<Subspace> = Vec::new();
        for cand in grassmannian(field, ambient, dim)? {
            let ok = words
                .iter()
                .all(|w| w.distance(&cand).map_or(false, |d| d >= min_dist));
            if ok {
                words.push(cand);
            }
        }
        return SubspaceCode::new_verified(
            field,
            ambient,
            dim,
            words,
            CodeProperty::MinSubspaceDistance { d: min_dist },
        );
    }
    Err(SubspaceError::UnsupportedDistance { min_dist, dim })
}

fn checked_pow_u64(b: u64, e: usize) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc.checked_mul(b)?;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::prime(2).unwrap()
    }

    #[test]
    fn q_binomial_small_values() {
        assert_eq!(q_binomial(5, 0, 2).unwrap(), BigUint::from(1u32));
        assert_eq!(q_binomial(2, 1, 2).unwrap(), BigUint::from(3u32));
        // (2^2+1)(2^2+2+1) = 5 * 7
        assert_eq!(q_binomial(4, 2, 2).unwrap(), BigUint::from(35u32));
        assert_eq!(q_binomial(6, 2, 2).unwrap(), BigUint::from(651u32));
        assert_eq!(q_binomial(6, 3, 2).unwrap(), BigUint::from(1395u32));
        assert_eq!(q_binomial(3, 2, 2).unwrap(), BigUint::from(7u32));
        assert!(q_binomial(2, 3, 2).is_err());
    }

    #[test]
    fn q_binomial_matches_enumeration() {
        // independent oracle: count the RREF matrices the stream yields
        let f = f2();
        let count = grassmannian(&f, 4, 2).unwrap().count();
        assert_eq!(BigUint::from(count), q_binomial(4, 2, 2).unwrap());
    }

    #[test]
    fn canonicalization_is_row_space_invariant() {
        let f = f2();
        let m = Matrix::from_rows(&f, &[vec![1, 1], vec![1, 1]]).unwrap();
        let s = Subspace::from_matrix(&m);
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis(), &Matrix::from_rows(&f, &[vec![1, 1]]).unwrap());

        // row permutation and row operations leave the subspace unchanged
        let a = Matrix::from_rows(&f, &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let b = Matrix::from_rows(&f, &[vec![0, 1, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(Subspace::from_matrix(&a), Subspace::from_matrix(&b));

        let full = Subspace::from_matrix(&Matrix::identity(&f, 3));
        assert_eq!(full.dim(), 3);
    }

    #[test]
    fn subspace_distance_basics() {
        let f = f2();
        let u = Subspace::from_matrix(&Matrix::from_rows(&f, &[vec![1, 0]]).unwrap());
        let v = Subspace::from_matrix(&Matrix::from_rows(&f, &[vec![0, 1]]).unwrap());
        assert_eq!(u.distance(&u).unwrap(), 0);
        assert_eq!(u.distance(&v).unwrap(), 2);

        let a = Subspace::from_matrix(
            &Matrix::from_rows(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap(),
        );
        let b = Subspace::from_matrix(
            &Matrix::from_rows(&f, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap(),
        );
        assert_eq!(a.distance(&b).unwrap(), 4);
    }

    #[test]
    fn grassmannian_counts_and_uniqueness() {
        let f = f2();
        let lines: Vec<Subspace> = grassmannian(&f, 2, 1).unwrap().collect();
        assert_eq!(lines.len(), 3);

        let all: Vec<Subspace> = grassmannian(&f, 6, 2).unwrap().collect();
        assert_eq!(all.len(), 651);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 651);
    }

    #[test]
    fn grassmannian_refuses_beyond_cap() {
        let f = f2();
        assert!(matches!(
            grassmannian(&f, 12, 6),
            Err(SubspaceError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn grassmannian_over_f3_and_f4() {
        let f3 = FieldCtx::prime(3).unwrap();
        let count = grassmannian(&f3, 3, 1).unwrap().count();
        assert_eq!(BigUint::from(count), q_binomial(3, 1, 3).unwrap()); // 13

        let f4 = FieldCtx::new(2, 2).unwrap();
        let count = grassmannian(&f4, 3, 1).unwrap().count();
        assert_eq!(BigUint::from(count), q_binomial(3, 1, 4).unwrap()); // 21
    }

    #[test]
    fn span_dim_cases() {
        let f = f2();
        let u = Subspace::from_matrix(
            &Matrix::from_rows(&f, &[vec![1, 0, 0, 0, 0, 0], vec![0, 1, 0, 0, 0, 0]]).unwrap(),
        );
        let v = Subspace::from_matrix(
            &Matrix::from_rows(&f, &[vec![0, 0, 1, 0, 0, 0], vec![0, 0, 0, 1, 0, 0]]).unwrap(),
        );
        assert_eq!(span_dim(&[&u]).unwrap(), 2);
        assert_eq!(span_dim(&[&u, &u]).unwrap(), 2);
        assert_eq!(span_dim(&[&u, &v]).unwrap(), 4);
    }

    #[test]
    fn spread_trivial_and_f16() {
        let f = f2();
        let lines = spread(&f, 2, 1).unwrap();
        assert_eq!(lines.len(), 3);

        let s = spread(&f, 4, 2).unwrap();
        assert_eq!(s.len(), 5);
        for (i, a) in s.words().iter().enumerate() {
            for b in &s.words()[i + 1..] {
                assert_eq!(span_dim(&[a, b]).unwrap(), 4);
            }
        }
    }

    #[test]
    fn spread_f64_covers_all_nonzero_vectors_once() {
        let f = f2();
        let s = spread(&f, 6, 2).unwrap();
        assert_eq!(s.len(), 21);
        // each 2-space holds 3 nonzero vectors; count each exactly once
        let mut seen = std::collections::HashSet::new();
        for w in s.words() {
            let b = w.basis();
            for mask in 1u32..4 {
                let mut v = vec![0u64; 6];
                for (bit, row) in [(1, 0), (2, 1)] {
                    if mask & bit != 0 {
                        for c in 0..6 {
                            v[c] ^= b.get(row, c).0;
                        }
                    }
                }
                assert!(seen.insert(v), "vector covered twice");
            }
        }
        assert_eq!(seen.len(), 63);
    }

    #[test]
    fn spread_rejects_bad_parameters() {
        let f = f2();
        assert!(matches!(
            spread(&f, 5, 2),
            Err(SubspaceError::SpreadDivisibility { .. })
        ));
    }

    #[test]
    fn triple_span_search_trivial_targets() {
        let f = f2();
        let one = triple_span_search(&f, 6, 2, 4, 1).unwrap();
        assert_eq!(one.len(), 1);

        // a spread qualifies: three pairwise-disjoint 2-spaces span >= 4
        let spread_sized = triple_span_search(&f, 6, 2, 4, 21).unwrap();
        assert_eq!(spread_sized.len(), 21);
        spread_sized.verify_property().unwrap();
    }

    #[test]
    fn triple_span_search_beats_43() {
        let f = f2();
        let code = triple_span_search(&f, 6, 2, 4, 43).unwrap();
        assert_eq!(code.len(), 43);
        code.verify_property().unwrap();

        // unconstrained target: the deterministic greedy tops out at 79
        let max = triple_span_search(&f, 6, 2, 4, usize::MAX).unwrap();
        assert_eq!(max.len(), 79);
    }

    #[test]
    fn pairwise_distance_code_full_grassmannian() {
        let f = f2();
        let code = pairwise_distance_code(&f, 4, 2, 2).unwrap();
        assert_eq!(code.len(), 35);
        code.verify_property().unwrap();
        // degenerate: for dim 2, distance 2*2-2 = 2 hits the same branch
        assert!(matches!(
            code.property(),
            CodeProperty::MinSubspaceDistance { d: 2 }
        ));
    }

    #[test]
    fn pairwise_distance_code_intersection_bound() {
        let f = f2();
        // dim 3 in ambient 6 with pairwise intersections of dim <= 1
        let code = pairwise_distance_code(&f, 6, 3, 4).unwrap();
        assert!(code.len() >= 9); // spread of 3-spaces alone gives 9
        for (i, a) in code.words().iter().enumerate() {
            for b in &code.words()[i + 1..] {
                assert!(a.distance(b).unwrap() >= 4);
            }
        }
        assert!(matches!(
            pairwise_distance_code(&f, 6, 3, 3),
            Err(SubspaceError::UnsupportedDistance { .. })
        ));
    }

    #[test]
    fn property_verification_catches_violations() {
        let f = f2();
        let words: Vec<Subspace> = grassmannian(&f, 4, 2).unwrap().take(10).collect();
        // claiming distance 4 over the first ten 2-spaces is false
        assert!(SubspaceCode::new_verified(
            &f,
            4,
            2,
            words,
            CodeProperty::MinSubspaceDistance { d: 4 },
        )
        .is_err());
    }

    #[test]
    fn q_binomial_bracketing_bounds() {
        // q^{r(n-r)} <= [n r]_q < 4 q^{r(n-r)} on the full desk-scale grid
        for q in [2u64, 3, 4] {
            for n in 0..=12usize {
                for r in 0..=n {
                    let b = q_binomial(n, r, q).unwrap();
                    let lead = BigUint::from(q).pow((r * (n - r)) as u32);
                    assert!(b >= lead, "lower bound fails at q={q}, n={n}, r={r}");
                    assert!(
                        b < BigUint::from(4u32) * &lead,
                        "upper bound fails at q={q}, n={n}, r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn subspace_distance_triangle_inequality_sampled() {
        let f = f2();
        let all: Vec<Subspace> = grassmannian(&f, 6, 2).unwrap().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..10_000 {
            let a = &all[rng.gen_range(0..all.len())];
            let b = &all[rng.gen_range(0..all.len())];
            let c = &all[rng.gen_range(0..all.len())];
            let ab = a.distance(b).unwrap();
            let bc = b.distance(c).unwrap();
            let ac = a.distance(c).unwrap();
            assert!(ac <= ab + bc);
        }
    }

    #[test]
    fn subspace_code_json_roundtrip() {
        let f = f2();
        let code = triple_span_search(&f, 6, 2, 4, 5).unwrap();
        let json = SubspaceCodeJson::from(&code);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: SubspaceCodeJson = serde_json::from_str(&text).unwrap();
        let rebuilt = parsed.build().unwrap();
        assert_eq!(rebuilt.len(), code.len());
        assert_eq!(rebuilt.words(), code.words());
    }
}
