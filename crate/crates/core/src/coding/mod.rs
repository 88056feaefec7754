//! Network codes and the machinery around them: per-edge global coding
//! matrices, transfer-matrix verification, forward simulation, decoding,
//! the scalar-to-vector lift, and code transport across structural network
//! transformations.
//!
//! A network code assigns every edge a `t x (h*t)` matrix mapping the
//! stacked message vector to the edge symbol (`t = 1` for scalar schemes).
//! Middle nodes receive and transmit: their out-edges repeat the matrices
//! of their in-edges band for band.

mod solvers;

pub use solvers::{
    scalar_solve_combination, scalar_solve_star_or_plus, scalar_solve_tilde, solve,
    vector_solve_combination, vector_solve_star_or_plus, vector_solve_tilde,
    verify_star_vector_streaming, PairStreamMode, SchemeSpec,
};

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FieldCtx, FieldElement, Matrix, MatrixJson};
use crate::network::{EdgeOrigin, Network, Transform};
use crate::rankmetric::{lift_matrix, CompanionCode, RankCode, RankMetricError};
use crate::subspace::SubspaceError;

#[derive(Debug, Error)]
pub enum CodingError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    RankMetric(#[from] RankMetricError),
    #[error(transparent)]
    Subspace(#[from] SubspaceError),
    #[error(transparent)]
    Network(#[from] crate::network::NetworkError),
    #[error("expected a {expected} network, got {got}")]
    WrongFamily { expected: String, got: String },
    #[error("solver requires an untransformed network, found transforms {0:?}")]
    TransformedNetwork(Vec<String>),
    #[error(
        "no supported MDS generator for r = {r}, h = {h} over F_{q}: need r <= q+1, \
         or r <= q+2 when q is even and h is 3 or q-1"
    )]
    UnsupportedMdsRegime { r: usize, h: usize, q: u64 },
    #[error("{family} supply exhausted: r = {r} exceeds the bound {bound}")]
    SupplyExhausted {
        family: String,
        r: usize,
        bound: String,
    },
    #[error("code has {got} edge matrices, network has {want} edges")]
    EdgeCountMismatch { got: usize, want: usize },
    #[error("edge {edge} carries a {got_rows}x{got_cols} matrix, expected {want_rows}x{want_cols}")]
    EdgeShapeMismatch {
        edge: usize,
        got_rows: usize,
        got_cols: usize,
        want_rows: usize,
        want_cols: usize,
    },
    #[error("receiver {0} has a rank-deficient transfer matrix")]
    RankDeficientReceiver(usize),
    #[error("message length {got}, expected {want}")]
    MessageLength { got: usize, want: usize },
    #[error("edge {0} is not computable from its tail's inputs")]
    NotLocallyComputable(usize),
    #[error("observation length {got}, expected {want}")]
    ObservationLength { got: usize, want: usize },
    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),
    #[error("code json is inconsistent: {0}")]
    BadJson(String),
}

/// Coding scheme: scalar over `F_{q_s}` or `t`-dimensional vector over `F_q`.
#[derive(Debug, Clone)]
pub enum Scheme {
    Scalar { field: Arc<FieldCtx> },
    Vector { field: Arc<FieldCtx>, t: usize },
}

impl Scheme {
    pub fn field(&self) -> &Arc<FieldCtx> {
        match self {
            Scheme::Scalar { field } => field,
            Scheme::Vector { field, .. } => field,
        }
    }

    /// Vector dimension; 1 for scalar schemes.
    pub fn t(&self) -> usize {
        match self {
            Scheme::Scalar { .. } => 1,
            Scheme::Vector { t, .. } => *t,
        }
    }

    pub fn tag(&self) -> SchemeTag {
        match self {
            Scheme::Scalar { field } => SchemeTag::Scalar(field.order()),
            Scheme::Vector { field, t } => SchemeTag::Vector {
                q: field.order(),
                t: *t,
            },
        }
    }
}

/// Serialized scheme: `{"scalar": q_s}` or `{"vector": {"q": .., "t": ..}}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeTag {
    #[serde(rename = "scalar")]
    Scalar(u64),
    #[serde(rename = "vector")]
    Vector { q: u64, t: usize },
}

/// A fully assigned network code: one global coding matrix per edge.
#[derive(Debug, Clone)]
pub struct NetworkCode {
    scheme: Scheme,
    h: usize,
    matrices: Vec<Matrix>,
    notes: Vec<String>,
    provenance: String,
}

impl NetworkCode {
    pub(crate) fn new(
        scheme: Scheme,
        h: usize,
        matrices: Vec<Matrix>,
        notes: Vec<String>,
        provenance: String,
    ) -> NetworkCode {
        debug_assert_eq!(matrices.len(), notes.len());
        NetworkCode {
            scheme,
            h,
            matrices,
            notes,
            provenance,
        }
    }

    pub fn scheme(&self) -> &Scheme {
        &self.scheme
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn t(&self) -> usize {
        self.scheme.t()
    }

    pub fn edge_matrix(&self, edge: usize) -> &Matrix {
        &self.matrices[edge]
    }

    pub fn edge_note(&self, edge: usize) -> &str {
        &self.notes[edge]
    }

    pub fn edge_count(&self) -> usize {
        self.matrices.len()
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Checks that the code covers every edge of the network with a matrix
    /// of the expected shape.
    pub fn validate_against(&self, net: &Network) -> Result<(), CodingError> {
        if self.matrices.len() != net.edges().len() {
            return Err(CodingError::EdgeCountMismatch {
                got: self.matrices.len(),
                want: net.edges().len(),
            });
        }
        let t = self.t();
        let want_cols = net.h() * t;
        for (e, m) in self.matrices.iter().enumerate() {
            if m.rows() != t || m.cols() != want_cols {
                return Err(CodingError::EdgeShapeMismatch {
                    edge: e,
                    got_rows: m.rows(),
                    got_cols: m.cols(),
                    want_rows: t,
                    want_cols,
                });
            }
        }
        Ok(())
    }

    /// Zeroes one edge matrix (for fault-injection tests).
    pub fn corrupt_edge(&mut self, edge: usize) {
        let m = &self.matrices[edge];
        self.matrices[edge] = Matrix::zeros(m.field(), m.rows(), m.cols());
        self.notes[edge] = "corrupted".to_string();
    }
}

/// The stacked message: `h` vectors of length `t` over the coding field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message(pub Vec<FieldElement>);

impl Message {
    pub fn random(field: &Arc<FieldCtx>, len: usize, rng: &mut impl Rng) -> Message {
        Message(
            (0..len)
                .map(|_| FieldElement(rng.gen_range(0..field.order())))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// One verification record per receiver checked.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReceiverRecord {
    pub receiver: usize,
    pub rank: usize,
    pub required: usize,
    pub pass: bool,
}

/// Per-receiver rank results. `records` lists every checked receiver unless
/// `truncated_to_failures` is set (streaming mode over huge networks).
/// Wall-clock time is kept in memory only so reports serialize
/// byte-identically across runs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<ReceiverRecord>,
    pub receivers_checked: usize,
    pub receivers_total: usize,
    pub passed: usize,
    pub failed: usize,
    pub required_rank: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated_to_failures: bool,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn pass_set(&self) -> Vec<usize> {
        self.records
            .iter()
            .filter(|r| r.pass)
            .map(|r| r.receiver)
            .collect()
    }
}

/// Stacks the coding matrices of a receiver's in-edges, in the network's
/// canonical edge order.
pub fn transfer_matrix(
    net: &Network,
    code: &NetworkCode,
    receiver: usize,
) -> Result<Matrix, CodingError> {
    let rec = net
        .receivers()
        .get(receiver)
        .ok_or(crate::network::NetworkError::UnknownReceiver(
            receiver,
            net.receivers().len(),
        ))?;
    let parts: Vec<&Matrix> = rec.in_edges.iter().map(|&e| code.edge_matrix(e)).collect();
    Ok(Matrix::vstack(&parts))
}

fn check_receiver(net: &Network, code: &NetworkCode, ridx: usize, required: usize) -> ReceiverRecord {
    let rank = transfer_matrix(net, code, ridx)
        .map(|m| m.rank())
        .unwrap_or(0);
    ReceiverRecord {
        receiver: ridx,
        rank,
        required,
        pass: rank == required,
    }
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

/// Verifies every receiver: pass iff the transfer matrix has rank `h * t`.
/// `workers = 0` uses the global thread pool; the result is identical for
/// any worker count.
pub fn verify_solution(
    net: &Network,
    code: &NetworkCode,
    workers: usize,
) -> Result<VerificationReport, CodingError> {
    code.validate_against(net)?;
    let required = net.h() * code.t();
    let start = Instant::now();
    let records: Vec<ReceiverRecord> = run_in_pool(workers, || {
        (0..net.receivers().len())
            .into_par_iter()
            .map(|ridx| check_receiver(net, code, ridx, required))
            .collect()
    });
    let passed = records.iter().filter(|r| r.pass).count();
    let failed = records.len() - passed;
    Ok(VerificationReport {
        receivers_checked: records.len(),
        receivers_total: net.receivers().len(),
        passed,
        failed,
        required_rank: required,
        truncated_to_failures: false,
        elapsed: start.elapsed(),
        records,
    })
}

/// Verifies a deterministic seeded sample of at most `cap` receivers.
pub fn verify_solution_sampled(
    net: &Network,
    code: &NetworkCode,
    cap: usize,
    seed: u64,
    workers: usize,
) -> Result<VerificationReport, CodingError> {
    let total = net.receivers().len();
    if cap >= total {
        let mut report = verify_solution(net, code, workers)?;
        report.receivers_total = total;
        return Ok(report);
    }
    code.validate_against(net)?;
    let required = net.h() * code.t();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut indices = rand::seq::index::sample(&mut rng, total, cap).into_vec();
    indices.sort_unstable();
    let start = Instant::now();
    let records: Vec<ReceiverRecord> = run_in_pool(workers, || {
        indices
            .into_par_iter()
            .map(|ridx| check_receiver(net, code, ridx, required))
            .collect()
    });
    let passed = records.iter().filter(|r| r.pass).count();
    let failed = records.len() - passed;
    Ok(VerificationReport {
        receivers_checked: records.len(),
        receivers_total: total,
        passed,
        failed,
        required_rank: required,
        truncated_to_failures: false,
        elapsed: start.elapsed(),
        records,
    })
}

/// Forward-evaluates the network on a message, layer by layer.
///
/// Source-tail edges emit `M_e * msg` directly. Every other node must form
/// each out-edge symbol as a local combination of its in-edge symbols; the
/// combination is recovered by expressing the out-edge's global matrix in
/// the row space of the stacked in-edge matrices, so a global assignment
/// that is not locally realizable is rejected. Returns one observation
/// vector per receiver (the concatenated in-edge symbols).
pub fn simulate(
    net: &Network,
    code: &NetworkCode,
    msg: &Message,
) -> Result<Vec<Vec<FieldElement>>, CodingError> {
    code.validate_against(net)?;
    let want = net.h() * code.t();
    if msg.len() != want {
        return Err(CodingError::MessageLength {
            got: msg.len(),
            want,
        });
    }
    let mut edge_symbols: Vec<Option<Vec<FieldElement>>> = vec![None; net.edges().len()];
    for v in net.topological_order() {
        let outs = net.out_edges(v);
        if outs.is_empty() {
            continue;
        }
        if v == net.source() {
            for e in outs {
                edge_symbols[e] = Some(code.edge_matrix(e).mul_vec(&msg.0));
            }
            continue;
        }
        let ins = net.in_edges(v);
        let in_mats: Vec<&Matrix> = ins.iter().map(|&e| code.edge_matrix(e)).collect();
        let stacked = Matrix::vstack(&in_mats);
        let mut in_syms = Vec::with_capacity(stacked.rows());
        for &e in &ins {
            in_syms.extend_from_slice(
                edge_symbols[e]
                    .as_ref()
                    .expect("topological order delivers inputs first"),
            );
        }
        for e in outs {
            let w = Matrix::express_in_rowspace(&stacked, code.edge_matrix(e))
                .ok_or(CodingError::NotLocallyComputable(e))?;
            edge_symbols[e] = Some(w.mul_vec(&in_syms));
        }
    }

    let mut out = Vec::with_capacity(net.receivers().len());
    for rec in net.receivers() {
        let mut obs = Vec::new();
        for &e in &rec.in_edges {
            obs.extend_from_slice(
                edge_symbols[e]
                    .as_ref()
                    .ok_or(CodingError::NotLocallyComputable(e))?,
            );
        }
        out.push(obs);
    }
    Ok(out)
}

/// Solves the receiver's (possibly overdetermined) linear system and
/// returns the unique message; errors on a rank-deficient transfer matrix.
pub fn decode_receiver(
    net: &Network,
    code: &NetworkCode,
    receiver: usize,
    observation: &[FieldElement],
) -> Result<Message, CodingError> {
    let transfer = transfer_matrix(net, code, receiver)?;
    if observation.len() != transfer.rows() {
        return Err(CodingError::ObservationLength {
            got: observation.len(),
            want: transfer.rows(),
        });
    }
    let field = transfer.field().clone();
    let mut rhs = Matrix::zeros(&field, observation.len(), 1);
    for (i, &v) in observation.iter().enumerate() {
        rhs.set(i, 0, v);
    }
    let x = transfer
        .solve_full_rank(&rhs)
        .map_err(|_| CodingError::RankDeficientReceiver(receiver))?;
    Ok(Message((0..x.rows()).map(|i| x.get(i, 0)).collect()))
}

/// Lifts a scalar code over `F_{q^t}` to a vector code over `F_q`: every
/// scalar coefficient becomes its companion-matrix image, block for block.
pub fn lift_network_code(
    code: &NetworkCode,
    companion: &CompanionCode,
) -> Result<NetworkCode, CodingError> {
    let Scheme::Scalar { field: ext } = code.scheme() else {
        return Err(CodingError::SchemeMismatch(
            "lift applies to scalar codes".into(),
        ));
    };
    let ext = Arc::clone(ext);
    let matrices = code
        .matrices
        .iter()
        .map(|m| lift_matrix(m, &ext, companion))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(NetworkCode::new(
        Scheme::Vector {
            field: Arc::clone(companion.field()),
            t: companion.t(),
        },
        code.h(),
        matrices,
        code.notes.clone(),
        format!("{} lifted through companion blocks", code.provenance),
    ))
}

/// Carries a verified code across a structural transformation: copied edges
/// keep their matrices; message-selector edges (behind decode-capable
/// relays) get unit block selectors.
pub fn transfer_code(
    transform: &Transform,
    code: &NetworkCode,
) -> Result<NetworkCode, CodingError> {
    let t = code.t();
    let h = code.h();
    let field = code.scheme().field().clone();
    let mut matrices = Vec::with_capacity(transform.network.edges().len());
    let mut notes = Vec::with_capacity(transform.network.edges().len());
    for (e, origin) in transform.edge_origin.iter().enumerate() {
        match *origin {
            EdgeOrigin::Copied(old) => {
                matrices.push(code.edge_matrix(old).clone());
                notes.push(code.edge_note(old).to_string());
            }
            EdgeOrigin::MessageBlock(j) => {
                let mut sel = Matrix::zeros(&field, t, h * t);
                for i in 0..t {
                    sel.set(i, j * t + i, FieldElement::ONE);
                }
                matrices.push(sel);
                notes.push(format!("message-block selector {j} (edge {e})"));
            }
        }
    }
    Ok(NetworkCode::new(
        code.scheme.clone(),
        h,
        matrices,
        notes,
        format!(
            "{} mapped through {:?}",
            code.provenance,
            transform.network.family().transforms
        ),
    ))
}

/// JSON shape for a network code.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkCodeJson {
    pub scheme: SchemeTag,
    pub edges: Vec<EdgeCodeJson>,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeCodeJson {
    pub edge: usize,
    pub matrix: MatrixJson,
    pub note: String,
}

impl From<&NetworkCode> for NetworkCodeJson {
    fn from(c: &NetworkCode) -> Self {
        NetworkCodeJson {
            scheme: c.scheme.tag(),
            edges: c
                .matrices
                .iter()
                .zip(&c.notes)
                .enumerate()
                .map(|(edge, (m, note))| EdgeCodeJson {
                    edge,
                    matrix: MatrixJson::from(m),
                    note: note.clone(),
                })
                .collect(),
            provenance: c.provenance.clone(),
        }
    }
}

impl NetworkCodeJson {
    pub fn build(&self) -> Result<NetworkCode, CodingError> {
        if self.edges.is_empty() {
            return Err(CodingError::BadJson("code has no edges".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.edge != i {
                return Err(CodingError::BadJson(format!(
                    "edge ids must be dense, got {} at position {i}",
                    e.edge
                )));
            }
        }
        let field = self.edges[0].matrix.field.build()?;
        let matrices = self
            .edges
            .iter()
            .map(|e| e.matrix.build_in(&field))
            .collect::<Result<Vec<_>, _>>()?;
        let notes: Vec<String> = self.edges.iter().map(|e| e.note.clone()).collect();
        let (scheme, t) = match self.scheme {
            SchemeTag::Scalar(q) => {
                if field.order() != q {
                    return Err(CodingError::BadJson(format!(
                        "scheme says q_s = {q}, matrices live over F_{}",
                        field.order()
                    )));
                }
                (
                    Scheme::Scalar {
                        field: field.clone(),
                    },
                    1,
                )
            }
            SchemeTag::Vector { q, t } => {
                if field.order() != q {
                    return Err(CodingError::BadJson(format!(
                        "scheme says q = {q}, matrices live over F_{}",
                        field.order()
                    )));
                }
                (
                    Scheme::Vector {
                        field: field.clone(),
                        t,
                    },
                    t,
                )
            }
        };
        let first = &matrices[0];
        if first.rows() != t || first.cols() % t != 0 {
            return Err(CodingError::BadJson(format!(
                "edge matrices are {}x{}, inconsistent with t = {t}",
                first.rows(),
                first.cols()
            )));
        }
        let h = first.cols() / t;
        for m in &matrices {
            if m.rows() != t || m.cols() != h * t {
                return Err(CodingError::BadJson("edge matrix shapes differ".into()));
            }
        }
        Ok(NetworkCode::new(
            scheme,
            h,
            matrices,
            notes,
            self.provenance.clone(),
        ))
    }
}
