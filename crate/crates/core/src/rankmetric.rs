//! Rank-metric codes: the commutative companion-matrix code generated by a
//! primitive polynomial, Gabidulin codes from q-linearized polynomial
//! evaluation, rank-distance verification, and the lift that replaces field
//! scalars by companion-matrix powers.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algebra::{find_primitive_polynomial, AlgebraError, FieldCtx, FieldElement, Matrix};

#[derive(Debug, Error)]
pub enum RankMetricError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("polynomial must be monic of degree {0}")]
    NonMonicPolynomial(usize),
    #[error("base field must be a prime field, got order {0}")]
    NonPrimeBase(u64),
    #[error("minimum distance {delta} is not feasible for side {side}")]
    InfeasibleDistance { side: usize, delta: usize },
    #[error("codeword index {index} out of range for code of size {size}")]
    IndexOutOfRange { index: u128, size: u128 },
    #[error("code too large to enumerate exhaustively ({0} codewords)")]
    TooLargeForExhaustive(u128),
    #[error("codewords must be distinct")]
    DuplicateCodeword,
    #[error("scalar field F_{order} does not match companion code over F_{q} of degree {t}")]
    MismatchedExtension { order: u64, q: u64, t: usize },
    #[error("scalar field modulus differs from the companion polynomial")]
    MismatchedModulus,
}

/// Builds the companion matrix of a monic polynomial: ones on the main
/// sub-diagonal, additive inverses of the coefficients in the rightmost
/// column, zeros elsewhere.
pub fn companion_matrix(
    field: &Arc<FieldCtx>,
    poly: &[u64],
) -> Result<Matrix, RankMetricError> {
    let t = poly.len().saturating_sub(1);
    if t == 0 || poly[t] != 1 {
        return Err(RankMetricError::NonMonicPolynomial(t));
    }
    let mut c = Matrix::zeros(field, t, t);
    for i in 1..t {
        c.set(i, i - 1, FieldElement::ONE);
    }
    for i in 0..t {
        let coeff = field.element(poly[i])?;
        c.set(i, t - 1, field.neg(coeff));
    }
    Ok(c)
}

/// A code over matrices with a declared minimum rank distance, enumerable by
/// index. Index 0 is always the zero matrix.
pub trait RankCode {
    fn field(&self) -> &Arc<FieldCtx>;
    /// Matrix shape (rows, cols) of every codeword.
    fn shape(&self) -> (usize, usize);
    /// Declared minimum rank distance.
    fn distance(&self) -> usize;
    /// Number of codewords.
    fn size(&self) -> u128;
    fn codeword(&self, index: u128) -> Result<Matrix, RankMetricError>;
}

/// A codeword together with its enumeration index.
#[derive(Debug, Clone)]
pub struct RankCodeword {
    pub index: u128,
    pub matrix: Matrix,
}

/// The commutative code `{0, I, C, C^2, ..., C^{q^t - 2}}` generated by the
/// companion matrix `C` of a primitive polynomial of degree `t` over a prime
/// field `F_q`. It has `q^t` codewords, minimum rank distance `t`, and is a
/// field isomorphic to `F_{q^t}`.
#[derive(Debug, Clone)]
pub struct CompanionCode {
    field: Arc<FieldCtx>,
    t: usize,
    poly: Vec<u64>,
    companion: Matrix,
    size: u128,
}

impl CompanionCode {
    /// Uses the lowest-encoding primitive polynomial of degree `t`, the same
    /// one `FieldCtx::new(q, t)` would pick as modulus.
    pub fn new(field: &Arc<FieldCtx>, t: usize) -> Result<CompanionCode, RankMetricError> {
        if field.m() != 1 {
            return Err(RankMetricError::NonPrimeBase(field.order()));
        }
        let poly = find_primitive_polynomial(field.p(), t)?;
        Self::with_polynomial(field, &poly)
    }

    pub fn with_polynomial(
        field: &Arc<FieldCtx>,
        poly: &[u64],
    ) -> Result<CompanionCode, RankMetricError> {
        if field.m() != 1 {
            return Err(RankMetricError::NonPrimeBase(field.order()));
        }
        let t = poly.len().saturating_sub(1);
        let companion = companion_matrix(field, poly)?;
        let size = (field.p() as u128)
            .checked_pow(t as u32)
            .ok_or(RankMetricError::TooLargeForExhaustive(u128::MAX))?;
        Ok(CompanionCode {
            field: Arc::clone(field),
            t,
            poly: poly.to_vec(),
            companion,
            size,
        })
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn polynomial(&self) -> &[u64] {
        &self.poly
    }

    pub fn companion(&self) -> &Matrix {
        &self.companion
    }

    /// Codewords in enumeration order: zero, then ascending powers of `C`.
    pub fn iter(&self) -> impl Iterator<Item = Matrix> + '_ {
        let mut power = Matrix::identity(&self.field, self.t);
        let mut index = 0u128;
        std::iter::from_fn(move || {
            if index >= self.size {
                return None;
            }
            let out = if index == 0 {
                Matrix::zeros(&self.field, self.t, self.t)
            } else {
                let cur = power.clone();
                power = power.mul(&self.companion);
                cur
            };
            index += 1;
            Some(out)
        })
    }
}

impl RankCode for CompanionCode {
    fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    fn shape(&self) -> (usize, usize) {
        (self.t, self.t)
    }

    fn distance(&self) -> usize {
        self.t
    }

    fn size(&self) -> u128 {
        self.size
    }

    fn codeword(&self, index: u128) -> Result<Matrix, RankMetricError> {
        if index >= self.size {
            return Err(RankMetricError::IndexOutOfRange {
                index,
                size: self.size,
            });
        }
        if index == 0 {
            Ok(Matrix::zeros(&self.field, self.t, self.t))
        } else {
            Ok(self.companion.pow(index as u64 - 1))
        }
    }
}

/// A square Gabidulin code: evaluations of q-linearized polynomials of
/// bounded q-degree at a basis of the extension field, expanded into
/// matrices over the prime base field.
///
/// For side `n` and minimum rank distance `delta`, the dimension over the
/// base field is `n * (n - delta + 1)`, which meets the rank-metric
/// Singleton-like bound with equality.
#[derive(Debug, Clone)]
pub struct GabidulinCode {
    base: Arc<FieldCtx>,
    ext: Arc<FieldCtx>,
    side: usize,
    delta: usize,
    /// Number of extension-field coefficients: `side - delta + 1`.
    coeffs: usize,
    /// Dimension over the base field.
    dim: usize,
    size: u128,
    /// Evaluation points: the polynomial basis 1, x, ..., x^{side-1}.
    points: Vec<FieldElement>,
}

impl GabidulinCode {
    pub fn new(
        base: &Arc<FieldCtx>,
        side: usize,
        delta: usize,
    ) -> Result<GabidulinCode, RankMetricError> {
        if base.m() != 1 {
            return Err(RankMetricError::NonPrimeBase(base.order()));
        }
        if delta == 0 || delta > side {
            return Err(RankMetricError::InfeasibleDistance { side, delta });
        }
        let ext = FieldCtx::new(base.p(), side)?;
        let coeffs = side - delta + 1;
        let dim = side * coeffs;
        let size = (base.p() as u128)
            .checked_pow(dim as u32)
            .ok_or(RankMetricError::TooLargeForExhaustive(u128::MAX))?;
        let x = ext.x_element();
        let points: Vec<FieldElement> = (0..side).map(|i| ext.pow(x, i as u64)).collect();
        Ok(GabidulinCode {
            base: Arc::clone(base),
            ext,
            side,
            delta,
            coeffs,
            dim,
            size,
            points,
        })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Dimension over the base field.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn extension(&self) -> &Arc<FieldCtx> {
        &self.ext
    }

    /// Evaluates the q-linearized polynomial with the given extension-field
    /// coefficients at a point: `sum_i f_i * y^(q^i)`.
    fn evaluate(&self, coeffs: &[FieldElement], y: FieldElement) -> FieldElement {
        let q = self.base.p();
        let mut acc = FieldElement::ZERO;
        let mut y_q_power = y;
        for &f in coeffs {
            acc = self.ext.add(acc, self.ext.mul(f, y_q_power));
            y_q_power = self.ext.pow(y_q_power, q);
        }
        acc
    }
}

impl RankCode for GabidulinCode {
    fn field(&self) -> &Arc<FieldCtx> {
        &self.base
    }

    fn shape(&self) -> (usize, usize) {
        (self.side, self.side)
    }

    fn distance(&self) -> usize {
        self.delta
    }

    fn size(&self) -> u128 {
        self.size
    }

    /// Index-to-codeword bijection: the index is read as base-q digits,
    /// grouped into `side` digits per extension-field coefficient, lowest
    /// digits first. Index 0 maps to the zero matrix.
    fn codeword(&self, index: u128) -> Result<Matrix, RankMetricError> {
        if index >= self.size {
            return Err(RankMetricError::IndexOutOfRange {
                index,
                size: self.size,
            });
        }
        let ext_order = self.ext.order() as u128;
        let mut rest = index;
        let mut coeffs = Vec::with_capacity(self.coeffs);
        for _ in 0..self.coeffs {
            coeffs.push(FieldElement((rest % ext_order) as u64));
            rest /= ext_order;
        }
        let q = self.base.p();
        let mut m = Matrix::zeros(&self.base, self.side, self.side);
        for (col, &pt) in self.points.iter().enumerate() {
            let val = self.evaluate(&coeffs, pt);
            // expand into polynomial-basis coordinates = base-q digits
            let mut e = val.0;
            for row in 0..self.side {
                m.set(row, col, FieldElement(e % q));
                e /= q;
            }
        }
        Ok(m)
    }
}

/// Retrieves a codeword with its index attached.
pub fn mrd_codeword(code: &dyn RankCode, index: u128) -> Result<RankCodeword, RankMetricError> {
    Ok(RankCodeword {
        index,
        matrix: code.codeword(index)?,
    })
}

/// Rank of the difference of two equal-shape matrices over the same field.
pub fn rank_distance(a: &Matrix, b: &Matrix) -> Result<usize, RankMetricError> {
    if !a.field().same_field(b.field()) {
        return Err(AlgebraError::FieldMismatch.into());
    }
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(AlgebraError::ShapeMismatch(format!(
            "{}x{} vs {}x{}",
            a.rows(),
            b.rows(),
            a.cols(),
            b.cols()
        ))
        .into());
    }
    Ok(a.sub(b).rank())
}

/// How to check a code's minimum distance.
#[derive(Debug, Clone, Copy)]
pub enum VerifyMode {
    /// All pairs; only permitted for codes of size <= 2^12.
    Exhaustive,
    /// A fixed number of seeded random pairs.
    Sampled { pairs: usize, seed: u64 },
}

#[derive(Debug, Clone)]
pub struct MrdReport {
    pub declared_distance: usize,
    pub min_distance_found: usize,
    pub pairs_checked: u64,
    /// Indices of a violating pair, when one was found.
    pub violation: Option<(u128, u128)>,
}

impl MrdReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks the minimum rank distance of a code against its declared value.
///
/// Exhaustive mode reports the exact minimum over all pairs; sampled mode
/// reports the minimum over the sampled pairs, which must not dip below the
/// declared distance.
pub fn verify_mrd(code: &dyn RankCode, mode: VerifyMode) -> Result<MrdReport, RankMetricError> {
    let declared = code.distance();
    let mut min_found = usize::MAX;
    let mut pairs_checked = 0u64;
    let mut violation = None;

    let mut check = |i: u128, j: u128| -> Result<(), RankMetricError> {
        let a = code.codeword(i)?;
        let b = code.codeword(j)?;
        let d = rank_distance(&a, &b)?;
        pairs_checked += 1;
        if d < min_found {
            min_found = d;
        }
        if d < declared && violation.is_none() {
            violation = Some((i, j));
        }
        Ok(())
    };

    match mode {
        VerifyMode::Exhaustive => {
            let n = code.size();
            if n > 1 << 12 {
                return Err(RankMetricError::TooLargeForExhaustive(n));
            }
            for i in 0..n {
                for j in i + 1..n {
                    check(i, j)?;
                }
            }
        }
        VerifyMode::Sampled { pairs, seed } => {
            let n = code.size();
            if n >= 2 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut done = 0usize;
                while done < pairs {
                    let i = rng.gen_range(0..n);
                    let j = rng.gen_range(0..n);
                    if i == j {
                        continue;
                    }
                    check(i.min(j), i.max(j))?;
                    done += 1;
                }
            }
        }
    }

    Ok(MrdReport {
        declared_distance: declared,
        min_distance_found: min_found,
        pairs_checked,
        violation,
    })
}

/// Lifts one scalar of `F_{q^t}` to its companion-matrix image: zero maps to
/// the zero matrix and the `s`-th power of the primitive element to `C^s`.
///
/// The extension field's modulus must equal the code's companion polynomial;
/// then the map is a field isomorphism.
pub fn lift_element(
    scalar: FieldElement,
    ext: &Arc<FieldCtx>,
    code: &CompanionCode,
) -> Result<Matrix, RankMetricError> {
    check_lift_compat(ext, code)?;
    if scalar.is_zero() {
        return Ok(Matrix::zeros(code.field(), code.t(), code.t()));
    }
    let s = ext.dlog(scalar)?;
    Ok(code.companion().pow(s))
}

/// Lifts every scalar of a list; the image of `alpha^s` is `C^s`.
pub fn lift_scalar_solution(
    scalars: &[FieldElement],
    ext: &Arc<FieldCtx>,
    code: &CompanionCode,
) -> Result<Vec<Matrix>, RankMetricError> {
    scalars
        .iter()
        .map(|&s| lift_element(s, ext, code))
        .collect()
}

/// Entry-wise lift of a matrix over `F_{q^t}` into a block matrix over
/// `F_q`: every scalar entry becomes a `t x t` block.
pub fn lift_matrix(
    m: &Matrix,
    ext: &Arc<FieldCtx>,
    code: &CompanionCode,
) -> Result<Matrix, RankMetricError> {
    check_lift_compat(ext, code)?;
    let t = code.t();
    let mut out = Matrix::zeros(code.field(), m.rows() * t, m.cols() * t);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let block = lift_element(m.get(i, j), ext, code)?;
            for bi in 0..t {
                for bj in 0..t {
                    out.set(i * t + bi, j * t + bj, block.get(bi, bj));
                }
            }
        }
    }
    Ok(out)
}

fn check_lift_compat(ext: &Arc<FieldCtx>, code: &CompanionCode) -> Result<(), RankMetricError> {
    let q = code.field().p();
    if ext.p() != q || ext.m() != code.t() {
        return Err(RankMetricError::MismatchedExtension {
            order: ext.order(),
            q,
            t: code.t(),
        });
    }
    if ext.modulus() != code.polynomial() {
        return Err(RankMetricError::MismatchedModulus);
    }
    Ok(())
}

/// Stacks block rows `(I, C_i, C_i^2, ..., C_i^{h-1})` for the given
/// codewords into an `ht x ht` matrix. The codewords must be distinct
/// square matrices of equal size.
pub fn block_vandermonde(codewords: &[Matrix]) -> Result<Matrix, RankMetricError> {
    let h = codewords.len();
    assert!(h > 0, "need at least one codeword");
    for i in 0..h {
        for j in i + 1..h {
            if codewords[i] == codewords[j] {
                return Err(RankMetricError::DuplicateCodeword);
            }
        }
    }
    let field = codewords[0].field();
    let t = codewords[0].rows();
    let mut rows = Vec::with_capacity(h);
    for c in codewords {
        assert!(c.rows() == t && c.cols() == t, "codeword shape mismatch");
        let mut blocks = Vec::with_capacity(h);
        let mut power = Matrix::identity(field, t);
        for _ in 0..h {
            blocks.push(power.clone());
            power = power.mul(c);
        }
        let refs: Vec<&Matrix> = blocks.iter().collect();
        rows.push(Matrix::hstack(&refs));
    }
    let refs: Vec<&Matrix> = rows.iter().collect();
    Ok(Matrix::vstack(&refs))
}

/// True when every window of `l` consecutive block rows times `l`
/// consecutive block columns has full rank `l * t`, for every window size
/// `l` from 1 to the block count.
pub fn check_consecutive_blocks(m: &Matrix, t: usize) -> bool {
    assert!(t > 0 && m.rows() % t == 0 && m.cols() % t == 0);
    let h = m.rows() / t;
    assert_eq!(m.cols() / t, h, "expected a square block matrix");
    for l in 1..=h {
        for bi in 0..=h - l {
            for bj in 0..=h - l {
                let sub = m.submatrix(bi * t, (bi + l) * t, bj * t, (bj + l) * t);
                if sub.rank() != l * t {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::prime(2).unwrap()
    }

    #[test]
    fn companion_of_quadratic() {
        let f = f2();
        // x^2 + x + 1
        let c = companion_matrix(&f, &[1, 1, 1]).unwrap();
        assert_eq!(c, Matrix::from_rows(&f, &[vec![0, 1], vec![1, 1]]).unwrap());
        // C^2 + C + I = 0
        let sum = c.pow(2).add(&c).add(&Matrix::identity(&f, 2));
        assert!(sum.is_zero());
    }

    #[test]
    fn companion_of_x_is_zero_1x1() {
        let f = f2();
        let c = companion_matrix(&f, &[0, 1]).unwrap();
        assert_eq!(c.rows(), 1);
        assert!(c.is_zero());
    }

    #[test]
    fn companion_of_cubic_has_order_seven() {
        let f = f2();
        // x^3 + x + 1: sub-diagonal ones, last column (1, 1, 0)
        let c = companion_matrix(&f, &[1, 1, 0, 1]).unwrap();
        let expected = Matrix::from_rows(
            &f,
            &[vec![0, 0, 1], vec![1, 0, 1], vec![0, 1, 0]],
        )
        .unwrap();
        assert_eq!(c, expected);
        let id = Matrix::identity(&f, 3);
        let mut p = c.clone();
        let mut order = 1;
        while p != id {
            p = p.mul(&c);
            order += 1;
        }
        assert_eq!(order, 7);
    }

    #[test]
    fn companion_code_d1_and_d2() {
        let f = f2();
        let d1 = CompanionCode::new(&f, 1).unwrap();
        assert_eq!(d1.size(), 2);
        assert!(d1.codeword(0).unwrap().is_zero());
        assert_eq!(d1.codeword(1).unwrap(), Matrix::identity(&f, 1));

        let d2 = CompanionCode::new(&f, 2).unwrap();
        assert_eq!(d2.size(), 4);
        let words: Vec<Matrix> = d2.iter().collect();
        assert_eq!(words.len(), 4);
        // all pairwise differences invertible
        for i in 0..4 {
            for j in i + 1..4 {
                assert_eq!(rank_distance(&words[i], &words[j]).unwrap(), 2);
            }
        }
        // commutativity
        for a in &words {
            for b in &words {
                assert_eq!(a.mul(b), b.mul(a));
            }
        }
    }

    #[test]
    fn companion_code_f3_t2() {
        let f = FieldCtx::prime(3).unwrap();
        let d = CompanionCode::new(&f, 2).unwrap();
        assert_eq!(d.size(), 9);
        let report = verify_mrd(&d, VerifyMode::Exhaustive).unwrap();
        assert!(report.ok());
        assert_eq!(report.min_distance_found, 2);
    }

    #[test]
    fn companion_codes_commute_and_attain_exact_distance() {
        // all pairwise products commute and the exhaustive minimum rank
        // distance equals t exactly, across every small code we build
        for (p, t) in [(2u64, 1usize), (2, 2), (2, 3), (2, 4), (3, 1), (3, 2), (5, 1)] {
            let f = FieldCtx::prime(p).unwrap();
            let code = CompanionCode::new(&f, t).unwrap();
            let words: Vec<Matrix> = code.iter().collect();
            assert_eq!(words.len() as u128, (p as u128).pow(t as u32));
            for a in &words {
                for b in &words {
                    assert_eq!(a.mul(b), b.mul(a), "p={p}, t={t}");
                }
            }
            let report = verify_mrd(&code, VerifyMode::Exhaustive).unwrap();
            assert!(report.ok());
            assert_eq!(report.min_distance_found, t, "p={p}, t={t}");
        }
    }

    #[test]
    fn gabidulin_exact_distance_small_codes() {
        // exhaustively checkable parameter sets attain distance exactly delta
        let f = f2();
        for (side, delta) in [(2usize, 1usize), (2, 2), (3, 2), (3, 3)] {
            let g = GabidulinCode::new(&f, side, delta).unwrap();
            assert_eq!(g.dim(), side * (side - delta + 1));
            let report = verify_mrd(&g, VerifyMode::Exhaustive).unwrap();
            assert!(report.ok(), "side={side}, delta={delta}");
            assert_eq!(report.min_distance_found, delta, "side={side}, delta={delta}");
        }
    }

    #[test]
    fn gabidulin_full_space_when_delta_one() {
        let f = f2();
        let g = GabidulinCode::new(&f, 2, 1).unwrap();
        assert_eq!(g.dim(), 4);
        assert_eq!(g.size(), 16);
        // distinct indices give distinct matrices: the code is all of F_2^{2x2}
        let mut seen = std::collections::HashSet::new();
        for i in 0..16 {
            seen.insert(g.codeword(i).unwrap());
        }
        assert_eq!(seen.len(), 16);
        let report = verify_mrd(&g, VerifyMode::Exhaustive).unwrap();
        assert!(report.ok());
        assert_eq!(report.min_distance_found, 1);
    }

    #[test]
    fn gabidulin_2x2_delta2_exhaustive() {
        let f = f2();
        let g = GabidulinCode::new(&f, 2, 2).unwrap();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.size(), 4);
        let report = verify_mrd(&g, VerifyMode::Exhaustive).unwrap();
        assert!(report.ok());
        assert_eq!(report.min_distance_found, 2);
        assert_eq!(report.pairs_checked, 6);
    }

    #[test]
    fn gabidulin_4x4_delta2_sampled() {
        let f = f2();
        let g = GabidulinCode::new(&f, 4, 2).unwrap();
        assert_eq!(g.dim(), 12);
        assert_eq!(g.size(), 4096);
        assert!(g.codeword(0).unwrap().is_zero());
        let report = verify_mrd(
            &g,
            VerifyMode::Sampled {
                pairs: 2000,
                seed: 7,
            },
        )
        .unwrap();
        assert!(report.ok(), "violation: {:?}", report.violation);
    }

    #[test]
    fn gabidulin_distinct_indices_distinct_words() {
        let f = f2();
        let g = GabidulinCode::new(&f, 4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let i = rng.gen_range(0..g.size());
            let j = rng.gen_range(0..g.size());
            if i == j {
                continue;
            }
            assert_ne!(g.codeword(i).unwrap(), g.codeword(j).unwrap());
        }
    }

    #[test]
    fn gabidulin_linearity_via_index_digits() {
        // index digits add coordinate-wise over F_2: XOR of indices
        let f = f2();
        let g = GabidulinCode::new(&f, 4, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let i = rng.gen_range(0..4096u128);
            let j = rng.gen_range(0..4096u128);
            let a = g.codeword(i).unwrap();
            let b = g.codeword(j).unwrap();
            let c = g.codeword(i ^ j).unwrap();
            assert_eq!(a.add(&b), c);
        }
    }

    #[test]
    fn lift_is_field_isomorphism_on_f4() {
        let f = f2();
        let d2 = CompanionCode::new(&f, 2).unwrap();
        let ext = FieldCtx::with_modulus(2, 2, d2.polynomial()).unwrap();
        // all 16 sums and 16 products
        for a in ext.elements() {
            for b in ext.elements() {
                let la = lift_element(a, &ext, &d2).unwrap();
                let lb = lift_element(b, &ext, &d2).unwrap();
                let sum = lift_element(ext.add(a, b), &ext, &d2).unwrap();
                let prod = lift_element(ext.mul(a, b), &ext, &d2).unwrap();
                assert_eq!(la.add(&lb), sum);
                assert_eq!(la.mul(&lb), prod);
            }
        }
        // alpha * alpha^2 = alpha^3 = 1 -> C * C^2 = I
        let alpha = ext.x_element();
        let c = lift_element(alpha, &ext, &d2).unwrap();
        assert_eq!(c.mul(&c.pow(2)), Matrix::identity(&f, 2));
    }

    #[test]
    fn lift_is_field_isomorphism_on_f9() {
        let f3 = FieldCtx::prime(3).unwrap();
        let code = CompanionCode::new(&f3, 2).unwrap();
        let ext = FieldCtx::with_modulus(3, 2, code.polynomial()).unwrap();
        for a in ext.elements() {
            for b in ext.elements() {
                let la = lift_element(a, &ext, &code).unwrap();
                let lb = lift_element(b, &ext, &code).unwrap();
                assert_eq!(la.add(&lb), lift_element(ext.add(a, b), &ext, &code).unwrap());
                assert_eq!(la.mul(&lb), lift_element(ext.mul(a, b), &ext, &code).unwrap());
            }
        }
    }

    #[test]
    fn lift_rejects_wrong_modulus() {
        let f = f2();
        let d2 = CompanionCode::new(&f, 2).unwrap();
        let wrong = FieldCtx::new(2, 3).unwrap();
        assert!(lift_element(FieldElement(1), &wrong, &d2).is_err());
    }

    #[test]
    fn block_vandermonde_small_cases() {
        let f = f2();
        let d1 = CompanionCode::new(&f, 1).unwrap();
        let words: Vec<Matrix> = d1.iter().collect();
        let m = block_vandermonde(&words).unwrap();
        assert_eq!(m, Matrix::from_rows(&f, &[vec![1, 0], vec![1, 1]]).unwrap());
        assert_eq!(m.rank(), 2);

        let single = block_vandermonde(&words[..1]).unwrap();
        assert_eq!(single, Matrix::identity(&f, 1));

        assert!(matches!(
            block_vandermonde(&[words[0].clone(), words[0].clone()]),
            Err(RankMetricError::DuplicateCodeword)
        ));
    }

    #[test]
    fn consecutive_blocks_on_d2_triples() {
        let f = f2();
        let d2 = CompanionCode::new(&f, 2).unwrap();
        let words: Vec<Matrix> = d2.iter().collect();
        // every ordered selection of 3 distinct codewords stacks to full rank
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    if a == b || a == c || b == c {
                        continue;
                    }
                    let m = block_vandermonde(&[
                        words[a].clone(),
                        words[b].clone(),
                        words[c].clone(),
                    ])
                    .unwrap();
                    assert_eq!(m.rank(), 6);
                    // the all-windows property needs nonzero codewords
                    if a > 0 && b > 0 && c > 0 {
                        assert!(check_consecutive_blocks(&m, 2));
                    }
                }
            }
        }
    }

    #[test]
    fn zero_codeword_breaks_offset_windows() {
        // The block row of the zero codeword is (I, 0, 0, ...): a window that
        // skips the first block column sees a zero band and drops rank. Only
        // selections of nonzero codewords satisfy the all-windows property.
        let f = f2();
        let d2 = CompanionCode::new(&f, 2).unwrap();
        let zero = d2.codeword(0).unwrap();
        let one = d2.codeword(1).unwrap();
        let c = d2.codeword(2).unwrap();
        let m = block_vandermonde(&[zero, one, c]).unwrap();
        assert_eq!(m.rank(), 6); // full matrix is still invertible
        assert!(!check_consecutive_blocks(&m, 2));
    }

    #[test]
    fn consecutive_blocks_rejects_repeated_block_row() {
        let f = f2();
        // the 2x2-block matrix (I I / I I) fails at window size 2
        let id = Matrix::identity(&f, 1);
        let row = Matrix::hstack(&[&id, &id]);
        let m = Matrix::vstack(&[&row, &row]);
        assert!(!check_consecutive_blocks(&m, 1));
    }
}
