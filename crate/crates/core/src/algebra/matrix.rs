//! Dense matrices over a finite field.
//!
//! Row-major storage; every matrix carries a shared handle to its field.
//! All operations are pure: they return new matrices and never mutate
//! their inputs.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::field::{FieldCtx, FieldElement, FieldJson};
use super::AlgebraError;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Arc<FieldCtx>,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  [{}]", row.join(" "))?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: &Arc<FieldCtx>, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: Arc::clone(field),
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Arc<FieldCtx>, n: usize) -> Matrix {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Builds a matrix from raw encodings, row-major.
    pub fn from_encodings(
        field: &Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        entries: &[u64],
    ) -> Result<Matrix, AlgebraError> {
        if entries.len() != rows * cols {
            return Err(AlgebraError::ShapeMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let mut data = Vec::with_capacity(entries.len());
        for &e in entries {
            data.push(field.element(e)?);
        }
        Ok(Matrix {
            field: Arc::clone(field),
            rows,
            cols,
            data,
        })
    }

    pub fn from_rows(field: &Arc<FieldCtx>, rows: &[Vec<u64>]) -> Result<Matrix, AlgebraError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let flat: Vec<u64> = rows.iter().flatten().copied().collect();
        if flat.len() != r * c {
            return Err(AlgebraError::ShapeMismatch("ragged rows".into()));
        }
        Self::from_encodings(field, r, c, &flat)
    }

    pub fn from_fn(
        field: &Arc<FieldCtx>,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> FieldElement,
    ) -> Matrix {
        let mut m = Self::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        assert!(i < self.rows);
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn assert_same_field(&self, other: &Matrix) {
        assert!(
            self.field.same_field(&other.field),
            "operands belong to different fields"
        );
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.assert_same_field(other);
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch in add: {}x{} vs {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.assert_same_field(other);
        assert!(
            self.rows == other.rows && self.cols == other.cols,
            "shape mismatch in sub"
        );
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(&a, &b)| self.field.sub(a, b))
            .collect();
        Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn neg(&self) -> Matrix {
        let data = self.data.iter().map(|&a| self.field.neg(a)).collect();
        Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: FieldElement) -> Matrix {
        let data = self.data.iter().map(|&a| self.field.mul(a, c)).collect();
        Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.assert_same_field(other);
        assert!(
            self.cols == other.rows,
            "shape mismatch in mul: {}x{} * {}x{}",
            self.rows,
            self.cols,
            other.rows,
            other.cols
        );
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.get(i, j);
                    out.set(i, j, f.add(cur, f.mul(a, other.get(k, j))));
                }
            }
        }
        out
    }

    /// Matrix-vector product; `v` has length `cols`.
    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        let f = &self.field;
        (0..self.rows)
            .map(|i| {
                let mut acc = FieldElement::ZERO;
                for j in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, j), v[j]));
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(&self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self^e` for square matrices; `e = 0` yields the identity.
    pub fn pow(&self, e: u64) -> Matrix {
        assert!(self.is_square(), "pow requires a square matrix");
        let mut acc = Matrix::identity(&self.field, self.rows);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn vstack(parts: &[&Matrix]) -> Matrix {
        assert!(!parts.is_empty(), "vstack of nothing");
        let cols = parts[0].cols;
        let field = Arc::clone(&parts[0].field);
        let mut data = Vec::new();
        let mut rows = 0;
        for p in parts {
            assert!(p.cols == cols, "vstack column mismatch");
            assert!(p.field.same_field(&field), "vstack field mismatch");
            data.extend_from_slice(&p.data);
            rows += p.rows;
        }
        Matrix {
            field,
            rows,
            cols,
            data,
        }
    }

    pub fn hstack(parts: &[&Matrix]) -> Matrix {
        assert!(!parts.is_empty(), "hstack of nothing");
        let rows = parts[0].rows;
        let field = Arc::clone(&parts[0].field);
        let cols: usize = parts.iter().map(|p| p.cols).sum();
        let mut out = Matrix::zeros(&field, rows, cols);
        let mut off = 0;
        for p in parts {
            assert!(p.rows == rows, "hstack row mismatch");
            assert!(p.field.same_field(&field), "hstack field mismatch");
            for i in 0..rows {
                for j in 0..p.cols {
                    out.set(i, off + j, p.get(i, j));
                }
            }
            off += p.cols;
        }
        out
    }

    /// Copies the rectangle `[r0, r1) x [c0, c1)`.
    pub fn submatrix(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        assert!(r0 <= r1 && r1 <= self.rows && c0 <= c1 && c1 <= self.cols);
        Matrix::from_fn(&self.field, r1 - r0, c1 - c0, |i, j| {
            self.get(r0 + i, c0 + j)
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let t = self.get(a, j);
            self.set(a, j, self.get(b, j));
            self.set(b, j, t);
        }
    }

    /// Rank by forward Gaussian elimination.
    pub fn rank(&self) -> usize {
        let f = Arc::clone(&self.field);
        let mut w = self.clone();
        let mut rank = 0;
        for col in 0..w.cols {
            if rank == w.rows {
                break;
            }
            let pivot = (rank..w.rows).find(|&i| !w.get(i, col).is_zero());
            let Some(pivot) = pivot else { continue };
            w.swap_rows(rank, pivot);
            let inv = f.inv(w.get(rank, col)).expect("pivot is nonzero");
            for i in rank + 1..w.rows {
                let factor = w.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                let scale = f.mul(factor, inv);
                for j in col..w.cols {
                    let v = f.sub(w.get(i, j), f.mul(scale, w.get(rank, j)));
                    w.set(i, j, v);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Reduced row echelon form and the (strictly increasing) pivot columns.
    /// The RREF is the unique canonical representative of the row space.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let f = Arc::clone(&self.field);
        let mut w = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..w.cols {
            if row == w.rows {
                break;
            }
            let pivot = (row..w.rows).find(|&i| !w.get(i, col).is_zero());
            let Some(pivot) = pivot else { continue };
            w.swap_rows(row, pivot);
            let inv = f.inv(w.get(row, col)).expect("pivot is nonzero");
            for j in col..w.cols {
                w.set(row, j, f.mul(w.get(row, j), inv));
            }
            for i in 0..w.rows {
                if i == row {
                    continue;
                }
                let factor = w.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                for j in col..w.cols {
                    let v = f.sub(w.get(i, j), f.mul(factor, w.get(row, j)));
                    w.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (w, pivots)
    }

    /// Solves `A x = b` for square invertible `A`; `b` may have several
    /// columns.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::ShapeMismatch(format!(
                "solve requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        if b.rows != self.rows {
            return Err(AlgebraError::ShapeMismatch(format!(
                "rhs has {} rows, expected {}",
                b.rows, self.rows
            )));
        }
        let x = self.solve_full_rank(b)?;
        Ok(x)
    }

    /// Solves a consistent, full-column-rank (possibly overdetermined)
    /// system `A x = b`; errors when `A` is rank-deficient or the system is
    /// inconsistent.
    pub fn solve_full_rank(&self, b: &Matrix) -> Result<Matrix, AlgebraError> {
        self.assert_same_field(b);
        if b.rows != self.rows {
            return Err(AlgebraError::ShapeMismatch(format!(
                "rhs has {} rows, expected {}",
                b.rows, self.rows
            )));
        }
        let aug = Matrix::hstack(&[self, b]);
        let (r, pivots) = aug.rref();
        // every pivot in the coefficient block, and all of them present
        if pivots.iter().any(|&c| c >= self.cols) {
            return Err(AlgebraError::Inconsistent);
        }
        if pivots.len() < self.cols {
            return Err(AlgebraError::Singular);
        }
        Ok(r.submatrix(0, self.cols, self.cols, self.cols + b.cols))
    }

    /// Finds `W` with `W * basis = targets`, free coordinates set to zero;
    /// `None` when some target row is outside the row space of `basis`.
    pub fn express_in_rowspace(basis: &Matrix, targets: &Matrix) -> Option<Matrix> {
        basis.assert_same_field(targets);
        assert!(
            basis.cols == targets.cols,
            "ambient dimension mismatch in express_in_rowspace"
        );
        let bt = basis.transpose();
        let tt = targets.transpose();
        let aug = Matrix::hstack(&[&bt, &tt]);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= bt.cols) {
            return None;
        }
        let f = basis.field();
        let mut w = Matrix::zeros(f, targets.rows, basis.rows);
        for (row, &var) in pivots.iter().enumerate() {
            for t in 0..targets.rows {
                w.set(t, var, r.get(row, bt.cols + t));
            }
        }
        Some(w)
    }

    /// Deterministic rank completion: returns `k` rows that, stacked under
    /// `self`, reach rank `min(rank + k, cols)`. Errors when even `k` extra
    /// rows cannot reach full column rank `cols`.
    ///
    /// The rows are standard-basis vectors for the non-pivot columns of the
    /// RREF of `self`, lowest column first, padded with zero rows once full
    /// rank is reached.
    pub fn complete_to_full_rank(&self, k: usize) -> Result<Matrix, AlgebraError> {
        let (_, pivots) = self.rref();
        let rank = pivots.len();
        if rank + k < self.cols {
            return Err(AlgebraError::CompletionImpossible {
                rank,
                extra: k,
                target: self.cols,
            });
        }
        let mut out = Matrix::zeros(&self.field, k, self.cols);
        let mut row = 0;
        let mut piv = pivots.iter().peekable();
        for col in 0..self.cols {
            if piv.peek() == Some(&&col) {
                piv.next();
                continue;
            }
            if row == k {
                break;
            }
            out.set(row, col, FieldElement::ONE);
            row += 1;
        }
        Ok(out)
    }

    /// Splits the matrix into `t`-row bands; band `i` is rows `[i*t, (i+1)*t)`.
    pub fn row_band(&self, i: usize, t: usize) -> Matrix {
        self.submatrix(i * t, (i + 1) * t, 0, self.cols)
    }

    /// Deterministic basis of the right null space `{v : self * v = 0}`,
    /// one row per free column of the RREF, returned as a
    /// `(cols - rank) x cols` matrix.
    pub fn null_space_basis(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let f = self.field();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (row, &fc) in free.iter().enumerate() {
            out.set(row, fc, FieldElement::ONE);
            for (i, &pc) in pivots.iter().enumerate() {
                out.set(row, pc, f.neg(r.get(i, fc)));
            }
        }
        out
    }
}

/// JSON shape for matrices: field parameters inline so a file is
/// self-describing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    #[serde(flatten)]
    pub field: FieldJson,
    pub entries: Vec<u64>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            field: FieldJson::from(m.field().as_ref()),
            entries: m.entries().iter().map(|e| e.0).collect(),
        }
    }
}

impl MatrixJson {
    pub fn build(&self) -> Result<Matrix, AlgebraError> {
        let field = self.field.build()?;
        Matrix::from_encodings(&field, self.rows, self.cols, &self.entries)
    }

    /// Rebuilds against an existing context when the parameters match,
    /// avoiding one context construction per matrix.
    pub fn build_in(&self, field: &Arc<FieldCtx>) -> Result<Matrix, AlgebraError> {
        if field.p() == self.field.p
            && field.m() == self.field.m
            && field.modulus() == self.field.modulus.as_slice()
        {
            Matrix::from_encodings(field, self.rows, self.cols, &self.entries)
        } else {
            self.build()
        }
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = MatrixJson::deserialize(d)?;
        repr.build().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> Arc<FieldCtx> {
        FieldCtx::prime(2).unwrap()
    }

    #[test]
    fn rank_of_identity_and_zero() {
        let f = f2();
        assert_eq!(Matrix::identity(&f, 4).rank(), 4);
        assert_eq!(Matrix::zeros(&f, 3, 5).rank(), 0);
    }

    #[test]
    fn rref_identity_and_duplicate_rows() {
        let f = f2();
        let id = Matrix::identity(&f, 3);
        let (r, pivots) = id.rref();
        assert_eq!(r, id);
        assert_eq!(pivots, vec![0, 1, 2]);

        let m = Matrix::from_rows(&f, &[vec![1, 1], vec![1, 1]]).unwrap();
        let (r, pivots) = m.rref();
        assert_eq!(r, Matrix::from_rows(&f, &[vec![1, 1], vec![0, 0]]).unwrap());
        assert_eq!(pivots, vec![0]);
    }

    #[test]
    fn rref_of_invertible_is_identity() {
        let f = FieldCtx::new(2, 2).unwrap();
        let m = Matrix::from_rows(&f, &[vec![2, 1], vec![1, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        let (r, _) = m.rref();
        assert_eq!(r, Matrix::identity(&f, 2));
    }

    #[test]
    fn solve_hand_checked_system() {
        // A = [[1,1],[0,1]], b = (1,1)^T over F_2 -> x = (0,1)^T
        let f = f2();
        let a = Matrix::from_rows(&f, &[vec![1, 1], vec![0, 1]]).unwrap();
        let b = Matrix::from_rows(&f, &[vec![1], vec![1]]).unwrap();
        let x = a.solve(&b).unwrap();
        assert_eq!(x, Matrix::from_rows(&f, &[vec![0], vec![1]]).unwrap());
    }

    #[test]
    fn solve_singular_is_an_error() {
        let f = f2();
        let a = Matrix::from_rows(&f, &[vec![1, 1], vec![1, 1]]).unwrap();
        let b = Matrix::from_rows(&f, &[vec![1], vec![0]]).unwrap();
        assert!(a.solve(&b).is_err());
    }

    #[test]
    fn completion_of_partial_identity() {
        let f = f2();
        let m = Matrix::from_rows(&f, &[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let c = m.complete_to_full_rank(2).unwrap();
        assert_eq!(
            c,
            Matrix::from_rows(&f, &[vec![0, 0, 1, 0], vec![0, 0, 0, 1]]).unwrap()
        );
        assert_eq!(Matrix::vstack(&[&m, &c]).rank(), 4);

        let id = Matrix::identity(&f, 3);
        let empty = id.complete_to_full_rank(0).unwrap();
        assert_eq!(empty.rows(), 0);

        // impossible: rank 1 + 1 extra row < 3 columns
        let thin = Matrix::from_rows(&f, &[vec![1, 0, 0]]).unwrap();
        assert!(thin.complete_to_full_rank(1).is_err());
    }

    #[test]
    fn express_rows_in_rowspace() {
        let f = f2();
        let basis = Matrix::from_rows(&f, &[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let target = Matrix::from_rows(&f, &[vec![1, 1, 0]]).unwrap();
        let w = Matrix::express_in_rowspace(&basis, &target).unwrap();
        assert_eq!(w.mul(&basis), target);

        let outside = Matrix::from_rows(&f, &[vec![0, 0, 1]]).unwrap();
        assert!(Matrix::express_in_rowspace(&basis, &outside).is_none());
    }

    #[test]
    fn matrix_json_roundtrip() {
        let f = FieldCtx::new(2, 2).unwrap();
        let m = Matrix::from_rows(&f, &[vec![0, 1, 2], vec![3, 2, 1]]).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        let back: Matrix = serde_json::from_str(&json).unwrap();
        assert_eq!(m, back);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["q"], 4);
        assert_eq!(v["modulus"], serde_json::json!([1, 1, 1]));
    }
}
