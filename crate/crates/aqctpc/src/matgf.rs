//! Dense matrices over a [`Field`].
//!
//! Entries are stored row-major as field-element encodings. Rank, RREF and
//! products over GF(2) switch to bit-packed rows internally.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::galois::Field;

/// Linear-algebra errors.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrices live over different fields")]
    FieldMismatch,
    #[error("matrix is singular (rank {rank})")]
    Singular { rank: usize },
    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("outer field is not a degree-{expected} extension of the inner field")]
    DegreeMismatch { expected: usize },
    #[error("entry {0} is not a field element")]
    BadEntry(u32),
}

/// A dense matrix over a finite field.
#[derive(Clone)]
pub struct Matrix {
    field: Arc<Field>,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

impl Eq for Matrix {}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:?} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of [`Matrix::rref`].
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Result of [`Matrix::standard_form`].
///
/// Column `j` of `matrix` is column `perm[j]` of the input's row space.
#[derive(Debug, Clone)]
pub struct StandardForm {
    pub matrix: Matrix,
    pub perm: Vec<usize>,
}

struct BitRows {
    words: usize,
    bits: Vec<u64>,
}

impl BitRows {
    fn from_matrix(m: &Matrix) -> BitRows {
        let words = m.cols.div_ceil(64).max(1);
        let mut bits = vec![0u64; words * m.rows];
        for r in 0..m.rows {
            for (c, &v) in m.row(r).iter().enumerate() {
                if v != 0 {
                    bits[r * words + c / 64] |= 1 << (c % 64);
                }
            }
        }
        BitRows { words, bits }
    }

    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    fn xor_into(&mut self, dst: usize, src: usize) {
        let w = self.words;
        let (a, b) = if dst < src {
            let (lo, hi) = self.bits.split_at_mut(src * w);
            (&mut lo[dst * w..dst * w + w], &hi[..w])
        } else {
            let (lo, hi) = self.bits.split_at_mut(dst * w);
            (&mut hi[..w], &lo[src * w..src * w + w])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.words {
            self.bits.swap(a * self.words + i, b * self.words + i);
        }
    }

    fn to_matrix(&self, field: &Arc<Field>, rows: usize, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if self.get(r, c) {
                    m.set(r, c, 1);
                }
            }
        }
        m
    }
}

impl Matrix {
    pub fn zeros(field: &Arc<Field>, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: Arc::clone(field),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &Arc<Field>, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from row vectors, checking entries and lengths.
    pub fn from_rows(field: &Arc<Field>, rows: &[Vec<u32>]) -> Result<Matrix, MatError> {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_data(field, rows.len(), cols, rows.iter().flatten().copied().collect()).and_then(|m| {
            if rows.iter().any(|r| r.len() != cols) {
                Err(MatError::Dimension("ragged rows".into()))
            } else {
                Ok(m)
            }
        })
    }

    /// Builds a matrix from row-major data.
    pub fn from_data(field: &Arc<Field>, rows: usize, cols: usize, data: Vec<u32>) -> Result<Matrix, MatError> {
        if data.len() != rows * cols {
            return Err(MatError::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(&bad) = data.iter().find(|&&v| v >= field.order()) {
            return Err(MatError::BadEntry(bad));
        }
        Ok(Matrix {
            field: Arc::clone(field),
            rows,
            cols,
            data,
        })
    }

    /// Parses rows written as digit strings, e.g. `["101", "011"]`.
    pub fn from_digit_rows(field: &Arc<Field>, rows: &[&str]) -> Result<Matrix, MatError> {
        let parsed: Vec<Vec<u32>> = rows
            .iter()
            .map(|r| {
                r.chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| c.to_digit(36).ok_or(MatError::BadEntry(u32::MAX)))
                    .collect()
            })
            .collect::<Result<_, _>>()?;
        Self::from_rows(field, &parsed)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [u32] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    fn same_field(&self, other: &Matrix) -> Result<(), MatError> {
        if self.field != other.field {
            return Err(MatError::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatError> {
        self.same_field(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(MatError::Dimension("add of different shapes".into()));
        }
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { data, ..self.clone() })
    }

    /// Multiplies every entry by `s`.
    pub fn scale(&self, s: u32) -> Matrix {
        let f = &self.field;
        let data = self.data.iter().map(|&a| f.mul(a, s)).collect();
        Matrix { data, ..self.clone() }
    }

    /// `self · other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatError> {
        if self.cols != other.rows {
            return Err(MatError::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        self.mul_transpose(&other.transpose())
    }

    /// `self · other^T`.
    pub fn mul_transpose(&self, other: &Matrix) -> Result<Matrix, MatError> {
        self.same_field(other)?;
        if self.cols != other.cols {
            return Err(MatError::Dimension(format!(
                "{}x{} times ({}x{})^T",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(&self.field, self.rows, other.rows);
        if self.field.is_binary() {
            let (a, b) = (BitRows::from_matrix(self), BitRows::from_matrix(other));
            for i in 0..self.rows {
                let ra = a.row(i);
                for j in 0..other.rows {
                    let ones: u32 = ra.iter().zip(b.row(j)).map(|(x, y)| (x & y).count_ones()).sum();
                    out.set(i, j, ones & 1);
                }
            }
            return Ok(out);
        }
        let f = &self.field;
        for i in 0..self.rows {
            for j in 0..other.rows {
                let v = self
                    .row(i)
                    .iter()
                    .zip(other.row(j))
                    .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Row vector times matrix, `v · self`.
    pub fn vec_mul(&self, v: &[u32]) -> Result<Vec<u32>, MatError> {
        if v.len() != self.rows {
            return Err(MatError::Dimension(format!(
                "vector of length {} times {} rows",
                v.len(),
                self.rows
            )));
        }
        let f = &self.field;
        let mut out = vec![0; self.cols];
        for (r, &x) in v.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(r)) {
                *o = f.add(*o, f.mul(x, m));
            }
        }
        Ok(out)
    }

    /// Matrix times column vector, `self · v^T`.
    pub fn mul_vec(&self, v: &[u32]) -> Result<Vec<u32>, MatError> {
        if v.len() != self.cols {
            return Err(MatError::Dimension(format!(
                "{} columns times vector of length {}",
                self.cols,
                v.len()
            )));
        }
        let f = &self.field;
        Ok((0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| if b == 0 { acc } else { f.add(acc, f.mul(a, b)) })
            })
            .collect())
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> Rref {
        if self.field.is_binary() {
            return self.rref_binary();
        }
        let f = Arc::clone(&self.field);
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = f.inv(m.get(r, c));
            for v in m.row_mut(r) {
                *v = f.mul(*v, inv);
            }
            let pivot_row = m.row(r).to_vec();
            for i in 0..self.rows {
                let factor = m.get(i, c);
                if i == r || factor == 0 {
                    continue;
                }
                let neg = f.neg(factor);
                for (v, &pv) in m.row_mut(i).iter_mut().zip(&pivot_row) {
                    if pv != 0 {
                        *v = f.add(*v, f.mul(neg, pv));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: m,
            rank: r,
            pivots,
        }
    }

    fn rref_binary(&self) -> Rref {
        let mut b = BitRows::from_matrix(self);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| b.get(i, c)) else {
                continue;
            };
            b.swap(r, p);
            for i in 0..self.rows {
                if i != r && b.get(i, c) {
                    b.xor_into(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref {
            matrix: b.to_matrix(&self.field, self.rows, self.cols),
            rank: r,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        if self.field.is_binary() {
            let mut b = BitRows::from_matrix(self);
            let mut r = 0;
            for c in 0..self.cols {
                if r == self.rows {
                    break;
                }
                let Some(p) = (r..self.rows).find(|&i| b.get(i, c)) else {
                    continue;
                };
                b.swap(r, p);
                for i in r + 1..self.rows {
                    if b.get(i, c) {
                        b.xor_into(i, r);
                    }
                }
                r += 1;
            }
            return r;
        }
        self.rref().rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Basis of the right null space `{v : self · v^T = 0}`, one vector per row.
    pub fn kernel(&self) -> Matrix {
        let Rref { matrix, rank, pivots } = self.rref();
        let f = &self.field;
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = Matrix::zeros(f, free.len(), self.cols);
        for (k, &fc) in free.iter().enumerate() {
            out.set(k, fc, 1);
            for (i, &pc) in pivots.iter().enumerate().take(rank) {
                out.set(k, pc, f.neg(matrix.get(i, fc)));
            }
        }
        out
    }

    /// Brings a full-rank generator to `(I_k | A)` by a column permutation.
    pub fn standard_form(&self) -> Result<StandardForm, MatError> {
        let Rref { matrix, rank, pivots } = self.rref();
        if rank != self.rows {
            return Err(MatError::RankDeficient {
                rank,
                expected: self.rows,
            });
        }
        let mut perm = pivots.clone();
        perm.extend((0..self.cols).filter(|c| !pivots.contains(c)));
        Ok(StandardForm {
            matrix: matrix.select_cols(&perm),
            perm,
        })
    }

    /// Solves `self · x^T = b^T` for square nonsingular `self`.
    pub fn solve(&self, b: &[u32]) -> Result<Vec<u32>, MatError> {
        if self.rows != self.cols || b.len() != self.rows {
            return Err(MatError::Dimension("solve needs a square system".into()));
        }
        let inv = self.invert()?;
        inv.mul_vec(b)
    }

    pub fn invert(&self) -> Result<Matrix, MatError> {
        if self.rows != self.cols {
            return Err(MatError::Dimension("only square matrices are invertible".into()));
        }
        let n = self.rows;
        let aug = self.hstack(&Matrix::identity(&self.field, n))?;
        let Rref { matrix, pivots, .. } = aug.rref();
        let rank = pivots.iter().take_while(|&&p| p < n).count();
        if rank < n {
            return Err(MatError::Singular { rank });
        }
        Ok(matrix.select_cols(&(n..2 * n).collect::<Vec<_>>()))
    }

    /// Solves `self · x^T = b^T` for a possibly non-square system; returns any solution.
    pub fn solve_any(&self, b: &[u32]) -> Option<Vec<u32>> {
        if b.len() != self.rows {
            return None;
        }
        let bcol = Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows,
            cols: 1,
            data: b.to_vec(),
        };
        let Rref { matrix, rank, pivots } = self.hstack(&bcol).ok()?.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0; self.cols];
        for i in 0..rank {
            x[pivots[i]] = matrix.get(i, self.cols);
        }
        Some(x)
    }

    pub fn hstack(&self, other: &Matrix) -> Result<Matrix, MatError> {
        self.same_field(other)?;
        if self.rows != other.rows {
            return Err(MatError::Dimension("hstack of different heights".into()));
        }
        let mut out = Matrix::zeros(&self.field, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            out.row_mut(r)[..self.cols].copy_from_slice(self.row(r));
            out.row_mut(r)[self.cols..].copy_from_slice(other.row(r));
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Matrix) -> Result<Matrix, MatError> {
        self.same_field(other)?;
        if self.cols != other.cols && self.rows > 0 && other.rows > 0 {
            return Err(MatError::Dimension("vstack of different widths".into()));
        }
        let cols = if self.rows > 0 { self.cols } else { other.cols };
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(Matrix {
            field: Arc::clone(&self.field),
            rows: self.rows + other.rows,
            cols,
            data,
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.field, idx.len(), self.cols);
        for (k, &r) in idx.iter().enumerate() {
            out.row_mut(k).copy_from_slice(self.row(r));
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.rows, idx.len());
        for r in 0..self.rows {
            for (k, &c) in idx.iter().enumerate() {
                out.set(r, k, self.get(r, c));
            }
        }
        out
    }

    /// True when `v` lies in the row space.
    pub fn row_space_contains(&self, v: &[u32]) -> bool {
        self.transpose().solve_any(v).is_some()
    }

    /// True when both matrices have the same row space.
    pub fn same_row_space(&self, other: &Matrix) -> bool {
        if self.field != other.field || self.cols != other.cols {
            return false;
        }
        let ra = self.rref();
        let rb = other.rref();
        ra.rank == rb.rank
            && ra.matrix.select_rows(&(0..ra.rank).collect::<Vec<_>>())
                == rb.matrix.select_rows(&(0..rb.rank).collect::<Vec<_>>())
    }

    /// Block-diagonal `I_n ⊗ self`.
    pub fn kron_identity(&self, n: usize) -> Matrix {
        let mut out = Matrix::zeros(&self.field, n * self.rows, n * self.cols);
        for b in 0..n {
            for r in 0..self.rows {
                let dst = &mut out.row_mut(b * self.rows + r)[b * self.cols..(b + 1) * self.cols];
                dst.copy_from_slice(self.row(r));
            }
        }
        out
    }

    /// Companion-expanded Kronecker product.
    ///
    /// Each entry `a_ij` of `outer` (over a degree-m extension) becomes the
    /// block `[a_ij] · inner`, or `[a_ij]^T · inner` when `transpose_blocks`
    /// is set. `inner` must have m rows.
    pub fn kron_companion(outer: &Matrix, inner: &Matrix, transpose_blocks: bool) -> Result<Matrix, MatError> {
        let ext = &outer.field;
        let m = ext.degree() as usize;
        let base_ok = match ext.base() {
            Some(b) => **b == *inner.field,
            None => **ext == *inner.field,
        };
        if !base_ok || inner.rows != m {
            return Err(MatError::DegreeMismatch { expected: inner.rows });
        }
        let (br, bc) = (m, inner.cols);
        let mut out = Matrix::zeros(&inner.field, outer.rows * br, outer.cols * bc);
        let mut cache: Vec<Option<Matrix>> = vec![None; ext.order() as usize];
        for i in 0..outer.rows {
            for j in 0..outer.cols {
                let a = outer.get(i, j);
                if a == 0 {
                    continue;
                }
                let block = cache[a as usize].get_or_insert_with(|| {
                    let c = ext.companion(a);
                    let c = if transpose_blocks { c.transpose() } else { c };
                    c.mul(inner).expect("block shapes agree")
                });
                for r in 0..br {
                    out.row_mut(i * br + r)[j * bc..(j + 1) * bc].copy_from_slice(block.row(r));
                }
            }
        }
        Ok(out)
    }

    /// Applies a column permutation: output column `perm[j]` is input column `j`.
    pub fn unpermute_cols(&self, perm: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.rows, self.cols);
        for r in 0..self.rows {
            for (j, &p) in perm.iter().enumerate() {
                out.set(r, p, self.get(r, j));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf2() -> Arc<Field> {
        Field::prime(2).unwrap()
    }

    fn gf4() -> Arc<Field> {
        Field::extension(&gf2(), 2, Some(&[1, 1, 1])).unwrap()
    }

    #[test]
    fn rref_trivial() {
        let f = gf2();
        let i = Matrix::identity(&f, 3);
        let r = i.rref();
        assert_eq!(r.matrix, i);
        assert_eq!(r.rank, 3);
        let z = Matrix::zeros(&f, 2, 4);
        assert_eq!(z.rref().rank, 0);
        assert_eq!(z.kernel().rows(), 4);
        assert_eq!(i.kernel().rows(), 0);
    }

    #[test]
    fn solve_and_invert() {
        let f = gf2();
        let a = Matrix::from_digit_rows(&f, &["11", "01"]).unwrap();
        assert_eq!(a.solve(&[1, 0]).unwrap(), vec![1, 0]);
        let s = Matrix::from_digit_rows(&f, &["11", "11"]).unwrap();
        assert_eq!(s.invert().unwrap_err(), MatError::Singular { rank: 1 });
        let i = Matrix::identity(&f, 4);
        assert_eq!(i.solve(&[1, 0, 1, 1]).unwrap(), vec![1, 0, 1, 1]);
    }

    #[test]
    fn standard_form_examples() {
        let f = gf2();
        let g = Matrix::from_digit_rows(&f, &["10110", "01011"]).unwrap();
        let sf = g.standard_form().unwrap();
        assert_eq!(sf.matrix, g);
        assert_eq!(sf.perm, vec![0, 1, 2, 3, 4]);
        let rep = Matrix::from_digit_rows(&f, &["111"]).unwrap();
        assert_eq!(rep.standard_form().unwrap().perm, vec![0, 1, 2]);
        let swapped = Matrix::from_digit_rows(&f, &["0110", "0011"]).unwrap();
        let sf = swapped.standard_form().unwrap();
        assert_eq!(sf.perm, vec![1, 2, 0, 3]);
        assert!(sf.matrix.unpermute_cols(&sf.perm).same_row_space(&swapped));
        let deficient = Matrix::from_digit_rows(&f, &["11", "11"]).unwrap();
        assert!(matches!(deficient.standard_form(), Err(MatError::RankDeficient { .. })));
    }

    #[test]
    fn kron_companion_basics() {
        let f4 = gf4();
        let f2 = gf2();
        let one = Matrix::from_rows(&f4, &[vec![1]]).unwrap();
        let i2 = Matrix::identity(&f2, 2);
        assert_eq!(Matrix::kron_companion(&one, &i2, false).unwrap(), i2);
        let w = Matrix::from_rows(&f4, &[vec![f4.alpha()]]).unwrap();
        let t = Matrix::kron_companion(&w, &i2, true).unwrap();
        assert_eq!(t, f4.companion(f4.alpha()).transpose());
        let wrong = Matrix::identity(&f2, 3);
        assert!(Matrix::kron_companion(&w, &wrong, false).is_err());
    }

    #[test]
    fn kron_companion_blocks_exhaustive() {
        let f4 = gf4();
        let f2 = gf2();
        let inner = Matrix::from_digit_rows(&f2, &["101", "011"]).unwrap();
        for code in 0..256u32 {
            let entries: Vec<u32> = (0..4).map(|i| code >> (2 * i) & 3).collect();
            let outer = Matrix::from_data(&f4, 2, 2, entries.clone()).unwrap();
            for tr in [false, true] {
                let k = Matrix::kron_companion(&outer, &inner, tr).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        let c = f4.companion(entries[i * 2 + j]);
                        let c = if tr { c.transpose() } else { c };
                        let expect = c.mul(&inner).unwrap();
                        let block = k
                            .select_rows(&[2 * i, 2 * i + 1])
                            .select_cols(&[3 * j, 3 * j + 1, 3 * j + 2]);
                        assert_eq!(block, expect);
                    }
                }
            }
        }
    }

    fn random_matrix(f: &Arc<Field>, r: usize, c: usize, seed: &[u32]) -> Matrix {
        let q = f.order();
        let data = (0..r * c)
            .map(|i| {
                seed[i % seed.len()]
                    .wrapping_mul(2654435761)
                    .wrapping_add(i as u32 * 97)
                    % q
            })
            .collect();
        Matrix::from_data(f, r, c, data).unwrap()
    }

    proptest! {
        #[test]
        fn rank_of_transpose(r in 1usize..8, c in 1usize..8, seed in proptest::collection::vec(0u32..1000, 1..20), m in 1u32..4) {
            let f = Field::binary_extension(m).unwrap();
            let a = random_matrix(&f, r, c, &seed);
            prop_assert_eq!(a.rank(), a.transpose().rank());
        }

        #[test]
        fn kernel_annihilates(r in 1usize..10, c in 1usize..12, seed in proptest::collection::vec(0u32..1000, 1..20), m in 1u32..4) {
            let f = Field::binary_extension(m).unwrap();
            let a = random_matrix(&f, r, c, &seed);
            let k = a.kernel();
            prop_assert!(a.mul_transpose(&k).unwrap().is_zero());
            prop_assert_eq!(a.rank() + k.rows(), c);
            prop_assert_eq!(k.rank(), k.rows());
        }

        #[test]
        fn solve_roundtrip(n in 1usize..64, seed in proptest::collection::vec(0u32..100000, 1..64), m in 1u32..4) {
            let f = Field::binary_extension(m).unwrap();
            let a = random_matrix(&f, n, n, &seed);
            let b: Vec<u32> = (0..n).map(|i| (seed[i % seed.len()] + i as u32) % f.order()).collect();
            match a.solve(&b) {
                Ok(x) => prop_assert_eq!(a.mul_vec(&x).unwrap(), b),
                Err(MatError::Singular { rank }) => prop_assert!(rank < n && rank == a.rank()),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }

        #[test]
        fn standard_form_preserves_row_space(seed in proptest::collection::vec(0u32..2, 18)) {
            let f = gf2();
            let g = Matrix::from_data(&f, 3, 6, seed).unwrap();
            if g.rank() == 3 {
                let sf = g.standard_form().unwrap();
                prop_assert_eq!(sf.matrix.select_cols(&[0, 1, 2]), Matrix::identity(&f, 3));
                prop_assert!(sf.matrix.unpermute_cols(&sf.perm).same_row_space(&g));
            }
        }
    }
}
