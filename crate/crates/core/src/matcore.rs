//! Dense complex matrices with Hermitian and upper-triangular structure.
//!
//! Hermitian and upper-triangular matrices are stored column-packed: entry
//! `(j, k)` with `j <= k` lives at `k (k + 1) / 2 + j`. With that layout the
//! leading principal block of order `m` is a prefix of the storage, so
//! bordering by one row and column is an append.
//!
//! Indices are 0-based throughout the API.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::flops::FlopCounter;

pub type C64 = Complex64;

#[inline]
pub(crate) const fn packed_index(row: usize, col: usize) -> usize {
    col * (col + 1) / 2 + row
}

#[inline]
pub(crate) const fn packed_len(order: usize) -> usize {
    order * (order + 1) / 2
}

/// Dense row-major complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major data, checking shape and finiteness.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidConfig("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [C64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    /// Copy with columns rearranged so that new column `k` is old column `cols[k]`.
    pub fn select_columns(&self, cols: &[usize]) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.rows, cols.len(), |r, k| self[(r, cols[k])])
    }

    /// Copy with rows rearranged so that new row `k` is old row `rows[k]`.
    pub fn select_rows(&self, rows: &[usize]) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows.len(), self.cols, |k, c| self[(rows[k], c)])
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    /// Uncounted dense product, for checks and oracles.
    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    out.data[r * rhs.cols + c] += a * rhs.data[k * rhs.cols + c];
                }
            }
        }
        out
    }

    /// `self * self^H`, uncounted.
    pub fn gram_outer(&self) -> ComplexMatrix {
        self.matmul(&self.adjoint())
    }

    pub fn sub(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `||self - rhs||_F / ||rhs||_F`.
    pub fn relative_distance(&self, rhs: &ComplexMatrix) -> f64 {
        let denom = rhs.frobenius_norm();
        let diff = self.sub(rhs).frobenius_norm();
        if denom == 0.0 {
            diff
        } else {
            diff / denom
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Squared Euclidean norms of the rows, counted as one cmul per entry and
    /// one cadd per accumulation.
    pub fn row_norms_sqr(&self, counter: &mut FlopCounter) -> Vec<f64> {
        counter.mul(self.rows * self.cols);
        counter.add(self.rows * self.cols.saturating_sub(1));
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|z| z.norm_sqr()).sum())
            .collect()
    }

    /// Removes row `from` and appends it as the last row.
    pub fn move_row_to_end(&mut self, from: usize) {
        let cols = self.cols;
        self.data[from * cols..].rotate_left(cols);
    }

    /// Leading `rows x cols` block.
    pub fn leading_block(&self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |r, c| self[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(r) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hermitian matrix holding only its upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    order: usize,
    packed: Vec<C64>,
}

impl HermitianMatrix {
    /// Takes the upper triangle of `dense`. The diagonal's imaginary parts are dropped.
    pub fn from_upper(dense: &ComplexMatrix) -> Result<Self> {
        if dense.rows() != dense.cols() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                dense.rows(),
                dense.cols()
            )));
        }
        let n = dense.rows();
        let mut packed = Vec::with_capacity(packed_len(n));
        for k in 0..n {
            for j in 0..k {
                packed.push(dense[(j, k)]);
            }
            packed.push(C64::new(dense[(k, k)].re, 0.0));
        }
        Ok(Self { order: n, packed })
    }

    /// Builds from a column-packed upper triangle.
    pub fn from_packed(order: usize, packed: Vec<C64>) -> Result<Self> {
        if packed.len() != packed_len(order) {
            return Err(Error::DimensionMismatch(format!(
                "{} packed entries for order {order}",
                packed.len()
            )));
        }
        let mut h = Self { order, packed };
        for k in 0..order {
            let d = &mut h.packed[packed_index(k, k)];
            d.im = 0.0;
        }
        Ok(h)
    }

    pub fn identity(order: usize) -> Self {
        Self::from_upper(&ComplexMatrix::identity(order)).expect("square")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    /// Entry `(j, k)`, conjugating when reading below the diagonal.
    #[inline]
    pub fn get(&self, j: usize, k: usize) -> C64 {
        if j <= k {
            self.packed[packed_index(j, k)]
        } else {
            self.packed[packed_index(k, j)].conj()
        }
    }

    #[inline]
    pub fn diag(&self, k: usize) -> f64 {
        self.packed[packed_index(k, k)].re
    }

    /// Entries of column `k` strictly above the diagonal.
    #[inline]
    pub fn column_above_diag(&self, k: usize) -> &[C64] {
        let start = packed_index(0, k);
        &self.packed[start..start + k]
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.order, self.order, |j, k| self.get(j, k))
    }

    /// Splits `R_m` into `(R_{m-1}, v_{m-1}, beta_m)`, where `v` is the last
    /// column above the diagonal and `beta` the last diagonal entry.
    pub fn leading_principal(&self) -> Result<(HermitianMatrix, Vec<C64>, f64)> {
        if self.order < 2 {
            return Err(Error::DimensionMismatch(format!(
                "leading principal split needs order >= 2, got {}",
                self.order
            )));
        }
        let m = self.order;
        let head = HermitianMatrix {
            order: m - 1,
            packed: self.packed[..packed_len(m - 1)].to_vec(),
        };
        Ok((
            head,
            self.column_above_diag(m - 1).to_vec(),
            self.diag(m - 1),
        ))
    }

    /// Leading principal submatrix of the given order.
    pub fn leading(&self, order: usize) -> HermitianMatrix {
        assert!(order <= self.order);
        HermitianMatrix {
            order,
            packed: self.packed[..packed_len(order)].to_vec(),
        }
    }
}

/// Upper-triangular matrix; entries below the diagonal are structurally zero.
#[derive(Debug, Clone, PartialEq)]
pub struct UpperTriangular {
    order: usize,
    packed: Vec<C64>,
}

impl UpperTriangular {
    pub fn from_packed(order: usize, packed: Vec<C64>) -> Result<Self> {
        if packed.len() != packed_len(order) {
            return Err(Error::DimensionMismatch(format!(
                "{} packed entries for order {order}",
                packed.len()
            )));
        }
        Ok(Self { order, packed })
    }

    /// Takes the upper triangle of a square matrix, ignoring anything below the diagonal.
    pub fn from_dense_upper(dense: &ComplexMatrix) -> Result<Self> {
        if dense.rows() != dense.cols() {
            return Err(Error::DimensionMismatch(
                "triangular matrix must be square".into(),
            ));
        }
        let n = dense.rows();
        let mut packed = Vec::with_capacity(packed_len(n));
        for k in 0..n {
            for j in 0..=k {
                packed.push(dense[(j, k)]);
            }
        }
        Ok(Self { order: n, packed })
    }

    pub fn identity(order: usize) -> Self {
        Self::from_dense_upper(&ComplexMatrix::identity(order)).expect("square")
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> C64 {
        if j <= k {
            self.packed[packed_index(j, k)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Column `k` on and above the diagonal.
    #[inline]
    pub fn column(&self, k: usize) -> &[C64] {
        let start = packed_index(0, k);
        &self.packed[start..=start + k]
    }

    pub fn packed(&self) -> &[C64] {
        &self.packed
    }

    /// Appends a new last column `[u; lambda]`.
    pub fn push_column(&mut self, u: &[C64], lambda: C64) {
        assert_eq!(u.len(), self.order);
        self.packed.extend_from_slice(u);
        self.packed.push(lambda);
        self.order += 1;
    }

    pub fn leading(&self, order: usize) -> UpperTriangular {
        assert!(order <= self.order);
        UpperTriangular {
            order,
            packed: self.packed[..packed_len(order)].to_vec(),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.order, self.order, |j, k| self.get(j, k))
    }

    /// `y = F^H v`, costing `m (m + 1) / 2` cmul.
    pub fn adjoint_mul_vec(&self, v: &[C64], counter: &mut FlopCounter) -> Vec<C64> {
        assert_eq!(v.len(), self.order);
        let m = self.order;
        counter.mul(packed_len(m));
        counter.add(packed_len(m) - m);
        (0..m)
            .map(|k| {
                self.column(k)
                    .iter()
                    .zip(v)
                    .fold(C64::new(0.0, 0.0), |acc, (f, x)| acc + f.conj() * x)
            })
            .collect()
    }

    /// `F y`, costing `m (m + 1) / 2` cmul.
    pub fn mul_vec(&self, y: &[C64], counter: &mut FlopCounter) -> Vec<C64> {
        assert_eq!(y.len(), self.order);
        let m = self.order;
        counter.mul(packed_len(m));
        counter.add(packed_len(m) - m);
        let mut out = vec![C64::new(0.0, 0.0); m];
        for (k, yk) in y.iter().enumerate() {
            for (o, f) in out.iter_mut().zip(self.column(k)) {
                *o += f * yk;
            }
        }
        out
    }

    /// Squared row norms, `m (m + 1) / 2` cmul.
    pub fn row_norms_sqr(&self, counter: &mut FlopCounter) -> Vec<f64> {
        let m = self.order;
        counter.mul(packed_len(m));
        counter.add(packed_len(m) - m);
        let mut out = vec![0.0; m];
        for k in 0..m {
            for (o, f) in out.iter_mut().zip(self.column(k)) {
                *o += f.norm_sqr();
            }
        }
        out
    }
}

/// Bijection on `{0, .., n-1}`; `map[k]` is the source index placed at position `k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &p in &map {
            if p >= n || seen[p] {
                return Err(Error::InvalidConfig(format!(
                    "{map:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        Ok(Self { map })
    }

    /// From 1-based indices.
    pub fn from_one_based(map: &[usize]) -> Result<Self> {
        if map.contains(&0) {
            return Err(Error::InvalidConfig(
                "1-based permutation contains 0".into(),
            ));
        }
        Self::new(map.iter().map(|p| p - 1).collect())
    }

    /// Exchanges positions `a` and `b`.
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut p = Self::identity(n);
        p.map.swap(a, b);
        p
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.map.len()
    }

    #[inline]
    pub fn apply(&self, k: usize) -> usize {
        self.map[k]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (k, &p) in self.map.iter().enumerate() {
            inv[p] = k;
        }
        Permutation { map: inv }
    }

    /// `(self ∘ other)(k) = self(other(k))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.order(), other.order());
        Permutation {
            map: other.map.iter().map(|&k| self.map[k]).collect(),
        }
    }

    /// Dense matrix `P` with `(P A)[j, :] = A[p(j), :]`.
    pub fn to_matrix(&self) -> ComplexMatrix {
        let n = self.order();
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, &p) in self.map.iter().enumerate() {
            m[(j, p)] = C64::new(1.0, 0.0);
        }
        m
    }
}

/// `R = H^H H + alpha I`, computing only the upper triangle.
///
/// Costs exactly `M (M + 1) N / 2` cmul.
pub fn gram_regularized(
    h: &ComplexMatrix,
    alpha: f64,
    counter: &mut FlopCounter,
) -> Result<HermitianMatrix> {
    let (n, m) = (h.rows(), h.cols());
    if m == 0 || n < m {
        return Err(Error::DimensionMismatch(format!(
            "channel must satisfy N >= M >= 1, got {n}x{m}"
        )));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "alpha must be finite and >= 0, got {alpha}"
        )));
    }
    // column-major copy keeps the inner products contiguous
    let cols: Vec<Vec<C64>> = (0..m).map(|c| h.column(c)).collect();
    let mut packed = Vec::with_capacity(packed_len(m));
    for k in 0..m {
        for j in 0..=k {
            let mut acc = cols[j]
                .iter()
                .zip(&cols[k])
                .fold(C64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b);
            if j == k {
                acc = C64::new(acc.re + alpha, 0.0);
            }
            packed.push(acc);
        }
    }
    counter.mul(packed_len(m) * n);
    counter.add(packed_len(m) * (n - 1) + m);
    HermitianMatrix::from_packed(m, packed)
}

/// `z = H^H x`, exactly `M N` cmul.
pub fn matvec_adjoint(h: &ComplexMatrix, x: &[C64], counter: &mut FlopCounter) -> Result<Vec<C64>> {
    let (n, m) = (h.rows(), h.cols());
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against {n} rows",
            x.len()
        )));
    }
    let mut z = vec![C64::new(0.0, 0.0); m];
    for (r, xr) in x.iter().enumerate() {
        for (zc, hrc) in z.iter_mut().zip(h.row(r)) {
            *zc += hrc.conj() * xr;
        }
    }
    counter.mul(m * n);
    counter.add(m * (n - 1));
    Ok(z)
}

/// `R'[j, k] = R[p(j), p(k)]`.
pub fn apply_symmetric_permutation(
    r: &HermitianMatrix,
    p: &Permutation,
) -> Result<HermitianMatrix> {
    if r.order() != p.order() {
        return Err(Error::DimensionMismatch(format!(
            "permutation of order {} applied to matrix of order {}",
            p.order(),
            r.order()
        )));
    }
    let n = r.order();
    let mut packed = Vec::with_capacity(packed_len(n));
    for k in 0..n {
        for j in 0..=k {
            packed.push(r.get(p.apply(j), p.apply(k)));
        }
    }
    HermitianMatrix::from_packed(n, packed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_hermitian, random_matrix, TestRng};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gram_identity_and_column_norm() {
        let mut cnt = FlopCounter::new();
        let r = gram_regularized(&ComplexMatrix::identity(2), 1.0, &mut cnt).unwrap();
        assert_eq!(r.to_dense(), ComplexMatrix::identity(2).scale(c(2.0, 0.0)));

        let h = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![c(1.0, 0.0)]]).unwrap();
        let r = gram_regularized(&h, 0.0, &mut cnt).unwrap();
        assert_eq!(r.order(), 1);
        assert_eq!(r.diag(0), 2.0);
    }

    #[test]
    fn gram_matches_dense_product() {
        let mut rng = TestRng::new(11);
        let h = random_matrix(&mut rng, 4, 4);
        let mut cnt = FlopCounter::new();
        let r = gram_regularized(&h, 0.1, &mut cnt).unwrap().to_dense();
        // entrywise brute force
        let oracle = ComplexMatrix::from_fn(4, 4, |j, k| {
            let mut s = c(if j == k { 0.1 } else { 0.0 }, 0.0);
            for n in 0..4 {
                s += h[(n, j)].conj() * h[(n, k)];
            }
            s
        });
        assert!(r.relative_distance(&oracle) <= 1e-12);
        assert_eq!(cnt.cmul, 4 * 5 / 2 * 4);
    }

    #[test]
    fn gram_rejects_wide_channel() {
        let h = ComplexMatrix::zeros(2, 3);
        assert!(matches!(
            gram_regularized(&h, 1.0, &mut FlopCounter::new()),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn matvec_adjoint_examples() {
        let mut cnt = FlopCounter::new();
        let x = vec![c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 0.0)];
        let z = matvec_adjoint(&ComplexMatrix::identity(3), &x, &mut cnt).unwrap();
        assert_eq!(z, x);
        assert_eq!(cnt.cmul, 9);

        let swap = ComplexMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        let z = matvec_adjoint(&swap, &[c(3.0, 1.0), c(-2.0, 5.0)], &mut cnt).unwrap();
        assert_eq!(z, vec![c(-2.0, 5.0), c(3.0, 1.0)]);

        assert!(matvec_adjoint(&swap, &[c(1.0, 0.0)], &mut cnt).is_err());
    }

    #[test]
    fn matvec_adjoint_matches_naive_loop() {
        let mut rng = TestRng::new(5);
        let h = random_matrix(&mut rng, 4, 2);
        let x: Vec<C64> = (0..4).map(|_| rng.complex()).collect();
        let z = matvec_adjoint(&h, &x, &mut FlopCounter::new()).unwrap();
        for m in 0..2 {
            let mut s = c(0.0, 0.0);
            for n in 0..4 {
                s += h[(n, m)].conj() * x[n];
            }
            assert!((z[m] - s).norm() <= 1e-13);
        }
    }

    #[test]
    fn matvec_adjoint_linearity() {
        let mut rng = TestRng::new(9);
        let h = random_matrix(&mut rng, 5, 3);
        let x: Vec<C64> = (0..5).map(|_| rng.complex()).collect();
        let (s, t) = (rng.complex(), rng.complex());
        let mut cnt = FlopCounter::new();
        let base = matvec_adjoint(&h, &x, &mut cnt).unwrap();
        // conjugate-linear in H
        let hs = h.scale(s);
        let z = matvec_adjoint(&hs, &x, &mut cnt).unwrap();
        for (a, b) in z.iter().zip(&base) {
            assert!((a - s.conj() * b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
        // linear in x
        let xt: Vec<C64> = x.iter().map(|v| v * t).collect();
        let z = matvec_adjoint(&h, &xt, &mut cnt).unwrap();
        for (a, b) in z.iter().zip(&base) {
            assert!((a - t * b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn symmetric_permutation_examples() {
        let r = HermitianMatrix::from_upper(
            &ComplexMatrix::from_rows(&[
                vec![c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(2.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        assert_eq!(
            apply_symmetric_permutation(&r, &Permutation::identity(2)).unwrap(),
            r
        );
        let swapped = apply_symmetric_permutation(&r, &Permutation::swap(2, 0, 1)).unwrap();
        assert_eq!(swapped.diag(0), 2.0);
        assert_eq!(swapped.diag(1), 1.0);
        assert!(apply_symmetric_permutation(&r, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn symmetric_permutation_matches_dense_matrices() {
        let mut rng = TestRng::new(3);
        let r = random_hermitian(&mut rng, 4);
        let p = Permutation::new(vec![2, 0, 3, 1]).unwrap();
        let pm = p.to_matrix();
        let oracle = pm.matmul(&r.to_dense()).matmul(&pm.adjoint());
        let got = apply_symmetric_permutation(&r, &p).unwrap().to_dense();
        assert!(got.relative_distance(&oracle) == 0.0);
    }

    #[test]
    fn leading_principal_examples() {
        let r = HermitianMatrix::from_upper(
            &ComplexMatrix::from_rows(&[
                vec![c(2.0, 0.0), c(0.0, 1.0)],
                vec![c(0.0, -1.0), c(3.0, 0.0)],
            ])
            .unwrap(),
        )
        .unwrap();
        let (head, v, beta) = r.leading_principal().unwrap();
        assert_eq!(head.to_dense()[(0, 0)], c(2.0, 0.0));
        assert_eq!(v, vec![c(0.0, 1.0)]);
        assert_eq!(beta, 3.0);

        let five =
            HermitianMatrix::from_upper(&ComplexMatrix::identity(3).scale(c(5.0, 0.0))).unwrap();
        let (head, v, beta) = five.leading_principal().unwrap();
        assert_eq!(
            head.to_dense(),
            ComplexMatrix::identity(2).scale(c(5.0, 0.0))
        );
        assert_eq!(v, vec![c(0.0, 0.0); 2]);
        assert_eq!(beta, 5.0);

        assert!(HermitianMatrix::identity(1).leading_principal().is_err());
    }

    #[test]
    fn leading_principal_reassembles() {
        let mut rng = TestRng::new(17);
        let r = random_hermitian(&mut rng, 4);
        let (head, v, beta) = r.leading_principal().unwrap();
        let dense = r.to_dense();
        let hd = head.to_dense();
        for j in 0..4 {
            for k in 0..4 {
                let want = match (j < 3, k < 3) {
                    (true, true) => hd[(j, k)],
                    (true, false) => v[j],
                    (false, true) => v[k].conj(),
                    (false, false) => C64::new(beta, 0.0),
                };
                assert_eq!(dense[(j, k)], want);
            }
        }
    }

    #[test]
    fn move_row_to_end_keeps_other_rows_in_order() {
        let mut m = ComplexMatrix::from_fn(3, 2, |r, c| C64::new((r * 10 + c) as f64, 0.0));
        m.move_row_to_end(0);
        assert_eq!(m.column(0), vec![c(10.0, 0.0), c(20.0, 0.0), c(0.0, 0.0)]);
    }

    fn perm_strategy(n: usize) -> impl Strategy<Value = Permutation> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #[test]
        fn symmetric_permutation_is_a_group_action(
            p in perm_strategy(5),
            q in perm_strategy(5),
            seed in any::<u64>(),
        ) {
            let r = random_hermitian(&mut TestRng::new(seed), 5);
            let step = apply_symmetric_permutation(&apply_symmetric_permutation(&r, &q).unwrap(), &p).unwrap();
            let once = apply_symmetric_permutation(&r, &q.compose(&p)).unwrap();
            prop_assert_eq!(step, once);
        }

        #[test]
        fn permutation_inverse_composes_to_identity(p in perm_strategy(7)) {
            prop_assert_eq!(p.compose(&p.inverse()), Permutation::identity(7));
            prop_assert_eq!(p.inverse().compose(&p), Permutation::identity(7));
        }
    }
}
