//! Unitary transformations applied from the right to square-root factors.
//!
//! Every transform here multiplies a factor `F` by a unitary matrix, so
//! `F F^H` is preserved while the zero pattern changes. Entries that a
//! transform annihilates are written as literal zeros.

use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::matcore::{ComplexMatrix, UpperTriangular, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Complex Givens rotation `(1/q) [[c, s], [-s*, c]]` acting on row pairs `[a, b]`.
///
/// Built from a pair `[d, e]` with `c = |e|`, `q = sqrt(|e|^2 + |d|^2)` and
/// `s = (e/|e|) d*`, it maps `[d, e]` to `[0, (e/|e|) q]`. Rotating any other
/// row is charged 3 cmul and 1 cadd: with `c` real, the two real-by-complex
/// products together cost one complex multiplication.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GivensRotation {
    pub c: f64,
    pub s: C64,
    pub q: f64,
    cn: f64,
    sn: C64,
    phase: C64,
    identity: bool,
}

impl GivensRotation {
    pub fn identity() -> Self {
        Self {
            c: 1.0,
            s: ZERO,
            q: 1.0,
            cn: 1.0,
            sn: ZERO,
            phase: C64::new(1.0, 0.0),
            identity: true,
        }
    }

    /// True when the rotation leaves every row unchanged (nothing to annihilate).
    pub fn is_identity(&self) -> bool {
        self.identity
    }

    /// The normalized 2x2 matrix `[[c, s], [-s*, c]] / q`.
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        [
            [C64::new(self.cn, 0.0), self.sn],
            [-self.sn.conj(), C64::new(self.cn, 0.0)],
        ]
    }

    /// `[a, b] -> [a, b] * matrix()`.
    #[inline]
    pub fn rotate(&self, a: C64, b: C64) -> (C64, C64) {
        (a * self.cn - self.sn.conj() * b, self.sn * a + b * self.cn)
    }

    /// Image of the defining pair: `[0, (e/|e|) q]`.
    #[inline]
    pub fn annihilated(&self) -> (C64, C64) {
        (ZERO, self.phase * self.q)
    }
}

/// Rotation that zeroes `d` in the row `[d, e]`.
///
/// `d = 0` yields the identity (nothing to do). `e = 0` uses the phase
/// convention `e/|e| = 1`, giving `c = 0`, `q = |d|`, `s = d*`.
pub fn givens_from_pair(d: C64, e: C64) -> GivensRotation {
    givens_counted(d, e, &mut FlopCounter::new())
}

pub(crate) fn givens_counted(d: C64, e: C64, counter: &mut FlopCounter) -> GivensRotation {
    if d == ZERO {
        let q = e.norm();
        if q == 0.0 {
            return GivensRotation::identity();
        }
        return GivensRotation {
            c: q,
            s: ZERO,
            q,
            cn: 1.0,
            sn: ZERO,
            phase: e / q,
            identity: true,
        };
    }
    let abs_d = d.norm();
    let abs_e = e.norm();
    counter.sqrt(2);
    let q = abs_d.hypot(abs_e);
    counter.div(1);
    if abs_e == 0.0 {
        let inv = 1.0 / q;
        return GivensRotation {
            c: 0.0,
            s: d.conj(),
            q,
            cn: 0.0,
            sn: d.conj() * inv,
            phase: C64::new(1.0, 0.0),
            identity: false,
        };
    }
    let t = 1.0 / (abs_e * q);
    let phase = e * (q * t);
    GivensRotation {
        c: abs_e,
        s: phase * d.conj(),
        q,
        cn: abs_e / q,
        sn: e * d.conj() * t,
        phase,
        identity: false,
    }
}

/// Applies `rot` to columns `(col, col + 1)` of the given rows of a row-major
/// square buffer of width `n`, and writes the annihilated pair into `pivot_row`.
/// Charges 3 cmul + 1 cadd per row including the pivot row.
fn apply_to_columns(
    buf: &mut [C64],
    n: usize,
    col: usize,
    rot: &GivensRotation,
    rows: impl Iterator<Item = usize>,
    pivot_row: usize,
    counter: &mut FlopCounter,
) {
    let mut touched = 1;
    for r in rows {
        let base = r * n + col;
        let (a, b) = rot.rotate(buf[base], buf[base + 1]);
        buf[base] = a;
        buf[base + 1] = b;
        touched += 1;
    }
    let base = pivot_row * n + col;
    let (a, b) = rot.annihilated();
    buf[base] = a;
    buf[base + 1] = b;
    counter.mul(3 * touched);
    counter.add(touched);
}

/// Result of splitting `F Sigma = [[F_next, u], [0, lambda]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Retriangularized {
    pub next: UpperTriangular,
    pub u: Vec<C64>,
    /// Surviving last-row entry. Its phase is whatever the final rotation
    /// leaves, so it is complex in general; `|lambda|^2` is the error variance
    /// of the moved row.
    pub lambda: C64,
    pub rotations_used: usize,
}

/// Moves row `i` of the upper-triangular `F` to the bottom and restores the
/// block form with the chain of rotations on column pairs `(i, i+1), ..,
/// (m-2, m-1)`.
///
/// The rotation on pair `(j, j+1)` only meets nonzeros in the first `j + 2`
/// rows (the moved row included), so the chain costs
/// `sum_{j=i}^{m-2} 3 (j + 2)` cmul and `sum_{j=i}^{m-2} (j + 2)` cadd.
pub fn retriangularize(
    f: &UpperTriangular,
    i: usize,
    counter: &mut FlopCounter,
) -> Result<Retriangularized> {
    let m = f.order();
    if i >= m {
        return Err(Error::IndexOutOfRange { index: i, order: m });
    }
    let mut buf = vec![ZERO; m * m];
    for k in 0..m {
        for (j, &val) in f.column(k).iter().enumerate() {
            let row = match j.cmp(&i) {
                std::cmp::Ordering::Less => j,
                std::cmp::Ordering::Equal => m - 1,
                std::cmp::Ordering::Greater => j - 1,
            };
            buf[row * m + k] = val;
        }
    }

    let last = m - 1;
    let mut used = 0;
    for j in i..last {
        let rot = givens_counted(buf[last * m + j], buf[last * m + j + 1], counter);
        if rot.is_identity() {
            continue;
        }
        apply_to_columns(&mut buf, m, j, &rot, 0..=j, last, counter);
        used += 1;
    }

    let mut packed = Vec::with_capacity((m - 1) * m / 2);
    for k in 0..last {
        for j in 0..=k {
            packed.push(buf[j * m + k]);
        }
        debug_assert!((k + 1..last).all(|j| buf[j * m + k] == ZERO));
    }
    Ok(Retriangularized {
        next: UpperTriangular::from_packed(last, packed)?,
        u: (0..last).map(|j| buf[j * m + last]).collect(),
        lambda: buf[last * m + last],
        rotations_used: used,
    })
}

/// How a dense factor is brought to block upper-triangular form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TriangularizationMode {
    Givens,
    Householder,
}

impl TriangularizationMode {
    pub fn name(&self) -> &'static str {
        match self {
            TriangularizationMode::Givens => "givens",
            TriangularizationMode::Householder => "householder",
        }
    }
}

/// Dense counterpart of [`Retriangularized`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlockSplit {
    pub next: ComplexMatrix,
    pub u: Vec<C64>,
    pub lambda: C64,
    /// Rotations (Givens) or reflectors (Householder) applied.
    pub transforms: usize,
}

/// Zeroes the first `m - 1` entries of the last row of a dense square `F` by
/// right-multiplication with a unitary and splits off the last row and column.
///
/// Givens mode uses the chain on pairs `(0, 1), .., (m-2, m-1)` across all rows,
/// costing `3m (m - 1)` cmul. Householder mode uses one reflector, about `2 m^2`.
pub fn block_upper_triangularize_dense(
    f: &ComplexMatrix,
    mode: TriangularizationMode,
    counter: &mut FlopCounter,
) -> Result<BlockSplit> {
    let m = f.rows();
    if m == 0 || f.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "block triangularization needs a square matrix, got {}x{}",
            f.rows(),
            f.cols()
        )));
    }
    let last = m - 1;
    let mut buf = f.as_slice().to_vec();
    let mut transforms = 0;
    match mode {
        TriangularizationMode::Givens => {
            for j in 0..last {
                let rot = givens_counted(buf[last * m + j], buf[last * m + j + 1], counter);
                if rot.is_identity() {
                    continue;
                }
                apply_to_columns(&mut buf, m, j, &rot, 0..last, last, counter);
                transforms += 1;
            }
        }
        TriangularizationMode::Householder => {
            let row: Vec<C64> = buf[last * m..].to_vec();
            if row[..last].iter().any(|z| *z != ZERO) {
                let refl = Reflector::zeroing_all_but(&row, last, counter);
                for r in 0..last {
                    refl.apply(&mut buf[r * m..(r + 1) * m], 0, counter);
                }
                buf[last * m..].fill(ZERO);
                buf[last * m + last] = refl.gamma;
                transforms = 1;
            }
        }
    }
    let dense = ComplexMatrix::from_row_major(m, m, buf)
        .map_err(|e| e.context("block triangularization"))?;
    Ok(BlockSplit {
        next: dense.leading_block(last, last),
        u: (0..last).map(|j| dense[(j, last)]).collect(),
        lambda: dense[(last, last)],
        transforms,
    })
}

/// Householder reflector `Q = I - tau w w^H` applied from the right, chosen so
/// that `r Q = gamma e_keep`.
///
/// `gamma = -(r_keep / |r_keep|) ||r||`, the sign opposite to the pivot's phase,
/// which makes `tau (r w) = 1` and avoids cancellation in `w`.
struct Reflector {
    /// Row vector `w^H = r - gamma e_keep`.
    w_adj: Vec<C64>,
    tau: f64,
    gamma: C64,
}

impl Reflector {
    fn zeroing_all_but(r: &[C64], keep: usize, counter: &mut FlopCounter) -> Reflector {
        let len = r.len();
        counter.mul(len);
        counter.add(len - 1);
        let norm_sqr: f64 = r.iter().map(|z| z.norm_sqr()).sum();
        counter.sqrt(2);
        let norm = norm_sqr.sqrt();
        let pivot = r[keep];
        let abs_p = pivot.norm();
        let phase = if abs_p == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            pivot / abs_p
        };
        let gamma = -phase * norm;
        let mut w_adj = r.to_vec();
        w_adj[keep] -= gamma;
        counter.add(1);
        counter.div(1);
        let tau = 1.0 / (norm_sqr + abs_p * norm);
        Reflector { w_adj, tau, gamma }
    }

    /// `a <- a Q` on entries `skip..`; entries before `skip` are known zeros of `a`
    /// whose images are not needed.
    fn apply(&self, a: &mut [C64], skip: usize, counter: &mut FlopCounter) {
        let live = a.len() - skip;
        let dot = a[skip..]
            .iter()
            .zip(&self.w_adj[skip..])
            .fold(ZERO, |acc, (x, w)| acc + x * w.conj());
        let s = dot * self.tau;
        for (x, w) in a[skip..].iter_mut().zip(&self.w_adj[skip..]) {
            *x -= s * w;
        }
        counter.mul(2 * live + 1);
        counter.add(2 * live - 1);
    }
}

/// Running square root `P_i^{1/2}` of the error covariance in the pre-array recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct PreArrayState {
    pub psqrt: ComplexMatrix,
    pub step: usize,
}

impl PreArrayState {
    /// `P_0^{1/2} = I / sqrt(alpha)`.
    pub fn new(m: usize, alpha: f64, counter: &mut FlopCounter) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::DegenerateAlpha(alpha));
        }
        if m == 0 {
            return Err(Error::DimensionMismatch("pre-array needs M >= 1".into()));
        }
        counter.div(1);
        counter.sqrt(1);
        let s = 1.0 / alpha.sqrt();
        Ok(Self {
            psqrt: ComplexMatrix::identity(m).scale(C64::new(s, 0.0)),
            step: 0,
        })
    }

    /// Absorbs one channel row `hrow` (a row of `H`).
    ///
    /// Forms `[[1, hrow P^{1/2}], [0, P^{1/2}]]`, zeroes the top row right of its
    /// first entry with a Householder reflector, and keeps the lower-right block,
    /// so that the new `P^{1/2} P^{H/2} = (P^{-1} + hrow^H hrow)^{-1}`.
    /// Costs `3 M^2 + 2 M + 1` cmul.
    pub fn update(&self, hrow: &[C64], counter: &mut FlopCounter) -> Result<PreArrayState> {
        let m = self.psqrt.rows();
        if hrow.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "channel row of length {} for M = {m}",
                hrow.len()
            )));
        }
        let mut top = vec![C64::new(1.0, 0.0); m + 1];
        for (k, t) in top[1..].iter_mut().enumerate() {
            *t = hrow
                .iter()
                .enumerate()
                .fold(ZERO, |acc, (j, h)| acc + h * self.psqrt[(j, k)]);
        }
        counter.mul(m * m);
        counter.add(m * (m - 1));

        let refl = Reflector::zeroing_all_but(&top, 0, counter);
        let mut next = ComplexMatrix::zeros(m, m);
        let mut row = vec![ZERO; m + 1];
        for r in 0..m {
            row[0] = ZERO;
            row[1..].copy_from_slice(self.psqrt.row(r));
            refl.apply(&mut row, 1, counter);
            next.row_mut(r).copy_from_slice(&row[1..]);
        }
        Ok(PreArrayState {
            psqrt: next,
            step: self.step + 1,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flops::FlopCounter;
    use crate::invchol::inv_chol;
    use crate::matcore::gram_regularized;
    use crate::testutil::{random_matrix, random_spd, TestRng};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_unitary(rot: &GivensRotation) {
        let g = rot.matrix();
        let m = ComplexMatrix::from_rows(&[g[0].to_vec(), g[1].to_vec()]).unwrap();
        assert!(m.gram_outer().sub(&ComplexMatrix::identity(2)).max_abs() <= 1e-12);
        let q2 = rot.c * rot.c + rot.s.norm_sqr();
        assert!((q2 - rot.q * rot.q).abs() <= 1e-12 * rot.q * rot.q.max(1.0));
    }

    #[test]
    fn pythagorean_pair() {
        let rot = givens_from_pair(c(3.0, 0.0), c(4.0, 0.0));
        assert_eq!((rot.c, rot.q), (4.0, 5.0));
        assert!((rot.s - c(3.0, 0.0)).norm() < 1e-15);
        let (a, b) = rot.rotate(c(3.0, 0.0), c(4.0, 0.0));
        assert!(a.norm() < 1e-15 && (b - c(5.0, 0.0)).norm() < 1e-15);
        assert_eq!(rot.annihilated(), (c(0.0, 0.0), c(5.0, 0.0)));
        assert_unitary(&rot);
    }

    #[test]
    fn nothing_to_annihilate() {
        let rot = givens_from_pair(c(0.0, 0.0), c(7.0, 0.0));
        assert!(rot.is_identity());
        assert_eq!(rot.q, 7.0);
        assert_eq!(
            rot.rotate(c(0.0, 0.0), c(7.0, 0.0)),
            (c(0.0, 0.0), c(7.0, 0.0))
        );
        assert!(givens_from_pair(c(0.0, 0.0), c(0.0, 0.0)).is_identity());
    }

    #[test]
    fn zero_e_exchanges() {
        let d = c(1.0, -2.0);
        let rot = givens_from_pair(d, c(0.0, 0.0));
        assert_eq!(rot.c, 0.0);
        assert_eq!(rot.s, d.conj());
        let (a, b) = rot.rotate(d, c(0.0, 0.0));
        assert!(a.norm() < 1e-15);
        assert!((b - c(d.norm(), 0.0)).norm() < 1e-15);
        assert_unitary(&rot);
    }

    #[test]
    fn complex_pair_direct_multiply() {
        let (d, e) = (c(1.0, 1.0), c(0.0, 1.0));
        let rot = givens_from_pair(d, e);
        assert_unitary(&rot);
        let g = rot.matrix();
        let out0 = d * g[0][0] + e * g[1][0];
        let out1 = d * g[0][1] + e * g[1][1];
        let want = e / e.norm() * (d.norm_sqr() + e.norm_sqr()).sqrt();
        assert!(out0.norm() <= 1e-13);
        assert!((out1 - want).norm() <= 1e-13);
    }

    proptest! {
        #[test]
        fn givens_is_unitary(dr in -5.0..5.0f64, di in -5.0..5.0f64, er in -5.0..5.0f64, ei in -5.0..5.0f64) {
            let rot = givens_from_pair(c(dr, di), c(er, ei));
            assert_unitary(&rot);
        }
    }

    fn reassemble(next: &ComplexMatrix, u: &[C64], lambda: C64) -> ComplexMatrix {
        let m = next.rows() + 1;
        ComplexMatrix::from_fn(m, m, |r, k| match (r < m - 1, k < m - 1) {
            (true, true) => next[(r, k)],
            (true, false) => u[r],
            (false, true) => c(0.0, 0.0),
            (false, false) => lambda,
        })
    }

    #[test]
    fn retriangularize_last_row_is_noop() {
        let mut rng = TestRng::new(3);
        let f = inv_chol(&random_spd(&mut rng, 5, 0.1), &mut FlopCounter::new()).unwrap();
        let mut cnt = FlopCounter::new();
        let out = retriangularize(f.factor(), 4, &mut cnt).unwrap();
        assert_eq!(out.rotations_used, 0);
        assert_eq!(out.next, f.factor().leading(4));
        assert_eq!(cnt, FlopCounter::new());
    }

    #[test]
    fn retriangularize_identity() {
        let out =
            retriangularize(&UpperTriangular::identity(3), 0, &mut FlopCounter::new()).unwrap();
        assert_eq!(out.rotations_used, 2);
        assert!(
            out.next
                .to_dense()
                .gram_outer()
                .sub(&ComplexMatrix::identity(2))
                .max_abs()
                < 1e-15
        );
        assert!((out.lambda.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn retriangularize_preserves_permuted_product() {
        let mut rng = TestRng::new(9);
        let f = inv_chol(&random_spd(&mut rng, 5, 0.1), &mut FlopCounter::new()).unwrap();
        let dense = f.factor().to_dense();
        let out = retriangularize(f.factor(), 1, &mut FlopCounter::new()).unwrap();
        let got = reassemble(&out.next.to_dense(), &out.u, out.lambda).gram_outer();
        let permuted = dense.select_rows(&[0, 2, 3, 4, 1]).gram_outer();
        assert!(got.relative_distance(&permuted) <= 1e-12);
        for j in 0..4 {
            for k in 0..j {
                assert_eq!(out.next.get(j, k), c(0.0, 0.0));
            }
        }
    }

    #[test]
    fn retriangularize_out_of_range() {
        assert!(matches!(
            retriangularize(&UpperTriangular::identity(3), 3, &mut FlopCounter::new()),
            Err(Error::IndexOutOfRange { index: 3, order: 3 })
        ));
    }

    #[test]
    fn retriangularize_flop_law_exhaustive() {
        let mut rng = TestRng::new(77);
        for m in 1..=16usize {
            let f = inv_chol(&random_spd(&mut rng, m, 0.1), &mut FlopCounter::new()).unwrap();
            for i in 0..m {
                let mut cnt = FlopCounter::new();
                let out = retriangularize(f.factor(), i, &mut cnt).unwrap();
                // 1-based: sum_{j=i}^{m-1} 3 (j + 1)
                let law: u64 = ((i + 1)..m).map(|j| (j + 1) as u64).sum();
                assert_eq!(cnt.cmul, 3 * law, "m={m} i={i}");
                assert_eq!(cnt.cadd, law, "m={m} i={i}");
                assert_eq!(out.rotations_used, m - 1 - i);
            }
        }
    }

    #[test]
    fn dense_already_split_is_unchanged() {
        let mut rng = TestRng::new(12);
        let mut f = random_matrix(&mut rng, 4, 4);
        for k in 0..3 {
            f[(3, k)] = c(0.0, 0.0);
        }
        for mode in [
            TriangularizationMode::Givens,
            TriangularizationMode::Householder,
        ] {
            let out = block_upper_triangularize_dense(&f, mode, &mut FlopCounter::new()).unwrap();
            assert_eq!(reassemble(&out.next, &out.u, out.lambda), f);
            assert_eq!(out.transforms, 0);
        }
    }

    #[test]
    fn dense_permuted_identity() {
        let f = ComplexMatrix::identity(4).select_rows(&[3, 0, 1, 2]);
        for mode in [
            TriangularizationMode::Givens,
            TriangularizationMode::Householder,
        ] {
            let out = block_upper_triangularize_dense(&f, mode, &mut FlopCounter::new()).unwrap();
            let got = reassemble(&out.next, &out.u, out.lambda);
            assert!(got.gram_outer().sub(&f.gram_outer()).max_abs() <= 1e-12);
            assert!(
                out.u.iter().all(|z| z.norm() < 1e-15)
                    || mode == TriangularizationMode::Householder
            );
        }
    }

    #[test]
    fn dense_random_both_modes() {
        let mut rng = TestRng::new(5);
        let f = random_matrix(&mut rng, 6, 6);
        let target = f.gram_outer();
        let mut lambdas = vec![];
        for mode in [
            TriangularizationMode::Givens,
            TriangularizationMode::Householder,
        ] {
            let mut cnt = FlopCounter::new();
            let out = block_upper_triangularize_dense(&f, mode, &mut cnt).unwrap();
            let got = reassemble(&out.next, &out.u, out.lambda);
            assert!(got.gram_outer().relative_distance(&target) <= 1e-11);
            lambdas.push(out.lambda.norm());
            if mode == TriangularizationMode::Givens {
                assert_eq!(cnt.cmul, 3 * 6 * 5);
                assert_eq!(cnt.cadd, 6 * 5);
            }
        }
        assert!((lambdas[0] - lambdas[1]).abs() <= 1e-12);
    }

    #[test]
    fn prearray_zero_row_keeps_product() {
        let mut rng = TestRng::new(6);
        let state = PreArrayState {
            psqrt: random_matrix(&mut rng, 3, 3),
            step: 0,
        };
        let next = state
            .update(&[c(0.0, 0.0); 3], &mut FlopCounter::new())
            .unwrap();
        assert!(
            next.psqrt
                .gram_outer()
                .sub(&state.psqrt.gram_outer())
                .max_abs()
                <= 1e-12
        );
    }

    #[test]
    fn prearray_scalar_recursion() {
        let mut cnt = FlopCounter::new();
        let s0 = PreArrayState::new(1, 1.0, &mut cnt).unwrap();
        let s1 = s0.update(&[c(1.0, 0.0)], &mut cnt).unwrap();
        assert!((s1.psqrt[(0, 0)].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s1.psqrt.gram_outer()[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(s1.step, 1);
    }

    #[test]
    fn prearray_endpoint_is_inverse_gram() {
        let mut rng = TestRng::new(44);
        let (m, n, alpha) = (4, 6, 0.3);
        let h = random_matrix(&mut rng, n, m);
        let mut cnt = FlopCounter::new();
        let mut st = PreArrayState::new(m, alpha, &mut cnt).unwrap();
        let mut upd = FlopCounter::new();
        for r in 0..n {
            st = st.update(h.row(r), &mut upd).unwrap();
        }
        assert_eq!(upd.cmul, (n * (3 * m * m + 2 * m + 1)) as u64);
        let r = gram_regularized(&h, alpha, &mut FlopCounter::new()).unwrap();
        let p = crate::detectors::dense_inverse(&r.to_dense()).unwrap();
        assert!(st.psqrt.gram_outer().relative_distance(&p) <= 1e-9);
    }

    #[test]
    fn prearray_rejects_degenerate_alpha() {
        assert!(matches!(
            PreArrayState::new(2, 0.0, &mut FlopCounter::new()),
            Err(Error::DegenerateAlpha(_))
        ));
        assert!(PreArrayState::new(2, -1.0, &mut FlopCounter::new()).is_err());
    }
}
