//! Inverse Cholesky factorization by bordering.
//!
//! The factor `F_m` of the leading `m x m` block of `R` is grown one column at
//! a time from `F_{m-1}`, the new column being
//!
//! ```text
//! y        = F_{m-1}^H v_{m-1}
//! lambda_m = 1 / sqrt(beta_m - y^H y)
//! u_{m-1}  = -lambda_m F_{m-1} y
//! ```
//!
//! so no triangular solve is ever needed and each column costs a single
//! division. [`conventional_inv_chol`] computes the same factor the usual way
//! (Cholesky, then inversion of the triangular factor) and serves as a
//! cross-check.

use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::matcore::{
    packed_index, packed_len, ComplexMatrix, HermitianMatrix, UpperTriangular, C64,
};

/// Relative guard on Schur complements: a pivot `p` fails when `p <= EPS_PD * max(beta, 1)`.
pub const EPS_PD: f64 = 1e-12;

/// Upper-triangular `F` with real positive diagonal and `F F^H = R^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvCholFactor {
    f: UpperTriangular,
}

/// Scratch produced while bordering: `y = F_{m-1}^H v_{m-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionWorkspace {
    pub y: Vec<C64>,
}

impl InvCholFactor {
    #[inline]
    pub fn order(&self) -> usize {
        self.f.order()
    }

    pub fn factor(&self) -> &UpperTriangular {
        &self.f
    }

    pub fn into_factor(self) -> UpperTriangular {
        self.f
    }

    /// `F F^H`, which equals `R^{-1}`.
    pub fn covariance(&self) -> ComplexMatrix {
        self.f.to_dense().gram_outer()
    }

    /// Borders the factor with one more column, turning the factor of
    /// `R_{m-1}` into that of `R_m = [[R_{m-1}, v], [v^H, beta]]`.
    pub fn extend(self, v: &[C64], beta: f64, counter: &mut FlopCounter) -> Result<InvCholFactor> {
        self.extend_with_workspace(v, beta, counter).map(|(f, _)| f)
    }

    /// Same as [`extend`](Self::extend), also returning the intermediate `y`.
    pub fn extend_with_workspace(
        mut self,
        v: &[C64],
        beta: f64,
        counter: &mut FlopCounter,
    ) -> Result<(InvCholFactor, ExtensionWorkspace)> {
        let prev = self.order();
        if v.len() != prev {
            return Err(Error::DimensionMismatch(format!(
                "border column of length {} for a factor of order {prev}",
                v.len()
            )));
        }
        let y = self.f.adjoint_mul_vec(v, counter);

        counter.mul(prev);
        counter.add(prev);
        let schur = beta - y.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if !(schur > EPS_PD * beta.max(1.0)) {
            return Err(Error::NotPositiveDefinite {
                column: prev,
                pivot: schur,
            });
        }
        counter.div(1);
        counter.sqrt(1);
        let lambda = 1.0 / schur.sqrt();

        let mut u = self.f.mul_vec(&y, counter);
        counter.mul(prev);
        for ui in &mut u {
            *ui *= -lambda;
        }
        self.f.push_column(&u, C64::new(lambda, 0.0));
        Ok((self, ExtensionWorkspace { y }))
    }
}

/// Order-1 factor `[1 / sqrt(r11)]`.
pub fn seed_factor(r11: f64, counter: &mut FlopCounter) -> Result<InvCholFactor> {
    if !(r11 > 0.0) || !r11.is_finite() {
        return Err(Error::NotPositiveDefinite {
            column: 0,
            pivot: r11,
        });
    }
    counter.div(1);
    counter.sqrt(1);
    let f = UpperTriangular::from_packed(1, vec![C64::new(1.0 / r11.sqrt(), 0.0)])?;
    Ok(InvCholFactor { f })
}

/// Builds the inverse Cholesky factor of `R` column by column.
///
/// Uses exactly `M` divisions and `M^3 / 3 + O(M^2)` complex multiplications.
pub fn inv_chol(r: &HermitianMatrix, counter: &mut FlopCounter) -> Result<InvCholFactor> {
    let m = r.order();
    if m == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let mut f = seed_factor(r.diag(0), counter)?;
    for k in 1..m {
        f = f.extend(r.column_above_diag(k), r.diag(k), counter)?;
    }
    Ok(f)
}

/// Cholesky factorization `R = L L^H` followed by `F = L^{-H}` via back substitution.
///
/// Uses exactly `2M` divisions: one reciprocal pivot per column while factoring
/// and one per row while inverting.
pub fn conventional_inv_chol(
    r: &HermitianMatrix,
    counter: &mut FlopCounter,
) -> Result<InvCholFactor> {
    let m = r.order();
    if m == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    // lower factor, row-major dense
    let mut l = vec![C64::new(0.0, 0.0); m * m];
    for j in 0..m {
        let rjj = r.diag(j);
        let mut d = rjj;
        for k in 0..j {
            d -= l[j * m + k].norm_sqr();
        }
        counter.mul(j);
        counter.add(j);
        if !(d > EPS_PD * rjj.max(1.0)) {
            return Err(Error::NotPositiveDefinite {
                column: j,
                pivot: d,
            });
        }
        counter.sqrt(1);
        let ljj = d.sqrt();
        counter.div(1);
        let inv = 1.0 / ljj;
        l[j * m + j] = C64::new(ljj, 0.0);
        for i in j + 1..m {
            let mut s = r.get(i, j);
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k].conj();
            }
            l[i * m + j] = s * inv;
        }
        let below = m - j - 1;
        counter.mul(below * (j + 1));
        counter.add(below * j);
    }

    // X = L^{-1}, lower triangular, built column by column by forward substitution
    let mut recip = vec![0.0; m];
    for i in 0..m {
        counter.div(1);
        recip[i] = 1.0 / l[i * m + i].re;
    }
    let mut packed = vec![C64::new(0.0, 0.0); packed_len(m)];
    for c in 0..m {
        let mut x = vec![C64::new(0.0, 0.0); m];
        x[c] = C64::new(recip[c], 0.0);
        for i in c + 1..m {
            let mut s = C64::new(0.0, 0.0);
            for k in c..i {
                s += l[i * m + k] * x[k];
            }
            x[i] = -s * recip[i];
            counter.mul(i - c + 1);
            counter.add(i - c - 1);
        }
        // F = X^H is upper triangular: F[c, i] = conj(X[i, c])
        for (i, xi) in x.iter().enumerate().skip(c) {
            packed[packed_index(c, i)] = xi.conj();
        }
    }
    Ok(InvCholFactor {
        f: UpperTriangular::from_packed(m, packed)?,
    })
}
