//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::vectorspace::Vector;

pub(crate) fn to_dvector(v: &Vector) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

pub(crate) fn from_dvector(v: &DVector<f64>) -> Vector {
    Vector::from_raw(v.iter().copied().collect())
}

/// Threshold on `min |u_ii| / max |u_ii|` below which an LU factorization is
/// treated as singular.
pub(crate) fn singular_threshold(n: usize) -> f64 {
    10.0 * n as f64 * f64::EPSILON
}

/// Solves `a x = b` by LU with partial pivoting, rejecting numerically singular `a`.
pub(crate) fn lu_solve(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    let n = a.nrows();
    let lu = a.clone().lu();
    let u = lu.u();
    let (lo, hi) = u
        .diagonal()
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), d| {
            (lo.min(d.abs()), hi.max(d.abs()))
        });
    let pivot_ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    if !(pivot_ratio >= singular_threshold(n)) {
        return Err(Error::SingularSystem { pivot_ratio });
    }
    lu.solve(b).ok_or(Error::SingularSystem { pivot_ratio })
}

pub(crate) fn lu_inverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut inv = DMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = DVector::zeros(n);
        e[j] = 1.0;
        inv.set_column(j, &lu_solve(a, &e)?);
    }
    Ok(inv)
}
