//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Unconjugated bilinear product Σ aᵢbᵢ.
pub fn bdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

pub fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Singular values in descending order; wide matrices are padded with zero rows.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().cloned().unwrap_or(0.0)
}

pub fn condition_number(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Numerical rank with threshold `rel · σ_max`.
pub fn numerical_rank(m: &CMat, rel: f64) -> usize {
    let s = singular_values(m);
    let smax = s.first().cloned().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel * smax).count()
}

/// Orthonormal basis (columns) of the numerical null space, threshold `rel · σ_max`.
pub fn null_space(m: &CMat, rel: f64) -> CMat {
    let (r, n) = m.shape();
    let sq = if r < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (r, n)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("requested V^H");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<CVec> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= rel * smax)
        .map(|(i, _)| vt.row(i).transpose().map(|z| z.conj()))
        .collect();
    if cols.is_empty() {
        CMat::zeros(n, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(Error::SingularVep(f64::INFINITY))
}

/// Complex Schur factorization A = Q T Q^H.
pub fn schur(m: &CMat) -> Result<(CMat, CMat)> {
    let s = nalgebra::Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::EigenNoConvergence)?;
    Ok(s.unpack())
}

/// Eigenvectors of an upper-triangular matrix by back substitution,
/// with tiny pivots replaced by `smin`. Columns are normalized.
pub fn triangular_eigenvectors(t: &CMat) -> CMat {
    let n = t.nrows();
    let scale = max_abs(t).max(f64::MIN_POSITIVE);
    let smin = (f64::EPSILON * scale).max(f64::MIN_POSITIVE);
    let mut y = CMat::zeros(n, n);
    for k in 0..n {
        let lam = t[(k, k)];
        y[(k, k)] = ONE;
        for i in (0..k).rev() {
            let mut s = ZERO;
            for j in i + 1..=k {
                s += t[(i, j)] * y[(j, k)];
            }
            let mut d = t[(i, i)] - lam;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            y[(i, k)] = -s / d;
        }
        let nrm = y.column(k).norm();
        y.column_mut(k).scale_mut(1.0 / nrm);
    }
    y
}
