use num_complex::Complex64;

use super::DensePoly;
use crate::error::{Error, Result};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
const MAX_ITER: usize = 200;

/// Roots of a polynomial with their normalized backward errors
/// |p(r)| / (‖p‖₁ · max(1,|r|)^deg).
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residuals: Vec<f64>,
}

impl RootSet {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    /// Group roots closer than `rel_tol · (1 + |r|)`; returns centroids with multiplicities.
    pub fn clusters(&self, rel_tol: f64) -> Vec<(Complex64, usize)> {
        let mut used = vec![false; self.roots.len()];
        let mut out = Vec::new();
        for i in 0..self.roots.len() {
            if used[i] {
                continue;
            }
            used[i] = true;
            let mut members = vec![self.roots[i]];
            let mut k = 0;
            while k < members.len() {
                let z = members[k];
                for (u, &r) in used.iter_mut().zip(&self.roots) {
                    if !*u && (r - z).norm() <= rel_tol * (1.0 + z.norm()) {
                        *u = true;
                        members.push(r);
                    }
                }
                k += 1;
            }
            let centre = members.iter().sum::<Complex64>() / members.len() as f64;
            out.push((centre, members.len()));
        }
        out
    }
}

fn backward_error(p: &DensePoly, z: Complex64) -> f64 {
    let scale = p.norm1() * z.norm().max(1.0).powi(p.degree() as i32);
    p.eval(z).norm() / scale
}

/// All complex roots by Aberth–Ehrlich iteration started on the Cauchy-bound circle.
pub fn poly_roots(p: &DensePoly, tol: f64) -> Result<RootSet> {
    let n = p.degree();
    if p.is_zero() || n == 0 {
        return Err(Error::DegenerateInput("polynomial of degree < 1".into()));
    }
    if p.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    let lead = p.leading();
    let monic = p.scale(1.0 / lead);
    let dp = monic.derivative();
    let bound = 1.0
        + monic.coeffs()[..n]
            .iter()
            .map(|c| c.norm())
            .fold(0.0, f64::max);
    // Start inside the bound; the offset angle avoids symmetric stalls.
    let radius = 0.5 * bound;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4))
        .collect();
    let mut converged = vec![false; n];
    for _ in 0..MAX_ITER {
        let mut all_done = true;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let pv = monic.eval(z[k]);
            let dv = dp.eval(z[k]);
            if pv == Complex64::new(0.0, 0.0) {
                converged[k] = true;
                continue;
            }
            let ratio = pv / dv;
            let sum: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| 1.0 / (z[k] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * sum);
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[k] -= w;
            if w.norm() <= 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                converged[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    let residuals: Vec<f64> = z.iter().map(|&r| backward_error(p, r)).collect();
    let set = RootSet { roots: z, residuals };
    if set.max_residual() > tol || set.roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::NonConvergence(set.max_residual()));
    }
    Ok(set)
}
