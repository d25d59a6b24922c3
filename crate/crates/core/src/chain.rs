//! Quasi-Hamiltonian of the open chain, boundary polynomials, quasi-energies
//! and single-particle mode vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{bdot, c, norm2, null_space, CMat, CVec, ONE, ZERO};
use crate::polyalg::{chebyshev_u_eval, chebyshev_u_poly, poly_roots, DensePoly, DEFAULT_ROOT_TOL};

/// The two decoupled families of single-particle modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    I,
    II,
}

impl Mode {
    pub fn other(self) -> Mode {
        match self {
            Mode::I => Mode::II,
            Mode::II => Mode::I,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Mode::I => "I",
            Mode::II => "II",
        }
    }
}

/// λ = -(1-γ)/(1+γ).
pub fn lambda_of_gamma(gamma: Complex64) -> Result<Complex64> {
    if (gamma + ONE).norm() == 0.0 {
        return Err(Error::MapSingular);
    }
    Ok(-(ONE - gamma) / (ONE + gamma))
}

/// γ = (1+λ)/(1-λ).
pub fn gamma_of_lambda(lambda: Complex64) -> Result<Complex64> {
    if (ONE - lambda).norm() == 0.0 {
        return Err(Error::MapSingular);
    }
    Ok((ONE + lambda) / (ONE - lambda))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub l: usize,
    pub gamma: Complex64,
    pub lambda: Complex64,
}

impl ChainSpec {
    pub fn new(l: usize, gamma: Complex64) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!("chain length must be even and >= 2, got {l}")));
        }
        if !crate::linalg::is_finite(gamma) {
            return Err(Error::InvalidInput("gamma must be finite".into()));
        }
        if (gamma + ONE).norm() < 1e-300 {
            return Err(Error::LambdaSingular(gamma));
        }
        Ok(Self { l, gamma, lambda: lambda_of_gamma(gamma)? })
    }

    pub fn from_lambda(l: usize, lambda: Complex64) -> Result<Self> {
        Self::new(l, gamma_of_lambda(lambda)?)
    }

    pub fn half(&self) -> usize {
        self.l / 2
    }
}

/// Single-particle blocks A, B and the 2L×2L quasi-Hamiltonian M = [[A,B],[-B,-A]].
#[derive(Debug, Clone)]
pub struct QuasiHamiltonian {
    pub a: CMat,
    pub b: CMat,
    pub m: CMat,
    pub s: CMat,
}

/// Quasi-Hamiltonian for any number of sites (odd lengths included).
pub fn quasi_hamiltonian_of_length(len: usize, gamma: Complex64) -> QuasiHamiltonian {
    let mut a = CMat::zeros(len, len);
    let mut b = CMat::zeros(len, len);
    for i in 0..len.saturating_sub(1) {
        a[(i, i + 1)] = c(0.5, 0.0);
        a[(i + 1, i)] = c(0.5, 0.0);
        b[(i, i + 1)] = gamma / 2.0;
        b[(i + 1, i)] = -gamma / 2.0;
    }
    let mut m = CMat::zeros(2 * len, 2 * len);
    m.view_mut((0, 0), (len, len)).copy_from(&a);
    m.view_mut((0, len), (len, len)).copy_from(&b);
    m.view_mut((len, 0), (len, len)).copy_from(&(-&b));
    m.view_mut((len, len), (len, len)).copy_from(&(-&a));
    let r = 1.0 / 2f64.sqrt();
    let s = CMat::from_fn(2 * len, 2 * len, |i, j| {
        let (bi, bj) = (i >= len, j >= len);
        if i % len != j % len {
            ZERO
        } else if bi && bj {
            c(-r, 0.0)
        } else {
            c(r, 0.0)
        }
    });
    QuasiHamiltonian { a, b, m, s }
}

pub fn build_quasi_hamiltonian(spec: &ChainSpec) -> QuasiHamiltonian {
    quasi_hamiltonian_of_length(spec.l, spec.gamma)
}

/// Coefficient c in U_{L/2} - c U_{L/2-1}: λ for mode I, 1/λ for mode II.
pub fn boundary_coefficient(spec: &ChainSpec, mode: Mode) -> Result<Complex64> {
    match mode {
        Mode::I => Ok(spec.lambda),
        Mode::II => {
            if spec.lambda.norm() < 1e-300 {
                Err(Error::LambdaSingular(spec.gamma))
            } else {
                Ok(ONE / spec.lambda)
            }
        }
    }
}

pub fn boundary_polynomial(spec: &ChainSpec, mode: Mode) -> Result<DensePoly> {
    let coef = boundary_coefficient(spec, mode)?;
    let n = spec.half();
    Ok(&chebyshev_u_poly(n) - &chebyshev_u_poly(n - 1).scale(coef))
}

/// ε² as a function of x.
pub fn epsilon_sq_of_x(gamma: Complex64, x: Complex64) -> Complex64 {
    ((ONE - gamma * gamma) * x + ONE + gamma * gamma) / 2.0
}

/// Principal branch: Re ε ≥ 0, ties broken by Im ε ≥ 0.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let mut r = z.sqrt();
    if r.re < 0.0 || (r.re == 0.0 && r.im < 0.0) {
        r = -r;
    }
    r
}

pub fn epsilon_of_x(gamma: Complex64, x: Complex64) -> Complex64 {
    principal_sqrt(epsilon_sq_of_x(gamma, x))
}

pub fn x_of_epsilon(gamma: Complex64, eps: Complex64) -> Result<Complex64> {
    let d = ONE - gamma * gamma;
    if d.norm() < 1e-300 {
        return Err(Error::LambdaSingular(gamma));
    }
    Ok((2.0 * eps * eps - ONE - gamma * gamma) / d)
}

/// A quasi-energy with its family, root x and branch label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub mode: Mode,
    pub epsilon: Complex64,
    pub x: Complex64,
    pub branch_index: usize,
    pub sign: i8,
}

impl SpectralPoint {
    pub fn signed_epsilon(&self) -> Complex64 {
        self.epsilon * self.sign as f64
    }

    pub fn partner(&self) -> SpectralPoint {
        SpectralPoint { sign: -self.sign, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearEpWarning {
    pub mode: Mode,
    pub branches: (usize, usize),
    pub separation: f64,
}

#[derive(Debug, Clone)]
pub struct QuasiEnergies {
    /// Mode I branches 1..L/2 followed by mode II branches 1..L/2.
    pub points: Vec<SpectralPoint>,
    pub near_ep: Vec<NearEpWarning>,
    /// Set when both families share the same boundary polynomial (γ = 0).
    pub modes_coincide: bool,
}

impl QuasiEnergies {
    pub fn of_mode(&self, mode: Mode) -> impl Iterator<Item = &SpectralPoint> {
        self.points.iter().filter(move |p| p.mode == mode)
    }
}

const NEAR_EP_SEPARATION: f64 = 1e-6;

/// Roots of the boundary polynomial of one family, ordered by descending Re ε then Im ε.
pub fn mode_points(spec: &ChainSpec, mode: Mode) -> Result<Vec<SpectralPoint>> {
    if (ONE - spec.gamma * spec.gamma).norm() < 1e-300 {
        return Err(Error::LambdaSingular(spec.gamma));
    }
    let poly = boundary_polynomial(spec, mode)?;
    let xs: Vec<Complex64> = if poly.degree() == 1 {
        vec![-poly.coeffs()[0] / poly.coeffs()[1]]
    } else {
        poly_roots(&poly, DEFAULT_ROOT_TOL)?.roots
    };
    let mut pts: Vec<SpectralPoint> = xs
        .into_iter()
        .map(|x| {
            let eps = epsilon_of_x(spec.gamma, x);
            let epsilon = match mode_vector_raw(spec, mode, eps) {
                Ok((phi, psi)) if eps.norm() >= EPS_ZERO => polish_mode(spec, eps, &phi, &psi).0,
                _ => eps,
            };
            let epsilon = if epsilon.re < 0.0 || (epsilon.re == 0.0 && epsilon.im < 0.0) { -epsilon } else { epsilon };
            SpectralPoint { mode, epsilon, x, branch_index: 0, sign: 1 }
        })
        .collect();
    pts.sort_by(|a, b| {
        (-a.epsilon.re, -a.epsilon.im)
            .partial_cmp(&(-b.epsilon.re, -b.epsilon.im))
            .unwrap()
    });
    for (i, p) in pts.iter_mut().enumerate() {
        p.branch_index = i + 1;
    }
    Ok(pts)
}

pub fn quasi_energies(spec: &ChainSpec) -> Result<QuasiEnergies> {
    let mut points = mode_points(spec, Mode::I)?;
    points.extend(mode_points(spec, Mode::II)?);
    let mut near_ep = Vec::new();
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            if a.mode != b.mode {
                continue;
            }
            let sep = (a.x - b.x).norm();
            if sep < NEAR_EP_SEPARATION * (1.0 + a.x.norm()) {
                near_ep.push(NearEpWarning { mode: a.mode, branches: (a.branch_index, b.branch_index), separation: sep });
            }
        }
    }
    let modes_coincide = (spec.lambda * spec.lambda - ONE).norm() < 1e-14;
    Ok(QuasiEnergies { points, near_ep, modes_coincide })
}

/// Bilinear-normalized single-particle eigenvector of M in the rotated frame:
/// (A+B)φ = εψ, (A-B)ψ = εφ.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    pub mode: Mode,
    pub epsilon: Complex64,
    pub phi: Vec<Complex64>,
    pub psi: Vec<Complex64>,
    pub norm_a: Complex64,
    pub delta: i8,
}

impl ModeVector {
    /// Eigenvector for -ε: (-φ, ψ).
    pub fn partner(&self) -> ModeVector {
        ModeVector {
            epsilon: -self.epsilon,
            phi: self.phi.iter().map(|z| -z).collect(),
            ..self.clone()
        }
    }

    pub fn bilinear_norm(&self) -> Complex64 {
        bdot(&self.phi, &self.phi) + bdot(&self.psi, &self.psi)
    }

    /// Column S[φ;ψ] of the quasi-Hamiltonian eigenbasis.
    pub fn column(&self) -> Vec<Complex64> {
        let r = 1.0 / 2f64.sqrt();
        let up = self.phi.iter().zip(&self.psi).map(|(p, q)| (p + q) * r);
        let down = self.phi.iter().zip(&self.psi).map(|(p, q)| (p - q) * r);
        up.chain(down).collect()
    }
}

/// ‖(A+B)φ - εψ‖ + ‖(A-B)ψ - εφ‖.
pub fn mode_residual(spec: &ChainSpec, phi: &[Complex64], psi: &[Complex64], eps: Complex64) -> f64 {
    let g = spec.gamma;
    let l = spec.l;
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    for i in 0..l {
        // (A±B)_{i,i+1} = (1±γ)/2, (A±B)_{i+1,i} = (1∓γ)/2
        let mut apb = ZERO;
        let mut amb = ZERO;
        if i + 1 < l {
            apb += (ONE + g) / 2.0 * phi[i + 1];
            amb += (ONE - g) / 2.0 * psi[i + 1];
        }
        if i > 0 {
            apb += (ONE - g) / 2.0 * phi[i - 1];
            amb += (ONE + g) / 2.0 * psi[i - 1];
        }
        r1 += (apb - eps * psi[i]).norm_sqr();
        r2 += (amb - eps * phi[i]).norm_sqr();
    }
    r1.sqrt() + r2.sqrt()
}

/// Unnormalized polynomial-form vector for quasi-energy `eps` of family `mode`.
pub fn mode_vector_raw(spec: &ChainSpec, mode: Mode, eps: Complex64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let x = x_of_epsilon(spec.gamma, eps)?;
    let g = spec.gamma;
    let n = spec.half();
    let mut even = vec![ZERO; spec.l];
    let mut odd = vec![ZERO; spec.l];
    let (p, q) = match mode {
        Mode::I => (ONE + g, ONE - g),
        Mode::II => (ONE - g, ONE + g),
    };
    let u: Vec<Complex64> = (0..=n).map(|m| chebyshev_u_eval(m, x)).collect();
    for m in 1..=n {
        even[2 * m - 1] = u[m - 1];
    }
    for m in 0..n {
        let um1 = if m == 0 { ZERO } else { u[m - 1] };
        odd[2 * m] = (p * u[m] + q * um1) / (2.0 * eps);
    }
    Ok(match mode {
        Mode::I => (even, odd),
        Mode::II => (odd, even),
    })
}

/// d/dε of [`mode_vector_raw`], using coefficient-level Chebyshev derivatives.
pub fn mode_vector_raw_derivative(
    spec: &ChainSpec,
    mode: Mode,
    eps: Complex64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let g = spec.gamma;
    let x = x_of_epsilon(g, eps)?;
    let dx = 4.0 * eps / (ONE - g * g);
    let n = spec.half();
    let u: Vec<Complex64> = (0..=n).map(|m| chebyshev_u_eval(m, x)).collect();
    let du: Vec<Complex64> = (0..=n).map(|m| chebyshev_u_poly(m).derivative().eval(x)).collect();
    let (p, q) = match mode {
        Mode::I => (ONE + g, ONE - g),
        Mode::II => (ONE - g, ONE + g),
    };
    let mut even = vec![ZERO; spec.l];
    let mut odd = vec![ZERO; spec.l];
    for m in 1..=n {
        even[2 * m - 1] = du[m - 1] * dx;
    }
    for m in 0..n {
        let (um1, dum1) = if m == 0 { (ZERO, ZERO) } else { (u[m - 1], du[m - 1]) };
        let num = p * u[m] + q * um1;
        let dnum = (p * du[m] + q * dum1) * dx;
        odd[2 * m] = dnum / (2.0 * eps) - num / (2.0 * eps * eps);
    }
    Ok(match mode {
        Mode::I => (even, odd),
        Mode::II => (odd, even),
    })
}

const EPS_ZERO: f64 = 1e-12;
const SELF_ORTHOGONAL: f64 = 1e-14;

fn normalize(
    spec: &ChainSpec,
    mode: Mode,
    eps: Complex64,
    phi: Vec<Complex64>,
    psi: Vec<Complex64>,
    delta: i8,
) -> Result<ModeVector> {
    let s = bdot(&phi, &phi) + bdot(&psi, &psi);
    let euclid = norm2(&phi).powi(2) + norm2(&psi).powi(2);
    if s.norm() <= SELF_ORTHOGONAL * euclid {
        return Err(Error::SelfOrthogonal);
    }
    let _ = spec;
    let norm_a = ONE / s.sqrt();
    Ok(ModeVector {
        mode,
        epsilon: eps,
        phi: phi.into_iter().map(|z| z * norm_a).collect(),
        psi: psi.into_iter().map(|z| z * norm_a).collect(),
        norm_a,
        delta,
    })
}

/// Normalized mode vector from the Chebyshev (polynomial) form.
pub fn mode_vector_poly(spec: &ChainSpec, point: &SpectralPoint) -> Result<ModeVector> {
    if point.epsilon.norm() < EPS_ZERO {
        return Err(Error::EpsilonZero);
    }
    let (phi, psi) = mode_vector_raw(spec, point.mode, point.epsilon)?;
    let (eps, phi, psi) = polish_mode(spec, point.epsilon, &phi, &psi);
    let mv = normalize(spec, point.mode, eps, phi, psi, 1)?;
    Ok(if point.sign < 0 { mv.partner() } else { mv })
}

/// Rayleigh-quotient refinement of (ε, φ, ψ) on K = [[0, A-B], [A+B, 0]].
/// Recovers accuracy lost in ε = √ε² when ε is small; the result keeps the
/// gauge of the input and is returned only if it lowers the residual.
fn polish_mode(spec: &ChainSpec, eps: Complex64, phi: &[Complex64], psi: &[Complex64]) -> (Complex64, Vec<Complex64>, Vec<Complex64>) {
    let l = spec.l;
    let qh = build_quasi_hamiltonian(spec);
    let mut k = CMat::zeros(2 * l, 2 * l);
    k.view_mut((0, l), (l, l)).copy_from(&(&qh.a - &qh.b));
    k.view_mut((l, 0), (l, l)).copy_from(&(&qh.a + &qh.b));
    let w0 = CVec::from_iterator(2 * l, phi.iter().chain(psi).cloned());
    let residual = |e: Complex64, w: &CVec| (&k * w - w * e).norm() / w.norm();
    let mut best = (eps, w0.clone(), residual(eps, &w0));
    let mut w = w0.clone();
    let mut e = eps;
    for _ in 0..3 {
        let wtw = w.dot(&w);
        if wtw.norm() > 1e-8 * w.norm_squared() {
            e = w.dot(&(&k * &w)) / wtw;
        }
        if (e - eps).norm() > 1e-6 * eps.norm().max(1.0) {
            break;
        }
        let shifted = &k - CMat::identity(2 * l, 2 * l) * e;
        let Some(y) = shifted.lu().solve(&w) else { break };
        let overlap = w0.dotc(&y);
        if !overlap.is_finite() || overlap.norm() == 0.0 {
            break;
        }
        w = y * (w0.norm_squared() / overlap);
        let r = residual(e, &w);
        if r < best.2 {
            best = (e, w.clone(), r);
        }
    }
    let (mut e, mut w, _) = best;
    // ±ε are both eigenvalues of K; keep the partner closest to the input
    if (e + eps).norm() < (e - eps).norm() {
        e = -e;
        w.rows_mut(0, l).neg_mut();
    }
    (e, w.rows(0, l).iter().cloned().collect(), w.rows(l, l).iter().cloned().collect())
}

/// Zero-quasi-energy vectors from the null spaces of (A+B) and (A-B)
/// restricted to the family's sublattices. Returns the +0 and -0 columns.
pub fn mode_vector_null(spec: &ChainSpec, mode: Mode) -> Result<(ModeVector, ModeVector)> {
    let qh = build_quasi_hamiltonian(spec);
    let apb = &qh.a + &qh.b;
    let amb = &qh.a - &qh.b;
    let l = spec.l;
    // φ lives on even sites (mode I) or odd sites (mode II); ψ on the complement.
    let phi_sites: Vec<usize> = (0..l).filter(|i| (i % 2 == 1) == (mode == Mode::I)).collect();
    let psi_sites: Vec<usize> = (0..l).filter(|i| (i % 2 == 1) != (mode == Mode::I)).collect();
    let restrict = |m: &CMat, sites: &[usize]| CMat::from_fn(l, sites.len(), |i, j| m[(i, sites[j])]);
    let nphi = null_space(&restrict(&apb, &phi_sites), 1e-10);
    let npsi = null_space(&restrict(&amb, &psi_sites), 1e-10);
    if nphi.ncols() == 0 || npsi.ncols() == 0 {
        return Err(Error::SelfOrthogonal);
    }
    let embed = |v: &CMat, sites: &[usize]| {
        let mut out = vec![ZERO; l];
        for (j, &s) in sites.iter().enumerate() {
            out[s] = v[(j, 0)];
        }
        let nn = bdot(&out, &out);
        if nn.norm() < SELF_ORTHOGONAL {
            return Err(Error::SelfOrthogonal);
        }
        let k = ONE / (2.0 * nn).sqrt();
        Ok(out.into_iter().map(|z| z * k).collect::<Vec<_>>())
    };
    let phi = embed(&nphi, &phi_sites)?;
    let psi = embed(&npsi, &psi_sites)?;
    let plus = ModeVector { mode, epsilon: ZERO, phi, psi, norm_a: ONE, delta: 1 };
    let minus = plus.partner();
    Ok((plus, minus))
}

/// Normalized mode vector from the quasi-momentum form with x = cos 2k.
pub fn mode_vector_trig(spec: &ChainSpec, k: Complex64, mode: Mode) -> Result<ModeVector> {
    if k.sin().norm() < 1e-12 || (2.0 * k).sin().norm() < 1e-12 {
        return Err(Error::DegenerateMomentum);
    }
    let l = spec.l;
    let n = spec.half();
    let eps = epsilon_of_x(spec.gamma, (2.0 * k).cos());
    if eps.norm() < EPS_ZERO {
        return Err(Error::EpsilonZero);
    }
    let build = |delta: f64| {
        let mut even = vec![ZERO; l];
        let mut odd = vec![ZERO; l];
        for m in 1..=n {
            even[2 * m - 1] = (2.0 * m as f64 * k).sin();
        }
        for j in 1..=n {
            odd[2 * j - 2] = ((l as f64 - 2.0 * j as f64 + 2.0) * k).sin();
        }
        match mode {
            Mode::I => (even, odd.into_iter().map(|z| -delta * z).collect::<Vec<_>>()),
            Mode::II => (odd, even.into_iter().map(|z| -delta * z).collect::<Vec<_>>()),
        }
    };
    let scored = [1.0, -1.0].map(|d| {
        let (phi, psi) = build(d);
        let scale = norm2(&phi) + norm2(&psi);
        (mode_residual(spec, &phi, &psi, eps) / scale, d, phi, psi)
    });
    let best = scored
        .into_iter()
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap();
    normalize(spec, mode, eps, best.2, best.3, best.1 as i8)
}

/// sin((L+2)k)/sin(Lk) - c, which vanishes on the quasi-momentum solutions.
pub fn momentum_residual(spec: &ChainSpec, k: Complex64, mode: Mode) -> Result<Complex64> {
    let l = spec.l as f64;
    let slk = (l * k).sin();
    if k.cos().norm() < 1e-12 || ((l + 1.0) * k).cos().norm() < 1e-12 || slk.norm() < 1e-12 {
        return Err(Error::TrigSingular(k));
    }
    Ok(((l + 2.0) * k).sin() / slk - boundary_coefficient(spec, mode)?)
}

/// Quasi-momentum k with cos 2k = x.
pub fn momentum_of_x(x: Complex64) -> Complex64 {
    x.acos() / 2.0
}
