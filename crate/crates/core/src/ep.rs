//! Exceptional points: location via the resultant Res_x(P, ∂P/∂x), Jordan
//! chains of the quasi-Hamiltonian and the many-body state catalog at an EP.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chain::{
    build_quasi_hamiltonian, epsilon_of_x, gamma_of_lambda, momentum_of_x, momentum_residual,
    mode_points, mode_vector_poly, mode_vector_raw, mode_vector_raw_derivative, principal_sqrt,
    quasi_hamiltonian_of_length, ChainSpec, Mode, ModeVector, SpectralPoint,
};
use crate::error::{Error, Result};
use crate::linalg::{bdot, condition_number, inverse, max_abs, norm2, schur, CMat, CVec, ONE, ZERO};
use crate::polyalg::{
    chebyshev_u, poly_roots, resultant_eliminate_x, DensePoly, IntBivarPoly, IntPoly, DEFAULT_ROOT_TOL,
};

/// P(x, λ) = U_{L/2}(x) - λ U_{L/2-1}(x) with integer coefficients.
pub fn boundary_bivariate(l: usize) -> IntBivarPoly {
    let n = l / 2;
    let un = chebyshev_u(n);
    let um = chebyshev_u(n - 1);
    let zero = num_bigint::BigInt::from(0);
    let coeffs = (0..=n)
        .map(|i| {
            let a = un.coeffs().get(i).cloned().unwrap_or(zero.clone());
            let b = um.coeffs().get(i).cloned().unwrap_or(zero.clone());
            IntPoly::new(vec![a, -b])
        })
        .collect();
    IntBivarPoly::new(coeffs)
}

/// Primitive part of Res_x(P, ∂P/∂x) as a polynomial in λ.
pub fn ep_resultant(l: usize) -> IntPoly {
    let p = boundary_bivariate(l);
    resultant_eliminate_x(&p, &p.derivative_x()).primitive()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpResiduals {
    /// |P(x_EP)| at γ_EP.
    pub boundary: f64,
    /// |∂P/∂x (x_EP)| at γ_EP.
    pub derivative: f64,
    /// Quasi-momentum form residual, when the trigonometric form is regular.
    pub momentum: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpRecord {
    pub l: usize,
    pub mode: Mode,
    pub gamma: Complex64,
    pub lambda: Complex64,
    pub epsilon: Complex64,
    pub x: Complex64,
    pub residuals: EpResiduals,
}

impl EpRecord {
    pub fn spec(&self) -> Result<ChainSpec> {
        ChainSpec::new(self.l, self.gamma)
    }
}

struct Boundary {
    un: DensePoly,
    um: DensePoly,
}

impl Boundary {
    fn new(l: usize) -> Self {
        let n = l / 2;
        Boundary { un: chebyshev_u(n).to_dense(), um: chebyshev_u(n - 1).to_dense() }
    }

    fn p(&self, lambda: Complex64) -> DensePoly {
        &self.un - &self.um.scale(lambda)
    }
}

/// Newton on (P, ∂P/∂x) = 0 in the unknowns (x, λ).
fn polish(b: &Boundary, mut x: Complex64, mut lambda: Complex64) -> (Complex64, Complex64) {
    let dun = b.un.derivative();
    let dum = b.um.derivative();
    let ddun = dun.derivative();
    let ddum = dum.derivative();
    for _ in 0..50 {
        let f1 = b.un.eval(x) - lambda * b.um.eval(x);
        let f2 = dun.eval(x) - lambda * dum.eval(x);
        let j11 = f2;
        let j12 = -b.um.eval(x);
        let j21 = ddun.eval(x) - lambda * ddum.eval(x);
        let j22 = -dum.eval(x);
        let det = j11 * j22 - j12 * j21;
        if det.norm() == 0.0 {
            break;
        }
        let dx = (f1 * j22 - j12 * f2) / det;
        let dl = (j11 * f2 - j21 * f1) / det;
        x -= dx;
        lambda -= dl;
        if dx.norm() + dl.norm() < 1e-16 * (1.0 + x.norm() + lambda.norm()) {
            break;
        }
    }
    (x, lambda)
}

fn record(l: usize, mode: Mode, gamma: Complex64, lambda: Complex64, x: Complex64) -> Result<EpRecord> {
    let spec = ChainSpec::new(l, gamma)?;
    let b = Boundary::new(l);
    let coef = match mode {
        Mode::I => lambda,
        Mode::II => ONE / lambda,
    };
    let p = b.p(coef);
    let momentum = momentum_residual(&spec, momentum_of_x(x), mode).ok().map(|r| r.norm());
    Ok(EpRecord {
        l,
        mode,
        gamma,
        lambda,
        epsilon: epsilon_of_x(gamma, x),
        x,
        residuals: EpResiduals { boundary: p.eval(x).norm(), derivative: p.derivative().eval(x).norm(), momentum },
    })
}

/// All EPs of one family for chain length `l`, ordered by descending |γ|
/// and then descending Im γ.
pub fn locate_eps(l: usize, mode: Mode) -> Result<Vec<EpRecord>> {
    if l < 2 || !l.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("chain length must be even and >= 2, got {l}")));
    }
    if l == 2 {
        return Ok(Vec::new());
    }
    let res = ep_resultant(l).to_dense();
    let b = Boundary::new(l);
    let lambdas = if res.degree() == 0 { Vec::new() } else { poly_roots(&res, DEFAULT_ROOT_TOL)?.roots };
    let mut out = Vec::with_capacity(lambdas.len());
    for lam0 in lambdas {
        let p = b.p(lam0);
        let dp = p.derivative();
        let cands = if dp.degree() == 0 { vec![ZERO] } else { poly_roots(&dp, DEFAULT_ROOT_TOL)?.roots };
        let x0 = cands
            .into_iter()
            .min_by(|a, c| p.eval(*a).norm().partial_cmp(&p.eval(*c).norm()).unwrap())
            .unwrap();
        let (x, lam_i) = polish(&b, x0, lam0);
        let gamma_i = gamma_of_lambda(lam_i)?;
        let rec = match mode {
            Mode::I => record(l, mode, gamma_i, lam_i, x)?,
            Mode::II => record(l, mode, -gamma_i, ONE / lam_i, x)?,
        };
        out.push(rec);
    }
    let key = |r: &EpRecord| (-(r.gamma.norm() * 1e9).round(), -r.gamma.im);
    out.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
    Ok(out)
}

/// EPs for L = 4, 6, ..., l_max, both families; mode I rows precede mode II for each L.
pub fn ep_table(l_max: usize) -> Result<Vec<EpRecord>> {
    let ls: Vec<usize> = (4..=l_max).step_by(2).collect();
    let per_l: Vec<Result<Vec<EpRecord>>> = ls
        .par_iter()
        .map(|&l| {
            let mut v = locate_eps(l, Mode::I)?;
            v.extend(locate_eps(l, Mode::II)?);
            Ok(v)
        })
        .collect();
    let mut out = Vec::new();
    for r in per_l {
        out.extend(r?);
    }
    Ok(out)
}

/// Multiplicity of x_EP among the roots of the boundary polynomial at γ_EP.
pub fn ep_root_multiplicity(ep: &EpRecord) -> Result<usize> {
    let spec = ep.spec()?;
    let p = crate::chain::boundary_polynomial(&spec, ep.mode)?;
    let roots = poly_roots(&p, DEFAULT_ROOT_TOL)?;
    Ok(roots.roots.iter().filter(|r| (*r - ep.x).norm() < 1e-6 * (1.0 + ep.x.norm())).count())
}

/// Eigenvector w and generalized vector g of one 2×2 Jordan block, as full
/// 2L columns with wᵀg = 1 and gᵀg = 0.
#[derive(Debug, Clone)]
pub struct JordanChain {
    pub mode: Mode,
    pub sign: i8,
    pub epsilon: Complex64,
    pub eigenvector: CVec,
    pub generalized: CVec,
    pub beta: Complex64,
    pub chain_residual: f64,
}

const CHAIN_TOL: f64 = 1e-7;

fn rotated_to_column(phi: &[Complex64], psi: &[Complex64]) -> CVec {
    let r = 1.0 / 2f64.sqrt();
    let l = phi.len();
    CVec::from_fn(2 * l, |i, _| if i < l { (phi[i] + psi[i]) * r } else { (phi[i - l] - psi[i - l]) * r })
}

fn chain_residual(m: &CMat, e: Complex64, w: &CVec, g: &CVec) -> f64 {
    (m * g - g * e - w).norm() / w.norm()
}

/// Jordan chain of the block at `sign · ε_EP`, from the analytic ε-derivative of
/// the polynomial-form mode vector. The generalized vector is fixed by gᵀg = 0.
pub fn generalized_eigenvector(ep: &EpRecord, sign: i8) -> Result<JordanChain> {
    let spec = ep.spec()?;
    let e = ep.epsilon * sign as f64;
    let (phi, psi) = mode_vector_raw(&spec, ep.mode, e)?;
    let (dphi, dpsi) = mode_vector_raw_derivative(&spec, ep.mode, e)?;
    let mut w = rotated_to_column(&phi, &psi);
    let mut g = rotated_to_column(&dphi, &dpsi);
    let wg = bdot(w.as_slice(), g.as_slice());
    if wg.norm() < 1e-300 {
        return Err(Error::ChainResidualTooLarge(f64::INFINITY));
    }
    let k = ONE / wg.sqrt();
    w *= k;
    g *= k;
    let beta = -bdot(g.as_slice(), g.as_slice()) / 2.0;
    g += &w * beta;
    let m = build_quasi_hamiltonian(&spec).m;
    let res = chain_residual(&m, e, &w, &g);
    if !(res <= CHAIN_TOL) {
        return Err(Error::ChainResidualTooLarge(res));
    }
    Ok(JordanChain { mode: ep.mode, sign, epsilon: e, eigenvector: w, generalized: g, beta, chain_residual: res })
}

#[derive(Debug, Clone)]
pub struct KernelChain {
    pub generalized: CVec,
    /// Norm of the components outside the family's sublattice pattern.
    pub off_parity: f64,
    pub chain_residual: f64,
}

/// Same generalized vector from a minimum-norm solve of (M - εI)g = w,
/// then moved into the self-orthogonal gauge.
pub fn generalized_eigenvector_kernel(ep: &EpRecord, chain: &JordanChain) -> Result<KernelChain> {
    let spec = ep.spec()?;
    let m = build_quasi_hamiltonian(&spec).m;
    let n2 = m.nrows();
    let shifted = &m - CMat::identity(n2, n2) * chain.epsilon;
    let svd = shifted.svd(true, true);
    let smax = svd.singular_values.max();
    let mut g = svd
        .solve(&chain.eigenvector, 1e-10 * smax)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    let wg = bdot(chain.eigenvector.as_slice(), g.as_slice());
    let alpha = -bdot(g.as_slice(), g.as_slice()) / (2.0 * wg);
    g += &chain.eigenvector * alpha;
    let l = spec.l;
    let r = 1.0 / 2f64.sqrt();
    // φ = (top + bottom)/√2, ψ = (top - bottom)/√2; mode I keeps φ on even sites.
    let mut off = 0.0;
    for i in 0..l {
        let phi = (g[i] + g[l + i]) * r;
        let psi = (g[i] - g[l + i]) * r;
        let phi_on = (i % 2 == 1) == (ep.mode == Mode::I);
        off += if phi_on { psi.norm_sqr() } else { phi.norm_sqr() };
    }
    let res = chain_residual(&m, chain.epsilon, &chain.eigenvector, &g);
    Ok(KernelChain { generalized: g, off_parity: off.sqrt(), chain_residual: res })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnTag {
    Pair { mode: Mode, branch: usize, sign: i8 },
    Chain { mode: Mode, sign: i8, generalized: bool },
}

#[derive(Debug, Clone)]
pub struct JordanDecomposition {
    pub ep: EpRecord,
    pub v: CMat,
    pub v_inv: CMat,
    pub j: CMat,
    pub tags: Vec<ColumnTag>,
    /// Quasi-energies of the L-2 non-degenerate modes, in column-pair order.
    pub other_modes: Vec<SpectralPoint>,
    /// Index of the first chain column (w₊).
    pub chain_start: usize,
    pub residual: f64,
    pub condition: f64,
}

const MAX_CONDITION: f64 = 1e10;

/// Non-degenerate quasi-energies of the EP family: roots of P/(x - x_EP)².
fn deflated_points(spec: &ChainSpec, ep: &EpRecord) -> Result<Vec<SpectralPoint>> {
    let p = crate::chain::boundary_polynomial(spec, ep.mode)?;
    let q = p.deflate(ep.x).deflate(ep.x);
    let xs = if q.degree() == 0 { Vec::new() } else { poly_roots(&q, DEFAULT_ROOT_TOL)?.roots };
    let mut pts: Vec<SpectralPoint> = xs
        .into_iter()
        .map(|x| SpectralPoint { mode: ep.mode, epsilon: epsilon_of_x(spec.gamma, x), x, branch_index: 0, sign: 1 })
        .collect();
    pts.sort_by(|a, b| (-a.epsilon.re, -a.epsilon.im).partial_cmp(&(-b.epsilon.re, -b.epsilon.im)).unwrap());
    for (i, p) in pts.iter_mut().enumerate() {
        p.branch_index = i + 1;
    }
    Ok(pts)
}

pub fn jordan_decomposition(ep: &EpRecord) -> Result<JordanDecomposition> {
    let spec = ep.spec()?;
    let l = spec.l;
    let n2 = 2 * l;
    let mut cols: Vec<CVec> = Vec::with_capacity(n2);
    let mut tags = Vec::with_capacity(n2);
    let mut diag: Vec<Complex64> = Vec::with_capacity(n2);
    let mut others = Vec::new();
    let mut chain_start = 0;
    for mode in [Mode::I, Mode::II] {
        let pts = if mode == ep.mode { deflated_points(&spec, ep)? } else { mode_points(&spec, mode)? };
        for p in &pts {
            let mv: ModeVector = mode_vector_poly(&spec, p)?;
            for s in [1i8, -1] {
                let v = if s > 0 { mv.clone() } else { mv.partner() };
                cols.push(CVec::from_vec(v.column()));
                tags.push(ColumnTag::Pair { mode, branch: p.branch_index, sign: s });
                diag.push(v.epsilon);
            }
            others.push(*p);
        }
        if mode == ep.mode {
            chain_start = cols.len();
            for s in [1i8, -1] {
                let ch = generalized_eigenvector(ep, s)?;
                cols.push(ch.eigenvector.clone());
                cols.push(ch.generalized.clone());
                tags.push(ColumnTag::Chain { mode, sign: s, generalized: false });
                tags.push(ColumnTag::Chain { mode, sign: s, generalized: true });
                diag.push(ch.epsilon);
                diag.push(ch.epsilon);
            }
        }
    }
    let v = CMat::from_columns(&cols);
    let mut j = CMat::from_diagonal(&CVec::from_vec(diag));
    j[(chain_start, chain_start + 1)] = ONE;
    j[(chain_start + 2, chain_start + 3)] = ONE;
    let condition = condition_number(&v);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularVep(condition));
    }
    let v_inv = inverse(&v)?;
    let m = build_quasi_hamiltonian(&spec).m;
    let residual = max_abs(&(&m * &v - &v * &j)) / max_abs(&m);
    let _ = n2;
    Ok(JordanDecomposition { ep: *ep, v, v_inv, j, tags, other_modes: others, chain_start, residual, condition })
}

impl JordanDecomposition {
    /// max |(V J V⁻¹ - M)_ij| / max |M_ij|.
    pub fn reconstruction_residual(&self) -> Result<f64> {
        let spec = self.ep.spec()?;
        let m = build_quasi_hamiltonian(&spec).m;
        Ok(max_abs(&(&self.v * &self.j * &self.v_inv - &m)) / max_abs(&m))
    }

    /// Deviation of VᵀV from the identity with [[0,1],[1,0]] on each chain pair.
    pub fn structured_orthogonality(&self) -> f64 {
        let n = self.v.ncols();
        let mut expect = CMat::identity(n, n);
        for k in [self.chain_start, self.chain_start + 2] {
            expect[(k, k)] = ZERO;
            expect[(k + 1, k + 1)] = ZERO;
            expect[(k, k + 1)] = ONE;
            expect[(k + 1, k)] = ONE;
        }
        max_abs(&(self.v.transpose() * &self.v - expect))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BlockLevel {
    Upper,
    Center,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VacuumTag {
    Omega1,
    Omega2,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapClass {
    Omega1Only,
    Omega2Only,
    Shared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpState {
    /// ±1 for each of the L-2 non-degenerate modes.
    pub signs: Vec<i8>,
    pub block: BlockLevel,
    pub energy: Complex64,
    pub vacuum: VacuumTag,
    pub class: OverlapClass,
    /// The naive (diagonalizable) construction gives the zero vector here.
    pub naive_vanishes: bool,
}

#[derive(Debug, Clone)]
pub struct EpStateCatalog {
    pub epsilon_ep: Complex64,
    pub other_epsilons: Vec<Complex64>,
    pub states: Vec<EpState>,
}

/// Enumerate the 3·2^(L-2) eigenstates at an EP.
pub fn ep_state_catalog(dec: &JordanDecomposition) -> EpStateCatalog {
    let eps_ep = dec.ep.epsilon;
    let others: Vec<Complex64> = dec.other_modes.iter().map(|p| p.epsilon).collect();
    let k = others.len();
    let mut states = Vec::with_capacity(3 << k);
    for bits in 0..1u64 << k {
        let signs: Vec<i8> = (0..k).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
        let base: Complex64 = others.iter().zip(&signs).map(|(e, &s)| e * s as f64).sum::<Complex64>() / 2.0;
        for (block, shift, vacuum, class, naive) in [
            (BlockLevel::Upper, eps_ep, VacuumTag::Omega1, OverlapClass::Omega1Only, true),
            (BlockLevel::Center, ZERO, VacuumTag::Both, OverlapClass::Shared, false),
            (BlockLevel::Lower, -eps_ep, VacuumTag::Omega2, OverlapClass::Omega2Only, false),
        ] {
            states.push(EpState { signs: signs.clone(), block, energy: base + shift, vacuum, class, naive_vanishes: naive });
        }
    }
    EpStateCatalog { epsilon_ep: eps_ep, other_epsilons: others, states }
}

/// Lowest-Re many-body energy at the EP: all modes empty and the lower block level.
pub fn ep_ground_energy(dec: &JordanDecomposition) -> Complex64 {
    -dec.other_modes.iter().map(|p| p.epsilon).sum::<Complex64>() / 2.0 - dec.ep.epsilon
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfChainReport {
    /// min over eigenvalues μ of the L/2-site quasi-Hamiltonian of |μ ∓ ε_EP|.
    pub min_distance: f64,
    /// Smallest singular value of (M - ε_EP) restricted to the off-parity subspace.
    pub restricted_sigma_min: f64,
}

/// Checks that ±ε_EP is not in the spectrum of the half-length chain, which
/// forces the off-parity part of the generalized vector to vanish.
pub fn half_chain_disjointness(ep: &EpRecord) -> Result<HalfChainReport> {
    let half = ep.l / 2;
    let mh = quasi_hamiltonian_of_length(half, ep.gamma).m;
    let (_, t) = schur(&mh)?;
    let mut min_distance = f64::INFINITY;
    for i in 0..t.nrows() {
        let mu = t[(i, i)];
        min_distance = min_distance.min((mu - ep.epsilon).norm()).min((mu + ep.epsilon).norm());
    }
    let spec = ep.spec()?;
    let qh = build_quasi_hamiltonian(&spec);
    let l = spec.l;
    // Off-parity block in the rotated frame: φ on the complementary sublattice.
    let phi_sites: Vec<usize> = (0..l).filter(|i| (i % 2 == 1) != (ep.mode == Mode::I)).collect();
    let psi_sites: Vec<usize> = (0..l).filter(|i| (i % 2 == 1) == (ep.mode == Mode::I)).collect();
    let apb = &qh.a + &qh.b;
    let amb = &qh.a - &qh.b;
    let np = phi_sites.len();
    let nq = psi_sites.len();
    // rows: (A-B)ψ - εφ on φ-sites, (A+B)φ - εψ on ψ-sites
    let mut sys = CMat::zeros(np + nq, np + nq);
    for (r, &i) in phi_sites.iter().enumerate() {
        sys[(r, r)] = -ep.epsilon;
        for (cidx, &j) in psi_sites.iter().enumerate() {
            sys[(r, np + cidx)] = amb[(i, j)];
        }
    }
    for (r, &i) in psi_sites.iter().enumerate() {
        sys[(np + r, np + r)] = -ep.epsilon;
        for (cidx, &j) in phi_sites.iter().enumerate() {
            sys[(np + r, cidx)] = apb[(i, j)];
        }
    }
    let s = crate::linalg::singular_values(&sys);
    Ok(HalfChainReport { min_distance, restricted_sigma_min: s.last().cloned().unwrap_or(0.0) })
}

/// |ε_EP| principal-branch sanity: ε_EP² from x_EP.
pub fn epsilon_from_record(ep: &EpRecord) -> Complex64 {
    principal_sqrt(crate::chain::epsilon_sq_of_x(ep.gamma, ep.x))
}

/// Euclidean norm of a vector slice, for reports.
pub fn vector_norm(v: &CVec) -> f64 {
    norm2(v.as_slice())
}
