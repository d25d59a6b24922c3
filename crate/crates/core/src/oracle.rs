//! Exact diagonalization of the spin Hamiltonian in the 2^L Kronecker basis
//! (site 1 is the most significant bit, |↑⟩ = bit 0), plus closed forms and
//! Jordan–Wigner realizations of fermionic operators.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::LinearOp;
use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::linalg::{
    c, max_abs, null_space, numerical_rank, schur, spectral_norm, triangular_eigenvectors, CMat, CVec, ONE,
    ZERO,
};

pub const MAX_SITES_MATRIX: usize = 12;
pub const MAX_SITES_VECTORS: usize = 10;
pub const MAX_SITES_OPERATORS: usize = 8;
pub const CLUSTER_TOL: f64 = 1e-7;
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub l: usize,
    pub gamma: Complex64,
    pub matrix: CMat,
}

fn bit(idx: usize, l: usize, site: usize) -> usize {
    (idx >> (l - 1 - site)) & 1
}

/// H = -½ Σ [(1+γ)/2 σˣσˣ + (1-γ)/2 σʸσʸ] on nearest-neighbour bonds.
pub fn build_spin_hamiltonian(spec: &ChainSpec) -> Result<SpinHamiltonian> {
    let l = spec.l;
    if l > MAX_SITES_MATRIX {
        return Err(Error::SizeLimit(l, MAX_SITES_MATRIX));
    }
    let dim = 1usize << l;
    let mut h = CMat::zeros(dim, dim);
    for idx in 0..dim {
        for j in 0..l - 1 {
            let flipped = idx ^ (1 << (l - 1 - j)) ^ (1 << (l - 2 - j));
            // σˣσˣ contributes 1; σʸσʸ contributes -1 on aligned bits, +1 otherwise.
            let amp = if bit(idx, l, j) == bit(idx, l, j + 1) { -spec.gamma / 2.0 } else { c(-0.5, 0.0) };
            h[(flipped, idx)] += amp;
        }
    }
    Ok(SpinHamiltonian { l, gamma: spec.gamma, matrix: h })
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

fn pauli(which: char) -> CMat {
    match which {
        'x' => CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        'y' => CMat::from_row_slice(2, 2, &[ZERO, c(0.0, -1.0), c(0.0, 1.0), ZERO]),
        'z' => CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
        _ => CMat::identity(2, 2),
    }
}

/// Same Hamiltonian assembled from explicit Kronecker products; used as a cross-check.
pub fn build_spin_hamiltonian_kron(spec: &ChainSpec) -> Result<SpinHamiltonian> {
    let l = spec.l;
    if l > MAX_SITES_OPERATORS {
        return Err(Error::SizeLimit(l, MAX_SITES_OPERATORS));
    }
    let dim = 1usize << l;
    let mut h = CMat::zeros(dim, dim);
    let string = |p: char, j: usize| {
        (0..l).fold(CMat::identity(1, 1), |acc, s| {
            kron(&acc, &pauli(if s == j || s == j + 1 { p } else { 'i' }))
        })
    };
    for j in 0..l - 1 {
        h += string('x', j) * ((ONE + spec.gamma) / 2.0) + string('y', j) * ((ONE - spec.gamma) / 2.0);
    }
    Ok(SpinHamiltonian { l, gamma: spec.gamma, matrix: h * c(-0.5, 0.0) })
}

/// Jordan–Wigner annihilator c_j = (Π_{s<j} σᶻ_s) σ⁻_j, with σ⁻|↑⟩ = |↓⟩.
pub fn jw_annihilator(l: usize, j: usize) -> CMat {
    let dim = 1usize << l;
    let mut m = CMat::zeros(dim, dim);
    for idx in 0..dim {
        if bit(idx, l, j) == 0 {
            let parity: usize = (0..j).map(|s| bit(idx, l, s)).sum();
            let sign = if parity.is_multiple_of(2) { 1.0 } else { -1.0 };
            m[(idx | (1 << (l - 1 - j)), idx)] = c(sign, 0.0);
        }
    }
    m
}

/// Matrix of Σ_μ (on_c)_μ c_μ + (on_cdag)_μ c_μ†.
pub fn realize_operator(op: &LinearOp, l: usize) -> Result<CMat> {
    if l > MAX_SITES_OPERATORS {
        return Err(Error::SizeLimit(l, MAX_SITES_OPERATORS));
    }
    let dim = 1usize << l;
    let (a, b) = (op.on_c(), op.on_cdag());
    let mut m = CMat::zeros(dim, dim);
    for mu in 0..l {
        let cm = jw_annihilator(l, mu);
        m += &cm * a[mu] + cm.transpose() * b[mu];
    }
    Ok(m)
}

#[derive(Debug, Clone)]
pub struct EdResult {
    pub eigenvalues: Vec<Complex64>,
    /// Unit-norm right eigenvectors as columns.
    pub eigenvectors: Option<CMat>,
    pub backward_error: f64,
}

/// Complex Schur decomposition, optionally followed by triangular back substitution.
pub fn ed_eigen(h: &CMat, want_vectors: bool) -> Result<EdResult> {
    let dim = h.nrows();
    let limit = if want_vectors { MAX_SITES_VECTORS } else { MAX_SITES_MATRIX };
    if dim > 1 << limit {
        return Err(Error::SizeLimit(dim.trailing_zeros() as usize, limit));
    }
    let (q, t) = schur(h)?;
    let eigenvalues: Vec<Complex64> = (0..dim).map(|i| t[(i, i)]).collect();
    let hnorm = max_abs(h).max(f64::MIN_POSITIVE);
    if !want_vectors {
        let recon = &q * &t * q.adjoint();
        let be = max_abs(&(recon - h)) / hnorm;
        return Ok(EdResult { eigenvalues, eigenvectors: None, backward_error: be });
    }
    let v = &q * triangular_eigenvectors(&t);
    let mut be = 0.0f64;
    for (k, &e) in eigenvalues.iter().enumerate() {
        let r = h * v.column(k) - v.column(k) * e;
        be = be.max(r.norm() / (hnorm * dim as f64));
    }
    Ok(EdResult { eigenvalues, eigenvectors: Some(v), backward_error: be })
}

/// Unit eigenvector for the eigenvalue nearest `energy`, by shifted inverse iteration.
pub fn eigenvector_near(h: &CMat, energy: Complex64, seed: u64) -> Result<CVec> {
    let dim = h.nrows();
    let scale = 1.0 + energy.norm();
    let shift = energy + c(1e-13 * scale, 0.7e-13 * scale);
    let shifted = h - CMat::identity(dim, dim) * shift;
    let lu = shifted.lu();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = CVec::from_fn(dim, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    v /= c(v.norm(), 0.0);
    for _ in 0..4 {
        let mut w = lu.solve(&v).ok_or(Error::EigenNoConvergence)?;
        let n = w.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::EigenNoConvergence);
        }
        w /= c(n, 0.0);
        v = w;
    }
    Ok(v)
}

#[derive(Debug, Clone)]
pub struct ClosedFormVector {
    pub label: String,
    pub energy: Complex64,
    pub vector: CVec,
}

#[derive(Debug, Clone)]
pub struct L4ClosedForm {
    pub gamma: Complex64,
    pub vectors: Vec<ClosedFormVector>,
}

impl L4ClosedForm {
    pub fn energies(&self) -> Vec<Complex64> {
        self.vectors.iter().map(|v| v.energy).collect()
    }
}

/// The sixteen L = 4 eigenvalues in radical form.
pub fn l4_energies(gamma: Complex64) -> Vec<Complex64> {
    let (sp, sm) = l4_roots(gamma);
    let g = gamma;
    let mut e = vec![c(0.5, 0.0), c(-0.5, 0.0), g / 2.0, -g / 2.0];
    for s in [1.0, -1.0] {
        e.push((ONE - g + s * sm) / 4.0);
        e.push((g - ONE + s * sm) / 4.0);
        e.push(-(ONE + g) / 4.0 + s * sp / 4.0);
        e.push((ONE + g) / 4.0 + s * sp / 4.0);
        e.push(s * (sp + sm) / 4.0);
        e.push(s * (sp - sm) / 4.0);
    }
    e
}

/// (√D₊, √D₋) with D± = 5γ² ± 6γ + 5.
pub fn l4_roots(gamma: Complex64) -> (Complex64, Complex64) {
    let g2 = gamma * gamma;
    ((5.0 * g2 + 6.0 * gamma + 5.0).sqrt(), (5.0 * g2 - 6.0 * gamma + 5.0).sqrt())
}

fn vec16(entries: [Complex64; 16]) -> CVec {
    CVec::from_row_slice(&entries)
}

/// Closed-form L = 4 eigenvectors. Fails with `LimitRequired` where a displayed
/// denominator vanishes (γ = ±1 or γ = 0).
pub fn l4_closed_form(gamma: Complex64) -> Result<L4ClosedForm> {
    let g = gamma;
    if (g - ONE).norm() < 1e-12 || (g + ONE).norm() < 1e-12 || g.norm() < 1e-12 {
        return Err(Error::LimitRequired(g));
    }
    let (sp, sm) = l4_roots(g);
    let o = ONE;
    let z = ZERO;
    let mut out = Vec::new();
    let mut push = |label: String, energy: Complex64, vector: CVec| {
        out.push(ClosedFormVector { label, energy, vector });
    };
    push("E=1/2".into(), c(0.5, 0.0), vec16([z, z, z, -o, z, o, z, z, z, z, -o, z, o, z, z, z]));
    push("E=-1/2".into(), c(-0.5, 0.0), vec16([z, z, z, -o, z, -o, z, z, z, z, o, z, o, z, z, z]));
    push("E=g/2".into(), g / 2.0, vec16([-o, z, z, z, z, z, o, z, z, -o, z, z, z, z, z, o]));
    push("E=-g/2".into(), -g / 2.0, vec16([-o, z, z, z, z, z, -o, z, z, o, z, z, z, z, z, o]));
    for (s, tag) in [(1.0, "+"), (-1.0, "-")] {
        let e1 = (g - o + s * sm) / 4.0;
        let a1 = (g - 2.0 * e1) / (g - o);
        let b1 = -a1;
        push(format!("v1{tag}"), e1, vec16([z, -o, a1, z, a1, z, z, o, -o, z, z, b1, z, b1, o, z]));
        let e2 = (o + g + s * sp) / 4.0;
        let a2 = (g - 2.0 * e2) / (g + o);
        let b2 = -a2;
        push(format!("v2{tag}"), e2, vec16([z, o, a2, z, b2, z, z, -o, -o, z, z, b2, z, a2, o, z]));
        let e3 = (o - g + s * sm) / 4.0;
        let a3 = (-g - 2.0 * e3) / (g - o);
        let b3 = (g + 2.0 * e3) / (g - o);
        push(format!("v3{tag}"), e3, vec16([z, -o, a3, z, b3, z, z, -o, o, z, z, a3, z, b3, o, z]));
        let e4 = -(o + g + s * sp) / 4.0;
        let a4 = (-g - 2.0 * e4) / (g + o);
        push(format!("v4{tag}"), e4, vec16([z, o, a4, z, a4, z, z, o, o, z, z, a4, z, a4, o, z]));
    }
    for (eta, s, tag) in [(1.0, 1.0, "++"), (1.0, -1.0, "+-"), (-1.0, 1.0, "-+"), (-1.0, -1.0, "--")] {
        let e = -(eta * sp + s * sm) / 4.0;
        let e3 = e * e * e;
        let cc = (4.0 * e3 - (5.0 * g * g + 8.0) * e) / (6.0 * g);
        let d = -5.0 * g / 4.0 + e * e / g;
        let ee = (-4.0 * e3 + (5.0 * g * g + 2.0) * e) / (3.0 * g);
        push(format!("v5{tag}"), e, vec16([o, z, z, cc, z, d, ee, z, z, ee, d, z, cc, z, z, o]));
    }
    Ok(L4ClosedForm { gamma: g, vectors: out })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenCluster {
    pub value: Complex64,
    pub algebraic: usize,
    pub geometric: usize,
}

/// Cluster eigenvalues within `CLUSTER_TOL` and measure dim ker(H - E).
pub fn geometric_multiplicities(h: &CMat, eigenvalues: &[Complex64]) -> Result<Vec<EigenCluster>> {
    let clusters = cluster_values(eigenvalues, CLUSTER_TOL);
    let mut min_gap = f64::INFINITY;
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            min_gap = min_gap.min((a.0 - b.0).norm());
        }
    }
    if min_gap < 10.0 * CLUSTER_TOL {
        return Err(Error::ClusterAmbiguity(min_gap));
    }
    let dim = h.nrows();
    let scale = spectral_norm(h).max(1.0);
    clusters
        .into_iter()
        .map(|(value, algebraic)| {
            let shifted = h - CMat::identity(dim, dim) * value;
            let s = crate::linalg::singular_values(&shifted);
            let geometric = s.iter().filter(|&&x| x <= RANK_TOL * scale).count();
            Ok(EigenCluster { value, algebraic, geometric })
        })
        .collect()
}

/// Single-linkage clustering; returns centroids with member counts.
pub fn cluster_values(values: &[Complex64], tol: f64) -> Vec<(Complex64, usize)> {
    let mut used = vec![false; values.len()];
    let mut out = Vec::new();
    for i in 0..values.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut members = vec![values[i]];
        let mut k = 0;
        while k < members.len() {
            for j in 0..values.len() {
                if !used[j] && (values[j] - members[k]).norm() <= tol {
                    used[j] = true;
                    members.push(values[j]);
                }
            }
            k += 1;
        }
        out.push((members.iter().sum::<Complex64>() / members.len() as f64, members.len()));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumMatch {
    pub max_distance: f64,
    /// pairing[i] is the index in `b` matched to a[i].
    pub pairing: Vec<usize>,
}

/// Pair two spectra by lexicographic sort, falling back to greedy nearest matching.
pub fn match_spectra(a: &[Complex64], b: &[Complex64], tol: f64) -> Result<SpectrumMatch> {
    if a.len() != b.len() {
        return Err(Error::CardinalityMismatch { expected: a.len(), got: b.len() });
    }
    let key = |z: &Complex64| ((z.re * 1e9).round(), (z.im * 1e9).round());
    let order = |v: &[Complex64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| key(&v[i]).partial_cmp(&key(&v[j])).unwrap());
        idx
    };
    let (oa, ob) = (order(a), order(b));
    let mut pairing = vec![0; a.len()];
    let mut worst = 0.0f64;
    for (i, j) in oa.iter().zip(&ob) {
        pairing[*i] = *j;
        worst = worst.max((a[*i] - b[*j]).norm());
    }
    if worst <= tol {
        return Ok(SpectrumMatch { max_distance: worst, pairing });
    }
    let mut used = vec![false; b.len()];
    let mut greedy = vec![0; a.len()];
    let mut gworst = 0.0f64;
    for &i in &oa {
        let j = (0..b.len())
            .filter(|&j| !used[j])
            .min_by(|&x, &y| (a[i] - b[x]).norm().partial_cmp(&(a[i] - b[y]).norm()).unwrap())
            .unwrap();
        used[j] = true;
        greedy[i] = j;
        gworst = gworst.max((a[i] - b[j]).norm());
    }
    if gworst < worst {
        Ok(SpectrumMatch { max_distance: gworst, pairing: greedy })
    } else {
        Ok(SpectrumMatch { max_distance: worst, pairing })
    }
}

/// Deterministic generic vector in the column span of `basis`.
pub fn generic_combination(basis: &CMat, seed: u64) -> CVec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = CVec::from_fn(basis.ncols(), |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
    let v = basis * coeffs;
    let n = v.norm();
    v / c(n, 0.0)
}

/// Common null space of a set of operators.
pub fn common_kernel(ops: &[&CMat]) -> CMat {
    let dim = ops[0].ncols();
    let stacked = CMat::from_fn(dim * ops.len(), dim, |i, j| ops[i / dim][(i % dim, j)]);
    null_space(&stacked, RANK_TOL)
}

pub fn rank_of_columns(cols: &[CVec]) -> usize {
    if cols.is_empty() {
        return 0;
    }
    numerical_rank(&CMat::from_columns(cols), RANK_TOL)
}


pub use ep_states::{build_ep_states, EpStateCheck, EpStateVerification};

mod ep_states {
    use super::*;
    use crate::ep::{ep_state_catalog, BlockLevel, ColumnTag, JordanDecomposition};

    #[derive(Debug, Clone)]
    pub struct EpStateCheck {
        pub signs: Vec<i8>,
        pub block: BlockLevel,
        pub energy: Complex64,
        pub residual: f64,
        pub norm: f64,
        pub vector: CVec,
    }

    #[derive(Debug, Clone)]
    pub struct EpStateVerification {
        pub states: Vec<EpStateCheck>,
        pub expected: usize,
        pub rank: usize,
        pub omega1_kernel_dim: usize,
        pub omega2_kernel_dim: usize,
        /// dim(span from Ω₁) + dim(span from Ω₂) - dim(total span).
        pub shared: usize,
        /// Centre states built from Ω₁ and from Ω₂ agree up to scale (max deviation).
        pub centre_mismatch: f64,
        /// ‖R_w R_w |Ω₁⟩‖ for the naive operator built from the EP eigenvector.
        pub naive_norm: f64,
        pub max_residual: f64,
    }

    fn right_op(dec: &JordanDecomposition, a: usize) -> LinearOp {
        let n = dec.v.nrows() / 2;
        let row: Vec<Complex64> = dec.v_inv.row(a).iter().cloned().collect();
        LinearOp::from_ladder(&row[..n], &row[n..])
    }

    fn left_op(dec: &JordanDecomposition, a: usize) -> LinearOp {
        let n = dec.v.nrows() / 2;
        let col: Vec<Complex64> = dec.v.column(a).iter().cloned().collect();
        LinearOp::from_ladder(&col[n..], &col[..n])
    }

    fn normalized(v: CVec) -> (CVec, f64) {
        let n = v.norm();
        if n == 0.0 {
            (v, 0.0)
        } else {
            (v / c(n, 0.0), n)
        }
    }

    /// Up to a complex scale, the distance between two unit vectors.
    fn ray_distance(a: &CVec, b: &CVec) -> f64 {
        let ov = a.dotc(b);
        let phase = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        (b - a * phase).norm()
    }

    /// Build every EP eigenstate from the two vacua and check it against H.
    pub fn build_ep_states(dec: &JordanDecomposition, seed: u64) -> Result<EpStateVerification> {
        let spec = dec.ep.spec()?;
        let l = spec.l;
        if l > MAX_SITES_OPERATORS {
            return Err(Error::SizeLimit(l, MAX_SITES_OPERATORS));
        }
        let h = build_spin_hamiltonian(&spec)?.matrix;
        let n2 = 2 * l;
        let rs: Vec<CMat> = (0..n2).map(|a| realize_operator(&right_op(dec, a), l)).collect::<Result<_>>()?;
        let ls: Vec<CMat> = (0..n2).map(|a| realize_operator(&left_op(dec, a), l)).collect::<Result<_>>()?;
        let proj = |a: usize| &ls[a] * &rs[a];
        let cs = dec.chain_start;
        let k1 = common_kernel(&[&ls[cs], &rs[cs + 3]]);
        let k2 = common_kernel(&[&ls[cs + 2], &rs[cs + 1]]);
        if k1.ncols() == 0 || k2.ncols() == 0 {
            return Err(Error::VacuumNotFound(format!("kernel dims {} and {}", k1.ncols(), k2.ncols())));
        }
        let omega1 = generic_combination(&k1, seed);
        let omega2 = generic_combination(&k2, seed.wrapping_add(1));
        let hat_p = proj(cs);
        let tilde_p = proj(cs + 1);
        let hat_m = proj(cs + 2);
        let tilde_m = proj(cs + 3);
        let plus_cols: Vec<usize> = dec
            .tags
            .iter()
            .enumerate()
            .filter(|(_, t)| matches!(t, ColumnTag::Pair { sign: 1, .. }))
            .map(|(i, _)| i)
            .collect();
        let pair_proj: Vec<(CMat, CMat)> = plus_cols.iter().map(|&p| (proj(p), proj(p + 1))).collect();
        let catalog = ep_state_catalog(dec);
        let upper_seed = &hat_p * (&tilde_p * &omega1);
        let centre1 = &hat_m * &omega1;
        let centre2 = &hat_p * &omega2;
        let lower_seed = &hat_m * (&tilde_m * &omega2);
        let dressed = |signs: &[i8], v: &CVec| {
            signs.iter().zip(&pair_proj).fold(v.clone(), |acc, (&s, (pp, pm))| if s > 0 { pp * acc } else { pm * acc })
        };
        let mut states = Vec::with_capacity(catalog.states.len());
        let mut from1 = Vec::new();
        let mut from2 = Vec::new();
        let mut centre_mismatch = 0.0f64;
        for st in &catalog.states {
            let raw = match st.block {
                BlockLevel::Upper => dressed(&st.signs, &upper_seed),
                BlockLevel::Center => dressed(&st.signs, &centre1),
                BlockLevel::Lower => dressed(&st.signs, &lower_seed),
            };
            let (v, norm) = normalized(raw);
            let residual = if norm > 0.0 { (&h * &v - &v * st.energy).norm() } else { f64::INFINITY };
            match st.block {
                BlockLevel::Upper => from1.push(v.clone()),
                BlockLevel::Lower => from2.push(v.clone()),
                BlockLevel::Center => {
                    let (alt, _) = normalized(dressed(&st.signs, &centre2));
                    centre_mismatch = centre_mismatch.max(ray_distance(&v, &alt));
                    from1.push(v.clone());
                    from2.push(alt);
                }
            }
            states.push(EpStateCheck { signs: st.signs.clone(), block: st.block, energy: st.energy, residual, norm, vector: v });
        }
        let all: Vec<CVec> = states.iter().map(|s| s.vector.clone()).collect();
        let rank = rank_of_columns(&all);
        let shared = rank_of_columns(&from1) + rank_of_columns(&from2) - rank;
        let w = dec.v.column(cs).clone_owned();
        let wn = w.norm();
        let naive = realize_operator(&right_op_from_column(&(w / c(wn, 0.0))), l)?;
        let naive_norm = (&naive * (&naive * &omega1)).norm();
        let max_residual = states.iter().map(|s| s.residual).fold(0.0, f64::max);
        Ok(EpStateVerification {
            expected: catalog.states.len(),
            states,
            rank,
            omega1_kernel_dim: k1.ncols(),
            omega2_kernel_dim: k2.ncols(),
            shared,
            centre_mismatch,
            naive_norm,
            max_residual,
        })
    }

    /// The diagonalizable-case annihilator R = vᵀC built from a single column v.
    fn right_op_from_column(v: &CVec) -> LinearOp {
        let n = v.len() / 2;
        let s: Vec<Complex64> = v.iter().cloned().collect();
        LinearOp::from_ladder(&s[..n], &s[n..])
    }
}
