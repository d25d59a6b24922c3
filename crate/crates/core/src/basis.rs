//! Biorthogonal quasiparticle basis, fermionic operator families and the
//! many-body spectrum built from quasi-energies.

use num_complex::Complex64;

use crate::chain::{
    build_quasi_hamiltonian, mode_vector_null, mode_vector_poly, quasi_energies, ChainSpec, Mode,
    ModeVector, SpectralPoint,
};
use crate::error::{Error, Result};
use crate::linalg::{bdot, max_abs, CMat, ONE, ZERO};

const ORTHOGONALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct BiorthogonalBasis {
    pub spec: ChainSpec,
    /// Columns: mode I (+ε₁, -ε₁, +ε₂, ...) then mode II in the same layout.
    pub v: CMat,
    pub v_inv: CMat,
    pub lambda: Vec<Complex64>,
    pub columns: Vec<ModeVector>,
    pub orthogonality_residual: f64,
    pub diagonalization_residual: f64,
}

/// Assemble V from L/2 positive-branch vectors per family (mode I first).
pub fn assemble_basis(spec: &ChainSpec, modes: &[ModeVector]) -> Result<BiorthogonalBasis> {
    if modes.len() != spec.l {
        return Err(Error::CardinalityMismatch { expected: spec.l, got: modes.len() });
    }
    let mut ordered: Vec<&ModeVector> = modes.iter().filter(|m| m.mode == Mode::I).collect();
    ordered.extend(modes.iter().filter(|m| m.mode == Mode::II));
    let mut columns = Vec::with_capacity(2 * spec.l);
    for m in ordered {
        columns.push(m.clone());
        columns.push(m.partner());
    }
    let n2 = 2 * spec.l;
    let cols: Vec<Vec<Complex64>> = columns.iter().map(|m| m.column()).collect();
    let v = CMat::from_fn(n2, n2, |i, j| cols[j][i]);
    let v_inv = v.transpose();
    let orth = max_abs(&(&v_inv * &v - CMat::identity(n2, n2)));
    if !(orth <= ORTHOGONALITY_TOL) {
        return Err(Error::DefectiveBasis(orth));
    }
    let lambda: Vec<Complex64> = columns.iter().map(|m| m.epsilon).collect();
    let qh = build_quasi_hamiltonian(spec);
    let vl = CMat::from_fn(n2, n2, |i, j| v[(i, j)] * lambda[j]);
    let diag = max_abs(&(&qh.m * &v - vl)) / max_abs(&qh.m);
    Ok(BiorthogonalBasis {
        spec: *spec,
        v,
        v_inv,
        lambda,
        columns,
        orthogonality_residual: orth,
        diagonalization_residual: diag,
    })
}

impl BiorthogonalBasis {
    pub fn from_spec(spec: &ChainSpec) -> Result<Self> {
        let q = quasi_energies(spec)?;
        let modes = q
            .points
            .iter()
            .map(|p| match mode_vector_poly(spec, p) {
                Err(Error::EpsilonZero) => mode_vector_null(spec, p.mode).map(|(plus, _)| plus),
                other => other,
            })
            .collect::<Result<Vec<_>>>()?;
        assemble_basis(spec, &modes)
    }

    /// max |(V Λ V⁻¹ - M)_ij| / max |M_ij|.
    pub fn reconstruction_residual(&self) -> f64 {
        let qh = build_quasi_hamiltonian(&self.spec);
        let n = self.v.ncols();
        let vl = CMat::from_fn(n, n, |i, j| self.v[(i, j)] * self.lambda[j]);
        max_abs(&(vl * &self.v_inv - &qh.m)) / max_abs(&qh.m)
    }

    pub fn operators(&self) -> OperatorCoefficients {
        OperatorCoefficients::from_matrices(&self.v, &self.v_inv)
    }
}

/// Linear fermionic operator Σ p_μ (c_μ + c_μ†) + q_μ (c_μ - c_μ†).
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOp {
    pub plus: Vec<Complex64>,
    pub minus: Vec<Complex64>,
}

impl LinearOp {
    /// From coefficients on c_μ and c_μ†.
    pub fn from_ladder(on_c: &[Complex64], on_cdag: &[Complex64]) -> Self {
        LinearOp {
            plus: on_c.iter().zip(on_cdag).map(|(a, b)| (a + b) / 2.0).collect(),
            minus: on_c.iter().zip(on_cdag).map(|(a, b)| (a - b) / 2.0).collect(),
        }
    }

    pub fn on_c(&self) -> Vec<Complex64> {
        self.plus.iter().zip(&self.minus).map(|(p, q)| p + q).collect()
    }

    pub fn on_cdag(&self) -> Vec<Complex64> {
        self.plus.iter().zip(&self.minus).map(|(p, q)| p - q).collect()
    }
}

/// {X, Y} = 2(p·p' - q·q').
pub fn anticommutator(x: &LinearOp, y: &LinearOp) -> Complex64 {
    2.0 * (bdot(&x.plus, &y.plus) - bdot(&x.minus, &y.minus))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorFamily {
    R,
    RStar,
    LStar,
    L,
}

impl OperatorFamily {
    pub const ALL: [OperatorFamily; 4] =
        [OperatorFamily::R, OperatorFamily::RStar, OperatorFamily::LStar, OperatorFamily::L];

    pub fn mode(self) -> Mode {
        match self {
            OperatorFamily::R | OperatorFamily::LStar => Mode::I,
            OperatorFamily::RStar | OperatorFamily::L => Mode::II,
        }
    }

    fn is_left(self) -> bool {
        matches!(self, OperatorFamily::LStar | OperatorFamily::L)
    }
}

/// R = V⁻¹C split by family; L* and L are the columns of V acting on C†.
#[derive(Debug, Clone)]
pub struct OperatorCoefficients {
    pub r: Vec<LinearOp>,
    pub r_star: Vec<LinearOp>,
    pub l_star: Vec<LinearOp>,
    pub l: Vec<LinearOp>,
}

impl OperatorCoefficients {
    pub fn from_matrices(v: &CMat, v_inv: &CMat) -> Self {
        let n = v.nrows() / 2;
        let right = |a: usize| {
            let row: Vec<Complex64> = v_inv.row(a).iter().cloned().collect();
            LinearOp::from_ladder(&row[..n], &row[n..])
        };
        let left = |a: usize| {
            let col: Vec<Complex64> = v.column(a).iter().cloned().collect();
            LinearOp::from_ladder(&col[n..], &col[..n])
        };
        OperatorCoefficients {
            r: (0..n).map(right).collect(),
            r_star: (n..2 * n).map(right).collect(),
            l_star: (0..n).map(left).collect(),
            l: (n..2 * n).map(left).collect(),
        }
    }

    pub fn family(&self, f: OperatorFamily) -> &[LinearOp] {
        match f {
            OperatorFamily::R => &self.r,
            OperatorFamily::RStar => &self.r_star,
            OperatorFamily::LStar => &self.l_star,
            OperatorFamily::L => &self.l,
        }
    }

    /// Largest deviation from the expected anticommutation table.
    pub fn max_table_deviation(&self) -> f64 {
        let n = self.r.len();
        let mut worst = 0.0f64;
        for fa in OperatorFamily::ALL {
            for fb in OperatorFamily::ALL {
                for i in 1..=n {
                    for j in 1..=n {
                        let got = anticommutator(&self.family(fa)[i - 1], &self.family(fb)[j - 1]);
                        worst = worst.max((got - expected_anticommutator(fa, i, fb, j)).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Anticommutator table for a diagonalizable point (indices 1-based within a family).
pub fn expected_anticommutator(fa: OperatorFamily, i: usize, fb: OperatorFamily, j: usize) -> Complex64 {
    if fa.mode() != fb.mode() {
        return ZERO;
    }
    if fa.is_left() != fb.is_left() {
        return if i == j { ONE } else { ZERO };
    }
    if fa == fb && i != j && i.div_ceil(2) == j.div_ceil(2) {
        -ONE
    } else {
        ZERO
    }
}

/// α_{I,1..L/2} then α_{II,1..L/2}; bit set means +ε.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OccupationPattern {
    pub bits: u64,
    pub len: usize,
}

impl OccupationPattern {
    pub fn sign(&self, k: usize) -> f64 {
        if self.bits >> k & 1 == 1 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn ground(len: usize) -> Self {
        Self { bits: 0, len }
    }
}

#[derive(Debug, Clone)]
pub struct ManyBodySpectrum {
    pub patterns: Vec<OccupationPattern>,
    pub energies: Vec<Complex64>,
}

impl ManyBodySpectrum {
    pub fn from_epsilons(eps: &[Complex64]) -> Self {
        let len = eps.len();
        let patterns: Vec<OccupationPattern> =
            (0..1u64 << len).map(|bits| OccupationPattern { bits, len }).collect();
        let energies = patterns
            .iter()
            .map(|p| eps.iter().enumerate().map(|(k, e)| e * p.sign(k)).sum::<Complex64>() / 2.0)
            .collect();
        Self { patterns, energies }
    }

    /// Uses the +ε column of each pair in the basis.
    pub fn from_basis(basis: &BiorthogonalBasis) -> Self {
        let eps: Vec<Complex64> = basis.lambda.iter().step_by(2).cloned().collect();
        Self::from_epsilons(&eps)
    }
}

/// E = ½ Σ_k α_k ε_k over all 2^L occupation patterns.
pub fn many_body_energies(points: &[SpectralPoint]) -> ManyBodySpectrum {
    let eps: Vec<Complex64> = points.iter().map(|p| p.signed_epsilon()).collect();
    ManyBodySpectrum::from_epsilons(&eps)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumEnergy {
    /// Σ ε over principal branches.
    pub e0: Complex64,
    /// -E₀/2, the all-minus pattern.
    pub ground: Complex64,
}

pub fn vacuum_energy(points: &[SpectralPoint]) -> VacuumEnergy {
    let e0: Complex64 = points.iter().map(|p| p.epsilon).sum();
    VacuumEnergy { e0, ground: -e0 / 2.0 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingReport {
    pub pairs: usize,
    /// max |Λ_{2m} + Λ_{2m-1}|
    pub eigenvalue_residual: f64,
    /// max over pairs of ‖φ_{2m} + φ_{2m-1}‖ + ‖ψ_{2m} - ψ_{2m-1}‖, recovered from V.
    pub vector_residual: f64,
}

pub fn pairing_structure(basis: &BiorthogonalBasis) -> PairingReport {
    let n = basis.v.nrows() / 2;
    let r = 1.0 / 2f64.sqrt();
    let split = |j: usize| -> (Vec<Complex64>, Vec<Complex64>) {
        let col = basis.v.column(j);
        let phi = (0..n).map(|i| (col[i] + col[n + i]) * r).collect();
        let psi = (0..n).map(|i| (col[i] - col[n + i]) * r).collect();
        (phi, psi)
    };
    let mut ev = 0.0f64;
    let mut vr = 0.0f64;
    for m in 0..n {
        let (a, b) = (2 * m, 2 * m + 1);
        ev = ev.max((basis.lambda[a] + basis.lambda[b]).norm());
        let (pa, qa) = split(a);
        let (pb, qb) = split(b);
        let dphi: f64 = pa.iter().zip(&pb).map(|(x, y)| (x + y).norm_sqr()).sum::<f64>().sqrt();
        let dpsi: f64 = qa.iter().zip(&qb).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        vr = vr.max(dphi + dpsi);
    }
    PairingReport { pairs: n, eigenvalue_residual: ev, vector_residual: vr }
}
