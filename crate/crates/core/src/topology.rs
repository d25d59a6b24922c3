//! Phase rigidity, analytic continuation of quasi-energies along paths in the
//! γ-plane, monodromy of closed loops, overlap maps and branch-point scaling.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::chain::{mode_points, ChainSpec, Mode};
use crate::ep::{locate_eps, EpRecord};
use crate::error::{Error, Result};
use crate::linalg::{bdot, ONE};
use crate::oracle::{build_spin_hamiltonian, eigenvector_near};

/// vᵀv / v†v.
pub fn phase_rigidity(v: &[Complex64]) -> Result<Complex64> {
    let d: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if !(d > 0.0) {
        return Err(Error::ZeroVector);
    }
    Ok(bdot(v, v) / d)
}

pub const MAX_REFINEMENTS: usize = 12;
const AMBIGUITY_RATIO: f64 = 0.5;
const COINCIDE: f64 = 1e-7;

/// Continued quasi-energies at one point of a path: mode I labels first, then mode II.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackState {
    pub gamma: Complex64,
    pub eps: Vec<Complex64>,
}

impl TrackState {
    pub fn start(l: usize, gamma: Complex64) -> Result<Self> {
        let spec = ChainSpec::new(l, gamma)?;
        let mut eps: Vec<Complex64> = mode_points(&spec, Mode::I)?.iter().map(|p| p.epsilon).collect();
        eps.extend(mode_points(&spec, Mode::II)?.iter().map(|p| p.epsilon));
        Ok(Self { gamma, eps })
    }

    pub fn label_mode(&self, k: usize) -> Mode {
        if k < self.eps.len() / 2 {
            Mode::I
        } else {
            Mode::II
        }
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= COINCIDE * (1.0 + a.norm())
}

/// Match the labels of one family to the candidates ±ε_j at the new point.
/// Returns None when the nearest-match is ambiguous.
fn match_family(prev: &[Complex64], roots: &[Complex64]) -> Option<Vec<Complex64>> {
    let cands: Vec<(usize, Complex64)> =
        roots.iter().enumerate().flat_map(|(j, &e)| [(j, e), (j, -e)]).collect();
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &p) in prev.iter().enumerate() {
        for (ci, &(_, cv)) in cands.iter().enumerate() {
            pairs.push(((p - cv).norm(), i, ci));
        }
    }
    pairs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut label_to = vec![usize::MAX; prev.len()];
    let mut root_used = vec![false; roots.len()];
    for &(_, i, ci) in &pairs {
        let root = cands[ci].0;
        if label_to[i] == usize::MAX && !root_used[root] {
            label_to[i] = ci;
            root_used[root] = true;
        }
    }
    for (i, &p) in prev.iter().enumerate() {
        let assigned = cands[label_to[i]].1;
        let d1 = (p - assigned).norm();
        // The closest competing candidate, ignoring values that coincide with the assigned one
        // or that belong to a label carrying the same value (an undetermined swap at an EP).
        let d2 = cands
            .iter()
            .enumerate()
            .filter(|(ci, (_, cv))| {
                *ci != label_to[i]
                    && !close(*cv, assigned)
                    && !label_to.iter().enumerate().any(|(j, &cj)| cj == *ci && j != i && close(prev[j], p))
            })
            .map(|(_, (_, cv))| (p - cv).norm())
            .fold(f64::INFINITY, f64::min);
        if d1 > AMBIGUITY_RATIO * d2 {
            return None;
        }
    }
    Some(label_to.iter().map(|&ci| cands[ci].1).collect())
}

fn try_step(from: &TrackState, to: Complex64) -> Result<Option<TrackState>> {
    let l = from.eps.len();
    let spec = ChainSpec::new(l, to)?;
    let n = l / 2;
    let r1: Vec<Complex64> = mode_points(&spec, Mode::I)?.iter().map(|p| p.epsilon).collect();
    let r2: Vec<Complex64> = mode_points(&spec, Mode::II)?.iter().map(|p| p.epsilon).collect();
    let (Some(a), Some(b)) = (match_family(&from.eps[..n], &r1), match_family(&from.eps[n..], &r2)) else {
        return Ok(None);
    };
    let mut eps = a;
    eps.extend(b);
    Ok(Some(TrackState { gamma: to, eps }))
}

/// Continue from `from` to `to`, bisecting ambiguous steps up to the refinement budget.
pub fn track_step(from: &TrackState, to: Complex64, refinements: &mut usize) -> Result<TrackState> {
    track_rec(from, to, 0, refinements)
}

fn track_rec(from: &TrackState, to: Complex64, depth: usize, refinements: &mut usize) -> Result<TrackState> {
    if let Some(s) = try_step(from, to)? {
        return Ok(s);
    }
    if depth >= MAX_REFINEMENTS {
        return Err(Error::AmbiguousContinuation(to));
    }
    *refinements += 1;
    let mid = (from.gamma + to) / 2.0;
    let m = track_rec(from, mid, depth + 1, refinements)?;
    track_rec(&m, to, depth + 1, refinements)
}

/// Track along a polyline; returns the state at every vertex.
pub fn track_path(l: usize, path: &[Complex64], refinements: &mut usize) -> Result<Vec<TrackState>> {
    let first = *path.first().ok_or_else(|| Error::InvalidInput("empty path".into()))?;
    let mut out = vec![TrackState::start(l, first)?];
    for &g in &path[1..] {
        let next = track_step(out.last().unwrap(), g, refinements)?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopSpec {
    pub l: usize,
    pub center: Complex64,
    pub radius: f64,
    pub steps: usize,
    pub orientation: Orientation,
    pub start_angle: f64,
    pub turns: usize,
}

impl LoopSpec {
    pub fn new(l: usize, center: Complex64, radius: f64, steps: usize) -> Self {
        Self { l, center, radius, steps, orientation: Orientation::CounterClockwise, start_angle: 0.0, turns: 1 }
    }

    pub fn path(&self) -> Vec<Complex64> {
        let dir = match self.orientation {
            Orientation::CounterClockwise => 1.0,
            Orientation::Clockwise => -1.0,
        };
        let total = self.steps * self.turns;
        (0..=total)
            .map(|j| {
                let t = self.start_angle + dir * 2.0 * std::f64::consts::PI * j as f64 / self.steps as f64;
                self.center + Complex64::from_polar(self.radius, t)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps < 16 || !(self.radius > 0.0) || self.turns == 0 {
            return Err(Error::InvalidInput("loop needs radius > 0, steps >= 16 and turns >= 1".into()));
        }
        let margin = self.radius / 10.0;
        let near = |p: Complex64| ((p - self.center).norm() - self.radius).abs() < margin;
        if near(ONE) || near(-ONE) {
            return Err(Error::InvalidInput("loop passes too close to gamma = +-1".into()));
        }
        for mode in [Mode::I, Mode::II] {
            for ep in locate_eps(self.l, mode)? {
                if near(ep.gamma) {
                    return Err(Error::InvalidInput(format!("loop passes too close to the EP at {}", ep.gamma)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopResult {
    /// permutation[i] = j: label i returns carrying the initial value of label j.
    pub permutation: Vec<usize>,
    /// Label returned with the negated value.
    pub sign_flips: Vec<bool>,
    pub refinements: usize,
    pub closed: bool,
}

/// Monodromy of a closed path given by its vertices (first = last).
pub fn closed_path_monodromy(l: usize, path: &[Complex64]) -> Result<LoopResult> {
    let mut refinements = 0;
    let states = track_path(l, path, &mut refinements)?;
    let init = &states[0].eps;
    let fin = &states.last().unwrap().eps;
    let tol = 1e-6;
    let mut permutation = vec![usize::MAX; init.len()];
    let mut sign_flips = vec![false; init.len()];
    let mut taken = vec![false; init.len()];
    for (i, &f) in fin.iter().enumerate() {
        let best = (0..init.len())
            .filter(|&j| !taken[j])
            .flat_map(|j| [(j, false, (f - init[j]).norm()), (j, true, (f + init[j]).norm())])
            .min_by(|a, b| a.2.partial_cmp(&b.2).unwrap());
        if let Some((j, flip, d)) = best {
            if d <= tol * (1.0 + f.norm()) {
                permutation[i] = j;
                sign_flips[i] = flip;
                taken[j] = true;
            }
        }
    }
    let closed = permutation.iter().all(|&p| p != usize::MAX);
    Ok(LoopResult { permutation, sign_flips, refinements, closed })
}

pub fn loop_monodromy(spec: &LoopSpec) -> Result<LoopResult> {
    spec.validate()?;
    closed_path_monodromy(spec.l, &spec.path())
}

pub fn compose(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&j| second[j]).collect()
}

pub fn invert(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GammaGrid {
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let t = |a: f64, b: f64, k: usize, n: usize| if n <= 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 };
        Complex64::new(t(self.re_min, self.re_max, i, self.nx), t(self.im_min, self.im_max, j, self.ny))
    }

    fn spacing(&self) -> f64 {
        let dx = if self.nx > 1 { (self.re_max - self.re_min) / (self.nx - 1) as f64 } else { 1.0 };
        let dy = if self.ny > 1 { (self.im_max - self.im_min) / (self.ny - 1) as f64 } else { 1.0 };
        dx.abs().max(dy.abs()).max(1e-12)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nx == 0 || self.ny == 0 || self.re_min > self.re_max || self.im_min > self.im_max {
            return Err(Error::InvalidInput("grid needs nx, ny >= 1 and ordered bounds".into()));
        }
        Ok(())
    }
}

/// Which many-body state the overlap map follows.
#[derive(Debug, Clone, PartialEq)]
pub enum OverlapSelector {
    /// One member (0 or 1) of the pair that coalesces at `ep`, with every other mode empty.
    DegeneratingPair { ep: EpRecord, member: usize },
    /// Fixed signs over the continued labels, anchored at the grid's first node.
    Pattern { signs: Vec<i8> },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapSample {
    pub gamma: Complex64,
    pub energy: Complex64,
    /// None on a pole cell.
    pub overlap: Option<Complex64>,
}

#[derive(Debug, Clone)]
pub struct OverlapGrid {
    pub grid: GammaGrid,
    /// Row-major: index j * nx + i.
    pub samples: Vec<OverlapSample>,
    pub refinements: usize,
}

const POLE_TOL: f64 = 1e-9;

fn is_pole(g: Complex64) -> bool {
    (g - ONE).norm() < POLE_TOL || (g + ONE).norm() < POLE_TOL
}

/// Tracked states at every grid node plus the label signs for the selector(s).
struct TrackedGrid {
    states: Vec<TrackState>,
    refinements: usize,
}

fn track_grid(grid: &GammaGrid, anchor: TrackState) -> Result<TrackedGrid> {
    let mut refinements = 0;
    let nudge = |g: Complex64| if is_pole(g) { g + Complex64::new(0.0, 1e-4 * grid.spacing()) } else { g };
    let first = track_step(&anchor, nudge(grid.node(0, 0)), &mut refinements)?;
    let mut states = vec![first.clone(); grid.nx * grid.ny];
    let mut row0 = vec![first];
    for i in 1..grid.nx {
        let s = track_step(row0.last().unwrap(), nudge(grid.node(i, 0)), &mut refinements)?;
        row0.push(s);
    }
    let columns: Vec<Result<(Vec<TrackState>, usize)>> = row0
        .into_par_iter()
        .enumerate()
        .map(|(i, base)| {
            let mut r = 0;
            let mut col = vec![base];
            for j in 1..grid.ny {
                let s = track_step(col.last().unwrap(), nudge(grid.node(i, j)), &mut r)?;
                col.push(s);
            }
            Ok((col, r))
        })
        .collect();
    for (i, c) in columns.into_iter().enumerate() {
        let (col, r) = c?;
        refinements += r;
        for (j, s) in col.into_iter().enumerate() {
            states[j * grid.nx + i] = s;
        }
    }
    Ok(TrackedGrid { states, refinements })
}

/// Anchor just off the EP with the two coalescing labels identified.
fn pair_anchor(ep: &EpRecord) -> Result<(TrackState, usize, usize)> {
    let offset = Complex64::from_polar(1e-3, 0.3);
    let st = TrackState::start(ep.l, ep.gamma + offset)?;
    let n = ep.l / 2;
    let range = match ep.mode {
        Mode::I => 0..n,
        Mode::II => n..2 * n,
    };
    let mut idx: Vec<usize> = range.collect();
    idx.sort_by(|&a, &b| (st.eps[a] - ep.epsilon).norm().partial_cmp(&(st.eps[b] - ep.epsilon).norm()).unwrap());
    if idx.len() < 2 {
        return Err(Error::InvalidInput("EP family has fewer than two modes".into()));
    }
    Ok((st, idx[0], idx[1]))
}

fn pair_signs(l: usize, a: usize, b: usize, member: usize) -> Vec<i8> {
    let mut s = vec![-1i8; l];
    if member == 0 {
        s[a] = 1;
    } else {
        s[b] = 1;
    }
    s
}

fn energy_of(state: &TrackState, signs: &[i8]) -> Complex64 {
    state.eps.iter().zip(signs).map(|(e, &s)| e * s as f64).sum::<Complex64>() / 2.0
}

fn sample_overlaps(l: usize, grid: &GammaGrid, states: &[TrackState], signs: &[i8]) -> Result<Vec<OverlapSample>> {
    (0..states.len())
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % grid.nx, k / grid.nx);
            let gamma = grid.node(i, j);
            let energy = energy_of(&states[k], signs);
            if is_pole(gamma) {
                return Ok(OverlapSample { gamma, energy, overlap: None });
            }
            let h = build_spin_hamiltonian(&ChainSpec::new(l, gamma)?)?.matrix;
            let v = eigenvector_near(&h, energy, k as u64)?;
            Ok(OverlapSample { gamma, energy, overlap: Some(phase_rigidity(v.as_slice())?) })
        })
        .collect()
}

pub fn overlap_grid(l: usize, grid: &GammaGrid, selector: &OverlapSelector) -> Result<OverlapGrid> {
    grid.validate()?;
    let (anchor, signs) = match selector {
        OverlapSelector::DegeneratingPair { ep, member } => {
            if ep.l != l {
                return Err(Error::InvalidInput("selector EP has a different chain length".into()));
            }
            let (st, a, b) = pair_anchor(ep)?;
            (st, pair_signs(l, a, b, *member))
        }
        OverlapSelector::Pattern { signs } => {
            if signs.len() != l {
                return Err(Error::InvalidInput("pattern length must equal L".into()));
            }
            let g0 = grid.node(0, 0);
            let g0 = if is_pole(g0) { g0 + Complex64::new(0.0, 1e-4 * grid.spacing()) } else { g0 };
            (TrackState::start(l, g0)?, signs.clone())
        }
    };
    let tracked = track_grid(grid, anchor)?;
    let samples = sample_overlaps(l, grid, &tracked.states, &signs)?;
    Ok(OverlapGrid { grid: *grid, samples, refinements: tracked.refinements })
}

#[derive(Debug, Clone)]
pub struct SheetStitch {
    pub sheet_a: OverlapGrid,
    pub sheet_b: OverlapGrid,
    /// Horizontal neighbours (i, j) - (i+1, j) across which the two sheets exchange.
    pub seam: Vec<(usize, usize)>,
}

/// Both members of the degenerating pair on one tracked grid, with the seam
/// where horizontally adjacent cells swap.
pub fn sheet_stitch(grid: &GammaGrid, ep: &EpRecord) -> Result<SheetStitch> {
    grid.validate()?;
    let l = ep.l;
    let (anchor, a, b) = pair_anchor(ep)?;
    let tracked = track_grid(grid, anchor)?;
    let sa = pair_signs(l, a, b, 0);
    let sb = pair_signs(l, a, b, 1);
    let samples_a = sample_overlaps(l, grid, &tracked.states, &sa)?;
    let samples_b = sample_overlaps(l, grid, &tracked.states, &sb)?;
    let mut seam = Vec::new();
    for j in 0..grid.ny {
        for i in 0..grid.nx.saturating_sub(1) {
            let (k0, k1) = (j * grid.nx + i, j * grid.nx + i + 1);
            let direct = (samples_a[k0].energy - samples_a[k1].energy).norm()
                + (samples_b[k0].energy - samples_b[k1].energy).norm();
            let cross = (samples_a[k0].energy - samples_b[k1].energy).norm()
                + (samples_b[k0].energy - samples_a[k1].energy).norm();
            if cross < direct {
                seam.push((i, j));
            }
        }
    }
    let mk = |samples| OverlapGrid { grid: *grid, samples, refinements: tracked.refinements };
    Ok(SheetStitch { sheet_a: mk(samples_a), sheet_b: mk(samples_b), seam })
}

/// How the split pair is picked at each probe point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairSelector {
    /// The two quasi-energies of `mode` nearest `target`.
    WithinMode { mode: Mode, target: Complex64 },
    /// The mode I and mode II quasi-energies nearest `target`.
    CrossFamily { target: Complex64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub exponent: f64,
    /// (r, |ε_a - ε_b|)
    pub samples: Vec<(f64, f64)>,
}

fn nearest(pts: &[Complex64], target: Complex64, k: usize) -> Vec<Complex64> {
    let mut v = pts.to_vec();
    v.sort_by(|a, b| (a - target).norm().partial_cmp(&(b - target).norm()).unwrap());
    v.truncate(k);
    v
}

/// Log-log slope of the pair splitting against the distance r from `center`
/// along the direction `theta`.
pub fn splitting_exponent(l: usize, center: Complex64, theta: f64, radii: &[f64], pair: PairSelector) -> Result<ScalingReport> {
    if radii.len() < 2 {
        return Err(Error::InvalidInput("need at least two radii".into()));
    }
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let spec = ChainSpec::new(l, center + Complex64::from_polar(r, theta))?;
        let eps = |m| -> Result<Vec<Complex64>> { Ok(mode_points(&spec, m)?.iter().map(|p| p.epsilon).collect()) };
        let split = match pair {
            PairSelector::WithinMode { mode, target } => {
                let v = nearest(&eps(mode)?, target, 2);
                (v[0] - v[1]).norm()
            }
            PairSelector::CrossFamily { target } => {
                let a = nearest(&eps(Mode::I)?, target, 1)[0];
                let b = nearest(&eps(Mode::II)?, target, 1)[0];
                (a - b).norm()
            }
        };
        samples.push((r, split));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(r, s)| (r.ln(), s.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(ScalingReport { exponent: sxy / sxx, samples })
}

pub fn branch_scaling_probe(ep: &EpRecord, radii: &[f64]) -> Result<ScalingReport> {
    splitting_exponent(ep.l, ep.gamma, 0.7, radii, PairSelector::WithinMode { mode: ep.mode, target: ep.epsilon })
}
