mod format;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use xyep_core::basis::ManyBodySpectrum;
use xyep_core::chain::{quasi_energies, ChainSpec, Mode};
use xyep_core::ep::{ep_table, locate_eps, EpRecord};
use xyep_core::oracle::{build_spin_hamiltonian, ed_eigen, match_spectra};
use xyep_core::topology::{loop_monodromy, overlap_grid, GammaGrid, LoopSpec, Orientation, OverlapSelector};
use xyep_core::{Complex64, Error};

use format::{complex_json, csv_header, meta, parse_complex, sig12};

#[derive(Parser)]
#[command(name = "xyep", version, about = "Exceptional points of the non-Hermitian open XY chain")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quasi-energies (and optionally the many-body spectrum) at one γ
    Spectrum {
        #[arg(long = "L")]
        l: usize,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        gamma: Complex64,
        /// Also list all 2^L many-body energies
        #[arg(long)]
        many_body: bool,
        /// Write H and its exact eigendata as JSON
        #[arg(long)]
        dump_oracle: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Exceptional points for L = 4, 6, ..., Lmax
    EpTable {
        #[arg(long = "Lmax")]
        l_max: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Complex overlap of one member of a degenerating pair on a γ grid
    OverlapMap {
        #[arg(long = "L")]
        l: usize,
        #[arg(long, allow_hyphen_values = true)]
        re_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        re_max: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        im_max: f64,
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        /// EP whose pair is followed; defaults to the EP nearest the grid centre
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        ep: Option<Complex64>,
        /// Which member of the pair (0 or 1)
        #[arg(long, default_value_t = 0)]
        member: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Monodromy of a circular loop in the γ-plane
    Loop {
        #[arg(long = "L")]
        l: usize,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        center: Complex64,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 256)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        turns: usize,
        #[arg(long)]
        clockwise: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a named verification suite
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
    },
    /// Compare free-fermion spectra with exact diagonalization at random γ
    OracleCompare {
        #[arg(long = "L")]
        l: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

enum Failure {
    Assertion(String),
    Config(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

fn exit_code(f: &Failure) -> u8 {
    match f {
        Failure::Assertion(_) => 1,
        Failure::Config(_) => 2,
        Failure::Core(e) => match e {
            Error::InvalidInput(_) | Error::SizeLimit(..) | Error::DegenerateInput(_) => 2,
            Error::LambdaSingular(_)
            | Error::MapSingular
            | Error::PoleCell(_)
            | Error::EpsilonZero
            | Error::SingularVep(_)
            | Error::LimitRequired(_)
            | Error::SelfOrthogonal
            | Error::DefectiveBasis(_) => 3,
            Error::AmbiguousContinuation(_) => 4,
            _ => 1,
        },
    }
}

fn emit(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn mode_label(m: Mode) -> &'static str {
    m.label()
}

fn spectrum(l: usize, gamma: Complex64, many_body: bool, dump: &Option<PathBuf>, output: &Option<PathBuf>) -> Result<(), Failure> {
    let spec = ChainSpec::new(l, gamma)?;
    let q = quasi_energies(&spec)?;
    let config = json!({ "L": l, "gamma": complex_json(gamma), "many_body": many_body });
    let mut out = csv_header("spectrum", &config);
    if q.modes_coincide {
        out.push_str("# note: both families share one boundary polynomial at this gamma\n");
    }
    for w in &q.near_ep {
        out.push_str(&format!("# near-EP: mode {} branches {:?} separation {:e}\n", w.mode.label(), w.branches, w.separation));
    }
    if many_body {
        out.push_str("index,re_energy,im_energy\n");
        let mb = ManyBodySpectrum::from_epsilons(&q.points.iter().map(|p| p.epsilon).collect::<Vec<_>>());
        for (k, e) in mb.energies.iter().enumerate() {
            out.push_str(&format!("{k},{},{}\n", sig12(e.re), sig12(e.im)));
        }
    } else {
        out.push_str("mode,branch,re_epsilon,im_epsilon,re_x,im_x\n");
        for p in &q.points {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                mode_label(p.mode),
                p.branch_index,
                sig12(p.epsilon.re),
                sig12(p.epsilon.im),
                sig12(p.x.re),
                sig12(p.x.im)
            ));
        }
    }
    emit(output, &out)?;
    if let Some(path) = dump {
        let h = build_spin_hamiltonian(&spec)?;
        let ed = ed_eigen(&h.matrix, true)?;
        let dim = h.matrix.nrows();
        let rows = |m: &xyep_core::linalg::CMat| -> Vec<Value> {
            (0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex_json(m[(i, j)])).collect())).collect()
        };
        let vecs = ed.eigenvectors.as_ref().map(|v| rows(&v.transpose())).unwrap_or_default();
        let doc = json!({
            "meta": meta("spectrum", &config),
            "dimension": dim,
            "hamiltonian": rows(&h.matrix),
            "eigenvalues": ed.eigenvalues.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
            "eigenvectors": vecs,
            "backward_error": ed.backward_error,
        });
        std::fs::write(path, serde_json::to_string(&doc).map_err(|e| Failure::Config(e.to_string()))?)?;
    }
    Ok(())
}

fn ep_table_cmd(l_max: usize, output: &Option<PathBuf>) -> Result<(), Failure> {
    if l_max < 4 || !l_max.is_multiple_of(2) {
        return Err(Failure::Config("--Lmax must be even and >= 4".into()));
    }
    let rows = ep_table(l_max)?;
    let mut out = csv_header("ep-table", &json!({ "Lmax": l_max }));
    out.push_str("L,mode,re_gamma,im_gamma,re_epsilon,im_epsilon,boundary_residual\n");
    for r in &rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.l,
            r.mode.label(),
            sig12(r.gamma.re),
            sig12(r.gamma.im),
            sig12(r.epsilon.re),
            sig12(r.epsilon.im),
            sig12(r.residuals.boundary)
        ));
    }
    emit(output, &out)
}

fn nearest_ep(l: usize, target: Complex64) -> Result<EpRecord, Failure> {
    let mut all = locate_eps(l, Mode::I)?;
    all.extend(locate_eps(l, Mode::II)?);
    all.into_iter()
        .min_by(|a, b| (a.gamma - target).norm().partial_cmp(&(b.gamma - target).norm()).unwrap())
        .ok_or_else(|| Failure::Config(format!("no exceptional points for L = {l}")))
}

#[allow(clippy::too_many_arguments)]
fn overlap_map(l: usize, grid: GammaGrid, ep: Option<Complex64>, member: usize, output: &Option<PathBuf>) -> Result<(), Failure> {
    if member > 1 {
        return Err(Failure::Config("--member must be 0 or 1".into()));
    }
    let centre = Complex64::new((grid.re_min + grid.re_max) / 2.0, (grid.im_min + grid.im_max) / 2.0);
    let rec = nearest_ep(l, ep.unwrap_or(centre))?;
    let res = overlap_grid(l, &grid, &OverlapSelector::DegeneratingPair { ep: rec, member })?;
    let config = json!({
        "L": l, "re_min": grid.re_min, "re_max": grid.re_max, "im_min": grid.im_min, "im_max": grid.im_max,
        "nx": grid.nx, "ny": grid.ny, "ep": complex_json(rec.gamma), "mode": rec.mode.label(), "member": member,
    });
    let mut out = csv_header("overlap-map", &config);
    out.push_str("re_gamma,im_gamma,re_overlap,im_overlap,abs_overlap\n");
    for s in &res.samples {
        match s.overlap {
            Some(o) => out.push_str(&format!(
                "{},{},{},{},{}\n",
                sig12(s.gamma.re),
                sig12(s.gamma.im),
                sig12(o.re),
                sig12(o.im),
                sig12(o.norm())
            )),
            None => out.push_str(&format!("{},{},nan,nan,nan\n", sig12(s.gamma.re), sig12(s.gamma.im))),
        }
    }
    emit(output, &out)
}

fn loop_cmd(spec: LoopSpec, output: &Option<PathBuf>) -> Result<(), Failure> {
    let res = loop_monodromy(&spec)?;
    let config = json!({
        "L": spec.l, "center": complex_json(spec.center), "radius": spec.radius, "steps": spec.steps,
        "turns": spec.turns, "clockwise": spec.orientation == Orientation::Clockwise,
    });
    let doc = json!({
        "meta": meta("loop", &config),
        "center": complex_json(spec.center),
        "radius": spec.radius,
        "steps": spec.steps,
        "refinements": res.refinements,
        "permutation": res.permutation,
        "closed": res.closed,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::Config(e.to_string()))? + "\n";
    emit(output, &text)
}

fn oracle_compare(l: usize, samples: usize, seed: u64, tol: f64) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    println!("{}", csv_header("oracle-compare", &json!({ "L": l, "samples": samples, "seed": seed, "tol": tol })).trim_end());
    println!("re_gamma,im_gamma,relative_distance");
    for _ in 0..samples {
        let gamma = loop {
            let g = Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            if g.norm() < 2.0 && (g - 1.0).norm() > 1e-2 && (g + 1.0).norm() > 1e-2 {
                break g;
            }
        };
        let spec = ChainSpec::new(l, gamma)?;
        let q = quasi_energies(&spec)?;
        let mb = ManyBodySpectrum::from_epsilons(&q.points.iter().map(|p| p.epsilon).collect::<Vec<_>>());
        let ed = ed_eigen(&build_spin_hamiltonian(&spec)?.matrix, false)?;
        let radius = ed.eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let m = match_spectra(&mb.energies, &ed.eigenvalues, tol * radius)?;
        let rel = m.max_distance / radius;
        worst = worst.max(rel);
        println!("{},{},{}", sig12(gamma.re), sig12(gamma.im), sig12(rel));
    }
    if worst > tol {
        return Err(Failure::Assertion(format!("max relative distance {worst:e} exceeds {tol:e}")));
    }
    Ok(())
}

fn configure_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("XYEP_THREADS") {
        let n: usize = v.parse().map_err(|_| Failure::Config(format!("XYEP_THREADS must be a positive integer, got '{v}'")))?;
        if n == 0 {
            return Err(Failure::Config("XYEP_THREADS must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Spectrum { l, gamma, many_body, dump_oracle, output } => spectrum(l, gamma, many_body, &dump_oracle, &output),
        Command::EpTable { l_max, output } => ep_table_cmd(l_max, &output),
        Command::OverlapMap { l, re_min, re_max, im_min, im_max, nx, ny, ep, member, output } => {
            overlap_map(l, GammaGrid { re_min, re_max, im_min, im_max, nx, ny }, ep, member, &output)
        }
        Command::Loop { l, center, radius, steps, turns, clockwise, output } => {
            let mut spec = LoopSpec::new(l, center, radius, steps);
            spec.turns = turns;
            if clockwise {
                spec.orientation = Orientation::Clockwise;
            }
            loop_cmd(spec, &output)
        }
        Command::Verify { suite } => {
            let results = verify::run_suite(&suite).map_err(Failure::Config)?;
            let mut failed = 0;
            for r in &results {
                println!("{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
                failed += usize::from(!r.pass);
            }
            if failed > 0 {
                Err(Failure::Assertion(format!("{failed} check(s) failed")))
            } else {
                Ok(())
            }
        }
        Command::OracleCompare { l, samples, seed, tol } => oracle_compare(l, samples, seed, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let msg = match &f {
                Failure::Assertion(m) | Failure::Config(m) => m.clone(),
                Failure::Core(e) => e.to_string(),
            };
            eprintln!("error: {msg}");
            ExitCode::from(exit_code(&f))
        }
    }
}
