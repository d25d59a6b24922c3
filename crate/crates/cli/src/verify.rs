//! Named self-check suites run by `xyep verify`.

use xyep_core::basis::BiorthogonalBasis;
use xyep_core::chain::{ChainSpec, Mode};
use xyep_core::ep::{
    ep_root_multiplicity, generalized_eigenvector, generalized_eigenvector_kernel, jordan_decomposition, locate_eps,
    EpRecord,
};
use xyep_core::oracle::{build_ep_states, build_spin_hamiltonian, ed_eigen, l4_closed_form, match_spectra};
use xyep_core::topology::{branch_scaling_probe, loop_monodromy, LoopSpec};
use xyep_core::Complex64;

pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), pass, detail: detail.into() }
}

fn from_result(name: &str, r: xyep_core::Result<Check>) -> Check {
    r.unwrap_or_else(|e| check(name, false, e.to_string()))
}

pub const SUITES: [&str; 7] = ["ep-table", "closed-form", "basis", "jordan", "ep-states", "monodromy", "scaling"];

pub fn run_suite(name: &str) -> Result<Vec<Check>, String> {
    match name {
        "all" => Ok(SUITES.iter().flat_map(|s| run_suite(s).unwrap()).collect()),
        "ep-table" => Ok(ep_table_suite()),
        "closed-form" => Ok(closed_form_suite()),
        "basis" => Ok(basis_suite()),
        "jordan" => Ok(jordan_suite()),
        "ep-states" => Ok(ep_state_suite()),
        "monodromy" => Ok(monodromy_suite()),
        "scaling" => Ok(scaling_suite()),
        other => Err(format!("unknown suite '{other}'; expected one of all, {}", SUITES.join(", "))),
    }
}

fn all_eps(l: usize) -> xyep_core::Result<Vec<EpRecord>> {
    let mut v = locate_eps(l, Mode::I)?;
    v.extend(locate_eps(l, Mode::II)?);
    Ok(v)
}

fn ep_table_suite() -> Vec<Check> {
    (4..=10)
        .step_by(2)
        .map(|l| {
            let name = format!("ep-table L={l}");
            from_result(&name, (|| {
                let eps = all_eps(l)?;
                let mut worst = 0.0f64;
                let mut mult_ok = true;
                for e in &eps {
                    worst = worst.max(e.residuals.boundary);
                    mult_ok &= ep_root_multiplicity(e)? == 2;
                }
                let count_ok = eps.len() == 2 * (l - 2);
                Ok(check(&name, worst < 1e-10 && mult_ok && count_ok, format!("{} EPs, max |P| {worst:.1e}", eps.len())))
            })())
        })
        .collect()
}

fn closed_form_suite() -> Vec<Check> {
    [Complex64::new(0.3, 0.2), Complex64::new(-1.4, 0.7), Complex64::new(0.6, 0.8)]
        .iter()
        .map(|&g| {
            let name = format!("closed-form L=4 gamma={g}");
            from_result(&name, (|| {
                let cf = l4_closed_form(g)?;
                let h = build_spin_hamiltonian(&ChainSpec::new(4, g)?)?.matrix;
                let ed = ed_eigen(&h, false)?;
                let m = match_spectra(&cf.energies(), &ed.eigenvalues, 1e-6)?;
                let mut vec_res = 0.0f64;
                for v in &cf.vectors {
                    vec_res = vec_res.max((&h * &v.vector - &v.vector * v.energy).norm() / v.vector.norm());
                }
                Ok(check(&name, m.max_distance < 1e-6 && vec_res < 1e-10, format!("spectrum {:.1e}, vectors {vec_res:.1e}", m.max_distance)))
            })())
        })
        .collect()
}

fn basis_suite() -> Vec<Check> {
    [4usize, 6, 8, 10]
        .iter()
        .map(|&l| {
            let name = format!("basis L={l}");
            from_result(&name, (|| {
                let b = BiorthogonalBasis::from_spec(&ChainSpec::new(l, Complex64::new(0.35, 0.55))?)?;
                let table = b.operators().max_table_deviation();
                let rec = b.reconstruction_residual();
                Ok(check(&name, table < 1e-10 && rec < 1e-9, format!("anticommutators {table:.1e}, reconstruction {rec:.1e}")))
            })())
        })
        .collect()
}

fn jordan_suite() -> Vec<Check> {
    [4usize, 6, 8]
        .iter()
        .map(|&l| {
            let name = format!("jordan L={l}");
            from_result(&name, (|| {
                let mut res = 0.0f64;
                let mut agree = 0.0f64;
                for ep in all_eps(l)? {
                    let dec = jordan_decomposition(&ep)?;
                    res = res.max(dec.residual).max(dec.reconstruction_residual()?);
                    for s in [1, -1] {
                        let ch = generalized_eigenvector(&ep, s)?;
                        let k = generalized_eigenvector_kernel(&ep, &ch)?;
                        agree = agree.max((&k.generalized - &ch.generalized).norm() / ch.generalized.norm());
                    }
                }
                Ok(check(&name, res < 1e-9 && agree < 1e-8, format!("decomposition {res:.1e}, kernel route {agree:.1e}")))
            })())
        })
        .collect()
}

fn ep_state_suite() -> Vec<Check> {
    [4usize, 6]
        .iter()
        .map(|&l| {
            let name = format!("ep-states L={l}");
            from_result(&name, (|| {
                let mut ok = true;
                let mut worst = 0.0f64;
                for ep in all_eps(l)? {
                    let v = build_ep_states(&jordan_decomposition(&ep)?, 7)?;
                    ok &= v.rank == v.expected && v.shared == 1 << (l - 2);
                    worst = worst.max(v.max_residual);
                }
                Ok(check(&name, ok && worst < 1e-8, format!("max residual {worst:.1e}")))
            })())
        })
        .collect()
}

fn monodromy_suite() -> Vec<Check> {
    let name = "monodromy L=4";
    vec![from_result(name, (|| {
        let mut ok = true;
        for ep in all_eps(4)? {
            let r = loop_monodromy(&LoopSpec::new(4, ep.gamma, 0.05, 256))?;
            let moved = r.permutation.iter().enumerate().filter(|(i, p)| *i != **p).count();
            ok &= r.closed && moved == 2;
        }
        Ok(check(name, ok, "each EP loop transposes one pair"))
    })())]
}

fn scaling_suite() -> Vec<Check> {
    let name = "branch scaling";
    vec![from_result(name, (|| {
        let radii = [1e-6, 1e-5, 1e-4, 1e-3];
        let mut worst = 0.0f64;
        for l in [4, 6, 8] {
            for ep in all_eps(l)? {
                worst = worst.max((branch_scaling_probe(&ep, &radii)?.exponent - 0.5).abs());
            }
        }
        Ok(check(name, worst < 0.02, format!("max |exponent - 1/2| {worst:.1e}")))
    })())]
}
