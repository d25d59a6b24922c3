use num_bigint::BigInt;
use xyep_core::chain::{boundary_polynomial, Mode};
use xyep_core::ep::{
    ep_resultant, ep_state_catalog, ep_table, generalized_eigenvector, half_chain_disjointness, jordan_decomposition,
    locate_eps, BlockLevel, EpRecord,
};
use xyep_core::oracle::{build_ep_states, build_spin_hamiltonian, ed_eigen, geometric_multiplicities};
use xyep_core::Complex64;

fn all(l: usize) -> Vec<EpRecord> {
    let mut v = locate_eps(l, Mode::I).unwrap();
    v.extend(locate_eps(l, Mode::II).unwrap());
    v
}

#[test]
fn small_resultants_are_exact() {
    assert_eq!(ep_resultant(4).coeffs(), &[BigInt::from(4), BigInt::from(0), BigInt::from(1)]);
    let r6 = ep_resultant(6);
    // 4λ⁴ + 13λ² + 32 has roots λ² = (-13 ± i√343)/8
    assert_eq!(r6.eval_int(&BigInt::from(0)), BigInt::from(32));
    assert_eq!(r6.degree(), 4);
}

#[test]
fn ep_counts_and_double_roots() {
    for l in (4..=12).step_by(2) {
        let eps = all(l);
        assert_eq!(eps.len(), 2 * (l - 2), "L={l}");
        for ep in &eps {
            let spec = ep.spec().unwrap();
            let p = boundary_polynomial(&spec, ep.mode).unwrap();
            let scale = p.norm1() * ep.x.norm().max(1.0).powi(p.degree() as i32);
            assert!(p.eval(ep.x).norm() < 1e-10 * scale);
            assert!(p.derivative().eval(ep.x).norm() < 1e-8 * scale);
        }
    }
}

#[test]
fn modes_are_mirror_images() {
    for l in [6usize, 8] {
        let a = locate_eps(l, Mode::I).unwrap();
        let b = locate_eps(l, Mode::II).unwrap();
        for ep in &a {
            assert!(b.iter().any(|f| (f.gamma + ep.gamma).norm() < 1e-10));
            assert!(a.iter().any(|f| (f.gamma - ep.gamma.conj()).norm() < 1e-10));
        }
    }
}

#[test]
fn table_is_ordered_and_deterministic() {
    let t = ep_table(8).unwrap();
    assert_eq!(t, ep_table(8).unwrap());
    assert_eq!(t.len(), 4 + 8 + 12);
    assert!(t.windows(2).all(|w| w[0].l <= w[1].l));
}

#[test]
fn eigenvectors_at_eps_are_self_orthogonal() {
    for ep in all(6) {
        for s in [1i8, -1] {
            let ch = generalized_eigenvector(&ep, s).unwrap();
            let w = &ch.eigenvector;
            let g = &ch.generalized;
            assert!(w.dot(w).norm() < 1e-10 * w.norm_squared());
            assert!((w.dot(g) - 1.0).norm() < 1e-10);
            assert!(g.dot(g).norm() < 1e-10 * g.norm_squared());
        }
    }
}

#[test]
fn half_chain_spectrum_avoids_ep_energy() {
    for l in [4usize, 6, 8, 10] {
        for ep in all(l) {
            let r = half_chain_disjointness(&ep).unwrap();
            assert!(r.min_distance > 1e-3 && r.restricted_sigma_min > 1e-6, "L={l}: {r:?}");
        }
    }
}

#[test]
fn ep_state_counts() {
    for l in [4usize, 6] {
        let ep = all(l)[0];
        let dec = jordan_decomposition(&ep).unwrap();
        assert!(dec.reconstruction_residual().unwrap() < 1e-9);
        let cat = ep_state_catalog(&dec);
        let expected = 3 << (l - 2);
        assert_eq!(cat.states.len(), expected);
        assert_eq!(cat.states.iter().filter(|s| s.block == BlockLevel::Center).count(), expected / 3);
        let v = build_ep_states(&dec, 3).unwrap();
        assert_eq!(v.rank, expected);
        assert!(v.max_residual < 1e-8);
    }
}

#[test]
fn ed_confirms_defective_levels_at_l4() {
    let ep = all(4)[0];
    let h = build_spin_hamiltonian(&ep.spec().unwrap()).unwrap().matrix;
    let ed = ed_eigen(&h, false).unwrap();
    let clusters = geometric_multiplicities(&h, &ed.eigenvalues).unwrap();
    assert_eq!(clusters.iter().map(|c| c.geometric).sum::<usize>(), 12);
    assert_eq!(clusters.iter().filter(|c| c.algebraic == 2 && c.geometric == 1).count(), 4);
    let _: Complex64 = ep.epsilon;
}
