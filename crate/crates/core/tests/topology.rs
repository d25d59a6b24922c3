use proptest::prelude::*;
use xyep_core::chain::Mode;
use xyep_core::ep::locate_eps;
use xyep_core::topology::{
    compose, invert, loop_monodromy, overlap_grid, phase_rigidity, sheet_stitch, splitting_exponent, GammaGrid,
    LoopSpec, Orientation, OverlapSelector, PairSelector,
};
use xyep_core::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

proptest! {
    #[test]
    fn rigidity_is_scale_invariant_and_bounded(
        v in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..16),
        s in (0.1f64..10.0, -3.2f64..3.2),
    ) {
        let v: Vec<Complex64> = v.into_iter().map(|(a, b)| c(a, b)).collect();
        prop_assume!(v.iter().map(|z| z.norm()).sum::<f64>() > 1e-3);
        let r = phase_rigidity(&v).unwrap();
        prop_assert!(r.norm() <= 1.0 + 1e-12);
        let k = Complex64::from_polar(s.0, s.1);
        let scaled: Vec<Complex64> = v.iter().map(|z| z * k).collect();
        let rs = phase_rigidity(&scaled).unwrap();
        prop_assert!((rs.norm() - r.norm()).abs() < 1e-12);
    }
}

#[test]
fn zero_vector_has_no_rigidity() {
    assert!(phase_rigidity(&[c(0.0, 0.0); 3]).is_err());
}

#[test]
fn loops_at_l6() {
    let ep = locate_eps(6, Mode::I).unwrap()[1];
    let spec = LoopSpec::new(6, ep.gamma, 0.02, 256);
    let fwd = loop_monodromy(&spec).unwrap();
    let moved = fwd.permutation.iter().enumerate().filter(|(i, p)| i != *p).count();
    assert_eq!(moved, 2);
    let mut back = spec;
    back.orientation = Orientation::Clockwise;
    let rev = loop_monodromy(&back).unwrap();
    assert_eq!(rev.permutation, invert(&fwd.permutation));
    let id: Vec<usize> = (0..6).collect();
    assert_eq!(compose(&fwd.permutation, &rev.permutation), id);
    let free = loop_monodromy(&LoopSpec::new(6, c(0.0, 0.05), 0.04, 64)).unwrap();
    assert_eq!(free.permutation, id);
}

#[test]
fn loops_through_singular_points_are_refused() {
    assert!(LoopSpec::new(4, c(1.05, 0.0), 0.05, 64).validate().is_err());
    let ep = locate_eps(4, Mode::I).unwrap()[0];
    assert!(LoopSpec::new(4, ep.gamma + 0.05, 0.05, 64).validate().is_err());
    assert!(LoopSpec::new(4, c(0.0, 0.3), 0.1, 4).validate().is_err());
}

#[test]
fn overlap_map_vanishes_only_at_the_ep() {
    let ep = locate_eps(4, Mode::II).unwrap().into_iter().find(|e| e.gamma.re > 0.0 && e.gamma.im > 0.0).unwrap();
    let grid = GammaGrid { re_min: 0.4, re_max: 0.8, im_min: 0.6, im_max: 1.0, nx: 5, ny: 5 };
    let g = overlap_grid(4, &grid, &OverlapSelector::DegeneratingPair { ep, member: 0 }).unwrap();
    assert_eq!(g.samples.len(), 25);
    for s in &g.samples {
        let o = s.overlap.unwrap().norm();
        assert!(o <= 1.0 + 1e-12);
        if (s.gamma - ep.gamma).norm() < 1e-9 {
            assert!(o < 1e-6);
        } else {
            assert!(o > 1e-3);
        }
    }
}

#[test]
fn seam_leaves_the_ep_on_one_side() {
    let ep = locate_eps(4, Mode::II).unwrap().into_iter().find(|e| e.gamma.re > 0.0 && e.gamma.im > 0.0).unwrap();
    let grid = GammaGrid { re_min: 0.3, re_max: 0.9, im_min: 0.5, im_max: 1.1, nx: 13, ny: 13 };
    let st = sheet_stitch(&grid, &ep).unwrap();
    assert!(!st.seam.is_empty());
    let first = st.seam[0].0;
    assert!(st.seam.iter().all(|&(i, _)| i == first));
    assert!(st.seam.iter().all(|&(_, j)| grid.node(0, j).im > ep.gamma.im));
}

#[test]
fn square_root_splitting_near_ep_and_linear_control() {
    let ep = locate_eps(4, Mode::I).unwrap()[0];
    let radii = [1e-6, 1e-5, 1e-4, 1e-3];
    let half = xyep_core::topology::branch_scaling_probe(&ep, &radii).unwrap();
    assert!((half.exponent - 0.5).abs() < 0.02);
    let lin = splitting_exponent(2, c(0.0, 0.0), 0.7, &[1e-3, 1e-2, 1e-1], PairSelector::CrossFamily { target: c(1.0, 0.0) }).unwrap();
    assert!((lin.exponent - 1.0).abs() < 0.1, "{}", lin.exponent);
}
