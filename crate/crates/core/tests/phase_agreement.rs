//! Grid evaluation against exact mixture arithmetic for Fock mixtures.

use num_traits::ToPrimitive;
use statecert::phase::{
    fock_mixture, fock_wigner, grid_tolerances, mixture_criteria, mixture_sums, run_all_phase, GridSpec,
    OrthogonalMixture, StarProduct, DEFAULT_M_MAX,
};
use statecert::WignerGrid;

fn grid_of(mix: &OrthogonalMixture) -> WignerGrid {
    let c: Vec<f64> = mix.coeffs.iter().map(|x| x.to_f64().unwrap()).collect();
    fock_mixture(&c, GridSpec::default()).unwrap()
}

#[test]
fn grid_verdicts_match_exact_verdicts() {
    let cases = [
        "1",
        "0,1",
        "1/2,1/2",
        "1/4,1/4,1/2",
        "0,0,0,0,1",
        "2/3,2/3,-1/3",
        "1/2,1/2,1/4,-1/4",
        "1/2,1/4",
    ];
    let cfg = grid_tolerances();
    for case in cases {
        let mix = OrthogonalMixture::parse(1.0, case).unwrap();
        let exact = mixture_criteria(&mix, DEFAULT_M_MAX).unwrap();
        let grid = run_all_phase(&grid_of(&mix), &cfg, DEFAULT_M_MAX).unwrap();
        for e in &exact {
            let g = grid.report(e.criterion).unwrap();
            assert_eq!(g.verdict, e.verdict, "{case}: {} grid {:?}", e.criterion, g.checks);
        }
    }
}

#[test]
fn binomial_sums_match_spectral_expansion() {
    let cfg = grid_tolerances();
    for case in ["1/2,1/2", "1/4,1/4,1/2", "2/3,2/3,-1/3", "1/2,1/2,1/4,-1/4"] {
        let mix = OrthogonalMixture::parse(1.0, case).unwrap();
        let exact = mixture_sums(&mix, 8);
        let r = statecert::phase::criterion_w_binomial(&grid_of(&mix), 8, &cfg.clone().with_all_tols(10.0)).unwrap();
        for &(m, t) in &r.sequence {
            let want = exact.binomial[m].to_f64().unwrap();
            assert!((t - want).abs() <= 2e-3, "{case} m={m}: {t} vs {want}");
        }
    }
}

#[test]
fn fock_projector_algebra() {
    let spec = GridSpec::default();
    let star = StarProduct::new(spec).unwrap();
    let w: Vec<WignerGrid> = (0..=4).map(|n| fock_wigner(n, spec).unwrap()).collect();
    for (m, wm) in w.iter().enumerate() {
        for (n, wn) in w.iter().enumerate() {
            let v = spec.two_pi_hbar() * star.product(wm, wn).unwrap().grid.integral();
            let want = if m == n { 1.0 } else { 0.0 };
            assert!((v - want).abs() <= 2e-3, "({m},{n}): {v}");
        }
    }
}
