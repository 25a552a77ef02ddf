use unravel_bench::{efficiency_ratio_grid, lab, natural, reference_povm, short_ensemble};
use unravel_core::{povm_fi, qfi_steady_closed, simulate, GaussianState};

#[test]
fn grid_points_are_evaluable() {
    let grid = efficiency_ratio_grid(5);
    assert_eq!(grid.len(), 25);
    let spec = reference_povm();
    for p in &grid {
        let h = qfi_steady_closed(p).unwrap();
        assert!(!h.divergent);
        assert!(povm_fi(p, &spec).unwrap() <= h.value);
    }
    assert_eq!(natural().eta, 1.0);
}

#[test]
fn short_ensemble_runs() {
    let cfg = short_ensemble(4);
    let r = simulate(&lab(1.0), &GaussianState::thermal(100.0).unwrap(), &cfg).unwrap();
    assert_eq!(r.n_samples(), 2);
    assert!((r.time(1) - 2e-6).abs() < 1e-9);
}
