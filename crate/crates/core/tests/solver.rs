use beltrami::cli::example_coefficient;
use beltrami::coefficients::CoefficientField;
use beltrami::grid::{GridSpec, Region};
use beltrami::oracle::{f_k_example, g_k_example, mu_example, ExampleParams};
use beltrami::solver::{
    far_field_profile, invert_on_grid, run_ladder, solve_principal, LadderOptions, SolverSettings,
};
use beltrami::transforms::TransformPlan;
use beltrami::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn settings() -> SolverSettings {
    SolverSettings { tol: 1e-8, max_iter: 2000 }
}

#[test]
fn example_k3_at_256() {
    let spec = GridSpec::new(ZERO, 1.5, 256).unwrap();
    let p = ExampleParams::new(1.0, 3.0).unwrap();
    let plan = TransformPlan::new(spec);
    let sol = solve_principal(&example_coefficient(spec, &p).unwrap(), &plan, settings()).unwrap();
    let d = &sol.diagnostics;
    assert!(d.last_relative_gap <= 1e-8);
    assert!(d.residual < 1e-6, "{}", d.residual);
    assert_eq!(d.flagged_nodes, 0);
    assert!(d.contraction_bound < 1.0);

    let mut errs: Vec<f64> = (0..spec.len())
        .filter(|&i| spec.node_at(i).norm() <= 1.2)
        .map(|i| (sol.map.value_at(i) - f_k_example(spec.node_at(i), &p)).norm())
        .collect();
    errs.sort_by(f64::total_cmp);
    assert!(errs[errs.len() - 1] < 0.02);
    assert!(errs[errs.len() / 2] < 2e-3);

    let g = invert_on_grid(&sol.map, spec, 1e-10).unwrap();
    assert_eq!(g.flagged_count(), 0);
    for k in 0..30 {
        let y = Complex64::from_polar(0.03 * k as f64, 0.4 * k as f64);
        let w = g.eval(y).unwrap();
        assert!((w - g_k_example(y, &p)).norm() < 0.01, "{y}");
        assert!((sol.map.eval(w).unwrap() - y).norm() < 2e-3, "{y}");
    }
}

#[test]
fn ladder_gaps_follow_closed_form() {
    let spec = GridSpec::new(ZERO, 1.5, 256).unwrap();
    let plan = TransformPlan::new(spec);
    let coeff = CoefficientField::from_fns(spec, |z| mu_example(z, 1.0), |_| ZERO).unwrap();
    let opts = LadderOptions {
        solver: settings(),
        tol_inv: 1e-10,
        gap_window: Region::disk(ZERO, 1.2),
        compute_inverses: true,
    };
    let levels = [2, 3, 5, 9];
    let ladder = run_ladder(&coeff, &levels, &plan, &opts).unwrap();
    assert_eq!(ladder.inverses.len(), levels.len());
    assert_eq!(ladder.solutions[0].diagnostics.iterations, 1);
    for (w, gap) in levels.windows(2).zip(&ladder.cauchy_gaps) {
        let (k, kk) = (w[0] as f64, w[1] as f64);
        let exact = (kk - k) / (k * (kk - 1.0));
        assert!((gap - exact).abs() < 0.01, "{k}->{kk}: {gap} vs {exact}");
    }
    assert!(ladder.limit().level().unwrap().n() == 9);
}

#[test]
fn ladder_rejects_unsorted_levels() {
    let spec = GridSpec::new(ZERO, 1.5, 32).unwrap();
    let plan = TransformPlan::new(spec);
    let opts = LadderOptions {
        solver: settings(),
        tol_inv: 1e-10,
        gap_window: Region::disk(ZERO, 1.2),
        compute_inverses: false,
    };
    let coeff = CoefficientField::zero(spec);
    assert!(run_ladder(&coeff, &[3, 3], &plan, &opts).is_err());
    assert!(run_ladder(&coeff, &[], &plan, &opts).is_err());
}

#[test]
fn identity_outside_support_for_radial_example() {
    // f_k is the identity outside the unit disk, so the far field is tiny.
    let spec = GridSpec::new(ZERO, 3.0, 256).unwrap();
    let p = ExampleParams::new(1.0, 3.0).unwrap();
    let plan = TransformPlan::new(spec);
    let sol = solve_principal(&example_coefficient(spec, &p).unwrap(), &plan, settings()).unwrap();
    let profile = far_field_profile(&sol.map, &[1.5, 2.0, 2.5]).unwrap();
    for (_, e) in profile.points {
        assert!(e < 0.02);
    }
}
