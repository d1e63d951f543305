//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::Instant;

use beltrami::analysis::{
    annulus_capacity, classify, divergence_check, equicontinuity_bound, inverse_poletsky_check, Annulus,
    CapacityOptions, ClassifyOptions, DivergenceOptions, Eta, Verdict,
};
use beltrami::cli::{example_coefficient, pointwise_k_mu};
use beltrami::coefficients::CoefficientField;
use beltrami::dilatation::change_of_variables_check;
use beltrami::grid::{region_weights, ComplexField, GridSpec, Meaning, Region};
use beltrami::oracle::{f_k_example, g_k_example, k_inverse_k_example, mu_example, q_example, ExampleParams};
use beltrami::solver::{
    far_field_profile, invert_map, invert_on_grid, run_ladder, solve_principal, LadderOptions, SampledMap,
    SolverSettings, TruncationLadder,
};
use beltrami::transforms::{cauchy_cell_kernel, TransformPlan};
use beltrami::{Complex64, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const LADDER: [usize; 5] = [2, 3, 5, 9, 17];
const TOL_INV: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn settings() -> SolverSettings {
    SolverSettings { tol: 1e-8, max_iter: 2000 }
}

fn example_grid(resolution: usize) -> GridSpec {
    GridSpec::new(ZERO, 1.5, resolution).expect("grid")
}

fn params(k: f64) -> ExampleParams {
    ExampleParams::new(1.0, k).expect("example parameters")
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

/// Sup and median of `|f − f_k|` over nodes with `|z| <= 1.2`.
fn oracle_errors(f: &SampledMap, p: &ExampleParams) -> (f64, f64) {
    let spec = f.spec();
    let mut errs: Vec<f64> = (0..spec.len())
        .filter(|&i| spec.node_at(i).norm() <= 1.2)
        .map(|i| (f.value_at(i) - f_k_example(spec.node_at(i), p)).norm())
        .collect();
    errs.sort_by(f64::total_cmp);
    (errs[errs.len() - 1], errs[errs.len() / 2])
}

/// Shared Example-1 data at 1024².
struct Shared {
    ladder: TruncationLadder,
    /// Inverse of `f_3` on the same grid.
    g3: SampledMap,
}

impl Shared {
    fn f(&self, k: usize) -> &SampledMap {
        let i = LADDER.iter().position(|&n| n == k).expect("ladder level");
        &self.ladder.solutions[i].map
    }
}

fn shared() -> Result<Shared> {
    let spec = example_grid(1024);
    let plan = TransformPlan::new(spec);
    let coeff = CoefficientField::from_fns(spec, |z| mu_example(z, 1.0), |_| ZERO)?;
    let opts = LadderOptions {
        solver: settings(),
        tol_inv: TOL_INV,
        gap_window: Region::disk(ZERO, 1.2),
        compute_inverses: false,
    };
    let ladder = run_ladder(&coeff, &LADDER, &plan, &opts)?;
    let g3 = invert_on_grid(&ladder.solutions[1].map, spec, TOL_INV)?;
    Ok(Shared { ladder, g3 })
}

fn zero_identity() -> Result<Outcome> {
    let t = Instant::now();
    let spec = GridSpec::new(ZERO, 1.0, 256)?;
    let plan = TransformPlan::new(spec);
    let sol = solve_principal(&CoefficientField::zero(spec), &plan, settings())?;
    let sup = (0..spec.len())
        .map(|i| (sol.map.value_at(i) - spec.node_at(i)).norm())
        .fold(0.0, f64::max);
    let secs = t.elapsed().as_secs_f64();
    outcome(sup <= 1e-10 && secs < 1.0, format!("sup|f - z| = {sup:.2e}, {secs:.3} s"))
}

fn oracle_reproduction() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for k in [3.0, 5.0] {
        let p = params(k);
        let mut previous = None;
        for res in [1024, 2048] {
            let t = Instant::now();
            let spec = example_grid(res);
            let plan = TransformPlan::new(spec);
            let sol = solve_principal(&example_coefficient(spec, &p)?, &plan, settings())?;
            let secs = t.elapsed().as_secs_f64();
            let (sup, median) = oracle_errors(&sol.map, &p);
            if res == 1024 {
                pass &= sup <= 0.05 && median <= 0.01;
            }
            if let Some((s0, m0)) = previous {
                pass &= sup < s0 && median < m0;
            }
            pass &= secs <= 120.0;
            previous = Some((sup, median));
            parts.push(format!("k={k} {res}²: sup {sup:.2e} median {median:.2e} ({secs:.1} s)"));
        }
    }
    outcome(pass, parts.join("; "))
}

fn inverse_reproduction(s: &Shared) -> Result<Outcome> {
    let p = params(3.0);
    let f3 = s.f(3);
    let spec = f3.spec();
    let targets: Vec<Complex64> = spec.nodes().filter(|y| y.norm() <= 0.9).collect();
    let found = invert_map(f3, &targets, TOL_INV);
    let (mut inner, mut outer, mut failed) = (0.0f64, 0.0f64, 0);
    for (y, z) in targets.iter().zip(&found) {
        let r = y.norm();
        let Some(z) = z else {
            failed += 1;
            continue;
        };
        let exact = g_k_example(*y, &p);
        if r <= 0.45 {
            inner = inner.max((z - exact).norm());
        } else if r >= 0.55 {
            outer = outer.max((z - exact).norm() / exact.norm());
        }
    }
    outcome(
        failed == 0 && inner <= 1e-3 && outer <= 0.01,
        format!("sup |y|<=0.45: {inner:.2e}; max rel 0.55<=|y|<=0.9: {outer:.2e}; failed {failed}"),
    )
}

fn dilatation_symmetry() -> Result<Outcome> {
    let p = params(3.0);
    let g = |y: Complex64| g_k_example(y, &p);
    let step = 1e-5;
    let mut worst: f64 = 0.0;
    let mut worst_formula: f64 = 0.0;
    for i in 0..40 {
        let r = 0.05 + 1.3 * i as f64 / 40.0;
        if (r - p.image_radius()).abs() < 0.02 || (r - 1.0).abs() < 0.02 {
            continue;
        }
        for j in 0..8 {
            let y = Complex64::from_polar(r, 0.3 + 2.0 * PI * j as f64 / 8.0);
            let fd = pointwise_k_mu(g, y, step)?;
            worst = worst.max((fd / k_inverse_k_example(y, &p) - 1.0).abs());
            if r > p.image_radius() && r < 1.0 {
                worst_formula = worst_formula.max((fd / ((r + 1.0) / r) - 1.0).abs());
            }
        }
    }
    let at = pointwise_k_mu(g, c(0.8, 0.0), step)?;
    outcome(
        worst <= 0.05 && worst_formula <= 0.05 && (at - 2.25).abs() <= 0.05 * 2.25,
        format!("max rel err {worst:.2e} (annulus formula {worst_formula:.2e}); K at 0.8 = {at:.6}"),
    )
}

fn change_of_variables(s: &Shared) -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut analytic = Vec::new();
    for res in [64, 128, 256] {
        let f = SampledMap::from_fn(GridSpec::new(ZERO, 1.5, res)?, |z| 2.0 * z)?;
        let g = SampledMap::from_fn(GridSpec::new(ZERO, 2.5, res)?, |w| 0.5 * w)?;
        let cv = change_of_variables_check(&f, &g, &Region::disk(ZERO, 0.95), 2.0)?;
        pass &= cv.rel_gap <= 1e-6;
        analytic.push(format!("{:.1e}", cv.rel_gap));
    }
    parts.push(format!("2z at 64/128/256: {}", analytic.join("/")));
    for exponent in [2.0, 1.5] {
        let cv = change_of_variables_check(s.f(3), &s.g3, &Region::disk(ZERO, 0.95), exponent)?;
        pass &= cv.rel_gap <= 0.05;
        parts.push(format!("example p={exponent}: {:.2e}", cv.rel_gap));
    }
    outcome(pass, parts.join("; "))
}

fn transform_oracles() -> Result<Outcome> {
    let spec = GridSpec::new(ZERO, 1.0, 128)?;
    let plan = TransformPlan::new(spec);
    let side = 2.0 * spec.halfwidth();
    let mut worst_iso: f64 = 0.0;
    for (a, b) in [(1, 0), (0, 1), (3, -2), (7, 5), (-11, 4)] {
        let h = ComplexField::sample(
            |z| {
                let t = 2.0 * PI * (a as f64 * (z.re + 1.0) + b as f64 * (z.im + 1.0)) / side;
                Complex64::from_polar(1.0, t) + 0.5 * Complex64::from_polar(1.0, -2.0 * t)
            },
            spec,
            Meaning::Coefficient,
        )?;
        worst_iso = worst_iso.max((plan.beurling_isometry_ratio(&h)? - 1.0).abs());
    }

    let disk = Region::disk(ZERO, 0.5);
    let mut values = vec![ZERO; spec.len()];
    let weights = region_weights(&spec, |z| disk.signed_distance(z));
    for &(i, w) in &weights {
        values[i] = c(w / spec.cell_area(), 0.0);
    }
    let ind = ComplexField::new(spec, values, Meaning::Coefficient)?;
    let ct = plan.cauchy_transform(&ind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut worst_exact, mut worst_direct): (f64, f64) = (0.0, 0.0);
    let n = spec.resolution();
    for _ in 0..20 {
        let (i, j) = (rng.gen_range(n / 5..4 * n / 5), rng.gen_range(n / 5..4 * n / 5));
        let z = spec.node(i, j);
        let exact = if z.norm() < 0.5 { z.conj() } else { 0.25 / z };
        let got = ct.get(i, j);
        let mut direct = ZERO;
        for &(k, w) in &weights {
            let (a, b) = spec.coords(k);
            let kern = cauchy_cell_kernel(i as isize - a as isize, j as isize - b as isize, spec.spacing());
            direct += kern * (w / spec.cell_area());
        }
        worst_exact = worst_exact.max((got - exact).norm() / exact.norm());
        worst_direct = worst_direct.max((got - direct).norm() / direct.norm());
    }
    outcome(
        worst_iso <= 1e-10 && worst_exact <= 0.01 && worst_direct <= 1e-8,
        format!(
            "isometry dev {worst_iso:.1e}; disk vs closed form {worst_exact:.2e}, vs direct sum {worst_direct:.1e}"
        ),
    )
}

fn hydrodynamic_decay() -> Result<Outcome> {
    let spec = GridSpec::new(ZERO, 5.0, 512)?;
    let plan = TransformPlan::new(spec);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bumps: Vec<(Complex64, f64, Complex64, Complex64)> = (0..4)
        .map(|_| {
            let center = Complex64::from_polar(rng.gen_range(0.0..0.2), rng.gen_range(0.0..2.0 * PI));
            let radius = rng.gen_range(0.15..0.3);
            let m = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI));
            let v = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI));
            (center, radius, m, v)
        })
        .collect();
    let sum = |z: Complex64, pick: fn(&(Complex64, f64, Complex64, Complex64)) -> Complex64| {
        bumps
            .iter()
            .map(|b| {
                let s = (z - b.0).norm_sqr() / (b.1 * b.1);
                pick(b) * (1.0 - s).max(0.0).powi(3)
            })
            .sum::<Complex64>()
    };
    let mu = ComplexField::sample(|z| sum(z, |b| b.2), spec, Meaning::Coefficient)?;
    let nu = ComplexField::sample(|z| sum(z, |b| b.3), spec, Meaning::Coefficient)?;
    let peak = mu
        .values()
        .iter()
        .zip(nu.values())
        .map(|(a, b)| a.norm() + b.norm())
        .fold(0.0, f64::max);
    let scale = 0.5 / peak;
    let scaled = |f: &ComplexField| {
        ComplexField::new(spec, f.values().iter().map(|v| v * scale).collect(), Meaning::Coefficient)
    };
    let coeff = CoefficientField::new(scaled(&mu)?, scaled(&nu)?)?;
    let support = coeff.support_radius();
    let sol = solve_principal(&coeff, &plan, settings())?;
    let profile = far_field_profile(&sol.map, &[1.0, 2.0, 4.0])?;
    let exponent = profile.exponent.unwrap_or(f64::NAN);
    outcome(
        exponent >= 0.9 && support <= 0.5,
        format!(
            "support {support:.3}, errors {:?}, exponent {exponent:.3}",
            profile.points.iter().map(|p| format!("{:.2e}", p.1)).collect::<Vec<_>>()
        ),
    )
}

fn ladder_convergence(s: &Shared) -> Result<Outcome> {
    let gaps = &s.ladder.cauchy_gaps;
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    outcome(
        decreasing,
        format!("gaps {:?}", gaps.iter().map(|g| format!("{g:.4}")).collect::<Vec<_>>()),
    )
}

fn capacity_oracle() -> Result<Outcome> {
    let mut pass = true;
    let mut parts = Vec::new();
    for r2 in [2.0, E] {
        let cap = annulus_capacity(ZERO, 1.0, r2, 512, &CapacityOptions::default())?;
        let exact = 2.0 * PI / r2.ln();
        let rel = (cap.energy - exact).abs() / exact;
        pass &= rel <= 0.05;
        parts.push(format!("(1, {r2:.4}): {:.4} vs {exact:.4}, rel {rel:.2e}", cap.energy));
    }
    outcome(pass, parts.join("; "))
}

fn inverse_poletsky(s: &Shared) -> Result<Outcome> {
    let id = SampledMap::identity(GridSpec::new(ZERO, 2.5, 256)?);
    let one = |_: Complex64| 1.0;
    let round = inverse_poletsky_check(&id, &id, &one, &Annulus::new(ZERO, 1.0, 2.0)?, Eta::Log, 512)?;
    let rel = (round.lhs - round.rhs).abs() / round.rhs;
    let mut pass = rel <= 0.05;
    let mut parts = vec![format!("identity lhs {:.4} rhs {:.4} rel {rel:.2e}", round.lhs, round.rhs)];
    let q = |y: Complex64| q_example(y, 1.0);
    for (y0, r1, r2) in [(ZERO, 0.2, 0.6), (c(0.1, 0.1), 0.15, 0.5), (c(-0.2, 0.0), 0.1, 0.35)] {
        let check = inverse_poletsky_check(s.f(3), &s.g3, &q, &Annulus::new(y0, r1, r2)?, Eta::Log, 512)?;
        pass &= check.holds;
        parts.push(format!("{y0} ({r1}, {r2}): {:.3} <= {:.3}", check.lhs, check.rhs));
    }
    outcome(pass, parts.join("; "))
}

fn classifier() -> Result<Outcome> {
    let opts = ClassifyOptions::default();
    let probes = [ZERO, c(0.3, 0.0), c(-0.1, 0.4)];
    let one = |_: Complex64| 1.0;
    let q = |y: Complex64| q_example(y, 1.0);
    let constant = classify(&one, &probes, &opts)?.verdict;
    let example = classify(&q, &probes, &opts)?.verdict;
    let div = divergence_check(&q, ZERO, opts.delta, &DivergenceOptions::default())?;
    let exact = (opts.delta + 1.0).ln();
    let value = div.value.unwrap_or(f64::NAN);
    let rel = (value - exact).abs() / exact;
    outcome(
        constant == Verdict::Compact && example == Verdict::Normal && rel <= 0.01,
        format!("Q=1: {constant:?}; example Q: {example:?}; divergence value {value:.6} vs {exact:.6}"),
    )
}

fn equicontinuity(s: &Shared) -> Result<Outcome> {
    let k = Region::disk(ZERO, 0.6);
    let g = Region::disk(ZERO, 1.0);
    let maps: Vec<&SampledMap> = s.ladder.solutions.iter().map(|sol| &sol.map).collect();
    let all = equicontinuity_bound(&maps, &k, &g, 10_000, 0)?;
    // Family bound over {f_n : n <= K} for K = 5, 9, 17.
    let family: Vec<f64> = [3, 4, 5]
        .iter()
        .map(|&m| all.per_map[..m].iter().copied().fold(0.0, f64::max))
        .collect();
    let lo = family.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = family.iter().copied().fold(0.0, f64::max);
    let spread = (hi - lo) / hi;
    outcome(
        hi.is_finite() && spread < 0.1,
        format!(
            "C_hat(K=5,9,17) = {:?}, spread {spread:.2e}; per map {:?}",
            family.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>(),
            all.per_map.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn report(n: usize, name: &str, result: Result<Outcome>) -> bool {
    match result {
        Ok(o) => {
            println!("{} {n:>2} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
            o.pass
        }
        Err(e) => {
            println!("FAIL {n:>2} {name}: error: {e}");
            false
        }
    }
}

fn main() -> ExitCode {
    let mut ok = true;
    ok &= report(1, "zero-coefficient identity", zero_identity());
    ok &= report(2, "example oracle reproduction", oracle_reproduction());
    let shared = shared();
    let with_shared = |f: fn(&Shared) -> Result<Outcome>| match &shared {
        Ok(s) => f(s),
        Err(e) => Err(beltrami::Error::InvalidArgument(format!("shared ladder failed: {e}"))),
    };
    ok &= report(3, "inverse reproduction", with_shared(inverse_reproduction));
    ok &= report(4, "dilatation symmetry", dilatation_symmetry());
    ok &= report(5, "change of variables", with_shared(change_of_variables));
    ok &= report(6, "transform oracles", transform_oracles());
    ok &= report(7, "hydrodynamic decay", hydrodynamic_decay());
    ok &= report(8, "ladder convergence", with_shared(ladder_convergence));
    ok &= report(9, "capacity oracle", capacity_oracle());
    ok &= report(10, "inverse Poletsky inequality", with_shared(inverse_poletsky));
    ok &= report(11, "classifier verdicts", classifier());
    ok &= report(12, "equicontinuity", with_shared(equicontinuity));
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
