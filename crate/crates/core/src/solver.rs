//! Principal solutions `f = z + C h` of the two-characteristic equation,
//! their inverses, and the ladder of truncation levels.
//!
//! The density `h = f_zbar` is the fixed point of
//!
//! ```text
//! h ↦ μ + ν + μ S h + ν conj(S h),
//! ```
//!
//! a contraction with factor `sup(|μ| + |ν|)` because the discrete Beurling
//! transform is an isometry. The iteration starts from `h = 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::coefficients::{truncate, CoefficientField, TruncationLevel};
use crate::error::{invalid, Error, Result};
use crate::grid::{l2_norm, ComplexField, GridSpec, Meaning, Region};
use crate::transforms::TransformPlan;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// A plane map sampled on a grid as `f(z) = z + displacement(z)` together with
/// its Wirtinger derivatives. Nodes with non-positive Jacobian (or otherwise
/// unreliable data) are flagged and skipped by the diagnostics.
#[derive(Clone, Debug)]
pub struct SampledMap {
    displacement: ComplexField,
    f_z: ComplexField,
    f_zbar: ComplexField,
    level: Option<TruncationLevel>,
    flags: Vec<bool>,
}

impl SampledMap {
    pub fn new(
        displacement: ComplexField,
        f_z: ComplexField,
        f_zbar: ComplexField,
        level: Option<TruncationLevel>,
    ) -> Result<Self> {
        if displacement.spec() != f_z.spec() || f_z.spec() != f_zbar.spec() {
            return Err(invalid("map fields must share a grid"));
        }
        let flags = f_z
            .values()
            .iter()
            .zip(f_zbar.values())
            .map(|(a, b)| !(a.norm_sqr() - b.norm_sqr() > 0.0))
            .collect();
        Ok(Self {
            displacement: displacement.with_meaning(Meaning::Displacement),
            f_z: f_z.with_meaning(Meaning::Derivative),
            f_zbar: f_zbar.with_meaning(Meaning::Derivative),
            level,
            flags,
        })
    }

    pub fn identity(spec: GridSpec) -> Self {
        Self::new(
            ComplexField::zeros(spec, Meaning::Displacement),
            ComplexField::new(spec, vec![ONE; spec.len()], Meaning::Derivative).expect("finite"),
            ComplexField::zeros(spec, Meaning::Derivative),
            None,
        )
        .expect("same grid")
    }

    /// Samples `f` and differentiates it by finite differences.
    pub fn from_fn<F>(spec: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let displacement = ComplexField::sample(|z| f(z) - z, spec, Meaning::Displacement)?;
        Self::from_displacement(displacement, None)
    }

    /// Builds a map from sampled `f(z) − z`, differentiating by finite
    /// differences.
    pub fn from_displacement(displacement: ComplexField, level: Option<TruncationLevel>) -> Result<Self> {
        let (dz, dzb) = displacement.wirtinger();
        let spec = *displacement.spec();
        let f_z = ComplexField::new(
            spec,
            dz.values().iter().map(|v| v + ONE).collect(),
            Meaning::Derivative,
        )?;
        Self::new(displacement, f_z, dzb, level)
    }

    pub fn spec(&self) -> &GridSpec {
        self.displacement.spec()
    }

    pub fn displacement(&self) -> &ComplexField {
        &self.displacement
    }

    pub fn f_z(&self) -> &ComplexField {
        &self.f_z
    }

    pub fn f_zbar(&self) -> &ComplexField {
        &self.f_zbar
    }

    pub fn level(&self) -> Option<TruncationLevel> {
        self.level
    }

    pub fn is_flagged(&self, idx: usize) -> bool {
        self.flags[idx]
    }

    pub fn flagged_count(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub(crate) fn flag(&mut self, idx: usize) {
        self.flags[idx] = true;
    }

    /// `f` at node `idx`.
    pub fn value_at(&self, idx: usize) -> Complex64 {
        self.spec().node_at(idx) + self.displacement.values()[idx]
    }

    pub fn jacobian_at(&self, idx: usize) -> f64 {
        self.f_z.values()[idx].norm_sqr() - self.f_zbar.values()[idx].norm_sqr()
    }

    /// Bilinear evaluation of `f`; `None` outside the window.
    pub fn eval(&self, z: Complex64) -> Option<Complex64> {
        self.displacement.interpolate(z).map(|d| z + d)
    }

    /// Bilinearly interpolated cached derivatives `(f_z, f_zbar)`.
    pub fn derivatives_at(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        Some((self.f_z.interpolate(z)?, self.f_zbar.interpolate(z)?))
    }

    /// `sup |f − other|` over the nodes of `self` inside `window`.
    pub fn sup_distance(&self, other: &SampledMap, window: &Region) -> Result<f64> {
        let spec = self.spec();
        let mut sup: f64 = 0.0;
        for idx in 0..spec.len() {
            let z = spec.node_at(idx);
            if !window.contains(z) {
                continue;
            }
            let other_val = if other.spec() == spec {
                other.value_at(idx)
            } else {
                other
                    .eval(z)
                    .ok_or_else(|| invalid("comparison window leaves the other map's grid"))?
            };
            sup = sup.max((self.value_at(idx) - other_val).norm());
        }
        Ok(sup)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 2000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveDiagnostics {
    pub iterations: usize,
    /// `‖f_zbar − μ f_z − ν conj(f_z)‖₂ / ‖f_z‖₂`.
    pub residual: f64,
    /// `sup(|μ| + |ν|)`, the contraction factor.
    pub contraction_bound: f64,
    /// `‖h_{j+1} − h_j‖ / ‖h_j − h_{j−1}‖` per iteration.
    pub gap_ratios: Vec<f64>,
    pub last_relative_gap: f64,
    pub flagged_nodes: usize,
}

#[derive(Clone, Debug)]
pub struct PrincipalSolution {
    pub map: SampledMap,
    pub diagnostics: SolveDiagnostics,
}

/// Number of consecutive over-bound gap ratios that signal divergence.
const DIVERGENCE_STREAK: usize = 3;
const DIVERGENCE_SLACK: f64 = 0.05;

pub fn solve_principal(
    coeff: &CoefficientField,
    plan: &TransformPlan,
    settings: SolverSettings,
) -> Result<PrincipalSolution> {
    solve_with_level(coeff, plan, settings, None)
}

/// Principal solution for the coefficient truncated at `level`.
pub fn solve_truncated(
    coeff: &CoefficientField,
    level: TruncationLevel,
    plan: &TransformPlan,
    settings: SolverSettings,
) -> Result<PrincipalSolution> {
    solve_with_level(&truncate(coeff, level), plan, settings, Some(level))
}

fn solve_with_level(
    coeff: &CoefficientField,
    plan: &TransformPlan,
    settings: SolverSettings,
    level: Option<TruncationLevel>,
) -> Result<PrincipalSolution> {
    let spec = *plan.spec();
    if coeff.spec() != &spec {
        return Err(invalid("coefficient grid does not match the plan"));
    }
    if !(settings.tol > 0.0) || settings.max_iter == 0 {
        return Err(invalid("solver needs tol > 0 and max_iter >= 1"));
    }
    let bound = coeff.sup_norm();
    if !(bound < 1.0) {
        return Err(invalid(format!("sup(|mu| + |nu|) = {bound} is not below 1")));
    }
    plan.check_support(coeff.mu().values())?;
    plan.check_support(coeff.nu().values())?;

    let mu = coeff.mu().values();
    let nu = coeff.nu().values();
    let active: Vec<usize> = (0..spec.len()).filter(|&i| coeff.is_nonzero_at(i)).collect();

    let mut ws = plan.workspace();
    let mut h = vec![ZERO; spec.len()];
    let mut next = vec![ZERO; spec.len()];
    let mut sh = vec![ZERO; spec.len()];
    let mut gap_ratios = Vec::new();
    let mut prev_gap: Option<f64> = None;
    let mut streak = 0;
    let mut iterations = 0;
    let mut converged = false;
    let mut last_rel = f64::INFINITY;

    while iterations < settings.max_iter {
        iterations += 1;
        let mut gap2 = 0.0;
        for &i in &active {
            let s = sh[i];
            let v = mu[i] * (ONE + s) + nu[i] * (ONE + s.conj());
            gap2 += (v - h[i]).norm_sqr();
            next[i] = v;
        }
        let gap = gap2.sqrt();
        let h_norm = l2_norm(&h);
        if let Some(pg) = prev_gap {
            if pg > 0.0 {
                let ratio = gap / pg;
                gap_ratios.push(ratio);
                if ratio > bound + DIVERGENCE_SLACK {
                    streak += 1;
                    if streak >= DIVERGENCE_STREAK {
                        return Err(Error::Divergence {
                            iteration: iterations,
                            ratio,
                            bound,
                        });
                    }
                } else {
                    streak = 0;
                }
            }
        }
        prev_gap = Some(gap);
        std::mem::swap(&mut h, &mut next);
        last_rel = if h_norm > 0.0 { gap / h_norm } else { gap };
        if last_rel <= settings.tol {
            converged = true;
            break;
        }
        plan.beurling_into(&h, &mut ws, &mut sh);
    }

    plan.beurling_into(&h, &mut ws, &mut sh);
    let f_z: Vec<Complex64> = sh.iter().map(|s| ONE + s).collect();
    let mut res2 = 0.0;
    for i in 0..spec.len() {
        let r = h[i] - mu[i] * f_z[i] - nu[i] * f_z[i].conj();
        res2 += r.norm_sqr();
    }
    let residual = res2.sqrt() / l2_norm(&f_z);
    if !converged {
        return Err(Error::NoConvergence {
            iterations,
            last_gap: last_rel,
            residual,
        });
    }

    let mut disp = vec![ZERO; spec.len()];
    plan.cauchy_into(&h, &mut ws, &mut disp);
    let map = SampledMap::new(
        ComplexField::new(spec, disp, Meaning::Displacement)?,
        ComplexField::new(spec, f_z, Meaning::Derivative)?,
        ComplexField::new(spec, h, Meaning::Derivative)?,
        level,
    )?;
    let flagged_nodes = map.flagged_count();
    Ok(PrincipalSolution {
        map,
        diagnostics: SolveDiagnostics {
            iterations,
            residual,
            contraction_bound: bound,
            gap_ratios,
            last_relative_gap: last_rel,
            flagged_nodes,
        },
    })
}

/// Maximum Newton steps per target in [`invert_map`].
pub const NEWTON_MAX_STEPS: usize = 50;

/// Uniform bucket grid over the node images of a map, for nearest-image
/// seeding.
struct ImageIndex {
    origin: Complex64,
    cell: f64,
    dim: usize,
    offsets: Vec<usize>,
    entries: Vec<usize>,
    images: Vec<Complex64>,
}

impl ImageIndex {
    fn new(f: &SampledMap) -> Self {
        let spec = f.spec();
        let images: Vec<Complex64> = (0..spec.len()).map(|i| f.value_at(i)).collect();
        let (mut lo, mut hi) = (images[0], images[0]);
        for w in &images {
            lo = Complex64::new(lo.re.min(w.re), lo.im.min(w.im));
            hi = Complex64::new(hi.re.max(w.re), hi.im.max(w.im));
        }
        let dim = spec.resolution();
        let extent = (hi.re - lo.re).max(hi.im - lo.im).max(f64::MIN_POSITIVE);
        let cell = extent / dim as f64 * (1.0 + 1e-12);
        let mut counts = vec![0usize; dim * dim + 1];
        let key = |w: Complex64| -> usize {
            let a = (((w.re - lo.re) / cell) as usize).min(dim - 1);
            let b = (((w.im - lo.im) / cell) as usize).min(dim - 1);
            a * dim + b
        };
        for w in &images {
            counts[key(*w) + 1] += 1;
        }
        for k in 1..counts.len() {
            counts[k] += counts[k - 1];
        }
        let mut fill = counts.clone();
        let mut entries = vec![0usize; images.len()];
        for (idx, w) in images.iter().enumerate() {
            let k = key(*w);
            entries[fill[k]] = idx;
            fill[k] += 1;
        }
        Self {
            origin: lo,
            cell,
            dim,
            offsets: counts,
            entries,
            images,
        }
    }

    fn nearest(&self, w: Complex64) -> usize {
        let d = self.dim as isize;
        let fa = ((w.re - self.origin.re) / self.cell).floor();
        let fb = ((w.im - self.origin.im) / self.cell).floor();
        let a0 = (fa.clamp(-1.0, d as f64) as isize).clamp(0, d - 1);
        let b0 = (fb.clamp(-1.0, d as f64) as isize).clamp(0, d - 1);
        let mut best = (f64::INFINITY, 0usize);
        for ring in 0..d {
            for a in (a0 - ring).max(0)..=(a0 + ring).min(d - 1) {
                for b in (b0 - ring).max(0)..=(b0 + ring).min(d - 1) {
                    if (a - a0).abs() != ring && (b - b0).abs() != ring {
                        continue;
                    }
                    let k = (a * d + b) as usize;
                    for &idx in &self.entries[self.offsets[k]..self.offsets[k + 1]] {
                        let dist = (self.images[idx] - w).norm();
                        if dist < best.0 {
                            best = (dist, idx);
                        }
                    }
                }
            }
            // Every unvisited bucket is at least `ring * cell` away.
            if best.0.is_finite() && best.0 <= ring as f64 * self.cell {
                break;
            }
        }
        best.1
    }
}

/// Wirtinger derivatives of the bilinear interpolant at `z`, by one-sided
/// differences pointing into the cell that holds `z`.
fn interpolant_derivatives(f: &SampledMap, z: Complex64) -> Option<(Complex64, Complex64)> {
    let step = 1e-7 * f.spec().spacing();
    let v = f.eval(z)?;
    let (u, t) = f.spec().fractional_index(z);
    let sx = if u.fract() < 0.5 { step } else { -step };
    let sy = if t.fract() < 0.5 { step } else { -step };
    let fx = (f.eval(z + Complex64::new(sx, 0.0))? - v) / sx;
    let fy = (f.eval(z + Complex64::new(0.0, sy))? - v) / sy;
    let i = Complex64::new(0.0, 1.0);
    Some(((fx - i * fy) * 0.5, (fx + i * fy) * 0.5))
}

fn newton_invert(f: &SampledMap, w: Complex64, seed: Complex64, tol: f64, exact: bool) -> Option<Complex64> {
    let mut z = seed;
    let mut r = w - f.eval(z)?;
    for _ in 0..NEWTON_MAX_STEPS {
        if r.norm() <= tol {
            return Some(z);
        }
        let (a, b) = if exact {
            interpolant_derivatives(f, z)?
        } else {
            f.derivatives_at(z)?
        };
        let jac = a.norm_sqr() - b.norm_sqr();
        if !(jac > 0.0) {
            return None;
        }
        let delta = (a.conj() * r - b * r.conj()) / jac;
        let mut t = 1.0;
        loop {
            let cand = z + delta * t;
            if let Some(v) = f.eval(cand) {
                let rc = w - v;
                if rc.norm() < r.norm() || t < 1e-3 {
                    z = cand;
                    r = rc;
                    break;
                }
            } else if t < 1e-3 {
                return None;
            }
            t *= 0.5;
        }
    }
    (r.norm() <= tol).then_some(z)
}

/// Solves `f(z) = w` for every target by Newton iteration on the bilinear
/// interpolant, seeded at the node whose image is nearest to `w`. `None`
/// marks targets outside the image or stagnating after 50 steps.
pub fn invert_map(f: &SampledMap, targets: &[Complex64], tol_inv: f64) -> Vec<Option<Complex64>> {
    let index = ImageIndex::new(f);
    targets
        .iter()
        .map(|&w| {
            let seed = f.spec().node_at(index.nearest(w));
            // The cached derivatives can stall across a kink of the
            // interpolant; retry with its own one-sided Jacobian.
            newton_invert(f, w, seed, tol_inv, false)
                .or_else(|| newton_invert(f, w, seed, tol_inv, true))
        })
        .collect()
}

/// Samples `f⁻¹` on `spec` via [`invert_map`]. Derivatives come from finite
/// differences; failed nodes and their stencil neighbours are flagged.
pub fn invert_on_grid(f: &SampledMap, spec: GridSpec, tol_inv: f64) -> Result<SampledMap> {
    let targets: Vec<Complex64> = spec.nodes().collect();
    let found = invert_map(f, &targets, tol_inv);
    let disp: Vec<Complex64> = found
        .iter()
        .zip(&targets)
        .map(|(z, w)| z.map_or(ZERO, |z| z - w))
        .collect();
    let mut g = SampledMap::from_displacement(
        ComplexField::new(spec, disp, Meaning::Displacement)?,
        f.level(),
    )?;
    let n = spec.resolution();
    for (idx, z) in found.iter().enumerate() {
        if z.is_none() {
            let (i, j) = spec.coords(idx);
            g.flag(idx);
            for (di, dj) in [(-1isize, 0isize), (1, 0), (0, -1), (0, 1), (2, 0), (-2, 0), (0, 2), (0, -2)] {
                let (a, b) = (i as isize + di, j as isize + dj);
                if a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n {
                    g.flag(spec.index(a as usize, b as usize));
                }
            }
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, Serialize)]
pub struct FarFieldProfile {
    /// `(R, sup_{|z| = R} |f(z) − z|)`.
    pub points: Vec<(f64, f64)>,
    /// Least-squares `−d log(err)/d log(R)`; `None` when fewer than two
    /// radii carry a positive error.
    pub exponent: Option<f64>,
}

/// Samples per circle in [`far_field_profile`].
pub const CIRCLE_SAMPLES: usize = 720;

pub fn far_field_profile(f: &SampledMap, radii: &[f64]) -> Result<FarFieldProfile> {
    let mut points = Vec::with_capacity(radii.len());
    for &r in radii {
        if !(r > 0.0) {
            return Err(invalid(format!("radius {r} must be positive")));
        }
        let mut sup: f64 = 0.0;
        for k in 0..CIRCLE_SAMPLES {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_SAMPLES as f64);
            let d = f
                .displacement()
                .interpolate(z)
                .ok_or_else(|| invalid(format!("circle of radius {r} leaves the window")))?;
            sup = sup.max(d.norm());
        }
        points.push((r, sup));
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, e)| *e > 0.0)
        .map(|(r, e)| (r.ln(), e.ln()))
        .collect();
    let exponent = (logs.len() >= 2).then(|| {
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        -sxy / sxx
    });
    Ok(FarFieldProfile { points, exponent })
}

#[derive(Clone, Copy, Debug)]
pub struct LadderOptions {
    pub solver: SolverSettings,
    /// Newton tolerance for the per-level inverses.
    pub tol_inv: f64,
    /// Compact window on which the Cauchy gaps are measured.
    pub gap_window: Region,
    pub compute_inverses: bool,
}

#[derive(Clone, Debug)]
pub struct TruncationLadder {
    pub levels: Vec<TruncationLevel>,
    pub solutions: Vec<PrincipalSolution>,
    /// Empty when inverses were not requested.
    pub inverses: Vec<SampledMap>,
    /// `sup_window |f_{n_{i+1}} − f_{n_i}|` for each adjacent pair.
    pub cauchy_gaps: Vec<f64>,
}

impl TruncationLadder {
    /// Solution at the highest level: the computed stand-in for the limit.
    pub fn limit(&self) -> &SampledMap {
        &self.solutions.last().expect("ladder is nonempty").map
    }
}

pub fn run_ladder(
    coeff: &CoefficientField,
    levels: &[usize],
    plan: &TransformPlan,
    options: &LadderOptions,
) -> Result<TruncationLadder> {
    if levels.is_empty() {
        return Err(invalid("ladder needs at least one level"));
    }
    if levels.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("ladder levels must be strictly increasing"));
    }
    let mut out = TruncationLadder {
        levels: Vec::with_capacity(levels.len()),
        solutions: Vec::with_capacity(levels.len()),
        inverses: Vec::new(),
        cauchy_gaps: Vec::new(),
    };
    for &n in levels {
        let level = TruncationLevel::new(n)?;
        let sol = solve_truncated(coeff, level, plan, options.solver).map_err(|e| {
            Error::AtLevel {
                level: n,
                source: Box::new(e),
            }
        })?;
        if let Some(prev) = out.solutions.last() {
            out.cauchy_gaps
                .push(sol.map.sup_distance(&prev.map, &options.gap_window)?);
        }
        if options.compute_inverses {
            out.inverses
                .push(invert_on_grid(&sol.map, *plan.spec(), options.tol_inv)?);
        }
        out.levels.push(level);
        out.solutions.push(sol);
    }
    Ok(out)
}
