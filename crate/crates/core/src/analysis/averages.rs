use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::{Outcome, Weight};
use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre_rule;
use crate::solver::CIRCLE_SAMPLES;

fn circle_point(y0: Complex64, r: f64, k: usize, samples: usize) -> Complex64 {
    y0 + Complex64::from_polar(r, 2.0 * PI * k as f64 / samples as f64)
}

/// `q_{y0}(r) = (1/2π) ∫ Q(y0 + r e^{iθ}) dθ` by the trapezoid rule on 720
/// samples.
pub fn circle_average<W: Weight + ?Sized>(q: &W, y0: Complex64, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid(format!("circle radius must be positive, got {r}")));
    }
    let mut acc = 0.0;
    for k in 0..CIRCLE_SAMPLES {
        let y = circle_point(y0, r, k, CIRCLE_SAMPLES);
        if !q.covers(y) {
            return Err(invalid(format!("circle of radius {r} about {y0} leaves the weight's window")));
        }
        acc += q.value(y);
    }
    Ok(acc / CIRCLE_SAMPLES as f64)
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilityScan {
    pub outcome: Outcome,
    /// Radii whose circle average is finite.
    pub witnesses: Vec<f64>,
    pub finite_fraction: f64,
}

/// Default share of finite-average radii standing in for a set of radii of
/// positive measure.
pub const INTEGRABILITY_SHARE: f64 = 0.1;

/// Evaluates circle averages at `samples` midpoint radii of `(r1, r2)`;
/// passes when at least `share` of them are finite. Circles leaving the
/// weight's window count as non-finite.
pub fn circle_integrability_scan<W: Weight + ?Sized>(
    q: &W,
    y0: Complex64,
    r1: f64,
    r2: f64,
    samples: usize,
    share: f64,
) -> Result<IntegrabilityScan> {
    if !(r1 >= 0.0 && r1 < r2 && r2.is_finite()) || samples == 0 {
        return Err(invalid("scan needs 0 <= r1 < r2 and samples >= 1"));
    }
    let step = (r2 - r1) / samples as f64;
    let witnesses: Vec<f64> = (0..samples)
        .map(|i| r1 + (i as f64 + 0.5) * step)
        .filter(|&r| circle_average(q, y0, r).is_ok_and(f64::is_finite))
        .collect();
    let finite_fraction = witnesses.len() as f64 / samples as f64;
    Ok(IntegrabilityScan {
        outcome: if finite_fraction >= share {
            Outcome::Pass
        } else {
            Outcome::Fail
        },
        witnesses,
        finite_fraction,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DivergenceOptions {
    /// Octaves `[δ 2^{-j}, δ 2^{-j+1}]`, `j = 1..=octaves`.
    pub octaves: usize,
    /// Trailing increment ratios averaged for the decision.
    pub window: usize,
    /// Mean trailing ratio at or above which the integral is declared
    /// divergent.
    pub threshold: f64,
    /// Fewer usable octaves than this leave the test undetermined.
    pub min_octaves: usize,
    /// Radii below `floor_factor · floor()` of the weight are not used.
    pub floor_factor: f64,
}

impl Default for DivergenceOptions {
    fn default() -> Self {
        Self {
            octaves: 60,
            window: 5,
            threshold: 0.9,
            min_octaves: 6,
            floor_factor: 4.0,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceResult {
    pub outcome: Outcome,
    /// Extrapolated `∫_0^δ dt/(t q(t))` when the tail converges.
    pub value: Option<f64>,
    /// `∫_ε^δ dt/(t q(t))` down to the smallest usable radius `ε`.
    pub partial: f64,
    pub increments: Vec<f64>,
    pub mean_ratio: Option<f64>,
    pub certificate: Option<String>,
}

const OCTAVE_NODES: usize = 12;

/// Decides whether `∫_0^δ dt/(t q_{w0}(t))` diverges from the per-octave
/// increments: geometric decay (mean trailing ratio below the threshold)
/// means convergence, and the tail is summed as a geometric series.
pub fn divergence_check<W: Weight + ?Sized>(
    q: &W,
    w0: Complex64,
    delta: f64,
    opts: &DivergenceOptions,
) -> Result<DivergenceResult> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    if opts.octaves < 2 || opts.window == 0 || !(opts.threshold > 0.0 && opts.threshold < 1.0) {
        return Err(invalid("divergence options out of range"));
    }
    circle_average(q, w0, delta)?;
    let (x, w) = gauss_legendre_rule(OCTAVE_NODES);
    let ln2 = std::f64::consts::LN_2;
    let mut increments = Vec::new();
    let mut partial = 0.0;
    for j in 1..=opts.octaves {
        let lo = delta * 0.5f64.powi(j as i32);
        if lo < opts.floor_factor * q.floor() {
            break;
        }
        // ∫ dt/(t q) = ∫ ds / q(e^s) over s ∈ [ln lo, ln lo + ln 2].
        let mid = lo.ln() + 0.5 * ln2;
        let mut inc = 0.0;
        let mut all_zero = true;
        for (xi, wi) in x.iter().zip(&w) {
            let t = (mid + 0.5 * ln2 * xi).exp();
            let qt = circle_average(q, w0, t)?;
            if qt != 0.0 {
                all_zero = false;
            }
            inc += wi / qt;
        }
        if all_zero {
            return Ok(DivergenceResult {
                outcome: Outcome::Pass,
                value: None,
                partial: f64::INFINITY,
                increments,
                mean_ratio: None,
                certificate: Some(format!("circle averages vanish on the octave [{lo:e}, {:e}]", 2.0 * lo)),
            });
        }
        let inc = 0.5 * ln2 * inc;
        partial += inc;
        increments.push(inc);
    }
    if increments.len() < opts.min_octaves.max(opts.window + 1) {
        return Ok(DivergenceResult {
            outcome: Outcome::Undetermined,
            value: None,
            partial,
            increments,
            mean_ratio: None,
            certificate: None,
        });
    }
    let ratios: Vec<f64> = increments
        .windows(2)
        .map(|p| if p[0] > 0.0 { p[1] / p[0] } else { 0.0 })
        .collect();
    let tail = &ratios[ratios.len() - opts.window..];
    let mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let divergent = mean >= opts.threshold;
    let last = *increments.last().expect("nonempty");
    Ok(DivergenceResult {
        outcome: if divergent { Outcome::Pass } else { Outcome::Fail },
        value: (!divergent).then(|| partial + last * mean / (1.0 - mean)),
        partial,
        increments,
        mean_ratio: Some(mean),
        certificate: divergent.then(|| {
            format!("per-octave increments decay by a mean factor {mean:.4} >= {}", opts.threshold)
        }),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FmoOptions {
    /// Disk radii, decreasing.
    pub ladder: Vec<f64>,
    pub floor_factor: f64,
    pub min_usable: usize,
}

impl Default for FmoOptions {
    fn default() -> Self {
        Self {
            ladder: (0..20).map(|j| 0.5 * 0.5f64.powi(j)).collect(),
            floor_factor: 4.0,
            min_usable: 3,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FmoResult {
    pub outcome: Outcome,
    /// `(ε, mean oscillation on B(z0, ε))` for every usable radius.
    pub oscillations: Vec<(f64, f64)>,
    /// Largest oscillation over the smaller half of the usable radii.
    pub limsup_estimate: f64,
    /// Whether radii were dropped at the weight's resolution floor.
    pub truncated: bool,
}

const FMO_RADIAL_PANELS: usize = 4;
const FMO_RADIAL_NODES: usize = 16;
const FMO_ANGLES: usize = 128;

/// Mean oscillation `(1/πε²) ∫_B |Q − Q_B| dm` on `B(z0, ε)`, by polar
/// quadrature in `r = ε s²` so that `|y|^{-a}` singularities at the center
/// become smooth. `None` when the disk leaves the weight's window.
fn mean_oscillation<W: Weight + ?Sized>(q: &W, z0: Complex64, eps: f64) -> Option<f64> {
    let (x, w) = gauss_legendre_rule(FMO_RADIAL_NODES);
    let mut samples = Vec::with_capacity(FMO_RADIAL_PANELS * FMO_RADIAL_NODES * FMO_ANGLES);
    let panel = 1.0 / FMO_RADIAL_PANELS as f64;
    let dtheta = 2.0 * PI / FMO_ANGLES as f64;
    for p in 0..FMO_RADIAL_PANELS {
        let m = (p as f64 + 0.5) * panel;
        for (xi, wi) in x.iter().zip(&w) {
            let s = m + 0.5 * panel * xi;
            // Normalized so the weights sum to 1 over the disk.
            let weight = wi * 0.5 * panel * 4.0 * s.powi(3) / FMO_ANGLES as f64;
            for k in 0..FMO_ANGLES {
                let y = z0 + Complex64::from_polar(eps * s * s, (k as f64 + 0.5) * dtheta);
                if !q.covers(y) {
                    return None;
                }
                samples.push((q.value(y), weight));
            }
        }
    }
    if samples.iter().any(|(v, _)| v.is_infinite()) {
        return Some(f64::INFINITY);
    }
    let mean: f64 = samples.iter().map(|(v, w)| v * w).sum();
    Some(samples.iter().map(|(v, w)| (v - mean).abs() * w).sum())
}

/// Finite-ladder proxy for finite mean oscillation at `z0`: passes when the
/// oscillations over the smaller half of the radii stay within twice the
/// median.
pub fn fmo_estimate<W: Weight + ?Sized>(q: &W, z0: Complex64, opts: &FmoOptions) -> Result<FmoResult> {
    if opts.ladder.iter().any(|&e| !(e > 0.0)) || opts.ladder.windows(2).any(|p| p[1] >= p[0]) {
        return Err(invalid("FMO ladder must be positive and decreasing"));
    }
    let mut truncated = false;
    let mut oscillations = Vec::new();
    for &eps in &opts.ladder {
        if eps < opts.floor_factor * q.floor() {
            truncated = true;
            continue;
        }
        if let Some(osc) = mean_oscillation(q, z0, eps) {
            oscillations.push((eps, osc));
        }
    }
    if oscillations.len() < opts.min_usable {
        return Ok(FmoResult {
            outcome: Outcome::Undetermined,
            oscillations,
            limsup_estimate: f64::NAN,
            truncated,
        });
    }
    let mut sorted: Vec<f64> = oscillations.iter().map(|p| p.1).collect();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let half = oscillations.len() / 2;
    let limsup_estimate = oscillations[half..].iter().map(|p| p.1).fold(0.0, f64::max);
    let bounded = limsup_estimate.is_finite() && limsup_estimate <= 2.0 * median + 1e-12;
    let outcome = match (bounded, truncated) {
        (true, _) => Outcome::Pass,
        (false, true) => Outcome::Undetermined,
        (false, false) => Outcome::Fail,
    };
    Ok(FmoResult {
        outcome,
        oscillations,
        limsup_estimate,
        truncated,
    })
}
