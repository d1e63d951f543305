use num_complex::Complex64;
use serde::Serialize;

use super::averages::INTEGRABILITY_SHARE;
use super::{
    circle_integrability_scan, divergence_check, fmo_estimate, DivergenceOptions, DivergenceResult,
    FmoOptions, FmoResult, IntegrabilityScan, Outcome, Weight,
};
use crate::error::Result;

#[derive(Clone, Debug, Serialize)]
pub struct ClassifyOptions {
    /// Radius range scanned for circle integrability.
    pub scan_range: (f64, f64),
    pub scan_samples: usize,
    pub scan_share: f64,
    /// Upper limit `δ` of the divergence integral.
    pub delta: f64,
    pub divergence: DivergenceOptions,
    pub fmo: FmoOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            scan_range: (0.0, 1.0),
            scan_samples: 64,
            scan_share: INTEGRABILITY_SHARE,
            delta: 0.5,
            divergence: DivergenceOptions::default(),
            fmo: FmoOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Normal,
    Compact,
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub point: [f64; 2],
    pub circle_integrability: IntegrabilityScan,
    pub fmo: FmoResult,
    pub divergence: DivergenceResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegrabilitySummary {
    pub outcome: Outcome,
    /// Smallest share of finite-average radii over the probes.
    pub min_finite_fraction: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FmoSummary {
    pub outcome: Outcome,
    /// Largest per-probe limsup estimate.
    pub limsup_estimate: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DivergenceSummary {
    pub outcome: Outcome,
    /// Per-probe finite integral values; `None` where divergent or
    /// undetermined.
    pub values: Vec<Option<f64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassificationVerdict {
    pub circle_integrability: IntegrabilitySummary,
    pub fmo: FmoSummary,
    pub divergence: DivergenceSummary,
    pub verdict: Verdict,
    pub probes: Vec<ProbeReport>,
}

/// All-pass gives pass, any fail gives fail, otherwise undetermined.
fn combine(outcomes: impl Iterator<Item = Outcome>) -> Outcome {
    let mut all_pass = true;
    for o in outcomes {
        match o {
            Outcome::Fail => return Outcome::Fail,
            Outcome::Undetermined => all_pass = false,
            Outcome::Pass => {}
        }
    }
    if all_pass {
        Outcome::Pass
    } else {
        Outcome::Undetermined
    }
}

/// Normal when `Q` is integrable over circles at every probe; compact when,
/// in addition, FMO holds at every probe or the divergence condition holds
/// at every probe. Integrability failures and calls blocked by resolution
/// floors give `undetermined`.
pub fn classify<W: Weight + ?Sized>(
    q: &W,
    probes: &[Complex64],
    opts: &ClassifyOptions,
) -> Result<ClassificationVerdict> {
    let mut reports = Vec::with_capacity(probes.len());
    for &p in probes {
        reports.push(ProbeReport {
            point: [p.re, p.im],
            circle_integrability: circle_integrability_scan(
                q,
                p,
                opts.scan_range.0,
                opts.scan_range.1,
                opts.scan_samples,
                opts.scan_share,
            )?,
            fmo: fmo_estimate(q, p, &opts.fmo)?,
            divergence: divergence_check(q, p, opts.delta, &opts.divergence)?,
        });
    }
    let integrability = combine(reports.iter().map(|r| r.circle_integrability.outcome));
    let fmo = combine(reports.iter().map(|r| r.fmo.outcome));
    let divergence = combine(reports.iter().map(|r| r.divergence.outcome));
    let verdict = if integrability != Outcome::Pass {
        Verdict::Undetermined
    } else if fmo == Outcome::Pass || divergence == Outcome::Pass {
        Verdict::Compact
    } else if fmo == Outcome::Fail && divergence == Outcome::Fail {
        Verdict::Normal
    } else {
        Verdict::Undetermined
    };
    Ok(ClassificationVerdict {
        circle_integrability: IntegrabilitySummary {
            outcome: integrability,
            min_finite_fraction: reports
                .iter()
                .map(|r| r.circle_integrability.finite_fraction)
                .fold(1.0, f64::min),
        },
        fmo: FmoSummary {
            outcome: fmo,
            limsup_estimate: reports.iter().map(|r| r.fmo.limsup_estimate).fold(0.0, f64::max),
        },
        divergence: DivergenceSummary {
            outcome: divergence,
            values: reports.iter().map(|r| r.divergence.value).collect(),
        },
        verdict,
        probes: reports,
    })
}
