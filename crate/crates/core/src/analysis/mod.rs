//! Modulus and capacity machinery and the normality and compactness tests
//! for weight functions `Q`.

mod averages;
mod capacity;
mod classify;
mod equicontinuity;
mod poletsky;
mod weight;

pub use averages::{
    circle_average, circle_integrability_scan, divergence_check, fmo_estimate, DivergenceOptions,
    DivergenceResult, FmoOptions, FmoResult, IntegrabilityScan,
};
pub use capacity::{annulus_capacity, discrete_capacity, Capacity, CapacityOptions, Plate};
pub use classify::{classify, ClassifyOptions, ClassificationVerdict, ProbeReport, Verdict};
pub use equicontinuity::{equicontinuity_bound, Equicontinuity};
pub use poletsky::{inverse_poletsky_check, Annulus, Eta, PoletskyCheck};
pub use weight::{SampledWeight, Weight};

use serde::Serialize;

/// Result of a one-sided numerical test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Undetermined,
}
