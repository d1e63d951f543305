use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::capacity::{discrete_capacity, CapacityOptions, Plate};
use super::{circle_average, Weight};
use crate::error::{invalid, Result};
use crate::grid::GridSpec;
use crate::quadrature::composite_gauss;
use crate::solver::{SampledMap, CIRCLE_SAMPLES};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Annulus {
    pub center: [f64; 2],
    pub r1: f64,
    pub r2: f64,
}

impl Annulus {
    pub fn new(center: Complex64, r1: f64, r2: f64) -> Result<Self> {
        if !(r1 > 0.0 && r1 < r2 && r2.is_finite()) {
            return Err(invalid(format!("annulus needs 0 < r1 < r2, got r1 = {r1}, r2 = {r2}")));
        }
        Ok(Self {
            center: [center.re, center.im],
            r1,
            r2,
        })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(self.center[0], self.center[1])
    }
}

/// Admissible densities on `(r1, r2)`, both with `∫ η = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Eta {
    /// `1/(r2 − r1)`.
    Uniform,
    /// `1/(t log(r2/r1))`, extremal for the round annulus.
    Log,
}

impl Eta {
    fn eval(self, t: f64, ann: &Annulus) -> f64 {
        match self {
            Eta::Uniform => 1.0 / (ann.r2 - ann.r1),
            Eta::Log => 1.0 / (t * (ann.r2 / ann.r1).ln()),
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoletskyCheck {
    /// Capacity of the preimage condenser.
    pub lhs: f64,
    /// `∫_A Q η²(|y − y0|) dm(y)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Slack allowed on the right-hand side.
pub const POLETSKY_SLACK: f64 = 0.05;

const RHS_PANELS: usize = 16;
const RHS_NODES: usize = 8;

/// Compares the modulus of the curves whose images cross `ann` with the
/// weighted area integral of `Q η²`. The modulus is the capacity of the
/// condenser `{|f − y0| <= r1}`, `{|f − y0| >= r2}`, solved on a fresh grid
/// of `resolution²` nodes around `g` of the outer circle.
pub fn inverse_poletsky_check<W: Weight + ?Sized>(
    f: &SampledMap,
    g: &SampledMap,
    q: &W,
    ann: &Annulus,
    eta: Eta,
    resolution: usize,
) -> Result<PoletskyCheck> {
    let y0 = ann.center();
    let (mut lo, mut hi) = (Complex64::new(f64::INFINITY, f64::INFINITY), Complex64::new(-f64::INFINITY, -f64::INFINITY));
    for k in 0..CIRCLE_SAMPLES {
        let y = y0 + Complex64::from_polar(ann.r2, 2.0 * PI * k as f64 / CIRCLE_SAMPLES as f64);
        let z = g
            .eval(y)
            .ok_or_else(|| invalid("annulus is not inside the image window"))?;
        lo = Complex64::new(lo.re.min(z.re), lo.im.min(z.im));
        hi = Complex64::new(hi.re.max(z.re), hi.im.max(z.im));
    }
    let center = (lo + hi) * 0.5;
    let half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im);
    if !(half > 0.0) {
        return Err(invalid("preimage ring is degenerate"));
    }
    let spec = GridSpec::new(center, 1.1 * half, resolution)?;
    let cap = discrete_capacity(
        &spec,
        |z| match f.eval(z) {
            None => Plate::Outer,
            Some(w) => {
                let d = (w - y0).norm();
                if d <= ann.r1 {
                    Plate::Inner
                } else if d >= ann.r2 {
                    Plate::Outer
                } else {
                    Plate::Free
                }
            }
        },
        &CapacityOptions::default(),
    )?;

    circle_average(q, y0, ann.r2)?;
    let rhs = composite_gauss(
        |t| {
            let qt = circle_average(q, y0, t).unwrap_or(f64::NAN);
            eta.eval(t, ann).powi(2) * 2.0 * PI * qt * t
        },
        ann.r1,
        ann.r2,
        RHS_PANELS,
        RHS_NODES,
    );
    if rhs.is_nan() {
        return Err(invalid("weight does not cover the annulus"));
    }
    Ok(PoletskyCheck {
        lhs: cap.energy,
        rhs,
        holds: cap.energy <= rhs * (1.0 + POLETSKY_SLACK),
    })
}
