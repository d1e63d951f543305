//! Dilatation functionals of forward and inverse maps and the
//! change-of-variables identity
//!
//! ```text
//! ∫_C ‖f′‖^p dm  =  ∫_{f(C)} K_{I,p}(w, g) dm(w),   g = f⁻¹,  ‖f′‖ = |f_z| + |f_zbar|.
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::{region_weights, ComplexField, Region};
use crate::solver::{SampledMap, CIRCLE_SAMPLES};

/// Share of flagged nodes in a region above which an integral is marked as
/// low confidence.
pub const LOW_CONFIDENCE_SHARE: f64 = 0.01;

/// `K_{μ_g} = (|g_w|² − |g_wbar|²)/(|g_w| − |g_wbar|)²`, evaluated in the
/// equivalent form `(|g_w| + |g_wbar|)/(|g_w| − |g_wbar|)`.
pub fn k_mu_g(g_w: Complex64, g_wbar: Complex64) -> Result<f64> {
    let (a, b) = (g_w.norm(), g_wbar.norm());
    if !(a > b) {
        return Err(Error::Degenerate);
    }
    Ok((a + b) / (a - b))
}

pub fn check_exponent(p: f64) -> Result<()> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(invalid(format!("p must lie in (1, 2], got {p}")));
    }
    Ok(())
}

/// Inner dilatation of order `p`: `(|g_w|² − |g_wbar|²)/(|g_w| − |g_wbar|)^p`.
pub fn k_inner_p(g_w: Complex64, g_wbar: Complex64, p: f64) -> Result<f64> {
    check_exponent(p)?;
    if p == 2.0 {
        return k_mu_g(g_w, g_wbar);
    }
    let (a, b) = (g_w.norm(), g_wbar.norm());
    if !(a > b) {
        return Err(Error::Degenerate);
    }
    Ok((a + b) * (a - b).powf(1.0 - p))
}

/// `K_{I,p}` at every node of `g`; degenerate or flagged nodes hold `+∞`.
pub fn k_inner_p_field(g: &SampledMap, p: f64) -> Result<ComplexField> {
    check_exponent(p)?;
    let values = (0..g.spec().len())
        .map(|idx| {
            if g.is_flagged(idx) {
                return f64::INFINITY;
            }
            k_inner_p(g.f_z().values()[idx], g.f_zbar().values()[idx], p).unwrap_or(f64::INFINITY)
        })
        .collect();
    ComplexField::from_real(*g.spec(), values)
}

/// `K_{μ_g}` at every node of `g`; degenerate or flagged nodes hold `+∞`.
pub fn k_mu_g_field(g: &SampledMap) -> ComplexField {
    k_inner_p_field(g, 2.0).expect("p = 2 is admissible")
}

#[derive(Clone, Debug, Serialize)]
pub struct RegionIntegral {
    pub value: f64,
    /// Flagged nodes inside the region, left out of `value`.
    pub flagged: usize,
    pub nodes: usize,
    pub low_confidence: bool,
}

fn check_inside(g: &SampledMap, region: &Region) -> Result<()> {
    region.validate()?;
    let spec = g.spec();
    let c = region.center() - spec.center();
    let e = region.extent();
    if c.re.abs() + e > spec.halfwidth() || c.im.abs() + e > spec.halfwidth() {
        return Err(invalid("region is not inside the grid window"));
    }
    Ok(())
}

/// Coverage-weighted midpoint quadrature of `integrand(idx)` over the nodes
/// of `map` whose cells meet `{phi > 0}`, skipping flagged nodes.
fn weighted_sum<P, I>(map: &SampledMap, phi: P, integrand: I) -> RegionIntegral
where
    P: Fn(Complex64) -> f64,
    I: Fn(usize) -> Option<f64>,
{
    let weights = region_weights(map.spec(), phi);
    let mut value = 0.0;
    let mut flagged = 0;
    for &(idx, w) in &weights {
        match integrand(idx) {
            Some(v) if !map.is_flagged(idx) && v.is_finite() => value += w * v,
            _ => flagged += 1,
        }
    }
    let nodes = weights.len();
    RegionIntegral {
        value,
        flagged,
        nodes,
        low_confidence: nodes > 0 && flagged as f64 > LOW_CONFIDENCE_SHARE * nodes as f64,
    }
}

/// `∫_region K_{I,p}(w, g) dm(w)`.
pub fn integral_inner_p(g: &SampledMap, region: &Region, p: f64) -> Result<RegionIntegral> {
    check_exponent(p)?;
    check_inside(g, region)?;
    Ok(weighted_sum(
        g,
        |w| region.signed_distance(w),
        |idx| k_inner_p(g.f_z().values()[idx], g.f_zbar().values()[idx], p).ok(),
    ))
}

#[derive(Clone, Debug, Serialize)]
pub struct DilatationReport {
    pub p: f64,
    pub integral: f64,
    pub flagged: usize,
    pub min: f64,
    pub max: f64,
    pub low_confidence: bool,
    #[serde(skip)]
    pub k_mu_g: ComplexField,
    #[serde(skip)]
    pub k_inner_p: ComplexField,
}

/// Dilatation fields of `g` and the integral of `K_{I,p}` over `region`;
/// `min`/`max` run over the unflagged nodes inside the region.
pub fn dilatation_report(g: &SampledMap, region: &Region, p: f64) -> Result<DilatationReport> {
    let integral = integral_inner_p(g, region, p)?;
    let k_mu = k_mu_g_field(g);
    let k_in = k_inner_p_field(g, p)?;
    let (mut min, mut max) = (f64::INFINITY, 0.0f64);
    for (idx, v) in k_in.values().iter().enumerate() {
        if region.contains(g.spec().node_at(idx)) && v.re.is_finite() {
            min = min.min(v.re);
            max = max.max(v.re);
        }
    }
    if !min.is_finite() {
        return Err(invalid("no usable node inside the region"));
    }
    Ok(DilatationReport {
        p,
        integral: integral.value,
        flagged: integral.flagged,
        min,
        max,
        low_confidence: integral.low_confidence,
        k_mu_g: k_mu,
        k_inner_p: k_in,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChangeOfVariables {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_gap: f64,
    pub flagged_lhs: usize,
    pub flagged_rhs: usize,
}

/// Compares `∫_C ‖f′‖^p` on the source grid of `f` with `∫_{f(C)} K_{I,p}(·, g)`
/// on the grid of `g`. The image region is rasterized as `{w : g(w) ∈ C}`
/// with sub-cell coverage.
pub fn change_of_variables_check(
    f: &SampledMap,
    g: &SampledMap,
    region: &Region,
    p: f64,
) -> Result<ChangeOfVariables> {
    check_exponent(p)?;
    check_inside(f, region)?;
    // f(C) must stay inside g's window: sample the boundary of C.
    let c = region.center();
    let e = region.extent();
    for k in 0..CIRCLE_SAMPLES {
        let t = 2.0 * std::f64::consts::PI * k as f64 / CIRCLE_SAMPLES as f64;
        let z = match region {
            Region::Disk { .. } => c + Complex64::from_polar(e, t),
            Region::Square { .. } => {
                let d = Complex64::from_polar(1.0, t);
                c + d * (e / d.re.abs().max(d.im.abs()))
            }
        };
        let w = f
            .eval(z)
            .ok_or_else(|| invalid("region boundary leaves the grid of f"))?;
        if g.spec().distance_to_edge(w) <= g.spec().spacing() {
            return Err(invalid("f(C) is not inside the grid of g"));
        }
    }
    let lhs = weighted_sum(
        f,
        |z| region.signed_distance(z),
        |idx| Some((f.f_z().values()[idx].norm() + f.f_zbar().values()[idx].norm()).powf(p)),
    );
    let rhs = weighted_sum(
        g,
        |w| g.eval(w).map_or(f64::NAN, |z| region.signed_distance(z)),
        |idx| k_inner_p(g.f_z().values()[idx], g.f_zbar().values()[idx], p).ok(),
    );
    let scale = lhs.value.max(rhs.value);
    let rel_gap = if scale > 0.0 {
        (lhs.value - rhs.value).abs() / scale
    } else {
        0.0
    };
    Ok(ChangeOfVariables {
        lhs: lhs.value,
        rhs: rhs.value,
        rel_gap,
        flagged_lhs: lhs.flagged,
        flagged_rhs: rhs.flagged,
    })
}
