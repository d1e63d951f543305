use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::grid::Region;
use crate::solver::{SampledMap, CIRCLE_SAMPLES};

#[derive(Clone, Debug, Serialize)]
pub struct Equicontinuity {
    /// Largest `|f(x) − f(y)| · log^{1/2}(1 + r0/(2|x − y|))` over maps and
    /// sampled pairs.
    pub c_hat: f64,
    pub per_map: Vec<f64>,
    pub worst_map: usize,
    pub worst_pair: [[f64; 2]; 2],
    /// Distance from `K` to the boundary of `G`.
    pub r0: f64,
}

fn boundary_point(region: &Region, t: f64) -> Complex64 {
    let c = region.center();
    let e = region.extent();
    let d = Complex64::from_polar(1.0, t);
    match region {
        Region::Disk { .. } => c + d * e,
        Region::Square { .. } => c + d * (e / d.re.abs().max(d.im.abs())),
    }
}

/// Samples `pairs` random pairs of grid nodes (of the first map) inside `k`
/// and bounds the logarithmic modulus of continuity of every map on them.
pub fn equicontinuity_bound(
    maps: &[&SampledMap],
    k: &Region,
    g: &Region,
    pairs: usize,
    seed: u64,
) -> Result<Equicontinuity> {
    let first = maps.first().ok_or_else(|| invalid("no maps given"))?;
    k.validate()?;
    g.validate()?;
    let r0 = (0..CIRCLE_SAMPLES)
        .map(|i| {
            let z = boundary_point(k, 2.0 * std::f64::consts::PI * i as f64 / CIRCLE_SAMPLES as f64);
            g.signed_distance(z)
        })
        .fold(f64::INFINITY, f64::min);
    if !(r0 > 0.0) || !g.contains(k.center()) {
        return Err(invalid("K must lie compactly inside G"));
    }
    let spec = first.spec();
    let nodes: Vec<Complex64> = spec.nodes().filter(|z| k.contains(*z)).collect();
    if nodes.len() < 2 {
        return Err(invalid("K holds fewer than two grid nodes"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample: Vec<(Complex64, Complex64)> = (0..pairs)
        .map(|_| {
            let a = rng.gen_range(0..nodes.len());
            let mut b = rng.gen_range(0..nodes.len() - 1);
            if b >= a {
                b += 1;
            }
            (nodes[a], nodes[b])
        })
        .collect();

    let mut per_map = Vec::with_capacity(maps.len());
    let mut best = (0.0, 0usize, [[0.0; 2]; 2]);
    for (m, map) in maps.iter().enumerate() {
        let mut local: f64 = 0.0;
        for &(x, y) in &sample {
            let fx = map.eval(x).ok_or_else(|| invalid("map does not cover K"))?;
            let fy = map.eval(y).ok_or_else(|| invalid("map does not cover K"))?;
            let v = (fx - fy).norm() * (1.0 + r0 / (2.0 * (x - y).norm())).ln().sqrt();
            if v > local {
                local = v;
            }
            if v > best.0 {
                best = (v, m, [[x.re, x.im], [y.re, y.im]]);
            }
        }
        per_map.push(local);
    }
    Ok(Equicontinuity {
        c_hat: best.0,
        per_map,
        worst_map: best.1,
        worst_pair: best.2,
        r0,
    })
}
