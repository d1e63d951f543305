//! Cell-centered square grids over the complex plane, sampled complex fields
//! and finite-difference Wirtinger derivatives.
//!
//! Node `(i, j)` sits at `center + (-halfwidth + (i + 1/2) h) + i (-halfwidth + (j + 1/2) h)`
//! with `h = 2 halfwidth / N`. Values are stored row-major with `i` (the `x`
//! index) as the row: `values[i * N + j]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    center: Complex64,
    halfwidth: f64,
    resolution: usize,
}

impl GridSpec {
    pub fn new(center: Complex64, halfwidth: f64, resolution: usize) -> Result<Self> {
        if !(halfwidth.is_finite() && halfwidth > 0.0) {
            return Err(invalid(format!("halfwidth must be positive, got {halfwidth}")));
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(invalid("grid center must be finite"));
        }
        if resolution < 8 || !resolution.is_power_of_two() {
            return Err(invalid(format!(
                "resolution must be a power of two >= 8, got {resolution}"
            )));
        }
        Ok(Self {
            center,
            halfwidth,
            resolution,
        })
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn halfwidth(&self) -> f64 {
        self.halfwidth
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Number of nodes, `N²`.
    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.halfwidth / self.resolution as f64
    }

    pub fn cell_area(&self) -> f64 {
        let h = self.spacing();
        h * h
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.resolution + j
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx / self.resolution, idx % self.resolution)
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let h = self.spacing();
        let x = -self.halfwidth + (i as f64 + 0.5) * h;
        let y = -self.halfwidth + (j as f64 + 0.5) * h;
        self.center + Complex64::new(x, y)
    }

    #[inline]
    pub fn node_at(&self, idx: usize) -> Complex64 {
        let (i, j) = self.coords(idx);
        self.node(i, j)
    }

    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        (0..self.len()).map(move |idx| self.node_at(idx))
    }

    /// Whether `z` lies in the closed square window.
    pub fn contains(&self, z: Complex64) -> bool {
        let d = z - self.center;
        d.re.abs() <= self.halfwidth && d.im.abs() <= self.halfwidth
    }

    /// Distance from `z` to the window boundary, negative outside.
    pub fn distance_to_edge(&self, z: Complex64) -> f64 {
        let d = z - self.center;
        (self.halfwidth - d.re.abs()).min(self.halfwidth - d.im.abs())
    }

    /// Continuous index coordinates of `z` (node `(i, j)` maps to `(i, j)`).
    #[inline]
    pub fn fractional_index(&self, z: Complex64) -> (f64, f64) {
        let h = self.spacing();
        let d = z - self.center;
        (
            (d.re + self.halfwidth) / h - 0.5,
            (d.im + self.halfwidth) / h - 0.5,
        )
    }

    /// Nearest node to `z`, clamped into the grid.
    pub fn nearest_node(&self, z: Complex64) -> (usize, usize) {
        let (u, v) = self.fractional_index(z);
        let n = self.resolution as f64 - 1.0;
        (u.round().clamp(0.0, n) as usize, v.round().clamp(0.0, n) as usize)
    }

    /// Whether node `(i, j)` is within `margin` nodes of the grid boundary.
    pub fn in_margin(&self, i: usize, j: usize, margin: usize) -> bool {
        let n = self.resolution;
        i < margin || j < margin || i + margin >= n || j + margin >= n
    }
}

/// What a sampled field represents. Only [`Meaning::Scalar`] fields may hold
/// non-finite values (extended-real dilatations).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Meaning {
    Coefficient,
    Displacement,
    Derivative,
    Scalar,
}

#[derive(Clone, Debug)]
pub struct ComplexField {
    spec: GridSpec,
    values: Vec<Complex64>,
    meaning: Meaning,
}

impl ComplexField {
    pub fn new(spec: GridSpec, values: Vec<Complex64>, meaning: Meaning) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(invalid(format!(
                "field has {} values, grid needs {}",
                values.len(),
                spec.len()
            )));
        }
        if meaning != Meaning::Scalar {
            if let Some(idx) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
                let z = spec.node_at(idx);
                return Err(Error::SamplingFailure { x: z.re, y: z.im });
            }
        }
        Ok(Self {
            spec,
            values,
            meaning,
        })
    }

    pub fn zeros(spec: GridSpec, meaning: Meaning) -> Self {
        Self {
            spec,
            values: vec![Complex64::new(0.0, 0.0); spec.len()],
            meaning,
        }
    }

    /// Builds a real-valued scalar field; infinities are allowed.
    pub fn from_real(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::new(
            spec,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            Meaning::Scalar,
        )
    }

    /// Samples `f` at every node.
    pub fn sample<F>(f: F, spec: GridSpec, meaning: Meaning) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64,
    {
        let mut values = Vec::with_capacity(spec.len());
        for idx in 0..spec.len() {
            let z = spec.node_at(idx);
            let v = f(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::SamplingFailure { x: z.re, y: z.im });
            }
            values.push(v);
        }
        Ok(Self {
            spec,
            values,
            meaning,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn meaning(&self) -> Meaning {
        self.meaning
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.spec.index(i, j)]
    }

    pub fn with_meaning(mut self, meaning: Meaning) -> Self {
        self.meaning = meaning;
        self
    }

    /// Discrete L² norm `(Σ |v|²)^{1/2}` without the cell-area factor.
    pub fn l2_norm(&self) -> f64 {
        l2_norm(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Bilinear interpolation; `None` outside the window. Inside the window
    /// but beyond the outermost nodes the boundary cell is extended linearly.
    pub fn interpolate(&self, z: Complex64) -> Option<Complex64> {
        if !self.spec.contains(z) {
            return None;
        }
        let ((i0, s), (j0, t)) = bilinear_cell(&self.spec, z);
        let v = |i: usize, j: usize| self.values[self.spec.index(i, j)];
        Some(
            v(i0, j0) * ((1.0 - s) * (1.0 - t))
                + v(i0 + 1, j0) * (s * (1.0 - t))
                + v(i0, j0 + 1) * ((1.0 - s) * t)
                + v(i0 + 1, j0 + 1) * (s * t),
        )
    }

    /// Bilinear interpolation of the real part that propagates `+∞` from any
    /// contributing node instead of producing `0 · ∞ = NaN`.
    pub fn interpolate_real(&self, z: Complex64) -> Option<f64> {
        if !self.spec.contains(z) {
            return None;
        }
        let ((i0, s), (j0, t)) = bilinear_cell(&self.spec, z);
        let mut acc = 0.0;
        for (di, wi) in [(0, 1.0 - s), (1, s)] {
            for (dj, wj) in [(0, 1.0 - t), (1, t)] {
                let w = wi * wj;
                if w == 0.0 {
                    continue;
                }
                let v = self.values[self.spec.index(i0 + di, j0 + dj)].re;
                if v.is_infinite() {
                    return Some(v);
                }
                acc += w * v;
            }
        }
        Some(acc)
    }

    /// Finite-difference Wirtinger derivatives `(f_z, f_zbar)`.
    ///
    /// Central differences in the interior, one-sided second-order stencils on
    /// the boundary ring.
    pub fn wirtinger(&self) -> (ComplexField, ComplexField) {
        let n = self.spec.resolution;
        let inv2h = 1.0 / (2.0 * self.spec.spacing());
        let v = &self.values;
        let diff = |a: usize, b: usize, c: usize, pos: usize| -> Complex64 {
            // a, b, c are the values at positions 0, 1, 2 along the line (or
            // the three stencil points around `pos`).
            if pos == 0 {
                (v[b] * 4.0 - v[a] * 3.0 - v[c]) * inv2h
            } else if pos == n - 1 {
                (v[a] * 3.0 - v[b] * 4.0 + v[c]) * inv2h
            } else {
                (v[c] - v[a]) * inv2h
            }
        };
        let mut fz = Vec::with_capacity(v.len());
        let mut fzb = Vec::with_capacity(v.len());
        for i in 0..n {
            for j in 0..n {
                let idx = self.spec.index(i, j);
                let fx = if i == 0 {
                    diff(idx, self.spec.index(1, j), self.spec.index(2, j), 0)
                } else if i == n - 1 {
                    diff(idx, self.spec.index(n - 2, j), self.spec.index(n - 3, j), n - 1)
                } else {
                    diff(self.spec.index(i - 1, j), idx, self.spec.index(i + 1, j), i)
                };
                let fy = if j == 0 {
                    diff(idx, self.spec.index(i, 1), self.spec.index(i, 2), 0)
                } else if j == n - 1 {
                    diff(idx, self.spec.index(i, n - 2), self.spec.index(i, n - 3), n - 1)
                } else {
                    diff(self.spec.index(i, j - 1), idx, self.spec.index(i, j + 1), j)
                };
                let ify = Complex64::i() * fy;
                fz.push((fx - ify) * 0.5);
                fzb.push((fx + ify) * 0.5);
            }
        }
        (
            ComplexField {
                spec: self.spec,
                values: fz,
                meaning: Meaning::Derivative,
            },
            ComplexField {
                spec: self.spec,
                values: fzb,
                meaning: Meaning::Derivative,
            },
        )
    }
}

/// Lower-left node and fractional offsets of the bilinear cell holding `z`.
#[inline]
pub(crate) fn bilinear_cell(spec: &GridSpec, z: Complex64) -> ((usize, f64), (usize, f64)) {
    let (u, v) = spec.fractional_index(z);
    let last = (spec.resolution - 2) as f64;
    let i0 = u.floor().clamp(0.0, last);
    let j0 = v.floor().clamp(0.0, last);
    ((i0 as usize, u - i0), (j0 as usize, v - j0))
}

pub(crate) fn l2_norm(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Pointwise Wirtinger derivatives of `f` at `z` by central differences of
/// step `step`.
pub fn wirtinger_at<F>(f: F, z: Complex64, step: f64) -> (Complex64, Complex64)
where
    F: Fn(Complex64) -> Complex64,
{
    let fx = (f(z + step) - f(z - step)) / (2.0 * step);
    let dy = Complex64::new(0.0, step);
    let fy = (f(z + dy) - f(z - dy)) / (2.0 * step);
    let ify = Complex64::i() * fy;
    ((fx - ify) * 0.5, (fx + ify) * 0.5)
}

/// A planar region used as an integration window or a compact set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Region {
    Disk { center: [f64; 2], radius: f64 },
    Square { center: [f64; 2], halfwidth: f64 },
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Self {
        Region::Disk {
            center: [center.re, center.im],
            radius,
        }
    }

    pub fn square(center: Complex64, halfwidth: f64) -> Self {
        Region::Square {
            center: [center.re, center.im],
            halfwidth,
        }
    }

    pub fn center(&self) -> Complex64 {
        match *self {
            Region::Disk { center, .. } | Region::Square { center, .. } => {
                Complex64::new(center[0], center[1])
            }
        }
    }

    /// Positive inside, negative outside. Exact Euclidean distance for disks
    /// and for the interior of squares.
    pub fn signed_distance(&self, z: Complex64) -> f64 {
        let d = z - self.center();
        match *self {
            Region::Disk { radius, .. } => radius - d.norm(),
            Region::Square { halfwidth, .. } => {
                (halfwidth - d.re.abs()).min(halfwidth - d.im.abs())
            }
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        self.signed_distance(z) >= 0.0
    }

    /// Half-width of the smallest axis-aligned square about the center that
    /// contains the region.
    pub fn extent(&self) -> f64 {
        match *self {
            Region::Disk { radius, .. } => radius,
            Region::Square { halfwidth, .. } => halfwidth,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let e = self.extent();
        if !(e.is_finite() && e > 0.0) {
            return Err(invalid("region size must be positive"));
        }
        Ok(())
    }
}

/// Fraction of the square cell of side `h` centered at `c` where `phi > 0`.
///
/// Cells whose corners and center agree in sign are taken as fully inside or
/// outside; mixed cells are refined `depth` times and the leaves are split
/// into four triangles on which `phi` is treated as linear.
pub fn cell_coverage<F>(phi: &F, c: Complex64, h: f64, depth: u32) -> f64
where
    F: Fn(Complex64) -> f64,
{
    let r = 0.5 * h;
    let corners = [
        c + Complex64::new(-r, -r),
        c + Complex64::new(r, -r),
        c + Complex64::new(r, r),
        c + Complex64::new(-r, r),
    ];
    let pc = sanitize(phi(c));
    let pk = corners.map(|z| sanitize(phi(z)));
    if pc > 0.0 && pk.iter().all(|&p| p > 0.0) {
        return 1.0;
    }
    if pc <= 0.0 && pk.iter().all(|&p| p <= 0.0) {
        return 0.0;
    }
    if depth == 0 {
        let mut acc = 0.0;
        for k in 0..4 {
            acc += triangle_fraction(pc, pk[k], pk[(k + 1) % 4]);
        }
        return 0.25 * acc;
    }
    let q = 0.5 * r;
    [
        Complex64::new(-q, -q),
        Complex64::new(q, -q),
        Complex64::new(q, q),
        Complex64::new(-q, q),
    ]
    .iter()
    .map(|&o| cell_coverage(phi, c + o, r, depth - 1))
    .sum::<f64>()
        * 0.25
}

fn sanitize(p: f64) -> f64 {
    if p.is_nan() {
        -1.0
    } else {
        p
    }
}

/// Area fraction of a triangle where the linear interpolant of the vertex
/// values is positive.
fn triangle_fraction(a: f64, b: f64, c: f64) -> f64 {
    let pos = [a > 0.0, b > 0.0, c > 0.0];
    let count = pos.iter().filter(|&&p| p).count();
    match count {
        0 => 0.0,
        3 => 1.0,
        1 => {
            let (p, m1, m2) = if pos[0] {
                (a, b, c)
            } else if pos[1] {
                (b, a, c)
            } else {
                (c, a, b)
            };
            p * p / ((p - m1) * (p - m2))
        }
        _ => {
            let (m, p1, p2) = if !pos[0] {
                (a, b, c)
            } else if !pos[1] {
                (b, a, c)
            } else {
                (c, a, b)
            };
            1.0 - m * m / ((m - p1) * (m - p2))
        }
    }
}

/// Default refinement depth for cells cut by a region boundary.
pub const COVERAGE_DEPTH: u32 = 4;

/// Midpoint-quadrature weights `coverage · h²` for every node whose cell
/// meets `{phi > 0}`.
pub fn region_weights<F>(spec: &GridSpec, phi: F) -> Vec<(usize, f64)>
where
    F: Fn(Complex64) -> f64,
{
    let h = spec.spacing();
    let area = spec.cell_area();
    let mut out = Vec::new();
    for idx in 0..spec.len() {
        let w = cell_coverage(&phi, spec.node_at(idx), h, COVERAGE_DEPTH);
        if w > 0.0 {
            out.push((idx, w * area));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn layout_of_unit_grid() {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 8).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.node(0, 0), c(-0.875, -0.875));
        assert_eq!(g.node(7, 7), c(0.875, 0.875));
    }

    #[test]
    fn layout_of_shifted_grid() {
        let g = GridSpec::new(c(1.0, 1.0), 2.0, 16).unwrap();
        assert_eq!(g.spacing(), 0.25);
        assert_eq!(g.node(0, 0), c(-0.875, -0.875));
    }

    #[test]
    fn rejects_bad_resolution_and_halfwidth() {
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, 7).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, 4).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 1.0, 24).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), 0.0, 8).is_err());
        assert!(GridSpec::new(c(0.0, 0.0), -1.0, 8).is_err());
    }

    #[test]
    fn origin_is_never_a_node() {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 64).unwrap();
        assert!(g.nodes().all(|z| z.norm() > 0.0));
    }

    #[test]
    fn sample_identity_and_zero() {
        let g = GridSpec::new(c(0.3, -0.2), 1.0, 16).unwrap();
        let id = ComplexField::sample(|z| z, g, Meaning::Displacement).unwrap();
        for idx in 0..g.len() {
            assert_eq!(id.values()[idx], g.node_at(idx));
        }
        let zero = ComplexField::sample(|_| c(0.0, 0.0), g, Meaning::Coefficient).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn sample_reports_non_finite_node() {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 8).unwrap();
        let err = ComplexField::sample(
            |z| if z.re > 0.8 { c(f64::NAN, 0.0) } else { z },
            g,
            Meaning::Scalar,
        )
        .unwrap_err();
        match err {
            Error::SamplingFailure { x, .. } => assert_eq!(x, 0.875),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wirtinger_exact_on_affine_maps() {
        let g = GridSpec::new(c(0.1, 0.2), 1.3, 16).unwrap();
        let cases: [(Complex64, Complex64); 3] = [
            (c(1.0, 0.0), c(0.0, 0.0)),
            (c(0.0, 0.0), c(1.0, 0.0)),
            (c(2.0, 0.0), c(0.5, 0.0)),
        ];
        for (a, b) in cases {
            let f = ComplexField::sample(|z| a * z + b * z.conj() + c(0.3, 0.7), g, Meaning::Displacement)
                .unwrap();
            let (fz, fzb) = f.wirtinger();
            for idx in 0..g.len() {
                assert_abs_diff_eq!((fz.values()[idx] - a).norm(), 0.0, epsilon = 1e-12);
                assert_abs_diff_eq!((fzb.values()[idx] - b).norm(), 0.0, epsilon = 1e-12);
            }
        }
    }

    fn interior_error(n: usize, f: fn(Complex64) -> Complex64, df: fn(Complex64) -> Complex64) -> f64 {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, n).unwrap();
        let (fz, _) = ComplexField::sample(f, g, Meaning::Displacement)
            .unwrap()
            .wirtinger();
        let mut e: f64 = 0.0;
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                e = e.max((fz.get(i, j) - df(g.node(i, j))).norm());
            }
        }
        e
    }

    #[test]
    fn wirtinger_interior_error_is_second_order() {
        // Central differences reproduce z^2 to roundoff (and the errors of
        // holomorphic cubics cancel between f_x and f_y), so the O(h^2) rate
        // is measured on the non-holomorphic z^2 conj(z).
        assert!(interior_error(16, |z| z * z, |z| 2.0 * z) < 1e-12);
        let coarse = interior_error(32, |z| z * z * z.conj(), |z| 2.0 * z * z.conj());
        let fine = interior_error(64, |z| z * z * z.conj(), |z| 2.0 * z * z.conj());
        assert!(coarse / fine >= 3.5, "ratio {}", coarse / fine);
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 32).unwrap();
        let f = |z: Complex64| (z * 3.1).sin() / (1.0 + z.norm_sqr());
        let a = ComplexField::sample(f, g, Meaning::Displacement).unwrap();
        let b = ComplexField::sample(f, g, Meaning::Displacement).unwrap();
        assert!(a
            .values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits()));
    }

    #[test]
    fn interpolation_is_exact_for_bilinear_fields() {
        let g = GridSpec::new(c(0.0, 0.0), 1.0, 16).unwrap();
        let f = |z: Complex64| c(2.0 * z.re + 3.0 * z.im + z.re * z.im, -z.re);
        let s = ComplexField::sample(f, g, Meaning::Displacement).unwrap();
        for z in [c(0.123, -0.456), c(0.99, 0.99), c(-0.999, 0.2)] {
            assert_abs_diff_eq!((s.interpolate(z).unwrap() - f(z)).norm(), 0.0, epsilon = 1e-12);
        }
        assert!(s.interpolate(c(1.01, 0.0)).is_none());
    }

    #[test]
    fn coverage_is_exact_for_half_planes() {
        let phi = |z: Complex64| 0.3 - z.re - 0.5 * z.im;
        let cov = cell_coverage(&phi, c(0.3, 0.0), 0.2, 0);
        // Brute-force area fraction.
        let m = 2000;
        let mut hits = 0usize;
        for a in 0..m {
            for b in 0..m {
                let z = c(0.2 + 0.2 * (a as f64 + 0.5) / m as f64, -0.1 + 0.2 * (b as f64 + 0.5) / m as f64);
                if phi(z) > 0.0 {
                    hits += 1;
                }
            }
        }
        assert_abs_diff_eq!(cov, hits as f64 / (m * m) as f64, epsilon = 1e-5);
    }

    #[test]
    fn region_weights_recover_disk_area() {
        let g = GridSpec::new(c(0.0, 0.0), 1.5, 256).unwrap();
        let disk = Region::disk(c(0.0, 0.0), 1.0);
        let area: f64 = region_weights(&g, |z| disk.signed_distance(z))
            .iter()
            .map(|&(_, w)| w)
            .sum();
        assert!((area - std::f64::consts::PI).abs() / std::f64::consts::PI < 1e-6);
        let sq = Region::square(c(0.5, 0.5), 0.5);
        let area: f64 = region_weights(&g, |z| sq.signed_distance(z))
            .iter()
            .map(|&(_, w)| w)
            .sum();
        assert_abs_diff_eq!(area, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn pointwise_wirtinger_matches_closed_form() {
        let (fz, fzb) = wirtinger_at(|z| 2.0 * z + 0.5 * z.conj(), c(0.4, 0.1), 1e-4);
        assert_abs_diff_eq!((fz - c(2.0, 0.0)).norm(), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!((fzb - c(0.5, 0.0)).norm(), 0.0, epsilon = 1e-9);
    }
}
