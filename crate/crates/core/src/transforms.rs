//! Discrete Cauchy and Beurling transforms of compactly supported densities.
//!
//! Both transforms act on the `N × N` window embedded in a `2N × 2N` zero
//! padded torus. The Cauchy transform
//!
//! ```text
//! C h(z) = (1/π) ∬ h(w) / (z − w) dm(w)
//! ```
//!
//! is a linear convolution with the cell-integrated kernel; the Beurling
//! transform `S h = ∂(C h)` applies the unit-modulus symbol `conj(ξ)/ξ` on the
//! padded torus (zero frequency mapped to 0).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{ComplexField, GridSpec, Meaning};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Precomputed FFTs and frequency multipliers for one grid.
pub struct TransformPlan {
    spec: GridSpec,
    padded: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Frequency-domain Cauchy kernel, `[ky][kx]` layout.
    cauchy_hat: Vec<Complex64>,
    /// `conj(ξ)/ξ`, `[ky][kx]` layout.
    beurling_symbol: Vec<Complex64>,
}

impl std::fmt::Debug for TransformPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformPlan")
            .field("spec", &self.spec)
            .field("padded", &self.padded)
            .finish()
    }
}

/// Reusable buffers for repeated transforms on one plan.
pub struct Workspace {
    buf: Vec<Complex64>,
    tr: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl TransformPlan {
    pub fn new(spec: GridSpec) -> Self {
        let n = spec.resolution();
        let p = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(p);
        let inverse = planner.plan_fft_inverse(p);
        let mut plan = Self {
            spec,
            padded: p,
            forward,
            inverse,
            cauchy_hat: Vec::new(),
            beurling_symbol: beurling_symbol(p),
        };
        plan.cauchy_hat = plan.cauchy_kernel_hat();
        plan
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn padded_size(&self) -> usize {
        self.padded
    }

    pub fn beurling_multiplier(&self) -> &[Complex64] {
        &self.beurling_symbol
    }

    pub fn workspace(&self) -> Workspace {
        let len = self.padded * self.padded;
        let scratch_len = self
            .forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len());
        Workspace {
            buf: vec![ZERO; len],
            tr: vec![ZERO; len],
            scratch: vec![ZERO; scratch_len],
        }
    }

    /// Width in nodes of the margin that a density must leave empty.
    pub fn margin(&self) -> usize {
        self.spec.resolution().div_ceil(10)
    }

    /// Checks that `h` vanishes on the outer 10% margin of the window.
    pub fn check_support(&self, values: &[Complex64]) -> Result<()> {
        let m = self.margin();
        let n = self.spec.resolution();
        for i in 0..n {
            for j in 0..n {
                if self.spec.in_margin(i, j, m) && values[self.spec.index(i, j)] != ZERO {
                    return Err(Error::SupportOverflow);
                }
            }
        }
        Ok(())
    }

    pub fn cauchy_transform(&self, h: &ComplexField) -> Result<ComplexField> {
        self.check_grid(h)?;
        self.check_support(h.values())?;
        let mut ws = self.workspace();
        let mut out = vec![ZERO; self.spec.len()];
        self.apply(h.values(), &self.cauchy_hat, &mut ws, &mut out);
        ComplexField::new(self.spec, out, Meaning::Displacement)
    }

    pub fn beurling_transform(&self, h: &ComplexField) -> Result<ComplexField> {
        self.check_grid(h)?;
        self.check_support(h.values())?;
        let mut ws = self.workspace();
        let mut out = vec![ZERO; self.spec.len()];
        self.apply(h.values(), &self.beurling_symbol, &mut ws, &mut out);
        ComplexField::new(self.spec, out, Meaning::Derivative)
    }

    /// Beurling transform into `out` without support checks, reusing `ws`.
    pub(crate) fn beurling_into(&self, h: &[Complex64], ws: &mut Workspace, out: &mut [Complex64]) {
        self.apply(h, &self.beurling_symbol, ws, out);
    }

    pub(crate) fn cauchy_into(&self, h: &[Complex64], ws: &mut Workspace, out: &mut [Complex64]) {
        self.apply(h, &self.cauchy_hat, ws, out);
    }

    /// `‖S h‖₂ / ‖h‖₂` with the transform kept on the whole padded torus,
    /// where the symbol is exactly unitary on mean-zero data.
    pub fn beurling_isometry_ratio(&self, h: &ComplexField) -> Result<f64> {
        self.check_grid(h)?;
        let p = self.padded;
        let mut ws = self.workspace();
        self.load(h.values(), &mut ws);
        self.forward_2d(&mut ws);
        for (v, m) in ws.tr.iter_mut().zip(&self.beurling_symbol) {
            *v *= m;
        }
        // Full inverse: every row of the padded grid is kept.
        for row in ws.tr.chunks_exact_mut(p) {
            self.inverse.process_with_scratch(row, &mut ws.scratch);
        }
        transpose(&ws.tr, &mut ws.buf, p);
        for row in ws.buf.chunks_exact_mut(p) {
            self.inverse.process_with_scratch(row, &mut ws.scratch);
        }
        let scale = 1.0 / (p * p) as f64;
        let sh = ws.buf.iter().map(|v| (v * scale).norm_sqr()).sum::<f64>().sqrt();
        let h_norm = h.l2_norm();
        if h_norm == 0.0 {
            return Ok(1.0);
        }
        Ok(sh / h_norm)
    }

    fn check_grid(&self, h: &ComplexField) -> Result<()> {
        if h.spec() != &self.spec {
            return Err(crate::error::invalid("field grid does not match the plan"));
        }
        Ok(())
    }

    fn load(&self, h: &[Complex64], ws: &mut Workspace) {
        let n = self.spec.resolution();
        let p = self.padded;
        ws.buf.fill(ZERO);
        for i in 0..n {
            ws.buf[i * p..i * p + n].copy_from_slice(&h[i * n..(i + 1) * n]);
        }
    }

    /// Forward 2-D FFT of `ws.buf` (only the first `N` rows nonzero) into
    /// `ws.tr` in `[ky][kx]` layout.
    fn forward_2d(&self, ws: &mut Workspace) {
        let n = self.spec.resolution();
        let p = self.padded;
        for row in ws.buf[..n * p].chunks_exact_mut(p) {
            self.forward.process_with_scratch(row, &mut ws.scratch);
        }
        transpose(&ws.buf, &mut ws.tr, p);
        for row in ws.tr.chunks_exact_mut(p) {
            self.forward.process_with_scratch(row, &mut ws.scratch);
        }
    }

    fn apply(&self, h: &[Complex64], symbol: &[Complex64], ws: &mut Workspace, out: &mut [Complex64]) {
        let n = self.spec.resolution();
        let p = self.padded;
        self.load(h, ws);
        self.forward_2d(ws);
        for (v, m) in ws.tr.iter_mut().zip(symbol) {
            *v *= m;
        }
        for row in ws.tr.chunks_exact_mut(p) {
            self.inverse.process_with_scratch(row, &mut ws.scratch);
        }
        transpose(&ws.tr, &mut ws.buf, p);
        let scale = 1.0 / (p * p) as f64;
        for i in 0..n {
            let row = &mut ws.buf[i * p..(i + 1) * p];
            self.inverse.process_with_scratch(row, &mut ws.scratch);
            for j in 0..n {
                out[i * n + j] = row[j] * scale;
            }
        }
    }

    fn cauchy_kernel_hat(&self) -> Vec<Complex64> {
        let n = self.spec.resolution() as isize;
        let p = self.padded;
        let h = self.spec.spacing();
        let mut ws = self.workspace();
        ws.buf.fill(ZERO);
        for di in -(n - 1)..n {
            for dj in -(n - 1)..n {
                let a = di.rem_euclid(p as isize) as usize;
                let b = dj.rem_euclid(p as isize) as usize;
                ws.buf[a * p + b] = cauchy_cell_kernel(di, dj, h);
            }
        }
        // Every row may be nonzero here, so transform them all.
        for row in ws.buf.chunks_exact_mut(p) {
            self.forward.process_with_scratch(row, &mut ws.scratch);
        }
        transpose(&ws.buf, &mut ws.tr, p);
        for row in ws.tr.chunks_exact_mut(p) {
            self.forward.process_with_scratch(row, &mut ws.scratch);
        }
        ws.tr
    }
}

/// `(1/π) ∬_cell du / u` over the cell of side `h` centered at offset
/// `(di + i dj) h`: exact on the 3×3 neighbourhood of the singular cell,
/// midpoint elsewhere.
pub fn cauchy_cell_kernel(di: isize, dj: isize, h: f64) -> Complex64 {
    if di.abs() <= 1 && dj.abs() <= 1 {
        let x0 = (di as f64 - 0.5) * h;
        let x1 = (di as f64 + 0.5) * h;
        let y0 = (dj as f64 - 0.5) * h;
        let y1 = (dj as f64 + 0.5) * h;
        (reciprocal_antiderivative(x1, y1) - reciprocal_antiderivative(x0, y1)
            - reciprocal_antiderivative(x1, y0)
            + reciprocal_antiderivative(x0, y0))
            / PI
    } else {
        let d = Complex64::new(di as f64 * h, dj as f64 * h);
        h * h / (PI * d)
    }
}

/// `F` with `∂²F/∂x∂y = 1/(x + iy)`; valid for `x, y ≠ 0`.
fn reciprocal_antiderivative(x: f64, y: f64) -> Complex64 {
    let l = (x * x + y * y).ln();
    let re = x * (y / x).atan() + 0.5 * y * l;
    let im = y * (x / y).atan() + 0.5 * x * l;
    Complex64::new(re, -im)
}

fn signed_frequency(k: usize, p: usize) -> f64 {
    if k < p / 2 {
        k as f64
    } else {
        k as f64 - p as f64
    }
}

fn beurling_symbol(p: usize) -> Vec<Complex64> {
    let mut m = vec![ZERO; p * p];
    for ky in 0..p {
        let fy = signed_frequency(ky, p);
        for kx in 0..p {
            let fx = signed_frequency(kx, p);
            if kx == 0 && ky == 0 {
                continue;
            }
            let xi = Complex64::new(fx, fy);
            m[ky * p + kx] = xi.conj() / xi;
        }
    }
    m
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], p: usize) {
    const B: usize = 32;
    for bi in (0..p).step_by(B) {
        for bj in (0..p).step_by(B) {
            for i in bi..(bi + B).min(p) {
                for j in bj..(bj + B).min(p) {
                    dst[j * p + i] = src[i * p + j];
                }
            }
        }
    }
}
