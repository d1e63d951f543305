//! Closed-form radial family with a degenerating limit.
//!
//! For `0 < α < 2` the coefficient
//!
//! ```text
//! μ(z) = e^{2iθ} (2r − α(2r − 1)) / (2r + α(2r − 1))   on 1/2 < |z| < 1
//! ```
//!
//! (zero elsewhere) is solved by `f(z) = (z/|z|)(2|z| − 1)^{1/α}`, which
//! collapses the disk `|z| <= 1/2` to a point. Truncating at `K_μ <= k` keeps
//! the annulus `ρ(k) <= |z| < 1`, `ρ(k) = (1/2)·kα/(kα − 1)`, and the
//! truncated equation has the homeomorphic solutions `f_k` (radial outside
//! `ρ(k)`, linear inside, identity for `|z| >= 1`) with explicit inverses `g_k`.
//!
//! Points exactly on a branch circle take the outer branch, except `|z| = 1/2`
//! for the untruncated functions, where the outer formula degenerates.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExampleParams {
    alpha: f64,
    k: f64,
}

impl ExampleParams {
    pub fn new(alpha: f64, k: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(k.is_finite() && k * alpha > 1.0) {
            return Err(invalid(format!("need k > 1/alpha, got k = {k}, alpha = {alpha}")));
        }
        let p = Self { alpha, k };
        if !(p.rho() < 1.0) {
            return Err(invalid(format!(
                "truncation radius {} must lie below 1 (k = {k}, alpha = {alpha})",
                p.rho()
            )));
        }
        Ok(p)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// `ρ(k) = (1/2)·kα/(kα − 1)`: `K_μ <= k` exactly on `ρ(k) <= |z| < 1`.
    pub fn rho(&self) -> f64 {
        let ka = self.k * self.alpha;
        0.5 * ka / (ka - 1.0)
    }

    /// `f_k(ρ(k)) = (1/(kα − 1))^{1/α}`, the branch radius of `g_k`.
    pub fn image_radius(&self) -> f64 {
        (1.0 / (self.k * self.alpha - 1.0)).powf(1.0 / self.alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(invalid(format!("alpha must lie in (0, 2), got {alpha}")));
    }
    Ok(())
}

fn unit(z: Complex64) -> Complex64 {
    z / z.norm()
}

/// Untruncated coefficient.
pub fn mu_example(z: Complex64, alpha: f64) -> Complex64 {
    let r = z.norm();
    if r <= 0.5 || r >= 1.0 {
        return Complex64::new(0.0, 0.0);
    }
    let e2 = unit(z) * unit(z);
    let s = alpha * (2.0 * r - 1.0);
    e2 * ((2.0 * r - s) / (2.0 * r + s))
}

/// Coefficient truncated to `K_μ <= k`.
pub fn mu_k_example(z: Complex64, params: &ExampleParams) -> Complex64 {
    if z.norm() >= params.rho() {
        mu_example(z, params.alpha)
    } else {
        Complex64::new(0.0, 0.0)
    }
}

/// Degenerate limit map; identity for `|z| >= 1`.
pub fn f_example(z: Complex64, alpha: f64) -> Complex64 {
    let r = z.norm();
    if r <= 0.5 {
        Complex64::new(0.0, 0.0)
    } else if r < 1.0 {
        unit(z) * (2.0 * r - 1.0).powf(1.0 / alpha)
    } else {
        z
    }
}

pub fn f_k_example(z: Complex64, params: &ExampleParams) -> Complex64 {
    let r = z.norm();
    let rho = params.rho();
    if r >= 1.0 {
        z
    } else if r >= rho {
        unit(z) * (2.0 * r - 1.0).powf(1.0 / params.alpha)
    } else {
        z * (params.image_radius() / rho)
    }
}

pub fn g_k_example(y: Complex64, params: &ExampleParams) -> Complex64 {
    let s = y.norm();
    let s0 = params.image_radius();
    if s >= 1.0 {
        y
    } else if s >= s0 {
        unit(y) * (0.5 * (s.powf(params.alpha) + 1.0))
    } else {
        y * (params.rho() / s0)
    }
}

/// `K_μ = 2|z| / (α(2|z| − 1))` on the annulus, 1 elsewhere.
pub fn k_mu_example(z: Complex64, alpha: f64) -> f64 {
    let r = z.norm();
    if r <= 0.5 || r >= 1.0 {
        1.0
    } else {
        2.0 * r / (alpha * (2.0 * r - 1.0))
    }
}

/// Maximal dilatation of `f_k`.
pub fn k_mu_k_example(z: Complex64, params: &ExampleParams) -> f64 {
    let r = z.norm();
    if r >= params.rho() && r < 1.0 {
        2.0 * r / (params.alpha * (2.0 * r - 1.0))
    } else {
        1.0
    }
}

/// `(|y|^α + 1)/(α|y|^α)` for `0 < |y| < 1`, 1 for `|y| >= 1`, `+∞` at 0.
pub fn q_example(y: Complex64, alpha: f64) -> f64 {
    let s = y.norm();
    if s >= 1.0 {
        return 1.0;
    }
    let sa = s.powf(alpha);
    (sa + 1.0) / (alpha * sa)
}

/// Dilatation of the limit inverse: the majorant itself on the punctured disk.
pub fn k_inverse_example(y: Complex64, alpha: f64) -> f64 {
    q_example(y, alpha)
}

/// `K_{μ_{g_k}}`: the majorant outside the branch radius, 1 inside.
pub fn k_inverse_k_example(y: Complex64, params: &ExampleParams) -> f64 {
    let s = y.norm();
    if s >= params.image_radius() && s < 1.0 {
        q_example(y, params.alpha)
    } else {
        1.0
    }
}

/// `∫_𝔻 Q^q dm = 2π ∫_0^1 ((r^α + 1)/(α r^α))^q r dr`, finite for `αq < 2`,
/// evaluated by Gauss–Legendre after the substitution `r = t^{2/(2 − αq)}`
/// that removes the endpoint singularity.
pub fn q_example_disk_integral(alpha: f64, q: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(q >= 1.0 && alpha * q < 2.0) {
        return Err(invalid("need q >= 1 and alpha q < 2"));
    }
    let e = 2.0 / (2.0 - alpha * q);
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let r = t.powf(e);
        let dr = e * t.powf(e - 1.0);
        let ra = r.powf(alpha);
        ((ra + 1.0) / alpha).powf(q) * r.powf(1.0 - alpha * q) * dr
    };
    Ok(2.0 * std::f64::consts::PI * crate::quadrature::gauss_legendre(integrand, 0.0, 1.0, 64))
}

/// `μ_f = e^{2iθ}(r f_r + i f_θ)/(r f_r − i f_θ)` with polar central
/// differences of step `step` (relative in `r`, absolute in `θ`).
pub fn mu_from_polar<F>(f: F, z: Complex64, step: f64) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64,
{
    let r = z.norm();
    if r == 0.0 {
        return Err(invalid("polar ratio is undefined at the origin"));
    }
    let e = unit(z);
    let dr = step * r;
    let f_r = (f(e * (r + dr)) - f(e * (r - dr))) / (2.0 * dr);
    let rot = Complex64::from_polar(1.0, step);
    let f_t = (f(z * rot) - f(z / rot)) / (2.0 * step);
    let i = Complex64::i();
    let num = r * f_r + i * f_t;
    let den = r * f_r - i * f_t;
    if den.norm() <= num.norm() {
        return Err(Error::Degenerate);
    }
    Ok(e * e * num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn p31() -> ExampleParams {
        ExampleParams::new(1.0, 3.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert_eq!(p31().rho(), 0.75);
        assert!(ExampleParams::new(1.0, 1.0).is_err());
        assert!(ExampleParams::new(0.5, 2.0).is_err());
        assert!(ExampleParams::new(0.5, 3.0).is_err());
        assert!(ExampleParams::new(0.5, 6.0).is_ok());
        // rho(2) = 1 for alpha = 1: degenerate.
        assert!(ExampleParams::new(1.0, 2.0).is_err());
        assert!(ExampleParams::new(0.0, 3.0).is_err());
    }

    #[test]
    fn coefficient_values() {
        assert_abs_diff_eq!((mu_example(c(0.75, 0.0), 1.0) - c(0.5, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((mu_example(c(0.0, 0.75), 1.0) - c(-0.5, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(mu_example(c(0.3, 0.2), 1.0), c(0.0, 0.0));
        assert_eq!(mu_example(c(0.5, 0.0), 1.0), c(0.0, 0.0));
    }

    #[test]
    fn map_values() {
        assert_abs_diff_eq!((f_example(c(0.9, 0.0), 1.0) - c(0.8, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_example(c(0.75, 0.0), 2.0).re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(f_example(c(0.5, 0.0), 1.0), c(0.0, 0.0));
        let p = p31();
        assert_abs_diff_eq!((f_k_example(c(0.9, 0.0), &p) - c(0.8, 0.0)).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f_k_example(c(0.5, 0.0), &p).re, 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(f_k_example(c(1.2, -0.4), &p), c(1.2, -0.4));
        assert_abs_diff_eq!((g_k_example(c(0.8, 0.0), &p) - c(0.9, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn branches_match_on_circles() {
        for (alpha, k) in [(1.0, 3.0), (0.5, 6.0), (1.5, 4.0), (1.0, 17.0)] {
            let p = ExampleParams::new(alpha, k).unwrap();
            let rho = p.rho();
            let inner = c(rho, 0.0) * (p.image_radius() / rho);
            let outer = c((2.0 * rho - 1.0).powf(1.0 / alpha), 0.0);
            assert_abs_diff_eq!((inner - outer).norm(), 0.0, epsilon = 1e-14);
            let s0 = p.image_radius();
            let g_in = s0 * rho / s0;
            let g_out = 0.5 * (s0.powf(alpha) + 1.0);
            assert_abs_diff_eq!(g_in, g_out, epsilon = 1e-14);
            // Continuity at |z| = 1.
            let below = f_k_example(c(1.0 - 1e-12, 0.0), &p);
            assert_abs_diff_eq!(below.re, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn dilatation_values() {
        let p = p31();
        assert_abs_diff_eq!(k_mu_example(c(0.75, 0.0), 1.0), 3.0, epsilon = 1e-14);
        assert_eq!(k_mu_example(c(0.2, 0.1), 1.0), 1.0);
        assert_abs_diff_eq!(k_mu_k_example(c(0.0, p.rho()), &p), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(k_inverse_example(c(0.8, 0.0), 1.0), 2.25, epsilon = 1e-14);
        assert_abs_diff_eq!(k_inverse_example(c(1.0 - 1e-12, 0.0), 1.0), 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(k_inverse_k_example(c(0.8, 0.0), &p), 2.25, epsilon = 1e-14);
        assert_eq!(k_inverse_k_example(c(0.3, 0.0), &p), 1.0);
        // Single-coefficient dilatation agrees with the closed form.
        let mu = mu_example(c(0.6, 0.3), 0.7);
        let k = crate::coefficients::single_dilatation(mu).unwrap();
        assert_abs_diff_eq!(k, k_mu_example(c(0.6, 0.3), 0.7), epsilon = 1e-12);
    }

    #[test]
    fn inverse_dilatation_is_dominated_by_majorant() {
        let p = ExampleParams::new(0.8, 5.0).unwrap();
        for a in 1..100 {
            let y = Complex64::from_polar(a as f64 / 100.0, a as f64);
            assert!(k_inverse_k_example(y, &p) <= q_example(y, 0.8));
        }
    }

    #[test]
    fn majorant_integral() {
        assert_abs_diff_eq!(q_example_disk_integral(1.0, 1.0).unwrap(), 3.0 * std::f64::consts::PI, epsilon = 1e-10);
        assert!(q_example_disk_integral(1.0, 2.0).is_err());
        // alpha = 0.5, q = 2: 2π ∫ (r^{1/2}+1)^2 / (0.25 r) r dr = 8π (1/2 + 4/3 + 1).
        let expected = 8.0 * std::f64::consts::PI * (0.5 + 4.0 / 3.0 + 1.0);
        assert_abs_diff_eq!(q_example_disk_integral(0.5, 2.0).unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn polar_ratio() {
        assert_abs_diff_eq!(mu_from_polar(|z| z, c(0.3, 0.4), 1e-5).unwrap().norm(), 0.0, epsilon = 1e-9);
        let m = mu_from_polar(|z| f_example(z, 1.0), c(0.75, 0.0), 1e-5).unwrap();
        assert_abs_diff_eq!((m - c(0.5, 0.0)).norm(), 0.0, epsilon = 1e-8);
        assert!(matches!(mu_from_polar(|z| z.conj(), c(0.3, 0.4), 1e-5), Err(Error::Degenerate)));
        assert!(mu_from_polar(|z| z, c(0.0, 0.0), 1e-5).is_err());
        let z = c(-0.3, 0.62);
        let m = mu_from_polar(|z| f_example(z, 1.3), z, 1e-5).unwrap();
        assert_abs_diff_eq!((m - mu_example(z, 1.3)).norm(), 0.0, epsilon = 1e-8);
    }
}
