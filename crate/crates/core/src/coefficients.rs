//! The coefficient pair `(μ, ν)` of `f_zbar = μ f_z + ν conj(f_z)`, its
//! dilatations, truncation and reduction to a single effective coefficient.

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::{ComplexField, GridSpec, Meaning};

/// Modulus below which `f_z` is treated as vanishing in [`effective_mu`].
pub const DEGENERATE_FZ: f64 = 1e-14;

#[derive(Clone, Debug)]
pub struct CoefficientField {
    mu: ComplexField,
    nu: ComplexField,
    support_radius: f64,
}

impl CoefficientField {
    pub fn new(mu: ComplexField, nu: ComplexField) -> Result<Self> {
        if mu.spec() != nu.spec() {
            return Err(invalid("mu and nu must share a grid"));
        }
        let spec = *mu.spec();
        let support_radius = mu
            .values()
            .iter()
            .zip(nu.values())
            .enumerate()
            .filter(|(_, (m, n))| m.norm_sqr() + n.norm_sqr() > 0.0)
            .map(|(idx, _)| spec.node_at(idx).norm())
            .fold(0.0, f64::max);
        Ok(Self {
            mu: mu.with_meaning(Meaning::Coefficient),
            nu: nu.with_meaning(Meaning::Coefficient),
            support_radius,
        })
    }

    pub fn zero(spec: GridSpec) -> Self {
        Self {
            mu: ComplexField::zeros(spec, Meaning::Coefficient),
            nu: ComplexField::zeros(spec, Meaning::Coefficient),
            support_radius: 0.0,
        }
    }

    pub fn from_fns<M, N>(spec: GridSpec, mu: M, nu: N) -> Result<Self>
    where
        M: Fn(Complex64) -> Complex64,
        N: Fn(Complex64) -> Complex64,
    {
        Self::new(
            ComplexField::sample(mu, spec, Meaning::Coefficient)?,
            ComplexField::sample(nu, spec, Meaning::Coefficient)?,
        )
    }

    pub fn spec(&self) -> &GridSpec {
        self.mu.spec()
    }

    pub fn mu(&self) -> &ComplexField {
        &self.mu
    }

    pub fn nu(&self) -> &ComplexField {
        &self.nu
    }

    /// Largest node modulus where `(μ, ν) ≠ 0`, measured from the origin.
    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    /// `max (|μ| + |ν|)` over the nodes.
    pub fn sup_norm(&self) -> f64 {
        self.mu
            .values()
            .iter()
            .zip(self.nu.values())
            .map(|(m, n)| m.norm() + n.norm())
            .fold(0.0, f64::max)
    }

    /// Nodes where `|μ| + |ν| >= 1`.
    pub fn violations(&self) -> Vec<usize> {
        self.mu
            .values()
            .iter()
            .zip(self.nu.values())
            .enumerate()
            .filter(|(_, (m, n))| m.norm() + n.norm() >= 1.0)
            .map(|(idx, _)| idx)
            .collect()
    }

    pub fn is_nonzero_at(&self, idx: usize) -> bool {
        self.mu.values()[idx] != Complex64::new(0.0, 0.0)
            || self.nu.values()[idx] != Complex64::new(0.0, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationLevel {
    n: usize,
}

impl TruncationLevel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("truncation level must be >= 1"));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `(n − 1)/(n + 1)`, the bound on `|μ_n| + |ν_n|`.
    pub fn bound(&self) -> f64 {
        (self.n as f64 - 1.0) / (self.n as f64 + 1.0)
    }
}

/// `K_{μ,ν}` as a real scalar field together with the nodes where the
/// standing assumption `|μ| + |ν| < 1` fails (those carry `+∞`).
#[derive(Clone, Debug)]
pub struct JointDilatation {
    pub field: ComplexField,
    pub violations: Vec<usize>,
}

#[inline]
pub fn joint_dilatation_value(mu: Complex64, nu: Complex64) -> f64 {
    let s = mu.norm() + nu.norm();
    if s >= 1.0 {
        f64::INFINITY
    } else {
        (1.0 + s) / (1.0 - s)
    }
}

pub fn joint_dilatation(coeff: &CoefficientField) -> JointDilatation {
    let mut violations = Vec::new();
    let values: Vec<f64> = coeff
        .mu
        .values()
        .iter()
        .zip(coeff.nu.values())
        .enumerate()
        .map(|(idx, (&m, &n))| {
            let k = joint_dilatation_value(m, n);
            if k.is_infinite() {
                violations.push(idx);
            }
            k
        })
        .collect();
    JointDilatation {
        field: ComplexField::from_real(*coeff.spec(), values)
            .expect("scalar fields accept extended reals"),
        violations,
    }
}

/// `K_μ = (1 + |μ|)/(1 − |μ|)`.
pub fn single_dilatation(mu: Complex64) -> Result<f64> {
    let m = mu.norm();
    if !(m < 1.0) {
        return Err(invalid(format!("|mu| = {m} must be < 1")));
    }
    Ok((1.0 + m) / (1.0 - m))
}

/// Keeps `(μ, ν)` where `K_{μ,ν} <= n` and zeroes it elsewhere.
pub fn truncate(coeff: &CoefficientField, level: TruncationLevel) -> CoefficientField {
    let n = level.n() as f64;
    let zero = Complex64::new(0.0, 0.0);
    let mut mu = coeff.mu.clone();
    let mut nu = coeff.nu.clone();
    for (m, v) in mu.values_mut().iter_mut().zip(nu.values_mut().iter_mut()) {
        if !(joint_dilatation_value(*m, *v) <= n) {
            *m = zero;
            *v = zero;
        }
    }
    CoefficientField::new(mu, nu).expect("same grid")
}

#[derive(Clone, Debug)]
pub struct EffectiveMu {
    pub field: ComplexField,
    /// Nodes where `|f_z| < 1e-14`; the field holds `μ` alone there.
    pub flagged: Vec<usize>,
}

/// `μ* = μ + ν conj(f_z)/f_z`, the coefficient of the ordinary Beltrami
/// equation solved by a solution `f` of the two-characteristic one.
pub fn effective_mu(coeff: &CoefficientField, f_z: &ComplexField) -> Result<EffectiveMu> {
    if f_z.spec() != coeff.spec() {
        return Err(invalid("f_z must be sampled on the coefficient grid"));
    }
    let mut flagged = Vec::new();
    let values = coeff
        .mu
        .values()
        .iter()
        .zip(coeff.nu.values())
        .zip(f_z.values())
        .enumerate()
        .map(|(idx, ((&m, &n), &d))| {
            if d.norm() < DEGENERATE_FZ {
                flagged.push(idx);
                m
            } else {
                m + n * d.conj() / d
            }
        })
        .collect();
    Ok(EffectiveMu {
        field: ComplexField::new(*coeff.spec(), values, Meaning::Coefficient)?,
        flagged,
    })
}
