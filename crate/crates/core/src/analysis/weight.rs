use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::grid::ComplexField;

/// A nonnegative weight `Q` on the plane; `+∞` is allowed.
pub trait Weight {
    fn value(&self, y: Complex64) -> f64;

    /// Length below which the weight carries no information (the grid
    /// spacing for sampled weights).
    fn floor(&self) -> f64 {
        0.0
    }

    fn covers(&self, _y: Complex64) -> bool {
        true
    }
}

impl<F> Weight for F
where
    F: Fn(Complex64) -> f64,
{
    fn value(&self, y: Complex64) -> f64 {
        self(y)
    }
}

/// A weight given by bilinear interpolation of a real-valued field. Cells
/// touching an infinite node evaluate to `+∞`.
#[derive(Clone, Debug)]
pub struct SampledWeight {
    field: ComplexField,
}

impl SampledWeight {
    pub fn new(field: ComplexField) -> Result<Self> {
        if field.values().iter().any(|v| v.re.is_nan() || v.re < 0.0) {
            return Err(invalid("weight values must be nonnegative"));
        }
        Ok(Self { field })
    }

    pub fn field(&self) -> &ComplexField {
        &self.field
    }
}

impl Weight for SampledWeight {
    fn value(&self, y: Complex64) -> f64 {
        self.field.interpolate_real(y).unwrap_or(f64::NAN)
    }

    fn floor(&self) -> f64 {
        self.field.spec().spacing()
    }

    fn covers(&self, y: Complex64) -> bool {
        self.field.spec().contains(y)
    }
}
