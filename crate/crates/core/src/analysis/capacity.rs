use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::grid::GridSpec;

/// Node role in a discrete condenser.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plate {
    /// Potential 0.
    Inner,
    /// Potential 1.
    Outer,
    Free,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CapacityOptions {
    /// Relative residual at which conjugate gradients stop.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 50_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Capacity {
    /// Discrete Dirichlet energy `Σ_edges (u_a − u_b)²`.
    pub energy: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn neighbours(spec: &GridSpec, idx: usize) -> impl Iterator<Item = usize> {
    let n = spec.resolution();
    let (i, j) = spec.coords(idx);
    let spec = *spec;
    [(-1isize, 0isize), (1, 0), (0, -1), (0, 1)]
        .into_iter()
        .filter_map(move |(di, dj)| {
            let (a, b) = (i as isize + di, j as isize + dj);
            (a >= 0 && b >= 0 && (a as usize) < n && (b as usize) < n)
                .then(|| spec.index(a as usize, b as usize))
        })
}

/// Capacity of the condenser labelled on `spec`: the five-point discrete
/// harmonic potential is 0 on inner nodes and 1 on outer nodes, with
/// reflecting conditions on the edge of the grid, and its Dirichlet energy
/// is returned.
pub fn discrete_capacity<L>(spec: &GridSpec, label: L, opts: &CapacityOptions) -> Result<Capacity>
where
    L: Fn(Complex64) -> Plate,
{
    let len = spec.len();
    let plates: Vec<Plate> = (0..len).map(|idx| label(spec.node_at(idx))).collect();
    if !plates.contains(&Plate::Inner) || !plates.contains(&Plate::Outer) {
        return Err(invalid("condenser needs both an inner and an outer plate"));
    }
    for idx in 0..len {
        if plates[idx] == Plate::Inner && neighbours(spec, idx).any(|m| plates[m] == Plate::Outer) {
            return Err(invalid("condenser plates touch"));
        }
    }

    let free: Vec<usize> = (0..len).filter(|&i| plates[i] == Plate::Free).collect();
    let mut diag = vec![0.0; len];
    let mut rhs = vec![0.0; len];
    for &i in &free {
        for m in neighbours(spec, i) {
            diag[i] += 1.0;
            if plates[m] == Plate::Outer {
                rhs[i] += 1.0;
            }
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for &i in &free {
            let mut acc = diag[i] * x[i];
            for m in neighbours(spec, i) {
                if plates[m] == Plate::Free {
                    acc -= x[m];
                }
            }
            out[i] = acc;
        }
    };

    // Jacobi-preconditioned conjugate gradients on the free nodes.
    let mut u = vec![0.0; len];
    let mut r = rhs.clone();
    let mut z = vec![0.0; len];
    for &i in &free {
        z[i] = r[i] / diag[i];
    }
    let mut p = z.clone();
    let mut ap = vec![0.0; len];
    let dot = |a: &[f64], b: &[f64]| free.iter().map(|&i| a[i] * b[i]).sum::<f64>();
    let b_norm = dot(&rhs, &rhs).sqrt();
    let mut rz = dot(&r, &z);
    let mut iterations = 0;
    let mut residual = if b_norm > 0.0 { 1.0 } else { 0.0 };
    while residual > opts.tol {
        if iterations == opts.max_iter {
            return Err(Error::NoConvergence {
                iterations,
                last_gap: residual,
                residual,
            });
        }
        iterations += 1;
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for &i in &free {
            u[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
            z[i] = r[i] / diag[i];
        }
        residual = dot(&r, &r).sqrt() / b_norm;
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for &i in &free {
            p[i] = z[i] + beta * p[i];
        }
    }

    for (idx, plate) in plates.iter().enumerate() {
        if *plate == Plate::Outer {
            u[idx] = 1.0;
        }
    }
    let n = spec.resolution();
    let mut energy = 0.0;
    for i in 0..n {
        for j in 0..n {
            let a = spec.index(i, j);
            if i + 1 < n {
                let b = spec.index(i + 1, j);
                if plates[a] == Plate::Free || plates[b] == Plate::Free {
                    energy += (u[a] - u[b]).powi(2);
                }
            }
            if j + 1 < n {
                let b = spec.index(i, j + 1);
                if plates[a] == Plate::Free || plates[b] == Plate::Free {
                    energy += (u[a] - u[b]).powi(2);
                }
            }
        }
    }
    Ok(Capacity {
        energy,
        iterations,
        residual,
    })
}

/// Capacity of the round annulus `r1 < |z − center| < r2` on a grid of
/// half-width `1.1 r2`.
pub fn annulus_capacity(
    center: Complex64,
    r1: f64,
    r2: f64,
    resolution: usize,
    opts: &CapacityOptions,
) -> Result<Capacity> {
    if !(r1 > 0.0 && r1 < r2 && r2.is_finite()) {
        return Err(invalid("annulus needs 0 < r1 < r2"));
    }
    let spec = GridSpec::new(center, 1.1 * r2, resolution)?;
    discrete_capacity(
        &spec,
        |z| {
            let d = (z - center).norm();
            if d <= r1 {
                Plate::Inner
            } else if d >= r2 {
                Plate::Outer
            } else {
                Plate::Free
            }
        },
        opts,
    )
}
