//! One-dimensional Gauss–Legendre rules.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point rule on `[-1, 1]`.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (x, w) = gauss_legendre_rule(n);
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    x.iter().zip(&w).map(|(&xi, &wi)| wi * f(m + r * xi)).sum::<f64>() * r
}

/// Composite rule over `panels` equal subintervals.
pub fn composite_gauss<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, n: usize) -> f64 {
    let (x, w) = gauss_legendre_rule(n);
    let step = (b - a) / panels as f64;
    let r = 0.5 * step;
    let mut acc = 0.0;
    for p in 0..panels {
        let m = a + (p as f64 + 0.5) * step;
        acc += x.iter().zip(&w).map(|(&xi, &wi)| wi * f(m + r * xi)).sum::<f64>() * r;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        for n in [1, 2, 5, 16] {
            let deg = 2 * n - 1;
            let got = gauss_legendre(|x| x.powi(deg as i32) + 1.0, 0.0, 2.0, n);
            let exact = 2f64.powi(deg as i32 + 1) / (deg + 1) as f64 + 2.0;
            assert!((got - exact).abs() < 1e-11 * exact, "n = {n}");
        }
    }

    #[test]
    fn weights_sum_to_two() {
        let (_, w) = gauss_legendre_rule(33);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn composite_log() {
        let got = composite_gauss(|x| 1.0 / x, 1.0, std::f64::consts::E, 4, 8);
        assert!((got - 1.0).abs() < 1e-13);
    }
}
