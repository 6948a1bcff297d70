//! Quadrature over the complex plane: Gauss-Legendre in the radius crossed
//! with a uniform trapezoid rule in the angle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n and its derivative by recurrence
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Quadrature grid parameters for integrals over the complex plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct QuadSpec {
    pub radius: f64,
    pub n_radial: usize,
    pub n_angular: usize,
}

impl Default for QuadSpec {
    fn default() -> Self {
        QuadSpec { radius: 7.5, n_radial: 96, n_angular: 128 }
    }
}

/// Materialized polar grid: nodes z_k with weights w_k so that
/// sum_k w_k f(z_k) approximates the integral of f d^2z over |z| < radius.
#[derive(Debug, Clone)]
pub struct PolarQuad {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl PolarQuad {
    pub fn new(spec: &QuadSpec) -> Self {
        let (gx, gw) = gauss_legendre(spec.n_radial);
        let half = spec.radius / 2.0;
        let dtheta = 2.0 * std::f64::consts::PI / spec.n_angular as f64;
        let mut nodes = Vec::with_capacity(spec.n_radial * spec.n_angular);
        let mut weights = Vec::with_capacity(spec.n_radial * spec.n_angular);
        for (x, wr) in gx.iter().zip(gw.iter()) {
            let r = half * (x + 1.0);
            let w = wr * half * r * dtheta;
            for j in 0..spec.n_angular {
                let th = dtheta * j as f64;
                nodes.push(Complex64::from_polar(r, th));
                weights.push(w);
            }
        }
        PolarQuad { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Scalar integral of f over the disc.
    pub fn integrate<F: Fn(Complex64) -> Complex64 + Sync>(&self, f: F) -> Complex64 {
        let vals = crate::par::map_indexed(self.len(), |k| self.weights[k] * f(self.nodes[k]));
        vals.into_iter().sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(5);
        // degree 9 polynomial x^8
        let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-13, "got {s}");
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_integral_on_plane() {
        let q = PolarQuad::new(&QuadSpec { radius: 7.0, n_radial: 64, n_angular: 64 });
        let v = q.integrate(|z| Complex64::new((-z.norm_sqr()).exp(), 0.0));
        assert!((v.re - std::f64::consts::PI).abs() < 1e-10, "got {v}");
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn oscillatory_gaussian() {
        // int e^{-|z|^2} e^{i Im(wz)} d^2z = pi e^{-|w|^2/4}
        let q = PolarQuad::new(&QuadSpec::default());
        let w = Complex64::new(1.3, -0.7);
        let v = q.integrate(|z| {
            let ph = (w * z).im;
            Complex64::new(0.0, ph).exp() * (-z.norm_sqr()).exp()
        });
        let expect = std::f64::consts::PI * (-w.norm_sqr() / 4.0).exp();
        assert!((v.re - expect).abs() < 1e-9, "got {v} expect {expect}");
    }
}
