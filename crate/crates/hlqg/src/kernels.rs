//! Special kernels: the skew bicharacter, the polynomially weighted Fourier
//! transforms h-tilde and l, the cosh/tanh Gaussian closed form with its
//! smeared counterpart, and the exact 2x2 shear factorization identity.

use crate::heisen::heat_kernel;
use crate::quad::{PolarQuad, QuadSpec};
use crate::scalar::GRat;
use num_complex::Complex64;
use serde::Serialize;
#[cfg(test)]
use std::f64::consts::PI;

/// Quadrature result with a two-level refinement error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KernelValue {
    pub re: f64,
    pub im: f64,
    pub error_estimate: f64,
}

impl KernelValue {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// psi(z, z') = exp(i (s/4) Im(z zbar')).
pub fn psi(z: Complex64, zp: Complex64, s: f64) -> Complex64 {
    Complex64::new(0.0, s / 4.0 * (z * zp.conj()).im).exp()
}

fn refine(q: &QuadSpec) -> QuadSpec {
    QuadSpec {
        radius: q.radius * 1.25,
        n_radial: q.n_radial * 3 / 2,
        n_angular: q.n_angular * 3 / 2,
    }
}

/// Unit-s transform F(w) = int d^2z e^{i Im(wz)} / (1+|z|^2)^2; radial in w.
fn base_transform(w: Complex64, q: &QuadSpec) -> Complex64 {
    let grid = PolarQuad::new(q);
    grid.integrate(|z| {
        let ph = (w * z).im;
        Complex64::new(0.0, ph).exp() / Complex64::new((1.0 + z.norm_sqr()).powi(2), 0.0)
    })
}

/// h~(w) = int d^2z e^{i Im(wz)} / (1 + |z|^2/s^2)^2 = s^2 F(s w).
/// The integrand decays only like |z|^{-4}, so the truncation tail is about
/// pi s^4 / R^2; a warning fires when that exceeds 1e-3 of the |w| = 0 value.
pub fn h_tilde(w: Complex64, s: f64, q: &QuadSpec) -> KernelValue {
    assert!(s != 0.0);
    let tail_rel = (s * s) / (q.radius * q.radius);
    if tail_rel > 1e-3 {
        eprintln!("warning: h_tilde cutoff R={} leaves relative tail ~{:.1e}", q.radius, tail_rel);
    }
    let scale = Complex64::new(s * s, 0.0);
    let v1 = scale * base_transform(w * s, q);
    let v2 = scale * base_transform(w * s, &refine(q));
    KernelValue { re: v2.re, im: v2.im, error_estimate: (v2 - v1).norm() }
}

/// l(w1, w2) = int d^2z1 d^2z2 e^{-i Im(z1 w1 + z2 w2 - (s/4) z1 zbar2)}
///             / ((1+|z1|^2)^2 (1+|z2|^2)^2),
/// computed by nesting: the z2-integral is F at the shifted frequency
/// w2 + (s/4) zbar1, then an outer z1-quadrature.
pub fn l_kernel(w1: Complex64, w2: Complex64, s: f64, q: &QuadSpec) -> KernelValue {
    let run = |spec: &QuadSpec| -> Complex64 {
        let outer = PolarQuad::new(spec);
        let inner = PolarQuad::new(spec);
        let vals = crate::par::map_indexed(outer.len(), |k| {
            let z1 = outer.nodes[k];
            let shifted = w2 + z1.conj() * (s / 4.0);
            let mut inner_sum = Complex64::new(0.0, 0.0);
            for (z2, wgt) in inner.nodes.iter().zip(inner.weights.iter()) {
                let ph = -(z2 * shifted).im;
                inner_sum += Complex64::new(0.0, ph).exp()
                    * (wgt / (1.0 + z2.norm_sqr()).powi(2));
            }
            let ph1 = -(z1 * w1).im;
            Complex64::new(0.0, ph1).exp() * inner_sum
                * (outer.weights[k] / (1.0 + z1.norm_sqr()).powi(2))
        });
        vals.into_iter().sum()
    };
    let v1 = run(q);
    let v2 = run(&QuadSpec { radius: q.radius, n_radial: q.n_radial * 5 / 4, n_angular: q.n_angular + 4 });
    KernelValue { re: v1.re, im: v1.im, error_estimate: (v2 - v1).norm() }
}

/// Brute-force 4-D quadrature oracle for l.
pub fn l_kernel_direct(w1: Complex64, w2: Complex64, s: f64, q: &QuadSpec) -> Complex64 {
    let grid = PolarQuad::new(q);
    let vals = crate::par::map_indexed(grid.len(), |k| {
        let z1 = grid.nodes[k];
        let mut acc = Complex64::new(0.0, 0.0);
        for (z2, wgt) in grid.nodes.iter().zip(grid.weights.iter()) {
            let ph = -((z1 * w1).im + (z2 * w2).im - (z1 * z2.conj()).im * s / 4.0);
            acc += Complex64::new(0.0, ph).exp() * (wgt / (1.0 + z2.norm_sqr()).powi(2));
        }
        acc * (grid.weights[k] / (1.0 + z1.norm_sqr()).powi(2))
    });
    vals.into_iter().sum()
}

/// Closed form f(a, g, d) = cosh(x)^{-2} exp(-(|a|^2+|d|^2) tanh(x)/x) with
/// x = (s/2)|g|^2, in log-space; the g -> 0 limit uses the series
/// tanh(x)/x = 1 - x^2/3 + ..., cosh(x)^{-2} = 1 - x^2 + ...
pub fn f_gen(alpha: Complex64, gamma: Complex64, delta: Complex64, s: f64) -> f64 {
    assert!(s != 0.0);
    let x = s / 2.0 * gamma.norm_sqr();
    let m = alpha.norm_sqr() + delta.norm_sqr();
    if x.abs() < 1e-6 {
        let tanh_ratio = 1.0 - x * x / 3.0;
        let log_cosh2 = x * x; // 2 log cosh x ~ x^2
        return (-log_cosh2 - m * tanh_ratio).exp();
    }
    // 2 ln cosh x, overflow-safe
    let ax = x.abs();
    let log_cosh2 = 2.0
        * if ax > 20.0 {
            ax - std::f64::consts::LN_2 + (-2.0 * ax).exp().ln_1p()
        } else {
            ax.cosh().ln()
        };
    (-log_cosh2 - m * (x.tanh() / x)).exp()
}

/// Quadrature evaluation of the same value as a product of two smeared
/// one-leg integrals: int d^2z h_1(z, -x) e^{i Im(z a)} times the +x leg at
/// frequency d.
pub fn f_gen_smeared(
    alpha: Complex64,
    gamma: Complex64,
    delta: Complex64,
    s: f64,
    q: &QuadSpec,
) -> KernelValue {
    let x = s / 2.0 * gamma.norm_sqr();
    let leg = |freq: Complex64, charge: f64, spec: &QuadSpec| -> Complex64 {
        let grid = PolarQuad::new(spec);
        grid.integrate(|z| {
            Complex64::new(0.0, (z * freq).im).exp()
                * Complex64::new(heat_kernel(z, charge, 1.0), 0.0)
        })
    };
    let run = |spec: &QuadSpec| leg(alpha, -x, spec) * leg(delta, x, spec);
    let v1 = run(q);
    let v2 = run(&refine(q));
    KernelValue { re: v2.re, im: v2.im, error_estimate: (v2 - v1).norm() }
}

// --- exact 2x2 layer ------------------------------------------------------

type M2 = [[GRat; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[GRat::zero(), GRat::zero()], [GRat::zero(), GRat::zero()]];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = GRat::zero();
            for (k, row) in b.iter().enumerate() {
                acc = &acc + &(&a[i][k] * &row[j]);
            }
            out[i][j] = acc;
        }
    }
    out
}

fn g_mat(x: &GRat) -> M2 {
    [[GRat::zero(), x.inv()], [-x, GRat::zero()]]
}

fn shear(t: GRat) -> M2 {
    [[GRat::one(), t], [GRat::zero(), GRat::one()]]
}

fn m2_det(m: &M2) -> GRat {
    &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0])
}

/// Exact verification of
/// g_u = shear(-v/(uw)) g_w shear(-u/(vw)) g_v shear(-w/(uv))
/// with g_x = [[0, x^{-1}], [-x, 0]], over Gaussian rationals.
pub fn verify_gw_factorization(u: &GRat, v: &GRat, w: &GRat) -> bool {
    assert!(!u.is_zero() && !v.is_zero() && !w.is_zero(), "inputs must be nonzero");
    let neg = |a: &GRat, b: &GRat, c: &GRat| -&(&(a * &b.inv()) * &c.inv());
    let rhs = m2_mul(
        &m2_mul(
            &m2_mul(&m2_mul(&shear(neg(v, u, w)), &g_mat(w)), &shear(neg(u, v, w))),
            &g_mat(v),
        ),
        &shear(neg(w, u, v)),
    );
    let lhs = g_mat(u);
    let det_ok = m2_det(&rhs) == GRat::one();
    det_ok
        && (0..2).all(|i| (0..2).all(|j| lhs[i][j] == rhs[i][j]))
}
