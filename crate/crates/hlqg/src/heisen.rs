//! Truncated Fock-space realizations of infinitesimal Heisenberg
//! representations: displacement unitaries, the heat-kernel semigroup, and
//! Gaussian smearing families.
//!
//! Conventions, fixed once and verified numerically by the calibration tests:
//! the central charge is lambda = a*a - aa* on the low-lying block; the
//! displacement unitary is U_{z,t} = e^{-i lambda t/2} exp((z a - zbar a*)/2),
//! which obeys the group law (z,t)(z',t') = (z+z', t+t'+ (1/2)Im(zbar z')),
//! equivalently U_{z,0}U_{z',0} = e^{i(lambda/4)Im(z zbar')} U_{z+z',0}.
//! The heat weight that reproduces exp(-t a*a) by smearing carries the
//! charge argument x = -lambda/2 in this sign convention.

use crate::linalg::{compress, dagger, expm_normal, op_norm, CMat};
use crate::par;
use crate::quad::{PolarQuad, QuadSpec};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct TruncRep {
    pub dim: usize,
    pub lambda: f64,
    pub c0: Complex64,
    pub s: f64,
    pub a: CMat,
}

/// Ladder matrix: raising if `up`, with L e_k = sqrt(k+1) e_{k+1}; otherwise
/// lowering with L e_k = sqrt(k) e_{k-1}.
pub fn ladder(n: usize, up: bool) -> CMat {
    let mut m = CMat::zeros(n, n);
    for k in 0..n - 1 {
        let v = Complex64::new(((k + 1) as f64).sqrt(), 0.0);
        if up {
            m[(k + 1, k)] = v;
        } else {
            m[(k, k + 1)] = v;
        }
    }
    m
}

/// a = c0 + sqrt(|lambda|) * (raising ladder for lambda > 0, lowering for
/// lambda < 0), so that a*a - aa* = lambda away from the truncation edge.
pub fn build_irrep(lambda: f64, c0: Complex64, n: usize) -> TruncRep {
    assert!(lambda != 0.0, "central charge must be nonzero; use a scalar otherwise");
    assert!(n >= 2);
    let mu = lambda.abs().sqrt();
    let mut a = ladder(n, lambda > 0.0) * Complex64::new(mu, 0.0);
    for k in 0..n {
        a[(k, k)] += c0;
    }
    TruncRep { dim: n, lambda, c0, s: 0.0, a }
}

impl TruncRep {
    pub fn a_dag(&self) -> CMat {
        dagger(&self.a)
    }

    /// Indices of the low-lying half block used for truncation-safe
    /// comparisons.
    pub fn probe(&self) -> Vec<usize> {
        (0..self.dim / 2).collect()
    }

    /// Commutator defect a*a - aa* - lambda restricted to `keep` low basis
    /// vectors (the invariant holds exactly below the truncation edge).
    pub fn charge_residual(&self, keep: usize) -> f64 {
        let comm = self.a_dag() * &self.a - &self.a * self.a_dag();
        let idx: Vec<usize> = (0..keep).collect();
        let mut block = compress(&comm, &idx);
        for k in 0..keep {
            block[(k, k)] -= Complex64::new(self.lambda, 0.0);
        }
        op_norm(&block)
    }
}

/// U_{z,t} = e^{-i lambda t / 2} exp((z a - zbar a*)/2).
pub fn displacement(r: &TruncRep, z: Complex64, t: f64) -> CMat {
    let x = (&r.a * z - r.a_dag() * z.conj()) * Complex64::new(0.5, 0.0);
    let u = expm_normal(&x);
    let phase = Complex64::new(0.0, -r.lambda * t / 2.0).exp();
    u * phase
}

/// Residual of U_{z,0}U_{z',0} = e^{i(lambda/4)Im(z zbar')} U_{z+z',0}
/// compressed to `keep` low basis vectors.
pub fn weyl_residual(r: &TruncRep, z: Complex64, zp: Complex64, keep: usize) -> f64 {
    let lhs = displacement(r, z, 0.0) * displacement(r, zp, 0.0);
    let phase = Complex64::new(0.0, r.lambda / 4.0 * (z * zp.conj()).im).exp();
    let rhs = displacement(r, z + zp, 0.0) * phase;
    let idx: Vec<usize> = (0..keep).collect();
    op_norm(&compress(&(lhs - rhs), &idx))
}

/// exp(-t a*a).
pub fn heat_direct(r: &TruncRep, t: f64) -> CMat {
    assert!(t > 0.0);
    let h = self_adjoint_fix(&(self_num(r) * Complex64::new(-t, 0.0)));
    expm_normal(&h)
}

fn self_num(r: &TruncRep) -> CMat {
    r.a_dag() * &r.a
}

// symmetrize to kill roundoff asymmetry before the eigensolver
fn self_adjoint_fix(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Heat weight h_t(z,x) = (x e^{tx})/(4 pi sinh tx) exp(-|z|^2 x coth(tx)/4),
/// with the analytic x -> 0 limit (1/4 pi t) exp(-|z|^2/(4t)).
pub fn heat_kernel(z: Complex64, x: f64, t: f64) -> f64 {
    assert!(t > 0.0);
    let r2 = z.norm_sqr();
    if x.abs() < 1e-12 {
        return (1.0 / (4.0 * PI * t)) * (-r2 / (4.0 * t)).exp();
    }
    let tx = t * x;
    // log-space to stay finite for large tx
    let log_pref = x.abs().ln() + tx - (4.0 * PI).ln() - tx.abs().ln_sinh();
    let k = x / tx.tanh(); // = |x| coth(t|x|) > 0
    (log_pref - r2 * k / 4.0).exp()
}

trait LnSinh {
    fn ln_sinh(self) -> f64;
}

impl LnSinh for f64 {
    // ln sinh(x) for x > 0, overflow-safe
    fn ln_sinh(self) -> f64 {
        if self > 20.0 {
            self - std::f64::consts::LN_2 + (-(2.0 * self)).exp().ln_1p()
        } else {
            self.sinh().ln()
        }
    }
}

/// Fraction of the heat-weight mass outside radius R; used to warn when the
/// quadrature cutoff is too small.
pub fn heat_tail_mass(x: f64, t: f64, radius: f64) -> f64 {
    let k = if x.abs() < 1e-12 { 1.0 / t } else { x / (t * x).tanh() };
    (-radius * radius * k / 4.0).exp()
}

/// Quadrature approximation of the smeared semigroup
/// int d^2z h_t(z, -lambda/2) U_{z,0}.
pub fn heat_smeared(r: &TruncRep, t: f64, q: &QuadSpec) -> CMat {
    assert!(t > 0.0);
    let x = -r.lambda / 2.0;
    let tail = heat_tail_mass(x, t, q.radius);
    if tail > 1e-10 {
        eprintln!("warning: heat smearing cutoff R={} leaves tail mass {:.3e}", q.radius, tail);
    }
    smear_with(r, q, |z| heat_kernel(z, x, t))
}

/// I_eps = int d^2z f_eps(z) U_{z,0}, f_eps(z) = (1/pi eps) exp(-|z|^2/eps).
pub fn gaussian_smear(r: &TruncRep, eps: f64, q: &QuadSpec) -> CMat {
    assert!(eps > 0.0);
    smear_with(r, q, |z| (1.0 / (PI * eps)) * (-z.norm_sqr() / eps).exp())
}

/// Generic real-weight smearing of the displacement family.
pub fn smear_with<W: Fn(Complex64) -> f64 + Sync>(r: &TruncRep, q: &QuadSpec, w: W) -> CMat {
    let grid = PolarQuad::new(q);
    let n = r.dim;
    par::map_chunk_sum(
        grid.len(),
        64,
        || CMat::zeros(n, n),
        |k| displacement(r, grid.nodes[k], 0.0) * Complex64::new(grid.weights[k] * w(grid.nodes[k]), 0.0),
    )
}

/// Finite-difference recovery of the generator: 2 d/dz U_{z,0} at z = 0,
/// which equals a. Central differences in both real directions, O(h^2).
pub fn generator_fd(r: &TruncRep, h: f64) -> CMat {
    let u = |z: Complex64| displacement(r, z, 0.0);
    let re = (u(Complex64::new(h, 0.0)) - u(Complex64::new(-h, 0.0))) / Complex64::new(2.0 * h, 0.0);
    let im = (u(Complex64::new(0.0, h)) - u(Complex64::new(0.0, -h))) / Complex64::new(2.0 * h, 0.0);
    re - im * Complex64::new(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eye;

    #[test]
    fn two_by_two_lowering() {
        let r = build_irrep(-1.0, Complex64::new(0.0, 0.0), 2);
        assert_eq!(r.a[(0, 1)], Complex64::new(1.0, 0.0));
        assert_eq!(r.a[(1, 0)], Complex64::new(0.0, 0.0));
        // (a*a - aa*) e0 = -e0
        let comm = r.a_dag() * &r.a - &r.a * r.a_dag();
        assert_eq!(comm[(0, 0)], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn charge_holds_on_low_block() {
        for lam in [2.0, -3.0, 0.5] {
            let r = build_irrep(lam, Complex64::new(0.3, -0.1), 12);
            assert!(r.charge_residual(11) < 1e-12, "lambda={lam}");
        }
    }

    #[test]
    fn displacement_identity_and_unitary() {
        let r = build_irrep(1.0, Complex64::new(0.0, 0.0), 16);
        let u0 = displacement(&r, Complex64::new(0.0, 0.0), 0.0);
        assert!((u0 - eye(16)).norm() < 1e-14);
        let u = displacement(&r, Complex64::new(0.4, -0.9), 0.3);
        assert!((u.adjoint() * &u - eye(16)).norm() < 1e-12);
    }

    #[test]
    fn weyl_relation_low_block() {
        let r = build_irrep(2.0, Complex64::new(0.0, 0.0), 32);
        let res = weyl_residual(&r, Complex64::new(0.7, 0.2), Complex64::new(-0.3, 0.9), 16);
        assert!(res < 1e-8, "residual {res}");
    }

    #[test]
    fn heat_direct_examples() {
        let r = build_irrep(2.0, Complex64::new(0.0, 0.0), 20);
        // a*a diagonal entries 2(n+1) for the raising-type generator
        let h = heat_direct(&r, 0.5);
        assert!((h[(0, 0)].re - (-1.0f64).exp()).abs() < 1e-12);
        // semigroup on low block
        let prod = heat_direct(&r, 0.3) * heat_direct(&r, 0.45);
        let idx: Vec<usize> = (0..10).collect();
        let diff = compress(&(prod - heat_direct(&r, 0.75)), &idx);
        assert!(op_norm(&diff) < 1e-10);
        // contraction
        assert!(op_norm(&h) <= 1.0 + 1e-12);
    }

    #[test]
    fn heat_kernel_values() {
        let v = heat_kernel(Complex64::new(0.0, 0.0), 1.0, 1.0);
        let expect = 1.0f64.exp() / (4.0 * PI * 1.0f64.sinh());
        assert!((v - expect).abs() < 1e-12);
        assert!((expect - 0.18407).abs() < 1e-4);
        // radial symmetry
        let a = heat_kernel(Complex64::new(0.6, 0.8), 0.7, 0.9);
        let b = heat_kernel(Complex64::new(1.0, 0.0), 0.7, 0.9);
        assert!((a - b).abs() < 1e-15);
        // x -> 0 limit continuous
        let c = heat_kernel(Complex64::new(0.5, 0.5), 1e-13, 0.8);
        let d = heat_kernel(Complex64::new(0.5, 0.5), 1e-7, 0.8);
        assert!((c - d).abs() < 1e-6);
    }

    #[test]
    fn heat_kernel_mass() {
        // int h_t(z,x) d^2z = e^{tx}/cosh(tx)
        let q = PolarQuad::new(&QuadSpec { radius: 10.0, n_radial: 80, n_angular: 16 });
        let (t, x) = (1.0, 1.0);
        let m = q.integrate(|z| Complex64::new(heat_kernel(z, x, t), 0.0));
        let expect = (t * x).exp() / (t * x).cosh();
        assert!((m.re - expect).abs() < 1e-8, "mass {} expect {}", m.re, expect);
    }

    #[test]
    fn heat_smeared_matches_direct() {
        let r = build_irrep(2.0, Complex64::new(0.0, 0.0), 24);
        let q = QuadSpec { radius: 7.0, n_radial: 72, n_angular: 96 };
        let sm = heat_smeared(&r, 0.5, &q);
        let dir = heat_direct(&r, 0.5);
        let idx: Vec<usize> = (0..12).collect();
        let rel = op_norm(&compress(&(sm - &dir), &idx)) / op_norm(&compress(&dir, &idx));
        assert!(rel < 1e-3, "relative error {rel}");
    }

    #[test]
    fn gaussian_smear_approximate_identity() {
        let r = build_irrep(-1.0, Complex64::new(0.0, 0.0), 24);
        let q = QuadSpec { radius: 7.0, n_radial: 72, n_angular: 64 };
        let mut v = CMat::zeros(24, 1);
        v[(1, 0)] = Complex64::new(0.8, 0.0);
        v[(3, 0)] = Complex64::new(0.6, 0.0);
        let mut prev = f64::INFINITY;
        for eps in [1.0, 0.3, 0.1] {
            let ie = gaussian_smear(&r, eps, &q);
            let err = (&ie * &v - &v).norm();
            assert!(err < prev, "eps={eps}: {err} not below {prev}");
            prev = err;
            // a I_eps v stays close to a v for small eps
            if eps <= 0.1 {
                let lhs = &r.a * (&ie * &v);
                let rhs = &r.a * &v;
                assert!((lhs - rhs).norm() < 0.2);
            }
        }
    }

    #[test]
    fn generator_recovered_by_fd() {
        let r = build_irrep(1.5, Complex64::new(0.2, 0.4), 16);
        let idx: Vec<usize> = (0..8).collect();
        let err = |h: f64| op_norm(&compress(&(generator_fd(&r, h) - &r.a), &idx));
        let e1 = err(1e-2);
        let e2 = err(5e-3);
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "not O(h^2): {e1} vs {e2}");
        assert!(e2 < 1e-2);
    }
}
