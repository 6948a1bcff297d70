//! z-transform calculus on finite matrices: Z = T(1+T*T)^{-1/2}, strong
//! commutation, products of strongly commuting elements with their Q-matrix
//! bookkeeping, and the scalar density functions f and g.

use crate::linalg::{dagger, eye, func_hermitian, min_singular, op_norm, sqrt_psd, CMat};
use num_complex::Complex64;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct ZPair {
    pub t: CMat,
    pub z: CMat,
}

fn herm(m: CMat) -> CMat {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Z = T (1 + T*T)^{-1/2}; always a strict contraction for finite T.
pub fn z_transform(t: &CMat) -> CMat {
    let g = herm(eye(t.nrows()) + dagger(t) * t);
    let half = func_hermitian(&g, |x| Complex64::new(1.0 / x.max(1e-300).sqrt(), 0.0));
    t * half
}

/// Round-trip T = Z (1 - Z*Z)^{-1/2}; requires ||Z|| < 1.
pub fn inverse_z(z: &CMat) -> CMat {
    let g = herm(eye(z.nrows()) - dagger(z) * z);
    let half = func_hermitian(&g, |x| {
        assert!(x > 0.0, "inverse z-transform needs a strict contraction");
        Complex64::new(1.0 / x.sqrt(), 0.0)
    });
    z * half
}

pub fn z_pair(t: &CMat) -> ZPair {
    ZPair { t: t.clone(), z: z_transform(t) }
}

/// True iff the z-transforms commute and star-commute within tol.
pub fn strongly_commute(t1: &CMat, t2: &CMat, tol: f64) -> bool {
    let z1 = z_transform(t1);
    let z2 = z_transform(t2);
    let c1 = op_norm(&(&z1 * &z2 - &z2 * &z1));
    let c2 = op_norm(&(dagger(&z1) * &z2 - &z2 * dagger(&z1)));
    c1 <= tol && c2 <= tol
}

#[derive(Debug, Clone, Serialize)]
pub struct ProductReport {
    /// ||T1 T2 - T2 T1||
    pub commutation_residual: f64,
    /// consistency of the Q-matrix entries with the direct z-transform of
    /// T1 T2: || Q21 Q11^{-1} - T1 T2 || (the (2,1) entry composed with the
    /// inverse of the (1,1) entry recovers the product)
    pub q_consistency_residual: f64,
    pub pass: bool,
}

/// Plain product of strongly commuting matrices, plus the bookkeeping report
/// for the associated Q-matrix
/// [[(1-z1*z1)^{1/2}(1-z2*z2)^{1/2}, -z1* z2*], [z1 z2, (1-z1 z1*)^{1/2}(1-z2 z2*)^{1/2}]].
pub fn affiliated_product(t1: &CMat, t2: &CMat, tol: f64) -> (CMat, ProductReport) {
    assert!(strongly_commute(t1, t2, tol), "inputs do not strongly commute at tol {tol}");
    let n = t1.nrows();
    let z1 = z_transform(t1);
    let z2 = z_transform(t2);
    let prod = t1 * t2;
    let commutation_residual = op_norm(&(&prod - t2 * t1));
    let q11 = sqrt_psd(&herm(eye(n) - dagger(&z1) * &z1)) * sqrt_psd(&herm(eye(n) - dagger(&z2) * &z2));
    let q21 = &z1 * &z2;
    // Q11 is invertible for finite matrices; Q21 Q11^{-1} should equal T1 T2
    let q11_inv = {
        let g = herm(q11.adjoint() * &q11);
        let inv_g = func_hermitian(&g, |x| {
            assert!(x > 1e-300, "Q11 numerically singular");
            Complex64::new(1.0 / x, 0.0)
        });
        inv_g * q11.adjoint()
    };
    let q_consistency_residual = op_norm(&(&q21 * &q11_inv - &prod));
    let scale = 1.0 + op_norm(&prod);
    let pass = commutation_residual <= tol * scale && q_consistency_residual <= 1e-8 * scale;
    (prod, ProductReport { commutation_residual, q_consistency_residual, pass })
}

/// Min singular value of (1+(T1T2)*(T1T2)) (1+T1*T1)^{-1} (1+T2*T2)^{-1};
/// strictly positive in finite dimensions, the density analogue of the
/// graph-core argument.
pub fn density_surrogate(t1: &CMat, t2: &CMat) -> f64 {
    let n = t1.nrows();
    let prod = t1 * t2;
    let m0 = eye(n) + dagger(&prod) * &prod;
    let inv = |t: &CMat| {
        let g = herm(eye(n) + dagger(t) * t);
        func_hermitian(&g, |x| Complex64::new(1.0 / x, 0.0))
    };
    min_singular(&(m0 * inv(t1) * inv(t2)))
}

/// f(x1,x2) = (1-x1^2)(1-x2^2) + x1^2 x2^2.
pub fn f_density(x1: f64, x2: f64) -> f64 {
    (1.0 - x1 * x1) * (1.0 - x2 * x2) + x1 * x1 * x2 * x2
}

/// g(x1,x2) = (1-x1^2)^{1/2}(1-x2^2)^{1/2}.
pub fn g_density(x1: f64, x2: f64) -> f64 {
    ((1.0 - x1 * x1).max(0.0) * (1.0 - x2 * x2).max(0.0)).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityGridReport {
    pub grid_points: usize,
    /// every grid point with f below this threshold is near (1,0) or (0,1)
    pub zero_threshold: f64,
    pub zero_set_confirmed: bool,
    /// f = 0 implies g = 0 on the grid
    pub implication_holds: bool,
}

/// Checks on [0,1]^2 that f vanishes only near (1,0) and (0,1) and that
/// f = 0 forces g = 0 there.
pub fn density_grid_check(n: usize, zero_threshold: f64) -> DensityGridReport {
    let mut zero_set_confirmed = true;
    let mut implication_holds = true;
    for i in 0..=n {
        for j in 0..=n {
            let x1 = i as f64 / n as f64;
            let x2 = j as f64 / n as f64;
            let f = f_density(x1, x2);
            if f <= zero_threshold {
                let near = (x1 - 1.0).abs().max(x2) < 0.1 || x1.max((x2 - 1.0).abs()) < 0.1;
                if !near {
                    zero_set_confirmed = false;
                }
                if g_density(x1, x2) > zero_threshold.sqrt() {
                    implication_holds = false;
                }
            }
        }
    }
    DensityGridReport {
        grid_points: (n + 1) * (n + 1),
        zero_threshold,
        zero_set_confirmed,
        implication_holds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_mat(n: usize, seed: u64, scale: f64) -> CMat {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        CMat::from_fn(n, n, |_, _| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
    }

    #[test]
    fn scalar_values() {
        let z = z_transform(&CMat::from_element(1, 1, c64(1.0, 0.0)));
        assert!((z[(0, 0)].re - 1.0 / 2.0f64.sqrt()).abs() < 1e-14);
        let z0 = z_transform(&CMat::zeros(3, 3));
        assert!(z0.norm() < 1e-15);
    }

    #[test]
    fn contraction_and_round_trip() {
        for seed in 0..5 {
            let t = random_mat(8, seed, 4.0);
            let z = z_transform(&t);
            assert!(op_norm(&z) < 1.0);
            let back = inverse_z(&z);
            assert!((back - &t).norm() < 1e-10 * (1.0 + t.norm()));
        }
    }

    #[test]
    fn strong_commutation_cases() {
        // commuting normal diagonals
        let d1 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c64(1.0, 0.5),
            c64(-2.0, 0.0),
            c64(0.0, 3.0),
        ]));
        let d2 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c64(0.3, 0.0),
            c64(1.0, -1.0),
            c64(2.0, 2.0),
        ]));
        assert!(strongly_commute(&d1, &d2, 1e-12));
        assert!(strongly_commute(&d2, &d1, 1e-12));
        // ladder against its adjoint: fails
        let l = crate::heisen::ladder(2, false);
        assert!(!strongly_commute(&l, &dagger(&l), 1e-6));
        // polynomial in a normal matrix: passes
        let p = &d1 * &d1 + &d1 * c64(0.7, 0.0);
        assert!(strongly_commute(&d1, &p, 1e-10));
    }

    #[test]
    fn product_scalars() {
        let t1 = CMat::from_element(1, 1, c64(2.0, 0.0));
        let t2 = CMat::from_element(1, 1, c64(3.0, 0.0));
        let (p, rep) = affiliated_product(&t1, &t2, 1e-12);
        assert!((p[(0, 0)].re - 6.0).abs() < 1e-12);
        assert!(rep.pass, "{rep:?}");
        let z = z_transform(&p);
        assert!((z[(0, 0)].re - 6.0 / 37.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn product_commuting_normal() {
        // build commuting normals by sharing an eigenbasis
        let q = {
            let m = random_mat(8, 11, 1.0);
            let h = (&m + m.adjoint()) * c64(0.5, 0.0);
            crate::linalg::eigh(&h).1
        };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let diag = |rng: &mut rand_chacha::ChaCha8Rng| {
            CMat::from_diagonal(&nalgebra::DVector::from_iterator(
                8,
                (0..8).map(|_| c64(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))),
            ))
        };
        let d1 = diag(&mut rng);
        let d2 = diag(&mut rng);
        let t1 = &q * &d1 * q.adjoint();
        let t2 = &q * &d2 * q.adjoint();
        let (p, rep) = affiliated_product(&t1, &t2, 1e-9);
        let spectral = &q * (&d1 * &d2) * q.adjoint();
        assert!((p - spectral).norm() < 1e-10);
        assert!(rep.pass, "{rep:?}");
        assert!(density_surrogate(&t1, &t2) > 0.0);
        // inverse pair multiplies to the identity
        let inv = &q * CMat::from_fn(8, 8, |i, j| if i == j { d1[(i, i)].inv() } else { c64(0.0, 0.0) }) * q.adjoint();
        let (pi, _) = affiliated_product(&t1, &inv, 1e-8);
        assert!((pi - eye(8)).norm() < 1e-9);
    }

    #[test]
    fn density_functions() {
        assert!(f_density(1.0, 0.0).abs() < 1e-15);
        assert!(g_density(1.0, 0.0).abs() < 1e-15);
        assert!((f_density(0.5, 0.5) - 0.625).abs() < 1e-15);
        let rep = density_grid_check(200, 1e-3);
        assert!(rep.zero_set_confirmed && rep.implication_holds, "{rep:?}");
    }
}
