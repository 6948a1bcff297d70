//! Dense complex linear algebra helpers. All matrix functions used in this
//! crate act on Hermitian or anti-Hermitian arguments, so everything routes
//! through a Hermitian eigendecomposition (functional calculus).

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn eye(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Hermitian eigendecomposition; panics if the input is not Hermitian to
/// roundoff.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let herm_defect = (m - m.adjoint()).norm();
    assert!(
        herm_defect <= 1e-10 * (1.0 + m.norm()),
        "eigh: matrix not Hermitian (defect {herm_defect:.3e})"
    );
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let vals = sym.eigenvalues.iter().copied().collect();
    (vals, sym.eigenvectors)
}

/// f(M) for Hermitian M via functional calculus.
pub fn func_hermitian<F: Fn(f64) -> Complex64>(m: &CMat, f: F) -> CMat {
    let (vals, v) = eigh(m);
    let n = vals.len();
    let mut d = CMat::zeros(n, n);
    for (i, lam) in vals.iter().enumerate() {
        d[(i, i)] = f(*lam);
    }
    &v * d * v.adjoint()
}

/// exp(K) for Hermitian or anti-Hermitian K (the only exponentials needed:
/// displacement exponents are anti-Hermitian, heat exponents Hermitian).
pub fn expm_normal(k: &CMat) -> CMat {
    let scale = 1.0 + k.norm();
    if (k - k.adjoint()).norm() <= 1e-10 * scale {
        func_hermitian(k, |x| Complex64::new(x.exp(), 0.0))
    } else if (k + k.adjoint()).norm() <= 1e-10 * scale {
        // K = iH with H Hermitian
        let h = k.map(|z| z * Complex64::new(0.0, -1.0));
        func_hermitian(&h, |x| Complex64::new(0.0, x).exp())
    } else {
        panic!("expm_normal: matrix is neither Hermitian nor anti-Hermitian");
    }
}

/// Principal square root of a positive semidefinite Hermitian matrix,
/// flooring tiny negative eigenvalues at 0.
pub fn sqrt_psd(m: &CMat) -> CMat {
    func_hermitian(m, |x| Complex64::new(x.max(0.0).sqrt(), 0.0))
}

/// (M)^{-1/2} for Hermitian positive definite M.
pub fn inv_sqrt_pd(m: &CMat) -> CMat {
    func_hermitian(m, |x| {
        assert!(x > 0.0, "inv_sqrt_pd: nonpositive eigenvalue {x}");
        Complex64::new(1.0 / x.sqrt(), 0.0)
    })
}

/// Operator (spectral) norm.
pub fn op_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let (vals, _) = eigh(&gram);
    vals.into_iter().fold(0.0f64, f64::max).max(0.0).sqrt()
}

/// Minimum singular value.
pub fn min_singular(m: &CMat) -> f64 {
    let gram = m.adjoint() * m;
    let (vals, _) = eigh(&gram);
    vals.into_iter().fold(f64::INFINITY, f64::min).max(0.0).sqrt()
}

/// Compression to the rows/columns listed in `idx`.
pub fn compress(m: &CMat, idx: &[usize]) -> CMat {
    let k = idx.len();
    CMat::from_fn(k, k, |i, j| m[(idx[i], idx[j])])
}

/// Index set of the low-lying probe block for a space that is the tensor
/// product of `legs` Fock factors of dimension `n` each, keeping per-leg
/// indices below `p`.
pub fn probe_indices(n: usize, legs: usize, p: usize) -> Vec<usize> {
    let mut idx = vec![0usize];
    for _ in 0..legs {
        let mut next = Vec::with_capacity(idx.len() * p);
        for base in &idx {
            for i in 0..p {
                next.push(base * n + i);
            }
        }
        idx = next;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigh_complex_hermitian() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)]);
        let (vals, v) = eigh(&m);
        let mut d = CMat::zeros(2, 2);
        for (i, l) in vals.iter().enumerate() {
            d[(i, i)] = c(*l, 0.0);
        }
        let rec = &v * d * v.adjoint();
        assert!((rec - m).norm() < 1e-12);
    }

    #[test]
    fn expm_anti_hermitian_unitary() {
        let k = CMat::from_row_slice(
            2,
            2,
            &[c(0.0, 0.5), c(0.3, 0.2), c(-0.3, 0.2), c(0.0, -0.1)],
        );
        let u = expm_normal(&k);
        assert!((u.adjoint() * &u - eye(2)).norm() < 1e-12);
    }

    #[test]
    fn sqrt_round_trip() {
        let m = CMat::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let r = sqrt_psd(&m);
        assert!((&r * &r - m).norm() < 1e-12);
    }

    #[test]
    fn op_norm_diag() {
        let mut m = CMat::zeros(3, 3);
        m[(0, 0)] = c(-5.0, 0.0);
        m[(1, 1)] = c(2.0, 0.0);
        assert!((op_norm(&m) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn probe_block_tensor() {
        let idx = probe_indices(4, 2, 2);
        assert_eq!(idx, vec![0, 1, 4, 5]);
    }
}
