//! Exact scalars: Gaussian rationals and polynomials in the deformation
//! parameter `s` over them.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A Gaussian rational `re + im*i` with exact rational parts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct GRat {
    pub re: BigRational,
    pub im: BigRational,
}

fn brat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl GRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GRat { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        GRat { re: brat(n, 1), im: BigRational::zero() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        GRat { re: brat(n, d), im: BigRational::zero() }
    }

    pub fn i() -> Self {
        GRat { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        GRat { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GRat { re: self.re.clone(), im: -self.im.clone() }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Self {
        let n = &self.re * &self.re + &self.im * &self.im;
        assert!(!n.is_zero(), "inverse of zero Gaussian rational");
        GRat { re: &self.re / &n, im: -&self.im / &n }
    }

    pub fn eval(&self) -> Complex64 {
        fn f(r: &BigRational) -> f64 {
            let n = r.numer();
            let d = r.denom();
            // exact-to-float via string parse keeps precision for moderate sizes
            let nf: f64 = n.to_string().parse().unwrap_or(f64::NAN);
            let df: f64 = d.to_string().parse().unwrap_or(f64::NAN);
            nf / df
        }
        Complex64::new(f(&self.re), f(&self.im))
    }
}

impl Add for &GRat {
    type Output = GRat;
    fn add(self, rhs: &GRat) -> GRat {
        GRat { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl Sub for &GRat {
    type Output = GRat;
    fn sub(self, rhs: &GRat) -> GRat {
        GRat { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl Mul for &GRat {
    type Output = GRat;
    fn mul(self, rhs: &GRat) -> GRat {
        GRat {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GRat {
    type Output = GRat;
    fn neg(self) -> GRat {
        GRat { re: -self.re.clone(), im: -self.im.clone() }
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GRat {
    /// Prints `p/q`, `r/t*i`, or `p/q+r/t*i`; the caller is responsible for
    /// parenthesizing two-part values in product context.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        if !self.re.is_zero() {
            fmt_rational(&self.re, f)?;
            if self.im.is_zero() {
                return Ok(());
            }
            if self.im.is_positive() {
                write!(f, "+")?;
            }
        }
        if self.im.is_one() {
            write!(f, "i")
        } else if (-self.im.clone()).is_one() {
            write!(f, "-i")
        } else {
            fmt_rational(&self.im, f)?;
            write!(f, "*i")
        }
    }
}

/// A polynomial in `s` with Gaussian-rational coefficients. The map never
/// stores zero coefficients.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SCoeff {
    terms: BTreeMap<u32, GRat>,
}

impl SCoeff {
    pub fn zero() -> Self {
        SCoeff { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::from_grat(GRat::one())
    }

    pub fn from_grat(g: GRat) -> Self {
        let mut t = BTreeMap::new();
        if !g.is_zero() {
            t.insert(0, g);
        }
        SCoeff { terms: t }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_grat(GRat::from_int(n))
    }

    /// The monomial `g * s^k`.
    pub fn monomial(g: GRat, k: u32) -> Self {
        let mut t = BTreeMap::new();
        if !g.is_zero() {
            t.insert(k, g);
        }
        SCoeff { terms: t }
    }

    pub fn s() -> Self {
        Self::monomial(GRat::one(), 1)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).map_or(false, |g| *g == GRat::one())
    }

    pub fn s_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u32, &GRat)> {
        self.terms.iter()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.terms.clone();
        for (k, g) in &rhs.terms {
            let e = out.entry(*k).or_insert_with(GRat::zero);
            *e = &*e + g;
            if e.is_zero() {
                out.remove(k);
            }
        }
        SCoeff { terms: out }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        SCoeff { terms: self.terms.iter().map(|(k, g)| (*k, -g)).collect() }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out: BTreeMap<u32, GRat> = BTreeMap::new();
        for (k1, g1) in &self.terms {
            for (k2, g2) in &rhs.terms {
                let k = k1 + k2;
                let p = g1 * g2;
                let e = out.entry(k).or_insert_with(GRat::zero);
                *e = &*e + &p;
            }
        }
        out.retain(|_, g| !g.is_zero());
        SCoeff { terms: out }
    }

    /// Complex conjugation; `s` itself is real and untouched.
    pub fn conj(&self) -> Self {
        SCoeff { terms: self.terms.iter().map(|(k, g)| (*k, g.conj())).collect() }
    }

    pub fn eval(&self, s: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, g) in &self.terms {
            acc += g.eval() * s.powi(*k as i32);
        }
        acc
    }
}

impl fmt::Display for SCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, g) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{}", g)?,
                1 => write!(f, "({})*s", g)?,
                _ => write!(f, "({})*s^{}", g, k)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grat_field_ops() {
        let x = GRat::new(brat(1, 2), brat(3, 4));
        let y = &x * &x.inv();
        assert_eq!(y, GRat::one());
        assert_eq!(x.conj().conj(), x);
    }

    #[test]
    fn scoeff_ring_ops() {
        let s = SCoeff::s();
        let two = SCoeff::from_int(2);
        let p = s.add(&two); // s + 2
        let q = p.mul(&p); // s^2 + 4s + 4
        assert_eq!(q.s_degree(), Some(2));
        assert_eq!(q.eval(1.0).re, 9.0);
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn display_forms() {
        assert_eq!(GRat::from_ratio(3, 4).to_string(), "3/4");
        assert_eq!(GRat::i().to_string(), "i");
        let g = GRat::new(brat(1, 2), brat(3, 4));
        assert_eq!(g.to_string(), "1/2+3/4*i");
    }
}
