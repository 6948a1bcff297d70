//! Tensor powers of the generator algebra with leg-wise canonical forms.

use crate::ncalg::{Monomial, NCPoly};
use crate::scalar::SCoeff;
use std::collections::BTreeMap;

/// Element of the R-fold tensor power; every leg monomial is canonical.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorPoly<const R: usize> {
    terms: BTreeMap<[Monomial; R], SCoeff>,
}

impl<const R: usize> TensorPoly<R> {
    pub fn zero() -> Self {
        TensorPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        let mut t = BTreeMap::new();
        t.insert([Monomial::unit(); R], SCoeff::one());
        TensorPoly { terms: t }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Monomial; R], &SCoeff)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, key: [Monomial; R], c: SCoeff) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(SCoeff::zero);
        *e = e.add(&c);
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        TensorPoly { terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn scale(&self, k: &SCoeff) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            out.add_term(*key, c.mul(k));
        }
        out
    }

    /// Leg-wise product: each leg multiplies in the generator algebra and is
    /// re-canonicalized; cross terms distribute.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                let mut legs: Vec<NCPoly> = Vec::with_capacity(R);
                for i in 0..R {
                    let p = NCPoly::from_words(std::iter::once((
                        k1[i].to_word(),
                        SCoeff::one(),
                    )));
                    let q = NCPoly::from_words(std::iter::once((
                        k2[i].to_word(),
                        SCoeff::one(),
                    )));
                    legs.push(p.mul(&q));
                }
                // distribute the R leg polynomials into flat terms
                let mut flat: Vec<([Monomial; R], SCoeff)> =
                    vec![([Monomial::unit(); R], c1.mul(c2))];
                for (i, leg) in legs.iter().enumerate() {
                    let mut next = Vec::with_capacity(flat.len() * leg.num_terms());
                    for (key, coeff) in &flat {
                        for (m, c) in leg.terms() {
                            let mut nk = *key;
                            nk[i] = *m;
                            next.push((nk, coeff.mul(c)));
                        }
                    }
                    flat = next;
                }
                for (key, c) in flat {
                    out.add_term(key, c);
                }
            }
        }
        out
    }

    /// Leg-wise adjoint.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (key, c) in &self.terms {
            let mut legs: Vec<NCPoly> = Vec::with_capacity(R);
            for i in 0..R {
                legs.push(
                    NCPoly::from_words(std::iter::once((key[i].to_word(), SCoeff::one())))
                        .adjoint(),
                );
            }
            let mut flat: Vec<([Monomial; R], SCoeff)> =
                vec![([Monomial::unit(); R], c.conj())];
            for (i, leg) in legs.iter().enumerate() {
                let mut next = Vec::new();
                for (k, coeff) in &flat {
                    for (m, cc) in leg.terms() {
                        let mut nk = *k;
                        nk[i] = *m;
                        next.push((nk, coeff.mul(cc)));
                    }
                }
                flat = next;
            }
            for (k, cc) in flat {
                out.add_term(k, cc);
            }
        }
        out
    }
}

impl TensorPoly<2> {
    /// p ⊗ q.
    pub fn of(p: &NCPoly, q: &NCPoly) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in p.terms() {
            for (m2, c2) in q.terms() {
                out.add_term([*m1, *m2], c1.mul(c2));
            }
        }
        out
    }

    /// Applies an NCPoly-valued map to one leg, producing a rank-3 element.
    /// `leg` is 0 (left) or 1 (right).
    pub fn expand_leg<F>(&self, leg: usize, f: F) -> TensorPoly<3>
    where
        F: Fn(&NCPoly) -> TensorPoly<2>,
    {
        let mut out = TensorPoly::<3>::zero();
        for (key, c) in &self.terms {
            let target =
                NCPoly::from_words(std::iter::once((key[leg].to_word(), SCoeff::one())));
            let other = key[1 - leg];
            let expanded = f(&target);
            for (k2, c2) in expanded.terms() {
                let nk = if leg == 0 {
                    [k2[0], k2[1], other]
                } else {
                    [other, k2[0], k2[1]]
                };
                out.add_term(nk, c.mul(c2));
            }
        }
        out
    }

    /// Multiplies the two legs together inside the generator algebra
    /// (the composition m ∘ (x ⊗ y) ↦ xy).
    pub fn contract(&self) -> NCPoly {
        let mut out = NCPoly::zero();
        for (key, c) in &self.terms {
            let p = NCPoly::from_words(std::iter::once((key[0].to_word(), SCoeff::one())));
            let q = NCPoly::from_words(std::iter::once((key[1].to_word(), SCoeff::one())));
            out = out.add(&p.mul(&q).scale(c));
        }
        out
    }

    /// Applies a scalar-valued map to one leg, collapsing to rank 1.
    pub fn collapse_leg<F>(&self, leg: usize, f: F) -> NCPoly
    where
        F: Fn(&NCPoly) -> SCoeff,
    {
        let mut out = NCPoly::zero();
        for (key, c) in &self.terms {
            let target =
                NCPoly::from_words(std::iter::once((key[leg].to_word(), SCoeff::one())));
            let scalar = f(&target);
            let rest =
                NCPoly::from_words(std::iter::once((key[1 - leg].to_word(), SCoeff::one())));
            out = out.add(&rest.scale(&c.mul(&scalar)));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncalg::{LA, LB, LD};

    #[test]
    fn tensor_mul_legwise() {
        let a = NCPoly::letter(LA);
        let b = NCPoly::letter(LB);
        let d = NCPoly::letter(LD);
        let t1 = TensorPoly::of(&a, &d);
        let t2 = TensorPoly::of(&d, &a);
        let p = t1.mul(&t2);
        // (a o d)(d o a) = ad o da = (bc+1) o (bc+1)
        let ad = a.mul(&d);
        let expect = TensorPoly::of(&ad, &ad);
        assert_eq!(p, expect);
        let _ = b;
    }

    #[test]
    fn adjoint_legwise_involutive() {
        let t = TensorPoly::of(&NCPoly::letter(LA), &NCPoly::letter(LB));
        assert_eq!(t.adjoint().adjoint(), t);
    }
}
