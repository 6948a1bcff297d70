//! Comultiplication, coinverse, and counit on the generator algebra, with an
//! exhaustive exact-zero axiom battery.

use crate::ncalg::{self, Letter, NCPoly, LA, LB, LC, LD};
use crate::scalar::SCoeff;
use crate::tensor::TensorPoly;
use rand::{Rng, SeedableRng};
use serde::Serialize;

/// Δ on a single letter. Unstarred rows follow the comultiplication table;
/// starred letters get the leg-wise adjoint (Δ is a *-homomorphism).
fn delta_letter(l: Letter) -> TensorPoly<2> {
    let g = NCPoly::letter;
    let base = |x: Letter| {
        let (p1, q1, p2, q2) = match x {
            LA => (LA, LA, LB, LC),
            LB => (LA, LB, LB, LD),
            LC => (LC, LA, LD, LC),
            LD => (LC, LB, LD, LD),
            _ => unreachable!(),
        };
        TensorPoly::of(&g(p1), &g(q1)).add(&TensorPoly::of(&g(p2), &g(q2)))
    };
    if l < 4 {
        base(l)
    } else {
        base(l - 4).adjoint()
    }
}

/// κ on a single letter: a↔d with b,c negated; adjoints likewise
/// (κ is *-compatible).
fn kappa_letter(l: Letter) -> NCPoly {
    let neg = |x: Letter| NCPoly::letter(x).neg();
    match l {
        LA => NCPoly::letter(LD),
        LB => neg(LB),
        LC => neg(LC),
        LD => NCPoly::letter(LA),
        x => kappa_letter(x - 4).adjoint(),
    }
}

fn epsilon_letter(l: Letter) -> SCoeff {
    match l % 4 {
        0 | 3 => SCoeff::one(), // a, d and adjoints
        _ => SCoeff::zero(),    // b, c and adjoints
    }
}

/// The unique *-homomorphic extension of the comultiplication table.
pub fn delta(p: &NCPoly) -> TensorPoly<2> {
    let mut out = TensorPoly::<2>::zero();
    for (m, c) in p.terms() {
        let mut acc = TensorPoly::<2>::one();
        for l in m.to_word() {
            acc = acc.mul(&delta_letter(l));
        }
        out = out.add(&acc.scale(c));
    }
    out
}

/// The antihomomorphic (linear) extension of the coinverse table.
pub fn kappa(p: &NCPoly) -> NCPoly {
    let mut out = NCPoly::zero();
    for (m, c) in p.terms() {
        let mut acc = NCPoly::one();
        for l in m.to_word().into_iter().rev() {
            acc = acc.mul(&kappa_letter(l));
        }
        out = out.add(&acc.scale(c));
    }
    out
}

/// The homomorphic extension of the counit table.
pub fn epsilon(p: &NCPoly) -> SCoeff {
    let mut out = SCoeff::zero();
    for (m, c) in p.terms() {
        let mut acc = c.clone();
        for l in m.to_word() {
            acc = acc.mul(&epsilon_letter(l));
            if acc.is_zero() {
                break;
            }
        }
        out = out.add(&acc);
    }
    out
}

/// (Δ⊗id)Δ(p).
pub fn delta3_left(p: &NCPoly) -> TensorPoly<3> {
    delta(p).expand_leg(0, delta)
}

/// (id⊗Δ)Δ(p).
pub fn delta3_right(p: &NCPoly) -> TensorPoly<3> {
    delta(p).expand_leg(1, delta)
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfCheck {
    pub id: String,
    pub pass: bool,
    /// Nonzero residual in canonical text, when the check fails.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HopfReport {
    pub checks: Vec<HopfCheck>,
}

impl HopfReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn push_zero(checks: &mut Vec<HopfCheck>, id: String, residual_is_zero: bool, residual: String) {
    checks.push(HopfCheck {
        id,
        pass: residual_is_zero,
        residual: if residual_is_zero { None } else { Some(residual) },
    });
}

fn random_words(seed: u64, count: usize, max_len: usize) -> Vec<Vec<Letter>> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            (0..len).map(|_| rng.gen_range(0..8u8)).collect()
        })
        .collect()
}

/// Runs the full axiom battery. Every check is an exact-zero polynomial
/// identity; no tolerances are involved.
pub fn check_hopf_axioms() -> HopfReport {
    let mut checks = Vec::new();
    let gens: Vec<NCPoly> = (0..8u8).map(NCPoly::letter).collect();

    // (i) well-definedness: Δ, κ, ε annihilate all 22 relations
    for (name, r) in ncalg::relations() {
        let dr = delta(&r);
        push_zero(&mut checks, format!("delta-annihilates: {}", name), dr.is_zero(), format!("{:?}", dr));
        let kr = kappa(&r);
        push_zero(&mut checks, format!("kappa-annihilates: {}", name), kr.is_zero(), kr.to_string());
        let er = epsilon(&r);
        push_zero(&mut checks, format!("epsilon-annihilates: {}", name), er.is_zero(), format!("{:?}", er));
    }

    // (ii) coassociativity on generators
    for (i, g) in gens.iter().enumerate() {
        let lhs = delta3_left(g);
        let rhs = delta3_right(g);
        let diff = lhs.sub(&rhs);
        push_zero(
            &mut checks,
            format!("coassociativity: {}", ncalg::LETTER_NAMES[i]),
            diff.is_zero(),
            format!("{:?}", diff),
        );
    }

    // (iii) counit laws on generators
    for (i, g) in gens.iter().enumerate() {
        let d = delta(g);
        let left = d.collapse_leg(0, |p| epsilon(p));
        let right = d.collapse_leg(1, |p| epsilon(p));
        let dl = left.sub(g);
        let dr = right.sub(g);
        push_zero(
            &mut checks,
            format!("counit-left: {}", ncalg::LETTER_NAMES[i]),
            dl.is_zero(),
            dl.to_string(),
        );
        push_zero(
            &mut checks,
            format!("counit-right: {}", ncalg::LETTER_NAMES[i]),
            dr.is_zero(),
            dr.to_string(),
        );
    }

    // (iv) antipode laws on generators
    for (i, g) in gens.iter().enumerate() {
        let d = delta(g);
        let eps1 = NCPoly::scalar(epsilon(g));
        let mut lhs = NCPoly::zero();
        let mut rhs = NCPoly::zero();
        for (key, c) in d.terms() {
            let leg0 = NCPoly::from_words(std::iter::once((key[0].to_word(), SCoeff::one())));
            let leg1 = NCPoly::from_words(std::iter::once((key[1].to_word(), SCoeff::one())));
            lhs = lhs.add(&kappa(&leg0).mul(&leg1).scale(c));
            rhs = rhs.add(&leg0.mul(&kappa(&leg1)).scale(c));
        }
        let dl = lhs.sub(&eps1);
        let dr = rhs.sub(&eps1);
        push_zero(
            &mut checks,
            format!("antipode-left: {}", ncalg::LETTER_NAMES[i]),
            dl.is_zero(),
            dl.to_string(),
        );
        push_zero(
            &mut checks,
            format!("antipode-right: {}", ncalg::LETTER_NAMES[i]),
            dr.is_zero(),
            dr.to_string(),
        );
    }

    // (v) κ involutive and *-compatible
    for (i, g) in gens.iter().enumerate() {
        let kk = kappa(&kappa(g)).sub(g);
        push_zero(
            &mut checks,
            format!("kappa-involutive: {}", ncalg::LETTER_NAMES[i]),
            kk.is_zero(),
            kk.to_string(),
        );
        let star = kappa(&g.adjoint()).sub(&kappa(g).adjoint());
        push_zero(
            &mut checks,
            format!("kappa-star-compatible: {}", ncalg::LETTER_NAMES[i]),
            star.is_zero(),
            star.to_string(),
        );
    }

    // (vi) Δ commutes with the *-structure
    for (i, g) in gens.iter().enumerate() {
        let d = delta(&g.adjoint()).sub(&delta(g).adjoint());
        push_zero(
            &mut checks,
            format!("delta-star-compatible: {}", ncalg::LETTER_NAMES[i]),
            d.is_zero(),
            format!("{:?}", d),
        );
    }

    // consequence: ε∘κ = ε on generators; ε carries no s-dependence here
    for (i, g) in gens.iter().enumerate() {
        let e = epsilon(&kappa(g)).sub(&epsilon(g));
        push_zero(
            &mut checks,
            format!("epsilon-kappa: {}", ncalg::LETTER_NAMES[i]),
            e.is_zero(),
            format!("{:?}", e),
        );
        let sdeg = epsilon(g).s_degree().unwrap_or(0);
        push_zero(
            &mut checks,
            format!("epsilon-s-degree-zero: {}", ncalg::LETTER_NAMES[i]),
            sdeg == 0,
            format!("s-degree {}", sdeg),
        );
    }

    // random-word spot checks for coassociativity, counit, Δ∘*
    for (wi, w) in random_words(23, 20, 3).into_iter().enumerate() {
        let p = NCPoly::reduce_word_directed(&w, true);
        let co = delta3_left(&p).sub(&delta3_right(&p));
        push_zero(&mut checks, format!("coassociativity-random-{}", wi), co.is_zero(), format!("{:?}", co));
        let cl = delta(&p).collapse_leg(0, |q| epsilon(q)).sub(&p);
        push_zero(&mut checks, format!("counit-random-{}", wi), cl.is_zero(), cl.to_string());
        let ds = delta(&p.adjoint()).sub(&delta(&p).adjoint());
        push_zero(&mut checks, format!("delta-star-random-{}", wi), ds.is_zero(), format!("{:?}", ds));
        let sdeg = epsilon(&p).s_degree().unwrap_or(0);
        push_zero(&mut checks, format!("epsilon-s-degree-random-{}", wi), sdeg == 0, format!("s-degree {}", sdeg));
    }

    HopfReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_on_c() {
        let d = delta(&NCPoly::letter(LC));
        let expect = TensorPoly::of(&NCPoly::letter(LC), &NCPoly::letter(LA))
            .add(&TensorPoly::of(&NCPoly::letter(LD), &NCPoly::letter(LC)));
        assert_eq!(d, expect);
    }

    #[test]
    fn delta_unital() {
        assert_eq!(delta(&NCPoly::one()), TensorPoly::<2>::one());
    }

    #[test]
    fn kappa_table() {
        assert_eq!(kappa(&NCPoly::letter(LB)), NCPoly::letter(LB).neg());
        assert_eq!(kappa(&kappa(&NCPoly::letter(LA))), NCPoly::letter(LA));
        // antihomomorphism: κ(ab) = κ(b)κ(a) = -bd canonicalized
        let ab = NCPoly::letter(LA).mul(&NCPoly::letter(LB));
        let expect = NCPoly::letter(LB).mul(&NCPoly::letter(LD)).neg();
        assert_eq!(kappa(&ab), expect);
    }

    #[test]
    fn epsilon_table() {
        assert!(epsilon(&NCPoly::letter(LA)).is_one());
        let ad_minus_bc = NCPoly::letter(LA)
            .mul(&NCPoly::letter(LD))
            .sub(&NCPoly::letter(LB).mul(&NCPoly::letter(LC)));
        assert!(epsilon(&ad_minus_bc).is_one());
        let gb = NCPoly::letter(ncalg::LCS).mul(&NCPoly::letter(LB));
        assert!(epsilon(&gb).is_zero());
    }

    #[test]
    fn full_axiom_battery() {
        let report = check_hopf_axioms();
        for c in &report.checks {
            assert!(c.pass, "failed: {} residual {:?}", c.id, c.residual);
        }
    }

    #[test]
    fn antipode_on_alpha_explicit() {
        // m(κ⊗id)Δ(a) = δa + (-β)γ = ad - bc = 1 = ε(a)·1
        let d = delta(&NCPoly::letter(LA));
        let mut lhs = NCPoly::zero();
        for (key, c) in d.terms() {
            let leg0 = NCPoly::from_words(std::iter::once((key[0].to_word(), SCoeff::one())));
            let leg1 = NCPoly::from_words(std::iter::once((key[1].to_word(), SCoeff::one())));
            lhs = lhs.add(&kappa(&leg0).mul(&leg1).scale(c));
        }
        assert_eq!(lhs, NCPoly::one());
    }
}
