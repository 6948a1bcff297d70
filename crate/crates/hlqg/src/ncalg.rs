//! Exact noncommutative *-polynomial arithmetic for the Heisenberg-Lorentz
//! generator algebra.
//!
//! Letters are ordered a < b < c < d < a' < b' < c' < d' (unstarred block
//! first). A canonical monomial is a sorted unstarred block followed by a
//! sorted starred block, with no a,d co-occurrence and no a',d' co-occurrence
//! (determinant-reduced). Reduction is a two-stage rewrite: (1) push starred
//! letters right past unstarred ones with the mixed commutation corrections,
//! (2) determinant reduction ad -> bc + 1 and a'd' -> b'c' + 1 inside the
//! commutative blocks.

use crate::scalar::{GRat, SCoeff};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Generator letters. 0..=3 unstarred (a,b,c,d), 4..=7 their adjoints.
pub type Letter = u8;

pub const LA: Letter = 0;
pub const LB: Letter = 1;
pub const LC: Letter = 2;
pub const LD: Letter = 3;
pub const LAS: Letter = 4;
pub const LBS: Letter = 5;
pub const LCS: Letter = 6;
pub const LDS: Letter = 7;

pub const LETTER_NAMES: [&str; 8] = ["a", "b", "c", "d", "a'", "b'", "c'", "d'"];

/// Exponent vector over the ordered letters.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct Monomial(pub [u8; 8]);

impl Monomial {
    pub fn unit() -> Self {
        Monomial([0; 8])
    }

    pub fn letter(l: Letter) -> Self {
        let mut e = [0u8; 8];
        e[l as usize] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&x| x as u32).sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Expands to the canonical word (letters in order, with multiplicity).
    pub fn to_word(&self) -> Vec<Letter> {
        let mut w = Vec::with_capacity(self.degree() as usize);
        for l in 0..8u8 {
            for _ in 0..self.0[l as usize] {
                w.push(l);
            }
        }
        w
    }
}

/// Noncommutative *-polynomial in canonical form.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct NCPoly {
    terms: BTreeMap<Monomial, SCoeff>,
}

/// Mixed rewrite rules: `MIXED[x-4][y]` rewrites the adjacent pair x·y
/// (x starred, y unstarred) as a sum of (sign, s-power, word) terms whose
/// words are already block-ordered.
const MIXED: [[&[(i8, u8, &[Letter])]; 4]; 4] = [
    // a' y
    [
        &[(1, 0, &[LA, LAS]), (1, 1, &[LC, LCS])],
        &[(1, 0, &[LB, LAS]), (1, 1, &[LD, LCS])],
        &[(1, 0, &[LC, LAS])],
        &[(1, 0, &[LD, LAS])],
    ],
    // b' y
    [
        &[(1, 0, &[LA, LBS]), (1, 1, &[LC, LDS])],
        &[
            (1, 0, &[LB, LBS]),
            (-1, 1, &[LA, LAS]),
            (-1, 2, &[LC, LCS]),
            (1, 1, &[LD, LDS]),
        ],
        &[(1, 0, &[LC, LBS])],
        &[(1, 0, &[LD, LBS]), (-1, 1, &[LC, LAS])],
    ],
    // c' y
    [
        &[(1, 0, &[LA, LCS])],
        &[(1, 0, &[LB, LCS])],
        &[(1, 0, &[LC, LCS])],
        &[(1, 0, &[LD, LCS])],
    ],
    // d' y
    [
        &[(1, 0, &[LA, LDS])],
        &[(1, 0, &[LB, LDS]), (-1, 1, &[LA, LCS])],
        &[(1, 0, &[LC, LDS])],
        &[(1, 0, &[LD, LDS]), (-1, 1, &[LC, LCS])],
    ],
];

/// Safety valve for the rewrite loop; the crossing-count measure proves
/// termination, this guards against rule-table mistakes.
const MAX_REWRITE_STEPS: usize = 200_000_000;

fn rule_coeff(sign: i8, spow: u8) -> SCoeff {
    SCoeff::monomial(GRat::from_int(sign as i64), spow as u32)
}

/// Reduces an arbitrary word (times a coefficient) into canonical terms,
/// accumulating into `out`.
fn reduce_word_into(word: Vec<Letter>, coeff: SCoeff, out: &mut BTreeMap<Monomial, SCoeff>) {
    let mut work: Vec<(Vec<Letter>, SCoeff)> = vec![(word, coeff)];
    let mut steps = 0usize;
    while let Some((w, c)) = work.pop() {
        steps += 1;
        assert!(steps < MAX_REWRITE_STEPS, "rewrite step limit exceeded");
        // find the first adjacent disorder
        let mut action: Option<(usize, bool)> = None; // (index, is_mixed)
        for i in 0..w.len().saturating_sub(1) {
            let (x, y) = (w[i], w[i + 1]);
            if x >= 4 && y < 4 {
                action = Some((i, true));
                break;
            }
            if (x < 4) == (y < 4) && x > y {
                action = Some((i, false));
                break;
            }
        }
        match action {
            None => {
                // sorted: bucket into exponent vector, then determinant-reduce
                let mut e = [0u8; 8];
                for l in &w {
                    e[*l as usize] += 1;
                }
                det_reduce_into(Monomial(e), c, out);
            }
            Some((i, true)) => {
                let (x, y) = (w[i], w[i + 1]);
                for (sign, spow, rhs) in MIXED[(x - 4) as usize][y as usize] {
                    let mut nw = Vec::with_capacity(w.len() + rhs.len().saturating_sub(2));
                    nw.extend_from_slice(&w[..i]);
                    nw.extend_from_slice(rhs);
                    nw.extend_from_slice(&w[i + 2..]);
                    work.push((nw, c.mul(&rule_coeff(*sign, *spow))));
                }
            }
            Some((i, false)) => {
                let mut nw = w;
                nw.swap(i, i + 1);
                work.push((nw, c));
            }
        }
    }
}

/// Stage-2 reduction ad -> bc + 1 (and the starred twin) on a block-sorted
/// monomial; accumulates canonical terms into `out`.
fn det_reduce_into(m: Monomial, coeff: SCoeff, out: &mut BTreeMap<Monomial, SCoeff>) {
    let e = m.0;
    if e[LA as usize] > 0 && e[LD as usize] > 0 {
        let mut lower = e;
        lower[LA as usize] -= 1;
        lower[LD as usize] -= 1;
        let mut swapped = lower;
        swapped[LB as usize] += 1;
        swapped[LC as usize] += 1;
        det_reduce_into(Monomial(swapped), coeff.clone(), out);
        det_reduce_into(Monomial(lower), coeff, out);
        return;
    }
    if e[LAS as usize] > 0 && e[LDS as usize] > 0 {
        let mut lower = e;
        lower[LAS as usize] -= 1;
        lower[LDS as usize] -= 1;
        let mut swapped = lower;
        swapped[LBS as usize] += 1;
        swapped[LCS as usize] += 1;
        det_reduce_into(Monomial(swapped), coeff.clone(), out);
        det_reduce_into(Monomial(lower), coeff, out);
        return;
    }
    let entry = out.entry(m).or_insert_with(SCoeff::zero);
    *entry = entry.add(&coeff);
    if entry.is_zero() {
        out.remove(&m);
    }
}

impl NCPoly {
    pub fn zero() -> Self {
        NCPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::scalar(SCoeff::one())
    }

    pub fn scalar(c: SCoeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::unit(), c);
        }
        NCPoly { terms }
    }

    pub fn letter(l: Letter) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::letter(l), SCoeff::one());
        NCPoly { terms }
    }

    /// Builds from raw (word, coefficient) pairs, canonicalizing.
    pub fn from_words<I: IntoIterator<Item = (Vec<Letter>, SCoeff)>>(it: I) -> Self {
        let mut out = BTreeMap::new();
        for (w, c) in it {
            if !c.is_zero() {
                reduce_word_into(w, c, &mut out);
            }
        }
        NCPoly { terms: out }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &SCoeff)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.terms.clone();
        for (m, c) in &rhs.terms {
            let e = out.entry(*m).or_insert_with(SCoeff::zero);
            *e = e.add(c);
            if e.is_zero() {
                out.remove(m);
            }
        }
        NCPoly { terms: out }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Self {
        NCPoly { terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn scale(&self, k: &SCoeff) -> Self {
        if k.is_zero() {
            return Self::zero();
        }
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let p = c.mul(k);
            if !p.is_zero() {
                out.insert(*m, p);
            }
        }
        NCPoly { terms: out }
    }

    /// Canonical product.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let c = c1.mul(c2);
                if c.is_zero() {
                    continue;
                }
                let mut w = m1.to_word();
                w.extend(m2.to_word());
                reduce_word_into(w, c, &mut out);
            }
        }
        NCPoly { terms: out }
    }

    /// Adjoint: antilinear, antimultiplicative, involutive.
    pub fn adjoint(&self) -> Self {
        let mut out = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut w = m.to_word();
            w.reverse();
            for l in w.iter_mut() {
                *l = (*l + 4) % 8;
            }
            reduce_word_into(w, c.conj(), &mut out);
        }
        NCPoly { terms: out }
    }

    /// True iff p commutes with all 8 generator letters.
    pub fn is_central(&self) -> bool {
        (0..8u8).all(|l| {
            let g = NCPoly::letter(l);
            self.mul(&g).sub(&g.mul(self)).is_zero()
        })
    }

    /// Canonicalizes an arbitrary term list; on canonical input this is the
    /// identity (the representation is always kept canonical).
    pub fn normal_form(&self) -> Self {
        Self::from_words(self.terms.iter().map(|(m, c)| (m.to_word(), c.clone())))
    }

    /// Reduces a free word to canonical form, folding in the given direction.
    /// Both directions must agree (confluence); exposed for the test battery.
    pub fn reduce_word_directed(word: &[Letter], left_to_right: bool) -> Self {
        if left_to_right {
            word.iter()
                .fold(NCPoly::one(), |acc, &l| acc.mul(&NCPoly::letter(l)))
        } else {
            word.iter()
                .rev()
                .fold(NCPoly::one(), |acc, &l| NCPoly::letter(l).mul(&acc))
        }
    }
}

/// The determinant element ad - bc - 1.
pub fn determinant_element() -> NCPoly {
    NCPoly::letter(LA)
        .mul(&NCPoly::letter(LD))
        .sub(&NCPoly::letter(LB).mul(&NCPoly::letter(LC)))
        .sub(&NCPoly::one())
}

/// All 22 relations of the generator algebra, moved to one side, as
/// (name, polynomial) pairs. Every entry must reduce to zero.
pub fn relations() -> Vec<(String, NCPoly)> {
    let g = |l: Letter| NCPoly::letter(l);
    let s = NCPoly::scalar(SCoeff::s());
    let comm = |x: &NCPoly, y: &NCPoly| x.mul(y).sub(&y.mul(x));
    let mut rels: Vec<(String, NCPoly)> = Vec::new();
    // 6 commutators among unstarred letters
    for i in 0..4u8 {
        for j in (i + 1)..4u8 {
            rels.push((
                format!("[{},{}]", LETTER_NAMES[i as usize], LETTER_NAMES[j as usize]),
                comm(&g(i), &g(j)),
            ));
        }
    }
    // 6 commutators among starred letters
    for i in 4..8u8 {
        for j in (i + 1)..8u8 {
            rels.push((
                format!("[{},{}]", LETTER_NAMES[i as usize], LETTER_NAMES[j as usize]),
                comm(&g(i), &g(j)),
            ));
        }
    }
    // 10 mixed relations
    rels.push(("a a' - a' a + s c' c".into(), comm(&g(LA), &g(LAS)).add(&s.mul(&g(LCS)).mul(&g(LC)))));
    rels.push(("a b' - b' a + s c d'".into(), comm(&g(LA), &g(LBS)).add(&s.mul(&g(LC)).mul(&g(LDS)))));
    rels.push(("a c' - c' a".into(), comm(&g(LA), &g(LCS))));
    rels.push(("a d' - d' a".into(), comm(&g(LA), &g(LDS))));
    rels.push((
        "b b' - b' b - s(a' a - d d')".into(),
        comm(&g(LB), &g(LBS)).sub(&s.mul(&g(LAS).mul(&g(LA)).sub(&g(LD).mul(&g(LDS)))))
    ));
    rels.push(("b c' - c' b".into(), comm(&g(LB), &g(LCS))));
    rels.push(("b d' - d' b - s c' a".into(), comm(&g(LB), &g(LDS)).sub(&s.mul(&g(LCS)).mul(&g(LA)))));
    rels.push(("c c' - c' c".into(), comm(&g(LC), &g(LCS))));
    rels.push(("c d' - d' c".into(), comm(&g(LC), &g(LDS))));
    rels.push(("d d' - d' d - s c c'".into(), comm(&g(LD), &g(LDS)).sub(&s.mul(&g(LC)).mul(&g(LCS)))));
    rels
}

fn fmt_scoeff_term(
    f: &mut fmt::Formatter<'_>,
    g: &GRat,
    spow: u32,
    mono: &Monomial,
    first: bool,
) -> fmt::Result {
    // sign handling: pull a leading minus out of purely-negative coefficients
    let (sign_neg, gg) = if g.re.is_zero() && !g.im.is_zero() {
        if g.im < num_rational::BigRational::from_integer(0.into()) {
            (true, -g)
        } else {
            (false, g.clone())
        }
    } else if g.re < num_rational::BigRational::from_integer(0.into()) {
        (true, -g)
    } else {
        (false, g.clone())
    };
    if first {
        if sign_neg {
            write!(f, "-")?;
        }
    } else if sign_neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let has_tail = spow > 0 || !mono.is_unit();
    let mut wrote = false;
    let is_one = gg == GRat::one();
    if !is_one || !has_tail {
        // two-part values always parenthesized so signs re-associate correctly
        let two_part = !gg.re.is_zero() && !gg.im.is_zero();
        if two_part {
            write!(f, "({})", gg)?;
        } else {
            write!(f, "{}", gg)?;
        }
        wrote = true;
    }
    if spow > 0 {
        if wrote {
            write!(f, "*")?;
        }
        if spow == 1 {
            write!(f, "s")?;
        } else {
            write!(f, "s^{}", spow)?;
        }
        wrote = true;
    }
    if !mono.is_unit() {
        for l in 0..8usize {
            let e = mono.0[l];
            if e == 0 {
                continue;
            }
            if wrote {
                write!(f, "*")?;
            }
            write!(f, "{}", LETTER_NAMES[l])?;
            if e > 1 {
                write!(f, "^{}", e)?;
            }
            wrote = true;
        }
    }
    Ok(())
}

impl fmt::Display for NCPoly {
    /// Canonical text: terms in descending lexicographic order of exponent
    /// vectors, each term's s-powers ascending. Output re-parses to the same
    /// polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            for (k, g) in c.iter() {
                fmt_scoeff_term(f, g, *k, m, first)?;
                first = false;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(l: Letter) -> NCPoly {
        NCPoly::letter(l)
    }

    #[test]
    fn oriented_rules_match_relation_table() {
        // a' a -> a a' + s c' c
        let lhs = g(LAS).mul(&g(LA));
        let rhs = g(LA)
            .mul(&g(LAS))
            .add(&NCPoly::scalar(SCoeff::s()).mul(&g(LCS)).mul(&g(LC)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn determinant_line() {
        // a*d -> b*c + 1
        let p = g(LA).mul(&g(LD));
        let q = g(LB).mul(&g(LC)).add(&NCPoly::one());
        assert_eq!(p, q);
        assert_eq!(p.to_string(), "b*c + 1");
    }

    #[test]
    fn all_relations_reduce_to_zero() {
        for (name, r) in relations() {
            assert!(r.is_zero(), "relation {} nonzero: {}", name, r);
        }
    }

    #[test]
    fn determinant_central_and_zero() {
        let det = determinant_element();
        assert!(det.is_zero(), "determinant element reduces to 0 in the quotient");
    }

    #[test]
    fn adjoint_involutive() {
        let p = g(LA).mul(&g(LBS)).add(&g(LC).scale(&SCoeff::s()));
        assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn star_sum_identity() {
        // a'a + d'd == aa' + dd'
        let lhs = g(LAS).mul(&g(LA)).add(&g(LDS).mul(&g(LD)));
        let rhs = g(LA).mul(&g(LAS)).add(&g(LD).mul(&g(LDS)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn centrality() {
        assert!(g(LC).is_central(), "c is central");
        assert!(!g(LA).is_central());
        // ad - bc canonicalizes to 1, hence is central
        let det = g(LA).mul(&g(LD)).sub(&g(LB).mul(&g(LC)));
        assert_eq!(det, NCPoly::one());
        assert!(det.is_central());
    }

    #[test]
    fn dual_strategy_confluence_smoke() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let len = rng.gen_range(0..=4);
            let w: Vec<Letter> = (0..len).map(|_| rng.gen_range(0..8u8)).collect();
            let l2r = NCPoly::reduce_word_directed(&w, true);
            let r2l = NCPoly::reduce_word_directed(&w, false);
            assert_eq!(l2r, r2l, "word {:?}", w);
        }
    }

    #[test]
    fn mul_associative() {
        let p = g(LAS).add(&g(LB));
        let q = g(LD).mul(&g(LCS));
        let r = g(LBS).sub(&NCPoly::one());
        assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
    }

    #[test]
    fn s_zero_commutative_limit() {
        // with s := 0 the b'b rewrite is plain commutation; here: evaluate by
        // checking the correction terms carry s factors only
        let p = g(LBS).mul(&g(LB));
        let direct = g(LB).mul(&g(LBS));
        let diff = p.sub(&direct);
        for (_, c) in diff.terms() {
            assert!(c.s_degree().unwrap_or(0) >= 1);
        }
    }
}
