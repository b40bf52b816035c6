//! Twisted comultiplications and Jacquet-module expansions.
//!
//! `big_mstar` and `big_mstar_gen` compute the composites
//!
//! ```text
//! M*  = (m  (x) id) . (~        (x) m* ) . kappa . m*
//! M*~ = (m~ (x) id) . (alpha.~  (x) m*~) . kappa . m*~
//! ```
//!
//! on a single word; `mu_star` folds the rank-reduction formula
//! `mu*(pi |x sigma) = M*~(pi) |x mu*(sigma)` over the factors of a principal
//! series, starting from `mu*(omega0) = 1 (x) omega0`.
//!
//! `verify_lemma` checks, term by term, that the genuine composite agrees with
//! the `chi`-conjugated linear one. The two sides are computed by the two
//! separate composites above; they share only the underlying ring primitives.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::BigInt;
use num_rational::Rational64;

use crate::characters::{Character, SymbolTable};
use crate::irreducibility::{GroupKind, PrincipalSeries};
use crate::ring::{comult, kappa, Element, JacquetElement, RingError, SpWord, Tensor, TensorElement, Word};

/// `M*` on a non-genuine word.
pub fn big_mstar(w: &Word) -> Result<TensorElement, RingError> {
    if w.genuine() {
        return Err(RingError::ExpectedNonGenuine);
    }
    let swapped = kappa(&comult(w));
    let mut out = Element::zero();
    for (t, c) in swapped.terms() {
        let dual = t.left.contragredient();
        for (t2, c2) in comult(&t.right).terms() {
            out.add_term(Tensor::new(dual.union(&t2.left), t2.right.clone()), c * c2);
        }
    }
    Ok(out)
}

/// `M*~` on a genuine word: the same composite with `alpha . ~` in place of
/// the plain contragredient and the genuine multiplications.
pub fn big_mstar_gen(w: &Word) -> Result<TensorElement, RingError> {
    if !w.genuine() {
        return Err(RingError::ExpectedGenuine);
    }
    let swapped = kappa(&comult(w));
    let mut out = Element::zero();
    for (t, c) in swapped.terms() {
        let dual = t.left.contragredient().alpha_twist();
        for (t2, c2) in comult(&t.right).terms() {
            out.add_term(Tensor::new(dual.union(&t2.left), t2.right.clone()), c * c2);
        }
    }
    Ok(out)
}

/// The action of `R (x) R` on `R (x) R_S` underlying the rank-reduction
/// formula: `(beta (x) gamma) |x (delta (x) eps) = beta.delta (x) (eps
/// extended by gamma)`.
pub fn rtimes(m: &TensorElement, s: &JacquetElement) -> JacquetElement {
    let mut out = Element::zero();
    for (tm, cm) in m.terms() {
        for (ts, cs) in s.terms() {
            out.add_term(
                Tensor::new(tm.left.union(&ts.left), ts.right.extend(&tm.right)),
                cm * cs,
            );
        }
    }
    out
}

/// The full Jacquet-module expansion of a principal series in the
/// Grothendieck group, as an element of `R (x) R_S` (genuine or not according
/// to the group tag).
#[derive(Clone, PartialEq, Eq)]
pub struct JacquetExpansion {
    value: JacquetElement,
    source: PrincipalSeries,
}

impl JacquetExpansion {
    pub fn value(&self) -> &JacquetElement {
        &self.value
    }

    pub fn source(&self) -> &PrincipalSeries {
        &self.source
    }

    pub fn total_mass(&self) -> BigInt {
        self.value.total_mass()
    }

    pub fn multiplicity(&self, left: &Word, right: &SpWord) -> BigInt {
        self.value
            .coefficient(&Tensor::new(left.clone(), right.clone()))
    }
}

impl fmt::Debug for JacquetExpansion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JacquetExpansion({})", self.value)
    }
}

/// Iterate the rank-reduction formula over the factors of a principal series.
pub fn mu_star(ps: &PrincipalSeries) -> JacquetExpansion {
    let genuine = ps.group() == GroupKind::Metaplectic;
    let mut acc: JacquetElement =
        Element::from_basis(Tensor::new(Word::unit(genuine), SpWord::anchor(genuine)));
    for xi in ps.chars().iter().rev() {
        let w = Word::single(genuine, xi.clone());
        let m = if genuine {
            big_mstar_gen(&w).expect("genuine word")
        } else {
            big_mstar(&w).expect("non-genuine word")
        };
        acc = rtimes(&m, &acc);
    }
    debug_assert_eq!(
        acc.total_mass(),
        BigInt::from(3).pow(ps.rank() as u32),
        "expansion mass must be 3^n"
    );
    JacquetExpansion {
        value: acc,
        source: ps.clone(),
    }
}

/// Coefficient of `left (x) right` in the expansion of `ps`.
pub fn jacquet_multiplicity(ps: &PrincipalSeries, left: &Word, right: &SpWord) -> BigInt {
    mu_star(ps).multiplicity(left, right)
}

/// Outcome of checking the twist identity `M*~ = (chi (x) chi) . M* . chi^{-1}`
/// on one word.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub word: Word,
    /// `M*~(w) - (chi (x) chi) M*(chi^{-1} w)`; empty iff the identity holds.
    pub difference: TensorElement,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.difference.is_zero()
    }
}

impl fmt::Display for LemmaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.holds() {
            write!(f, "ok: {}", self.word)
        } else {
            write!(f, "FAIL: {} differs by {}", self.word, self.difference)
        }
    }
}

/// Compare `M*~(w)` with `(chi (x) chi) M*(chi^{-1} w)` for a genuine word.
pub fn verify_lemma(w: &Word) -> LemmaReport {
    assert!(w.genuine(), "the twist identity concerns genuine words");
    let lhs = big_mstar_gen(w).expect("genuine word");
    let linear = big_mstar(&w.with_genuine(false)).expect("non-genuine word");
    let rhs = linear.map_basis(|t| {
        Tensor::new(t.left.with_genuine(true), t.right.with_genuine(true))
    });
    LemmaReport {
        word: w.clone(),
        difference: lhs.sub(&rhs),
    }
}

/// Result of sweeping `verify_lemma` over all words up to a length bound.
#[derive(Clone, Debug)]
pub struct LemmaSweep {
    pub checked: usize,
    pub failures: Vec<LemmaReport>,
}

impl LemmaSweep {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// All genuine words of length `<= max_len` with characters from `pool`
/// (multisets, so each word appears once).
pub fn lemma_words(pool: &[Character], max_len: usize) -> Vec<Word> {
    let mut words = Vec::new();
    for len in 0..=max_len {
        for combo in (0..pool.len()).combinations_with_replacement(len) {
            words.push(Word::new(
                true,
                combo.into_iter().map(|i| pool[i].clone()).collect(),
            ));
        }
    }
    words
}

/// A deterministic pool of `size` distinct characters over `table`: exponents
/// `0, 1/2, -1/2, 1, -1, ...` crossed with the declared unitary symbols.
pub fn lemma_pool(table: &Arc<SymbolTable>, size: usize) -> Vec<Character> {
    let mut units = vec![Character::trivial(table)];
    let eta = Character::eta(table);
    if !eta.is_trivial() {
        units.push(eta);
    }
    for (name, order) in table.generators().skip(1) {
        let g = Character::symbol(table, name).expect("declared symbol");
        if g.is_trivial() {
            continue;
        }
        units.push(g.clone());
        if order == crate::characters::Order::Infinite {
            units.push(g.inverse());
        }
    }
    let mut pool = Vec::with_capacity(size);
    let mut step = 0i64;
    'outer: loop {
        let e = if step == 0 {
            Rational64::new(0, 1)
        } else {
            let magnitude = Rational64::new((step + 1) / 2, 2);
            if step % 2 == 1 {
                magnitude
            } else {
                -magnitude
            }
        };
        for u in &units {
            if pool.len() >= size {
                break 'outer;
            }
            pool.push(Character::nu(table, e).mul(u).expect("same table"));
        }
        step += 1;
    }
    pool
}

pub fn sweep_lemma_seq(pool: &[Character], max_len: usize) -> LemmaSweep {
    let words = lemma_words(pool, max_len);
    let checked = words.len();
    let failures = words
        .iter()
        .map(verify_lemma)
        .filter(|r| !r.holds())
        .collect();
    LemmaSweep { checked, failures }
}

#[cfg(feature = "parallel")]
pub fn sweep_lemma_par(pool: &[Character], max_len: usize) -> LemmaSweep {
    use rayon::prelude::*;
    let words = lemma_words(pool, max_len);
    let checked = words.len();
    let failures = words
        .par_iter()
        .map(verify_lemma)
        .filter(|r| !r.holds())
        .collect();
    LemmaSweep { checked, failures }
}

/// Sweep the twist identity over all words of length `<= max_len` from the
/// pool; parallel when the `parallel` feature is enabled.
pub fn sweep_lemma(pool: &[Character], max_len: usize) -> LemmaSweep {
    #[cfg(feature = "parallel")]
    {
        sweep_lemma_par(pool, max_len)
    }
    #[cfg(not(feature = "parallel"))]
    {
        sweep_lemma_seq(pool, max_len)
    }
}

pub fn mu_star_all_seq(series: &[PrincipalSeries]) -> Vec<JacquetExpansion> {
    series.iter().map(mu_star).collect()
}

#[cfg(feature = "parallel")]
pub fn mu_star_all_par(series: &[PrincipalSeries]) -> Vec<JacquetExpansion> {
    use rayon::prelude::*;
    series.par_iter().map(mu_star).collect()
}

/// Batch expansion; parallel when the `parallel` feature is enabled.
pub fn mu_star_all(series: &[PrincipalSeries]) -> Vec<JacquetExpansion> {
    #[cfg(feature = "parallel")]
    {
        mu_star_all_par(series)
    }
    #[cfg(not(feature = "parallel"))]
    {
        mu_star_all_seq(series)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::{Order, SymbolTable};
    use num_traits::One;

    fn table() -> Arc<SymbolTable> {
        SymbolTable::new(Order::Two, &[("u", Order::Infinite)]).unwrap()
    }

    fn ch(t: &Arc<SymbolTable>, n: i64, d: i64, u: i64) -> Character {
        Character::build(t, Rational64::new(n, d), &[("u", u)]).unwrap()
    }

    /// Independent oracle: every factor goes to one of three slots — inverted
    /// into the left leg, plain into the left leg, or plain into the right
    /// leg. For genuine words the `alpha`-twisted dual collapses to the plain
    /// inverse, so the slot map is inversion in both cases.
    fn three_way_oracle(w: &Word) -> TensorElement {
        let g = w.genuine();
        let n = w.len();
        let mut out = Element::zero();
        for mut code in 0..3usize.pow(n as u32) {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for c in w.chars() {
                match code % 3 {
                    0 => left.push(c.inverse()),
                    1 => left.push(c.clone()),
                    _ => right.push(c.clone()),
                }
                code /= 3;
            }
            out.add_term(
                Tensor::new(Word::new(g, left), Word::new(g, right)),
                BigInt::one(),
            );
        }
        out
    }

    #[test]
    fn big_mstar_on_single_character() {
        let t = table();
        let xi = ch(&t, 1, 2, 1);
        let w = Word::single(false, xi.clone());
        let got = big_mstar(&w).unwrap();
        let mut expected = Element::zero();
        expected.add_term(
            Tensor::new(Word::single(false, xi.inverse()), Word::unit(false)),
            BigInt::one(),
        );
        expected.add_term(
            Tensor::new(Word::single(false, xi.clone()), Word::unit(false)),
            BigInt::one(),
        );
        expected.add_term(
            Tensor::new(Word::unit(false), Word::single(false, xi.clone())),
            BigInt::one(),
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn big_mstar_preserves_the_unit() {
        let got = big_mstar(&Word::unit(false)).unwrap();
        assert_eq!(
            got,
            Element::from_basis(Tensor::new(Word::unit(false), Word::unit(false)))
        );
        let got = big_mstar_gen(&Word::unit(true)).unwrap();
        assert_eq!(
            got,
            Element::from_basis(Tensor::new(Word::unit(true), Word::unit(true)))
        );
    }

    #[test]
    fn big_mstar_matches_three_way_oracle() {
        let t = table();
        let w = Word::new(false, vec![ch(&t, 1, 2, 0), ch(&t, 0, 1, 1)]);
        let got = big_mstar(&w).unwrap();
        assert_eq!(got.total_mass(), BigInt::from(9));
        assert_eq!(got, three_way_oracle(&w));
        let longer = Word::new(
            false,
            vec![ch(&t, 1, 2, 0), ch(&t, 0, 1, 1), ch(&t, -1, 1, 1)],
        );
        assert_eq!(big_mstar(&longer).unwrap(), three_way_oracle(&longer));
    }

    #[test]
    fn big_mstar_gen_on_single_character() {
        let t = table();
        let xi = ch(&t, 1, 2, 1);
        let w = Word::single(true, xi.clone());
        let got = big_mstar_gen(&w).unwrap();
        let mut expected = Element::zero();
        expected.add_term(
            Tensor::new(Word::single(true, xi.inverse()), Word::unit(true)),
            BigInt::one(),
        );
        expected.add_term(
            Tensor::new(Word::single(true, xi.clone()), Word::unit(true)),
            BigInt::one(),
        );
        expected.add_term(
            Tensor::new(Word::unit(true), Word::single(true, xi.clone())),
            BigInt::one(),
        );
        assert_eq!(got, expected);
    }

    #[test]
    fn big_mstar_gen_matches_three_way_oracle() {
        let t = table();
        let w = Word::new(true, vec![ch(&t, 1, 2, 0), ch(&t, 0, 1, 1)]);
        let got = big_mstar_gen(&w).unwrap();
        assert_eq!(got.total_mass(), BigInt::from(9));
        assert!(got.terms().all(|(t, _)| t.left.genuine() && t.right.genuine()));
        assert_eq!(got, three_way_oracle(&w));
    }

    #[test]
    fn wrong_genuineness_is_rejected() {
        let w = Word::unit(true);
        assert_eq!(big_mstar(&w), Err(RingError::ExpectedNonGenuine));
        let w = Word::unit(false);
        assert_eq!(big_mstar_gen(&w), Err(RingError::ExpectedGenuine));
    }

    #[test]
    fn mu_star_base_case() {
        let ps = PrincipalSeries::new(vec![], GroupKind::Metaplectic).unwrap();
        let got = mu_star(&ps);
        assert_eq!(
            got.value(),
            &Element::from_basis(Tensor::new(Word::unit(true), SpWord::anchor(true)))
        );
    }

    #[test]
    fn mu_star_rank_one() {
        let t = table();
        let xi = ch(&t, 1, 2, 1);
        let ps = PrincipalSeries::new(vec![xi.clone()], GroupKind::Metaplectic).unwrap();
        let got = mu_star(&ps);
        let mut expected = Element::zero();
        expected.add_term(
            Tensor::new(Word::single(true, xi.inverse()), SpWord::anchor(true)),
            BigInt::one(),
        );
        expected.add_term(
            Tensor::new(Word::single(true, xi.clone()), SpWord::anchor(true)),
            BigInt::one(),
        );
        expected.add_term(
            Tensor::new(Word::unit(true), SpWord::new(true, vec![xi.clone()])),
            BigInt::one(),
        );
        assert_eq!(got.value(), &expected);
    }

    #[test]
    fn mu_star_mass_and_grading() {
        let t = table();
        let ps = PrincipalSeries::new(
            vec![ch(&t, 1, 2, 1), ch(&t, 1, 1, 0)],
            GroupKind::Metaplectic,
        )
        .unwrap();
        let got = mu_star(&ps);
        assert_eq!(got.total_mass(), BigInt::from(9));
        for (term, c) in got.value().terms() {
            assert!(*c > BigInt::from(0));
            assert_eq!(term.left.len() + term.right.len(), 2);
        }
    }

    #[test]
    fn mu_star_agrees_with_single_shot_expansion() {
        // Folding factor by factor equals applying the composite to the whole
        // word and acting once on the anchor.
        let t = table();
        for group in [GroupKind::Metaplectic, GroupKind::SoOdd] {
            let genuine = group == GroupKind::Metaplectic;
            let chars = vec![ch(&t, 1, 2, 1), ch(&t, 1, 1, 0), ch(&t, 0, 1, 1)];
            let ps = PrincipalSeries::new(chars.clone(), group).unwrap();
            let whole = Word::new(genuine, chars);
            let m = if genuine {
                big_mstar_gen(&whole).unwrap()
            } else {
                big_mstar(&whole).unwrap()
            };
            let base = Element::from_basis(Tensor::new(
                Word::unit(genuine),
                SpWord::anchor(genuine),
            ));
            assert_eq!(mu_star(&ps).value(), &rtimes(&m, &base));
        }
    }

    #[test]
    fn multiplicity_reads_the_expansion() {
        let t = table();
        let xi = ch(&t, 1, 2, 1);
        let ps = PrincipalSeries::new(vec![xi.clone()], GroupKind::Metaplectic).unwrap();
        assert_eq!(
            jacquet_multiplicity(&ps, &Word::single(true, xi.clone()), &SpWord::anchor(true)),
            BigInt::from(1)
        );
        assert_eq!(
            jacquet_multiplicity(
                &ps,
                &Word::unit(true),
                &SpWord::new(true, vec![xi.clone()])
            ),
            BigInt::from(1)
        );
        // absent term
        assert_eq!(
            jacquet_multiplicity(
                &ps,
                &Word::single(true, ch(&t, 3, 1, 0)),
                &SpWord::anchor(true)
            ),
            BigInt::from(0)
        );
    }

    #[test]
    fn lemma_holds_on_basic_words() {
        let t = table();
        assert!(verify_lemma(&Word::unit(true)).holds());
        assert!(verify_lemma(&Word::single(true, ch(&t, 1, 2, 1))).holds());
    }

    #[test]
    fn lemma_sweep_small() {
        let t = table();
        let pool = lemma_pool(&t, 4);
        let sweep = sweep_lemma(&pool, 3);
        // multisets of size <= 3 from 4 characters: 1 + 4 + 10 + 20
        assert_eq!(sweep.checked, 35);
        assert!(sweep.all_pass());
        let seq = sweep_lemma_seq(&pool, 3);
        assert_eq!(seq.checked, sweep.checked);
        assert!(seq.all_pass());
    }

    #[test]
    fn lemma_pool_is_deterministic_and_distinct() {
        let t = table();
        let pool = lemma_pool(&t, 6);
        assert_eq!(pool, lemma_pool(&t, 6));
        for (i, a) in pool.iter().enumerate() {
            for b in &pool[i + 1..] {
                assert_ne!(a, b);
            }
        }
    }
}
