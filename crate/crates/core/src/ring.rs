//! Free Z-modules on words of `GL(1)` characters.
//!
//! A [`Word`] is a multiset of characters with a genuineness flag; it stands
//! for the parabolically induced product of its factors (with a `chi` twist on
//! each factor when genuine). Multisets, not sequences: in the Grothendieck
//! group all orderings of the product define the same element, so words keep a
//! sorted normal form and equality is syntactic.
//!
//! [`Element`] is a formal integer-linear combination over an ordered basis,
//! used for the rings `R`, `R^gen` and their tensor squares.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::characters::Character;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("multiplication requires uniform genuineness across all words")]
    MixedGenuineness,
    #[error("expected non-genuine input")]
    ExpectedNonGenuine,
    #[error("expected genuine input")]
    ExpectedGenuine,
}

/// A basis word: a multiset of characters plus a genuineness flag.
#[derive(Clone, PartialEq, Eq)]
pub struct Word {
    genuine: bool,
    chars: Vec<Character>, // sorted
}

impl Word {
    pub fn new(genuine: bool, mut chars: Vec<Character>) -> Word {
        chars.sort();
        Word { genuine, chars }
    }

    /// The empty word, the unit of the ring.
    pub fn unit(genuine: bool) -> Word {
        Word {
            genuine,
            chars: Vec::new(),
        }
    }

    pub fn single(genuine: bool, c: Character) -> Word {
        Word {
            genuine,
            chars: vec![c],
        }
    }

    /// Internal constructor for characters already in sorted order.
    pub(crate) fn from_sorted(genuine: bool, chars: Vec<Character>) -> Word {
        debug_assert!(chars.windows(2).all(|w| w[0] <= w[1]));
        Word { genuine, chars }
    }

    pub fn genuine(&self) -> bool {
        self.genuine
    }

    pub fn chars(&self) -> &[Character] {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// Multiset union; the basis-level product. Callers keep flags uniform.
    pub fn union(&self, other: &Word) -> Word {
        debug_assert_eq!(self.genuine, other.genuine);
        let mut chars = Vec::with_capacity(self.chars.len() + other.chars.len());
        let (mut i, mut j) = (0, 0);
        while i < self.chars.len() && j < other.chars.len() {
            if self.chars[i] <= other.chars[j] {
                chars.push(self.chars[i].clone());
                i += 1;
            } else {
                chars.push(other.chars[j].clone());
                j += 1;
            }
        }
        chars.extend_from_slice(&self.chars[i..]);
        chars.extend_from_slice(&other.chars[j..]);
        Word {
            genuine: self.genuine,
            chars,
        }
    }

    /// The contragredient. Non-genuine words invert each character; genuine
    /// words pick up an extra `eta` per factor because `(chi xi)~ = chi^{-1}
    /// xi^{-1} = (eta xi^{-1}) chi`.
    pub fn contragredient(&self) -> Word {
        let chars = self
            .chars
            .iter()
            .map(|c| {
                if self.genuine {
                    c.inverse().eta_twist()
                } else {
                    c.inverse()
                }
            })
            .collect();
        Word::new(self.genuine, chars)
    }

    /// Twist by `alpha = (det, -1)_F`: multiplies every factor by `eta`.
    pub fn alpha_twist(&self) -> Word {
        let chars = self.chars.iter().map(Character::eta_twist).collect();
        Word::new(self.genuine, chars)
    }

    /// Same characters, other genuineness flag.
    pub fn with_genuine(&self, genuine: bool) -> Word {
        Word {
            genuine,
            chars: self.chars.clone(),
        }
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Graded order: unit first, then by length, then lexicographically.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.genuine
            .cmp(&other.genuine)
            .then_with(|| self.chars.len().cmp(&other.chars.len()))
            .then_with(|| self.chars.cmp(&other.chars))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.chars.is_empty() {
            return write!(f, "1");
        }
        let factors: Vec<String> = self
            .chars
            .iter()
            .map(|c| {
                if self.genuine {
                    format!("chi({c})")
                } else {
                    c.to_string()
                }
            })
            .collect();
        write!(f, "{}", factors.join(" x "))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word[{self}]")
    }
}

/// A basis word on the symplectic (or odd orthogonal) side: the class of
/// `(chi xi_1) x ... x (chi xi_k) |x omega0` (genuine) or
/// `xi_1 x ... x xi_k |x 1_{SO(1)}` (non-genuine).
///
/// In the rank-`k` Grothendieck group every factor satisfies
/// `xi |x anchor = xi^{-1} |x anchor`, so the normal form replaces each
/// character by the larger of itself and its inverse before sorting.
#[derive(Clone, PartialEq, Eq)]
pub struct SpWord {
    genuine: bool,
    chars: Vec<Character>, // inversion-class representatives, sorted
}

impl SpWord {
    /// The empty word over the anchor (`omega0` or `1_{SO(1)}`).
    pub fn anchor(genuine: bool) -> SpWord {
        SpWord {
            genuine,
            chars: Vec::new(),
        }
    }

    pub fn new(genuine: bool, chars: Vec<Character>) -> SpWord {
        let mut chars: Vec<Character> = chars.into_iter().map(inversion_rep).collect();
        chars.sort();
        SpWord { genuine, chars }
    }

    pub fn genuine(&self) -> bool {
        self.genuine
    }

    pub fn chars(&self) -> &[Character] {
        &self.chars
    }

    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    /// Append the factors of a `GL` word, renormalizing.
    pub fn extend(&self, w: &Word) -> SpWord {
        debug_assert_eq!(self.genuine, w.genuine());
        let mut chars = self.chars.clone();
        chars.extend(w.chars().iter().cloned().map(inversion_rep));
        chars.sort();
        SpWord {
            genuine: self.genuine,
            chars,
        }
    }
}

fn inversion_rep(c: Character) -> Character {
    let inv = c.inverse();
    if inv > c {
        inv
    } else {
        c
    }
}

impl PartialOrd for SpWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SpWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.genuine
            .cmp(&other.genuine)
            .then_with(|| self.chars.len().cmp(&other.chars.len()))
            .then_with(|| self.chars.cmp(&other.chars))
    }
}

impl fmt::Display for SpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let anchor = if self.genuine { "omega0" } else { "so1" };
        if self.chars.is_empty() {
            return write!(f, "{anchor}");
        }
        let factors: Vec<String> = self.chars.iter().map(|c| c.to_string()).collect();
        write!(f, "{} |x {anchor}", factors.join(" x "))
    }
}

impl fmt::Debug for SpWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpWord[{self}]")
    }
}

/// A pure tensor of two basis elements.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Tensor<L, R> {
    pub left: L,
    pub right: R,
}

impl<L, R> Tensor<L, R> {
    pub fn new(left: L, right: R) -> Self {
        Tensor { left, right }
    }
}

impl<L: fmt::Display, R: fmt::Display> fmt::Display for Tensor<L, R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) \u{2297} ({})", self.left, self.right)
    }
}

/// A formal integer-linear combination over an ordered basis.
///
/// Zero coefficients are never stored; the `BTreeMap` keeps terms in the
/// basis order, so equality is syntactic equality of normal forms and
/// iteration order is reproducible.
#[derive(Clone, PartialEq, Eq)]
pub struct Element<B: Ord> {
    terms: BTreeMap<B, BigInt>,
}

pub type RingElement = Element<Word>;
pub type TensorElement = Element<Tensor<Word, Word>>;
pub type JacquetElement = Element<Tensor<Word, SpWord>>;

impl<B: Ord + Clone> Element<B> {
    pub fn zero() -> Self {
        Element {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_basis(b: B) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(b, BigInt::one());
        Element { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Stored coefficient, or zero.
    pub fn coefficient(&self, b: &B) -> BigInt {
        self.terms.get(b).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Accumulate `c * b`, dropping the term if the total vanishes.
    pub fn add_term(&mut self, b: B, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(b);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (b, c) in &other.terms {
            out.add_term(b.clone(), -c.clone());
        }
        out
    }

    /// Terms in basis order.
    pub fn terms(&self) -> impl Iterator<Item = (&B, &BigInt)> {
        self.terms.iter()
    }

    /// Sum of all coefficients.
    pub fn total_mass(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Linear extension of a basis map.
    pub fn map_basis<C: Ord + Clone>(&self, f: impl Fn(&B) -> C) -> Element<C> {
        let mut out = Element::zero();
        for (b, c) in &self.terms {
            out.add_term(f(b), c.clone());
        }
        out
    }

    /// Linear extension of a basis-to-element map.
    pub fn map_expand<C: Ord + Clone>(&self, f: impl Fn(&B) -> Element<C>) -> Element<C> {
        let mut out = Element::zero();
        for (b, c) in &self.terms {
            for (b2, c2) in f(b).terms {
                out.add_term(b2, c * c2);
            }
        }
        out
    }
}

impl<B: Ord + Clone> FromIterator<(B, BigInt)> for Element<B> {
    fn from_iter<I: IntoIterator<Item = (B, BigInt)>>(iter: I) -> Self {
        let mut out = Element::zero();
        for (b, c) in iter {
            out.add_term(b, c);
        }
        out
    }
}

impl<B: Ord + fmt::Display> fmt::Display for Element<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (b, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{b}")?;
            } else {
                write!(f, "{c} {b}")?;
            }
        }
        Ok(())
    }
}

impl<B: Ord + fmt::Display> fmt::Debug for Element<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

/// Direction of the `chi` twist between `R` and `R^gen`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChiDirection {
    Forward,
    Inverse,
}

/// The flag every word of `x` must carry, or an error on mixed flags.
fn uniform_flag(elements: &[&RingElement]) -> Result<Option<bool>, RingError> {
    let mut flag = None;
    for x in elements {
        for (w, _) in x.terms() {
            match flag {
                None => flag = Some(w.genuine()),
                Some(g) if g == w.genuine() => {}
                Some(_) => return Err(RingError::MixedGenuineness),
            }
        }
    }
    Ok(flag)
}

/// The multiplication `m` / `m~`: bilinear extension of multiset union.
/// Defined only when every word involved has the same restriction to the
/// central `mu_2`, i.e. the same genuineness flag.
pub fn mult(a: &RingElement, b: &RingElement) -> Result<RingElement, RingError> {
    uniform_flag(&[a, b])?;
    let mut out = Element::zero();
    for (wa, ca) in a.terms() {
        for (wb, cb) in b.terms() {
            out.add_term(wa.union(wb), ca * cb);
        }
    }
    Ok(out)
}

/// The comultiplication `m*` / `m*~` on a basis word: the sum over all ways
/// of splitting the multiset of factors between the two tensor legs.
pub fn comult(w: &Word) -> TensorElement {
    let n = w.len();
    debug_assert!(n < 32, "comultiplication of unreasonably long word");
    let g = w.genuine();
    let mut out = Element::zero();
    for mask in 0u32..(1u32 << n) {
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, c) in w.chars().iter().enumerate() {
            if mask & (1 << i) != 0 {
                left.push(c.clone());
            } else {
                right.push(c.clone());
            }
        }
        out.add_term(
            Tensor::new(Word::from_sorted(g, left), Word::from_sorted(g, right)),
            BigInt::one(),
        );
    }
    out
}

/// The transposition `kappa` switching the tensor factors.
pub fn kappa(x: &TensorElement) -> TensorElement {
    x.map_basis(|t| Tensor::new(t.right.clone(), t.left.clone()))
}

/// Multiplication by `chi` (forward: `R -> R^gen`) or its inverse.
/// The characters are unchanged; only the genuineness flag flips.
pub fn chi_twist(x: &RingElement, direction: ChiDirection) -> Result<RingElement, RingError> {
    let want_genuine = match direction {
        ChiDirection::Forward => false,
        ChiDirection::Inverse => true,
    };
    for (w, _) in x.terms() {
        if w.genuine() != want_genuine {
            return Err(match direction {
                ChiDirection::Forward => RingError::ExpectedNonGenuine,
                ChiDirection::Inverse => RingError::ExpectedGenuine,
            });
        }
    }
    Ok(x.map_basis(|w| w.with_genuine(!want_genuine)))
}
