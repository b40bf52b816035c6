//! The irreducibility criterion for principal series.
//!
//! A principal series `(chi xi_1) x ... x (chi xi_n) |x omega0` of the
//! metaplectic group (or `xi_1 x ... x xi_n |x 1` of split `SO(2n+1)`) is
//! irreducible iff
//!
//! 1. no `xi_i` equals `nu^{+-1/2} xi` with `xi` of order 1 or 2, and
//! 2. no pair satisfies `xi_i = nu^{+-1} xi_j^{+-1}`.
//!
//! The two group tags share the same decision procedure; `decide` returns a
//! certificate naming the violated condition when the series reduces.

use itertools::Itertools;
use num_rational::Rational64;
use num_traits::Zero;
use std::fmt;

use crate::characters::{CharError, Character};

/// Which family of groups the series lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Metaplectic,
    SoOdd,
}

/// An ordered list of inducing characters plus the group tag.
#[derive(Clone, PartialEq, Eq)]
pub struct PrincipalSeries {
    chars: Vec<Character>,
    group: GroupKind,
}

impl PrincipalSeries {
    pub fn new(chars: Vec<Character>, group: GroupKind) -> Result<Self, CharError> {
        if let Some(first) = chars.first() {
            for c in &chars[1..] {
                if first.table() != c.table() {
                    return Err(CharError::MixedTables);
                }
            }
        }
        Ok(PrincipalSeries { chars, group })
    }

    pub fn chars(&self) -> &[Character] {
        &self.chars
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn rank(&self) -> usize {
        self.chars.len()
    }
}

impl fmt::Debug for PrincipalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "PrincipalSeries[{:?}; {}]",
            self.group,
            self.chars.iter().map(|c| c.to_string()).join(" x ")
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// Certificate of reducibility. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// `xi_index = nu^{sign * 1/2} * xi` with `xi` self-dual.
    Cond1 {
        index: usize,
        xi: Character,
        sign: Sign,
    },
    /// `xi_i = nu^{nu_sign} * xi_j^{inv_sign}` with `i < j`.
    Cond2 {
        i: usize,
        j: usize,
        nu_sign: Sign,
        inv_sign: Sign,
    },
}

impl Witness {
    /// Re-check the defining equation directly on the character group.
    pub fn validates(&self, chars: &[Character]) -> bool {
        match self {
            Witness::Cond1 { index, xi, sign } => {
                let Some(target) = chars.get(*index) else {
                    return false;
                };
                let table = target.table();
                let half = Rational64::new(sign.as_i64(), 2);
                let shifted = Character::nu(table, half).mul(xi);
                xi.is_self_dual() && shifted.as_ref() == Ok(target)
            }
            Witness::Cond2 {
                i,
                j,
                nu_sign,
                inv_sign,
            } => {
                let (Some(xi_i), Some(xi_j)) = (chars.get(*i), chars.get(*j)) else {
                    return false;
                };
                let table = xi_i.table();
                let nu = Character::nu(table, Rational64::new(nu_sign.as_i64(), 1));
                let rhs = nu.mul(&xi_j.pow(inv_sign.as_i64()));
                *i < *j && rhs.as_ref() == Ok(xi_i)
            }
        }
    }
}

/// Outcome of the criterion; irreducible iff there is no witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    witness: Option<Witness>,
}

impl Verdict {
    pub fn irreducible(&self) -> bool {
        self.witness.is_none()
    }

    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }
}

/// Replace each `xi_i` of negative exponent by its inverse (exponent 0 kept
/// as-given), then sort by exponent descending with a total tie-break on the
/// unitary parts. The output lies in the Weyl orbit of the input.
pub fn canonicalize(ps: &PrincipalSeries) -> PrincipalSeries {
    let mut chars: Vec<Character> = ps
        .chars
        .iter()
        .map(|c| {
            if c.exponent() < Rational64::zero() {
                c.inverse()
            } else {
                c.clone()
            }
        })
        .collect();
    chars.sort_by(|a, b| b.exponent().cmp(&a.exponent()).then_with(|| a.cmp(b)));
    PrincipalSeries {
        chars,
        group: ps.group,
    }
}

/// First index violating condition (1), scanning ascending indices with sign
/// `+1/2` before `-1/2`. Uses the closed form: `e(xi_i) = +-1/2` and the
/// unitary part self-dual.
pub fn find_condition1_witness(chars: &[Character]) -> Option<Witness> {
    let half = Rational64::new(1, 2);
    for (index, c) in chars.iter().enumerate() {
        for sign in [Sign::Plus, Sign::Minus] {
            let target = if sign == Sign::Plus { half } else { -half };
            if c.exponent() == target {
                let xi = c.unitary_part();
                if xi.is_self_dual() {
                    return Some(Witness::Cond1 { index, xi, sign });
                }
            }
        }
    }
    None
}

/// First pair violating condition (2), scanning ascending `(i, j)` and then
/// the four sign combinations `(+,+), (+,-), (-,+), (-,-)`.
pub fn find_condition2_witness(chars: &[Character]) -> Option<Witness> {
    for i in 0..chars.len() {
        for j in (i + 1)..chars.len() {
            for nu_sign in [Sign::Plus, Sign::Minus] {
                for inv_sign in [Sign::Plus, Sign::Minus] {
                    let e_target = Rational64::new(nu_sign.as_i64(), 1)
                        + chars[j].exponent() * Rational64::new(inv_sign.as_i64(), 1);
                    if chars[i].exponent() == e_target
                        && chars[i].unitary_part() == chars[j].unitary_part().pow(inv_sign.as_i64())
                    {
                        return Some(Witness::Cond2 {
                            i,
                            j,
                            nu_sign,
                            inv_sign,
                        });
                    }
                }
            }
        }
    }
    None
}

/// The criterion: irreducible iff neither condition produces a witness.
/// Identical for both group tags.
pub fn decide(ps: &PrincipalSeries) -> Verdict {
    let witness =
        find_condition1_witness(&ps.chars).or_else(|| find_condition2_witness(&ps.chars));
    debug_assert!(witness.iter().all(|w| w.validates(&ps.chars)));
    Verdict { witness }
}

/// All `2^n * n!` Weyl variants: every permutation combined with every
/// pattern of inversions.
pub fn weyl_variants(ps: &PrincipalSeries) -> Vec<PrincipalSeries> {
    let n = ps.chars.len();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let inverted: Vec<Character> = ps
            .chars
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if mask & (1 << i) != 0 {
                    c.inverse()
                } else {
                    c.clone()
                }
            })
            .collect();
        for perm in (0..n).permutations(n) {
            out.push(PrincipalSeries {
                chars: perm.iter().map(|&i| inverted[i].clone()).collect(),
                group: ps.group,
            });
        }
    }
    out
}
