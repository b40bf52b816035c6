//! Hilbert symbols and the determinant-level double cover over `Q_p`.
//!
//! Field elements are nonzero rationals regarded inside `Q_p`; square classes
//! are exact (valuation parity plus the unit class: Legendre symbol for odd
//! `p`, class mod 8 for `p = 2`), so no p-adic approximation is involved.
//! The cover is modeled at determinant level only: the cocycle
//! `(det g_1, det g_2)_F` depends on the determinants alone.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Zero;
use thiserror::Error;

use crate::characters::Order;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PAdicError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the Hilbert symbol is defined for nonzero arguments")]
    ZeroInput,
    #[error("cover elements require nonzero determinant")]
    ZeroDeterminant,
    #[error("sign must be +1 or -1")]
    BadSign,
}

/// The field `Q_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PAdicField {
    p: u64,
}

impl PAdicField {
    pub fn new(p: u64) -> Result<Self, PAdicError> {
        if !is_prime(p) {
            return Err(PAdicError::NotPrime(p));
        }
        Ok(PAdicField { p })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// p-adic valuation and unit part of a nonzero integer.
fn val_unit(mut x: i64, p: u64) -> (i64, i64) {
    debug_assert!(x != 0);
    let p = p as i64;
    let mut v = 0;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    (v, x)
}

/// Valuation of a nonzero rational plus the unit parts of numerator and
/// denominator.
fn decompose(x: Rational64, p: u64) -> (i64, i64, i64) {
    let (vn, un) = val_unit(*x.numer(), p);
    let (vd, ud) = val_unit(*x.denom(), p);
    (vn - vd, un, ud)
}

/// Legendre symbol of an integer prime to odd `p`, by Euler's criterion.
fn legendre(u: i64, p: u64) -> i32 {
    let r = u.rem_euclid(p as i64);
    debug_assert!(r != 0);
    let pow = BigInt::from(r).modpow(&BigInt::from((p - 1) / 2), &BigInt::from(p));
    if pow == BigInt::from(1) {
        1
    } else {
        -1
    }
}

/// Legendre symbol of the unit part of a rational (numerator times
/// denominator, both prime to `p`).
fn legendre_unit(un: i64, ud: i64, p: u64) -> i32 {
    legendre(un, p) * legendre(ud, p)
}

/// Class mod 8 of an odd rational unit `un/ud`. Odd squares are 1 mod 8, so
/// the inverse of an odd residue mod 8 is itself.
fn class_mod8(un: i64, ud: i64) -> i64 {
    (un.rem_euclid(8) * ud.rem_euclid(8)).rem_euclid(8)
}

/// `(u - 1)/2 mod 2` for an odd unit, read off the class mod 8.
fn eps2(class8: i64) -> i64 {
    match class8 % 4 {
        1 => 0,
        3 => 1,
        _ => unreachable!("odd class"),
    }
}

/// `(u^2 - 1)/8 mod 2` for an odd unit, read off the class mod 8.
fn omega2(class8: i64) -> i64 {
    match class8 {
        1 | 7 => 0,
        3 | 5 => 1,
        _ => unreachable!("odd class"),
    }
}

/// The Hilbert symbol `(a, b)` over `Q_p`, by the classical closed forms for
/// odd `p` and for `p = 2`.
pub fn hilbert(a: Rational64, b: Rational64, field: &PAdicField) -> Result<i32, PAdicError> {
    if a.is_zero() || b.is_zero() {
        return Err(PAdicError::ZeroInput);
    }
    let p = field.p;
    let (va, an, ad) = decompose(a, p);
    let (vb, bn, bd) = decompose(b, p);
    if p == 2 {
        let ca = class_mod8(an, ad);
        let cb = class_mod8(bn, bd);
        let exponent = eps2(ca) * eps2(cb) + va * omega2(cb) + vb * omega2(ca);
        Ok(if exponent % 2 == 0 { 1 } else { -1 })
    } else {
        let eps = ((p - 1) / 2) as i64;
        let mut sign = if (va * vb * eps) % 2 == 0 { 1 } else { -1 };
        if vb.rem_euclid(2) == 1 {
            sign *= legendre_unit(an, ad, p);
        }
        if va.rem_euclid(2) == 1 {
            sign *= legendre_unit(bn, bd, p);
        }
        Ok(sign)
    }
}

/// An element of the double cover of `GL` at determinant level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverElement {
    det: Rational64,
    sign: i32,
}

impl CoverElement {
    pub fn new(det: Rational64, sign: i32) -> Result<Self, PAdicError> {
        if det.is_zero() {
            return Err(PAdicError::ZeroDeterminant);
        }
        if sign != 1 && sign != -1 {
            return Err(PAdicError::BadSign);
        }
        Ok(CoverElement { det, sign })
    }

    pub fn identity() -> Self {
        CoverElement {
            det: Rational64::from_integer(1),
            sign: 1,
        }
    }

    pub fn det(&self) -> Rational64 {
        self.det
    }

    pub fn sign(&self) -> i32 {
        self.sign
    }

    pub fn inverse(&self, field: &PAdicField) -> CoverElement {
        let inv_det = Rational64::from_integer(1) / self.det;
        let twist = hilbert(self.det, inv_det, field).expect("nonzero determinants");
        CoverElement {
            det: inv_det,
            sign: self.sign * twist,
        }
    }
}

/// `(g_1, e_1)(g_2, e_2) = (g_1 g_2, e_1 e_2 (det g_1, det g_2)_F)`.
pub fn cover_mul(x: &CoverElement, y: &CoverElement, field: &PAdicField) -> CoverElement {
    let twist = hilbert(x.det, y.det, field).expect("nonzero determinants");
    CoverElement {
        det: x.det * y.det,
        sign: x.sign * y.sign * twist,
    }
}

/// `alpha((g, e)) = (det g, -1)_F`; independent of the sign component.
pub fn alpha_eval(x: &CoverElement, field: &PAdicField) -> i32 {
    hilbert(x.det, Rational64::from_integer(-1), field).expect("nonzero determinant")
}

/// Order of `eta`: 1 iff `-1` is a square in `Q_p` (so iff `p = 1 mod 4`).
pub fn eta_minus1_order(field: &PAdicField) -> Order {
    if field.p % 4 == 1 {
        Order::One
    } else {
        Order::Two
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u64) -> PAdicField {
        PAdicField::new(p).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    /// Independent solvability oracle: `(a, b) = 1` iff `z^2 = a x^2 + b y^2`
    /// has a nontrivial solution over `Q_p`. After reducing `a, b` to small
    /// integer representatives of their square classes, a primitive solution
    /// exists iff one exists mod `p^k` that admits a coordinate where the
    /// gradient is small enough for Newton's method to lift it (the gradient
    /// valuation `t` must satisfy `2t < k`). Representatives have valuation
    /// at most 1, so `k = 3` suffices for odd `p` and `k = 6` for `p = 2`.
    mod oracle {
        use super::*;

        /// Small integer representative of the square class of `x` in `Q_p`.
        pub fn square_class_rep(x: Rational64, p: u64) -> i64 {
            let (v, un, ud) = super::super::decompose(x, p);
            let vpart = if v.rem_euclid(2) == 1 { p as i64 } else { 1 };
            let upart = if p == 2 {
                super::super::class_mod8(un, ud)
            } else {
                if super::super::legendre_unit(un, ud, p) == 1 {
                    1
                } else {
                    nonresidue(p)
                }
            };
            vpart * upart
        }

        fn nonresidue(p: u64) -> i64 {
            (2..p as i64)
                .find(|&r| super::super::legendre(r, p) == -1)
                .expect("odd primes have non-residues")
        }

        fn val_mod(x: i64, p: i64, k: u32) -> i64 {
            // valuation capped at k
            if x == 0 {
                return k as i64;
            }
            let mut v = 0;
            let mut x = x;
            while x % p == 0 && v < k as i64 {
                x /= p;
                v += 1;
            }
            v
        }

        pub fn solvable(a: i64, b: i64, p: u64) -> bool {
            let k: u32 = if p == 2 { 6 } else { 3 };
            let p = p as i64;
            let modulus = p.pow(k);
            // square roots of each residue class
            let mut roots: Vec<Vec<i64>> = vec![Vec::new(); modulus as usize];
            for z in 0..modulus {
                roots[((z * z) % modulus) as usize].push(z);
            }
            for x in 0..modulus {
                for y in 0..modulus {
                    let target = (a * x * x + b * y * y).rem_euclid(modulus);
                    for &z in &roots[target as usize] {
                        if x % p == 0 && y % p == 0 && z % p == 0 {
                            continue; // not primitive
                        }
                        // Newton lift in one coordinate: 2 * val(dQ) < k
                        let grads = [2 * z, 2 * a * x, 2 * b * y];
                        if grads
                            .iter()
                            .any(|&g| g != 0 && 2 * val_mod(g, p, k) < k as i64)
                        {
                            return true;
                        }
                    }
                }
            }
            false
        }
    }

    #[test]
    fn one_is_always_a_square() {
        for p in [2u64, 3, 5, 7, 13] {
            let field = f(p);
            for a in [r(2, 1), r(-7, 3), r(5, 4), r(p as i64, 1)] {
                assert_eq!(hilbert(a, r(1, 1), &field).unwrap(), 1);
            }
        }
    }

    #[test]
    fn prime_against_nonresidue() {
        // (p, u) = -1 for odd p and u a unit non-residue
        assert_eq!(hilbert(r(3, 1), r(2, 1), &f(3)).unwrap(), -1); // 2 is a non-residue mod 3
        assert_eq!(hilbert(r(5, 1), r(2, 1), &f(5)).unwrap(), -1); // 2 is a non-residue mod 5
        assert_eq!(hilbert(r(7, 1), r(3, 1), &f(7)).unwrap(), -1); // 3 is a non-residue mod 7
    }

    #[test]
    fn minus_one_twice_over_q2() {
        assert_eq!(hilbert(r(-1, 1), r(-1, 1), &f(2)).unwrap(), -1);
    }

    #[test]
    fn zero_input_is_an_error() {
        assert_eq!(
            hilbert(r(0, 1), r(1, 1), &f(3)),
            Err(PAdicError::ZeroInput)
        );
    }

    #[test]
    fn composite_prime_rejected() {
        assert_eq!(PAdicField::new(6), Err(PAdicError::NotPrime(6)));
        assert_eq!(PAdicField::new(1), Err(PAdicError::NotPrime(1)));
        assert!(PAdicField::new(13).is_ok());
    }

    #[test]
    fn closed_forms_match_solvability_oracle() {
        // exhaustive over pairs of square-class representatives
        for p in [2u64, 3, 5] {
            let field = f(p);
            let reps: Vec<i64> = if p == 2 {
                vec![1, 3, 5, 7, 2, 6, 10, 14]
            } else {
                let nr = (2..p as i64)
                    .find(|&x| legendre(x, p) == -1)
                    .unwrap();
                vec![1, nr, p as i64, p as i64 * nr]
            };
            for &a in &reps {
                for &b in &reps {
                    let closed = hilbert(r(a, 1), r(b, 1), &field).unwrap();
                    let solvable = oracle::solvable(a, b, p);
                    assert_eq!(
                        closed == 1,
                        solvable,
                        "mismatch at (a, b) = ({a}, {b}) over Q_{p}"
                    );
                }
            }
        }
    }

    #[test]
    fn symbol_depends_only_on_square_classes() {
        let field = f(3);
        for (a, b) in [(r(2, 1), r(5, 1)), (r(-4, 9), r(7, 2)), (r(12, 5), r(-1, 6))] {
            let ra = oracle::square_class_rep(a, 3);
            let rb = oracle::square_class_rep(b, 3);
            assert_eq!(
                hilbert(a, b, &field).unwrap(),
                hilbert(r(ra, 1), r(rb, 1), &field).unwrap()
            );
        }
    }

    #[test]
    fn cover_identity_and_squares() {
        let field = f(3);
        let e = CoverElement::identity();
        let x = CoverElement::new(r(3, 1), -1).unwrap();
        assert_eq!(cover_mul(&e, &x, &field), x);
        assert_eq!(cover_mul(&x, &e, &field), x);
        // (d, e)^2 = (d^2, (d, d)) regardless of e; (3, 3)_3 = (3, -1)_3 = -1
        assert_eq!(hilbert(r(3, 1), r(3, 1), &field).unwrap(), -1);
        let sq = cover_mul(&x, &x, &field);
        assert_eq!(sq.det(), r(9, 1));
        assert_eq!(sq.sign(), -1);
        let y = CoverElement::new(r(3, 1), 1).unwrap();
        assert_eq!(cover_mul(&y, &y, &field).sign(), -1);
    }

    #[test]
    fn cover_inverses() {
        let field = f(2);
        for det in [r(2, 1), r(-1, 1), r(3, 4), r(-10, 7)] {
            for sign in [1, -1] {
                let x = CoverElement::new(det, sign).unwrap();
                assert_eq!(
                    cover_mul(&x, &x.inverse(&field), &field),
                    CoverElement::identity()
                );
            }
        }
    }

    #[test]
    fn central_mu2() {
        let field = f(5);
        let z = CoverElement::new(r(1, 1), -1).unwrap();
        for det in [r(2, 1), r(5, 1), r(-3, 2)] {
            let x = CoverElement::new(det, 1).unwrap();
            assert_eq!(cover_mul(&z, &x, &field), cover_mul(&x, &z, &field));
        }
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(
            alpha_eval(&CoverElement::new(r(1, 1), -1).unwrap(), &f(7)),
            1
        );
        assert_eq!(
            alpha_eval(&CoverElement::new(r(-1, 1), 1).unwrap(), &f(2)),
            -1
        );
    }

    #[test]
    fn eta_orders() {
        assert_eq!(eta_minus1_order(&f(5)), Order::One);
        assert_eq!(eta_minus1_order(&f(13)), Order::One);
        assert_eq!(eta_minus1_order(&f(3)), Order::Two);
        assert_eq!(eta_minus1_order(&f(7)), Order::Two);
        assert_eq!(eta_minus1_order(&f(2)), Order::Two);
    }

    #[test]
    fn eta_order_bridge() {
        // eta has order 1 iff alpha is trivial on a generating set of square
        // classes.
        for p in [2u64, 3, 5, 7, 13] {
            let field = f(p);
            let gens: Vec<Rational64> = if p == 2 {
                vec![r(-1, 1), r(2, 1), r(5, 1)]
            } else {
                let nr = (2..p as i64)
                    .find(|&x| legendre(x, p) == -1)
                    .unwrap();
                vec![r(p as i64, 1), r(nr, 1)]
            };
            let alpha_trivial = gens.iter().all(|&g| {
                alpha_eval(&CoverElement::new(g, 1).unwrap(), &field) == 1
            });
            assert_eq!(alpha_trivial, eta_minus1_order(&field) == Order::One);
        }
    }

    fn arb_rat() -> impl Strategy<Value = Rational64> {
        ((-24i64..=24).prop_filter("nonzero", |&n| n != 0), 1i64..=24)
            .prop_map(|(n, d)| Rational64::new(n, d))
    }

    fn arb_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 13])
    }

    proptest! {
        #[test]
        fn symmetry(a in arb_rat(), b in arb_rat(), p in arb_prime()) {
            let field = f(p);
            prop_assert_eq!(hilbert(a, b, &field).unwrap(), hilbert(b, a, &field).unwrap());
        }

        #[test]
        fn bimultiplicative(a1 in arb_rat(), a2 in arb_rat(), b in arb_rat(), p in arb_prime()) {
            let field = f(p);
            prop_assert_eq!(
                hilbert(a1 * a2, b, &field).unwrap(),
                hilbert(a1, b, &field).unwrap() * hilbert(a2, b, &field).unwrap()
            );
        }

        #[test]
        fn norm_relations(a in arb_rat(), p in arb_prime()) {
            let field = f(p);
            prop_assert_eq!(hilbert(a, -a, &field).unwrap(), 1);
            if a != Rational64::from_integer(1) {
                let one = Rational64::from_integer(1);
                prop_assert_eq!(hilbert(a, one - a, &field).unwrap(), 1);
            }
        }

        #[test]
        fn cover_associative(
            d1 in arb_rat(), d2 in arb_rat(), d3 in arb_rat(),
            s1 in prop::bool::ANY, s2 in prop::bool::ANY, s3 in prop::bool::ANY,
            p in arb_prime(),
        ) {
            let field = f(p);
            let sgn = |b: bool| if b { 1 } else { -1 };
            let x = CoverElement::new(d1, sgn(s1)).unwrap();
            let y = CoverElement::new(d2, sgn(s2)).unwrap();
            let z = CoverElement::new(d3, sgn(s3)).unwrap();
            prop_assert_eq!(
                cover_mul(&cover_mul(&x, &y, &field), &z, &field),
                cover_mul(&x, &cover_mul(&y, &z, &field), &field)
            );
        }

        #[test]
        fn alpha_is_multiplicative(
            d1 in arb_rat(), d2 in arb_rat(), p in arb_prime(),
        ) {
            let field = f(p);
            let x = CoverElement::new(d1, 1).unwrap();
            let y = CoverElement::new(d2, -1).unwrap();
            prop_assert_eq!(
                alpha_eval(&cover_mul(&x, &y, &field), &field),
                alpha_eval(&x, &field) * alpha_eval(&y, &field)
            );
        }
    }
}
