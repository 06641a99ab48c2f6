//! Weierstrass curves over `Q` and naive Frobenius traces.

use thiserror::Error;

use crate::arith::{is_prime, rem_euclid};
use crate::field::{FiniteField, PrimeField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EllipticError {
    #[error("the Weierstrass equation is singular")]
    Singular,
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("unknown curve label {0:?}")]
    UnknownLabel(alloc::string::String),
}

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct WeierstrassCurve {
    pub a1: i64,
    pub a2: i64,
    pub a3: i64,
    pub a4: i64,
    pub a6: i64,
    pub label: Option<&'static str>,
}

impl WeierstrassCurve {
    pub fn new(a: [i64; 5]) -> Result<Self, EllipticError> {
        let c = WeierstrassCurve { a1: a[0], a2: a[1], a3: a[2], a4: a[3], a6: a[4], label: None };
        if c.discriminant() == 0 {
            return Err(EllipticError::Singular);
        }
        Ok(c)
    }

    pub fn with_label(mut self, label: &'static str) -> Self {
        self.label = Some(label);
        self
    }

    pub fn a_invariants(&self) -> [i64; 5] {
        [self.a1, self.a2, self.a3, self.a4, self.a6]
    }

    /// `(b2, b4, b6, b8)`.
    pub fn b_invariants(&self) -> [i128; 4] {
        let [a1, a2, a3, a4, a6] = self.a_invariants().map(|x| x as i128);
        [
            a1 * a1 + 4 * a2,
            2 * a4 + a1 * a3,
            a3 * a3 + 4 * a6,
            a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4,
        ]
    }

    /// `(c4, c6)`.
    pub fn c_invariants(&self) -> [i128; 2] {
        let [b2, b4, b6, _] = self.b_invariants();
        [b2 * b2 - 24 * b4, -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6]
    }

    pub fn discriminant(&self) -> i128 {
        let [b2, b4, b6, b8] = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    pub fn has_good_reduction(&self, p: u64) -> bool {
        self.discriminant().rem_euclid(p as i128) != 0
    }

    /// Quadratic twist `y^2 = x^3 - 27 d^2 c4 x - 54 d^3 c6`.
    pub fn quadratic_twist(&self, d: i64) -> Result<Self, EllipticError> {
        let [c4, c6] = self.c_invariants();
        let d = d as i128;
        let a4 = i64::try_from(-27 * d * d * c4).map_err(|_| EllipticError::Singular)?;
        let a6 = i64::try_from(-54 * d * d * d * c6).map_err(|_| EllipticError::Singular)?;
        WeierstrassCurve::new([0, 0, 0, a4, a6])
    }
}

/// `p + 1 - #E(F_p)` from `-sum chi(4x^3 + b2 x^2 + 2 b4 x + b6)`.
pub fn ap_naive(curve: &WeierstrassCurve, p: u64) -> Result<i64, EllipticError> {
    if p == 2 || !is_prime(p) {
        return Err(EllipticError::NotOddPrime(p));
    }
    if !curve.has_good_reduction(p) {
        return Err(EllipticError::BadReduction(p));
    }
    let f = PrimeField::new(p).map_err(|_| EllipticError::NotOddPrime(p))?;
    let [b2, b4, b6, _] = curve.b_invariants().map(|b| rem_euclid((b % p as i128) as i64, p));
    let mut sum = 0i64;
    for x in 0..p {
        // Horner in u64; all operands < p < 2^31
        let mut y = 4 * x % p;
        y = (y + b2) * x % p;
        y = (y + 2 * b4) * x % p;
        y = (y + b6) % p;
        sum += f.quad_char(f.from_int(y as i64)) as i64;
    }
    Ok(-sum)
}

/// `a_p = 0 mod p`.
pub fn is_supersingular(curve: &WeierstrassCurve, p: u64) -> Result<bool, EllipticError> {
    Ok(ap_naive(curve, p)?.rem_euclid(p as i64) == 0)
}

pub const CURVE_14A4: WeierstrassCurve =
    WeierstrassCurve { a1: 1, a2: 0, a3: 1, a4: -11, a6: 12, label: Some("14.a4") };
pub const CURVE_14A1: WeierstrassCurve =
    WeierstrassCurve { a1: 1, a2: 0, a3: 1, a4: -2731, a6: -55146, label: Some("14.a1") };
pub const CURVE_350F1: WeierstrassCurve =
    WeierstrassCurve { a1: 1, a2: 1, a3: 1, a4: -68263, a6: -6_893_219, label: Some("350.f1") };

/// `y^2 = x(x^2 + 22x - 7)`, the elliptic curve attached to the fibre.
pub const FIBRE_CURVE: WeierstrassCurve =
    WeierstrassCurve { a1: 0, a2: 22, a3: 0, a4: -7, a6: 0, label: None };

/// Curves known by label.
pub const REGISTRY: [WeierstrassCurve; 3] = [CURVE_14A4, CURVE_14A1, CURVE_350F1];

pub fn curve_by_label(label: &str) -> Result<WeierstrassCurve, EllipticError> {
    REGISTRY
        .iter()
        .find(|c| c.label == Some(label))
        .copied()
        .ok_or_else(|| EllipticError::UnknownLabel(label.into()))
}

/// Compares `a_p` of the fibre curve with that of 14.a4.
pub fn model_consistency(p: u64) -> Result<bool, EllipticError> {
    Ok(ap_naive(&FIBRE_CURVE, p)? == ap_naive(&CURVE_14A4, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre5(p: u64) -> i64 {
        match p % 5 {
            1 | 4 => 1,
            0 => 0,
            _ => -1,
        }
    }

    #[test]
    fn invariants() {
        assert_eq!(CURVE_14A4.discriminant(), 98);
        assert_eq!(CURVE_14A1.discriminant(), 25088);
        assert_eq!(CURVE_14A1.c_invariants(), [131065, 47_449_331]);
        assert_eq!(CURVE_350F1.discriminant(), 392_000_000);
        assert_eq!(FIBRE_CURVE.discriminant(), 401_408);
        assert!(WeierstrassCurve::new([0, 0, 0, 0, 0]).is_err());
        assert_eq!(curve_by_label("350.f1").unwrap(), CURVE_350F1);
        assert!(curve_by_label("99.z1").is_err());
    }

    #[test]
    fn traces() {
        assert_eq!(ap_naive(&CURVE_14A4, 3).unwrap(), -2);
        assert_eq!(ap_naive(&CURVE_14A4, 113).unwrap(), 6);
        assert_eq!(ap_naive(&CURVE_14A4, 5).unwrap(), 0);
        assert_eq!(ap_naive(&CURVE_14A4, 7), Err(EllipticError::BadReduction(7)));
        assert_eq!(ap_naive(&CURVE_14A4, 2), Err(EllipticError::NotOddPrime(2)));
    }

    #[test]
    fn supersingularity() {
        assert!(is_supersingular(&CURVE_14A4, 5).unwrap());
        assert!(!is_supersingular(&CURVE_14A4, 3).unwrap());
        assert!(is_supersingular(&CURVE_14A1, 5).unwrap());
    }

    #[test]
    fn fibre_model() {
        assert_eq!(ap_naive(&FIBRE_CURVE, 3).unwrap(), -2);
        assert_eq!(ap_naive(&FIBRE_CURVE, 13).unwrap(), -4);
        assert_eq!(ap_naive(&FIBRE_CURVE, 29).unwrap(), -6);
        for p in crate::primes_up_to(113).into_iter().filter(|&p| p != 2 && p != 7) {
            assert!(model_consistency(p).unwrap(), "p = {p}");
        }
    }

    #[test]
    fn hasse_and_isogeny() {
        for p in crate::primes_up_to(200).into_iter().filter(|&p| p != 2 && p != 7) {
            let a = ap_naive(&CURVE_14A4, p).unwrap();
            assert!(a * a <= 4 * p as i64, "p = {p}");
            assert_eq!(a, ap_naive(&CURVE_14A1, p).unwrap());
        }
    }

    #[test]
    fn twist_by_five() {
        let twist = CURVE_14A1.quadratic_twist(5).unwrap();
        for p in crate::primes_up_to(100).into_iter().filter(|&p| ![2, 3, 5, 7].contains(&p)) {
            let a = ap_naive(&CURVE_14A1, p).unwrap();
            assert_eq!(a * legendre5(p), ap_naive(&CURVE_350F1, p).unwrap(), "p = {p}");
            assert_eq!(a * legendre5(p), ap_naive(&twist, p).unwrap(), "p = {p}");
        }
    }
}
