//! Prime fields `F_p` and their quadratic extensions `F_{p^2}`.
//!
//! Elements are stored as canonical indices: `0..p` for `F_p`, and
//! `e + f * p` for the element `e + f*x` of `F_{p^2} = F_p[x]/(x^2 + b x + c)`.
//! The index order is the total order used by symmetry-reduced enumeration.
//! Both fields carry a precomputed bitset of nonzero squares so the quadratic
//! character is a single lookup.

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::arith::{is_prime, pow_mod, rem_euclid};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("prime {0} is too large for this field representation")]
    TooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("x^2 + {b}x + {c} is reducible over F_{p}")]
    ReducibleModulus { p: u64, b: u64, c: u64 },
    #[error("index {index} is not an element of a field of order {order}")]
    OutOfRange { index: u64, order: u64 },
}

/// Canonical index of a field element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    pub const fn from_index(index: u32) -> Self {
        FieldElement(index)
    }

    pub const fn index(self) -> u32 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Bitset marking the nonzero squares of a field by canonical index.
#[derive(Clone, Debug)]
pub struct SquareTable {
    bits: Vec<u64>,
}

impl SquareTable {
    fn build(order: usize, mut square: impl FnMut(u32) -> u32) -> Self {
        let mut bits = vec![0u64; order.div_ceil(64)];
        for i in 1..order as u32 {
            let s = square(i) as usize;
            bits[s / 64] |= 1 << (s % 64);
        }
        SquareTable { bits }
    }

    #[inline]
    pub fn contains(&self, index: u32) -> bool {
        let i = index as usize;
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }
}

/// Common interface of `F_p` and `F_{p^2}`.
pub trait FiniteField {
    fn characteristic(&self) -> u32;
    /// 1 for `F_p`, 2 for `F_{p^2}`.
    fn degree(&self) -> u32;
    fn order(&self) -> u64;

    /// Components `(e, f)` of `e + f*x`; `f` is always 0 in a prime field.
    fn components(&self, a: FieldElement) -> (u32, u32);
    fn from_components(&self, e: u32, f: u32) -> FieldElement;

    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement;
    fn neg(&self, a: FieldElement) -> FieldElement;
    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement;
    fn squares(&self) -> &SquareTable;

    fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    fn element(&self, index: u64) -> Result<FieldElement, FieldError> {
        if index < self.order() {
            Ok(FieldElement(index as u32))
        } else {
            Err(FieldError::OutOfRange { index, order: self.order() })
        }
    }

    fn from_int(&self, n: i64) -> FieldElement {
        self.from_components(rem_euclid(n, self.characteristic() as u64) as u32, 0)
    }

    fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    fn pow(&self, a: FieldElement, mut exp: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via `a^(q-2)`.
    fn invert(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Quadratic character by table lookup: 0, +1 on nonzero squares, -1 otherwise.
    #[inline]
    fn quad_char(&self, a: FieldElement) -> i8 {
        if a.is_zero() {
            0
        } else if self.squares().contains(a.0) {
            1
        } else {
            -1
        }
    }

    /// Quadratic character by Euler's criterion `a^((q-1)/2)`; independent of
    /// the square table.
    fn quad_char_euler(&self, a: FieldElement) -> i8 {
        if a.is_zero() {
            return 0;
        }
        let r = self.pow(a, (self.order() - 1) / 2);
        if r == self.one() {
            1
        } else {
            -1
        }
    }

    /// The Frobenius `a -> a^p`.
    fn frobenius(&self, a: FieldElement) -> FieldElement {
        self.pow(a, self.characteristic() as u64)
    }

    fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order() as u32).map(FieldElement)
    }

    fn nonzero_elements(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.order() as u32).map(FieldElement)
    }
}

fn check_odd_prime(p: u64) -> Result<(), FieldError> {
    if p == 2 {
        return Err(FieldError::CharacteristicTwo);
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    Ok(())
}

/// The prime field `F_p` for an odd prime `p < 2^31`.
#[derive(Clone, Debug)]
pub struct PrimeField {
    p: u32,
    squares: SquareTable,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        check_odd_prime(p)?;
        if p >= 1 << 31 {
            return Err(FieldError::TooLarge(p));
        }
        let pp = p;
        let squares = SquareTable::build(p as usize, |i| ((i as u64 * i as u64) % pp) as u32);
        Ok(PrimeField { p: p as u32, squares })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Least quadratic nonresidue mod `p`.
    pub fn least_nonresidue(&self) -> u32 {
        (2..self.p).find(|&n| !self.squares.contains(n)).expect("odd prime has a nonresidue")
    }
}

impl FiniteField for PrimeField {
    fn characteristic(&self) -> u32 {
        self.p
    }

    fn degree(&self) -> u32 {
        1
    }

    fn order(&self) -> u64 {
        self.p as u64
    }

    fn components(&self, a: FieldElement) -> (u32, u32) {
        (a.0, 0)
    }

    fn from_components(&self, e: u32, _f: u32) -> FieldElement {
        FieldElement(e % self.p)
    }

    #[inline]
    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let s = a.0 as u64 + b.0 as u64;
        let p = self.p as u64;
        FieldElement(if s >= p { s - p } else { s } as u32)
    }

    #[inline]
    fn neg(&self, a: FieldElement) -> FieldElement {
        if a.0 == 0 {
            a
        } else {
            FieldElement(self.p - a.0)
        }
    }

    #[inline]
    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    fn squares(&self) -> &SquareTable {
        &self.squares
    }

    fn invert(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(FieldElement(pow_mod(a.0 as u64, self.p as u64 - 2, self.p as u64) as u32))
    }
}

/// `F_{p^2} = F_p[x]/(x^2 + b x + c)`.
#[derive(Clone, Debug)]
pub struct QuadExtField {
    p: u32,
    b: u32,
    c: u32,
    squares: SquareTable,
}

impl QuadExtField {
    /// Largest characteristic accepted; keeps `p^2` indices and the square
    /// table comfortably in memory.
    pub const MAX_CHARACTERISTIC: u64 = 46_337;

    /// Builds `F_{p^2}` with the standard modulus: `x^2 + x + 1` when
    /// `p = 2 mod 3`, otherwise `x^2 - n` for the least nonresidue `n`.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        check_odd_prime(p)?;
        if p > Self::MAX_CHARACTERISTIC {
            return Err(FieldError::TooLarge(p));
        }
        let (b, c) = if p % 3 == 2 {
            (1, 1)
        } else {
            let n = PrimeField::new(p)?.least_nonresidue();
            (0, p as u32 - n)
        };
        Ok(Self::with_modulus_unchecked(p as u32, b, c))
    }

    /// Builds `F_{p^2}` with modulus `x^2 + b x + c`, which must be irreducible.
    pub fn with_modulus(p: u64, b: u64, c: u64) -> Result<Self, FieldError> {
        check_odd_prime(p)?;
        if p > Self::MAX_CHARACTERISTIC {
            return Err(FieldError::TooLarge(p));
        }
        let (b, c) = ((b % p) as u32, (c % p) as u32);
        if has_root(p as u32, b, c) {
            return Err(FieldError::ReducibleModulus { p, b: b as u64, c: c as u64 });
        }
        Ok(Self::with_modulus_unchecked(p as u32, b, c))
    }

    fn with_modulus_unchecked(p: u32, b: u32, c: u32) -> Self {
        let mut field = QuadExtField { p, b, c, squares: SquareTable { bits: Vec::new() } };
        let q = p as usize * p as usize;
        let squares = SquareTable::build(q, |i| {
            let a = FieldElement(i);
            field.mul(a, a).0
        });
        field.squares = squares;
        field
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Modulus `(b, c)` of `x^2 + b x + c`, coefficients in `0..p`.
    pub fn modulus(&self) -> (u32, u32) {
        (self.b, self.c)
    }

    /// Embedding of `F_p`.
    pub fn from_base(&self, a: u32) -> FieldElement {
        FieldElement(a % self.p)
    }
}

fn has_root(p: u32, b: u32, c: u32) -> bool {
    let p64 = p as u64;
    (0..p64).any(|x| (x * x + b as u64 * x + c as u64) % p64 == 0)
}

impl FiniteField for QuadExtField {
    fn characteristic(&self) -> u32 {
        self.p
    }

    fn degree(&self) -> u32 {
        2
    }

    fn order(&self) -> u64 {
        self.p as u64 * self.p as u64
    }

    #[inline]
    fn components(&self, a: FieldElement) -> (u32, u32) {
        (a.0 % self.p, a.0 / self.p)
    }

    #[inline]
    fn from_components(&self, e: u32, f: u32) -> FieldElement {
        FieldElement(e % self.p + (f % self.p) * self.p)
    }

    fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p;
        let (ae, af) = self.components(a);
        let (be, bf) = self.components(b);
        let e = ae + be;
        let f = af + bf;
        FieldElement((if e >= p { e - p } else { e }) + (if f >= p { f - p } else { f }) * p)
    }

    fn neg(&self, a: FieldElement) -> FieldElement {
        let (e, f) = self.components(a);
        let p = self.p;
        FieldElement((p - e) % p + ((p - f) % p) * p)
    }

    fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.p as u64;
        let (ae, af) = self.components(a);
        let (be, bf) = self.components(b);
        let (ae, af, be, bf) = (ae as u64, af as u64, be as u64, bf as u64);
        // x^2 = -b x - c
        let ff = af * bf % p;
        let e = (ae * be + (p - self.c as u64) * ff) % p;
        let f = (ae * bf + af * be + (p - self.b as u64) * ff) % p;
        FieldElement((e + f * p) as u32)
    }

    fn squares(&self) -> &SquareTable {
        &self.squares
    }
}
