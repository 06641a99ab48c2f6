//! Point counts of the compactified Hulek-Verrill threefold over `F_p` and
//! `F_{p^2}` through the character sum
//!
//! ```text
//! #X(F_q) = 48 q^2 + 46 q + 14 + sum_{x,y,z in F_q^*} (chi(D(x,y,z)) + 1)
//! D = ((1+x+y+z)(1+1/x+1/y+1/z) - 1 - t)^2 - 4 t
//! ```
//!
//! where `t = 1/phi` is the sixth coordinate of `a = (1:1:1:1:1:t)`.
//!
//! The production path ([`CountKernel`]) enumerates multisets `x <= y <= z` in
//! canonical index order with orbit weights 1/3/6, one outer value of `x` at a
//! time, so that callers can split the work into chunks and checkpoint them.
//! [`char_sum_ordered`] is the plain loop over all ordered triples and is kept
//! as the reference the kernel is tested against.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;
use core::str::FromStr;

use thiserror::Error;

use crate::arith::{is_prime, prime_factors, rem_euclid};
use crate::field::{FieldElement, FieldError, FiniteField, PrimeField, QuadExtField};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("t = {t} has bad reduction at p = {p}")]
    BadReduction { p: u64, t: Parameter },
    #[error("power must be 1 or 2, got {0}")]
    UnsupportedPower(u32),
    #[error("p = {0} is outside the range supported by the counting kernel")]
    PrimeTooLarge(u64),
    #[error("arithmetic overflow while accumulating the count")]
    Overflow,
    #[error("x, y and z must be nonzero")]
    ZeroCoordinate,
}

/// The fibre parameter `t = 1/phi` as an exact rational `num/den`, `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Parameter {
    num: i64,
    den: i64,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid parameter {0:?}: expected an integer or num/den with den != 0")]
pub struct ParseParameterError(pub alloc::string::String);

impl Parameter {
    /// `t = -7`, i.e. `phi = -1/7`.
    pub const MINUS_SEVEN: Parameter = Parameter { num: -7, den: 1 };

    /// `None` when `den == 0`.
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let sign = if den < 0 { -1 } else { 1 };
        Some(Parameter { num: sign * num / g, den: sign * den / g })
    }

    pub fn integer(n: i64) -> Self {
        Parameter { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    /// Reduction mod `p`, or `None` if `p` divides the denominator.
    pub fn reduce(&self, p: u64) -> Option<u64> {
        let den = rem_euclid(self.den, p);
        if den == 0 {
            return None;
        }
        let inv = crate::arith::pow_mod(den, p - 2, p);
        Some((rem_euclid(self.num, p) as u128 * inv as u128 % p as u128) as u64)
    }
}

impl Default for Parameter {
    fn default() -> Self {
        Parameter::MINUS_SEVEN
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Parameter {
    type Err = ParseParameterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseParameterError(s.into());
        let (num, den) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| err())?, d.trim().parse().map_err(|_| err())?),
            None => (s.trim().parse().map_err(|_| err())?, 1),
        };
        Parameter::new(num, den).ok_or_else(err)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Rejects `p = 2`, composite `p`, and primes where `t` is undefined or meets
/// the singular values `t in {0, 1, 9, 25, oo}` (`phi in {oo, 1, 1/9, 1/25, 0}`).
pub fn check_good_reduction(p: u64, t: Parameter) -> Result<u64, CountError> {
    if p == 2 {
        return Err(CountError::BadReduction { p, t });
    }
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p).into());
    }
    let r = t.reduce(p).ok_or(CountError::BadReduction { p, t })?;
    if [0u64, 1, 9, 25].iter().any(|&s| s % p == r) {
        return Err(CountError::BadReduction { p, t });
    }
    Ok(r)
}

/// Outcome of the character sum over `F_q`, `q = p^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CountResult {
    /// `S = sum chi(D)` over all ordered nonzero triples.
    pub char_sum: i64,
    /// `S + (q-1)^3`.
    pub solution_sum: u64,
    /// `#X(F_q) = 48 q^2 + 46 q + 14 + solution_sum`.
    pub total: u64,
}

impl CountResult {
    pub fn from_solution_sum(q: u64, solution_sum: u64) -> Result<Self, CountError> {
        let cube = (q - 1).checked_pow(3).ok_or(CountError::Overflow)?;
        if solution_sum > 2 * cube {
            return Err(CountError::Overflow);
        }
        let total = boundary_constant(q).checked_add(solution_sum).ok_or(CountError::Overflow)?;
        Ok(CountResult { char_sum: solution_sum as i64 - cube as i64, solution_sum, total })
    }
}

/// `48 q^2 + 46 q + 14`.
pub fn boundary_constant(q: u64) -> u64 {
    48 * q * q + 46 * q + 14
}

/// `D(x,y,z) = ((1+x+y+z)(1+1/x+1/y+1/z) - 1 - t)^2 - 4t` in any of the fields.
pub fn discriminant<F: FiniteField>(
    field: &F,
    x: FieldElement,
    y: FieldElement,
    z: FieldElement,
    t: FieldElement,
) -> Result<FieldElement, CountError> {
    if x.is_zero() || y.is_zero() || z.is_zero() {
        return Err(CountError::ZeroCoordinate);
    }
    let one = field.one();
    let a = field.add(field.add(one, x), field.add(y, z));
    let (xi, yi, zi) = (field.invert(x)?, field.invert(y)?, field.invert(z)?);
    let b = field.add(field.add(one, xi), field.add(yi, zi));
    let m = field.sub(field.sub(field.mul(a, b), one), t);
    let four_t = field.mul(field.from_int(4), t);
    Ok(field.sub(field.mul(m, m), four_t))
}

/// `tr(Frob_p^-power | H^3)` from the point count: `1 + p^3 + 45(p + p^2) - #X`
/// for power 1, `1 + p^6 + 45(p^2 + p^4) - #X` for power 2.
pub fn trace_h3(p: u64, power: u32, count: u64) -> Result<i64, CountError> {
    let q = match power {
        1 => p,
        2 => p * p,
        other => return Err(CountError::UnsupportedPower(other)),
    } as i128;
    let t = 1 + q * q * q + 45 * (q + q * q) - count as i128;
    i64::try_from(t).map_err(|_| CountError::Overflow)
}

/// `S == -(a_p + 5 p b_p + 4 p + 12)`.
pub fn s_identity_check(p: u64, a_p: i64, b_p: i64, char_sum: i64) -> bool {
    let p = p as i64;
    char_sum == -(a_p + 5 * p * b_p + 4 * p + 12)
}

/// Either field, for the generic reference paths.
pub enum AnyField {
    Prime(PrimeField),
    Quad(QuadExtField),
}

/// `F_p` for power 1, `F_{p^2}` with the standard modulus for power 2.
pub fn field_for(p: u64, power: u32) -> Result<AnyField, CountError> {
    match power {
        1 => Ok(AnyField::Prime(PrimeField::new(p)?)),
        2 => Ok(AnyField::Quad(QuadExtField::new(p)?)),
        other => Err(CountError::UnsupportedPower(other)),
    }
}

/// Plain loop over all `(q-1)^3` ordered triples; reference implementation.
/// Uses Euler's criterion rather than the square table.
pub fn char_sum_ordered(p: u64, power: u32, t: Parameter) -> Result<CountResult, CountError> {
    let t_mod = check_good_reduction(p, t)?;
    match field_for(p, power)? {
        AnyField::Prime(f) => ordered_sum(&f, t_mod),
        AnyField::Quad(f) => ordered_sum(&f, t_mod),
    }
}

fn ordered_sum<F: FiniteField>(field: &F, t_mod: u64) -> Result<CountResult, CountError> {
    let t = field.from_int(t_mod as i64);
    let mut sum = 0u64;
    for x in field.nonzero_elements() {
        for y in field.nonzero_elements() {
            for z in field.nonzero_elements() {
                let d = discriminant(field, x, y, z, t)?;
                sum += (field.quad_char_euler(d) + 1) as u64;
            }
        }
    }
    CountResult::from_solution_sum(field.order(), sum)
}

/// Orbit weights `(z > y, z == y)` of a multiset with smallest entries `x <= y`.
#[inline]
fn orbit_weights(x: u32, y: u32) -> (u64, u64) {
    if x == y {
        (3, 1)
    } else {
        (6, 3)
    }
}

/// Precomputed tables for the weighted multiset enumeration over `F_q`.
///
/// Elements are handled as packed components `e | f << 16`; products go
/// through discrete-log tables, so the inner loop is table lookups and adds.
pub struct CountKernel {
    p: u32,
    power: u32,
    q: u32,
    t: Parameter,
    modulus: Option<(u32, u32)>,
    /// packed components by canonical index
    packed: Vec<u32>,
    /// `(log z, log z^-1)` by canonical index; entry 0 unused
    logs: Vec<(u32, u32)>,
    /// `exp[k]` = packed `g^k` for `k < 2(q-1)`, zero above
    exp: Vec<u32>,
    /// `v mod p` for `v < 3p`
    reduce: Vec<u32>,
    /// `chi(v^2 - 4t) + 1` by canonical index of `v`
    weight: Vec<u8>,
    /// packed `-t`
    minus_t: u32,
}

impl CountKernel {
    /// Largest characteristic the packed kernel supports.
    pub const MAX_P: u64 = 21_844;
    /// Largest field order the kernel tables are built for.
    pub const MAX_Q: u64 = 1 << 24;

    pub fn new(p: u64, power: u32, t: Parameter) -> Result<Self, CountError> {
        let t_mod = check_good_reduction(p, t)?;
        let q = match power {
            1 => p,
            2 => p.checked_mul(p).ok_or(CountError::PrimeTooLarge(p))?,
            other => return Err(CountError::UnsupportedPower(other)),
        };
        if p > Self::MAX_P || q > Self::MAX_Q {
            return Err(CountError::PrimeTooLarge(p));
        }
        match field_for(p, power)? {
            AnyField::Prime(f) => Ok(Self::build(&f, t, t_mod, None)),
            AnyField::Quad(f) => {
                let m = f.modulus();
                Ok(Self::build(&f, t, t_mod, Some(m)))
            }
        }
    }

    fn build<F: FiniteField>(field: &F, t: Parameter, t_mod: u64, modulus: Option<(u32, u32)>) -> Self {
        let p = field.characteristic();
        let q = field.order() as u32;
        let pack = |a: FieldElement| {
            let (e, f) = field.components(a);
            e | f << 16
        };
        let packed: Vec<u32> = field.elements().map(pack).collect();

        let n = q - 1;
        let factors = prime_factors(n as u64);
        let g = field
            .nonzero_elements()
            .find(|&g| factors.iter().all(|&r| field.pow(g, n as u64 / r) != field.one()))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; 3 * n as usize];
        let mut logs = vec![(0u32, 0u32); q as usize];
        let mut cur = field.one();
        for k in 0..n {
            exp[k as usize] = packed[cur.index() as usize];
            exp[(k + n) as usize] = packed[cur.index() as usize];
            logs[cur.index() as usize] = (k, (n - k) % n);
            cur = field.mul(cur, g);
        }

        let reduce = (0..3 * p).map(|v| v % p).collect();
        let tt = field.from_int(t_mod as i64);
        let four_t = field.mul(field.from_int(4), tt);
        let weight = field
            .elements()
            .map(|v| (field.quad_char(field.sub(field.mul(v, v), four_t)) + 1) as u8)
            .collect();
        let minus_t = packed[field.neg(tt).index() as usize];

        CountKernel { p, power: field.degree(), q, t, modulus, packed, logs, exp, reduce, weight, minus_t }
    }

    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn q(&self) -> u64 {
        self.q as u64
    }

    pub fn parameter(&self) -> Parameter {
        self.t
    }

    /// Modulus `(b, c)` of `x^2 + b x + c` for power 2.
    pub fn modulus(&self) -> Option<(u32, u32)> {
        self.modulus
    }

    /// Canonical indices the outermost coordinate ranges over.
    pub fn outer_range(&self) -> Range<u32> {
        1..self.q
    }

    #[inline]
    fn index_of(&self, packed: u32) -> usize {
        let e = self.reduce[(packed & 0xffff) as usize];
        let f = self.reduce[(packed >> 16) as usize];
        (e + f * self.p) as usize
    }

    #[inline]
    fn add_packed(&self, a: u32, b: u32) -> u32 {
        let s = a + b;
        let e = self.reduce[(s & 0xffff) as usize];
        let f = self.reduce[(s >> 16) as usize];
        e | f << 16
    }

    #[inline]
    fn log_or_zero(&self, index: usize) -> u32 {
        if index == 0 {
            2 * (self.q - 1)
        } else {
            self.logs[index].0
        }
    }

    #[inline]
    fn mul_packed(&self, a: usize, b: usize) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.logs[a].0 + self.logs[b].0) as usize]
        }
    }

    /// Weighted solution count of all multisets whose smallest element has
    /// canonical index `x`; summing over `x in 1..q` gives the full
    /// `sum (chi(D) + 1)` over ordered triples.
    pub fn outer_sum(&self, x: u32) -> u64 {
        debug_assert!(x >= 1 && x < self.q);
        let one = self.packed[1];
        let px = self.packed[x as usize];
        let pxi = self.exp[self.logs[x as usize].1 as usize];
        let a_x = self.add_packed(one, px);
        let b_x = self.add_packed(one, pxi);
        let mut total = 0u64;
        for y in x..self.q {
            let py = self.packed[y as usize];
            let pyi = self.exp[self.logs[y as usize].1 as usize];
            let a0 = self.index_of(a_x + py);
            let b0 = self.index_of(b_x + pyi);
            // val(z) = a0*b0 - t + b0*z + a0/z
            let c = self.add_packed(self.mul_packed(a0, b0), self.minus_t);
            let la = self.log_or_zero(a0) as usize;
            let lb = self.log_or_zero(b0) as usize;
            let (w_gt, w_eq) = orbit_weights(x, y);

            let val = |(lz, lzi): (u32, u32)| {
                let s = c + self.exp[lb + lz as usize] + self.exp[la + lzi as usize];
                self.weight[self.index_of(s)] as u64
            };
            let eq = val(self.logs[y as usize]);
            let gt: u64 = self.logs[y as usize + 1..].iter().map(|&l| val(l)).sum();
            total += w_gt * gt + w_eq * eq;
        }
        total
    }

    /// Sum of [`Self::outer_sum`] over a range of outer indices.
    pub fn range_sum(&self, range: Range<u32>) -> u64 {
        range.map(|x| self.outer_sum(x)).sum()
    }

    pub fn finish(&self, solution_sum: u64) -> Result<CountResult, CountError> {
        CountResult::from_solution_sum(self.q as u64, solution_sum)
    }
}

/// A partition of the outer indices `1..q` into consecutive chunks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chunking {
    ranges: Vec<Range<u32>>,
}

impl Chunking {
    /// One chunk per outer value over `F_p`; over `F_{p^2}`, one chunk per
    /// value of the `x`-coordinate `f` of the outer element (`p` chunks).
    pub fn standard(kernel: &CountKernel) -> Self {
        let (p, q) = (kernel.p, kernel.q);
        let ranges = if kernel.power == 1 {
            (1..q).map(|x| x..x + 1).collect()
        } else {
            (0..p).map(|f| (f * p).max(1)..(f + 1) * p).collect()
        };
        Chunking { ranges }
    }

    /// `n` chunks of (nearly) equal index width.
    pub fn uniform(q: u64, n: usize) -> Self {
        let len = (q - 1) as usize;
        let n = n.clamp(1, len.max(1));
        let ranges = (0..n)
            .map(|i| {
                let lo = 1 + (i * len / n) as u32;
                let hi = 1 + ((i + 1) * len / n) as u32;
                lo..hi
            })
            .collect();
        Chunking { ranges }
    }

    /// Validates that `ranges` partition `1..q` in order.
    pub fn from_ranges(q: u64, ranges: Vec<Range<u32>>) -> Option<Self> {
        let mut next = 1u32;
        for r in &ranges {
            if r.start != next || r.end <= r.start {
                return None;
            }
            next = r.end;
        }
        (next as u64 == q).then_some(Chunking { ranges })
    }

    pub fn ranges(&self) -> &[Range<u32>] {
        &self.ranges
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Single-threaded weighted count.
pub fn char_sum(p: u64, power: u32, t: Parameter) -> Result<CountResult, CountError> {
    let kernel = CountKernel::new(p, power, t)?;
    let sum = kernel.range_sum(kernel.outer_range());
    kernel.finish(sum)
}

/// `#X(F_{p^power})` for the fibre `t`.
pub fn count_xbar(p: u64, power: u32, t: Parameter) -> Result<u64, CountError> {
    Ok(char_sum(p, power, t)?.total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_parsing() {
        assert_eq!("-7".parse::<Parameter>().unwrap(), Parameter::MINUS_SEVEN);
        assert_eq!("14/-2".parse::<Parameter>().unwrap(), Parameter::MINUS_SEVEN);
        let t: Parameter = "1/9".parse().unwrap();
        assert_eq!((t.num(), t.den()), (1, 9));
        assert_eq!(alloc::format!("{t}"), "1/9");
        assert!("1/0".parse::<Parameter>().is_err());
        assert!("x".parse::<Parameter>().is_err());
    }

    #[test]
    fn bad_reduction() {
        let t = Parameter::MINUS_SEVEN;
        assert!(check_good_reduction(2, t).is_err());
        assert!(check_good_reduction(7, t).is_err());
        for p in [3, 5, 11, 13, 113] {
            assert!(check_good_reduction(p, t).is_ok());
        }
        // 1/9 = 4 = 9 mod 5
        assert!(matches!(
            check_good_reduction(5, "1/9".parse().unwrap()),
            Err(CountError::BadReduction { p: 5, .. })
        ));
        assert!(check_good_reduction(3, Parameter::new(1, 3).unwrap()).is_err());
        assert!(check_good_reduction(9, t).is_err());
    }

    #[test]
    fn discriminant_examples() {
        let f3 = PrimeField::new(3).unwrap();
        let one = f3.one();
        let t = f3.from_int(-7);
        assert_eq!(discriminant(&f3, one, one, one, t).unwrap(), f3.from_int(2));
        assert_eq!(discriminant(&f3, FieldElement::ZERO, one, one, t), Err(CountError::ZeroCoordinate));
        // matches the printed form ((1+x+y+z)(1/x+1/y+1/z+1)+6)^2+28 at t = -7
        let f = QuadExtField::new(11).unwrap();
        let t = f.from_int(-7);
        for (i, j, k) in [(1u32, 5, 7), (13, 29, 100), (3, 3, 120)] {
            let (x, y, z) = (FieldElement::from_index(i), FieldElement::from_index(j), FieldElement::from_index(k));
            let a = f.add(f.add(f.one(), x), f.add(y, z));
            let b = f.add(
                f.add(f.one(), f.invert(x).unwrap()),
                f.add(f.invert(y).unwrap(), f.invert(z).unwrap()),
            );
            let m = f.add(f.mul(a, b), f.from_int(6));
            let printed = f.add(f.mul(m, m), f.from_int(28));
            assert_eq!(discriminant(&f, x, y, z, t).unwrap(), printed);
        }
    }

    #[test]
    fn trace_examples() {
        assert_eq!(trace_h3(3, 1, 590).unwrap(), -22);
        assert_eq!(trace_h3(19, 1, 23690).unwrap(), 270);
        assert_eq!(trace_h3(113, 2, 2_089_302_575_920).unwrap(), -13_117_460);
        assert!(trace_h3(3, 3, 0).is_err());
    }

    #[test]
    fn s_identity_examples() {
        assert!(s_identity_check(3, 8, -2, -2));
        assert!(s_identity_check(11, -28, 0, -28));
        assert!(!s_identity_check(3, 8, -2, -3));
        assert!(s_identity_check(113, 1378, 6, -5232));
    }

    #[test]
    fn small_counts() {
        let r = char_sum(3, 1, Parameter::MINUS_SEVEN).unwrap();
        assert_eq!(r, CountResult { char_sum: -2, solution_sum: 6, total: 590 });
        assert_eq!(count_xbar(11, 1, Parameter::MINUS_SEVEN).unwrap(), 7300);
        assert_eq!(count_xbar(3, 2, Parameter::MINUS_SEVEN).unwrap(), 4860);
        assert!(matches!(char_sum(7, 1, Parameter::MINUS_SEVEN), Err(CountError::BadReduction { .. })));
        assert!(matches!(char_sum(3, 3, Parameter::MINUS_SEVEN), Err(CountError::UnsupportedPower(3))));
    }

    #[test]
    fn weighted_matches_ordered_loop() {
        let ts = [Parameter::MINUS_SEVEN, Parameter::integer(3), Parameter::new(2, 5).unwrap()];
        for p in [3u64, 5, 11, 13] {
            for t in ts {
                if check_good_reduction(p, t).is_err() {
                    continue;
                }
                assert_eq!(char_sum(p, 1, t).unwrap(), char_sum_ordered(p, 1, t).unwrap(), "p={p} t={t}");
            }
        }
        for p in [3u64, 5] {
            assert_eq!(
                char_sum(p, 2, Parameter::MINUS_SEVEN).unwrap(),
                char_sum_ordered(p, 2, Parameter::MINUS_SEVEN).unwrap()
            );
        }
    }

    #[test]
    fn chunking_is_a_partition() {
        let k = CountKernel::new(5, 2, Parameter::MINUS_SEVEN).unwrap();
        let c = Chunking::standard(&k);
        assert_eq!(c.len(), 5);
        assert!(Chunking::from_ranges(25, c.ranges().to_vec()).is_some());
        let u = Chunking::uniform(25, 7);
        assert!(Chunking::from_ranges(25, u.ranges().to_vec()).is_some());
        assert!(Chunking::from_ranges(25, alloc::vec![1..10, 11..25]).is_none());
        let total: u64 = c.ranges().iter().map(|r| k.range_sum(r.clone())).sum();
        let other: u64 = u.ranges().iter().map(|r| k.range_sum(r.clone())).sum();
        assert_eq!(total, other);
        assert_eq!(k.finish(total).unwrap(), char_sum_ordered(5, 2, Parameter::MINUS_SEVEN).unwrap());
    }

    #[test]
    fn weil_bound() {
        for p in crate::primes_up_to(60).into_iter().filter(|&p| check_good_reduction(p, Parameter::MINUS_SEVEN).is_ok()) {
            let t1 = trace_h3(p, 1, count_xbar(p, 1, Parameter::MINUS_SEVEN).unwrap()).unwrap();
            assert!((t1 as f64).abs() <= 12.0 * (p as f64).powf(1.5), "p={p} t1={t1}");
        }
        for p in [3u64, 5, 11] {
            let t2 = trace_h3(p, 2, count_xbar(p, 2, Parameter::MINUS_SEVEN).unwrap()).unwrap();
            assert!(t2.unsigned_abs() <= 12 * p.pow(3), "p={p} t2={t2}");
        }
    }

    fn rational_zero_triples(p: u64, t: Parameter) -> u64 {
        let f = PrimeField::new(p).unwrap();
        let tt = f.from_int(t.reduce(p).unwrap() as i64);
        let mut n = 0;
        for x in f.nonzero_elements() {
            for y in f.nonzero_elements() {
                for z in f.nonzero_elements() {
                    n += discriminant(&f, x, y, z, tt).unwrap().is_zero() as u64;
                }
            }
        }
        n
    }

    #[test]
    fn frobenius_parity() {
        for p in [3u64, 5, 11, 13] {
            let r = char_sum(p, 2, Parameter::MINUS_SEVEN).unwrap();
            assert_eq!(r.solution_sum % 2, rational_zero_triples(p, Parameter::MINUS_SEVEN) % 2, "p={p}");
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn chunking_does_not_change_total(n in 1usize..40, t in -20i64..20, pi in 0usize..4) {
            let p = [5u64, 11, 13, 17][pi];
            let t = Parameter::integer(t);
            proptest::prop_assume!(check_good_reduction(p, t).is_ok());
            let k = CountKernel::new(p, 1, t).unwrap();
            let whole = k.range_sum(k.outer_range());
            let split: u64 = Chunking::uniform(k.q(), n).ranges().iter().map(|r| k.range_sum(r.clone())).sum();
            proptest::prop_assert_eq!(whole, split);
        }

        #[test]
        fn kernel_matches_reference(t in -30i64..30, d in 1i64..6, pi in 0usize..3) {
            let p = [3u64, 5, 7][pi];
            let t = Parameter::new(t, d).unwrap();
            proptest::prop_assume!(check_good_reduction(p, t).is_ok());
            proptest::prop_assert_eq!(char_sum(p, 1, t).unwrap(), char_sum_ordered(p, 1, t).unwrap());
            if p == 3 {
                proptest::prop_assert_eq!(char_sum(p, 2, t).unwrap(), char_sum_ordered(p, 2, t).unwrap());
            }
        }
    }
}
