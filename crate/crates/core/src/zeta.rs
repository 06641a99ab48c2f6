//! Frobenius traces on `H^3` of the compactified threefold and their split
//! into the weight-4 eigenvalue `u = a_p` and the Tate-twisted weight-2
//! eigenvalue `v = p b_p`.
//!
//! With multiplicity five on the weight-2 part,
//!
//! ```text
//! t1 = u + 5 v
//! t2 = u^2 + 5 v^2 - 12 p^3
//! ```
//!
//! so `v` solves `30 v^2 - 10 t1 v + (t1^2 - t2 - 12 p^3) = 0`.

use core::fmt;

use thiserror::Error;

use crate::arith::{is_prime, isqrt_u128};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZetaError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("traces t1 = {t1}, t2 = {t2} violate the Weil bound at p = {p}")]
    WeilBound { p: u64, t1: i64, t2: i64 },
    #[error("no admissible integer split of t1 = {t1}, t2 = {t2} at p = {p}")]
    NoIntegerRoot { p: u64, t1: i64, t2: i64 },
    #[error("ambiguous split at p = {p}: both {first} and {second} are admissible")]
    Ambiguous { p: u64, first: EulerSplit, second: EulerSplit },
    #[error("eigenvalue {value} out of range at p = {p}")]
    OutOfRange { p: u64, value: i64 },
}

fn check_prime(p: u64) -> Result<(), ZetaError> {
    if p == 2 || !is_prime(p) {
        return Err(ZetaError::NotPrime(p));
    }
    Ok(())
}

fn cube(p: u64) -> i128 {
    (p as i128).pow(3)
}

/// Traces of `Frob_p^-1` and `Frob_p^-2` on the 12-dimensional `H^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TraceData {
    p: u64,
    t1: i64,
    t2: i64,
}

impl TraceData {
    /// Checks `|t1| <= 12 p^{3/2}` and `|t2| <= 12 p^3`.
    pub fn new(p: u64, t1: i64, t2: i64) -> Result<Self, ZetaError> {
        check_prime(p)?;
        let p3 = cube(p);
        if (t1 as i128).pow(2) > 144 * p3 || (t2 as i128).abs() > 12 * p3 {
            return Err(ZetaError::WeilBound { p, t1, t2 });
        }
        Ok(TraceData { p, t1, t2 })
    }

    /// The traces produced by a given split.
    pub fn from_split(p: u64, s: EulerSplit) -> Result<Self, ZetaError> {
        let (u, v) = (s.u as i128, s.v as i128);
        let t1 = u + 5 * v;
        let t2 = u * u + 5 * v * v - 12 * cube(p);
        TraceData::new(p, t1 as i64, t2 as i64)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t1(&self) -> i64 {
        self.t1
    }

    pub fn t2(&self) -> i64 {
        self.t2
    }
}

/// `u = a_p` and `v = p b_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EulerSplit {
    pub u: i64,
    pub v: i64,
}

impl fmt::Display for EulerSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u = {}, v = {})", self.u, self.v)
    }
}

impl EulerSplit {
    /// `p | v`, `u^2 <= 4 p^3` and `v^2 <= 4 p^3`.
    pub fn is_admissible(&self, p: u64) -> bool {
        let bound = 4 * cube(p);
        self.v.rem_euclid(p as i64) == 0
            && (self.u as i128).pow(2) <= bound
            && (self.v as i128).pow(2) <= bound
    }

    /// Builds the split from the first trace and a known weight-2 eigenvalue.
    pub fn from_first_trace(p: u64, t1: i64, b_p: i64) -> Result<Self, ZetaError> {
        check_prime(p)?;
        let v = p as i64 * b_p;
        let s = EulerSplit { u: t1 - 5 * v, v };
        if !s.is_admissible(p) {
            return Err(ZetaError::OutOfRange { p, value: if (s.v as i128).pow(2) > 4 * cube(p) { s.v } else { s.u } });
        }
        Ok(s)
    }

    /// `b_p = v / p`.
    pub fn weight_two(&self, p: u64) -> i64 {
        self.v / p as i64
    }
}

/// Solves for the unique admissible `(u, v)`; two admissible roots fail closed.
pub fn split_traces(d: &TraceData) -> Result<EulerSplit, ZetaError> {
    let TraceData { p, t1, t2 } = *d;
    let (a, b) = (t1 as i128, t2 as i128);
    let disc = -20 * a * a + 120 * b + 1440 * cube(p);
    let none = ZetaError::NoIntegerRoot { p, t1, t2 };
    if disc < 0 {
        return Err(none);
    }
    let r = isqrt_u128(disc as u128) as i128;
    if r * r != disc {
        return Err(none);
    }
    let mut found: [Option<EulerSplit>; 2] = [None, None];
    for (slot, num) in found.iter_mut().zip([10 * a + r, 10 * a - r]) {
        if num % 60 != 0 {
            continue;
        }
        let v = num / 60;
        let s = EulerSplit { u: (a - 5 * v) as i64, v: v as i64 };
        if s.is_admissible(p) {
            *slot = Some(s);
        }
    }
    match found {
        [Some(x), Some(y)] if x != y => {
            let (first, second) = if x < y { (x, y) } else { (y, x) };
            Err(ZetaError::Ambiguous { p, first, second })
        }
        [Some(x), _] | [None, Some(x)] => Ok(x),
        [None, None] => Err(none),
    }
}

/// `det(I - Frob_p^-1 T)` on `H^3` of the quotient, constant term first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EulerFactor {
    pub coeffs: [i128; 5],
}

impl EulerFactor {
    /// `c0 = 1`, `c4 = p^6`, `c3 = p^3 c1`.
    pub fn satisfies_functional_equation(&self, p: u64) -> bool {
        let p3 = cube(p);
        let c = self.coeffs;
        c[0] == 1 && c[4] == p3 * p3 && c[3] == p3 * c[1]
    }

    /// Value at an integer `T`.
    pub fn eval(&self, x: i128) -> i128 {
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * x + c)
    }
}

/// Coefficients of `(1 - u T + p^3 T^2)(1 - v T + p^3 T^2)`.
pub fn euler_factor_quotient(s: EulerSplit, p: u64) -> EulerFactor {
    let (u, v, p3) = (s.u as i128, s.v as i128, cube(p));
    EulerFactor { coeffs: [1, -(u + v), 2 * p3 + u * v, -p3 * (u + v), p3 * p3] }
}

/// Unordered pair over `F_5`, stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mod5Pair([u8; 2]);

impl Mod5Pair {
    pub fn new(a: i64, b: i64) -> Self {
        let (a, b) = (a.rem_euclid(5) as u8, b.rem_euclid(5) as u8);
        Mod5Pair([a.min(b), a.max(b)])
    }

    pub fn values(&self) -> [u8; 2] {
        self.0
    }

    pub fn contains(&self, x: u8) -> bool {
        self.0.contains(&(x % 5))
    }
}

impl fmt::Display for Mod5Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.0[0], self.0[1])
    }
}

/// `{u mod 5, v mod 5}`: `beta = u` and `alpha p = v` mod 5.
pub fn mod5_pair(s: EulerSplit) -> Mod5Pair {
    Mod5Pair::new(s.u, s.v)
}

/// The step at which a per-prime check first failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Divergence {
    Traces(ZetaError),
    Split(ZetaError),
    WeightFour { counted: i64, expected: i64 },
    WeightTwo { counted: i64, expected: i64 },
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Divergence::Traces(e) => write!(f, "traces: {e}"),
            Divergence::Split(e) => write!(f, "split: {e}"),
            Divergence::WeightFour { counted, expected } => {
                write!(f, "weight-4 eigenvalue: counted {counted}, expected {expected}")
            }
            Divergence::WeightTwo { counted, expected } => {
                write!(f, "weight-2 eigenvalue: counted {counted}, expected {expected}")
            }
        }
    }
}

/// Intermediate quantities of the per-prime comparison of counts against
/// the two newforms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularityReport {
    pub p: u64,
    pub count1: u64,
    pub count2: u64,
    pub t1: i64,
    pub t2: i64,
    pub split: Option<EulerSplit>,
    pub a_p: i64,
    pub b_p: i64,
    pub factor: Option<EulerFactor>,
    pub failure: Option<Divergence>,
}

impl ModularityReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Compares the split of the count-derived traces against `(a_p, p b_p)`.
pub fn check_modularity(p: u64, count1: u64, count2: u64, a_p: i64, b_p: i64) -> ModularityReport {
    use crate::pointcount::trace_h3;
    let mut r = ModularityReport {
        p,
        count1,
        count2,
        t1: 0,
        t2: 0,
        split: None,
        a_p,
        b_p,
        factor: None,
        failure: None,
    };
    let traces = match (trace_h3(p, 1, count1), trace_h3(p, 2, count2)) {
        (Ok(t1), Ok(t2)) => {
            r.t1 = t1;
            r.t2 = t2;
            TraceData::new(p, t1, t2)
        }
        _ => Err(ZetaError::WeilBound { p, t1: 0, t2: 0 }),
    };
    let traces = match traces {
        Ok(t) => t,
        Err(e) => {
            r.failure = Some(Divergence::Traces(e));
            return r;
        }
    };
    let split = match split_traces(&traces) {
        Ok(s) => s,
        Err(e) => {
            r.failure = Some(Divergence::Split(e));
            return r;
        }
    };
    r.split = Some(split);
    r.factor = Some(euler_factor_quotient(split, p));
    let expected_v = p as i64 * b_p;
    if split.u != a_p {
        r.failure = Some(Divergence::WeightFour { counted: split.u, expected: a_p });
    } else if split.v != expected_v {
        r.failure = Some(Divergence::WeightTwo { counted: split.v, expected: expected_v });
    }
    r
}
