//! Elimination of candidate residual characters `eps^a psi` against the
//! mod-5 Frobenius data `{alpha p, beta}` at a handful of primes.
//!
//! `psi = psi1^d psi2^e psi3^f` with `psi1` on `(Z/16)^*` (`3 -> 2`,
//! `-1 -> 1`), `psi2` the nontrivial character of `(Z/4)^*` and `psi3` the
//! Legendre symbol mod 7, all valued in `F_5^*`.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::zeta::{mod5_pair, EulerSplit, Mod5Pair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CharError {
    #[error("characters are undefined at p = {0}")]
    Undefined(u64),
    #[error("no observation at p = {0}")]
    MissingObservation(u64),
    #[error("no candidate survives the observations")]
    NothingSurvives,
}

const INV5: [u8; 5] = [0, 1, 3, 2, 4];

fn pow5(x: u8, n: u32) -> u8 {
    (0..n).fold(1u8, |acc, _| acc * x % 5)
}

/// Exponents `(a, d, e, f)` with `a in {0, -1}`, `d < 4`, `e, f < 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharCandidate {
    pub a: i8,
    pub d: u8,
    pub e: u8,
    pub f: u8,
}

impl CharCandidate {
    pub const TRIVIAL: CharCandidate = CharCandidate { a: 0, d: 0, e: 0, f: 0 };

    /// All 32 candidates.
    pub fn all() -> Vec<CharCandidate> {
        let mut out = Vec::with_capacity(32);
        for a in [0i8, -1] {
            for d in 0..4 {
                for e in 0..2 {
                    for f in 0..2 {
                        out.push(CharCandidate { a, d, e, f });
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for CharCandidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, d={}, e={}, f={})", self.a, self.d, self.e, self.f)
    }
}

fn check(p: u64) -> Result<(), CharError> {
    if p % 2 == 0 || p % 7 == 0 {
        return Err(CharError::Undefined(p));
    }
    Ok(())
}

/// `psi1(p)`: write `p mod 16` as `3^i (-1)^j`, giving `2^i`.
pub fn psi1(p: u64) -> Result<u8, CharError> {
    check(p)?;
    let r = p % 16;
    let i = [1u64, 3, 9, 11].iter().position(|&x| x == r || 16 - x == r).expect("odd residue mod 16");
    Ok(pow5(2, i as u32))
}

/// `psi2(p)`: `-1` for `p = 3 mod 4`.
pub fn psi2(p: u64) -> Result<u8, CharError> {
    check(p)?;
    Ok(if p % 4 == 3 { 4 } else { 1 })
}

/// `psi3(p)`: Legendre symbol mod 7.
pub fn psi3(p: u64) -> Result<u8, CharError> {
    check(p)?;
    Ok(if [1, 2, 4].contains(&(p % 7)) { 1 } else { 4 })
}

/// `psi1(p)^d psi2(p)^e psi3(p)^f` in `F_5^*`.
pub fn psi_eval(c: CharCandidate, p: u64) -> Result<u8, CharError> {
    Ok(pow5(psi1(p)?, c.d as u32) * pow5(psi2(p)?, c.e as u32) % 5 * pow5(psi3(p)?, c.f as u32) % 5)
}

/// `psi(p)^-1 + p^3 psi(p)` for `a = 0`, `p psi(p)^-1 + p^2 psi(p)` for `a = -1`.
pub fn y_value(c: CharCandidate, p: u64) -> Result<u8, CharError> {
    let psi = psi_eval(c, p)?;
    let pm = (p % 5) as u8;
    let (lo, hi) = if c.a == 0 { (1, pow5(pm, 3)) } else { (pm, pow5(pm, 2)) };
    Ok((lo * INV5[psi as usize] + hi * psi) % 5)
}

/// `p psi(p)^-1 + p^2 psi(p)`.
pub fn z_value(c: CharCandidate, p: u64) -> Result<u8, CharError> {
    y_value(CharCandidate { a: -1, ..c }, p)
}

/// The unordered pair `{alpha p, beta}` over `F_5` at a prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Observation {
    pub p: u64,
    pub pair: Mod5Pair,
}

impl Observation {
    pub fn from_split(p: u64, split: EulerSplit) -> Self {
        Observation { p, pair: mod5_pair(split) }
    }
}

/// Candidates whose `Y` value lies in every observed pair.
pub fn eliminate(observations: &[Observation]) -> Result<Vec<CharCandidate>, CharError> {
    let mut out = Vec::new();
    for c in CharCandidate::all() {
        let mut ok = true;
        for o in observations {
            ok &= o.pair.contains(y_value(c, o.p)?);
        }
        if ok {
            out.push(c);
        }
    }
    if out.is_empty() {
        return Err(CharError::NothingSurvives);
    }
    Ok(out)
}

/// True when no `psi` gives a `Z` value at 113 inside the observed pair.
pub fn zp_reducible_test(observations: &[Observation]) -> Result<bool, CharError> {
    let o = observations.iter().find(|o| o.p == 113).ok_or(CharError::MissingObservation(113))?;
    for c in CharCandidate::all().into_iter().filter(|c| c.a == 0) {
        if o.pair.contains(z_value(c, o.p)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A row `p, p, p^2, p^3, psi1, psi2, psi3` over `F_5`, characters signed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CharacterRow {
    pub p: u64,
    pub powers: [u8; 3],
    pub psi: [i8; 3],
}

pub fn character_row(p: u64) -> Result<CharacterRow, CharError> {
    let signed = |x: u8| if x == 4 { -1 } else { x as i8 };
    let pm = (p % 5) as u8;
    Ok(CharacterRow {
        p,
        powers: [pm, pow5(pm, 2), pow5(pm, 3)],
        psi: [signed(psi1(p)?), signed(psi2(p)?), signed(psi3(p)?)],
    })
}
