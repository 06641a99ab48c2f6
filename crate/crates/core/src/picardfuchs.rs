//! Period coefficients of the family, recovery of the order-4, degree-3
//! differential operator `sum_i S_i(phi) theta^i` annihilating the period,
//! and exact 4x4 lattice computations for the monodromy at `phi = 0`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PfError {
    #[error("need at least {needed} period coefficients, got {got}")]
    TooFewCoefficients { needed: usize, got: usize },
    #[error("recurrence ansatz has a {0}-dimensional solution space, expected 1")]
    NullspaceDimension(usize),
    #[error("leading polynomial vanishes identically")]
    ZeroLeading,
    #[error("leading polynomial has {found} rational roots for degree {degree}")]
    NonRationalRoots { found: usize, degree: usize },
    #[error("leading polynomial coefficients too large for root search")]
    CoefficientOverflow,
    #[error("T0 - I is not nilpotent of order at most 4")]
    NotUnipotent,
    #[error("exp(log(T0)) differs from T0")]
    ExpMismatch,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `a_n = sum over i+j+k+l+m = n of (n! / (i! j! k! l! m!))^2` for `n <= max`.
///
/// Built by five-fold convolution: `g_r(m) = sum_k C(m,k)^2 g_{r-1}(k)`.
pub fn period_coeffs(max: usize) -> Vec<BigUint> {
    let mut binom_sq: Vec<Vec<BigUint>> = Vec::with_capacity(max + 1);
    for m in 0..=max {
        let mut row = vec![BigUint::one(); m + 1];
        for k in 1..m {
            row[k] = &binom_sq[m - 1][k - 1] + &binom_sq[m - 1][k];
        }
        binom_sq.push(row);
    }
    let binom_sq: Vec<Vec<BigUint>> = binom_sq.into_iter().map(|r| r.into_iter().map(|c| &c * &c).collect()).collect();
    let mut g = vec![BigUint::one(); max + 1];
    for _ in 1..5 {
        g = (0..=max)
            .map(|m| (0..=m).map(|k| &binom_sq[m][k] * &g[k]).sum())
            .collect();
    }
    g
}

pub fn period_coeff(n: usize) -> BigUint {
    period_coeffs(n).pop().expect("nonempty")
}

/// Polynomial with exact rational coefficients, constant term first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly(pub Vec<BigRational>);

impl RatPoly {
    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        RatPoly(c.iter().map(|&x| rat(x)).collect())
    }

    /// Integral, primitive, positive leading coefficient.
    pub fn primitive(&self) -> Option<Vec<BigInt>> {
        let d = self.degree()?;
        let lcm = self.0.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.0.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        let sign = if ints[d].is_negative() { -BigInt::one() } else { BigInt::one() };
        Some(ints.into_iter().take(d + 1).map(|c| c / &g * &sign).collect())
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (j, c) in self.0.iter().enumerate().rev().filter(|(_, c)| !c.is_zero()) {
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let a = c.abs();
            let coeff = if a.is_one() && j > 0 { alloc::string::String::new() } else { alloc::format!("{a}") };
            if !first {
                f.write_str(" ")?;
            }
            f.write_str(sign)?;
            if !first {
                f.write_str(" ")?;
            }
            match j {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{coeff}phi")?,
                _ => write!(f, "{coeff}phi^{j}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `sum_{i<=4, j<=3} c[i][j] phi^j theta^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceOperator {
    pub coeffs: [[BigRational; 4]; 5],
}

impl RecurrenceOperator {
    pub const ORDER: usize = 4;
    pub const DEGREE: usize = 3;
    pub const UNKNOWNS: usize = 20;

    /// The polynomial multiplying `theta^i`.
    pub fn s(&self, i: usize) -> RatPoly {
        RatPoly(self.coeffs[i].to_vec())
    }

    /// Coefficient of `phi^n` after applying the operator to `sum a_n phi^n`.
    pub fn residual(&self, a: &[BigUint], n: usize) -> BigRational {
        let mut acc = BigRational::zero();
        for j in 0..=Self::DEGREE.min(n) {
            let m = n - j;
            let am = BigRational::from_integer(BigInt::from(a[m].clone()));
            let mut pw = BigRational::one();
            for i in 0..=Self::ORDER {
                acc += &self.coeffs[i][j] * &pw * &am;
                pw *= rat(m as i64);
            }
        }
        acc
    }

    /// Whether the recurrence holds for every `n` in `range`.
    pub fn holds_on(&self, a: &[BigUint], range: core::ops::Range<usize>) -> bool {
        range.into_iter().all(|n| self.residual(a, n).is_zero())
    }
}

/// Row-reduces `rows` in place and returns a basis of its nullspace.
pub fn nullspace(mut rows: Vec<Vec<BigRational>>, cols: usize) -> Vec<Vec<BigRational>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![BigRational::zero(); cols];
            v[fc] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -rows[i][fc].clone();
            }
            v
        })
        .collect()
}

/// Solves for the operator from the recurrence rows `n = 0..rows` and
/// normalises its leading polynomial to be integral, primitive and with
/// positive leading coefficient.
pub fn recover_recurrence(a: &[BigUint], rows: usize) -> Result<RecurrenceOperator, PfError> {
    let needed = RecurrenceOperator::UNKNOWNS + 5;
    if rows < needed || a.len() < rows {
        return Err(PfError::TooFewCoefficients { needed: needed.max(rows), got: a.len().min(rows) });
    }
    let system: Vec<Vec<BigRational>> = (0..rows)
        .map(|n| {
            let mut row = vec![BigRational::zero(); RecurrenceOperator::UNKNOWNS];
            for j in 0..=RecurrenceOperator::DEGREE.min(n) {
                let m = n - j;
                let am = BigRational::from_integer(BigInt::from(a[m].clone()));
                let mut pw = BigRational::one();
                for i in 0..=RecurrenceOperator::ORDER {
                    row[4 * i + j] = &pw * &am;
                    pw *= rat(m as i64);
                }
            }
            row
        })
        .collect();
    let basis = nullspace(system, RecurrenceOperator::UNKNOWNS);
    if basis.len() != 1 {
        return Err(PfError::NullspaceDimension(basis.len()));
    }
    let v = &basis[0];
    let lead = RatPoly(v[16..20].to_vec());
    let prim = lead.primitive().ok_or(PfError::ZeroLeading)?;
    let d = lead.degree().expect("nonzero");
    let scale = BigRational::from_integer(prim[d].clone()) / &lead.0[d];
    let coeffs = core::array::from_fn(|i| core::array::from_fn(|j| &v[4 * i + j] * &scale));
    Ok(RecurrenceOperator { coeffs })
}

/// A point of the parameter line.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum LocusPoint {
    Finite(BigRational),
    Infinity,
}

impl fmt::Display for LocusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocusPoint::Finite(x) => write!(f, "{x}"),
            LocusPoint::Infinity => f.write_str("oo"),
        }
    }
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Distinct rational roots of an integer polynomial.
pub fn rational_roots(poly: &[BigInt]) -> Result<Vec<BigRational>, PfError> {
    let lo = poly.iter().position(|c| !c.is_zero()).ok_or(PfError::ZeroLeading)?;
    let hi = poly.len() - 1;
    let mut roots = Vec::new();
    if lo > 0 {
        roots.push(BigRational::zero());
    }
    let c0 = poly[lo].abs().to_u64().ok_or(PfError::CoefficientOverflow)?;
    let cn = poly[hi].abs().to_u64().ok_or(PfError::CoefficientOverflow)?;
    let p = RatPoly(poly.iter().map(|c| BigRational::from_integer(c.clone())).collect());
    for num in divisors(c0) {
        for den in divisors(cn) {
            if num.gcd(&den) != 1 {
                continue;
            }
            for s in [1i64, -1] {
                let x = BigRational::new(BigInt::from(s) * BigInt::from(num), BigInt::from(den));
                if p.eval(&x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// `{0, oo}` together with the roots of the leading polynomial, which must
/// all be rational and simple.
pub fn singular_locus(op: &RecurrenceOperator) -> Result<Vec<LocusPoint>, PfError> {
    let lead = op.s(RecurrenceOperator::ORDER);
    let prim = lead.primitive().ok_or(PfError::ZeroLeading)?;
    let degree = prim.len() - 1;
    let roots = rational_roots(&prim)?;
    if roots.len() != degree {
        return Err(PfError::NonRationalRoots { found: roots.len(), degree });
    }
    let mut out = vec![LocusPoint::Finite(BigRational::zero())];
    out.extend(roots.into_iter().filter(|r| !r.is_zero()).map(LocusPoint::Finite));
    out.push(LocusPoint::Infinity);
    out.sort();
    Ok(out)
}

/// 4x4 matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMat4(pub [[BigRational; 4]; 4]);

impl RationalMat4 {
    pub fn zero() -> Self {
        RationalMat4(core::array::from_fn(|_| core::array::from_fn(|_| BigRational::zero())))
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..4 {
            m.0[i][i] = BigRational::one();
        }
        m
    }

    pub fn from_ints(rows: [[i64; 4]; 4]) -> Self {
        RationalMat4(rows.map(|r| r.map(rat)))
    }

    /// Entries given as `(numerator, denominator)`.
    pub fn from_fractions(rows: [[(i64, i64); 4]; 4]) -> Self {
        RationalMat4(rows.map(|r| r.map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.0[i][j] = (0..4).map(|k| &self.0[i][k] * &rhs.0[k][j]).sum();
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        RationalMat4(core::array::from_fn(|i| core::array::from_fn(|j| &self.0[i][j] + &rhs.0[i][j])))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        RationalMat4(core::array::from_fn(|i| core::array::from_fn(|j| &self.0[i][j] - &rhs.0[i][j])))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        RationalMat4(core::array::from_fn(|i| core::array::from_fn(|j| &self.0[i][j] * c)))
    }

    pub fn transpose(&self) -> Self {
        RationalMat4(core::array::from_fn(|i| core::array::from_fn(|j| self.0[j][i].clone())))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(Zero::is_zero)
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn det(&self) -> BigRational {
        let mut m = self.0.clone();
        let mut det = BigRational::one();
        for c in 0..4 {
            let Some(p) = (c..4).find(|&r| !m[r][c].is_zero()) else {
                return BigRational::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            det *= &m[c][c];
            for r in c + 1..4 {
                let f = &m[r][c] / &m[c][c];
                for k in c..4 {
                    let t = &f * &m[c][k];
                    m[r][k] -= t;
                }
            }
        }
        det
    }

    /// `I + X + X^2/2 + X^3/6` for nilpotent `X` with `X^4 = 0`.
    pub fn exp_nilpotent(&self) -> Self {
        let x2 = self.mul(self);
        let x3 = x2.mul(self);
        Self::identity().add(self).add(&x2.scale(&BigRational::new(1.into(), 2.into()))).add(&x3.scale(&BigRational::new(1.into(), 6.into())))
    }
}

/// `N = M - M^2/2 + M^3/3` with `M = T0 - I`, checked against `exp(N) = T0`.
pub fn nilpotent_log(t0: &RationalMat4) -> Result<RationalMat4, PfError> {
    let m = t0.sub(&RationalMat4::identity());
    let m2 = m.mul(&m);
    let m3 = m2.mul(&m);
    if !m3.mul(&m).is_zero() {
        return Err(PfError::NotUnipotent);
    }
    let n = m.sub(&m2.scale(&BigRational::new(1.into(), 2.into()))).add(&m3.scale(&BigRational::new(1.into(), 3.into())));
    if n.exp_nilpotent() != *t0 {
        return Err(PfError::ExpMismatch);
    }
    Ok(n)
}

/// 5-adic valuation of a nonzero rational.
pub fn val5(x: &BigRational) -> i64 {
    fn v(mut n: BigInt) -> i64 {
        let five = BigInt::from(5);
        let mut k = 0;
        while !n.is_zero() && (&n % &five).is_zero() {
            n /= &five;
            k += 1;
        }
        k
    }
    v(x.numer().clone()) - v(x.denom().clone())
}

/// Gram matrix of the pairing on `{sigma, N sigma, N^2 sigma, tau}` with
/// `<N sigma, sigma> = a` and `<sigma, tau> = sign`.
pub fn gram_matrix(a: i64, sign: i64) -> RationalMat4 {
    RationalMat4::from_ints([[0, -a, 0, sign], [a, 0, -12, 0], [0, 12, 0, 0], [-sign, 0, 0, 0]])
}

/// `N` on `{sigma, N sigma, N^2 sigma, tau}` (columns are images), with
/// `N^3 sigma = 12 sign tau`.
pub fn log_monodromy_on_basis(sign: i64) -> RationalMat4 {
    RationalMat4::from_ints([[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 12 * sign, 0]])
}

/// Columns `sigma, N sigma + eps tau, N^2 sigma / 12, tau` in the old basis.
pub fn standard_basis_change(eps: i64) -> RationalMat4 {
    RationalMat4::from_fractions([[(1, 1), (0, 1), (0, 1), (0, 1)], [(0, 1), (1, 1), (0, 1), (0, 1)], [(0, 1), (0, 1), (1, 12), (0, 1)], [(0, 1), (eps, 1), (0, 1), (1, 1)]])
}

/// Standard alternating form with corner `sign`.
pub fn standard_form(sign: i64) -> RationalMat4 {
    RationalMat4::from_ints([[0, 0, 0, sign], [0, 0, -1, 0], [0, 1, 0, 0], [-sign, 0, 0, 0]])
}

/// Results of the lattice checks at `<N sigma, sigma> = -1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionReport {
    pub sign: i64,
    pub gram: RationalMat4,
    pub determinant: BigRational,
    pub det_val5: i64,
    pub antisymmetric: bool,
    pub transformed: RationalMat4,
    pub standard: bool,
    pub n_skew: bool,
}

impl IntersectionReport {
    pub fn passed(&self) -> bool {
        self.antisymmetric && self.standard && self.n_skew && self.det_val5 == 0 && self.determinant == rat(144)
    }
}

/// Checks the Gram matrix for `<sigma, tau> = sign`, its determinant, the
/// change to standard form through `N sigma - sign tau`, and `<Nx, y> = -<x, Ny>`.
pub fn intersection_checks(sign: i64) -> IntersectionReport {
    let gram = gram_matrix(-1, sign);
    let determinant = gram.det();
    let p = standard_basis_change(-sign);
    let transformed = p.transpose().mul(&gram).mul(&p);
    let n = log_monodromy_on_basis(sign);
    IntersectionReport {
        sign,
        det_val5: val5(&determinant),
        antisymmetric: gram.transpose() == gram.neg(),
        standard: transformed == standard_form(sign),
        n_skew: n.transpose().mul(&gram) == gram.mul(&n).neg(),
        gram,
        determinant,
        transformed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    /// Direct sum over compositions of `n` into five parts.
    fn by_compositions(n: u64) -> BigUint {
        let fact = |k: u64| (1..=k).fold(big(1), |acc, i| acc * big(i));
        let mut total = big(0);
        for i in 0..=n {
            for j in 0..=n - i {
                for k in 0..=n - i - j {
                    for l in 0..=n - i - j - k {
                        let m = n - i - j - k - l;
                        let multi = fact(n) / (fact(i) * fact(j) * fact(k) * fact(l) * fact(m));
                        total += &multi * &multi;
                    }
                }
            }
        }
        total
    }

    /// Constant term of `((x1+..+x4+1)(1/x1+..+1/x4+1))^n`.
    fn constant_term(n: usize) -> BigUint {
        let mut base: BTreeMap<[i8; 4], u64> = BTreeMap::new();
        for a in 0..5 {
            for b in 0..5 {
                let mut e = [0i8; 4];
                if a < 4 {
                    e[a] += 1;
                }
                if b < 4 {
                    e[b] -= 1;
                }
                *base.entry(e).or_default() += 1;
            }
        }
        let mut acc: BTreeMap<[i8; 4], BigUint> = BTreeMap::from([([0; 4], big(1))]);
        for _ in 0..n {
            let mut next: BTreeMap<[i8; 4], BigUint> = BTreeMap::new();
            for (e, c) in &acc {
                for (f, d) in &base {
                    let k = core::array::from_fn(|i| e[i] + f[i]);
                    *next.entry(k).or_default() += c * big(*d);
                }
            }
            acc = next;
        }
        acc.remove(&[0; 4]).unwrap_or_default()
    }

    #[test]
    fn period_coefficients() {
        let a = period_coeffs(10);
        assert_eq!(a[..4], [big(1), big(5), big(45), big(545)]);
        for n in 0..=6 {
            assert_eq!(a[n as usize], by_compositions(n));
        }
        for n in 0..=8 {
            assert_eq!(a[n], constant_term(n), "n = {n}");
        }
        assert!(a.windows(2).skip(1).all(|w| w[0] < w[1]));
        assert_eq!(period_coeff(3), big(545));
    }

    #[test]
    fn recurrence() {
        let a = period_coeffs(60);
        let op = recover_recurrence(&a, 41).unwrap();
        let s4 = op.s(4).primitive().unwrap();
        assert_eq!(s4, [-1, 35, -259, 225].map(BigInt::from));
        assert!(op.holds_on(&a, 0..51));
        assert_eq!(recover_recurrence(&a, 31).unwrap(), op);
        assert!(matches!(recover_recurrence(&a, 10), Err(PfError::TooFewCoefficients { .. })));
        let locus = singular_locus(&op).unwrap();
        let expect: Vec<LocusPoint> = [(0, 1), (1, 25), (1, 9), (1, 1)]
            .iter()
            .map(|&(n, d)| LocusPoint::Finite(BigRational::new(n.into(), d.into())))
            .chain([LocusPoint::Infinity])
            .collect();
        assert_eq!(locus, expect);
        assert_eq!(op.s(4).degree(), Some(3));
        assert!(!op.s(4).eval(&BigRational::new((-1).into(), 7.into())).is_zero());
    }

    #[test]
    fn perturbed_coefficients_break_the_recurrence() {
        let mut a = period_coeffs(45);
        a[20] += 1u32;
        assert!(matches!(recover_recurrence(&a, 41), Err(PfError::NullspaceDimension(0))));
    }

    #[test]
    fn roots() {
        let p = [6, -5, 1].map(BigInt::from);
        assert_eq!(rational_roots(&p).unwrap(), [rat(2), rat(3)]);
        let irr = [-2, 0, 1].map(BigInt::from);
        assert!(rational_roots(&irr).unwrap().is_empty());
    }

    #[test]
    fn polynomial_display() {
        assert_eq!(alloc::format!("{}", RatPoly::from_ints(&[-1, 35, -259, 225])), "225phi^3 - 259phi^2 + 35phi - 1");
    }

    #[test]
    fn log_of_unipotent() {
        let t0 = RationalMat4::from_fractions([
            [(1, 1), (1, 1), (1, 2), (1, 6)],
            [(0, 1), (1, 1), (1, 1), (1, 2)],
            [(0, 1), (0, 1), (1, 1), (1, 1)],
            [(0, 1), (0, 1), (0, 1), (1, 1)],
        ]);
        let n = nilpotent_log(&t0).unwrap();
        assert_eq!(n, RationalMat4::from_ints([[0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1], [0, 0, 0, 0]]));
        assert!(n.mul(&n).mul(&n).mul(&n).is_zero());
        assert_eq!(nilpotent_log(&RationalMat4::identity()).unwrap(), RationalMat4::zero());
        let bad = RationalMat4::from_ints([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
        assert_eq!(nilpotent_log(&bad), Err(PfError::NotUnipotent));
    }

    #[test]
    fn intersection_lattice() {
        let r = intersection_checks(-1);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.gram, RationalMat4::from_ints([[0, 1, 0, -1], [-1, 0, -12, 0], [0, 12, 0, 0], [1, 0, 0, 0]]));
        assert_eq!(r.transformed, RationalMat4::from_ints([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]));
        assert!(intersection_checks(1).passed());
        // the other sign of tau in the second vector does not reach standard form
        let g = gram_matrix(-1, -1);
        let p = standard_basis_change(-1);
        assert_ne!(p.transpose().mul(&g).mul(&p), standard_form(-1));
    }

    #[test]
    fn valuation() {
        assert_eq!(val5(&rat(144)), 0);
        assert_eq!(val5(&BigRational::new(50.into(), 3.into())), 2);
        assert_eq!(val5(&BigRational::new(1.into(), 25.into())), -2);
    }
}
