#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigUint;

/// One published row: `(p, b_p, a_p, first trace, second trace, #X(F_p), #X(F_p^2))`.
pub type Row = (u64, i64, i64, i64, i64, u64, u64);

pub const TABLE: [Row; 7] = [
    (3, -2, 8, -22, -80, 590, 4860),
    (11, 0, -28, -28, -15188, 7300, 2451040),
    (13, -4, 18, -242, -12520, 10630, 6132180),
    (17, 6, 74, 584, -1460, 18100, 27910480),
    (19, 2, 80, 270, -68688, 23690, 52995260),
    (29, -6, 190, -680, -105188, 64220, 626794000),
    (31, -4, 72, -548, -275428, 74980, 929380800),
];

pub const COUNT_113: u64 = 2017820;
pub const COUNT_113_SQUARED: u64 = 2089302575920;
pub const TRACE_113: i64 = 4768;
pub const SECOND_TRACE_113: i64 = -13117460;

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Solution sum over all ordered nonzero triples in `F_p`, straight from
/// the formula with Euler's criterion.
pub fn naive_solution_sum(p: u64, t: i64) -> u64 {
    let t = t.rem_euclid(p as i64) as u64;
    let inv = |x: u64| pow_mod(x, p - 2, p);
    let mut sum = 0;
    for x in 1..p {
        for y in 1..p {
            for z in 1..p {
                let a = (1 + x + y + z) % p;
                let b = (1 + inv(x) + inv(y) + inv(z)) % p;
                let w = (a * b % p + 2 * p - 1 - t) % p;
                let d = (w * w % p + p - 4 * t % p) % p;
                sum += match pow_mod(d, (p - 1) / 2, p) {
                    0 => 1,
                    1 => 2,
                    _ => 0,
                };
            }
        }
    }
    sum
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::from(1u32), |acc, i| acc * i)
}

/// Sum of squared multinomials over compositions of `n` into five parts.
pub fn composition_coeff(n: u64) -> BigUint {
    let mut total = BigUint::from(0u32);
    for i in 0..=n {
        for j in 0..=n - i {
            for k in 0..=n - i - j {
                for l in 0..=n - i - j - k {
                    let m = n - i - j - k - l;
                    let c = factorial(n) / (factorial(i) * factorial(j) * factorial(k) * factorial(l) * factorial(m));
                    total += &c * &c;
                }
            }
        }
    }
    total
}

/// Constant term of `((x1+..+x4+1)(1/x1+..+1/x4+1))^n`.
pub fn constant_term_coeff(n: usize) -> BigUint {
    let mut base: BTreeMap<[i8; 4], u32> = BTreeMap::new();
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
    let mut acc: BTreeMap<[i8; 4], BigUint> = BTreeMap::from([([0; 4], BigUint::from(1u32))]);
    for _ in 0..n {
        let mut next: BTreeMap<[i8; 4], BigUint> = BTreeMap::new();
        for (e, c) in &acc {
            for (f, d) in &base {
                let k = std::array::from_fn(|i| e[i] + f[i]);
                *next.entry(k).or_default() += c * *d;
            }
        }
        acc = next;
    }
    acc.remove(&[0; 4]).unwrap_or_default()
}

/// Coefficients of `(phi - 1)(9 phi - 1)(25 phi - 1)`, constant term first.
pub fn leading_product() -> Vec<i64> {
    let mut poly = vec![1i64];
    for root_den in [1i64, 9, 25] {
        let mut next = vec![0; poly.len() + 1];
        for (i, c) in poly.iter().enumerate() {
            next[i] -= c;
            next[i + 1] += root_den * c;
        }
        poly = next;
    }
    poly
}
