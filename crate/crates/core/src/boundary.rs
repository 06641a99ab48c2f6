//! Points of the two-equation compactification outside the open torus,
//! counted stratum by stratum on two affine toric charts, with multiplicities
//! given by the symmetry group `H = S_5 x Z/2` acting on cocharacters.
//!
//! Chart one, variables `x, y, z, w, v`:
//!
//! ```text
//! xyzwv + yzwv + zwv + wv + v + 1 = 0
//! 1 + x + xy + xyz + xyzw + t xyzwv = 0
//! ```
//!
//! Chart three, variables `a, b, c, d, e`:
//!
//! ```text
//! ab + 1 + a + abe + abde + abcde = 0
//! abcde + bcde + cd + c + 1 + t cde = 0
//! ```

use alloc::vec::Vec;

use thiserror::Error;

use crate::arith::{is_prime, pow_mod};
use crate::pointcount::{check_good_reduction, count_xbar, CountError, Parameter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundaryError {
    #[error(transparent)]
    Count(#[from] CountError),
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("stratified total {stratified} differs from 50p^2 + 40p + 20 = {closed} at p = {p}")]
    Mismatch { p: u64, stratified: u64, closed: u64 },
}

/// The two affine charts used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    First,
    Third,
}

impl Chart {
    pub fn variables(self) -> [char; 5] {
        match self {
            Chart::First => ['x', 'y', 'z', 'w', 'v'],
            Chart::Third => ['a', 'b', 'c', 'd', 'e'],
        }
    }

    /// Ray generators attached to the five variables.
    pub fn rays(self) -> [[i8; 5]; 5] {
        match self {
            Chart::First => [
                [1, 0, 0, 0, 0],
                [1, 1, 0, 0, 0],
                [1, 1, 1, 0, 0],
                [1, 1, 1, 1, 0],
                [1, 1, 1, 1, 1],
            ],
            Chart::Third => [
                [-1, 0, 0, 0, 0],
                [-1, -1, 0, 0, 0],
                [0, 0, 0, 0, 1],
                [0, 0, 0, 1, 1],
                [0, 0, 1, 1, 1],
            ],
        }
    }

    /// Both chart equations at `vals`, reduced mod `p`.
    fn equations(self, vals: [u64; 5], t: u64, p: u64) -> (u64, u64) {
        let m = |a: u64, b: u64| a * b % p;
        match self {
            Chart::First => {
                let [x, y, z, w, v] = vals;
                let wv = m(w, v);
                let zwv = m(z, wv);
                let yzwv = m(y, zwv);
                let all = m(x, yzwv);
                let e1 = (all + yzwv + zwv + wv + v + 1) % p;
                let xy = m(x, y);
                let xyz = m(xy, z);
                let xyzw = m(xyz, w);
                let e2 = (1 + x + xy + xyz + xyzw + m(t, all)) % p;
                (e1, e2)
            }
            Chart::Third => {
                let [a, b, c, d, e] = vals;
                let ab = m(a, b);
                let abe = m(ab, e);
                let abde = m(abe, d);
                let abcde = m(abde, c);
                let e1 = (ab + 1 + a + abe + abde + abcde) % p;
                let cd = m(c, d);
                let cde = m(cd, e);
                let bcde = m(b, cde);
                let e2 = (abcde + bcde + cd + c + 1 + m(t, cde)) % p;
                (e1, e2)
            }
        }
    }
}

/// A boundary stratum: a chart and the set of its variables that vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Stratum {
    pub chart: Chart,
    /// bit `i` set when variable `i` vanishes
    pub vanishing: u8,
    /// number of `H`-translates
    pub multiplicity: u64,
    /// expected count as `c0 + c1 p + c2 p^2`
    pub expected: [i64; 3],
}

impl Stratum {
    pub fn name(&self) -> alloc::string::String {
        let vars = self.chart.variables();
        let mut s = alloc::string::String::new();
        for (i, v) in vars.iter().enumerate().filter(|(i, _)| self.vanishing >> i & 1 == 1) {
            if !s.is_empty() && i > 0 {
                s.push('=');
            }
            s.push(*v);
        }
        s.push_str("=0");
        s
    }

    pub fn expected_count(&self, p: u64) -> u64 {
        let p = p as i64;
        (self.expected[0] + self.expected[1] * p + self.expected[2] * p * p) as u64
    }

    /// Ray generators of the vanishing variables.
    pub fn face(&self) -> Vec<[i8; 5]> {
        let rays = self.chart.rays();
        (0..5).filter(|i| self.vanishing >> i & 1 == 1).map(|i| rays[i]).collect()
    }
}

const fn stratum(chart: Chart, vanishing: u8, multiplicity: u64, expected: [i64; 3]) -> Stratum {
    Stratum { chart, vanishing, multiplicity, expected }
}

const Y: u8 = 2;
const Z: u8 = 4;
const W: u8 = 8;
const B: u8 = 2;
const D: u8 = 8;
const E: u8 = 16;

/// The ten strata contributing to the boundary count.
pub const STRATA: [Stratum; 10] = [
    stratum(Chart::First, W, 10, [3, -3, 1]),
    stratum(Chart::First, Y, 20, [3, -3, 1]),
    stratum(Chart::First, Z, 20, [4, -4, 1]),
    stratum(Chart::First, W | Z, 40, [-2, 1, 0]),
    stratum(Chart::First, W | Y, 60, [-1, 1, 0]),
    stratum(Chart::First, Y | Z, 60, [-2, 1, 0]),
    stratum(Chart::First, W | Y | Z, 120, [1, 0, 0]),
    stratum(Chart::Third, B | D, 30, [-1, 1, 0]),
    stratum(Chart::Third, B | E, 20, [-2, 1, 0]),
    stratum(Chart::Third, B | D | E, 60, [1, 0, 0]),
];

/// `|H|`.
pub const SYMMETRY_ORDER: u64 = 240;

fn check_prime(p: u64) -> Result<(), BoundaryError> {
    if p == 2 || !is_prime(p) {
        return Err(BoundaryError::NotPrime(p));
    }
    Ok(())
}

/// Solutions of the chart equations with exactly the stratum's variables zero.
pub fn stratum_count(s: &Stratum, p: u64, t: Parameter) -> Result<u64, BoundaryError> {
    check_prime(p)?;
    let t = t.reduce(p).ok_or(CountError::BadReduction { p, t })?;
    let free: Vec<usize> = (0..5).filter(|i| s.vanishing >> i & 1 == 0).collect();
    let total = (p - 1).pow(free.len() as u32);
    let mut count = 0;
    for mut k in 0..total {
        let mut vals = [0u64; 5];
        for &i in &free {
            vals[i] = 1 + k % (p - 1);
            k /= p - 1;
        }
        if s.chart.equations(vals, t, p) == (0, 0) {
            count += 1;
        }
    }
    Ok(count)
}

/// Per-stratum counts and the weighted total.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryCount {
    pub p: u64,
    pub rows: Vec<(Stratum, u64)>,
    pub total: u64,
}

impl BoundaryCount {
    pub fn closed_form(&self) -> u64 {
        closed_form(self.p)
    }
}

/// `50 p^2 + 40 p + 20`.
pub fn closed_form(p: u64) -> u64 {
    50 * p * p + 40 * p + 20
}

/// Weighted sum of all strata; errors if it differs from the closed form.
pub fn boundary_total(p: u64) -> Result<BoundaryCount, BoundaryError> {
    check_good_reduction(p, Parameter::MINUS_SEVEN)?;
    let mut rows = Vec::with_capacity(STRATA.len());
    let mut total = 0;
    for s in STRATA {
        let n = stratum_count(&s, p, Parameter::MINUS_SEVEN)?;
        total += s.multiplicity * n;
        rows.push((s, n));
    }
    if total != closed_form(p) {
        return Err(BoundaryError::Mismatch { p, stratified: total, closed: closed_form(p) });
    }
    Ok(BoundaryCount { p, rows, total })
}

/// Points of `(x1+..+x4+1)(1/x1+..+1/x4+1) = t` with all `x_i` nonzero.
pub fn torus_bruteforce(p: u64, t: Parameter) -> Result<u64, BoundaryError> {
    let t = check_good_reduction(p, t)?;
    let inv: Vec<u64> = (0..p).map(|x| if x == 0 { 0 } else { pow_mod(x, p - 2, p) }).collect();
    let mut count = 0;
    for a in 1..p {
        for b in 1..p {
            for c in 1..p {
                let s = (a + b + c + 1) % p;
                let si = (inv[a as usize] + inv[b as usize] + inv[c as usize] + 1) % p;
                for d in 1..p {
                    let lhs = (s + d) % p * ((si + inv[d as usize]) % p) % p;
                    count += (lhs == t) as u64;
                }
            }
        }
    }
    Ok(count)
}

/// Whether torus points plus boundary points equal the character-sum count.
pub fn consistency(p: u64) -> Result<bool, BoundaryError> {
    let torus = torus_bruteforce(p, Parameter::MINUS_SEVEN)?;
    let boundary = boundary_total(p)?.total;
    Ok(torus + boundary == count_xbar(p, 1, Parameter::MINUS_SEVEN)?)
}

/// The 240 elements of `H` acting on cocharacters.
fn act(perm: &[usize; 5], sign: i8, v: [i8; 5]) -> [i8; 5] {
    let mut out = [0i8; 5];
    for i in 0..5 {
        out[perm[i]] = sign * v[i];
    }
    out
}

fn permutations5() -> Vec<[usize; 5]> {
    let mut out = Vec::new();
    let mut p = [0usize, 1, 2, 3, 4];
    // Heap's algorithm
    let mut c = [0usize; 5];
    out.push(p);
    let mut i = 0;
    while i < 5 {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            out.push(p);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// The `H`-orbit of a set of cocharacters, each member sorted.
pub fn face_orbit(face: &[[i8; 5]]) -> Vec<Vec<[i8; 5]>> {
    let mut orbit: Vec<Vec<[i8; 5]>> = Vec::new();
    for perm in permutations5() {
        for sign in [1i8, -1] {
            let mut img: Vec<[i8; 5]> = face.iter().map(|&v| act(&perm, sign, v)).collect();
            img.sort_unstable();
            orbit.push(img);
        }
    }
    orbit.sort_unstable();
    orbit.dedup();
    orbit
}

/// Whether two faces are `H`-translates of each other.
pub fn are_translates(f: &[[i8; 5]], g: &[[i8; 5]]) -> bool {
    let mut g = g.to_vec();
    g.sort_unstable();
    face_orbit(f).contains(&g)
}

/// Whether `face` is a translate of some face of the first chart's cone.
pub fn translate_of_first_chart(face: &[[i8; 5]]) -> bool {
    let rays = Chart::First.rays();
    (1u8..32).any(|mask| {
        let sub: Vec<[i8; 5]> = (0..5).filter(|i| mask >> i & 1 == 1).map(|i| rays[i]).collect();
        sub.len() == face.len() && are_translates(&sub, face)
    })
}
