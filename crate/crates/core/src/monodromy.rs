//! 4x4 matrices over `F_5` preserving the alternating form
//!
//! ```text
//! J = [[0,0,0,-1],[0,0,-1,0],[0,1,0,0],[1,0,0,0]]
//! ```
//!
//! up to a scalar, the mod-5 monodromy group they generate, and the
//! parabolic, Borel and Bruhat-cell computations around its normaliser.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::HashSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonodromyError {
    #[error("matrix does not preserve the symplectic form up to a scalar")]
    NotSymplectic,
    #[error("matrix is singular")]
    Singular,
    #[error("group closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("invalid word {word:?} at offset {offset}: {reason}")]
    BadWord { word: String, offset: usize, reason: &'static str },
    #[error("kappa must be 1 or 2, got {0}")]
    BadKappa(u8),
}

const Q: u8 = 5;

/// Inverses in `F_5`, index 0 unused.
const INV: [u8; 5] = [0, 1, 3, 2, 4];

/// A 4x4 matrix over `F_5`, row-major, one nibble per entry.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatF5(u64);

impl MatF5 {
    pub const IDENTITY: MatF5 = MatF5::from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]);
    pub const ZERO: MatF5 = MatF5(0);

    /// Entries are reduced mod 5.
    pub const fn from_rows(rows: [[i64; 4]; 4]) -> Self {
        let mut bits = 0u64;
        let mut k = 0;
        while k < 16 {
            let e = rows[k / 4][k % 4].rem_euclid(Q as i64) as u64;
            bits |= e << (4 * k);
            k += 1;
        }
        MatF5(bits)
    }

    fn from_entries(e: [[u8; 4]; 4]) -> Self {
        let mut bits = 0u64;
        for k in 0..16 {
            bits |= (e[k / 4][k % 4] as u64) << (4 * k);
        }
        MatF5(bits)
    }

    /// `None` if any nibble is not in `0..5`.
    pub fn from_packed(bits: u64) -> Option<Self> {
        (0..16).all(|k| (bits >> (4 * k)) & 0xf < Q as u64).then_some(MatF5(bits))
    }

    pub const fn packed(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn get(self, i: usize, j: usize) -> u8 {
        ((self.0 >> (4 * (4 * i + j))) & 0xf) as u8
    }

    #[inline]
    pub fn entries(self) -> [[u8; 4]; 4] {
        let mut e = [[0u8; 4]; 4];
        for (k, x) in e.iter_mut().flatten().enumerate() {
            *x = ((self.0 >> (4 * k)) & 0xf) as u8;
        }
        e
    }

    /// Entries as signed representatives in `-2..=2`.
    pub fn signed_rows(self) -> [[i8; 4]; 4] {
        self.entries().map(|r| r.map(|x| if x > 2 { x as i8 - 5 } else { x as i8 }))
    }

    #[inline]
    pub fn mul(self, rhs: MatF5) -> MatF5 {
        let (a, b) = (self.entries(), rhs.entries());
        let mut out = [[0u8; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                let s: u16 = (0..4).map(|k| a[i][k] as u16 * b[k][j] as u16).sum();
                out[i][j] = (s % Q as u16) as u8;
            }
        }
        MatF5::from_entries(out)
    }

    pub fn scale(self, c: u8) -> MatF5 {
        MatF5::from_entries(self.entries().map(|r| r.map(|x| x * c % Q)))
    }

    pub fn transpose(self) -> MatF5 {
        let e = self.entries();
        MatF5::from_entries(core::array::from_fn(|i| core::array::from_fn(|j| e[j][i])))
    }

    pub fn pow(self, mut n: u64) -> MatF5 {
        let (mut base, mut acc) = (self, MatF5::IDENTITY);
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(base);
            }
            base = base.mul(base);
            n >>= 1;
        }
        acc
    }

    pub fn det(self) -> u8 {
        let mut m = self.entries();
        let mut det = 1u8;
        for c in 0..4 {
            let Some(r) = (c..4).find(|&r| m[r][c] != 0) else {
                return 0;
            };
            if r != c {
                m.swap(r, c);
                det = (Q - det) % Q;
            }
            det = det * m[c][c] % Q;
            let inv = INV[m[c][c] as usize];
            for r in c + 1..4 {
                let f = m[r][c] * inv % Q;
                for k in c..4 {
                    m[r][k] = (m[r][k] + (Q - f) * m[c][k]) % Q;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(self) -> Result<MatF5, MonodromyError> {
        let mut m = self.entries();
        let mut inv = MatF5::IDENTITY.entries();
        for c in 0..4 {
            let r = (c..4).find(|&r| m[r][c] != 0).ok_or(MonodromyError::Singular)?;
            m.swap(r, c);
            inv.swap(r, c);
            let s = INV[m[c][c] as usize];
            for k in 0..4 {
                m[c][k] = m[c][k] * s % Q;
                inv[c][k] = inv[c][k] * s % Q;
            }
            for r in (0..4).filter(|&r| r != c) {
                let f = m[r][c];
                for k in 0..4 {
                    m[r][k] = (m[r][k] + (Q - f) * m[c][k]) % Q;
                    inv[r][k] = (inv[r][k] + (Q - f) * inv[c][k]) % Q;
                }
            }
        }
        Ok(MatF5::from_entries(inv))
    }

    /// Inverse of an element of known similitude `mu`: `mu^-1 J^-1 M^T J`.
    #[inline]
    pub fn symplectic_inverse(self, mu: u8) -> MatF5 {
        FORM_INVERSE.mul(self.transpose()).mul(FORM).scale(INV[mu as usize])
    }

    /// `M X M^-1` for `M` of similitude `mu`.
    #[inline]
    pub fn conjugate(self, mu: u8, x: MatF5) -> MatF5 {
        self.mul(x).mul(self.symplectic_inverse(mu))
    }
}

impl fmt::Debug for MatF5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatF5{:?}", self.entries())
    }
}

impl fmt::Display for MatF5 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.entries().iter().enumerate() {
            if i > 0 {
                f.write_str(" / ")?;
            }
            write!(f, "{} {} {} {}", r[0], r[1], r[2], r[3])?;
        }
        Ok(())
    }
}

/// The alternating form.
pub const FORM: MatF5 = MatF5::from_rows([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]]);
const FORM_INVERSE: MatF5 = MatF5::from_rows([[0, 0, 0, 1], [0, 0, 1, 0], [0, -1, 0, 0], [-1, 0, 0, 0]]);

/// `mu` with `M^T J M = mu J`.
pub fn similitude(m: MatF5) -> Result<u8, MonodromyError> {
    let g = m.transpose().mul(FORM).mul(m);
    let mu = g.get(3, 0);
    if mu == 0 || g != FORM.scale(mu) {
        return Err(MonodromyError::NotSymplectic);
    }
    Ok(mu)
}

/// Loops around the singular fibres of the family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularPoint {
    Zero,
    OneNinth,
    One,
    OneTwentyFifth,
}

/// Mod-5 monodromy matrix around `point` for the quotient by a cyclic group
/// of order `10 / kappa`.
pub fn monodromy_matrix(point: SingularPoint, kappa: u8) -> Result<MatF5, MonodromyError> {
    let k = match kappa {
        1 | 2 => kappa as i64,
        other => return Err(MonodromyError::BadKappa(other)),
    };
    let k_inv = INV[k as usize] as i64;
    Ok(match point {
        SingularPoint::Zero => MatF5::from_rows([[1, -1, k, -2 * k], [0, 1, -2 * k, -k], [0, 0, 1, 1], [0, 0, 0, 1]]),
        SingularPoint::OneNinth => {
            MatF5::from_rows([[1, -2, 0, 2 * k], [0, 1, 0, 0], [0, -2 * k_inv, 1, 2], [0, 0, 0, 1]])
        }
        SingularPoint::One => MatF5::from_rows([[1, -1, k, k], [0, 0, k, k], [0, -k_inv, 2, 1], [0, 0, 0, 1]]),
        SingularPoint::OneTwentyFifth => MatF5::IDENTITY,
    })
}

/// Words in the generators (`kappa = 1`) with their values.
pub const WORD_IDENTITIES: [(&str, MatF5); 4] = [
    ("A2B2C3", MatF5::from_rows([[1, 4, 3, 2], [0, 3, 0, 4], [0, 0, 2, 2], [0, 0, 0, 1]])),
    ("(AB3)3", MatF5::from_rows([[1, 0, 0, 1], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])),
    ("(AB2)2(AB)3(AB3)12", MatF5::from_rows([[1, 0, 2, 0], [0, 1, 0, 2], [0, 0, 1, 0], [0, 0, 0, 1]])),
    ("((AB2)2(AB)3)2(AB)3(BC)2(AB3)6", MatF5::from_rows([[1, 4, 0, 0], [0, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 1]])),
];

/// `[A, B, C]`: loops around `0`, `1/9` and `1`.
pub fn generators(kappa: u8) -> Result<[MatF5; 3], MonodromyError> {
    Ok([
        monodromy_matrix(SingularPoint::Zero, kappa)?,
        monodromy_matrix(SingularPoint::OneNinth, kappa)?,
        monodromy_matrix(SingularPoint::One, kappa)?,
    ])
}

/// Evaluates a word such as `((AB2)2(AB)3)2(BC)2` over the letters `A, B, C`
/// (lowercase for inverses), with optional `^` before exponents.
pub fn word_eval(word: &str, letters: &[MatF5; 3]) -> Result<MatF5, MonodromyError> {
    let bytes = word.as_bytes();
    let err = |offset, reason| MonodromyError::BadWord { word: word.into(), offset, reason };
    let inverses = [letters[0].inverse()?, letters[1].inverse()?, letters[2].inverse()?];
    let mut stack: Vec<MatF5> = alloc::vec![MatF5::IDENTITY];
    let mut opened: Vec<usize> = Vec::new();
    let mut i = 0;
    let mut any = false;
    while i < bytes.len() {
        let c = bytes[i];
        let atom_start = i;
        i += 1;
        let atom = match c {
            b'A' | b'B' | b'C' => letters[(c - b'A') as usize],
            b'a' | b'b' | b'c' => inverses[(c - b'a') as usize],
            b'(' => {
                stack.push(MatF5::IDENTITY);
                opened.push(atom_start);
                continue;
            }
            b')' => {
                if opened.pop().is_none() {
                    return Err(err(atom_start, "unbalanced ')'"));
                }
                if bytes[atom_start - 1] == b'(' {
                    return Err(err(atom_start, "empty group"));
                }
                stack.pop().expect("group stack is never empty here")
            }
            b' ' => continue,
            _ => return Err(err(atom_start, "unexpected character")),
        };
        any = true;
        if i < bytes.len() && bytes[i] == b'^' {
            i += 1;
        }
        let digits = bytes[i..].iter().take_while(|b| b.is_ascii_digit()).count();
        let exp = if digits == 0 {
            if bytes.get(i - 1) == Some(&b'^') {
                return Err(err(i, "missing exponent"));
            }
            1
        } else {
            let s = core::str::from_utf8(&bytes[i..i + digits]).expect("ascii digits");
            i += digits;
            s.parse::<u64>().map_err(|_| err(i - digits, "exponent too large"))?
        };
        let top = stack.last_mut().expect("group stack is never empty");
        *top = top.mul(atom.pow(exp));
    }
    if let Some(&pos) = opened.last() {
        return Err(err(pos, "unbalanced '('"));
    }
    if !any {
        return Err(err(0, "empty word"));
    }
    Ok(stack[0])
}

/// A finite subgroup of `GSp_4(F_5)` as a hash set of packed matrices.
#[derive(Clone, Debug)]
pub struct GroupClosure {
    elements: HashSet<u64>,
    generators: Vec<MatF5>,
    similitudes: Vec<u8>,
}

impl GroupClosure {
    pub const DEFAULT_CAP: usize = 40_000_000;

    /// Breadth-first closure of `generators` under right multiplication.
    pub fn generate(generators: &[MatF5], cap: usize) -> Result<Self, MonodromyError> {
        Self::generate_with(generators, cap, false)
    }

    /// As [`Self::generate`] but multiplying generators on the left.
    pub fn generate_left(generators: &[MatF5], cap: usize) -> Result<Self, MonodromyError> {
        Self::generate_with(generators, cap, true)
    }

    fn generate_with(generators: &[MatF5], cap: usize, left: bool) -> Result<Self, MonodromyError> {
        let similitudes = generators.iter().map(|&g| similitude(g)).collect::<Result<Vec<_>, _>>()?;
        let mut elements = HashSet::new();
        elements.insert(MatF5::IDENTITY.0);
        let mut queue = VecDeque::from([MatF5::IDENTITY]);
        while let Some(m) = queue.pop_front() {
            for &g in generators {
                let n = if left { g.mul(m) } else { m.mul(g) };
                if elements.insert(n.0) {
                    if elements.len() > cap {
                        return Err(MonodromyError::CapExceeded(cap));
                    }
                    queue.push_back(n);
                }
            }
        }
        Ok(GroupClosure { elements, generators: generators.to_vec(), similitudes })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: MatF5) -> bool {
        self.elements.contains(&m.0)
    }

    pub fn generators(&self) -> &[MatF5] {
        &self.generators
    }

    pub fn iter(&self) -> impl Iterator<Item = MatF5> + '_ {
        self.elements.iter().map(|&b| MatF5(b))
    }

    /// Packed elements in ascending order.
    pub fn sorted_elements(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.elements.iter().copied().collect();
        v.sort_unstable();
        v
    }

    /// Whether `g` (of similitude `mu`) conjugates every generator back
    /// into the group, i.e. normalises it.
    #[inline]
    pub fn normalized_by(&self, g: MatF5, mu: u8) -> bool {
        let g_inv = g.symplectic_inverse(mu);
        self.generators.iter().all(|&x| self.contains(g.mul(x).mul(g_inv)))
    }

    /// Similitudes of the generators.
    pub fn generator_similitudes(&self) -> &[u8] {
        &self.similitudes
    }
}

/// First column supported on `e_1`.
pub fn in_parabolic(m: MatF5) -> bool {
    m.get(0, 0) != 0 && m.get(1, 0) == 0 && m.get(2, 0) == 0 && m.get(3, 0) == 0
}

/// `[[1,a,b,c],[0,1,0,b],[0,0,1,-a],[0,0,0,1]]`.
pub fn unipotent(a: u8, b: u8, c: u8) -> MatF5 {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    MatF5::from_rows([[1, a, b, c], [0, 1, 0, b], [0, 0, 1, -a], [0, 0, 0, 1]])
}

/// `diag(s, block, t / s)` with `t = det(block)`.
pub fn levi(s: u8, block: [[u8; 2]; 2]) -> MatF5 {
    let t = (block[0][0] as u16 * block[1][1] as u16 + 4 * (block[0][1] as u16 * block[1][0] as u16) % 5) % 5;
    let corner = t as u8 * INV[s as usize] % Q;
    let b = block.map(|r| r.map(|x| x as i64));
    MatF5::from_rows([
        [s as i64, 0, 0, 0],
        [0, b[0][0], b[0][1], 0],
        [0, b[1][0], b[1][1], 0],
        [0, 0, 0, corner as i64],
    ])
}

/// `M = levi(s, block) * unipotent(a, b, c)` for `M` in the parabolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ParabolicDecomp {
    pub s: u8,
    pub levi_block: [[u8; 2]; 2],
    pub t_over_s: u8,
    pub unipotent: (u8, u8, u8),
}

impl ParabolicDecomp {
    pub fn decompose(m: MatF5) -> Option<Self> {
        if !in_parabolic(m) {
            return None;
        }
        let s = m.get(0, 0);
        let block = [[m.get(1, 1), m.get(1, 2)], [m.get(2, 1), m.get(2, 2)]];
        let l = levi(s, block);
        let u = l.inverse().ok()?.mul(m);
        let (a, b, c) = (u.get(0, 1), u.get(0, 2), u.get(0, 3));
        let d = ParabolicDecomp { s, levi_block: block, t_over_s: l.get(3, 3), unipotent: (a, b, c) };
        (d.reassemble() == m).then_some(d)
    }

    pub fn levi(&self) -> MatF5 {
        levi(self.s, self.levi_block)
    }

    pub fn reassemble(&self) -> MatF5 {
        let (a, b, c) = self.unipotent;
        self.levi().mul(unipotent(a, b, c))
    }

    pub fn block_det(&self) -> u8 {
        let b = self.levi_block;
        ((b[0][0] as u16 * b[1][1] as u16 + 4 * (b[0][1] as u16 * b[1][0] as u16) % 5) % 5) as u8
    }
}

/// All of `SL_2(F_5)` as 2x2 blocks.
pub fn sl2_blocks() -> Vec<[[u8; 2]; 2]> {
    let mut out = Vec::new();
    for x in 0..625u16 {
        let e = [(x % 5) as u8, (x / 5 % 5) as u8, (x / 25 % 5) as u8, (x / 125) as u8];
        if (e[0] as u16 * e[3] as u16 + 4 * (e[1] as u16 * e[2] as u16)) % 5 == 1 {
            out.push([[e[0], e[1]], [e[2], e[3]]]);
        }
    }
    out
}

/// Outcome of the three structural checks on the monodromy group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageStructure {
    pub order: usize,
    pub all_parabolic: bool,
    pub unipotent_found: usize,
    pub levi_intersection: usize,
    pub levi_blocks_are_sl2: bool,
    pub levi_projection_special: bool,
}

impl ImageStructure {
    pub fn contains_unipotent_radical(&self) -> bool {
        self.unipotent_found == 125
    }

    pub fn passed(&self) -> bool {
        self.all_parabolic
            && self.contains_unipotent_radical()
            && self.levi_intersection == 120
            && self.levi_blocks_are_sl2
            && self.levi_projection_special
    }
}

pub fn verify_image_structure(group: &GroupClosure) -> ImageStructure {
    let unipotent_found = (0..125u8).filter(|&k| group.contains(unipotent(k % 5, k / 5 % 5, k / 25))).count();
    let mut all_parabolic = true;
    let mut projection_special = true;
    let mut blocks = Vec::new();
    for m in group.iter() {
        let Some(d) = ParabolicDecomp::decompose(m) else {
            all_parabolic = false;
            continue;
        };
        if d.s != 1 || d.t_over_s != 1 || d.block_det() != 1 {
            projection_special = false;
        }
        if d.unipotent == (0, 0, 0) && d.s == 1 && d.t_over_s == 1 {
            blocks.push(d.levi_block);
        }
    }
    blocks.sort_unstable();
    let mut sl2 = sl2_blocks();
    sl2.sort_unstable();
    ImageStructure {
        order: group.order(),
        all_parabolic,
        unipotent_found,
        levi_intersection: blocks.len(),
        levi_blocks_are_sl2: blocks == sl2,
        levi_projection_special: projection_special,
    }
}

/// The element swapping `e_2` and `e_3` up to sign.
pub const OMEGA: MatF5 = MatF5::from_rows([[1, 0, 0, 0], [0, 0, -1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]);

/// A monomial matrix class modulo the diagonal torus: `perm[i]` is the row
/// of the nonzero entry in column `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeylClass {
    pub perm: [u8; 4],
}

impl WeylClass {
    pub const IDENTITY: WeylClass = WeylClass { perm: [0, 1, 2, 3] };

    pub fn of(m: MatF5) -> Option<Self> {
        let mut perm = [0u8; 4];
        for (j, slot) in perm.iter_mut().enumerate() {
            let rows: Vec<usize> = (0..4).filter(|&i| m.get(i, j) != 0).collect();
            if rows.len() != 1 {
                return None;
            }
            *slot = rows[0] as u8;
        }
        Some(WeylClass { perm })
    }
}

fn permutations4() -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for a in 0..4u8 {
        for b in (0..4).filter(|&b| b != a) {
            for c in (0..4).filter(|&c| c != a && c != b) {
                out.push([a, b, c, 6 - a - b - c]);
            }
        }
    }
    out
}

/// Monomial matrices of similitude 1.
pub fn monomial_symplectic() -> Vec<MatF5> {
    let mut out = Vec::new();
    for perm in permutations4() {
        for scal in 0..256u16 {
            let mut rows = [[0i64; 4]; 4];
            for j in 0..4 {
                rows[perm[j] as usize][j] = 1 + ((scal >> (2 * j)) & 3) as i64;
            }
            let m = MatF5::from_rows(rows);
            if similitude(m) == Ok(1) {
                out.push(m);
            }
        }
    }
    out
}

/// Weyl classes (monomial matrices modulo the torus) together with whether
/// their members normalise `group`; `consistent` is false if members of one
/// class disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylSurvey {
    pub classes: Vec<(WeylClass, bool)>,
    pub consistent: bool,
}

impl WeylSurvey {
    pub fn survivors(&self) -> Vec<WeylClass> {
        self.classes.iter().filter(|c| c.1).map(|c| c.0).collect()
    }
}

pub fn weyl_normalizer_classes(group: &GroupClosure) -> WeylSurvey {
    let mut classes: Vec<(WeylClass, bool)> = Vec::new();
    let mut consistent = true;
    for m in monomial_symplectic() {
        let class = WeylClass::of(m).expect("monomial");
        let n = group.normalized_by(m, 1);
        match classes.iter_mut().find(|c| c.0 == class) {
            Some(c) => consistent &= c.1 == n,
            None => classes.push((class, n)),
        }
    }
    classes.sort_unstable();
    WeylSurvey { classes, consistent }
}

/// Upper-triangular elements of `GSp_4(F_5)` by exhaustive search.
pub fn borel_elements() -> Vec<MatF5> {
    let mut out = Vec::new();
    for diag in 0..256u16 {
        let d: [i64; 4] = core::array::from_fn(|i| 1 + ((diag >> (2 * i)) & 3) as i64);
        if (d[0] * d[3] - d[1] * d[2]) % 5 != 0 {
            continue;
        }
        for upper in 0..15625u32 {
            let mut x = upper;
            let mut next = || {
                let v = (x % 5) as i64;
                x /= 5;
                v
            };
            let rows = [
                [d[0], next(), next(), next()],
                [0, d[1], next(), next()],
                [0, 0, d[2], next()],
                [0, 0, 0, d[3]],
            ];
            let m = MatF5::from_rows(rows);
            if similitude(m).is_ok() {
                out.push(m);
            }
        }
    }
    out
}

/// Generators of the upper-triangular Borel subgroup: three torus elements,
/// the three root elements of the unipotent radical and one in the Levi.
pub fn borel_generators() -> [MatF5; 7] {
    [
        MatF5::from_rows([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [0, 0, 0, 1]]),
        MatF5::from_rows([[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 2]]),
        MatF5::from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]]),
        unipotent(1, 0, 0),
        unipotent(0, 1, 0),
        unipotent(0, 0, 1),
        MatF5::from_rows([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]),
    ]
}

/// Which Borel elements fail to normalise `group` (empty when all do).
pub fn borel_counterexamples(group: &GroupClosure, borel: &[MatF5]) -> Vec<MatF5> {
    borel
        .iter()
        .copied()
        .filter(|&b| !group.normalized_by(b, similitude(b).expect("borel element")))
        .collect()
}

/// The double coset `B w B` by breadth-first search from `w` under left and
/// right multiplication by `gens`.
pub fn double_coset(w: MatF5, gens: &[MatF5]) -> HashSet<u64> {
    let mut seen = HashSet::new();
    seen.insert(w.0);
    let mut queue = VecDeque::from([w]);
    while let Some(m) = queue.pop_front() {
        for &g in gens {
            for n in [g.mul(m), m.mul(g)] {
                if seen.insert(n.0) {
                    queue.push_back(n);
                }
            }
        }
    }
    seen
}

/// Sizes of `B`, `B w B` and their union, and whether the union lies in
/// the parabolic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BruhatCover {
    pub borel: usize,
    pub cell: usize,
    pub union: usize,
    pub union_in_parabolic: bool,
}

pub fn bruhat_cover(borel: &[MatF5], w: MatF5) -> BruhatCover {
    let cell = double_coset(w, &borel_generators());
    let mut union: HashSet<u64> = cell.clone();
    union.extend(borel.iter().map(|m| m.0));
    BruhatCover {
        borel: borel.len(),
        cell: cell.len(),
        union: union.len(),
        union_in_parabolic: union.iter().all(|&b| in_parabolic(MatF5(b))),
    }
}

/// `|P| = |F_5^*| |GL_2(F_5)| |U|`, counting `GL_2` by enumeration.
pub fn parabolic_order() -> usize {
    let gl2 = (0..625u16)
        .filter(|x| {
            let e = [x % 5, x / 5 % 5, x / 25 % 5, x / 125];
            (e[0] * e[3] + 4 * (e[1] * e[2])) % 5 != 0
        })
        .count();
    4 * gl2 * 125
}

/// Generators of `Sp_4(F_5)`: the monodromy matrices, a torus element
/// outside their span, and the form matrix, which is itself symplectic and
/// moves `<e_1>`.
pub fn sp4_generators() -> [MatF5; 5] {
    let [a, b, c] = generators(1).expect("kappa = 1");
    [a, b, c, MatF5::from_rows([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 3]]), FORM]
}

/// `diag(mu, mu, 1, 1)`, of similitude `mu`.
pub fn similitude_representative(mu: u8) -> MatF5 {
    let m = mu as i64;
    MatF5::from_rows([[m, 0, 0, 0], [0, m, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
}

/// `|Sp_4(F_q)| = q^4 (q^2 - 1)(q^4 - 1)`.
pub const SP4_ORDER: usize = 625 * 24 * 624;
/// `|GSp_4(F_5)| = 4 |Sp_4(F_5)|`.
pub const GSP4_ORDER: usize = 4 * SP4_ORDER;

/// Orbit of the line through `e_1` under `gens`, lines normalised to have
/// first nonzero coordinate 1.
pub fn line_orbit(gens: &[MatF5]) -> usize {
    fn normalise(v: [u8; 4]) -> [u8; 4] {
        let lead = v.iter().copied().find(|&x| x != 0).expect("nonzero vector");
        v.map(|x| x * INV[lead as usize] % Q)
    }
    let start = [1u8, 0, 0, 0];
    let mut seen = HashSet::new();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for g in gens {
            let e = g.entries();
            let w: [u8; 4] = core::array::from_fn(|i| ((0..4).map(|k| e[i][k] as u16 * v[k] as u16).sum::<u16>() % 5) as u8);
            let w = normalise(w);
            if seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen.len()
}

/// Tally of an exhaustive normaliser sweep over some part of `GSp_4(F_5)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NormalizerTally {
    pub checked: u64,
    pub normalizers: u64,
    pub outside_parabolic: Vec<MatF5>,
}

impl NormalizerTally {
    pub fn merge(mut self, other: NormalizerTally) -> Self {
        self.checked += other.checked;
        self.normalizers += other.normalizers;
        self.outside_parabolic.extend(other.outside_parabolic);
        self
    }
}

/// Checks `s * diag(mu, mu, 1, 1)` for every `s` in `sp4` and `mu` in `F_5^*`.
pub fn normalizer_sweep(group: &GroupClosure, sp4: impl Iterator<Item = MatF5>) -> NormalizerTally {
    let reps: [MatF5; 4] = core::array::from_fn(|i| similitude_representative(i as u8 + 1));
    let mut tally = NormalizerTally::default();
    for s in sp4 {
        for (i, &d) in reps.iter().enumerate() {
            let g = s.mul(d);
            tally.checked += 1;
            if group.normalized_by(g, i as u8 + 1) {
                tally.normalizers += 1;
                if !in_parabolic(g) {
                    tally.outside_parabolic.push(g);
                }
            }
        }
    }
    tally
}
