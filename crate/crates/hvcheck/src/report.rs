//! Pass/fail reports for the group-theoretic, period, boundary and
//! character checks.

use std::fmt;
use std::io::{self, Write};

use hvcheck_core::boundary::{boundary_total, closed_form, torus_bruteforce};
use hvcheck_core::charelim::{character_row, eliminate, zp_reducible_test, CharCandidate, Observation};
use hvcheck_core::elliptic::{ap_naive, is_supersingular, CURVE_14A4};
use hvcheck_core::monodromy::{
    borel_counterexamples, borel_elements, borel_generators, bruhat_cover, generators, line_orbit, parabolic_order,
    sp4_generators, verify_image_structure, weyl_normalizer_classes, word_eval, GroupClosure, WeylClass, GSP4_ORDER,
    OMEGA, WORD_IDENTITIES,
};
use hvcheck_core::picardfuchs::{intersection_checks, period_coeffs, recover_recurrence, singular_locus, RatPoly};
use hvcheck_core::pointcount::{trace_h3, Parameter};
use hvcheck_core::zeta::{split_traces, EulerSplit, TraceData};
use num_bigint::BigInt;

use crate::engine;
use crate::sweep::SweepReport;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report { title: title.into(), checks: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    /// Records an error as a failed check.
    pub fn fail(&mut self, name: impl Into<String>, err: impl fmt::Display) {
        self.check(name, false, err.to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn write(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "== {}", self.title)?;
        for c in &self.checks {
            let mark = if c.passed { "pass" } else { "FAIL" };
            writeln!(out, "[{mark}] {}: {}", c.name, c.detail)?;
        }
        writeln!(out, "{}: {}", self.title, if self.passed() { "pass" } else { "FAIL" })
    }
}

pub fn monodromy_group() -> GroupClosure {
    GroupClosure::generate(&generators(1).expect("kappa = 1"), GroupClosure::DEFAULT_CAP).expect("finite group")
}

pub fn monodromy_structure() -> Report {
    let mut r = Report::new("monodromy structure");
    let group = monodromy_group();
    r.check("order", group.order() == 15000, format!("|J| = {}", group.order()));
    let s = verify_image_structure(&group);
    r.check("parabolic", s.all_parabolic, "every element fixes the line <e1>");
    r.check("unipotent radical", s.contains_unipotent_radical(), format!("{} of 125 elements of U in J", s.unipotent_found));
    r.check(
        "Levi intersection",
        s.levi_intersection == 120 && s.levi_blocks_are_sl2,
        format!("|J n L| = {}, blocks are SL2(F5): {}", s.levi_intersection, s.levi_blocks_are_sl2),
    );
    r.check("Levi projection", s.levi_projection_special, "scalars 1, block determinant 1");
    let g = generators(1).expect("kappa = 1");
    for (word, expected) in WORD_IDENTITIES {
        match word_eval(word, &g) {
            Ok(m) => r.check(format!("word {word}"), m == expected, format!("{:?}", m.signed_rows())),
            Err(e) => r.fail(format!("word {word}"), e),
        };
    }
    r
}

pub fn normalizer() -> Report {
    let mut r = Report::new("monodromy normaliser");
    let group = monodromy_group();
    let survey = weyl_normalizer_classes(&group);
    let omega = WeylClass::of(OMEGA).expect("monomial");
    let survivors = survey.survivors();
    r.check("Weyl classes", survey.consistent, format!("{} classes, each consistent", survey.classes.len()));
    r.check(
        "Weyl survivors",
        survivors == [WeylClass::IDENTITY, omega] || survivors == [omega, WeylClass::IDENTITY],
        format!("{:?}", survivors.iter().map(|c| c.perm).collect::<Vec<_>>()),
    );
    let borel = borel_elements();
    let by_generators = GroupClosure::generate(&borel_generators(), GroupClosure::DEFAULT_CAP).expect("finite group");
    let same = borel.len() == by_generators.order() && borel.iter().all(|&b| by_generators.contains(b));
    r.check("Borel order", borel.len() == 40000 && same, format!("{} by enumeration, {} from generators", borel.len(), by_generators.order()));
    let bad = borel_counterexamples(&group, &borel);
    r.check("Borel normalises", bad.is_empty(), format!("{} counterexamples", bad.len()));
    let cover = bruhat_cover(&borel, OMEGA);
    r.check(
        "B u BwB = P",
        cover.union == 240000 && cover.union == parabolic_order() && cover.union_in_parabolic,
        format!("|B| = {}, |BwB| = {}, union {}, |P| = {}", cover.borel, cover.cell, cover.union, parabolic_order()),
    );
    let orbit = line_orbit(&sp4_generators());
    r.check(
        "index of P",
        orbit == 156 && GSP4_ORDER / parabolic_order() == 156,
        format!("{orbit} lines, |GSp4| / |P| = {}", GSP4_ORDER / parabolic_order()),
    );
    r
}

pub fn exhaustive(sweep: &SweepReport) -> Report {
    let mut r = Report::new("exhaustive normaliser");
    let t = &sweep.tally;
    r.check("Sp4 order", sweep.sp4_order == hvcheck_core::monodromy::SP4_ORDER, format!("{}", sweep.sp4_order));
    r.check("elements checked", t.checked as usize == GSP4_ORDER, format!("{}", t.checked));
    r.check("N(J) in P", t.outside_parabolic.is_empty(), format!("|N(J)| = {}, outside P: {}", t.normalizers, t.outside_parabolic.len()));
    r
}

/// The leading polynomial `(phi - 1)(9 phi - 1)(25 phi - 1)`, constant term first.
const LEADING: [i64; 4] = [-1, 35, -259, 225];

pub fn picard_fuchs(nmax: usize) -> Report {
    let mut r = Report::new("Picard-Fuchs");
    let a = period_coeffs(nmax + 10);
    let head: Vec<u64> = a[..4].iter().map(|x| u64::try_from(x).expect("small")).collect();
    r.check("period coefficients", head == [1, 5, 45, 545], format!("{head:?}"));
    let op = match recover_recurrence(&a, nmax + 1) {
        Ok(op) => op,
        Err(e) => {
            r.fail("recurrence", e);
            return r;
        }
    };
    r.check("recurrence", true, format!("one-dimensional nullspace from {} coefficients", nmax + 1));
    let s4 = op.s(4);
    let prim = s4.primitive().unwrap_or_default();
    let expected: Vec<BigInt> = LEADING.iter().map(|&c| c.into()).collect();
    r.check("leading polynomial", prim == expected, format!("S4 ~ {}", RatPoly::from_ints(&LEADING)));
    match singular_locus(&op) {
        Ok(l) => {
            let text: Vec<String> = l.iter().map(|p| p.to_string()).collect();
            r.check("singular locus", text == ["0", "1/25", "1/9", "1", "oo"], text.join(", "))
        }
        Err(e) => {
            r.fail("singular locus", e);
        }
    };
    r.check(
        "further coefficients",
        op.holds_on(&a, nmax + 1..nmax + 11),
        format!("n = {}..{}", nmax + 1, nmax + 10),
    );
    let x = intersection_checks(-1);
    r.check(
        "intersection form",
        x.passed(),
        format!("det {} (5-adic valuation {}), standard form via N sigma + tau", x.determinant, x.det_val5),
    );
    r
}

pub fn boundary(p: u64) -> Report {
    let mut r = Report::new(format!("boundary strata at p = {p}"));
    let count = match boundary_total(p) {
        Ok(c) => c,
        Err(e) => {
            r.fail("stratified total", e);
            return r;
        }
    };
    for (s, n) in &count.rows {
        r.check(
            s.name(),
            *n == s.expected_count(p),
            format!("{n} points x {} translates (expected {})", s.multiplicity, s.expected_count(p)),
        );
    }
    r.check("stratified total", count.total == closed_form(p), format!("{} = 50p^2 + 40p + 20", count.total));
    if p <= 31 {
        match (torus_bruteforce(p, Parameter::MINUS_SEVEN), engine::count(p, 1, Parameter::MINUS_SEVEN, 1)) {
            (Ok(torus), Ok(c)) => r.check(
                "torus + boundary",
                torus + count.total == c.total,
                format!("{torus} + {} = {} (count {})", count.total, torus + count.total, c.total),
            ),
            (Err(e), _) => {
                r.fail("torus + boundary", e);
            }
            (_, Err(e)) => {
                r.fail("torus + boundary", e);
            }
        };
    }
    r
}

/// Primes whose Frobenius data drive the elimination.
pub const ELIMINATION_PRIMES: [u64; 5] = [31, 113, 29, 13, 17];

/// Expected `(psi1, psi2, psi3)` values, signed.
pub const PSI_TABLE: [(u64, [i8; 3]); 5] =
    [(31, [1, -1, -1]), (113, [1, 1, 1]), (29, [2, 1, 1]), (13, [2, 1, -1]), (17, [1, 1, -1])];

/// Splits at the elimination primes from point counts: both traces where
/// `p^2` is in range, else the first trace with `b_p` from 14.a4.
pub fn observations(threads: usize, square_limit: u64) -> Result<Vec<(Observation, EulerSplit)>, String> {
    let mut out = Vec::new();
    for p in ELIMINATION_PRIMES {
        let c1 = engine::count(p, 1, Parameter::MINUS_SEVEN, threads).map_err(|e| e.to_string())?.total;
        let t1 = trace_h3(p, 1, c1).map_err(|e| e.to_string())?;
        let split = if p <= square_limit {
            let c2 = engine::count(p, 2, Parameter::MINUS_SEVEN, threads).map_err(|e| e.to_string())?.total;
            let t2 = trace_h3(p, 2, c2).map_err(|e| e.to_string())?;
            split_traces(&TraceData::new(p, t1, t2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
        } else {
            let b = ap_naive(&CURVE_14A4, p).map_err(|e| e.to_string())?;
            EulerSplit::from_first_trace(p, t1, b).map_err(|e| e.to_string())?
        };
        out.push((Observation::from_split(p, split), split));
    }
    Ok(out)
}

pub fn charelim(threads: usize) -> Report {
    let mut r = Report::new("residual characters");
    let obs = match observations(threads, 31) {
        Ok(o) => o,
        Err(e) => {
            r.fail("observations", e);
            return r;
        }
    };
    for (o, s) in &obs {
        r.check(format!("p = {}", o.p), true, format!("(u, v) = ({}, {}), {{alpha p, beta}} = {}", s.u, s.v, o.pair));
    }
    for (p, psi) in PSI_TABLE {
        match character_row(p) {
            Ok(row) => r.check(format!("psi at {p}"), row.psi == psi, format!("{:?}", row.psi)),
            Err(e) => {
                r.fail(format!("psi at {p}"), e);
            }
        };
    }
    let observations: Vec<Observation> = obs.iter().map(|x| x.0).collect();
    match eliminate(&observations) {
        Ok(s) => r.check(
            "survivors",
            s == [CharCandidate::TRIVIAL],
            s.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "),
        ),
        Err(e) => {
            r.fail("survivors", e);
        }
    };
    match zp_reducible_test(&observations) {
        Ok(t) => r.check("reducible case at 113", t, "no psi gives Z_113 in the observed pair"),
        Err(e) => {
            r.fail("reducible case at 113", e);
        }
    };
    match is_supersingular(&CURVE_14A4, 5) {
        Ok(s) => r.check("supersingular at 5", s, "a_5(14.a4) = 0"),
        Err(e) => {
            r.fail("supersingular at 5", e);
        }
    };
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_pass() {
        for report in [monodromy_structure(), picard_fuchs(40), boundary(13), charelim(1)] {
            assert!(report.passed(), "{report:?}");
        }
        assert!(!boundary(7).passed());
        let mut out = Vec::new();
        boundary(5).write(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.contains("[pass] stratified total: 1470 = 50p^2 + 40p + 20"), "{text}");
    }

    #[test]
    fn normalizer_report() {
        let n = normalizer();
        assert!(n.passed(), "{n:?}");
    }

    #[test]
    fn picard_fuchs_needs_enough_terms() {
        assert!(!picard_fuchs(10).passed());
    }
}
