//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::Instant;

use rug::Integer;

use bsd2_core::arith::{kronecker, primes_up_to, Val2};
use bsd2_core::config::Config;
use bsd2_core::curve::{ap_naive, classify_aq_mod4, quadratic_twist, CurveModel};
use bsd2_core::descent::{sel2_bound, ShaConclusion};
use bsd2_core::family::{
    sieve_s, tamagawa_table, verify_family, verify_twist, FamilyContext, SieveSpec, Status, TwistReport, VerifyOptions,
};
use bsd2_core::lvalue::{algebraic_l_value, periods};
use bsd2_core::modsym::{build_space, eigen_functional, identity_suite, ms1_at_primes, Sign};

fn curve(a: [i64; 5]) -> CurveModel {
    CurveModel::from_i64(a).unwrap()
}

const X0_14: [i64; 5] = [1, 0, 1, 4, -6];
const C34: [i64; 5] = [1, 0, 0, -3, 1];
const C56: [i64; 5] = [0, -1, 0, 0, -4];
const C99: [i64; 5] = [1, -1, 0, -15, 8];
const C46: [i64; 5] = [1, -1, 0, -10, -12];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn criterion_1() -> Outcome {
    let cases: [(&str, [i64; 5], (i64, i64)); 5] =
        [("14A1", X0_14, (1, 6)), ("34A1", C34, (1, 6)), ("56B1", C56, (1, 6)), ("99C1", C99, (1, 2)), ("46A1", C46, (1, 2))];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, a, (p, q)) in cases {
        let t = Instant::now();
        let l = algebraic_l_value(&curve(a), None);
        let secs = t.elapsed().as_secs_f64();
        match l {
            Ok(l) => {
                let good = l.value == rug::Rational::from((p, q)) && secs < 5.0;
                ok &= good;
                parts.push(format!(
                    "{label}={}/{}{} ({secs:.2}s)",
                    l.value.numer(),
                    l.value.denom(),
                    if good { String::new() } else { format!(" expected {p}/{q}") }
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

fn criterion_2() -> Outcome {
    let x0_14 = vec![5, 13, 61, 101, 157, 173, 181, 229, 269, 293, 349, 397];
    let cases: [(&str, [i64; 5], u64, bool, Vec<u64>); 5] = [
        ("14A1", X0_14, 400, false, x0_14.clone()),
        ("34A1", C34, 400, false, vec![5, 29, 37, 61, 109, 173, 181, 197, 269, 277, 317, 397]),
        ("56B1", C56, 400, false, x0_14),
        ("99C1", C99, 390, false, vec![5, 53, 89, 113, 137, 257, 269, 317, 353, 389]),
        ("46A1", C46, 380, true, vec![5, 37, 53, 61, 149, 157, 181, 229, 293, 373]),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, a, bound, aq, expected) in cases {
        match sieve_s(&SieveSpec { curve: curve(a), bound, require_aq_nonzero: aq }) {
            Ok(got) => {
                let good = got == expected;
                ok &= good;
                parts.push(format!("{label}: {} primes{}", got.len(), if good { "" } else { " (differs)" }));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{label}: {e}"));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

struct Grid {
    label: &'static str,
    reports: Vec<TwistReport>,
    errors: Vec<String>,
}

/// Runs the r = 1, 2, 3 grid for one curve with the symbol path enabled.
fn run_grid(
    label: &'static str,
    a: [i64; 5],
    aq_nonzero: bool,
    r1_bound: u64,
    r2_bound: u64,
    expected: [&[u64]; 3],
) -> (Grid, Vec<String>) {
    let ctx = FamilyContext::new(Some(label.into()), &curve(a), Config::default(), aq_nonzero).unwrap();
    let mut problems = Vec::new();
    let r1 = ctx.products(1, r1_bound).unwrap();
    let r2 = ctx.products(2, r2_bound).unwrap();
    let r3 = ctx.first_products(3, 3).unwrap();
    for (r, got, want) in [(1, &r1, expected[0]), (2, &r2, expected[1]), (3, &r3, expected[2])] {
        if got.as_slice() != want {
            problems.push(format!("{label} r={r} moduli {got:?} differ from {want:?}"));
        }
    }
    let ms: Vec<u64> = r1.iter().chain(&r2).chain(&r3).copied().collect();
    let opts = VerifyOptions { with_selmer: false, with_modsym: true };
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for res in verify_family(&ctx, &ms, opts) {
        match res {
            Ok(r) => reports.push(r),
            Err(e) => errors.push(format!("{label}: {e}")),
        }
    }
    (Grid { label, reports, errors }, problems)
}

fn criterion_3(grids: &[Grid], problems: &[String], secs: f64) -> Outcome {
    let mut ok = problems.is_empty() && secs < 600.0;
    let mut parts: Vec<String> = problems.to_vec();
    for g in grids {
        ok &= g.errors.is_empty();
        parts.extend(g.errors.iter().cloned());
        let mut per_r = [(0, 0); 3];
        for rep in &g.reports {
            let good = rep.ord2_computed == Some(Val2::Finite(rep.r as i64 - 1))
                && rep.checks.iter().filter(|c| c.name == "ord2" || c.name == "nonvanishing").all(|c| c.passed);
            per_r[rep.r as usize - 1].0 += 1;
            if good {
                per_r[rep.r as usize - 1].1 += 1;
            } else {
                ok = false;
                parts.push(format!("{} M={} ord2={:?}", g.label, rep.m, rep.ord2_computed));
            }
        }
        parts.push(format!(
            "{}: r1 {}/{}, r2 {}/{}, r3 {}/{}",
            g.label, per_r[0].1, per_r[0].0, per_r[1].1, per_r[1].0, per_r[2].1, per_r[2].0
        ));
    }
    parts.push(format!("{secs:.1}s"));
    outcome(ok, parts.join("; "))
}

fn criterion_4() -> Outcome {
    let e = curve(X0_14);
    let mut checked = 0;
    let mut bad = Vec::new();
    for q in primes_up_to(1999).into_iter().filter(|&q| q != 2 && q != 7) {
        let aq = ap_naive(&e, q);
        checked += 1;
        if aq.rem_euclid(4) as u8 != classify_aq_mod4(q) {
            bad.push(q);
        }
    }
    outcome(bad.is_empty(), format!("{checked} primes, exceptions {bad:?}"))
}

fn criterion_5() -> Outcome {
    let cases: [(&str, [i64; 5], u64, &[u64]); 2] = [("14A1", X0_14, 14, &[5, 13, 65, 3965]), ("99C1", C99, 99, &[5, 53, 265])];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, a, level, ms) in cases {
        let psi = match eigen_functional(build_space(level), &curve(a), Sign::Plus) {
            Ok(p) => p,
            Err(e) => return outcome(false, format!("{label}: {e}")),
        };
        let mut rows = ms1_at_primes(&psi, 50);
        for &m in ms {
            match identity_suite(&psi, m) {
                Ok(r) => rows.extend(r),
                Err(e) => {
                    ok = false;
                    parts.push(format!("{label} m={m}: {e}"));
                }
            }
        }
        let failed: Vec<String> = rows.iter().filter(|r| !r.passed).map(|r| format!("{} m={}", r.identity, r.m)).collect();
        ok &= failed.is_empty();
        parts.push(format!("{label}: {}/{} exact identities", rows.len() - failed.len(), rows.len()));
        parts.extend(failed);
    }
    outcome(ok, parts.join("; "))
}

fn ord2_c(table: &[bsd2_core::curve::ReductionData], p: u64) -> u32 {
    table.iter().find(|rd| rd.prime == p).map(|rd| rd.tamagawa.trailing_zeros()).unwrap_or(0)
}

fn criterion_6() -> Outcome {
    let e = curve(X0_14);
    let mut ok = true;
    let mut parts = Vec::new();
    for m in [5u64, 13, 65] {
        let tw = quadratic_twist(&e, &Integer::from(m)).unwrap();
        let t = tamagawa_table(&tw);
        let components = periods(&tw).real_components;
        let mut good = components == 1 && ord2_c(&t, 2) == 1 && ord2_c(&t, 7) == 0;
        for q in bsd2_core::arith::factor_u64(m).into_iter().map(|(q, _)| q) {
            let expected = if kronecker(-7, q as i64) == 1 { 2 } else { 1 };
            good &= ord2_c(&t, q) == expected;
        }
        ok &= good;
        parts.push(format!("M={m} {}", if good { "ok" } else { "differs" }));
    }
    let t46 = tamagawa_table(&curve(C46));
    let c = |p: u64| t46.iter().find(|rd| rd.prime == p).map(|rd| rd.tamagawa);
    let good46 = c(2) == Some(2) && c(23) == Some(1);
    ok &= good46;
    parts.push(format!("46A1 c2={:?} c23={:?}", c(2), c(23)));
    outcome(ok, parts.join(", "))
}

fn criterion_7(grids: &[Grid]) -> Outcome {
    let mut ok = true;
    let mut n = 0;
    let mut parts = Vec::new();
    for g in grids {
        for rep in &g.reports {
            n += 1;
            if rep.torsion.two_torsion_order != 2 || rep.torsion.structure != vec![2] {
                ok = false;
                parts.push(format!("{} M={} torsion {}", g.label, rep.m, rep.torsion));
            }
        }
    }
    parts.insert(0, format!("{n} twists"));
    outcome(ok, parts.join(", "))
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    let t = Instant::now();
    match sel2_bound(&curve(X0_14)) {
        Ok(s) => {
            let good = s.sel2_lower == 1 && s.exact_sequence_upper() == 1;
            ok &= good;
            parts.push(format!("dim Sel2(14A1) = {}", if good { "1".into() } else { format!("in [{}, {}]", s.sel2_lower, s.exact_sequence_upper()) }));
        }
        Err(e) => {
            ok = false;
            parts.push(e.to_string());
        }
    }
    parts.push(format!("({:.2}s)", t.elapsed().as_secs_f64()));
    for (label, a, m) in [("14A1", X0_14, 5i64), ("14A1", X0_14, 65), ("46A1", C46, 185)] {
        let ctx = FamilyContext::new(Some(label.into()), &curve(a), Config::default(), label == "46A1").unwrap();
        let tw = quadratic_twist(&ctx.curve, &Integer::from(m)).unwrap();
        let t = Instant::now();
        let desc = sel2_bound(&tw);
        let secs = t.elapsed().as_secs_f64();
        let rep = verify_twist(&ctx, m, VerifyOptions { with_selmer: true, with_modsym: false });
        match (desc, rep) {
            (Ok(_), Ok(rep)) => {
                let sha = rep.selmer.as_ref().map(|s| s.sha2_conclusion);
                let ledger = rep.bsd2_ledger.as_ref();
                let good = sha == Some(ShaConclusion::Trivial)
                    && ledger.and_then(|l| l.balanced) == Some(true)
                    && rep.status == Status::Verified
                    && secs < 30.0;
                ok &= good;
                parts.push(format!(
                    "{label}^({m}): Sha[2]=0 {}, ledger {} ({secs:.2}s)",
                    sha == Some(ShaConclusion::Trivial),
                    ledger.map(|l| l.display()).unwrap_or_default()
                ));
            }
            (Err(e), _) => {
                ok = false;
                parts.push(format!("{label}^({m}): {e}"));
            }
            (_, Err(e)) => {
                ok = false;
                parts.push(format!("{label}^({m}): {e}"));
            }
        }
    }
    outcome(ok, parts.join("; "))
}

fn criterion_9(grids: &[Grid]) -> Outcome {
    let mut ok = true;
    let mut n = 0;
    let mut parts = Vec::new();
    for g in grids {
        for rep in &g.reports {
            match &rep.cross_path {
                Some(c) => {
                    n += 1;
                    if !(c.agrees && c.check.passed) {
                        ok = false;
                        parts.push(format!("{} M={}: symbols {} vs {:?}", g.label, rep.m, c.ord2_from_symbols, rep.ord2_computed));
                    }
                }
                None => {
                    ok = false;
                    parts.push(format!("{} M={}: symbol path did not run {:?}", g.label, rep.m, rep.notes));
                }
            }
        }
    }
    parts.insert(0, format!("{n} twists on both paths"));
    outcome(ok, parts.join(", "))
}

fn main() {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "base L-values", criterion_1()));
    results.push((2, "sieve reproduction", criterion_2()));

    let t = Instant::now();
    let mut grids = Vec::new();
    let mut problems = Vec::new();
    let specs: [(&'static str, [i64; 5], bool, [&[u64]; 3]); 3] = [
        (
            "14A1",
            X0_14,
            false,
            [
                &[5, 13, 61, 101, 157, 173, 181, 229, 269, 293, 349, 397],
                // pairwise products of the r = 1 list up to 2000
                &[65, 305, 505, 785, 793, 865, 905, 1145, 1313, 1345, 1465, 1745, 1985],
                &[3965, 6565, 10205],
            ],
        ),
        (
            "99C1",
            C99,
            false,
            [
                &[5, 53, 89, 113, 137, 257, 269, 317, 353, 389],
                &[265, 445, 565, 685, 1285, 1345, 1585, 1765, 1945],
                &[23585, 29945, 36305],
            ],
        ),
        (
            "46A1",
            C46,
            true,
            [
                &[5, 37, 53, 61, 149, 157, 181, 229, 293, 373],
                &[185, 265, 305, 745, 785, 905, 1145, 1465, 1865, 1961],
                &[9805, 11285, 16165],
            ],
        ),
    ];
    for (label, a, aq, expected) in specs {
        let r1_bound = if label == "14A1" { 400 } else { 390 };
        let (g, p) = run_grid(label, a, aq, r1_bound, 2000, expected);
        grids.push(g);
        problems.extend(p);
    }
    let grid_secs = t.elapsed().as_secs_f64();
    results.push((3, "twist grid ord2 = r - 1", criterion_3(&grids, &problems, grid_secs)));
    results.push((4, "a_q mod 4 table", criterion_4()));
    results.push((5, "exact identity suite", criterion_5()));
    results.push((6, "Tamagawa valuations", criterion_6()));
    results.push((7, "torsion of twists", criterion_7(&grids)));
    results.push((8, "descent and ledger", criterion_8()));
    results.push((9, "cross-path consistency", criterion_9(&grids)));

    let mut failed = 0;
    for (n, name, o) in &results {
        println!("{} [{n}] {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
