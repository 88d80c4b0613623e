//! Acceptance run: one line per criterion.
//!
//! Criteria 5 and 10 contain identities that do not hold as stated for odd q
//! (see the README). They are run literally and print FAIL; the target only
//! fails when a result differs from that known analysis or any other
//! criterion fails.

use std::process::Command;
use std::time::Instant;

use drinfeld_core::exactfield::{make_extension, Gf, GfRing, Poly, Ring};
use drinfeld_core::moduli::{classify_by_jtilde, jtilde_series_check, ModuliReport};
use drinfeld_core::report::{Check, Status, SuiteReport};
use drinfeld_core::skew::moore_det;
use drinfeld_core::suites::run_suite;
use drinfeld_core::torsionlab::{weil_property_suite, WeilLabConfig, DEFAULT_K_MAX};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    /// A failure that matches the documented analysis.
    known: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Verdict { passed, known: false, detail: detail.into() }
    }
}

fn ok(c: Option<&Check>) -> bool {
    c.is_some_and(|c| c.status == Status::Pass)
}

fn fitted<'a>(c: Option<&'a Check>, key: &str) -> Option<&'a str> {
    c.and_then(|c| c.fitted.get(key)).map(String::as_str)
}

fn suite(name: &str, q: u64, n: i64, level: Option<&str>) -> SuiteReport {
    let fq = drinfeld_core::exactfield::FiniteField::fq(q).unwrap();
    let a = level.map(|s| drinfeld_core::suites::parse_poly(&fq, s).unwrap());
    run_suite(name, q, n, a.as_ref()).unwrap()
}

fn level_order(q: u64) -> i64 {
    (2 * q * q * q).min(60) as i64
}

const H_CASES: [(u64, i64); 4] = [(2, 64), (3, 81), (4, 64), (5, 60)];

fn criterion_1_2() -> (Verdict, Verdict) {
    let mut c1 = Vec::new();
    let mut c2 = Vec::new();
    let (mut p1, mut p2) = (true, true);
    for (q, n) in H_CASES {
        let start = Instant::now();
        let r = suite("aexp-vs-product", q, n, None);
        let secs = start.elapsed().as_secs_f64();
        let eq = ok(r.check("product_equals_aexpansion")) && secs < 60.0;
        let shape = ok(r.check("leading_term_minus_t")) && ok(r.check("exponents_one_mod_q_minus_1"));
        p1 &= eq;
        p2 &= shape;
        c1.push(format!("q={q} N={n} {} {secs:.1}s", if eq { "equal" } else { "DIFFER" }));
        c2.push(format!("q={q} {}", if shape { "ok" } else { "BAD" }));
    }
    (Verdict::new(p1, c1.join(", ")), Verdict::new(p2, c2.join(", ")))
}

fn criterion_3() -> Verdict {
    let mut detail = Vec::new();
    let mut passed = true;
    for q in [2, 3] {
        let n = level_order(q);
        let r = suite("delta-root", q, n, None);
        let good = ok(r.check("delta_root_vs_dprod")) && ok(r.check("delta_leading_term"));
        passed &= good;
        detail.push(format!("q={q} N={n} {}", if good { "ok" } else { "FAIL" }));
    }
    Verdict::new(passed, detail.join(", "))
}

fn criterion_4() -> Verdict {
    let mut detail = Vec::new();
    let mut passed = true;
    for q in [2, 3] {
        let n = level_order(q);
        let r = suite("theorem1", q, n, None);
        let good = ["moore_det2", "h1", "h2", "alternating"].iter().all(|c| ok(r.check(c)));
        passed &= good;
        detail.push(format!(
            "q={q} N={n} {} varsigma={} c={}",
            if good { "ok" } else { "FAIL" },
            fitted(r.check("h1"), "varsigma").unwrap_or("-"),
            fitted(r.check("alternating"), "c_alternating").unwrap_or("-"),
        ));
    }
    Verdict::new(passed, detail.join(", "))
}

fn criterion_5() -> Verdict {
    let mut detail = Vec::new();
    let mut passed = true;
    let mut as_analysed = true;
    for q in [2u64, 3, 5] {
        let r = suite("serre", q, 40, None);
        let literal = r.check("serre_literal");
        let normalized = fitted(r.check("serre_weight_normalized"), "sigma_normalized");
        passed &= ok(literal);
        // literal identity holds only in characteristic 2; the weight-normalized one everywhere
        as_analysed &= ok(literal) == (q == 2) && normalized == Some("1");
        detail.push(match fitted(literal, "sigma") {
            Some(s) => format!("q={q} sigma={s}"),
            None => format!(
                "q={q} no sign (first mismatch t^{}), normalized sigma={}",
                literal.and_then(|c| c.first_mismatch).unwrap_or(-1),
                normalized.unwrap_or("-")
            ),
        });
    }
    Verdict { passed, known: !passed && as_analysed, detail: detail.join(", ") }
}

fn criterion_6() -> Verdict {
    let mut detail = Vec::new();
    let mut passed = true;
    for q in [3, 2] {
        for a in ["T", "T+1"] {
            let r = suite("weil-series", q, 30, Some(a));
            passed &= r.passed;
            detail.push(format!("q={q} a={a} {}", if r.passed { "ok" } else { "FAIL" }));
        }
    }
    Verdict::new(passed, detail.join(", "))
}

fn criterion_7() -> Verdict {
    let mut detail = Vec::new();
    let mut passed = true;
    for q in [2, 3] {
        let r = suite("det-torsion", q, level_order(q), None);
        passed &= r.passed;
        detail.push(format!("q={q} {}", if r.passed { "ok" } else { "FAIL" }));
    }
    Verdict::new(passed, detail.join(", "))
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut detail = Vec::new();
    let mut passed = true;
    for n in [1, 2] {
        for a in ["T", "T^2"] {
            let level = if a == "T" { Poly::var() } else { Poly::monomial(Gf(1), 2) };
            let cfg = WeilLabConfig { q: 3, n, gamma_t: Gf(1), level, trials: 25, seed: 7, k_max: DEFAULT_K_MAX };
            let r = weil_property_suite(&cfg).unwrap();
            let mut names = vec!["pairing_in_psi_torsion", "alternating", "fq_bilinear"];
            if a == "T" {
                names.push("moore_for_degree_one");
            }
            let check = |n: &str| r.checks.iter().find(|c| c.name == n);
            let good = r.modules.len() == 25
                && names.iter().all(|n| ok(check(n)))
                && check("nondegenerate").is_some_and(|c| c.status == Status::Recorded);
            passed &= good;
            detail.push(format!(
                "n={n} a={a} {} nondegenerate {}",
                if good { "ok" } else { "FAIL" },
                fitted(check("nondegenerate"), "holds").unwrap_or("-")
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    passed &= secs < 120.0;
    detail.push(format!("{secs:.1}s"));
    Verdict::new(passed, detail.join(", "))
}

/// `prod_i prod_{c in F_q^i} (x_i + sum c_j x_j)`.
fn moore_product(f: &GfRing, xs: &[Gf]) -> Gf {
    let q = f.base().order() as usize;
    let mut acc = Gf(1);
    for i in 0..xs.len() {
        for idx in 0..q.pow(i as u32) {
            let mut r = idx;
            let mut s = xs[i];
            for xj in &xs[..i] {
                s = f.add(&s, &f.mul(&Gf((r % q) as u32), xj));
                r /= q;
            }
            acc = f.mul(&acc, &s);
        }
    }
    acc
}

fn criterion_9() -> Verdict {
    let f81 = GfRing::new(&make_extension(3, 4).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut mismatches = 0;
    for n in 1..=3 {
        for _ in 0..100 {
            let xs: Vec<Gf> = (0..n).map(|_| Gf(rng.gen_range(0..81))).collect();
            if moore_det(&f81, &xs) != moore_product(&f81, &xs) {
                mismatches += 1;
            }
        }
    }
    let f9 = GfRing::new(&make_extension(3, 2).unwrap());
    let mut wrong = 0;
    for x in f9.field().elements() {
        for y in f9.field().elements() {
            // dependent iff y is an F_3-multiple of x or x = 0
            let dependent = x.is_zero() || (0..3).any(|c| f9.mul(&Gf(c), &x) == y);
            if (moore_det(&f9, &[x, y]) == Gf(0)) != dependent {
                wrong += 1;
            }
        }
    }
    Verdict::new(
        mismatches == 0 && wrong == 0,
        format!("300 tuples over F_81: {mismatches} mismatches; 81 pairs over F_9: {wrong} wrong"),
    )
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let r3: ModuliReport = classify_by_jtilde(3, 2, Gf(1), 2).unwrap();
    let partition = ["same_jtilde_implies_isomorphic", "isomorphic_implies_same_jtilde", "jtilde_zero_class_is_g_zero"]
        .iter()
        .all(|c| ok(r3.check(c)))
        && r3.undecided.is_empty()
        && r3.passed;
    let pointwise = r3.check("jtilde_squared_equals_j");
    let pointwise_holds = fitted(pointwise, "outcome") == Some("pass");
    let s3 = jtilde_series_check(3, 18).unwrap();
    let pole = ok(s3.check("pole_order"));
    let series_holds = ok(s3.check("jtilde_squared_equals_j"));
    let minus_j = fitted(s3.check("jtilde_squared_equals_minus_j"), "outcome") == Some("pass");

    let r4 = classify_by_jtilde(4, 2, Gf(1), 1).unwrap();
    let s4 = jtilde_series_check(4, 32).unwrap();
    let even = r4.passed && ok(r4.check("jtilde_equals_j")) && ok(s4.check("jtilde_equals_j")) && ok(s4.check("pole_order"));
    let secs = start.elapsed().as_secs_f64();
    let timely = secs < 300.0;

    let passed = partition && pointwise_holds && pole && series_holds && even && timely;
    let detail = format!(
        "q=3: {} classes, partition {}, j/jtilde^2 = {} pointwise, series jtilde^2 = j {} (= -j {}), pole {}; q=4 even branch {}; {secs:.1}s",
        r3.class_count,
        if partition { "ok" } else { "FAIL" },
        fitted(pointwise, "j_over_jtilde_squared").unwrap_or("-"),
        if series_holds { "ok" } else { "FAIL" },
        if minus_j { "ok" } else { "FAIL" },
        if pole { "ok" } else { "FAIL" },
        if even { "ok" } else { "FAIL" },
    );
    // j = g^(q+1)/Delta and Delta = -h^(q-1) give jtilde^2 = -j for odd q
    let known = !passed
        && partition
        && pole
        && even
        && timely
        && !pointwise_holds
        && fitted(pointwise, "j_over_jtilde_squared") == Some("2")
        && !series_holds
        && minus_j;
    Verdict { passed, known, detail }
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_drinfeld")).args(args).output().unwrap();
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_11() -> Verdict {
    let configs: [&[&str]; 3] = [
        &["lab", "weil", "--q", "3", "--n", "2", "--a", "T^2", "--trials", "25", "--seed", "7", "--json"],
        &["lab", "moduli", "--q", "3", "--n", "2", "--json"],
        &["verify", "--suite", "theorem1", "--q", "3", "--order", "27", "--json"],
    ];
    let mut detail = Vec::new();
    let mut passed = true;
    for args in configs {
        let a = run_cli(args);
        let b = run_cli(args);
        let same = a == b && !a.1.is_empty();
        passed &= same;
        detail.push(format!("{} {}: {}", args[0], args[1], if same { "identical" } else { "DIFFER" }));
    }
    Verdict::new(passed, detail.join(", "))
}

fn main() {
    let start = Instant::now();
    let (c1, c2) = criterion_1_2();
    let verdicts: Vec<(u32, &str, Verdict)> = vec![
        (1, "h product formula = A-expansion", c1),
        (2, "h = -t + ..., exponents = 1 mod q-1", c2),
        (3, "Delta = -h^(q-1) = T prod E_v", criterion_3()),
        (4, "Moore determinant, h products, alternating sum", criterion_4()),
        (5, "Serre derivative, exactly one sign", criterion_5()),
        (6, "Weil pairing series identity", criterion_6()),
        (7, "determinant torsion and h^-1 rho h", criterion_7()),
        (8, "finite-field Weil lab", criterion_8()),
        (9, "Moore product formula and independence", criterion_9()),
        (10, "j-tilde moduli classification", criterion_10()),
        (11, "byte-identical reports", criterion_11()),
    ];
    let mut unexpected = 0;
    for (id, title, v) in &verdicts {
        let word = if v.passed { "PASS" } else { "FAIL" };
        let tag = if v.known { " [known, see README]" } else { "" };
        println!("criterion {id:>2} {word}{tag}: {title} ({})", v.detail);
        if !v.passed && !v.known {
            unexpected += 1;
        }
    }
    println!("acceptance finished in {:.1}s", start.elapsed().as_secs_f64());
    if unexpected > 0 {
        eprintln!("{unexpected} criteria failed unexpectedly");
        std::process::exit(1);
    }
}
