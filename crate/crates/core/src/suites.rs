//! Named verification suites at `(q, N)`, as run by the command line.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactfield::{FiniteField, Poly, RatFunField, Ring};
use crate::level::{
    determinant_torsion_check, dprod_suite, forms_from_level, make_level, serre_checks, serre_level_check,
    theorem1_suite, weil_series_check,
};
use crate::moduli::jtilde_series_check;
use crate::report::{Check, SuiteReport};
use crate::series::{delta_from_h, first_non_integral, first_off_support, g_aexpansion, h_aexpansion, h_product, level_one_ring};

pub const SUITES: [&str; 9] = [
    "aexp-vs-product",
    "delta-root",
    "serre",
    "theorem1",
    "dprod",
    "alternating",
    "weil-series",
    "det-torsion",
    "jtilde-series",
];

/// Suites that work with level-one expansions in `t` only.
pub fn is_level_one(suite: &str) -> bool {
    matches!(suite, "aexp-vs-product" | "serre" | "jtilde-series")
}

/// `2q^2` at level one, `2q^3` capped at 60 at level `a`.
pub fn default_order(suite: &str, q: u64, level: bool) -> i64 {
    let q = q as i64;
    if is_level_one(suite) && !level {
        2 * q * q
    } else {
        (2 * q * q * q).min(60)
    }
}

/// A polynomial in `T` over `F_q`, in the element grammar.
pub fn parse_poly(fq: &Arc<FiniteField>, text: &str) -> Result<Poly> {
    let k = RatFunField::new(fq, "T");
    let x = k.parse(text)?;
    if !x.is_polynomial() {
        return Err(Error::Parse(format!("{text:?} is not a polynomial in T")));
    }
    Ok(x.num().clone())
}

/// Product formula against the A-expansion, with the shape of `h`.
pub fn aexp_vs_product(q: u64, n: i64) -> Result<SuiteReport> {
    let fq = FiniteField::fq(q)?;
    let sr = level_one_ring(&fq);
    let k = sr.ring().clone();
    let (prod, aexp) = rayon::join(|| h_product(&fq, n), || h_aexpansion(&fq, n));
    let (prod, aexp) = (prod?, aexp?);
    let mut checks = vec![Check::series_eq("product_equals_aexpansion", &sr, &prod, &aexp, n)?];
    let c1 = prod.coeff(1).flatten().cloned().unwrap_or_else(|| k.zero());
    checks.push(Check::pass_if("leading_term_minus_t", prod.valuation() == Some(1) && c1 == k.from_int(-1)));
    let off = [&prod, &aexp].iter().filter_map(|s| first_off_support(&k, s, 1, q as i64 - 1)).min();
    let mut support = Check::pass_if("exponents_one_mod_q_minus_1", off.is_none());
    support.first_mismatch = off;
    checks.push(support);
    let frac = [&prod, &aexp].iter().filter_map(|s| first_non_integral(s)).min();
    let mut integral = Check::pass_if("coefficients_in_a", frac.is_none());
    integral.first_mismatch = frac;
    checks.push(integral);
    Ok(SuiteReport::new("aexp-vs-product", q, n, None, checks))
}

/// `Delta = -h^(q-1)` at level one, then against `a prod E_v` at level `a`.
pub fn delta_root(q: u64, n: i64, a: &Poly) -> Result<SuiteReport> {
    let fq = FiniteField::fq(q)?;
    let sr = level_one_ring(&fq);
    let k = sr.ring().clone();
    let delta = delta_from_h(&sr, &h_product(&fq, n)?);
    // h = -t + ..., so Delta = -(-1)^(q-1) t^(q-1) + ...
    let lead = k.neg(&k.pow(&k.from_int(-1), q - 1));
    let ok = delta.valuation() == Some(q as i64 - 1) && delta.leading() == Some(&lead);
    let mut checks = vec![Check::pass_if("delta_leading_term", ok)];

    let ctx = make_level(&fq, a, n)?;
    let forms = forms_from_level(&ctx)?;
    let dprod = dprod_suite(&ctx, &forms)?;
    checks.extend(dprod.check("delta_root_vs_dprod").cloned());
    Ok(SuiteReport::new("delta-root", q, n, dprod.level.clone(), checks))
}

/// The Serre residual at level one, `kappa = 1`.
pub fn serre_level_one(q: u64, n: i64) -> Result<SuiteReport> {
    let fq = FiniteField::fq(q)?;
    let sr = level_one_ring(&fq);
    let k = sr.ring().clone();
    // the residual loses q precision to Delta'/Delta
    let w = n + q as i64 + 2;
    let (h, g) = rayon::join(|| h_product(&fq, w), || g_aexpansion(&fq, w));
    let (h, g) = (h?, g?);
    let delta = delta_from_h(&sr, &h);
    let checks = serre_checks(&sr, &g, &delta, &h, &k.one(), n)?;
    Ok(SuiteReport::new("serre", q, n, None, checks))
}

/// Runs `suite` at `(q, N)`. Level suites use `a = T` unless `level` is given;
/// `serre` with a level runs the level version.
pub fn run_suite(suite: &str, q: u64, n: i64, level: Option<&Poly>) -> Result<SuiteReport> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("truncation order must be at least 2, got {n}")));
    }
    let fq = FiniteField::fq(q)?;
    let a = level.cloned().unwrap_or_else(Poly::var);
    match suite {
        "aexp-vs-product" => aexp_vs_product(q, n),
        "serre" if level.is_none() => serre_level_one(q, n),
        "jtilde-series" => jtilde_series_check(q, n),
        "delta-root" => delta_root(q, n, &a),
        "weil-series" => weil_series_check(&make_level(&fq, &a, n)?),
        "serre" | "theorem1" | "dprod" | "alternating" | "det-torsion" => {
            let ctx = make_level(&fq, &a, n)?;
            let forms = forms_from_level(&ctx)?;
            match suite {
                "serre" => serre_level_check(&ctx, &forms),
                "theorem1" => theorem1_suite(&ctx, &forms),
                "dprod" => dprod_suite(&ctx, &forms),
                "det-torsion" => determinant_torsion_check(&ctx, &forms),
                _ => {
                    let t1 = theorem1_suite(&ctx, &forms)?;
                    let checks = t1.check("alternating").cloned().into_iter().collect();
                    Ok(SuiteReport::new("alternating", q, n, t1.level.clone(), checks))
                }
            }
        }
        other => Err(Error::InvalidArgument(format!("unknown suite {other:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_parsing() {
        let f3 = FiniteField::fq(3).unwrap();
        assert_eq!(parse_poly(&f3, "T^2").unwrap(), Poly::var().pow(2, &f3));
        assert_eq!(parse_poly(&f3, "T+1").unwrap().render(&f3, "T"), "T+1");
        assert!(parse_poly(&f3, "1/T").is_err());
    }

    #[test]
    fn small_suites_pass() {
        for suite in ["aexp-vs-product", "delta-root", "theorem1", "alternating", "det-torsion", "weil-series"] {
            let r = run_suite(suite, 2, 16, None).unwrap();
            assert!(r.passed, "{suite}: {r:?}");
            assert_eq!(r.suite, suite);
        }
        assert!(run_suite("serre", 2, 16, None).unwrap().passed);
        assert!(!run_suite("serre", 3, 12, None).unwrap().passed);
        assert!(run_suite("nope", 2, 16, None).is_err());
        assert!(run_suite("theorem1", 2, 16, Some(&Poly::var().pow(2, &FiniteField::fq(2).unwrap()))).is_err());
    }
}
