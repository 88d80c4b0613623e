//! Degree-one level structures: Eisenstein series `E_v` as expansions in
//! `t_a = t(z/a)` over `F_q(lambda)`, the forms `g`, `Delta`, `h` they
//! produce, and the identity suites relating them to the level-one forms.
//!
//! For `a = T + theta` and `v = (u1/a, u2/a)`, summing `1/e(x) = sum 1/(x+b)`
//! over the rows of the lattice gives, without the period,
//!
//! ```text
//! E_v = [u1 = 0] (u2 lambda)^-1 + sum_{m = u1 mod a, m != 0} t_a^(q^deg m) / (f_m(t_a) + u2 lambda t_a^(q^deg m))
//! ```
//!
//! with `m` running over all nonzero polynomials (not only monic ones; `f_m`
//! then has constant term `lc(m)`). Level-one series are moved to `t_a` by
//! `t = t_a^q / f_a(t_a)`, which is `1/t = rho_a(1/t_a)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactfield::{polys_of_degree, Field, FiniteField, Gf, KummerField, Poly, RatFun, RatFunField, Ring};
use crate::report::{Check, Status, SuiteReport};
use crate::series::{
    delta_from_h, g_aexpansion, h_product, serre_residual, serre_residual_normalized, t_of_az_in, KSeries,
    SeriesRing, Sign, TruncSeries,
};
use crate::skew::f_polynomial;
use std::sync::Arc;

pub type LSeries = TruncSeries<RatFun>;

/// `v = (u1/a, u2/a)`; for degree-one `a` the residues are elements of `F_q`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TorsionLabel {
    pub u1: Gf,
    pub u2: Gf,
}

impl TorsionLabel {
    pub fn new(u1: Gf, u2: Gf) -> Result<Self> {
        if u1.is_zero() && u2.is_zero() {
            return Err(Error::InvalidArgument("torsion label (0,0) is excluded".into()));
        }
        Ok(TorsionLabel { u1, u2 })
    }

    /// `u1 v2 - u2 v1`.
    pub fn det(&self, other: &TorsionLabel, fq: &FiniteField) -> Gf {
        fq.sub(fq.mul(self.u1, other.u2), fq.mul(self.u2, other.u1))
    }

    /// `u + w`, or `None` when it is zero.
    pub fn add(&self, other: &TorsionLabel, fq: &FiniteField) -> Option<TorsionLabel> {
        TorsionLabel::new(fq.add(self.u1, other.u1), fq.add(self.u2, other.u2)).ok()
    }

    pub fn render(&self, fq: &FiniteField) -> String {
        format!("({},{})", fq.render(self.u1), fq.render(self.u2))
    }
}

/// All of `V'`, ordered by `(u1, u2)`.
pub fn labels(fq: &FiniteField) -> Vec<TorsionLabel> {
    let mut out = Vec::new();
    for u1 in fq.elements() {
        for u2 in fq.elements() {
            if let Ok(l) = TorsionLabel::new(u1, u2) {
                out.push(l);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct LevelCtx {
    fq: Arc<FiniteField>,
    kummer: KummerField,
    order: i64,
    series: SeriesRing<KummerField>,
}

pub fn make_level(fq: &Arc<FiniteField>, a: &Poly, order: i64) -> Result<LevelCtx> {
    if order < 2 {
        return Err(Error::InvalidArgument(format!("truncation order must be at least 2, got {order}")));
    }
    let kummer = KummerField::new(fq, a)?;
    let var = match kummer.level_name() {
        n if n.len() == 1 => format!("t_{n}"),
        n => format!("t_({n})"),
    };
    let series = SeriesRing::new(&kummer, &var);
    Ok(LevelCtx { fq: fq.clone(), kummer, order, series })
}

impl LevelCtx {
    pub fn fq(&self) -> &Arc<FiniteField> {
        &self.fq
    }

    pub fn q(&self) -> i64 {
        self.fq.order() as i64
    }

    pub fn kummer(&self) -> &KummerField {
        &self.kummer
    }

    pub fn level(&self) -> &Poly {
        self.kummer.level()
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn series(&self) -> &SeriesRing<KummerField> {
        &self.series
    }

    /// Working precision: enough headroom that every identity below is still
    /// justified at `order` after inversions and logarithmic derivatives.
    pub fn work_prec(&self) -> i64 {
        self.order + self.q() * self.q() + 2
    }

    fn k_ring(&self) -> SeriesRing<RatFunField> {
        SeriesRing::new(self.kummer.t_field(), self.series.var())
    }

    /// `t = t_a^q / f_a(t_a)` over the level field.
    pub fn t_in_level(&self, prec: i64) -> Result<LSeries> {
        let kr = self.k_ring();
        let s = t_of_az_in(&kr, self.level(), prec)?;
        Ok(kr.map_coeffs(&s, &self.series, |c| self.kummer.embed(c)))
    }

    /// A level-one series in `t` rewritten in `t_a`, to precision `prec`.
    pub fn substitute(&self, f: &KSeries, prec: i64) -> Result<LSeries> {
        let kr = SeriesRing::new(self.kummer.t_field(), f.var());
        let lifted = kr.map_coeffs(f, &self.series.with_var(f.var()), |c| self.kummer.embed(c));
        let s = self.t_in_level(prec)?;
        let out = self.series.compose(&lifted, &s)?;
        Ok(self.series.truncate(&out, prec))
    }

    fn level_one_order(&self, prec: i64) -> i64 {
        prec.div_euclid(self.q()) + 2
    }

    /// The level-one `h`, by its product formula, in `t_a`.
    pub fn level_one_h(&self, prec: i64) -> Result<LSeries> {
        self.substitute(&h_product(&self.fq, self.level_one_order(prec))?, prec)
    }

    /// The level-one `g` in `t_a`.
    pub fn level_one_g(&self, prec: i64) -> Result<LSeries> {
        self.substitute(&g_aexpansion(&self.fq, self.level_one_order(prec))?, prec)
    }

    /// Nonzero `m` with `m = u1 mod a` and `q^deg m < prec`.
    fn residue_class(&self, u1: Gf, prec: i64) -> Vec<Poly> {
        let root = self.fq.neg(self.kummer.theta());
        let mut out = Vec::new();
        let mut d = 0u32;
        while self.q().pow(d) < prec {
            out.extend(polys_of_degree(&self.fq, d as usize).into_iter().filter(|m| m.eval(root, &self.fq) == u1));
            d += 1;
        }
        out
    }

    /// `f_m(t_a)` over the level field.
    fn f_level(&self, m: &Poly, prec: i64) -> Result<LSeries> {
        let terms = f_polynomial(&self.fq, m)?.into_iter().map(|(e, c)| (e as i64, self.kummer.embed_poly(&c)));
        Ok(self.series.from_terms(terms, prec))
    }

    /// `E_v` to precision `prec`.
    pub fn eisenstein(&self, v: &TorsionLabel, prec: i64) -> Result<LSeries> {
        let sr = &self.series;
        let k = &self.kummer;
        let u2_lambda = k.mul(&k.from_fq(v.u2), &k.lambda());
        let mut acc = if v.u1.is_zero() {
            sr.constant(k.inv(&u2_lambda).ok_or(Error::DivisionByZero)?, prec)
        } else {
            sr.zero(prec)
        };
        for m in self.residue_class(v.u1, prec) {
            let shift = self.q().pow(m.degree().unwrap_or(0) as u32);
            let f = self.f_level(&m, prec - shift)?;
            let den = sr.add(&f, &sr.monomial(u2_lambda.clone(), shift, prec - shift))?;
            acc = sr.add(&acc, &sr.shift(&sr.inv(&den)?, shift))?;
        }
        Ok(acc)
    }

    /// `E_v` for every label, in label order.
    pub fn eisenstein_all(&self, prec: i64) -> Result<Vec<(TorsionLabel, LSeries)>> {
        labels(&self.fq).par_iter().map(|v| Ok((*v, self.eisenstein(v, prec)?))).collect()
    }
}

/// Elementary symmetric functions `e_0, ..., e_n` of the given series.
pub fn elementary_symmetric<R: Ring>(
    sr: &SeriesRing<R>,
    xs: &[TruncSeries<R::Elem>],
    prec: i64,
) -> Result<Vec<TruncSeries<R::Elem>>> {
    let mut e = vec![sr.one(prec)];
    if let Some(x) = xs.first() {
        e[0] = sr.with_var(x.var()).one(prec);
    }
    for x in xs {
        let mut next = e.clone();
        next.push(sr.mul(e.last().unwrap(), x)?);
        for k in 1..e.len() {
            next[k] = sr.add(&e[k], &sr.mul(&e[k - 1], x)?)?;
        }
        e = next;
    }
    Ok(e)
}

/// The forms of the level, all in `t_a` over `F_q(lambda)`.
#[derive(Clone, Debug)]
pub struct LevelForms {
    pub eis: Vec<(TorsionLabel, LSeries)>,
    /// `e_k` of the `E_v`, `k = 0..q^2-1`.
    pub esym: Vec<LSeries>,
    /// `a (-1)^(q-1) e_(q-1)`, the `X^q` coefficient of `a X prod (1 - E_v X)`.
    pub g: LSeries,
    /// `a prod E_v`.
    pub delta: LSeries,
    /// `lambda E_(0,1) prod_eps E_(1,eps)`, before fitting a unit.
    pub h_moore: LSeries,
    /// Level-one `h` moved to `t_a`.
    pub h_sub: LSeries,
}

impl LevelForms {
    pub fn e(&self, v: &TorsionLabel) -> &LSeries {
        &self.eis.iter().find(|(l, _)| l == v).expect("every label is expanded").1
    }
}

pub fn forms_from_level(ctx: &LevelCtx) -> Result<LevelForms> {
    let w = ctx.work_prec();
    let sr = ctx.series();
    let k = ctx.kummer();
    let fq = ctx.fq();
    let eis = ctx.eisenstein_all(w)?;
    let xs: Vec<LSeries> = eis.iter().map(|(_, s)| s.clone()).collect();
    let esym = elementary_symmetric(sr, &xs, w)?;
    let a = k.embed_poly(ctx.level());
    let q = ctx.q() as usize;
    let sign = |k_: usize| if k_ % 2 == 0 { 1 } else { -1 };
    let g = sr.scale(&esym[q - 1], &k.mul(&a, &k.from_int(sign(q - 1))));
    let delta = sr.scale(&esym[q * q - 1], &k.mul(&a, &k.from_int(sign(q * q - 1))));
    let find = |u1: Gf, u2: Gf| eis.iter().find(|(l, _)| l.u1 == u1 && l.u2 == u2).map(|(_, s)| s.clone()).unwrap();
    let mut h_moore = sr.scale(&find(Gf(0), Gf(1)), &k.lambda());
    for eps in fq.elements() {
        h_moore = sr.mul(&h_moore, &find(Gf(1), eps))?;
    }
    let h_sub = ctx.level_one_h(w)?;
    Ok(LevelForms { eis, esym, g, delta, h_moore, h_sub })
}

/// `M(x, y) = x y^q - x^q y`.
fn moore2<R: Ring>(sr: &SeriesRing<R>, x: &TruncSeries<R::Elem>, y: &TruncSeries<R::Elem>) -> Result<TruncSeries<R::Elem>> {
    sr.sub(&sr.mul(x, &sr.frobenius(y))?, &sr.mul(&sr.frobenius(x), y)?)
}

/// `c` with `lhs = c rhs` read off the leading coefficients, if valuations agree.
fn fit_unit<F: Field>(sr: &SeriesRing<F>, lhs: &TruncSeries<F::Elem>, rhs: &TruncSeries<F::Elem>) -> Option<F::Elem> {
    if lhs.valuation()? != rhs.valuation()? {
        return None;
    }
    sr.ring().div(lhs.leading()?, rhs.leading()?)
}

fn is_fq_unit(c: &RatFun) -> bool {
    c.den().is_one() && c.num().degree() == Some(0)
}

/// Fits `lhs = c rhs` and checks it to `required`; `c` must lie in `F_q^*`
/// when `unit_in_fq`.
fn fitted_check(
    name: &str,
    key: &str,
    sr: &SeriesRing<KummerField>,
    lhs: &LSeries,
    rhs: &LSeries,
    required: i64,
    unit_in_fq: bool,
) -> Result<(Check, Option<RatFun>)> {
    let k = sr.ring();
    let Some(c) = fit_unit(sr, lhs, rhs) else {
        let mut check = Check::new(name, Status::Fail).with_note("leading terms do not match in valuation");
        check.first_mismatch = lhs.valuation().min(rhs.valuation());
        return Ok((check, None));
    };
    let mut check = Check::series_eq(name, sr, lhs, &sr.scale(rhs, &c), required)?.with_fitted(key, k.render(&c));
    if unit_in_fq && !is_fq_unit(&c) {
        check.status = Status::Fail;
        check.note = Some(format!("fitted constant {} is not in F_q^*", k.render(&c)));
    }
    Ok((check, Some(c)))
}

/// Checks `M(E_u^-1, E_v^-1) = det(u,v) lambda h^-1` for the given pairs,
/// reporting the first failing pair.
fn moore_pairs(
    name: &str,
    ctx: &LevelCtx,
    eis: &[(TorsionLabel, LSeries)],
    h: &LSeries,
    independent_only: bool,
) -> Result<Check> {
    let sr = ctx.series();
    let k = ctx.kummer();
    let fq = ctx.fq();
    let inverses: Vec<(TorsionLabel, LSeries)> =
        eis.par_iter().map(|(l, e)| Ok((*l, sr.inv(e)?))).collect::<Result<_>>()?;
    let lambda_over_h = sr.scale(&sr.inv(h)?, &k.lambda());
    let mut pairs = Vec::new();
    for (u, xu) in &inverses {
        for (v, xv) in &inverses {
            let d = u.det(v, fq);
            if independent_only && d.is_zero() {
                continue;
            }
            pairs.push((*u, *v, xu, xv, d));
        }
    }
    let results: Vec<(TorsionLabel, TorsionLabel, Check)> = pairs
        .par_iter()
        .map(|(u, v, xu, xv, d)| {
            let lhs = moore2(sr, xu, xv)?;
            let rhs = sr.scale(&lambda_over_h, &k.from_fq(*d));
            Ok((*u, *v, Check::series_eq(name, sr, &lhs, &rhs, ctx.order())?))
        })
        .collect::<Result<_>>()?;
    let total = results.len();
    let compared = results.iter().filter_map(|(_, _, c)| c.compared_to).min();
    let failed = results.iter().find(|(_, _, c)| c.failed());
    let mut check = match failed {
        Some((u, v, c)) => {
            let mut c = c.clone();
            c.note = Some(format!("fails for u = {}, v = {}", u.render(fq), v.render(fq)));
            c
        }
        None => Check::new(name, Status::Pass).with_note(format!("{total} label pairs")),
    };
    if check.compared_to.is_none() {
        check.compared_to = compared;
    }
    Ok(check)
}

fn level_report(suite: &str, ctx: &LevelCtx, checks: Vec<Check>) -> SuiteReport {
    SuiteReport::new(suite, ctx.q() as u64, ctx.order(), Some(ctx.kummer().level_name()), checks)
}

/// Moore determinant identity, the `h` product identities up to fitted units,
/// and the alternating-sum identity with a fitted constant.
pub fn theorem1_suite(ctx: &LevelCtx, forms: &LevelForms) -> Result<SuiteReport> {
    let sr = ctx.series();
    let k = ctx.kummer();
    let fq = ctx.fq();
    let n = ctx.order();
    let mut checks = vec![moore_pairs("moore_det2", ctx, &forms.eis, &forms.h_sub, true)?];

    let (h1, _) = fitted_check("h1", "varsigma", sr, &forms.h_sub, &forms.h_moore, n, true)?;
    checks.push(h1);

    // another set of representatives of P(V): (1,0) and (eps,1)
    let mut h2_rhs = sr.scale(forms.e(&TorsionLabel::new(Gf(1), Gf(0))?), &k.lambda());
    for eps in fq.elements() {
        h2_rhs = sr.mul(&h2_rhs, forms.e(&TorsionLabel::new(eps, Gf(1))?))?;
    }
    let (h2, _) = fitted_check("h2", "c_h2", sr, &forms.h_sub, &h2_rhs, n, true)?;
    checks.push(h2);

    let mut terms = Vec::new();
    for (u, eu) in &forms.eis {
        for (v, ev) in &forms.eis {
            if u.det(v, fq) == Gf(1) {
                terms.push(sr.mul(&sr.frobenius(eu), ev)?);
            }
        }
    }
    let alt = sr.sum(&terms, ctx.work_prec())?;
    let (mut alt_check, _) = fitted_check("alternating", "c_alternating", sr, &forms.h_sub, &alt, n, false)?;
    alt_check.note = Some(format!("{} pairs with <u,v> = 1", terms.len()));
    checks.push(alt_check);
    Ok(level_report("theorem1", ctx, checks))
}

/// `Delta = -h^(q-1)` against `Delta = a prod E_v`, with the remaining
/// structure of `a X prod (1 - E_v X)`.
pub fn dprod_suite(ctx: &LevelCtx, forms: &LevelForms) -> Result<SuiteReport> {
    let sr = ctx.series();
    let k = ctx.kummer();
    let n = ctx.order();
    let q = ctx.q() as usize;
    let w = ctx.work_prec();
    let delta_root = delta_from_h(sr, &forms.h_sub);
    let mut checks = vec![Check::series_eq("delta_root_vs_dprod", sr, &delta_root, &forms.delta, n)?];

    let stray: Vec<usize> =
        (1..forms.esym.len() - 1).filter(|&i| i != q - 1 && !forms.esym[i].is_zero()).collect();
    let min_prec = forms.esym.iter().map(|e| e.prec()).min().unwrap_or(w);
    let mut c = Check::pass_if("symmetric_functions_vanish", stray.is_empty() && min_prec >= n);
    c.compared_to = Some(min_prec);
    if let Some(i) = stray.first() {
        c.note = Some(format!("e_{i} is nonzero"));
        c.first_mismatch = forms.esym[*i].valuation();
    }
    checks.push(c);

    let g0 = forms.g.coeff(0).flatten().cloned().unwrap_or_else(|| k.zero());
    checks.push(Check::pass_if("g_constant_term_one", k.is_one(&g0)));
    let g_sub = ctx.level_one_g(w)?;
    checks.push(Check::series_eq("g_level_one_vs_level", sr, &g_sub, &forms.g, n)?);
    Ok(level_report("dprod", ctx, checks))
}

/// `w_a = M` on `phi[a]` for degree-one `a`: `M(E_u^-1, E_v^-1) = det(u,v)
/// lambda_a h^-1` for every label pair, dependent pairs included.
pub fn weil_series_check(ctx: &LevelCtx) -> Result<SuiteReport> {
    let w = ctx.work_prec();
    let eis = ctx.eisenstein_all(w)?;
    let h = ctx.level_one_h(w)?;
    let check = moore_pairs("weil_series", ctx, &eis, &h, false)?;
    Ok(level_report("weil-series", ctx, vec![check]))
}

/// `psi_a(lambda h^-1) = 0` with `psi_a = a X - Delta X^q`, and the
/// coefficients of `h^-1 rho_a h`.
pub fn determinant_torsion_check(ctx: &LevelCtx, forms: &LevelForms) -> Result<SuiteReport> {
    let sr = ctx.series();
    let k = ctx.kummer();
    let n = ctx.order();
    let a = k.embed_poly(ctx.level());
    let x = sr.scale(&sr.inv(&forms.h_sub)?, &k.lambda());
    let psi = sr.sub(&sr.scale(&x, &a), &sr.mul(&forms.delta, &sr.frobenius(&x))?)?;
    let mut checks = vec![Check::series_zero::<KummerField>("psi_of_lambda_over_h", &psi, n)];
    // h^-1 rho_a h has coefficients a and h^(q-1); psi_a has a and -Delta
    let conj = sr.pow(&forms.h_sub, ctx.q() as u64 - 1);
    checks.push(Check::series_eq("conjugated_carlitz", sr, &conj, &sr.neg(&forms.delta), n)?);
    Ok(level_report("det-torsion", ctx, checks))
}

/// The Serre residual at level `a` (`kappa = a`), both signs, plus the
/// weight-normalized variant.
pub fn serre_level_check(ctx: &LevelCtx, forms: &LevelForms) -> Result<SuiteReport> {
    let sr = ctx.series();
    let a = ctx.kummer().embed_poly(ctx.level());
    Ok(level_report("serre-level", ctx, serre_checks(sr, &forms.g, &forms.delta, &forms.h_sub, &a, ctx.order())?))
}

/// Runs the literal residual for both signs and reports the sign(s) that
/// vanish. The check passes when exactly one distinct value of sigma works.
pub fn serre_checks<F: Field>(
    sr: &SeriesRing<F>,
    g: &TruncSeries<F::Elem>,
    delta: &TruncSeries<F::Elem>,
    h: &TruncSeries<F::Elem>,
    kappa: &F::Elem,
    required: i64,
) -> Result<Vec<Check>> {
    let ring = sr.ring();
    let mut vanishing = Vec::new();
    let mut precs = Vec::new();
    let mut firsts = Vec::new();
    for sigma in [Sign::Plus, Sign::Minus] {
        let r = serre_residual(sr, g, delta, h, kappa, sigma)?;
        precs.push(r.prec());
        firsts.push(r.valuation());
        if r.is_zero() && r.prec() >= required {
            vanishing.push(sigma);
        }
    }
    // +1 and -1 coincide in characteristic 2
    let distinct: Vec<Sign> = if ring.q() % 2 == 0 && !vanishing.is_empty() { vec![Sign::Minus] } else { vanishing };
    let mut literal = Check::pass_if("serre_literal", distinct.len() == 1);
    literal.compared_to = precs.iter().copied().min();
    match distinct.as_slice() {
        [s] => literal = literal.with_fitted("sigma", s.value().to_string()),
        [] => {
            literal.first_mismatch = firsts.iter().flatten().copied().max();
            literal.note = Some("the residual vanishes for neither sign".into());
        }
        _ => literal.note = Some("the residual vanishes for both signs".into()),
    }
    let mut checks = vec![literal];

    let mut found = None;
    let mut prec = i64::MAX;
    for sigma in [Sign::Plus, Sign::Minus] {
        let r = serre_residual_normalized(sr, g, delta, h, kappa, sigma)?;
        prec = prec.min(r.prec());
        if r.is_zero() && r.prec() >= required && found.is_none() {
            found = Some(sigma);
        }
    }
    let mut normalized = Check::new("serre_weight_normalized", Status::Recorded);
    normalized.compared_to = Some(prec);
    normalized = match found {
        Some(s) => normalized.with_fitted("sigma_normalized", s.value().to_string()),
        None => normalized.with_note("the normalized residual vanishes for neither sign"),
    };
    checks.push(normalized);
    Ok(checks)
}
