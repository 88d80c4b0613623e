//! Level-one expansions in `t = 1/(pi e_A(z))` with coefficients in `F_q(T)`.
//!
//! The period `pi` never appears. From `e(az) = rho_a(e(z))` one gets
//! `1/t(az) = rho_a(1/t)`, hence `t(az) = t^(q^d) / f_a(t)` with `d = deg a`,
//! and `dt/dz = -pi t^2` turns `pi^-1 d/dz` into `-t^2 d/dt`.

use std::sync::Arc;

use rayon::prelude::*;

use super::trunc::{SeriesRing, TruncSeries};
use crate::error::{Error, Result};
use crate::exactfield::{enumerate_monics, monics_of_degree, Field, FiniteField, Poly, RatFun, RatFunField, Ring};
use crate::skew::f_polynomial;

pub type KSeries = TruncSeries<RatFun>;

/// Series ring over `F_q(T)` in `t`.
pub fn level_one_ring(fq: &Arc<FiniteField>) -> SeriesRing<RatFunField> {
    SeriesRing::new(&RatFunField::new(fq, "T"), "t")
}

/// `f_a(x)` as a series in the variable of `sr`.
pub fn f_series(sr: &SeriesRing<RatFunField>, a: &Poly, prec: i64) -> Result<KSeries> {
    let fq = sr.ring().fq().clone();
    let terms = f_polynomial(&fq, a)?.into_iter().map(|(e, c)| (e as i64, RatFun::from_poly(c)));
    Ok(sr.from_terms(terms, prec))
}

fn q_of(fq: &FiniteField) -> i64 {
    fq.order() as i64
}

/// `t(az) = t^(q^d) / f_a(t)` to precision `n`.
pub fn t_of_az(fq: &Arc<FiniteField>, a: &Poly, n: i64) -> Result<KSeries> {
    let sr = level_one_ring(fq);
    t_of_az_in(&sr, a, n)
}

/// As [`t_of_az`], in the variable of `sr`.
pub fn t_of_az_in(sr: &SeriesRing<RatFunField>, a: &Poly, n: i64) -> Result<KSeries> {
    let d = a.degree().unwrap_or(0) as u32;
    let shift = q_of(sr.ring().fq()).pow(d);
    if shift >= n {
        return Ok(sr.zero(n));
    }
    let f = f_series(sr, a, n - shift)?;
    Ok(sr.shift(&sr.inv(&f)?, shift))
}

/// Largest degree `d` whose factor `f_a` can differ from 1 below `t^n`: the
/// nonconstant exponents of `f_a` are at least `q^d - q^(d-1)`.
fn product_degree_bound(q: i64, n: i64) -> usize {
    let mut d = 1usize;
    while q.pow(d as u32) - q.pow(d as u32 - 1) < n {
        d += 1;
    }
    d - 1
}

/// `h = -t prod_{a monic} f_a(t)^(q^2-1)`, computed as
/// `-t P(t)^(q^2) / P(t)` with `P = prod f_a`.
pub fn h_product(fq: &Arc<FiniteField>, n: i64) -> Result<KSeries> {
    let sr = level_one_ring(fq);
    let q = q_of(fq);
    let p = n - 1;
    let monics = enumerate_monics(fq, product_degree_bound(q, n));
    let factors: Vec<KSeries> = monics
        .par_iter()
        .filter(|a| a.degree() != Some(0))
        .map(|a| f_series(&sr, a, p))
        .collect::<Result<_>>()?;
    let prod = sr.product(&factors, p)?;
    let top = sr.frobenius_iter(&sr.truncate(&prod, p.div_euclid(q * q) + 1), 2);
    let ratio = sr.mul(&top, &sr.inv(&prod)?)?;
    Ok(sr.truncate(&sr.neg(&sr.shift(&ratio, 1)), n))
}

/// `h = -sum_{a monic} a^q t(az)`, over the `a` with `q^deg a < n`.
pub fn h_aexpansion(fq: &Arc<FiniteField>, n: i64) -> Result<KSeries> {
    let sr = level_one_ring(fq);
    let k = sr.ring().clone();
    let q = q_of(fq);
    let monics = monics_below(fq, q, n, 1);
    let terms: Vec<KSeries> = monics
        .par_iter()
        .map(|a| {
            let t_a = t_of_az_in(&sr, a, n)?;
            Ok(sr.scale(&t_a, &k.frobenius(&k.poly(a))))
        })
        .collect::<Result<_>>()?;
    Ok(sr.neg(&sr.sum(&terms, n)?))
}

/// Monic `a` with `weight * q^deg a < n`.
fn monics_below(fq: &Arc<FiniteField>, q: i64, n: i64, weight: i64) -> Vec<Poly> {
    let mut out = Vec::new();
    let mut d = 0u32;
    while weight * q.pow(d) < n {
        out.extend(monics_of_degree(fq, d as usize));
        d += 1;
    }
    out
}

/// `g = 1 - [1] sum_{a monic} t(az)^(q-1)` with `[1] = T^q - T`.
pub fn g_aexpansion(fq: &Arc<FiniteField>, n: i64) -> Result<KSeries> {
    let sr = level_one_ring(fq);
    let k = sr.ring().clone();
    let q = q_of(fq);
    let monics = monics_below(fq, q, n, q - 1);
    let terms: Vec<KSeries> = monics
        .par_iter()
        .map(|a| {
            let t_a = t_of_az_in(&sr, a, n)?;
            Ok(sr.pow(&t_a, (q - 1) as u64))
        })
        .collect::<Result<_>>()?;
    let bracket = k.sub(&k.frobenius(&k.var()), &k.var());
    let s = sr.scale(&sr.sum(&terms, n)?, &bracket);
    sr.sub(&sr.one(n), &s)
}

/// `Delta = -h^(q-1)`.
pub fn delta_from_h<R: Ring>(sr: &SeriesRing<R>, h: &TruncSeries<R::Elem>) -> TruncSeries<R::Elem> {
    let q = sr.ring().q();
    sr.neg(&sr.pow(h, q - 1))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, serde::Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// `h - sigma (-v^2 kappa^-1 g' + (q-1) kappa^-1 v^2 (Delta'/Delta) g)`,
/// derivatives in `v`. With `dv/dz = -(pi/kappa) v^2` the bracket is
/// `pi^-1 (d/dz - (q-1) Delta_z/Delta) g`.
pub fn serre_residual<F: Field>(
    sr: &SeriesRing<F>,
    g: &TruncSeries<F::Elem>,
    delta: &TruncSeries<F::Elem>,
    h: &TruncSeries<F::Elem>,
    kappa: &F::Elem,
    sigma: Sign,
) -> Result<TruncSeries<F::Elem>> {
    let ring = sr.ring();
    let c = ring.from_int(ring.q() as i64 - 1);
    serre_residual_with(sr, g, delta, h, kappa, sigma, &c)
}

/// The residual with the weight-normalized coefficient `k/(q^2-1)`, `k = q-1`,
/// in place of `q-1`. In characteristic p this is `1/(q+1) = 1`, the
/// coefficient that makes the bracket modular of weight `q+1`.
pub fn serre_residual_normalized<F: Field>(
    sr: &SeriesRing<F>,
    g: &TruncSeries<F::Elem>,
    delta: &TruncSeries<F::Elem>,
    h: &TruncSeries<F::Elem>,
    kappa: &F::Elem,
    sigma: Sign,
) -> Result<TruncSeries<F::Elem>> {
    let ring = sr.ring();
    let q = ring.q() as i64;
    let c = ring.div(&ring.from_int(q - 1), &ring.from_int(q * q - 1)).ok_or(Error::DivisionByZero)?;
    serre_residual_with(sr, g, delta, h, kappa, sigma, &c)
}

/// `h - sigma (-v^2 kappa^-1 g' + c kappa^-1 v^2 (Delta'/Delta) g)`.
pub fn serre_residual_with<F: Field>(
    sr: &SeriesRing<F>,
    g: &TruncSeries<F::Elem>,
    delta: &TruncSeries<F::Elem>,
    h: &TruncSeries<F::Elem>,
    kappa: &F::Elem,
    sigma: Sign,
    c: &F::Elem,
) -> Result<TruncSeries<F::Elem>> {
    let ring = sr.ring();
    let kappa_inv = ring.inv(kappa).ok_or(Error::DivisionByZero)?;
    let big = g.prec().max(delta.prec()).max(h.prec()) + 4;
    let v2 = sr.with_var(g.var()).monomial(kappa_inv, 2, big);
    let first = sr.neg(&sr.mul(&v2, &sr.derivative(g))?);
    let log_deriv = sr.div(&sr.derivative(delta), delta)?;
    let second = sr.scale(&sr.mul(&sr.mul(&v2, &log_deriv)?, g)?, c);
    let bracket = sr.add(&first, &second)?;
    let signed = sr.scale(&bracket, &ring.from_int(sigma.value()));
    sr.sub(h, &signed)
}

/// First exponent whose coefficient has a nontrivial denominator.
pub fn first_non_integral(s: &KSeries) -> Option<i64> {
    s.dense().find(|(_, c)| !c.is_polynomial()).map(|(e, _)| e)
}

/// First exponent with a nonzero coefficient outside `residue mod modulus`.
pub fn first_off_support<E: Clone + PartialEq + std::fmt::Debug, R: Ring<Elem = E>>(
    ring: &R,
    s: &TruncSeries<E>,
    residue: i64,
    modulus: i64,
) -> Option<i64> {
    s.dense()
        .find(|(e, c)| !ring.is_zero(c) && (e - residue).rem_euclid(modulus) != 0)
        .map(|(e, _)| e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fq(q: u64) -> Arc<FiniteField> {
        FiniteField::fq(q).unwrap()
    }

    #[test]
    fn t_of_az_examples() {
        let f3 = fq(3);
        let sr = level_one_ring(&f3);
        let k = sr.ring().clone();
        assert_eq!(t_of_az(&f3, &Poly::one(), 8).unwrap(), sr.gen(8));
        let s = t_of_az(&f3, &Poly::var(), 8).unwrap();
        let expected = sr.from_terms([(3, k.one()), (5, k.neg(&k.var())), (7, k.parse("T^2").unwrap())], 8);
        assert_eq!(s, expected);
        for q in [2, 3, 4, 5] {
            let f = fq(q);
            for a in enumerate_monics(&f, 2) {
                let d = a.degree().unwrap() as u32;
                let s = t_of_az(&f, &a, 40).unwrap();
                assert_eq!(s.valuation(), Some((q as i64).pow(d)));
                assert!(k_is_one(s.leading().unwrap()));
            }
        }
    }

    fn k_is_one(c: &RatFun) -> bool {
        c.num().is_one() && c.den().is_one()
    }

    #[test]
    fn h_leading_term_and_support() {
        for q in [2u64, 3, 4, 5] {
            let f = fq(q);
            let sr = level_one_ring(&f);
            let k = sr.ring();
            let h = h_product(&f, 30).unwrap();
            assert_eq!(h.prec(), 30);
            assert_eq!(h.valuation(), Some(1));
            assert_eq!(h.leading().unwrap(), &k.from_int(-1));
            assert_eq!(first_off_support(k, &h, 1, q as i64 - 1), None);
            assert_eq!(first_non_integral(&h), None);
        }
    }

    #[test]
    fn h_aexpansion_char_two_coefficient() {
        let f2 = fq(2);
        let h = h_aexpansion(&f2, 10).unwrap();
        let k = RatFunField::new(&f2, "T");
        assert_eq!(h.coeff(1).unwrap().unwrap(), &k.one());
        assert_eq!(h.coeff(2).unwrap().unwrap(), &k.one());
    }

    #[test]
    fn product_agrees_with_aexpansion_small() {
        for (q, n) in [(2u64, 20i64), (3, 25), (4, 20), (5, 20)] {
            let f = fq(q);
            let sr = level_one_ring(&f);
            let a = h_product(&f, n).unwrap();
            let b = h_aexpansion(&f, n).unwrap();
            assert_eq!(sr.first_mismatch(&a, &b).unwrap(), None, "q = {q}");
        }
    }

    #[test]
    fn truncation_is_sound() {
        let f = fq(3);
        let sr = level_one_ring(&f);
        let small = h_product(&f, 15).unwrap();
        let large = h_product(&f, 31).unwrap();
        assert_eq!(sr.truncate(&large, 15), small);
        let small = h_aexpansion(&f, 15).unwrap();
        let large = h_aexpansion(&f, 31).unwrap();
        assert_eq!(sr.truncate(&large, 15), small);
    }

    #[test]
    fn delta_leading_terms() {
        for q in [2u64, 3, 4, 5] {
            let f = fq(q);
            let sr = level_one_ring(&f);
            let k = sr.ring();
            let h = h_product(&f, 20).unwrap();
            let d = delta_from_h(&sr, &h);
            assert_eq!(d.valuation(), Some(q as i64 - 1));
            let sign = if (q - 1) % 2 == 0 { 1 } else { -1 };
            assert_eq!(d.leading().unwrap(), &k.from_int(-sign));
            assert_eq!(first_off_support(k, &d, 0, q as i64 - 1), None);
            if q == 2 {
                assert_eq!(d, h);
            }
        }
    }

    #[test]
    fn g_starts_with_one() {
        for q in [2u64, 3, 5] {
            let f = fq(q);
            let sr = level_one_ring(&f);
            let k = sr.ring();
            let g = g_aexpansion(&f, 20).unwrap();
            assert_eq!(g.coeff(0).unwrap().unwrap(), &k.one());
            let bracket = k.sub(&k.frobenius(&k.var()), &k.var());
            assert_eq!(g.coeff(q as i64 - 1).unwrap().unwrap(), &k.neg(&bracket));
            assert_eq!(first_off_support(k, &g, 0, q as i64 - 1), None);
            assert_eq!(first_non_integral(&g), None);
        }
    }

    #[test]
    fn serre_signs() {
        for q in [2u64, 3, 5] {
            let f = fq(q);
            let n = 30;
            let sr = level_one_ring(&f);
            let k = sr.ring().clone();
            let h = h_product(&f, n).unwrap();
            let g = g_aexpansion(&f, n).unwrap();
            let d = delta_from_h(&sr, &h);
            let plus = serre_residual(&sr, &g, &d, &h, &k.one(), Sign::Plus).unwrap();
            let minus = serre_residual(&sr, &g, &d, &h, &k.one(), Sign::Minus).unwrap();
            let normalized = serre_residual_normalized(&sr, &g, &d, &h, &k.one(), Sign::Plus).unwrap();
            assert!(normalized.is_zero(), "q = {q}: {}", sr.render(&normalized));
            assert!(normalized.prec() >= n - q as i64);
            if q == 2 {
                assert!(plus.is_zero() && minus.is_zero());
            } else {
                // leading order: the plus residual starts with -2 t
                assert_eq!(plus.valuation(), Some(1));
                assert_eq!(plus.leading().unwrap(), &k.from_int(-2));
                // the minus residual survives at t^q, with coefficient -2[1]
                assert_eq!(minus.valuation(), Some(q as i64));
                let bracket = k.sub(&k.frobenius(&k.var()), &k.var());
                assert_eq!(minus.leading().unwrap(), &k.mul(&k.from_int(-2), &bracket), "q = {q}");
            }
        }
    }
}
