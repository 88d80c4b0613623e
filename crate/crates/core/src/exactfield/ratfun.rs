//! Rational functions over F_q in one named variable.
//!
//! Results are reduced after every operation: numerator and denominator
//! coprime, denominator monic. Denominators that are constants or monomials
//! take a fast path that avoids a full gcd, which covers nearly every
//! coefficient met in the series work.

use std::sync::Arc;

use super::gf::{FiniteField, Gf};
use super::poly::Poly;
use super::ring::{Field, Ring};
use super::text;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFun {
    num: Poly,
    den: Poly,
}

impl RatFun {
    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFun { num: p, den: Poly::one() }
    }
}

/// The field F_q(var).
#[derive(Clone, Debug)]
pub struct RatFunField {
    fq: Arc<FiniteField>,
    var: Arc<str>,
}

impl RatFunField {
    pub fn new(fq: &Arc<FiniteField>, var: &str) -> Self {
        RatFunField { fq: fq.clone(), var: var.into() }
    }

    pub fn fq(&self) -> &Arc<FiniteField> {
        &self.fq
    }

    pub fn var_name(&self) -> &str {
        &self.var
    }

    /// The variable as an element.
    pub fn var(&self) -> RatFun {
        RatFun::from_poly(Poly::var())
    }

    pub fn poly(&self, p: &Poly) -> RatFun {
        RatFun::from_poly(p.clone())
    }

    /// `num / den`, reduced.
    pub fn fraction(&self, num: &Poly, den: &Poly) -> Result<RatFun> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.reduce(num.clone(), den.clone()))
    }

    fn reduce(&self, num: Poly, den: Poly) -> RatFun {
        let f = &*self.fq;
        if num.is_zero() {
            return RatFun { num, den: Poly::one() };
        }
        if den.is_constant() {
            let inv = f.inv(den.lead()).expect("nonzero denominator");
            return RatFun { num: num.scale(inv, f), den: Poly::one() };
        }
        let (num, den) = if let Some(k) = den.monomial_degree() {
            let strip = k.min(num.low_degree().unwrap_or(0));
            (num.unshift(strip), den.unshift(strip))
        } else {
            let g = num.gcd(&den, f);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g, f).expect("gcd divides"), den.div_exact(&g, f).expect("gcd divides"))
            }
        };
        let lead = den.lead();
        if lead == Gf(1) {
            RatFun { num, den }
        } else {
            let inv = f.inv(lead).expect("nonzero leading coefficient");
            RatFun { num: num.scale(inv, f), den: den.scale(inv, f) }
        }
    }

    /// Substitutes `var -> image` (a polynomial in another variable), the
    /// result living in `target`.
    pub fn substitute(&self, x: &RatFun, image: &Poly, target: &RatFunField) -> RatFun {
        let f = &*self.fq;
        let num = x.num.compose(image, f);
        let den = x.den.compose(image, f);
        target.reduce(num, den)
    }

    pub fn parse(&self, text: &str) -> Result<RatFun> {
        let gens = self.fq.named_generators();
        let mut named: Vec<(&str, RatFun)> =
            gens.iter().map(|(n, g)| (n.as_str(), self.from_fq(*g))).collect();
        named.push((&self.var, self.var()));
        text::parse_element(self, text, &named)
    }
}

impl Ring for RatFunField {
    type Elem = RatFun;

    fn base(&self) -> &Arc<FiniteField> {
        &self.fq
    }

    fn zero(&self) -> RatFun {
        RatFun::from_poly(Poly::zero())
    }

    fn one(&self) -> RatFun {
        RatFun::from_poly(Poly::one())
    }

    fn is_zero(&self, a: &RatFun) -> bool {
        a.num.is_zero()
    }

    fn is_one(&self, a: &RatFun) -> bool {
        a.num.is_one() && a.den.is_one()
    }

    fn add(&self, a: &RatFun, b: &RatFun) -> RatFun {
        let f = &*self.fq;
        if a.num.is_zero() {
            return b.clone();
        }
        if b.num.is_zero() {
            return a.clone();
        }
        if a.den == b.den {
            let num = a.num.add(&b.num, f);
            if a.den.is_one() {
                return RatFun::from_poly(num);
            }
            return self.reduce(num, a.den.clone());
        }
        if let (Some(ka), Some(kb)) = (a.den.monomial_degree(), b.den.monomial_degree()) {
            // both denominators are powers of the variable
            let k = ka.max(kb);
            let num = a.num.shift(k - ka).add(&b.num.shift(k - kb), f);
            return self.reduce(num, Poly::monomial(Gf(1), k));
        }
        let num = a.num.mul(&b.den, f).add(&b.num.mul(&a.den, f), f);
        self.reduce(num, a.den.mul(&b.den, f))
    }

    fn neg(&self, a: &RatFun) -> RatFun {
        RatFun { num: a.num.neg(&self.fq), den: a.den.clone() }
    }

    fn mul(&self, a: &RatFun, b: &RatFun) -> RatFun {
        let f = &*self.fq;
        if a.num.is_zero() || b.num.is_zero() {
            return self.zero();
        }
        if a.den.is_one() && b.den.is_one() {
            return RatFun::from_poly(a.num.mul(&b.num, f));
        }
        self.reduce(a.num.mul(&b.num, f), a.den.mul(&b.den, f))
    }

    fn from_fq(&self, c: Gf) -> RatFun {
        RatFun::from_poly(Poly::constant(c))
    }

    fn render(&self, a: &RatFun) -> String {
        let num = a.num.render(&self.fq, &self.var);
        let den = a.den.render(&self.fq, &self.var);
        text::render_fraction(&num, &den)
    }

    fn frobenius(&self, a: &RatFun) -> RatFun {
        // q-th powers of coprime polynomials stay coprime and monic
        RatFun { num: a.num.qth_power(&self.fq), den: a.den.qth_power(&self.fq) }
    }
}

impl Field for RatFunField {
    fn inv(&self, a: &RatFun) -> Option<RatFun> {
        if a.num.is_zero() {
            return None;
        }
        Some(self.reduce(a.den.clone(), a.num.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(q: u64) -> RatFunField {
        RatFunField::new(&FiniteField::fq(q).unwrap(), "T")
    }

    fn assert_reduced(field: &RatFunField, x: &RatFun) {
        let f = field.fq();
        assert!(x.den().is_monic());
        assert!(x.num().gcd(x.den(), f).is_one() || x.num().is_zero());
    }

    #[test]
    fn char_two_cancellation() {
        let field = k(2);
        let x = field.parse("1/T").unwrap();
        assert!(field.is_zero(&field.add(&x, &x)));
    }

    #[test]
    fn factor_cancellation() {
        let field = k(3);
        let x = field.parse("(T^2+2)/(T+1)").unwrap();
        assert_eq!(x, field.parse("T+2").unwrap());
        assert_reduced(&field, &x);
    }

    #[test]
    fn inverse_pair() {
        for q in [2, 3, 4, 5] {
            let field = k(q);
            let t = field.var();
            let prod = field.mul(&t, &field.inv(&t).unwrap());
            assert!(field.is_one(&prod));
        }
    }

    #[test]
    fn division_by_zero() {
        let field = k(3);
        assert!(field.inv(&field.zero()).is_none());
        assert_eq!(field.fraction(&Poly::one(), &Poly::zero()), Err(Error::DivisionByZero));
        assert!(field.parse("1/0").is_err());
    }

    #[test]
    fn frobenius_on_polynomials() {
        let field = k(3);
        let x = field.parse("T+1").unwrap();
        assert_eq!(field.frobenius(&x), field.parse("T^3+1").unwrap());
        let y = field.parse("(T+2)/(T^2+1)").unwrap();
        assert_eq!(field.frobenius(&y), field.pow(&y, 3));
    }

    #[test]
    fn render_roundtrip() {
        let field = k(4);
        let x = field.parse("(w*T^2+1)/(T^3+(w+1)*T)").unwrap();
        assert_reduced(&field, &x);
        assert_eq!(field.parse(&field.render(&x)).unwrap(), x);
    }
}
