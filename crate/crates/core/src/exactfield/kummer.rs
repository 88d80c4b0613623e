//! Degree-one level fields `F_q(lambda)` with `lambda^(q-1) = -a`.
//!
//! For `a = T + theta` the Carlitz polynomial `rho_a(X) = aX + X^q` has the
//! nonzero roots `lambda` with `lambda^(q-1) = -a`, so `F_q(T)(lambda)` is the
//! rational function field in `lambda` with `T = -lambda^(q-1) - theta`.
//! Elements are reduced rational functions in `lambda` (rendered `l`).

use std::sync::Arc;

use super::gf::{FiniteField, Gf};
use super::poly::Poly;
use super::ratfun::{RatFun, RatFunField};
use super::ring::{Field, Ring};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct KummerField {
    field: RatFunField,
    t_field: RatFunField,
    level: Poly,
    theta: Gf,
    t_image: Poly,
}

impl KummerField {
    /// Level field for a monic `a` of degree one; other levels are rejected.
    pub fn new(fq: &Arc<FiniteField>, level: &Poly) -> Result<Self> {
        let t_field = RatFunField::new(fq, "T");
        if level.degree() != Some(1) || !level.is_monic() {
            return Err(Error::UnsupportedLevel(t_field.render(&t_field.poly(level))));
        }
        let theta = level.coeff(0);
        let q = fq.order() as usize;
        let minus_one = fq.neg(Gf(1));
        let t_image = Poly::monomial(minus_one, q - 1).sub(&Poly::constant(theta), fq);
        Ok(KummerField { field: RatFunField::new(fq, "l"), t_field, level: level.clone(), theta, t_image })
    }

    pub fn level(&self) -> &Poly {
        &self.level
    }

    pub fn theta(&self) -> Gf {
        self.theta
    }

    pub fn t_field(&self) -> &RatFunField {
        &self.t_field
    }

    /// `T` written in `lambda`.
    pub fn t_image(&self) -> &Poly {
        &self.t_image
    }

    pub fn lambda(&self) -> RatFun {
        self.field.var()
    }

    pub fn level_name(&self) -> String {
        self.t_field.render(&self.t_field.poly(&self.level))
    }

    /// Image of an element of `F_q(T)`.
    pub fn embed(&self, x: &RatFun) -> RatFun {
        self.t_field.substitute(x, &self.t_image, &self.field)
    }

    pub fn embed_poly(&self, a: &Poly) -> RatFun {
        RatFun::from_poly(a.compose(&self.t_image, self.field.fq()))
    }

    pub fn parse(&self, text: &str) -> Result<RatFun> {
        let gens = self.field.fq().named_generators();
        let mut named: Vec<(&str, RatFun)> =
            gens.iter().map(|(n, g)| (n.as_str(), self.from_fq(*g))).collect();
        named.push(("l", self.lambda()));
        named.push(("T", RatFun::from_poly(self.t_image.clone())));
        super::text::parse_element(self, text, &named)
    }
}

impl Ring for KummerField {
    type Elem = RatFun;

    fn base(&self) -> &Arc<FiniteField> {
        self.field.base()
    }

    fn zero(&self) -> RatFun {
        self.field.zero()
    }

    fn one(&self) -> RatFun {
        self.field.one()
    }

    fn is_zero(&self, a: &RatFun) -> bool {
        self.field.is_zero(a)
    }

    fn is_one(&self, a: &RatFun) -> bool {
        self.field.is_one(a)
    }

    fn add(&self, a: &RatFun, b: &RatFun) -> RatFun {
        self.field.add(a, b)
    }

    fn neg(&self, a: &RatFun) -> RatFun {
        self.field.neg(a)
    }

    fn mul(&self, a: &RatFun, b: &RatFun) -> RatFun {
        self.field.mul(a, b)
    }

    fn from_fq(&self, c: Gf) -> RatFun {
        self.field.from_fq(c)
    }

    fn render(&self, a: &RatFun) -> String {
        self.field.render(a)
    }

    fn frobenius(&self, a: &RatFun) -> RatFun {
        self.field.frobenius(a)
    }
}

impl Field for KummerField {
    fn inv(&self, a: &RatFun) -> Option<RatFun> {
        self.field.inv(a)
    }
}
