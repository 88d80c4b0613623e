//! Finite fields with table-driven arithmetic.
//!
//! Every field is built as `sub[x]/(m)` for a monic irreducible `m` over a
//! subfield `sub` (the prime field for `F_q` itself, `F_q` for its
//! extensions). An element is stored as its coordinate vector in the basis
//! `1, x, ..., x^(n-1)`, packed into an integer in base `|sub|`; since
//! `|sub|` is a power of `p`, the packed value is also the base-p digit
//! vector over the prime field, which makes addition digitwise.
//!
//! Multiplication goes through discrete log / antilog tables built once per
//! field from a primitive element.

use std::fmt;
use std::sync::Arc;

use super::poly::Poly;
use super::ring::{Field, Ring};

use crate::error::{Error, Result};

/// Element of a [`FiniteField`], packed polynomial-basis coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Gf(pub u32);

impl Gf {
    pub const ZERO: Gf = Gf(0);
    pub const ONE: Gf = Gf(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Largest field order for which tables are built (about 3^13).
pub const MAX_FIELD_ORDER: u64 = 1_600_000;

const ADD_TABLE_LIMIT: u32 = 729;

pub struct FiniteField {
    p: u32,
    order: u32,
    degree: u32,
    sub: Option<Arc<FiniteField>>,
    /// The distinguished constant field when it differs from `self`.
    fq: Option<Arc<FiniteField>>,
    modulus: Vec<Gf>,
    generator_name: char,
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u32>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order
            && self.p == other.p
            && self.modulus == other.modulus
            && self.sub.as_ref().map(|s| s.order) == other.sub.as_ref().map(|s| s.order)
            && self.q() == other.q()
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits `q = p^e`, or `None` when `q` is not a prime power.
pub fn prime_power_split(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = prime_factors(q)[0];
    let mut e = 0;
    let mut r = q;
    while r % p == 0 {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

impl FiniteField {
    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        if !is_prime(p) {
            return Err(Error::NotPrimePower(p));
        }
        if p > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge(p));
        }
        let p32 = p as u32;
        let mut field = FiniteField {
            p: p32,
            order: p32,
            degree: 1,
            sub: None,
            fq: None,
            modulus: vec![Gf(0), Gf(1)],
            generator_name: 'x',
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
        };
        field.build_tables(|a, b| Gf(((a.0 as u64 * b.0 as u64) % p) as u32));
        Ok(Arc::new(field))
    }

    /// F_q for a prime power q, represented over F_p by the lexicographically
    /// least monic irreducible polynomial, generator rendered as `w`.
    pub fn fq(q: u64) -> Result<Arc<Self>> {
        let (p, e) = prime_power_split(q).ok_or(Error::NotPrimePower(q))?;
        let prime = Self::prime(p)?;
        if e == 1 {
            return Ok(prime);
        }
        let modulus = least_irreducible(&prime, e as usize);
        Self::build(prime, modulus, 'w', None)
    }

    /// The extension F_{q^n} of `fq`, modulus the lexicographically least monic
    /// irreducible of degree n over F_q, generator rendered as `x`.
    pub fn extension(fq: &Arc<Self>, n: usize) -> Result<Arc<Self>> {
        if n == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        let modulus = least_irreducible(fq, n);
        Self::build(fq.clone(), modulus, 'x', Some(fq.clone()))
    }

    /// `sub[x]/(modulus)`; the caller guarantees irreducibility.
    pub fn with_modulus(sub: &Arc<Self>, modulus: Vec<Gf>, generator_name: char) -> Result<Arc<Self>> {
        let fq = sub.fq_arc_or_self(sub);
        Self::build(sub.clone(), modulus, generator_name, Some(fq))
    }

    fn fq_arc_or_self(&self, this: &Arc<Self>) -> Arc<Self> {
        self.fq.clone().unwrap_or_else(|| this.clone())
    }

    fn build(
        sub: Arc<Self>,
        modulus: Vec<Gf>,
        generator_name: char,
        fq: Option<Arc<Self>>,
    ) -> Result<Arc<Self>> {
        let n = modulus.len() - 1;
        let order = (sub.order as u64).checked_pow(n as u32).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(Error::FieldTooLarge(order));
        }
        let mut field = FiniteField {
            p: sub.p,
            order: order as u32,
            degree: n as u32,
            sub: Some(sub.clone()),
            fq,
            modulus: modulus.clone(),
            generator_name,
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
        };
        let s = sub.order;
        let sub_ref = sub.clone();
        field.build_tables(move |a, b| {
            let da = digits(a.0, s, n);
            let db = digits(b.0, s, n);
            let mut prod = vec![Gf(0); 2 * n];
            for (i, &x) in da.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in db.iter().enumerate() {
                    if y == 0 {
                        continue;
                    }
                    let t = sub_ref.mul(Gf(x), Gf(y));
                    prod[i + j] = sub_ref.add(prod[i + j], t);
                }
            }
            for k in (n..2 * n).rev() {
                let c = prod[k];
                if c.is_zero() {
                    continue;
                }
                prod[k] = Gf(0);
                for (i, &m) in modulus[..n].iter().enumerate() {
                    let t = sub_ref.mul(c, m);
                    prod[k - n + i] = sub_ref.sub(prod[k - n + i], t);
                }
            }
            let mut packed = 0u32;
            for k in (0..n).rev() {
                packed = packed * s + prod[k].0;
            }
            Gf(packed)
        });
        Ok(Arc::new(field))
    }

    fn build_tables(&mut self, slow_mul: impl Fn(Gf, Gf) -> Gf) {
        let order = self.order;
        if order <= ADD_TABLE_LIMIT && self.p != 2 {
            let mut table = vec![0u32; (order * order) as usize];
            for a in 0..order {
                for b in 0..order {
                    table[(a * order + b) as usize] = self.add_digits(a, b);
                }
            }
            self.add_table = Some(table);
        }
        let m = (order - 1) as u64;
        let factors = prime_factors(m);
        let slow_pow = |a: Gf, mut e: u64| {
            let mut acc = Gf(1);
            let mut b = a;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(acc, b);
                }
                b = slow_mul(b, b);
                e >>= 1;
            }
            acc
        };
        let generator = (1..order)
            .map(Gf)
            .find(|&c| factors.iter().all(|&r| slow_pow(c, m / r) != Gf(1)))
            .expect("multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u32; m as usize];
        let mut log = vec![0u32; order as usize];
        let mut x = Gf(1);
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = x.0;
            log[x.0 as usize] = i as u32;
            x = slow_mul(x, generator);
        }
        self.exp = exp;
        self.log = log;
    }

    fn add_digits(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        if p == 2 {
            return a ^ b;
        }
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % p + b % p) % p) * place;
            place *= p;
            a /= p;
            b /= p;
        }
        out
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Size of the distinguished constant field F_q.
    pub fn q(&self) -> u32 {
        self.fq.as_ref().map_or(self.order, |f| f.order)
    }

    /// Degree over the field the modulus lives in.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Degree over F_q.
    pub fn degree_over_fq(&self) -> u32 {
        let mut d = 0;
        let mut size = 1u64;
        while size < self.order as u64 {
            size *= self.q() as u64;
            d += 1;
        }
        d
    }

    pub fn is_prime_field(&self) -> bool {
        self.sub.is_none()
    }

    pub fn subfield(&self) -> Option<&Arc<FiniteField>> {
        self.sub.as_ref()
    }

    pub fn modulus(&self) -> &[Gf] {
        &self.modulus
    }

    pub fn generator_name(&self) -> char {
        self.generator_name
    }

    pub fn name(&self) -> String {
        if self.is_prime_field() {
            format!("F_{}", self.order)
        } else if self.fq.is_none() {
            format!("F_{}[{}]/({})", self.p, self.generator_name, self.render_modulus())
        } else {
            format!("F_{}[{}]/({})", self.q(), self.generator_name, self.render_modulus())
        }
    }

    fn render_modulus(&self) -> String {
        let sub = self.sub.as_ref().expect("non-prime field has a subfield");
        let coeffs: Vec<String> = self.modulus.iter().map(|&c| sub.render(c)).collect();
        super::text::render_dense(&coeffs, &self.generator_name.to_string())
    }

    pub fn elements(&self) -> impl Iterator<Item = Gf> {
        (0..self.order).map(Gf)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Gf> {
        (1..self.order).map(Gf)
    }

    /// A generator of the multiplicative group.
    pub fn primitive(&self) -> Gf {
        Gf(self.exp[1 % self.exp.len()])
    }

    /// The class of the polynomial variable.
    pub fn generator(&self) -> Gf {
        match &self.sub {
            None => Gf(0),
            Some(sub) if self.degree >= 2 => Gf(sub.order),
            Some(sub) => sub.neg(self.modulus[0]),
        }
    }

    pub fn from_int(&self, n: i64) -> Gf {
        Gf(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, a: Gf, b: Gf) -> Gf {
        if let Some(t) = &self.add_table {
            Gf(t[(a.0 * self.order + b.0) as usize])
        } else {
            Gf(self.add_digits(a.0, b.0))
        }
    }

    #[inline]
    pub fn neg(&self, a: Gf) -> Gf {
        let p = self.p;
        if p == 2 {
            return a;
        }
        let (mut a, mut out, mut place) = (a.0, 0, 1);
        while a > 0 {
            out += ((p - a % p) % p) * place;
            place *= p;
            a /= p;
        }
        Gf(out)
    }

    #[inline]
    pub fn sub(&self, a: Gf, b: Gf) -> Gf {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a.0 == 0 || b.0 == 0 {
            return Gf(0);
        }
        let m = self.exp.len() as u32;
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Gf(self.exp[(if s >= m { s - m } else { s }) as usize])
    }

    pub fn inv(&self, a: Gf) -> Option<Gf> {
        if a.0 == 0 {
            return None;
        }
        let m = self.exp.len() as u32;
        let l = self.log[a.0 as usize];
        Some(Gf(self.exp[((m - l) % m) as usize]))
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if e == 0 {
            return Gf(1);
        }
        if a.0 == 0 {
            return Gf(0);
        }
        let m = self.exp.len() as u128;
        let l = self.log[a.0 as usize] as u128;
        Gf(self.exp[((l * e as u128) % m) as usize])
    }

    /// Discrete logarithm to the base [`Self::primitive`].
    pub fn log(&self, a: Gf) -> Option<u32> {
        (a.0 != 0).then(|| self.log[a.0 as usize])
    }

    pub fn exp(&self, k: u64) -> Gf {
        Gf(self.exp[(k % self.exp.len() as u64) as usize])
    }

    /// x -> x^q for the distinguished constant field F_q.
    pub fn frobenius_q(&self, a: Gf) -> Gf {
        self.pow(a, self.q() as u64)
    }

    /// Coordinates over the subfield in the basis 1, x, ..., x^(n-1).
    pub fn coords(&self, a: Gf) -> Vec<Gf> {
        match &self.sub {
            None => vec![a],
            Some(sub) => digits(a.0, sub.order, self.degree as usize).into_iter().map(Gf).collect(),
        }
    }

    pub fn from_coords(&self, coords: &[Gf]) -> Gf {
        match &self.sub {
            None => coords.first().copied().unwrap_or_default(),
            Some(sub) => {
                let mut packed = 0u32;
                for c in coords.iter().take(self.degree as usize).rev() {
                    packed = packed * sub.order + c.0;
                }
                Gf(packed)
            }
        }
    }

    /// Coordinates over F_q (as opposed to over the immediate subfield).
    pub fn fq_coords(&self, a: Gf) -> Vec<Gf> {
        let q = self.q();
        digits(a.0, q, self.degree_over_fq() as usize).into_iter().map(Gf).collect()
    }

    pub fn from_fq_coords(&self, coords: &[Gf]) -> Gf {
        let q = self.q();
        let mut packed = 0u32;
        for c in coords.iter().rev() {
            packed = packed * q + c.0;
        }
        Gf(packed)
    }

    /// Canonical text: integers for the prime field, otherwise a polynomial in
    /// the generator (`w` for F_q over F_p, `x` for extensions of F_q).
    pub fn render(&self, a: Gf) -> String {
        match &self.sub {
            None => a.0.to_string(),
            Some(sub) => {
                let coeffs: Vec<String> = self.coords(a).iter().map(|&c| sub.render(c)).collect();
                super::text::render_dense(&coeffs, &self.generator_name.to_string())
            }
        }
    }

    /// Generators usable by the text parser for this field.
    pub fn named_generators(&self) -> Vec<(String, Gf)> {
        let mut out = Vec::new();
        if let Some(sub) = &self.sub {
            out.extend(sub.named_generators());
            out.push((self.generator_name.to_string(), self.generator()));
        }
        out
    }

    pub fn parse(self: &Arc<Self>, text: &str) -> Result<Gf> {
        let gens = self.named_generators();
        let gens: Vec<(&str, Gf)> = gens.iter().map(|(n, g)| (n.as_str(), *g)).collect();
        super::text::parse_element(&GfRing(self.clone()), text, &gens)
    }
}

fn digits(mut a: u32, base: u32, n: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(a % base);
        a /= base;
    }
    out
}

/// Monic irreducible polynomials of degree n over `field` are tested in
/// increasing order of their packed coefficient vector (c_{n-1} most
/// significant), returning the first one.
pub fn least_irreducible(field: &Arc<FiniteField>, n: usize) -> Vec<Gf> {
    let s = field.order() as u64;
    let total = s.pow(n as u32);
    for k in 0..total {
        let mut coeffs: Vec<Gf> = Vec::with_capacity(n + 1);
        let mut r = k;
        for _ in 0..n {
            coeffs.push(Gf((r % s) as u32));
            r /= s;
        }
        coeffs.push(Gf(1));
        let poly = Poly::from_coeffs(coeffs.clone());
        if poly.is_irreducible(field) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// [`Ring`] view of a finite field, for generic code (skew polynomials, Moore
/// determinants, torsion computations).
#[derive(Clone, Debug)]
pub struct GfRing(pub Arc<FiniteField>);

impl GfRing {
    pub fn new(field: &Arc<FiniteField>) -> Self {
        GfRing(field.clone())
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.0
    }
}

impl Ring for GfRing {
    type Elem = Gf;

    fn base(&self) -> &Arc<FiniteField> {
        match &self.0.fq {
            Some(f) => f,
            None => &self.0,
        }
    }

    fn zero(&self) -> Gf {
        Gf(0)
    }

    fn one(&self) -> Gf {
        Gf(1)
    }

    fn is_zero(&self, a: &Gf) -> bool {
        a.0 == 0
    }

    fn add(&self, a: &Gf, b: &Gf) -> Gf {
        self.0.add(*a, *b)
    }

    fn neg(&self, a: &Gf) -> Gf {
        self.0.neg(*a)
    }

    fn sub(&self, a: &Gf, b: &Gf) -> Gf {
        self.0.sub(*a, *b)
    }

    fn mul(&self, a: &Gf, b: &Gf) -> Gf {
        self.0.mul(*a, *b)
    }

    fn from_fq(&self, c: Gf) -> Gf {
        c
    }

    fn render(&self, a: &Gf) -> String {
        self.0.render(*a)
    }

    fn pow(&self, a: &Gf, e: u64) -> Gf {
        self.0.pow(*a, e)
    }

    fn frobenius(&self, a: &Gf) -> Gf {
        self.0.frobenius_q(*a)
    }
}

impl Field for GfRing {
    fn inv(&self, a: &Gf) -> Option<Gf> {
        self.0.inv(*a)
    }
}
