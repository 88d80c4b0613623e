//! Truncated Laurent series `sum_{i >= v} c_i x^i + O(x^N)` over any [`Ring`].
//!
//! Every series carries its absolute precision `N`: coefficients at exponents
//! `>= N` are unknown. Arithmetic propagates the precision that is actually
//! justified, so an equality check below the reported precision is a proof.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactfield::{Field, Ring};

#[derive(Clone, PartialEq, Debug)]
pub struct TruncSeries<E> {
    var: Arc<str>,
    // exponent of coeffs[0]; no leading or trailing zeros, so equal series
    // compare equal
    val: i64,
    coeffs: Vec<E>,
    prec: i64,
}

impl<E: Clone + PartialEq + Debug> TruncSeries<E> {
    pub fn var(&self) -> &str {
        &self.var
    }

    /// `None` for a series that is zero to its precision.
    pub fn valuation(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.first()
    }

    /// Coefficient of `x^i`, `None` at or above the precision.
    pub fn coeff(&self, i: i64) -> Option<Option<&E>> {
        if i >= self.prec {
            return None;
        }
        if i < self.val {
            return Some(None);
        }
        Some(self.coeffs.get((i - self.val) as usize))
    }

    /// Every known coefficient from the valuation up, zeros included.
    pub fn dense(&self) -> impl Iterator<Item = (i64, &E)> {
        self.coeffs.iter().enumerate().map(move |(k, c)| (self.val + k as i64, c))
    }
}

/// Series over `ring` in the variable `var`.
#[derive(Clone, Debug)]
pub struct SeriesRing<R: Ring> {
    ring: R,
    var: Arc<str>,
}

type S<R> = TruncSeries<<R as Ring>::Elem>;

impl<R: Ring> SeriesRing<R> {
    pub fn new(ring: &R, var: &str) -> Self {
        SeriesRing { ring: ring.clone(), var: var.into() }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn with_var(&self, var: &str) -> Self {
        SeriesRing::new(&self.ring, var)
    }

    fn build(&self, var: &Arc<str>, mut val: i64, mut coeffs: Vec<R::Elem>, prec: i64) -> S<R> {
        let cut = (prec - val).max(0) as usize;
        coeffs.truncate(cut);
        while coeffs.last().is_some_and(|c| self.ring.is_zero(c)) {
            coeffs.pop();
        }
        let lead = coeffs.iter().position(|c| !self.ring.is_zero(c));
        match lead {
            None => TruncSeries { var: var.clone(), val: prec, coeffs: Vec::new(), prec },
            Some(k) => {
                coeffs.drain(..k);
                val += k as i64;
                TruncSeries { var: var.clone(), val, coeffs, prec }
            }
        }
    }

    /// Series with `coeffs[k]` at exponent `val + k`.
    pub fn from_coeffs(&self, val: i64, coeffs: Vec<R::Elem>, prec: i64) -> S<R> {
        self.build(&self.var, val, coeffs, prec)
    }

    /// Sum of the given terms; exponents at or above `prec` are dropped.
    pub fn from_terms(&self, terms: impl IntoIterator<Item = (i64, R::Elem)>, prec: i64) -> S<R> {
        let terms: Vec<(i64, R::Elem)> = terms.into_iter().filter(|(e, _)| *e < prec).collect();
        let Some(val) = terms.iter().map(|(e, _)| *e).min() else {
            return self.zero(prec);
        };
        let mut coeffs = vec![self.ring.zero(); (prec - val) as usize];
        for (e, c) in terms {
            let slot = &mut coeffs[(e - val) as usize];
            *slot = self.ring.add(slot, &c);
        }
        self.from_coeffs(val, coeffs, prec)
    }

    pub fn zero(&self, prec: i64) -> S<R> {
        self.from_coeffs(prec, Vec::new(), prec)
    }

    pub fn one(&self, prec: i64) -> S<R> {
        self.constant(self.ring.one(), prec)
    }

    pub fn constant(&self, c: R::Elem, prec: i64) -> S<R> {
        self.monomial(c, 0, prec)
    }

    pub fn monomial(&self, c: R::Elem, k: i64, prec: i64) -> S<R> {
        self.from_coeffs(k, vec![c], prec)
    }

    /// The variable itself.
    pub fn gen(&self, prec: i64) -> S<R> {
        self.monomial(self.ring.one(), 1, prec)
    }

    fn check(&self, a: &S<R>, b: &S<R>) -> Result<()> {
        if a.var != b.var {
            return Err(Error::VariableMismatch { left: a.var.to_string(), right: b.var.to_string() });
        }
        Ok(())
    }

    pub fn truncate(&self, a: &S<R>, prec: i64) -> S<R> {
        if prec >= a.prec {
            return a.clone();
        }
        self.build(&a.var, a.val, a.coeffs.clone(), prec)
    }

    pub fn add(&self, a: &S<R>, b: &S<R>) -> Result<S<R>> {
        self.check(a, b)?;
        Ok(self.add_raw(a, b))
    }

    fn add_raw(&self, a: &S<R>, b: &S<R>) -> S<R> {
        let prec = a.prec.min(b.prec);
        let val = a.val.min(b.val).min(prec);
        let mut coeffs = vec![self.ring.zero(); (prec - val) as usize];
        for s in [a, b] {
            for (e, c) in s.dense() {
                if e >= prec {
                    break;
                }
                let slot = &mut coeffs[(e - val) as usize];
                *slot = self.ring.add(slot, c);
            }
        }
        self.build(&a.var, val, coeffs, prec)
    }

    pub fn neg(&self, a: &S<R>) -> S<R> {
        let coeffs = a.coeffs.iter().map(|c| self.ring.neg(c)).collect();
        TruncSeries { var: a.var.clone(), val: a.val, coeffs, prec: a.prec }
    }

    pub fn sub(&self, a: &S<R>, b: &S<R>) -> Result<S<R>> {
        self.add(a, &self.neg(b))
    }

    /// `c * a` for a scalar `c`.
    pub fn scale(&self, a: &S<R>, c: &R::Elem) -> S<R> {
        let coeffs = a.coeffs.iter().map(|x| self.ring.mul(c, x)).collect();
        self.build(&a.var, a.val, coeffs, a.prec)
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, a: &S<R>, k: i64) -> S<R> {
        TruncSeries { var: a.var.clone(), val: a.val + k, coeffs: a.coeffs.clone(), prec: a.prec + k }
    }

    pub fn mul(&self, a: &S<R>, b: &S<R>) -> Result<S<R>> {
        self.check(a, b)?;
        Ok(self.mul_raw(a, b))
    }

    fn mul_raw(&self, a: &S<R>, b: &S<R>) -> S<R> {
        let prec = (a.prec + b.val).min(b.prec + a.val);
        let val = a.val + b.val;
        if a.is_zero() || b.is_zero() || val >= prec {
            return self.build(&a.var, prec, Vec::new(), prec);
        }
        let len = (prec - val) as usize;
        let mut coeffs = vec![self.ring.zero(); len];
        // sparse operands are common, so skip their zero coefficients
        let nz_b: Vec<(usize, &R::Elem)> =
            b.coeffs.iter().enumerate().take(len).filter(|(_, c)| !self.ring.is_zero(c)).collect();
        for (i, x) in a.coeffs.iter().enumerate().take(len) {
            if self.ring.is_zero(x) {
                continue;
            }
            for &(j, y) in &nz_b {
                if i + j >= len {
                    break;
                }
                coeffs[i + j] = self.ring.add(&coeffs[i + j], &self.ring.mul(x, y));
            }
        }
        self.build(&a.var, val, coeffs, prec)
    }

    /// `a^e` by repeated squaring.
    pub fn pow(&self, a: &S<R>, mut e: u64) -> S<R> {
        let mut acc = self.one(i64::MAX / 4);
        acc.var = a.var.clone();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_raw(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul_raw(&base, &base);
            }
        }
        if acc.prec >= i64::MAX / 8 {
            // a^0 with nothing to bound it
            acc = self.truncate(&acc, a.prec.max(0));
        }
        acc
    }

    /// Coefficientwise `q`-power: `(sum c_i x^i)^q = sum c_i^q x^(qi)`, exact
    /// in characteristic p, with the precision multiplied by `q`.
    pub fn frobenius(&self, a: &S<R>) -> S<R> {
        let q = self.ring.q() as i64;
        let terms = a.dense().filter(|(_, c)| !self.ring.is_zero(c)).map(|(e, c)| (e * q, self.ring.frobenius(c)));
        let mut out = self.from_terms(terms, a.prec * q);
        out.var = a.var.clone();
        out
    }

    pub fn frobenius_iter(&self, a: &S<R>, times: usize) -> S<R> {
        (0..times).fold(a.clone(), |acc, _| self.frobenius(&acc))
    }

    /// d/dx, with precision lowered by one.
    pub fn derivative(&self, a: &S<R>) -> S<R> {
        if a.is_zero() {
            return self.build(&a.var, a.prec - 1, Vec::new(), a.prec - 1);
        }
        let coeffs = a.dense().map(|(e, c)| self.ring.mul(&self.ring.from_int(e), c)).collect();
        self.build(&a.var, a.val - 1, coeffs, a.prec - 1)
    }

    /// Coefficientwise image in another ring, variable unchanged.
    pub fn map_coeffs<R2: Ring, F>(&self, a: &S<R>, target: &SeriesRing<R2>, f: F) -> S<R2>
    where
        F: Fn(&R::Elem) -> R2::Elem,
    {
        let coeffs = a.coeffs.iter().map(f).collect();
        target.build(&a.var, a.val, coeffs, a.prec)
    }

    /// Lowest exponent below the common precision where `a` and `b` differ.
    pub fn first_mismatch(&self, a: &S<R>, b: &S<R>) -> Result<Option<i64>> {
        self.check(a, b)?;
        let prec = a.prec.min(b.prec);
        let lo = a.val.min(b.val);
        let zero = self.ring.zero();
        for e in lo..prec {
            let x = a.coeff(e).flatten().unwrap_or(&zero);
            let y = b.coeff(e).flatten().unwrap_or(&zero);
            if !self.ring.equal(x, y) {
                return Ok(Some(e));
            }
        }
        Ok(None)
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a S<R>>, prec: i64) -> Result<S<R>>
    where
        R::Elem: 'a,
    {
        let mut acc = self.zero(prec);
        let mut first = true;
        for s in items {
            if first {
                acc.var = s.var.clone();
                first = false;
            }
            acc = self.add(&acc, s)?;
        }
        Ok(acc)
    }

    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a S<R>>, prec: i64) -> Result<S<R>>
    where
        R::Elem: 'a,
    {
        let mut acc = self.one(prec);
        let mut first = true;
        for s in items {
            if first {
                acc.var = s.var.clone();
                first = false;
            }
            acc = self.mul(&acc, s)?;
        }
        Ok(acc)
    }

    /// Renders as `c*x^e+...+O(x^N)`.
    pub fn render(&self, a: &S<R>) -> String {
        let mut parts = Vec::new();
        for (e, c) in a.dense() {
            if self.ring.is_zero(c) {
                continue;
            }
            let s = self.ring.render(c);
            let s = if s.contains('+') || s.contains('-') || s.contains('/') { format!("({s})") } else { s };
            parts.push(match e {
                0 => s,
                _ => format!("{s}*{}^{e}", a.var),
            });
        }
        parts.push(format!("O({}^{})", a.var, a.prec));
        parts.join("+")
    }

    /// `(exponent, rendered coefficient)` for every nonzero coefficient.
    pub fn render_terms(&self, a: &S<R>) -> Vec<(i64, String)> {
        a.dense().filter(|(_, c)| !self.ring.is_zero(c)).map(|(e, c)| (e, self.ring.render(c))).collect()
    }
}

impl<F: Field> SeriesRing<F> {
    /// `1/a`; valuation `-v` and precision `N - 2v` for `a` of valuation `v`
    /// and precision `N`.
    pub fn inv(&self, a: &S<F>) -> Result<S<F>> {
        let Some(v) = a.valuation() else {
            return Err(Error::NotInvertible(a.prec));
        };
        let ring = &self.ring;
        let len = (a.prec - v) as usize;
        let c0_inv = ring.inv(&a.coeffs[0]).ok_or(Error::DivisionByZero)?;
        let minus_c0_inv = ring.neg(&c0_inv);
        let nz: Vec<(usize, &F::Elem)> =
            a.coeffs.iter().enumerate().skip(1).filter(|(_, c)| !ring.is_zero(c)).collect();
        let mut b: Vec<F::Elem> = Vec::with_capacity(len);
        b.push(c0_inv);
        for n in 1..len {
            let mut s = ring.zero();
            for &(k, c) in &nz {
                if k > n {
                    break;
                }
                let bk = &b[n - k];
                if !ring.is_zero(bk) {
                    s = ring.add(&s, &ring.mul(c, bk));
                }
            }
            b.push(if ring.is_zero(&s) { s } else { ring.mul(&minus_c0_inv, &s) });
        }
        Ok(self.build(&a.var, -v, b, a.prec - 2 * v))
    }

    pub fn div(&self, a: &S<F>, b: &S<F>) -> Result<S<F>> {
        self.check(a, b)?;
        Ok(self.mul_raw(a, &self.inv(b)?))
    }

    /// `a^e` for any integer `e`.
    pub fn pow_signed(&self, a: &S<F>, e: i64) -> Result<S<F>> {
        if e >= 0 {
            Ok(self.pow(a, e as u64))
        } else {
            Ok(self.pow(&self.inv(a)?, e.unsigned_abs()))
        }
    }

    /// `f(s)` for `s` of positive valuation; the result is in the variable of
    /// `s`. A Laurent `f = x^v u(x)` becomes `s^v u(s)`.
    pub fn compose(&self, f: &S<F>, s: &S<F>) -> Result<S<F>> {
        let vs = match s.valuation() {
            Some(v) if v >= 1 => v,
            Some(v) => return Err(Error::BadSubstitution(v)),
            None => return Err(Error::BadSubstitution(s.prec)),
        };
        let out_ring = self.with_var(&s.var);
        let vf = f.valuation().unwrap_or(f.prec);
        // error terms: O(x^pf) -> O(s^pf), and the error of s times d/ds of
        // the lowest term
        let mut prec = f.prec * vs;
        if vf != 0 {
            prec = prec.min(s.prec + (vf - 1) * vs);
        }
        if f.is_zero() {
            return Ok(out_ring.zero(prec));
        }
        let s = if vf >= 1 { self.truncate(s, prec) } else { s.clone() };
        let mut acc = out_ring.zero(prec);
        let mut power = if vf >= 0 { self.pow(&s, vf as u64) } else { self.pow(&self.inv(&s)?, vf.unsigned_abs()) };
        power = self.truncate(&power, prec);
        for (e, c) in f.dense() {
            if e * vs >= prec && e > 0 {
                break;
            }
            if e > vf {
                power = self.truncate(&self.mul_raw(&power, &s), prec);
            }
            if !self.ring.is_zero(c) {
                acc = self.add_raw(&acc, &self.scale(&power, c));
            }
        }
        Ok(self.truncate(&acc, prec))
    }
}
