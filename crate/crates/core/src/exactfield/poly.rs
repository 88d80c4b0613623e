//! Dense univariate polynomials over a [`FiniteField`].
//!
//! The same type serves as `A = F_q[T]`, as numerators and denominators of
//! rational functions in `T` or in a Kummer generator, and as moduli of
//! extension fields. Operations take the coefficient field explicitly.

use std::sync::Arc;

use super::gf::{FiniteField, Gf};
use crate::error::{Error, Result};

/// Polynomial with coefficients `coeffs[i]` of `var^i`, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Poly {
    coeffs: Vec<Gf>,
}

/// The base ring `A = F_q[T]`.
pub type PolyA = Poly;

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![Gf(1)] }
    }

    pub fn constant(c: Gf) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(c: Gf, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Gf(0); k + 1];
        coeffs[k] = c;
        Poly { coeffs }
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::monomial(Gf(1), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<Gf>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn coeffs(&self) -> &[Gf] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Gf {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Gf(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> Gf {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Gf(1)
    }

    /// Lowest index with a nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// `Some(k)` when the polynomial is `c * var^k`.
    pub fn monomial_degree(&self) -> Option<usize> {
        let low = self.low_degree()?;
        (low + 1 == self.coeffs.len()).then_some(low)
    }

    pub fn add(&self, other: &Poly, f: &FiniteField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Poly, f: &FiniteField) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Self::from_coeffs(coeffs)
    }

    pub fn neg(&self, f: &FiniteField) -> Poly {
        Poly { coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn scale(&self, c: Gf, f: &FiniteField) -> Poly {
        if c.is_zero() {
            return Self::zero();
        }
        Poly { coeffs: self.coeffs.iter().map(|&a| f.mul(a, c)).collect() }
    }

    /// Multiplication by `var^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Gf(0); k];
        coeffs.extend_from_slice(&self.coeffs);
        Poly { coeffs }
    }

    /// Drops the factor `var^k`; the caller guarantees divisibility.
    pub fn unshift(&self, k: usize) -> Poly {
        Self::from_coeffs(self.coeffs.get(k..).map(<[Gf]>::to_vec).unwrap_or_default())
    }

    pub fn mul(&self, other: &Poly, f: &FiniteField) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.coeffs.len() == 1 {
            return other.scale(self.coeffs[0], f);
        }
        if other.coeffs.len() == 1 {
            return self.scale(other.coeffs[0], f);
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        if f.is_prime_field() {
            let p = f.characteristic() as u64;
            // products of residues < p accumulate in u64 well before overflow
            let mut acc = vec![0u64; n];
            for (i, a) in self.coeffs.iter().enumerate() {
                if a.0 == 0 {
                    continue;
                }
                let a = a.0 as u64;
                for (slot, b) in acc[i..].iter_mut().zip(&other.coeffs) {
                    *slot += a * b.0 as u64;
                }
            }
            return Self::from_coeffs(acc.into_iter().map(|v| Gf((v % p) as u32)).collect());
        }
        let mut out = vec![Gf(0); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, mut e: u64, f: &FiniteField) -> Poly {
        let mut acc = Self::one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, f);
            }
        }
        acc
    }

    /// Quotient and remainder; fails on a zero divisor.
    pub fn divrem(&self, d: &Poly, f: &FiniteField) -> Result<(Poly, Poly)> {
        let dd = d.degree().ok_or(Error::DivisionByZero)?;
        let inv_lead = f.inv(d.lead()).ok_or(Error::DivisionByZero)?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Gf(0); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, inv_lead);
            quot[k - dd] = factor;
            for (i, &dc) in d.coeffs.iter().enumerate() {
                if !dc.is_zero() {
                    rem[k - dd + i] = f.sub(rem[k - dd + i], f.mul(factor, dc));
                }
            }
        }
        rem.truncate(dd);
        Ok((Self::from_coeffs(quot), Self::from_coeffs(rem)))
    }

    pub fn rem(&self, d: &Poly, f: &FiniteField) -> Result<Poly> {
        Ok(self.divrem(d, f)?.1)
    }

    /// Exact quotient; the caller guarantees divisibility.
    pub fn div_exact(&self, d: &Poly, f: &FiniteField) -> Result<Poly> {
        Ok(self.divrem(d, f)?.0)
    }

    pub fn monic(&self, f: &FiniteField) -> Poly {
        match f.inv(self.lead()) {
            Some(inv) if self.lead() != Gf(1) => self.scale(inv, f),
            _ => self.clone(),
        }
    }

    /// Monic greatest common divisor (zero only when both inputs are zero).
    pub fn gcd(&self, other: &Poly, f: &FiniteField) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, x: Gf, f: &FiniteField) -> Gf {
        self.coeffs.iter().rev().fold(Gf(0), |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Horner evaluation of the coefficient sequence at an element of an
    /// extension `big`, coefficients embedded through `embed`.
    pub fn eval_in(&self, x: Gf, big: &FiniteField, embed: impl Fn(Gf) -> Gf) -> Gf {
        self.coeffs.iter().rev().fold(Gf(0), |acc, &c| big.add(big.mul(acc, x), embed(c)))
    }

    /// Substitution `var -> g`.
    pub fn compose(&self, g: &Poly, f: &FiniteField) -> Poly {
        let mut acc = Self::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(g, f).add(&Self::constant(c), f);
        }
        acc
    }

    /// `self^q` for coefficients in the constant field F_q of `f`:
    /// `(sum c_i var^i)^q = sum c_i^q var^(q i)`.
    pub fn qth_power(&self, f: &FiniteField) -> Poly {
        let q = f.q() as usize;
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Gf(0); q * (self.coeffs.len() - 1) + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[q * i] = f.frobenius_q(c);
        }
        Poly { coeffs }
    }

    pub fn derivative(&self, f: &FiniteField) -> Poly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(f.from_int(i as i64), c))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn mulmod(&self, other: &Poly, m: &Poly, f: &FiniteField) -> Poly {
        self.mul(other, f).rem(m, f).expect("nonzero modulus")
    }

    pub fn powmod(&self, mut e: u64, m: &Poly, f: &FiniteField) -> Poly {
        let mut acc = Self::one().rem(m, f).expect("nonzero modulus");
        let mut base = self.rem(m, f).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m, f);
            }
            e >>= 1;
            if e > 0 {
                base = base.mulmod(&base, m, f);
            }
        }
        acc
    }

    /// Ben-Or style test: no factor of degree `i <= n/2`, detected through
    /// `gcd(x^(s^i) - x, self)` with `s = |f|`.
    pub fn is_irreducible(&self, f: &FiniteField) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        let s = f.order() as u64;
        let x = Self::var();
        let mut power = x.clone();
        for _ in 1..=n / 2 {
            power = power.powmod(s, self, f);
            let g = power.sub(&x, f).gcd(self, f);
            if !g.is_one() {
                return false;
            }
        }
        true
    }

    pub fn render(&self, f: &FiniteField, var: &str) -> String {
        let coeffs: Vec<String> = self.coeffs.iter().map(|&c| f.render(c)).collect();
        super::text::render_dense(&coeffs, var)
    }
}

/// All monic polynomials of degree `d`, in increasing packed order of their
/// lower coefficients.
pub fn monics_of_degree(fq: &FiniteField, d: usize) -> Vec<Poly> {
    let q = fq.order() as u64;
    (0..q.pow(d as u32))
        .map(|mut k| {
            let mut coeffs = Vec::with_capacity(d + 1);
            for _ in 0..d {
                coeffs.push(Gf((k % q) as u32));
                k /= q;
            }
            coeffs.push(Gf(1));
            Poly::from_coeffs(coeffs)
        })
        .collect()
}

/// Monic polynomials of degree at most `d_max`, grouped by degree.
pub fn enumerate_monics(fq: &FiniteField, d_max: usize) -> Vec<Poly> {
    (0..=d_max).flat_map(|d| monics_of_degree(fq, d)).collect()
}

/// All nonzero polynomials of degree exactly `d`.
pub fn polys_of_degree(fq: &Arc<FiniteField>, d: usize) -> Vec<Poly> {
    let monics = monics_of_degree(fq, d);
    fq.nonzero_elements()
        .flat_map(|c| monics.iter().map(move |m| m.scale(c, fq)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<FiniteField> {
        FiniteField::fq(3).unwrap()
    }

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.iter().map(|&x| Gf(x)).collect())
    }

    #[test]
    fn characteristic_three_cancellation() {
        let f = f3();
        assert!(p(&[1, 1]).add(&p(&[2, 2]), &f).is_zero());
    }

    #[test]
    fn schoolbook_product() {
        let f = f3();
        // (T+1)(T+2) = T^2 + 3T + 2 = T^2 + 2
        assert_eq!(p(&[1, 1]).mul(&p(&[2, 1]), &f), p(&[2, 0, 1]));
    }

    #[test]
    fn euclid_gcd() {
        let f = f3();
        assert_eq!(p(&[2, 0, 1]).gcd(&p(&[1, 1]), &f), p(&[1, 1]));
        assert_eq!(p(&[1, 0, 1]).gcd(&p(&[1, 1]), &f), Poly::one());
    }

    #[test]
    fn division_by_zero_polynomial() {
        let f = f3();
        assert_eq!(p(&[1, 1]).divrem(&Poly::zero(), &f), Err(Error::DivisionByZero));
    }

    #[test]
    fn divrem_reconstructs() {
        let f = FiniteField::fq(4).unwrap();
        let a = p(&[1, 2, 3, 1, 2, 3]);
        let d = p(&[3, 0, 2]);
        let (quot, rem) = a.divrem(&d, &f).unwrap();
        assert_eq!(quot.mul(&d, &f).add(&rem, &f), a);
        assert!(rem.degree().unwrap_or(0) < 2);
    }

    #[test]
    fn monic_enumeration_counts() {
        let f = f3();
        let all = enumerate_monics(&f, 1);
        assert_eq!(all, vec![p(&[1]), p(&[0, 1]), p(&[1, 1]), p(&[2, 1])]);
        for d in 0..4 {
            assert_eq!(monics_of_degree(&f, d).len(), 3usize.pow(d as u32));
        }
        let f2 = FiniteField::fq(2).unwrap();
        assert_eq!(
            monics_of_degree(&f2, 2),
            vec![p(&[0, 0, 1]), p(&[1, 0, 1]), p(&[0, 1, 1]), p(&[1, 1, 1])]
        );
    }

    #[test]
    fn qth_power_is_frobenius() {
        let f = f3();
        let a = p(&[1, 1]);
        assert_eq!(a.qth_power(&f), a.pow(3, &f));
        assert_eq!(a.qth_power(&f), p(&[1, 0, 0, 1]));
    }
}
