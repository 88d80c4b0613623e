//! F_q-linear polynomials under composition, Drinfeld modules, Moore
//! determinants and the explicit Weil pairing.
//!
//! A [`SkewPoly`] with coefficients `(c_0, ..., c_n)` stands for
//! `c_0 X + c_1 X^q + ... + c_n X^(q^n)`. Composition satisfies the twist
//! law `X^q ∘ cX = c^q X^q`.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::exactfield::{Field, FiniteField, Poly, RatFun, RatFunField, Ring};

#[derive(Clone, PartialEq, Debug)]
pub struct SkewPoly<E> {
    coeffs: Vec<E>,
}

impl<E: Clone + PartialEq + Debug> SkewPoly<E> {
    pub fn new<R: Ring<Elem = E>>(ring: &R, mut coeffs: Vec<E>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        SkewPoly { coeffs }
    }

    pub fn zero() -> Self {
        SkewPoly { coeffs: Vec::new() }
    }

    /// The polynomial `X`.
    pub fn identity<R: Ring<Elem = E>>(ring: &R) -> Self {
        SkewPoly { coeffs: vec![ring.one()] }
    }

    /// The polynomial `cX`.
    pub fn scalar<R: Ring<Elem = E>>(ring: &R, c: E) -> Self {
        Self::new(ring, vec![c])
    }

    pub fn coeffs(&self) -> &[E] {
        &self.coeffs
    }

    pub fn coeff<R: Ring<Elem = E>>(&self, ring: &R, i: usize) -> E {
        self.coeffs.get(i).cloned().unwrap_or_else(|| ring.zero())
    }

    pub fn tau_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&E> {
        self.coeffs.last()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| ring.add(&self.coeff(ring, i), &other.coeff(ring, i))).collect();
        Self::new(ring, coeffs)
    }

    pub fn sub<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| ring.sub(&self.coeff(ring, i), &other.coeff(ring, i))).collect();
        Self::new(ring, coeffs)
    }

    /// `cX ∘ self`, i.e. every coefficient multiplied by `c`.
    pub fn scale<R: Ring<Elem = E>>(&self, c: &E, ring: &R) -> Self {
        Self::new(ring, self.coeffs.iter().map(|a| ring.mul(c, a)).collect())
    }

    /// `self ∘ other`: `(f ∘ g)_k = sum_{i+j=k} f_i g_j^(q^i)`.
    pub fn compose<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        let mut twisted = other.coeffs.clone();
        for (i, fi) in self.coeffs.iter().enumerate() {
            if i > 0 {
                twisted = twisted.iter().map(|g| ring.frobenius(g)).collect();
            }
            if ring.is_zero(fi) {
                continue;
            }
            for (j, gj) in twisted.iter().enumerate() {
                out[i + j] = ring.add(&out[i + j], &ring.mul(fi, gj));
            }
        }
        Self::new(ring, out)
    }

    /// `sum c_i x^(q^i)`.
    pub fn eval<R: Ring<Elem = E>>(&self, ring: &R, x: &E) -> E {
        let mut acc = ring.zero();
        let mut power = x.clone();
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = ring.frobenius(&power);
            }
            if !ring.is_zero(c) {
                acc = ring.add(&acc, &ring.mul(c, &power));
            }
        }
        acc
    }

    pub fn map<F, E2>(&self, f: F) -> SkewPoly<E2>
    where
        F: Fn(&E) -> E2,
    {
        SkewPoly { coeffs: self.coeffs.iter().map(f).collect() }
    }

    /// Report rendering `T*X+g*X^q+D*X^q2`, `X^qk` standing for `X^(q^k)`.
    pub fn render<R: Ring<Elem = E>>(&self, ring: &R) -> String {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if ring.is_zero(c) {
                continue;
            }
            let x = match i {
                0 => "X".to_string(),
                1 => "X^q".to_string(),
                _ => format!("X^q{i}"),
            };
            let s = ring.render(c);
            terms.push(if s == "1" {
                x
            } else if s.contains('+') || s.contains('-') || s.contains('/') {
                format!("({s})*{x}")
            } else {
                format!("{s}*{x}")
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

/// Parses the rendering of [`SkewPoly::render`]; coefficients go through
/// `parse_coeff`.
pub fn parse_skew<R, P>(ring: &R, text: &str, parse_coeff: P) -> Result<SkewPoly<R::Elem>>
where
    R: Ring,
    P: Fn(&str) -> Result<R::Elem>,
{
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let mut negative = false;
    for ch in text.chars().filter(|c| !c.is_whitespace()) {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        if depth == 0 && (ch == '+' || ch == '-') && !current.ends_with('^') {
            if !current.is_empty() {
                chunks.push((negative, std::mem::take(&mut current)));
            }
            negative = ch == '-';
            continue;
        }
        current.push(ch);
    }
    if !current.is_empty() {
        chunks.push((negative, current));
    }
    let mut coeffs: Vec<R::Elem> = Vec::new();
    for (negative, chunk) in chunks {
        let pos = chunk.rfind('X').ok_or_else(|| Error::Parse(format!("term {chunk:?} has no X")))?;
        let tau = match &chunk[pos + 1..] {
            "" => 0,
            "^q" => 1,
            s if s.starts_with("^q") => s[2..].parse().map_err(|_| Error::Parse(format!("bad power {s}")))?,
            s => return Err(Error::Parse(format!("bad power {s}"))),
        };
        let prefix = chunk[..pos].strip_suffix('*').unwrap_or(&chunk[..pos]);
        let mut c = if prefix.is_empty() { ring.one() } else { parse_coeff(prefix)? };
        if negative {
            c = ring.neg(&c);
        }
        if coeffs.len() <= tau {
            coeffs.resize(tau + 1, ring.zero());
        }
        coeffs[tau] = ring.add(&coeffs[tau], &c);
    }
    Ok(SkewPoly::new(ring, coeffs))
}

/// A Drinfeld module, given by the image of `T`.
#[derive(Clone, Debug)]
pub struct DrinfeldMod<R: Ring> {
    ring: R,
    phi_t: SkewPoly<R::Elem>,
}

impl<R: Ring> DrinfeldMod<R> {
    pub fn new(ring: &R, phi_t: SkewPoly<R::Elem>) -> Result<Self> {
        match phi_t.tau_degree() {
            Some(r) if r >= 1 => Ok(DrinfeldMod { ring: ring.clone(), phi_t }),
            _ => Err(Error::InvalidArgument("a Drinfeld module needs rank at least 1".into())),
        }
    }

    /// `rho_T = tX + X^q` for the given image `t` of `T`.
    pub fn carlitz(ring: &R, t: R::Elem) -> Self {
        let phi_t = SkewPoly::new(ring, vec![t, ring.one()]);
        DrinfeldMod { ring: ring.clone(), phi_t }
    }

    /// `phi_T = gamma_T X + g X^q + delta X^(q^2)`, `delta != 0`.
    pub fn rank2(ring: &R, gamma_t: R::Elem, g: R::Elem, delta: R::Elem) -> Result<Self> {
        if ring.is_zero(&delta) {
            return Err(Error::InvalidArgument("rank-2 module needs a nonzero leading coefficient".into()));
        }
        Self::new(ring, SkewPoly::new(ring, vec![gamma_t, g, delta]))
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn rank(&self) -> usize {
        self.phi_t.tau_degree().unwrap_or(0)
    }

    pub fn phi_t(&self) -> &SkewPoly<R::Elem> {
        &self.phi_t
    }

    /// The A-field structure value gamma(T).
    pub fn gamma_t(&self) -> R::Elem {
        self.phi_t.coeff(&self.ring, 0)
    }

    pub fn g(&self) -> R::Elem {
        self.phi_t.coeff(&self.ring, 1)
    }

    pub fn delta(&self) -> R::Elem {
        self.phi_t.coeff(&self.ring, 2)
    }

    /// gamma(a) = a(gamma(T)).
    pub fn gamma_of(&self, a: &Poly) -> R::Elem {
        let t = self.gamma_t();
        a.coeffs().iter().rev().fold(self.ring.zero(), |acc, &c| {
            self.ring.add(&self.ring.mul(&acc, &t), &self.ring.from_fq(c))
        })
    }

    /// `phi_a` by Horner's rule in `T`.
    pub fn phi_of(&self, a: &Poly) -> SkewPoly<R::Elem> {
        let ring = &self.ring;
        let mut acc = SkewPoly::zero();
        for &c in a.coeffs().iter().rev() {
            acc = self.phi_t.compose(&acc, ring).add(&SkewPoly::scalar(ring, ring.from_fq(c)), ring);
        }
        acc
    }

    pub fn eval_t(&self, x: &R::Elem) -> R::Elem {
        self.phi_t.eval(&self.ring, x)
    }

    /// `phi_a(x)`, Horner in `T` on the value: no skew polynomial is formed.
    pub fn eval(&self, a: &Poly, x: &R::Elem) -> R::Elem {
        let ring = &self.ring;
        let mut acc = ring.zero();
        for &c in a.coeffs().iter().rev() {
            acc = ring.add(&self.eval_t(&acc), &ring.mul(&ring.from_fq(c), x));
        }
        acc
    }

    /// `[x, phi_T(x), ..., phi_{T^(n-1)}(x)]`.
    pub fn t_power_images(&self, x: &R::Elem, n: usize) -> Vec<R::Elem> {
        let mut out = Vec::with_capacity(n);
        let mut cur = x.clone();
        for k in 0..n {
            if k > 0 {
                cur = self.eval_t(&cur);
            }
            out.push(cur.clone());
        }
        out
    }

    pub fn map<R2: Ring, F: Fn(&R::Elem) -> R2::Elem>(&self, ring: &R2, f: F) -> Result<DrinfeldMod<R2>> {
        DrinfeldMod::new(ring, SkewPoly::new(ring, self.phi_t.coeffs().iter().map(f).collect()))
    }

    pub fn render(&self) -> String {
        format!("T -> {}", self.phi_t.render(&self.ring))
    }
}

impl<F: Field> DrinfeldMod<F> {
    /// `c ∘ phi ∘ c^-1`: the coefficient of `X^(q^i)` picks up `c^(1 - q^i)`.
    pub fn conjugate(&self, c: &F::Elem) -> Result<Self> {
        let ring = &self.ring;
        let c_inv = ring.inv(c).ok_or(Error::DivisionByZero)?;
        let left = SkewPoly::scalar(ring, c.clone());
        let right = SkewPoly::scalar(ring, c_inv);
        Self::new(ring, left.compose(&self.phi_t, ring).compose(&right, ring))
    }

    /// The determinant module `psi_T = gamma(T) X - Delta X^q` of a rank-2 module.
    pub fn determinant(&self) -> Result<Self> {
        if self.rank() != 2 {
            return Err(Error::InvalidArgument(format!("determinant needs rank 2, got {}", self.rank())));
        }
        let ring = &self.ring;
        Self::new(ring, SkewPoly::new(ring, vec![self.gamma_t(), ring.neg(&self.delta())]))
    }
}

/// The Carlitz module over `F_q(T)`.
pub fn carlitz_over_k(fq: &std::sync::Arc<FiniteField>) -> DrinfeldMod<RatFunField> {
    let k = RatFunField::new(fq, "T");
    let t = k.var();
    DrinfeldMod::carlitz(&k, t)
}

/// `f_a(X) = X^(q^deg a) rho_a(1/X)` as `(exponent, coefficient)` pairs in
/// increasing exponent; the constant term is the leading coefficient of `a`.
pub fn f_polynomial(fq: &std::sync::Arc<FiniteField>, a: &Poly) -> Result<Vec<(u64, Poly)>> {
    let d = a.degree().ok_or(Error::InvalidArgument("f_a needs a nonzero a".into()))?;
    let rho = carlitz_over_k(fq);
    let rho_a = rho.phi_of(a);
    let q = fq.order() as u64;
    let top = q.pow(d as u32);
    let mut out: Vec<(u64, Poly)> = rho_a
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.num().is_zero())
        .map(|(i, c)| (top - q.pow(i as u32), ratfun_to_poly(c)))
        .collect();
    out.sort_by_key(|(e, _)| *e);
    Ok(out)
}

fn ratfun_to_poly(c: &RatFun) -> Poly {
    debug_assert!(c.is_polynomial());
    c.num().clone()
}

/// The Moore determinant `det(x_i^(q^(j-1)))`, by expansion over column
/// subsets (no division, so it works over any ring with a q-power map).
pub fn moore_det<R: Ring>(ring: &R, xs: &[R::Elem]) -> R::Elem {
    let n = xs.len();
    if n == 0 {
        return ring.one();
    }
    let rows: Vec<Vec<R::Elem>> = xs
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(n);
            let mut cur = x.clone();
            for j in 0..n {
                if j > 0 {
                    cur = ring.frobenius(&cur);
                }
                row.push(cur.clone());
            }
            row
        })
        .collect();
    let mut dp: Vec<Option<R::Elem>> = vec![None; 1 << n];
    dp[0] = Some(ring.one());
    for mask in 0usize..(1 << n) {
        let Some(val) = dp[mask].clone() else { continue };
        let r = mask.count_ones() as usize;
        if r == n {
            continue;
        }
        for c in 0..n {
            if mask & (1 << c) != 0 {
                continue;
            }
            let inversions = (mask >> (c + 1)).count_ones();
            let mut term = ring.mul(&val, &rows[r][c]);
            if inversions % 2 == 1 {
                term = ring.neg(&term);
            }
            let slot = &mut dp[mask | (1 << c)];
            *slot = Some(match slot.take() {
                Some(prev) => ring.add(&prev, &term),
                None => term,
            });
        }
    }
    dp[(1 << n) - 1].clone().unwrap_or_else(|| ring.zero())
}

/// The Weil pairing
/// `w_a(x, y) = sum_{i=0}^{n-1} sum_{j=0}^{n-i-1} a_{i+j+1} M(phi_{T^j}(x), phi_{T^i}(y))`
/// for `a = a_0 + ... + a_n T^n`; constant `a` gives the empty sum.
pub fn weil_pairing<R: Ring>(phi: &DrinfeldMod<R>, a: &Poly, x: &R::Elem, y: &R::Elem) -> R::Elem {
    let ring = phi.ring();
    let n = a.degree().unwrap_or(0);
    if n == 0 {
        return ring.zero();
    }
    let xs = phi.t_power_images(x, n);
    let ys = phi.t_power_images(y, n);
    let mut acc = ring.zero();
    for (i, yi) in ys.iter().enumerate() {
        for (j, xj) in xs.iter().enumerate().take(n - i) {
            let c = a.coeff(i + j + 1);
            if c.is_zero() {
                continue;
            }
            let m = moore_det(ring, &[xj.clone(), yi.clone()]);
            acc = ring.add(&acc, &ring.mul(&ring.from_fq(c), &m));
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exactfield::{make_extension, Gf, GfRing};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k3() -> (Arc<FiniteField>, RatFunField) {
        let fq = FiniteField::fq(3).unwrap();
        let k = RatFunField::new(&fq, "T");
        (fq, k)
    }

    #[test]
    fn carlitz_square() {
        let (fq, k) = k3();
        let rho = carlitz_over_k(&fq);
        let sq = rho.phi_t().compose(rho.phi_t(), &k);
        let expected = parse_skew(&k, "T^2*X+(T+T^3)*X^q+X^q2", |s| k.parse(s)).unwrap();
        assert_eq!(sq, expected);
        assert_eq!(sq.render(&k), "T^2*X+(T^3+T)*X^q+X^q2");
        let t2 = Poly::monomial(Gf(1), 2);
        assert_eq!(rho.phi_of(&t2), expected);
    }

    #[test]
    fn twist_law_and_identity() {
        let (_, k) = k3();
        let frob = SkewPoly::new(&k, vec![k.zero(), k.one()]);
        let c = k.parse("T+1").unwrap();
        let lhs = frob.compose(&SkewPoly::scalar(&k, c.clone()), &k);
        assert_eq!(lhs, SkewPoly::new(&k, vec![k.zero(), k.frobenius(&c)]));
        let f = parse_skew(&k, "T*X+2*X^q+(T^2+1)*X^q2", |s| k.parse(s)).unwrap();
        let id = SkewPoly::identity(&k);
        assert_eq!(f.compose(&id, &k), f);
        assert_eq!(id.compose(&f, &k), f);
    }

    #[test]
    fn phi_of_unit_and_rank2_leading() {
        let (_, k) = k3();
        let g = k.parse("T^2+1").unwrap();
        let delta = k.parse("2*T+1").unwrap();
        let phi = DrinfeldMod::rank2(&k, k.var(), g, delta.clone()).unwrap();
        assert_eq!(phi.phi_of(&Poly::one()), SkewPoly::identity(&k));
        let t2 = phi.phi_of(&Poly::monomial(Gf(1), 2));
        assert_eq!(t2.tau_degree(), Some(4));
        assert_eq!(t2.leading().unwrap(), &k.pow(&delta, 1 + 9));
        assert_eq!(t2.coeff(&k, 0), k.parse("T^2").unwrap());
    }

    #[test]
    fn f_polynomials() {
        let (fq, k) = k3();
        assert_eq!(f_polynomial(&fq, &Poly::one()).unwrap(), vec![(0, Poly::one())]);
        let ft = f_polynomial(&fq, &Poly::var()).unwrap();
        assert_eq!(ft, vec![(0, Poly::one()), (2, Poly::var())]);
        let ft2 = f_polynomial(&fq, &Poly::monomial(Gf(1), 2)).unwrap();
        let t_plus_t3 = k.parse("T+T^3").unwrap().num().clone();
        assert_eq!(ft2, vec![(0, Poly::one()), (6, t_plus_t3), (8, Poly::monomial(Gf(1), 2))]);
    }

    #[test]
    fn f_polynomial_reverses_to_carlitz() {
        for q in [2u64, 3, 4] {
            let fq = FiniteField::fq(q).unwrap();
            let rho = carlitz_over_k(&fq);
            let k = rho.ring().clone();
            for a in crate::exactfield::enumerate_monics(&fq, 2) {
                let d = a.degree().unwrap() as u32;
                let top = q.pow(d);
                let f = f_polynomial(&fq, &a).unwrap();
                let mut coeffs = vec![k.zero(); d as usize + 1];
                for (e, c) in f {
                    let i = (0..=d).find(|&i| top - q.pow(i) == e).unwrap();
                    coeffs[i as usize] = k.poly(&c);
                }
                assert_eq!(SkewPoly::new(&k, coeffs), rho.phi_of(&a));
            }
        }
    }

    #[test]
    fn determinant_modules() {
        let (_, k) = k3();
        let minus_one = k.from_int(-1);
        let phi = DrinfeldMod::rank2(&k, k.var(), k.parse("T").unwrap(), minus_one).unwrap();
        let psi = phi.determinant().unwrap();
        assert_eq!(psi.phi_t(), carlitz_over_k(k.fq()).phi_t());

        let h = k.parse("T^2+2").unwrap();
        let delta = k.neg(&k.pow(&h, 2));
        let phi = DrinfeldMod::rank2(&k, k.var(), k.one(), delta).unwrap();
        let psi = phi.determinant().unwrap();
        assert_eq!(psi.phi_t().coeff(&k, 1), k.pow(&h, 2));

        let c = k.parse("T+1").unwrap();
        let conj = phi.conjugate(&c).unwrap();
        let expected = k.mul(&phi.delta(), &k.pow_signed(&c, 1 - 9).unwrap());
        assert_eq!(conj.delta(), expected);
        assert_eq!(conj.g(), k.mul(&phi.g(), &k.pow_signed(&c, 1 - 3).unwrap()));
        assert!(DrinfeldMod::carlitz(&k, k.var()).determinant().is_err());
    }

    fn moore_product_formula(f: &GfRing, xs: &[Gf]) -> Gf {
        let fq = f.base().clone();
        let mut acc = Gf(1);
        for i in 0..xs.len() {
            let count = (fq.order() as usize).pow(i as u32);
            for idx in 0..count {
                let mut r = idx;
                let mut s = xs[i];
                for xj in &xs[..i] {
                    let c = Gf((r % fq.order() as usize) as u32);
                    r /= fq.order() as usize;
                    s = f.add(&s, &f.mul(&c, xj));
                }
                acc = f.mul(&acc, &s);
            }
        }
        acc
    }

    #[test]
    fn moore_small_cases() {
        let f9 = GfRing::new(&make_extension(3, 2).unwrap());
        let x = f9.field().generator();
        let y = f9.add(&x, &Gf(1));
        assert_eq!(moore_det(&f9, &[x]), x);
        let expected = f9.sub(&f9.mul(&x, &f9.frobenius(&y)), &f9.mul(&f9.frobenius(&x), &y));
        assert_eq!(moore_det(&f9, &[x, y]), expected);
        assert_eq!(moore_det(&f9, &[x, f9.mul(&Gf(2), &x)]), Gf(0));
    }

    #[test]
    fn moore_matches_product_formula() {
        let f81 = GfRing::new(&make_extension(3, 4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in 1..=3 {
            for _ in 0..100 {
                let xs: Vec<Gf> = (0..n).map(|_| Gf(rng.gen_range(0..81))).collect();
                assert_eq!(moore_det(&f81, &xs), moore_product_formula(&f81, &xs));
            }
        }
    }

    fn fq_independent(f: &GfRing, xs: &[Gf]) -> bool {
        let q = f.base().order() as usize;
        let n = xs.len();
        (1..q.pow(n as u32)).all(|idx| {
            let mut r = idx;
            let mut s = Gf(0);
            for x in xs {
                s = f.add(&s, &f.mul(&Gf((r % q) as u32), x));
                r /= q;
            }
            s != Gf(0)
        })
    }

    #[test]
    fn moore_vanishes_iff_dependent() {
        let f9 = GfRing::new(&make_extension(3, 2).unwrap());
        for x in f9.field().elements() {
            for y in f9.field().elements() {
                let m = moore_det(&f9, &[x, y]);
                assert_eq!(m != Gf(0), fq_independent(&f9, &[x, y]));
            }
        }
        let f27 = GfRing::new(&make_extension(3, 3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let xs: Vec<Gf> = (0..3).map(|_| Gf(rng.gen_range(0..27))).collect();
            assert_eq!(moore_det(&f27, &xs) != Gf(0), fq_independent(&f27, &xs));
        }
    }

    fn random_rank2(f: &GfRing, rng: &mut ChaCha8Rng) -> DrinfeldMod<GfRing> {
        let order = f.field().order();
        let gamma = Gf(rng.gen_range(1..order));
        let g = Gf(rng.gen_range(0..order));
        let delta = Gf(rng.gen_range(1..order));
        DrinfeldMod::rank2(f, gamma, g, delta).unwrap()
    }

    #[test]
    fn weil_pairing_shapes() {
        let f = GfRing::new(&make_extension(3, 4).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let phi = random_rank2(&f, &mut rng);
        let t = Poly::var();
        let t2 = Poly::monomial(Gf(1), 2);
        for _ in 0..50 {
            let x = Gf(rng.gen_range(0..81));
            let y = Gf(rng.gen_range(0..81));
            assert_eq!(weil_pairing(&phi, &t, &x, &y), moore_det(&f, &[x, y]));
            let expected = f.add(
                &moore_det(&f, &[phi.eval_t(&x), y]),
                &moore_det(&f, &[x, phi.eval_t(&y)]),
            );
            assert_eq!(weil_pairing(&phi, &t2, &x, &y), expected);
            let a = Poly::from_coeffs(vec![Gf(1), Gf(2), Gf(1), Gf(1)]);
            assert_eq!(weil_pairing(&phi, &a, &x, &x), Gf(0));
            assert_eq!(weil_pairing(&phi, &Poly::one(), &x, &y), Gf(0));
            let x2 = Gf(rng.gen_range(0..81));
            let lhs = weil_pairing(&phi, &a, &f.add(&x, &x2), &y);
            let rhs = f.add(&weil_pairing(&phi, &a, &x, &y), &weil_pairing(&phi, &a, &x2, &y));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn module_homomorphism() {
        let f = GfRing::new(&make_extension(3, 2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let fq = f.base().clone();
        let monics = crate::exactfield::enumerate_monics(&fq, 2);
        for _ in 0..10 {
            let phi = random_rank2(&f, &mut rng);
            for a in &monics {
                for b in &monics {
                    let ab = a.mul(b, &fq);
                    let pa = phi.phi_of(a);
                    let pb = phi.phi_of(b);
                    assert_eq!(phi.phi_of(&ab), pa.compose(&pb, &f));
                    assert_eq!(pa.compose(&pb, &f), pb.compose(&pa, &f));
                    assert_eq!(phi.phi_of(&ab).tau_degree(), Some(2 * ab.degree().unwrap()));
                    let x = Gf(rng.gen_range(0..9));
                    assert_eq!(phi.eval(&ab, &x), pa.eval(&f, &pb.eval(&f, &x)));
                }
            }
        }
    }

    #[test]
    fn skew_render_parse_roundtrip() {
        let (_, k) = k3();
        let text = "T*X+(T^2+2)*X^q+2*X^q2";
        let f = parse_skew(&k, text, |s| k.parse(s)).unwrap();
        assert_eq!(f.render(&k), text);
        assert_eq!(parse_skew(&k, &f.render(&k), |s| k.parse(s)).unwrap(), f);
        assert!(parse_skew(&k, "T*Y", |s| k.parse(s)).is_err());
    }
}
