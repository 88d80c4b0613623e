use std::fmt;
use std::sync::Arc;

use super::gf::{FiniteField, Gf};

/// A commutative ring containing the constant field F_q, passed around as a
/// context object. Elements carry no back-pointer to their ring.
pub trait Ring: Clone + Send + Sync {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    /// The distinguished constant field F_q.
    fn base(&self) -> &Arc<FiniteField>;

    fn q(&self) -> u64 {
        self.base().order() as u64
    }

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Image of an element of F_q.
    fn from_fq(&self, c: Gf) -> Self::Elem;

    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_fq(self.base().from_int(n))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Equality of elements. Rings whose elements are not canonical override this.
    fn equal(&self, a: &Self::Elem, b: &Self::Elem) -> bool {
        a == b
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// The q-power map x -> x^q.
    fn frobenius(&self, a: &Self::Elem) -> Self::Elem {
        self.pow(a, self.q())
    }

    fn frobenius_iter(&self, a: &Self::Elem, times: usize) -> Self::Elem {
        let mut x = a.clone();
        for _ in 0..times {
            x = self.frobenius(&x);
        }
        x
    }

    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }

    fn product<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.one(), |acc, x| self.mul(&acc, x))
    }
}

pub trait Field: Ring {
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    /// a^e for any integer exponent; `None` when a = 0 and e < 0.
    fn pow_signed(&self, a: &Self::Elem, e: i64) -> Option<Self::Elem> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ai| self.pow(&ai, e.unsigned_abs()))
        }
    }
}
