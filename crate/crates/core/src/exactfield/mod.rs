//! Exact arithmetic for every coefficient domain: F_q, A = F_q[T],
//! K = F_q(T), extensions F_{q^n}, and degree-one Kummer level fields.
//!
//! The completions K_inf and C_inf are not modelled; every identity the crate
//! checks is first rewritten over K, a level field, or a finite field.

pub mod gf;
pub mod kummer;
pub mod poly;
pub mod ratfun;
pub mod ring;
pub mod text;

pub use gf::{FiniteField, Gf, GfRing};
pub use kummer::KummerField;
pub use poly::{enumerate_monics, monics_of_degree, polys_of_degree, Poly, PolyA};
pub use ratfun::{RatFun, RatFunField};
pub use ring::{Field, Ring};

use std::sync::Arc;

use crate::error::Result;

/// F_{q^n} over F_q with its deterministic modulus.
pub fn make_extension(q: u64, n: usize) -> Result<Arc<FiniteField>> {
    let fq = FiniteField::fq(q)?;
    FiniteField::extension(&fq, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Irreducible iff no monic factor of degree 1..=n/2, by trial division.
    fn trial_division_irreducible(fq: &Arc<FiniteField>, m: &Poly) -> bool {
        let n = m.degree().unwrap();
        (1..=n / 2).all(|d| monics_of_degree(fq, d).iter().all(|f| !m.rem(f, fq).unwrap().is_zero()))
    }

    #[test]
    fn extension_moduli_are_irreducible() {
        for (q, n_max) in [(2u64, 8usize), (3, 6), (4, 4), (5, 4)] {
            let fq = FiniteField::fq(q).unwrap();
            for n in 1..=n_max {
                let ext = FiniteField::extension(&fq, n).unwrap();
                let m = Poly::from_coeffs(ext.modulus().to_vec());
                assert_eq!(m.degree(), Some(n));
                assert!(trial_division_irreducible(&fq, &m), "q={q} n={n}");
                // Frobenius fixes exactly F_q
                let fixed = ext.elements().filter(|&a| ext.frobenius_q(a) == a).count();
                assert_eq!(fixed as u64, q);
            }
        }
    }

    #[test]
    fn documented_moduli() {
        let f9 = make_extension(3, 2).unwrap();
        assert_eq!(Poly::from_coeffs(f9.modulus().to_vec()).render(f9.subfield().unwrap(), "x"), "x^2+1");
        let f3 = make_extension(3, 1).unwrap();
        assert_eq!(Poly::from_coeffs(f3.modulus().to_vec()).render(f3.subfield().unwrap(), "x"), "x");
        let f4 = make_extension(2, 2).unwrap();
        assert_eq!(Poly::from_coeffs(f4.modulus().to_vec()).render(f4.subfield().unwrap(), "x"), "x^2+x+1");
    }

    fn check_frobenius<R: Ring>(ring: &R, sample: impl Fn(&mut ChaCha8Rng) -> R::Elem) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x = sample(&mut rng);
            let y = sample(&mut rng);
            let s = ring.add(&x, &y);
            assert_eq!(ring.frobenius(&s), ring.add(&ring.frobenius(&x), &ring.frobenius(&y)));
            let p = ring.mul(&x, &y);
            assert_eq!(ring.frobenius(&p), ring.mul(&ring.frobenius(&x), &ring.frobenius(&y)));
        }
    }

    fn random_poly(fq: &FiniteField, rng: &mut ChaCha8Rng, max_deg: usize) -> Poly {
        let d = rng.gen_range(0..=max_deg);
        Poly::from_coeffs((0..=d).map(|_| Gf(rng.gen_range(0..fq.order()))).collect())
    }

    #[test]
    fn frobenius_is_a_ring_endomorphism() {
        for q in [2u64, 3, 4, 5] {
            let ext = make_extension(q, 3).unwrap();
            let order = ext.order();
            check_frobenius(&GfRing::new(&ext), |rng| Gf(rng.gen_range(0..order)));

            let fq = FiniteField::fq(q).unwrap();
            let k = RatFunField::new(&fq, "T");
            check_frobenius(&k, |rng| {
                let num = random_poly(&fq, rng, 4);
                let mut den = random_poly(&fq, rng, 3);
                if den.is_zero() {
                    den = Poly::one();
                }
                k.fraction(&num, &den).unwrap()
            });

            let level = KummerField::new(&fq, &Poly::var()).unwrap();
            check_frobenius(&level, |rng| {
                let x = k.fraction(&random_poly(&fq, rng, 3), &Poly::one()).unwrap();
                let l = level.pow(&level.lambda(), rng.gen_range(0..4));
                level.add(&level.embed(&x), &l)
            });
        }
    }

    #[test]
    fn kummer_embedding_is_injective_on_samples() {
        let fq = FiniteField::fq(3).unwrap();
        let k = RatFunField::new(&fq, "T");
        let level = KummerField::new(&fq, &Poly::var()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = std::collections::HashMap::new();
        for _ in 0..400 {
            let num = random_poly(&fq, &mut rng, 3);
            let mut den = random_poly(&fq, &mut rng, 2);
            if den.is_zero() {
                den = Poly::one();
            }
            let x = k.fraction(&num, &den).unwrap();
            let image = level.embed(&x);
            if let Some(prev) = seen.insert(image, x.clone()) {
                assert_eq!(prev, x);
            }
        }
    }
}
