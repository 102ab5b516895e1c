use std::sync::Arc;

use ffcircle::ff::arith::{mul_mod, pow_mod};
use ffcircle::ff::*;
use proptest::prelude::*;

fn field(i: usize) -> Arc<Fq> {
    Fq::new([3u64, 5, 7, 9][i]).unwrap()
}

fn poly_from(f: &Arc<Fq>, coeffs: &[u32]) -> Poly {
    let q = f.q();
    Poly::from_coeffs(f, coeffs.iter().map(|&c| f.elem(c % q)).collect())
}

fn monic_from(f: &Arc<Fq>, coeffs: &[u32]) -> Poly {
    let mut c: Vec<FqElem> = coeffs.iter().map(|&x| f.elem(x % f.q())).collect();
    c.push(FqElem::ONE);
    Poly::from_coeffs(f, c)
}

fn coeffs(max: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..1000, 0..=max)
}

proptest! {
    #[test]
    fn ring_axioms(fi in 0usize..4, a in coeffs(6), b in coeffs(6), c in coeffs(6)) {
        let f = field(fi);
        let (a, b, c) = (poly_from(&f, &a), poly_from(&f, &b), poly_from(&f, &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        prop_assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn division_with_remainder(fi in 0usize..4, a in coeffs(8), d in coeffs(4)) {
        let f = field(fi);
        let (a, d) = (poly_from(&f, &a), monic_from(&f, &d));
        let (q, r) = a.divrem(&d).unwrap();
        prop_assert_eq!(&(&q * &d) + &r, a);
        prop_assert!(r.deg().is_none_or(|k| k < d.deg().unwrap()));
    }

    #[test]
    fn bezout(fi in 0usize..4, a in coeffs(6), b in coeffs(6)) {
        let f = field(fi);
        let (a, b) = (poly_from(&f, &a), poly_from(&f, &b));
        prop_assume!(!(a.is_zero() && b.is_zero()));
        let (d, u, v) = ext_gcd(&a, &b).unwrap();
        prop_assert_eq!(&(&u * &a) + &(&v * &b), d.clone());
        prop_assert!(d.is_monic() && d.divides(&a) && d.divides(&b));
        prop_assert_eq!(d, gcd_monic(&a, &b).unwrap());
    }

    #[test]
    fn inverses_mod_r(fi in 0usize..4, a in coeffs(6), r in coeffs(4)) {
        let f = field(fi);
        let (a, r) = (poly_from(&f, &a), monic_from(&f, &r));
        prop_assume!(!r.is_constant());
        match inv_mod(&a, &r) {
            Ok(x) => prop_assert!(mul_mod(&a, &x, &r).unwrap().is_one()),
            Err(_) => prop_assert!(!gcd_monic(&a, &r).unwrap().is_one()),
        }
    }

    #[test]
    fn crt_solves_both_congruences(fi in 0usize..3, a1 in coeffs(4), a2 in coeffs(4), m1 in coeffs(3), m2 in coeffs(3)) {
        let f = field(fi);
        let (m1, m2) = (monic_from(&f, &m1), monic_from(&f, &m2));
        let (a1, a2) = (poly_from(&f, &a1), poly_from(&f, &a2));
        match crt(&a1, &m1, &a2, &m2).unwrap() {
            Some((x, l)) => {
                prop_assert_eq!(x.rem(&m1).unwrap(), a1.rem(&m1).unwrap());
                prop_assert_eq!(x.rem(&m2).unwrap(), a2.rem(&m2).unwrap());
                prop_assert!(m1.divides(&l) && m2.divides(&l));
            }
            None => prop_assert!(!gcd_monic(&m1, &m2).unwrap().divides(&(&a2 - &a1))),
        }
    }

    #[test]
    fn factorization_multiplies_back(fi in 0usize..3, a in coeffs(6)) {
        let f = field(fi);
        let a = poly_from(&f, &a);
        prop_assume!(!a.is_zero());
        let (c, facs) = factor(&a).unwrap();
        let mut prod = Poly::constant(&f, c);
        for (w, e) in &facs {
            prop_assert!(is_irreducible(w) && w.is_monic());
            prod = &prod * &w.pow(*e as u64);
        }
        prop_assert_eq!(prod, a);
    }

    #[test]
    fn jacobi_is_multiplicative(fi in 0usize..3, a in coeffs(4), b in coeffs(4), r in coeffs(3)) {
        let f = field(fi);
        let (a, b, r) = (poly_from(&f, &a), poly_from(&f, &b), monic_from(&f, &r));
        let ab = &a * &b;
        prop_assert_eq!(jacobi(&ab, &r).unwrap(), jacobi(&a, &r).unwrap() * jacobi(&b, &r).unwrap());
    }

    #[test]
    fn jacobi_at_a_prime_is_euler(fi in 0usize..3, a in coeffs(4), w in 0usize..40) {
        let f = field(fi);
        let primes: Vec<Poly> = (1..=2).flat_map(|d| iter_irreducible(&f, d).collect::<Vec<_>>()).collect();
        let w = &primes[w % primes.len()];
        let a = poly_from(&f, &a);
        let e = (ResidueRing::new(w).unwrap().size() - 1) / 2;
        let x = pow_mod(&a, e as u128, w).unwrap();
        let want = if x.is_zero() { 0 } else if x.is_one() { 1 } else { -1 };
        prop_assert_eq!(jacobi(&a, w).unwrap(), want);
    }

    #[test]
    fn display_parses_back(fi in 0usize..4, a in coeffs(7)) {
        let f = field(fi);
        let a = poly_from(&f, &a);
        prop_assert_eq!(Poly::parse(&f, &a.to_string()).unwrap(), a.clone());
        prop_assert_eq!(Poly::parse(&f, &a.to_machine()).unwrap(), a);
    }

    #[test]
    fn laurent_inverse(fi in 0usize..4, a in coeffs(5), shift in -4i64..4) {
        let f = field(fi);
        let a = poly_from(&f, &a);
        prop_assume!(!a.is_zero());
        let x = Laurent::from_poly(&a).shift(shift);
        let one = x.mul(&x.inv_prec(-40).unwrap());
        for d in -15..=8 {
            let want = if d == 0 { FqElem::ONE } else { FqElem::ZERO };
            prop_assert_eq!(one.coeff(d).unwrap(), want);
        }
    }
}
