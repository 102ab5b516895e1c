use std::sync::Arc;

use ffcircle::characters::*;
use ffcircle::cyclo::Cyclotomic;
use ffcircle::ff::{iter_irreducible, Fq, FqElem, Laurent, Poly};
use proptest::prelude::*;

fn field(i: usize) -> Arc<Fq> {
    Fq::new([3u64, 5, 7, 9][i]).unwrap()
}

fn poly_from(f: &Arc<Fq>, coeffs: &[u32]) -> Poly {
    Poly::from_coeffs(f, coeffs.iter().map(|&c| f.elem(c % f.q())).collect())
}

fn monic_from(f: &Arc<Fq>, coeffs: &[u32]) -> Poly {
    let mut c: Vec<FqElem> = coeffs.iter().map(|&x| f.elem(x % f.q())).collect();
    c.push(FqElem::ONE);
    Poly::from_coeffs(f, c)
}

fn laurent_from(f: &Arc<Fq>, coeffs: &[u32], low: i64) -> Laurent {
    Laurent::from_poly(&poly_from(f, coeffs)).shift(low)
}

fn coeffs(max: usize) -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..1000, 0..=max)
}

proptest! {
    #[test]
    fn e_q_is_additive(fi in 0usize..4, a in 0u32..81, b in 0u32..81) {
        let f = field(fi);
        let (a, b) = (f.elem(a % f.q()), f.elem(b % f.q()));
        prop_assert_eq!(e_q(&f, f.add(a, b)), e_q(&f, a).mul(e_q(&f, b)));
    }

    #[test]
    fn psi_is_additive(fi in 0usize..4, a in coeffs(6), b in coeffs(6), la in -5i64..2, lb in -5i64..2) {
        let f = field(fi);
        let (x, y) = (laurent_from(&f, &a, la), laurent_from(&f, &b, lb));
        prop_assert_eq!(psi(&x.add(&y)).unwrap(), psi(&x).unwrap().mul(psi(&y).unwrap()));
    }

    #[test]
    fn psi_kills_polynomials(fi in 0usize..4, a in coeffs(6)) {
        let f = field(fi);
        prop_assert_eq!(psi(&Laurent::from_poly(&poly_from(&f, &a))).unwrap(), RootOfUnity::one(f.p()));
    }

    #[test]
    fn psi_mod_matches_the_expansion(fi in 0usize..4, x in coeffs(7), m in coeffs(4)) {
        let f = field(fi);
        let (x, m) = (poly_from(&f, &x), monic_from(&f, &m));
        let pm = PsiMod::new(&m, 8).unwrap();
        let direct = psi(&Laurent::from_fraction(&x, &m, -4).unwrap()).unwrap();
        prop_assert_eq!(pm.eval(&x), direct);
    }

    #[test]
    fn psi_r_is_periodic_and_additive(fi in 0usize..3, x in coeffs(5), y in coeffs(5), r in coeffs(3)) {
        let f = field(fi);
        let (x, y, r) = (poly_from(&f, &x), poly_from(&f, &y), monic_from(&f, &r));
        prop_assert_eq!(psi_r(&(&x + &(&r * &y)), &r).unwrap(), psi_r(&x, &r).unwrap());
        prop_assert_eq!(psi_r(&(&x + &y), &r).unwrap(), psi_r(&x, &r).unwrap().mul(psi_r(&y, &r).unwrap()));
    }

    #[test]
    fn kubota_sum_closed_form(fi in 0usize..2, g in coeffs(4), low in -6i64..1, n in 0u32..3) {
        let f = field(fi);
        let gamma = laurent_from(&f, &g, low);
        let closed = Cyclotomic::from_scalar(f.p(), kubota_sum_closed(&gamma, n).unwrap());
        prop_assert_eq!(kubota_sum(&gamma, n).unwrap(), closed);
    }
}

#[test]
fn gauss_sums_at_primes_have_norm_sqrt_w() {
    for q in [3u64, 5, 7] {
        let f = Fq::new(q).unwrap();
        for d in 1..=2 {
            for w in iter_irreducible(&f, d) {
                let tau = gauss_tau(&w).unwrap().to_complex();
                let want = (q as f64).powi(d as i32);
                assert!((tau.norm_sqr() - want).abs() < 1e-9, "q={q} w={w}");
            }
        }
    }
}

#[test]
fn dissection_counts_and_volume() {
    // sum over |r| <= q^Q of phi(r) balls of radius q^{-Q} |r|^{-1}
    let f = Fq::new(3).unwrap();
    for big_q in 1..=3u32 {
        let balls = dissect(&f, big_q).unwrap();
        let vol: f64 = balls.iter().map(|b| 3f64.powi(b.radius_exp() as i32)).sum();
        assert!((vol - 1.0).abs() < 1e-12, "Q={big_q}");
    }
}
