use ffcircle::characters::psi_r;
use ffcircle::cyclo::Cyclotomic;
use ffcircle::ff::{gcd_monic, iter_monic};
use ffcircle::kloosterman::kl_finite;
use ffcircle::tlsweep::*;
use ffcircle::{Fq, Poly};

fn params(g: &str, delta: &str, alpha: &str, t: usize, variant: KernelVariant) -> TlsParams {
    let f = Fq::new(3).unwrap();
    let p = |s: &str| Poly::parse(&f, s).unwrap();
    TlsParams::new(
        p(g),
        p(delta),
        p(alpha),
        GFraction::new(p("1"), 0),
        GFraction::new(p("1"), 0),
        t,
        variant,
    )
    .unwrap()
}

#[test]
fn zero_length_sum_is_the_twist() {
    let f = Fq::new(3).unwrap();
    let p = params("t^2+1", "1", "t+1", 0, KernelVariant::Finite);
    let g2 = Poly::parse(&f, "t^4+2t^2+1").unwrap();
    let want = psi_r(&p.alpha, &g2).unwrap().to_cyclo().to_exact();
    let got = tls_sum(&p, u128::MAX).unwrap();
    assert_eq!(got, want);
    assert!((got.to_complex().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn divisor_longer_than_the_window_gives_zero() {
    let p = params("t", "t^3+t+1", "0", 2, KernelVariant::Finite);
    assert!(tls_sum(&p, u128::MAX).unwrap().is_zero());
}

#[test]
fn untwisted_quadratic_window_is_a_kloosterman_total() {
    let f = Fq::new(3).unwrap();
    let t = Poly::t(&f);
    let one = Poly::one(&f);
    let mut want = Cyclotomic::zero(3);
    let mut n = 0;
    for r in iter_monic(&f, 2).filter(|r| gcd_monic(r, &t).unwrap().is_one()) {
        want += &kl_finite(&r, &one, &one).unwrap();
        n += 1;
    }
    assert_eq!(n, 6);
    let p = params("t", "1", "0", 2, KernelVariant::Finite);
    assert_eq!(tls_sum(&p, u128::MAX).unwrap(), want.to_exact());
    let v = tls_evaluate(&p, Window::Exact, u128::MAX).unwrap();
    assert_eq!(v.n_terms, 6);
    assert!(v.value.to_complex().norm() <= v.abs_sum + 1e-9);
    assert!(v.abs_sum <= v.ceiling + 1e-9);
}

#[test]
fn identical_parameters_give_identical_values() {
    let p = params("t^2+1", "t+1", "2t", 3, KernelVariant::WithInfinity);
    let q = params("t^2+1", "t+1", "2t", 3, KernelVariant::WithInfinity);
    assert_eq!(p.hash(), q.hash());
    assert_eq!(
        tls_sum(&p, u128::MAX).unwrap(),
        tls_sum(&q, u128::MAX).unwrap()
    );
    assert_ne!(p.hash(), p.with_t(4).hash());
}

#[test]
fn sweep_checks_pass_and_csv_round_trips() {
    let mut cfg = SweepConfig::untwisted(3, "t");
    cfg.t_max = 4;
    let rep = sweep(&cfg).unwrap();
    assert!(rep.window_identity && rep.weil_ok && rep.reproducible && rep.slope_ok);
    let dir = tempfile::tempdir().unwrap();
    rep.write(dir.path()).unwrap();
    for w in [Window::Exact, Window::Cumulative] {
        let rows = read_csv(&dir.path().join(format!("{w}.csv"))).unwrap();
        assert_eq!(rows, rep.csv_rows(w));
    }
    // a second write appends without a second header
    rep.write(dir.path()).unwrap();
    let rows = read_csv(&dir.path().join("exact.csv")).unwrap();
    assert_eq!(rows.len(), 2 * rep.csv_rows(Window::Exact).len());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["revision"], ffcircle::REVISION);
}

#[test]
fn sweeps_need_three_points() {
    let mut cfg = SweepConfig::untwisted(3, "t");
    cfg.t_max = 1;
    assert!(sweep(&cfg).is_err());
}
