//! Additive characters `e_q`, `psi`, `psi_r`, quadratic Gauss sums, the
//! stationary-phase factor `G(h)`, Kubota orthogonality sums and the
//! Farey-type dissection of the unit ball.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::cyclo::{qpow, Cyclotomic};
use crate::error::{Error, Result};
use crate::ff::{gcd_monic, iter_below, iter_monic_upto, Fq, FqElem, Laurent, Poly};

/// `exp(2 pi i k / n)` kept exactly.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootOfUnity {
    pub k: u32,
    pub n: u32,
}

impl RootOfUnity {
    pub fn one(n: u32) -> Self {
        RootOfUnity { k: 0, n }
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(
            1.0,
            2.0 * std::f64::consts::PI * self.k as f64 / self.n as f64,
        )
    }

    pub fn to_cyclo(self) -> Cyclotomic<i64> {
        Cyclotomic::zeta_pow(self.n, self.k as i64)
    }

    pub fn mul(self, other: Self) -> Self {
        assert_eq!(self.n, other.n);
        RootOfUnity {
            k: (self.k + other.k) % self.n,
            n: self.n,
        }
    }
}

/// `e_q(a) = exp(2 pi i tr(a) / p)`.
pub fn e_q(field: &Fq, a: FqElem) -> RootOfUnity {
    RootOfUnity {
        k: field.trace(a),
        n: field.p(),
    }
}

/// `psi(alpha) = e_q(a_{-1})`; needs the coefficient of `t^-1` to be known.
pub fn psi(alpha: &Laurent) -> Result<RootOfUnity> {
    Ok(e_q(alpha.field(), alpha.coeff(-1)?))
}

/// Evaluates `psi(x / M)` for polynomials `x` through the linear functional
/// `x -> [t^-1](x / M)`, precomputed from the expansion of `1/M`.
#[derive(Clone, Debug)]
pub struct PsiMod {
    field: Arc<Fq>,
    modulus: Poly,
    /// `weights[i] = [t^-1](t^i / M)`.
    weights: Vec<FqElem>,
}

impl PsiMod {
    /// Supports numerators of degree `<= max_deg` without reduction.
    pub fn new(modulus: &Poly, max_deg: usize) -> Result<PsiMod> {
        if modulus.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let field = modulus.field().clone();
        let d = modulus.deg().unwrap();
        let mut weights = vec![FqElem::ZERO; max_deg.max(d) + 1];
        if d > 0 {
            let n_terms = weights.len() - (d - 1);
            // 1/M = sum_j m_j t^{-d-j}; [t^-1](t^i / M) = m_{i-d+1}
            let inv = Laurent::from_poly(modulus).inv_prec(-(d as i64) - n_terms as i64)?;
            for i in d - 1..weights.len() {
                weights[i] = inv.coeff(-(d as i64) - (i + 1 - d) as i64)?;
            }
        }
        Ok(PsiMod {
            field,
            modulus: modulus.clone(),
            weights,
        })
    }

    pub fn modulus(&self) -> &Poly {
        &self.modulus
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    /// `[t^-1](x / M)` as an element of F_q.
    pub fn residue(&self, x: &Poly) -> FqElem {
        let f = &self.field;
        if x.coeffs().len() > self.weights.len() {
            return self.residue(&x.rem(&self.modulus).unwrap());
        }
        x.coeffs()
            .iter()
            .zip(&self.weights)
            .fold(FqElem::ZERO, |acc, (&c, &w)| f.add(acc, f.mul(c, w)))
    }

    /// Exponent `k` in `psi(x / M) = zeta_p^k`.
    pub fn exponent(&self, x: &Poly) -> u32 {
        self.field.trace(self.residue(x))
    }

    pub fn eval(&self, x: &Poly) -> RootOfUnity {
        RootOfUnity {
            k: self.exponent(x),
            n: self.field.p(),
        }
    }

    /// Weight vector, for callers that evaluate on raw coefficient slices.
    pub fn weights(&self) -> &[FqElem] {
        &self.weights
    }
}

/// `psi_r(x) = psi((x mod r) / r)`.
pub fn psi_r(x: &Poly, r: &Poly) -> Result<RootOfUnity> {
    let xr = x.rem(r)?;
    Ok(PsiMod::new(r, r.deg().unwrap_or(0))?.eval(&xr))
}

/// `psi_r(a / b)` for `b` coprime to `r`: `psi_r(a * b^{-1} mod r)`.
pub fn psi_r_frac(a: &Poly, b: &Poly, r: &Poly) -> Result<RootOfUnity> {
    let binv = crate::ff::inv_mod(b, r)?;
    psi_r(&(a * &binv), r)
}

/// Quadratic Gauss sum of F_q, `G(a) = sum_x e_q(a x^2)`.
pub fn fq_gauss_sum(field: &Fq, a: FqElem) -> Cyclotomic<i64> {
    let mut s = Cyclotomic::zero(field.p());
    for x in field.elements() {
        s.add_zeta(field.trace(field.mul(a, field.mul(x, x))), 1);
    }
    s
}

/// `tau_r = sum_{x mod r} psi_r(x^2)`, with `tau_1 = 1`.
pub fn gauss_tau(r: &Poly) -> Result<Cyclotomic<i64>> {
    let f = r.field();
    let d = r.deg().ok_or(Error::DivisionByZero)?;
    let pm = PsiMod::new(r, 2 * d)?;
    let mut s = Cyclotomic::zero(f.p());
    for x in iter_below(f, d) {
        s.add_zeta(pm.exponent(&(&x * &x)), 1);
    }
    Ok(s)
}

/// The stationary-phase factor
/// `G(h) = min(|h|^{-1/2}, 1)` for even `ord h`,
/// `|h|^{-1/2} eps_h` for odd `ord h >= 1`, and `1` otherwise,
/// where `eps_h = G(a_h)/|G(a_h)|`. Exactly,
/// `|h|^{-1/2} eps_h = q^{-(ord h + 1)/2} G(a_h)`.
pub fn gauss_factor(h: &Laurent) -> Result<Cyclotomic<BigRational>> {
    let f = h.field();
    let ord = h.ord()?.ok_or(Error::Invalid("G(h) needs h != 0".into()))?;
    let (p, q) = (f.p(), f.q());
    if ord.rem_euclid(2) == 0 {
        let e = if ord >= 0 { -ord / 2 } else { 0 };
        return Ok(Cyclotomic::from_scalar(p, qpow(q, e)));
    }
    if ord >= 1 {
        let g = fq_gauss_sum(f, h.lead()?).to_exact();
        return Ok(g.scale_qpow(q, -(ord + 1) / 2));
    }
    Ok(Cyclotomic::one(p))
}

/// Direct `sum_{|b| < q^N} psi(gamma b)`.
pub fn kubota_sum(gamma: &Laurent, n: u32) -> Result<Cyclotomic<i64>> {
    let f = gamma.field();
    // psi(gamma b) reads gamma down to degree -n
    gamma.coeff(-(n as i64))?;
    let mut s = Cyclotomic::zero(f.p());
    for b in iter_below(f, n as usize) {
        let prod = gamma.mul(&Laurent::from_poly(&b));
        s.add_zeta(psi(&prod)?.k, 1);
    }
    Ok(s)
}

/// Closed form of [`kubota_sum`]: `q^N` if `|((gamma))| < q^-N`, else 0.
pub fn kubota_sum_closed(gamma: &Laurent, n: u32) -> Result<i64> {
    let frac = gamma.frac_part();
    for d in -(n as i64)..0 {
        if !frac.coeff(d)?.is_zero() {
            return Ok(0);
        }
    }
    Ok((gamma.field().q() as i64).pow(n))
}

/// Every `alpha = sum_{depth <= i < top} a_i t^i` (exact), i.e. the centers of
/// the cells of `{|alpha| < q^top}` at resolution `q^depth`.
pub fn ball_cells(field: &Arc<Fq>, top: i64, depth: i64) -> impl Iterator<Item = Laurent> + '_ {
    let len = (top - depth).max(0) as usize;
    iter_below(field, len).map(move |p| Laurent::from_poly(&p).shift(depth))
}

/// `int_{|alpha| < q^top} phase(alpha) d alpha` as a Riemann sum at cell size
/// `q^depth`, for an integrand constant on such cells. `phase` returns the
/// exponent of `zeta_p`.
pub fn integrate_ball(
    field: &Arc<Fq>,
    top: i64,
    depth: i64,
    mut phase: impl FnMut(&Laurent) -> Result<Option<u32>>,
) -> Result<Cyclotomic<BigRational>> {
    let mut s = Cyclotomic::<i64>::zero(field.p());
    for a in ball_cells(field, top, depth) {
        if let Some(k) = phase(&a)? {
            s.add_zeta(k, 1);
        }
    }
    Ok(s.to_exact().scale_qpow(field.q(), depth))
}

/// `int_{|alpha| < q^Y} psi(alpha gamma) d alpha` by exact cell summation.
/// The integrand is constant on cells of size `q^{-1-ord gamma}`; agreement
/// one level deeper is checked.
pub fn kubota_integral(gamma: &Laurent, y: i64) -> Result<Cyclotomic<BigRational>> {
    let f = gamma.field();
    let depth = match gamma.ord()? {
        None => y - 1,
        Some(o) => (-1 - o).min(y),
    };
    let eval = |d: i64| integrate_ball(f, y, d, |a| Ok(Some(psi(&a.mul(gamma))?.k)));
    let v = eval(depth)?;
    if eval(depth - 1)? != v {
        return Err(Error::Convergence(format!(
            "kubota integral not stable at depth {depth}"
        )));
    }
    Ok(v)
}

/// Closed form of [`kubota_integral`]: `q^Y` if `|gamma| < q^-Y`, else 0.
pub fn kubota_integral_closed(gamma: &Laurent, y: i64) -> Result<BigRational> {
    let q = gamma.field().q();
    Ok(match gamma.ord()? {
        Some(o) if o >= -y => BigRational::from_integer(0.into()),
        _ => qpow(q, y),
    })
}

/// `int_T psi(f u^2) du` by exact cell summation. On cells of size `q^d` with
/// `d = min(0, -ord f)` the integrand is constant; agreement one level deeper
/// is checked.
pub fn quadratic_integral(f: &Laurent) -> Result<Cyclotomic<BigRational>> {
    let field = f.field();
    let ord = f
        .ord()?
        .ok_or(Error::Invalid("quadratic integral needs f != 0".into()))?;
    let depth = 0i64.min(-ord);
    let eval = |d: i64| integrate_ball(field, 0, d, |u| Ok(Some(psi(&f.mul(&u.mul(u)))?.k)));
    let v = eval(depth)?;
    if eval(depth - 1)? != v {
        return Err(Error::Convergence(format!(
            "quadratic integral not stable at depth {depth}"
        )));
    }
    Ok(v)
}

/// The ball `{alpha in T : |r alpha - a| < q^-Q}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DissectionBall {
    pub r: Poly,
    pub a: Poly,
    pub big_q: u32,
}

impl DissectionBall {
    /// Radius exponent: the ball is `|alpha - a/r| < q^{radius_exp}`.
    pub fn radius_exp(&self) -> i64 {
        -(self.big_q as i64) - self.r.deg().unwrap() as i64
    }

    pub fn contains(&self, alpha: &Laurent) -> Result<bool> {
        let x = Laurent::from_poly(&self.r)
            .mul(alpha)
            .sub(&Laurent::from_poly(&self.a));
        let bound = -(self.big_q as i64);
        Ok(match x.ord()? {
            None => true,
            Some(o) => o < bound,
        })
    }
}

/// All balls of the dissection of `T` at level `Q`: monic `r` with
/// `|r| <= q^Q` and `a` coprime to `r` with `|a| < |r|`.
pub fn dissect(field: &Arc<Fq>, big_q: u32) -> Result<Vec<DissectionBall>> {
    if big_q < 1 {
        return Err(Error::Invalid("dissection needs Q >= 1".into()));
    }
    let mut out = Vec::new();
    for r in iter_monic_upto(field, big_q as usize) {
        let d = r.deg().unwrap();
        for a in iter_below(field, d) {
            if gcd_monic(&a, &r)?.is_one() {
                out.push(DissectionBall {
                    r: r.clone(),
                    a,
                    big_q,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> Arc<Fq> {
        Fq::new(3).unwrap()
    }

    #[test]
    fn e_q_examples() {
        let f = f3();
        assert_eq!(e_q(&f, FqElem::ZERO).k, 0);
        assert_eq!(e_q(&f, FqElem::ONE), RootOfUnity { k: 1, n: 3 });
        let f9 = Fq::new(9).unwrap();
        assert_eq!(e_q(&f9, f9.elem(3)).k, 0);
    }

    #[test]
    fn psi_examples() {
        let f = f3();
        let poly = Laurent::from_poly(&Poly::from_ints(&f, &[1, 2, 1]));
        assert_eq!(psi(&poly).unwrap().k, 0);
        assert_eq!(psi(&Laurent::monomial(&f, FqElem::ONE, -1)).unwrap().k, 1);
        assert_eq!(psi(&Laurent::monomial(&f, FqElem::ONE, -2)).unwrap().k, 0);
    }

    #[test]
    fn psi_r_examples() {
        let f = f3();
        let t = Poly::t(&f);
        assert_eq!(psi_r(&t, &t).unwrap().k, 0);
        assert_eq!(psi_r(&Poly::one(&f), &t).unwrap().k, 1);
        let r = Poly::from_ints(&f, &[0, 0, 1]);
        assert_eq!(psi_r(&Poly::from_ints(&f, &[2, 1]), &r).unwrap().k, 1);
    }

    #[test]
    fn tau_small() {
        let f = f3();
        assert_eq!(gauss_tau(&Poly::one(&f)).unwrap(), Cyclotomic::one(3));
        let tau = gauss_tau(&Poly::t(&f)).unwrap().to_complex();
        assert!(tau.re.abs() < 1e-12 && (tau.im - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gauss_factor_examples() {
        let f = f3();
        let g = gauss_factor(&Laurent::monomial(&f, FqElem::ONE, 2)).unwrap();
        assert_eq!(g.as_scalar(), Some(BigRational::new(1.into(), 3.into())));
        let g = gauss_factor(&Laurent::monomial(&f, FqElem::ONE, -1)).unwrap();
        assert_eq!(g, Cyclotomic::one(3));
        let g = gauss_factor(&Laurent::monomial(&f, FqElem::ONE, 1))
            .unwrap()
            .to_complex();
        assert!(g.re.abs() < 1e-12 && (g.im - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn kubota_examples() {
        let f = f3();
        let g2 = Laurent::monomial(&f, FqElem::ONE, -2);
        assert_eq!(kubota_sum(&g2, 1).unwrap().as_scalar(), Some(3));
        let g1 = Laurent::monomial(&f, FqElem::ONE, -1);
        assert!(kubota_sum(&g1, 1).unwrap().is_zero());
        let t = Laurent::monomial(&f, FqElem::ONE, 1);
        assert!(kubota_integral(&t, 0).unwrap().is_zero());
        let z = Laurent::zero(&f);
        assert_eq!(
            kubota_integral(&z, 0).unwrap(),
            Cyclotomic::one(3).map(|&c: &i64| BigRational::from_integer(c.into()))
        );
    }

    #[test]
    fn quadratic_integral_is_gauss_factor() {
        for q in [3u64, 5] {
            let f = Fq::new(q).unwrap();
            for c in [FqElem::ONE, f.least_nonsquare()] {
                for j in -3..=3 {
                    let h = Laurent::monomial(&f, c, j);
                    assert_eq!(
                        quadratic_integral(&h).unwrap(),
                        gauss_factor(&h).unwrap(),
                        "q={q} j={j}"
                    );
                }
            }
        }
    }

    #[test]
    fn dissection_level_one() {
        let f = f3();
        let balls = dissect(&f, 1).unwrap();
        assert_eq!(balls.len(), 7);
    }
}
