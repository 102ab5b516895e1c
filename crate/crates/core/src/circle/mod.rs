//! The circle-method pipeline for the Morgenstern form
//! `F = x1^2 - nu x2^2 - (t-1) x3^2 + nu (t-1) x4^2`.
//!
//! - [`expsum`]: `S_{g,r}(c)` by direct summation and in closed form.
//! - [`osc`]: `I_{g,r}(c)` by exact cell summation and in closed form.
//! - [`count`]: brute-force solution counts and the delta-method identity.
//! - [`density`]: local densities and the truncated singular series.
//! - [`error_terms`]: the `E1`/`E2` split of the nonzero-`c` terms.
//! - [`tls`]: the reduced sums feeding the twisted Linnik-Selberg probe.

pub mod count;
pub mod density;
pub mod error_terms;
pub mod expsum;
pub mod osc;
pub mod tls;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ff::{gcd_monic, inv_mod, iter_below, Fq, FqElem, Poly};

pub use count::{
    count_solutions, delta_grid, delta_reconstruct, near_integer, DeltaOptions, DeltaTerms,
    SumMethod,
};
pub use density::{
    local_densities, local_density, singular_series_product, singular_series_sum, LocalDensity,
};
pub use error_terms::{error_terms, ErrorTerms, PerC};
pub use expsum::{exp_sum_closed, exp_sum_direct, exp_sum_direct_grid, CGrid, ClosedSum};
pub use osc::{
    osc_branch, osc_integral_closed, osc_integral_numeric, osc_integral_numeric_grid,
    osc_integral_zero, OscBranch, OscClosed, OscGrid,
};
pub use tls::{tls_kernel, tls_kernel_term, KernelVariant};

/// The Morgenstern quadratic form for a non-square `nu`.
#[derive(Clone, Debug)]
pub struct MorgensternForm {
    field: Arc<Fq>,
    nu: FqElem,
    eta: [Poly; 4],
}

impl MorgensternForm {
    pub fn new(field: &Arc<Fq>, nu: FqElem) -> Result<MorgensternForm> {
        if nu.is_zero() || field.is_square(nu) {
            return Err(Error::Invalid(format!(
                "nu = {} must be a non-square",
                field.format_elem(nu)
            )));
        }
        let t1 = Poly::linear(field, FqElem::ONE);
        let eta = [
            Poly::one(field),
            Poly::constant(field, field.neg(nu)),
            -&t1,
            t1.scale(nu),
        ];
        Ok(MorgensternForm {
            field: field.clone(),
            nu,
            eta,
        })
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    pub fn nu(&self) -> FqElem {
        self.nu
    }

    /// Diagonal coefficients `(1, -nu, -(t-1), nu (t-1))`.
    pub fn eta(&self) -> &[Poly; 4] {
        &self.eta
    }

    /// `t - 1`.
    pub fn t_minus_one(&self) -> Poly {
        Poly::linear(&self.field, FqElem::ONE)
    }

    /// `Delta = prod eta_i = nu^2 (t-1)^2`.
    pub fn discriminant(&self) -> Poly {
        self.eta
            .iter()
            .fold(Poly::one(&self.field), |acc, e| &acc * e)
    }

    pub fn eval(&self, x: &[Poly; 4]) -> Poly {
        let mut s = Poly::zero(&self.field);
        for (e, xi) in self.eta.iter().zip(x) {
            s = &s + &(e * &(xi * xi));
        }
        s
    }

    /// `<x, A y> = sum eta_i x_i y_i`.
    pub fn bilinear(&self, x: &[Poly; 4], y: &[Poly; 4]) -> Poly {
        let mut s = Poly::zero(&self.field);
        for i in 0..4 {
            s = &s + &(&self.eta[i] * &(&x[i] * &y[i]));
        }
        s
    }

    /// Numerator `N` with `F*(c) = N / (t-1)`:
    /// `N = (t-1)(c1^2 - c2^2/nu) - c3^2 + c4^2/nu`.
    pub fn dual_numerator(&self, c: &[Poly; 4]) -> Poly {
        let f = &self.field;
        let ninv = f.inv(self.nu).unwrap();
        let sq = |p: &Poly| p * p;
        let even = &sq(&c[0]) - &sq(&c[1]).scale(ninv);
        let odd = &sq(&c[3]).scale(ninv) - &sq(&c[2]);
        &(&self.t_minus_one() * &even) + &odd
    }
}

/// A strong-approximation instance `(F, f, g, lambda)` with derived `k`, `R`, `Q`.
#[derive(Clone, Debug)]
pub struct SystemParams {
    pub form: MorgensternForm,
    pub f: Poly,
    pub g: Poly,
    pub lambda: [Poly; 4],
    /// `k = (f - F(lambda)) / g`.
    pub k: Poly,
    /// `R = floor(deg f / 2) - deg g + 1`.
    pub r_exp: i64,
    /// `Q = R + 1`.
    pub q_exp: i64,
    /// Whether `(f Delta, g) = 1` and some `lambda_i` is a unit mod `g`.
    pub admissible: bool,
}

impl SystemParams {
    /// Validated constructor: `g` monic, `deg lambda_i < deg g`, `g | f - F(lambda)`,
    /// `(f Delta, g) = 1` and at least one `lambda_i` coprime to `g`.
    pub fn new(form: MorgensternForm, f: Poly, g: Poly, lambda: [Poly; 4]) -> Result<SystemParams> {
        let p = Self::new_relaxed(form, f, g, lambda)?;
        if !p.admissible {
            return Err(Error::Invalid(format!(
                "instance f={}, g={} needs (f Delta, g) = 1 and a lambda_i coprime to g",
                p.f, p.g
            )));
        }
        Ok(p)
    }

    /// Only requires `g` monic, `deg lambda_i < deg g` and `g | f - F(lambda)`.
    /// Used for locally obstructed instances; closed forms refuse such input.
    pub fn new_relaxed(
        form: MorgensternForm,
        f: Poly,
        g: Poly,
        lambda: [Poly; 4],
    ) -> Result<SystemParams> {
        if !g.is_monic() {
            return Err(Error::NotMonic(g.to_string()));
        }
        let df = f
            .deg()
            .ok_or_else(|| Error::Invalid("f must be nonzero".into()))? as i64;
        let dg = g.deg().unwrap();
        for l in &lambda {
            if l.deg().is_some_and(|d| d >= dg) {
                return Err(Error::Invalid(format!(
                    "deg lambda_i must be < deg g, got {l}"
                )));
            }
        }
        let diff = &f - &form.eval(&lambda);
        if !g.divides(&diff) {
            return Err(Error::Invalid(format!(
                "g = {g} does not divide f - F(lambda)"
            )));
        }
        let k = diff.div_exact(&g)?;
        let fd = &f * &form.discriminant();
        let admissible = gcd_monic(&fd, &g)?.is_one()
            && lambda
                .iter()
                .any(|l| gcd_monic(l, &g).map(|d| d.is_one()).unwrap_or(false));
        let r_exp = df.div_euclid(2) - dg as i64 + 1;
        Ok(SystemParams {
            form,
            f,
            g,
            lambda,
            k,
            r_exp,
            q_exp: r_exp + 1,
            admissible,
        })
    }

    /// The instance with `f = F(lambda) + g k`, validated as in [`Self::new`].
    pub fn from_lambda(
        form: MorgensternForm,
        g: Poly,
        lambda: [Poly; 4],
        k: &Poly,
    ) -> Result<SystemParams> {
        let f = &form.eval(&lambda) + &(&g * k);
        SystemParams::new(form, f, g, lambda)
    }

    pub fn field(&self) -> &Arc<Fq> {
        self.form.field()
    }

    pub fn q(&self) -> u32 {
        self.field().q()
    }

    pub fn deg_g(&self) -> usize {
        self.g.deg().unwrap()
    }

    pub fn deg_f(&self) -> usize {
        self.f.deg().unwrap()
    }

    /// Fails unless the instance satisfies the closed-form hypotheses.
    pub fn require_admissible(&self) -> Result<()> {
        if self.admissible {
            Ok(())
        } else {
            Err(Error::Invalid(format!(
                "closed forms need (f Delta, g) = 1 and a unit lambda_i (f={}, g={})",
                self.f, self.g
            )))
        }
    }
}

impl fmt::Display for SystemParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "q={} nu={} f={} g={} lambda=({}, {}, {}, {})",
            self.q(),
            self.field().format_elem(self.form.nu()),
            self.f,
            self.g,
            self.lambda[0],
            self.lambda[1],
            self.lambda[2],
            self.lambda[3]
        )
    }
}

/// A frequency vector `c`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CVector(pub [Poly; 4]);

impl CVector {
    pub fn zero(field: &Arc<Fq>) -> CVector {
        CVector(std::array::from_fn(|_| Poly::zero(field)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    /// `deg |c| = max deg c_i`, `None` for `c = 0`.
    pub fn deg(&self) -> Option<usize> {
        self.0.iter().filter_map(|c| c.deg()).max()
    }

    /// `log_q kappa = deg |c| - deg g`, `None` when `c = 0` (kappa = 0).
    pub fn kappa_exp(&self, p: &SystemParams) -> Option<i64> {
        self.deg().map(|d| d as i64 - p.deg_g() as i64)
    }

    /// `max(|c3|,|c4|) > max(|c1|,|c2|)`, comparing degrees with `deg 0 = -inf`.
    pub fn odd_dominates(&self) -> bool {
        let d = |i: usize| self.0[i].deg_i();
        d(2).max(d(3)) > d(0).max(d(1))
    }

    /// `pi_c`: 0 if the odd coordinates dominate and `deg f` is even, else 1.
    pub fn pi(&self, p: &SystemParams) -> u32 {
        if self.odd_dominates() && p.deg_f().is_multiple_of(2) {
            0
        } else {
            1
        }
    }
}

impl fmt::Display for CVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.0[0], self.0[1], self.0[2], self.0[3]
        )
    }
}

/// `beta(c) mod g` with `c = 2 beta A lambda mod g` in every coordinate, or
/// `None`. Solved from a coordinate where `2 eta_i lambda_i` is a unit mod
/// `g` and verified on the others; falls back to a search otherwise.
pub fn beta_of_c(c: &CVector, p: &SystemParams) -> Result<Option<Poly>> {
    let f = p.field();
    let g = &p.g;
    let two = f.from_int(2);
    let coef: Vec<Poly> = (0..4)
        .map(|i| (&p.form.eta()[i] * &p.lambda[i]).scale(two))
        .collect();
    let check = |beta: &Poly| -> Result<bool> {
        for i in 0..4 {
            if !(&c.0[i] - &(beta * &coef[i])).rem(g)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    if g.is_constant() {
        return Ok(Some(Poly::zero(f)));
    }
    for i in 0..4 {
        if let Ok(inv) = inv_mod(&coef[i], g) {
            let beta = (&c.0[i] * &inv).rem(g)?;
            return Ok(check(&beta)?.then_some(beta));
        }
    }
    for beta in iter_below(f, p.deg_g()) {
        if check(&beta)? {
            return Ok(Some(beta));
        }
    }
    Ok(None)
}

/// Adds the cyclic convolution `a * b` (counts of `zeta_p^k`) into `acc`.
#[inline]
pub(crate) fn conv_add(acc: &mut [i64], a: &[i64], b: &[i64]) {
    let p = acc.len();
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let k = if i + j >= p { i + j - p } else { i + j };
            acc[k] += x * y;
        }
    }
}

/// Whether a count vector represents zero in `Z[zeta_p]` (all counts equal).
#[inline]
pub(crate) fn counts_vanish(v: &[i64]) -> bool {
    v.iter().all(|&x| x == v[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn f3() -> Arc<Fq> {
        Fq::new(3).unwrap()
    }

    #[test]
    fn form_basics() {
        let f = f3();
        let form = MorgensternForm::new(&f, f.from_int(-1)).unwrap();
        assert!(MorgensternForm::new(&f, f.from_int(1)).is_err());
        let t = Poly::t(&f);
        let one = Poly::one(&f);
        let z = Poly::zero(&f);
        // F(1, 0, 1, 1) = 1 - 2(t-1) = 1 + t - 1 = t at nu = -1
        let x = [one.clone(), z.clone(), one.clone(), one.clone()];
        assert_eq!(form.eval(&x), t);
        let tm1 = form.t_minus_one();
        assert_eq!(form.discriminant(), &tm1 * &tm1);
        // F*(c) (t-1) for c = (1, 1, 1, 1): (t-1)(1 + 1) - 1 - 1
        let c = [one.clone(), one.clone(), one.clone(), one];
        assert_eq!(form.dual_numerator(&c), Poly::parse(&f, "2t-4").unwrap());
    }

    #[test]
    fn beta_examples() {
        let f = f3();
        let form = MorgensternForm::new(&f, f.from_int(-1)).unwrap();
        let g = Poly::parse(&f, "t^2+1").unwrap();
        let lam = [
            Poly::parse(&f, "t").unwrap(),
            Poly::zero(&f),
            Poly::one(&f),
            Poly::zero(&f),
        ];
        let k = Poly::parse(&f, "t+1").unwrap();
        let fpoly = &form.eval(&lam) + &(&g * &k);
        let p = SystemParams::new(form.clone(), fpoly, g.clone(), lam.clone()).unwrap();
        assert_eq!(
            beta_of_c(&CVector::zero(&f), &p).unwrap(),
            Some(Poly::zero(&f))
        );
        let two_al: [Poly; 4] = std::array::from_fn(|i| {
            (&form.eta()[i] * &lam[i])
                .scale(f.from_int(2))
                .rem(&g)
                .unwrap()
        });
        assert_eq!(
            beta_of_c(&CVector(two_al.clone()), &p).unwrap(),
            Some(Poly::one(&f))
        );
        let u = Poly::parse(&f, "2t+1").unwrap();
        let c = CVector(std::array::from_fn(|i| (&two_al[i] * &u).rem(&g).unwrap()));
        assert_eq!(beta_of_c(&c, &p).unwrap(), Some(u));
        let mut bad = c.clone();
        bad.0[1] = &bad.0[1] + &Poly::one(&f);
        assert_eq!(beta_of_c(&bad, &p).unwrap(), None);
    }
}
