//! The reduced sums over `r` left after inserting the closed forms at an
//! irreducible `g`:
//! `sum_{|r| = q^T, (g,r) = 1, delta | r} psi(-rbar (beta(c)(f - F(lambda)) + <lambda, c>) / g^2)
//!  Kl_r(gbar f, gbar^3 F*(c) / 4) [Kl_inf(f F*(c) / (4 r^2 g^4))]`.

use rayon::prelude::*;

use super::{beta_of_c, CVector, SystemParams};
use crate::budget;
use crate::characters::PsiMod;
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::ff::{gcd_monic, inv_mod, is_irreducible, iter_monic, Laurent, Poly};
use crate::kloosterman::{kl_finite, kl_infinity_closed};
use crate::ExactCyclo;

/// Whether the archimedean factor `Kl_inf` is included.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelVariant {
    Finite,
    WithInfinity,
}

impl std::fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            KernelVariant::Finite => "finite",
            KernelVariant::WithInfinity => "with_infinity",
        })
    }
}

impl std::str::FromStr for KernelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finite" => Ok(KernelVariant::Finite),
            "with_infinity" | "infinity" => Ok(KernelVariant::WithInfinity),
            _ => Err(Error::Invalid(format!("unknown variant {s:?}"))),
        }
    }
}

/// One term of [`tls_kernel`]; `r` must be monic and coprime to `g`.
pub fn tls_kernel_term(
    p: &SystemParams,
    c: &CVector,
    r: &Poly,
    variant: KernelVariant,
) -> Result<ExactCyclo> {
    let f = p.field();
    let pp = f.p();
    let zero = Cyclotomic::zero(pp);
    let Some(beta) = beta_of_c(c, p)? else {
        return Ok(zero);
    };
    let g2 = &p.g * &p.g;
    let rbar = inv_mod(r, &g2)?;
    let lc = (0..4).fold(Poly::zero(f), |acc, i| &acc + &(&p.lambda[i] * &c.0[i]));
    let arg = -&(&rbar * &(&(&beta * &(&p.g * &p.k)) + &lc));
    let psi = PsiMod::new(&g2, arg.deg().unwrap_or(0))?;
    let phase = psi.exponent(&arg) as i64;
    let t1 = p.form.t_minus_one();
    let n = p.form.dual_numerator(&c.0);
    let fstar = if r.is_constant() {
        Poly::zero(f)
    } else if t1.divides(&n) {
        n.div_exact(&t1)?.rem(r)?
    } else {
        match inv_mod(&t1, r) {
            Ok(inv) => (&n * &inv).rem(r)?,
            Err(_) => return Ok(zero),
        }
    };
    let kl = if r.is_constant() {
        Cyclotomic::one(pp)
    } else {
        let gbar = inv_mod(&p.g, r)?;
        let four_inv = f.inv(f.from_int(4))?;
        let m = (&gbar * &p.f).rem(r)?;
        let nn = (&(&(&gbar * &gbar) * &gbar) * &fstar)
            .scale(four_inv)
            .rem(r)?;
        kl_finite(r, &m, &nn)?
    };
    let term = kl.rotate(phase).to_exact();
    match variant {
        KernelVariant::Finite => Ok(term),
        KernelVariant::WithInfinity => {
            if n.is_zero() {
                return Ok(zero);
            }
            let num = (&p.f * &n).scale(f.inv(f.from_int(4))?);
            let g4 = &g2 * &g2;
            let den = &(&(r * r) * &g4) * &t1;
            let alpha = Laurent::from_fraction(&num, &den, crate::ff::laurent::DEFAULT_LO)?;
            Ok(&term * &kl_infinity_closed(&alpha)?)
        }
    }
}

/// The kernel sum over monic `r` of degree `t_deg` with `(g, r) = 1` and
/// `delta | r`. `g` must be irreducible.
pub fn tls_kernel(
    p: &SystemParams,
    c: &CVector,
    t_deg: usize,
    variant: KernelVariant,
    delta: &Poly,
    budget: u128,
) -> Result<ExactCyclo> {
    if !is_irreducible(&p.g) {
        return Err(Error::Reducible(p.g.to_string()));
    }
    let f = p.field();
    let q = f.q() as u128;
    budget::check(
        "kernel terms",
        q.pow(t_deg as u32) * q.pow(t_deg as u32),
        budget,
    )?;
    let rs: Vec<Poly> = iter_monic(f, t_deg)
        .filter(|r| delta.divides(r) && gcd_monic(r, &p.g).map(|d| d.is_one()).unwrap_or(false))
        .collect();
    let terms: Vec<ExactCyclo> = rs
        .par_iter()
        .map(|r| tls_kernel_term(p, c, r, variant))
        .collect::<Result<_>>()?;
    let mut acc = Cyclotomic::zero(f.p());
    for t in &terms {
        acc += t;
    }
    Ok(acc)
}
