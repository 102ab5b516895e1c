//! Solution counts `N(w, lambda)`: brute force and the delta-method expansion
//! `N = (|g| Q^2)^{-1} sum_{r monic, |r| <= Q^} sum_{|c| < Q^ |g| / R^}
//! |gr|^{-4} S_{g,r}(c) I_{g,r}(c)`.

use std::collections::HashMap;

use num_bigint::BigInt;
use rayon::prelude::*;

use super::expsum::{exp_sum_direct_grid, CGrid, ClosedSum};
use super::osc::{osc_integral_numeric_grid, OscClosed};
use super::SystemParams;
use crate::budget;
use crate::cyclo::{qpow, Cyclotomic};
use crate::error::Result;
use crate::ff::{iter_below, iter_monic_upto, Poly};
use crate::ExactCyclo;

/// `#{x in O^4 : F(x) = f, x = lambda mod g, |x| <= q^{floor(deg f / 2)}}`,
/// by enumerating `x = g t + lambda` with `|t| < q^R` and matching the two
/// halves of the form.
pub fn count_solutions(p: &SystemParams, budget: u128) -> Result<u64> {
    let f = p.field();
    let len = p.r_exp.max(0) as usize;
    let side = (f.q() as u128).pow(len as u32);
    budget::check("solution enumeration", 2 * side * side, budget)?;
    let eta = p.form.eta();
    let half = |i: usize| -> Vec<Poly> {
        let mut out = Vec::with_capacity((side * side) as usize);
        for t1 in iter_below(f, len) {
            let x1 = &(&p.g * &t1) + &p.lambda[i];
            let v1 = &eta[i] * &(&x1 * &x1);
            for t2 in iter_below(f, len) {
                let x2 = &(&p.g * &t2) + &p.lambda[i + 1];
                out.push(&v1 + &(&eta[i + 1] * &(&x2 * &x2)));
            }
        }
        out
    };
    let mut hist: HashMap<Poly, u64> = HashMap::new();
    for v in half(0) {
        *hist.entry(v).or_default() += 1;
    }
    Ok(half(2)
        .iter()
        .map(|v| hist.get(&(&p.f - v)).copied().unwrap_or(0))
        .sum())
}

/// How `S` and `I` are evaluated inside [`delta_reconstruct`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SumMethod {
    /// Closed forms for both factors (`I(0)` by cell summation).
    Closed,
    /// Direct character sums and cell summation; works for instances that
    /// violate the closed-form hypotheses.
    Direct,
}

#[derive(Copy, Clone, Debug)]
pub struct DeltaOptions {
    pub method: SumMethod,
    pub budget: u128,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        DeltaOptions {
            method: SumMethod::Closed,
            budget: budget::default_budget(),
        }
    }
}

/// Per-`r` contributions `sum_c |gr|^{-4} S I`, split by `c = 0` and `c != 0`,
/// before the `(|g| Q^2)^{-1}` normalization.
#[derive(Clone, Debug)]
pub struct DeltaTerms {
    pub r: Poly,
    pub zero: ExactCyclo,
    pub nonzero: ExactCyclo,
    /// Number of `c` with `S != 0`.
    pub support: usize,
}

/// Frequencies needed by the expansion: `deg c_i <= deg g`, since `I`
/// vanishes once `|c| >= Q^ |g| / R^ = q^{deg g + 1}`.
pub fn delta_grid(p: &SystemParams) -> CGrid {
    CGrid::new(p.field(), p.deg_g())
}

/// Evaluates `|gr|^{-4} S_{g,r}(c) I_{g,r}(c)` for every `c` of the delta
/// grid and hands each nonzero term to `visit(c_index, term)`.
pub fn delta_terms_for_r(
    p: &SystemParams,
    r: &Poly,
    opts: &DeltaOptions,
    mut visit: impl FnMut(usize, ExactCyclo),
) -> Result<()> {
    let f = p.field();
    let q = f.q();
    let grid = delta_grid(p);
    let dgr = (p.deg_g() + r.deg().unwrap()) as i64;
    let w = qpow(q, -4 * dgr);
    match opts.method {
        SumMethod::Closed => {
            let s = ClosedSum::new(p, r)?;
            let osc = OscClosed::with_numeric_zero(p, r, opts.budget)?;
            for idx in 0..grid.len() {
                let c = grid.get(idx);
                let sv = s.eval(&c)?;
                if sv.is_zero() {
                    continue;
                }
                let (_, iv) = osc.eval(&c)?;
                if iv.is_zero() {
                    continue;
                }
                visit(idx, (&sv.to_exact() * &iv).scale(&w));
            }
        }
        SumMethod::Direct => {
            let svals = exp_sum_direct_grid(p, r, &grid, opts.budget)?;
            if svals.iter().all(|s| s.is_zero()) {
                return Ok(());
            }
            let ivals = osc_integral_numeric_grid(p, r, &grid, opts.budget)?;
            for (idx, sv) in svals.iter().enumerate() {
                if sv.is_zero() {
                    continue;
                }
                let iv = ivals.value(idx);
                if iv.is_zero() {
                    continue;
                }
                visit(idx, (&sv.to_exact() * &iv).scale(&w));
            }
        }
    }
    Ok(())
}

/// The moduli of the expansion: monic `r` with `deg r <= Q`.
pub fn delta_moduli(p: &SystemParams) -> Vec<Poly> {
    if p.q_exp < 0 {
        return Vec::new();
    }
    iter_monic_upto(p.field(), p.q_exp as usize).collect()
}

/// Per-`r` contributions of the delta expansion, in the order of
/// [`delta_moduli`].
pub fn delta_terms(p: &SystemParams, opts: &DeltaOptions) -> Result<Vec<DeltaTerms>> {
    let pp = p.field().p();
    delta_moduli(p)
        .into_par_iter()
        .map(|r| {
            let mut zero = Cyclotomic::zero(pp);
            let mut nonzero = Cyclotomic::zero(pp);
            let mut support = 0;
            delta_terms_for_r(p, &r, opts, |idx, v| {
                support += 1;
                if idx == 0 {
                    zero += &v;
                } else {
                    nonzero += &v;
                }
            })?;
            Ok(DeltaTerms {
                r,
                zero,
                nonzero,
                support,
            })
        })
        .collect()
}

/// `N(w, lambda)` from the delta-method expansion.
pub fn delta_reconstruct(p: &SystemParams, opts: &DeltaOptions) -> Result<ExactCyclo> {
    let pp = p.field().p();
    let mut total = Cyclotomic::zero(pp);
    for t in delta_terms(p, opts)? {
        total += &t.zero;
        total += &t.nonzero;
    }
    let norm = qpow(p.q(), -(p.deg_g() as i64 + 2 * p.q_exp));
    Ok(total.scale(&norm))
}

/// The integer represented by `x`, if it is one.
pub fn as_integer(x: &ExactCyclo) -> Option<BigInt> {
    let v = x.as_scalar()?;
    v.is_integer().then(|| v.to_integer())
}

/// `|x - n| <= tol` for the nearest integer `n`, on the complex embedding.
pub fn near_integer(x: &ExactCyclo, tol: f64) -> Option<i64> {
    let z = x.to_complex();
    let n = z.re.round();
    ((z.re - n).abs() <= tol && z.im.abs() <= tol).then_some(n as i64)
}
