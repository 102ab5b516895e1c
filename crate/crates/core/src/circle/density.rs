//! Local densities `sigma_w` and the truncated singular series.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use super::expsum::ClosedSum;
use super::{CVector, SystemParams};
use crate::budget;
use crate::cyclo::qpow;
use crate::error::{Error, Result};
use crate::ff::{
    is_irreducible, iter_below, iter_irreducible, iter_monic_upto, valuation, Fq, Poly,
};
use crate::ExactCyclo;

/// Normalized counts `#{x mod w^{k+v} : F(x) = f, x = lambda mod w^v} / |w|^{3k}`
/// for `k = 1..=k_max`, `v = v_w(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalDensity {
    pub prime: Poly,
    pub v: u32,
    pub values: Vec<BigRational>,
    /// Smallest `k` from which the computed terms are constant, if the last
    /// two terms agree.
    pub stable_from: Option<usize>,
}

impl LocalDensity {
    /// The last computed term.
    pub fn value(&self) -> &BigRational {
        self.values.last().expect("k_max >= 1")
    }
}

/// Histogram of `eta x^2 mod w^{k+v}` over `x = lambda + w^v y`, `y mod w^k`,
/// keyed by the base-`q` index of the residue.
fn coordinate_hist(
    eta: &Poly,
    lambda: &Poly,
    wv: &Poly,
    wk: &Poly,
    modulus: &Poly,
) -> Result<Vec<(u64, u64)>> {
    let f = eta.field();
    let mut hist = HashMap::new();
    for y in iter_below(f, wk.deg().unwrap()) {
        let x = lambda + &(wv * &y);
        let v = (eta * &(&x * &x)).rem(modulus)?;
        *hist.entry(v.to_index()).or_insert(0u64) += 1;
    }
    let mut out: Vec<(u64, u64)> = hist.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Sparse sum of two histograms of reduced residues.
fn pair_hist(f: &Arc<Fq>, a: &[(u64, u64)], b: &[(u64, u64)]) -> HashMap<u64, u64> {
    let pa: Vec<(Poly, u64)> = a
        .iter()
        .map(|&(i, n)| (Poly::from_index(f, i), n))
        .collect();
    let pb: Vec<(Poly, u64)> = b
        .iter()
        .map(|&(i, n)| (Poly::from_index(f, i), n))
        .collect();
    let mut out = HashMap::new();
    for (x, nx) in &pa {
        for (y, ny) in &pb {
            // both reduced, so the sum is reduced too
            *out.entry((x + y).to_index()).or_insert(0u64) += nx * ny;
        }
    }
    out
}

/// One term of the density sequence at level `k`.
fn density_term(p: &SystemParams, w: &Poly, v: u32, k: u32, budget: u128) -> Result<BigRational> {
    let f = p.field();
    let wv = w.pow(v as u64);
    let wk = w.pow(k as u64);
    let modulus = &wv * &wk;
    let side = (f.q() as u128).pow(wk.deg().unwrap() as u32);
    budget::check("local density pairs", 2 * side * side, budget)?;
    let eta = p.form.eta();
    let h: Vec<Vec<(u64, u64)>> = (0..4)
        .map(|i| coordinate_hist(&eta[i], &p.lambda[i], &wv, &wk, &modulus))
        .collect::<Result<_>>()?;
    let h12 = pair_hist(f, &h[0], &h[1]);
    let h34 = pair_hist(f, &h[2], &h[3]);
    let target = p.f.rem(&modulus)?;
    let mut count: u128 = 0;
    for (&i, &n) in &h12 {
        let rest = (&target - &Poly::from_index(f, i)).rem(&modulus)?;
        if let Some(&m) = h34.get(&rest.to_index()) {
            count += n as u128 * m as u128;
        }
    }
    let norm = qpow(f.q(), -3 * (k as i64) * w.deg().unwrap() as i64);
    Ok(BigRational::from_integer(BigInt::from(count)) * norm)
}

/// The density sequence `k = 1..=k_max` at the irreducible `w`.
pub fn local_density(p: &SystemParams, w: &Poly, k_max: u32, budget: u128) -> Result<LocalDensity> {
    if !w.is_monic() || !is_irreducible(w) {
        return Err(Error::Reducible(w.to_string()));
    }
    if k_max == 0 {
        return Err(Error::Invalid("k_max must be at least 1".into()));
    }
    let v = valuation(&p.g, w);
    let values: Vec<BigRational> = (1..=k_max)
        .map(|k| density_term(p, w, v, k, budget))
        .collect::<Result<_>>()?;
    let n = values.len();
    let stable_from = if n >= 2 && values[n - 1] == values[n - 2] {
        let mut k = n - 1;
        while k > 0 && values[k - 1] == values[n - 1] {
            k -= 1;
        }
        Some(k + 1)
    } else {
        None
    };
    Ok(LocalDensity {
        prime: w.clone(),
        v,
        values,
        stable_from,
    })
}

/// Densities at every monic irreducible of degree `<= max_deg`, each computed
/// until two consecutive terms agree (at most `k_max` terms).
pub fn local_densities(
    p: &SystemParams,
    max_deg: usize,
    k_max: u32,
    budget: u128,
) -> Result<Vec<LocalDensity>> {
    let f = p.field();
    let primes: Vec<Poly> = (1..=max_deg)
        .flat_map(|d| iter_irreducible(f, d).collect::<Vec<_>>())
        .collect();
    primes
        .into_par_iter()
        .map(|w| {
            let v = valuation(&p.g, &w);
            let mut values = vec![density_term(p, &w, v, 1, budget)?];
            let mut k = 1;
            while k < k_max {
                k += 1;
                values.push(density_term(p, &w, v, k, budget)?);
                if values[values.len() - 1] == values[values.len() - 2] {
                    break;
                }
            }
            let n = values.len();
            let stable_from = (n >= 2 && values[n - 1] == values[n - 2]).then_some(n - 1);
            Ok(LocalDensity {
                prime: w,
                v,
                values,
                stable_from,
            })
        })
        .collect()
}

/// `prod_{deg w <= max_deg} sigma_w`, using the stabilized term of each
/// density. Fails with [`Error::Convergence`] if some density has not
/// stabilized within `k_max` terms.
pub fn singular_series_product(
    p: &SystemParams,
    max_deg: usize,
    k_max: u32,
    budget: u128,
) -> Result<(BigRational, Vec<LocalDensity>)> {
    let dens = local_densities(p, max_deg, k_max, budget)?;
    let mut prod = BigRational::one();
    for d in &dens {
        if d.stable_from.is_none() {
            return Err(Error::Convergence(format!(
                "density at {} did not stabilize within k = {k_max}",
                d.prime
            )));
        }
        prod *= d.value();
    }
    Ok((prod, dens))
}

/// `sum_{r monic, deg r <= t_max} |gr|^{-4} S_{g,r}(0)`.
pub fn singular_series_sum(p: &SystemParams, t_max: usize) -> Result<ExactCyclo> {
    let f = p.field();
    let zero = CVector::zero(f);
    let dg = p.deg_g() as i64;
    let terms: Vec<ExactCyclo> = iter_monic_upto(f, t_max)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|r| {
            let s = ClosedSum::new(p, &r)?.eval(&zero)?;
            let dr = r.deg().unwrap() as i64;
            Ok(s.to_exact().scale(&qpow(f.q(), -4 * (dg + dr))))
        })
        .collect::<Result<_>>()?;
    let mut acc = crate::cyclo::Cyclotomic::zero(f.p());
    for t in &terms {
        acc += t;
    }
    Ok(acc)
}
