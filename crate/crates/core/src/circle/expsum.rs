//! The exponential sums `S_{g,r}(c)`.
//!
//! The direct evaluator sums
//! `psi(((a + r l)(2 lambda^T A b - k) + a g F(b) - <c, b>) / (g r))`
//! over `l mod g`, units `a mod r` and `b in (O/gr)^4`. The `b`-sum splits
//! over coordinates, so the work is `|g| |r|` times four one-dimensional sums
//! of length `|gr|`, followed by a sparse product over `c`.

use std::sync::Arc;

use rayon::prelude::*;

use super::{beta_of_c, conv_add, counts_vanish, CVector, SystemParams};
use crate::budget;
use crate::characters::{gauss_tau, PsiMod};
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::ff::{gcd_monic, inv_mod, iter_below, jacobi, m_part, Fq, Poly};
use crate::kloosterman::{weil_bound, KlTable};
use crate::IntCyclo;

/// All `c` with `deg c_i <= max_deg`, indexed by
/// `((i1 n + i2) n + i3) n + i4` where `i_j` is the base-`q` index of `c_j`.
#[derive(Clone, Debug)]
pub struct CGrid {
    field: Arc<Fq>,
    max_deg: usize,
    n1: usize,
}

impl CGrid {
    pub fn new(field: &Arc<Fq>, max_deg: usize) -> CGrid {
        CGrid {
            field: field.clone(),
            max_deg,
            n1: (field.q() as usize).pow(max_deg as u32 + 1),
        }
    }

    pub fn max_deg(&self) -> usize {
        self.max_deg
    }

    /// Values per coordinate.
    pub fn side(&self) -> usize {
        self.n1
    }

    pub fn len(&self) -> usize {
        self.n1.pow(4)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> Poly {
        Poly::from_index(&self.field, i as u64)
    }

    pub fn get(&self, idx: usize) -> CVector {
        let n = self.n1;
        CVector([
            self.coord(idx / (n * n * n)),
            self.coord(idx / (n * n) % n),
            self.coord(idx / n % n),
            self.coord(idx % n),
        ])
    }

    pub fn index(&self, c: &CVector) -> Option<usize> {
        let mut idx = 0usize;
        for ci in &c.0 {
            if ci.deg().is_some_and(|d| d > self.max_deg) {
                return None;
            }
            idx = idx * self.n1 + ci.to_index() as usize;
        }
        Some(idx)
    }
}

/// Nonzero one-dimensional factors for one `(a, l)` pair: per coordinate,
/// `(value index, counts)` with `counts[k]` the multiplicity of `zeta^k`.
type Factors = [Vec<(usize, Vec<i64>)>; 4];

fn direct_factors(
    p: &SystemParams,
    r: &Poly,
    values: &[Vec<Poly>; 4],
    budget: u128,
) -> Result<Vec<Factors>> {
    let f = p.field();
    let pp = f.p() as usize;
    if !r.is_monic() {
        return Err(Error::NotMonic(r.to_string()));
    }
    let g = &p.g;
    let gr = g * r;
    let d = gr.deg().unwrap();
    let dr = r.deg().unwrap();
    let dg = p.deg_g();
    let max_c = values
        .iter()
        .flatten()
        .filter_map(|c| c.deg())
        .max()
        .unwrap_or(0);
    let pm = PsiMod::new(&gr, 2 * d + max_c + dg + 2)?;
    let units: Vec<Poly> = if dr == 0 {
        vec![Poly::zero(f)]
    } else {
        iter_below(f, dr)
            .filter(|a| inv_mod(a, r).is_ok())
            .collect()
    };
    let ells: Vec<Poly> = iter_below(f, dg).collect();
    let bs: Vec<Poly> = iter_below(f, d).collect();
    let n_vals: usize = values.iter().map(|v| v.len()).sum();
    budget::check(
        "direct exponential sum (one-dimensional terms)",
        (units.len() * ells.len() * bs.len() * (n_vals + 4)) as u128,
        budget,
    )?;
    // psi(-c b / gr) exponents per coordinate
    let lin: Vec<Vec<Vec<u32>>> = values
        .iter()
        .map(|vals| {
            vals.iter()
                .map(|c| bs.iter().map(|b| pm.exponent(&-&(c * b))).collect())
                .collect()
        })
        .collect();
    let two = f.from_int(2);
    let eta = p.form.eta();
    let lin_coef: Vec<Poly> = (0..4)
        .map(|j| (&eta[j] * &p.lambda[j]).scale(two))
        .collect();
    let mut out = Vec::with_capacity(units.len() * ells.len());
    for a in &units {
        for l in &ells {
            let u = a + &(r * l);
            let e0 = pm.exponent(&-&(&u * &p.k)) as usize;
            let mut factors: Factors = Default::default();
            for j in 0..4 {
                let quad = &(a * g) * &eta[j];
                let lc = &u * &lin_coef[j];
                let base: Vec<u32> = bs
                    .iter()
                    .map(|b| pm.exponent(&(&(&(&quad * b) + &lc) * b)))
                    .collect();
                for (vi, lin_v) in lin[j].iter().enumerate() {
                    let mut counts = vec![0i64; pp];
                    for (bi, &e) in base.iter().enumerate() {
                        counts[(e + lin_v[bi]) as usize % pp] += 1;
                    }
                    if counts_vanish(&counts) {
                        continue;
                    }
                    if j == 0 && e0 != 0 {
                        counts.rotate_right(e0);
                    }
                    factors[j].push((vi, counts));
                }
            }
            out.push(factors);
        }
    }
    Ok(out)
}

/// `S_{g,r}(c)` by direct summation (exact, in `Z[zeta_p]`). The unit sum runs
/// over all `a mod r` coprime to `r`, with `a = 0` when `r = 1`.
pub fn exp_sum_direct(p: &SystemParams, r: &Poly, c: &CVector, budget: u128) -> Result<IntCyclo> {
    let values: [Vec<Poly>; 4] = std::array::from_fn(|i| vec![c.0[i].clone()]);
    let pp = p.field().p() as usize;
    let mut acc = vec![0i64; pp];
    for fac in direct_factors(p, r, &values, budget)? {
        if fac.iter().any(|v| v.is_empty()) {
            continue;
        }
        let mut prod = fac[0][0].1.clone();
        for v in &fac[1..] {
            let mut next = vec![0i64; pp];
            conv_add(&mut next, &prod, &v[0].1);
            prod = next;
        }
        for k in 0..pp {
            acc[k] += prod[k];
        }
    }
    Ok(Cyclotomic::from_counts(pp as u32, acc))
}

/// `S_{g,r}(c)` for every `c` of the grid, by direct summation.
pub fn exp_sum_direct_grid(
    p: &SystemParams,
    r: &Poly,
    grid: &CGrid,
    budget: u128,
) -> Result<Vec<IntCyclo>> {
    let pp = p.field().p() as usize;
    let n = grid.side();
    let vals: Vec<Poly> = (0..n).map(|i| grid.coord(i)).collect();
    let values: [Vec<Poly>; 4] = std::array::from_fn(|_| vals.clone());
    let tables = direct_factors(p, r, &values, budget)?;
    let work: u128 = tables
        .iter()
        .map(|t| t.iter().map(|v| v.len() as u128).product::<u128>())
        .sum::<u128>()
        * (pp * pp) as u128;
    budget::check("direct exponential sum (products over c)", work, budget)?;
    let slab = n * n * n;
    let mut acc = vec![0i64; grid.len() * pp];
    acc.par_chunks_mut(slab * pp)
        .enumerate()
        .for_each(|(c1, out)| {
            let mut p12 = vec![0i64; pp];
            let mut p123 = vec![0i64; pp];
            for fac in &tables {
                let Some((_, t1)) = fac[0].iter().find(|(i, _)| *i == c1) else {
                    continue;
                };
                for (c2, t2) in &fac[1] {
                    p12.iter_mut().for_each(|x| *x = 0);
                    conv_add(&mut p12, t1, t2);
                    for (c3, t3) in &fac[2] {
                        p123.iter_mut().for_each(|x| *x = 0);
                        conv_add(&mut p123, &p12, t3);
                        for (c4, t4) in &fac[3] {
                            let at = ((c2 * n + c3) * n + c4) * pp;
                            conv_add(&mut out[at..at + pp], &p123, t4);
                        }
                    }
                }
            }
        });
    Ok(acc
        .chunks(pp)
        .map(|v| Cyclotomic::from_counts(pp as u32, v.to_vec()))
        .collect())
}

/// Precomputed data for the closed form of `S_{g,r}(c)` at fixed `(g, r)`:
///
/// `S = |g|^4/|m|^2 (|(r,t-1)| tau_r tau_{r'})^2 (-nu/r)(-nu/r')
///      psi((-mr^-1 beta (f - F(lambda))/m - (m^2 r)^-1 <lambda,c>) / (g/m)^2)
///      psi(<lambda,c> / (g^2 r))
///      sum_{s mod m} psi(-s (g/m)^-1 beta / m)
///                    Kl_{m^2 r}((g/m)^-1 f - m r s, (g/m)^-3 F*(c) / 4)`
///
/// with `m = (g, r^inf)`, `r' = r / (r, t-1)`, and `S = 0` when
/// `(r, t-1)` does not divide `c3, c4` or `beta(c)` does not exist.
///
/// The Jacobi factor `(-nu/r)(-nu/r')` is the product of the four
/// `((g/m) a eta_j' / r_j)` symbols from completing the square; it equals 1
/// when `-1` is a non-square in F_q (in particular for `q = 3`).
pub struct ClosedSum {
    p: SystemParams,
    r: Poly,
    m: Poly,
    r1: Poly,
    m2r: Poly,
    lead: IntCyclo,
    inv_mr: Poly,
    inv_m2r: Poly,
    gm_k: Poly,
    gm_inv_m: Poly,
    gm_inv_big: Poly,
    t1_inv_big: Option<Poly>,
    inv4: crate::FqElem,
    psi_gm2: PsiMod,
    psi_g2r: PsiMod,
    psi_m: PsiMod,
    kl: KlTable,
}

impl ClosedSum {
    pub fn new(p: &SystemParams, r: &Poly) -> Result<ClosedSum> {
        p.require_admissible()?;
        if !r.is_monic() {
            return Err(Error::NotMonic(r.to_string()));
        }
        let f = p.field();
        let q = f.q() as i64;
        let t1 = p.form.t_minus_one();
        if t1.divides(&p.g) {
            return Err(Error::Invalid(
                "closed form needs t-1 not dividing g".into(),
            ));
        }
        let g = &p.g;
        let m = m_part(g, r)?;
        let gm = g.div_exact(&m)?;
        let mr = &m * r;
        let m2r = &m * &mr;
        let r1 = gcd_monic(r, &t1)?;
        let rp = r.div_exact(&r1)?;
        let dm = m.deg().unwrap() as u32;
        let size = q.pow(4 * p.deg_g() as u32 - 2 * dm) * q.pow(2 * r1.deg().unwrap() as u32);
        let minus_nu = Poly::constant(f, f.neg(p.form.nu()));
        let sign = (jacobi(&minus_nu, r)? * jacobi(&minus_nu, &rp)?) as i64;
        let tau = &gauss_tau(r)? * &gauss_tau(&rp)?;
        let lead = (&tau * &tau).scale(&(size * sign));
        let gm2 = &gm * &gm;
        let dmax = 2 * (m2r.deg().unwrap() + g.deg().unwrap()) + 4;
        Ok(ClosedSum {
            p: p.clone(),
            r: r.clone(),
            lead,
            inv_mr: inv_mod(&mr, &gm2)?,
            inv_m2r: inv_mod(&m2r, &gm2)?,
            gm_k: &gm * &p.k,
            gm_inv_m: inv_mod(&gm, &m)?,
            gm_inv_big: inv_mod(&gm, &m2r)?,
            t1_inv_big: inv_mod(&t1, &m2r).ok(),
            inv4: f.inv(f.from_int(4))?,
            psi_gm2: PsiMod::new(&gm2, dmax)?,
            psi_g2r: PsiMod::new(&(&(g * g) * r), dmax)?,
            psi_m: PsiMod::new(&m, dmax)?,
            kl: KlTable::new(&m2r)?,
            m,
            r1,
            m2r,
        })
    }

    pub fn m(&self) -> &Poly {
        &self.m
    }

    pub fn r(&self) -> &Poly {
        &self.r
    }

    /// `F*(c)` reduced into `O/(m^2 r)`, if defined there.
    pub fn dual_mod(&self, c: &CVector) -> Result<Option<Poly>> {
        let n = self.p.form.dual_numerator(&c.0);
        let t1 = self.p.form.t_minus_one();
        if t1.divides(&n) {
            return Ok(Some(n.div_exact(&t1)?.rem(&self.m2r)?));
        }
        Ok(match &self.t1_inv_big {
            Some(inv) => Some((&n * inv).rem(&self.m2r)?),
            None => None,
        })
    }

    /// `(beta, <lambda, c>, base, n)` with `Kl_{m^2 r}(base - m r s, n)` the
    /// Kloosterman factors, or `None` when a vanishing clause applies.
    fn arguments(&self, c: &CVector) -> Result<Option<(Poly, Poly, Poly, Poly)>> {
        let p = &self.p;
        let f = p.field();
        if !self.r1.divides(&c.0[2]) || !self.r1.divides(&c.0[3]) {
            return Ok(None);
        }
        let Some(beta) = beta_of_c(c, p)? else {
            return Ok(None);
        };
        let lc = (0..4).fold(Poly::zero(f), |acc, i| &acc + &(&p.lambda[i] * &c.0[i]));
        let fstar = self.dual_mod(c)?.ok_or_else(|| {
            Error::Invalid(format!("F*(c) not integral mod {} for c = {c}", self.m2r))
        })?;
        let gi = &self.gm_inv_big;
        let n_arg = (&(&(gi * gi) * gi) * &fstar)
            .scale(self.inv4)
            .rem(&self.m2r)?;
        let m_base = (gi * &p.f).rem(&self.m2r)?;
        Ok(Some((beta, lc, m_base, n_arg)))
    }

    pub fn eval(&self, c: &CVector) -> Result<IntCyclo> {
        let f = self.p.field();
        let pp = f.p();
        let Some((beta, lc, m_base, n_arg)) = self.arguments(c)? else {
            return Ok(Cyclotomic::zero(pp));
        };
        let ph1 = -&(&(&(&self.inv_mr * &beta) * &self.gm_k) + &(&self.inv_m2r * &lc));
        let e1 = self.psi_gm2.exponent(&ph1) + self.psi_g2r.exponent(&lc);
        let mr = &self.m * &self.r;
        let mut acc = Cyclotomic::zero(pp);
        for s in iter_below(f, self.m.deg().unwrap()) {
            let es = self.psi_m.exponent(&-&(&(&s * &self.gm_inv_m) * &beta));
            let kl = self.kl.eval(&(&m_base - &(&mr * &s)), &n_arg)?;
            acc += &kl.rotate(es as i64);
        }
        Ok((&self.lead * &acc).rotate(e1 as i64))
    }

    /// Checks every Kloosterman factor of `S_{g,r}(c)` against the Weil
    /// bound. Returns the number of factors checked, or `None` if one fails.
    pub fn weil_certificate(&self, c: &CVector) -> Result<Option<usize>> {
        let f = self.p.field();
        let Some((_, _, m_base, n_arg)) = self.arguments(c)? else {
            return Ok(Some(0));
        };
        let mr = &self.m * &self.r;
        let mut n = 0;
        for s in iter_below(f, self.m.deg().unwrap()) {
            let a = &m_base - &(&mr * &s);
            let kl = self.kl.eval(&a, &n_arg)?.to_complex().norm();
            if kl > weil_bound(&self.m2r, &a, &n_arg)? + 1e-9 {
                return Ok(None);
            }
            n += 1;
        }
        Ok(Some(n))
    }
}

/// Closed form of `S_{g,r}(c)`; see [`ClosedSum`].
pub fn exp_sum_closed(p: &SystemParams, r: &Poly, c: &CVector) -> Result<IntCyclo> {
    ClosedSum::new(p, r)?.eval(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::MorgensternForm;
    use crate::Fq;

    fn instance(g: &str, lam: [&str; 4], k: &str) -> SystemParams {
        let f = Fq::new(3).unwrap();
        let form = MorgensternForm::new(&f, f.from_int(-1)).unwrap();
        let g = Poly::parse(&f, g).unwrap();
        let lam = lam.map(|s| Poly::parse(&f, s).unwrap());
        let fp = &form.eval(&lam) + &(&g * &Poly::parse(&f, k).unwrap());
        SystemParams::new(form, fp, g, lam).unwrap()
    }

    #[test]
    fn r_one_c_zero_is_g4_times_phase() {
        let p = instance("t+1", ["1", "0", "0", "0"], "t");
        let f = p.field().clone();
        let one = Poly::one(&f);
        let c = CVector::zero(&f);
        let d = exp_sum_direct(&p, &one, &c, u128::MAX).unwrap();
        assert_eq!(d.as_scalar(), Some(81));
        assert_eq!(exp_sum_closed(&p, &one, &c).unwrap(), d);
    }

    #[test]
    fn grid_agrees_with_single_evaluations() {
        let p = instance("t+1", ["1", "2", "0", "1"], "t+2");
        let f = p.field().clone();
        let r = Poly::parse(&f, "t").unwrap();
        let grid = CGrid::new(&f, 1);
        let all = exp_sum_direct_grid(&p, &r, &grid, u128::MAX).unwrap();
        for idx in (0..grid.len()).step_by(97) {
            let c = grid.get(idx);
            assert_eq!(grid.index(&c), Some(idx));
            assert_eq!(
                all[idx],
                exp_sum_direct(&p, &r, &c, u128::MAX).unwrap(),
                "c={c}"
            );
        }
    }
}
