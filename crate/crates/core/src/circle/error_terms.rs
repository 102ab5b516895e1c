//! The split of the nonzero-frequency terms of the delta expansion into
//! `E1` (small moduli, `|r| <= R^ |c| q^{pi_c - 1} / |g|`) and `E2` (the rest).

use super::count::{delta_grid, delta_moduli, delta_terms_for_r, DeltaOptions};
use super::expsum::ClosedSum;
use super::{CVector, SystemParams};
use crate::cyclo::Cyclotomic;
use crate::error::Result;
use crate::ExactCyclo;

/// Contributions of one nonzero `c`.
#[derive(Clone, Debug)]
pub struct PerC {
    pub c: CVector,
    pub e1: ExactCyclo,
    pub e2: ExactCyclo,
    /// Moduli with `S_{g,r}(c) I_{g,r}(c) != 0`.
    pub moduli: usize,
}

#[derive(Clone, Debug)]
pub struct ErrorTerms {
    /// `sum_r |gr|^{-4} S_{g,r}(0) I_{g,r}(0)`.
    pub main: ExactCyclo,
    pub e1: ExactCyclo,
    pub e2: ExactCyclo,
    pub per_c: Vec<PerC>,
    /// `(T, #{c : 0 < |c| <= q^T, S_{g,r}(c) != 0 for some r})` for `T <= deg g`.
    pub census: Vec<(usize, usize)>,
    /// Kloosterman factors checked against the Weil bound, all passing.
    pub weil_checked: usize,
    /// Whether every checked factor was within the Weil bound.
    pub weil_ok: bool,
}

impl ErrorTerms {
    /// `main + E1 + E2`, which should equal `|g| Q^2 N(w, lambda)`.
    pub fn total(&self) -> ExactCyclo {
        &(&self.main + &self.e1) + &self.e2
    }
}

/// Whether `(r, c)` falls in `E1`: `deg r <= R + deg c + pi_c - 1 - deg g`.
pub fn in_e1(p: &SystemParams, r_deg: usize, c: &CVector) -> bool {
    let dc = c.deg().expect("c != 0") as i64;
    let bound = p.r_exp + dc + c.pi(p) as i64 - 1 - p.deg_g() as i64;
    (r_deg as i64) <= bound
}

/// Exact `E1`, `E2` and the `c = 0` terms, with the exceptional-`c` census and
/// Weil certificates for every Kloosterman factor of a contributing `S`.
pub fn error_terms(p: &SystemParams, opts: &DeltaOptions) -> Result<ErrorTerms> {
    let pp = p.field().p();
    let grid = delta_grid(p);
    let mut per: Vec<Option<PerC>> = vec![None; grid.len()];
    let mut main = Cyclotomic::zero(pp);
    let mut e1 = Cyclotomic::zero(pp);
    let mut e2 = Cyclotomic::zero(pp);
    let mut support = vec![false; grid.len()];
    let mut weil_checked = 0;
    let mut weil_ok = true;
    for r in delta_moduli(p) {
        let dr = r.deg().unwrap();
        let closed = ClosedSum::new(p, &r).ok();
        for (idx, hit) in support.iter_mut().enumerate().skip(1) {
            if *hit {
                continue;
            }
            if let Some(cs) = &closed {
                if !cs.eval(&grid.get(idx))?.is_zero() {
                    *hit = true;
                }
            }
        }
        let mut err = None;
        delta_terms_for_r(p, &r, opts, |idx, v| {
            if idx == 0 {
                main += &v;
                return;
            }
            let c = grid.get(idx);
            if let Some(cs) = &closed {
                match cs.weil_certificate(&c) {
                    Ok(Some(n)) => weil_checked += n,
                    Ok(None) => weil_ok = false,
                    Err(e) => err = Some(e),
                }
            }
            let slot = per[idx].get_or_insert_with(|| PerC {
                c: c.clone(),
                e1: Cyclotomic::zero(pp),
                e2: Cyclotomic::zero(pp),
                moduli: 0,
            });
            slot.moduli += 1;
            if in_e1(p, dr, &c) {
                slot.e1 += &v;
                e1 += &v;
            } else {
                slot.e2 += &v;
                e2 += &v;
            }
        })?;
        if let Some(e) = err {
            return Err(e);
        }
    }
    let census = (0..=p.deg_g())
        .map(|t| {
            let n = (1..grid.len())
                .filter(|&i| support[i] && grid.get(i).deg().is_some_and(|d| d <= t))
                .count();
            (t, n)
        })
        .collect();
    Ok(ErrorTerms {
        main,
        e1,
        e2,
        per_c: per.into_iter().flatten().collect(),
        census,
        weil_checked,
        weil_ok,
    })
}
