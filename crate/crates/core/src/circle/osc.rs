//! The oscillatory integrals
//! `I_{g,r}(c) = (Q^/|r|) int_{|t| < R^, |G(t)| < Q^|r|} psi(<c,t>/(g r)) dt`
//! with `G(t) = F(t) + (2 lambda^T A t - k)/g`.
//!
//! The numeric evaluator cuts each coordinate ball `|t_i| < q^R` into cells
//! `t0 + {|d| < q^e}` on which both the high coefficients of `G` (degrees
//! `>= Q + deg r`) and the phase are constant, groups the cells of each
//! coordinate by their contribution to those coefficients, and matches the
//! four coordinates pairwise. The result is exact and is re-derived one level
//! finer as a stability certificate.

use std::collections::HashMap;
use std::sync::Mutex;

use super::{conv_add, CGrid, CVector, SystemParams};
use crate::budget;
use crate::cyclo::{qpow, Cyclotomic};
use crate::error::{Error, Result};
use crate::ff::{iter_below, FqElem, Laurent, Poly};
use crate::kloosterman::kl_infinity_closed;
use crate::ExactCyclo;

/// The five cases of the closed form, in the order they are tested.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OscBranch {
    /// `kappa >= Q^/R^`: zero.
    Vanish,
    /// `kappa = |r|/R^`, `deg f` even, `Q^ q^-3 < |r| <= Q^`: zero.
    VanishEven,
    /// `kappa < |r|/R^`: `I(0)`.
    Small,
    /// `kappa = |r|/R^`, odd coordinates dominate, `deg f` even,
    /// `|r| <= Q^ q^-3`: `I(0)`.
    SmallOdd,
    /// Otherwise: the `Kl_inf` expression.
    Kloosterman,
}

impl OscBranch {
    pub const ALL: [OscBranch; 5] = [
        OscBranch::Vanish,
        OscBranch::VanishEven,
        OscBranch::Small,
        OscBranch::SmallOdd,
        OscBranch::Kloosterman,
    ];

    /// 1-based case number.
    pub fn number(self) -> usize {
        self as usize + 1
    }
}

fn check_r(p: &SystemParams, r: &Poly) -> Result<i64> {
    if !r.is_monic() {
        return Err(Error::NotMonic(r.to_string()));
    }
    let dr = r.deg().unwrap() as i64;
    if dr > p.q_exp {
        return Err(Error::Invalid(format!(
            "|r| = q^{dr} exceeds Q^ = q^{}",
            p.q_exp
        )));
    }
    Ok(dr)
}

/// Which case of the closed form applies to `(r, c)`.
pub fn osc_branch(p: &SystemParams, r: &Poly, c: &CVector) -> Result<OscBranch> {
    let dr = check_r(p, r)?;
    let even = p.deg_f().is_multiple_of(2);
    let edge = dr - p.r_exp;
    let Some(kap) = c.kappa_exp(p) else {
        return Ok(OscBranch::Small);
    };
    Ok(if kap >= 1 {
        OscBranch::Vanish
    } else if kap == edge && even && p.q_exp - 3 < dr {
        OscBranch::VanishEven
    } else if kap < edge {
        OscBranch::Small
    } else if kap == edge && c.odd_dominates() && even && dr <= p.q_exp - 3 {
        OscBranch::SmallOdd
    } else {
        OscBranch::Kloosterman
    })
}

/// Exact values on a grid of `c`, as `q^scale_exp * (counts of zeta^k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OscGrid {
    pub scale_exp: i64,
    pub p: u32,
    pub q: u32,
    /// `len * p` counts, `len` being the number of grid points.
    pub counts: Vec<i64>,
}

impl OscGrid {
    pub fn len(&self) -> usize {
        self.counts.len() / self.p as usize
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn value(&self, idx: usize) -> ExactCyclo {
        let pp = self.p as usize;
        let v = self.counts[idx * pp..(idx + 1) * pp].to_vec();
        Cyclotomic::from_counts(self.p, v)
            .to_exact()
            .scale(&qpow(self.q, self.scale_exp))
    }
}

/// Per-coordinate cell tables: `key -> counts` with `counts[v * p + k]` the
/// number of cells whose phase for the `v`-th value is `zeta^k`.
type CellTable = HashMap<Vec<FqElem>, Vec<i64>>;

struct Numeric<'a> {
    p: &'a SystemParams,
    r: &'a Poly,
    big_e: i64,
    top: i64,
}

impl<'a> Numeric<'a> {
    fn new(p: &'a SystemParams, r: &'a Poly) -> Result<Numeric<'a>> {
        let dr = check_r(p, r)?;
        let big_e = p.q_exp + dr;
        let dk = p.k.deg().map(|d| d as i64).unwrap_or(0);
        let top = (2 * p.r_exp + 1).max(dk - p.deg_g() as i64).max(0) + 1;
        Ok(Numeric { p, r, big_e, top })
    }

    /// Coarsest valid cell exponent for coordinate `i` given the largest
    /// `deg c_i` among the values.
    fn auto_exp(&self, i: usize, max_deg_c: Option<usize>) -> i64 {
        let p = self.p;
        let big_r = p.r_exp;
        let deta = p.form.eta()[i].deg().unwrap() as i64;
        let mut e = big_r.min(self.big_e + 1 - deta - big_r.max(0));
        if let Some(dc) = max_deg_c {
            let dr = self.r.deg().unwrap() as i64;
            e = e.min(p.deg_g() as i64 + dr - dc as i64 - 1);
        }
        e
    }

    fn key_len(&self) -> usize {
        (self.top - self.big_e + 1).max(0) as usize
    }

    fn table(&self, i: usize, e: i64, values: &[Poly]) -> Result<CellTable> {
        let p = self.p;
        let f = p.field();
        let pp = f.p() as usize;
        let big_r = p.r_exp;
        let e = e.min(big_r);
        let len = (big_r - e) as usize;
        let eta = &p.form.eta()[i];
        let two = f.from_int(2);
        let lo = (self.big_e - big_r - 2).min(-2);
        let lser = Laurent::from_fraction(&(eta * &p.lambda[i]).scale(two), &p.g, lo)?;
        let gr = &p.g * self.r;
        let cser: Vec<Laurent> = values
            .iter()
            .map(|c| Laurent::from_fraction(c, &gr, (-big_r - 2).min(-e - 3)))
            .collect::<Result<_>>()?;
        // weights: ls[D - E][j] = L_{D - e - j}, cw[v][j] = [t^{-1-e-j}] c_v/(g r)
        let klen = self.key_len();
        let mut ls = vec![vec![FqElem::ZERO; len]; klen];
        for (di, row) in ls.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                *w = lser.coeff(self.big_e + di as i64 - e - j as i64)?;
            }
        }
        let mut cw = vec![vec![FqElem::ZERO; len]; values.len()];
        for (v, row) in cw.iter_mut().enumerate() {
            for (j, w) in row.iter_mut().enumerate() {
                *w = cser[v].coeff(-1 - e - j as i64)?;
            }
        }
        let mut table: CellTable = HashMap::new();
        for cell in iter_below(f, len) {
            let sq = eta * &(&cell * &cell);
            let digits = cell.coeffs();
            let mut key = vec![FqElem::ZERO; klen];
            for (di, k) in key.iter_mut().enumerate() {
                let deg = self.big_e + di as i64 - 2 * e;
                let mut acc = if deg >= 0 {
                    sq.coeff(deg as usize)
                } else {
                    FqElem::ZERO
                };
                for (j, &a) in digits.iter().enumerate() {
                    acc = f.add(acc, f.mul(a, ls[di][j]));
                }
                *k = acc;
            }
            let entry = table
                .entry(key)
                .or_insert_with(|| vec![0i64; values.len() * pp]);
            for (v, w) in cw.iter().enumerate() {
                let mut acc = FqElem::ZERO;
                for (j, &a) in digits.iter().enumerate() {
                    acc = f.add(acc, f.mul(a, w[j]));
                }
                entry[v * pp + f.trace(acc) as usize] += 1;
            }
        }
        Ok(table)
    }

    fn target(&self) -> Result<Vec<FqElem>> {
        let kg = Laurent::from_fraction(&self.p.k, &self.p.g, self.big_e.min(-1))?;
        (0..self.key_len())
            .map(|di| kg.coeff(self.big_e + di as i64))
            .collect()
    }

    /// Pairs two coordinate tables into `key -> counts[(v1 n2 + v2) p + k]`.
    fn pair(&self, a: &CellTable, na: usize, b: &CellTable, nb: usize) -> CellTable {
        let f = self.p.field();
        let pp = f.p() as usize;
        let mut out: CellTable = HashMap::new();
        for (ka, va) in a {
            for (kb, vb) in b {
                let key: Vec<FqElem> = ka.iter().zip(kb).map(|(&x, &y)| f.add(x, y)).collect();
                let entry = out.entry(key).or_insert_with(|| vec![0i64; na * nb * pp]);
                for i in 0..na {
                    let xa = &va[i * pp..(i + 1) * pp];
                    if xa.iter().all(|&x| x == 0) {
                        continue;
                    }
                    for j in 0..nb {
                        let at = (i * nb + j) * pp;
                        conv_add(&mut entry[at..at + pp], xa, &vb[j * pp..(j + 1) * pp]);
                    }
                }
            }
        }
        out
    }

    /// Exact values for all combinations of per-coordinate values, at cell
    /// exponents `e`.
    fn run(&self, values: &[Vec<Poly>; 4], e: [i64; 4], budget: u128) -> Result<OscGrid> {
        let p = self.p;
        let f = p.field();
        let q = f.q() as u128;
        let pp = f.p() as usize;
        let big_r = p.r_exp;
        let cells: u128 = e
            .iter()
            .map(|&ei| q.saturating_pow((big_r - ei.min(big_r)) as u32))
            .sum();
        let n: Vec<usize> = values.iter().map(|v| v.len()).collect();
        budget::check(
            "integrand cells",
            cells * (n.iter().max().copied().unwrap_or(1) as u128),
            budget,
        )?;
        let tabs: Vec<CellTable> = (0..4)
            .map(|i| self.table(i, e[i], &values[i]))
            .collect::<Result<_>>()?;
        let work = (tabs[0].len() * tabs[1].len()) as u128 * (n[0] * n[1]) as u128
            + (tabs[2].len() * tabs[3].len()) as u128 * (n[2] * n[3]) as u128;
        budget::check("cell pairing", work * (pp * pp) as u128, budget)?;
        let t12 = self.pair(&tabs[0], n[0], &tabs[1], n[1]);
        let t34 = self.pair(&tabs[2], n[2], &tabs[3], n[3]);
        let target = self.target()?;
        let (n12, n34) = (n[0] * n[1], n[2] * n[3]);
        budget::check(
            "key matching",
            (t12.len() * n12 * n34 * pp * pp) as u128,
            budget,
        )?;
        let mut counts = vec![0i64; n12 * n34 * pp];
        for (k12, v12) in &t12 {
            let want: Vec<FqElem> = target.iter().zip(k12).map(|(&x, &y)| f.sub(x, y)).collect();
            let Some(v34) = t34.get(&want) else { continue };
            for i in 0..n12 {
                let xa = &v12[i * pp..(i + 1) * pp];
                if xa.iter().all(|&x| x == 0) {
                    continue;
                }
                for j in 0..n34 {
                    let at = (i * n34 + j) * pp;
                    conv_add(&mut counts[at..at + pp], xa, &v34[j * pp..(j + 1) * pp]);
                }
            }
        }
        let dr = self.r.deg().unwrap() as i64;
        let scale_exp = e.iter().map(|&ei| ei.min(big_r)).sum::<i64>() + p.q_exp - dr;
        Ok(OscGrid {
            scale_exp,
            p: pp as u32,
            q: f.q(),
            counts,
        })
    }

    fn run_certified(&self, values: &[Vec<Poly>; 4], e: [i64; 4], budget: u128) -> Result<OscGrid> {
        let coarse = self.run(values, e, budget)?;
        let fine = self.run(values, e.map(|x| x - 1), budget)?;
        let n = coarse.len();
        for idx in 0..n {
            if coarse.value(idx) != fine.value(idx) {
                return Err(Error::Precision {
                    needed: e.iter().min().copied().unwrap_or(0) - 1,
                    known: e.iter().min().copied().unwrap_or(0),
                });
            }
        }
        Ok(coarse)
    }
}

/// `I_{g,r}(c)` by exact cell summation. `depth`, when given, forces cells of
/// size `q^-depth` in every coordinate; it must be at least as fine as the
/// automatically derived resolution.
pub fn osc_integral_numeric(
    p: &SystemParams,
    r: &Poly,
    c: &CVector,
    depth: Option<i64>,
    budget: u128,
) -> Result<ExactCyclo> {
    let num = Numeric::new(p, r)?;
    let mut e = [0i64; 4];
    for i in 0..4 {
        let auto = num.auto_exp(i, c.0[i].deg());
        e[i] = match depth {
            None => auto,
            Some(d) if -d <= auto => -d,
            Some(d) => {
                return Err(Error::Precision {
                    needed: auto,
                    known: -d,
                })
            }
        };
    }
    let values: [Vec<Poly>; 4] = std::array::from_fn(|i| vec![c.0[i].clone()]);
    Ok(num.run_certified(&values, e, budget)?.value(0))
}

/// `I_{g,r}(c)` for every `c` of the grid, by exact cell summation.
pub fn osc_integral_numeric_grid(
    p: &SystemParams,
    r: &Poly,
    grid: &CGrid,
    budget: u128,
) -> Result<OscGrid> {
    let num = Numeric::new(p, r)?;
    let e: [i64; 4] = std::array::from_fn(|i| num.auto_exp(i, Some(grid.max_deg())));
    let vals: Vec<Poly> = (0..grid.side()).map(|i| grid.coord(i)).collect();
    let values: [Vec<Poly>; 4] = std::array::from_fn(|_| vals.clone());
    num.run_certified(&values, e, budget)
}

/// `I_{g,r}(0)`, by exact cell summation.
pub fn osc_integral_zero(p: &SystemParams, r: &Poly, budget: u128) -> Result<ExactCyclo> {
    osc_integral_numeric(p, r, &CVector::zero(p.field()), None, budget)
}

/// Closed form at fixed `(g, r)`, holding `I(0)` and a cache of `Kl_inf`
/// values keyed by the numerator of `F*(c)`.
pub struct OscClosed {
    p: SystemParams,
    r: Poly,
    izero: ExactCyclo,
    cache: Mutex<HashMap<Poly, ExactCyclo>>,
}

impl OscClosed {
    pub fn new(p: &SystemParams, r: &Poly, izero: ExactCyclo) -> Result<OscClosed> {
        check_r(p, r)?;
        Ok(OscClosed {
            p: p.clone(),
            r: r.clone(),
            izero,
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Computes `I(0)` numerically.
    pub fn with_numeric_zero(p: &SystemParams, r: &Poly, budget: u128) -> Result<OscClosed> {
        OscClosed::new(p, r, osc_integral_zero(p, r, budget)?)
    }

    pub fn izero(&self) -> &ExactCyclo {
        &self.izero
    }

    /// `k F*(c) / (4 r^2 g^3)` as a Laurent series.
    pub fn kl_argument(&self, c: &CVector) -> Result<Laurent> {
        let p = &self.p;
        let f = p.field();
        let n = p.form.dual_numerator(&c.0);
        let num = (&p.k * &n).scale(f.inv(f.from_int(4))?);
        let g3 = &(&p.g * &p.g) * &p.g;
        let den = &(&(&self.r * &self.r) * &g3) * &p.form.t_minus_one();
        Laurent::from_fraction(&num, &den, crate::ff::laurent::DEFAULT_LO)
    }

    /// Whether the stationary level `|alpha| = q^l`, `2l = deg(t^{2Q} F*(c) / (k g))`,
    /// lies in the range `max_i kappa_i < |alpha| < 1` of the `alpha`-integral.
    /// Outside it the `alpha`-sum has no stationary term and `I(c) = 0`.
    pub fn stationary_in_window(&self, c: &CVector, n: &Poly) -> bool {
        let p = &self.p;
        let (Some(dn), Some(dk)) = (n.deg(), p.k.deg()) else {
            return false;
        };
        let dg = p.deg_g() as i64;
        let l2 = 2 * p.q_exp + dn as i64 - 1 - dk as i64 - dg;
        if l2 % 2 != 0 {
            return false;
        }
        let l = l2 / 2;
        if l >= 0 {
            return false;
        }
        // kappa_i = |c_i| Q^ / (|g| |eta_i| R^)
        (0..4).all(|i| match c.0[i].deg() {
            None => true,
            Some(d) => {
                let ki = d as i64 + p.q_exp - p.r_exp - dg - p.form.eta()[i].deg().unwrap() as i64;
                ki < l
            }
        })
    }

    pub fn eval(&self, c: &CVector) -> Result<(OscBranch, ExactCyclo)> {
        let p = &self.p;
        let f = p.field();
        let pp = f.p();
        let branch = osc_branch(p, &self.r, c)?;
        let value = match branch {
            OscBranch::Vanish | OscBranch::VanishEven => Cyclotomic::zero(pp),
            OscBranch::Small | OscBranch::SmallOdd => self.izero.clone(),
            OscBranch::Kloosterman => {
                let n = p.form.dual_numerator(&c.0);
                if p.k.is_zero() {
                    // Kl_inf(psi, 0) = 0: |0| is not an even power of q
                    return Ok((branch, Cyclotomic::zero(pp)));
                }
                if !self.stationary_in_window(c, &n) {
                    return Ok((branch, Cyclotomic::zero(pp)));
                }
                let cached = self.cache.lock().unwrap().get(&n).cloned();
                let kl = match cached {
                    Some(v) => v,
                    None => {
                        let v = kl_infinity_closed(&self.kl_argument(c)?)?;
                        self.cache.lock().unwrap().insert(n.clone(), v.clone());
                        v
                    }
                };
                // |F*(c)| = q^{deg N - 1}
                let dn = n.deg().unwrap() as i64;
                let dr = self.r.deg().unwrap() as i64;
                let e = 2 * p.q_exp + 2 * p.deg_g() as i64 + 2 * dr - (dn - 1);
                kl.scale(&-qpow(f.q(), e))
            }
        };
        Ok((branch, value))
    }
}

/// Closed form of `I_{g,r}(c)`, with `I(0)` computed numerically.
pub fn osc_integral_closed(
    p: &SystemParams,
    r: &Poly,
    c: &CVector,
    budget: u128,
) -> Result<(OscBranch, ExactCyclo)> {
    OscClosed::with_numeric_zero(p, r, budget)?.eval(c)
}
