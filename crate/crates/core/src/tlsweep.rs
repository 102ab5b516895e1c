//! Twisted Linnik-Selberg sums
//! `sum_{|r| = q^T, (g,r) = 1, delta | r} psi_{g^2}(alpha rbar) Kl_r(a, b) [Kl_inf(ab / r^2)]`
//! with `a, b` in `F_q[t, 1/g]`, and sweeps over `T` with growth-exponent fits.

use std::fmt;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::budget;
use crate::characters::PsiMod;
pub use crate::circle::KernelVariant;
use crate::cyclo::Cyclotomic;
use crate::error::{Error, Result};
use crate::ff::{
    gcd_monic, inv_mod, iter_monic, iter_monic_upto, laurent::DEFAULT_LO, Fq, Laurent, Poly,
};
use crate::kloosterman::{kl_finite, kl_infinity_bound, kl_infinity_closed, weil_bound};
use crate::ExactCyclo;

/// `num / g^gpow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GFraction {
    pub num: Poly,
    pub gpow: u32,
}

impl GFraction {
    pub fn new(num: Poly, gpow: u32) -> GFraction {
        GFraction { num, gpow }
    }

    /// `num * gbar^gpow mod r`; `r` coprime to `g`.
    fn residue(&self, gbar: &Poly, r: &Poly) -> Result<Poly> {
        (&self.num * &gbar.pow(self.gpow as u64)).rem(r)
    }
}

impl fmt::Display for GFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gpow == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/g^{}", self.num, self.gpow)
        }
    }
}

/// Which moduli a sum runs over: `|r| = q^T` or `|r| <= q^T`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    Exact,
    Cumulative,
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Window::Exact => "exact",
            Window::Cumulative => "cumulative",
        })
    }
}

#[derive(Clone, Debug)]
pub struct TlsParams {
    pub g: Poly,
    pub delta: Poly,
    pub alpha: Poly,
    pub a: GFraction,
    pub b: GFraction,
    pub t: usize,
    pub variant: KernelVariant,
}

impl TlsParams {
    pub fn new(
        g: Poly,
        delta: Poly,
        alpha: Poly,
        a: GFraction,
        b: GFraction,
        t: usize,
        variant: KernelVariant,
    ) -> Result<TlsParams> {
        if g.is_zero() || delta.is_zero() {
            return Err(Error::Invalid("g and delta must be nonzero".into()));
        }
        if a.num.is_zero() || b.num.is_zero() {
            return Err(Error::Invalid("a and b must be nonzero".into()));
        }
        if !gcd_monic(&g, &delta)?.is_one() {
            return Err(Error::Invalid(format!(
                "delta = {delta} is not coprime to g = {g}"
            )));
        }
        Ok(TlsParams {
            g,
            delta: delta.monic(),
            alpha,
            a,
            b,
            t,
            variant,
        })
    }

    pub fn field(&self) -> &Arc<Fq> {
        self.g.field()
    }

    pub fn with_t(&self, t: usize) -> TlsParams {
        TlsParams { t, ..self.clone() }
    }

    pub fn with_variant(&self, variant: KernelVariant) -> TlsParams {
        TlsParams {
            variant,
            ..self.clone()
        }
    }

    /// Canonical text form of the parameters, the preimage of [`Self::hash`].
    pub fn canonical(&self) -> String {
        format!(
            "q={};g={};delta={};alpha={};a={}/g^{};b={}/g^{};variant={};T={}",
            self.field().q(),
            self.g.to_machine(),
            self.delta.to_machine(),
            self.alpha.to_machine(),
            self.a.num.to_machine(),
            self.a.gpow,
            self.b.num.to_machine(),
            self.b.gpow,
            self.variant,
            self.t
        )
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`].
    pub fn hash(&self) -> String {
        let d = Sha256::digest(self.canonical().as_bytes());
        d.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    /// `alpha = 0` and `delta = 1`.
    pub fn is_untwisted(&self) -> bool {
        self.alpha.is_zero() && self.delta.is_one()
    }

    fn moduli(&self, window: Window) -> Vec<Poly> {
        let f = self.field();
        let keep = |r: &Poly| {
            self.delta.divides(r) && gcd_monic(r, &self.g).map(|d| d.is_one()).unwrap_or(false)
        };
        match window {
            Window::Exact => iter_monic(f, self.t).filter(keep).collect(),
            Window::Cumulative => iter_monic_upto(f, self.t).filter(keep).collect(),
        }
    }
}

/// An evaluated sum with its diagnostics.
#[derive(Clone, Debug)]
pub struct TlsValue {
    pub value: ExactCyclo,
    pub n_terms: u64,
    /// `sum_r |term_r|`, the triangle-inequality side.
    pub abs_sum: f64,
    /// Number of terms times the largest per-term Weil bound.
    pub ceiling: f64,
}

struct Term {
    value: ExactCyclo,
    abs: f64,
    bound: f64,
}

fn term(p: &TlsParams, psi: Option<&PsiMod>, r: &Poly) -> Result<Term> {
    let f = p.field();
    let pp = f.p();
    let phase = match psi {
        Some(psi) => {
            let g2 = psi.modulus();
            let rbar = inv_mod(r, g2)?;
            psi.exponent(&(&p.alpha * &rbar).rem(g2)?) as i64
        }
        None => 0,
    };
    let (kl, weil) = if r.is_constant() {
        (Cyclotomic::one(pp), 1.0)
    } else {
        let gbar = inv_mod(&p.g, r)?;
        let m = p.a.residue(&gbar, r)?;
        let n = p.b.residue(&gbar, r)?;
        (kl_finite(r, &m, &n)?, weil_bound(r, &m, &n)?)
    };
    let mut value = kl.rotate(phase).to_exact();
    let mut bound = weil;
    if p.variant == KernelVariant::WithInfinity {
        let num = &p.a.num * &p.b.num;
        let den = &p.g.pow((p.a.gpow + p.b.gpow) as u64) * &(r * r);
        let lo = DEFAULT_LO.min(-(den.deg_i() + 8));
        let x = Laurent::from_fraction(&num, &den, lo)?;
        value = &value * &kl_infinity_closed(&x)?;
        bound *= kl_infinity_bound(&x)?;
    }
    let abs = value.to_complex().norm();
    Ok(Term { value, abs, bound })
}

/// Evaluates the sum over the given window.
pub fn tls_evaluate(p: &TlsParams, window: Window, budget: u128) -> Result<TlsValue> {
    let f = p.field();
    let q = f.q() as u128;
    let rs = p.moduli(window);
    budget::check(
        "twisted sum work",
        rs.len() as u128 * q.pow(p.t as u32),
        budget,
    )?;
    let psi = if p.g.is_constant() {
        None
    } else {
        let g2 = &p.g * &p.g;
        let d = g2.deg().unwrap();
        Some(PsiMod::new(&g2, 2 * d)?)
    };
    let terms: Vec<Term> = rs
        .par_iter()
        .map(|r| term(p, psi.as_ref(), r))
        .collect::<Result<_>>()?;
    let mut value = Cyclotomic::zero(f.p());
    let mut abs_sum = 0.0;
    let mut max_bound: f64 = 0.0;
    for t in &terms {
        value += &t.value;
        abs_sum += t.abs;
        max_bound = max_bound.max(t.bound);
    }
    Ok(TlsValue {
        value,
        n_terms: terms.len() as u64,
        abs_sum,
        ceiling: terms.len() as f64 * max_bound,
    })
}

/// The exact sum over `|r| = q^T`.
pub fn tls_sum(p: &TlsParams, budget: u128) -> Result<ExactCyclo> {
    Ok(tls_evaluate(p, Window::Exact, budget)?.value)
}

/// Grid of a sweep, with polynomials in the text grammar.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepConfig {
    pub q: u64,
    pub g: String,
    pub delta: String,
    pub alpha: String,
    pub a_num: String,
    pub a_gpow: u32,
    pub b_num: String,
    pub b_gpow: u32,
    pub variants: Vec<KernelVariant>,
    pub t_max: usize,
    pub budget: u128,
    pub seed: u64,
}

impl SweepConfig {
    /// `alpha = 0`, `delta = 1`, `a = b = 1`, both variants, `T <= 4`.
    pub fn untwisted(q: u64, g: &str) -> SweepConfig {
        SweepConfig {
            q,
            g: g.into(),
            delta: "1".into(),
            alpha: "0".into(),
            a_num: "1".into(),
            a_gpow: 0,
            b_num: "1".into(),
            b_gpow: 0,
            variants: vec![KernelVariant::Finite, KernelVariant::WithInfinity],
            t_max: 4,
            budget: budget::default_budget(),
            seed: 0,
        }
    }

    /// Parameters at `T = 0` for the given variant.
    pub fn params(&self, variant: KernelVariant) -> Result<TlsParams> {
        let f = Fq::new(self.q)?;
        let poly = |s: &str| Poly::parse(&f, s);
        TlsParams::new(
            poly(&self.g)?,
            poly(&self.delta)?,
            poly(&self.alpha)?,
            GFraction::new(poly(&self.a_num)?, self.a_gpow),
            GFraction::new(poly(&self.b_num)?, self.b_gpow),
            0,
            variant,
        )
    }
}

/// One evaluated point of a sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRecord {
    pub params_hash: String,
    pub variant: KernelVariant,
    pub window: Window,
    #[serde(rename = "T")]
    pub t: usize,
    #[serde(skip)]
    pub value: ExactCyclo,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub n_terms: u64,
    pub abs_sum: f64,
    pub ceiling: f64,
    pub seconds: f64,
    pub revision: String,
}

/// Row layout of the CSV files.
#[derive(Serialize, Deserialize, Debug, PartialEq)]
pub struct CsvRow {
    pub q: u64,
    pub g: String,
    pub delta: String,
    pub alpha: String,
    pub a_num: String,
    pub a_gpow: u32,
    pub b_num: String,
    pub b_gpow: u32,
    pub variant: KernelVariant,
    #[serde(rename = "T")]
    pub t: usize,
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub n_terms: u64,
    pub seconds: f64,
}

/// Least-squares fit of `log_q |sum| = slope T + intercept` over the nonzero
/// values.
#[derive(Clone, Debug, Serialize)]
pub struct SlopeFit {
    pub variant: KernelVariant,
    pub window: Window,
    /// `T` values used.
    pub points: Vec<usize>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// `"ok"` or `"insufficient signal"` (fewer than 3 nonzero values).
    pub status: String,
    /// For untwisted grids: slope `<= 1.25`. Heuristic only.
    pub consistent: Option<bool>,
}

/// Nonzero values with `|z|` below this are treated as zero in fits.
const ZERO_TOL: f64 = 1e-9;

/// Slope bound asserted on every fit: `3/2` from term count times Weil, plus slack.
pub const CEILING_SLOPE: f64 = 1.7;

/// Slope at or below which an untwisted fit is flagged consistent.
pub const CONSISTENT_SLOPE: f64 = 1.25;

pub fn fit_slope(q: u32, values: &[(usize, f64)]) -> (Vec<usize>, Option<(f64, f64)>) {
    let pts: Vec<(f64, f64)> = values
        .iter()
        .filter(|(_, v)| *v > ZERO_TOL)
        .map(|&(t, v)| (t as f64, v.ln() / (q as f64).ln()))
        .collect();
    let used: Vec<usize> = values
        .iter()
        .filter(|(_, v)| *v > ZERO_TOL)
        .map(|&(t, _)| t)
        .collect();
    if pts.len() < 3 {
        return (used, None);
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    (used, Some((slope, my - slope * mx)))
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub revision: String,
    pub records: Vec<SweepRecord>,
    pub fits: Vec<SlopeFit>,
    /// Cumulative sums equal the running totals of the exact-window sums.
    pub window_identity: bool,
    /// Every record has `|sum| <= ceiling`.
    pub weil_ok: bool,
    /// Every fitted slope is `<= CEILING_SLOPE`.
    pub slope_ok: bool,
    /// Indices of records re-evaluated for the determinism check.
    pub resampled: Vec<usize>,
    pub reproducible: bool,
}

impl SweepReport {
    pub fn ok(&self) -> bool {
        self.window_identity && self.weil_ok && self.slope_ok && self.reproducible
    }

    pub fn csv_rows(&self, window: Window) -> Vec<CsvRow> {
        let c = &self.config;
        self.records
            .iter()
            .filter(|r| r.window == window)
            .map(|r| CsvRow {
                q: c.q,
                g: c.g.clone(),
                delta: c.delta.clone(),
                alpha: c.alpha.clone(),
                a_num: c.a_num.clone(),
                a_gpow: c.a_gpow,
                b_num: c.b_num.clone(),
                b_gpow: c.b_gpow,
                variant: r.variant,
                t: r.t,
                re: r.re,
                im: r.im,
                modulus: r.modulus,
                n_terms: r.n_terms,
                seconds: r.seconds,
            })
            .collect()
    }

    /// Appends `exact.csv` and `cumulative.csv` (header written when the
    /// file is new) and writes `manifest.json`, all under `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for w in [Window::Exact, Window::Cumulative] {
            let path = dir.join(format!("{w}.csv"));
            let fresh = !path.exists();
            let file = std::fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)?;
            let mut out = csv::WriterBuilder::new()
                .has_headers(fresh)
                .from_writer(file);
            for row in self.csv_rows(w) {
                out.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
            }
            out.flush()?;
        }
        std::fs::write(
            dir.join("manifest.json"),
            serde_json::to_string_pretty(self)?,
        )?;
        Ok(())
    }
}

/// Reads the rows of a CSV file written by [`SweepReport::write`].
pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    rd.deserialize()
        .map(|r| r.map_err(|e| Error::Io(e.to_string())))
        .collect()
}

fn record(p: &TlsParams, window: Window, budget: u128) -> Result<SweepRecord> {
    let t0 = Instant::now();
    let v = tls_evaluate(p, window, budget)?;
    let z = v.value.to_complex();
    Ok(SweepRecord {
        params_hash: p.hash(),
        variant: p.variant,
        window,
        t: p.t,
        re: z.re,
        im: z.im,
        modulus: z.norm(),
        n_terms: v.n_terms,
        abs_sum: v.abs_sum,
        ceiling: v.ceiling,
        seconds: t0.elapsed().as_secs_f64(),
        revision: crate::REVISION.to_string(),
        value: v.value,
    })
}

/// Evaluates every `(variant, window, T)` with `T = 0..=t_max`, fits slopes,
/// checks the window identity and the Weil ceiling, and re-evaluates a
/// seeded 5% sample of the records.
pub fn sweep(config: &SweepConfig) -> Result<SweepReport> {
    if config.t_max < 2 {
        return Err(Error::Invalid(
            "a sweep needs at least 3 values of T".into(),
        ));
    }
    let field = Fq::new(config.q)?;
    let mut records = Vec::new();
    let mut fits = Vec::new();
    let mut window_identity = true;
    for &variant in &config.variants {
        let base = config.params(variant)?;
        let mut running = Cyclotomic::zero(field.p());
        for t in 0..=config.t_max {
            let p = base.with_t(t);
            let exact = record(&p, Window::Exact, config.budget)?;
            let cumul = record(&p, Window::Cumulative, config.budget)?;
            running += &exact.value;
            window_identity &= running == cumul.value;
            records.push(exact);
            records.push(cumul);
        }
        for window in [Window::Exact, Window::Cumulative] {
            let vals: Vec<(usize, f64)> = records
                .iter()
                .filter(|r| r.variant == variant && r.window == window)
                .map(|r| (r.t, r.modulus))
                .collect();
            let (points, fit) = fit_slope(field.q(), &vals);
            fits.push(SlopeFit {
                variant,
                window,
                points,
                slope: fit.map(|f| f.0),
                intercept: fit.map(|f| f.1),
                status: if fit.is_some() {
                    "ok"
                } else {
                    "insufficient signal"
                }
                .into(),
                consistent: (base.is_untwisted() && fit.is_some())
                    .then(|| fit.unwrap().0 <= CONSISTENT_SLOPE),
            });
        }
    }
    let weil_ok = records.iter().all(|r| r.modulus <= r.ceiling + 1e-9);
    let slope_ok = fits
        .iter()
        .all(|f| f.slope.is_none_or(|s| s <= CEILING_SLOPE));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let k = records.len().div_ceil(20);
    let mut resampled = sample(&mut rng, records.len(), k).into_vec();
    resampled.sort_unstable();
    let mut reproducible = true;
    for &i in &resampled {
        let r = &records[i];
        let p = config.params(r.variant)?.with_t(r.t);
        reproducible &= p.hash() == r.params_hash
            && tls_evaluate(&p, r.window, config.budget)?.value == r.value;
    }
    Ok(SweepReport {
        config: config.clone(),
        revision: crate::REVISION.to_string(),
        records,
        fits,
        window_identity,
        weil_ok,
        slope_ok,
        resampled,
        reproducible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: &str, delta: &str, alpha: &str, t: usize) -> TlsParams {
        let f = Fq::new(3).unwrap();
        let p = |s: &str| Poly::parse(&f, s).unwrap();
        TlsParams::new(
            p(g),
            p(delta),
            p(alpha),
            GFraction::new(p("1"), 0),
            GFraction::new(p("1"), 0),
            t,
            KernelVariant::Finite,
        )
        .unwrap()
    }

    #[test]
    fn t_zero_is_the_twist_at_one() {
        // r = 1: psi_{g^2}(alpha) Kl_1 = psi(alpha / g^2)
        let p = params("t", "1", "2t+1", 0);
        let v = tls_sum(&p, u128::MAX).unwrap();
        let g2 = Poly::parse(p.field(), "t^2").unwrap();
        let k = PsiMod::new(&g2, 2).unwrap().exponent(&p.alpha) as i64;
        assert_eq!(v, Cyclotomic::one(3).rotate(k).to_exact());
    }

    #[test]
    fn delta_above_t_gives_empty_sum() {
        let p = params("t", "t^3+2", "1", 2);
        let v = tls_evaluate(&p, Window::Exact, u128::MAX).unwrap();
        assert_eq!(v.n_terms, 0);
        assert!(v.value.is_zero());
    }

    #[test]
    fn delta_coprime_to_g_enforced() {
        let f = Fq::new(3).unwrap();
        let p = |s: &str| Poly::parse(&f, s).unwrap();
        let one = GFraction::new(p("1"), 0);
        assert!(TlsParams::new(
            p("t"),
            p("t^2"),
            p("0"),
            one.clone(),
            one,
            1,
            KernelVariant::Finite
        )
        .is_err());
    }

    #[test]
    fn slope_fit_recovers_a_line() {
        let vals: Vec<(usize, f64)> = (0..5)
            .map(|t| (t, 3f64.powf(1.5 * t as f64 + 0.5)))
            .collect();
        let (_, fit) = fit_slope(3, &vals);
        let (s, c) = fit.unwrap();
        assert!((s - 1.5).abs() < 1e-12 && (c - 0.5).abs() < 1e-12);
        let (pts, fit) = fit_slope(3, &[(0, 1.0), (1, 0.0), (2, 4.0), (3, 0.0)]);
        assert_eq!(pts, vec![0, 2]);
        assert!(fit.is_none());
    }

    #[test]
    fn hash_is_stable_and_parameter_sensitive() {
        let a = params("t", "1", "0", 2);
        assert_eq!(a.hash(), params("t", "1", "0", 2).hash());
        assert_ne!(a.hash(), a.with_t(3).hash());
        assert_eq!(a.hash().len(), 16);
    }
}
