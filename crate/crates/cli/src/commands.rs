use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use ffcircle::acceptance;
use ffcircle::circle::{
    count_solutions, delta_reconstruct, exp_sum_closed, exp_sum_direct, local_densities,
    near_integer, osc_integral_closed, osc_integral_numeric, singular_series_sum, CGrid, CVector,
    DeltaOptions, OscBranch, SumMethod, SystemParams,
};
use ffcircle::ff::{iter_monic_upto, Fq, IndexedRing, Laurent, Poly};
use ffcircle::graphs::{
    build_graph, certify, lower_bound_experiment, power_second_eigenvalue, CayleyGraph, ProjMat,
    Variant,
};
use ffcircle::io::{parse_elem, split_lambda, InstanceSpec};
use ffcircle::kloosterman::{
    kl_finite, kl_infinity, kl_infinity_bound, kl_infinity_closed, weil_bound,
};
use ffcircle::tlsweep::{sweep, tls_evaluate, KernelVariant, SweepConfig, TlsParams, Window};
use ffcircle::{budget, Error, ExactCyclo, Result, REVISION};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{
    Cli, Command, CountArgs, DensityArgs, ExpsumArgs, GraphCommand, GraphSel, GridSize,
    InstanceArgs, KlCommand, MethodChoice, OscArgs, TlsArgs, TlsCommand, VariantChoice,
};

/// Runs the command; `Ok(false)` means a check failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Kloosterman(k) => kloosterman(&ctx, k),
        Command::Expsum(a) => expsum(&ctx, a),
        Command::Osc(a) => osc(&ctx, a),
        Command::Count(a) => count(&ctx, a),
        Command::Densities(a) => densities(&ctx, a),
        Command::Graph(g) => graph(&ctx, g),
        Command::Tls(t) => tls(&ctx, t),
        Command::Selftest { criteria } => selftest(&ctx, criteria),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn budget(&self) -> u128 {
        self.cli.budget.unwrap_or_else(budget::default_budget)
    }

    fn dir(&self, name: &str) -> Result<PathBuf> {
        let d = self.cli.out.join(name);
        std::fs::create_dir_all(&d)?;
        Ok(d)
    }

    /// Writes `<out>/<name>/manifest.json` and returns the directory.
    fn manifest(&self, name: &str, results: Value) -> Result<PathBuf> {
        let d = self.dir(name)?;
        let m = json!({
            "command": name,
            "revision": REVISION,
            "config": self.cli,
            "budget": self.budget().to_string(),
            "results": results,
        });
        std::fs::write(d.join("manifest.json"), serde_json::to_string_pretty(&m)?)?;
        Ok(d)
    }
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn fmt_c(x: &ExactCyclo) -> String {
    let z = x.to_complex();
    format!("{:.12}{:+.12}i", z.re, z.im)
}

fn poly(f: &std::sync::Arc<Fq>, s: &str) -> Result<Poly> {
    Poly::parse(f, s)
}

fn parse_c(f: &std::sync::Arc<Fq>, s: &str) -> Result<CVector> {
    let parts = split_lambda(s)?;
    Ok(CVector([
        poly(f, &parts[0])?,
        poly(f, &parts[1])?,
        poly(f, &parts[2])?,
        poly(f, &parts[3])?,
    ]))
}

fn instance(a: &InstanceArgs) -> Result<SystemParams> {
    let spec = match &a.instance {
        Some(path) => InstanceSpec::load(path)?,
        None => {
            let f =
                a.f.as_deref()
                    .ok_or_else(|| Error::Invalid("--f or --instance is required".into()))?;
            InstanceSpec {
                q: a.q,
                nu: a.nu.clone(),
                f: f.into(),
                g: a.g.clone(),
                lambda: split_lambda(&a.lambda)?,
            }
        }
    };
    if a.relaxed {
        spec.build_relaxed()
    } else {
        spec.build()
    }
}

fn instance_json(p: &SystemParams) -> Value {
    serde_json::to_value(InstanceSpec::from_params(p)).unwrap_or(Value::Null)
}

fn kloosterman(ctx: &Ctx, k: &KlCommand) -> Result<bool> {
    match k {
        KlCommand::Finite { q, r, m, n } => {
            let f = Fq::new(*q)?;
            let (r, m, n) = (poly(&f, r)?, poly(&f, m)?, poly(&f, n)?);
            if !r.is_monic() {
                return Err(Error::NotMonic(r.to_string()));
            }
            let v = kl_finite(&r, &m, &n)?.to_exact();
            let bound = weil_bound(&r, &m, &n)?;
            let abs = v.to_complex().norm();
            let ok = abs <= bound + 1e-9;
            println!("Kl_{r}({m}, {n}) = {}", fmt_c(&v));
            println!("|Kl| = {abs:.9}");
            println!("weil_bound = {bound:.9}");
            println!("within_bound = {ok}");
            ctx.manifest(
                "kloosterman",
                json!({"value": fmt_c(&v), "abs": abs, "weil_bound": bound, "within_bound": ok}),
            )?;
            Ok(ok)
        }
        KlCommand::Infinity { q, alpha } => {
            let f = Fq::new(*q)?;
            let a = Laurent::parse(&f, alpha)?;
            let closed = kl_infinity_closed(&a)?;
            let direct = kl_infinity(&a)?;
            let bound = kl_infinity_bound(&a)?;
            let ok = closed == direct;
            println!("Kl_inf({alpha}) closed = {}", fmt_c(&closed));
            println!("Kl_inf({alpha}) direct = {}", fmt_c(&direct));
            println!("bound = {bound:.9}");
            println!("match = {ok}");
            ctx.manifest(
                "kloosterman",
                json!({"closed": fmt_c(&closed), "direct": fmt_c(&direct), "bound": bound, "match": ok}),
            )?;
            Ok(ok)
        }
    }
}

#[derive(Serialize)]
struct GridRow {
    instance: String,
    r: String,
    pairs: usize,
    mismatches: usize,
}

#[derive(Serialize)]
struct PointRow {
    instance: String,
    r: String,
    c: String,
    s_direct: String,
    s_closed: String,
    matched: bool,
}

fn expsum(ctx: &Ctx, a: &ExpsumArgs) -> Result<bool> {
    let insts = match a.grid {
        Some(GridSize::Small) => acceptance::exp_sum_instances()?
            .into_iter()
            .take(2)
            .collect(),
        Some(GridSize::Full) => acceptance::exp_sum_instances()?,
        None => vec![instance(&a.inst)?],
    };
    if let (None, Some(c)) = (a.grid, &a.c) {
        let p = &insts[0];
        let f = p.field().clone();
        let r = poly(
            &f,
            a.r.as_deref()
                .ok_or_else(|| Error::Invalid("--c needs --r".into()))?,
        )?;
        let c = parse_c(&f, c)?;
        let d = exp_sum_direct(p, &r, &c, ctx.budget())?.to_exact();
        let s = exp_sum_closed(p, &r, &c)?.to_exact();
        let ok = d == s;
        println!("S_direct = {}", fmt_c(&d));
        println!("S_closed = {}", fmt_c(&s));
        println!("match = {ok}");
        let row = PointRow {
            instance: p.to_string(),
            r: r.to_string(),
            c: c.to_string(),
            s_direct: fmt_c(&d),
            s_closed: fmt_c(&s),
            matched: ok,
        };
        let dir = ctx.manifest("expsum", json!({"instance": instance_json(p), "match": ok}))?;
        write_csv(&dir.join("expsum.csv"), &[row])?;
        return Ok(ok);
    }
    let mut rows = Vec::new();
    for p in &insts {
        let f = p.field().clone();
        let rs: Vec<Poly> = match (&a.r, a.grid) {
            (Some(r), None) => vec![poly(&f, r)?],
            _ => iter_monic_upto(&f, 2).collect(),
        };
        for r in rs {
            let (pairs, bad) = acceptance::exp_sum_compare(p, &r)?;
            rows.push(GridRow {
                instance: p.to_string(),
                r: r.to_string(),
                pairs,
                mismatches: bad,
            });
        }
    }
    let pairs: usize = rows.iter().map(|r| r.pairs).sum();
    let bad: usize = rows.iter().map(|r| r.mismatches).sum();
    println!("instances = {}", insts.len());
    println!("pairs = {pairs}");
    println!("mismatches = {bad}");
    let dir = ctx.manifest(
        "expsum",
        json!({"instances": insts.iter().map(instance_json).collect::<Vec<_>>(), "pairs": pairs, "mismatches": bad}),
    )?;
    write_csv(&dir.join("expsum.csv"), &rows)?;
    Ok(bad == 0)
}

#[derive(Serialize)]
struct OscRow {
    r: String,
    pairs: usize,
    mismatches: usize,
    cases: String,
}

fn osc(ctx: &Ctx, a: &OscArgs) -> Result<bool> {
    let p = instance(&a.inst)?;
    let f = p.field().clone();
    if let Some(c) = &a.c {
        let r = poly(
            &f,
            a.r.as_deref()
                .ok_or_else(|| Error::Invalid("--c needs --r".into()))?,
        )?;
        let c = parse_c(&f, c)?;
        let (branch, closed) = osc_integral_closed(&p, &r, &c, ctx.budget())?;
        let numeric = osc_integral_numeric(&p, &r, &c, None, ctx.budget())?;
        let ok = closed == numeric;
        println!("case = {}", branch.number());
        println!("I_closed = {}", fmt_c(&closed));
        println!("I_numeric = {}", fmt_c(&numeric));
        println!("match = {ok}");
        ctx.manifest(
            "osc",
            json!({"instance": instance_json(&p), "case": branch.number(), "closed": fmt_c(&closed),
                   "numeric": fmt_c(&numeric), "match": ok}),
        )?;
        return Ok(ok);
    }
    let grid = CGrid::new(&f, p.deg_g() + 1);
    let rs: Vec<Poly> = match &a.r {
        Some(r) => vec![poly(&f, r)?],
        None => iter_monic_upto(&f, p.q_exp.max(0) as usize).collect(),
    };
    let mut rows = Vec::new();
    let mut hit: BTreeSet<OscBranch> = BTreeSet::new();
    for r in rs {
        let (pairs, bad, h) = acceptance::osc_compare_r(&p, &r, &grid)?;
        rows.push(OscRow {
            r: r.to_string(),
            pairs,
            mismatches: bad,
            cases: h
                .iter()
                .map(|b| b.number().to_string())
                .collect::<Vec<_>>()
                .join(" "),
        });
        hit.extend(h);
    }
    let bad: usize = rows.iter().map(|r| r.mismatches).sum();
    let cases: Vec<usize> = hit.iter().map(|b| b.number()).collect();
    println!("pairs = {}", rows.iter().map(|r| r.pairs).sum::<usize>());
    println!("mismatches = {bad}");
    println!("cases = {cases:?}");
    let dir = ctx.manifest(
        "osc",
        json!({"instance": instance_json(&p), "mismatches": bad, "cases": cases}),
    )?;
    write_csv(&dir.join("osc.csv"), &rows)?;
    Ok(bad == 0)
}

fn count(ctx: &Ctx, a: &CountArgs) -> Result<bool> {
    let p = instance(&a.inst)?;
    let n = count_solutions(&p, ctx.budget())?;
    println!("count = {n}");
    let methods: Vec<SumMethod> = match a.method {
        MethodChoice::Closed => vec![SumMethod::Closed],
        MethodChoice::Direct => vec![SumMethod::Direct],
        MethodChoice::Both => vec![SumMethod::Closed, SumMethod::Direct],
    };
    let mut ok = true;
    let mut res = serde_json::Map::new();
    for m in methods {
        let name = match m {
            SumMethod::Closed => "closed",
            SumMethod::Direct => "direct",
        };
        let d = delta_reconstruct(
            &p,
            &DeltaOptions {
                method: m,
                budget: ctx.budget(),
            },
        )?;
        let v = near_integer(&d, 1e-6);
        ok &= v == Some(n as i64);
        let shown = v.map_or_else(|| fmt_c(&d), |v| v.to_string());
        println!("delta_{name} = {shown}");
        res.insert(name.into(), json!(shown));
    }
    println!("match = {ok}");
    res.insert("count".into(), json!(n));
    res.insert("match".into(), json!(ok));
    res.insert("instance".into(), instance_json(&p));
    ctx.manifest("count", Value::Object(res))?;
    Ok(ok)
}

#[derive(Serialize)]
struct DensityRow {
    prime: String,
    v: u32,
    k: usize,
    value: f64,
    exact: String,
}

fn densities(ctx: &Ctx, a: &DensityArgs) -> Result<bool> {
    let p = instance(&a.inst)?;
    let dens = local_densities(&p, a.max_deg, a.k_max, ctx.budget())?;
    let mut rows = Vec::new();
    let mut stable = true;
    let mut prod = 1.0f64;
    for d in &dens {
        let last = d.value().to_f64().unwrap_or(f64::NAN);
        prod *= last;
        stable &= d.stable_from.is_some();
        println!(
            "sigma[{}] = {last:.9} (v = {}, k = {}, stable from {})",
            d.prime,
            d.v,
            d.values.len(),
            d.stable_from.map_or("-".into(), |k| k.to_string())
        );
        for (k, x) in d.values.iter().enumerate() {
            rows.push(DensityRow {
                prime: d.prime.to_string(),
                v: d.v,
                k: k + 1,
                value: x.to_f64().unwrap_or(f64::NAN),
                exact: x.to_string(),
            });
        }
    }
    let sum = singular_series_sum(&p, a.sum_deg)?.to_complex();
    let rel = (sum.re - prod).abs() / prod.abs();
    println!("product = {prod:.9}");
    println!("series = {:.9}", sum.re);
    println!("relative_difference = {rel:.3e}");
    println!("all_stable = {stable}");
    let dir = ctx.manifest(
        "densities",
        json!({"instance": instance_json(&p), "product": prod, "series": sum.re,
               "relative_difference": rel, "all_stable": stable}),
    )?;
    write_csv(&dir.join("densities.csv"), &rows)?;
    Ok(stable)
}

#[derive(Serialize, serde::Deserialize)]
struct GraphHeader {
    q: u64,
    g: String,
    nu: String,
    n_vertices: usize,
    generators: Vec<String>,
}

fn load_graph(ctx: &Ctx, sel: &GraphSel) -> Result<CayleyGraph> {
    let (q, g, nu) = match &sel.g {
        Some(g) => (
            sel.q.unwrap_or(3),
            g.clone(),
            sel.nu.clone().unwrap_or_else(|| "-1".into()),
        ),
        None => {
            let path = ctx.cli.out.join("graph").join("header.json");
            let text = std::fs::read_to_string(&path).map_err(|e| {
                Error::Io(format!(
                    "{}: {e} (run `graph build` first or pass --g)",
                    path.display()
                ))
            })?;
            let h: GraphHeader = serde_json::from_str(&text)?;
            (h.q, h.g, h.nu)
        }
    };
    let f = Fq::new(q)?;
    build_graph(&poly(&f, &g)?, parse_elem(&f, &nu)?, sel.max_vertices)
}

fn parse_matrix(ring: &IndexedRing, s: &str) -> Result<ProjMat> {
    let f = ring.field();
    let one = Poly::one(f);
    let zero = Poly::zero(f);
    match s.trim() {
        "I" => Ok(ProjMat::from_polys(ring, [&one, &zero, &zero, &one])),
        "W" => Ok(ProjMat::from_polys(ring, [&one, &zero, &zero, &-&one])),
        m => {
            let parts: Vec<&str> = m.split(';').collect();
            if parts.len() != 4 {
                return Err(Error::Parse {
                    column: 0,
                    message: format!("matrix {m:?}: expected I, W or a;b;c;d"),
                });
            }
            let e: Vec<Poly> = parts
                .iter()
                .map(|p| poly(f, p.trim()))
                .collect::<Result<_>>()?;
            Ok(ProjMat::from_polys(ring, [&e[0], &e[1], &e[2], &e[3]]))
        }
    }
}

fn graph(ctx: &Ctx, cmd: &GraphCommand) -> Result<bool> {
    match cmd {
        GraphCommand::Build(sel) => {
            let g = load_graph(ctx, sel)?;
            let ring = &g.ring;
            let header = GraphHeader {
                q: g.q() as u64,
                g: g.modulus().to_string(),
                nu: ring.field().format_elem(g.nu),
                n_vertices: g.len(),
                generators: g.gens.iter().map(|m| m.display(ring).to_string()).collect(),
            };
            let ok = g.check_symmetric();
            println!("vertices = {}", g.len());
            println!("degree = {}", g.degree());
            println!("bipartite = {}", g.is_bipartite());
            println!(
                "expected_vertices = {}",
                g.pgl_order().map_or("-".into(), |o| o.to_string())
            );
            println!("symmetric_regular = {ok}");
            let dir = ctx.manifest("graph", json!({"header": &header, "symmetric_regular": ok}))?;
            std::fs::write(
                dir.join("header.json"),
                serde_json::to_string_pretty(&header)?,
            )?;
            let mut out = std::io::BufWriter::new(std::fs::File::create(dir.join("edges.txt"))?);
            g.write_edges(&mut out)?;
            Ok(ok)
        }
        GraphCommand::Diameter(sel) => {
            let g = load_graph(ctx, sel)?;
            let d = g.diameter();
            let logq = (g.len() as f64).ln() / (g.q() as f64).ln();
            let ok = d as f64 <= 2.0 * logq + 6.0;
            println!("diameter = {d}");
            println!("four_thirds_log = {:.4}", 4.0 / 3.0 * logq);
            println!("two_log = {:.4}", 2.0 * logq);
            println!("within_upper = {ok}");
            ctx.manifest(
                "graph-diameter",
                json!({"diameter": d, "vertices": g.len(), "within_upper": ok}),
            )?;
            Ok(ok)
        }
        GraphCommand::Spectrum { sel, max_dense } => {
            let g = load_graph(ctx, sel)?;
            let bound = 2.0 * (g.q() as f64).sqrt();
            let (second, method, defect) = if g.len() <= *max_dense {
                let c = certify(&g, *max_dense)?;
                (
                    c.second_eigenvalue.unwrap_or(f64::NAN),
                    "dense",
                    c.pairing_defect,
                )
            } else {
                let (s, _) = power_second_eigenvalue(&g, 1e-8, 1_000_000, ctx.cli.seed)?;
                (s, "power", None)
            };
            let ok = second <= bound + 1e-6;
            println!("second_eigenvalue = {second:.9}");
            println!("ramanujan_bound = {bound:.9}");
            println!("method = {method}");
            if let Some(d) = defect {
                println!("pairing_defect = {d:.3e}");
            }
            println!("ramanujan = {ok}");
            ctx.manifest(
                "graph-spectrum",
                json!({"second_eigenvalue": second, "bound": bound, "method": method, "ramanujan": ok}),
            )?;
            Ok(ok)
        }
        GraphCommand::Distance { sel, from, to } => {
            let g = load_graph(ctx, sel)?;
            let a = parse_matrix(&g.ring, from)?;
            let b = parse_matrix(&g.ring, to)?;
            let (Some(ia), Some(ib)) = (g.index_of(&a)?, g.index_of(&b)?) else {
                println!("distance = none (not in the component of the identity)");
                ctx.manifest(
                    "graph-distance",
                    json!({"from": from, "to": to, "distance": null}),
                )?;
                return Ok(false);
            };
            let d = g.distance(ia, ib)?;
            println!("distance = {d}");
            println!("even = {}", d % 2 == 0);
            ctx.manifest(
                "graph-distance",
                json!({"from": from, "to": to, "distance": d}),
            )?;
            Ok(true)
        }
        GraphCommand::Lowerbound { sel, variant } => {
            let (q, g, nu) = match &sel.g {
                Some(g) => (
                    sel.q.unwrap_or(3),
                    g.clone(),
                    sel.nu.clone().unwrap_or_else(|| "-1".into()),
                ),
                None => {
                    let h = load_graph(ctx, sel)?;
                    let f = h.ring.field();
                    (f.q() as u64, h.modulus().to_string(), f.format_elem(h.nu))
                }
            };
            let f = Fq::new(q)?;
            let v = match variant {
                VariantChoice::Bipartite => Variant::Bipartite,
                VariantChoice::NonBipartite => Variant::NonBipartite,
            };
            let rep =
                lower_bound_experiment(&poly(&f, &g)?, parse_elem(&f, &nu)?, v, sel.max_vertices)?;
            println!("modulus = {}", rep.modulus);
            println!("vertices = {}", rep.vertices);
            for t in &rep.targets {
                println!(
                    "dist(I, {}) = {}",
                    t.name,
                    t.distance.map_or("none".into(), |d| d.to_string())
                );
            }
            println!("h = {}", rep.h.map_or("none".into(), |h| h.to_string()));
            println!("diameter = {}", rep.diameter);
            println!("four_thirds_log = {:.4}", rep.four_thirds_log);
            println!("ok = {}", rep.ok());
            ctx.manifest("graph-lowerbound", serde_json::to_value(&rep)?)?;
            Ok(rep.ok())
        }
    }
}

fn tls_config(ctx: &Ctx, p: &TlsArgs) -> SweepConfig {
    SweepConfig {
        q: p.q,
        g: p.g.clone(),
        delta: p.delta.clone(),
        alpha: p.alpha.clone(),
        a_num: p.a.clone(),
        a_gpow: p.a_gpow,
        b_num: p.b.clone(),
        b_gpow: p.b_gpow,
        variants: vec![KernelVariant::Finite],
        t_max: 0,
        budget: ctx.budget(),
        seed: ctx.cli.seed,
    }
}

fn parse_window(s: &str) -> Result<Window> {
    match s {
        "exact" => Ok(Window::Exact),
        "cumulative" => Ok(Window::Cumulative),
        _ => Err(Error::Invalid(format!("unknown window {s:?}"))),
    }
}

fn tls(ctx: &Ctx, cmd: &TlsCommand) -> Result<bool> {
    match cmd {
        TlsCommand::Sum {
            p,
            t,
            variant,
            window,
        } => {
            let cfg = tls_config(ctx, p);
            let v: KernelVariant = variant.parse()?;
            let params: TlsParams = cfg.params(v)?.with_t(*t);
            let w = parse_window(window)?;
            let val = tls_evaluate(&params, w, ctx.budget())?;
            let z = val.value.to_complex();
            let ok = z.norm() <= val.ceiling * (1.0 + 1e-12);
            println!("value = {}", fmt_c(&val.value));
            println!("modulus = {:.9}", z.norm());
            println!("n_terms = {}", val.n_terms);
            println!("abs_sum = {:.9}", val.abs_sum);
            println!("ceiling = {:.9}", val.ceiling);
            println!("params_hash = {}", params.hash());
            println!("within_ceiling = {ok}");
            ctx.manifest(
                "tls-sum",
                json!({"canonical": params.canonical(), "hash": params.hash(), "value": fmt_c(&val.value),
                       "n_terms": val.n_terms, "ceiling": val.ceiling, "within_ceiling": ok}),
            )?;
            Ok(ok)
        }
        TlsCommand::Sweep { p, t_max, variants } => {
            let mut cfg = tls_config(ctx, p);
            cfg.t_max = *t_max;
            cfg.variants = variants
                .split(',')
                .map(|s| s.trim().parse::<KernelVariant>())
                .collect::<Result<_>>()?;
            let rep = sweep(&cfg)?;
            let dir = ctx.dir("tls-sweep")?;
            rep.write(&dir)?;
            for f in &rep.fits {
                println!(
                    "{} {}: slope {} ({}){}",
                    f.variant,
                    f.window,
                    f.slope.map_or("-".into(), |s| format!("{s:.4}")),
                    f.status,
                    match f.consistent {
                        Some(true) => ", consistent",
                        Some(false) => ", not consistent",
                        None => "",
                    }
                );
            }
            println!("window_identity = {}", rep.window_identity);
            println!("weil_ok = {}", rep.weil_ok);
            println!("slope_ok = {}", rep.slope_ok);
            println!("reproducible = {}", rep.reproducible);
            println!("output = {}", dir.display());
            Ok(rep.ok())
        }
    }
}

fn selftest(ctx: &Ctx, criteria: &[u8]) -> Result<bool> {
    let which: Vec<u8> = if criteria.is_empty() {
        (1..=8).collect()
    } else {
        criteria.to_vec()
    };
    let mut reports = Vec::new();
    for n in which {
        let rep = acceptance::run(n);
        println!("{rep}");
        reports.push(rep);
    }
    let ok = reports.iter().all(|r| r.passed);
    ctx.manifest("selftest", json!({"reports": reports, "all_passed": ok}))?;
    Ok(ok)
}
