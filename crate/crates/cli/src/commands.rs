//! One function per subcommand.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use smtrace::arith::numtheory::progression_primes;
use smtrace::congruences::{scan_congruence, CongruenceReport, ScanParams};
use smtrace::cusps::{cusp_reps, Cusp};
use smtrace::forms::gamma0_class_reps;
use smtrace::genus::GenusCharSpec;
use smtrace::modfn::ModFuncExpr;
use smtrace::qseries::QSeries;
use smtrace::serde_rational::render;
use smtrace::traces::{cache_dir, generating_series, TraceContext, TraceTable};
use smtrace::{Error, Result};

use crate::output::Rendered;
use crate::{verify, Cli, Command, Failure, FuncArgs, Global};

pub fn run(cli: &Cli) -> std::result::Result<u8, Failure> {
    let g = &cli.global;
    match &cli.cmd {
        Command::Forms { disc, level } => forms(*disc, *level)?.emit(g)?,
        Command::Cusps { level } => cusps(*level)?.emit(g)?,
        Command::Trace { func, index, from, to } => {
            let indices: Vec<i64> = match (index, from, to) {
                (Some(i), _, _) => vec![*i],
                (None, Some(a), Some(b)) if a <= b => (*a..=*b).collect(),
                _ => return Err(Error::InvalidParameter("give --index or --from/--to with from <= to".into()).into()),
            };
            trace(g, func, &indices)?.emit(g)?
        }
        Command::Series { func, max } => series(g, func, *max)?.emit(g)?,
        Command::Sieve { t, input, r } => sieve(*t, input, *r)?.emit(g)?,
        Command::CongruenceScan {
            func,
            p,
            nu,
            t,
            m_exp,
            r_count,
            r_list,
            n_max,
        } => {
            let params = ScanParams {
                p: *p,
                nu: *nu,
                t: *t,
                m_exp: *m_exp,
                n_max: *n_max,
            };
            let (out, any) = congruence_scan(g, func, &params, *r_count, r_list)?;
            out.emit(g)?;
            return Ok(if any { 0 } else { 1 });
        }
        Command::Verify {
            case,
            max,
            max_m,
            samples,
        } => {
            let report = verify::run(*case, g, *max, *max_m, *samples)?;
            let pass = report.pass;
            let rows = report.mismatches.iter().map(|m| vec![m.clone()]).collect();
            Rendered::new(&report, &["mismatch"], rows).emit(g)?;
            if !pass {
                return Err(Failure::Verification(format!("{} mismatches", report.mismatches.len())));
            }
        }
    }
    Ok(0)
}

pub fn load_function(fa: &FuncArgs) -> Result<ModFuncExpr> {
    let text = match fa.f.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))?,
        None => fa.f.clone(),
    };
    let text = text.trim();
    if text.starts_with("builtin:") {
        return ModFuncExpr::builtin(text, fa.level);
    }
    let f = ModFuncExpr::parse(text)?;
    match fa.level {
        Some(l) if l != f.level() => f.at_level(l),
        _ => Ok(f),
    }
}

pub fn context(g: &Global, fa: &FuncArgs) -> Result<TraceContext> {
    let f = load_function(fa)?;
    let level = f.level();
    let spec = match (fa.delta, fa.r) {
        (_, Some(r)) => GenusCharSpec::new(fa.delta, level, r)?,
        (1, None) => GenusCharSpec::trivial(level),
        (d, None) => GenusCharSpec::with_default_root(d, level)?,
    };
    TraceContext::new(f, spec, g.trace_config()?)
}

#[derive(Serialize, Deserialize)]
pub struct FormRow {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub stab: u32,
    pub z_re: String,
    pub z_im: f64,
}

#[derive(Serialize, Deserialize)]
pub struct FormsDoc {
    #[serde(rename = "D")]
    pub d: u64,
    #[serde(rename = "N")]
    pub n: u64,
    pub classes: Vec<FormRow>,
}

fn forms(d: u64, n: u64) -> Result<Rendered> {
    if n == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    let classes: Vec<FormRow> = gamma0_class_reps(d, n)?
        .into_iter()
        .map(|c| FormRow {
            a: c.form.a,
            b: c.form.b,
            c: c.form.c,
            stab: c.stab_order,
            z_re: render(&rug::Rational::from((-c.form.b, 2 * c.form.a))),
            z_im: c.form.cm_imag_f64(),
        })
        .collect();
    let rows = classes
        .iter()
        .map(|r| vec![r.a.to_string(), r.b.to_string(), r.c.to_string(), r.stab.to_string(), r.z_re.clone(), r.z_im.to_string()])
        .collect();
    Ok(Rendered::new(&FormsDoc { d, n, classes }, &["a", "b", "c", "stab", "z_re", "z_im"], rows))
}

#[derive(Serialize, Deserialize)]
pub struct CuspRow {
    pub label: String,
    #[serde(flatten)]
    pub cusp: Cusp,
}

#[derive(Serialize, Deserialize)]
pub struct CuspsDoc {
    #[serde(rename = "N")]
    pub n: u64,
    pub cusps: Vec<CuspRow>,
}

fn cusps(n: u64) -> Result<Rendered> {
    if n == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    let cusps: Vec<CuspRow> = cusp_reps(n).into_iter().map(|c| CuspRow { label: c.label(), cusp: c }).collect();
    let rows = cusps
        .iter()
        .map(|c| {
            let s = &c.cusp.sigma;
            vec![
                c.label.clone(),
                render(&c.cusp.width),
                render(&c.cusp.beta),
                render(&c.cusp.eps),
                format!("({} {}; {} {})", s.a, s.b, s.c, s.d),
            ]
        })
        .collect();
    Ok(Rendered::new(&CuspsDoc { n, cusps }, &["cusp", "width", "beta", "eps", "sigma"], rows))
}

/// The cached table for `ctx`, filled at `indices`; the cache is best effort.
pub fn filled_table(ctx: &TraceContext, indices: &[i64]) -> Result<TraceTable> {
    let dir = cache_dir();
    let mut table = match TraceTable::load(ctx, &dir) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("warning: ignoring cache: {e}");
            TraceTable::empty(ctx)
        }
    };
    let before = table.entries.len();
    let res = table.fill(ctx, indices);
    if table.entries.len() != before {
        if let Err(e) = table.save(&dir) {
            eprintln!("warning: cache not written: {e}");
        }
    }
    res.map(|_| table)
}

fn value_rows(table: &TraceTable) -> Vec<Vec<String>> {
    table.entries.iter().map(|e| vec![e.m.to_string(), render(&e.value), format!("{:e}", e.err)]).collect()
}

fn trace(g: &Global, fa: &FuncArgs, indices: &[i64]) -> Result<Rendered> {
    let ctx = context(g, fa)?;
    let mut table = filled_table(&ctx, indices)?;
    table.entries.retain(|e| indices.contains(&e.m));
    if ctx.spec.delta != 1 {
        eprintln!("note: values are t / sqrt({})", ctx.spec.delta);
    }
    let rows = value_rows(&table);
    Ok(Rendered::new(&table, &["m", "value", "err"], rows))
}

#[derive(Serialize, Deserialize)]
pub struct SeriesDoc {
    pub f_id: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: i64,
    pub r: u64,
    /// The series is `sqrt(radicand) * series + irrational`.
    pub radicand: i64,
    pub series: QSeries,
    pub irrational: BTreeMap<i64, String>,
}

fn series_rows(s: &QSeries) -> Vec<Vec<String>> {
    s.terms().map(|(n, c)| vec![n.to_string(), render(c)]).collect()
}

fn series(g: &Global, fa: &FuncArgs, max: u64) -> Result<Rendered> {
    let ctx = context(g, fa)?;
    let gs = generating_series(&ctx, max)?;
    let doc = SeriesDoc {
        f_id: ctx.f.f_id(),
        n: ctx.spec.level,
        delta: ctx.spec.delta,
        r: ctx.spec.root,
        radicand: gs.radicand,
        irrational: gs.irrational.iter().map(|(m, c)| (*m, c.to_string())).collect(),
        series: gs.series,
    };
    let rows = series_rows(&doc.series);
    Ok(Rendered::new(&doc, &["n", "coeff"], rows))
}

fn read_series(input: &str) -> Result<QSeries> {
    let text = if input == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Error::Io(e.to_string()))?
    } else {
        std::fs::read_to_string(input).map_err(|e| Error::Io(format!("{input}: {e}")))?
    };
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(inner) = v.get_mut("series") {
        v = inner.take();
    }
    serde_json::from_value(v).map_err(|e| Error::Parse(e.to_string()))
}

fn sieve(t: u64, input: &str, r: Option<u64>) -> Result<Rendered> {
    let s = read_series(input)?;
    if t == 1 {
        eprintln!("warning: t = 1 keeps no coefficients");
    }
    let mut out = s.sieve_minus(t)?;
    if let Some(r) = r {
        if r == 0 {
            return Err(Error::InvalidParameter("r must be positive".into()));
        }
        out = out.u_op(r);
    }
    let rows = series_rows(&out);
    Ok(Rendered::new(&out, &["n", "coeff"], rows))
}

#[derive(Serialize, Deserialize)]
pub struct ScanDoc {
    pub params: ScanParamsDoc,
    pub reports: Vec<CongruenceReport>,
}

#[derive(Serialize, Deserialize)]
pub struct ScanParamsDoc {
    pub f_id: String,
    #[serde(rename = "N")]
    pub n: u64,
    pub delta: i64,
    pub root: u64,
    #[serde(flatten)]
    pub scan: ScanParams,
    pub r_candidates: Vec<u64>,
}

fn congruence_scan(
    g: &Global,
    fa: &FuncArgs,
    params: &ScanParams,
    r_count: usize,
    r_list: &[u64],
) -> Result<(Rendered, bool)> {
    let ctx = context(g, fa)?;
    params.validate(ctx.level())?;
    let rs: Vec<u64> = if r_list.is_empty() {
        progression_primes(params.progression_modulus(ctx.level()), 0).take(r_count).collect()
    } else {
        r_list.to_vec()
    };
    let indices = smtrace::congruences::scan_indices(params, ctx.level(), &rs);
    let mut table = filled_table(&ctx, &indices)?;
    let reports = scan_congruence(&ctx, &mut table, params, &rs)?;
    let any = reports.iter().any(|r| r.verdict);
    let mut rows = Vec::new();
    for rep in &reports {
        for c in &rep.checked {
            rows.push(vec![
                rep.r.to_string(),
                c.n.to_string(),
                c.index.to_string(),
                render(&c.value),
                c.residue.clone(),
                rep.verdict.to_string(),
            ]);
        }
    }
    let doc = ScanDoc {
        params: ScanParamsDoc {
            f_id: ctx.f.f_id(),
            n: ctx.level(),
            delta: ctx.spec.delta,
            root: ctx.spec.root,
            scan: params.clone(),
            r_candidates: rs,
        },
        reports,
    };
    Ok((Rendered::new(&doc, &["r", "n", "index", "value", "residue", "verdict"], rows), any))
}
