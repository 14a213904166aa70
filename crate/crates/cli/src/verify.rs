//! Consistency checks runnable from the command line.

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;
use serde::{Deserialize, Serialize};
use smtrace::genus::GenusCharSpec;
use smtrace::modfn::ModFuncExpr;
use smtrace::qseries::{eisenstein_e4, euler_product, QSeries};
use smtrace::traces::{generating_series, index_supported, trace_positive, trace_positive_lattice, TraceContext};
use smtrace::Result;

use crate::Global;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    /// The J series against theta_1(z) E_4(4z) / eta(4z)^6.
    ZagierG,
    /// Negative square traces of J: 1 at m = 1, then 0.
    Prop43,
    /// Form-side and lattice-side positive traces on random (D, N).
    DualPath,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub case: Case,
    pub pass: bool,
    pub checked: usize,
    pub mismatches: Vec<String>,
}

/// `q^{-1} theta_1(z) E_4(4z) prod (1 - q^{4n})^{-6}` through `q^max`.
pub fn zagier_g(max: i64) -> QSeries {
    let p = max + 2;
    let mut theta1 = QSeries::constant(Rational::from(1), p);
    let mut n = 1i64;
    while n * n < p {
        theta1.add_term(n * n, Rational::from(if n % 2 == 0 { 2 } else { -2 }));
        n += 1;
    }
    let e4 = eisenstein_e4(p).v_op(4).truncate(p);
    theta1.mul(&e4).mul(&euler_product(4, -6, p)).shift(-1).truncate(max + 1)
}

fn j_context(g: &Global, delta: i64) -> Result<TraceContext> {
    let spec = if delta == 1 { GenusCharSpec::trivial(1) } else { GenusCharSpec::with_default_root(delta, 1)? };
    TraceContext::new(ModFuncExpr::builtin("builtin:J", None)?, spec, g.trace_config()?)
}

pub fn run(case: Case, g: &Global, max: u64, max_m: u64, samples: usize) -> Result<VerifyReport> {
    let mut mismatches = Vec::new();
    let mut checked = 0;
    match case {
        Case::ZagierG => {
            let ours = generating_series(&j_context(g, 1)?, max)?.series;
            // t(m) = -(coefficient of g) for m > 0; the polar part 2 q^-1 - 4 - g
            let want = QSeries::from_ints(max as i64 + 1, &[(-1, 2), (0, -4)]).sub(&zagier_g(max as i64));
            for n in -1..=max as i64 {
                checked += 1;
                if ours.coeff(n) != want.coeff(n) {
                    mismatches.push(format!("q^{n}: got {}, expected {}", ours.coeff(n), want.coeff(n)));
                }
            }
        }
        Case::Prop43 => {
            let ctx = j_context(g, 1)?;
            for m in 1..=max_m as i64 {
                checked += 1;
                let got = ctx.trace(-m * m)?.value;
                let want = if m == 1 { 1 } else { 0 };
                if got.as_rational().map_or(true, |q| *q != want) {
                    mismatches.push(format!("m={m}: got {got}, expected {want}"));
                }
            }
        }
        Case::DualPath => {
            let cfg = g.trace_config()?;
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            while checked < samples {
                let n: u64 = rng.gen_range(1..=6);
                let d: u64 = rng.gen_range(3..=200);
                if !index_supported(d, n) {
                    continue;
                }
                let f = if [2, 3, 4, 5].contains(&n) {
                    ModFuncExpr::hauptmodul(n)?
                } else {
                    ModFuncExpr::builtin("builtin:J", Some(n))?
                };
                let spec = GenusCharSpec::trivial(n);
                let a = trace_positive(&f, &spec, d, &cfg)?.value;
                let b = trace_positive_lattice(&f, &spec, d, &cfg)?.value;
                checked += 1;
                if a != b {
                    mismatches.push(format!("D={d} N={n}: forms {a}, lattice {b}"));
                }
            }
        }
    }
    Ok(VerifyReport {
        case,
        pass: mismatches.is_empty(),
        checked,
        mismatches,
    })
}
