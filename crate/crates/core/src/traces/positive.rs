//! Traces of positive index: sums of `chi(Q) f(z_Q) / |Gamma_0(N)_Q|` over classes.
//! For `f` with rational coefficients these lie in `sqrt(Delta) Q`.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::numtheory::{is_square_mod, isqrt};
use crate::arith::{recognize_rational, CertifiedComplex};
use crate::error::{Error, Result};
use crate::forms::{automorphisms, check_level_disc, gamma0_class_reps, gamma0_coset_reps, sl2_class_reps, QForm};
use crate::genus::{chi, chi_lattice, GenusCharSpec};
use crate::lattice::LatticeVec;
use crate::modfn::{eval, eval_cm, ModFuncExpr};

/// Recognized traces have denominators dividing the stabilizer orders.
pub const MAX_DEN: u64 = 6;

/// A recognized value must also be certified to this absolute error.
pub const ERR_TARGET: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Working bits beyond the magnitude of the largest term.
    pub bits: u32,
    /// Cap for `bits` in the doubling loop.
    pub cap: u32,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig { bits: 128, cap: 4096 }
    }
}

impl TraceConfig {
    pub fn new(bits: u32, cap: u32) -> Result<Self> {
        if bits < 64 || cap < bits {
            return Err(Error::InvalidParameter(format!("need 64 <= bits <= cap, got {bits}/{cap}")));
        }
        Ok(TraceConfig { bits, cap })
    }
}

/// The trace is `value * sqrt(radicand)`, with `radicand = Delta`.
#[derive(Clone, Debug, PartialEq)]
pub struct PositiveTrace {
    pub value: Rational,
    pub radicand: i64,
    pub err: f64,
    /// Total working precision of the successful pass.
    pub bits: u32,
}

impl PositiveTrace {
    pub fn zero(radicand: i64) -> Self {
        PositiveTrace {
            value: Rational::new(),
            radicand,
            err: 0.0,
            bits: 0,
        }
    }
}

/// Whether `Q_{D,N}` can be nonempty: `-D` a discriminant and a square mod `4N`.
pub fn index_supported(d: u64, level: u64) -> bool {
    (d % 4 == 0 || d % 4 == 3) && is_square_mod(-(d as i64), 4 * level)
}

struct Term {
    form: QForm,
    weight: Rational,
}

fn check_level(f: &ModFuncExpr, spec: &GenusCharSpec) -> Result<()> {
    if f.level() != spec.level {
        return Err(Error::InvalidParameter(format!(
            "function level {} differs from character level {}",
            f.level(),
            spec.level
        )));
    }
    Ok(())
}

/// Bits needed for the integer part of the largest term, from a cheap probe.
fn magnitude_bits(terms: &[Term], probe: &dyn Fn(&QForm, u32) -> Result<CertifiedComplex>) -> u32 {
    let mut mag = 0f64;
    for t in terms {
        let y = t.form.cm_imag_f64();
        let guess = 64 + (10.0 * y) as u32;
        let m = match probe(&t.form, guess) {
            Ok(v) if v.log2_upper().is_finite() => v.log2_upper(),
            _ => 10.0 * y,
        };
        mag = mag.max(m);
    }
    mag.max(0.0).ceil() as u32
}

/// `x / sqrt(d)`, with `sqrt(d) = i sqrt(-d)` for `d < 0`.
fn div_sqrt(x: &CertifiedComplex, d: i64) -> Result<CertifiedComplex> {
    if d == 1 {
        return Ok(x.clone());
    }
    let r = CertifiedComplex::sqrt_int(x.prec(), &Integer::from(d.unsigned_abs()));
    let y = x.div(&r)?;
    Ok(if d < 0 { y.mul_i().neg() } else { y })
}

fn weighted_sum(
    terms: &[Term],
    radicand: i64,
    cfg: &TraceConfig,
    context: &str,
    eval_at: &dyn Fn(&QForm, u32) -> Result<CertifiedComplex>,
) -> Result<PositiveTrace> {
    if terms.is_empty() {
        return Ok(PositiveTrace::zero(radicand));
    }
    let mag = magnitude_bits(terms, eval_at);
    let mut extra = cfg.bits;
    loop {
        let prec = extra + mag + 32;
        let mut acc = CertifiedComplex::zero(prec);
        for t in terms {
            acc = acc.add(&eval_at(&t.form, prec)?.mul_rational(&t.weight));
        }
        let acc = div_sqrt(&acc, radicand)?;
        if acc.err_f64() < ERR_TARGET {
            if let Ok(value) = recognize_rational(&acc, MAX_DEN) {
                return Ok(PositiveTrace {
                    value,
                    radicand,
                    err: acc.err_f64(),
                    bits: prec,
                });
            }
        }
        if extra >= cfg.cap {
            return Err(Error::PrecisionExhausted {
                cap: cfg.cap,
                context: Some(context.to_string()),
            });
        }
        extra = (2 * extra).min(cfg.cap);
    }
}

/// `t_f(chi; D)` from the `Gamma_0(N)`-classes of `Q_{D,N}`.
pub fn trace_positive(f: &ModFuncExpr, spec: &GenusCharSpec, d: u64, cfg: &TraceConfig) -> Result<PositiveTrace> {
    check_level(f, spec)?;
    let mut terms = Vec::new();
    for c in gamma0_class_reps(d, spec.level)? {
        let x = chi(spec, &c.form)?;
        if x != 0 {
            terms.push(Term {
                form: c.form,
                weight: Rational::from((x, c.stab_order)),
            });
        }
    }
    weighted_sum(&terms, spec.delta, cfg, &format!("D={d}"), &|q, prec| eval_cm(f, q, prec))
}

/// The same trace from lattice vectors: every `g X_R g^{-1}` in `L` over coset
/// representatives, weighted by `1/|Aut R|`, evaluated by numerical reduction.
pub fn trace_positive_lattice(f: &ModFuncExpr, spec: &GenusCharSpec, d: u64, cfg: &TraceConfig) -> Result<PositiveTrace> {
    check_level(f, spec)?;
    check_level_disc(d, spec.level)?;
    let cosets = gamma0_coset_reps(spec.level);
    let mut terms = Vec::new();
    for r in sl2_class_reps(d)? {
        let aut = automorphisms(&r).len() as i64;
        let x = LatticeVec::vec_of(r);
        for g in &cosets {
            let y = x.translate(g);
            if !y.in_level(spec.level) {
                continue;
            }
            let c = chi_lattice(spec, &y)?;
            if c != 0 {
                terms.push(Term {
                    form: y.form_of(),
                    weight: Rational::from((c, aut)),
                });
            }
        }
    }
    weighted_sum(&terms, spec.delta, cfg, &format!("D={d} (lattice)"), &|q, prec| eval(f, &q.cm_point(prec)))
}

/// `t(m) = 0` for `m = 0` (untwisted handled elsewhere) and for negative non-squares.
pub fn trace_trivial(m: &Rational) -> Result<Rational> {
    let trivial = match m.cmp0() {
        std::cmp::Ordering::Equal => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Less => !crate::arith::numtheory::is_rational_square(&Rational::from(-m)),
    };
    if trivial {
        Ok(Rational::new())
    } else {
        Err(Error::InvalidParameter(format!("index {m} is not in the trivial regime")))
    }
}

/// `Some(k)` when `-m = k^2` for a positive integer `k`.
pub fn negative_square_root(m: i64) -> Option<u64> {
    if m >= 0 {
        return None;
    }
    let k = isqrt(m.unsigned_abs());
    (k * k == m.unsigned_abs()).then_some(k)
}
