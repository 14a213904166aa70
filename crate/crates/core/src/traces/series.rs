//! All three index regimes behind one entry point, and the generating series.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::Rational;

use super::geodesic::{trace_negative_square, vanishing_bound, TraceValue};
use super::positive::{index_supported, negative_square_root, trace_positive, TraceConfig};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::genus::GenusCharSpec;
use crate::modfn::{principal_parts, CuspExpansion, ModFuncExpr};
use crate::qseries::QSeries;

/// A function, a character and the principal parts, computed once.
#[derive(Clone, Debug)]
pub struct TraceContext {
    pub f: ModFuncExpr,
    pub spec: GenusCharSpec,
    pub parts: Vec<CuspExpansion>,
    pub cfg: TraceConfig,
}

#[derive(Clone, Debug)]
pub struct TraceResult {
    pub value: TraceValue,
    /// Certified error of the numerical sum before recognition; 0 when exact.
    pub err: f64,
}

impl TraceResult {
    fn exact(q: Rational) -> Self {
        TraceResult { value: TraceValue::Rational(q), err: 0.0 }
    }
}

impl TraceContext {
    pub fn new(f: ModFuncExpr, spec: GenusCharSpec, cfg: TraceConfig) -> Result<Self> {
        if f.level() != spec.level {
            return Err(Error::InvalidParameter(format!(
                "function level {} differs from character level {}",
                f.level(),
                spec.level
            )));
        }
        let parts = principal_parts(&f)?;
        Ok(TraceContext { f, spec, parts, cfg })
    }

    pub fn level(&self) -> u64 {
        self.spec.level
    }

    /// Level one with principal part exactly `q^{-1}` and no constant: `J`.
    fn is_level_one_j(&self) -> bool {
        self.spec.level == 1
            && self.parts.len() == 1
            && self.parts[0].coeffs.iter().filter(|(n, c)| n.cmp0().is_le() && !c.is_zero()).count() == 1
            && self.parts[0].coeff(&Rational::from(-1)).to_rational() == Some(Rational::from(1))
    }

    /// `t(0)`: zero for nontrivial characters, `-2` for `J` at level one.
    pub fn constant_term(&self) -> Result<Rational> {
        if self.spec.delta == 1 {
            return if self.is_level_one_j() {
                Ok(Rational::from(-2))
            } else {
                Err(Error::ConstantTermUnsupported(self.spec.level))
            };
        }
        if self.parts.iter().all(|p| p.constant_term().is_zero()) {
            Ok(Rational::new())
        } else {
            Err(Error::Unsupported("twisted constant term of a function with nonzero constant terms".into()))
        }
    }

    pub fn vanishing_bound(&self) -> u64 {
        vanishing_bound(&self.parts, self.spec.delta)
    }

    pub fn trace(&self, m: i64) -> Result<TraceResult> {
        match m.cmp(&0) {
            std::cmp::Ordering::Equal => Ok(TraceResult::exact(self.constant_term()?)),
            std::cmp::Ordering::Less => match negative_square_root(m) {
                Some(k) => Ok(TraceResult {
                    value: trace_negative_square(&self.spec, &self.parts, &Rational::from(k))?,
                    err: 0.0,
                }),
                None => Ok(TraceResult::exact(Rational::new())),
            },
            std::cmp::Ordering::Greater => {
                let d = m as u64;
                if !index_supported(d, self.spec.level) {
                    return Ok(TraceResult::exact(Rational::new()));
                }
                let t = trace_positive(&self.f, &self.spec, d, &self.cfg)?;
                Ok(TraceResult {
                    value: TraceValue::quadratic(t.value, t.radicand),
                    err: t.err,
                })
            }
        }
    }

    /// Traces at every index, computed in parallel, returned in input order.
    pub fn traces(&self, indices: &[i64]) -> Result<Vec<TraceResult>> {
        indices.par_iter().map(|&m| self.trace(m)).collect()
    }
}

/// `sum t(m) q^m = sqrt(radicand) * series + sum irrational[m] q^m` up to `q^{d_max}`,
/// with `radicand = Delta`.
#[derive(Clone, Debug)]
pub struct GeneratingSeries {
    pub radicand: i64,
    pub series: QSeries,
    pub irrational: BTreeMap<i64, Cyclo>,
}

pub fn generating_series(ctx: &TraceContext, d_max: u64) -> Result<GeneratingSeries> {
    let k0 = ctx.vanishing_bound() as i64;
    let mut indices: Vec<i64> = (1..=k0).rev().map(|k| -k * k).collect();
    indices.extend(0..=d_max as i64);
    let values = ctx.traces(&indices)?;
    let radicand = ctx.spec.delta;
    let mut series = QSeries::zero(d_max as i64 + 1);
    let mut irrational = BTreeMap::new();
    for (m, t) in indices.into_iter().zip(values) {
        match t.value.coefficient(radicand) {
            Some(q) => series.add_term(m, q),
            None => {
                irrational.insert(m, t.value.to_cyclo());
            }
        }
    }
    Ok(GeneratingSeries { radicand, series, irrational })
}
