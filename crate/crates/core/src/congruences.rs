//! Denominator clearing, cusp-form multiplication, the `U_r` sieve and
//! finite scans for congruences `Omega t(r^3 p^m n) = 0 (mod p^nu)`.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::kronecker;
use crate::arith::numtheory::{gcd, gamma0_index, is_prime};
use crate::error::{Error, Result};
use crate::qseries::{delta_series, theta_series, QSeries};
use crate::traces::{TraceContext, TraceTable};

/// `(lcm of denominators at n <= up_to, multiplier * s)`; the result is cut at `up_to`.
pub fn clear_denominators(s: &QSeries, up_to: i64) -> (Integer, QSeries) {
    let mut mult = Integer::from(1);
    for (n, c) in s.terms() {
        if n > up_to {
            break;
        }
        mult.lcm_mut(c.denom());
    }
    let cut = s.truncate(s.prec().min(up_to + 1));
    let scaled = cut.scale(&Rational::from(mult.clone()));
    (mult, scaled)
}

/// Smallest `m >= 0` with `Theta Delta^m s` vanishing at infinity to order >= 1.
pub fn required_delta_power(s: &QSeries) -> u32 {
    match s.valuation() {
        Some(v) if v < 1 => (1 - v) as u32,
        _ => 0,
    }
}

/// `Theta Delta^m s + O(q^P)`; errors unless the product starts at `q^1` or later.
pub fn cuspify(s: &QSeries, m: u32, prec: i64) -> Result<QSeries> {
    let Some(v) = s.valuation() else {
        return Ok(QSeries::zero(prec.min(s.prec() + m as i64)));
    };
    if v + (m as i64) < 1 {
        return Err(Error::PoleTooLarge { pole: -v, m });
    }
    // s is needed below P - m only
    let need = prec - m as i64;
    let delta_m = delta_series(prec).pow(m);
    let out = theta_series(prec).mul(&delta_m).mul(&s.truncate(s.prec().min(need.max(v + 1))));
    Ok(out.truncate(prec))
}

/// Trace indices `r m` read by [`apply_ur_sieve`] for `1 <= m <= target`.
pub fn ur_indices(t: u64, r: u64, target: i64) -> Vec<i64> {
    (1..=target)
        .filter(|&m| kronecker(r as i64 * m, t as i64) == -1)
        .map(|m| r as i64 * m)
        .collect()
}

/// `sum_{m >= 1, (rm/t) = -1} t(rm) q^m + O(q^{target+1})`, without the factor 2.
pub fn apply_ur_sieve(table: &TraceTable, t: u64, r: u64, target: i64) -> Result<QSeries> {
    if t % 2 == 0 {
        return Err(Error::InvalidParameter(format!("t must be odd, got {t}")));
    }
    let mut out = QSeries::zero(target + 1);
    for idx in ur_indices(t, r, target) {
        out.add_term(idx / r as i64, table.get(idx)?.clone());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckedIndex {
    pub n: u64,
    pub index: i64,
    /// `t(index) / sqrt(Delta)`.
    #[serde(with = "crate::serde_rational")]
    pub value: Rational,
    /// `Omega * value mod p^nu`, in `[0, p^nu)`.
    pub residue: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub p: u64,
    pub nu: u32,
    pub t: u64,
    #[serde(rename = "N")]
    pub level: u64,
    pub delta: i64,
    pub m_exp: u32,
    pub r: u64,
    /// Clears the denominators of the checked values only.
    pub omega: String,
    pub checked: Vec<CheckedIndex>,
    pub verdict: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanParams {
    pub p: u64,
    pub nu: u32,
    pub t: u64,
    pub m_exp: u32,
    pub n_max: u64,
}

impl ScanParams {
    pub fn validate(&self, level: u64) -> Result<()> {
        if self.p == 2 || !is_prime(self.p) {
            return Err(Error::InvalidParameter(format!("p = {} is not an odd prime", self.p)));
        }
        if level % self.p == 0 {
            return Err(Error::InvalidParameter(format!("p = {} divides N = {level}", self.p)));
        }
        if self.t % 2 == 0 {
            return Err(Error::InvalidParameter(format!("t = {} is not odd", self.t)));
        }
        if self.nu == 0 {
            return Err(Error::InvalidParameter("nu must be positive".into()));
        }
        Ok(())
    }

    /// `4 t^2 N p^nu`.
    pub fn progression_modulus(&self, level: u64) -> u64 {
        4 * self.t * self.t * level * self.p.pow(self.nu)
    }

    /// Admissible `n` for `r` and their indices `r^3 p^m n`.
    pub fn admissible(&self, level: u64, r: u64) -> Vec<(u64, i64)> {
        let base = (r as i64).pow(3) * (self.p as i64).pow(self.m_exp);
        let rpn = (r * self.p * level) as i64;
        (1..=self.n_max)
            .filter(|&n| gcd(n as i64, rpn) == 1)
            .map(|n| (n, base * n as i64))
            .filter(|&(_, idx)| kronecker(idx, self.t as i64) == -1)
            .collect()
    }
}

/// Every trace index a scan over `rs` will read.
pub fn scan_indices(params: &ScanParams, level: u64, rs: &[u64]) -> Vec<i64> {
    let mut out: Vec<i64> = rs.iter().flat_map(|&r| params.admissible(level, r)).map(|(_, i)| i).collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// One report per candidate `r`, in input order. Traces come from (and are added to) `table`.
pub fn scan_congruence(
    ctx: &TraceContext,
    table: &mut TraceTable,
    params: &ScanParams,
    r_candidates: &[u64],
) -> Result<Vec<CongruenceReport>> {
    let level = ctx.level();
    params.validate(level)?;
    let modulus = params.progression_modulus(level);
    for &r in r_candidates {
        if !is_prime(r) || (r + 1) % modulus != 0 {
            return Err(Error::InvalidParameter(format!("r = {r} is not a prime = -1 mod {modulus}")));
        }
    }
    table.fill(ctx, &scan_indices(params, level, r_candidates))?;
    let pnu = Integer::from(params.p).pow(params.nu);
    let mut reports = Vec::with_capacity(r_candidates.len());
    for &r in r_candidates {
        let adm = params.admissible(level, r);
        let mut omega = Integer::from(1);
        let mut values = Vec::with_capacity(adm.len());
        for &(n, idx) in &adm {
            let v = table.get(idx)?.clone();
            omega.lcm_mut(v.denom());
            values.push((n, idx, v));
        }
        let checked: Vec<CheckedIndex> = values
            .into_iter()
            .map(|(n, index, value)| {
                let scaled = Rational::from(&value * &omega);
                let residue = scaled.numer().clone().modulo(&pnu);
                CheckedIndex {
                    n,
                    index,
                    value,
                    residue: residue.to_string(),
                }
            })
            .collect();
        let verdict = checked.iter().all(|c| c.residue == "0");
        reports.push(CongruenceReport {
            p: params.p,
            nu: params.nu,
            t: params.t,
            level,
            delta: ctx.spec.delta,
            m_exp: params.m_exp,
            r,
            omega: omega.to_string(),
            checked,
            verdict,
        });
    }
    Ok(reports)
}

/// Sturm bound `k [SL_2(Z) : Gamma_0(N)] / 12` for weight `k` (possibly half-integral).
pub fn sturm_bound(weight: &Rational, level: u64) -> u64 {
    let b = Rational::from(weight * gamma0_index(level)) / 12u32;
    b.ceil().numer().to_u64().unwrap_or(u64::MAX)
}

/// Experimental: whether two integral series agree mod `modulus` through the Sturm
/// bound. Not a proof unless both are forms of the given weight and level.
pub fn sturm_congruent(a: &QSeries, b: &QSeries, modulus: u64, weight: &Rational, level: u64) -> Result<bool> {
    let bound = sturm_bound(weight, level) as i64;
    if a.prec() <= bound || b.prec() <= bound {
        return Err(Error::InvalidParameter(format!("series must be known past q^{bound}")));
    }
    let d = a.sub(b).truncate(bound + 1).reduce_mod(modulus)?;
    Ok(d.is_zero())
}
