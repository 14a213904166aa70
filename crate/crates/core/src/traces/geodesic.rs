//! Negative square indices: `Gamma_0(N)`-orbits of `X` with `q(X) = -m^2`, the
//! infinite geodesics they span, and the pairing with principal parts.

use rug::Rational;
use serde::Serialize;

use crate::cusps::{cusp_class, cusp_reps, Cusp};
use crate::cyclo::Cyclo;
use crate::error::Result;
use crate::genus::{chi_lattice, GenusCharSpec};
use crate::lattice::{LatticeVec, TraceZero};
use crate::modfn::CuspExpansion;

/// Normalization of `sum chi(X) <f, c(X)>`, fixed by `t_J(-1) = 1` at level one.
pub const PAIRING_SCALE: (i64, i64) = (-1, 2);

#[derive(Clone, Debug, Serialize)]
pub struct GeodesicOrbit {
    /// The cusp `l_X` (eigenvalue `+m`), as the class representative.
    pub cusp: Cusp,
    pub cusp_index: usize,
    pub m: i64,
    /// `sigma_l^{-1} X sigma_l = (m, r; 0, -m)`, `0 <= r < 2 m alpha_l`.
    pub r: i64,
    #[serde(with = "crate::serde_rational")]
    pub real_part: Rational,
    pub x: LatticeVec,
    /// Same data for `-X` at the other endpoint.
    pub far_cusp_index: usize,
    pub far_r: i64,
    #[serde(with = "crate::serde_rational")]
    pub far_real_part: Rational,
}

/// Orbit representatives on `{X in L : q(X) = -m^2}`; empty unless `m` is a positive integer.
pub fn geodesic_orbits(level: u64, m: &Rational) -> Vec<GeodesicOrbit> {
    if m.cmp0().is_le() || *m.denom() != 1 {
        return Vec::new();
    }
    let Some(m) = m.numer().to_i64() else { return Vec::new() };
    let reps = cusp_reps(level);
    let mut out = Vec::new();
    for (i, c) in reps.iter().enumerate() {
        let alpha = c.width.numer().to_i64().unwrap();
        for r in 0..2 * m * alpha {
            let mat = TraceZero::new(m, r, 0).conj(&c.sigma);
            let Some(x) = LatticeVec::from_matrix(&mat).filter(|x| x.in_level(level)) else { continue };
            // -X has eigenvalue +m on (r : -2m)
            let p = c.sigma.apply_cusp((-r, 2 * m));
            let (j, gamma) = cusp_class(&reps, level, p);
            let s = gamma.mul(&reps[j].sigma);
            let y = mat.neg().conj(&s.inv());
            debug_assert!(y.x == m && y.z == 0, "{y:?}");
            out.push(GeodesicOrbit {
                cusp: c.clone(),
                cusp_index: i,
                m,
                r,
                real_part: Rational::from((-r, 2 * m)),
                x,
                far_cusp_index: j,
                far_r: y.y,
                far_real_part: Rational::from((-y.y, 2 * m)),
            });
        }
    }
    out
}

/// `<f, c(X)> = -sum_{n<0} a_l(n) e(Re c(X) n) - sum_{n<0} a_l'(n) e(Re c(-X) n)`.
pub fn pairing(parts: &[CuspExpansion], o: &GeodesicOrbit) -> Cyclo {
    let mut acc = Cyclo::zero(1);
    for (idx, re) in [(o.cusp_index, &o.real_part), (o.far_cusp_index, &o.far_real_part)] {
        for (n, a) in parts[idx].poles() {
            let phase = Cyclo::e(&Rational::from(re * n));
            acc = acc.sub(&a.mul(&phase));
        }
    }
    acc
}

/// An exact trace value.
#[derive(Clone, Debug)]
pub enum TraceValue {
    Rational(Rational),
    /// `coeff * sqrt(radicand)`, `radicand != 1`; `sqrt` of a negative number is `i sqrt(|.|)`.
    Quadratic { coeff: Rational, radicand: i64 },
    Cyclotomic(Cyclo),
}

impl TraceValue {
    pub fn quadratic(coeff: Rational, radicand: i64) -> Self {
        if radicand == 1 || coeff == 0 {
            TraceValue::Rational(coeff)
        } else {
            TraceValue::Quadratic { coeff, radicand }
        }
    }

    /// The simplest of the three shapes, trying `Q` then `sqrt(radicand) Q`.
    pub fn from_cyclo(c: Cyclo, radicand: i64) -> Self {
        if let Some(q) = c.to_rational() {
            return TraceValue::Rational(q);
        }
        if radicand != 1 {
            let s = Cyclo::sqrt_signed(radicand);
            if let Some(q) = s.inv().ok().and_then(|i| c.mul(&i).to_rational()) {
                return TraceValue::quadratic(q, radicand);
            }
        }
        TraceValue::Cyclotomic(c)
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            TraceValue::Rational(q) => Some(q),
            _ => None,
        }
    }

    /// `c` with `self = c sqrt(radicand)`, if there is one.
    pub fn coefficient(&self, radicand: i64) -> Option<Rational> {
        match self {
            TraceValue::Rational(q) if radicand == 1 || *q == 0 => Some(q.clone()),
            TraceValue::Quadratic { coeff, radicand: r } if *r == radicand => Some(coeff.clone()),
            _ => None,
        }
    }

    pub fn to_cyclo(&self) -> Cyclo {
        match self {
            TraceValue::Rational(q) => Cyclo::from_rational(q.clone()),
            TraceValue::Quadratic { coeff, radicand } => Cyclo::sqrt_signed(*radicand).scale(coeff),
            TraceValue::Cyclotomic(c) => c.clone(),
        }
    }
}

impl std::fmt::Display for TraceValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceValue::Rational(q) => write!(f, "{}", crate::serde_rational::render(q)),
            TraceValue::Quadratic { coeff, radicand } => {
                write!(f, "{}*sqrt({radicand})", crate::serde_rational::render(coeff))
            }
            TraceValue::Cyclotomic(c) => write!(f, "{c}"),
        }
    }
}

/// `t_f(chi; -m^2)` given the principal parts at every cusp representative.
pub fn trace_negative_square(spec: &GenusCharSpec, parts: &[CuspExpansion], m: &Rational) -> Result<TraceValue> {
    let mut acc = Cyclo::zero(1);
    for o in geodesic_orbits(spec.level, m) {
        let c = chi_lattice(spec, &o.x)?;
        if c != 0 {
            acc = acc.add(&pairing(parts, &o).scale(&Rational::from(c)));
        }
    }
    Ok(TraceValue::from_cyclo(acc.scale(&Rational::from(PAIRING_SCALE)), spec.delta))
}

/// `m0` with `t_f(chi; -m^2) = 0` for all `m > m0`: the phases over a full
/// period of `r` cancel once `2m` exceeds `beta_l |Delta| |n|` for every pole.
pub fn vanishing_bound(parts: &[CuspExpansion], delta: i64) -> u64 {
    parts
        .iter()
        .map(|p| {
            let b = Rational::from(&p.cusp.beta * &p.pole_order()) * delta.unsigned_abs() / 2u32;
            b.floor().numer().to_u64().unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}
