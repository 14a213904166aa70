//! Exact expansions `f(sigma z) = sum a(n) e(n z)` at cusps, with coefficients in
//! cyclotomic fields.
//!
//! For an atom at scale `d`, `diag(d, 1) sigma = gamma U` with `gamma` in `SL_2(Z)` and
//! `U = (g, B; 0, D')` upper triangular. Then `j(d sigma z) = j(Uz)` and
//! `eta(d sigma z) = e(x) sqrt(-i(cz + d_sigma)) D'^{-1/2} eta(Uz)`; the square root
//! is common to all atoms at a cusp and cancels in weight 0.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::Rational;
use serde::Serialize;

use super::eval::eta_multiplier;
use super::expr::{ModFuncExpr, Node};
use crate::arith::numtheory::{ext_gcd, gcd, lcm};
use crate::arith::CertifiedComplex;
use crate::cusps::{cusp_reps, Cusp};
use crate::cyclo::Cyclo;
use crate::error::{Error, Result};
use crate::forms::UniMat;
use crate::qseries::{self, QSeries};

const INF: i64 = i64::MAX / 4;

/// Largest precision (in powers of `q`) tried before giving up.
const PREC_CAP: i64 = 1 << 14;

/// Laurent series in `x = q^{1/den}` with cyclotomic coefficients, known modulo `x^prec`.
#[derive(Clone, Debug)]
pub struct CSeries {
    den: u64,
    prec: i64,
    coeffs: BTreeMap<i64, Cyclo>,
}

impl CSeries {
    pub fn new(den: u64, prec: i64) -> Self {
        CSeries {
            den,
            prec,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn constant(c: Cyclo) -> Self {
        let mut s = CSeries::new(1, INF);
        s.push(0, c);
        s
    }

    fn push(&mut self, e: i64, c: Cyclo) {
        if e >= self.prec {
            return;
        }
        let merged = match self.coeffs.remove(&e) {
            Some(old) => old.add(&c),
            None => c,
        };
        if !merged.is_zero() {
            self.coeffs.insert(e, merged);
        }
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Known below `q^{prec}`.
    pub fn prec_q(&self) -> Rational {
        Rational::from((self.prec, self.den as i64))
    }

    pub fn terms_q(&self) -> impl Iterator<Item = (Rational, &Cyclo)> {
        self.coeffs.iter().map(|(e, c)| (Rational::from((*e, self.den as i64)), c))
    }

    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    fn rescaled(&self, den: u64) -> CSeries {
        if den == self.den {
            return self.clone();
        }
        let f = (den / self.den) as i64;
        CSeries {
            den,
            prec: self.prec.saturating_mul(f).min(INF),
            coeffs: self.coeffs.iter().map(|(e, c)| (e * f, c.clone())).collect(),
        }
    }

    fn common(&self, o: &CSeries) -> (CSeries, CSeries) {
        let den = lcm(self.den as i64, o.den as i64) as u64;
        (self.rescaled(den), o.rescaled(den))
    }

    pub fn add(&self, o: &CSeries) -> CSeries {
        let (a, b) = self.common(o);
        let mut out = CSeries::new(a.den, a.prec.min(b.prec));
        for (e, c) in a.coeffs.into_iter().chain(b.coeffs) {
            out.push(e, c);
        }
        out
    }

    pub fn scale(&self, c: &Cyclo) -> CSeries {
        let mut out = CSeries::new(self.den, self.prec);
        for (e, x) in &self.coeffs {
            out.push(*e, x.mul(c));
        }
        out
    }

    pub fn mul(&self, o: &CSeries) -> CSeries {
        let (a, b) = self.common(o);
        let va = a.valuation().unwrap_or(INF);
        let vb = b.valuation().unwrap_or(INF);
        let prec = a.prec.saturating_add(vb).min(b.prec.saturating_add(va)).min(INF);
        let mut out = CSeries::new(a.den, prec);
        for (i, x) in &a.coeffs {
            for (j, y) in &b.coeffs {
                if i + j < prec {
                    out.push(i + j, x.mul(y));
                }
            }
        }
        out
    }

    pub fn invert(&self) -> Result<CSeries> {
        let v = self.valuation().ok_or(Error::NotInvertible)?;
        if self.prec >= INF {
            // exact constants and monomials only
            if self.coeffs.len() == 1 {
                let mut out = CSeries::new(self.den, INF);
                out.push(-v, self.coeffs[&v].inv()?);
                return Ok(out);
            }
            return Err(Error::Unsupported("inverse of an exact polynomial".into()));
        }
        let len = self.prec - v;
        let step = self.coeffs.keys().fold(0, |g, e| gcd(g, e - v)).max(1);
        let u0inv = self.coeffs[&v].inv()?;
        let mut w: BTreeMap<i64, Cyclo> = BTreeMap::new();
        w.insert(0, u0inv.clone());
        let mut k = step;
        while k < len {
            let mut acc = Cyclo::zero(1);
            for (e, c) in self.coeffs.range(v + 1..=v + k) {
                if let Some(prev) = w.get(&(k - (e - v))) {
                    acc = acc.add(&c.mul(prev));
                }
            }
            if !acc.is_zero() {
                w.insert(k, acc.mul(&u0inv).neg());
            }
            k += step;
        }
        let mut out = CSeries::new(self.den, self.prec - 2 * v);
        for (e, c) in w {
            out.push(e - v, c);
        }
        Ok(out)
    }

    pub fn pow(&self, k: i64) -> Result<CSeries> {
        if k < 0 {
            return self.invert()?.pow(-k);
        }
        let mut result = CSeries::constant(Cyclo::one());
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        Ok(result)
    }

    /// `sum a(n) e(n z)` over the known terms, without a tail bound.
    pub fn eval_truncated(&self, z: &CertifiedComplex) -> CertifiedComplex {
        let prec = z.prec();
        let two_pi_i = CertifiedComplex::pi(prec).mul_int(2).mul_i();
        let mut acc = CertifiedComplex::zero(prec);
        for (n, c) in self.terms_q() {
            let t = two_pi_i.mul(z).mul_rational(&n).exp();
            acc = acc.add(&t.mul(&c.to_complex(prec)));
        }
        acc
    }
}

/// Value `(-i(cz+d))^{hw/2} sqrt(root) s`.
struct Piece {
    hw: i64,
    root: Rational,
    s: CSeries,
}

impl Piece {
    fn folded(self) -> CSeries {
        if self.root == 1 {
            self.s
        } else {
            self.s.scale(&Cyclo::sqrt_rational(&self.root))
        }
    }
}

/// `diag(d, 1) sigma = gamma (g, B; 0, D')` with `0 <= B < D'`.
pub fn split_scaled(sigma: &UniMat, d: u64) -> (UniMat, i64, i64, i64) {
    let d = d as i64;
    let (ma, mb, mc, md) = (d * sigma.a, d * sigma.b, sigma.c, sigma.d);
    let (ma, mb, mc, md) = if mc < 0 || (mc == 0 && ma < 0) { (-ma, -mb, -mc, -md) } else { (ma, mb, mc, md) };
    let (g, x, y) = ext_gcd(ma, mc);
    let g = g.abs();
    // gamma = (ma/g, -y; mc/g, x) with det 1
    let (ga, gc) = (ma / g, mc / g);
    let (gb, gd) = if ga * x + gc * y == 1 { (-y, x) } else { (y, -x) };
    let gamma = UniMat { a: ga, b: gb, c: gc, d: gd };
    debug_assert_eq!(ga * gd - gb * gc, 1);
    // U = gamma^{-1} M
    let dp = d / g;
    let bp = gd * mb - gb * md;
    let k = bp.div_euclid(dp);
    let b = bp - k * dp;
    let gamma = gamma.mul(&UniMat::t(k));
    debug_assert_eq!((gamma.a * g, gamma.a * b + gamma.b * dp, gamma.c * g, gamma.c * b + gamma.d * dp), (ma, mb, mc, md));
    (gamma, g, b, dp)
}

fn eta_atom(sigma: &UniMat, d: u64, prec_q: i64) -> Piece {
    let (gamma, g, b, dp) = split_scaled(sigma, d);
    let den = 24 * dp as u64;
    let prec = prec_q.saturating_mul(den as i64);
    let mut s = CSeries::new(den, prec);
    let lead = Cyclo::e(&(eta_multiplier(&gamma) + Rational::from((b, 24 * dp))));
    // prod (1 - x^n) = sum (-1)^k x^{k(3k-1)/2}, x = e(B/D') q^{g/D'}
    let mut k = 0i64;
    loop {
        let mut any = false;
        for m in [k * (3 * k - 1) / 2, k * (3 * k + 1) / 2] {
            let e = g * (1 + 24 * m);
            if e < prec {
                any = true;
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let phase = Cyclo::e(&Rational::from((b * m, dp)));
                s.push(e, phase.mul(&lead).scale(&Rational::from(sign)));
            }
            if k == 0 {
                break;
            }
        }
        if !any {
            break;
        }
        k += 1;
    }
    let root = if sigma.c == 0 { Rational::from(1) } else { Rational::from((1, dp)) };
    Piece { hw: 1, root, s }
}

fn j_atom(sigma: &UniMat, d: u64, prec_q: i64) -> Piece {
    let (_, g, b, dp) = split_scaled(sigma, d);
    let den = dp as u64;
    let prec = prec_q.saturating_mul(den as i64);
    let mut s = CSeries::new(den, prec);
    // exponents g n / D' < prec_q
    let top = prec / g + 2;
    let js = qseries::j_series(top);
    for (n, c) in js.terms() {
        if g * n < prec {
            s.push(g * n, Cyclo::e(&Rational::from((b * n, dp))).scale(c));
        }
    }
    Piece {
        hw: 0,
        root: Rational::from(1),
        s,
    }
}

fn expand_node(node: &Node, sigma: &UniMat, prec_q: i64) -> Result<Piece> {
    Ok(match node {
        Node::Const(c) => Piece {
            hw: 0,
            root: Rational::from(1),
            s: CSeries::constant(Cyclo::from_rational(c.clone())),
        },
        Node::Eta(d) => eta_atom(sigma, *d, prec_q),
        Node::J(d) => j_atom(sigma, *d, prec_q),
        Node::Sum(ts) => {
            let parts = ts.iter().map(|t| expand_node(t, sigma, prec_q)).collect::<Result<Vec<_>>>()?;
            let hw = parts.first().map_or(0, |p| p.hw);
            if parts.iter().any(|p| p.hw != hw) {
                return Err(Error::Unsupported("sum of terms with different weights".into()));
            }
            let same_root = parts.windows(2).all(|w| w[0].root == w[1].root);
            let root = match (same_root, parts.first()) {
                (true, Some(p)) => p.root.clone(),
                _ => Rational::from(1),
            };
            let mut s = CSeries::constant(Cyclo::zero(1));
            for p in parts {
                s = s.add(&if same_root { p.s } else { p.folded() });
            }
            Piece { hw, root, s }
        }
        Node::Prod(fs) => {
            let mut acc = Piece {
                hw: 0,
                root: Rational::from(1),
                s: CSeries::constant(Cyclo::one()),
            };
            for f in fs {
                let p = expand_node(f, sigma, prec_q)?;
                acc = Piece {
                    hw: acc.hw + p.hw,
                    root: acc.root * p.root,
                    s: acc.s.mul(&p.s),
                };
            }
            acc
        }
        Node::Pow(b, k) => {
            let p = expand_node(b, sigma, prec_q)?;
            Piece {
                hw: p.hw * k,
                root: p.root.pow(*k as i32),
                s: p.s.pow(*k)?,
            }
        }
    })
}

/// `f(sigma z)` known at least below `q^{need}`.
pub fn expansion_at(f: &ModFuncExpr, sigma: &UniMat, need: &Rational) -> Result<CSeries> {
    let mut p = need.clone().ceil().numer().to_i64().unwrap_or(1).max(1);
    loop {
        let piece = expand_node(f.node(), sigma, p)?;
        if piece.hw != 0 {
            return Err(Error::Unsupported("expression of nonzero weight".into()));
        }
        let s = piece.folded();
        if s.prec_q() > *need {
            return Ok(s);
        }
        if p >= PREC_CAP {
            return Err(Error::Unsupported(format!("expansion at {sigma} did not reach q^{need}")));
        }
        p *= 2;
    }
}

/// Coefficients `a(n)`, `n <= 0`, of `f(sigma_l z)`.
#[derive(Clone, Debug, Serialize)]
pub struct CuspExpansion {
    pub cusp: Cusp,
    #[serde(serialize_with = "ser_coeffs")]
    pub coeffs: BTreeMap<Rational, Cyclo>,
    #[serde(serialize_with = "ser_opt_rational")]
    pub floor: Option<Rational>,
}

fn ser_coeffs<S: serde::Serializer>(m: &BTreeMap<Rational, Cyclo>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.len()))?;
    for (n, c) in m {
        seq.serialize_element(&(crate::serde_rational::render(n), c.to_string()))?;
    }
    seq.end()
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&crate::serde_rational::render(q)),
        None => s.serialize_none(),
    }
}

impl CuspExpansion {
    fn new(cusp: Cusp, coeffs: BTreeMap<Rational, Cyclo>) -> Self {
        let floor = coeffs.keys().next().cloned();
        CuspExpansion { cusp, coeffs, floor }
    }

    pub fn coeff(&self, n: &Rational) -> Cyclo {
        self.coeffs.get(n).cloned().unwrap_or_else(|| Cyclo::zero(1))
    }

    pub fn constant_term(&self) -> Cyclo {
        self.coeff(&Rational::new())
    }

    /// Largest `-n` with `a(n) != 0`, `n < 0`; zero without poles.
    pub fn pole_order(&self) -> Rational {
        match &self.floor {
            Some(n) if n.cmp0().is_lt() => Rational::from(-n),
            _ => Rational::new(),
        }
    }

    pub fn poles(&self) -> impl Iterator<Item = (&Rational, &Cyclo)> {
        self.coeffs.iter().filter(|(n, _)| n.cmp0().is_lt())
    }
}

/// The principal part (with constant term) of `f` at `cusp`; hand-supplied parts win.
pub fn principal_part_at(f: &ModFuncExpr, cusp: &Cusp) -> Result<CuspExpansion> {
    if let Some(m) = f.manual_part(&cusp.label()) {
        let coeffs = m
            .iter()
            .filter(|(_, c)| **c != 0)
            .map(|(n, c)| (n.clone(), Cyclo::from_rational(c.clone())))
            .collect();
        return Ok(CuspExpansion::new(cusp.clone(), coeffs));
    }
    let s = expansion_at(f, &cusp.sigma, &Rational::new())?;
    let mut coeffs = BTreeMap::new();
    for (n, c) in s.terms_q() {
        if n.cmp0().is_gt() {
            break;
        }
        if Rational::from(&n * &cusp.width).denom() != &1 {
            return Err(Error::InvalidParameter(format!(
                "exponent {n} at cusp {} is not in (1/{})Z: the expression is not invariant",
                cusp.label(),
                cusp.width
            )));
        }
        coeffs.insert(n, c.clone());
    }
    Ok(CuspExpansion::new(cusp.clone(), coeffs))
}

/// Principal parts at every cusp representative, in `cusp_reps` order.
pub fn principal_parts(f: &ModFuncExpr) -> Result<Vec<CuspExpansion>> {
    cusp_reps(f.level()).iter().map(|c| principal_part_at(f, c)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstantTerms {
    pub terms: Vec<(String, String)>,
    pub all_vanish: bool,
}

pub fn constant_terms(f: &ModFuncExpr) -> Result<ConstantTerms> {
    let parts = principal_parts(f)?;
    let all_vanish = parts.iter().all(|p| p.constant_term().is_zero());
    Ok(ConstantTerms {
        terms: parts.iter().map(|p| (p.cusp.label(), p.constant_term().to_string())).collect(),
        all_vanish,
    })
}

/// Rational expansion at infinity through `q^terms`.
pub fn q_expansion(f: &ModFuncExpr, terms: i64) -> Result<QSeries> {
    let s = expansion_at(f, &UniMat::IDENTITY, &Rational::from(terms))?;
    let mut out = QSeries::zero(terms + 1);
    for (n, c) in s.terms_q() {
        if n > terms {
            break;
        }
        if *n.denom() != 1 {
            return Err(Error::InvalidParameter(format!("fractional exponent {n} at infinity")));
        }
        let n = n.numer().to_i64().unwrap();
        let v = c.to_rational().ok_or(Error::NonRational(n))?;
        out.add_term(n, v);
    }
    Ok(out)
}
