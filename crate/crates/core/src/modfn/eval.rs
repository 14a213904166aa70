//! Certified point evaluation: `eta` and `j` on the standard fundamental domain,
//! carried elsewhere by exact `SL_2(Z)` bookkeeping.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Float, Rational};

use super::expr::{ModFuncExpr, Node};
use crate::arith::numtheory::dedekind_sum;
use crate::arith::CertifiedComplex;
use crate::error::{Error, Result};
use crate::forms::{reduce, QForm, UniMat};

/// Step cap for numerical fundamental-domain reduction.
pub const REDUCTION_CAP: usize = 10_000;

fn check_upper(z: &CertifiedComplex) -> Result<()> {
    let lower = Float::with_val(z.prec(), z.im() - z.err());
    if lower.cmp0() != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NotInUpperHalfPlane);
    }
    Ok(())
}

/// `g z` for an exact matrix.
pub fn mobius(g: &UniMat, z: &CertifiedComplex) -> Result<CertifiedComplex> {
    let p = z.prec();
    let num = z.mul_int(g.a).add(&CertifiedComplex::from_int(p, g.b));
    let den = z.mul_int(g.c).add(&CertifiedComplex::from_int(p, g.d));
    num.div(&den)
}

/// `(g, w)` with `z = g w` and `w` (numerically) in the fundamental domain.
pub fn reduce_point(z: &CertifiedComplex) -> Result<(UniMat, CertifiedComplex)> {
    check_upper(z)?;
    let prec = z.prec();
    let mut x = z.re().clone();
    let mut y = z.im().clone();
    let mut g = UniMat::IDENTITY;
    for _ in 0..REDUCTION_CAP {
        let k = Float::with_val(prec, x.round_ref());
        let k = k.to_integer().and_then(|k| k.to_i64()).ok_or(Error::ReductionDiverged(REDUCTION_CAP))?;
        if k != 0 {
            x -= k;
            g = g.mul(&UniMat::t(k));
        }
        let n2 = Float::with_val(prec, x.mul_add_mul_ref(&x, &y, &y));
        if n2 >= 1 {
            let w = mobius(&g.inv(), z)?;
            return Ok((g, w));
        }
        // z_old = S z_new with z_new = -1 / z_old
        x = -Float::with_val(prec, &x / &n2);
        y = Float::with_val(prec, &y / &n2);
        g = g.mul(&UniMat::S);
    }
    Err(Error::ReductionDiverged(REDUCTION_CAP))
}

fn two_pi_i(prec: u32) -> CertifiedComplex {
    CertifiedComplex::pi(prec).mul_int(2).mul_i()
}

/// Upper bound for `|x|` as an `f64`, rejecting `|x| >= 1`.
fn nome_bound(x: &CertifiedComplex) -> Result<f64> {
    let r = x.abs_upper().to_f64_round(rug::float::Round::Up);
    if !(r < 1.0) {
        return Err(Error::NotInUpperHalfPlane);
    }
    Ok(r)
}

/// `2^-bits` as a Float bound helper.
fn tail(prec: u32, r: f64, exp: u64, factor: u32) -> Float {
    // factor r^exp / (1 - r), evaluated upward
    let rf = Float::with_val(64, r);
    let num = Float::with_val(64, (&rf).pow(exp as u32)) * factor;
    let den = Float::with_val(64, 1) - Float::with_val(64, r);
    let t = Float::with_val(prec.max(64), num / den);
    t * 2u32
}

fn terms_needed(r: f64, prec: u32, exp_of: impl Fn(u64) -> u64) -> u64 {
    let lr = -r.log2();
    let mut m = 1u64;
    while (exp_of(m) as f64) * lr < prec as f64 + 20.0 {
        m += 1;
    }
    m
}

/// `eta(tau)` by the pentagonal series, no reduction. Converges for any `Im tau > 0`
/// but is only fast on the fundamental domain.
pub fn eta_series(tau: &CertifiedComplex) -> Result<CertifiedComplex> {
    check_upper(tau)?;
    let prec = tau.prec();
    let x = two_pi_i(prec).mul(tau);
    let q = x.exp();
    let q24 = x.mul_rational(&Rational::from((1, 24))).exp();
    let r = nome_bound(&q)?;
    // exponents k(3k-1)/2 and k(3k+1)/2 for k = 1..K
    let kk = terms_needed(r, prec, |k| k * (3 * k - 1) / 2);
    let mut sum = CertifiedComplex::from_int(prec, 1);
    for k in 1..=kk as i64 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = q.pow_int(k * (3 * k - 1) / 2)?;
        let b = q.pow_int(k * (3 * k + 1) / 2)?;
        sum = sum.add(&a.add(&b).mul_int(sign));
    }
    let k1 = kk + 1;
    let t = tail(prec, r, k1 * (3 * k1 - 1) / 2, 2);
    Ok(sum.add_error(&t).mul(&q24))
}

/// `j(tau)` by theta constants in the nome `p = exp(pi i tau)`, no reduction.
pub fn j_series(tau: &CertifiedComplex) -> Result<CertifiedComplex> {
    check_upper(tau)?;
    let prec = tau.prec();
    let p = CertifiedComplex::pi(prec).mul_i().mul(tau).exp();
    let r = nome_bound(&p)?;
    let m = terms_needed(r, prec, |n| n * n);
    let mut h = CertifiedComplex::from_int(prec, 1);
    let mut t3 = CertifiedComplex::from_int(prec, 1);
    let mut t4 = CertifiedComplex::from_int(prec, 1);
    for n in 1..=m as i64 {
        h = h.add(&p.pow_int(n * (n + 1))?);
        let sq = p.pow_int(n * n)?.mul_int(2);
        t3 = t3.add(&sq);
        t4 = if n % 2 == 0 { t4.add(&sq) } else { t4.sub(&sq) };
    }
    let m1 = m + 1;
    h = h.add_error(&tail(prec, r, m1 * (m1 + 1), 1));
    let tt = tail(prec, r, m1 * m1, 2);
    t3 = t3.add_error(&tt);
    t4 = t4.add_error(&tt);
    let pow8 = |x: &CertifiedComplex| x.square().square().square();
    let a = pow8(&h).mul(&p.square()).mul_int(256);
    let b = pow8(&t3);
    let c = pow8(&t4);
    let s = a.add(&b).add(&c);
    s.square().mul(&s).mul_int(32).div(&a.mul(&b).mul(&c))
}

/// Exponent `x` of the multiplier `e(x)` in `eta(g tau) = e(x) sqrt(-i(c tau + d)) eta(tau)`,
/// for `g` in normal form; for `c = 0` the square-root factor is absent.
pub fn eta_multiplier(g: &UniMat) -> Rational {
    let g = g.psl_normal();
    if g.c == 0 {
        return Rational::from((g.b, 24));
    }
    let x = Rational::from((g.a + g.d, 12 * g.c)) - dedekind_sum(g.d, g.c);
    x / 2u32
}

/// `eta(g w)` from `eta(w)`.
fn eta_transform(g: &UniMat, w: &CertifiedComplex, eta_w: &CertifiedComplex) -> Result<CertifiedComplex> {
    let g = g.psl_normal();
    let prec = w.prec();
    let phase = CertifiedComplex::exp_pi_i(prec, &(eta_multiplier(&g) * 2u32));
    let out = eta_w.mul(&phase);
    if g.c == 0 {
        return Ok(out);
    }
    let cz = w.mul_int(g.c).add(&CertifiedComplex::from_int(prec, g.d));
    let root = cz.mul_i().neg().sqrt()?;
    Ok(out.mul(&root))
}

/// `eta(z)` anywhere in the upper half plane.
pub fn eval_eta(z: &CertifiedComplex) -> Result<CertifiedComplex> {
    let (g, w) = reduce_point(z)?;
    eta_transform(&g, &w, &eta_series(&w)?)
}

/// `j(z)` anywhere in the upper half plane.
pub fn eval_j(z: &CertifiedComplex) -> Result<CertifiedComplex> {
    let (_, w) = reduce_point(z)?;
    j_series(&w)
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    Eta(u64),
    J(u64),
}

fn eval_node(node: &Node, prec: u32, atoms: &BTreeMap<Atom, CertifiedComplex>) -> Result<CertifiedComplex> {
    Ok(match node {
        Node::Const(c) => CertifiedComplex::from_rational(prec, c),
        Node::Eta(d) => atoms[&Atom::Eta(*d)].clone(),
        Node::J(d) => atoms[&Atom::J(*d)].clone(),
        Node::Sum(ts) => {
            let mut acc = CertifiedComplex::zero(prec);
            for t in ts {
                acc = acc.add(&eval_node(t, prec, atoms)?);
            }
            acc
        }
        Node::Prod(fs) => {
            let mut acc = CertifiedComplex::from_int(prec, 1);
            for f in fs {
                acc = acc.mul(&eval_node(f, prec, atoms)?);
            }
            acc
        }
        Node::Pow(b, k) => eval_node(b, prec, atoms)?.pow_int(*k)?,
    })
}

fn atoms_of(node: &Node, out: &mut Vec<Atom>) {
    match node {
        Node::Const(_) => {}
        Node::Eta(d) => out.push(Atom::Eta(*d)),
        Node::J(d) => out.push(Atom::J(*d)),
        Node::Sum(xs) | Node::Prod(xs) => xs.iter().for_each(|x| atoms_of(x, out)),
        Node::Pow(b, _) => atoms_of(b, out),
    }
}

/// Evaluate given, per scale `d`, a pair `(g, w)` with `d z = g w`.
fn eval_with(f: &ModFuncExpr, prec: u32, split: impl Fn(u64) -> Result<(UniMat, CertifiedComplex)>) -> Result<CertifiedComplex> {
    let mut list = Vec::new();
    atoms_of(f.node(), &mut list);
    list.sort();
    list.dedup();
    let mut atoms = BTreeMap::new();
    for a in list {
        let v = match a {
            Atom::Eta(d) => {
                let (g, w) = split(d)?;
                eta_transform(&g, &w, &eta_series(&w)?)?
            }
            Atom::J(d) => j_series(&split(d)?.1)?,
        };
        atoms.insert(a, v);
    }
    eval_node(f.node(), prec, &atoms)
}

/// `f(z)` with certified error at `prec` working bits.
pub fn eval(f: &ModFuncExpr, z: &CertifiedComplex) -> Result<CertifiedComplex> {
    check_upper(z)?;
    let prec = z.prec();
    eval_with(f, prec, |d| reduce_point(&z.mul_int(d as i64)))
}

/// `f(z_Q)` for a positive definite form, with all reductions exact.
pub fn eval_cm(f: &ModFuncExpr, q: &QForm, prec: u32) -> Result<CertifiedComplex> {
    if !q.is_positive_definite() {
        return Err(Error::InvalidParameter(format!("{q} is not positive definite")));
    }
    eval_with(f, prec, |d| {
        // d z_Q is the root of [a, b d, c d^2]
        let d = d as i64;
        let scaled = QForm::new(q.a, q.b * d, q.c * d * d);
        let (r, g) = reduce(&scaled);
        Ok((g, r.cm_point(prec)))
    })
}
