//! Positive definite binary quadratic forms, `SL_2(Z)` reduction with matrix
//! tracking, and enumeration of `Gamma_0(N)`-classes of forms `[a, b, c]`
//! with `N | a`.

use std::collections::BTreeSet;
use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::numtheory::{ext_gcd, gamma0_index, gcd, isqrt, modp, sqrt_classes_mod};
use crate::arith::CertifiedComplex;
use crate::error::{Error, Result};

/// `a x^2 + b x y + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

/// An element `(a b; c d)` of `SL_2(Z)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UniMat {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl fmt::Display for QForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{},{}]", self.a, self.b, self.c)
    }
}

impl fmt::Display for UniMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{})", self.a, self.b, self.c, self.d)
    }
}

impl UniMat {
    pub const IDENTITY: UniMat = UniMat { a: 1, b: 0, c: 0, d: 1 };
    pub const S: UniMat = UniMat { a: 0, b: -1, c: 1, d: 0 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        (a as i128 * d as i128 - b as i128 * c as i128 == 1).then_some(UniMat { a, b, c, d })
    }

    pub fn t(k: i64) -> Self {
        UniMat { a: 1, b: k, c: 0, d: 1 }
    }

    pub fn mul(&self, o: &UniMat) -> UniMat {
        UniMat {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inv(&self) -> UniMat {
        UniMat {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn neg(&self) -> UniMat {
        UniMat {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }

    /// Representative of `{g, -g}`: lower row `(c, d)` with `c > 0`, or `c = 0, d > 0`.
    pub fn psl_normal(&self) -> UniMat {
        if self.c < 0 || (self.c == 0 && self.d < 0) {
            self.neg()
        } else {
            *self
        }
    }

    pub fn in_gamma0(&self, level: u64) -> bool {
        self.c.rem_euclid(level as i64) == 0
    }

    pub fn is_identity_psl(&self) -> bool {
        self.psl_normal() == UniMat::IDENTITY
    }

    /// Möbius action on an exact rational point of `P^1(Q)`, given as `(num : den)`.
    pub fn apply_cusp(&self, p: (i64, i64)) -> (i64, i64) {
        let num = self.a * p.0 + self.b * p.1;
        let den = self.c * p.0 + self.d * p.1;
        let g = gcd(num, den).max(1);
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 || (den == 0 && num < 0) {
            num = -num;
            den = -den;
        }
        (num, den)
    }
}

impl QForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QForm { a, b, c }
    }

    /// `b^2 - 4ac`.
    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.disc() < 0
    }

    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.b * x * y + self.c * y * y
    }

    pub fn content(&self) -> i64 {
        gcd(gcd(self.a, self.b), self.c)
    }

    pub fn neg(&self) -> QForm {
        QForm::new(-self.a, -self.b, -self.c)
    }

    /// The right action `Q(a x + b y, c x + d y)`.
    pub fn act(&self, g: &UniMat) -> QForm {
        let (a, b, c) = (self.a, self.b, self.c);
        QForm {
            a: a * g.a * g.a + b * g.a * g.c + c * g.c * g.c,
            b: 2 * a * g.a * g.b + b * (g.a * g.d + g.b * g.c) + 2 * c * g.c * g.d,
            c: a * g.b * g.b + b * g.b * g.d + c * g.d * g.d,
        }
    }

    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// Translate by `T^k` (which lies in every `Gamma_0(N)`) so that `-a < b <= a`.
    pub fn normalize_b(&self) -> (QForm, UniMat) {
        let k = (self.a - self.b).div_euclid(2 * self.a);
        let t = UniMat::t(k);
        (self.act(&t), t)
    }

    /// `z_Q = (-b + i sqrt(D)) / (2a)` as a certified ball.
    pub fn cm_point(&self, prec: u32) -> CertifiedComplex {
        let d = Integer::from(-self.disc());
        let sqrt_d = CertifiedComplex::sqrt_int(prec + 8, &d);
        let two_a = Rational::from((1, 2 * self.a));
        let re = CertifiedComplex::from_rational(prec + 8, &Rational::from((-self.b, 2 * self.a)));
        re.add(&sqrt_d.mul_i().mul_rational(&two_a)).set_prec(prec)
    }

    /// `Im z_Q` as a float, for heuristics only.
    pub fn cm_imag_f64(&self) -> f64 {
        ((-self.disc()) as f64).sqrt() / (2.0 * self.a as f64)
    }
}

/// Gauss reduction. Returns `(R, g)` with `Q.act(g) == R` and `R` reduced.
pub fn reduce(q: &QForm) -> (QForm, UniMat) {
    assert!(q.is_positive_definite(), "reduce needs a positive definite form, got {q}");
    let mut form = *q;
    let mut g = UniMat::IDENTITY;
    loop {
        let (f, t) = form.normalize_b();
        form = f;
        g = g.mul(&t);
        if form.c < form.a {
            form = form.act(&UniMat::S);
            g = g.mul(&UniMat::S);
            continue;
        }
        if form.a == form.c && form.b < 0 {
            form = form.act(&UniMat::S);
            g = g.mul(&UniMat::S);
        }
        return (form, g);
    }
}

fn check_disc(d: u64) -> Result<()> {
    if d == 0 || !(d % 4 == 0 || d % 4 == 3) {
        return Err(Error::InvalidDiscriminant(d));
    }
    Ok(())
}

/// One reduced form per `SL_2(Z)`-class of discriminant `-D` (primitive or not),
/// sorted lexicographically.
pub fn sl2_class_reps(d: u64) -> Result<Vec<QForm>> {
    check_disc(d)?;
    let d = d as i64;
    let amax = isqrt((d / 3) as u64) as i64;
    let mut out = Vec::new();
    for a in 1..=amax {
        for b in -a..=a {
            let num = b * b + d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let q = QForm::new(a, b, c);
            if q.is_reduced() {
                out.push(q);
            }
        }
    }
    out.sort();
    Ok(out)
}

/// The `PSL_2(Z)`-stabilizer of a reduced positive definite form.
pub fn automorphisms(q: &QForm) -> Vec<UniMat> {
    let mut found = BTreeSet::new();
    for a in -2..=2i64 {
        for b in -2..=2i64 {
            for c in -2..=2i64 {
                for d in -2..=2i64 {
                    if let Some(g) = UniMat::new(a, b, c, d) {
                        if q.act(&g) == *q {
                            found.insert(g.psl_normal());
                        }
                    }
                }
            }
        }
    }
    found.into_iter().collect()
}

/// All `g` (modulo `+-1`) with `Q1.act(g) == Q2`.
pub fn transporter(q1: &QForm, q2: &QForm) -> Vec<UniMat> {
    if q1.disc() != q2.disc() {
        return Vec::new();
    }
    let (r1, g1) = reduce(q1);
    let (r2, g2) = reduce(q2);
    if r1 != r2 {
        return Vec::new();
    }
    let g2_inv = g2.inv();
    let mut out: Vec<UniMat> = automorphisms(&r1)
        .iter()
        .map(|a| g1.mul(a).mul(&g2_inv).psl_normal())
        .collect();
    out.sort();
    out.dedup();
    out
}

/// An explicit `g in Gamma_0(N)` with `Q1.act(g) == Q2`, if one exists.
pub fn gamma0_transporter(q1: &QForm, q2: &QForm, level: u64) -> Option<UniMat> {
    transporter(q1, q2).into_iter().find(|g| g.in_gamma0(level))
}

/// Lift of `(c : d) in P^1(Z/N)` to a matrix with that lower row.
fn lift_row(c: i64, d: i64, n: i64) -> UniMat {
    let c0 = if c == 0 { n } else { c };
    let mut d0 = d;
    while gcd(c0, d0) != 1 {
        d0 += n;
    }
    // a d0 - b c0 = 1
    let (_, x, y) = ext_gcd(d0, c0);
    // x d0 + y c0 = 1, so a = x, b = -y
    let g = UniMat { a: x, b: -y, c: c0, d: d0 };
    debug_assert_eq!(g.a * g.d - g.b * g.c, 1);
    if c == 0 && n == 1 {
        return UniMat::IDENTITY;
    }
    g
}

/// One representative per right coset `Gamma_0(N) g` of `SL_2(Z)`.
pub fn gamma0_coset_reps(level: u64) -> Vec<UniMat> {
    if level == 1 {
        return vec![UniMat::IDENTITY];
    }
    let n = level as i64;
    let units: Vec<i64> = (1..n).filter(|&u| gcd(u, n) == 1).collect();
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for c in 0..n {
        for d in 0..n {
            if gcd(gcd(c, d), n) != 1 {
                continue;
            }
            let key = units
                .iter()
                .map(|&u| (modp(u * c, n), modp(u * d, n)))
                .min()
                .unwrap();
            if seen.insert(key) {
                reps.push(if key == (0, 1) { UniMat::IDENTITY } else { lift_row(key.0, key.1, n) });
            }
        }
    }
    debug_assert_eq!(reps.len() as u64, gamma0_index(level));
    reps
}

/// A `Gamma_0(N)`-class of forms in `Q_{D,N}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRep {
    pub form: QForm,
    /// Order of the stabilizer in the image of `Gamma_0(N)` in `PSL_2(Z)`.
    pub stab_order: u32,
}

impl ClassRep {
    pub fn cm_point(&self, prec: u32) -> CertifiedComplex {
        self.form.cm_point(prec)
    }
}

/// Full output of the class enumeration, including a certificate for every
/// candidate form that was merged into an existing class.
#[derive(Clone, Debug)]
pub struct ClassEnumeration {
    pub classes: Vec<ClassRep>,
    /// `(candidate, index of its class, g in Gamma_0(N) with rep.act(g) == candidate)`.
    pub merged: Vec<(QForm, usize, UniMat)>,
}

/// `-D` must be a square modulo `4N` for `Q_{D,N}` to be nonempty.
pub fn check_level_disc(d: u64, level: u64) -> Result<()> {
    check_disc(d)?;
    if level == 0 {
        return Err(Error::InvalidParameter("level must be positive".into()));
    }
    let roots = sqrt_classes_mod(-(d as i64), 4 * level)?;
    if roots.is_empty() {
        return Err(Error::NoSquareRoot { disc: d, level });
    }
    Ok(())
}

pub fn enumerate_classes(d: u64, level: u64) -> Result<ClassEnumeration> {
    check_level_disc(d, level)?;
    let n = level as i64;
    let cosets = gamma0_coset_reps(level);
    let mut groups: Vec<Vec<QForm>> = Vec::new();
    let mut merged_raw: Vec<(QForm, usize)> = Vec::new();
    for r in sl2_class_reps(d)? {
        let first_group = groups.len();
        for g in &cosets {
            let cand = r.act(&g.inv());
            if cand.a % n != 0 {
                continue;
            }
            let (cand, _) = cand.normalize_b();
            let hit = (first_group..groups.len())
                .find(|&i| gamma0_transporter(&groups[i][0], &cand, level).is_some());
            match hit {
                Some(i) => {
                    if !groups[i].contains(&cand) {
                        groups[i].push(cand);
                    }
                }
                None => groups.push(vec![cand]),
            }
        }
    }
    let mut classes: Vec<(QForm, Vec<QForm>)> = groups
        .into_iter()
        .map(|g| {
            let rep = *g.iter().min().unwrap();
            (rep, g)
        })
        .collect();
    classes.sort_by_key(|(rep, _)| *rep);
    let mut out = Vec::with_capacity(classes.len());
    for (idx, (rep, members)) in classes.iter().enumerate() {
        let stab = transporter(rep, rep).iter().filter(|g| g.in_gamma0(level)).count() as u32;
        out.push(ClassRep {
            form: *rep,
            stab_order: stab,
        });
        for m in members {
            if m != rep {
                merged_raw.push((*m, idx));
            }
        }
    }
    let merged = merged_raw
        .into_iter()
        .map(|(m, idx)| {
            let g = gamma0_transporter(&out[idx].form, &m, level)
                .expect("merged form lost its certificate");
            (m, idx, g)
        })
        .collect();
    Ok(ClassEnumeration {
        classes: out,
        merged,
    })
}

/// Representatives of `Q_{D,N} / Gamma_0(N)`, sorted lexicographically.
pub fn gamma0_class_reps(d: u64, level: u64) -> Result<Vec<ClassRep>> {
    Ok(enumerate_classes(d, level)?.classes)
}

/// `sum over classes of 1/|stabilizer|`.
pub fn hurwitz_count(d: u64, level: u64) -> Result<Rational> {
    Ok(gamma0_class_reps(d, level)?
        .iter()
        .map(|c| Rational::from((1, c.stab_order)))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: i64, b: i64, c: i64) -> QForm {
        QForm::new(a, b, c)
    }

    #[test]
    fn action_examples() {
        assert_eq!(q(1, 0, 1).act(&UniMat::IDENTITY), q(1, 0, 1));
        assert_eq!(q(1, 0, 1).act(&UniMat::t(1)), q(1, 2, 2));
        assert_eq!(q(1, 1, 1).act(&UniMat::new(0, -1, 1, 0).unwrap()), q(1, -1, 1));
    }

    #[test]
    fn reduction_examples() {
        assert_eq!(reduce(&q(1, 1, 1)), (q(1, 1, 1), UniMat::IDENTITY));
        let (r, g) = reduce(&q(1, 2, 2));
        assert_eq!(r, q(1, 0, 1));
        assert_eq!(q(1, 2, 2).act(&g), r);
        assert_eq!(reduce(&q(2, 2, 3)), (q(2, 2, 3), UniMat::IDENTITY));
    }

    #[test]
    fn class_reps_examples() {
        assert_eq!(sl2_class_reps(3).unwrap(), vec![q(1, 1, 1)]);
        assert_eq!(sl2_class_reps(4).unwrap(), vec![q(1, 0, 1)]);
        assert_eq!(sl2_class_reps(20).unwrap(), vec![q(1, 0, 5), q(2, 2, 3)]);
        assert_eq!(sl2_class_reps(5).unwrap_err(), Error::InvalidDiscriminant(5));
        // includes imprimitive forms: D = 12 has [1,0,3] and 2*[1,1,1]
        assert_eq!(sl2_class_reps(12).unwrap(), vec![q(1, 0, 3), q(2, 2, 2)]);
    }

    #[test]
    fn automorphism_counts() {
        assert_eq!(automorphisms(&q(1, 1, 1)).len(), 3);
        assert_eq!(automorphisms(&q(1, 0, 1)).len(), 2);
        assert_eq!(automorphisms(&q(1, 0, 5)).len(), 1);
        for g in automorphisms(&q(1, 1, 1)) {
            assert_eq!(q(1, 1, 1).act(&g), q(1, 1, 1));
        }
    }

    #[test]
    fn transporter_examples() {
        assert_eq!(transporter(&q(1, 0, 5), &q(1, 0, 5)), vec![UniMat::IDENTITY]);
        let t = transporter(&q(1, 2, 2), &q(1, 0, 1));
        assert!(!t.is_empty());
        for g in t {
            assert_eq!(q(1, 2, 2).act(&g), q(1, 0, 1));
        }
        assert!(transporter(&q(1, 0, 5), &q(2, 2, 3)).is_empty());
    }

    #[test]
    fn coset_reps() {
        assert_eq!(gamma0_coset_reps(1), vec![UniMat::IDENTITY]);
        for n in 1..=30u64 {
            let reps = gamma0_coset_reps(n);
            assert_eq!(reps.len() as u64, gamma0_index(n), "N={n}");
            for (i, g1) in reps.iter().enumerate() {
                assert_eq!(g1.a * g1.d - g1.b * g1.c, 1);
                for g2 in &reps[i + 1..] {
                    assert!(!g1.mul(&g2.inv()).in_gamma0(n), "N={n}: {g1} ~ {g2}");
                }
            }
        }
        assert_eq!(gamma0_coset_reps(2).len(), 3);
        assert_eq!(gamma0_coset_reps(4).len(), 6);
    }

    #[test]
    fn gamma0_examples() {
        let c3 = gamma0_class_reps(3, 1).unwrap();
        assert_eq!(c3, vec![ClassRep { form: q(1, 1, 1), stab_order: 3 }]);
        let z = c3[0].cm_point(128);
        let (re, im) = z.to_f64_pair();
        assert!((re + 0.5).abs() < 1e-15 && (im - 3f64.sqrt() / 2.0).abs() < 1e-15);
        let c4 = gamma0_class_reps(4, 1).unwrap();
        assert_eq!(c4, vec![ClassRep { form: q(1, 0, 1), stab_order: 2 }]);
        let c20 = gamma0_class_reps(20, 1).unwrap();
        assert_eq!(c20.len(), 2);
        assert!(c20.iter().all(|c| c.stab_order == 1));
        assert_eq!(hurwitz_count(3, 1).unwrap(), Rational::from((1, 3)));
        assert_eq!(hurwitz_count(4, 1).unwrap(), Rational::from((1, 2)));
        assert_eq!(hurwitz_count(20, 1).unwrap(), 2);
    }

    #[test]
    fn empty_level_class_set_is_reported() {
        // -3 is not a square mod 8
        assert_eq!(
            gamma0_class_reps(3, 2).unwrap_err(),
            Error::NoSquareRoot { disc: 3, level: 2 }
        );
    }

    #[test]
    fn level_one_matches_sl2_count() {
        for d in (3..=500u64).filter(|d| d % 4 == 0 || d % 4 == 3) {
            assert_eq!(
                gamma0_class_reps(d, 1).unwrap().len(),
                sl2_class_reps(d).unwrap().len(),
                "D={d}"
            );
        }
    }

    /// For `gcd(D, N) = 1` each square root of `-D` mod `4N` carries a full copy of
    /// the level one classes.
    #[test]
    fn mass_formula_across_levels() {
        for n in 1..=6u64 {
            for d in (3..=120u64).filter(|d| (d % 4 == 0 || d % 4 == 3) && gcd(*d as i64, n as i64) == 1) {
                let roots = sqrt_classes_mod(-(d as i64), 4 * n).unwrap();
                if roots.is_empty() {
                    continue;
                }
                let mass = hurwitz_count(d, n).unwrap();
                let h = hurwitz_count(d, 1).unwrap();
                assert_eq!(mass, h * Rational::from(roots.len()), "D={d} N={n}");
            }
        }
    }

    /// Orbit counting over the coset decomposition, valid for every `(D, N)`.
    #[test]
    fn mass_matches_coset_count() {
        for n in 1..=8u64 {
            let cosets = gamma0_coset_reps(n);
            for d in (3..=150u64).filter(|d| d % 4 == 0 || d % 4 == 3) {
                let Ok(mass) = hurwitz_count(d, n) else { continue };
                let mut expect = Rational::new();
                for r in sl2_class_reps(d).unwrap() {
                    let hits = cosets
                        .iter()
                        .filter(|g| r.act(&g.inv()).a % n as i64 == 0)
                        .count();
                    expect += Rational::from((hits as i64, automorphisms(&r).len() as i64));
                }
                assert_eq!(mass, expect, "D={d} N={n}");
            }
        }
    }

    #[test]
    fn dedup_is_certified_and_exact() {
        for n in 1..=6u64 {
            for d in (3..=150u64).filter(|d| d % 4 == 0 || d % 4 == 3) {
                let Ok(e) = enumerate_classes(d, n) else { continue };
                for (i, a) in e.classes.iter().enumerate() {
                    assert_eq!(a.form.a % n as i64, 0);
                    assert_eq!(a.form.disc(), -(d as i64));
                    assert!((1..=3).contains(&a.stab_order));
                    for b in &e.classes[i + 1..] {
                        assert!(gamma0_transporter(&a.form, &b.form, n).is_none());
                    }
                }
                for (m, idx, g) in &e.merged {
                    assert!(g.in_gamma0(n));
                    assert_eq!(e.classes[*idx].form.act(g), *m);
                }
            }
        }
    }

    #[test]
    fn stabilizers_only_at_special_discriminants() {
        for n in 1..=6u64 {
            for d in (3..=300u64).filter(|d| d % 4 == 0 || d % 4 == 3) {
                let Ok(classes) = gamma0_class_reps(d, n) else { continue };
                for c in classes {
                    if c.stab_order > 1 {
                        let content = c.form.content();
                        let prim = d as i64 / (content * content);
                        assert!(prim == 3 || prim == 4, "D={d} N={n} {:?}", c);
                    }
                }
            }
        }
    }

    fn arb_mat() -> impl Strategy<Value = UniMat> {
        prop::collection::vec(0u8..4, 1..8).prop_map(|word| {
            word.iter().fold(UniMat::IDENTITY, |g, w| match w {
                0 => g.mul(&UniMat::t(1)),
                1 => g.mul(&UniMat::t(-1)),
                2 => g.mul(&UniMat::S),
                _ => g.mul(&UniMat::S.inv()),
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn action_law(a in -20i64..20, b in -20i64..20, c in -20i64..20, g1 in arb_mat(), g2 in arb_mat()) {
            let f = q(a, b, c);
            prop_assert_eq!(f.act(&g1).act(&g2), f.act(&g1.mul(&g2)));
            prop_assert_eq!(f.act(&g1).disc(), f.disc());
        }
    }

    proptest! {
        #[test]
        fn reduction_idempotent(a in 1i64..50, b in -60i64..60, c0 in 1i64..50) {
            let c = c0 + (b * b) / (4 * a) + 1;
            let f = q(a, b, c);
            prop_assume!(f.is_positive_definite());
            let (r, g) = reduce(&f);
            prop_assert!(r.is_reduced());
            prop_assert_eq!(f.act(&g), r);
            prop_assert_eq!(reduce(&r).0, r);
        }
    }
}
