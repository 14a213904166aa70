//! The generalized genus character `chi_Delta` on forms `[N a', b, c]`.

use serde::{Deserialize, Serialize};

use crate::arith::numtheory::{divisors, gcd, is_fundamental_discriminant, kronecker, sqrt_classes_mod};
use crate::error::{Error, Result};
use crate::forms::QForm;
use crate::lattice::LatticeVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenusCharSpec {
    pub delta: i64,
    pub level: u64,
    /// A square root of `delta` modulo `4N`, reduced mod `2N`. Metadata only.
    pub root: u64,
}

impl GenusCharSpec {
    pub fn new(delta: i64, level: u64, root: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        if !is_fundamental_discriminant(delta) {
            return Err(Error::NotFundamental(delta));
        }
        let root = root % (2 * level);
        if !sqrt_classes_mod(delta, 4 * level)?.contains(&root) {
            return Err(Error::BadRoot { delta, level, root: root as i64 });
        }
        Ok(GenusCharSpec { delta, level, root })
    }

    /// Uses the smallest admissible root.
    pub fn with_default_root(delta: i64, level: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("level must be positive".into()));
        }
        let roots = sqrt_classes_mod(delta, 4 * level)?;
        let Some(&r) = roots.first() else {
            return Err(Error::BadRoot { delta, level, root: 0 });
        };
        GenusCharSpec::new(delta, level, r)
    }

    pub fn trivial(level: u64) -> Self {
        GenusCharSpec { delta: 1, level, root: 1 % (2 * level) }
    }

    /// Default representation search bound `10 (|Delta| + 1)`.
    pub fn default_budget(&self) -> i64 {
        10 * (self.delta.abs() + 1)
    }

    /// Whether the form passes the support conditions, i.e. `chi` is `(Delta/n)`
    /// rather than `0`.
    pub fn eligible(&self, q: &QForm) -> Result<bool> {
        let n = self.level as i64;
        if q.a.rem_euclid(n) != 0 {
            return Err(Error::NotOnLevel(format!("{q} at N={n}")));
        }
        if *q == QForm::new(0, 0, 0) {
            return Ok(false);
        }
        let disc = q.disc();
        if disc % self.delta != 0 {
            return Ok(false);
        }
        let quot = disc / self.delta;
        let m = 4 * n;
        let target = quot.rem_euclid(m);
        if !(0..m).any(|r| (r * r) % m == target) {
            return Ok(false);
        }
        Ok(gcd(gcd(gcd(q.a / n, q.b), q.c), self.delta) == 1)
    }
}

/// Integers `n` prime to `Delta` represented by `[N1 a', b, N2 c]` with `N1 N2 = N`,
/// visited shell by shell in `max(|x|, |y|)` up to `bound`. Stops after `limit` hits.
pub fn admissible_values(spec: &GenusCharSpec, q: &QForm, bound: i64, limit: usize) -> Vec<(i64, u64)> {
    let n = spec.level as i64;
    let a1 = q.a / n;
    let facs = divisors(spec.level);
    let mut out = Vec::new();
    for s in 0..=bound {
        for &n1 in &facs {
            let n2 = spec.level / n1;
            let f = QForm::new(n1 as i64 * a1, q.b, n2 as i64 * q.c);
            for x in -s..=s {
                for y in -s..=s {
                    if x.abs().max(y.abs()) != s {
                        continue;
                    }
                    let v = f.eval(x, y);
                    if v != 0 && gcd(v, spec.delta) == 1 {
                        out.push((v, n1));
                        if out.len() >= limit {
                            return out;
                        }
                    }
                }
            }
        }
    }
    out
}

/// `chi_Delta(Q)` with an explicit search bound.
pub fn chi_with_budget(spec: &GenusCharSpec, q: &QForm, bound: i64) -> Result<i32> {
    if !spec.eligible(q)? {
        return Ok(0);
    }
    if spec.delta == 1 {
        return Ok(1);
    }
    match admissible_values(spec, q, bound, 1).first() {
        Some(&(v, _)) => Ok(kronecker(spec.delta, v)),
        None => Err(Error::CharacterBudget {
            bound,
            form: q.to_string(),
        }),
    }
}

pub fn chi(spec: &GenusCharSpec, q: &QForm) -> Result<i32> {
    chi_with_budget(spec, q, spec.default_budget())
}

pub fn chi_lattice(spec: &GenusCharSpec, x: &LatticeVec) -> Result<i32> {
    if x.is_zero() {
        return Ok(0);
    }
    chi(spec, &x.form_of())
}
