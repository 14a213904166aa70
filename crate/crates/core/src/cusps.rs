//! Cusps of `Gamma_0(N)` with scaling matrices, widths and the lattice constants
//! `beta`, `eps = width / beta`.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::numtheory::{divisors, ext_gcd, gcd, modp};
use crate::forms::UniMat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cusp {
    /// `(num : den)` in lowest terms with `den >= 0`; `(1 : 0)` is infinity.
    pub point: (i64, i64),
    pub sigma: UniMat,
    /// `alpha`, an integer for `Gamma_0(N)` but kept rational like the other constants.
    #[serde(with = "crate::serde_rational")]
    pub width: Rational,
    #[serde(with = "crate::serde_rational")]
    pub beta: Rational,
    #[serde(with = "crate::serde_rational")]
    pub eps: Rational,
}

impl Cusp {
    pub fn is_infinity(&self) -> bool {
        self.point.1 == 0
    }

    pub fn label(&self) -> String {
        match self.point {
            (_, 0) => "inf".into(),
            (n, 1) => n.to_string(),
            (n, d) => format!("{n}/{d}"),
        }
    }

    pub fn from_sigma(sigma: UniMat, level: u64) -> Cusp {
        let width = Rational::from(width_of(&sigma, level));
        let beta = beta_of_sigma(&sigma, level);
        let eps = Rational::from(&width / &beta);
        Cusp {
            point: sigma.apply_cusp((1, 0)),
            sigma,
            width,
            beta,
            eps,
        }
    }
}

/// `N / gcd(c^2, N)` for `sigma = (a, b; c, d)`.
pub fn width_of(sigma: &UniMat, level: u64) -> i64 {
    let n = level as i64;
    let c = sigma.c.rem_euclid(n);
    n / gcd(c * c, n)
}

/// Smallest positive rational `s` with `s * k` in `m Z`, combined over all
/// nonzero `k` in `conds`: the least common multiple of the rationals `m / k`.
fn rational_lcm(conds: &[(i64, i64)]) -> Rational {
    let mut num = Integer::from(1);
    let mut den = Integer::from(0);
    for &(k, m) in conds {
        if k == 0 {
            continue;
        }
        let q = Rational::from((m, k.abs()));
        num = num.lcm(q.numer());
        den = den.gcd(q.denom());
    }
    Rational::from((num, den))
}

/// The `beta > 0` with `(0, beta; 0, 0)` primitive in `sigma^{-1} L`.
pub fn beta_of_sigma(sigma: &UniMat, level: u64) -> Rational {
    // sigma X_0 sigma^{-1} = (-ac, a^2; -c^2, ac); L = (x, y; z, -x), y in 2Z, z in 2NZ
    let (a, c) = (sigma.a, sigma.c);
    rational_lcm(&[(a * c, 1), (a * a, 2), (c * c, 2 * level as i64)])
}

pub fn beta_of(cusp: &Cusp, level: u64) -> Rational {
    beta_of_sigma(&cusp.sigma, level)
}

/// Completion of `a/c`, `c > 0`, to `(a, b; c, d)` with `0 <= d < c`.
fn complete(a: i64, c: i64) -> UniMat {
    let (_, x, y) = ext_gcd(a, c);
    // a x + c y = 1: d = x, b = -y
    let k = x.div_euclid(c);
    let (d, b) = (x - k * c, -y - k * a);
    UniMat { a, b, c, d }
}

/// One cusp per `Gamma_0(N)`-class: `a/c` with `c | N`, `a` modulo `gcd(c, N/c)`.
pub fn cusp_reps(level: u64) -> Vec<Cusp> {
    let n = level as i64;
    let mut out = Vec::new();
    for c in divisors(level).into_iter().map(|c| c as i64) {
        if c == n {
            out.push(Cusp::from_sigma(UniMat::IDENTITY, level));
            continue;
        }
        let g = gcd(c, n / c);
        let mut seen = Vec::new();
        let mut a = 0;
        while seen.len() < crate::arith::numtheory::euler_phi(g as u64) as usize {
            if gcd(a, c) == 1 && gcd(a, g) == 1 && !seen.contains(&modp(a, g)) {
                seen.push(modp(a, g));
                out.push(Cusp::from_sigma(complete(a, c), level));
            }
            a += 1;
        }
    }
    out
}

/// Some `sigma in SL_2(Z)` with `sigma (1:0) = p`.
pub fn sigma_for(p: (i64, i64)) -> UniMat {
    let (a, c) = p;
    if c == 0 {
        return UniMat::IDENTITY;
    }
    let (a, c) = if c < 0 { (-a, -c) } else { (a, c) };
    complete(a, c)
}

/// The index of the representative equivalent to `p`, and `gamma in Gamma_0(N)`
/// with `gamma (rep) = p`.
pub fn cusp_class(reps: &[Cusp], level: u64, p: (i64, i64)) -> (usize, UniMat) {
    let sp = sigma_for(p);
    for (i, rep) in reps.iter().enumerate() {
        let si = rep.sigma.inv();
        for k in 0..level as i64 {
            let g = sp.mul(&UniMat::t(k)).mul(&si);
            if g.in_gamma0(level) {
                return (i, g);
            }
        }
    }
    unreachable!("cusp representatives are complete")
}
