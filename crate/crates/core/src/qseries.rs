//! Truncated Laurent series in `q` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::kronecker;
use crate::arith::numtheory::divisors;
use crate::error::{Error, Result};
use crate::serde_rational;

/// `sum a(n) q^n + O(q^prec)`; only nonzero coefficients below `prec` are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    prec: i64,
    coeffs: BTreeMap<i64, Rational>,
}

impl QSeries {
    pub fn zero(prec: i64) -> Self {
        QSeries {
            prec,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(prec: i64, terms: I) -> Self {
        let mut s = QSeries::zero(prec);
        for (n, c) in terms {
            s.add_term(n, c);
        }
        s
    }

    pub fn from_ints(prec: i64, terms: &[(i64, i64)]) -> Self {
        QSeries::from_terms(prec, terms.iter().map(|&(n, c)| (n, Rational::from(c))))
    }

    pub fn constant(c: Rational, prec: i64) -> Self {
        QSeries::from_terms(prec, [(0, c)])
    }

    /// Adds `c q^n`; ignored at or beyond the precision.
    pub fn add_term(&mut self, n: i64, c: Rational) {
        if n >= self.prec || c == 0 {
            return;
        }
        let e = self.coeffs.entry(n).or_default();
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&n);
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    /// The coefficient of `q^n`; panics at or above the precision.
    pub fn coeff(&self, n: i64) -> Rational {
        assert!(n < self.prec, "coefficient q^{n} unknown below O(q^{})", self.prec);
        self.coeffs.get(&n).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rational)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    /// Lowest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        QSeries {
            prec,
            coeffs: self.coeffs.range(..prec).map(|(n, c)| (*n, c.clone())).collect(),
        }
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let mut s = self.truncate(self.prec.min(o.prec));
        for (n, c) in o.terms() {
            s.add_term(n, c.clone());
        }
        s
    }

    pub fn neg(&self) -> QSeries {
        self.scale(&Rational::from(-1))
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> QSeries {
        QSeries::from_terms(self.prec, self.terms().map(|(n, c)| (n, Rational::from(c * q))))
    }

    /// Multiplication by `q^k`.
    pub fn shift(&self, k: i64) -> QSeries {
        QSeries {
            prec: self.prec + k,
            coeffs: self.coeffs.iter().map(|(n, c)| (n + k, c.clone())).collect(),
        }
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let (Some(v1), Some(v2)) = (self.valuation(), o.valuation()) else {
            let prec = match (self.valuation(), o.valuation()) {
                (None, Some(v)) => self.prec + v,
                (Some(v), None) => o.prec + v,
                _ => self.prec.min(o.prec),
            };
            return QSeries::zero(prec);
        };
        let prec = (self.prec + v2).min(o.prec + v1);
        let mut out = QSeries::zero(prec);
        for (n, a) in self.terms() {
            if n + v2 >= prec {
                break;
            }
            for (m, b) in o.terms() {
                if n + m >= prec {
                    break;
                }
                out.add_term(n + m, Rational::from(a * b));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> QSeries {
        let mut result = QSeries::constant(Rational::from(1), i64::MAX / 4);
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        if k == 0 {
            return QSeries::constant(Rational::from(1), self.prec - self.valuation().unwrap_or(0));
        }
        result
    }

    /// Multiplicative inverse of a series with nonzero lowest coefficient.
    pub fn invert(&self) -> Result<QSeries> {
        let v = self.valuation().ok_or(Error::NotInvertible)?;
        let unit = self.shift(-v);
        let p = unit.prec;
        if p <= 0 {
            return Err(Error::NotInvertible);
        }
        let a0 = unit.coeff(0);
        let mut inv: Vec<Rational> = Vec::with_capacity(p as usize);
        inv.push(Rational::from(a0.recip_ref()));
        for n in 1..p {
            let mut acc = Rational::new();
            for (k, c) in unit.coeffs.range(1..=n) {
                acc += Rational::from(c * &inv[(n - k) as usize]);
            }
            inv.push(-acc / &a0);
        }
        let u = QSeries::from_terms(p, inv.into_iter().enumerate().map(|(n, c)| (n as i64, c)));
        Ok(u.shift(-v))
    }

    /// `a(n) -> a(m n)`.
    pub fn u_op(&self, m: u64) -> QSeries {
        let m = m as i64;
        let prec = div_ceil(self.prec, m);
        QSeries::from_terms(
            prec,
            self.terms()
                .filter(|(n, _)| n % m == 0)
                .map(|(n, c)| (n / m, c.clone())),
        )
    }

    /// `q -> q^m`.
    pub fn v_op(&self, m: u64) -> QSeries {
        let m = m as i64;
        QSeries::from_terms(self.prec * m, self.terms().map(|(n, c)| (n * m, c.clone())))
    }

    /// Keeps exactly the coefficients with `(n/t) = sign`.
    pub fn sieve(&self, t: u64, sign: i32) -> QSeries {
        QSeries::from_terms(
            self.prec,
            self.terms()
                .filter(|(n, _)| kronecker(*n, t as i64) == sign)
                .map(|(n, c)| (n, c.clone())),
        )
    }

    /// Keeps exactly the coefficients with `(n/t) = -1`.
    pub fn sieve_minus(&self, t: u64) -> Result<QSeries> {
        if t % 2 == 0 {
            return Err(Error::InvalidParameter(format!("sieve modulus must be odd, got {t}")));
        }
        Ok(self.sieve(t, -1))
    }

    /// Coefficients reduced into `[0, M)`.
    pub fn reduce_mod(&self, modulus: u64) -> Result<QSeries> {
        if modulus == 0 {
            return Err(Error::InvalidParameter("modulus must be positive".into()));
        }
        let m = Integer::from(modulus);
        let mut out = QSeries::zero(self.prec);
        for (n, c) in self.terms() {
            if *c.denom() != 1 {
                return Err(Error::NonIntegral(n));
            }
            out.add_term(n, Rational::from(c.numer().clone().modulo(&m)));
        }
        Ok(out)
    }

    pub fn is_integral(&self) -> bool {
        self.terms().all(|(_, c)| *c.denom() == 1)
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.terms() {
            write!(f, "{}*q^{} + ", serde_rational::render(c), n)?;
        }
        write!(f, "O(q^{})", self.prec)
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    prec: i64,
    terms: Vec<(i64, String)>,
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            prec: self.prec,
            terms: self.terms().map(|(n, c)| (n, serde_rational::render(c))).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for QSeries {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = SeriesJson::deserialize(d)?;
        let mut terms = Vec::with_capacity(raw.terms.len());
        for (n, c) in raw.terms {
            if n >= raw.prec {
                return Err(D::Error::custom(format!("term q^{n} at or above prec {}", raw.prec)));
            }
            terms.push((n, serde_rational::parse(&c).map_err(D::Error::custom)?));
        }
        Ok(QSeries::from_terms(raw.prec, terms))
    }
}

/// `1 + 2 sum q^{n^2} + O(q^P)`.
pub fn theta_series(prec: i64) -> QSeries {
    let mut s = QSeries::constant(Rational::from(1), prec);
    let mut n = 1i64;
    while n * n < prec {
        s.add_term(n * n, Rational::from(2));
        n += 1;
    }
    s
}

/// `prod_{n >= 1} (1 - q^{d n})^e + O(q^P)` for integer `e`.
pub fn euler_product(d: u64, e: i64, prec: i64) -> QSeries {
    // (1 - q^k)^e one factor at a time, as a dense vector
    let len = prec.max(1) as usize;
    let mut v = vec![Integer::new(); len];
    v[0] = Integer::from(1);
    let d = d as usize;
    let mut k = d;
    while k < len {
        if e >= 0 {
            for _ in 0..e {
                for i in (k..len).rev() {
                    let t = v[i - k].clone();
                    v[i] -= t;
                }
            }
        } else {
            for _ in 0..(-e) {
                for i in k..len {
                    let t = v[i - k].clone();
                    v[i] += t;
                }
            }
        }
        k += d;
    }
    QSeries::from_terms(prec, v.into_iter().enumerate().map(|(n, c)| (n as i64, Rational::from(c))))
}

/// `q prod (1 - q^n)^24 + O(q^P)`.
pub fn delta_series(prec: i64) -> QSeries {
    euler_product(1, 24, prec - 1).shift(1)
}

/// `Delta = q (sum (-1)^k (2k+1) q^{k(k+1)/2})^8`, an expansion independent of the product.
pub fn delta_series_jacobi(prec: i64) -> QSeries {
    let mut cube = QSeries::zero(prec - 1);
    let mut k = 0i64;
    while k * (k + 1) / 2 < prec - 1 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        cube.add_term(k * (k + 1) / 2, Rational::from(sign * (2 * k + 1)));
        k += 1;
    }
    cube.pow(8).truncate(prec - 1).shift(1)
}

/// `E_4 = 1 + 240 sum sigma_3(n) q^n + O(q^P)`.
pub fn eisenstein_e4(prec: i64) -> QSeries {
    let mut s = QSeries::constant(Rational::from(1), prec);
    for n in 1..prec {
        let sigma: Integer = divisors(n as u64).into_iter().map(|d| Integer::from(d).pow(3)).sum();
        s.add_term(n, Rational::from(sigma * 240));
    }
    s
}

/// `j = E_4^3 / Delta = q^{-1} + 744 + 196884 q + ... + O(q^P)`.
pub fn j_series(prec: i64) -> QSeries {
    let p = prec.max(0) + 2;
    let e4 = eisenstein_e4(p);
    e4.pow(3)
        .mul(&delta_series(p).invert().expect("Delta has leading coefficient 1"))
        .truncate(prec)
}

/// `Theta = eta(2z)^5 / (eta(z)^2 eta(4z)^2)`, as a product of Euler products.
pub fn theta_series_eta(prec: i64) -> QSeries {
    euler_product(2, 5, prec)
        .mul(&euler_product(1, -2, prec))
        .mul(&euler_product(4, -2, prec))
}
