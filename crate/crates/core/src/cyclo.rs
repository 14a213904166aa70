//! Exact elements of cyclotomic fields, stored in the group ring `Q[Z/k]`
//! and compared after reduction modulo the cyclotomic polynomial.

use std::fmt;

use rug::{Integer, Rational};

use std::collections::BTreeMap;

use rug::ops::Pow;

use crate::arith::numtheory::{divisors, factorize, gcd, lcm};
use crate::arith::{kronecker, CertifiedComplex};
use crate::error::{Error, Result};

/// `sum_j c_j zeta_k^j`, stored sparsely.
#[derive(Clone, Debug)]
pub struct Cyclo {
    order: u64,
    terms: BTreeMap<u64, Rational>,
}

/// Integer coefficients of `Phi_k`, lowest degree first.
pub fn cyclotomic_poly(k: u64) -> Vec<Integer> {
    // x^k - 1 divided by Phi_d for every proper divisor d
    let mut num = vec![Integer::new(); k as usize + 1];
    num[0] = Integer::from(-1);
    num[k as usize] = Integer::from(1);
    for d in divisors(k) {
        if d == k {
            continue;
        }
        num = poly_div_exact(&num, &cyclotomic_poly(d));
    }
    num
}

fn poly_div_exact(num: &[Integer], den: &[Integer]) -> Vec<Integer> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quo = vec![Integer::new(); rem.len() - dd];
    for i in (0..quo.len()).rev() {
        let c = Integer::from(&rem[i + dd] / &den[dd]);
        for (j, dc) in den.iter().enumerate() {
            rem[i + j] -= Integer::from(&c * dc);
        }
        quo[i] = c;
    }
    debug_assert!(rem.iter().all(|r| *r == 0));
    quo
}

impl Cyclo {
    pub fn zero(order: u64) -> Self {
        Cyclo {
            order: order.max(1),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_rational(q: Rational) -> Self {
        Cyclo::monomial(1, 0, q)
    }

    pub fn one() -> Self {
        Cyclo::from_rational(Rational::from(1))
    }

    /// `c * zeta_k^j`.
    pub fn monomial(order: u64, j: i64, c: Rational) -> Self {
        let mut z = Cyclo::zero(order);
        if c != 0 {
            z.terms.insert(j.rem_euclid(order as i64) as u64, c);
        }
        z
    }

    /// `e(x) = exp(2 pi i x)` for rational `x`.
    pub fn e(x: &Rational) -> Self {
        let k = x.denom().to_u64().expect("phase denominator too large");
        let j = Integer::from(x.numer() % Integer::from(k)).to_i64().unwrap();
        Cyclo::monomial(k, j, Rational::from(1))
    }

    /// `sqrt(n)` for a positive integer, through Gauss sums.
    pub fn sqrt_int(n: u64) -> Self {
        assert!(n > 0, "sqrt of zero");
        let mut out = Cyclo::one();
        for (p, e) in factorize(n) {
            let pk = Rational::from(Integer::from(p).pow(e / 2));
            out = out.scale(&pk);
            if e % 2 == 1 {
                out = out.mul(&sqrt_prime(p));
            }
        }
        out
    }

    /// `sqrt(q)` for a positive rational.
    /// `sqrt(d)`, taking `i sqrt(-d)` for `d < 0`.
    pub fn sqrt_signed(d: i64) -> Self {
        let r = Cyclo::sqrt_int(d.unsigned_abs());
        if d < 0 {
            r.mul(&Cyclo::monomial(4, 1, Rational::from(1)))
        } else {
            r
        }
    }

    pub fn sqrt_rational(q: &Rational) -> Self {
        assert!(q.cmp0().is_gt(), "sqrt of a nonpositive rational");
        let num = q.numer().to_u64().expect("numerator too large");
        let den = q.denom().to_u64().expect("denominator too large");
        Cyclo::sqrt_int(num * den).scale(&Rational::from((1, den)))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.terms.iter().map(|(j, c)| (*j, c))
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    fn lift(&self, order: u64) -> Cyclo {
        if order == self.order {
            return self.clone();
        }
        let step = order / self.order;
        Cyclo {
            order,
            terms: self.terms.iter().map(|(j, c)| (j * step, c.clone())).collect(),
        }
    }

    fn push(&mut self, j: u64, c: Rational) {
        let e = self.terms.entry(j % self.order).or_default();
        *e += c;
        if *e == 0 {
            self.terms.remove(&(j % self.order));
        }
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        let k = lcm(self.order as i64, o.order as i64) as u64;
        let mut a = self.lift(k);
        for (j, c) in o.lift(k).terms {
            a.push(j, c);
        }
        a
    }

    pub fn neg(&self) -> Cyclo {
        self.scale(&Rational::from(-1))
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rational) -> Cyclo {
        if *q == 0 {
            return Cyclo::zero(self.order);
        }
        Cyclo {
            order: self.order,
            terms: self.terms.iter().map(|(j, c)| (*j, Rational::from(c * q))).collect(),
        }
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let k = lcm(self.order as i64, o.order as i64) as u64;
        let a = self.lift(k);
        let b = o.lift(k);
        let mut z = Cyclo::zero(k);
        for (i, x) in &a.terms {
            for (j, y) in &b.terms {
                z.push(i + j, Rational::from(x * y));
            }
        }
        z
    }

    /// Image under `zeta -> zeta^u` for `u` prime to the order.
    fn galois(&self, u: u64) -> Cyclo {
        let mut z = Cyclo::zero(self.order);
        for (j, c) in &self.terms {
            z.push(j * u, c.clone());
        }
        z
    }

    pub fn inv(&self) -> Result<Cyclo> {
        if self.is_monomial() {
            let (j, c) = self.terms.iter().next().unwrap();
            return Ok(Cyclo::monomial(self.order, -(*j as i64), Rational::from(c.recip_ref())));
        }
        let k = self.order;
        let mut rest = Cyclo::one();
        for u in 2..k {
            if gcd(u as i64, k as i64) == 1 {
                rest = rest.mul(&self.galois(u));
                rest = rest.compact();
            }
        }
        let norm = self.mul(&rest).to_rational().ok_or(Error::NotInvertible)?;
        if norm == 0 {
            return Err(Error::NotInvertible);
        }
        Ok(rest.scale(&Rational::from(norm.recip_ref())))
    }

    /// Same value, reduced modulo the cyclotomic polynomial.
    pub fn compact(&self) -> Cyclo {
        let r = self.reduced();
        let mut z = Cyclo::zero(self.order);
        for (j, c) in r.into_iter().enumerate() {
            z.push(j as u64, c);
        }
        z
    }

    /// Canonical coordinates in the power basis `1, zeta, ..., zeta^{phi(k)-1}`.
    pub fn reduced(&self) -> Vec<Rational> {
        let phi = cyclotomic_poly(self.order);
        let deg = phi.len() - 1;
        let mut rem = vec![Rational::new(); self.order as usize];
        for (j, c) in &self.terms {
            rem[*j as usize] += c;
        }
        for i in (deg..rem.len()).rev() {
            let c = rem[i].clone();
            if c == 0 {
                continue;
            }
            for (j, p) in phi.iter().enumerate() {
                rem[i - deg + j] -= Rational::from(&c * p);
            }
        }
        rem.truncate(deg);
        rem
    }

    pub fn is_zero(&self) -> bool {
        match self.terms.len() {
            0 => true,
            1 => false,
            _ => self.reduced().iter().all(|c| *c == 0),
        }
    }

    /// The value if it lies in `Q`.
    pub fn to_rational(&self) -> Option<Rational> {
        if self.terms.is_empty() {
            return Some(Rational::new());
        }
        if self.terms.len() == 1 {
            if let Some(c) = self.terms.get(&0) {
                return Some(c.clone());
            }
        }
        let r = self.reduced();
        r[1..].iter().all(|c| *c == 0).then(|| r[0].clone())
    }

    pub fn eq_exact(&self, o: &Cyclo) -> bool {
        self.sub(o).is_zero()
    }

    pub fn to_complex(&self, prec: u32) -> CertifiedComplex {
        let mut acc = CertifiedComplex::zero(prec);
        for (j, c) in &self.terms {
            let z = CertifiedComplex::exp_pi_i(prec, &Rational::from((2 * *j as i64, self.order as i64)));
            acc = acc.add(&z.mul_rational(c));
        }
        acc
    }
}

/// `sqrt(p)` for a prime `p`.
fn sqrt_prime(p: u64) -> Cyclo {
    if p == 2 {
        // zeta_8 + zeta_8^{-1}
        return Cyclo::monomial(8, 1, Rational::from(1)).add(&Cyclo::monomial(8, 7, Rational::from(1)));
    }
    let mut g = Cyclo::zero(p);
    for j in 1..p as i64 {
        g.push(j as u64, Rational::from(kronecker(j, p as i64)));
    }
    if p % 4 == 1 {
        g
    } else {
        // g = i sqrt(p)
        g.mul(&Cyclo::monomial(4, 3, Rational::from(1)))
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.to_rational() {
            return write!(f, "{}", crate::serde_rational::render(&q));
        }
        let terms: Vec<String> = self
            .reduced()
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0)
            .map(|(j, c)| format!("{}*e({}/{})", crate::serde_rational::render(c), j, self.order))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        let ints = |v: Vec<Integer>| v.iter().map(|x| x.to_i64().unwrap()).collect::<Vec<_>>();
        assert_eq!(ints(cyclotomic_poly(1)), vec![-1, 1]);
        assert_eq!(ints(cyclotomic_poly(4)), vec![1, 0, 1]);
        assert_eq!(ints(cyclotomic_poly(6)), vec![1, -1, 1]);
        assert_eq!(ints(cyclotomic_poly(12)), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity_sum_to_zero() {
        for k in 2..=24u64 {
            let mut s = Cyclo::zero(k);
            for j in 0..k as i64 {
                s = s.add(&Cyclo::monomial(k, j, Rational::from(1)));
            }
            assert!(s.is_zero(), "k={k}");
        }
    }

    #[test]
    fn gauss_sum_squares_to_five() {
        // sum (j/5) zeta_5^j = sqrt(5)
        let mut g = Cyclo::zero(5);
        for j in 1..5i64 {
            let s = crate::arith::kronecker(j, 5);
            g = g.add(&Cyclo::monomial(5, j, Rational::from(s)));
        }
        assert!(g.to_rational().is_none());
        assert_eq!(g.mul(&g).to_rational().unwrap(), 5);
        let (re, im) = g.to_complex(128).to_f64_pair();
        assert!((re - 5f64.sqrt()).abs() < 1e-14 && im.abs() < 1e-14);
    }

    #[test]
    fn square_roots() {
        for n in 1..=60u64 {
            let r = Cyclo::sqrt_int(n);
            assert_eq!(r.mul(&r).to_rational().unwrap(), n, "n={n}");
            let (re, im) = r.to_complex(128).to_f64_pair();
            assert!((re - (n as f64).sqrt()).abs() < 1e-12 && im.abs() < 1e-12, "n={n}");
        }
        let h = Cyclo::sqrt_rational(&Rational::from((3, 8)));
        assert_eq!(h.mul(&h).to_rational().unwrap(), Rational::from((3, 8)));
    }

    #[test]
    fn inverses() {
        let x = Cyclo::sqrt_int(5).add(&Cyclo::e(&Rational::from((1, 3))));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y).to_rational().unwrap(), 1);
        let m = Cyclo::monomial(12, 5, Rational::from(3));
        assert_eq!(m.mul(&m.inv().unwrap()).to_rational().unwrap(), 1);
        assert!(Cyclo::zero(5).inv().is_err());
    }

    #[test]
    fn mixed_orders() {
        let i = Cyclo::e(&Rational::from((1, 4)));
        let minus_one = i.mul(&i);
        assert_eq!(minus_one.to_rational().unwrap(), -1);
        let w = Cyclo::e(&Rational::from((1, 3)));
        let sum = w.add(&w.mul(&w)).add(&Cyclo::from_rational(Rational::from(1)));
        assert!(sum.is_zero());
        let x = i.add(&w);
        let y = w.add(&i);
        assert!(x.eq_exact(&y));
        assert_eq!(Cyclo::e(&Rational::from((-1, 2))).to_rational().unwrap(), -1);
    }
}
