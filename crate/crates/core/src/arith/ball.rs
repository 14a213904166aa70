//! Complex disk arithmetic with certified absolute error bounds.
//!
//! A [`CertifiedComplex`] is a midpoint computed in MPFR at a fixed
//! precision together with a radius `err`. Every operation returns a ball
//! that contains the exact result whenever the inputs contain their exact
//! values. Radii are kept at low precision and always rounded up.

use std::cmp::Ordering;
use std::fmt;

use rug::float::{Constant, Round};
use rug::ops::NegAssign;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Precision of error radii.
pub const RAD_PREC: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub bits: u32,
    pub guard_bits: u32,
}

impl Precision {
    pub fn new(bits: u32, guard_bits: u32) -> Result<Self> {
        if bits < 64 || guard_bits < 16 {
            return Err(Error::InvalidPrecision { bits, guard_bits });
        }
        Ok(Precision { bits, guard_bits })
    }

    /// Mantissa bits actually used for midpoints.
    pub fn working(&self) -> u32 {
        self.bits + self.guard_bits
    }

    pub fn doubled(&self) -> Self {
        Precision {
            bits: self.bits.saturating_mul(2),
            guard_bits: self.guard_bits,
        }
    }

    pub fn with_extra(&self, extra: u32) -> Self {
        Precision {
            bits: self.bits.saturating_add(extra),
            guard_bits: self.guard_bits,
        }
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            bits: 128,
            guard_bits: 32,
        }
    }
}

fn up<T>(val: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Up).0
}

fn down<T>(val: T) -> Float
where
    Float: rug::ops::AssignRound<T, Round = Round, Ordering = Ordering>,
{
    Float::with_val_round(RAD_PREC, val, Round::Down).0
}

/// One unit in the last place of `x` (zero for an exact zero).
fn ulp(x: &Float) -> Float {
    match x.get_exp() {
        Some(e) => {
            let mut u = Float::with_val(RAD_PREC, 1);
            u <<= e - x.prec() as i32;
            u
        }
        None => Float::new(RAD_PREC),
    }
}

/// Upper bound of `|re + i im|`.
fn mag_up(re: &Float, im: &Float) -> Float {
    up(re.hypot_ref(im))
}

fn mag_down(re: &Float, im: &Float) -> Float {
    down(re.hypot_ref(im))
}

/// `2^(-prec) * x`, rounded up.
fn rel(prec: u32, x: &Float) -> Float {
    let mut r = x.clone();
    r >>= prec as i32;
    r
}

/// A complex number `value` with `|exact - value| <= err`.
#[derive(Clone, Debug)]
pub struct CertifiedComplex {
    re: Float,
    im: Float,
    err: Float,
}

impl CertifiedComplex {
    pub fn new(re: Float, im: Float, err: Float) -> Self {
        debug_assert_eq!(re.prec(), im.prec());
        CertifiedComplex {
            re,
            im,
            err: up(&err),
        }
    }

    pub fn zero(prec: u32) -> Self {
        CertifiedComplex {
            re: Float::new(prec),
            im: Float::new(prec),
            err: Float::new(RAD_PREC),
        }
    }

    pub fn from_int(prec: u32, n: i64) -> Self {
        Self::from_integer(prec, &Integer::from(n))
    }

    pub fn from_integer(prec: u32, n: &Integer) -> Self {
        let re = Float::with_val(prec, n);
        let err = if Float::with_val(prec, &re - n).is_zero() {
            Float::new(RAD_PREC)
        } else {
            ulp(&re)
        };
        CertifiedComplex {
            re,
            im: Float::new(prec),
            err,
        }
    }

    pub fn from_rational(prec: u32, q: &Rational) -> Self {
        let re = Float::with_val(prec, q);
        let err = ulp(&re);
        CertifiedComplex {
            re,
            im: Float::new(prec),
            err,
        }
    }

    /// `a + b i` with exact rational parts.
    pub fn from_parts(prec: u32, re: &Rational, im: &Rational) -> Self {
        let r = Float::with_val(prec, re);
        let i = Float::with_val(prec, im);
        let err = up(&ulp(&r) + &ulp(&i));
        CertifiedComplex { re: r, im: i, err }
    }

    /// Square root of a nonnegative integer as a real ball.
    pub fn sqrt_int(prec: u32, n: &Integer) -> Self {
        let re = Float::with_val(prec, n).sqrt();
        let err = up(&ulp(&re) * 2u32);
        CertifiedComplex {
            re,
            im: Float::new(prec),
            err,
        }
    }

    pub fn pi(prec: u32) -> Self {
        let re = Float::with_val(prec, Constant::Pi);
        let err = ulp(&re);
        CertifiedComplex {
            re,
            im: Float::new(prec),
            err,
        }
    }

    /// `exp(pi i q)` for an exact rational `q`.
    pub fn exp_pi_i(prec: u32, q: &Rational) -> Self {
        // Reduce q modulo 2 exactly first so the rounded argument stays small.
        let two = Integer::from(2);
        let num = q.numer().clone();
        let den = q.denom().clone();
        let modulus = Integer::from(&two * &den);
        let reduced = Rational::from((num.modulo(&modulus), den));
        let x = Float::with_val(prec + 8, &reduced);
        let xerr = ulp(&x);
        let c = Float::with_val(prec, x.cos_pi_ref());
        let s = Float::with_val(prec, x.sin_pi_ref());
        // |d/dx e^{pi i x}| = pi < 4
        let err = up(&ulp(&c) + &ulp(&s));
        let err = up(&err + &up(&xerr * 4u32));
        CertifiedComplex { re: c, im: s, err }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn re(&self) -> &Float {
        &self.re
    }

    pub fn im(&self) -> &Float {
        &self.im
    }

    pub fn err(&self) -> &Float {
        &self.err
    }

    pub fn err_f64(&self) -> f64 {
        self.err.to_f64_round(Round::Up)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Enlarge the radius by `extra`.
    pub fn add_error(mut self, extra: &Float) -> Self {
        self.err = up(&self.err + extra);
        self
    }

    pub fn set_prec(&self, prec: u32) -> Self {
        let re = Float::with_val(prec, &self.re);
        let im = Float::with_val(prec, &self.im);
        let err = up(&up(&self.err + &ulp(&re)) + &ulp(&im));
        CertifiedComplex { re, im, err }
    }

    /// Upper bound on `|z|` over the whole ball.
    pub fn abs_upper(&self) -> Float {
        up(&mag_up(&self.re, &self.im) + &self.err)
    }

    /// Lower bound on `|z|` over the whole ball (zero if the ball contains 0).
    pub fn abs_lower(&self) -> Float {
        let m = down(&mag_down(&self.re, &self.im) - &self.err);
        if m.cmp0() == Some(Ordering::Less) {
            Float::new(RAD_PREC)
        } else {
            m
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.abs_lower().is_zero()
    }

    /// Upper bound for `log2 |z|` (negative infinity for the zero ball).
    pub fn log2_upper(&self) -> f64 {
        let a = self.abs_upper();
        match a.get_exp() {
            Some(e) => e as f64,
            None => f64::NEG_INFINITY,
        }
    }

    /// Whether the exact value `w` could lie in the ball.
    pub fn contains_rational(&self, w: &Rational) -> bool {
        let prec = self.prec() + 64;
        let dr = Float::with_val(prec, &self.re - w);
        let d = mag_down(&dr, &self.im);
        d <= self.err
    }

    /// Whether the two balls intersect.
    pub fn overlaps(&self, other: &Self) -> bool {
        let prec = self.prec().max(other.prec()) + 8;
        let dr = Float::with_val(prec, &self.re - &other.re);
        let di = Float::with_val(prec, &self.im - &other.im);
        mag_down(&dr, &di) <= up(&self.err + &other.err)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.re.neg_assign();
        out.im.neg_assign();
        out
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.im.neg_assign();
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        let re = Float::with_val(prec, &self.re + &other.re);
        let im = Float::with_val(prec, &self.im + &other.im);
        let err = up(&self.err + &other.err);
        let err = up(&err + &ulp(&re));
        let err = up(&err + &ulp(&im));
        CertifiedComplex { re, im, err }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.prec().max(other.prec());
        let re = Float::with_val(prec, self.re.mul_sub_mul_ref(&other.re, &self.im, &other.im));
        let im = Float::with_val(prec, self.re.mul_add_mul_ref(&other.im, &self.im, &other.re));
        let ma = mag_up(&self.re, &self.im);
        let mb = mag_up(&other.re, &other.im);
        let mut err = up(&ma * &other.err);
        err = up(&err + &up(&mb * &self.err));
        err = up(&err + &up(&self.err * &other.err));
        err = up(&err + &ulp(&re));
        err = up(&err + &ulp(&im));
        CertifiedComplex { re, im, err }
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Multiply by an exact integer.
    pub fn mul_int(&self, k: i64) -> Self {
        self.mul_integer(&Integer::from(k))
    }

    pub fn mul_integer(&self, k: &Integer) -> Self {
        let prec = self.prec();
        let re = Float::with_val(prec, &self.re * k);
        let im = Float::with_val(prec, &self.im * k);
        let kabs = up(Integer::from(k.abs_ref()));
        let mut err = up(&self.err * &kabs);
        err = up(&err + &ulp(&re));
        err = up(&err + &ulp(&im));
        CertifiedComplex { re, im, err }
    }

    /// Multiply by an exact rational.
    pub fn mul_rational(&self, q: &Rational) -> Self {
        let prec = self.prec();
        let re = Float::with_val(prec, &self.re * q);
        let im = Float::with_val(prec, &self.im * q);
        let qabs = up(Rational::from(q.abs_ref()));
        let mut err = up(&self.err * &qabs);
        err = up(&err + &ulp(&re));
        err = up(&err + &ulp(&im));
        CertifiedComplex { re, im, err }
    }

    /// Multiply by `i`.
    pub fn mul_i(&self) -> Self {
        let mut re = self.im.clone();
        re.neg_assign();
        CertifiedComplex {
            re,
            im: self.re.clone(),
            err: self.err.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        let prec = self.prec();
        let lower = self.abs_lower();
        if lower.is_zero() {
            return Err(Error::ContainsZero);
        }
        let mid_lower = mag_down(&self.re, &self.im);
        let wp = prec + 16;
        let den = Float::with_val(wp, self.re.mul_add_mul_ref(&self.re, &self.im, &self.im));
        let re = Float::with_val(prec, &self.re / &den);
        let mut im = Float::with_val(prec, &self.im / &den);
        im.neg_assign();
        // rounding: den carries relative error 2^-wp, each quotient 2^-prec.
        let one = Float::with_val(RAD_PREC, 1);
        let inv_mid = up(&one / &mid_lower);
        let mut err = rel(prec.saturating_sub(3), &inv_mid);
        // propagated: err / (|b| (|b| - err))
        let denom = down(&mid_lower * &lower);
        err = up(&err + &up(&self.err / &denom));
        CertifiedComplex { re, im, err }.check()
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow_int(&self, k: i64) -> Result<Self> {
        if k < 0 {
            return self.inv()?.pow_int(-k);
        }
        let mut result = CertifiedComplex::from_int(self.prec(), 1);
        let mut base = self.clone();
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        Ok(result)
    }

    /// `exp(z)`.
    pub fn exp(&self) -> Self {
        let prec = self.prec();
        let wp = prec + 8;
        let modulus = Float::with_val(wp, self.re.exp_ref());
        let (s, c) = Float::with_val(wp, &self.im).sin_cos(Float::new(wp));
        let re = Float::with_val(prec, &modulus * &c);
        let im = Float::with_val(prec, &modulus * &s);
        let m_up = up(&modulus);
        // propagated: |e^z| (e^err - 1)
        let em1 = up(self.err.exp_m1_ref());
        let mut err = up(&m_up * &em1);
        // midpoint rounding
        err = up(&err + &rel(wp.saturating_sub(3), &m_up));
        err = up(&err + &ulp(&re));
        err = up(&err + &ulp(&im));
        CertifiedComplex { re, im, err }
    }

    /// Principal square root. The ball must avoid the closed negative real axis:
    /// it has to lie in the open right or open upper half plane.
    pub fn sqrt(&self) -> Result<Self> {
        let prec = self.prec();
        let right = Float::with_val(RAD_PREC, &self.re - &self.err);
        let upper = Float::with_val(RAD_PREC, &self.im - &self.err);
        let in_right = right.cmp0() == Some(Ordering::Greater);
        let in_upper = upper.cmp0() == Some(Ordering::Greater);
        let in_lower = Float::with_val(RAD_PREC, &self.im + &self.err).cmp0() == Some(Ordering::Less);
        if !(in_right || in_upper || in_lower) {
            return Err(Error::BranchCut);
        }
        let wp = prec + 16;
        let r = Float::with_val(wp, self.re.hypot_ref(&self.im));
        let abs_re = Float::with_val(wp, self.re.abs_ref());
        let s = Float::with_val(wp, Float::with_val(wp, &r + &abs_re) / 2u32).sqrt();
        let (re, im) = if self.re.cmp0() != Some(Ordering::Less) {
            let t = Float::with_val(wp, &self.im / Float::with_val(wp, &s * 2u32));
            (Float::with_val(prec, &s), Float::with_val(prec, &t))
        } else {
            let t = Float::with_val(wp, self.im.abs_ref()) / Float::with_val(wp, &s * 2u32);
            let mut si = Float::with_val(prec, &s);
            if self.im.cmp0() == Some(Ordering::Less) {
                si.neg_assign();
            }
            (Float::with_val(prec, &t), si)
        };
        let sqrt_mid = up(r.sqrt_ref());
        let mut err = rel(wp.saturating_sub(6), &sqrt_mid);
        err = up(&err + &ulp(&re));
        err = up(&err + &ulp(&im));
        if !self.err.is_zero() {
            let lower = down(r.sqrt_ref());
            if lower.is_zero() {
                return Err(Error::BranchCut);
            }
            err = up(&err + &up(&self.err / &lower));
        }
        Ok(CertifiedComplex { re, im, err })
    }

    fn check(self) -> Result<Self> {
        if self.err.is_finite() && self.re.is_finite() && self.im.is_finite() {
            Ok(self)
        } else {
            Err(Error::PrecisionExhausted {
                cap: self.prec(),
                context: Some("non-finite ball".into()),
            })
        }
    }

    /// Imaginary part as a certified real ball `(value, err)`.
    pub fn imag_ball(&self) -> (Float, Float) {
        (self.im.clone(), self.err.clone())
    }
}

impl fmt::Display for CertifiedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.prec() as f64) * std::f64::consts::LOG10_2).min(30.0) as usize;
        write!(
            f,
            "({:.*e} + {:.*e} i) +/- {:.3e}",
            digits,
            self.re.to_f64(),
            digits,
            self.im.to_f64(),
            self.err.to_f64()
        )
    }
}
