//! Elementary number theory on machine integers.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

#[inline]
pub fn modp(a: i64, m: i64) -> i64 {
    a.rem_euclid(m)
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let (g, x, _) = ext_gcd(modp(a, m), m);
    (g == 1).then(|| modp(x, m))
}

/// The Kronecker symbol `(d/n)`.
///
/// Extends the Jacobi symbol with `(d/2)` given by `d mod 8`,
/// `(d/-1) = sign(d)` and `(d/0) = [|d| = 1]`.
pub fn kronecker(d: i64, n: i64) -> i32 {
    if n == 0 {
        return i32::from(d == 1 || d == -1);
    }
    let mut result = 1i32;
    let mut n = n as i128;
    let d = d as i128;
    if n < 0 {
        n = -n;
        if d < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        n >>= twos;
        if twos % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                result = -result;
            }
        }
    }
    // Jacobi symbol (d/n) for odd n > 0.
    let mut a = d.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut n = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// All `r mod 2N` with `r^2 = delta (mod 4N)`, where `modulus = 4N`.
pub fn sqrt_classes_mod(delta: i64, modulus: u64) -> Result<Vec<u64>> {
    if modulus == 0 || modulus % 4 != 0 {
        return Err(Error::InvalidModulus(modulus));
    }
    let m = modulus as i128;
    let target = (delta as i128).rem_euclid(m);
    Ok((0..modulus / 2)
        .filter(|&r| (r as i128 * r as i128) % m == target)
        .collect())
}

/// Whether `x` is congruent to a square modulo `m`.
pub fn is_square_mod(x: i64, m: u64) -> bool {
    let m = m as i128;
    let target = (x as i128).rem_euclid(m);
    (0..m).any(|r| (r * r) % m == target)
}

pub fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = isqrt(n as u64);
    r * r == n as u64
}

pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut p = 3u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 2;
    }
    true
}

/// Prime factorization as `(p, e)` pairs in increasing order of `p`.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Index of `Gamma_0(N)` in `SL_2(Z)`: `N * prod_{p | N} (1 + 1/p)`.
pub fn gamma0_index(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p + 1))
}

/// The Dedekind sum `s(h, k)` for `k > 0`, via the reciprocity law.
pub fn dedekind_sum(h: i64, k: i64) -> Rational {
    assert!(k > 0, "dedekind_sum needs k > 0");
    let g = gcd(h, k);
    let mut h = (h / g).rem_euclid(k / g);
    let mut k = k / g;
    let mut sign = 1i64;
    let mut acc = Rational::new();
    // s(h,k) + s(k,h) = (h/k + k/h + 1/(hk))/12 - 1/4
    while h != 0 {
        let term = Rational::from((h * h + k * k + 1, 12 * h * k)) - Rational::from((1, 4));
        if sign > 0 {
            acc += term;
        } else {
            acc -= term;
        }
        sign = -sign;
        let nh = k.rem_euclid(h);
        k = h;
        h = nh;
    }
    acc
}

/// Whether a nonzero rational is the square of a rational.
pub fn is_rational_square(q: &Rational) -> bool {
    if q.cmp0().is_lt() {
        return false;
    }
    q.numer().is_perfect_square() && q.denom().is_perfect_square()
}

/// The primes `r = -1 (mod modulus)` in increasing order, starting above `start`.
pub fn progression_primes(modulus: u64, start: u64) -> impl Iterator<Item = u64> {
    let first = {
        let s = start + 1;
        let rem = (s + 1) % modulus;
        if rem == 0 {
            s
        } else {
            s + (modulus - rem)
        }
    };
    (0..)
        .map(move |k| first + k * modulus)
        .filter(|&r| is_prime(r))
}

pub fn int_pow(base: i64, exp: u32) -> Integer {
    Integer::from(base).pow(exp)
}
