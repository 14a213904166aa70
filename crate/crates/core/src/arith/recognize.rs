use rug::float::Round;
use rug::{Float, Integer, Rational};

use super::ball::CertifiedComplex;
use crate::error::{Error, Result};

/// Recover the unique rational `p/q` with `q <= max_den` inside the ball.
///
/// Requires `err < 2^-10 / (4 max_den^2)`: uniqueness only needs
/// `1/(4 max_den^2)`, the extra margin rejects answers that are merely
/// plausible at the current precision. The imaginary part must be
/// consistent with zero.
pub fn recognize_rational(x: &CertifiedComplex, max_den: u64) -> Result<Rational> {
    let fail = Error::RecognitionFailed { max_den };
    if max_den == 0 {
        return Err(fail);
    }
    let bound = Float::with_val(64, 1) / Float::with_val(64, 4096u64 * max_den * max_den);
    if x.err() >= &bound {
        return Err(fail);
    }
    let im_abs = Float::with_val(x.prec(), x.im().abs_ref());
    if im_abs > *x.err() {
        return Err(fail);
    }
    for q in 1..=max_den {
        let scaled = Float::with_val(x.prec() + 64, x.re() * q);
        let Some((p, _)) = scaled.to_integer_round(Round::Nearest) else {
            return Err(fail);
        };
        let cand = Rational::from((p, Integer::from(q)));
        if x.contains_rational(&cand) {
            return Ok(cand);
        }
    }
    Err(fail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn approx(prec: u32, v: &Rational, err: f64) -> CertifiedComplex {
        CertifiedComplex::from_rational(prec, v).add_error(&Float::with_val(32, err))
    }

    #[test]
    fn recognizes_examples() {
        let x = approx(128, &Rational::from(984), 1e-20);
        assert_eq!(recognize_rational(&x, 6).unwrap(), 984);
        let h = approx(128, &Rational::from((1, 2)), 1e-20);
        assert_eq!(recognize_rational(&h, 6).unwrap(), Rational::from((1, 2)));
        let t = approx(128, &Rational::from((3333, 10000)), 1e-3);
        assert!(recognize_rational(&t, 6).is_err());
    }

    #[test]
    fn rejects_nonreal() {
        let x = CertifiedComplex::from_parts(128, &Rational::from(3), &Rational::from((1, 10)))
            .add_error(&Float::with_val(32, 1e-30));
        assert!(recognize_rational(&x, 6).is_err());
    }

    #[test]
    fn random_perturbed_rationals_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let q: i64 = rng.gen_range(1..=6);
            let p: i64 = rng.gen_range(-100_000..100_000);
            let exact = Rational::from((p, q));
            let eps: f64 = rng.gen_range(-1e-12..1e-12);
            let pert = Rational::from(&exact + Rational::from_f64(eps).unwrap());
            let x = approx(128, &pert, 2e-12);
            assert_eq!(recognize_rational(&x, 6).unwrap(), exact);
        }
    }
}
