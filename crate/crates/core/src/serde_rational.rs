//! `Rational` as the string `"p/q"` (or `"p"` when integral).

use rug::Rational;
use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

pub fn render(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let q = Rational::parse(s).map_err(|e| format!("bad rational {s:?}: {e}"))?;
    Ok(Rational::from(q))
}

pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&render(q))
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
    let s = String::deserialize(d)?;
    parse(&s).map_err(D::Error::custom)
}
