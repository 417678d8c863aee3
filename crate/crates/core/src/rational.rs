//! Exact rational arithmetic helpers.
//!
//! Every rate, cache size and latency in this crate is an exact
//! `BigRational`. Floating point appears only in the advisory decimal
//! columns of CSV output and in the distortion-to-rate map, which is
//! irrational by nature.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rat = BigRational;

/// Shorthand for `p/q` as an exact rational. Panics if `q == 0`.
pub fn rat(p: i64, q: i64) -> Rat {
    assert!(q != 0, "rational with zero denominator");
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// `n` as an exact rational.
pub fn rint(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rzero() -> Rat {
    Rat::zero()
}

pub fn rone() -> Rat {
    Rat::one()
}

/// Parses `"p/q"` or `"p"`; used by the CLI flag parser.
pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| Error::Domain(format!("cannot parse rational {s:?}: {e}")))
}

/// Canonical text form: `"p/q"` reduced, or `"p"` when the denominator is 1.
pub fn fmt_rat(r: &Rat) -> String {
    r.to_string()
}

/// Advisory decimal rendering with 15 significant digits.
pub fn fmt_decimal(r: &Rat) -> String {
    format!("{:.14e}", r.to_f64().unwrap_or(f64::NAN))
}

/// Least `f` such that `w * f` is an integer for every weight, i.e. the
/// lcm of the reduced denominators.
pub fn lcm_of_denominators<'a>(weights: impl Iterator<Item = &'a Rat>) -> BigInt {
    let mut l = BigInt::one();
    for w in weights {
        l = num::integer::lcm(l, w.denom().clone());
    }
    l
}

/// True iff `r` is an integer.
pub fn is_integer(r: &Rat) -> bool {
    r.denom().is_one()
}

/// `r` as `u64`, failing if it is not a nonnegative integer in range.
pub fn to_u64(r: &Rat) -> Result<u64> {
    if !is_integer(r) || r.is_negative() {
        return Err(Error::Internal(format!("expected nonnegative integer, got {r}")));
    }
    r.numer()
        .to_u64()
        .ok_or_else(|| Error::Internal(format!("integer out of u64 range: {r}")))
}

/// Serde adapter storing rationals as canonical `"p/q"` strings.
pub mod serde_pq {
    use super::{fmt_rat, Rat};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        fmt_rat(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse::<Rat>().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_text_form() {
        assert_eq!(fmt_rat(&rat(3, 2)), "3/2");
        assert_eq!(fmt_rat(&rat(4, 2)), "2");
        assert_eq!(fmt_rat(&rat(-1, 4)), "-1/4");
        assert_eq!(parse_rat("17/24").unwrap(), rat(17, 24));
        assert_eq!(parse_rat("2").unwrap(), rint(2));
    }

    #[test]
    fn denominator_lcm() {
        let ws = [rat(1, 3), rat(2, 3), rat(1, 2)];
        assert_eq!(lcm_of_denominators(ws.iter()), BigInt::from(6));
    }
}
