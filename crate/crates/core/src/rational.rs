//! Exact rational helpers on top of [`num_rational::BigRational`].
//!
//! Every probability, weight and threshold in the crate is a [`Rational`];
//! floats only appear once a logarithm is taken.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or an integer string. `field` names the location for the
/// error message.
pub fn parse(s: &str, field: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = |reason: &str| Error::parse(field, format!("{reason} in {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("malformed numerator"))?;
    let den: BigInt = den.parse().map_err(|_| bad("malformed denominator"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Lowest-terms string: `"p/q"`, or just `"p"` for integers.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(if r.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// Largest double that does not exceed `r`.
pub fn to_f64_floor(r: &Rational) -> f64 {
    let f = to_f64(r);
    if !f.is_finite() {
        return f;
    }
    match Rational::from_float(f) {
        Some(back) if &back > r => next_down(f),
        _ => f,
    }
}

fn next_down(f: f64) -> f64 {
    if f == 0.0 {
        return -f64::from_bits(1);
    }
    let bits = f.to_bits();
    if f > 0.0 {
        f64::from_bits(bits - 1)
    } else {
        f64::from_bits(bits + 1)
    }
}

/// Base-2 logarithm of a positive rational. Numerator and denominator are
/// scaled separately so huge values do not overflow the double range.
pub fn log2(r: &Rational) -> f64 {
    if !r.is_positive() {
        return if r.is_zero() { f64::NEG_INFINITY } else { f64::NAN };
    }
    log2_int(r.numer()) - log2_int(r.denom())
}

fn log2_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::log2).unwrap_or(f64::NAN);
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().map(f64::log2).unwrap_or(f64::NAN) + shift as f64
}

pub fn sum<'a>(it: impl IntoIterator<Item = &'a Rational>) -> Rational {
    it.into_iter().fold(Rational::zero(), |acc, x| acc + x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("3", "f").unwrap(), int(3));
        assert_eq!(parse("2/4", "f").unwrap(), ratio(1, 2));
        assert_eq!(parse(" -6/9 ", "f").unwrap(), ratio(-2, 3));
        let err = parse("1/0", "error_matrix[0][1]").unwrap_err();
        assert!(err.to_string().contains("error_matrix[0][1]"), "{err}");
        assert!(parse("x/2", "f").is_err());
        assert!(parse("", "f").is_err());
    }

    #[test]
    fn formats_in_lowest_terms() {
        assert_eq!(format(&ratio(4, 2)), "2");
        assert_eq!(format(&ratio(6, 4)), "3/2");
        assert_eq!(format(&ratio(0, 5)), "0");
    }

    #[test]
    fn floor_conversion_never_exceeds() {
        let third = ratio(1, 3);
        let f = to_f64_floor(&third);
        assert!(Rational::from_float(f).unwrap() <= third);
        assert_eq!(to_f64_floor(&ratio(1, 2)), 0.5);
    }

    #[test]
    fn log2_matches_float_and_handles_big_values() {
        assert_eq!(log2(&int(4)), 2.0);
        assert!((log2(&ratio(3, 2)) - 1.5f64.log2()).abs() < 1e-15);
        let big = Rational::from_integer(BigInt::from(1) << 3000u32);
        assert!((log2(&big) - 3000.0).abs() < 1e-9);
        assert_eq!(log2(&zero()), f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn format_parse_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let r = ratio(n, d);
            let s = format(&r);
            let back = parse(&s, "r").unwrap();
            prop_assert_eq!(&back, &r);
            prop_assert_eq!(format(&back), s);
        }
    }
}
