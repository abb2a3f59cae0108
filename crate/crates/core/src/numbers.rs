//! Exact rationals and the two representatives of a point on the unit circle.
//!
//! A [`Residue`] is the representative in `[0, 1)`; a [`GammaRep`] is the
//! representative in `(0, 1]`. Which eigenvalue a residue stands for depends
//! on the singular point: at 0 and at finite points the eigenvalue is
//! `exp(-2πi r)`, at infinity it is `exp(+2πi r)`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Parses `"a/b"` or `"a"` with an optional leading `-` (ASCII or U+2212).
pub fn parse_rational(text: &str) -> Result<Rational> {
    let err = || Error::Parse(text.to_string());
    let trimmed = text.trim();
    let (negative, body) = if let Some(rest) = trimmed.strip_prefix('-') {
        (true, rest)
    } else if let Some(rest) = trimmed.strip_prefix('\u{2212}') {
        (true, rest)
    } else {
        (false, trimmed)
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, d),
        None => (body, "1"),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !digits(num) || !digits(den) {
        return Err(err());
    }
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    let value = Rational::new(num, den);
    Ok(if negative { -value } else { value })
}

/// `"a/b"`, or `"a"` when the denominator is one.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Fractional part `{x}` in `[0, 1)`.
pub fn frac(x: &Rational) -> Residue {
    if let (Some(n), Some(d)) = (x.numer().to_i64(), x.denom().to_i64()) {
        // already reduced, and so is n mod d over d
        return Residue::reduced(Rational::new_raw(n.rem_euclid(d).into(), d.into()));
    }
    Residue::reduced(x - x.floor())
}

/// Maps `0` to `1` and leaves `(0, 1)` alone.
pub fn gamma_rep(r: &Residue) -> GammaRep {
    if r.value.is_zero() {
        GammaRep(Rational::one())
    } else {
        GammaRep(r.value.clone())
    }
}

#[derive(Clone)]
pub struct Residue {
    value: Rational,
    // machine-integer numerator/denominator when they fit; comparisons in
    // the sweeps run on these
    small: Option<(i64, i64)>,
}

impl Residue {
    fn reduced(value: Rational) -> Self {
        let small = value.numer().to_i64().zip(value.denom().to_i64());
        Residue { value, small }
    }
}

impl std::hash::Hash for Residue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.value.numer().hash(state);
        self.value.denom().hash(state);
    }
}

// Both sides are in lowest terms, so equality is componentwise.
impl PartialEq for Residue {
    fn eq(&self, other: &Self) -> bool {
        match (self.small, other.small) {
            (Some(a), Some(b)) => a == b,
            _ => self.value.numer() == other.value.numer() && self.value.denom() == other.value.denom(),
        }
    }
}

impl Eq for Residue {}

impl Ord for Residue {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        match (self.small, other.small) {
            (Some((a, b)), Some((c, d))) => (i128::from(a) * i128::from(d)).cmp(&(i128::from(c) * i128::from(b))),
            _ => self.value.cmp(&other.value),
        }
    }
}

impl PartialOrd for Residue {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Residue {
    pub fn zero() -> Self {
        Residue::reduced(Rational::zero())
    }

    /// Reduces `value` mod 1.
    pub fn new(value: Rational) -> Self {
        frac(&value)
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        frac(&rat(numer, denom))
    }

    pub fn value(&self) -> &Rational {
        &self.value
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// `{-r}`: the residue of the complex-conjugate eigenvalue.
    pub fn conjugate(&self) -> Residue {
        frac(&-&self.value)
    }

    /// `{self - other}`
    pub fn sub(&self, other: &Residue) -> Residue {
        frac(&(&self.value - &other.value))
    }

    /// `{self + other}`
    pub fn add(&self, other: &Residue) -> Residue {
        frac(&(&self.value + &other.value))
    }

    pub fn gamma(&self) -> GammaRep {
        gamma_rep(self)
    }

    pub fn parse(text: &str) -> Result<Residue> {
        parse_rational(text).map(|v| frac(&v))
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.value))
    }
}

impl fmt::Debug for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Residue({self})")
    }
}

impl FromStr for Residue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Residue::parse(s)
    }
}

impl Serialize for Residue {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Residue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Residue::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Representative in `(0, 1]`; the interval conditions of the convolution
/// transforms are evaluated on these.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GammaRep(Rational);

impl GammaRep {
    /// Accepts values in `(0, 1]` only.
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_positive() && value <= Rational::one() {
            Ok(GammaRep(value))
        } else {
            Err(Error::InvalidGamma(format_rational(&value)))
        }
    }

    pub fn one() -> Self {
        GammaRep(Rational::one())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn residue(&self) -> Residue {
        frac(&self.0)
    }

    /// `1 - γ`, as a value in `[0, 1)`; for `γ ∈ (0,1)` this is again in `(0,1)`.
    pub fn complement(&self) -> Rational {
        Rational::one() - &self.0
    }
}

impl fmt::Display for GammaRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Debug for GammaRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GammaRep({self})")
    }
}

impl Serialize for GammaRep {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GammaRep {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        let value = parse_rational(&text).map_err(serde::de::Error::custom)?;
        GammaRep::new(value).map_err(serde::de::Error::custom)
    }
}

/// `⌈x⌉` as a machine integer; callers only pass sums of at most a few
/// hundred residues.
pub(crate) fn ceil_i64(x: &Rational) -> i64 {
    if let (Some(n), Some(d)) = (x.numer().to_i64(), x.denom().to_i64()) {
        return n.div_euclid(d) + i64::from(n.rem_euclid(d) != 0);
    }
    x.ceil().to_integer().to_i64().expect("ceiling fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn frac_examples() {
        assert_eq!(frac(&rat(5, 4)), Residue::from_ratio(1, 4));
        assert_eq!(frac(&rat(-1, 3)).value(), &rat(2, 3));
        assert_eq!(frac(&rat(0, 1)), Residue::zero());
    }

    #[test]
    fn gamma_rep_examples() {
        assert!(gamma_rep(&Residue::zero()).is_one());
        assert_eq!(gamma_rep(&Residue::from_ratio(1, 2)).value(), &rat(1, 2));
        assert_eq!(gamma_rep(&Residue::from_ratio(3, 4)).value(), &rat(3, 4));
    }

    #[test]
    fn parses_text_format() {
        assert_eq!(parse_rational("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse_rational("-1/3").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational("\u{2212}1/3").unwrap(), rat(-1, 3));
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7, 1));
        assert_eq!(Residue::parse("-1/3").unwrap(), Residue::from_ratio(2, 3));
        for bad in ["", "1/0", "a", "1/", "/2", "1.5", "--1", "1/-2"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn big_denominators_do_not_overflow() {
        let r = parse_rational("123456789012345678901234567890/987654321098765432109876543211").unwrap();
        let s = frac(&(&r * &r * &r));
        assert!(s.value() < &Rational::one());
        assert_eq!(Residue::parse(&s.to_string()).unwrap(), s);
    }

    #[test]
    fn gamma_rep_rejects_out_of_range() {
        assert!(GammaRep::new(rat(0, 1)).is_err());
        assert!(GammaRep::new(rat(3, 2)).is_err());
        assert!(GammaRep::new(rat(1, 1)).is_ok());
    }

    proptest! {
        #[test]
        fn residue_order_matches_rational_order(a in 0i64..997, b in 1i64..997, c in 0i64..997, d in 1i64..997) {
            let (x, y) = (Residue::from_ratio(a, b), Residue::from_ratio(c, d));
            prop_assert_eq!(x.cmp(&y), x.value().cmp(y.value()));
            prop_assert_eq!(x == y, x.value() == y.value());
        }

        #[test]
        fn frac_is_idempotent_and_in_range(n in -1000i64..1000, d in 1i64..50) {
            let x = rat(n, d);
            let f = frac(&x);
            prop_assert!(f.value() >= &Rational::zero() && f.value() < &Rational::one());
            prop_assert_eq!(frac(f.value()), f.clone());
            prop_assert!((x - f.value()).is_integer());
        }

        #[test]
        fn gamma_rep_and_mod_one_round_trip(n in 0i64..50, d in 1i64..50) {
            let r = Residue::new(rat(n, d));
            prop_assert_eq!(gamma_rep(&r).residue(), r.clone());
            let g = gamma_rep(&r);
            prop_assert_eq!(gamma_rep(&g.residue()), g);
        }

        #[test]
        fn display_parse_round_trip(n in -10_000i64..10_000, d in 1i64..10_000) {
            let x = rat(n, d);
            prop_assert_eq!(parse_rational(&format_rational(&x)).unwrap(), x);
        }
    }
}
