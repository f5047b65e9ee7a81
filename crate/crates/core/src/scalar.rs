//! Exact rational scalars and projective values.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An exact rational number. Serialized as `"p/q"` (or `"n"` when integral).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Scalar(pub BigRational);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        Scalar(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Self {
        Scalar(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.recip())
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Returns the value as `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        if !self.0.is_integer() {
            return None;
        }
        i64::try_from(self.0.to_integer()).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not an exact rational: {0:?}")]
pub struct ParseScalarError(pub String);

impl FromStr for Scalar {
    type Err = ParseScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ParseScalarError(s.to_string());
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let ok = |x: &str| {
            let x = x.strip_prefix(['-', '+']).unwrap_or(x);
            !x.is_empty() && x.bytes().all(|b| b.is_ascii_digit())
        };
        if !ok(num) || !ok(den) || den.starts_with('-') {
            return Err(bad());
        }
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Scalar(BigRational::new(n, d)))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, o: Scalar) -> Scalar {
                Scalar((self.0).$m(o.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for &'a Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                Scalar((&self.0).$m(&o.0))
            }
        }
        impl<'a> $tr<&'a Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, o: &'a Scalar) -> Scalar {
                Scalar((self.0).$m(&o.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.0 += &o.0;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.0 -= &o.0;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-&self.0)
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(it: I) -> Scalar {
        it.fold(Scalar::zero(), |a, b| a + b)
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

struct ScalarVisitor;

impl<'de> Visitor<'de> for ScalarVisitor {
    type Value = Scalar;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational string \"p/q\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Scalar, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Scalar, E> {
        Ok(Scalar::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Scalar, E> {
        Ok(Scalar(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Scalar, E> {
        Err(E::custom(format!("floating point value {v} not accepted; write it as \"p/q\"")))
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(ScalarVisitor)
    }
}

/// A point of the projective line over the rationals.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum PValue {
    Finite(Scalar),
    Infinity,
}

impl PValue {
    pub fn is_infinite(&self) -> bool {
        matches!(self, PValue::Infinity)
    }

    pub fn finite(&self) -> Option<&Scalar> {
        match self {
            PValue::Finite(s) => Some(s),
            PValue::Infinity => None,
        }
    }

    /// Image under `x -> a + b x` with `b != 0`.
    pub fn affine(&self, a: &Scalar, b: &Scalar) -> PValue {
        match self {
            PValue::Finite(x) => PValue::Finite(a + &(b * x)),
            PValue::Infinity => PValue::Infinity,
        }
    }

    /// Image under `x -> 1/(x - c)`.
    pub fn invert_at(&self, c: &Scalar) -> PValue {
        match self {
            PValue::Infinity => PValue::Finite(Scalar::zero()),
            PValue::Finite(x) if x == c => PValue::Infinity,
            PValue::Finite(x) => PValue::Finite((x - c).recip()),
        }
    }
}

impl fmt::Display for PValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValue::Finite(s) => write!(f, "{s}"),
            PValue::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for PValue {
    type Err = ParseScalarError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "inf" {
            Ok(PValue::Infinity)
        } else {
            s.parse().map(PValue::Finite)
        }
    }
}

impl Serialize for PValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = PValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string or \"inf\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<PValue, E> {
                v.parse().map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<PValue, E> {
                Ok(PValue::Finite(Scalar::from_int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<PValue, E> {
                ScalarVisitor.visit_u64(v).map(PValue::Finite)
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<PValue, E> {
                ScalarVisitor.visit_f64(v).map(PValue::Finite)
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        for s in ["0", "3", "-7", "1/2", "-5/3", "10/4"] {
            let x: Scalar = s.parse().unwrap();
            let y: Scalar = x.to_string().parse().unwrap();
            assert_eq!(x, y);
        }
        assert_eq!("10/4".parse::<Scalar>().unwrap().to_string(), "5/2");
        assert_eq!("4/2".parse::<Scalar>().unwrap().to_string(), "2");
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1/0", "0.5", "a/b", "1/-2", "1e3", "/3"] {
            assert!(s.parse::<Scalar>().is_err(), "{s}");
        }
    }

    #[test]
    fn json_rejects_floats() {
        assert!(serde_json::from_str::<Scalar>("0.5").is_err());
        assert_eq!(serde_json::from_str::<Scalar>("3").unwrap(), Scalar::from_int(3));
        assert_eq!(serde_json::from_str::<Scalar>("\"-1/3\"").unwrap(), Scalar::ratio(-1, 3));
    }

    #[test]
    fn projective_moves() {
        let c = Scalar::from_int(2);
        assert_eq!(PValue::Finite(c.clone()).invert_at(&c), PValue::Infinity);
        assert_eq!(PValue::Infinity.invert_at(&c), PValue::Finite(Scalar::zero()));
        assert_eq!(PValue::Finite(Scalar::from_int(3)).invert_at(&c), PValue::Finite(Scalar::one()));
        assert_eq!("inf".parse::<PValue>().unwrap(), PValue::Infinity);
    }
}
