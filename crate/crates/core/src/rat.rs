//! Exact rationals used for every distance value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::QtopError;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn int(n: i64) -> Rat {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics on a zero denominator.
    pub fn frac(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `2^-k`.
    pub fn pow2_neg(k: u32) -> Rat {
        Rat(BigRational::new(BigInt::one(), BigInt::one() << k as usize))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Rat {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rat(self.0.recip())
    }

    pub fn half(&self) -> Rat {
        Rat(&self.0 / BigRational::from_integer(BigInt::from(2)))
    }

    pub fn max(self, o: Rat) -> Rat {
        if o > self {
            o
        } else {
            self
        }
    }

    pub fn min(self, o: Rat) -> Rat {
        if o < self {
            o
        } else {
            self
        }
    }

    /// `max(0, self - o)`.
    pub fn monus(&self, o: &Rat) -> Rat {
        let d = &self.0 - &o.0;
        if d.is_negative() {
            Rat::zero()
        } else {
            Rat(d)
        }
    }

    /// `⌊self⌋`, saturating to `usize::MAX - 1` and clamped at 0.
    pub fn floor_usize(&self) -> usize {
        use num::ToPrimitive;
        let f = self.0.floor().to_integer();
        if f.is_negative() {
            0
        } else {
            f.to_usize().unwrap_or(usize::MAX - 1).min(usize::MAX - 1)
        }
    }

    /// `⌈self⌉`, saturating like [`Rat::floor_usize`].
    pub fn ceil_usize(&self) -> usize {
        use num::ToPrimitive;
        let c = self.0.ceil().to_integer();
        if c.is_negative() {
            0
        } else {
            c.to_usize().unwrap_or(usize::MAX - 1).min(usize::MAX - 1)
        }
    }

    pub fn to_f64(&self) -> f64 {
        use num::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = QtopError;

    fn from_str(s: &str) -> Result<Rat, QtopError> {
        let bad = || QtopError::Parse(format!("not a rational: {s:?}"));
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(Rat(BigRational::new(n, d)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(self.0 $op o.0)
            }
        }
        impl<'a> $tr<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $m(self, o: &'a Rat) -> Rat {
                Rat(&self.0 $op &o.0)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(it: I) -> Rat {
        it.fold(Rat::zero(), |a, b| a + b)
    }
}

/// A distance that may be infinite, used for `d(x, F)` with `F` empty.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum ExtRat {
    Finite(Rat),
    Infinite,
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, o: &ExtRat) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, o: &ExtRat) -> Ordering {
        match (self, o) {
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
            (ExtRat::Finite(_), ExtRat::Infinite) => Ordering::Less,
            (ExtRat::Infinite, ExtRat::Finite(_)) => Ordering::Greater,
            (ExtRat::Infinite, ExtRat::Infinite) => Ordering::Equal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_round_trip() {
        for s in ["0", "1", "1/2", "3/2", "7/1024"] {
            assert_eq!(s.parse::<Rat>().unwrap().to_string(), s);
        }
        assert_eq!("2/4".parse::<Rat>().unwrap().to_string(), "1/2");
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(Rat::pow2_neg(0), Rat::one());
        assert_eq!(Rat::pow2_neg(3), Rat::frac(1, 8));
        assert_eq!(Rat::pow2_neg(40) + Rat::pow2_neg(40), Rat::pow2_neg(39));
    }

    #[test]
    fn monus_clamps() {
        assert_eq!(Rat::int(1).monus(&Rat::int(3)), Rat::zero());
        assert_eq!(Rat::int(3).monus(&Rat::int(1)), Rat::int(2));
    }
}
