//! Exact rational arithmetic for protocol and robustness parameters.
//!
//! Threshold quantities of the form `⌊f·d⌋` and `⌈p·d⌉` flip at exact rational
//! breakpoints (e.g. f = 1/3 with d = 3), so the parameters are kept as
//! reduced integer ratios and never pass through floating point.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FractionError {
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("{num}/{den} lies outside [0, 1]")]
    OutOfRange { num: u64, den: u64 },
    #[error("cannot parse {0:?} as a fraction (expected \"n\" or \"n/d\")")]
    Parse(String),
}

/// Exact rational in `[0, 1]`, kept in reduced form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const HALF: Fraction = Fraction { num: 1, den: 2 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn new(num: u64, den: u64) -> Result<Self, FractionError> {
        if den == 0 {
            return Err(FractionError::ZeroDenominator);
        }
        if num > den {
            return Err(FractionError::OutOfRange { num, den });
        }
        let g = gcd(num, den);
        Ok(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn is_one(self) -> bool {
        self.num == self.den
    }

    /// `⌊self · d⌋`, computed in integer arithmetic.
    pub fn floor_mul(self, d: usize) -> usize {
        ((self.num as u128 * d as u128) / self.den as u128) as usize
    }

    /// `⌈self · d⌉`, computed in integer arithmetic.
    pub fn ceil_mul(self, d: usize) -> usize {
        (self.num as u128 * d as u128).div_ceil(self.den as u128) as usize
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Default for Fraction {
    fn default() -> Self {
        Fraction::ZERO
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as u128 * other.den as u128;
        let rhs = other.num as u128 * self.den as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Fraction {
    type Err = FractionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let parse_err = || FractionError::Parse(s.to_string());
        match s.split_once('/') {
            Some((n, d)) => {
                let num: u64 = n.trim().parse().map_err(|_| parse_err())?;
                let den: u64 = d.trim().parse().map_err(|_| parse_err())?;
                Fraction::new(num, den)
            }
            None => {
                let num: u64 = s.parse().map_err(|_| parse_err())?;
                Fraction::new(num, 1)
            }
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduction_and_equality() {
        assert_eq!(Fraction::new(2, 4).unwrap(), Fraction::HALF);
        assert_eq!(Fraction::new(0, 7).unwrap(), Fraction::ZERO);
        assert_eq!(Fraction::new(6, 6).unwrap(), Fraction::ONE);
    }

    #[test]
    fn rejects_out_of_range_and_zero_denominator() {
        assert_eq!(Fraction::new(1, 0), Err(FractionError::ZeroDenominator));
        assert_eq!(
            Fraction::new(3, 2),
            Err(FractionError::OutOfRange { num: 3, den: 2 })
        );
    }

    #[test]
    fn ordering_is_exact() {
        let third = Fraction::new(1, 3).unwrap();
        let quarter = Fraction::new(1, 4).unwrap();
        assert!(quarter < third);
        assert!(third < Fraction::HALF);
        assert!(Fraction::HALF < Fraction::ONE);
        assert_eq!(
            Fraction::new(333, 999).unwrap().cmp(&third),
            Ordering::Equal
        );
    }

    #[test]
    fn floor_and_ceil_products() {
        let third = Fraction::new(1, 3).unwrap();
        assert_eq!(third.floor_mul(5), 1);
        assert_eq!(third.floor_mul(3), 1);
        assert_eq!(third.ceil_mul(3), 1);
        assert_eq!(Fraction::HALF.floor_mul(4), 2);
        assert_eq!(Fraction::ZERO.floor_mul(9), 0);
        assert_eq!(Fraction::new(2, 3).unwrap().ceil_mul(3), 2);
        assert_eq!(Fraction::new(67, 100).unwrap().ceil_mul(3), 3);
        assert_eq!(Fraction::ONE.ceil_mul(7), 7);
        assert_eq!(Fraction::ZERO.ceil_mul(7), 0);
    }

    // Cross-check the integer formulas against the defining inequalities:
    // floor = max{k : k·den ≤ num·d}, ceil = min{k : k·den ≥ num·d}.
    #[test]
    fn products_match_defining_inequalities() {
        for den in 1..=12u64 {
            for num in 0..=den {
                let q = Fraction::new(num, den).unwrap();
                for d in 0..=20usize {
                    let floor = (0..=d).rev().find(|k| *k as u64 * den <= num * d as u64);
                    let ceil = (0..=d).find(|k| *k as u64 * den >= num * d as u64);
                    assert_eq!(q.floor_mul(d), floor.unwrap());
                    assert_eq!(q.ceil_mul(d), ceil.unwrap_or(d));
                }
            }
        }
    }

    #[test]
    fn parse_display_round_trip() {
        for text in ["0", "1", "1/2", "2/3", "4/7"] {
            let f: Fraction = text.parse().unwrap();
            assert_eq!(f.to_string(), text);
        }
        assert_eq!("2/4".parse::<Fraction>().unwrap().to_string(), "1/2");
        assert!(" 1/3 ".parse::<Fraction>().is_ok());
        assert!("x/3".parse::<Fraction>().is_err());
        assert!("1/".parse::<Fraction>().is_err());
        assert!("-1/2".parse::<Fraction>().is_err());
        assert!("0.5".parse::<Fraction>().is_err());
    }

    #[test]
    fn serde_uses_fraction_strings() {
        let f = Fraction::new(2, 8).unwrap();
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, "\"1/4\"");
        let back: Fraction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }
}
