//! Exact rational multiples of π.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::Serialize;

/// `p/q · π`, kept normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PiFraction(Ratio<i64>);

impl PiFraction {
    pub const ZERO: PiFraction = PiFraction(Ratio::new_raw(0, 1));
    pub const PI: PiFraction = PiFraction(Ratio::new_raw(1, 1));
    pub const TWO_PI: PiFraction = PiFraction(Ratio::new_raw(2, 1));
    pub const THIRD: PiFraction = PiFraction(Ratio::new_raw(1, 3));

    /// Panics if `denom` is zero.
    pub fn new(numer: i64, denom: i64) -> Self {
        PiFraction(Ratio::new(numer, denom))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_positive(&self) -> bool {
        self.numer() > 0
    }

    /// `p/q` without the π, as used in the text formats.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.numer(), self.denom())
    }

    /// How many times `unit` fits, if it divides exactly.
    pub fn in_units_of(&self, unit: PiFraction) -> Option<i64> {
        let q = self.0 / unit.0;
        q.is_integer().then(|| q.to_integer())
    }
}

impl Add for PiFraction {
    type Output = PiFraction;
    fn add(self, rhs: PiFraction) -> PiFraction {
        PiFraction(self.0 + rhs.0)
    }
}

impl Sub for PiFraction {
    type Output = PiFraction;
    fn sub(self, rhs: PiFraction) -> PiFraction {
        PiFraction(self.0 - rhs.0)
    }
}

impl Mul<i64> for PiFraction {
    type Output = PiFraction;
    fn mul(self, rhs: i64) -> PiFraction {
        PiFraction(self.0 * rhs)
    }
}

impl Mul<Ratio<i64>> for PiFraction {
    type Output = PiFraction;
    fn mul(self, rhs: Ratio<i64>) -> PiFraction {
        PiFraction(self.0 * rhs)
    }
}

impl std::iter::Sum for PiFraction {
    fn sum<I: Iterator<Item = PiFraction>>(iter: I) -> PiFraction {
        iter.fold(PiFraction::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for PiFraction {
    /// `0`, `π`, `2π`, `π/3`, `-2π/3`, …
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (p, q) = (self.numer(), self.denom());
        let sign = if p < 0 { "-" } else { "" };
        let coeff = match p.abs() {
            0 => return f.write_str("0"),
            1 => String::new(),
            n => n.to_string(),
        };
        if q == 1 {
            write!(f, "{sign}{coeff}π")
        } else {
            write!(f, "{sign}{coeff}π/{q}")
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse '{0}' as p/q")]
pub struct ParseFractionError(pub String);

impl FromStr for PiFraction {
    type Err = ParseFractionError;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseFractionError(s.to_string());
        let (p, q) = match s.trim().split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: i64 = p.parse().map_err(|_| err())?;
        let q: i64 = q.parse().map_err(|_| err())?;
        if q == 0 {
            return Err(err());
        }
        Ok(PiFraction::new(p, q))
    }
}

impl Serialize for PiFraction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_fraction_string())
    }
}

/// The largest fraction dividing every input, if all inputs are nonzero.
pub fn common_quantum(values: &[PiFraction]) -> Option<PiFraction> {
    use num_integer::Integer;
    let mut num = 0i64;
    let mut den = 1i64;
    for v in values {
        if v.numer() == 0 {
            return None;
        }
        num = num.gcd(&v.numer());
        den = den.checked_mul(v.denom() / den.gcd(&v.denom()))?;
    }
    (num != 0).then(|| PiFraction::new(num, den))
}
