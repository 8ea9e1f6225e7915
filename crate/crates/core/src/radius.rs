//! Exact nonnegative rational radii and their extension by infinity.
//!
//! Word-metric distances are integers, so every comparison against a radius
//! is done exactly on rationals; there is no floating point anywhere here.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Radius(Ratio<u64>);

impl Radius {
    pub const ZERO: Radius = Radius(Ratio::new_raw(0, 1));

    pub fn new(numer: u64, denom: u64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::Parse("radius with zero denominator".into()));
        }
        Ok(Radius(Ratio::new(numer, denom)))
    }

    pub fn int(n: u64) -> Self {
        Radius(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    pub fn floor(&self) -> u64 {
        self.numer() / self.denom()
    }

    /// Smallest integer `n` with `n >= self`.
    pub fn ceil(&self) -> u64 {
        self.numer().div_ceil(self.denom())
    }

    pub fn is_integer(&self) -> bool {
        self.denom() == 1
    }

    /// `dist <= self`, exactly.
    pub fn admits(&self, dist: u64) -> bool {
        (dist as u128) * (self.denom() as u128) <= self.numer() as u128
    }

    /// `dist > self`, exactly.
    pub fn exceeded_by(&self, dist: u64) -> bool {
        !self.admits(dist)
    }

    pub fn double(&self) -> Self {
        *self + *self
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Add for Radius {
    type Output = Radius;
    fn add(self, rhs: Radius) -> Radius {
        Radius(self.0 + rhs.0)
    }
}

impl From<u64> for Radius {
    fn from(n: u64) -> Self {
        Radius::int(n)
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Radius {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("invalid radius {s:?}"));
        match s.split_once('/') {
            Some((n, d)) => Radius::new(
                n.trim().parse().map_err(|_| bad())?,
                d.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(Radius::int(s.parse().map_err(|_| bad())?)),
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_u64(self.numer())
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRadius {
    Int(u64),
    Text(String),
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawRadius::deserialize(d)? {
            RawRadius::Int(n) => Ok(Radius::int(n)),
            RawRadius::Text(t) => t.parse().map_err(de::Error::custom),
        }
    }
}

/// A radius or `∞`, the value of `inf ∅`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(Radius),
    Infinite,
}

impl Bound {
    pub fn finite(self) -> Option<Radius> {
        match self {
            Bound::Finite(r) => Some(r),
            Bound::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Bound::Infinite)
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            (Bound::Finite(_), Bound::Infinite) => Ordering::Less,
            (Bound::Infinite, Bound::Finite(_)) => Ordering::Greater,
            (Bound::Infinite, Bound::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(r) => write!(f, "{r}"),
            Bound::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(r) => r.serialize(s),
            Bound::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match RawRadius::deserialize(d)? {
            RawRadius::Int(n) => Ok(Bound::Finite(Radius::int(n))),
            RawRadius::Text(t) if t.trim() == "inf" => Ok(Bound::Infinite),
            RawRadius::Text(t) => t.parse().map(Bound::Finite).map_err(de::Error::custom),
        }
    }
}
