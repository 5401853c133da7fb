//! The dimension parameter `N` of the curvature-dimension inequality.
//!
//! `N` ranges over `(0, inf]`; `inf` is a first-class value, not a float
//! sentinel, so that `1/N = 0` is exact and grids can contain `inf`.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimensionError {
    #[error("dimension must be a positive real or inf, got {0}")]
    NonPositive(f64),
    #[error("dimension must be finite or inf, got NaN")]
    NaN,
    #[error("cannot parse dimension from {0:?}")]
    Parse(String),
}

/// A value of the dimension parameter: a positive real or infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    /// A finite dimension; must be strictly positive.
    pub fn finite(value: f64) -> Result<Self, DimensionError> {
        if value.is_nan() {
            Err(DimensionError::NaN)
        } else if value <= 0.0 {
            Err(DimensionError::NonPositive(value))
        } else if value.is_infinite() {
            Ok(Dimension::Infinite)
        } else {
            Ok(Dimension::Finite(value))
        }
    }

    /// Interprets `f64::INFINITY` as `Infinite`, otherwise as a finite value.
    pub fn from_f64(value: f64) -> Result<Self, DimensionError> {
        Self::finite(value)
    }

    /// `1/N`, exactly zero for the infinite dimension.
    pub fn inv(self) -> f64 {
        match self {
            Dimension::Finite(n) => 1.0 / n,
            Dimension::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Dimension::Infinite)
    }

    /// The value as a float, `f64::INFINITY` for the infinite dimension.
    pub fn as_f64(self) -> f64 {
        match self {
            Dimension::Finite(n) => n,
            Dimension::Infinite => f64::INFINITY,
        }
    }

    /// Parses `"inf"` (any case) or a positive decimal number.
    pub fn parse(text: &str) -> Result<Self, DimensionError> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Dimension::Infinite);
        }
        match t.parse::<f64>() {
            Ok(v) => Self::finite(v),
            Err(_) => Err(DimensionError::Parse(text.to_string())),
        }
    }
}

impl PartialOrd for Dimension {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Dimension::Infinite, Dimension::Infinite) => Some(Ordering::Equal),
            (Dimension::Infinite, Dimension::Finite(_)) => Some(Ordering::Greater),
            (Dimension::Finite(_), Dimension::Infinite) => Some(Ordering::Less),
            (Dimension::Finite(a), Dimension::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(n) => write!(f, "{n}"),
            Dimension::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Dimension::Finite(n) => s.serialize_f64(*n),
            Dimension::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Dimension {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Dimension::finite(v).map_err(DeError::custom),
            Raw::Str(s) => Dimension::parse(&s).map_err(DeError::custom),
        }
    }
}
