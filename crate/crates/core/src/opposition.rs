//! Type-I opposites of inputs and scheme-based opposites of outputs.
//!
//! Three oppositeness schemes are supported for a value `v` with an observed
//! range `[min, max]` and mean `mean`:
//!
//! ```text
//! T1: min + max - v
//! T2: (v + (min + max) / 2) mod max      (real-valued modulo into [0, max))
//! T3: 2 * mean - v                        (falls back to T1 outside [min, max])
//! ```

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    lo: f64,
    hi: f64,
}

impl Bounds {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::NonFinite("bounds"));
        }
        if lo >= hi {
            return Err(Error::Domain {
                value: lo,
                reason: "is not strictly below the upper bound",
            });
        }
        Ok(Self { lo, hi })
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.lo
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    #[inline]
    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum OppositionScheme {
    /// Reflection through the range midpoint.
    #[default]
    T1,
    /// Half-range shift, wrapped modulo the range maximum.
    T2,
    /// Reflection through the running mean.
    T3,
}

impl OppositionScheme {
    pub const ALL: [OppositionScheme; 3] = [Self::T1, Self::T2, Self::T3];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::T1 => "t1",
            Self::T2 => "t2",
            Self::T3 => "t3",
        }
    }
}

impl fmt::Display for OppositionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OppositionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "t1" | "T1" => Ok(Self::T1),
            "t2" | "T2" => Ok(Self::T2),
            "t3" | "T3" => Ok(Self::T3),
            _ => Err(Error::Config(alloc::format!(
                "unknown scheme '{s}', expected one of t1|t2|t3"
            ))),
        }
    }
}

/// Running minimum, maximum and mean of a stream of observations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunningRange {
    min_seen: f64,
    max_seen: f64,
    mean_seen: f64,
    count: u64,
}

impl Default for RunningRange {
    fn default() -> Self {
        Self::empty()
    }
}

impl RunningRange {
    pub const fn empty() -> Self {
        Self {
            min_seen: f64::INFINITY,
            max_seen: f64::NEG_INFINITY,
            mean_seen: 0.0,
            count: 0,
        }
    }

    /// Builds a range from explicit statistics, as if `count` values had been seen.
    pub fn from_parts(min: f64, max: f64, mean: f64, count: u64) -> Result<Self> {
        if count == 0 {
            return Ok(Self::empty());
        }
        if !(min.is_finite() && max.is_finite() && mean.is_finite()) {
            return Err(Error::NonFinite("range statistics"));
        }
        if !(min <= mean && mean <= max) {
            return Err(Error::Domain {
                value: mean,
                reason: "mean must lie within [min, max]",
            });
        }
        Ok(Self {
            min_seen: min,
            max_seen: max,
            mean_seen: mean,
            count,
        })
    }

    pub fn from_values<I: IntoIterator<Item = f64>>(values: I) -> Result<Self> {
        values
            .into_iter()
            .try_fold(Self::empty(), update_range)
    }

    #[inline]
    pub fn min(&self) -> f64 {
        self.min_seen
    }

    #[inline]
    pub fn max(&self) -> f64 {
        self.max_seen
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.mean_seen
    }

    #[inline]
    pub fn count(&self) -> u64 {
        self.count
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    #[inline]
    pub fn is_degenerate(&self) -> bool {
        self.count > 0 && self.min_seen == self.max_seen
    }

    #[inline]
    pub fn contains(&self, v: f64) -> bool {
        self.min_seen <= v && v <= self.max_seen
    }
}

/// Reflects `x` through the midpoint of `b`.
pub fn type1_opposite(x: f64, b: Bounds) -> Result<f64> {
    if !b.contains(x) {
        return Err(Error::Domain {
            value: x,
            reason: "lies outside the input bounds",
        });
    }
    Ok(b.lo + b.hi - x)
}

/// Opposite of an observed value `v` under `scheme`, relative to `range`.
pub fn scheme_opposite(v: f64, scheme: OppositionScheme, range: &RunningRange) -> Result<f64> {
    if range.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let (min, max) = (range.min_seen, range.max_seen);
    match scheme {
        OppositionScheme::T1 => {
            if range.is_degenerate() {
                return Err(Error::DegenerateRange(min));
            }
            Ok(min + max - v)
        }
        OppositionScheme::T2 => {
            if range.is_degenerate() {
                return Err(Error::DegenerateRange(min));
            }
            if max <= 0.0 {
                return Err(Error::Domain {
                    value: max,
                    reason: "is not a positive modulus for scheme T2",
                });
            }
            Ok(wrap(v + (min + max) / 2.0, max))
        }
        OppositionScheme::T3 => {
            let reflected = 2.0 * range.mean_seen - v;
            if range.contains(reflected) {
                Ok(reflected)
            } else {
                // clamped so T3 stays closed even under rounding or an out-of-range v
                Ok((min + max - v).clamp(min, max))
            }
        }
    }
}

/// Real-valued modulo with result in `[0, modulus)`; `modulus > 0`.
fn wrap(v: f64, modulus: f64) -> f64 {
    let r = v % modulus;
    let r = if r < 0.0 { r + modulus } else { r };
    // r + modulus can round up to modulus itself
    if r >= modulus {
        0.0
    } else {
        r
    }
}

/// Folds `v` into `range`, returning the updated range.
pub fn update_range(range: RunningRange, v: f64) -> Result<RunningRange> {
    if !v.is_finite() {
        return Err(Error::NonFinite("observed value"));
    }
    if range.count == 0 {
        return Ok(RunningRange {
            min_seen: v,
            max_seen: v,
            mean_seen: v,
            count: 1,
        });
    }
    let count = range.count + 1;
    let min_seen = range.min_seen.min(v);
    let max_seen = range.max_seen.max(v);
    let mean = range.mean_seen + (v - range.mean_seen) / count as f64;
    Ok(RunningRange {
        min_seen,
        max_seen,
        mean_seen: mean.clamp(min_seen, max_seen),
        count,
    })
}
