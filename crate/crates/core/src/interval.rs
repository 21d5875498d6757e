//! Closed real intervals with outward rounding.
//!
//! Every arithmetic helper widens its result by at least one ulp per
//! endpoint, which dominates the rounding error of a single correctly
//! rounded IEEE operation. Transcendental helpers widen by a few ulps to
//! absorb libm inaccuracy.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Closed interval `[lo, hi]`, serialized as a two-element array.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Interval { lo: v[0], hi: v[1] }
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

pub(crate) fn down(x: f64, ulps: u32) -> f64 {
    let mut y = x;
    for _ in 0..ulps {
        y = y.next_down();
    }
    y
}

pub(crate) fn up(x: f64, ulps: u32) -> f64 {
    let mut y = x;
    for _ in 0..ulps {
        y = y.next_up();
    }
    y
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Smallest interval guaranteed to contain the real number nearest `x`
    /// was rounded from.
    pub fn around(x: f64) -> Self {
        Interval {
            lo: x.next_down(),
            hi: x.next_up(),
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// Natural logarithm; requires `lo > 0`.
    pub fn ln(&self) -> Interval {
        Interval {
            lo: down(self.lo.ln(), 2),
            hi: up(self.hi.ln(), 2),
        }
    }

    pub fn exp(&self) -> Interval {
        Interval {
            lo: down(self.lo.exp(), 2).max(0.0),
            hi: up(self.hi.exp(), 2),
        }
    }

    /// Product with a non-negative scalar known exactly.
    pub fn scale(&self, s: f64) -> Interval {
        debug_assert!(s >= 0.0);
        Interval {
            lo: down(self.lo * s, 1),
            hi: up(self.hi * s, 1),
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval {
            lo: down(self.lo + other.lo, 1),
            hi: up(self.hi + other.hi, 1),
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        Interval {
            lo: down(self.lo - other.hi, 1),
            hi: up(self.hi - other.lo, 1),
        }
    }

    /// Quotient `num / self` for intervals of strictly positive numbers.
    pub fn recip_times(&self, num: &Interval) -> Interval {
        debug_assert!(self.lo > 0.0 && num.lo >= 0.0);
        Interval {
            lo: down(num.lo / self.hi, 1),
            hi: up(num.hi / self.lo, 1),
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.15e}, {:.15e}]", self.lo, self.hi)
    }
}

/// Enclosure of 2π², the Steinness threshold. The f64 product is widened by
/// two ulps, well beyond its rounding error.
pub fn two_pi_squared() -> Interval {
    let v = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
    Interval {
        lo: down(v, 2),
        hi: up(v, 2),
    }
}
