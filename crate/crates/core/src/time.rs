use std::fmt;
use std::ops::{Add, AddAssign, Sub};

use serde::{Deserialize, Serialize};

/// A point in time (or a duration) in integer microseconds.
///
/// Planning accumulates many arc durations per robot, so all comparisons and
/// reservation bucketing happen on integers. `Time::INFINITY` marks open-ended
/// intervals and saturates under addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Time(pub i64);

impl Time {
    pub const ZERO: Time = Time(0);
    pub const INFINITY: Time = Time(i64::MAX);
    pub const MICROS_PER_SEC: i64 = 1_000_000;

    pub fn from_secs(secs: f64) -> Time {
        if secs.is_infinite() && secs > 0.0 {
            return Time::INFINITY;
        }
        Time((secs * Self::MICROS_PER_SEC as f64).round() as i64)
    }

    /// Rounds up to the next microsecond. Used for durations so that a planned
    /// interval never ends before the motion it describes.
    pub fn from_secs_ceil(secs: f64) -> Time {
        let micros = secs * Self::MICROS_PER_SEC as f64;
        // Tolerate float noise just above an integer.
        Time((micros - 1e-6).ceil().max(0.0) as i64)
    }

    pub fn from_whole_secs(secs: i64) -> Time {
        Time(secs * Self::MICROS_PER_SEC)
    }

    pub fn secs(self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.0 as f64 / Self::MICROS_PER_SEC as f64
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0 == i64::MAX
    }

    /// Rounds up to a multiple of `quantum` (which must be positive).
    pub fn ceil_to(self, quantum: Time) -> Time {
        if self.is_infinite() {
            return self;
        }
        Time(self.0.div_euclid(quantum.0) * quantum.0 + if self.0.rem_euclid(quantum.0) == 0 { 0 } else { quantum.0 })
    }

    /// Index of the `quantum`-long interval containing this time.
    pub fn bucket(self, quantum: Time) -> i64 {
        self.0.div_euclid(quantum.0)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        if self.is_infinite() || rhs.is_infinite() {
            Time::INFINITY
        } else {
            Time(self.0.saturating_add(rhs.0))
        }
    }
}

impl AddAssign for Time {
    fn add_assign(&mut self, rhs: Time) {
        *self = *self + rhs;
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        if self.is_infinite() {
            Time::INFINITY
        } else {
            Time(self.0 - rhs.0)
        }
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{:.3}s", self.secs())
        }
    }
}
