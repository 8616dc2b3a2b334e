use serde::{Deserialize, Serialize};

/// Mixed relative/absolute tolerance used for every equality test on distances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-9,
            abs: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Self {
        Self { rel, abs }
    }

    /// Allowed slack for quantities of the given magnitude.
    #[inline]
    pub fn slack(&self, scale: f64) -> f64 {
        (self.rel * scale.abs()).max(self.abs)
    }

    #[inline]
    pub fn eq(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.slack(a.abs().max(b.abs()))
    }

    /// `a <= b` up to tolerance.
    #[inline]
    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.slack(a.abs().max(b.abs()))
    }

    /// `a < b` by more than the tolerance.
    #[inline]
    pub fn lt(&self, a: f64, b: f64) -> bool {
        !self.le(b, a)
    }
}
