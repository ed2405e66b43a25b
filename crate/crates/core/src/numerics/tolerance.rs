use crate::scalar::Real;
use serde::{Deserialize, Serialize};

/// Relative tolerances. Every threshold in the crate is one of these times a matrix norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance<T> {
    pub rel_psd: T,
    pub rel_rank: T,
    pub rel_eq: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(rel_psd: T, rel_rank: T, rel_eq: T) -> Self {
        Tolerance { rel_psd, rel_rank, rel_eq }
    }

    /// Defaults are 1e-8 / 1e-9 / 1e-9, raised to a small multiple of epsilon for
    /// low precision scalars.
    pub fn standard() -> Self {
        let floor = T::epsilon() * T::lit(256.0);
        let pick = |d: f64| {
            let d = T::lit(d);
            if d > floor {
                d
            } else {
                floor
            }
        };
        Tolerance { rel_psd: pick(1e-8), rel_rank: pick(1e-9), rel_eq: pick(1e-9) }
    }

    pub fn is_valid(&self) -> bool {
        self.rel_psd > T::zero() && self.rel_rank > T::zero() && self.rel_eq > T::zero()
    }

    pub fn with_psd(mut self, v: T) -> Self {
        self.rel_psd = v;
        self
    }

    pub fn with_rank(mut self, v: T) -> Self {
        self.rel_rank = v;
        self
    }

    pub fn with_eq(mut self, v: T) -> Self {
        self.rel_eq = v;
        self
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self::standard()
    }
}
