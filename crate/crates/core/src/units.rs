//! Transmit power in watts, with dBm and mW views.

use std::fmt;

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}

/// A transmit power level. Watts are canonical.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct PowerLevel(f64);

impl PowerLevel {
    pub const fn from_watts(watts: f64) -> Self {
        PowerLevel(watts)
    }

    pub fn from_dbm(dbm: f64) -> Self {
        PowerLevel(dbm_to_watts(dbm))
    }

    pub fn from_milliwatts(mw: f64) -> Self {
        PowerLevel(mw * 1e-3)
    }

    pub const fn watts(self) -> f64 {
        self.0
    }

    pub fn milliwatts(self) -> f64 {
        self.0 * 1e3
    }

    pub fn dbm(self) -> f64 {
        watts_to_dbm(self.0)
    }
}

impl fmt::Display for PowerLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3} dBm", self.dbm())
    }
}
