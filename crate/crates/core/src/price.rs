//! Satisfaction price charged by the base station to each follower.
//!
//! ```text
//! D(x, p) = (Δ / ln(q − x)) · (1 / ln(y − p/z))
//! ```
//!
//! `D` is positive and increasing in both arguments whenever `q − x > 1` and
//! `y − p/z > 1`; followers subtract it from their utility.

use crate::config::GameConfig;
use crate::error::{Error, Result};

/// The four constants of the price, split out so the price can be evaluated
/// without a full config.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriceParams {
    pub delta: f64,
    pub q: f64,
    pub y: f64,
    pub z: f64,
}

impl From<&GameConfig> for PriceParams {
    fn from(c: &GameConfig) -> Self {
        PriceParams {
            delta: c.delta,
            q: c.q,
            y: c.y,
            z: c.z,
        }
    }
}

impl PriceParams {
    fn logs(&self, x: f64, p: f64) -> Result<(f64, f64, f64, f64)> {
        let ux = self.q - x;
        let up = self.y - p / self.z;
        if !(ux > 1.0) {
            return Err(Error::domain("satisfaction_price", format!("q - x = {ux} must exceed 1")));
        }
        if !(up > 1.0) {
            return Err(Error::domain("satisfaction_price", format!("y - p/z = {up} must exceed 1")));
        }
        Ok((ux, ux.ln(), up, up.ln()))
    }

    pub fn price(&self, x: f64, p: f64) -> Result<f64> {
        let (_, lx, _, lp) = self.logs(x, p)?;
        Ok(self.delta / (lx * lp))
    }

    /// ∂D/∂x = Δ / ((q−x)·ln²(q−x)·ln(y−p/z)).
    pub fn d_dx(&self, x: f64, p: f64) -> Result<f64> {
        let (ux, lx, _, lp) = self.logs(x, p)?;
        Ok(self.delta / (ux * lx * lx * lp))
    }

    /// ∂D/∂p = Δ / (z·(y−p/z)·ln(q−x)·ln²(y−p/z)). This is the `A` term in
    /// every follower gradient.
    pub fn d_dp(&self, x: f64, p: f64) -> Result<f64> {
        let (_, lx, up, lp) = self.logs(x, p)?;
        Ok(self.delta / (self.z * up * lx * lp * lp))
    }

    /// ∂²D/∂x² = Δ / ((q−x)²·ln²(q−x)·ln(y−p/z)) · (2/ln(q−x) + 1).
    pub fn d2_dx2(&self, x: f64, p: f64) -> Result<f64> {
        let (ux, lx, _, lp) = self.logs(x, p)?;
        Ok(self.delta / (ux * ux * lx * lx * lp) * (2.0 / lx + 1.0))
    }

    /// ∂²D/∂p² = Δ / (z²·(y−p/z)²·ln(q−x)·ln²(y−p/z)) · (2/ln(y−p/z) + 1).
    /// This is the `B` term in every follower curvature.
    pub fn d2_dp2(&self, x: f64, p: f64) -> Result<f64> {
        let (_, lx, up, lp) = self.logs(x, p)?;
        Ok(self.delta / (self.z * self.z * up * up * lx * lp * lp) * (2.0 / lp + 1.0))
    }
}

pub fn satisfaction_price(x: f64, p: f64, config: &GameConfig) -> Result<f64> {
    PriceParams::from(config).price(x, p)
}
