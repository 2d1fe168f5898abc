//! The base station's satisfaction dynamics.
//!
//! The leader's utility is the concave quadratic
//! `U(x) = −p̄x² + βx + κ` with `β = 2·p̄·x_prev·ln t` and `κ = κ_c·ln t`,
//! so its unconstrained maximizer is `β/(2p̄) = x_prev·ln t` regardless of
//! `p̄`. Satisfaction is kept in `[x_floor, 1]`.

use crate::error::{Error, Result};

/// Leader utility at satisfaction `x`, given the followers' mean power
/// `p̄` (watts) from the previous stage.
pub fn leader_utility(x: f64, mean_power: f64, t: u32, x_prev: f64, kappa_c: f64) -> Result<f64> {
    if !(mean_power > 0.0) {
        return Err(Error::domain(
            "leader_utility",
            format!("mean power must be positive, got {mean_power}"),
        ));
    }
    if t == 0 {
        return Err(Error::domain("leader_utility", "stage index starts at 1"));
    }
    let ln_t = f64::from(t).ln();
    let beta = 2.0 * mean_power * x_prev * ln_t;
    let kappa = kappa_c * ln_t;
    Ok(-mean_power * x * x + beta * x + kappa)
}

/// ∂U/∂x = −2p̄x + β.
pub fn leader_utility_gradient(x: f64, mean_power: f64, t: u32, x_prev: f64) -> f64 {
    -2.0 * mean_power * x + 2.0 * mean_power * x_prev * f64::from(t).ln()
}

/// ∂²U/∂x² = −2p̄.
pub fn leader_utility_curvature(mean_power: f64) -> f64 {
    -2.0 * mean_power
}

/// Best response `clamp(x_prev·ln t, x_floor, 1)`.
pub fn leader_best_satisfaction(x_prev: f64, t: u32, x_floor: f64) -> f64 {
    (x_prev * f64::from(t).ln()).clamp(x_floor, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderState {
    pub satisfaction: f64,
    /// Stage of the last update; 0 before the game starts.
    pub stage: u32,
    /// Followers' mean power observed when `satisfaction` was chosen.
    pub mean_power: Option<f64>,
    pub kappa_c: f64,
}

impl LeaderState {
    pub fn new(x_init: f64, kappa_c: f64) -> Self {
        LeaderState {
            satisfaction: x_init,
            stage: 0,
            mean_power: None,
            kappa_c,
        }
    }

    /// Moves to stage `t` after observing the previous stage's powers.
    /// Stage 1 keeps the initial satisfaction.
    pub fn update(&mut self, t: u32, previous_powers: &[f64], x_floor: f64) {
        if !previous_powers.is_empty() {
            self.mean_power = Some(previous_powers.iter().sum::<f64>() / previous_powers.len() as f64);
        }
        if t > 1 {
            self.satisfaction = leader_best_satisfaction(self.satisfaction, t, x_floor);
        }
        self.stage = t;
    }
}
