//! Follower utilities, their derivatives and the constrained best response.
//!
//! A follower treats the interference it measured as fixed while choosing its
//! power, so its SINR is linear in its own power: `γ = p·G_ii / I`. Each
//! behavior class has its own performance term, and U-BeAS followers pay the
//! satisfaction price `D(x, p)` on top of it:
//!
//! | class        | performance term              |
//! |--------------|-------------------------------|
//! | casual       | `(γ̄/γ)·p`                    |
//! | intermediate | `−s·p − c·(γ̄ − γ)²`          |
//! | serious      | `−p^w − h / pdr^v`            |
//!
//! Best responses are searched on the powers that meet the class target
//! SINR, `[max(p_min, p_req), p_max]` with `p_req = γ̄·I/G_ii`. When even
//! `p_max` cannot reach the target the follower transmits at `p_max` and is
//! flagged as in outage.

use crate::config::{BehaviorClass, GameConfig};
use crate::error::{Error, Result};
use crate::link::{log_pdr_from_sinr, ModulationParams};
use crate::price::PriceParams;
use crate::solve::{bisect_on_gradient, golden_section};

/// Everything a follower's utility depends on besides its own power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowerUtility {
    pub class: BehaviorClass,
    /// `None` drops the satisfaction price (the baseline NPC games).
    pub satisfaction: Option<f64>,
    pub target_sinr: f64,
    pub own_gain: f64,
    pub interference_plus_noise: f64,
    pub price: PriceParams,
    pub modulation: ModulationParams,
    pub s: f64,
    pub c: f64,
    pub w: f64,
    pub v: f64,
    pub h: f64,
}

impl FollowerUtility {
    pub fn new(
        config: &GameConfig,
        class: BehaviorClass,
        satisfaction: Option<f64>,
        own_gain: f64,
        interference_plus_noise: f64,
    ) -> Self {
        FollowerUtility {
            class,
            satisfaction,
            target_sinr: config.qos_target(class).sinr,
            own_gain,
            interference_plus_noise,
            price: PriceParams::from(config),
            modulation: config.modulation,
            s: config.s,
            c: config.c,
            w: config.w,
            v: config.v,
            h: config.h,
        }
    }

    pub fn sinr(&self, p: f64) -> f64 {
        p * self.own_gain / self.interference_plus_noise
    }

    /// Power at which the SINR reaches the class target.
    pub fn required_power(&self) -> f64 {
        self.target_sinr * self.interference_plus_noise / self.own_gain
    }

    fn check(&self, p: f64) -> Result<f64> {
        if !(self.interference_plus_noise > 0.0 && self.own_gain > 0.0) {
            return Err(Error::domain(
                "follower_utility",
                "own gain and interference plus noise must be positive",
            ));
        }
        if !(p > 0.0) {
            return Err(Error::domain("follower_utility", format!("power must be positive, got {p}")));
        }
        Ok(self.sinr(p))
    }

    /// Price paid at power `p`, zero without a leader.
    pub fn price_at(&self, p: f64) -> Result<f64> {
        match self.satisfaction {
            Some(x) => self.price.price(x, p),
            None => Ok(0.0),
        }
    }

    fn price_slope(&self, p: f64) -> Result<f64> {
        match self.satisfaction {
            Some(x) => self.price.d_dp(x, p),
            None => Ok(0.0),
        }
    }

    fn price_curvature(&self, p: f64) -> Result<f64> {
        match self.satisfaction {
            Some(x) => self.price.d2_dp2(x, p),
            None => Ok(0.0),
        }
    }

    /// Utility without the price term.
    pub fn performance(&self, p: f64) -> Result<f64> {
        let g = self.check(p)?;
        Ok(match self.class {
            BehaviorClass::Casual => self.target_sinr / g * p,
            BehaviorClass::Intermediate => {
                let gap = self.target_sinr - g;
                -self.s * p - self.c * gap * gap
            }
            BehaviorClass::Serious => {
                let log_pdr = log_pdr_from_sinr(g, &self.modulation)?;
                -p.powf(self.w) - self.h * (-self.v * log_pdr).exp()
            }
        })
    }

    pub fn value(&self, p: f64) -> Result<f64> {
        Ok(self.performance(p)? - self.price_at(p)?)
    }

    /// dU/dp.
    pub fn gradient(&self, p: f64) -> Result<f64> {
        let g = self.check(p)?;
        let a_term = self.price_slope(p)?;
        Ok(match self.class {
            BehaviorClass::Casual => -a_term,
            BehaviorClass::Intermediate => {
                -self.s + 2.0 * self.c * g * (self.target_sinr - g) / p - a_term
            }
            BehaviorClass::Serious => {
                let (a, b) = (self.modulation.a, self.modulation.b);
                let g_b = g.powf(b);
                // h·v·a·b·γ^b / (p·pdr^v), with pdr^v = exp(v·a·γ^b).
                let pdr_term = self.h * self.v * a * b * g_b * (-self.v * a * g_b).exp() / p;
                -self.w * p.powf(self.w - 1.0) + pdr_term - a_term
            }
        })
    }

    /// d²U/dp².
    pub fn curvature(&self, p: f64) -> Result<f64> {
        let g = self.check(p)?;
        let b_term = self.price_curvature(p)?;
        Ok(match self.class {
            BehaviorClass::Casual => -b_term,
            BehaviorClass::Intermediate => -2.0 * self.c * (g / p).powi(2) - b_term,
            BehaviorClass::Serious => {
                let (a, b, v) = (self.modulation.a, self.modulation.b, self.v);
                let g_b = g.powf(b);
                let lead = a * b * self.h * v * g_b * (-v * a * g_b).exp() / (p * p);
                -self.w * (self.w - 1.0) * p.powf(self.w - 2.0) + lead * (-1.0 + b - a * b * v * g_b)
                    - b_term
            }
        })
    }

    /// Powers meeting the target SINR, or `None` if even `p_max` falls short.
    pub fn feasible_interval(&self, p_min: f64, p_max: f64) -> Option<(f64, f64)> {
        let req = self.required_power();
        (req <= p_max).then(|| (req.max(p_min), p_max))
    }

    /// Utility-maximizing power on the feasible interval.
    pub fn best_response(&self, p_min: f64, p_max: f64, tol: f64) -> Result<BestResponse> {
        let Some((lo, hi)) = self.feasible_interval(p_min, p_max) else {
            return Ok(BestResponse {
                power: p_max,
                outage: true,
            });
        };
        // Surface domain errors before handing closures to the solver.
        self.gradient(lo)?;
        self.gradient(hi)?;
        let power = match bisect_on_gradient(|p| self.gradient(p).unwrap_or(f64::NAN), lo, hi, tol) {
            Some(p) => p,
            None => golden_section(
                |p| self.value(p).unwrap_or(f64::NEG_INFINITY),
                lo,
                hi,
                tol,
            ),
        };
        Ok(BestResponse { power, outage: false })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub power: f64,
    /// The target SINR is out of reach even at maximum power.
    pub outage: bool,
}

pub fn follower_utility(
    class: BehaviorClass,
    x: f64,
    p: f64,
    own_gain: f64,
    interference_plus_noise: f64,
    config: &GameConfig,
) -> Result<f64> {
    FollowerUtility::new(config, class, Some(x), own_gain, interference_plus_noise).value(p)
}

pub fn follower_utility_gradient(
    class: BehaviorClass,
    x: f64,
    p: f64,
    own_gain: f64,
    interference_plus_noise: f64,
    config: &GameConfig,
) -> Result<f64> {
    FollowerUtility::new(config, class, Some(x), own_gain, interference_plus_noise).gradient(p)
}

pub fn follower_best_response(
    class: BehaviorClass,
    x: f64,
    own_gain: f64,
    interference_plus_noise: f64,
    config: &GameConfig,
) -> Result<BestResponse> {
    FollowerUtility::new(config, class, Some(x), own_gain, interference_plus_noise).best_response(
        config.p_min(),
        config.p_max(),
        config.solver_tolerance,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> GameConfig {
        GameConfig::default()
    }

    // Own gain and interference giving γ = γ̄ at 10 mW.
    fn at_target(class: BehaviorClass) -> FollowerUtility {
        let c = cfg();
        let gbar = c.qos_target(class).sinr;
        FollowerUtility::new(&c, class, Some(0.6), gbar * 1e-9 / 0.01, 1e-9)
    }

    #[test]
    fn intermediate_at_target() {
        let u = at_target(BehaviorClass::Intermediate);
        let d = u.price_at(0.01).unwrap();
        assert!((u.value(0.01).unwrap() - (-0.05 * 0.01 - d)).abs() < 1e-12);
        let a = u.price.d_dp(0.6, 0.01).unwrap();
        assert!((u.gradient(0.01).unwrap() - (-0.05 - a)).abs() < 1e-9);
    }

    #[test]
    fn casual_gradient_is_negative() {
        let c = cfg();
        let u = FollowerUtility::new(&c, BehaviorClass::Casual, Some(0.3), 1e-8, 1e-10);
        for k in 0..=100 {
            let p = c.p_min() + (c.p_max() - c.p_min()) * k as f64 / 100.0;
            assert!(u.gradient(p).unwrap() < 0.0);
        }
    }

    #[test]
    fn casual_responds_at_feasibility_boundary() {
        let c = cfg();
        let u = FollowerUtility::new(&c, BehaviorClass::Casual, Some(0.3), 1e-8, 1e-9);
        let br = u.best_response(c.p_min(), c.p_max(), 1e-9).unwrap();
        assert!(!br.outage);
        assert_eq!(br.power, u.required_power().max(c.p_min()));
    }

    #[test]
    fn unreachable_target_is_outage_at_max_power() {
        let c = cfg();
        let u = FollowerUtility::new(&c, BehaviorClass::Serious, Some(1.0), 1e-10, 1e-9);
        let br = u.best_response(c.p_min(), c.p_max(), 1e-9).unwrap();
        assert!(br.outage);
        assert_eq!(br.power, c.p_max());
    }

    #[test]
    fn serious_value_by_direct_substitution() {
        let c = cfg();
        let u = FollowerUtility::new(&c, BehaviorClass::Serious, Some(0.4), 2e-8, 1e-9);
        let p: f64 = 0.03;
        let gamma = p * 2e-8 / 1e-9;
        let pdr = (-0.0014 * gamma.powf(-6.88)).exp();
        let d = 1.8 / ((3.0f64 - 0.4).ln() * (2.001 - p / 0.6).ln());
        let oracle = -p * p - 1.0 / pdr.powi(4) - d;
        assert!((u.value(p).unwrap() - oracle).abs() <= 1e-12 * oracle.abs());
    }

    #[test]
    fn invalid_inputs_are_domain_errors() {
        let c = cfg();
        let u = FollowerUtility::new(&c, BehaviorClass::Casual, Some(0.3), 1e-8, 0.0);
        assert!(u.value(0.01).is_err());
        let u = FollowerUtility::new(&c, BehaviorClass::Casual, Some(0.3), 1e-8, 1e-9);
        assert!(u.value(0.0).is_err());
        assert!(u.value(0.9).is_err());
    }
}
