//! SINR and the compressed-exponential packet delivery ratio model.
//!
//! PDR is modelled as `exp(-(1 / (γ·a_c))^b_c)`, rewritten at runtime as
//! `exp(a·γ^b)` with `a < 0`, `b < 0`. Both parameterizations are stored
//! because the tabulated `(a, b)` columns are not the exact rewrite of the
//! tabulated `(a_c, b_c)` columns; the `(a, b)` pair is canonical.

use std::fmt;
use std::str::FromStr;

use crate::channel::ChannelGains;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub const ALL: [Modulation; 3] = [Modulation::Qpsk, Modulation::Qam16, Modulation::Qam64];

    /// Tabulated curve-fit constants for 1024-byte packets with rate-1/3 turbo coding.
    pub fn params(self) -> ModulationParams {
        match self {
            Modulation::Qpsk => ModulationParams {
                modulation: self,
                a_c: 2.331,
                b_c: 6.355,
                a: -0.0001,
                b: -6.22,
                coding_gain_db: 13.75,
            },
            Modulation::Qam16 => ModulationParams {
                modulation: self,
                a_c: 1.383,
                b_c: 6.565,
                a: -0.0014,
                b: -6.88,
                coding_gain_db: 15.75,
            },
            Modulation::Qam64 => ModulationParams {
                modulation: self,
                a_c: 0.762,
                b_c: 7.014,
                a: -0.2669,
                b: -7.021,
                coding_gain_db: 17.0,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Modulation::Qpsk => "QPSK",
            Modulation::Qam16 => "16QAM",
            Modulation::Qam64 => "64QAM",
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Modulation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().replace('-', "").as_str() {
            "QPSK" => Ok(Modulation::Qpsk),
            "16QAM" => Ok(Modulation::Qam16),
            "64QAM" => Ok(Modulation::Qam64),
            other => Err(format!("unknown modulation `{other}`")),
        }
    }
}

/// Constants of the PDR curve for one modulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    pub modulation: Modulation,
    pub a_c: f64,
    pub b_c: f64,
    /// Runtime exponent scale, `a < 0`.
    pub a: f64,
    /// Runtime exponent, `b < 0`.
    pub b: f64,
    pub coding_gain_db: f64,
}

impl ModulationParams {
    /// Builds the runtime `(a, b)` form directly from a fitted `(a_c, b_c)`.
    pub fn from_fit(modulation: Modulation, a_c: f64, b_c: f64) -> Self {
        ModulationParams {
            modulation,
            a_c,
            b_c,
            a: -(1.0 / a_c).powf(b_c),
            b: -b_c,
            coding_gain_db: modulation.params().coding_gain_db,
        }
    }
}

/// SINR and PDR observed by one receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMeasurement {
    pub sinr: f64,
    pub pdr: f64,
}

impl LinkMeasurement {
    pub fn new(sinr: f64, params: &ModulationParams) -> Result<Self> {
        Ok(LinkMeasurement {
            sinr,
            pdr: pdr_from_sinr(sinr, params)?,
        })
    }
}

/// Interference plus noise at receiver `i`, with every pair on the same spectrum.
pub fn interference_plus_noise(i: usize, powers: &[f64], gains: &ChannelGains, noise: f64) -> f64 {
    let interference: f64 = powers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, &p)| p * gains.get(j, i))
        .sum();
    interference + noise
}

/// SINR at the receiver of pair `i` given every pair's transmit power in watts.
pub fn sinr(i: usize, powers: &[f64], gains: &ChannelGains, noise: f64) -> Result<f64> {
    if i >= powers.len() || i >= gains.len() {
        return Err(Error::domain(
            "sinr",
            format!("pair index {i} out of range for {} pairs", powers.len().min(gains.len())),
        ));
    }
    if powers.len() != gains.len() {
        return Err(Error::domain("sinr", "power vector and gain matrix disagree on pair count"));
    }
    if noise <= 0.0 {
        return Err(Error::domain("sinr", "noise power must be positive"));
    }
    Ok(powers[i] * gains.get(i, i) / interference_plus_noise(i, powers, gains, noise))
}

pub fn pdr_from_sinr(sinr: f64, params: &ModulationParams) -> Result<f64> {
    Ok(log_pdr_from_sinr(sinr, params)?.exp())
}

/// `ln(pdr) = a·γ^b`. Stays accurate where the PDR itself rounds to 0 or 1.
pub fn log_pdr_from_sinr(sinr: f64, params: &ModulationParams) -> Result<f64> {
    if !(sinr > 0.0) {
        return Err(Error::domain("pdr_from_sinr", format!("SINR must be positive, got {sinr}")));
    }
    Ok(params.a * sinr.powf(params.b))
}

/// Inverse of [`log_pdr_from_sinr`].
pub fn sinr_for_log_pdr(log_pdr: f64, params: &ModulationParams) -> Result<f64> {
    if !(log_pdr < 0.0) {
        return Err(Error::domain(
            "target_sinr",
            format!("log PDR must be negative, got {log_pdr}"),
        ));
    }
    Ok((log_pdr / params.a).powf(1.0 / params.b))
}

/// d(pdr)/dγ = pdr·a·b·γ^(b−1).
pub fn pdr_sinr_derivative(sinr: f64, params: &ModulationParams) -> Result<f64> {
    let pdr = pdr_from_sinr(sinr, params)?;
    Ok(pdr * params.a * params.b * sinr.powf(params.b - 1.0))
}

/// SINR at which the PDR curve reaches `pdr_target`: `(ln(pdr)/a)^(1/b)`.
pub fn target_sinr(pdr_target: f64, params: &ModulationParams) -> Result<f64> {
    if !(pdr_target > 0.0 && pdr_target < 1.0) {
        return Err(Error::domain(
            "target_sinr",
            format!("target PDR must lie in (0, 1), got {pdr_target}"),
        ));
    }
    sinr_for_log_pdr(pdr_target.ln(), params)
}
