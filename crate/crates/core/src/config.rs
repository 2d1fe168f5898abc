//! Scenario constants, the TOML config format, behavior class assignment and
//! per-repetition RNG streams.
//!
//! Every default is the reference scenario: a 500 m cell with 24 D2D pairs,
//! 16-QAM, 0–23 dBm transmit power, −99.21 dBm noise and slow fading with
//! `f_D·T_s = 0.01`. Powers are stored in dBm in the file and exposed in
//! watts, which is the unit the satisfaction price is defined over.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::link::{self, Modulation, ModulationParams};
use crate::units::dbm_to_watts;

/// Traffic profile a D2D pair commits to for the whole game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BehaviorClass {
    Casual,
    Intermediate,
    Serious,
}

impl BehaviorClass {
    pub const ALL: [BehaviorClass; 3] = [
        BehaviorClass::Casual,
        BehaviorClass::Intermediate,
        BehaviorClass::Serious,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Minimum PDR the class must reach. Without priority every class uses 0.90.
    pub fn target_pdr(self, priority: bool) -> f64 {
        if !priority {
            return 0.90;
        }
        match self {
            BehaviorClass::Casual => 0.90,
            BehaviorClass::Intermediate => 0.94,
            BehaviorClass::Serious => 0.98,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BehaviorClass::Casual => "casual",
            BehaviorClass::Intermediate => "intermediate",
            BehaviorClass::Serious => "serious",
        }
    }
}

impl fmt::Display for BehaviorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Target PDR of a class and the SINR that achieves it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QosTarget {
    pub pdr: f64,
    pub sinr: f64,
}

/// Round-robin split: pair `i` gets class `i mod 3`.
pub fn assign_behavior_classes(pairs: usize) -> Result<Vec<BehaviorClass>> {
    if pairs == 0 || !pairs.is_multiple_of(3) {
        return Err(Error::Validation(format!(
            "pair count {pairs} cannot be split evenly over three behavior classes"
        )));
    }
    Ok((0..pairs).map(|i| BehaviorClass::ALL[i % 3]).collect())
}

/// Any key left out of a config file keeps its default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GameConfig {
    /// Cell radius in meters.
    pub cell_radius: f64,
    /// Maximum transmitter–receiver distance inside a pair, meters.
    pub max_pair_distance: f64,
    /// Informational; the channel model does not depend on it.
    pub carrier_frequency: f64,
    /// Number of D2D pairs `M`.
    pub pairs: usize,
    pub reference_distance: f64,
    pub path_loss_exponent: f64,
    /// `log10` of the path loss attenuation `A_PL`.
    pub path_loss_log10: f64,
    /// Normalized Doppler `f_D·T_s` per game stage.
    pub doppler_spread: f64,
    /// Sinusoids per fading link.
    pub oscillators: usize,
    /// Distances are floored here before entering the path loss.
    pub min_distance: f64,
    pub noise_dbm: f64,
    pub p_min_dbm: f64,
    pub p_max_dbm: f64,
    /// The cellular user is on orthogonal spectrum and never interferes.
    pub cellular_power_dbm: f64,
    pub stages: usize,
    pub repetitions: usize,
    pub kappa_c: f64,
    pub delta: f64,
    pub q: f64,
    pub y: f64,
    pub z: f64,
    pub s: f64,
    pub c: f64,
    pub w: f64,
    pub v: f64,
    pub h: f64,
    /// Written by name (`"QPSK"`, `"16QAM"`, `"64QAM"`).
    #[serde(with = "modulation_name")]
    pub modulation: ModulationParams,
    pub priority: bool,
    pub x_init: f64,
    pub x_floor: f64,
    pub seed: u64,
    /// Best-response bracket width in watts.
    pub solver_tolerance: f64,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig {
            cell_radius: 500.0,
            max_pair_distance: 50.0,
            carrier_frequency: 2e9,
            pairs: 24,
            reference_distance: 20.0,
            path_loss_exponent: 4.0,
            path_loss_log10: -3.22,
            doppler_spread: 0.01,
            oscillators: 16,
            min_distance: 1.0,
            noise_dbm: -99.21,
            p_min_dbm: 0.0,
            p_max_dbm: 23.0,
            cellular_power_dbm: 14.0,
            stages: 100,
            repetitions: 100,
            kappa_c: 4.0,
            delta: 1.8,
            q: 3.0,
            y: 2.001,
            z: 0.6,
            s: 0.05,
            c: 1.0,
            w: 2.0,
            v: 4.0,
            h: 1.0,
            modulation: Modulation::Qam16.params(),
            priority: false,
            x_init: 0.001,
            x_floor: 0.001,
            seed: 1,
            solver_tolerance: 1e-9,
        }
    }
}

impl GameConfig {
    pub fn path_loss_attenuation(&self) -> f64 {
        10f64.powf(self.path_loss_log10)
    }

    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    pub fn p_min(&self) -> f64 {
        dbm_to_watts(self.p_min_dbm)
    }

    pub fn p_max(&self) -> f64 {
        dbm_to_watts(self.p_max_dbm)
    }

    pub fn qos_target(&self, class: BehaviorClass) -> QosTarget {
        let pdr = class.target_pdr(self.priority);
        let sinr = link::target_sinr(pdr, &self.modulation)
            .expect("class target PDRs lie strictly inside (0, 1)");
        QosTarget { pdr, sinr }
    }

    /// Checks the invariants in order and reports the first violation.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("cell_radius", self.cell_radius),
            ("max_pair_distance", self.max_pair_distance),
            ("carrier_frequency", self.carrier_frequency),
            ("reference_distance", self.reference_distance),
            ("path_loss_exponent", self.path_loss_exponent),
            ("min_distance", self.min_distance),
            ("kappa_c", self.kappa_c),
            ("delta", self.delta),
            ("q", self.q),
            ("y", self.y),
            ("z", self.z),
            ("s", self.s),
            ("c", self.c),
            ("v", self.v),
            ("h", self.h),
            ("x_init", self.x_init),
            ("x_floor", self.x_floor),
            ("solver_tolerance", self.solver_tolerance),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(format!("{name} must be finite and > 0, got {value}")));
            }
        }
        let finite = [
            ("path_loss_log10", self.path_loss_log10),
            ("noise_dbm", self.noise_dbm),
            ("p_min_dbm", self.p_min_dbm),
            ("p_max_dbm", self.p_max_dbm),
            ("cellular_power_dbm", self.cellular_power_dbm),
            ("doppler_spread", self.doppler_spread),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(invalid(format!("{name} must be finite, got {value}")));
            }
        }
        if self.pairs == 0 {
            return Err(invalid("pairs must be at least 1".into()));
        }
        if self.max_pair_distance > self.cell_radius {
            return Err(invalid("max_pair_distance must not exceed cell_radius".into()));
        }
        if self.min_distance >= self.max_pair_distance {
            return Err(invalid("min_distance must be below max_pair_distance".into()));
        }
        if self.doppler_spread < 0.0 {
            return Err(invalid("doppler_spread must be >= 0".into()));
        }
        if self.oscillators == 0 {
            return Err(invalid("oscillators must be at least 1".into()));
        }
        if self.w < 1.0 {
            return Err(invalid(format!("w must be >= 1, got {}", self.w)));
        }
        if !(self.modulation.a < 0.0 && self.modulation.b < 0.0) {
            return Err(invalid("modulation constants need a < 0 and b < 0".into()));
        }
        if self.p_min_dbm >= self.p_max_dbm {
            return Err(invalid("p_min_dbm must be below p_max_dbm".into()));
        }
        if self.p_max() / self.z >= self.y - 1.0 {
            return Err(invalid(format!(
                "p_max/z = {} must stay below y - 1 = {} so ln(y - p/z) > 0",
                self.p_max() / self.z,
                self.y - 1.0
            )));
        }
        if self.q - 1.0 <= 1.0 {
            return Err(invalid(format!(
                "q must exceed 2 so ln(q - x) > 0 for every x in (0, 1], got {}",
                self.q
            )));
        }
        if self.x_floor > 1.0 {
            return Err(invalid("x_floor must lie in (0, 1]".into()));
        }
        if !(self.x_init >= self.x_floor && self.x_init <= 1.0) {
            return Err(invalid("x_init must lie in [x_floor, 1]".into()));
        }
        if self.repetitions == 0 {
            return Err(invalid("repetitions must be at least 1".into()));
        }
        Ok(())
    }

    /// The config as a TOML document listing every key.
    pub fn to_config_string(&self) -> String {
        toml::to_string(self).expect("every field serializes to TOML")
    }
}

mod modulation_name {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::link::{Modulation, ModulationParams};

    pub fn serialize<S: Serializer>(m: &ModulationParams, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(m.modulation.name())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ModulationParams, D::Error> {
        let name = String::deserialize(d)?;
        name.parse::<Modulation>()
            .map(Modulation::params)
            .map_err(serde::de::Error::custom)
    }
}

fn invalid(msg: String) -> Error {
    Error::Validation(msg)
}

/// Parses a TOML config document and validates it.
pub fn load_config(source: &str) -> Result<GameConfig> {
    let config: GameConfig = toml::from_str(source).map_err(|e| Error::Parse {
        line: e
            .span()
            .map_or(0, |span| source[..span.start].matches('\n').count() + 1),
        detail: e.message().to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

/// Independent random streams inside one repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Topology = 0,
    Fading = 1,
    InitialPowers = 2,
    Aux = 3,
}

/// RNG for `(seed, repetition, purpose)`. U-BeAS and baseline runs with the
/// same seed therefore see the same cell, fading and starting powers.
pub fn stream_rng(seed: u64, rep: usize, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64 * 4 + purpose as u64);
    rng
}
