//! The repeated leader–follower game.
//!
//! Within each stage `t` the base station moves first, updating its
//! satisfaction from the followers' previous mean power. Every follower then
//! best-responds simultaneously to the interference produced by the previous
//! stage's powers on the current channel, paying the price set by the new
//! satisfaction. Finally SINR and PDR are measured with the new powers.

use rand::Rng;

use crate::channel::{gain_matrix, ChannelGains};
use crate::config::{stream_rng, BehaviorClass, GameConfig, Stream};
use crate::error::{Error, Result};
use crate::fading::FadingState;
use crate::follower::FollowerUtility;
use crate::leader::LeaderState;
use crate::link::{interference_plus_noise, pdr_from_sinr};
use crate::topology::{generate_topology, CellTopology};
use crate::units::watts_to_dbm;

/// Which game the followers play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameKind {
    /// Leader sets satisfaction; followers pay the satisfaction price.
    Ubeas,
    /// Non-cooperative power control: same utilities, no leader, no price.
    Npc,
}

impl GameKind {
    pub fn name(self) -> &'static str {
        match self {
            GameKind::Ubeas => "ubeas",
            GameKind::Npc => "npc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FollowerState {
    pub index: usize,
    pub class: BehaviorClass,
    /// Transmit power in watts.
    pub power: f64,
    pub sinr: f64,
    pub pdr: f64,
    pub utility: f64,
    pub price: f64,
    pub outage: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageRecord {
    pub t: u32,
    /// Leader satisfaction; `None` in games without a leader.
    pub satisfaction: Option<f64>,
    pub followers: Vec<FollowerState>,
    /// Per-class mean power (linear average, shown in dBm).
    pub class_power_dbm: [Option<f64>; 3],
    pub class_pdr: [Option<f64>; 3],
}

impl StageRecord {
    fn new(t: u32, satisfaction: Option<f64>, followers: Vec<FollowerState>) -> Self {
        let mut power = [0.0; 3];
        let mut pdr = [0.0; 3];
        let mut count = [0usize; 3];
        for f in &followers {
            let k = f.class.index();
            power[k] += f.power;
            pdr[k] += f.pdr;
            count[k] += 1;
        }
        let mean = |sum: f64, n: usize| (n > 0).then(|| sum / n as f64);
        StageRecord {
            t,
            satisfaction,
            class_power_dbm: std::array::from_fn(|k| mean(power[k], count[k]).map(watts_to_dbm)),
            class_pdr: std::array::from_fn(|k| mean(pdr[k], count[k])),
            followers,
        }
    }

    pub fn powers(&self) -> Vec<f64> {
        self.followers.iter().map(|f| f.power).collect()
    }

    pub fn any_outage(&self) -> bool {
        self.followers.iter().any(|f| f.outage)
    }
}

/// One repetition of the game.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub rep: usize,
    pub kind: GameKind,
    pub records: Vec<StageRecord>,
    /// Channel of the last stage, kept for frozen-channel verification.
    pub final_gains: Option<ChannelGains>,
}

impl Trajectory {
    /// First stage at which satisfaction reached 1.
    pub fn convergence_stage(&self) -> Option<u32> {
        self.records
            .iter()
            .find(|r| r.satisfaction == Some(1.0))
            .map(|r| r.t)
    }
}

/// Plays stage `t`. `leader` is `None` for the baseline game.
pub fn run_stage(
    t: u32,
    leader: Option<&mut LeaderState>,
    previous_powers: &[f64],
    classes: &[BehaviorClass],
    gains: &ChannelGains,
    config: &GameConfig,
) -> Result<StageRecord> {
    let m = classes.len();
    if previous_powers.len() != m || gains.len() != m {
        return Err(Error::domain("run_stage", "pair count mismatch between powers, classes and gains"));
    }
    let satisfaction = leader.map(|l| {
        l.update(t, previous_powers, config.x_floor);
        l.satisfaction
    });
    let noise = config.noise_watts();
    let (p_min, p_max) = (config.p_min(), config.p_max());

    let mut utilities = Vec::with_capacity(m);
    let mut responses = Vec::with_capacity(m);
    for (i, &class) in classes.iter().enumerate() {
        let ipn = interference_plus_noise(i, previous_powers, gains, noise);
        let u = FollowerUtility::new(config, class, satisfaction, gains.own(i), ipn);
        responses.push(u.best_response(p_min, p_max, config.solver_tolerance)?);
        utilities.push(u);
    }

    let powers: Vec<f64> = responses.iter().map(|r| r.power).collect();
    let followers = classes
        .iter()
        .enumerate()
        .map(|(i, &class)| {
            let ipn = interference_plus_noise(i, &powers, gains, noise);
            let realized = FollowerUtility {
                interference_plus_noise: ipn,
                ..utilities[i]
            };
            let p = powers[i];
            let sinr = realized.sinr(p);
            Ok(FollowerState {
                index: i,
                class,
                power: p,
                sinr,
                pdr: pdr_from_sinr(sinr, &config.modulation)?,
                utility: realized.value(p)?,
                price: realized.price_at(p)?,
                outage: responses[i].outage,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StageRecord::new(t, satisfaction, followers))
}

/// Runs `config.stages` stages on an explicit cell, fading process and
/// starting powers.
pub fn simulate(
    config: &GameConfig,
    kind: GameKind,
    rep: usize,
    topology: &CellTopology,
    fading: &mut FadingState,
    initial_powers: Vec<f64>,
) -> Result<Trajectory> {
    let classes = topology.classes();
    let mut leader = LeaderState::new(config.x_init, config.kappa_c);
    let mut powers = initial_powers;
    let mut records = Vec::with_capacity(config.stages);
    let mut final_gains = None;
    for t in 1..=config.stages as u32 {
        let gains = gain_matrix(topology, &fading.advance(), config);
        let leader_ref = match kind {
            GameKind::Ubeas => Some(&mut leader),
            GameKind::Npc => None,
        };
        let record = run_stage(t, leader_ref, &powers, &classes, &gains, config)?;
        powers = record.powers();
        records.push(record);
        final_gains = Some(gains);
    }
    Ok(Trajectory {
        rep,
        kind,
        records,
        final_gains,
    })
}

/// Independent uniform draws on `[p_min, p_max]`.
pub fn initial_powers<R: Rng + ?Sized>(config: &GameConfig, pairs: usize, rng: &mut R) -> Vec<f64> {
    let (lo, hi) = (config.p_min(), config.p_max());
    (0..pairs).map(|_| rng.random_range(lo..=hi)).collect()
}

/// Repetition `rep` of the game, seeded from `(config.seed, rep)`.
///
/// The cell, the fading process and the starting powers each come from their
/// own stream, so both game kinds see identical randomness for a given seed.
pub fn run_game(config: &GameConfig, kind: GameKind, rep: usize) -> Result<Trajectory> {
    let seed = config.seed;
    let topology = generate_topology(config, &mut stream_rng(seed, rep, Stream::Topology))?;
    let mut fading = FadingState::new(
        topology.len(),
        config.oscillators,
        config.doppler_spread,
        &mut stream_rng(seed, rep, Stream::Fading),
    );
    let powers = initial_powers(config, topology.len(), &mut stream_rng(seed, rep, Stream::InitialPowers));
    simulate(config, kind, rep, &topology, &mut fading, powers)
}
