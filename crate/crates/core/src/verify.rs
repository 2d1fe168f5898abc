//! Runtime certificates for the equilibrium claims.
//!
//! [`check_epsilon_nash`] grid-searches unilateral deviations of every
//! follower (within its target-SINR feasible set, holding everyone else
//! fixed) and of the leader. [`check_pareto_convergence`] checks that the
//! leader's satisfaction climbs to 1 and stays there, and that once the
//! channel is frozen no follower could lower its power without giving up
//! utility or its target.
//!
//! One best response per stage is a Jacobi iteration, and with strongly
//! coupled pairs it can take hundreds of stages to damp out. Both
//! certificates therefore freeze the last channel and keep playing
//! ([`settle_on_frozen_channel`]) before they judge the state.

use crate::channel::ChannelGains;
use crate::config::{BehaviorClass, GameConfig};
use crate::error::Result;
use crate::follower::FollowerUtility;
use crate::game::{run_stage, StageRecord, Trajectory};
use crate::leader::{leader_utility, LeaderState};
use crate::link::interference_plus_noise;

/// The leader's side of a stage: what it observed and what it chose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeaderContext {
    pub satisfaction: f64,
    pub previous_satisfaction: f64,
    pub mean_power: f64,
    pub t: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashReport {
    /// Best unilateral utility gain per follower.
    pub follower_gains: Vec<f64>,
    pub max_gain: f64,
    /// Followers whose gain exceeds ε.
    pub violators: Vec<usize>,
    /// Gain available to the leader on its grid, if a leader was checked.
    pub leader_gain: Option<f64>,
    pub epsilon: f64,
    pub passed: bool,
}

fn grid(lo: f64, hi: f64, points: usize) -> impl Iterator<Item = f64> {
    let n = points.max(2) - 1;
    (0..=n).map(move |k| if k == n { hi } else { lo + (hi - lo) * k as f64 / n as f64 })
}

/// Best utility gain follower `i` could obtain by deviating alone.
fn deviation_gain(
    config: &GameConfig,
    class: BehaviorClass,
    satisfaction: Option<f64>,
    i: usize,
    powers: &[f64],
    gains: &ChannelGains,
    grid_points: usize,
) -> Result<f64> {
    let ipn = interference_plus_noise(i, powers, gains, config.noise_watts());
    let u = FollowerUtility::new(config, class, satisfaction, gains.own(i), ipn);
    let current = u.value(powers[i])?;
    let best = match u.feasible_interval(config.p_min(), config.p_max()) {
        Some((lo, hi)) => {
            let mut best = f64::NEG_INFINITY;
            for p in grid(lo, hi, grid_points) {
                best = best.max(u.value(p)?);
            }
            best
        }
        None => u.value(config.p_max())?,
    };
    Ok(best - current)
}

/// ε-Nash certificate of one stage on a fixed channel.
pub fn check_epsilon_nash(
    state: &StageRecord,
    gains: &ChannelGains,
    leader: Option<LeaderContext>,
    config: &GameConfig,
    epsilon: f64,
    grid_points: usize,
) -> Result<NashReport> {
    let powers = state.powers();
    let follower_gains = state
        .followers
        .iter()
        .map(|f| {
            deviation_gain(config, f.class, state.satisfaction, f.index, &powers, gains, grid_points)
        })
        .collect::<Result<Vec<_>>>()?;
    let violators: Vec<usize> = follower_gains
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > epsilon)
        .map(|(i, _)| i)
        .collect();
    let max_gain = follower_gains.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let leader_gain = match leader {
        Some(l) => {
            let u = |x| leader_utility(x, l.mean_power, l.t, l.previous_satisfaction, config.kappa_c);
            let chosen = u(l.satisfaction)?;
            let mut best = f64::NEG_INFINITY;
            for x in grid(config.x_floor, 1.0, grid_points) {
                best = best.max(u(x)?);
            }
            Some(best - chosen)
        }
        None => None,
    };
    let passed = violators.is_empty() && leader_gain.is_none_or(|g| g <= epsilon);
    Ok(NashReport {
        follower_gains,
        max_gain,
        violators,
        leader_gain,
        epsilon,
        passed,
    })
}

/// Outcome of replaying stages on a frozen channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Settled {
    /// The stage before `last`, needed to check the leader's choice.
    pub previous: StageRecord,
    pub last: StageRecord,
    pub stages: usize,
    /// Largest per-pair power change in the final replayed stage, watts.
    pub last_change: f64,
    pub converged: bool,
}

/// Keeps playing stages from `last` on `gains` until no power moves by more
/// than `tolerance` watts, or `max_stages` have been played.
pub fn settle_on_frozen_channel(
    last: &StageRecord,
    gains: &ChannelGains,
    config: &GameConfig,
    max_stages: usize,
    tolerance: f64,
) -> Result<Settled> {
    let classes: Vec<BehaviorClass> = last.followers.iter().map(|f| f.class).collect();
    let mut leader = last.satisfaction.map(|x| LeaderState::new(x, config.kappa_c));
    let mut previous = last.clone();
    let mut current = last.clone();
    let mut last_change = f64::INFINITY;
    let mut stages = 0;
    while stages < max_stages {
        let next = run_stage(
            current.t + 1,
            leader.as_mut(),
            &current.powers(),
            &classes,
            gains,
            config,
        )?;
        stages += 1;
        last_change = next
            .followers
            .iter()
            .zip(&current.followers)
            .map(|(a, b)| (a.power - b.power).abs())
            .fold(0.0, f64::max);
        previous = std::mem::replace(&mut current, next);
        if last_change <= tolerance {
            break;
        }
    }
    Ok(Settled {
        previous,
        last: current,
        stages,
        last_change,
        converged: last_change <= tolerance,
    })
}

/// Leader inputs of `last`, reconstructed from the stage before it.
pub fn leader_context(previous: &StageRecord, last: &StageRecord, config: &GameConfig) -> Option<LeaderContext> {
    let x = last.satisfaction?;
    let powers = previous.powers();
    Some(LeaderContext {
        satisfaction: x,
        previous_satisfaction: previous.satisfaction.unwrap_or(config.x_init),
        mean_power: powers.iter().sum::<f64>() / powers.len().max(1) as f64,
        t: last.t,
    })
}

/// Freezes the trajectory's last channel, settles the game on it, and
/// certifies the settled state.
pub fn certify_final_stage(
    trajectory: &Trajectory,
    config: &GameConfig,
    epsilon: f64,
    grid_points: usize,
) -> Option<Result<(NashReport, Settled)>> {
    let last = trajectory.records.last()?;
    let gains = trajectory.final_gains.as_ref()?;
    Some((|| {
        let settled = settle_on_frozen_channel(last, gains, config, SETTLE_STAGES, settle_tolerance(config))?;
        let leader = leader_context(&settled.previous, &settled.last, config);
        let report = check_epsilon_nash(&settled.last, gains, leader, config, epsilon, grid_points)?;
        Ok((report, settled))
    })())
}

/// Replay budget used by the trajectory-level certificates.
pub const SETTLE_STAGES: usize = 20_000;
/// Power slack, in watts, allowed by the power-minimality check.
pub const MINIMALITY_MARGIN: f64 = 1e-6;

/// Power change, in watts, below which a replay counts as settled. Interior
/// best responses are only resolved to the solver tolerance, so asking for
/// less movement than that can jitter forever.
pub fn settle_tolerance(config: &GameConfig) -> f64 {
    10.0 * config.solver_tolerance
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParetoReport {
    pub convergence_stage: Option<u32>,
    /// Satisfaction never decreases after its minimum and ends at 1.
    pub satisfaction_monotone: bool,
    /// `None` when the trajectory carries no channel to replay on.
    pub power_minimal: Option<bool>,
    /// Followers that could still lower their power after the replay.
    pub non_minimal: Vec<usize>,
    /// Stages replayed on the frozen channel before judging minimality.
    pub settled_stages: Option<usize>,
    /// Post- minus pre-convergence class mean power, dB.
    pub class_power_delta_db: [Option<f64>; 3],
    pub passed: bool,
}

impl ParetoReport {
    pub fn converged(&self) -> bool {
        self.convergence_stage.is_some()
    }
}

fn satisfaction_monotone(xs: &[f64]) -> bool {
    let Some(min_pos) = xs
        .iter()
        .enumerate()
        .rev()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
    else {
        return false;
    };
    let after = &xs[min_pos..];
    let climbs = after.windows(2).all(|w| w[1] >= w[0]);
    let first_one = xs.iter().position(|&x| x == 1.0);
    climbs && first_one.is_some_and(|k| xs[k..].iter().all(|&x| x == 1.0))
}

/// Settles the final state on its frozen channel (at most `max_replay`
/// stages) and checks that each follower ends at the smallest power
/// maximizing its utility.
pub fn check_pareto_convergence(
    trajectory: &Trajectory,
    config: &GameConfig,
    max_replay: usize,
) -> Result<ParetoReport> {
    let xs: Vec<f64> = trajectory.records.iter().filter_map(|r| r.satisfaction).collect();
    let convergence_stage = trajectory.convergence_stage();
    let monotone = !xs.is_empty() && satisfaction_monotone(&xs);

    let mut before = [(0.0, 0usize); 3];
    let mut after = [(0.0, 0usize); 3];
    for r in &trajectory.records {
        let bucket = if r.satisfaction == Some(1.0) { &mut after } else { &mut before };
        for f in &r.followers {
            let slot = &mut bucket[f.class.index()];
            slot.0 += f.power;
            slot.1 += 1;
        }
    }
    let class_power_delta_db = std::array::from_fn(|k| {
        let (b, a) = (before[k], after[k]);
        (b.1 > 0 && a.1 > 0).then(|| 10.0 * ((a.0 / a.1 as f64) / (b.0 / b.1 as f64)).log10())
    });

    let mut non_minimal = Vec::new();
    let mut settled_stages = None;
    let power_minimal = match (trajectory.final_gains.as_ref(), trajectory.records.last()) {
        (Some(gains), Some(last)) if convergence_stage.is_some() => {
            let settled = settle_on_frozen_channel(last, gains, config, max_replay, settle_tolerance(config))?;
            settled_stages = Some(settled.stages);
            let noise = config.noise_watts();
            let state = &settled.last;
            let powers = state.powers();
            for f in &state.followers {
                let i = f.index;
                let ipn = interference_plus_noise(i, &powers, gains, noise);
                let u = FollowerUtility::new(config, f.class, state.satisfaction, gains.own(i), ipn);
                let Some((lo, _)) = u.feasible_interval(config.p_min(), config.p_max()) else {
                    continue;
                };
                let here = u.value(powers[i])?;
                let slack = 1e-9 * here.abs().max(1.0);
                // The settled state is only as still as the replay tolerance, and
                // slow cells sit a little off their fixed point; powers within
                // 1e-6 W of the boundary count as on it.
                let top = powers[i] - MINIMALITY_MARGIN;
                // A cheaper feasible power that is at least as good?
                if top > lo {
                    let mut cheaper = false;
                    for p in grid(lo, top, 200) {
                        if u.value(p)? >= here + slack {
                            cheaper = true;
                            break;
                        }
                    }
                    if cheaper {
                        non_minimal.push(i);
                    }
                }
            }
            Some(non_minimal.is_empty())
        }
        _ => None,
    };

    let passed = convergence_stage.is_some() && monotone && power_minimal.unwrap_or(true);
    Ok(ParetoReport {
        convergence_stage,
        satisfaction_monotone: monotone,
        power_minimal,
        non_minimal,
        settled_stages,
        class_power_delta_db,
        passed,
    })
}
