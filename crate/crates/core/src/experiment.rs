//! Monte Carlo driver and the statistics behind the power and PDR tables.
//!
//! Powers are averaged in watts and only converted to dBm for display.
//! U-BeAS samples are split by whether the leader had reached full
//! satisfaction (`x = 1`) at that stage.

use rayon::prelude::*;

use crate::config::{BehaviorClass, GameConfig};
use crate::error::{Error, Result};
use crate::game::{run_game, GameKind, Trajectory};
use crate::units::watts_to_dbm;

/// Running sums per behavior class. Merging two accumulators is exact up to
/// floating point reassociation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClassAccumulator {
    pub power_sum: [f64; 3],
    pub pdr_sum: [f64; 3],
    pub outages: [usize; 3],
    pub count: [usize; 3],
}

impl ClassAccumulator {
    pub fn add(&mut self, class: BehaviorClass, power: f64, pdr: f64, outage: bool) {
        let k = class.index();
        self.power_sum[k] += power;
        self.pdr_sum[k] += pdr;
        self.outages[k] += usize::from(outage);
        self.count[k] += 1;
    }

    pub fn merge(&mut self, other: &ClassAccumulator) {
        for k in 0..3 {
            self.power_sum[k] += other.power_sum[k];
            self.pdr_sum[k] += other.pdr_sum[k];
            self.outages[k] += other.outages[k];
            self.count[k] += other.count[k];
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count.iter().all(|&n| n == 0)
    }

    pub fn mean_power_watts(&self, class: BehaviorClass) -> Option<f64> {
        let k = class.index();
        (self.count[k] > 0).then(|| self.power_sum[k] / self.count[k] as f64)
    }

    pub fn mean_power_dbm(&self, class: BehaviorClass) -> Option<f64> {
        self.mean_power_watts(class).map(watts_to_dbm)
    }

    pub fn mean_pdr(&self, class: BehaviorClass) -> Option<f64> {
        let k = class.index();
        (self.count[k] > 0).then(|| self.pdr_sum[k] / self.count[k] as f64)
    }

    pub fn outage_rate(&self, class: BehaviorClass) -> Option<f64> {
        let k = class.index();
        (self.count[k] > 0).then(|| self.outages[k] as f64 / self.count[k] as f64)
    }

    /// Same statistics pooled over all classes.
    pub fn pooled_power_dbm(&self) -> Option<f64> {
        let n: usize = self.count.iter().sum();
        (n > 0).then(|| watts_to_dbm(self.power_sum.iter().sum::<f64>() / n as f64))
    }

    pub fn pooled_pdr(&self) -> Option<f64> {
        let n: usize = self.count.iter().sum();
        (n > 0).then(|| self.pdr_sum.iter().sum::<f64>() / n as f64)
    }

    pub fn pooled_outage_rate(&self) -> Option<f64> {
        let n: usize = self.count.iter().sum();
        (n > 0).then(|| self.outages.iter().sum::<usize>() as f64 / n as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageMeans {
    pub t: u32,
    pub satisfaction_sum: f64,
    pub satisfaction_count: usize,
    pub classes: ClassAccumulator,
}

impl StageMeans {
    pub fn mean_satisfaction(&self) -> Option<f64> {
        (self.satisfaction_count > 0).then(|| self.satisfaction_sum / self.satisfaction_count as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSummary {
    pub kind: GameKind,
    pub repetitions: usize,
    /// Stages where satisfaction was below 1. Empty for baseline games.
    pub before: ClassAccumulator,
    /// Stages with satisfaction exactly 1. Empty for baseline games.
    pub after: ClassAccumulator,
    pub all: ClassAccumulator,
    pub per_stage: Vec<StageMeans>,
    /// Per repetition, the first stage with `x = 1`.
    pub convergence_stages: Vec<Option<u32>>,
    /// Per repetition, all-stage class means `(power W, pdr)`.
    pub rep_means: Vec<[(Option<f64>, Option<f64>); 3]>,
}

impl ExperimentSummary {
    /// Standard error of the mean power (W) across repetitions.
    pub fn power_stderr_watts(&self, class: BehaviorClass) -> Option<f64> {
        stderr(self.rep_means.iter().filter_map(|m| m[class.index()].0))
    }

    pub fn pdr_stderr(&self, class: BehaviorClass) -> Option<f64> {
        stderr(self.rep_means.iter().filter_map(|m| m[class.index()].1))
    }

    pub fn converged_fraction(&self) -> f64 {
        if self.convergence_stages.is_empty() {
            return 0.0;
        }
        self.convergence_stages.iter().filter(|s| s.is_some()).count() as f64
            / self.convergence_stages.len() as f64
    }

    /// Merges the summary of a disjoint set of repetitions.
    pub fn merge(&mut self, other: &ExperimentSummary) -> Result<()> {
        if self.kind != other.kind || self.per_stage.len() != other.per_stage.len() {
            return Err(Error::domain("merge", "summaries cover different games or stage counts"));
        }
        self.repetitions += other.repetitions;
        self.before.merge(&other.before);
        self.after.merge(&other.after);
        self.all.merge(&other.all);
        for (a, b) in self.per_stage.iter_mut().zip(&other.per_stage) {
            a.satisfaction_sum += b.satisfaction_sum;
            a.satisfaction_count += b.satisfaction_count;
            a.classes.merge(&b.classes);
        }
        self.convergence_stages.extend_from_slice(&other.convergence_stages);
        self.rep_means.extend_from_slice(&other.rep_means);
        Ok(())
    }
}

fn stderr(values: impl Iterator<Item = f64>) -> Option<f64> {
    let v: Vec<f64> = values.collect();
    if v.len() < 2 {
        return None;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((var / n).sqrt())
}

pub fn summarize(trajectories: &[Trajectory]) -> Result<ExperimentSummary> {
    let first = trajectories.first().ok_or(Error::Empty("no trajectories to summarize"))?;
    let stages = first.records.len();
    if trajectories.iter().any(|t| t.records.len() != stages || t.kind != first.kind) {
        return Err(Error::domain("summarize", "trajectories differ in length or game kind"));
    }
    let mut summary = ExperimentSummary {
        kind: first.kind,
        repetitions: trajectories.len(),
        before: ClassAccumulator::default(),
        after: ClassAccumulator::default(),
        all: ClassAccumulator::default(),
        per_stage: first
            .records
            .iter()
            .map(|r| StageMeans {
                t: r.t,
                satisfaction_sum: 0.0,
                satisfaction_count: 0,
                classes: ClassAccumulator::default(),
            })
            .collect(),
        convergence_stages: Vec::with_capacity(trajectories.len()),
        rep_means: Vec::with_capacity(trajectories.len()),
    };
    for tr in trajectories {
        let mut rep = ClassAccumulator::default();
        for (record, stage) in tr.records.iter().zip(summary.per_stage.iter_mut()) {
            if let Some(x) = record.satisfaction {
                stage.satisfaction_sum += x;
                stage.satisfaction_count += 1;
            }
            for f in &record.followers {
                stage.classes.add(f.class, f.power, f.pdr, f.outage);
                rep.add(f.class, f.power, f.pdr, f.outage);
                summary.all.add(f.class, f.power, f.pdr, f.outage);
                match record.satisfaction {
                    Some(1.0) => summary.after.add(f.class, f.power, f.pdr, f.outage),
                    Some(_) => summary.before.add(f.class, f.power, f.pdr, f.outage),
                    None => {}
                }
            }
        }
        summary.convergence_stages.push(tr.convergence_stage());
        summary
            .rep_means
            .push(BehaviorClass::ALL.map(|c| (rep.mean_power_watts(c), rep.mean_pdr(c))));
    }
    Ok(summary)
}

/// Runs `config.repetitions` independent repetitions in parallel. The output
/// depends only on the config, never on thread scheduling.
pub fn run_experiment(config: &GameConfig, kind: GameKind) -> Result<(ExperimentSummary, Vec<Trajectory>)> {
    config.validate()?;
    let trajectories = (0..config.repetitions)
        .into_par_iter()
        .map(|rep| {
            run_game(config, kind, rep).map_err(|e| Error::Repetition {
                rep,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&trajectories)?;
    Ok((summary, trajectories))
}
