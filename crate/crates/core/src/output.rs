//! CSV output of an experiment.
//!
//! Every file is UTF-8, comma separated, with a header row. Floats are
//! written with Rust's shortest round-trip formatting, so re-reading a value
//! gives back the exact `f64` and re-running with the same seed gives the
//! same bytes. Missing values (no leader in a baseline game, a class with no
//! pairs) are empty fields.

use std::fmt::Display;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::BehaviorClass;
use crate::error::{Error, Result};
use crate::experiment::{ClassAccumulator, ExperimentSummary};
use crate::game::{GameKind, Trajectory};
use crate::units::watts_to_dbm;

pub const TRAJECTORY_HEADER: &str = "rep,t,pair,class,x,p_dbm,sinr,pdr,utility,price,outage,p_w";
pub const SUMMARY_HEADER: &str = "game,row,metric,casual,intermediate,serious,overall";
pub const SATISFACTION_HEADER: &str = "t,mean_x";
pub const CLASS_POWER_HEADER: &str = "t,casual_dbm,intermediate_dbm,serious_dbm";
pub const CLASS_PDR_HEADER: &str = "t,casual,intermediate,serious";
pub const PLOT_HEADER: &str = "series,t,value";

pub const ROW_BEFORE: &str = "before BS convergence";
pub const ROW_AFTER: &str = "after BS convergence";
pub const ROW_ALL: &str = "all stages";
pub const ROW_NPC: &str = "NPC game";

/// File names written by [`emit_outputs`], in order.
pub const FILES: [&str; 6] = [
    "trajectory.csv",
    "summary.csv",
    "satisfaction.csv",
    "class_power.csv",
    "class_pdr.csv",
    "plot.csv",
];

fn opt<T: Display>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

struct CsvFile {
    path: PathBuf,
    out: BufWriter<File>,
}

impl CsvFile {
    fn create(path: PathBuf, header: &str) -> Result<Self> {
        let file = File::create(&path).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        })?;
        let mut f = CsvFile {
            path,
            out: BufWriter::new(file),
        };
        f.line(header)?;
        Ok(f)
    }

    fn line(&mut self, s: &str) -> Result<()> {
        writeln!(self.out, "{s}").map_err(|source| Error::Io {
            path: self.path.clone(),
            source,
        })
    }

    fn finish(mut self) -> Result<PathBuf> {
        self.out.flush().map_err(|source| Error::Io {
            path: self.path.clone(),
            source,
        })?;
        Ok(self.path)
    }
}

pub fn write_trajectory_csv(path: &Path, trajectories: &[Trajectory]) -> Result<PathBuf> {
    let mut f = CsvFile::create(path.to_path_buf(), TRAJECTORY_HEADER)?;
    for tr in trajectories {
        for r in &tr.records {
            let x = opt(r.satisfaction);
            for s in &r.followers {
                f.line(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    tr.rep,
                    r.t,
                    s.index,
                    s.class.name(),
                    x,
                    watts_to_dbm(s.power),
                    s.sinr,
                    s.pdr,
                    s.utility,
                    s.price,
                    u8::from(s.outage),
                    s.power,
                ))?;
            }
        }
    }
    f.finish()
}

fn class_row(
    f: &mut CsvFile,
    game: &str,
    row: &str,
    metric: &str,
    per_class: impl Fn(BehaviorClass) -> Option<f64>,
    overall: Option<f64>,
) -> Result<()> {
    let [a, b, c] = BehaviorClass::ALL.map(|k| opt(per_class(k)));
    f.line(&format!("{game},{row},{metric},{a},{b},{c},{}", opt(overall)))
}

fn accumulator_rows(f: &mut CsvFile, game: &str, row: &str, acc: &ClassAccumulator) -> Result<()> {
    class_row(f, game, row, "power_dbm", |k| acc.mean_power_dbm(k), acc.pooled_power_dbm())?;
    class_row(f, game, row, "pdr", |k| acc.mean_pdr(k), acc.pooled_pdr())?;
    class_row(f, game, row, "outage_rate", |k| acc.outage_rate(k), acc.pooled_outage_rate())
}

pub fn write_summary_csv(path: &Path, summary: &ExperimentSummary) -> Result<PathBuf> {
    let mut f = CsvFile::create(path.to_path_buf(), SUMMARY_HEADER)?;
    let game = summary.kind.name();
    match summary.kind {
        GameKind::Ubeas => {
            accumulator_rows(&mut f, game, ROW_BEFORE, &summary.before)?;
            accumulator_rows(&mut f, game, ROW_AFTER, &summary.after)?;
            accumulator_rows(&mut f, game, ROW_ALL, &summary.all)?;
        }
        GameKind::Npc => accumulator_rows(&mut f, game, ROW_NPC, &summary.all)?,
    }
    let row = match summary.kind {
        GameKind::Ubeas => ROW_ALL,
        GameKind::Npc => ROW_NPC,
    };
    class_row(&mut f, game, row, "power_stderr_w", |k| summary.power_stderr_watts(k), None)?;
    class_row(&mut f, game, row, "pdr_stderr", |k| summary.pdr_stderr(k), None)?;
    if summary.kind == GameKind::Ubeas {
        let stages: Vec<f64> = summary.convergence_stages.iter().flatten().map(|&s| s as f64).collect();
        let mean = (!stages.is_empty()).then(|| stages.iter().sum::<f64>() / stages.len() as f64);
        let max = stages.iter().copied().reduce(f64::max);
        f.line(&format!("{game},convergence,converged_fraction,,,,{}", summary.converged_fraction()))?;
        f.line(&format!("{game},convergence,mean_stage,,,,{}", opt(mean)))?;
        f.line(&format!("{game},convergence,max_stage,,,,{}", opt(max)))?;
    }
    f.finish()
}

pub fn write_satisfaction_csv(path: &Path, summary: &ExperimentSummary) -> Result<PathBuf> {
    let mut f = CsvFile::create(path.to_path_buf(), SATISFACTION_HEADER)?;
    for s in &summary.per_stage {
        f.line(&format!("{},{}", s.t, opt(s.mean_satisfaction())))?;
    }
    f.finish()
}

fn per_stage_classes(
    path: &Path,
    header: &str,
    summary: &ExperimentSummary,
    value: impl Fn(&ClassAccumulator, BehaviorClass) -> Option<f64>,
) -> Result<PathBuf> {
    let mut f = CsvFile::create(path.to_path_buf(), header)?;
    for s in &summary.per_stage {
        let [a, b, c] = BehaviorClass::ALL.map(|k| opt(value(&s.classes, k)));
        f.line(&format!("{},{a},{b},{c}", s.t))?;
    }
    f.finish()
}

pub fn write_plot_csv(path: &Path, summary: &ExperimentSummary) -> Result<PathBuf> {
    let mut f = CsvFile::create(path.to_path_buf(), PLOT_HEADER)?;
    for s in &summary.per_stage {
        if let Some(x) = s.mean_satisfaction() {
            f.line(&format!("satisfaction,{},{x}", s.t))?;
        }
    }
    for k in BehaviorClass::ALL {
        for s in &summary.per_stage {
            if let Some(p) = s.classes.mean_power_dbm(k) {
                f.line(&format!("power_dbm_{},{},{p}", k.name(), s.t))?;
            }
        }
    }
    for k in BehaviorClass::ALL {
        for s in &summary.per_stage {
            if let Some(p) = s.classes.mean_pdr(k) {
                f.line(&format!("pdr_{},{},{p}", k.name(), s.t))?;
            }
        }
    }
    f.finish()
}

/// Writes all six output files into `dir`, creating it if needed.
pub fn emit_outputs(summary: &ExperimentSummary, trajectories: &[Trajectory], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let p = |name: &str| dir.join(name);
    Ok(vec![
        write_trajectory_csv(&p(FILES[0]), trajectories)?,
        write_summary_csv(&p(FILES[1]), summary)?,
        write_satisfaction_csv(&p(FILES[2]), summary)?,
        per_stage_classes(&p(FILES[3]), CLASS_POWER_HEADER, summary, |a, k| a.mean_power_dbm(k))?,
        per_stage_classes(&p(FILES[4]), CLASS_PDR_HEADER, summary, |a, k| a.mean_pdr(k))?,
        write_plot_csv(&p(FILES[5]), summary)?,
    ])
}
