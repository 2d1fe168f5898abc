//! Random single-cell geometry.

use std::f64::consts::PI;
use std::io::Write;

use rand::Rng;

use crate::config::{assign_behavior_classes, BehaviorClass, GameConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// One D2D pair. Only the `tx` end transmits during the game.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct D2dPair {
    pub tx: Point,
    pub rx: Point,
    pub class: BehaviorClass,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellTopology {
    pub bs: Point,
    pub cellular_user: Point,
    pub pairs: Vec<D2dPair>,
    /// `distances[j][i]`: transmitter `j` to receiver `i`, floored at the
    /// configured minimum distance.
    pub distances: Vec<Vec<f64>>,
}

impl CellTopology {
    /// Builds a topology from explicit pair positions.
    pub fn from_pairs(cellular_user: Point, pairs: Vec<D2dPair>, min_distance: f64) -> Self {
        let distances = pairs
            .iter()
            .map(|from| {
                pairs
                    .iter()
                    .map(|to| from.tx.distance(to.rx).max(min_distance))
                    .collect()
            })
            .collect();
        CellTopology {
            bs: Point::ORIGIN,
            cellular_user,
            pairs,
            distances,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn classes(&self) -> Vec<BehaviorClass> {
        self.pairs.iter().map(|p| p.class).collect()
    }

    /// CSV dump with columns `entity,x_m,y_m,class`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "entity,x_m,y_m,class")?;
        writeln!(out, "bs,{},{},", self.bs.x, self.bs.y)?;
        writeln!(out, "cellular_user,{},{},", self.cellular_user.x, self.cellular_user.y)?;
        for (i, pair) in self.pairs.iter().enumerate() {
            writeln!(out, "tx{i},{},{},{}", pair.tx.x, pair.tx.y, pair.class)?;
            writeln!(out, "rx{i},{},{},{}", pair.rx.x, pair.rx.y, pair.class)?;
        }
        Ok(())
    }
}

/// Uniform point in the disc of `radius` around `center`.
pub fn uniform_in_disc<R: Rng + ?Sized>(rng: &mut R, center: Point, radius: f64) -> Point {
    let r = radius * rng.random::<f64>().sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    Point::new(center.x + r * theta.cos(), center.y + r * theta.sin())
}

/// Places the cellular user and every transmitter uniformly in the cell, and
/// each receiver uniformly within `max_pair_distance` of its transmitter,
/// resampling receivers that land outside the cell.
pub fn generate_topology<R: Rng + ?Sized>(config: &GameConfig, rng: &mut R) -> Result<CellTopology> {
    let classes = assign_behavior_classes(config.pairs)?;
    Ok(place(config, classes, rng))
}

/// As [`generate_topology`] but with caller-chosen classes (any pair count).
pub fn generate_topology_with_classes<R: Rng + ?Sized>(
    config: &GameConfig,
    classes: Vec<BehaviorClass>,
    rng: &mut R,
) -> CellTopology {
    place(config, classes, rng)
}

fn place<R: Rng + ?Sized>(config: &GameConfig, classes: Vec<BehaviorClass>, rng: &mut R) -> CellTopology {
    let radius = config.cell_radius;
    let cellular_user = uniform_in_disc(rng, Point::ORIGIN, radius);
    let pairs = classes
        .into_iter()
        .map(|class| {
            let tx = uniform_in_disc(rng, Point::ORIGIN, radius);
            let rx = loop {
                let rx = uniform_in_disc(rng, tx, config.max_pair_distance);
                if rx.norm() <= radius && tx.distance(rx) >= config.min_distance {
                    break rx;
                }
            };
            D2dPair { tx, rx, class }
        })
        .collect();
    CellTopology::from_pairs(cellular_user, pairs, config.min_distance)
}

/// Deterministic amplitude factor `A_PL·(d0/d)^(α/2)`.
pub fn path_loss_gain(distance: f64, config: &GameConfig) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::domain(
            "path_loss_gain",
            format!("distance must be positive, got {distance}"),
        ));
    }
    Ok(config.path_loss_attenuation()
        * (config.reference_distance / distance).powf(config.path_loss_exponent / 2.0))
}
