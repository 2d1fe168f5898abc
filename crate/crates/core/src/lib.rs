//! Seeded simulator for a behavior-aware Stackelberg power control game.
//!
//! A base station (the leader) tracks its satisfaction `x ∈ (0, 1]` with the
//! cell and charges D2D pairs (the followers) a satisfaction price. Each pair
//! belongs to a casual, intermediate or serious behavior class with its own
//! utility, and picks a transmit power that maximizes it while meeting the
//! class target packet delivery ratio. Pairs interfere with one another on a
//! shared band, over a slowly fading Rayleigh channel.
//!
//! The crate also provides price-free non-cooperative baselines, Monte Carlo
//! aggregation, equilibrium verifiers and CSV output. The guide under `book/`
//! walks through the model; its snippets run as doctests.

// `!(x > 0.0)` is how NaN gets rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod config;
pub mod error;
pub mod experiment;
pub mod fading;
pub mod fit;
pub mod follower;
pub mod game;
pub mod leader;
pub mod link;
pub mod npc;
pub mod output;
pub mod price;
pub mod solve;
pub mod topology;
pub mod units;
pub mod verify;

pub use config::{assign_behavior_classes, load_config, BehaviorClass, GameConfig};
pub use error::{Error, Result};
pub use game::{run_game, GameKind, StageRecord, Trajectory};
pub use units::PowerLevel;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/channel.md")]
    struct Channel;
    #[doc = include_str!("../../../book/src/link.md")]
    struct Link;
    #[doc = include_str!("../../../book/src/game.md")]
    struct Game;
    #[doc = include_str!("../../../book/src/baselines.md")]
    struct Baselines;
    #[doc = include_str!("../../../book/src/experiments.md")]
    struct Experiments;
}
