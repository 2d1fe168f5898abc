//! Non-cooperative power control baselines: each behavior class plays its own
//! utility with the satisfaction price removed and no leader.

use crate::config::{BehaviorClass, GameConfig};
use crate::error::Result;
use crate::follower::{BestResponse, FollowerUtility};
use crate::game::{run_game, GameKind, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NpcVariant {
    CasualNpc,
    IntermediateNpc,
    SeriousNpc,
}

impl NpcVariant {
    pub fn for_class(class: BehaviorClass) -> Self {
        match class {
            BehaviorClass::Casual => NpcVariant::CasualNpc,
            BehaviorClass::Intermediate => NpcVariant::IntermediateNpc,
            BehaviorClass::Serious => NpcVariant::SeriousNpc,
        }
    }

    pub fn class(self) -> BehaviorClass {
        match self {
            NpcVariant::CasualNpc => BehaviorClass::Casual,
            NpcVariant::IntermediateNpc => BehaviorClass::Intermediate,
            NpcVariant::SeriousNpc => BehaviorClass::Serious,
        }
    }

    pub fn utility(self, config: &GameConfig, own_gain: f64, interference_plus_noise: f64) -> FollowerUtility {
        FollowerUtility::new(config, self.class(), None, own_gain, interference_plus_noise)
    }
}

pub fn npc_utility(
    variant: NpcVariant,
    p: f64,
    own_gain: f64,
    interference_plus_noise: f64,
    config: &GameConfig,
) -> Result<f64> {
    variant.utility(config, own_gain, interference_plus_noise).value(p)
}

/// With a flat utility (casual) every feasible power is optimal and the
/// lowest one is returned.
pub fn npc_best_response(
    variant: NpcVariant,
    own_gain: f64,
    interference_plus_noise: f64,
    config: &GameConfig,
) -> Result<BestResponse> {
    variant
        .utility(config, own_gain, interference_plus_noise)
        .best_response(config.p_min(), config.p_max(), config.solver_tolerance)
}

/// Baseline repetition `rep`. Each pair plays the variant of its class; the
/// cell, fading and starting powers match [`run_game`] for the same seed.
pub fn run_npc_game(config: &GameConfig, rep: usize) -> Result<Trajectory> {
    run_game(config, GameKind::Npc, rep)
}
