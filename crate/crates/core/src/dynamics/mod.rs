//! Equilibrium-seeking dynamics.
//!
//! Each player keeps three coupled sequences: the action `x`, the averaged
//! iterate `y` and the dual accumulator `z`. With instantaneous feedback a
//! player steps on the exact partial gradient at the current joint action;
//! with delayed feedback it steps on the freshest gradient it has received,
//! discarding anything older.

mod delay;
mod feedback;
mod player;
mod sim;

pub use delay::{DelayModel, DelaySampler};
pub use feedback::{FeedbackMessage, MessageStore};
pub use player::PlayerState;
pub use sim::{
    run_simulation, run_simulation_with, staleness_bound_holds, Algorithm, IterationView,
    SimulationConfig, SimulationTrace, StalenessMonitor, TraceRecord,
};

use crate::error::Result;
use crate::potential::ScaledSimplex;

/// A joint action: one point per player.
pub type Profile = Vec<Vec<f64>>;

/// First-order access to a game with a potential.
///
/// `partial_gradient(x, i)` is the gradient of player `i`'s cost in its own
/// action, which for a potential game equals the block of `grad Phi(x)`
/// belonging to player `i`.
pub trait PotentialGame: Sync {
    fn player_count(&self) -> usize;

    fn strategy_space(&self, player: usize) -> ScaledSimplex;

    fn potential(&self, profile: &[Vec<f64>]) -> Result<f64>;

    fn partial_gradient(&self, profile: &[Vec<f64>], player: usize) -> Result<Vec<f64>>;

    /// All partial gradients at once.
    fn pseudogradient(&self, profile: &[Vec<f64>]) -> Result<Profile> {
        (0..self.player_count())
            .map(|i| self.partial_gradient(profile, i))
            .collect()
    }
}
