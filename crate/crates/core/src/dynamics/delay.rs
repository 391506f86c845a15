use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How long the gradient queried at iteration `t` takes to reach a player.
///
/// Both non-trivial models are parameterized by the envelope `D t^alpha`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DelayModel {
    None,
    /// Every player waits `ceil(D t^alpha)` iterations.
    DeterministicPower { d: f64, alpha: f64 },
    /// Each player independently waits `U ~ U[0, 2 D t^alpha]` (mean
    /// `D t^alpha`), rounded up to the next iteration.
    StochasticUniform { d: f64, alpha: f64 },
}

impl DelayModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DelayModel::None => Ok(()),
            DelayModel::DeterministicPower { d, alpha }
            | DelayModel::StochasticUniform { d, alpha } => {
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::domain(format!("delay scale D must be positive, got {d}")));
                }
                if !(alpha.is_finite() && alpha >= 0.0) {
                    return Err(Error::domain(format!(
                        "delay exponent alpha must be nonnegative, got {alpha}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `(D, alpha)`, if the model has an envelope.
    pub fn envelope(&self) -> Option<(f64, f64)> {
        match *self {
            DelayModel::None => None,
            DelayModel::DeterministicPower { d, alpha }
            | DelayModel::StochasticUniform { d, alpha } => Some((d, alpha)),
        }
    }

    /// The stochastic model whose mean delay equals this model's
    /// deterministic delay. `None` stays `None`.
    pub fn to_stochastic(&self) -> DelayModel {
        match *self {
            DelayModel::DeterministicPower { d, alpha } => DelayModel::StochasticUniform { d, alpha },
            other => other,
        }
    }

    pub fn is_deterministic(&self) -> bool {
        !matches!(self, DelayModel::StochasticUniform { .. })
    }
}

/// Seeded arrival-time generator.
///
/// Stochastic draws come from a ChaCha stream selected by the player index
/// and positioned by the origin iteration, so `arrival(i, t)` depends only on
/// `(seed, i, t)` and not on the order of calls or the number of players.
#[derive(Clone, Debug)]
pub struct DelaySampler {
    model: DelayModel,
    seed: u64,
}

impl DelaySampler {
    pub fn new(model: DelayModel, seed: u64) -> Result<Self> {
        model.validate()?;
        Ok(DelaySampler { model, seed })
    }

    pub fn model(&self) -> &DelayModel {
        &self.model
    }

    /// Iteration at which the gradient queried at iteration `t` arrives.
    pub fn arrival(&self, player: usize, t: u64) -> u64 {
        match self.model {
            DelayModel::None => t,
            DelayModel::DeterministicPower { d, alpha } => {
                t + (d * (t as f64).powf(alpha)).ceil() as u64
            }
            DelayModel::StochasticUniform { d, alpha } => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(player as u64);
                // one f64 draw consumes two 32-bit words
                rng.set_word_pos(2 * t as u128);
                let u = rng.gen::<f64>() * 2.0 * d * (t as f64).powf(alpha);
                (t as f64 + u).ceil() as u64
            }
        }
    }
}
