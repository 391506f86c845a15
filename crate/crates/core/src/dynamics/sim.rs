use log::debug;

use crate::error::{Error, Result};
use crate::potential::{EntropyRegularizer, StepSchedule, StepWeights};

use super::delay::{DelayModel, DelaySampler};
use super::feedback::{FeedbackMessage, MessageStore};
use super::player::PlayerState;
use super::{PotentialGame, Profile};

/// Which update rule drives the players.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Algorithm {
    /// Instantaneous updates when the delay model is `None`, delayed
    /// updates otherwise.
    #[default]
    Auto,
    Instant,
    Delayed,
}

#[derive(Clone, Debug)]
pub struct SimulationConfig {
    pub schedule: StepSchedule,
    pub delay: DelayModel,
    pub horizon: u64,
    pub seed: u64,
    /// Reference optimum subtracted from the potential in the trace.
    pub phi_star: f64,
    pub algorithm: Algorithm,
    /// Starting action `x_0 = x_1`; the barycenter of every simplex if unset.
    pub initial: Option<Profile>,
}

impl SimulationConfig {
    pub fn new(schedule: StepSchedule, delay: DelayModel, horizon: u64) -> Self {
        SimulationConfig {
            schedule,
            delay,
            horizon,
            seed: 0,
            phi_star: 0.0,
            algorithm: Algorithm::Auto,
            initial: None,
        }
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn phi_star(mut self, phi_star: f64) -> Self {
        self.phi_star = phi_star;
        self
    }

    pub fn algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn initial(mut self, initial: Profile) -> Self {
        self.initial = Some(initial);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRecord {
    pub k: u64,
    /// `Phi(y_k)`.
    pub phi: f64,
    /// `Phi(y_k) - phi_star`.
    pub gap: f64,
    /// `max_i (k - s_i(k))`.
    pub max_staleness: u64,
    pub a_k: f64,
    pub big_a_k: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationTrace {
    pub records: Vec<TraceRecord>,
    /// `x_0`.
    pub initial: Profile,
    /// `y` after the last iteration (`x_0` when the horizon is zero).
    pub final_y: Profile,
}

impl SimulationTrace {
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.gap)
    }
}

/// Snapshot handed to observers after iteration `k`.
pub struct IterationView<'a> {
    pub k: u64,
    pub weights: &'a StepWeights,
    pub states: &'a [PlayerState],
    /// Partial gradients queried at `x_{k+1}`.
    pub gradients: &'a [Vec<f64>],
    pub record: &'a TraceRecord,
}

pub fn run_simulation<G: PotentialGame + ?Sized>(
    game: &G,
    config: &SimulationConfig,
) -> Result<SimulationTrace> {
    run_simulation_with(game, config, |_| {})
}

/// Runs the dynamics for `config.horizon` iterations, calling `observer`
/// after every iteration.
pub fn run_simulation_with<G, F>(
    game: &G,
    config: &SimulationConfig,
    mut observer: F,
) -> Result<SimulationTrace>
where
    G: PotentialGame + ?Sized,
    F: FnMut(&IterationView<'_>),
{
    let n = game.player_count();
    let regs = (0..n)
        .map(|i| EntropyRegularizer::new(game.strategy_space(i)))
        .collect::<Result<Vec<_>>>()?;
    let initial: Profile = match &config.initial {
        Some(x0) => {
            if x0.len() != n {
                return Err(Error::domain("initial profile has the wrong number of players"));
            }
            x0.clone()
        }
        None => regs.iter().map(|r| r.space().uniform_point()).collect(),
    };
    let sampler = DelaySampler::new(config.delay, config.seed)?;
    let delayed = match config.algorithm {
        Algorithm::Auto => config.delay != DelayModel::None,
        Algorithm::Instant => {
            if config.delay != DelayModel::None {
                return Err(Error::domain("instantaneous updates require the `None` delay model"));
            }
            false
        }
        Algorithm::Delayed => true,
    };

    // g_1 is available immediately under every delay model
    let mut gradients = game.pseudogradient(&initial)?;
    let mut states = initial
        .iter()
        .zip(&gradients)
        .zip(&regs)
        .map(|((x0, g1), reg)| PlayerState::new(reg, x0.clone(), g1.clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut store = MessageStore::new(n);
    let mut records = Vec::with_capacity(config.horizon as usize);
    let mut y: Profile = initial.clone();
    let mut x: Profile = initial.clone();

    debug!(
        "simulating {} players for {} iterations ({:?}, {:?})",
        n, config.horizon, config.delay, config.schedule
    );
    for w in config.schedule.cursor().take(config.horizon as usize) {
        let k = w.k;
        for (i, (state, reg)) in states.iter_mut().zip(&regs).enumerate() {
            if delayed {
                state.delayed_step(store.deliver(i, k), reg, &w)?;
            } else {
                state.instant_step(&gradients[i], reg, &w)?;
            }
        }
        for (dst, st) in y.iter_mut().zip(&states) {
            dst.clone_from(&st.y);
        }
        let phi = game.potential(&y)?;
        let record = TraceRecord {
            k,
            phi,
            gap: phi - config.phi_star,
            max_staleness: states.iter().map(|s| k - s.s).max().unwrap_or(0),
            a_k: w.a,
            big_a_k: w.big_a,
        };

        for (dst, st) in x.iter_mut().zip(&states) {
            dst.clone_from(&st.x_next);
        }
        gradients = game.pseudogradient(&x)?;
        if delayed {
            for (i, g) in gradients.iter().enumerate() {
                let arrival = sampler.arrival(i, k + 1);
                // never delivered within the horizon
                if arrival <= config.horizon {
                    store.push(i, FeedbackMessage::new(k + 1, g.clone(), arrival));
                }
            }
        }
        observer(&IterationView {
            k,
            weights: &w,
            states: &states,
            gradients: &gradients,
            record: &record,
        });
        records.push(record);
    }

    Ok(SimulationTrace {
        records,
        initial,
        final_y: y,
    })
}

/// `s + 1 + D (s + 1)^alpha > k`: the freshest feedback held at iteration
/// `k` cannot be older than the delay envelope allows.
pub fn staleness_bound_holds(k: u64, s: u64, model: &DelayModel) -> bool {
    let next = (s + 1) as f64;
    match model.envelope() {
        None => next > k as f64,
        Some((d, alpha)) => next + d * next.powf(alpha) > k as f64,
    }
}

/// Observer that checks [`staleness_bound_holds`] for every player at every
/// iteration, along with monotonicity of the timestamps.
#[derive(Clone, Debug)]
pub struct StalenessMonitor {
    model: DelayModel,
    last: Vec<u64>,
    pub checked: u64,
    pub violations: u64,
}

impl StalenessMonitor {
    pub fn new(model: DelayModel) -> Self {
        StalenessMonitor {
            model,
            last: Vec::new(),
            checked: 0,
            violations: 0,
        }
    }

    pub fn observe(&mut self, view: &IterationView<'_>) {
        if self.last.is_empty() {
            self.last = vec![1; view.states.len()];
        }
        for (st, last) in view.states.iter().zip(self.last.iter_mut()) {
            self.checked += 1;
            let ok = st.s >= *last && st.s <= view.k && staleness_bound_holds(view.k, st.s, &self.model);
            if !ok {
                self.violations += 1;
            }
            *last = st.s;
        }
    }

    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}
