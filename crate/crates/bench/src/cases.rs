use serde::{Deserialize, Serialize};

use potgame_core::dynamics::DelayModel;
use potgame_core::ingest::{sample_scenario, ScenarioConfig};
use potgame_core::potential::{SmoothnessBundle, StepSchedule};
use potgame_core::routing::{grid_network, RoutingGame};

use crate::error::{BenchError, Result};

/// One experiment: a delay model, a step schedule and a horizon.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseSpec {
    pub label: String,
    pub delay: DelayModel,
    pub schedule: StepSchedule,
    pub horizon: u64,
}

impl CaseSpec {
    /// Case with the default schedule for its delay model.
    pub fn new(label: impl Into<String>, delay: DelayModel, bundle: &SmoothnessBundle, horizon: u64) -> Result<Self> {
        delay.validate()?;
        Ok(CaseSpec {
            label: label.into(),
            delay,
            schedule: schedule_for(&delay, bundle)?,
            horizon,
        })
    }

    /// Checks the delay model and, for power schedules, the step condition
    /// `a_k^2 / A_k <= mu_star / L` over the whole horizon.
    pub fn validate(&self, bundle: &SmoothnessBundle) -> Result<()> {
        self.delay.validate()?;
        if matches!(self.schedule, StepSchedule::Power { .. }) && !self.schedule.validate(bundle, self.horizon) {
            return Err(BenchError::Invalid(format!(
                "case {}: schedule {:?} violates a_k^2/A_k <= mu*/L",
                self.label, self.schedule
            )));
        }
        Ok(())
    }
}

/// Default schedule per delay growth.
///
/// - no delay: `Power(1)`, `a0 = mu*/(2L)`;
/// - `alpha < 1`: `Power(0)`, `a0 = mu*/(2L)`;
/// - `alpha = 1`: `Inverse`, `a0 = mu*/L`;
/// - `alpha > 1`: `InverseLog`, `a0 = mu*/L`.
///
/// With stale feedback the growing `Power(1)` steps overshoot and the gap
/// oscillates for long stretches; constant steps give clean `1/k^(1-alpha)`
/// envelopes.
pub fn schedule_for(delay: &DelayModel, bundle: &SmoothnessBundle) -> Result<StepSchedule> {
    let ratio = bundle.mu_star / bundle.lipschitz;
    let schedule = match delay.envelope() {
        Some((_, alpha)) if alpha > 1.0 => StepSchedule::inverse_log(ratio)?,
        Some((_, 1.0)) => StepSchedule::inverse(ratio)?,
        Some(_) => StepSchedule::power(ratio / 2.0, 0.0)?,
        None => StepSchedule::default_power(1.0, bundle)?,
    };
    Ok(schedule)
}

/// The six deterministic-delay cases.
pub fn fig1_suite(bundle: &SmoothnessBundle, horizon: u64) -> Result<Vec<CaseSpec>> {
    let det = |d, alpha| DelayModel::DeterministicPower { d, alpha };
    [
        ("case1", DelayModel::None),
        ("case2", det(10.0, 0.0)),
        ("case3", det(50.0, 0.0)),
        ("case4", det(1.0, 0.3)),
        ("case5", det(1.0, 0.7)),
        ("case6", det(0.1, 1.0)),
    ]
    .into_iter()
    .map(|(label, delay)| CaseSpec::new(label, delay, bundle, horizon))
    .collect()
}

/// The same cases with every deterministic delay replaced by a uniform one
/// of equal mean.
pub fn fig2_suite(bundle: &SmoothnessBundle, horizon: u64) -> Result<Vec<CaseSpec>> {
    fig1_suite(bundle, horizon)?
        .into_iter()
        .map(|c| {
            let delay = c.delay.to_stochastic();
            CaseSpec::new(c.label, delay, bundle, horizon)
        })
        .collect()
}

/// Configuration of the small test scenario: a 5 x 5 bidirectional grid,
/// 10 players with 5 routes each, default parameter ranges, seed 42.
pub fn desk_config() -> ScenarioConfig {
    ScenarioConfig {
        player_count: 10,
        routes_per_player: 5,
        seed: 42,
        ..ScenarioConfig::default()
    }
}

pub fn desk_fixture() -> Result<RoutingGame> {
    Ok(sample_scenario(&grid_network(5, 5)?, &desk_config())?)
}
