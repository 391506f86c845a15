use log::info;
use serde::{Deserialize, Serialize};

use potgame_core::dynamics::{run_simulation, Algorithm, DelayModel, PotentialGame, Profile, SimulationConfig};
use potgame_core::potential::StepSchedule;
use potgame_core::routing::{RoutingGame, DEFAULT_SUPPORT_TOL};

use crate::error::{BenchError, Result};

/// Estimate of `min Phi` with an error allowance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOptimum {
    pub phi_star: f64,
    pub epsilon_oracle: f64,
    pub budget: u64,
    /// Iteration attaining `phi_star`.
    pub argmin_k: u64,
    /// Wardrop gap at the last iterate.
    pub wardrop_gap: f64,
    /// `sum_i sum_p y_p (J_p - min_q J_q)` at the last iterate.
    pub duality_gap: f64,
    pub total_demand: f64,
    pub schedule: StepSchedule,
    /// Last averaged iterate.
    pub x_star: Profile,
}

/// Runs instantaneous updates with `Power(1)`, `a0 = mu*/(2L)` for `budget`
/// iterations and takes the smallest potential seen.
///
/// For a convex potential and any minimizer `x*`,
/// `Phi(y) - Phi(x*) <= <grad Phi(y), y - x*>`, and the right side is at
/// most the duality gap `sum_i sum_p y_p (J_p(y) - min_q J_q(y))`, which in
/// turn is at most (Wardrop gap) x (total demand) up to mass below the
/// support threshold. `epsilon_oracle` is the larger of the two surrogates
/// at the last iterate, so `phi_star - epsilon_oracle <= min Phi <= phi_star`.
pub fn estimate_reference_optimum(game: &RoutingGame, budget: u64) -> Result<ReferenceOptimum> {
    if budget == 0 {
        return Err(BenchError::Invalid("oracle budget must be positive".into()));
    }
    let schedule = StepSchedule::default_power(1.0, game.smoothness())?;
    let config = SimulationConfig::new(schedule, DelayModel::None, budget).algorithm(Algorithm::Instant);
    let trace = run_simulation(game, &config)?;
    let best = trace
        .records
        .iter()
        .min_by(|a, b| a.phi.total_cmp(&b.phi))
        .expect("budget is positive");
    let x_star = trace.final_y;
    let wardrop_gap = game.wardrop_gap(&x_star, DEFAULT_SUPPORT_TOL)?;
    let duality_gap = game.duality_gap(&x_star)?;
    let total_demand = game.total_demand();
    let epsilon_oracle = (wardrop_gap * total_demand).max(duality_gap).max(0.0);
    info!(
        "oracle: phi* = {} at k = {}, eps = {epsilon_oracle:e} (potential at last iterate {})",
        best.phi,
        best.k,
        game.potential(&x_star)?
    );
    Ok(ReferenceOptimum {
        phi_star: best.phi,
        epsilon_oracle,
        budget,
        argmin_k: best.k,
        wardrop_gap,
        duality_gap,
        total_demand,
        schedule,
        x_star,
    })
}
