use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{PotentialGame, Profile};
use crate::error::{Error, Result};
use crate::potential::{ScaledSimplex, SmoothnessBundle};

use super::network::RoadNetwork;

/// Routes carrying less than this fraction of a player's demand are ignored
/// by the Wardrop gap.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-6;

/// Number of random profile pairs used to estimate the gradient Lipschitz
/// constant.
pub const SMOOTHNESS_SAMPLES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerSpec {
    pub origin: usize,
    pub destination: usize,
    pub demand: f64,
    /// Edge-index sequences.
    pub routes: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoutingGame {
    network: RoadNetwork,
    players: Vec<PlayerSpec>,
    spaces: Vec<ScaledSimplex>,
    smoothness: SmoothnessBundle,
    smoothness_seed: u64,
}

impl RoutingGame {
    /// Builds the game and estimates its smoothness constants from
    /// `smoothness_seed`.
    pub fn new(network: RoadNetwork, players: Vec<PlayerSpec>, smoothness_seed: u64) -> Result<Self> {
        let spaces = Self::validate(&network, &players)?;
        let mut game = RoutingGame {
            network,
            players,
            spaces,
            smoothness: SmoothnessBundle::new(1.0, 1.0, 1.0)?,
            smoothness_seed,
        };
        game.smoothness = game.estimate_smoothness(SMOOTHNESS_SAMPLES, smoothness_seed)?;
        Ok(game)
    }

    /// Builds the game with previously computed smoothness constants.
    pub fn with_smoothness(
        network: RoadNetwork,
        players: Vec<PlayerSpec>,
        smoothness: SmoothnessBundle,
        smoothness_seed: u64,
    ) -> Result<Self> {
        let spaces = Self::validate(&network, &players)?;
        Ok(RoutingGame {
            network,
            players,
            spaces,
            smoothness,
            smoothness_seed,
        })
    }

    fn validate(network: &RoadNetwork, players: &[PlayerSpec]) -> Result<Vec<ScaledSimplex>> {
        if players.is_empty() {
            return Err(Error::domain("routing game needs at least one player"));
        }
        players
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if p.routes.is_empty() {
                    return Err(Error::domain(format!("player {i} has no routes")));
                }
                for (r, route) in p.routes.iter().enumerate() {
                    network.check_route(route, p.origin, p.destination)?;
                    if p.routes[..r].contains(route) {
                        return Err(Error::domain(format!("player {i} lists route {r} twice")));
                    }
                }
                ScaledSimplex::new(p.routes.len(), p.demand)
            })
            .collect()
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.network
    }

    pub fn players(&self) -> &[PlayerSpec] {
        &self.players
    }

    pub fn smoothness(&self) -> &SmoothnessBundle {
        &self.smoothness
    }

    pub fn smoothness_seed(&self) -> u64 {
        self.smoothness_seed
    }

    pub fn total_demand(&self) -> f64 {
        self.players.iter().map(|p| p.demand).sum()
    }

    pub fn check_profile(&self, profile: &[Vec<f64>]) -> Result<()> {
        if profile.len() != self.players.len() {
            return Err(Error::domain(format!(
                "profile has {} players, game has {}",
                profile.len(),
                self.players.len()
            )));
        }
        for (x, space) in profile.iter().zip(&self.spaces) {
            space.check(x)?;
        }
        Ok(())
    }

    /// Edge loads of a feasible profile.
    pub fn edge_loads(&self, profile: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_profile(profile)?;
        Ok(self.edge_loads_unchecked(profile))
    }

    /// Edge loads of any nonnegative route-flow vector, feasible or not.
    pub fn edge_loads_unchecked(&self, profile: &[Vec<f64>]) -> Vec<f64> {
        let mut loads = vec![0.0; self.network.edge_count()];
        for (player, x) in self.players.iter().zip(profile) {
            for (route, &mass) in player.routes.iter().zip(x) {
                for &e in route {
                    loads[e] += mass;
                }
            }
        }
        loads
    }

    pub fn potential_of_loads(&self, loads: &[f64]) -> f64 {
        self.network
            .bpr()
            .iter()
            .zip(loads)
            .map(|(p, &l)| p.integral(l))
            .sum()
    }

    pub fn edge_costs(&self, loads: &[f64]) -> Vec<f64> {
        self.network
            .bpr()
            .iter()
            .zip(loads)
            .map(|(p, &l)| p.cost(l))
            .collect()
    }

    /// Route costs of `player` given per-edge costs.
    pub fn route_costs(&self, player: usize, edge_costs: &[f64]) -> Vec<f64> {
        self.players[player]
            .routes
            .iter()
            .map(|route| route.iter().map(|&e| edge_costs[e]).sum())
            .collect()
    }

    /// Largest cost excess of a used route over the cheapest route, over all
    /// players. A route counts as used when it carries more than
    /// `support_tol` times the player's demand.
    pub fn wardrop_gap(&self, profile: &[Vec<f64>], support_tol: f64) -> Result<f64> {
        let costs = self.edge_costs(&self.edge_loads(profile)?);
        let mut gap: f64 = 0.0;
        for (i, (player, x)) in self.players.iter().zip(profile).enumerate() {
            let rc = self.route_costs(i, &costs);
            let best = rc.iter().copied().fold(f64::INFINITY, f64::min);
            for (&c, &mass) in rc.iter().zip(x) {
                if mass > support_tol * player.demand {
                    gap = gap.max(c - best);
                }
            }
        }
        Ok(gap)
    }

    /// `sum_i sum_p x_p (J_p(x) - min_q J_q(x))`, which by convexity of the
    /// potential bounds `Phi(x) - min Phi` from above.
    pub fn duality_gap(&self, profile: &[Vec<f64>]) -> Result<f64> {
        let costs = self.edge_costs(&self.edge_loads(profile)?);
        let mut total = 0.0;
        for (i, x) in profile.iter().enumerate() {
            let rc = self.route_costs(i, &costs);
            let best = rc.iter().copied().fold(f64::INFINITY, f64::min);
            total += rc.iter().zip(x).map(|(c, m)| m * (c - best)).sum::<f64>();
        }
        Ok(total)
    }

    /// Upper bound on the l1-to-l-infinity Lipschitz constant of the
    /// potential gradient: every edge at the largest load it can carry.
    pub fn analytic_lipschitz(&self) -> f64 {
        let mut max_load = vec![0.0; self.network.edge_count()];
        for p in &self.players {
            let mut used = vec![false; self.network.edge_count()];
            for &e in p.routes.iter().flatten() {
                used[e] = true;
            }
            for (l, u) in max_load.iter_mut().zip(used) {
                if u {
                    *l += p.demand;
                }
            }
        }
        let slopes: Vec<f64> = self
            .network
            .bpr()
            .iter()
            .zip(&max_load)
            .map(|(p, &l)| p.derivative(l))
            .collect();
        self.players
            .iter()
            .flat_map(|p| p.routes.iter())
            .map(|route| route.iter().map(|&e| slopes[e]).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Smoothness constants.
    ///
    /// The Lipschitz constant is the smaller of [`Self::analytic_lipschitz`]
    /// and twice the largest sampled ratio
    /// `|grad(x) - grad(x')|_inf / |x - x'|_1`. Half of the pairs are
    /// independent uniform profiles; the other half move mass between two
    /// routes of a single player, which probes the steepest directions.
    pub fn estimate_smoothness(&self, samples: usize, seed: u64) -> Result<SmoothnessBundle> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut ratio: f64 = 0.0;
        for s in 0..samples {
            let x: Profile = self.spaces.iter().map(|sp| sp.sample(&mut rng)).collect();
            let xp: Profile = if s % 2 == 0 {
                self.spaces.iter().map(|sp| sp.sample(&mut rng)).collect()
            } else {
                let mut xp = x.clone();
                let i = rng.gen_range(0..self.players.len());
                let n = xp[i].len();
                if n > 1 {
                    let p = rng.gen_range(0..n);
                    let q = (p + rng.gen_range(1..n)) % n;
                    let shift = xp[i][q] * rng.gen::<f64>();
                    xp[i][q] -= shift;
                    xp[i][p] += shift;
                }
                xp
            };
            let dist: f64 = x
                .iter()
                .flatten()
                .zip(xp.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .sum();
            if dist <= 0.0 {
                continue;
            }
            let g = self.pseudogradient_unchecked(&x);
            let gp = self.pseudogradient_unchecked(&xp);
            let diff = g
                .iter()
                .flatten()
                .zip(gp.iter().flatten())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            ratio = ratio.max(diff / dist);
        }
        let analytic = self.analytic_lipschitz();
        let lipschitz = if ratio > 0.0 {
            (2.0 * ratio).min(analytic)
        } else {
            analytic
        };
        let mu_star = self
            .spaces
            .iter()
            .map(|s| 1.0 / (s.scale() * s.scale()))
            .fold(f64::INFINITY, f64::min);
        let max_demand = self.spaces.iter().map(|s| s.scale()).fold(0.0, f64::max);
        SmoothnessBundle::new(lipschitz, mu_star, 2.0 * max_demand)
    }

    fn pseudogradient_unchecked(&self, profile: &[Vec<f64>]) -> Profile {
        let costs = self.edge_costs(&self.edge_loads_unchecked(profile));
        (0..self.players.len())
            .map(|i| self.route_costs(i, &costs))
            .collect()
    }
}

impl PotentialGame for RoutingGame {
    fn player_count(&self) -> usize {
        self.players.len()
    }

    fn strategy_space(&self, player: usize) -> ScaledSimplex {
        self.spaces[player]
    }

    /// Beckmann potential `sum_e int_0^{l_e(x)} J_e`.
    fn potential(&self, profile: &[Vec<f64>]) -> Result<f64> {
        Ok(self.potential_of_loads(&self.edge_loads(profile)?))
    }

    /// Route costs of `player`: `sum_{e in p} J_e(l_e(x))`.
    fn partial_gradient(&self, profile: &[Vec<f64>], player: usize) -> Result<Vec<f64>> {
        let costs = self.edge_costs(&self.edge_loads(profile)?);
        Ok(self.route_costs(player, &costs))
    }

    fn pseudogradient(&self, profile: &[Vec<f64>]) -> Result<Profile> {
        self.check_profile(profile)?;
        Ok(self.pseudogradient_unchecked(profile))
    }
}
