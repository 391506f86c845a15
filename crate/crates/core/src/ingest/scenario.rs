use std::collections::HashSet;

use log::debug;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::routing::{enumerate_routes, BprParams, PlayerSpec, RoadNetwork, RoutingGame};

/// O/D draws allowed to fail in a row before sampling gives up.
pub const MAX_CONSECUTIVE_REJECTIONS: usize = 10_000;

/// Real interval `[lo, hi)`; a degenerate interval always yields `lo`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if self.lo.is_finite() && self.hi.is_finite() && self.lo <= self.hi {
            Ok(())
        } else {
            Err(Error::domain(format!("bad {name} range [{}, {}]", self.lo, self.hi)))
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..self.hi)
        }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub player_count: usize,
    pub routes_per_player: usize,
    pub free_flow: Interval,
    pub coefficient: Interval,
    pub capacity: Interval,
    pub power: Interval,
    pub demand: Interval,
    pub seed: u64,
    /// Keep the network's own BPR parameters instead of drawing new ones.
    pub native_bpr: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            player_count: 200,
            routes_per_player: 20,
            free_flow: Interval::new(2.0, 3.0),
            coefficient: Interval::new(3.0, 13.0),
            capacity: Interval::new(60.0, 80.0),
            power: Interval::new(1.0, 1.5),
            demand: Interval::new(10.0, 20.0),
            seed: 0,
            native_bpr: false,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.player_count == 0 || self.routes_per_player == 0 {
            return Err(Error::domain("player and route counts must be positive"));
        }
        self.free_flow.validate("free-flow time")?;
        self.coefficient.validate("BPR coefficient")?;
        self.capacity.validate("capacity")?;
        self.power.validate("BPR power")?;
        self.demand.validate("demand")?;
        if self.free_flow.lo <= 0.0 || self.coefficient.lo <= 0.0 || self.capacity.lo <= 0.0 {
            return Err(Error::domain("free-flow, coefficient and capacity ranges must be positive"));
        }
        if self.power.lo < 1.0 {
            return Err(Error::domain("BPR power range must lie in [1, inf)"));
        }
        if self.demand.lo <= 0.0 {
            return Err(Error::domain("demand range must be positive"));
        }
        Ok(())
    }
}

/// Draws a routing game on `network`.
///
/// The draws happen in a fixed order from one seeded stream: `(a, b, c, r)`
/// for every edge in index order, then the O/D pairs, then one demand per
/// player. O/D pairs are ordered node pairs, distinct across players, with
/// a directed path between them. Routes are the cheapest simple paths by
/// free-flow time.
pub fn sample_scenario(network: &RoadNetwork, config: &ScenarioConfig) -> Result<RoutingGame> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let network = if config.native_bpr {
        network.clone()
    } else {
        let bpr = (0..network.edge_count())
            .map(|_| {
                let a = config.free_flow.draw(&mut rng);
                let b = config.coefficient.draw(&mut rng);
                let c = config.capacity.draw(&mut rng);
                let r = config.power.draw(&mut rng);
                BprParams::new(a, b, c, r)
            })
            .collect::<Result<Vec<_>>>()?;
        network.with_bpr(bpr)?
    };

    let n = network.node_count();
    let mut used = HashSet::new();
    let mut pairs = Vec::with_capacity(config.player_count);
    let mut rejections = 0;
    while pairs.len() < config.player_count {
        let o = rng.gen_range(1..=n);
        let d = rng.gen_range(1..=n);
        if o == d || used.contains(&(o, d)) || !network.reachable(o, d) {
            rejections += 1;
            if rejections >= MAX_CONSECUTIVE_REJECTIONS {
                return Err(Error::InfeasibleScenario(format!(
                    "found {} of {} O/D pairs before {MAX_CONSECUTIVE_REJECTIONS} consecutive rejections",
                    pairs.len(),
                    config.player_count
                )));
            }
            continue;
        }
        rejections = 0;
        used.insert((o, d));
        pairs.push((o, d));
    }

    let mut players = Vec::with_capacity(pairs.len());
    for &(origin, destination) in &pairs {
        let routes = enumerate_routes(&network, origin, destination, config.routes_per_player)?.routes;
        players.push(PlayerSpec {
            origin,
            destination,
            demand: 0.0,
            routes,
        });
    }
    for p in &mut players {
        p.demand = config.demand.draw(&mut rng);
    }
    debug!(
        "sampled {} players on {} nodes / {} edges (seed {})",
        players.len(),
        n,
        network.edge_count(),
        config.seed
    );
    RoutingGame::new(network, players, config.seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::routing::{grid_network, Edge};

    fn small(seed: u64) -> ScenarioConfig {
        ScenarioConfig {
            player_count: 6,
            routes_per_player: 3,
            seed,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn draws_respect_ranges() {
        let cfg = small(5);
        let g = sample_scenario(&grid_network(3, 3).unwrap(), &cfg).unwrap();
        for p in g.network().bpr() {
            assert!(cfg.free_flow.contains(p.a));
            assert!(cfg.coefficient.contains(p.b));
            assert!(cfg.capacity.contains(p.c));
            assert!(cfg.power.contains(p.r));
        }
        let mut seen = HashSet::new();
        for p in g.players() {
            assert!(cfg.demand.contains(p.demand));
            assert!(seen.insert((p.origin, p.destination)));
            assert_eq!(p.routes.len(), 3);
        }
    }

    #[test]
    fn seeds_matter() {
        let net = grid_network(3, 3).unwrap();
        let a = sample_scenario(&net, &small(1)).unwrap();
        let b = sample_scenario(&net, &small(2)).unwrap();
        let again = sample_scenario(&net, &small(1)).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, again);
    }

    #[test]
    fn infeasible_when_pairs_run_out() {
        // only one ordered pair has a path
        let net = RoadNetwork::new(
            2,
            vec![Edge { tail: 1, head: 2 }],
            vec![BprParams::new(1.0, 1.0, 1.0, 1.0).unwrap()],
        )
        .unwrap();
        let cfg = ScenarioConfig {
            player_count: 2,
            ..small(0)
        };
        assert!(matches!(sample_scenario(&net, &cfg), Err(Error::InfeasibleScenario(_))));
    }

    #[test]
    fn native_keeps_parameters() {
        let net = grid_network(2, 2).unwrap();
        let cfg = ScenarioConfig {
            native_bpr: true,
            player_count: 2,
            ..small(3)
        };
        let g = sample_scenario(&net, &cfg).unwrap();
        assert_eq!(g.network().bpr(), net.bpr());
    }
}
