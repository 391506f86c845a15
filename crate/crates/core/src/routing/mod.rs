//! Congestion game on a road network.
//!
//! Players route a fixed demand over a finite set of paths between their
//! origin and destination. Edge latencies follow the BPR form
//! `a (1 + b (l/c)^r)` and the game admits the Beckmann potential
//! `sum_e int_0^{l_e} J_e`, whose partial derivatives are the route costs.

mod bpr;
mod game;
mod network;
mod paths;

pub use bpr::{bpr_cost, bpr_integral, BprParams};
pub use game::{PlayerSpec, RoutingGame, DEFAULT_SUPPORT_TOL, SMOOTHNESS_SAMPLES};
pub use network::{grid_network, Edge, RoadNetwork};
pub use paths::{enumerate_routes, RouteSet};
