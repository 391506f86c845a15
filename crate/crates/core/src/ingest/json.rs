use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::SmoothnessBundle;
use crate::routing::{BprParams, Edge, PlayerSpec, RoadNetwork, RoutingGame};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeDoc {
    tail: usize,
    head: usize,
    a: f64,
    b: f64,
    c: f64,
    r: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SmoothnessDoc {
    lipschitz: f64,
    mu_star: f64,
    diameter: f64,
    seed: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    schema_version: u32,
    node_count: usize,
    edges: Vec<EdgeDoc>,
    players: Vec<PlayerSpec>,
    smoothness: SmoothnessDoc,
}

#[derive(Deserialize)]
struct VersionProbe {
    schema_version: Option<u32>,
}

/// Serializes a game as pretty-printed JSON. Floats are written as the
/// shortest decimal that reads back to the same value.
pub fn save_scenario(game: &RoutingGame) -> String {
    let net = game.network();
    let s = game.smoothness();
    let doc = ScenarioDoc {
        schema_version: SCHEMA_VERSION,
        node_count: net.node_count(),
        edges: net
            .edges()
            .iter()
            .zip(net.bpr())
            .map(|(e, p)| EdgeDoc {
                tail: e.tail,
                head: e.head,
                a: p.a,
                b: p.b,
                c: p.c,
                r: p.r,
            })
            .collect(),
        players: game.players().to_vec(),
        smoothness: SmoothnessDoc {
            lipschitz: s.lipschitz,
            mu_star: s.mu_star,
            diameter: s.diameter,
            seed: game.smoothness_seed(),
        },
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("scenario documents always serialize");
    out.push('\n');
    out
}

pub fn load_scenario(text: &str) -> Result<RoutingGame> {
    let probe: VersionProbe =
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("not a scenario document: {e}")))?;
    match probe.schema_version {
        Some(SCHEMA_VERSION) => {}
        Some(v) => {
            return Err(Error::Schema(format!(
                "schema version {v} is not supported (expected {SCHEMA_VERSION})"
            )))
        }
        None => return Err(Error::Schema("missing field `schema_version`".into())),
    }
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let (edges, bpr): (Vec<Edge>, Vec<BprParams>) = doc
        .edges
        .iter()
        .map(|e| {
            (
                Edge {
                    tail: e.tail,
                    head: e.head,
                },
                BprParams {
                    a: e.a,
                    b: e.b,
                    c: e.c,
                    r: e.r,
                },
            )
        })
        .unzip();
    let network = RoadNetwork::new(doc.node_count, edges, bpr)?;
    let s = doc.smoothness;
    let bundle = SmoothnessBundle::new(s.lipschitz, s.mu_star, s.diameter)?;
    RoutingGame::with_smoothness(network, doc.players, bundle, s.seed)
}

pub fn write_scenario(game: &RoutingGame, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, save_scenario(game))?;
    Ok(())
}

pub fn read_scenario(path: impl AsRef<Path>) -> Result<RoutingGame> {
    load_scenario(&std::fs::read_to_string(path)?)
}
