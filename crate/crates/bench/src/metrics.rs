use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use potgame_core::dynamics::{run_simulation_with, IterationView, SimulationConfig, SimulationTrace};
use potgame_core::routing::RoutingGame;

use crate::cases::CaseSpec;
use crate::error::{BenchError, Result};

/// One CSV row.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub k: u64,
    pub phi: f64,
    pub gap: f64,
    pub max_staleness: u64,
    pub a_k: f64,
    #[serde(rename = "A_k")]
    pub big_a_k: f64,
    pub case: String,
    pub seed: u64,
}

pub const CSV_HEADER: [&str; 8] = ["k", "phi", "gap", "max_staleness", "a_k", "A_k", "case", "seed"];

pub fn simulation_config(case: &CaseSpec, seed: u64, phi_star: f64) -> SimulationConfig {
    SimulationConfig::new(case.schedule, case.delay, case.horizon)
        .seed(seed)
        .phi_star(phi_star)
}

pub fn to_records(trace: &SimulationTrace, case: &CaseSpec, seed: u64) -> Vec<MetricsRecord> {
    trace
        .records
        .iter()
        .map(|r| MetricsRecord {
            k: r.k,
            phi: r.phi,
            gap: r.gap,
            max_staleness: r.max_staleness,
            a_k: r.a_k,
            big_a_k: r.big_a_k,
            case: case.label.clone(),
            seed,
        })
        .collect()
}

/// Runs `case` on `game` and returns one record per iteration.
pub fn run_case(game: &RoutingGame, case: &CaseSpec, seed: u64, phi_star: f64) -> Result<Vec<MetricsRecord>> {
    run_case_with(game, case, seed, phi_star, |_| {})
}

pub fn run_case_with<F>(
    game: &RoutingGame,
    case: &CaseSpec,
    seed: u64,
    phi_star: f64,
    observer: F,
) -> Result<Vec<MetricsRecord>>
where
    F: FnMut(&IterationView<'_>),
{
    case.delay.validate()?;
    let trace = run_simulation_with(game, &simulation_config(case, seed, phi_star), observer)?;
    Ok(to_records(&trace, case, seed))
}

/// Serializes records as CSV: header row, comma separators, LF line ends,
/// shortest round-trip floats.
pub fn csv_bytes(records: &[MetricsRecord]) -> std::result::Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

pub fn write_csv(path: impl AsRef<Path>, records: &[MetricsRecord]) -> Result<()> {
    let path = path.as_ref();
    let bytes = csv_bytes(records).map_err(|source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    File::create(path)
        .and_then(|mut f| f.write_all(&bytes))
        .map_err(|e| BenchError::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<MetricsRecord>> {
    let path = path.as_ref();
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    r.deserialize().collect::<std::result::Result<Vec<_>, _>>().map_err(csv_err)
}
