//! Network files, scenario sampling and scenario documents.

mod json;
mod scenario;
mod tntp;

pub use json::{load_scenario, read_scenario, save_scenario, write_scenario, SCHEMA_VERSION};
pub use scenario::{sample_scenario, Interval, ScenarioConfig, MAX_CONSECUTIVE_REJECTIONS};
pub use tntp::{parse_tntp, read_tntp, TntpLink, TntpMetadata, TntpNetwork};
