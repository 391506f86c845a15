use std::path::Path;

use crate::error::{Error, Result};
use crate::routing::{BprParams, Edge, RoadNetwork};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TntpMetadata {
    pub zone_count: Option<usize>,
    pub node_count: usize,
    pub first_thru_node: Option<usize>,
    pub link_count: usize,
}

/// One row of the link table.
#[derive(Clone, Debug, PartialEq)]
pub struct TntpLink {
    pub init_node: usize,
    pub term_node: usize,
    pub capacity: f64,
    pub length: f64,
    pub free_flow_time: f64,
    pub b: f64,
    pub power: f64,
    pub speed: f64,
    pub toll: f64,
    pub link_type: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TntpNetwork {
    pub metadata: TntpMetadata,
    pub links: Vec<TntpLink>,
}

const LINK_FIELDS: usize = 10;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Parses a `*_net.tntp` file.
///
/// `~` starts a comment anywhere on a line. Metadata lines look like
/// `<KEY> value` and end at `<END OF METADATA>`; unknown keys are ignored.
/// Each link row has ten whitespace-separated fields, optionally followed
/// by `;`.
pub fn parse_tntp(text: &str) -> Result<TntpNetwork> {
    let mut zone_count = None;
    let mut node_count = None;
    let mut first_thru_node = None;
    let mut link_count = None;
    let mut in_metadata = true;
    let mut metadata_end = 0;
    let mut links = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('~').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if in_metadata {
            let Some(rest) = line.strip_prefix('<') else {
                return Err(parse_err(line_no, "link row before <END OF METADATA>"));
            };
            let Some((key, value)) = rest.split_once('>') else {
                return Err(parse_err(line_no, "unterminated metadata key"));
            };
            let value = value.trim();
            let number = || {
                value
                    .parse::<usize>()
                    .map_err(|_| parse_err(line_no, format!("<{key}> expects an integer, got {value:?}")))
            };
            match key.trim().to_ascii_uppercase().as_str() {
                "NUMBER OF ZONES" => zone_count = Some(number()?),
                "NUMBER OF NODES" => node_count = Some(number()?),
                "FIRST THRU NODE" => first_thru_node = Some(number()?),
                "NUMBER OF LINKS" => link_count = Some(number()?),
                "END OF METADATA" => {
                    in_metadata = false;
                    metadata_end = line_no;
                }
                _ => {}
            }
            continue;
        }

        let body = line.strip_suffix(';').unwrap_or(line);
        let fields: Vec<&str> = body.split_whitespace().collect();
        if fields.len() != LINK_FIELDS || fields.iter().any(|f| f.contains(';')) {
            return Err(parse_err(
                line_no,
                format!("expected {LINK_FIELDS} fields, found {}", fields.len()),
            ));
        }
        let node = |i: usize| {
            fields[i]
                .parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("bad node id {:?}", fields[i])))
        };
        let real = |i: usize| {
            fields[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line_no, format!("bad number {:?}", fields[i])))
        };
        let link_type = fields[9]
            .parse::<i64>()
            .map_err(|_| parse_err(line_no, format!("bad link type {:?}", fields[9])))?;
        let link = TntpLink {
            init_node: node(0)?,
            term_node: node(1)?,
            capacity: real(2)?,
            length: real(3)?,
            free_flow_time: real(4)?,
            b: real(5)?,
            power: real(6)?,
            speed: real(7)?,
            toll: real(8)?,
            link_type,
        };
        if let Some(n) = node_count {
            for id in [link.init_node, link.term_node] {
                if id == 0 || id > n {
                    return Err(parse_err(line_no, format!("node {id} outside 1..={n}")));
                }
            }
        }
        links.push(link);
    }

    if in_metadata {
        return Err(parse_err(text.lines().count(), "missing <END OF METADATA>"));
    }
    let node_count = node_count.ok_or_else(|| parse_err(metadata_end, "missing <NUMBER OF NODES>"))?;
    let link_count = link_count.ok_or_else(|| parse_err(metadata_end, "missing <NUMBER OF LINKS>"))?;
    if link_count != links.len() {
        return Err(Error::CountMismatch {
            declared: link_count,
            parsed: links.len(),
        });
    }
    Ok(TntpNetwork {
        metadata: TntpMetadata {
            zone_count,
            node_count,
            first_thru_node,
            link_count,
        },
        links,
    })
}

pub fn read_tntp(path: impl AsRef<Path>) -> Result<TntpNetwork> {
    parse_tntp(&std::fs::read_to_string(path)?)
}

impl TntpNetwork {
    fn edges(&self) -> Vec<Edge> {
        self.links
            .iter()
            .map(|l| Edge {
                tail: l.init_node,
                head: l.term_node,
            })
            .collect()
    }

    /// Topology in file order with unit BPR placeholders, to be overwritten
    /// by scenario sampling.
    pub fn topology(&self) -> Result<RoadNetwork> {
        let unit = BprParams::new(1.0, 1.0, 1.0, 1.0)?;
        RoadNetwork::new(self.metadata.node_count, self.edges(), vec![unit; self.links.len()])
    }

    /// Network with the file's own latency columns: `a` = free-flow time,
    /// `b` = B, `c` = capacity, `r` = power.
    pub fn native_network(&self) -> Result<RoadNetwork> {
        let bpr = self
            .links
            .iter()
            .map(|l| BprParams::new(l.free_flow_time, l.b, l.capacity, l.power))
            .collect::<Result<Vec<_>>>()?;
        RoadNetwork::new(self.metadata.node_count, self.edges(), bpr)
    }
}
