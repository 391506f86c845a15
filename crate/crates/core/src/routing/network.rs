use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::bpr::BprParams;

/// Directed edge between 1-based node ids.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoadNetwork {
    node_count: usize,
    edges: Vec<Edge>,
    bpr: Vec<BprParams>,
    outgoing: Vec<Vec<usize>>,
}

impl RoadNetwork {
    pub fn new(node_count: usize, edges: Vec<Edge>, bpr: Vec<BprParams>) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::domain("network needs at least one node"));
        }
        if edges.len() != bpr.len() {
            return Err(Error::domain(format!(
                "{} edges but {} BPR parameter sets",
                edges.len(),
                bpr.len()
            )));
        }
        for (idx, e) in edges.iter().enumerate() {
            for node in [e.tail, e.head] {
                if node == 0 || node > node_count {
                    return Err(Error::domain(format!(
                        "edge {idx} references node {node} outside 1..={node_count}"
                    )));
                }
            }
            if e.tail == e.head {
                return Err(Error::domain(format!("edge {idx} is a self-loop at node {}", e.tail)));
            }
        }
        for p in &bpr {
            p.validate()?;
        }
        let mut outgoing = vec![Vec::new(); node_count + 1];
        for (idx, e) in edges.iter().enumerate() {
            outgoing[e.tail].push(idx);
        }
        Ok(RoadNetwork {
            node_count,
            edges,
            bpr,
            outgoing,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn bpr(&self) -> &[BprParams] {
        &self.bpr
    }

    /// Edge indices leaving `node`, in index order.
    pub fn outgoing(&self, node: usize) -> &[usize] {
        &self.outgoing[node]
    }

    /// Same topology, new latency parameters.
    pub fn with_bpr(&self, bpr: Vec<BprParams>) -> Result<Self> {
        RoadNetwork::new(self.node_count, self.edges.clone(), bpr)
    }

    /// Free-flow times `a_e`.
    pub fn free_flow_times(&self) -> Vec<f64> {
        self.bpr.iter().map(|p| p.a).collect()
    }

    /// Whether `destination` can be reached from `origin`.
    pub fn reachable(&self, origin: usize, destination: usize) -> bool {
        let mut seen = vec![false; self.node_count + 1];
        let mut stack = vec![origin];
        seen[origin] = true;
        while let Some(u) = stack.pop() {
            if u == destination {
                return true;
            }
            for &e in &self.outgoing[u] {
                let v = self.edges[e].head;
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        false
    }

    /// Checks that `route` is a simple directed path from `origin` to
    /// `destination`.
    pub fn check_route(&self, route: &[usize], origin: usize, destination: usize) -> Result<()> {
        let bad = |why: &str| Err(Error::domain(format!("route {route:?}: {why}")));
        let Some(&first) = route.first() else {
            return bad("empty route");
        };
        if route.iter().any(|&e| e >= self.edges.len()) {
            return bad("edge index out of range");
        }
        if self.edges[first].tail != origin {
            return bad("does not start at the origin");
        }
        let mut visited = vec![false; self.node_count + 1];
        visited[origin] = true;
        let mut at = origin;
        for &e in route {
            let edge = self.edges[e];
            if edge.tail != at {
                return bad("edges are not consecutive");
            }
            if visited[edge.head] {
                return bad("revisits a node");
            }
            visited[edge.head] = true;
            at = edge.head;
        }
        if at != destination {
            return bad("does not end at the destination");
        }
        Ok(())
    }
}

/// Bidirectional `rows x cols` grid with unit BPR placeholders. Nodes are
/// numbered row-major from 1; edges are listed node by node, right then down
/// then left then up.
pub fn grid_network(rows: usize, cols: usize) -> Result<RoadNetwork> {
    if rows == 0 || cols == 0 {
        return Err(Error::domain("grid needs at least one row and one column"));
    }
    let id = |r: usize, c: usize| r * cols + c + 1;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let u = id(r, c);
            if c + 1 < cols {
                edges.push(Edge { tail: u, head: id(r, c + 1) });
            }
            if r + 1 < rows {
                edges.push(Edge { tail: u, head: id(r + 1, c) });
            }
            if c > 0 {
                edges.push(Edge { tail: u, head: id(r, c - 1) });
            }
            if r > 0 {
                edges.push(Edge { tail: u, head: id(r - 1, c) });
            }
        }
    }
    let unit = BprParams::new(1.0, 1.0, 1.0, 1.0)?;
    let bpr = vec![unit; edges.len()];
    RoadNetwork::new(rows * cols, edges, bpr)
}
