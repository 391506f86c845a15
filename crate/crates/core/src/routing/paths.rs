//! k shortest loopless paths (Yen) on free-flow times.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeSet, BinaryHeap};

use log::warn;

use crate::error::{Error, Result};

use super::network::RoadNetwork;

#[derive(Clone, Debug, PartialEq)]
pub struct RouteSet {
    /// Edge-index sequences, cheapest first.
    pub routes: Vec<Vec<usize>>,
    /// Free-flow time of each route.
    pub costs: Vec<f64>,
    /// Fewer simple paths exist than were requested.
    pub truncated: bool,
}

#[derive(Clone, Debug)]
struct Candidate {
    cost: f64,
    edges: Vec<usize>,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.edges.cmp(&other.edges))
    }
}

#[derive(PartialEq)]
struct Dist(f64, usize);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

struct Searcher<'a> {
    net: &'a RoadNetwork,
    weights: Vec<f64>,
    incoming: Vec<Vec<usize>>,
}

impl<'a> Searcher<'a> {
    fn new(net: &'a RoadNetwork) -> Self {
        let mut incoming = vec![Vec::new(); net.node_count() + 1];
        for (idx, e) in net.edges().iter().enumerate() {
            incoming[e.head].push(idx);
        }
        Searcher {
            net,
            weights: net.free_flow_times(),
            incoming,
        }
    }

    fn path_cost(&self, edges: &[usize]) -> f64 {
        edges.iter().map(|&e| self.weights[e]).sum()
    }

    /// Shortest path avoiding the banned nodes and edges; among equally
    /// short paths the lexicographically smallest edge sequence.
    fn shortest(
        &self,
        from: usize,
        to: usize,
        banned_nodes: &[bool],
        banned_edges: &[bool],
    ) -> Option<Vec<usize>> {
        let edges = self.net.edges();
        // distances to `to` on the reversed graph
        let mut dist = vec![f64::INFINITY; self.net.node_count() + 1];
        let mut heap = BinaryHeap::new();
        dist[to] = 0.0;
        heap.push(Reverse(Dist(0.0, to)));
        while let Some(Reverse(Dist(d, v))) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &e in &self.incoming[v] {
                let u = edges[e].tail;
                if banned_edges[e] || banned_nodes[u] {
                    continue;
                }
                let nd = d + self.weights[e];
                if nd < dist[u] {
                    dist[u] = nd;
                    heap.push(Reverse(Dist(nd, u)));
                }
            }
        }
        if !dist[from].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut at = from;
        while at != to {
            let tol = 1e-12 * dist[at].max(1.0);
            let next = self
                .net
                .outgoing(at)
                .iter()
                .copied()
                .filter(|&e| !banned_edges[e] && !banned_nodes[edges[e].head])
                .find(|&e| (self.weights[e] + dist[edges[e].head] - dist[at]).abs() <= tol)?;
            path.push(next);
            at = edges[next].head;
        }
        Some(path)
    }
}

/// The `count` loopless `origin -> destination` paths with the smallest
/// free-flow time, ties broken by lexicographic edge-index order.
pub fn enumerate_routes(
    network: &RoadNetwork,
    origin: usize,
    destination: usize,
    count: usize,
) -> Result<RouteSet> {
    let n = network.node_count();
    for node in [origin, destination] {
        if node == 0 || node > n {
            return Err(Error::domain(format!("node {node} outside 1..={n}")));
        }
    }
    if origin == destination {
        return Err(Error::domain("origin and destination coincide"));
    }
    let search = Searcher::new(network);
    let no_nodes = vec![false; n + 1];
    let no_edges = vec![false; network.edge_count()];
    let first = search
        .shortest(origin, destination, &no_nodes, &no_edges)
        .ok_or(Error::NoPath {
            origin,
            destination,
        })?;

    let mut accepted = vec![Candidate {
        cost: search.path_cost(&first),
        edges: first,
    }];
    let mut pending: BTreeSet<Candidate> = BTreeSet::new();
    while accepted.len() < count {
        let prev = accepted.last().expect("nonempty").edges.clone();
        let mut spur_node = origin;
        for i in 0..prev.len() {
            let root = &prev[..i];
            let mut banned_edges = no_edges.clone();
            for p in &accepted {
                if p.edges.len() > i && p.edges[..i] == *root {
                    banned_edges[p.edges[i]] = true;
                }
            }
            let mut banned_nodes = no_nodes.clone();
            banned_nodes[origin] = i > 0;
            for &e in root {
                banned_nodes[network.edges()[e].head] = true;
            }
            banned_nodes[spur_node] = false;

            if let Some(spur) = search.shortest(spur_node, destination, &banned_nodes, &banned_edges) {
                let mut edges = root.to_vec();
                edges.extend(spur);
                let cand = Candidate {
                    cost: search.path_cost(&edges),
                    edges,
                };
                if !accepted.iter().any(|p| p.edges == cand.edges) {
                    pending.insert(cand);
                }
            }
            spur_node = network.edges()[prev[i]].head;
        }
        match pending.pop_first() {
            Some(best) => accepted.push(best),
            None => break,
        }
    }

    let truncated = accepted.len() < count;
    if truncated {
        warn!(
            "only {} simple paths from {origin} to {destination}, {count} requested",
            accepted.len()
        );
    }
    Ok(RouteSet {
        costs: accepted.iter().map(|c| c.cost).collect(),
        routes: accepted.into_iter().map(|c| c.edges).collect(),
        truncated,
    })
}
