//! Simplified road networks built from raw map paths.
//!
//! The builder runs in three steps: find the relevant nodes (path endpoints
//! and intersections), wire an edge between every consecutive pair of
//! relevant nodes along each path, then contract away degree-2 nodes. The
//! result is an undirected multigraph whose nodes are intersections and
//! whose edge weights are road lengths in kilometers.

use std::collections::HashMap;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::geo::{haversine_km, GeoPoint, PathRecord};

/// Dense node index, contiguous from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

/// Dense edge index, contiguous from 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// An undirected road segment with its physical length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: NodeId,
    pub b: NodeId,
    pub length_km: f64,
}

impl Edge {
    /// The endpoint that is not `n`.
    pub fn other(&self, n: NodeId) -> NodeId {
        if self.a == n {
            self.b
        } else {
            self.a
        }
    }
}

/// Undirected multigraph of intersections and road segments.
///
/// Parallel edges are kept (they are genuine redundancy under percolation);
/// self-loops are rejected. Original string node ids survive every
/// transformation in `names`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    points: Vec<GeoPoint>,
    names: Vec<String>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<EdgeId>>,
}

impl RoadNetwork {
    /// Builds a network from parts, validating endpoints, lengths, and the
    /// no-self-loop invariant.
    pub fn new(nodes: Vec<(String, GeoPoint)>, edges: Vec<(u32, u32, f64)>) -> Result<Self> {
        let n = nodes.len();
        let mut net = RoadNetwork {
            points: Vec::with_capacity(n),
            names: Vec::with_capacity(n),
            edges: Vec::with_capacity(edges.len()),
            adjacency: vec![Vec::new(); n],
        };
        for (name, point) in nodes {
            net.names.push(name);
            net.points.push(point);
        }
        for (a, b, length_km) in edges {
            net.push_edge(NodeId(a), NodeId(b), length_km)?;
        }
        Ok(net)
    }

    fn push_edge(&mut self, a: NodeId, b: NodeId, length_km: f64) -> Result<()> {
        if a.index() >= self.points.len() || b.index() >= self.points.len() {
            return Err(Error::Validation(format!("edge ({a},{b}) out of range")));
        }
        if a == b {
            return Err(Error::Validation(format!("self-loop at node {a}")));
        }
        if !length_km.is_finite() || length_km < 0.0 {
            return Err(Error::Validation(format!("bad edge length {length_km}")));
        }
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(Edge { a, b, length_km });
        self.adjacency[a.index()].push(id);
        self.adjacency[b.index()].push(id);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.points.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn point(&self, n: NodeId) -> GeoPoint {
        self.points[n.index()]
    }

    pub fn name(&self, n: NodeId) -> &str {
        &self.names[n.index()]
    }

    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn incident(&self, n: NodeId) -> &[EdgeId] {
        &self.adjacency[n.index()]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adjacency[n.index()].len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.points.len() as u32).map(NodeId)
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn total_length_km(&self) -> f64 {
        self.edges.iter().map(|e| e.length_km).sum()
    }

    pub fn is_connected(&self) -> bool {
        if self.node_count() == 0 {
            return false;
        }
        let comps = components(self);
        comps.sizes.len() == 1
    }
}

/// Structural metrics of a road network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkMetrics {
    pub v: usize,
    pub e: usize,
    pub length_km: f64,
    pub avg_degree: f64,
    pub meshness: f64,
    pub organic: f64,
}

/// Step 1: the set of relevant node ids.
///
/// A node is relevant when it begins or ends a path, appears in more than
/// one path, or appears more than once within a single path (the path
/// intersects itself).
pub fn identify_relevant_nodes(paths: &[PathRecord]) -> HashSet<String> {
    let mut relevant: HashSet<String> = HashSet::new();
    let mut seen_in: HashMap<&str, usize> = HashMap::new();
    for (path_idx, path) in paths.iter().enumerate() {
        relevant.insert(path.nodes.first().expect("paths have >=2 nodes").id.clone());
        relevant.insert(path.nodes.last().expect("paths have >=2 nodes").id.clone());
        let mut within: HashSet<&str> = HashSet::new();
        for node in &path.nodes {
            if !within.insert(&node.id) {
                // revisited within the same path
                relevant.insert(node.id.clone());
                continue;
            }
            match seen_in.get(node.id.as_str()) {
                None => {
                    seen_in.insert(&node.id, path_idx);
                }
                Some(&first) if first != path_idx => {
                    relevant.insert(node.id.clone());
                }
                Some(_) => {}
            }
        }
    }
    relevant
}

/// Step 2: one edge per consecutive pair of relevant nodes along each path.
///
/// Intermediate non-relevant nodes are discarded; the edge length is the
/// haversine sum over the full intermediate polyline. Repeated traversals
/// of the same pair yield parallel edges; a pair that closes on itself
/// (path returning to the same relevant node) would be a self-loop and is
/// dropped. Dense ids are assigned in order of first appearance, so the
/// build is deterministic.
pub fn build_edges(paths: &[PathRecord], relevant: &HashSet<String>) -> RoadNetwork {
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut nodes: Vec<(String, GeoPoint)> = Vec::new();
    let mut edges: Vec<(u32, u32, f64)> = Vec::new();

    for path in paths {
        let mut prev_relevant: Option<NodeId> = None;
        let mut prev_point: Option<GeoPoint> = None;
        let mut acc_km = 0.0;
        for node in &path.nodes {
            if let Some(pp) = prev_point {
                acc_km += haversine_km(pp, node.point);
            }
            prev_point = Some(node.point);
            if !relevant.contains(&node.id) {
                continue;
            }
            let dense = *index.entry(node.id.clone()).or_insert_with(|| {
                let id = NodeId(nodes.len() as u32);
                nodes.push((node.id.clone(), node.point));
                id
            });
            if let Some(from) = prev_relevant {
                if from != dense {
                    edges.push((from.0, dense.0, acc_km));
                }
            }
            prev_relevant = Some(dense);
            acc_km = 0.0;
        }
    }

    RoadNetwork::new(nodes, edges).expect("builder produces valid edges")
}

/// Step 3: recursively contract degree-2 nodes.
///
/// A degree-2 node whose two edges lead to two distinct neighbors is
/// replaced by a single edge of summed length (possibly parallel to an
/// existing one). When both edges lead to the same neighbor the contraction
/// would be a self-loop, so the node is kept; this is the endgame of a pure
/// cycle. Nodes are processed in ascending id order and the sweep repeats
/// until a fixed point.
pub fn prune_degree_two(network: &RoadNetwork) -> RoadNetwork {
    #[derive(Clone)]
    struct MutEdge {
        a: usize,
        b: usize,
        length_km: f64,
        alive: bool,
    }

    let n = network.node_count();
    let mut edges: Vec<MutEdge> = network
        .edges
        .iter()
        .map(|e| MutEdge {
            a: e.a.index(),
            b: e.b.index(),
            length_km: e.length_km,
            alive: true,
        })
        .collect();
    let mut adjacency: Vec<Vec<usize>> = network
        .adjacency
        .iter()
        .map(|inc| inc.iter().map(|e| e.index()).collect())
        .collect();
    let mut removed = vec![false; n];

    loop {
        let mut changed = false;
        for v in 0..n {
            if removed[v] || adjacency[v].len() != 2 {
                continue;
            }
            let (e1, e2) = (adjacency[v][0], adjacency[v][1]);
            let other = |e: &MutEdge| if e.a == v { e.b } else { e.a };
            let x = other(&edges[e1]);
            let y = other(&edges[e2]);
            if x == y {
                // contraction would form a self-loop; keep the node
                continue;
            }
            let merged = MutEdge {
                a: x,
                b: y,
                length_km: edges[e1].length_km + edges[e2].length_km,
                alive: true,
            };
            edges[e1].alive = false;
            edges[e2].alive = false;
            let new_id = edges.len();
            edges.push(merged);
            adjacency[x].retain(|&e| e != e1 && e != e2);
            adjacency[y].retain(|&e| e != e1 && e != e2);
            adjacency[x].push(new_id);
            adjacency[y].push(new_id);
            adjacency[v].clear();
            removed[v] = true;
            changed = true;
        }
        if !changed {
            break;
        }
    }

    let mut remap = vec![u32::MAX; n];
    let mut nodes = Vec::new();
    for v in 0..n {
        if !removed[v] {
            remap[v] = nodes.len() as u32;
            nodes.push((network.names[v].clone(), network.points[v]));
        }
    }
    let surviving = edges
        .iter()
        .filter(|e| e.alive)
        .map(|e| (remap[e.a], remap[e.b], e.length_km))
        .collect();
    RoadNetwork::new(nodes, surviving).expect("pruning preserves validity")
}

pub(crate) struct Components {
    /// Component label per node.
    pub labels: Vec<usize>,
    /// Node count per component label.
    pub sizes: Vec<usize>,
}

pub(crate) fn components(network: &RoadNetwork) -> Components {
    let mut uf = UnionFind::new(network.node_count());
    for e in &network.edges {
        uf.union(e.a.index(), e.b.index());
    }
    uf.into_components()
}

/// Extracts the giant connected component as a re-densified network.
///
/// The largest component by node count wins; ties go to the component
/// containing the smallest node id. Surviving nodes keep their relative
/// order (and their original string names).
pub fn extract_gcc(network: &RoadNetwork) -> Result<RoadNetwork> {
    if network.node_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let comps = components(network);
    // Scanning nodes in ascending id order makes "first strictly larger wins"
    // equivalent to the smallest-node-id tie-break.
    let mut best_label = comps.labels[0];
    for v in 1..network.node_count() {
        let label = comps.labels[v];
        if comps.sizes[label] > comps.sizes[best_label] {
            best_label = label;
        }
    }

    let mut remap = vec![u32::MAX; network.node_count()];
    let mut nodes = Vec::new();
    for (v, slot) in remap.iter_mut().enumerate() {
        if comps.labels[v] == best_label {
            *slot = nodes.len() as u32;
            nodes.push((network.names[v].clone(), network.points[v]));
        }
    }
    let edges = network
        .edges
        .iter()
        .filter(|e| comps.labels[e.a.index()] == best_label)
        .map(|e| (remap[e.a.index()], remap[e.b.index()], e.length_km))
        .collect();
    RoadNetwork::new(nodes, edges)
}

/// Computes the metric roster on a (giant-component) network.
///
/// Requires v >= 3 so the meshness denominator `2V - 5` is positive.
/// Degrees count parallel edges.
pub fn compute_metrics(network: &RoadNetwork) -> Result<NetworkMetrics> {
    let v = network.node_count();
    let e = network.edge_count();
    if v < 3 {
        return Err(Error::MeshnessUndefined { v });
    }
    let mut deg1 = 0usize;
    let mut deg3 = 0usize;
    for n in network.node_ids() {
        match network.degree(n) {
            1 => deg1 += 1,
            3 => deg3 += 1,
            _ => {}
        }
    }
    Ok(NetworkMetrics {
        v,
        e,
        length_km: network.total_length_km(),
        avg_degree: 2.0 * e as f64 / v as f64,
        meshness: (e as f64 - v as f64 + 1.0) / (2.0 * v as f64 - 5.0),
        organic: (deg1 + deg3) as f64 / v as f64,
    })
}

/// Union-find over dense node indices, path halving + union by size.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn component_size(&mut self, x: usize) -> usize {
        let root = self.find(x);
        self.size[root]
    }

    /// Labels components 0..k in order of first appearance by node id.
    pub fn into_components(mut self) -> Components {
        let n = self.parent.len();
        let mut label_of_root: HashMap<usize, usize> = HashMap::new();
        let mut labels = vec![0usize; n];
        let mut sizes = Vec::new();
        for (v, slot) in labels.iter_mut().enumerate() {
            let root = self.find(v);
            let next = sizes.len();
            let label = *label_of_root.entry(root).or_insert(next);
            if label == sizes.len() {
                sizes.push(0);
            }
            *slot = label;
            sizes[label] += 1;
        }
        Components { labels, sizes }
    }
}
