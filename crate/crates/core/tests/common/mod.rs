//! Independent oracles shared by the integration and acceptance tests.
//!
//! These deliberately avoid the library's union-find / Brandes machinery:
//! components come from plain BFS and betweenness from explicit
//! shortest-path enumeration, so each pair of routes checks the other.

// each test target uses a different subset of these oracles
#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use roadnet::graph::{EdgeId, RoadNetwork};
use roadnet::percolation::Checkpoint;

/// Component sizes (sorted descending) of the alive subgraph, by BFS.
pub fn bfs_component_sizes(network: &RoadNetwork, alive: &[bool]) -> Vec<usize> {
    let n = network.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in network.edge_ids() {
        if alive[e.index()] {
            let edge = network.edge(e);
            adj[edge.a.index()].push(edge.b.index());
            adj[edge.b.index()].push(edge.a.index());
        }
    }
    let mut seen = vec![false; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut size = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            size += 1;
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Checkpoint curve recomputed naively: forward removals with a full BFS
/// at every checkpoint.
pub fn bfs_checkpoint_curve(
    network: &RoadNetwork,
    order: &[EdgeId],
    stride: usize,
) -> Vec<Checkpoint> {
    let e_total = order.len();
    let mut checkpoints: Vec<usize> = (1..=e_total / stride).map(|k| k * stride).collect();
    if checkpoints.last() != Some(&e_total) {
        checkpoints.push(e_total);
    }
    let mut alive = vec![true; e_total];
    let mut curve = Vec::new();
    let mut removed = 0;
    for &k in &checkpoints {
        while removed < k {
            alive[order[removed].index()] = false;
            removed += 1;
        }
        let sizes = bfs_component_sizes(network, &alive);
        curve.push(Checkpoint {
            p: k as f64 / e_total as f64,
            gcc_size: sizes.first().copied().unwrap_or(0),
            slcc_size: sizes.get(1).copied().unwrap_or(0),
        });
    }
    curve
}

/// Edge betweenness by explicit enumeration of all shortest node paths.
///
/// Ordered-pair convention: for each ordered (s, t) the fraction of
/// shortest paths crossing a node pair is split equally among the parallel
/// alive edges on that pair.
pub fn brute_force_edge_betweenness(network: &RoadNetwork, alive: &[bool]) -> Vec<f64> {
    let n = network.node_count();
    // skeleton: distinct-neighbor adjacency + parallel edge lists per pair
    let mut pair_edges: HashMap<(usize, usize), Vec<EdgeId>> = HashMap::new();
    for e in network.edge_ids() {
        if alive[e.index()] {
            let edge = network.edge(e);
            let key = (
                edge.a.index().min(edge.b.index()),
                edge.a.index().max(edge.b.index()),
            );
            pair_edges.entry(key).or_default().push(e);
        }
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in pair_edges.keys() {
        adj[a].push(b);
        adj[b].push(a);
    }

    let mut scores = vec![0.0; network.edge_count()];
    for s in 0..n {
        // BFS distances from s
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for t in 0..n {
            if t == s || dist[t] == usize::MAX {
                continue;
            }
            // enumerate every shortest s->t node path by DFS
            let mut paths: Vec<Vec<usize>> = Vec::new();
            let mut stack = vec![s];
            enumerate_paths(&adj, &dist, t, &mut stack, &mut paths);
            let sigma = paths.len() as f64;
            let mut hop_counts: HashMap<(usize, usize), usize> = HashMap::new();
            for path in &paths {
                for hop in path.windows(2) {
                    let key = (hop[0].min(hop[1]), hop[0].max(hop[1]));
                    *hop_counts.entry(key).or_default() += 1;
                }
            }
            for (key, count) in hop_counts {
                let parallels = &pair_edges[&key];
                let share = count as f64 / sigma / parallels.len() as f64;
                for &e in parallels {
                    scores[e.index()] += share;
                }
            }
        }
    }
    scores
}

fn enumerate_paths(
    adj: &[Vec<usize>],
    dist: &[usize],
    target: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let v = *stack.last().expect("stack starts at the source");
    if v == target {
        out.push(stack.clone());
        return;
    }
    for &w in &adj[v] {
        if dist[w] == dist[v] + 1 && dist[w] <= dist[target] {
            stack.push(w);
            enumerate_paths(adj, dist, target, stack, out);
            stack.pop();
        }
    }
}

/// All-pairs ordered shortest-path hop distances (skeleton hops), for the
/// betweenness sum identity.
pub fn ordered_pair_distance_sum(network: &RoadNetwork, alive: &[bool]) -> f64 {
    let n = network.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen_pair: HashSet<(usize, usize)> = HashSet::new();
    for e in network.edge_ids() {
        if alive[e.index()] {
            let edge = network.edge(e);
            let key = (
                edge.a.index().min(edge.b.index()),
                edge.a.index().max(edge.b.index()),
            );
            if seen_pair.insert(key) {
                adj[key.0].push(key.1);
                adj[key.1].push(key.0);
            }
        }
    }
    let mut total = 0.0;
    for s in 0..n {
        let mut dist = vec![usize::MAX; n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (t, &d) in dist.iter().enumerate() {
            if t != s && d != usize::MAX {
                total += d as f64;
            }
        }
    }
    total
}

/// Three overlapping roads over nine nodes, as a paths file. Road ends and
/// shared nodes make six nodes relevant; the node named "4" holds degree 2
/// after wiring and is pruned away.
pub fn three_roads_jsonl() -> String {
    let node =
        |id: &str, lon: f64, lat: f64| format!("{{\"id\":\"{id}\",\"lon\":{lon},\"lat\":{lat}}}");
    let r1 = format!(
        "{{\"path_id\":\"r1\",\"nodes\":[{},{},{}]}}",
        node("1", 0.000, 0.0),
        node("2", 0.001, 0.0),
        node("4", 0.002, 0.0),
    );
    let r2 = format!(
        "{{\"path_id\":\"r2\",\"nodes\":[{},{},{},{},{}]}}",
        node("4", 0.002, 0.0),
        node("5", 0.003, 0.0),
        node("6", 0.004, 0.0),
        node("8", 0.005, 0.0),
        node("3", 0.006, 0.0),
    );
    let r3 = format!(
        "{{\"path_id\":\"r3\",\"nodes\":[{},{},{}]}}",
        node("7", 0.004, 0.001),
        node("6", 0.004, 0.0),
        node("9", 0.004, -0.001),
    );
    format!("{r1}\n{r2}\n{r3}\n")
}
