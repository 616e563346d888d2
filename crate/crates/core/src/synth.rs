//! Synthetic networks for experiments, calibration, and benchmarks.
//!
//! All generators lay nodes out on a small geographic patch near the
//! equator so haversine lengths stay meaningful, and are deterministic
//! (seeded where random).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geo::GeoPoint;
use crate::graph::RoadNetwork;

const STEP_DEG: f64 = 0.001;

fn point(i: usize, j: usize) -> GeoPoint {
    GeoPoint::new(j as f64 * STEP_DEG, i as f64 * STEP_DEG).expect("synthetic coords in range")
}

fn circle_point(i: usize, n: usize) -> GeoPoint {
    let angle = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
    GeoPoint::new(0.01 * angle.cos(), 0.01 * angle.sin()).expect("synthetic coords in range")
}

fn length(a: GeoPoint, b: GeoPoint) -> f64 {
    crate::geo::haversine_km(a, b)
}

fn assemble(points: Vec<GeoPoint>, edges: Vec<(u32, u32)>) -> RoadNetwork {
    let nodes = points
        .iter()
        .enumerate()
        .map(|(i, &p)| (format!("n{i}"), p))
        .collect();
    let weighted = edges
        .into_iter()
        .map(|(a, b)| (a, b, length(points[a as usize], points[b as usize])))
        .collect();
    RoadNetwork::new(nodes, weighted).expect("generators produce valid networks")
}

/// rows x cols lattice with horizontal and vertical street segments.
pub fn grid(rows: usize, cols: usize) -> RoadNetwork {
    let mut points = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            points.push(point(i, j));
        }
    }
    let id = |i: usize, j: usize| (i * cols + j) as u32;
    let mut edges = Vec::new();
    for i in 0..rows {
        for j in 0..cols {
            if j + 1 < cols {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < rows {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    assemble(points, edges)
}

/// Path graph on n nodes along a parallel of latitude.
pub fn path_graph(n: usize) -> RoadNetwork {
    let points: Vec<GeoPoint> = (0..n).map(|j| point(0, j)).collect();
    let edges = (0..n.saturating_sub(1))
        .map(|j| (j as u32, j as u32 + 1))
        .collect();
    assemble(points, edges)
}

/// Cycle on n nodes.
pub fn ring(n: usize) -> RoadNetwork {
    assert!(n >= 3);
    let points: Vec<GeoPoint> = (0..n).map(|i| circle_point(i, n)).collect();
    let edges = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
    assemble(points, edges)
}

/// Star: node 0 is the hub, nodes 1..=leaves are spokes.
pub fn star(leaves: usize) -> RoadNetwork {
    let mut points = vec![GeoPoint::new(0.0, 0.0).expect("origin in range")];
    points.extend((0..leaves).map(|i| circle_point(i, leaves.max(1))));
    let edges = (1..=leaves).map(|i| (0u32, i as u32)).collect();
    assemble(points, edges)
}

/// Triangle on 3 nodes.
pub fn triangle() -> RoadNetwork {
    ring(3)
}

/// Two triangles joined by a single bridge edge (7 edges total).
pub fn barbell() -> RoadNetwork {
    let points = vec![
        point(0, 0),
        point(2, 0),
        point(1, 1),
        point(1, 3),
        point(0, 4),
        point(2, 4),
    ];
    let edges = vec![(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)];
    assemble(points, edges)
}

/// Uniform random recursive tree: node i attaches to a random earlier node.
pub fn random_tree(n: usize, seed: u64) -> RoadNetwork {
    assert!(n >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<GeoPoint> = (0..n).map(|i| circle_point(i, n)).collect();
    let edges = (1..n)
        .map(|i| (rng.random_range(0..i) as u32, i as u32))
        .collect();
    assemble(points, edges)
}

/// Erdos-Renyi G(n, p) with p = mean_degree / (n - 1), retried with derived
/// seeds until connected.
pub fn er_connected(n: usize, mean_degree: f64, seed: u64) -> RoadNetwork {
    assert!(n >= 2);
    let p = mean_degree / (n - 1) as f64;
    for attempt in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt.wrapping_mul(0x9e37)));
        let points: Vec<GeoPoint> = (0..n).map(|i| circle_point(i, n)).collect();
        let mut edges = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.random_range(0.0..1.0) < p {
                    edges.push((a as u32, b as u32));
                }
            }
        }
        let net = assemble(points, edges);
        if net.is_connected() {
            return net;
        }
    }
    panic!(
        "no connected G({n}, {mean_degree}/{}) instance found",
        n - 1
    );
}

/// Uniform random connected multigraph, for oracle-style tests: a random
/// spanning tree plus extra (possibly parallel) edges.
pub fn random_connected_multigraph(n: usize, extra_edges: usize, seed: u64) -> RoadNetwork {
    assert!(n >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<GeoPoint> = (0..n).map(|i| circle_point(i, n)).collect();
    let mut edges: Vec<(u32, u32)> = (1..n)
        .map(|i| (rng.random_range(0..i) as u32, i as u32))
        .collect();
    let mut added = 0;
    while added < extra_edges {
        let a = rng.random_range(0..n) as u32;
        let b = rng.random_range(0..n) as u32;
        if a != b {
            edges.push((a.min(b), a.max(b)));
            added += 1;
        }
    }
    assemble(points, edges)
}

/// Serializes every edge of a network as a two-node path record, one JSON
/// object per line, in the paths-file format. Useful for building CLI
/// fixtures out of synthetic networks.
pub fn to_paths_jsonl(network: &RoadNetwork) -> String {
    let mut out = String::new();
    for (i, edge) in network.edges().iter().enumerate() {
        let a = network.point(edge.a);
        let b = network.point(edge.b);
        out.push_str(&format!(
            "{{\"path_id\":\"p{i}\",\"nodes\":[{{\"id\":\"{}\",\"lon\":{},\"lat\":{}}},{{\"id\":\"{}\",\"lon\":{},\"lat\":{}}}]}}\n",
            network.name(edge.a),
            a.lon,
            a.lat,
            network.name(edge.b),
            b.lon,
            b.lat,
        ));
    }
    out
}
