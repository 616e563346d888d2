//! Acceptance suite: one test per criterion, each printing a PASS line and
//! enforcing its stated tolerance and time budget. The pipeline-level
//! determinism criterion lives in the CLI crate's acceptance suite.
//!
//! Run with `cargo test -p roadnet --test acceptance -- --nocapture`.

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use roadnet::geo::parse_paths_file;
use roadnet::graph::{
    build_edges, compute_metrics, extract_gcc, identify_relevant_nodes, prune_degree_two,
};
use roadnet::percolation::{
    curve_for_removal_order, edge_betweenness, pearson, run_attack, run_error_ensemble,
};
use roadnet::services::{assign_venues, availability_at_threshold, Category};
use roadnet::synth;
use roadnet::{EdgeId, NodeId, VenueRecord};

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn finish(name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "{name} exceeded its {budget:?} budget: {elapsed:?}"
    );
    println!("acceptance {name}: PASS ({elapsed:.2?})");
}

#[test]
fn criterion_01_formula_exactness() {
    let started = Instant::now();
    for seed in 0..20u64 {
        let n = 3 + (seed as usize * 7) % 38;
        let tree = synth::random_tree(n, seed);
        let m = compute_metrics(&tree).unwrap();
        assert_eq!(m.meshness, 0.0, "tree meshness must be exactly zero");
    }
    let triangle = compute_metrics(&synth::triangle()).unwrap();
    assert_eq!(triangle.meshness, 1.0);
    let star = compute_metrics(&synth::star(4)).unwrap();
    assert_eq!(star.organic, 0.8);
    finish("01 formula_exactness", started, Duration::from_secs(1));
}

#[test]
fn criterion_02_builder_fixture() {
    let started = Instant::now();
    let paths = parse_paths_file(common::three_roads_jsonl().as_bytes()).unwrap();
    assert_eq!(paths.len(), 3);
    let distinct: HashSet<&str> = paths
        .iter()
        .flat_map(|p| p.nodes.iter().map(|n| n.id.as_str()))
        .collect();
    assert_eq!(distinct.len(), 9);

    let relevant = identify_relevant_nodes(&paths);
    let expected: HashSet<String> = ["1", "3", "4", "6", "7", "9"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    assert_eq!(relevant, expected);

    let raw = build_edges(&paths, &relevant);
    assert_eq!(raw.node_count(), 6);
    let deg_of = |net: &roadnet::RoadNetwork, name: &str| {
        net.node_ids()
            .find(|&v| net.name(v) == name)
            .map(|v| net.degree(v))
    };
    assert_eq!(deg_of(&raw, "4"), Some(2));

    let pruned = prune_degree_two(&raw);
    assert_eq!(pruned.node_count(), 5);
    assert_eq!(deg_of(&pruned, "4"), None, "the degree-2 node must be gone");
    assert!(deg_of(&pruned, "6").is_some());
    let gcc = extract_gcc(&pruned).unwrap();
    assert_eq!(compute_metrics(&gcc).unwrap().v, 5);
    finish("02 builder_fixture", started, Duration::from_secs(1));
}

#[test]
fn criterion_03_component_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for case in 0..100 {
        let n = rng.random_range(4..40);
        let extra = rng.random_range(0..160);
        let net = synth::random_connected_multigraph(n, extra.min(200 - (n - 1)), case);
        assert!(net.edge_count() <= 200);
        let mut order: Vec<EdgeId> = net.edge_ids().collect();
        order.shuffle(&mut rng);
        let stride = rng.random_range(1..6);
        let (fast, _) = curve_for_removal_order(&net, &order, stride);
        let naive = common::bfs_checkpoint_curve(&net, &order, stride);
        assert_eq!(fast, naive, "case {case} diverged");
        for cp in &fast {
            assert!(cp.gcc_size >= cp.slcc_size);
        }
    }
    finish("03 component_oracle", started, Duration::from_secs(30));
}

#[test]
fn criterion_04_betweenness_oracle() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut checked = 0;
    while checked < 500 {
        let n = rng.random_range(3..=8);
        let extra = rng.random_range(0..=6);
        let net = synth::random_connected_multigraph(n, extra, 9000 + checked);
        let alive_mask: Vec<bool> = vec![true; net.edge_count()];
        let alive: Vec<EdgeId> = net.edge_ids().collect();
        let fast = edge_betweenness(&net, &alive);
        let brute = common::brute_force_edge_betweenness(&net, &alive_mask);
        for (e, (f, b)) in fast.iter().zip(&brute).enumerate() {
            assert!(
                (f - b).abs() < 1e-9,
                "edge {e}: fast {f} vs brute {b} on instance {checked}"
            );
        }
        // sum identity: total betweenness equals the ordered-pair sum of
        // shortest-path hop distances
        let total: f64 = fast.iter().sum();
        let dist_sum = common::ordered_pair_distance_sum(&net, &alive_mask);
        assert!(
            (total - dist_sum).abs() < 1e-9,
            "sum identity failed: {total} vs {dist_sum}"
        );
        checked += 1;
    }
    finish("04 betweenness_oracle", started, Duration::from_secs(60));
}

#[test]
fn criterion_05_grid_threshold() {
    let started = Instant::now();
    let net = synth::grid(50, 50);
    let ens = run_error_ensemble(&net, 42, 50, 0.01).unwrap();
    assert!(
        (0.40..=0.60).contains(&ens.p_c_mean),
        "grid p_c_mean {} outside [0.40, 0.60]",
        ens.p_c_mean
    );
    assert!(ens.p_c_std < 0.05, "grid p_c_std {} too wide", ens.p_c_std);
    finish("05 grid_threshold", started, Duration::from_secs(120));
}

#[test]
fn criterion_06_attack_dominance() {
    let started = Instant::now();
    // betweenness recomputed after every removal (recompute_every = 1)
    let grid = synth::grid(50, 50);
    let attack = run_attack(&grid, 1).unwrap();
    let error = run_error_ensemble(&grid, 42, 50, 0.01).unwrap();
    assert!(
        attack.p_c < error.p_c_mean,
        "grid: attack {} !< error {}",
        attack.p_c,
        error.p_c_mean
    );
    assert!(
        attack.p_c < 0.10,
        "grid attack threshold {} not early",
        attack.p_c
    );

    for seed in 0..10u64 {
        let net = synth::er_connected(200, 4.0, 1000 + seed);
        let attack = run_attack(&net, 1).unwrap();
        let error = run_error_ensemble(&net, 42, 50, 0.01).unwrap();
        assert!(
            attack.p_c < error.p_c_mean,
            "er seed {seed}: attack {} !< error {}",
            attack.p_c,
            error.p_c_mean
        );
    }
    finish("06 attack_dominance", started, Duration::from_secs(600));
}

#[test]
fn criterion_07_attack_fixtures() {
    let started = Instant::now();
    let barbell = run_attack(&synth::barbell(), 1).unwrap();
    assert_eq!(barbell.p_c, 1.0 / 7.0);
    assert_eq!(
        barbell.curve.len(),
        1,
        "bridge cut stops the barbell at once"
    );

    let path = run_attack(&synth::path_graph(5), 1).unwrap();
    assert_eq!(path.p_c, 1.0 / 4.0);
    finish("07 attack_fixtures", started, Duration::from_secs(1));
}

#[test]
fn criterion_08_availability_invariants() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let net = synth::grid(6, 6);
    for case in 0..100 {
        let venues: Vec<VenueRecord> = (0..rng.random_range(1..50))
            .map(|i| {
                let node = NodeId(rng.random_range(0..36u32));
                VenueRecord {
                    venue_id: format!("v{case}_{i}"),
                    category: Category::ALL[rng.random_range(0..10)],
                    point: net.point(node),
                }
            })
            .collect();
        let out = assign_venues(&net, &venues, 2.0).unwrap();
        assert_eq!(out.assignments.len(), venues.len());

        // p = 0 baseline: everything reachable
        let all: HashSet<NodeId> = net.node_ids().collect();
        let baseline = availability_at_threshold(&out.assignments, &all).unwrap();
        assert_eq!(baseline.mean, 1.0);
        assert!(baseline.per_category.values().all(|&f| f == 1.0));

        let small: HashSet<NodeId> = net.node_ids().filter(|_| rng.random_bool(0.4)).collect();
        let large: HashSet<NodeId> = small
            .iter()
            .copied()
            .chain(net.node_ids().filter(|_| rng.random_bool(0.3)))
            .collect();
        let rs = availability_at_threshold(&out.assignments, &small).unwrap();
        let rl = availability_at_threshold(&out.assignments, &large).unwrap();
        for (&cat, &assigned) in &rs.assigned_counts {
            let retained = rs.retained_counts[&cat];
            let lost = out
                .assignments
                .iter()
                .filter(|a| a.category == cat && !small.contains(&a.node))
                .count();
            assert_eq!(retained + lost, assigned, "partition broke for {cat}");
        }
        for (cat, &fs) in &rs.per_category {
            assert!((0.0..=1.0).contains(&fs));
            assert!(rl.per_category[cat] >= fs, "monotonicity broke for {cat}");
        }
    }
    finish(
        "08 availability_invariants",
        started,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_10_pearson() {
    let started = Instant::now();
    let xs = [0.17, 0.23, 0.28, 0.31, 0.35];
    let ys = [0.01, 0.09, 0.02, 0.05, 0.03];
    // direct formula, written independently of the implementation
    let n = xs.len() as f64;
    let mx: f64 = xs.iter().sum::<f64>() / n;
    let my: f64 = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>().sqrt();
    let sy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum::<f64>().sqrt();
    let expected = cov / (sx * sy);
    assert!((pearson(&xs, &ys).unwrap() - expected).abs() < 1e-12);
    assert!((pearson(&xs, &xs).unwrap() - 1.0).abs() < 1e-12);
    let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
    assert!((pearson(&xs, &neg).unwrap() + 1.0).abs() < 1e-12);
    finish("10 pearson", started, Duration::from_secs(1));
}
