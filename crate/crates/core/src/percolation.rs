//! Bond percolation under random failure and betweenness-targeted attack.
//!
//! Both schemes progressively remove edges from a connected network and
//! track the giant (GCC) and second-largest (SLCC) component sizes. A run
//! stops once the GCC and SLCC are the same size (or every edge is gone);
//! the percolation threshold `p_c` is the removed fraction at which the
//! SLCC peaks.
//!
//! The error scheme removes a seeded uniform random permutation of edges
//! and checkpoints component sizes each time a fixed fraction of edges has
//! been deleted. Checkpoint curves are computed by adding edges in reverse
//! removal order under a union-find, which is exactly equivalent to forward
//! recomputation. The attack scheme removes the alive edge of highest
//! betweenness and checks sizes after every removal.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, NodeId, RoadNetwork, UnionFind};

/// Component sizes observed after removing a fraction `p` of edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    /// Fraction of the original edges removed so far.
    pub p: f64,
    /// Node count of the largest component.
    pub gcc_size: usize,
    /// Node count of the second-largest component, 0 if none.
    pub slcc_size: usize,
}

/// One percolation run: its checkpoint curve, detected threshold, and the
/// removal order that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct PercolationRun {
    pub curve: Vec<Checkpoint>,
    pub p_c: f64,
    /// RNG seed (error scheme only; the attack is deterministic).
    pub seed: Option<u64>,
    /// Edges in removal order, up to the stopping point.
    pub removed_order: Vec<EdgeId>,
    /// Removal count at each checkpoint of `curve`.
    pub checkpoint_removals: Vec<usize>,
}

impl PercolationRun {
    /// Removal count at the checkpoint where the threshold was detected.
    pub fn removals_at_threshold(&self) -> usize {
        let idx = threshold_index(&self.curve);
        self.checkpoint_removals[idx]
    }
}

/// Aggregate of repeated error runs with per-run threshold statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct PercolationEnsemble {
    pub runs: Vec<PercolationRun>,
    pub p_c_mean: f64,
    /// Population standard deviation over run thresholds.
    pub p_c_std: f64,
    /// Per-checkpoint average sizes, truncated to the shortest run curve.
    pub mean_curve: Vec<MeanCheckpoint>,
}

/// One point of an ensemble-averaged curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCheckpoint {
    pub p: f64,
    pub gcc_mean: f64,
    pub slcc_mean: f64,
}

/// Multiset of component node counts for the subgraph on `alive_edges`,
/// sorted descending. Sizes always sum to the node count.
pub fn component_sizes(network: &RoadNetwork, alive_edges: &[EdgeId]) -> Vec<usize> {
    let mut uf = UnionFind::new(network.node_count());
    for &e in alive_edges {
        let edge = network.edge(e);
        uf.union(edge.a.index(), edge.b.index());
    }
    let mut sizes = uf.into_components().sizes;
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn top_two(sizes_desc: &[usize]) -> (usize, usize) {
    let gcc = sizes_desc.first().copied().unwrap_or(0);
    let slcc = sizes_desc.get(1).copied().unwrap_or(0);
    (gcc, slcc)
}

/// Threshold index into a checkpoint curve: maximal SLCC, earliest on ties.
fn threshold_index(curve: &[Checkpoint]) -> usize {
    assert!(!curve.is_empty(), "threshold needs a non-empty curve");
    let mut best = 0;
    for (i, cp) in curve.iter().enumerate() {
        if cp.slcc_size > curve[best].slcc_size {
            best = i;
        }
    }
    best
}

/// The removed fraction at which the SLCC is maximal (earliest p on ties).
pub fn detect_threshold(curve: &[Checkpoint]) -> f64 {
    curve[threshold_index(curve)].p
}

/// Checkpoint curve for an arbitrary removal order.
///
/// Component sizes are recorded after every `stride` removals and after the
/// final removal. Implemented by union-find over reverse removal order; the
/// state after k removals is the subgraph of edges the order has not yet
/// reached.
pub fn curve_for_removal_order(
    network: &RoadNetwork,
    order: &[EdgeId],
    stride: usize,
) -> (Vec<Checkpoint>, Vec<usize>) {
    assert!(stride >= 1);
    assert_eq!(
        order.len(),
        network.edge_count(),
        "order must cover all edges"
    );
    let e_total = order.len();
    let mut checkpoints: Vec<usize> = (1..=e_total / stride).map(|k| k * stride).collect();
    if checkpoints.last() != Some(&e_total) {
        checkpoints.push(e_total);
    }

    let mut uf = UnionFind::new(network.node_count());
    // sizes_at[i] holds (gcc, slcc) for checkpoints[i], filled back to front
    let mut sizes_at = vec![(0usize, 0usize); checkpoints.len()];
    let mut next = checkpoints.len();
    // state after k removals = edges order[k..] alive; walk k from e_total down
    for k in (0..=e_total).rev() {
        if next > 0 && checkpoints[next - 1] == k {
            let mut top = [0usize; 2];
            for v in 0..network.node_count() {
                if uf.find(v) == v {
                    let s = uf.component_size(v);
                    if s > top[0] {
                        top[1] = top[0];
                        top[0] = s;
                    } else if s > top[1] {
                        top[1] = s;
                    }
                }
            }
            sizes_at[next - 1] = (top[0], top[1]);
            next -= 1;
        }
        if k > 0 {
            let edge = network.edge(order[k - 1]);
            uf.union(edge.a.index(), edge.b.index());
        }
    }

    let curve = checkpoints
        .iter()
        .zip(&sizes_at)
        .map(|(&k, &(gcc, slcc))| Checkpoint {
            p: k as f64 / e_total as f64,
            gcc_size: gcc,
            slcc_size: slcc,
        })
        .collect();
    (curve, checkpoints)
}

fn validate_connected(network: &RoadNetwork) -> Result<()> {
    if network.node_count() == 0 {
        return Err(Error::EmptyNetwork);
    }
    if network.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    if !network.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

fn checkpoint_stride(edge_count: usize, checkpoint_fraction: f64) -> usize {
    (checkpoint_fraction * edge_count as f64).ceil().max(1.0) as usize
}

/// Random-failure (error) percolation run.
///
/// Edges are removed in a uniformly random permutation drawn from `seed`;
/// sizes are checkpointed every `ceil(checkpoint_fraction * E)` removals.
/// The curve is truncated at the first checkpoint where GCC and SLCC sizes
/// are equal.
pub fn run_error(
    network: &RoadNetwork,
    seed: u64,
    checkpoint_fraction: f64,
) -> Result<PercolationRun> {
    validate_connected(network)?;
    if !(checkpoint_fraction > 0.0 && checkpoint_fraction <= 0.5) {
        return Err(Error::Validation(format!(
            "checkpoint_fraction {checkpoint_fraction} outside (0, 0.5]"
        )));
    }
    let stride = checkpoint_stride(network.edge_count(), checkpoint_fraction);
    let mut order: Vec<EdgeId> = network.edge_ids().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let (full_curve, full_removals) = curve_for_removal_order(network, &order, stride);
    let stop = full_curve
        .iter()
        .position(|cp| cp.gcc_size == cp.slcc_size)
        .map(|i| i + 1)
        .unwrap_or(full_curve.len());
    let curve: Vec<Checkpoint> = full_curve[..stop].to_vec();
    let checkpoint_removals: Vec<usize> = full_removals[..stop].to_vec();
    let p_c = detect_threshold(&curve);
    order.truncate(*checkpoint_removals.last().expect("curve is non-empty"));

    Ok(PercolationRun {
        curve,
        p_c,
        seed: Some(seed),
        removed_order: order,
        checkpoint_removals,
    })
}

fn assemble_ensemble(runs: Vec<PercolationRun>) -> PercolationEnsemble {
    let n = runs.len() as f64;
    let p_c_mean = runs.iter().map(|r| r.p_c).sum::<f64>() / n;
    let var = runs.iter().map(|r| (r.p_c - p_c_mean).powi(2)).sum::<f64>() / n;
    let p_c_std = var.sqrt();
    let shortest = runs.iter().map(|r| r.curve.len()).min().unwrap_or(0);
    let mean_curve = (0..shortest)
        .map(|i| MeanCheckpoint {
            p: runs[0].curve[i].p,
            gcc_mean: runs.iter().map(|r| r.curve[i].gcc_size as f64).sum::<f64>() / n,
            slcc_mean: runs
                .iter()
                .map(|r| r.curve[i].slcc_size as f64)
                .sum::<f64>()
                / n,
        })
        .collect();
    PercolationEnsemble {
        runs,
        p_c_mean,
        p_c_std,
        mean_curve,
    }
}

/// Sequential error ensemble: run `i` is seeded with `base_seed + i`.
pub fn run_error_ensemble_serial(
    network: &RoadNetwork,
    base_seed: u64,
    runs: usize,
    checkpoint_fraction: f64,
) -> Result<PercolationEnsemble> {
    if runs == 0 {
        return Err(Error::NoRuns);
    }
    let collected: Result<Vec<PercolationRun>> = (0..runs)
        .map(|i| {
            run_error(
                network,
                base_seed.wrapping_add(i as u64),
                checkpoint_fraction,
            )
        })
        .collect();
    Ok(assemble_ensemble(collected?))
}

/// Parallel error ensemble. Runs are independent and keyed by index, so the
/// result is identical to the sequential version regardless of scheduling.
#[cfg(feature = "parallel")]
pub fn run_error_ensemble_parallel(
    network: &RoadNetwork,
    base_seed: u64,
    runs: usize,
    checkpoint_fraction: f64,
) -> Result<PercolationEnsemble> {
    use rayon::prelude::*;
    if runs == 0 {
        return Err(Error::NoRuns);
    }
    let collected: Result<Vec<PercolationRun>> = (0..runs)
        .into_par_iter()
        .map(|i| {
            run_error(
                network,
                base_seed.wrapping_add(i as u64),
                checkpoint_fraction,
            )
        })
        .collect();
    Ok(assemble_ensemble(collected?))
}

/// Error ensemble; parallel when the `parallel` feature is enabled.
pub fn run_error_ensemble(
    network: &RoadNetwork,
    base_seed: u64,
    runs: usize,
    checkpoint_fraction: f64,
) -> Result<PercolationEnsemble> {
    #[cfg(feature = "parallel")]
    {
        run_error_ensemble_parallel(network, base_seed, runs, checkpoint_fraction)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_error_ensemble_serial(network, base_seed, runs, checkpoint_fraction)
    }
}

/// Alive-subgraph skeleton for betweenness: parallel edges are collapsed to
/// node pairs for path counting, then pair scores are split equally among
/// the parallels.
struct Skeleton {
    /// Per node: (neighbor, pair index) with distinct neighbors.
    adjacency: Vec<Vec<(u32, u32)>>,
    /// Per pair: alive edge ids on that node pair.
    pair_edges: Vec<Vec<EdgeId>>,
}

fn build_skeleton(network: &RoadNetwork, alive: &[bool]) -> Skeleton {
    use std::collections::HashMap;
    let n = network.node_count();
    let mut pair_index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut pair_edges: Vec<Vec<EdgeId>> = Vec::new();
    let mut adjacency: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    for e in network.edge_ids() {
        if !alive[e.index()] {
            continue;
        }
        let edge = network.edge(e);
        let key = (edge.a.0.min(edge.b.0), edge.a.0.max(edge.b.0));
        let pid = *pair_index.entry(key).or_insert_with(|| {
            let pid = pair_edges.len() as u32;
            pair_edges.push(Vec::new());
            adjacency[key.0 as usize].push((key.1, pid));
            adjacency[key.1 as usize].push((key.0, pid));
            pid
        });
        pair_edges[pid as usize].push(e);
    }
    Skeleton {
        adjacency,
        pair_edges,
    }
}

/// Brandes pass over one block of source nodes, accumulating pair scores.
fn betweenness_block(skeleton: &Skeleton, sources: std::ops::Range<usize>, out: &mut [f64]) {
    let n = skeleton.adjacency.len();
    let mut dist: Vec<i32> = vec![-1; n];
    let mut sigma: Vec<f64> = vec![0.0; n];
    let mut delta: Vec<f64> = vec![0.0; n];
    let mut preds: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n];
    let mut order: Vec<u32> = Vec::with_capacity(n);
    let mut queue: std::collections::VecDeque<u32> = std::collections::VecDeque::new();

    for s in sources {
        if skeleton.adjacency[s].is_empty() {
            continue;
        }
        order.clear();
        queue.clear();
        dist[s] = 0;
        sigma[s] = 1.0;
        queue.push_back(s as u32);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let dv = dist[v as usize];
            let sv = sigma[v as usize];
            for &(w, pid) in &skeleton.adjacency[v as usize] {
                let w_us = w as usize;
                if dist[w_us] < 0 {
                    dist[w_us] = dv + 1;
                    queue.push_back(w);
                }
                if dist[w_us] == dv + 1 {
                    sigma[w_us] += sv;
                    preds[w_us].push((v, pid));
                }
            }
        }
        // dependency accumulation; summed over all sources this counts
        // ordered node pairs
        for &w in order.iter().rev() {
            let w_us = w as usize;
            let coeff = (1.0 + delta[w_us]) / sigma[w_us];
            for &(v, pid) in &preds[w_us] {
                let c = sigma[v as usize] * coeff;
                out[pid as usize] += c;
                delta[v as usize] += c;
            }
        }
        // reset touched state
        for &v in &order {
            let v = v as usize;
            dist[v] = -1;
            sigma[v] = 0.0;
            delta[v] = 0.0;
            preds[v].clear();
        }
        dist[s] = -1;
        sigma[s] = 0.0;
        delta[s] = 0.0;
    }
}

/// Sources are processed in fixed blocks and the block partials summed in
/// block order, so parallel and serial results are bitwise identical.
const BETWEENNESS_BLOCK: usize = 64;

fn betweenness_pair_scores_serial(skeleton: &Skeleton) -> Vec<f64> {
    let n = skeleton.adjacency.len();
    let n_pairs = skeleton.pair_edges.len();
    let mut total = vec![0.0; n_pairs];
    let mut block = vec![0.0; n_pairs];
    for start in (0..n).step_by(BETWEENNESS_BLOCK) {
        let end = (start + BETWEENNESS_BLOCK).min(n);
        block.iter_mut().for_each(|x| *x = 0.0);
        betweenness_block(skeleton, start..end, &mut block);
        for (t, b) in total.iter_mut().zip(&block) {
            *t += b;
        }
    }
    total
}

#[cfg(feature = "parallel")]
fn betweenness_pair_scores_parallel(skeleton: &Skeleton) -> Vec<f64> {
    use rayon::prelude::*;
    let n = skeleton.adjacency.len();
    let n_pairs = skeleton.pair_edges.len();
    let starts: Vec<usize> = (0..n).step_by(BETWEENNESS_BLOCK).collect();
    let partials: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&start| {
            let end = (start + BETWEENNESS_BLOCK).min(n);
            let mut block = vec![0.0; n_pairs];
            betweenness_block(skeleton, start..end, &mut block);
            block
        })
        .collect();
    let mut total = vec![0.0; n_pairs];
    for block in partials {
        for (t, b) in total.iter_mut().zip(&block) {
            *t += b;
        }
    }
    total
}

fn edge_betweenness_from_pairs(
    network: &RoadNetwork,
    skeleton: &Skeleton,
    pair_scores: &[f64],
) -> Vec<f64> {
    let mut scores = vec![0.0; network.edge_count()];
    for (pid, edges) in skeleton.pair_edges.iter().enumerate() {
        let share = pair_scores[pid] / edges.len() as f64;
        for &e in edges {
            scores[e.index()] = share;
        }
    }
    scores
}

/// Unweighted shortest-path edge betweenness over ordered node pairs,
/// restricted to `alive_edges`; sequential source loop.
///
/// Returns a score per edge id of the network (0.0 for edges not alive).
/// Contributions to a node pair are split equally among parallel alive
/// edges on that pair.
pub fn edge_betweenness_serial(network: &RoadNetwork, alive_edges: &[EdgeId]) -> Vec<f64> {
    let mut alive = vec![false; network.edge_count()];
    for &e in alive_edges {
        alive[e.index()] = true;
    }
    let skeleton = build_skeleton(network, &alive);
    let pair_scores = betweenness_pair_scores_serial(&skeleton);
    edge_betweenness_from_pairs(network, &skeleton, &pair_scores)
}

/// Parallel edge betweenness; bitwise identical to the serial version.
#[cfg(feature = "parallel")]
pub fn edge_betweenness_parallel(network: &RoadNetwork, alive_edges: &[EdgeId]) -> Vec<f64> {
    let mut alive = vec![false; network.edge_count()];
    for &e in alive_edges {
        alive[e.index()] = true;
    }
    let skeleton = build_skeleton(network, &alive);
    let pair_scores = betweenness_pair_scores_parallel(&skeleton);
    edge_betweenness_from_pairs(network, &skeleton, &pair_scores)
}

/// Edge betweenness; parallel when the `parallel` feature is enabled.
pub fn edge_betweenness(network: &RoadNetwork, alive_edges: &[EdgeId]) -> Vec<f64> {
    #[cfg(feature = "parallel")]
    {
        edge_betweenness_parallel(network, alive_edges)
    }
    #[cfg(not(feature = "parallel"))]
    {
        edge_betweenness_serial(network, alive_edges)
    }
}

fn betweenness_on_mask(network: &RoadNetwork, alive: &[bool]) -> Vec<f64> {
    let skeleton = build_skeleton(network, alive);
    #[cfg(feature = "parallel")]
    let pair_scores = betweenness_pair_scores_parallel(&skeleton);
    #[cfg(not(feature = "parallel"))]
    let pair_scores = betweenness_pair_scores_serial(&skeleton);
    edge_betweenness_from_pairs(network, &skeleton, &pair_scores)
}

/// Betweenness-targeted attack run.
///
/// The alive edge of highest betweenness is removed each step (ties to the
/// smallest edge id); scores are recomputed every `recompute_every`
/// removals and component sizes are checked after every removal. Fully
/// deterministic.
pub fn run_attack(network: &RoadNetwork, recompute_every: usize) -> Result<PercolationRun> {
    validate_connected(network)?;
    if recompute_every == 0 {
        return Err(Error::Validation("recompute_every must be >= 1".into()));
    }
    let e_total = network.edge_count();
    let mut alive = vec![true; e_total];
    let mut scores: Vec<f64> = Vec::new();
    let mut removed_order = Vec::new();
    let mut curve = Vec::new();
    let mut checkpoint_removals = Vec::new();

    for step in 0..e_total {
        if step % recompute_every == 0 {
            scores = betweenness_on_mask(network, &alive);
        }
        let target = network
            .edge_ids()
            .filter(|e| alive[e.index()])
            .max_by(|a, b| {
                scores[a.index()]
                    .partial_cmp(&scores[b.index()])
                    .expect("betweenness scores are finite")
                    // on equal scores prefer the smaller edge id
                    .then(b.index().cmp(&a.index()))
            })
            .expect("alive edges remain");
        alive[target.index()] = false;
        removed_order.push(target);

        let mut uf = UnionFind::new(network.node_count());
        for e in network.edge_ids() {
            if alive[e.index()] {
                let edge = network.edge(e);
                uf.union(edge.a.index(), edge.b.index());
            }
        }
        let sizes = {
            let mut s = uf.into_components().sizes;
            s.sort_unstable_by(|a, b| b.cmp(a));
            s
        };
        let (gcc, slcc) = top_two(&sizes);
        curve.push(Checkpoint {
            p: (step + 1) as f64 / e_total as f64,
            gcc_size: gcc,
            slcc_size: slcc,
        });
        checkpoint_removals.push(step + 1);
        if gcc == slcc {
            break;
        }
    }

    let p_c = detect_threshold(&curve);
    Ok(PercolationRun {
        curve,
        p_c,
        seed: None,
        removed_order,
        checkpoint_removals,
    })
}

/// Node set of the largest component after removing `removed` edges
/// (ties to the component holding the smallest node id).
pub fn gcc_nodes_after_removals(network: &RoadNetwork, removed: &[EdgeId]) -> Vec<NodeId> {
    let mut alive = vec![true; network.edge_count()];
    for &e in removed {
        alive[e.index()] = false;
    }
    let mut uf = UnionFind::new(network.node_count());
    for e in network.edge_ids() {
        if alive[e.index()] {
            let edge = network.edge(e);
            uf.union(edge.a.index(), edge.b.index());
        }
    }
    let comps = uf.into_components();
    let mut best = comps.labels[0];
    for v in 1..network.node_count() {
        let label = comps.labels[v];
        if comps.sizes[label] > comps.sizes[best] {
            best = label;
        }
    }
    (0..network.node_count())
        .filter(|&v| comps.labels[v] == best)
        .map(|v| NodeId(v as u32))
        .collect()
}

/// Sample Pearson correlation coefficient, clamped to [-1, 1].
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::BadCorrelationInput);
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((cov / (vx * vy).sqrt()).clamp(-1.0, 1.0))
}
