//! Result-artifact formats: curve/ranking/availability CSVs, the network
//! dump, and the per-city summary JSON.
//!
//! All writers are bit-stable: identical inputs yield identical bytes.
//! Fractions `p` print with six decimals; everything else that is real
//! prints in Rust's shortest round-trip form so serialize-parse is
//! value-identical.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::graph::{NetworkMetrics, RoadNetwork};
use crate::percolation::{Checkpoint, MeanCheckpoint};
use crate::services::{AvailabilityAverage, Category};

fn parse_field<T: std::str::FromStr>(s: &str, line: usize, what: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {what} {s:?}"),
    })
}

/// Curve CSV for a single run: sizes are exact integers.
pub fn write_run_curve_csv(curve: &[Checkpoint]) -> String {
    let mut out = String::from("p,gcc_size,slcc_size\n");
    for cp in curve {
        out.push_str(&format!("{:.6},{},{}\n", cp.p, cp.gcc_size, cp.slcc_size));
    }
    out
}

pub fn read_run_curve_csv(text: &str) -> Result<Vec<Checkpoint>> {
    let mut curve = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let mut fields = line.split(',');
        let mut next = |what: &str| {
            fields.next().ok_or_else(|| Error::Parse {
                line: idx + 1,
                msg: format!("missing {what}"),
            })
        };
        let p: f64 = parse_field(next("p")?, idx + 1, "p")?;
        let gcc_size: usize = parse_field(next("gcc_size")?, idx + 1, "gcc_size")?;
        let slcc_size: usize = parse_field(next("slcc_size")?, idx + 1, "slcc_size")?;
        curve.push(Checkpoint {
            p,
            gcc_size,
            slcc_size,
        });
    }
    Ok(curve)
}

/// Curve CSV for an ensemble mean: sizes are averaged, so they print in
/// full precision rather than as integers.
pub fn write_mean_curve_csv(curve: &[MeanCheckpoint]) -> String {
    let mut out = String::from("p,gcc_size,slcc_size\n");
    for cp in curve {
        out.push_str(&format!("{:.6},{},{}\n", cp.p, cp.gcc_mean, cp.slcc_mean));
    }
    out
}

pub fn read_mean_curve_csv(text: &str) -> Result<Vec<MeanCheckpoint>> {
    let mut curve = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        curve.push(MeanCheckpoint {
            p: parse_field(fields[0], idx + 1, "p")?,
            gcc_mean: parse_field(fields[1], idx + 1, "gcc_size")?,
            slcc_mean: parse_field(fields[2], idx + 1, "slcc_size")?,
        });
    }
    Ok(curve)
}

/// Per-run threshold CSV for ensemble distribution inspection.
pub fn write_runs_pc_csv(thresholds: &[f64]) -> String {
    let mut out = String::from("run_index,p_c\n");
    for (i, pc) in thresholds.iter().enumerate() {
        out.push_str(&format!("{i},{pc:.6}\n"));
    }
    out
}

pub fn read_runs_pc_csv(text: &str) -> Result<Vec<f64>> {
    let mut thresholds = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 2 fields, got {}", fields.len()),
            });
        }
        thresholds.push(parse_field(fields[1], idx + 1, "p_c")?);
    }
    Ok(thresholds)
}

/// Availability CSV: one row per category with at least one assigned venue.
/// `retained` is a mean over runs, so it prints in full precision.
pub fn write_availability_csv(avg: &AvailabilityAverage) -> String {
    let mut out = String::from("category,assigned,retained,fraction\n");
    for (&cat, &fraction) in &avg.per_category {
        out.push_str(&format!(
            "{},{},{},{}\n",
            cat.label(),
            avg.assigned_counts[&cat],
            avg.retained_mean[&cat],
            fraction
        ));
    }
    out
}

/// Node table of the network dump.
pub fn write_nodes_csv(network: &RoadNetwork) -> String {
    let mut out = String::from("node_id,lon,lat\n");
    for n in network.node_ids() {
        let p = network.point(n);
        out.push_str(&format!("{n},{},{}\n", p.lon, p.lat));
    }
    out
}

/// Edge list of the network dump.
pub fn write_edges_csv(network: &RoadNetwork) -> String {
    let mut out = String::from("edge_id,node_a,node_b,length_km\n");
    for e in network.edge_ids() {
        let edge = network.edge(e);
        out.push_str(&format!("{e},{},{},{}\n", edge.a, edge.b, edge.length_km));
    }
    out
}

/// Rebuilds a network from its dump. Node names become the dense ids.
pub fn read_network(nodes_csv: &str, edges_csv: &str) -> Result<RoadNetwork> {
    let mut nodes = Vec::new();
    for (idx, line) in nodes_csv.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 3 fields, got {}", fields.len()),
            });
        }
        let id: usize = parse_field(fields[0], idx + 1, "node_id")?;
        if id != nodes.len() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("node ids must be dense, expected {} got {id}", nodes.len()),
            });
        }
        let lon: f64 = parse_field(fields[1], idx + 1, "lon")?;
        let lat: f64 = parse_field(fields[2], idx + 1, "lat")?;
        nodes.push((fields[0].to_string(), GeoPoint::new(lon, lat)?));
    }
    let mut edges = Vec::new();
    for (idx, line) in edges_csv.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        let id: usize = parse_field(fields[0], idx + 1, "edge_id")?;
        if id != edges.len() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("edge ids must be dense, expected {} got {id}", edges.len()),
            });
        }
        edges.push((
            parse_field(fields[1], idx + 1, "node_a")?,
            parse_field(fields[2], idx + 1, "node_b")?,
            parse_field(fields[3], idx + 1, "length_km")?,
        ));
    }
    RoadNetwork::new(nodes, edges)
}

/// Structural metrics as serialized in `metrics.json` and the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub v: usize,
    pub e: usize,
    pub length_km: f64,
    pub avg_degree: f64,
    pub meshness: f64,
    pub organic: f64,
}

impl From<NetworkMetrics> for MetricsSummary {
    fn from(m: NetworkMetrics) -> Self {
        MetricsSummary {
            v: m.v,
            e: m.e,
            length_km: m.length_km,
            avg_degree: m.avg_degree,
            meshness: m.meshness,
            organic: m.organic,
        }
    }
}

/// Error-scheme results in the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub p_c_mean: f64,
    pub p_c_std: f64,
    pub runs: usize,
}

/// Attack-scheme results in the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackSummary {
    pub p_c: f64,
}

/// Availability of one scheme: category label to fraction, plus the
/// unweighted mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeAvailability {
    pub per_category: BTreeMap<String, f64>,
    pub mean: f64,
}

impl From<&AvailabilityAverage> for SchemeAvailability {
    fn from(avg: &AvailabilityAverage) -> Self {
        SchemeAvailability {
            per_category: avg
                .per_category
                .iter()
                .map(|(&c, &f)| (c.label().to_string(), f))
                .collect(),
            mean: avg.mean,
        }
    }
}

/// Availability section of the summary, labeled by the scheme that
/// produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvailabilitySummary {
    pub error: Option<SchemeAvailability>,
    pub attack: Option<SchemeAvailability>,
}

/// Consolidated per-city summary (`summary.json`). Sections appear as the
/// pipeline stages run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub city_name: String,
    pub metrics: Option<MetricsSummary>,
    pub error: Option<ErrorSummary>,
    pub attack: Option<AttackSummary>,
    pub availability: Option<AvailabilitySummary>,
}

impl Summary {
    pub fn new(city_name: &str) -> Self {
        Summary {
            city_name: city_name.to_string(),
            metrics: None,
            error: None,
            attack: None,
            availability: None,
        }
    }
}

pub fn write_summary_json(summary: &Summary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

pub fn read_summary_json(text: &str) -> Result<Summary> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })
}

pub fn write_metrics_json(metrics: &MetricsSummary) -> String {
    let mut s = serde_json::to_string_pretty(metrics).expect("metrics serialize");
    s.push('\n');
    s
}

/// One city's row in the cross-city report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub city_name: String,
    pub error_p_c_mean: Option<f64>,
    pub attack_p_c: Option<f64>,
    pub availability_error_mean: Option<f64>,
    pub availability_attack_mean: Option<f64>,
}

/// Cross-city report (`report.json`): rows sorted by city name plus the
/// Pearson correlation between error and attack thresholds when at least
/// two cities carry both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub cities: Vec<ReportRow>,
    pub pearson_error_attack: Option<f64>,
}

pub fn write_report_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Ranking CSV: cities sorted ascending by threshold (weakest first),
/// ties by name.
pub fn write_ranking_csv(ranked: &[(String, f64)]) -> String {
    let mut out = String::from("rank,city,p_c\n");
    for (i, (city, pc)) in ranked.iter().enumerate() {
        out.push_str(&format!("{},{city},{pc:.6}\n", i + 1));
    }
    out
}

/// Summary of one category row in an availability CSV, as read back.
pub type AvailabilityRow = (String, usize, f64, f64);

pub fn read_availability_csv(text: &str) -> Result<Vec<AvailabilityRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if idx == 0 {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 4 fields, got {}", fields.len()),
            });
        }
        if Category::parse(fields[0]).is_none() {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("unknown category {:?}", fields[0]),
            });
        }
        rows.push((
            fields[0].to_string(),
            parse_field(fields[1], idx + 1, "assigned")?,
            parse_field(fields[2], idx + 1, "retained")?,
            parse_field(fields[3], idx + 1, "fraction")?,
        ));
    }
    Ok(rows)
}
