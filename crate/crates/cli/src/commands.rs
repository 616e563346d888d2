//! Subcommand implementations over the on-disk artifact layout:
//! `<out>/<city>/{network_nodes.csv, network_edges.csv, metrics.json,
//! error_curve.csv, attack_curve.csv, runs_pc.csv, availability_error.csv,
//! availability_attack.csv, summary.json}` plus `<out>/report/`.
//!
//! Artifacts are written to a temp file and renamed, so nothing is left
//! half-written on failure.

use std::collections::HashSet;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use roadnet::artifacts::{
    self, AttackSummary, AvailabilitySummary, ErrorSummary, Report, ReportRow, SchemeAvailability,
    Summary,
};
use roadnet::percolation::{self, PercolationRun};
use roadnet::services::{self, AvailabilityReport};
use roadnet::{geo, NodeId, RoadNetwork};

use crate::{BuildArgs, PercolateArgs, ReportArgs, ServicesArgs};

pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn input(message: String) -> Self {
        CliError { code: 2, message }
    }

    fn runtime(message: String) -> Self {
        CliError { code: 1, message }
    }
}

impl From<roadnet::Error> for CliError {
    fn from(e: roadnet::Error) -> Self {
        CliError {
            code: if e.is_input_error() { 2 } else { 1 },
            message: e.to_string(),
        }
    }
}

fn open_input(path: &Path) -> Result<fs::File, CliError> {
    fs::File::open(path)
        .map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))
}

fn read_artifact(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))
}

fn write_atomic(path: &Path, content: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, content)
        .and_then(|()| fs::rename(&tmp, path))
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

struct CityDir {
    dir: PathBuf,
}

impl CityDir {
    fn create(out: &Path, city: &str) -> Result<Self, CliError> {
        let dir = out.join(city);
        fs::create_dir_all(&dir)
            .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(CityDir { dir })
    }

    fn file(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn load_summary(&self, city: &str) -> Result<Summary, CliError> {
        let path = self.file("summary.json");
        if !path.exists() {
            return Ok(Summary::new(city));
        }
        let summary = artifacts::read_summary_json(&read_artifact(&path)?)?;
        if summary.city_name != city {
            return Err(CliError::input(format!(
                "summary in {} belongs to {:?}, not {city:?}",
                self.dir.display(),
                summary.city_name
            )));
        }
        Ok(summary)
    }

    fn store_summary(&self, summary: &Summary) -> Result<(), CliError> {
        write_atomic(
            &self.file("summary.json"),
            &artifacts::write_summary_json(summary),
        )
    }
}

/// Loads the built network from the city dir, or builds it from the paths
/// file (writing the dump, metrics, and summary skeleton).
fn ensure_built(
    city_dir: &CityDir,
    city: &str,
    paths: Option<&Path>,
    rebuild: bool,
) -> Result<RoadNetwork, CliError> {
    let nodes_path = city_dir.file("network_nodes.csv");
    let edges_path = city_dir.file("network_edges.csv");
    if !rebuild && nodes_path.exists() && edges_path.exists() {
        let net =
            artifacts::read_network(&read_artifact(&nodes_path)?, &read_artifact(&edges_path)?)?;
        eprintln!(
            "loaded network for {city}: v={} e={}",
            net.node_count(),
            net.edge_count()
        );
        return Ok(net);
    }
    let paths_file = paths.ok_or_else(|| {
        CliError::input(format!(
            "no built network under {} and no --paths given",
            city_dir.dir.display()
        ))
    })?;
    let records = geo::parse_paths_file(BufReader::new(open_input(paths_file)?))?;
    let network = roadnet::build_road_network(&records)?;
    let metrics: artifacts::MetricsSummary = roadnet::compute_metrics(&network)?.into();
    eprintln!(
        "built network for {city}: v={} e={} length_km={:.3}",
        metrics.v, metrics.e, metrics.length_km
    );
    write_atomic(&nodes_path, &artifacts::write_nodes_csv(&network))?;
    write_atomic(&edges_path, &artifacts::write_edges_csv(&network))?;
    write_atomic(
        &city_dir.file("metrics.json"),
        &artifacts::write_metrics_json(&metrics),
    )?;
    let mut summary = city_dir.load_summary(city)?;
    summary.metrics = Some(metrics);
    city_dir.store_summary(&summary)?;
    Ok(network)
}

pub fn build(args: &BuildArgs) -> Result<(), CliError> {
    let city_dir = CityDir::create(&args.out, &args.city)?;
    ensure_built(&city_dir, &args.city, Some(&args.paths), true)?;
    Ok(())
}

pub fn percolate(args: &PercolateArgs) -> Result<(), CliError> {
    let city_dir = CityDir::create(&args.out, &args.city)?;
    let network = ensure_built(&city_dir, &args.city, args.paths.as_deref(), false)?;
    let mut summary = city_dir.load_summary(&args.city)?;

    if args.mode.runs_error() {
        let ensemble = percolation::run_error_ensemble(
            &network,
            args.seed,
            args.runs as usize,
            args.checkpoint_fraction,
        )?;
        for (i, run) in ensemble.runs.iter().enumerate() {
            eprintln!(
                "error run {i}: p_c={:.6} checkpoints={}",
                run.p_c,
                run.curve.len()
            );
        }
        eprintln!(
            "error ensemble: p_c_mean={:.6} p_c_std={:.6} runs={}",
            ensemble.p_c_mean,
            ensemble.p_c_std,
            ensemble.runs.len()
        );
        write_atomic(
            &city_dir.file("error_curve.csv"),
            &artifacts::write_mean_curve_csv(&ensemble.mean_curve),
        )?;
        let thresholds: Vec<f64> = ensemble.runs.iter().map(|r| r.p_c).collect();
        write_atomic(
            &city_dir.file("runs_pc.csv"),
            &artifacts::write_runs_pc_csv(&thresholds),
        )?;
        summary.error = Some(ErrorSummary {
            p_c_mean: ensemble.p_c_mean,
            p_c_std: ensemble.p_c_std,
            runs: ensemble.runs.len(),
        });
    }

    if args.mode.runs_attack() {
        let run = percolation::run_attack(&network, args.recompute_every as usize)?;
        eprintln!(
            "attack: p_c={:.6} removals={} (betweenness recomputed every {})",
            run.p_c,
            run.removed_order.len(),
            args.recompute_every
        );
        write_atomic(
            &city_dir.file("attack_curve.csv"),
            &artifacts::write_run_curve_csv(&run.curve),
        )?;
        summary.attack = Some(AttackSummary { p_c: run.p_c });
    }

    city_dir.store_summary(&summary)
}

/// Availability of one run: services reachable from the GCC at that run's
/// own threshold.
fn run_availability(
    network: &RoadNetwork,
    run: &PercolationRun,
    assignments: &[services::ServiceAssignment],
) -> Result<AvailabilityReport, CliError> {
    let removed = &run.removed_order[..run.removals_at_threshold()];
    let gcc: HashSet<NodeId> = percolation::gcc_nodes_after_removals(network, removed)
        .into_iter()
        .collect();
    Ok(services::availability_at_threshold(assignments, &gcc)?)
}

pub fn services(args: &ServicesArgs) -> Result<(), CliError> {
    let city_dir = CityDir::create(&args.out, &args.city)?;
    let network = ensure_built(&city_dir, &args.city, args.paths.as_deref(), false)?;
    let venues = geo::parse_venues_file(BufReader::new(open_input(&args.venues)?))?;
    let outcome = services::assign_venues(&network, &venues, args.radius_km)?;
    eprintln!(
        "assigned {} venues; omitted {} farther than {} km from every node",
        outcome.assignments.len(),
        outcome.omitted.len(),
        args.radius_km
    );
    for (cat, &count) in outcome
        .assignments
        .iter()
        .fold(&mut std::collections::BTreeMap::new(), |acc, a| {
            *acc.entry(a.category).or_insert(0usize) += 1;
            acc
        })
        .iter()
    {
        eprintln!("  {cat}: {count} assigned");
    }

    let mut summary = city_dir.load_summary(&args.city)?;
    let mut availability = summary.availability.take().unwrap_or(AvailabilitySummary {
        error: None,
        attack: None,
    });

    if args.mode.runs_error() {
        let ensemble = percolation::run_error_ensemble(
            &network,
            args.seed,
            args.runs as usize,
            args.checkpoint_fraction,
        )?;
        let reports: Result<Vec<AvailabilityReport>, CliError> = ensemble
            .runs
            .iter()
            .map(|run| run_availability(&network, run, &outcome.assignments))
            .collect();
        let average = services::average_availability(&reports?)?;
        eprintln!(
            "error availability: mean={:.4} over {} runs",
            average.mean, average.runs
        );
        write_atomic(
            &city_dir.file("availability_error.csv"),
            &artifacts::write_availability_csv(&average),
        )?;
        availability.error = Some(SchemeAvailability::from(&average));
    }

    if args.mode.runs_attack() {
        let run = percolation::run_attack(&network, args.recompute_every as usize)?;
        let report = run_availability(&network, &run, &outcome.assignments)?;
        let average = services::average_availability(&[report])?;
        eprintln!("attack availability: mean={:.4}", average.mean);
        write_atomic(
            &city_dir.file("availability_attack.csv"),
            &artifacts::write_availability_csv(&average),
        )?;
        availability.attack = Some(SchemeAvailability::from(&average));
    }

    summary.availability = Some(availability);
    city_dir.store_summary(&summary)
}

pub fn report(args: &ReportArgs) -> Result<(), CliError> {
    let mut entries: Vec<PathBuf> = fs::read_dir(&args.out)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", args.out.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && p.file_name().is_some_and(|n| n != "report"))
        .collect();
    entries.sort();

    let mut summaries = Vec::new();
    for dir in entries {
        let path = dir.join("summary.json");
        if path.exists() {
            summaries.push(artifacts::read_summary_json(&read_artifact(&path)?)?);
        }
    }
    if summaries.is_empty() {
        return Err(CliError::input(format!(
            "no city summaries found under {}",
            args.out.display()
        )));
    }
    summaries.sort_by(|a, b| a.city_name.cmp(&b.city_name));

    let rows: Vec<ReportRow> = summaries
        .iter()
        .map(|s| ReportRow {
            city_name: s.city_name.clone(),
            error_p_c_mean: s.error.as_ref().map(|e| e.p_c_mean),
            attack_p_c: s.attack.as_ref().map(|a| a.p_c),
            availability_error_mean: s
                .availability
                .as_ref()
                .and_then(|a| a.error.as_ref())
                .map(|a| a.mean),
            availability_attack_mean: s
                .availability
                .as_ref()
                .and_then(|a| a.attack.as_ref())
                .map(|a| a.mean),
        })
        .collect();

    // error-vs-attack correlation over cities carrying both thresholds
    let paired: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.error_p_c_mean.zip(r.attack_p_c))
        .collect();
    let pearson_error_attack = if paired.len() >= 2 {
        let xs: Vec<f64> = paired.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = paired.iter().map(|p| p.1).collect();
        match percolation::pearson(&xs, &ys) {
            Ok(r) => Some(r),
            Err(e) => {
                eprintln!("correlation omitted: {e}");
                None
            }
        }
    } else {
        None
    };

    let ranking = |pick: fn(&ReportRow) -> Option<f64>| {
        let mut ranked: Vec<(String, f64)> = rows
            .iter()
            .filter_map(|r| pick(r).map(|pc| (r.city_name.clone(), pc)))
            .collect();
        ranked.sort_by(|a, b| {
            a.1.partial_cmp(&b.1)
                .expect("finite p_c")
                .then(a.0.cmp(&b.0))
        });
        ranked
    };
    let error_ranking = ranking(|r| r.error_p_c_mean);
    let attack_ranking = ranking(|r| r.attack_p_c);

    let report_dir = args.out.join("report");
    fs::create_dir_all(&report_dir)
        .map_err(|e| CliError::runtime(format!("cannot create {}: {e}", report_dir.display())))?;
    write_atomic(
        &report_dir.join("report.json"),
        &artifacts::write_report_json(&Report {
            cities: rows,
            pearson_error_attack,
        }),
    )?;
    write_atomic(
        &report_dir.join("ranking_error.csv"),
        &artifacts::write_ranking_csv(&error_ranking),
    )?;
    write_atomic(
        &report_dir.join("ranking_attack.csv"),
        &artifacts::write_ranking_csv(&attack_ranking),
    )?;
    if let Some(r) = pearson_error_attack {
        eprintln!(
            "error-vs-attack threshold correlation over {} cities: {r:.4}",
            paired.len()
        );
    }
    Ok(())
}
