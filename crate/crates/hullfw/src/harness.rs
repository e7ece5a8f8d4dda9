//! Benchmark plumbing: structured run logs, the experiment grid runner,
//! CSV emission/parsing, and summary tables with shifted geometric means.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{solve_nlp_bnb, solve_oa};
use crate::bpcg::TraceRecord;
use crate::error::{Result, SolverError};
use crate::objective::{
    make_logistic_regression, make_poisson_regression, make_portfolio, make_sparse_regression,
    make_tcmp, ProblemInstance,
};
use crate::tightening::TighteningEvent;
use crate::tree::{solve, SolveOutcome, SolverConfig};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunHeader {
    pub instance: String,
    pub solver: String,
    pub config_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum EventKind {
    NodeSolved {
        id: u64,
        depth: usize,
        f_hat: f64,
        certified_gap: f64,
        node_bound: f64,
        lower_bound: f64,
        upper_bound: f64,
        lmo_calls: usize,
        open_nodes: usize,
    },
    NodePruned {
        id: u64,
        bound: f64,
    },
    NodeInfeasible {
        id: u64,
    },
    Incumbent {
        value: f64,
        node: u64,
    },
    Tightening {
        node: u64,
        global: bool,
        events: Vec<TighteningEvent>,
    },
    NodeTrace {
        node: u64,
        records: Vec<TraceRecord>,
    },
    Branched {
        node: u64,
        variable: usize,
        children: [u64; 2],
    },
    OaRound {
        round: usize,
        primal: f64,
        dual: f64,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunEvent {
    pub seconds: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: String,
    pub primal: Option<f64>,
    pub dual: f64,
    pub nodes: usize,
    pub lmo_calls: usize,
    pub wall_seconds: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RunLog {
    pub header: RunHeader,
    pub events: Vec<RunEvent>,
    pub summary: Option<RunSummary>,
    #[serde(skip, default = "Instant::now")]
    start: Instant,
}

impl RunLog {
    pub fn new(header: RunHeader) -> Self {
        RunLog { header, events: Vec::new(), summary: None, start: Instant::now() }
    }

    pub fn push(&mut self, kind: EventKind) {
        self.events.push(RunEvent { seconds: self.start.elapsed().as_secs_f64(), kind });
    }

    pub fn finish(
        &mut self,
        status: &str,
        primal: Option<f64>,
        dual: f64,
        nodes: usize,
        lmo_calls: usize,
        wall_seconds: f64,
    ) {
        self.summary = Some(RunSummary {
            status: status.to_string(),
            primal,
            dual,
            nodes,
            lmo_calls,
            wall_seconds,
        });
    }
}

/// exp(mean(log(v + shift))) - shift
pub fn shifted_geomean(values: &[f64], shift: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(SolverError::Argument("geomean of an empty list".into()));
    }
    if shift < 0.0 {
        return Err(SolverError::Argument("shift must be nonnegative".into()));
    }
    let mut acc = 0.0;
    for &v in values {
        if v + shift <= 0.0 {
            return Err(SolverError::Argument("values must be positive after shifting".into()));
        }
        acc += (v + shift).ln();
    }
    Ok((acc / values.len() as f64).exp() - shift)
}

pub fn relative_gap(primal: Option<f64>, dual: f64) -> f64 {
    match primal {
        Some(p) => (p - dual) / p.abs().max(1e-8),
        None => f64::INFINITY,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub instance: String,
    pub solver: String,
    pub seed: u64,
    pub status: String,
    pub primal: f64,
    pub dual: f64,
    pub rel_gap: f64,
    pub nodes: usize,
    pub lmo_calls: usize,
    pub wall_seconds: f64,
}

pub const CSV_HEADER: &str =
    "instance,solver,seed,status,primal,dual,rel_gap,nodes,lmo_calls,wall_seconds";

pub fn emit_csv(rows: &[CsvRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.instance,
            r.solver,
            r.seed,
            r.status,
            r.primal,
            r.dual,
            r.rel_gap,
            r.nodes,
            r.lmo_calls,
            r.wall_seconds
        ));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == CSV_HEADER => {}
        _ => return Err(SolverError::Parse("missing or malformed CSV header".into())),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 10 {
            return Err(SolverError::Parse(format!("line {}: expected 10 fields", i + 2)));
        }
        let field = |j: usize| -> Result<f64> {
            parts[j]
                .parse()
                .map_err(|_| SolverError::Parse(format!("line {}: bad number {:?}", i + 2, parts[j])))
        };
        rows.push(CsvRow {
            instance: parts[0].to_string(),
            solver: parts[1].to_string(),
            seed: parts[2]
                .parse()
                .map_err(|_| SolverError::Parse(format!("line {}: bad seed", i + 2)))?,
            status: parts[3].to_string(),
            primal: field(4)?,
            dual: field(5)?,
            rel_gap: field(6)?,
            nodes: parts[7]
                .parse()
                .map_err(|_| SolverError::Parse(format!("line {}: bad node count", i + 2)))?,
            lmo_calls: parts[8]
                .parse()
                .map_err(|_| SolverError::Parse(format!("line {}: bad lmo count", i + 2)))?,
            wall_seconds: field(9)?,
        });
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketRow {
    pub solver: String,
    pub threshold: f64,
    pub instances: usize,
    pub solved: usize,
    pub pct_solved: f64,
    pub geomean_time: f64,
    pub mean_rel_gap: f64,
}

/// Per-solver table over nested instance subsets: bucket at threshold t keeps
/// the instances whose minimum solve time across solvers exceeds t. Timeouts
/// enter the means at the time limit.
pub fn summarize(
    rows: &[CsvRow],
    thresholds: &[f64],
    time_limit: f64,
    shift: f64,
) -> Result<Vec<BucketRow>> {
    let mut solvers: Vec<String> = Vec::new();
    let mut cells: Vec<(String, u64)> = Vec::new();
    for r in rows {
        if !solvers.contains(&r.solver) {
            solvers.push(r.solver.clone());
        }
        let key = (r.instance.clone(), r.seed);
        if !cells.contains(&key) {
            cells.push(key);
        }
    }
    let time_of = |r: &CsvRow| -> f64 {
        if r.status == "Optimal" {
            r.wall_seconds.min(time_limit)
        } else {
            time_limit
        }
    };
    let mut table = Vec::new();
    for &t in thresholds {
        let subset: Vec<&(String, u64)> = cells
            .iter()
            .filter(|(inst, seed)| {
                let min_time = rows
                    .iter()
                    .filter(|r| &r.instance == inst && r.seed == *seed)
                    .map(time_of)
                    .fold(f64::INFINITY, f64::min);
                min_time > t
            })
            .collect();
        for solver in &solvers {
            let picked: Vec<&CsvRow> = subset
                .iter()
                .filter_map(|(inst, seed)| {
                    rows.iter()
                        .find(|r| &r.instance == inst && r.seed == *seed && &r.solver == solver)
                })
                .collect();
            if picked.is_empty() {
                table.push(BucketRow {
                    solver: solver.clone(),
                    threshold: t,
                    instances: 0,
                    solved: 0,
                    pct_solved: 0.0,
                    geomean_time: 0.0,
                    mean_rel_gap: 0.0,
                });
                continue;
            }
            let times: Vec<f64> = picked.iter().map(|r| time_of(r)).collect();
            let solved = picked.iter().filter(|r| r.status == "Optimal").count();
            let gaps: Vec<f64> = picked.iter().map(|r| r.rel_gap).collect();
            table.push(BucketRow {
                solver: solver.clone(),
                threshold: t,
                instances: picked.len(),
                solved,
                pct_solved: 100.0 * solved as f64 / picked.len() as f64,
                geomean_time: shifted_geomean(&times, shift)?,
                mean_rel_gap: gaps.iter().sum::<f64>() / gaps.len() as f64,
            });
        }
    }
    Ok(table)
}

pub fn render_table(table: &[BucketRow]) -> String {
    let mut out = String::from(
        "threshold  solver     instances  solved  %solved  geomean_time  mean_rel_gap\n",
    );
    for r in table {
        out.push_str(&format!(
            "{:<9}  {:<9}  {:<9}  {:<6}  {:<7.1}  {:<12.4}  {:.3e}\n",
            r.threshold, r.solver, r.instances, r.solved, r.pct_solved, r.geomean_time,
            r.mean_rel_gap
        ));
    }
    out
}

pub fn config_hash(config: &SolverConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut hex = String::new();
    for b in &digest[..8] {
        hex.push_str(&format!("{b:02x}"));
    }
    hex
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    Portfolio { n: usize, integer_fraction: f64 },
    SparseReg { m: usize, p: usize, k: usize },
    Poisson { m: usize, p: usize, k: usize },
    Logistic { m: usize, p: usize, k: usize },
    Tcmp { n: usize, lambda: f64, mu_r: f64, tau: Vec<f64> },
}

impl FamilySpec {
    pub fn build(&self, seed: u64) -> Result<(String, ProblemInstance)> {
        match self {
            FamilySpec::Portfolio { n, integer_fraction } => Ok((
                format!("portfolio_n{n}"),
                make_portfolio(*n, *integer_fraction, seed)?,
            )),
            FamilySpec::SparseReg { m, p, k } => Ok((
                format!("sparse_reg_m{m}_p{p}_k{k}"),
                make_sparse_regression(*m, *p, *k, seed)?,
            )),
            FamilySpec::Poisson { m, p, k } => Ok((
                format!("poisson_m{m}_p{p}_k{k}"),
                make_poisson_regression(*m, *p, *k, seed)?,
            )),
            FamilySpec::Logistic { m, p, k } => Ok((
                format!("logistic_m{m}_p{p}_k{k}"),
                make_logistic_regression(*m, *p, *k, seed)?,
            )),
            FamilySpec::Tcmp { n, lambda, mu_r, tau } => Ok((
                format!("tcmp_n{n}"),
                make_tcmp(*n, *lambda, *mu_r, tau, seed)?,
            )),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub families: Vec<FamilySpec>,
    pub seeds: Vec<u64>,
    /// entries from {"hullfw", "oa", "nlp-bnb"}
    pub solvers: Vec<String>,
    #[serde(default)]
    pub config: SolverConfig,
    #[serde(default = "default_grid_time_limit")]
    pub time_limit: f64,
}

fn default_grid_time_limit() -> f64 {
    60.0
}

pub fn solve_with(
    solver: &str,
    instance: &ProblemInstance,
    config: &SolverConfig,
) -> Result<SolveOutcome> {
    match solver {
        "hullfw" => solve(instance, config),
        "oa" => solve_oa(instance, config.abs_gap_tolerance.max(1e-8), 200, config.time_limit),
        "nlp-bnb" => solve_nlp_bnb(instance, config),
        other => Err(SolverError::Argument(format!("unknown solver {other:?}"))),
    }
}

pub fn outcome_to_row(
    instance: &str,
    solver: &str,
    seed: u64,
    outcome: &SolveOutcome,
    wall_seconds: f64,
) -> CsvRow {
    let primal = if outcome.primal.is_finite() { Some(outcome.primal) } else { None };
    CsvRow {
        instance: instance.to_string(),
        solver: solver.to_string(),
        seed,
        status: format!("{:?}", outcome.status),
        primal: primal.unwrap_or(f64::INFINITY),
        dual: outcome.dual,
        rel_gap: relative_gap(primal, outcome.dual),
        nodes: outcome.nodes_processed,
        lmo_calls: outcome.total_lmo_calls,
        wall_seconds,
    }
}

fn cell_path(dir: &Path, instance: &str, solver: &str, seed: u64, hash: &str) -> PathBuf {
    dir.join(format!("{instance}__{solver}__s{seed}__{hash}.json"))
}

fn run_cell(
    family: &FamilySpec,
    solver: &str,
    seed: u64,
    config: &SolverConfig,
    hash: &str,
    dir: &Path,
) -> CsvRow {
    let (name, instance) = match family.build(seed) {
        Ok(v) => v,
        Err(e) => {
            return CsvRow {
                instance: format!("{family:?}"),
                solver: solver.to_string(),
                seed,
                status: format!("Error: {e}"),
                primal: f64::INFINITY,
                dual: f64::NEG_INFINITY,
                rel_gap: f64::INFINITY,
                nodes: 0,
                lmo_calls: 0,
                wall_seconds: 0.0,
            }
        }
    };
    let path = cell_path(dir, &name, solver, seed, hash);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(log) = serde_json::from_str::<RunLog>(&text) {
            if let Some(s) = &log.summary {
                return CsvRow {
                    instance: name,
                    solver: solver.to_string(),
                    seed,
                    status: s.status.clone(),
                    primal: s.primal.unwrap_or(f64::INFINITY),
                    dual: s.dual,
                    rel_gap: relative_gap(s.primal, s.dual),
                    nodes: s.nodes,
                    lmo_calls: s.lmo_calls,
                    wall_seconds: s.wall_seconds,
                };
            }
        }
    }
    let start = Instant::now();
    match solve_with(solver, &instance, config) {
        Ok(mut outcome) => {
            let wall = start.elapsed().as_secs_f64();
            outcome.log.header = RunHeader {
                instance: name.clone(),
                solver: solver.to_string(),
                config_hash: hash.to_string(),
                seed,
            };
            let tmp = path.with_extension("json.tmp");
            let write = serde_json::to_string_pretty(&outcome.log)
                .map_err(SolverError::from)
                .and_then(|text| fs::write(&tmp, text).map_err(SolverError::from))
                .and_then(|_| fs::rename(&tmp, &path).map_err(SolverError::from));
            if let Err(e) = write {
                eprintln!("warning: failed to persist {}: {e}", path.display());
            }
            outcome_to_row(&name, solver, seed, &outcome, wall)
        }
        Err(e) => CsvRow {
            instance: name,
            solver: solver.to_string(),
            seed,
            status: format!("Error: {e}"),
            primal: f64::INFINITY,
            dual: f64::NEG_INFINITY,
            rel_gap: f64::INFINITY,
            nodes: 0,
            lmo_calls: 0,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    }
}

/// Runs every (family, seed, solver) cell, writing one RunLog JSON per cell
/// and a consolidated results.csv. Cells whose log already exists are reused,
/// so interrupted grids resume where they stopped.
pub fn run_grid(spec: &GridSpec, out_dir: &Path, jobs: usize) -> Result<Vec<CsvRow>> {
    fs::create_dir_all(out_dir)?;
    let mut config = spec.config.clone();
    if config.time_limit.is_none() {
        config.time_limit = Some(spec.time_limit);
    }
    let hash = config_hash(&config);
    let mut cells = Vec::new();
    for family in &spec.families {
        for &seed in &spec.seeds {
            for solver in &spec.solvers {
                cells.push((family, seed, solver.as_str()));
            }
        }
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, CsvRow)>> = Mutex::new(Vec::new());
    let workers = jobs.max(1).min(cells.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= cells.len() {
                    break;
                }
                let (family, seed, solver) = cells[i];
                let row = run_cell(family, solver, seed, &config, &hash, out_dir);
                results.lock().unwrap().push((i, row));
            });
        }
    });
    let mut rows = results.into_inner().unwrap();
    rows.sort_by_key(|(i, _)| *i);
    let rows: Vec<CsvRow> = rows.into_iter().map(|(_, r)| r).collect();
    fs::write(out_dir.join("results.csv"), emit_csv(&rows))?;
    Ok(rows)
}

/// Rebuilds the CSV rows from the RunLog files in a results directory.
pub fn load_results(dir: &Path) -> Result<Vec<CsvRow>> {
    let csv = dir.join("results.csv");
    let text = fs::read_to_string(&csv)
        .map_err(|e| SolverError::Argument(format!("cannot read {}: {e}", csv.display())))?;
    parse_csv(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geomean_two_elements() {
        let g = shifted_geomean(&[1.0, 9.0], 1.0).unwrap();
        assert!((g - (20.0f64.sqrt() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn geomean_constant_is_fixed_point() {
        for shift in [0.0, 1.0, 10.0] {
            let g = shifted_geomean(&[3.0, 3.0, 3.0], shift).unwrap();
            assert!((g - 3.0).abs() < 1e-12, "shift {shift}: {g}");
        }
    }

    #[test]
    fn geomean_zero_shift_plain() {
        let g = shifted_geomean(&[2.0, 8.0], 0.0).unwrap();
        assert!((g - 4.0).abs() < 1e-12);
        assert!(shifted_geomean(&[], 1.0).is_err());
    }

    fn row(instance: &str, solver: &str, status: &str, wall: f64) -> CsvRow {
        CsvRow {
            instance: instance.into(),
            solver: solver.into(),
            seed: 1,
            status: status.into(),
            primal: 1.0,
            dual: 1.0,
            rel_gap: 0.0,
            nodes: 3,
            lmo_calls: 7,
            wall_seconds: wall,
        }
    }

    #[test]
    fn csv_round_trip_exact() {
        let rows = vec![
            row("a", "hullfw", "Optimal", 0.125),
            CsvRow {
                instance: "b".into(),
                solver: "oa".into(),
                seed: 42,
                status: "TimeLimit".into(),
                primal: f64::INFINITY,
                dual: -0.3333333333333333,
                rel_gap: f64::INFINITY,
                nodes: 0,
                lmo_calls: 11,
                wall_seconds: 60.0,
            },
        ];
        let text = emit_csv(&rows);
        assert!(text.starts_with(CSV_HEADER));
        let parsed = parse_csv(&text).unwrap();
        assert_eq!(parsed, rows);
        assert!(parse_csv("bogus\n1,2").is_err());
    }

    #[test]
    fn summary_degenerate_bucket() {
        let rows = vec![row("a", "s1", "Optimal", 1.0), row("a", "s2", "Optimal", 1.0)];
        let table = summarize(&rows, &[0.0], 60.0, 1.0).unwrap();
        assert_eq!(table.len(), 2);
        for r in &table {
            assert_eq!(r.instances, 1);
            assert!((r.pct_solved - 100.0).abs() < 1e-12);
            assert!((r.geomean_time - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn summary_counts_timeouts_at_limit() {
        let rows = vec![
            row("a", "s1", "TimeLimit", 60.0),
            row("a", "s2", "TimeLimit", 60.0),
        ];
        let table = summarize(&rows, &[0.0], 60.0, 1.0).unwrap();
        for r in &table {
            assert_eq!(r.solved, 0);
            assert!((r.geomean_time - 60.0).abs() < 1e-9);
        }
    }

    #[test]
    fn summary_buckets_are_nested() {
        let mut rows = Vec::new();
        for (i, w) in [0.5, 5.0, 50.0].iter().enumerate() {
            rows.push(row(&format!("i{i}"), "s1", "Optimal", *w));
            rows.push(row(&format!("i{i}"), "s2", "Optimal", w * 2.0));
        }
        let table = summarize(&rows, &[0.0, 1.0, 10.0], 60.0, 1.0).unwrap();
        let counts: Vec<usize> = table.iter().filter(|r| r.solver == "s1").map(|r| r.instances).collect();
        assert_eq!(counts, vec![3, 2, 1]);
    }

    #[test]
    fn config_hash_is_stable() {
        let a = config_hash(&SolverConfig::default());
        let b = config_hash(&SolverConfig::default());
        assert_eq!(a, b);
        let c = config_hash(&SolverConfig { eps0: 0.5, ..Default::default() });
        assert_ne!(a, c);
    }

    #[test]
    fn run_log_timestamps_are_monotone() {
        let mut log = RunLog::new(RunHeader {
            instance: "x".into(),
            solver: "hullfw".into(),
            config_hash: "h".into(),
            seed: 0,
        });
        for i in 0..5 {
            log.push(EventKind::NodeInfeasible { id: i });
        }
        log.finish("Optimal", Some(1.0), 1.0, 5, 9, 0.01);
        for pair in log.events.windows(2) {
            assert!(pair[0].seconds <= pair[1].seconds);
        }
        let text = serde_json::to_string(&log).unwrap();
        let back: RunLog = serde_json::from_str(&text).unwrap();
        assert_eq!(back.events.len(), 5);
        assert_eq!(back.summary.unwrap().nodes, 5);
    }

    #[test]
    fn grid_is_idempotent_and_resumable() {
        let dir = tempfile::tempdir().unwrap();
        let spec = GridSpec {
            families: vec![FamilySpec::Portfolio { n: 4, integer_fraction: 1.0 }],
            seeds: vec![1, 2],
            solvers: vec!["hullfw".into()],
            config: SolverConfig::default(),
            time_limit: 30.0,
        };
        let rows = run_grid(&spec, dir.path(), 2).unwrap();
        assert_eq!(rows.len(), 2);
        let logs: Vec<PathBuf> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        assert_eq!(logs.len(), 2);
        // rerun reuses both cells: results identical, no extra files
        let again = run_grid(&spec, dir.path(), 1).unwrap();
        assert_eq!(again.len(), 2);
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!(a.primal, b.primal);
            assert_eq!(a.nodes, b.nodes);
        }
        // delete one log: exactly that cell is recomputed
        fs::remove_file(&logs[0]).unwrap();
        let third = run_grid(&spec, dir.path(), 1).unwrap();
        assert_eq!(third.len(), 2);
        let csv = load_results(dir.path()).unwrap();
        assert_eq!(csv.len(), 2);
    }

    #[test]
    fn empty_grid_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let spec = GridSpec {
            families: vec![],
            seeds: vec![],
            solvers: vec![],
            config: SolverConfig::default(),
            time_limit: 30.0,
        };
        let rows = run_grid(&spec, dir.path(), 4).unwrap();
        assert!(rows.is_empty());
        let text = fs::read_to_string(dir.path().join("results.csv")).unwrap();
        assert_eq!(text.trim(), CSV_HEADER);
    }
}
