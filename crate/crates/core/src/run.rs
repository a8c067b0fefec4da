//! End-to-end runs: relocation search followed by the radius bisection, and
//! the best-of-several-seeds protocol used by the command line.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ContainerKind;
use crate::radius::{binary_search_radius, SolveOutcome, DEFAULT_EPSILON};
use crate::records::{density_r0_estimate, RecordTable};
use crate::solver::SolverSettings;
use crate::strategy::{a1_search, SearchParams, DEFAULT_SCAN_LIMIT};

/// Environment variable holding the worker count for candidate evaluation.
pub const THREADS_ENV: &str = "SPHEREPACK_THREADS";

pub fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&t: &usize| t >= 1)
        .unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub kind: ContainerKind,
    /// Search radius; taken from the record table when absent.
    pub r0_estimate: Option<f64>,
    pub seed: u64,
    pub scan_limit: usize,
    pub eps: f64,
    pub settings: SolverSettings,
    #[serde(skip, default = "one")]
    pub threads: usize,
}

fn one() -> usize {
    1
}

impl RunConfig {
    pub fn new(n: usize, kind: ContainerKind) -> Self {
        RunConfig {
            n,
            kind,
            r0_estimate: None,
            seed: 0,
            scan_limit: DEFAULT_SCAN_LIMIT,
            eps: DEFAULT_EPSILON,
            settings: SolverSettings::default(),
            threads: 1,
        }
    }

    pub fn resolve_r0(&self, table: &RecordTable) -> f64 {
        self.r0_estimate
            .or_else(|| table.r0_estimate(self.n, self.kind))
            .unwrap_or_else(|| density_r0_estimate(self.n, self.kind))
    }
}

/// Everything needed to audit and replay one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub n: usize,
    pub kind: ContainerKind,
    pub seed: u64,
    pub r0_estimate: f64,
    pub scan_limit: usize,
    pub eps: f64,
    pub settings: SolverSettings,
    pub found_packing_in_search: bool,
    pub scan_count: usize,
    pub scan_best_energies: Vec<f64>,
    pub a0_calls: u64,
    pub a0_iterations: u64,
    pub ratio: f64,
    pub r0_min: f64,
    pub search_iterations: usize,
    /// Excluded from any determinism comparison.
    pub wall_clock_secs: f64,
    pub centers: Vec<[f64; 3]>,
}

impl RunReport {
    /// Identical runs agree on every field except timing.
    pub fn same_outcome(&self, other: &RunReport) -> bool {
        let mut a = self.clone();
        a.wall_clock_secs = other.wall_clock_secs;
        a == *other
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// The run configuration that reproduces this report.
    pub fn replay_config(&self) -> RunConfig {
        RunConfig {
            n: self.n,
            kind: self.kind,
            r0_estimate: Some(self.r0_estimate),
            seed: self.seed,
            scan_limit: self.scan_limit,
            eps: self.eps,
            settings: self.settings,
            threads: 1,
        }
    }
}

/// Report path written next to a packing file.
pub fn report_path(packing_path: &Path) -> PathBuf {
    let mut s = packing_path.as_os_str().to_owned();
    s.push(".report.json");
    PathBuf::from(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: SolveOutcome,
    pub report: RunReport,
}

/// One seeded run.
pub fn solve_once(cfg: &RunConfig, table: &RecordTable) -> Result<RunResult> {
    let clock = Instant::now();
    let r0_estimate = cfg.resolve_r0(table);
    let params = SearchParams {
        n: cfg.n,
        kind: cfg.kind,
        r0_estimate,
        seed: cfg.seed,
        scan_limit: cfg.scan_limit,
        settings: cfg.settings,
        threads: cfg.threads.max(1),
    };
    let state = a1_search(&params)?;
    let outcome = binary_search_radius(state.found(), cfg.kind, r0_estimate, cfg.eps, &cfg.settings)?;
    let report = RunReport {
        n: cfg.n,
        kind: cfg.kind,
        seed: cfg.seed,
        r0_estimate,
        scan_limit: cfg.scan_limit,
        eps: cfg.eps,
        settings: cfg.settings,
        found_packing_in_search: state.packed.is_some(),
        scan_count: state.scan_count,
        scan_best_energies: state.scan_best_energies,
        a0_calls: state.a0_calls,
        a0_iterations: state.a0_iterations,
        ratio: outcome.ratio,
        r0_min: outcome.r0_min,
        search_iterations: outcome.search_iterations,
        wall_clock_secs: clock.elapsed().as_secs_f64(),
        centers: outcome
            .dense_packing
            .centers()
            .iter()
            .map(|c| c.to_array())
            .collect(),
    };
    Ok(RunResult { outcome, report })
}

#[derive(Debug)]
pub struct BestOf {
    pub best: RunResult,
    /// Per-run ratio, or the error message of a failed run, in seed order.
    pub runs: Vec<(u64, std::result::Result<f64, String>)>,
}

/// Runs seeds `cfg.seed, cfg.seed + 1, ...` and keeps the densest packing
/// (earliest seed on ties).
pub fn solve_best_of(cfg: &RunConfig, runs: usize, table: &RecordTable) -> Result<BestOf> {
    if runs == 0 {
        return Err(Error::invalid("runs must be at least 1"));
    }
    let mut best: Option<RunResult> = None;
    let mut log = Vec::with_capacity(runs);
    let mut last_err = None;
    for k in 0..runs as u64 {
        let seed = cfg.seed.wrapping_add(k);
        let run_cfg = RunConfig { seed, ..cfg.clone() };
        match solve_once(&run_cfg, table) {
            Ok(res) => {
                log.push((seed, Ok(res.outcome.ratio)));
                if best.as_ref().is_none_or(|b| res.outcome.ratio > b.outcome.ratio) {
                    best = Some(res);
                }
            }
            Err(e) => {
                log.push((seed, Err(e.to_string())));
                last_err = Some(e);
            }
        }
    }
    match best {
        Some(best) => Ok(BestOf { best, runs: log }),
        None => Err(last_err.expect("at least one run")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_path_appends_suffix() {
        assert_eq!(
            report_path(Path::new("out/p13.txt")),
            PathBuf::from("out/p13.txt.report.json")
        );
    }

    #[test]
    fn zero_spheres_is_an_error() {
        let cfg = RunConfig::new(0, ContainerKind::Cube);
        assert!(matches!(
            solve_once(&cfg, &RecordTable::bundled()),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn r0_resolution_order() {
        let t = RecordTable::bundled();
        let mut cfg = RunConfig::new(2, ContainerKind::Sphere);
        assert!((cfg.resolve_r0(&t) - crate::records::ESTIMATE_SLACK).abs() < 1e-12);
        cfg.r0_estimate = Some(3.0);
        assert_eq!(cfg.resolve_r0(&t), 3.0);
        let cfg = RunConfig::new(2, ContainerKind::Sphere);
        let est = cfg.resolve_r0(&RecordTable::default());
        assert_eq!(est, density_r0_estimate(2, ContainerKind::Sphere));
    }

    #[test]
    fn report_round_trips_and_replays() {
        let t = RecordTable::bundled();
        let mut cfg = RunConfig::new(4, ContainerKind::Cube);
        cfg.seed = 9;
        let first = solve_once(&cfg, &t).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        first.report.save(&path).unwrap();
        let loaded = RunReport::load(&path).unwrap();
        assert_eq!(loaded, first.report);
        let again = solve_once(&loaded.replay_config(), &t).unwrap();
        assert!(again.report.same_outcome(&first.report));
    }

    #[test]
    fn zero_runs_rejected() {
        let t = RecordTable::bundled();
        assert!(solve_best_of(&RunConfig::new(2, ContainerKind::Sphere), 0, &t).is_err());
    }
}
