//! Serial symmetrical relocation: the global search around the local solver.
//!
//! From a local optimum, every candidate reflects through the container center
//! the `j` highest-energy spheres among the `i` lowest-energy ones
//! (`1 <= j < i <= n`), and is then relaxed by [`a0_solve`]. A scan walks the
//! `n(n-1)/2` candidates in `(i, j)` order and stops the whole search at the
//! first one that relaxes into a packing. Otherwise the lowest-energy outcome
//! of the scan seeds the next one.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::total_energy;
use crate::error::{Error, Result};
use crate::geometry::{
    invert_subset, random_configuration, Configuration, Container, ContainerKind, IndexSet,
};
use crate::solver::{a0_solve, LocalResult, SolverSettings};
use crate::FAKE_RADIUS;

pub const DEFAULT_SCAN_LIMIT: usize = 6;

fn check_count(count: usize, subset: &IndexSet, energies: &[f64]) -> Result<()> {
    if count == 0 || count > subset.len() {
        return Err(Error::invalid(format!(
            "selection size {count} outside 1..={}",
            subset.len()
        )));
    }
    if let Some(&index) = subset.indices().last() {
        if index >= energies.len() {
            return Err(Error::IndexOutOfRange {
                index,
                n: energies.len(),
            });
        }
    }
    Ok(())
}

fn select(
    count: usize,
    subset: &IndexSet,
    energies: &[f64],
    cmp: impl Fn(f64, f64) -> Ordering,
) -> Result<IndexSet> {
    check_count(count, subset, energies)?;
    let mut order = subset.indices().to_vec();
    order.sort_by(|&a, &b| cmp(energies[a], energies[b]).then(a.cmp(&b)));
    order.truncate(count);
    order.sort_unstable();
    Ok(IndexSet::from_sorted_unchecked(order))
}

/// The `count` members of `subset` with the smallest energies; ties go to the lower index.
pub fn min_u(count: usize, subset: &IndexSet, energies: &[f64]) -> Result<IndexSet> {
    select(count, subset, energies, |a, b| a.total_cmp(&b))
}

/// The `count` members of `subset` with the largest energies; ties go to the lower index.
pub fn max_u(count: usize, subset: &IndexSet, energies: &[f64]) -> Result<IndexSet> {
    select(count, subset, energies, |a, b| b.total_cmp(&a))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCandidate {
    /// 1-based, as in the `(i, j)` enumeration.
    pub i: usize,
    pub j: usize,
    /// Spheres to reflect.
    pub subset: IndexSet,
}

/// All `n(n-1)/2` candidates for one scan, in lexicographic `(i, j)` order.
/// Energies come from `x_local` itself and are computed once.
pub fn scan_candidates(x_local: &Configuration, container: &Container) -> Vec<ScanCandidate> {
    let n = x_local.len();
    if n < 2 {
        return Vec::new();
    }
    let energies = total_energy(x_local, container).per_sphere;
    candidates_from_energies(&energies)
}

pub(crate) fn candidates_from_energies(energies: &[f64]) -> Vec<ScanCandidate> {
    let n = energies.len();
    let all = IndexSet::full(n);
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 1..=n {
        let low = min_u(i, &all, energies).expect("1 <= i <= n");
        // maxU(j, low) is the j-prefix of `low` ranked by descending energy
        let mut ranked = low.indices().to_vec();
        ranked.sort_by(|&a, &b| energies[b].total_cmp(&energies[a]).then(a.cmp(&b)));
        for j in 1..i {
            let mut subset = ranked[..j].to_vec();
            subset.sort_unstable();
            out.push(ScanCandidate {
                i,
                j,
                subset: IndexSet::from_sorted_unchecked(subset),
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub n: usize,
    pub kind: ContainerKind,
    pub r0_estimate: f64,
    pub seed: u64,
    pub scan_limit: usize,
    pub settings: SolverSettings,
    /// Worker threads for candidate evaluation; the outcome does not depend on it.
    pub threads: usize,
}

impl SearchParams {
    pub fn new(n: usize, kind: ContainerKind, r0_estimate: f64, seed: u64) -> Self {
        SearchParams {
            n,
            kind,
            r0_estimate,
            seed,
            scan_limit: DEFAULT_SCAN_LIMIT,
            settings: SolverSettings::default(),
            threads: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchState {
    pub current_local: Configuration,
    pub current_energy: f64,
    pub best_found: Configuration,
    pub best_energy: f64,
    pub scan_count: usize,
    /// Set when some relaxation reached a packing.
    pub packed: Option<Configuration>,
    /// Lowest energy reached in each completed or interrupted scan.
    pub scan_best_energies: Vec<f64>,
    pub a0_calls: u64,
    pub a0_iterations: u64,
}

impl SearchState {
    /// The configuration handed to the radius search.
    pub fn found(&self) -> &Configuration {
        self.packed.as_ref().unwrap_or(&self.best_found)
    }

    fn absorb(&mut self, res: &LocalResult) {
        self.a0_calls += 1;
        self.a0_iterations += res.iterations;
        if res.final_energy < self.best_energy {
            self.best_energy = res.final_energy;
            self.best_found = res.configuration.clone();
        }
    }
}

/// One run of the relocation search at the fixed container radius `r0_estimate`,
/// with fake spheres of radius [`FAKE_RADIUS`].
pub fn a1_search(params: &SearchParams) -> Result<SearchState> {
    params.settings.validate()?;
    if params.n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let container = Container::new(params.kind, params.r0_estimate)?;
    let settings = &params.settings;

    let start = random_configuration(params.n, &container, FAKE_RADIUS, params.seed)?;
    let first = a0_solve(&start, &container, settings);
    let mut state = SearchState {
        current_local: first.configuration.clone(),
        current_energy: first.final_energy,
        best_found: first.configuration.clone(),
        best_energy: first.final_energy,
        scan_count: 0,
        packed: None,
        scan_best_energies: Vec::new(),
        a0_calls: 1,
        a0_iterations: first.iterations,
    };
    if first.is_packed() {
        state.packed = Some(first.configuration);
        return Ok(state);
    }

    let pool = if params.threads > 1 {
        Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(params.threads)
                .build()
                .map_err(|e| Error::invalid(format!("thread pool: {e}")))?,
        )
    } else {
        None
    };
    let chunk = params.threads.max(1) * 2;

    while state.scan_count < params.scan_limit {
        let candidates = scan_candidates(&state.current_local, &container);
        if candidates.is_empty() {
            break;
        }
        let origin = state.current_local.clone();
        let relax = |c: &ScanCandidate| -> LocalResult {
            let moved = invert_subset(&c.subset, &origin).expect("valid subset");
            a0_solve(&moved, &container, settings)
        };
        let mut scan_best: Option<LocalResult> = None;
        let mut hit: Option<LocalResult> = None;
        for batch in candidates.chunks(chunk) {
            let results: Vec<LocalResult> = match &pool {
                Some(pool) => pool.install(|| batch.par_iter().map(relax).collect()),
                None => batch.iter().map(relax).collect(),
            };
            // commit strictly in candidate order
            for res in results {
                state.absorb(&res);
                if res.is_packed() {
                    hit = Some(res);
                    break;
                }
                if scan_best.as_ref().is_none_or(|b| res.final_energy < b.final_energy) {
                    scan_best = Some(res);
                }
            }
            if hit.is_some() {
                break;
            }
        }
        state.scan_count += 1;
        if let Some(res) = hit {
            state.scan_best_energies.push(res.final_energy);
            state.packed = Some(res.configuration);
            return Ok(state);
        }
        let best = scan_best.expect("non-empty scan");
        state.scan_best_energies.push(best.final_energy);
        state.current_energy = best.final_energy;
        state.current_local = best.configuration;
    }
    Ok(state)
}
