//! Local energy minimization.
//!
//! [`a0_solve`] drives `U` toward zero by monotone descent and reports whether
//! the configuration became a packing (`U` below the success threshold). Every
//! accepted step strictly lowers `U`, and the whole run is deterministic.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::energy::Evaluator;
use crate::error::{Error, Result};
use crate::geometry::{Configuration, Container};
use crate::PACKED_ENERGY_THRESHOLD;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DescentMethod {
    /// Steepest descent; the step grows after an accepted move and shrinks on rejection.
    SteepestDescent,
    /// Limited-memory BFGS with Armijo backtracking.
    Lbfgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub success_threshold: f64,
    /// Iteration budget for up to 10 spheres; larger instances get `n / 10` times as much.
    pub max_iterations: u64,
    pub stall_gradient_norm: f64,
    /// First trial step length, as a fraction of the container radius.
    pub initial_step: f64,
    pub step_shrink: f64,
    pub step_grow: f64,
    pub method: DescentMethod,
    /// Correction pairs kept by L-BFGS.
    pub memory: usize,
    /// Stop as stalled when `U` fell by less than `stall_relative_decrease * U`
    /// over the last `stall_window` iterations.
    pub stall_window: usize,
    pub stall_relative_decrease: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            success_threshold: PACKED_ENERGY_THRESHOLD,
            max_iterations: 2_000_000,
            stall_gradient_norm: 1e-14,
            initial_step: 1e-2,
            step_shrink: 0.5,
            step_grow: 1.2,
            method: DescentMethod::Lbfgs,
            memory: 8,
            stall_window: 100,
            stall_relative_decrease: 1e-5,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.success_threshold > 0.0) {
            return Err(Error::invalid("success_threshold must be positive"));
        }
        if !(0.0 < self.step_shrink && self.step_shrink < 1.0 && 1.0 < self.step_grow) {
            return Err(Error::invalid("need 0 < step_shrink < 1 < step_grow"));
        }
        if !(self.initial_step > 0.0) {
            return Err(Error::invalid("initial_step must be positive"));
        }
        if self.method == DescentMethod::Lbfgs && self.memory == 0 {
            return Err(Error::invalid("L-BFGS memory must be at least 1"));
        }
        Ok(())
    }

    pub fn iteration_budget(&self, n: usize) -> u64 {
        self.max_iterations
            .max(self.max_iterations.saturating_mul(n as u64) / 10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocalStatus {
    Packed,
    Stalled,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub configuration: Configuration,
    pub final_energy: f64,
    pub iterations: u64,
    pub status: LocalStatus,
}

impl LocalResult {
    pub fn is_packed(&self) -> bool {
        self.status == LocalStatus::Packed
    }
}

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct Correction {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Two-loop recursion: returns `-H g`.
fn lbfgs_direction(g: &[f64], history: &VecDeque<Correction>, alpha: &mut Vec<f64>) -> Vec<f64> {
    let mut q = g.to_vec();
    alpha.clear();
    for c in history.iter().rev() {
        let a = c.rho * dot(&c.s, &q);
        for (qk, yk) in q.iter_mut().zip(&c.y) {
            *qk -= a * yk;
        }
        alpha.push(a);
    }
    if let Some(last) = history.back() {
        let gamma = dot(&last.s, &last.y) / dot(&last.y, &last.y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for (c, a) in history.iter().zip(alpha.iter().rev()) {
        let b = c.rho * dot(&c.y, &q);
        for (qk, sk) in q.iter_mut().zip(&c.s) {
            *qk += (a - b) * sk;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimizes `U` from `config` inside `container` at the configuration's sphere radius.
pub fn a0_solve(config: &Configuration, container: &Container, settings: &SolverSettings) -> LocalResult {
    let r = config.radius();
    let n = config.len();
    let mut eval = Evaluator::new(*container, r, n);
    let mut x = config.to_flat();
    let mut g = vec![0.0; x.len()];
    let mut f = eval.eval(&x, Some(&mut g));
    let finish = |x: &[f64], f: f64, iterations: u64, status: LocalStatus| LocalResult {
        configuration: Configuration::from_flat(x, r),
        final_energy: f,
        iterations,
        status,
    };
    if f < settings.success_threshold {
        return finish(&x, f, 0, LocalStatus::Packed);
    }

    let budget = settings.iteration_budget(n);
    // no single step may carry a center further than this
    let max_move = r;
    let first_step = settings.initial_step * container.r0();
    let mut history: VecDeque<Correction> = VecDeque::with_capacity(settings.memory);
    let mut alpha_buf = Vec::with_capacity(settings.memory);
    let mut recent = VecDeque::with_capacity(settings.stall_window + 1);
    recent.push_back(f);
    let mut sd_alpha = first_step / dot(&g, &g).sqrt();

    let mut x_trial = vec![0.0; x.len()];
    let mut g_trial = vec![0.0; x.len()];
    let mut iteration = 0u64;
    while iteration < budget {
        iteration += 1;
        let lbfgs = settings.method == DescentMethod::Lbfgs;
        let (mut dir, mut alpha) = if lbfgs && !history.is_empty() {
            (lbfgs_direction(&g, &history, &mut alpha_buf), 1.0)
        } else if lbfgs {
            (g.iter().map(|v| -v).collect(), first_step / dot(&g, &g).sqrt())
        } else {
            (g.iter().map(|v| -v).collect(), sd_alpha)
        };
        let mut slope = dot(&g, &dir);
        if !(slope < 0.0) {
            history.clear();
            dir = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
            alpha = first_step / (-slope).sqrt();
        }
        let longest = max_abs(&dir) * alpha;
        if longest > max_move {
            alpha *= max_move / longest;
        }

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            for k in 0..x.len() {
                x_trial[k] = x[k] + alpha * dir[k];
            }
            let f_trial = eval.eval(&x_trial, Some(&mut g_trial));
            if f_trial < f && f_trial <= f + ARMIJO * alpha * slope {
                accepted = Some(f_trial);
                break;
            }
            alpha *= settings.step_shrink;
        }
        let Some(f_new) = accepted else {
            if !history.is_empty() {
                history.clear();
                continue;
            }
            return finish(&x, f, iteration - 1, LocalStatus::Stalled);
        };

        if lbfgs {
            let s: Vec<f64> = x_trial.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = g_trial.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&y, &y).sqrt() * dot(&s, &s).sqrt() && sy > 0.0 {
                if history.len() == settings.memory {
                    history.pop_front();
                }
                history.push_back(Correction { s, y, rho: 1.0 / sy });
            }
        } else {
            sd_alpha = alpha * settings.step_grow;
        }
        std::mem::swap(&mut x, &mut x_trial);
        std::mem::swap(&mut g, &mut g_trial);
        f = f_new;

        if f < settings.success_threshold {
            return finish(&x, f, iteration, LocalStatus::Packed);
        }
        if dot(&g, &g).sqrt() < settings.stall_gradient_norm {
            return finish(&x, f, iteration, LocalStatus::Stalled);
        }
        recent.push_back(f);
        if recent.len() > settings.stall_window {
            let old = recent.pop_front().unwrap_or(f);
            if old - f <= settings.stall_relative_decrease * old {
                return finish(&x, f, iteration, LocalStatus::Stalled);
            }
        }
    }
    finish(&x, f, iteration, LocalStatus::IterationLimit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::total_energy;
    use crate::geometry::{random_configuration, ContainerKind, Point3};
    use crate::FAKE_RADIUS;

    fn both_methods() -> [SolverSettings; 2] {
        [
            SolverSettings::default(),
            SolverSettings {
                method: DescentMethod::SteepestDescent,
                ..SolverSettings::default()
            },
        ]
    }

    #[test]
    fn settings_validation() {
        assert!(SolverSettings::default().validate().is_ok());
        let bad = SolverSettings {
            step_shrink: 1.0,
            ..SolverSettings::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverSettings {
            success_threshold: 0.0,
            ..SolverSettings::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn budget_scales_with_n() {
        let s = SolverSettings::default();
        assert_eq!(s.iteration_budget(5), 2_000_000);
        assert_eq!(s.iteration_budget(200), 40_000_000);
    }

    #[test]
    fn packing_is_returned_untouched() {
        let c = Container::sphere(2.0).unwrap();
        let x = Configuration::new(vec![Point3::new(-0.5, 0.0, 0.0), Point3::new(0.5, 0.0, 0.0)], 0.5)
            .unwrap();
        for s in both_methods() {
            let res = a0_solve(&x, &c, &s);
            assert_eq!(res.status, LocalStatus::Packed);
            assert_eq!(res.iterations, 0);
            assert_eq!(res.configuration, x);
        }
    }

    #[test]
    fn separates_two_overlapping_spheres() {
        let c = Container::sphere(3.0).unwrap();
        let x = Configuration::new(vec![Point3::new(-0.1, 0.0, 0.0), Point3::new(0.2, 0.0, 0.0)], 0.5)
            .unwrap();
        for s in both_methods() {
            let res = a0_solve(&x, &c, &s);
            assert_eq!(res.status, LocalStatus::Packed, "{:?}", s.method);
            let p = res.configuration.centers();
            assert!(p[1].x - p[0].x >= 1.0 - 1e-8);
            assert_eq!(p[0].y, 0.0);
        }
    }

    #[test]
    fn energy_never_increases_and_runs_are_repeatable() {
        for kind in [ContainerKind::Sphere, ContainerKind::Cube] {
            let c = Container::new(kind, 1.6).unwrap();
            for seed in 0..5 {
                let x = random_configuration(10, &c, FAKE_RADIUS, seed).unwrap();
                let before = total_energy(&x, &c).total;
                for s in both_methods() {
                    let a = a0_solve(&x, &c, &s);
                    let b = a0_solve(&x, &c, &s);
                    assert!(a.final_energy <= before);
                    assert_eq!(a, b);
                    assert_eq!(a.is_packed(), a.final_energy < s.success_threshold);
                }
            }
        }
    }

    #[test]
    fn jammed_instance_stalls() {
        // Four spheres cannot fit in a ball of radius 1.
        let c = Container::sphere(1.0).unwrap();
        let x = random_configuration(4, &c, FAKE_RADIUS, 1).unwrap();
        let res = a0_solve(&x, &c, &SolverSettings::default());
        assert_eq!(res.status, LocalStatus::Stalled);
        assert!(res.final_energy > 1e-4);
    }

    #[test]
    fn iteration_limit_is_reported() {
        let c = Container::sphere(1.0).unwrap();
        let x = random_configuration(4, &c, FAKE_RADIUS, 1).unwrap();
        let s = SolverSettings {
            max_iterations: 3,
            ..SolverSettings::default()
        };
        let res = a0_solve(&x, &c, &s);
        assert_eq!(res.status, LocalStatus::IterationLimit);
        assert_eq!(res.iterations, 3);
    }
}
