//! Bisection on the container radius.
//!
//! Starting from `[r0/2, 2 r0]`, each probe relaxes the packing held at the
//! upper end inside the midpoint radius, moving the upper end down on success
//! and the lower end up on failure, until the bracket is at most `eps` wide.
//! A failed probe leaves nothing behind: its squeezed configuration is dropped.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Container, ContainerKind};
use crate::solver::{a0_solve, SolverSettings};
use crate::verify::{verify_exact, Certificate};
use crate::STANDARD_RADIUS;

pub const DEFAULT_EPSILON: f64 = 1e-12;
/// How often an infeasible upper bound is doubled before giving up.
pub const MAX_UPPER_DOUBLINGS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub r0: f64,
    pub packed: bool,
    pub energy: f64,
    pub low: f64,
    pub up: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    /// Centers at the standard radius 0.5.
    pub dense_packing: Configuration,
    pub r0_min: f64,
    /// `0.5 / r0_min`
    pub ratio: f64,
    pub kind: ContainerKind,
    pub search_iterations: usize,
    /// The bracket actually searched, after any doubling of the upper end.
    pub initial_low: f64,
    pub initial_up: f64,
    pub probes: Vec<Probe>,
    pub certificate: Certificate,
}

/// `ceil(log2((up - low) / eps)) + 1`
pub fn iteration_bound(low: f64, up: f64, eps: f64) -> usize {
    ((up - low) / eps).log2().ceil().max(0.0) as usize + 1
}

/// Smallest container radius in which `x_found` develops into a packing.
///
/// The configuration carries the (fake) sphere radius used for every probe.
pub fn binary_search_radius(
    x_found: &Configuration,
    kind: ContainerKind,
    r0_start: f64,
    eps: f64,
    settings: &SolverSettings,
) -> Result<SolveOutcome> {
    settings.validate()?;
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let mut start = Container::new(kind, r0_start)?.r0();

    let mut doublings = 0;
    let mut packed_at_up = loop {
        let check = a0_solve(x_found, &Container::new(kind, 2.0 * start)?, settings);
        if check.is_packed() {
            break check.configuration;
        }
        if doublings == MAX_UPPER_DOUBLINGS {
            return Err(Error::UpperBoundInfeasible {
                r0_up: 2.0 * start,
                doublings,
            });
        }
        doublings += 1;
        start *= 2.0;
    };

    let mut low = 0.5 * start;
    let mut up = 2.0 * start;
    let (initial_low, initial_up) = (low, up);
    let mut probes = Vec::new();
    while up - low > eps {
        let mid = 0.5 * (up + low);
        if mid <= low || mid >= up {
            break;
        }
        let res = a0_solve(&packed_at_up, &Container::new(kind, mid)?, settings);
        let packed = res.is_packed();
        if packed {
            up = mid;
            packed_at_up = res.configuration;
        } else {
            low = mid;
        }
        debug_assert!(low < up);
        debug_assert_eq!(packed, up == mid);
        probes.push(Probe {
            r0: mid,
            packed,
            energy: res.final_energy,
            low,
            up,
        });
    }
    let r0_min = up;
    let dense_packing = packed_at_up.with_radius(STANDARD_RADIUS)?;
    let certificate = verify_exact(&dense_packing, r0_min, kind);
    if !certificate.valid {
        return Err(Error::CertificationFailed { r0: r0_min });
    }
    Ok(SolveOutcome {
        dense_packing,
        r0_min,
        ratio: STANDARD_RADIUS / r0_min,
        kind,
        search_iterations: probes.len(),
        initial_low,
        initial_up,
        probes,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point3;
    use crate::FAKE_RADIUS;

    #[test]
    fn single_sphere_shrinks_to_its_radius() {
        let x = Configuration::new(vec![Point3::ORIGIN], FAKE_RADIUS).unwrap();
        let out =
            binary_search_radius(&x, ContainerKind::Sphere, 1.0, DEFAULT_EPSILON, &SolverSettings::default())
                .unwrap();
        // The sub-threshold energy tolerance absorbs the 1e-8 inflation, so the
        // limit is the standard radius itself.
        assert!(out.r0_min > 0.5 && out.r0_min <= 0.5 + 1e-8, "{}", out.r0_min);
        assert!(out.r0_min - 0.5 < 1e-11);
        assert!(out.certificate.valid);
        assert!(out.search_iterations <= iteration_bound(0.5, 2.0, DEFAULT_EPSILON));
    }

    #[test]
    fn two_spheres_reach_half_ratio() {
        let x = Configuration::new(
            vec![Point3::new(0.3, 0.1, 0.0), Point3::new(-0.2, -0.1, 0.05)],
            FAKE_RADIUS,
        )
        .unwrap();
        let out =
            binary_search_radius(&x, ContainerKind::Sphere, 1.2, DEFAULT_EPSILON, &SolverSettings::default())
                .unwrap();
        assert!((out.ratio - 0.5).abs() < 1e-6, "{}", out.ratio);
        for p in &out.probes {
            assert_eq!(p.packed, p.up == p.r0);
            assert_eq!(!p.packed, p.low == p.r0);
        }
    }

    #[test]
    fn undersized_start_is_doubled() {
        let x = Configuration::new(
            vec![Point3::new(0.1, 0.05, 0.02), Point3::new(-0.1, 0.03, -0.04)],
            FAKE_RADIUS,
        )
        .unwrap();
        let out =
            binary_search_radius(&x, ContainerKind::Cube, 0.2, 1e-9, &SolverSettings::default()).unwrap();
        assert_eq!(out.initial_up, 0.8);
        assert!((out.ratio - 0.63397459).abs() < 1e-5, "{}", out.ratio);
    }

    #[test]
    fn hopeless_start_is_reported() {
        let x = Configuration::new(vec![Point3::ORIGIN; 3], FAKE_RADIUS).unwrap();
        let s = SolverSettings {
            max_iterations: 1,
            ..SolverSettings::default()
        };
        let err = binary_search_radius(&x, ContainerKind::Sphere, 1e-4, 1e-12, &s).unwrap_err();
        assert!(matches!(err, Error::UpperBoundInfeasible { doublings: 8, .. }));
    }

    #[test]
    fn bound_formula() {
        assert_eq!(iteration_bound(0.5, 2.0, 1e-12), 42);
        assert_eq!(iteration_bound(1.0, 2.0, 1.0), 1);
    }
}
