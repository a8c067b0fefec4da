//! Exact feasibility certificates.
//!
//! [`verify_exact`] checks containment and non-overlap with plain floating-point
//! comparisons and no slack. [`verify_fake`] checks that the energy with
//! spheres inflated to [`FAKE_RADIUS`] is below the success threshold, which
//! implies the exact check passes at the standard radius.

use serde::{Deserialize, Serialize};

use crate::energy::Evaluator;
use crate::error::Result;
use crate::geometry::{Configuration, Container, ContainerKind};
use crate::records::RecordTable;
use crate::{FAKE_RADIUS, PACKED_ENERGY_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViolationKind {
    Wall,
    Pair,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// 0-based sphere indices: one for a wall violation, two for a pair.
    pub indices: Vec<usize>,
    /// How far the constraint is violated, in length units.
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub valid: bool,
    /// `min_i (r0 - r) - |X_i|`, per axis for a cube.
    pub worst_wall_margin: f64,
    /// `min_{i<j} |X_i - X_j| - 2r`; infinite for a single sphere.
    pub worst_pair_margin: f64,
    /// Margins lowered by a bound on the rounding error of their evaluation.
    pub conservative_wall_margin: f64,
    pub conservative_pair_margin: f64,
    pub violations: Vec<Violation>,
}

impl Certificate {
    /// Valid even after accounting for evaluation rounding.
    pub fn robustly_valid(&self) -> bool {
        self.conservative_wall_margin >= 0.0 && self.conservative_pair_margin >= 0.0
    }
}

/// A few ulps of `v`; covers the rounding of a norm of at most three terms
/// followed by one subtraction.
fn rounding_slack(v: f64) -> f64 {
    4.0 * f64::EPSILON * v.abs().max(f64::MIN_POSITIVE)
}

/// Checks both packing constraints for `config` at its own sphere radius.
pub fn verify_exact(config: &Configuration, r0: f64, kind: ContainerKind) -> Certificate {
    let r = config.radius();
    let limit = r0 - r;
    let mut violations = Vec::new();
    let mut wall = f64::INFINITY;
    let mut wall_lo = f64::INFINITY;
    for (i, c) in config.centers().iter().enumerate() {
        let reach = match kind {
            ContainerKind::Sphere => c.norm(),
            ContainerKind::Cube => c.x.abs().max(c.y.abs()).max(c.z.abs()),
        };
        let margin = limit - reach;
        wall = wall.min(margin);
        wall_lo = wall_lo.min(margin - rounding_slack(r0) - rounding_slack(reach));
        if margin < 0.0 {
            violations.push(Violation {
                kind: ViolationKind::Wall,
                indices: vec![i],
                magnitude: -margin,
            });
        }
    }
    let mut pair = f64::INFINITY;
    let mut pair_lo = f64::INFINITY;
    let two_r = 2.0 * r;
    let centers = config.centers();
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            let dist = centers[i].distance(centers[j]);
            let margin = dist - two_r;
            pair = pair.min(margin);
            pair_lo = pair_lo.min(margin - rounding_slack(dist));
            if margin < 0.0 {
                violations.push(Violation {
                    kind: ViolationKind::Pair,
                    indices: vec![i, j],
                    magnitude: -margin,
                });
            }
        }
    }
    Certificate {
        valid: wall >= 0.0 && pair >= 0.0,
        worst_wall_margin: wall,
        worst_pair_margin: pair,
        conservative_wall_margin: wall_lo,
        conservative_pair_margin: pair_lo,
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FakeCheck {
    pub certified: bool,
    /// `U` at the inflated radius.
    pub energy: f64,
}

/// Energy test at the inflated radius, whatever radius `config` carries.
pub fn verify_fake(config: &Configuration, r0: f64, kind: ContainerKind) -> Result<FakeCheck> {
    let container = Container::new(kind, r0)?;
    let mut eval = Evaluator::new(container, FAKE_RADIUS, config.len());
    let energy = eval.eval(&config.to_flat(), None);
    Ok(FakeCheck {
        certified: energy < PACKED_ENERGY_THRESHOLD,
        energy,
    })
}

/// `ratio - reference`; positive means denser than the reference.
pub fn compare_to_record(
    table: &RecordTable,
    n: usize,
    kind: ContainerKind,
    ratio: f64,
) -> Result<f64> {
    Ok(ratio - table.get(n, kind)?)
}
