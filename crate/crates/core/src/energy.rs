//! Overlap deformations and the potential energy `U` of a configuration.
//!
//! `U` is the sum over spheres of the squared wall deformation plus the squared
//! pair deformations, taken over ordered pairs: every overlapping unordered
//! pair contributes twice. `U` is continuously differentiable except where two
//! centers coincide, and it vanishes exactly on packings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, Container, ContainerKind, Point3};
use crate::grid::CellGrid;

/// Below this many spheres the all-pairs loop beats building a cell list.
pub const GRID_MIN_SPHERES: usize = 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    pub per_sphere: Vec<f64>,
    pub max_container_deformation: f64,
    pub max_pair_deformation: f64,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

/// Wall deformation of one sphere. For a cube this is the Euclidean norm of the
/// per-axis overflow, so its square is the sum of squared axis overflows.
pub fn container_deformation(center: Point3, r: f64, container: &Container) -> f64 {
    wall_term(&center.to_array(), r, container, None).sqrt()
}

/// Half the mutual overlap depth of two spheres of radius `r`.
pub fn pair_deformation(a: Point3, b: Point3, r: f64) -> f64 {
    0.5 * (2.0 * r - a.distance(b)).max(0.0)
}

/// Squared wall deformation of the sphere at `p`; adds its gradient into `grad`.
#[inline]
fn wall_term(p: &[f64], r: f64, container: &Container, grad: Option<&mut [f64]>) -> f64 {
    let r0 = container.r0();
    match container.kind() {
        ContainerKind::Sphere => {
            let norm = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            let d = norm + r - r0;
            if d <= 0.0 {
                return 0.0;
            }
            if let Some(g) = grad {
                if norm > 0.0 {
                    let s = 2.0 * d / norm;
                    for a in 0..3 {
                        g[a] += s * p[a];
                    }
                }
            }
            d * d
        }
        ContainerKind::Cube => {
            let mut sq = 0.0;
            let mut g = grad;
            for a in 0..3 {
                let o = p[a].abs() + r - r0;
                if o > 0.0 {
                    sq += o * o;
                    if let Some(g) = g.as_deref_mut() {
                        if p[a] != 0.0 {
                            g[a] += 2.0 * o * p[a].signum();
                        }
                    }
                }
            }
            sq
        }
    }
}

/// Visits every unordered pair `(i, j)` whose centers are closer than `2r`,
/// passing the separation vector `c_i - c_j` and its length.
fn for_each_overlap(
    coords: &[f64],
    r: f64,
    grid: Option<&mut CellGrid>,
    mut f: impl FnMut(usize, usize, [f64; 3], f64),
) {
    let n = coords.len() / 3;
    let reach = 2.0 * r;
    let reach_sq = reach * reach;
    let mut visit = |i: usize, j: usize| {
        let (a, b) = (&coords[3 * i..3 * i + 3], &coords[3 * j..3 * j + 3]);
        let dx = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        let dist_sq = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
        if dist_sq < reach_sq {
            let dist = dist_sq.sqrt();
            if dist < reach {
                f(i, j, dx, dist);
            }
        }
    };
    if let Some(grid) = grid {
        if grid.rebuild(coords, reach) {
            grid.for_each_candidate_pair(|i, j| if i < j { visit(i, j) } else { visit(j, i) });
            return;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            visit(i, j);
        }
    }
}

/// Reusable evaluator of `U` and its gradient over packed `3n` coordinates.
#[derive(Debug, Clone)]
pub(crate) struct Evaluator {
    container: Container,
    r: f64,
    grid: Option<CellGrid>,
}

impl Evaluator {
    pub(crate) fn new(container: Container, r: f64, n: usize) -> Self {
        Evaluator {
            container,
            r,
            grid: (n >= GRID_MIN_SPHERES).then(CellGrid::default),
        }
    }

    #[cfg(test)]
    pub(crate) fn with_grid(container: Container, r: f64, use_grid: bool) -> Self {
        Evaluator {
            container,
            r,
            grid: use_grid.then(CellGrid::default),
        }
    }

    /// Returns `U`; when `grad` is given it is overwritten with `dU/dx`.
    pub(crate) fn eval(&mut self, coords: &[f64], mut grad: Option<&mut [f64]>) -> f64 {
        let mut total = CompensatedSum::default();
        if let Some(g) = grad.as_deref_mut() {
            g.fill(0.0);
        }
        for (i, p) in coords.chunks_exact(3).enumerate() {
            let g = grad.as_deref_mut().map(|g| &mut g[3 * i..3 * i + 3]);
            let w = wall_term(p, self.r, &self.container, g);
            if w > 0.0 {
                total.add(w);
            }
        }
        let reach = 2.0 * self.r;
        for_each_overlap(coords, self.r, self.grid.as_mut(), |i, j, dx, dist| {
            let overlap = reach - dist;
            // d_ij^2 + d_ji^2 = overlap^2 / 2
            total.add(0.5 * overlap * overlap);
            if let Some(g) = grad.as_deref_mut() {
                if dist > 0.0 {
                    let s = overlap / dist;
                    for a in 0..3 {
                        g[3 * i + a] -= s * dx[a];
                        g[3 * j + a] += s * dx[a];
                    }
                }
            }
        });
        total.value()
    }
}

/// `u_i`: squared wall deformation plus squared deformations from every other sphere.
pub fn sphere_energy(i: usize, config: &Configuration, container: &Container) -> Result<f64> {
    let n = config.len();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let r = config.radius();
    let ci = config.centers()[i];
    let mut u = CompensatedSum::default();
    u.add(wall_term(&ci.to_array(), r, container, None));
    for (j, &cj) in config.centers().iter().enumerate() {
        if j != i {
            let d = pair_deformation(ci, cj, r);
            u.add(d * d);
        }
    }
    Ok(u.value())
}

/// Per-sphere energies and their total.
pub fn total_energy(config: &Configuration, container: &Container) -> EnergyReport {
    let coords = config.to_flat();
    let mut grid = (config.len() >= GRID_MIN_SPHERES).then(CellGrid::default);
    report_from_coords(&coords, config.radius(), container, grid.as_mut())
}

fn report_from_coords(
    coords: &[f64],
    r: f64,
    container: &Container,
    grid: Option<&mut CellGrid>,
) -> EnergyReport {
    let n = coords.len() / 3;
    let mut per_sphere = vec![CompensatedSum::default(); n];
    let mut max_wall: f64 = 0.0;
    for (i, p) in coords.chunks_exact(3).enumerate() {
        let w = wall_term(p, r, container, None);
        per_sphere[i].add(w);
        max_wall = max_wall.max(w.sqrt());
    }
    let mut max_pair: f64 = 0.0;
    for_each_overlap(coords, r, grid, |i, j, _, dist| {
        let d = 0.5 * (2.0 * r - dist);
        per_sphere[i].add(d * d);
        per_sphere[j].add(d * d);
        max_pair = max_pair.max(d);
    });
    let per_sphere: Vec<f64> = per_sphere.into_iter().map(CompensatedSum::value).collect();
    let mut total = CompensatedSum::default();
    for &u in &per_sphere {
        total.add(u);
    }
    EnergyReport {
        total: total.value(),
        per_sphere,
        max_container_deformation: max_wall,
        max_pair_deformation: max_pair,
    }
}

/// `dU/d(x_i, y_i, z_i)` for every sphere, flattened to `3n` values.
/// Terms whose direction is undefined (coincident centers, a center exactly on
/// the symmetry plane of an active cube wall) contribute zero.
pub fn energy_gradient(config: &Configuration, container: &Container) -> Vec<f64> {
    let coords = config.to_flat();
    let mut grad = vec![0.0; coords.len()];
    Evaluator::new(*container, config.radius(), config.len()).eval(&coords, Some(&mut grad));
    grad
}
