//! Dense packings of equal spheres in a spherical or cubic container.
//!
//! Spheres are treated as elastic bodies whose overlaps with each other and
//! with the container wall carry a quadratic potential energy. A local solver
//! drives the energy to zero; a global search reflects energy-ranked groups of
//! spheres through the container center to escape local minima; a bisection on
//! the container radius then squeezes the result.
//!
//! Every solve runs with spheres of radius `0.5 + 1e-8` and accepts a
//! configuration once its energy is below `1e-16`. Each deformation is then
//! below `1e-8`, so the same centers form an exact, overlap-free packing of
//! spheres of radius `0.5`.

pub mod energy;
pub mod error;
pub mod geometry;
mod grid;
pub mod packing_io;
pub mod radius;
pub mod records;
pub mod run;
pub mod solver;
pub mod strategy;
pub mod verify;

pub use energy::{
    container_deformation, energy_gradient, pair_deformation, sphere_energy, total_energy,
    EnergyReport,
};
pub use error::{Error, Result};
pub use geometry::{
    complement, invert_subset, random_configuration, Configuration, Container, ContainerKind,
    IndexSet, Point3,
};
pub use packing_io::{load_packing, save_packing, Packing};
pub use radius::{binary_search_radius, SolveOutcome};
pub use records::{load_records, RecordTable};
pub use run::{solve_best_of, solve_once, RunConfig, RunReport};
pub use solver::{a0_solve, DescentMethod, LocalResult, LocalStatus, SolverSettings};
pub use strategy::{a1_search, max_u, min_u, scan_candidates, ScanCandidate, SearchParams, SearchState};
pub use verify::{compare_to_record, verify_exact, verify_fake, Certificate, FakeCheck};

/// Radius of the spheres being packed.
pub const STANDARD_RADIUS: f64 = 0.5;
/// Inflated radius used while solving.
pub const FAKE_RADIUS: f64 = 0.5 + 1e-8;
/// Energy below which a configuration counts as a packing.
pub const PACKED_ENERGY_THRESHOLD: f64 = 1e-16;
