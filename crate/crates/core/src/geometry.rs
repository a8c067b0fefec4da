//! Configurations, containers and the symmetrical-relocation primitive.
//!
//! Sphere indices are 0-based everywhere in the library. File formats
//! use 1-based indices (see [`crate::packing_io`]).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Point3 { x, y, z }
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn distance(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Point3 {
    fn from(a: [f64; 3]) -> Self {
        Point3::new(a[0], a[1], a[2])
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, o: Point3) -> Point3 {
        Point3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

/// Ordered sphere centers together with the common sphere radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    centers: Vec<Point3>,
    radius: f64,
}

impl Configuration {
    pub fn new(centers: Vec<Point3>, radius: f64) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::invalid("a configuration needs at least one sphere"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!(
                "sphere radius must be positive, got {radius}"
            )));
        }
        if let Some(i) = centers.iter().position(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("center {i} is not finite")));
        }
        Ok(Configuration { centers, radius })
    }

    /// Rebuilds a configuration from `3n` packed coordinates.
    pub(crate) fn from_flat(coords: &[f64], radius: f64) -> Self {
        let centers = coords
            .chunks_exact(3)
            .map(|c| Point3::new(c[0], c[1], c[2]))
            .collect();
        Configuration { centers, radius }
    }

    pub(crate) fn to_flat(&self) -> Vec<f64> {
        self.centers
            .iter()
            .flat_map(|c| [c.x, c.y, c.z])
            .collect()
    }

    pub fn centers(&self) -> &[Point3] {
        &self.centers
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Same centers, different sphere radius.
    pub fn with_radius(&self, radius: f64) -> Result<Self> {
        Configuration::new(self.centers.clone(), radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContainerKind {
    Sphere,
    Cube,
}

impl ContainerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ContainerKind::Sphere => "sphere",
            ContainerKind::Cube => "cube",
        }
    }
}

impl fmt::Display for ContainerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContainerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sphere" => Ok(ContainerKind::Sphere),
            "cube" => Ok(ContainerKind::Cube),
            other => Err(Error::invalid(format!(
                "unknown container kind '{other}' (expected sphere or cube)"
            ))),
        }
    }
}

/// A container centered at the origin. For a cube, `r0` is half the edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Container {
    kind: ContainerKind,
    r0: f64,
}

impl Container {
    pub fn new(kind: ContainerKind, r0: f64) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::invalid(format!(
                "container radius must be positive, got {r0}"
            )));
        }
        Ok(Container { kind, r0 })
    }

    pub fn sphere(r0: f64) -> Result<Self> {
        Container::new(ContainerKind::Sphere, r0)
    }

    pub fn cube(r0: f64) -> Result<Self> {
        Container::new(ContainerKind::Cube, r0)
    }

    pub fn kind(&self) -> ContainerKind {
        self.kind
    }

    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn with_r0(&self, r0: f64) -> Result<Self> {
        Container::new(self.kind, r0)
    }
}

/// A duplicate-free, sorted set of sphere indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn empty() -> Self {
        IndexSet(Vec::new())
    }

    /// `{0, 1, ..., n-1}`
    pub fn full(n: usize) -> Self {
        IndexSet((0..n).collect())
    }

    /// Builds a set valid for `n` spheres.
    pub fn new(indices: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::invalid(format!("duplicate index {}", w[0])));
        }
        if let Some(&index) = v.last() {
            if index >= n {
                return Err(Error::IndexOutOfRange { index, n });
            }
        }
        Ok(IndexSet(v))
    }

    /// Caller guarantees the input is sorted and duplicate-free.
    pub(crate) fn from_sorted_unchecked(v: Vec<usize>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        IndexSet(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    fn check(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&index) if index >= n => Err(Error::IndexOutOfRange { index, n }),
            _ => Ok(()),
        }
    }
}

/// Samples `n` centers uniformly from the container shrunk inward by `r`.
///
/// Centers may overlap each other; only the wall constraint holds on return.
pub fn random_configuration(
    n: usize,
    container: &Container,
    r: f64,
    seed: u64,
) -> Result<Configuration> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("sphere radius must be positive, got {r}")));
    }
    let half = (container.r0() - r).max(0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coord = |rng: &mut ChaCha8Rng| half * (2.0 * rng.gen::<f64>() - 1.0);
    let centers = (0..n)
        .map(|_| match container.kind() {
            ContainerKind::Cube => Point3::new(coord(&mut rng), coord(&mut rng), coord(&mut rng)),
            ContainerKind::Sphere => loop {
                let p = Point3::new(coord(&mut rng), coord(&mut rng), coord(&mut rng));
                if p.norm() <= half {
                    break p;
                }
            },
        })
        .collect();
    Configuration::new(centers, r)
}

/// Reflects every center whose index is in `subset` through the origin.
pub fn invert_subset(subset: &IndexSet, config: &Configuration) -> Result<Configuration> {
    subset.check(config.len())?;
    let mut centers = config.centers.clone();
    for &i in subset.indices() {
        centers[i] = -centers[i];
    }
    Ok(Configuration {
        centers,
        radius: config.radius,
    })
}

/// `[0, n) \ subset`
pub fn complement(subset: &IndexSet, n: usize) -> Result<IndexSet> {
    subset.check(n)?;
    Ok(IndexSet(
        (0..n).filter(|&i| !subset.contains(i)).collect(),
    ))
}
