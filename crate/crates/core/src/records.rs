//! Reference ratios `r/r0` for the best known packings.
//!
//! Data file format: comma-separated rows `kind,n,ratio`, an optional header
//! row of the same names, `#` comment lines and blank lines.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::ContainerKind;
use crate::STANDARD_RADIUS;

const BUNDLED: &str = include_str!("../data/records.csv");

/// Inflation applied to the record radius when estimating a search radius.
pub const ESTIMATE_SLACK: f64 = 1.0001;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordTable {
    entries: BTreeMap<(ContainerKind, usize), f64>,
}

impl RecordTable {
    /// The tables shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled record table is well-formed")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line == "kind,n,ratio" {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let [kind, n, ratio] = fields[..] else {
                return Err(Error::parse(
                    line_no,
                    format!("expected 3 fields, found {}", fields.len()),
                ));
            };
            let kind: ContainerKind = kind
                .parse()
                .map_err(|e: Error| Error::parse(line_no, e.to_string()))?;
            let n: usize = n
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| Error::parse(line_no, format!("bad sphere count '{n}'")))?;
            let ratio: f64 = ratio
                .parse()
                .ok()
                .filter(|r: &f64| *r > 0.0 && *r <= 1.0)
                .ok_or_else(|| Error::parse(line_no, format!("bad ratio '{ratio}'")))?;
            if entries.insert((kind, n), ratio).is_some() {
                return Err(Error::DuplicateRecord {
                    n,
                    kind,
                    line: line_no,
                });
            }
        }
        Ok(RecordTable { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, n: usize, kind: ContainerKind) -> Result<f64> {
        self.entries
            .get(&(kind, n))
            .copied()
            .ok_or(Error::NotInTable { n, kind })
    }

    pub fn iter(&self) -> impl Iterator<Item = (ContainerKind, usize, f64)> + '_ {
        self.entries.iter().map(|(&(k, n), &r)| (k, n, r))
    }

    /// Reference ratio for `n`, interpolated linearly between the nearest listed
    /// neighbours, or scaled as `n^(-1/3)` from the nearest entry outside the table.
    pub fn estimate_ratio(&self, n: usize, kind: ContainerKind) -> Option<f64> {
        if n == 0 {
            return None;
        }
        if let Ok(r) = self.get(n, kind) {
            return Some(r);
        }
        let below = self
            .entries
            .range((kind, 1)..(kind, n))
            .next_back()
            .map(|(&(_, m), &r)| (m, r));
        let above = self
            .entries
            .range((kind, n + 1)..=(kind, usize::MAX))
            .next()
            .map(|(&(_, m), &r)| (m, r));
        match (below, above) {
            (Some((a, ra)), Some((b, rb))) => {
                let t = (n - a) as f64 / (b - a) as f64;
                Some(ra + t * (rb - ra))
            }
            (Some((m, r)), None) | (None, Some((m, r))) => {
                Some(r * (m as f64 / n as f64).cbrt())
            }
            (None, None) => None,
        }
    }

    /// Container radius to search at: the reference radius inflated by [`ESTIMATE_SLACK`].
    pub fn r0_estimate(&self, n: usize, kind: ContainerKind) -> Option<f64> {
        self.estimate_ratio(n, kind)
            .map(|ratio| STANDARD_RADIUS / ratio * ESTIMATE_SLACK)
    }
}

pub fn load_records(path: impl AsRef<Path>) -> Result<RecordTable> {
    RecordTable::parse(&std::fs::read_to_string(path)?)
}

/// Fallback radius when no table is available: a ball holding `n` spheres at
/// 0.55 packing density.
pub fn density_r0_estimate(n: usize, kind: ContainerKind) -> f64 {
    let r = STANDARD_RADIUS;
    match kind {
        ContainerKind::Sphere => r * (n as f64 / 0.55).cbrt() + r,
        ContainerKind::Cube => r * (n as f64 * 4.0 / 3.0 * std::f64::consts::PI / 8.0 / 0.55).cbrt() + r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn bundled_anchors() {
        let t = RecordTable::bundled();
        assert_eq!(t.get(2, ContainerKind::Sphere).unwrap(), 0.5);
        assert_eq!(t.get(8, ContainerKind::Cube).unwrap(), 0.5);
        assert_eq!(t.get(13, ContainerKind::Sphere).unwrap(), 0.33333332);
        assert_eq!(t.get(68, ContainerKind::Sphere).unwrap(), 0.20000222);
        assert_eq!(t.get(14, ContainerKind::Cube).unwrap(), 0.41421355);
        assert_eq!(t.get(200, ContainerKind::Sphere).unwrap(), 0.14224761);
        assert_eq!(t.get(150, ContainerKind::Cube).unwrap(), 0.19339963);
        for n in 1..=100 {
            assert!(t.get(n, ContainerKind::Sphere).is_ok());
            assert!(t.get(n, ContainerKind::Cube).is_ok());
        }
        assert!(t.get(101, ContainerKind::Sphere).is_err());
        assert_eq!(t.len(), 120 + 110);
    }

    #[test]
    fn empty_file_gives_empty_table() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.flush().unwrap();
        assert!(load_records(f.path()).unwrap().is_empty());
    }

    #[test]
    fn rejects_duplicates_and_garbage() {
        let dup = "kind,n,ratio\nsphere,3,0.4\nsphere,3,0.41\n";
        assert!(matches!(
            RecordTable::parse(dup),
            Err(Error::DuplicateRecord { n: 3, line: 3, .. })
        ));
        assert!(matches!(
            RecordTable::parse("sphere,3\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            RecordTable::parse("# c\ncube,x,0.3\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            RecordTable::parse("prism,3,0.3\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(RecordTable::parse("cube,3,1.7\n").is_err());
    }

    #[test]
    fn interpolation_and_extrapolation() {
        let t = RecordTable::bundled();
        let r100 = t.get(100, ContainerKind::Sphere).unwrap();
        let r105 = t.get(105, ContainerKind::Sphere).unwrap();
        let r102 = t.estimate_ratio(102, ContainerKind::Sphere).unwrap();
        assert!((r102 - (r100 + 0.4 * (r105 - r100))).abs() < 1e-15);
        let r250 = t.estimate_ratio(250, ContainerKind::Sphere).unwrap();
        assert!(r250 < t.get(200, ContainerKind::Sphere).unwrap());
        let empty = RecordTable::default();
        assert!(empty.estimate_ratio(5, ContainerKind::Cube).is_none());
        assert!(t.estimate_ratio(0, ContainerKind::Cube).is_none());
        let est = t.r0_estimate(2, ContainerKind::Sphere).unwrap();
        assert!((est - ESTIMATE_SLACK).abs() < 1e-15);
    }

    #[test]
    fn density_estimate_is_roomy() {
        for n in [1, 5, 20, 100] {
            for kind in [ContainerKind::Sphere, ContainerKind::Cube] {
                let ratio = STANDARD_RADIUS / density_r0_estimate(n, kind);
                let t = RecordTable::bundled();
                assert!(ratio < t.get(n, kind).unwrap());
            }
        }
    }
}
