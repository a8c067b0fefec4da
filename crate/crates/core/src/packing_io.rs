//! Plain-text packing files.
//!
//! ```text
//! n=2
//! kind=sphere
//! r0=1.0000000100000000e0
//! r=0.5
//! 1 -5.0000000000000000e-1 0.0000000000000000e0 0.0000000000000000e0
//! 2 5.0000000000000000e-1 0.0000000000000000e0 0.0000000000000000e0
//! ```
//!
//! Coordinates carry 17 significant digits, enough to round-trip any `f64`.
//! Sphere numbers are 1-based. Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{Configuration, ContainerKind, Point3};
use crate::radius::SolveOutcome;

#[derive(Debug, Clone, PartialEq)]
pub struct Packing {
    pub kind: ContainerKind,
    pub r0: f64,
    pub configuration: Configuration,
}

impl From<&SolveOutcome> for Packing {
    fn from(o: &SolveOutcome) -> Self {
        Packing {
            kind: o.kind,
            r0: o.r0_min,
            configuration: o.dense_packing.clone(),
        }
    }
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_packing(p: &Packing) -> String {
    let mut s = String::new();
    let c = &p.configuration;
    let _ = writeln!(s, "n={}", c.len());
    let _ = writeln!(s, "kind={}", p.kind);
    let _ = writeln!(s, "r0={}", sci(p.r0));
    let _ = writeln!(s, "r={}", c.radius());
    for (i, q) in c.centers().iter().enumerate() {
        let _ = writeln!(s, "{} {} {} {}", i + 1, sci(q.x), sci(q.y), sci(q.z));
    }
    s
}

pub fn parse_packing(text: &str) -> Result<Packing> {
    let mut n: Option<usize> = None;
    let mut kind: Option<ContainerKind> = None;
    let mut r0: Option<f64> = None;
    let mut r: Option<f64> = None;
    let mut centers = Vec::new();
    let mut last_line = 0;

    let number = |line: usize, v: &str, what: &str| -> Result<f64> {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Error::parse(line, format!("bad {what} '{}'", v.trim())))
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            if !centers.is_empty() {
                return Err(Error::parse(line_no, "header line after coordinates"));
            }
            let slot_taken = match key.trim() {
                "n" => n
                    .replace(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| Error::parse(line_no, format!("bad n '{}'", value.trim())))?,
                    )
                    .is_some(),
                "kind" => kind
                    .replace(
                        value
                            .parse()
                            .map_err(|e: Error| Error::parse(line_no, e.to_string()))?,
                    )
                    .is_some(),
                "r0" => r0.replace(number(line_no, value, "r0")?).is_some(),
                "r" => r.replace(number(line_no, value, "r")?).is_some(),
                other => return Err(Error::parse(line_no, format!("unknown header '{other}'"))),
            };
            if slot_taken {
                return Err(Error::parse(line_no, format!("repeated header '{}'", key.trim())));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [i, x, y, z] = fields[..] else {
            return Err(Error::parse(
                line_no,
                format!("expected '<i> <x> <y> <z>', found {} fields", fields.len()),
            ));
        };
        let expected = centers.len() + 1;
        if i.parse::<usize>().ok() != Some(expected) {
            return Err(Error::parse(line_no, format!("expected sphere number {expected}, found '{i}'")));
        }
        centers.push(Point3::new(
            number(line_no, x, "x")?,
            number(line_no, y, "y")?,
            number(line_no, z, "z")?,
        ));
    }

    let end = last_line + 1;
    let n = n.ok_or_else(|| Error::parse(end, "missing header 'n'"))?;
    let kind = kind.ok_or_else(|| Error::parse(end, "missing header 'kind'"))?;
    let r0 = r0.ok_or_else(|| Error::parse(end, "missing header 'r0'"))?;
    let r = r.ok_or_else(|| Error::parse(end, "missing header 'r'"))?;
    if centers.len() != n {
        return Err(Error::parse(
            end,
            format!("header says n={n} but {} centers were listed", centers.len()),
        ));
    }
    if !(r0 > 0.0) {
        return Err(Error::parse(end, "r0 must be positive"));
    }
    let configuration = Configuration::new(centers, r).map_err(|e| Error::parse(end, e.to_string()))?;
    Ok(Packing {
        kind,
        r0,
        configuration,
    })
}

pub fn save_packing(outcome: &SolveOutcome, path: impl AsRef<Path>) -> Result<()> {
    write_packing(&Packing::from(outcome), path)
}

pub fn write_packing(packing: &Packing, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_packing(packing))?;
    Ok(())
}

pub fn load_packing(path: impl AsRef<Path>) -> Result<Packing> {
    parse_packing(&std::fs::read_to_string(path)?)
}
