use std::io;

use crate::geometry::ContainerKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sphere index {index} out of range for {n} spheres")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("no packing found at the upper radius bound {r0_up} after {doublings} doublings")]
    UpperBoundInfeasible { r0_up: f64, doublings: u32 },

    #[error("configuration failed exact certification at r0 = {r0}")]
    CertificationFailed { r0: f64 },

    #[error("no reference record for n = {n} in a {kind} container")]
    NotInTable { n: usize, kind: ContainerKind },

    #[error("duplicate record for n = {n} in a {kind} container (line {line})")]
    DuplicateRecord {
        n: usize,
        kind: ContainerKind,
        line: usize,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidParameter(message.into())
    }
}
