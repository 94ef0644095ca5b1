//! Error classes and their exit codes.

use std::fmt;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Io,
    Parse,
    Stage,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub message: String,
}

impl Failure {
    fn new(kind: Kind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(Kind::Usage, message)
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self::new(Kind::Io, message)
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(Kind::Parse, message)
    }

    pub fn stage(message: impl Into<String>) -> Self {
        Self::new(Kind::Stage, message)
    }

    /// 2 usage, 3 I/O, 4 malformed input, 5 pipeline stage.
    pub fn code(&self) -> u8 {
        match self.kind {
            Kind::Usage => 2,
            Kind::Io => 3,
            Kind::Parse => 4,
            Kind::Stage => 5,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub trait ResultExt<T> {
    fn io_err(self, what: impl AsRef<Path>) -> Result<T, Failure>;
    fn parse_err(self, what: impl fmt::Display) -> Result<T, Failure>;
    fn stage_err(self, what: impl fmt::Display) -> Result<T, Failure>;
}

impl<T, E: fmt::Display> ResultExt<T> for Result<T, E> {
    fn io_err(self, what: impl AsRef<Path>) -> Result<T, Failure> {
        self.map_err(|e| Failure::io(format!("{}: {e}", what.as_ref().display())))
    }

    fn parse_err(self, what: impl fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::parse(format!("{what}: {e}")))
    }

    fn stage_err(self, what: impl fmt::Display) -> Result<T, Failure> {
        self.map_err(|e| Failure::stage(format!("{what}: {e}")))
    }
}
