//! Curve sources: pattern files, built-in patterns and IDX images.

use std::path::Path;

use closed_curves::mnist::{load_pattern, parse_idx_images, BinaryMask, ThresholdRule};
use closed_curves::patterns::{builtin, builtin_all};

use crate::failure::{Failure, ResultExt};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SourceSpec<'a> {
    /// `builtin:D`
    Builtin(&'a str),
    /// `mnist:INDEX`
    Mnist(&'a str),
    File(&'a Path),
}

impl<'a> SourceSpec<'a> {
    pub fn parse(text: &'a str) -> Self {
        if let Some(d) = text.strip_prefix("builtin:") {
            SourceSpec::Builtin(d)
        } else if let Some(k) = text.strip_prefix("mnist:") {
            SourceSpec::Mnist(k)
        } else {
            SourceSpec::File(Path::new(text))
        }
    }

    pub fn load(&self, images: &Path, limit: u8, rule: ThresholdRule) -> Result<BinaryMask, Failure> {
        match *self {
            SourceSpec::Builtin(d) => match d.parse::<usize>() {
                Ok(d) if d < 10 => Ok(builtin(d)),
                _ => Err(Failure::usage(format!("builtin:{d}: expected a digit 0..9"))),
            },
            SourceSpec::Mnist(k) => {
                let index: usize = k
                    .parse()
                    .map_err(|_| Failure::usage(format!("mnist:{k}: expected an image index")))?;
                let bytes = std::fs::read(images).io_err(images)?;
                let all = parse_idx_images(&bytes).parse_err(images.display())?;
                let image = all
                    .get(index)
                    .ok_or_else(|| Failure::usage(format!("mnist:{index}: file holds {} images", all.len())))?;
                Ok(image.threshold(limit, rule))
            }
            SourceSpec::File(path) => {
                let text = std::fs::read_to_string(path).io_err(path)?;
                load_pattern(&text).parse_err(path.display())
            }
        }
    }
}

/// `0.pattern` .. `9.pattern` from `dir`, or the built-in set.
pub fn load_patterns(dir: Option<&Path>) -> Result<Vec<BinaryMask>, Failure> {
    let Some(dir) = dir else {
        return Ok(builtin_all());
    };
    (0..10)
        .map(|d| {
            let path = dir.join(format!("{d}.pattern"));
            let text = std::fs::read_to_string(&path).io_err(&path)?;
            load_pattern(&text).parse_err(path.display())
        })
        .collect()
}
