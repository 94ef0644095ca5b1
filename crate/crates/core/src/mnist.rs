//! MNIST IDX files, gray rasters, binary masks and the plain-text pattern format.
//!
//! IDX layout (all integers big-endian):
//!
//! ```text
//! images: 00 00 08 03 | count u32 | rows u32 | cols u32 | count*rows*cols bytes
//! labels: 00 00 08 01 | count u32 | count bytes
//! ```

use thiserror::Error;

pub const IMAGE_MAGIC: u32 = 0x0000_0803;
pub const LABEL_MAGIC: u32 = 0x0000_0801;

/// Gray value used to decide digit membership.
pub const DEFAULT_LIMIT: u8 = 80;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IdxError {
    #[error("bad magic number {found:#010x}, expected {expected:#010x}")]
    Magic { expected: u32, found: u32 },
    #[error("truncated IDX data: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("label {label} at position {index} is not a digit")]
    Label { index: usize, label: u8 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("pattern is empty")]
    Empty,
    #[error("line {line} has {found} columns, expected {expected}")]
    Ragged { line: usize, expected: usize, found: usize },
    #[error("unexpected character {ch:?} on line {line}")]
    Character { line: usize, ch: char },
}

/// Row-major raster of gray values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Self {
        assert_eq!(pixels.len(), width * height, "pixel count must match dimensions");
        Self { width, height, pixels }
    }

    pub fn get(&self, w: usize, h: usize) -> u8 {
        self.pixels[h * self.width + w]
    }

    pub fn threshold(&self, limit: u8, rule: ThresholdRule) -> BinaryMask {
        threshold(self, limit, rule)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDigit {
    pub index: usize,
    pub label: u8,
    pub image: GrayImage,
}

/// Which side of the limit a boundary gray value falls on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// `value > limit` belongs to the digit.
    #[default]
    Greater,
    /// `value >= limit` belongs to the digit.
    GreaterOrEqual,
}

/// Lattice of inside/outside flags, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: usize,
    pub height: usize,
    pub inside: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, inside: Vec<bool>) -> Self {
        assert_eq!(inside.len(), width * height, "flag count must match dimensions");
        Self { width, height, inside }
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self::new(width, height, vec![false; width * height])
    }

    /// Off-lattice coordinates count as outside.
    pub fn is_inside(&self, w: i64, h: i64) -> bool {
        if w < 0 || h < 0 || w as usize >= self.width || h as usize >= self.height {
            return false;
        }
        self.inside[h as usize * self.width + w as usize]
    }

    pub fn set(&mut self, w: usize, h: usize, value: bool) {
        self.inside[h * self.width + w] = value;
    }

    pub fn count_inside(&self) -> usize {
        self.inside.iter().filter(|&&v| v).count()
    }

    /// Copy of the mask moved by `(dw, dh)` on a canvas of the same size.
    /// Returns `None` if an inside point would leave the canvas.
    pub fn translated(&self, dw: i64, dh: i64) -> Option<Self> {
        let mut out = Self::empty(self.width, self.height);
        for h in 0..self.height {
            for w in 0..self.width {
                if !self.inside[h * self.width + w] {
                    continue;
                }
                let (nw, nh) = (w as i64 + dw, h as i64 + dh);
                if nw < 0 || nh < 0 || nw as usize >= self.width || nh as usize >= self.height {
                    return None;
                }
                out.set(nw as usize, nh as usize, true);
            }
        }
        Some(out)
    }

    /// Every pixel replaced by a `factor`×`factor` block.
    pub fn upscaled(&self, factor: usize) -> Self {
        let (width, height) = (self.width * factor, self.height * factor);
        let mut out = Self::empty(width, height);
        for h in 0..height {
            for w in 0..width {
                out.set(w, h, self.inside[(h / factor) * self.width + w / factor]);
            }
        }
        out
    }

    /// Pattern-file text for this mask.
    pub fn to_pattern(&self) -> String {
        let mut text = String::with_capacity((self.width + 1) * self.height);
        for row in self.inside.chunks(self.width.max(1)) {
            text.extend(row.iter().map(|&v| if v { '#' } else { '.' }));
            text.push('\n');
        }
        text
    }
}

fn read_u32(bytes: &[u8], offset: usize) -> Result<u32, IdxError> {
    let chunk = bytes.get(offset..offset + 4).ok_or(IdxError::Truncated {
        needed: offset + 4,
        available: bytes.len(),
    })?;
    Ok(u32::from_be_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<(), IdxError> {
    let found = read_u32(bytes, 0)?;
    if found != expected {
        return Err(IdxError::Magic { expected, found });
    }
    Ok(())
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<Vec<GrayImage>, IdxError> {
    check_magic(bytes, IMAGE_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let rows = read_u32(bytes, 8)? as usize;
    let cols = read_u32(bytes, 12)? as usize;
    let size = rows * cols;
    let needed = 16 + count * size;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            needed,
            available: bytes.len(),
        });
    }
    let payload = &bytes[16..needed];
    if size == 0 {
        return Ok((0..count).map(|_| GrayImage::new(cols, rows, Vec::new())).collect());
    }
    Ok(payload
        .chunks_exact(size)
        .map(|px| GrayImage::new(cols, rows, px.to_vec()))
        .collect())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    check_magic(bytes, LABEL_MAGIC)?;
    let count = read_u32(bytes, 4)? as usize;
    let needed = 8 + count;
    if bytes.len() < needed {
        return Err(IdxError::Truncated {
            needed,
            available: bytes.len(),
        });
    }
    let labels = bytes[8..needed].to_vec();
    if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l > 9) {
        return Err(IdxError::Label { index, label });
    }
    Ok(labels)
}

/// Serializes images of identical dimensions into an IDX image file.
pub fn encode_idx_images(images: &[GrayImage]) -> Vec<u8> {
    let (rows, cols) = images.first().map_or((0, 0), |im| (im.height, im.width));
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    out.extend_from_slice(&IMAGE_MAGIC.to_be_bytes());
    out.extend_from_slice(&(images.len() as u32).to_be_bytes());
    out.extend_from_slice(&(rows as u32).to_be_bytes());
    out.extend_from_slice(&(cols as u32).to_be_bytes());
    for image in images {
        assert_eq!((image.height, image.width), (rows, cols), "mixed image sizes");
        out.extend_from_slice(&image.pixels);
    }
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABEL_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

/// Zips parsed images and labels; extra entries on either side are dropped.
pub fn labeled_digits(images: Vec<GrayImage>, labels: &[u8]) -> Vec<LabeledDigit> {
    images
        .into_iter()
        .zip(labels)
        .enumerate()
        .map(|(index, (image, &label))| LabeledDigit { index, label, image })
        .collect()
}

pub fn threshold(image: &GrayImage, limit: u8, rule: ThresholdRule) -> BinaryMask {
    let inside = image
        .pixels
        .iter()
        .map(|&v| match rule {
            ThresholdRule::Greater => v > limit,
            ThresholdRule::GreaterOrEqual => v >= limit,
        })
        .collect();
    BinaryMask::new(image.width, image.height, inside)
}

/// Parses `'.'`/`'#'` rows. A trailing `\r` per line is tolerated.
pub fn load_pattern(text: &str) -> Result<BinaryMask, PatternError> {
    let lines: Vec<&str> = text.lines().map(|l| l.strip_suffix('\r').unwrap_or(l)).collect();
    let lines = match lines.iter().rposition(|l| !l.is_empty()) {
        Some(last) => &lines[..=last],
        None => return Err(PatternError::Empty),
    };
    let width = lines[0].chars().count();
    let mut inside = Vec::with_capacity(width * lines.len());
    for (n, line) in lines.iter().enumerate() {
        let found = line.chars().count();
        if found != width {
            return Err(PatternError::Ragged {
                line: n + 1,
                expected: width,
                found,
            });
        }
        for ch in line.chars() {
            match ch {
                '#' => inside.push(true),
                '.' => inside.push(false),
                _ => return Err(PatternError::Character { line: n + 1, ch }),
            }
        }
    }
    if width == 0 {
        return Err(PatternError::Empty);
    }
    Ok(BinaryMask::new(width, lines.len(), inside))
}
