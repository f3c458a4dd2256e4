//! Big-endian IDX files: images (magic 2051) and labels (magic 2049).

use std::path::Path;

use crate::error::{Error, Result};

const IMAGES_MAGIC: u32 = 0x0000_0803;
const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    /// `count · rows · cols` bytes, image-major.
    pub pixels: Vec<u8>,
}

impl IdxImages {
    pub fn image(&self, i: usize) -> &[u8] {
        let size = self.rows * self.cols;
        &self.pixels[i * size..(i + 1) * size]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawMnist {
    pub images: IdxImages,
    pub labels: Vec<u8>,
}

fn read_u32(bytes: &[u8], offset: usize, file: &'static str, header_len: usize) -> Result<u32> {
    let b = bytes
        .get(offset..offset + 4)
        .ok_or(Error::Truncated { file, expected: header_len, found: bytes.len() })?;
    Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    const FILE: &str = "images";
    let magic = read_u32(bytes, 0, FILE, 16)?;
    if magic != IMAGES_MAGIC {
        return Err(Error::BadMagic { file: FILE, expected: IMAGES_MAGIC, found: magic });
    }
    let count = read_u32(bytes, 4, FILE, 16)? as usize;
    let rows = read_u32(bytes, 8, FILE, 16)? as usize;
    let cols = read_u32(bytes, 12, FILE, 16)? as usize;
    let expected = 16 + count * rows * cols;
    if bytes.len() < expected {
        return Err(Error::Truncated { file: FILE, expected, found: bytes.len() });
    }
    Ok(IdxImages { count, rows, cols, pixels: bytes[16..expected].to_vec() })
}

/// Labels must be digits `0..=9`.
pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    const FILE: &str = "labels";
    let magic = read_u32(bytes, 0, FILE, 8)?;
    if magic != LABELS_MAGIC {
        return Err(Error::BadMagic { file: FILE, expected: LABELS_MAGIC, found: magic });
    }
    let count = read_u32(bytes, 4, FILE, 8)? as usize;
    let expected = 8 + count;
    if bytes.len() < expected {
        return Err(Error::Truncated { file: FILE, expected, found: bytes.len() });
    }
    let labels = bytes[8..expected].to_vec();
    if let Some((index, &label)) = labels.iter().enumerate().find(|(_, &l)| l > 9) {
        return Err(Error::LabelOutOfRange { index, label });
    }
    Ok(labels)
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<RawMnist> {
    let images = parse_idx_images(&read_file(images_path.as_ref())?)?;
    let labels = parse_idx_labels(&read_file(labels_path.as_ref())?)?;
    if images.count != labels.len() {
        return Err(Error::CountMismatch { images: images.count, labels: labels.len() });
    }
    Ok(RawMnist { images, labels })
}

pub fn encode_idx_images(images: &IdxImages) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    for v in [IMAGES_MAGIC, images.count as u32, images.rows as u32, images.cols as u32] {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    out
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
