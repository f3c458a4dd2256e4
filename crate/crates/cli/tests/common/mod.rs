#![allow(dead_code)]

use std::path::{Path, PathBuf};

use linsep_core::data::{encode_idx_images, encode_idx_labels, IdxImages};
use linsep_core::seeded_rng;

/// Writes a tiny IDX pair whose digit 3 and digit 5 images light up disjoint
/// halves of a `side × side` grid, plus some other digits as distractors.
pub fn write_idx_fixture(dir: &Path, per_digit: usize, side: usize) -> (PathBuf, PathBuf) {
    let mut rng = seeded_rng(99);
    let pixels_per = side * side;
    let mut pixels = Vec::new();
    let mut labels = Vec::new();
    for i in 0..3 * per_digit {
        let label = [3u8, 5, 7][i % 3];
        for p in 0..pixels_per {
            let lit = match label {
                3 => p < pixels_per / 2,
                5 => p >= pixels_per / 2,
                _ => p % 2 == 0,
            };
            let base = if lit { 160.0 } else { 0.0 };
            pixels.push((base + rng.uniform(0.0, 60.0)) as u8);
        }
        labels.push(label);
    }
    let images = IdxImages { count: labels.len(), rows: side, cols: side, pixels };
    let img_path = dir.join("images-idx3-ubyte");
    let lbl_path = dir.join("labels-idx1-ubyte");
    std::fs::write(&img_path, encode_idx_images(&images)).unwrap();
    std::fs::write(&lbl_path, encode_idx_labels(&labels)).unwrap();
    (img_path, lbl_path)
}
