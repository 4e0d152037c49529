//! Shared fixtures for integration tests: synthetic dataset files and an
//! independent LAB inverse used for round-trip checks.
//!
//! Each test binary compiles its own copy of this module and uses a
//! subset of it, so unused-item warnings are suppressed here.
#![allow(dead_code)]

use std::fs;
use std::io::Write;
use std::path::Path;

use quanvolve::data::{PIXELS_PER_RECORD, TEST_FILE, TRAIN_FILES};

/// Writes the six canonical batch files into `dir` with `per_file`
/// records each. Labels cycle 0..=9, so every class holds exactly
/// `per_file / 10` records per file. Pixel 0 marks the split side (0 for
/// train files, 255 for the test file); the remaining pixels come from a
/// small deterministic generator so records differ.
pub fn write_synthetic_batches(dir: &Path, per_file: usize) {
    let write_file = |name: &str, marker: u8, salt: u64| {
        let path = dir.join(name);
        let file = fs::File::create(&path).expect("create batch file");
        let mut out = std::io::BufWriter::new(file);
        let mut state = salt.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            // xorshift64*, plenty for fixture noise
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            state.wrapping_mul(0x2545f4914f6cdd1d)
        };
        for i in 0..per_file {
            let mut record = Vec::with_capacity(1 + PIXELS_PER_RECORD);
            record.push((i % 10) as u8);
            record.push(marker);
            while record.len() < 1 + PIXELS_PER_RECORD {
                record.extend_from_slice(&next().to_le_bytes());
            }
            record.truncate(1 + PIXELS_PER_RECORD);
            out.write_all(&record).expect("write record");
        }
        out.flush().expect("flush batch file");
    };
    for (k, name) in TRAIN_FILES.iter().enumerate() {
        write_file(name, 0, k as u64 + 1);
    }
    write_file(TEST_FILE, 255, 99);
}

/// Writes batch files whose first two classes are separable by
/// brightness (class 0 dark, class 1 bright), for tests that need
/// training to actually learn something.
pub fn write_separable_batches(dir: &Path, per_file: usize) {
    let write_file = |name: &str, salt: u64| {
        let path = dir.join(name);
        let file = fs::File::create(&path).expect("create batch file");
        let mut out = std::io::BufWriter::new(file);
        let mut state = salt.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
        let mut next = move || {
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            state.wrapping_mul(0x2545f4914f6cdd1d)
        };
        for i in 0..per_file {
            let label = (i % 10) as u8;
            let base: i32 = match label {
                0 => 60,
                1 => 190,
                _ => 125,
            };
            let mut record = Vec::with_capacity(1 + PIXELS_PER_RECORD);
            record.push(label);
            for _ in 0..PIXELS_PER_RECORD {
                let jitter = (next() % 71) as i32 - 35;
                record.push((base + jitter).clamp(0, 255) as u8);
            }
            out.write_all(&record).expect("write record");
        }
        out.flush().expect("flush batch file");
    };
    for (k, name) in TRAIN_FILES.iter().enumerate() {
        write_file(name, k as u64 + 1);
    }
    write_file(TEST_FILE, 99);
}

/// Independent LAB -> sRGB inverse for round-trip checks: undoes the
/// CIE transform with the D65 white point, applies the exact adjugate
/// inverse of the forward sRGB -> XYZ matrix, then re-applies gamma.
pub fn lab_to_rgb(l: f64, a: f64, b: f64) -> (f64, f64, f64) {
    const WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];
    const M: [[f64; 3]; 3] = [
        [0.4124564, 0.3575761, 0.1804375],
        [0.2126729, 0.7151522, 0.0721750],
        [0.0193339, 0.1191920, 0.9503041],
    ];
    let finv = |t: f64| {
        let delta: f64 = 6.0 / 29.0;
        if t > delta {
            t * t * t
        } else {
            3.0 * delta * delta * (t - 4.0 / 29.0)
        }
    };
    let fy = (l + 16.0) / 116.0;
    let xyz = [
        WHITE[0] * finv(fy + a / 500.0),
        WHITE[1] * finv(fy),
        WHITE[2] * finv(fy - b / 200.0),
    ];

    let det = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1])
        - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0])
        + M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    let cof = |r: usize, c: usize| {
        let (r1, r2) = match r {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let (c1, c2) = match c {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let minor = M[r1][c1] * M[r2][c2] - M[r1][c2] * M[r2][c1];
        if (r + c) % 2 == 0 {
            minor
        } else {
            -minor
        }
    };
    let mut linear = [0.0f64; 3];
    for (i, lin) in linear.iter_mut().enumerate() {
        // Inverse = adjugate / det; adjugate[i][j] = cofactor(j, i).
        *lin = (cof(0, i) * xyz[0] + cof(1, i) * xyz[1] + cof(2, i) * xyz[2]) / det;
    }
    let gamma = |c: f64| {
        if c <= 0.0031308 {
            12.92 * c
        } else {
            1.055 * c.powf(1.0 / 2.4) - 0.055
        }
    };
    (gamma(linear[0]), gamma(linear[1]), gamma(linear[2]))
}
