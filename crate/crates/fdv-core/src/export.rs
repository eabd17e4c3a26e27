//! Rasterized spatio-temporal dataset generation.
//!
//! Layout written by [`write_bundle`]:
//!
//! ```text
//! out/labels/t%06d.csv      per-pixel class codes, height rows x width cols
//! out/boundaries/t%06d.csv  region_id,x,y
//! out/velocity.csv          t,region,sx,sy,vx,vy,longitudinal,transverse
//! out/fits.json             fitted distributions
//! out/manifest.json         config echo, hashes, seeds (written last)
//! ```
//!
//! Everything is CSV/JSON so any downstream language can consume it, and
//! all numeric formatting is shortest-roundtrip, so a bundle read back
//! with [`read_bundle`] compares equal to the one written.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::clustering::Point;
use crate::error::{Error, Result};
use crate::segmentation::BinaryMask;
use crate::stats::{FitResult, SampleSet};

pub const LABEL_UNDISTURBED: u8 = 0;
pub const LABEL_BURNING: u8 = 1;
pub const LABEL_BURNED_COOLING: u8 = 2;
pub const LABEL_SMOKE: u8 = 3;

/// Per-pixel class grid restricted to the four defined codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGrid {
    width: usize,
    height: usize,
    labels: Vec<u8>,
}

impl LabelGrid {
    pub fn new(width: usize, height: usize, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != width * height {
            return Err(Error::DimensionMismatch {
                context: "label grid".into(),
                expected_w: width,
                expected_h: height,
                got_w: labels.len(),
                got_h: 1,
            });
        }
        if let Some(bad) = labels.iter().find(|&&l| l > LABEL_SMOKE) {
            return Err(Error::Config(format!("label code {bad} is not one of 0..=3")));
        }
        Ok(LabelGrid { width, height, labels })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }
}

/// Merge per-class masks into one grid with the fixed precedence
/// burning > burned_cooling > smoke > undisturbed.
pub fn compose_labels(
    burning: Option<&BinaryMask>,
    burned_cooling: Option<&BinaryMask>,
    smoke: Option<&BinaryMask>,
) -> Result<LabelGrid> {
    let first = burning
        .or(burned_cooling)
        .or(smoke)
        .ok_or_else(|| Error::Config("compose_labels needs at least one class mask".into()))?;
    let (w, h) = (first.width(), first.height());
    for (name, mask) in [("burning", burning), ("burned_cooling", burned_cooling), ("smoke", smoke)] {
        if let Some(m) = mask {
            if (m.width(), m.height()) != (w, h) {
                return Err(Error::DimensionMismatch {
                    context: format!("class mask {name}"),
                    expected_w: w,
                    expected_h: h,
                    got_w: m.width(),
                    got_h: m.height(),
                });
            }
        }
    }
    let test = |m: Option<&BinaryMask>, x: usize, y: usize| m.is_some_and(|m| m.get(x, y));
    let mut labels = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let code = if test(burning, x, y) {
                LABEL_BURNING
            } else if test(burned_cooling, x, y) {
                LABEL_BURNED_COOLING
            } else if test(smoke, x, y) {
                LABEL_SMOKE
            } else {
                LABEL_UNDISTURBED
            };
            labels.push(code);
        }
    }
    LabelGrid::new(w, h, labels)
}

/// Per-pixel burning duration in seconds: frames labelled burning divided
/// by the sample rate. Pixels that never burned are excluded.
pub fn burn_time_per_pixel(stack: &[LabelGrid], sample_rate_hz: f64) -> Result<SampleSet> {
    let first = stack.first().ok_or_else(|| Error::Domain("burn time needs at least one frame".into()))?;
    if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
        return Err(Error::Config("sample_rate_hz must be positive".into()));
    }
    let (w, h) = (first.width, first.height);
    let mut counts = vec![0u32; w * h];
    for grid in stack {
        if (grid.width, grid.height) != (w, h) {
            return Err(Error::DimensionMismatch {
                context: "label stack".into(),
                expected_w: w,
                expected_h: h,
                got_w: grid.width,
                got_h: grid.height,
            });
        }
        for (count, &label) in counts.iter_mut().zip(grid.labels.iter()) {
            if label == LABEL_BURNING {
                *count += 1;
            }
        }
    }
    let values = counts
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| c as f64 / sample_rate_hz)
        .collect();
    SampleSet::new(values, "s")
}

/// One matched velocity sample with its source location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityRecord {
    pub t_index: usize,
    pub region_id: usize,
    pub sx: i64,
    pub sy: i64,
    pub vx: f64,
    pub vy: f64,
    pub longitudinal: f64,
    pub transverse: f64,
}

/// Which dataset members are materialized on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExportSelection {
    pub labels: bool,
    pub boundaries: bool,
    pub velocity: bool,
    pub fits: bool,
}

impl Default for ExportSelection {
    fn default() -> Self {
        ExportSelection { labels: true, boundaries: true, velocity: true, fits: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    /// Full configuration echo.
    pub config: serde_json::Value,
    /// SHA-256 of the canonical (key-sorted) config JSON.
    pub config_hash: String,
    /// SHA-256 per consumed input file, keyed by file name.
    pub input_checksums: BTreeMap<String, String>,
    pub timesteps: usize,
    pub exports: ExportSelection,
}

/// Hash of the canonical JSON encoding; changes iff any config value does.
pub fn config_hash(config: &serde_json::Value) -> String {
    // serde_json maps are key-sorted, so to_string is already canonical.
    let canonical = serde_json::to_string(config).expect("config is valid json");
    hex_digest(canonical.as_bytes())
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest {
        write!(out, "{b:02x}").unwrap();
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub labels: Vec<LabelGrid>,
    /// Per timestep: (region_id, boundary point) rows.
    pub boundaries: Vec<Vec<(usize, Point)>>,
    pub velocities: Vec<VelocityRecord>,
    pub fits: Vec<FitResult>,
    pub manifest: Manifest,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io { path: path.to_path_buf(), source: e }
}

/// Write the bundle under `out_dir`; the manifest lands last as the
/// commit point. Returns the manifest path.
pub fn write_bundle(bundle: &DatasetBundle, out_dir: &Path) -> Result<PathBuf> {
    let sel = bundle.manifest.exports;
    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    if sel.labels {
        let dir = out_dir.join("labels");
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for (t, grid) in bundle.labels.iter().enumerate() {
            let mut text = String::new();
            for y in 0..grid.height {
                for x in 0..grid.width {
                    if x > 0 {
                        text.push(',');
                    }
                    write!(text, "{}", grid.get(x, y)).unwrap();
                }
                text.push('\n');
            }
            let path = dir.join(format!("t{t:06}.csv"));
            std::fs::write(&path, text).map_err(io_err(&path))?;
        }
    }

    if sel.boundaries {
        let dir = out_dir.join("boundaries");
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        for (t, rows) in bundle.boundaries.iter().enumerate() {
            let mut text = String::from("region_id,x,y\n");
            for (region, p) in rows {
                writeln!(text, "{region},{},{}", p.x, p.y).unwrap();
            }
            let path = dir.join(format!("t{t:06}.csv"));
            std::fs::write(&path, text).map_err(io_err(&path))?;
        }
    }

    if sel.velocity {
        let mut text = String::from("t,region,sx,sy,vx,vy,longitudinal,transverse\n");
        for r in &bundle.velocities {
            writeln!(
                text,
                "{},{},{},{},{},{},{},{}",
                r.t_index, r.region_id, r.sx, r.sy, r.vx, r.vy, r.longitudinal, r.transverse
            )
            .unwrap();
        }
        let path = out_dir.join("velocity.csv");
        std::fs::write(&path, text).map_err(io_err(&path))?;
    }

    if sel.fits {
        let path = out_dir.join("fits.json");
        let json = serde_json::to_string_pretty(&bundle.fits)
            .map_err(|e| Error::Load { file: path.clone(), reason: e.to_string() })?;
        std::fs::write(&path, json).map_err(io_err(&path))?;
    }

    let manifest_path = out_dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&bundle.manifest)
        .map_err(|e| Error::Load { file: manifest_path.clone(), reason: e.to_string() })?;
    std::fs::write(&manifest_path, json).map_err(io_err(&manifest_path))?;
    Ok(manifest_path)
}

/// Read a bundle back; exact inverse of [`write_bundle`].
pub fn read_bundle(dir: &Path) -> Result<DatasetBundle> {
    let manifest_path = dir.join("manifest.json");
    let text = std::fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&text)
        .map_err(|e| Error::Load { file: manifest_path.clone(), reason: e.to_string() })?;
    let sel = manifest.exports;

    let mut labels = Vec::new();
    if sel.labels {
        for t in 0..manifest.timesteps {
            let path = dir.join("labels").join(format!("t{t:06}.csv"));
            let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
            let mut grid = Vec::new();
            let mut width = 0;
            let mut height = 0;
            for line in text.lines() {
                let row: Vec<u8> = line
                    .split(',')
                    .map(|c| {
                        c.parse::<u8>().map_err(|e| Error::Load {
                            file: path.clone(),
                            reason: format!("bad label {c:?}: {e}"),
                        })
                    })
                    .collect::<Result<_>>()?;
                width = row.len();
                height += 1;
                grid.extend(row);
            }
            labels.push(LabelGrid::new(width, height, grid)?);
        }
    }

    let mut boundaries = Vec::new();
    if sel.boundaries {
        for t in 0..manifest.timesteps {
            let path = dir.join("boundaries").join(format!("t{t:06}.csv"));
            let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
            let mut rows = Vec::new();
            for line in text.lines().skip(1) {
                let parts: Vec<&str> = line.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Load { file: path.clone(), reason: format!("bad row {line:?}") });
                }
                let parse_err = |e: std::num::ParseIntError| Error::Load {
                    file: path.clone(),
                    reason: e.to_string(),
                };
                rows.push((
                    parts[0].parse::<usize>().map_err(parse_err)?,
                    Point::new(
                        parts[1].parse::<i64>().map_err(parse_err)?,
                        parts[2].parse::<i64>().map_err(parse_err)?,
                    ),
                ));
            }
            boundaries.push(rows);
        }
    }

    let mut velocities = Vec::new();
    if sel.velocity {
        let path = dir.join("velocity.csv");
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        for line in text.lines().skip(1) {
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 8 {
                return Err(Error::Load { file: path.clone(), reason: format!("bad row {line:?}") });
            }
            let bad = |e: String| Error::Load { file: path.clone(), reason: e };
            velocities.push(VelocityRecord {
                t_index: parts[0].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                region_id: parts[1].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                sx: parts[2].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                sy: parts[3].parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                vx: parts[4].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                vy: parts[5].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                longitudinal: parts[6].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
                transverse: parts[7].parse().map_err(|e: std::num::ParseFloatError| bad(e.to_string()))?,
            });
        }
    }

    let mut fits = Vec::new();
    if sel.fits {
        let path = dir.join("fits.json");
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        fits = serde_json::from_str(&text)
            .map_err(|e| Error::Load { file: path.clone(), reason: e.to_string() })?;
    }

    Ok(DatasetBundle { labels, boundaries, velocities, fits, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{Family, FitMethod};

    fn mask_from(bits: &[(usize, usize)], w: usize, h: usize) -> BinaryMask {
        let mut m = BinaryMask::new(w, h);
        for &(x, y) in bits {
            m.set(x, y, true);
        }
        m
    }

    #[test]
    fn label_precedence() {
        let burning = mask_from(&[(0, 0), (1, 0)], 3, 1);
        let burned = mask_from(&[(1, 0), (2, 0)], 3, 1);
        let smoke = mask_from(&[(0, 0), (2, 0)], 3, 1);
        let grid = compose_labels(Some(&burning), Some(&burned), Some(&smoke)).unwrap();
        assert_eq!(grid.labels(), &[LABEL_BURNING, LABEL_BURNING, LABEL_BURNED_COOLING]);

        let empty = compose_labels(Some(&BinaryMask::new(2, 2)), None, None).unwrap();
        assert!(empty.labels().iter().all(|&l| l == LABEL_UNDISTURBED));

        let smoke_only = compose_labels(None, None, Some(&smoke)).unwrap();
        assert_eq!(smoke_only.labels(), &[LABEL_SMOKE, LABEL_UNDISTURBED, LABEL_SMOKE]);
    }

    #[test]
    fn label_dimension_mismatch() {
        let a = BinaryMask::new(2, 2);
        let b = BinaryMask::new(3, 2);
        assert!(matches!(
            compose_labels(Some(&a), Some(&b), None),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn burn_time_counts_and_exclusions() {
        let frame = |burning: &[(usize, usize)]| {
            compose_labels(Some(&mask_from(burning, 2, 2)), None, None).unwrap()
        };
        // Pixel (0,0) burns 5 frames; (1,1) burns 2; others never.
        let mut stack = Vec::new();
        for t in 0..6 {
            let mut b = vec![];
            if t < 5 {
                b.push((0, 0));
            }
            if (2..4).contains(&t) {
                b.push((1, 1));
            }
            stack.push(frame(&b));
        }
        let s = burn_time_per_pixel(&stack, 1.0).unwrap();
        let mut values = s.values().to_vec();
        values.sort_by(f64::total_cmp);
        assert_eq!(values, vec![2.0, 5.0]);

        // At 2 Hz the same counts halve in seconds.
        let s2 = burn_time_per_pixel(&stack, 2.0).unwrap();
        let mut v2 = s2.values().to_vec();
        v2.sort_by(f64::total_cmp);
        assert_eq!(v2, vec![1.0, 2.5]);
    }

    #[test]
    fn burn_time_invariant_under_zero_frames() {
        let burning = mask_from(&[(0, 0)], 2, 1);
        let mut stack = vec![compose_labels(Some(&burning), None, None).unwrap()];
        let base = burn_time_per_pixel(&stack, 1.0).unwrap();
        stack.push(compose_labels(Some(&BinaryMask::new(2, 1)), None, None).unwrap());
        stack.push(compose_labels(Some(&BinaryMask::new(2, 1)), None, None).unwrap());
        let extended = burn_time_per_pixel(&stack, 1.0).unwrap();
        assert_eq!(base.values(), extended.values());
    }

    fn sample_bundle(selection: ExportSelection) -> DatasetBundle {
        let grid = LabelGrid::new(3, 2, vec![0, 1, 2, 3, 0, 1]).unwrap();
        let config = serde_json::json!({"alpha": 1.0 / 3.0, "eps": 20.0});
        DatasetBundle {
            labels: vec![grid.clone(), grid],
            boundaries: vec![
                vec![(0, Point::new(1, 2)), (1, Point::new(3, 4))],
                vec![(0, Point::new(5, 6))],
            ],
            velocities: vec![VelocityRecord {
                t_index: 0,
                region_id: 1,
                sx: 3,
                sy: 4,
                vx: 0.1,
                vy: -2.625,
                longitudinal: 0.1,
                transverse: 2.625,
            }],
            fits: vec![FitResult {
                family: Family::Exponential,
                method: FitMethod::MomentMatching,
                lambda: 0.176,
                k: None,
                credible_lambda: None,
                nrmse: Some(0.03),
                seed: None,
                diagnostics: None,
            }],
            manifest: Manifest {
                version: "0.1.0".into(),
                seed: 42,
                config_hash: config_hash(&config),
                config,
                input_checksums: BTreeMap::from([("frame_000000.png".into(), "ab".into())]),
                timesteps: 2,
                exports: selection,
            },
        }
    }

    #[test]
    fn bundle_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let bundle = sample_bundle(ExportSelection::default());
        let manifest_path = write_bundle(&bundle, dir.path()).unwrap();
        assert!(manifest_path.ends_with("manifest.json"));
        let back = read_bundle(dir.path()).unwrap();
        assert_eq!(bundle, back);
    }

    #[test]
    fn velocity_toggle_controls_file_creation() {
        let dir = tempfile::tempdir().unwrap();
        let mut bundle = sample_bundle(ExportSelection { velocity: false, ..Default::default() });
        bundle.velocities.clear();
        write_bundle(&bundle, dir.path()).unwrap();
        assert!(!dir.path().join("velocity.csv").exists());
        assert!(dir.path().join("labels/t000000.csv").exists());

        // Enabled but empty: header-only file.
        let dir2 = tempfile::tempdir().unwrap();
        let mut bundle2 = sample_bundle(ExportSelection::default());
        bundle2.velocities.clear();
        write_bundle(&bundle2, dir2.path()).unwrap();
        let text = std::fs::read_to_string(dir2.path().join("velocity.csv")).unwrap();
        assert_eq!(text, "t,region,sx,sy,vx,vy,longitudinal,transverse\n");
    }

    #[test]
    fn config_hash_changes_iff_config_does() {
        let a = serde_json::json!({"eps": 20.0, "alpha": 0.3333});
        let b = serde_json::json!({"alpha": 0.3333, "eps": 20.0});
        // Key order does not matter.
        assert_eq!(config_hash(&a), config_hash(&b));
        let c = serde_json::json!({"alpha": 0.3333, "eps": 20.5});
        assert_ne!(config_hash(&a), config_hash(&c));
    }

    #[test]
    fn rewrite_is_byte_identical() {
        let dir1 = tempfile::tempdir().unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        let bundle = sample_bundle(ExportSelection::default());
        write_bundle(&bundle, dir1.path()).unwrap();
        write_bundle(&bundle, dir2.path()).unwrap();
        for rel in ["labels/t000000.csv", "boundaries/t000001.csv", "velocity.csv", "fits.json", "manifest.json"] {
            let a = std::fs::read(dir1.path().join(rel)).unwrap();
            let b = std::fs::read(dir2.path().join(rel)).unwrap();
            assert_eq!(a, b, "{rel}");
        }
    }
}
