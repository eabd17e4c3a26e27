//! Frame loading, subsampling, color conversion, and ROI cropping.
//!
//! A sequence lives in a directory of lexicographically ordered files:
//! `frame_%06d.png` for visual data or `frame_%06d.csv` for infrared
//! temperature grids (comma-separated floats, one row per pixel row, no
//! header). Video containers are deliberately unsupported; frames must be
//! pre-extracted.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Visual,
    Infrared,
}

impl fmt::Display for FrameKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameKind::Visual => write!(f, "visual"),
            FrameKind::Infrared => write!(f, "infrared"),
        }
    }
}

/// Pixel payload of one frame, row-major.
#[derive(Debug, Clone, PartialEq)]
pub enum FrameData {
    /// (R, G, B) per pixel, each channel in 0..=255.
    Visual(Vec<[u8; 3]>),
    /// Scalar temperature per pixel in whatever unit the source uses.
    Infrared(Vec<f64>),
}

/// One timestamped image of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// Sample ordinal within the subsampled sequence (0, 1, 2, ...).
    pub index: usize,
    /// `index / sample_rate_hz` seconds.
    pub timestamp_s: f64,
    pub width: usize,
    pub height: usize,
    pub data: FrameData,
}

impl Frame {
    pub fn visual(index: usize, timestamp_s: f64, width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if pixels.len() != width * height || width == 0 || height == 0 {
            return Err(Error::DimensionMismatch {
                context: "visual frame construction".into(),
                expected_w: width,
                expected_h: height,
                got_w: pixels.len(),
                got_h: 1,
            });
        }
        Ok(Frame { index, timestamp_s, width, height, data: FrameData::Visual(pixels) })
    }

    pub fn infrared(index: usize, timestamp_s: f64, width: usize, height: usize, temps: Vec<f64>) -> Result<Self> {
        if temps.len() != width * height || width == 0 || height == 0 {
            return Err(Error::DimensionMismatch {
                context: "infrared frame construction".into(),
                expected_w: width,
                expected_h: height,
                got_w: temps.len(),
                got_h: 1,
            });
        }
        Ok(Frame { index, timestamp_s, width, height, data: FrameData::Infrared(temps) })
    }

    pub fn kind(&self) -> FrameKind {
        match self.data {
            FrameData::Visual(_) => FrameKind::Visual,
            FrameData::Infrared(_) => FrameKind::Infrared,
        }
    }

    pub fn rgb(&self, x: usize, y: usize) -> Option<[u8; 3]> {
        match &self.data {
            FrameData::Visual(px) => px.get(y * self.width + x).copied(),
            FrameData::Infrared(_) => None,
        }
    }

    pub fn temperature(&self, x: usize, y: usize) -> Option<f64> {
        match &self.data {
            FrameData::Infrared(t) => t.get(y * self.width + x).copied(),
            FrameData::Visual(_) => None,
        }
    }
}

/// Rectangle in pixel coordinates, origin top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl Rect {
    pub fn fits(&self, width: usize, height: usize) -> bool {
        self.width > 0
            && self.height > 0
            && self.x.checked_add(self.width).is_some_and(|r| r <= width)
            && self.y.checked_add(self.height).is_some_and(|b| b <= height)
    }

    /// Intersection of two rectangles, if non-empty.
    pub fn intersect(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = (self.x + self.width).min(other.x + other.width);
        let y1 = (self.y + self.height).min(other.y + other.height);
        (x1 > x0 && y1 > y0).then(|| Rect { x: x0, y: y0, width: x1 - x0, height: y1 - y0 })
    }
}

/// Capture and sampling metadata shared by a whole sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMeta {
    /// Native capture rate `f` in Hz.
    pub frame_rate_hz: f64,
    /// Analysis rate `f_s` in Hz; must divide `f` to an integer stride.
    pub sample_rate_hz: f64,
    /// Spatial resolution in px/cm.
    pub resolution_px_per_cm: f64,
    /// Pixel extent along the primary spread direction.
    pub fov_px: u32,
    /// Optional region of interest applied after loading.
    pub roi: Option<Rect>,
}

impl SequenceMeta {
    pub fn validate(&self) -> Result<()> {
        if !self.frame_rate_hz.is_finite() || self.frame_rate_hz <= 0.0 {
            return Err(Error::Config(format!("frame_rate_hz must be positive, got {}", self.frame_rate_hz)));
        }
        if !self.sample_rate_hz.is_finite() || self.sample_rate_hz <= 0.0 || self.sample_rate_hz > self.frame_rate_hz {
            return Err(Error::Config(format!(
                "sample_rate_hz must satisfy 0 < f_s <= f, got f_s={} f={}",
                self.sample_rate_hz, self.frame_rate_hz
            )));
        }
        sample_stride(self.frame_rate_hz, self.sample_rate_hz)?;
        if !self.resolution_px_per_cm.is_finite() || self.resolution_px_per_cm <= 0.0 {
            return Err(Error::Config(format!(
                "resolution_px_per_cm must be positive, got {}",
                self.resolution_px_per_cm
            )));
        }
        if self.fov_px == 0 {
            return Err(Error::Config("fov_px must be positive".into()));
        }
        Ok(())
    }

    pub fn stride(&self) -> Result<usize> {
        sample_stride(self.frame_rate_hz, self.sample_rate_hz)
    }
}

/// Frame stride implied by subsampling `f` down to `f_s`.
///
/// `round(f / f_s)` must reproduce `f / f_s` to within 1e-9 or the
/// subsampling would drift off the native frame grid.
pub fn sample_stride(frame_rate_hz: f64, sample_rate_hz: f64) -> Result<usize> {
    if !frame_rate_hz.is_finite() || !sample_rate_hz.is_finite() || frame_rate_hz <= 0.0 || sample_rate_hz <= 0.0 {
        return Err(Error::Config("sampling rates must be positive".into()));
    }
    let ratio = frame_rate_hz / sample_rate_hz;
    let stride = ratio.round();
    if (ratio - stride).abs() >= 1e-9 {
        return Err(Error::Config(format!(
            "sample rate {sample_rate_hz} Hz does not divide frame rate {frame_rate_hz} Hz to an integer stride (f/f_s = {ratio})"
        )));
    }
    if stride < 1.0 {
        return Err(Error::Config("sample rate must not exceed frame rate".into()));
    }
    Ok(stride as usize)
}

/// HSV triple with hue in degrees [0, 360), saturation and value in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HsvPixel {
    pub h: f64,
    pub s: f64,
    pub v: f64,
}

/// Standard hexcone RGB → HSV conversion. Achromatic pixels get hue 0.
pub fn rgb_to_hsv(p: [u8; 3]) -> HsvPixel {
    let r = p[0] as f64 / 255.0;
    let g = p[1] as f64 / 255.0;
    let b = p[2] as f64 / 255.0;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;

    let h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    let h = if h >= 360.0 { h - 360.0 } else { h };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    HsvPixel { h, s, v: max }
}

/// Sub-grid copy; spatial metadata (resolution) is untouched by cropping.
pub fn crop(frame: &Frame, roi: &Rect) -> Result<Frame> {
    if !roi.fits(frame.width, frame.height) {
        return Err(Error::Bounds(format!(
            "roi {}x{}+{}+{} does not fit frame {}x{}",
            roi.width, roi.height, roi.x, roi.y, frame.width, frame.height
        )));
    }
    let data = match &frame.data {
        FrameData::Visual(px) => {
            let mut out = Vec::with_capacity(roi.width * roi.height);
            for y in roi.y..roi.y + roi.height {
                let row = &px[y * frame.width + roi.x..y * frame.width + roi.x + roi.width];
                out.extend_from_slice(row);
            }
            FrameData::Visual(out)
        }
        FrameData::Infrared(t) => {
            let mut out = Vec::with_capacity(roi.width * roi.height);
            for y in roi.y..roi.y + roi.height {
                let row = &t[y * frame.width + roi.x..y * frame.width + roi.x + roi.width];
                out.extend_from_slice(row);
            }
            FrameData::Infrared(out)
        }
    };
    Ok(Frame {
        index: frame.index,
        timestamp_s: frame.timestamp_s,
        width: roi.width,
        height: roi.height,
        data,
    })
}

/// Frame files of a sequence directory in lexicographic order.
pub fn frame_files(directory: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(directory)
        .map_err(|e| Error::Io { path: directory.to_path_buf(), source: e })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            let ext = p.extension().and_then(|e| e.to_str()).unwrap_or("");
            name.starts_with("frame_") && (ext.eq_ignore_ascii_case("png") || ext.eq_ignore_ascii_case("csv"))
        })
        .collect();
    files.sort();
    Ok(files)
}

/// Load a frame sequence from `directory`, subsampled at the meta's stride.
///
/// Frames are taken at lexicographic list positions 0, stride, 2·stride, ...
/// and re-indexed 0, 1, 2, ... with timestamps `index / sample_rate_hz`.
pub fn load_sequence(directory: &Path, meta: &SequenceMeta) -> Result<Vec<Frame>> {
    meta.validate()?;
    let stride = meta.stride()?;

    let files = frame_files(directory)?;
    if files.is_empty() {
        return Err(Error::EmptyInput { dir: directory.to_path_buf() });
    }

    let mut frames = Vec::new();
    let mut dims: Option<(usize, usize)> = None;
    for (ordinal, pos) in (0..files.len()).step_by(stride).enumerate() {
        let path = &files[pos];
        let timestamp_s = ordinal as f64 / meta.sample_rate_hz;
        let frame = match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("png") => load_png(path, ordinal, timestamp_s)?,
            _ => load_csv_grid(path, ordinal, timestamp_s)?,
        };
        match dims {
            None => {
                if let Some(roi) = &meta.roi {
                    if !roi.fits(frame.width, frame.height) {
                        return Err(Error::Bounds(format!(
                            "roi does not fit frames of size {}x{}",
                            frame.width, frame.height
                        )));
                    }
                }
                dims = Some((frame.width, frame.height));
            }
            Some((w, h)) => {
                if (frame.width, frame.height) != (w, h) {
                    return Err(Error::DimensionMismatch {
                        context: format!("frame file {}", path.display()),
                        expected_w: w,
                        expected_h: h,
                        got_w: frame.width,
                        got_h: frame.height,
                    });
                }
            }
        }
        frames.push(frame);
    }
    Ok(frames)
}

fn load_png(path: &Path, index: usize, timestamp_s: f64) -> Result<Frame> {
    let img = image::open(path)
        .map_err(|e| Error::Load { file: path.to_path_buf(), reason: e.to_string() })?
        .to_rgb8();
    let (w, h) = (img.width() as usize, img.height() as usize);
    let pixels = img.pixels().map(|p| [p.0[0], p.0[1], p.0[2]]).collect();
    Frame::visual(index, timestamp_s, w, h, pixels)
}

fn load_csv_grid(path: &Path, index: usize, timestamp_s: f64) -> Result<Frame> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Load { file: path.to_path_buf(), reason: e.to_string() })?;
    let mut temps = Vec::new();
    let mut width = None;
    let mut height = 0usize;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|cell| {
                cell.trim().parse::<f64>().map_err(|e| Error::Load {
                    file: path.to_path_buf(),
                    reason: format!("line {}: bad value {cell:?}: {e}", lineno + 1),
                })
            })
            .collect::<Result<_>>()?;
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Load {
                    file: path.to_path_buf(),
                    reason: format!("ragged row at line {}: {} values, expected {w}", lineno + 1, row.len()),
                })
            }
            _ => {}
        }
        temps.extend(row);
        height += 1;
    }
    let width = width.filter(|&w| w > 0).ok_or_else(|| Error::Load {
        file: path.to_path_buf(),
        reason: "empty grid".into(),
    })?;
    Frame::infrared(index, timestamp_s, width, height, temps)
}
