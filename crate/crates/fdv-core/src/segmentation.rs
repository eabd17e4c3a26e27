//! Binary segmentation of frames.
//!
//! Visual frames pass a pixel through two interval tests — one in RGB and
//! one in HSV — and keep it only when both succeed. The conjunction is what
//! separates fire from fuel beds that share its RGB values but not its
//! saturation. Infrared frames are thresholded against labelled temperature
//! bands.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagery::{rgb_to_hsv, Frame, FrameData, FrameKind};

/// Per-pixel boolean grid, row-major, dimensions matching its source frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize) -> Self {
        BinaryMask { width, height, bits: vec![false; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        BinaryMask { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Set pixels in row-major order.
    pub fn set_pixels(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// True when every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.bits.iter().zip(other.bits.iter()).all(|(a, b)| !*a || *b)
    }

    /// Pixelwise conjunction of two masks of equal dimensions.
    pub fn intersect(&self, other: &BinaryMask) -> crate::error::Result<BinaryMask> {
        if (self.width, self.height) != (other.width, other.height) {
            return Err(Error::DimensionMismatch {
                context: "mask intersection".into(),
                expected_w: self.width,
                expected_h: self.height,
                got_w: other.width,
                got_h: other.height,
            });
        }
        Ok(BinaryMask {
            width: self.width,
            height: self.height,
            bits: self.bits.iter().zip(other.bits.iter()).map(|(a, b)| *a && *b).collect(),
        })
    }
}

/// RGB and HSV interval bounds for visual segmentation.
///
/// The hue interval may wrap through 360→0 (`h_lo > h_hi`); all other
/// channels are plain closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorThresholds {
    pub rgb_lo: [u8; 3],
    pub rgb_hi: [u8; 3],
    /// (hue °, saturation, value) lower bounds.
    pub hsv_lo: (f64, f64, f64),
    /// (hue °, saturation, value) upper bounds.
    pub hsv_hi: (f64, f64, f64),
}

impl ColorThresholds {
    /// Accept-everything thresholds, useful for isolating one family of tests.
    pub fn full_range() -> Self {
        ColorThresholds {
            rgb_lo: [0, 0, 0],
            rgb_hi: [255, 255, 255],
            hsv_lo: (0.0, 0.0, 0.0),
            hsv_hi: (360.0, 1.0, 1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for c in 0..3 {
            if self.rgb_lo[c] > self.rgb_hi[c] {
                return Err(Error::Config(format!(
                    "rgb channel {c}: lo {} > hi {}",
                    self.rgb_lo[c], self.rgb_hi[c]
                )));
            }
        }
        let (h_lo, s_lo, v_lo) = self.hsv_lo;
        let (h_hi, s_hi, v_hi) = self.hsv_hi;
        for (name, lo, hi) in [("saturation", s_lo, s_hi), ("value", v_lo, v_hi)] {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(Error::Config(format!("hsv {name} bounds [{lo}, {hi}] invalid")));
            }
        }
        // Hue may wrap, so lo > hi is legal; both ends must still be angles.
        for h in [h_lo, h_hi] {
            if !(0.0..=360.0).contains(&h) {
                return Err(Error::Config(format!("hue bound {h} outside [0, 360]")));
            }
        }
        Ok(())
    }

    pub fn accepts(&self, rgb: [u8; 3]) -> bool {
        self.accepts_rgb(rgb) && self.accepts_hsv(rgb)
    }

    pub fn accepts_rgb(&self, rgb: [u8; 3]) -> bool {
        (0..3).all(|c| self.rgb_lo[c] <= rgb[c] && rgb[c] <= self.rgb_hi[c])
    }

    pub fn accepts_hsv(&self, rgb: [u8; 3]) -> bool {
        let hsv = rgb_to_hsv(rgb);
        let hue_ok = if self.hsv_lo.0 <= self.hsv_hi.0 {
            self.hsv_lo.0 <= hsv.h && hsv.h <= self.hsv_hi.0
        } else {
            hsv.h >= self.hsv_lo.0 || hsv.h <= self.hsv_hi.0
        };
        hue_ok
            && self.hsv_lo.1 <= hsv.s
            && hsv.s <= self.hsv_hi.1
            && self.hsv_lo.2 <= hsv.v
            && hsv.v <= self.hsv_hi.2
    }
}

/// Thermal class labels. `Burning` and `BurnedCooling` correspond to label
/// grid codes 1 and 2; `Preheated` is segmentation-only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalLabel {
    Preheated,
    Burning,
    BurnedCooling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalBand {
    pub label: ThermalLabel,
    pub t_lo: f64,
    pub t_hi: f64,
}

/// Ascending, pairwise-disjoint temperature bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<ThermalBand>", into = "Vec<ThermalBand>")]
pub struct ThermalBands {
    bands: Vec<ThermalBand>,
}

impl ThermalBands {
    pub fn new(bands: Vec<ThermalBand>) -> Result<Self> {
        if bands.is_empty() {
            return Err(Error::Config("thermal bands must not be empty".into()));
        }
        for b in &bands {
            if !b.t_lo.is_finite() || !b.t_hi.is_finite() || b.t_lo >= b.t_hi {
                return Err(Error::Config(format!(
                    "thermal band {:?}: t_lo {} must be below t_hi {}",
                    b.label, b.t_lo, b.t_hi
                )));
            }
        }
        for pair in bands.windows(2) {
            if pair[0].t_hi > pair[1].t_lo {
                return Err(Error::Config(format!(
                    "thermal bands must be ascending and disjoint: [{}, {}) overlaps [{}, {})",
                    pair[0].t_lo, pair[0].t_hi, pair[1].t_lo, pair[1].t_hi
                )));
            }
        }
        let mut labels: Vec<ThermalLabel> = bands.iter().map(|b| b.label).collect();
        labels.dedup();
        if labels.len() != bands.len() {
            return Err(Error::Config("duplicate thermal band label".into()));
        }
        Ok(ThermalBands { bands })
    }

    pub fn bands(&self) -> &[ThermalBand] {
        &self.bands
    }

    pub fn band_for(&self, label: ThermalLabel) -> Option<&ThermalBand> {
        self.bands.iter().find(|b| b.label == label)
    }
}

impl TryFrom<Vec<ThermalBand>> for ThermalBands {
    type Error = Error;
    fn try_from(bands: Vec<ThermalBand>) -> Result<Self> {
        ThermalBands::new(bands)
    }
}

impl From<ThermalBands> for Vec<ThermalBand> {
    fn from(b: ThermalBands) -> Self {
        b.bands
    }
}

/// Visual segmentation: a bit is set iff the pixel passes the RGB interval
/// test AND the HSV interval test.
pub fn segment_visual(frame: &Frame, th: &ColorThresholds) -> Result<BinaryMask> {
    let FrameData::Visual(pixels) = &frame.data else {
        return Err(Error::KindMismatch { expected: FrameKind::Visual, got: frame.kind() });
    };
    let bits = pixels.iter().map(|&p| th.accepts(p)).collect();
    Ok(BinaryMask { width: frame.width, height: frame.height, bits })
}

/// Infrared segmentation: a bit is set iff the temperature falls in the
/// half-open interval `[t_lo, t_hi)` of the band carrying `target`.
pub fn segment_infrared(frame: &Frame, bands: &ThermalBands, target: ThermalLabel) -> Result<BinaryMask> {
    let FrameData::Infrared(temps) = &frame.data else {
        return Err(Error::KindMismatch { expected: FrameKind::Infrared, got: frame.kind() });
    };
    let band = bands
        .band_for(target)
        .ok_or_else(|| Error::Config(format!("no thermal band carries label {target:?}")))?;
    let bits = temps.iter().map(|&t| band.t_lo <= t && t < band.t_hi).collect();
    Ok(BinaryMask { width: frame.width, height: frame.height, bits })
}

/// Threshold specification for either frame kind.
#[derive(Debug, Clone, PartialEq)]
pub enum SegmentationSpec {
    Color(ColorThresholds),
    Thermal { bands: ThermalBands, target: ThermalLabel },
}

pub fn segment(frame: &Frame, spec: &SegmentationSpec) -> Result<BinaryMask> {
    match spec {
        SegmentationSpec::Color(th) => segment_visual(frame, th),
        SegmentationSpec::Thermal { bands, target } => segment_infrared(frame, bands, *target),
    }
}

/// Tint applied to mask pixels in calibration previews.
const PREVIEW_TINT: [u8; 3] = [255, 0, 255];

/// Source frame with mask pixels tinted 50% toward magenta, as RGB rows.
/// Infrared frames are rendered min-max normalized to grayscale first.
pub fn overlay_mask(frame: &Frame, mask: &BinaryMask) -> Result<Vec<[u8; 3]>> {
    if (mask.width, mask.height) != (frame.width, frame.height) {
        return Err(Error::DimensionMismatch {
            context: "overlay mask".into(),
            expected_w: frame.width,
            expected_h: frame.height,
            got_w: mask.width,
            got_h: mask.height,
        });
    }
    let base: Vec<[u8; 3]> = match &frame.data {
        FrameData::Visual(px) => px.clone(),
        FrameData::Infrared(t) => {
            let (lo, hi) = t.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
            let span = if hi > lo { hi - lo } else { 1.0 };
            t.iter()
                .map(|&v| {
                    let g = (((v - lo) / span) * 255.0).round() as u8;
                    [g, g, g]
                })
                .collect()
        }
    };
    Ok(base
        .into_iter()
        .zip(mask.bits.iter())
        .map(|(p, &m)| {
            if m {
                [
                    ((p[0] as u16 + PREVIEW_TINT[0] as u16) / 2) as u8,
                    ((p[1] as u16 + PREVIEW_TINT[1] as u16) / 2) as u8,
                    ((p[2] as u16 + PREVIEW_TINT[2] as u16) / 2) as u8,
                ]
            } else {
                p
            }
        })
        .collect())
}

/// Write a threshold-tuning preview: the frame with mask pixels tinted.
pub fn calibrate_preview(frame: &Frame, spec: &SegmentationSpec, out_path: &Path) -> Result<()> {
    let mask = segment(frame, spec)?;
    let pixels = overlay_mask(frame, &mask)?;
    let mut img = image::RgbImage::new(frame.width as u32, frame.height as u32);
    for (i, p) in pixels.iter().enumerate() {
        img.put_pixel((i % frame.width) as u32, (i / frame.width) as u32, image::Rgb(*p));
    }
    img.save(out_path)
        .map_err(|e| Error::Io { path: out_path.to_path_buf(), source: std::io::Error::other(e.to_string()) })
}
