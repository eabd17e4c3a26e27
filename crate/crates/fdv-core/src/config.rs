//! Single JSON configuration document driving the whole pipeline.
//!
//! Every numeric field is validated against its module's preconditions by
//! [`PipelineConfig::validate`] before any frame is read. Defaults are
//! embedded and can be dumped with `fdv config init`; they match the
//! palette of the synthetic scenario generator so a freshly generated
//! sequence processes out of the box.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::cleaning::CleaningSchedule;
use crate::error::{Error, Result};
use crate::imagery::SequenceMeta;
use crate::inpaint::InpaintMethod;
use crate::export::ExportSelection;
use crate::segmentation::{ColorThresholds, ThermalBand, ThermalBands, ThermalLabel};
use crate::stats::{Family, FitMethod, McmcConfig};
use crate::synth;

/// Visual class to hand to clustering/boundary/tracking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VisualClass {
    #[default]
    Burning,
    Smoke,
    Burned,
}

/// Per-kind segmentation thresholds.
///
/// The optional `refine` set is a second RGB∧HSV box applied conjunctively
/// to the burning class, standing in for an interactive second threshold
/// pass after inspecting the HSV view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
pub enum SegmentationConfig {
    Visual {
        burning: ColorThresholds,
        #[serde(default)]
        refine: Option<ColorThresholds>,
        #[serde(default)]
        smoke: Option<ColorThresholds>,
        #[serde(default)]
        burned: Option<ColorThresholds>,
        #[serde(default)]
        target: VisualClass,
    },
    Infrared {
        bands: ThermalBands,
        target: ThermalLabel,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClusteringConfig {
    pub eps: f64,
    pub min_pts: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackingConfig {
    pub enabled: bool,
    /// Matching range in px. `None` derives the Nyquist bound
    /// u_max·dt·res = fov/2.
    #[serde(default)]
    pub max_dist_px: Option<f64>,
    /// Spread axis in degrees from image +x.
    pub axis_deg: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTarget {
    PositiveLongitudinal,
    Magnitude,
    BurnTime,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub target: FitTarget,
    pub family: Family,
    pub method: FitMethod,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FittingConfig {
    pub enabled: bool,
    pub fits: Vec<FitSpec>,
    pub mcmc: McmcConfig,
    /// Histogram bin count; `None` selects Freedman–Diaconis (min 10).
    #[serde(default)]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case", deny_unknown_fields)]
pub enum OcclusionSource {
    /// PNG whose nonzero pixels mark the fill region.
    File { path: PathBuf },
    /// Derive the mask from color thresholds (e.g. a tree-green range).
    Auto { thresholds: ColorThresholds },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InpaintConfig {
    pub enabled: bool,
    pub method: InpaintMethod,
    pub occlusion: OcclusionSource,
    pub dt: f64,
    pub max_iters: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub meta: SequenceMeta,
    pub segmentation: SegmentationConfig,
    pub cleaning: CleaningSchedule,
    pub clustering: ClusteringConfig,
    /// α-shape concavity, 1/px.
    pub alpha: f64,
    pub tracking: TrackingConfig,
    pub fitting: FittingConfig,
    pub inpaint: InpaintConfig,
    pub export: ExportSelection,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            meta: SequenceMeta {
                frame_rate_hz: 1.0,
                sample_rate_hz: 1.0,
                resolution_px_per_cm: 1.0,
                fov_px: 256,
                roi: None,
            },
            segmentation: SegmentationConfig::Visual {
                burning: synth::fire_thresholds(),
                refine: None,
                smoke: Some(synth::smoke_thresholds()),
                burned: Some(synth::burned_thresholds()),
                target: VisualClass::Burning,
            },
            cleaning: CleaningSchedule::default_schedule(),
            clustering: ClusteringConfig { eps: 20.0, min_pts: 10 },
            alpha: crate::boundary::DEFAULT_ALPHA,
            tracking: TrackingConfig { enabled: true, max_dist_px: None, axis_deg: 0.0 },
            fitting: FittingConfig {
                enabled: true,
                fits: vec![
                    FitSpec {
                        target: FitTarget::PositiveLongitudinal,
                        family: Family::Exponential,
                        method: FitMethod::Mcmc,
                    },
                    FitSpec { target: FitTarget::BurnTime, family: Family::Erlang, method: FitMethod::Mcmc },
                ],
                mcmc: McmcConfig::default(),
                bins: None,
            },
            inpaint: InpaintConfig {
                enabled: false,
                method: InpaintMethod::Harmonic,
                occlusion: OcclusionSource::Auto { thresholds: occluder_thresholds() },
                dt: crate::inpaint::DEFAULT_DT,
                max_iters: crate::inpaint::DEFAULT_MAX_ITERS,
                tol: crate::inpaint::DEFAULT_TOL,
            },
            export: ExportSelection::default(),
            seed: 0,
        }
    }
}

/// Thresholds matching the synthetic occluder color.
fn occluder_thresholds() -> ColorThresholds {
    ColorThresholds {
        rgb_lo: [70, 40, 0],
        rgb_hi: [110, 80, 40],
        hsv_lo: (20.0, 0.6, 0.2),
        hsv_hi: (50.0, 0.9, 0.5),
    }
}

/// Default thermal bands for infrared configs generated by `config init`.
pub fn default_thermal_bands() -> ThermalBands {
    ThermalBands::new(vec![
        ThermalBand { label: ThermalLabel::Preheated, t_lo: 50.0, t_hi: 150.0 },
        ThermalBand { label: ThermalLabel::BurnedCooling, t_lo: 150.0, t_hi: 300.0 },
        ThermalBand { label: ThermalLabel::Burning, t_lo: 300.0, t_hi: 2000.0 },
    ])
    .expect("default bands are valid")
}

impl PipelineConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: PipelineConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config parse error: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Effective matching range: configured value or the Nyquist-derived
    /// u_max·dt·res, which simplifies to fov/2 pixels.
    pub fn max_dist_px(&self) -> f64 {
        self.tracking.max_dist_px.unwrap_or(self.meta.fov_px as f64 / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.meta.validate()?;
        match &self.segmentation {
            SegmentationConfig::Visual { burning, refine, smoke, burned, target } => {
                burning.validate()?;
                if let Some(th) = refine {
                    th.validate()?;
                }
                if let Some(th) = smoke {
                    th.validate()?;
                }
                if let Some(th) = burned {
                    th.validate()?;
                }
                match target {
                    VisualClass::Smoke if smoke.is_none() => {
                        return Err(Error::Config("target class smoke has no thresholds configured".into()))
                    }
                    VisualClass::Burned if burned.is_none() => {
                        return Err(Error::Config("target class burned has no thresholds configured".into()))
                    }
                    _ => {}
                }
            }
            SegmentationConfig::Infrared { bands, target } => {
                if bands.band_for(*target).is_none() {
                    return Err(Error::Config(format!("no thermal band carries the target label {target:?}")));
                }
            }
        }
        // CleaningSchedule and ThermalBands validate at construction.
        if !self.clustering.eps.is_finite() || self.clustering.eps <= 0.0 {
            return Err(Error::Config(format!("clustering eps must be positive, got {}", self.clustering.eps)));
        }
        if self.clustering.min_pts == 0 {
            return Err(Error::Config("clustering min_pts must be at least 1".into()));
        }
        if !self.alpha.is_finite() || self.alpha < 0.0 {
            return Err(Error::Config(format!("alpha must be finite and non-negative, got {}", self.alpha)));
        }
        if let Some(d) = self.tracking.max_dist_px {
            if !d.is_finite() || d <= 0.0 {
                return Err(Error::Config(format!("max_dist_px must be positive, got {d}")));
            }
        }
        if !self.tracking.axis_deg.is_finite() {
            return Err(Error::Config("axis_deg must be finite".into()));
        }
        if self.fitting.enabled {
            self.fitting.mcmc.validate()?;
            if let Some(bins) = self.fitting.bins {
                if bins < 2 {
                    return Err(Error::Config(format!("histogram bins must be at least 2, got {bins}")));
                }
            }
            let needs_tracking = self
                .fitting
                .fits
                .iter()
                .any(|f| matches!(f.target, FitTarget::PositiveLongitudinal | FitTarget::Magnitude));
            if needs_tracking && !self.tracking.enabled {
                return Err(Error::Config(
                    "velocity fits are configured but tracking is disabled".into(),
                ));
            }
        }
        if self.inpaint.enabled {
            if !self.inpaint.dt.is_finite()
                || !self.inpaint.tol.is_finite()
                || self.inpaint.dt <= 0.0
                || self.inpaint.tol <= 0.0
                || self.inpaint.max_iters == 0
            {
                return Err(Error::Config("inpaint dt, tol, and max_iters must be positive".into()));
            }
            if let OcclusionSource::Auto { thresholds } = &self.inpaint.occlusion {
                thresholds.validate()?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_is_valid_and_round_trips() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        let json = cfg.to_json_pretty();
        let back = PipelineConfig::from_json(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn invalid_eps_rejected_before_any_io() {
        let mut cfg = PipelineConfig::default();
        cfg.clustering.eps = 0.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        let json = cfg.to_json_pretty();
        assert!(PipelineConfig::from_json(&json).is_err());
    }

    #[test]
    fn fuzzed_single_field_violations_are_rejected() {
        let base = PipelineConfig::default();

        let mut c = base.clone();
        c.meta.sample_rate_hz = 7.0;
        c.meta.frame_rate_hz = 30.0;
        assert!(c.validate().is_err(), "non-integer stride");

        let mut c = base.clone();
        c.meta.resolution_px_per_cm = -1.0;
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.alpha = f64::NAN;
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.clustering.min_pts = 0;
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.tracking.max_dist_px = Some(0.0);
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.fitting.mcmc.chains = 1;
        assert!(c.validate().is_err());

        let mut c = base.clone();
        c.inpaint.enabled = true;
        c.inpaint.tol = 0.0;
        assert!(c.validate().is_err());

        let mut c = base.clone();
        if let SegmentationConfig::Visual { burning, .. } = &mut c.segmentation {
            burning.hsv_lo.1 = 2.0;
        }
        assert!(c.validate().is_err(), "saturation bound above 1");

        let mut c = base.clone();
        c.tracking.enabled = false;
        assert!(c.validate().is_err(), "velocity fit without tracking");
        c.fitting.fits.retain(|f| f.target == FitTarget::BurnTime);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn malformed_schedule_rejected_at_parse_time() {
        let mut value: serde_json::Value = serde_json::to_value(PipelineConfig::default()).unwrap();
        value["cleaning"] = serde_json::json!([
            {"radius": 2, "min_neighbors": 4},
            {"radius": 5, "min_neighbors": 2}
        ]);
        let text = serde_json::to_string(&value).unwrap();
        assert!(PipelineConfig::from_json(&text).is_err(), "radii must decrease");
    }

    #[test]
    fn nyquist_default_matching_range() {
        let mut cfg = PipelineConfig::default();
        cfg.meta.fov_px = 500;
        assert_eq!(cfg.max_dist_px(), 250.0);
        cfg.tracking.max_dist_px = Some(12.5);
        assert_eq!(cfg.max_dist_px(), 12.5);
    }

    #[test]
    fn unknown_fields_rejected() {
        let mut value: serde_json::Value = serde_json::to_value(PipelineConfig::default()).unwrap();
        value["surprise"] = serde_json::json!(1);
        let text = serde_json::to_string(&value).unwrap();
        assert!(PipelineConfig::from_json(&text).is_err());
    }
}
