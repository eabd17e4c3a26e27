//! End-to-end orchestration: load → [inpaint] → segment → clean →
//! cluster → boundary → [track] → [fit] → export, from one config.
//!
//! Frames are processed in parallel where stages permit; every parallel
//! map is order-preserving and every reduction runs in a fixed order, so
//! the same config, seed, and inputs produce byte-identical outputs at
//! any worker count.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::boundary::region_boundary;
use crate::cleaning::clean;
use crate::clustering::{split_regions, Point, PointSet};
use crate::config::{
    FitTarget, OcclusionSource, PipelineConfig, SegmentationConfig, VisualClass,
};
use crate::error::{Error, Result};
use crate::export::{
    burn_time_per_pixel, compose_labels, config_hash, hex_digest, read_bundle, write_bundle, DatasetBundle,
    LabelGrid, Manifest, VelocityRecord,
};
use crate::imagery::{crop, frame_files, load_sequence, Frame, FrameKind};
use crate::inpaint::{auto_occlusion, inpaint, OcclusionMask};
use crate::segmentation::{
    segment_infrared, segment_visual, BinaryMask, SegmentationSpec, ThermalLabel,
};
use crate::stats::{
    mcmc_fit, moment_match, sampling_advisor, summarize, FitMethod, FitResult, RateObservation, SampleSet,
    SamplingReport, Summary,
};
use crate::tracking::{greedy_match, positive_longitudinal, to_velocities, PairStats, VelocitySample};

pub use crate::export::read_bundle as read_dataset;

/// Human-readable outcome of one pipeline run.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RunReport {
    pub frames: usize,
    pub regions_per_frame: Vec<usize>,
    pub boundary_points_per_frame: Vec<usize>,
    pub pair_stats: Vec<PairStats>,
    pub velocity_summary: Option<Summary>,
    pub fits: Vec<FitResult>,
    pub warnings: Vec<String>,
    pub manifest_path: Option<PathBuf>,
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "frames processed: {}", self.frames)?;
        if !self.regions_per_frame.is_empty() {
            let min = self.regions_per_frame.iter().min().unwrap();
            let max = self.regions_per_frame.iter().max().unwrap();
            writeln!(f, "regions per frame: {min}..{max}")?;
        }
        let points: usize = self.boundary_points_per_frame.iter().sum();
        writeln!(f, "boundary points: {points}")?;
        if !self.pair_stats.is_empty() {
            let matched: usize = self.pair_stats.iter().map(|p| p.matched).sum();
            let sources: usize = self.pair_stats.iter().map(|p| p.src_points).sum();
            let rate = if sources > 0 { 100.0 * matched as f64 / sources as f64 } else { 0.0 };
            writeln!(f, "matches: {matched}/{sources} source points ({rate:.1}%)")?;
        }
        if let Some(s) = &self.velocity_summary {
            writeln!(
                f,
                "velocity magnitude: mean {:.4} sd {:.4} max {:.4} (n={})",
                s.mean, s.sd, s.max, s.n
            )?;
        }
        for fit in &self.fits {
            write!(f, "fit {:?} {:?}: lambda={:.6}", fit.family, fit.method, fit.lambda)?;
            if let Some(k) = fit.k {
                write!(f, " k={k}")?;
            }
            if let Some((lo, hi)) = fit.credible_lambda {
                write!(f, " ci95=[{lo:.6}, {hi:.6}]")?;
            }
            match fit.nrmse {
                Some(v) => writeln!(f, " nrmse={v:.6}")?,
                None => writeln!(f, " nrmse=n/a")?,
            }
        }
        if !self.warnings.is_empty() {
            writeln!(f, "warnings ({}):", self.warnings.len())?;
            for w in &self.warnings {
                writeln!(f, "  - {w}")?;
            }
        }
        Ok(())
    }
}

/// Per-frame segmentation products, cleaned.
struct FrameMasks {
    burning: Option<BinaryMask>,
    burned: Option<BinaryMask>,
    smoke: Option<BinaryMask>,
    target: BinaryMask,
}

struct FrameAnalysis {
    masks: FrameMasks,
    regions: Vec<PointSet>,
    /// Boundary points pooled over regions, with their region ids.
    pooled: Vec<(usize, Point)>,
    warnings: Vec<String>,
}

fn segment_classes(cfg: &PipelineConfig, frame: &Frame) -> Result<FrameMasks> {
    match &cfg.segmentation {
        SegmentationConfig::Visual { burning, refine, smoke, burned, target } => {
            if frame.kind() != FrameKind::Visual {
                return Err(Error::KindMismatch { expected: FrameKind::Visual, got: frame.kind() });
            }
            let mut burning_mask = segment_visual(frame, burning)?;
            if let Some(refine) = refine {
                burning_mask = burning_mask.intersect(&segment_visual(frame, refine)?)?;
            }
            let smoke_mask = smoke.as_ref().map(|th| segment_visual(frame, th)).transpose()?;
            let burned_mask = burned.as_ref().map(|th| segment_visual(frame, th)).transpose()?;
            let target_mask = match target {
                VisualClass::Burning => burning_mask.clone(),
                VisualClass::Smoke => smoke_mask.clone().expect("validated: smoke thresholds present"),
                VisualClass::Burned => burned_mask.clone().expect("validated: burned thresholds present"),
            };
            Ok(FrameMasks { burning: Some(burning_mask), burned: burned_mask, smoke: smoke_mask, target: target_mask })
        }
        SegmentationConfig::Infrared { bands, target } => {
            if frame.kind() != FrameKind::Infrared {
                return Err(Error::KindMismatch { expected: FrameKind::Infrared, got: frame.kind() });
            }
            let for_label = |label: ThermalLabel| -> Result<Option<BinaryMask>> {
                bands.band_for(label).map(|_| segment_infrared(frame, bands, label)).transpose()
            };
            let burning = for_label(ThermalLabel::Burning)?;
            let burned = for_label(ThermalLabel::BurnedCooling)?;
            let target_mask = segment_infrared(frame, bands, *target)?;
            Ok(FrameMasks { burning, burned, smoke: None, target: target_mask })
        }
    }
}

fn analyze_frame(cfg: &PipelineConfig, frame: &Frame) -> Result<FrameAnalysis> {
    let raw = segment_classes(cfg, frame)?;
    let masks = FrameMasks {
        burning: raw.burning.map(|m| clean(&m, &cfg.cleaning)),
        burned: raw.burned.map(|m| clean(&m, &cfg.cleaning)),
        smoke: raw.smoke.map(|m| clean(&m, &cfg.cleaning)),
        target: clean(&raw.target, &cfg.cleaning),
    };
    let regions = split_regions(&masks.target, cfg.clustering.eps, cfg.clustering.min_pts)?;

    let mut warnings = Vec::new();
    let mut pooled = Vec::new();
    for (region_id, region) in regions.iter().enumerate() {
        if region.len() < 3 {
            warnings.push(format!(
                "frame {}: region {region_id} has {} points, too few for a boundary",
                frame.index,
                region.len()
            ));
            continue;
        }
        match region_boundary(region, cfg.alpha) {
            Ok(boundary) => {
                pooled.extend(boundary.boundary_points.iter().map(|&p| (region_id, p)));
            }
            Err(Error::DegenerateGeometry(reason)) => {
                warnings.push(format!("frame {}: region {region_id} skipped: {reason}", frame.index));
            }
            Err(other) => return Err(other),
        }
    }
    Ok(FrameAnalysis { masks, regions, pooled, warnings })
}

fn load_occlusion_mask(path: &Path, width: usize, height: usize) -> Result<OcclusionMask> {
    let img = image::open(path)
        .map_err(|e| Error::Load { file: path.to_path_buf(), reason: e.to_string() })?
        .to_rgb8();
    if (img.width() as usize, img.height() as usize) != (width, height) {
        return Err(Error::DimensionMismatch {
            context: format!("occlusion mask {}", path.display()),
            expected_w: width,
            expected_h: height,
            got_w: img.width() as usize,
            got_h: img.height() as usize,
        });
    }
    let mask = BinaryMask::from_fn(width, height, |x, y| {
        let p = img.get_pixel(x as u32, y as u32).0;
        p[0] > 0 || p[1] > 0 || p[2] > 0
    });
    Ok(OcclusionMask::new(mask))
}

fn apply_inpainting(cfg: &PipelineConfig, frames: Vec<Frame>, warnings: &mut Vec<String>) -> Result<Vec<Frame>> {
    if !cfg.inpaint.enabled || frames.is_empty() {
        return Ok(frames);
    }
    let file_mask = match &cfg.inpaint.occlusion {
        OcclusionSource::File { path } => Some(load_occlusion_mask(path, frames[0].width, frames[0].height)?),
        OcclusionSource::Auto { .. } => None,
    };
    let outcomes: Vec<(Frame, Option<String>)> = frames
        .par_iter()
        .map(|frame| -> Result<(Frame, Option<String>)> {
            let occ = match (&cfg.inpaint.occlusion, &file_mask) {
                (_, Some(mask)) => mask.clone(),
                (OcclusionSource::Auto { thresholds }, None) => auto_occlusion(frame, thresholds)
                    .map_err(|e| e.in_stage("inpaint", Some(frame.index)))?,
                _ => unreachable!(),
            };
            let out = inpaint(frame, &occ, cfg.inpaint.method, cfg.inpaint.dt, cfg.inpaint.max_iters, cfg.inpaint.tol)
                .map_err(|e| e.in_stage("inpaint", Some(frame.index)))?;
            let warn = (!out.converged).then(|| {
                format!(
                    "frame {}: inpainting stopped at {} iterations with residual {:.3e}",
                    frame.index, out.iterations, out.max_residual
                )
            });
            Ok((out.frame, warn))
        })
        .collect::<Result<_>>()?;
    let mut result = Vec::with_capacity(outcomes.len());
    for (frame, warn) in outcomes {
        warnings.extend(warn);
        result.push(frame);
    }
    Ok(result)
}

struct Analyzed {
    frames: Vec<Frame>,
    analyses: Vec<FrameAnalysis>,
    warnings: Vec<String>,
}

fn load_and_analyze(cfg: &PipelineConfig, input_dir: &Path) -> Result<Analyzed> {
    let mut frames = load_sequence(input_dir, &cfg.meta).map_err(|e| e.in_stage("load", None))?;
    if let Some(roi) = &cfg.meta.roi {
        frames = frames
            .iter()
            .map(|f| crop(f, roi))
            .collect::<Result<_>>()
            .map_err(|e| e.in_stage("crop", None))?;
    }
    let mut warnings = Vec::new();
    let frames = apply_inpainting(cfg, frames, &mut warnings)?;
    let analyses: Vec<FrameAnalysis> = frames
        .par_iter()
        .map(|frame| analyze_frame(cfg, frame).map_err(|e| e.in_stage("segment", Some(frame.index))))
        .collect::<Result<_>>()?;
    for a in &analyses {
        warnings.extend(a.warnings.iter().cloned());
    }
    Ok(Analyzed { frames, analyses, warnings })
}

struct Tracked {
    records: Vec<VelocityRecord>,
    samples: Vec<VelocitySample>,
    pair_stats: Vec<PairStats>,
    warnings: Vec<String>,
}

fn track(cfg: &PipelineConfig, analyses: &[FrameAnalysis]) -> Result<Tracked> {
    if analyses.len() < 2 {
        return Err(Error::InsufficientSequence(format!(
            "tracking needs at least 2 frames, got {}",
            analyses.len()
        ))
        .in_stage("track", None));
    }
    let dt = 1.0 / cfg.meta.sample_rate_hz;
    let max_dist = cfg.max_dist_px();
    let axis = cfg.tracking.axis_deg;
    let res = cfg.meta.resolution_px_per_cm;

    let mut records = Vec::new();
    let mut samples = Vec::new();
    let mut pair_stats = Vec::new();
    let mut warnings = Vec::new();
    for t in 0..analyses.len() - 1 {
        let src: Vec<Point> = analyses[t].pooled.iter().map(|&(_, p)| p).collect();
        let dst: Vec<Point> = analyses[t + 1].pooled.iter().map(|&(_, p)| p).collect();
        if src.is_empty() || dst.is_empty() {
            warnings.push(format!("frame pair {t}->{}: empty boundary, no matches", t + 1));
            pair_stats.push(PairStats { src_points: src.len(), dst_points: dst.len(), matched: 0 });
            continue;
        }
        let region_of: HashMap<Point, usize> = analyses[t].pooled.iter().map(|&(r, p)| (p, r)).collect();
        let field = greedy_match(&src, &dst, max_dist, dt).map_err(|e| e.in_stage("track", Some(t)))?;
        let velocities = to_velocities(&field, res, axis).map_err(|e| e.in_stage("track", Some(t)))?;
        pair_stats.push(PairStats { src_points: src.len(), dst_points: dst.len(), matched: field.pairs.len() });
        for (pair, v) in field.pairs.iter().zip(velocities.iter()) {
            records.push(VelocityRecord {
                t_index: t,
                region_id: region_of[&pair.src],
                sx: pair.src.x,
                sy: pair.src.y,
                vx: v.vx,
                vy: v.vy,
                longitudinal: v.longitudinal,
                transverse: v.transverse,
            });
        }
        samples.extend(velocities);
    }
    Ok(Tracked { records, samples, pair_stats, warnings })
}

fn run_fits(
    cfg: &PipelineConfig,
    samples: &[VelocitySample],
    labels: &[LabelGrid],
    warnings: &mut Vec<String>,
) -> Result<Vec<FitResult>> {
    let mut fits = Vec::new();
    let mut mcmc_cfg = cfg.fitting.mcmc.clone();
    mcmc_cfg.seed = cfg.seed;
    for spec in &cfg.fitting.fits {
        let sample_set = match spec.target {
            FitTarget::PositiveLongitudinal => SampleSet::new(positive_longitudinal(samples), "cm/s")?,
            FitTarget::Magnitude => {
                SampleSet::new(samples.iter().map(|s| s.magnitude).collect(), "cm/s")?
            }
            FitTarget::BurnTime => burn_time_per_pixel(labels, cfg.meta.sample_rate_hz)
                .map_err(|e| e.in_stage("fit", None))?,
        };
        if sample_set.is_empty() {
            warnings.push(format!("fit {:?} skipped: no samples", spec.target));
            continue;
        }
        let result = match spec.method {
            FitMethod::MomentMatching => moment_match(&sample_set, spec.family, cfg.fitting.bins),
            FitMethod::Mcmc => mcmc_fit(&sample_set, spec.family, &mcmc_cfg, cfg.fitting.bins),
        }
        .map_err(|e| e.in_stage("fit", None))?;
        fits.push(result);
    }
    Ok(fits)
}

fn compose_label_stack(analyses: &[FrameAnalysis]) -> Result<Vec<LabelGrid>> {
    analyses
        .iter()
        .map(|a| {
            compose_labels(a.masks.burning.as_ref(), a.masks.burned.as_ref(), a.masks.smoke.as_ref())
                .map_err(|e| e.in_stage("export", None))
        })
        .collect()
}

fn input_checksums(input_dir: &Path, stride: usize) -> Result<std::collections::BTreeMap<String, String>> {
    let files = frame_files(input_dir)?;
    let mut out = std::collections::BTreeMap::new();
    for path in files.iter().step_by(stride) {
        let bytes = std::fs::read(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        out.insert(name, hex_digest(&bytes));
    }
    Ok(out)
}

fn prepare_out_dir(out_dir: &Path) -> Result<bool> {
    if out_dir.exists() {
        let mut entries =
            std::fs::read_dir(out_dir).map_err(|e| Error::Io { path: out_dir.to_path_buf(), source: e })?;
        if entries.next().is_some() {
            return Err(Error::Config(format!(
                "output directory {} already exists and is not empty",
                out_dir.display()
            )));
        }
        Ok(false)
    } else {
        std::fs::create_dir_all(out_dir).map_err(|e| Error::Io { path: out_dir.to_path_buf(), source: e })?;
        Ok(true)
    }
}

fn with_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool construction");
    pool.install(job)
}

/// Execute the full pipeline and write the dataset bundle to `out_dir`.
///
/// `threads = 0` uses all cores; any worker count produces byte-identical
/// outputs. On error the partially written bundle is removed.
pub fn run_pipeline(
    cfg: &PipelineConfig,
    input_dir: &Path,
    out_dir: &Path,
    threads: usize,
) -> Result<RunReport> {
    cfg.validate().map_err(|e| e.in_stage("validate", None))?;
    let created = prepare_out_dir(out_dir)?;

    let outcome = with_pool(threads, || run_pipeline_inner(cfg, input_dir, out_dir));
    if outcome.is_err() {
        let _ = std::fs::remove_dir_all(out_dir);
        if !created {
            let _ = std::fs::create_dir_all(out_dir);
        }
    }
    outcome
}

fn run_pipeline_inner(cfg: &PipelineConfig, input_dir: &Path, out_dir: &Path) -> Result<RunReport> {
    let Analyzed { frames, analyses, mut warnings } = load_and_analyze(cfg, input_dir)?;

    let tracked = if cfg.tracking.enabled {
        let t = track(cfg, &analyses)?;
        warnings.extend(t.warnings.iter().cloned());
        Some(t)
    } else {
        None
    };

    let labels = compose_label_stack(&analyses)?;

    let fits = if cfg.fitting.enabled {
        let empty = Vec::new();
        let samples = tracked.as_ref().map(|t| &t.samples).unwrap_or(&empty);
        run_fits(cfg, samples, &labels, &mut warnings)?
    } else {
        Vec::new()
    };

    let config_value = serde_json::to_value(cfg).expect("config serializes");
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        config_hash: config_hash(&config_value),
        config: config_value,
        input_checksums: input_checksums(input_dir, cfg.meta.stride()?)?,
        timesteps: frames.len(),
        exports: cfg.export,
    };
    let bundle = DatasetBundle {
        labels,
        boundaries: analyses.iter().map(|a| a.pooled.clone()).collect(),
        velocities: tracked.as_ref().map(|t| t.records.clone()).unwrap_or_default(),
        fits: fits.clone(),
        manifest,
    };
    let manifest_path = write_bundle(&bundle, out_dir).map_err(|e| e.in_stage("export", None))?;

    let velocity_summary = tracked.as_ref().and_then(|t| {
        let magnitudes: Vec<f64> = t.samples.iter().map(|s| s.magnitude).collect();
        SampleSet::new(magnitudes, "cm/s").ok().and_then(|s| summarize(&s).ok())
    });
    Ok(RunReport {
        frames: frames.len(),
        regions_per_frame: analyses.iter().map(|a| a.regions.len()).collect(),
        boundary_points_per_frame: analyses.iter().map(|a| a.pooled.len()).collect(),
        pair_stats: tracked.as_ref().map(|t| t.pair_stats.clone()).unwrap_or_default(),
        velocity_summary,
        fits,
        warnings,
        manifest_path: Some(manifest_path),
    })
}

/// Run a tracking pass per candidate rate and report the Nyquist table.
pub fn advise(
    cfg: &PipelineConfig,
    input_dir: &Path,
    rates_hz: &[f64],
    threads: usize,
) -> Result<SamplingReport> {
    cfg.validate().map_err(|e| e.in_stage("validate", None))?;
    if rates_hz.is_empty() {
        return Err(Error::Config("advise needs at least one candidate rate".into()));
    }
    with_pool(threads, || {
        let mut observations = Vec::new();
        for &rate in rates_hz {
            let mut rate_cfg = cfg.clone();
            rate_cfg.meta.sample_rate_hz = rate;
            rate_cfg.meta.validate()?;
            let Analyzed { analyses, .. } = load_and_analyze(&rate_cfg, input_dir)?;
            let tracked = track(&rate_cfg, &analyses)?;
            let u_obs = tracked.samples.iter().map(|s| s.magnitude).fold(0.0f64, f64::max);
            observations.push(RateObservation { f_hz: rate, u_obs });
        }
        sampling_advisor(&cfg.meta, &observations)
    })
}

/// Fill occlusions across a sequence and write the result to `out_dir`
/// in the same frame layout.
pub fn inpaint_sequence(cfg: &PipelineConfig, input_dir: &Path, out_dir: &Path, threads: usize) -> Result<usize> {
    cfg.meta.validate().map_err(|e| e.in_stage("validate", None))?;
    if let OcclusionSource::Auto { thresholds } = &cfg.inpaint.occlusion {
        thresholds.validate()?;
    }
    let created = prepare_out_dir(out_dir)?;
    let result = with_pool(threads, || -> Result<usize> {
        let frames = load_sequence(input_dir, &cfg.meta).map_err(|e| e.in_stage("load", None))?;
        let mut inpaint_cfg = cfg.clone();
        inpaint_cfg.inpaint.enabled = true;
        let mut warnings = Vec::new();
        let filled = apply_inpainting(&inpaint_cfg, frames, &mut warnings)?;
        for frame in &filled {
            match frame.kind() {
                FrameKind::Visual => {
                    let mut img = image::RgbImage::new(frame.width as u32, frame.height as u32);
                    for y in 0..frame.height {
                        for x in 0..frame.width {
                            img.put_pixel(x as u32, y as u32, image::Rgb(frame.rgb(x, y).unwrap()));
                        }
                    }
                    let path = out_dir.join(format!("frame_{:06}.png", frame.index));
                    img.save(&path)
                        .map_err(|e| Error::Io { path, source: std::io::Error::other(e.to_string()) })?;
                }
                FrameKind::Infrared => {
                    let mut text = String::new();
                    for y in 0..frame.height {
                        let row: Vec<String> =
                            (0..frame.width).map(|x| frame.temperature(x, y).unwrap().to_string()).collect();
                        text.push_str(&row.join(","));
                        text.push('\n');
                    }
                    let path = out_dir.join(format!("frame_{:06}.csv", frame.index));
                    std::fs::write(&path, text).map_err(|e| Error::Io { path: path.clone(), source: e })?;
                }
            }
        }
        Ok(filled.len())
    });
    if result.is_err() {
        let _ = std::fs::remove_dir_all(out_dir);
        if !created {
            let _ = std::fs::create_dir_all(out_dir);
        }
    }
    result
}

/// Write a threshold-tuning overlay for one sampled frame.
pub fn calibrate(cfg: &PipelineConfig, input_dir: &Path, frame_ordinal: usize, out_path: &Path) -> Result<()> {
    cfg.validate().map_err(|e| e.in_stage("validate", None))?;
    let frames = load_sequence(input_dir, &cfg.meta).map_err(|e| e.in_stage("load", None))?;
    let frame = frames.get(frame_ordinal).ok_or_else(|| {
        Error::Config(format!(
            "frame ordinal {frame_ordinal} out of range; the sampled sequence has {} frames",
            frames.len()
        ))
    })?;
    let spec = match &cfg.segmentation {
        SegmentationConfig::Visual { burning, smoke, burned, target, .. } => match target {
            VisualClass::Burning => SegmentationSpec::Color(burning.clone()),
            VisualClass::Smoke => {
                SegmentationSpec::Color(smoke.clone().expect("validated: smoke thresholds present"))
            }
            VisualClass::Burned => {
                SegmentationSpec::Color(burned.clone().expect("validated: burned thresholds present"))
            }
        },
        SegmentationConfig::Infrared { bands, target } => {
            SegmentationSpec::Thermal { bands: bands.clone(), target: *target }
        }
    };
    crate::segmentation::calibrate_preview(frame, &spec, out_path)
}

/// Compare two written bundles for byte identity; returns the first
/// mismatching relative path, if any. Test and diagnostics helper.
pub fn bundle_diff(a: &Path, b: &Path) -> Result<Option<String>> {
    let bundle_a = read_bundle(a)?;
    let bundle_b = read_bundle(b)?;
    if bundle_a != bundle_b {
        // Locate the differing file for the report.
        let mut rels = vec!["velocity.csv".to_string(), "fits.json".into(), "manifest.json".into()];
        for t in 0..bundle_a.manifest.timesteps {
            rels.push(format!("labels/t{t:06}.csv"));
            rels.push(format!("boundaries/t{t:06}.csv"));
        }
        for rel in rels {
            let pa = a.join(&rel);
            let pb = b.join(&rel);
            match (std::fs::read(&pa), std::fs::read(&pb)) {
                (Ok(da), Ok(db)) if da == db => {}
                _ => return Ok(Some(rel)),
            }
        }
        return Ok(Some("<structural>".into()));
    }
    Ok(None)
}
