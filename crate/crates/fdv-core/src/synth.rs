//! Synthetic frame sequences with analytically known fronts, velocities,
//! and burn times — the ground truth for end-to-end tests.
//!
//! Rendered colors are chosen so the default configuration thresholds
//! segment them exactly: fire is a saturated orange, smoke a neutral gray,
//! the background a forest green, and burned fuel a dark brown. Salt noise
//! sprinkles spurious fire-colored pixels over the background at a
//! configurable rate; the cleaning stage exists to remove exactly that.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagery::{Frame, Rect};
use crate::segmentation::ColorThresholds;

pub const FIRE_RGB: [u8; 3] = [255, 140, 0];
pub const SMOKE_RGB: [u8; 3] = [150, 150, 150];
pub const BACKGROUND_RGB: [u8; 3] = [34, 139, 34];
pub const BURNED_RGB: [u8; 3] = [60, 45, 35];
pub const OCCLUDER_RGB: [u8; 3] = [90, 60, 20];

/// Thresholds that segment [`FIRE_RGB`] and nothing else in the palette.
pub fn fire_thresholds() -> ColorThresholds {
    ColorThresholds {
        rgb_lo: [200, 60, 0],
        rgb_hi: [255, 200, 80],
        hsv_lo: (20.0, 0.7, 0.8),
        hsv_hi: (45.0, 1.0, 1.0),
    }
}

/// Thresholds for [`SMOKE_RGB`].
pub fn smoke_thresholds() -> ColorThresholds {
    ColorThresholds {
        rgb_lo: [100, 100, 100],
        rgb_hi: [200, 200, 200],
        hsv_lo: (0.0, 0.0, 0.35),
        hsv_hi: (360.0, 0.15, 0.8),
    }
}

/// Thresholds for [`BURNED_RGB`].
pub fn burned_thresholds() -> ColorThresholds {
    ColorThresholds {
        rgb_lo: [40, 30, 20],
        rgb_hi: [80, 60, 50],
        hsv_lo: (0.0, 0.2, 0.1),
        hsv_hi: (60.0, 0.6, 0.4),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioKind {
    /// Fire disk whose front radius grows at `speed` px/frame. With a burn
    /// duration the burning zone is an annulus trailing the front.
    ExpandingDisk {
        cx: f64,
        cy: f64,
        r0: f64,
        speed: f64,
        burn_duration_frames: Option<u32>,
    },
    /// Vertical fire front sweeping +x at `speed` px/frame over fuel that
    /// burns for `burn_duration_frames` after ignition.
    TranslatingFront { x0: f64, speed: f64, burn_duration_frames: u32 },
    /// Burning annulus: outer edge expands, inner edge contracts.
    RingFire { cx: f64, cy: f64, r_inner: f64, r_outer: f64, speed: f64 },
    /// Two curved fronts approaching each other along x.
    TwoFlanks {
        left_x0: f64,
        right_x0: f64,
        width: f64,
        speed: f64,
        wave_amplitude: f64,
    },
    /// Smoke disk advected at constant (u, w); w is upward, i.e. −y.
    AdvectedPlume { cx0: f64, cy0: f64, radius: f64, u: f64, w: f64 },
}

// No deny_unknown_fields here: serde cannot combine it with #[serde(flatten)].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub seed: u64,
    /// Salt noise rate: probability of a spurious fire pixel on background.
    pub noise: f64,
    #[serde(default)]
    pub occlusions: Vec<Rect>,
    #[serde(flatten)]
    pub kind: ScenarioKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CellClass {
    Background,
    Fire,
    Burned,
    Smoke,
}

/// Analytic boundary sample with its outward normal speed in px/frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruthPoint {
    pub x: f64,
    pub y: f64,
    pub normal_speed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub width: usize,
    pub height: usize,
    /// Per-frame analytic boundary samples of the tracked class.
    pub boundaries: Vec<Vec<TruthPoint>>,
    /// Frames spent burning, per pixel, row-major.
    pub burn_time_frames: Vec<u32>,
    /// Expected number of distinct regions per frame.
    pub region_count: Vec<usize>,
}

impl Scenario {
    /// Built-in scenario defaults, by kind name.
    pub fn preset(name: &str) -> Option<Scenario> {
        let base = |kind| Scenario {
            width: 256,
            height: 256,
            frames: 30,
            seed: 0,
            noise: 0.0,
            occlusions: Vec::new(),
            kind,
        };
        Some(match name {
            "expanding_disk" => base(ScenarioKind::ExpandingDisk {
                cx: 128.0,
                cy: 128.0,
                r0: 10.0,
                speed: 2.0,
                burn_duration_frames: Some(10),
            }),
            "translating_front" => base(ScenarioKind::TranslatingFront {
                x0: 20.0,
                speed: 3.0,
                burn_duration_frames: 12,
            }),
            "ring_fire" => base(ScenarioKind::RingFire {
                cx: 128.0,
                cy: 128.0,
                r_inner: 60.0,
                r_outer: 75.0,
                speed: 1.0,
            }),
            "two_flanks" => Scenario {
                width: 268,
                height: 163,
                frames: 20,
                seed: 0,
                noise: 0.0,
                occlusions: Vec::new(),
                kind: ScenarioKind::TwoFlanks {
                    left_x0: 40.0,
                    right_x0: 228.0,
                    width: 18.0,
                    speed: 1.5,
                    wave_amplitude: 6.0,
                },
            },
            "advected_plume" => base(ScenarioKind::AdvectedPlume {
                cx0: 60.0,
                cy0: 200.0,
                radius: 30.0,
                u: 0.87,
                w: 3.0,
            }),
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::Scenario("frame dimensions must be positive".into()));
        }
        if self.frames == 0 {
            return Err(Error::Scenario("frame count must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.noise) {
            return Err(Error::Scenario(format!("noise rate {} outside [0, 1)", self.noise)));
        }
        for r in &self.occlusions {
            if !r.fits(self.width, self.height) {
                return Err(Error::Scenario("occlusion rectangle escapes the frame".into()));
            }
        }
        let t_end = (self.frames - 1) as f64;
        let (w, h) = (self.width as f64 - 1.0, self.height as f64 - 1.0);
        match self.kind {
            ScenarioKind::ExpandingDisk { cx, cy, r0, speed, .. } => {
                if speed < 0.0 || r0 <= 0.0 {
                    return Err(Error::Scenario("disk needs r0 > 0 and speed >= 0".into()));
                }
                let r_end = r0 + speed * t_end;
                let margin = cx.min(cy).min(w - cx).min(h - cy);
                if r_end >= margin {
                    return Err(Error::Scenario(format!(
                        "disk radius {r_end} escapes the frame (margin {margin}) by the last frame"
                    )));
                }
            }
            ScenarioKind::TranslatingFront { x0, speed, burn_duration_frames } => {
                if speed < 0.0 || x0 < 0.0 || burn_duration_frames == 0 {
                    return Err(Error::Scenario("front needs x0 >= 0, speed >= 0, burn duration > 0".into()));
                }
                if x0 + speed * t_end >= w {
                    return Err(Error::Scenario("front exits the frame before the last timestep".into()));
                }
            }
            ScenarioKind::RingFire { cx, cy, r_inner, r_outer, speed } => {
                if speed < 0.0 || r_inner <= 0.0 || r_outer <= r_inner {
                    return Err(Error::Scenario("ring needs 0 < r_inner < r_outer and speed >= 0".into()));
                }
                let r_end = r_outer + speed * t_end;
                let margin = cx.min(cy).min(w - cx).min(h - cy);
                if r_end >= margin {
                    return Err(Error::Scenario("ring outer radius escapes the frame".into()));
                }
                if r_inner - speed * t_end < 2.0 {
                    return Err(Error::Scenario("ring inner radius collapses before the last frame".into()));
                }
            }
            ScenarioKind::TwoFlanks { left_x0, right_x0, width, speed, wave_amplitude } => {
                if width <= 0.0 || speed < 0.0 || wave_amplitude < 0.0 {
                    return Err(Error::Scenario("flanks need width > 0, speed >= 0, amplitude >= 0".into()));
                }
                let left_edge = left_x0 - width - wave_amplitude;
                let right_edge = right_x0 + width + wave_amplitude + 2.0 * speed * t_end;
                if left_edge < 0.0 || right_x0 + width + wave_amplitude >= w || right_edge < 0.0 {
                    return Err(Error::Scenario("flank bands escape the frame".into()));
                }
                let gap = (right_x0 - speed * t_end) - (left_x0 + speed * t_end) - 2.0 * wave_amplitude;
                if gap <= 0.0 {
                    return Err(Error::Scenario(format!("flanks collide: final gap {gap} px")));
                }
            }
            ScenarioKind::AdvectedPlume { cx0, cy0, radius, u, w: wv } => {
                if radius <= 0.0 {
                    return Err(Error::Scenario("plume radius must be positive".into()));
                }
                for t in [0.0, t_end] {
                    let cx = cx0 + u * t;
                    let cy = cy0 - wv * t;
                    let margin = cx.min(cy).min(w - cx).min(h - cy);
                    if radius >= margin {
                        return Err(Error::Scenario("plume disk escapes the frame".into()));
                    }
                }
            }
        }
        Ok(())
    }

    fn classify(&self, x: usize, y: usize, t: usize) -> CellClass {
        let (xf, yf, tf) = (x as f64, y as f64, t as f64);
        match self.kind {
            ScenarioKind::ExpandingDisk { cx, cy, r0, speed, burn_duration_frames } => {
                let d = ((xf - cx).powi(2) + (yf - cy).powi(2)).sqrt();
                let r = r0 + speed * tf;
                if d > r {
                    return CellClass::Background;
                }
                match burn_duration_frames {
                    None => CellClass::Fire,
                    Some(tau) => {
                        let t_ig = if speed > 0.0 { ((d - r0) / speed).max(0.0) } else { 0.0 };
                        if tf < t_ig + tau as f64 {
                            CellClass::Fire
                        } else {
                            CellClass::Burned
                        }
                    }
                }
            }
            ScenarioKind::TranslatingFront { x0, speed, burn_duration_frames } => {
                let front = x0 + speed * tf;
                if xf > front {
                    return CellClass::Background;
                }
                let t_ig = if speed > 0.0 { ((xf - x0) / speed).max(0.0) } else { 0.0 };
                if tf < t_ig + burn_duration_frames as f64 {
                    CellClass::Fire
                } else {
                    CellClass::Burned
                }
            }
            ScenarioKind::RingFire { cx, cy, r_inner, r_outer, speed } => {
                let d = ((xf - cx).powi(2) + (yf - cy).powi(2)).sqrt();
                let r_out = r_outer + speed * tf;
                let r_in = r_inner - speed * tf;
                if d >= r_in && d <= r_out {
                    CellClass::Fire
                } else {
                    CellClass::Background
                }
            }
            ScenarioKind::TwoFlanks { left_x0, right_x0, width, speed, wave_amplitude } => {
                let wave = wave_amplitude * (std::f64::consts::PI * yf / self.height as f64).sin();
                let left = left_x0 + speed * tf + wave;
                let right = right_x0 - speed * tf - wave;
                let in_left = xf <= left && xf >= left - width;
                let in_right = xf >= right && xf <= right + width;
                if in_left || in_right {
                    CellClass::Fire
                } else {
                    CellClass::Background
                }
            }
            ScenarioKind::AdvectedPlume { cx0, cy0, radius, u, w } => {
                let cx = cx0 + u * tf;
                let cy = cy0 - w * tf;
                let d2 = (xf - cx).powi(2) + (yf - cy).powi(2);
                if d2 <= radius * radius {
                    CellClass::Smoke
                } else {
                    CellClass::Background
                }
            }
        }
    }

    fn truth_boundary(&self, t: usize) -> Vec<TruthPoint> {
        let tf = t as f64;
        let circle = |cx: f64, cy: f64, r: f64, speed: f64| -> Vec<TruthPoint> {
            let n = (std::f64::consts::TAU * r).ceil().max(16.0) as usize;
            (0..n)
                .map(|i| {
                    let theta = std::f64::consts::TAU * i as f64 / n as f64;
                    TruthPoint { x: cx + r * theta.cos(), y: cy + r * theta.sin(), normal_speed: speed }
                })
                .collect()
        };
        match self.kind {
            ScenarioKind::ExpandingDisk { cx, cy, r0, speed, burn_duration_frames } => {
                let mut pts = circle(cx, cy, r0 + speed * tf, speed);
                if let Some(tau) = burn_duration_frames {
                    let r_in = r0 + speed * (tf - tau as f64);
                    if r_in > 1.0 {
                        pts.extend(circle(cx, cy, r_in, speed));
                    }
                }
                pts
            }
            ScenarioKind::TranslatingFront { x0, speed, burn_duration_frames } => {
                let lead = x0 + speed * tf;
                let trail = lead - speed * burn_duration_frames as f64;
                let mut pts = Vec::new();
                for y in 0..self.height {
                    pts.push(TruthPoint { x: lead, y: y as f64, normal_speed: speed });
                    if trail > 0.0 {
                        pts.push(TruthPoint { x: trail, y: y as f64, normal_speed: speed });
                    }
                }
                pts
            }
            ScenarioKind::RingFire { cx, cy, r_inner, r_outer, speed } => {
                let mut pts = circle(cx, cy, r_outer + speed * tf, speed);
                pts.extend(circle(cx, cy, r_inner - speed * tf, speed));
                pts
            }
            ScenarioKind::TwoFlanks { left_x0, right_x0, width, speed, wave_amplitude } => {
                let mut pts = Vec::new();
                for y in 0..self.height {
                    let wave = wave_amplitude * (std::f64::consts::PI * y as f64 / self.height as f64).sin();
                    let left = left_x0 + speed * tf + wave;
                    let right = right_x0 - speed * tf - wave;
                    for x in [left, left - width, right, right + width] {
                        pts.push(TruthPoint { x, y: y as f64, normal_speed: speed });
                    }
                }
                pts
            }
            ScenarioKind::AdvectedPlume { cx0, cy0, radius, u, w } => {
                let cx = cx0 + u * tf;
                let cy = cy0 - w * tf;
                let n = (std::f64::consts::TAU * radius).ceil().max(16.0) as usize;
                (0..n)
                    .map(|i| {
                        let theta = std::f64::consts::TAU * i as f64 / n as f64;
                        let (nx, ny) = (theta.cos(), theta.sin());
                        TruthPoint {
                            x: cx + radius * nx,
                            y: cy + radius * ny,
                            normal_speed: u * nx + (-w) * ny,
                        }
                    })
                    .collect()
            }
        }
    }

    fn expected_regions(&self) -> usize {
        match self.kind {
            ScenarioKind::TwoFlanks { .. } => 2,
            _ => 1,
        }
    }
}

/// Render a scenario into frames plus its analytic ground truth.
pub fn render(sc: &Scenario) -> Result<(Vec<Frame>, GroundTruth)> {
    sc.validate()?;
    let (w, h) = (sc.width, sc.height);
    let mut frames = Vec::with_capacity(sc.frames);
    let mut burn_time_frames = vec![0u32; w * h];
    let mut boundaries = Vec::with_capacity(sc.frames);
    let mut region_count = Vec::with_capacity(sc.frames);

    for t in 0..sc.frames {
        let mut pixels = vec![BACKGROUND_RGB; w * h];
        for y in 0..h {
            for x in 0..w {
                let class = sc.classify(x, y, t);
                pixels[y * w + x] = match class {
                    CellClass::Background => BACKGROUND_RGB,
                    CellClass::Fire => {
                        burn_time_frames[y * w + x] += 1;
                        FIRE_RGB
                    }
                    CellClass::Burned => BURNED_RGB,
                    CellClass::Smoke => SMOKE_RGB,
                };
            }
        }
        if sc.noise > 0.0 {
            let mut rng = ChaCha8Rng::seed_from_u64(sc.seed.wrapping_add(t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            for px in pixels.iter_mut() {
                if *px == BACKGROUND_RGB && rng.gen::<f64>() < sc.noise {
                    *px = FIRE_RGB;
                }
            }
        }
        for rect in &sc.occlusions {
            for y in rect.y..rect.y + rect.height {
                for x in rect.x..rect.x + rect.width {
                    pixels[y * w + x] = OCCLUDER_RGB;
                }
            }
        }
        frames.push(Frame::visual(t, t as f64, w, h, pixels)?);
        boundaries.push(sc.truth_boundary(t));
        region_count.push(sc.expected_regions());
    }

    Ok((
        frames,
        GroundTruth { width: w, height: h, boundaries, burn_time_frames, region_count },
    ))
}

/// Write rendered frames (`frame_%06d.png`) and ground-truth CSVs
/// (under `truth/`) in the layout the pipeline consumes.
pub fn write_scenario(sc: &Scenario, out_dir: &Path) -> Result<PathBuf> {
    let (frames, truth) = render(sc)?;
    std::fs::create_dir_all(out_dir).map_err(|e| Error::Io { path: out_dir.to_path_buf(), source: e })?;
    let truth_dir = out_dir.join("truth");
    std::fs::create_dir_all(&truth_dir).map_err(|e| Error::Io { path: truth_dir.clone(), source: e })?;

    for frame in &frames {
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

    for (t, boundary) in truth.boundaries.iter().enumerate() {
        let mut text = String::from("x,y,normal_speed\n");
        for p in boundary {
            text.push_str(&format!("{},{},{}\n", p.x, p.y, p.normal_speed));
        }
        let path = truth_dir.join(format!("boundary_t{t:06}.csv"));
        std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })?;
    }

    let mut grid = String::new();
    for y in 0..truth.height {
        let row: Vec<String> =
            (0..truth.width).map(|x| truth.burn_time_frames[y * truth.width + x].to_string()).collect();
        grid.push_str(&row.join(","));
        grid.push('\n');
    }
    let burn_path = truth_dir.join("burn_time_frames.csv");
    std::fs::write(&burn_path, grid).map_err(|e| Error::Io { path: burn_path, source: e })?;

    let counts: Vec<String> = truth.region_count.iter().map(|c| c.to_string()).collect();
    let rc_path = truth_dir.join("region_count.csv");
    std::fs::write(&rc_path, counts.join("\n") + "\n").map_err(|e| Error::Io { path: rc_path, source: e })?;

    let scenario_path = out_dir.join("scenario.json");
    let json = serde_json::to_string_pretty(sc).map_err(|e| Error::Load {
        file: scenario_path.clone(),
        reason: e.to_string(),
    })?;
    std::fs::write(&scenario_path, json).map_err(|e| Error::Io { path: scenario_path.clone(), source: e })?;
    Ok(scenario_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::segment_visual;

    fn disk(noise: f64, seed: u64) -> Scenario {
        Scenario {
            width: 128,
            height: 128,
            frames: 10,
            seed,
            noise,
            occlusions: Vec::new(),
            kind: ScenarioKind::ExpandingDisk { cx: 64.0, cy: 64.0, r0: 10.0, speed: 2.0, burn_duration_frames: None },
        }
    }

    #[test]
    fn noiseless_disk_segments_exactly() {
        let (frames, _) = render(&disk(0.0, 1)).unwrap();
        for (t, frame) in frames.iter().enumerate() {
            let mask = segment_visual(frame, &fire_thresholds()).unwrap();
            let r = 10.0 + 2.0 * t as f64;
            for y in 0..128usize {
                for x in 0..128usize {
                    let inside = ((x as f64 - 64.0).powi(2) + (y as f64 - 64.0).powi(2)).sqrt() <= r;
                    assert_eq!(mask.get(x, y), inside, "t={t} ({x},{y})");
                }
            }
        }
    }

    #[test]
    fn truth_boundary_speed_is_constant() {
        let (_, truth) = render(&disk(0.0, 1)).unwrap();
        for boundary in &truth.boundaries {
            assert!(boundary.iter().all(|p| p.normal_speed == 2.0));
        }
    }

    #[test]
    fn determinism_and_noise_only_differences() {
        let (a1, _) = render(&disk(0.01, 7)).unwrap();
        let (a2, _) = render(&disk(0.01, 7)).unwrap();
        assert_eq!(a1, a2, "same seed must reproduce bit-identical frames");

        let (b, _) = render(&disk(0.01, 8)).unwrap();
        for (fa, fb) in a1.iter().zip(b.iter()) {
            for y in 0..128usize {
                for x in 0..128usize {
                    let pa = fa.rgb(x, y).unwrap();
                    let pb = fb.rgb(x, y).unwrap();
                    if pa != pb {
                        // Differences must be salt: one side background, one fire.
                        let pair = [pa, pb];
                        assert!(pair.contains(&FIRE_RGB) && pair.contains(&BACKGROUND_RGB));
                    }
                }
            }
        }
    }

    #[test]
    fn translating_front_burn_time_is_exact() {
        let sc = Scenario {
            width: 120,
            height: 40,
            frames: 40,
            seed: 0,
            noise: 0.0,
            occlusions: Vec::new(),
            kind: ScenarioKind::TranslatingFront { x0: 10.0, speed: 2.0, burn_duration_frames: 8 },
        };
        let (_, truth) = render(&sc).unwrap();
        // Pixels whose whole burn window fits in the sequence burned exactly
        // burn_duration frames.
        let last_complete = 10.0 + 2.0 * (40.0 - 1.0 - 8.0);
        for y in 0..40usize {
            for x in 0..120usize {
                let bt = truth.burn_time_frames[y * 120 + x];
                if (x as f64) < last_complete - 2.0 && x as f64 >= 10.0 {
                    assert_eq!(bt, 8, "({x},{y})");
                }
            }
        }
    }

    #[test]
    fn two_flanks_keep_separation() {
        let sc = Scenario::preset("two_flanks").unwrap();
        let (frames, truth) = render(&sc).unwrap();
        assert_eq!(truth.region_count, vec![2; frames.len()]);
        // Distinct bands: no fire pixel in the central gap column range.
        for frame in &frames {
            let mask = segment_visual(frame, &fire_thresholds()).unwrap();
            let mid = sc.width / 2;
            for y in 0..sc.height {
                assert!(!mask.get(mid, y), "gap breached at frame {}", frame.index);
            }
        }
    }

    #[test]
    fn ring_fire_is_an_annulus() {
        let sc = Scenario::preset("ring_fire").unwrap();
        let (frames, _) = render(&sc).unwrap();
        let mask = segment_visual(&frames[0], &fire_thresholds()).unwrap();
        assert!(!mask.get(128, 128), "ring center must be unburnt");
        assert!(mask.get(128 + 67, 128), "ring band must burn");
    }

    #[test]
    fn plume_smoke_segments_with_smoke_thresholds() {
        let sc = Scenario::preset("advected_plume").unwrap();
        let (frames, truth) = render(&sc).unwrap();
        let mask = segment_visual(&frames[0], &smoke_thresholds()).unwrap();
        assert!(mask.count_ones() > 2000);
        let fire = segment_visual(&frames[0], &fire_thresholds()).unwrap();
        assert_eq!(fire.count_ones(), 0);
        // Truth normal speeds vary along the circle for an advected blob.
        let speeds: Vec<f64> = truth.boundaries[0].iter().map(|p| p.normal_speed).collect();
        assert!(speeds.iter().any(|&s| s > 0.0) && speeds.iter().any(|&s| s < 0.0));
    }

    #[test]
    fn occluders_are_painted_and_invisible_to_thresholds() {
        let mut sc = disk(0.0, 3);
        sc.occlusions = vec![Rect { x: 60, y: 60, width: 10, height: 10 }];
        let (frames, _) = render(&sc).unwrap();
        assert_eq!(frames[0].rgb(65, 65), Some(OCCLUDER_RGB));
        let fire = segment_visual(&frames[0], &fire_thresholds()).unwrap();
        assert!(!fire.get(65, 65));
        let smoke = segment_visual(&frames[0], &smoke_thresholds()).unwrap();
        assert!(!smoke.get(65, 65));
    }

    #[test]
    fn geometry_escaping_bounds_is_rejected() {
        let mut sc = disk(0.0, 1);
        sc.frames = 100; // radius would reach 10 + 198 > 64
        assert!(matches!(render(&sc), Err(Error::Scenario(_))));
    }

    #[test]
    fn scenario_round_trips_through_json() {
        let sc = Scenario::preset("expanding_disk").unwrap();
        let json = serde_json::to_string(&sc).unwrap();
        let back: Scenario = serde_json::from_str(&json).unwrap();
        assert_eq!(sc, back);
    }
}
