//! Occlusion filling for frames, run before segmentation.
//!
//! Two fill modes share the same plumbing. `Harmonic` relaxes the masked
//! pixels to the discrete Laplace solution of their surroundings
//! (Gauss–Seidel with over-relaxation). `Transport` follows the
//! fluid-analogy scheme: smoothness (the Laplacian) is advected along
//! isophotes into the hole, interleaved with edge-weighted diffusion
//! steps. Both initialize from the mean of the occlusion's boundary ring
//! and clamp updates to the ring's per-channel value range, so filled
//! values can never escape the surrounding data. Unmasked pixels pass
//! through bit-identical.

use crate::error::{Error, Result};
use crate::imagery::{Frame, FrameData};
use crate::segmentation::{segment_visual, BinaryMask, ColorThresholds};
use serde::{Deserialize, Serialize};

pub const DEFAULT_DT: f64 = 0.1;
/// Per 8-bit channel unit.
pub const DEFAULT_TOL: f64 = 1e-4;
pub const DEFAULT_MAX_ITERS: usize = 5000;

/// Pixels to reconstruct.
#[derive(Debug, Clone, PartialEq)]
pub struct OcclusionMask {
    mask: BinaryMask,
}

impl OcclusionMask {
    pub fn new(mask: BinaryMask) -> Self {
        OcclusionMask { mask }
    }

    pub fn mask(&self) -> &BinaryMask {
        &self.mask
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InpaintMethod {
    Harmonic,
    Transport,
}

#[derive(Debug, Clone)]
pub struct InpaintOutcome {
    pub frame: Frame,
    pub iterations: usize,
    pub converged: bool,
    /// Largest per-pixel change in the final iteration.
    pub max_residual: f64,
}

struct ChannelGrid {
    w: usize,
    h: usize,
    u: Vec<f64>,
}

impl ChannelGrid {
    #[inline]
    fn at(&self, x: usize, y: usize) -> f64 {
        self.u[y * self.w + x]
    }

    /// Mean of the in-bounds 4-neighborhood.
    fn mean4(&self, x: usize, y: usize) -> f64 {
        let mut sum = 0.0;
        let mut n = 0.0;
        if x > 0 {
            sum += self.at(x - 1, y);
            n += 1.0;
        }
        if x + 1 < self.w {
            sum += self.at(x + 1, y);
            n += 1.0;
        }
        if y > 0 {
            sum += self.at(x, y - 1);
            n += 1.0;
        }
        if y + 1 < self.h {
            sum += self.at(x, y + 1);
            n += 1.0;
        }
        sum / n
    }

    fn laplacian(&self, x: usize, y: usize) -> f64 {
        4.0 * (self.mean4(x, y) - self.at(x, y))
    }

    /// Central-difference gradient with clamped borders.
    fn gradient(&self, x: usize, y: usize) -> (f64, f64) {
        let xm = self.at(x.saturating_sub(1), y);
        let xp = self.at((x + 1).min(self.w - 1), y);
        let ym = self.at(x, y.saturating_sub(1));
        let yp = self.at(x, (y + 1).min(self.h - 1));
        ((xp - xm) / 2.0, (yp - ym) / 2.0)
    }
}

fn masked_pixels(mask: &BinaryMask) -> Vec<(usize, usize)> {
    mask.set_pixels()
}

/// Ring statistics: (mean, min, max) over unmasked 8-neighbors of the mask.
fn boundary_ring(grid: &ChannelGrid, mask: &BinaryMask) -> Option<(f64, f64, f64)> {
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for y in 0..grid.h {
        for x in 0..grid.w {
            if mask.get(x, y) {
                continue;
            }
            let mut adjacent = false;
            for dy in -1i64..=1 {
                for dx in -1i64..=1 {
                    let nx = x as i64 + dx;
                    let ny = y as i64 + dy;
                    if nx >= 0 && ny >= 0 && (nx as usize) < grid.w && (ny as usize) < grid.h
                        && mask.get(nx as usize, ny as usize)
                    {
                        adjacent = true;
                    }
                }
            }
            if adjacent {
                let v = grid.at(x, y);
                sum += v;
                count += 1;
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
    }
    (count > 0).then(|| (sum / count as f64, lo, hi))
}

const SOR_OMEGA: f64 = 1.5;
/// Transport mode alternates phases: advection steps, then diffusion sweeps.
const TRANSPORT_STEPS: usize = 6;
const DIFFUSION_STEPS: usize = 6;
/// Slope limiter: largest per-step advection change, in channel units.
const TRANSPORT_LIMIT: f64 = 1.0;
const DIFFUSION_RATE: f64 = 0.2;
/// Edge-stopping scale for the anisotropic diffusion steps.
const EDGE_SCALE: f64 = 10.0;

fn fill_channel(
    grid: &mut ChannelGrid,
    mask: &BinaryMask,
    targets: &[(usize, usize)],
    method: InpaintMethod,
    dt: f64,
    max_iters: usize,
    tol: f64,
) -> Result<(usize, bool, f64)> {
    let Some((ring_mean, ring_lo, ring_hi)) = boundary_ring(grid, mask) else {
        return Err(Error::InsufficientBoundary(
            "the occlusion mask covers the whole frame; no boundary values exist".into(),
        ));
    };
    for &(x, y) in targets {
        grid.u[y * grid.w + x] = ring_mean;
    }

    let clamp = |v: f64| v.clamp(ring_lo, ring_hi);
    let mut residual = 0.0;
    // Transport steps are near no-ops on flat starts, so their convergence
    // is judged over a whole transport+diffusion cycle.
    let mut cycle_residual = 0.0f64;
    for it in 0..max_iters {
        residual = 0.0f64;
        match method {
            InpaintMethod::Harmonic => {
                // In-place over-relaxed Gauss-Seidel, fixed row-major order.
                for &(x, y) in targets {
                    let old = grid.at(x, y);
                    let relaxed = old + SOR_OMEGA * (grid.mean4(x, y) - old);
                    let new = clamp(relaxed);
                    grid.u[y * grid.w + x] = new;
                    residual = residual.max((new - old).abs());
                }
            }
            InpaintMethod::Transport => {
                let phase = it % (TRANSPORT_STEPS + DIFFUSION_STEPS);
                if phase < TRANSPORT_STEPS {
                    // Advect smoothness (the Laplacian) along isophotes
                    // from a snapshot: du = dt · (N · grad(Lap u)) with N the
                    // unit isophote direction. Flat pixels stay put; the
                    // diffusion phase is what first builds their gradients.
                    let lap: Vec<f64> = {
                        let mut l = vec![0.0; grid.w * grid.h];
                        for y in 0..grid.h {
                            for x in 0..grid.w {
                                l[y * grid.w + x] = grid.laplacian(x, y);
                            }
                        }
                        l
                    };
                    let lap_grid = ChannelGrid { w: grid.w, h: grid.h, u: lap };
                    let mut updates = Vec::with_capacity(targets.len());
                    for &(x, y) in targets {
                        let (ux, uy) = grid.gradient(x, y);
                        let grad_norm = (ux * ux + uy * uy).sqrt();
                        if grad_norm < 1e-9 {
                            updates.push(grid.at(x, y));
                            continue;
                        }
                        let iso = (-uy / grad_norm, ux / grad_norm);
                        let (lx, ly) = lap_grid.gradient(x, y);
                        let beta = iso.0 * lx + iso.1 * ly;
                        let step = (dt * beta).clamp(-TRANSPORT_LIMIT, TRANSPORT_LIMIT);
                        updates.push(clamp(grid.at(x, y) + step));
                    }
                    for (&(x, y), &new) in targets.iter().zip(updates.iter()) {
                        let old = grid.at(x, y);
                        grid.u[y * grid.w + x] = new;
                        residual = residual.max((new - old).abs());
                    }
                } else {
                    // Edge-weighted diffusion sweep from a snapshot.
                    let snapshot = grid.u.clone();
                    let snap = ChannelGrid { w: grid.w, h: grid.h, u: snapshot };
                    for &(x, y) in targets {
                        let (gx, gy) = snap.gradient(x, y);
                        let g = 1.0 / (1.0 + (gx * gx + gy * gy) / (EDGE_SCALE * EDGE_SCALE));
                        let old = grid.at(x, y);
                        let new = clamp(old + DIFFUSION_RATE * g * (snap.mean4(x, y) - old));
                        grid.u[y * grid.w + x] = new;
                        residual = residual.max((new - old).abs());
                    }
                }
            }
        }
        match method {
            InpaintMethod::Harmonic => {
                if residual < tol {
                    return Ok((it + 1, true, residual));
                }
            }
            InpaintMethod::Transport => {
                cycle_residual = cycle_residual.max(residual);
                if (it + 1) % (TRANSPORT_STEPS + DIFFUSION_STEPS) == 0 {
                    if cycle_residual < tol {
                        return Ok((it + 1, true, cycle_residual));
                    }
                    cycle_residual = 0.0;
                }
            }
        }
    }
    Ok((max_iters, false, residual))
}

/// Fill the masked pixels of `frame`; all other pixels pass through
/// bit-identical. Non-convergence returns the best iterate with
/// `converged = false` rather than an error.
pub fn inpaint(
    frame: &Frame,
    occ: &OcclusionMask,
    method: InpaintMethod,
    dt: f64,
    max_iters: usize,
    tol: f64,
) -> Result<InpaintOutcome> {
    let mask = occ.mask();
    if (mask.width(), mask.height()) != (frame.width, frame.height) {
        return Err(Error::DimensionMismatch {
            context: "occlusion mask".into(),
            expected_w: frame.width,
            expected_h: frame.height,
            got_w: mask.width(),
            got_h: mask.height(),
        });
    }
    if !dt.is_finite() || !tol.is_finite() || dt <= 0.0 || tol <= 0.0 {
        return Err(Error::Config("inpainting dt and tol must be positive".into()));
    }
    let targets = masked_pixels(mask);
    if targets.is_empty() {
        return Ok(InpaintOutcome { frame: frame.clone(), iterations: 0, converged: true, max_residual: 0.0 });
    }
    if targets.len() == frame.width * frame.height {
        return Err(Error::InsufficientBoundary(
            "the occlusion mask covers the whole frame; no boundary values exist".into(),
        ));
    }

    let (w, h) = (frame.width, frame.height);
    let mut out = frame.clone();
    let mut iterations = 0usize;
    let mut converged = true;
    let mut max_residual = 0.0f64;

    match (&frame.data, &mut out.data) {
        (FrameData::Visual(src), FrameData::Visual(dst)) => {
            for channel in 0..3 {
                let mut grid = ChannelGrid {
                    w,
                    h,
                    u: src.iter().map(|p| p[channel] as f64).collect(),
                };
                let (its, ok, res) = fill_channel(&mut grid, mask, &targets, method, dt, max_iters, tol)?;
                iterations = iterations.max(its);
                converged &= ok;
                max_residual = max_residual.max(res);
                for &(x, y) in &targets {
                    dst[y * w + x][channel] = grid.at(x, y).round().clamp(0.0, 255.0) as u8;
                }
            }
        }
        (FrameData::Infrared(src), FrameData::Infrared(dst)) => {
            let mut grid = ChannelGrid { w, h, u: src.clone() };
            let (its, ok, res) = fill_channel(&mut grid, mask, &targets, method, dt, max_iters, tol)?;
            iterations = its;
            converged = ok;
            max_residual = res;
            for &(x, y) in &targets {
                dst[y * w + x] = grid.at(x, y);
            }
        }
        _ => unreachable!("clone preserves the frame kind"),
    }

    Ok(InpaintOutcome { frame: out, iterations, converged, max_residual })
}

/// Derive an occlusion mask by reusing color segmentation thresholds,
/// e.g. a tree-green range.
pub fn auto_occlusion(frame: &Frame, th: &ColorThresholds) -> Result<OcclusionMask> {
    Ok(OcclusionMask::new(segment_visual(frame, th)?))
}
