//! Greedy nearest-neighbor matching of boundary points between successive
//! sampled frames, and displacement → velocity conversion.
//!
//! Matching runs forward in time: every source point is paired with its
//! Euclidean-nearest destination point when that lies within `max_dist_px`.
//! Several sources may share one destination and sources with nothing in
//! range stay unmatched — fuel cells ignite multiple neighbors while others
//! extinguish, so neither one-to-one matching nor full coverage is physical.
//! Distance ties go to the row-major-smallest destination, which makes the
//! pairing a pure function of the two point sets.

use serde::Serialize;

use crate::clustering::Point;
use crate::error::{Error, Result};

/// One matched pair with its displacement in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchPair {
    pub src: Point,
    pub dst: Point,
    /// dst − src, exactly.
    pub d: (i64, i64),
}

/// Matched boundary point pairs between two consecutive sampled frames.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub pairs: Vec<MatchPair>,
    /// 1 / f_s seconds.
    pub dt_s: f64,
}

/// Velocity of one matched pair in cm/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VelocitySample {
    pub vx: f64,
    pub vy: f64,
    /// Component along the configured spread axis.
    pub longitudinal: f64,
    /// Component orthogonal to the spread axis.
    pub transverse: f64,
    pub magnitude: f64,
}

/// Match `src` points forward onto `dst`.
///
/// Either side being empty produces an empty field; the caller decides
/// whether that deserves a warning.
pub fn greedy_match(src: &[Point], dst: &[Point], max_dist_px: f64, dt_s: f64) -> Result<DisplacementField> {
    if !max_dist_px.is_finite() || max_dist_px <= 0.0 {
        return Err(Error::Config(format!("max_dist_px must be positive, got {max_dist_px}")));
    }
    if !dt_s.is_finite() || dt_s <= 0.0 {
        return Err(Error::Config(format!("dt_s must be positive, got {dt_s}")));
    }
    if src.is_empty() || dst.is_empty() {
        return Ok(DisplacementField { pairs: Vec::new(), dt_s });
    }

    // Bucket destinations at cell size max_dist: 3x3 cells cover the range.
    let cell = |p: &Point| {
        (
            (p.x as f64 / max_dist_px).floor() as i64,
            (p.y as f64 / max_dist_px).floor() as i64,
        )
    };
    let mut grid: std::collections::HashMap<(i64, i64), Vec<usize>> = std::collections::HashMap::new();
    for (i, p) in dst.iter().enumerate() {
        grid.entry(cell(p)).or_default().push(i);
    }

    let max_d2 = max_dist_px * max_dist_px;
    let mut pairs = Vec::new();
    for &s in src {
        let (cx, cy) = cell(&s);
        let mut best: Option<(i64, (i64, i64), usize)> = None;
        for gy in cy - 1..=cy + 1 {
            for gx in cx - 1..=cx + 1 {
                let Some(bucket) = grid.get(&(gx, gy)) else { continue };
                for &j in bucket {
                    let d2 = s.dist2(&dst[j]);
                    let key = (d2, (dst[j].y, dst[j].x));
                    if best.is_none_or(|(bd2, bkey, _)| (d2, key.1) < (bd2, bkey)) {
                        best = Some((d2, key.1, j));
                    }
                }
            }
        }
        if let Some((d2, _, j)) = best {
            if d2 as f64 <= max_d2 {
                let dst_p = dst[j];
                pairs.push(MatchPair { src: s, dst: dst_p, d: (dst_p.x - s.x, dst_p.y - s.y) });
            }
        }
    }
    Ok(DisplacementField { pairs, dt_s })
}

/// Convert displacements to velocities in cm/s.
///
/// `axis_deg` orients the longitudinal axis in image coordinates (0° is
/// +x); (longitudinal, transverse) is the rotation of (vx, vy) into that
/// frame.
pub fn to_velocities(field: &DisplacementField, res_px_per_cm: f64, axis_deg: f64) -> Result<Vec<VelocitySample>> {
    if !res_px_per_cm.is_finite() || res_px_per_cm <= 0.0 {
        return Err(Error::Config(format!("resolution must be positive, got {res_px_per_cm}")));
    }
    let theta = axis_deg.to_radians();
    let (sin_t, cos_t) = theta.sin_cos();
    Ok(field
        .pairs
        .iter()
        .map(|pair| {
            let vx = pair.d.0 as f64 / res_px_per_cm / field.dt_s;
            let vy = pair.d.1 as f64 / res_px_per_cm / field.dt_s;
            VelocitySample {
                vx,
                vy,
                longitudinal: vx * cos_t + vy * sin_t,
                transverse: -vx * sin_t + vy * cos_t,
                magnitude: (vx * vx + vy * vy).sqrt(),
            }
        })
        .collect())
}

/// Positive longitudinal subset (the L⁺ samples).
pub fn positive_longitudinal(samples: &[VelocitySample]) -> Vec<f64> {
    samples.iter().map(|s| s.longitudinal).filter(|&l| l > 0.0).collect()
}

/// Match statistics of one consecutive frame pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairStats {
    pub src_points: usize,
    pub dst_points: usize,
    pub matched: usize,
}

#[derive(Debug, Clone)]
pub struct TrackOutcome {
    /// One field per consecutive frame pair, in time order.
    pub fields: Vec<DisplacementField>,
    /// Velocities pooled over all pairs.
    pub samples: Vec<VelocitySample>,
    pub per_pair: Vec<PairStats>,
    pub warnings: Vec<String>,
}

/// Track a whole sequence: match every consecutive boundary pair and pool
/// the velocities.
pub fn track_sequence(
    boundaries: &[Vec<Point>],
    res_px_per_cm: f64,
    sample_rate_hz: f64,
    axis_deg: f64,
    max_dist_px: f64,
) -> Result<TrackOutcome> {
    if boundaries.len() < 2 {
        return Err(Error::InsufficientSequence(format!(
            "tracking needs at least 2 frames with boundaries, got {}",
            boundaries.len()
        )));
    }
    if !sample_rate_hz.is_finite() || sample_rate_hz <= 0.0 {
        return Err(Error::Config("sample_rate_hz must be positive".into()));
    }
    let dt_s = 1.0 / sample_rate_hz;

    let mut fields = Vec::new();
    let mut samples = Vec::new();
    let mut per_pair = Vec::new();
    let mut warnings = Vec::new();
    for (t, pair) in boundaries.windows(2).enumerate() {
        let (src, dst) = (&pair[0], &pair[1]);
        if src.is_empty() || dst.is_empty() {
            warnings.push(format!("frame pair {t}->{}: empty boundary, no matches", t + 1));
            fields.push(DisplacementField { pairs: Vec::new(), dt_s });
            per_pair.push(PairStats { src_points: src.len(), dst_points: dst.len(), matched: 0 });
            continue;
        }
        let field = greedy_match(src, dst, max_dist_px, dt_s)?;
        per_pair.push(PairStats { src_points: src.len(), dst_points: dst.len(), matched: field.pairs.len() });
        samples.extend(to_velocities(&field, res_px_per_cm, axis_deg)?);
        fields.push(field);
    }
    Ok(TrackOutcome { fields, samples, per_pair, warnings })
}
