//! Coarse-to-fine noise removal for binary masks.
//!
//! Each level simultaneously clears every set pixel whose count of set
//! pixels within Chebyshev radius `r` (excluding itself) falls below
//! `min_neighbors`, judged against a snapshot of the level's input so the
//! outcome is independent of visitation order. Levels run coarsest first.
//! Neighborhoods are clipped at image borders and thresholds are not
//! rescaled there; pad the mask beforehand if border behavior matters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::BinaryMask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleaningLevel {
    pub radius: u32,
    pub min_neighbors: u32,
}

/// Ordered levels with strictly decreasing radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<CleaningLevel>", into = "Vec<CleaningLevel>")]
pub struct CleaningSchedule {
    levels: Vec<CleaningLevel>,
}

impl CleaningSchedule {
    pub fn new(levels: Vec<CleaningLevel>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Config("cleaning schedule needs at least one level".into()));
        }
        for level in &levels {
            if level.radius == 0 {
                return Err(Error::Config("cleaning radius must be positive".into()));
            }
            if level.min_neighbors == 0 {
                return Err(Error::Config("min_neighbors must be positive".into()));
            }
            let window = 2 * level.radius as u64 + 1;
            let max_neighbors = window * window - 1;
            if level.min_neighbors as u64 > max_neighbors {
                return Err(Error::Config(format!(
                    "min_neighbors {} exceeds the {} pixels a radius-{} neighborhood can hold",
                    level.min_neighbors, max_neighbors, level.radius
                )));
            }
        }
        for pair in levels.windows(2) {
            if pair[1].radius >= pair[0].radius {
                return Err(Error::Config("cleaning radii must be strictly decreasing".into()));
            }
        }
        Ok(CleaningSchedule { levels })
    }

    /// Default schedule: remove blob-scale noise first, then stragglers.
    pub fn default_schedule() -> Self {
        CleaningSchedule::new(vec![
            CleaningLevel { radius: 8, min_neighbors: 60 },
            CleaningLevel { radius: 3, min_neighbors: 8 },
            CleaningLevel { radius: 1, min_neighbors: 2 },
        ])
        .expect("default schedule is valid")
    }

    pub fn levels(&self) -> &[CleaningLevel] {
        &self.levels
    }
}

impl TryFrom<Vec<CleaningLevel>> for CleaningSchedule {
    type Error = Error;
    fn try_from(levels: Vec<CleaningLevel>) -> Result<Self> {
        CleaningSchedule::new(levels)
    }
}

impl From<CleaningSchedule> for Vec<CleaningLevel> {
    fn from(s: CleaningSchedule) -> Self {
        s.levels
    }
}

/// One application of the level rule.
pub fn single_level_clean(mask: &BinaryMask, radius: u32, min_neighbors: u32) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    if w == 0 || h == 0 {
        return mask.clone();
    }
    // Summed-area table over the snapshot: counts in any box are O(1).
    let mut integral = vec![0u32; (w + 1) * (h + 1)];
    for y in 0..h {
        for x in 0..w {
            integral[(y + 1) * (w + 1) + (x + 1)] = integral[y * (w + 1) + (x + 1)]
                + integral[(y + 1) * (w + 1) + x]
                - integral[y * (w + 1) + x]
                + mask.get(x, y) as u32;
        }
    }
    let box_count = |x0: usize, y0: usize, x1: usize, y1: usize| -> u32 {
        // inclusive corners
        integral[(y1 + 1) * (w + 1) + (x1 + 1)] + integral[y0 * (w + 1) + x0]
            - integral[y0 * (w + 1) + (x1 + 1)]
            - integral[(y1 + 1) * (w + 1) + x0]
    };

    let r = radius as usize;
    BinaryMask::from_fn(w, h, |x, y| {
        if !mask.get(x, y) {
            return false;
        }
        let x0 = x.saturating_sub(r);
        let y0 = y.saturating_sub(r);
        let x1 = (x + r).min(w - 1);
        let y1 = (y + r).min(h - 1);
        let neighbors = box_count(x0, y0, x1, y1) - 1;
        neighbors >= min_neighbors
    })
}

/// Run the schedule; each level's output feeds the next.
pub fn clean(mask: &BinaryMask, schedule: &CleaningSchedule) -> BinaryMask {
    let mut current = mask.clone();
    for level in schedule.levels() {
        current = single_level_clean(&current, level.radius, level.min_neighbors);
    }
    current
}
