//! Batch analysis of fire and plume motion in visual and infrared frame
//! sequences.
//!
//! The processing chain mirrors how the data flows:
//!
//! 1. [`imagery`] — load and subsample frame sequences, color conversion, ROI crop.
//! 2. [`segmentation`] — RGB∧HSV thresholding (visual) or temperature bands (infrared).
//! 3. [`cleaning`] — coarse-to-fine neighbor-count noise removal on binary masks.
//! 4. [`clustering`] — DBSCAN split of a mask into distinct regions.
//! 5. [`boundary`] — Delaunay triangulation and α-shape boundary extraction.
//! 6. [`tracking`] — greedy nearest-neighbor matching of boundary points,
//!    displacement-to-velocity conversion.
//! 7. [`stats`] — distribution fitting (moment matching and MCMC), NRMSE,
//!    Nyquist sampling advisor.
//! 8. [`export`] — rasterized label grids, boundary/velocity tables, manifests.
//!
//! [`inpaint`] fills user-masked occlusions before segmentation, [`synth`]
//! generates synthetic sequences with analytically known ground truth, and
//! [`pipeline`] wires everything together behind a single [`config`] document.
//! The `fdv` binary exposes the pipeline on the command line.

pub mod boundary;
pub mod cleaning;
pub mod clustering;
pub mod config;
pub mod error;
pub mod export;
pub mod imagery;
pub mod inpaint;
pub mod pipeline;
pub mod segmentation;
pub mod stats;
pub mod synth;
pub mod tracking;

pub use clustering::{Point, PointSet};
pub use error::{Error, Result};
pub use imagery::{Frame, FrameKind, Rect, SequenceMeta};
pub use segmentation::BinaryMask;
