//! DBSCAN partitioning of mask pixels into distinct regions.
//!
//! Standard DBSCAN semantics with Euclidean distance: a core point has at
//! least `min_pts` neighbors within ε counting itself, clusters are the
//! connected components of core points under ε-adjacency plus their border
//! points, and everything else is noise (label −1).
//!
//! Two determinism rules remove the classical order dependence:
//! cluster ids are assigned by scanning core points in row-major (y, x)
//! order, and a border point reachable from several clusters joins the
//! cluster of its row-major-first core neighbor. The partition is therefore
//! a pure function of the point set.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::BinaryMask;

/// Integer pixel coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Self {
        Point { x, y }
    }

    /// Row-major sort key.
    #[inline]
    pub fn row_major_key(&self) -> (i64, i64) {
        (self.y, self.x)
    }

    #[inline]
    pub fn dist2(&self, other: &Point) -> i64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// De-duplicated set of pixel coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    points: Vec<Point>,
}

impl PointSet {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(points.len());
        for p in &points {
            if !seen.insert(*p) {
                return Err(Error::Config(format!("duplicate point ({}, {}) in point set", p.x, p.y)));
            }
        }
        Ok(PointSet { points })
    }

    pub fn from_mask(mask: &BinaryMask) -> Self {
        let points = mask
            .set_pixels()
            .into_iter()
            .map(|(x, y)| Point::new(x as i64, y as i64))
            .collect();
        // Mask pixels are unique by construction.
        PointSet { points }
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Per-point cluster labels; ≥ 0 is a cluster id, −1 is noise.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub labels: Vec<i64>,
    pub eps: f64,
    pub min_pts: usize,
    pub cluster_count: usize,
}

/// Uniform grid with cell size ε for near-linear neighbor queries.
///
/// Distances compare as integers: for integral coordinates,
/// d² ≤ ε² ⟺ d² ≤ ⌊ε²⌋.
struct NeighborGrid<'a> {
    points: &'a [Point],
    eps: f64,
    eps2_int: i64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl<'a> NeighborGrid<'a> {
    fn new(points: &'a [Point], eps: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            cells.entry(Self::cell_of(p, eps)).or_default().push(i);
        }
        let eps2 = eps * eps;
        let eps2_int = if eps2 >= i64::MAX as f64 { i64::MAX } else { eps2.floor() as i64 };
        NeighborGrid { points, eps, eps2_int, cells }
    }

    fn cell_of(p: &Point, eps: f64) -> (i64, i64) {
        ((p.x as f64 / eps).floor() as i64, (p.y as f64 / eps).floor() as i64)
    }

    /// Visit every index within ε of `points[i]`, including `i` itself.
    #[inline]
    fn for_each_neighbor(&self, i: usize, mut visit: impl FnMut(usize)) {
        let p = &self.points[i];
        let (cx, cy) = Self::cell_of(p, self.eps);
        for gy in cy - 1..=cy + 1 {
            for gx in cx - 1..=cx + 1 {
                if let Some(bucket) = self.cells.get(&(gx, gy)) {
                    for &j in bucket {
                        if p.dist2(&self.points[j]) <= self.eps2_int {
                            visit(j);
                        }
                    }
                }
            }
        }
    }

    fn neighbor_count(&self, i: usize) -> usize {
        let mut count = 0;
        self.for_each_neighbor(i, |_| count += 1);
        count
    }
}

pub fn dbscan(ps: &PointSet, eps: f64, min_pts: usize) -> Result<Clustering> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::Config(format!("dbscan eps must be positive, got {eps}")));
    }
    if min_pts == 0 {
        return Err(Error::Config("dbscan min_pts must be at least 1".into()));
    }
    let points = ps.points();
    let n = points.len();
    if n == 0 {
        return Ok(Clustering { labels: Vec::new(), eps, min_pts, cluster_count: 0 });
    }

    let grid = NeighborGrid::new(points, eps);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| points[i].row_major_key());
    // Row-major discovery rank of each point.
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let core: Vec<bool> = (0..n).map(|i| grid.neighbor_count(i) >= min_pts).collect();

    let mut labels = vec![-1i64; n];
    let mut cluster_count = 0usize;

    // Phase 1: connected components of core points, seeded in row-major order.
    let mut queue = Vec::new();
    for &seed in &order {
        if !core[seed] || labels[seed] >= 0 {
            continue;
        }
        let id = cluster_count as i64;
        cluster_count += 1;
        labels[seed] = id;
        queue.push(seed);
        while let Some(p) = queue.pop() {
            grid.for_each_neighbor(p, |q| {
                if core[q] && labels[q] < 0 {
                    labels[q] = id;
                    queue.push(q);
                }
            });
        }
    }

    // Phase 2: border points join the cluster of their row-major-first
    // core neighbor; points with no core neighbor stay noise.
    for i in 0..n {
        if core[i] {
            continue;
        }
        let mut owner: Option<usize> = None;
        grid.for_each_neighbor(i, |j| {
            if core[j] && owner.is_none_or(|o| rank[j] < rank[o]) {
                owner = Some(j);
            }
        });
        if let Some(j) = owner {
            labels[i] = labels[j];
        }
    }

    Ok(Clustering { labels, eps, min_pts, cluster_count })
}

/// Split a cleaned mask into per-region point sets, noise discarded.
///
/// Regions are ordered by descending size, ties broken by the smallest
/// row-major member.
pub fn split_regions(mask: &BinaryMask, eps: f64, min_pts: usize) -> Result<Vec<PointSet>> {
    let ps = PointSet::from_mask(mask);
    let clustering = dbscan(&ps, eps, min_pts)?;
    let mut groups: Vec<Vec<Point>> = vec![Vec::new(); clustering.cluster_count];
    for (p, &label) in ps.points().iter().zip(clustering.labels.iter()) {
        if label >= 0 {
            groups[label as usize].push(*p);
        }
    }
    let mut regions: Vec<Vec<Point>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    regions.sort_by_key(|g| {
        let min_member = g.iter().map(|p| p.row_major_key()).min().unwrap();
        (std::cmp::Reverse(g.len()), min_member)
    });
    Ok(regions.into_iter().map(|points| PointSet { points }).collect())
}
