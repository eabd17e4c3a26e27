//! Delaunay triangulation and α-shape boundary extraction.
//!
//! The triangulation is built by Bowyer–Watson insertion into an initial
//! pair of triangles whose four corner vertices sit at symbolic infinity.
//! Predicates treat every vertex as `q + t·d` for a direction `d` that is
//! zero for finite points, evaluate the orientation/in-circle determinant
//! as an exact integer polynomial in `t`, and take the sign of the leading
//! coefficient — the t→∞ limit. Input coordinates are integral pixel
//! positions, so the predicates are exact and no epsilon tuning exists
//! anywhere in this module.
//!
//! The α-shape retains triangles with circumradius ≤ 1/α (every triangle
//! when α = 0, which yields the convex hull) and reports the edges incident
//! to exactly one retained triangle. Disjoint groups of retained triangles
//! and interior gaps each contribute their own closed loop, which is what
//! makes ring fires and merging fronts come out with inner boundaries.

use std::collections::HashMap;

use crate::clustering::{Point, PointSet};
use crate::error::{Error, Result};

/// Pixel coordinates are capped so the quartic predicate polynomials stay
/// inside i128.
const MAX_COORD: i64 = 1 << 26;

/// Default concavity parameter, in 1/px.
pub const DEFAULT_ALPHA: f64 = 1.0 / 3.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    /// Vertices in the order of the input point set.
    pub points: Vec<Point>,
    /// Counterclockwise index triples into `points`.
    pub triangles: Vec<[usize; 3]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaBoundary {
    /// Concavity parameter the boundary was extracted at, 1/px.
    pub alpha: f64,
    /// Triangle indices retained by the circumradius criterion.
    pub retained_triangles: Vec<usize>,
    /// Vertex-index pairs (lo, hi) bordering exactly one retained triangle.
    pub boundary_edges: Vec<(usize, usize)>,
    /// Deduplicated boundary edge endpoints, row-major order.
    pub boundary_points: Vec<Point>,
}

impl AlphaBoundary {
    /// Number of connected components of the boundary edge graph; an
    /// annulus yields two, a filled blob one.
    pub fn loop_count(&self) -> usize {
        let mut ids: Vec<usize> = Vec::new();
        let mut index_of = HashMap::new();
        for &(a, b) in &self.boundary_edges {
            for v in [a, b] {
                index_of.entry(v).or_insert_with(|| {
                    ids.push(ids.len());
                    ids.len() - 1
                });
            }
        }
        fn find(ids: &mut [usize], mut i: usize) -> usize {
            while ids[i] != i {
                ids[i] = ids[ids[i]];
                i = ids[i];
            }
            i
        }
        for &(a, b) in &self.boundary_edges {
            let (ra, rb) = (find(&mut ids, index_of[&a]), find(&mut ids, index_of[&b]));
            if ra != rb {
                ids[ra] = rb;
            }
        }
        let mut roots: Vec<usize> = (0..ids.len()).map(|i| find(&mut ids, i)).collect();
        roots.sort_unstable();
        roots.dedup();
        roots.len()
    }
}

// ---------------------------------------------------------------------------
// Exact predicates on generalized points.

/// Vertex `q + t·d`; finite points have `d = 0`, the four corner vertices
/// have `q = 0` and `d` a diagonal unit direction.
#[derive(Debug, Clone, Copy)]
struct GPoint {
    qx: i128,
    qy: i128,
    dx: i128,
    dy: i128,
}

impl GPoint {
    fn finite(p: Point) -> Self {
        GPoint { qx: p.x as i128, qy: p.y as i128, dx: 0, dy: 0 }
    }

    fn corner(k: usize) -> Self {
        let (dx, dy) = [(-1, -1), (1, -1), (1, 1), (-1, 1)][k];
        GPoint { qx: 0, qy: 0, dx, dy }
    }
}

/// Polynomial in t of degree ≤ 4 with exact integer coefficients.
#[derive(Debug, Clone, Copy)]
struct Poly([i128; 5]);

impl Poly {
    fn linear(c0: i128, c1: i128) -> Self {
        Poly([c0, c1, 0, 0, 0])
    }

    fn add(self, o: Poly) -> Poly {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a += b;
        }
        Poly(c)
    }

    fn sub(self, o: Poly) -> Poly {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(o.0) {
            *a -= b;
        }
        Poly(c)
    }

    fn mul(self, o: Poly) -> Poly {
        let mut c = [0i128; 5];
        for i in 0..5 {
            if self.0[i] == 0 {
                continue;
            }
            for j in 0..5 {
                if o.0[j] == 0 {
                    continue;
                }
                debug_assert!(i + j <= 4, "predicate degree overflow");
                c[i + j] += self.0[i] * o.0[j];
            }
        }
        Poly(c)
    }

    /// Sign of the t→∞ limit: the leading nonzero coefficient.
    fn sign(self) -> i32 {
        for i in (0..5).rev() {
            if self.0[i] != 0 {
                return if self.0[i] > 0 { 1 } else { -1 };
            }
        }
        0
    }
}

/// Sign of cross(b−a, c−a): positive when (a, b, c) turn counterclockwise.
fn orient(a: &GPoint, b: &GPoint, c: &GPoint) -> i32 {
    let ux = Poly::linear(b.qx - a.qx, b.dx - a.dx);
    let uy = Poly::linear(b.qy - a.qy, b.dy - a.dy);
    let vx = Poly::linear(c.qx - a.qx, c.dx - a.dx);
    let vy = Poly::linear(c.qy - a.qy, c.dy - a.dy);
    ux.mul(vy).sub(uy.mul(vx)).sign()
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counterclockwise triangle (a, b, c).
fn incircle(a: &GPoint, b: &GPoint, c: &GPoint, d: &GPoint) -> i32 {
    let row = |u: &GPoint| {
        let ex = Poly::linear(u.qx - d.qx, u.dx - d.dx);
        let ey = Poly::linear(u.qy - d.qy, u.dy - d.dy);
        let e2 = ex.mul(ex).add(ey.mul(ey));
        (ex, ey, e2)
    };
    let (axp, ayp, a2p) = row(a);
    let (bxp, byp, b2p) = row(b);
    let (cxp, cyp, c2p) = row(c);
    let det = axp
        .mul(byp.mul(c2p).sub(cyp.mul(b2p)))
        .sub(ayp.mul(bxp.mul(c2p).sub(cxp.mul(b2p))))
        .add(a2p.mul(bxp.mul(cyp).sub(cxp.mul(byp))));
    det.sign()
}

// ---------------------------------------------------------------------------
// Bowyer–Watson mesh.

const NO_TRI: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Tri {
    v: [usize; 3],
    /// n[k] is across the edge opposite v[k].
    n: [usize; 3],
    alive: bool,
}

struct Mesh {
    points: Vec<GPoint>,
    tris: Vec<Tri>,
    hint: usize,
    stamp: Vec<u64>,
    stamp_value: u64,
}

impl Mesh {
    /// `finite` are the vertices to be inserted, already in insertion order.
    fn new(finite: &[Point]) -> Self {
        let n = finite.len();
        let mut points: Vec<GPoint> = finite.iter().map(|&p| GPoint::finite(p)).collect();
        for k in 0..4 {
            points.push(GPoint::corner(k));
        }
        let c = |k: usize| n + k;
        let tris = vec![
            Tri { v: [c(0), c(1), c(2)], n: [NO_TRI, 1, NO_TRI], alive: true },
            Tri { v: [c(2), c(3), c(0)], n: [NO_TRI, 0, NO_TRI], alive: true },
        ];
        Mesh { points, tris, hint: 0, stamp: vec![0, 0], stamp_value: 0 }
    }

    /// Triangle containing the finite point `p` (inclusive of edges).
    fn locate(&self, p: usize) -> usize {
        let target = &self.points[p];
        let mut t = self.hint;
        let mut steps = 0usize;
        let budget = 4 * self.tris.len() + 16;
        'walk: loop {
            debug_assert!(self.tris[t].alive);
            let v = self.tris[t].v;
            for k in 0..3 {
                let u = v[(k + 1) % 3];
                let w = v[(k + 2) % 3];
                if orient(&self.points[u], &self.points[w], target) < 0 {
                    let next = self.tris[t].n[k];
                    debug_assert_ne!(next, NO_TRI, "walk escaped the covered plane");
                    t = next;
                    steps += 1;
                    if steps > budget {
                        break 'walk;
                    }
                    continue 'walk;
                }
            }
            return t;
        }
        // Degenerate walk cycles are possible in exotic configurations;
        // fall back to an exhaustive scan.
        for (i, tri) in self.tris.iter().enumerate() {
            if !tri.alive {
                continue;
            }
            let inside = (0..3).all(|k| {
                let u = tri.v[(k + 1) % 3];
                let w = tri.v[(k + 2) % 3];
                orient(&self.points[u], &self.points[w], target) >= 0
            });
            if inside {
                return i;
            }
        }
        unreachable!("point not covered by any triangle");
    }

    fn insert(&mut self, p: usize) {
        let seed = self.locate(p);

        // Grow the cavity: triangles whose circumcircles strictly contain p.
        self.stamp_value += 1;
        let stamp = self.stamp_value;
        let mut cavity = Vec::new();
        let mut stack = vec![seed];
        self.stamp[seed] = stamp;
        while let Some(t) = stack.pop() {
            let v = self.tris[t].v;
            let contains = t == seed
                || incircle(
                    &self.points[v[0]],
                    &self.points[v[1]],
                    &self.points[v[2]],
                    &self.points[p],
                ) > 0;
            if !contains {
                continue;
            }
            cavity.push(t);
            for k in 0..3 {
                let nb = self.tris[t].n[k];
                if nb != NO_TRI && self.stamp[nb] != stamp {
                    self.stamp[nb] = stamp;
                    stack.push(nb);
                }
            }
        }

        let in_cavity: std::collections::HashSet<usize> = cavity.iter().copied().collect();

        // Directed cavity boundary edges (u, w) with their outside triangle.
        let mut rim: Vec<(usize, usize, usize)> = Vec::new();
        for &t in &cavity {
            let tri = self.tris[t].clone();
            for k in 0..3 {
                let outside = tri.n[k];
                if outside == NO_TRI || !in_cavity.contains(&outside) {
                    rim.push((tri.v[(k + 1) % 3], tri.v[(k + 2) % 3], outside));
                }
            }
        }

        for &t in &cavity {
            self.tris[t].alive = false;
        }

        // One new triangle per rim edge, all sharing p.
        let mut start_of: HashMap<usize, usize> = HashMap::with_capacity(rim.len());
        let mut end_of: HashMap<usize, usize> = HashMap::with_capacity(rim.len());
        let first_new = self.tris.len();
        for (i, &(u, w, _)) in rim.iter().enumerate() {
            start_of.insert(u, first_new + i);
            end_of.insert(w, first_new + i);
        }
        for &(u, w, outside) in &rim {
            let id = self.tris.len();
            // Neighbors: across (w, p) the rim edge starting at w; across
            // (p, u) the rim edge ending at u; across (u, w) the outside.
            let across_u = start_of[&w];
            let across_w = end_of[&u];
            self.tris.push(Tri { v: [u, w, p], n: [across_u, across_w, outside], alive: true });
            self.stamp.push(0);
            if outside != NO_TRI {
                let back = &mut self.tris[outside];
                for k in 0..3 {
                    if back.v[(k + 1) % 3] == w && back.v[(k + 2) % 3] == u {
                        back.n[k] = id;
                    }
                }
            }
        }
        self.hint = first_new;
    }
}

/// Delaunay triangulation of a point set.
///
/// Cocircular degeneracies are resolved deterministically: points are
/// inserted in row-major order and an exactly-on-circle vertex counts as
/// outside, so reruns and permuted inputs produce the same mesh.
pub fn delaunay(ps: &PointSet) -> Result<Triangulation> {
    let pts = ps.points();
    if pts.len() < 3 {
        return Err(Error::DegenerateGeometry(format!(
            "triangulation needs at least 3 points, got {}",
            pts.len()
        )));
    }
    for p in pts {
        if p.x.abs() > MAX_COORD || p.y.abs() > MAX_COORD {
            return Err(Error::Config(format!(
                "coordinate ({}, {}) exceeds the supported magnitude {MAX_COORD}",
                p.x, p.y
            )));
        }
    }

    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by_key(|&i| pts[i].row_major_key());
    let sorted: Vec<Point> = order.iter().map(|&i| pts[i]).collect();

    let mut mesh = Mesh::new(&sorted);
    for i in 0..sorted.len() {
        mesh.insert(i);
    }

    let n = sorted.len();
    let mut triangles = Vec::new();
    for tri in &mesh.tris {
        if tri.alive && tri.v.iter().all(|&v| v < n) {
            let mapped = [order[tri.v[0]], order[tri.v[1]], order[tri.v[2]]];
            debug_assert!(
                orient(
                    &GPoint::finite(pts[mapped[0]]),
                    &GPoint::finite(pts[mapped[1]]),
                    &GPoint::finite(pts[mapped[2]]),
                ) > 0
            );
            triangles.push(mapped);
        }
    }
    if triangles.is_empty() {
        return Err(Error::DegenerateGeometry("all points are collinear".into()));
    }
    Ok(Triangulation { points: pts.to_vec(), triangles })
}

/// Squared circumradius test: keep the triangle iff circumradius ≤ 1/α.
///
/// With squared side lengths a², b², c² and D = 2·signed area (all exact
/// integers), R² = a²b²c² / (4D²), so the criterion is α²·a²b²c² ≤ 4D².
fn retained_by_alpha(points: &[Point], tri: &[usize; 3], alpha: f64) -> bool {
    if alpha == 0.0 {
        return true;
    }
    let [a, b, c] = [points[tri[0]], points[tri[1]], points[tri[2]]];
    let a2 = b.dist2(&c) as f64;
    let b2 = a.dist2(&c) as f64;
    let c2 = a.dist2(&b) as f64;
    let d = ((b.x - a.x) as i128 * (c.y - a.y) as i128 - (b.y - a.y) as i128 * (c.x - a.x) as i128) as f64;
    alpha * alpha * a2 * b2 * c2 <= 4.0 * d * d
}

/// Extract the α-shape boundary from a triangulation.
pub fn alpha_shape(tri: &Triangulation, alpha: f64) -> AlphaBoundary {
    assert!(alpha >= 0.0 && alpha.is_finite(), "alpha must be a finite non-negative value");

    let retained_triangles: Vec<usize> = (0..tri.triangles.len())
        .filter(|&i| retained_by_alpha(&tri.points, &tri.triangles[i], alpha))
        .collect();

    let mut edge_incidence: HashMap<(usize, usize), u32> = HashMap::new();
    for &t in &retained_triangles {
        let v = tri.triangles[t];
        for k in 0..3 {
            let (a, b) = (v[k], v[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            *edge_incidence.entry(key).or_insert(0) += 1;
        }
    }

    let mut boundary_edges: Vec<(usize, usize)> =
        edge_incidence.into_iter().filter(|&(_, count)| count == 1).map(|(e, _)| e).collect();
    boundary_edges.sort_unstable();

    let mut point_indices: Vec<usize> = boundary_edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    point_indices.sort_unstable();
    point_indices.dedup();
    let mut boundary_points: Vec<Point> = point_indices.into_iter().map(|i| tri.points[i]).collect();
    boundary_points.sort_by_key(|p| p.row_major_key());

    AlphaBoundary { alpha, retained_triangles, boundary_edges, boundary_points }
}

/// Triangulate a region and extract its α-shape boundary in one step.
pub fn region_boundary(ps: &PointSet, alpha: f64) -> Result<AlphaBoundary> {
    let tri = delaunay(ps)?;
    Ok(alpha_shape(&tri, alpha))
}
