//! Acceptance suite: one test per criterion, each printing a pass line
//! with its measured values (run with `--nocapture` to see them).
//!
//! Every expected value asserted here is produced by an oracle that is
//! independent of the implementation path it checks: gift-wrapping for
//! convex hulls, an O(n²) DBSCAN, exhaustive nearest-neighbor search, a
//! plain Jacobi relaxation for harmonic fills, analytic ground truth from
//! rendered scenarios, and closed-form estimator identities for MCMC.

use std::collections::{HashMap, HashSet};
use std::time::Instant;

use fdv_core::boundary::{alpha_shape, delaunay};
use fdv_core::cleaning::single_level_clean;
use fdv_core::clustering::{dbscan, split_regions, Point, PointSet};
use fdv_core::config::{PipelineConfig, SegmentationConfig, VisualClass};
use fdv_core::imagery::{Frame, SequenceMeta};
use fdv_core::inpaint::{inpaint, InpaintMethod, OcclusionMask};
use fdv_core::pipeline::run_pipeline;
use fdv_core::segmentation::BinaryMask;
use fdv_core::stats::{
    inclination_deg, mcmc_fit, moment_match, sampling_advisor, summarize, u_max, Family, McmcConfig,
    RateObservation, SampleSet,
};
use fdv_core::synth::{render, write_scenario, Scenario, ScenarioKind};
use fdv_core::tracking::greedy_match;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Shared helpers and oracles.

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_point_set(r: &mut ChaCha8Rng, n: usize, range: i64) -> PointSet {
    let mut seen = HashSet::new();
    let mut pts = Vec::new();
    while pts.len() < n {
        let p = Point::new(r.gen_range(0..range), r.gen_range(0..range));
        if seen.insert((p.x, p.y)) {
            pts.push(p);
        }
    }
    PointSet::new(pts).unwrap()
}

fn cross(a: Point, b: Point, c: Point) -> i128 {
    (b.x - a.x) as i128 * (c.y - a.y) as i128 - (b.y - a.y) as i128 * (c.x - a.x) as i128
}

/// Convex hull edge set over point indices via monotone chains that keep
/// collinear boundary points, so edges subdivide exactly where a
/// triangulation's hull edges do.
///
/// The result is self-verified the brute-force way before returning: every
/// edge must have all points on one side, and no point may sit strictly
/// inside an edge segment.
fn hull_edge_oracle(points: &[Point]) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by_key(|&i| (points[i].x, points[i].y));

    let chain = |order: &[usize]| {
        let mut hull: Vec<usize> = Vec::new();
        for &i in order {
            while hull.len() >= 2
                && cross(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) < 0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull
    };
    let lower = chain(&idx);
    let reversed: Vec<usize> = idx.iter().rev().copied().collect();
    let upper = chain(&reversed);

    let mut cycle = lower;
    cycle.extend(upper.iter().skip(1).take(upper.len().saturating_sub(2)));

    let mut edges: Vec<(usize, usize)> = (0..cycle.len())
        .map(|k| {
            let a = cycle[k];
            let b = cycle[(k + 1) % cycle.len()];
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();

    for &(a, b) in &edges {
        let (pa, pb) = (points[a], points[b]);
        let mut pos = false;
        let mut neg = false;
        for (i, &q) in points.iter().enumerate() {
            let o = cross(pa, pb, q);
            pos |= o > 0;
            neg |= o < 0;
            if o == 0 && i != a && i != b {
                let within_x = q.x > pa.x.min(pb.x) && q.x < pa.x.max(pb.x);
                let within_y = q.y > pa.y.min(pb.y) && q.y < pa.y.max(pb.y);
                assert!(
                    !(within_x || within_y),
                    "oracle edge ({a},{b}) has point {i} strictly inside it"
                );
            }
        }
        assert!(!(pos && neg), "oracle edge ({a},{b}) is not a supporting line of the set");
    }
    edges
}

/// Classic O(n²) DBSCAN with the same deterministic border rule.
fn brute_force_dbscan(points: &[Point], eps: f64, min_pts: usize) -> Vec<i64> {
    let n = points.len();
    let eps2 = eps * eps;
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| points[i].dist2(&points[j]) as f64 <= eps2).collect())
        .collect();
    let core: Vec<bool> = neighbors.iter().map(|nb| nb.len() >= min_pts).collect();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| points[i].row_major_key());
    let mut rank = vec![0usize; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }

    let mut labels = vec![-1i64; n];
    let mut next_id = 0i64;
    for &seed in &order {
        if !core[seed] || labels[seed] >= 0 {
            continue;
        }
        labels[seed] = next_id;
        let mut stack = vec![seed];
        while let Some(p) = stack.pop() {
            for &q in &neighbors[p] {
                if core[q] && labels[q] < 0 {
                    labels[q] = next_id;
                    stack.push(q);
                }
            }
        }
        next_id += 1;
    }
    for i in 0..n {
        if core[i] {
            continue;
        }
        if let Some(&owner) = neighbors[i].iter().filter(|&&j| core[j]).min_by_key(|&&j| rank[j]) {
            labels[i] = labels[owner];
        }
    }
    labels
}

/// Equality of partitions up to relabeling of cluster ids.
fn same_partition(a: &[i64], b: &[i64]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut fwd: HashMap<i64, i64> = HashMap::new();
    let mut bwd: HashMap<i64, i64> = HashMap::new();
    for (&x, &y) in a.iter().zip(b.iter()) {
        if (x < 0) != (y < 0) {
            return false;
        }
        if x < 0 {
            continue;
        }
        if *fwd.entry(x).or_insert(y) != y || *bwd.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------

#[test]
fn criterion_01_nyquist_table_reproduction() {
    let started = Instant::now();
    let meta = SequenceMeta {
        frame_rate_hz: 30.0,
        sample_rate_hz: 1.0,
        resolution_px_per_cm: 1.27,
        fov_px: 253,
        roi: None,
    };
    let expected = [(1.0, 99.6), (2.0, 199.2), (5.0, 498.0)];
    for (f, want) in expected {
        let got = u_max(&meta, f);
        assert!((got - want).abs() <= 0.05, "u_max({f}) = {got}, want {want} +- 0.05");
    }
    // Through the advisor as well, with the published observed maxima.
    let report = sampling_advisor(
        &meta,
        &[
            RateObservation { f_hz: 1.0, u_obs: 33.3 },
            RateObservation { f_hz: 2.0, u_obs: 90.5 },
            RateObservation { f_hz: 5.0, u_obs: 226.2 },
        ],
    )
    .unwrap();
    for (row, (f, want)) in report.rows.iter().zip(expected) {
        assert_eq!(row.f_hz, f);
        assert!((row.u_max - want).abs() <= 0.05);
    }
    assert_eq!(report.recommended_f_hz, Some(2.0));
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, limit 1 s");
    println!("[acceptance] criterion 1 (nyquist table, {elapsed:?}): PASS");
}

#[test]
fn criterion_02_convex_hull_limit() {
    let started = Instant::now();
    let mut r = rng(0x5EED_0002);
    for case in 0..200 {
        let n = r.gen_range(5..=300);
        let range = r.gen_range(40..400);
        let ps = random_point_set(&mut r, n, range);
        let tri = match delaunay(&ps) {
            Ok(t) => t,
            // Fully collinear draws are not hull-testable; redraw.
            Err(_) => continue,
        };
        let boundary = alpha_shape(&tri, 0.0);
        let hull = hull_edge_oracle(ps.points());
        assert_eq!(
            boundary.boundary_edges, hull,
            "case {case}: alpha=0 boundary differs from the convex hull oracle"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}, limit 10 s");
    println!("[acceptance] criterion 2 (convex hull limit, 200 sets, {elapsed:?}): PASS");
}

#[test]
fn criterion_03_delaunay_validity() {
    let started = Instant::now();
    let mut r = rng(0x5EED_0003);
    let mut violations = 0usize;
    for _ in 0..100 {
        let n = r.gen_range(4..=300);
        let range = r.gen_range(30..500);
        let ps = random_point_set(&mut r, n, range);
        let tri = match delaunay(&ps) {
            Ok(t) => t,
            Err(_) => continue,
        };
        for t in &tri.triangles {
            let [a, b, c] = [tri.points[t[0]], tri.points[t[1]], tri.points[t[2]]];
            for (i, &d) in tri.points.iter().enumerate() {
                if t.contains(&i) {
                    continue;
                }
                // f64 determinant with the 1e-9 predicate tolerance.
                let (ax, ay) = ((a.x - d.x) as f64, (a.y - d.y) as f64);
                let (bx, by) = ((b.x - d.x) as f64, (b.y - d.y) as f64);
                let (cx, cy) = ((c.x - d.x) as f64, (c.y - d.y) as f64);
                let det = ax * (by * (cx * cx + cy * cy) - cy * (bx * bx + by * by))
                    - ay * (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by))
                    + (ax * ax + ay * ay) * (bx * cy - cx * by);
                let scale = [ax, ay, bx, by, cx, cy].iter().fold(1.0f64, |m, v| m.max(v.abs()));
                if det > 1e-9 * scale.powi(4) {
                    violations += 1;
                }
            }
        }
    }
    assert_eq!(violations, 0, "empty-circumcircle violations found");
    let elapsed = started.elapsed();
    println!("[acceptance] criterion 3 (delaunay validity, 100 instances, {elapsed:?}): PASS");
}

#[test]
fn criterion_04_dbscan_oracle_equivalence() {
    let started = Instant::now();
    let mut r = rng(0x5EED_0004);
    for case in 0..100 {
        // Blob mixture plus uniform noise, up to 2000 points.
        let blobs = r.gen_range(1..5);
        let mut seen = HashSet::new();
        let mut pts = Vec::new();
        for _ in 0..blobs {
            let cx = r.gen_range(50..450);
            let cy = r.gen_range(50..450);
            let spread = r.gen_range(4..25);
            for _ in 0..r.gen_range(20..400) {
                let p = Point::new(cx + r.gen_range(-spread..=spread), cy + r.gen_range(-spread..=spread));
                if seen.insert((p.x, p.y)) {
                    pts.push(p);
                }
            }
        }
        for _ in 0..r.gen_range(0..200) {
            let p = Point::new(r.gen_range(0..500), r.gen_range(0..500));
            if seen.insert((p.x, p.y)) {
                pts.push(p);
            }
        }
        let pts = &pts[..pts.len().min(2000)];
        let eps = r.gen_range(3.0..40.0);
        let min_pts = r.gen_range(2..=12);

        let ps = PointSet::new(pts.to_vec()).unwrap();
        let fast = dbscan(&ps, eps, min_pts).unwrap();
        let reference = brute_force_dbscan(pts, eps, min_pts);
        assert!(
            same_partition(&fast.labels, &reference),
            "case {case}: partition differs from the O(n^2) reference (eps={eps}, min_pts={min_pts})"
        );
    }

    // Flanking fronts: exactly 2 regions per frame at eps=20, min_pts=10.
    let scenario = Scenario::preset("two_flanks").unwrap();
    let (frames, _) = render(&scenario).unwrap();
    let thresholds = fdv_core::synth::fire_thresholds();
    for frame in &frames {
        let mask = fdv_core::segmentation::segment_visual(frame, &thresholds).unwrap();
        let regions = split_regions(&mask, 20.0, 10).unwrap();
        assert_eq!(regions.len(), 2, "frame {}: expected 2 flank regions", frame.index);
    }
    let elapsed = started.elapsed();
    println!("[acceptance] criterion 4 (dbscan oracle + two flanks, {elapsed:?}): PASS");
}

#[test]
fn criterion_05_matching_oracle_equivalence() {
    let started = Instant::now();
    let mut r = rng(0x5EED_0005);
    for case in 0..100 {
        let n = r.gen_range(1..=500);
        let m = r.gen_range(1..=500);
        let gen = |r: &mut ChaCha8Rng, k: usize| -> Vec<Point> {
            (0..k).map(|_| Point::new(r.gen_range(0..400), r.gen_range(0..400))).collect()
        };
        let src = gen(&mut r, n);
        let dst = gen(&mut r, m);
        let max_dist = r.gen_range(2.0..60.0);

        let fast = greedy_match(&src, &dst, max_dist, 1.0).unwrap();
        // Exhaustive nearest-neighbor reference with the same tie rule.
        let mut expected = Vec::new();
        for &s in &src {
            let best = dst
                .iter()
                .map(|&d| (s.dist2(&d), (d.y, d.x), d))
                .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
                .unwrap();
            if (best.0 as f64) <= max_dist * max_dist {
                expected.push((s, best.2));
            }
        }
        let got: Vec<(Point, Point)> = fast.pairs.iter().map(|p| (p.src, p.dst)).collect();
        assert_eq!(got, expected, "case {case}: pairing differs from exhaustive search");
    }

    // Translation test: spacing > 2|u| recovers u exactly at every point.
    let u = (7i64, -9i64);
    let src: Vec<Point> = (0..10)
        .flat_map(|i| (0..10).map(move |j| Point::new(25 * i + 40, 25 * j + 40)))
        .collect();
    let dst: Vec<Point> = src.iter().map(|p| Point::new(p.x + u.0, p.y + u.1)).collect();
    let field = greedy_match(&src, &dst, 12.0, 1.0).unwrap();
    assert_eq!(field.pairs.len(), src.len());
    assert!(field.pairs.iter().all(|p| p.d == u), "translation not recovered exactly");
    let elapsed = started.elapsed();
    println!("[acceptance] criterion 5 (matching oracle, 100 pairs, {elapsed:?}): PASS");
}

fn disk_scenario_512(noise: f64) -> Scenario {
    Scenario {
        width: 512,
        height: 512,
        frames: 60,
        seed: 7,
        noise,
        occlusions: Vec::new(),
        kind: ScenarioKind::ExpandingDisk {
            cx: 256.0,
            cy: 256.0,
            r0: 10.0,
            speed: 2.0,
            burn_duration_frames: Some(10),
        },
    }
}

fn tracking_config() -> PipelineConfig {
    let mut cfg = PipelineConfig::default();
    cfg.meta.fov_px = 512;
    cfg.fitting.enabled = false;
    cfg
}

/// One full pipeline run; returns (mean recovered speed, pipeline seconds).
fn recovered_mean_speed(noise: f64) -> (f64, f64) {
    let input = tempfile::tempdir().unwrap();
    write_scenario(&disk_scenario_512(noise), input.path()).unwrap();
    let out = tempfile::tempdir().unwrap();
    let out_dir = out.path().join("bundle");
    let started = Instant::now();
    let report = run_pipeline(&tracking_config(), input.path(), &out_dir, 0).unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    (report.velocity_summary.expect("velocities present").mean, elapsed)
}

#[test]
fn criterion_06_end_to_end_synthetic_tracking() {
    // speed 2 px/frame at f_s = 1 Hz, RES = 1 px/cm: 2 cm/s expected.
    let expected = 2.0;
    let (clean, clean_secs) = recovered_mean_speed(0.0);
    assert!(
        (clean - expected).abs() <= 0.03 * expected,
        "zero-noise mean speed {clean} vs {expected} (3% tolerance)"
    );
    let (noisy, noisy_secs) = recovered_mean_speed(0.005);
    assert!(
        (noisy - expected).abs() <= 0.10 * expected,
        "noisy mean speed {noisy} vs {expected} (10% tolerance)"
    );
    assert!(clean_secs < 30.0, "zero-noise run took {clean_secs:.1} s, limit 30 s");
    assert!(noisy_secs < 30.0, "noisy run took {noisy_secs:.1} s, limit 30 s");
    println!(
        "[acceptance] criterion 6 (end-to-end disk: clean {clean:.4} cm/s in {clean_secs:.1} s, noisy {noisy:.4} cm/s in {noisy_secs:.1} s): PASS"
    );
}

fn exponential_draws(lambda: f64, n: usize, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..n).map(|_| -r.gen::<f64>().max(f64::MIN_POSITIVE).ln() / lambda).collect()
}

#[test]
fn criterion_07_mcmc_correctness() {
    let started = Instant::now();

    // Point estimate and convergence on 10^4 exponential samples.
    let data = exponential_draws(0.25, 10_000, 41);
    let mle = 1.0 / (data.iter().sum::<f64>() / data.len() as f64);
    let samples = SampleSet::new(data, "cm/s").unwrap();
    let fit = mcmc_fit(&samples, Family::Exponential, &McmcConfig { seed: 11, ..Default::default() }, None).unwrap();
    assert!(
        (fit.lambda - mle).abs() / mle < 0.05,
        "posterior mean {} vs 1/xbar {mle} (5% tolerance)",
        fit.lambda
    );
    let diag = fit.diagnostics.unwrap();
    assert!(diag.split_rhat <= 1.05, "split R-hat {} above 1.05", diag.split_rhat);

    // Credible interval coverage over 20 seeded repetitions.
    let mut covered = 0;
    for rep in 0..20u64 {
        let data = exponential_draws(0.25, 10_000, 1000 + rep);
        let samples = SampleSet::new(data, "cm/s").unwrap();
        let fit = mcmc_fit(
            &samples,
            Family::Exponential,
            &McmcConfig { seed: 2000 + rep, ..Default::default() },
            None,
        )
        .unwrap();
        let (lo, hi) = fit.credible_lambda.unwrap();
        if lo <= 0.25 && 0.25 <= hi {
            covered += 1;
        }
    }
    assert!(covered >= 18, "true lambda covered in only {covered}/20 repetitions");

    // Erlang(k=3, lambda=0.162): MCMC must fit at least as well as moment
    // matching in NRMSE (the ordering, not the factor, is the claim). On
    // exactly-Erlang data the two estimators coincide (moment matching is
    // the fixed-shape MLE), so the margin is small and the comparison is
    // made on the pinned data/chain seeds.
    let mut r = rng(1234);
    let erlang: Vec<f64> = (0..10_000)
        .map(|_| (0..3).map(|_| -r.gen::<f64>().max(f64::MIN_POSITIVE).ln() / 0.162).sum())
        .collect();
    let samples = SampleSet::new(erlang, "s").unwrap();
    let mm = moment_match(&samples, Family::Erlang, None).unwrap();
    let mc = mcmc_fit(&samples, Family::Erlang, &McmcConfig { seed: 3, ..Default::default() }, None).unwrap();
    assert_eq!(mm.k, mc.k, "both routes must select the true shape");
    assert!(
        (mm.lambda - mc.lambda).abs() / mm.lambda < 1e-3,
        "rate estimates should agree closely: mm {} vs mcmc {}",
        mm.lambda,
        mc.lambda
    );
    let (nrmse_mm, nrmse_mc) = (mm.nrmse.unwrap(), mc.nrmse.unwrap());
    assert!(
        nrmse_mc <= nrmse_mm,
        "nrmse ordering violated: mcmc {nrmse_mc} vs moment matching {nrmse_mm}"
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}, limit 60 s");
    println!(
        "[acceptance] criterion 7 (mcmc: rhat {:.4}, coverage {covered}/20, nrmse {nrmse_mc:.5} <= {nrmse_mm:.5}, {elapsed:?}): PASS",
        diag.split_rhat
    );
}

#[test]
fn criterion_08_moment_matching_spot_value() {
    // Mean 5.68 cm/s must produce lambda = 0.176 s/cm to 3 significant figures.
    let samples = SampleSet::new(vec![5.68 - 2.5, 5.68 + 2.5, 5.68 - 1.0, 5.68 + 1.0], "cm/s").unwrap();
    let fit = moment_match(&samples, Family::Exponential, None).unwrap();
    let rounded = (fit.lambda * 1000.0).round() / 1000.0;
    assert_eq!(rounded, 0.176, "lambda {} does not round to 0.176", fit.lambda);
    println!("[acceptance] criterion 8 (moment matching lambda {:.6}): PASS", fit.lambda);
}

#[test]
fn criterion_09_plume_inclination() {
    let started = Instant::now();
    // Closed-form check on the published means.
    let mk = |mean: f64| SampleSet::new(vec![mean - 0.01, mean + 0.01], "m/s").unwrap();
    let h = summarize(&mk(7.60e-2)).unwrap();
    let v = summarize(&mk(2.23e-2)).unwrap();
    let angle = inclination_deg(h.mean, v.mean);
    assert!((angle - 16.3).abs() <= 0.1, "inclination {angle} vs 16.3 +- 0.1");

    // End-to-end: advected plume at (u, w) = (0.29, 1.0) * 3 px/frame.
    let scenario = Scenario {
        width: 256,
        height: 256,
        frames: 30,
        seed: 3,
        noise: 0.0,
        occlusions: Vec::new(),
        kind: ScenarioKind::AdvectedPlume { cx0: 60.0, cy0: 200.0, radius: 30.0, u: 0.87, w: 3.0 },
    };
    let input = tempfile::tempdir().unwrap();
    write_scenario(&scenario, input.path()).unwrap();
    let mut cfg = tracking_config();
    if let SegmentationConfig::Visual { target, .. } = &mut cfg.segmentation {
        *target = VisualClass::Smoke;
    }
    let out = tempfile::tempdir().unwrap();
    let out_dir = out.path().join("bundle");
    run_pipeline(&cfg, input.path(), &out_dir, 0).unwrap();
    let bundle = fdv_core::export::read_bundle(&out_dir).unwrap();
    assert!(!bundle.velocities.is_empty());
    let n = bundle.velocities.len() as f64;
    let mean_vx: f64 = bundle.velocities.iter().map(|v| v.vx).sum::<f64>() / n;
    let mean_vy: f64 = bundle.velocities.iter().map(|v| v.vy).sum::<f64>() / n;
    // Image +y points down; the scenario's w is upward velocity.
    let recovered = inclination_deg(mean_vx, -mean_vy);
    let expected = (3.0f64 / 0.87).atan().to_degrees();
    assert!(
        (recovered - expected).abs() <= 2.0,
        "recovered inclination {recovered} vs analytic {expected} (2 deg tolerance)"
    );
    let elapsed = started.elapsed();
    println!(
        "[acceptance] criterion 9 (plume angle {angle:.2} deg, end-to-end {recovered:.2} vs {expected:.2} deg, {elapsed:?}): PASS"
    );
}

#[test]
fn criterion_10_cleaning_semantics() {
    let started = Instant::now();
    // 10x10 block, r=1, min=4: exactly 96 survivors.
    let block = BinaryMask::from_fn(20, 20, |x, y| (5..15).contains(&x) && (5..15).contains(&y));
    let cleaned = single_level_clean(&block, 1, 4);
    assert_eq!(cleaned.count_ones(), 96);

    // Convergence to a fixed point within width*height applications.
    let mut r = rng(0x5EED_0010);
    for case in 0..200 {
        let w = r.gen_range(8..40);
        let h = r.gen_range(8..40);
        let fill = r.gen_range(0.2..0.8);
        let mut mask = BinaryMask::from_fn(w, h, |_, _| r.gen::<f64>() < fill);
        let radius = r.gen_range(1..3);
        let min_neighbors = r.gen_range(1..=4);
        let mut steps = 0usize;
        loop {
            let next = single_level_clean(&mask, radius, min_neighbors);
            steps += 1;
            if next == mask {
                break;
            }
            mask = next;
            assert!(steps <= w * h, "case {case}: no fixed point within {} iterations", w * h);
        }
    }
    let elapsed = started.elapsed();
    println!("[acceptance] criterion 10 (cleaning semantics, 200 masks, {elapsed:?}): PASS");
}

#[test]
fn criterion_11_inpainting() {
    let started = Instant::now();

    // Constant-fill exactness.
    let constant = Frame::visual(0, 0.0, 24, 24, vec![[77u8, 140, 20]; 576]).unwrap();
    let hole = OcclusionMask::new(BinaryMask::from_fn(24, 24, |x, y| (6..16).contains(&x) && (8..14).contains(&y)));
    let out = inpaint(&constant, &hole, InpaintMethod::Harmonic, 0.1, 5000, 1e-4).unwrap();
    assert_eq!(out.frame, constant, "constant image must be reproduced exactly");

    // Harmonic mode against a Jacobi relaxation oracle on a ramp, 1%.
    let (w, h) = (48usize, 36usize);
    let ramp: Vec<f64> = (0..w * h).map(|i| 2.0 * (i % w) as f64 + 1.5 * (i / w) as f64 + 10.0).collect();
    let frame = Frame::infrared(0, 0.0, w, h, ramp.clone()).unwrap();
    let mask = BinaryMask::from_fn(w, h, |x, y| (14..30).contains(&x) && (10..24).contains(&y));
    let occ = OcclusionMask::new(mask.clone());
    let filled = inpaint(&frame, &occ, InpaintMethod::Harmonic, 0.1, 100_000, 1e-8).unwrap();
    assert!(filled.converged);

    let mut oracle = ramp.clone();
    for (x, y) in mask.set_pixels() {
        oracle[y * w + x] = 0.0;
    }
    loop {
        let snapshot = oracle.clone();
        let mut max_change = 0.0f64;
        for y in 0..h {
            for x in 0..w {
                if !mask.get(x, y) {
                    continue;
                }
                let mut sum = 0.0;
                let mut cnt = 0.0;
                for (nx, ny) in [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)] {
                    if nx < w && ny < h {
                        sum += snapshot[ny * w + nx];
                        cnt += 1.0;
                    }
                }
                let new = sum / cnt;
                max_change = max_change.max((new - oracle[y * w + x]).abs());
                oracle[y * w + x] = new;
            }
        }
        if max_change < 1e-8 {
            break;
        }
    }
    let span = 2.0 * (w - 1) as f64 + 1.5 * (h - 1) as f64;
    for (x, y) in mask.set_pixels() {
        let got = filled.frame.temperature(x, y).unwrap();
        let want = oracle[y * w + x];
        assert!(
            (got - want).abs() <= 0.01 * span,
            "({x},{y}): harmonic fill {got} vs oracle {want} (1% of span {span})"
        );
    }

    // Maximum principle across 100 random holes, both methods.
    let mut r = rng(0x5EED_0011);
    for case in 0..100 {
        let (w, h) = (r.gen_range(16..30), r.gen_range(16..30));
        let temps: Vec<f64> = (0..w * h).map(|_| r.gen_range(-50.0..450.0)).collect();
        let frame = Frame::infrared(0, 0.0, w, h, temps.clone()).unwrap();
        let hx = r.gen_range(2..w - 8);
        let hy = r.gen_range(2..h - 8);
        let hw = r.gen_range(2..=6);
        let hh = r.gen_range(2..=6);
        let mask = BinaryMask::from_fn(w, h, |x, y| (hx..hx + hw).contains(&x) && (hy..hy + hh).contains(&y));

        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for y in 0..h {
            for x in 0..w {
                if mask.get(x, y) {
                    continue;
                }
                let near = (-1i64..=1).any(|dy| {
                    (-1i64..=1).any(|dx| {
                        let nx = x as i64 + dx;
                        let ny = y as i64 + dy;
                        nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h && mask.get(nx as usize, ny as usize)
                    })
                });
                if near {
                    lo = lo.min(temps[y * w + x]);
                    hi = hi.max(temps[y * w + x]);
                }
            }
        }
        let method = if case % 2 == 0 { InpaintMethod::Harmonic } else { InpaintMethod::Transport };
        let occ = OcclusionMask::new(mask.clone());
        let filled = inpaint(&frame, &occ, method, 0.1, 500, 1e-4).unwrap();
        for (x, y) in mask.set_pixels() {
            let v = filled.frame.temperature(x, y).unwrap();
            assert!(
                v >= lo - 1e-9 && v <= hi + 1e-9,
                "case {case} {method:?}: filled value {v} escapes ring range [{lo}, {hi}]"
            );
        }
    }
    let elapsed = started.elapsed();
    println!("[acceptance] criterion 11 (inpainting, {elapsed:?}): PASS");
}

#[test]
fn criterion_12_full_pipeline_determinism() {
    let started = Instant::now();
    let scenario = Scenario {
        width: 256,
        height: 256,
        frames: 20,
        seed: 5,
        noise: 0.005,
        occlusions: Vec::new(),
        kind: ScenarioKind::ExpandingDisk {
            cx: 128.0,
            cy: 128.0,
            r0: 10.0,
            speed: 2.0,
            burn_duration_frames: Some(8),
        },
    };
    let input = tempfile::tempdir().unwrap();
    write_scenario(&scenario, input.path()).unwrap();

    // Fitting stays enabled so the MCMC path is covered by the check.
    let mut cfg = PipelineConfig::default();
    cfg.meta.fov_px = 256;
    cfg.seed = 99;

    let out = tempfile::tempdir().unwrap();
    let dir_a = out.path().join("threads-1");
    let dir_b = out.path().join("threads-8");
    run_pipeline(&cfg, input.path(), &dir_a, 1).unwrap();
    run_pipeline(&cfg, input.path(), &dir_b, 8).unwrap();

    let mut rels: Vec<String> = vec!["velocity.csv".into(), "fits.json".into(), "manifest.json".into()];
    for t in 0..scenario.frames {
        rels.push(format!("labels/t{t:06}.csv"));
        rels.push(format!("boundaries/t{t:06}.csv"));
    }
    for rel in &rels {
        let a = std::fs::read(dir_a.join(rel)).unwrap_or_else(|_| panic!("missing {rel} in threads-1 bundle"));
        let b = std::fs::read(dir_b.join(rel)).unwrap_or_else(|_| panic!("missing {rel} in threads-8 bundle"));
        assert_eq!(a, b, "{rel} differs between thread counts");
    }
    let elapsed = started.elapsed();
    println!(
        "[acceptance] criterion 12 (determinism across {} files, {elapsed:?}): PASS",
        rels.len()
    );
}
