//! Velocity and burn-time distribution fitting plus the Nyquist sampling
//! advisor.
//!
//! Two fitting routes exist for exponential and Erlang models: moment
//! matching (fast, no uncertainty) and random-walk Metropolis MCMC on
//! log λ (posterior mean, central 95% credible interval, split-R̂
//! convergence check). Fit quality is summarized as NRMSE between the
//! fitted density and a density-normalized histogram of the data,
//! normalized by the empirical density range. That normalization is a
//! fixed convention of this crate, so NRMSE values are comparable between
//! methods here but not against externally reported numbers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imagery::SequenceMeta;

/// Observed sample values with a unit tag (e.g. "cm/s" or "s").
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    values: Vec<f64>,
    unit: String,
}

impl SampleSet {
    pub fn new(values: Vec<f64>, unit: impl Into<String>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("sample set contains non-finite values".into()));
        }
        Ok(SampleSet { values, unit: unit.into() })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Exponential,
    Erlang,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    MomentMatching,
    Mcmc,
}

/// Fitted density parameters. `k` is 1 for the exponential family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitParams {
    pub family: Family,
    pub lambda: f64,
    pub k: u32,
}

impl FitParams {
    pub fn pdf(&self, x: f64) -> f64 {
        match self.family {
            Family::Exponential => {
                if x < 0.0 {
                    0.0
                } else {
                    self.lambda * (-self.lambda * x).exp()
                }
            }
            Family::Erlang => {
                if x < 0.0 || (x == 0.0 && self.k > 1) {
                    0.0
                } else if self.k == 1 {
                    self.lambda * (-self.lambda * x).exp()
                } else {
                    let k = self.k as f64;
                    (k * self.lambda.ln() + (k - 1.0) * x.ln() - self.lambda * x - ln_factorial(self.k - 1)).exp()
                }
            }
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n as u64).map(|i| (i as f64).ln()).sum()
}

/// Distribution fit with optional uncertainty.
///
/// MCMC results always carry a credible interval and diagnostics;
/// moment-matching results never do. `nrmse` is `None` exactly when the
/// empirical histogram is degenerate (all samples identical).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: Family,
    pub method: FitMethod,
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Central 95% interval on λ (MCMC only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credible_lambda: Option<(f64, f64)>,
    pub nrmse: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<McmcDiagnostics>,
}

impl FitResult {
    pub fn params(&self) -> FitParams {
        FitParams { family: self.family, lambda: self.lambda, k: self.k.unwrap_or(1) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McmcDiagnostics {
    pub split_rhat: f64,
    pub acceptance_rate: f64,
    pub chains: usize,
    pub iterations_per_chain: usize,
    pub kept_draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McmcConfig {
    pub chains: usize,
    pub iterations: usize,
    /// Fraction of each chain discarded as burn-in.
    pub burn_in: f64,
    pub target_acceptance: f64,
    pub seed: u64,
    /// Inclusive Erlang shape sweep bounds.
    pub k_min: u32,
    pub k_max: u32,
    pub rhat_threshold: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            chains: 4,
            iterations: 20_000,
            burn_in: 0.5,
            target_acceptance: 0.35,
            seed: 0,
            k_min: 1,
            k_max: 50,
            rhat_threshold: 1.05,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.chains < 2 {
            return Err(Error::Config("mcmc needs at least 2 chains for split R-hat".into()));
        }
        if !(0.0..1.0).contains(&self.burn_in) {
            return Err(Error::Config(format!("burn_in fraction {} outside [0, 1)", self.burn_in)));
        }
        let post_burn = self.iterations - (self.iterations as f64 * self.burn_in) as usize;
        if post_burn * self.chains < 10_000 {
            return Err(Error::Config(format!(
                "chain config keeps only {} draws; at least 10^4 post burn-in are required",
                post_burn * self.chains
            )));
        }
        if self.target_acceptance <= 0.0 || self.target_acceptance >= 1.0 {
            return Err(Error::Config("target_acceptance must be in (0, 1)".into()));
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            return Err(Error::Config("erlang shape sweep bounds must satisfy 1 <= k_min <= k_max".into()));
        }
        if !self.rhat_threshold.is_finite() || self.rhat_threshold <= 1.0 {
            return Err(Error::Config("rhat_threshold must exceed 1".into()));
        }
        Ok(())
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn sample_variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (values.len() - 1) as f64
}

/// Sample statistics with the n−1 variance denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

pub fn summarize(s: &SampleSet) -> Result<Summary> {
    if s.is_empty() {
        return Err(Error::Domain("cannot summarize an empty sample set".into()));
    }
    if s.len() == 1 {
        return Err(Error::DegenerateSamples(
            "standard deviation is undefined for a single value".into(),
        ));
    }
    let values = s.values();
    Ok(Summary {
        mean: mean(values),
        sd: sample_variance(values).sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        n: values.len(),
    })
}

/// Plume inclination from mean horizontal and vertical velocities, degrees.
pub fn inclination_deg(mean_horizontal: f64, mean_vertical: f64) -> f64 {
    mean_vertical.atan2(mean_horizontal).to_degrees()
}

// ---------------------------------------------------------------------------
// Histograms and NRMSE.

/// Density-normalized histogram on `bins` equal-width bins spanning the data.
fn histogram(values: &[f64], bins: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if bins < 2 {
        return Err(Error::Config(format!("histogram needs at least 2 bins, got {bins}")));
    }
    if values.is_empty() {
        return Err(Error::Domain("cannot histogram an empty sample set".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return Err(Error::Normalization("sample range is zero; histogram is degenerate".into()));
    }
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in values {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = values.len() as f64;
    let centers = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let densities = counts.into_iter().map(|c| c as f64 / (n * width)).collect();
    Ok((centers, densities))
}

/// Freedman–Diaconis bin count with a floor of 10.
pub fn default_bin_count(values: &[f64]) -> usize {
    const MIN_BINS: usize = 10;
    if values.len() < 2 {
        return MIN_BINS;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let quantile = |q: f64| {
        let pos = q * (sorted.len() - 1) as f64;
        let i = pos.floor() as usize;
        let frac = pos - i as f64;
        if i + 1 < sorted.len() {
            sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
        } else {
            sorted[i]
        }
    };
    let iqr = quantile(0.75) - quantile(0.25);
    let range = sorted[sorted.len() - 1] - sorted[0];
    let h = 2.0 * iqr / (values.len() as f64).cbrt();
    if h <= 0.0 || range <= 0.0 {
        return MIN_BINS;
    }
    ((range / h).ceil() as usize).max(MIN_BINS)
}

/// RMSE between `pdf` at bin centers and the empirical bin densities,
/// normalized by the empirical density range.
pub fn nrmse_against(s: &SampleSet, pdf: impl Fn(f64) -> f64, bins: usize) -> Result<f64> {
    let (centers, densities) = histogram(s.values(), bins)?;
    let d_max = densities.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let d_min = densities.iter().copied().fold(f64::INFINITY, f64::min);
    if d_max <= d_min {
        return Err(Error::Normalization("empirical density range is zero".into()));
    }
    let mse = centers
        .iter()
        .zip(densities.iter())
        .map(|(&c, &d)| {
            let r = pdf(c) - d;
            r * r
        })
        .sum::<f64>()
        / centers.len() as f64;
    Ok(mse.sqrt() / (d_max - d_min))
}

/// NRMSE of a parametric fit against the sample histogram.
pub fn nrmse(s: &SampleSet, params: &FitParams, bins: usize) -> Result<f64> {
    nrmse_against(s, |x| params.pdf(x), bins)
}

fn nrmse_or_degenerate(s: &SampleSet, params: &FitParams, bins: usize) -> Result<Option<f64>> {
    match nrmse(s, params, bins) {
        Ok(v) => Ok(Some(v)),
        Err(Error::Normalization(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Moment matching.

/// Fit by equating sample moments to distribution moments.
///
/// Exponential: λ = 1/mean (which coincides with the MLE). Erlang:
/// k = round(mean²/variance) clamped to ≥ 1, λ = k/mean.
pub fn moment_match(s: &SampleSet, family: Family, bins: Option<usize>) -> Result<FitResult> {
    if s.is_empty() {
        return Err(Error::Domain("cannot fit an empty sample set".into()));
    }
    let values = s.values();
    let m = mean(values);
    let params = match family {
        Family::Exponential => {
            if values.iter().any(|&v| v <= 0.0) {
                return Err(Error::Domain("exponential fit requires all samples to be positive".into()));
            }
            FitParams { family, lambda: 1.0 / m, k: 1 }
        }
        Family::Erlang => {
            if s.len() < 2 {
                return Err(Error::DegenerateSamples("erlang fit needs at least 2 samples".into()));
            }
            let var = sample_variance(values);
            if m <= 0.0 || var <= 0.0 {
                return Err(Error::DegenerateSamples(format!(
                    "erlang moment matching needs positive mean and variance, got mean={m} var={var}"
                )));
            }
            let k = ((m * m / var).round() as i64).max(1) as u32;
            FitParams { family, lambda: k as f64 / m, k }
        }
    };
    let bins = bins.unwrap_or_else(|| default_bin_count(values));
    let nrmse = nrmse_or_degenerate(s, &params, bins)?;
    Ok(FitResult {
        family,
        method: FitMethod::MomentMatching,
        lambda: params.lambda,
        k: (family == Family::Erlang).then_some(params.k),
        credible_lambda: None,
        nrmse,
        seed: None,
        diagnostics: None,
    })
}

// ---------------------------------------------------------------------------
// MCMC.

struct ChainDraws {
    /// λ draws after burn-in.
    lambdas: Vec<f64>,
    accepted: usize,
    kept: usize,
}

/// Random-walk Metropolis on u = log λ with a flat prior on u.
///
/// The log target for n samples with sum Σx under either family is
/// n·k·u − e^u·Σx up to constants. The proposal step adapts toward the
/// target acceptance rate during burn-in and is frozen afterwards.
fn run_chain(
    nk: f64,
    sum_x: f64,
    iterations: usize,
    burn: usize,
    target_acceptance: f64,
    init_u: f64,
    seed: u64,
) -> ChainDraws {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let log_target = |u: f64| nk * u - u.exp() * sum_x;

    let mut u = init_u + (rng.gen::<f64>() - 0.5); // overdispersed start
    let mut g = log_target(u);
    let mut step = 0.1f64;
    let mut window_accepts = 0usize;
    const WINDOW: usize = 50;

    let mut lambdas = Vec::with_capacity(iterations - burn);
    let mut accepted = 0usize;
    for it in 0..iterations {
        let proposal = u + step * standard_normal(&mut rng);
        let g_new = log_target(proposal);
        if (g_new - g) >= 0.0 || rng.gen::<f64>().ln() < g_new - g {
            u = proposal;
            g = g_new;
            window_accepts += 1;
            if it >= burn {
                accepted += 1;
            }
        }
        if it < burn && (it + 1) % WINDOW == 0 {
            let rate = window_accepts as f64 / WINDOW as f64;
            step *= (rate - target_acceptance).exp();
            step = step.clamp(1e-6, 10.0);
            window_accepts = 0;
        }
        if it >= burn {
            lambdas.push(u.exp());
        }
    }
    ChainDraws { lambdas, accepted, kept: iterations - burn }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; one value per call keeps the stream simple.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Split R-hat over per-chain draws: each chain is halved, and the
/// between/within variance ratio of the segments is reported.
fn split_rhat(chains: &[Vec<f64>]) -> f64 {
    let mut segments: Vec<&[f64]> = Vec::new();
    let half = chains[0].len() / 2;
    for c in chains {
        segments.push(&c[..half]);
        segments.push(&c[half..2 * half]);
    }
    let l = half as f64;
    let seg_means: Vec<f64> = segments.iter().map(|s| mean(s)).collect();
    let w = segments.iter().map(|s| sample_variance(s)).sum::<f64>() / segments.len() as f64;
    let b = l * sample_variance(&seg_means);
    if w <= 0.0 {
        return f64::INFINITY;
    }
    let var_plus = (l - 1.0) / l * w + b / l;
    (var_plus / w).sqrt()
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    if i + 1 < sorted.len() {
        sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
    } else {
        sorted[i]
    }
}

fn chain_seed(base: u64, chain: usize, k: u32) -> u64 {
    base.wrapping_add((chain as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((k as u64).wrapping_mul(0xD1B5_4A32_D192_ED03))
}

struct PosteriorRun {
    chains: Vec<Vec<f64>>,
    acceptance_rate: f64,
}

fn run_posterior(nk: f64, sum_x: f64, n_values: usize, cfg: &McmcConfig, k: u32) -> PosteriorRun {
    let burn = (cfg.iterations as f64 * cfg.burn_in) as usize;
    let init_u = (nk / n_values as f64 / (sum_x / n_values as f64)).ln();
    let results: Vec<ChainDraws> = (0..cfg.chains)
        .map(|chain| {
            run_chain(
                nk,
                sum_x,
                cfg.iterations,
                burn,
                cfg.target_acceptance,
                init_u,
                chain_seed(cfg.seed, chain, k),
            )
        })
        .collect();
    let accepted: usize = results.iter().map(|r| r.accepted).sum();
    let kept: usize = results.iter().map(|r| r.kept).sum();
    PosteriorRun {
        chains: results.into_iter().map(|r| r.lambdas).collect(),
        acceptance_rate: accepted as f64 / kept as f64,
    }
}

/// MCMC fit: posterior mean of λ with a central 95% credible interval.
///
/// The Erlang shape is chosen by a discrete sweep over `k_min..=k_max`,
/// keeping the k that maximizes the mean posterior log-likelihood.
pub fn mcmc_fit(s: &SampleSet, family: Family, cfg: &McmcConfig, bins: Option<usize>) -> Result<FitResult> {
    cfg.validate()?;
    if s.is_empty() {
        return Err(Error::Domain("cannot fit an empty sample set".into()));
    }
    let values = s.values();
    if values.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain(format!("{family:?} mcmc fit requires all samples to be positive")));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return Err(Error::DegenerateSamples("all samples are identical; the likelihood is degenerate".into()));
    }

    let n = values.len() as f64;
    let sum_x: f64 = values.iter().sum();
    let sum_ln_x: f64 = values.iter().map(|v| v.ln()).sum();

    let (k, run) = match family {
        Family::Exponential => (1u32, run_posterior(n, sum_x, values.len(), cfg, 1)),
        Family::Erlang => {
            // Mean posterior log-likelihood per candidate shape; constants in
            // k matter for the comparison, so the full likelihood is used.
            let mut best: Option<(f64, u32, PosteriorRun)> = None;
            for k in cfg.k_min..=cfg.k_max {
                let run = run_posterior(n * k as f64, sum_x, values.len(), cfg, k);
                let kf = k as f64;
                let const_term = (kf - 1.0) * sum_ln_x - n * ln_factorial(k - 1);
                let mut total = 0.0;
                let mut count = 0usize;
                for chain in &run.chains {
                    for &lambda in chain {
                        total += n * kf * lambda.ln() - lambda * sum_x + const_term;
                        count += 1;
                    }
                }
                let mean_loglik = total / count as f64;
                if best.as_ref().is_none_or(|(b, _, _)| mean_loglik > *b) {
                    best = Some((mean_loglik, k, run));
                }
            }
            let (_, k, run) = best.expect("k sweep is non-empty");
            (k, run)
        }
    };

    let rhat = split_rhat(&run.chains);
    if rhat.is_nan() || rhat > cfg.rhat_threshold {
        return Err(Error::Convergence { rhat, threshold: cfg.rhat_threshold });
    }

    let mut pooled: Vec<f64> = run.chains.iter().flatten().copied().collect();
    let lambda = mean(&pooled);
    pooled.sort_by(|a, b| a.total_cmp(b));
    let credible = (percentile(&pooled, 0.025), percentile(&pooled, 0.975));

    let params = FitParams { family, lambda, k };
    let bins = bins.unwrap_or_else(|| default_bin_count(values));
    let nrmse = nrmse_or_degenerate(s, &params, bins)?;
    Ok(FitResult {
        family,
        method: FitMethod::Mcmc,
        lambda,
        k: (family == Family::Erlang).then_some(k),
        credible_lambda: Some(credible),
        nrmse,
        seed: Some(cfg.seed),
        diagnostics: Some(McmcDiagnostics {
            split_rhat: rhat,
            acceptance_rate: run.acceptance_rate,
            chains: cfg.chains,
            iterations_per_chain: cfg.iterations,
            kept_draws: pooled.len(),
        }),
    })
}

// ---------------------------------------------------------------------------
// Nyquist sampling advisor.

/// Measured maximum velocity at one candidate sampling rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateObservation {
    pub f_hz: f64,
    pub u_obs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub f_hz: f64,
    /// (f/2) · FOV / RES, the Nyquist bound on measurable velocity.
    pub u_max: f64,
    pub u_obs: f64,
    pub ratio: f64,
    /// Ratio within 20% relative of the next-higher rate's ratio.
    pub saturated: bool,
    /// f == 0 rows carry no information and are only echoed back.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplingReport {
    pub rows: Vec<RateRow>,
    pub recommended_f_hz: Option<f64>,
}

/// Maximum measurable velocity at sampling rate `f_hz`.
pub fn u_max(meta: &SequenceMeta, f_hz: f64) -> f64 {
    f_hz / 2.0 * meta.fov_px as f64 / meta.resolution_px_per_cm
}

/// Relative plateau threshold for saturation detection.
const PLATEAU_RELATIVE: f64 = 0.20;

/// Build the Nyquist report over candidate rates.
///
/// Rates at which the observed/measurable ratio already sits within 20%
/// of the next-higher rate's ratio are flagged saturated: the motion there
/// is a fixed pixel displacement per frame, inflated linearly by the rate.
/// The recommended rate is the largest one below which that constancy
/// breaks, i.e. the smallest rate flagged saturated whose predecessor is
/// not.
pub fn sampling_advisor(meta: &SequenceMeta, observations: &[RateObservation]) -> Result<SamplingReport> {
    meta.validate()?;
    let mut obs = observations.to_vec();
    obs.sort_by(|a, b| a.f_hz.total_cmp(&b.f_hz));
    for o in &obs {
        if o.f_hz > 0.0 {
            sample_stride(meta.frame_rate_hz, o.f_hz)?;
        }
        if !o.u_obs.is_finite() || o.u_obs < 0.0 {
            return Err(Error::Domain(format!("u_obs must be finite and non-negative, got {}", o.u_obs)));
        }
    }

    let mut rows: Vec<RateRow> = obs
        .iter()
        .map(|o| {
            let degenerate = o.f_hz <= 0.0;
            let u_max = u_max(meta, o.f_hz);
            let ratio = if degenerate { 0.0 } else { o.u_obs / u_max };
            RateRow { f_hz: o.f_hz, u_max, u_obs: o.u_obs, ratio, saturated: false, degenerate }
        })
        .collect();

    let live: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i].degenerate).collect();
    for w in live.windows(2) {
        let (i, j) = (w[0], w[1]);
        let next_ratio = rows[j].ratio;
        if next_ratio > 0.0 && (rows[i].ratio - next_ratio).abs() <= PLATEAU_RELATIVE * next_ratio {
            rows[i].saturated = true;
        }
    }

    let mut recommended_f_hz = None;
    for w in live.windows(2) {
        let (prev, cur) = (w[0], w[1]);
        if !rows[prev].saturated {
            recommended_f_hz = Some(rows[cur].f_hz);
        }
    }
    // A single candidate rate gives nothing to compare against.
    if live.len() < 2 {
        recommended_f_hz = None;
    }

    Ok(SamplingReport { rows, recommended_f_hz })
}

use crate::imagery::sample_stride;

// ---------------------------------------------------------------------------
// Fit plots.

/// Render the sample histogram with the fitted density overlaid and write
/// it as a PNG. `semi_log` plots log10 of the densities, the usual view
/// for exponential-tailed data.
pub fn plot_fit(
    s: &SampleSet,
    params: &FitParams,
    bins: Option<usize>,
    semi_log: bool,
    path: &std::path::Path,
) -> Result<()> {
    const W: u32 = 640;
    const H: u32 = 480;
    const MARGIN: u32 = 40;

    let bins = bins.unwrap_or_else(|| default_bin_count(s.values()));
    let (centers, densities) = histogram(s.values(), bins)?;
    let width = centers[1] - centers[0];
    let x_lo = centers[0] - width / 2.0;
    let x_hi = centers[centers.len() - 1] + width / 2.0;

    // Positive floor for the log view: a decade below the smallest
    // nonzero density.
    let min_positive = densities
        .iter()
        .copied()
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min)
        .max(1e-300);
    let transform = |d: f64| {
        if semi_log {
            (d.max(min_positive / 10.0)).log10()
        } else {
            d
        }
    };
    let curve: Vec<(f64, f64)> = (0..=256)
        .map(|i| {
            let x = x_lo + (x_hi - x_lo) * i as f64 / 256.0;
            (x, transform(params.pdf(x)))
        })
        .collect();
    let mut y_lo = f64::INFINITY;
    let mut y_hi = f64::NEG_INFINITY;
    for v in densities.iter().map(|&d| transform(d)).chain(curve.iter().map(|&(_, y)| y)) {
        y_lo = y_lo.min(v);
        y_hi = y_hi.max(v);
    }
    if y_hi <= y_lo {
        y_hi = y_lo + 1.0;
    }

    let px = |x: f64| MARGIN as f32 + ((x - x_lo) / (x_hi - x_lo)) as f32 * (W - 2 * MARGIN) as f32;
    let py = |y: f64| (H - MARGIN) as f32 - ((y - y_lo) / (y_hi - y_lo)) as f32 * (H - 2 * MARGIN) as f32;

    let mut img = image::RgbImage::from_pixel(W, H, image::Rgb([255, 255, 255]));
    let mut draw_v = |x: u32, y0: u32, y1: u32, color: [u8; 3]| {
        for y in y0.min(y1)..=y0.max(y1).min(H - 1) {
            img.put_pixel(x.min(W - 1), y, image::Rgb(color));
        }
    };

    // Histogram bars.
    let baseline = py(transform(if semi_log { min_positive / 10.0 } else { 0.0 }).max(y_lo)) as u32;
    for (&c, &d) in centers.iter().zip(densities.iter()) {
        let x0 = px(c - width / 2.0).ceil() as u32;
        let x1 = px(c + width / 2.0).floor() as u32;
        let top = py(transform(d)) as u32;
        for x in x0..=x1.min(W - 1) {
            draw_v(x, top, baseline, [170, 170, 170]);
        }
    }
    // Axes.
    for x in MARGIN..=W - MARGIN {
        img.put_pixel(x, H - MARGIN, image::Rgb([0, 0, 0]));
    }
    for y in MARGIN..=H - MARGIN {
        img.put_pixel(MARGIN, y, image::Rgb([0, 0, 0]));
    }
    // Fitted curve.
    for pair in curve.windows(2) {
        let (x0, y0) = (px(pair[0].0), py(pair[0].1));
        let (x1, y1) = (px(pair[1].0), py(pair[1].1));
        let steps = ((x1 - x0).abs().max((y1 - y0).abs()) as u32).max(1);
        for i in 0..=steps {
            let t = i as f32 / steps as f32;
            let x = (x0 + t * (x1 - x0)).round() as i64;
            let y = (y0 + t * (y1 - y0)).round() as i64;
            if (0..W as i64).contains(&x) && (0..H as i64).contains(&y) {
                img.put_pixel(x as u32, y as u32, image::Rgb([180, 30, 120]));
            }
        }
    }

    img.save(path)
        .map_err(|e| Error::Io { path: path.to_path_buf(), source: std::io::Error::other(e.to_string()) })
}
