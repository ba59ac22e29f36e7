//! Aggregation of scored shots into figures of merit.
//!
//! The pipeline: [`score_shots`] decodes and scores sampled shots in
//! parallel (deterministic order); [`postselect`] calibrates a score cutoff
//! on a held-out split and reports accepted-shot failure rates;
//! [`bin_and_fit_logistic`] fits the failure-vs-score law
//! `ln((1−p̄)/p̄) = α·s`; [`lambda_metric`] extracts the per-distance error
//! suppression factor Λ; [`fit_effective_threshold`] fits
//! `p̄ ∝ (p/p_th)^⌈d/2⌉`; and the overhead ops convert accepted-rate tables
//! into spacetime cost points `κ = (2d²−1)·d/(1−r)` with their Pareto
//! frontier.
//!
//! All binomial rates carry Wilson intervals at z = 1.96. Aggregations are
//! pure functions of their input order, so parallel runs that preserve shot
//! order reproduce results bit for bit.

use rayon::prelude::*;

use crate::circuits::dem::DetectorErrorModel;
use crate::circuits::{Shot, ShotSampler};
use crate::gap::{GapEngine, GapError, GapScore};

/// z-value of the Wilson intervals used throughout.
const WILSON_Z: f64 = 1.96;

/// Target number of geometric score bins before sparsity merging. Fine
/// bins keep the within-bin score spread small — wide log-spaced bins bias
/// the logit fit low by ≈ (bin width)²/24 — and the sparsity merge re-widens
/// them only where data is thin.
const TARGET_BINS: usize = 48;

/// Minimum shots per merged score bin.
const MIN_BIN_SHOTS: u64 = 25;

/// Smallest positive score treated as distinct from zero when choosing
/// geometric bin edges.
const MIN_BIN_SCORE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("no shots to analyze")]
    EmptyInput,
    #[error("rejection rate {0} outside [0, 1)")]
    InvalidRejectionRate(f64),
    #[error("every evaluation shot was rejected at cutoff {cutoff}")]
    AllRejected { cutoff: f64 },
    #[error("not enough data: {0}")]
    InsufficientData(&'static str),
    #[error("free-slope fit {fitted:.3} disagrees with fixed exponent {expected} by more than 25%")]
    RegimeMismatch { fitted: f64, expected: f64 },
}

/// A binomial rate with its Wilson confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateEstimate {
    pub failures: u64,
    pub trials: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Wilson score interval at z = 1.96.
pub fn wilson(failures: u64, trials: u64) -> RateEstimate {
    assert!(failures <= trials && trials > 0, "invalid binomial counts");
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    RateEstimate {
        failures,
        trials,
        rate: p,
        ci_low: (center - half).max(0.0),
        ci_high: (center + half).min(1.0),
    }
}

/// One decoded and scored shot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredShot {
    pub gap: GapScore,
    /// Decoding the complete syndrome (hidden part revealed) disagreed with
    /// the shot's true observable.
    pub failed: bool,
}

/// Gap estimator selection for [`score_shots`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    /// Exact enumeration over hidden assignments (capacity-capped).
    Exact,
    /// Split-string search to the given depth.
    Split(u32),
    /// Greedy hill-climb estimate.
    Greedy,
    /// Hindsight gap of the complete syndrome (no hidden uncertainty).
    Full,
}

/// Score a single sampled shot: the failure flag always comes from decoding
/// the complete syndrome, the gap from the selected estimator over the
/// visible part (except [`Estimator::Full`], which sees everything).
pub fn score_shot(
    engine: &GapEngine,
    dem: &DetectorErrorModel,
    shot: &Shot,
    estimator: Estimator,
) -> Result<ScoredShot, GapError> {
    let visible: Vec<u32> = dem
        .visible_ids()
        .iter()
        .zip(&shot.visible)
        .filter(|(_, &b)| b)
        .map(|(&d, _)| d)
        .collect();
    let mut full = visible.clone();
    full.extend(
        dem.hidden_ids()
            .iter()
            .zip(&shot.hidden)
            .filter(|(_, &b)| b)
            .map(|(&d, _)| d),
    );
    full.sort_unstable();
    let correction =
        engine.decoder().decode(&full).map_err(|_| GapError::NoExplanation)?;
    let failed = correction.class != shot.observable;
    let gap = match estimator {
        Estimator::Exact => engine.partial_gap_exact(&visible)?,
        Estimator::Split(depth) => engine.partial_gap_split(&visible, depth)?,
        Estimator::Greedy => engine.partial_gap_greedy(&visible)?,
        Estimator::Full => engine.full_gap(&visible, &shot.hidden)?,
    };
    Ok(ScoredShot { gap, failed })
}

/// Sample and score `count` shots in parallel, preserving shot order.
pub fn score_shots(
    engine: &GapEngine,
    sampler: &ShotSampler,
    count: u64,
    estimator: Estimator,
) -> Result<Vec<ScoredShot>, GapError> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let shot = sampler.sample_shot(i);
            score_shot(engine, sampler.dem(), &shot, estimator)
        })
        .collect()
}

/// A calibrated acceptance rule: scores above `score` are accepted, scores
/// below are rejected, and exact ties are accepted at rate `tie_accept`.
///
/// The tie fraction matters because score distributions have large atoms —
/// at low physical error rates most shots share the clean-syndrome score —
/// and a bare threshold could then only reject far less (ties accepted) or
/// far more (ties rejected) than the requested fraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub score: f64,
    /// Fraction of cutoff-score ties to accept, in [0, 1].
    pub tie_accept: f64,
}

impl Cutoff {
    /// Apply the rule to shots in order. `tie_index` counts cutoff ties seen
    /// so far and must start at 0 for each evaluation pass; the tie fraction
    /// is realized deterministically by integer rounding of the running
    /// accepted-tie target.
    fn accepts(&self, score: f64, tie_index: &mut u64) -> bool {
        if score > self.score {
            return true;
        }
        if score < self.score {
            return false;
        }
        let j = *tie_index;
        *tie_index += 1;
        ((j + 1) as f64 * self.tie_accept).floor() > (j as f64 * self.tie_accept).floor()
    }
}

/// Calibrate the acceptance rule rejecting fraction `r` of a fresh sample
/// drawn from the same distribution: threshold at the empirical r-quantile
/// `sorted[⌊r·n⌋]`, with the tie-acceptance fraction sized so the expected
/// rejected fraction is `r` even when the quantile lands inside an atom.
/// `r = 0` accepts everything (−∞ threshold).
pub fn calibrate(scores: &[f64], r: f64) -> Result<Cutoff, AnalysisError> {
    if scores.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    if !(0.0..1.0).contains(&r) {
        return Err(AnalysisError::InvalidRejectionRate(r));
    }
    if r == 0.0 {
        return Ok(Cutoff { score: f64::NEG_INFINITY, tie_accept: 1.0 });
    }
    let mut sorted = scores.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    let score = sorted[(r * n as f64).floor() as usize];
    let below = sorted.partition_point(|&s| s < score);
    let ties = sorted.partition_point(|&s| s <= score) - below;
    let reject_from_ties = (r * n as f64 - below as f64).max(0.0);
    let tie_accept = (1.0 - reject_from_ties / ties as f64).clamp(0.0, 1.0);
    Ok(Cutoff { score, tie_accept })
}

/// The score threshold of [`calibrate`] alone (ties are accepted at a
/// fraction the full rule tracks separately).
pub fn calibrate_cutoff(scores: &[f64], r: f64) -> Result<f64, AnalysisError> {
    calibrate(scores, r).map(|c| c.score)
}

/// Postselection outcome at one rejection rate.
#[derive(Debug, Clone, PartialEq)]
pub struct PostselectionReport {
    pub r_target: f64,
    pub cutoff: f64,
    /// Evaluation-split shots with score ≥ cutoff.
    pub accepted: u64,
    /// Evaluation-split size (calibration shots are excluded from rates).
    pub evaluated: u64,
    /// Failure rate over accepted shots.
    pub p_post: RateEstimate,
    /// Failure rate over the whole evaluation split.
    pub p_raw: RateEstimate,
}

/// Calibrate a cutoff on the leading `⌈calibration_fraction·n⌉` shots and
/// report accepted/raw failure rates over the remaining evaluation split.
pub fn postselect(
    shots: &[ScoredShot],
    r: f64,
    calibration_fraction: f64,
) -> Result<PostselectionReport, AnalysisError> {
    assert!(
        (0.0..1.0).contains(&calibration_fraction),
        "calibration fraction must lie in [0, 1)"
    );
    let n_cal = (calibration_fraction * shots.len() as f64).ceil() as usize;
    let (calibration, evaluation) = shots.split_at(n_cal.min(shots.len()));
    if evaluation.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let cal_scores: Vec<f64> = calibration.iter().map(|s| s.gap.score).collect();
    let cutoff = if r == 0.0 {
        Cutoff { score: f64::NEG_INFINITY, tie_accept: 1.0 }
    } else {
        calibrate(&cal_scores, r)?
    };
    let mut accepted = 0u64;
    let mut accepted_failures = 0u64;
    let mut raw_failures = 0u64;
    let mut tie_index = 0u64;
    for s in evaluation {
        raw_failures += s.failed as u64;
        if cutoff.accepts(s.gap.score, &mut tie_index) {
            accepted += 1;
            accepted_failures += s.failed as u64;
        }
    }
    if accepted == 0 {
        return Err(AnalysisError::AllRejected { cutoff: cutoff.score });
    }
    Ok(PostselectionReport {
        r_target: r,
        cutoff: cutoff.score,
        accepted,
        evaluated: evaluation.len() as u64,
        p_post: wilson(accepted_failures, accepted),
        p_raw: wilson(raw_failures, evaluation.len() as u64),
    })
}

/// One merged score bin of the logistic fit.
#[derive(Debug, Clone, PartialEq)]
pub struct GapBin {
    /// Mean score of the bin's shots (the regressor).
    pub score: f64,
    pub rate: RateEstimate,
}

/// Logistic law fit: `p̄(s) = 1/(1 + e^{α·s})`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub alpha: f64,
    pub bins: Vec<GapBin>,
}

/// Bin shots geometrically by score and fit `ln((1−p̄)/p̄) = α·s` by
/// weighted least squares through the origin (weights `n·p̄(1−p̄)`).
///
/// Zero scores land in the first bin; non-finite scores are ignored (an
/// infinite score pins the class exactly and carries no logistic
/// information). Adjacent bins are merged until every bin holds at least 25
/// shots and one failure.
pub fn bin_and_fit_logistic(shots: &[ScoredShot]) -> Result<LogisticFit, AnalysisError> {
    let finite: Vec<(f64, bool)> = shots
        .iter()
        .filter(|s| s.gap.score.is_finite())
        .map(|s| (s.gap.score, s.failed))
        .collect();
    if finite.is_empty() {
        return Err(AnalysisError::EmptyInput);
    }
    let hi = finite.iter().map(|&(s, _)| s).fold(0.0f64, f64::max);
    let lo = finite
        .iter()
        .map(|&(s, _)| s)
        .filter(|&s| s > 0.0)
        .fold(f64::INFINITY, f64::min)
        .max(MIN_BIN_SCORE);
    if !(hi > lo) {
        return Err(AnalysisError::InsufficientData("score range too narrow to bin"));
    }
    // Geometric edges; bin i covers [edge[i], edge[i+1]), scores below `lo`
    // (including exact zeros) fall into bin 0, scores at `hi` into the last.
    let ratio = (hi / lo).powf(1.0 / TARGET_BINS as f64);
    let index = |s: f64| -> usize {
        if s <= lo {
            0
        } else {
            (((s / lo).ln() / ratio.ln()).floor() as usize).min(TARGET_BINS - 1)
        }
    };
    let mut shots_per = vec![0u64; TARGET_BINS];
    let mut fails_per = vec![0u64; TARGET_BINS];
    let mut score_sum = vec![0.0f64; TARGET_BINS];
    for &(s, failed) in &finite {
        let b = index(s);
        shots_per[b] += 1;
        fails_per[b] += failed as u64;
        score_sum[b] += s;
    }
    // Merge forward until each emitted bin clears the sparsity floor; fold
    // any trailing remainder into the last emitted bin.
    let mut bins: Vec<GapBin> = Vec::new();
    let (mut n_acc, mut f_acc, mut s_acc) = (0u64, 0u64, 0.0f64);
    for b in 0..TARGET_BINS {
        n_acc += shots_per[b];
        f_acc += fails_per[b];
        s_acc += score_sum[b];
        if n_acc >= MIN_BIN_SHOTS && f_acc >= 1 {
            bins.push(GapBin { score: s_acc / n_acc as f64, rate: wilson(f_acc, n_acc) });
            (n_acc, f_acc, s_acc) = (0, 0, 0.0);
        }
    }
    if n_acc > 0 {
        if let Some(last) = bins.last_mut() {
            let f = last.rate.failures + f_acc;
            let n = last.rate.trials + n_acc;
            let score =
                (last.score * last.rate.trials as f64 + s_acc) / n as f64;
            *last = GapBin { score, rate: wilson(f, n) };
        }
    }
    if bins.len() < 3 {
        return Err(AnalysisError::InsufficientData("fewer than 3 populated score bins"));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for bin in &bins {
        let p = bin.rate.rate;
        if p <= 0.0 || p >= 1.0 {
            continue; // no logit; zero weight anyway
        }
        let w = bin.rate.trials as f64 * p * (1.0 - p);
        let y = ((1.0 - p) / p).ln();
        num += w * bin.score * y;
        den += w * bin.score * bin.score;
    }
    if den == 0.0 {
        return Err(AnalysisError::InsufficientData("no bin with an informative rate"));
    }
    Ok(LogisticFit { alpha: num / den, bins })
}

/// Per-distance suppression factor fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaFit {
    /// `Λ = exp(−2·slope)` of the `ln p̄` vs `d` regression.
    pub lambda: f64,
    pub slope: f64,
    /// Distances used by the regression.
    pub used: Vec<usize>,
    /// Distances dropped for having no observed failures.
    pub excluded: Vec<usize>,
}

/// Fit `ln p̄` against `d` over at least three distances and report
/// `Λ = exp(−2·slope)`. Distances with zero observed failures cannot enter
/// a log fit; they are reported in `excluded`.
pub fn lambda_metric(rates_by_d: &[(usize, RateEstimate)]) -> Result<LambdaFit, AnalysisError> {
    let mut used = Vec::new();
    let mut excluded = Vec::new();
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for &(d, rate) in rates_by_d {
        if rate.failures == 0 {
            excluded.push(d);
        } else {
            used.push(d);
            pts.push((d as f64, rate.rate.ln()));
        }
    }
    if pts.len() < 3 {
        return Err(AnalysisError::InsufficientData("need ≥ 3 distances with failures"));
    }
    let (slope, _) = least_squares(&pts);
    Ok(LambdaFit { lambda: (-2.0 * slope).exp(), slope, used, excluded })
}

/// Effective boundary threshold fit at one distance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdFit {
    pub p_th: f64,
    /// The fixed exponent ⌈d/2⌉ of the ansatz `p̄ ∝ (p/p_th)^⌈d/2⌉`.
    pub exponent: f64,
    /// Free-slope cross-check of `ln p̄` vs `ln p`.
    pub free_slope: f64,
}

/// Fit `p̄ = (p/p_th)^⌈d/2⌉` to rates at distance `d`, guarding against
/// regime misidentification: the free-slope fit must agree with the fixed
/// exponent within 25%.
pub fn fit_effective_threshold(
    rates_by_p: &[(f64, RateEstimate)],
    d: usize,
) -> Result<ThresholdFit, AnalysisError> {
    let pts: Vec<(f64, f64)> = rates_by_p
        .iter()
        .filter(|(_, rate)| rate.failures > 0)
        .map(|&(p, rate)| (p.ln(), rate.rate.ln()))
        .collect();
    if pts.len() < 3 {
        return Err(AnalysisError::InsufficientData("need ≥ 3 error rates with failures"));
    }
    let k = (d as f64 / 2.0).ceil();
    let (free_slope, _) = least_squares(&pts);
    if (free_slope - k).abs() > 0.25 * k {
        return Err(AnalysisError::RegimeMismatch { fitted: free_slope, expected: k });
    }
    let ln_p_th =
        pts.iter().map(|&(lp, lr)| lp - lr / k).sum::<f64>() / pts.len() as f64;
    Ok(ThresholdFit { p_th: ln_p_th.exp(), exponent: k, free_slope })
}

/// Joint boundary-threshold extrapolation over several distances.
#[derive(Debug, Clone, PartialEq)]
pub struct JointThresholdFit {
    pub p_th: f64,
    /// Shared amplitude `C` of the ansatz.
    pub amplitude: f64,
    /// Per-distance free-slope cross-checks `(d, slope)` for distances
    /// carrying at least two error rates.
    pub free_slopes: Vec<(usize, f64)>,
}

/// Fit `p̄ = C·(p/p_th)^⌈d/2⌉` jointly across distances with one shared
/// amplitude. In log space the per-distance floor lines then meet at a
/// common pivot, and `p_th` is that crossing — the same quantity the
/// boundary-regime saturation of Λ·p measures, since under this ansatz
/// `p̄_d/p̄_{d+2} = p_th/p`. A single distance cannot separate `C` from
/// `p_th`, so at least two distinct exponents are required. Per-distance
/// free slopes are guarded as in [`fit_effective_threshold`].
pub fn fit_boundary_threshold(
    rates: &[(usize, f64, RateEstimate)],
) -> Result<JointThresholdFit, AnalysisError> {
    let pts: Vec<(f64, f64, f64)> = rates
        .iter()
        .filter(|(_, _, rate)| rate.failures > 0)
        .map(|&(d, p, rate)| ((d as f64 / 2.0).ceil(), p.ln(), rate.rate.ln()))
        .collect();
    let mut free_slopes = Vec::new();
    let mut distances: Vec<usize> =
        rates.iter().filter(|(_, _, r)| r.failures > 0).map(|&(d, _, _)| d).collect();
    distances.sort_unstable();
    distances.dedup();
    for &d in &distances {
        let k = (d as f64 / 2.0).ceil();
        let per_d: Vec<(f64, f64)> =
            pts.iter().filter(|&&(kd, _, _)| kd == k).map(|&(_, x, y)| (x, y)).collect();
        if per_d.len() < 2 {
            continue;
        }
        let (slope, _) = least_squares(&per_d);
        if (slope - k).abs() > 0.25 * k {
            return Err(AnalysisError::RegimeMismatch { fitted: slope, expected: k });
        }
        free_slopes.push((d, slope));
    }
    let n = pts.len() as f64;
    let ks: Vec<f64> = pts.iter().map(|&(k, _, _)| k).collect();
    if n < 3.0 || ks.iter().all(|&k| k == ks[0]) {
        return Err(AnalysisError::InsufficientData(
            "need ≥ 3 rates spanning ≥ 2 distinct exponents",
        ));
    }
    // Least squares over (u, v) = (ln C, ln p_th) for the model
    // ln p̄ = u + k·(ln p − v): with t = ln p̄ − k·ln p the normal equations
    // give v = (Σk·Σt/n − Σkt)/(Σk² − (Σk)²/n).
    let ts: Vec<f64> = pts.iter().map(|&(k, x, y)| y - k * x).collect();
    let sk: f64 = ks.iter().sum();
    let sk2: f64 = ks.iter().map(|k| k * k).sum();
    let st: f64 = ts.iter().sum();
    let skt: f64 = ks.iter().zip(&ts).map(|(k, t)| k * t).sum();
    let v = (sk * st / n - skt) / (sk2 - sk * sk / n);
    let u = (st + sk * v) / n;
    Ok(JointThresholdFit { p_th: v.exp(), amplitude: u.exp(), free_slopes })
}

/// Spacetime overhead of one postselected preparation strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverheadPoint {
    pub d: usize,
    pub r: f64,
    /// Qubit·rounds per delivered state: `(2d²−1)·d/(1−r)`.
    pub kappa: f64,
    /// Failure rate over accepted shots.
    pub p_gate: RateEstimate,
}

/// Spacetime cost of one preparation attempt stream: `2d²−1` qubits for
/// `d` rounds, inflated by the retry factor `1/(1−r)`.
pub fn kappa(d: usize, r: f64) -> f64 {
    assert!((0.0..1.0).contains(&r), "rejection rate must lie in [0, 1)");
    let n_phys = (2 * d * d - 1) as f64;
    n_phys * d as f64 / (1.0 - r)
}

/// Attach κ to a table of accepted-shot failure rates.
pub fn overhead_points(entries: &[(usize, f64, RateEstimate)]) -> Vec<OverheadPoint> {
    entries
        .iter()
        .map(|&(d, r, p_gate)| OverheadPoint { d, r, kappa: kappa(d, r), p_gate })
        .collect()
}

/// Points not dominated by any cheaper point: scanning by ascending κ, keep
/// those that strictly lower the best failure rate seen so far.
pub fn pareto_frontier(points: &[OverheadPoint]) -> Vec<OverheadPoint> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| {
        a.kappa.total_cmp(&b.kappa).then(a.p_gate.rate.total_cmp(&b.p_gate.rate))
    });
    let mut best = f64::INFINITY;
    let mut frontier = Vec::new();
    for p in sorted {
        if p.p_gate.rate < best {
            best = p.p_gate.rate;
            frontier.push(p);
        }
    }
    frontier
}

/// κ of a reference curve at a target failure rate, log-log interpolated
/// between the two bracketing points. `None` outside the curve's coverage
/// or when a bracketing rate is zero.
pub fn kappa_at_matched_rate(curve: &[OverheadPoint], p_target: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.p_gate.rate > 0.0)
        .map(|p| (p.p_gate.rate, p.kappa))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.len() < 2 || p_target < pts[0].0 || p_target > pts[pts.len() - 1].0 {
        return None;
    }
    let i = pts.partition_point(|&(rate, _)| rate < p_target).clamp(1, pts.len() - 1);
    let (r0, k0) = pts[i - 1];
    let (r1, k1) = pts[i];
    if r0 == r1 {
        return Some(k0.min(k1));
    }
    let t = (p_target.ln() - r0.ln()) / (r1.ln() - r0.ln());
    Some((k0.ln() + t * (k1.ln() - k0.ln())).exp())
}

/// Ordinary least squares `(slope, intercept)` of y on x.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    (slope, (sy - slope * sx) / n)
}
