//! Experiment execution: build layouts, sample and score shots, postselect
//! at every requested rejection rate, and write the result tables.
//!
//! Output files (in the config's output directory):
//! - `results.csv` — one row per (d, p, r) postselection point, plus a
//!   code-specific alias (`fig2c.csv` for repetition, `fig3d.csv` for
//!   surface).
//! - `fig2a.csv` / `fig3c.csv` — pooled score bins with the fitted
//!   logistic slope α.
//! - `fig3e.csv` — Λ regression rows per (p, r) when the run covers at
//!   least three distances with observed failures.
//! - `fig4b.csv` — overhead points κ(d, r) with Pareto-frontier flags
//!   (surface runs).
//! - `manifest.json` — config hash, seed, version, shots.
//!
//! Every CSV row ends with the config hash. Scoring preserves shot order,
//! so output bytes are identical for any worker count.

use std::sync::Arc;
use std::time::Instant;

use gapsel::circuits::NoisyCircuit;
use gapsel::{
    bin_and_fit_logistic, lambda_metric, overhead_points, pareto_frontier, postselect,
    repetition_cluster, score_shots, surface_cluster, AnalysisError, Decoder, DetectorErrorModel,
    GapEngine, GapError, MatchingGraph, OverheadPoint, PostselectionReport, RateEstimate,
    ScoredShot, ShotSampler, DEFAULT_HIDDEN_CAP,
};

use crate::config::{CliError, CodeKind, EstimatorKind, ExperimentConfig};

pub fn build_circuit(code: CodeKind, d: usize, p: f64) -> NoisyCircuit {
    match code {
        CodeKind::Repetition => repetition_cluster(d, p),
        CodeKind::Surface => surface_cluster(d, p),
    }
}

pub fn build_dem(code: CodeKind, d: usize, p: f64) -> Result<DetectorErrorModel, CliError> {
    build_circuit(code, d, p)
        .extract_dem()
        .map_err(|e| CliError::Runtime(format!("{} d={d}: {e}", code.as_str())))
}

/// Exact enumeration is only offered below the hidden-count cap; refuse
/// up front with the capacity exit code rather than mid-run.
pub fn check_capacity(cfg: &ExperimentConfig) -> Result<(), CliError> {
    if cfg.estimator != EstimatorKind::Exact {
        return Ok(());
    }
    for &d in &cfg.d_list {
        let dem = build_dem(cfg.code, d, cfg.p_list[0])?;
        let hidden = dem.hidden_ids().len();
        if hidden > DEFAULT_HIDDEN_CAP {
            return Err(CliError::Capacity(format!(
                "estimator 'exact' enumerates 2^hidden assignments and is capped at {DEFAULT_HIDDEN_CAP} \
                 hidden detectors, but {} d={d} has {hidden}; use 'split' or 'greedy'",
                cfg.code.as_str()
            )));
        }
    }
    Ok(())
}

pub fn run(cfg: &ExperimentConfig, workers: Option<usize>) -> Result<(), CliError> {
    cfg.validate()?;
    check_capacity(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    pool.install(|| execute(cfg))
}

/// One postselection row of the sweep table.
struct SweepPoint {
    d: usize,
    p: f64,
    r: f64,
    report: PostselectionReport,
}

fn execute(cfg: &ExperimentConfig) -> Result<(), CliError> {
    std::fs::create_dir_all(&cfg.output)
        .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", cfg.output.display())))?;
    let hash = cfg.canonical_hash();
    let estimator = cfg.estimator.to_estimator(cfg.split_depth);

    // r = 0 is always swept: its "postselected" rates are the raw rates
    // every comparison needs.
    let mut rs = vec![0.0];
    rs.extend(cfg.r_list.iter().copied().filter(|&r| r != 0.0));

    let mut pooled: Vec<ScoredShot> = Vec::new();
    let mut points: Vec<SweepPoint> = Vec::new();
    for (di, &d) in cfg.d_list.iter().enumerate() {
        for (pi, &p) in cfg.p_list.iter().enumerate() {
            let dem = build_dem(cfg.code, d, p)?;
            let graph = MatchingGraph::new(&dem)
                .map_err(|e| CliError::Runtime(format!("{} d={d}: {e}", cfg.code.as_str())))?;
            let engine = GapEngine::new(Decoder::new(graph));
            let sampler =
                ShotSampler::new(Arc::new(dem), point_seed(cfg.seed, di, pi));
            let t0 = Instant::now();
            let shots =
                score_shots(&engine, &sampler, cfg.shots, estimator).map_err(map_gap_error)?;
            eprintln!(
                "[{} d={d} p={p}] scored {} shots in {:.1}s",
                cfg.code.as_str(),
                cfg.shots,
                t0.elapsed().as_secs_f64()
            );
            for &r in &rs {
                match postselect(&shots, r, cfg.calibration_fraction) {
                    Ok(report) => points.push(SweepPoint { d, p, r, report }),
                    Err(AnalysisError::AllRejected { cutoff }) => eprintln!(
                        "warning: {} d={d} p={p} r={r}: all shots rejected (cutoff {cutoff}); row omitted",
                        cfg.code.as_str()
                    ),
                    Err(e) => return Err(CliError::Runtime(format!("postselect: {e}"))),
                }
            }
            pooled.extend_from_slice(&shots);
        }
    }

    write_sweep(cfg, &hash, &points)?;
    write_bins(cfg, &hash, &pooled)?;
    write_lambda(cfg, &hash, &points, &rs)?;
    if cfg.code == CodeKind::Surface {
        write_overhead(cfg, &hash, &points)?;
    }
    write_manifest(cfg, &hash)?;
    Ok(())
}

/// Per-grid-point sampler seed: a splitmix64-style mix of the run seed and
/// the grid indices, so grid points draw independent streams while staying
/// reproducible.
fn point_seed(seed: u64, di: usize, pi: usize) -> u64 {
    let tag = ((di as u64) << 32) | (pi as u64 + 1);
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn map_gap_error(e: GapError) -> CliError {
    match e {
        GapError::TooManyHidden { .. } => CliError::Capacity(e.to_string()),
        GapError::NoExplanation => {
            CliError::Runtime(format!("scoring failed: {e} (malformed layout?)"))
        }
    }
}

fn write_file(path: &std::path::Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_sweep(
    cfg: &ExperimentConfig,
    hash: &str,
    points: &[SweepPoint],
) -> Result<(), CliError> {
    let mut csv = String::from(
        "code,d,p,estimator,r,shots_eval,accepted,failures,p_bar,ci_lo,ci_hi,cutoff,config_hash\n",
    );
    for pt in points {
        let rep = &pt.report;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            cfg.code.as_str(),
            pt.d,
            pt.p,
            cfg.estimator.as_str(),
            pt.r,
            rep.evaluated,
            rep.accepted,
            rep.p_post.failures,
            rep.p_post.rate,
            rep.p_post.ci_low,
            rep.p_post.ci_high,
            rep.cutoff,
            hash
        ));
    }
    write_file(&cfg.output.join("results.csv"), &csv)?;
    let alias = match cfg.code {
        CodeKind::Repetition => "fig2c.csv",
        CodeKind::Surface => "fig3d.csv",
    };
    write_file(&cfg.output.join(alias), &csv)
}

fn write_bins(
    cfg: &ExperimentConfig,
    hash: &str,
    pooled: &[ScoredShot],
) -> Result<(), CliError> {
    let fit = match bin_and_fit_logistic(pooled) {
        Ok(fit) => fit,
        Err(e) => {
            eprintln!("warning: no score-bin table: {e}");
            return Ok(());
        }
    };
    let mut csv = String::from("bin_score,shots,failures,p_bar,ci_lo,ci_hi,alpha,config_hash\n");
    for bin in &fit.bins {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            bin.score,
            bin.rate.trials,
            bin.rate.failures,
            bin.rate.rate,
            bin.rate.ci_low,
            bin.rate.ci_high,
            fit.alpha,
            hash
        ));
    }
    let name = match cfg.code {
        CodeKind::Repetition => "fig2a.csv",
        CodeKind::Surface => "fig3c.csv",
    };
    write_file(&cfg.output.join(name), &csv)
}

fn write_lambda(
    cfg: &ExperimentConfig,
    hash: &str,
    points: &[SweepPoint],
    rs: &[f64],
) -> Result<(), CliError> {
    let mut csv = String::from("code,p,estimator,r,lambda,slope,n_distances,config_hash\n");
    let mut rows = 0;
    for &p in &cfg.p_list {
        for &r in rs {
            let rates: Vec<(usize, RateEstimate)> = points
                .iter()
                .filter(|q| q.p == p && q.r == r)
                .map(|q| (q.d, q.report.p_post))
                .collect();
            match lambda_metric(&rates) {
                Ok(fit) => {
                    csv.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        cfg.code.as_str(),
                        p,
                        cfg.estimator.as_str(),
                        r,
                        fit.lambda,
                        fit.slope,
                        fit.used.len(),
                        hash
                    ));
                    rows += 1;
                }
                Err(e) => {
                    eprintln!("warning: no Λ row for p={p} r={r}: {e}");
                }
            }
        }
    }
    if rows > 0 {
        write_file(&cfg.output.join("fig3e.csv"), &csv)?;
    }
    Ok(())
}

fn write_overhead(
    cfg: &ExperimentConfig,
    hash: &str,
    points: &[SweepPoint],
) -> Result<(), CliError> {
    let mut csv =
        String::from("code,p,d,r,kappa,p_gate,ci_lo,ci_hi,on_frontier,config_hash\n");
    for &p in &cfg.p_list {
        let entries: Vec<(usize, f64, RateEstimate)> = points
            .iter()
            .filter(|q| q.p == p)
            .map(|q| (q.d, q.r, q.report.p_post))
            .collect();
        let overhead = overhead_points(&entries);
        let frontier = pareto_frontier(&overhead);
        let on_frontier =
            |q: &OverheadPoint| frontier.iter().any(|f| f.d == q.d && f.r == q.r);
        for q in &overhead {
            csv.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                cfg.code.as_str(),
                p,
                q.d,
                q.r,
                q.kappa,
                q.p_gate.rate,
                q.p_gate.ci_low,
                q.p_gate.ci_high,
                on_frontier(q),
                hash
            ));
        }
    }
    write_file(&cfg.output.join("fig4b.csv"), &csv)
}

fn write_manifest(cfg: &ExperimentConfig, hash: &str) -> Result<(), CliError> {
    let manifest = serde_json::json!({
        "config_hash": hash,
        "seed": cfg.seed,
        "version": env!("CARGO_PKG_VERSION"),
        "shots": cfg.shots,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&cfg.output.join("manifest.json"), &(text + "\n"))
}

/// `validate` subcommand body: schema plus capacity, no execution.
pub fn validate(cfg: &ExperimentConfig) -> Result<(), CliError> {
    cfg.validate()?;
    check_capacity(cfg)?;
    println!(
        "ok: {} {} over d={:?} p={:?}, {} shots, r={:?}, hash {}",
        cfg.code.as_str(),
        cfg.estimator.as_str(),
        cfg.d_list,
        cfg.p_list,
        cfg.shots,
        cfg.r_list,
        &cfg.canonical_hash()[..12]
    );
    Ok(())
}

/// `dem` subcommand body: print one layout's error model as text.
pub fn dump_dem(code: CodeKind, d: usize, p: f64) -> Result<(), CliError> {
    if d < 3 || d % 2 == 0 || d > 25 {
        return Err(CliError::Config(format!(
            "d={d} unsupported: distances must be odd, 3..=25"
        )));
    }
    if !(p > 0.0 && p < 0.5) {
        return Err(CliError::Config(format!("p={p} outside (0, 0.5)")));
    }
    let dem = build_dem(code, d, p)?;
    print!("{}", dem.to_text());
    Ok(())
}
