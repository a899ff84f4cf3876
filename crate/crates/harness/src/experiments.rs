//! The five experiment kinds.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::Utc;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use whipchain::dynamics::{detect_blowup, growth_phase, run, Trajectory};
use whipchain::inequalities::{a2_battery, weight_battery, BatteryLine};
use whipchain::sampling::ChainSampler;
use whipchain::spectral::{resolution_error, transfer_resolution};
use whipchain::tension::{certify_bounds, compute_alpha_beta, green_matrix, GreenCertificate};
use whipchain::{ChainError, ChainState};

use crate::config::{ExperimentConfig, Format, Kind};
use crate::emit::{self, Cell, EmitError, Row};
use crate::manifest::{inventory, sha256_hex, RunManifest, Status};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Numeric(#[from] ChainError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Bytes of the config file, hashed into the manifest.
    pub config_bytes: Vec<u8>,
    pub workers: usize,
}

/// What a finished experiment produced.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub manifest: RunManifest,
    /// Human-readable result lines.
    pub summary: Vec<String>,
}

#[derive(Default)]
struct Findings {
    terminations: Vec<String>,
    violations: usize,
    summary: Vec<String>,
}

/// Run `cfg`, write its outputs and a manifest into `cfg.output_dir`.
///
/// On failure the files written so far stay in place and the manifest is marked incomplete.
pub fn run_experiment(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<Outcome, HarnessError> {
    let started = Utc::now();
    let dir = cfg.output_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))?;
    let result = pool.install(|| match cfg.kind {
        Kind::Run => run_kind(cfg, &dir),
        Kind::Convergence => convergence(cfg, &dir),
        Kind::InequalitySuite => inequality_suite(cfg, &dir),
        Kind::GreenCertify => green_certify(cfg, &dir),
        Kind::BlowupHunt => blowup_hunt(cfg, &dir),
    });
    let files = inventory(&dir).map_err(|e| io_err(&dir, e))?;
    let (findings, error) = match &result {
        Ok(f) => (f, None),
        Err(e) => (&Findings::default(), Some(e.to_string())),
    };
    let manifest = RunManifest {
        kind: cfg.kind.as_str().to_string(),
        config_sha256: sha256_hex(&opts.config_bytes),
        version: env!("CARGO_PKG_VERSION").to_string(),
        started,
        finished: Utc::now(),
        status: if error.is_none() { Status::Complete } else { Status::Incomplete },
        terminations: findings.terminations.clone(),
        violations: findings.violations,
        error,
        files,
    };
    manifest.write(&dir).map_err(|e| io_err(&dir, e))?;
    let findings = result?;
    Ok(Outcome {
        manifest,
        summary: findings.summary,
    })
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> HarnessError {
    HarnessError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn write_rows(cfg: &ExperimentConfig, dir: &Path, stem: &str, rows: &[Row]) -> Result<(), EmitError> {
    for format in &cfg.formats {
        match format {
            Format::Csv => emit::write_rows_csv(&dir.join(format!("{stem}.csv")), rows)?,
            Format::Jsonl => emit::write_rows_jsonl(&dir.join(format!("{stem}.jsonl")), rows)?,
        }
    }
    Ok(())
}

fn write_trajectory(cfg: &ExperimentConfig, dir: &Path, stem: &str, t: &Trajectory) -> Result<(), EmitError> {
    for format in &cfg.formats {
        match format {
            Format::Csv => emit::write_series_csv(
                &dir.join(format!("{stem}.csv")),
                &t.snapshots,
                cfg.integrator.m_max,
                cfg.integrator.d_max,
            )?,
            Format::Jsonl => emit::write_snapshots_jsonl(&dir.join(format!("{stem}.jsonl")), &t.snapshots)?,
        }
    }
    Ok(())
}

fn member_rng(seed: u64, n: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ n as u64)
}

fn run_kind(cfg: &ExperimentConfig, dir: &Path) -> Result<Findings, HarnessError> {
    let results: Vec<Result<(usize, Trajectory), HarnessError>> = cfg
        .n
        .par_iter()
        .map(|&n| {
            let t = run(&cfg.initial_data.generate(n)?, &cfg.integrator)?;
            write_trajectory(cfg, dir, &format!("series_n{n}"), &t)?;
            Ok((n, t))
        })
        .collect();
    let mut out = Findings::default();
    for r in results {
        let (n, t) = r?;
        let last = t.last();
        out.terminations.push(format!("n={n}: {}", t.termination.as_str()));
        out.summary.push(format!(
            "n={n}: {} at t={:.6} after {} steps, e3={:.6e}, min sigma={:.6e}",
            t.termination.as_str(),
            last.state.time,
            t.steps,
            last.report.e_at(3),
            last.report.min_sigma
        ));
    }
    Ok(out)
}

fn convergence(cfg: &ExperimentConfig, dir: &Path) -> Result<Findings, HarnessError> {
    let mut ns = cfg.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let finest = *ns.last().expect("n is nonempty");
    let source = cfg.initial_data.generate(finest)?;
    let runs: Vec<Result<(usize, Trajectory), HarnessError>> = ns
        .par_iter()
        .map(|&n| {
            let start = if n == finest { source.clone() } else { transfer_resolution(&source, n)? };
            Ok((n, run(&start, &cfg.integrator)?))
        })
        .collect();
    let runs: Vec<(usize, Trajectory)> = runs.into_iter().collect::<Result<_, _>>()?;
    let finals: Vec<&ChainState> = runs.iter().map(|(_, t)| &t.last().state).collect();
    let reference = *finals.last().expect("nonempty");
    let mut out = Findings::default();
    let mut rows = Vec::new();
    let mut previous: Option<f64> = None;
    for (i, (n, t)) in runs.iter().enumerate() {
        let vs_finest = resolution_error(finals[i], reference)?;
        let vs_next = match finals.get(i + 1) {
            Some(next) => resolution_error(finals[i], next)?,
            None => f64::NAN,
        };
        let ratio = previous.map_or(f64::NAN, |p| p / vs_finest);
        previous = Some(vs_finest);
        out.terminations.push(format!("n={n}: {}", t.termination.as_str()));
        out.summary.push(format!("n={n}: error vs n={finest} {vs_finest:.6e}, vs next {vs_next:.6e}"));
        rows.push(vec![
            ("n", Cell::from(*n)),
            ("termination", t.termination.as_str().into()),
            ("t_final", t.last().state.time.into()),
            ("steps", t.steps.into()),
            ("error_vs_finest", vs_finest.into()),
            ("error_vs_next", vs_next.into()),
            ("ratio_to_previous", ratio.into()),
        ]);
    }
    write_rows(cfg, dir, "convergence", &rows)?;
    Ok(out)
}

fn battery_rows(seed: u64, lines: &[BatteryLine]) -> Vec<Row> {
    lines
        .iter()
        .map(|l| {
            vec![
                ("seed", Cell::from(seed)),
                ("n", l.n.into()),
                ("inequality", l.name.as_str().into()),
                ("r", l.r.into()),
                ("trials", l.trials.into()),
                ("violations", l.violations.into()),
                ("worst_ratio", l.worst_ratio.into()),
            ]
        })
        .collect()
}

fn members(cfg: &ExperimentConfig) -> Vec<(u64, usize)> {
    cfg.seeds.iter().flat_map(|&s| cfg.n.iter().map(move |&n| (s, n))).collect()
}

fn inequality_suite(cfg: &ExperimentConfig, dir: &Path) -> Result<Findings, HarnessError> {
    let samples = cfg.suite.samples;
    let results: Vec<Result<Vec<Row>, ChainError>> = members(cfg)
        .par_iter()
        .map(|&(seed, n)| {
            let mut rng = member_rng(seed, n);
            let mut lines = a2_battery(&mut rng, samples, &[n], &cfg.suite.r)?;
            lines.extend(weight_battery(&mut rng, samples, &[n])?);
            Ok(battery_rows(seed, &lines))
        })
        .collect();
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    let mut out = Findings::default();
    let mut trials = 0;
    for row in &rows {
        if let (Cell::Int(t), Cell::Int(v)) = (&row[4].1, &row[5].1) {
            trials += *t as usize;
            out.violations += *v as usize;
        }
    }
    out.summary.push(format!("{} violations in {trials} checks", out.violations));
    write_rows(cfg, dir, "inequality_suite", &rows)?;
    Ok(out)
}

fn green_certify(cfg: &ExperimentConfig, dir: &Path) -> Result<Findings, HarnessError> {
    let suite = &cfg.suite;
    let sampler = ChainSampler {
        max_turn: suite.max_turn,
        velocity_scale: 1.0,
    };
    let results: Vec<Result<(Row, usize), ChainError>> = members(cfg)
        .par_iter()
        .map(|&(seed, n)| {
            let mut rng = member_rng(seed, n);
            let mut tally = GreenTally::default();
            let mut attempts = 0;
            while tally.kept < suite.samples && attempts < 100 * suite.samples {
                attempts += 1;
                let c = sampler.sample(&mut rng, n, 2)?;
                let ab = compute_alpha_beta(&c);
                if suite.require_positive_alpha && !ab.all_alpha_positive() {
                    continue;
                }
                tally.add(&certify_bounds(&green_matrix(&ab), &ab)?);
            }
            Ok((tally.row(seed, n, attempts), tally.violations()))
        })
        .collect();
    let mut out = Findings::default();
    let mut rows = Vec::new();
    for r in results {
        let (row, v) = r?;
        out.violations += v;
        rows.push(row);
    }
    out.summary.push(format!("{} bound violations over {} (seed, n) pairs", out.violations, rows.len()));
    write_rows(cfg, dir, "green_certify", &rows)?;
    Ok(out)
}

#[derive(Default)]
struct GreenTally {
    kept: usize,
    min_bound_fail: usize,
    upper: (usize, usize),
    lower: (usize, usize),
    corner: (usize, usize),
    max_grad: f64,
    max_ng_over_k: f64,
    min_lower_ratio: Option<f64>,
}

impl GreenTally {
    fn add(&mut self, c: &GreenCertificate) {
        self.kept += 1;
        self.min_bound_fail += usize::from(!c.min_bound_pass);
        for (slot, pass) in [
            (&mut self.upper, c.upper_bounds_pass),
            (&mut self.lower, c.lower_bound_pass),
            (&mut self.corner, c.corner_pass),
        ] {
            if let Some(ok) = pass {
                slot.0 += 1;
                slot.1 += usize::from(!ok);
            }
        }
        self.max_grad = self.max_grad.max(c.max_grad);
        self.max_ng_over_k = self.max_ng_over_k.max(c.max_ng_over_k);
        self.min_lower_ratio = Some(self.min_lower_ratio.map_or(c.min_lower_ratio, |m| m.min(c.min_lower_ratio)));
    }

    fn violations(&self) -> usize {
        self.min_bound_fail + self.upper.1 + self.lower.1 + self.corner.1
    }

    fn row(&self, seed: u64, n: usize, attempts: usize) -> Row {
        vec![
            ("seed", Cell::from(seed)),
            ("n", n.into()),
            ("attempts", attempts.into()),
            ("samples", self.kept.into()),
            ("min_bound_violations", self.min_bound_fail.into()),
            ("upper_checked", self.upper.0.into()),
            ("upper_violations", self.upper.1.into()),
            ("lower_checked", self.lower.0.into()),
            ("lower_violations", self.lower.1.into()),
            ("corner_checked", self.corner.0.into()),
            ("corner_violations", self.corner.1.into()),
            ("max_grad", self.max_grad.into()),
            ("max_ng_over_k", self.max_ng_over_k.into()),
            ("min_lower_ratio", self.min_lower_ratio.unwrap_or(f64::NAN).into()),
        ]
    }
}

fn blowup_hunt(cfg: &ExperimentConfig, dir: &Path) -> Result<Findings, HarnessError> {
    let results: Vec<Result<Row, HarnessError>> = cfg
        .n
        .par_iter()
        .map(|&n| {
            let t = run(&cfg.initial_data.generate(n)?, &cfg.integrator)?;
            let series = t.blowup_series();
            let series_rows: Vec<Row> = series
                .iter()
                .map(|s| vec![("t", Cell::from(s.t)), ("angular", s.angular.into()), ("curvature", s.curvature.into())])
                .collect();
            write_rows(cfg, dir, &format!("blowup_series_n{n}"), &series_rows)?;
            let fit = detect_blowup(growth_phase(&series));
            let (t_est, pc, pa, rc, ra, window, rejection) = match &fit {
                Ok(f) => (
                    f.t_est,
                    f.p_curvature,
                    f.p_angular,
                    f.residual_curvature,
                    f.residual_angular,
                    f.window,
                    String::new(),
                ),
                Err(e) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, 0, e.to_string()),
            };
            Ok(vec![
                ("n", Cell::from(n)),
                ("termination", t.termination.as_str().into()),
                ("t_final", t.last().state.time.into()),
                ("steps", t.steps.into()),
                ("t_est", t_est.into()),
                ("p_curvature", pc.into()),
                ("p_angular", pa.into()),
                ("residual_curvature", rc.into()),
                ("residual_angular", ra.into()),
                ("window", window.into()),
                ("rejection", rejection.into()),
            ])
        })
        .collect();
    let mut out = Findings::default();
    let mut rows = Vec::new();
    for r in results {
        let row = r?;
        let text = |i: usize| match &row[i].1 {
            Cell::Text(s) => s.clone(),
            Cell::Float(x) => format!("{x:.6}"),
            Cell::Int(x) => x.to_string(),
            Cell::Bool(b) => b.to_string(),
        };
        out.terminations.push(format!("n={}: {}", text(0), text(1)));
        let rejection = text(10);
        out.summary.push(if rejection.is_empty() {
            format!("n={}: {}, T_est {}, exponents {} / {}", text(0), text(1), text(4), text(5), text(6))
        } else {
            format!("n={}: {}, fit rejected ({rejection})", text(0), text(1))
        });
        rows.push(row);
    }
    write_rows(cfg, dir, "blowup_hunt", &rows)?;
    Ok(out)
}
