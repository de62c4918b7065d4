//! Grid evaluation of the exact and approximate thresholds over resident
//! proportions `(p1, p2) in [0, 1]^2`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use commuter_sir::{
    approx_threshold, reduced_coefficients, threshold_explicit, threshold_via_alpha, Scenario,
};
use rayon::prelude::*;

use crate::error::CliError;

/// Environment variable capping sweep parallelism; 0 or unset mean auto.
pub const THREADS_ENV: &str = "COMMUTER_SIR_THREADS";

#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub p1: f64,
    pub p2: f64,
    pub r12_exact: f64,
    pub r12_tilde: f64,
    pub q11: f64,
    pub q12: f64,
    pub q21: f64,
    pub q22: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub p1_points: usize,
    pub p2_points: usize,
    /// Row-major: p2 outer, p1 inner.
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn p2_values(&self) -> Vec<f64> {
        self.rows.iter().step_by(self.p1_points).map(|r| r.p2).collect()
    }

    /// The `r12_exact` column of one p2-curve.
    pub fn curve(&self, p2_index: usize) -> &[SweepRow] {
        let start = p2_index * self.p1_points;
        &self.rows[start..start + self.p1_points]
    }

    pub fn max_gap(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.r12_tilde - r.r12_exact).abs())
            .fold(0.0, f64::max)
    }
}

pub fn parse_grid(spec: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = spec.split(['x', 'X']).collect();
    let parsed = match parts.as_slice() {
        [a, b] => a.trim().parse::<usize>().ok().zip(b.trim().parse::<usize>().ok()),
        _ => None,
    };
    let (p1, p2) = parsed.ok_or_else(|| {
        CliError::Validation(format!("grid must look like 201x201, got {spec:?}"))
    })?;
    if p1 < 2 || p2 < 2 {
        return Err(CliError::Validation(format!(
            "grid resolutions must be >= 2, got {p1}x{p2}"
        )));
    }
    Ok((p1, p2))
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .map(|s| {
            s.trim().parse::<usize>().map_err(|_| {
                CliError::Validation(format!("{THREADS_ENV} must be an integer, got {s:?}"))
            })
        })
        .transpose()?
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot build thread pool: {e}")))
}

fn evaluate_node(base: &Scenario, p1: f64, p2: f64) -> Result<SweepRow, CliError> {
    let sc = base.with_proportions(p1, p2)?;
    let q = reduced_coefficients(&sc);
    let r12_exact = threshold_explicit(&q);
    let (r1, r2) = sc.epidemic().intrinsic_reproduction();
    let alpha = if r1 == r2 {
        0.0
    } else if r2 > r1 {
        threshold_via_alpha(&q, r1, r2)?.1
    } else {
        threshold_via_alpha(&q.swap_patches(), r2, r1)?.1
    };
    let (r12_tilde, _) = approx_threshold(&sc)?;
    Ok(SweepRow {
        p1,
        p2,
        r12_exact,
        r12_tilde,
        q11: q.q11,
        q12: q.q12,
        q21: q.q21,
        q22: q.q22,
        alpha,
    })
}

/// Evaluates every `(p1, p2)` grid node, data-parallel over nodes with a
/// deterministic row order (p2 outer, p1 inner).
pub fn run_sweep(
    base: &Scenario,
    p1_points: usize,
    p2_points: usize,
) -> Result<SweepResult, CliError> {
    if p1_points < 2 || p2_points < 2 {
        return Err(CliError::Validation(format!(
            "grid resolutions must be >= 2, got {p1_points}x{p2_points}"
        )));
    }
    let nodes: Vec<(f64, f64)> = (0..p2_points)
        .flat_map(|j| {
            let p2 = j as f64 / (p2_points - 1) as f64;
            (0..p1_points).map(move |i| (i as f64 / (p1_points - 1) as f64, p2))
        })
        .collect();
    let rows: Result<Vec<SweepRow>, CliError> = thread_pool()?.install(|| {
        nodes
            .par_iter()
            .map(|&(p1, p2)| evaluate_node(base, p1, p2))
            .collect()
    });
    Ok(SweepResult { p1_points, p2_points, rows: rows? })
}

/// 12 significant digits, the serialization used by every CSV emitter.
pub fn fmt_sig12(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn sweep_csv(sweep: &SweepResult) -> String {
    let mut out = String::from("p1,p2,r12_exact,r12_tilde,q11,q12,q21,q22,alpha\n");
    for r in &sweep.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_sig12(r.p1),
            fmt_sig12(r.p2),
            fmt_sig12(r.r12_exact),
            fmt_sig12(r.r12_tilde),
            fmt_sig12(r.q11),
            fmt_sig12(r.q12),
            fmt_sig12(r.q21),
            fmt_sig12(r.q22),
            fmt_sig12(r.alpha)
        );
    }
    out
}

pub fn write_sweep_csv(sweep: &SweepResult, path: &Path) -> Result<(), CliError> {
    fs::write(path, sweep_csv(sweep)).map_err(|e| CliError::io(path, e))
}
