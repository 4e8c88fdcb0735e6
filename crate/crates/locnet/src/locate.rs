//! Weighted nonlinear least-squares target localization via damped
//! Gauss-Newton with deterministic multi-start.
//!
//! The stacked residual carries `sqrt(v)` on the BS row, so the squared
//! norm reproduces the weighted objective `v*f0 + sum_m f_m`. Each UE row
//! compares the UE-target distance against the derived range
//! `btu_range - bs_range`.

use crate::scene::Point2;
use serde::{Deserialize, Serialize};

/// Distance clamp used when a residual is evaluated at (numerically) zero
/// separation from an anchor, keeping the Jacobian finite.
const ANCHOR_COINCIDENCE_CLAMP_M: f64 = 1e-9;

/// One weighted multilateration instance for a single target.
#[derive(Debug, Clone)]
pub struct LocalizationProblem {
    pub bs: Point2,
    /// BS-target range picked from the monostatic set for this target.
    pub bs_range: f64,
    /// Per-anchor (reported UE position, BS-target-UE range) pairs.
    pub ue_anchors: Vec<(Point2, f64)>,
    /// Weight v on the BS residual, > 1.
    pub bs_weight: f64,
}

/// Gauss-Newton solver knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GnConfig {
    pub max_iter: usize,
    /// Stop once the accepted step is shorter than this, meters.
    pub step_tol: f64,
    /// Number of multi-start points on the BS-range circle.
    pub num_starts: usize,
    /// Smallest Levenberg damping value.
    pub damping_floor: f64,
}

impl Default for GnConfig {
    fn default() -> Self {
        Self {
            max_iter: 50,
            step_tol: 1e-6,
            num_starts: 8,
            damping_floor: 1e-9,
        }
    }
}

impl GnConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if self.max_iter == 0 || self.num_starts == 0 {
            return Err("max_iter and num_starts must be positive");
        }
        if !(self.step_tol > 0.0) || !(self.damping_floor > 0.0) {
            return Err("step_tol and damping_floor must be positive");
        }
        Ok(())
    }
}

/// Solver output for one target.
#[derive(Debug, Clone)]
pub struct LocalizationResult {
    pub position: Point2,
    /// Objective of the weighted problem at `position`.
    pub theta: f64,
    /// `theta / (|ue_anchors| + 1)`.
    pub theta_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocateError {
    /// Fewer than three anchors in total.
    UnderDetermined { anchors: usize },
}

impl std::fmt::Display for LocateError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocateError::UnderDetermined { anchors } => {
                write!(f, "under-determined 2D fix: only {} anchors", anchors)
            }
        }
    }
}

impl std::error::Error for LocateError {}

/// Weighted objective `v*f0(a) + sum_m f_m(a)`.
pub fn objective(a: &Point2, p: &LocalizationProblem) -> f64 {
    stacked_residuals(a, p).iter().map(|r| r * r).sum()
}

/// Stacked residual vector, BS row first (carrying `sqrt(v)`).
pub fn stacked_residuals(a: &Point2, p: &LocalizationProblem) -> Vec<f64> {
    let mut out = Vec::with_capacity(1 + p.ue_anchors.len());
    out.push(p.bs_weight.sqrt() * (p.bs.distance_to(a) - p.bs_range));
    for (u, btu) in &p.ue_anchors {
        out.push(u.distance_to(a) - (btu - p.bs_range));
    }
    out
}

/// Analytic Jacobian of [`stacked_residuals`] with the coincidence clamp.
pub fn analytic_jacobian(a: &Point2, p: &LocalizationProblem) -> Vec<[f64; 2]> {
    let mut rows = Vec::with_capacity(1 + p.ue_anchors.len());
    let sqrt_v = p.bs_weight.sqrt();
    let d0 = p.bs.distance_to(a).max(ANCHOR_COINCIDENCE_CLAMP_M);
    rows.push([sqrt_v * (a.x - p.bs.x) / d0, sqrt_v * (a.y - p.bs.y) / d0]);
    for (u, _) in &p.ue_anchors {
        let d = u.distance_to(a).max(ANCHOR_COINCIDENCE_CLAMP_M);
        rows.push([(a.x - u.x) / d, (a.y - u.y) / d]);
    }
    rows
}

/// Normalized residual: objective divided by the anchor count.
pub fn normalized_residual(theta: f64, num_ue_anchors: usize) -> f64 {
    theta / (num_ue_anchors as f64 + 1.0)
}

struct StartOutcome {
    position: Point2,
    theta: f64,
    iterations: usize,
    converged: bool,
}

fn run_single_start(start: Point2, p: &LocalizationProblem, cfg: &GnConfig) -> StartOutcome {
    let mut a = start;
    let mut obj = objective(&a, p);
    let mut mu = cfg.damping_floor;
    let mut iterations = 0;
    let mut converged = false;

    'outer: for _ in 0..cfg.max_iter {
        iterations += 1;
        let r = stacked_residuals(&a, p);
        let jac = analytic_jacobian(&a, p);

        let mut jtj = [0.0f64; 3]; // [j00, j01, j11]
        let mut jtr = [0.0f64; 2];
        for (row, res) in jac.iter().zip(r.iter()) {
            jtj[0] += row[0] * row[0];
            jtj[1] += row[0] * row[1];
            jtj[2] += row[1] * row[1];
            jtr[0] += row[0] * res;
            jtr[1] += row[1] * res;
        }

        loop {
            let a00 = jtj[0] + mu;
            let a11 = jtj[2] + mu;
            let det = a00 * a11 - jtj[1] * jtj[1];
            if det.abs() < 1e-300 {
                mu = (mu * 10.0).max(1e-12);
                if mu > 1e12 {
                    break 'outer;
                }
                continue;
            }
            let dx = (-jtr[0] * a11 + jtr[1] * jtj[1]) / det;
            let dy = (jtr[0] * jtj[1] - jtr[1] * a00) / det;
            let candidate = Point2::new(a.x + dx, a.y + dy);
            let cand_obj = objective(&candidate, p);
            if cand_obj <= obj + 1e-12 {
                a = candidate;
                obj = cand_obj;
                mu = (mu / 10.0).max(cfg.damping_floor);
                let step = (dx * dx + dy * dy).sqrt();
                if step < cfg.step_tol {
                    converged = true;
                    break 'outer;
                }
                break;
            }
            mu *= 10.0;
            if mu > 1e12 {
                break 'outer;
            }
        }
    }

    StartOutcome {
        position: a,
        theta: obj,
        iterations,
        converged,
    }
}

/// Solve one localization problem with multi-start damped Gauss-Newton.
/// Starts sit on the circle of radius `bs_range` around the BS at uniform
/// angles; the lowest-objective start wins, ties resolved by start index.
pub fn gauss_newton_solve(
    p: &LocalizationProblem,
    cfg: &GnConfig,
) -> Result<LocalizationResult, LocateError> {
    let anchors = 1 + p.ue_anchors.len();
    if anchors < 3 {
        return Err(LocateError::UnderDetermined { anchors });
    }

    let mut best: Option<StartOutcome> = None;
    for i in 0..cfg.num_starts {
        let angle = 2.0 * std::f64::consts::PI * (i as f64) / (cfg.num_starts as f64);
        let start = Point2::new(
            p.bs.x + p.bs_range * angle.cos(),
            p.bs.y + p.bs_range * angle.sin(),
        );
        let outcome = run_single_start(start, p, cfg);
        let better = match &best {
            None => true,
            Some(b) => outcome.theta < b.theta,
        };
        if better {
            best = Some(outcome);
        }
    }

    let best = best.expect("num_starts is positive");
    Ok(LocalizationResult {
        position: best.position,
        theta: best.theta,
        theta_norm: normalized_residual(best.theta, p.ue_anchors.len()),
        iterations: best.iterations,
        converged: best.converged,
    })
}
