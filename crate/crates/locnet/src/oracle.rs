//! Independent brute-force checks used by tests and the `oracle-check`
//! subcommand.
//!
//! Everything here deliberately avoids the main solver paths: the LASSO
//! oracle is cyclic coordinate descent (the production solver is proximal
//! gradient), the assignment oracle enumerates every feasible association,
//! and the Jacobian oracle uses central finite differences.

use crate::locate::{self, GnConfig, LocalizationProblem};
use crate::scene::Point2;
use crate::sparse::{soft_threshold, CMatrix};
use num_complex::Complex64;

/// LASSO objective `0.5 ||y - scale * M h||^2 + lambda ||h||_1`.
pub fn lasso_objective(
    matrix: &CMatrix,
    scale: f64,
    y: &[Complex64],
    h: &[Complex64],
    lambda: f64,
) -> f64 {
    let mut fit = 0.0;
    let ax = matrix.matvec(h);
    for (a, yv) in ax.iter().zip(y.iter()) {
        fit += (yv - a * scale).norm_sqr();
    }
    0.5 * fit + lambda * h.iter().map(|z| z.norm()).sum::<f64>()
}

/// Max-norm KKT residual of `h` for the dense-matrix LASSO.
pub fn lasso_kkt_residual(
    matrix: &CMatrix,
    scale: f64,
    y: &[Complex64],
    h: &[Complex64],
    lambda: f64,
) -> f64 {
    let mut resid = matrix.matvec(h);
    for (r, yv) in resid.iter_mut().zip(y.iter()) {
        *r = *r * scale - yv;
    }
    let mut grad = matrix.conj_matvec(&resid);
    for g in &mut grad {
        *g *= scale;
    }
    crate::sparse::kkt_residual(&grad, h, lambda)
}

/// Cyclic coordinate descent for the complex LASSO. Independent of the
/// proximal-gradient path; used as a cross-check oracle.
pub fn lasso_coordinate_descent(
    matrix: &CMatrix,
    scale: f64,
    y: &[Complex64],
    lambda: f64,
    sweeps: usize,
) -> Vec<Complex64> {
    let cols = matrix.cols;
    let rows = matrix.rows;
    let mut h = vec![Complex64::new(0.0, 0.0); cols];
    // Column squared norms of A = scale * M.
    let col_sq: Vec<f64> = (0..cols)
        .map(|c| {
            (0..rows)
                .map(|r| matrix.at(r, c).norm_sqr())
                .sum::<f64>()
                * scale
                * scale
        })
        .collect();
    // Residual r = y - A h, maintained incrementally.
    let mut resid: Vec<Complex64> = y.to_vec();
    for _ in 0..sweeps {
        for c in 0..cols {
            if col_sq[c] <= 0.0 {
                continue;
            }
            // Matched filter against the residual with coordinate c removed.
            let mut corr = Complex64::new(0.0, 0.0);
            for r in 0..rows {
                corr += (matrix.at(r, c) * scale).conj() * resid[r];
            }
            corr += h[c] * col_sq[c];
            let new = soft_threshold(corr, lambda) / col_sq[c];
            let delta = new - h[c];
            if delta.norm() > 0.0 {
                for r in 0..rows {
                    resid[r] -= matrix.at(r, c) * scale * delta;
                }
                h[c] = new;
            }
        }
    }
    h
}

/// Exhaustively search the minimum-total-residual association for a set of
/// targets, subject to per-UE index ranges, per-UE forbidden indices, and
/// the per-UE uniqueness constraint across targets.
///
/// `targets` lists (bs_range, per-UE candidate count) data implicit in
/// `range_sets`; `forbidden[m]` holds indices already committed for UE `m`.
/// Returns the best assignment as `assignment[target][ue]` (1-based indices)
/// together with its total normalized residual, or `None` when no feasible
/// assignment exists. Intended for desk-scale instances only.
pub fn exhaustive_assignment(
    bs: Point2,
    bs_ranges: &[f64],
    anchors: &[Point2],
    btu_sets: &[Vec<f64>],
    forbidden: &[Vec<usize>],
    bs_weight: f64,
    gn: &GnConfig,
) -> Option<(Vec<Vec<usize>>, f64)> {
    let num_targets = bs_ranges.len();
    let num_ue = anchors.len();
    let mut best: Option<(Vec<Vec<usize>>, f64)> = None;
    let mut current = vec![vec![0usize; num_ue]; num_targets];

    fn recurse(
        t: usize,
        num_targets: usize,
        num_ue: usize,
        bs: Point2,
        bs_ranges: &[f64],
        anchors: &[Point2],
        btu_sets: &[Vec<f64>],
        forbidden: &[Vec<usize>],
        bs_weight: f64,
        gn: &GnConfig,
        current: &mut Vec<Vec<usize>>,
        best: &mut Option<(Vec<Vec<usize>>, f64)>,
        total_so_far: f64,
    ) {
        if t == num_targets {
            match best {
                Some((_, cost)) if *cost <= total_so_far => {}
                _ => *best = Some((current.clone(), total_so_far)),
            }
            return;
        }
        // Enumerate this target's per-UE choices.
        let mut choice = vec![1usize; num_ue];
        'outer: loop {
            let feasible = (0..num_ue).all(|m| {
                let g = choice[m];
                g <= btu_sets[m].len()
                    && !forbidden[m].contains(&g)
                    && (0..t).all(|prev| current[prev][m] != g)
            });
            if feasible {
                let problem = LocalizationProblem {
                    bs,
                    bs_range: bs_ranges[t],
                    ue_anchors: (0..num_ue)
                        .map(|m| (anchors[m], btu_sets[m][choice[m] - 1]))
                        .collect(),
                    bs_weight,
                };
                if let Ok(res) = locate::gauss_newton_solve(&problem, gn) {
                    current[t] = choice.clone();
                    recurse(
                        t + 1,
                        num_targets,
                        num_ue,
                        bs,
                        bs_ranges,
                        anchors,
                        btu_sets,
                        forbidden,
                        bs_weight,
                        gn,
                        current,
                        best,
                        total_so_far + res.theta_norm,
                    );
                }
            }
            // Odometer increment over per-UE candidate counts.
            for m in (0..num_ue).rev() {
                choice[m] += 1;
                if choice[m] <= btu_sets[m].len() {
                    continue 'outer;
                }
                choice[m] = 1;
            }
            break;
        }
    }

    recurse(
        0,
        num_targets,
        num_ue,
        bs,
        bs_ranges,
        anchors,
        btu_sets,
        forbidden,
        bs_weight,
        gn,
        &mut current,
        &mut best,
        0.0,
    );
    best
}

/// Central finite-difference Jacobian of the stacked localization residual.
pub fn numeric_jacobian(problem: &LocalizationProblem, at: Point2) -> Vec<[f64; 2]> {
    let eps = 1e-6;
    let rows = 1 + problem.ue_anchors.len();
    let mut out = vec![[0.0; 2]; rows];
    for axis in 0..2 {
        let mut plus = at;
        let mut minus = at;
        if axis == 0 {
            plus.x += eps;
            minus.x -= eps;
        } else {
            plus.y += eps;
            minus.y -= eps;
        }
        let rp = locate::stacked_residuals(&plus, problem);
        let rm = locate::stacked_residuals(&minus, problem);
        for r in 0..rows {
            out[r][axis] = (rp[r] - rm[r]) / (2.0 * eps);
        }
    }
    out
}
