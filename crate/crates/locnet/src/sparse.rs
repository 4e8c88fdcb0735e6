//! Complex-valued LASSO solver and support extraction for time-domain
//! channel estimation.
//!
//! The solver is plain proximal gradient (complex soft-thresholding that
//! shrinks magnitudes and preserves phases) with step size `1/L`, where `L`
//! is an upper bound on the largest squared singular value of the design.
//! The objective is monotone non-increasing across iterations by
//! construction.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }

    /// `A x`.
    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            out[r] = acc;
        }
        out
    }

    /// `A^H y`.
    pub fn conj_matvec(&self, y: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(y.len(), self.rows, "conj_matvec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let yr = y[r];
            for (c, a) in row.iter().enumerate() {
                out[c] += a.conj() * yr;
            }
        }
        out
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Abstraction over the LASSO design operator `A` (possibly implicit).
pub trait LassoDesign {
    fn num_rows(&self) -> usize;
    fn num_cols(&self) -> usize;
    /// `A h`.
    fn apply(&self, h: &[Complex64]) -> Vec<Complex64>;
    /// `A^H r`.
    fn apply_adjoint(&self, r: &[Complex64]) -> Vec<Complex64>;
    /// Upper bound on the largest squared singular value of `A`.
    fn lipschitz_bound(&self) -> f64;
}

/// Design given by an explicit matrix scaled by a real factor: `A = scale * M`.
pub struct ScaledMatrixDesign<'a> {
    pub matrix: &'a CMatrix,
    pub scale: f64,
}

impl LassoDesign for ScaledMatrixDesign<'_> {
    fn num_rows(&self) -> usize {
        self.matrix.rows
    }

    fn num_cols(&self) -> usize {
        self.matrix.cols
    }

    fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        let mut y = self.matrix.matvec(h);
        for v in &mut y {
            *v *= self.scale;
        }
        y
    }

    fn apply_adjoint(&self, r: &[Complex64]) -> Vec<Complex64> {
        let mut h = self.matrix.conj_matvec(r);
        for v in &mut h {
            *v *= self.scale;
        }
        h
    }

    fn lipschitz_bound(&self) -> f64 {
        self.scale * self.scale * self.matrix.frobenius_sq()
    }
}

/// Solver parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LassoConfig {
    /// Sets the penalty as `lambda = lambda_scale * ||A^H y||_inf`.
    pub lambda_scale: f64,
    /// Relative objective-decrease stopping tolerance.
    pub tol: f64,
    /// Iteration cap.
    pub max_iter: usize,
    /// Support keeps indices with `|coeff| >= support_rel_threshold * max|coeff|`.
    pub support_rel_threshold: f64,
}

impl Default for LassoConfig {
    fn default() -> Self {
        Self {
            lambda_scale: 0.05,
            tol: 1e-8,
            max_iter: 5000,
            support_rel_threshold: 0.1,
        }
    }
}

impl LassoConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        if !(self.lambda_scale > 0.0 && self.lambda_scale < 1.0) {
            return Err("lambda_scale must be in (0, 1)");
        }
        if !(self.tol > 0.0) {
            return Err("tol must be positive");
        }
        if !(self.support_rel_threshold > 0.0 && self.support_rel_threshold < 1.0) {
            return Err("support_rel_threshold must be in (0, 1)");
        }
        if self.max_iter == 0 {
            return Err("max_iter must be positive");
        }
        Ok(())
    }
}

/// Result of one LASSO solve.
#[derive(Debug, Clone)]
pub struct SparseEstimate {
    pub coeffs: Vec<Complex64>,
    /// Ascending indices that pass the relative magnitude threshold.
    pub support: Vec<usize>,
    /// Final objective `0.5 ||y - A h||^2 + lambda ||h||_1`.
    pub objective: f64,
    /// Penalty actually used.
    pub lambda: f64,
    /// False when the iteration cap was hit before the stop test passed.
    pub converged: bool,
}

/// Complex soft threshold: shrink the magnitude by `t`, keep the phase.
#[inline]
pub fn soft_threshold(x: Complex64, t: f64) -> Complex64 {
    let m = x.norm();
    if m <= t {
        Complex64::new(0.0, 0.0)
    } else {
        x * ((m - t) / m)
    }
}

/// Max-norm KKT residual of `h` for the LASSO objective, given the smooth
/// gradient `g = A^H (A h - y)`.
pub fn kkt_residual(g: &[Complex64], h: &[Complex64], lambda: f64) -> f64 {
    let mut worst = 0f64;
    for (gl, hl) in g.iter().zip(h.iter()) {
        let v = if hl.norm() > 0.0 {
            (gl + hl * (lambda / hl.norm())).norm()
        } else {
            (gl.norm() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Solve the LASSO over an arbitrary design operator.
pub fn solve_lasso_design<D: LassoDesign>(
    design: &D,
    observation: &[Complex64],
    cfg: &LassoConfig,
) -> SparseEstimate {
    assert_eq!(
        observation.len(),
        design.num_rows(),
        "observation length must match the design rows"
    );
    let mf = design.apply_adjoint(observation);
    let lambda = cfg.lambda_scale * mf.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lip = design.lipschitz_bound().max(f64::MIN_POSITIVE);
    let step = 1.0 / lip;

    let mut h = vec![Complex64::new(0.0, 0.0); design.num_cols()];
    let mut prev_obj = f64::INFINITY;
    let mut converged = false;
    let mut objective = f64::INFINITY;

    for _ in 0..cfg.max_iter {
        let mut resid = design.apply(&h);
        for (r, y) in resid.iter_mut().zip(observation.iter()) {
            *r -= y;
        }
        let l1: f64 = h.iter().map(|z| z.norm()).sum();
        objective = 0.5 * resid.iter().map(|z| z.norm_sqr()).sum::<f64>() + lambda * l1;
        let grad = design.apply_adjoint(&resid);

        let kkt = kkt_residual(&grad, &h, lambda);
        let stalled = prev_obj - objective <= cfg.tol * objective.max(f64::MIN_POSITIVE);
        if stalled && kkt <= 10.0 * cfg.tol * lambda.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        prev_obj = objective;

        for (hl, gl) in h.iter_mut().zip(grad.iter()) {
            *hl = soft_threshold(*hl - gl * step, lambda * step);
        }
    }

    let support = extract_support(&h, cfg);
    SparseEstimate {
        coeffs: h,
        support,
        objective,
        lambda,
        converged,
    }
}

/// Solve the LASSO for an explicit dictionary: `A = scale * dictionary`.
pub fn solve_lasso(
    dictionary: &CMatrix,
    observation: &[Complex64],
    scale: f64,
    cfg: &LassoConfig,
) -> SparseEstimate {
    let design = ScaledMatrixDesign {
        matrix: dictionary,
        scale,
    };
    solve_lasso_design(&design, observation, cfg)
}

/// Indices whose magnitude reaches `support_rel_threshold * max|coeff|`,
/// ascending. Empty input or an all-zero vector yields an empty support.
pub fn extract_support(coeffs: &[Complex64], cfg: &LassoConfig) -> Vec<usize> {
    let max = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let cut = cfg.support_rel_threshold * max;
    coeffs
        .iter()
        .enumerate()
        .filter(|(_, z)| z.norm() >= cut)
        .map(|(i, _)| i)
        .collect()
}
