//! Joint data association and ineffective-UE removal.
//!
//! Single-target localization iteratively removes the UE whose exclusion
//! most reduces the normalized residual (outlier rejection over anchors);
//! the multi-target driver searches association hypotheses for one target,
//! validates the resulting UE set on the next target, and assigns the rest
//! greedily under the per-UE uniqueness constraints. Active mode pre-prunes
//! UEs and association candidates with the sum-path consistency residue
//! obtained from uplink self-sensing ranges.

use crate::locate::{
    gauss_newton_solve, GnConfig, LocalizationProblem, LocalizationResult, LocateError,
};
use crate::ranging::RangeSets;
use crate::scene::Point2;
use crate::waveform::OfdmConfig;
use serde::{Deserialize, Serialize};

/// Cap on the number of hypotheses a single enumeration may materialize.
pub const MAX_HYPOTHESES: u128 = 1_000_000;

/// Thresholds controlling UE selection and the UE-set recheck.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelectionConfig {
    /// Stop removing UEs once the best removal improves the normalized
    /// residual by no more than this (squared meters per anchor).
    pub theta_th: f64,
    /// Accept a UE set when the next target's residual stays below this.
    pub theta_bar_th: f64,
    /// Smallest number of UE anchors the selection may keep.
    pub min_ue_anchors: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            theta_th: 0.1,
            theta_bar_th: 1.0,
            min_ue_anchors: 2,
        }
    }
}

/// Threshold on the sum-path consistency residue used by active-mode
/// pruning.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActivePruneConfig {
    /// Residue threshold, meters.
    pub gamma_th: f64,
}

impl ActivePruneConfig {
    /// One full quantization budget per band: half a round-trip bin of each
    /// numerology, i.e. `c0/(2*N_d*df_d) + c0/(2*N_u*df_u)`.
    pub fn quantization_budget(cfg_dl: &OfdmConfig, cfg_ul: &OfdmConfig, c0: f64) -> Self {
        Self {
            gamma_th: c0 / (2.0 * cfg_dl.total_bandwidth()) + c0 / (2.0 * cfg_ul.total_bandwidth()),
        }
    }
}

/// Pipeline variant switches used by the benchmark schemes.
#[derive(Debug, Clone, Copy)]
pub struct Phase2Options {
    /// Run the iterative UE removal inside each hypothesis evaluation.
    pub selection: bool,
    /// Validate the UE set on the next target before trusting it.
    pub recheck: bool,
}

impl Default for Phase2Options {
    fn default() -> Self {
        Self {
            selection: true,
            recheck: true,
        }
    }
}

/// Final association and localization output.
#[derive(Debug, Clone)]
pub struct AssocSolution {
    /// Selected effective UEs (anchor-pool indices, ascending).
    pub effective_set: Vec<usize>,
    /// Per-target association indices over `effective_set` (1-based);
    /// empty for unlocalized targets.
    pub g: Vec<Vec<usize>>,
    /// Per-target position estimates.
    pub positions: Vec<Option<Point2>>,
    /// Per-target normalized residuals.
    pub residuals: Vec<Option<f64>>,
    /// False when no UE-set recheck passed and the best step was used.
    pub validated: bool,
}

/// Active-mode pruning output.
#[derive(Debug, Clone)]
pub struct PruneResult {
    /// UEs declared ineffective (anchor-pool indices, ascending).
    pub removed_ues: Vec<usize>,
    /// Narrowed association candidates, `[ue][target] -> allowed g`.
    pub allowed_g: Vec<Vec<Vec<usize>>>,
    /// Minimum residue per UE and target.
    pub gamma_min: Vec<Vec<f64>>,
}

/// Instrumentation counters for one Phase II run.
#[derive(Debug, Clone, Default)]
pub struct PhaseTwoStats {
    /// Localization solves performed.
    pub p1_solves: usize,
    /// Association hypotheses evaluated across all enumerations.
    pub hypotheses_evaluated: usize,
    /// Largest per-run removal-candidate solve count seen in selection.
    pub max_selection_solves: usize,
    /// True while every selection run stayed within `(M-2)(M+3)/2` solves.
    pub selection_within_bound: bool,
}

impl PhaseTwoStats {
    pub fn new() -> Self {
        Self {
            selection_within_bound: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AssocError {
    /// Not enough UEs to run selection or localization.
    UnderDetermined { ues: usize },
    /// The hypothesis space exceeded [`MAX_HYPOTHESES`].
    TooManyHypotheses { count: u128 },
    /// The BS range set was empty.
    NoRanges,
}

impl std::fmt::Display for AssocError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AssocError::UnderDetermined { ues } => {
                write!(f, "under-determined: only {} UE anchors available", ues)
            }
            AssocError::TooManyHypotheses { count } => {
                write!(f, "hypothesis space too large: {} candidates", count)
            }
            AssocError::NoRanges => write!(f, "empty BS range set"),
        }
    }
}

impl std::error::Error for AssocError {}

/// Worst-case removal-candidate solve count of the single-target selection,
/// `(M-2)(M+3)/2`.
pub fn selection_solve_bound(num_ue: usize) -> usize {
    if num_ue < 2 {
        return 0;
    }
    (num_ue - 2) * (num_ue + 3) / 2
}

/// Enumerate association hypotheses as the Cartesian product of per-UE
/// candidate indices minus per-UE forbidden ones, in lexicographic order
/// (first UE most significant). `per_ue_sizes[m]` is the range-set size of
/// UE `m`; `allowed` optionally narrows each UE's candidates. An empty
/// candidate set for any UE yields an empty list.
pub fn enumerate_hypotheses(
    per_ue_sizes: &[usize],
    forbidden: &[Vec<usize>],
    allowed: Option<&[Vec<usize>]>,
) -> Result<Vec<Vec<usize>>, AssocError> {
    assert_eq!(per_ue_sizes.len(), forbidden.len());
    let candidates: Vec<Vec<usize>> = per_ue_sizes
        .iter()
        .enumerate()
        .map(|(m, &k_m)| {
            let base: Vec<usize> = match allowed {
                Some(sets) => sets[m].iter().copied().filter(|&g| g >= 1 && g <= k_m).collect(),
                None => (1..=k_m).collect(),
            };
            base.into_iter()
                .filter(|g| !forbidden[m].contains(g))
                .collect()
        })
        .collect();

    let mut count: u128 = 1;
    for c in &candidates {
        count = count.saturating_mul(c.len() as u128);
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > MAX_HYPOTHESES {
        return Err(AssocError::TooManyHypotheses { count });
    }

    let mut out = Vec::with_capacity(count as usize);
    let mut idx = vec![0usize; candidates.len()];
    loop {
        out.push(
            idx.iter()
                .enumerate()
                .map(|(m, &i)| candidates[m][i])
                .collect::<Vec<usize>>(),
        );
        // Odometer with the last UE fastest keeps lexicographic order.
        let mut pos = candidates.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < candidates[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Output of the single-target UE selection.
#[derive(Debug, Clone)]
pub struct SingleTargetSelection {
    /// Kept UEs as indices into the supplied list, ascending.
    pub kept: Vec<usize>,
    pub result: LocalizationResult,
    /// Removal-candidate solves, bounded by [`selection_solve_bound`].
    pub selection_solves: usize,
}

fn solve_subset(
    bs: Point2,
    bs_range: f64,
    ues: &[(Point2, f64)],
    subset: &[usize],
    bs_weight: f64,
    gn: &GnConfig,
) -> Result<LocalizationResult, LocateError> {
    let problem = LocalizationProblem {
        bs,
        bs_range,
        ue_anchors: subset.iter().map(|&i| ues[i]).collect(),
        bs_weight,
    };
    gauss_newton_solve(&problem, gn)
}

/// Single-target effective-UE selection (one association already fixed).
///
/// Starts from the full UE list and repeatedly removes the UE whose
/// exclusion minimizes the normalized residual, stopping when the best
/// removal no longer improves it by more than `theta_th` (the set before
/// that removal is returned) or when only `min_ue_anchors` UEs remain.
pub fn select_ues_single_target(
    bs: Point2,
    bs_range: f64,
    ues: &[(Point2, f64)],
    bs_weight: f64,
    cfg: &SelectionConfig,
    gn: &GnConfig,
    stats: &mut PhaseTwoStats,
) -> Result<SingleTargetSelection, AssocError> {
    if ues.len() < cfg.min_ue_anchors + 1 {
        return Err(AssocError::UnderDetermined { ues: ues.len() });
    }

    let mut current: Vec<usize> = (0..ues.len()).collect();
    let mut current_result = solve_subset(bs, bs_range, ues, &current, bs_weight, gn)
        .map_err(|_| AssocError::UnderDetermined { ues: ues.len() })?;
    stats.p1_solves += 1;
    let mut selection_solves = 0usize;

    while current.len() > cfg.min_ue_anchors {
        let mut best: Option<(usize, LocalizationResult)> = None;
        for drop_pos in 0..current.len() {
            let candidate: Vec<usize> = current
                .iter()
                .enumerate()
                .filter(|(p, _)| *p != drop_pos)
                .map(|(_, &u)| u)
                .collect();
            selection_solves += 1;
            stats.p1_solves += 1;
            let res = match solve_subset(bs, bs_range, ues, &candidate, bs_weight, gn) {
                Ok(r) => r,
                Err(_) => continue,
            };
            let better = match &best {
                None => true,
                // Strict comparison keeps the earliest (smallest removed UE
                // index) on ties.
                Some((_, b)) => res.theta_norm < b.theta_norm,
            };
            if better {
                best = Some((drop_pos, res));
            }
        }
        let Some((drop_pos, best_result)) = best else {
            break;
        };
        // Keep removing only while the improvement is significant.
        if best_result.theta_norm > current_result.theta_norm - cfg.theta_th {
            break;
        }
        current.remove(drop_pos);
        current_result = best_result;
    }

    stats.max_selection_solves = stats.max_selection_solves.max(selection_solves);
    if selection_solves > selection_solve_bound(ues.len()) {
        stats.selection_within_bound = false;
    }

    Ok(SingleTargetSelection {
        kept: current,
        result: current_result,
        selection_solves,
    })
}

fn per_ue_sizes(range_sets: &RangeSets) -> Vec<usize> {
    range_sets.d_btu.iter().map(|v| v.len()).collect()
}

fn allowed_column(
    allowed_g: Option<&[Vec<Vec<usize>>]>,
    num_ue: usize,
    target: usize,
) -> Option<Vec<Vec<usize>>> {
    allowed_g.map(|per_ue| {
        (0..num_ue)
            .map(|m| per_ue[m].get(target - 1).cloned().unwrap_or_default())
            .collect()
    })
}

fn solve_p1_for_hypothesis(
    range_sets: &RangeSets,
    anchors: &[Point2],
    bs: Point2,
    bs_weight: f64,
    target: usize,
    subset: &[usize],
    hyp: &[usize],
    gn: &GnConfig,
    stats: &mut PhaseTwoStats,
) -> Option<LocalizationResult> {
    let ue_anchors: Vec<(Point2, f64)> = subset
        .iter()
        .zip(hyp.iter())
        .map(|(&m, &g)| (anchors[m], range_sets.d_btu[m][g - 1]))
        .collect();
    let problem = LocalizationProblem {
        bs,
        bs_range: range_sets.d_bt[target - 1],
        ue_anchors,
        bs_weight,
    };
    stats.p1_solves += 1;
    gauss_newton_solve(&problem, gn).ok()
}

struct StepOutcome {
    target: usize,
    m_tilde: Vec<usize>,
    g_full: Vec<usize>,
    result: LocalizationResult,
    next_g: Option<Vec<usize>>,
    next_result: Option<LocalizationResult>,
}

impl StepOutcome {
    fn total_residual(&self) -> f64 {
        self.result.theta_norm
            + self
                .next_result
                .as_ref()
                .map(|r| r.theta_norm)
                .unwrap_or(f64::INFINITY)
    }
}

/// Evaluate the hypothesis-selection stage for one target over the full UE
/// pool, returning the best hypothesis (lexicographically-first minimum).
fn best_hypothesis_with_selection(
    range_sets: &RangeSets,
    anchors: &[Point2],
    bs: Point2,
    bs_weight: f64,
    target: usize,
    allowed_g: Option<&[Vec<Vec<usize>>]>,
    sel: &SelectionConfig,
    gn: &GnConfig,
    options: Phase2Options,
    stats: &mut PhaseTwoStats,
) -> Result<Option<(Vec<usize>, Vec<usize>, LocalizationResult)>, AssocError> {
    let num_ue = anchors.len();
    let sizes = per_ue_sizes(range_sets);
    let allowed = allowed_column(allowed_g, num_ue, target);
    let hyps = enumerate_hypotheses(&sizes, &vec![Vec::new(); num_ue], allowed.as_deref())?;
    stats.hypotheses_evaluated += hyps.len();

    let mut best: Option<(Vec<usize>, Vec<usize>, LocalizationResult)> = None;
    for hyp in hyps {
        let ues: Vec<(Point2, f64)> = (0..num_ue)
            .map(|m| (anchors[m], range_sets.d_btu[m][hyp[m] - 1]))
            .collect();
        let outcome: Option<(Vec<usize>, LocalizationResult)> = if options.selection
            && num_ue > sel.min_ue_anchors
        {
            match select_ues_single_target(
                bs,
                range_sets.d_bt[target - 1],
                &ues,
                bs_weight,
                sel,
                gn,
                stats,
            ) {
                Ok(s) => Some((s.kept, s.result)),
                Err(_) => None,
            }
        } else {
            let all: Vec<usize> = (0..num_ue).collect();
            solve_p1_for_hypothesis(
                range_sets, anchors, bs, bs_weight, target, &all, &hyp, gn, stats,
            )
            .map(|r| (all, r))
        };
        if let Some((kept, result)) = outcome {
            let better = match &best {
                None => true,
                Some((_, _, b)) => result.theta_norm < b.theta_norm,
            };
            if better {
                best = Some((kept, hyp, result));
            }
        }
    }
    Ok(best)
}

/// Greedy assignment of the remaining targets, in descending BS-range
/// order, under the accumulated per-UE uniqueness constraints. Each target
/// exhausts its feasible hypotheses over the fixed UE set and commits the
/// residual-minimizing one; a target with no feasible hypothesis is left
/// unlocalized.
#[allow(clippy::too_many_arguments)]
pub fn solve_p6(
    remaining: &[usize],
    m_tilde: &[usize],
    forbidden: &mut Vec<Vec<usize>>,
    range_sets: &RangeSets,
    anchors: &[Point2],
    bs: Point2,
    bs_weight: f64,
    allowed_g: Option<&[Vec<Vec<usize>>]>,
    gn: &GnConfig,
    stats: &mut PhaseTwoStats,
) -> Result<Vec<(usize, Option<(Vec<usize>, LocalizationResult)>)>, AssocError> {
    let mut order: Vec<usize> = remaining.to_vec();
    order.sort_unstable();
    let mut out = Vec::with_capacity(order.len());

    for &k in &order {
        let sizes: Vec<usize> = m_tilde
            .iter()
            .map(|&m| range_sets.d_btu[m].len())
            .collect();
        let allowed: Option<Vec<Vec<usize>>> = allowed_g.map(|per_ue| {
            m_tilde
                .iter()
                .map(|&m| per_ue[m].get(k - 1).cloned().unwrap_or_default())
                .collect()
        });
        let hyps = enumerate_hypotheses(&sizes, forbidden, allowed.as_deref())?;
        stats.hypotheses_evaluated += hyps.len();

        let mut best: Option<(Vec<usize>, LocalizationResult)> = None;
        for hyp in hyps {
            if let Some(res) = solve_p1_for_hypothesis(
                range_sets, anchors, bs, bs_weight, k, m_tilde, &hyp, gn, stats,
            ) {
                let better = match &best {
                    None => true,
                    Some((_, b)) => res.theta_norm < b.theta_norm,
                };
                if better {
                    best = Some((hyp, res));
                }
            }
        }
        match best {
            Some((hyp, res)) => {
                for (pos, &g) in hyp.iter().enumerate() {
                    forbidden[pos].push(g);
                }
                out.push((k, Some((hyp, res))));
            }
            None => out.push((k, None)),
        }
    }
    Ok(out)
}

/// Multi-target localization with joint data association and ineffective-UE
/// removal. `allowed_g`, when present, narrows each UE's per-target
/// association candidates (active mode).
#[allow(clippy::too_many_arguments)]
pub fn localize_multi_target(
    range_sets: &RangeSets,
    anchors: &[Point2],
    bs: Point2,
    bs_weight: f64,
    sel: &SelectionConfig,
    gn: &GnConfig,
    allowed_g: Option<&[Vec<Vec<usize>>]>,
    options: Phase2Options,
    stats: &mut PhaseTwoStats,
) -> Result<AssocSolution, AssocError> {
    let num_targets = range_sets.d_bt.len();
    if num_targets == 0 {
        return Err(AssocError::NoRanges);
    }
    let num_ue = anchors.len();
    if num_ue < 2 {
        return Err(AssocError::UnderDetermined { ues: num_ue });
    }

    let mut positions = vec![None; num_targets];
    let mut residuals = vec![None; num_targets];
    let mut g_rows: Vec<Vec<usize>> = vec![Vec::new(); num_targets];

    if num_targets == 1 {
        let best = best_hypothesis_with_selection(
            range_sets, anchors, bs, bs_weight, 1, allowed_g, sel, gn, options, stats,
        )?;
        let Some((kept, hyp, result)) = best else {
            return Ok(AssocSolution {
                effective_set: Vec::new(),
                g: g_rows,
                positions,
                residuals,
                validated: false,
            });
        };
        positions[0] = Some(result.position);
        residuals[0] = Some(result.theta_norm);
        g_rows[0] = kept.iter().map(|&m| hyp[m]).collect();
        return Ok(AssocSolution {
            effective_set: kept,
            g: g_rows,
            positions,
            residuals,
            validated: true,
        });
    }

    let mut steps: Vec<StepOutcome> = Vec::new();
    let mut accepted: Option<StepOutcome> = None;

    for k in 1..num_targets {
        let best_k = best_hypothesis_with_selection(
            range_sets, anchors, bs, bs_weight, k, allowed_g, sel, gn, options, stats,
        )?;
        let Some((m_tilde, g_full, result)) = best_k else {
            continue;
        };

        if !options.recheck {
            // Trust the first target's UE set unconditionally.
            accepted = Some(StepOutcome {
                target: k,
                m_tilde,
                g_full,
                result,
                next_g: None,
                next_result: None,
            });
            break;
        }

        // Localize target k+1 over the selected UE set, excluding the
        // indices this step already committed.
        let next = k + 1;
        let sizes: Vec<usize> = m_tilde.iter().map(|&m| range_sets.d_btu[m].len()).collect();
        let forbidden: Vec<Vec<usize>> = m_tilde.iter().map(|&m| vec![g_full[m]]).collect();
        let allowed_next: Option<Vec<Vec<usize>>> = allowed_g.map(|per_ue| {
            m_tilde
                .iter()
                .map(|&m| per_ue[m].get(next - 1).cloned().unwrap_or_default())
                .collect()
        });
        let hyps = enumerate_hypotheses(&sizes, &forbidden, allowed_next.as_deref())?;
        stats.hypotheses_evaluated += hyps.len();

        let mut best_next: Option<(Vec<usize>, LocalizationResult)> = None;
        for hyp in hyps {
            if let Some(res) = solve_p1_for_hypothesis(
                range_sets, anchors, bs, bs_weight, next, &m_tilde, &hyp, gn, stats,
            ) {
                let better = match &best_next {
                    None => true,
                    Some((_, b)) => res.theta_norm < b.theta_norm,
                };
                if better {
                    best_next = Some((hyp, res));
                }
            }
        }

        let step = StepOutcome {
            target: k,
            m_tilde,
            g_full,
            result,
            next_g: best_next.as_ref().map(|(h, _)| h.clone()),
            next_result: best_next.map(|(_, r)| r),
        };

        let pass = step
            .next_result
            .as_ref()
            .map(|r| r.theta_norm <= sel.theta_bar_th)
            .unwrap_or(false);
        if pass {
            accepted = Some(step);
            break;
        }
        steps.push(step);
    }

    let validated = accepted.is_some();
    let chosen = match accepted {
        Some(s) => s,
        None => {
            // No step passed: fall back to the lowest-total-residual step.
            let best_idx = steps
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    a.total_residual()
                        .partial_cmp(&b.total_residual())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .map(|(i, _)| i);
            match best_idx {
                Some(i) => steps.swap_remove(i),
                None => {
                    return Ok(AssocSolution {
                        effective_set: Vec::new(),
                        g: g_rows,
                        positions,
                        residuals,
                        validated: false,
                    })
                }
            }
        }
    };

    let k = chosen.target;
    let m_tilde = chosen.m_tilde.clone();
    positions[k - 1] = Some(chosen.result.position);
    residuals[k - 1] = Some(chosen.result.theta_norm);
    g_rows[k - 1] = m_tilde.iter().map(|&m| chosen.g_full[m]).collect();

    let mut forbidden: Vec<Vec<usize>> = m_tilde.iter().map(|&m| vec![chosen.g_full[m]]).collect();
    let mut localized = vec![k];

    if let (Some(ng), Some(nr)) = (&chosen.next_g, &chosen.next_result) {
        let next = k + 1;
        positions[next - 1] = Some(nr.position);
        residuals[next - 1] = Some(nr.theta_norm);
        g_rows[next - 1] = ng.clone();
        for (pos, &g) in ng.iter().enumerate() {
            forbidden[pos].push(g);
        }
        localized.push(next);
    }

    let remaining: Vec<usize> = (1..=num_targets)
        .filter(|t| !localized.contains(t))
        .collect();
    let rest = solve_p6(
        &remaining,
        &m_tilde,
        &mut forbidden,
        range_sets,
        anchors,
        bs,
        bs_weight,
        allowed_g,
        gn,
        stats,
    )?;
    for (t, assigned) in rest {
        if let Some((hyp, res)) = assigned {
            positions[t - 1] = Some(res.position);
            residuals[t - 1] = Some(res.theta_norm);
            g_rows[t - 1] = hyp;
        }
    }

    Ok(AssocSolution {
        effective_set: m_tilde,
        g: g_rows,
        positions,
        residuals,
        validated,
    })
}

/// Active-mode pruning over the sum-path consistency residue
/// `gamma = |D_btu(g) - D_bt(k) - D_ut(e)|`.
///
/// A UE is removed when some target admits no `(g, e)` pair with residue
/// within `gamma_th`; for surviving UEs the per-target association
/// candidates shrink to those `g` that some `e` makes consistent.
pub fn active_prune(range_sets: &RangeSets, cfg: &ActivePruneConfig) -> PruneResult {
    let d_ut = range_sets
        .d_ut_active
        .as_ref()
        .expect("active_prune requires uplink range sets");
    let num_ue = range_sets.d_btu.len();
    let num_targets = range_sets.d_bt.len();

    let mut removed = Vec::new();
    let mut allowed_g = vec![vec![Vec::new(); num_targets]; num_ue];
    let mut gamma_min = vec![vec![f64::INFINITY; num_targets]; num_ue];

    for m in 0..num_ue {
        let btu = &range_sets.d_btu[m];
        let ut = &d_ut[m];
        let mut ineffective = false;
        for k in 0..num_targets {
            let mut best = f64::INFINITY;
            let mut allowed: Vec<usize> = Vec::new();
            for (gi, &dbtu) in btu.iter().enumerate() {
                let mut g_ok = false;
                for &dut in ut.iter() {
                    let gamma = (dbtu - range_sets.d_bt[k] - dut).abs();
                    best = best.min(gamma);
                    if gamma <= cfg.gamma_th {
                        g_ok = true;
                    }
                }
                if g_ok {
                    allowed.push(gi + 1);
                }
            }
            gamma_min[m][k] = best;
            allowed_g[m][k] = allowed;
            if best > cfg.gamma_th {
                ineffective = true;
            }
        }
        if ineffective {
            removed.push(m);
        }
    }

    PruneResult {
        removed_ues: removed,
        allowed_g,
        gamma_min,
    }
}

/// Active-mode multi-target localization: prune the UE pool and the
/// association candidates first, then run the passive driver on what
/// remains.
#[allow(clippy::too_many_arguments)]
pub fn localize_multi_target_active(
    range_sets: &RangeSets,
    anchors: &[Point2],
    bs: Point2,
    bs_weight: f64,
    sel: &SelectionConfig,
    prune_cfg: &ActivePruneConfig,
    gn: &GnConfig,
    options: Phase2Options,
    stats: &mut PhaseTwoStats,
) -> Result<(AssocSolution, PruneResult), AssocError> {
    let prune = active_prune(range_sets, prune_cfg);
    let kept: Vec<usize> = (0..anchors.len())
        .filter(|m| !prune.removed_ues.contains(m))
        .collect();

    let restricted = RangeSets {
        d_bt: range_sets.d_bt.clone(),
        d_btu: kept.iter().map(|&m| range_sets.d_btu[m].clone()).collect(),
        d_ut_active: None,
    };
    let restricted_anchors: Vec<Point2> = kept.iter().map(|&m| anchors[m]).collect();
    let restricted_allowed: Vec<Vec<Vec<usize>>> =
        kept.iter().map(|&m| prune.allowed_g[m].clone()).collect();

    let inner = localize_multi_target(
        &restricted,
        &restricted_anchors,
        bs,
        bs_weight,
        sel,
        gn,
        Some(&restricted_allowed),
        options,
        stats,
    )?;

    // Map restricted indices back onto the original anchor pool.
    let solution = AssocSolution {
        effective_set: inner.effective_set.iter().map(|&i| kept[i]).collect(),
        g: inner.g,
        positions: inner.positions,
        residuals: inner.residuals,
        validated: inner.validated,
    };
    Ok((solution, prune))
}
