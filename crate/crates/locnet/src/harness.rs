//! Monte Carlo experiment runner: per-trial pipeline orchestration,
//! benchmark schemes, metrics, persistence, and sweeps.
//!
//! Every trial is deterministic given `(config, trial_id)`: the trial seed
//! is `base_seed XOR trial_id`, and every random draw (scenario, phases,
//! pilots, per-link noise) comes from a sub-seed derived from it in a fixed
//! order, so passive and active runs over the same base seed share
//! identical scenes and downlink noise.

use crate::assoc::{
    self, ActivePruneConfig, AssocError, Phase2Options, PhaseTwoStats, SelectionConfig,
    MAX_HYPOTHESES,
};
use crate::locate::{gauss_newton_solve, GnConfig, LocalizationProblem};
use crate::ranging::{
    self, assemble_range_sets, RangeSets, StoEstimate, UeDownlinkObservation,
};
use crate::scene::{generate_scenario, true_ranges, Point2, Scenario, ScenarioConfig, TrueRangeTable};
use crate::sparse::{solve_lasso_design, LassoConfig};
use crate::waveform::{
    build_downlink_channel, build_monostatic_channel, build_uplink_self_channel, delay_bin,
    DftDesign, OfdmConfig, PathPhases, Pilot,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io::Write;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV_VAR: &str = "LOCNET_THREADS";

/// Which Phase II variant a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Full two-phase protocol, downlink only.
    #[serde(rename = "proposed_passive")]
    ProposedPassive,
    /// Full protocol plus uplink self-sensing and consistency pruning.
    #[serde(rename = "proposed_active")]
    ProposedActive,
    /// No UE selection: all UEs serve as anchors (single-target benchmark).
    #[serde(rename = "bench_IS")]
    BenchIS,
    /// No STO compensation in Phase I.
    #[serde(rename = "bench_I")]
    BenchI,
    /// No UE selection, association only.
    #[serde(rename = "bench_II")]
    BenchII,
    /// UE set from target 1 accepted without the recheck step.
    #[serde(rename = "bench_III")]
    BenchIII,
    /// Oracle effective set and association: error-probability lower bound.
    #[serde(rename = "bench_IV")]
    BenchIV,
}

impl Scheme {
    pub const ALL: [Scheme; 7] = [
        Scheme::ProposedPassive,
        Scheme::ProposedActive,
        Scheme::BenchIS,
        Scheme::BenchI,
        Scheme::BenchII,
        Scheme::BenchIII,
        Scheme::BenchIV,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scheme::ProposedPassive => "proposed_passive",
            Scheme::ProposedActive => "proposed_active",
            Scheme::BenchIS => "bench_IS",
            Scheme::BenchI => "bench_I",
            Scheme::BenchII => "bench_II",
            Scheme::BenchIII => "bench_III",
            Scheme::BenchIV => "bench_IV",
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .iter()
            .find(|scheme| scheme.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown scheme '{}'", s))
    }
}

/// `[prune]` section: an absent threshold resolves to the quantization
/// budget of the configured numerologies.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PruneSettings {
    pub gamma_th: Option<f64>,
}

/// LASSO defaults tuned for the pipeline's link budget, where the LOS (or
/// self-leakage) tap sits 50-90 dB above the weakest echo: the penalty and
/// the support threshold must both sit far below the dominant tap.
pub fn pipeline_lasso_default() -> LassoConfig {
    LassoConfig {
        lambda_scale: 2e-6,
        support_rel_threshold: 5e-6,
        ..LassoConfig::default()
    }
}

/// Full experiment description; the TOML config file mirrors this struct
/// with one section per module. Unknown keys are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    pub trials: usize,
    pub base_seed: u64,
    /// Error-event radius, meters.
    pub error_radius: f64,
    /// Stop after Phase I (STO experiments); localization metrics are empty.
    pub ranging_only: bool,
    pub scenario: ScenarioConfig,
    pub ofdm_dl: OfdmConfig,
    pub ofdm_ul: Option<OfdmConfig>,
    pub lasso: LassoConfig,
    pub gn: GnConfig,
    pub selection: SelectionConfig,
    pub prune: PruneSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::ProposedPassive,
            trials: 1000,
            base_seed: 1,
            error_radius: 1.0,
            ranging_only: false,
            scenario: ScenarioConfig::default(),
            ofdm_dl: OfdmConfig::downlink_default(),
            ofdm_ul: Some(OfdmConfig::uplink_default()),
            lasso: pipeline_lasso_default(),
            gn: GnConfig::default(),
            selection: SelectionConfig::default(),
            prune: PruneSettings::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be >= 1".into()));
        }
        if !(self.error_radius > 0.0) {
            return Err(HarnessError::Config("error_radius must be positive".into()));
        }
        self.scenario
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.ofdm_dl
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if let Some(ul) = &self.ofdm_ul {
            ul.validate()
                .map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        self.lasso
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.gn
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.scheme == Scheme::ProposedActive && self.ofdm_ul.is_none() {
            return Err(HarnessError::Config(
                "proposed_active requires an [ofdm_ul] section".into(),
            ));
        }
        let hyp_count = (self.scenario.num_targets.max(1) as u128)
            .saturating_pow(self.scenario.num_ue as u32);
        if !self.ranging_only && hyp_count > MAX_HYPOTHESES {
            return Err(HarnessError::TooLarge(format!(
                "association space K^M = {} exceeds {}",
                hyp_count, MAX_HYPOTHESES
            )));
        }
        // Every echo inside the square must land inside the resolvable
        // window, or Phase I would drop links systematically.
        let diag = 2.0_f64.sqrt() * self.scenario.area_side;
        let worst_bin = (self.ofdm_dl.total_bandwidth() * 2.0 * diag
            / self.scenario.speed_of_light)
            .ceil() as usize;
        if worst_bin >= self.ofdm_dl.max_paths {
            return Err(HarnessError::Config(format!(
                "ofdm_dl.max_paths = {} cannot cover round-trip echoes of up to {} samples \
                 inside a {} m square",
                self.ofdm_dl.max_paths, worst_bin, self.scenario.area_side
            )));
        }
        Ok(())
    }

    /// Pruning threshold: explicit value or the quantization budget.
    pub fn resolved_prune(&self) -> Option<ActivePruneConfig> {
        let ul = self.ofdm_ul.as_ref()?;
        Some(match self.prune.gamma_th {
            Some(gamma_th) => ActivePruneConfig { gamma_th },
            None => ActivePruneConfig::quantization_budget(
                &self.ofdm_dl,
                ul,
                self.scenario.speed_of_light,
            ),
        })
    }
}

/// Parse a TOML experiment config, rejecting unknown keys.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, HarnessError> {
    let cfg: ExperimentConfig =
        toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

/// Load and validate a TOML experiment config from disk.
pub fn load_config(path: &std::path::Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::Io)?;
    parse_config(&text)
}

/// Per-trial outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: u64,
    /// Per-target position error (targets ordered by descending true BS
    /// range); `None` when the target was not localized.
    pub position_errors: Vec<Option<f64>>,
    /// Error event per target: unlocalized or error beyond the radius.
    pub error_events: Vec<bool>,
    /// True when every effective UE's STO was estimated exactly.
    pub sto_all_correct: bool,
    /// Phase II wall time, seconds (0 in ranging-only runs).
    pub wall_time_s: f64,
    /// Association hypotheses evaluated in Phase II.
    pub hypothesis_count: usize,
    /// True when the selected UE set equals the effective UEs present in
    /// the anchor pool.
    pub effective_set_correct: bool,
}

impl TrialRecord {
    /// Equality over the deterministic fields (wall time excluded).
    pub fn deterministic_eq(&self, other: &TrialRecord) -> bool {
        self.trial_id == other.trial_id
            && self.position_errors == other.position_errors
            && self.error_events == other.error_events
            && self.sto_all_correct == other.sto_all_correct
            && self.hypothesis_count == other.hypothesis_count
            && self.effective_set_correct == other.effective_set_correct
    }
}

/// Aggregate metrics over a batch of trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub trials: usize,
    /// Total error events over `K * trials`.
    pub localization_error_prob: f64,
    /// Fraction of trials with at least one effective-UE STO misestimated.
    pub sto_error_prob: f64,
    pub mean_wall_time_s: f64,
    pub mean_hypotheses: f64,
}

#[derive(Debug)]
pub enum HarnessError {
    Config(String),
    TooLarge(String),
    Io(std::io::Error),
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "config error: {}", msg),
            HarnessError::TooLarge(msg) => write!(f, "instance too large: {}", msg),
            HarnessError::Io(e) => write!(f, "io error: {}", e),
        }
    }
}

impl std::error::Error for HarnessError {}

#[cfg(not(target_arch = "wasm32"))]
fn wall_clock() -> Option<std::time::Instant> {
    Some(std::time::Instant::now())
}

#[cfg(target_arch = "wasm32")]
fn wall_clock() -> Option<std::time::Instant> {
    None
}

fn elapsed_s(start: Option<std::time::Instant>) -> f64 {
    start.map(|t| t.elapsed().as_secs_f64()).unwrap_or(0.0)
}

/// Sub-seeds derived from the trial seed in a fixed order, so the passive
/// and active pipelines share scenario and downlink randomness.
struct TrialSeeds {
    scenario: u64,
    phases: u64,
    pilot_dl: u64,
    noise_bs: u64,
    noise_dl: Vec<u64>,
    pilot_ul: Vec<u64>,
    noise_ul: Vec<u64>,
}

impl TrialSeeds {
    fn derive(base_seed: u64, trial_id: u64, num_ue: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(base_seed ^ trial_id);
        let scenario = rng.next_u64();
        let phases = rng.next_u64();
        let pilot_dl = rng.next_u64();
        let noise_bs = rng.next_u64();
        let noise_dl = (0..num_ue).map(|_| rng.next_u64()).collect();
        let pilot_ul = (0..num_ue).map(|_| rng.next_u64()).collect();
        let noise_ul = (0..num_ue).map(|_| rng.next_u64()).collect();
        Self {
            scenario,
            phases,
            pilot_dl,
            noise_bs,
            noise_dl,
            pilot_ul,
            noise_ul,
        }
    }
}

/// Phase I output: the anchor pool that survived ranging.
struct PhaseOne {
    /// Scenario UE index per pool slot.
    pool: Vec<usize>,
    sets: RangeSets,
    sto: Vec<StoEstimate>,
    sto_all_correct: bool,
}

fn run_phase_one(cfg: &ExperimentConfig, scn: &Scenario, ranges: &TrueRangeTable, seeds: &TrialSeeds) -> PhaseOne {
    let c0 = cfg.scenario.speed_of_light;
    let dl = &cfg.ofdm_dl;
    let num_ue = cfg.scenario.num_ue;
    let num_targets = cfg.scenario.num_targets;
    let phases = PathPhases::draw(num_ue, num_targets, seeds.phases);
    let pilot_dl = Pilot::qpsk_full(dl.num_subcarriers, seeds.pilot_dl);
    let sqrt_p0 = dl.tx_power.sqrt();

    let bs_support: Vec<usize> = build_monostatic_channel(scn, ranges, &phases, &cfg.scenario, dl)
        .ok()
        .and_then(|ch| crate::waveform::synthesize_rx(&pilot_dl, dl.tx_power, &ch, dl, seeds.noise_bs).ok())
        .map(|rx| {
            let design = DftDesign::new(&pilot_dl, dl.max_paths, dl.num_subcarriers, sqrt_p0);
            solve_lasso_design(&design, &rx.samples, &cfg.lasso).support
        })
        .unwrap_or_default();

    let mut pool = Vec::new();
    let mut ue_obs = Vec::new();
    let mut stos = Vec::new();
    let mut sto_all_correct = true;
    let ext_cols = dl.max_paths + dl.max_abs_sto.unsigned_abs() as usize;

    for m in 0..num_ue {
        let support = build_downlink_channel(scn, ranges, m, &phases, &cfg.scenario, dl)
            .ok()
            .and_then(|ch| {
                crate::waveform::synthesize_rx(&pilot_dl, dl.tx_power, &ch, dl, seeds.noise_dl[m]).ok()
            })
            .map(|rx| {
                let design = DftDesign::new(&pilot_dl, ext_cols, dl.num_subcarriers, sqrt_p0);
                solve_lasso_design(&design, &rx.samples, &cfg.lasso).support
            })
            .unwrap_or_default();

        let Ok(l_bar) = ranging::detect_los_tap(&support) else {
            if scn.ue_effective[m] {
                sto_all_correct = false;
            }
            continue;
        };
        let sto = if cfg.scheme == Scheme::BenchI {
            // No STO compensation: the corrected tap is the raw tap.
            ranging::estimate_sto(l_bar, l_bar)
        } else {
            let predicted = ranging::predicted_los_tap(&scn.bs, &scn.ue_reported[m], dl, c0);
            ranging::estimate_sto(l_bar, predicted)
        };
        if scn.ue_effective[m] && sto.sto_hat != scn.sto[m] {
            sto_all_correct = false;
        }
        let support_without_los: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&l| l as i64 != l_bar)
            .collect();
        if support_without_los.is_empty() {
            continue;
        }
        pool.push(m);
        ue_obs.push(UeDownlinkObservation {
            support_without_los,
            sto,
        });
        stos.push(sto);
    }

    let uplink_supports: Option<Vec<Vec<usize>>> = if cfg.scheme == Scheme::ProposedActive {
        let ul = cfg.ofdm_ul.as_ref().expect("validated: active needs ofdm_ul");
        let sqrt_pm = ul.tx_power.sqrt();
        let ul_cols = ul.max_paths + ul.max_abs_sto.unsigned_abs() as usize;
        Some(
            pool.iter()
                .map(|&m| {
                    let offset = (m % num_ue.max(1)) + 1;
                    let pilot = Pilot::qpsk_comb(ul.num_subcarriers, offset, num_ue, seeds.pilot_ul[m]);
                    build_uplink_self_channel(scn, ranges, m, &phases, &cfg.scenario, ul)
                        .ok()
                        .and_then(|ch| {
                            crate::waveform::synthesize_rx(&pilot, ul.tx_power, &ch, ul, seeds.noise_ul[m]).ok()
                        })
                        .map(|rx| {
                            let design =
                                DftDesign::new(&pilot, ul_cols, ul.num_subcarriers, sqrt_pm);
                            solve_lasso_design(&design, &rx.samples, &cfg.lasso).support
                        })
                        .unwrap_or_default()
                })
                .collect(),
        )
    } else {
        None
    };

    let sets = assemble_range_sets(
        &bs_support,
        &ue_obs,
        uplink_supports.as_deref(),
        dl,
        cfg.ofdm_ul.as_ref(),
        c0,
    );

    PhaseOne {
        pool,
        sets,
        sto: stos,
        sto_all_correct,
    }
}

/// Phase II output in estimated-target order.
struct PhaseTwo {
    positions: Vec<Option<Point2>>,
    selected_pool_slots: Vec<usize>,
    hypotheses: usize,
}

const BS_WEIGHT: f64 = 10.0;

fn run_phase_two(
    cfg: &ExperimentConfig,
    scn: &Scenario,
    ranges: &TrueRangeTable,
    phase1: &PhaseOne,
    truth_order: &[usize],
) -> PhaseTwo {
    let anchors: Vec<Point2> = phase1.pool.iter().map(|&m| scn.ue_reported[m]).collect();
    let sets = &phase1.sets;
    let mut stats = PhaseTwoStats::new();

    let empty = |stats: &PhaseTwoStats| PhaseTwo {
        positions: Vec::new(),
        selected_pool_slots: Vec::new(),
        hypotheses: stats.hypotheses_evaluated,
    };

    match cfg.scheme {
        Scheme::BenchIV => {
            // Oracle association: each true target picks the estimated
            // range closest to its ideal quantized value; anchors are the
            // truly effective pool UEs.
            let c0 = cfg.scenario.speed_of_light;
            let dl = &cfg.ofdm_dl;
            let ndf = dl.total_bandwidth();
            let eff_slots: Vec<usize> = (0..phase1.pool.len())
                .filter(|&i| scn.ue_effective[phase1.pool[i]])
                .collect();
            let nearest = |set: &[f64], ideal: f64| -> Option<f64> {
                set.iter()
                    .copied()
                    .min_by(|a, b| {
                        (a - ideal)
                            .abs()
                            .partial_cmp(&(b - ideal).abs())
                            .expect("finite")
                    })
            };
            let mut positions = Vec::with_capacity(truth_order.len());
            for &k_true in truth_order {
                let d_bt = ranges.d_bt[k_true];
                let ideal_bt =
                    ranging::range_from_monostatic_tap(delay_bin(ndf, 2.0 * d_bt, c0), dl, c0);
                let Some(bs_range) = nearest(&sets.d_bt, ideal_bt) else {
                    positions.push(None);
                    continue;
                };
                let mut ue_anchors = Vec::new();
                for &slot in &eff_slots {
                    let m = phase1.pool[slot];
                    let tau = scn.sto[m];
                    let ideal_btu = ranging::range_from_bistatic_tap(
                        delay_bin(ndf, ranges.d_btu[m][k_true], c0) + tau,
                        tau,
                        dl,
                        c0,
                    )
                    .expect("true tap is non-negative");
                    if let Some(btu) = nearest(&sets.d_btu[slot], ideal_btu) {
                        ue_anchors.push((anchors[slot], btu));
                    }
                }
                let problem = LocalizationProblem {
                    bs: scn.bs,
                    bs_range,
                    ue_anchors,
                    bs_weight: BS_WEIGHT,
                };
                positions.push(gauss_newton_solve(&problem, &cfg.gn).ok().map(|r| r.position));
            }
            PhaseTwo {
                positions,
                selected_pool_slots: eff_slots,
                hypotheses: 0,
            }
        }
        Scheme::ProposedActive => {
            let Some(prune_cfg) = cfg.resolved_prune() else {
                return empty(&stats);
            };
            match assoc::localize_multi_target_active(
                sets,
                &anchors,
                scn.bs,
                BS_WEIGHT,
                &cfg.selection,
                &prune_cfg,
                &cfg.gn,
                Phase2Options::default(),
                &mut stats,
            ) {
                Ok((sol, _prune)) => PhaseTwo {
                    positions: sol.positions,
                    selected_pool_slots: sol.effective_set,
                    hypotheses: stats.hypotheses_evaluated,
                },
                Err(_) => empty(&stats),
            }
        }
        _ => {
            let options = match cfg.scheme {
                Scheme::ProposedPassive | Scheme::BenchI => Phase2Options::default(),
                Scheme::BenchIII => Phase2Options {
                    selection: true,
                    recheck: false,
                },
                Scheme::BenchIS | Scheme::BenchII => Phase2Options {
                    selection: false,
                    recheck: false,
                },
                Scheme::ProposedActive | Scheme::BenchIV => unreachable!(),
            };
            match assoc::localize_multi_target(
                sets,
                &anchors,
                scn.bs,
                BS_WEIGHT,
                &cfg.selection,
                &cfg.gn,
                None,
                options,
                &mut stats,
            ) {
                Ok(sol) => PhaseTwo {
                    positions: sol.positions,
                    selected_pool_slots: sol.effective_set,
                    hypotheses: stats.hypotheses_evaluated,
                },
                Err(AssocError::TooManyHypotheses { .. }) | Err(_) => empty(&stats),
            }
        }
    }
}

/// Run the full pipeline for one trial. Pipeline failures never panic or
/// abort: affected targets are recorded as error events.
pub fn run_trial(cfg: &ExperimentConfig, trial_id: u64) -> TrialRecord {
    let seeds = TrialSeeds::derive(cfg.base_seed, trial_id, cfg.scenario.num_ue);
    let scn = generate_scenario(&cfg.scenario, cfg.ofdm_dl.max_abs_sto, seeds.scenario);
    let ranges = true_ranges(&scn);

    let phase1 = run_phase_one(cfg, &scn, &ranges, &seeds);

    // True targets in descending BS-range order, matching the estimated
    // target indexing convention.
    let mut truth_order: Vec<usize> = (0..cfg.scenario.num_targets).collect();
    truth_order.sort_by(|&a, &b| {
        ranges.d_bt[b]
            .partial_cmp(&ranges.d_bt[a])
            .expect("ranges are finite")
    });

    if cfg.ranging_only {
        return TrialRecord {
            trial_id,
            position_errors: Vec::new(),
            error_events: Vec::new(),
            sto_all_correct: phase1.sto_all_correct,
            wall_time_s: 0.0,
            hypothesis_count: 0,
            effective_set_correct: true,
        };
    }

    let started = wall_clock();
    let phase2 = run_phase_two(cfg, &scn, &ranges, &phase1, &truth_order);
    let wall_time_s = elapsed_s(started);

    let mut position_errors = Vec::with_capacity(truth_order.len());
    let mut error_events = Vec::with_capacity(truth_order.len());
    for (slot, &k_true) in truth_order.iter().enumerate() {
        let err = phase2
            .positions
            .get(slot)
            .copied()
            .flatten()
            .map(|p| p.distance_to(&scn.targets[k_true]));
        let event = err.map(|e| e > cfg.error_radius).unwrap_or(true);
        position_errors.push(err);
        error_events.push(event);
    }

    let selected: std::collections::BTreeSet<usize> = phase2
        .selected_pool_slots
        .iter()
        .map(|&slot| phase1.pool[slot])
        .collect();
    let effective_in_pool: std::collections::BTreeSet<usize> = phase1
        .pool
        .iter()
        .copied()
        .filter(|&m| scn.ue_effective[m])
        .collect();
    let effective_set_correct = selected == effective_in_pool;

    let _ = &phase1.sto;
    TrialRecord {
        trial_id,
        position_errors,
        error_events,
        sto_all_correct: phase1.sto_all_correct,
        wall_time_s,
        hypothesis_count: phase2.hypotheses,
        effective_set_correct,
    }
}

#[cfg(feature = "parallel")]
fn thread_pool() -> &'static rayon::ThreadPool {
    use std::sync::OnceLock;
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Ok(value) = std::env::var(THREADS_ENV_VAR) {
            if let Ok(n) = value.parse::<usize>() {
                if n > 0 {
                    builder = builder.num_threads(n);
                }
            }
        }
        builder.build().expect("worker thread pool")
    })
}

/// Run all trials of one experiment. Parallel when the `parallel` feature
/// is on; records always come back in trial order.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>, HarnessError> {
    cfg.validate()?;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok(thread_pool().install(|| {
            (0..cfg.trials as u64)
                .into_par_iter()
                .map(|t| run_trial(cfg, t))
                .collect()
        }))
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..cfg.trials as u64).map(|t| run_trial(cfg, t)).collect())
    }
}

/// Aggregate a batch of trial records.
pub fn summarize(records: &[TrialRecord]) -> MetricsSummary {
    let trials = records.len();
    let mut events = 0usize;
    let mut slots = 0usize;
    let mut sto_errors = 0usize;
    let mut wall = 0.0;
    let mut hyps = 0usize;
    for r in records {
        events += r.error_events.iter().filter(|&&e| e).count();
        slots += r.error_events.len();
        if !r.sto_all_correct {
            sto_errors += 1;
        }
        wall += r.wall_time_s;
        hyps += r.hypothesis_count;
    }
    MetricsSummary {
        trials,
        localization_error_prob: if slots > 0 { events as f64 / slots as f64 } else { 0.0 },
        sto_error_prob: if trials > 0 { sto_errors as f64 / trials as f64 } else { 0.0 },
        mean_wall_time_s: if trials > 0 { wall / trials as f64 } else { 0.0 },
        mean_hypotheses: if trials > 0 { hyps as f64 / trials as f64 } else { 0.0 },
    }
}

/// Run one experiment and aggregate.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<MetricsSummary, HarnessError> {
    Ok(summarize(&run_trials(cfg)?))
}

/// Sweepable experiment axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    /// Vary the ineffective-UE count at fixed effective count.
    NumIneffective,
    /// Vary the UE count, preserving the ineffective count.
    NumUe,
    /// Vary the uplink bandwidth (Hz), rebuilding the uplink numerology.
    UplinkBandwidth,
    /// Vary the Phase II scheme.
    Scheme,
    /// Vary the BS transmit power (W).
    TxPowerBs,
}

impl std::str::FromStr for SweepAxis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "num_ineffective" => Ok(SweepAxis::NumIneffective),
            "num_ue" => Ok(SweepAxis::NumUe),
            "uplink_bandwidth" => Ok(SweepAxis::UplinkBandwidth),
            "scheme" => Ok(SweepAxis::Scheme),
            "tx_power" => Ok(SweepAxis::TxPowerBs),
            other => Err(format!("unknown sweep axis '{}'", other)),
        }
    }
}

/// One swept value: numeric for the numeric axes, a scheme otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepValue {
    Num(f64),
    Scheme(Scheme),
}

impl std::fmt::Display for SweepValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepValue::Num(v) => {
                if v.fract() == 0.0 && v.abs() < 1e15 {
                    write!(f, "{}", *v as i64)
                } else {
                    write!(f, "{}", v)
                }
            }
            SweepValue::Scheme(s) => f.write_str(s.name()),
        }
    }
}

/// Apply one axis value to a base config.
pub fn apply_axis(
    base: &ExperimentConfig,
    axis: SweepAxis,
    value: SweepValue,
) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = base.clone();
    match (axis, value) {
        (SweepAxis::NumIneffective, SweepValue::Num(v)) => {
            let n = non_negative_count(v, "num_ineffective")?;
            cfg.scenario.num_ue = cfg.scenario.num_effective + n;
        }
        (SweepAxis::NumUe, SweepValue::Num(v)) => {
            let n = non_negative_count(v, "num_ue")?;
            let ineffective = base.scenario.num_ue - base.scenario.num_effective;
            if n < ineffective {
                return Err(HarnessError::Config(format!(
                    "num_ue {} smaller than the configured ineffective count {}",
                    n, ineffective
                )));
            }
            cfg.scenario.num_ue = n;
            cfg.scenario.num_effective = n - ineffective;
        }
        (SweepAxis::UplinkBandwidth, SweepValue::Num(v)) => {
            let prev = base.ofdm_ul.as_ref().ok_or_else(|| {
                HarnessError::Config("uplink_bandwidth sweep requires [ofdm_ul]".into())
            })?;
            let diag = 2.0_f64.sqrt() * base.scenario.area_side;
            cfg.ofdm_ul = Some(OfdmConfig::uplink_for_bandwidth(
                v,
                prev.subcarrier_spacing,
                prev.tx_power,
                prev.noise_power,
                2.0 * diag,
                base.scenario.speed_of_light,
                prev.max_abs_sto,
            ));
        }
        (SweepAxis::Scheme, SweepValue::Scheme(s)) => {
            cfg.scheme = s;
        }
        (SweepAxis::TxPowerBs, SweepValue::Num(v)) => {
            if !(v > 0.0) {
                return Err(HarnessError::Config("tx_power must be positive".into()));
            }
            cfg.ofdm_dl.tx_power = v;
        }
        (axis, value) => {
            return Err(HarnessError::Config(format!(
                "axis {:?} cannot take value {}",
                axis, value
            )));
        }
    }
    Ok(cfg)
}

fn non_negative_count(v: f64, what: &str) -> Result<usize, HarnessError> {
    if v < 0.0 || v.fract() != 0.0 {
        return Err(HarnessError::Config(format!(
            "{} must be a non-negative integer, got {}",
            what, v
        )));
    }
    Ok(v as usize)
}

/// One sweep output row.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub axis_value: SweepValue,
    pub scheme: Scheme,
    pub summary: MetricsSummary,
}

/// Run one summary per axis value.
pub fn run_sweep(
    base: &ExperimentConfig,
    axis: SweepAxis,
    values: &[SweepValue],
) -> Result<Vec<SweepRow>, HarnessError> {
    let mut rows = Vec::with_capacity(values.len());
    for &value in values {
        let cfg = apply_axis(base, axis, value)?;
        let summary = run_monte_carlo(&cfg)?;
        rows.push(SweepRow {
            axis_value: value,
            scheme: cfg.scheme,
            summary,
        });
    }
    Ok(rows)
}

/// Write sweep rows as CSV: probabilities carry six decimal places.
pub fn write_csv<W: Write>(w: &mut W, rows: &[SweepRow]) -> std::io::Result<()> {
    writeln!(
        w,
        "axis_value,scheme,trials,loc_error_prob,sto_error_prob,mean_wall_time_s,mean_hypotheses"
    )?;
    for row in rows {
        writeln!(
            w,
            "{},{},{},{:.6},{:.6},{:.6},{:.3}",
            row.axis_value,
            row.scheme,
            row.summary.trials,
            row.summary.localization_error_prob,
            row.summary.sto_error_prob,
            row.summary.mean_wall_time_s,
            row.summary.mean_hypotheses
        )?;
    }
    Ok(())
}

/// Write one JSON object per trial record.
pub fn write_jsonl<W: Write>(w: &mut W, records: &[TrialRecord]) -> std::io::Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(std::io::Error::other)?;
        writeln!(w, "{}", line)?;
    }
    Ok(())
}
