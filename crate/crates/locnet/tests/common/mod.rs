//! Shared white-box Phase I driver for the integration suites: runs the
//! synthesis -> sparse recovery -> ranging chain through the public API
//! while keeping per-UE ground truth alongside the estimates.

use locnet::ranging::{self, RangeSets, UeDownlinkObservation};
use locnet::scene::{generate_scenario, true_ranges, Scenario, ScenarioConfig, TrueRangeTable};
use locnet::sparse::{solve_lasso_design, LassoConfig};
use locnet::waveform::{
    build_downlink_channel, build_monostatic_channel, build_uplink_self_channel, delay_bin,
    synthesize_rx, DftDesign, OfdmConfig, PathPhases, Pilot,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct UeDetail {
    pub ue: usize,
    pub tau_true: i64,
    pub tau_hat: i64,
    pub los_tap_true: i64,
    pub los_tap_predicted: i64,
    /// Recovered BTU set matches the ideal quantized values and the STO is
    /// exact (and the uplink set matches too, when present).
    pub quantization_exact: bool,
}

pub struct PhaseOneScene {
    pub scn: Scenario,
    pub ranges: TrueRangeTable,
    pub sets: RangeSets,
    /// One entry per surviving pool slot.
    pub pool: Vec<UeDetail>,
}

fn sets_match(got: &[f64], ideal: &mut Vec<f64>) -> bool {
    ideal.sort_by(|a, b| b.partial_cmp(a).unwrap());
    got.len() == ideal.len()
        && got
            .iter()
            .zip(ideal.iter())
            .all(|(a, b)| (a - b).abs() < 1e-9)
}

/// Run Phase I on a freshly generated scene, keeping ground truth.
pub fn run_phase_one_detailed(
    scn_cfg: &ScenarioConfig,
    dl: &OfdmConfig,
    ul: Option<&OfdmConfig>,
    lasso: &LassoConfig,
    seed: u64,
) -> PhaseOneScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scn = generate_scenario(scn_cfg, dl.max_abs_sto, rng.next_u64());
    let ranges = true_ranges(&scn);
    let phases = PathPhases::draw(scn_cfg.num_ue, scn_cfg.num_targets, rng.next_u64());
    let pilot_dl = Pilot::qpsk_full(dl.num_subcarriers, rng.next_u64());
    let c0 = scn_cfg.speed_of_light;
    let ndf = dl.total_bandwidth();
    let sqrt_p0 = dl.tx_power.sqrt();

    let bs_support = {
        let ch = build_monostatic_channel(&scn, &ranges, &phases, scn_cfg, dl).expect("bs channel");
        let rx = synthesize_rx(&pilot_dl, dl.tx_power, &ch, dl, rng.next_u64()).expect("bs rx");
        let design = DftDesign::new(&pilot_dl, dl.max_paths, dl.num_subcarriers, sqrt_p0);
        solve_lasso_design(&design, &rx.samples, lasso).support
    };

    let ext_cols = dl.max_paths + dl.max_abs_sto.unsigned_abs() as usize;
    let mut pool = Vec::new();
    let mut obs = Vec::new();
    let mut uplink_supports: Option<Vec<Vec<usize>>> = ul.map(|_| Vec::new());

    for m in 0..scn_cfg.num_ue {
        let noise_seed = rng.next_u64();
        let ul_noise_seed = rng.next_u64();
        let ul_pilot_seed = rng.next_u64();
        let Ok(ch) = build_downlink_channel(&scn, &ranges, m, &phases, scn_cfg, dl) else {
            continue;
        };
        let rx = synthesize_rx(&pilot_dl, dl.tx_power, &ch, dl, noise_seed).expect("dl rx");
        let design = DftDesign::new(&pilot_dl, ext_cols, dl.num_subcarriers, sqrt_p0);
        let support = solve_lasso_design(&design, &rx.samples, lasso).support;
        let Ok(l_bar) = ranging::detect_los_tap(&support) else {
            continue;
        };
        let predicted = ranging::predicted_los_tap(&scn.bs, &scn.ue_reported[m], dl, c0);
        let sto = ranging::estimate_sto(l_bar, predicted);
        let support_without_los: Vec<usize> = support
            .iter()
            .copied()
            .filter(|&l| l as i64 != l_bar)
            .collect();
        if support_without_los.is_empty() {
            continue;
        }

        let l_true = delay_bin(ndf, scn.bs.distance_to(&scn.ue_true[m]), c0);

        // Ideal quantized values this UE would report with exact recovery
        // and exact STO.
        let mut ideal_btu: Vec<f64> = (0..scn_cfg.num_targets)
            .map(|k| {
                ranging::range_from_bistatic_tap(
                    delay_bin(ndf, ranges.d_btu[m][k], c0) + scn.sto[m],
                    scn.sto[m],
                    dl,
                    c0,
                )
                .expect("non-negative")
            })
            .collect();

        let mut quant_exact = sto.sto_hat == scn.sto[m];

        let ue_uplink = ul.map(|ul_cfg| {
            let stride = scn_cfg.num_ue.max(1);
            let pilot = Pilot::qpsk_comb(ul_cfg.num_subcarriers, (m % stride) + 1, stride, ul_pilot_seed);
            let ch = build_uplink_self_channel(&scn, &ranges, m, &phases, scn_cfg, ul_cfg)
                .expect("ul channel");
            let rx =
                synthesize_rx(&pilot, ul_cfg.tx_power, &ch, ul_cfg, ul_noise_seed).expect("ul rx");
            let cols = ul_cfg.max_paths + ul_cfg.max_abs_sto.unsigned_abs() as usize;
            let design =
                DftDesign::new(&pilot, cols, ul_cfg.num_subcarriers, ul_cfg.tx_power.sqrt());
            solve_lasso_design(&design, &rx.samples, lasso).support
        });

        let single = assemble_single(
            &support_without_los,
            sto,
            ue_uplink.as_deref(),
            dl,
            ul,
            c0,
        );
        quant_exact &= sets_match(&single.0, &mut ideal_btu);
        if let (Some(ul_cfg), Some(got_ut)) = (ul, &single.1) {
            let mut ideal_ut: Vec<f64> = (0..scn_cfg.num_targets)
                .filter_map(|k| {
                    let bin = delay_bin(ul_cfg.total_bandwidth(), 2.0 * ranges.d_ut[m][k], c0);
                    ranging::range_from_uplink_tap(bin, ul_cfg, c0)
                })
                .collect();
            quant_exact &= sets_match(got_ut, &mut ideal_ut);
        }

        pool.push(UeDetail {
            ue: m,
            tau_true: scn.sto[m],
            tau_hat: sto.sto_hat,
            los_tap_true: l_true,
            los_tap_predicted: predicted,
            quantization_exact: quant_exact,
        });
        obs.push(UeDownlinkObservation {
            support_without_los,
            sto,
        });
        if let (Some(all), Some(sup)) = (uplink_supports.as_mut(), ue_uplink) {
            all.push(sup);
        }
    }

    let sets = ranging::assemble_range_sets(
        &bs_support,
        &obs,
        uplink_supports.as_deref(),
        dl,
        ul,
        c0,
    );

    PhaseOneScene {
        scn,
        ranges,
        sets,
        pool,
    }
}

fn assemble_single(
    support_without_los: &[usize],
    sto: ranging::StoEstimate,
    uplink: Option<&[usize]>,
    dl: &OfdmConfig,
    ul: Option<&OfdmConfig>,
    c0: f64,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let uplink_owned: Option<Vec<Vec<usize>>> = uplink.map(|s| vec![s.to_vec()]);
    let one = ranging::assemble_range_sets(
        &[],
        &[UeDownlinkObservation {
            support_without_los: support_without_los.to_vec(),
            sto,
        }],
        uplink_owned.as_deref(),
        dl,
        ul,
        c0,
    );
    (
        one.d_btu.into_iter().next().unwrap(),
        one.d_ut_active.map(|mut v| v.remove(0)),
    )
}

/// Noiseless downlink/scenario pair used across the suites.
pub fn noiseless_dl() -> OfdmConfig {
    OfdmConfig {
        noise_power: 0.0,
        ..OfdmConfig::downlink_default()
    }
}

pub fn pipeline_lasso() -> LassoConfig {
    locnet::harness::pipeline_lasso_default()
}
