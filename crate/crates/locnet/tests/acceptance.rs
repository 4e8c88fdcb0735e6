//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `-- --nocapture` to see them on success).

mod common;

use common::{noiseless_dl, pipeline_lasso, run_phase_one_detailed};
use locnet::assoc::{
    self, ActivePruneConfig, Phase2Options, PhaseTwoStats, SelectionConfig,
};
use locnet::harness::{
    apply_axis, pipeline_lasso_default, run_monte_carlo, run_sweep, ExperimentConfig, Scheme,
    SweepAxis, SweepValue,
};
use locnet::locate::{analytic_jacobian, gauss_newton_solve, GnConfig, LocalizationProblem};
use locnet::oracle;
use locnet::ranging::{self, RangeSets};
use locnet::scene::{Point2, ScenarioConfig};
use locnet::sparse::{solve_lasso, CMatrix, LassoConfig};
use locnet::waveform::OfdmConfig;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

/// Monte Carlo standard error of a proportion, floored at one event.
fn proportion_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt().max(1.0 / n as f64)
}

fn base_cfg() -> ExperimentConfig {
    ExperimentConfig {
        scenario: ScenarioConfig {
            num_ue: 5,
            num_effective: 3,
            num_targets: 2,
            ..ScenarioConfig::default()
        },
        ofdm_dl: noiseless_dl(),
        lasso: pipeline_lasso_default(),
        ..ExperimentConfig::default()
    }
}

#[test]
fn criterion_01_sto_exactness() {
    let started = Instant::now();
    let dl = noiseless_dl(); // 3300 x 120 kHz = 396 MHz, tau_max = 10
    let lasso = pipeline_lasso();
    let cfg = ScenarioConfig {
        num_ue: 4,
        num_effective: 4,
        num_targets: 4,
        ..ScenarioConfig::default()
    };

    let mut total_ues = 0usize;
    let mut matching_bins = 0usize;
    for seed in 0..200u64 {
        let out = run_phase_one_detailed(&cfg, &dl, None, &lasso, 31_000 + seed);
        for detail in &out.pool {
            total_ues += 1;
            if detail.los_tap_predicted == detail.los_tap_true {
                matching_bins += 1;
                assert_eq!(
                    detail.tau_hat, detail.tau_true,
                    "seed {} ue {}: STO must be exact when the predicted LOS bin matches",
                    seed, detail.ue
                );
            }
        }
    }
    let coverage = matching_bins as f64 / total_ues as f64;
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "criterion 1 runtime {:.1}s", elapsed);
    assert!(
        coverage > 0.8,
        "matching-bin coverage unexpectedly low: {:.3}",
        coverage
    );
    println!(
        "acceptance criterion 1 PASS: STO exact on every matching-bin UE \
         ({} UEs, {:.1}% matching bins, {:.1}s)",
        total_ues,
        100.0 * coverage,
        elapsed
    );
}

#[test]
fn criterion_02_sto_error_trend_with_ue_count() {
    let mut base = base_cfg();
    base.ranging_only = true;
    base.trials = 1000;
    base.scenario.num_targets = 4;
    base.scenario.num_ue = 4;
    base.scenario.num_effective = 4;
    base.ofdm_dl.noise_power = 1e-14;

    let values: Vec<SweepValue> = [2.0, 4.0, 6.0, 8.0].map(SweepValue::Num).to_vec();
    let mut curves = Vec::new();
    for power in [15.0, 20.0] {
        let cfg = apply_axis(&base, SweepAxis::TxPowerBs, SweepValue::Num(power)).unwrap();
        let rows = run_sweep(&cfg, SweepAxis::NumUe, &values).unwrap();
        let probs: Vec<f64> = rows.iter().map(|r| r.summary.sto_error_prob).collect();
        curves.push(probs);
    }
    let (p15, p20) = (&curves[0], &curves[1]);

    for probs in [p15, p20] {
        let mut soft_inversions = 0;
        for w in probs.windows(2) {
            let se = proportion_se(w[0], base.trials) + proportion_se(w[1], base.trials);
            assert!(
                w[1] >= w[0] - se,
                "non-monotone beyond 1 MC SE: {:?}",
                probs
            );
            if w[1] < w[0] {
                soft_inversions += 1;
            }
        }
        assert!(soft_inversions <= 1, "more than one inversion: {:?}", probs);
    }
    for (a, b) in p20.iter().zip(p15.iter()) {
        let se = proportion_se(*a, base.trials) + proportion_se(*b, base.trials);
        assert!(a <= &(b + se), "20 W above 15 W: {:?} vs {:?}", p20, p15);
    }
    println!(
        "acceptance criterion 2 PASS: sto_error_prob 15W {:?} / 20W {:?} over M in {{2,4,6,8}}",
        p15, p20
    );
}

#[test]
fn criterion_03_quantization_bounds() {
    let dl = OfdmConfig {
        num_subcarriers: 3300,
        subcarrier_spacing: 120e3,
        ..noiseless_dl()
    };
    let c0 = 299_792_458.0;
    let ndf = dl.total_bandwidth();
    let mono_bound = c0 / (4.0 * ndf);
    let bi_bound = c0 / (2.0 * ndf);

    for base_bin in [0i64, 7, 130] {
        let lo = (base_bin as f64) * c0 / (2.0 * ndf);
        for i in 0..=20_000 {
            let d = lo + (c0 / (2.0 * ndf)) * (i as f64) / 20_000.0;
            let l = (ndf * 2.0 * d / c0).floor() as i64;
            let err = (ranging::range_from_monostatic_tap(l, &dl, c0) - d).abs();
            assert!(err <= mono_bound + 1e-9, "monostatic err {} at d {}", err, d);
        }
    }
    for tau in [-7i64, 0, 9] {
        for i in 0..=20_000 {
            let d = 40.0 + (c0 / ndf) * (i as f64) / 20_000.0;
            let l = (ndf * d / c0).floor() as i64 + tau;
            let err =
                (ranging::range_from_bistatic_tap(l, tau, &dl, c0).unwrap() - d).abs();
            assert!(err <= bi_bound + 1e-9, "bistatic err {} at d {}", err, d);
        }
    }
    println!(
        "acceptance criterion 3 PASS: monostatic error <= {:.4} m, bistatic <= {:.4} m over dense bin scans",
        mono_bound, bi_bound
    );
}

#[test]
fn criterion_04_lasso_kkt_and_support() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let cfg = LassoConfig {
        lambda_scale: 0.1,
        tol: 1e-8,
        max_iter: 50_000,
        support_rel_threshold: 0.1,
    };
    for case in 0..100 {
        let rows = 24;
        let cols = 16;
        let m = CMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        });
        let planted = rng.gen_range(0..cols);
        let mut h = vec![Complex64::new(0.0, 0.0); cols];
        h[planted] = Complex64::from_polar(1.0 + rng.gen::<f64>(), rng.gen::<f64>() * 6.28);
        let y = m.matvec(&h);
        let est = solve_lasso(&m, &y, 1.0, &cfg);
        let kkt = oracle::lasso_kkt_residual(&m, 1.0, &y, &est.coeffs, est.lambda);
        assert!(
            kkt <= 1e-6 * est.lambda,
            "case {}: kkt {} lambda {}",
            case,
            kkt,
            est.lambda
        );
        assert_eq!(est.support, vec![planted], "case {}", case);
    }

    // Orthonormal closed form: matched filter 3.0, lambda 1 -> magnitude 2.
    let eye = CMatrix::from_fn(8, 4, |r, c| {
        if r == c {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut y = vec![Complex64::new(0.0, 0.0); 8];
    y[2] = Complex64::new(3.0, 0.0);
    let est = solve_lasso(
        &eye,
        &y,
        1.0,
        &LassoConfig {
            lambda_scale: 1.0 / 3.0,
            tol: 1e-12,
            ..LassoConfig::default()
        },
    );
    assert!((est.coeffs[2].norm() - 2.0).abs() < 1e-8);
    println!("acceptance criterion 4 PASS: 100 noiseless instances, KKT <= 1e-6*lambda, exact supports");
}

#[test]
fn criterion_05_gauss_newton_accuracy_and_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let gn = GnConfig::default();
    let mut hits = 0usize;
    let total = 500usize;
    let mut produced = 0usize;
    while produced < total {
        let bs = Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0);
        let n_ue = rng.gen_range(2..=4);
        let ues: Vec<Point2> = (0..n_ue)
            .map(|_| Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0))
            .collect();
        // Non-collinearity: transverse spread of the anchor cloud.
        let mut anchors = ues.clone();
        anchors.push(bs);
        let n = anchors.len() as f64;
        let cx = anchors.iter().map(|p| p.x).sum::<f64>() / n;
        let cy = anchors.iter().map(|p| p.y).sum::<f64>() / n;
        let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
        for p in &anchors {
            sxx += (p.x - cx) * (p.x - cx);
            sxy += (p.x - cx) * (p.y - cy);
            syy += (p.y - cy) * (p.y - cy);
        }
        let tr = sxx + syy;
        let det = sxx * syy - sxy * sxy;
        let lambda_min = (tr - (tr * tr - 4.0 * det).max(0.0).sqrt()) / 2.0;
        if lambda_min / n < 25.0 {
            continue; // near-collinear draw
        }
        let target = Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0);
        let bs_range = bs.distance_to(&target);
        let p = LocalizationProblem {
            bs,
            bs_range,
            ue_anchors: ues
                .iter()
                .map(|u| (*u, bs_range + u.distance_to(&target)))
                .collect(),
            bs_weight: 10.0,
        };
        produced += 1;
        let res = gauss_newton_solve(&p, &gn).unwrap();
        if res.position.distance_to(&target) < 1e-6 {
            hits += 1;
        }
    }
    let rate = hits as f64 / total as f64;
    assert!(rate >= 0.99, "exact-recovery rate {}", rate);

    let mut rng = ChaCha8Rng::seed_from_u64(56);
    for _ in 0..100 {
        let p = LocalizationProblem {
            bs: Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0),
            bs_range: 10.0 + rng.gen::<f64>() * 60.0,
            ue_anchors: (0..3)
                .map(|_| {
                    (
                        Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0),
                        20.0 + rng.gen::<f64>() * 100.0,
                    )
                })
                .collect(),
            bs_weight: 10.0,
        };
        let at = Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0);
        let ana = analytic_jacobian(&at, &p);
        let num = oracle::numeric_jacobian(&p, at);
        for (ra, rn) in ana.iter().zip(num.iter()) {
            for axis in 0..2 {
                assert!(
                    (ra[axis] - rn[axis]).abs() / rn[axis].abs().max(1.0) < 1e-5,
                    "jacobian {} vs {}",
                    ra[axis],
                    rn[axis]
                );
            }
        }
    }
    println!(
        "acceptance criterion 5 PASS: {:.1}% of 500 exact geometries within 1e-6 m; jacobian matches FD",
        100.0 * rate
    );
}

#[test]
fn criterion_06_single_target_vs_bench_is() {
    let started = Instant::now();
    let mut base = base_cfg();
    base.trials = 500;
    base.scenario.num_targets = 1;
    base.scenario.num_effective = 4;
    base.scenario.num_ue = 5;

    let values: Vec<SweepValue> = [1.0, 2.0, 3.0, 4.0, 5.0].map(SweepValue::Num).to_vec();
    let proposed = run_sweep(&base, SweepAxis::NumIneffective, &values).unwrap();
    let mut is_cfg = base.clone();
    is_cfg.scheme = Scheme::BenchIS;
    let bench = run_sweep(&is_cfg, SweepAxis::NumIneffective, &values).unwrap();

    let p: Vec<f64> = proposed
        .iter()
        .map(|r| r.summary.localization_error_prob)
        .collect();
    let b: Vec<f64> = bench
        .iter()
        .map(|r| r.summary.localization_error_prob)
        .collect();
    for (i, prob) in p.iter().enumerate() {
        assert!(
            *prob <= 0.05,
            "proposed error {} at {} ineffective UEs",
            prob,
            i + 1
        );
    }
    for i in 1..5 {
        assert!(
            p[i] <= b[i] / 5.0 + 1e-12,
            "at {} ineffective: proposed {} not 5x below bench {}",
            i + 1,
            p[i],
            b[i]
        );
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "criterion 6 runtime {:.1}s", elapsed);
    println!(
        "acceptance criterion 6 PASS: proposed {:?} vs bench_IS {:?} over 1..5 ineffective UEs ({:.1}s)",
        p, b, elapsed
    );
}

#[test]
fn criterion_07_multi_target_benchmark_ordering() {
    let mut base = base_cfg();
    base.trials = 1000;

    let mut err = std::collections::BTreeMap::new();
    for scheme in [
        Scheme::BenchIV,
        Scheme::ProposedPassive,
        Scheme::BenchIII,
        Scheme::BenchII,
        Scheme::BenchI,
    ] {
        let cfg = ExperimentConfig {
            scheme,
            ..base.clone()
        };
        let s = run_monte_carlo(&cfg).unwrap();
        err.insert(scheme.name(), s.localization_error_prob);
    }
    let slots = base.trials * base.scenario.num_targets;
    let tol = |a: f64, b: f64| proportion_se(a, slots) + proportion_se(b, slots);

    let (iv, prop, iii, ii, i_) = (
        err["bench_IV"],
        err["proposed_passive"],
        err["bench_III"],
        err["bench_II"],
        err["bench_I"],
    );
    assert!(iv <= prop + tol(iv, prop), "IV {} vs proposed {}", iv, prop);
    assert!(prop <= iii + tol(prop, iii), "proposed {} vs III {}", prop, iii);
    assert!(iii <= ii + tol(iii, ii), "III {} vs II {}", iii, ii);
    assert!(
        prop <= i_ / 5.0 + proportion_se(i_, slots),
        "proposed {} not 5x below bench_I {}",
        prop,
        i_
    );
    println!(
        "acceptance criterion 7 PASS: IV {:.4} <= proposed {:.4} <= III {:.4} <= II {:.4}, bench_I {:.4}",
        iv, prop, iii, ii, i_
    );
}

#[test]
fn criterion_08_active_mode_gains() {
    let mut base = base_cfg();
    base.trials = 1000;

    let passive = run_monte_carlo(&base).unwrap();

    let mut active20_cfg = base.clone();
    active20_cfg.scheme = Scheme::ProposedActive;
    active20_cfg.ofdm_ul = Some(OfdmConfig {
        noise_power: 0.0,
        ..OfdmConfig::uplink_default()
    });
    let active20 = run_monte_carlo(&active20_cfg).unwrap();

    let active100_cfg =
        apply_axis(&active20_cfg, SweepAxis::UplinkBandwidth, SweepValue::Num(99e6)).unwrap();
    let active100 = run_monte_carlo(&active100_cfg).unwrap();

    let slots = base.trials * base.scenario.num_targets;
    let se = |a: f64, b: f64| proportion_se(a, slots) + proportion_se(b, slots);

    assert!(
        active20.localization_error_prob
            <= passive.localization_error_prob
                + se(active20.localization_error_prob, passive.localization_error_prob),
        "active {} vs passive {}",
        active20.localization_error_prob,
        passive.localization_error_prob
    );
    assert!(
        active20.mean_wall_time_s <= 0.8 * passive.mean_wall_time_s,
        "active wall {} vs passive {}",
        active20.mean_wall_time_s,
        passive.mean_wall_time_s
    );
    assert!(
        active20.mean_hypotheses < passive.mean_hypotheses,
        "hypotheses {} vs {}",
        active20.mean_hypotheses,
        passive.mean_hypotheses
    );

    assert!(
        active100.localization_error_prob
            <= active20.localization_error_prob
                + se(
                    active100.localization_error_prob,
                    active20.localization_error_prob
                ),
        "100 MHz err {} vs 20 MHz err {}",
        active100.localization_error_prob,
        active20.localization_error_prob
    );
    let time_se = active20.mean_wall_time_s * 0.1;
    assert!(
        active100.mean_wall_time_s <= active20.mean_wall_time_s + time_se,
        "100 MHz time {} vs 20 MHz time {}",
        active100.mean_wall_time_s,
        active20.mean_wall_time_s
    );
    println!(
        "acceptance criterion 8 PASS: err passive {:.4} / active20 {:.4} / active100 {:.4}; \
         wall passive {:.2e}s / active20 {:.2e}s / active100 {:.2e}s; \
         hypotheses {:.1} / {:.1} / {:.1}",
        passive.localization_error_prob,
        active20.localization_error_prob,
        active100.localization_error_prob,
        passive.mean_wall_time_s,
        active20.mean_wall_time_s,
        active100.mean_wall_time_s,
        passive.mean_hypotheses,
        active20.mean_hypotheses,
        active100.mean_hypotheses
    );
}

fn random_assignment_scene(
    rng: &mut ChaCha8Rng,
    num_ue: usize,
    num_targets: usize,
) -> (Point2, Vec<Point2>, Vec<Point2>, RangeSets) {
    loop {
        let bs = Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0);
        let ues: Vec<Point2> = (0..num_ue)
            .map(|_| Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0))
            .collect();
        let mut targets: Vec<Point2> = (0..num_targets)
            .map(|_| Point2::new(rng.gen::<f64>() * 100.0, rng.gen::<f64>() * 100.0))
            .collect();
        targets.sort_by(|a, b| {
            bs.distance_to(b)
                .partial_cmp(&bs.distance_to(a))
                .unwrap()
        });
        let d_bt: Vec<f64> = targets.iter().map(|t| bs.distance_to(t)).collect();
        // Distinct BS ranges keep the target indexing unambiguous.
        if d_bt.windows(2).any(|w| (w[0] - w[1]).abs() < 1.0) {
            continue;
        }
        let d_btu: Vec<Vec<f64>> = ues
            .iter()
            .map(|u| {
                let mut v: Vec<f64> = targets
                    .iter()
                    .zip(d_bt.iter())
                    .map(|(t, bt)| bt + u.distance_to(t))
                    .collect();
                v.sort_by(|a, b| b.partial_cmp(a).unwrap());
                v
            })
            .collect();
        return (
            bs,
            ues,
            targets,
            RangeSets {
                d_bt,
                d_btu,
                d_ut_active: None,
            },
        );
    }
}

#[test]
fn criterion_09_combinatorial_invariants() {
    // Unconstrained count equals K^M; constraints shrink it monotonically.
    for (k, m) in [(2usize, 3usize), (3, 4), (4, 3)] {
        let sizes = vec![k; m];
        let unconstrained =
            assoc::enumerate_hypotheses(&sizes, &vec![Vec::new(); m], None).unwrap();
        assert_eq!(unconstrained.len(), k.pow(m as u32));
        let mut forbidden = vec![Vec::new(); m];
        let mut last = unconstrained.len();
        for level in 1..k {
            for f in forbidden.iter_mut() {
                f.push(level);
            }
            let narrowed = assoc::enumerate_hypotheses(&sizes, &forbidden, None).unwrap();
            assert!(narrowed.len() <= last);
            last = narrowed.len();
        }
    }

    // Greedy P6 vs exhaustive assignment over 200 noiseless scenes, and the
    // Algorithm 1 solve-count bound on every instrumented run.
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let gn = GnConfig::default();
    let mut matches = 0usize;
    let scenes = 200usize;
    for _ in 0..scenes {
        let num_targets = rng.gen_range(2..=3);
        let num_ue = rng.gen_range(3..=4);
        let (bs, ues, _targets, sets) = random_assignment_scene(&mut rng, num_ue, num_targets);

        let mut stats = PhaseTwoStats::new();
        let mut forbidden = vec![Vec::new(); num_ue];
        let all_targets: Vec<usize> = (1..=num_targets).collect();
        let m_tilde: Vec<usize> = (0..num_ue).collect();
        let greedy = assoc::solve_p6(
            &all_targets,
            &m_tilde,
            &mut forbidden,
            &sets,
            &ues,
            bs,
            10.0,
            None,
            &gn,
            &mut stats,
        )
        .unwrap();
        let exhaustive = oracle::exhaustive_assignment(
            bs,
            &sets.d_bt,
            &ues,
            &sets.d_btu,
            &vec![Vec::new(); num_ue],
            10.0,
            &gn,
        )
        .unwrap();
        let greedy_assignment: Vec<Vec<usize>> = greedy
            .iter()
            .map(|(_, a)| a.as_ref().unwrap().0.clone())
            .collect();
        if greedy_assignment == exhaustive.0 {
            matches += 1;
        }
    }
    let rate = matches as f64 / scenes as f64;
    assert!(rate >= 0.95, "greedy-vs-exhaustive match rate {}", rate);

    // Instrumented Algorithm 1 runs stay within (M-2)(M+3)/2 solves.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..50 {
        let (bs, ues, _targets, sets) = random_assignment_scene(&mut rng, 4, 2);
        let mut stats = PhaseTwoStats::new();
        let _ = assoc::localize_multi_target(
            &sets,
            &ues,
            bs,
            10.0,
            &SelectionConfig::default(),
            &gn,
            None,
            Phase2Options::default(),
            &mut stats,
        )
        .unwrap();
        assert!(stats.selection_within_bound);
    }
    println!(
        "acceptance criterion 9 PASS: counts = K^M, monotone shrinkage, greedy matches exhaustive in {:.1}%, selection bound held",
        100.0 * rate
    );
}

#[test]
fn criterion_10_identities_and_prune_safety() {
    // Sum identity and derived-range identity to machine precision.
    let cfg = ScenarioConfig {
        num_ue: 5,
        num_effective: 3,
        num_targets: 2,
        ..ScenarioConfig::default()
    };
    for seed in 0..50u64 {
        let scn = locnet::scene::generate_scenario(&cfg, 10, seed);
        let r = locnet::scene::true_ranges(&scn);
        for m in 0..cfg.num_ue {
            for k in 0..cfg.num_targets {
                assert_eq!(r.d_btu[m][k], r.d_bt[k] + r.d_ut[m][k]);
                assert_eq!(ranging::ut_from_btu(r.d_btu[m][k], r.d_bt[k]), r.d_ut[m][k]);
            }
        }
    }

    // Prune safety: with gamma_th = bin_dl + bin_ul, no quantization-exact
    // effective UE is ever flagged ineffective.
    let dl = noiseless_dl();
    let ul = OfdmConfig {
        noise_power: 0.0,
        ..OfdmConfig::uplink_default()
    };
    let lasso = pipeline_lasso();
    let prune_cfg = ActivePruneConfig::quantization_budget(&dl, &ul, cfg.speed_of_light);
    let mut protected = 0usize;
    for seed in 0..500u64 {
        let out = run_phase_one_detailed(&cfg, &dl, Some(&ul), &lasso, 90_000 + seed);
        if out.sets.d_bt.len() != cfg.num_targets {
            continue;
        }
        let prune = assoc::active_prune(&out.sets, &prune_cfg);
        for (slot, detail) in out.pool.iter().enumerate() {
            if out.scn.ue_effective[detail.ue] && detail.quantization_exact {
                protected += 1;
                assert!(
                    !prune.removed_ues.contains(&slot),
                    "seed {}: quantization-exact effective UE {} pruned (gamma_min {:?})",
                    seed,
                    detail.ue,
                    prune.gamma_min[slot]
                );
            }
        }
    }
    assert!(protected > 500, "too few quantization-exact UEs: {}", protected);
    println!(
        "acceptance criterion 10 PASS: identities exact; {} quantization-exact effective UEs, none pruned",
        protected
    );
}
