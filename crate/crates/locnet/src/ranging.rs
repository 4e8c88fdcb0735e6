//! Range extraction from recovered tap supports, with sampling-timing-offset
//! correction: the whole of Phase I's arithmetic.
//!
//! Range sets are stored in descending order so that a 1-based index `b`
//! retrieves the b-th largest element, matching the association convention.

use crate::scene::Point2;
use crate::waveform::OfdmConfig;

/// STO estimate for one UE: observed minus predicted LOS tap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoEstimate {
    pub los_tap_observed: i64,
    pub los_tap_predicted: i64,
    pub sto_hat: i64,
}

/// Per-anchor estimated-range collections, each sorted descending.
#[derive(Debug, Clone, Default)]
pub struct RangeSets {
    /// BS-target ranges.
    pub d_bt: Vec<f64>,
    /// BS-target-UE ranges per UE (index-aligned with the anchor pool).
    pub d_btu: Vec<Vec<f64>>,
    /// UE-target ranges per UE from uplink self-sensing; present only in
    /// active mode.
    pub d_ut_active: Option<Vec<Vec<f64>>>,
}

/// The b-th largest element of a descending-sorted set (`b` is 1-based).
pub fn nth_largest(set: &[f64], b: usize) -> f64 {
    set[b - 1]
}

#[derive(Debug, Clone, PartialEq)]
pub enum RangingError {
    /// The downlink support was empty: no direct path detected.
    NoLosDetected,
}

impl std::fmt::Display for RangingError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RangingError::NoLosDetected => write!(f, "no LOS tap detected in downlink support"),
        }
    }
}

impl std::error::Error for RangingError {}

/// Monostatic range from a round-trip tap: `l*c0/(2*N*df) + c0/(4*N*df)`.
pub fn range_from_monostatic_tap(l: i64, cfg: &OfdmConfig, c0: f64) -> f64 {
    debug_assert!(l >= 0);
    let ndf = cfg.total_bandwidth();
    (l as f64) * c0 / (2.0 * ndf) + c0 / (4.0 * ndf)
}

/// Predicted LOS tap from the reported UE position:
/// `floor(N*df*||b - u_hat|| / c0)`.
pub fn predicted_los_tap(bs: &Point2, ue_reported: &Point2, cfg: &OfdmConfig, c0: f64) -> i64 {
    let ndf = cfg.total_bandwidth();
    (ndf * bs.distance_to(ue_reported) / c0).floor() as i64
}

/// The direct path is the minimum element of the support.
pub fn detect_los_tap(support: &[usize]) -> Result<i64, RangingError> {
    support
        .iter()
        .min()
        .map(|&l| l as i64)
        .ok_or(RangingError::NoLosDetected)
}

/// STO estimate: observed LOS tap minus predicted LOS tap.
pub fn estimate_sto(los_tap_observed: i64, los_tap_predicted: i64) -> StoEstimate {
    StoEstimate {
        los_tap_observed,
        los_tap_predicted,
        sto_hat: los_tap_observed - los_tap_predicted,
    }
}

/// Bistatic range from an extended tap after STO correction:
/// `(l - sto_hat)*c0/(N*df) + c0/(2*N*df)`. Returns `None` when the
/// corrected tap is negative; such measurements are discarded.
pub fn range_from_bistatic_tap(l: i64, sto_hat: i64, cfg: &OfdmConfig, c0: f64) -> Option<f64> {
    let corrected = l - sto_hat;
    if corrected < 0 {
        return None;
    }
    let ndf = cfg.total_bandwidth();
    Some((corrected as f64) * c0 / ndf + c0 / (2.0 * ndf))
}

/// Uplink self-sensing range (monostatic form at uplink numerology, no STO
/// since the UE is synchronous with itself). Tap 0 is the self-leakage and
/// is excluded.
pub fn range_from_uplink_tap(l: i64, cfg_ul: &OfdmConfig, c0: f64) -> Option<f64> {
    if l < 1 {
        return None;
    }
    let ndf = cfg_ul.total_bandwidth();
    Some((l as f64) * c0 / (2.0 * ndf) + c0 / (4.0 * ndf))
}

/// UE-target range derived from the sum-path identity:
/// `d_ut = d_btu - d_bt`. A non-positive result signals infeasible geometry
/// for the hypothesis that paired the two ranges; callers penalize rather
/// than abort.
pub fn ut_from_btu(d_btu_hat: f64, d_bt_hat: f64) -> f64 {
    d_btu_hat - d_bt_hat
}

/// One UE's downlink observation, ready for range assembly: the support
/// with the LOS tap already removed, plus the STO estimate.
#[derive(Debug, Clone)]
pub struct UeDownlinkObservation {
    pub support_without_los: Vec<usize>,
    pub sto: StoEstimate,
}

/// Assemble the per-anchor range sets, each sorted descending. UE sets are
/// index-aligned with `ue_obs` (and with `uplink_supports` when given).
pub fn assemble_range_sets(
    bs_support: &[usize],
    ue_obs: &[UeDownlinkObservation],
    uplink_supports: Option<&[Vec<usize>]>,
    cfg_dl: &OfdmConfig,
    cfg_ul: Option<&OfdmConfig>,
    c0: f64,
) -> RangeSets {
    let sort_desc = |v: &mut Vec<f64>| {
        v.sort_by(|a, b| b.partial_cmp(a).expect("ranges are finite"));
    };

    let mut d_bt: Vec<f64> = bs_support
        .iter()
        .map(|&l| range_from_monostatic_tap(l as i64, cfg_dl, c0))
        .collect();
    sort_desc(&mut d_bt);

    let mut d_btu: Vec<Vec<f64>> = ue_obs
        .iter()
        .map(|obs| {
            let mut v: Vec<f64> = obs
                .support_without_los
                .iter()
                .filter_map(|&l| range_from_bistatic_tap(l as i64, obs.sto.sto_hat, cfg_dl, c0))
                .collect();
            sort_desc(&mut v);
            v
        })
        .collect();
    for v in &mut d_btu {
        v.retain(|&d| d > 0.0);
    }

    let d_ut_active = uplink_supports.map(|supports| {
        let ul = cfg_ul.expect("uplink config required with uplink supports");
        supports
            .iter()
            .map(|sup| {
                let mut v: Vec<f64> = sup
                    .iter()
                    .filter_map(|&l| range_from_uplink_tap(l as i64, ul, c0))
                    .collect();
                sort_desc(&mut v);
                v
            })
            .collect()
    });

    RangeSets {
        d_bt,
        d_btu,
        d_ut_active,
    }
}
