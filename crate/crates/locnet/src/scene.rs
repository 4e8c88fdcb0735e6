//! Random scenario generation and exact geometric ground truth.
//!
//! A scenario places one BS, `M` UEs, and `K` passive targets uniformly in a
//! square area. Each UE carries a GPS-reported position (true position plus a
//! zero-mean Gaussian error whose variance depends on whether the UE is
//! effective) and an integer sampling timing offset relative to the BS clock.

use crate::util::gauss_pair;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Minimum target-anchor (and BS-UE) separation enforced at generation time,
/// so path gains stay finite.
pub const MIN_SEPARATION_M: f64 = 1.0;

/// A 2D point in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Euclidean distance to another point.
    pub fn distance_to(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Parameters controlling scenario generation and the link budget.
///
/// Variances expressed in dBm² convert to m² as `10^(x/10)`; the same
/// conversion maps the RCS from dBm² to an effective scattering area.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Side length of the square deployment area, meters.
    pub area_side: f64,
    /// Number of UEs, M.
    pub num_ue: usize,
    /// Number of targets, K.
    pub num_targets: usize,
    /// Number of effective UEs (the first `num_effective` UEs are effective).
    pub num_effective: usize,
    /// Per-axis GPS error variance for effective UEs, dBm².
    pub gps_sigma_effective: f64,
    /// Per-axis GPS error variance for ineffective UEs, dBm².
    pub gps_sigma_ineffective: f64,
    /// Target radar cross section, dBm².
    pub rcs: f64,
    /// Path loss at the reference distance, dB.
    pub pathloss_ref_db: f64,
    /// Reference distance d0, meters.
    pub pathloss_ref_dist: f64,
    /// Path loss exponent.
    pub pathloss_exponent: f64,
    /// Speed of light, m/s.
    pub speed_of_light: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            area_side: 100.0,
            num_ue: 5,
            num_targets: 2,
            num_effective: 3,
            gps_sigma_effective: -20.0,
            gps_sigma_ineffective: 20.0,
            rcs: -10.0,
            pathloss_ref_db: -20.0,
            pathloss_ref_dist: 1.0,
            pathloss_exponent: 2.0,
            speed_of_light: 299_792_458.0,
        }
    }
}

impl ScenarioConfig {
    /// Check the structural invariants of the configuration.
    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.area_side > 0.0) {
            return Err(SceneError::InvalidConfig("area_side must be positive"));
        }
        if self.num_effective > self.num_ue {
            return Err(SceneError::InvalidConfig(
                "num_effective must not exceed num_ue",
            ));
        }
        if !(self.pathloss_exponent > 0.0) {
            return Err(SceneError::InvalidConfig(
                "pathloss_exponent must be positive",
            ));
        }
        if !(self.pathloss_ref_dist > 0.0) {
            return Err(SceneError::InvalidConfig(
                "pathloss_ref_dist must be positive",
            ));
        }
        if !(self.speed_of_light > 0.0) {
            return Err(SceneError::InvalidConfig(
                "speed_of_light must be positive",
            ));
        }
        Ok(())
    }

    /// Per-axis GPS error variance in m² for UE `m`.
    pub fn gps_variance_m2(&self, effective: bool) -> f64 {
        let dbm2 = if effective {
            self.gps_sigma_effective
        } else {
            self.gps_sigma_ineffective
        };
        10f64.powf(dbm2 / 10.0)
    }
}

/// One generated deployment: true and reported geometry plus per-UE STOs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub bs: Point2,
    pub ue_true: Vec<Point2>,
    pub ue_reported: Vec<Point2>,
    pub ue_effective: Vec<bool>,
    pub targets: Vec<Point2>,
    /// Sampling timing offset of each UE, in downlink OFDM sample periods.
    pub sto: Vec<i64>,
}

/// Exact Euclidean ranges between the generated nodes.
///
/// `d_btu[m][k] = d_bt[k] + d_ut[m][k]` holds identically by construction.
#[derive(Debug, Clone)]
pub struct TrueRangeTable {
    /// BS-target ranges, indexed by target.
    pub d_bt: Vec<f64>,
    /// UE-target ranges, indexed `[ue][target]`.
    pub d_ut: Vec<Vec<f64>>,
    /// BS-target-UE path lengths, indexed `[ue][target]`.
    pub d_btu: Vec<Vec<f64>>,
}

/// Errors from scenario construction and gain evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum SceneError {
    InvalidConfig(&'static str),
    /// A path gain was requested for a non-positive distance.
    DegenerateGeometry,
}

impl std::fmt::Display for SceneError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SceneError::InvalidConfig(msg) => write!(f, "invalid scenario config: {}", msg),
            SceneError::DegenerateGeometry => {
                write!(f, "degenerate geometry: zero-length propagation path")
            }
        }
    }
}

impl std::error::Error for SceneError {}

/// Generate a random scenario. Positions are i.i.d. uniform over the square;
/// the draw is rejected and repeated while any target-anchor or BS-UE distance
/// falls below [`MIN_SEPARATION_M`]. GPS errors are zero-mean isotropic
/// Gaussian with per-axis variance taken from the UE's effectiveness class,
/// and STOs are uniform integers in `[-tau_max, tau_max]`.
///
/// Deterministic given `(config, tau_max, seed)`.
pub fn generate_scenario(config: &ScenarioConfig, tau_max: i64, seed: u64) -> Scenario {
    assert!(config.validate().is_ok(), "scenario config must be valid");
    assert!(tau_max >= 0, "tau_max must be non-negative");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let draw_point = |rng: &mut ChaCha8Rng| Point2 {
        x: rng.gen::<f64>() * config.area_side,
        y: rng.gen::<f64>() * config.area_side,
    };

    let (bs, ue_true, targets) = loop {
        let bs = draw_point(&mut rng);
        let ue_true: Vec<Point2> = (0..config.num_ue).map(|_| draw_point(&mut rng)).collect();
        let targets: Vec<Point2> = (0..config.num_targets)
            .map(|_| draw_point(&mut rng))
            .collect();

        let anchors_ok = targets.iter().all(|t| {
            bs.distance_to(t) >= MIN_SEPARATION_M
                && ue_true.iter().all(|u| u.distance_to(t) >= MIN_SEPARATION_M)
        });
        let los_ok = ue_true
            .iter()
            .all(|u| bs.distance_to(u) >= MIN_SEPARATION_M);
        if anchors_ok && los_ok {
            break (bs, ue_true, targets);
        }
    };

    let ue_effective: Vec<bool> = (0..config.num_ue)
        .map(|m| m < config.num_effective)
        .collect();

    let ue_reported: Vec<Point2> = ue_true
        .iter()
        .zip(ue_effective.iter())
        .map(|(u, &eff)| {
            let sigma = config.gps_variance_m2(eff).sqrt();
            let (gx, gy) = gauss_pair(&mut rng);
            Point2::new(u.x + sigma * gx, u.y + sigma * gy)
        })
        .collect();

    let sto: Vec<i64> = (0..config.num_ue)
        .map(|_| rng.gen_range(-tau_max..=tau_max))
        .collect();

    Scenario {
        bs,
        ue_true,
        ue_reported,
        ue_effective,
        targets,
        sto,
    }
}

/// Exact ranges between the true positions. `d_btu` is formed as the sum
/// `d_bt + d_ut` so the sum identity holds to the last bit.
pub fn true_ranges(s: &Scenario) -> TrueRangeTable {
    let d_bt: Vec<f64> = s.targets.iter().map(|a| s.bs.distance_to(a)).collect();
    let d_ut: Vec<Vec<f64>> = s
        .ue_true
        .iter()
        .map(|u| s.targets.iter().map(|a| u.distance_to(a)).collect())
        .collect();
    let d_btu: Vec<Vec<f64>> = d_ut
        .iter()
        .map(|row: &Vec<f64>| row.iter().zip(d_bt.iter()).map(|(ut, bt)| bt + ut).collect())
        .collect();
    TrueRangeTable { d_bt, d_ut, d_btu }
}

/// One-way path gain `10^(beta0/10) * (d/d0)^(-alpha)` (linear power).
pub fn path_gain(d: f64, config: &ScenarioConfig) -> Result<f64, SceneError> {
    if !(d > 0.0) {
        return Err(SceneError::DegenerateGeometry);
    }
    let beta0 = 10f64.powf(config.pathloss_ref_db / 10.0);
    Ok(beta0 * (d / config.pathloss_ref_dist).powf(-config.pathloss_exponent))
}

/// Cascaded gain of a two-hop echo path: the product of both hop gains and
/// the linear RCS.
pub fn cascaded_gain(d1: f64, d2: f64, config: &ScenarioConfig) -> Result<f64, SceneError> {
    let rcs_lin = 10f64.powf(config.rcs / 10.0);
    Ok(path_gain(d1, config)? * rcs_lin * path_gain(d2, config)?)
}
