//! Quantized delay-tap channels for the three link types and noisy
//! frequency-domain received vectors.
//!
//! Synthesis works directly in the frequency domain: with a cyclic prefix
//! longer than the channel spread the circular model is exact, so the
//! received vector is `sqrt(p) * diag(pilot) * G * h + noise` with `G` a
//! partial DFT dictionary. Downlink channels seen by a UE are "extended"
//! (Eq.-(16)-style): every tap index is shifted by the UE's sampling timing
//! offset so the observation model itself is offset-free.

use crate::scene::{cascaded_gain, path_gain, Scenario, ScenarioConfig, TrueRangeTable};
use crate::sparse::{CMatrix, LassoDesign};
use crate::util::{complex_noise, qpsk};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Linear power gain of the transceiver self-leakage tap in an uplink
/// self-sensing channel (tap 0). Kept well above the echo floor but far
/// below a physical direct leak so the echoes stay recoverable by a single
/// sparse solve.
pub const SELF_LEAKAGE_GAIN_DB: f64 = -40.0;

/// OFDM numerology and link budget for one band.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OfdmConfig {
    /// Number of sub-carriers N.
    pub num_subcarriers: usize,
    /// Sub-carrier spacing, Hz.
    pub subcarrier_spacing: f64,
    /// Cyclic prefix length, samples. Must exceed `max_paths + max_abs_sto`.
    pub cp_len: usize,
    /// Transmit power, watts.
    pub tx_power: f64,
    /// Per-sample complex noise power, watts.
    pub noise_power: f64,
    /// Maximum number of resolvable paths, L.
    pub max_paths: usize,
    /// Maximum absolute sampling timing offset, samples.
    pub max_abs_sto: i64,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self::downlink_default()
    }
}

impl OfdmConfig {
    /// 400 MHz-class downlink: 3300 sub-carriers at 120 kHz spacing. The
    /// resolvable-path window covers every round-trip echo inside a 100 m
    /// square (up to ~283 m of path, 374 samples at this bandwidth).
    pub fn downlink_default() -> Self {
        Self {
            num_subcarriers: 3300,
            subcarrier_spacing: 120e3,
            cp_len: 400,
            tx_power: 20.0,
            noise_power: 1e-14,
            max_paths: 380,
            max_abs_sto: 10,
        }
    }

    /// Uplink numerology for a given bandwidth. The resolvable-path count is
    /// sized from the worst-case round-trip path inside the deployment area.
    pub fn uplink_for_bandwidth(
        bandwidth_hz: f64,
        spacing_hz: f64,
        tx_power: f64,
        noise_power: f64,
        max_round_trip_m: f64,
        c0: f64,
        eps_max: i64,
    ) -> Self {
        let n = (bandwidth_hz / spacing_hz).round() as usize;
        let max_paths = ((n as f64) * spacing_hz * max_round_trip_m / c0).ceil() as usize + 3;
        Self {
            num_subcarriers: n,
            subcarrier_spacing: spacing_hz,
            cp_len: max_paths + eps_max as usize + 10,
            tx_power,
            noise_power,
            max_paths,
            max_abs_sto: eps_max,
        }
    }

    /// 20 MHz-class uplink over a 100 m square: 660 sub-carriers at 30 kHz.
    pub fn uplink_default() -> Self {
        Self::uplink_for_bandwidth(19.8e6, 30e3, 2.0, 1e-14, 2.0 * 141.5, 299_792_458.0, 20)
    }

    /// Occupied bandwidth `N * delta_f`, Hz.
    pub fn total_bandwidth(&self) -> f64 {
        self.num_subcarriers as f64 * self.subcarrier_spacing
    }

    pub fn validate(&self) -> Result<(), WaveformError> {
        let spread = self.max_paths + self.max_abs_sto.unsigned_abs() as usize;
        if self.cp_len <= spread {
            return Err(WaveformError::InvalidConfig(
                "cp_len must exceed max_paths + max_abs_sto",
            ));
        }
        if self.num_subcarriers < spread {
            return Err(WaveformError::InvalidConfig(
                "num_subcarriers must cover max_paths + max_abs_sto",
            ));
        }
        if !(self.subcarrier_spacing > 0.0) {
            return Err(WaveformError::InvalidConfig(
                "subcarrier_spacing must be positive",
            ));
        }
        if !(self.tx_power > 0.0) {
            return Err(WaveformError::InvalidConfig("tx_power must be positive"));
        }
        if self.noise_power < 0.0 {
            return Err(WaveformError::InvalidConfig(
                "noise_power must be non-negative",
            ));
        }
        if self.max_abs_sto < 0 {
            return Err(WaveformError::InvalidConfig(
                "max_abs_sto must be non-negative",
            ));
        }
        Ok(())
    }
}

/// Which physical link a tap vector describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    MonostaticBs,
    DownlinkExtended,
    UplinkSelfExtended,
}

/// Complex delay-tap vector for one link. Extended kinds have length
/// `max_paths + max_abs_sto`; the monostatic channel has length `max_paths`.
#[derive(Debug, Clone)]
pub struct TapChannel {
    pub taps: Vec<Complex64>,
    pub kind: ChannelKind,
}

impl TapChannel {
    /// Indices of the non-zero taps, ascending.
    pub fn nonzero_indices(&self) -> Vec<usize> {
        self.taps
            .iter()
            .enumerate()
            .filter(|(_, z)| z.norm() > 0.0)
            .map(|(i, _)| i)
            .collect()
    }
}

/// Per-path phase draws for one trial. Paths keep constant taps within an
/// OFDM symbol; phases are redrawn per trial.
#[derive(Debug, Clone)]
pub struct PathPhases {
    pub monostatic: Vec<f64>,
    pub downlink_los: Vec<f64>,
    pub downlink_targets: Vec<Vec<f64>>,
    pub uplink_self: Vec<f64>,
    pub uplink_targets: Vec<Vec<f64>>,
}

impl PathPhases {
    pub fn draw(num_ue: usize, num_targets: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let angle = |rng: &mut ChaCha8Rng| {
            use rand::Rng;
            rng.gen::<f64>() * 2.0 * std::f64::consts::PI
        };
        let monostatic = (0..num_targets).map(|_| angle(&mut rng)).collect();
        let downlink_los = (0..num_ue).map(|_| angle(&mut rng)).collect();
        let downlink_targets = (0..num_ue)
            .map(|_| (0..num_targets).map(|_| angle(&mut rng)).collect())
            .collect();
        let uplink_self = (0..num_ue).map(|_| angle(&mut rng)).collect();
        let uplink_targets = (0..num_ue)
            .map(|_| (0..num_targets).map(|_| angle(&mut rng)).collect())
            .collect();
        Self {
            monostatic,
            downlink_los,
            downlink_targets,
            uplink_self,
            uplink_targets,
        }
    }
}

/// Occupied sub-carrier rows (1-based, absolute) with their unit-power
/// pilot symbols.
#[derive(Debug, Clone)]
pub struct Pilot {
    pub rows: Vec<usize>,
    pub symbols: Vec<Complex64>,
}

impl Pilot {
    /// Random QPSK pilot occupying every sub-carrier.
    pub fn qpsk_full(n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            rows: (1..=n).collect(),
            symbols: (0..n).map(|_| qpsk(&mut rng)).collect(),
        }
    }

    /// Random QPSK pilot on the comb `{offset, offset + stride, ...}`.
    pub fn qpsk_comb(n: usize, offset: usize, stride: usize, seed: u64) -> Self {
        assert!(offset >= 1 && offset <= n && stride >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<usize> = (offset..=n).step_by(stride).collect();
        let symbols = rows.iter().map(|_| qpsk(&mut rng)).collect();
        Self { rows, symbols }
    }

    /// All-ones pilot on every sub-carrier.
    pub fn ones_full(n: usize) -> Self {
        Self {
            rows: (1..=n).collect(),
            symbols: vec![Complex64::new(1.0, 0.0); n],
        }
    }
}

/// Frequency-domain received vector over a pilot's sub-carrier set.
#[derive(Debug, Clone)]
pub struct RxVector {
    pub samples: Vec<Complex64>,
    pub pilot: Pilot,
}

/// Errors from channel construction and synthesis.
#[derive(Debug, Clone, PartialEq)]
pub enum WaveformError {
    InvalidConfig(&'static str),
    /// A path landed on a tap index at or beyond the resolvable-path window.
    TapOverflow { index: i64, capacity: usize },
    /// The quasi-synchronous assumption `l_m + tau_m >= 0` failed for a UE.
    NegativeExtendedIndex { ue: usize, index: i64 },
    DimensionMismatch,
}

impl std::fmt::Display for WaveformError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WaveformError::InvalidConfig(msg) => write!(f, "invalid OFDM config: {}", msg),
            WaveformError::TapOverflow { index, capacity } => {
                write!(f, "tap index {} exceeds resolvable window {}", index, capacity)
            }
            WaveformError::NegativeExtendedIndex { ue, index } => write!(
                f,
                "extended LOS index {} for UE {} is negative (l_m + tau_m < 0)",
                index, ue
            ),
            WaveformError::DimensionMismatch => write!(f, "dimension mismatch"),
        }
    }
}

impl std::error::Error for WaveformError {}

/// Delay bin of a path of physical length `path_len_m` at aggregate
/// bandwidth `n_delta_f`: `floor(N * delta_f * d / c0)`.
#[inline]
pub fn delay_bin(n_delta_f: f64, path_len_m: f64, c0: f64) -> i64 {
    (n_delta_f * path_len_m / c0).floor() as i64
}

/// Partial DFT dictionary with entry `(n,l) = exp(-j 2 pi (n-1)(l-1) / N)`,
/// where `n` is the row's absolute sub-carrier index.
pub fn dft_dictionary(rows: &[usize], num_cols: usize, n: usize) -> CMatrix {
    assert!(rows.iter().all(|&r| r >= 1 && r <= n), "rows must lie in [1, N]");
    assert!(num_cols <= n);
    CMatrix::from_fn(rows.len(), num_cols, |ri, c| {
        let ph = -2.0 * std::f64::consts::PI * ((rows[ri] - 1) as f64) * (c as f64) / n as f64;
        Complex64::new(ph.cos(), ph.sin())
    })
}

/// FFT-backed design operator `A = scale * diag(pilot) * G` for the partial
/// DFT dictionary. Equivalent to the dense [`dft_dictionary`] but O(N log N)
/// per application.
pub struct DftDesign {
    n: usize,
    num_cols: usize,
    rows: Vec<usize>,
    pilot: Vec<Complex64>,
    scale: f64,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl DftDesign {
    pub fn new(pilot: &Pilot, num_cols: usize, n: usize, scale: f64) -> Self {
        assert_eq!(pilot.rows.len(), pilot.symbols.len());
        assert!(pilot.rows.iter().all(|&r| r >= 1 && r <= n));
        assert!(num_cols <= n);
        let mut planner = FftPlanner::new();
        Self {
            n,
            num_cols,
            rows: pilot.rows.clone(),
            pilot: pilot.symbols.clone(),
            scale,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    /// Exact squared spectral norm when the rows form a full set or a full
    /// uniform comb (columns then being exactly orthogonal).
    fn design_energy_bound(&self) -> f64 {
        if self.rows.len() == self.n {
            return self.n as f64;
        }
        if self.rows.len() >= 2 {
            let stride = self.rows[1] - self.rows[0];
            let uniform = stride >= 1
                && self
                    .rows
                    .windows(2)
                    .all(|w| w[1] - w[0] == stride);
            if uniform
                && self.n % stride == 0
                && self.rows.len() == self.n / stride
                && self.num_cols <= self.n / stride
            {
                return self.rows.len() as f64;
            }
        }
        self.n as f64
    }
}

impl LassoDesign for DftDesign {
    fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn num_cols(&self) -> usize {
        self.num_cols
    }

    fn apply(&self, h: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(h.len(), self.num_cols);
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        buf[..h.len()].copy_from_slice(h);
        self.fwd.process(&mut buf);
        self.rows
            .iter()
            .zip(self.pilot.iter())
            .map(|(&r, s)| buf[r - 1] * s * self.scale)
            .collect()
    }

    fn apply_adjoint(&self, r: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(r.len(), self.rows.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); self.n];
        for ((&row, s), v) in self.rows.iter().zip(self.pilot.iter()).zip(r.iter()) {
            buf[row - 1] = s.conj() * v * self.scale;
        }
        self.inv.process(&mut buf);
        buf.truncate(self.num_cols);
        buf
    }

    fn lipschitz_bound(&self) -> f64 {
        self.scale * self.scale * self.design_energy_bound()
    }
}

fn add_tap(
    taps: &mut [Complex64],
    index: i64,
    power_gain: f64,
    phase: f64,
) -> Result<(), WaveformError> {
    if index < 0 || index as usize >= taps.len() {
        return Err(WaveformError::TapOverflow {
            index,
            capacity: taps.len(),
        });
    }
    taps[index as usize] += Complex64::from_polar(power_gain.sqrt(), phase);
    Ok(())
}

/// Monostatic BS channel: one tap per target at the round-trip delay bin,
/// colliding targets adding up.
pub fn build_monostatic_channel(
    scn: &Scenario,
    ranges: &TrueRangeTable,
    phases: &PathPhases,
    scn_cfg: &ScenarioConfig,
    cfg: &OfdmConfig,
) -> Result<TapChannel, WaveformError> {
    let ndf = cfg.total_bandwidth();
    let mut taps = vec![Complex64::new(0.0, 0.0); cfg.max_paths];
    for (k, &d) in ranges.d_bt.iter().enumerate() {
        let gain = cascaded_gain(d, d, scn_cfg).map_err(|_| WaveformError::DimensionMismatch)?;
        let bin = delay_bin(ndf, 2.0 * d, scn_cfg.speed_of_light);
        add_tap(&mut taps, bin, gain, phases.monostatic[k])?;
    }
    let _ = scn;
    Ok(TapChannel {
        taps,
        kind: ChannelKind::MonostaticBs,
    })
}

/// Extended downlink channel seen by UE `m`: LOS tap at `l_m + tau_m` plus
/// one tap per target at its shifted cascade bin.
pub fn build_downlink_channel(
    scn: &Scenario,
    ranges: &TrueRangeTable,
    m: usize,
    phases: &PathPhases,
    scn_cfg: &ScenarioConfig,
    cfg: &OfdmConfig,
) -> Result<TapChannel, WaveformError> {
    let ndf = cfg.total_bandwidth();
    let c0 = scn_cfg.speed_of_light;
    let tau = scn.sto[m];
    let len = cfg.max_paths + cfg.max_abs_sto.unsigned_abs() as usize;
    let mut taps = vec![Complex64::new(0.0, 0.0); len];

    let d_bu = scn.bs.distance_to(&scn.ue_true[m]);
    let l_m = delay_bin(ndf, d_bu, c0);
    let los_ext = l_m + tau;
    if los_ext < 0 {
        return Err(WaveformError::NegativeExtendedIndex {
            ue: m,
            index: los_ext,
        });
    }
    let los_gain = path_gain(d_bu, scn_cfg).map_err(|_| WaveformError::DimensionMismatch)?;
    add_tap(&mut taps, los_ext, los_gain, phases.downlink_los[m])?;

    for (k, &d_btu) in ranges.d_btu[m].iter().enumerate() {
        let bin = delay_bin(ndf, d_btu, c0);
        if bin >= cfg.max_paths as i64 {
            return Err(WaveformError::TapOverflow {
                index: bin,
                capacity: cfg.max_paths,
            });
        }
        let gain = cascaded_gain(ranges.d_bt[k], ranges.d_ut[m][k], scn_cfg)
            .map_err(|_| WaveformError::DimensionMismatch)?;
        add_tap(&mut taps, bin + tau, gain, phases.downlink_targets[m][k])?;
    }
    Ok(TapChannel {
        taps,
        kind: ChannelKind::DownlinkExtended,
    })
}

/// Uplink self-sensing channel of UE `m`: self-leakage at tap 0 (the STO to
/// itself is zero) plus one tap per target at the uplink round-trip bin.
pub fn build_uplink_self_channel(
    scn: &Scenario,
    ranges: &TrueRangeTable,
    m: usize,
    phases: &PathPhases,
    scn_cfg: &ScenarioConfig,
    cfg_ul: &OfdmConfig,
) -> Result<TapChannel, WaveformError> {
    let ndf = cfg_ul.total_bandwidth();
    let len = cfg_ul.max_paths + cfg_ul.max_abs_sto.unsigned_abs() as usize;
    let mut taps = vec![Complex64::new(0.0, 0.0); len];

    let leak_gain = 10f64.powf(SELF_LEAKAGE_GAIN_DB / 10.0);
    add_tap(&mut taps, 0, leak_gain, phases.uplink_self[m])?;

    for (k, &d_ut) in ranges.d_ut[m].iter().enumerate() {
        let bin = delay_bin(ndf, 2.0 * d_ut, scn_cfg.speed_of_light);
        if bin >= cfg_ul.max_paths as i64 {
            return Err(WaveformError::TapOverflow {
                index: bin,
                capacity: cfg_ul.max_paths,
            });
        }
        let gain = cascaded_gain(d_ut, d_ut, scn_cfg).map_err(|_| WaveformError::DimensionMismatch)?;
        add_tap(&mut taps, bin, gain, phases.uplink_targets[m][k])?;
    }
    let _ = scn;
    Ok(TapChannel {
        taps,
        kind: ChannelKind::UplinkSelfExtended,
    })
}

/// Synthesize the received frequency-domain vector over the pilot's rows:
/// `sqrt(power) * diag(pilot) * G * taps` plus circularly-symmetric complex
/// Gaussian noise of per-sample variance `cfg.noise_power`.
///
/// Deterministic given `seed`.
pub fn synthesize_rx(
    pilot: &Pilot,
    power: f64,
    channel: &TapChannel,
    cfg: &OfdmConfig,
    seed: u64,
) -> Result<RxVector, WaveformError> {
    let n = cfg.num_subcarriers;
    if pilot.rows.len() != pilot.symbols.len()
        || channel.taps.len() > n
        || pilot.rows.iter().any(|&r| r < 1 || r > n)
    {
        return Err(WaveformError::DimensionMismatch);
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    buf[..channel.taps.len()].copy_from_slice(&channel.taps);
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sqrt_p = power.sqrt();
    let samples = pilot
        .rows
        .iter()
        .zip(pilot.symbols.iter())
        .map(|(&r, s)| sqrt_p * s * buf[r - 1] + complex_noise(&mut rng, cfg.noise_power))
        .collect();
    Ok(RxVector {
        samples,
        pilot: pilot.clone(),
    })
}
