//! Small shared random-draw helpers.

use num_complex::Complex64;
use rand::Rng;

/// Draw a standard Gaussian pair via Box-Muller.
pub(crate) fn gauss_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Circularly-symmetric complex Gaussian sample with total variance `var`.
pub(crate) fn complex_noise<R: Rng>(rng: &mut R, var: f64) -> Complex64 {
    let (a, b) = gauss_pair(rng);
    let s = (var / 2.0).sqrt();
    Complex64::new(s * a, s * b)
}

/// Uniform unit-power QPSK symbol.
pub(crate) fn qpsk<R: Rng>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match rng.gen_range(0u8..4) {
        0 => Complex64::new(s, s),
        1 => Complex64::new(-s, s),
        2 => Complex64::new(-s, -s),
        _ => Complex64::new(s, -s),
    }
}
