//! Closed-form Riesz energies of balls and the Lipschitz constant of the
//! energy gap to the unit-volume ball.

use statrs::function::gamma::gamma;

use crate::error::{invalid, Result};
use crate::scalar::unit_ball_volume;

/// `Phi_alpha(B_R)` in dimension `n` (1, 2 or 3).
///
/// Chord-power integration gives, for the disk,
/// `2 pi 2^{3-a} B(1/2, (5-a)/2) / ((2-a)(3-a)) R^{4-a}`; the segment and
/// the ball in space follow from their covariograms.
pub fn ball_energy(radius: f64, alpha: f64, n: usize) -> Result<f64> {
    if !(radius > 0.0) {
        return invalid("radius must be positive");
    }
    if !(alpha > 0.0 && alpha < n as f64) {
        return invalid(format!("alpha must lie in (0, {n})"));
    }
    let a = alpha;
    let unit = match n {
        1 => 2.0 * 2f64.powf(2.0 - a) / ((1.0 - a) * (2.0 - a)),
        2 => {
            let beta = gamma(0.5) * gamma((5.0 - a) / 2.0) / gamma((6.0 - a) / 2.0);
            2.0 * std::f64::consts::PI * 2f64.powf(3.0 - a) * beta / ((2.0 - a) * (3.0 - a))
        }
        3 => std::f64::consts::PI.powi(2) * 2f64.powf(7.0 - a) / ((3.0 - a) * (4.0 - a) * (6.0 - a)),
        _ => return invalid(format!("dimension {n} is not supported")),
    };
    Ok(unit * radius.powf(2.0 * n as f64 - a))
}

/// `2 (n omega_n s^{n-a} / (n-a) + 2 s^{-a})` at
/// `s = (2 (n-a) / (n omega_n))^{1/n}`: bounds `|Phi(B) - Phi(E)|` by this
/// constant times `inf_x |E Δ B(x)|` for unit-volume `E`.
pub fn lipschitz_gap_constant(n: usize, alpha: f64) -> Result<f64> {
    if !(1..=3).contains(&n) || !(alpha > 0.0 && alpha < n as f64) {
        return invalid("need n in 1..=3 and alpha in (0, n)");
    }
    let nf = n as f64;
    let w = unit_ball_volume::<f64>(n);
    let s = (2.0 * (nf - alpha) / (nf * w)).powf(1.0 / nf);
    Ok(2.0 * (nf * w * s.powf(nf - alpha) / (nf - alpha) + 2.0 * s.powf(-alpha)))
}
