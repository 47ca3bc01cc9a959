//! Fringe shifts and visibility reduction from earth rotation and gravity,
//! the mass bounds that follow from the Coriolis reduction, and the Sagnac phase.

use std::f64::consts::PI;

use crate::model::{BeamModel, InertialEnvironment, InterferometerGeometry};
use crate::units::HBAR;

/// Lateral displacement of the fringe pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftResult {
    /// Displacement [m].
    pub shift: f64,
    /// Displacement in units of the grating period.
    pub fraction_of_period: f64,
}

impl ShiftResult {
    pub fn new(shift: f64, period: f64) -> Self {
        Self {
            shift,
            fraction_of_period: shift / period,
        }
    }
}

/// Coriolis shift 2 Omega_0 L^2 / v_z.
pub fn coriolis_shift(
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    env: &InertialEnvironment,
) -> ShiftResult {
    let l = geom.separation();
    ShiftResult::new(
        2.0 * env.rotation() * l * l / beam.velocity(),
        geom.period(),
    )
}

/// Contrast left after averaging the Coriolis shift over the Gaussian velocity
/// spread (linearised in sigma_v / v_z):
/// exp(-8 [pi Omega_0 L^2 sigma_v / (d v_z^2)]^2).
pub fn coriolis_reduction(
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    env: &InertialEnvironment,
) -> f64 {
    let l = geom.separation();
    let v = beam.velocity();
    let x = PI * env.rotation() * l * l * beam.velocity_spread() / (geom.period() * v * v);
    (-8.0 * x * x).exp()
}

/// Gravity shift g sin(theta_G) L^2 / v_z^2 for grating bars tilted by theta_G.
pub fn gravity_shift(
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    env: &InertialEnvironment,
) -> ShiftResult {
    let l = geom.separation();
    let v = beam.velocity();
    ShiftResult::new(
        env.gravity() * geom.tilt().sin() * l * l / (v * v),
        geom.period(),
    )
}

/// exp(-2 [pi g sin(theta_G) L^2 sigma_v / (d v_z^3)]^2).
///
/// This is the Coriolis form with Omega_0 replaced by g sin(theta_G) / (2 v_z)
/// at fixed v_z. A direct linearised velocity average of [`gravity_shift`]
/// has prefactor 8 instead of 2; see [`crate::oracle::velocity_average_oracle`].
pub fn gravity_reduction(
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    env: &InertialEnvironment,
) -> f64 {
    let l = geom.separation();
    let v = beam.velocity();
    let x = PI * env.gravity() * geom.tilt().sin() * l * l * beam.velocity_spread()
        / (geom.period() * v * v * v);
    (-2.0 * x * x).exp()
}

/// Largest mass whose Coriolis reduction stays above 1/e when the separation
/// tracks the first Talbot length at fixed period `period`:
/// hbar (sqrt(2) pi / (Omega_0 d^3 sigma_v))^(1/2).
pub fn mass_bound_fixed_period(period: f64, velocity_spread: f64, rotation: f64) -> f64 {
    HBAR * (2f64.sqrt() * PI / (rotation * period.powi(3) * velocity_spread)).sqrt()
}

/// Largest mass whose Coriolis reduction stays above 1/e at fixed separation
/// `separation`, the period shrinking so that L = L_T:
/// hbar v_z^3 / (4 pi Omega_0^2 L^3 sigma_v^2).
pub fn mass_bound_fixed_length(
    separation: f64,
    velocity: f64,
    velocity_spread: f64,
    rotation: f64,
) -> f64 {
    HBAR * velocity.powi(3)
        / (4.0 * PI * rotation * rotation * separation.powi(3) * velocity_spread * velocity_spread)
}

/// Upper limit on sigma_v / v_z^2 [s/m] for R_C >= 1/e at the smallest period
/// and longest separation: d_min / (sqrt(8) pi Omega_0 L_max^2).
pub fn velocity_selection_limit(min_period: f64, max_separation: f64, rotation: f64) -> f64 {
    min_period / (8f64.sqrt() * PI * rotation * max_separation * max_separation)
}

/// Sagnac phase 2 m Omega_0 A / hbar for the area A = N d L enclosed by
/// neighbouring paths.
pub fn sagnac_phase(
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    env: &InertialEnvironment,
) -> f64 {
    let area = geom.talbot_order() as f64 * geom.period() * geom.separation();
    2.0 * beam.mass() * env.rotation() * area / HBAR
}
