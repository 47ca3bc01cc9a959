//! Transverse grating vibrations: common pendulum, torsion pendulum, independent
//! harmonic motion of each grating, and Gaussian position jitter.
//!
//! The beam is taken as monochromatic at `v_z`. Phases follow one convention
//! throughout: `phase` is the grating oscillation phase at the instant the
//! molecule crosses the first grating. Reduction factors do not depend on it.

use std::f64::consts::{PI, TAU};

use crate::error::{invalid, Result};
use crate::inertial::ShiftResult;
use crate::model::{BeamModel, InterferometerGeometry};
use crate::specfun::j0;

fn non_negative(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x >= 0.0 {
        Ok(x)
    } else {
        Err(invalid(name, format!("{x} must be finite and >= 0")))
    }
}

fn frequency(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(invalid(name, format!("{x} must be finite and > 0")))
    }
}

/// All three gratings oscillating together with amplitude A at frequency f.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonPendulum {
    pub amplitude: f64,
    pub frequency: f64,
}

impl CommonPendulum {
    pub fn new(amplitude: f64, frequency: f64) -> Result<Self> {
        Ok(Self {
            amplitude: non_negative("A", amplitude)?,
            frequency: self::frequency("f", frequency)?,
        })
    }
}

/// Rigid rotational oscillation of the grating assembly about a pivot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionPendulum {
    /// Peak angular velocity Omega_0 [rad/s].
    pub peak_rotation: f64,
    pub frequency: f64,
    /// Longitudinal position z_0 of the first grating relative to the pivot [m].
    /// 0, -L and -2L put the pivot in the plane of grating 1, 2 and 3.
    pub pivot_offset: f64,
}

impl TorsionPendulum {
    /// `frequency` must be > 0; use [`torsion_static_limit`] for the f -> 0 case.
    pub fn new(peak_rotation: f64, frequency: f64, pivot_offset: f64) -> Result<Self> {
        if !pivot_offset.is_finite() {
            return Err(invalid("z0", "must be finite"));
        }
        Ok(Self {
            peak_rotation: non_negative("Omega_0", peak_rotation)?,
            frequency: self::frequency("f", frequency)?,
            pivot_offset,
        })
    }
}

/// Each grating oscillating with its own amplitude and frequency, no phase relation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndependentHarmonic {
    pub amplitudes: [f64; 3],
    pub frequencies: [f64; 3],
}

impl IndependentHarmonic {
    pub fn new(amplitudes: [f64; 3], frequencies: [f64; 3]) -> Result<Self> {
        for (a, f) in amplitudes.iter().zip(&frequencies) {
            non_negative("A_k", *a)?;
            frequency("f_k", *f)?;
        }
        Ok(Self {
            amplitudes,
            frequencies,
        })
    }

    /// Same amplitude on all gratings; frequencies are irrelevant to the reduction.
    pub fn uniform(amplitude: f64) -> Result<Self> {
        Self::new([amplitude; 3], [1.0; 3])
    }
}

/// Gaussian-distributed grating positions with standard deviations sigma_A1..3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianJitter {
    pub sigmas: [f64; 3],
}

impl GaussianJitter {
    pub fn new(sigmas: [f64; 3]) -> Result<Self> {
        for s in sigmas {
            non_negative("sigma_A", s)?;
        }
        Ok(Self { sigmas })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VibrationMode {
    CommonPendulum(CommonPendulum),
    TorsionPendulum(TorsionPendulum),
    IndependentHarmonic(IndependentHarmonic),
    GaussianJitter(GaussianJitter),
}

impl VibrationMode {
    /// Closed-form reduction factor of this mode alone.
    pub fn reduction(&self, geom: &InterferometerGeometry, beam: &BeamModel) -> f64 {
        match self {
            VibrationMode::CommonPendulum(m) => pendulum_reduction(m, geom, beam),
            VibrationMode::TorsionPendulum(m) => torsion_reduction(m, geom, beam),
            VibrationMode::IndependentHarmonic(m) => independent_reduction(m, geom),
            VibrationMode::GaussianJitter(m) => gaussian_reduction(m, geom),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            VibrationMode::CommonPendulum(_) => "pendulum",
            VibrationMode::TorsionPendulum(_) => "torsion",
            VibrationMode::IndependentHarmonic(_) => "independent",
            VibrationMode::GaussianJitter(_) => "gaussian",
        }
    }
}

/// Phase advance of the oscillation during one grating-to-grating flight, 2 pi f L / v_z.
fn transit_phase(frequency: f64, geom: &InterferometerGeometry, beam: &BeamModel) -> f64 {
    TAU * frequency * geom.separation() / beam.velocity()
}

/// A [sin(phi) - 2 sin(phi - a) + sin(phi - 2a)] with a = 2 pi f L / v_z.
pub fn pendulum_shift(
    mode: &CommonPendulum,
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    phase: f64,
) -> ShiftResult {
    let a = transit_phase(mode.frequency, geom, beam);
    let shift = mode.amplitude * (phase.sin() - 2.0 * (phase - a).sin() + (phase - 2.0 * a).sin());
    ShiftResult::new(shift, geom.period())
}

/// |J0(8 pi (A/d) sin^2(pi f L / v_z))|
pub fn pendulum_reduction(
    mode: &CommonPendulum,
    geom: &InterferometerGeometry,
    beam: &BeamModel,
) -> f64 {
    let s = (PI * mode.frequency * geom.separation() / beam.velocity()).sin();
    j0(8.0 * PI * mode.amplitude / geom.period() * s * s).abs()
}

/// Per-grating terms of the torsion shift; their sum is [`torsion_shift`].
///
/// Grating k sits at lever arm z_0 + (k-1) L and enters with weight 1, -2, 1.
pub fn torsion_terms(
    mode: &TorsionPendulum,
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    phase: f64,
) -> [f64; 3] {
    let a = transit_phase(mode.frequency, geom, beam);
    let l = geom.separation();
    let z0 = mode.pivot_offset;
    let scale = mode.peak_rotation / (TAU * mode.frequency);
    [
        scale * z0 * phase.cos(),
        -2.0 * scale * (z0 + l) * (phase - a).cos(),
        scale * (z0 + 2.0 * l) * (phase - 2.0 * a).cos(),
    ]
}

/// Omega_0/(2 pi f) [z0 cos(phi) - 2 (z0 + L) cos(phi - a) + (z0 + 2L) cos(phi - 2a)].
pub fn torsion_shift(
    mode: &TorsionPendulum,
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    phase: f64,
) -> ShiftResult {
    let [t1, t2, t3] = torsion_terms(mode, geom, beam, phase);
    ShiftResult::new(t1 + t2 + t3, geom.period())
}

/// |J0(sqrt(8) (Omega_0 L / f d) sin(pi f L/v_z) sqrt(1 + (1+u)^2 - u(2+u) cos(2 pi f L/v_z)))|
/// with u = z0 / L.
pub fn torsion_reduction(
    mode: &TorsionPendulum,
    geom: &InterferometerGeometry,
    beam: &BeamModel,
) -> f64 {
    let l = geom.separation();
    let u = mode.pivot_offset / l;
    let half = PI * mode.frequency * l / beam.velocity();
    let bracket = 1.0 + (1.0 + u) * (1.0 + u) - u * (2.0 + u) * (2.0 * half).cos();
    let arg = 8f64.sqrt() * mode.peak_rotation * l / (mode.frequency * geom.period())
        * half.sin()
        * bracket.max(0.0).sqrt();
    j0(arg).abs()
}

/// Low-frequency limit of the torsion reduction, |J0(4 pi Omega_0 L^2 / (d v_z))|,
/// independent of the pivot.
pub fn torsion_static_limit(
    peak_rotation: f64,
    geom: &InterferometerGeometry,
    beam: &BeamModel,
) -> f64 {
    let l = geom.separation();
    j0(4.0 * PI * peak_rotation * l * l / (geom.period() * beam.velocity())).abs()
}

/// |J0(2 pi A1/d) J0(4 pi A2/d) J0(2 pi A3/d)|, independent of the frequencies.
pub fn independent_reduction(mode: &IndependentHarmonic, geom: &InterferometerGeometry) -> f64 {
    let k = TAU / geom.period();
    let [a1, a2, a3] = mode.amplitudes;
    (j0(k * a1) * j0(2.0 * k * a2) * j0(k * a3)).abs()
}

/// exp(-2 pi^2 (sigma1^2 + 4 sigma2^2 + sigma3^2) / d^2)
pub fn gaussian_reduction(mode: &GaussianJitter, geom: &InterferometerGeometry) -> f64 {
    let [s1, s2, s3] = mode.sigmas;
    let d = geom.period();
    (-2.0 * PI * PI * (s1 * s1 + 4.0 * s2 * s2 + s3 * s3) / (d * d)).exp()
}
