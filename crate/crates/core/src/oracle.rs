//! Brute-force cross-check of the closed forms.
//!
//! Each simulated molecule crosses the three gratings at t = 0, L/v and 2L/v.
//! Its fringe shift is the lab-frame combination x1(t1) - 2 x2(t2) + x3(t3) of
//! the grating displacements, plus the ballistic term y1 - 2 y2 + y3 of a
//! trajectory under constant transverse acceleration (Coriolis 2 v Omega_0,
//! gravity g sin(theta_G)). The visibility reduction is the modulus of the mean
//! phasor exp(2 pi i shift / d) over random oscillation phases, grating
//! positions and velocities.
//!
//! Samples are split into a fixed number of batches, each with its own ChaCha
//! stream, so results are bit-identical for a given seed however many worker
//! threads run the batches.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::inertial::{coriolis_reduction, coriolis_shift, gravity_reduction, gravity_shift};
use crate::model::{BeamModel, InertialEnvironment, InterferometerGeometry};
use crate::specfun::{gauss_average, QuadratureSpec};
use crate::vibration::VibrationMode;

/// Upper bound on the number of independent batches a run is split into.
pub const BATCHES: u64 = 64;

/// Velocities more than this many standard deviations below the mean are redrawn.
pub const VELOCITY_CUTOFF_SIGMAS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Perturbation {
    Vibration(VibrationMode),
    Inertial(InertialEnvironment),
}

impl From<VibrationMode> for Perturbation {
    fn from(m: VibrationMode) -> Self {
        Perturbation::Vibration(m)
    }
}

impl From<InertialEnvironment> for Perturbation {
    fn from(e: InertialEnvironment) -> Self {
        Perturbation::Inertial(e)
    }
}

/// Random inputs of one perturbation for one molecule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Draw {
    /// Oscillation phase at the first-grating crossing.
    Phase(f64),
    /// One phase per grating.
    Phases([f64; 3]),
    /// Grating positions [m].
    Positions([f64; 3]),
    /// Deterministic perturbation.
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryScenario {
    pub geom: InterferometerGeometry,
    pub beam: BeamModel,
    pub perturbations: Vec<Perturbation>,
    pub seed: u64,
    pub sample_count: u64,
    /// Constant added to every drawn oscillation phase.
    pub phase_offset: f64,
}

impl TrajectoryScenario {
    /// An empty perturbation list is accepted and gives R = 1 exactly.
    pub fn new(
        geom: InterferometerGeometry,
        beam: BeamModel,
        perturbations: Vec<Perturbation>,
        seed: u64,
        sample_count: u64,
    ) -> Result<Self> {
        if sample_count == 0 {
            return Err(invalid("sample_count", "must be >= 1"));
        }
        Ok(Self {
            geom,
            beam,
            perturbations,
            seed,
            sample_count,
            phase_offset: 0.0,
        })
    }

    pub fn with_phase_offset(mut self, offset: f64) -> Self {
        self.phase_offset = offset;
        self
    }

    /// Product of the closed-form reduction factors of every perturbation.
    pub fn closed_form_reduction(&self) -> f64 {
        self.perturbations
            .iter()
            .map(|p| match p {
                Perturbation::Vibration(m) => m.reduction(&self.geom, &self.beam),
                Perturbation::Inertial(env) => {
                    coriolis_reduction(&self.geom, &self.beam, env)
                        * gravity_reduction(&self.geom, &self.beam, env)
                }
            })
            .product()
    }
}

/// Oracle estimate next to the closed form it checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub r_oracle: f64,
    /// Mean composite shift over all samples [m].
    pub mean_shift: f64,
    /// Standard error of the mean phasor, from the spread of batch means.
    pub standard_error: f64,
    pub closed_form_r: f64,
    /// (r_oracle - closed_form_r) / closed_form_r
    pub relative_discrepancy: f64,
}

impl OracleResult {
    /// |r_oracle - closed_form_r| <= max(k * standard_error, floor)
    pub fn agrees(&self, k: f64, floor: f64) -> bool {
        (self.r_oracle - self.closed_form_r).abs() <= (k * self.standard_error).max(floor)
    }
}

fn sinusoid(amplitude: f64, frequency: f64, phase: f64, t: f64) -> f64 {
    amplitude * (phase - TAU * frequency * t).sin()
}

fn perturbation_shift(p: &Perturbation, geom: &InterferometerGeometry, v: f64, draw: &Draw) -> f64 {
    let l = geom.separation();
    let times = [0.0, l / v, 2.0 * l / v];
    let combine = |x: [f64; 3]| x[0] - 2.0 * x[1] + x[2];
    match (p, draw) {
        (Perturbation::Vibration(VibrationMode::CommonPendulum(m)), Draw::Phase(phi)) => {
            combine(times.map(|t| sinusoid(m.amplitude, m.frequency, *phi, t)))
        }
        (Perturbation::Vibration(VibrationMode::TorsionPendulum(m)), Draw::Phase(phi)) => {
            // tilt angle theta(t) = Omega_0/(2 pi f) cos(phi - 2 pi f t); lever arm z0 + (k-1) L
            let lever = [m.pivot_offset, m.pivot_offset + l, m.pivot_offset + 2.0 * l];
            let w = TAU * m.frequency;
            combine([0, 1, 2].map(|k| lever[k] * m.peak_rotation / w * (phi - w * times[k]).cos()))
        }
        (Perturbation::Vibration(VibrationMode::IndependentHarmonic(m)), Draw::Phases(phis)) => {
            combine(
                [0, 1, 2].map(|k| sinusoid(m.amplitudes[k], m.frequencies[k], phis[k], times[k])),
            )
        }
        (Perturbation::Vibration(VibrationMode::GaussianJitter(_)), Draw::Positions(x)) => {
            combine(*x)
        }
        (Perturbation::Inertial(env), Draw::None) => {
            let a = 2.0 * v * env.rotation() + env.gravity() * geom.tilt().sin();
            let y = times.map(|t| 0.5 * a * t * t);
            y[0] - 2.0 * y[1] + y[2]
        }
        _ => panic!("draw {draw:?} does not match perturbation {p:?}"),
    }
}

/// Fringe shift of one molecule at velocity `v` with the given random draws,
/// one per perturbation in scenario order.
pub fn composite_shift(scenario: &TrajectoryScenario, v: f64, draws: &[Draw]) -> f64 {
    assert_eq!(
        draws.len(),
        scenario.perturbations.len(),
        "one draw per perturbation"
    );
    scenario
        .perturbations
        .iter()
        .zip(draws)
        .map(|(p, d)| perturbation_shift(p, &scenario.geom, v, d))
        .sum()
}

fn draw_for<R: Rng>(p: &Perturbation, offset: f64, rng: &mut R) -> Draw {
    let phase = |rng: &mut R| offset + rng.random_range(0.0..TAU);
    match p {
        Perturbation::Vibration(VibrationMode::CommonPendulum(_))
        | Perturbation::Vibration(VibrationMode::TorsionPendulum(_)) => Draw::Phase(phase(rng)),
        Perturbation::Vibration(VibrationMode::IndependentHarmonic(_)) => {
            Draw::Phases([phase(rng), phase(rng), phase(rng)])
        }
        Perturbation::Vibration(VibrationMode::GaussianJitter(j)) => {
            Draw::Positions([0, 1, 2].map(|k| {
                let z: f64 = rng.sample(StandardNormal);
                j.sigmas[k] * z
            }))
        }
        Perturbation::Inertial(_) => Draw::None,
    }
}

fn draw_velocity<R: Rng>(beam: &BeamModel, rng: &mut R) -> f64 {
    let (mean, sigma) = (beam.velocity(), beam.velocity_spread());
    if sigma == 0.0 {
        return mean;
    }
    let floor = (mean - VELOCITY_CUTOFF_SIGMAS * sigma).max(0.0);
    loop {
        let z: f64 = rng.sample(StandardNormal);
        let v = mean + sigma * z;
        if v > floor {
            return v;
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct BatchSum {
    count: u64,
    phasor: Complex64,
    shift: f64,
}

fn run_batch(scenario: &TrajectoryScenario, batch: u64, count: u64) -> BatchSum {
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    rng.set_stream(batch);
    let k = TAU / scenario.geom.period();
    let mut draws = vec![Draw::None; scenario.perturbations.len()];
    let mut sum = BatchSum {
        count,
        ..Default::default()
    };
    for _ in 0..count {
        let v = draw_velocity(&scenario.beam, &mut rng);
        for (slot, p) in draws.iter_mut().zip(&scenario.perturbations) {
            *slot = draw_for(p, scenario.phase_offset, &mut rng);
        }
        let shift = composite_shift(scenario, v, &draws);
        let (s, c) = (k * shift).sin_cos();
        sum.phasor += Complex64::new(c, s);
        sum.shift += shift;
    }
    sum
}

/// Monte Carlo visibility reduction of `scenario`, deterministic for a fixed seed.
pub fn visibility_oracle(scenario: &TrajectoryScenario) -> OracleResult {
    let n = scenario.sample_count;
    let batches = BATCHES.min(n);
    let sizes: Vec<u64> = (0..batches)
        .map(|b| n / batches + u64::from(b < n % batches))
        .collect();
    let sums: Vec<BatchSum> = sizes
        .par_iter()
        .enumerate()
        .map(|(b, &count)| run_batch(scenario, b as u64, count))
        .collect();

    let mut phasor = Complex64::new(0.0, 0.0);
    let mut shift = 0.0;
    for s in &sums {
        phasor += s.phasor;
        shift += s.shift;
    }
    let mean = phasor / n as f64;

    let standard_error = if batches > 1 {
        let spread: f64 = sums
            .iter()
            .map(|s| (s.phasor / s.count as f64 - mean).norm_sqr())
            .sum();
        (spread / (batches * (batches - 1)) as f64).sqrt()
    } else {
        0.0
    };

    let r_oracle = mean.norm().min(1.0);
    let closed_form_r = scenario.closed_form_reduction();
    OracleResult {
        r_oracle,
        mean_shift: shift / n as f64,
        standard_error,
        closed_form_r,
        relative_discrepancy: (r_oracle - closed_form_r) / closed_form_r,
    }
}

/// Quadrature averages of the Coriolis and gravity phasors over the beam's
/// Gaussian velocity distribution, next to the printed closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityAverageReport {
    pub coriolis_oracle: f64,
    pub coriolis_closed_form: f64,
    pub gravity_oracle: f64,
    pub gravity_closed_form: f64,
}

impl VelocityAverageReport {
    pub fn coriolis_discrepancy(&self) -> f64 {
        (self.coriolis_oracle - self.coriolis_closed_form) / self.coriolis_closed_form
    }

    pub fn gravity_discrepancy(&self) -> f64 {
        (self.gravity_oracle - self.gravity_closed_form) / self.gravity_closed_form
    }
}

/// |E_v[exp(2 pi i shift(v) / d)]| for the Coriolis and gravity shifts, by
/// Gauss-Hermite quadrature. Velocities <= 0 never reach the detector and
/// contribute nothing.
pub fn velocity_average_oracle(
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    env: &InertialEnvironment,
    spec: &QuadratureSpec,
) -> Result<VelocityAverageReport> {
    if beam.velocity_spread() <= 0.0 {
        return Err(invalid("sigma_v", "velocity average needs sigma_v > 0"));
    }
    let k = TAU / geom.period();
    let average = |shift: &dyn Fn(&BeamModel) -> f64| -> Result<f64> {
        let phasor = gauss_average(
            |v| {
                if v <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let at = BeamModel::monochromatic(beam.mass(), v).expect("v > 0");
                Complex64::from_polar(1.0, k * shift(&at))
            },
            beam.velocity(),
            beam.velocity_spread(),
            spec,
        )?;
        Ok(phasor.norm())
    };
    Ok(VelocityAverageReport {
        coriolis_oracle: average(&|b| coriolis_shift(geom, b, env).shift)?,
        coriolis_closed_form: coriolis_reduction(geom, beam, env),
        gravity_oracle: average(&|b| gravity_shift(geom, b, env).shift)?,
        gravity_closed_form: gravity_reduction(geom, beam, env),
    })
}
