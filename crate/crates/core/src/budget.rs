//! Design budget: every applicable reduction factor of a proposed experiment
//! and their product.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::inertial::{coriolis_reduction, gravity_reduction};
use crate::model::{BeamModel, InertialEnvironment, InterferometerGeometry};
use crate::numfmt::sci;
use crate::specfun::j0;
use crate::vibration::{
    gaussian_reduction, independent_reduction, pendulum_reduction, torsion_reduction,
    CommonPendulum, GaussianJitter, IndependentHarmonic, TorsionPendulum,
};

/// First zero of J0.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// Default worst-case search grid for frequency-dependent factors: 10..=2000 Hz, step 1 Hz.
pub fn default_frequency_grid() -> Vec<f64> {
    (10..=2000).map(f64::from).collect()
}

/// Torsion oscillation with a known pivot; the frequency is scanned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionInput {
    pub peak_rotation: f64,
    pub pivot_offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetInputs {
    pub geom: InterferometerGeometry,
    pub beam: BeamModel,
    pub env: InertialEnvironment,
    /// Common-mode pendulum amplitude [m].
    pub pendulum_amplitude: f64,
    /// Independent oscillation amplitude of each grating [m].
    pub grating_amplitudes: [f64; 3],
    pub frequency_grid: Vec<f64>,
    pub torsion: Option<TorsionInput>,
    pub jitter: Option<[f64; 3]>,
}

impl BudgetInputs {
    /// Every vibration amplitude set to `amplitude`, default frequency grid,
    /// no torsion pivot and no jitter term.
    pub fn new(
        geom: InterferometerGeometry,
        beam: BeamModel,
        env: InertialEnvironment,
        amplitude: f64,
    ) -> Self {
        Self {
            geom,
            beam,
            env,
            pendulum_amplitude: amplitude,
            grating_amplitudes: [amplitude; 3],
            frequency_grid: default_frequency_grid(),
            torsion: None,
            jitter: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factor {
    pub name: &'static str,
    pub value: f64,
    pub formula: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignBudget {
    pub inputs: BudgetInputs,
    pub factors: Vec<Factor>,
    pub combined: f64,
    pub notes: Vec<String>,
}

impl DesignBudget {
    pub fn factor(&self, name: &str) -> Option<f64> {
        self.factors
            .iter()
            .find(|f| f.name == name)
            .map(|f| f.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("factor,value,formula_ref\n");
        for f in &self.factors {
            let _ = writeln!(out, "{},{},{}", f.name, sci(f.value), f.formula);
        }
        let _ = writeln!(
            out,
            "combined,{},product of the factors above",
            sci(self.combined)
        );
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .factors
            .iter()
            .map(|f| f.name.len())
            .max()
            .unwrap_or(0)
            .max("combined".len());
        for f in &self.factors {
            let _ = writeln!(out, "{:<width$}  {:.6}  {}", f.name, f.value, f.formula);
        }
        let _ = writeln!(out, "{:<width$}  {:.6}", "combined", self.combined);
        for note in &self.notes {
            let _ = writeln!(out, "note: {note}");
        }
        out
    }
}

fn min_over<F: Fn(f64) -> f64>(grid: &[f64], f: F) -> f64 {
    grid.iter().map(|&x| f(x)).fold(1.0, f64::min)
}

/// Evaluates all applicable factors. Frequency-dependent factors are the
/// worst case (minimum) over `inputs.frequency_grid`.
pub fn evaluate_budget(inputs: &BudgetInputs) -> Result<DesignBudget> {
    let grid = &inputs.frequency_grid;
    if grid.is_empty() || grid.iter().any(|f| !(f.is_finite() && *f > 0.0)) {
        return Err(invalid(
            "frequencies",
            "grid must be non-empty and positive",
        ));
    }
    // validates the amplitudes
    let pendulum = CommonPendulum::new(inputs.pendulum_amplitude, grid[0])?;
    let independent = IndependentHarmonic::new(inputs.grating_amplitudes, [1.0; 3])?;
    let (geom, beam, env) = (&inputs.geom, &inputs.beam, &inputs.env);
    let d = geom.period();

    let mut factors = vec![
        Factor {
            name: "R_C",
            value: coriolis_reduction(geom, beam, env),
            formula: "coriolis: exp(-8 [pi Omega_0 L^2 sigma_v / (d v^2)]^2)",
        },
        Factor {
            name: "R_G",
            value: gravity_reduction(geom, beam, env),
            formula: "gravity: exp(-2 [pi g sin(theta_G) L^2 sigma_v / (d v^3)]^2)",
        },
        Factor {
            name: "R_P",
            value: min_over(grid, |f| {
                pendulum_reduction(
                    &CommonPendulum {
                        frequency: f,
                        ..pendulum
                    },
                    geom,
                    beam,
                )
            }),
            formula: "common pendulum: min over f of |J0(8 pi (A/d) sin^2(pi f L / v))|",
        },
    ];
    let mut notes = vec![
        "factors are assumed independent and multiplied; correlated perturbations are not modelled"
            .to_owned(),
        format!(
            "R_P is the worst case over {} frequencies from {} Hz to {} Hz",
            grid.len(),
            grid.iter().copied().fold(f64::INFINITY, f64::min),
            grid.iter().copied().fold(0.0, f64::max)
        ),
    ];

    match inputs.torsion {
        Some(t) => {
            let mode = TorsionPendulum::new(t.peak_rotation, grid[0], t.pivot_offset)?;
            factors.push(Factor {
                name: "R_T",
                value: min_over(grid, |f| torsion_reduction(&TorsionPendulum { frequency: f, ..mode }, geom, beam)),
                formula: "torsion pendulum: min over f of |J0(sqrt(8) Omega_0 L/(f d) sin(pi f L/v) sqrt(...))|",
            });
        }
        None => notes.push(
            "R_T not evaluated: the torsion factor depends on the pivot position, which was not given".to_owned(),
        ),
    }

    factors.push(Factor {
        name: "R_I",
        value: independent_reduction(&independent, geom),
        formula: "independent gratings: |J0(2 pi A1/d) J0(4 pi A2/d) J0(2 pi A3/d)|",
    });

    if let Some(sigmas) = inputs.jitter {
        let mode = GaussianJitter::new(sigmas)?;
        factors.push(Factor {
            name: "R_gauss",
            value: gaussian_reduction(&mode, geom),
            formula: "gaussian jitter: exp(-2 pi^2 (s1^2 + 4 s2^2 + s3^2) / d^2)",
        });
    }

    let pendulum_peak = 8.0 * PI * inputs.pendulum_amplitude / d;
    let [a1, a2, a3] = inputs.grating_amplitudes;
    let independent_peak = (2.0 * PI * a1 / d)
        .max(4.0 * PI * a2 / d)
        .max(2.0 * PI * a3 / d);
    if pendulum_peak > J0_FIRST_ZERO || independent_peak > J0_FIRST_ZERO {
        notes.push(format!(
            "a J0 argument exceeds the first zero {J0_FIRST_ZERO:.4}; beyond it the factor is not monotone in amplitude (J0 there is {:.4})",
            j0(pendulum_peak.max(independent_peak))
        ));
    }

    let combined = factors.iter().map(|f| f.value).product();
    Ok(DesignBudget {
        inputs: inputs.clone(),
        factors,
        combined,
        notes,
    })
}
