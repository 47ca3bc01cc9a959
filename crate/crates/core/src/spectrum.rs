//! Accelerometer traces: voltage spectrum, acceleration and displacement lines,
//! and the predicted contrast of a constant-amplitude frequency sweep.

use std::f64::consts::{PI, TAU};
use std::io::Read;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, Error, Result};
use crate::model::{BeamModel, InterferometerGeometry};
use crate::vibration::{
    independent_reduction, pendulum_reduction, CommonPendulum, IndependentHarmonic,
};

pub const MIN_TRACE_SAMPLES: usize = 16;

/// Accelerometer sensitivity of the reference setup [V/(m/s^2)].
pub const DEFAULT_SENSITIVITY: f64 = 0.316;

/// Lines weaker than this displacement are never reported [m].
pub const DISPLACEMENT_FLOOR: f64 = 1e-12;

/// Fraction of the strongest line below which lines are dropped.
pub const RELATIVE_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct AccelTrace {
    sample_rate: f64,
    samples: Vec<f64>,
    sensitivity: f64,
}

impl AccelTrace {
    pub fn new(sample_rate: f64, samples: Vec<f64>, sensitivity: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(invalid("sample_rate", format!("{sample_rate} must be > 0")));
        }
        if !(sensitivity > 0.0 && sensitivity.is_finite()) {
            return Err(invalid("sensitivity", format!("{sensitivity} must be > 0")));
        }
        if samples.len() < MIN_TRACE_SAMPLES {
            return Err(Error::TooFewSamples {
                got: samples.len(),
                need: MIN_TRACE_SAMPLES,
            });
        }
        if let Some(&bad) = samples.iter().find(|u| !u.is_finite()) {
            return Err(Error::NonFiniteInput(bad));
        }
        Ok(Self {
            sample_rate,
            samples,
            sensitivity,
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn sensitivity(&self) -> f64 {
        self.sensitivity
    }

    /// Reads either a `time_s,volts` CSV (rate from the mean time step) or a
    /// `volts` CSV together with `sample_rate`. A rate given alongside a time
    /// column wins.
    pub fn read_csv<R: Read>(
        reader: R,
        sample_rate: Option<f64>,
        sensitivity: f64,
    ) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers: Vec<String> = rdr
            .headers()
            .map_err(|e| invalid("trace", e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let timed = match headers
            .iter()
            .map(String::as_str)
            .collect::<Vec<_>>()
            .as_slice()
        {
            ["time_s", "volts"] => true,
            ["volts"] => false,
            _ => {
                return Err(invalid(
                    "trace",
                    "expected header `time_s,volts` or `volts`",
                ))
            }
        };
        let (mut times, mut volts) = (Vec::new(), Vec::new());
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| invalid("trace", e.to_string()))?;
            let field = |j: usize| -> Result<f64> {
                record
                    .get(j)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| {
                        invalid(
                            "trace",
                            format!("row {}: unparsable field {}", i + 2, j + 1),
                        )
                    })
            };
            if timed {
                times.push(field(0)?);
                volts.push(field(1)?);
            } else {
                volts.push(field(0)?);
            }
        }
        let rate = match (sample_rate, timed) {
            (Some(rate), _) => rate,
            (None, true) if times.len() >= 2 => {
                let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
                if !(dt > 0.0) {
                    return Err(invalid("trace", "time column must increase"));
                }
                1.0 / dt
            }
            (None, true) => {
                return Err(Error::TooFewSamples {
                    got: volts.len(),
                    need: MIN_TRACE_SAMPLES,
                })
            }
            (None, false) => {
                return Err(invalid("rate", "a `volts`-only trace needs a sample rate"))
            }
        };
        Self::new(rate, volts, sensitivity)
    }
}

/// One vibration line: a = U / k, x = a / (2 pi f)^2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumLine {
    pub frequency: f64,
    pub volts: f64,
    pub acceleration: f64,
    pub displacement: f64,
}

impl SpectrumLine {
    pub fn from_voltage(frequency: f64, volts: f64, sensitivity: f64) -> Self {
        let acceleration = volts / sensitivity;
        let w = TAU * frequency;
        Self {
            frequency,
            volts,
            acceleration,
            displacement: acceleration / (w * w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Bin width sample_rate / n [Hz].
    pub resolution: f64,
    /// Ascending in frequency.
    pub lines: Vec<SpectrumLine>,
}

impl Spectrum {
    /// Line closest to `f` within half a bin.
    pub fn line_near(&self, f: f64) -> Option<&SpectrumLine> {
        self.lines
            .iter()
            .filter(|l| (l.frequency - f).abs() <= 0.5 * self.resolution)
            .min_by(|a, b| (a.frequency - f).abs().total_cmp(&(b.frequency - f).abs()))
    }
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 * (1.0 - (TAU * i as f64 / n as f64).cos()))
        .collect()
}

/// Amplitude response of the Hann window to a tone `delta` bins away, 1 at 0.
fn hann_kernel(delta: f64) -> f64 {
    if delta == 0.0 {
        return 1.0;
    }
    if (delta.abs() - 1.0).abs() < 1e-9 {
        return 0.5;
    }
    let x = PI * delta;
    (x.sin() / x / (1.0 - delta * delta)).abs()
}

/// Single-sided tone amplitude per bin 0..=n/2 (Hann window, amplitude-corrected).
fn amplitude_spectrum(samples: &[f64]) -> Vec<f64> {
    let n = samples.len();
    let window = hann(n);
    let mut buf: Vec<Complex64> = samples
        .iter()
        .zip(&window)
        .map(|(u, w)| Complex64::new(u * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    // factor 2 for the folded negative frequencies, 2 for the window's coherent gain
    buf[..=n / 2]
        .iter()
        .map(|c| 4.0 * c.norm() / n as f64)
        .collect()
}

/// Hann-windowed DFT of the voltage trace, reduced to its spectral peaks.
///
/// Each local maximum above DC is refined from the ratio to its larger
/// neighbour (exact for an isolated tone under the Hann window), converted
/// through the calibration chain, and kept if its displacement exceeds
/// max(1 pm, 1 % of the strongest line).
pub fn analyze_trace(trace: &AccelTrace) -> Spectrum {
    let n = trace.samples.len();
    let resolution = trace.sample_rate / n as f64;
    let mag = amplitude_spectrum(&trace.samples);
    let last = mag.len() - 1;

    let mut lines = Vec::new();
    for k in 1..last {
        if !(mag[k] > mag[k - 1] && mag[k] >= mag[k + 1]) {
            continue;
        }
        let (left, right) = (mag[k - 1], mag[k + 1]);
        let (neighbour, sign) = if right >= left {
            (right, 1.0)
        } else {
            (left, -1.0)
        };
        let alpha = neighbour / mag[k];
        let delta = sign * (2.0 * alpha - 1.0) / (alpha + 1.0);
        let delta = delta.clamp(-0.5, 0.5);
        let volts = mag[k] / hann_kernel(delta);
        lines.push(SpectrumLine::from_voltage(
            (k as f64 + delta) * resolution,
            volts,
            trace.sensitivity,
        ));
    }

    let strongest = lines.iter().map(|l| l.displacement).fold(0.0, f64::max);
    let floor = DISPLACEMENT_FLOOR.max(RELATIVE_FLOOR * strongest);
    lines.retain(|l| l.displacement >= floor && l.frequency > 0.0);
    Spectrum { resolution, lines }
}

/// Mean-square voltage of the trace.
pub fn mean_square(trace: &AccelTrace) -> f64 {
    trace.samples.iter().map(|u| u * u).sum::<f64>() / trace.samples.len() as f64
}

/// Mean-square voltage recovered from the Hann-windowed DFT, normalised by
/// the window's mean square (3/8).
pub fn windowed_power(trace: &AccelTrace) -> f64 {
    let n = trace.samples.len();
    let window = hann(n);
    let mut buf: Vec<Complex64> = trace
        .samples
        .iter()
        .zip(&window)
        .map(|(u, w)| Complex64::new(u * w, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let energy: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
    let window_ms = window.iter().map(|w| w * w).sum::<f64>() / n as f64;
    energy / (n * n) as f64 / window_ms
}

/// 20 log10(x_before / x_after) at the lines matching `f` in each spectrum.
pub fn isolation_gain(before: &Spectrum, after: &Spectrum, f: f64) -> Result<f64> {
    let b = before.line_near(f).ok_or(Error::LineNotFound(f))?;
    let a = after.line_near(f).ok_or(Error::LineNotFound(f))?;
    Ok(20.0 * (b.displacement / a.displacement).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// All gratings oscillate together.
    CommonPendulum,
    /// Each grating oscillates with the same amplitude and frequency but its own phase.
    IndependentHarmonic,
}

/// Closed-form reduction at fixed amplitude for every frequency in `grid`,
/// returned in grid order.
pub fn predict_sweep(
    geom: &InterferometerGeometry,
    beam: &BeamModel,
    amplitude: f64,
    grid: &[f64],
    mode: SweepMode,
) -> Result<Vec<(f64, f64)>> {
    if grid.is_empty() {
        return Err(invalid("frequencies", "grid is empty"));
    }
    if let Some(&bad) = grid.iter().find(|f| !(f.is_finite() && **f > 0.0)) {
        return Err(invalid(
            "frequencies",
            format!("{bad} Hz is not a positive frequency"),
        ));
    }
    if !(amplitude >= 0.0 && amplitude.is_finite()) {
        return Err(invalid("amplitude", format!("{amplitude} must be >= 0")));
    }
    Ok(grid
        .par_iter()
        .map(|&f| {
            let r = match mode {
                SweepMode::CommonPendulum => pendulum_reduction(
                    &CommonPendulum {
                        amplitude,
                        frequency: f,
                    },
                    geom,
                    beam,
                ),
                SweepMode::IndependentHarmonic => independent_reduction(
                    &IndependentHarmonic {
                        amplitudes: [amplitude; 3],
                        frequencies: [f; 3],
                    },
                    geom,
                ),
            };
            (f, r)
        })
        .collect())
}
