//! Synthetic interferograms and visibility extraction.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{invalid, Error, Result};
use crate::specfun::fit_sinusoid;

pub const MIN_SCAN_POINTS: usize = 5;

/// Molecule counts against third-grating displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    positions: Vec<f64>,
    counts: Vec<f64>,
    period: f64,
}

impl FringeScan {
    pub fn new(positions: Vec<f64>, counts: Vec<f64>, period: f64) -> Result<Self> {
        if positions.len() != counts.len() {
            return Err(invalid(
                "counts",
                format!("{} positions but {} counts", positions.len(), counts.len()),
            ));
        }
        if positions.len() < MIN_SCAN_POINTS {
            return Err(Error::TooFewSamples {
                got: positions.len(),
                need: MIN_SCAN_POINTS,
            });
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(invalid("period", format!("{period} must be > 0")));
        }
        if positions.iter().any(|x| !x.is_finite()) || positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid(
                "positions",
                "must be finite and strictly increasing",
            ));
        }
        if counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(invalid("counts", "must be finite and non-negative"));
        }
        Ok(Self {
            positions,
            counts,
            period,
        })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Same scan with every count multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.positions.clone(),
            self.counts.iter().map(|c| c * factor).collect(),
            self.period,
        )
    }

    /// Reads a `position_m,counts` CSV.
    pub fn read_csv<R: Read>(reader: R, period: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| invalid("scan", e.to_string()))?
            .clone();
        if headers.iter().collect::<Vec<_>>() != ["position_m", "counts"] {
            return Err(invalid("scan", "expected header `position_m,counts`"));
        }
        let (mut positions, mut counts) = (Vec::new(), Vec::new());
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| invalid("scan", e.to_string()))?;
            let field = |j: usize| -> Result<f64> {
                record
                    .get(j)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| {
                        invalid("scan", format!("row {}: unparsable field {}", i + 2, j + 1))
                    })
            };
            positions.push(field(0)?);
            counts.push(field(1)?);
        }
        Self::new(positions, counts, period)
    }

    /// Writes a `position_m,counts` CSV with LF line endings; values use Rust's
    /// shortest round-trip formatting so a re-read is bit-exact.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "position_m,counts")?;
        for (x, c) in self.positions.iter().zip(&self.counts) {
            writeln!(out, "{x:e},{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    None,
    Poisson,
}

/// `counts_i = offset (1 + V cos(2 pi x_i / d - phase))` on `n_points` equally
/// spaced positions covering `[0, span)`, optionally Poisson-sampled.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_scan(
    visibility: f64,
    offset: f64,
    phase: f64,
    period: f64,
    n_points: usize,
    span: f64,
    noise: Noise,
    seed: u64,
) -> Result<FringeScan> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::InvalidVisibility(visibility));
    }
    if !(offset > 0.0 && offset.is_finite()) {
        return Err(invalid("offset", format!("{offset} must be > 0")));
    }
    if !phase.is_finite() {
        return Err(invalid("phase", "must be finite"));
    }
    if !(period > 0.0 && period.is_finite()) {
        return Err(invalid("period", format!("{period} must be > 0")));
    }
    if !(span >= period && span.is_finite()) {
        return Err(invalid(
            "span",
            format!("{span} must be >= the grating period {period}"),
        ));
    }
    if n_points < MIN_SCAN_POINTS {
        return Err(Error::TooFewSamples {
            got: n_points,
            need: MIN_SCAN_POINTS,
        });
    }

    let k = TAU / period;
    let step = span / n_points as f64;
    let positions: Vec<f64> = (0..n_points).map(|i| i as f64 * step).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = positions
        .iter()
        .map(|&x| {
            let mean = offset * (1.0 + visibility * (k * x - phase).cos());
            match noise {
                Noise::None => mean,
                Noise::Poisson if mean <= 0.0 => 0.0,
                Noise::Poisson => Poisson::new(mean).expect("positive mean").sample(&mut rng),
            }
        })
        .collect();
    FringeScan::new(positions, counts, period)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisibilityEstimate {
    /// amplitude / offset, clamped to [0, 1].
    pub visibility: f64,
    /// In [0, 2 pi).
    pub phase: f64,
    pub offset: f64,
    pub visibility_stderr: f64,
    /// The raw fit gave a visibility above 1.
    pub clamped: bool,
    /// Counts were flat; visibility is reported as 0 with infinite stderr.
    pub degenerate: bool,
}

pub fn extract_visibility(scan: &FringeScan) -> Result<VisibilityEstimate> {
    let samples: Vec<(f64, f64)> = scan
        .positions
        .iter()
        .copied()
        .zip(scan.counts.iter().copied())
        .collect();
    let fit = match fit_sinusoid(&samples, scan.period) {
        Ok(fit) => fit,
        Err(Error::DegenerateFit("all counts equal")) if scan.counts[0] > 0.0 => {
            return Ok(VisibilityEstimate {
                visibility: 0.0,
                phase: 0.0,
                offset: scan.counts[0],
                visibility_stderr: f64::INFINITY,
                clamped: false,
                degenerate: true,
            });
        }
        Err(e) => return Err(e),
    };
    if fit.offset <= 0.0 {
        return Err(Error::DegenerateFit("fitted offset is not positive"));
    }
    let raw = fit.visibility();
    Ok(VisibilityEstimate {
        visibility: raw.min(1.0),
        phase: fit.phase.rem_euclid(TAU),
        offset: fit.offset,
        visibility_stderr: fit.visibility_stderr(),
        clamped: raw > 1.0,
        degenerate: false,
    })
}

/// Wraps a phase difference into (-pi, pi].
pub fn phase_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}
