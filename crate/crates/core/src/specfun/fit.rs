use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Least-squares fit of `offset + amplitude * cos(2 pi x / period - phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub offset: f64,
    /// Always >= 0.
    pub amplitude: f64,
    /// In (-pi, pi].
    pub phase: f64,
    /// Square root of the residual sum of squares.
    pub residual_norm: f64,
    /// Covariance of (offset, a, b) where a = B cos(phase), b = B sin(phase).
    /// Zero when there are only three samples' worth of degrees of freedom.
    pub covariance: [[f64; 3]; 3],
    pub samples: usize,
}

impl SinusoidFit {
    /// amplitude / offset
    pub fn visibility(&self) -> f64 {
        self.amplitude / self.offset
    }

    /// Delta-method standard error of the visibility.
    pub fn visibility_stderr(&self) -> f64 {
        let (c, b) = (self.offset, self.amplitude);
        let cov = &self.covariance;
        if b == 0.0 {
            // Direction of the amplitude is undefined; use the larger of the two components.
            return cov[1][1].max(cov[2][2]).sqrt() / c;
        }
        let (cp, sp) = (self.phase.cos(), self.phase.sin());
        let grad = [-b / (c * c), cp / c, sp / c];
        let mut var = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                var += grad[i] * cov[i][j] * grad[j];
            }
        }
        var.max(0.0).sqrt()
    }
}

/// Fits `C + a cos(kx) + b sin(kx)` by linear least squares with k = 2 pi / period.
///
/// Needs at least 5 samples whose positions span at least one period and counts
/// that are not all equal. The result does not depend on the order of `samples`.
pub fn fit_sinusoid(samples: &[(f64, f64)], period: f64) -> Result<SinusoidFit> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::DegenerateFit("period must be positive"));
    }
    if samples.len() < 5 {
        return Err(Error::DegenerateFit("fewer than 5 samples"));
    }
    if samples
        .iter()
        .any(|(x, y)| !x.is_finite() || !y.is_finite())
    {
        return Err(Error::DegenerateFit("non-finite sample"));
    }

    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let span = sorted[sorted.len() - 1].0 - sorted[0].0;
    if span < period * (1.0 - 1e-9) {
        return Err(Error::DegenerateFit("samples span less than one period"));
    }
    let first = sorted[0].1;
    if sorted.iter().all(|s| s.1 == first) {
        return Err(Error::DegenerateFit("all counts equal"));
    }

    let k = TAU / period;
    let mut normal = [[0.0; 3]; 3];
    let mut rhs = [0.0; 3];
    for &(x, y) in &sorted {
        let basis = [1.0, (k * x).cos(), (k * x).sin()];
        for i in 0..3 {
            rhs[i] += basis[i] * y;
            for j in 0..3 {
                normal[i][j] += basis[i] * basis[j];
            }
        }
    }
    let inverse = invert_spd(&normal).ok_or(Error::DegenerateFit("singular normal equations"))?;
    let mut beta = [0.0; 3];
    for i in 0..3 {
        beta[i] = (0..3).map(|j| inverse[i][j] * rhs[j]).sum();
    }
    let [offset, a, b] = beta;

    let rss: f64 = sorted
        .iter()
        .map(|&(x, y)| {
            let r = y - (offset + a * (k * x).cos() + b * (k * x).sin());
            r * r
        })
        .sum();
    let dof = sorted.len() - 3;
    let sigma2 = rss / dof as f64;
    let mut covariance = inverse;
    for row in &mut covariance {
        for v in row.iter_mut() {
            *v *= sigma2;
        }
    }

    Ok(SinusoidFit {
        offset,
        amplitude: a.hypot(b),
        phase: b.atan2(a),
        residual_norm: rss.sqrt(),
        covariance,
        samples: sorted.len(),
    })
}

/// Inverse of a symmetric positive-definite 3x3 matrix via Cholesky.
fn invert_spd(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut l = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..=i {
            let mut s = m[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            if i == j {
                if s <= 1e-12 * m[i][i].abs().max(f64::MIN_POSITIVE) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // Solve L L^T X = I column by column.
    let mut inv = [[0.0; 3]; 3];
    for col in 0..3 {
        let mut y = [0.0; 3];
        for i in 0..3 {
            let mut s = if i == col { 1.0 } else { 0.0 };
            for p in 0..i {
                s -= l[i][p] * y[p];
            }
            y[i] = s / l[i][i];
        }
        for i in (0..3).rev() {
            let mut s = y[i];
            for p in i + 1..3 {
                s -= l[p][i] * inv[p][col];
            }
            inv[i][col] = s / l[i][i];
        }
    }
    Some(inv)
}
