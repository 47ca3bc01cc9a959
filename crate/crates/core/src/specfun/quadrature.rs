//! Gaussian expectations by Gauss-Hermite quadrature.
//!
//! E[f(V)] for V ~ N(mean, sigma^2) is evaluated as sum_i w_i f(mean + sqrt(2) sigma x_i)
//! with the physicists' Hermite nodes x_i and weights normalised to sum to one.
//! Convergence is checked by comparing against a rule with twice the nodes;
//! the node count keeps doubling up to [`MAX_NODES`].

use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const MAX_NODES: usize = 1025;

/// Node count and convergence tolerance for [`gauss_average`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    node_count: usize,
    relative_tolerance: f64,
}

impl QuadratureSpec {
    pub fn new(node_count: usize, relative_tolerance: f64) -> Result<Self> {
        if !(2..MAX_NODES).contains(&node_count) {
            return Err(invalid(
                "node_count",
                format!("{node_count} not in [2, {MAX_NODES})"),
            ));
        }
        if !(relative_tolerance > 0.0 && relative_tolerance <= 1e-2) {
            return Err(invalid(
                "relative_tolerance",
                format!("{relative_tolerance} not in (0, 1e-2]"),
            ));
        }
        Ok(Self {
            node_count,
            relative_tolerance,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn relative_tolerance(&self) -> f64 {
        self.relative_tolerance
    }
}

impl Default for QuadratureSpec {
    /// 61 nodes, 1e-10 relative tolerance.
    fn default() -> Self {
        Self {
            node_count: 61,
            relative_tolerance: 1e-10,
        }
    }
}

type Rule = Arc<Vec<(f64, f64)>>;

/// Nodes and probability weights (summing to 1) of the `n`-point Gauss-Hermite rule.
///
/// Rules are computed once per node count and cached.
pub fn gauss_hermite_rule(n: usize) -> Rule {
    static CACHE: OnceLock<Mutex<HashMap<usize, Rule>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&n) {
        return rule.clone();
    }
    let rule = Arc::new(golub_welsch(n));
    cache.lock().unwrap().entry(n).or_insert(rule).clone()
}

/// Eigen-decomposition of the symmetric tridiagonal Jacobi matrix of the
/// Hermite polynomials. Only the first component of each eigenvector is tracked;
/// its square is the normalised weight.
fn golub_welsch(n: usize) -> Vec<(f64, f64)> {
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 < n {
                ((i + 1) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let mut first = vec![0.0; n];
    first[0] = 1.0;
    implicit_ql(&mut diag, &mut off, &mut first);

    let mut rule: Vec<(f64, f64)> = diag
        .into_iter()
        .zip(first.into_iter().map(|z| z * z))
        .collect();
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrise to remove the O(eps) asymmetry left by the iteration.
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (rule[j].0 - rule[i].0);
        let w = 0.5 * (rule[i].1 + rule[j].1);
        rule[i] = (-x, w);
        rule[j] = (x, w);
    }
    if n % 2 == 1 {
        rule[n / 2].0 = 0.0;
    }
    let total: f64 = rule.iter().map(|r| r.1).sum();
    for r in &mut rule {
        r.1 /= total;
    }
    rule
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
/// `off[i]` couples rows i and i+1; `first` receives row 0 of the eigenvector matrix.
fn implicit_ql(diag: &mut [f64], off: &mut [f64], first: &mut [f64]) {
    let n = diag.len();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 100, "tridiagonal QL failed to converge");

            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;

                let z = first[i + 1];
                first[i + 1] = s * first[i] + c * z;
                first[i] = c * first[i] - s * z;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}

fn apply<F>(rule: &[(f64, f64)], f: &F, mean: f64, sigma: f64) -> (Complex64, f64)
where
    F: Fn(f64) -> Complex64,
{
    let mut sum = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    for &(x, w) in rule {
        let value = f(mean + SQRT_2 * sigma * x);
        sum += value * w;
        magnitude += w * value.norm();
    }
    (sum, magnitude)
}

/// E[f(V)] for V ~ N(mean, sigma^2). `sigma == 0` returns `f(mean)` exactly.
///
/// Converged when successive rules agree to `relative_tolerance` of the result,
/// or to rounding level of sum |f| w when the average cancels almost completely.
pub fn gauss_average<F>(f: F, mean: f64, sigma: f64, spec: &QuadratureSpec) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    if !mean.is_finite() {
        return Err(Error::NonFiniteInput(mean));
    }
    if !sigma.is_finite() {
        return Err(Error::NonFiniteInput(sigma));
    }
    if sigma < 0.0 {
        return Err(invalid("sigma", "must be >= 0"));
    }
    if sigma == 0.0 {
        return Ok(f(mean));
    }

    let mut nodes = spec.node_count;
    let (mut coarse, _) = apply(&gauss_hermite_rule(nodes), &f, mean, sigma);
    while nodes < MAX_NODES {
        nodes = (2 * nodes).min(MAX_NODES);
        let (fine, magnitude) = apply(&gauss_hermite_rule(nodes), &f, mean, sigma);
        let change = (fine - coarse).norm();
        if change <= spec.relative_tolerance * fine.norm()
            || change <= 64.0 * f64::EPSILON * magnitude
        {
            return Ok(fine);
        }
        if nodes == MAX_NODES {
            return Err(Error::QuadratureNotConverged {
                nodes,
                relative_change: change / fine.norm(),
            });
        }
        coarse = fine;
    }
    unreachable!("node_count is validated to be below MAX_NODES")
}
