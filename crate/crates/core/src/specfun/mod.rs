//! Numerical kernels used by the closed forms: Bessel J0, Gaussian averages
//! by Gauss-Hermite quadrature, and the fixed-period sinusoid fit.

mod bessel;
mod fit;
mod quadrature;

pub use bessel::{bessel_j0, j0};
pub use fit::{fit_sinusoid, SinusoidFit};
pub use quadrature::{gauss_average, gauss_hermite_rule, QuadratureSpec, MAX_NODES};
