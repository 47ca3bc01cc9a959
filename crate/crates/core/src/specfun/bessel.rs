#![allow(clippy::excessive_precision, clippy::unreadable_literal)]

use std::f64::consts::{FRAC_2_PI, FRAC_PI_4};

use crate::error::{Error, Result};

/// Below this argument the power series is summed directly.
const SERIES_LIMIT: f64 = 8.0;

/// Bessel function of the first kind of order zero.
///
/// Absolute error is below 1e-10 on |x| <= 50 (in practice ~1e-14).
pub fn bessel_j0(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFiniteInput(x));
    }
    Ok(j0(x))
}

/// Infallible J0 for arguments already known to be finite. Returns NaN otherwise.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        series(x)
    } else {
        hankel(x)
    }
}

/// sum_k (-x^2/4)^k / (k!)^2
fn series(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term.abs() < 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

// Hankel form J0(x) = sqrt(2/(pi x)) [P0(x) cos(x - pi/4) - Q0(x) sin(x - pi/4)]
// with P0, Q0 as rational functions of 25/x^2 (Cephes j0.c coefficients).

const PP: [f64; 7] = [
    7.96936729297347051624e-4,
    8.28352392107440799803e-2,
    1.23953371646414299388e0,
    5.44725003058768775090e0,
    8.74716500199817011941e0,
    5.30324038235394892183e0,
    9.99999999999999997821e-1,
];
const PQ: [f64; 7] = [
    9.24408810558863637013e-4,
    8.56288474354474431428e-2,
    1.25352743901058953537e0,
    5.47097740330417105182e0,
    8.76190883237069594232e0,
    5.30605288235394617618e0,
    1.00000000000000000218e0,
];
const QP: [f64; 8] = [
    -1.13663838898469149931e-2,
    -1.28252718670509318512e0,
    -1.95539544257735972385e1,
    -9.32060152123768231369e1,
    -1.77681167980488050595e2,
    -1.47077505154951170175e2,
    -5.14105326766599330220e1,
    -6.05014350600728481186e0,
];
// Leading coefficient 1 omitted.
const QQ: [f64; 7] = [
    6.43178256118178023184e1,
    8.56430025976980587198e2,
    3.88240183605401609683e3,
    7.24046774195652478189e3,
    5.93072701187316984827e3,
    2.06209331660327847417e3,
    2.42005740240291393179e2,
];

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, c| acc * x + c)
}

fn horner_monic(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(1.0, |acc, c| acc * x + c)
}

fn hankel(x: f64) -> f64 {
    let w = 5.0 / x;
    let z = w * w;
    let p = horner(&PP, z) / horner(&PQ, z);
    let q = horner(&QP, z) / horner_monic(&QQ, z);
    let phase = x - FRAC_PI_4;
    (p * phase.cos() - w * q * phase.sin()) * (FRAC_2_PI / x).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-10);
        assert!((bessel_j0(1.0).unwrap() - 0.7651976865579666).abs() < 1e-10);
    }

    #[test]
    fn even() {
        for &x in &[0.3, 2.0, 7.99, 8.0, 13.7, 49.0] {
            assert_eq!(j0(x), j0(-x));
        }
    }

    #[test]
    fn rejects_non_finite() {
        assert!(matches!(bessel_j0(f64::NAN), Err(Error::NonFiniteInput(_))));
        assert!(matches!(
            bessel_j0(f64::INFINITY),
            Err(Error::NonFiniteInput(_))
        ));
    }

    #[test]
    fn branches_meet_at_the_switch() {
        // Both forms are accurate on an overlap band around the switch point.
        for i in 0..200 {
            let x = 6.0 + 4.0 * i as f64 / 200.0;
            assert!((series(x) - hankel(x)).abs() < 1e-12, "x = {x}");
        }
    }
}
