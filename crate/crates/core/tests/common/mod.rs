//! Reference computations shared by the integration tests. None of them call
//! the closed forms they are used to check.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use talbot::inertial::coriolis_reduction;
use talbot::model::{talbot_length, BeamModel, InertialEnvironment, InterferometerGeometry};
use talbot::units::PLANCK;

const FRACTION_BITS: u64 = 320;

/// Splits a finite double into an exact mantissa and binary exponent.
fn exact(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64;
    let mut mantissa = (bits & ((1u64 << 52) - 1)) as i64;
    let e = if exponent == 0 {
        -1074
    } else {
        mantissa |= 1 << 52;
        exponent - 1075
    };
    let m = BigInt::from(if x < 0.0 { -mantissa } else { mantissa });
    (m, e)
}

/// J0(x) = sum_k (-x^2/4)^k / (k!)^2, summed in 320-bit fixed point from the
/// exact binary value of `x`. Accurate to far below 1e-15 for |x| <= 60.
pub fn j0_series(x: f64) -> f64 {
    let (m, e) = exact(x.abs());
    if m.is_zero() {
        return 1.0;
    }
    // x^2/4 = m^2 2^(2e-2); keep numerator and a power-of-two shift
    let num = &m * &m;
    let shift = 2 * e - 2;
    let one = BigInt::one() << FRACTION_BITS;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k: u64 = 0;
    loop {
        k += 1;
        let mut t = &term * &num;
        if shift >= 0 {
            t <<= shift as usize;
        } else {
            t >>= (-shift) as usize;
        }
        term = -(t / BigInt::from(k * k));
        sum += &term;
        if k as f64 > x.abs() && term.abs() < BigInt::from(16) {
            break;
        }
    }
    let scaled = sum.to_f64().expect("finite");
    scaled / 2f64.powi(FRACTION_BITS as i32)
}

/// Bisection on log(mass) for R_C(m) = 1/e given a geometry that depends on m.
fn bisect_mass<F: Fn(f64) -> f64>(reduction: F) -> f64 {
    let target = (-1f64).exp();
    let (mut lo, mut hi) = (1e-30f64.ln(), 1e-15f64.ln());
    assert!(reduction(lo.exp()) > target && reduction(hi.exp()) < target);
    while hi - lo > 1e-14 {
        let mid = 0.5 * (lo + hi);
        if reduction(mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Mass at which R_C = 1/e when the separation is the first Talbot length of
/// period `d` at velocity `v`.
pub fn mass_bound_by_bisection_fixed_period(d: f64, v: f64, sigma: f64, omega: f64) -> f64 {
    let env = InertialEnvironment::rotation_only(omega).unwrap();
    bisect_mass(|m| {
        let beam = BeamModel::new(m, v, sigma).unwrap();
        let probe = InterferometerGeometry::new(d, 1.0).unwrap();
        let geom = probe.with_separation(talbot_length(&probe, &beam)).unwrap();
        coriolis_reduction(&geom, &beam, &env)
    })
}

/// Mass at which R_C = 1/e at separation `l` with the period chosen so that
/// l is the first Talbot length, d = sqrt(h l / (m v)).
pub fn mass_bound_by_bisection_fixed_length(l: f64, v: f64, sigma: f64, omega: f64) -> f64 {
    let env = InertialEnvironment::rotation_only(omega).unwrap();
    bisect_mass(|m| {
        let beam = BeamModel::new(m, v, sigma).unwrap();
        let d = (PLANCK * l / (m * v)).sqrt();
        let geom = InterferometerGeometry::new(d, l).unwrap();
        coriolis_reduction(&geom, &beam, &env)
    })
}

/// Small deterministic generator for parameter sweeps (SplitMix64).
pub struct Sweep(u64);

impl Sweep {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }
}
