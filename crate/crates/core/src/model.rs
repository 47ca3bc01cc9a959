//! Interferometer geometry, beam and environment, and the basic Talbot relations.

use std::f64::consts::FRAC_PI_2;

use crate::error::{invalid, Result};
use crate::units::{PLANCK, STANDARD_GRAVITY};

fn finite(name: &'static str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(name, format!("{x} is not finite")))
    }
}

fn positive(name: &'static str, x: f64) -> Result<f64> {
    if finite(name, x)? > 0.0 {
        Ok(x)
    } else {
        Err(invalid(name, format!("{x} must be > 0")))
    }
}

/// Three equidistant gratings of equal period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerGeometry {
    period: f64,
    separation: f64,
    talbot_order: u32,
    tilt: f64,
}

impl InterferometerGeometry {
    /// `period` d and `separation` L in metres, Talbot order 1, no tilt.
    pub fn new(period: f64, separation: f64) -> Result<Self> {
        Ok(Self {
            period: positive("d", period)?,
            separation: positive("L", separation)?,
            talbot_order: 1,
            tilt: 0.0,
        })
    }

    pub fn with_talbot_order(mut self, order: u32) -> Result<Self> {
        if order == 0 {
            return Err(invalid("N", "Talbot order must be >= 1"));
        }
        self.talbot_order = order;
        Ok(self)
    }

    /// Tilt of the grating bars from the vertical [rad], |tilt| < pi/2.
    pub fn with_tilt(mut self, tilt: f64) -> Result<Self> {
        if finite("theta_G", tilt)?.abs() >= FRAC_PI_2 {
            return Err(invalid("theta_G", format!("|{tilt}| must be < pi/2")));
        }
        self.tilt = tilt;
        Ok(self)
    }

    pub fn with_separation(self, separation: f64) -> Result<Self> {
        Ok(Self {
            separation: positive("L", separation)?,
            ..self
        })
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    pub fn talbot_order(&self) -> u32 {
        self.talbot_order
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }
}

/// Particle mass and a Gaussian forward-velocity distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamModel {
    mass: f64,
    velocity: f64,
    velocity_spread: f64,
}

impl BeamModel {
    /// `velocity_spread` is the standard deviation of the forward velocity; 0 is a
    /// monochromatic beam. The spread must stay below the mean velocity.
    pub fn new(mass: f64, velocity: f64, velocity_spread: f64) -> Result<Self> {
        let mass = positive("m", mass)?;
        let velocity = positive("v_z", velocity)?;
        let velocity_spread = finite("sigma_v", velocity_spread)?;
        if velocity_spread < 0.0 {
            return Err(invalid("sigma_v", "must be >= 0"));
        }
        if velocity_spread >= velocity {
            return Err(invalid(
                "sigma_v",
                format!("{velocity_spread} must be < v_z = {velocity}"),
            ));
        }
        Ok(Self {
            mass,
            velocity,
            velocity_spread,
        })
    }

    pub fn monochromatic(mass: f64, velocity: f64) -> Result<Self> {
        Self::new(mass, velocity, 0.0)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn velocity(&self) -> f64 {
        self.velocity
    }

    pub fn velocity_spread(&self) -> f64 {
        self.velocity_spread
    }

    /// Same beam with a different mean velocity and spread.
    pub fn with_velocity(self, velocity: f64, velocity_spread: f64) -> Result<Self> {
        Self::new(self.mass, velocity, velocity_spread)
    }
}

/// Rotation rate about the grating-bar axis and gravitational acceleration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertialEnvironment {
    rotation: f64,
    gravity: f64,
}

impl InertialEnvironment {
    /// `rotation` Omega_0 [rad/s] may have either sign; `gravity` g [m/s^2] must be >= 0.
    pub fn new(rotation: f64, gravity: f64) -> Result<Self> {
        let rotation = finite("Omega_0", rotation)?;
        if finite("g", gravity)? < 0.0 {
            return Err(invalid("g", "must be >= 0"));
        }
        Ok(Self { rotation, gravity })
    }

    pub fn rotation_only(rotation: f64) -> Result<Self> {
        Self::new(rotation, 0.0)
    }

    pub fn gravity_only(gravity: f64) -> Result<Self> {
        Self::new(0.0, gravity)
    }

    /// Earth's rotation component `rotation` plus standard gravity.
    pub fn earth(rotation: f64) -> Result<Self> {
        Self::new(rotation, STANDARD_GRAVITY)
    }

    pub fn rotation(&self) -> f64 {
        self.rotation
    }

    pub fn gravity(&self) -> f64 {
        self.gravity
    }
}

/// lambda_dB = h / (m v_z).
pub fn de_broglie_wavelength(beam: &BeamModel) -> f64 {
    PLANCK / (beam.mass * beam.velocity)
}

/// L_T = d^2 / lambda_dB.
pub fn talbot_length(geom: &InterferometerGeometry, beam: &BeamModel) -> f64 {
    geom.period * geom.period / de_broglie_wavelength(beam)
}

/// Time of flight from the first to the third grating, 2L / v_z.
pub fn flight_time(geom: &InterferometerGeometry, beam: &BeamModel) -> f64 {
    2.0 * geom.separation / beam.velocity
}

/// Forward velocity at which `geom.separation()` equals `order` Talbot lengths.
pub fn talbot_velocity(geom: &InterferometerGeometry, mass: f64, order: u32) -> f64 {
    PLANCK * geom.separation / (order as f64 * geom.period * geom.period * mass)
}
