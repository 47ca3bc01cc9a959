//! Physical constants and the quantity-string grammar used at the CLI boundary.
//!
//! Everything inside the library is SI. Human units (amu, nm, mrad, ...) only
//! appear when parsing or formatting quantity strings such as `990nm` or
//! `5.55e-5rad/s`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

/// Planck constant [J s] (CODATA 2018, exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant [J s].
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Unified atomic mass unit [kg] (CODATA 2018).
pub const AMU: f64 = 1.660_539_066_60e-27;
/// Standard gravity [m/s^2], the default for `g`.
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Dimension of a parsed quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Length,
    Time,
    Frequency,
    Angle,
    Mass,
    Velocity,
    AngularVelocity,
    Acceleration,
    Voltage,
    /// Accelerometer output per unit acceleration.
    Sensitivity,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Length => "length",
            Dimension::Time => "time",
            Dimension::Frequency => "frequency",
            Dimension::Angle => "angle",
            Dimension::Mass => "mass",
            Dimension::Velocity => "velocity",
            Dimension::AngularVelocity => "angular velocity",
            Dimension::Acceleration => "acceleration",
            Dimension::Voltage => "voltage",
            Dimension::Sensitivity => "sensitivity",
        };
        f.write_str(s)
    }
}

/// A recognised unit suffix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit {
    pub suffix: &'static str,
    pub dimension: Dimension,
    /// Multiply a value in this unit by `scale` to get SI.
    pub scale: f64,
}

// Longest suffixes first so that `ms` wins over `s` and `rad/s` over `s`.
const UNITS: &[Unit] = &[
    Unit {
        suffix: "mV/(m/s^2)",
        dimension: Dimension::Sensitivity,
        scale: 1e-3,
    },
    Unit {
        suffix: "V/(m/s^2)",
        dimension: Dimension::Sensitivity,
        scale: 1.0,
    },
    Unit {
        suffix: "m/s^2",
        dimension: Dimension::Acceleration,
        scale: 1.0,
    },
    Unit {
        suffix: "rad/s",
        dimension: Dimension::AngularVelocity,
        scale: 1.0,
    },
    Unit {
        suffix: "mrad",
        dimension: Dimension::Angle,
        scale: 1e-3,
    },
    Unit {
        suffix: "amu",
        dimension: Dimension::Mass,
        scale: AMU,
    },
    Unit {
        suffix: "m/s",
        dimension: Dimension::Velocity,
        scale: 1.0,
    },
    Unit {
        suffix: "rad",
        dimension: Dimension::Angle,
        scale: 1.0,
    },
    Unit {
        suffix: "nm",
        dimension: Dimension::Length,
        scale: 1e-9,
    },
    Unit {
        suffix: "pm",
        dimension: Dimension::Length,
        scale: 1e-12,
    },
    Unit {
        suffix: "um",
        dimension: Dimension::Length,
        scale: 1e-6,
    },
    Unit {
        suffix: "mm",
        dimension: Dimension::Length,
        scale: 1e-3,
    },
    Unit {
        suffix: "ms",
        dimension: Dimension::Time,
        scale: 1e-3,
    },
    Unit {
        suffix: "Hz",
        dimension: Dimension::Frequency,
        scale: 1.0,
    },
    Unit {
        suffix: "kg",
        dimension: Dimension::Mass,
        scale: 1.0,
    },
    Unit {
        suffix: "mV",
        dimension: Dimension::Voltage,
        scale: 1e-3,
    },
    Unit {
        suffix: "V",
        dimension: Dimension::Voltage,
        scale: 1.0,
    },
    Unit {
        suffix: "m",
        dimension: Dimension::Length,
        scale: 1.0,
    },
    Unit {
        suffix: "s",
        dimension: Dimension::Time,
        scale: 1.0,
    },
];

/// Looks up a unit by its exact suffix.
pub fn unit(suffix: &str) -> Option<Unit> {
    UNITS.iter().copied().find(|u| u.suffix == suffix)
}

/// An SI value tagged with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

/// Parses `<number><unit>` into SI, e.g. `990nm` -> 9.9e-7 (length).
pub fn parse_quantity(text: &str) -> Result<Quantity> {
    let (number, unit) = split_quantity(text)?;
    let value = number * unit.scale;
    if !value.is_finite() {
        return Err(Error::MalformedQuantity(text.to_string()));
    }
    Ok(Quantity {
        value,
        dimension: unit.dimension,
    })
}

/// Splits a quantity string into its numeric part and unit.
pub(crate) fn split_quantity(text: &str) -> Result<(f64, Unit)> {
    let trimmed = text.trim();
    for u in UNITS {
        if let Some(head) = trimmed.strip_suffix(u.suffix) {
            if let Ok(number) = head.trim_end().parse::<f64>() {
                if number.is_finite() {
                    return Ok((number, *u));
                }
            }
        }
    }
    Err(Error::MalformedQuantity(text.to_string()))
}

/// Parses a quantity and checks that it has the expected dimension.
pub fn parse_expecting(text: &str, dimension: Dimension) -> Result<f64> {
    let q = parse_quantity(text)?;
    if q.dimension != dimension {
        return Err(Error::MalformedQuantity(format!(
            "{text} (expected a {dimension}, got a {})",
            q.dimension
        )));
    }
    Ok(q.value)
}

/// Formats an SI value in the given unit, e.g. `format_quantity(9.9e-7, "nm")` -> `"990nm"`.
///
/// The number is printed with the shortest representation that round-trips,
/// so `parse_quantity(format_quantity(x, u))` recovers `x` up to the one
/// rounding of the unit conversion.
pub fn format_quantity(si_value: f64, suffix: &str) -> Result<String> {
    let u = unit(suffix).ok_or_else(|| Error::MalformedQuantity(suffix.to_string()))?;
    Ok(format!("{}{}", si_value / u.scale, u.suffix))
}
