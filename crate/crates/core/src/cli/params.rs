//! Named run parameters: registry, presets, `key = value` config files, and
//! the precedence preset < config file < command-line flag.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::units::{parse_expecting, split_quantity, Dimension};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Quantity(Dimension),
    /// Dimensionless real.
    Number,
    /// Positive integer.
    Count,
    /// `start:stop:step` frequency range, or a single frequency.
    FrequencyRange,
}

#[derive(Debug, Clone, Copy)]
pub struct Key {
    pub name: &'static str,
    pub kind: Kind,
    pub help: &'static str,
}

const fn q(name: &'static str, dimension: Dimension, help: &'static str) -> Key {
    Key {
        name,
        kind: Kind::Quantity(dimension),
        help,
    }
}

use Dimension::*;

pub const KEYS: &[Key] = &[
    q("d", Length, "grating period"),
    q("L", Length, "grating separation"),
    Key {
        name: "N",
        kind: Kind::Count,
        help: "Talbot order",
    },
    q("theta", Angle, "grating-bar tilt from vertical"),
    q("mass", Mass, "particle mass"),
    q("v", Velocity, "mean forward velocity"),
    q("sigma-v", Velocity, "velocity standard deviation"),
    q(
        "omega",
        AngularVelocity,
        "laboratory rotation rate parallel to the grating bars",
    ),
    q("g", Acceleration, "gravitational acceleration"),
    q(
        "A",
        Length,
        "vibration amplitude (all gratings unless A1..A3 given)",
    ),
    Key {
        name: "f",
        kind: Kind::FrequencyRange,
        help: "vibration frequency, or start:stop:step range",
    },
    q(
        "phi",
        Angle,
        "oscillation phase at the first-grating crossing",
    ),
    q(
        "omega-t",
        AngularVelocity,
        "peak angular velocity of the torsion oscillation",
    ),
    q(
        "z0",
        Length,
        "position of the first grating relative to the torsion pivot",
    ),
    q("A1", Length, "amplitude of grating 1"),
    q("A2", Length, "amplitude of grating 2"),
    q("A3", Length, "amplitude of grating 3"),
    q("f1", Frequency, "frequency of grating 1"),
    q("f2", Frequency, "frequency of grating 2"),
    q("f3", Frequency, "frequency of grating 3"),
    q(
        "jitter",
        Length,
        "position standard deviation (all gratings unless sigma1..3 given)",
    ),
    q("sigma1", Length, "position standard deviation of grating 1"),
    q("sigma2", Length, "position standard deviation of grating 2"),
    q("sigma3", Length, "position standard deviation of grating 3"),
    q("d-min", Length, "smallest available grating period"),
    q("L-max", Length, "longest available grating separation"),
    Key {
        name: "V",
        kind: Kind::Number,
        help: "fringe visibility",
    },
    Key {
        name: "offset",
        kind: Kind::Number,
        help: "mean counts per scan point",
    },
    Key {
        name: "points",
        kind: Kind::Count,
        help: "scan points",
    },
    q("span", Length, "scan length"),
    Key {
        name: "samples",
        kind: Kind::Count,
        help: "Monte Carlo samples",
    },
    q("rate", Frequency, "sample rate of a volts-only trace"),
    q("sensitivity", Sensitivity, "accelerometer sensitivity"),
];

pub fn key(name: &str) -> Option<&'static Key> {
    KEYS.iter().find(|k| k.name == name)
}

pub const PRESETS: &[(&str, &[(&str, &str)])] = &[
    (
        "c70-fast",
        &[
            ("d", "990nm"),
            ("L", "0.38m"),
            ("mass", "840amu"),
            ("v", "200m/s"),
            ("sigma-v", "20m/s"),
            ("omega", "5.55e-5rad/s"),
            ("theta", "1mrad"),
        ],
    ),
    (
        "c70-slow",
        &[
            ("d", "990nm"),
            ("L", "0.38m"),
            ("mass", "840amu"),
            ("v", "100m/s"),
            ("sigma-v", "10m/s"),
            ("omega", "5.55e-5rad/s"),
            ("theta", "1mrad"),
        ],
    ),
    (
        "insulin",
        &[
            ("d", "257nm"),
            ("L", "0.4m"),
            ("mass", "5730amu"),
            ("v", "300m/s"),
            ("sigma-v", "30m/s"),
            ("omega", "5.55e-5rad/s"),
            ("theta", "1mrad"),
            ("A", "10nm"),
        ],
    ),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|(n, _)| *n).collect()
}

/// Raw parameter strings, validated against the registry on insertion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamSet {
    values: BTreeMap<&'static str, String>,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

impl ParamSet {
    pub fn set(&mut self, name: &str, value: &str) -> Result<()> {
        let key = key(name).ok_or_else(|| usage(format!("unknown parameter `{name}`")))?;
        check(key, value)?;
        self.values.insert(key.name, value.trim().to_owned());
        Ok(())
    }

    pub fn apply_preset(&mut self, name: &str) -> Result<()> {
        let (_, entries) = PRESETS.iter().find(|(n, _)| *n == name).ok_or_else(|| {
            usage(format!(
                "unknown preset `{name}` (known: {})",
                preset_names().join(", ")
            ))
        })?;
        for (k, v) in entries.iter() {
            self.set(k, v)?;
        }
        Ok(())
    }

    /// Reads `key = value` lines; `#` starts a comment, blank lines are skipped.
    pub fn apply_config(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("config line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| usage(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn raw(&self, name: &str) -> Option<&str> {
        self.values.get(name).map(String::as_str)
    }

    /// SI value of a quantity or number parameter, if present.
    pub fn get(&self, name: &str) -> Result<Option<f64>> {
        let key = key(name).expect("registered key");
        self.raw(name).map(|v| scalar(key, v)).transpose()
    }

    pub fn require(&self, name: &str) -> Result<f64> {
        self.get(name)?.ok_or_else(|| missing(name))
    }

    pub fn get_or(&self, name: &str, default: f64) -> Result<f64> {
        Ok(self.get(name)?.unwrap_or(default))
    }

    pub fn count(&self, name: &str) -> Result<Option<u64>> {
        self.raw(name).map(parse_count).transpose()
    }

    /// Frequency grid from the `f` parameter.
    pub fn frequencies(&self) -> Result<Option<Vec<f64>>> {
        self.raw("f").map(parse_range).transpose()
    }
}

pub fn missing(name: &str) -> Error {
    let help = key(name).map(|k| k.help).unwrap_or("");
    usage(format!("missing required parameter --{name} ({help})"))
}

fn parse_count(text: &str) -> Result<u64> {
    let t = text.trim();
    // accept 1e6-style counts as long as they are integral
    let n: f64 = t
        .parse()
        .map_err(|_| Error::MalformedQuantity(t.to_owned()))?;
    if n >= 1.0 && n.fract() == 0.0 && n <= 9.007_199_254_740_992e15 {
        Ok(n as u64)
    } else {
        Err(usage(format!("`{t}` is not a positive integer")))
    }
}

fn scalar(key: &Key, text: &str) -> Result<f64> {
    match key.kind {
        Kind::Quantity(dim) => parse_expecting(text, dim),
        Kind::Number => {
            let x: f64 = text
                .trim()
                .parse()
                .map_err(|_| Error::MalformedQuantity(text.to_owned()))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(Error::MalformedQuantity(text.to_owned()))
            }
        }
        Kind::Count => parse_count(text).map(|n| n as f64),
        Kind::FrequencyRange => {
            let grid = parse_range(text)?;
            match grid.as_slice() {
                [f] => Ok(*f),
                _ => Err(usage(format!(
                    "--{} expects a single frequency here, got a range",
                    key.name
                ))),
            }
        }
    }
}

fn check(key: &Key, text: &str) -> Result<()> {
    match key.kind {
        Kind::FrequencyRange => parse_range(text).map(|_| ()),
        _ => scalar(key, text).map(|_| ()),
    }
}

/// Parses `1:1000:1Hz` (unit on the last part applies to unitless parts),
/// `10Hz:20Hz:0.5Hz`, or a single frequency `526.3Hz`.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.trim().split(':').map(str::trim).collect();
    let unit = split_quantity(parts[parts.len() - 1])
        .map(|(_, u)| u.suffix)
        .map_err(|_| Error::MalformedQuantity(text.to_owned()))?;
    let value = |p: &str| -> Result<f64> {
        match parse_expecting(p, Frequency) {
            Ok(v) => Ok(v),
            Err(_) => parse_expecting(&format!("{p}{unit}"), Frequency),
        }
    };
    match parts.as_slice() {
        [single] => Ok(vec![value(single)?]),
        [start, stop, step] => {
            let (start, stop, step) = (value(start)?, value(stop)?, value(step)?);
            if !(step > 0.0) || stop < start {
                return Err(usage(format!(
                    "range `{text}` needs step > 0 and stop >= start"
                )));
            }
            let n = ((stop - start) / step * (1.0 + 1e-12)).floor() as u64 + 1;
            if n > 10_000_000 {
                return Err(usage(format!("range `{text}` has more than 1e7 points")));
            }
            Ok((0..n).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(usage(format!("range `{text}` must be start:stop:step"))),
    }
}
