//! Dimensioned CGS quantities and the physical-constant table.
//!
//! Dimensions are exponent vectors over the three CGS base dimensions
//! (gram, centimetre, second). Multiplication adds exponents, division
//! subtracts them, and addition between different dimensions is an error.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Div, Mul};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// Exponents of gram, centimetre and second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Dimension {
    pub mass: i8,
    pub length: i8,
    pub time: i8,
}

impl Dimension {
    pub const DIMENSIONLESS: Dimension = Dimension::new(0, 0, 0);
    pub const MASS: Dimension = Dimension::new(1, 0, 0);
    pub const LENGTH: Dimension = Dimension::new(0, 1, 0);
    pub const TIME: Dimension = Dimension::new(0, 0, 1);
    pub const SPEED: Dimension = Dimension::new(0, 1, -1);
    pub const MOMENTUM: Dimension = Dimension::new(1, 1, -1);
    pub const DENSITY: Dimension = Dimension::new(1, -3, 0);
    pub const ACTION: Dimension = Dimension::new(1, 2, -1);

    pub const fn new(mass: i8, length: i8, time: i8) -> Self {
        Dimension { mass, length, time }
    }

    pub fn powi(self, exp: i8) -> Self {
        Dimension::new(self.mass * exp, self.length * exp, self.time * exp)
    }

    /// `k`-th root, defined only when every exponent is divisible by `k`.
    pub fn root(self, k: i8) -> Option<Self> {
        if k == 0 || self.mass % k != 0 || self.length % k != 0 || self.time % k != 0 {
            return None;
        }
        Some(Dimension::new(self.mass / k, self.length / k, self.time / k))
    }

    /// Conventional name when the dimension is one of the named kinds.
    pub fn name(self) -> Option<&'static str> {
        Some(match self {
            Self::DIMENSIONLESS => "dimensionless",
            Self::MASS => "mass",
            Self::LENGTH => "length",
            Self::TIME => "time",
            Self::SPEED => "speed",
            Self::MOMENTUM => "momentum",
            Self::DENSITY => "density",
            Self::ACTION => "action",
            _ => return None,
        })
    }

    /// CGS unit string such as `g·cm/s`.
    pub fn unit(self) -> String {
        self.unit_in(["g", "cm", "s"])
    }

    /// SI unit string such as `kg·m/s`.
    pub fn si_unit(self) -> String {
        self.unit_in(["kg", "m", "s"])
    }

    /// Multiplier taking a CGS value of this dimension to SI.
    pub fn si_factor(self) -> f64 {
        1e-3f64.powi(self.mass.into()) * 1e-2f64.powi(self.length.into())
    }

    fn unit_in(self, symbols: [&str; 3]) -> String {
        let mut num = Vec::new();
        let mut den = Vec::new();
        for (sym, e) in symbols.into_iter().zip([self.mass, self.length, self.time]) {
            let target = if e > 0 { &mut num } else { &mut den };
            match e.abs() {
                0 => {}
                1 => target.push(sym.to_string()),
                p => target.push(format!("{sym}^{p}")),
            }
        }
        let num = if num.is_empty() { "1".to_string() } else { num.join("·") };
        if den.is_empty() {
            if num == "1" {
                String::new()
            } else {
                num
            }
        } else {
            format!("{num}/{}", den.join("·"))
        }
    }
}

impl Mul for Dimension {
    type Output = Dimension;
    fn mul(self, rhs: Dimension) -> Dimension {
        Dimension::new(self.mass + rhs.mass, self.length + rhs.length, self.time + rhs.time)
    }
}

impl Div for Dimension {
    type Output = Dimension;
    fn div(self, rhs: Dimension) -> Dimension {
        Dimension::new(self.mass - rhs.mass, self.length - rhs.length, self.time - rhs.time)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.name() {
            Some(name) => f.write_str(name),
            None => write!(f, "[{}]", self.unit()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantityError {
    #[error("dimension mismatch: cannot combine {left} with {right}")]
    DimensionMismatch { left: Dimension, right: Dimension },
    #[error("non-finite {dimension} value {value}")]
    NonFinite { dimension: Dimension, value: f64 },
    #[error("{dimension} must be strictly positive, got {value}")]
    NonPositive { dimension: Dimension, value: f64 },
    #[error("root {k} of {dimension} is not a whole dimension")]
    FractionalDimension { dimension: Dimension, k: i8 },
}

/// A finite CGS magnitude tagged with its dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Quantity<S> {
    value: S,
    dimension: Dimension,
}

impl<S: Scalar> Quantity<S> {
    pub fn new(value: S, dimension: Dimension) -> Result<Self, QuantityError> {
        if !value.is_finite() {
            return Err(QuantityError::NonFinite { dimension, value: value.to_f64_lossy() });
        }
        Ok(Quantity { value, dimension })
    }

    /// Unvalidated constructor; callers check the value later.
    pub(crate) fn from_raw(value: S, dimension: Dimension) -> Self {
        Quantity { value, dimension }
    }

    /// Like [`Quantity::new`] but also rejects zero and negative values.
    pub fn positive(value: S, dimension: Dimension) -> Result<Self, QuantityError> {
        let q = Self::new(value, dimension)?;
        if value <= S::zero() {
            return Err(QuantityError::NonPositive { dimension, value: value.to_f64_lossy() });
        }
        Ok(q)
    }

    pub fn dimensionless(value: S) -> Result<Self, QuantityError> {
        Self::new(value, Dimension::DIMENSIONLESS)
    }

    pub fn value(&self) -> S {
        self.value
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn try_add(self, rhs: Self) -> Result<Self, QuantityError> {
        self.same_dimension(&rhs)?;
        Self::new(self.value + rhs.value, self.dimension)
    }

    pub fn try_sub(self, rhs: Self) -> Result<Self, QuantityError> {
        self.same_dimension(&rhs)?;
        Self::new(self.value - rhs.value, self.dimension)
    }

    pub fn powi(self, exp: i8) -> Self {
        Quantity { value: self.value.powi(exp as i32), dimension: self.dimension.powi(exp) }
    }

    pub fn root(self, k: i8) -> Result<Self, QuantityError> {
        let dimension = self
            .dimension
            .root(k)
            .ok_or(QuantityError::FractionalDimension { dimension: self.dimension, k })?;
        let value = if k == 2 {
            self.value.sqrt()
        } else if k == 3 {
            self.value.cbrt()
        } else {
            self.value.powf(S::one() / S::lit(k as f64))
        };
        Self::new(value, dimension)
    }

    /// Value of a dimensionless ratio; errors if the quantity carries units.
    pub fn ratio(self) -> Result<S, QuantityError> {
        self.same_dimension(&Quantity { value: S::one(), dimension: Dimension::DIMENSIONLESS })?;
        Ok(self.value)
    }

    fn same_dimension(&self, rhs: &Self) -> Result<(), QuantityError> {
        if self.dimension != rhs.dimension {
            return Err(QuantityError::DimensionMismatch { left: self.dimension, right: rhs.dimension });
        }
        Ok(())
    }
}

impl<S: Scalar> Mul for Quantity<S> {
    type Output = Quantity<S>;
    fn mul(self, rhs: Self) -> Self {
        Quantity { value: self.value * rhs.value, dimension: self.dimension * rhs.dimension }
    }
}

impl<S: Scalar> Div for Quantity<S> {
    type Output = Quantity<S>;
    fn div(self, rhs: Self) -> Self {
        Quantity { value: self.value / rhs.value, dimension: self.dimension / rhs.dimension }
    }
}

impl<S: Scalar> fmt::Display for Quantity<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit = self.dimension.unit();
        if unit.is_empty() {
            write!(f, "{:.4e}", self.value)
        } else {
            write!(f, "{:.4e} {unit}", self.value)
        }
    }
}

/// Constants consumed by every computation, in CGS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct PhysicalConstants<S> {
    /// Reduced Planck constant, erg·s.
    pub hbar: S,
    /// Speed of light, cm/s.
    pub c: S,
    /// Nucleon (proton) mass, g.
    pub nucleon_mass: S,
    /// Ordinary solid/liquid matter, g/cm³.
    pub density_terrestrial: S,
    /// Nuclear matter; puts a single nucleon at a radius near 1e-13 cm.
    pub density_nuclear: S,
}

pub const DEFAULT_HBAR: f64 = 1.0546e-27;
pub const DEFAULT_C: f64 = 2.9979e10;
pub const DEFAULT_NUCLEON_MASS: f64 = 1.6726e-24;
pub const DEFAULT_DENSITY_TERRESTRIAL: f64 = 1.0;
pub const DEFAULT_DENSITY_NUCLEAR: f64 = 2.3e14;

/// Field names accepted in an override table, in declaration order.
pub const CONSTANT_KEYS: [&str; 5] = ["hbar", "c", "nucleon_mass", "density_terrestrial", "density_nuclear"];

impl<S: Scalar> Default for PhysicalConstants<S> {
    fn default() -> Self {
        PhysicalConstants {
            hbar: S::lit(DEFAULT_HBAR),
            c: S::lit(DEFAULT_C),
            nucleon_mass: S::lit(DEFAULT_NUCLEON_MASS),
            density_terrestrial: S::lit(DEFAULT_DENSITY_TERRESTRIAL),
            density_nuclear: S::lit(DEFAULT_DENSITY_NUCLEAR),
        }
    }
}

impl<S: Scalar> PhysicalConstants<S> {
    pub fn hbar_over_c2(&self) -> S {
        self.hbar / (self.c * self.c)
    }

    pub fn get(&self, key: &str) -> Option<S> {
        Some(match key {
            "hbar" => self.hbar,
            "c" => self.c,
            "nucleon_mass" => self.nucleon_mass,
            "density_terrestrial" => self.density_terrestrial,
            "density_nuclear" => self.density_nuclear,
            _ => return None,
        })
    }

    fn slot(&mut self, key: &str) -> Option<&mut S> {
        Some(match key {
            "hbar" => &mut self.hbar,
            "c" => &mut self.c,
            "nucleon_mass" => &mut self.nucleon_mass,
            "density_terrestrial" => &mut self.density_terrestrial,
            "density_nuclear" => &mut self.density_nuclear,
            _ => return None,
        })
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown constant `{0}` (expected one of: hbar, c, nucleon_mass, density_terrestrial, density_nuclear)")]
    UnknownKey(String),
    #[error("constant `{field}` must be a positive finite number, got {value}")]
    InvalidValue { field: String, value: f64 },
    #[error("constant `{field}` is not a number")]
    NotANumber { field: String },
    #[error("cannot read constants file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed constants file: {0}")]
    Parse(String),
}

/// Flat `key = value` table overriding entries of [`PhysicalConstants`].
///
/// Later insertions replace earlier ones, so merging a file table and then a
/// flag table gives flags precedence.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConstantOverrides {
    values: BTreeMap<String, f64>,
}

impl ConstantOverrides {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.values.insert(key.into(), value);
        self
    }

    pub fn with(mut self, key: impl Into<String>, value: f64) -> Self {
        self.set(key, value);
        self
    }

    pub fn merge(&mut self, other: &ConstantOverrides) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), *v);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table =
            text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.message().to_string()))?;
        let mut out = Self::new();
        for (key, value) in table {
            let number = match value {
                toml::Value::Float(f) => f,
                toml::Value::Integer(i) => i as f64,
                _ => return Err(ConfigError::NotANumber { field: key }),
            };
            out.set(key, number);
        }
        Ok(out)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }
}

/// Default constants merged with `overrides`.
pub fn load_constants<S: Scalar>(
    overrides: Option<&ConstantOverrides>,
) -> Result<PhysicalConstants<S>, ConfigError> {
    let mut constants = PhysicalConstants::<S>::default();
    let Some(overrides) = overrides else {
        return Ok(constants);
    };
    for (key, value) in overrides.iter() {
        let slot = constants.slot(key).ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
        let converted = S::from_f64(value).filter(|v| v.is_finite());
        match converted {
            Some(v) if value > 0.0 && v > S::zero() => *slot = v,
            _ => return Err(ConfigError::InvalidValue { field: key.to_string(), value }),
        }
    }
    Ok(constants)
}
