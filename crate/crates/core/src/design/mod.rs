//! Closure of the clock design tuple.
//!
//! The clock is three equal free bodies: two dial ends a distance `dial`
//! apart and a hand crossing between them at speed `u`. Every design
//! relation is a monomial, so the whole tuple is closed by exact exponent
//! elimination from any sufficient set of known fields.
//!
//! Two modes exist. In [`DialMode::General`] the dial length is free and three
//! independent knowns are needed. In [`DialMode::Maximal`] the dial is pinned
//! to the light-travel distance in one tick, `dial = c·tau`, which minimises
//! the mass for a given accuracy and running time; two knowns suffice.

mod monomial;

use std::fmt;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantities::{Dimension, PhysicalConstants, Quantity};
use crate::scalar::{rel_diff, Scalar};
use monomial::{q, Echelon, Insert, Q};

/// Coefficient of the sphere radius `R = k·(M/rho)^(1/3)`; `(3/4π)^(1/3)`
/// rounded to two digits.
pub const RADIUS_COEFFICIENT: f64 = 0.62;

/// Relative tolerance for accepting redundant knowns as consistent.
pub const CONSISTENCY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DialMode {
    General,
    Maximal,
}

impl fmt::Display for DialMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DialMode::General => "general_dial",
            DialMode::Maximal => "maximal_dial",
        })
    }
}

impl FromStr for DialMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "general" | "general_dial" => Ok(DialMode::General),
            "maximal" | "maximal_dial" => Ok(DialMode::Maximal),
            other => Err(format!("unknown dial mode `{other}` (expected general or maximal)")),
        }
    }
}

/// A named field of [`ClockDesign`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    /// Accuracy: the smallest resolvable interval.
    #[serde(rename = "tau")]
    Accuracy,
    #[serde(rename = "T")]
    RunningTime,
    /// Relative accuracy `T/tau`.
    #[serde(rename = "n")]
    RelativeAccuracy,
    #[serde(rename = "u")]
    HandSpeed,
    /// Distance between the dial ends.
    #[serde(rename = "dial")]
    DialLength,
    /// Centre-of-mass packet width of each body.
    #[serde(rename = "dx")]
    PacketWidth,
    #[serde(rename = "dp")]
    MomentumSpread,
    /// Passage-time uncertainty of the hand.
    #[serde(rename = "dt")]
    TimeSpread,
    #[serde(rename = "du")]
    VelocitySpread,
    /// Mass of each body (the clock weighs three times this).
    #[serde(rename = "M")]
    Mass,
    #[serde(rename = "L_M")]
    ComptonLength,
    #[serde(rename = "R")]
    Radius,
    #[serde(rename = "rho")]
    Density,
}

impl Field {
    /// All fields in record order.
    pub const ALL: [Field; 13] = [
        Field::Accuracy,
        Field::RunningTime,
        Field::RelativeAccuracy,
        Field::HandSpeed,
        Field::DialLength,
        Field::PacketWidth,
        Field::MomentumSpread,
        Field::TimeSpread,
        Field::VelocitySpread,
        Field::Mass,
        Field::ComptonLength,
        Field::Radius,
        Field::Density,
    ];

    /// Fields solved by the closure (everything except the density input).
    const SOLVED: [Field; 12] = [
        Field::Accuracy,
        Field::RunningTime,
        Field::RelativeAccuracy,
        Field::HandSpeed,
        Field::DialLength,
        Field::PacketWidth,
        Field::MomentumSpread,
        Field::TimeSpread,
        Field::VelocitySpread,
        Field::Mass,
        Field::ComptonLength,
        Field::Radius,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Field::Accuracy => "tau",
            Field::RunningTime => "T",
            Field::RelativeAccuracy => "n",
            Field::HandSpeed => "u",
            Field::DialLength => "dial",
            Field::PacketWidth => "dx",
            Field::MomentumSpread => "dp",
            Field::TimeSpread => "dt",
            Field::VelocitySpread => "du",
            Field::Mass => "M",
            Field::ComptonLength => "L_M",
            Field::Radius => "R",
            Field::Density => "rho",
        }
    }

    pub fn dimension(self) -> Dimension {
        match self {
            Field::Accuracy | Field::RunningTime | Field::TimeSpread => Dimension::TIME,
            Field::RelativeAccuracy => Dimension::DIMENSIONLESS,
            Field::HandSpeed | Field::VelocitySpread => Dimension::SPEED,
            Field::DialLength | Field::PacketWidth | Field::ComptonLength | Field::Radius => {
                Dimension::LENGTH
            }
            Field::MomentumSpread => Dimension::MOMENTUM,
            Field::Mass => Dimension::MASS,
            Field::Density => Dimension::DENSITY,
        }
    }

    fn var(self) -> Option<usize> {
        Field::SOLVED.iter().position(|f| *f == self)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Field::ALL.iter().copied().find(|f| f.key() == s).ok_or_else(|| format!("unknown design field `{s}`"))
    }
}

/// The closed design tuple. Units are CGS; serialized keys are the short
/// field keys (`tau`, `T`, `n`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ClockDesign<S> {
    #[serde(rename = "tau")]
    pub accuracy: S,
    #[serde(rename = "T")]
    pub running_time: S,
    #[serde(rename = "n")]
    pub relative_accuracy: S,
    #[serde(rename = "u")]
    pub hand_speed: S,
    #[serde(rename = "dial")]
    pub dial_length: S,
    #[serde(rename = "dx")]
    pub packet_width: S,
    #[serde(rename = "dp")]
    pub momentum_spread: S,
    #[serde(rename = "dt")]
    pub time_spread: S,
    #[serde(rename = "du")]
    pub velocity_spread: S,
    #[serde(rename = "M")]
    pub mass: S,
    #[serde(rename = "L_M")]
    pub compton_length: S,
    #[serde(rename = "R")]
    pub radius: S,
    #[serde(rename = "rho")]
    pub density: S,
    pub mode: DialMode,
}

impl<S: Scalar> ClockDesign<S> {
    pub fn get(&self, field: Field) -> S {
        match field {
            Field::Accuracy => self.accuracy,
            Field::RunningTime => self.running_time,
            Field::RelativeAccuracy => self.relative_accuracy,
            Field::HandSpeed => self.hand_speed,
            Field::DialLength => self.dial_length,
            Field::PacketWidth => self.packet_width,
            Field::MomentumSpread => self.momentum_spread,
            Field::TimeSpread => self.time_spread,
            Field::VelocitySpread => self.velocity_spread,
            Field::Mass => self.mass,
            Field::ComptonLength => self.compton_length,
            Field::Radius => self.radius,
            Field::Density => self.density,
        }
    }

    fn slot(&mut self, field: Field) -> &mut S {
        match field {
            Field::Accuracy => &mut self.accuracy,
            Field::RunningTime => &mut self.running_time,
            Field::RelativeAccuracy => &mut self.relative_accuracy,
            Field::HandSpeed => &mut self.hand_speed,
            Field::DialLength => &mut self.dial_length,
            Field::PacketWidth => &mut self.packet_width,
            Field::MomentumSpread => &mut self.momentum_spread,
            Field::TimeSpread => &mut self.time_spread,
            Field::VelocitySpread => &mut self.velocity_spread,
            Field::Mass => &mut self.mass,
            Field::ComptonLength => &mut self.compton_length,
            Field::Radius => &mut self.radius,
            Field::Density => &mut self.density,
        }
    }

    pub fn quantity(&self, field: Field) -> Quantity<S> {
        Quantity::new(self.get(field), field.dimension()).expect("closed designs hold finite values")
    }

    /// Mass of all three bodies.
    pub fn total_mass(&self) -> S {
        S::lit(3.0) * self.mass
    }

    /// Re-checks every defining relation to relative tolerance `tol`.
    pub fn validate(&self, constants: &PhysicalConstants<S>, tol: S) -> Result<(), DesignError> {
        for field in Field::ALL {
            let v = self.get(field);
            if !(v.is_finite() && v > S::zero()) {
                return Err(DesignError::NonFinite { field });
            }
        }
        for relation in relations(self.mode) {
            let (lhs, rhs) = relation.evaluate(self, constants);
            if rel_diff(lhs, rhs) > tol {
                return Err(DesignError::RelationViolated { relation: relation.text });
            }
        }
        Ok(())
    }
}

/// Knowns from which a design is closed.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignInput<S> {
    pub mode: DialMode,
    pub knowns: Vec<(Field, Quantity<S>)>,
    /// Body density; terrestrial when absent.
    pub density: Option<S>,
}

impl<S: Scalar> DesignInput<S> {
    pub fn new(mode: DialMode) -> Self {
        DesignInput { mode, knowns: Vec::new(), density: None }
    }

    pub fn maximal() -> Self {
        Self::new(DialMode::Maximal)
    }

    pub fn general() -> Self {
        Self::new(DialMode::General)
    }

    /// Adds a known in the field's own CGS unit. Validation is deferred to
    /// [`close_design`].
    pub fn with(mut self, field: Field, value: S) -> Self {
        self.knowns.push((field, Quantity::from_raw(value, field.dimension())));
        self
    }

    /// Adds a known given as a dimensioned quantity.
    pub fn with_quantity(mut self, field: Field, value: Quantity<S>) -> Result<Self, DesignError> {
        if value.dimension() != field.dimension() {
            return Err(DesignError::DimensionMismatch {
                field,
                expected: field.dimension(),
                got: value.dimension(),
            });
        }
        self.knowns.push((field, value));
        Ok(self)
    }

    pub fn with_density(mut self, density: S) -> Self {
        self.density = Some(density);
        self
    }

    pub fn known(&self, field: Field) -> Option<S> {
        self.knowns.iter().find(|(f, _)| *f == field).map(|(_, q)| q.value())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("under-determined: need {} more of {{{}}}", count_word(*missing), join_fields(candidates))]
    Underdetermined { missing: usize, candidates: Vec<Field> },
    #[error(
        "inconsistent: given {field} = {given:e} but the other knowns imply {field} = {implied:e} (violates {})",
        relations.join("; ")
    )]
    Inconsistent { field: Field, given: f64, implied: f64, relations: Vec<&'static str> },
    #[error("{field} must be a {expected} quantity, got {got}")]
    DimensionMismatch { field: Field, expected: Dimension, got: Dimension },
    #[error("{field} must be a positive finite number, got {value}")]
    InvalidKnown { field: Field, value: f64 },
    #[error("{0} cannot be a known; set the density input instead")]
    NotSolvable(Field),
    #[error("{field} overflows the floating-point range")]
    NonFinite { field: Field },
    #[error("design violates {relation}")]
    RelationViolated { relation: &'static str },
}

fn count_word(n: usize) -> String {
    match n {
        1 => "one".into(),
        2 => "two".into(),
        3 => "three".into(),
        n => n.to_string(),
    }
}

fn join_fields(fields: &[Field]) -> String {
    fields.iter().map(|f| f.key()).collect::<Vec<_>>().join(", ")
}

/// Right-hand-side symbols of the relation table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Constant {
    Hbar,
    C,
    RadiusCoefficient,
    Density,
}

const NCONST: usize = 4;

struct Relation {
    text: &'static str,
    vars: &'static [(Field, i64, i64)],
    consts: &'static [(Constant, i64, i64)],
}

impl Relation {
    /// Both sides of the relation in linear (not log) form.
    fn evaluate<S: Scalar>(&self, d: &ClockDesign<S>, k: &PhysicalConstants<S>) -> (S, S) {
        let pow = |v: S, num: i64, den: i64| -> S {
            if den == 1 {
                v.powi(num as i32)
            } else {
                v.powf(S::lit(num as f64 / den as f64))
            }
        };
        let (mut lhs, mut rhs) = (S::one(), S::one());
        for &(f, num, den) in self.vars {
            let v = pow(d.get(f), num.abs(), den);
            if num > 0 {
                lhs = lhs * v;
            } else {
                rhs = rhs * v;
            }
        }
        for &(c, num, den) in self.consts {
            let base = match c {
                Constant::Hbar => k.hbar,
                Constant::C => k.c,
                Constant::RadiusCoefficient => S::lit(RADIUS_COEFFICIENT),
                Constant::Density => d.density,
            };
            let v = pow(base, num.abs(), den);
            if num > 0 {
                rhs = rhs * v;
            } else {
                lhs = lhs * v;
            }
        }
        (lhs, rhs)
    }
}

use Field as F;

const GENERAL_RELATIONS: [Relation; 9] = [
    Relation {
        text: "T = n·tau",
        vars: &[(F::RunningTime, 1, 1), (F::RelativeAccuracy, -1, 1), (F::Accuracy, -1, 1)],
        consts: &[],
    },
    Relation {
        text: "T = dial/u",
        vars: &[(F::RunningTime, 1, 1), (F::HandSpeed, 1, 1), (F::DialLength, -1, 1)],
        consts: &[],
    },
    Relation {
        text: "dx = u·tau",
        vars: &[(F::PacketWidth, 1, 1), (F::HandSpeed, -1, 1), (F::Accuracy, -1, 1)],
        consts: &[],
    },
    Relation {
        text: "dx·dp = hbar",
        vars: &[(F::PacketWidth, 1, 1), (F::MomentumSpread, 1, 1)],
        consts: &[(Constant::Hbar, 1, 1)],
    },
    Relation {
        text: "M·dx² = hbar·T",
        vars: &[(F::Mass, 1, 1), (F::PacketWidth, 2, 1), (F::RunningTime, -1, 1)],
        consts: &[(Constant::Hbar, 1, 1)],
    },
    Relation {
        text: "dt = dx/u",
        vars: &[(F::TimeSpread, 1, 1), (F::HandSpeed, 1, 1), (F::PacketWidth, -1, 1)],
        consts: &[],
    },
    Relation {
        text: "du = dp/M",
        vars: &[(F::VelocitySpread, 1, 1), (F::Mass, 1, 1), (F::MomentumSpread, -1, 1)],
        consts: &[],
    },
    Relation {
        text: "L_M = hbar/(M·c)",
        vars: &[(F::ComptonLength, 1, 1), (F::Mass, 1, 1)],
        consts: &[(Constant::Hbar, 1, 1), (Constant::C, -1, 1)],
    },
    Relation {
        text: "R = 0.62·(M/rho)^(1/3)",
        vars: &[(F::Radius, 1, 1), (F::Mass, -1, 3)],
        consts: &[(Constant::RadiusCoefficient, 1, 1), (Constant::Density, -1, 3)],
    },
];

const MAXIMAL_DIAL: Relation = Relation {
    text: "dial = c·tau",
    vars: &[(F::DialLength, 1, 1), (F::Accuracy, -1, 1)],
    consts: &[(Constant::C, 1, 1)],
};

fn relations(mode: DialMode) -> impl Iterator<Item = &'static Relation> {
    let extra = match mode {
        DialMode::General => None,
        DialMode::Maximal => Some(&MAXIMAL_DIAL),
    };
    GENERAL_RELATIONS.iter().chain(extra)
}

const NVAR: usize = Field::SOLVED.len();

/// Closes the full design tuple from `input`.
///
/// Consistent redundant knowns are accepted; a redundant known that misses
/// the value implied by the others by more than [`CONSISTENCY_TOLERANCE`]
/// is an error naming the relations involved.
pub fn close_design<S: Scalar>(
    input: &DesignInput<S>,
    constants: &PhysicalConstants<S>,
) -> Result<ClockDesign<S>, DesignError> {
    for (field, value) in &input.knowns {
        if value.dimension() != field.dimension() {
            return Err(DesignError::DimensionMismatch {
                field: *field,
                expected: field.dimension(),
                got: value.dimension(),
            });
        }
        let v = value.value();
        if !(v.is_finite() && v > S::zero()) {
            return Err(DesignError::InvalidKnown { field: *field, value: v.to_f64_lossy() });
        }
        if field.var().is_none() {
            return Err(DesignError::NotSolvable(*field));
        }
    }
    let density = input.density.unwrap_or(constants.density_terrestrial);
    if !(density.is_finite() && density > S::zero()) {
        return Err(DesignError::InvalidKnown { field: Field::Density, value: density.to_f64_lossy() });
    }

    let rels: Vec<&Relation> = relations(input.mode).collect();
    let nknown = input.knowns.len();
    let nsym = NCONST + nknown;
    let mut echelon = Echelon::new(NVAR, nsym, rels.len() + nknown);

    for rel in &rels {
        let mut coeffs = vec![Q::zero(); NVAR];
        for &(f, num, den) in rel.vars {
            coeffs[f.var().expect("relation fields are solved")] += q(num, den);
        }
        let mut rhs = vec![Q::zero(); nsym];
        for &(c, num, den) in rel.consts {
            rhs[c as usize] += q(num, den);
        }
        let inserted = echelon.insert(coeffs, rhs);
        debug_assert!(matches!(inserted, Insert::Independent));
    }

    let mut bases: Vec<S> = Vec::with_capacity(nsym);
    bases.push(constants.hbar);
    bases.push(constants.c);
    bases.push(S::lit(RADIUS_COEFFICIENT));
    bases.push(density);
    bases.extend(input.knowns.iter().map(|(_, v)| v.value()));
    let logs: Vec<S> = bases.iter().map(|b| b.ln()).collect();

    for (i, (field, value)) in input.knowns.iter().enumerate() {
        let mut coeffs = vec![Q::zero(); NVAR];
        coeffs[field.var().expect("checked above")] = Q::from_integer(1);
        let mut rhs = vec![Q::zero(); nsym];
        rhs[NCONST + i] = Q::from_integer(1);
        if let Insert::Dependent { residual, origin } = echelon.insert(coeffs, rhs) {
            // residual = ln(given) − ln(implied)
            let r = eval_log(&residual, &logs);
            if r.abs() > S::lit(CONSISTENCY_TOLERANCE) {
                let given = value.value();
                let implied = given / r.exp();
                let involved = origin
                    .iter()
                    .take(rels.len())
                    .zip(&rels)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(_, rel)| rel.text)
                    .collect();
                return Err(DesignError::Inconsistent {
                    field: *field,
                    given: given.to_f64_lossy(),
                    implied: implied.to_f64_lossy(),
                    relations: involved,
                });
            }
        }
    }

    let Some(solution) = echelon.solution() else {
        let candidates = Field::SOLVED
            .iter()
            .copied()
            .filter(|f| echelon.would_raise_rank(f.var().expect("solved field")))
            .collect();
        return Err(DesignError::Underdetermined { missing: echelon.nvar() - echelon.rank(), candidates });
    };

    let mut design = ClockDesign {
        accuracy: S::zero(),
        running_time: S::zero(),
        relative_accuracy: S::zero(),
        hand_speed: S::zero(),
        dial_length: S::zero(),
        packet_width: S::zero(),
        momentum_spread: S::zero(),
        time_spread: S::zero(),
        velocity_spread: S::zero(),
        mass: S::zero(),
        compton_length: S::zero(),
        radius: S::zero(),
        density,
        mode: input.mode,
    };
    for (field, exps) in Field::SOLVED.iter().zip(&solution) {
        let v = eval_monomial(exps, &bases, &logs);
        if !(v.is_finite() && v > S::zero()) {
            return Err(DesignError::NonFinite { field: *field });
        }
        *design.slot(*field) = v;
    }
    // Knowns are reported exactly as given.
    for (field, value) in &input.knowns {
        *design.slot(*field) = value.value();
    }
    Ok(design)
}

/// `Π bases[i]^exps[i]` with exact integer powers and roots, so that e.g.
/// `T/tau` is a single correctly rounded division. Falls back to the log
/// form when an intermediate product leaves the floating-point range.
fn eval_monomial<S: Scalar>(exps: &[Q], bases: &[S], logs: &[S]) -> S {
    let mut v = S::one();
    for (e, b) in exps.iter().zip(bases) {
        if e.is_zero() {
            continue;
        }
        let (p, q) = (*e.numer(), *e.denom());
        let root = match q {
            1 => *b,
            2 => b.sqrt(),
            3 => b.cbrt(),
            _ => b.powf(S::one() / S::lit(q as f64)),
        };
        v = v * match i32::try_from(p) {
            Ok(p) => root.powi(p),
            Err(_) => root.powf(S::lit(p as f64)),
        };
    }
    if v.is_finite() && v > S::zero() {
        v
    } else {
        eval_log(exps, logs).exp()
    }
}

fn eval_log<S: Scalar>(exps: &[Q], logs: &[S]) -> S {
    exps.iter().zip(logs).fold(S::zero(), |acc, (e, l)| {
        if e.is_zero() {
            acc
        } else {
            let num = S::lit(e.numer().to_f64().unwrap_or(f64::NAN));
            let den = S::lit(e.denom().to_f64().unwrap_or(f64::NAN));
            acc + num * *l / den
        }
    })
}

/// Solves for a single field of the closure fixed by `fixed`.
pub fn invert_for<S: Scalar>(
    target: Field,
    fixed: &DesignInput<S>,
    constants: &PhysicalConstants<S>,
) -> Result<Quantity<S>, DesignError> {
    let design = close_design(fixed, constants)?;
    Ok(design.quantity(target))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> PhysicalConstants<f64> {
        PhysicalConstants::default()
    }

    /// Constants with hbar/c² equal to the rounded 1e-48 g·s.
    fn rounded() -> PhysicalConstants<f64> {
        let mut k = k();
        k.hbar = 1e-48 * k.c * k.c;
        k
    }

    fn within_factor(value: f64, reference: f64, factor: f64) -> bool {
        let r = value / reference;
        r <= factor && r >= 1.0 / factor
    }

    #[test]
    fn wigner_example_with_rounded_constant() {
        let d = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1e-8).with(Field::RunningTime, 8.64e4),
            &rounded(),
        )
        .unwrap();
        assert!((d.relative_accuracy - 8.64e12).abs() / 8.64e12 < 1e-12);
        assert!(within_factor(d.mass, 6.45e-2, 1.01), "{}", d.mass);
        assert!(within_factor(d.mass, 0.072, 1.2));
        assert!((d.dial_length - 299.79).abs() < 1e-6);
        assert!(within_factor(d.packet_width, 3.47e-11, 1.01));
        assert!(within_factor(d.radius, 0.25, 1.01), "{}", d.radius);
    }

    #[test]
    fn micro_mass_example() {
        let d = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1e-7).with(Field::RelativeAccuracy, 1e7),
            &k(),
        )
        .unwrap();
        assert!((d.running_time - 1.0).abs() < 1e-12);
        assert!(within_factor(d.mass, 1e-20, 1.2));
        assert!(within_factor(d.hand_speed, 3e3, 1.01));
        assert!(within_factor(d.packet_width, 3e-4, 1.01));
        assert!(within_factor(d.dial_length, 3e3, 1.01));
        assert!(within_factor(d.radius, 1e-7, 1.5));
    }

    #[test]
    fn nucleon_example_at_nuclear_density() {
        let k = k();
        let d = close_design(
            &DesignInput::maximal()
                .with(Field::RelativeAccuracy, 100.0)
                .with(Field::Mass, 1.6726e-24)
                .with_density(k.density_nuclear),
            &k,
        )
        .unwrap();
        assert!(within_factor(d.accuracy, 1e-18, 1.5), "{}", d.accuracy);
        assert!(within_factor(d.running_time, 1e-16, 1.5));
        assert!(within_factor(d.packet_width, 3e-10, 1.5));
        assert!(within_factor(d.dial_length, 3e-8, 1.5));
        assert!(within_factor(d.hand_speed, 3e8, 1.01));
        assert!(within_factor(d.radius, 1e-13, 1.25), "{}", d.radius);
    }

    #[test]
    fn general_dial_matches_maximal_when_dial_is_c_tau() {
        let max = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1e-7).with(Field::RelativeAccuracy, 1e7),
            &k(),
        )
        .unwrap();
        let gen = close_design(
            &DesignInput::general()
                .with(Field::RunningTime, 1.0)
                .with(Field::Accuracy, 1e-7)
                .with(Field::DialLength, max.dial_length),
            &k(),
        )
        .unwrap();
        for f in Field::ALL {
            assert!(rel_diff(max.get(f), gen.get(f)) < 1e-12, "{f}");
        }
        // mass through the three-parameter form
        let t = gen.running_time;
        let mass_alt = k().hbar * t.powi(3) / (gen.dial_length.powi(2) * gen.accuracy.powi(2));
        assert!(rel_diff(mass_alt, gen.mass) < 1e-12);
    }

    #[test]
    fn degenerate_n_equal_one_closes() {
        let d = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1.0).with(Field::RelativeAccuracy, 1.0),
            &k(),
        )
        .unwrap();
        assert!(rel_diff(d.hand_speed, k().c) < 1e-12);
    }

    #[test]
    fn underdetermined_lists_candidates() {
        let err = close_design(&DesignInput::maximal().with(Field::Accuracy, 1e-8), &k()).unwrap_err();
        match &err {
            DesignError::Underdetermined { missing, candidates } => {
                assert_eq!(*missing, 1);
                assert!(candidates.contains(&Field::RunningTime));
                assert!(candidates.contains(&Field::Mass));
                // fixed by tau alone in this mode
                assert!(!candidates.contains(&Field::DialLength));
                assert!(!candidates.contains(&Field::TimeSpread));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().starts_with("under-determined: need one more of {T, n"));
        let err = close_design(&DesignInput::<f64>::general(), &k()).unwrap_err();
        assert!(matches!(err, DesignError::Underdetermined { missing: 3, .. }));
    }

    #[test]
    fn inconsistent_redundant_known_names_relation() {
        let err = close_design(
            &DesignInput::maximal()
                .with(Field::Accuracy, 1e-8)
                .with(Field::RunningTime, 8.64e4)
                .with(Field::RelativeAccuracy, 1e12),
            &k(),
        )
        .unwrap_err();
        match &err {
            DesignError::Inconsistent { field, relations, implied, .. } => {
                assert_eq!(*field, Field::RelativeAccuracy);
                assert_eq!(relations, &vec!["T = n·tau"]);
                assert!(rel_diff(*implied, 8.64e12) < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        // two knowns that are dependent in maximal mode
        let err = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1e-8).with(Field::DialLength, 1.0),
            &k(),
        )
        .unwrap_err();
        assert!(matches!(err, DesignError::Inconsistent { field: Field::DialLength, .. }), "{err}");
    }

    #[test]
    fn consistent_dependent_triple_is_still_underdetermined_in_general_mode() {
        let err = close_design(
            &DesignInput::general()
                .with(Field::Accuracy, 1e-7)
                .with(Field::RelativeAccuracy, 1e7)
                .with(Field::RunningTime, 1.0),
            &k(),
        )
        .unwrap_err();
        assert!(matches!(err, DesignError::Underdetermined { missing: 1, .. }), "{err}");
        // the same triple is fine (over-determined, consistent) in maximal mode
        let d = close_design(
            &DesignInput::maximal()
                .with(Field::Accuracy, 1e-7)
                .with(Field::RelativeAccuracy, 1e7)
                .with(Field::RunningTime, 1.0),
            &k(),
        )
        .unwrap();
        assert_eq!(d.running_time, 1.0);
    }

    #[test]
    fn rejects_bad_knowns() {
        let e = close_design(&DesignInput::maximal().with(Field::Accuracy, -1.0), &k());
        assert!(matches!(e, Err(DesignError::InvalidKnown { field: Field::Accuracy, .. })));
        let e = close_design(&DesignInput::maximal().with(Field::Mass, f64::NAN), &k());
        assert!(matches!(e, Err(DesignError::InvalidKnown { .. })));
        let e = close_design(&DesignInput::maximal().with(Field::Density, 1.0), &k());
        assert!(matches!(e, Err(DesignError::NotSolvable(Field::Density))));
        let q = Quantity::new(1.0, Dimension::LENGTH).unwrap();
        assert!(matches!(
            DesignInput::maximal().with_quantity(Field::Accuracy, q),
            Err(DesignError::DimensionMismatch { .. })
        ));
        let e = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1.0).with(Field::RelativeAccuracy, 2.0),
            &k(),
        );
        assert!(e.is_ok());
    }

    #[test]
    fn overflow_is_reported_not_returned() {
        let e = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1e-300).with(Field::RelativeAccuracy, 1e200),
            &k(),
        );
        assert!(matches!(e, Err(DesignError::NonFinite { .. })), "{e:?}");
    }

    #[test]
    fn radius_can_be_a_known() {
        let d = close_design(
            &DesignInput::maximal().with(Field::Accuracy, 1e-7).with(Field::Radius, 1.4e-7),
            &k(),
        )
        .unwrap();
        assert!(within_factor(d.relative_accuracy, 1e7, 1.1));
        d.validate(&k(), 1e-12).unwrap();
    }

    #[test]
    fn invert_for_relative_accuracy() {
        let n = invert_for(
            Field::RelativeAccuracy,
            &DesignInput::maximal().with(Field::Accuracy, 1e-18).with(Field::Mass, 1.6726e-24),
            &k(),
        )
        .unwrap();
        assert!(within_factor(n.value(), 100.0, 1.15), "{}", n.value());
        assert_eq!(n.dimension(), Dimension::DIMENSIONLESS);
    }

    #[test]
    fn f32_closes_reference_examples() {
        let k32 = PhysicalConstants::<f32>::default();
        let d = close_design(
            &DesignInput::<f32>::maximal().with(Field::Accuracy, 1e-8).with(Field::RunningTime, 8.64e4),
            &k32,
        )
        .unwrap();
        assert!((d.mass / 0.0757 - 1.0).abs() < 1e-2, "{}", d.mass);
        d.validate(&k32, 1e-4).unwrap();
    }

    #[test]
    fn field_keys_round_trip() {
        for f in Field::ALL {
            assert_eq!(f.key().parse::<Field>().unwrap(), f);
        }
        assert!("x".parse::<Field>().is_err());
    }
}
