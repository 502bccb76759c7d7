//! Built-in reference designs and their expected values.

use serde::Serialize;
use swclock::{
    check, close_with_density, verify_spreading_condition, CheckParams, DensityChoice, DesignError,
    DesignInput, Field, PhysicalConstants,
};

/// What a computed value is compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Equal to 1e-12 relative.
    Exact,
    /// Within a multiplicative factor either way.
    Factor(f64),
    /// Bounds allow the same 1e-9 relative slack as the relativistic warning.
    AtLeast,
    AtMost,
}

const BOUND_SLACK: f64 = 1e-9;

impl Rule {
    pub fn passes(self, computed: f64, reference: f64) -> bool {
        let r = computed / reference;
        match self {
            Rule::Exact => (r - 1.0).abs() <= 1e-12,
            Rule::Factor(f) => r <= f && r >= 1.0 / f,
            Rule::AtLeast => r >= 1.0 - BOUND_SLACK,
            Rule::AtMost => r <= 1.0 + BOUND_SLACK,
        }
    }

    fn label(self) -> String {
        match self {
            Rule::Exact => "exact".into(),
            Rule::Factor(f) => format!("within x{f}"),
            Rule::AtLeast => ">= reference".into(),
            Rule::AtMost => "<= reference".into(),
        }
    }
}

/// Derived quantity a case can check besides the plain design fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Probe {
    Field(Field),
    /// `R/dx`; large when the bodies dwarf the position spread.
    RadiusOverWidth,
    /// Margin of requirement d (`dx/R` over the strong factor).
    WidthOverRadiusMargin,
    /// `u/c`.
    SpeedFraction,
    /// Packet width growth over one run, √2-convention width.
    WidthGrowth,
}

impl Probe {
    fn name(self) -> String {
        match self {
            Probe::Field(f) => f.key().to_string(),
            Probe::RadiusOverWidth => "R/dx".into(),
            Probe::WidthOverRadiusMargin => "dx/R margin".into(),
            Probe::SpeedFraction => "u/c".into(),
            Probe::WidthGrowth => "width growth".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Expected {
    pub probe: Probe,
    pub reference: f64,
    pub rule: Rule,
    pub citation: &'static str,
}

const fn expect(probe: Probe, reference: f64, rule: Rule, citation: &'static str) -> Expected {
    Expected { probe, reference, rule, citation }
}

pub struct ReproCase {
    pub name: &'static str,
    pub inputs: fn(&PhysicalConstants<f64>) -> DesignInput<f64>,
    pub density: DensityChoice<f64>,
    pub expected: Vec<Expected>,
}

pub fn cases() -> Vec<ReproCase> {
    use Field::*;
    use Probe::Field as F;
    vec![
        ReproCase {
            name: "wigner-1957",
            inputs: |_| DesignInput::maximal().with(Accuracy, 1e-8).with(RunningTime, 8.64e4),
            density: DensityChoice::Terrestrial,
            expected: vec![
                expect(F(RelativeAccuracy), 8.64e12, Rule::Exact, "macroscopic clock: one day at 1e-8 s"),
                expect(F(Mass), 0.072, Rule::Factor(1.5), "macroscopic clock: mass per body"),
                expect(F(DialLength), 300.0, Rule::Factor(1.1), "macroscopic clock: dial length"),
                expect(F(PacketWidth), 1e-11, Rule::Factor(5.0), "macroscopic clock: position spread"),
                expect(F(Radius), 0.26, Rule::Factor(1.1), "macroscopic clock: body radius"),
                expect(
                    Probe::RadiusOverWidth,
                    10.0,
                    Rule::AtLeast,
                    "macroscopic clock: spread far below radius",
                ),
                expect(Probe::WidthGrowth, 2.5, Rule::AtMost, "packet keeps its width over the run"),
            ],
        },
        ReproCase {
            name: "micro-mass",
            inputs: |_| DesignInput::maximal().with(Accuracy, 1e-7).with(RelativeAccuracy, 1e7),
            density: DensityChoice::Terrestrial,
            expected: vec![
                expect(F(Mass), 1e-20, Rule::Factor(1.5), "microscopic-mass clock: mass per body"),
                expect(F(HandSpeed), 3e3, Rule::Factor(1.1), "microscopic-mass clock: hand speed"),
                expect(F(PacketWidth), 3e-4, Rule::Factor(1.5), "microscopic-mass clock: position spread"),
                expect(F(DialLength), 3e3, Rule::Factor(1.5), "microscopic-mass clock: dial length"),
                expect(F(Radius), 1e-7, Rule::Factor(2.0), "microscopic-mass clock: body radius"),
                expect(
                    Probe::WidthOverRadiusMargin,
                    100.0,
                    Rule::AtLeast,
                    "microscopic-mass clock: spread far above radius",
                ),
                expect(Probe::WidthGrowth, 2.5, Rule::AtMost, "packet keeps its width over the run"),
            ],
        },
        ReproCase {
            name: "nucleon-n100",
            inputs: |k| DesignInput::maximal().with(RelativeAccuracy, 100.0).with(Mass, k.nucleon_mass),
            density: DensityChoice::Nuclear,
            expected: vec![
                expect(F(Accuracy), 1e-18, Rule::Factor(1.5), "nucleon clock: accuracy"),
                expect(F(RunningTime), 1e-16, Rule::Factor(1.5), "nucleon clock: running time"),
                expect(F(PacketWidth), 3e-10, Rule::Factor(1.5), "nucleon clock: position spread"),
                expect(F(DialLength), 3e-8, Rule::Factor(1.5), "nucleon clock: dial length"),
                expect(F(HandSpeed), 3e8, Rule::Factor(1.1), "nucleon clock: hand speed c/100"),
                expect(F(Radius), 1e-13, Rule::Factor(2.0), "nucleon clock: radius at nuclear density"),
                expect(
                    Probe::SpeedFraction,
                    0.01,
                    Rule::AtLeast,
                    "nucleon clock: hand speed near relativistic",
                ),
                expect(Probe::WidthGrowth, 2.5, Rule::AtMost, "packet keeps its width over the run"),
            ],
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproRow {
    pub case: String,
    pub quantity: String,
    pub computed: f64,
    pub reference: f64,
    pub ratio: f64,
    pub rule: String,
    pub pass: bool,
    pub citation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReproReport {
    pub pass: bool,
    pub rows: Vec<ReproRow>,
}

pub fn run_case(
    case: &ReproCase,
    params: &CheckParams<f64>,
    constants: &PhysicalConstants<f64>,
) -> Result<Vec<ReproRow>, DesignError> {
    let design = close_with_density(&(case.inputs)(constants), &case.density, constants)?;
    let report = check(&design, params, constants);
    let spreading = verify_spreading_condition(&design, constants);
    Ok(case
        .expected
        .iter()
        .map(|e| {
            let computed = match e.probe {
                Probe::Field(f) => design.get(f),
                Probe::RadiusOverWidth => design.radius / design.packet_width,
                Probe::WidthOverRadiusMargin => report.req_d.margin,
                Probe::SpeedFraction => report.speed_fraction,
                Probe::WidthGrowth => spreading.growth_hbar,
            };
            let mut pass = e.rule.passes(computed, e.reference);
            if e.probe == Probe::SpeedFraction {
                pass &= report.relativistic_warning;
            }
            if e.probe == Probe::WidthGrowth {
                pass &= spreading.satisfied;
            }
            ReproRow {
                case: case.name.to_string(),
                quantity: e.probe.name(),
                computed,
                reference: e.reference,
                ratio: computed / e.reference,
                rule: e.rule.label(),
                pass,
                citation: e.citation.to_string(),
            }
        })
        .collect())
}

/// Runs every case whose name matches `filter` (a glob; all when absent).
pub fn reproduce(
    filter: Option<&glob::Pattern>,
    params: &CheckParams<f64>,
    constants: &PhysicalConstants<f64>,
) -> Result<ReproReport, DesignError> {
    let mut rows = Vec::new();
    for case in cases().iter().filter(|c| filter.is_none_or(|p| p.matches(c.name))) {
        rows.extend(run_case(case, params, constants)?);
    }
    Ok(ReproReport { pass: !rows.is_empty() && rows.iter().all(|r| r.pass), rows })
}
