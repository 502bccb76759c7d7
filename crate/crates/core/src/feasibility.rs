//! Feasibility requirements, micro/macro classification and design-plane
//! sweeps.
//!
//! Four requirements are checked on every closed design, each as a ratio
//! that must reach `strong_factor` (the numeric reading of "much larger"):
//!
//! | req | ratio     | meaning                                   |
//! |-----|-----------|-------------------------------------------|
//! | a   | `n`       | the clock resolves many ticks per run     |
//! | b   | `dx/L_M`  | the packet is wider than the Compton length |
//! | c   | `dial/R`  | bodies are small compared to the dial     |
//! | d   | `dx/R`    | bodies behave microscopically             |

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{close_design, ClockDesign, DesignError, DesignInput, DialMode, Field};
use crate::quantities::PhysicalConstants;
use crate::scalar::Scalar;

/// Largest per-body mass still called microscopic, g (inclusive).
pub const MICROSCOPIC_MASS_MAX: f64 = 1e-16;
/// Largest dial still called microscopic, cm (inclusive).
pub const MICROSCOPIC_DIAL_MAX: f64 = 1e-5;
/// Smallest dial called macroscopic, cm. Between the two bounds the size
/// is reported as intermediate.
pub const MACROSCOPIC_DIAL_MIN: f64 = 1.0;
/// Radius of a light atom, cm.
pub const ATOMIC_RADIUS: f64 = 1e-8;
/// Upper mass of the band where only an (unstable) heavy nucleus would do, g.
pub const UNSTABLE_NUCLEUS_MASS_MAX: f64 = 1e-20;
/// Bodies at or above this mass are bulk matter, g.
pub const BULK_MASS_MIN: f64 = 1e-3;
/// Masses up to this many nucleon masses count as nucleon-scale.
pub const NUCLEON_SCALE_MULTIPLE: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeasibilityError {
    #[error("invalid check parameters: {0}")]
    InvalidParams(String),
    #[error("invalid sweep axis: {0}")]
    InvalidAxis(String),
    #[error("cannot start worker pool: {0}")]
    WorkerPool(String),
}

/// Thresholds used by [`check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct CheckParams<S> {
    /// Ratio that turns "much larger than" into a pass.
    pub strong_factor: S,
    /// Fraction of `c` above which the hand is flagged as relativistic.
    pub rel_threshold: S,
}

impl<S: Scalar> Default for CheckParams<S> {
    fn default() -> Self {
        CheckParams { strong_factor: S::lit(10.0), rel_threshold: S::lit(0.01) }
    }
}

impl<S: Scalar> CheckParams<S> {
    pub fn new(strong_factor: S, rel_threshold: S) -> Result<Self, FeasibilityError> {
        if !(strong_factor.is_finite() && strong_factor > S::one()) {
            return Err(FeasibilityError::InvalidParams(format!(
                "strong_factor must exceed 1, got {strong_factor}"
            )));
        }
        if !(rel_threshold > S::zero() && rel_threshold < S::one()) {
            return Err(FeasibilityError::InvalidParams(format!(
                "rel_threshold must lie in (0, 1), got {rel_threshold}"
            )));
        }
        Ok(CheckParams { strong_factor, rel_threshold })
    }
}

/// One requirement: `ratio = lhs/rhs`, `margin = ratio/strong_factor`,
/// and `pass` exactly when `margin >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct Requirement<S> {
    pub pass: bool,
    pub ratio: S,
    pub margin: S,
}

impl<S: Scalar> Requirement<S> {
    fn from_ratio(ratio: S, strong_factor: S) -> Self {
        let margin = ratio / strong_factor;
        Requirement { pass: margin >= S::one(), ratio, margin }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MassClass {
    Microscopic,
    Macroscopic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeClass {
    Microscopic,
    Intermediate,
    Macroscopic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct FeasibilityReport<S> {
    pub req_a: Requirement<S>,
    pub req_b: Requirement<S>,
    pub req_c: Requirement<S>,
    pub req_d: Requirement<S>,
    /// `u/c` of the hand.
    pub speed_fraction: S,
    pub relativistic_warning: bool,
    pub mass_class: MassClass,
    pub size_class: SizeClass,
}

impl<S: Scalar> FeasibilityReport<S> {
    pub fn all_pass(&self) -> bool {
        self.req_a.pass && self.req_b.pass && self.req_c.pass && self.req_d.pass
    }

    /// Microscopic in both mass and size while meeting requirements c and d.
    pub fn fully_microscopic(&self) -> bool {
        self.req_c.pass
            && self.req_d.pass
            && self.mass_class == MassClass::Microscopic
            && self.size_class == SizeClass::Microscopic
    }
}

/// Evaluates requirements a–d and the mass/size classes of `design`.
pub fn check<S: Scalar>(
    design: &ClockDesign<S>,
    params: &CheckParams<S>,
    constants: &PhysicalConstants<S>,
) -> FeasibilityReport<S> {
    let f = params.strong_factor;
    let req_a = Requirement::from_ratio(design.relative_accuracy, f);
    let req_b = Requirement::from_ratio(design.packet_width / design.compton_length, f);
    let req_c = Requirement::from_ratio(design.dial_length / design.radius, f);
    let req_d = Requirement::from_ratio(design.packet_width / design.radius, f);

    let speed_fraction = design.hand_speed / constants.c;
    // u = c/100 must warn at threshold 0.01, so the comparison is inclusive
    // up to round-off.
    let relativistic_warning = speed_fraction >= params.rel_threshold * (S::one() - S::lit(1e-9));

    let mass_class = if design.mass <= S::lit(MICROSCOPIC_MASS_MAX) {
        MassClass::Microscopic
    } else {
        MassClass::Macroscopic
    };
    let size_class = if design.dial_length <= S::lit(MICROSCOPIC_DIAL_MAX) {
        SizeClass::Microscopic
    } else if design.dial_length >= S::lit(MACROSCOPIC_DIAL_MIN) {
        SizeClass::Macroscopic
    } else {
        SizeClass::Intermediate
    };

    FeasibilityReport {
        req_a,
        req_b,
        req_c,
        req_d,
        speed_fraction,
        relativistic_warning,
        mass_class,
        size_class,
    }
}

/// What the bodies of a design would have to be made of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaterialScale {
    /// A nucleon or light nucleus.
    NucleonScale,
    /// Would need a single nucleus of many nucleons, which is not stable.
    UnstableNucleusScale,
    /// A cluster of atoms forming a small solid.
    AtomicSolidScale,
    BulkScale,
}

impl MaterialScale {
    pub fn label(self) -> &'static str {
        match self {
            MaterialScale::NucleonScale => "nucleon_scale",
            MaterialScale::UnstableNucleusScale => "unstable_nucleus_scale",
            MaterialScale::AtomicSolidScale => "atomic_solid_scale",
            MaterialScale::BulkScale => "bulk_scale",
        }
    }
}

/// Annotates the material the bodies would need; never affects pass/fail.
///
/// Between ten nucleon masses and 1e-20 g a body is labelled an unstable
/// nucleus when requirements c and d force its radius below atomic size
/// (`min(dx, dial)/strong_factor < 1e-8 cm`); atoms cannot be packed that
/// small, and a nucleus that heavy does not hold together.
pub fn material_note<S: Scalar>(
    design: &ClockDesign<S>,
    params: &CheckParams<S>,
    constants: &PhysicalConstants<S>,
) -> MaterialScale {
    let m = design.mass;
    if m <= S::lit(NUCLEON_SCALE_MULTIPLE) * constants.nucleon_mass {
        return MaterialScale::NucleonScale;
    }
    let required_radius = design.packet_width.min(design.dial_length) / params.strong_factor;
    if m <= S::lit(UNSTABLE_NUCLEUS_MASS_MAX) && required_radius < S::lit(ATOMIC_RADIUS) {
        return MaterialScale::UnstableNucleusScale;
    }
    if m < S::lit(BULK_MASS_MIN) {
        MaterialScale::AtomicSolidScale
    } else {
        MaterialScale::BulkScale
    }
}

/// A log-spaced sweep axis over one design field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SweepAxis<S> {
    pub field: Field,
    pub min: S,
    pub max: S,
    pub points: usize,
}

impl<S: Scalar> SweepAxis<S> {
    pub fn new(field: Field, min: S, max: S, points: usize) -> Self {
        SweepAxis { field, min, max, points }
    }

    pub fn validate(&self) -> Result<(), FeasibilityError> {
        if self.points < 2 {
            return Err(FeasibilityError::InvalidAxis(format!(
                "{} needs at least 2 points, got {}",
                self.field, self.points
            )));
        }
        if !(self.min > S::zero() && self.min.is_finite() && self.max.is_finite()) {
            return Err(FeasibilityError::InvalidAxis(format!(
                "{} range must be positive and finite",
                self.field
            )));
        }
        if self.max <= self.min {
            return Err(FeasibilityError::InvalidAxis(format!(
                "{} range must be increasing, got [{}, {}]",
                self.field, self.min, self.max
            )));
        }
        if self.field == Field::Density {
            return Err(FeasibilityError::InvalidAxis(
                "rho is set through the density choice, not an axis".into(),
            ));
        }
        Ok(())
    }

    /// Grid values, endpoints exact and whole decades snapped to powers of 10.
    pub fn values(&self) -> Vec<S> {
        let lo = self.min.log10();
        let hi = self.max.log10();
        let steps = S::lit((self.points - 1) as f64);
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.points - 1 {
                    return self.max;
                }
                let mut e = lo + (hi - lo) * S::lit(i as f64) / steps;
                if (e - e.round()).abs() < S::lit(1e-9) {
                    e = e.round();
                }
                S::lit(10.0).powf(e)
            })
            .collect()
    }
}

/// How each sweep cell picks its body density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", rename_all = "snake_case")]
pub enum DensityChoice<S> {
    Fixed(S),
    Terrestrial,
    Nuclear,
    /// Nuclear density for nucleon-scale masses, terrestrial otherwise.
    Auto,
}

impl<S: Scalar> DensityChoice<S> {
    /// Density for a body of the given mass.
    pub fn resolve(&self, mass: Option<S>, constants: &PhysicalConstants<S>) -> S {
        match *self {
            DensityChoice::Fixed(rho) => rho,
            DensityChoice::Terrestrial => constants.density_terrestrial,
            DensityChoice::Nuclear => constants.density_nuclear,
            DensityChoice::Auto => match mass {
                Some(m) if m <= S::lit(NUCLEON_SCALE_MULTIPLE) * constants.nucleon_mass => {
                    constants.density_nuclear
                }
                _ => constants.density_terrestrial,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SweepConfig<S> {
    pub axes: [SweepAxis<S>; 2],
    pub mode: DialMode,
    /// Extra knowns shared by every cell (needed in general-dial mode).
    pub fixed: Vec<(Field, S)>,
    pub params: CheckParams<S>,
    pub density: DensityChoice<S>,
    /// Worker pool width; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl<S: Scalar> SweepConfig<S> {
    pub fn new(axis1: SweepAxis<S>, axis2: SweepAxis<S>, mode: DialMode) -> Self {
        SweepConfig {
            axes: [axis1, axis2],
            mode,
            fixed: Vec::new(),
            params: CheckParams::default(),
            density: DensityChoice::Terrestrial,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar", tag = "status", rename_all = "snake_case")]
pub enum CellOutcome<S> {
    Valid { design: ClockDesign<S>, report: FeasibilityReport<S>, material: MaterialScale },
    Invalid { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SweepCell<S> {
    /// Index along the first axis.
    pub row: usize,
    /// Index along the second axis.
    pub col: usize,
    pub x: S,
    pub y: S,
    pub outcome: CellOutcome<S>,
}

impl<S: Scalar> SweepCell<S> {
    pub fn valid(&self) -> Option<(&ClockDesign<S>, &FeasibilityReport<S>, MaterialScale)> {
        match &self.outcome {
            CellOutcome::Valid { design, report, material } => Some((design, report, *material)),
            CellOutcome::Invalid { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SweepSummary<S> {
    pub total: usize,
    pub invalid: usize,
    pub mass_microscopic: usize,
    pub mass_macroscopic: usize,
    pub size_microscopic: usize,
    pub size_intermediate: usize,
    pub size_macroscopic: usize,
    pub all_requirements_pass: usize,
    pub fully_microscopic: usize,
    pub relativistic: usize,
    /// Largest `n` whose design is microscopic in mass and size and meets
    /// requirements c and d.
    pub max_feasible_n: Option<S>,
    /// Same, skipping cells whose bodies would have to be unstable nuclei.
    pub max_feasible_n_stable: Option<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SweepResult<S> {
    pub axes: [SweepAxis<S>; 2],
    pub grid: [Vec<S>; 2],
    pub mode: DialMode,
    pub params: CheckParams<S>,
    /// Row-major: `cells[row * grid[1].len() + col]`.
    pub cells: Vec<SweepCell<S>>,
    pub summary: SweepSummary<S>,
}

impl<S: Scalar> SweepResult<S> {
    pub fn cell(&self, row: usize, col: usize) -> &SweepCell<S> {
        &self.cells[row * self.grid[1].len() + col]
    }
}

/// Closes and checks every cell of a two-axis log grid.
///
/// Cells are independent; the result is ordered by index and does not
/// depend on the number of workers. Cells whose closure fails (overflow in
/// extreme corners) are kept as [`CellOutcome::Invalid`].
pub fn sweep<S: Scalar>(
    config: &SweepConfig<S>,
    constants: &PhysicalConstants<S>,
) -> Result<SweepResult<S>, FeasibilityError> {
    let [a1, a2] = &config.axes;
    a1.validate()?;
    a2.validate()?;
    if a1.field == a2.field {
        return Err(FeasibilityError::InvalidAxis(format!("both axes sweep {}", a1.field)));
    }
    if let Some((f, _)) = config.fixed.iter().find(|(f, _)| *f == a1.field || *f == a2.field) {
        return Err(FeasibilityError::InvalidAxis(format!("{f} is both fixed and swept")));
    }
    CheckParams::new(config.params.strong_factor, config.params.rel_threshold)?;

    let grid = [a1.values(), a2.values()];
    let ncols = grid[1].len();
    let ncells = grid[0].len() * ncols;

    let eval = |idx: usize| -> SweepCell<S> {
        let (row, col) = (idx / ncols, idx % ncols);
        let (x, y) = (grid[0][row], grid[1][col]);
        SweepCell { row, col, x, y, outcome: evaluate_cell(config, x, y, constants) }
    };

    let cells: Vec<SweepCell<S>> = match config.threads {
        None => (0..ncells).into_par_iter().map(eval).collect(),
        Some(width) => rayon::ThreadPoolBuilder::new()
            .num_threads(width.max(1))
            .build()
            .map_err(|e| FeasibilityError::WorkerPool(e.to_string()))?
            .install(|| (0..ncells).into_par_iter().map(eval).collect()),
    };

    let summary = summarize(&cells);
    Ok(SweepResult { axes: config.axes, grid, mode: config.mode, params: config.params, cells, summary })
}

/// Closes `input` with the body density picked by `density`.
///
/// Under [`DensityChoice::Auto`] with no known mass, the design is closed
/// once to learn the mass and again with the density that mass implies.
pub fn close_with_density<S: Scalar>(
    input: &DesignInput<S>,
    density: &DensityChoice<S>,
    constants: &PhysicalConstants<S>,
) -> Result<ClockDesign<S>, DesignError> {
    let close = |mass: Option<S>| {
        let rho = density.resolve(mass, constants);
        close_design(&input.clone().with_density(rho), constants)
    };
    let first = close(input.known(Field::Mass));
    match (density, &first, input.known(Field::Mass)) {
        (DensityChoice::Auto, Ok(d), None) => close(Some(d.mass)),
        _ => first,
    }
}

fn evaluate_cell<S: Scalar>(
    config: &SweepConfig<S>,
    x: S,
    y: S,
    constants: &PhysicalConstants<S>,
) -> CellOutcome<S> {
    let [a1, a2] = &config.axes;
    let mut input = DesignInput::new(config.mode).with(a1.field, x).with(a2.field, y);
    for &(f, v) in &config.fixed {
        input = input.with(f, v);
    }
    let closed = close_with_density(&input, &config.density, constants);
    match closed {
        Ok(design) => {
            let report = check(&design, &config.params, constants);
            let material = material_note(&design, &config.params, constants);
            CellOutcome::Valid { design, report, material }
        }
        Err(e) => CellOutcome::Invalid { reason: e.to_string() },
    }
}

fn summarize<S: Scalar>(cells: &[SweepCell<S>]) -> SweepSummary<S> {
    let mut s = SweepSummary { total: cells.len(), ..SweepSummary::default() };
    for cell in cells {
        let Some((design, report, material)) = cell.valid() else {
            s.invalid += 1;
            continue;
        };
        match report.mass_class {
            MassClass::Microscopic => s.mass_microscopic += 1,
            MassClass::Macroscopic => s.mass_macroscopic += 1,
        }
        match report.size_class {
            SizeClass::Microscopic => s.size_microscopic += 1,
            SizeClass::Intermediate => s.size_intermediate += 1,
            SizeClass::Macroscopic => s.size_macroscopic += 1,
        }
        s.all_requirements_pass += report.all_pass() as usize;
        s.relativistic += report.relativistic_warning as usize;
        if report.fully_microscopic() {
            s.fully_microscopic += 1;
            let n = design.relative_accuracy;
            s.max_feasible_n = Some(max_of(s.max_feasible_n, n));
            if material != MaterialScale::UnstableNucleusScale {
                s.max_feasible_n_stable = Some(max_of(s.max_feasible_n_stable, n));
            }
        }
    }
    s
}

fn max_of<S: Scalar>(best: Option<S>, n: S) -> S {
    match best {
        Some(b) if b >= n => b,
        _ => n,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k() -> PhysicalConstants<f64> {
        PhysicalConstants::default()
    }

    fn maximal(a: (Field, f64), b: (Field, f64), rho: Option<f64>) -> ClockDesign<f64> {
        let mut input = DesignInput::maximal().with(a.0, a.1).with(b.0, b.1);
        input.density = rho;
        close_design(&input, &k()).unwrap()
    }

    #[test]
    fn wigner_clock_is_macroscopic() {
        let d = maximal((Field::Accuracy, 1e-8), (Field::RunningTime, 8.64e4), None);
        let r = check(&d, &CheckParams::default(), &k());
        assert!(r.req_a.pass && r.req_b.pass && r.req_c.pass);
        assert!(!r.req_d.pass);
        assert!(r.req_d.ratio < 1e-9);
        assert_eq!(r.mass_class, MassClass::Macroscopic);
        assert_eq!(r.size_class, SizeClass::Macroscopic);
        assert!(!r.relativistic_warning);
        assert_eq!(material_note(&d, &CheckParams::default(), &k()), MaterialScale::BulkScale);
    }

    #[test]
    fn micro_mass_clock_passes_everything() {
        let d = maximal((Field::Accuracy, 1e-7), (Field::RelativeAccuracy, 1e7), None);
        let r = check(&d, &CheckParams::default(), &k());
        assert!(r.all_pass());
        assert!(r.req_d.margin > 100.0);
        assert_eq!(r.mass_class, MassClass::Microscopic);
        assert_eq!(r.size_class, SizeClass::Macroscopic);
        assert_eq!(material_note(&d, &CheckParams::default(), &k()), MaterialScale::AtomicSolidScale);
    }

    #[test]
    fn nucleon_clock_warns_about_speed() {
        let kk = k();
        let d = maximal(
            (Field::RelativeAccuracy, 100.0),
            (Field::Mass, kk.nucleon_mass),
            Some(kk.density_nuclear),
        );
        let r = check(&d, &CheckParams::default(), &kk);
        assert!(r.req_c.pass && r.req_d.pass);
        assert!(r.req_d.ratio > 1e3 && r.req_d.ratio < 1e4, "{}", r.req_d.ratio);
        assert!(r.relativistic_warning);
        assert!(r.fully_microscopic());
        assert_eq!(material_note(&d, &CheckParams::default(), &kk), MaterialScale::NucleonScale);
    }

    #[test]
    fn n10_nucleon_clock_is_a_marginal_pass() {
        let kk = k();
        let d = maximal(
            (Field::RelativeAccuracy, 10.0),
            (Field::Mass, kk.nucleon_mass),
            Some(kk.density_nuclear),
        );
        let r = check(&d, &CheckParams::default(), &kk);
        assert!(r.req_d.pass);
        assert!(r.req_d.ratio > 10.0 && r.req_d.ratio < 30.0, "{}", r.req_d.ratio);
        assert!(r.relativistic_warning);
        assert!((r.speed_fraction - 0.1).abs() < 1e-9);
    }

    #[test]
    fn heavy_nucleus_band_is_flagged_unstable() {
        let d = maximal((Field::RelativeAccuracy, 1e4), (Field::Mass, 1e-20), None);
        let p = CheckParams::default();
        assert_eq!(material_note(&d, &p, &k()), MaterialScale::UnstableNucleusScale);
    }

    #[test]
    fn margin_and_pass_agree_at_the_boundary() {
        let r = Requirement::from_ratio(10.0_f64, 10.0);
        assert!(r.pass);
        assert_eq!(r.margin, 1.0);
        let r = Requirement::from_ratio(9.999_f64, 10.0);
        assert!(!r.pass);
    }

    #[test]
    fn mass_class_boundary_is_closed() {
        let mut d = maximal((Field::Accuracy, 1e-7), (Field::RelativeAccuracy, 1e7), None);
        d.mass = 1e-16;
        d.dial_length = 1e-5;
        let r = check(&d, &CheckParams::default(), &k());
        assert_eq!(r.mass_class, MassClass::Microscopic);
        assert_eq!(r.size_class, SizeClass::Microscopic);
        d.dial_length = 0.5;
        assert_eq!(check(&d, &CheckParams::default(), &k()).size_class, SizeClass::Intermediate);
    }

    #[test]
    fn params_are_validated() {
        assert!(CheckParams::new(1.0_f64, 0.01).is_err());
        assert!(CheckParams::new(10.0_f64, 0.0).is_err());
        assert!(CheckParams::new(10.0_f64, 1.0).is_err());
        assert!(CheckParams::new(2.0_f64, 0.5).is_ok());
    }

    #[test]
    fn axis_values_are_log_spaced_and_increasing() {
        let v = SweepAxis::new(Field::Mass, 1e-27_f64, 1e-16, 12).values();
        assert_eq!(v.len(), 12);
        assert_eq!(v[0], 1e-27);
        assert_eq!(v[11], 1e-16);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        for (i, x) in v.iter().enumerate() {
            let expect = 10f64.powi(i as i32 - 27);
            assert!((x / expect - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_grids_rejected() {
        let a = SweepAxis::new(Field::RelativeAccuracy, 10.0_f64, 1e6, 1);
        let b = SweepAxis::new(Field::Mass, 1e-27, 1e-16, 1);
        let e = sweep(&SweepConfig::new(a, b, DialMode::Maximal), &k());
        assert!(matches!(e, Err(FeasibilityError::InvalidAxis(_))));
        let a = SweepAxis::new(Field::Mass, 1e-20_f64, 1e-27, 4);
        let b = SweepAxis::new(Field::RelativeAccuracy, 10.0, 100.0, 2);
        assert!(sweep(&SweepConfig::new(a, b, DialMode::Maximal), &k()).is_err());
        let a = SweepAxis::new(Field::Mass, 1e-27_f64, 1e-20, 4);
        assert!(sweep(&SweepConfig::new(a, a, DialMode::Maximal), &k()).is_err());
    }

    #[test]
    fn overflowing_corner_becomes_invalid_cell() {
        let a = SweepAxis::new(Field::RelativeAccuracy, 10.0_f64, 1e200, 3);
        let b = SweepAxis::new(Field::Accuracy, 1e-300, 1e-10, 3);
        let r = sweep(&SweepConfig::new(a, b, DialMode::Maximal), &k()).unwrap();
        assert!(r.summary.invalid >= 1);
        assert_eq!(r.summary.total, 9);
        assert!(r.cell(0, 2).valid().is_some());
    }

    #[test]
    fn general_mode_sweep_uses_fixed_knowns() {
        let a = SweepAxis::new(Field::Accuracy, 1e-9_f64, 1e-7, 3);
        let b = SweepAxis::new(Field::RunningTime, 1e-3, 1.0, 4);
        let mut cfg = SweepConfig::new(a, b, DialMode::General);
        cfg.fixed.push((Field::DialLength, 100.0));
        let r = sweep(&cfg, &k()).unwrap();
        assert_eq!(r.summary.invalid, 0);
        for cell in &r.cells {
            let (d, _, _) = cell.valid().unwrap();
            assert_eq!(d.dial_length, 100.0);
            d.validate(&k(), 1e-12).unwrap();
        }
        cfg.fixed.clear();
        let r = sweep(&cfg, &k()).unwrap();
        assert_eq!(r.summary.invalid, 12);
    }

    #[test]
    fn auto_density_switches_at_nucleon_scale() {
        let a = SweepAxis::new(Field::RelativeAccuracy, 10.0_f64, 100.0, 2);
        let b = SweepAxis::new(Field::Accuracy, 1e-20, 1e-10, 2);
        let mut cfg = SweepConfig::new(a, b, DialMode::Maximal);
        cfg.density = DensityChoice::Auto;
        let kk = k();
        let r = sweep(&cfg, &kk).unwrap();
        for cell in &r.cells {
            let (d, _, _) = cell.valid().unwrap();
            let nuclear = d.mass <= 10.0 * kk.nucleon_mass;
            let expect = if nuclear { kk.density_nuclear } else { kk.density_terrestrial };
            assert_eq!(d.density, expect, "M = {}", d.mass);
        }
    }
}
