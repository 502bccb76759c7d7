//! Design laboratory for the Salecker–Wigner quantum clock.
//!
//! The crate closes the clock's monomial design relations from any
//! sufficient set of knowns ([`design`]), checks the resulting tuple
//! against the feasibility requirements and sweeps the design plane
//! ([`feasibility`]), and validates the free wave-packet dynamics the
//! algebra relies on ([`wavepacket`]).
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below are the types most callers want.

pub mod design;
pub mod feasibility;
pub mod quantities;
pub mod scalar;
pub mod wavepacket;

pub use design::{close_design, invert_for, ClockDesign, DesignError, DesignInput, DialMode, Field};
pub use feasibility::{
    check, close_with_density, material_note, sweep, CellOutcome, CheckParams, DensityChoice,
    FeasibilityReport, MassClass, MaterialScale, Requirement, SizeClass, SweepAxis, SweepCell, SweepConfig,
    SweepResult, SweepSummary,
};
pub use quantities::{
    load_constants, ConfigError, ConstantOverrides, Dimension, PhysicalConstants, Quantity, QuantityError,
};
pub use scalar::Scalar;
pub use wavepacket::{
    arrival_time_spread, propagate_grid, verify_spreading_condition, ArrivalOptions, ArrivalStats,
    GaussianPacketState, GridSpec, GridState, SpreadingReport, WidthConvention,
};

pub type ClockDesignF64 = ClockDesign<f64>;
pub type ClockDesignF32 = ClockDesign<f32>;
pub type DesignInputF64 = DesignInput<f64>;
pub type PhysicalConstantsF64 = PhysicalConstants<f64>;
pub type QuantityF64 = Quantity<f64>;
pub type FeasibilityReportF64 = FeasibilityReport<f64>;
pub type SweepResultF64 = SweepResult<f64>;
pub type GaussianPacketStateF64 = GaussianPacketState<f64>;
