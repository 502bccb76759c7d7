//! Command-line surface.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use swclock::{CheckParams, ConstantOverrides, DensityChoice, DesignInput, DialMode, Field, SweepAxis};

/// Environment variable naming the default constants override file.
pub const CONSTANTS_ENV: &str = "SWCLOCK_CONSTANTS";

#[derive(Debug, Parser)]
#[command(name = "swclock", version, about = "Design lab for Salecker-Wigner quantum clocks (CGS units)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Close a design from any independent set of knowns.
    Derive(DeriveArgs),
    /// Solve for a single field.
    Invert(InvertArgs),
    /// Close a design and test the feasibility requirements.
    Check(CheckArgs),
    /// Classify a two-axis log grid of designs.
    Sweep(SweepArgs),
    /// Propagate the hand's wavepacket and sample its arrival times.
    Simulate(SimulateArgs),
    /// Rerun the built-in reference cases.
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
    Svg,
}

/// `--rho` value: a number in g/cm³ or a named choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rho(pub DensityChoice<f64>);

impl FromStr for Rho {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let choice = match s {
            "terrestrial" => DensityChoice::Terrestrial,
            "nuclear" => DensityChoice::Nuclear,
            "auto" => DensityChoice::Auto,
            _ => DensityChoice::Fixed(positive(s).map_err(|_| {
                format!("expected a positive density or one of terrestrial, nuclear, auto; got `{s}`")
            })?),
        };
        Ok(Rho(choice))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("`{s}` must be positive and finite"))
    }
}

/// `FIELD:MIN:MAX:POINTS`, e.g. `n:10:1e6:6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec(pub SweepAxis<f64>);

impl FromStr for AxisSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [field, min, max, points] = parts[..] else {
            return Err(format!("expected FIELD:MIN:MAX:POINTS, got `{s}`"));
        };
        let field: Field = field.parse()?;
        let points: usize = points.parse().map_err(|_| format!("`{points}` is not a point count"))?;
        let axis = SweepAxis::new(field, positive(min)?, positive(max)?, points);
        axis.validate().map_err(|e| e.to_string())?;
        Ok(AxisSpec(axis))
    }
}

#[derive(Debug, Clone, Args)]
pub struct DesignFlags {
    /// Dial mode: maximal (dial = c·tau) or general.
    #[arg(long, default_value = "maximal", value_parser = DialMode::from_str)]
    pub mode: DialMode,
    /// Accuracy, s.
    #[arg(long, value_parser = positive)]
    pub tau: Option<f64>,
    /// Running time, s.
    #[arg(long = "T", value_parser = positive)]
    pub running_time: Option<f64>,
    /// Relative accuracy T/tau.
    #[arg(long, value_parser = positive)]
    pub n: Option<f64>,
    /// Hand speed, cm/s.
    #[arg(long, value_parser = positive)]
    pub u: Option<f64>,
    /// Dial length 2ℓ, cm.
    #[arg(long, value_parser = positive)]
    pub dial: Option<f64>,
    /// Hand position spread, cm.
    #[arg(long, value_parser = positive)]
    pub dx: Option<f64>,
    /// Hand momentum spread, g·cm/s.
    #[arg(long, value_parser = positive)]
    pub dp: Option<f64>,
    /// Passage-time spread, s.
    #[arg(long, value_parser = positive)]
    pub dt: Option<f64>,
    /// Hand velocity spread, cm/s.
    #[arg(long, value_parser = positive)]
    pub du: Option<f64>,
    /// Per-body mass, g.
    #[arg(long = "M", value_parser = positive)]
    pub mass: Option<f64>,
    /// Compton length, cm.
    #[arg(long = "L_M", value_parser = positive)]
    pub compton_length: Option<f64>,
    /// Body radius, cm.
    #[arg(long = "R", value_parser = positive)]
    pub radius: Option<f64>,
    /// Body density: g/cm³, terrestrial, nuclear or auto.
    #[arg(long, default_value = "auto")]
    pub rho: Rho,
}

impl DesignFlags {
    pub fn knowns(&self) -> Vec<(Field, f64)> {
        [
            (Field::Accuracy, self.tau),
            (Field::RunningTime, self.running_time),
            (Field::RelativeAccuracy, self.n),
            (Field::HandSpeed, self.u),
            (Field::DialLength, self.dial),
            (Field::PacketWidth, self.dx),
            (Field::MomentumSpread, self.dp),
            (Field::TimeSpread, self.dt),
            (Field::VelocitySpread, self.du),
            (Field::Mass, self.mass),
            (Field::ComptonLength, self.compton_length),
            (Field::Radius, self.radius),
        ]
        .into_iter()
        .filter_map(|(f, v)| v.map(|v| (f, v)))
        .collect()
    }

    pub fn input(&self) -> DesignInput<f64> {
        self.knowns().into_iter().fold(DesignInput::new(self.mode), |i, (f, v)| i.with(f, v))
    }
}

#[derive(Debug, Clone, Args)]
pub struct ConstantFlags {
    /// Flat key = value override file; defaults to the path in $SWCLOCK_CONSTANTS.
    #[arg(long, env = CONSTANTS_ENV)]
    pub constants: Option<PathBuf>,
    /// Reduced Planck constant, erg·s.
    #[arg(long, value_parser = positive)]
    pub hbar: Option<f64>,
    /// Speed of light, cm/s.
    #[arg(long = "c", value_parser = positive)]
    pub c: Option<f64>,
    /// Nucleon mass, g.
    #[arg(long, value_parser = positive)]
    pub nucleon_mass: Option<f64>,
    /// Terrestrial density, g/cm³.
    #[arg(long, value_parser = positive)]
    pub density_terrestrial: Option<f64>,
    /// Nuclear density, g/cm³.
    #[arg(long, value_parser = positive)]
    pub density_nuclear: Option<f64>,
}

impl ConstantFlags {
    /// Flag overrides only; the file is merged underneath by the caller.
    pub fn flag_overrides(&self) -> ConstantOverrides {
        let mut o = ConstantOverrides::new();
        for (key, v) in [
            ("hbar", self.hbar),
            ("c", self.c),
            ("nucleon_mass", self.nucleon_mass),
            ("density_terrestrial", self.density_terrestrial),
            ("density_nuclear", self.density_nuclear),
        ] {
            if let Some(v) = v {
                o.set(key, v);
            }
        }
        o
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputFlags {
    #[arg(long, value_enum, default_value = "table")]
    pub output: Format,
    /// Append metric conversions to table values.
    #[arg(long)]
    pub human: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckFlags {
    /// Ratio that "much greater than" must reach.
    #[arg(long, default_value = "10", value_parser = positive)]
    pub strong_factor: f64,
    /// Hand speed fraction of c that raises the relativistic warning.
    #[arg(long, default_value = "0.01", value_parser = positive)]
    pub rel_threshold: f64,
}

impl CheckFlags {
    pub fn params(&self) -> Result<CheckParams<f64>, String> {
        CheckParams::new(self.strong_factor, self.rel_threshold).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct DeriveArgs {
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub constants: ConstantFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct InvertArgs {
    /// Field to solve for.
    #[arg(long, value_parser = Field::from_str)]
    pub target: Field,
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub constants: ConstantFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct CheckArgs {
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub constants: ConstantFlags,
    #[command(flatten)]
    pub output: OutputFlags,
    #[command(flatten)]
    pub check: CheckFlags,
    /// Exit 1 unless every requirement passes.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SweepArgs {
    /// Row axis, FIELD:MIN:MAX:POINTS.
    #[arg(long)]
    pub x: AxisSpec,
    /// Column axis, FIELD:MIN:MAX:POINTS.
    #[arg(long)]
    pub y: AxisSpec,
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub constants: ConstantFlags,
    #[command(flatten)]
    pub output: OutputFlags,
    #[command(flatten)]
    pub check: CheckFlags,
    /// Exit 1 if no cell passes every requirement.
    #[arg(long)]
    pub strict: bool,
    /// Worker threads; defaults to one per core.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    /// Width is the position standard deviation.
    Standard,
    /// Width is √2 times the standard deviation.
    Hbar,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub design: DesignFlags,
    #[command(flatten)]
    pub constants: ConstantFlags,
    #[command(flatten)]
    pub output: OutputFlags,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Monte Carlo seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Hold the hand's velocity fixed at u.
    #[arg(long)]
    pub no_velocity_spread: bool,
    /// Also jitter the far end of the dial by dx.
    #[arg(long)]
    pub detector_jitter: bool,
    /// Write |ψ|² snapshots over the run to this CSV file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    /// Number of snapshots in the dump, evenly spaced over [0, T].
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub snapshots: u64,
    /// Width convention for the dumped packet.
    #[arg(long, value_enum, default_value = "standard")]
    pub convention: Convention,
    /// Exit 1 unless the packet keeps its width and the spread stays within [tau, 2.5·tau].
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Args)]
#[command(allow_negative_numbers = true)]
pub struct ReproduceArgs {
    /// Only run cases whose name matches this glob.
    #[arg(long)]
    pub case: Option<String>,
    #[command(flatten)]
    pub constants: ConstantFlags,
    #[command(flatten)]
    pub output: OutputFlags,
}
