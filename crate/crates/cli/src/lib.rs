//! Command-line front end for the `swclock` design lab.
//!
//! [`run`] parses arguments, dispatches to one command and writes its
//! report. Exit codes: 0 on success, 1 when `--strict` (or `reproduce`)
//! finds a failure, 2 on usage or computation errors.

pub mod args;
pub mod emit;
pub mod repro;
pub mod svg;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};

use anyhow::{bail, Context};
use clap::Parser;
use serde::Serialize;
use swclock::wavepacket::{GaussianPacketState, GridSpec, WidthConvention};
use swclock::{
    arrival_time_spread, check, close_with_density, load_constants, material_note, propagate_grid, sweep,
    verify_spreading_condition, ArrivalOptions, CellOutcome, ClockDesign, ConstantOverrides, Dimension,
    FeasibilityReport, MaterialScale, PhysicalConstants, Requirement, SpreadingReport, SweepConfig,
    SweepResult,
};

use args::{
    CheckArgs, Cli, Command, ConstantFlags, Convention, DeriveArgs, Format, InvertArgs, ReproduceArgs,
    SimulateArgs, SweepArgs,
};
use emit::{json, num, with_unit, Table};
use svg::Region;

/// Exit status of a completed command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Failed,
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(Status::Ok) => 0,
        Ok(Status::Failed) => 1,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            2
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> anyhow::Result<Status> {
    match command {
        Command::Derive(a) => derive(a, out),
        Command::Invert(a) => invert(a, out),
        Command::Check(a) => check_cmd(a, out),
        Command::Sweep(a) => sweep_cmd(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Reproduce(a) => reproduce(a, out),
    }
}

/// Defaults, then the override file, then individual flags.
pub fn resolve_constants(flags: &ConstantFlags) -> anyhow::Result<PhysicalConstants<f64>> {
    let mut overrides = match &flags.constants {
        Some(path) => {
            ConstantOverrides::from_file(path).with_context(|| format!("--constants {}", path.display()))?
        }
        None => ConstantOverrides::new(),
    };
    overrides.merge(&flags.flag_overrides());
    Ok(load_constants(Some(&overrides))?)
}

fn reject(format: Format, allowed: &[Format]) -> anyhow::Result<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        let name = |f: &Format| format!("{f:?}").to_lowercase();
        let list: Vec<String> = allowed.iter().map(name).collect();
        bail!("--output {} is not available here (use one of {})", name(&format), list.join(", "))
    }
}

const RECORD_FORMATS: [Format; 3] = [Format::Table, Format::Json, Format::Csv];

fn derive(a: DeriveArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    reject(a.output.output, &RECORD_FORMATS)?;
    let k = resolve_constants(&a.constants)?;
    let design = close_with_density(&a.design.input(), &a.design.rho.0, &k)?;
    match a.output.output {
        Format::Json => json(&design, out)?,
        Format::Csv => emit::design_csv(&design, out)?,
        _ => emit::design_table(&design, a.output.human).write(out)?,
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct InvertReport<'a> {
    field: &'a str,
    value: f64,
    unit: String,
    design: &'a ClockDesign<f64>,
}

fn invert(a: InvertArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    reject(a.output.output, &RECORD_FORMATS)?;
    let k = resolve_constants(&a.constants)?;
    let design = close_with_density(&a.design.input(), &a.design.rho.0, &k)?;
    let value = design.get(a.target);
    let dim = a.target.dimension();
    match a.output.output {
        Format::Json => {
            json(&InvertReport { field: a.target.key(), value, unit: dim.unit(), design: &design }, out)?
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["field", "value", "unit"])?;
            w.write_record([a.target.key(), &format!("{value:e}"), &dim.unit()])?;
            w.flush()?;
        }
        _ => writeln!(out, "{} = {}", a.target.key(), with_unit(value, dim, a.output.human))?,
    }
    Ok(Status::Ok)
}

#[derive(Serialize)]
struct CheckReport<'a> {
    design: &'a ClockDesign<f64>,
    total_mass: f64,
    report: &'a FeasibilityReport<f64>,
    material: MaterialScale,
    spreading: &'a SpreadingReport<f64>,
    all_pass: bool,
}

const REQUIREMENTS: [(&str, &str); 4] =
    [("a", "n >> 1"), ("b", "dx >> L_M"), ("c", "dial >> R"), ("d", "dx >> R")];

fn requirement_rows(report: &FeasibilityReport<f64>) -> [(&'static str, &'static str, &Requirement<f64>); 4] {
    let reqs = [&report.req_a, &report.req_b, &report.req_c, &report.req_d];
    std::array::from_fn(|i| (REQUIREMENTS[i].0, REQUIREMENTS[i].1, reqs[i]))
}

fn check_cmd(a: CheckArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    reject(a.output.output, &RECORD_FORMATS)?;
    let params = a.check.params().map_err(anyhow::Error::msg)?;
    let k = resolve_constants(&a.constants)?;
    let design = close_with_density(&a.design.input(), &a.design.rho.0, &k)?;
    let report = check(&design, &params, &k);
    let material = material_note(&design, &params, &k);
    let spreading = verify_spreading_condition(&design, &k);
    match a.output.output {
        Format::Json => json(
            &CheckReport {
                design: &design,
                total_mass: design.total_mass(),
                report: &report,
                material,
                spreading: &spreading,
                all_pass: report.all_pass(),
            },
            out,
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["requirement", "relation", "ratio", "margin", "pass"])?;
            for (id, rel, r) in requirement_rows(&report) {
                w.write_record([
                    id,
                    rel,
                    &format!("{:e}", r.ratio),
                    &format!("{:e}", r.margin),
                    &r.pass.to_string(),
                ])?;
            }
            w.flush()?;
        }
        _ => {
            emit::design_table(&design, a.output.human).write(out)?;
            writeln!(out)?;
            let mut t = Table::new(&["req", "relation", "ratio", "margin", "result"]);
            for (id, rel, r) in requirement_rows(&report) {
                t.row([id, rel, &num(r.ratio), &num(r.margin), if r.pass { "pass" } else { "FAIL" }]);
            }
            t.write(out)?;
            writeln!(out)?;
            let mut t = Table::new(&["note", "value"]);
            t.row(["u/c".to_string(), num(report.speed_fraction)]);
            t.row([
                "relativistic warning".to_string(),
                if report.relativistic_warning { "yes" } else { "no" }.to_string(),
            ]);
            t.row(["mass class".to_string(), format!("{:?}", report.mass_class).to_lowercase()]);
            t.row(["size class".to_string(), format!("{:?}", report.size_class).to_lowercase()]);
            t.row(["material".to_string(), material.label().to_string()]);
            t.row(["width growth over run".to_string(), num(spreading.growth_hbar)]);
            t.write(out)?;
        }
    }
    Ok(if a.strict && !report.all_pass() { Status::Failed } else { Status::Ok })
}

fn sweep_cmd(a: SweepArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    let params = a.check.params().map_err(anyhow::Error::msg)?;
    let k = resolve_constants(&a.constants)?;
    let mut cfg = SweepConfig::new(a.x.0, a.y.0, a.design.mode);
    cfg.fixed = a.design.knowns();
    cfg.params = params;
    cfg.density = a.design.rho.0;
    cfg.threads = a.threads;
    let result = sweep(&cfg, &k)?;
    match a.output.output {
        Format::Json => json(&result, out)?,
        Format::Csv => sweep_csv(&result, out)?,
        Format::Svg => out.write_all(svg::region_map(&result).as_bytes())?,
        Format::Table => sweep_table(&result, out)?,
    }
    let any = result.summary.all_requirements_pass > 0;
    Ok(if a.strict && !any { Status::Failed } else { Status::Ok })
}

/// Column order of the sweep CSV.
pub const SWEEP_CSV_HEADER: [&str; 36] = [
    "row",
    "col",
    "x_field",
    "x",
    "y_field",
    "y",
    "status",
    "reason",
    "tau",
    "T",
    "n",
    "u",
    "dial",
    "dx",
    "dp",
    "dt",
    "du",
    "M",
    "L_M",
    "R",
    "rho",
    "mode",
    "req_a_margin",
    "req_a_pass",
    "req_b_margin",
    "req_b_pass",
    "req_c_margin",
    "req_c_pass",
    "req_d_margin",
    "req_d_pass",
    "speed_fraction",
    "relativistic_warning",
    "mass_class",
    "size_class",
    "material",
    "region",
];

fn sweep_csv(result: &SweepResult<f64>, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_CSV_HEADER)?;
    let [ax, ay] = &result.axes;
    for cell in &result.cells {
        let mut rec = vec![
            cell.row.to_string(),
            cell.col.to_string(),
            ax.field.key().to_string(),
            format!("{:e}", cell.x),
            ay.field.key().to_string(),
            format!("{:e}", cell.y),
        ];
        match &cell.outcome {
            CellOutcome::Valid { design, report, material } => {
                rec.push("valid".into());
                rec.push(String::new());
                rec.extend(emit::design_record(design));
                for r in [&report.req_a, &report.req_b, &report.req_c, &report.req_d] {
                    rec.push(format!("{:e}", r.margin));
                    rec.push(r.pass.to_string());
                }
                rec.push(format!("{:e}", report.speed_fraction));
                rec.push(report.relativistic_warning.to_string());
                rec.push(format!("{:?}", report.mass_class).to_lowercase());
                rec.push(format!("{:?}", report.size_class).to_lowercase());
                rec.push(material.label().to_string());
            }
            CellOutcome::Invalid { reason } => {
                rec.push("invalid".into());
                rec.push(reason.clone());
                rec.resize(SWEEP_CSV_HEADER.len() - 1, String::new());
            }
        }
        rec.push(Region::of(cell).key().to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn sweep_table(result: &SweepResult<f64>, out: &mut dyn Write) -> anyhow::Result<()> {
    let [ax, ay] = &result.axes;
    writeln!(out, "{} (left to right) x {} (bottom to top)", ax.field, ay.field)?;
    for (j, y) in result.grid[1].iter().enumerate().rev() {
        let line: String = (0..result.grid[0].len()).map(|i| Region::of(result.cell(i, j)).glyph()).collect();
        writeln!(out, "{:>11}  {}", num(*y), line)?;
    }
    writeln!(out)?;
    let mut legend = Table::new(&["glyph", "region"]);
    for r in Region::ALL {
        legend.row([r.glyph().to_string(), r.key().to_string()]);
    }
    legend.write(out)?;
    writeln!(out)?;
    let s = &result.summary;
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), num);
    let mut t = Table::new(&["summary", "count"]);
    for (label, v) in [
        ("cells", s.total.to_string()),
        ("invalid", s.invalid.to_string()),
        ("microscopic mass", s.mass_microscopic.to_string()),
        ("microscopic size", s.size_microscopic.to_string()),
        ("intermediate size", s.size_intermediate.to_string()),
        ("macroscopic size", s.size_macroscopic.to_string()),
        ("all requirements pass", s.all_requirements_pass.to_string()),
        ("fully microscopic", s.fully_microscopic.to_string()),
        ("relativistic warning", s.relativistic.to_string()),
        ("max n, microscopic mass and size", opt(s.max_feasible_n)),
        ("same, excluding unstable nuclei", opt(s.max_feasible_n_stable)),
    ] {
        t.row([label.to_string(), v]);
    }
    t.write(out)?;
    Ok(())
}

#[derive(Serialize)]
struct Analytic {
    /// `dx/u`.
    position_term: f64,
    /// `dial·du/u²`.
    velocity_term: f64,
    /// `dx/u` when the far end is jittered, else 0.
    detector_term: f64,
    combined: f64,
}

#[derive(Serialize)]
struct ArrivalReport {
    samples: usize,
    seed: u64,
    velocity_spread: bool,
    detector_jitter: bool,
    mean: f64,
    spread: f64,
    used: usize,
    discarded: usize,
    spread_over_tau: f64,
    /// `(mean − T)` in standard errors.
    mean_offset_se: f64,
}

#[derive(Serialize)]
struct SimulateReport<'a> {
    design: &'a ClockDesign<f64>,
    spreading: &'a SpreadingReport<f64>,
    arrival: ArrivalReport,
    analytic: Analytic,
    pass: bool,
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    reject(a.output.output, &[Format::Table, Format::Json])?;
    let k = resolve_constants(&a.constants)?;
    let design = close_with_density(&a.design.input(), &a.design.rho.0, &k)?;
    let spreading = verify_spreading_condition(&design, &k);
    let mut opts = ArrivalOptions::new(a.samples, a.seed);
    opts.velocity_spread = !a.no_velocity_spread;
    opts.detector_jitter = a.detector_jitter;
    opts.threads = a.threads;
    let stats = arrival_time_spread(&design, &opts)?;

    let u = design.hand_speed;
    let position_term = design.packet_width / u;
    let velocity_term =
        if opts.velocity_spread { design.dial_length * design.velocity_spread / (u * u) } else { 0.0 };
    let detector_term = if opts.detector_jitter { position_term } else { 0.0 };
    let analytic = Analytic {
        position_term,
        velocity_term,
        detector_term,
        combined: (position_term.powi(2) + velocity_term.powi(2) + detector_term.powi(2)).sqrt(),
    };
    let arrival = ArrivalReport {
        samples: a.samples,
        seed: a.seed,
        velocity_spread: opts.velocity_spread,
        detector_jitter: opts.detector_jitter,
        mean: stats.mean,
        spread: stats.spread,
        used: stats.used,
        discarded: stats.discarded,
        spread_over_tau: stats.spread / design.accuracy,
        mean_offset_se: (stats.mean - design.running_time) / (stats.spread / (stats.used as f64).sqrt()),
    };
    let pass = spreading.satisfied && (1.0..=2.5).contains(&arrival.spread_over_tau);

    if let Some(path) = &a.dump {
        let convention = match a.convention {
            Convention::Standard => WidthConvention::StandardDeviationHbarHalf,
            Convention::Hbar => WidthConvention::PaperHbar,
        };
        let file = File::create(path).with_context(|| format!("--dump {}", path.display()))?;
        dump_snapshots(&design, &k, convention, a.snapshots as usize, &mut BufWriter::new(file))
            .with_context(|| format!("--dump {}", path.display()))?;
    }

    match a.output.output {
        Format::Json => {
            json(&SimulateReport { design: &design, spreading: &spreading, arrival, analytic, pass }, out)?
        }
        _ => {
            let h = a.output.human;
            let mut t = Table::new(&["quantity", "value"]);
            let time = |v: f64| with_unit(v, Dimension::TIME, h);
            for (label, v) in [
                ("tau", time(design.accuracy)),
                ("T", time(design.running_time)),
                ("width growth (sqrt2 width)", num(spreading.growth_hbar)),
                ("width growth (std dev)", num(spreading.growth_standard)),
                ("end-of-run spread / tau (sqrt2 width)", num(spreading.end_ratio_hbar)),
                ("end-of-run spread / tau (std dev)", num(spreading.end_ratio_standard)),
                ("samples used", arrival.used.to_string()),
                ("samples discarded", arrival.discarded.to_string()),
                ("mean arrival", time(arrival.mean)),
                ("mean - T, standard errors", num(arrival.mean_offset_se)),
                ("arrival spread", time(arrival.spread)),
                ("arrival spread / tau", num(arrival.spread_over_tau)),
                ("analytic: position term dx/u", time(analytic.position_term)),
                ("analytic: velocity term dial*du/u^2", time(analytic.velocity_term)),
                ("analytic: detector term", time(analytic.detector_term)),
                ("analytic: combined", time(analytic.combined)),
                ("seed", a.seed.to_string()),
                ("result", if pass { "pass" } else { "FAIL" }.to_string()),
            ] {
                t.row([label.to_string(), v]);
            }
            t.write(out)?;
        }
    }
    Ok(if a.strict && !pass { Status::Failed } else { Status::Ok })
}

/// Column header of the `--dump` file.
pub const DUMP_CSV_HEADER: [&str; 3] = ["x", "probability_density", "t"];

/// `|ψ|²` over the run in the frame moving with the hand: `x` is the offset
/// from the hand's classical position.
pub fn dump_snapshots(
    design: &ClockDesign<f64>,
    constants: &PhysicalConstants<f64>,
    convention: WidthConvention,
    snapshots: usize,
    out: &mut dyn Write,
) -> anyhow::Result<()> {
    let hbar = constants.hbar;
    let state = GaussianPacketState::new(0.0, 0.0, design.packet_width, design.mass, convention)?;
    let spec = GridSpec::auto(&state, design.running_time, hbar)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DUMP_CSV_HEADER)?;
    for s in 0..snapshots {
        let t = if snapshots == 1 { 0.0 } else { design.running_time * s as f64 / (snapshots - 1) as f64 };
        let grid = propagate_grid(&state, &spec, t, hbar)?;
        for (x, p) in grid.density() {
            w.write_record([format!("{x:e}"), format!("{p:e}"), format!("{t:e}")])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn reproduce(a: ReproduceArgs, out: &mut dyn Write) -> anyhow::Result<Status> {
    reject(a.output.output, &RECORD_FORMATS)?;
    let k = resolve_constants(&a.constants)?;
    let pattern = a.case.as_deref().map(glob::Pattern::new).transpose().context("--case")?;
    let report = repro::reproduce(pattern.as_ref(), &Default::default(), &k)?;
    if report.rows.is_empty() {
        bail!("--case {} matches no reference case", a.case.unwrap_or_default());
    }
    match a.output.output {
        Format::Json => json(&report, out)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in &report.rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        _ => {
            let mut t = Table::new(&[
                "case",
                "quantity",
                "computed",
                "reference",
                "ratio",
                "rule",
                "result",
                "citation",
            ]);
            for r in &report.rows {
                t.row([
                    r.case.clone(),
                    r.quantity.clone(),
                    num(r.computed),
                    num(r.reference),
                    num(r.ratio),
                    r.rule.clone(),
                    if r.pass { "pass" } else { "FAIL" }.to_string(),
                    r.citation.clone(),
                ]);
            }
            t.write(out)?;
        }
    }
    Ok(if report.pass { Status::Ok } else { Status::Failed })
}
