//! Plain-text tables and number formatting.

use std::io::{self, Write};

use swclock::{ClockDesign, DialMode, Dimension, Field};

/// Fixed-precision scientific notation used in every table.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4e}")
    } else {
        v.to_string()
    }
}

/// Parenthesized SI conversion, or `None` when CGS and SI agree.
pub fn metric(v: f64, dim: Dimension) -> Option<String> {
    if dim.mass == 0 && dim.length == 0 {
        return None;
    }
    Some(format!("({} {})", num(v * dim.si_factor()), dim.si_unit()))
}

/// Value with its CGS unit and, when asked, the SI conversion.
pub fn with_unit(v: f64, dim: Dimension, human: bool) -> String {
    let mut s = num(v);
    let unit = dim.unit();
    if !unit.is_empty() {
        s.push(' ');
        s.push_str(&unit);
    }
    if human {
        if let Some(m) = metric(v, dim) {
            s.push(' ');
            s.push_str(&m);
        }
    }
    s
}

pub fn describe(field: Field) -> &'static str {
    match field {
        Field::Accuracy => "accuracy",
        Field::RunningTime => "running time",
        Field::RelativeAccuracy => "relative accuracy T/tau",
        Field::HandSpeed => "hand speed",
        Field::DialLength => "dial length",
        Field::PacketWidth => "position spread",
        Field::MomentumSpread => "momentum spread",
        Field::TimeSpread => "passage-time spread",
        Field::VelocitySpread => "velocity spread",
        Field::Mass => "mass per body",
        Field::ComptonLength => "Compton length",
        Field::Radius => "body radius",
        Field::Density => "body density",
    }
}

/// Left-aligned text table with a dashed rule under the header.
#[derive(Debug, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row<I, T>(&mut self, cells: I)
    where
        I: IntoIterator<Item = T>,
        T: Into<String>,
    {
        self.rows.push(cells.into_iter().map(Into::into).collect());
    }

    pub fn write(&self, out: &mut dyn Write) -> io::Result<()> {
        let ncol = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for row in &self.rows {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |out: &mut dyn Write, cells: &[String]| -> io::Result<()> {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate().take(ncol) {
                if i + 1 < ncol {
                    s.push_str(c);
                    s.extend(std::iter::repeat_n(' ', widths[i] - c.chars().count() + 2));
                } else {
                    s.push_str(c);
                }
            }
            writeln!(out, "{}", s.trim_end())
        };
        line(out, &self.header)?;
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        line(out, &rule)?;
        for row in &self.rows {
            line(out, row)?;
        }
        Ok(())
    }
}

/// Every field of a design, one per row.
pub fn design_table(design: &ClockDesign<f64>, human: bool) -> Table {
    let mut t = Table::new(&["field", "value", "meaning"]);
    for field in Field::ALL {
        t.row([
            field.key().to_string(),
            with_unit(design.get(field), field.dimension(), human),
            describe(field).to_string(),
        ]);
    }
    t.row([
        "3M".to_string(),
        with_unit(design.total_mass(), Dimension::MASS, human),
        "total clock mass".to_string(),
    ]);
    t.row(["mode".to_string(), design.mode.to_string(), "dial mode".to_string()]);
    t
}

/// Keys of a design record, in CSV column order.
pub const DESIGN_CSV_HEADER: [&str; 14] =
    ["tau", "T", "n", "u", "dial", "dx", "dp", "dt", "du", "M", "L_M", "R", "rho", "mode"];

/// Design values in [`DESIGN_CSV_HEADER`] order.
pub fn design_record(design: &ClockDesign<f64>) -> Vec<String> {
    let mut rec: Vec<String> = Field::ALL.iter().map(|f| format!("{:e}", design.get(*f))).collect();
    rec.push(match design.mode {
        DialMode::General => "general".into(),
        DialMode::Maximal => "maximal".into(),
    });
    rec
}

pub fn design_csv(design: &ClockDesign<f64>, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DESIGN_CSV_HEADER)?;
    w.write_record(design_record(design))?;
    w.flush()?;
    Ok(())
}

pub fn json(value: &impl serde::Serialize, out: &mut dyn Write) -> anyhow::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}
