//! Region classification and the standalone SVG map.

use std::fmt::Write as _;

use swclock::{SweepCell, SweepResult};

/// Color class of a sweep cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// Every requirement passes with microscopic mass and size.
    Microscopic,
    /// Every requirement passes; mass or size is not microscopic.
    Feasible,
    /// Requirements c and d pass, a or b does not.
    Marginal,
    /// Requirement c or d fails.
    Infeasible,
    /// The design could not be closed.
    Invalid,
}

impl Region {
    pub const ALL: [Region; 5] =
        [Region::Microscopic, Region::Feasible, Region::Marginal, Region::Infeasible, Region::Invalid];

    pub fn of(cell: &SweepCell<f64>) -> Region {
        let Some((_, report, _)) = cell.valid() else {
            return Region::Invalid;
        };
        if !(report.req_c.pass && report.req_d.pass) {
            Region::Infeasible
        } else if !(report.req_a.pass && report.req_b.pass) {
            Region::Marginal
        } else if report.fully_microscopic() {
            Region::Microscopic
        } else {
            Region::Feasible
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Region::Microscopic => "microscopic",
            Region::Feasible => "feasible",
            Region::Marginal => "marginal",
            Region::Infeasible => "infeasible",
            Region::Invalid => "invalid",
        }
    }

    pub fn color(self) -> &'static str {
        match self {
            Region::Microscopic => "#2e7d32",
            Region::Feasible => "#1565c0",
            Region::Marginal => "#f9a825",
            Region::Infeasible => "#c62828",
            Region::Invalid => "#9e9e9e",
        }
    }

    /// One-character code for text maps.
    pub fn glyph(self) -> char {
        match self {
            Region::Microscopic => '#',
            Region::Feasible => '+',
            Region::Marginal => '~',
            Region::Infeasible => '-',
            Region::Invalid => '?',
        }
    }

    fn legend(self) -> &'static str {
        match self {
            Region::Microscopic => "all requirements pass, microscopic mass and size",
            Region::Feasible => "all requirements pass",
            Region::Marginal => "c and d pass, a or b fails",
            Region::Infeasible => "c or d fails",
            Region::Invalid => "no closed design",
        }
    }
}

/// Marker color for cells that raise the relativistic warning.
pub const RELATIVISTIC_MARK: &str = "#ffffff";

const CELL: usize = 36;
const LEFT: usize = 90;
const TOP: usize = 50;
const LEGEND_WIDTH: usize = 340;

fn tick(v: f64) -> String {
    let e = v.log10();
    if (e - e.round()).abs() < 1e-9 {
        format!("1e{}", e.round() as i64)
    } else {
        format!("{v:.2e}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// The map: first axis left to right, second axis bottom to top, one
/// square per cell, legend on the right.
pub fn region_map(result: &SweepResult<f64>) -> String {
    let (nx, ny) = (result.grid[0].len(), result.grid[1].len());
    let plot_w = nx * CELL;
    let plot_h = ny * CELL;
    let width = LEFT + plot_w + 30 + LEGEND_WIDTH;
    let height = (TOP + plot_h + 60).max(TOP + 30 * (Region::ALL.len() + 2));
    let [ax, ay] = &result.axes;

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(s, "<!-- swclock {} -->", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\" font-size=\"11\">"
    );
    let _ = writeln!(s, "<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{LEFT}\" y=\"20\" font-size=\"13\">{} vs {} ({}, strong factor {})</text>",
        escape(ax.field.key()),
        escape(ay.field.key()),
        result.mode,
        result.params.strong_factor
    );

    for cell in &result.cells {
        let region = Region::of(cell);
        let x = LEFT + cell.row * CELL;
        let y = TOP + (ny - 1 - cell.col) * CELL;
        let _ = writeln!(
            s,
            "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" fill=\"{}\" stroke=\"#ffffff\"><title>{}={} {}={}: {}</title></rect>",
            region.color(),
            escape(ax.field.key()),
            tick(cell.x),
            escape(ay.field.key()),
            tick(cell.y),
            region.key()
        );
        if cell.valid().is_some_and(|(_, r, _)| r.relativistic_warning) {
            let _ = writeln!(
                s,
                "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{RELATIVISTIC_MARK}\"/>",
                x + CELL / 2,
                y + CELL / 2
            );
        }
    }

    for (i, v) in result.grid[0].iter().enumerate() {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>",
            LEFT + i * CELL + CELL / 2,
            TOP + plot_h + 16,
            tick(*v)
        );
    }
    for (j, v) in result.grid[1].iter().enumerate() {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{}</text>",
            LEFT - 6,
            TOP + (ny - 1 - j) * CELL + CELL / 2 + 4,
            tick(*v)
        );
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{} ({}, log scale)</text>",
        LEFT + plot_w / 2,
        TOP + plot_h + 38,
        escape(ax.field.key()),
        escape(&ax.field.dimension().unit())
    );
    let _ = writeln!(
        s,
        "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{} ({}, log scale)</text>",
        TOP + plot_h / 2,
        TOP + plot_h / 2,
        escape(ay.field.key()),
        escape(&ay.field.dimension().unit())
    );

    let lx = LEFT + plot_w + 30;
    for (i, region) in Region::ALL.iter().enumerate() {
        let y = TOP + i * 30;
        let _ = writeln!(
            s,
            "<rect x=\"{lx}\" y=\"{y}\" width=\"18\" height=\"18\" fill=\"{}\"/>",
            region.color()
        );
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">{}</text>", lx + 26, y + 13, region.legend());
    }
    let y = TOP + Region::ALL.len() * 30;
    let _ = writeln!(s, "<rect x=\"{lx}\" y=\"{y}\" width=\"18\" height=\"18\" fill=\"#616161\"/>");
    let _ = writeln!(s, "<circle cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"{RELATIVISTIC_MARK}\"/>", lx + 9, y + 9);
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\">hand speed at or above {} c</text>",
        lx + 26,
        y + 13,
        result.params.rel_threshold
    );
    s.push_str("</svg>\n");
    s
}
