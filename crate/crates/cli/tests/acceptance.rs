//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Every tolerance is pinned below.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use swclock::wavepacket::{GaussianPacketState, GridSpec, WidthConvention};
use swclock::{
    arrival_time_spread, check, close_design, invert_for, propagate_grid, sweep, ArrivalOptions, CheckParams,
    ClockDesign, DensityChoice, DesignError, DesignInput, DialMode, Field, PhysicalConstants, SizeClass,
    SweepAxis, SweepConfig,
};

// CGS constants, restated here so the oracles do not read them from the library.
const HBAR: f64 = 1.0546e-27;
const C: f64 = 2.9979e10;
const NUCLEON: f64 = 1.6726e-24;
const RHO_TERRESTRIAL: f64 = 1.0;
const RHO_NUCLEAR: f64 = 2.3e14;

const ORACLE_REL: f64 = 1e-12;
const STRONG: f64 = 10.0;
const MICRO_MASS: f64 = 1e-16;
const MICRO_DIAL: f64 = 1e-5;

type Check = Result<String, String>;
type Criterion = (u8, &'static str, fn() -> Check, Duration);

fn within_factor(v: f64, reference: f64, f: f64) -> bool {
    let r = v / reference;
    r >= 1.0 / f && r <= f
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Maximal-dial design from (tau, n), computed by hand.
struct Oracle {
    tau: f64,
    t: f64,
    n: f64,
    u: f64,
    dial: f64,
    dx: f64,
    du: f64,
    m: f64,
    l_m: f64,
    r: f64,
}

impl Oracle {
    fn new(tau: f64, n: f64, rho: f64) -> Self {
        let m = HBAR * n.powi(3) / (C * C * tau);
        let dx = C * tau / n;
        Oracle {
            tau,
            t: n * tau,
            n,
            u: C / n,
            dial: C * tau,
            dx,
            du: C / (n * n),
            m,
            l_m: HBAR / (m * C),
            r: 0.62 * (m / rho).cbrt(),
        }
    }

    /// From (n, M): tau = hbar·n³/(c²·M).
    fn from_mass(n: f64, m: f64, rho: f64) -> Self {
        Oracle::new(HBAR * n.powi(3) / (C * C * m), n, rho)
    }

    fn compare(&self, d: &ClockDesign<f64>) -> Result<(), String> {
        for (name, want, got) in [
            ("tau", self.tau, d.accuracy),
            ("T", self.t, d.running_time),
            ("n", self.n, d.relative_accuracy),
            ("u", self.u, d.hand_speed),
            ("dial", self.dial, d.dial_length),
            ("dx", self.dx, d.packet_width),
            ("du", self.du, d.velocity_spread),
            ("M", self.m, d.mass),
            ("L_M", self.l_m, d.compton_length),
            ("R", self.r, d.radius),
        ] {
            ensure(rel(want, got) <= ORACLE_REL, format!("{name}: oracle {want:e} vs {got:e}"))?;
        }
        Ok(())
    }
}

fn constants() -> PhysicalConstants<f64> {
    let k = PhysicalConstants::default();
    assert_eq!((k.hbar, k.c, k.nucleon_mass), (HBAR, C, NUCLEON));
    assert_eq!((k.density_terrestrial, k.density_nuclear), (RHO_TERRESTRIAL, RHO_NUCLEAR));
    k
}

fn params() -> CheckParams<f64> {
    CheckParams::new(STRONG, 0.01).unwrap()
}

fn criterion_1() -> Check {
    let k = constants();
    let d = close_design(
        &DesignInput::maximal().with(Field::Accuracy, 1e-8).with(Field::RunningTime, 8.64e4),
        &k,
    )
    .map_err(|e| e.to_string())?;
    Oracle::new(1e-8, 8.64e12, RHO_TERRESTRIAL).compare(&d)?;
    let rep = check(&d, &params(), &k);
    ensure(d.relative_accuracy == 8.64e12, format!("n = {:e}", d.relative_accuracy))?;
    ensure((0.048..=0.108).contains(&d.mass), format!("M = {:e}", d.mass))?;
    ensure(rel(d.dial_length, 300.0) <= 0.10 && within_factor(d.dial_length, 300.0, 1.1), "dial")?;
    ensure(within_factor(d.packet_width, 1e-11, 5.0), format!("dx = {:e}", d.packet_width))?;
    ensure((d.radius / 0.26 - 1.0).abs() <= 0.10, format!("R = {:e}", d.radius))?;
    // dx << R: requirement d fails by more than the strong factor the other way
    ensure(!rep.req_d.pass && d.radius / d.packet_width >= STRONG, "dx << R not flagged")?;
    Ok(format!(
        "n = {:e}, M = {:.4} g, dial = {:.2} cm, dx = {:.3e} cm, R = {:.4} cm, R/dx = {:.2e}",
        d.relative_accuracy,
        d.mass,
        d.dial_length,
        d.packet_width,
        d.radius,
        d.radius / d.packet_width
    ))
}

fn criterion_2() -> Check {
    let k = constants();
    let d = close_design(
        &DesignInput::maximal().with(Field::Accuracy, 1e-7).with(Field::RelativeAccuracy, 1e7),
        &k,
    )
    .map_err(|e| e.to_string())?;
    Oracle::new(1e-7, 1e7, RHO_TERRESTRIAL).compare(&d)?;
    let rep = check(&d, &params(), &k);
    ensure(within_factor(d.mass, 1e-20, 1.5), format!("M = {:e}", d.mass))?;
    ensure((d.hand_speed / 3e3 - 1.0).abs() <= 0.10, format!("u = {:e}", d.hand_speed))?;
    ensure(within_factor(d.packet_width, 3e-4, 1.5), format!("dx = {:e}", d.packet_width))?;
    ensure(within_factor(d.dial_length, 3e3, 1.5), format!("dial = {:e}", d.dial_length))?;
    ensure(rep.req_d.pass && rep.req_d.margin > 1e2, format!("dx/R margin = {:e}", rep.req_d.margin))?;
    Ok(format!(
        "M = {:.3e} g, u = {:.1} cm/s, dx = {:.3e} cm, dial = {:.1} cm, dx/R margin = {:.1}",
        d.mass, d.hand_speed, d.packet_width, d.dial_length, rep.req_d.margin
    ))
}

fn criterion_3() -> Check {
    let k = constants();
    let d = close_design(
        &DesignInput::maximal()
            .with(Field::RelativeAccuracy, 100.0)
            .with(Field::Mass, NUCLEON)
            .with_density(RHO_NUCLEAR),
        &k,
    )
    .map_err(|e| e.to_string())?;
    Oracle::from_mass(100.0, NUCLEON, RHO_NUCLEAR).compare(&d)?;
    let rep = check(&d, &params(), &k);
    for (name, v, reference) in [
        ("tau", d.accuracy, 1e-18),
        ("T", d.running_time, 1e-16),
        ("dx", d.packet_width, 3e-10),
        ("dial", d.dial_length, 3e-8),
        ("u", d.hand_speed, 3e8),
    ] {
        ensure(within_factor(v, reference, 1.5), format!("{name} = {v:e} vs {reference:e}"))?;
    }
    ensure(within_factor(d.radius, 1e-13, 2.0), format!("R = {:e}", d.radius))?;
    ensure(rep.relativistic_warning, format!("no relativistic warning at u/c = {:e}", rep.speed_fraction))?;
    Ok(format!(
        "tau = {:.3e} s, T = {:.3e} s, dx = {:.3e} cm, dial = {:.3e} cm, u = {:.4e} cm/s, R = {:.3e} cm, warning at u/c = {:.4}",
        d.accuracy, d.running_time, d.packet_width, d.dial_length, d.hand_speed, d.radius, rep.speed_fraction
    ))
}

/// Hand evaluation of one survey cell at density `rho`:
/// (req c, req d, microscopic mass, microscopic dial).
fn survey_oracle(n: f64, m: f64, rho: f64) -> (bool, bool, bool, bool) {
    let o = Oracle::from_mass(n, m, rho);
    (o.dial / o.r >= STRONG, o.dx / o.r >= STRONG, m <= MICRO_MASS, o.dial <= MICRO_DIAL)
}

fn criterion_4() -> Check {
    let k = constants();
    let mut cfg = SweepConfig::new(
        SweepAxis::new(Field::RelativeAccuracy, 10.0, 1e6, 6),
        SweepAxis::new(Field::Mass, 1e-27, 1e-16, 12),
        DialMode::Maximal,
    );
    cfg.params = params();
    cfg.density = DensityChoice::Nuclear;
    let r = sweep(&cfg, &k).map_err(|e| e.to_string())?;
    ensure(r.grid[0] == [10.0, 1e2, 1e3, 1e4, 1e5, 1e6], format!("n grid {:?}", r.grid[0]))?;

    // the sweep agrees with the hand evaluation cell by cell
    let mut oracle_max: Option<f64> = None;
    let mut above_100 = Vec::new();
    for cell in &r.cells {
        let (_, rep, material) = cell.valid().ok_or(format!("cell ({}, {}) invalid", cell.row, cell.col))?;
        let (c, d, mm, md) = survey_oracle(cell.x, cell.y, RHO_NUCLEAR);
        ensure(
            (rep.req_c.pass, rep.req_d.pass) == (c, d)
                && (rep.mass_class == swclock::MassClass::Microscopic) == mm
                && (rep.size_class == SizeClass::Microscopic) == md,
            format!("cell n={:e} M={:e} disagrees with oracle", cell.x, cell.y),
        )?;
        if c && d && mm && md {
            oracle_max = Some(oracle_max.map_or(cell.x, |b: f64| b.max(cell.x)));
            if cell.x > 100.0 {
                above_100.push(format!("n={:e} M={:e} ({})", cell.x, cell.y, material.label()));
            }
        }
    }
    ensure(r.summary.max_feasible_n == oracle_max, "summary disagrees with oracle")?;

    // at n = 100, M >= 1e-20 and M <= 1e-27 each break c, d or the size bound
    let row = r.grid[0].iter().position(|&n| n == 100.0).unwrap();
    for (j, &m) in r.grid[1].iter().enumerate() {
        if m >= 1e-20 * (1.0 - 1e-12) || m <= 1e-27 * (1.0 + 1e-12) {
            let (_, rep, _) = r.cell(row, j).valid().unwrap();
            ensure(
                !rep.req_c.pass || !rep.req_d.pass || rep.size_class != SizeClass::Microscopic,
                format!("n = 100, M = {m:e} satisfies every condition"),
            )?;
        }
    }

    let max = r.summary.max_feasible_n;
    let detail = format!(
        "max feasible n = {}, excluding unstable nuclei = {}; feasible above n = 100: [{}]; n = 100 edge rows violate as expected",
        max.map_or("none".into(), |v| format!("{v:e}")),
        r.summary.max_feasible_n_stable.map_or("none".into(), |v| format!("{v:e}")),
        above_100.join(", ")
    );
    ensure(max == Some(100.0), format!("expected max feasible n = 1e2; {detail}"))?;
    Ok(detail)
}

fn criterion_5() -> Check {
    let k = constants();
    let fixed = DesignInput::maximal().with(Field::RelativeAccuracy, 8.64e12).with(Field::Mass, 1e-16);
    let t = invert_for(Field::RunningTime, &fixed, &k).map_err(|e| e.to_string())?.value();
    let oracle = Oracle::from_mass(8.64e12, 1e-16, RHO_TERRESTRIAL).t;
    ensure(rel(t, oracle) <= ORACLE_REL, format!("T = {t:e} vs oracle {oracle:e}"))?;
    ensure(t > 4.3e17, format!("T = {t:e}"))?;
    Ok(format!("T = {t:.3e} s = {:.1e} x 4.3e17 s", t / 4.3e17))
}

/// Closed-form standard deviation of a free Gaussian packet.
fn std_oracle(sigma: f64, m: f64, t: f64) -> f64 {
    sigma * (1.0 + (HBAR * t / (2.0 * m * sigma * sigma)).powi(2)).sqrt()
}

fn criterion_6() -> Check {
    const CASES: usize = 100;
    const WIDTH_REL: f64 = 1e-6;
    const NORM_ABS: f64 = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(20_061);
    let mut worst_width: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    for case in 0..CASES {
        let m = NUCLEON * 10f64.powf(rng.random_range(0.0..5.0));
        let sigma = 10f64.powf(rng.random_range(-11.0..-7.0));
        let conv = WidthConvention::BOTH[case % 2];
        let v = rng.random_range(-4.0..4.0) * HBAR / (m * sigma);
        let sigma0 = sigma * conv.factor::<f64>();
        let state = GaussianPacketState::new(0.0, v, sigma0, m, conv).map_err(|e| e.to_string())?;
        let t = rng.random_range(0.0..8.0) * 2.0 * m * sigma * sigma / HBAR;
        let spec = GridSpec::auto(&state, t, HBAR).map_err(|e| e.to_string())?;
        let g = propagate_grid(&state, &spec, t, HBAR).map_err(|e| e.to_string())?;
        worst_width = worst_width.max(rel(g.std_dev(), std_oracle(sigma, m, t)));
        worst_norm = worst_norm.max((g.norm() - 1.0).abs());
    }
    ensure(worst_width <= WIDTH_REL, format!("width error {worst_width:e}"))?;
    ensure(worst_norm <= NORM_ABS, format!("norm error {worst_norm:e}"))?;

    // growth at t = M·dx²/hbar, dx read in each convention
    let (m, dx) = (1.17e-20, 3e-4);
    let t = m * dx * dx / HBAR;
    let mut growth = Vec::new();
    for conv in WidthConvention::BOTH {
        let sigma = dx / conv.factor::<f64>();
        let state = GaussianPacketState::new(0.0, 0.0, dx, m, conv).map_err(|e| e.to_string())?;
        let spec = GridSpec::auto(&state, t, HBAR).map_err(|e| e.to_string())?;
        let g = propagate_grid(&state, &spec, t, HBAR).map_err(|e| e.to_string())?;
        let measured = g.std_dev() / sigma;
        let closed = std_oracle(sigma, m, t) / sigma;
        ensure(rel(measured, closed) <= WIDTH_REL, format!("{conv:?}: {measured} vs {closed}"))?;
        ensure(measured > 1.0 && measured <= 2.5, format!("{conv:?}: growth {measured}"))?;
        growth.push(measured);
    }
    Ok(format!(
        "{CASES} cases: worst width error {worst_width:.1e}, worst norm error {worst_norm:.1e}; growth {:.4} (std dev), {:.4} (sqrt2 width)",
        growth[0], growth[1]
    ))
}

fn criterion_7() -> Check {
    const SAMPLES: usize = 100_000;
    const ORACLE_MATCH: f64 = 0.05;
    let k = constants();
    let d = close_design(
        &DesignInput::maximal().with(Field::Accuracy, 1e-7).with(Field::RelativeAccuracy, 1e7),
        &k,
    )
    .map_err(|e| e.to_string())?;
    let s = arrival_time_spread(&d, &ArrivalOptions::new(SAMPLES, 7)).map_err(|e| e.to_string())?;
    let o = Oracle::new(1e-7, 1e7, RHO_TERRESTRIAL);
    // first-order error propagation of t = dial/v with x0 ~ N(dial, dx), v ~ N(u, du)
    let oracle = ((o.dx / o.u).powi(2) + (o.dial * o.du / (o.u * o.u)).powi(2)).sqrt();
    let se = s.spread / (s.used as f64).sqrt();
    ensure(s.used + s.discarded == SAMPLES, "sample count")?;
    ensure(s.spread >= o.tau && s.spread <= 2.5 * o.tau, format!("spread/tau = {}", s.spread / o.tau))?;
    ensure((s.mean - o.t).abs() < 3.0 * se, format!("mean - T = {:.2} SE", (s.mean - o.t) / se))?;
    ensure(rel(s.spread, oracle) <= ORACLE_MATCH, format!("spread {:e} vs oracle {oracle:e}", s.spread))?;
    Ok(format!(
        "spread/tau = {:.4}, (mean - T)/SE = {:.2}, spread/oracle = {:.4}",
        s.spread / o.tau,
        (s.mean - o.t) / se,
        s.spread / oracle
    ))
}

fn criterion_8() -> Check {
    const CLOSURES: usize = 1000;
    let k = constants();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let solved: Vec<Field> = Field::ALL.into_iter().filter(|f| *f != Field::Density).collect();
    let mut worst: f64 = 0.0;
    let mut worst_trip: f64 = 0.0;
    let mut trips = 0;
    for _ in 0..CLOSURES {
        let tau = 10f64.powf(rng.random_range(-20.0..2.0));
        let n = 10f64.powf(rng.random_range(0.0..14.0));
        let d = close_design(
            &DesignInput::maximal().with(Field::Accuracy, tau).with(Field::RelativeAccuracy, n),
            &k,
        )
        .map_err(|e| e.to_string())?;
        for (lhs, rhs) in [
            (d.mass * d.packet_width.powi(2), HBAR * d.running_time),
            (d.dial_length, d.hand_speed * d.running_time),
            (d.packet_width * d.relative_accuracy, d.dial_length),
            (d.velocity_spread * d.relative_accuracy, d.hand_speed),
            (d.compton_length * d.relative_accuracy.powi(2), d.packet_width),
        ] {
            worst = worst.max(rel(lhs, rhs));
        }
        // re-derive every field from a random pair of other fields
        let a = solved[rng.random_range(0..solved.len())];
        let b = solved[rng.random_range(0..solved.len())];
        if a == b {
            continue;
        }
        let fixed = DesignInput::maximal().with(a, d.get(a)).with(b, d.get(b));
        for target in &solved {
            match invert_for(*target, &fixed, &k) {
                Ok(q) => worst_trip = worst_trip.max(rel(q.value(), d.get(*target))),
                Err(DesignError::Underdetermined { .. }) => break,
                Err(e) => return Err(format!("({a}, {b}) -> {target}: {e}")),
            }
            trips += 1;
        }
    }
    ensure(worst <= ORACLE_REL, format!("identity error {worst:e}"))?;
    ensure(worst_trip <= ORACLE_REL, format!("round-trip error {worst_trip:e}"))?;
    ensure(trips > 5000, format!("only {trips} round trips"))?;
    Ok(format!(
        "{CLOSURES} closures: worst identity error {worst:.1e}; {trips} round trips, worst {worst_trip:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (1, "macroscopic example", criterion_1, Duration::from_secs(1)),
        (2, "microscopic-mass example", criterion_2, Duration::from_secs(1)),
        (3, "nucleon clock", criterion_3, Duration::from_secs(1)),
        (4, "survey", criterion_4, Duration::from_secs(10)),
        (5, "age of the Universe", criterion_5, Duration::from_secs(1)),
        (6, "dynamics oracle", criterion_6, Duration::from_secs(60)),
        (7, "arrival-time Monte Carlo", criterion_7, Duration::from_secs(30)),
        (8, "algebraic properties", criterion_8, Duration::from_secs(60)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, f, limit) in criteria {
        let start = Instant::now();
        let result = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
        let elapsed = start.elapsed();
        let result =
            result.and_then(|msg| if elapsed <= limit { Ok(msg) } else { Err(format!("{msg}; too slow")) });
        let (tag, msg) = match &result {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        failed += result.is_err() as usize;
        println!(
            "criterion {id} {tag} [{name}] {msg} ({:.3} s, limit {} s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!("acceptance: {} of 8 criteria pass", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
