//! Free-particle wave-packet dynamics behind the clock relations.
//!
//! Three independent views of the same physics:
//!
//! * the closed-form width of a free Gaussian packet ([`GaussianPacketState::width_at`]),
//! * a spectral propagator on a periodic grid ([`propagate_grid`]) that
//!   applies the exact free phase `exp(-i·hbar·k²·t/2m)` in momentum space,
//! * a semiclassical Monte Carlo of the hand's passage time
//!   ([`arrival_time_spread`]).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::ClockDesign;
use crate::quantities::PhysicalConstants;
use crate::scalar::Scalar;

/// Largest growth factor over one run still accepted as "roughly doubles".
pub const MAX_GROWTH: f64 = 2.5;
/// Half-width, in standard deviations, that must stay inside the grid.
pub const SUPPORT_SIGMAS: f64 = 8.0;
/// Largest grid [`GridSpec::auto`] will build.
pub const MAX_GRID_POINTS: usize = 1 << 22;
/// Fewest Monte Carlo samples accepted.
pub const MIN_SAMPLES: usize = 1000;
/// Largest tolerated fraction of hands that never reach the far dial end.
pub const MAX_DISCARD_FRACTION: f64 = 1e-3;

const MC_BATCH: usize = 8192;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WavepacketError {
    #[error("invalid packet: {0}")]
    InvalidState(String),
    #[error(
        "grid domain [{x_min:e}, {x_max:e}] cm too small; the packet needs at least [{need_min:e}, {need_max:e}] cm"
    )]
    DomainTooSmall { x_min: f64, x_max: f64, need_min: f64, need_max: f64 },
    #[error("grid too coarse for the packet; use at least {suggested_points} points")]
    ResolutionTooCoarse { suggested_points: usize },
    #[error("grid point count {0} is not a power of two >= 2")]
    NotPowerOfTwo(usize),
    #[error("grid would need {0} points, more than the {MAX_GRID_POINTS} allowed")]
    GridTooLarge(usize),
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error(
        "{discarded} of {samples} hands never reached the dial end; design too relativistic or noisy for the semiclassical model"
    )]
    TooManyDiscarded { discarded: usize, samples: usize },
}

/// What the width field of a packet means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    /// Width is the position standard deviation; minimal packets have
    /// `σx·σp = hbar/2`.
    StandardDeviationHbarHalf,
    /// Width satisfies `Δx·Δp = hbar`, i.e. `Δx = √2·σx`.
    PaperHbar,
}

impl WidthConvention {
    pub const BOTH: [WidthConvention; 2] =
        [WidthConvention::StandardDeviationHbarHalf, WidthConvention::PaperHbar];

    /// `Δx / σx`.
    pub fn factor<S: Scalar>(self) -> S {
        match self {
            WidthConvention::StandardDeviationHbarHalf => S::one(),
            WidthConvention::PaperHbar => S::SQRT_2(),
        }
    }
}

/// A minimal free Gaussian packet at its waist.
///
/// The hand travels from the `+ℓ` end of the dial towards `−ℓ`, so its
/// velocity is negative in the clock frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct GaussianPacketState<S> {
    /// Mean position, cm.
    pub center: S,
    /// Signed group velocity, cm/s.
    pub velocity: S,
    /// Width at the waist in `convention` units, cm.
    pub sigma0: S,
    pub mass: S,
    /// Time label of the waist, s.
    pub t: S,
    pub convention: WidthConvention,
}

impl<S: Scalar> GaussianPacketState<S> {
    pub fn new(
        center: S,
        velocity: S,
        sigma0: S,
        mass: S,
        convention: WidthConvention,
    ) -> Result<Self, WavepacketError> {
        let state = GaussianPacketState { center, velocity, sigma0, mass, t: S::zero(), convention };
        state.validate()?;
        Ok(state)
    }

    fn validate(&self) -> Result<(), WavepacketError> {
        let ok = self.center.is_finite()
            && self.velocity.is_finite()
            && self.sigma0.is_finite()
            && self.sigma0 > S::zero()
            && self.mass.is_finite()
            && self.mass > S::zero()
            && self.t >= S::zero();
        if ok {
            Ok(())
        } else {
            Err(WavepacketError::InvalidState(format!(
                "sigma0 = {}, mass = {}, t = {} must be positive and finite",
                self.sigma0, self.mass, self.t
            )))
        }
    }

    /// Position standard deviation at the waist.
    pub fn position_std(&self) -> S {
        self.sigma0 / self.convention.factor()
    }

    /// Time over which the width grows by √2.
    pub fn spreading_time(&self, hbar: S) -> S {
        let s = self.position_std();
        S::lit(2.0) * self.mass * s * s / hbar
    }

    /// Width, in the state's convention, a time `t` after the waist.
    pub fn width_at(&self, t: S, hbar: S) -> S {
        let s = t / self.spreading_time(hbar);
        self.sigma0 * (S::one() + s * s).sqrt()
    }

    /// Position standard deviation a time `t` after the waist.
    pub fn std_at(&self, t: S, hbar: S) -> S {
        self.width_at(t, hbar) / self.convention.factor()
    }

    /// Mean wavenumber `m·v/hbar`.
    pub fn wavenumber(&self, hbar: S) -> S {
        self.mass * self.velocity / hbar
    }
}

/// A periodic grid over `[x_min, x_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct GridSpec<S> {
    pub x_min: S,
    pub x_max: S,
    pub points: usize,
}

impl<S: Scalar> GridSpec<S> {
    pub fn spacing(&self) -> S {
        (self.x_max - self.x_min) / S::lit(self.points as f64)
    }

    /// Smallest power-of-two grid holding the packet over `[0, t]` with
    /// room to spare and resolving its momentum content.
    pub fn auto(state: &GaussianPacketState<S>, t: S, hbar: S) -> Result<Self, WavepacketError> {
        let (need_min, need_max) = support(state, t, hbar, S::lit(SUPPORT_SIGMAS + 2.0));
        let spacing = max_spacing(state, hbar);
        let needed = ((need_max - need_min) / spacing).ceil().to_f64_lossy();
        if !needed.is_finite() || needed > MAX_GRID_POINTS as f64 {
            return Err(WavepacketError::GridTooLarge(needed.min(usize::MAX as f64) as usize));
        }
        let points = (needed as usize).max(64).next_power_of_two();
        Ok(GridSpec { x_min: need_min, x_max: need_max, points })
    }
}

/// Interval the packet occupies between the waist and `t`, padded by
/// `sigmas` standard deviations of its widest extent.
fn support<S: Scalar>(state: &GaussianPacketState<S>, t: S, hbar: S, sigmas: S) -> (S, S) {
    let end = state.center + state.velocity * t;
    let pad = sigmas * state.std_at(t, hbar).max(state.position_std());
    (state.center.min(end) - pad, state.center.max(end) + pad)
}

/// Coarsest spacing that still samples the packet and keeps its momentum
/// distribution (±20 momentum standard deviations) below the Nyquist limit.
fn max_spacing<S: Scalar>(state: &GaussianPacketState<S>, hbar: S) -> S {
    let sigma = state.position_std();
    let sigma_k = S::one() / (S::lit(2.0) * sigma);
    let k_reach = state.wavenumber(hbar).abs() + S::lit(20.0) * sigma_k;
    (sigma / S::lit(4.0)).min(S::PI() / k_reach)
}

/// Sampled wavefunction on a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState<S: Scalar> {
    pub spec: GridSpec<S>,
    pub amplitudes: Vec<Complex<S>>,
    pub mass: S,
    pub t: S,
}

impl<S: Scalar> GridState<S> {
    pub fn x(&self, j: usize) -> S {
        self.spec.x_min + S::lit(j as f64) * self.spec.spacing()
    }

    /// `(x, |ψ(x)|²)` pairs.
    pub fn density(&self) -> impl Iterator<Item = (S, S)> + '_ {
        self.amplitudes.iter().enumerate().map(|(j, a)| (self.x(j), a.norm_sqr()))
    }

    pub fn norm(&self) -> S {
        self.amplitudes.iter().fold(S::zero(), |acc, a| acc + a.norm_sqr()) * self.spec.spacing()
    }

    pub fn mean_position(&self) -> S {
        let h = self.spec.spacing();
        self.density().fold(S::zero(), |acc, (x, p)| acc + x * p) * h / self.norm()
    }

    pub fn std_dev(&self) -> S {
        let h = self.spec.spacing();
        let mean = self.mean_position();
        let var = self.density().fold(S::zero(), |acc, (x, p)| {
            let d = x - mean;
            acc + d * d * p
        }) * h
            / self.norm();
        var.sqrt()
    }
}

/// Samples the packet at its waist and evolves it freely for time `t`.
///
/// Free evolution is diagonal in momentum space, so a single forward FFT,
/// a phase multiplication and an inverse FFT give the exact evolution of
/// the sampled state; no time stepping is involved.
pub fn propagate_grid<S: Scalar>(
    initial: &GaussianPacketState<S>,
    spec: &GridSpec<S>,
    t: S,
    hbar: S,
) -> Result<GridState<S>, WavepacketError> {
    initial.validate()?;
    if !(t >= S::zero() && t.is_finite()) {
        return Err(WavepacketError::InvalidState(format!("propagation time {t} must be >= 0")));
    }
    if spec.points < 2 || !spec.points.is_power_of_two() {
        return Err(WavepacketError::NotPowerOfTwo(spec.points));
    }
    let (need_min, need_max) = support(initial, t, hbar, S::lit(SUPPORT_SIGMAS));
    if spec.x_min > need_min || spec.x_max < need_max {
        return Err(WavepacketError::DomainTooSmall {
            x_min: spec.x_min.to_f64_lossy(),
            x_max: spec.x_max.to_f64_lossy(),
            need_min: need_min.to_f64_lossy(),
            need_max: need_max.to_f64_lossy(),
        });
    }
    let h = spec.spacing();
    let limit = max_spacing(initial, hbar);
    if h > limit {
        let needed = ((spec.x_max - spec.x_min) / limit).ceil().to_f64_lossy();
        return Err(WavepacketError::ResolutionTooCoarse {
            suggested_points: (needed.min(usize::MAX as f64) as usize).next_power_of_two(),
        });
    }

    let n = spec.points;
    let sigma = initial.position_std();
    let k0 = initial.wavenumber(hbar);
    let four_var = S::lit(4.0) * sigma * sigma;
    let mut psi: Vec<Complex<S>> = (0..n)
        .map(|j| {
            let d = spec.x_min + S::lit(j as f64) * h - initial.center;
            let envelope = (-(d * d) / four_var).exp();
            Complex::from_polar(envelope, k0 * d)
        })
        .collect();
    let norm = psi.iter().fold(S::zero(), |acc, a| acc + a.norm_sqr()) * h;
    let scale = S::one() / norm.sqrt();
    psi.iter_mut().for_each(|a| *a = *a * scale);

    if t > S::zero() {
        let mut planner = FftPlanner::<S>::new();
        planner.plan_fft_forward(n).process(&mut psi);
        let length = spec.x_max - spec.x_min;
        let dk = S::lit(2.0) * S::PI() / length;
        let rate = hbar * t / (S::lit(2.0) * initial.mass);
        for (j, a) in psi.iter_mut().enumerate() {
            let index = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            let k = S::lit(index) * dk;
            *a = *a * Complex::from_polar(S::one(), -rate * k * k);
        }
        planner.plan_fft_inverse(n).process(&mut psi);
        let inv_n = S::one() / S::lit(n as f64);
        psi.iter_mut().for_each(|a| *a = *a * inv_n);
    }

    Ok(GridState { spec: *spec, amplitudes: psi, mass: initial.mass, t: initial.t + t })
}

/// Growth of the hand's packet over one run, in both width conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct SpreadingReport<S> {
    /// `hbar·T/(M·dx²)`; exactly 1 for a closed design.
    pub spreading_parameter: S,
    pub growth_hbar: S,
    pub growth_standard: S,
    /// Passage-time spread at the end of the run, `width(T)/u`.
    pub end_time_spread_hbar: S,
    pub end_time_spread_standard: S,
    /// End-of-run passage-time spread over `tau`.
    pub end_ratio_hbar: S,
    pub end_ratio_standard: S,
    /// Both growth factors lie in `(1, 2.5]`.
    pub satisfied: bool,
}

/// Checks that the hand's packet roughly keeps its width during the run.
pub fn verify_spreading_condition<S: Scalar>(
    design: &ClockDesign<S>,
    constants: &PhysicalConstants<S>,
) -> SpreadingReport<S> {
    let hbar = constants.hbar;
    let dx = design.packet_width;
    let growth = |convention: WidthConvention| {
        let state = GaussianPacketState {
            center: S::zero(),
            velocity: -design.hand_speed,
            sigma0: dx,
            mass: design.mass,
            t: S::zero(),
            convention,
        };
        state.width_at(design.running_time, hbar) / dx
    };
    let growth_hbar = growth(WidthConvention::PaperHbar);
    let growth_standard = growth(WidthConvention::StandardDeviationHbarHalf);
    let end_hbar = growth_hbar * dx / design.hand_speed;
    let end_standard = growth_standard * dx / design.hand_speed;
    let in_band = |g: S| g > S::one() && g <= S::lit(MAX_GROWTH);
    SpreadingReport {
        spreading_parameter: hbar * design.running_time / (design.mass * dx * dx),
        growth_hbar,
        growth_standard,
        end_time_spread_hbar: end_hbar,
        end_time_spread_standard: end_standard,
        end_ratio_hbar: end_hbar / design.accuracy,
        end_ratio_standard: end_standard / design.accuracy,
        satisfied: in_band(growth_hbar) && in_band(growth_standard),
    }
}

/// Monte Carlo settings for [`arrival_time_spread`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalOptions {
    pub samples: usize,
    pub seed: u64,
    /// Draw the hand's velocity with spread `du`; off gives position
    /// uncertainty only.
    pub velocity_spread: bool,
    /// Jitter the far dial end by `dx` as well.
    pub detector_jitter: bool,
    /// Worker pool width; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl ArrivalOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        ArrivalOptions { samples, seed, velocity_spread: true, detector_jitter: false, threads: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Scalar")]
pub struct ArrivalStats<S> {
    pub mean: S,
    pub spread: S,
    /// Samples that reached the far end.
    pub used: usize,
    pub discarded: usize,
}

/// Samples the hand's crossing time of the dial.
///
/// The hand starts at `x0 ~ N(+ℓ, dx)` with velocity `v ~ N(−u, du)` and is
/// timed at `x = −ℓ`, i.e. `t = (x0 + ℓ)/(−v)`. Samples with `v >= 0` never
/// arrive and are discarded. Batches carry their own RNG stream, so the
/// result does not depend on the number of workers.
pub fn arrival_time_spread<S: Scalar>(
    design: &ClockDesign<S>,
    options: &ArrivalOptions,
) -> Result<ArrivalStats<S>, WavepacketError> {
    if options.samples < MIN_SAMPLES {
        return Err(WavepacketError::TooFewSamples(options.samples));
    }
    let half = design.dial_length / S::lit(2.0);
    let dx = design.packet_width;
    let du = if options.velocity_spread { design.velocity_spread } else { S::zero() };
    let det_sigma = if options.detector_jitter { dx } else { S::zero() };
    let u = design.hand_speed;

    let nbatches = options.samples.div_ceil(MC_BATCH);
    let run_batch = |b: usize| -> (Vec<S>, usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        rng.set_stream(b as u64);
        let count = MC_BATCH.min(options.samples - b * MC_BATCH);
        let mut times = Vec::with_capacity(count);
        let mut discarded = 0;
        for _ in 0..count {
            let z: [f64; 3] =
                [rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)];
            let x0 = half + dx * S::lit(z[0]);
            let v = -u + du * S::lit(z[1]);
            let x_det = -half + det_sigma * S::lit(z[2]);
            if v < S::zero() {
                times.push((x0 - x_det) / -v);
            } else {
                discarded += 1;
            }
        }
        (times, discarded)
    };
    let batches: Vec<(Vec<S>, usize)> = match options.threads {
        None => (0..nbatches).into_par_iter().map(run_batch).collect(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| WavepacketError::InvalidState(e.to_string()))?
            .install(|| (0..nbatches).into_par_iter().map(run_batch).collect()),
    };

    let discarded: usize = batches.iter().map(|(_, d)| d).sum();
    if discarded as f64 > MAX_DISCARD_FRACTION * options.samples as f64 {
        return Err(WavepacketError::TooManyDiscarded { discarded, samples: options.samples });
    }
    let times = batches.iter().flat_map(|(t, _)| t.iter().copied());
    let used = options.samples - discarded;
    // two passes, centred on T for precision
    let shift = design.running_time;
    let mean_offset = times.clone().fold(S::zero(), |acc, t| acc + (t - shift)) / S::lit(used as f64);
    let var = times.fold(S::zero(), |acc, t| {
        let d = t - shift - mean_offset;
        acc + d * d
    }) / S::lit((used - 1) as f64);
    Ok(ArrivalStats { mean: shift + mean_offset, spread: var.sqrt(), used, discarded })
}
