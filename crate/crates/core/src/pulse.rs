//! Pulse shapes Omega(t), Delta(t) and their symmetry derivations.
//!
//! A pulse is evaluated through its offset `x = t - t_start`, so translating
//! a shape along the time axis never changes its values. Second pulses of a
//! split pair are built with [`PulseShape::derived`], which places the
//! transformed copy immediately after the base pulse.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::spline::CubicSpline;
use crate::su2::{PauliAxis, SU2Propagator, TimeReversal};

/// Grid size used by [`PulseShape::adiabaticity`] when no explicit sample
/// count is given.
pub const DEFAULT_DIAGNOSTIC_SAMPLES: usize = 10_000;

const TABULATED_DIFF_STEPS: f64 = 1e4;

/// Errors from pulse construction, loading, and diagnostics.
#[derive(Debug, Error)]
pub enum PulseError {
    #[error("pulse amplitude must be positive and finite, got {value}")]
    InvalidAmplitude { value: f64 },
    #[error("pulse duration must be positive and finite, got {value}")]
    InvalidDuration { value: f64 },
    #[error("a tabulated pulse needs at least two rows, found {rows}")]
    TooFewSamples { rows: usize },
    #[error("time, coupling, and detuning columns have different lengths")]
    ColumnMismatch,
    #[error("row {row} holds a non-finite value")]
    NonFiniteSample { row: usize },
    #[error("times must be strictly increasing, violated at row {row}")]
    NonMonotonicTime { row: usize },
    #[error("expected header `t,omega` or `t,omega,delta`, found `{found}`")]
    BadHeader { found: String },
    #[error("row {row}: `{text}` is not a number")]
    InvalidNumber { row: usize, text: String },
    #[error("csv reading failed: {0}")]
    Csv(#[from] csv::Error),
    #[error("adiabaticity scan needs at least two samples, got {samples}")]
    TooFewGridSamples { samples: usize },
}

/// How a derived pulse relates to its base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseTransform {
    /// Identical shapes, shifted in time.
    Same,
    /// Same coupling, detuning sign-flipped.
    FlipDelta,
    /// Both envelopes played backwards.
    Mirror,
    /// Played backwards with the detuning sign-flipped.
    MirrorFlipDelta,
}

impl PulseTransform {
    /// Propagator of the transformed pulse, given the base propagator.
    /// Valid whenever the base coupling is real on its interval.
    pub fn propagator_map(&self, base: &SU2Propagator) -> SU2Propagator {
        match self {
            PulseTransform::Same => *base,
            PulseTransform::FlipDelta => base.sigma_conjugate(PauliAxis::X),
            PulseTransform::Mirror => base.time_reversed(TimeReversal::SymSym),
            PulseTransform::MirrorFlipDelta => base.time_reversed(TimeReversal::SymAnti),
        }
    }

    pub fn reverses_time(&self) -> bool {
        matches!(self, PulseTransform::Mirror | PulseTransform::MirrorFlipDelta)
    }
}

impl fmt::Display for PulseTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            PulseTransform::Same => "same",
            PulseTransform::FlipDelta => "flip-delta",
            PulseTransform::Mirror => "mirror",
            PulseTransform::MirrorFlipDelta => "mirror-flip-delta",
        };
        f.write_str(name)
    }
}

#[derive(Debug)]
pub(crate) struct TabulatedData {
    duration: f64,
    omega: CubicSpline,
    delta: CubicSpline,
    times: Vec<f64>,
    omega_samples: Vec<f64>,
    delta_samples: Vec<f64>,
}

impl TabulatedData {
    pub(crate) fn columns(&self) -> (&[f64], &[f64], &[f64]) {
        (&self.times, &self.omega_samples, &self.delta_samples)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Kind {
    CosSin { lambda: f64, period: f64 },
    Tabulated(Arc<TabulatedData>),
    Derived { base: Arc<PulseShape>, transform: PulseTransform },
}

/// A coupling/detuning envelope pair on the interval `[t_start, t_end]`.
#[derive(Debug, Clone)]
pub struct PulseShape {
    kind: Kind,
    t_start: f64,
    t_end: f64,
}

/// Adiabaticity diagnostics for one pulse.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct AdiabaticityReport {
    /// Minimum over the scan grid of `Lambda^3 / |Delta dOmega - Omega dDelta|`,
    /// the ratio of the level splitting to the mixing-angle speed. Reported
    /// as `+inf` when the mixing angle never moves and as 0 when the
    /// splitting closes somewhere.
    pub min_ratio: f64,
    /// Accumulated splitting phase `integral of Lambda dt` over the pulse.
    pub eta: f64,
    pub lambda_initial: f64,
    pub lambda_final: f64,
    /// Set when `Omega = Delta = 0` at some grid point, where the mixing
    /// angle is undefined.
    pub degenerate: bool,
}

impl PulseShape {
    /// The rotating-amplitude pulse `Omega = lambda cos(t/T)`,
    /// `Delta = -lambda sin(t/T)` on `t in [-pi T/2, 0]`, the family with an
    /// exact closed-form propagator.
    pub fn cos_sin(lambda: f64, period: f64) -> Result<PulseShape, PulseError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(PulseError::InvalidAmplitude { value: lambda });
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(PulseError::InvalidDuration { value: period });
        }
        let half_span = std::f64::consts::FRAC_PI_2 * period;
        Ok(PulseShape {
            kind: Kind::CosSin { lambda, period },
            t_start: -half_span,
            t_end: 0.0,
        })
    }

    /// A sampled pulse interpolated by clamped cubic splines.
    pub fn tabulated(
        times: Vec<f64>,
        omegas: Vec<f64>,
        deltas: Vec<f64>,
    ) -> Result<PulseShape, PulseError> {
        if times.len() != omegas.len() || times.len() != deltas.len() {
            return Err(PulseError::ColumnMismatch);
        }
        if times.len() < 2 {
            return Err(PulseError::TooFewSamples { rows: times.len() });
        }
        for (row, ((&t, &o), &d)) in times.iter().zip(&omegas).zip(&deltas).enumerate() {
            if !(t.is_finite() && o.is_finite() && d.is_finite()) {
                return Err(PulseError::NonFiniteSample { row });
            }
            if row > 0 && t <= times[row - 1] {
                return Err(PulseError::NonMonotonicTime { row });
            }
        }
        let t_start = times[0];
        let t_end = times[times.len() - 1];
        let local: Vec<f64> = times.iter().map(|t| t - t_start).collect();
        let data = TabulatedData {
            duration: t_end - t_start,
            omega: CubicSpline::new(local.clone(), omegas.clone()),
            delta: CubicSpline::new(local, deltas.clone()),
            times,
            omega_samples: omegas,
            delta_samples: deltas,
        };
        Ok(PulseShape { kind: Kind::Tabulated(Arc::new(data)), t_start, t_end })
    }

    /// Loads a tabulated pulse from CSV with header `t,omega` or
    /// `t,omega,delta`; a missing detuning column means `Delta = 0`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<PulseShape, PulseError> {
        let mut csv_reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .has_headers(true)
            .from_reader(reader);

        let header = csv_reader.headers()?.clone();
        let names: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
        let with_delta = match names.as_slice() {
            [t, o] if t == "t" && o == "omega" => false,
            [t, o, d] if t == "t" && o == "omega" && d == "delta" => true,
            _ => {
                return Err(PulseError::BadHeader { found: header.iter().collect::<Vec<_>>().join(",") })
            }
        };

        let mut times = Vec::new();
        let mut omegas = Vec::new();
        let mut deltas = Vec::new();
        for (idx, record) in csv_reader.records().enumerate() {
            let record = record?;
            let row = idx + 1;
            let field = |col: usize| -> Result<f64, PulseError> {
                let text = record.get(col).unwrap_or("");
                text.parse::<f64>()
                    .map_err(|_| PulseError::InvalidNumber { row, text: text.to_string() })
            };
            times.push(field(0)?);
            omegas.push(field(1)?);
            deltas.push(if with_delta { field(2)? } else { 0.0 });
        }
        PulseShape::tabulated(times, omegas, deltas)
    }

    /// Loads a tabulated pulse from a CSV file.
    pub fn from_csv_path<P: AsRef<Path>>(path: P) -> Result<PulseShape, PulseError> {
        let file = std::fs::File::open(path.as_ref()).map_err(csv::Error::from)?;
        PulseShape::from_csv_reader(file)
    }

    /// Second pulse of a split pair: the transformed copy placed on
    /// `[t_end, t_end + duration]`.
    pub fn derived(&self, transform: PulseTransform) -> PulseShape {
        self.derived_at(transform, self.t_end)
    }

    pub(crate) fn derived_at(&self, transform: PulseTransform, new_start: f64) -> PulseShape {
        let duration = self.duration();
        PulseShape {
            kind: Kind::Derived { base: Arc::new(self.clone()), transform },
            t_start: new_start,
            t_end: new_start + duration,
        }
    }

    pub(crate) fn kind(&self) -> &Kind {
        &self.kind
    }

    pub(crate) fn with_interval(mut self, t_start: f64, t_end: f64) -> PulseShape {
        self.t_start = t_start;
        self.t_end = t_end;
        self
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    /// Coupling envelope at absolute time `t`.
    pub fn omega(&self, t: f64) -> f64 {
        self.omega_local(t - self.t_start)
    }

    /// Detuning envelope at absolute time `t`.
    pub fn delta(&self, t: f64) -> f64 {
        self.delta_local(t - self.t_start)
    }

    /// Level splitting `sqrt(Omega^2 + Delta^2)` at absolute time `t`.
    pub fn lambda(&self, t: f64) -> f64 {
        self.omega(t).hypot(self.delta(t))
    }

    /// Time derivative of the coupling at absolute time `t`.
    pub fn d_omega(&self, t: f64) -> f64 {
        self.d_omega_local(t - self.t_start)
    }

    /// Time derivative of the detuning at absolute time `t`.
    pub fn d_delta(&self, t: f64) -> f64 {
        self.d_delta_local(t - self.t_start)
    }

    fn omega_local(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::CosSin { lambda, period } => {
                let tau = x - std::f64::consts::FRAC_PI_2 * period;
                lambda * (tau / period).cos()
            }
            Kind::Tabulated(data) => data.omega.eval(x),
            Kind::Derived { base, transform } => base.omega_local(map_offset(base, transform, x)),
        }
    }

    fn delta_local(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::CosSin { lambda, period } => {
                let tau = x - std::f64::consts::FRAC_PI_2 * period;
                -lambda * (tau / period).sin()
            }
            Kind::Tabulated(data) => data.delta.eval(x),
            Kind::Derived { base, transform } => {
                let value = base.delta_local(map_offset(base, transform, x));
                match transform {
                    PulseTransform::FlipDelta | PulseTransform::MirrorFlipDelta => -value,
                    _ => value,
                }
            }
        }
    }

    fn d_omega_local(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::CosSin { lambda, period } => {
                let tau = x - std::f64::consts::FRAC_PI_2 * period;
                -lambda / period * (tau / period).sin()
            }
            Kind::Tabulated(data) => {
                let h = data.duration / TABULATED_DIFF_STEPS;
                (data.omega.eval(x + h) - data.omega.eval(x - h)) / (2.0 * h)
            }
            Kind::Derived { base, transform } => {
                let slope = base.d_omega_local(map_offset(base, transform, x));
                if transform.reverses_time() {
                    -slope
                } else {
                    slope
                }
            }
        }
    }

    fn d_delta_local(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::CosSin { lambda, period } => {
                let tau = x - std::f64::consts::FRAC_PI_2 * period;
                -lambda / period * (tau / period).cos()
            }
            Kind::Tabulated(data) => {
                let h = data.duration / TABULATED_DIFF_STEPS;
                (data.delta.eval(x + h) - data.delta.eval(x - h)) / (2.0 * h)
            }
            Kind::Derived { base, transform } => {
                let mut slope = base.d_delta_local(map_offset(base, transform, x));
                if transform.reverses_time() {
                    slope = -slope;
                }
                match transform {
                    PulseTransform::FlipDelta | PulseTransform::MirrorFlipDelta => -slope,
                    _ => slope,
                }
            }
        }
    }

    /// Scans the pulse on a uniform grid and reports the adiabaticity ratio,
    /// the accumulated splitting phase, and the boundary splittings.
    pub fn adiabaticity(&self, samples: usize) -> Result<AdiabaticityReport, PulseError> {
        if samples < 2 {
            return Err(PulseError::TooFewGridSamples { samples });
        }
        let duration = self.duration();
        let h = duration / (samples - 1) as f64;

        let mut lambdas = Vec::with_capacity(samples);
        let mut min_ratio = f64::INFINITY;
        let mut degenerate = false;

        for i in 0..samples {
            let t = self.t_start + h * i as f64;
            let omega = self.omega(t);
            let delta = self.delta(t);
            let lambda = omega.hypot(delta);
            lambdas.push(lambda);

            let ratio = if lambda == 0.0 {
                degenerate = true;
                0.0
            } else {
                let angle_speed = (delta * self.d_omega(t) - omega * self.d_delta(t)).abs();
                if angle_speed == 0.0 {
                    f64::INFINITY
                } else {
                    lambda.powi(3) / angle_speed
                }
            };
            min_ratio = min_ratio.min(ratio);
        }

        Ok(AdiabaticityReport {
            min_ratio,
            eta: integrate_uniform(&lambdas, h),
            lambda_initial: lambdas[0],
            lambda_final: lambdas[samples - 1],
            degenerate,
        })
    }
}

fn map_offset(base: &PulseShape, transform: &PulseTransform, x: f64) -> f64 {
    if transform.reverses_time() {
        base.duration() - x
    } else {
        x
    }
}

/// Composite Simpson quadrature on a uniform grid, closing an odd interval
/// count with a 3/8 panel at the end.
fn integrate_uniform(values: &[f64], h: f64) -> f64 {
    let intervals = values.len() - 1;
    if intervals == 0 {
        return 0.0;
    }
    if intervals == 1 {
        return h * (values[0] + values[1]) / 2.0;
    }
    let simpson_intervals = if intervals % 2 == 0 { intervals } else { intervals - 3 };

    let mut total = 0.0;
    if simpson_intervals > 0 {
        let mut sum = values[0] + values[simpson_intervals];
        for (i, &v) in values.iter().enumerate().take(simpson_intervals).skip(1) {
            sum += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        total += h / 3.0 * sum;
    }
    if simpson_intervals < intervals {
        let tail = &values[simpson_intervals..];
        total += 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]);
    }
    total
}
