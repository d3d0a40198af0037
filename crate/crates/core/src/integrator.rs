//! Numerical propagation of i dU/dt = H(t) U for two-level pulses.
//!
//! The Cayley–Klein column `(a, b)` is integrated directly; the second
//! column of the propagator follows from unitarity, so no work is spent on
//! it. Fixed-step fourth-order Runge–Kutta is the default and keeps results
//! bit-reproducible; an embedded 4(5) adaptive mode is available for
//! tabulated pulses with sharp features.

use num_complex::Complex64;
use thiserror::Error;

use crate::pulse::PulseShape;
use crate::sequence::PulseSequence;
use crate::su2::{SU2Propagator, Su2Error, UNITARITY_ACCEPT, UNITARITY_REJECT};

/// Fixed-step count used when no configuration is supplied.
pub const DEFAULT_STEPS: usize = 20_000;
/// Steps between unitarity repairs.
pub const DEFAULT_RENORMALIZE_EVERY: usize = 100;

const MIN_STEPS: usize = 10;
const TOLERANCE_MIN: f64 = 1e-14;
const TOLERANCE_MAX: f64 = 1e-6;

/// Errors from integrator configuration and propagation.
#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("step count {steps} is below the minimum of 10 per pulse")]
    StepCountTooSmall { steps: usize },
    #[error("tolerance {tolerance:e} lies outside [1e-14, 1e-6]")]
    ToleranceOutOfRange { tolerance: f64 },
    #[error("renormalization cadence must be at least one step")]
    ZeroRenormalizeCadence,
    #[error("Hamiltonian sample is not finite at t = {t}")]
    NonFiniteHamiltonian { t: f64 },
    #[error("unitarity drifted to {drift:.3e} by t = {t}; the step size is too large")]
    StepTooLarge { t: f64, drift: f64 },
    #[error("adaptive step size underflowed at t = {t}")]
    StepUnderflow { t: f64 },
    #[error(transparent)]
    Unitarity(#[from] Su2Error),
}

/// Step-size strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepMode {
    /// A fixed number of equal steps across the pulse.
    Fixed { steps: usize },
    /// Embedded 4(5) pair with per-step error control.
    Adaptive { tolerance: f64 },
}

/// Propagation settings: step policy plus the unitarity-repair cadence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    mode: StepMode,
    renormalize_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            mode: StepMode::Fixed { steps: DEFAULT_STEPS },
            renormalize_every: DEFAULT_RENORMALIZE_EVERY,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(steps: usize) -> Result<Self, IntegratorError> {
        if steps < MIN_STEPS {
            return Err(IntegratorError::StepCountTooSmall { steps });
        }
        Ok(IntegratorConfig { mode: StepMode::Fixed { steps }, ..Default::default() })
    }

    pub fn adaptive(tolerance: f64) -> Result<Self, IntegratorError> {
        if !(TOLERANCE_MIN..=TOLERANCE_MAX).contains(&tolerance) {
            return Err(IntegratorError::ToleranceOutOfRange { tolerance });
        }
        Ok(IntegratorConfig { mode: StepMode::Adaptive { tolerance }, ..Default::default() })
    }

    pub fn with_renormalize_every(mut self, steps: usize) -> Result<Self, IntegratorError> {
        if steps == 0 {
            return Err(IntegratorError::ZeroRenormalizeCadence);
        }
        self.renormalize_every = steps;
        Ok(self)
    }

    pub fn mode(&self) -> StepMode {
        self.mode
    }

    pub fn renormalize_every(&self) -> usize {
        self.renormalize_every
    }
}

#[derive(Clone, Copy)]
struct State {
    a: Complex64,
    b: Complex64,
}

impl State {
    fn start() -> State {
        State { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Applies the shared drift policy: accept tiny drifts, repair moderate
    /// ones, reject anything beyond [`UNITARITY_REJECT`].
    fn enforce_unitarity(&mut self, t: f64) -> Result<(), IntegratorError> {
        let drift = (self.norm_sqr() - 1.0).abs();
        if drift <= UNITARITY_ACCEPT {
            Ok(())
        } else if drift <= UNITARITY_REJECT {
            let scale = self.norm_sqr().sqrt().recip();
            self.a *= scale;
            self.b *= scale;
            Ok(())
        } else {
            Err(IntegratorError::StepTooLarge { t, drift })
        }
    }
}

/// Right-hand side of the Cayley–Klein column equations,
/// da/dt = (i/2)(Delta a - Omega b), db/dt = -(i/2)(Omega a + Delta b).
fn derivative(pulse: &PulseShape, t: f64, y: State) -> Result<State, IntegratorError> {
    let omega = pulse.omega(t);
    let delta = pulse.delta(t);
    if !(omega.is_finite() && delta.is_finite()) {
        return Err(IntegratorError::NonFiniteHamiltonian { t });
    }
    let half_i = Complex64::new(0.0, 0.5);
    Ok(State {
        a: half_i * (delta * y.a - omega * y.b),
        b: -half_i * (omega * y.a + delta * y.b),
    })
}

fn advance(y: State, scale: f64, k: State) -> State {
    State { a: y.a + scale * k.a, b: y.b + scale * k.b }
}

fn rk4_step(pulse: &PulseShape, t: f64, h: f64, y: State) -> Result<State, IntegratorError> {
    let k1 = derivative(pulse, t, y)?;
    let k2 = derivative(pulse, t + h / 2.0, advance(y, h / 2.0, k1))?;
    let k3 = derivative(pulse, t + h / 2.0, advance(y, h / 2.0, k2))?;
    let k4 = derivative(pulse, t + h, advance(y, h, k3))?;
    Ok(State {
        a: y.a + h / 6.0 * (k1.a + 2.0 * k2.a + 2.0 * k3.a + k4.a),
        b: y.b + h / 6.0 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b),
    })
}

/// Integrates the propagator of one pulse from its start to its end.
pub fn propagate(
    pulse: &PulseShape,
    cfg: &IntegratorConfig,
) -> Result<SU2Propagator, IntegratorError> {
    let mut y = match cfg.mode {
        StepMode::Fixed { steps } => propagate_fixed(pulse, steps, cfg.renormalize_every)?,
        StepMode::Adaptive { tolerance } => {
            propagate_adaptive(pulse, tolerance, cfg.renormalize_every)?
        }
    };
    y.enforce_unitarity(pulse.t_end())?;
    Ok(SU2Propagator::new(y.a, y.b)?)
}

fn propagate_fixed(
    pulse: &PulseShape,
    steps: usize,
    renormalize_every: usize,
) -> Result<State, IntegratorError> {
    if steps < MIN_STEPS {
        return Err(IntegratorError::StepCountTooSmall { steps });
    }
    let h = pulse.duration() / steps as f64;
    let mut y = State::start();
    for k in 0..steps {
        let t = pulse.t_start() + h * k as f64;
        y = rk4_step(pulse, t, h, y)?;
        if (k + 1) % renormalize_every == 0 {
            y.enforce_unitarity(t + h)?;
        }
    }
    Ok(y)
}

/// Fehlberg 4(5) coefficients.
const FEHLBERG_C: [f64; 6] = [0.0, 0.25, 0.375, 12.0 / 13.0, 1.0, 0.5];
const FEHLBERG_A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [0.25, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const FEHLBERG_B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const FEHLBERG_B4: [f64; 6] =
    [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -0.2, 0.0];

fn propagate_adaptive(
    pulse: &PulseShape,
    tolerance: f64,
    renormalize_every: usize,
) -> Result<State, IntegratorError> {
    let duration = pulse.duration();
    let t_end = pulse.t_end();
    let h_max = duration / MIN_STEPS as f64;
    let h_min = duration * 1e-14;

    let mut t = pulse.t_start();
    let mut h = duration / 100.0;
    let mut y = State::start();
    let mut accepted: usize = 0;

    while t < t_end {
        h = h.min(t_end - t).min(h_max);

        let mut stages: [State; 6] = [State::start(); 6];
        for i in 0..6 {
            let mut probe = y;
            for (j, stage) in stages.iter().enumerate().take(i) {
                probe = advance(probe, h * FEHLBERG_A[i][j], *stage);
            }
            stages[i] = derivative(pulse, t + FEHLBERG_C[i] * h, probe)?;
        }

        let mut fifth = y;
        let mut fourth = y;
        for i in 0..6 {
            fifth = advance(fifth, h * FEHLBERG_B5[i], stages[i]);
            fourth = advance(fourth, h * FEHLBERG_B4[i], stages[i]);
        }
        let err = ((fifth.a - fourth.a).norm_sqr() + (fifth.b - fourth.b).norm_sqr()).sqrt();

        if err <= tolerance {
            t += h;
            y = fifth;
            accepted += 1;
            if accepted % renormalize_every == 0 {
                y.enforce_unitarity(t)?;
            }
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * (tolerance / err).powf(0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < h_min && t < t_end {
            return Err(IntegratorError::StepUnderflow { t });
        }
    }
    Ok(y)
}

/// Integrates every pulse of a sequence, applies each stored coupling phase
/// as a gauge sandwich, and composes the results in time order.
pub fn propagate_sequence(
    seq: &PulseSequence,
    cfg: &IntegratorConfig,
) -> Result<SU2Propagator, IntegratorError> {
    let mut total = SU2Propagator::identity();
    for item in seq.items() {
        let step = propagate(&item.pulse, cfg)?.phase_sandwich(item.phase_jump);
        total = step.compose(&total)?;
    }
    Ok(total)
}
