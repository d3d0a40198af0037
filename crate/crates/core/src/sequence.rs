//! Split pulse pairs and recursively concatenated 2^n sequences.
//!
//! Each item carries the absolute coupling phase of its pulse, applied to
//! the pulse propagator as the gauge sandwich `Phi(-theta) U Phi(theta)`.
//! The stored sequence propagator is the time-ordered product of these
//! sandwiches; it therefore keeps a leading diagonal gate `Phi(-phi)` from
//! the outermost jump, which never affects transition probabilities.
//!
//! Concatenation doubles a sequence: the second half replays the first in
//! reverse, every pulse mirrored with its detuning sign-flipped, and all
//! coupling phases advanced by the new jump. On the propagator level the
//! second half contributes `sigma_z U^dagger sigma_z` of the whole first
//! half, the construction that cancels pulse errors pairwise.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{cos_sin_exact, AnalyticError, CaseLabel};
use crate::integrator::{propagate_sequence, IntegratorConfig, IntegratorError};
use crate::pulse::{Kind, PulseError, PulseShape, PulseTransform};
use crate::su2::{BlochVector, SU2Propagator, Su2Error};

/// Errors from sequence construction, evaluation, and serialization.
#[derive(Debug, Error)]
pub enum SequenceError {
    #[error("a sequence must contain at least one pulse")]
    Empty,
    #[error("concatenation needs a mirror-and-flip symmetric base: a bare pulse, a time-reflected bichromatic pair, or a previous concatenation")]
    NotMirrorSymmetric,
    #[error("analytic evaluation needs closed-form pulses; a {found} pulse has none")]
    AnalyticUnsupported { found: &'static str },
    #[error("sequence document is malformed: {reason}")]
    BadDocument { reason: String },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Integration(#[from] IntegratorError),
    #[error(transparent)]
    Unitarity(#[from] Su2Error),
    #[error("json conversion failed: {0}")]
    Json(#[from] serde_json::Error),
}

/// One pulse of a sequence together with its absolute coupling phase.
#[derive(Debug, Clone)]
pub struct SequenceItem {
    pub pulse: PulseShape,
    /// Coupling phase in radians; enters the propagator as
    /// `Phi(-phase_jump) U Phi(phase_jump)`.
    pub phase_jump: f64,
}

/// An ordered, time-contiguous list of phased pulses.
#[derive(Debug, Clone)]
pub struct PulseSequence {
    items: Vec<SequenceItem>,
    depth: u32,
    case: Option<CaseLabel>,
    mirror_symmetric: bool,
}

/// Which route produced an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMethod {
    /// Closed-form propagators composed algebraically.
    Analytic,
    /// Runge–Kutta integration of every pulse.
    Numerical,
}

/// Result of evaluating a sequence: the total propagator plus the derived
/// observables for a system started in the ground state.
#[derive(Debug, Clone, Copy)]
pub struct SequenceEvaluation {
    pub propagator: SU2Propagator,
    pub probability: f64,
    pub bloch: BlochVector,
    pub method: EvalMethod,
}

impl PulseSequence {
    /// Wraps a bare pulse (depth 0, coupling phase zero).
    pub fn single(pulse: PulseShape) -> PulseSequence {
        PulseSequence {
            items: vec![SequenceItem { pulse, phase_jump: 0.0 }],
            depth: 0,
            case: None,
            mirror_symmetric: true,
        }
    }

    /// Builds the two-pulse arrangement of the given case: the derived
    /// partner follows the first pulse with its coupling phase jumped by
    /// `phi`, so the pair propagator is `Phi(-phi) U2 Phi(phi) U1`.
    pub fn build_pair(first: PulseShape, case: CaseLabel, phi: f64) -> PulseSequence {
        let second = first.derived(case.transform());
        PulseSequence {
            items: vec![
                SequenceItem { pulse: first, phase_jump: 0.0 },
                SequenceItem { pulse: second, phase_jump: phi },
            ],
            depth: 1,
            case: Some(case),
            mirror_symmetric: case == CaseLabel::TimeReflectedBichromatic,
        }
    }

    /// Doubles the sequence: appends the mirrored, detuning-flipped replay
    /// of the items in reverse order, with every coupling phase advanced by
    /// `phi`. Requires the mirror-and-flip symmetry that makes the second
    /// half's propagator equal `sigma_z U^dagger sigma_z` of the first.
    pub fn concatenate(&self, phi: f64) -> Result<PulseSequence, SequenceError> {
        if !self.mirror_symmetric {
            return Err(SequenceError::NotMirrorSymmetric);
        }
        let mut items = self.items.clone();
        let mut cursor = self.t_end();
        for item in self.items.iter().rev() {
            let pulse = item.pulse.derived_at(PulseTransform::MirrorFlipDelta, cursor);
            cursor = pulse.t_end();
            items.push(SequenceItem { pulse, phase_jump: item.phase_jump + phi });
        }
        Ok(PulseSequence {
            items,
            depth: self.depth + 1,
            case: self.case,
            mirror_symmetric: true,
        })
    }

    /// Repeated concatenation to `2^depth` pulses: inner splits are fixed
    /// quarter turns, the outermost uses `phi`.
    pub fn concatenated(
        first: PulseShape,
        depth: u32,
        phi: f64,
    ) -> Result<PulseSequence, SequenceError> {
        let mut seq = PulseSequence::single(first);
        for level in 1..=depth {
            let jump = if level == depth { phi } else { std::f64::consts::FRAC_PI_2 };
            seq = seq.concatenate(jump)?;
        }
        Ok(seq)
    }

    pub fn items(&self) -> &[SequenceItem] {
        &self.items
    }

    pub fn pulse_count(&self) -> usize {
        self.items.len()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn case(&self) -> Option<CaseLabel> {
        self.case
    }

    pub fn is_mirror_symmetric(&self) -> bool {
        self.mirror_symmetric
    }

    pub fn t_start(&self) -> f64 {
        self.items[0].pulse.t_start()
    }

    pub fn t_end(&self) -> f64 {
        self.items[self.items.len() - 1].pulse.t_end()
    }

    /// Checks the defining symmetry on sampled envelopes: item `2m-1-j`
    /// must replay item `j` mirrored with flipped detuning, and all phase
    /// offsets between the paired items must agree.
    pub fn second_half_mirrors_first(&self, samples: usize) -> bool {
        let n = self.items.len();
        if n < 2 || n % 2 != 0 || samples < 2 {
            return false;
        }
        let half = n / 2;
        let jump = self.items[n - 1].phase_jump - self.items[0].phase_jump;
        for j in 0..half {
            let left = &self.items[j];
            let right = &self.items[n - 1 - j];
            if (right.phase_jump - left.phase_jump - jump).abs() > 1e-12 {
                return false;
            }
            let duration = left.pulse.duration();
            if (right.pulse.duration() - duration).abs() > 1e-12 {
                return false;
            }
            for k in 0..samples {
                let s = duration * k as f64 / (samples - 1) as f64;
                let mirrored_omega = left.pulse.omega(left.pulse.t_end() - s);
                let mirrored_delta = -left.pulse.delta(left.pulse.t_end() - s);
                if (right.pulse.omega(right.pulse.t_start() + s) - mirrored_omega).abs() > 1e-9 {
                    return false;
                }
                if (right.pulse.delta(right.pulse.t_start() + s) - mirrored_delta).abs() > 1e-9 {
                    return false;
                }
            }
        }
        true
    }

    /// Evaluates the sequence propagator and the ground-state observables.
    pub fn evaluate(
        &self,
        method: EvalMethod,
        cfg: Option<&IntegratorConfig>,
    ) -> Result<SequenceEvaluation, SequenceError> {
        if self.items.is_empty() {
            return Err(SequenceError::Empty);
        }
        let propagator = match method {
            EvalMethod::Numerical => {
                let cfg = cfg.copied().unwrap_or_default();
                propagate_sequence(self, &cfg)?
            }
            EvalMethod::Analytic => {
                let mut total = SU2Propagator::identity();
                for item in &self.items {
                    let step =
                        exact_pulse_propagator(&item.pulse)?.phase_sandwich(item.phase_jump);
                    total = step.compose(&total)?;
                }
                total
            }
        };
        Ok(SequenceEvaluation {
            propagator,
            probability: propagator.transition_probability(),
            bloch: propagator.bloch(),
            method,
        })
    }

    /// Serializes the sequence to its JSON document form.
    pub fn to_json(&self) -> Result<String, SequenceError> {
        Ok(serde_json::to_string_pretty(&self.to_doc())?)
    }

    /// Rebuilds a sequence from its JSON document form; numeric fields
    /// round-trip exactly.
    pub fn from_json(text: &str) -> Result<PulseSequence, SequenceError> {
        let doc: SequenceDoc = serde_json::from_str(text)?;
        doc.into_sequence()
    }

    fn to_doc(&self) -> SequenceDoc {
        SequenceDoc {
            depth: self.depth,
            case: self.case,
            mirror_symmetric: self.mirror_symmetric,
            items: self
                .items
                .iter()
                .map(|item| ItemDoc {
                    pulse: pulse_to_doc(&item.pulse),
                    phase_jump: item.phase_jump,
                })
                .collect(),
        }
    }
}

/// Closed-form propagator of a single pulse, resolving derivation chains
/// algebraically. Tabulated pulses have none and are rejected.
pub fn exact_pulse_propagator(pulse: &PulseShape) -> Result<SU2Propagator, SequenceError> {
    match pulse.kind() {
        Kind::CosSin { lambda, period } => Ok(cos_sin_exact(lambda * period)?),
        Kind::Derived { base, transform } => {
            Ok(transform.propagator_map(&exact_pulse_propagator(base)?))
        }
        Kind::Tabulated(_) => Err(SequenceError::AnalyticUnsupported { found: "tabulated" }),
    }
}

#[derive(Serialize, Deserialize)]
struct SequenceDoc {
    depth: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    case: Option<CaseLabel>,
    mirror_symmetric: bool,
    items: Vec<ItemDoc>,
}

#[derive(Serialize, Deserialize)]
struct ItemDoc {
    pulse: PulseDoc,
    phase_jump: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum PulseDoc {
    CosSin { lambda: f64, period: f64, interval: [f64; 2] },
    Tabulated { times: Vec<f64>, omega: Vec<f64>, delta: Vec<f64> },
    Derived { base: Box<PulseDoc>, transform: PulseTransform, interval: [f64; 2] },
}

fn pulse_to_doc(pulse: &PulseShape) -> PulseDoc {
    let interval = [pulse.t_start(), pulse.t_end()];
    match pulse.kind() {
        Kind::CosSin { lambda, period } => {
            PulseDoc::CosSin { lambda: *lambda, period: *period, interval }
        }
        Kind::Tabulated(data) => {
            let (times, omega, delta) = data.columns();
            PulseDoc::Tabulated {
                times: times.to_vec(),
                omega: omega.to_vec(),
                delta: delta.to_vec(),
            }
        }
        Kind::Derived { base, transform } => PulseDoc::Derived {
            base: Box::new(pulse_to_doc(base)),
            transform: *transform,
            interval,
        },
    }
}

fn check_interval(interval: [f64; 2]) -> Result<(), SequenceError> {
    if interval.iter().all(|v| v.is_finite()) && interval[0] < interval[1] {
        Ok(())
    } else {
        Err(SequenceError::BadDocument {
            reason: format!("interval [{}, {}] is not an increasing finite range", interval[0], interval[1]),
        })
    }
}

fn doc_to_pulse(doc: PulseDoc) -> Result<PulseShape, SequenceError> {
    match doc {
        PulseDoc::CosSin { lambda, period, interval } => {
            check_interval(interval)?;
            Ok(PulseShape::cos_sin(lambda, period)?.with_interval(interval[0], interval[1]))
        }
        PulseDoc::Tabulated { times, omega, delta } => {
            Ok(PulseShape::tabulated(times, omega, delta)?)
        }
        PulseDoc::Derived { base, transform, interval } => {
            check_interval(interval)?;
            let base = doc_to_pulse(*base)?;
            Ok(base
                .derived_at(transform, interval[0])
                .with_interval(interval[0], interval[1]))
        }
    }
}

impl SequenceDoc {
    fn into_sequence(self) -> Result<PulseSequence, SequenceError> {
        if self.items.is_empty() {
            return Err(SequenceError::Empty);
        }
        let mut items = Vec::with_capacity(self.items.len());
        for item in self.items {
            items.push(SequenceItem {
                pulse: doc_to_pulse(item.pulse)?,
                phase_jump: item.phase_jump,
            });
        }
        Ok(PulseSequence {
            items,
            depth: self.depth,
            case: self.case,
            mirror_symmetric: self.mirror_symmetric,
        })
    }
}
