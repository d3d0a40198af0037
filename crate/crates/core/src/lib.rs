//! Two-level quantum dynamics under sequences of chirped adiabatic pulses
//! split by phase jumps.
//!
//! The crate models a qubit driven by a Hamiltonian (ħ = 1)
//!
//! ```text
//!          1 [ -Δ(t)   Ω(t) ]
//! H(t)  =  - [              ]
//!          2 [  Ω(t)   Δ(t) ]
//! ```
//!
//! and provides four cooperating layers:
//!
//! * [`su2`] — exact propagator algebra in Cayley–Klein form, phase-jump
//!   sandwiches, sign-flip conjugations and time-reversal relations;
//! * [`pulse`] — pulse shapes (the circular-chirp Cos-Sin family, tabulated
//!   samples, derived mirror/flip arrangements) and adiabaticity diagnostics;
//! * [`integrator`] — a fixed-step RK4 (optionally adaptive RKF45) propagator
//!   integrator used as the numerical reference throughout;
//! * [`analytic`] — closed-form transition probabilities for single pulses,
//!   phase-split pulse pairs, and 2^n concatenated sequences, plus the exact
//!   Cos-Sin solution;
//! * [`sequence`] — builders that assemble pulse pairs and recursively
//!   concatenated sequences, evaluate them analytically or numerically, and
//!   serialize them to JSON.
//!
//! [`validate`] bundles the cross-module consistency checks behind a seeded,
//! machine-readable report.

pub mod analytic;
pub mod integrator;
pub mod pulse;
pub mod sequence;
mod spline;
pub mod su2;
pub mod validate;

pub use analytic::{AdiabaticBoundary, CaseLabel};
pub use integrator::{propagate, propagate_sequence, IntegratorConfig, StepMode};
pub use pulse::{AdiabaticityReport, PulseShape, PulseTransform};
pub use sequence::{EvalMethod, PulseSequence, SequenceEvaluation, SequenceItem};
pub use su2::{BlochVector, PauliAxis, PhaseGate, PolarForm, SU2Propagator, TimeReversal};
pub use validate::{run_validation, CheckResult, ValidationError, ValidationReport};
