//! Closed-form results for chirped adiabatic pulses and their split pairs.
//!
//! Conventions used throughout: the coupling phase of the second pulse of a
//! pair is advanced by the jump `phi`, so its propagator is sandwiched as
//! `Phi(-phi) U2 Phi(phi)` and the pair propagator reads
//! `Phi(-phi) U2 Phi(phi) U1`. Every interference formula below has been
//! checked against that explicit matrix composition; see the unit and
//! property tests for the brute-force comparison.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pulse::{PulseError, PulseShape, PulseTransform};
use crate::su2::{BlochVector, SU2Propagator, Su2Error};

/// Probabilities may stray outside `[0, 1]` by at most this much before the
/// excursion is treated as misuse instead of float noise.
pub const PROBABILITY_SLACK: f64 = 1e-12;

/// Errors from the closed-form layer.
#[derive(Debug, Error)]
pub enum AnalyticError {
    #[error("the level splitting vanishes at the {side} boundary")]
    ZeroSplitting { side: &'static str },
    #[error("probability {value} lies outside [0, 1]")]
    InvalidProbability { value: f64 },
    #[error("formula produced {value}, outside [0, 1] by more than the float-noise allowance")]
    ProbabilityExcursion { value: f64 },
    #[error("pulse-error parameter {value} must satisfy |value| < 1/2")]
    InvalidEpsilon { value: f64 },
    #[error("pulse area {value} must be finite and non-negative")]
    InvalidArea { value: f64 },
    #[error("sequence length {n} is not a power of two")]
    NotPowerOfTwo { n: u32 },
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Unitarity(#[from] Su2Error),
}

/// The four two-pulse arrangements: which transformation of the first pulse
/// plays second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    /// Second pulse identical to the first, shifted in time.
    Identical,
    /// Second pulse with the detuning sign-flipped (opposite chirp).
    Bichromatic,
    /// Second pulse is the time-mirrored first pulse.
    TimeReflected,
    /// Time-mirrored with the detuning sign-flipped; the arrangement whose
    /// pair probability depends on the phase jump alone.
    TimeReflectedBichromatic,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 4] = [
        CaseLabel::Identical,
        CaseLabel::Bichromatic,
        CaseLabel::TimeReflected,
        CaseLabel::TimeReflectedBichromatic,
    ];

    /// Shape transformation producing the second pulse.
    pub fn transform(&self) -> PulseTransform {
        match self {
            CaseLabel::Identical => PulseTransform::Same,
            CaseLabel::Bichromatic => PulseTransform::FlipDelta,
            CaseLabel::TimeReflected => PulseTransform::Mirror,
            CaseLabel::TimeReflectedBichromatic => PulseTransform::MirrorFlipDelta,
        }
    }

    /// Propagator of the second pulse, given the first pulse's propagator.
    pub fn second_propagator(&self, first: &SU2Propagator) -> SU2Propagator {
        self.transform().propagator_map(first)
    }
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CaseLabel::Identical => "identical",
            CaseLabel::Bichromatic => "bichromatic",
            CaseLabel::TimeReflected => "time-reflected",
            CaseLabel::TimeReflectedBichromatic => "time-reflected-bichromatic",
        };
        f.write_str(name)
    }
}

/// Sign convention for how the coupling-phase jump enters the second pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpConvention {
    /// Second coupling phase advanced by `phi` (the convention of this
    /// crate: sandwich `Phi(-phi) U2 Phi(phi)`).
    SecondAdvanced,
    /// Second coupling phase retarded by `phi`; equivalent to
    /// `SecondAdvanced` with `phi` negated. Some published tabulations of
    /// the sine-form pair probabilities follow this convention.
    SecondRetarded,
}

/// Boundary data entering the adiabatic solution: coupling and detuning at
/// both ends of the pulse plus the accumulated splitting phase.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdiabaticBoundary {
    pub omega_i: f64,
    pub delta_i: f64,
    pub omega_f: f64,
    pub delta_f: f64,
    pub eta: f64,
}

impl AdiabaticBoundary {
    pub fn new(
        omega_i: f64,
        delta_i: f64,
        omega_f: f64,
        delta_f: f64,
        eta: f64,
    ) -> Result<Self, AnalyticError> {
        let boundary = AdiabaticBoundary { omega_i, delta_i, omega_f, delta_f, eta };
        if boundary.lambda_i() == 0.0 {
            return Err(AnalyticError::ZeroSplitting { side: "initial" });
        }
        if boundary.lambda_f() == 0.0 {
            return Err(AnalyticError::ZeroSplitting { side: "final" });
        }
        Ok(boundary)
    }

    /// Reads the boundary values off a pulse and accumulates eta by
    /// quadrature on a grid of `samples` points.
    pub fn from_pulse(pulse: &PulseShape, samples: usize) -> Result<Self, AnalyticError> {
        let report = pulse.adiabaticity(samples)?;
        AdiabaticBoundary::new(
            pulse.omega(pulse.t_start()),
            pulse.delta(pulse.t_start()),
            pulse.omega(pulse.t_end()),
            pulse.delta(pulse.t_end()),
            report.eta,
        )
    }

    pub fn lambda_i(&self) -> f64 {
        self.omega_i.hypot(self.delta_i)
    }

    pub fn lambda_f(&self) -> f64 {
        self.omega_f.hypot(self.delta_f)
    }
}

/// The adiabatic evolution as an explicit rotation of the Bloch ball.
///
/// The Bloch torque vector of the Hamiltonian is `(-Omega, 0, -Delta)`; the
/// component of the state along it is frozen while the perpendicular
/// components precess by `eta` between the initial and final frames.
pub fn rotation_matrix(boundary: &AdiabaticBoundary) -> [[f64; 3]; 3] {
    let li = boundary.lambda_i();
    let lf = boundary.lambda_f();
    let n_i = [-boundary.omega_i / li, 0.0, -boundary.delta_i / li];
    let e_i = [-boundary.delta_i / li, 0.0, boundary.omega_i / li];
    let n_f = [-boundary.omega_f / lf, 0.0, -boundary.delta_f / lf];
    let e_f = [-boundary.delta_f / lf, 0.0, boundary.omega_f / lf];
    let y = [0.0, 1.0, 0.0];
    let (cos_eta, sin_eta) = (boundary.eta.cos(), boundary.eta.sin());

    let mut r = [[0.0; 3]; 3];
    for row in 0..3 {
        for col in 0..3 {
            r[row][col] = n_f[row] * n_i[col]
                + cos_eta * (e_f[row] * e_i[col] + y[row] * y[col])
                + sin_eta * (y[row] * e_i[col] - e_f[row] * y[col]);
        }
    }
    r
}

/// Applies the adiabatic rotation to an initial Bloch vector.
pub fn adiabatic_bloch(boundary: &AdiabaticBoundary, initial: &BlochVector) -> BlochVector {
    let r = rotation_matrix(boundary);
    let x = [initial.u, initial.v, initial.w];
    BlochVector::new(
        r[0][0] * x[0] + r[0][1] * x[1] + r[0][2] * x[2],
        r[1][0] * x[0] + r[1][1] * x[1] + r[1][2] * x[2],
        r[2][0] * x[0] + r[2][1] * x[1] + r[2][2] * x[2],
    )
}

fn clamp_unit(value: f64) -> Result<f64, AnalyticError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else if value > -PROBABILITY_SLACK && value < 1.0 + PROBABILITY_SLACK {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(AnalyticError::ProbabilityExcursion { value })
    }
}

fn require_probability(p: f64) -> Result<(), AnalyticError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(AnalyticError::InvalidProbability { value: p })
    }
}

/// Adiabatic single-pulse transition probability out of the ground state:
/// `1/2 - (Delta_i Delta_f)/(2 Lambda_i Lambda_f)
///      - (Omega_i Omega_f cos eta)/(2 Lambda_i Lambda_f)`.
pub fn single_pulse_probability(boundary: &AdiabaticBoundary) -> Result<f64, AnalyticError> {
    let denom = 2.0 * boundary.lambda_i() * boundary.lambda_f();
    let p = 0.5
        - boundary.delta_i * boundary.delta_f / denom
        - boundary.omega_i * boundary.omega_f * boundary.eta.cos() / denom;
    clamp_unit(p)
}

/// Two-pulse transition probability in terms of the first pulse's polar
/// data `(p, alpha, beta)` and the phase jump `phi`, second coupling phase
/// advanced:
///
/// * identical: `4p(1-p) cos^2(alpha + phi/2)`
/// * bichromatic: `4p(1-p) sin^2(beta - phi/2)`
/// * time-reflected: `4p(1-p) sin^2(alpha - beta + phi/2)`
/// * time-reflected bichromatic: `4p(1-p) cos^2(phi/2)`
pub fn pair_probability(
    case: CaseLabel,
    p: f64,
    alpha: f64,
    beta: f64,
    phi: f64,
) -> Result<f64, AnalyticError> {
    pair_probability_with_convention(case, p, alpha, beta, phi, JumpConvention::SecondAdvanced)
}

/// [`pair_probability`] under an explicit jump-sign convention; the
/// retarded convention is the advanced one with `phi` negated.
pub fn pair_probability_with_convention(
    case: CaseLabel,
    p: f64,
    alpha: f64,
    beta: f64,
    phi: f64,
    convention: JumpConvention,
) -> Result<f64, AnalyticError> {
    require_probability(p)?;
    let phi = match convention {
        JumpConvention::SecondAdvanced => phi,
        JumpConvention::SecondRetarded => -phi,
    };
    let envelope = 4.0 * p * (1.0 - p);
    let factor = match case {
        CaseLabel::Identical => (alpha + phi / 2.0).cos().powi(2),
        CaseLabel::Bichromatic => (beta - phi / 2.0).sin().powi(2),
        CaseLabel::TimeReflected => (alpha - beta + phi / 2.0).sin().powi(2),
        CaseLabel::TimeReflectedBichromatic => (phi / 2.0).cos().powi(2),
    };
    clamp_unit(envelope * factor)
}

/// A cosine variant of the time-reflected pair formula,
/// `4p(1-p) cos^2(alpha - beta - phi/2)`, that circulates alongside the
/// sine form. It does not reproduce the explicit matrix composition under
/// either jump convention for generic phases; it is provided only so
/// callers can demonstrate that mismatch. The sine form in
/// [`pair_probability`] is the one the composition confirms.
pub fn time_reflected_cosine_variant(
    p: f64,
    alpha: f64,
    beta: f64,
    phi: f64,
) -> Result<f64, AnalyticError> {
    require_probability(p)?;
    clamp_unit(4.0 * p * (1.0 - p) * (alpha - beta - phi / 2.0).cos().powi(2))
}

/// Final Bloch vector of the time-reflected bichromatic pair started in the
/// ground state. The in-plane components keep the Stückelberg phases; the
/// inversion depends on the jump alone.
pub fn pair_bloch_reflected_bichromatic(
    p: f64,
    alpha: f64,
    beta: f64,
    phi: f64,
) -> Result<BlochVector, AnalyticError> {
    require_probability(p)?;
    let half = phi / 2.0;
    let amp = 4.0 * (p * (1.0 - p)).sqrt() * half.cos();
    let base = alpha + beta + half;
    let shifted = base + phi;
    Ok(BlochVector::new(
        amp * ((1.0 - p) * base.cos() - p * shifted.cos()),
        amp * ((1.0 - p) * base.sin() - p * shifted.sin()),
        8.0 * p * (1.0 - p) * half.cos().powi(2) - 1.0,
    ))
}

/// Worst-case pair probability when each half-transfer pulse misses
/// `p = 1/2` by `epsilon`: `(1 - 4 epsilon^2) cos^2(phi/2)`.
pub fn pair_error_bound(epsilon: f64, phi: f64) -> Result<f64, AnalyticError> {
    if !(epsilon.is_finite() && epsilon.abs() < 0.5) {
        return Err(AnalyticError::InvalidEpsilon { value: epsilon });
    }
    Ok((1.0 - 4.0 * epsilon * epsilon) * (phi / 2.0).cos().powi(2))
}

fn require_area(area: f64) -> Result<(), AnalyticError> {
    if area.is_finite() && area >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::InvalidArea { value: area })
    }
}

fn require_power_of_two(n: u32) -> Result<(), AnalyticError> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(AnalyticError::NotPowerOfTwo { n })
    }
}

/// Exact propagator of the rotating-amplitude pulse with area `A`:
/// with `s = sqrt(A^2 + 1)`,
/// `a = [(1 + iA) sin(pi s/4) + s cos(pi s/4)] / (sqrt(2) s)` and
/// `b = [(1 - iA) sin(pi s/4) - s cos(pi s/4)] / (sqrt(2) s)`.
pub fn cos_sin_exact(area: f64) -> Result<SU2Propagator, AnalyticError> {
    require_area(area)?;
    let s = area.hypot(1.0);
    let (sin_q, cos_q) = (std::f64::consts::FRAC_PI_4 * s).sin_cos();
    let scale = 1.0 / (std::f64::consts::SQRT_2 * s);
    let a = Complex64::new(sin_q + s * cos_q, area * sin_q) * scale;
    let b = Complex64::new(sin_q - s * cos_q, -area * sin_q) * scale;
    Ok(SU2Propagator::new(a, b)?)
}

/// Single-pulse transition probability of the rotating-amplitude model:
/// `1/2 - sin(pi s/2)/(2s)`.
pub fn cos_sin_single_p(area: f64) -> Result<f64, AnalyticError> {
    require_area(area)?;
    let s = area.hypot(1.0);
    clamp_unit(0.5 - (std::f64::consts::FRAC_PI_2 * s).sin() / (2.0 * s))
}

/// Pair probability of the time-reflected bichromatic arrangement for the
/// rotating-amplitude model: `[1 - sin^2(pi s/2)/s^2] cos^2(phi/2)`.
pub fn cos_sin_pair_p(area: f64, phi: f64) -> Result<f64, AnalyticError> {
    require_area(area)?;
    let s = area.hypot(1.0);
    let osc = (std::f64::consts::FRAC_PI_2 * s).sin() / s;
    clamp_unit((1.0 - osc * osc) * (phi / 2.0).cos().powi(2))
}

/// Transition probability of the recursively concatenated sequence of `n`
/// pulses with quarter-turn splits: `(1/2)[1 - (1 - 2p)^n]`, targeting 1/2.
pub fn concat_p(p: f64, n: u32) -> Result<f64, AnalyticError> {
    require_probability(p)?;
    require_power_of_two(n)?;
    clamp_unit(0.5 * (1.0 - (1.0 - 2.0 * p).powi(n as i32)))
}

/// Relative deviation of [`concat_p`] from the 1/2 target: `|1 - 2p|^n`.
pub fn concat_relative_error(p: f64, n: u32) -> Result<f64, AnalyticError> {
    require_probability(p)?;
    require_power_of_two(n)?;
    Ok((1.0 - 2.0 * p).abs().powi(n as i32))
}

/// [`concat_p`] for the rotating-amplitude model:
/// `(1/2)[1 - sin^n(pi s/2)/s^n]`.
pub fn cos_sin_concat_p(area: f64, n: u32) -> Result<f64, AnalyticError> {
    require_area(area)?;
    require_power_of_two(n)?;
    let s = area.hypot(1.0);
    let q = (std::f64::consts::FRAC_PI_2 * s).sin() / s;
    clamp_unit(0.5 * (1.0 - q.powi(n as i32)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn half_crossing(eta: f64) -> AdiabaticBoundary {
        AdiabaticBoundary::new(0.0, 1.0, 1.0, 0.0, eta).unwrap()
    }

    #[test]
    fn boundary_rejects_zero_splitting() {
        assert!(matches!(
            AdiabaticBoundary::new(0.0, 0.0, 1.0, 0.0, 1.0),
            Err(AnalyticError::ZeroSplitting { side: "initial" })
        ));
        assert!(matches!(
            AdiabaticBoundary::new(1.0, 0.0, 0.0, 0.0, 1.0),
            Err(AnalyticError::ZeroSplitting { side: "final" })
        ));
    }

    #[test]
    fn half_crossing_splits_population_evenly() {
        for eta in [0.0, 0.4, 2.0, 11.0] {
            let bloch = adiabatic_bloch(&half_crossing(eta), &BlochVector::GROUND);
            assert!(bloch.w.abs() < 1e-15, "eta = {eta}: w = {}", bloch.w);
            assert!((bloch.u + 1.0).abs() < 1e-15);
            let p = single_pulse_probability(&half_crossing(eta)).unwrap();
            assert!((p - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn no_phase_identical_boundaries_is_identity() {
        let boundary = AdiabaticBoundary::new(0.3, -0.7, 0.3, -0.7, 0.0).unwrap();
        let initial = BlochVector::new(0.2, -0.5, 0.6);
        let out = adiabatic_bloch(&boundary, &initial);
        assert!(out.max_component_distance(&initial) < 1e-15);
    }

    #[test]
    fn resonant_boundaries_rotate_by_eta() {
        for eta in [0.3, PI, 5.0] {
            let boundary = AdiabaticBoundary::new(1.0, 0.0, 1.0, 0.0, eta).unwrap();
            let bloch = adiabatic_bloch(&boundary, &BlochVector::GROUND);
            assert!((bloch.w + eta.cos()).abs() < 1e-15);
        }
    }

    #[test]
    fn rotation_matrix_is_orthogonal() {
        let boundary = AdiabaticBoundary::new(0.8, -1.3, 0.4, 2.1, 7.7).unwrap();
        let r = rotation_matrix(&boundary);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[k][i] * r[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn probability_matches_inversion() {
        let boundary = AdiabaticBoundary::new(0.9, 0.4, 1.2, -0.3, 2.6).unwrap();
        let w = adiabatic_bloch(&boundary, &BlochVector::GROUND).w;
        let p = single_pulse_probability(&boundary).unwrap();
        assert!((p - (w + 1.0) / 2.0).abs() < 1e-13);
    }

    #[test]
    fn single_pulse_limits() {
        let no_coupling = AdiabaticBoundary::new(0.0, 1.0, 0.0, 1.0, 3.0).unwrap();
        assert_eq!(single_pulse_probability(&no_coupling).unwrap(), 0.0);

        let resonant_pi = AdiabaticBoundary::new(1.0, 0.0, 1.0, 0.0, PI).unwrap();
        assert!((single_pulse_probability(&resonant_pi).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pair_probability_reference_points() {
        let p = pair_probability(CaseLabel::TimeReflectedBichromatic, 0.5, 0.3, -0.9, FRAC_PI_2)
            .unwrap();
        assert!((p - 0.5).abs() < 1e-15);

        for case in CaseLabel::ALL {
            assert_eq!(pair_probability(case, 0.0, 0.4, 0.2, 1.0).unwrap(), 0.0);
        }

        let doubled = pair_probability(CaseLabel::Identical, 0.5, FRAC_PI_3, 0.0, 0.0).unwrap();
        assert!((doubled - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pair_probability_rejects_bad_p() {
        assert!(matches!(
            pair_probability(CaseLabel::Identical, 1.5, 0.0, 0.0, 0.0),
            Err(AnalyticError::InvalidProbability { .. })
        ));
    }

    #[test]
    fn retarded_convention_negates_phi() {
        let (p, a, b, phi) = (0.37, 0.6, -1.1, 0.8);
        for case in CaseLabel::ALL {
            let retarded =
                pair_probability_with_convention(case, p, a, b, phi, JumpConvention::SecondRetarded)
                    .unwrap();
            let advanced = pair_probability(case, p, a, b, -phi).unwrap();
            assert_eq!(retarded, advanced);
        }
    }

    #[test]
    fn reflected_bichromatic_bloch_reference_points() {
        let back = pair_bloch_reflected_bichromatic(0.5, 0.3, 1.1, PI).unwrap();
        assert!(back.max_component_distance(&BlochVector::new(0.0, 0.0, -1.0)) < 1e-15);

        let equator = pair_bloch_reflected_bichromatic(0.5, 0.3, 1.1, FRAC_PI_2).unwrap();
        assert!(equator.w.abs() < 1e-15);

        let full = pair_bloch_reflected_bichromatic(0.5, FRAC_PI_3, -FRAC_PI_3, 0.0).unwrap();
        assert!(full.max_component_distance(&BlochVector::new(0.0, 0.0, 1.0)) < 1e-15);
    }

    #[test]
    fn pair_bloch_stays_on_sphere() {
        let cases = [
            (0.23, 0.5, -1.4, 0.9),
            (0.77, -2.0, 0.4, 2.2),
            (0.01, 1.0, 1.0, -0.6),
        ];
        for (p, a, b, phi) in cases {
            let bloch = pair_bloch_reflected_bichromatic(p, a, b, phi).unwrap();
            assert!((bloch.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn error_bound_reference_points() {
        assert!((pair_error_bound(0.05, 0.0).unwrap() - 0.99).abs() < 1e-15);
        assert!((pair_error_bound(0.01, 0.0).unwrap() - 0.9996).abs() < 1e-15);
        let phi = 1.3_f64;
        assert_eq!(pair_error_bound(0.0, phi).unwrap(), (phi / 2.0).cos().powi(2));
        assert!(pair_error_bound(0.5, 0.0).is_err());
    }

    #[test]
    fn exact_model_reference_points() {
        let id = cos_sin_exact(0.0).unwrap();
        assert!((id.a() - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(id.b().norm() < 1e-15);

        let s3 = 3.0_f64.sqrt();
        let d = 2.0 * 2.0_f64.sqrt();
        let u = cos_sin_exact(s3).unwrap();
        assert!((u.a() - Complex64::new(1.0 / d, s3 / d)).norm() < 1e-14);
        assert!((u.b() - Complex64::new(1.0 / d, -s3 / d)).norm() < 1e-14);

        assert!(cos_sin_exact(-1.0).is_err());
        assert!(cos_sin_exact(f64::NAN).is_err());
    }

    #[test]
    fn exact_model_matches_probability_formula() {
        for k in 0..100 {
            let area = 0.08 + k as f64 * 0.31;
            let from_matrix = cos_sin_exact(area).unwrap().transition_probability();
            let from_formula = cos_sin_single_p(area).unwrap();
            assert!(
                (from_matrix - from_formula).abs() < 1e-14,
                "area = {area}: {from_matrix} vs {from_formula}"
            );
        }
    }

    #[test]
    fn single_p_limits_and_envelope() {
        assert_eq!(cos_sin_single_p(0.0).unwrap(), 0.0);
        assert!((cos_sin_single_p(3.0_f64.sqrt()).unwrap() - 0.5).abs() < 1e-15);
        for k in 1..40 {
            let area = k as f64;
            let s = area.hypot(1.0);
            let deviation = (cos_sin_single_p(area).unwrap() - 0.5).abs();
            assert!(deviation <= 0.5 / s + 1e-15);
        }
    }

    #[test]
    fn pair_p_reference_points() {
        assert!((cos_sin_pair_p(3.0_f64.sqrt(), FRAC_PI_2).unwrap() - 0.5).abs() < 1e-15);
        assert!(cos_sin_pair_p(7.7, PI).unwrap() < 1e-30);
        let phi = 2.0 * FRAC_PI_3;
        let far = cos_sin_pair_p(60.0, phi).unwrap();
        assert!((far - (phi / 2.0).cos().powi(2)).abs() < 1.0 / (60.0_f64 * 60.0 + 1.0));
    }

    #[test]
    fn concat_reference_points() {
        assert!((concat_p(0.45, 2).unwrap() - 0.495).abs() < 1e-15);
        assert!((concat_relative_error(0.49, 4).unwrap() - 1.6e-7).abs() < 1e-15);
        assert_eq!(concat_p(0.5, 64).unwrap(), 0.5);
        assert!(matches!(
            concat_p(0.3, 6),
            Err(AnalyticError::NotPowerOfTwo { n: 6 })
        ));
    }

    #[test]
    fn concat_model_consistency() {
        assert!((cos_sin_concat_p(2.0, 1).unwrap() - cos_sin_single_p(2.0).unwrap()).abs() < 1e-15);
        for n in [1u32, 2, 4, 8, 16] {
            assert!((cos_sin_concat_p(3.0_f64.sqrt(), n).unwrap() - 0.5).abs() < 1e-15);
        }
        for n in [2u32, 4, 8] {
            let area = 5.0;
            let p = cos_sin_single_p(area).unwrap();
            let direct = cos_sin_concat_p(area, n).unwrap();
            let via_p = concat_p(p, n).unwrap();
            assert!((direct - via_p).abs() < 1e-14);
        }
    }

    #[test]
    fn cosine_variant_disagrees_generically() {
        let (p, a, b, phi) = (0.31, 0.7, -0.4, 1.1);
        let sine = pair_probability(CaseLabel::TimeReflected, p, a, b, phi).unwrap();
        let cosine = time_reflected_cosine_variant(p, a, b, phi).unwrap();
        assert!((sine - cosine).abs() > 1e-3);
    }
}
