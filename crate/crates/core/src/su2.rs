//! SU(2) propagator algebra in Cayley–Klein form.
//!
//! Every propagator of a traceless two-level Hamiltonian with real coupling
//! can be written as
//!
//! ```text
//!     [ a   -b* ]
//! U = [         ],      |a|^2 + |b|^2 = 1,
//!     [ b    a* ]
//! ```
//!
//! so the pair `(a, b)` carries the full matrix. The polar form
//! `a = sqrt(1-p) e^{i alpha}`, `b = sqrt(p) e^{i beta}` exposes the
//! transition probability `p` and the Stückelberg phases `alpha`, `beta`
//! that govern the interference of split pulse pairs.

use num_complex::Complex64;
use thiserror::Error;

/// Norm-square drift below which a propagator is accepted unchanged.
pub const UNITARITY_ACCEPT: f64 = 1e-12;
/// Norm-square drift up to which a propagator is silently renormalized;
/// anything beyond is treated as numerical corruption and rejected.
pub const UNITARITY_REJECT: f64 = 1e-9;

/// Errors raised by propagator construction and composition.
#[derive(Debug, Error)]
pub enum Su2Error {
    /// `|a|^2 + |b|^2` strays from 1 by more than [`UNITARITY_REJECT`].
    #[error("propagator is not unitary: |a|^2+|b|^2 deviates from 1 by {drift:.3e}")]
    NotUnitary { drift: f64 },
    /// A transition probability outside `[0, 1]`.
    #[error("probability {value} lies outside [0, 1]")]
    InvalidProbability { value: f64 },
}

/// Pauli axis selecting a sign-flip conjugation `U -> sigma_k U sigma_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliAxis {
    /// `sigma_x`: the propagator of the same pulse with the detuning flipped.
    X,
    /// `sigma_y`: both coupling and detuning flipped.
    Y,
    /// `sigma_z`: the coupling flipped.
    Z,
}

/// Symmetry class of a time-reversed pulse relative to the original.
///
/// The first word states how the mirrored coupling relates to the original
/// (`Sym`: equal, `Anti`: sign-flipped), the second the detuning. Each class
/// fixes the mirrored propagator algebraically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeReversal {
    /// Mirrored coupling and detuning: `U -> U^T`.
    SymSym,
    /// Both mirrored with a sign flip: `U -> U^dagger`.
    AntiAnti,
    /// Mirrored coupling, flipped detuning: `U -> sigma_z U^dagger sigma_z`.
    SymAnti,
    /// Flipped coupling, mirrored detuning: `U -> sigma_z U^T sigma_z`.
    AntiSym,
}

/// Which Stückelberg phase is left undefined by a degenerate decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarDegeneracy {
    /// `p = 1` exactly: `a = 0`, so `alpha` is arbitrary (reported as 0).
    AlphaArbitrary,
    /// `p = 0` exactly: `b = 0`, so `beta` is arbitrary (reported as 0).
    BetaArbitrary,
}

/// Polar decomposition of a propagator: transition probability plus the two
/// Stückelberg phases on the principal branch `(-pi, pi]`.
#[derive(Debug, Clone, Copy)]
pub struct PolarForm {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Set when `p` is exactly 0 or 1 and one phase carries no information.
    pub degeneracy: Option<PolarDegeneracy>,
}

/// Bloch vector `(u, v, w)`; `w = -1` is the ground state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl BlochVector {
    pub const GROUND: BlochVector = BlochVector { u: 0.0, v: 0.0, w: -1.0 };

    pub fn new(u: f64, v: f64, w: f64) -> Self {
        BlochVector { u, v, w }
    }

    pub fn norm(&self) -> f64 {
        (self.u * self.u + self.v * self.v + self.w * self.w).sqrt()
    }

    /// Largest component-wise distance to `other`.
    pub fn max_component_distance(&self, other: &BlochVector) -> f64 {
        (self.u - other.u)
            .abs()
            .max((self.v - other.v).abs())
            .max((self.w - other.w).abs())
    }
}

/// Diagonal phase gate `Phi(phi) = diag(e^{i phi/2}, e^{-i phi/2})`.
///
/// A jump of the coupling phase by `phi` across a pulse boundary acts on the
/// later propagator as the sandwich `Phi(-phi) U Phi(phi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseGate {
    pub phi: f64,
}

impl PhaseGate {
    /// The quarter-turn gate used for the internal splits of concatenated
    /// sequences.
    pub const HALF_PI: PhaseGate = PhaseGate { phi: std::f64::consts::FRAC_PI_2 };

    pub fn new(phi: f64) -> Self {
        PhaseGate { phi }
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let half = Complex64::new(0.0, self.phi / 2.0).exp();
        [
            [half, Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), half.conj()],
        ]
    }

    /// Applies `Phi(-phi) u Phi(phi)`.
    pub fn sandwich(&self, u: &SU2Propagator) -> SU2Propagator {
        u.phase_sandwich(self.phi)
    }
}

/// An SU(2) propagator stored through its Cayley–Klein parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Propagator {
    a: Complex64,
    b: Complex64,
}

/// Principal argument on `(-pi, pi]` (maps the `-pi` branch edge to `+pi`).
fn principal_arg(z: Complex64) -> f64 {
    let arg = z.arg();
    if arg <= -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        arg
    }
}

impl SU2Propagator {
    /// Builds a propagator from its Cayley–Klein parameters.
    ///
    /// Accepts `|a|^2 + |b|^2` within [`UNITARITY_ACCEPT`] of 1 unchanged,
    /// renormalizes drifts up to [`UNITARITY_REJECT`], and rejects anything
    /// larger.
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, Su2Error> {
        let norm_sq = a.norm_sqr() + b.norm_sqr();
        let drift = (norm_sq - 1.0).abs();
        if drift <= UNITARITY_ACCEPT {
            Ok(SU2Propagator { a, b })
        } else if drift <= UNITARITY_REJECT {
            let scale = norm_sq.sqrt().recip();
            Ok(SU2Propagator { a: a * scale, b: b * scale })
        } else {
            Err(Su2Error::NotUnitary { drift })
        }
    }

    #[cfg(test)]
    fn from_parts_unchecked(a: Complex64, b: Complex64) -> Self {
        SU2Propagator { a, b }
    }

    pub fn identity() -> Self {
        SU2Propagator { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Builds `a = sqrt(1-p) e^{i alpha}`, `b = sqrt(p) e^{i beta}`.
    pub fn from_polar(p: f64, alpha: f64, beta: f64) -> Result<Self, Su2Error> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Su2Error::InvalidProbability { value: p });
        }
        let a = Complex64::from_polar((1.0 - p).sqrt(), alpha);
        let b = Complex64::from_polar(p.sqrt(), beta);
        Self::new(a, b)
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    /// Full 2x2 matrix, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a, -self.b.conj()], [self.b, self.a.conj()]]
    }

    /// Transition probability out of either basis state, `|b|^2`.
    pub fn transition_probability(&self) -> f64 {
        self.b.norm_sqr()
    }

    /// `|a|^2 + |b|^2 - 1`, the unitarity drift of the stored parameters.
    pub fn unitarity_drift(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr() - 1.0
    }

    /// Returns `self * first`: the propagator of `first` followed by `self`.
    ///
    /// Both inputs are re-checked against the unitarity policy so corruption
    /// upstream surfaces here instead of propagating silently.
    pub fn compose(&self, first: &SU2Propagator) -> Result<SU2Propagator, Su2Error> {
        for u in [self, first] {
            let drift = u.unitarity_drift().abs();
            if drift > UNITARITY_REJECT {
                return Err(Su2Error::NotUnitary { drift });
            }
        }
        let a = self.a * first.a - self.b.conj() * first.b;
        let b = self.b * first.a + self.a.conj() * first.b;
        SU2Propagator::new(a, b)
    }

    /// Phase-jump sandwich `Phi(-phi) U Phi(phi)`, i.e. `b -> b e^{i phi}`.
    pub fn phase_sandwich(&self, phi: f64) -> SU2Propagator {
        SU2Propagator { a: self.a, b: self.b * Complex64::from_polar(1.0, phi) }
    }

    /// Conjugation `sigma_k U sigma_k`.
    pub fn sigma_conjugate(&self, axis: PauliAxis) -> SU2Propagator {
        match axis {
            PauliAxis::X => SU2Propagator { a: self.a.conj(), b: -self.b.conj() },
            PauliAxis::Y => SU2Propagator { a: self.a.conj(), b: self.b.conj() },
            PauliAxis::Z => SU2Propagator { a: self.a, b: -self.b },
        }
    }

    /// Propagator of the time-reversed pulse in the given symmetry class.
    pub fn time_reversed(&self, class: TimeReversal) -> SU2Propagator {
        match class {
            TimeReversal::SymSym => self.transpose(),
            TimeReversal::AntiAnti => self.dagger(),
            TimeReversal::SymAnti => SU2Propagator { a: self.a.conj(), b: self.b },
            TimeReversal::AntiSym => SU2Propagator { a: self.a, b: self.b.conj() },
        }
    }

    /// `U^T` in Cayley–Klein form: `(a, -b*)`.
    pub fn transpose(&self) -> SU2Propagator {
        SU2Propagator { a: self.a, b: -self.b.conj() }
    }

    /// `U^dagger` in Cayley–Klein form: `(a*, -b)`.
    pub fn dagger(&self) -> SU2Propagator {
        SU2Propagator { a: self.a.conj(), b: -self.b }
    }

    /// Polar decomposition with principal-branch phases.
    pub fn polar(&self) -> PolarForm {
        let p = self.b.norm_sqr();
        if p == 0.0 {
            PolarForm {
                p: 0.0,
                alpha: principal_arg(self.a),
                beta: 0.0,
                degeneracy: Some(PolarDegeneracy::BetaArbitrary),
            }
        } else if self.a.norm_sqr() == 0.0 {
            PolarForm {
                p: 1.0,
                alpha: 0.0,
                beta: principal_arg(self.b),
                degeneracy: Some(PolarDegeneracy::AlphaArbitrary),
            }
        } else {
            PolarForm {
                p,
                alpha: principal_arg(self.a),
                beta: principal_arg(self.b),
                degeneracy: None,
            }
        }
    }

    /// Final Bloch vector for a system started in the ground state
    /// (`u = 2 Re(a* b)`, `v = 2 Im(a* b)`, `w = |b|^2 - |a|^2`).
    pub fn bloch(&self) -> BlochVector {
        let cross = self.a.conj() * self.b;
        BlochVector {
            u: 2.0 * cross.re,
            v: 2.0 * cross.im,
            w: self.b.norm_sqr() - self.a.norm_sqr(),
        }
    }

    /// Largest absolute difference over the real and imaginary parts of `a`
    /// and `b`.
    pub fn max_component_distance(&self, other: &SU2Propagator) -> f64 {
        let da = self.a - other.a;
        let db = self.b - other.b;
        da.re.abs().max(da.im.abs()).max(db.re.abs()).max(db.im.abs())
    }
}

impl PolarForm {
    /// Rebuilds the propagator `(sqrt(1-p) e^{i alpha}, sqrt(p) e^{i beta})`.
    pub fn propagator(&self) -> Result<SU2Propagator, Su2Error> {
        SU2Propagator::from_polar(self.p, self.alpha, self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Cos-Sin propagator at pulse area sqrt(3): a = (1+i sqrt3)/(2 sqrt2),
    /// b = (1-i sqrt3)/(2 sqrt2). Used as the frozen reference throughout.
    fn reference_propagator() -> SU2Propagator {
        let s3 = 3.0_f64.sqrt();
        let d = 2.0 * 2.0_f64.sqrt();
        SU2Propagator::new(c(1.0 / d, s3 / d), c(1.0 / d, -s3 / d)).unwrap()
    }

    #[test]
    fn identity_is_unit() {
        let id = SU2Propagator::identity();
        assert_eq!(id.a(), c(1.0, 0.0));
        assert_eq!(id.transition_probability(), 0.0);
        assert!(id.unitarity_drift().abs() < 1e-15);
    }

    #[test]
    fn construction_policy_accepts_renormalizes_rejects() {
        let ok = SU2Propagator::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        assert_eq!(ok.a(), c(0.6, 0.0));

        let drifted = SU2Propagator::new(c(0.6 * (1.0 + 3e-10), 0.0), c(0.0, 0.8)).unwrap();
        assert!(drifted.unitarity_drift().abs() < 1e-15, "drift should be repaired");

        let broken = SU2Propagator::new(c(0.7, 0.0), c(0.0, 0.8));
        assert!(matches!(broken, Err(Su2Error::NotUnitary { .. })));
    }

    #[test]
    fn compose_matches_reference_pair() {
        // Mirror-conjugate pair split by phi = pi/2 transfers with probability 1/2.
        let u = reference_propagator();
        let second = u.time_reversed(TimeReversal::SymAnti).phase_sandwich(FRAC_PI_2);
        let total = second.compose(&u).unwrap();
        assert!((total.transition_probability() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn compose_rejects_corrupt_input() {
        let bad = SU2Propagator::from_parts_unchecked(c(0.9, 0.0), c(0.9, 0.0));
        let id = SU2Propagator::identity();
        assert!(id.compose(&bad).is_err());
        assert!(bad.compose(&id).is_err());
    }

    #[test]
    fn phase_sandwich_rotates_b_only() {
        let u = SU2Propagator::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        let s = u.phase_sandwich(FRAC_PI_2);
        assert_eq!(s.a(), c(0.6, 0.0));
        assert!((s.b() - c(-0.8, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn sigma_conjugations() {
        let u = reference_propagator();
        let x = u.sigma_conjugate(PauliAxis::X);
        assert_eq!(x.a(), u.a().conj());
        assert_eq!(x.b(), -u.b().conj());
        let y = u.sigma_conjugate(PauliAxis::Y);
        assert_eq!(y.b(), u.b().conj());
        let z = u.sigma_conjugate(PauliAxis::Z);
        assert_eq!(z.a(), u.a());
        assert_eq!(z.b(), -u.b());
    }

    #[test]
    fn time_reversal_classes() {
        let u = reference_propagator();
        assert_eq!(u.time_reversed(TimeReversal::SymSym).matrix()[0][1], u.b());
        assert_eq!(u.time_reversed(TimeReversal::AntiAnti).a(), u.a().conj());
        // The mirror-conjugate pair at phi = 0 transfers completely.
        let total = u.time_reversed(TimeReversal::SymAnti).compose(&u).unwrap();
        assert!((total.transition_probability() - 1.0).abs() < 1e-14);
        assert_eq!(u.time_reversed(TimeReversal::AntiSym).b(), u.b().conj());
    }

    #[test]
    fn polar_of_reference() {
        let polar = reference_propagator().polar();
        assert!((polar.p - 0.5).abs() < 1e-15);
        assert!((polar.alpha - FRAC_PI_3).abs() < 1e-15);
        assert!((polar.beta + FRAC_PI_3).abs() < 1e-15);
        assert!(polar.degeneracy.is_none());
    }

    #[test]
    fn polar_degenerate_flags() {
        let no_transfer = SU2Propagator::identity().polar();
        assert_eq!(no_transfer.degeneracy, Some(PolarDegeneracy::BetaArbitrary));
        assert_eq!(no_transfer.beta, 0.0);

        let full = SU2Propagator::new(c(0.0, 0.0), c(0.0, 1.0)).unwrap().polar();
        assert_eq!(full.degeneracy, Some(PolarDegeneracy::AlphaArbitrary));
        assert_eq!(full.alpha, 0.0);
        assert!((full.beta - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn principal_branch_hits_pi_not_minus_pi() {
        assert_eq!(principal_arg(c(-1.0, 0.0)), PI);
        assert_eq!(principal_arg(c(-1.0, -0.0)), PI);
    }

    #[test]
    fn bloch_of_reference() {
        let bloch = reference_propagator().bloch();
        assert!((bloch.u + 0.5).abs() < 1e-15);
        assert!((bloch.v + 3.0_f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(bloch.w.abs() < 1e-15);
        assert!((bloch.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_gate_matrix() {
        let m = PhaseGate::HALF_PI.matrix();
        assert!((m[0][0] - Complex64::from_polar(1.0, PI / 4.0)).norm() < 1e-15);
        assert_eq!(m[0][1], c(0.0, 0.0));
    }

    #[test]
    fn from_polar_rejects_bad_probability() {
        assert!(SU2Propagator::from_polar(-0.1, 0.0, 0.0).is_err());
        assert!(SU2Propagator::from_polar(1.1, 0.0, 0.0).is_err());
    }
}
