//! Brute-force 2x2 complex matrix arithmetic used as an independent oracle.
//!
//! Everything here works on raw `[[Complex64; 2]; 2]` arrays and builds the
//! reference answers from explicit matrix products, never from the library's
//! own algebra, so agreement between the two routes is meaningful.

#![allow(dead_code)]

use num_complex::Complex64;

pub type Mat = [[Complex64; 2]; 2];

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Cayley-Klein matrix [[a, -b*], [b, a*]].
pub fn mat_from_parts(a: Complex64, b: Complex64) -> Mat {
    [[a, -b.conj()], [b, a.conj()]]
}

pub fn mat_from_polar(p: f64, alpha: f64, beta: f64) -> Mat {
    let a = Complex64::from_polar((1.0 - p).sqrt(), alpha);
    let b = Complex64::from_polar(p.sqrt(), beta);
    mat_from_parts(a, b)
}

pub fn mat_mul(m: &Mat, n: &Mat) -> Mat {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = m[i][0] * n[0][j] + m[i][1] * n[1][j];
        }
    }
    out
}

pub fn mat_transpose(m: &Mat) -> Mat {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

pub fn mat_dagger(m: &Mat) -> Mat {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

pub fn sigma_x() -> Mat {
    [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn sigma_y() -> Mat {
    [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn sigma_z() -> Mat {
    [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]
}

/// Diagonal phase gate diag(e^{i phi/2}, e^{-i phi/2}).
pub fn phase_gate(phi: f64) -> Mat {
    [
        [Complex64::from_polar(1.0, phi / 2.0), c(0.0, 0.0)],
        [c(0.0, 0.0), Complex64::from_polar(1.0, -phi / 2.0)],
    ]
}

/// The sandwich gate(-phi) * M * gate(phi).
pub fn phase_sandwich(m: &Mat, phi: f64) -> Mat {
    mat_mul(&phase_gate(-phi), &mat_mul(m, &phase_gate(phi)))
}

/// The conjugation sigma * M * sigma for the given Pauli matrix.
pub fn pauli_conjugate(m: &Mat, sigma: &Mat) -> Mat {
    mat_mul(sigma, &mat_mul(m, sigma))
}

/// Largest element-wise modulus difference.
pub fn mat_distance(m: &Mat, n: &Mat) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            worst = worst.max((m[i][j] - n[i][j]).norm());
        }
    }
    worst
}

/// Transition probability |M_{10}|^2 for a ground-state start.
pub fn transfer_probability(m: &Mat) -> f64 {
    m[1][0].norm_sqr()
}

/// Bloch components of M |0>: (2 Re(a* b), 2 Im(a* b), |b|^2 - |a|^2).
pub fn bloch_of(m: &Mat) -> (f64, f64, f64) {
    let a = m[0][0];
    let b = m[1][0];
    let cross = a.conj() * b;
    (2.0 * cross.re, 2.0 * cross.im, b.norm_sqr() - a.norm_sqr())
}
