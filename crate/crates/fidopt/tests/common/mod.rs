//! Shared fixtures: the qutrit pair with commuting support projectors but
//! noncommuting states, and the standard qubit pair |0>, |+>.
#![allow(dead_code)]

use fidopt::{Matrix, State, Tolerances};
use num_complex::Complex64;

pub fn tol() -> Tolerances {
    Tolerances::default()
}

/// rho = (2|0><0| + |0><1| + |1><0| + 2|1><1|) / 4.
pub fn qutrit_rho() -> State {
    let m = Matrix::from_real_rows(vec![
        vec![0.5, 0.25, 0.0],
        vec![0.25, 0.5, 0.0],
        vec![0.0, 0.0, 0.0],
    ])
    .unwrap();
    State::new(m, &tol()).unwrap()
}

/// sigma = (2|1><1| + |1><2| + |2><1| + 2|2><2|) / 4.
pub fn qutrit_sigma() -> State {
    let m = Matrix::from_real_rows(vec![
        vec![0.0, 0.0, 0.0],
        vec![0.0, 0.5, 0.25],
        vec![0.0, 0.25, 0.5],
    ])
    .unwrap();
    State::new(m, &tol()).unwrap()
}

/// The explicit unitary for the qutrit pair, with a = sqrt(sqrt(3) + 2):
/// U = [[-2a^3, 2a, 0], [a^2, a^4, -2a], [1, a^2, 2a^3]] / (4 a^2).
pub fn qutrit_paper_unitary() -> Matrix {
    let a = (3.0f64.sqrt() + 2.0).sqrt();
    let s = 1.0 / (4.0 * a * a);
    Matrix::from_real_rows(vec![
        vec![-2.0 * a.powi(3) * s, 2.0 * a * s, 0.0],
        vec![a * a * s, a.powi(4) * s, -2.0 * a * s],
        vec![s, a * a * s, 2.0 * a.powi(3) * s],
    ])
    .unwrap()
}

/// U sqrt(rho) for the qutrit pair, with b = 3 sqrt(3) + 5:
/// [[-2 sqrt(6) a^2, 0, 0], [b, 2b, 0], [sqrt(2) a, 2 sqrt(2) a, 0]] / (8 a^2).
pub fn qutrit_paper_u_sqrt_rho() -> Matrix {
    let a = (3.0f64.sqrt() + 2.0).sqrt();
    let b = 3.0 * 3.0f64.sqrt() + 5.0;
    let s = 1.0 / (8.0 * a * a);
    Matrix::from_real_rows(vec![
        vec![-2.0 * 6.0f64.sqrt() * a * a * s, 0.0, 0.0],
        vec![b * s, 2.0 * b * s, 0.0],
        vec![2.0f64.sqrt() * a * s, 2.0 * 2.0f64.sqrt() * a * s, 0.0],
    ])
    .unwrap()
}

pub fn ket(coeffs: &[(f64, f64)]) -> Vec<Complex64> {
    coeffs
        .iter()
        .map(|(re, im)| Complex64::new(*re, *im))
        .collect()
}

pub fn zero_state() -> State {
    State::from_pure(&ket(&[(1.0, 0.0), (0.0, 0.0)]), &tol()).unwrap()
}

pub fn one_state() -> State {
    State::from_pure(&ket(&[(0.0, 0.0), (1.0, 0.0)]), &tol()).unwrap()
}

pub fn plus_state() -> State {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    State::from_pure(&ket(&[(r, 0.0), (r, 0.0)]), &tol()).unwrap()
}

/// Projector onto the span of a complex vector.
pub fn proj(v: &[Complex64]) -> Matrix {
    Matrix::projector_onto(v)
}

/// Distance between two matrices up to a global phase on one of them
/// (used for eigenvector comparisons).
pub fn vector_matches_up_to_phase(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    let ip: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    (ip.norm() - na * nb).abs() <= tol * na * nb
}
