//! Singular value decomposition and rank machinery.
//!
//! The SVD is obtained from the Hermitian eigendecomposition of the
//! augmented matrix [[0, A], [A^dag, 0]], whose spectrum is {+-sigma_i}.
//! This keeps small singular values fully accurate, which matters for the
//! rank decisions everything downstream relies on.

use super::eigen::hermitian_eigen;
use super::ComplexMatrix;
use crate::error::Result;
use crate::scalar::{cr, czero, Scalar, C};
use crate::tol::ToleranceConfig;

/// Full SVD `A = U diag(S) V^dag` with `U` (m x m), `V` (n x n) unitary and
/// `S` (len min(m, n)) sorted descending.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: ComplexMatrix<T>,
    pub s: Vec<T>,
    pub v: ComplexMatrix<T>,
}

impl<T: Scalar> Svd<T> {
    pub fn sigma_max(&self) -> T {
        self.s.first().copied().unwrap_or_else(T::zero)
    }

    /// Number of singular values above `threshold`.
    pub fn rank(&self, threshold: T) -> usize {
        self.s.iter().filter(|s| **s > threshold).count()
    }

    /// Orthonormal basis of the numerical null space (right singular vectors
    /// with singular value at or below `threshold`).
    pub fn null_space(&self, threshold: T) -> ComplexMatrix<T> {
        let r = self.rank(threshold);
        let n = self.v.nrows();
        let cols: Vec<Vec<C<T>>> = (r..n).map(|j| self.v.column(j)).collect();
        ComplexMatrix::from_columns(n, &cols)
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let m = self.u.nrows();
        let n = self.v.nrows();
        let mut us = ComplexMatrix::zeros(m, n);
        for (k, s) in self.s.iter().enumerate() {
            for i in 0..m {
                us[(i, k)] = self.u[(i, k)] * cr(*s);
            }
        }
        &us * &self.v.adjoint()
    }
}

/// Compute the full SVD of a rectangular complex matrix.
pub fn svd<T: Scalar>(a: &ComplexMatrix<T>) -> Result<Svd<T>> {
    a.validate_finite()?;
    let m = a.nrows();
    let n = a.ncols();
    let k = m.min(n);
    let dim = m + n;

    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..m {
        for j in 0..n {
            h[(i, m + j)] = a[(i, j)];
            h[(m + j, i)] = a[(i, j)].conj();
        }
    }
    let eig = hermitian_eigen(&h)?;

    // The k largest eigenvalues of the augmented matrix are the singular
    // values; their eigenvectors carry the singular vector pairs.
    let theta_max = eig.spectral_radius();
    let extract_cut = T::epsilon() * T::from_usize_lossy(dim) * theta_max;
    let sqrt2 = T::from_f64_lossy(2.0).sqrt();

    let mut s = Vec::with_capacity(k);
    let mut u_cols: Vec<Vec<C<T>>> = Vec::with_capacity(k);
    let mut v_cols: Vec<Vec<C<T>>> = Vec::with_capacity(k);
    for idx in 0..k {
        let col = dim - 1 - idx; // descending
        let theta = eig.eigenvalues[col];
        if theta <= extract_cut {
            break;
        }
        s.push(theta);
        let w = eig.eigenvectors.column(col);
        let mut u: Vec<C<T>> = w[..m].iter().map(|z| *z * cr(sqrt2)).collect();
        let mut v: Vec<C<T>> = w[m..].iter().map(|z| *z * cr(sqrt2)).collect();
        normalize(&mut u);
        normalize(&mut v);
        u_cols.push(u);
        v_cols.push(v);
    }
    while s.len() < k {
        s.push(T::zero());
    }

    let u = complete_columns(u_cols, m);
    let v = complete_columns(v_cols, n);
    Ok(Svd { u, s, v })
}

fn normalize<T: Scalar>(v: &mut [C<T>]) {
    let n: T = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    if n > T::zero() {
        for z in v.iter_mut() {
            *z = *z / cr(n);
        }
    }
}

/// Extend an orthonormal set of columns to a full unitary, deterministically,
/// by repeatedly adjoining the standard basis vector with the largest
/// residual after projection.
pub fn complete_columns<T: Scalar>(mut cols: Vec<Vec<C<T>>>, dim: usize) -> ComplexMatrix<T> {
    while cols.len() < dim {
        let mut best: Option<(T, Vec<C<T>>)> = None;
        for i in 0..dim {
            let mut e = vec![czero(); dim];
            e[i] = crate::scalar::cone();
            project_out(&mut e, &cols);
            let r: T = e.iter().map(|z| z.norm_sqr()).sum();
            if best.as_ref().map_or(true, |(b, _)| r > *b) {
                best = Some((r, e));
            }
        }
        let (_, mut e) = best.expect("dim > 0");
        // Reorthogonalize once before normalizing.
        project_out(&mut e, &cols);
        normalize(&mut e);
        cols.push(e);
    }
    ComplexMatrix::from_columns(dim, &cols)
}

fn project_out<T: Scalar>(v: &mut [C<T>], basis: &[Vec<C<T>>]) {
    for b in basis {
        let ip: C<T> = b
            .iter()
            .zip(v.iter())
            .map(|(bi, vi)| bi.conj() * *vi)
            .sum();
        for (vi, bi) in v.iter_mut().zip(b.iter()) {
            *vi = *vi - ip * *bi;
        }
    }
}

/// Orthonormalize a spanning set, dropping directions whose residual falls
/// below `drop_tol` relative to the original vector norm.
pub fn orthonormalize_spanning<T: Scalar>(
    vectors: &[Vec<C<T>>],
    drop_tol: T,
) -> Vec<Vec<C<T>>> {
    let mut basis: Vec<Vec<C<T>>> = Vec::new();
    for v in vectors {
        let orig: T = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if orig == T::zero() {
            continue;
        }
        let mut w = v.clone();
        project_out(&mut w, &basis);
        project_out(&mut w, &basis);
        let res: T = w.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if res > drop_tol * orig {
            normalize(&mut w);
            basis.push(w);
        }
    }
    basis
}

/// Moore-Penrose pseudo-inverse with a relative rank cut: singular values
/// at or below `rank_threshold(max(m, n), sigma_max)` are treated as zero.
pub fn pseudo_inverse<T: Scalar>(
    o: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<ComplexMatrix<T>> {
    let dec = svd(o)?;
    let cut = tol.rank_threshold(o.nrows().max(o.ncols()), dec.sigma_max());
    let m = o.nrows();
    let n = o.ncols();
    let mut out = ComplexMatrix::zeros(n, m);
    for (k, s) in dec.s.iter().enumerate() {
        if *s <= cut {
            continue;
        }
        let inv = T::one() / *s;
        for i in 0..n {
            let vi = dec.v[(i, k)] * cr(inv);
            for j in 0..m {
                out[(i, j)] = out[(i, j)] + vi * dec.u[(j, k)].conj();
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of the numerical null space of a general matrix.
pub fn null_space<T: Scalar>(
    a: &ComplexMatrix<T>,
    threshold: T,
) -> Result<ComplexMatrix<T>> {
    Ok(svd(a)?.null_space(threshold))
}

/// Determinant via LU with partial pivoting.
pub fn determinant<T: Scalar>(a: &ComplexMatrix<T>) -> Result<C<T>> {
    a.require_square()?;
    let d = a.nrows();
    let mut m: Vec<C<T>> = a.data().to_vec();
    let mut det = crate::scalar::cone::<T>();
    for col in 0..d {
        let mut piv = col;
        let mut piv_mag = m[col * d + col].norm_sqr();
        for r in (col + 1)..d {
            let mag = m[r * d + col].norm_sqr();
            if mag > piv_mag {
                piv_mag = mag;
                piv = r;
            }
        }
        if piv_mag == T::zero() {
            return Ok(czero());
        }
        if piv != col {
            for j in 0..d {
                m.swap(col * d + j, piv * d + j);
            }
            det = -det;
        }
        let pivot = m[col * d + col];
        det = det * pivot;
        for r in (col + 1)..d {
            let f = m[r * d + col] / pivot;
            if f.re == T::zero() && f.im == T::zero() {
                continue;
            }
            for j in col..d {
                let x = m[col * d + j];
                m[r * d + j] = m[r * d + j] - f * x;
            }
        }
    }
    Ok(det)
}
