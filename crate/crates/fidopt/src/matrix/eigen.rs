//! Hermitian eigendecomposition via cyclic Jacobi rotations, plus
//! eigenvalue clustering into degenerate eigenspaces.

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cr, czero, Scalar, C};
use crate::tol::ToleranceConfig;

/// Eigendecomposition of a Hermitian matrix: `A = V diag(w) V^dag` with
/// `w` sorted ascending and `V` unitary.
#[derive(Debug, Clone)]
pub struct HermitianEigensystem<T> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Scalar> HermitianEigensystem<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Largest |eigenvalue|.
    pub fn spectral_radius(&self) -> T {
        self.eigenvalues
            .iter()
            .map(|w| w.abs())
            .fold(T::zero(), T::max)
    }

    /// Assemble `sum_i f(w_i) v_i v_i^dag`.
    pub fn spectral_fn(&self, mut f: impl FnMut(T) -> T) -> ComplexMatrix<T> {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, w) in self.eigenvalues.iter().enumerate() {
            let fw = f(*w);
            if fw == T::zero() {
                continue;
            }
            for i in 0..d {
                let vi = self.eigenvectors[(i, k)] * cr(fw);
                for j in 0..d {
                    out[(i, j)] = out[(i, j)] + vi * self.eigenvectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.spectral_fn(|w| w)
    }

    /// Columns whose eigenvalue satisfies the predicate.
    pub fn select_columns(&self, mut pred: impl FnMut(T) -> bool) -> ComplexMatrix<T> {
        let cols: Vec<Vec<C<T>>> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, w)| pred(**w))
            .map(|(k, _)| self.eigenvectors.column(k))
            .collect();
        ComplexMatrix::from_columns(self.dim(), &cols)
    }
}

/// Eigendecompose the Hermitian part of `a`.
///
/// The input is symmetrized first; callers that must reject non-Hermitian
/// input check `hermitian_asymmetry` themselves.
pub fn hermitian_eigen<T: Scalar>(a: &ComplexMatrix<T>) -> Result<HermitianEigensystem<T>> {
    a.require_square()?;
    a.validate_finite()?;
    let d = a.nrows();
    if d == 0 {
        return Ok(HermitianEigensystem {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let mut m: Vec<C<T>> = a.hermitian_part().data().to_vec();
    let mut v: Vec<C<T>> = ComplexMatrix::identity(d).data().to_vec();
    let scale = frob(&m);
    if scale > T::zero() {
        jacobi_sweeps(&mut m, &mut v, d, scale)?;
    }

    // Sort ascending; stable in the original column index for determinism.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        m[i * d + i]
            .re
            .partial_cmp(&m[j * d + j].re)
            .unwrap()
            .then(i.cmp(&j))
    });

    let eigenvalues: Vec<T> = order.iter().map(|&k| m[k * d + k].re).collect();
    let mut eigenvectors = ComplexMatrix::zeros(d, d);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col: Vec<C<T>> = (0..d).map(|i| v[i * d + old_col]).collect();
        canonical_phase(&mut col);
        eigenvectors.set_column(new_col, &col);
    }

    Ok(HermitianEigensystem {
        eigenvalues,
        eigenvectors,
    })
}

fn frob<T: Scalar>(m: &[C<T>]) -> T {
    m.iter()
        .map(|z| z.norm_sqr())
        .fold(T::zero(), |a, b| a + b)
        .sqrt()
}

fn off_norm<T: Scalar>(m: &[C<T>], d: usize) -> T {
    let mut s = T::zero();
    for p in 0..d {
        for q in (p + 1)..d {
            s = s + m[p * d + q].norm_sqr();
        }
    }
    (s + s).sqrt()
}

fn jacobi_sweeps<T: Scalar>(m: &mut [C<T>], v: &mut [C<T>], d: usize, scale: T) -> Result<()> {
    let conv = T::epsilon() * scale * T::from_usize_lossy(d);
    let skip = conv / (T::from_usize_lossy(d) * T::from_f64_lossy(16.0));
    let max_sweeps = 64;
    for _ in 0..max_sweeps {
        if off_norm(m, d) <= conv {
            return Ok(());
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m[p * d + q];
                let abs = apq.norm();
                if abs <= skip {
                    continue;
                }
                let phase = apq / cr(abs);
                let app = m[p * d + p].re;
                let aqq = m[q * d + q].re;
                let two = T::from_f64_lossy(2.0);
                let tau = (aqq - app) / (two * abs);
                let sign = if tau < T::zero() { -T::one() } else { T::one() };
                let t = sign / (tau.abs() + (T::one() + tau * tau).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                // G = [[e^{i phi} c, e^{i phi} s], [-s, c]] on coordinates (p, q).
                let gpp = phase * cr(c);
                let gpq = phase * cr(s);
                let gqp = -cr(s);
                let gqq = cr(c);

                // A <- A G (columns p, q).
                for k in 0..d {
                    let akp = m[k * d + p];
                    let akq = m[k * d + q];
                    m[k * d + p] = akp * gpp + akq * gqp;
                    m[k * d + q] = akp * gpq + akq * gqq;
                }
                // A <- G^dag A (rows p, q).
                for k in 0..d {
                    let apk = m[p * d + k];
                    let aqk = m[q * d + k];
                    m[p * d + k] = gpp.conj() * apk + gqp.conj() * aqk;
                    m[q * d + k] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                // Keep exact Hermitian structure.
                m[p * d + q] = czero();
                m[q * d + p] = czero();
                m[p * d + p] = cr(m[p * d + p].re);
                m[q * d + q] = cr(m[q * d + q].re);

                // V <- V G.
                for k in 0..d {
                    let vkp = v[k * d + p];
                    let vkq = v[k * d + q];
                    v[k * d + p] = vkp * gpp + vkq * gqp;
                    v[k * d + q] = vkp * gpq + vkq * gqq;
                }
            }
        }
    }
    if off_norm(m, d) <= conv * T::from_f64_lossy(1e3) {
        // Converged slightly above the target; residual is still far below
        // every tolerance in the library.
        Ok(())
    } else {
        Err(Error::EigensolverFailure(format!(
            "Jacobi did not converge in {max_sweeps} sweeps (off-norm {:e})",
            off_norm(m, d)
        )))
    }
}

/// Make the largest-magnitude component real positive (first maximum wins).
fn canonical_phase<T: Scalar>(col: &mut [C<T>]) {
    let mut best = 0;
    let mut best_mag = T::neg_infinity();
    for (i, z) in col.iter().enumerate() {
        let mag = z.norm_sqr();
        if mag > best_mag {
            best_mag = mag;
            best = i;
        }
    }
    let z = col[best];
    let mag = z.norm();
    if mag > T::zero() {
        let ph = z.conj() / cr(mag);
        for w in col.iter_mut() {
            *w = *w * ph;
        }
    }
}

/// One merged eigenspace: the cluster-mean eigenvalue and an orthonormal
/// basis of the spanned subspace.
#[derive(Debug, Clone)]
pub struct EigenCluster<T> {
    pub eigenvalue: T,
    pub basis: ComplexMatrix<T>,
}

impl<T: Scalar> EigenCluster<T> {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Orthogonal projector onto the eigenspace.
    pub fn projector(&self) -> ComplexMatrix<T> {
        &self.basis * &self.basis.adjoint()
    }
}

/// Merge eigenvalues within `cluster_gap * (1 + |w|)` of their neighbor into
/// one eigenspace. Eigenvalues must be sorted ascending (as produced by
/// [`hermitian_eigen`]).
pub fn cluster_eigenspaces<T: Scalar>(
    eig: &HermitianEigensystem<T>,
    tol: &ToleranceConfig<T>,
) -> Vec<EigenCluster<T>> {
    let d = eig.dim();
    let mut clusters = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d {
            let gap = eig.eigenvalues[end] - eig.eigenvalues[end - 1];
            if gap <= tol.cluster_gap * (T::one() + eig.eigenvalues[end].abs()) {
                end += 1;
            } else {
                break;
            }
        }
        let count = T::from_usize_lossy(end - start);
        let mean = eig.eigenvalues[start..end]
            .iter()
            .fold(T::zero(), |a, b| a + *b)
            / count;
        let cols: Vec<Vec<C<T>>> = (start..end).map(|k| eig.eigenvectors.column(k)).collect();
        clusters.push(EigenCluster {
            eigenvalue: mean,
            basis: ComplexMatrix::from_columns(d, &cols),
        });
        start = end;
    }
    clusters
}
