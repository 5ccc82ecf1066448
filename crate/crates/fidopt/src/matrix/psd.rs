//! Spectral functions of positive semidefinite operators with one shared
//! rank-cut policy: square root, pseudo-inverse, support and null projectors.

use super::eigen::{hermitian_eigen, HermitianEigensystem};
use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tol::ToleranceConfig;

/// Validated PSD operator together with its spectral data and rank cut.
#[derive(Debug, Clone)]
pub struct PsdFunctions<T> {
    pub eig: HermitianEigensystem<T>,
    cut: T,
}

impl<T: Scalar> PsdFunctions<T> {
    /// Validate Hermiticity and positivity (up to `psd_clip`), then cache the
    /// eigendecomposition. Negative eigenvalues within the clip are treated
    /// as zero; anything below it is an error.
    pub fn new(a: &ComplexMatrix<T>, tol: &ToleranceConfig<T>) -> Result<Self> {
        a.require_square()?;
        a.validate_finite()?;
        let scale = T::one() + a.frobenius_norm();
        let asym = a.hermitian_asymmetry();
        if asym > tol.psd_clip * scale {
            return Err(Error::NotHermitian {
                asymmetry: asym.to_f64().unwrap_or(f64::NAN),
                limit: (tol.psd_clip * scale).to_f64().unwrap_or(f64::NAN),
            });
        }
        let eig = hermitian_eigen(a)?;
        let radius = eig.spectral_radius();
        let clip = tol.psd_clip * (T::one() + radius);
        if let Some(min) = eig.eigenvalues.first() {
            if *min < -clip {
                return Err(Error::NotPsd {
                    min_eig: min.to_f64().unwrap_or(f64::NAN),
                    clip: clip.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        let cut = tol.rank_threshold(eig.dim(), radius);
        Ok(Self { eig, cut })
    }

    pub fn rank(&self) -> usize {
        self.eig.eigenvalues.iter().filter(|w| **w > self.cut).count()
    }

    pub fn rank_cut(&self) -> T {
        self.cut
    }

    fn spectral(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let cut = self.cut;
        self.eig
            .spectral_fn(|w| if w > cut { f(w) } else { T::zero() })
    }

    pub fn sqrt(&self) -> ComplexMatrix<T> {
        self.spectral(|w| w.sqrt())
    }

    pub fn pinv(&self) -> ComplexMatrix<T> {
        self.spectral(|w| T::one() / w)
    }

    pub fn pinv_sqrt(&self) -> ComplexMatrix<T> {
        self.spectral(|w| T::one() / w.sqrt())
    }

    pub fn support_projector(&self) -> ComplexMatrix<T> {
        self.spectral(|_| T::one())
    }

    pub fn null_projector(&self) -> ComplexMatrix<T> {
        let d = self.eig.dim();
        &ComplexMatrix::identity(d) - &self.support_projector()
    }

    /// Orthonormal basis of the support (eigenvalues above the cut).
    pub fn support_basis(&self) -> ComplexMatrix<T> {
        let cut = self.cut;
        self.eig.select_columns(|w| w > cut)
    }

    /// Orthonormal basis of the null space.
    pub fn null_basis(&self) -> ComplexMatrix<T> {
        let cut = self.cut;
        self.eig.select_columns(|w| w <= cut)
    }
}

/// PSD square root: `S` with `S S = A` up to round-off.
pub fn psd_sqrt<T: Scalar>(a: &ComplexMatrix<T>, tol: &ToleranceConfig<T>) -> Result<ComplexMatrix<T>> {
    Ok(PsdFunctions::new(a, tol)?.sqrt())
}

/// Moore-Penrose inverse of a PSD operator via its spectrum.
pub fn psd_pinv<T: Scalar>(a: &ComplexMatrix<T>, tol: &ToleranceConfig<T>) -> Result<ComplexMatrix<T>> {
    Ok(PsdFunctions::new(a, tol)?.pinv())
}

/// Square root of the Moore-Penrose inverse of a PSD operator.
pub fn psd_pinv_sqrt<T: Scalar>(
    a: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<ComplexMatrix<T>> {
    Ok(PsdFunctions::new(a, tol)?.pinv_sqrt())
}

/// Projector onto the support (range) of a PSD operator.
pub fn support_projector<T: Scalar>(
    a: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<ComplexMatrix<T>> {
    Ok(PsdFunctions::new(a, tol)?.support_projector())
}
