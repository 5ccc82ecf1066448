//! Numerical thresholds used throughout the library.
//!
//! All rank decisions, eigenvalue clustering, and optimality checks flow
//! through one [`ToleranceConfig`] so that the tolerance story is uniform.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Tolerance bundle. All fields are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig<T> {
    /// Relative rank cut per dimension: singular values below
    /// `rank_tol_factor * dim * sigma_max` are treated as zero.
    pub rank_tol_factor: T,
    /// Relative gap under which adjacent eigenvalues are merged into one
    /// eigenspace: |a - b| <= cluster_gap * (1 + |b|).
    pub cluster_gap: T,
    /// Magnitude of negative eigenvalues tolerated (and clipped to zero)
    /// in nominally PSD inputs.
    pub psd_clip: T,
    /// Tolerance for optimality verdicts, parallelism residuals, POVM
    /// element matching, and commutator checks.
    pub opt_tol: T,
}

impl<T: Scalar> Default for ToleranceConfig<T> {
    fn default() -> Self {
        // The factor leaves headroom over bare machine epsilon: kernel
        // eigenvalues of operators assembled through O(d) flop chains land a
        // decade or two above epsilon, and a square root turns anything that
        // survives the cut into sqrt(epsilon)-level pollution.
        Self {
            rank_tol_factor: T::epsilon() * T::from_f64_lossy(64.0),
            cluster_gap: T::from_f64_lossy(1e-8),
            psd_clip: T::from_f64_lossy(1e-10),
            opt_tol: T::from_f64_lossy(1e-9),
        }
    }
}

impl<T: Scalar> ToleranceConfig<T> {
    /// Tightened profile for well-conditioned exact-arithmetic fixtures.
    pub fn strict() -> Self {
        Self {
            rank_tol_factor: T::epsilon() * T::from_f64_lossy(16.0),
            cluster_gap: T::from_f64_lossy(1e-10),
            psd_clip: T::from_f64_lossy(1e-12),
            opt_tol: T::from_f64_lossy(1e-11),
        }
    }

    /// Loosened profile for noisy, externally produced inputs.
    pub fn loose() -> Self {
        let hundred = T::from_f64_lossy(100.0);
        let d = Self::default();
        Self {
            rank_tol_factor: d.rank_tol_factor * hundred,
            cluster_gap: d.cluster_gap * hundred,
            psd_clip: d.psd_clip * hundred,
            opt_tol: d.opt_tol * hundred,
        }
    }

    /// Look up a profile by name (`strict`, `default`, `loose`).
    pub fn profile(name: &str) -> Result<Self> {
        match name {
            "strict" => Ok(Self::strict()),
            "default" => Ok(Self::default()),
            "loose" => Ok(Self::loose()),
            other => Err(Error::Precondition(format!(
                "unknown tolerance profile '{other}'"
            ))),
        }
    }

    /// Validate positivity of every field.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.rank_tol_factor,
            self.cluster_gap,
            self.psd_clip,
            self.opt_tol,
        ];
        if fields.iter().all(|f| *f > T::zero() && f.is_finite()) {
            Ok(())
        } else {
            Err(Error::Precondition(
                "tolerances must be strictly positive and finite".into(),
            ))
        }
    }

    /// Absolute singular-value cut for a matrix of dimension `dim` whose
    /// largest singular value is `sigma_max`.
    pub fn rank_threshold(&self, dim: usize, sigma_max: T) -> T {
        self.rank_tol_factor * T::from_usize_lossy(dim.max(1)) * sigma_max
    }
}
