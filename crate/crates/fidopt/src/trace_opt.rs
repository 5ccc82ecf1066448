//! Trace-distance-optimal measurements: Jordan decomposition of
//! rho - sigma, the T-optimality criterion, and the minimal binary family
//! {Pi_+ + Q_0, 1 - Pi_+ - Q_0}.

use crate::divergence::{induced_trace_distance, trace_distance};
use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, ComplexMatrix, PsdFunctions};
use crate::quantum::{DensityOperator, Povm};
use crate::scalar::Scalar;
use crate::tol::ToleranceConfig;
use serde::{Deserialize, Serialize};

/// Jordan decomposition rho - sigma = Q_+ - Q_- with orthogonal positive and
/// negative parts, plus the three spectral projectors.
#[derive(Debug, Clone)]
pub struct JordanSplit<T> {
    pub q_plus: ComplexMatrix<T>,
    pub q_minus: ComplexMatrix<T>,
    pub pi_plus: ComplexMatrix<T>,
    pub pi_minus: ComplexMatrix<T>,
    pub pi_zero: ComplexMatrix<T>,
}

pub fn jordan_split<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<JordanSplit<T>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch("state dimensions differ".into()));
    }
    let diff = rho.matrix() - sigma.matrix();
    if diff.frobenius_norm() <= tol.opt_tol {
        return Err(Error::StatesEqual);
    }
    let eig = hermitian_eigen(&diff)?;
    let cut = tol.rank_threshold(rho.dim(), eig.spectral_radius());
    let q_plus = eig.spectral_fn(|w| if w > cut { w } else { T::zero() });
    let q_minus = eig.spectral_fn(|w| if w < -cut { -w } else { T::zero() });
    let pi_plus = eig.spectral_fn(|w| if w > cut { T::one() } else { T::zero() });
    let pi_minus = eig.spectral_fn(|w| if w < -cut { T::one() } else { T::zero() });
    let pi_zero = eig.spectral_fn(|w| if w.abs() <= cut { T::one() } else { T::zero() });
    Ok(JordanSplit {
        q_plus,
        q_minus,
        pi_plus,
        pi_minus,
        pi_zero,
    })
}

/// Per-element outcome of the T-optimality support test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TElementCheck<T> {
    pub label: String,
    /// Element annihilates Q_+ (supported in Null(Q_+)).
    pub kills_plus: bool,
    /// Element annihilates Q_- (supported in Null(Q_-)).
    pub kills_minus: bool,
    pub residual: T,
}

/// Verdict of the T-optimality verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TOptimalityVerdict<T> {
    pub is_t_optimal: bool,
    pub elements: Vec<TElementCheck<T>>,
    /// D - D_E; nonnegative up to round-off.
    pub gap: T,
    pub gap_consistent: bool,
}

/// T-optimal iff every element is supported in Null(Q_+) or Null(Q_-).
pub fn verify_t_optimal<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<TOptimalityVerdict<T>> {
    let split = jordan_split(rho, sigma, tol)?;
    let mut elements = Vec::with_capacity(povm.len());
    for (label, e) in povm.elements() {
        let norm = e.frobenius_norm();
        if norm <= tol.psd_clip {
            elements.push(TElementCheck {
                label: label.clone(),
                kills_plus: true,
                kills_minus: true,
                residual: T::zero(),
            });
            continue;
        }
        let rp = (&split.q_plus * e).frobenius_norm() / norm;
        let rm = (&split.q_minus * e).frobenius_norm() / norm;
        elements.push(TElementCheck {
            label: label.clone(),
            kills_plus: rp <= tol.opt_tol,
            kills_minus: rm <= tol.opt_tol,
            residual: rp.min(rm),
        });
    }
    let is_t_optimal = elements.iter().all(|c| c.kills_plus || c.kills_minus);
    let gap = trace_distance(rho, sigma)? - induced_trace_distance(povm, rho, sigma)?;
    let ten = T::from_f64_lossy(10.0);
    let gap_consistent = is_t_optimal == (gap <= ten * tol.opt_tol);
    Ok(TOptimalityVerdict {
        is_t_optimal,
        elements,
        gap,
        gap_consistent,
    })
}

/// The minimal T-optimal binary POVM {Pi_+ + Q_0, 1 - Pi_+ - Q_0} for a
/// positive Q_0 <= 1 supported in Null(rho - sigma).
pub fn minimal_t_optimal<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    q0: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    let split = jordan_split(rho, sigma, tol)?;
    let f = PsdFunctions::new(q0, tol).map_err(|e| {
        Error::Infeasible(format!("Q0 is not a valid positive operator ({e})"))
    })?;
    let top = f.eig.eigenvalues.last().copied().unwrap_or_else(T::zero);
    let clip = tol.psd_clip * (T::one() + top.abs());
    if top > T::one() + clip {
        return Err(Error::Infeasible(format!(
            "Q0 has eigenvalue {top} above 1"
        )));
    }
    let inside = &(&split.pi_zero * q0) * &split.pi_zero;
    if (q0 - &inside).frobenius_norm() > tol.psd_clip * (T::one() + q0.frobenius_norm()) {
        return Err(Error::Infeasible(
            "Q0 is not supported in Null(rho - sigma)".into(),
        ));
    }
    let first = (&split.pi_plus + q0).hermitian_part();
    let second = &ComplexMatrix::identity(rho.dim()) - &first;
    Povm::new(vec![("E0".into(), first), ("E1".into(), second)], tol)
}

/// Helstrom success probability (1 + D) / 2 for equiprobable discrimination.
pub fn helstrom_success<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<T> {
    let half = T::from_f64_lossy(0.5);
    Ok((T::one() + trace_distance(rho, sigma)?) * half)
}
