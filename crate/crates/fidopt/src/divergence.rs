//! Classical and quantum fidelity, trace distances, measurement-induced
//! quantities, and the Fuchs-van de Graaf bounds.

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, svd};
use crate::quantum::{measure, DensityOperator, OutcomeDistribution, Povm};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Classical fidelity: square of the Bhattacharyya coefficient.
pub fn classical_fidelity<T: Scalar>(
    p: &OutcomeDistribution<T>,
    q: &OutcomeDistribution<T>,
) -> Result<T> {
    let bc = bhattacharyya(p, q)?;
    Ok((bc * bc).min(T::one()))
}

/// Bhattacharyya coefficient sum_m sqrt(p_m q_m); distributions must carry
/// the same label set.
pub fn bhattacharyya<T: Scalar>(
    p: &OutcomeDistribution<T>,
    q: &OutcomeDistribution<T>,
) -> Result<T> {
    let pairs = match_labels(p, q)?;
    Ok(pairs
        .into_iter()
        .map(|(pm, qm)| (pm.max(T::zero()) * qm.max(T::zero())).sqrt())
        .fold(T::zero(), |a, b| a + b))
}

/// Classical trace distance (total variation): half the L1 distance.
pub fn classical_trace_distance<T: Scalar>(
    p: &OutcomeDistribution<T>,
    q: &OutcomeDistribution<T>,
) -> Result<T> {
    let pairs = match_labels(p, q)?;
    let half = T::from_f64_lossy(0.5);
    Ok(pairs
        .into_iter()
        .map(|(pm, qm)| (pm - qm).abs())
        .fold(T::zero(), |a, b| a + b)
        * half)
}

fn match_labels<T: Scalar>(
    p: &OutcomeDistribution<T>,
    q: &OutcomeDistribution<T>,
) -> Result<Vec<(T, T)>> {
    if p.probabilities.len() != q.probabilities.len() {
        return Err(Error::LabelMismatch);
    }
    let aligned = p
        .probabilities
        .iter()
        .zip(&q.probabilities)
        .all(|((lp, _), (lq, _))| lp == lq);
    if aligned {
        return Ok(p.values().zip(q.values()).collect());
    }
    let qmap: BTreeMap<&str, T> = q
        .probabilities
        .iter()
        .map(|(l, v)| (l.as_str(), *v))
        .collect();
    if qmap.len() != q.probabilities.len() {
        return Err(Error::LabelMismatch);
    }
    p.probabilities
        .iter()
        .map(|(l, pv)| {
            qmap.get(l.as_str())
                .map(|qv| (*pv, *qv))
                .ok_or(Error::LabelMismatch)
        })
        .collect()
}

/// Uhlmann fidelity, computed as the squared nuclear norm of
/// sqrt(rho) sqrt(sigma); symmetric in its arguments by construction.
pub fn fidelity<T: Scalar>(rho: &DensityOperator<T>, sigma: &DensityOperator<T>) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimensions {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let product = rho.sqrt() * sigma.sqrt();
    let dec = svd(&product)?;
    let nuclear = dec.s.iter().fold(T::zero(), |a, b| a + *b);
    Ok((nuclear * nuclear).max(T::zero()).min(T::one()))
}

/// Classical fidelity of the outcome distributions induced by a POVM.
pub fn induced_fidelity<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<T> {
    classical_fidelity(&measure(povm, rho)?, &measure(povm, sigma)?)
}

/// Trace distance D = tr|rho - sigma| / 2.
pub fn trace_distance<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<T> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state dimensions {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let diff = rho.matrix() - sigma.matrix();
    let eig = hermitian_eigen(&diff)?;
    let half = T::from_f64_lossy(0.5);
    let sum = eig
        .eigenvalues
        .iter()
        .map(|w| w.abs())
        .fold(T::zero(), |a, b| a + b);
    Ok((sum * half).max(T::zero()).min(T::one()))
}

/// Total variation distance of the induced outcome distributions.
pub fn induced_trace_distance<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
) -> Result<T> {
    classical_trace_distance(&measure(povm, rho)?, &measure(povm, sigma)?)
}

/// Induced quantities of one named measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InducedEntry<T> {
    pub name: String,
    pub induced_fidelity: T,
    pub induced_trace_distance: T,
}

/// Fidelity, trace distance, the Fuchs-van de Graaf interval, and induced
/// values for any requested measurements.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DivergenceReport<T> {
    pub f: T,
    pub d: T,
    pub fvdg_lower: T,
    pub fvdg_upper: T,
    pub induced: Vec<InducedEntry<T>>,
}

pub fn divergence_report<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    measurements: &[(String, &Povm<T>)],
) -> Result<DivergenceReport<T>> {
    let f = fidelity(rho, sigma)?;
    let d = trace_distance(rho, sigma)?;
    let induced = measurements
        .iter()
        .map(|(name, povm)| {
            Ok(InducedEntry {
                name: name.clone(),
                induced_fidelity: induced_fidelity(povm, rho, sigma)?,
                induced_trace_distance: induced_trace_distance(povm, rho, sigma)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DivergenceReport {
        f,
        d,
        fvdg_lower: T::one() - f.sqrt(),
        fvdg_upper: (T::one() - f).max(T::zero()).sqrt(),
        induced,
    })
}
