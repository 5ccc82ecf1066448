//! Canonical minimal F-optimal PVMs, verification of F-optimality and
//! minimality, the uniqueness dichotomy, mixing families, and the
//! joint-support restriction for singular rho + sigma.

use crate::divergence::{fidelity, induced_fidelity};
use crate::error::{Error, Result};
use crate::gmean::geometric_mean;
use crate::matrix::{ComplexMatrix, PsdFunctions};
use crate::pencil::{
    construct_polar_unitary, parallel_check, supports_commute, ParallelCheck, PolarUnitary,
};
use crate::quantum::{commuting_povms, equivalent, simplify, DensityOperator, Povm};
use crate::scalar::{Scalar, C};
use crate::tol::ToleranceConfig;
use serde::{Deserialize, Serialize};

/// Per-element record of the parallelism test.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementCheck<T> {
    pub label: String,
    pub parallel: bool,
    /// Pencil eigenvalue kappa; `None` means the element sits in Null(rho)
    /// (eigenvalue infinity).
    pub kappa: Option<T>,
    pub residual: T,
}

/// Verdict of the F-optimality verification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimalityVerdict<T> {
    pub is_f_optimal: bool,
    pub is_minimal: bool,
    pub elements: Vec<ElementCheck<T>>,
    /// F_E - F; nonnegative up to round-off.
    pub gap: T,
    /// Structural verdict agrees with the numeric gap test at 10 * opt_tol;
    /// disagreement flags a near-degenerate instance for diagnosis.
    pub gap_consistent: bool,
}

fn element_checks<T: Scalar>(
    ops: &[(String, ComplexMatrix<T>)],
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    u: &PolarUnitary<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Vec<ElementCheck<T>>> {
    ops.iter()
        .map(|(label, e)| {
            let ParallelCheck {
                verdict,
                kappa,
                residual,
            } = parallel_check(e, rho, sigma, u, tol)?;
            Ok(ElementCheck {
                label: label.clone(),
                parallel: verdict,
                kappa,
                residual,
            })
        })
        .collect()
}

fn pairwise_merge_minimal<T: Scalar>(
    ops: &[(String, ComplexMatrix<T>)],
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    u: &PolarUnitary<T>,
    tol: &ToleranceConfig<T>,
) -> Result<bool> {
    for i in 0..ops.len() {
        for j in (i + 1)..ops.len() {
            let sum = &ops[i].1 + &ops[j].1;
            if parallel_check(&sum, rho, sigma, u, tol)?.verdict {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Verify F-optimality via the per-element parallelism criterion and decide
/// minimality by the pairwise merge test. Requires rho + sigma nonsingular;
/// use [`verify_with_restriction`] otherwise.
pub fn verify_f_optimal<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<OptimalityVerdict<T>> {
    let u = construct_polar_unitary(rho, sigma, tol)?;
    verify_f_optimal_with_unitary(povm, rho, sigma, &u, tol)
}

/// Same as [`verify_f_optimal`] but with a caller-supplied polar unitary;
/// the verdict does not depend on which valid unitary is chosen.
pub fn verify_f_optimal_with_unitary<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    u: &PolarUnitary<T>,
    tol: &ToleranceConfig<T>,
) -> Result<OptimalityVerdict<T>> {
    let elements = element_checks(povm.elements(), rho, sigma, u, tol)?;
    let is_f_optimal = elements.iter().all(|c| c.parallel);
    let simple = simplify(povm, tol)?.len() == povm.len();
    let is_minimal = if is_f_optimal && simple {
        pairwise_merge_minimal(povm.elements(), rho, sigma, u, tol)?
    } else {
        false
    };
    let gap = induced_fidelity(povm, rho, sigma)? - fidelity(rho, sigma)?;
    let ten = T::from_f64_lossy(10.0);
    let gap_consistent = is_f_optimal == (gap <= ten * tol.opt_tol);
    Ok(OptimalityVerdict {
        is_f_optimal,
        is_minimal,
        elements,
        gap,
        gap_consistent,
    })
}

/// Build the canonical minimal F-optimal PVM from 1 - Pi_rho,
/// Pi_rho - Pi_{rho,sigma}, and the positive-eigenvalue eigenprojectors of
/// M(rho+, sigma); zero-rank pieces are omitted. Elements are ordered by
/// descending eigenvalue of the mean, then the support-difference piece,
/// then the null piece.
pub fn build_canonical_pvm<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch("state dimensions differ".into()));
    }
    if rho.matrix().distance(sigma.matrix()) <= tol.opt_tol {
        return Err(Error::StatesEqual);
    }
    let d = rho.dim();
    let sum = rho.matrix() + sigma.matrix();
    if PsdFunctions::new(&sum, tol)?.rank() < d {
        return Err(Error::SingularSum);
    }

    let gm = geometric_mean(&rho.pinv(), sigma.matrix(), tol)?;
    let mut ops: Vec<ComplexMatrix<T>> = gm
        .positive_clusters()
        .iter()
        .map(|c| c.projector())
        .collect();
    let half = T::from_f64_lossy(0.5);

    let mid = (rho.support_projector() - &gm.support).hermitian_part();
    if mid.trace().re > half {
        ops.push(mid);
    }
    let outer = rho.null_projector();
    if outer.trace().re > half {
        ops.push(outer);
    }
    let povm = Povm::from_operators(ops, tol)?;
    if !povm.is_pvm() {
        return Err(Error::EigensolverFailure(
            "canonical construction did not produce a PVM".into(),
        ));
    }
    Ok(povm)
}

/// Report of the five-way dichotomy classification.
#[derive(Debug, Clone)]
pub struct DichotomyReport<T> {
    /// Statement 1: the support projectors commute.
    pub weak_commutativity: bool,
    /// Statement 2: the two canonical PVMs commute.
    pub commuting_flag: bool,
    /// Statement 3: the canonical PVMs are compatible. For PVMs this is
    /// decided by the commutation criterion, so it equals `commuting_flag`.
    pub compatible_flag: bool,
    /// Statement 4: the canonical PVMs are equivalent.
    pub equivalent_flag: bool,
    /// Statement 5: M(rho,sigma) is the unique minimal F-optimal POVM,
    /// probed by merging the p = 1/2 mixture back against it.
    pub unique_minimal: bool,
    pub m_rho_sigma: Povm<T>,
    pub m_sigma_rho: Povm<T>,
    /// All five statements returned the same answer.
    pub unanimous: bool,
}

/// Evaluate the five dichotomy statements independently.
pub fn classify_dichotomy<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<DichotomyReport<T>> {
    let weak_commutativity = supports_commute(rho, sigma, tol);
    let m_rho_sigma = build_canonical_pvm(rho, sigma, tol)?;
    let m_sigma_rho = build_canonical_pvm(sigma, rho, tol)?;
    let commuting_flag = commuting_povms(&m_rho_sigma, &m_sigma_rho, tol)?;
    let compatible_flag = commuting_flag;
    let equivalent_flag = equivalent(&m_rho_sigma, &m_sigma_rho, tol)?;

    // Statement 5: the balanced mixture of the two canonical PVMs collapses
    // back onto M(rho,sigma) iff the minimal optimal POVM is unique.
    let u = construct_polar_unitary(rho, sigma, tol)?;
    let half = T::from_f64_lossy(0.5);
    let mixed = merge_same_eigenspace(
        disjoint_union(&m_rho_sigma, &m_sigma_rho, half),
        rho,
        sigma,
        &u,
        tol,
    )?;
    let unique_minimal = equivalent(&mixed, &m_rho_sigma, tol)?;

    let flags = [
        weak_commutativity,
        commuting_flag,
        compatible_flag,
        equivalent_flag,
        unique_minimal,
    ];
    let unanimous = flags.iter().all(|f| *f == flags[0]);
    Ok(DichotomyReport {
        weak_commutativity,
        commuting_flag,
        compatible_flag,
        equivalent_flag,
        unique_minimal,
        m_rho_sigma,
        m_sigma_rho,
        unanimous,
    })
}

fn disjoint_union<T: Scalar>(
    e1: &Povm<T>,
    e2: &Povm<T>,
    p: T,
) -> Vec<(String, ComplexMatrix<T>)> {
    let mut ops = Vec::new();
    if p > T::zero() {
        for (label, op) in e1.elements() {
            ops.push((format!("a.{label}"), op.scale(p)));
        }
    }
    let q = T::one() - p;
    if q > T::zero() {
        for (label, op) in e2.elements() {
            ops.push((format!("b.{label}"), op.scale(q)));
        }
    }
    ops
}

/// Merge elements supported in the same pencil eigenspace (tested through
/// parallel checks on pairwise sums) into single elements.
fn merge_same_eigenspace<T: Scalar>(
    ops: Vec<(String, ComplexMatrix<T>)>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    u: &PolarUnitary<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    let n = ops.len();
    let mut group: Vec<usize> = (0..n).collect();
    fn find(group: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while group[r] != r {
            r = group[r];
        }
        let mut c = i;
        while group[c] != r {
            let next = group[c];
            group[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if find(&mut group, i) == find(&mut group, j) {
                continue;
            }
            let sum = &ops[i].1 + &ops[j].1;
            if parallel_check(&sum, rho, sigma, u, tol)?.verdict {
                let (ri, rj) = (find(&mut group, i), find(&mut group, j));
                group[rj.max(ri)] = rj.min(ri);
            }
        }
    }
    let mut merged: Vec<(String, ComplexMatrix<T>)> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut group, i);
        match root_slot[r] {
            Some(slot) => {
                let (label, op) = &mut merged[slot];
                label.push('+');
                label.push_str(&ops[i].0);
                *op = &*op + &ops[i].1;
            }
            None => {
                root_slot[r] = Some(merged.len());
                merged.push(ops[i].clone());
            }
        }
    }
    Povm::new(merged, tol)
}

/// The minimal F-optimal coarse graining E(p) of p E1 ⊔ (1-p) E2.
/// Both inputs must verify F-optimal and minimal.
pub fn mixing_family<T: Scalar>(
    e1: &Povm<T>,
    e2: &Povm<T>,
    p: T,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    if p < T::zero() || p > T::one() {
        return Err(Error::Precondition(format!("p = {p} outside [0, 1]")));
    }
    let u = construct_polar_unitary(rho, sigma, tol)?;
    for (name, e) in [("E1", e1), ("E2", e2)] {
        let v = verify_f_optimal_with_unitary(e, rho, sigma, &u, tol)?;
        if !(v.is_f_optimal && v.is_minimal) {
            return Err(Error::Precondition(format!(
                "{name} is not minimal F-optimal (optimal: {}, minimal: {})",
                v.is_f_optimal, v.is_minimal
            )));
        }
    }
    merge_same_eigenspace(disjoint_union(e1, e2, p), rho, sigma, &u, tol)
}

/// Restriction of the discrimination problem to supp(rho + sigma).
#[derive(Debug, Clone)]
pub struct JointSupportRestriction<T> {
    /// d x k isometry whose columns span supp(rho + sigma).
    pub basis: ComplexMatrix<T>,
    /// Projector onto Null(rho + sigma) (Gamma_0 in the extension family).
    pub gamma0: ComplexMatrix<T>,
    /// Restricted states on the k-dimensional space.
    pub rho: DensityOperator<T>,
    pub sigma: DensityOperator<T>,
    pub full_dim: usize,
}

impl<T: Scalar> JointSupportRestriction<T> {
    pub fn restricted_dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_trivial(&self) -> bool {
        self.restricted_dim() == self.full_dim
    }

    /// Compress a full-space operator: Q^dag E Q.
    pub fn restrict_operator(&self, e: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &(&self.basis.adjoint() * e) * &self.basis
    }

    /// Lift a restricted operator back: Q E Q^dag.
    pub fn lift_operator(&self, e: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        &(&self.basis * e) * &self.basis.adjoint()
    }

    /// Restrict a POVM elementwise; the result is a POVM on the joint
    /// support.
    pub fn restrict_povm(&self, povm: &Povm<T>, tol: &ToleranceConfig<T>) -> Result<Povm<T>> {
        Povm::new(
            povm.elements()
                .iter()
                .map(|(label, e)| (label.clone(), self.restrict_operator(e)))
                .collect(),
            tol,
        )
    }

    /// Extend a minimal F-optimal POVM C on the joint support to the family
    /// member {C_j + a_j Gamma_0} for a probability weight vector `a`.
    pub fn extend_minimal(
        &self,
        c: &Povm<T>,
        weights: &[T],
        tol: &ToleranceConfig<T>,
    ) -> Result<Povm<T>> {
        if weights.len() != c.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} weights for {} elements",
                weights.len(),
                c.len()
            )));
        }
        let wsum = weights.iter().fold(T::zero(), |a, b| a + *b);
        let lim = T::from_f64_lossy(1e-9);
        if weights.iter().any(|w| *w < -lim) || (wsum - T::one()).abs() > lim {
            return Err(Error::Precondition(
                "weights must form a probability distribution".into(),
            ));
        }
        Povm::new(
            c.elements()
                .iter()
                .zip(weights)
                .map(|((label, e), w)| {
                    (label.clone(), &self.lift_operator(e) + &self.gamma0.scale(*w))
                })
                .collect(),
            tol,
        )
    }
}

/// Project a POVM onto supp(rho + sigma) and re-express everything on the
/// restricted space; Gamma_0 = 1 - Pi is recorded for re-extension.
pub fn restrict_to_joint_support<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<(Povm<T>, JointSupportRestriction<T>)> {
    let restriction = joint_support_restriction(rho, sigma, tol)?;
    let restricted = restriction.restrict_povm(povm, tol)?;
    Ok((restricted, restriction))
}

/// Build the joint-support restriction data for a pair of states.
pub fn joint_support_restriction<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<JointSupportRestriction<T>> {
    let d = rho.dim();
    let sum = rho.matrix() + sigma.matrix();
    let f = PsdFunctions::new(&sum, tol)?;
    let basis = f.support_basis();
    let gamma0 = f.null_projector();
    let to_state = |m: &ComplexMatrix<T>| -> Result<DensityOperator<T>> {
        DensityOperator::new((&(&basis.adjoint() * m) * &basis).hermitian_part(), tol)
    };
    Ok(JointSupportRestriction {
        rho: to_state(rho.matrix())?,
        sigma: to_state(sigma.matrix())?,
        basis,
        gamma0,
        full_dim: d,
    })
}

/// Verify F-optimality for a pair whose sum may be singular: restrict first,
/// verify on the restriction, and decide minimality from full-space
/// simplicity plus restricted pairwise merges.
pub fn verify_with_restriction<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<OptimalityVerdict<T>> {
    let restriction = joint_support_restriction(rho, sigma, tol)?;
    if restriction.is_trivial() {
        return verify_f_optimal(povm, rho, sigma, tol);
    }
    let u = construct_polar_unitary(&restriction.rho, &restriction.sigma, tol)?;
    let restricted_ops: Vec<(String, ComplexMatrix<T>)> = povm
        .elements()
        .iter()
        .map(|(label, e)| (label.clone(), restriction.restrict_operator(e)))
        .collect();
    let elements = element_checks(&restricted_ops, &restriction.rho, &restriction.sigma, &u, tol)?;
    let is_f_optimal = elements.iter().all(|c| c.parallel);
    let simple = simplify(povm, tol)?.len() == povm.len();
    let is_minimal = if is_f_optimal && simple {
        pairwise_merge_minimal(&restricted_ops, &restriction.rho, &restriction.sigma, &u, tol)?
    } else {
        false
    };
    let gap = induced_fidelity(povm, rho, sigma)? - fidelity(rho, sigma)?;
    let ten = T::from_f64_lossy(10.0);
    let gap_consistent = is_f_optimal == (gap <= ten * tol.opt_tol);
    Ok(OptimalityVerdict {
        is_f_optimal,
        is_minimal,
        elements,
        gap,
        gap_consistent,
    })
}

/// Split an element of a POVM into two pieces inside its own support by a
/// random-free deterministic rule; used to construct refinements in tests.
pub fn split_element<T: Scalar>(
    povm: &Povm<T>,
    index: usize,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    let (label, e) = &povm.elements()[index];
    let f = PsdFunctions::new(e, tol)?;
    let rank = f.rank();
    let mut ops: Vec<(String, ComplexMatrix<T>)> = Vec::new();
    let (part_a, part_b) = if rank >= 2 {
        // Split along the spectral decomposition of the element.
        let basis = f.support_basis();
        let first: Vec<C<T>> = basis.column(0);
        let pa = ComplexMatrix::projector_onto(&first);
        let pa_e = (&(&pa * e) * &pa).hermitian_part();
        ((e - &pa_e).hermitian_part(), pa_e)
    } else {
        // Rank-1 elements only admit proportional splits.
        let t = T::from_f64_lossy(0.3);
        (e.scale(T::one() - t), e.scale(t))
    };
    for (i, (l, op)) in povm.elements().iter().enumerate() {
        if i == index {
            ops.push((format!("{label}.a"), part_a.clone()));
            ops.push((format!("{label}.b"), part_b.clone()));
        } else {
            ops.push((l.clone(), op.clone()));
        }
    }
    Povm::new(ops, tol)
}
