//! Specializations for a pure sigma: the simplified pencil
//! (Pi_rho sigma, Pi_rho), the Bloch-arc characterization for qubit pairs,
//! and the reduction of the pure-mixed problem to two dimensions.

use crate::error::{Error, Result};
use crate::gmean::geometric_mean;
use crate::matrix::{psd_sqrt, svd, ComplexMatrix, PsdFunctions};
use crate::optimal::OptimalityVerdict;
use crate::pencil::{solve_pencil, PencilEigensystem};
use crate::quantum::{simplify, DensityOperator, Povm};
use crate::scalar::{cr, Scalar, C};
use crate::tol::ToleranceConfig;
use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// Point on (or in) the Bloch sphere; serialized as [x, y, z].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochPoint<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar + Serialize> Serialize for BlochPoint<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y, self.z].serialize(s)
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for BlochPoint<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, z] = <[T; 3]>::deserialize(d)?;
        Ok(Self { x, y, z })
    }
}

impl<T: Scalar> BlochPoint<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    pub fn antipode(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Bloch coordinates of a qubit density operator: (tr(rho X), tr(rho Y),
/// tr(rho Z)). Unit norm iff the state is pure.
pub fn state_to_bloch<T: Scalar>(rho: &DensityOperator<T>) -> Result<BlochPoint<T>> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "Bloch map needs dimension 2, got {}",
            rho.dim()
        )));
    }
    let m = rho.matrix();
    let two = T::from_f64_lossy(2.0);
    Ok(BlochPoint {
        x: two * m[(0, 1)].re,
        y: -two * m[(0, 1)].im,
        z: m[(0, 0)].re - m[(1, 1)].re,
    })
}

/// Pure qubit state (1 + p . sigma) / 2 from a unit Bloch vector.
pub fn bloch_to_state<T: Scalar>(
    p: &BlochPoint<T>,
    tol: &ToleranceConfig<T>,
) -> Result<DensityOperator<T>> {
    let lim = T::from_f64_lossy(1e-10).max(T::epsilon() * T::from_f64_lossy(100.0));
    if (p.norm() - T::one()).abs() > lim {
        return Err(Error::Precondition(format!(
            "Bloch vector has norm {}, expected 1",
            p.norm()
        )));
    }
    let half = T::from_f64_lossy(0.5);
    let m = ComplexMatrix::from_rows(vec![
        vec![cr(T::one() + p.z), C::new(p.x, -p.y)],
        vec![C::new(p.x, p.y), cr(T::one() - p.z)],
    ])?
    .scale(half);
    DensityOperator::new(m, tol)
}

/// Rank-one operator w (1 + p . sigma) / 2 for an arc POVM element.
fn bloch_projector<T: Scalar>(p: &BlochPoint<T>) -> ComplexMatrix<T> {
    let half = T::from_f64_lossy(0.5);
    ComplexMatrix::from_rows(vec![
        vec![cr(T::one() + p.z), C::new(p.x, -p.y)],
        vec![C::new(p.x, p.y), cr(T::one() - p.z)],
    ])
    .expect("2x2 shape")
    .scale(half)
}

/// The major arc N -> A -> B -> M on the great circle through the two state
/// points A, B and their antipodes M, N.
#[derive(Debug, Clone)]
pub struct ArcSpec<T> {
    pub a: BlochPoint<T>,
    pub b: BlochPoint<T>,
    pub m: BlochPoint<T>,
    pub n: BlochPoint<T>,
    pub normal: BlochPoint<T>,
    /// Angle of B in the (A, normal x A) frame; in (0, pi) by construction.
    pub theta_b: T,
}

impl<T: Scalar> ArcSpec<T> {
    pub fn new(a: BlochPoint<T>, b: BlochPoint<T>) -> Result<Self> {
        let lim = T::from_f64_lossy(1e-8);
        if (a.norm() - T::one()).abs() > lim || (b.norm() - T::one()).abs() > lim {
            return Err(Error::Precondition("arc endpoints must be unit".into()));
        }
        let cross = a.cross(&b);
        if cross.norm() <= lim {
            return Err(Error::Precondition(
                "degenerate arc: states coincide or are antipodal".into(),
            ));
        }
        let normal = cross.normalized();
        let e2 = normal.cross(&a);
        let theta_b = b.dot(&e2).atan2(b.dot(&a));
        Ok(Self {
            m: a.antipode(),
            n: b.antipode(),
            a,
            b,
            normal,
            theta_b,
        })
    }

    pub fn from_states(
        rho: &DensityOperator<T>,
        sigma: &DensityOperator<T>,
    ) -> Result<Self> {
        Self::new(state_to_bloch(rho)?, state_to_bloch(sigma)?)
    }

    /// In-plane angle of a point, measured from A toward B.
    pub fn angle_of(&self, p: &BlochPoint<T>) -> T {
        let e2 = self.normal.cross(&self.a);
        p.dot(&e2).atan2(p.dot(&self.a))
    }
}

/// Membership in the closed major arc N -> A -> B -> M, with `tol` bounding
/// both the off-plane distance and the angular slack at the endpoints.
pub fn on_major_arc<T: Scalar>(p: &BlochPoint<T>, arc: &ArcSpec<T>, tol: T) -> bool {
    if (p.norm() - T::one()).abs() > tol {
        return false;
    }
    if p.dot(&arc.normal).abs() > tol {
        return false;
    }
    let pi = T::from_f64_lossy(std::f64::consts::PI);
    let phi = arc.angle_of(p);
    // The arc spans angles [theta_b - pi, pi]; the wrap point -pi is the
    // same physical point as +pi (= M).
    phi >= arc.theta_b - pi - tol || phi <= -pi + tol
}

/// Build the POVM {w_i |p_i><p_i|} from arc points by solving the
/// completeness system (sum of weights 2, weighted points summing to zero)
/// in least squares with a nonnegativity check.
pub fn arc_povm<T: Scalar>(
    points: &[BlochPoint<T>],
    arc: &ArcSpec<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    let k = points.len();
    if k < 2 {
        return Err(Error::Precondition("need at least two arc points".into()));
    }
    let membership = tol.opt_tol * T::from_f64_lossy(1e3);
    for (i, p) in points.iter().enumerate() {
        if !on_major_arc(p, arc, membership) {
            return Err(Error::Precondition(format!(
                "point {i} is not on the major arc"
            )));
        }
        for q in &points[..i] {
            if (p.dot(q) - T::one()).abs() <= tol.opt_tol {
                return Err(Error::Precondition(format!("point {i} duplicated")));
            }
        }
    }
    let mut sys = ComplexMatrix::zeros(4, k);
    for (j, p) in points.iter().enumerate() {
        sys[(0, j)] = cr(T::one());
        sys[(1, j)] = cr(p.x);
        sys[(2, j)] = cr(p.y);
        sys[(3, j)] = cr(p.z);
    }
    let rhs = [T::from_f64_lossy(2.0), T::zero(), T::zero(), T::zero()];
    let pinv = crate::matrix::pseudo_inverse(&sys, tol)?;
    let weights: Vec<T> = (0..k)
        .map(|i| {
            (0..4)
                .map(|r| (pinv[(i, r)] * cr(rhs[r])).re)
                .fold(T::zero(), |a, b| a + b)
        })
        .collect();
    let mut residual = T::zero();
    for r in 0..4 {
        let got = (0..k)
            .map(|j| sys[(r, j)].re * weights[j])
            .fold(T::zero(), |a, b| a + b);
        residual = residual + (got - rhs[r]) * (got - rhs[r]);
    }
    let residual = residual.sqrt();
    if residual > tol.opt_tol {
        return Err(Error::Infeasible(format!(
            "completeness system residual {residual:e}"
        )));
    }
    if let Some(w) = weights.iter().find(|w| **w < -tol.opt_tol) {
        return Err(Error::Infeasible(format!("negative weight {w:e}")));
    }
    Povm::new(
        points
            .iter()
            .zip(&weights)
            .enumerate()
            .map(|(i, (p, w))| {
                (
                    format!("E{i}"),
                    bloch_projector(p).scale(w.max(T::zero())),
                )
            })
            .collect(),
        tol,
    )
}

fn require_pure_overlapping<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<()> {
    if !sigma.is_pure() {
        return Err(Error::NotPure(sigma.rank()));
    }
    let prod = rho.matrix() * sigma.matrix();
    if prod.frobenius_norm() <= tol.opt_tol {
        return Err(Error::OrthogonalSupports);
    }
    Ok(())
}

/// Eigenstructure of the pencil (Pi_rho sigma, Pi_rho) for a pure sigma.
/// The eigenspaces at 0 and 1 are Null(sigma) and supp(sigma); the infinite
/// eigenspace is Null(rho).
pub fn pure_pencil_eigensystem<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<PencilEigensystem<T>> {
    require_pure_overlapping(rho, sigma, tol)?;
    let k = rho.support_projector() * sigma.matrix();
    let l = rho.support_projector().clone();
    let f = rho.matrix().re_trace_product(sigma.matrix()).max(T::zero());
    let sqrt_f = f.sqrt();
    let mut candidates = vec![T::zero(), T::one()];
    // Geometric-mean eigenvalues transfer to this pencil scaled by sqrt(F).
    let gm = geometric_mean(&rho.pinv(), sigma.matrix(), tol)?;
    for c in gm.positive_clusters() {
        candidates.push(c.eigenvalue * sqrt_f);
    }
    solve_pencil(&k, &l, &candidates, rho.null_basis(), tol)
}

/// Projector onto the eigenspace of (Pi_rho sigma, Pi_rho) with the given
/// eigenvalue (null-space projector of K - lambda L).
pub fn pure_pencil_eigenprojector<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    lambda: T,
    tol: &ToleranceConfig<T>,
) -> Result<ComplexMatrix<T>> {
    let k = rho.support_projector() * sigma.matrix();
    let l = rho.support_projector();
    let shifted = &k - &l.scale(lambda);
    let dec = svd(&shifted)?;
    let cut = tol.opt_tol * (T::one() + shifted.frobenius_norm());
    let basis = dec.null_space(cut);
    Ok(&basis * &basis.adjoint())
}

/// Parallelism test against the pure-state pencil: Pi_rho sigma sqrt(E) and
/// Pi_rho sqrt(E) must be parallel with a nonnegative ratio.
pub fn pure_parallel_check<T: Scalar>(
    e: &ComplexMatrix<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<crate::pencil::ParallelCheck<T>> {
    let sqrt_e = psd_sqrt(e, tol)?;
    let scale = sqrt_e.frobenius_norm();
    if scale <= tol.psd_clip {
        return Ok(crate::pencil::ParallelCheck {
            verdict: true,
            kappa: None,
            residual: T::zero(),
        });
    }
    let a = rho.support_projector() * &sqrt_e;
    let b = &(rho.support_projector() * sigma.matrix()) * &sqrt_e;
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    if na <= tol.opt_tol * scale {
        return Ok(crate::pencil::ParallelCheck {
            verdict: true,
            kappa: None,
            residual: na / scale,
        });
    }
    let kappa_c = a.inner(&b) / cr(a.inner(&a).re);
    let kappa = kappa_c.re;
    let residual = (&b - &a.scale(kappa)).frobenius_norm() / na.max(nb);
    let verdict = kappa >= -tol.opt_tol && residual <= tol.opt_tol;
    Ok(crate::pencil::ParallelCheck {
        verdict,
        kappa: Some(kappa.max(T::zero())),
        residual,
    })
}

/// F-optimality verdict through the pure-state criterion; agrees with the
/// general pencil verdict whenever sigma is pure and rho sigma != 0.
pub fn verify_f_optimal_pure<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<OptimalityVerdict<T>> {
    require_pure_overlapping(rho, sigma, tol)?;
    let mut elements = Vec::with_capacity(povm.len());
    for (label, e) in povm.elements() {
        let c = pure_parallel_check(e, rho, sigma, tol)?;
        elements.push(crate::optimal::ElementCheck {
            label: label.clone(),
            parallel: c.verdict,
            kappa: c.kappa,
            residual: c.residual,
        });
    }
    let is_f_optimal = elements.iter().all(|c| c.parallel);
    let simple = simplify(povm, tol)?.len() == povm.len();
    let is_minimal = if is_f_optimal && simple {
        let mut minimal = true;
        'outer: for i in 0..povm.len() {
            for j in (i + 1)..povm.len() {
                let sum = &povm.elements()[i].1 + &povm.elements()[j].1;
                if pure_parallel_check(&sum, rho, sigma, tol)?.verdict {
                    minimal = false;
                    break 'outer;
                }
            }
        }
        minimal
    } else {
        false
    };
    let gap = crate::divergence::induced_fidelity(povm, rho, sigma)?
        - crate::divergence::fidelity(rho, sigma)?;
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

/// Reduction of the (mixed rho, pure sigma) problem to the two-dimensional
/// subspace Null(rho) + supp(sigma).
#[derive(Debug, Clone)]
pub struct PureMixedReduction<T> {
    /// d x 2 isometry onto Null(rho) + supp(sigma).
    pub basis: ComplexMatrix<T>,
    /// Projector Pi_2 onto that subspace.
    pub pi2: ComplexMatrix<T>,
    /// 1 - Pi_2.
    pub complement: ComplexMatrix<T>,
    /// The pure surrogate Pi_2 Pi_rho Pi_2 on the full space.
    pub varrho: DensityOperator<T>,
    /// Reduced pair on the two-dimensional space.
    pub rho2: DensityOperator<T>,
    pub sigma2: DensityOperator<T>,
}

impl<T: Scalar> PureMixedReduction<T> {
    /// Map a minimal F-optimal POVM for the reduced pair to one for the
    /// original pair: lift, adjoin 1 - Pi_2, and merge the elements
    /// supported in Null(sigma).
    pub fn lift_minimal(
        &self,
        povm2: &Povm<T>,
        sigma: &DensityOperator<T>,
        tol: &ToleranceConfig<T>,
    ) -> Result<Povm<T>> {
        let d = self.basis.nrows();
        let mut lifted: Vec<(String, ComplexMatrix<T>)> = povm2
            .elements()
            .iter()
            .map(|(label, e)| {
                (
                    label.clone(),
                    &(&self.basis * e) * &self.basis.adjoint(),
                )
            })
            .collect();
        if self.complement.trace().re > T::from_f64_lossy(0.5) {
            lifted.push(("comp".into(), self.complement.clone()));
        }
        // Merge everything supported in Null(sigma) into one element.
        let mut null_group: Option<(String, ComplexMatrix<T>)> = None;
        let mut rest: Vec<(String, ComplexMatrix<T>)> = Vec::new();
        for (label, op) in lifted {
            let in_null = (sigma.matrix() * &op).frobenius_norm()
                <= tol.opt_tol * (T::one() + op.frobenius_norm());
            if in_null {
                match &mut null_group {
                    Some((l, acc)) => {
                        l.push('+');
                        l.push_str(&label);
                        *acc = &*acc + &op;
                    }
                    None => null_group = Some((label, op)),
                }
            } else {
                rest.push((label, op));
            }
        }
        if let Some(g) = null_group {
            rest.push(g);
        }
        let _ = d;
        Povm::new(rest, tol)
    }

    /// Map a POVM for the original pair to one for the reduced pair:
    /// compress by Pi_2 and drop zero elements.
    pub fn restrict_povm(&self, povm: &Povm<T>, tol: &ToleranceConfig<T>) -> Result<Povm<T>> {
        let elements: Vec<(String, ComplexMatrix<T>)> = povm
            .elements()
            .iter()
            .map(|(label, e)| {
                (
                    label.clone(),
                    (&(&self.basis.adjoint() * e) * &self.basis).hermitian_part(),
                )
            })
            .filter(|(_, e)| e.frobenius_norm() > tol.opt_tol)
            .collect();
        Povm::new(elements, tol)
    }
}

/// Build the reduction for a pure sigma that does not commute with Pi_rho
/// (so Null(rho) is one-dimensional and the subspace has dimension two).
pub fn reduce_pure_mixed<T: Scalar>(
    rho: &DensityOperator<T>,
    sigma: &DensityOperator<T>,
    tol: &ToleranceConfig<T>,
) -> Result<PureMixedReduction<T>> {
    if !sigma.is_pure() {
        return Err(Error::NotPure(sigma.rank()));
    }
    if rho.rank() < 2 {
        return Err(Error::Precondition("rank(rho) must be at least 2".into()));
    }
    let comm = sigma.matrix().commutator_norm(rho.support_projector());
    if comm <= tol.opt_tol * T::from_f64_lossy(1e3) {
        return Err(Error::Precondition(
            "sigma commutes with Pi_rho; the reduction does not apply".into(),
        ));
    }
    let d = rho.dim();
    let sum = rho.matrix() + sigma.matrix();
    if PsdFunctions::new(&sum, tol)?.rank() < d {
        return Err(Error::SingularSum);
    }
    let null_rho = rho.null_basis();
    if null_rho.ncols() != 1 {
        return Err(Error::Precondition(format!(
            "Null(rho) has dimension {}, expected 1",
            null_rho.ncols()
        )));
    }
    let n = null_rho.column(0);
    let phi = sigma.support_basis().column(0);
    // Orthonormalize phi against n to span Null(rho) + supp(sigma).
    let ip: C<T> = n.iter().zip(&phi).map(|(a, b)| a.conj() * *b).sum();
    let mut q2: Vec<C<T>> = phi
        .iter()
        .zip(&n)
        .map(|(p, ni)| *p - ip * *ni)
        .collect();
    let norm: T = q2.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
    for z in q2.iter_mut() {
        *z = *z / cr(norm);
    }
    let basis = ComplexMatrix::from_columns(d, &[n, q2]);
    let pi2 = &basis * &basis.adjoint();
    let complement = &ComplexMatrix::identity(d) - &pi2;
    let varrho_m = (&(&pi2 * rho.support_projector()) * &pi2).hermitian_part();
    let varrho = DensityOperator::new(varrho_m, tol)?;
    let reduce = |m: &ComplexMatrix<T>| (&(&basis.adjoint() * m) * &basis).hermitian_part();
    let rho2 = DensityOperator::new(reduce(varrho.matrix()), tol)?;
    let sigma2 = DensityOperator::new(reduce(sigma.matrix()), tol)?;
    Ok(PureMixedReduction {
        basis,
        pi2,
        complement,
        varrho,
        rho2,
        sigma2,
    })
}
