//! Operator geometric means M(A, B) = sqrt(A) sqrt(sqrt(A+) B sqrt(A+)) sqrt(A),
//! generalized to singular arguments through the Moore-Penrose inverse, and
//! the nine-way diagnostic equivalence tied to commuting support projectors.
//!
//! The main-text mean M(rho+, sigma) is obtained by calling with A = rho+.

use crate::error::Result;
use crate::matrix::{cluster_eigenspaces, ComplexMatrix, EigenCluster, PsdFunctions};
use crate::scalar::Scalar;
use crate::tol::ToleranceConfig;

/// Geometric mean together with its support data and clustered eigenspaces.
#[derive(Debug, Clone)]
pub struct GeometricMeanReport<T> {
    /// M(A, B), positive semidefinite.
    pub mean: ComplexMatrix<T>,
    /// Projector onto supp(M(A, B)), assembled from the positive clusters.
    pub support: ComplexMatrix<T>,
    /// Projector onto supp(Pi_A Pi_B Pi_A); equals `support` up to round-off.
    pub pi_ab: ComplexMatrix<T>,
    /// Clustered eigenspaces of the mean, ascending; the trailing
    /// `positive_count` clusters carry the positive eigenvalues.
    pub clusters: Vec<EigenCluster<T>>,
    /// Number of trailing clusters counted as positive. The split is pinned
    /// by the rank of Pi_A Pi_B Pi_A, which is numerically clean, rather
    /// than by an absolute cut on the mean's spectrum: round-off in the
    /// mean scales with the conditioning of A and can exceed epsilon-level
    /// thresholds on its kernel.
    pub positive_count: usize,
    /// Rank cut of the mean's own spectrum (diagnostic).
    pub rank_cut: T,
}

impl<T: Scalar> GeometricMeanReport<T> {
    /// Positive-eigenvalue clusters, descending.
    pub fn positive_clusters(&self) -> Vec<&EigenCluster<T>> {
        let start = self.clusters.len() - self.positive_count;
        self.clusters[start..].iter().rev().collect()
    }
}

/// Compute M(A, B) for PSD operators A, B.
pub fn geometric_mean<T: Scalar>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<GeometricMeanReport<T>> {
    let fa = PsdFunctions::new(a, tol)?;
    let fb = PsdFunctions::new(b, tol)?;
    let sqrt_a = fa.sqrt();
    let pinv_sqrt_a = fa.pinv_sqrt();
    let inner = (&(&pinv_sqrt_a * b) * &pinv_sqrt_a).hermitian_part();
    let inner_sqrt = PsdFunctions::new(&inner, tol)?.sqrt();
    let mean = (&(&sqrt_a * &inner_sqrt) * &sqrt_a).hermitian_part();

    let fm = PsdFunctions::new(&mean, tol)?;
    let clusters = cluster_eigenspaces(&fm.eig, tol);
    let rank_cut = fm.rank_cut();

    let pa = fa.support_projector();
    let pb = fb.support_projector();
    let sandwich = (&(&pa * &pb) * &pa).hermitian_part();
    let f_ab = PsdFunctions::new(&sandwich, tol)?;
    let pi_ab = f_ab.support_projector();
    let target = f_ab.rank();

    // Count trailing clusters until they carry exactly `target` dimensions.
    let mut positive_count = 0;
    let mut dims = 0;
    for c in clusters.iter().rev() {
        if dims == target {
            break;
        }
        dims += c.dim();
        positive_count += 1;
    }
    if dims != target {
        return Err(crate::error::Error::EigensolverFailure(format!(
            "geometric-mean spectrum does not separate from its kernel \
             (support rank {target}, nearest cluster boundary {dims})"
        )));
    }

    let d = mean.nrows();
    let mut support = ComplexMatrix::zeros(d, d);
    for c in &clusters[clusters.len() - positive_count..] {
        support = &support + &c.projector();
    }

    Ok(GeometricMeanReport {
        mean,
        support,
        pi_ab,
        clusters,
        positive_count,
        rank_cut,
    })
}

/// The nine equivalent statements characterizing commuting support
/// projectors, each evaluated numerically and independently so that a
/// unanimity failure localizes the culprit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GmEquivalenceFlags {
    /// 1: Pi_A and Pi_B commute.
    pub supports_commute: bool,
    /// 2: supp(M(A,B)) = supp(A) ∩ supp(B).
    pub supp_is_intersection: bool,
    /// 3: supp(M(A,B)) <= supp(B).
    pub supp_within_b: bool,
    /// 4: Null(M(A,B)) = Null(A) + Null(B).
    pub null_is_sum: bool,
    /// 5: Null(B) <= Null(M(A,B)).
    pub null_b_within: bool,
    /// 6: M(B,A) and M(A,B) have the same support.
    pub same_support_swapped: bool,
    /// 7: M(B+,A+) and M(A,B) have the same support.
    pub same_support_pinv: bool,
    /// 8: M(B+,A+) is the Moore-Penrose inverse of M(A,B).
    pub pinv_relation: bool,
    /// 9: M(B+,A+) and M(A,B) commute.
    pub means_commute: bool,
}

impl GmEquivalenceFlags {
    pub fn all(&self) -> [bool; 9] {
        [
            self.supports_commute,
            self.supp_is_intersection,
            self.supp_within_b,
            self.null_is_sum,
            self.null_b_within,
            self.same_support_swapped,
            self.same_support_pinv,
            self.pinv_relation,
            self.means_commute,
        ]
    }

    pub fn unanimous(&self) -> bool {
        let fs = self.all();
        fs.iter().all(|f| *f == fs[0])
    }
}

/// Evaluate all nine statements for PSD operators A, B.
pub fn gm_equivalence_flags<T: Scalar>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    tol: &ToleranceConfig<T>,
) -> Result<GmEquivalenceFlags> {
    // Round-off in these comparisons sits many decades below any genuine
    // violation, which is O(1); the flag threshold sits in between. Rank
    // decisions get the same headroom: means of ill-conditioned inputs carry
    // amplified round-off that an epsilon-level cut would mistake for rank.
    let flag_tol = tol.opt_tol * T::from_f64_lossy(1e3);
    let tol = &ToleranceConfig {
        rank_tol_factor: tol.rank_tol_factor.max(flag_tol * T::from_f64_lossy(1e-2)),
        ..*tol
    };
    let d = a.nrows();

    let fa = PsdFunctions::new(a, tol)?;
    let fb = PsdFunctions::new(b, tol)?;
    let pa = fa.support_projector();
    let pb = fb.support_projector();
    let na = fa.null_projector();
    let nb = fb.null_projector();

    let m_ab = geometric_mean(a, b, tol)?;
    let m_ba = geometric_mean(b, a, tol)?;
    let b_pinv = fb.pinv();
    let a_pinv = fa.pinv();
    let m_bp_ap = geometric_mean(&b_pinv, &a_pinv, tol)?;

    let supports_commute = pa.commutator_norm(&pb) <= flag_tol * T::from_usize_lossy(d);

    // Projector onto supp(A) ∩ supp(B): the kernel of (1 - Pi_A) + (1 - Pi_B).
    let comp_sum = (&na + &nb).hermitian_part();
    let intersection = PsdFunctions::new(&comp_sum, tol)?.null_projector();
    let supp_is_intersection = m_ab.support.distance(&intersection) <= flag_tol;

    let supp_within_b = (&nb * &m_ab.support).frobenius_norm() <= flag_tol;

    // Projector onto Null(A) + Null(B): the support of (1 - Pi_A) + (1 - Pi_B).
    let null_sum = PsdFunctions::new(&comp_sum, tol)?.support_projector();
    let null_m = &ComplexMatrix::identity(d) - &m_ab.support;
    let null_is_sum = null_m.distance(&null_sum) <= flag_tol;

    let null_b_basis = fb.null_basis();
    let null_b_within = if null_b_basis.ncols() == 0 {
        true
    } else {
        (&m_ab.mean * &null_b_basis).frobenius_norm()
            <= flag_tol * (T::one() + m_ab.mean.frobenius_norm())
    };

    let same_support_swapped = m_ab.support.distance(&m_ba.support) <= flag_tol;
    let same_support_pinv = m_ab.support.distance(&m_bp_ap.support) <= flag_tol;

    let m_ab_pinv = PsdFunctions::new(&m_ab.mean, tol)?.pinv();
    let pinv_relation = m_ab_pinv.distance(&m_bp_ap.mean)
        <= flag_tol * (T::one() + m_bp_ap.mean.frobenius_norm());

    let means_commute = m_ab.mean.commutator_norm(&m_bp_ap.mean)
        <= flag_tol * (T::one() + m_ab.mean.frobenius_norm() * m_bp_ap.mean.frobenius_norm());

    Ok(GmEquivalenceFlags {
        supports_commute,
        supp_is_intersection,
        supp_within_b,
        null_is_sum,
        null_b_within,
        same_support_swapped,
        same_support_pinv,
        pinv_relation,
        means_commute,
    })
}
