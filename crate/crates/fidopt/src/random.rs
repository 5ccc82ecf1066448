//! Seeded random instances: Haar-style unitaries, states with prescribed
//! ranks and structure, random POVMs, and stochastic maps.
//!
//! All draws go through `f64` before conversion to the library scalar, so a
//! given seed produces the same matrices for every scalar type. The PRNG is
//! pinned to ChaCha8 and named in output metadata.

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, PsdFunctions};
use crate::quantum::{CoarseGrainingMap, DensityOperator, Povm};
use crate::scalar::{cr, Scalar, C};
use crate::tol::ToleranceConfig;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Name of the pinned PRNG, reported in output metadata.
pub const RNG_ALGORITHM: &str = "chacha8";

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller on f64 draws.
fn normal<T: Scalar, R: Rng>(rng: &mut R) -> T {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    T::from_f64_lossy((-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos())
}

fn uniform<T: Scalar, R: Rng>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::from_f64_lossy(lo + (hi - lo) * rng.gen::<f64>())
}

/// Complex Gaussian matrix.
pub fn gaussian_matrix<T: Scalar, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = C::new(normal(rng), normal(rng));
        }
    }
    m
}

/// Haar-distributed unitary via Gram-Schmidt on a complex Gaussian matrix
/// with the diagonal-phase correction.
pub fn haar_unitary<T: Scalar, R: Rng>(dim: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = gaussian_matrix::<T, R>(dim, dim, rng);
    let mut cols: Vec<Vec<C<T>>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v = g.column(j);
        // r_jj before normalization fixes the phase convention.
        for b in &cols {
            let ip: C<T> = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * *vi).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi = *vi - ip * *bi;
            }
        }
        for b in &cols {
            let ip: C<T> = b.iter().zip(&v).map(|(bi, vi)| bi.conj() * *vi).sum();
            for (vi, bi) in v.iter_mut().zip(b.iter()) {
                *vi = *vi - ip * *bi;
            }
        }
        let n: T = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        let rjj: C<T> = g
            .column(j)
            .iter()
            .zip(&v)
            .map(|(gi, vi)| vi.conj() * *gi)
            .sum();
        let phase = if rjj.norm() > T::zero() {
            rjj / cr(rjj.norm())
        } else {
            crate::scalar::cone()
        };
        for z in v.iter_mut() {
            *z = *z / cr(n) * phase;
        }
        cols.push(v);
    }
    ComplexMatrix::from_columns(dim, &cols)
}

/// Well-conditioned random spectrum of the given rank, summing to one.
fn random_spectrum<T: Scalar, R: Rng>(rank: usize, rng: &mut R) -> Vec<T> {
    let raw: Vec<T> = (0..rank).map(|_| uniform(rng, 0.35, 1.0)).collect();
    let total = raw.iter().fold(T::zero(), |a, b| a + *b);
    raw.into_iter().map(|x| x / total).collect()
}

/// Random state of prescribed rank: a Haar frame applied to a random
/// spectrum placed on the first `rank` coordinates.
pub fn random_state<T: Scalar, R: Rng>(
    dim: usize,
    rank: usize,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<DensityOperator<T>> {
    if rank == 0 || rank > dim {
        return Err(Error::Precondition(format!(
            "rank {rank} invalid for dimension {dim}"
        )));
    }
    let u = haar_unitary::<T, R>(dim, rng);
    let spec = random_spectrum::<T, R>(rank, rng);
    let mut padded = vec![T::zero(); dim];
    padded[..rank].copy_from_slice(&spec);
    let m = (&(&u * &ComplexMatrix::diag(&padded)) * &u.adjoint()).hermitian_part();
    DensityOperator::new(m, tol)
}

/// Random pure state.
pub fn random_pure_state<T: Scalar, R: Rng>(
    dim: usize,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<DensityOperator<T>> {
    let v: Vec<C<T>> = (0..dim).map(|_| C::new(normal(rng), normal(rng))).collect();
    DensityOperator::from_pure(&v, tol)
}

/// Structure enforced by construction on a random pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureFlag {
    Generic,
    CommutingSupports,
    CommutingStates,
    PureSigma,
    SingularSum,
}

impl fmt::Display for StructureFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Generic => "generic",
            Self::CommutingSupports => "commuting-supports",
            Self::CommutingStates => "commuting-states",
            Self::PureSigma => "pure-sigma",
            Self::SingularSum => "singular-sum",
        };
        f.write_str(s)
    }
}

impl FromStr for StructureFlag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "generic" => Ok(Self::Generic),
            "commuting-supports" => Ok(Self::CommutingSupports),
            "commuting-states" => Ok(Self::CommutingStates),
            "pure-sigma" => Ok(Self::PureSigma),
            "singular-sum" => Ok(Self::SingularSum),
            other => Err(Error::Precondition(format!(
                "unknown structure flag '{other}'"
            ))),
        }
    }
}

/// Deterministic description of a random instance.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub dim: usize,
    pub rank_rho: usize,
    pub rank_sigma: usize,
    pub seed: u64,
    pub structure: StructureFlag,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let (d, r1, r2) = (self.dim, self.rank_rho, self.rank_sigma);
        if d == 0 || r1 == 0 || r2 == 0 || r1 > d || r2 > d {
            return Err(Error::Precondition(format!(
                "ranks ({r1}, {r2}) invalid for dimension {d}"
            )));
        }
        match self.structure {
            StructureFlag::Generic | StructureFlag::CommutingSupports | StructureFlag::CommutingStates => {
                if r1 + r2 < d {
                    return Err(Error::Precondition(format!(
                        "ranks {r1} + {r2} < {d}: rho + sigma would be singular; use singular-sum"
                    )));
                }
            }
            StructureFlag::PureSigma => {
                if r2 != 1 {
                    return Err(Error::Precondition("pure-sigma requires rank_sigma = 1".into()));
                }
                if r1 + 1 < d {
                    return Err(Error::Precondition(format!(
                        "pure-sigma requires rank_rho >= {}",
                        d - 1
                    )));
                }
            }
            StructureFlag::SingularSum => {
                if r1.max(r2) > d - 1 {
                    return Err(Error::Precondition(
                        "singular-sum requires both ranks <= dim - 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Generate the pair described by a spec; bit-deterministic in the seed.
pub fn random_pair<T: Scalar>(
    spec: &InstanceSpec,
    tol: &ToleranceConfig<T>,
) -> Result<(DensityOperator<T>, DensityOperator<T>)> {
    spec.validate()?;
    let mut rng = rng_from_seed(spec.seed);
    random_pair_with_rng(spec, &mut rng, tol)
}

/// Same as [`random_pair`] but drawing from a caller-owned stream, so test
/// corpora can chain instances off one seed.
pub fn random_pair_with_rng<T: Scalar, R: Rng>(
    spec: &InstanceSpec,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<(DensityOperator<T>, DensityOperator<T>)> {
    spec.validate()?;
    let (d, r1, r2) = (spec.dim, spec.rank_rho, spec.rank_sigma);
    for _ in 0..16 {
        let pair = match spec.structure {
            StructureFlag::Generic => {
                (random_state(d, r1, rng, tol)?, random_state(d, r2, rng, tol)?)
            }
            StructureFlag::CommutingSupports => {
                let frame = haar_unitary::<T, R>(d, rng);
                let rho = embedded_random_state(&frame, 0, r1, rng, tol)?;
                let sigma = embedded_random_state(&frame, d - r2, r2, rng, tol)?;
                (rho, sigma)
            }
            StructureFlag::CommutingStates => {
                let frame = haar_unitary::<T, R>(d, rng);
                let rho = diagonal_state(&frame, 0, r1, rng, tol)?;
                let sigma = diagonal_state(&frame, d - r2, r2, rng, tol)?;
                (rho, sigma)
            }
            StructureFlag::PureSigma => {
                (random_state(d, r1, rng, tol)?, random_pure_state(d, rng, tol)?)
            }
            StructureFlag::SingularSum => {
                let k = (r1 + r2).min(d - 1);
                let frame = haar_unitary::<T, R>(d, rng);
                let rho = embedded_random_state_rank(&frame, 0, k, r1, rng, tol)?;
                let sigma = embedded_random_state_rank(&frame, 0, k, r2, rng, tol)?;
                (rho, sigma)
            }
        };
        let distinct = pair.0.matrix().distance(pair.1.matrix()) > tol.opt_tol;
        let sum = pair.0.matrix() + pair.1.matrix();
        let sum_rank = PsdFunctions::new(&sum, tol)?.rank();
        let sum_ok = match spec.structure {
            StructureFlag::SingularSum => sum_rank == (r1 + r2).min(d - 1),
            _ => sum_rank == d,
        };
        if distinct && sum_ok {
            return Ok(pair);
        }
    }
    Err(Error::Infeasible(format!(
        "could not realize structure {} after 16 attempts",
        spec.structure
    )))
}

/// Random state supported on frame columns [offset, offset + rank).
fn embedded_random_state<T: Scalar, R: Rng>(
    frame: &ComplexMatrix<T>,
    offset: usize,
    rank: usize,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<DensityOperator<T>> {
    embedded_random_state_rank(frame, offset, rank, rank, rng, tol)
}

/// Random state of rank `rank` supported inside the `block`-dimensional
/// subspace spanned by frame columns [offset, offset + block).
fn embedded_random_state_rank<T: Scalar, R: Rng>(
    frame: &ComplexMatrix<T>,
    offset: usize,
    block: usize,
    rank: usize,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<DensityOperator<T>> {
    let d = frame.nrows();
    let inner = random_state::<T, R>(block, rank, rng, tol)?;
    let mut m = ComplexMatrix::zeros(d, d);
    for a in 0..block {
        for b in 0..block {
            let v = inner.matrix()[(a, b)];
            if v.norm_sqr() == T::zero() {
                continue;
            }
            for i in 0..d {
                let fa = frame[(i, offset + a)] * v;
                for j in 0..d {
                    m[(i, j)] = m[(i, j)] + fa * frame[(j, offset + b)].conj();
                }
            }
        }
    }
    DensityOperator::new(m.hermitian_part(), tol)
}

/// Random state diagonal in the frame basis, supported on
/// [offset, offset + rank).
fn diagonal_state<T: Scalar, R: Rng>(
    frame: &ComplexMatrix<T>,
    offset: usize,
    rank: usize,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<DensityOperator<T>> {
    let d = frame.nrows();
    let spec = random_spectrum::<T, R>(rank, rng);
    let mut padded = vec![T::zero(); d];
    padded[offset..offset + rank].copy_from_slice(&spec);
    let m = (&(frame * &ComplexMatrix::diag(&padded)) * &frame.adjoint()).hermitian_part();
    DensityOperator::new(m, tol)
}

/// Random POVM with `outcomes` full-rank elements, normalized through
/// S^{-1/2} G_i S^{-1/2}.
pub fn random_povm<T: Scalar, R: Rng>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    let gs: Vec<ComplexMatrix<T>> = (0..outcomes)
        .map(|_| {
            let x = gaussian_matrix::<T, R>(dim, dim, rng);
            (&x * &x.adjoint()).hermitian_part()
        })
        .collect();
    normalize_to_povm(gs, tol)
}

/// Random POVM with rank-one elements.
pub fn random_rank1_povm<T: Scalar, R: Rng>(
    dim: usize,
    outcomes: usize,
    rng: &mut R,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    let gs: Vec<ComplexMatrix<T>> = (0..outcomes)
        .map(|_| {
            let v: Vec<C<T>> = (0..dim).map(|_| C::new(normal(rng), normal(rng))).collect();
            let mut m = ComplexMatrix::zeros(dim, dim);
            for i in 0..dim {
                for j in 0..dim {
                    m[(i, j)] = v[i] * v[j].conj();
                }
            }
            m
        })
        .collect();
    normalize_to_povm(gs, tol)
}

fn normalize_to_povm<T: Scalar>(
    gs: Vec<ComplexMatrix<T>>,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    let dim = gs[0].nrows();
    let mut total = ComplexMatrix::zeros(dim, dim);
    for g in &gs {
        total = &total + g;
    }
    let f = PsdFunctions::new(&total, tol)?;
    if f.rank() < dim {
        return Err(Error::Infeasible("random elements do not span".into()));
    }
    let t = f.pinv_sqrt();
    Povm::from_operators(
        gs.iter()
            .map(|g| (&(&t * g) * &t).hermitian_part())
            .collect(),
        tol,
    )
}

/// Random column-stochastic map from `fine` outcomes onto `coarse` outcomes.
pub fn random_stochastic<T: Scalar, R: Rng>(
    coarse: usize,
    fine: usize,
    rng: &mut R,
) -> Result<CoarseGrainingMap<T>> {
    let mut rows = vec![vec![T::zero(); fine]; coarse];
    for k in 0..fine {
        let col: Vec<T> = (0..coarse).map(|_| uniform(rng, 0.05, 1.0)).collect();
        let total = col.iter().fold(T::zero(), |a, b| a + *b);
        for (j, v) in col.into_iter().enumerate() {
            rows[j][k] = v / total;
        }
    }
    CoarseGrainingMap::new(rows)
}
