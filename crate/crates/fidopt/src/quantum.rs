//! Density operators, POVMs, coarse graining, and measurement statistics.

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, ComplexMatrix, HermitianEigensystem, PsdFunctions};
use crate::scalar::{Scalar, C};
use crate::tol::ToleranceConfig;
use serde::{Deserialize, Serialize};

fn state_tol<T: Scalar>() -> T {
    T::from_f64_lossy(1e-10).max(T::epsilon() * T::from_f64_lossy(100.0))
}

/// Positive unit-trace operator with cached spectral data.
#[derive(Debug, Clone)]
pub struct DensityOperator<T> {
    matrix: ComplexMatrix<T>,
    eig: HermitianEigensystem<T>,
    support: ComplexMatrix<T>,
    sqrt: ComplexMatrix<T>,
    rank: usize,
    rank_cut: T,
}

impl<T: Scalar> DensityOperator<T> {
    pub fn new(matrix: ComplexMatrix<T>, tol: &ToleranceConfig<T>) -> Result<Self> {
        matrix.require_square()?;
        matrix.validate_finite()?;
        let vt = state_tol::<T>();
        let asym = matrix.hermitian_asymmetry();
        if asym > vt * (T::one() + matrix.frobenius_norm()) {
            return Err(Error::NotAState(format!(
                "not Hermitian (asymmetry {asym:e})"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - T::one()).abs() > vt || tr.im.abs() > vt {
            return Err(Error::NotAState(format!(
                "trace {:?} differs from 1",
                (tr.re, tr.im)
            )));
        }
        let psd = PsdFunctions::new(&matrix, tol).map_err(|e| match e {
            Error::NotPsd { min_eig, clip } => Error::NotAState(format!(
                "not PSD (min eigenvalue {min_eig:e}, clip {clip:e})"
            )),
            other => other,
        })?;
        let support = psd.support_projector();
        let sqrt = psd.sqrt();
        let rank = psd.rank();
        let rank_cut = psd.rank_cut();
        Ok(Self {
            matrix,
            eig: psd.eig,
            support,
            sqrt,
            rank,
            rank_cut,
        })
    }

    /// Pure state |v><v| (the vector is normalized internally).
    pub fn from_pure(v: &[C<T>], tol: &ToleranceConfig<T>) -> Result<Self> {
        let norm2: T = v.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= T::zero() {
            return Err(Error::NotAState("zero state vector".into()));
        }
        Self::new(ComplexMatrix::projector_onto(v), tol)
    }

    pub fn maximally_mixed(dim: usize, tol: &ToleranceConfig<T>) -> Result<Self> {
        let w = T::one() / T::from_usize_lossy(dim);
        Self::new(ComplexMatrix::diag(&vec![w; dim]), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn eigensystem(&self) -> &HermitianEigensystem<T> {
        &self.eig
    }

    pub fn support_projector(&self) -> &ComplexMatrix<T> {
        &self.support
    }

    pub fn null_projector(&self) -> ComplexMatrix<T> {
        &ComplexMatrix::identity(self.dim()) - &self.support
    }

    /// Orthonormal basis of the null space.
    pub fn null_basis(&self) -> ComplexMatrix<T> {
        let cut = self.rank_cut;
        self.eig.select_columns(|w| w <= cut)
    }

    /// Orthonormal basis of the support.
    pub fn support_basis(&self) -> ComplexMatrix<T> {
        let cut = self.rank_cut;
        self.eig.select_columns(|w| w > cut)
    }

    pub fn sqrt(&self) -> &ComplexMatrix<T> {
        &self.sqrt
    }

    /// Square root of the Moore-Penrose inverse.
    pub fn pinv_sqrt(&self) -> ComplexMatrix<T> {
        let cut = self.rank_cut;
        self.eig
            .spectral_fn(|w| if w > cut { T::one() / w.sqrt() } else { T::zero() })
    }

    /// Moore-Penrose inverse.
    pub fn pinv(&self) -> ComplexMatrix<T> {
        let cut = self.rank_cut;
        self.eig
            .spectral_fn(|w| if w > cut { T::one() / w } else { T::zero() })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_pure(&self) -> bool {
        self.rank == 1
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.dim()
    }
}

/// Finite list of labeled positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm<T> {
    elements: Vec<(String, ComplexMatrix<T>)>,
    is_pvm: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct PovmElementWire<T: Scalar> {
    label: String,
    #[serde(bound(
        serialize = "T: Serialize",
        deserialize = "T: serde::de::DeserializeOwned"
    ))]
    matrix: ComplexMatrix<T>,
}

/// Wire format: {"elements":[{"label":...,"matrix":...},...]}.
#[derive(Debug, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + serde::de::DeserializeOwned"
))]
pub struct PovmWire<T: Scalar> {
    elements: Vec<PovmElementWire<T>>,
}

impl<T: Scalar> Povm<T> {
    /// Validate PSD elements and completeness, and detect the PVM case.
    pub fn new(elements: Vec<(String, ComplexMatrix<T>)>, tol: &ToleranceConfig<T>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::NotAPovm("no elements".into()));
        }
        let d = elements[0].1.nrows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (label, e) in &elements {
            e.require_square()?;
            if e.nrows() != d {
                return Err(Error::NotAPovm(format!(
                    "element {label} has dimension {} != {d}",
                    e.nrows()
                )));
            }
            PsdFunctions::new(e, tol).map_err(|err| {
                Error::NotAPovm(format!("element {label} is not PSD ({err})"))
            })?;
            sum = &sum + e;
        }
        let completeness = sum.distance(&ComplexMatrix::identity(d));
        let limit = T::from_f64_lossy(1e-9) * T::from_usize_lossy(d);
        if completeness > limit {
            return Err(Error::NotAPovm(format!(
                "elements sum to identity only within {completeness:e}"
            )));
        }
        let is_pvm = detect_pvm(&elements, tol);
        Ok(Self { elements, is_pvm })
    }

    /// Build with sequential labels E0, E1, ...
    pub fn from_operators(ops: Vec<ComplexMatrix<T>>, tol: &ToleranceConfig<T>) -> Result<Self> {
        let elements = ops
            .into_iter()
            .enumerate()
            .map(|(i, e)| (format!("E{i}"), e))
            .collect();
        Self::new(elements, tol)
    }

    /// The trivial single-outcome POVM {1}.
    pub fn trivial(dim: usize, tol: &ToleranceConfig<T>) -> Result<Self> {
        Self::new(vec![("I".into(), ComplexMatrix::identity(dim))], tol)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].1.nrows()
    }

    pub fn is_pvm(&self) -> bool {
        self.is_pvm
    }

    pub fn elements(&self) -> &[(String, ComplexMatrix<T>)] {
        &self.elements
    }

    pub fn operators(&self) -> impl Iterator<Item = &ComplexMatrix<T>> {
        self.elements.iter().map(|(_, e)| e)
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.elements.iter().map(|(l, _)| l.as_str())
    }

    pub fn to_wire(&self) -> PovmWire<T> {
        PovmWire {
            elements: self
                .elements
                .iter()
                .map(|(label, matrix)| PovmElementWire {
                    label: label.clone(),
                    matrix: matrix.clone(),
                })
                .collect(),
        }
    }

    pub fn from_wire(wire: PovmWire<T>, tol: &ToleranceConfig<T>) -> Result<Self> {
        Self::new(
            wire.elements
                .into_iter()
                .map(|e| (e.label, e.matrix))
                .collect(),
            tol,
        )
    }
}

fn detect_pvm<T: Scalar>(elements: &[(String, ComplexMatrix<T>)], _tol: &ToleranceConfig<T>) -> bool {
    let lim = T::from_f64_lossy(1e-9);
    for (i, (_, e)) in elements.iter().enumerate() {
        let scale = T::one() + e.frobenius_norm();
        if (&(e * e) - e).frobenius_norm() > lim * scale {
            return false;
        }
        for (_, f) in &elements[i + 1..] {
            if (e * f).frobenius_norm() > lim * scale {
                return false;
            }
        }
    }
    true
}

/// Probability distribution over measurement outcomes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutcomeDistribution<T> {
    pub probabilities: Vec<(String, T)>,
}

impl<T: Scalar> OutcomeDistribution<T> {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = T> + '_ {
        self.probabilities.iter().map(|(_, p)| *p)
    }

    pub fn total(&self) -> T {
        self.values().fold(T::zero(), |a, b| a + b)
    }
}

/// Born rule: p_m = Re tr(E_m rho), clipped at zero. Probabilities below
/// the round-off floor of the trace computation are flushed to exact zero;
/// Bhattacharyya sums are sqrt-sensitive there, so noise-level values would
/// otherwise contribute at the sqrt(epsilon) scale.
pub fn measure<T: Scalar>(
    povm: &Povm<T>,
    rho: &DensityOperator<T>,
) -> Result<OutcomeDistribution<T>> {
    if povm.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM dimension {} vs state dimension {}",
            povm.dim(),
            rho.dim()
        )));
    }
    let probabilities = povm
        .elements
        .iter()
        .map(|(label, e)| {
            let floor = T::epsilon()
                * T::from_f64_lossy(32.0)
                * (T::one() + e.frobenius_norm());
            let raw = e.re_trace_product(rho.matrix());
            let p = if raw <= floor { T::zero() } else { raw };
            (label.clone(), p)
        })
        .collect();
    Ok(OutcomeDistribution { probabilities })
}

/// Row-stochastic map acting on POVM outcomes: columns index fine outcomes
/// and every column sums to one.
#[derive(Debug, Clone)]
pub struct CoarseGrainingMap<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> CoarseGrainingMap<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::NotStochastic("empty or ragged matrix".into()));
        }
        let lim = T::from_f64_lossy(1e-12).max(T::epsilon() * T::from_f64_lossy(16.0));
        for r in &rows {
            for x in r {
                if *x < -lim || !x.is_finite() {
                    return Err(Error::NotStochastic(format!("negative entry {x}")));
                }
            }
        }
        for k in 0..ncols {
            let col_sum = rows.iter().fold(T::zero(), |a, r| a + r[k]);
            if (col_sum - T::one()).abs() > lim * T::from_usize_lossy(rows.len()) {
                return Err(Error::NotStochastic(format!(
                    "column {k} sums to {col_sum}"
                )));
            }
        }
        Ok(Self { rows })
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { T::one() } else { T::zero() })
                    .collect()
            })
            .collect();
        Self { rows }
    }

    /// Single row of ones: merges every outcome into one.
    pub fn merge_all(n: usize) -> Self {
        Self {
            rows: vec![vec![T::one(); n]],
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.rows[0].len()
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// Apply to a probability vector.
    pub fn apply_distribution(&self, p: &OutcomeDistribution<T>) -> OutcomeDistribution<T> {
        let probabilities = self
            .rows
            .iter()
            .enumerate()
            .map(|(j, row)| {
                let v = row
                    .iter()
                    .zip(p.values())
                    .fold(T::zero(), |a, (s, pk)| a + *s * pk);
                (format!("C{j}"), v)
            })
            .collect();
        OutcomeDistribution { probabilities }
    }
}

/// A_j = sum_k S_jk B_k. Labels of 0/1 rows concatenate the source labels.
pub fn coarse_grain<T: Scalar>(
    povm: &Povm<T>,
    map: &CoarseGrainingMap<T>,
    tol: &ToleranceConfig<T>,
) -> Result<Povm<T>> {
    if map.ncols() != povm.len() {
        return Err(Error::DimensionMismatch(format!(
            "stochastic map has {} columns for {} POVM elements",
            map.ncols(),
            povm.len()
        )));
    }
    let d = povm.dim();
    let lim = T::from_f64_lossy(1e-12);
    let mut elements = Vec::with_capacity(map.nrows());
    for (j, row) in map.rows.iter().enumerate() {
        let mut op = ComplexMatrix::zeros(d, d);
        let mut parts: Vec<&str> = Vec::new();
        let mut binary = true;
        for (k, (label, e)) in povm.elements.iter().enumerate() {
            let s = row[k];
            if s.abs() <= lim {
                continue;
            }
            if (s - T::one()).abs() > lim {
                binary = false;
            }
            op = &op + &e.scale(s);
            parts.push(label);
        }
        let label = if binary && !parts.is_empty() {
            parts.join("+")
        } else {
            format!("C{j}")
        };
        elements.push((label, op));
    }
    Povm::new(elements, tol)
}

/// Drop zero elements and sum mutually proportional elements, producing a
/// simple POVM. Merged labels concatenate with "+".
pub fn simplify<T: Scalar>(povm: &Povm<T>, tol: &ToleranceConfig<T>) -> Result<Povm<T>> {
    let mut reps: Vec<(String, ComplexMatrix<T>)> = Vec::new();
    for (label, e) in &povm.elements {
        let norm = e.frobenius_norm();
        if norm <= tol.psd_clip {
            continue;
        }
        let mut merged = false;
        for (rep_label, rep) in reps.iter_mut() {
            let rep_norm2 = rep.inner(rep).re;
            let ratio = rep.inner(e).re / rep_norm2;
            if ratio < -tol.opt_tol {
                continue;
            }
            let ratio = ratio.max(T::zero());
            if (e - &rep.scale(ratio)).frobenius_norm() <= tol.opt_tol * norm {
                *rep = &*rep + e;
                rep_label.push('+');
                rep_label.push_str(label);
                merged = true;
                break;
            }
        }
        if !merged {
            reps.push((label.clone(), e.clone()));
        }
    }
    Povm::new(reps, tol)
}

/// Equivalence of POVMs, decided after simplification by matching elements
/// up to relabeling (greedy nearest match, then verification).
pub fn equivalent<T: Scalar>(a: &Povm<T>, b: &Povm<T>, tol: &ToleranceConfig<T>) -> Result<bool> {
    if a.dim() != b.dim() {
        return Ok(false);
    }
    let sa = simplify(a, tol)?;
    let sb = simplify(b, tol)?;
    if sa.len() != sb.len() {
        return Ok(false);
    }
    let mut used = vec![false; sb.len()];
    for (_, ea) in &sa.elements {
        let mut best: Option<(usize, T)> = None;
        for (j, (_, eb)) in sb.elements.iter().enumerate() {
            if used[j] {
                continue;
            }
            let dist = ea.distance(eb);
            if best.map_or(true, |(_, bd)| dist < bd) {
                best = Some((j, dist));
            }
        }
        match best {
            Some((j, dist)) if dist <= tol.opt_tol * (T::one() + ea.frobenius_norm()) => {
                used[j] = true;
            }
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// True iff every element of one POVM commutes with every element of the
/// other. For PVMs this decides compatibility.
pub fn commuting_povms<T: Scalar>(
    a: &Povm<T>,
    b: &Povm<T>,
    tol: &ToleranceConfig<T>,
) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(
            "POVMs act on different spaces".into(),
        ));
    }
    for (_, ea) in &a.elements {
        for (_, eb) in &b.elements {
            let scale = T::one() + ea.frobenius_norm() * eb.frobenius_norm();
            if ea.commutator_norm(eb) > tol.opt_tol * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Hermitian eigensystem of an arbitrary Hermitian observable; used by
/// callers that need spectra of differences like rho - sigma.
pub fn hermitian_observable_eigen<T: Scalar>(
    a: &ComplexMatrix<T>,
) -> Result<HermitianEigensystem<T>> {
    hermitian_eigen(a)
}
