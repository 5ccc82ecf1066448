//! File formats and report schemas.

use crate::error::{CliError, CliResult};
use fidopt::divergence::DivergenceReport;
use fidopt::optimal::{DichotomyReport, OptimalityVerdict};
use fidopt::pencil::PencilEigensystem;
use fidopt::quantum::PovmWire;
use fidopt::tol::ToleranceConfig;
use fidopt::{Matrix, Measurement, Real, State, Tolerances};
use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write;
use std::path::Path;

/// Run metadata attached to every JSON report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Meta {
    pub tool: String,
    pub version: String,
    pub rng: String,
    pub tol_profile: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(tol_profile: &str, seed: Option<u64>) -> Self {
        Self {
            tool: "fidopt".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rng: fidopt::random::RNG_ALGORITHM.into(),
            tol_profile: tol_profile.into(),
            seed,
        }
    }
}

/// Eigenvalue entry: a number or "inf".
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaWire {
    Finite(Real),
    Tag(String),
}

impl LambdaWire {
    pub fn inf() -> Self {
        LambdaWire::Tag("inf".into())
    }
}

/// Complex vector as {"re": [...], "im": [...]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorWire {
    pub re: Vec<Real>,
    pub im: Vec<Real>,
}

impl VectorWire {
    pub fn from_column(m: &Matrix, j: usize) -> Self {
        let col = m.column(j);
        Self {
            re: col.iter().map(|z| z.re).collect(),
            im: col.iter().map(|z| z.im).collect(),
        }
    }
}

/// One eigenspace: {"lambda": number | "inf", "basis": [vector...]}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenspaceWire {
    pub lambda: LambdaWire,
    pub basis: Vec<VectorWire>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<Real>,
}

pub fn eigensystem_wire(sys: &PencilEigensystem<Real>) -> Vec<EigenspaceWire> {
    let mut out: Vec<EigenspaceWire> = sys
        .finite
        .iter()
        .map(|e| EigenspaceWire {
            lambda: LambdaWire::Finite(e.lambda),
            basis: (0..e.basis.ncols())
                .map(|j| VectorWire::from_column(&e.basis, j))
                .collect(),
            residual: Some(e.residual),
        })
        .collect();
    if sys.infinite_basis.ncols() > 0 {
        out.push(EigenspaceWire {
            lambda: LambdaWire::inf(),
            basis: (0..sys.infinite_basis.ncols())
                .map(|j| VectorWire::from_column(&sys.infinite_basis, j))
                .collect(),
            residual: None,
        });
    }
    out
}

/// Dichotomy flags plus the two canonical PVMs.
#[derive(Debug, Serialize, Deserialize)]
pub struct DichotomyWire {
    pub weak_commutativity: bool,
    pub commuting: bool,
    pub compatible: bool,
    pub equivalent: bool,
    pub unique_minimal: bool,
    pub unanimous: bool,
    pub m_rho_sigma: PovmWire<Real>,
    pub m_sigma_rho: PovmWire<Real>,
}

impl DichotomyWire {
    pub fn from_report(r: &DichotomyReport<Real>) -> Self {
        Self {
            weak_commutativity: r.weak_commutativity,
            commuting: r.commuting_flag,
            compatible: r.compatible_flag,
            equivalent: r.equivalent_flag,
            unique_minimal: r.unique_minimal,
            unanimous: r.unanimous,
            m_rho_sigma: r.m_rho_sigma.to_wire(),
            m_sigma_rho: r.m_sigma_rho.to_wire(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct AnalyzeReport {
    pub meta: Meta,
    pub divergence: DivergenceReport<Real>,
    pub dichotomy: DichotomyWire,
    pub pencil: Vec<EigenspaceWire>,
}

/// Per-element verdict record for the fidelity criterion.
#[derive(Debug, Serialize, Deserialize)]
pub struct FElementWire {
    pub label: String,
    /// Pencil eigenvalue kappa; "inf" for elements in Null(rho); null when
    /// the element is not parallel.
    pub kappa: Option<LambdaWire>,
    pub residual: Real,
    /// Index into the reported pencil eigensystem, or "inf", or null.
    pub eigenspace: Option<LambdaWire>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TElementWire {
    pub label: String,
    pub kills_plus: bool,
    pub kills_minus: bool,
    pub residual: Real,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerdictReport {
    pub meta: Meta,
    pub criterion: String,
    pub is_optimal: bool,
    pub is_minimal: bool,
    pub gap: Real,
    pub gap_consistent: bool,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub elements: Vec<FElementWire>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub t_elements: Vec<TElementWire>,
}

/// Attach eigenspace indices to a fidelity verdict by matching each kappa
/// against the reported pencil eigenvalues.
pub fn f_elements_wire(
    verdict: &OptimalityVerdict<Real>,
    pencil: &PencilEigensystem<Real>,
    tol: &Tolerances,
) -> Vec<FElementWire> {
    verdict
        .elements
        .iter()
        .map(|e| {
            let (kappa, eigenspace) = if !e.parallel {
                (None, None)
            } else {
                match e.kappa {
                    None => (Some(LambdaWire::inf()), Some(LambdaWire::inf())),
                    Some(k) => {
                        let idx = pencil
                            .finite
                            .iter()
                            .position(|es| {
                                (es.lambda - k).abs() <= tol.cluster_gap * (1.0 + k.abs())
                            })
                            .map(|i| LambdaWire::Finite(i as Real));
                        (Some(LambdaWire::Finite(k)), idx)
                    }
                }
            };
            FElementWire {
                label: e.label.clone(),
                kappa,
                residual: e.residual,
                eigenspace,
            }
        })
        .collect()
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub meta: Meta,
    pub mode: String,
    pub evaluations: usize,
    pub f_exact: Real,
    pub d_exact: Real,
    pub min_induced_fidelity: Real,
    pub fidelity_gap: Real,
    pub max_induced_tv: Real,
    pub tv_gap: Real,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmin_direction: Option<[Real; 2]>,
}

pub fn tolerances_from_profile(profile: &str) -> CliResult<Tolerances> {
    ToleranceConfig::profile(profile).map_err(CliError::from)
}

/// Resolve the tolerance profile: flag, then FIDOPT_TOL_PROFILE, then default.
pub fn resolve_profile(flag: Option<&str>) -> String {
    flag.map(str::to_owned)
        .or_else(|| std::env::var("FIDOPT_TOL_PROFILE").ok())
        .unwrap_or_else(|| "default".into())
}

pub fn read_matrix(path: &Path) -> CliResult<Matrix> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_state(path: &Path, tol: &Tolerances) -> CliResult<State> {
    let m = read_matrix(path)?;
    State::new(m, tol).map_err(CliError::from)
}

pub fn read_povm(path: &Path, tol: &Tolerances) -> CliResult<Measurement> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let wire: PovmWire<Real> = serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })?;
    Measurement::from_wire(wire, tol).map_err(CliError::from)
}

/// Serialize deterministically: pretty JSON, LF endings, trailing newline.
pub fn to_json_bytes<T: Serialize>(value: &T) -> CliResult<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(value).map_err(|source| CliError::Json {
        path: "<output>".into(),
        source,
    })?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Write to the path, or to stdout when no path is given.
pub fn emit(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}
