//! Command implementations behind the `fidopt` binary.

use crate::error::{CliError, CliResult};
use crate::oracle::{qubit_grid_scan, random_povm_scan};
use crate::sample::{sample, SampleReport};
use crate::wire::{
    eigensystem_wire, f_elements_wire, read_povm, read_state, resolve_profile, to_json_bytes,
    tolerances_from_profile, AnalyzeReport, DichotomyWire, Meta, OracleReport, TElementWire,
    VerdictReport,
};
use fidopt::divergence::divergence_report;
use fidopt::matrix::{svd, ComplexMatrix};
use fidopt::optimal::{
    build_canonical_pvm, classify_dichotomy, joint_support_restriction, mixing_family,
    verify_with_restriction,
};
use fidopt::pencil::{construct_polar_unitary, pencil_eigensystem};
use fidopt::pure::state_to_bloch;
use fidopt::quantum::{equivalent, simplify};
use fidopt::random::{random_pair, InstanceSpec, StructureFlag};
use fidopt::trace_opt::{jordan_split, minimal_t_optimal, verify_t_optimal};
use fidopt::{Matrix, Measurement, Real, State, Tolerances};
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub struct CommonArgs {
    pub rho: PathBuf,
    pub sigma: PathBuf,
    pub out: Option<PathBuf>,
    pub profile: Option<String>,
}

impl CommonArgs {
    fn load(&self) -> CliResult<(State, State, Tolerances, String)> {
        let profile = resolve_profile(self.profile.as_deref());
        let tol = tolerances_from_profile(&profile)?;
        let rho = read_state(&self.rho, &tol)?;
        let sigma = read_state(&self.sigma, &tol)?;
        if rho.dim() != sigma.dim() {
            return Err(CliError::Invalid(format!(
                "dimension mismatch: rho is {}, sigma is {}",
                rho.dim(),
                sigma.dim()
            )));
        }
        Ok((rho, sigma, tol, profile))
    }
}

/// `fidopt analyze`: divergences, the dichotomy classification, and the
/// pencil eigensystem; optionally an arc-sweep CSV for pure qubit pairs.
pub fn cmd_analyze(
    args: &CommonArgs,
    arc_sweep: Option<&Path>,
    arc_samples: usize,
) -> CliResult<i32> {
    let (rho, sigma, tol, profile) = args.load()?;
    if rho.matrix().distance(sigma.matrix()) <= tol.opt_tol {
        return Err(CliError::Invalid("states must be distinct".into()));
    }
    let dichotomy = classify_dichotomy(&rho, &sigma, &tol)?;
    let measurements = vec![
        ("m-rho-sigma".to_string(), &dichotomy.m_rho_sigma),
        ("m-sigma-rho".to_string(), &dichotomy.m_sigma_rho),
    ];
    let divergence = divergence_report(&rho, &sigma, &measurements)?;
    let unitary = construct_polar_unitary(&rho, &sigma, &tol)?;
    let pencil = pencil_eigensystem(&rho, &sigma, &unitary, &tol)?;
    let report = AnalyzeReport {
        meta: Meta::new(&profile, None),
        divergence,
        dichotomy: DichotomyWire::from_report(&dichotomy),
        pencil: eigensystem_wire(&pencil),
    };
    crate::wire::emit(args.out.as_deref(), &to_json_bytes(&report)?)?;
    if let Some(path) = arc_sweep {
        write_arc_sweep(path, &rho, &sigma, &tol, arc_samples)?;
    }
    Ok(0)
}

/// Arc sweep for pure qubit pairs: eigenvector Bloch points of the pencil
/// (Pi_rho sigma, Pi_rho) across a lambda grid, as CSV rows
/// (lambda, x, y, z, kappa) where kappa = lambda / sqrt(F) is the
/// eigenvalue on the (sqrt(sigma), U sqrt(rho)) scale.
fn write_arc_sweep(
    path: &Path,
    rho: &State,
    sigma: &State,
    tol: &Tolerances,
    samples: usize,
) -> CliResult<()> {
    if rho.dim() != 2 || !rho.is_pure() || !sigma.is_pure() {
        return Err(CliError::Invalid(
            "arc sweep requires a pure qubit pair".into(),
        ));
    }
    let f = rho.matrix().re_trace_product(sigma.matrix()).max(0.0);
    if f <= tol.opt_tol {
        return Err(CliError::Invalid(
            "arc sweep requires overlapping states".into(),
        ));
    }
    let sqrt_f = f.sqrt();
    let k = rho.support_projector() * sigma.matrix();
    let l = rho.support_projector();
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Invalid(e.to_string()))?;
    w.write_record(["lambda", "x", "y", "z", "kappa"])
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    for i in 0..samples {
        let t = (i as Real + 0.5) / samples as Real * std::f64::consts::FRAC_PI_2;
        let lambda = t.tan();
        let shifted = &k - &l.scale(lambda);
        let dec = svd(&shifted).map_err(CliError::from)?;
        let basis = dec.null_space(1e-9 * (1.0 + shifted.frobenius_norm()));
        if basis.ncols() != 1 {
            continue;
        }
        let v = basis.column(0);
        let state = State::from_pure(&v, tol).map_err(CliError::from)?;
        let p = state_to_bloch(&state).map_err(CliError::from)?;
        w.write_record([
            format!("{lambda:.12e}"),
            format!("{:.12e}", p.x),
            format!("{:.12e}", p.y),
            format!("{:.12e}", p.z),
            format!("{:.12e}", lambda / sqrt_f),
        ])
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    w.flush()
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    Ok(())
}

/// Construction method for `fidopt construct`.
pub enum Method {
    MRhoSigma,
    MSigmaRho,
    Mix(Real),
    TOptimal(Q0Spec),
}

pub enum Q0Spec {
    Zero,
    Lambda(Real),
}

impl FromStr for Method {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "m-rho-sigma" => Ok(Method::MRhoSigma),
            "m-sigma-rho" => Ok(Method::MSigmaRho),
            _ => {
                if let Some(p) = s.strip_prefix("mix:") {
                    let p: Real = p
                        .parse()
                        .map_err(|_| CliError::Invalid(format!("bad mix weight '{p}'")))?;
                    if !(0.0..=1.0).contains(&p) {
                        return Err(CliError::Invalid("mix weight must be in [0, 1]".into()));
                    }
                    Ok(Method::Mix(p))
                } else if let Some(q) = s.strip_prefix("t-optimal:") {
                    match q {
                        "zero" => Ok(Method::TOptimal(Q0Spec::Zero)),
                        other => {
                            if let Some(l) = other.strip_prefix("lambda:") {
                                let l: Real = l.parse().map_err(|_| {
                                    CliError::Invalid(format!("bad lambda '{l}'"))
                                })?;
                                if !(0.0..=1.0).contains(&l) {
                                    return Err(CliError::Invalid(
                                        "lambda must be in [0, 1]".into(),
                                    ));
                                }
                                Ok(Method::TOptimal(Q0Spec::Lambda(l)))
                            } else {
                                Err(CliError::Invalid(format!("unknown q0 spec '{other}'")))
                            }
                        }
                    }
                } else {
                    Err(CliError::Invalid(format!("unknown method '{s}'")))
                }
            }
        }
    }
}

/// `fidopt construct`: emit a POVM that passes the matching verify step.
pub fn cmd_construct(args: &CommonArgs, method: &Method) -> CliResult<i32> {
    let (rho, sigma, tol, _) = args.load()?;
    let povm = match method {
        Method::MRhoSigma => build_canonical_pvm(&rho, &sigma, &tol)?,
        Method::MSigmaRho => build_canonical_pvm(&sigma, &rho, &tol)?,
        Method::Mix(p) => {
            let e1 = build_canonical_pvm(&rho, &sigma, &tol)?;
            let e2 = build_canonical_pvm(&sigma, &rho, &tol)?;
            let mixed = mixing_family(&e1, &e2, *p, &rho, &sigma, &tol)?;
            if equivalent(&mixed, &e1, &tol)? {
                eprintln!(
                    "note: supports commute; the mixture collapses to the unique minimal PVM"
                );
            }
            mixed
        }
        Method::TOptimal(q0) => {
            let q0 = match q0 {
                Q0Spec::Zero => ComplexMatrix::zeros(rho.dim(), rho.dim()),
                Q0Spec::Lambda(l) => {
                    let split = jordan_split(&rho, &sigma, &tol)?;
                    split.pi_zero.scale(*l)
                }
            };
            minimal_t_optimal(&rho, &sigma, &q0, &tol)?
        }
    };
    crate::wire::emit(args.out.as_deref(), &to_json_bytes(&povm.to_wire())?)?;
    Ok(0)
}

/// `fidopt verify`: exit 0 if optimal, 1 if valid but suboptimal.
pub fn cmd_verify(args: &CommonArgs, povm_path: &Path, criterion: &str) -> CliResult<i32> {
    let (rho, sigma, tol, profile) = args.load()?;
    let povm = read_povm(povm_path, &tol)?;
    if povm.dim() != rho.dim() {
        return Err(CliError::Invalid(format!(
            "POVM dimension {} does not match state dimension {}",
            povm.dim(),
            rho.dim()
        )));
    }
    let report = match criterion {
        "fidelity" => {
            let verdict = verify_with_restriction(&povm, &rho, &sigma, &tol)?;
            // Pencil of the (possibly restricted) problem for the
            // eigenspace indices.
            let restriction = joint_support_restriction(&rho, &sigma, &tol)?;
            let unitary = construct_polar_unitary(&restriction.rho, &restriction.sigma, &tol)?;
            let pencil =
                pencil_eigensystem(&restriction.rho, &restriction.sigma, &unitary, &tol)?;
            VerdictReport {
                meta: Meta::new(&profile, None),
                criterion: "fidelity".into(),
                is_optimal: verdict.is_f_optimal,
                is_minimal: verdict.is_minimal,
                gap: verdict.gap,
                gap_consistent: verdict.gap_consistent,
                elements: f_elements_wire(&verdict, &pencil, &tol),
                t_elements: vec![],
            }
        }
        "trace" => {
            let verdict = verify_t_optimal(&povm, &rho, &sigma, &tol)?;
            let simple = simplify(&povm, &tol)?.len() == povm.len();
            let is_minimal = verdict.is_t_optimal && simple && povm.len() == 2;
            VerdictReport {
                meta: Meta::new(&profile, None),
                criterion: "trace".into(),
                is_optimal: verdict.is_t_optimal,
                is_minimal,
                gap: verdict.gap,
                gap_consistent: verdict.gap_consistent,
                elements: vec![],
                t_elements: verdict
                    .elements
                    .iter()
                    .map(|e| TElementWire {
                        label: e.label.clone(),
                        kills_plus: e.kills_plus,
                        kills_minus: e.kills_minus,
                        residual: e.residual,
                    })
                    .collect(),
            }
        }
        other => {
            return Err(CliError::Invalid(format!(
                "unknown criterion '{other}' (expected fidelity or trace)"
            )))
        }
    };
    let optimal = report.is_optimal;
    crate::wire::emit(args.out.as_deref(), &to_json_bytes(&report)?)?;
    Ok(if optimal { 0 } else { 1 })
}

/// `fidopt random`: deterministic instance generation.
pub fn cmd_random(
    dim: usize,
    rank_rho: usize,
    rank_sigma: usize,
    seed: u64,
    structure: &str,
    out_rho: &Path,
    out_sigma: &Path,
    profile: Option<&str>,
) -> CliResult<i32> {
    let profile = resolve_profile(profile);
    let tol = tolerances_from_profile(&profile)?;
    let structure = StructureFlag::from_str(structure).map_err(CliError::from)?;
    let spec = InstanceSpec {
        dim,
        rank_rho,
        rank_sigma,
        seed,
        structure,
    };
    let (rho, sigma) = random_pair(&spec, &tol)?;
    crate::wire::emit(Some(out_rho), &to_json_bytes(rho.matrix())?)?;
    crate::wire::emit(Some(out_sigma), &to_json_bytes(sigma.matrix())?)?;
    Ok(0)
}

/// `fidopt sample`: Monte-Carlo estimation, CSV output.
pub fn cmd_sample(args: &CommonArgs, povm_path: &Path, shots: u64, seed: u64) -> CliResult<i32> {
    let (rho, sigma, tol, _) = args.load()?;
    let povm = read_povm(povm_path, &tol)?;
    let report = sample(&povm, &rho, &sigma, shots, seed)?;
    let csv = sample_csv(&report)?;
    crate::wire::emit(args.out.as_deref(), csv.as_bytes())?;
    Ok(0)
}

pub fn sample_csv(report: &SampleReport) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "shots",
        "bhattacharyya",
        "bhattacharyya_se",
        "tv",
        "tv_se",
        "exact_bhattacharyya",
        "exact_tv",
        "rng",
        "seed",
    ])
    .map_err(|e| CliError::Invalid(e.to_string()))?;
    w.write_record([
        report.shots.to_string(),
        format!("{:.12e}", report.bhattacharyya),
        format!("{:.12e}", report.bhattacharyya_se),
        format!("{:.12e}", report.tv),
        format!("{:.12e}", report.tv_se),
        format!("{:.12e}", report.exact_bhattacharyya),
        format!("{:.12e}", report.exact_tv),
        report.rng.clone(),
        report.seed.to_string(),
    ])
    .map_err(|e| CliError::Invalid(e.to_string()))?;
    String::from_utf8(
        w.into_inner()
            .map_err(|e| CliError::Invalid(e.to_string()))?,
    )
    .map_err(|e| CliError::Invalid(e.to_string()))
}

/// Oracle mode for `fidopt oracle`.
pub enum OracleMode {
    QubitGrid(usize),
    RandomPovm(usize),
}

impl FromStr for OracleMode {
    type Err = CliError;
    fn from_str(s: &str) -> CliResult<Self> {
        if let Some(n) = s.strip_prefix("qubit-grid:") {
            let n: usize = n
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad grid size '{n}'")))?;
            Ok(OracleMode::QubitGrid(n))
        } else if let Some(k) = s.strip_prefix("random-povm:") {
            let k: usize = k
                .parse()
                .map_err(|_| CliError::Invalid(format!("bad sample count '{k}'")))?;
            Ok(OracleMode::RandomPovm(k))
        } else {
            Err(CliError::Invalid(format!("unknown oracle mode '{s}'")))
        }
    }
}

/// `fidopt oracle`: brute-force bounds on F and D.
pub fn cmd_oracle(args: &CommonArgs, mode: &OracleMode, seed: u64) -> CliResult<i32> {
    let (rho, sigma, tol, profile) = args.load()?;
    let f = fidopt::divergence::fidelity(&rho, &sigma)?;
    let d = fidopt::divergence::trace_distance(&rho, &sigma)?;
    let report = match mode {
        OracleMode::QubitGrid(n) => {
            let scan = qubit_grid_scan(&rho, &sigma, *n, f, 1e-6)?;
            OracleReport {
                meta: Meta::new(&profile, Some(seed)),
                mode: format!("qubit-grid:{n}"),
                evaluations: scan.evaluations,
                f_exact: f,
                d_exact: d,
                min_induced_fidelity: scan.min_fidelity,
                fidelity_gap: scan.min_fidelity - f,
                max_induced_tv: scan.max_tv,
                tv_gap: d - scan.max_tv,
                argmin_direction: Some(scan.argmin),
            }
        }
        OracleMode::RandomPovm(k) => {
            let scan = random_povm_scan(&rho, &sigma, *k, seed, &tol)?;
            OracleReport {
                meta: Meta::new(&profile, Some(seed)),
                mode: format!("random-povm:{k}"),
                evaluations: scan.evaluations,
                f_exact: f,
                d_exact: d,
                min_induced_fidelity: scan.min_fidelity,
                fidelity_gap: scan.min_fidelity - f,
                max_induced_tv: scan.max_tv,
                tv_gap: d - scan.max_tv,
                argmin_direction: None,
            }
        }
    };
    crate::wire::emit(args.out.as_deref(), &to_json_bytes(&report)?)?;
    Ok(0)
}

/// Re-exported for tests that need the raw matrix reader.
pub fn read_matrix_file(path: &Path) -> CliResult<Matrix> {
    crate::wire::read_matrix(path)
}

/// Re-exported for tests: load a POVM with a given profile.
pub fn read_povm_file(path: &Path, tol: &Tolerances) -> CliResult<Measurement> {
    read_povm(path, tol)
}
