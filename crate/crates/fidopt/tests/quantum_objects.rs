//! Density operators, POVMs, coarse graining, simplification, equivalence,
//! and measurement statistics.

use fidopt::divergence::{
    classical_fidelity, classical_trace_distance, fidelity, induced_fidelity,
    induced_trace_distance, trace_distance,
};
use fidopt::quantum::{
    coarse_grain, commuting_povms, equivalent, measure, simplify, CoarseGrainingMap,
    OutcomeDistribution, Povm,
};
use fidopt::random::{random_povm, random_state, rng_from_seed};
use fidopt::{Matrix, State, Tolerances};
use num_complex::Complex64;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn ket(coeffs: &[(f64, f64)]) -> Vec<Complex64> {
    coeffs.iter().map(|(re, im)| Complex64::new(*re, *im)).collect()
}

fn zero_state() -> State {
    State::from_pure(&ket(&[(1.0, 0.0), (0.0, 0.0)]), &tol()).unwrap()
}

fn plus_state() -> State {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    State::from_pure(&ket(&[(r, 0.0), (r, 0.0)]), &tol()).unwrap()
}

fn comp_basis_pvm() -> Povm<f64> {
    Povm::from_operators(
        vec![Matrix::diag(&[1.0, 0.0]), Matrix::diag(&[0.0, 1.0])],
        &tol(),
    )
    .unwrap()
}

fn pm_basis_pvm() -> Povm<f64> {
    let h = 0.5;
    let plus = Matrix::from_real_rows(vec![vec![h, h], vec![h, h]]).unwrap();
    let minus = Matrix::from_real_rows(vec![vec![h, -h], vec![-h, h]]).unwrap();
    Povm::from_operators(vec![plus, minus], &tol()).unwrap()
}

#[test]
fn density_operator_validation() {
    // Trace must be one.
    assert!(State::new(Matrix::diag(&[0.5, 0.2]), &tol()).is_err());
    // PSD within the clip.
    assert!(State::new(Matrix::diag(&[1.1, -0.1]), &tol()).is_err());
    // Hermitian.
    let mut m = Matrix::diag(&[0.5, 0.5]);
    m[(0, 1)] = Complex64::new(0.3, 0.0);
    assert!(State::new(m, &tol()).is_err());
    // A valid mixed state.
    let s = State::new(Matrix::diag(&[0.6, 0.4]), &tol()).unwrap();
    assert_eq!(s.rank(), 2);
    assert!(!s.is_pure());
}

#[test]
fn povm_validation_and_pvm_flag() {
    assert!(comp_basis_pvm().is_pvm());
    assert!(pm_basis_pvm().is_pvm());
    // Not summing to identity.
    assert!(Povm::from_operators(vec![Matrix::diag(&[1.0, 0.0])], &tol()).is_err());
    // Non-PSD element.
    assert!(Povm::from_operators(
        vec![Matrix::diag(&[1.5, 0.5]), Matrix::diag(&[-0.5, 0.5])],
        &tol()
    )
    .is_err());
    // A genuinely fuzzy POVM is not flagged as a PVM.
    let half = Matrix::diag(&[0.5, 0.5]);
    let p = Povm::from_operators(vec![half.clone(), half], &tol()).unwrap();
    assert!(!p.is_pvm());
}

#[test]
fn measure_examples() {
    let d = measure(&comp_basis_pvm(), &zero_state()).unwrap();
    let ps: Vec<f64> = d.values().collect();
    assert!((ps[0] - 1.0).abs() < 1e-12 && ps[1].abs() < 1e-12);

    let trivial = Povm::trivial(2, &tol()).unwrap();
    let d1 = measure(&trivial, &plus_state()).unwrap();
    assert!((d1.values().next().unwrap() - 1.0).abs() < 1e-12);

    let d2 = measure(&pm_basis_pvm(), &zero_state()).unwrap();
    for p in d2.values() {
        assert!((p - 0.5).abs() < 1e-12);
    }

    // Dimension mismatch.
    let s3 = State::new(Matrix::diag(&[0.5, 0.3, 0.2]), &tol()).unwrap();
    assert!(measure(&comp_basis_pvm(), &s3).is_err());
}

#[test]
fn coarse_grain_examples() {
    let pvm3 = Povm::from_operators(
        vec![
            Matrix::diag(&[1.0, 0.0, 0.0]),
            Matrix::diag(&[0.0, 1.0, 0.0]),
            Matrix::diag(&[0.0, 0.0, 1.0]),
        ],
        &tol(),
    )
    .unwrap();

    let id = CoarseGrainingMap::identity(3);
    let same = coarse_grain(&pvm3, &id, &tol()).unwrap();
    assert!(equivalent(&same, &pvm3, &tol()).unwrap());

    let all = CoarseGrainingMap::merge_all(3);
    let merged = coarse_grain(&pvm3, &all, &tol()).unwrap();
    assert_eq!(merged.len(), 1);
    assert!(merged.elements()[0].1.distance(&Matrix::identity(3)) < 1e-12);

    let pairr = CoarseGrainingMap::new(vec![vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
    let two = coarse_grain(&pvm3, &pairr, &tol()).unwrap();
    assert_eq!(two.len(), 2);
    assert!(two.elements()[0].1.distance(&Matrix::diag(&[1.0, 1.0, 0.0])) < 1e-12);
    assert_eq!(two.elements()[0].0, "E0+E1");

    // Column sums must be one.
    assert!(CoarseGrainingMap::<f64>::new(vec![vec![0.5, 1.0], vec![0.2, 0.0]]).is_err());
}

#[test]
fn simplify_merges_proportional_elements() {
    let p = Matrix::diag(&[1.0, 0.0]);
    let q = Matrix::diag(&[0.0, 1.0]);
    let povm = Povm::new(
        vec![
            ("a".into(), p.scale(0.3)),
            ("b".into(), p.scale(0.7)),
            ("c".into(), q),
        ],
        &tol(),
    )
    .unwrap();
    let s = simplify(&povm, &tol()).unwrap();
    assert_eq!(s.len(), 2);
    assert_eq!(s.elements()[0].0, "a+b");
    assert!(s.elements()[0].1.distance(&p) < 1e-12);

    // Already-simple PVM unchanged.
    let pvm = comp_basis_pvm();
    let s2 = simplify(&pvm, &tol()).unwrap();
    assert_eq!(s2.len(), 2);
}

#[test]
fn simplify_drops_zero_and_restores_count() {
    let mut rng = rng_from_seed(5);
    let base = random_povm(3, 4, &mut rng, &tol()).unwrap();
    // Pad with scaled duplicates of each element.
    let mut padded: Vec<(String, Matrix)> = Vec::new();
    for (label, e) in base.elements() {
        padded.push((format!("{label}.x"), e.scale(0.25)));
        padded.push((format!("{label}.y"), e.scale(0.75)));
    }
    padded.push(("z".into(), Matrix::zeros(3, 3)));
    let fat = Povm::new(padded, &tol()).unwrap();
    let slim = simplify(&fat, &tol()).unwrap();
    assert_eq!(slim.len(), base.len());
}

#[test]
fn equivalence_examples() {
    let pvm = comp_basis_pvm();
    let permuted = Povm::new(
        vec![
            ("x".into(), Matrix::diag(&[0.0, 1.0])),
            ("y".into(), Matrix::diag(&[1.0, 0.0])),
        ],
        &tol(),
    )
    .unwrap();
    assert!(equivalent(&pvm, &permuted, &tol()).unwrap());
    assert!(!equivalent(&pvm, &pm_basis_pvm(), &tol()).unwrap());

    // A nontrivial coarse graining is not equivalent.
    let pvm3 = Povm::from_operators(
        vec![
            Matrix::diag(&[1.0, 0.0, 0.0]),
            Matrix::diag(&[0.0, 1.0, 0.0]),
            Matrix::diag(&[0.0, 0.0, 1.0]),
        ],
        &tol(),
    )
    .unwrap();
    let s = CoarseGrainingMap::new(vec![vec![1.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
    let cg = coarse_grain(&pvm3, &s, &tol()).unwrap();
    assert!(!equivalent(&pvm3, &cg, &tol()).unwrap());
}

#[test]
fn equivalence_reflexive_symmetric_on_random() {
    let mut rng = rng_from_seed(11);
    for _ in 0..5 {
        let a = random_povm(3, 3, &mut rng, &tol()).unwrap();
        let b = random_povm(3, 3, &mut rng, &tol()).unwrap();
        assert!(equivalent(&a, &a, &tol()).unwrap());
        assert_eq!(
            equivalent(&a, &b, &tol()).unwrap(),
            equivalent(&b, &a, &tol()).unwrap()
        );
    }
}

#[test]
fn commuting_povms_examples() {
    let d1 = Povm::from_operators(
        vec![Matrix::diag(&[1.0, 0.0]), Matrix::diag(&[0.0, 1.0])],
        &tol(),
    )
    .unwrap();
    let d2 = Povm::from_operators(
        vec![Matrix::diag(&[0.3, 0.6]), Matrix::diag(&[0.7, 0.4])],
        &tol(),
    )
    .unwrap();
    assert!(commuting_povms(&d1, &d2, &tol()).unwrap());
    assert!(!commuting_povms(&comp_basis_pvm(), &pm_basis_pvm(), &tol()).unwrap());
    let trivial = Povm::trivial(2, &tol()).unwrap();
    assert!(commuting_povms(&pm_basis_pvm(), &trivial, &tol()).unwrap());
}

#[test]
fn classical_fidelity_examples() {
    let p = OutcomeDistribution::<f64> {
        probabilities: vec![("0".into(), 0.5), ("1".into(), 0.5)],
    };
    let q = OutcomeDistribution::<f64> {
        probabilities: vec![("0".into(), 1.0), ("1".into(), 0.0)],
    };
    assert!((classical_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
    assert!((classical_fidelity(&p, &q).unwrap() - 0.5).abs() < 1e-12);
    let r = OutcomeDistribution {
        probabilities: vec![("0".into(), 0.0), ("1".into(), 1.0)],
    };
    assert!(classical_fidelity(&q, &r).unwrap().abs() < 1e-12);
    assert!((classical_trace_distance(&q, &r).unwrap() - 1.0).abs() < 1e-12);

    let bad = OutcomeDistribution {
        probabilities: vec![("x".into(), 1.0), ("y".into(), 0.0)],
    };
    assert!(classical_fidelity(&p, &bad).is_err());
}

#[test]
fn fidelity_examples() {
    let z = zero_state();
    let pl = plus_state();
    assert!((fidelity(&z, &z).unwrap() - 1.0).abs() < 1e-12);
    let one = State::from_pure(&ket(&[(0.0, 0.0), (1.0, 0.0)]), &tol()).unwrap();
    assert!(fidelity(&z, &one).unwrap() < 1e-12);
    assert!((fidelity(&z, &pl).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn induced_fidelity_examples() {
    let z = zero_state();
    let pl = plus_state();
    let trivial = Povm::trivial(2, &tol()).unwrap();
    assert!((induced_fidelity(&trivial, &z, &pl).unwrap() - 1.0).abs() < 1e-12);

    // The plus/minus PVM attains F for (|0>, |+>).
    assert!((induced_fidelity(&pm_basis_pvm(), &z, &pl).unwrap() - 0.5).abs() < 1e-10);
    // So does the computational PVM for this pair.
    assert!((induced_fidelity(&comp_basis_pvm(), &z, &pl).unwrap() - 0.5).abs() < 1e-10);

    // Bhattacharyya-squared on diagonal states: (sqrt(0.45) + sqrt(0.05))^2 = 0.8.
    let r1 = State::new(Matrix::diag(&[0.9, 0.1]), &tol()).unwrap();
    let r2 = State::new(Matrix::diag(&[0.5, 0.5]), &tol()).unwrap();
    let expected = (0.45f64.sqrt() + 0.05f64.sqrt()).powi(2);
    assert!((induced_fidelity(&comp_basis_pvm(), &r1, &r2).unwrap() - expected).abs() < 1e-12);
    assert!((expected - 0.8).abs() < 1e-12);
}

#[test]
fn trace_distance_examples() {
    let z = zero_state();
    let pl = plus_state();
    assert!(trace_distance(&z, &z).unwrap() < 1e-12);
    let one = State::from_pure(&ket(&[(0.0, 0.0), (1.0, 0.0)]), &tol()).unwrap();
    assert!((trace_distance(&z, &one).unwrap() - 1.0).abs() < 1e-12);
    assert!((trace_distance(&z, &pl).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);

    // Induced TV: trivial POVM gives zero, computational PVM gives 0.5.
    let trivial = Povm::trivial(2, &tol()).unwrap();
    assert!(induced_trace_distance(&trivial, &z, &pl).unwrap() < 1e-12);
    assert!((induced_trace_distance(&comp_basis_pvm(), &z, &pl).unwrap() - 0.5).abs() < 1e-10);
}

#[test]
fn helstrom_saturation_in_eigenbasis_of_difference() {
    let mut rng = rng_from_seed(31);
    for _ in 0..5 {
        let rho = random_state(2, 2, &mut rng, &tol()).unwrap();
        let sigma = random_state(2, 1, &mut rng, &tol()).unwrap();
        let diff = rho.matrix() - sigma.matrix();
        let eig = fidopt::matrix::hermitian_eigen(&diff).unwrap();
        let ops: Vec<Matrix> = (0..2)
            .map(|k| {
                let col = eig.eigenvectors.column(k);
                Matrix::projector_onto(&col)
            })
            .collect();
        let pvm = Povm::from_operators(ops, &tol()).unwrap();
        let dt = trace_distance(&rho, &sigma).unwrap();
        let de = induced_trace_distance(&pvm, &rho, &sigma).unwrap();
        assert!((dt - de).abs() < 1e-10);
    }
}

#[test]
fn measurement_statistics_commute_with_coarse_graining() {
    let mut rng = rng_from_seed(37);
    let rho = random_state(4, 3, &mut rng, &tol()).unwrap();
    let povm = random_povm(4, 5, &mut rng, &tol()).unwrap();
    let s = fidopt::random::random_stochastic::<f64, _>(3, 5, &mut rng).unwrap();
    let coarse = coarse_grain(&povm, &s, &tol()).unwrap();
    let direct = measure(&coarse, &rho).unwrap();
    let mapped = s.apply_distribution(&measure(&povm, &rho).unwrap());
    for (a, b) in direct.values().zip(mapped.values()) {
        assert!((a - b).abs() < 1e-10);
    }
}
