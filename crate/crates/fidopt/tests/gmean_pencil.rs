//! Geometric means, the nine-way equivalence, polar unitary construction,
//! and the pencil eigensystem, exercised on the qutrit fixture and random
//! instances.

mod common;

use common::*;
use fidopt::gmean::{geometric_mean, gm_equivalence_flags};
use fidopt::matrix::{psd_pinv, psd_sqrt, PsdFunctions};
use fidopt::pencil::{
    alternative_polar_unitary, construct_polar_unitary, parallel_check, pencil_eigensystem,
    supports_commute,
};
use fidopt::random::{
    gaussian_matrix, random_pair_with_rng, random_state, rng_from_seed, InstanceSpec,
    StructureFlag,
};
use fidopt::{Matrix, State};
use num_complex::Complex64;

fn random_psd(d: usize, rank: usize, seed: u64) -> Matrix {
    let mut rng = rng_from_seed(seed);
    let x: Matrix = gaussian_matrix(d, rank, &mut rng);
    (&x * &x.adjoint()).hermitian_part()
}

#[test]
fn gm_identity_absorption() {
    // M(A, A) = A, including singular A.
    for seed in [1u64, 2, 3] {
        let a = random_psd(4, 2, seed);
        let gm = geometric_mean(&a, &a, &tol()).unwrap();
        assert!(gm.mean.distance(&a) <= 1e-9 * (1.0 + a.frobenius_norm()));
    }
}

#[test]
fn gm_of_identity_is_sqrt() {
    let b = Matrix::diag(&[4.0, 9.0]);
    let gm = geometric_mean(&Matrix::identity(2), &b, &tol()).unwrap();
    assert!(gm.mean.distance(&Matrix::diag(&[2.0, 3.0])) <= 1e-12);
}

#[test]
fn gm_commuting_closed_form() {
    let a = Matrix::diag(&[1.0, 4.0]);
    let b = Matrix::diag(&[9.0, 1.0]);
    let gm = geometric_mean(&a, &b, &tol()).unwrap();
    assert!(gm.mean.distance(&Matrix::diag(&[3.0, 2.0])) <= 1e-11);
}

#[test]
fn gm_support_law_random_ranks() {
    // supp(M(A,B)) = supp(Pi_A Pi_B Pi_A) across random rank combinations.
    for seed in 0..12u64 {
        let d = 3 + (seed as usize % 3);
        let ra = 1 + (seed as usize % d);
        let rb = 1 + ((seed as usize + 1) % d);
        let a = random_psd(d, ra, 400 + seed);
        let b = random_psd(d, rb, 500 + seed);
        let gm = geometric_mean(&a, &b, &tol()).unwrap();
        assert!(
            gm.support.distance(&gm.pi_ab) <= 1e-8,
            "seed {seed}: projector distance {}",
            gm.support.distance(&gm.pi_ab)
        );
    }
}

#[test]
fn gm_reciprocal_eigenvalues() {
    // P supported in supp(A) ∩ supp(B) in an eigenspace of M(A,B) with
    // eigenvalue w sits in the eigenspace of M(B+,A+) with eigenvalue 1/w.
    let a = random_psd(4, 4, 61);
    let b = random_psd(4, 4, 62);
    let t = tol();
    let gm = geometric_mean(&a, &b, &t).unwrap();
    let gm_rev = geometric_mean(
        &psd_pinv(&b, &t).unwrap(),
        &psd_pinv(&a, &t).unwrap(),
        &t,
    )
    .unwrap();
    for cluster in gm.positive_clusters() {
        let w = cluster.eigenvalue;
        let p = cluster.projector();
        let img = &gm_rev.mean * &p;
        let expect = p.scale(1.0 / w);
        assert!(
            img.distance(&expect) <= 1e-8 * (1.0 + expect.frobenius_norm()),
            "eigenvalue {w}"
        );
    }
}

#[test]
fn gm_symmetry_under_double_commutation() {
    // Block-diagonal pair where A commutes with Pi_B and B with Pi_A.
    let a = Matrix::diag(&[0.9, 1.7, 0.0, 0.4]);
    let b = Matrix::diag(&[0.2, 0.8, 1.1, 0.0]);
    let t = tol();
    let m_ab = geometric_mean(&a, &b, &t).unwrap();
    let m_ba = geometric_mean(&b, &a, &t).unwrap();
    assert!(m_ab.mean.distance(&m_ba.mean) <= 1e-9);
}

#[test]
fn gm_nonsingular_first_argument_supports() {
    let a = random_psd(4, 4, 71);
    let b = random_psd(4, 2, 72);
    // Pseudo-inverses of random Gaussian PSD matrices are ill conditioned;
    // support decisions need a rank cut above the amplified round-off.
    let t = fidopt::tol::ToleranceConfig {
        rank_tol_factor: 1e-8,
        ..tol()
    };
    let fb = PsdFunctions::new(&b, &t).unwrap();
    let supp_b = fb.support_projector();
    let b_pinv = fb.pinv();
    for (name, mean) in [
        ("M(A,B)", geometric_mean(&a, &b, &t).unwrap()),
        ("M(B,A)", geometric_mean(&b, &a, &t).unwrap()),
        ("M(A,B+)", geometric_mean(&a, &b_pinv, &t).unwrap()),
        ("M(B+,A)", geometric_mean(&b_pinv, &a, &t).unwrap()),
    ] {
        assert!(
            mean.support.distance(&supp_b) <= 1e-8,
            "{name}: support differs from supp(B)"
        );
    }
}

#[test]
fn nine_flags_commuting_block_pair() {
    let a = Matrix::diag(&[1.0, 2.0, 0.0]);
    let b = Matrix::diag(&[3.0, 0.0, 4.0]);
    let flags = gm_equivalence_flags(&a, &b, &tol()).unwrap();
    assert!(flags.unanimous(), "{flags:?}");
    assert!(flags.supports_commute);
}

#[test]
fn nine_flags_qutrit_fixture() {
    let rho = qutrit_rho();
    let sigma = qutrit_sigma();
    let flags = gm_equivalence_flags(rho.matrix(), sigma.matrix(), &tol()).unwrap();
    assert!(flags.unanimous(), "{flags:?}");
    assert!(flags.supports_commute);

    // M(rho+, sigma) = M(sigma+, rho) = |1><1|.
    let t = tol();
    let e1 = proj(&ket(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]));
    let m_rs = geometric_mean(&rho.pinv(), sigma.matrix(), &t).unwrap();
    let m_sr = geometric_mean(&sigma.pinv(), rho.matrix(), &t).unwrap();
    assert!(m_rs.mean.distance(&e1) <= 1e-9);
    assert!(m_sr.mean.distance(&e1) <= 1e-9);
}

#[test]
fn nine_flags_pure_qubit_pair_all_false() {
    let rho = zero_state();
    let sigma = plus_state();
    let flags = gm_equivalence_flags(rho.matrix(), sigma.matrix(), &tol()).unwrap();
    assert!(flags.unanimous(), "{flags:?}");
    assert!(!flags.supports_commute);
}

#[test]
fn nine_flags_unanimous_on_random_instances() {
    for seed in 0..10u64 {
        let d = 3 + (seed as usize % 3);
        let a = random_psd(d, 1 + (seed as usize % d), 800 + seed);
        let b = random_psd(d, 1 + ((seed as usize + 2) % d), 900 + seed);
        let flags = gm_equivalence_flags(&a, &b, &tol()).unwrap();
        assert!(flags.unanimous(), "seed {seed}: {flags:?}");
    }
}

#[test]
fn polar_unitary_commuting_diagonal_is_identity() {
    let t = tol();
    let rho = State::new(Matrix::diag(&[0.6, 0.3, 0.1]), &t).unwrap();
    let sigma = State::new(Matrix::diag(&[0.2, 0.5, 0.3]), &t).unwrap();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    assert!(u.u.distance(&Matrix::identity(3)) <= 1e-10);
}

#[test]
fn polar_unitary_random_full_rank() {
    let mut rng = rng_from_seed(1234);
    let t = tol();
    for _ in 0..6 {
        let rho = random_state(4, 4, &mut rng, &t).unwrap();
        let sigma = random_state(4, 4, &mut rng, &t).unwrap();
        let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
        assert!(u.residual <= 1e-9);
        let defect = (&(&u.u.adjoint() * &u.u) - &Matrix::identity(4)).frobenius_norm();
        assert!(defect <= 1e-10 * 4.0);
    }
}

#[test]
fn polar_unitary_rejects_singular_sum() {
    let t = tol();
    let rho = State::new(Matrix::diag(&[1.0, 0.0, 0.0]), &t).unwrap();
    let sigma = State::new(Matrix::diag(&[0.0, 1.0, 0.0]), &t).unwrap();
    assert!(matches!(
        construct_polar_unitary(&rho, &sigma, &t),
        Err(fidopt::Error::SingularSum)
    ));
}

#[test]
fn polar_unitary_commutes_with_support_when_sigma_does() {
    // sigma commuting with Pi_rho (block structure) forces U Pi_rho = Pi_rho U.
    let mut rng = rng_from_seed(77);
    let t = tol();
    for _ in 0..4 {
        let spec = InstanceSpec {
            dim: 4,
            rank_rho: 2,
            rank_sigma: 3,
            seed: 0,
            structure: StructureFlag::CommutingStates,
        };
        let (rho, sigma) = random_pair_with_rng(&spec, &mut rng, &t).unwrap();
        assert!(supports_commute(&rho, &sigma, &t));
        assert!(
            sigma.matrix().commutator_norm(rho.support_projector()) <= 1e-10,
            "construction should make sigma commute with Pi_rho"
        );
        let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
        assert!(u.aligned);
        assert!(u.u.commutator_norm(rho.support_projector()) <= 1e-8);
    }
}

#[test]
fn qutrit_paper_unitary_verifies() {
    let rho = qutrit_rho();
    let sigma = qutrit_sigma();
    let t = tol();
    let u = qutrit_paper_unitary();
    // Unitarity.
    assert!((&(&u.adjoint() * &u) - &Matrix::identity(3)).frobenius_norm() <= 1e-12);
    // The printed U sqrt(rho) matches.
    let usr = &u * rho.sqrt();
    assert!(usr.distance(&qutrit_paper_u_sqrt_rho()) <= 1e-12);
    // Polar relation.
    let product = rho.sqrt() * sigma.sqrt();
    let g = psd_sqrt(
        &(&(rho.sqrt() * sigma.matrix()) * rho.sqrt()).hermitian_part(),
        &t,
    )
    .unwrap();
    assert!((&(&product * &u) - &g).frobenius_norm() <= 1e-9);
}

#[test]
fn qutrit_pencil_eigensystem_golden() {
    let rho = qutrit_rho();
    let sigma = qutrit_sigma();
    let t = tol();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    assert!(u.aligned);
    let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
    assert!(!sys.singular_pencil);
    assert_eq!(sys.finite.len(), 2);

    let e0 = ket(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
    let e1 = ket(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)]);
    let e2 = ket(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);

    let zero = &sys.finite[0];
    assert!(zero.lambda.abs() <= 1e-9);
    assert_eq!(zero.basis.ncols(), 1);
    assert!(vector_matches_up_to_phase(&zero.basis.column(0), &e0, 1e-9));

    let one = &sys.finite[1];
    assert!((one.lambda - 1.0).abs() <= 1e-9);
    assert_eq!(one.basis.ncols(), 1);
    assert!(vector_matches_up_to_phase(&one.basis.column(0), &e1, 1e-9));

    assert_eq!(sys.infinite_basis.ncols(), 1);
    assert!(vector_matches_up_to_phase(
        &sys.infinite_basis.column(0),
        &e2,
        1e-9
    ));

    for es in &sys.finite {
        assert!(es.residual <= 1e-8);
    }
}

#[test]
fn pencil_diagonal_commuting_closed_form() {
    // Full-rank commuting diagonal pair with U = I: eigenvalues
    // sqrt(sigma_i / rho_i) with standard basis eigenvectors.
    let t = tol();
    let rho = State::new(Matrix::diag(&[0.5, 0.3, 0.2]), &t).unwrap();
    let sigma = State::new(Matrix::diag(&[0.1, 0.3, 0.6]), &t).unwrap();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    assert!(u.u.distance(&Matrix::identity(3)) <= 1e-10);
    let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
    assert!(!sys.singular_pencil);
    assert_eq!(sys.infinite_basis.ncols(), 0);
    let mut expected: Vec<f64> = vec![
        (0.1f64 / 0.5).sqrt(),
        (0.3f64 / 0.3).sqrt(),
        (0.6f64 / 0.2).sqrt(),
    ];
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let got = sys.eigenvalues();
    assert_eq!(got.len(), 3);
    for (g, e) in got.iter().zip(&expected) {
        assert!((g - e).abs() <= 1e-9, "{g} vs {e}");
    }
    for es in &sys.finite {
        assert_eq!(es.basis.ncols(), 1);
        let v = es.basis.column(0);
        let weight: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let max = v.iter().map(|z| z.norm_sqr()).fold(0.0f64, f64::max);
        assert!((max - weight).abs() <= 1e-12, "not a basis vector");
    }
}

#[test]
fn pencil_pure_qubit_pair_structure() {
    // |0>, |+>: a singular pencil with distinguished eigenpairs
    // (0, |->), (sqrt(F), |0>) and the infinite eigenvector |1>.
    let t = tol();
    let rho = zero_state();
    let sigma = plus_state();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
    assert!(sys.singular_pencil);
    assert_eq!(sys.finite.len(), 2);

    let r = std::f64::consts::FRAC_1_SQRT_2;
    let minus = ket(&[(r, 0.0), (-r, 0.0)]);
    assert!(sys.finite[0].lambda.abs() <= 1e-10);
    assert!(vector_matches_up_to_phase(
        &sys.finite[0].basis.column(0),
        &minus,
        1e-9
    ));

    assert!((sys.finite[1].lambda - r).abs() <= 1e-9);
    let e0 = ket(&[(1.0, 0.0), (0.0, 0.0)]);
    assert!(vector_matches_up_to_phase(
        &sys.finite[1].basis.column(0),
        &e0,
        1e-9
    ));

    let e1 = ket(&[(0.0, 0.0), (1.0, 0.0)]);
    assert_eq!(sys.infinite_basis.ncols(), 1);
    assert!(vector_matches_up_to_phase(
        &sys.infinite_basis.column(0),
        &e1,
        1e-9
    ));
}

#[test]
fn pencil_eigenspaces_intersect_trivially() {
    let mut rng = rng_from_seed(333);
    let t = tol();
    for _ in 0..4 {
        let spec = InstanceSpec {
            dim: 4,
            rank_rho: 3,
            rank_sigma: 3,
            seed: 0,
            structure: StructureFlag::CommutingSupports,
        };
        let (rho, sigma) = random_pair_with_rng(&spec, &mut rng, &t).unwrap();
        let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
        let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
        let mut bases: Vec<Matrix> = sys.finite.iter().map(|e| e.basis.clone()).collect();
        if sys.infinite_basis.ncols() > 0 {
            bases.push(sys.infinite_basis.clone());
        }
        for i in 0..bases.len() {
            for j in (i + 1)..bases.len() {
                let joined = Matrix::hcat(&[&bases[i], &bases[j]]);
                let gram = &joined.adjoint() * &joined;
                let eig = fidopt::matrix::hermitian_eigen(&gram).unwrap();
                assert!(
                    eig.eigenvalues[0] > 1e-8,
                    "eigenspaces {i} and {j} intersect nontrivially"
                );
            }
        }
    }
}

#[test]
fn pencil_sum_escapes_eigenspace() {
    // P + Q for positive P, Q in distinct eigenspaces is not parallel.
    let t = tol();
    let rho = qutrit_rho();
    let sigma = qutrit_sigma();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
    let p = {
        let b = &sys.finite[0].basis;
        b * &b.adjoint()
    };
    let q = {
        let b = &sys.finite[1].basis;
        b * &b.adjoint()
    };
    assert!(parallel_check(&p, &rho, &sigma, &u, &t).unwrap().verdict);
    assert!(parallel_check(&q, &rho, &sigma, &u, &t).unwrap().verdict);
    let sum = &p + &q;
    assert!(!parallel_check(&sum, &rho, &sigma, &u, &t).unwrap().verdict);
}

#[test]
fn pencil_geometric_mean_correspondence() {
    // Eigenvectors inside supp(rho) match eigenvectors of M(rho+, sigma)
    // with the same eigenvalue, vector by vector.
    let mut rng = rng_from_seed(555);
    let t = tol();
    let spec = InstanceSpec {
        dim: 5,
        rank_rho: 3,
        rank_sigma: 4,
        seed: 0,
        structure: StructureFlag::CommutingSupports,
    };
    let (rho, sigma) = random_pair_with_rng(&spec, &mut rng, &t).unwrap();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
    let gm = geometric_mean(&rho.pinv(), sigma.matrix(), &t).unwrap();
    let pi_rho = rho.support_projector();
    for es in &sys.finite {
        for c in 0..es.basis.ncols() {
            let v = es.basis.column(c);
            let inside: f64 = {
                let pv = pi_rho.apply(&v);
                pv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
            };
            if inside < 1.0 - 1e-8 {
                continue; // not a supp(rho) eigenvector
            }
            let mv = gm.mean.apply(&v);
            let want: Vec<Complex64> = v.iter().map(|z| z * es.lambda).collect();
            let err: f64 = mv
                .iter()
                .zip(&want)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(err <= 1e-8, "lambda {} err {err}", es.lambda);
        }
    }
}

#[test]
fn pencil_commuting_support_split() {
    // With commuting supports every eigenvector lies in Null(rho) or
    // supp(rho).
    let mut rng = rng_from_seed(777);
    let t = tol();
    for _ in 0..3 {
        let spec = InstanceSpec {
            dim: 4,
            rank_rho: 2,
            rank_sigma: 3,
            seed: 0,
            structure: StructureFlag::CommutingSupports,
        };
        let (rho, sigma) = random_pair_with_rng(&spec, &mut rng, &t).unwrap();
        let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
        let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
        let pi = rho.support_projector();
        for es in &sys.finite {
            for c in 0..es.basis.ncols() {
                let v = es.basis.column(c);
                let pv = pi.apply(&v);
                let w: f64 = pv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                assert!(
                    w <= 1e-8 || w >= 1.0 - 1e-8,
                    "eigenvector splits across supp(rho): weight {w}"
                );
            }
        }
    }
}

#[test]
fn pencil_full_rank_matches_geometric_mean_spectrum() {
    let mut rng = rng_from_seed(999);
    let t = tol();
    let rho = random_state(4, 4, &mut rng, &t).unwrap();
    let sigma = random_state(4, 2, &mut rng, &t).unwrap();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    let sys = pencil_eigensystem(&rho, &sigma, &u, &t).unwrap();
    let gm = geometric_mean(&rho.pinv(), sigma.matrix(), &t).unwrap();
    let mut gm_eigs: Vec<f64> = gm.clusters.iter().map(|c| c.eigenvalue).collect();
    gm_eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let got = sys.eigenvalues();
    assert_eq!(got.len(), gm_eigs.len());
    for (g, e) in got.iter().zip(&gm_eigs) {
        assert!((g - e).abs() <= 1e-8 * (1.0 + e.abs()), "{g} vs {e}");
    }
    assert_eq!(sys.infinite_basis.ncols(), 0);
}

#[test]
fn parallel_check_examples() {
    let t = tol();
    // Element in Null(rho): first branch, kappa = None.
    let mut rng = rng_from_seed(1001);
    let rho = random_state(3, 2, &mut rng, &t).unwrap();
    let sigma = random_state(3, 3, &mut rng, &t).unwrap();
    let u = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    let nb = rho.null_basis();
    let e_null = &nb * &nb.adjoint();
    let c = parallel_check(&e_null, &rho, &sigma, &u, &t).unwrap();
    assert!(c.verdict);
    assert!(c.kappa.is_none());

    // Eigenprojector of M(rho^{-1}, sigma) for full-rank rho: kappa equals
    // the eigenvalue.
    let rho_full = random_state(3, 3, &mut rng, &t).unwrap();
    let sigma2 = random_state(3, 3, &mut rng, &t).unwrap();
    let u2 = construct_polar_unitary(&rho_full, &sigma2, &t).unwrap();
    let gm = geometric_mean(&rho_full.pinv(), sigma2.matrix(), &t).unwrap();
    for cluster in gm.positive_clusters() {
        let c = parallel_check(&cluster.projector(), &rho_full, &sigma2, &u2, &t).unwrap();
        assert!(c.verdict);
        let kappa = c.kappa.unwrap();
        assert!(
            (kappa - cluster.eigenvalue).abs() <= 1e-8 * (1.0 + cluster.eigenvalue),
            "kappa {kappa} vs eigenvalue {}",
            cluster.eigenvalue
        );
    }

    // Identity element on a noncommuting pure pair fails.
    let z = zero_state();
    let p = plus_state();
    let u3 = construct_polar_unitary(&z, &p, &t).unwrap();
    let c = parallel_check(&Matrix::identity(2), &z, &p, &u3, &t).unwrap();
    assert!(!c.verdict);
}

#[test]
fn alternative_unitary_gives_same_verdicts() {
    let t = tol();
    let rho = qutrit_rho();
    let sigma = qutrit_sigma();
    let u1 = construct_polar_unitary(&rho, &sigma, &t).unwrap();
    let u2 = alternative_polar_unitary(&rho, &sigma, &t)
        .unwrap()
        .expect("singular product admits an alternative unitary");
    assert!(u1.u.distance(&u2.u) > 1e-6, "unitaries should differ");
    // Verdicts agree element by element on the canonical PVM and on a
    // deliberately non-parallel element.
    let candidates = vec![
        proj(&ket(&[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)])),
        proj(&ket(&[(0.0, 0.0), (1.0, 0.0), (0.0, 0.0)])),
        proj(&ket(&[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)])),
        Matrix::identity(3),
        proj(&ket(&[(0.8, 0.0), (0.6, 0.0), (0.0, 0.0)])),
    ];
    for e in &candidates {
        let c1 = parallel_check(e, &rho, &sigma, &u1, &t).unwrap();
        let c2 = parallel_check(e, &rho, &sigma, &u2, &t).unwrap();
        assert_eq!(c1.verdict, c2.verdict);
    }
}
