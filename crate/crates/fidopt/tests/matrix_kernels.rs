//! Kernel-level checks: eigendecomposition, SVD, pseudo-inverse, PSD
//! functions, and eigenvalue clustering.

use fidopt::matrix::{
    cluster_eigenspaces, hermitian_eigen, null_space, pseudo_inverse, psd_sqrt, support_projector,
    svd, ComplexMatrix, PsdFunctions,
};
use fidopt::random::{gaussian_matrix, haar_unitary, rng_from_seed};
use fidopt::scalar::C;
use fidopt::{Matrix, Tolerances};
use num_complex::Complex64;
use proptest::prelude::*;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn random_hermitian(d: usize, seed: u64) -> Matrix {
    let mut rng = rng_from_seed(seed);
    let g: Matrix = gaussian_matrix(d, d, &mut rng);
    g.hermitian_part()
}

#[test]
fn eigen_reconstructs_and_is_orthonormal() {
    for seed in 0..20u64 {
        let d = 2 + (seed as usize % 7);
        let a = random_hermitian(d, seed);
        let eig = hermitian_eigen(&a).unwrap();
        let recon = eig.reconstruct();
        let scale = 1.0 + a.frobenius_norm();
        assert!(recon.distance(&a) <= 1e-10 * scale, "seed {seed}");
        let v = &eig.eigenvectors;
        let gram = &v.adjoint() * v;
        assert!(gram.distance(&Matrix::identity(d)) <= 1e-12 * d as f64);
        for k in 1..d {
            assert!(eig.eigenvalues[k] >= eig.eigenvalues[k - 1]);
        }
    }
}

#[test]
fn eigen_handles_degenerate_spectra() {
    // Projector-like spectra with heavy degeneracy.
    let mut rng = rng_from_seed(7);
    let u: Matrix = haar_unitary(6, &mut rng);
    let d = Matrix::diag(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    let a = &(&u * &d) * &u.adjoint();
    let eig = hermitian_eigen(&a).unwrap();
    assert!(eig.reconstruct().distance(&a) <= 1e-12);
    for k in 0..3 {
        assert!(eig.eigenvalues[k].abs() <= 1e-13);
        assert!((eig.eigenvalues[k + 3] - 1.0).abs() <= 1e-13);
    }
}

#[test]
fn eigen_is_deterministic() {
    let a = random_hermitian(5, 42);
    let e1 = hermitian_eigen(&a).unwrap();
    let e2 = hermitian_eigen(&a).unwrap();
    assert_eq!(e1.eigenvalues, e2.eigenvalues);
    assert_eq!(e1.eigenvectors, e2.eigenvectors);
}

#[test]
fn svd_full_reconstruction_and_unitarity() {
    for seed in 0..12u64 {
        let mut rng = rng_from_seed(seed);
        let (m, n) = (2 + (seed as usize % 4), 2 + ((seed as usize + 2) % 4));
        let a: Matrix = gaussian_matrix(m, n, &mut rng);
        let dec = svd(&a).unwrap();
        assert!(dec.reconstruct().distance(&a) <= 1e-11 * (1.0 + a.frobenius_norm()));
        let iu = &dec.u.adjoint() * &dec.u;
        let iv = &dec.v.adjoint() * &dec.v;
        assert!(iu.distance(&Matrix::identity(m)) <= 1e-11);
        assert!(iv.distance(&Matrix::identity(n)) <= 1e-11);
        for k in 1..dec.s.len() {
            assert!(dec.s[k] <= dec.s[k - 1] + 1e-14);
        }
    }
}

#[test]
fn svd_rank_deficient() {
    // Rank-2 4x4 built from outer products.
    let mut rng = rng_from_seed(3);
    let x: Matrix = gaussian_matrix(4, 2, &mut rng);
    let a = &x * &x.adjoint();
    let dec = svd(&a).unwrap();
    let cut = tol().rank_threshold(4, dec.sigma_max());
    assert_eq!(dec.rank(cut), 2);
    let ns = dec.null_space(cut);
    assert_eq!(ns.ncols(), 2);
    assert!((&a * &ns).frobenius_norm() <= 1e-10 * a.frobenius_norm());
}

fn penrose_residuals(o: &Matrix, p: &Matrix) -> [f64; 4] {
    [
        (&(&(o * p) * o) - o).frobenius_norm(),
        (&(&(p * o) * p) - p).frobenius_norm(),
        (o * p).hermitian_asymmetry(),
        (p * o).hermitian_asymmetry(),
    ]
}

#[test]
fn pseudo_inverse_diagonal_and_identity() {
    let o = Matrix::diag(&[2.0, 0.0]);
    let p = pseudo_inverse(&o, &tol()).unwrap();
    assert!(p.distance(&Matrix::diag(&[0.5, 0.0])) <= 1e-14);

    let i3 = Matrix::identity(3);
    let p3 = pseudo_inverse(&i3, &tol()).unwrap();
    assert!(p3.distance(&i3) <= 1e-14);
}

#[test]
fn pseudo_inverse_satisfies_penrose_conditions() {
    for seed in 0..10u64 {
        let mut rng = rng_from_seed(100 + seed);
        let o: Matrix = gaussian_matrix(4, 4, &mut rng);
        let p = pseudo_inverse(&o, &tol()).unwrap();
        let scale = 1.0 + o.frobenius_norm() * p.frobenius_norm();
        for r in penrose_residuals(&o, &p) {
            assert!(r <= 1e-10 * scale, "seed {seed}: residual {r:e}");
        }
        // Involution: (O+)+ = O.
        let pp = pseudo_inverse(&p, &tol()).unwrap();
        assert!(pp.distance(&o) <= 1e-9 * (1.0 + o.frobenius_norm()));
    }
}

#[test]
fn pseudo_inverse_rejects_non_finite() {
    let mut o = Matrix::zeros(2, 2);
    o[(0, 0)] = Complex64::new(f64::NAN, 0.0);
    assert!(pseudo_inverse(&o, &tol()).is_err());
}

#[test]
fn psd_sqrt_examples() {
    let s = psd_sqrt(&Matrix::diag(&[4.0, 9.0]), &tol()).unwrap();
    assert!(s.distance(&Matrix::diag(&[2.0, 3.0])) <= 1e-12);

    let z = psd_sqrt(&Matrix::zeros(3, 3), &tol()).unwrap();
    assert!(z.frobenius_norm() == 0.0);
}

#[test]
fn psd_sqrt_squares_back() {
    for seed in 0..8u64 {
        let mut rng = rng_from_seed(200 + seed);
        let x: Matrix = gaussian_matrix(5, 5, &mut rng);
        let a = &x * &x.adjoint();
        let s = psd_sqrt(&a, &tol()).unwrap();
        assert!((&(&s * &s) - &a).frobenius_norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
    }
}

#[test]
fn psd_sqrt_rejects_indefinite() {
    let a = Matrix::diag(&[1.0, -0.5]);
    assert!(psd_sqrt(&a, &tol()).is_err());
    // Round-off level negativity is clipped instead.
    let b = Matrix::diag(&[1.0, -1e-12]);
    let s = psd_sqrt(&b, &tol()).unwrap();
    assert!(s[(1, 1)].re.abs() <= 1e-6);
}

#[test]
fn support_projector_examples() {
    let p = support_projector(&Matrix::diag(&[0.7, 0.3, 0.0]), &tol()).unwrap();
    assert!(p.distance(&Matrix::diag(&[1.0, 1.0, 0.0])) <= 1e-12);

    let idp = support_projector(&Matrix::identity(4), &tol()).unwrap();
    assert!(idp.distance(&Matrix::identity(4)) <= 1e-12);
}

#[test]
fn support_projector_rank2_random() {
    let mut rng = rng_from_seed(9);
    let x: Matrix = gaussian_matrix(4, 2, &mut rng);
    let a = &x * &x.adjoint();
    let f = PsdFunctions::new(&a, &tol()).unwrap();
    let p = f.support_projector();
    assert_eq!(f.rank(), 2);
    assert!((&(&p * &a) - &a).frobenius_norm() <= 1e-9 * (1.0 + a.frobenius_norm()));
    assert!((&(&p * &p) - &p).frobenius_norm() <= 1e-12);
    assert!(p.hermitian_asymmetry() <= 1e-12);
    assert!(p.commutator_norm(&a) <= 1e-10 * (1.0 + a.frobenius_norm()));
}

#[test]
fn support_projector_rejects_non_hermitian() {
    let mut a = Matrix::zeros(2, 2);
    a[(0, 1)] = Complex64::new(1.0, 0.0);
    assert!(support_projector(&a, &tol()).is_err());
}

#[test]
fn psd_power_pinv_consistency() {
    // (A^x)+ = (A+)^x and (A+)^x A^x = Pi_A for x in {1/2, 1}.
    let mut rng = rng_from_seed(17);
    let x: Matrix = gaussian_matrix(5, 3, &mut rng);
    let a = &x * &x.adjoint();
    let f = PsdFunctions::new(&a, &tol()).unwrap();
    let tol = tol();

    let sqrt_a = f.sqrt();
    let pinv_sqrt_from_sqrt = pseudo_inverse(&sqrt_a, &tol).unwrap();
    assert!(pinv_sqrt_from_sqrt.distance(&f.pinv_sqrt()) <= 1e-9 * (1.0 + f.pinv_sqrt().frobenius_norm()));

    let pinv_from_general = pseudo_inverse(&a, &tol).unwrap();
    assert!(pinv_from_general.distance(&f.pinv()) <= 1e-9 * (1.0 + f.pinv().frobenius_norm()));

    let pi = f.support_projector();
    assert!((&(&f.pinv_sqrt() * &sqrt_a) - &pi).frobenius_norm() <= 1e-9);
    assert!((&(&f.pinv() * &a) - &pi).frobenius_norm() <= 1e-9);
}

#[test]
fn clustering_merges_near_degenerate() {
    let mut rng = rng_from_seed(23);
    let u: Matrix = haar_unitary(3, &mut rng);
    let d = Matrix::diag(&[1.0, 1.0 + 1e-12, 3.0]);
    let a = &(&u * &d) * &u.adjoint();
    let eig = hermitian_eigen(&a).unwrap();
    let clusters = cluster_eigenspaces(&eig, &tol());
    let dims: Vec<usize> = clusters.iter().map(|c| c.dim()).collect();
    assert_eq!(dims, vec![2, 1]);
}

#[test]
fn clustering_keeps_distinct_spectrum() {
    let a = Matrix::diag(&[0.1, 0.4, 0.9]);
    let eig = hermitian_eigen(&a).unwrap();
    let clusters = cluster_eigenspaces(&eig, &tol());
    assert_eq!(clusters.len(), 3);
}

#[test]
fn clustering_matches_constructed_multiplicities() {
    let mut rng = rng_from_seed(29);
    let u: Matrix = haar_unitary(6, &mut rng);
    let d = Matrix::diag(&[0.2, 0.2, 0.5, 0.5, 0.5, 0.9]);
    let a = &(&u * &d) * &u.adjoint();
    let eig = hermitian_eigen(&a).unwrap();
    let clusters = cluster_eigenspaces(&eig, &tol());
    let dims: Vec<usize> = clusters.iter().map(|c| c.dim()).collect();
    assert_eq!(dims, vec![2, 3, 1]);
    // Gram matrix of concatenated bases is the identity.
    let all: Vec<&Matrix> = clusters.iter().map(|c| &c.basis).collect();
    let joined = Matrix::hcat(&all);
    let gram = &joined.adjoint() * &joined;
    assert!(gram.distance(&Matrix::identity(6)) <= 1e-10);
}

#[test]
fn null_space_finds_kernel() {
    let a = Matrix::from_real_rows(vec![
        vec![1.0, 1.0, 0.0],
        vec![0.0, 0.0, 0.0],
        vec![1.0, 1.0, 0.0],
    ])
    .unwrap();
    let ns = null_space(&a, 1e-12).unwrap();
    assert_eq!(ns.ncols(), 2);
    assert!((&a * &ns).frobenius_norm() <= 1e-12);
}

#[test]
fn matrix_json_schema_round_trip() {
    let mut m = Matrix::zeros(2, 3);
    m[(0, 1)] = Complex64::new(1.5, -2.0);
    m[(1, 2)] = Complex64::new(0.0, 3.25);
    let json = serde_json::to_string(&m).unwrap();
    assert_eq!(
        json,
        r#"{"dim":[2,3],"re":[[0.0,1.5,0.0],[0.0,0.0,0.0]],"im":[[0.0,-2.0,0.0],[0.0,0.0,3.25]]}"#
    );
    let back: Matrix = serde_json::from_str(&json).unwrap();
    assert!(back.distance(&m) == 0.0);
}

#[test]
fn generic_scalar_f32_smoke() {
    // The kernels are generic; a coarse f32 run must stay self-consistent.
    let a = ComplexMatrix::<f32>::from_real_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
    let eig = hermitian_eigen(&a).unwrap();
    assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-5);
    assert!((eig.eigenvalues[1] - 3.0).abs() < 1e-5);
    let s = psd_sqrt(&a, &fidopt::tol::ToleranceConfig::<f32>::loose()).unwrap();
    assert!((&(&s * &s) - &a).frobenius_norm() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn penrose_conditions_random(seed in 0u64..5000) {
        let mut rng = rng_from_seed(seed);
        let d = 2 + (seed as usize % 7);
        let o: Matrix = gaussian_matrix(d, d, &mut rng);
        let p = pseudo_inverse(&o, &tol()).unwrap();
        let scale = 1.0 + o.frobenius_norm() * p.frobenius_norm();
        for r in penrose_residuals(&o, &p) {
            prop_assert!(r <= 1e-10 * scale);
        }
    }

    #[test]
    fn eigen_reconstruction_random(seed in 0u64..5000) {
        let d = 2 + (seed as usize % 8);
        let a = random_hermitian(d, seed);
        let eig = hermitian_eigen(&a).unwrap();
        prop_assert!(eig.reconstruct().distance(&a) <= 1e-10 * (1.0 + a.frobenius_norm()));
    }
}

#[test]
fn hcat_and_column_ops() {
    let a = Matrix::identity(2);
    let b = Matrix::zeros(2, 1);
    let c = Matrix::hcat(&[&a, &b]);
    assert_eq!(c.ncols(), 3);
    assert_eq!(c.column(0), vec![C::new(1.0, 0.0), C::new(0.0, 0.0)]);
}
