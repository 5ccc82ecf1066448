//! Brute-force oracles: a dense sweep of projective qubit measurements and
//! random-POVM sampling, used to bound F and D independently of the
//! constructive machinery.

use crate::error::{CliError, CliResult};
use fidopt::divergence::{induced_fidelity, induced_trace_distance};
use fidopt::random::{random_povm, rng_from_seed};
use fidopt::{Real, State, Tolerances};

/// Outcome of a qubit-grid sweep.
#[derive(Debug, Clone)]
pub struct GridScan {
    pub evaluations: usize,
    pub min_fidelity: Real,
    pub argmin: [Real; 2],
    pub max_tv: Real,
    pub argmax: [Real; 2],
    /// Directions (theta, phi) whose induced fidelity is within
    /// `near_tol` of `f_exact`.
    pub near_optimal: Vec<[Real; 2]>,
}

/// Sweep an n x n (theta, phi) grid of rank-1 PVMs {P_v, 1 - P_v}. The grid
/// is offset by half a step so the poles are not duplicated.
pub fn qubit_grid_scan(
    rho: &State,
    sigma: &State,
    n: usize,
    f_exact: Real,
    near_tol: Real,
) -> CliResult<GridScan> {
    if rho.dim() != 2 || sigma.dim() != 2 {
        return Err(CliError::Invalid(
            "qubit-grid oracle requires dimension 2".into(),
        ));
    }
    if n == 0 {
        return Err(CliError::Invalid("grid size must be positive".into()));
    }
    let (ra, rb_re, rb_im, rc) = two_by_two(rho);
    let (sa, sb_re, sb_im, sc) = two_by_two(sigma);

    let mut min_f = Real::INFINITY;
    let mut argmin = [0.0, 0.0];
    let mut max_tv = Real::NEG_INFINITY;
    let mut argmax = [0.0, 0.0];
    let mut near = Vec::new();
    let pi = std::f64::consts::PI;
    for i in 0..n {
        let theta = pi * (i as Real + 0.5) / n as Real;
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let (c2, s2, cs) = (ct * ct, st * st, ct * st);
        for j in 0..n {
            let phi = 2.0 * pi * j as Real / n as Real;
            let (cp, sp) = (phi.cos(), phi.sin());
            // p = <v|rho|v> with v = (cos(t/2), sin(t/2) e^{i phi}).
            let p1 = ra * c2 + rc * s2 + 2.0 * cs * (rb_re * cp - rb_im * sp);
            let q1 = sa * c2 + sc * s2 + 2.0 * cs * (sb_re * cp - sb_im * sp);
            let p1 = p1.clamp(0.0, 1.0);
            let q1 = q1.clamp(0.0, 1.0);
            let bc = (p1 * q1).sqrt() + ((1.0 - p1) * (1.0 - q1)).sqrt();
            let fe = bc * bc;
            let tv = (p1 - q1).abs();
            if fe < min_f {
                min_f = fe;
                argmin = [theta, phi];
            }
            if tv > max_tv {
                max_tv = tv;
                argmax = [theta, phi];
            }
            if fe <= f_exact + near_tol {
                near.push([theta, phi]);
            }
        }
    }
    Ok(GridScan {
        evaluations: n * n,
        min_fidelity: min_f,
        argmin,
        max_tv,
        argmax,
        near_optimal: near,
    })
}

fn two_by_two(s: &State) -> (Real, Real, Real, Real) {
    let m = s.matrix();
    (m[(0, 0)].re, m[(0, 1)].re, m[(0, 1)].im, m[(1, 1)].re)
}

/// Outcome of the random-POVM oracle.
#[derive(Debug, Clone)]
pub struct RandomPovmScan {
    pub evaluations: usize,
    pub min_fidelity: Real,
    pub max_tv: Real,
}

/// Sample `k` seeded random POVMs with 2..=2d outcomes and track the
/// extremes of the induced quantities.
pub fn random_povm_scan(
    rho: &State,
    sigma: &State,
    k: usize,
    seed: u64,
    tol: &Tolerances,
) -> CliResult<RandomPovmScan> {
    let d = rho.dim();
    let mut rng = rng_from_seed(seed);
    let mut min_f = Real::INFINITY;
    let mut max_tv = Real::NEG_INFINITY;
    for i in 0..k {
        let outcomes = 2 + (i % (2 * d - 1));
        let povm = random_povm(d, outcomes, &mut rng, tol).map_err(CliError::from)?;
        let fe = induced_fidelity(&povm, rho, sigma).map_err(CliError::from)?;
        let tv = induced_trace_distance(&povm, rho, sigma).map_err(CliError::from)?;
        min_f = min_f.min(fe);
        max_tv = max_tv.max(tv);
    }
    Ok(RandomPovmScan {
        evaluations: k,
        min_fidelity: min_f,
        max_tv,
    })
}
