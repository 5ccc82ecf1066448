//! Monte-Carlo outcome sampling with delta-method standard errors.

use crate::error::{CliError, CliResult};
use fidopt::quantum::{measure, OutcomeDistribution};
use fidopt::random::rng_from_seed;
use fidopt::{Measurement, Real, State};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// One sampling run; serialized as a CSV row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleReport {
    pub shots: u64,
    pub bhattacharyya: Real,
    pub bhattacharyya_se: Real,
    pub tv: Real,
    pub tv_se: Real,
    pub exact_bhattacharyya: Real,
    pub exact_tv: Real,
    pub rng: String,
    pub seed: u64,
}

fn draw_counts(p: &OutcomeDistribution<Real>, shots: u64, rng: &mut impl Rng) -> Vec<u64> {
    let probs: Vec<Real> = p.values().collect();
    let total: Real = probs.iter().sum();
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for p in &probs {
        acc += p / total;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: Real = rng.gen();
        let idx = cdf.partition_point(|c| *c < u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    counts
}

/// Draw `shots` outcomes from each exact distribution and report the
/// empirical Bhattacharyya coefficient and total-variation distance with
/// delta-method standard errors.
pub fn sample(
    povm: &Measurement,
    rho: &State,
    sigma: &State,
    shots: u64,
    seed: u64,
) -> CliResult<SampleReport> {
    if shots == 0 {
        return Err(CliError::Invalid("shots must be at least 1".into()));
    }
    let p = measure(povm, rho).map_err(CliError::from)?;
    let q = measure(povm, sigma).map_err(CliError::from)?;
    let exact_bc: Real = p
        .values()
        .zip(q.values())
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    let exact_tv: Real = 0.5
        * p.values()
            .zip(q.values())
            .map(|(a, b)| (a - b).abs())
            .sum::<Real>();

    let mut rng = rng_from_seed(seed);
    let n = shots as Real;
    let counts_p = draw_counts(&p, shots, &mut rng);
    let counts_q = draw_counts(&q, shots, &mut rng);
    let hat_p: Vec<Real> = counts_p.iter().map(|c| *c as Real / n).collect();
    let hat_q: Vec<Real> = counts_q.iter().map(|c| *c as Real / n).collect();

    let bc: Real = hat_p
        .iter()
        .zip(&hat_q)
        .map(|(a, b)| (a * b).sqrt())
        .sum();
    // Var(BC) ~ (1 - BC^2) / (4N) per distribution, independent draws.
    let bc_var = ((1.0 - bc * bc).max(0.0)) / (2.0 * n);

    let tv: Real = 0.5
        * hat_p
            .iter()
            .zip(&hat_q)
            .map(|(a, b)| (a - b).abs())
            .sum::<Real>();
    // Delta method with s_m = sign(p_m - q_m).
    let a_p: Real = hat_p
        .iter()
        .zip(&hat_q)
        .map(|(a, b)| if a >= b { *a } else { -*a })
        .sum();
    let a_q: Real = hat_p
        .iter()
        .zip(&hat_q)
        .map(|(a, b)| if a >= b { *b } else { -*b })
        .sum();
    let tv_var = 0.25 * ((1.0 - a_p * a_p).max(0.0) + (1.0 - a_q * a_q).max(0.0)) / n;

    Ok(SampleReport {
        shots,
        bhattacharyya: bc,
        bhattacharyya_se: bc_var.sqrt(),
        tv,
        tv_se: tv_var.sqrt(),
        exact_bhattacharyya: exact_bc,
        exact_tv,
        rng: fidopt::random::RNG_ALGORITHM.into(),
        seed,
    })
}
