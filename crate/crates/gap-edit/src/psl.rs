//! Precision-sampling recombination.
//!
//! `recover` turns per-child estimates carrying precision-scaled additive
//! errors (beta * u_i) into a sum estimate with additive error beta. The
//! guarantee is purely contractual; `recover_contract_harness` measures the
//! two contract bullets over adversarial estimate families and fails loudly
//! if any cell violates too often.

use crate::prf::{derive_randomness, DerivedStream, Purpose};
use serde::Serialize;

/// Inputs to one recombination.
#[derive(Debug, Clone)]
pub struct RecoverInput<'a> {
    /// Per-child estimates (possibly adversarially perturbed).
    pub estimates: &'a [f64],
    /// Per-child precisions, sampled from Exp(lambda) truncated below.
    pub precisions: &'a [f64],
    /// Rate the precisions were sampled with.
    pub lambda: f64,
    /// The additive tolerance scale (the node's tolerance).
    pub beta: f64,
}

/// Recombines child estimates into a sum estimate.
///
/// Construction: clip each estimate by its own noise allowance,
/// `z_i = max(0, est_i - c1 * beta * u_i)`, sum the clipped values, and add
/// `c2 * beta / lambda` for every child whose clipped value is positive but
/// small. The clipped sum carries the visible mass; the count term
/// statistically compensates mass hidden below the per-child noise floor.
/// The small-child boost ramps down linearly on `z in [beta, 2*beta]` so the
/// whole map stays monotone in every estimate.
pub fn recover(input: &RecoverInput<'_>, c1: f64, c2: f64) -> f64 {
    let beta = input.beta;
    let lambda = input.lambda;
    debug_assert_eq!(input.estimates.len(), input.precisions.len());
    if beta == 0.0 {
        return input.estimates.iter().map(|&a| a.max(0.0)).sum();
    }
    let boost = c2 * beta / lambda;
    let mut total = 0.0;
    for (&a, &u) in input.estimates.iter().zip(input.precisions) {
        let z = (a - c1 * beta * u).max(0.0);
        if z > 0.0 {
            total += z;
            // full boost below beta, fading out by 2*beta
            let ramp = ((2.0 * beta - z) / beta).clamp(0.0, 1.0);
            total += boost * ramp;
        }
    }
    total
}

/// True-value families exercised by the contract harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// a_i = 1 for all i.
    Spread,
    /// One item carries everything.
    HeavyHitter,
    /// a_i proportional to 2^-i.
    GeometricDecay,
    /// ceil(lambda / 10) equal mid-size items, rest zero.
    MidCluster,
    /// Every item equals beta / lambda (mass hidden below the noise floor).
    ManyTiny,
}

pub const FAMILIES: [Family; 5] = [
    Family::Spread,
    Family::HeavyHitter,
    Family::GeometricDecay,
    Family::MidCluster,
    Family::ManyTiny,
];

/// Estimate perturbations; each stays inside both contract premises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Adversary {
    /// est_i = a_i.
    Exact,
    /// est_i = alpha * a_i + beta * u_i (largest allowed).
    MaximalUp,
    /// est_i = max(0, a_i / alpha - beta * u_i) (smallest allowed).
    MaximalDown,
    /// est_i = 0 where consistent with the lower premise, exact elsewhere.
    HideSmall,
}

pub const ADVERSARIES: [Adversary; 4] = [
    Adversary::Exact,
    Adversary::MaximalUp,
    Adversary::MaximalDown,
    Adversary::HideSmall,
];

fn family_values(family: Family, b: usize, lambda: f64, beta: f64) -> Vec<f64> {
    let unit = if beta > 0.0 { beta } else { 1.0 };
    match family {
        Family::Spread => vec![1.0; b],
        Family::HeavyHitter => {
            let mut v = vec![0.0; b];
            v[0] = 4.0 * unit * b as f64 / lambda;
            v
        }
        Family::GeometricDecay => (0..b)
            .map(|i| 4.0 * unit * 0.5f64.powi(i.min(60) as i32))
            .collect(),
        Family::MidCluster => {
            let m = (lambda / 10.0).ceil() as usize;
            let mut v = vec![0.0; b];
            for slot in v.iter_mut().take(m.min(b)) {
                *slot = 2.0 * unit;
            }
            v
        }
        Family::ManyTiny => vec![beta / lambda; b],
    }
}

fn adversary_estimates(
    adversary: Adversary,
    values: &[f64],
    precisions: &[f64],
    alpha: f64,
    beta: f64,
) -> Vec<f64> {
    values
        .iter()
        .zip(precisions)
        .map(|(&a, &u)| match adversary {
            Adversary::Exact => a,
            Adversary::MaximalUp => alpha * a + beta * u,
            Adversary::MaximalDown => (a / alpha - beta * u).max(0.0),
            Adversary::HideSmall => {
                if a / alpha - beta * u <= 0.0 {
                    0.0
                } else {
                    a
                }
            }
        })
        .collect()
}

/// One measured cell of the harness report.
#[derive(Debug, Clone, Serialize)]
pub struct HarnessCell {
    pub family: Family,
    pub adversary: Adversary,
    pub b: usize,
    pub lambda: f64,
    pub alpha: f64,
    pub beta: f64,
    pub trials: u64,
    pub lower_violations: u64,
    pub upper_violations: u64,
    pub violation_frequency: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub c1: f64,
    pub c2: f64,
    pub delta_target: f64,
    pub trials_per_cell: u64,
    pub cells: Vec<HarnessCell>,
    pub worst_frequency: f64,
    pub pass: bool,
}

pub const HARNESS_B: [usize; 3] = [8, 32, 256];
pub const HARNESS_LAMBDA: [f64; 2] = [8.0, 16.0];
pub const HARNESS_ALPHA: [f64; 2] = [1.0, 2.0];
pub const HARNESS_BETA: [f64; 3] = [0.0, 1.0, 10.0];

/// Runs every (family x adversary x parameter) cell and measures how often
/// either contract bullet fails. All four adversaries satisfy both premises
/// by construction, so both conclusions are checked each trial:
///
/// - lower: recover >= sum(a) / (2 * alpha) - beta
/// - upper: recover <= 2 * alpha * sum(a) + beta
pub fn recover_contract_harness(
    c1: f64,
    c2: f64,
    trials_per_cell: u64,
    delta_target: f64,
    seed: u64,
) -> HarnessReport {
    let master = crate::prf::master_seed_from_u64(seed);
    let mut cells = Vec::new();
    let mut key = 0u64;
    for &b in &HARNESS_B {
        for &lambda in &HARNESS_LAMBDA {
            for &alpha in &HARNESS_ALPHA {
                for &beta in &HARNESS_BETA {
                    for family in FAMILIES {
                        let values = family_values(family, b, lambda, beta);
                        let sum: f64 = values.iter().sum();
                        let lower_bound = sum / (2.0 * alpha) - beta;
                        let upper_bound = 2.0 * alpha * sum + beta;
                        for adversary in ADVERSARIES {
                            key += 1;
                            let mut stream =
                                derive_randomness(&master, 0, key, Purpose::Tolerance, 0);
                            let mut lower_violations = 0u64;
                            let mut upper_violations = 0u64;
                            let mut precisions = vec![0.0f64; b];
                            for _ in 0..trials_per_cell {
                                sample_precisions(&mut precisions, lambda, &mut stream);
                                let estimates = adversary_estimates(
                                    adversary,
                                    &values,
                                    &precisions,
                                    alpha,
                                    beta,
                                );
                                let r = recover(
                                    &RecoverInput {
                                        estimates: &estimates,
                                        precisions: &precisions,
                                        lambda,
                                        beta,
                                    },
                                    c1,
                                    c2,
                                );
                                if r < lower_bound - 1e-9 {
                                    lower_violations += 1;
                                }
                                if r > upper_bound + 1e-9 {
                                    upper_violations += 1;
                                }
                            }
                            let viol = lower_violations + upper_violations;
                            cells.push(HarnessCell {
                                family,
                                adversary,
                                b,
                                lambda,
                                alpha,
                                beta,
                                trials: trials_per_cell,
                                lower_violations,
                                upper_violations,
                                violation_frequency: viol as f64 / trials_per_cell as f64,
                            });
                        }
                    }
                }
            }
        }
    }
    let worst = cells
        .iter()
        .map(|c| c.violation_frequency)
        .fold(0.0f64, f64::max);
    HarnessReport {
        c1,
        c2,
        delta_target,
        trials_per_cell,
        cells,
        worst_frequency: worst,
        pass: worst <= delta_target,
    }
}

fn sample_precisions(out: &mut [f64], lambda: f64, stream: &mut DerivedStream) {
    // Harness precision floor: vanishing, so the truncation is invisible at
    // these lambdas while keeping 1/u finite.
    for slot in out.iter_mut() {
        *slot = crate::tree::sample_exponential(lambda, 1e-12, stream);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(est: &[f64], u: &[f64], lambda: f64, beta: f64) -> f64 {
        recover(
            &RecoverInput {
                estimates: est,
                precisions: u,
                lambda,
                beta,
            },
            2.0,
            2.0,
        )
    }

    #[test]
    fn single_zero_item() {
        assert_eq!(run(&[0.0], &[0.3], 8.0, 0.0), 0.0);
        assert_eq!(run(&[0.0], &[0.3], 8.0, 5.0), 0.0);
    }

    #[test]
    fn beta_zero_is_plain_sum() {
        let est = [1.0; 8];
        let u = [0.1; 8];
        let r = run(&est, &u, 8.0, 0.0);
        assert_eq!(r, 8.0);
        assert!((4.0..=16.0).contains(&r));
    }

    #[test]
    fn zero_vector_recovers_zero() {
        let u = [0.5, 0.01, 3.0, 0.2];
        assert_eq!(run(&[0.0; 4], &u, 8.0, 7.0), 0.0);
    }

    #[test]
    fn monotone_in_each_estimate() {
        use crate::prf::{derive_randomness, Purpose};
        let seed = crate::prf::master_seed_from_u64(17);
        let mut s = derive_randomness(&seed, 0, 0, Purpose::Tolerance, 0);
        for trial in 0..2000 {
            let b = 1 + (trial % 16);
            let lambda = 8.0;
            let beta = [0.0, 1.0, 10.0][trial % 3];
            let u: Vec<f64> = (0..b)
                .map(|_| crate::tree::sample_exponential(lambda, 1e-12, &mut s))
                .collect();
            let mut est: Vec<f64> = (0..b).map(|_| s.next_unit() * 20.0).collect();
            let base = run(&est, &u, lambda, beta);
            let idx = trial % b;
            let bump = s.next_unit() * 10.0;
            est[idx] += bump;
            let bigger = run(&est, &u, lambda, beta);
            assert!(
                bigger >= base - 1e-9,
                "not monotone: {base} -> {bigger} (bump {bump})"
            );
        }
    }

    #[test]
    fn scale_covariant() {
        let est = [3.0, 0.5, 0.0, 11.0];
        let u = [0.4, 0.02, 1.3, 0.09];
        for &c in &[0.25, 2.0, 17.0] {
            let base = run(&est, &u, 8.0, 2.0);
            let scaled_est: Vec<f64> = est.iter().map(|&a| c * a).collect();
            let scaled = run(&scaled_est, &u, 8.0, 2.0 * c);
            assert!((scaled - c * base).abs() < 1e-9 * (1.0 + scaled.abs()));
        }
    }

    #[test]
    fn harness_smoke_small() {
        // Quick run; the full 10^4-trial sweep is an acceptance criterion.
        let report = recover_contract_harness(2.0, 2.0, 400, 0.025, 1234);
        for cell in &report.cells {
            assert!(
                cell.violation_frequency <= report.delta_target,
                "cell {:?}/{:?} B={} lambda={} alpha={} beta={}: {}",
                cell.family,
                cell.adversary,
                cell.b,
                cell.lambda,
                cell.alpha,
                cell.beta,
                cell.violation_frequency
            );
        }
    }

    #[test]
    fn exact_spread_beta0_never_violates() {
        let report = recover_contract_harness(2.0, 2.0, 500, 1.0, 7);
        for cell in report.cells.iter().filter(|c| {
            c.family == Family::Spread && c.adversary == Adversary::Exact && c.beta == 0.0
        }) {
            assert_eq!(cell.lower_violations + cell.upper_violations, 0);
        }
    }
}
