//! Shared configuration. Both preprocessing sides must be built from an
//! identical `Params` value; compatibility is checked field by field when an
//! index pair is combined at query time.

use crate::error::{GapError, Result};
use crate::prf;
use serde::{Deserialize, Serialize};

/// Which side(s) an index file covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    X,
    Y,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Declared input length (the gap problem's n). Strings are padded to
    /// `n_padded`.
    pub n: usize,
    /// `B^depth` for integral depth; derived from `n` unless overridden.
    pub n_padded: usize,
    /// Tree arity.
    pub branching: usize,
    /// Gap parameter k; the root tolerance.
    pub k: u64,
    /// Tolerance decay rate: u_v ~ Exp(c_lambda * ln n_padded).
    pub c_lambda: f64,
    /// Floor for sampled precisions (rejection threshold).
    pub u_min: f64,
    /// Sample-set density: rate = min(1, c_hash * ln(n_padded) / t_v).
    pub c_hash: f64,
    /// Base of the shift-universe growth per tree level.
    pub shift_base: f64,
    /// Verdict threshold multiplier: CLOSE iff root estimate <= kappa * k.
    pub kappa: f64,
    /// Recover estimator noise-floor multiplier.
    pub psl_c1: f64,
    /// Recover estimator small-mass coefficient.
    pub psl_c2: f64,
    /// Repetition multiplier: R = c_reps * ceil(log2 n).
    pub c_reps: u32,
    /// Per-repetition operation budget multiplier.
    pub c_budget: u64,
    /// Symbols are dense ids below this bound; the pad symbol is this value.
    pub alphabet_size: u32,
    pub master_seed: [u8; 32],
}

/// Default arity: `max(2, ceil(2^sqrt(log2 n * log2 log2 n)))`. The paper's
/// formula dips below 2 for tiny n.
pub fn default_branching(n: usize) -> usize {
    if n < 4 {
        return 2;
    }
    let lg = (n as f64).log2();
    let b = 2f64.powf((lg * lg.log2()).sqrt()).ceil();
    (b as usize).max(2)
}

/// Smallest power of `b` that is at least `n`.
pub fn pad_length(n: usize, b: usize) -> usize {
    let mut p = 1usize;
    while p < n.max(1) {
        p = p.checked_mul(b).expect("padded length overflow");
    }
    p
}

impl Params {
    /// Calibrated defaults for a declared length `n` and gap `k`.
    pub fn new(n: usize, k: u64, seed: u64) -> Result<Self> {
        let branching = default_branching(n);
        Self::with_branching(n, k, seed, branching)
    }

    pub fn with_branching(n: usize, k: u64, seed: u64, branching: usize) -> Result<Self> {
        if n == 0 {
            return Err(GapError::usage("n must be positive"));
        }
        if branching < 2 {
            return Err(GapError::usage("branching must be at least 2"));
        }
        if k == 0 {
            return Err(GapError::usage("k must be at least 1"));
        }
        if k as usize > n {
            return Err(GapError::usage(format!("k = {k} exceeds n = {n}")));
        }
        let n_padded = pad_length(n, branching);
        Ok(Params {
            n,
            n_padded,
            branching,
            k,
            c_lambda: 0.5,
            u_min: (n_padded as f64).powi(-3).max(1.0 / 1024.0),
            c_hash: 4.0,
            shift_base: 3.0,
            kappa: 4.0,
            psl_c1: 2.0,
            psl_c2: 2.0,
            c_reps: 3,
            c_budget: 2,
            alphabet_size: 256,
            master_seed: prf::master_seed_from_u64(seed),
        })
    }

    /// Exponential rate for tolerance sampling.
    pub fn lambda(&self) -> f64 {
        self.c_lambda * (self.n_padded.max(4) as f64).ln()
    }

    /// Number of independent repetitions (majority votes).
    pub fn repetitions(&self) -> u32 {
        (self.c_reps as f64 * (self.n.max(2) as f64).log2().ceil()) as u32
    }

    /// CLOSE/FAR decision threshold.
    pub fn threshold(&self) -> f64 {
        self.kappa * self.k as f64
    }

    /// The pad symbol extends the alphabet by one.
    pub fn pad_symbol(&self) -> u32 {
        self.alphabet_size
    }

    /// Per-repetition budget of counted operations.
    pub fn budget(&self) -> u64 {
        let max_shift = crate::tree::shift_universe_bound(self);
        self.c_budget
            * (self.n_padded as u64
                + self.k * self.branching as u64 * (2 * max_shift as u64 + 1))
    }

    /// Checks that two sides were preprocessed from the same configuration.
    pub fn check_compatible(&self, other: &Params) -> Result<()> {
        macro_rules! field {
            ($f:ident) => {
                if self.$f != other.$f {
                    return Err(GapError::incompatible(
                        stringify!($f),
                        format!("{:?}", self.$f),
                        format!("{:?}", other.$f),
                    ));
                }
            };
        }
        field!(n);
        field!(n_padded);
        field!(branching);
        field!(k);
        field!(c_lambda);
        field!(u_min);
        field!(c_hash);
        field!(shift_base);
        field!(kappa);
        field!(psl_c1);
        field!(psl_c2);
        field!(c_reps);
        field!(c_budget);
        field!(alphabet_size);
        field!(master_seed);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branching_examples() {
        assert_eq!(default_branching(2), 2);
        // n = 4096: sqrt(12 * log2(12)) = 6.56 -> ceil(2^6.56) = 95
        assert_eq!(default_branching(4096), 95);
        assert_eq!(default_branching(1 << 16), 256);
    }

    #[test]
    fn padding_is_power() {
        assert_eq!(pad_length(4096, 95), 9025);
        assert_eq!(pad_length(1 << 16, 256), 1 << 16);
        assert_eq!(pad_length(1, 2), 1);
    }

    #[test]
    fn compat_flags_field() {
        let a = Params::new(1024, 8, 1).unwrap();
        let mut b = a.clone();
        b.k = 9;
        let err = a.check_compatible(&b).unwrap_err();
        assert!(err.to_string().contains("`k`"));
        assert!(a.check_compatible(&a.clone()).is_ok());
    }

    #[test]
    fn oversized_k_rejected() {
        assert!(Params::new(16, 17, 0).is_err());
    }
}
