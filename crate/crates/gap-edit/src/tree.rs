//! The precision tree: a complete B-ary tree over the padded positions whose
//! nodes carry multiplicatively sampled additive tolerances, plus the global
//! shift universe S and its per-node discretizations S_v.

use crate::error::{GapError, Result};
use crate::params::Params;
use crate::prf::{derive_randomness, DerivedStream, Purpose};

/// A symmetric arithmetic grid of shifts: multiples of `step` in
/// `[-bound, bound]`. Zero is always a member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftSet {
    bound: i64,
    step: i64,
}

impl ShiftSet {
    pub fn new(bound: i64, step: i64) -> Self {
        assert!(bound >= 0 && step >= 1);
        ShiftSet { bound, step }
    }

    /// Largest member (`hi`); the set is `{-hi, ..., -step, 0, step, ..., hi}`.
    pub fn hi(&self) -> i64 {
        self.bound / self.step * self.step
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn len(&self) -> usize {
        (2 * (self.bound / self.step) + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, s: i64) -> bool {
        s.abs() <= self.bound && s % self.step == 0
    }

    /// Member at rank `r` (ascending order).
    #[inline]
    pub fn at(&self, r: usize) -> i64 {
        -self.hi() + r as i64 * self.step
    }

    /// Rank of a member (ascending order).
    #[inline]
    pub fn rank(&self, s: i64) -> usize {
        debug_assert!(self.contains(s));
        ((s + self.hi()) / self.step) as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        (0..self.len()).map(move |r| self.at(r))
    }

    /// Nearest member to `s`; ties prefer the smaller absolute shift, then
    /// the negative one. `s` must lie within `[-bound, bound]`.
    pub fn round(&self, s: i64) -> i64 {
        let g = self.step;
        let down = s.div_euclid(g) * g;
        let candidates = [down, down + g];
        let mut best = None::<i64>;
        for &c in &candidates {
            if c.abs() > self.hi() {
                continue;
            }
            best = Some(match best {
                None => c,
                Some(b) => {
                    let key = |m: i64| ((s - m).abs(), m.abs(), m);
                    if key(c) < key(b) {
                        c
                    } else {
                        b
                    }
                }
            });
        }
        best.expect("grid contains 0, s within bound")
    }
}

/// One precision-tree node. Nodes are stored level by level; a node's
/// children occupy a contiguous run in the next level.
#[derive(Debug, Clone, Copy)]
pub struct PrecisionNode {
    pub id: u64,
    pub depth: u32,
    /// Leaf interval `[range_start, range_start + range_len)` of X_v / Y_v.
    pub range_start: usize,
    pub range_len: usize,
    pub tolerance: f64,
    pub precision: f64,
}

/// Complete B-ary precision tree for one repetition.
#[derive(Debug, Clone)]
pub struct PrecisionTree {
    pub repetition: u32,
    depth_max: u32,
    branching: usize,
    n_padded: usize,
    /// Per node: (tolerance t_v, precision u_v), level-order.
    values: Vec<(f64, f64)>,
    /// First node id of each level.
    level_offsets: Vec<u64>,
}

/// Samples from Exp(lambda) conditioned on the result being at least `u_min`,
/// by rejection. This realizes the conditional law of the high-probability
/// event exactly rather than clamping the density.
pub fn sample_exponential(lambda: f64, u_min: f64, stream: &mut DerivedStream) -> f64 {
    assert!(lambda > 0.0);
    loop {
        // U in (0, 1]: never ln(0).
        let u = 1.0 - stream.next_unit();
        let x = -u.ln() / lambda;
        if x >= u_min {
            return x;
        }
    }
}

/// Exponent `ceil(log_B n_padded)`; exact since n_padded is a power of B.
pub fn depth_for(n_padded: usize, branching: usize) -> u32 {
    let mut d = 0u32;
    let mut p = 1usize;
    while p < n_padded {
        p *= branching;
        d += 1;
    }
    assert_eq!(p, n_padded, "n_padded must be a power of branching");
    d
}

/// Bound of the global shift universe: `k * ceil(shift_base^depth)`.
pub fn shift_universe_bound(params: &Params) -> i64 {
    let d = depth_for(params.n_padded, params.branching);
    let pow = params.shift_base.powi(d as i32).ceil() as i64;
    params.k as i64 * pow
}

/// The global shift universe S: step 1, symmetric around zero.
pub fn shift_universe(params: &Params) -> ShiftSet {
    ShiftSet::new(shift_universe_bound(params), 1)
}

/// Per-node shift grid `S_v = S ∩ max(1, floor(t_v / 2)) * Z`.
pub fn node_shifts(tolerance: f64, universe: ShiftSet) -> ShiftSet {
    let step = (tolerance / 2.0).floor().max(1.0) as i64;
    ShiftSet::new(universe.bound(), step)
}

impl PrecisionTree {
    /// Builds the tree for one repetition; all randomness flows through the
    /// keyed PRF so both sides construct identical trees.
    pub fn build(params: &Params, repetition: u32) -> Result<Self> {
        let b = params.branching;
        if b < 2 {
            return Err(GapError::usage("branching must be at least 2"));
        }
        let depth_max = depth_for(params.n_padded, b);
        let lambda = params.lambda();
        let mut level_offsets = Vec::with_capacity(depth_max as usize + 2);
        let mut count = 0u64;
        let mut level_size = 1u64;
        for _ in 0..=depth_max {
            level_offsets.push(count);
            count += level_size;
            level_size *= b as u64;
        }
        level_offsets.push(count);
        let mut values = vec![(0.0f64, 0.0f64); count as usize];
        values[0] = (params.k as f64, 1.0);
        for id in 1..count {
            let mut stream =
                derive_randomness(&params.master_seed, repetition, id, Purpose::Tolerance, 0);
            let u = sample_exponential(lambda, params.u_min, &mut stream);
            let parent = self_parent(id, b, &level_offsets);
            let t = values[parent as usize].0 * u / 3.0;
            values[id as usize] = (t, u);
        }
        Ok(PrecisionTree {
            repetition,
            depth_max,
            branching: b,
            n_padded: params.n_padded,
            values,
            level_offsets,
        })
    }

    pub fn node_count(&self) -> u64 {
        self.values.len() as u64
    }

    pub fn depth_max(&self) -> u32 {
        self.depth_max
    }

    pub fn branching(&self) -> usize {
        self.branching
    }

    pub fn n_padded(&self) -> usize {
        self.n_padded
    }

    pub fn depth_of(&self, id: u64) -> u32 {
        match self.level_offsets.binary_search(&id) {
            Ok(d) => d as u32,
            Err(d) => d as u32 - 1,
        }
    }

    pub fn level_nodes(&self, depth: u32) -> std::ops::Range<u64> {
        self.level_offsets[depth as usize]..self.level_offsets[depth as usize + 1]
    }

    pub fn root(&self) -> PrecisionNode {
        self.node(0)
    }

    pub fn node(&self, id: u64) -> PrecisionNode {
        let depth = self.depth_of(id);
        let idx = (id - self.level_offsets[depth as usize]) as usize;
        let range_len = self.n_padded / self.branching.pow(depth);
        let (tolerance, precision) = self.values[id as usize];
        PrecisionNode {
            id,
            depth,
            range_start: idx * range_len,
            range_len,
            tolerance,
            precision,
        }
    }

    pub fn is_leaf(&self, node: &PrecisionNode) -> bool {
        node.depth == self.depth_max
    }

    /// Ids of the B children of an internal node.
    pub fn children(&self, node: &PrecisionNode) -> std::ops::Range<u64> {
        debug_assert!(!self.is_leaf(node));
        let idx = node.id - self.level_offsets[node.depth as usize];
        let base = self.level_offsets[node.depth as usize + 1] + idx * self.branching as u64;
        base..base + self.branching as u64
    }

    pub fn tolerance(&self, id: u64) -> f64 {
        self.values[id as usize].0
    }

    pub fn precision(&self, id: u64) -> f64 {
        self.values[id as usize].1
    }
}

fn self_parent(id: u64, branching: usize, level_offsets: &[u64]) -> u64 {
    let depth = match level_offsets.binary_search(&id) {
        Ok(d) => d,
        Err(d) => d - 1,
    };
    let idx = id - level_offsets[depth];
    level_offsets[depth - 1] + idx / branching as u64
}
