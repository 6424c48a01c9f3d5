//! Symbol sequences and exact distance oracles.
//!
//! Everything downstream (indexes, engine leaves, tests) funnels through the
//! primitives here: clamped window reads, Hamming distance, the quadratic
//! edit-distance dynamic program, its banded variant, and optimal alignment
//! extraction.

use crate::error::{GapError, Result};

/// Alphabet symbol. Real symbols are dense ids `< alphabet_size`; the padding
/// symbol sits at `alphabet_size`; out-of-bounds reads produce [`BOTTOM`].
pub type Symbol = u32;

/// Sentinel produced by out-of-bounds reads. Never stored in a [`Text`].
/// BOTTOM matches only BOTTOM under Hamming/edit comparisons.
pub const BOTTOM: Symbol = u32::MAX;

/// An immutable symbol sequence over a dense integer alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    symbols: Vec<Symbol>,
    alphabet_size: u32,
}

impl Text {
    /// Builds a text, checking every symbol against the alphabet bound.
    pub fn new(symbols: Vec<Symbol>, alphabet_size: u32) -> Result<Self> {
        if alphabet_size == 0 || alphabet_size >= BOTTOM - 1 {
            return Err(GapError::usage("alphabet_size must be in [1, 2^32 - 2)"));
        }
        if let Some(&bad) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(GapError::usage(format!(
                "symbol {bad} outside alphabet of size {alphabet_size}"
            )));
        }
        Ok(Text { symbols, alphabet_size })
    }

    /// Ingests raw bytes with the fixed identity byte coding (alphabet 256).
    ///
    /// The coding is a fixed function of the byte value so that two sides
    /// preprocessing different strings in different processes agree on codes.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        Text {
            symbols: bytes.iter().map(|&b| b as Symbol).collect(),
            alphabet_size: 256,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Clamped read: `symbols[index]` in bounds, [`BOTTOM`] outside.
    #[inline]
    pub fn read_at(&self, index: i64) -> Symbol {
        if index < 0 || index as usize >= self.symbols.len() {
            BOTTOM
        } else {
            self.symbols[index as usize]
        }
    }

    /// Logical window `[start, start + len)` read through [`Text::read_at`].
    pub fn window(&self, start: i64, len: usize) -> PadSlice<'_> {
        PadSlice::new(&self.symbols, start, len)
    }
}

/// A length-`len` view into a symbol slice starting at a possibly negative
/// offset; positions outside the slice read as [`BOTTOM`]. No copying.
#[derive(Debug, Clone, Copy)]
pub struct PadSlice<'a> {
    base: &'a [Symbol],
    start: i64,
    len: usize,
}

impl<'a> PadSlice<'a> {
    pub fn new(base: &'a [Symbol], start: i64, len: usize) -> Self {
        PadSlice { base, start, len }
    }
}

/// Read-only symbol source of known length. Implementations must return
/// [`BOTTOM`] for clamped positions so comparisons of shifted windows stay
/// total and position-wise.
pub trait Source {
    fn len(&self) -> usize;
    fn get(&self, pos: usize) -> Symbol;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Materializes the source (test and small-case helper).
    fn collect_symbols(&self) -> Vec<Symbol> {
        (0..self.len()).map(|p| self.get(p)).collect()
    }
}

impl<'a> Source for PadSlice<'a> {
    #[inline]
    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn get(&self, pos: usize) -> Symbol {
        debug_assert!(pos < self.len);
        let idx = self.start + pos as i64;
        if idx < 0 || idx as usize >= self.base.len() {
            BOTTOM
        } else {
            self.base[idx as usize]
        }
    }
}

impl Source for &[Symbol] {
    #[inline]
    fn len(&self) -> usize {
        (*self).len()
    }

    #[inline]
    fn get(&self, pos: usize) -> Symbol {
        self[pos]
    }
}

impl Source for Text {
    #[inline]
    fn len(&self) -> usize {
        self.symbols.len()
    }

    #[inline]
    fn get(&self, pos: usize) -> Symbol {
        self.symbols[pos]
    }
}

/// Number of positions where the sources differ. Lengths must match.
pub fn hamming<A: Source, B: Source>(a: &A, b: &B) -> Result<u64> {
    if a.len() != b.len() {
        return Err(GapError::usage(format!(
            "hamming distance needs equal lengths, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let mut d = 0u64;
    for p in 0..a.len() {
        if a.get(p) != b.get(p) {
            d += 1;
        }
    }
    Ok(d)
}

/// Exact edit distance via the full quadratic dynamic program.
pub fn edit_distance<A: Source, B: Source>(a: &A, b: &B) -> u64 {
    let (n, m) = (a.len(), b.len());
    if n == 0 {
        return m as u64;
    }
    if m == 0 {
        return n as u64;
    }
    let mut prev: Vec<u64> = (0..=m as u64).collect();
    let mut cur = vec![0u64; m + 1];
    for i in 1..=n {
        cur[0] = i as u64;
        let ai = a.get(i - 1);
        for j in 1..=m {
            let sub = prev[j - 1] + u64::from(ai != b.get(j - 1));
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Result of a banded edit-distance computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Banded {
    Exact(u64),
    /// The distance exceeds the requested bound.
    Exceeds,
}

impl Banded {
    pub fn value(self) -> Option<u64> {
        match self {
            Banded::Exact(v) => Some(v),
            Banded::Exceeds => None,
        }
    }
}

/// Exact edit distance if it is at most `bound`, [`Banded::Exceeds`] otherwise.
///
/// Classic band restriction: only diagonals within `bound` of the main
/// diagonal can matter, so the cost is O(len * bound).
pub fn edit_distance_banded<A: Source, B: Source>(a: &A, b: &B, bound: u64) -> Banded {
    let (n, m) = (a.len(), b.len());
    let diff = n.abs_diff(m) as u64;
    if diff > bound {
        return Banded::Exceeds;
    }
    if n == 0 || m == 0 {
        return Banded::Exact(diff);
    }
    let band = bound as i64;
    // Row i covers columns j in [i - band, i + band] clamped to [0, m].
    let width = (2 * bound + 1) as usize;
    const INF: u64 = u64::MAX / 4;
    let mut prev = vec![INF; width];
    let mut cur = vec![INF; width];
    // prev holds row 0: cell (0, j) = j for |j - 0| <= band.
    for (w, slot) in prev.iter_mut().enumerate() {
        let j = w as i64 - band; // column offset for row 0
        if (0..=m as i64).contains(&j) {
            *slot = j as u64;
        }
    }
    for i in 1..=n {
        let ai = a.get(i - 1);
        let lo = (i as i64 - band).max(0);
        let hi = (i as i64 + band).min(m as i64);
        for slot in cur.iter_mut() {
            *slot = INF;
        }
        for j in lo..=hi {
            let w = (j - i as i64 + band) as usize;
            let mut best = INF;
            if j > 0 {
                // diagonal: prev row, column j-1 -> same w index
                let d = prev[w];
                if d < INF {
                    best = d + u64::from(ai != b.get(j as usize - 1));
                }
                // left: current row, column j-1 -> w-1
                if w > 0 && cur[w - 1] < INF {
                    best = best.min(cur[w - 1] + 1);
                }
            } else {
                best = i as u64;
            }
            // up: prev row, column j -> w+1
            if w + 1 < width && prev[w + 1] < INF {
                best = best.min(prev[w + 1] + 1);
            }
            cur[w] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let w = (m as i64 - n as i64 + band) as usize;
    let d = prev[w];
    if d <= bound {
        Banded::Exact(d)
    } else {
        Banded::Exceeds
    }
}

/// Per-block advance of the bit-parallel edit-distance automaton.
///
/// `hin` is the horizontal delta entering the block from below (-1, 0, +1);
/// the first return is the delta leaving through the block's top row, the
/// second is the horizontal delta observed at `score_bit` (pre-shift), which
/// is the running-score update when `score_bit` marks the pattern's last row.
#[inline]
fn myers_block(pv: &mut u64, mv: &mut u64, eq: u64, hin: i32, score_bit: u64) -> (i32, i64) {
    const TOP: u64 = 1 << 63;
    let xv = eq | *mv;
    let eq_in = eq | u64::from(hin < 0);
    let xh = (((eq_in & *pv).wrapping_add(*pv)) ^ *pv) | eq_in;
    let mut ph = *mv | !(xh | *pv);
    let mut mh = *pv & xh;
    let hout = if ph & TOP != 0 {
        1
    } else if mh & TOP != 0 {
        -1
    } else {
        0
    };
    let delta = if ph & score_bit != 0 {
        1
    } else if mh & score_bit != 0 {
        -1
    } else {
        0
    };
    ph <<= 1;
    mh <<= 1;
    if hin < 0 {
        mh |= 1;
    } else if hin > 0 {
        ph |= 1;
    }
    *pv = mh | !(xv | ph);
    *mv = ph & xv;
    (hout, delta)
}

/// Myers bit-parallel edit distance, exact and unbanded.
/// O(ceil(|a|/64) * |b|) word operations.
pub(crate) fn myers_ed<A: Source, B: Source>(a: &A, b: &B) -> u64 {
    let n = a.len();
    let m = b.len();
    if n == 0 || m == 0 {
        return (n + m) as u64;
    }
    let blocks = n.div_ceil(64);
    // Pattern equality bitmaps keyed by symbol; rows past the pattern end
    // match nothing, and the score is tracked at the true last row's bit.
    let mut maps: Vec<Vec<u64>> = Vec::new();
    let mut lookup = std::collections::HashMap::new();
    for i in 0..n {
        let s = a.get(i);
        let idx = *lookup.entry(s).or_insert_with(|| {
            maps.push(vec![0u64; blocks]);
            maps.len() - 1
        });
        maps[idx][i / 64] |= 1u64 << (i % 64);
    }
    let mut pv = vec![u64::MAX; blocks];
    let mut mv = vec![0u64; blocks];
    let last_bit = 1u64 << ((n - 1) % 64);
    let mut score = n as i64;
    for j in 0..m {
        let eq_row = lookup.get(&b.get(j)).map(|&i| maps[i].as_slice());
        let mut hin = 1; // global alignment: row 0 grows by one per column
        for blk in 0..blocks {
            let eq = eq_row.map_or(0, |r| r[blk]);
            let bit = if blk == blocks - 1 { last_bit } else { 0 };
            let (hout, delta) = myers_block(&mut pv[blk], &mut mv[blk], eq, hin, bit);
            hin = hout;
            score += delta;
        }
    }
    score as u64
}

/// `min(ED(a, b), cap)`, computed exactly below the cap.
///
/// Uses doubling band widths so the cost adapts to the true distance, with a
/// bit-parallel fallback when the remaining band would exceed the full
/// rectangle cost.
pub fn edit_distance_capped<A: Source, B: Source>(a: &A, b: &B, cap: u64) -> u64 {
    let n = a.len() as u64;
    let m = b.len() as u64;
    let trivial = n.max(m); // ED <= max length always
    let cap = cap.min(trivial);
    if n.abs_diff(m) >= cap {
        return cap;
    }
    if n == 0 || m == 0 {
        return trivial.min(cap);
    }
    // Band widths past which the unbanded bit-parallel scan wins.
    const MYERS_MAX_LEN: u64 = 1 << 14;
    let len = n.max(m);
    let mut bound = 4u64.max(n.abs_diff(m));
    loop {
        if bound >= cap {
            break;
        }
        if len <= MYERS_MAX_LEN && bound.saturating_mul(32) > len {
            break;
        }
        match edit_distance_banded(a, b, bound) {
            Banded::Exact(d) => return d.min(cap),
            Banded::Exceeds => bound *= 2,
        }
    }
    if len <= MYERS_MAX_LEN && cap.saturating_mul(32) > len {
        return myers_ed(a, b).min(cap);
    }
    match edit_distance_banded(a, b, cap) {
        Banded::Exact(d) => d.min(cap),
        Banded::Exceeds => cap,
    }
}

/// A monotone alignment map from positions of `a` onto positions of `b`,
/// extracted from an optimal edit-distance path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alignment {
    /// `map[i]` is the smallest `j` such that the traced optimal path crosses
    /// cell `(i, j)`; `map[0] = 0` and `map[|a|] = |b|`.
    pub map: Vec<usize>,
}

/// Traces an optimal path through the full dynamic program and records, for
/// every row, the smallest crossed column.
pub fn optimal_alignment(a: &Text, b: &Text) -> Alignment {
    let n = a.len();
    let m = b.len();
    let mut dp = vec![vec![0u64; m + 1]; n + 1];
    for j in 0..=m {
        dp[0][j] = j as u64;
    }
    for i in 1..=n {
        dp[i][0] = i as u64;
        let ai = a.symbols()[i - 1];
        for j in 1..=m {
            let sub = dp[i - 1][j - 1] + u64::from(ai != b.symbols()[j - 1]);
            dp[i][j] = sub.min(dp[i - 1][j] + 1).min(dp[i][j - 1] + 1);
        }
    }
    // Backtrace preferring diagonal, then up (delete), then left (insert).
    // map[i] for i < n records the smallest column the path crosses in row i;
    // map[n] stays |b| so the ranges tile all of b.
    let mut map = vec![usize::MAX; n + 1];
    let (mut i, mut j) = (n, m);
    map[n] = m;
    while i > 0 || j > 0 {
        if i > 0 && j > 0 {
            let cost = u64::from(a.symbols()[i - 1] != b.symbols()[j - 1]);
            if dp[i][j] == dp[i - 1][j - 1] + cost {
                i -= 1;
                j -= 1;
                map[i] = map[i].min(j);
                continue;
            }
        }
        if i > 0 && dp[i][j] == dp[i - 1][j] + 1 {
            i -= 1;
            map[i] = map[i].min(j);
            continue;
        }
        j -= 1;
        if i < n {
            map[i] = map[i].min(j);
        }
    }
    debug_assert!(map.windows(2).all(|w| w[0] <= w[1]));
    Alignment { map }
}

/// ED between a single character and a substring of `b`: the alignment sum
/// decomposition is checked against this.
pub fn char_range_ed(c: Symbol, b: &Text, lo: usize, hi: usize) -> u64 {
    let len = hi - lo;
    if len == 0 {
        return 1;
    }
    let present = b.symbols()[lo..hi].contains(&c);
    len as u64 - u64::from(present)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(s: &str) -> Text {
        Text::from_bytes(s.as_bytes())
    }

    /// Reference oracle: the textbook recursive definition with memoization,
    /// enumerated over all prefix pairs.
    fn recursive_ed(a: &[Symbol], b: &[Symbol]) -> u64 {
        let mut memo = vec![vec![u64::MAX; b.len() + 1]; a.len() + 1];
        fn go(a: &[Symbol], b: &[Symbol], i: usize, j: usize, memo: &mut Vec<Vec<u64>>) -> u64 {
            if memo[i][j] != u64::MAX {
                return memo[i][j];
            }
            let v = if i == 0 {
                j as u64
            } else if j == 0 {
                i as u64
            } else {
                let sub = go(a, b, i - 1, j - 1, memo) + u64::from(a[i - 1] != b[j - 1]);
                let del = go(a, b, i - 1, j, memo) + 1;
                let ins = go(a, b, i, j - 1, memo) + 1;
                sub.min(del).min(ins)
            };
            memo[i][j] = v;
            v
        }
        go(a, b, a.len(), b.len(), &mut memo)
    }

    #[test]
    fn read_at_clamps() {
        let x = Text::new(vec![0, 1, 2], 3).unwrap();
        assert_eq!(x.read_at(1), 1);
        assert_eq!(x.read_at(-1), BOTTOM);
        assert_eq!(x.read_at(3), BOTTOM);
    }

    #[test]
    fn window_clamps() {
        let x = t("abc");
        let w = x.window(0, 3);
        assert_eq!(w.collect_symbols(), vec![b'a' as u32, b'b' as u32, b'c' as u32]);
        let w = x.window(2, 3);
        assert_eq!(w.collect_symbols(), vec![b'c' as u32, BOTTOM, BOTTOM]);
        let w = x.window(-1, 2);
        assert_eq!(w.collect_symbols(), vec![BOTTOM, b'a' as u32]);
    }

    #[test]
    fn hamming_examples() {
        let (a, b) = (t("abc"), t("abd"));
        assert_eq!(hamming(&a, &b).unwrap(), 1);
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        // "ab" + 2 BOTTOM vs "abcd": sentinel positions mismatch real chars.
        let ab = t("ab");
        let abcd = t("abcd");
        let w = ab.window(0, 4);
        let v = abcd.window(0, 4);
        assert_eq!(hamming(&w, &v).unwrap(), 2);
        assert!(hamming(&ab, &abcd).is_err());
    }

    #[test]
    fn ed_examples() {
        assert_eq!(edit_distance(&t(""), &t("ab")), 2);
        let x = t("xyzzy");
        assert_eq!(edit_distance(&x, &x), 0);
        // Frozen from the recursive-definition oracle below.
        let (k, s) = (t("kitten"), t("sitting"));
        assert_eq!(recursive_ed(k.symbols(), s.symbols()), 3);
        assert_eq!(edit_distance(&k, &s), 3);
    }

    #[test]
    fn banded_examples() {
        let (a, b) = (t("abcdef"), t("abdef"));
        assert_eq!(edit_distance(&a, &b), 1);
        assert_eq!(edit_distance_banded(&a, &b, 2), Banded::Exact(1));
        let x = t("almost");
        assert_eq!(edit_distance_banded(&x, &x, 0), Banded::Exact(0));
        let (a, b) = (t("aaaa"), t("bbbb"));
        assert_eq!(edit_distance(&a, &b), 4);
        assert_eq!(edit_distance_banded(&a, &b, 2), Banded::Exceeds);
    }

    #[test]
    fn alignment_examples() {
        let x = t("same");
        let al = optimal_alignment(&x, &x);
        assert_eq!(al.map, vec![0, 1, 2, 3, 4]);

        let (a, b) = (t("ab"), t("b"));
        let al = optimal_alignment(&a, &b);
        assert_eq!(al.map[0], 0);
        assert_eq!(al.map[2], 1);
        check_alignment_sum(&a, &b);

        let (a, b) = (t("b"), t("ab"));
        check_alignment_sum(&a, &b);
    }

    fn check_alignment_sum(a: &Text, b: &Text) {
        let al = optimal_alignment(a, b);
        assert_eq!(al.map[0], 0);
        assert_eq!(al.map[a.len()], b.len());
        for w in al.map.windows(2) {
            assert!(w[0] <= w[1]);
        }
        let total: u64 = (0..a.len())
            .map(|i| char_range_ed(a.symbols()[i], b, al.map[i], al.map[i + 1]))
            .sum();
        assert_eq!(total, edit_distance(a, b), "alignment sum mismatch");
    }

    fn rand_text(rng: &mut impl rand_core::RngCore, n: usize, sigma: u32) -> Text {
        let syms = (0..n).map(|_| rng.next_u32() % sigma).collect();
        Text::new(syms, sigma).unwrap()
    }

    #[test]
    fn alignment_sum_equation_random() {
        use rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        for trial in 0..1000 {
            let n = (trial % 64) + 1;
            let m = ((trial * 7) % 64) + 1;
            let sigma = 2 + (trial as u32 % 6);
            let a = rand_text(&mut rng, n, sigma);
            let b = rand_text(&mut rng, m, sigma);
            check_alignment_sum(&a, &b);
        }
    }

    #[test]
    fn capped_matches_oracle() {
        use rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for trial in 0..400 {
            let n = (trial % 80) + 1;
            let m = ((trial * 13) % 80) + 1;
            let a = rand_text(&mut rng, n, 4);
            let b = rand_text(&mut rng, m, 4);
            let exact = edit_distance(&a, &b);
            for cap in [0, 1, 3, 10, 200] {
                assert_eq!(
                    edit_distance_capped(&a, &b, cap),
                    exact.min(cap),
                    "cap {cap} n {n} m {m}"
                );
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(96))]

        #[test]
        fn ed_length_bounds(a in proptest::collection::vec(0u32..5, 0..48),
                            b in proptest::collection::vec(0u32..5, 0..48)) {
            let a = Text::new(a, 5).unwrap();
            let b = Text::new(b, 5).unwrap();
            let d = edit_distance(&a, &b);
            prop_assert!(d >= a.len().abs_diff(b.len()) as u64);
            prop_assert!(d <= a.len().max(b.len()) as u64);
        }

        #[test]
        fn ed_below_hamming(a in proptest::collection::vec(0u32..4, 1..40),
                            swap_positions in proptest::collection::vec(any::<u8>(), 1..40)) {
            let n = a.len();
            let mut bs = a.clone();
            for (i, &p) in swap_positions.iter().enumerate().take(n) {
                if p % 3 == 0 {
                    bs[i] = (bs[i] + 1) % 4;
                }
            }
            let a = Text::new(a, 4).unwrap();
            let b = Text::new(bs, 4).unwrap();
            prop_assert!(edit_distance(&a, &b) <= hamming(&a, &b).unwrap());
        }

        #[test]
        fn ed_triangle(a in proptest::collection::vec(0u32..4, 0..28),
                       b in proptest::collection::vec(0u32..4, 0..28),
                       c in proptest::collection::vec(0u32..4, 0..28)) {
            let a = Text::new(a, 4).unwrap();
            let b = Text::new(b, 4).unwrap();
            let c = Text::new(c, 4).unwrap();
            let ab = edit_distance(&a, &b);
            let bc = edit_distance(&b, &c);
            let ac = edit_distance(&a, &c);
            prop_assert!(ac <= ab + bc);
        }

        #[test]
        fn banded_agrees_when_within(a in proptest::collection::vec(0u32..4, 0..64),
                                     b in proptest::collection::vec(0u32..4, 0..64),
                                     bound in 0u64..20) {
            let a = Text::new(a, 4).unwrap();
            let b = Text::new(b, 4).unwrap();
            let exact = edit_distance(&a, &b);
            match edit_distance_banded(&a, &b, bound) {
                Banded::Exact(d) => prop_assert_eq!(d, exact),
                Banded::Exceeds => prop_assert!(exact > bound),
            }
        }

        #[test]
        fn myers_matches_dp(a in proptest::collection::vec(0u32..5, 1..200),
                            b in proptest::collection::vec(0u32..5, 1..200)) {
            let a = Text::new(a, 5).unwrap();
            let b = Text::new(b, 5).unwrap();
            prop_assert_eq!(myers_ed(&a, &b), edit_distance(&a, &b));
        }
    }

    #[test]
    fn myers_crosses_block_boundaries() {
        use rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for &n in &[63usize, 64, 65, 127, 128, 129, 200, 256] {
            for trial in 0..20 {
                let a = rand_text(&mut rng, n, 3);
                let b = rand_text(&mut rng, n + (trial % 5), 3);
                assert_eq!(myers_ed(&a, &b), edit_distance(&a, &b), "n={n}");
            }
        }
    }
}

