//! Non-crossing set partitions and colored non-crossing pairings.
//!
//! Ground sets are 1-based, `{1, …, n}`. A non-crossing partition is stored as
//! its restricted growth string: `labels[i]` is the index of the block holding
//! element `i + 1`, blocks numbered in order of their smallest element. This
//! keeps the full enumeration of `NC(14)` (2 674 440 partitions) within a few
//! hundred megabytes; [`NCPartition::blocks`] materializes the sorted block
//! lists on demand.

use std::fmt;

use crate::error::PartitionError;

/// Default cap on the ground-set size for enumeration.
pub const DEFAULT_MAX_SIZE: usize = 14;

/// A validated set partition of `{1, …, n}` (not necessarily non-crossing).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Validates and normalizes: elements sorted within blocks, blocks sorted
    /// by their smallest element.
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let malformed = |reason: String| PartitionError::Malformed { n, reason };
        if n == 0 {
            return Err(malformed("ground set is empty".into()));
        }
        let mut seen = vec![false; n];
        let mut blocks = blocks;
        for block in &mut blocks {
            if block.is_empty() {
                return Err(malformed("empty block".into()));
            }
            block.sort_unstable();
            for &e in block.iter() {
                if e == 0 || e > n {
                    return Err(malformed(format!("element {e} out of range")));
                }
                if std::mem::replace(&mut seen[e - 1], true) {
                    return Err(malformed(format!("element {e} appears twice")));
                }
            }
        }
        if let Some(gap) = seen.iter().position(|s| !s) {
            return Err(malformed(format!("element {} is not covered", gap + 1)));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Self { n, blocks })
    }

    /// Builds a partition from a block-label per element (any labeling).
    pub fn from_labels(labels: &[usize]) -> Result<Self, PartitionError> {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for (i, &l) in labels.iter().enumerate() {
            match order.iter().position(|&o| o == l) {
                Some(b) => blocks[b].push(i + 1),
                None => {
                    order.push(l);
                    blocks.push(vec![i + 1]);
                }
            }
        }
        Self::new(labels.len(), blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    /// Restricted growth string (0-based block index per element).
    pub fn labels(&self) -> Vec<u8> {
        let mut labels = vec![0u8; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in block {
                labels[e - 1] = b as u8;
            }
        }
        labels
    }

    /// True iff no `a < b < c < d` has `{a, c}` in one block and `{b, d}` in another.
    pub fn is_noncrossing(&self) -> bool {
        let mut label = vec![0usize; self.n];
        for (b, block) in self.blocks.iter().enumerate() {
            for &e in block {
                label[e - 1] = b;
            }
        }
        labels_noncrossing(&label, self.blocks.len())
    }
}

/// Stack scan: a block re-entered after being buried under a later block is a crossing.
fn labels_noncrossing(labels: &[usize], block_count: usize) -> bool {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Unseen,
        Open,
        Closed,
    }
    let mut state = vec![State::Unseen; block_count];
    let mut stack: Vec<usize> = Vec::new();
    for &b in labels {
        match state[b] {
            State::Unseen => {
                state[b] = State::Open;
                stack.push(b);
            }
            State::Open => {
                while let Some(&top) = stack.last() {
                    if top == b {
                        break;
                    }
                    state[top] = State::Closed;
                    stack.pop();
                }
            }
            State::Closed => return false,
        }
    }
    true
}

/// `p` is non-crossing; validation happens in [`SetPartition::new`].
pub fn is_noncrossing(p: &SetPartition) -> bool {
    p.is_noncrossing()
}

/// Validates raw blocks and tests them for crossings.
pub fn check_noncrossing(n: usize, blocks: Vec<Vec<usize>>) -> Result<bool, PartitionError> {
    Ok(SetPartition::new(n, blocks)?.is_noncrossing())
}

/// A non-crossing partition of `{1, …, n}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NCPartition {
    labels: Box<[u8]>,
}

impl NCPartition {
    fn from_rgs(labels: &[u8]) -> Self {
        Self {
            labels: labels.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Restricted growth string; the enumeration is ordered lexicographically by it.
    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn block_count(&self) -> usize {
        self.labels.iter().map(|&l| l as usize + 1).max().unwrap_or(0)
    }

    /// Sorted 1-based blocks, ordered by smallest element.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            blocks[l as usize].push(i + 1);
        }
        blocks
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        block_sizes(&self.labels)
    }

    pub fn to_set_partition(&self) -> SetPartition {
        SetPartition {
            n: self.n(),
            blocks: self.blocks(),
        }
    }
}

impl fmt::Debug for NCPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{block:?}")?;
        }
        f.write_str("}")
    }
}

impl TryFrom<SetPartition> for NCPartition {
    type Error = PartitionError;

    fn try_from(p: SetPartition) -> Result<Self, Self::Error> {
        if !p.is_noncrossing() {
            return Err(PartitionError::Crossing);
        }
        if p.n > u8::MAX as usize + 1 {
            return Err(PartitionError::SizeLimit {
                n: p.n,
                max: u8::MAX as usize + 1,
            });
        }
        Ok(Self::from_rgs(&p.labels()))
    }
}

pub(crate) fn block_sizes(labels: &[u8]) -> Vec<usize> {
    let mut sizes: Vec<usize> = Vec::new();
    for &l in labels {
        let l = l as usize;
        if l == sizes.len() {
            sizes.push(0);
        }
        sizes[l] += 1;
    }
    sizes
}

/// Depth-first walk over non-crossing partitions in lexicographic order of the
/// restricted growth string.
///
/// `allow(element, block, labels)` can veto placing a 0-based element into an
/// existing block, given the labels assigned so far; opening a new block is
/// always permitted. `visit` receives the complete label string.
pub(crate) fn walk_noncrossing<A, V>(n: usize, mut allow: A, mut visit: V)
where
    A: FnMut(usize, usize, &[u8]) -> bool,
    V: FnMut(&[u8]),
{
    struct Walk<'a> {
        n: usize,
        labels: Vec<u8>,
        open: Vec<u8>,
        blocks: u8,
        allow: &'a mut dyn FnMut(usize, usize, &[u8]) -> bool,
        visit: &'a mut dyn FnMut(&[u8]),
    }

    impl Walk<'_> {
        fn step(&mut self, i: usize) {
            if i == self.n {
                (self.visit)(&self.labels);
                return;
            }
            // open blocks are stacked in increasing block index
            for depth in 0..self.open.len() {
                let b = self.open[depth];
                if !(self.allow)(i, b as usize, &self.labels) {
                    continue;
                }
                let buried: Vec<u8> = self.open.drain(depth + 1..).collect();
                self.labels.push(b);
                self.step(i + 1);
                self.labels.pop();
                self.open.extend(buried);
            }
            let b = self.blocks;
            self.blocks += 1;
            self.open.push(b);
            self.labels.push(b);
            self.step(i + 1);
            self.labels.pop();
            self.open.pop();
            self.blocks -= 1;
        }
    }

    if n == 0 {
        return;
    }
    let mut walk = Walk {
        n,
        labels: Vec::with_capacity(n),
        open: Vec::with_capacity(n),
        blocks: 0,
        allow: &mut allow,
        visit: &mut visit,
    };
    walk.step(0);
}

/// Enumerates `NC(n)` up to a configurable size cap.
#[derive(Debug, Clone, Copy)]
pub struct NcEnumerator {
    max_size: usize,
}

impl Default for NcEnumerator {
    fn default() -> Self {
        Self {
            max_size: DEFAULT_MAX_SIZE,
        }
    }
}

impl NcEnumerator {
    pub fn with_max_size(max_size: usize) -> Self {
        Self {
            max_size: max_size.min(u8::MAX as usize),
        }
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    fn check(&self, n: usize) -> Result<(), PartitionError> {
        if n == 0 || n > self.max_size {
            return Err(PartitionError::SizeLimit {
                n,
                max: self.max_size,
            });
        }
        Ok(())
    }

    pub fn enumerate(&self, n: usize) -> Result<Vec<NCPartition>, PartitionError> {
        self.check(n)?;
        let mut out = Vec::with_capacity(catalan(n as u32).unwrap_or(0) as usize);
        walk_noncrossing(n, |_, _, _| true, |labels| out.push(NCPartition::from_rgs(labels)));
        Ok(out)
    }

    /// Streams `NC(n)` without materializing it; `f` sees the label string.
    pub fn for_each<F: FnMut(&[u8])>(&self, n: usize, f: F) -> Result<(), PartitionError> {
        self.check(n)?;
        walk_noncrossing(n, |_, _, _| true, f);
        Ok(())
    }
}

/// Every non-crossing partition of `{1, …, n}`, `1 ≤ n ≤ 14`.
pub fn enumerate_noncrossing(n: usize) -> Result<Vec<NCPartition>, PartitionError> {
    NcEnumerator::default().enumerate(n)
}

/// Catalan number `C_n = binom(2n, n) / (n + 1)`.
pub fn catalan(n: u32) -> Result<u64, PartitionError> {
    let overflow = PartitionError::Overflow { what: "catalan" };
    let mut c: u128 = 1;
    for k in 0..n as u128 {
        // C_{k+1} = C_k * 2(2k+1) / (k+2), exact at every step
        c = c.checked_mul(2 * (2 * k + 1)).ok_or(overflow.clone())? / (k + 2);
        if c > u64::MAX as u128 {
            return Err(overflow);
        }
    }
    Ok(c as u64)
}

/// A word over a finite color alphabet, e.g. `AABB`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredWord<L> {
    letters: Vec<L>,
}

impl<L: PartialEq> ColoredWord<L> {
    pub fn new(letters: Vec<L>) -> Result<Self, PartitionError> {
        if letters.is_empty() {
            return Err(PartitionError::EmptyWord);
        }
        Ok(Self { letters })
    }

    pub fn letters(&self) -> &[L] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn rotated(&self, k: usize) -> Self
    where
        L: Clone,
    {
        let mut letters = self.letters.clone();
        let len = letters.len();
        letters.rotate_left(k % len);
        Self { letters }
    }
}

impl ColoredWord<char> {
    pub fn parse(s: &str) -> Result<Self, PartitionError> {
        Self::new(s.chars().collect())
    }
}

/// Number of non-crossing pair partitions of the positions of `w` that only
/// pair equal colors. Odd-length words give 0.
pub fn count_colored_nc_pairings<L: PartialEq>(w: &ColoredWord<L>) -> Result<u64, PartitionError> {
    let n = w.len();
    if n % 2 == 1 {
        return Ok(0);
    }
    let overflow = PartitionError::Overflow {
        what: "colored pairing count",
    };
    let letters = &w.letters;
    // count[i][j]: pairings of the half-open interval [i, j); only even lengths are nonzero
    let mut count = vec![vec![0u64; n + 1]; n + 1];
    for i in 0..=n {
        count[i][i] = 1;
    }
    for len in (2..=n).step_by(2) {
        for i in 0..=n - len {
            let j = i + len;
            let mut total: u64 = 0;
            // position i is paired with k; inside and outside are independent
            for k in (i + 1..j).step_by(2) {
                if letters[i] != letters[k] {
                    continue;
                }
                let term = count[i + 1][k]
                    .checked_mul(count[k + 1][j])
                    .ok_or(overflow.clone())?;
                total = total.checked_add(term).ok_or(overflow.clone())?;
            }
            count[i][j] = total;
        }
    }
    Ok(count[0][n])
}

#[cfg(test)]
mod tests {
    use super::*;

    /// All set partitions of {1..n} as restricted growth strings.
    fn all_set_partitions(n: usize) -> Vec<Vec<usize>> {
        fn rec(i: usize, n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if i == n {
                out.push(cur.clone());
                return;
            }
            for b in 0..=max {
                cur.push(b);
                rec(i + 1, n, if b == max { max + 1 } else { max }, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(0, n, 0, &mut Vec::new(), &mut out);
        out
    }

    fn crosses_brute(labels: &[usize]) -> bool {
        let n = labels.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        if labels[a] == labels[c] && labels[b] == labels[d] && labels[a] != labels[b] {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn singleton_ground_set() {
        let p = enumerate_noncrossing(1).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].blocks(), vec![vec![1]]);
    }

    #[test]
    fn small_counts_match_brute_force_filter() {
        for n in 1..=7 {
            let brute = all_set_partitions(n)
                .into_iter()
                .filter(|l| !crosses_brute(l))
                .count();
            assert_eq!(enumerate_noncrossing(n).unwrap().len(), brute, "n={n}");
        }
        assert_eq!(enumerate_noncrossing(3).unwrap().len(), 5);
    }

    #[test]
    fn four_excludes_the_crossing_pairing() {
        let all = enumerate_noncrossing(4).unwrap();
        assert_eq!(all.len(), 14);
        assert!(!all.iter().any(|p| p.blocks() == vec![vec![1, 3], vec![2, 4]]));
    }

    #[test]
    fn enumeration_is_lexicographic_and_unique() {
        let all = enumerate_noncrossing(8).unwrap();
        assert!(all.windows(2).all(|w| w[0].labels() < w[1].labels()));
    }

    #[test]
    fn worked_example_is_noncrossing() {
        let p = SetPartition::new(
            10,
            vec![vec![1, 10], vec![2, 5, 9], vec![3, 4], vec![6], vec![7, 8]],
        )
        .unwrap();
        assert!(is_noncrossing(&p));
        assert!(!check_noncrossing(4, vec![vec![1, 3], vec![2, 4]]).unwrap());
        assert!(check_noncrossing(6, (1..=6).map(|i| vec![i]).collect()).unwrap());
    }

    #[test]
    fn malformed_partitions_are_rejected() {
        assert!(matches!(
            SetPartition::new(3, vec![vec![1, 2], vec![2, 3]]),
            Err(PartitionError::Malformed { .. })
        ));
        assert!(matches!(
            SetPartition::new(3, vec![vec![1], vec![3]]),
            Err(PartitionError::Malformed { .. })
        ));
        assert!(SetPartition::new(2, vec![vec![1], vec![], vec![2]]).is_err());
        assert!(SetPartition::new(2, vec![vec![1, 3]]).is_err());
    }

    #[test]
    fn size_limit() {
        assert_eq!(
            enumerate_noncrossing(0),
            Err(PartitionError::SizeLimit { n: 0, max: 14 })
        );
        assert!(enumerate_noncrossing(15).is_err());
        assert!(NcEnumerator::with_max_size(4).enumerate(5).is_err());
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0).unwrap(), 1);
        assert_eq!(catalan(2).unwrap(), 2);
        assert_eq!(catalan(5).unwrap(), 42);
        assert_eq!(catalan(14).unwrap(), 2_674_440);
        assert_eq!(catalan(35).unwrap(), 3_116_285_494_907_301_262);
        assert!(catalan(40).is_err());
    }

    #[test]
    fn colored_pairings() {
        let count = |s: &str| count_colored_nc_pairings(&ColoredWord::parse(s).unwrap()).unwrap();
        assert_eq!(count("AABB"), 1);
        assert_eq!(count("ABAB"), 0);
        assert_eq!(count("AAAA"), 2);
        assert_eq!(count("AAB"), 0);
        assert_eq!(count("ABBA"), 1);
        assert_eq!(ColoredWord::<char>::new(vec![]), Err(PartitionError::EmptyWord));
    }

    #[test]
    fn conversion_roundtrip() {
        for p in enumerate_noncrossing(6).unwrap() {
            let back = NCPartition::try_from(p.to_set_partition()).unwrap();
            assert_eq!(back, p);
        }
        let crossing = SetPartition::new(4, vec![vec![1, 3], vec![2, 4]]).unwrap();
        assert_eq!(NCPartition::try_from(crossing), Err(PartitionError::Crossing));
    }
}
