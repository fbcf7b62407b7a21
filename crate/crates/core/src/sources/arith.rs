//! Depth-first arithmetic code for fixed-size binary sources.
//!
//! Layout: `γ(n+1)`, then (for `n > 0`) the arithmetic-coded left subtree size
//! of every node of size at least 2, in preorder. Subtrees of size 1 carry no
//! information and are skipped.

use std::collections::HashMap;

use super::fixed_size::SplitSource;
use crate::bits::{floor_lg, gamma_decode, write_gamma, BitBuf, BitReader};
use crate::error::{malformed, Error, Result};
use crate::tree::BinaryTree;

const PREC: u32 = 62;
const TOP: u64 = (1 << PREC) - 1;
const HALF: u64 = 1 << (PREC - 1);
const QUARTER: u64 = 1 << (PREC - 2);
const THREE_QUARTERS: u64 = 3 * QUARTER;
/// Frequency-table total.
const TOTAL: u64 = 1 << 32;

/// Integer cumulative frequencies of the split distribution of each subtree size.
struct FreqModel<'a> {
    src: &'a SplitSource,
    cache: HashMap<usize, Vec<u64>>,
}

impl<'a> FreqModel<'a> {
    fn new(src: &'a SplitSource) -> Self {
        FreqModel { src, cache: HashMap::new() }
    }

    fn table(&mut self, s: usize) -> &[u64] {
        let src = self.src;
        self.cache.entry(s).or_insert_with(|| {
            let probs: Vec<f64> = (0..s).map(|l| src.prob(l, s - 1 - l)).collect();
            let support = probs.iter().filter(|&&p| p > 0.0).count() as u64;
            let spread = (TOTAL - support) as f64;
            let mut freq: Vec<u64> = probs.iter().map(|&p| if p > 0.0 { 1 + (p * spread) as u64 } else { 0 }).collect();
            let used: u64 = freq.iter().sum();
            let (imax, _) = probs.iter().enumerate().fold((0, -1.0), |acc, (i, &p)| if p > acc.1 { (i, p) } else { acc });
            freq[imax] += TOTAL - used;
            let mut cum = Vec::with_capacity(s + 1);
            cum.push(0);
            let mut acc = 0;
            for f in freq {
                acc += f;
                cum.push(acc);
            }
            cum
        })
    }

    /// `[lo, hi)` of symbol `l` for size `s`.
    fn range(&mut self, s: usize, l: usize) -> (u64, u64) {
        if let SplitSource::Bst = self.src {
            let c = |x: usize| (TOTAL as u128 * x as u128 / s as u128) as u64;
            return (c(l), c(l + 1));
        }
        let t = self.table(s);
        (t[l], t[l + 1])
    }

    /// Symbol whose range contains `target`.
    fn find(&mut self, s: usize, target: u64) -> usize {
        if let SplitSource::Bst = self.src {
            let mut l = ((target as u128 * s as u128) / TOTAL as u128) as usize;
            while l + 1 < s && self.range(s, l + 1).0 <= target {
                l += 1;
            }
            while self.range(s, l).0 > target {
                l -= 1;
            }
            return l;
        }
        let t = self.table(s);
        t.partition_point(|&c| c <= target) - 1
    }
}

struct Encoder {
    low: u64,
    high: u64,
    pending: u64,
    out: BitBuf,
}

impl Encoder {
    fn emit(&mut self, bit: bool) {
        self.out.push(bit);
        for _ in 0..self.pending {
            self.out.push(!bit);
        }
        self.pending = 0;
    }

    fn encode(&mut self, lo: u64, hi: u64) {
        let range = (self.high - self.low) as u128 + 1;
        self.high = self.low + ((range * hi as u128) / TOTAL as u128) as u64 - 1;
        self.low += ((range * lo as u128) / TOTAL as u128) as u64;
        loop {
            if self.high < HALF {
                self.emit(false);
            } else if self.low >= HALF {
                self.emit(true);
                self.low -= HALF;
                self.high -= HALF;
            } else if self.low >= QUARTER && self.high < THREE_QUARTERS {
                self.pending += 1;
                self.low -= QUARTER;
                self.high -= QUARTER;
            } else {
                break;
            }
            self.low <<= 1;
            self.high = (self.high << 1) | 1;
        }
    }

    fn finish(mut self) -> BitBuf {
        self.pending += 1;
        let bit = self.low >= QUARTER;
        self.emit(bit);
        self.out
    }
}

/// Encodes `t` with the depth-first arithmetic code of `src`.
pub fn dfs_arith_encode(src: &SplitSource, t: &BinaryTree) -> Result<BitBuf> {
    let bits = src.log_prob(t);
    if !bits.is_finite() {
        return Err(Error::ZeroProbability);
    }
    let mut out = BitBuf::new();
    write_gamma(&mut out, t.len() as u64 + 1)?;
    if t.is_empty() {
        return Ok(out);
    }
    let mut model = FreqModel::new(src);
    let mut enc = Encoder { low: 0, high: TOP, pending: 0, out };
    let size = t.subtree_sizes();
    for v in 1..=t.len() {
        let s = size[v];
        if s > 1 {
            let (lo, hi) = model.range(s, size[t.left(v)]);
            if lo == hi {
                return Err(Error::ZeroProbability);
            }
            enc.encode(lo, hi);
        }
    }
    Ok(enc.finish())
}

/// Decodes one tree starting at the reader's position; the reader ends right after it.
pub fn dfs_arith_decode_from(src: &SplitSource, r: &mut BitReader<'_>) -> Result<BinaryTree> {
    let n = gamma_decode(r)? - 1;
    let n = usize::try_from(n).map_err(|_| Error::Malformed("size overflows".into()))?;
    if n == 0 {
        return Ok(BinaryTree::empty());
    }
    let buf = r.buffer();
    let start = r.position();
    let mut pos = start;
    let mut next_bit = || {
        let b = pos < buf.len() && buf.get(pos);
        pos += 1;
        b
    };
    let mut value = 0u64;
    for _ in 0..PREC {
        value = (value << 1) | next_bit() as u64;
    }
    let (mut low, mut high) = (0u64, TOP);
    let mut shifts = 0usize;
    let mut model = FreqModel::new(src);
    // preorder stack of subtree sizes; ids follow from the chosen splits
    let mut left = vec![0usize; n + 1];
    let mut right = vec![0usize; n + 1];
    let mut stack = vec![(n, 1usize)];
    while let Some((s, v)) = stack.pop() {
        let l = if s > 1 {
            let range = (high - low) as u128 + 1;
            let target = ((((value - low) as u128 + 1) * TOTAL as u128 - 1) / range) as u64;
            let l = model.find(s, target);
            let (lo, hi) = model.range(s, l);
            if lo >= hi {
                return malformed("arithmetic code selects an impossible split");
            }
            high = low + ((range * hi as u128) / TOTAL as u128) as u64 - 1;
            low += ((range * lo as u128) / TOTAL as u128) as u64;
            loop {
                if high >= HALF {
                    if low >= HALF {
                        low -= HALF;
                        high -= HALF;
                        value -= HALF;
                    } else if low >= QUARTER && high < THREE_QUARTERS {
                        low -= QUARTER;
                        high -= QUARTER;
                        value -= QUARTER;
                    } else {
                        break;
                    }
                }
                low <<= 1;
                high = (high << 1) | 1;
                value = (value << 1) | next_bit() as u64;
                shifts += 1;
            }
            l
        } else {
            0
        };
        let r_size = s - 1 - l;
        if r_size > 0 {
            right[v] = v + 1 + l;
            stack.push((r_size, v + 1 + l));
        }
        if l > 0 {
            left[v] = v + 1;
            stack.push((l, v + 1));
        }
    }
    let consumed = shifts + 2;
    if start + consumed > buf.len() {
        return malformed("arithmetic code truncated");
    }
    r.skip(consumed)?;
    BinaryTree::from_preorder_links(left, right)
}

/// Decodes a complete code word; trailing bits are rejected.
pub fn dfs_arith_decode(src: &SplitSource, bits: &BitBuf) -> Result<BinaryTree> {
    let mut r = BitReader::new(bits);
    let t = dfs_arith_decode_from(src, &mut r)?;
    if r.remaining() != 0 {
        return malformed("trailing bits after the arithmetic code");
    }
    Ok(t)
}

/// Length bound `lg(1/P[t]) + 2⌊lg(|t|+1)⌋ + 3`, `+inf` for zero probability.
pub fn dfs_code_length(src: &SplitSource, t: &BinaryTree) -> f64 {
    let bits = src.log_prob(t);
    if !bits.is_finite() {
        return f64::INFINITY;
    }
    bits + 2.0 * floor_lg(t.len() as u64 + 1) as f64 + 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_node() {
        let code = dfs_arith_encode(&SplitSource::Bst, &BinaryTree::single()).unwrap();
        assert!(code.len() <= 6);
        assert_eq!(dfs_arith_decode(&SplitSource::Bst, &code).unwrap(), BinaryTree::single());
        assert_eq!(dfs_code_length(&SplitSource::Bst, &BinaryTree::single()), 5.0);
    }

    #[test]
    fn chain_length_bound() {
        let want = 6f64.log2() + 4.0 + 3.0;
        assert!((dfs_code_length(&SplitSource::Bst, &BinaryTree::left_path(3)) - want).abs() < 1e-12);
        assert_eq!(dfs_code_length(&SplitSource::AlmostPath(0), &BinaryTree::complete(7)), f64::INFINITY);
    }

    #[test]
    fn roundtrip_and_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for src in [SplitSource::Bst, SplitSource::Uniform, SplitSource::Binomial(0.3), SplitSource::AlmostPath(2), SplitSource::FringeBalanced(1)] {
            for n in [0usize, 1, 2, 3, 10, 64, 300] {
                let t = src.sample(n, &mut rng).unwrap();
                let code = dfs_arith_encode(&src, &t).unwrap();
                assert!(code.len() as f64 <= dfs_code_length(&src, &t) + 1e-9, "{} n={n}", src.name());
                assert_eq!(dfs_arith_decode(&src, &code).unwrap(), t);
            }
        }
    }

    #[test]
    fn self_delimiting() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let trees: Vec<BinaryTree> = (0..20).map(|i| SplitSource::Bst.sample(i * 7, &mut rng).unwrap()).collect();
        let mut all = BitBuf::new();
        for t in &trees {
            all.extend_from(&dfs_arith_encode(&SplitSource::Bst, t).unwrap());
        }
        let mut r = BitReader::new(&all);
        for t in &trees {
            assert_eq!(&dfs_arith_decode_from(&SplitSource::Bst, &mut r).unwrap(), t);
        }
        assert_eq!(r.remaining(), 0);
    }

    #[test]
    fn zero_probability_rejected() {
        assert!(matches!(dfs_arith_encode(&SplitSource::AlmostPath(0), &BinaryTree::complete(7)), Err(Error::ZeroProbability)));
    }
}
