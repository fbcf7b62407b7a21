use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::types::entropy_of_counts;
use crate::error::{Error, Result};
use crate::tree::{OrdinalTree, NIL};

/// Degree-distribution source: `P[t] = ∏_v d_{deg(v)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDist {
    pub d: Vec<f64>,
}

impl DegreeDist {
    pub fn new(d: Vec<f64>) -> Result<Self> {
        let sum: f64 = d.iter().sum();
        if d.first().is_none_or(|&d0| d0 <= 0.0) || d.iter().any(|&q| q < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("degree distribution needs d0 > 0 and total mass 1".into()));
        }
        Ok(DegreeDist { d })
    }

    pub fn log_prob(&self, t: &OrdinalTree) -> f64 {
        let mut bits = 0.0;
        for v in 1..=t.len() {
            let q = self.d.get(t.degree(v)).copied().unwrap_or(0.0);
            if q == 0.0 {
                return f64::INFINITY;
            }
            bits -= q.log2();
        }
        bits
    }

    /// Galton-Watson tree conditioned by rejection on `min <= n <= max`.
    pub fn sample<R: Rng + ?Sized>(&self, min: usize, max: usize, budget: usize, rng: &mut R) -> Result<OrdinalTree> {
        if min > max || max == 0 {
            return Err(Error::InvalidArgument(format!("empty size window [{min}, {max}]")));
        }
        let mut spent = 0usize;
        while spent < budget {
            // preorder degree sequence; `open` counts pending child slots
            let mut degs: Vec<usize> = Vec::new();
            let mut open = 1usize;
            while open > 0 && degs.len() < max && spent < budget {
                spent += 1;
                let mut u: f64 = rng.gen();
                let mut deg = self.d.len() - 1;
                for (i, &q) in self.d.iter().enumerate() {
                    if u < q {
                        deg = i;
                        break;
                    }
                    u -= q;
                }
                while self.d[deg] == 0.0 {
                    deg -= 1;
                }
                degs.push(deg);
                open = open - 1 + deg;
            }
            if open == 0 && degs.len() >= min {
                return tree_from_degrees(&degs);
            }
        }
        Err(Error::BudgetExceeded(format!("no tree with {min}..={max} nodes within {budget} expansions")))
    }
}

/// Ordinal tree from its preorder degree sequence.
pub fn tree_from_degrees(degs: &[usize]) -> Result<OrdinalTree> {
    let n = degs.len();
    let mut size = vec![1usize; n + 1];
    size[0] = 0;
    // stack of (node, children still expected)
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for (i, &d) in degs.iter().enumerate() {
        let v = i + 1;
        if v > 1 && stack.is_empty() {
            return Err(Error::InvalidArgument("degree sequence describes a forest".into()));
        }
        if let Some(top) = stack.last_mut() {
            top.1 -= 1;
        }
        stack.push((v, d));
        while let Some(&(u, 0)) = stack.last() {
            stack.pop();
            if let Some(&(p, _)) = stack.last() {
                size[p] += size[u];
            }
        }
    }
    if !stack.is_empty() {
        return Err(Error::InvalidArgument("degree sequence is incomplete".into()));
    }
    OrdinalTree::from_sizes(size)
}

/// Fixed-size ordinal source over root compositions `p(n_1, …, n_k)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrdinalSplit {
    /// Every composition of `n-1` equally likely: `2^{-(n-2)}`.
    Composition,
    /// `∏_j 1/(n_1 + … + n_j)`: shapes of LRM trees of random permutations.
    Lrm,
}

impl OrdinalSplit {
    pub fn name(&self) -> &'static str {
        match self {
            OrdinalSplit::Composition => "composition",
            OrdinalSplit::Lrm => "lrm",
        }
    }

    /// `lg(1/p(n_1, …, n_k))`.
    pub fn lg_inv(&self, parts: &[usize]) -> f64 {
        let total: usize = parts.iter().sum();
        match self {
            OrdinalSplit::Composition => total.saturating_sub(1) as f64,
            OrdinalSplit::Lrm => {
                let mut acc = 0usize;
                parts
                    .iter()
                    .map(|&p| {
                        acc += p;
                        (acc as f64).log2()
                    })
                    .sum()
            }
        }
    }

    pub fn log_prob(&self, t: &OrdinalTree) -> f64 {
        let mut bits = 0.0;
        let mut parts = Vec::new();
        for v in 1..=t.len() {
            parts.clear();
            parts.extend(t.children(v).map(|c| t.subtree_size(c)));
            bits += self.lg_inv(&parts);
        }
        bits
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<OrdinalTree> {
        match self {
            OrdinalSplit::Composition => Ok(sample_composition_tree(n, rng)),
            OrdinalSplit::Lrm => {
                let mut perm: Vec<usize> = (0..n.saturating_sub(1)).collect();
                perm.shuffle(rng);
                Ok(lrm_tree(&perm))
            }
        }
    }
}

fn sample_composition_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> OrdinalTree {
    if n == 0 {
        return OrdinalTree::empty();
    }
    let mut size = vec![0usize];
    let mut stack = vec![n];
    let mut parts = Vec::new();
    while let Some(s) = stack.pop() {
        size.push(s);
        parts.clear();
        let mut run = 1usize;
        // a barrier in each of the s-2 gaps with probability 1/2
        for _ in 1..s.saturating_sub(1) {
            if rng.gen::<bool>() {
                parts.push(run);
                run = 1;
            } else {
                run += 1;
            }
        }
        if s > 1 {
            parts.push(run);
        }
        stack.extend(parts.iter().rev());
    }
    OrdinalTree::from_sizes(size).expect("preorder sizes are consistent")
}

/// LRM tree under a virtual minimum root: the parent of position `i` is the
/// nearest earlier position holding a smaller value.
pub fn lrm_tree<T: Ord>(values: &[T]) -> OrdinalTree {
    let n = values.len() + 1;
    let mut parent = vec![NIL; n + 1];
    let mut stack: Vec<usize> = Vec::new();
    for (i, x) in values.iter().enumerate() {
        while let Some(&j) = stack.last() {
            if values[j] > *x {
                stack.pop();
            } else {
                break;
            }
        }
        parent[i + 2] = stack.last().map_or(1, |&j| j + 2);
        stack.push(i);
    }
    let mut size = vec![1usize; n + 1];
    size[0] = 0;
    for v in (2..=n).rev() {
        size[parent[v]] += size[v];
    }
    OrdinalTree::from_sizes(size).expect("LRM subtrees are contiguous")
}

/// Degree entropy `Σ_i ν_i lg(n/ν_i)`.
pub fn degree_entropy(t: &OrdinalTree) -> f64 {
    let n = t.len();
    let mut count = vec![0u64; n + 1];
    for v in 1..=n {
        count[t.degree(v)] += 1;
    }
    let total = n as f64;
    count.iter().filter(|&&c| c > 0).map(|&c| c as f64 * (total / c as f64).log2()).sum()
}

/// Shape-history counts `[m_{z,leaf}, m_{z,inner}]` of the modified FCNS tree,
/// one row per occurring history `z` in order of first appearance.
pub fn shape_counts(t: &OrdinalTree, k: usize) -> Result<Vec<[u64; 2]>> {
    let b = t.fcns();
    let n = b.len();
    let depth = {
        let mut d = vec![0usize; n + 1];
        let mut max = 1;
        for v in 1..=n {
            for c in [b.left(v), b.right(v)] {
                if c != NIL {
                    d[c] = d[v] + 1;
                }
            }
            max = max.max(d[v] + 1);
        }
        max
    };
    // a history key is the k-window for small k; for k past the depth every
    // history is the full path with its leading zeros removed (a trie id)
    let windowed = k <= 64;
    if !windowed && k < depth {
        return Err(Error::InvalidArgument(format!("order {k} too large")));
    }
    let mask = if k >= 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut trie: HashMap<(u64, u8), u64> = HashMap::new();
    let mut step = |z: u64, dir: u8| -> u64 {
        if windowed {
            ((z << 1) | dir as u64) & mask
        } else if z == 0 && dir == 0 {
            0
        } else {
            let next = trie.len() as u64 + 1;
            *trie.entry((z, dir)).or_insert(next)
        }
    };
    let mut class: HashMap<u64, usize> = HashMap::new();
    let mut m: Vec<[u64; 2]> = Vec::new();
    let mut bump = |z: u64, i: usize| {
        let id = *class.entry(z).or_insert_with(|| {
            m.push([0, 0]);
            m.len() - 1
        });
        m[id][i] += 1;
    };
    let mut hist = vec![0u64; n + 1];
    if n == 0 {
        bump(0, 0);
    }
    for v in 1..=n {
        let z = hist[v];
        bump(z, 1);
        for (c, dir) in [(b.left(v), 0u8), (b.right(v), 1u8)] {
            let zc = step(z, dir);
            if c == NIL {
                bump(zc, 0);
            } else {
                hist[c] = zc;
            }
        }
    }
    Ok(m)
}

/// `k`th-order shape entropy of `t`, taken over its modified FCNS tree.
pub fn shape_entropy(t: &OrdinalTree, k: usize) -> Result<f64> {
    Ok(entropy_of_counts(&shape_counts(t, k)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn degree_entropy_examples() {
        for n in [2usize, 5, 40] {
            let want = (n - 1) as f64 * (n as f64 / (n - 1) as f64).log2() + (n as f64).log2();
            assert!((degree_entropy(&OrdinalTree::star(n)) - want).abs() < 1e-9);
            assert!((degree_entropy(&OrdinalTree::path(n)) - want).abs() < 1e-9);
        }
        assert_eq!(degree_entropy(&OrdinalTree::single()), 0.0);
    }

    #[test]
    fn shape_entropy_single() {
        let want = 3f64.log2() + 2.0 * 1.5f64.log2();
        assert!((shape_entropy(&OrdinalTree::single(), 0).unwrap() - want).abs() < 1e-12);
        // deep histories are root paths with their zero padding stripped:
        // classes ε (3 inner, 1 leaf), 1 (2, 1), 10 (1, 1), 11 (0, 2), 100 and 101 (0, 1)
        let t = OrdinalTree::from_bp_str("((()())(()))").unwrap();
        let want = 3.0 * (4.0f64 / 3.0).log2() + 2.0 + 2.0 * 1.5f64.log2() + 3f64.log2() + 2.0;
        for k in [2 * t.len() + 1, 80] {
            assert!((shape_entropy(&t, k).unwrap() - want).abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn degree_sequences() {
        let t = OrdinalTree::from_bp_str("((()())()(()))").unwrap();
        let degs: Vec<usize> = (1..=t.len()).map(|v| t.degree(v)).collect();
        assert_eq!(tree_from_degrees(&degs).unwrap(), t);
        assert!(tree_from_degrees(&[1]).is_err());
        assert!(tree_from_degrees(&[0, 0]).is_err());
    }

    #[test]
    fn lrm_shape() {
        // values 2 0 1: positions 1 and 2 hang below 0's record
        let t = lrm_tree(&[2, 0, 1]);
        assert_eq!(t.to_bp_string(), "(()(()))");
        assert_eq!(lrm_tree::<u8>(&[]).len(), 1);
    }

    #[test]
    fn samplers() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for src in [OrdinalSplit::Composition, OrdinalSplit::Lrm] {
            for n in [1, 2, 10, 300] {
                let t = src.sample(n, &mut rng).unwrap();
                assert_eq!(t.len(), n);
                assert!(src.log_prob(&t).is_finite());
            }
        }
        let d = DegreeDist::new(vec![0.5, 0.0, 0.5]).unwrap();
        let t = d.sample(50, 100, 1_000_000, &mut rng).unwrap();
        assert!(t.len() % 2 == 1 && (50..=100).contains(&t.len()));
    }
}
