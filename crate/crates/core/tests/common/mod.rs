//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use hypersuccinct::tree::{BinaryTree, NIL};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Left and total subtree sizes of the 20-node example, in preorder.
pub const EXAMPLE_SIZES: [(usize, usize); 20] = [
    (18, 20), (9, 18), (8, 9), (4, 8), (3, 4), (1, 3), (0, 1), (0, 1), (1, 3), (0, 1),
    (0, 1), (5, 8), (3, 5), (2, 3), (1, 2), (0, 1), (0, 1), (1, 2), (0, 1), (0, 1),
];

pub fn example_tree() -> BinaryTree {
    // preorder ids: the left child follows its parent, the right child skips the left subtree
    let n = EXAMPLE_SIZES.len();
    let mut left = vec![NIL; n + 1];
    let mut right = vec![NIL; n + 1];
    for (i, &(l, s)) in EXAMPLE_SIZES.iter().enumerate() {
        let v = i + 1;
        if l > 0 {
            left[v] = v + 1;
        }
        if s - 1 - l > 0 {
            right[v] = v + 1 + l;
        }
    }
    BinaryTree::from_preorder_links(left, right).unwrap()
}

pub fn all_dyck(n: usize) -> Vec<String> {
    // independent string-based generator
    fn go(open: usize, close: usize, n: usize, cur: &mut String, out: &mut Vec<String>) {
        if cur.len() == 2 * n {
            out.push(cur.clone());
            return;
        }
        if open < n {
            cur.push('(');
            go(open + 1, close, n, cur, out);
            cur.pop();
        }
        if close < open {
            cur.push(')');
            go(open, close + 1, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, 0, n, &mut String::new(), &mut out);
    out
}

/// Heights per node, computed bottom-up in reverse preorder.
pub fn heights(t: &BinaryTree) -> Vec<usize> {
    let mut h = vec![0usize; t.len() + 1];
    for v in (1..=t.len()).rev() {
        h[v] = 1 + h[t.left(v)].max(h[t.right(v)]);
    }
    h
}

pub fn is_avl(t: &BinaryTree) -> bool {
    let h = heights(t);
    (1..=t.len()).all(|v| h[t.left(v)].abs_diff(h[t.right(v)]) <= 1)
}

pub fn is_wb(t: &BinaryTree, num: u64, den: u64) -> bool {
    let s = t.subtree_sizes();
    (1..=t.len()).all(|v| {
        let m = s[t.left(v)].min(s[t.right(v)]) as u64;
        (m + 1) * den >= num * (s[v] as u64 + 1)
    })
}

/// Probabilities of every tree of size `n` with positive mass, keyed by BP.
pub fn binary_law(n: usize, lp: impl Fn(&BinaryTree) -> f64) -> HashMap<String, f64> {
    let mut law = HashMap::new();
    for s in all_dyck(n) {
        let t = BinaryTree::from_bp_str(&s).unwrap();
        let b = lp(&t);
        if b.is_finite() {
            law.insert(s, (-b).exp2());
        }
    }
    law
}

/// Chi-square p-value of `counts` against `law`; bins with small expectation are pooled.
pub fn chi_square_p(law: &HashMap<String, f64>, counts: &HashMap<String, usize>, total: usize) -> f64 {
    let mass: f64 = law.values().sum();
    assert!((mass - 1.0).abs() < 1e-9, "law mass {mass}");
    for k in counts.keys() {
        assert!(law.contains_key(k), "sampled a zero-probability tree {k}");
    }
    let mut keys: Vec<&String> = law.keys().collect();
    keys.sort();
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut pool_e, mut pool_o) = (0.0, 0.0);
    for k in keys {
        let e = law[k] * total as f64;
        let o = *counts.get(k).unwrap_or(&0) as f64;
        if e < 5.0 {
            pool_e += e;
            pool_o += o;
        } else {
            stat += (o - e) * (o - e) / e;
            bins += 1;
        }
    }
    if pool_e > 0.0 {
        stat += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
        bins += 1;
    }
    if bins < 2 {
        return 1.0;
    }
    1.0 - ChiSquared::new((bins - 1) as f64).unwrap().cdf(stat)
}

pub const SAMPLES: usize = 100_000;
pub const ALPHA: f64 = 1e-4;

pub fn tally(mut draw: impl FnMut() -> String) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for _ in 0..SAMPLES {
        *counts.entry(draw()).or_insert(0) += 1;
    }
    counts
}
