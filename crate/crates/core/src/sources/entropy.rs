use crate::bits::BitBuf;
use crate::error::{Error, Result};
use crate::tree::{BinaryTree, OrdinalTree};

/// `Σ_v lg |t[v]|`.
pub fn subtree_size_entropy(t: &BinaryTree) -> f64 {
    t.subtree_sizes()[1..].iter().map(|&s| (s as f64).log2()).sum()
}

/// Expected `lg(1/P[t])` of a random BST of size `n`:
/// `lg n + 2(n+1) Σ_{i=2}^{n-1} lg i / ((i+2)(i+1))`.
pub fn bst_entropy_closed_form(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let sum: f64 = (2..n).map(|i| (i as f64).log2() / ((i as f64 + 2.0) * (i as f64 + 1.0))).sum();
    (n as f64).log2() + 2.0 * (n as f64 + 1.0) * sum
}

/// Per-node limit `2 Σ_{i≥2} lg i / ((i+2)(i+1))` and a bound on its absolute error.
///
/// The partial sum runs to `cutoff`; the tail is bracketed by summation by parts
/// and the midpoint of the bracket is added.
pub fn bst_entropy_limit_with_error(cutoff: usize) -> (f64, f64) {
    let n = cutoff.max(2) as f64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for i in (2..=cutoff.max(2)).rev() {
        let x = i as f64;
        let term = x.log2() / ((x + 2.0) * (x + 1.0)) - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
    }
    let ln2 = std::f64::consts::LN_2;
    let base = (n + 1.0).log2() / (n + 2.0);
    let lower = base + 1.0 / ((n + 2.0) * ln2);
    let upper = base + 0.5 * (1.0 / (n + 1.0) + 1.0 / (n + 2.0)) / ln2;
    let tail = 0.5 * (lower + upper);
    (2.0 * (sum + tail), (upper - lower) + 1e-13)
}

pub fn bst_entropy_limit() -> f64 {
    bst_entropy_limit_with_error(1 << 20).0
}

/// Largest size the exhaustive enumerations accept.
pub const EXHAUSTIVE_MAX: usize = 14;

/// Calls `f` with every balanced parenthesis word of length `2n`.
pub fn for_each_dyck_word(n: usize, mut f: impl FnMut(&BitBuf)) {
    // iterative backtracking over positions; each slot first tries '(' then ')'
    let len = 2 * n;
    let mut word = vec![false; len];
    let mut choice = vec![0u8; len + 1];
    let mut opens = vec![0usize; len + 1];
    let mut depth = 0usize;
    if len == 0 {
        f(&BitBuf::new());
        return;
    }
    loop {
        if depth == len {
            let mut b = BitBuf::with_capacity(len);
            for &x in &word {
                b.push(x);
            }
            f(&b);
            if depth == 0 {
                return;
            }
            depth -= 1;
            continue;
        }
        let open_so_far = opens[depth];
        let closed = depth - open_so_far;
        let c = choice[depth];
        if c == 0 && open_so_far < n {
            choice[depth] = 1;
            word[depth] = true;
            opens[depth + 1] = open_so_far + 1;
            choice[depth + 1] = 0;
            depth += 1;
        } else if c <= 1 && closed < open_so_far {
            choice[depth] = 2;
            word[depth] = false;
            opens[depth + 1] = open_so_far;
            choice[depth + 1] = 0;
            depth += 1;
        } else {
            if depth == 0 {
                return;
            }
            depth -= 1;
        }
    }
}

pub fn for_each_binary_tree(n: usize, mut f: impl FnMut(&BinaryTree)) {
    for_each_dyck_word(n, |w| f(&BinaryTree::from_bp(w).expect("balanced words are binary BP codes")));
}

pub fn for_each_ordinal_tree(n: usize, mut f: impl FnMut(&OrdinalTree)) {
    if n == 0 {
        f(&OrdinalTree::empty());
        return;
    }
    for_each_dyck_word(n - 1, |w| {
        let mut b = BitBuf::with_capacity(2 * n);
        b.push(true);
        b.extend_from(w);
        b.push(false);
        f(&OrdinalTree::from_bp(&b).expect("wrapped balanced word"));
    });
}

pub(crate) fn check_budget(n: usize) -> Result<()> {
    if n > EXHAUSTIVE_MAX {
        return Err(Error::BudgetExceeded(format!("exhaustive enumeration is limited to n <= {EXHAUSTIVE_MAX}")));
    }
    Ok(())
}

/// `Σ P lg(1/P)` over the given per-tree `lg(1/P)` values, skipping `P = 0`.
pub(crate) fn entropy_from_bits(bits: impl IntoIterator<Item = f64>) -> (f64, f64) {
    let mut h = 0.0;
    let mut mass = 0.0;
    for b in bits {
        if b.is_finite() {
            let p = (-b).exp2();
            h += p * b;
            mass += p;
        }
    }
    (h, mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyck_counts() {
        let cat = [1usize, 1, 2, 5, 14, 42, 132, 429];
        for (n, &c) in cat.iter().enumerate() {
            let mut k = 0;
            for_each_dyck_word(n, |_| k += 1);
            assert_eq!(k, c);
        }
        let mut k = 0;
        for_each_ordinal_tree(5, |t| {
            assert_eq!(t.len(), 5);
            k += 1
        });
        assert_eq!(k, 14);
    }

    #[test]
    fn closed_form_small() {
        assert_eq!(bst_entropy_closed_form(1), 0.0);
        // n = 2: two shapes, each 1/2
        assert!((bst_entropy_closed_form(2) - 1.0).abs() < 1e-12);
        // n = 3: (1/6)*4*lg 6 + (1/3) lg 3
        let want = 4.0 / 6.0 * 6f64.log2() + 3f64.log2() / 3.0;
        assert!((bst_entropy_closed_form(3) - want).abs() < 1e-12);
    }

    #[test]
    fn limit_error_is_small() {
        let (v, err) = bst_entropy_limit_with_error(1 << 16);
        assert!(err < 1e-8);
        let (w, _) = bst_entropy_limit_with_error(1 << 20);
        assert!((v - w).abs() < 1e-8);
    }
}
