use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::index::sample as sample_indices;
use rand::Rng;

use super::util::{binom_big, catalan_table, grow_binary, grow_by_splits, lg_binom, lg_catalan};
use crate::error::Result;
use crate::tree::BinaryTree;

/// Fixed-size binary source given by left/right subtree-size split probabilities.
#[derive(Clone, Debug, PartialEq)]
pub enum SplitSource {
    /// Random binary search trees: every split of a size-`s` tree has probability `1/s`.
    Bst,
    /// Uniformly random binary trees (Catalan ratios).
    Uniform,
    /// Binomial (digital search tree) splits with bias `alpha`.
    Binomial(f64),
    /// Almost paths: one side has at most `K` nodes.
    AlmostPath(usize),
    /// Median of a random `(2t+1)`-sample as the root.
    FringeBalanced(usize),
}

fn big_ratio(num: BigUint, den: BigUint) -> BigRational {
    BigRational::new(num.into(), den.into())
}

impl SplitSource {
    pub fn name(&self) -> String {
        match self {
            SplitSource::Bst => "bst".into(),
            SplitSource::Uniform => "uniform".into(),
            SplitSource::Binomial(a) => format!("binomial:{a}"),
            SplitSource::AlmostPath(k) => format!("almostpath:{k}"),
            SplitSource::FringeBalanced(t) => format!("fringebalanced:{t}"),
        }
    }

    /// `lg(1/p(l, r))`, `+inf` for probability zero.
    pub fn lg_inv(&self, l: usize, r: usize) -> f64 {
        let s = l + r + 1;
        match *self {
            SplitSource::Bst => (s as f64).log2(),
            SplitSource::Uniform => lg_catalan(s) - lg_catalan(l) - lg_catalan(r),
            SplitSource::Binomial(a) => {
                let side = |k: usize, q: f64| -> f64 {
                    if k == 0 {
                        0.0
                    } else if q == 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        k as f64 * q.log2()
                    }
                };
                -(side(l, a) + side(r, 1.0 - a) + lg_binom(s - 1, l))
            }
            SplitSource::AlmostPath(k) => {
                if l <= k || r <= k {
                    (s as f64).min(2.0 * (k as f64 + 1.0)).log2()
                } else {
                    f64::INFINITY
                }
            }
            SplitSource::FringeBalanced(t) => {
                if s < 2 * t + 1 {
                    (s as f64).log2()
                } else if l < t || r < t {
                    f64::INFINITY
                } else {
                    lg_binom(s, 2 * t + 1) - lg_binom(l, t) - lg_binom(r, t)
                }
            }
        }
    }

    pub fn prob(&self, l: usize, r: usize) -> f64 {
        match *self {
            SplitSource::Bst => 1.0 / (l + r + 1) as f64,
            _ => (-self.lg_inv(l, r)).exp2(),
        }
    }

    /// Whether split probabilities are exact rationals.
    pub fn is_rational(&self) -> bool {
        !matches!(self, SplitSource::Binomial(_))
    }

    /// Exact split probabilities `p(l, s-1-l)` for `l = 0..s`, when rational.
    pub fn row_exact(&self, s: usize) -> Option<Vec<BigRational>> {
        if s == 0 {
            return Some(Vec::new());
        }
        let row = match *self {
            SplitSource::Bst => (0..s).map(|_| big_ratio(BigUint::one(), BigUint::from(s))).collect(),
            SplitSource::Uniform => {
                let c = catalan_table(s);
                (0..s).map(|l| big_ratio(&c[l] * &c[s - 1 - l], c[s].clone())).collect()
            }
            SplitSource::Binomial(_) => return None,
            SplitSource::AlmostPath(k) => {
                let den = BigUint::from(s.min(2 * (k + 1)));
                (0..s)
                    .map(|l| {
                        if l <= k || s - 1 - l <= k {
                            big_ratio(BigUint::one(), den.clone())
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect()
            }
            SplitSource::FringeBalanced(t) => {
                if s < 2 * t + 1 {
                    (0..s).map(|_| big_ratio(BigUint::one(), BigUint::from(s))).collect()
                } else {
                    let den = binom_big(s, 2 * t + 1);
                    (0..s).map(|l| big_ratio(binom_big(l, t) * binom_big(s - 1 - l, t), den.clone())).collect()
                }
            }
        };
        Some(row)
    }

    pub fn prob_exact(&self, l: usize, r: usize) -> Option<BigRational> {
        self.row_exact(l + r + 1).map(|mut row| row.swap_remove(l))
    }

    /// Draws the left subtree size of a size-`s` tree.
    pub fn sample_split<R: Rng + ?Sized>(&self, s: usize, rng: &mut R) -> usize {
        debug_assert!(s > 0);
        match *self {
            SplitSource::Bst => rng.gen_range(0..s),
            SplitSource::Binomial(a) => (0..s - 1).filter(|_| rng.gen::<f64>() < a).count(),
            SplitSource::AlmostPath(k) => {
                if s <= 2 * (k + 1) {
                    rng.gen_range(0..s)
                } else {
                    let j = rng.gen_range(0..2 * (k + 1));
                    if j <= k {
                        j
                    } else {
                        s - 1 - (j - k - 1)
                    }
                }
            }
            SplitSource::FringeBalanced(t) => {
                if s < 2 * t + 1 {
                    rng.gen_range(0..s)
                } else {
                    let mut picks = sample_indices(rng, s, 2 * t + 1).into_vec();
                    picks.sort_unstable();
                    picks[t]
                }
            }
            SplitSource::Uniform => {
                let w: Vec<f64> = (0..s).map(|l| -self.lg_inv(l, s - 1 - l)).collect();
                super::util::pick_lg(&w, rng).expect("uniform rows are positive")
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<BinaryTree> {
        match self {
            SplitSource::Uniform => Ok(remy(n, rng)),
            _ => grow_by_splits(n, |s| Ok(self.sample_split(s, rng))),
        }
    }

    /// `Σ_v lg(1/p(|t_l[v]|, |t_r[v]|))`.
    pub fn log_prob(&self, t: &BinaryTree) -> f64 {
        let size = t.subtree_sizes();
        (1..=t.len()).map(|v| self.lg_inv(size[t.left(v)], size[t.right(v)])).sum()
    }
}

/// Uniformly random binary tree with `n` nodes (Rémy's growth on extended trees).
pub fn remy<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BinaryTree {
    if n == 0 {
        return BinaryTree::empty();
    }
    // extended tree over slots 0..2n+1; slot 0 starts as the lone leaf
    let cap = 2 * n + 1;
    let mut left = vec![usize::MAX; cap];
    let mut right = vec![usize::MAX; cap];
    let mut parent = vec![usize::MAX; cap];
    let mut root = 0usize;
    let mut count = 1usize;
    for _ in 0..n {
        let x = rng.gen_range(0..count);
        let y = count;
        let z = count + 1;
        count += 2;
        let p = parent[x];
        if p == usize::MAX {
            root = y;
        } else if left[p] == x {
            left[p] = y;
        } else {
            right[p] = y;
        }
        parent[y] = p;
        if rng.gen::<bool>() {
            left[y] = x;
            right[y] = z;
        } else {
            left[y] = z;
            right[y] = x;
        }
        parent[x] = y;
        parent[z] = y;
    }
    let internal = |v: usize| left[v] != usize::MAX;
    let t = grow_binary(Some(root), |v| {
        let l = Some(left[v]).filter(|&c| internal(c));
        let r = Some(right[v]).filter(|&c| internal(c));
        Ok((l, r))
    });
    t.expect("Rémy output is a tree")
}

/// First cell `(l, r)` with `l, r <= limit` violating `p(l,r) >= p(l+1,r)` or `p(l,r) >= p(l,r+1)`.
pub fn monotonicity_violation(src: &SplitSource, limit: usize) -> Option<(usize, usize)> {
    let tol = 1e-12;
    for l in 0..=limit {
        for r in 0..=limit {
            let p = src.prob(l, r);
            if src.prob(l + 1, r) > p * (1.0 + tol) || src.prob(l, r + 1) > p * (1.0 + tol) {
                return Some((l, r));
            }
        }
    }
    None
}
