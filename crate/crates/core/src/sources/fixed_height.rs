use num_bigint::BigUint;
use rand::Rng;

use super::util::{big_lg, grow_binary};
use crate::error::Result;
use crate::tree::{annotate_binary, BinaryTree};

/// Number of AVL trees of each height `0..=h` (height of a leaf is 1, of the empty tree 0).
pub fn avl_height_counts(h: usize) -> Vec<BigUint> {
    let mut a: Vec<BigUint> = vec![BigUint::from(1u32), BigUint::from(1u32)];
    for i in 2..=h {
        let next = BigUint::from(2u32) * &a[i - 1] * &a[i - 2] + &a[i - 1] * &a[i - 1];
        a.push(next);
    }
    a.truncate(h + 1);
    a
}

/// Fixed-height source: uniform AVL trees of a given height.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AvlByHeight;

impl AvlByHeight {
    /// `lg(1/p(i, j))` for a node of height `max(i,j)+1`.
    pub fn lg_inv(lg_count: &[f64], i: usize, j: usize) -> f64 {
        if i.abs_diff(j) > 1 {
            return f64::INFINITY;
        }
        let h = i.max(j) + 1;
        lg_count[h] - lg_count[i] - lg_count[j]
    }

    pub fn log_prob(&self, t: &BinaryTree) -> f64 {
        if t.is_empty() {
            return 0.0;
        }
        let ann = annotate_binary(t);
        let hl = |v: usize| ann.height[t.left(v)];
        let hr = |v: usize| ann.height[t.right(v)];
        if (1..=t.len()).any(|v| hl(v).abs_diff(hr(v)) > 1) {
            return f64::INFINITY;
        }
        let lg: Vec<f64> = avl_height_counts(ann.height[1]).iter().map(big_lg).collect();
        (1..=t.len()).map(|v| Self::lg_inv(&lg, hl(v), hr(v))).sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, h: usize, rng: &mut R) -> Result<BinaryTree> {
        let lg: Vec<f64> = avl_height_counts(h).iter().map(big_lg).collect();
        grow_binary((h > 0).then_some(h), |h| {
            if h == 1 {
                return Ok((None, None));
            }
            // P[(h-1,h-1)] = A(h-1)^2 / A(h); the two unbalanced pairs share the rest
            let ratio = (lg[h - 2] - lg[h - 1]).exp2();
            let p_eq = 1.0 / (1.0 + 2.0 * ratio);
            let u: f64 = rng.gen();
            let (a, b) = if u < p_eq {
                (h - 1, h - 1)
            } else if u < p_eq + (1.0 - p_eq) / 2.0 {
                (h - 2, h - 1)
            } else {
                (h - 1, h - 2)
            };
            Ok(((a > 0).then_some(a), (b > 0).then_some(b)))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn recurrence_values() {
        let a = avl_height_counts(4);
        let v: Vec<u64> = a.iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(v, vec![1, 1, 3, 15, 315]);
    }

    #[test]
    fn samples_have_height() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for h in 1..12 {
            let t = AvlByHeight.sample(h, &mut rng).unwrap();
            assert_eq!(annotate_binary(&t).height[1], h);
            assert!(AvlByHeight.log_prob(&t).is_finite());
        }
        assert!(AvlByHeight.log_prob(&BinaryTree::left_path(3)).is_infinite());
    }
}
