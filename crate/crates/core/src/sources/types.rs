use rand::Rng;

use crate::error::{Error, Result};
use crate::tree::{BinaryTree, NodeType, NIL};

/// A `k`th-order type process: one distribution over node types per `k`-history.
///
/// Histories `z ∈ {1,2,3}^k` are indexed in base 3 (digit `d` stands for type `d+1`),
/// most recent ancestor in the lowest digit.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeProcess {
    pub k: usize,
    pub tau: Vec<[f64; 4]>,
}

fn pow3(k: usize) -> Result<usize> {
    u32::try_from(k).ok().and_then(|k| 3usize.checked_pow(k)).ok_or_else(|| Error::InvalidArgument(format!("order {k} too large")))
}

impl TypeProcess {
    pub fn new(k: usize, tau: Vec<[f64; 4]>) -> Result<Self> {
        if tau.len() != pow3(k)? {
            return Err(Error::InvalidArgument(format!("expected {} distributions for order {k}", pow3(k)?)));
        }
        for d in &tau {
            let sum: f64 = d.iter().sum();
            if d.iter().any(|&q| !(0.0..=1.0).contains(&q)) || (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidArgument(format!("type distribution {d:?} does not sum to 1")));
            }
        }
        Ok(TypeProcess { k, tau })
    }

    pub fn memoryless(q: [f64; 4]) -> Result<Self> {
        Self::new(0, vec![q])
    }

    /// `τ(0) = τ(1) = τ(2) = 1/3`, no right-unary nodes.
    pub fn motzkin() -> Self {
        let third = 1.0 / 3.0;
        TypeProcess { k: 0, tau: vec![[third, third, third, 0.0]] }
    }

    /// `-lg P[t] = Σ_v lg(1/τ_{h_k(v)}(type(v)))`.
    pub fn log_prob(&self, t: &BinaryTree) -> f64 {
        let hist = histories(t, self.k);
        let mut bits = 0.0;
        for v in 1..=t.len() {
            let q = self.tau[hist[v]][node_type(t, v).index()];
            if q == 0.0 {
                return f64::INFINITY;
            }
            bits -= q.log2();
        }
        bits
    }

    /// Top-down branching process conditioned by rejection on `min <= n <= max`;
    /// gives up after `budget` node expansions in total.
    pub fn sample<R: Rng + ?Sized>(&self, min: usize, max: usize, budget: usize, rng: &mut R) -> Result<BinaryTree> {
        if min > max || max == 0 {
            return Err(Error::InvalidArgument(format!("empty size window [{min}, {max}]")));
        }
        let modulus = pow3(self.k)?;
        let mut spent = 0usize;
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut stack: Vec<(usize, bool, usize)> = Vec::new();
        while spent < budget {
            left.clear();
            right.clear();
            left.push(NIL);
            right.push(NIL);
            stack.clear();
            stack.push((NIL, false, 0));
            let mut aborted = false;
            while let Some((parent, is_left, h)) = stack.pop() {
                spent += 1;
                let id = left.len();
                if id > max || spent > budget {
                    aborted = true;
                    break;
                }
                left.push(NIL);
                right.push(NIL);
                if parent != NIL {
                    if is_left {
                        left[parent] = id;
                    } else {
                        right[parent] = id;
                    }
                }
                let d = &self.tau[h];
                let mut u: f64 = rng.gen();
                let mut ty = 3;
                for (i, &q) in d.iter().enumerate() {
                    if u < q {
                        ty = i;
                        break;
                    }
                    u -= q;
                }
                while d[ty] == 0.0 {
                    ty -= 1;
                }
                if ty == 0 {
                    continue;
                }
                let child_hist = if modulus == 1 { 0 } else { (h * 3 + (ty - 1)) % modulus };
                let (has_l, has_r) = (ty <= 2, ty >= 2);
                if has_r {
                    stack.push((id, false, child_hist));
                }
                if has_l {
                    stack.push((id, true, child_hist));
                }
            }
            let n = left.len() - 1;
            if !aborted && n >= min {
                return BinaryTree::from_preorder_links(std::mem::take(&mut left), std::mem::take(&mut right));
            }
        }
        Err(Error::BudgetExceeded(format!("no tree with {min}..={max} nodes within {budget} expansions")))
    }
}

fn node_type(t: &BinaryTree, v: usize) -> NodeType {
    NodeType::of(t.left(v) != NIL, t.right(v) != NIL)
}

/// `k`-history index of every node (slot 0 unused); short histories are padded with type 1.
pub fn histories(t: &BinaryTree, k: usize) -> Vec<usize> {
    let n = t.len();
    let mut h = vec![0usize; n + 1];
    if k == 0 {
        return h;
    }
    let modulus = 3usize.saturating_pow(k as u32);
    for v in 1..=n {
        for c in [t.left(v), t.right(v)] {
            if c != NIL {
                h[c] = (h[v] * 3 + node_type(t, v).index() - 1) % modulus;
            }
        }
    }
    h
}

/// Counts `n_{z,i}` per history index `z` and type `i`.
pub fn type_counts(t: &BinaryTree, k: usize) -> Result<Vec<[u64; 4]>> {
    let mut c = vec![[0u64; 4]; pow3(k)?];
    let hist = histories(t, k);
    for v in 1..=t.len() {
        c[hist[v]][node_type(t, v).index()] += 1;
    }
    Ok(c)
}

pub(crate) fn entropy_of_counts<const N: usize>(rows: &[[u64; N]]) -> f64 {
    let mut bits = 0.0;
    for row in rows {
        let total: u64 = row.iter().sum();
        for &c in row {
            if c > 0 {
                bits += c as f64 * (total as f64 / c as f64).log2();
            }
        }
    }
    bits
}

/// Empirical `k`th-order type entropy `Σ_z Σ_i n_{z,i} lg(n_z / n_{z,i})`.
pub fn type_entropy(t: &BinaryTree, k: usize) -> Result<f64> {
    Ok(entropy_of_counts(&type_counts(t, k)?))
}

/// The `k`th-order type process fitted to `t`; unseen histories produce leaves.
pub fn empirical_type_process(t: &BinaryTree, k: usize) -> Result<TypeProcess> {
    let tau = type_counts(t, k)?
        .into_iter()
        .map(|row| {
            let total: u64 = row.iter().sum();
            if total == 0 {
                [1.0, 0.0, 0.0, 0.0]
            } else {
                row.map(|c| c as f64 / total as f64)
            }
        })
        .collect();
    Ok(TypeProcess { k, tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn uniform_memoryless_is_two_bits() {
        let p = TypeProcess::memoryless([0.25; 4]).unwrap();
        for n in [1, 5, 17] {
            assert!((p.log_prob(&BinaryTree::complete(n)) - 2.0 * n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn balanced_three() {
        let t = BinaryTree::complete(3);
        let want = 2.0 * (1.5f64).log2() + 3f64.log2();
        assert!((type_entropy(&t, 0).unwrap() - want).abs() < 1e-12);
        assert_eq!(type_entropy(&BinaryTree::single(), 0).unwrap(), 0.0);
    }

    #[test]
    fn histories_pad_with_one() {
        let h = histories(&BinaryTree::complete(3), 2);
        assert_eq!(h, vec![0, 0, 1, 1]);
        let h = histories(&BinaryTree::left_path(3), 1);
        assert_eq!(h, vec![0, 0, 0, 0]);
    }

    #[test]
    fn sampler_window() {
        let p = TypeProcess::memoryless([0.25; 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let t = p.sample(500, 1000, 1_000_000, &mut rng).unwrap();
        assert!((500..=1000).contains(&t.len()));
        let sub = TypeProcess::memoryless([0.9, 0.05, 0.05, 0.0]).unwrap();
        assert!(matches!(sub.sample(5000, 6000, 10_000, &mut rng), Err(Error::BudgetExceeded(_))));
    }
}
