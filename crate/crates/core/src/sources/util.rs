use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::tree::{BinaryTree, NIL};

const LN2: f64 = std::f64::consts::LN_2;

/// Base-2 logarithm of a big integer; `-inf` for zero.
pub fn big_lg(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top = (x >> shift).to_u64().expect("fits in 64 bits");
    (top as f64).log2() + shift as f64
}

/// `lg(a + b)` from `lg a` and `lg b`.
pub fn lg_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp2().ln_1p() / LN2
}

/// `lg C(n, k)`; `-inf` when `k > n`.
pub fn lg_binom(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)) / LN2
}

/// `lg` of the `n`-th Catalan number.
pub fn lg_catalan(n: usize) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    (ln_gamma(2.0 * n as f64 + 1.0) - ln_gamma(n as f64 + 1.0) - ln_gamma(n as f64 + 2.0)) / LN2
}

pub fn catalan_table(n: usize) -> Vec<BigUint> {
    let mut c = vec![BigUint::from(1u32)];
    for i in 1..=n {
        // C_i = C_{i-1} * 2(2i-1) / (i+1)
        let next = &c[i - 1] * BigUint::from(2 * (2 * i - 1)) / BigUint::from(i + 1);
        c.push(next);
    }
    c
}

pub fn binom_big(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Draws an index with probability proportional to `2^w[i]`.
pub fn pick_lg<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return None;
    }
    let lin: Vec<f64> = weights.iter().map(|&w| (w - max).exp2()).collect();
    let total: f64 = lin.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = None;
    for (i, &x) in lin.iter().enumerate() {
        if x > 0.0 {
            last = Some(i);
            if u < x {
                return Some(i);
            }
            u -= x;
        }
    }
    last
}

/// Grows a binary tree top-down from a root state. `split` maps a state to the
/// optional states of the left and right children. Ids are assigned in
/// preorder.
pub fn grow_binary<S, F>(root: Option<S>, mut split: F) -> Result<BinaryTree>
where
    F: FnMut(S) -> Result<(Option<S>, Option<S>)>,
{
    let mut left = vec![NIL];
    let mut right = vec![NIL];
    let mut stack: Vec<(usize, bool, S)> = Vec::new();
    if let Some(s) = root {
        stack.push((NIL, false, s));
    }
    while let Some((parent, is_left, state)) = stack.pop() {
        let id = left.len();
        left.push(NIL);
        right.push(NIL);
        if parent != NIL {
            if is_left {
                left[parent] = id;
            } else {
                right[parent] = id;
            }
        }
        let (l, r) = split(state)?;
        if let Some(r) = r {
            stack.push((id, false, r));
        }
        if let Some(l) = l {
            stack.push((id, true, l));
        }
    }
    BinaryTree::from_preorder_links(left, right)
}

/// Grows a binary tree from a size and a left-size chooser.
pub fn grow_by_splits<F>(n: usize, mut choose: F) -> Result<BinaryTree>
where
    F: FnMut(usize) -> Result<usize>,
{
    grow_binary((n > 0).then_some(n), |s| {
        let l = choose(s)?;
        if l >= s {
            return Err(Error::InvalidArgument(format!("left size {l} out of range for subtree of {s}")));
        }
        let r = s - 1 - l;
        Ok(((l > 0).then_some(l), (r > 0).then_some(r)))
    })
}
