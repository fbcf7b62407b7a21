use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;

use super::util::{grow_binary, lg_add, pick_lg};
use crate::error::{Error, Result};
use crate::tree::{BinaryTree, NIL};

/// Classes whose uniform distribution is realized by a counting DP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subclass {
    /// Height-balanced trees of a given size.
    AvlBySize,
    /// Left-leaning red-black trees, counted with their edge colorings.
    LeftLeaningRedBlack,
    /// `min(|t_l|, |t_r|) + 1 >= α(|t| + 1)` at every node, with `α = num/den`.
    WeightBalanced { num: u64, den: u64 },
}

/// DP state of a subtree: AVL height, or (black height, entered through a red edge).
type State = (u32, bool);

impl Subclass {
    pub fn name(&self) -> String {
        match self {
            Subclass::AvlBySize => "avl-size".into(),
            Subclass::LeftLeaningRedBlack => "llrb".into(),
            Subclass::WeightBalanced { num, den } => format!("wb:{num}/{den}"),
        }
    }

    fn empty_states(&self) -> &'static [State] {
        match self {
            Subclass::LeftLeaningRedBlack => &[(0, false), (0, true)],
            _ => &[(0, false)],
        }
    }

    fn root_ok(&self, st: State) -> bool {
        match self {
            Subclass::LeftLeaningRedBlack => !st.1,
            _ => true,
        }
    }

    /// Parent states reachable from child states, in a fixed order.
    fn combine(&self, l: usize, sl: State, r: usize, sr: State, out: &mut Vec<State>) {
        out.clear();
        match *self {
            Subclass::AvlBySize => {
                if sl.0.abs_diff(sr.0) <= 1 {
                    out.push((sl.0.max(sr.0) + 1, false));
                }
            }
            Subclass::WeightBalanced { num, den } => {
                let s = (l + r + 1) as u128;
                if (l.min(r) as u128 + 1) * den as u128 >= num as u128 * (s + 1) {
                    out.push((0, false));
                }
            }
            Subclass::LeftLeaningRedBlack => {
                let (lred, rred) = (sl.1, sr.1);
                // null links are black; a lone red child edge must be the left one
                if (lred && l == 0) || (rred && r == 0) || (rred && !lred) {
                    return;
                }
                let hl = sl.0 + u32::from(!lred);
                let hr = sr.0 + u32::from(!rred);
                if hl != hr {
                    return;
                }
                out.push((hl, false));
                if !lred && !rred {
                    out.push((hl, true));
                }
            }
        }
    }
}

/// Semiring used by the DPs: exact big integers or base-2 logarithms.
trait Weight: Clone {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Weight for BigUint {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

#[derive(Clone, Copy, Debug)]
struct Lg(f64);

impl Weight for Lg {
    fn zero() -> Self {
        Lg(f64::NEG_INFINITY)
    }
    fn one() -> Self {
        Lg(0.0)
    }
    fn add(&mut self, other: &Self) {
        self.0 = lg_add(self.0, other.0);
    }
    fn mul(&self, other: &Self) -> Self {
        Lg(self.0 + other.0)
    }
    fn is_zero(&self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

fn accumulate<W: Weight>(row: &mut Vec<(State, W)>, st: State, w: W) {
    match row.iter_mut().find(|(s, _)| *s == st) {
        Some((_, acc)) => acc.add(&w),
        None => row.push((st, w)),
    }
}

/// `table[s]` lists `(state, weight)` of all class members of size `s`.
fn size_table<W: Weight>(class: Subclass, n: usize) -> Vec<Vec<(State, W)>> {
    let mut table: Vec<Vec<(State, W)>> = Vec::with_capacity(n + 1);
    table.push(class.empty_states().iter().map(|&st| (st, W::one())).collect());
    let mut out = Vec::new();
    for s in 1..=n {
        let mut row: Vec<(State, W)> = Vec::new();
        for l in 0..s {
            let r = s - 1 - l;
            for (sl, wl) in &table[l] {
                for (sr, wr) in &table[r] {
                    class.combine(l, *sl, r, *sr, &mut out);
                    if out.is_empty() {
                        continue;
                    }
                    let w = wl.mul(wr);
                    for &st in &out {
                        accumulate(&mut row, st, w.clone());
                    }
                }
            }
        }
        row.retain(|(_, w)| !w.is_zero());
        row.sort_by_key(|(st, _)| *st);
        table.push(row);
    }
    table
}

fn total<W: Weight>(class: Subclass, row: &[(State, W)]) -> W {
    let mut acc = W::zero();
    for (st, w) in row {
        if class.root_ok(*st) {
            acc.add(w);
        }
    }
    acc
}

/// Exact number of class members of size `n` (colored trees for red-black).
pub fn count_subclass(class: Subclass, n: usize) -> BigUint {
    let table = size_table::<BigUint>(class, n);
    total(class, &table[n])
}

/// Counts for every size `0..=n`.
pub fn count_subclass_upto(class: Subclass, n: usize) -> Vec<BigUint> {
    let table = size_table::<BigUint>(class, n);
    table.iter().map(|row| total(class, row)).collect()
}

/// Number of class objects with shape `t` (colorings for red-black, else 0 or 1).
fn tree_weight<W: Weight>(class: Subclass, t: &BinaryTree) -> W {
    let n = t.len();
    let size = t.subtree_sizes();
    let mut states: Vec<Vec<(State, W)>> = vec![Vec::new(); n + 1];
    let empty: Vec<(State, W)> = class.empty_states().iter().map(|&st| (st, W::one())).collect();
    let mut out = Vec::new();
    for v in (1..=n).rev() {
        let (l, r) = (t.left(v), t.right(v));
        let ls = if l == NIL { &empty } else { &states[l] };
        let rs = if r == NIL { &empty } else { &states[r] };
        let mut row: Vec<(State, W)> = Vec::new();
        for (sl, wl) in ls {
            for (sr, wr) in rs {
                class.combine(size[l], *sl, size[r], *sr, &mut out);
                let w = wl.mul(wr);
                for &st in &out {
                    accumulate(&mut row, st, w.clone());
                }
            }
        }
        states[v] = row;
    }
    if n == 0 {
        return total(class, &empty);
    }
    total(class, &states[1])
}

/// Exact number of class objects of shape `t`.
pub fn shape_multiplicity(class: Subclass, t: &BinaryTree) -> BigUint {
    tree_weight::<BigUint>(class, t)
}

/// `lg(1/P[t])` for the uniform distribution over class objects of size `|t|`.
pub fn subclass_log_prob(class: Subclass, t: &BinaryTree) -> f64 {
    let mult = tree_weight::<Lg>(class, t).0;
    if mult == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let table = size_table::<Lg>(class, t.len());
    total(class, &table[t.len()]).0 - mult
}

/// Uniform class member of size `n`, returned as its shape.
pub fn sample_subclass<R: Rng + ?Sized>(class: Subclass, n: usize, rng: &mut R) -> Result<BinaryTree> {
    let table = size_table::<Lg>(class, n);
    let roots: Vec<&(State, Lg)> = table[n].iter().filter(|(st, _)| class.root_ok(*st)).collect();
    let w: Vec<f64> = roots.iter().map(|(_, w)| w.0).collect();
    let pick = pick_lg(&w, rng).ok_or_else(|| Error::EmptyClass(format!("no {} tree of size {n}", class.name())))?;
    if n == 0 {
        return Ok(BinaryTree::empty());
    }
    let root_state = roots[pick].0;
    let mut out = Vec::new();
    grow_binary(Some((n, root_state)), |(s, st)| {
        let mut options: Vec<(usize, State, State)> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for l in 0..s {
            let r = s - 1 - l;
            for (sl, wl) in &table[l] {
                for (sr, wr) in &table[r] {
                    class.combine(l, *sl, r, *sr, &mut out);
                    if out.contains(&st) {
                        options.push((l, *sl, *sr));
                        weights.push(wl.0 + wr.0);
                    }
                }
            }
        }
        let i = pick_lg(&weights, rng).ok_or_else(|| Error::EmptyClass("inconsistent counting table".into()))?;
        let (l, sl, sr) = options[i];
        let r = s - 1 - l;
        Ok(((l > 0).then_some((l, sl)), (r > 0).then_some((r, sr))))
    })
}

/// Whether some class object has shape `t`.
pub fn in_subclass(class: Subclass, t: &BinaryTree) -> bool {
    !Zero::is_zero(&tree_weight::<BigUint>(class, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn small(class: Subclass, n: usize) -> Vec<u64> {
        count_subclass_upto(class, n).iter().map(|c| c.try_into().unwrap()).collect()
    }

    #[test]
    fn avl_by_size_values() {
        assert_eq!(&small(Subclass::AvlBySize, 4)[1..], &[1, 2, 1, 4]);
    }

    #[test]
    fn llrb_values() {
        // colored left-leaning red-black trees (2-3-4 trees by key count)
        assert_eq!(&small(Subclass::LeftLeaningRedBlack, 9)[1..], &[1, 1, 2, 2, 4, 5, 9, 15, 28]);
        assert_eq!(shape_multiplicity(Subclass::LeftLeaningRedBlack, &BinaryTree::complete(3)), BigUint::from(2u32));
    }

    #[test]
    fn sampled_members_belong() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for class in [Subclass::AvlBySize, Subclass::LeftLeaningRedBlack, Subclass::WeightBalanced { num: 2, den: 7 }] {
            for n in [1, 2, 7, 40] {
                let t = sample_subclass(class, n, &mut rng).unwrap();
                assert_eq!(t.len(), n);
                assert!(in_subclass(class, &t), "{} n={n}", class.name());
                assert!(subclass_log_prob(class, &t).is_finite());
            }
        }
    }

    #[test]
    fn empty_class_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // alpha = 1/2 only admits perfect trees
        let wb = Subclass::WeightBalanced { num: 1, den: 2 };
        assert!(matches!(sample_subclass(wb, 2, &mut rng), Err(Error::EmptyClass(_))));
        assert!(sample_subclass(wb, 3, &mut rng).is_ok());
    }
}
