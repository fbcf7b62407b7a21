//! Range-minimum queries through the hypersuccinct Cartesian tree, and the
//! runs statistics that bound its size.

use crate::bits::BitBuf;
use crate::error::{Error, Result};
use crate::hypercodec::HsBlob;
use crate::navigate::{build_nav, NavIndex};
use crate::sources::lg_binom;
use crate::tree::{BinaryTree, NIL};

/// Min-rooted Cartesian tree; ties go to the leftmost minimum, so equal runs
/// form right chains. The node of inorder rank `j` stands for `a[j - 1]`.
pub fn cartesian_tree<T: Ord>(a: &[T]) -> Result<BinaryTree> {
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty array".into()));
    }
    // nodes are array positions 1..=n during construction
    let mut left = vec![NIL; n + 1];
    let mut right = vec![NIL; n + 1];
    let mut stack: Vec<usize> = Vec::new();
    for i in 1..=n {
        let mut last = NIL;
        while let Some(&top) = stack.last() {
            if a[top - 1] > a[i - 1] {
                last = top;
                stack.pop();
            } else {
                break;
            }
        }
        left[i] = last;
        if let Some(&top) = stack.last() {
            right[top] = i;
        }
        stack.push(i);
    }
    let (t, _) = BinaryTree::from_links(stack[0], &left, &right)?;
    Ok(t)
}

/// Hypersuccinct Cartesian tree with its navigation index.
#[derive(Clone, Debug)]
pub struct RmqIndex {
    nav: NavIndex,
    n: usize,
}

impl RmqIndex {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Rebuilds the index from a stored Cartesian-tree blob.
    pub fn from_blob(blob: &HsBlob) -> Result<RmqIndex> {
        let nav = build_nav(blob)?;
        Ok(RmqIndex { n: nav.len(), nav })
    }

    pub fn nav(&self) -> &NavIndex {
        &self.nav
    }

    /// Leftmost position of the minimum of `a[i..=j]`, 1-based.
    pub fn query(&self, i: usize, j: usize) -> Result<usize> {
        if i == 0 || j > self.n {
            return Err(Error::OutOfRange { index: if i == 0 { 0 } else { j }, len: self.n });
        }
        if i > j {
            return Err(Error::InvalidArgument(format!("inverted interval [{i}, {j}]")));
        }
        let u = self.nav.inorder_select(i)?;
        let v = self.nav.inorder_select(j)?;
        self.nav.inorder_rank(self.nav.lca(u, v)?)
    }
}

/// Builds the index with the default block size.
pub fn rmq_build<T: Ord>(a: &[T]) -> Result<RmqIndex> {
    rmq_build_with_block(a, None)
}

pub fn rmq_build_with_block<T: Ord>(a: &[T], block: Option<usize>) -> Result<RmqIndex> {
    let t = cartesian_tree(a)?;
    Ok(RmqIndex { nav: NavIndex::from_tree(&t, block)?, n: a.len() })
}

pub fn rmq_query(idx: &RmqIndex, i: usize, j: usize) -> Result<usize> {
    idx.query(i, j)
}

/// Run statistics of an array; a run is a maximal nondecreasing segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunsProfile {
    pub n: usize,
    pub r: usize,
    /// Runs of length one.
    pub s: usize,
    /// `2 lg C(n, r)`.
    pub bound_bits: f64,
    /// `lg N(n, r) = lg(C(n, r) C(n, r-1) / n)`.
    pub narayana_bits: f64,
}

/// `lg` of the Narayana number `N(n, r)`.
pub fn narayana_lg(n: usize, r: usize) -> f64 {
    if n == 0 || r == 0 || r > n {
        return f64::NEG_INFINITY;
    }
    if r == 1 || r == n {
        return 0.0;
    }
    lg_binom(n, r) + lg_binom(n, r - 1) - (n as f64).log2()
}

pub fn runs_profile<T: Ord>(a: &[T]) -> Result<RunsProfile> {
    let n = a.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty array".into()));
    }
    let (mut r, mut s, mut len) = (1usize, 0usize, 1usize);
    for i in 1..n {
        if a[i] < a[i - 1] {
            s += usize::from(len == 1);
            r += 1;
            len = 1;
        } else {
            len += 1;
        }
    }
    s += usize::from(len == 1);
    Ok(RunsProfile { n, r, s, bound_bits: 2.0 * lg_binom(n, r), narayana_bits: narayana_lg(n, r) })
}

/// Occurrences of `()` in a balanced parenthesis word.
pub fn dyck_peaks(bp: &BitBuf) -> Result<usize> {
    let mut excess = 0i64;
    let mut peaks = 0;
    let mut prev = false;
    for b in bp.iter() {
        if b {
            excess += 1;
        } else {
            excess -= 1;
            if excess < 0 {
                return Err(Error::Malformed("unbalanced parentheses".into()));
            }
            peaks += usize::from(prev);
        }
        prev = b;
    }
    if excess != 0 {
        return Err(Error::Malformed("unbalanced parentheses".into()));
    }
    Ok(peaks)
}

/// The inorder parenthesis word: `W(t) = W(left) ( W(right) )`, empty for the empty tree.
pub fn inorder_bp(t: &BinaryTree) -> BitBuf {
    let mut out = BitBuf::with_capacity(2 * t.len());
    if t.is_empty() {
        return out;
    }
    // (node, stage): stage 0 = before left, 1 = after left, 2 = after right
    let mut stack = vec![(t.root(), 0u8)];
    while let Some((v, stage)) = stack.pop() {
        match stage {
            0 => {
                stack.push((v, 1));
                if t.left(v) != NIL {
                    stack.push((t.left(v), 0));
                }
            }
            1 => {
                out.push(true);
                stack.push((v, 2));
                if t.right(v) != NIL {
                    stack.push((t.right(v), 0));
                }
            }
            _ => out.push(false),
        }
    }
    out
}

/// Parses whitespace-separated signed 64-bit integers.
pub fn parse_array(text: &str) -> Result<Vec<i64>> {
    text.split_whitespace()
        .map(|w| w.parse::<i64>().map_err(|_| Error::Malformed(format!("not an integer: '{w}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG: [i64; 10] = [2, 3, 4, 1, 6, 5, 7, 9, 10, 8];

    #[test]
    fn cartesian_example() {
        let t = cartesian_tree(&FIG).unwrap();
        let inorder = t.inorder();
        assert_eq!(inorder.iter().position(|&v| v == t.root()).unwrap() + 1, 4);
        // worked by hand: left part 2<3<4 is a right chain, right part rooted at 5
        assert_eq!(inorder_bp(&t).to_paren_string(), "((()))(()(((())())))");
        assert_eq!(dyck_peaks(&inorder_bp(&t)).unwrap(), 4);
        assert_eq!(runs_profile(&FIG).unwrap().r, 4);
    }

    #[test]
    fn chains() {
        let inc: Vec<i32> = (0..6).collect();
        assert_eq!(cartesian_tree(&inc).unwrap(), BinaryTree::right_path(6));
        assert_eq!(cartesian_tree(&[7; 5]).unwrap(), BinaryTree::right_path(5));
        let dec: Vec<i32> = (0..6).rev().collect();
        assert_eq!(cartesian_tree(&dec).unwrap(), BinaryTree::left_path(6));
        assert!(cartesian_tree::<i32>(&[]).is_err());
    }

    #[test]
    fn queries() {
        let idx = rmq_build(&FIG).unwrap();
        assert_eq!(idx.query(1, 10).unwrap(), 4);
        assert_eq!(idx.query(5, 8).unwrap(), 6);
        for i in 1..=10 {
            assert_eq!(idx.query(i, i).unwrap(), i);
        }
        assert!(idx.query(3, 2).is_err());
        assert!(idx.query(0, 2).is_err());
        assert!(idx.query(1, 11).is_err());
    }

    #[test]
    fn runs() {
        let p = runs_profile(&[1, 2, 3, 4]).unwrap();
        assert_eq!((p.r, p.s), (1, 0));
        assert_eq!(p.narayana_bits, 0.0);
        let p = runs_profile(&[4, 3, 2, 1]).unwrap();
        assert_eq!((p.r, p.s), (4, 4));
        assert!((narayana_lg(4, 2) - 6f64.log2()).abs() < 1e-9);
        assert_eq!(runs_profile(&FIG).unwrap().s, 1);
    }

    #[test]
    fn peaks() {
        assert_eq!(dyck_peaks(&BitBuf::from_bit_str("1010").unwrap()).unwrap(), 2);
        assert_eq!(dyck_peaks(&BitBuf::from_bit_str("1100").unwrap()).unwrap(), 1);
        assert!(dyck_peaks(&BitBuf::from_bit_str("0110").unwrap()).is_err());
        assert!(dyck_peaks(&BitBuf::from_bit_str("110").unwrap()).is_err());
    }
}
