use std::fmt;

use crate::bits::BitBuf;
use crate::error::{malformed, Error, Result};
use crate::tree::binary::{BinaryTree, NIL};

/// Ordered forest in preorder form: node `v` owns the ids `v..v+size[v]`.
///
/// Children of `v` are `v+1`, then repeatedly the next id after the previous
/// child's subtree. Roots are `1`, `1+size[1]`, and so on.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Forest {
    size: Vec<usize>,
}

/// A forest with exactly one root (or none, for the empty tree).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OrdinalTree {
    forest: Forest,
}

impl Forest {
    pub fn empty() -> Self {
        Forest { size: vec![0] }
    }

    /// Checked constructor from preorder subtree sizes (index 0 ignored).
    pub fn from_sizes(mut size: Vec<usize>) -> Result<Self> {
        if size.is_empty() {
            size.push(0);
        }
        size[0] = 0;
        let n = size.len() - 1;
        // ends of currently open subtrees
        let mut ends: Vec<usize> = Vec::new();
        for v in 1..=n {
            while let Some(&e) = ends.last() {
                if e <= v {
                    ends.pop();
                } else {
                    break;
                }
            }
            let end = v + size[v];
            if size[v] == 0 || end > n + 1 || ends.last().is_some_and(|&e| end > e) {
                return Err(Error::InvalidArgument(format!("inconsistent subtree size at node {v}")));
            }
            ends.push(end);
        }
        Ok(Forest { size })
    }

    /// Builds from arbitrary child lists; `roots` in order. Returns the forest and new→old ids.
    pub fn from_children(roots: &[usize], children: &[Vec<usize>]) -> Result<(Self, Vec<usize>)> {
        let cap = children.len();
        let mut seen = vec![false; cap];
        let mut old_of = vec![NIL];
        let mut stack: Vec<usize> = roots.iter().rev().copied().collect();
        while let Some(v) = stack.pop() {
            if v == NIL || v >= cap || seen[v] {
                return Err(Error::InvalidArgument(format!("child lists do not form a forest at node {v}")));
            }
            seen[v] = true;
            old_of.push(v);
            stack.extend(children[v].iter().rev());
        }
        let n = old_of.len() - 1;
        let mut new_of = vec![NIL; cap];
        for (i, &o) in old_of.iter().enumerate().skip(1) {
            new_of[o] = i;
        }
        let mut size = vec![1usize; n + 1];
        size[0] = 0;
        for v in (1..=n).rev() {
            let s: usize = children[old_of[v]].iter().map(|&c| size[new_of[c]]).sum();
            size[v] += s;
        }
        Ok((Forest { size }, old_of))
    }

    pub fn len(&self) -> usize {
        self.size.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn subtree_size(&self, v: usize) -> usize {
        self.size[v]
    }

    pub fn sizes(&self) -> &[usize] {
        &self.size
    }

    pub fn roots(&self) -> Siblings<'_> {
        Siblings { size: &self.size, next: 1, end: self.len() + 1 }
    }

    #[inline]
    pub fn children(&self, v: usize) -> Siblings<'_> {
        Siblings { size: &self.size, next: v + 1, end: v + self.size[v] }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.children(v).count()
    }

    /// Parent of every node (`NIL` for roots).
    pub fn parents(&self) -> Vec<usize> {
        let mut p = vec![NIL; self.size.len()];
        for v in 1..=self.len() {
            for c in self.children(v) {
                p[c] = v;
            }
        }
        p
    }

    /// Explicit child lists, indexed by node.
    pub fn child_lists(&self) -> Vec<Vec<usize>> {
        (0..=self.len()).map(|v| if v == 0 { Vec::new() } else { self.children(v).collect() }).collect()
    }

    /// BP_o(f): concatenation over roots of "(" children ")".
    pub fn to_bp(&self) -> BitBuf {
        let n = self.len();
        let mut out = BitBuf::with_capacity(2 * n);
        let mut ends: Vec<usize> = Vec::new();
        for v in 1..=n {
            while let Some(&e) = ends.last() {
                if e <= v {
                    out.push(false);
                    ends.pop();
                } else {
                    break;
                }
            }
            out.push(true);
            ends.push(v + self.size[v]);
        }
        for _ in ends {
            out.push(false);
        }
        out
    }

    pub fn from_bp(bp: &BitBuf) -> Result<Self> {
        let n = bp.len() / 2;
        let mut size = Vec::with_capacity(n + 1);
        size.push(0);
        let mut open: Vec<usize> = Vec::new();
        for bit in bp.iter() {
            if bit {
                open.push(size.len());
                size.push(0);
            } else {
                let v = match open.pop() {
                    Some(v) => v,
                    None => return malformed("unbalanced BP string"),
                };
                size[v] = size.len() - v;
            }
        }
        if !open.is_empty() {
            return malformed("unbalanced BP string");
        }
        Ok(Forest { size })
    }

    pub fn from_bp_str(s: &str) -> Result<Self> {
        Self::from_bp(&BitBuf::from_bit_str(s.trim())?)
    }

    pub fn to_bp_string(&self) -> String {
        self.to_bp().to_paren_string()
    }

    /// First-child next-sibling binary tree; preorder ids are preserved.
    pub fn fcns(&self) -> BinaryTree {
        let n = self.len();
        let mut left = vec![NIL; n + 1];
        let mut right = vec![NIL; n + 1];
        let mut chain = |sibs: Siblings<'_>| {
            let mut prev = NIL;
            for c in sibs {
                if prev != NIL {
                    right[prev] = c;
                }
                prev = c;
            }
        };
        chain(self.roots());
        for v in 1..=n {
            chain(self.children(v));
        }
        for v in 1..=n {
            if self.size[v] > 1 {
                left[v] = v + 1;
            }
        }
        BinaryTree::from_raw(left, right)
    }

    pub fn fcns_inverse(t: &BinaryTree) -> Forest {
        let n = t.len();
        let sizes = t.subtree_sizes();
        let mut size = vec![0; n + 1];
        for v in 1..=n {
            size[v] = 1 + sizes[t.left(v)];
        }
        Forest { size }
    }

    pub fn into_tree(self) -> Result<OrdinalTree> {
        OrdinalTree::from_forest(self)
    }
}

/// Iterator over consecutive siblings.
#[derive(Clone)]
pub struct Siblings<'a> {
    size: &'a [usize],
    next: usize,
    end: usize,
}

impl Iterator for Siblings<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.next >= self.end {
            return None;
        }
        let c = self.next;
        self.next += self.size[c];
        Some(c)
    }
}

impl OrdinalTree {
    pub fn empty() -> Self {
        OrdinalTree { forest: Forest::empty() }
    }

    pub fn single() -> Self {
        OrdinalTree { forest: Forest { size: vec![0, 1] } }
    }

    pub fn from_forest(forest: Forest) -> Result<Self> {
        if forest.len() > 0 && forest.size[1] != forest.len() {
            return Err(Error::InvalidArgument("forest has more than one root".into()));
        }
        Ok(OrdinalTree { forest })
    }

    pub fn from_sizes(size: Vec<usize>) -> Result<Self> {
        Self::from_forest(Forest::from_sizes(size)?)
    }

    /// Builds from arbitrary child lists; returns the tree and new→old ids.
    pub fn from_children(root: usize, children: &[Vec<usize>]) -> Result<(Self, Vec<usize>)> {
        let (f, map) = Forest::from_children(&[root], children)?;
        Ok((OrdinalTree { forest: f }, map))
    }

    pub fn from_bp(bp: &BitBuf) -> Result<Self> {
        Self::from_forest(Forest::from_bp(bp)?)
    }

    pub fn from_bp_str(s: &str) -> Result<Self> {
        Self::from_forest(Forest::from_bp_str(s)?)
    }

    pub fn forest(&self) -> &Forest {
        &self.forest
    }

    pub fn into_forest(self) -> Forest {
        self.forest
    }

    pub fn root(&self) -> usize {
        if self.forest.is_empty() {
            NIL
        } else {
            1
        }
    }

    /// Star: root with `n-1` leaf children.
    pub fn star(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        let mut size = vec![1; n + 1];
        size[0] = 0;
        size[1] = n;
        OrdinalTree { forest: Forest { size } }
    }

    /// Unary path of `n` nodes.
    pub fn path(n: usize) -> Self {
        let size = (0..=n).map(|v| if v == 0 { 0 } else { n + 1 - v }).collect();
        OrdinalTree { forest: Forest { size } }
    }
}

impl std::ops::Deref for OrdinalTree {
    type Target = Forest;

    fn deref(&self) -> &Forest {
        &self.forest
    }
}

impl fmt::Debug for Forest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Forest({})", self.to_bp_string())
    }
}

impl fmt::Debug for OrdinalTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OrdinalTree({})", self.to_bp_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bp_examples() {
        assert_eq!(OrdinalTree::single().to_bp_string(), "()");
        assert_eq!(OrdinalTree::star(4).to_bp_string(), "(()()())");
        assert_eq!(Forest::empty().to_bp_string(), "");
        assert_eq!(OrdinalTree::path(3).to_bp_string(), "((()))");
    }

    #[test]
    fn bp_roundtrip_and_rejects() {
        for s in ["", "()", "(()())", "(()(()))", "()()(())"] {
            assert_eq!(Forest::from_bp_str(s).unwrap().to_bp_string(), s);
        }
        for s in ["(", "())", ")("] {
            assert!(Forest::from_bp_str(s).is_err());
        }
        assert!(OrdinalTree::from_bp_str("()()").is_err());
    }

    #[test]
    fn children_iteration() {
        let t = OrdinalTree::from_bp_str("((())()(()()))").unwrap();
        assert_eq!(t.children(1).collect::<Vec<_>>(), vec![2, 4, 5]);
        assert_eq!(t.children(5).collect::<Vec<_>>(), vec![6, 7]);
        assert_eq!(t.degree(2), 1);
        assert_eq!(t.parents(), vec![0, 0, 1, 2, 1, 1, 5, 5]);
    }

    #[test]
    fn from_sizes_checks() {
        assert!(Forest::from_sizes(vec![0, 3, 1, 1]).is_ok());
        assert!(Forest::from_sizes(vec![0, 3, 2, 1]).is_ok());
        assert!(Forest::from_sizes(vec![0, 2, 2, 1]).is_err());
        assert!(Forest::from_sizes(vec![0, 4, 1, 1]).is_err());
    }

    #[test]
    fn fcns_preserves_bp() {
        let f = Forest::from_bp_str("(()(()))()((()()))").unwrap();
        let b = f.fcns();
        assert_eq!(b.to_bp_string(), f.to_bp_string());
        assert_eq!(Forest::fcns_inverse(&b), f);
    }

    #[test]
    fn from_children_renumbers() {
        // 5 -> [2, 3], 3 -> [1]
        let ch = vec![vec![], vec![], vec![], vec![1], vec![], vec![2, 3]];
        let (t, old) = OrdinalTree::from_children(5, &ch).unwrap();
        assert_eq!(t.to_bp_string(), "(()(()))");
        assert_eq!(old, vec![0, 5, 2, 3, 1]);
    }
}
