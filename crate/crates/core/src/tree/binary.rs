use std::fmt;

use crate::bits::BitBuf;
use crate::error::{malformed, Error, Result};

/// Null sentinel for child links.
pub const NIL: usize = 0;

/// Pointerless binary tree; nodes are `1..=n` in preorder, `0` is the empty subtree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryTree {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl BinaryTree {
    pub fn empty() -> Self {
        BinaryTree { left: vec![NIL], right: vec![NIL] }
    }

    pub fn single() -> Self {
        BinaryTree { left: vec![NIL, NIL], right: vec![NIL, NIL] }
    }

    /// Builds a tree from arbitrary arena links, renumbering nodes to preorder.
    ///
    /// `left[v]`/`right[v]` use `NIL` for absent children; index 0 is ignored.
    /// Returns the tree and the map from new id to old id.
    pub fn from_links(root: usize, left: &[usize], right: &[usize]) -> Result<(Self, Vec<usize>)> {
        if left.len() != right.len() {
            return Err(Error::InvalidArgument("link arrays differ in length".into()));
        }
        if root == NIL {
            return Ok((BinaryTree::empty(), vec![NIL]));
        }
        let cap = left.len();
        let mut seen = vec![false; cap];
        let mut old_of = vec![NIL];
        let mut new_of = vec![NIL; cap];
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            if v >= cap || v == NIL || seen[v] {
                return Err(Error::InvalidArgument(format!("links do not form a tree at node {v}")));
            }
            seen[v] = true;
            new_of[v] = old_of.len();
            old_of.push(v);
            if right[v] != NIL {
                stack.push(right[v]);
            }
            if left[v] != NIL {
                stack.push(left[v]);
            }
        }
        let n = old_of.len() - 1;
        let mut t = BinaryTree { left: vec![NIL; n + 1], right: vec![NIL; n + 1] };
        for v in 1..=n {
            let o = old_of[v];
            t.left[v] = if left[o] == NIL { NIL } else { new_of[left[o]] };
            t.right[v] = if right[o] == NIL { NIL } else { new_of[right[o]] };
        }
        Ok((t, old_of))
    }

    /// Checked constructor from preorder-numbered links.
    pub fn from_preorder_links(left: Vec<usize>, right: Vec<usize>) -> Result<Self> {
        let (t, map) = Self::from_links(if left.len() > 1 { 1 } else { NIL }, &left, &right)?;
        if t.len() + 1 != left.len() || map.iter().enumerate().any(|(i, &o)| i != o) {
            return Err(Error::InvalidArgument("links are not a preorder-numbered tree".into()));
        }
        Ok(t)
    }

    pub(crate) fn from_raw(left: Vec<usize>, right: Vec<usize>) -> Self {
        BinaryTree { left, right }
    }

    pub fn len(&self) -> usize {
        self.left.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn root(&self) -> usize {
        if self.is_empty() {
            NIL
        } else {
            1
        }
    }

    #[inline]
    pub fn left(&self, v: usize) -> usize {
        self.left[v]
    }

    #[inline]
    pub fn right(&self, v: usize) -> usize {
        self.right[v]
    }

    pub fn left_links(&self) -> &[usize] {
        &self.left
    }

    pub fn right_links(&self) -> &[usize] {
        &self.right
    }

    /// Parent of every node (`NIL` for the root).
    pub fn parents(&self) -> Vec<usize> {
        let mut p = vec![NIL; self.left.len()];
        for v in 1..=self.len() {
            if self.left[v] != NIL {
                p[self.left[v]] = v;
            }
            if self.right[v] != NIL {
                p[self.right[v]] = v;
            }
        }
        p
    }

    /// Subtree sizes; index 0 holds 0.
    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.left.len()];
        for v in (1..=self.len()).rev() {
            s[v] = 1 + s[self.left[v]] + s[self.right[v]];
        }
        s
    }

    /// Nodes in inorder.
    pub fn inorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut v = self.root();
        loop {
            while v != NIL {
                stack.push(v);
                v = self.left[v];
            }
            match stack.pop() {
                Some(u) => {
                    out.push(u);
                    v = self.right[u];
                }
                None => break,
            }
        }
        out
    }

    /// BP(t) = "(" BP(left) ")" BP(right).
    pub fn to_bp(&self) -> BitBuf {
        let mut out = BitBuf::with_capacity(2 * self.len());
        // a value v > 0 means "open v"; v < 0 means "close -v then its right subtree"
        let mut stack: Vec<isize> = Vec::new();
        if !self.is_empty() {
            stack.push(1);
        }
        while let Some(x) = stack.pop() {
            if x > 0 {
                let v = x as usize;
                out.push(true);
                stack.push(-x);
                if self.left[v] != NIL {
                    stack.push(self.left[v] as isize);
                }
            } else {
                let v = (-x) as usize;
                out.push(false);
                if self.right[v] != NIL {
                    stack.push(self.right[v] as isize);
                }
            }
        }
        out
    }

    pub fn from_bp(bp: &BitBuf) -> Result<Self> {
        Self::from_bp_bits(bp.iter(), bp.len())
    }

    pub fn from_bp_str(s: &str) -> Result<Self> {
        let bp = BitBuf::from_bit_str(s.trim())?;
        Self::from_bp(&bp)
    }

    pub fn to_bp_string(&self) -> String {
        self.to_bp().to_paren_string()
    }

    pub(crate) fn from_bp_bits(bits: impl Iterator<Item = bool>, hint: usize) -> Result<Self> {
        let n = hint / 2;
        let mut left = Vec::with_capacity(n + 1);
        let mut right = Vec::with_capacity(n + 1);
        left.push(NIL);
        right.push(NIL);
        let mut open: Vec<usize> = Vec::new();
        // where the next node attaches: (parent, is_left); parent NIL = root
        let mut attach = (NIL, true);
        for bit in bits {
            if bit {
                let v = left.len();
                left.push(NIL);
                right.push(NIL);
                let (p, is_left) = attach;
                if p != NIL {
                    if is_left {
                        left[p] = v;
                    } else {
                        right[p] = v;
                    }
                } else if v != 1 {
                    return malformed("BP string encodes more than one tree");
                }
                open.push(v);
                attach = (v, true);
            } else {
                match open.pop() {
                    Some(v) => attach = (v, false),
                    None => return malformed("unbalanced BP string"),
                }
            }
        }
        if !open.is_empty() {
            return malformed("unbalanced BP string");
        }
        Ok(BinaryTree { left, right })
    }

    /// Left chain (every node a left child) of `n` nodes.
    pub fn left_path(n: usize) -> Self {
        let mut left = vec![NIL; n + 1];
        for v in 1..n {
            left[v] = v + 1;
        }
        BinaryTree { left, right: vec![NIL; n + 1] }
    }

    /// Right chain of `n` nodes.
    pub fn right_path(n: usize) -> Self {
        let mut right = vec![NIL; n + 1];
        for v in 1..n {
            right[v] = v + 1;
        }
        BinaryTree { left: vec![NIL; n + 1], right }
    }

    /// Complete binary tree with `n` nodes (heap-shaped, last level filled left to right).
    pub fn complete(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        let mut left = vec![NIL; n + 1];
        let mut right = vec![NIL; n + 1];
        for v in 1..=n {
            if 2 * v <= n {
                left[v] = 2 * v;
            }
            if 2 * v < n {
                right[v] = 2 * v + 1;
            }
        }
        Self::from_links(1, &left, &right).expect("heap links form a tree").0
    }
}

impl fmt::Debug for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BinaryTree({})", self.to_bp_string())
    }
}
