use crate::tree::binary::{BinaryTree, NIL};
use crate::tree::ordinal::Forest;

/// Node type of a binary tree node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum NodeType {
    Leaf = 0,
    LeftUnary = 1,
    Binary = 2,
    RightUnary = 3,
}

impl NodeType {
    #[inline]
    pub fn of(has_left: bool, has_right: bool) -> NodeType {
        match (has_left, has_right) {
            (false, false) => NodeType::Leaf,
            (true, false) => NodeType::LeftUnary,
            (true, true) => NodeType::Binary,
            (false, true) => NodeType::RightUnary,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Per-node annotations; vectors are indexed by preorder id (slot 0 unused).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeAnnotation {
    pub subtree_size: Vec<usize>,
    pub height: Vec<usize>,
    pub depth: Vec<usize>,
    pub node_type: Option<Vec<NodeType>>,
    pub degree: Option<Vec<usize>>,
    pub inorder_rank: Option<Vec<usize>>,
}

pub fn annotate_binary(t: &BinaryTree) -> TreeAnnotation {
    let n = t.len();
    let mut size = vec![0; n + 1];
    let mut height = vec![0; n + 1];
    for v in (1..=n).rev() {
        let (l, r) = (t.left(v), t.right(v));
        size[v] = 1 + size[l] + size[r];
        height[v] = 1 + height[l].max(height[r]);
    }
    let mut depth = vec![0; n + 1];
    let mut inorder = vec![0; n + 1];
    let mut ty = vec![NodeType::Leaf; n + 1];
    // base[v]: inorder ranks consumed before v's subtree starts
    let mut base = vec![0; n + 1];
    for v in 1..=n {
        let (l, r) = (t.left(v), t.right(v));
        inorder[v] = base[v] + size[l] + 1;
        ty[v] = NodeType::of(l != NIL, r != NIL);
        if l != NIL {
            depth[l] = depth[v] + 1;
            base[l] = base[v];
        }
        if r != NIL {
            depth[r] = depth[v] + 1;
            base[r] = inorder[v];
        }
    }
    TreeAnnotation {
        subtree_size: size,
        height,
        depth,
        node_type: Some(ty),
        degree: None,
        inorder_rank: Some(inorder),
    }
}

pub fn annotate_ordinal(f: &Forest) -> TreeAnnotation {
    let n = f.len();
    let mut height = vec![0; n + 1];
    let mut degree = vec![0; n + 1];
    let mut depth = vec![0; n + 1];
    for v in 1..=n {
        for c in f.children(v) {
            depth[c] = depth[v] + 1;
            degree[v] += 1;
        }
    }
    for v in (1..=n).rev() {
        height[v] = 1 + f.children(v).map(|c| height[c]).max().unwrap_or(0);
    }
    TreeAnnotation {
        subtree_size: f.sizes().to_vec(),
        height,
        depth,
        node_type: None,
        degree: Some(degree),
        inorder_rank: None,
    }
}
