use crate::tree::{BinaryTree, NIL};

/// One micro tree of a binary cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryMicro {
    pub shape: BinaryTree,
    /// Local preorder id → global preorder id; slot 0 is `NIL`.
    pub local_to_global: Vec<usize>,
    /// Null-pointer rank (in local inorder of nulls) of the left child micro tree.
    pub left_portal: Option<usize>,
    pub right_portal: Option<usize>,
}

impl BinaryMicro {
    pub fn root(&self) -> usize {
        self.local_to_global[1]
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape.is_empty()
    }
}

/// Partition of a binary tree into micro trees, in preorder of their roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryCover {
    pub block: usize,
    pub micro: Vec<BinaryMicro>,
    /// Contracted tree; node `i+1` is `micro[i]`.
    pub top_tier: BinaryTree,
}

/// Null ranks of a shape: `(left_null[x], right_null[x])` for every local node,
/// `None` where the child exists.
pub fn null_ranks(shape: &BinaryTree) -> Vec<(Option<usize>, Option<usize>)> {
    let mut out = vec![(None, None); shape.len() + 1];
    for (k, v) in shape.inorder().into_iter().enumerate() {
        out[v] = (
            (shape.left(v) == NIL).then_some(k),
            (shape.right(v) == NIL).then_some(k + 1),
        );
    }
    out
}

/// Micro-tree roots chosen by greedy bottom-up packing.
fn micro_roots(t: &BinaryTree, size: &[usize], block: usize) -> Vec<bool> {
    let n = t.len();
    let mut is_root = vec![false; n + 1];
    is_root[1] = true;
    if n <= 2 * block {
        return is_root;
    }
    // act[v] = size of the still-open component rooted at v, 0 when closed
    let mut act = vec![0usize; n + 1];
    let heavy = |u: usize| u != NIL && size[u] >= block;
    for v in (1..=n).rev() {
        let (l, r) = (t.left(v), t.right(v));
        let c = match (heavy(l), heavy(r)) {
            (true, true) => {
                for u in [l, r] {
                    if act[u] > 0 {
                        is_root[u] = true;
                    }
                }
                is_root[v] = true;
                continue;
            }
            (true, false) => 1 + act[l] + size[r],
            (false, true) => 1 + act[r] + size[l],
            (false, false) => 1 + size[l] + size[r],
        };
        if c >= block {
            is_root[v] = true;
        } else {
            act[v] = c;
        }
    }
    is_root
}

/// Greedy Farzan–Munro style decomposition with block parameter `block`.
pub fn decompose_binary(t: &BinaryTree, block: usize) -> BinaryCover {
    let n = t.len();
    assert!(n >= 1, "cannot cover an empty tree");
    let block = block.max(1);
    let size = t.subtree_sizes();
    let is_root = micro_roots(t, &size, block);

    // micro index of every node; roots appear in preorder
    let mut owner = vec![usize::MAX; n + 1];
    let mut root_list = Vec::new();
    for v in 1..=n {
        if is_root[v] {
            owner[v] = root_list.len();
            root_list.push(v);
        }
        for c in [t.left(v), t.right(v)] {
            if c != NIL && !is_root[c] {
                owner[c] = owner[v];
            }
        }
    }
    let m = root_list.len();

    // local numbering: preorder within each micro tree equals global preorder restricted
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut local = vec![0usize; n + 1];
    for v in 1..=n {
        let mi = owner[v];
        members[mi].push(v);
        local[v] = members[mi].len();
    }

    let mut top_left = vec![NIL; m + 1];
    let mut top_right = vec![NIL; m + 1];
    let mut micro = Vec::with_capacity(m);
    for (mi, mem) in members.into_iter().enumerate() {
        let k = mem.len();
        let mut left = vec![NIL; k + 1];
        let mut right = vec![NIL; k + 1];
        for (i, &g) in mem.iter().enumerate() {
            let (l, r) = (t.left(g), t.right(g));
            if l != NIL && owner[l] == mi {
                left[i + 1] = local[l];
            }
            if r != NIL && owner[r] == mi {
                right[i + 1] = local[r];
            }
        }
        let shape = BinaryTree::from_raw(left, right);
        let nulls = null_ranks(&shape);
        let root_left_size = {
            let l = shape.left(1);
            if l == NIL {
                0
            } else {
                shape.subtree_sizes()[l]
            }
        };
        let (mut lp, mut rp) = (None, None);
        for (i, &g) in mem.iter().enumerate() {
            for (c, rank) in [(t.left(g), nulls[i + 1].0), (t.right(g), nulls[i + 1].1)] {
                if c == NIL || owner[c] == mi {
                    continue;
                }
                let rank = rank.expect("cross edge leaves through a null");
                let child = owner[c] + 1;
                if rank <= root_left_size {
                    lp = Some(rank);
                    top_left[mi + 1] = child;
                } else {
                    rp = Some(rank);
                    top_right[mi + 1] = child;
                }
            }
        }
        let mut local_to_global = Vec::with_capacity(k + 1);
        local_to_global.push(NIL);
        local_to_global.extend_from_slice(&mem);
        micro.push(BinaryMicro { shape, local_to_global, left_portal: lp, right_portal: rp });
    }
    BinaryCover { block, micro, top_tier: BinaryTree::from_raw(top_left, top_right) }
}

/// max(1, ⌈lg n / 8⌉).
pub fn default_block(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let lg = (n as f64).log2();
    ((lg / 8.0).ceil() as usize).max(1)
}
