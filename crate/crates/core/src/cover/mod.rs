//! Micro-tree decomposition of binary and ordinal trees.

mod binary;
mod ordinal;

use std::fmt;

pub use binary::{decompose_binary, default_block, null_ranks, BinaryCover, BinaryMicro};
pub use ordinal::{decompose_ordinal, EdgeType, OrdinalCover, OrdinalMicro};

use crate::tree::{BinaryTree, OrdinalTree, NIL};

/// Summary of a valid cover.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverStats {
    pub m: usize,
    /// Nodes `v` with `|t[v]| >= B`.
    pub heavy_count: usize,
    /// Maximal light fringe subtrees.
    pub max_light_trees: usize,
}

/// A broken structural guarantee.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Oversized { micro: usize, size: usize, limit: usize },
    EmptyMicro { micro: usize },
    Uncovered { node: usize },
    Overlap { node: usize },
    SharedNonRoot { node: usize },
    LightRoot { micro: usize, root: usize, size: usize },
    ShapeMismatch { micro: usize, local: usize },
    PortalMismatch { micro: usize },
    TooManyExternal { micro: usize },
    BothPortalsInternal { micro: usize },
    TopTierMismatch { micro: usize },
    EdgeTypeMismatch { micro: usize },
    SharedFlagMismatch { micro: usize },
    NotInterval { micro: usize },
    OrderMismatch { micro: usize },
    TooManyMicros { m: usize, cap: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

fn stats(sizes: impl Fn(usize) -> usize, n: usize, parent: &[usize], block: usize, m: usize) -> CoverStats {
    let heavy_count = (1..=n).filter(|&v| sizes(v) >= block).count();
    let max_light_trees = (1..=n)
        .filter(|&v| sizes(v) < block && (parent[v] == NIL || sizes(parent[v]) >= block))
        .count();
    CoverStats { m, heavy_count, max_light_trees }
}

fn micro_cap(n: usize, block: usize) -> usize {
    (8 * n).div_ceil(block).max(1)
}

pub fn validate_binary_cover(t: &BinaryTree, cover: &BinaryCover) -> Result<CoverStats, Vec<Violation>> {
    let n = t.len();
    let b = cover.block.max(1);
    let m = cover.micro.len();
    let size = t.subtree_sizes();
    let parent = t.parents();
    let mut v = Vec::new();
    let mut owner = vec![usize::MAX; n + 1];
    for (i, mt) in cover.micro.iter().enumerate() {
        let k = mt.len();
        if k == 0 || mt.local_to_global.len() != k + 1 {
            v.push(Violation::EmptyMicro { micro: i });
            continue;
        }
        if k > 2 * b {
            v.push(Violation::Oversized { micro: i, size: k, limit: 2 * b });
        }
        for &g in &mt.local_to_global[1..] {
            if g == NIL || g > n {
                v.push(Violation::ShapeMismatch { micro: i, local: 0 });
            } else if owner[g] != usize::MAX {
                v.push(Violation::Overlap { node: g });
            } else {
                owner[g] = i;
            }
        }
    }
    for g in 1..=n {
        if owner[g] == usize::MAX {
            v.push(Violation::Uncovered { node: g });
        }
    }
    if !v.is_empty() {
        return Err(v);
    }
    if cover.top_tier.len() != m {
        v.push(Violation::TopTierMismatch { micro: 0 });
        return Err(v);
    }
    for (i, mt) in cover.micro.iter().enumerate() {
        let r = mt.root();
        if i > 0 && cover.micro[i - 1].root() >= r {
            v.push(Violation::OrderMismatch { micro: i });
        }
        if size[r] < b && !(r == t.root() && n < b) {
            v.push(Violation::LightRoot { micro: i, root: r, size: size[r] });
        }
        if parent[r] != NIL && owner[parent[r]] == i {
            v.push(Violation::ShapeMismatch { micro: i, local: 1 });
        }
        let nulls = null_ranks(&mt.shape);
        let root_left = {
            let l = mt.shape.left(1);
            if l == NIL {
                0
            } else {
                mt.shape.subtree_sizes()[l]
            }
        };
        let ltg = &mt.local_to_global;
        let (mut seen_l, mut seen_r, mut cross, mut internal) = (None, None, 0, 0);
        for x in 1..=mt.len() {
            let g = ltg[x];
            let sides = [
                (mt.shape.left(x), t.left(g), nulls[x].0),
                (mt.shape.right(x), t.right(g), nulls[x].1),
            ];
            for (lc, gc, null) in sides {
                if lc != NIL {
                    if ltg[lc] != gc {
                        v.push(Violation::ShapeMismatch { micro: i, local: x });
                    }
                    continue;
                }
                if gc == NIL {
                    continue;
                }
                let j = owner[gc];
                if j == i || cover.micro[j].root() != gc {
                    v.push(Violation::ShapeMismatch { micro: i, local: x });
                    continue;
                }
                cross += 1;
                if x != 1 {
                    internal += 1;
                }
                let rank = null.expect("absent child has a null rank");
                if rank <= root_left {
                    seen_l = Some((rank, j + 1));
                } else {
                    seen_r = Some((rank, j + 1));
                }
            }
        }
        if internal > 1 {
            v.push(Violation::TooManyExternal { micro: i });
        }
        if cross == 2 && internal == 2 {
            v.push(Violation::BothPortalsInternal { micro: i });
        }
        let node = i + 1;
        let expect_top = |s: Option<(usize, usize)>| s.map_or(NIL, |(_, c)| c);
        if mt.left_portal != seen_l.map(|s| s.0) || mt.right_portal != seen_r.map(|s| s.0) {
            v.push(Violation::PortalMismatch { micro: i });
        }
        if cover.top_tier.left(node) != expect_top(seen_l) || cover.top_tier.right(node) != expect_top(seen_r) {
            v.push(Violation::TopTierMismatch { micro: i });
        }
    }
    let cap = micro_cap(n, b);
    if m > cap {
        v.push(Violation::TooManyMicros { m, cap });
    }
    if v.is_empty() {
        Ok(stats(|x| size[x], n, &parent, b, m))
    } else {
        Err(v)
    }
}

pub fn validate_ordinal_cover(t: &OrdinalTree, cover: &OrdinalCover) -> Result<CoverStats, Vec<Violation>> {
    let n = t.len();
    let b = cover.block.max(1);
    let m = cover.micro.len();
    let parent = t.parents();
    // children lists in one flat array, plus each node's rank among its siblings
    let mut rank = vec![0usize; n + 1];
    let mut off = vec![0usize; n + 2];
    let mut flat = Vec::with_capacity(n);
    for g in 1..=n {
        off[g] = flat.len();
        for (k, c) in t.children(g).enumerate() {
            rank[c] = k;
            flat.push(c);
        }
    }
    off[n + 1] = flat.len();
    let kids = |g: usize| &flat[off[g]..off[g + 1]];
    let mut v = Vec::new();
    // owner of non-root nodes; roots tracked separately
    let mut owner = vec![usize::MAX; n + 1];
    let mut roots_at = vec![0usize; n + 1];
    for (i, mt) in cover.micro.iter().enumerate() {
        let k = mt.len();
        if k == 0 || mt.local_to_global.len() != k + 1 {
            v.push(Violation::EmptyMicro { micro: i });
            continue;
        }
        if k > 2 * b {
            v.push(Violation::Oversized { micro: i, size: k, limit: 2 * b });
        }
        roots_at[mt.root()] += 1;
        for &g in &mt.local_to_global[2..] {
            if g == NIL || g > n {
                v.push(Violation::ShapeMismatch { micro: i, local: 0 });
            } else if owner[g] != usize::MAX {
                v.push(Violation::Overlap { node: g });
            } else {
                owner[g] = i;
            }
        }
    }
    for g in 1..=n {
        match (owner[g] != usize::MAX, roots_at[g] > 0) {
            (false, false) => v.push(Violation::Uncovered { node: g }),
            (true, true) => v.push(Violation::SharedNonRoot { node: g }),
            _ => {}
        }
    }
    if !v.is_empty() {
        return Err(v);
    }
    let top = &cover.top_tier;
    if top.len() != m + 1 {
        v.push(Violation::TopTierMismatch { micro: 0 });
        return Err(v);
    }
    let top_parent = top.parents();
    let mut ext_target = vec![NIL; m];
    for (i, mt) in cover.micro.iter().enumerate() {
        let r = mt.root();
        if t.subtree_size(r) < b && !(r == 1 && n < b) {
            v.push(Violation::LightRoot { micro: i, root: r, size: t.subtree_size(r) });
        }
        if mt.shared_root != (roots_at[r] > 1) {
            v.push(Violation::SharedFlagMismatch { micro: i });
        }
        let ltg = &mt.local_to_global;
        let mut externals = Vec::new();
        // non-root nodes: local children = global children minus at most one
        for x in 2..=mt.len() {
            let g = ltg[x];
            let local: Vec<usize> = mt.shape.children(x).map(|c| ltg[c]).collect();
            let mut li = 0;
            for gc in t.children(g) {
                if li < local.len() && local[li] == gc {
                    li += 1;
                } else if roots_at[gc] > 0 {
                    externals.push(((x, li), gc));
                } else {
                    v.push(Violation::ShapeMismatch { micro: i, local: x });
                }
            }
            if li != local.len() {
                v.push(Violation::ShapeMismatch { micro: i, local: x });
            }
        }
        // root: local children form one interval of global children, up to one gap
        let local: Vec<usize> = mt.shape.children(1).map(|c| ltg[c]).collect();
        if !local.is_empty() {
            let gch = kids(r);
            match (parent[local[0]] == r).then(|| rank[local[0]]) {
                None => v.push(Violation::ShapeMismatch { micro: i, local: 1 }),
                Some(start) => {
                    let mut li = 0;
                    let mut gi = start;
                    while li < local.len() && gi < gch.len() {
                        if gch[gi] == local[li] {
                            li += 1;
                        } else if roots_at[gch[gi]] > 0 {
                            externals.push(((1, li), gch[gi]));
                        } else {
                            v.push(Violation::NotInterval { micro: i });
                        }
                        gi += 1;
                    }
                    if li != local.len() {
                        v.push(Violation::ShapeMismatch { micro: i, local: 1 });
                    }
                }
            }
        }
        if externals.len() > 1 {
            v.push(Violation::TooManyExternal { micro: i });
        }
        let ext = externals.first().copied();
        if mt.ext_portal != ext.map(|e| e.0) {
            v.push(Violation::PortalMismatch { micro: i });
        }
        ext_target[i] = ext.map_or(NIL, |e| e.1);
    }
    // top-tier edges and their types
    let mut prev_sib = vec![NIL; m + 2];
    for u in 1..=m + 1 {
        let mut last = NIL;
        for c in top.children(u) {
            prev_sib[c] = last;
            last = c;
        }
    }
    for (i, mt) in cover.micro.iter().enumerate() {
        let node = i + 2;
        let p = top_parent[node];
        let prev = (prev_sib[node] != NIL).then_some(prev_sib[node]);
        let r = mt.root();
        let prev_same_root = prev.is_some_and(|q| cover.micro[q - 2].root() == r);
        let prev_type = prev.map(|q| cover.micro[q - 2].edge_type);
        let ok = if p == 1 {
            r == 1 && (mt.edge_type == EdgeType::NewLeftmost) == prev.is_none()
                && matches!(mt.edge_type, EdgeType::NewLeftmost | EdgeType::ContinuedLeftmost)
        } else if p == NIL {
            false
        } else {
            let pm = &cover.micro[p - 2];
            let pr = pm.root();
            match mt.edge_type {
                EdgeType::External => r == ext_target[p - 2],
                ty => {
                    let continued = ty.is_continued();
                    let same_group = prev_type.is_some_and(|pt| {
                        (pt.is_leftmost() && ty.is_leftmost()) || (pt.is_rightmost() && ty.is_rightmost())
                    });
                    let side_ok = parent[r] == pr && {
                        let pos = rank[r];
                        let cpos: Vec<usize> = pm
                            .shape
                            .children(1)
                            .map(|c| pm.local_to_global[c])
                            .filter(|&c| parent[c] == pr)
                            .map(|c| rank[c])
                            .collect();
                        if ty.is_leftmost() {
                            cpos.iter().all(|&c| c > pos)
                        } else {
                            cpos.iter().all(|&c| c < pos)
                        }
                    };
                    if continued {
                        prev_same_root && same_group
                    } else {
                        side_ok && !(prev_same_root && same_group)
                    }
                }
            }
        };
        if !ok {
            v.push(Violation::EdgeTypeMismatch { micro: i });
        }
    }
    let cap = micro_cap(n, b);
    if m > cap {
        v.push(Violation::TooManyMicros { m, cap });
    }
    if v.is_empty() {
        Ok(stats(|x| t.subtree_size(x), n, &parent, b, m))
    } else {
        Err(v)
    }
}
