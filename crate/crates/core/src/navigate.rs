//! Queries over an encoded binary tree: LCA, inorder rank/select, parent and
//! subtree size, answered from the parsed blob without assembling the tree.
//!
//! Nodes are named by global preorder id (1-based); inorder ranks are 1-based.

use crate::error::{Error, Result};
use crate::hypercodec::{parse_binary, HsBlob, TreeKind};
use crate::tree::{BinaryTree, NIL};

/// LCA over a tree whose ids are preorder: for `u < v`, `lca(u, v)` is the
/// parent of the shallowest node in `(u, v]`.
#[derive(Clone, Debug)]
pub struct PreorderLca {
    depth: Vec<u32>,
    parent: Vec<u32>,
    /// `levels[j][i]`: shallowest id in `[i, i + 2^j)`.
    levels: Vec<Vec<u32>>,
}

impl PreorderLca {
    /// `parent[v]` for preorder ids `1..=n`, `parent[1] = 0`.
    pub fn new(parent: &[usize]) -> Self {
        let n = parent.len().saturating_sub(1);
        let mut depth = vec![0u32; n + 1];
        for v in 2..=n {
            depth[v] = depth[parent[v]] + 1;
        }
        let mut levels = vec![(0..=n as u32).collect::<Vec<u32>>()];
        let mut span = 1;
        while 2 * span <= n {
            let prev = levels.last().unwrap();
            let next: Vec<u32> = (0..=n - 2 * span + 1)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + span]);
                    if depth[b as usize] < depth[a as usize] {
                        b
                    } else {
                        a
                    }
                })
                .collect();
            levels.push(next);
            span *= 2;
        }
        PreorderLca { depth, parent: parent.iter().map(|&p| p as u32).collect(), levels }
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        if u == v {
            return u;
        }
        let (a, b) = (u.min(v) + 1, u.max(v));
        let j = (usize::BITS - 1 - (b - a + 1).leading_zeros()) as usize;
        let (x, y) = (self.levels[j][a], self.levels[j][b + 1 - (1 << j)]);
        let w = if self.depth[y as usize] < self.depth[x as usize] { y } else { x };
        self.parent[w as usize] as usize
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }
}

/// Shapes up to this size keep a full pairwise LCA table.
const FULL_TABLE_MAX: usize = 64;

#[derive(Clone, Debug)]
enum LocalLca {
    Table(Vec<u16>),
    Sparse(PreorderLca),
}

/// Lookup tables of one micro-tree shape, indexed by local preorder id.
#[derive(Clone, Debug)]
pub struct ShapeTable {
    k: usize,
    parent: Vec<u32>,
    size: Vec<u32>,
    /// Inorder position (0-based) → local id.
    inorder: Vec<u32>,
    /// Local id → inorder position.
    in_pos: Vec<u32>,
    /// `(left null rank, right null rank)` per local id.
    nulls: Vec<(Option<u32>, Option<u32>)>,
    lca: LocalLca,
}

impl ShapeTable {
    pub fn new(shape: &BinaryTree) -> Self {
        let k = shape.len();
        let parent = shape.parents();
        let size = shape.subtree_sizes();
        let inorder = shape.inorder();
        let mut in_pos = vec![0u32; k + 1];
        for (i, &v) in inorder.iter().enumerate() {
            in_pos[v] = i as u32;
        }
        let nulls = crate::cover::null_ranks(shape)
            .into_iter()
            .map(|(l, r)| (l.map(|q| q as u32), r.map(|q| q as u32)))
            .collect();
        let sparse = PreorderLca::new(&parent);
        let lca = if k <= FULL_TABLE_MAX {
            let mut table = vec![0u16; k * k];
            for u in 1..=k {
                for v in 1..=k {
                    table[(u - 1) * k + (v - 1)] = sparse.lca(u, v) as u16;
                }
            }
            LocalLca::Table(table)
        } else {
            LocalLca::Sparse(sparse)
        };
        ShapeTable {
            k,
            parent: parent.iter().map(|&p| p as u32).collect(),
            size: size.iter().map(|&s| s as u32).collect(),
            inorder: inorder.iter().map(|&v| v as u32).collect(),
            in_pos,
            nulls,
            lca,
        }
    }

    pub fn len(&self) -> usize {
        self.k
    }

    pub fn is_empty(&self) -> bool {
        self.k == 0
    }

    pub fn lca(&self, u: usize, v: usize) -> usize {
        match &self.lca {
            LocalLca::Table(t) => t[(u - 1) * self.k + (v - 1)] as usize,
            LocalLca::Sparse(s) => s.lca(u, v),
        }
    }

    pub fn parent(&self, x: usize) -> usize {
        self.parent[x] as usize
    }

    pub fn subtree_size(&self, x: usize) -> usize {
        self.size[x] as usize
    }

    /// Local id at 0-based inorder position `i`.
    pub fn inorder_at(&self, i: usize) -> usize {
        self.inorder[i] as usize
    }

    pub fn inorder_pos(&self, x: usize) -> usize {
        self.in_pos[x] as usize
    }

    pub fn null_ranks(&self, x: usize) -> (Option<usize>, Option<usize>) {
        let (l, r) = self.nulls[x];
        (l.map(|q| q as usize), r.map(|q| q as usize))
    }
}

/// A child micro tree hanging off a null pointer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Portal {
    /// Local node owning the null pointer.
    owner: u32,
    /// Local nodes preceding the child subtree in preorder.
    pre_before: u32,
    /// Null rank: local nodes preceding it in inorder.
    null_rank: u32,
    /// Global size of the hanging subtree.
    hang: usize,
}

#[derive(Clone, Debug)]
struct MicroInfo {
    shape: u32,
    pre_root: usize,
    in_start: usize,
    /// Left then right top-tier child.
    portals: [Option<Portal>; 2],
}

/// Sorted run starts partitioning `[1, n]`, each mapped to (micro, first local position).
#[derive(Clone, Debug, Default)]
struct Intervals {
    start: Vec<usize>,
    micro: Vec<u32>,
    first: Vec<u32>,
    /// `dir[j]`: interval containing position `j * DIR_STEP + 1`.
    dir: Vec<u32>,
}

const DIR_STEP: usize = 64;

impl Intervals {
    fn build(mut runs: Vec<(usize, u32, u32)>, n: usize) -> Self {
        runs.sort_unstable_by_key(|r| r.0);
        let start: Vec<usize> = runs.iter().map(|r| r.0).collect();
        let mut dir = Vec::with_capacity(n / DIR_STEP + 2);
        let mut i = 0;
        let mut pos = 1;
        while pos <= n {
            while i + 1 < start.len() && start[i + 1] <= pos {
                i += 1;
            }
            dir.push(i as u32);
            pos += DIR_STEP;
        }
        dir.push(start.len().saturating_sub(1) as u32);
        Intervals {
            start,
            micro: runs.iter().map(|r| r.1).collect(),
            first: runs.iter().map(|r| r.2).collect(),
            dir,
        }
    }

    fn len(&self) -> usize {
        self.start.len()
    }

    /// `(micro, local position)` of global position `pos`.
    fn locate(&self, pos: usize) -> (usize, usize) {
        let j = (pos - 1) / DIR_STEP;
        let lo = self.dir[j] as usize;
        let hi = self.dir[(j + 1).min(self.dir.len() - 1)] as usize;
        let i = lo + self.start[lo..=hi].partition_point(|&s| s <= pos) - 1;
        (self.micro[i] as usize, self.first[i] as usize + (pos - self.start[i]))
    }
}

/// Navigation index over a binary blob.
#[derive(Clone, Debug)]
pub struct NavIndex {
    n: usize,
    shapes: Vec<ShapeTable>,
    micros: Vec<MicroInfo>,
    /// Top-tier structure; micro `i` is top node `i + 1`.
    top_left: Vec<u32>,
    top_right: Vec<u32>,
    top_parent: Vec<u32>,
    top_size: Vec<u32>,
    top_lca: PreorderLca,
    pre_runs: Intervals,
    in_runs: Intervals,
}

/// Builds the navigation index of a binary blob.
pub fn build_nav(blob: &HsBlob) -> Result<NavIndex> {
    if blob.kind != TreeKind::Binary {
        return Err(Error::KindMismatch { expected: "binary" });
    }
    let p = parse_binary(&blob.bits)?;
    crate::hypercodec::check_padding(&blob.bits, p.end)?;
    let n = p.n;
    let m = p.m();
    let shapes: Vec<ShapeTable> = p.shapes.iter().map(|s| ShapeTable::new(&s.tree)).collect();

    let top = &p.top_tier;
    let top_parent = top.parents();
    let top_size = top.subtree_sizes();
    let mut gsize = vec![0usize; m + 1];
    for i in (1..=m).rev() {
        gsize[i] = shapes[p.micro_shape[i - 1]].len() + gsize[top.left(i)] + gsize[top.right(i)];
    }
    if gsize[1] != n {
        return Err(Error::Malformed("micro-tree sizes do not add up to n".into()));
    }

    let mut micros: Vec<MicroInfo> = Vec::with_capacity(m);
    for i in 0..m {
        let sh = &p.shapes[p.micro_shape[i]];
        let table = &shapes[p.micro_shape[i]];
        let mk = |q: Option<usize>, child: usize| {
            q.map(|q| {
                let (owner, is_left) = sh.null_owner[q];
                let pre_before = if is_left { owner } else { owner + table.subtree_size(owner) - 1 };
                Portal { owner: owner as u32, pre_before: pre_before as u32, null_rank: q as u32, hang: gsize[child] }
            })
        };
        let portals = [mk(p.left_portal[i], top.left(i + 1)), mk(p.right_portal[i], top.right(i + 1))];
        micros.push(MicroInfo { shape: p.micro_shape[i] as u32, pre_root: 0, in_start: 0, portals });
    }
    if m > 0 {
        micros[0].pre_root = 1;
        micros[0].in_start = 1;
    }
    for i in 1..=m {
        let (pre_root, in_start, portals) = (micros[i - 1].pre_root, micros[i - 1].in_start, micros[i - 1].portals);
        for (side, child) in [top.left(i), top.right(i)].into_iter().enumerate() {
            if child == NIL {
                continue;
            }
            let pt = portals[side].expect("parse checks portals against the top tier");
            let other = portals[1 - side];
            let mut pre = pre_root + pt.pre_before as usize;
            let mut inr = in_start + pt.null_rank as usize;
            if let Some(o) = other {
                if (o.pre_before, 1 - side) < (pt.pre_before, side) {
                    pre += o.hang;
                }
                if o.null_rank < pt.null_rank {
                    inr += o.hang;
                }
            }
            micros[child - 1].pre_root = pre;
            micros[child - 1].in_start = inr;
        }
    }

    let mut pre_runs = Vec::with_capacity(3 * m);
    let mut in_runs = Vec::with_capacity(3 * m);
    for (i, mi) in micros.iter().enumerate() {
        let k = shapes[mi.shape as usize].len();
        let mut cuts: Vec<&Portal> = mi.portals.iter().flatten().collect();
        // preorder runs over local ids 1..=k
        let mut global = mi.pre_root;
        let mut first = 1usize;
        for pt in &cuts {
            let end = pt.pre_before as usize;
            if end >= first {
                pre_runs.push((global, i as u32, first as u32));
                global += end + 1 - first;
                first = end + 1;
            }
            global += pt.hang;
        }
        if first <= k {
            pre_runs.push((global, i as u32, first as u32));
        }
        // inorder runs over positions 0..k
        cuts.sort_by_key(|pt| pt.null_rank);
        let mut global = mi.in_start;
        let mut first = 0usize;
        for pt in &cuts {
            let end = pt.null_rank as usize;
            if end > first {
                in_runs.push((global, i as u32, first as u32));
                global += end - first;
                first = end;
            }
            global += pt.hang;
        }
        if first < k {
            in_runs.push((global, i as u32, first as u32));
        }
    }

    Ok(NavIndex {
        n,
        shapes,
        micros,
        top_left: top.left_links().iter().map(|&x| x as u32).collect(),
        top_right: top.right_links().iter().map(|&x| x as u32).collect(),
        top_lca: PreorderLca::new(&top_parent),
        top_parent: top_parent.iter().map(|&x| x as u32).collect(),
        top_size: top_size.iter().map(|&x| x as u32).collect(),
        pre_runs: Intervals::build(pre_runs, n),
        in_runs: Intervals::build(in_runs, n),
    })
}

impl NavIndex {
    /// Encodes `t` with block `block` (default when `None`) and indexes it.
    pub fn from_tree(t: &BinaryTree, block: Option<usize>) -> Result<NavIndex> {
        build_nav(&crate::hypercodec::hs_encode_binary(t, block)?)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of micro trees.
    pub fn micro_count(&self) -> usize {
        self.micros.len()
    }

    /// Number of distinct shapes with a lookup table.
    pub fn shape_count(&self) -> usize {
        self.shapes.len()
    }

    /// Number of preorder and inorder runs.
    pub fn interval_counts(&self) -> (usize, usize) {
        (self.pre_runs.len(), self.in_runs.len())
    }

    /// Inorder runs of each micro tree: `(global start, first local inorder position)`.
    pub fn inorder_intervals(&self) -> Vec<Vec<(usize, usize)>> {
        let mut out = vec![Vec::new(); self.micros.len()];
        for i in 0..self.in_runs.len() {
            out[self.in_runs.micro[i] as usize].push((self.in_runs.start[i], self.in_runs.first[i] as usize));
        }
        out
    }

    fn check(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            return Err(Error::OutOfRange { index: v, len: self.n });
        }
        Ok(())
    }

    fn table(&self, micro: usize) -> &ShapeTable {
        &self.shapes[self.micros[micro].shape as usize]
    }

    /// Global preorder id of local node `x` of `micro`.
    fn global_pre(&self, micro: usize, x: usize) -> usize {
        let mi = &self.micros[micro];
        let mut g = mi.pre_root + x - 1;
        for pt in mi.portals.iter().flatten() {
            if (pt.pre_before as usize) < x {
                g += pt.hang;
            }
        }
        g
    }

    /// Local node of `micro` owning the portal toward top-tier child `child`.
    fn portal_owner(&self, micro: usize, child: usize) -> usize {
        let side = usize::from(self.top_left[micro + 1] as usize != child);
        self.micros[micro].portals[side].expect("top-tier child has a portal").owner as usize
    }

    /// Top-tier child of `w` on the path to its proper descendant `d`.
    fn child_toward(&self, w: usize, d: usize) -> usize {
        let l = self.top_left[w] as usize;
        if l != NIL && l <= d && d < l + self.top_size[l] as usize {
            l
        } else {
            self.top_right[w] as usize
        }
    }

    pub fn lca(&self, u: usize, v: usize) -> Result<usize> {
        self.check(u)?;
        self.check(v)?;
        let (mu, xu) = self.pre_runs.locate(u);
        let (mv, xv) = self.pre_runs.locate(v);
        if mu == mv {
            return Ok(self.global_pre(mu, self.table(mu).lca(xu, xv)));
        }
        let w = self.top_lca.lca(mu + 1, mv + 1);
        let lift = |m: usize, x: usize| {
            if m + 1 == w {
                x
            } else {
                self.portal_owner(w - 1, self.child_toward(w, m + 1))
            }
        };
        let (yu, yv) = (lift(mu, xu), lift(mv, xv));
        Ok(self.global_pre(w - 1, self.table(w - 1).lca(yu, yv)))
    }

    pub fn inorder_rank(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        let (m, x) = self.pre_runs.locate(v);
        let mi = &self.micros[m];
        let k = self.table(m).inorder_pos(x);
        let mut r = mi.in_start + k;
        for pt in mi.portals.iter().flatten() {
            if pt.null_rank as usize <= k {
                r += pt.hang;
            }
        }
        Ok(r)
    }

    pub fn inorder_select(&self, r: usize) -> Result<usize> {
        self.check(r)?;
        let (m, k) = self.in_runs.locate(r);
        Ok(self.global_pre(m, self.table(m).inorder_at(k)))
    }

    pub fn parent(&self, v: usize) -> Result<Option<usize>> {
        self.check(v)?;
        let (m, x) = self.pre_runs.locate(v);
        if x != 1 {
            return Ok(Some(self.global_pre(m, self.table(m).parent(x))));
        }
        let pm = self.top_parent[m + 1] as usize;
        if pm == NIL {
            return Ok(None);
        }
        Ok(Some(self.global_pre(pm - 1, self.portal_owner(pm - 1, m + 1))))
    }

    pub fn subtree_size(&self, v: usize) -> Result<usize> {
        self.check(v)?;
        let (m, x) = self.pre_runs.locate(v);
        let t = self.table(m);
        let end = x + t.subtree_size(x);
        let mut s = t.subtree_size(x);
        for pt in self.micros[m].portals.iter().flatten() {
            let o = pt.owner as usize;
            if x <= o && o < end {
                s += pt.hang;
            }
        }
        Ok(s)
    }

    /// Words of auxiliary storage held beyond the blob (a rough 64-bit word count).
    pub fn overhead_words(&self) -> usize {
        let shapes: usize = self
            .shapes
            .iter()
            .map(|s| {
                5 * s.k
                    + match &s.lca {
                        LocalLca::Table(t) => t.len() / 4,
                        LocalLca::Sparse(p) => p.levels.iter().map(Vec::len).sum::<usize>() / 2 + s.k,
                    }
            })
            .sum();
        let top = 2 * self.micros.len() + self.top_lca.levels.iter().map(Vec::len).sum::<usize>() / 2;
        let runs = 2 * (self.pre_runs.len() + self.in_runs.len()) + (self.pre_runs.dir.len() + self.in_runs.dir.len()) / 2;
        shapes + 6 * self.micros.len() + top + runs
    }
}

pub fn nav_lca(idx: &NavIndex, u: usize, v: usize) -> Result<usize> {
    idx.lca(u, v)
}

pub fn nav_inorder_rank(idx: &NavIndex, v: usize) -> Result<usize> {
    idx.inorder_rank(v)
}

pub fn nav_inorder_select(idx: &NavIndex, r: usize) -> Result<usize> {
    idx.inorder_select(r)
}

pub fn nav_parent(idx: &NavIndex, v: usize) -> Result<Option<usize>> {
    idx.parent(v)
}

pub fn nav_subtree_size(idx: &NavIndex, v: usize) -> Result<usize> {
    idx.subtree_size(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::annotate_binary;

    fn brute_lca(parent: &[usize], depth: &[usize], mut u: usize, mut v: usize) -> usize {
        while u != v {
            if depth[u] >= depth[v] {
                u = parent[u];
            } else {
                v = parent[v];
            }
        }
        u
    }

    fn check_all(t: &BinaryTree, block: Option<usize>) {
        let idx = NavIndex::from_tree(t, block).unwrap();
        let n = t.len();
        let parent = t.parents();
        let ann = annotate_binary(t);
        let size = t.subtree_sizes();
        let inorder = t.inorder();
        for v in 1..=n {
            assert_eq!(idx.parent(v).unwrap(), (parent[v] != NIL).then_some(parent[v]), "parent {v}");
            assert_eq!(idx.subtree_size(v).unwrap(), size[v], "size {v}");
        }
        for (r, &v) in inorder.iter().enumerate() {
            assert_eq!(idx.inorder_rank(v).unwrap(), r + 1, "rank {v}");
            assert_eq!(idx.inorder_select(r + 1).unwrap(), v);
        }
        for u in 1..=n {
            for v in 1..=n {
                assert_eq!(idx.lca(u, v).unwrap(), brute_lca(&parent, &ann.depth, u, v), "lca {u} {v}");
            }
        }
    }

    #[test]
    fn small_shapes() {
        check_all(&BinaryTree::single(), None);
        for s in ["(()())", "((()))()", "(((()))(()()))(()(()))", "((((((()()))(()())))((((()))())(())))())"] {
            let t = BinaryTree::from_bp_str(s).unwrap();
            for b in [1, 2, 3] {
                check_all(&t, Some(b));
            }
        }
    }

    #[test]
    fn chains_and_complete() {
        for n in [5usize, 17, 40] {
            for b in [1usize, 2, 4] {
                check_all(&BinaryTree::left_path(n), Some(b));
                check_all(&BinaryTree::right_path(n), Some(b));
                check_all(&BinaryTree::complete(n), Some(b));
            }
        }
        let idx = NavIndex::from_tree(&BinaryTree::left_path(3), None).unwrap();
        assert_eq!(idx.inorder_rank(3).unwrap(), 1);
        assert_eq!(idx.inorder_rank(1).unwrap(), 3);
    }

    #[test]
    fn single_micro_index() {
        let idx = NavIndex::from_tree(&BinaryTree::single(), None).unwrap();
        assert_eq!(idx.micro_count(), 1);
        assert_eq!(idx.interval_counts(), (1, 1));
        assert_eq!(idx.inorder_rank(1).unwrap(), 1);
        assert_eq!(idx.inorder_select(1).unwrap(), 1);
        assert!(idx.lca(0, 1).is_err());
        assert!(idx.inorder_select(2).is_err());
    }

    #[test]
    fn large_shape_uses_sparse_lca() {
        // one micro tree of 100 nodes
        check_all(&BinaryTree::complete(100), Some(60));
    }

    #[test]
    fn ordinal_blob_rejected() {
        let blob = crate::hypercodec::hs_encode_ordinal(&crate::tree::OrdinalTree::star(4), None).unwrap();
        assert!(matches!(build_nav(&blob), Err(Error::KindMismatch { .. })));
    }

    #[test]
    fn preorder_lca_table() {
        let t = BinaryTree::from_bp_str("(((()))(()()))(()(()))").unwrap();
        let parent = t.parents();
        let ann = annotate_binary(&t);
        let l = PreorderLca::new(&parent);
        for u in 1..=t.len() {
            for v in 1..=t.len() {
                assert_eq!(l.lca(u, v), brute_lca(&parent, &ann.depth, u, v));
            }
        }
    }
}
