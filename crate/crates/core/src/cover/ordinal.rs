use crate::tree::{Forest, OrdinalTree, NIL};

/// How a micro tree hangs from its parent in the top tier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum EdgeType {
    /// (i) new leftmost root child
    NewLeftmost = 0,
    /// (ii) continued leftmost root child
    ContinuedLeftmost = 1,
    /// (iii) new rightmost root child
    NewRightmost = 2,
    /// (iv) continued rightmost root child
    ContinuedRightmost = 3,
    /// (v) child through the external edge
    External = 4,
}

impl EdgeType {
    pub fn from_code(c: u64) -> Option<EdgeType> {
        Some(match c {
            0 => EdgeType::NewLeftmost,
            1 => EdgeType::ContinuedLeftmost,
            2 => EdgeType::NewRightmost,
            3 => EdgeType::ContinuedRightmost,
            4 => EdgeType::External,
            _ => return None,
        })
    }

    pub fn code(self) -> u64 {
        self as u64
    }

    pub fn is_continued(self) -> bool {
        matches!(self, EdgeType::ContinuedLeftmost | EdgeType::ContinuedRightmost)
    }

    pub fn is_leftmost(self) -> bool {
        matches!(self, EdgeType::NewLeftmost | EdgeType::ContinuedLeftmost)
    }

    pub fn is_rightmost(self) -> bool {
        matches!(self, EdgeType::NewRightmost | EdgeType::ContinuedRightmost)
    }
}

/// One micro tree of an ordinal cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinalMicro {
    pub shape: OrdinalTree,
    pub local_to_global: Vec<usize>,
    /// (local preorder position, child rank) of the single external edge.
    pub ext_portal: Option<(usize, usize)>,
    pub shared_root: bool,
    pub edge_type: EdgeType,
}

impl OrdinalMicro {
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

/// Ordinal cover; micro trees are listed in preorder of the top tier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinalCover {
    pub block: usize,
    pub micro: Vec<OrdinalMicro>,
    /// Top tier with a dummy root at id 1; `micro[i]` is node `i+2`.
    pub top_tier: OrdinalTree,
}

impl OrdinalCover {
    pub fn edge_types(&self) -> Vec<EdgeType> {
        self.micro.iter().map(|m| m.edge_type).collect()
    }
}

struct Comp {
    root: usize,
    covered: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Open {
    size: usize,
    gap: usize,
}

struct Packer<'a> {
    f: &'a Forest,
    block: usize,
    open: Vec<Option<Open>>,
    comps: Vec<Comp>,
}

impl Packer<'_> {
    fn heavy(&self, u: usize) -> bool {
        self.f.subtree_size(u) >= self.block
    }

    fn seal(&mut self, root: usize, covered: Vec<usize>) {
        self.comps.push(Comp { root, covered });
    }

    fn item_size(&self, u: usize) -> usize {
        if self.heavy(u) {
            self.open[u].map_or(0, |o| o.size)
        } else {
            self.f.subtree_size(u)
        }
    }

    /// Greedily packs `items` into components rooted at `v`; returns the
    /// unsealed remainder and its size (including `v`).
    fn greedy(&mut self, v: usize, items: &[usize], sealed: &mut usize) -> (Vec<usize>, usize) {
        let mut cur = Vec::new();
        let mut sz = 1;
        for &u in items {
            cur.push(u);
            sz += self.item_size(u);
            if sz >= self.block {
                self.seal(v, std::mem::take(&mut cur));
                *sealed += 1;
                sz = 1;
            }
        }
        (cur, sz)
    }

    fn process(&mut self, v: usize) {
        let f = self.f;
        if !self.heavy(v) {
            self.open[v] = Some(Open { size: f.subtree_size(v), gap: NIL });
            return;
        }
        let children: Vec<usize> = f.children(v).collect();
        let heavy: Vec<usize> = children.iter().copied().filter(|&u| self.heavy(u)).collect();
        let mut sealed = 0;
        match heavy.len() {
            1 => {
                let h = heavy[0];
                let h_open = self.open[h].is_some();
                let items: Vec<usize> = if h_open {
                    children
                } else {
                    children.into_iter().filter(|&u| u != h).collect()
                };
                let (rest, sz) = self.greedy(v, &items, &mut sealed);
                if sealed == 0 && sz < self.block {
                    self.open[v] = Some(Open { size: sz, gap: if h_open { NIL } else { h } });
                    return;
                }
                if !rest.is_empty() || sealed == 0 {
                    self.seal(v, rest);
                }
            }
            _ => {
                for &h in &heavy {
                    if let Some(o) = self.open[h] {
                        let cov = f.children(h).filter(|&c| c != o.gap).collect();
                        self.seal(h, cov);
                        self.open[h] = None;
                    }
                }
                let mut segment = Vec::new();
                for &u in children.iter().chain(std::iter::once(&NIL)) {
                    if u != NIL && !self.heavy(u) {
                        segment.push(u);
                        continue;
                    }
                    let (rest, _) = self.greedy(v, &segment, &mut sealed);
                    if !rest.is_empty() {
                        self.seal(v, rest);
                        sealed += 1;
                    }
                    segment.clear();
                }
                if sealed == 0 {
                    self.seal(v, Vec::new());
                }
            }
        }
        self.open[v] = None;
    }
}

fn pack(f: &Forest, block: usize) -> Vec<Comp> {
    let n = f.len();
    if n <= 2 * block {
        return vec![Comp { root: 1, covered: f.children(1).collect() }];
    }
    let mut p = Packer { f, block, open: vec![None; n + 1], comps: Vec::new() };
    for v in (1..=n).rev() {
        p.process(v);
    }
    if let Some(o) = p.open[1] {
        let cov = f.children(1).filter(|&c| c != o.gap).collect();
        p.seal(1, cov);
    }
    p.comps
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Attach {
    Leftmost,
    External,
    Rightmost,
}

pub fn decompose_ordinal(t: &OrdinalTree, block: usize) -> OrdinalCover {
    let f: &Forest = t;
    let n = f.len();
    assert!(n >= 1, "cannot cover an empty tree");
    let block = block.max(1);
    let mut comps = pack(f, block);
    // block order at each root
    comps.sort_by_key(|c| (c.root, c.covered.first().copied().unwrap_or(0)));
    let nc = comps.len();

    let mut is_root = vec![false; n + 1];
    let mut first_at = vec![usize::MAX; n + 1];
    let mut count_at = vec![0usize; n + 1];
    for (i, c) in comps.iter().enumerate() {
        is_root[c.root] = true;
        if first_at[c.root] == usize::MAX {
            first_at[c.root] = i;
        }
        count_at[c.root] += 1;
    }
    let mut owner = vec![usize::MAX; n + 1];
    for (i, c) in comps.iter().enumerate() {
        for &u in &c.covered {
            owner[u] = i;
        }
    }
    for v in 1..=n {
        if is_root[v] {
            continue;
        }
        for c in f.children(v) {
            if !is_root[c] {
                owner[c] = owner[v];
            }
        }
    }

    // local shapes and external edges
    let mut shapes = Vec::with_capacity(nc);
    let mut ext_child = vec![NIL; nc];
    let mut ext_portal = vec![None; nc];
    let mut local_id = vec![0usize; n + 1];
    for (i, c) in comps.iter().enumerate() {
        let mut l2g = vec![NIL, c.root];
        let mut stack: Vec<usize> = c.covered.iter().rev().copied().collect();
        while let Some(u) = stack.pop() {
            l2g.push(u);
            local_id[u] = l2g.len() - 1;
            let mut rank = 0;
            let mut below = Vec::new();
            for ch in f.children(u) {
                if is_root[ch] {
                    ext_child[i] = ch;
                    ext_portal[i] = Some((local_id[u], rank));
                } else {
                    below.push(ch);
                    rank += 1;
                }
            }
            stack.extend(below.into_iter().rev());
        }
        let k = l2g.len() - 1;
        let mut size = vec![1usize; k + 1];
        size[0] = 0;
        for x in (2..=k).rev() {
            let g = l2g[x];
            let s: usize = f.children(g).filter(|&ch| !is_root[ch]).map(|ch| size[local_id[ch]]).sum();
            size[x] += s;
        }
        size[1] = k;
        shapes.push((OrdinalTree::from_sizes(size).expect("local shape is a tree"), l2g));
    }

    // children of each comp in the top tier, grouped by attachment
    let mut top_children: Vec<Vec<(Attach, usize)>> = vec![Vec::new(); nc];
    for r in 1..=n {
        if !is_root[r] {
            continue;
        }
        let first = first_at[r];
        let mut current: Option<usize> = None;
        let mut last_covered_pos = vec![0usize; count_at[r]];
        let mut seen = vec![0usize; count_at[r]];
        for (pos, c) in f.children(r).enumerate() {
            if !is_root[c] {
                last_covered_pos[owner[c] - first] = pos;
            }
        }
        for (pos, c) in f.children(r).enumerate() {
            if !is_root[c] {
                current = Some(owner[c]);
                seen[owner[c] - first] += 1;
                continue;
            }
            match current {
                None => top_children[first].push((Attach::Leftmost, c)),
                Some(ci) if last_covered_pos[ci - first] > pos => {
                    ext_child[ci] = c;
                    ext_portal[ci] = Some((1, seen[ci - first]));
                }
                Some(ci) => top_children[ci].push((Attach::Rightmost, c)),
            }
        }
    }
    for (i, &c) in ext_child.iter().enumerate() {
        if c != NIL {
            top_children[i].push((Attach::External, c));
        }
    }

    // top-tier preorder
    let mut order: Vec<usize> = Vec::with_capacity(nc);
    let mut edge: Vec<EdgeType> = vec![EdgeType::NewLeftmost; nc];
    let mut top_parent: Vec<usize> = vec![usize::MAX; nc];
    let expand = |parent: usize, attach: Attach, node: usize, edge: &mut Vec<EdgeType>, top_parent: &mut Vec<usize>| {
        let (new, cont) = match attach {
            Attach::Leftmost => (EdgeType::NewLeftmost, EdgeType::ContinuedLeftmost),
            Attach::Rightmost => (EdgeType::NewRightmost, EdgeType::ContinuedRightmost),
            Attach::External => (EdgeType::External, EdgeType::External),
        };
        let first = first_at[node];
        (first..first + count_at[node])
            .map(|ci| {
                edge[ci] = if ci == first { new } else { cont };
                top_parent[ci] = parent;
                ci
            })
            .collect::<Vec<_>>()
    };
    let rank = |a: Attach| match a {
        Attach::Leftmost => 0,
        Attach::External => 1,
        Attach::Rightmost => 2,
    };
    let mut stack: Vec<usize> = expand(usize::MAX, Attach::Leftmost, 1, &mut edge, &mut top_parent);
    stack.reverse();
    while let Some(ci) = stack.pop() {
        order.push(ci);
        let mut kids = top_children[ci].clone();
        kids.sort_by_key(|&(a, _)| rank(a));
        let mut all = Vec::new();
        for (a, node) in kids {
            all.extend(expand(ci, a, node, &mut edge, &mut top_parent));
        }
        stack.extend(all.into_iter().rev());
    }
    debug_assert_eq!(order.len(), nc);

    let mut pos_of = vec![0usize; nc];
    for (p, &ci) in order.iter().enumerate() {
        pos_of[ci] = p;
    }
    // top tier sizes in preorder: dummy at 1, micro at pos + 2
    let mut tsize = vec![1usize; nc + 2];
    tsize[0] = 0;
    for &ci in order.iter().rev() {
        if top_parent[ci] != usize::MAX {
            let p = pos_of[top_parent[ci]] + 2;
            tsize[p] += tsize[pos_of[ci] + 2];
        }
    }
    tsize[1] = nc + 1;
    let top_tier = OrdinalTree::from_sizes(tsize).expect("top tier is a tree");

    let mut shapes: Vec<Option<(OrdinalTree, Vec<usize>)>> = shapes.into_iter().map(Some).collect();
    let micro = order
        .iter()
        .map(|&ci| {
            let (shape, local_to_global) = shapes[ci].take().unwrap();
            OrdinalMicro {
                shape,
                local_to_global,
                ext_portal: ext_portal[ci],
                shared_root: count_at[comps[ci].root] > 1,
                edge_type: edge[ci],
            }
        })
        .collect();
    OrdinalCover { block, micro, top_tier }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_star_single_micro() {
        let t = OrdinalTree::star(8);
        let c = decompose_ordinal(&t, 4);
        assert_eq!(c.micro.len(), 1);
        assert_eq!(c.micro[0].shape, t);
    }

    #[test]
    fn big_star_shares_root() {
        let b = 4;
        let t = OrdinalTree::star(10 * b);
        let c = decompose_ordinal(&t, b);
        assert!(c.micro.len() > 1);
        assert!(c.micro.iter().all(|m| m.root() == 1 && m.shared_root));
        assert_eq!(c.micro[0].edge_type, EdgeType::NewLeftmost);
        assert!(c.micro[1..].iter().all(|m| m.edge_type == EdgeType::ContinuedLeftmost));
        let total: usize = c.micro.iter().map(|m| m.len() - 1).sum();
        assert_eq!(total, 10 * b - 1);
    }

    #[test]
    fn path_chains() {
        let t = OrdinalTree::path(30);
        let c = decompose_ordinal(&t, 3);
        assert!(c.micro.iter().all(|m| m.len() <= 6 && !m.shared_root));
        let total: usize = c.micro.iter().map(|m| m.len()).sum();
        assert_eq!(total, 30);
    }
}
