use std::collections::HashMap;

use super::binary::portal_width;
use super::huffman::{read_restricted, ShapeCode, ShapeRef};
use super::{HsBlob, SpaceReport, TreeKind};
use crate::bits::{gamma_decode, write_gamma, BitBuf, BitReader};
use crate::cover::{decompose_ordinal, default_block, EdgeType, OrdinalCover};
use crate::error::{malformed, Error, Result};
use crate::tree::{Forest, OrdinalTree, NIL};

pub(crate) fn valid_ordinal_bp(bp: &BitBuf) -> bool {
    !bp.is_empty() && OrdinalTree::from_bp(bp).is_ok()
}

pub fn hs_encode_ordinal(t: &OrdinalTree, block: Option<usize>) -> Result<HsBlob> {
    Ok(encode_ordinal_with_report(t, block)?.0)
}

pub fn encode_ordinal_with_report(t: &OrdinalTree, block: Option<usize>) -> Result<(HsBlob, SpaceReport)> {
    if t.is_empty() {
        return Err(Error::InvalidArgument("cannot encode an empty tree".into()));
    }
    let b = block.unwrap_or_else(|| default_block(t.len()));
    if b == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let cover = decompose_ordinal(t, b);
    encode_ordinal_cover(t.len(), &cover)
}

pub fn encode_ordinal_cover(n: usize, cover: &OrdinalCover) -> Result<(HsBlob, SpaceReport)> {
    let m = cover.micro.len();
    let shapes: Vec<BitBuf> = cover.micro.iter().map(|mt| mt.shape.to_bp()).collect();
    let code = ShapeCode::build(&shapes)?;
    let mut out = BitBuf::new();
    let mut rep = SpaceReport { n, m, block: cover.block, distinct_shapes: code.len(), ..Default::default() };

    write_gamma(&mut out, n as u64 + 1)?;
    write_gamma(&mut out, m as u64 + 1)?;
    rep.header = out.len();

    out.extend_from(&cover.top_tier.to_bp());
    rep.top_tier = out.len() - rep.header;

    let mark = out.len();
    code.write_codebook(&mut out);
    rep.codebook = out.len() - mark;

    let mark = out.len();
    for s in &shapes {
        let i = code.index_of(s).expect("every shape is in the alphabet");
        rep.unrestricted += code.code_len[i];
        out.extend_from(&code.restrict(s));
    }
    rep.codewords = out.len() - mark;

    let mark = out.len();
    let w = portal_width(code.max_shape_size());
    for mt in &cover.micro {
        let (pos, rank) = mt.ext_portal.map_or((0, 0), |(p, r)| (p as u64, r as u64));
        out.push_bits(pos, w);
        out.push_bits(rank, w);
    }
    rep.portals = out.len() - mark;

    let mark = out.len();
    for mt in &cover.micro {
        out.push_bits(mt.edge_type.code(), 3);
    }
    rep.edge_types = out.len() - mark;
    rep.total = out.len();
    Ok((HsBlob { kind: TreeKind::Ordinal, bits: out }, rep))
}

/// An ordinal blob parsed into its parts.
#[derive(Clone, Debug)]
pub struct ParsedOrdinal {
    pub n: usize,
    pub top_tier: OrdinalTree,
    pub code: ShapeCode,
    pub shapes: Vec<OrdinalTree>,
    pub micro_shape: Vec<usize>,
    pub ext_portal: Vec<Option<(usize, usize)>>,
    pub edge_type: Vec<EdgeType>,
    pub end: usize,
}

pub fn parse_ordinal(bits: &BitBuf) -> Result<ParsedOrdinal> {
    let mut r = BitReader::new(bits);
    let n = (gamma_decode(&mut r)? - 1) as usize;
    let m = (gamma_decode(&mut r)? - 1) as usize;
    if n == 0 || m == 0 || m > 2 * n {
        return malformed("header counts out of range");
    }
    if 2 * (m + 1) > r.remaining() {
        return malformed("top tier exceeds stream");
    }
    let start = r.position();
    r.skip(2 * (m + 1))?;
    let top_tier = OrdinalTree::from_bp(&bits.slice(start, 2 * (m + 1)))?;

    let code = ShapeCode::read_codebook(&mut r, valid_ordinal_bp)?;
    let dec = code.decoder();
    let mut shapes: Vec<OrdinalTree> = Vec::with_capacity(code.len());
    for s in &code.alphabet {
        shapes.push(OrdinalTree::from_bp(s)?);
    }
    let mut extra: HashMap<BitBuf, usize> = HashMap::new();
    let mut micro_shape = Vec::with_capacity(m);
    for _ in 0..m {
        let idx = match read_restricted(&code, &dec, &mut r, valid_ordinal_bp)? {
            ShapeRef::Code(i) => i,
            ShapeRef::Escaped(bp) => *extra.entry(bp.clone()).or_insert_with(|| {
                shapes.push(OrdinalTree::from_bp(&bp).unwrap());
                shapes.len() - 1
            }),
        };
        micro_shape.push(idx);
    }
    let w = portal_width(code.max_shape_size());
    let mut ext_portal = Vec::with_capacity(m);
    for &si in &micro_shape {
        let pos = r.read_bits(w)? as usize;
        let rank = r.read_bits(w)? as usize;
        if pos == 0 {
            if rank != 0 {
                return malformed("absent portal with nonzero rank");
            }
            ext_portal.push(None);
            continue;
        }
        let sh = &shapes[si];
        if pos > sh.len() {
            return malformed("portal position out of range");
        }
        let deg = sh.degree(pos);
        let ok = if pos == 1 { rank > 0 && rank < deg } else { rank <= deg };
        if !ok {
            return malformed("portal rank out of range");
        }
        ext_portal.push(Some((pos, rank)));
    }
    let mut edge_type = Vec::with_capacity(m);
    for _ in 0..m {
        match EdgeType::from_code(r.read_bits(3)?) {
            Some(e) => edge_type.push(e),
            None => return malformed("unknown edge type"),
        }
    }
    Ok(ParsedOrdinal { n, top_tier, code, shapes, micro_shape, ext_portal, edge_type, end: r.position() })
}

/// Checks the type sequence of one top-tier node's children.
fn check_group(types: &[EdgeType], dummy: bool, has_ext: bool) -> Result<()> {
    // phase: 0 leftmost, 1 external, 2 rightmost
    let mut phase = 0;
    let mut prev: Option<EdgeType> = None;
    let mut saw_ext = false;
    for &t in types {
        let p = if t.is_leftmost() { 0 } else if t == EdgeType::External { 1 } else { 2 };
        if p < phase {
            return malformed("top-tier children out of order");
        }
        if t.is_continued() && !prev.is_some_and(|q| (q.is_leftmost() && t.is_leftmost()) || (q.is_rightmost() && t.is_rightmost())) {
            return malformed("continued edge without a preceding sibling");
        }
        if dummy && (p != 0 || (t == EdgeType::NewLeftmost && prev.is_some())) {
            return malformed("invalid edge type below the dummy root");
        }
        saw_ext |= p == 1;
        phase = p;
        prev = Some(t);
    }
    if dummy && types.first() != Some(&EdgeType::NewLeftmost) {
        return malformed("dummy root must start a new root");
    }
    if saw_ext != has_ext {
        return malformed("external edge does not match the portal");
    }
    Ok(())
}

pub fn assemble_ordinal(p: &ParsedOrdinal) -> Result<OrdinalTree> {
    let m = p.micro_shape.len();
    let top = &p.top_tier;
    let n = p.n;
    let mut root_id = vec![NIL; m];
    let mut next_id = 1usize;
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
    let mut alloc = |next_id: &mut usize| -> Result<usize> {
        if *next_id > n {
            return malformed("more nodes than the header declares");
        }
        *next_id += 1;
        Ok(*next_id - 1)
    };

    // children of a top-tier node, assigned root ids; returns (type, root) in order
    let assign = |u: usize, root_id: &mut Vec<usize>, next_id: &mut usize, alloc: &mut dyn FnMut(&mut usize) -> Result<usize>| -> Result<Vec<(EdgeType, usize)>> {
        let mut out = Vec::new();
        let mut last: Option<(EdgeType, usize)> = None;
        for c in top.children(u) {
            let i = c - 2;
            let t = p.edge_type[i];
            let id = match (t, last) {
                (t, Some((_, prev))) if t.is_continued() => prev,
                (EdgeType::External, Some((EdgeType::External, prev))) => prev,
                _ => alloc(next_id)?,
            };
            root_id[i] = id;
            out.push((t, id));
            last = Some((t, id));
        }
        Ok(out)
    };

    let dummy_types: Vec<EdgeType> = top.children(1).map(|c| p.edge_type[c - 2]).collect();
    check_group(&dummy_types, true, false)?;
    assign(1, &mut root_id, &mut next_id, &mut alloc)?;

    for i in 0..m {
        let node = i + 2;
        let sh = &p.shapes[p.micro_shape[i]];
        let kids = assign(node, &mut root_id, &mut next_id, &mut alloc)?;
        let types: Vec<EdgeType> = kids.iter().map(|k| k.0).collect();
        check_group(&types, false, p.ext_portal[i].is_some())?;
        let mut lid = vec![NIL; sh.len() + 1];
        lid[1] = root_id[i];
        for x in 2..=sh.len() {
            lid[x] = alloc(&mut next_id)?;
        }
        let new_roots = |pred: fn(EdgeType) -> bool| -> Vec<usize> {
            kids.iter().filter(|k| pred(k.0) && !k.0.is_continued()).map(|k| k.1).collect()
        };
        let ext_root = kids.iter().find(|k| k.0 == EdgeType::External).map(|k| k.1);
        let r = lid[1];
        let leftmost = new_roots(EdgeType::is_leftmost);
        children[r].extend(leftmost);
        for x in 1..=sh.len() {
            let mut list: Vec<usize> = sh.children(x).map(|c| lid[c]).collect();
            if let (Some((pos, rank)), Some(e)) = (p.ext_portal[i], ext_root) {
                if pos == x {
                    list.insert(rank, e);
                }
            }
            if x == 1 {
                children[r].extend(list);
            } else {
                children[lid[x]] = list;
            }
        }
        let rightmost = new_roots(EdgeType::is_rightmost);
        children[r].extend(rightmost);
    }
    if next_id != n + 1 {
        return malformed("node count does not match the header");
    }
    let (f, _) = Forest::from_children(&[1], &children).map_err(|_| Error::Malformed("edges do not form a tree".into()))?;
    if f.len() != n {
        return malformed("assembled tree has the wrong size");
    }
    f.into_tree()
}

pub fn hs_decode_ordinal(blob: &HsBlob) -> Result<OrdinalTree> {
    if blob.kind != TreeKind::Ordinal {
        return Err(Error::KindMismatch { expected: "ordinal" });
    }
    let p = parse_ordinal(&blob.bits)?;
    super::check_padding(&blob.bits, p.end)?;
    assemble_ordinal(&p)
}
