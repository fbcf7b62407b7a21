use std::collections::HashMap;

use super::huffman::{read_restricted, ShapeCode, ShapeRef};
use super::{HsBlob, SpaceReport, TreeKind};
use crate::bits::{bit_length, gamma_decode, write_gamma, BitBuf, BitReader};
use crate::cover::{decompose_binary, default_block, null_ranks, BinaryCover};
use crate::error::{malformed, Error, Result};
use crate::tree::{BinaryTree, NIL};

/// Shape of a binary micro tree with the local facts the codec needs.
#[derive(Clone, Debug)]
pub struct BinaryShape {
    pub tree: BinaryTree,
    /// Size of the root's left subtree; null ranks `<=` this lie on the left.
    pub root_left: usize,
    /// Owner of each null rank: (local node, is_left).
    pub null_owner: Vec<(usize, bool)>,
}

impl BinaryShape {
    pub fn new(tree: BinaryTree) -> Self {
        let k = tree.len();
        let mut null_owner = vec![(NIL, false); k + 1];
        for (x, (l, r)) in null_ranks(&tree).into_iter().enumerate().skip(1) {
            if let Some(q) = l {
                null_owner[q] = (x, true);
            }
            if let Some(q) = r {
                null_owner[q] = (x, false);
            }
        }
        let root_left = tree.subtree_sizes()[tree.left(1)];
        BinaryShape { tree, root_left, null_owner }
    }

    pub fn len(&self) -> usize {
        self.tree.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tree.is_empty()
    }
}

/// Portal field width for micro trees of at most `max_size` nodes.
pub fn portal_width(max_size: usize) -> usize {
    bit_length(max_size as u64 + 1)
}

pub(crate) fn valid_binary_bp(bp: &BitBuf) -> bool {
    !bp.is_empty() && BinaryTree::from_bp(bp).is_ok()
}

pub fn hs_encode_binary(t: &BinaryTree, block: Option<usize>) -> Result<HsBlob> {
    Ok(encode_binary_with_report(t, block)?.0)
}

pub fn encode_binary_with_report(t: &BinaryTree, block: Option<usize>) -> Result<(HsBlob, SpaceReport)> {
    if t.is_empty() {
        return Err(Error::InvalidArgument("cannot encode an empty tree".into()));
    }
    let b = block.unwrap_or_else(|| default_block(t.len()));
    if b == 0 {
        return Err(Error::InvalidArgument("block size must be positive".into()));
    }
    let cover = decompose_binary(t, b);
    encode_binary_cover(t.len(), &cover)
}

pub fn encode_binary_cover(n: usize, cover: &BinaryCover) -> Result<(HsBlob, SpaceReport)> {
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
        out.push_bits(mt.left_portal.map_or(0, |q| q as u64 + 1), w);
        out.push_bits(mt.right_portal.map_or(0, |q| q as u64 + 1), w);
    }
    rep.portals = out.len() - mark;
    rep.total = out.len();
    Ok((HsBlob { kind: TreeKind::Binary, bits: out }, rep))
}

/// A binary blob parsed into its parts, without assembling the tree.
#[derive(Clone, Debug)]
pub struct ParsedBinary {
    pub n: usize,
    pub top_tier: BinaryTree,
    pub code: ShapeCode,
    /// Distinct shapes: the alphabet, then any escaped literal not in it.
    pub shapes: Vec<BinaryShape>,
    pub shape_bp: Vec<BitBuf>,
    pub micro_shape: Vec<usize>,
    pub left_portal: Vec<Option<usize>>,
    pub right_portal: Vec<Option<usize>>,
    /// Bits consumed.
    pub end: usize,
}

impl ParsedBinary {
    pub fn m(&self) -> usize {
        self.micro_shape.len()
    }

    pub fn shape_of(&self, micro: usize) -> &BinaryShape {
        &self.shapes[self.micro_shape[micro]]
    }
}

pub fn parse_binary(bits: &BitBuf) -> Result<ParsedBinary> {
    let mut r = BitReader::new(bits);
    let n = (gamma_decode(&mut r)? - 1) as usize;
    let m = (gamma_decode(&mut r)? - 1) as usize;
    if n == 0 || m == 0 || m > n {
        return malformed("header counts out of range");
    }
    if 2 * m > r.remaining() {
        return malformed("top tier exceeds stream");
    }
    let start = r.position();
    r.skip(2 * m)?;
    let top_tier = BinaryTree::from_bp(&bits.slice(start, 2 * m))?;

    let code = ShapeCode::read_codebook(&mut r, valid_binary_bp)?;
    let dec = code.decoder();
    let mut shapes: Vec<BinaryShape> = Vec::with_capacity(code.len());
    let mut shape_bp = code.alphabet.clone();
    for s in &code.alphabet {
        shapes.push(BinaryShape::new(BinaryTree::from_bp(s)?));
    }
    let mut extra: HashMap<BitBuf, usize> = HashMap::new();
    let mut micro_shape = Vec::with_capacity(m);
    let mut total = 0usize;
    for _ in 0..m {
        let idx = match read_restricted(&code, &dec, &mut r, valid_binary_bp)? {
            ShapeRef::Code(i) => i,
            ShapeRef::Escaped(bp) => *extra.entry(bp.clone()).or_insert_with(|| {
                shapes.push(BinaryShape::new(BinaryTree::from_bp(&bp).unwrap()));
                shape_bp.push(bp);
                shapes.len() - 1
            }),
        };
        total += shapes[idx].len();
        micro_shape.push(idx);
    }
    if total != n {
        return malformed("micro-tree sizes do not add up to n");
    }
    let w = portal_width(code.max_shape_size());
    let mut left_portal = Vec::with_capacity(m);
    let mut right_portal = Vec::with_capacity(m);
    for i in 0..m {
        let sh = &shapes[micro_shape[i]];
        let k = sh.len();
        let mut field = |has_child: bool, left: bool| -> Result<Option<usize>> {
            let v = r.read_bits(w)? as usize;
            if (v != 0) != has_child {
                return malformed("portal does not match the top tier");
            }
            if v == 0 {
                return Ok(None);
            }
            let q = v - 1;
            if q > k || (left && q > sh.root_left) || (!left && q <= sh.root_left) {
                return malformed("portal rank out of range");
            }
            Ok(Some(q))
        };
        left_portal.push(field(top_tier.left(i + 1) != NIL, true)?);
        right_portal.push(field(top_tier.right(i + 1) != NIL, false)?);
    }
    Ok(ParsedBinary {
        n,
        top_tier,
        code,
        shapes,
        shape_bp,
        micro_shape,
        left_portal,
        right_portal,
        end: r.position(),
    })
}

/// Rebuilds the global tree from parsed parts.
pub fn assemble_binary(p: &ParsedBinary) -> Result<BinaryTree> {
    let m = p.m();
    let mut base = Vec::with_capacity(m + 1);
    let mut acc = 0;
    for i in 0..m {
        base.push(acc);
        acc += p.shape_of(i).len();
    }
    let mut left = vec![NIL; p.n + 1];
    let mut right = vec![NIL; p.n + 1];
    for i in 0..m {
        let sh = p.shape_of(i);
        let b = base[i];
        for x in 1..=sh.len() {
            let (l, r) = (sh.tree.left(x), sh.tree.right(x));
            if l != NIL {
                left[b + x] = b + l;
            }
            if r != NIL {
                right[b + x] = b + r;
            }
        }
        let node = i + 1;
        for (portal, child) in [(p.left_portal[i], p.top_tier.left(node)), (p.right_portal[i], p.top_tier.right(node))] {
            if let Some(q) = portal {
                let (x, is_left) = sh.null_owner[q];
                let target = base[child - 1] + 1;
                if is_left {
                    left[b + x] = target;
                } else {
                    right[b + x] = target;
                }
            }
        }
    }
    let (t, _) = BinaryTree::from_links(1, &left, &right).map_err(|_| Error::Malformed("portals do not form a tree".into()))?;
    if t.len() != p.n {
        return malformed("assembled tree has the wrong size");
    }
    Ok(t)
}

pub fn hs_decode_binary(blob: &HsBlob) -> Result<BinaryTree> {
    if blob.kind != TreeKind::Binary {
        return Err(Error::KindMismatch { expected: "binary" });
    }
    let p = parse_binary(&blob.bits)?;
    super::check_padding(&blob.bits, p.end)?;
    assemble_binary(&p)
}
