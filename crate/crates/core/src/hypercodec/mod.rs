//! The hypersuccinct code: Huffman-coded micro-tree shapes plus top tier and portals.

mod binary;
mod huffman;
mod ordinal;

pub use binary::{
    assemble_binary, encode_binary_cover, encode_binary_with_report, hs_decode_binary, hs_encode_binary, parse_binary,
    portal_width, BinaryShape, ParsedBinary,
};
pub use huffman::{bp_lex_cmp, huffman_lengths, length_restricted, restrict_limit, CanonicalDecoder, ShapeCode};
pub use ordinal::{
    assemble_ordinal, encode_ordinal_cover, encode_ordinal_with_report, hs_decode_ordinal, hs_encode_ordinal,
    parse_ordinal, ParsedOrdinal,
};

use crate::bits::BitBuf;
use crate::error::{malformed, Result};
use crate::tree::TreeRef;

pub const MAGIC: &[u8; 4] = b"HST1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    Binary,
    Ordinal,
}

impl TreeKind {
    pub fn byte(self) -> u8 {
        match self {
            TreeKind::Binary => 0,
            TreeKind::Ordinal => 1,
        }
    }
}

/// An encoded tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HsBlob {
    pub kind: TreeKind,
    pub bits: BitBuf,
}

impl HsBlob {
    /// `.hst` layout: magic, kind byte, bitstream zero-padded to a byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(5 + self.bits.as_bytes().len());
        out.extend_from_slice(MAGIC);
        out.push(self.kind.byte());
        out.extend_from_slice(self.bits.as_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<HsBlob> {
        if bytes.len() < 5 || &bytes[..4] != MAGIC {
            return malformed("missing HST1 magic");
        }
        let kind = match bytes[4] {
            0 => TreeKind::Binary,
            1 => TreeKind::Ordinal,
            k => return malformed(format!("unknown tree kind byte {k:#04x}")),
        };
        Ok(HsBlob { kind, bits: BitBuf::from_bytes(&bytes[5..]) })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Allows only zero padding (less than a byte) after the last consumed bit.
pub(crate) fn check_padding(bits: &BitBuf, end: usize) -> Result<()> {
    let extra = bits.len() - end;
    if extra >= 8 || (end..bits.len()).any(|i| bits.get(i)) {
        return malformed("trailing data after the encoded tree");
    }
    Ok(())
}

/// Per-part bit counts of an encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceReport {
    pub n: usize,
    pub m: usize,
    pub block: usize,
    pub distinct_shapes: usize,
    pub header: usize,
    pub top_tier: usize,
    pub codebook: usize,
    /// Length-restricted codewords.
    pub codewords: usize,
    pub portals: usize,
    pub edge_types: usize,
    /// Σ|C(μ)| with the plain Huffman code.
    pub unrestricted: usize,
    pub total: usize,
}

impl SpaceReport {
    pub fn parts_sum(&self) -> usize {
        self.header + self.top_tier + self.codebook + self.codewords + self.portals + self.edge_types
    }

    pub fn bits_per_node(&self) -> f64 {
        self.total as f64 / self.n as f64
    }
}

pub fn space_report<'a>(t: impl Into<TreeRef<'a>>, block: Option<usize>) -> Result<SpaceReport> {
    Ok(match t.into() {
        TreeRef::Binary(t) => encode_binary_with_report(t, block)?.1,
        TreeRef::Ordinal(t) => encode_ordinal_with_report(t, block)?.1,
    })
}

pub use crate::tree::AnyTree as DecodedTree;

pub fn hs_encode<'a>(t: impl Into<TreeRef<'a>>, block: Option<usize>) -> Result<HsBlob> {
    match t.into() {
        TreeRef::Binary(t) => hs_encode_binary(t, block),
        TreeRef::Ordinal(t) => hs_encode_ordinal(t, block),
    }
}

pub fn hs_decode(blob: &HsBlob) -> Result<DecodedTree> {
    Ok(match blob.kind {
        TreeKind::Binary => DecodedTree::Binary(hs_decode_binary(blob)?),
        TreeKind::Ordinal => DecodedTree::Ordinal(hs_decode_ordinal(blob)?),
    })
}
