//! Bit buffers, MSB-first readers, Elias gamma and variable-cell arrays.

use std::fmt;

use crate::error::{malformed, Error, Result};

/// Growable bit sequence, MSB-first within each byte.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitBuf {
    bytes: Vec<u8>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitBuf { bytes: Vec::with_capacity(bits.div_ceil(8)), len: 0 }
    }

    /// Parses a string over {'0','1'} (or '(' / ')', read as 1 / 0).
    pub fn from_bit_str(s: &str) -> Result<Self> {
        let mut b = BitBuf::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '1' | '(' => b.push(true),
                '0' | ')' => b.push(false),
                c if c.is_whitespace() => {}
                c => return Err(Error::InvalidArgument(format!("unexpected character {c:?} in bit string"))),
            }
        }
        Ok(b)
    }

    /// Wraps raw bytes; every bit of every byte counts.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitBuf { bytes: bytes.to_vec(), len: bytes.len() * 8 }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Backing bytes, final byte zero-filled past `len`.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            self.bytes[self.len / 8] |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: usize) {
        debug_assert!(width <= 64);
        for i in (0..width).rev() {
            self.push((value >> i) & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BitBuf) {
        if self.len % 8 == 0 {
            self.bytes.extend_from_slice(&other.bytes);
            self.len += other.len;
            return;
        }
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range ({})", self.len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    /// Copies bits `[start, start+len)` into a new buffer.
    pub fn slice(&self, start: usize, len: usize) -> BitBuf {
        assert!(start + len <= self.len);
        let mut out = BitBuf::with_capacity(len);
        for i in start..start + len {
            out.push(self.get(i));
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Renders as parentheses: 1 = '(' and 0 = ')'.
    pub fn to_paren_string(&self) -> String {
        self.iter().map(|b| if b { '(' } else { ')' }).collect()
    }

    pub fn reader(&self) -> BitReader<'_> {
        BitReader::new(self)
    }
}

impl fmt::Debug for BitBuf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitBuf({:?})", self.to_bit_string())
    }
}

/// Forward cursor over a [`BitBuf`].
#[derive(Clone, Debug)]
pub struct BitReader<'a> {
    buf: &'a BitBuf,
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(buf: &'a BitBuf) -> Self {
        BitReader { buf, pos: 0 }
    }

    pub fn at(buf: &'a BitBuf, pos: usize) -> Self {
        BitReader { buf, pos }
    }

    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.buf.len() - self.pos
    }

    pub fn buffer(&self) -> &'a BitBuf {
        self.buf
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.buf.len() {
            return malformed("unexpected end of bitstream");
        }
        let b = self.buf.get(self.pos);
        self.pos += 1;
        Ok(b)
    }

    /// Reads the next bit, or `false` past the end of the buffer.
    #[inline]
    pub fn read_bit_or_zero(&mut self) -> bool {
        let b = self.pos < self.buf.len() && self.buf.get(self.pos);
        self.pos += 1;
        b
    }

    pub fn read_bits(&mut self, width: usize) -> Result<u64> {
        if width > 64 {
            return Err(Error::InvalidArgument(format!("cannot read {width} bits into a word")));
        }
        if self.remaining() < width {
            return malformed("unexpected end of bitstream");
        }
        let mut v = 0u64;
        for _ in 0..width {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    pub fn skip(&mut self, bits: usize) -> Result<()> {
        if self.remaining() < bits {
            return malformed("unexpected end of bitstream");
        }
        self.pos += bits;
        Ok(())
    }
}

/// Number of bits in the binary representation of `v` (0 for 0).
#[inline]
pub fn bit_length(v: u64) -> usize {
    64 - v.leading_zeros() as usize
}

/// ⌊lg n⌋ for n ≥ 1.
#[inline]
pub fn floor_lg(n: u64) -> usize {
    debug_assert!(n > 0);
    bit_length(n) - 1
}

/// Appends the Elias gamma codeword of `n` (n ≥ 1).
pub fn write_gamma(out: &mut BitBuf, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("gamma code needs a positive integer".into()));
    }
    let k = floor_lg(n);
    for _ in 0..k {
        out.push(false);
    }
    out.push_bits(n, k + 1);
    Ok(())
}

pub fn gamma_encode(n: u64) -> Result<BitBuf> {
    let mut b = BitBuf::new();
    write_gamma(&mut b, n)?;
    Ok(b)
}

pub fn gamma_decode(r: &mut BitReader<'_>) -> Result<u64> {
    let mut zeros = 0usize;
    while !r.read_bit()? {
        zeros += 1;
        if zeros > 63 {
            return malformed("gamma codeword longer than 64 bits");
        }
    }
    let rest = r.read_bits(zeros)?;
    Ok((1u64 << zeros) | rest)
}

/// Length in bits of the gamma codeword for `n`.
#[inline]
pub fn gamma_len(n: u64) -> usize {
    2 * floor_lg(n) + 1
}

/// Cells per block in a [`VarCellArray`].
pub const VCA_BLOCK: usize = 64;

/// Concatenated variable-length cells with constant-time offset lookup.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarCellArray {
    data: BitBuf,
    block_start: Vec<u64>,
    block_local_start: Vec<u32>,
    count: usize,
}

impl VarCellArray {
    pub fn build<'a, I>(cells: I) -> Self
    where
        I: IntoIterator<Item = &'a BitBuf>,
    {
        let mut a = VarCellArray::default();
        let mut local_base = 0u64;
        for (i, cell) in cells.into_iter().enumerate() {
            let off = a.data.len() as u64;
            if i % VCA_BLOCK == 0 {
                a.block_start.push(off);
                local_base = off;
            }
            a.block_local_start.push((off - local_base) as u32);
            a.data.extend_from(cell);
            a.count += 1;
        }
        a
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn data(&self) -> &BitBuf {
        &self.data
    }

    fn offset(&self, i: usize) -> usize {
        if i == self.count {
            return self.data.len();
        }
        (self.block_start[i / VCA_BLOCK] + self.block_local_start[i] as u64) as usize
    }

    /// Bit offset and length of cell `i`.
    pub fn access(&self, i: usize) -> Result<(usize, usize)> {
        if i >= self.count {
            return Err(Error::OutOfRange { index: i, len: self.count });
        }
        let start = self.offset(i);
        Ok((start, self.offset(i + 1) - start))
    }

    pub fn cell(&self, i: usize) -> Result<BitBuf> {
        let (off, len) = self.access(i)?;
        Ok(self.data.slice(off, len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> BitBuf {
        BitBuf::from_bit_str(s).unwrap()
    }

    #[test]
    fn gamma_small_values() {
        assert_eq!(gamma_encode(1).unwrap().to_bit_string(), "1");
        assert_eq!(gamma_encode(2).unwrap().to_bit_string(), "010");
        assert_eq!(gamma_encode(5).unwrap().to_bit_string(), "00101");
        assert!(gamma_encode(0).is_err());
    }

    #[test]
    fn gamma_decode_advances() {
        let b = bits("00101111");
        let mut r = b.reader();
        assert_eq!(gamma_decode(&mut r).unwrap(), 5);
        assert_eq!(r.position(), 5);
        let b = bits("010");
        assert_eq!(gamma_decode(&mut b.reader()).unwrap(), 2);
    }

    #[test]
    fn gamma_truncated_is_malformed() {
        for s in ["", "0", "00", "001", "0001"] {
            let b = bits(s);
            assert!(matches!(gamma_decode(&mut b.reader()), Err(Error::Malformed(_))), "{s}");
        }
    }

    #[test]
    fn gamma_all_small_roundtrip() {
        let mut buf = BitBuf::new();
        for n in 1..=(1u64 << 16) {
            write_gamma(&mut buf, n).unwrap();
        }
        let mut r = buf.reader();
        for n in 1..=(1u64 << 16) {
            let before = r.position();
            assert_eq!(gamma_decode(&mut r).unwrap(), n);
            assert_eq!(r.position() - before, gamma_len(n));
            assert_eq!(gamma_len(n), 2 * (63 - n.leading_zeros() as usize) + 1);
        }
        assert_eq!(r.remaining(), 0);
    }

    #[test]
    fn push_bits_and_slices() {
        let mut b = BitBuf::new();
        b.push_bits(0b1011, 4);
        b.push_bits(0xABCD, 16);
        assert_eq!(b.len(), 20);
        assert_eq!(b.slice(0, 4).to_bit_string(), "1011");
        let mut r = b.reader();
        assert_eq!(r.read_bits(4).unwrap(), 0b1011);
        assert_eq!(r.read_bits(16).unwrap(), 0xABCD);
        assert!(r.read_bit().is_err());
        // bits past len stay zero
        assert_eq!(b.as_bytes()[2] & 0x0F, 0);
    }

    #[test]
    fn extend_unaligned() {
        let mut a = bits("101");
        a.extend_from(&bits("1100110011"));
        assert_eq!(a.to_bit_string(), "1011100110011");
        let mut c = bits("10101010");
        c.extend_from(&bits("01"));
        assert_eq!(c.to_bit_string(), "1010101001");
    }

    #[test]
    fn vca_examples() {
        let a = VarCellArray::build(&[]);
        assert_eq!(a.len(), 0);
        assert_eq!(a.data().len(), 0);
        assert!(a.access(0).is_err());

        let cells = [bits("1"), bits("00"), bits("111")];
        let a = VarCellArray::build(&cells);
        assert_eq!(a.access(0).unwrap(), (0, 1));
        assert_eq!(a.access(1).unwrap(), (1, 2));
        assert_eq!(a.access(2).unwrap(), (3, 3));
        assert_eq!(a.data().len(), 6);
        assert!(matches!(a.access(3), Err(Error::OutOfRange { index: 3, len: 3 })));

        let a = VarCellArray::build(&[BitBuf::new()]);
        assert_eq!(a.access(0).unwrap(), (0, 0));
    }

    #[test]
    fn vca_uniform_cells() {
        let cells: Vec<BitBuf> = (0..100_000u64).map(|i| {
            let mut b = BitBuf::new();
            b.push_bits(i % 128, 7);
            b
        }).collect();
        let a = VarCellArray::build(&cells);
        for i in 0..cells.len() {
            assert_eq!(a.access(i).unwrap(), (7 * i, 7));
        }
        assert_eq!(a.cell(12345).unwrap(), cells[12345]);
    }
}
