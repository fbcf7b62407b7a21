use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};

use crate::bits::{floor_lg, gamma_decode, gamma_len, write_gamma, BitBuf, BitReader};
use crate::error::{malformed, Error, Result};

/// Longest codeword the canonical tables support.
const MAX_CODE_LEN: usize = 63;

/// Lexicographic order of BP strings with '(' < ')'.
pub fn bp_lex_cmp(a: &BitBuf, b: &BitBuf) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            // '(' is a 1 bit and sorts first
            return if x { Ordering::Less } else { Ordering::Greater };
        }
    }
    a.len().cmp(&b.len())
}

/// Canonical Huffman code over micro-tree shapes (keyed by BP string).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShapeCode {
    /// Shapes in canonical order: codeword length ascending, then BP lex.
    pub alphabet: Vec<BitBuf>,
    pub code_len: Vec<usize>,
    pub codewords: Vec<u64>,
    pub freq: Vec<u64>,
    index: HashMap<BitBuf, usize>,
}

/// Optimal prefix-code lengths for `freq` (all positive); ties broken by index.
pub fn huffman_lengths(freq: &[u64]) -> Vec<usize> {
    let k = freq.len();
    if k == 0 {
        return Vec::new();
    }
    if k == 1 {
        return vec![1];
    }
    let mut parent = vec![usize::MAX; 2 * k - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = freq.iter().enumerate().map(|(i, &f)| Reverse((f, i))).collect();
    let mut next = k;
    while heap.len() > 1 {
        let Reverse((fa, a)) = heap.pop().unwrap();
        let Reverse((fb, b)) = heap.pop().unwrap();
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((fa + fb, next)));
        next += 1;
    }
    let mut depth = vec![0usize; 2 * k - 1];
    for v in (0..2 * k - 2).rev() {
        depth[v] = depth[parent[v]] + 1;
    }
    depth.truncate(k);
    depth
}

/// Assigns canonical codeword values to symbols already sorted by length.
fn canonical_values(lens: &[usize]) -> Vec<u64> {
    let mut out = Vec::with_capacity(lens.len());
    let mut code = 0u64;
    let mut prev = 0usize;
    for (i, &l) in lens.iter().enumerate() {
        if i > 0 {
            code += 1;
        }
        code <<= l - prev;
        prev = l;
        out.push(code);
    }
    out
}

impl ShapeCode {
    /// Builds the code from the sequence of occurring shapes (with repetition).
    pub fn build<'a, I>(shapes: I) -> Result<ShapeCode>
    where
        I: IntoIterator<Item = &'a BitBuf>,
    {
        let mut count: HashMap<&BitBuf, u64> = HashMap::new();
        for s in shapes {
            *count.entry(s).or_insert(0) += 1;
        }
        if count.is_empty() {
            return Err(Error::InvalidArgument("shape code needs at least one shape".into()));
        }
        let mut syms: Vec<(&BitBuf, u64)> = count.into_iter().collect();
        syms.sort_by(|a, b| bp_lex_cmp(a.0, b.0));
        let freq: Vec<u64> = syms.iter().map(|s| s.1).collect();
        let lens = huffman_lengths(&freq);
        if lens.iter().any(|&l| l > MAX_CODE_LEN) {
            return Err(Error::InvalidArgument("Huffman codeword exceeds 63 bits".into()));
        }
        let mut order: Vec<usize> = (0..syms.len()).collect();
        order.sort_by(|&a, &b| lens[a].cmp(&lens[b]).then_with(|| bp_lex_cmp(syms[a].0, syms[b].0)));
        let alphabet: Vec<BitBuf> = order.iter().map(|&i| syms[i].0.clone()).collect();
        let code_len: Vec<usize> = order.iter().map(|&i| lens[i]).collect();
        let freq = order.iter().map(|&i| freq[i]).collect();
        Ok(Self::assemble(alphabet, code_len, freq))
    }

    fn assemble(alphabet: Vec<BitBuf>, code_len: Vec<usize>, freq: Vec<u64>) -> ShapeCode {
        let codewords = canonical_values(&code_len);
        let index = alphabet.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        ShapeCode { alphabet, code_len, codewords, freq, index }
    }

    pub fn len(&self) -> usize {
        self.alphabet.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphabet.is_empty()
    }

    pub fn index_of(&self, shape: &BitBuf) -> Option<usize> {
        self.index.get(shape).copied()
    }

    pub fn codeword(&self, i: usize) -> BitBuf {
        let mut b = BitBuf::new();
        b.push_bits(self.codewords[i], self.code_len[i]);
        b
    }

    /// Σ 2^-len.
    pub fn kraft_sum(&self) -> f64 {
        self.code_len.iter().map(|&l| (-(l as f64)).exp2()).sum()
    }

    /// Largest shape size in the alphabet.
    pub fn max_shape_size(&self) -> usize {
        self.alphabet.iter().map(|s| s.len() / 2).max().unwrap_or(0)
    }

    /// Length-restricted codeword for `shape`.
    pub fn restrict(&self, shape: &BitBuf) -> BitBuf {
        let cw = self.index_of(shape).map(|i| self.codeword(i));
        length_restricted(cw.as_ref(), shape)
    }

    /// Bits used by `restrict(shape)` without materializing them.
    pub fn restricted_len(&self, shape: &BitBuf) -> usize {
        let s = shape.len() / 2;
        match self.index_of(shape) {
            Some(i) if self.code_len[i] <= restrict_limit(s) => 1 + self.code_len[i],
            _ => 1 + gamma_len(s as u64 + 1) + 2 * s,
        }
    }

    /// γ(|Σ|+1), then per shape γ(|s|+1)·BP(s)·γ(len+1).
    pub fn write_codebook(&self, out: &mut BitBuf) {
        write_gamma(out, self.len() as u64 + 1).unwrap();
        for (s, &l) in self.alphabet.iter().zip(&self.code_len) {
            write_gamma(out, (s.len() / 2) as u64 + 1).unwrap();
            out.extend_from(s);
            write_gamma(out, l as u64 + 1).unwrap();
        }
    }

    /// Reads a codebook; `valid_bp` checks each shape string.
    pub fn read_codebook(r: &mut BitReader<'_>, valid_bp: impl Fn(&BitBuf) -> bool) -> Result<ShapeCode> {
        let k = gamma_decode(r)? - 1;
        if k == 0 {
            return malformed("empty codebook");
        }
        if k as usize > r.remaining() {
            return malformed("codebook size exceeds stream");
        }
        let mut alphabet: Vec<BitBuf> = Vec::with_capacity(k as usize);
        let mut code_len: Vec<usize> = Vec::with_capacity(k as usize);
        for _ in 0..k {
            let s = (gamma_decode(r)? - 1) as usize;
            if 2 * s > r.remaining() {
                return malformed("shape exceeds stream");
            }
            let start = r.position();
            r.skip(2 * s)?;
            let bp = r.buffer().slice(start, 2 * s);
            if !valid_bp(&bp) {
                return malformed("codebook shape is not a valid BP string");
            }
            let l = (gamma_decode(r)? - 1) as usize;
            if l == 0 || l > MAX_CODE_LEN {
                return malformed("codeword length out of range");
            }
            if let (Some(pb), Some(&pl)) = (alphabet.last(), code_len.last()) {
                let ord = pl.cmp(&l).then_with(|| bp_lex_cmp(pb, &bp));
                if ord != Ordering::Less {
                    return malformed("codebook not in canonical order");
                }
            }
            alphabet.push(bp);
            code_len.push(l);
        }
        let kraft: u128 = code_len.iter().map(|&l| 1u128 << (MAX_CODE_LEN - l)).sum();
        let complete = if k == 1 { code_len[0] == 1 } else { kraft == 1u128 << MAX_CODE_LEN };
        if !complete {
            return malformed("codeword lengths do not form a complete prefix code");
        }
        let freq = vec![0; k as usize];
        Ok(Self::assemble(alphabet, code_len, freq))
    }

    pub fn decoder(&self) -> CanonicalDecoder {
        CanonicalDecoder::new(&self.code_len, &self.codewords)
    }
}

/// Upper limit on Huffman codeword length before falling back to the escape.
#[inline]
pub fn restrict_limit(shape_size: usize) -> usize {
    2 * shape_size + 2 * floor_lg(shape_size as u64 + 1)
}

/// 1·C(s) if |C(s)| ≤ 2|s| + 2⌊lg(|s|+1)⌋, else 0·γ(|s|+1)·BP(s).
pub fn length_restricted(codeword: Option<&BitBuf>, shape: &BitBuf) -> BitBuf {
    let s = shape.len() / 2;
    let mut out = BitBuf::new();
    match codeword {
        Some(c) if c.len() <= restrict_limit(s) => {
            out.push(true);
            out.extend_from(c);
        }
        _ => {
            out.push(false);
            write_gamma(&mut out, s as u64 + 1).unwrap();
            out.extend_from(shape);
        }
    }
    out
}

/// Bit-at-a-time decoder for a canonical code.
#[derive(Clone, Debug)]
pub struct CanonicalDecoder {
    // per length: first code value, index of first symbol, symbol count
    first: Vec<u64>,
    offset: Vec<usize>,
    count: Vec<usize>,
}

impl CanonicalDecoder {
    fn new(lens: &[usize], codes: &[u64]) -> Self {
        let maxl = lens.iter().copied().max().unwrap_or(0);
        let mut first = vec![0u64; maxl + 1];
        let mut offset = vec![0usize; maxl + 1];
        let mut count = vec![0usize; maxl + 1];
        for (i, &l) in lens.iter().enumerate() {
            if count[l] == 0 {
                first[l] = codes[i];
                offset[l] = i;
            }
            count[l] += 1;
        }
        CanonicalDecoder { first, offset, count }
    }

    /// Reads one codeword and returns the symbol index.
    pub fn decode(&self, r: &mut BitReader<'_>) -> Result<usize> {
        let mut code = 0u64;
        for l in 1..self.first.len() {
            code = (code << 1) | r.read_bit()? as u64;
            if self.count[l] > 0 && code >= self.first[l] && code - self.first[l] < self.count[l] as u64 {
                return Ok(self.offset[l] + (code - self.first[l]) as usize);
            }
        }
        malformed("unknown codeword")
    }
}

/// Reads one restricted codeword and returns the shape's BP string.
pub fn read_restricted(
    code: &ShapeCode,
    dec: &CanonicalDecoder,
    r: &mut BitReader<'_>,
    valid_bp: impl Fn(&BitBuf) -> bool,
) -> Result<ShapeRef> {
    if r.read_bit()? {
        return Ok(ShapeRef::Code(dec.decode(r)?));
    }
    let s = (gamma_decode(r)? - 1) as usize;
    if 2 * s > r.remaining() {
        return malformed("escaped shape exceeds stream");
    }
    let start = r.position();
    r.skip(2 * s)?;
    let bp = r.buffer().slice(start, 2 * s);
    if !valid_bp(&bp) {
        return malformed("escaped shape is not a valid BP string");
    }
    Ok(match code.index_of(&bp) {
        Some(i) => ShapeRef::Code(i),
        None => ShapeRef::Escaped(bp),
    })
}

/// A decoded micro-tree shape: alphabet index or an escaped literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShapeRef {
    Code(usize),
    Escaped(BitBuf),
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(s: &str) -> BitBuf {
        BitBuf::from_bit_str(s).unwrap()
    }

    #[test]
    fn hand_huffman() {
        let x = bp("()");
        let y = bp("(())");
        let z = bp("()()");
        let code = ShapeCode::build([&x, &x, &y, &z]).unwrap();
        let len_of = |s: &BitBuf| code.code_len[code.index_of(s).unwrap()];
        assert_eq!((len_of(&x), len_of(&y), len_of(&z)), (1, 2, 2));
        assert_eq!(code.kraft_sum(), 1.0);
        assert_eq!(code.codeword(0).to_bit_string(), "0");
        assert_eq!(code.alphabet[1], y); // "(())" < "()()"
        assert_eq!(code.codeword(2).to_bit_string(), "11");
    }

    #[test]
    fn singleton_alphabet() {
        let x = bp("(())");
        let code = ShapeCode::build([&x, &x]).unwrap();
        assert_eq!(code.code_len, vec![1]);
        assert_eq!(code.codeword(0).to_bit_string(), "0");
        assert_eq!(code.kraft_sum(), 0.5);
    }

    #[test]
    fn distinct_shapes_balanced() {
        for m in 2..70u64 {
            let lens = huffman_lengths(&vec![1; m as usize]);
            let lo = floor_lg(m);
            let hi = lo + usize::from(!m.is_power_of_two());
            assert!(lens.iter().all(|&l| l >= lo && l <= hi), "m={m} {lens:?}");
        }
    }

    #[test]
    fn huffman_is_optimal_small() {
        // compare against exhaustive search over full binary code trees via the merge recurrence
        fn best(f: &mut Vec<u64>) -> u64 {
            if f.len() == 1 {
                return 0;
            }
            let mut bestv = u64::MAX;
            for i in 0..f.len() {
                for j in i + 1..f.len() {
                    let mut g = f.clone();
                    let s = g[i] + g[j];
                    g.remove(j);
                    g.remove(i);
                    g.push(s);
                    bestv = bestv.min(s + best(&mut g));
                }
            }
            bestv
        }
        let cases: [&[u64]; 4] = [&[5, 1, 1, 2, 8], &[1, 1, 1, 1, 1, 1], &[10, 3, 3, 3, 2, 1], &[7, 7, 1]];
        for f in cases {
            let lens = huffman_lengths(f);
            let cost: u64 = lens.iter().zip(f.iter()).map(|(&l, &w)| l as u64 * w).sum();
            assert_eq!(cost, best(&mut f.to_vec()), "{f:?}");
        }
    }

    #[test]
    fn restrict_examples() {
        let mut long = BitBuf::new();
        long.push_bits(0, 64);
        long.extend_from(&BitBuf::from_bit_str(&"0".repeat(36)).unwrap());
        assert_eq!(long.len(), 100);
        let shape = crate::tree::BinaryTree::left_path(10).to_bp();
        let out = length_restricted(Some(&long), &shape);
        assert_eq!(out.len(), 28);
        assert!(!out.get(0));
        let short = bp("101");
        let out = length_restricted(Some(&short), &shape);
        assert_eq!(out.to_bit_string(), "1101");
        assert_eq!(length_restricted(None, &BitBuf::new()).to_bit_string(), "01");
    }

    #[test]
    fn codebook_roundtrip() {
        let shapes: Vec<BitBuf> = ["()", "(())", "()()", "(()())", "()", "()", "(())"].iter().map(|s| bp(s)).collect();
        let code = ShapeCode::build(&shapes).unwrap();
        let mut out = BitBuf::new();
        code.write_codebook(&mut out);
        let back = ShapeCode::read_codebook(&mut out.reader(), |_| true).unwrap();
        assert_eq!(back.alphabet, code.alphabet);
        assert_eq!(back.code_len, code.code_len);
        assert_eq!(back.codewords, code.codewords);
        let dec = code.decoder();
        let mut stream = BitBuf::new();
        for s in &shapes {
            stream.extend_from(&code.restrict(s));
        }
        let mut r = stream.reader();
        for s in &shapes {
            match read_restricted(&code, &dec, &mut r, |_| true).unwrap() {
                ShapeRef::Code(i) => assert_eq!(&code.alphabet[i], s),
                ShapeRef::Escaped(b) => assert_eq!(&b, s),
            }
        }
    }
}
