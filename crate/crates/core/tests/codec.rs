use hypersuccinct::bits::*;
use hypersuccinct::cover::*;
use hypersuccinct::hypercodec::*;
use hypersuccinct::sources::{remy, OrdinalSplit, SplitSource};
use hypersuccinct::tree::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_binary(n: usize, seed: u64) -> BinaryTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match seed % 3 {
        0 => remy(n, &mut rng),
        1 => SplitSource::Bst.sample(n, &mut rng).unwrap(),
        _ => SplitSource::AlmostPath(2).sample(n, &mut rng).unwrap(),
    }
}

/// Random recursive tree: node `i` hangs below a uniform earlier node.
fn random_ordinal(n: usize, seed: u64) -> OrdinalTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if seed % 2 == 0 {
        return OrdinalSplit::Lrm.sample(n, &mut rng).unwrap();
    }
    let mut children = vec![Vec::new(); n + 1];
    for v in 2..=n {
        let p = rng.gen_range(1..v);
        children[p].push(v);
    }
    OrdinalTree::from_children(1, &children).unwrap().0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn gamma_roundtrip(n in 1u64..(1u64 << 40)) {
        let code = gamma_encode(n).unwrap();
        prop_assert_eq!(code.len(), 2 * floor_lg(n) + 1);
        let mut r = code.reader();
        prop_assert_eq!(gamma_decode(&mut r).unwrap(), n);
        prop_assert_eq!(r.remaining(), 0);
    }

    #[test]
    fn varcell_reconstructs(cells in prop::collection::vec(prop::collection::vec(any::<bool>(), 0..70), 0..300)) {
        let bufs: Vec<BitBuf> = cells.iter().map(|c| {
            let mut b = BitBuf::new();
            c.iter().for_each(|&x| b.push(x));
            b
        }).collect();
        let a = VarCellArray::build(bufs.iter());
        prop_assert_eq!(a.len(), bufs.len());
        let mut joined = BitBuf::new();
        let mut offset = 0;
        for (i, b) in bufs.iter().enumerate() {
            let (off, len) = a.access(i).unwrap();
            prop_assert_eq!((off, len), (offset, b.len()));
            prop_assert_eq!(&a.cell(i).unwrap(), b);
            offset += len;
            joined.extend_from(&a.cell(i).unwrap());
        }
        prop_assert_eq!(&joined, a.data());
        prop_assert!(a.access(bufs.len()).is_err());
    }

    #[test]
    fn binary_bp_and_blob_roundtrip(n in 1usize..400, seed in any::<u64>(), block in 0usize..7) {
        let t = random_binary(n, seed);
        let bp = t.to_bp();
        prop_assert_eq!(bp.len(), 2 * n);
        prop_assert_eq!(&BinaryTree::from_bp(&bp).unwrap(), &t);
        let block = (block > 0).then_some(block);
        let (blob, report) = encode_binary_with_report(&t, block).unwrap();
        prop_assert_eq!(report.total, blob.bits.len());
        prop_assert_eq!(report.parts_sum(), report.total);
        prop_assert!(report.codewords <= report.unrestricted + report.m);
        let back = HsBlob::from_bytes(&blob.to_bytes()).unwrap();
        prop_assert_eq!(&hs_decode_binary(&back).unwrap(), &t);
    }

    #[test]
    fn ordinal_bp_fcns_and_blob_roundtrip(n in 1usize..400, seed in any::<u64>(), block in 0usize..7) {
        let t = random_ordinal(n, seed);
        let bp = t.to_bp();
        prop_assert_eq!(bp.len(), 2 * n);
        prop_assert_eq!(&OrdinalTree::from_bp(&bp).unwrap(), &t);
        let b = t.forest().fcns();
        prop_assert_eq!(b.len(), n);
        prop_assert_eq!(b.to_bp(), bp.clone());
        prop_assert_eq!(&Forest::fcns_inverse(&b), t.forest());
        let block = (block > 0).then_some(block);
        let (blob, report) = encode_ordinal_with_report(&t, block).unwrap();
        prop_assert_eq!(report.total, blob.bits.len());
        let back = HsBlob::from_bytes(&blob.to_bytes()).unwrap();
        prop_assert_eq!(&hs_decode_ordinal(&back).unwrap(), &t);
    }

    #[test]
    fn covers_validate(n in 1usize..600, seed in any::<u64>(), block in 1usize..9) {
        let t = random_binary(n, seed);
        let c = decompose_binary(&t, block);
        let stats = validate_binary_cover(&t, &c).map_err(|v| TestCaseError::fail(format!("{v:?}")))?;
        prop_assert_eq!(stats.m, c.micro.len());
        prop_assert!(c.micro.iter().all(|m| m.len() <= 2 * block));
        let o = random_ordinal(n, seed);
        let oc = decompose_ordinal(&o, block);
        validate_ordinal_cover(&o, &oc).map_err(|v| TestCaseError::fail(format!("{v:?}")))?;
        prop_assert!(oc.micro.iter().all(|m| m.len() <= 2 * block));
    }

    #[test]
    fn corrupted_blobs_never_panic(n in 1usize..120, seed in any::<u64>(), flip in any::<prop::sample::Index>(), cut in any::<prop::sample::Index>()) {
        let t = random_binary(n, seed);
        let blob = hs_encode_binary(&t, Some(2)).unwrap();
        let mut bytes = blob.to_bytes();
        let i = 5 + flip.index(bytes.len() - 5);
        bytes[i] ^= 1 << (seed % 8);
        if let Ok(b) = HsBlob::from_bytes(&bytes) {
            let _ = hs_decode_binary(&b);
        }
        let bytes = blob.to_bytes();
        let keep = cut.index(bytes.len());
        if let Ok(b) = HsBlob::from_bytes(&bytes[..keep]) {
            // a truncated stream is either rejected or still describes the same tree
            if let Ok(d) = hs_decode_binary(&b) {
                prop_assert_eq!(d, t);
            }
        }
        let o = random_ordinal(n, seed);
        let mut bytes = hs_encode_ordinal(&o, Some(2)).unwrap().to_bytes();
        let i = 5 + flip.index(bytes.len() - 5);
        bytes[i] ^= 1 << (seed % 8);
        if let Ok(b) = HsBlob::from_bytes(&bytes) {
            let _ = hs_decode_ordinal(&b);
        }
    }

    #[test]
    fn huffman_lengths_are_optimal_and_kraft(freq in prop::collection::vec(1u64..1000, 1..40)) {
        let lens = huffman_lengths(&freq);
        let kraft: f64 = lens.iter().map(|&l| 2f64.powi(-(l as i32))).sum();
        if freq.len() >= 2 {
            prop_assert!((kraft - 1.0).abs() < 1e-12);
        } else {
            prop_assert_eq!(lens.clone(), vec![1]);
        }
        // optimal cost equals the sum of merged weights
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<u64>> = freq.iter().map(|&f| std::cmp::Reverse(f)).collect();
        let mut cost = 0;
        while heap.len() > 1 {
            let a = heap.pop().unwrap().0;
            let b = heap.pop().unwrap().0;
            cost += a + b;
            heap.push(std::cmp::Reverse(a + b));
        }
        let ours: u64 = freq.iter().zip(&lens).map(|(&f, &l)| f * l as u64).sum();
        if freq.len() >= 2 {
            prop_assert_eq!(ours, cost);
        }
    }
}

#[test]
fn blob_kind_and_magic_checks() {
    let t = BinaryTree::complete(31);
    let blob = hs_encode_binary(&t, None).unwrap();
    let bytes = blob.to_bytes();
    assert_eq!(&bytes[..4], b"HST1");
    assert_eq!(bytes[4], 0);
    assert!(HsBlob::from_bytes(b"HST").is_err());
    assert!(HsBlob::from_bytes(b"XST1\x00\x80").is_err());
    let mut bad_kind = bytes.clone();
    bad_kind[4] = 7;
    assert!(HsBlob::from_bytes(&bad_kind).is_err());
    assert!(hs_decode_ordinal(&blob).is_err());
    let o = hs_encode_ordinal(&OrdinalTree::star(40), None).unwrap();
    assert_eq!(o.to_bytes()[4], 1);
    assert!(hs_decode_binary(&o).is_err());
    match hs_decode(&o).unwrap() {
        DecodedTree::Ordinal(x) => assert_eq!(x, OrdinalTree::star(40)),
        other => panic!("wrong kind {other:?}"),
    }
}

#[test]
fn worst_case_paths_and_stars() {
    for n in [1usize, 2, 17, 5000, 100_000] {
        for t in [BinaryTree::left_path(n), BinaryTree::right_path(n), BinaryTree::complete(n)] {
            let (blob, report) = encode_binary_with_report(&t, None).unwrap();
            assert_eq!(hs_decode_binary(&blob).unwrap(), t);
            let w = portal_width(2 * report.block);
            assert_eq!(report.top_tier, 2 * report.m);
            assert_eq!(report.portals % (2 * report.m), 0);
            assert!(report.portals <= 2 * w * report.m);
            if n >= 5000 {
                let wide = hs_encode_binary(&t, Some(32)).unwrap();
                assert_eq!(hs_decode_binary(&wide).unwrap(), t);
                assert!(wide.len() as f64 <= 2.5 * n as f64, "n={n}: {}", wide.len());
            }
        }
        for t in [OrdinalTree::star(n), OrdinalTree::path(n)] {
            let blob = hs_encode_ordinal(&t, None).unwrap();
            assert_eq!(hs_decode_ordinal(&blob).unwrap(), t);
        }
    }
}

#[test]
fn star_covers_share_the_root() {
    let b = 4;
    let star = OrdinalTree::star(10 * b);
    let c = decompose_ordinal(&star, b);
    validate_ordinal_cover(&star, &c).unwrap();
    assert!(c.micro.len() > 1);
    assert!(c.micro.iter().all(|m| m.root() == 1 && m.len() <= 2 * b));
    assert!(c.micro.iter().filter(|m| m.shared_root).count() >= 1);
}

#[test]
fn annotations_match_definitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(300);
    for _ in 0..200 {
        let n = rng.gen_range(1..200);
        let t = remy(n, &mut rng);
        let a = annotate(&t);
        assert_eq!(a.subtree_size[t.root()], n);
        let types = a.node_type.as_ref().unwrap();
        let ranks = a.inorder_rank.as_ref().unwrap();
        for v in 1..=n {
            let (l, r) = (t.left(v), t.right(v));
            assert_eq!(a.subtree_size[v], 1 + a.subtree_size[l] * usize::from(l != NIL) + a.subtree_size[r] * usize::from(r != NIL));
            let hl = if l == NIL { 0 } else { a.height[l] };
            let hr = if r == NIL { 0 } else { a.height[r] };
            assert_eq!(a.height[v], 1 + hl.max(hr));
            assert_eq!(types[v], NodeType::of(l != NIL, r != NIL));
        }
        for (k, v) in t.inorder().into_iter().enumerate() {
            assert_eq!(ranks[v], k + 1);
        }
    }
}

#[test]
fn single_shape_alphabet_uses_one_bit() {
    // a complete tree of 2^k - 1 nodes with B = 1 gives single-node micro trees only
    let t = BinaryTree::complete(63);
    let (_, report) = encode_binary_with_report(&t, Some(1)).unwrap();
    assert_eq!(report.distinct_shapes, 1);
    assert_eq!(report.unrestricted, report.m);
}
