use hypersuccinct::rmq::*;
use hypersuccinct::sources::{lg_binom, type_entropy};
use hypersuccinct::tree::NIL;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_min<T: Ord>(a: &[T], i: usize, j: usize) -> usize {
    let mut best = i;
    for k in i..=j {
        if a[k - 1] < a[best - 1] {
            best = k;
        }
    }
    best
}

fn check_all_pairs(a: &[i64], block: Option<usize>) {
    let idx = rmq_build_with_block(a, block).unwrap();
    for i in 1..=a.len() {
        for j in i..=a.len() {
            assert_eq!(rmq_query(&idx, i, j).unwrap(), brute_min(a, i, j), "{a:?} [{i}, {j}]");
        }
    }
}

/// Heap's algorithm, calling `f` on every permutation of `a`.
fn each_permutation(a: &mut [i64], f: &mut impl FnMut(&[i64])) {
    let n = a.len();
    let mut c = vec![0; n];
    f(a);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            a.swap(if i % 2 == 0 { 0 } else { c[i] }, i);
            f(a);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// Random array of length `n` with exactly `r` runs.
fn array_with_runs(n: usize, r: usize, rng: &mut impl Rng) -> Vec<i64> {
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts[..r - 1].to_vec();
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(n);
    let mut a = Vec::with_capacity(n);
    for w in cuts.windows(2) {
        let mut run: Vec<i64> = (w[0]..w[1]).map(|_| rng.gen_range(-1_000_000..1_000_000)).collect();
        run.sort_unstable();
        if let Some(&prev) = a.last() {
            if run[0] >= prev {
                run[0] = prev - 1 - rng.gen_range(0..1000);
            }
        }
        a.extend(run);
    }
    a
}

#[test]
fn random_arrays_all_intervals() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for i in 0..200 {
        let n = rng.gen_range(1..=256);
        // small value ranges give many ties
        let range = [3i64, 20, 1_000_000][i % 3];
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..range)).collect();
        check_all_pairs(&a, [None, Some(1), Some(2), Some(4)][i % 4]);
    }
}

#[test]
fn all_permutations_of_eight() {
    let mut a: Vec<i64> = (1..=8).collect();
    let mut count = 0;
    each_permutation(&mut a, &mut |p| {
        check_all_pairs(p, Some(2));
        count += 1;
    });
    assert_eq!(count, 40320);
}

#[test]
fn ties_resolve_leftmost() {
    let a = [5i64, 1, 3, 1, 1, 0, 0, 4];
    check_all_pairs(&a, None);
    let idx = rmq_build(&a).unwrap();
    assert_eq!(idx.query(2, 5).unwrap(), 2);
    assert_eq!(idx.query(1, 8).unwrap(), 6);
    let flat = rmq_build(&[9u8; 40]).unwrap();
    assert_eq!(flat.query(7, 30).unwrap(), 7);
}

#[test]
fn large_array_sampled_queries() {
    let mut rng = ChaCha8Rng::seed_from_u64(201);
    let n = 100_000;
    let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..1_000_000)).collect();
    let idx = rmq_build(&a).unwrap();
    // sparse-table oracle
    let mut table = vec![(1..=n).collect::<Vec<usize>>()];
    let mut w = 1;
    while 2 * w <= n {
        let prev = table.last().unwrap();
        let next: Vec<usize> = (0..=n - 2 * w)
            .map(|i| {
                let (x, y) = (prev[i], prev[i + w]);
                if a[y - 1] < a[x - 1] { y } else { x }
            })
            .collect();
        table.push(next);
        w *= 2;
    }
    for _ in 0..20_000 {
        let i = rng.gen_range(1..=n);
        let span = rng.gen_range(0..5000);
        let j = rng.gen_range(i..=n.min(i + span));
        let k = (usize::BITS - 1 - (j - i + 1).leading_zeros()) as usize;
        let (x, y) = (table[k][i - 1], table[k][j + 1 - (1 << k) - 1]);
        let expected = if a[y - 1] < a[x - 1] { y } else { x };
        assert_eq!(idx.query(i, j).unwrap(), expected);
    }
}

#[test]
fn runs_equal_dyck_peaks() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    for i in 0..1000 {
        let n = rng.gen_range(1..=300);
        let range = [2i64, 10, 1 << 40][i % 3];
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..range)).collect();
        let t = cartesian_tree(&a).unwrap();
        let bp = inorder_bp(&t);
        assert_eq!(bp.len(), 2 * n);
        assert_eq!(dyck_peaks(&bp).unwrap(), runs_profile(&a).unwrap().r, "{a:?}");
    }
}

#[test]
fn node_types_track_runs() {
    // b + u_l + 1 = r, with u_l = s ± 1, leaves = r - s ± 1, u_r = n - 2r + s ± 1
    let mut rng = ChaCha8Rng::seed_from_u64(203);
    for i in 0..500 {
        let n = rng.gen_range(1..=200);
        let a: Vec<i64> = (0..n).map(|_| rng.gen_range(0..[3i64, 1000][i % 2])).collect();
        let p = runs_profile(&a).unwrap();
        let t = cartesian_tree(&a).unwrap();
        let (mut b, mut ul, mut ur, mut leaves) = (0i64, 0i64, 0i64, 0i64);
        for v in 1..=n {
            match (t.left(v) != NIL, t.right(v) != NIL) {
                (true, true) => b += 1,
                (true, false) => ul += 1,
                (false, true) => ur += 1,
                (false, false) => leaves += 1,
            }
        }
        let (r, s, n) = (p.r as i64, p.s as i64, n as i64);
        assert_eq!(b + ul + 1, r);
        assert!((ul - s).abs() <= 1);
        assert!((leaves - (r - s)).abs() <= 1);
        assert!((ur - (n - 2 * r + s)).abs() <= 1);
        assert!(p.s <= p.r && p.r as i64 <= n);
    }
}

#[test]
fn runs_bound_type_entropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(204);
    let n = 100_000;
    for r in [1, n / 100, n / 10, n / 2] {
        let a = array_with_runs(n, r, &mut rng);
        let p = runs_profile(&a).unwrap();
        assert_eq!(p.r, r);
        let h = type_entropy(&cartesian_tree(&a).unwrap(), 0).unwrap();
        let bound = 2.0 * lg_binom(n, r) + 5.0 * (n as f64).log2();
        assert!(h <= bound, "r={r}: {h} > {bound}");
        assert!((p.bound_bits - 2.0 * lg_binom(n, r)).abs() < 1e-9);
        assert!(p.narayana_bits <= p.bound_bits);
    }
}

#[test]
fn narayana_values() {
    // N(n, r) by counting Dyck words with r peaks
    for n in 1..=10usize {
        let mut counts = vec![0u64; n + 1];
        for w in 0u32..(1 << (2 * n)) {
            let mut e = 0i32;
            let mut ok = true;
            let mut peaks = 0;
            let mut prev = false;
            for k in (0..2 * n).rev() {
                let open = w >> k & 1 == 1;
                e += if open { 1 } else { -1 };
                if e < 0 {
                    ok = false;
                    break;
                }
                peaks += usize::from(prev && !open);
                prev = open;
            }
            if ok && e == 0 {
                counts[peaks] += 1;
            }
        }
        for r in 1..=n {
            assert!((narayana_lg(n, r) - (counts[r] as f64).log2()).abs() < 1e-9, "N({n}, {r})");
        }
    }
    assert!((narayana_lg(4, 2) - 6f64.log2()).abs() < 1e-9);
    assert_eq!(narayana_lg(5, 0), f64::NEG_INFINITY);
    let big = narayana_lg(1_000_000_000, 1000);
    assert!(big.is_finite() && big > 0.0);
}

#[test]
fn parse_arrays() {
    assert_eq!(parse_array(" 3 -1\n7\t0 ").unwrap(), vec![3, -1, 7, 0]);
    assert_eq!(parse_array("").unwrap(), Vec::<i64>::new());
    assert!(parse_array("1 2 x").is_err());
    assert!(parse_array("99999999999999999999").is_err());
    assert!(rmq_build::<i64>(&[]).is_err());
    assert!(runs_profile::<i64>(&[]).is_err());
}
