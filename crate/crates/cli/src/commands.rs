use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use hypersuccinct::hypercodec::{hs_decode, hs_encode, space_report, HsBlob, SpaceReport, TreeKind};
use hypersuccinct::rmq::{cartesian_tree, dyck_peaks, inorder_bp, parse_array, runs_profile, RmqIndex};
use hypersuccinct::sources::{
    degree_entropy, dfs_code_length, log_prob, sample, shape_entropy, subtree_size_entropy, type_entropy,
    SourceModel, Target,
};
use hypersuccinct::tree::{AnyTree, BinaryTree, OrdinalTree, TreeRef};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Command, Failure, Kind, RmqAction, SourceArg, TargetArgs};

type Outcome<T> = Result<T, Failure>;

fn input<E: std::fmt::Display>(context: &str) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn read_input(path: &Path) -> Outcome<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map_err(input("stdin"))?;
        return Ok(buf);
    }
    fs::read(path).map_err(input(&path.display().to_string()))
}

fn read_text(path: &Path) -> Outcome<String> {
    String::from_utf8(read_input(path)?).map_err(|_| Failure::Input(format!("{}: not UTF-8 text", path.display())))
}

fn write_output(path: &Path, data: &[u8]) -> Outcome<()> {
    if path.as_os_str() == "-" {
        return io::stdout().write_all(data).map_err(input("stdout"));
    }
    fs::write(path, data).map_err(input(&path.display().to_string()))
}

fn parse_source(arg: &SourceArg) -> Outcome<SourceModel> {
    arg.source.parse().map_err(|e| Failure::Usage(format!("--source: {e}")))
}

fn check_block(block: Option<usize>) -> Outcome<Option<usize>> {
    match block {
        Some(0) => Err(Failure::Usage("--block must be at least 1".into())),
        b => Ok(b),
    }
}

/// The single BP line of a tree file.
fn read_tree(path: &Path, kind: Kind) -> Outcome<AnyTree> {
    let text = read_text(path)?;
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let line = lines.next().unwrap_or("");
    if lines.next().is_some() {
        return Err(Failure::Input(format!("{}: expected exactly one BP line", path.display())));
    }
    match kind {
        Kind::Binary => BinaryTree::from_bp_str(line).map(AnyTree::Binary),
        Kind::Ordinal => OrdinalTree::from_bp_str(line).map(AnyTree::Ordinal),
    }
    .map_err(input(&path.display().to_string()))
}

fn read_blob(path: &Path) -> Outcome<HsBlob> {
    HsBlob::from_bytes(&read_input(path)?).map_err(input(&path.display().to_string()))
}

fn read_array(path: &Path) -> Outcome<Vec<i64>> {
    let a = parse_array(&read_text(path)?).map_err(input(&path.display().to_string()))?;
    if a.is_empty() {
        return Err(Failure::Input(format!("{}: empty array", path.display())));
    }
    Ok(a)
}

fn target_of(s: &SourceModel, t: &TargetArgs) -> Outcome<Target> {
    match (t.size, t.height) {
        (Some(n), None) if !s.takes_height() => Ok(Target::Size(n)),
        (None, Some(h)) if s.takes_height() => Ok(Target::Height(h)),
        (Some(_), None) => Err(Failure::Usage(format!("source {s} takes --height"))),
        _ => Err(Failure::Usage(format!("source {s} takes --size"))),
    }
}

fn kind_of(s: &SourceModel) -> Kind {
    if s.is_binary() {
        Kind::Binary
    } else {
        Kind::Ordinal
    }
}

/// Non-finite values become `null`.
fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn space_json(r: &SpaceReport) -> Value {
    json!({
        "block": r.block,
        "m": r.m,
        "distinctShapes": r.distinct_shapes,
        "header": r.header,
        "topTier": r.top_tier,
        "codebook": r.codebook,
        "codewords": r.codewords,
        "unrestricted": r.unrestricted,
        "portals": r.portals,
        "edgeTypes": r.edge_types,
        "total": r.total,
        "bitsPerNode": num(r.bits_per_node()),
    })
}

pub fn run(cmd: Command) -> Outcome<()> {
    match cmd {
        Command::Encode { kind, block, input: inp, output } => {
            let block = check_block(block)?;
            let t = read_tree(&inp, kind)?;
            let blob = hs_encode(&t, block).map_err(input(&inp.display().to_string()))?;
            write_output(&output, &blob.to_bytes())
        }
        Command::Decode { input: inp, output } => {
            let blob = read_blob(&inp)?;
            let t = hs_decode(&blob).map_err(input(&inp.display().to_string()))?;
            write_output(&output, format!("{}\n", t.to_bp_string()).as_bytes())
        }
        Command::Sample { source, target, seed, count, out } => {
            let s = parse_source(&source)?;
            let target = target_of(&s, &target)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut text = String::new();
            for _ in 0..count {
                let t = sample(&s, target, &mut rng).map_err(input("sample"))?;
                text.push_str(&t.to_bp_string());
                text.push('\n');
            }
            match out {
                Some(p) => write_output(&p, text.as_bytes()),
                None => write_output(Path::new("-"), text.as_bytes()),
            }
        }
        Command::Analyze { source, order, block, input: inp } => {
            let s = parse_source(&source)?;
            let block = check_block(block)?;
            let t = read_tree(&inp, kind_of(&s))?;
            let report = analyze(&s, &t, order, block).map_err(input(&inp.display().to_string()))?;
            let text = serde_json::to_string_pretty(&report).expect("JSON values serialize");
            write_output(Path::new("-"), format!("{text}\n").as_bytes())
        }
        Command::Rmq { action } => rmq(action),
        Command::Bench { source, sizes, seed, replicates, block, csv } => {
            let s = parse_source(&source)?;
            let block = check_block(block)?;
            let rows = bench(&s, &sizes, seed, replicates, block)?;
            write_output(&csv, &rows)
        }
    }
}

fn analyze(s: &SourceModel, t: &AnyTree, order: usize, block: Option<usize>) -> hypersuccinct::Result<Value> {
    let lp = log_prob(s, t)?;
    let entropies = match t {
        AnyTree::Binary(b) => json!({
            "order": order,
            "type": num(type_entropy(b, order)?),
            "subtreeSize": num(subtree_size_entropy(b)),
        }),
        AnyTree::Ordinal(o) => json!({
            "order": order,
            "degree": num(degree_entropy(o)),
            "shape": num(shape_entropy(o, order)?),
        }),
    };
    let mut v = json!({
        "source": s.name(),
        "kind": if t.is_binary() { "binary" } else { "ordinal" },
        "n": t.len(),
        "logProbBits": num(lp.log_prob_bits),
        "perNode": num(lp.per_node),
        "entropies": entropies,
        "space": space_json(&space_report(t, block)?),
    });
    if let (SourceModel::FixedSize(p), AnyTree::Binary(b)) = (s, t) {
        v["dfsCodeBits"] = num(dfs_code_length(p, b));
    }
    Ok(v)
}

fn rmq(action: RmqAction) -> Outcome<()> {
    match action {
        RmqAction::Build { block, array, output } => {
            let block = check_block(block)?;
            let a = read_array(&array)?;
            let ctx = array.display().to_string();
            let t = cartesian_tree(&a).map_err(input(&ctx))?;
            let blob = hs_encode(&t, block).map_err(input(&ctx))?;
            write_output(&output, &blob.to_bytes())
        }
        RmqAction::Query { index, queries } => {
            let blob = read_blob(&index)?;
            if blob.kind != TreeKind::Binary {
                return Err(Failure::Input(format!("{}: not a binary tree blob", index.display())));
            }
            let idx = RmqIndex::from_blob(&blob).map_err(input(&index.display().to_string()))?;
            let text = read_text(&queries)?;
            let mut out = String::new();
            for (lineno, line) in text.lines().enumerate() {
                let words: Vec<&str> = line.split_whitespace().collect();
                if words.is_empty() {
                    continue;
                }
                let bad = || Failure::Input(format!("query line {}: expected 'i j'", lineno + 1));
                let [i, j] = words[..] else { return Err(bad()) };
                let (i, j) = (i.parse().map_err(|_| bad())?, j.parse().map_err(|_| bad())?);
                let k = idx.query(i, j).map_err(input(&format!("query line {}", lineno + 1)))?;
                out.push_str(&format!("{k}\n"));
            }
            write_output(Path::new("-"), out.as_bytes())
        }
        RmqAction::Runs { array } => {
            let a = read_array(&array)?;
            let p = runs_profile(&a).map_err(input("runs"))?;
            let t = cartesian_tree(&a).map_err(input("runs"))?;
            let peaks = dyck_peaks(&inorder_bp(&t)).map_err(input("runs"))?;
            let h0 = type_entropy(&t, 0).map_err(input("runs"))?;
            let v = json!({
                "n": p.n,
                "r": p.r,
                "s": p.s,
                "boundBits": num(p.bound_bits),
                "narayanaBits": num(p.narayana_bits),
                "dyckPeaks": peaks,
                "typeEntropyBits": num(h0),
            });
            let text = serde_json::to_string_pretty(&v).expect("JSON values serialize");
            write_output(Path::new("-"), format!("{text}\n").as_bytes())
        }
    }
}

pub const BENCH_HEADER: [&str; 19] = [
    "source",
    "target",
    "replicate",
    "seed",
    "n",
    "B",
    "m",
    "bitsTotal",
    "bitsPerNode",
    "header",
    "topTier",
    "codebook",
    "codewords",
    "unrestricted",
    "portals",
    "edgeTypes",
    "codewordBitsPerNode",
    "logProbBits",
    "entropyPerNode",
];

/// Seed of one replicate: the first 8 bytes of SHA-256 over (seed, source, target, replicate).
pub fn replicate_seed(seed: u64, source: &str, target: usize, replicate: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update((source.len() as u64).to_le_bytes());
    h.update(source.as_bytes());
    h.update((target as u64).to_le_bytes());
    h.update((replicate as u64).to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

fn fixed(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.6}")
    } else {
        "inf".into()
    }
}

fn bench(s: &SourceModel, sizes: &[usize], seed: u64, replicates: usize, block: Option<usize>) -> Outcome<Vec<u8>> {
    let name = s.name();
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Failure::Input(format!("csv: {e}"));
    w.write_record(BENCH_HEADER).map_err(csv_err)?;
    for &target in sizes {
        let tgt = if s.takes_height() { Target::Height(target) } else { Target::Size(target) };
        for rep in 0..replicates {
            let rseed = replicate_seed(seed, &name, target, rep);
            let mut rng = ChaCha8Rng::seed_from_u64(rseed);
            let ctx = format!("{name} target {target} replicate {rep}");
            let t = sample(s, tgt, &mut rng).map_err(input(&ctx))?;
            let tref: TreeRef<'_> = (&t).into();
            let r = space_report(tref, block).map_err(input(&ctx))?;
            let lp = log_prob(s, &t).map_err(input(&ctx))?;
            let n = t.len();
            let row = [
                name.clone(),
                target.to_string(),
                rep.to_string(),
                rseed.to_string(),
                n.to_string(),
                r.block.to_string(),
                r.m.to_string(),
                r.total.to_string(),
                fixed(r.total as f64 / n as f64),
                r.header.to_string(),
                r.top_tier.to_string(),
                r.codebook.to_string(),
                r.codewords.to_string(),
                r.unrestricted.to_string(),
                r.portals.to_string(),
                r.edge_types.to_string(),
                fixed(r.codewords as f64 / n as f64),
                fixed(lp.log_prob_bits),
                fixed(lp.per_node),
            ];
            w.write_record(&row).map_err(csv_err)?;
        }
    }
    w.into_inner().map_err(|e| Failure::Input(format!("csv: {e}")))
}
