//! Tree sources: probabilities, samplers, empirical entropies, counting DPs
//! and the depth-first arithmetic code.

mod arith;
mod entropy;
mod fixed_height;
mod fixed_size;
mod ordinal;
mod subclass;
mod types;
mod util;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

pub use arith::{dfs_arith_decode, dfs_arith_decode_from, dfs_arith_encode, dfs_code_length};
pub use entropy::{
    bst_entropy_closed_form, bst_entropy_limit, bst_entropy_limit_with_error, for_each_binary_tree, for_each_dyck_word,
    for_each_ordinal_tree, subtree_size_entropy, EXHAUSTIVE_MAX,
};
pub use fixed_height::{avl_height_counts, AvlByHeight};
pub use fixed_size::{monotonicity_violation, remy, SplitSource};
pub use ordinal::{degree_entropy, lrm_tree, shape_counts, shape_entropy, tree_from_degrees, DegreeDist, OrdinalSplit};
pub use subclass::{
    count_subclass, count_subclass_upto, in_subclass, sample_subclass, shape_multiplicity, subclass_log_prob, Subclass,
};
pub use types::{empirical_type_process, histories, type_counts, type_entropy, TypeProcess};
pub use util::{big_lg, lg_binom};

use crate::error::{Error, Result};
use crate::tree::{AnyTree, BinaryTree, TreeRef};

/// Every supported tree source.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceModel {
    TypeProcess(TypeProcess),
    FixedSize(SplitSource),
    /// Uniform AVL trees of a given height.
    FixedHeight(AvlByHeight),
    Degree(DegreeDist),
    OrdinalFixedSize(OrdinalSplit),
    UniformSubclass(Subclass),
}

/// `lg(1/P[t])` and its per-node value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyReport {
    pub log_prob_bits: f64,
    pub per_node: f64,
}

impl EntropyReport {
    pub fn new(bits: f64, n: usize) -> Self {
        let per_node = if n == 0 { 0.0 } else { bits / n as f64 };
        EntropyReport { log_prob_bits: bits, per_node }
    }
}

/// What a sample is conditioned on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Size(usize),
    Height(usize),
}

impl SourceModel {
    pub fn is_binary(&self) -> bool {
        !matches!(self, SourceModel::Degree(_) | SourceModel::OrdinalFixedSize(_))
    }

    /// Whether samples are drawn for a height rather than a size.
    pub fn takes_height(&self) -> bool {
        matches!(self, SourceModel::FixedHeight(_))
    }

    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceModel::TypeProcess(p) if p.k == 0 && *p == TypeProcess::motzkin() => write!(f, "motzkin"),
            SourceModel::TypeProcess(p) if p.k == 0 => {
                let q = p.tau[0];
                write!(f, "memoryless:{},{},{},{}", q[0], q[1], q[2], q[3])
            }
            SourceModel::TypeProcess(p) => write!(f, "typeprocess(k={})", p.k),
            SourceModel::FixedSize(s) => write!(f, "{}", s.name()),
            SourceModel::FixedHeight(_) => write!(f, "avl-height"),
            SourceModel::Degree(d) => {
                let parts: Vec<String> = d.d.iter().map(|x| x.to_string()).collect();
                write!(f, "degree:{}", parts.join(","))
            }
            SourceModel::OrdinalFixedSize(o) => write!(f, "{}", o.name()),
            SourceModel::UniformSubclass(c) => write!(f, "{}", c.name()),
        }
    }
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::InvalidArgument(format!("bad number '{x}'"))))
        .collect()
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse::<T>().map_err(|_| Error::InvalidArgument(format!("bad {what} '{s}'")))
}

impl FromStr for SourceModel {
    type Err = Error;

    /// Descriptors: `bst`, `uniform`, `binomial:A`, `almostpath:K`, `fringebalanced:T`,
    /// `avl-size`, `avl-height`, `llrb`, `wb:P/Q`, `motzkin`, `memoryless:q0,q1,q2,q3`,
    /// `degree:d0,d1,…`, `composition`, `lrm`.
    fn from_str(desc: &str) -> Result<Self> {
        let lower = desc.trim().to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (lower.as_str(), None),
        };
        let need = |what: &str| arg.ok_or_else(|| Error::InvalidArgument(format!("source '{head}' needs {what}")));
        let model = match head {
            "bst" => SourceModel::FixedSize(SplitSource::Bst),
            "uniform" => SourceModel::FixedSize(SplitSource::Uniform),
            "binomial" => {
                let a: f64 = parse_num(need("a bias")?, "bias")?;
                if !(0.0..=1.0).contains(&a) {
                    return Err(Error::InvalidArgument(format!("bias {a} outside [0, 1]")));
                }
                SourceModel::FixedSize(SplitSource::Binomial(a))
            }
            "almostpath" => SourceModel::FixedSize(SplitSource::AlmostPath(parse_num(need("K")?, "K")?)),
            "fringebalanced" => SourceModel::FixedSize(SplitSource::FringeBalanced(parse_num(need("t")?, "t")?)),
            "avl-size" => SourceModel::UniformSubclass(Subclass::AvlBySize),
            "avl-height" => SourceModel::FixedHeight(AvlByHeight),
            "llrb" => SourceModel::UniformSubclass(Subclass::LeftLeaningRedBlack),
            "wb" => {
                let (p, q) = need("a ratio P/Q")?.split_once('/').ok_or_else(|| Error::InvalidArgument("weight ratio must be P/Q".into()))?;
                let (num, den): (u64, u64) = (parse_num(p, "numerator")?, parse_num(q, "denominator")?);
                if den == 0 || num > den {
                    return Err(Error::InvalidArgument(format!("weight ratio {num}/{den} outside [0, 1]")));
                }
                SourceModel::UniformSubclass(Subclass::WeightBalanced { num, den })
            }
            "motzkin" => SourceModel::TypeProcess(TypeProcess::motzkin()),
            "memoryless" => {
                let q = parse_f64_list(need("four type probabilities")?)?;
                let q: [f64; 4] = q.try_into().map_err(|_| Error::InvalidArgument("memoryless needs four probabilities".into()))?;
                SourceModel::TypeProcess(TypeProcess::memoryless(q)?)
            }
            "degree" => SourceModel::Degree(DegreeDist::new(parse_f64_list(need("degree probabilities")?)?)?),
            "composition" => SourceModel::OrdinalFixedSize(OrdinalSplit::Composition),
            "lrm" => SourceModel::OrdinalFixedSize(OrdinalSplit::Lrm),
            _ => return Err(Error::InvalidArgument(format!("unknown source '{desc}'"))),
        };
        if arg.is_some() && matches!(head, "bst" | "uniform" | "avl-size" | "avl-height" | "llrb" | "motzkin" | "composition" | "lrm") {
            return Err(Error::InvalidArgument(format!("source '{head}' takes no parameter")));
        }
        Ok(model)
    }
}

fn kind_error(s: &SourceModel) -> Error {
    Error::KindMismatch { expected: if s.is_binary() { "binary" } else { "ordinal" } }
}

/// `lg(1/P[t])` under `s`; `+inf` when `t` has probability zero.
pub fn log_prob<'a>(s: &SourceModel, t: impl Into<TreeRef<'a>>) -> Result<EntropyReport> {
    let t = t.into();
    let bits = match (s, t) {
        (SourceModel::TypeProcess(p), TreeRef::Binary(b)) => p.log_prob(b),
        (SourceModel::FixedSize(p), TreeRef::Binary(b)) => p.log_prob(b),
        (SourceModel::FixedHeight(p), TreeRef::Binary(b)) => p.log_prob(b),
        (SourceModel::UniformSubclass(c), TreeRef::Binary(b)) => subclass_log_prob(*c, b),
        (SourceModel::Degree(d), TreeRef::Ordinal(o)) => d.log_prob(o),
        (SourceModel::OrdinalFixedSize(p), TreeRef::Ordinal(o)) => p.log_prob(o),
        _ => return Err(kind_error(s)),
    };
    Ok(EntropyReport::new(bits, t.len()))
}

/// Expansion budget for rejection samplers, per requested node.
pub const REJECTION_BUDGET_FACTOR: usize = 100;

/// Draws a tree from `s` conditioned on `target`.
///
/// Branching processes (type processes, degree distributions) have no size
/// parameter; for `Target::Size(n)` they are conditioned by rejection on a size
/// in `[⌈n/2⌉, n]`.
pub fn sample<R: Rng + ?Sized>(s: &SourceModel, target: Target, rng: &mut R) -> Result<AnyTree> {
    let wrong = |what: &str| Error::InvalidArgument(format!("source {s} is not sampled by {what}"));
    let t = match (s, target) {
        (SourceModel::FixedHeight(p), Target::Height(h)) => AnyTree::Binary(p.sample(h, rng)?),
        (SourceModel::FixedHeight(_), Target::Size(_)) => return Err(wrong("size")),
        (_, Target::Height(_)) => return Err(wrong("height")),
        (SourceModel::FixedSize(p), Target::Size(n)) => AnyTree::Binary(p.sample(n, rng)?),
        (SourceModel::UniformSubclass(c), Target::Size(n)) => AnyTree::Binary(sample_subclass(*c, n, rng)?),
        (SourceModel::OrdinalFixedSize(p), Target::Size(n)) => AnyTree::Ordinal(p.sample(n, rng)?),
        (SourceModel::TypeProcess(p), Target::Size(n)) => {
            AnyTree::Binary(p.sample(n.div_ceil(2).max(1), n, REJECTION_BUDGET_FACTOR * n.max(1), rng)?)
        }
        (SourceModel::Degree(d), Target::Size(n)) => {
            AnyTree::Ordinal(d.sample(n.div_ceil(2).max(1), n, REJECTION_BUDGET_FACTOR * n.max(1), rng)?)
        }
    };
    Ok(t)
}

/// `H_n = Σ_{|t| = n} P[t] lg(1/P[t])` by enumerating every tree of size `n`
/// (of height `n` for fixed-height sources).
///
/// Branching processes are not distributions over a fixed size and are rejected.
pub fn source_entropy_exhaustive(s: &SourceModel, n: usize) -> Result<f64> {
    entropy::check_budget(n)?;
    let mut bits = Vec::new();
    match s {
        SourceModel::FixedSize(p) => for_each_binary_tree(n, |t| bits.push(p.log_prob(t))),
        SourceModel::UniformSubclass(c) => for_each_binary_tree(n, |t| bits.push(subclass_log_prob(*c, t))),
        SourceModel::OrdinalFixedSize(p) => for_each_ordinal_tree(n, |t| bits.push(p.log_prob(t))),
        SourceModel::FixedHeight(p) => {
            // AVL trees of height h have at most 2^h - 1 nodes
            let max = (1usize << n.min(usize::BITS as usize - 1)) - 1;
            entropy::check_budget(max).map_err(|_| Error::BudgetExceeded(format!("height {n} is too large to enumerate")))?;
            let min = n;
            for size in min..=max {
                for_each_binary_tree(size, |t| {
                    if !t.is_empty() && crate::tree::annotate_binary(t).height[1] == n {
                        bits.push(p.log_prob(t));
                    }
                });
            }
            if n == 0 {
                bits.push(0.0);
            }
        }
        SourceModel::TypeProcess(_) | SourceModel::Degree(_) => {
            return Err(Error::InvalidArgument(format!("source {s} has no fixed-size distribution")))
        }
    }
    let (h, mass) = entropy::entropy_from_bits(bits);
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidArgument(format!("probabilities of size-{n} trees sum to {mass}")));
    }
    Ok(h)
}

/// `Σ_i lg(1/P[μ_i])` for a list of micro-tree shapes.
pub fn sum_log_prob(s: &SourceModel, shapes: &[BinaryTree]) -> Result<f64> {
    let mut acc = 0.0;
    for t in shapes {
        acc += log_prob(s, t)?.log_prob_bits;
    }
    Ok(acc)
}
