//! Binary and ordinal trees, BP codecs, FCNS and per-node annotations.

mod annotate;
mod binary;
mod ordinal;

pub use annotate::{annotate_binary, annotate_ordinal, NodeType, TreeAnnotation};
pub use binary::{BinaryTree, NIL};
pub use ordinal::{Forest, OrdinalTree, Siblings};

/// A reference to either kind of tree.
#[derive(Clone, Copy, Debug)]
pub enum TreeRef<'a> {
    Binary(&'a BinaryTree),
    Ordinal(&'a OrdinalTree),
}

impl TreeRef<'_> {
    pub fn len(&self) -> usize {
        match self {
            TreeRef::Binary(t) => t.len(),
            TreeRef::Ordinal(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl<'a> From<&'a BinaryTree> for TreeRef<'a> {
    fn from(t: &'a BinaryTree) -> Self {
        TreeRef::Binary(t)
    }
}

impl<'a> From<&'a OrdinalTree> for TreeRef<'a> {
    fn from(t: &'a OrdinalTree) -> Self {
        TreeRef::Ordinal(t)
    }
}

/// An owned tree of either kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyTree {
    Binary(BinaryTree),
    Ordinal(OrdinalTree),
}

impl AnyTree {
    pub fn as_ref(&self) -> TreeRef<'_> {
        match self {
            AnyTree::Binary(t) => TreeRef::Binary(t),
            AnyTree::Ordinal(t) => TreeRef::Ordinal(t),
        }
    }

    pub fn len(&self) -> usize {
        self.as_ref().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, AnyTree::Binary(_))
    }

    pub fn to_bp_string(&self) -> String {
        match self {
            AnyTree::Binary(t) => t.to_bp_string(),
            AnyTree::Ordinal(t) => t.to_bp_string(),
        }
    }
}

impl<'a> From<&'a AnyTree> for TreeRef<'a> {
    fn from(t: &'a AnyTree) -> Self {
        t.as_ref()
    }
}

pub fn annotate<'a>(t: impl Into<TreeRef<'a>>) -> TreeAnnotation {
    match t.into() {
        TreeRef::Binary(t) => annotate_binary(t),
        TreeRef::Ordinal(t) => annotate_ordinal(t),
    }
}
