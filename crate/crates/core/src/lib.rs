//! Hypersuccinct trees: tree covering, Huffman-coded micro-tree shapes,
//! tree-source models, a navigation layer and an RMQ index.

pub mod bits;
pub mod cover;
pub mod error;
pub mod hypercodec;
pub mod navigate;
pub mod rmq;
pub mod sources;
pub mod tree;

pub use error::{Error, Result};
