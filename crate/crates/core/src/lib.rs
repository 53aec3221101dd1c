//! Symmetric group testing.
//!
//! The ternary observation algebra ([`ternary`]), per-test mutual
//! information for asymmetric, symmetric and two-threshold tests ([`info`]),
//! the `alpha` design criterion and its optimizer ([`alpha`]), test-count and
//! Lovász-local-lemma code-size bounds ([`bounds`]), exhaustive verifiers and
//! the BCH construction for symmetric superimposed codes ([`codes`],
//! [`gf2m`]), decoders ([`decode`]) and a seeded Monte Carlo harness
//! ([`sim`]).
//!
//! The crate is `no_std` and needs only `alloc`.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

mod error;
pub mod alpha;
pub mod bounds;
pub mod codes;
pub mod decode;
pub mod gf2m;
pub mod info;
pub mod optimize;
pub mod precise;
pub mod sim;
pub mod ternary;

pub use error::{Error, Result};
pub use info::{Family, ModelKind, PartitionIndex, TestModel};
pub use ternary::{
    is_included, tern_add, word_sum, BinaryWord, CodeMatrix, SubjectSet, TernarySymbol, TernaryWord,
};
