//! The long-form guide, mirrored from `book/src/`.
//!
//! Each chapter of the mdbook is included here as module documentation so
//! every code sample in the book compiles and runs under `cargo test --doc`.
//! The book and the doctests can never drift apart: they are the same files.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
