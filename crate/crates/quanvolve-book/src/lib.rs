//! Compiles every code block in the guide (`book/`) as a doc-test.
//!
//! Each chapter is included verbatim as a module's documentation, so
//! `cargo test --doc -p quanvolve-book` runs exactly the snippets a
//! reader sees. A chapter that drifts from the library API fails the
//! build here, not in front of the reader.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/simulator.md")]
pub mod simulator {}

#[doc = include_str!("../../../book/src/gradients.md")]
pub mod gradients {}

#[doc = include_str!("../../../book/src/templates.md")]
pub mod templates {}

#[doc = include_str!("../../../book/src/quanvolution.md")]
pub mod quanvolution {}

#[doc = include_str!("../../../book/src/colorspaces.md")]
pub mod colorspaces {}

#[doc = include_str!("../../../book/src/data.md")]
pub mod data {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}

#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
