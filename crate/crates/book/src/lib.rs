//! The guide under `book/`, compiled so its snippets run as doc-tests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/fidelity.md")]
pub mod fidelity {}

#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod dynamics {}

#[doc = include_str!("../../../book/src/interference.md")]
pub mod interference {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
