//! Guide chapters, compiled as doc-tests.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}

#[doc = include_str!("../../../book/src/metric.md")]
pub mod metric {}

#[doc = include_str!("../../../book/src/flow.md")]
pub mod flow {}

#[doc = include_str!("../../../book/src/subprincipal.md")]
pub mod subprincipal {}

#[doc = include_str!("../../../book/src/de-sitter.md")]
pub mod de_sitter {}

#[doc = include_str!("../../../book/src/constraints.md")]
pub mod constraints {}

#[doc = include_str!("../../../book/src/nash-moser.md")]
pub mod nash_moser {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
