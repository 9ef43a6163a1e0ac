//! The chapters of `book/` as modules, so `cargo test` runs their code
//! blocks as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/elliptic.md")]
pub mod elliptic {}

#[doc = include_str!("../../../book/src/cn_algebra.md")]
pub mod cn_algebra {}

#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}

#[doc = include_str!("../../../book/src/solver.md")]
pub mod solver {}

#[doc = include_str!("../../../book/src/residuals.md")]
pub mod residuals {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
