//! The chapters of the guide in `book/`, included so that `cargo test` runs
//! their code samples.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/greedylr.md")]
pub mod greedylr {}

#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}

#[doc = include_str!("../../../book/src/problems.md")]
pub mod problems {}

#[doc = include_str!("../../../book/src/noise.md")]
pub mod noise {}

#[doc = include_str!("../../../book/src/theory.md")]
pub mod theory {}

#[doc = include_str!("../../../book/src/robustness.md")]
pub mod robustness {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
