//! The book chapters, compiled as doctests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/protocol.md")]
pub mod protocol {}

#[doc = include_str!("../../../book/src/hypotheses.md")]
pub mod hypotheses {}

#[doc = include_str!("../../../book/src/offline.md")]
pub mod offline {}

#[doc = include_str!("../../../book/src/predictors.md")]
pub mod predictors {}

#[doc = include_str!("../../../book/src/aggregate.md")]
pub mod aggregate {}

#[doc = include_str!("../../../book/src/learners.md")]
pub mod learners {}

#[doc = include_str!("../../../book/src/adversary.md")]
pub mod adversary {}

#[doc = include_str!("../../../book/src/harness.md")]
pub mod harness {}
