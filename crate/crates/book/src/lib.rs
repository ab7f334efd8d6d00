//! Book chapters as doc tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/spaces.md")]
pub mod spaces {}
#[doc = include_str!("../../../book/src/peirce.md")]
pub mod peirce {}
#[doc = include_str!("../../../book/src/distance.md")]
pub mod distance {}
#[doc = include_str!("../../../book/src/normed.md")]
pub mod normed {}
#[doc = include_str!("../../../book/src/dual_ball.md")]
pub mod dual_ball {}
#[doc = include_str!("../../../book/src/detour.md")]
pub mod detour {}
#[doc = include_str!("../../../book/src/exp.md")]
pub mod exp {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
