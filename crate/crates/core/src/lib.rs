//! Finite-truncation quantum metric geometry of crossed products `A ⋊ Γ` by
//! groups of polynomial growth.
//!
//! The crate works with finite-dimensional base spectral triples, matrix
//! valued length functions on a group and finitely supported crossed-product
//! elements. Every operator norm is computed on a compression of the
//! covariant representation to a word-metric ball, which yields monotone
//! lower bounds that converge as the ball grows.

pub mod error;
pub mod base;
pub mod berezin;
pub mod crossed;
pub mod group;
pub mod length;
pub mod mk;
pub mod numerics;
pub mod seminorm;

pub use error::{Error, Result};
pub use group::{Ball, GroupElement, GroupFamily, GroupModel};
pub use numerics::{CMat, CVec};
