//! Structure of the multiple-holomorph quotient T(G) for finite p-groups of
//! class two presented by power-commutator data, p odd.
//!
//! The crate has two independent routes to the same objects and checks them
//! against each other:
//!
//! - the linear route: bilinear forms `G/G' × G/G' -> G'`, circle group
//!   operations, the lifting criterion `A^{-1}·D·Â = D·T^{-1}`, and the
//!   `(Q, A, M)` parametrization of the anti-symmetric part of T(G)
//!   ([`forms`], [`tg`]);
//! - the brute-force route: the group as permutations, automorphisms found
//!   by generator-image search, the holomorph assembled explicitly, and
//!   regular normal subgroups checked definitionally ([`oracle`]).
//!
//! Matrices act on row vectors from the right everywhere, so composition of
//! maps reads left to right as a matrix product.

// index loops over several arrays at once read better than zipped iterators
// in the arithmetic kernels
#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod forms;
pub mod group;
pub mod linalg;
pub mod oracle;
pub mod selftest;
pub mod tg;

pub use error::{Error, Result};
pub use forms::{BilinearForm, PairForm, SigmaEndo};
pub use group::{GroupElement, GroupSpec};
pub use linalg::FpMatrix;

/// How thoroughly a verifier walks a pair/triple space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    Exhaustive,
    Random { pairs: usize, seed: u64 },
}

impl Sampling {
    /// Exhaustive up to `|G| <= 729`, otherwise 10^4 seeded random pairs.
    pub fn default_for(spec: &GroupSpec) -> Self {
        match spec.order_u128() {
            Some(order) if order <= 729 => Sampling::Exhaustive,
            _ => Sampling::Random { pairs: 10_000, seed: 0xC0FFEE },
        }
    }
}
