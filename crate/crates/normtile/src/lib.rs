//! Normal tilings at desk scale.
//!
//! A tiling is *normal* when every tile `T` has a centre `c` with
//! `B(c, r) ⊂ T ⊂ B(c, R)` for constants `0 < r < R` shared by all tiles.
//! This crate builds such tilings in finite-dimensional normed spaces and
//! checks them by sampling:
//!
//! | module | builds |
//! |---|---|
//! | [`space`] | norms, duality maps, basis projections, modulus of convexity |
//! | [`nets`] | greedy separated nets, biorthogonal and norming families |
//! | [`voronoi`] | Voronoi cells in any norm and their starshaped correction |
//! | [`strip`] | the planar five-tile system with exact rational checks |
//! | [`schauder`] | the layered starshaped tiling of a space with a basis |
//! | [`sphere`] | slice tilings of the unit sphere of a uniformly convex space |
//! | [`body`] | slice peeling of convex bodies |
//! | [`mazur`] | the Mazur map and transport of tilings to the ℓ₁ ball |
//! | [`verify`] | coverage, disjoint interiors and radius certification |
//!
//! Every construction implements [`tiling::Tiling`], so the harness in
//! [`verify`] runs unchanged on all of them. The runnable programs under
//! `examples/` walk through each construction; the `tile` binary wraps the
//! same calls behind a command line (see [`cli`]).

pub mod body;
pub mod cli;
pub mod mazur;
pub mod nets;
pub mod sampling;
pub mod schauder;
pub mod space;
pub mod sphere;
pub mod strip;
pub mod svg;
pub mod tiling;
pub mod verify;
pub mod voronoi;

pub use space::{Functional, NormKind, NormedSpace};
pub use tiling::{Chart, Domain, Membership, Tiling};
