//! Selection functions, their controlled products, and the sequential games
//! they solve — together with realizers that turn classical existence
//! theorems into terminating searches with checkable contracts.
//!
//! The layers, bottom up:
//!
//! * [`selection`]: single selection functions, their quantifiers, finite
//!   domains, first-fit search, and the binary product.
//! * [`eps`]: the controlled unbounded product — an evaluator iterating the
//!   binary product along positions until a control functional judges the
//!   play long enough — plus its prefix-consistency and equilibrium checks.
//! * [`games`]: sequential games on top of the product: optimal strategies,
//!   optimality verification, a backward-induction oracle, play traces.
//! * [`realizers`]: computational content of the drinkers paradox,
//!   metastability of monotone sequences, arithmetical comprehension, and
//!   the non-injectivity of maps from sequences to naturals.
//! * [`bw`]: convergent-subsequence approximations for rational sequences in
//!   the unit interval, combining the product with a binary bar recursion.
//! * [`gamefile`] / [`sources`] / [`corpus`]: JSON game files and trace
//!   documents, text sequence sources, and seeded sample generators.

pub mod bw;
pub mod corpus;
pub mod eps;
pub mod error;
pub mod gamefile;
pub mod games;
pub mod realizers;
pub mod selection;
pub mod sources;

pub use error::Error;
