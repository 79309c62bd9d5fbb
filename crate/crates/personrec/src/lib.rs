//! Person recommendation for social platforms, plus an evaluation harness
//! that measures how well each recommender reproduces held-out friendships.
//!
//! The crate has three layers:
//!
//! - data model: an immutable undirected friendship graph ([`graph`]) and
//!   per-user normalized category-activity interest vectors ([`interest`]);
//! - recommenders ([`recommend`]): random, interest similarity (cosine or
//!   Pearson), friend-of-friend, and "plus link" hybrids that boost interest
//!   scores when a pair shares a friend;
//! - evaluation ([`eval`]): k-fold friendship-edge holdout with per-user skip
//!   rules and precision / recall / f-measure accounting.
//!
//! [`gen`] provides a seeded synthetic dataset generator (interest homophily
//! plus triadic closure) for desk-scale experiments, and [`io`] / [`config`] /
//! [`cli`] cover file formats and the command-line front end.
//!
//! Numeric kernels are generic over the scalar type (any [`num::Scalar`],
//! i.e. `f32` or `f64`); the aliases below fix `f64` for pipeline use.

pub mod cli;
pub mod config;
pub mod error;
pub mod eval;
pub mod gen;
pub mod graph;
pub mod interest;
pub mod io;
pub mod num;
pub mod recommend;

pub use error::{Error, Result};
pub use graph::{SocialGraph, UserId};

/// Interest profile with the default `f64` scalar.
pub type Profile = interest::InterestProfile<f64>;
/// User-to-profile map with the default `f64` scalar.
pub type Profiles = std::collections::BTreeMap<UserId, Profile>;
/// Action-kind weights with the default `f64` scalar.
pub type Weights = interest::ActionWeights<f64>;
/// Recommendation parameters with the default `f64` scalar.
pub type Params = recommend::RecommendParams<f64>;
/// Scored candidate with the default `f64` scalar.
pub type Scored = recommend::ScoredCandidate<f64>;
