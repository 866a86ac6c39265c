//! Quasi-isometric embeddings of hyperbolic approximations of finite doubling
//! metric spaces into finite products of bounded-valence trees.
//!
//! The pipeline runs in stages, one module each:
//!
//! 1. [`metric_space`]: exact finite metric spaces, sample generators, nets.
//! 2. [`hyper_approx`]: the levelled approximation graph and its geodesic checks.
//! 3. [`coverings`]: colored covering sequences with a complete validator.
//! 4. [`trees`]: levelled trees, color trees and the binary re-encoding.
//! 5. [`tree_embed`]: the maps into color trees and their distortion bounds.
//! 6. [`diary`] and [`morse_thue`]: the page codec and its decoration.
//! 7. [`labelling`]: edge words, diary maps and the composed embedding.
//!
//! [`pipeline`] wires the stages together for the `embed` binary.

pub mod coverings;
pub mod diary;
pub mod error;
pub mod hyper_approx;
pub mod labelling;
pub mod metric_space;
pub mod morse_thue;
pub mod pipeline;
pub mod rational;
pub mod report;
pub mod suites;
pub mod tree_embed;
pub mod trees;

pub use error::{DiaryError, Error, MetricViolation, Result};
pub use rational::Rational;
