//! Latent semantic analysis written as a Hilbert-space problem.
//!
//! The crate is organised bottom-up:
//!
//! * [`corpus`] turns raw text into a labelled term-document count matrix.
//! * [`spectral`] provides a cyclic Jacobi eigensolver, an SVD built on the
//!   eigendecomposition of `AᵀA`, rank-k truncation and square embeddings.
//! * [`semantic`] wraps a text operator with its density operators
//!   `ρ = AAᵀ` and `N = AᵀA`, word and sentence vectors, cosines, the
//!   supercharge `Q` and diagonal purification.
//! * [`fock`] is a graded tensor algebra over a word space (phrases as
//!   tensors, role-filler binding, symmetric projections, circular convolution).
//! * [`bell`] encodes CHSH measurement records as 16-letter texts and scores
//!   them, with quantum and classical sources.
//!
//! Batch workloads (simulation, scoring, similarity matrices, batched
//! decompositions) take an [`Execution`] policy. With the `parallel` feature
//! (on by default) they run on rayon; without it every policy runs
//! sequentially. Results are identical either way.

pub mod bell;
pub mod corpus;
pub mod exec;
pub mod fock;
pub mod format;
pub mod semantic;
pub mod spectral;

pub use exec::Execution;

/// Dense real matrix used throughout the crate.
pub type Matrix = ndarray::Array2<f64>;
