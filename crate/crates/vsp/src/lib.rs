//! Sparse factor analysis by the rotate-the-singular-vectors recipe:
//! center and/or scale a sparse matrix implicitly, take a seeded
//! randomized truncated SVD, rotate both singular-vector blocks to
//! maximize the Varimax criterion, and post-process (reorder, sign-fix,
//! recenter, rescale) so the factors are directly interpretable.
//!
//! The crate also ships the surrounding lab bench: generators for the
//! blockmodel / topic-model / factor-model families the method provably
//! estimates, kurtosis machinery for checking when a model is
//! identifiable, an alignment-and-error harness, and batch diagnostics.
//!
//! All numerics are f64. Every randomized routine takes an explicit
//! 64-bit seed and is bit-reproducible at a fixed thread count; the
//! linear-algebra path draws its randomness from SplitMix64 (see
//! [`rng`]), so decompositions reproduce across platforms.

pub mod dense;
pub mod error;
pub mod eval;
pub mod io;
pub mod models;
pub mod pipeline;
pub mod rng;
pub mod sparse;
pub mod svd;
pub mod varimax;

pub use dense::Mat;
pub use error::{Error, Result};
pub use pipeline::{recenter, run_vsp, VspConfig, VspResult};
pub use sparse::{
    build_operator, centered_matvec, centered_rmatvec, centering_stats_of_base,
    compute_centering_stats, compute_scaling_stats, materialize_dense, CenterMode, CenteringStats,
    LinearOperator, RowBuilder, ScalingStats, SparseMatrix,
};
pub use svd::{dense_svd_oracle, truncated_svd, SvdResult};
pub use varimax::{
    apply_sign_convention, enumerate_signed_permutations, solve_varimax, solve_varimax_detailed,
    varimax_objective, RotationMatrix, SignedPermutation, VarimaxParams, VarimaxSolve,
};
