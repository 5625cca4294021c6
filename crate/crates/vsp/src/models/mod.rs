//! Seeded generators for the model families the toolkit estimates, plus
//! the analytic moment and kurtosis machinery used to decide when a model
//! is identifiable by the rotation step.

pub mod dist;
pub mod factor;
pub mod lda;
pub mod moments;
pub mod sbm;
pub mod specfile;

pub use dist::{DistributionSpec, Family, RawMoments};
pub use factor::{generate_factor_model, FactorModelSpec, FactorSample, NoiseFamily};
pub use lda::{generate_lda, LdaSample, LdaSpec};
pub use moments::{
    analytic_kurtosis, analytic_kurtosis_component, compute_density, compute_density_dense,
    kurtosis_of_sparse, kurtosis_of_sum, sample_kurtosis, Density, SparseKurtosis, SumKurtosis,
};
pub use sbm::{
    generate_dcsbm, generate_mixed_membership, generate_overlapping, DcSbmSpec,
    MixedMembershipSpec, OverlapSpec, SbmSample,
};
pub use specfile::{parse_distribution, parse_model_spec, ModelKind, ModelSpec};
