//! Effective-size measures for the micro-macro state.

mod covariance;
mod sizes;
mod subgroup;

pub use covariance::{
    certify_max_local_variance, covariance_matrix, max_local_variance, CovarianceMatrix,
    ExactVarianceCertificate, LocalVarianceOptimum, StateRef, VarianceMethod,
};
pub use sizes::{
    effective_sizes, korsbakken_effective_size, marquardt_check, EffectiveSizeReport,
    KorsbakkenResult, MarquardtCertificate, DEFAULT_KORSBAKKEN_THRESHOLD,
};
pub use subgroup::{
    asymptotic_drop_probability, asymptotic_keep_probability, exact_difference_chain,
    subgroup_curve, subgroup_success_probability, SubgroupMode, SubgroupResult,
    EXACT_FALLBACK_MAX_N,
};
