//! Low-noise quantum channels and the Fisher information of their outputs.
//!
//! A low-noise channel is written `Γ_ε[ρ] = Σ_α B_α ρ B_α† + ε Σ_β C_β ρ C_β†`
//! with `B_α(ε)` near the identity. Exact SLD Fisher information with respect
//! to ε is computed in [`fisher`]; the leading `1/ε` coefficient is optimized
//! over inputs in [`optimize`].

pub mod channel;
pub mod error;
pub mod fisher;
pub mod matrix;
pub mod optimize;
pub mod series;
pub mod state;

pub use channel::{
    catalog, load_channel, random_lownoise, CatalogName, LowNoiseChannel, ValidationReport,
};
pub use error::{Error, Result};
pub use fisher::{
    exact_fisher, leading_fisher_nbody, leading_fisher_pure, leading_fisher_reduced, FisherReport,
};
pub use matrix::ComplexMatrix;
pub use optimize::{
    enhancement_factor, factorized_optimum_nbody, maximize_pure, maximize_reduced,
    verify_no_entanglement_gain, EnhancementReport, NoGainReport, OptimizationResult,
};
pub use state::{DensityMatrix, PureState};
