//! Executable failure, unimodality and uniqueness certificates.

pub mod diagnostics;
pub mod failure;
pub mod gseq;
pub mod pvector;
pub mod uniqueness;

pub use diagnostics::{
    column_coherence, dual_certificate_check, dual_certificate_check_with, sign_transform,
    DualCheck,
};
pub use failure::{
    certify_drastic_failure, certify_unimodality, critical_index, failure_indices, CertRoute,
    CharPoly, FailureCertificate, UnimodalityReport, P_TOL,
};
pub use gseq::{g_sequences, GSequences};
pub use pvector::{p_vector, PEvaluator, PVector, IMAGE_RESIDUAL_TOL};
pub use uniqueness::{
    uniqueness_check, uniqueness_check_with, IndependenceRoute, UniquenessCertificate,
    INDEPENDENCE_CAP,
};
