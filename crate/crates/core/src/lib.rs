//! Certification of fixed points of the DeGroot-Friedkin self-confidence map
//! on the unit simplex via local Lefschetz indices.
//!
//! The pipeline is: build [`DfMap`] from [`InfluenceWeights`] (given directly or
//! derived from an [`InteractionMatrix`]), enumerate fixed points with
//! [`enumerate_fixed_points`], classify each with [`stability_report`], and
//! assemble a [`LefschetzCertificate`] with [`certify`].

pub mod certify;
pub mod df_map;
pub mod graph;
pub mod jacobian;
pub mod linalg;
pub mod parallel;
pub mod simplex;
pub mod solver;

pub use certify::{
    certify, certify_many, corner_spectrum, rate_estimate, stability_report, CertifyError, CornerReport,
    CornerSpectrum, LefschetzCertificate, RateEstimate, Stability, StabilityReport, Verdict,
};
pub use df_map::{AmbientMap, DfMap, Homotopy, Trajectory};
pub use graph::{gamma_from_matrix, validate_connectivity, GraphError, InteractionMatrix};
pub use jacobian::{
    finite_difference_jacobian, fixed_point_jacobian, full_jacobian, reduced_jacobian, FullJacobian, JacobianError,
    ReducedJacobian,
};
pub use linalg::{
    df_spectrum_via_symmetrization, linear_solve, signed_det, split_zero_eigenvalue, symmetric_eigen,
    symmetric_eigenvalues, LinalgError, SignedDeterminant, SymmetricSpectrum,
};
pub use parallel::Execution;
pub use simplex::{
    permute, sample_interior, InfluenceWeights, Permutation, ShrunkenSimplex, SimplexError, SimplexPoint,
};
pub use solver::{
    enumerate_fixed_points, newton_refine, picard_solve, Enumeration, FixedPointRecord, PicardOutcome, Refinement,
    SolverConfig, SolverError,
};
