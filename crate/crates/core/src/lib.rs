//! Certification of density operators.
//!
//! Hermitian matrices, integral kernels and Wigner functions on a phase-space
//! grid are tested against a family of positivity and purity criteria built
//! from power series in the operator itself. A spectral oracle (Jacobi
//! diagonalisation) is kept alongside for cross-checking.

pub mod criteria;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod phase;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod spectral;

pub use criteria::StateVerdict;
pub use error::{CertError, Result};
pub use kernel::Kernel;
pub use linalg::{ConvergenceReport, ConvergenceStatus, Matrix, ToleranceConfig};
pub use phase::{GridSpec, OrthogonalMixture, PhaseGrid};
pub use report::{Check, CriterionId, CriterionReport, Outcome, Verdict};
pub use scalar::Real;

pub type ComplexMatrix = Matrix<f64>;
pub type ComplexMatrix32 = Matrix<f32>;
pub type KernelOperator = Kernel<f64>;
pub type KernelOperator32 = Kernel<f32>;
pub type WignerGrid = PhaseGrid<f64>;
pub type WignerGrid32 = PhaseGrid<f32>;
