//! Spectral Galerkin toolkit for the semilinear problem A_{1/2}u = λβ(x)f(u)
//! on a rectangle or a disk with Dirichlet data, where A_{1/2} is the
//! spectral square root of the Dirichlet Laplacian.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod constants;
pub mod energy;
pub mod error;
pub mod extension;
pub mod function_space;
pub mod pipeline;
pub mod quadrature;
pub mod solvers;
pub mod spectral_basis;
pub mod test_functions;

pub use constants::{BundleInputs, ConstantsBundle, Geometry, LambdaStar};
pub use energy::{BetaField, Growth, Nonlinearity, NonlinearityKind, ProblemInstance, Subquadratic};
pub use error::{Error, Result};
pub use extension::{CylinderField, YProfile};
pub use pipeline::{derive, Derived, EmbeddingChoice, VariationalChoice};
pub use function_space::{EmbeddingConstants, EmbeddingOptions, SpectralField};
pub use solvers::{SolveReport, SolverOptions};
pub use spectral_basis::{Basis, DomainKind, DomainSpec, EigenPair, ModeDescriptor};
pub use test_functions::{ConeFunction, ConeLift};
