//! Rational Dunkl theory: exact Dunkl operators over finite reflection
//! groups, generalized Hermite polynomials, the Dunkl kernel, quadrature
//! for `w_k(x) e^{-|x|²}`, the Dunkl transform and the Dunkl heat semigroup.
//!
//! ```
//! use std::sync::Arc;
//! use dunkl_core::{int, HermiteSystem, OperatorContext, SystemSpec};
//!
//! let system = Arc::new(SystemSpec::z2(&[int(1)])?.build()?);
//! let ctx = Arc::new(OperatorContext::new(system)?);
//! let hs = HermiteSystem::build(ctx, 4)?;
//! assert_eq!(hs.rodrigues_poly(&[3])?, *hs.hermite_poly(&[3])?);
//! # Ok::<(), dunkl_core::DunklError>(())
//! ```

pub mod dunkl;
pub mod error;
pub mod groups;
pub mod heat;
pub mod hermite;
pub mod kernel;
pub mod matrix;
pub mod poly;
pub mod quad;
pub mod rational;
pub mod scalar;
pub mod suite;
pub mod transform;

pub use dunkl::{OperatorContext, SignMutation};
pub use error::{DunklError, Result};
pub use groups::{Family, MultiplicityAssignment, Root, RootSystem, SystemSpec, MAX_RANK};
pub use heat::{basic_solution, laplacian_numeric, HeatModel};
pub use hermite::{BasisElement, BasisRecord, HermiteSystem};
pub use kernel::{Kernel, KernelEvaluator, KernelValue, OrbitKernel};
pub use matrix::RatMatrix;
pub use poly::{Monomial, NumericPolynomial, Polynomial};
pub use quad::{normalization_c_k, rule_tensor, QuadratureRule};
pub use rational::{format_rational, int, parse_rational, rat};
pub use scalar::{C64, CDD, DD};
pub use suite::{run_suite, CheckOutcome, CheckReport, SuiteConfig, Verdict};
pub use transform::{TestFunction, TransformContext};
