//! SL2(Z) classes of integral binary cubic forms, the shape point each class
//! carries on the modular surface, and automorphic-twisted Dirichlet series
//! built from them.
//!
//! The crate is organized bottom-up:
//! - [`forms`]: exact algebra (group action, discriminant, pairing, involution,
//!   singular classification);
//! - [`reduction`]: canonical representatives and stabilizers;
//! - [`enumerate`]: class enumeration with a brute-force oracle;
//! - [`halfplane`] / [`shapes`]: Iwasawa coordinates, fundamental-domain
//!   reduction, and the class-to-point map;
//! - [`special`] / [`automorphic`]: K-Bessel, completed zeta, Maass and
//!   Eisenstein evaluators;
//! - [`spectral`]: coefficient file format, synthetic data, remote fetch;
//! - [`lseries`]: twisted coefficients, Weyl sums, partial L-values, decay
//!   experiments;
//! - [`verify`]: the runtime invariant suites behind `cubic-shapes verify`.

pub mod automorphic;
pub mod enumerate;
pub mod error;
pub mod forms;
pub mod halfplane;
pub mod lseries;
pub mod reduction;
mod roots;
pub mod shapes;
pub mod special;
pub mod spectral;
pub mod verify;

pub use error::{EnumError, EvalError, FormsError, SpectralError};
pub use forms::{IntegralCubicForm, RealCubicForm, RealMatrix2, SingularClass, UnimodularMatrix};
