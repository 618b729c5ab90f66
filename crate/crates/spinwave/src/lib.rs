//! Symmetric 2-spinor calculus on flat time slices, Hertz-type potential
//! construction, Kirchhoff evolution and peeling-rate measurement.
//!
//! The crate is organized around a single generic operator layer
//! ([`ops`]) instantiated with exact `Q(i)[sqrt2]` coefficients for the
//! identity suites and with `Complex64` for quadrature, spectral grids and
//! principal symbols.

pub mod error;
pub mod exact;
pub mod field;
pub mod frame;
pub mod grid;
pub mod hertz;
pub mod jet;
pub mod kernel;
pub mod ops;
pub mod peel;
pub mod poly;
pub mod profile;
pub mod quad;
pub mod recursion;
pub mod sample;
pub mod scalar;
pub mod soldering;
pub mod spacetime;
pub mod symbol;
pub mod spinor;
pub mod tensor;
pub mod verify;
pub mod wave;

pub use error::{Result, SpinError};
pub use exact::{Exact, Rat};
pub use soldering::Soldering;
pub use spinor::Spinor;
