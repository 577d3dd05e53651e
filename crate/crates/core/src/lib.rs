//! Exact computations for the ribbon Grothendieck-Verdier categories attached
//! to bosonic lattice data: structure constants, axiom checks, a truncated
//! Fock-space realization, modular data and simple-current extensions.

pub mod catalog;
pub mod cocycle;
mod error;
pub mod exec;
pub mod extension;
pub mod fock;
pub mod gvcat;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod modular;
pub mod scalar;

pub use error::Error;
pub use exec::Exec;
pub use lattice::{BosonicLatticeData, Coset};
pub use scalar::{Phase, QSeries, Rational, Scalar};
