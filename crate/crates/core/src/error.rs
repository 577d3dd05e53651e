//! One error type spanning every module, for front ends.

use thiserror::Error;

use crate::cocycle::CocycleError;
use crate::extension::ExtensionError;
use crate::fock::FockError;
use crate::gvcat::GvError;
use crate::io::InputError;
use crate::lattice::LatticeError;
use crate::modular::ModularError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Cocycle(#[from] CocycleError),
    #[error(transparent)]
    Category(#[from] GvError),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

impl Error {
    /// The variant name of the underlying module error.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Input(e) => e.name(),
            Error::Lattice(e) => e.name(),
            Error::Cocycle(e) => e.name(),
            Error::Category(e) => e.name(),
            Error::Fock(e) => e.name(),
            Error::Modular(e) => e.name(),
            Error::Extension(e) => e.name(),
        }
    }
}
