//! Bundled Hamiltonian systems and high-accuracy reference solutions.

mod integrable1d;
mod pn;
mod reference;

pub use integrable1d::Integrable1D;
pub use pn::{spin_from_canonical, PNBinary, PNTerms, TrajectoryPreset};
pub use reference::{reference_solution, Reference};
