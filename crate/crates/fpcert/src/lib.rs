//! Finite group presentations: HNN splittings over the shift alphabet,
//! cyclic-cover kernel presentations, Betti-growth estimation, and
//! machine-auditable acylindrical-hyperbolicity certificates.

pub mod certify;
pub mod cli;
pub mod covers;
pub mod grammar;
pub mod hnn;
pub mod intlin;
pub mod jsonio;
pub mod l2est;
pub mod presentations;
pub mod words;
pub mod zmaps;

pub use presentations::{FinitePresentation, GeneratorSymbol, TietzeMove};
pub use words::{GenId, Letter, Word};
