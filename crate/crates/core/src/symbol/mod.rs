//! Exact phase-space calculus for polynomial symbols.

mod hamiltonian;
mod operator;
mod poly;
mod star;

pub use hamiltonian::{Hamiltonian, Kick};
pub use operator::{evolution_operator, stargen_operator, OperatorTerm, PhaseSpaceOperator};
pub use poly::{Exponents, PolySymbol};
pub use star::{moyal_bracket, poisson_bracket, star_product};
