//! Exact symbolic and numerical tools for Hamiltonian and integrable systems:
//! rational-function algebra, exterior calculus on a chart, linear Hamiltonian
//! factorization, resonance lattices of torus actions, and period detection.

pub mod expr;
pub mod geom;
pub mod linalg;
pub mod linfact;
pub mod period;
pub mod sample;
pub mod torus;
