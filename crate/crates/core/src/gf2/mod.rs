//! Linear algebra over GF(2): packed vectors, dense and sparse matrices,
//! virtual permutations and Gaussian elimination.

mod bitvec;
mod dense;
mod perm;
mod solve;
mod sparse;
pub mod text;

pub use bitvec::BitVec;
pub use dense::DenseBitMatrix;
pub use perm::PermutationView;
pub use solve::{gaussian_solve, gaussian_solve_counted, SolveResult};
pub use sparse::SparseBitMatrix;
