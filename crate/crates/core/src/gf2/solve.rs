use serde::{Deserialize, Serialize};

use super::{BitVec, DenseBitMatrix};
use crate::error::{ensure, Result};

/// Outcome of solving a linear system over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveResult {
    Unique(BitVec),
    /// Solutions exist but are not unique. `particular` has every free
    /// variable set to zero; `nullity` is the null-space dimension.
    Ambiguous { particular: BitVec, nullity: usize },
    Inconsistent,
}

impl SolveResult {
    pub fn solution(&self) -> Option<&BitVec> {
        match self {
            SolveResult::Unique(x) => Some(x),
            SolveResult::Ambiguous { particular, .. } => Some(particular),
            SolveResult::Inconsistent => None,
        }
    }

    pub fn is_unique(&self) -> bool {
        matches!(self, SolveResult::Unique(_))
    }

    pub fn nullity(&self) -> Option<usize> {
        match self {
            SolveResult::Unique(_) => Some(0),
            SolveResult::Ambiguous { nullity, .. } => Some(*nullity),
            SolveResult::Inconsistent => None,
        }
    }
}

/// Solves the augmented system `[A | b]` (the last column is `b`).
pub fn gaussian_solve(aug: &DenseBitMatrix) -> Result<SolveResult> {
    gaussian_solve_counted(aug).map(|(r, _)| r)
}

/// Like [`gaussian_solve`], also returning the number of bit XORs spent on
/// row additions (each addition costs the row width).
///
/// Pivots are taken on the first row holding a one in each column, scanning
/// columns left to right, and the matrix is brought to reduced echelon form.
pub fn gaussian_solve_counted(aug: &DenseBitMatrix) -> Result<(SolveResult, usize)> {
    ensure!(
        aug.cols() >= 1,
        Contract,
        "augmented matrix needs a right-hand-side column"
    );
    let unknowns = aug.cols() - 1;
    let width = aug.cols();
    let mut rows: Vec<BitVec> = aug.row_vecs().to_vec();
    let mut pivot_cols = Vec::new();
    let mut xors = 0usize;
    let mut rank = 0;
    for c in 0..unknowns {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(c) {
                row.xor_assign(&pivot);
                xors += width;
            }
        }
        pivot_cols.push(c);
        rank += 1;
    }
    // Rows past the rank have an all-zero coefficient part.
    if rows[rank..].iter().any(|r| r.get(unknowns)) {
        return Ok((SolveResult::Inconsistent, xors));
    }
    let mut x = BitVec::zeros(unknowns);
    for (r, &c) in pivot_cols.iter().enumerate() {
        if rows[r].get(unknowns) {
            x.set(c, true);
        }
    }
    let result = if rank == unknowns {
        SolveResult::Unique(x)
    } else {
        SolveResult::Ambiguous {
            particular: x,
            nullity: unknowns - rank,
        }
    };
    Ok((result, xors))
}
