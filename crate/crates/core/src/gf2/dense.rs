use std::fmt;

use super::BitVec;
use crate::error::{ensure, Result};

/// Row-major dense GF(2) matrix; each row is a packed [`BitVec`].
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DenseBitMatrix {
    rows: Vec<BitVec>,
    cols: usize,
}

impl DenseBitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows: vec![BitVec::zeros(cols); rows],
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n).map(|i| BitVec::unit(n, i)).collect(),
            cols: n,
        }
    }

    /// Builds from explicit rows. All rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Result<Self> {
        for (i, r) in rows.iter().enumerate() {
            ensure!(
                r.len() == cols,
                Contract,
                "row {i} has length {}, expected {cols}",
                r.len()
            );
        }
        Ok(Self { rows, cols })
    }

    /// Parses rows written as `0`/`1` strings; convenient in tests.
    pub fn from_bit_strs(rows: &[&str]) -> Self {
        let rows: Vec<BitVec> = rows
            .iter()
            .map(|s| BitVec::from_bit_str(s).expect("row must be 0/1 characters"))
            .collect();
        let cols = rows.first().map_or(0, BitVec::len);
        Self::from_rows(cols, rows).expect("ragged rows")
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut BitVec {
        &mut self.rows[r]
    }

    pub fn row_vecs(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<BitVec> {
        self.rows
    }

    pub fn push_row(&mut self, row: BitVec) -> Result<()> {
        ensure!(
            row.len() == self.cols,
            Contract,
            "pushed row has length {}, expected {}",
            row.len(),
            self.cols
        );
        self.rows.push(row);
        Ok(())
    }

    /// Adds row `src` into row `dst` (`dst ^= src`).
    pub fn row_xor(&mut self, src: usize, dst: usize) -> Result<()> {
        ensure!(src != dst, Contract, "row_xor with identical rows {src}");
        let s = self.rows[src].clone();
        self.rows[dst].xor_assign(&s);
        Ok(())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.rows.swap(a, b);
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.rows.iter().map(BitVec::weight).sum()
    }

    pub fn transpose(&self) -> DenseBitMatrix {
        let mut t = DenseBitMatrix::zeros(self.cols, self.rows.len());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones_iter() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &DenseBitMatrix) -> Result<DenseBitMatrix> {
        ensure!(
            self.cols == rhs.rows(),
            Contract,
            "cannot multiply {}x{} by {}x{}",
            self.rows(),
            self.cols,
            rhs.rows(),
            rhs.cols
        );
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = BitVec::zeros(rhs.cols);
                for k in row.ones_iter() {
                    acc.xor_assign(&rhs.rows[k]);
                }
                acc
            })
            .collect();
        Ok(DenseBitMatrix {
            rows,
            cols: rhs.cols,
        })
    }

    /// `self · x` for a column vector `x`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        ensure!(
            x.len() == self.cols,
            Contract,
            "vector length {} does not match {} columns",
            x.len(),
            self.cols
        );
        Ok(self.rows.iter().map(|r| r.dot(x)).collect())
    }

    /// Row vector product `x^T · self`.
    pub fn vec_mul(&self, x: &BitVec) -> Result<BitVec> {
        ensure!(
            x.len() == self.rows(),
            Contract,
            "vector length {} does not match {} rows",
            x.len(),
            self.rows()
        );
        let mut acc = BitVec::zeros(self.cols);
        for k in x.ones_iter() {
            acc.xor_assign(&self.rows[k]);
        }
        Ok(acc)
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &DenseBitMatrix) -> Result<DenseBitMatrix> {
        ensure!(
            self.cols == other.cols,
            Contract,
            "vstack column mismatch {} vs {}",
            self.cols,
            other.cols
        );
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(DenseBitMatrix {
            rows,
            cols: self.cols,
        })
    }

    /// Restricts to the given columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseBitMatrix {
        DenseBitMatrix {
            rows: self.rows.iter().map(|r| r.gather(cols)).collect(),
            cols: cols.len(),
        }
    }

    /// Appends `rhs` as a final column, producing an augmented system.
    pub fn augment(&self, rhs: &BitVec) -> Result<DenseBitMatrix> {
        ensure!(
            rhs.len() == self.rows(),
            Contract,
            "rhs length {} does not match {} rows",
            rhs.len(),
            self.rows()
        );
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut out = r.clone();
                out.push(rhs.get(i));
                out
            })
            .collect();
        Ok(DenseBitMatrix {
            rows,
            cols: self.cols + 1,
        })
    }

    /// GF(2) rank, computed on a copy.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for row in rows.iter_mut().skip(rank + 1) {
                if row.get(c) {
                    row.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }
}

impl fmt::Debug for DenseBitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseBitMatrix {}x{}", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}
