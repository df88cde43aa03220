use super::SparseBitMatrix;
use crate::error::{ensure, Result};

/// Virtual row/column reordering of a matrix. Position `p` of the view
/// shows row `row_map[p]` (resp. column `col_map[p]`) of the underlying
/// matrix; the matrix itself is never moved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationView {
    row_map: Vec<usize>,
    col_map: Vec<usize>,
    row_pos: Vec<usize>,
    col_pos: Vec<usize>,
}

fn invert(map: &[usize], what: &str) -> Result<Vec<usize>> {
    let mut inv = vec![usize::MAX; map.len()];
    for (p, &id) in map.iter().enumerate() {
        ensure!(id < map.len(), Contract, "{what} id {id} out of range");
        ensure!(inv[id] == usize::MAX, Contract, "{what} id {id} appears twice");
        inv[id] = p;
    }
    Ok(inv)
}

impl PermutationView {
    pub fn identity(rows: usize, cols: usize) -> Self {
        Self {
            row_map: (0..rows).collect(),
            col_map: (0..cols).collect(),
            row_pos: (0..rows).collect(),
            col_pos: (0..cols).collect(),
        }
    }

    /// Builds a view from explicit orders; both must be bijections.
    pub fn from_orders(row_map: Vec<usize>, col_map: Vec<usize>) -> Result<Self> {
        let row_pos = invert(&row_map, "row")?;
        let col_pos = invert(&col_map, "column")?;
        Ok(Self {
            row_map,
            col_map,
            row_pos,
            col_pos,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_map.len()
    }

    pub fn cols(&self) -> usize {
        self.col_map.len()
    }

    /// Underlying row shown at view position `p`.
    pub fn row_at(&self, p: usize) -> usize {
        self.row_map[p]
    }

    pub fn col_at(&self, p: usize) -> usize {
        self.col_map[p]
    }

    /// View position of underlying row `id`.
    pub fn row_position(&self, id: usize) -> usize {
        self.row_pos[id]
    }

    pub fn col_position(&self, id: usize) -> usize {
        self.col_pos[id]
    }

    pub fn row_map(&self) -> &[usize] {
        &self.row_map
    }

    pub fn col_map(&self) -> &[usize] {
        &self.col_map
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.row_map.swap(a, b);
        self.row_pos[self.row_map[a]] = a;
        self.row_pos[self.row_map[b]] = b;
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        self.col_map.swap(a, b);
        self.col_pos[self.col_map[a]] = a;
        self.col_pos[self.col_map[b]] = b;
    }

    /// `self` followed by `next`: position `p` of the result shows what
    /// position `next.row_at(p)` of `self` shows.
    pub fn then(&self, next: &PermutationView) -> Result<PermutationView> {
        ensure!(
            self.rows() == next.rows() && self.cols() == next.cols(),
            Contract,
            "cannot compose views of different shapes"
        );
        let rows = next.row_map.iter().map(|&p| self.row_map[p]).collect();
        let cols = next.col_map.iter().map(|&p| self.col_map[p]).collect();
        PermutationView::from_orders(rows, cols)
    }

    /// Materializes the permuted matrix. Only used for inspection and tests.
    pub fn apply(&self, m: &SparseBitMatrix) -> Result<SparseBitMatrix> {
        ensure!(
            m.rows() == self.rows() && m.cols() == self.cols(),
            Contract,
            "view is {}x{} but matrix is {}x{}",
            self.rows(),
            self.cols(),
            m.rows(),
            m.cols()
        );
        let supports = self
            .row_map
            .iter()
            .map(|&r| m.row(r).iter().map(|&c| self.col_pos[c]).collect())
            .collect();
        SparseBitMatrix::from_row_supports(m.cols(), supports)
    }

    /// Entry at view position `(p, q)`.
    pub fn get(&self, m: &SparseBitMatrix, p: usize, q: usize) -> bool {
        m.get(self.row_map[p], self.col_map[q])
    }
}
