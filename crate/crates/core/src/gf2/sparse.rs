use std::cmp::Ordering;

use super::{BitVec, DenseBitMatrix};
use crate::error::{ensure, Result};

/// Sparse GF(2) matrix stored by the positions of its ones in every row and
/// every column. Both adjacency lists are kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseBitMatrix {
    rows: usize,
    cols: usize,
    row_support: Vec<Vec<usize>>,
    col_support: Vec<Vec<usize>>,
}

/// Symmetric difference of two sorted lists, by merge.
pub(crate) fn sorted_symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn toggle_sorted(list: &mut Vec<usize>, value: usize) {
    match list.binary_search(&value) {
        Ok(pos) => {
            list.remove(pos);
        }
        Err(pos) => list.insert(pos, value),
    }
}

impl SparseBitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_support: vec![Vec::new(); rows],
            col_support: vec![Vec::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_row_supports(n, (0..n).map(|i| vec![i]).collect()).expect("valid identity")
    }

    /// Builds from per-row column lists. Lists are sorted here; a column
    /// listed twice in one row cancels (GF(2) addition).
    pub fn from_row_supports(cols: usize, supports: Vec<Vec<usize>>) -> Result<Self> {
        let rows = supports.len();
        let mut row_support = Vec::with_capacity(rows);
        for (r, mut s) in supports.into_iter().enumerate() {
            s.sort_unstable();
            let mut dedup: Vec<usize> = Vec::with_capacity(s.len());
            for c in s {
                ensure!(c < cols, Contract, "row {r} references column {c} >= {cols}");
                if dedup.last() == Some(&c) {
                    dedup.pop();
                } else {
                    dedup.push(c);
                }
            }
            row_support.push(dedup);
        }
        let mut col_support = vec![Vec::new(); cols];
        for (r, s) in row_support.iter().enumerate() {
            for &c in s {
                col_support[c].push(r);
            }
        }
        Ok(Self {
            rows,
            cols,
            row_support,
            col_support,
        })
    }

    pub fn from_dense(m: &DenseBitMatrix) -> Self {
        let supports = m.row_vecs().iter().map(|r| r.ones_iter().collect()).collect();
        Self::from_row_supports(m.cols(), supports).expect("dense rows are in range")
    }

    pub fn to_dense(&self) -> DenseBitMatrix {
        let rows = self
            .row_support
            .iter()
            .map(|s| BitVec::from_support(self.cols, s))
            .collect();
        DenseBitMatrix::from_rows(self.cols, rows).expect("consistent widths")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[usize] {
        &self.row_support[r]
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.col_support[c]
    }

    pub fn row_degree(&self, r: usize) -> usize {
        self.row_support[r].len()
    }

    pub fn col_degree(&self, c: usize) -> usize {
        self.col_support[c].len()
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.row_support[r].binary_search(&c).is_ok()
    }

    /// Total number of ones.
    pub fn nnz(&self) -> usize {
        self.row_support.iter().map(Vec::len).sum()
    }

    /// Fraction of entries that are one.
    pub fn density(&self) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.rows as f64 * self.cols as f64)
    }

    /// Adds row `src` into row `dst`. Returns the XOR count, which is the
    /// weight of the source row.
    pub fn row_xor(&mut self, src: usize, dst: usize) -> Result<usize> {
        ensure!(
            src < self.rows && dst < self.rows,
            Contract,
            "row_xor rows ({src}, {dst}) out of range for {} rows",
            self.rows
        );
        ensure!(src != dst, Contract, "row_xor with identical rows {src}");
        let xors = self.row_support[src].len();
        let merged = sorted_symmetric_difference(&self.row_support[dst], &self.row_support[src]);
        for &c in &self.row_support[src] {
            toggle_sorted(&mut self.col_support[c], dst);
        }
        self.row_support[dst] = merged;
        Ok(xors)
    }

    /// Appends a row, returning its index.
    pub fn push_row(&mut self, mut support: Vec<usize>) -> Result<usize> {
        support.sort_unstable();
        support.dedup();
        if let Some(&c) = support.last() {
            ensure!(c < self.cols, Contract, "pushed row references column {c}");
        }
        let r = self.rows;
        for &c in &support {
            self.col_support[c].push(r);
        }
        self.row_support.push(support);
        self.rows += 1;
        Ok(r)
    }

    /// `m · x`: bit `i` is the parity of `x` over row `i`.
    pub fn mul_vec(&self, x: &BitVec) -> Result<BitVec> {
        ensure!(
            x.len() == self.cols,
            Contract,
            "vector length {} does not match {} columns",
            x.len(),
            self.cols
        );
        Ok(self
            .row_support
            .iter()
            .map(|s| s.iter().fold(false, |acc, &c| acc ^ x.get(c)))
            .collect())
    }

    pub fn rank(&self) -> usize {
        self.to_dense().rank()
    }

    /// Checks that the row and column adjacency describe the same entries
    /// and that both are sorted.
    pub fn is_dual_consistent(&self) -> bool {
        if self.row_support.len() != self.rows || self.col_support.len() != self.cols {
            return false;
        }
        let sorted = |v: &Vec<usize>| v.windows(2).all(|w| w[0] < w[1]);
        if !self.row_support.iter().all(sorted) || !self.col_support.iter().all(sorted) {
            return false;
        }
        let mut rebuilt = vec![Vec::new(); self.cols];
        for (r, s) in self.row_support.iter().enumerate() {
            for &c in s {
                if c >= self.cols {
                    return false;
                }
                rebuilt[c].push(r);
            }
        }
        rebuilt == self.col_support
    }

    pub fn transpose(&self) -> SparseBitMatrix {
        SparseBitMatrix {
            rows: self.cols,
            cols: self.rows,
            row_support: self.col_support.clone(),
            col_support: self.row_support.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sparse(rows: usize, cols: usize, p: f64, rng: &mut impl Rng) -> SparseBitMatrix {
        let supports = (0..rows)
            .map(|_| (0..cols).filter(|_| rng.gen_bool(p)).collect())
            .collect();
        SparseBitMatrix::from_row_supports(cols, supports).unwrap()
    }

    #[test]
    fn row_xor_is_symmetric_difference() {
        let mut m = SparseBitMatrix::from_row_supports(6, vec![vec![1, 3, 5], vec![3, 4]]).unwrap();
        let xors = m.row_xor(0, 1).unwrap();
        assert_eq!(xors, 3);
        assert_eq!(m.row(1), &[1, 4, 5]);
        assert_eq!(m.col(3), &[0]);
        assert!(m.is_dual_consistent());
    }

    #[test]
    fn row_xor_into_itself_is_rejected() {
        let mut m = SparseBitMatrix::identity(3);
        assert!(m.row_xor(2, 2).is_err());
        assert!(m.row_xor(0, 9).is_err());
    }

    #[test]
    fn random_row_xor_keeps_dual_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let mut m = random_sparse(20, 20, 0.15, &mut rng);
        for _ in 0..100 {
            let a = rng.gen_range(0..20);
            let b = rng.gen_range(0..20);
            if a != b {
                m.row_xor(a, b).unwrap();
                assert!(m.is_dual_consistent());
            }
        }
    }

    #[test]
    fn mul_vec_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = random_sparse(8, 8, 0.3, &mut rng);
        assert!(m.mul_vec(&BitVec::zeros(8)).unwrap().is_zero());
        let x = BitVec::from_bit_str("10110010").unwrap();
        assert_eq!(SparseBitMatrix::identity(8).mul_vec(&x).unwrap(), x);
        assert!(m.mul_vec(&BitVec::zeros(7)).is_err());
    }

    #[test]
    fn mul_vec_matches_dense_multiply() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let m = random_sparse(8, 8, 0.4, &mut rng);
            let x: BitVec = (0..8).map(|_| rng.gen_bool(0.5)).collect();
            assert_eq!(m.mul_vec(&x).unwrap(), m.to_dense().mul_vec(&x).unwrap());
        }
    }

    #[test]
    fn duplicate_entries_cancel() {
        let m = SparseBitMatrix::from_row_supports(4, vec![vec![2, 1, 2, 3]]).unwrap();
        assert_eq!(m.row(0), &[1, 3]);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn dual_consistency_under_random_row_ops(seed in any::<u64>(), ops in proptest::collection::vec((0usize..15, 0usize..15), 1..60)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = random_sparse(15, 25, 0.2, &mut rng);
            let rank = m.rank();
            for (a, b) in ops {
                if a != b {
                    let w = m.row(a).len();
                    prop_assert_eq!(m.row_xor(a, b).unwrap(), w);
                }
                prop_assert!(m.is_dual_consistent());
                for r in 0..m.rows() {
                    prop_assert_eq!(m.row_degree(r), m.row(r).len());
                }
            }
            prop_assert_eq!(m.rank(), rank);
        }
    }
}
