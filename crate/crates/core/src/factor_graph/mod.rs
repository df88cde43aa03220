//! The polar factor graph as a parity-check matrix, and its reduction to a
//! small sparse parity-check matrix for the same code.

mod file;
mod prune;
mod validate;

pub use file::{read_pruned, write_pruned, PrunedMeta};
pub use prune::{prune, prune_graph, PruneStats};
pub use validate::{extends_to_assignment, validate_pruned, ValidationReport};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::gf2::{BitVec, SparseBitMatrix};
use crate::polar::{bit_reverse, PolarCode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarNodeKind {
    /// Channel variable: a codeword bit.
    Cvn,
    /// Frozen input bit, always zero.
    Fvn,
    /// Hidden variable: unfrozen input bits and all intermediate values.
    Hvn,
}

/// A parity-check matrix together with the role of each column. This is
/// the input the pruning rules operate on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorGraph {
    pub matrix: SparseBitMatrix,
    pub kinds: Vec<VarNodeKind>,
    /// For each codeword bit, the column that carries it.
    pub cvn_cols: Vec<usize>,
}

impl FactorGraph {
    pub fn new(matrix: SparseBitMatrix, kinds: Vec<VarNodeKind>, cvn_cols: Vec<usize>) -> Result<Self> {
        ensure!(
            kinds.len() == matrix.cols(),
            Contract,
            "{} kinds for {} columns",
            kinds.len(),
            matrix.cols()
        );
        for (bit, &c) in cvn_cols.iter().enumerate() {
            ensure!(
                c < kinds.len() && kinds[c] == VarNodeKind::Cvn,
                Contract,
                "codeword bit {bit} mapped to non-CVN column {c}"
            );
        }
        ensure!(
            kinds.iter().filter(|k| **k == VarNodeKind::Cvn).count() == cvn_cols.len(),
            Contract,
            "every CVN column must carry exactly one codeword bit"
        );
        Ok(Self {
            matrix,
            kinds,
            cvn_cols,
        })
    }
}

/// The full `N·n × N(n+1)` factor-graph PCM.
///
/// Column `s·N + j` is node `j` of layer `s` (layer 0 is the input word `u`).
/// The last `N` columns are the codeword, with column `n·N + i` carrying
/// `c_i`; internally the butterfly output node `j` is `c_{rev(j)}`.
#[derive(Clone, Debug)]
pub struct FullFgPcm {
    pub graph: FactorGraph,
    pub layer: Vec<u32>,
    pub len: usize,
    pub stages: u32,
}

impl FullFgPcm {
    pub fn matrix(&self) -> &SparseBitMatrix {
        &self.graph.matrix
    }

    /// Column of node `j` in layer `s`.
    pub fn node_col(&self, s: u32, j: usize) -> usize {
        node_col(self.len, self.stages, s, j)
    }

    /// Expands a full input word into the value of every column, using the
    /// encoder's intermediate butterfly layers.
    pub fn full_assignment(&self, full_u: &BitVec) -> BitVec {
        let layers = crate::polar::encode_layers(full_u);
        let mut x = BitVec::zeros(self.graph.matrix.cols());
        for (s, layer) in layers.iter().enumerate() {
            for j in layer.ones_iter() {
                x.set(self.node_col(s as u32, j), true);
            }
        }
        x
    }

    /// Appends constraint rows expressed over the input word `u` (layer 0).
    pub fn with_input_constraints(mut self, rows: &[BitVec]) -> Result<Self> {
        for row in rows {
            ensure!(row.len() == self.len, Contract, "constraint row must have N bits");
            self.graph.matrix.push_row(row.ones_iter().collect())?;
        }
        Ok(self)
    }
}

fn node_col(len: usize, stages: u32, s: u32, j: usize) -> usize {
    if s == stages {
        stages as usize * len + bit_reverse(j, stages)
    } else {
        s as usize * len + j
    }
}

/// Builds the full factor-graph PCM of `code`. Each butterfly of stage `s`
/// (pairing `j` with `j + 2^s`) contributes a degree-3 check
/// `out_j = in_j ⊕ in_{j+2^s}` and a degree-2 check `out_{j+2^s} = in_{j+2^s}`.
pub fn build_full_pcm(code: &PolarCode) -> FullFgPcm {
    let len = code.len();
    let stages = code.stages();
    let cols = len * (stages as usize + 1);
    let mut supports = Vec::with_capacity(len * stages as usize);
    for s in 0..stages {
        let half = 1usize << s;
        for j in (0..len).filter(|j| j & half == 0) {
            let lo = j + half;
            supports.push(vec![
                node_col(len, stages, s, j),
                node_col(len, stages, s, lo),
                node_col(len, stages, s + 1, j),
            ]);
            supports.push(vec![
                node_col(len, stages, s, lo),
                node_col(len, stages, s + 1, lo),
            ]);
        }
    }
    let matrix = SparseBitMatrix::from_row_supports(cols, supports).expect("columns in range");
    let mut kinds = vec![VarNodeKind::Hvn; cols];
    let mut layer = vec![0u32; cols];
    for s in 0..=stages {
        for j in 0..len {
            let c = node_col(len, stages, s, j);
            layer[c] = s;
            if s == stages {
                kinds[c] = VarNodeKind::Cvn;
            } else if s == 0 && code.is_frozen(j) {
                kinds[c] = VarNodeKind::Fvn;
            }
        }
    }
    let cvn_cols = (0..len).map(|i| stages as usize * len + i).collect();
    FullFgPcm {
        graph: FactorGraph::new(matrix, kinds, cvn_cols).expect("consistent construction"),
        layer,
        len,
        stages,
    }
}

/// The reduced `(N'−K) × N'` parity-check matrix. HVN columns come first;
/// the last `N` columns are the codeword bits in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrunedPcm {
    pub matrix: SparseBitMatrix,
    pub cvn_cols: Vec<usize>,
    pub k: usize,
}

impl PrunedPcm {
    /// `N'`, the number of variable nodes.
    pub fn n_prime(&self) -> usize {
        self.matrix.cols()
    }

    /// Codeword length `N`.
    pub fn len(&self) -> usize {
        self.cvn_cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cvn_cols.is_empty()
    }

    pub fn density(&self) -> f64 {
        self.matrix.density()
    }

    /// Re-wraps as a factor graph (HVN/CVN only), e.g. to prune it again.
    pub fn to_graph(&self) -> FactorGraph {
        let mut kinds = vec![VarNodeKind::Hvn; self.matrix.cols()];
        for &c in &self.cvn_cols {
            kinds[c] = VarNodeKind::Cvn;
        }
        FactorGraph::new(self.matrix.clone(), kinds, self.cvn_cols.clone())
            .expect("pruned matrix is a valid graph")
    }
}
