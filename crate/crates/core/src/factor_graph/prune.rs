use serde::{Deserialize, Serialize};

use super::{FactorGraph, FullFgPcm, PrunedPcm, VarNodeKind};
use crate::error::{Error, Result};
use crate::gf2::SparseBitMatrix;

/// How often each reduction fired while pruning.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStats {
    pub frozen_removed: usize,
    pub degree_one_checks: usize,
    pub cvn_merges: usize,
    pub degree_one_hvns: usize,
    pub degree_two_hvns: usize,
    pub hvn_merges: usize,
    /// Checks that cancelled to all-zero rows during merges.
    pub zero_rows: usize,
    /// Hidden variables left without any check.
    pub isolated_hvns: usize,
    pub passes: usize,
}

/// Mutable bipartite graph with sorted adjacency and tombstones.
struct Work {
    rows: Vec<Vec<usize>>,
    cols: Vec<Vec<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    kinds: Vec<VarNodeKind>,
    rows_removed: usize,
    cols_removed: usize,
    stats: PruneStats,
}

fn remove_sorted(list: &mut Vec<usize>, value: usize) {
    if let Ok(p) = list.binary_search(&value) {
        list.remove(p);
    }
}

fn toggle_sorted(list: &mut Vec<usize>, value: usize) -> bool {
    match list.binary_search(&value) {
        Ok(p) => {
            list.remove(p);
            false
        }
        Err(p) => {
            list.insert(p, value);
            true
        }
    }
}

impl Work {
    fn new(graph: &FactorGraph) -> Self {
        let m = &graph.matrix;
        Self {
            rows: (0..m.rows()).map(|r| m.row(r).to_vec()).collect(),
            cols: (0..m.cols()).map(|c| m.col(c).to_vec()).collect(),
            row_alive: vec![true; m.rows()],
            col_alive: vec![true; m.cols()],
            kinds: graph.kinds.clone(),
            rows_removed: 0,
            cols_removed: 0,
            stats: PruneStats::default(),
        }
    }

    fn is_hvn(&self, c: usize) -> bool {
        self.kinds[c] == VarNodeKind::Hvn
    }

    fn remove_row(&mut self, r: usize) {
        for c in std::mem::take(&mut self.rows[r]) {
            remove_sorted(&mut self.cols[c], r);
        }
        self.row_alive[r] = false;
        self.rows_removed += 1;
    }

    /// Drops column `c` from every check. Returns the checks it touched.
    fn remove_col(&mut self, c: usize) -> Vec<usize> {
        let touched = std::mem::take(&mut self.cols[c]);
        for &r in &touched {
            remove_sorted(&mut self.rows[r], c);
        }
        self.col_alive[c] = false;
        self.cols_removed += 1;
        touched
    }

    /// Replaces variable `gone` by `keep` everywhere. A check holding both
    /// loses both (they cancel).
    fn merge_col(&mut self, keep: usize, gone: usize) -> Vec<usize> {
        let touched = std::mem::take(&mut self.cols[gone]);
        for &r in &touched {
            remove_sorted(&mut self.rows[r], gone);
            if toggle_sorted(&mut self.rows[r], keep) {
                let p = self.cols[keep].binary_search(&r).unwrap_err();
                self.cols[keep].insert(p, r);
            } else {
                remove_sorted(&mut self.cols[keep], r);
            }
        }
        self.col_alive[gone] = false;
        self.cols_removed += 1;
        touched
    }

    /// `dst ^= src`.
    fn xor_row(&mut self, src: usize, dst: usize) {
        let src_cols = self.rows[src].clone();
        for c in src_cols {
            if toggle_sorted(&mut self.rows[dst], c) {
                let p = self.cols[c].binary_search(&dst).unwrap_err();
                self.cols[c].insert(p, dst);
            } else {
                remove_sorted(&mut self.cols[c], dst);
            }
        }
    }

    /// Removes checks that cancelled to zero.
    fn reap_rows(&mut self, rows: &[usize]) {
        for &r in rows {
            if self.row_alive[r] && self.rows[r].is_empty() {
                self.row_alive[r] = false;
                self.rows_removed += 1;
                self.stats.zero_rows += 1;
            }
        }
    }

    fn reap_isolated_hvns(&mut self) -> bool {
        let mut changed = false;
        for c in 0..self.cols.len() {
            if self.col_alive[c] && self.is_hvn(c) && self.cols[c].is_empty() {
                self.col_alive[c] = false;
                self.cols_removed += 1;
                self.stats.isolated_hvns += 1;
                changed = true;
            }
        }
        changed
    }

    /// Rule 1: frozen inputs are zero, drop their columns.
    fn remove_frozen(&mut self) {
        for c in 0..self.cols.len() {
            if self.kinds[c] == VarNodeKind::Fvn {
                let touched = self.remove_col(c);
                self.stats.frozen_removed += 1;
                self.reap_rows(&touched);
            }
        }
    }

    /// Rule 2: a check with a single hidden neighbour forces it to zero.
    fn degree_one_checks(&mut self) -> bool {
        let mut changed = false;
        for r in 0..self.rows.len() {
            if !self.row_alive[r] || self.rows[r].len() != 1 {
                continue;
            }
            let c = self.rows[r][0];
            if !self.is_hvn(c) {
                continue;
            }
            self.remove_row(r);
            let touched = self.remove_col(c);
            self.reap_rows(&touched);
            self.stats.degree_one_checks += 1;
            changed = true;
        }
        changed
    }

    /// Rule 3: a degree-2 check between a CVN and an HVN makes them equal;
    /// the CVN absorbs the HVN.
    fn cvn_merges(&mut self) -> bool {
        let mut changed = false;
        for r in 0..self.rows.len() {
            if !self.row_alive[r] || self.rows[r].len() != 2 {
                continue;
            }
            let (a, b) = (self.rows[r][0], self.rows[r][1]);
            let (cvn, hvn) = match (self.kinds[a], self.kinds[b]) {
                (VarNodeKind::Cvn, VarNodeKind::Hvn) => (a, b),
                (VarNodeKind::Hvn, VarNodeKind::Cvn) => (b, a),
                _ => continue,
            };
            self.remove_row(r);
            let touched = self.merge_col(cvn, hvn);
            self.reap_rows(&touched);
            self.stats.cvn_merges += 1;
            changed = true;
        }
        changed
    }

    /// Rule 4: an HVN seen by one check leaves that check unconstrained.
    fn degree_one_hvns(&mut self) -> bool {
        let mut changed = false;
        for c in 0..self.cols.len() {
            if !self.col_alive[c] || !self.is_hvn(c) || self.cols[c].len() != 1 {
                continue;
            }
            let r = self.cols[c][0];
            self.remove_row(r);
            self.col_alive[c] = false;
            self.cols_removed += 1;
            self.stats.degree_one_hvns += 1;
            changed = true;
        }
        changed
    }

    /// Rule 5: an HVN in exactly two checks is eliminated by adding the
    /// checks together.
    fn degree_two_hvns(&mut self) -> bool {
        let mut changed = false;
        for c in 0..self.cols.len() {
            if !self.col_alive[c] || !self.is_hvn(c) || self.cols[c].len() != 2 {
                continue;
            }
            let (keep, gone) = (self.cols[c][0], self.cols[c][1]);
            self.xor_row(gone, keep);
            self.remove_row(gone);
            debug_assert!(self.cols[c].is_empty());
            self.col_alive[c] = false;
            self.cols_removed += 1;
            self.reap_rows(&[keep]);
            self.stats.degree_two_hvns += 1;
            changed = true;
        }
        changed
    }

    /// Rule 6: a degree-2 check between two HVNs; the lower index survives.
    fn hvn_merges(&mut self) -> bool {
        let mut changed = false;
        for r in 0..self.rows.len() {
            if !self.row_alive[r] || self.rows[r].len() != 2 {
                continue;
            }
            let (a, b) = (self.rows[r][0], self.rows[r][1]);
            if !(self.is_hvn(a) && self.is_hvn(b)) {
                continue;
            }
            self.remove_row(r);
            let touched = self.merge_col(a, b);
            self.reap_rows(&touched);
            self.stats.hvn_merges += 1;
            changed = true;
        }
        changed
    }

    fn live_rows(&self) -> usize {
        self.row_alive.iter().filter(|&&a| a).count()
    }

    fn live_cols(&self) -> usize {
        self.col_alive.iter().filter(|&&a| a).count()
    }
}

/// Prunes the full factor graph of a polar code.
pub fn prune(full: &FullFgPcm) -> Result<(PrunedPcm, PruneStats)> {
    prune_graph(&full.graph)
}

/// Applies the reduction rules to a fixpoint and compacts the result.
///
/// Rule 1 runs once. Afterwards rules 2 through 6 are swept in order; a
/// sweep visits every candidate in index order, and any sweep that changed
/// the graph restarts the cycle at rule 2. The graph is assumed to have
/// full row rank after rule 1; the result is checked to have full row rank
/// and exactly one check removed per variable removed.
pub fn prune_graph(graph: &FactorGraph) -> Result<(PrunedPcm, PruneStats)> {
    let mut w = Work::new(graph);
    w.remove_frozen();
    let rows0 = w.live_rows();
    let cols0 = w.live_cols();
    if rows0 > cols0 {
        return Err(Error::Internal(format!(
            "{rows0} checks over {cols0} variables cannot have full row rank"
        )));
    }
    let dimension = cols0 - rows0;
    w.rows_removed = 0;
    w.cols_removed = 0;

    loop {
        w.stats.passes += 1;
        let changed = w.degree_one_checks()
            || w.cvn_merges()
            || w.degree_one_hvns()
            || w.degree_two_hvns()
            || w.hvn_merges()
            || w.reap_isolated_hvns();
        if !changed {
            break;
        }
    }

    if w.rows_removed != w.cols_removed {
        return Err(Error::Internal(format!(
            "pruning removed {} checks but {} variables",
            w.rows_removed, w.cols_removed
        )));
    }

    // Compact: HVNs in index order, then CVNs in codeword order.
    let mut new_col = vec![usize::MAX; w.cols.len()];
    let mut next = 0;
    for c in 0..w.cols.len() {
        if w.col_alive[c] && w.kinds[c] == VarNodeKind::Hvn {
            new_col[c] = next;
            next += 1;
        }
    }
    let mut cvn_cols = Vec::with_capacity(graph.cvn_cols.len());
    for &c in &graph.cvn_cols {
        if !w.col_alive[c] {
            return Err(Error::Internal(format!("codeword column {c} was removed")));
        }
        new_col[c] = next;
        cvn_cols.push(next);
        next += 1;
    }
    let supports: Vec<Vec<usize>> = (0..w.rows.len())
        .filter(|&r| w.row_alive[r])
        .map(|r| w.rows[r].iter().map(|&c| new_col[c]).collect())
        .collect();
    let matrix = SparseBitMatrix::from_row_supports(next, supports)?;
    let pruned = PrunedPcm {
        matrix,
        cvn_cols,
        k: dimension,
    };
    if pruned.matrix.rows() + dimension != pruned.n_prime() {
        return Err(Error::Internal(format!(
            "pruned matrix is {}x{} for dimension {dimension}",
            pruned.matrix.rows(),
            pruned.n_prime()
        )));
    }
    let rank = pruned.matrix.rank();
    if rank != pruned.matrix.rows() {
        return Err(Error::Internal(format!(
            "pruned matrix has rank {rank} < {} rows",
            pruned.matrix.rows()
        )));
    }
    Ok((pruned, w.stats))
}
