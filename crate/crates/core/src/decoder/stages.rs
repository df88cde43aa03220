use std::collections::VecDeque;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ChannelOutput, DecodeStats, DecoderConfig, FinalLayout, SelectorPolicy, TraceEvent};
use crate::error::{ensure, Error, Result};
use crate::factor_graph::PrunedPcm;
use crate::gf2::{gaussian_solve_counted, BitVec, DenseBitMatrix, PermutationView, SolveResult, SparseBitMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColStatus {
    /// Observed, or recovered by peeling.
    Known,
    Reference,
    /// Expressed through references by a triangulated row.
    Diagonal,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowStatus {
    /// Every variable of the check is known.
    Decoded,
    Diagonal,
    Remaining,
}

/// Decoder bookkeeping. The ordered lists define the block layout
/// `[decoded | references | diagonal]` for columns and
/// `[decoded | diagonal | remaining]` for rows; `view` tracks it as a
/// permutation of the untouched PCM.
#[derive(Clone, Debug)]
pub struct DecodeState {
    pub values: BitVec,
    pub col_status: Vec<ColStatus>,
    pub row_status: Vec<RowStatus>,
    /// Unknown variables per remaining row, references and diagonal
    /// variables excluded.
    pub residual: Vec<usize>,
    pub decoded_cols: Vec<usize>,
    pub decoded_rows: Vec<usize>,
    pub ref_cols: Vec<usize>,
    pub diag_cols: Vec<usize>,
    pub diag_rows: Vec<usize>,
    pub view: PermutationView,
    pub perm_count: usize,
    pub bp_xors: usize,
    pending: Vec<usize>,
}

impl DecodeState {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            values: BitVec::zeros(cols),
            col_status: vec![ColStatus::Unknown; cols],
            row_status: vec![RowStatus::Remaining; rows],
            residual: vec![0; rows],
            decoded_cols: Vec::new(),
            decoded_rows: Vec::new(),
            ref_cols: Vec::new(),
            diag_cols: Vec::new(),
            diag_rows: Vec::new(),
            view: PermutationView::identity(rows, cols),
            perm_count: 0,
            bp_xors: 0,
            pending: Vec::new(),
        }
    }

    pub fn n_d(&self) -> usize {
        self.decoded_cols.len()
    }

    pub fn n_c(&self) -> usize {
        self.decoded_rows.len()
    }

    pub fn n_r(&self) -> usize {
        self.ref_cols.len()
    }

    pub fn diag_len(&self) -> usize {
        self.diag_rows.len()
    }

    /// Rows outside the decoded and diagonal blocks, in view order.
    pub fn remaining_rows(&self) -> Vec<usize> {
        let start = self.n_c() + self.diag_len();
        (start..self.view.rows()).map(|p| self.view.row_at(p)).collect()
    }

    fn place_col(&mut self, c: usize, pos: usize) {
        let p = self.view.col_position(c);
        if p != pos {
            self.view.swap_cols(p, pos);
            self.perm_count += 1;
        }
    }

    fn place_row(&mut self, r: usize, pos: usize) {
        let p = self.view.row_position(r);
        if p != pos {
            self.view.swap_rows(p, pos);
            self.perm_count += 1;
        }
    }

    fn mark_known(&mut self, c: usize, value: bool) {
        self.values.set(c, value);
        self.col_status[c] = ColStatus::Known;
        self.decoded_cols.push(c);
        self.place_col(c, self.decoded_cols.len() - 1);
    }

    fn mark_row_decoded(&mut self, r: usize) {
        self.row_status[r] = RowStatus::Decoded;
        self.residual[r] = 0;
        self.decoded_rows.push(r);
        self.place_row(r, self.decoded_rows.len() - 1);
    }

    pub(crate) fn make_reference(&mut self, c: usize, h: &SparseBitMatrix) {
        self.col_status[c] = ColStatus::Reference;
        self.ref_cols.push(c);
        self.drop_unknown(c, h);
    }

    fn drop_unknown(&mut self, c: usize, h: &SparseBitMatrix) {
        for &r in h.col(c) {
            if self.row_status[r] == RowStatus::Remaining {
                self.residual[r] -= 1;
                if self.residual[r] == 1 {
                    self.pending.push(r);
                }
            }
        }
    }

    /// Moves references and diagonal columns into place after the decoded
    /// block.
    fn place_stage_two(&mut self) {
        let base = self.n_d();
        let order: Vec<usize> = self.ref_cols.iter().chain(&self.diag_cols).copied().collect();
        for (i, c) in order.into_iter().enumerate() {
            self.place_col(c, base + i);
        }
    }

    pub fn final_layout(&self, matrix: SparseBitMatrix) -> FinalLayout {
        let n_u = self.diag_len();
        FinalLayout {
            view: self.view.clone(),
            n_d: self.n_d(),
            n_c: self.n_c(),
            n_r: self.n_r(),
            n_u,
            n_e: self.view.rows() - self.n_c() - n_u,
            matrix,
        }
    }

    /// Block sizes, weights and the permutation count for `matrix` viewed
    /// through the current layout.
    pub fn block_stats(&self, matrix: &SparseBitMatrix) -> DecodeStats {
        let remaining = self.remaining_rows();
        let diag_ones = |r: usize| {
            matrix
                .row(r)
                .iter()
                .filter(|&&c| self.col_status[c] == ColStatus::Diagonal)
                .count()
        };
        let mean = |rows: &[usize]| {
            if rows.is_empty() {
                0.0
            } else {
                rows.iter().map(|&r| matrix.row_degree(r)).sum::<usize>() as f64 / rows.len() as f64
            }
        };
        DecodeStats {
            n_d: self.n_d(),
            n_c: self.n_c(),
            n_r: self.n_r(),
            n_u: self.diag_len(),
            n_e: remaining.len(),
            perm_count: self.perm_count,
            dc1: mean(&self.diag_rows),
            dc2: mean(&remaining),
            gamma: self.diag_rows.iter().map(|&r| diag_ones(r)).sum(),
            rho: remaining.iter().map(|&r| diag_ones(r)).sum(),
            ..Default::default()
        }
    }
}

/// Peels with checks first visited in index order.
pub fn bp_peel(pcm: &PrunedPcm, y: &ChannelOutput) -> Result<DecodeState> {
    let order: Vec<usize> = (0..pcm.matrix.rows()).collect();
    bp_peel_with_order(pcm, y, &order)
}

/// Peeling decoder: a check with exactly one unknown variable determines it
/// as the XOR of its known variables. `order` is the initial visit order of
/// the checks; newly qualifying checks are queued behind it. The set of
/// recovered variables does not depend on the order.
pub fn bp_peel_with_order(pcm: &PrunedPcm, y: &ChannelOutput, order: &[usize]) -> Result<DecodeState> {
    let h = &pcm.matrix;
    ensure!(
        y.len() == pcm.len(),
        InvalidInput,
        "channel output has {} bits, code length is {}",
        y.len(),
        pcm.len()
    );
    ensure!(
        order.len() == h.rows(),
        Contract,
        "visit order lists {} checks, PCM has {}",
        order.len(),
        h.rows()
    );
    let mut st = DecodeState::new(h.rows(), h.cols());
    for (i, &c) in pcm.cvn_cols.iter().enumerate() {
        if y.known[i] {
            st.mark_known(c, y.values.get(i));
        }
    }
    let mut unknown = vec![0usize; h.rows()];
    let mut parity = vec![false; h.rows()];
    for r in 0..h.rows() {
        for &c in h.row(r) {
            if st.col_status[c] == ColStatus::Known {
                parity[r] ^= st.values.get(c);
            } else {
                unknown[r] += 1;
            }
        }
    }
    let violation = |r: usize| Error::InvalidInput(format!("known bits violate check {r}"));
    let mut queue = VecDeque::new();
    for &r in order {
        match unknown[r] {
            0 if parity[r] => return Err(violation(r)),
            0 => st.mark_row_decoded(r),
            1 => queue.push_back(r),
            _ => {}
        }
    }
    while let Some(r) = queue.pop_front() {
        if unknown[r] != 1 {
            continue;
        }
        let c = *h
            .row(r)
            .iter()
            .find(|&&c| st.col_status[c] != ColStatus::Known)
            .ok_or_else(|| Error::Internal(format!("check {r} lost its unknown variable")))?;
        let v = parity[r];
        st.bp_xors += h.row_degree(r) - 1;
        st.mark_known(c, v);
        for &r2 in h.col(c) {
            unknown[r2] -= 1;
            parity[r2] ^= v;
            match unknown[r2] {
                0 if parity[r2] => return Err(violation(r2)),
                0 => st.mark_row_decoded(r2),
                1 => queue.push_back(r2),
                _ => {}
            }
        }
    }
    for r in 0..h.rows() {
        if st.row_status[r] == RowStatus::Remaining {
            st.residual[r] = unknown[r];
        }
    }
    Ok(st)
}

/// One extension step: every remaining row with a single unknown variable
/// (in row order) joins the diagonal together with that variable. A row
/// whose variable was taken earlier in the same step is left with none and
/// stays behind. Returns the new `(row, column)` pairs.
pub fn diagonal_extension(state: &mut DecodeState, h: &SparseBitMatrix) -> Result<Vec<(usize, usize)>> {
    let mut candidates = std::mem::take(&mut state.pending);
    candidates.sort_unstable();
    candidates.dedup();
    let mut found = Vec::new();
    for r in candidates {
        if state.row_status[r] != RowStatus::Remaining || state.residual[r] != 1 {
            continue;
        }
        let c = *h
            .row(r)
            .iter()
            .find(|&&c| state.col_status[c] == ColStatus::Unknown)
            .ok_or_else(|| Error::Internal(format!("row {r} has residual 1 but no unknown")))?;
        state.col_status[c] = ColStatus::Diagonal;
        state.row_status[r] = RowStatus::Diagonal;
        state.residual[r] = 0;
        state.diag_cols.push(c);
        state.diag_rows.push(r);
        let pos = state.n_c() + state.diag_len() - 1;
        state.place_row(r, pos);
        state.drop_unknown(c, h);
        found.push((r, c));
    }
    Ok(found)
}

pub(crate) fn select_reference(
    state: &DecodeState,
    h: &SparseBitMatrix,
    is_cvn: &[bool],
    policy: &SelectorPolicy,
    rng: Option<&mut ChaCha8Rng>,
) -> Option<usize> {
    let unknown = |c: &usize| state.col_status[*c] == ColStatus::Unknown;
    match policy {
        SelectorPolicy::MinResidualCheck => {
            let row = (0..h.rows())
                .filter(|&r| state.row_status[r] == RowStatus::Remaining && state.residual[r] >= 2)
                .min_by_key(|&r| (state.residual[r], r));
            match row {
                Some(r) => h.row(r).iter().copied().find(|c| unknown(c)),
                None => (0..h.cols()).find(unknown),
            }
        }
        SelectorPolicy::RandomCvn { .. } => {
            let mut pool: Vec<usize> = (0..h.cols()).filter(|c| unknown(c) && is_cvn[*c]).collect();
            if pool.is_empty() {
                pool = (0..h.cols()).filter(unknown).collect();
            }
            if pool.is_empty() {
                return None;
            }
            let rng = rng.expect("random selection needs a generator");
            Some(pool[rng.gen_range(0..pool.len())])
        }
    }
}

/// Alternates reference selection (`config.batch` at a time) with diagonal
/// extension until every unknown is a reference or on the diagonal.
/// `on_step` sees the state and the pairs added by each extension step.
/// Returns the number of extension steps.
pub fn triangulate<F>(
    state: &mut DecodeState,
    pcm: &PrunedPcm,
    is_cvn: &[bool],
    config: &DecoderConfig,
    mut rng: Option<&mut ChaCha8Rng>,
    mut on_step: F,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> Result<usize>
where
    F: FnMut(&DecodeState, &[(usize, usize)]) -> Result<()>,
{
    ensure!(config.batch >= 1, InvalidInput, "reference batch size must be at least 1");
    let h = &pcm.matrix;
    let mut unknown_left = state.col_status.iter().filter(|&&s| s == ColStatus::Unknown).count();
    let mut steps = 0;
    loop {
        loop {
            let found = diagonal_extension(state, h)?;
            if found.is_empty() {
                break;
            }
            steps += 1;
            unknown_left -= found.len();
            on_step(state, &found)?;
            if let Some(t) = trace.as_deref_mut() {
                t.push(TraceEvent::Extension { l: state.diag_len() });
            }
        }
        if unknown_left == 0 {
            break;
        }
        for _ in 0..config.batch {
            if unknown_left == 0 {
                break;
            }
            let c = select_reference(state, h, is_cvn, &config.policy, rng.as_deref_mut())
                .ok_or_else(|| Error::Internal("no reference candidate while unknowns remain".into()))?;
            state.make_reference(c, h);
            unknown_left -= 1;
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(TraceEvent::References { n_r: state.n_r() });
        }
    }
    state.place_stage_two();
    Ok(steps)
}

/// `u = A r + a` for the diagonal variables, in diagonal order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub rows: Vec<BitVec>,
    pub a: BitVec,
    pub s1_xors: usize,
    pub recursion_xors: usize,
}

impl AffineMap {
    pub fn n_r(&self) -> usize {
        self.rows.first().map_or(0, BitVec::len)
    }

    /// Evaluates the map, also returning the XOR count (ones in `A`).
    pub fn apply(&self, r: &BitVec) -> (BitVec, usize) {
        let mut xors = 0;
        let u = self
            .rows
            .iter()
            .enumerate()
            .map(|(k, row)| {
                xors += row.weight();
                row.dot(r) ^ self.a.get(k)
            })
            .collect();
        (u, xors)
    }
}

fn index_of(ids: &[usize], len: usize) -> Vec<usize> {
    let mut idx = vec![usize::MAX; len];
    for (i, &c) in ids.iter().enumerate() {
        idx[c] = i;
    }
    idx
}

/// Builds `A` and `a` row by row: diagonal row `k` gives
/// `u_k = s1_k + h12_k·r + Σ u_i` over the earlier diagonal variables it
/// holds, and substituting their maps gives the map of `u_k`.
pub fn back_substitute(state: &DecodeState, matrix: &SparseBitMatrix) -> Result<AffineMap> {
    let n_r = state.n_r();
    let ref_idx = index_of(&state.ref_cols, matrix.cols());
    let diag_idx = index_of(&state.diag_cols, matrix.cols());
    let mut rows: Vec<BitVec> = Vec::with_capacity(state.diag_len());
    let mut a = BitVec::zeros(state.diag_len());
    let mut s1_xors = 0;
    let mut recursion_xors = 0;
    for (k, &r) in state.diag_rows.iter().enumerate() {
        let mut row = BitVec::zeros(n_r);
        let mut bit = false;
        let mut saw_self = false;
        for &c in matrix.row(r) {
            match state.col_status[c] {
                ColStatus::Known => {
                    bit ^= state.values.get(c);
                    s1_xors += 1;
                }
                ColStatus::Reference => row.flip(ref_idx[c]),
                ColStatus::Diagonal => {
                    let i = diag_idx[c];
                    if i == k {
                        saw_self = true;
                    } else if i < k {
                        row.xor_assign(&rows[i]);
                        bit ^= a.get(i);
                        recursion_xors += n_r + 1;
                    } else {
                        return Err(Error::Internal(format!(
                            "diagonal row {k} holds later diagonal variable {i}"
                        )));
                    }
                }
                ColStatus::Unknown => {
                    return Err(Error::Internal(format!("diagonal row {r} holds an unresolved variable")))
                }
            }
        }
        if !saw_self {
            return Err(Error::Internal(format!("diagonal row {k} misses its own variable")));
        }
        a.set(k, bit);
        rows.push(row);
    }
    Ok(AffineMap {
        rows,
        a,
        s1_xors,
        recursion_xors,
    })
}

/// The reduced system over the references and its XOR counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReferenceSolve {
    pub result: SolveResult,
    pub s2_xors: usize,
    pub system_xors: usize,
    pub solve_xors: usize,
}

/// Forms `(H^(2,2) + H^(2,3) A) r = s^(2) + H^(2,3) a` over the remaining
/// rows and solves it. An inconsistent system cannot come from genuine
/// channel output and is reported as an internal error.
pub fn solve_references(state: &DecodeState, matrix: &SparseBitMatrix, map: &AffineMap) -> Result<ReferenceSolve> {
    let n_r = state.n_r();
    let ref_idx = index_of(&state.ref_cols, matrix.cols());
    let diag_idx = index_of(&state.diag_cols, matrix.cols());
    let mut s2_xors = 0;
    let mut system_xors = 0;
    let mut rows = Vec::new();
    for r in state.remaining_rows() {
        let mut coef = BitVec::zeros(n_r);
        let mut rhs = false;
        for &c in matrix.row(r) {
            match state.col_status[c] {
                ColStatus::Known => {
                    rhs ^= state.values.get(c);
                    s2_xors += 1;
                }
                ColStatus::Reference => coef.flip(ref_idx[c]),
                ColStatus::Diagonal => {
                    let i = diag_idx[c];
                    coef.xor_assign(&map.rows[i]);
                    rhs ^= map.a.get(i);
                    system_xors += n_r + 1;
                }
                ColStatus::Unknown => {
                    return Err(Error::Internal(format!("remaining row {r} holds an unresolved variable")))
                }
            }
        }
        coef.push(rhs);
        rows.push(coef);
    }
    let aug = DenseBitMatrix::from_rows(n_r + 1, rows)?;
    let (result, solve_xors) = gaussian_solve_counted(&aug)?;
    if result == SolveResult::Inconsistent {
        return Err(Error::Internal("reduced system is inconsistent for channel output".into()));
    }
    Ok(ReferenceSolve {
        result,
        s2_xors,
        system_xors,
        solve_xors,
    })
}
