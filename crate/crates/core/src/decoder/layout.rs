use super::FinalLayout;
use crate::error::Result;

/// Structural facts about a final layout, read off the permuted matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutReport {
    /// Decoded checks only involve decoded variables.
    pub decoded_block_ok: bool,
    /// Triangulated rows have no ones right of their diagonal entry.
    pub h13_unit_lower_triangular: bool,
    pub h13_identity: bool,
    pub h23_zero: bool,
    pub gamma: usize,
    pub rho: usize,
}

pub fn check_layout(layout: &FinalLayout) -> Result<LayoutReport> {
    let m = layout.view.apply(&layout.matrix)?;
    let (n_d, n_c, n_r, n_u) = (layout.n_d, layout.n_c, layout.n_r, layout.n_u);
    let diag_start = n_d + n_r;
    let diag_end = diag_start + n_u;
    let decoded_block_ok = (0..n_c).all(|p| m.row(p).iter().all(|&q| q < n_d));
    let mut lower = true;
    let mut identity = true;
    let mut gamma = 0;
    for k in 0..n_u {
        let row = m.row(n_c + k);
        let in_block: Vec<usize> = row
            .iter()
            .copied()
            .filter(|&q| q >= diag_start)
            .map(|q| q - diag_start)
            .collect();
        gamma += in_block.iter().filter(|&&i| i < n_u).count();
        if in_block.last() != Some(&k) || in_block.iter().any(|&i| i > k) {
            lower = false;
        }
        if in_block != [k] {
            identity = false;
        }
    }
    let mut rho = 0;
    for p in n_c + n_u..m.rows() {
        rho += m.row(p).iter().filter(|&&q| (diag_start..diag_end).contains(&q)).count();
    }
    Ok(LayoutReport {
        decoded_block_ok,
        h13_unit_lower_triangular: lower,
        h13_identity: identity && lower,
        h23_zero: rho == 0,
        gamma,
        rho,
    })
}
