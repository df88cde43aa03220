use serde::{Deserialize, Serialize};

use super::PrunedPcm;
use crate::gf2::{gaussian_solve, BitVec, DenseBitMatrix, SolveResult};
use crate::polar::PolarCode;

/// Outcome of checking a pruned PCM against its code. Failures are
/// reported, not raised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub rank_ok: bool,
    pub codeword_membership_ok: bool,
    pub projection_injective_ok: bool,
    pub density: f64,
    /// Number of codewords checked for membership.
    pub codewords_checked: usize,
}

impl ValidationReport {
    pub fn all_ok(&self) -> bool {
        self.rank_ok && self.codeword_membership_ok && self.projection_injective_ok
    }
}

/// Hidden columns of `pcm`, ascending.
fn hidden_cols(pcm: &PrunedPcm) -> Vec<usize> {
    let mut is_cvn = vec![false; pcm.n_prime()];
    for &c in &pcm.cvn_cols {
        is_cvn[c] = true;
    }
    (0..pcm.n_prime()).filter(|&c| !is_cvn[c]).collect()
}

/// Whether codeword `c` extends to an assignment satisfying every check,
/// found by solving for the hidden variables.
pub fn extends_to_assignment(pcm: &PrunedPcm, c: &BitVec) -> bool {
    let dense = pcm.matrix.to_dense();
    extends_with(&dense, &hidden_cols(pcm), pcm, c)
}

fn extends_with(dense: &DenseBitMatrix, hidden: &[usize], pcm: &PrunedPcm, c: &BitVec) -> bool {
    let h_hidden = dense.select_columns(hidden);
    let h_cvn = dense.select_columns(&pcm.cvn_cols);
    let rhs = h_cvn.mul_vec(c).expect("codeword length matches");
    let aug = h_hidden.augment(&rhs).expect("row counts match");
    !matches!(gaussian_solve(&aug), Ok(SolveResult::Inconsistent) | Err(_))
}

/// Checks full row rank, that codewords of `code` satisfy the PCM, and
/// that the null space projects injectively onto the codeword columns.
///
/// Membership is checked on the `K` generator rows of the code (which by
/// linearity covers every codeword), plus the whole codebook when `K ≤ 12`.
pub fn validate_pruned(pcm: &PrunedPcm, code: &PolarCode) -> ValidationReport {
    let dense = pcm.matrix.to_dense();
    let rows = dense.rows();
    let rank_ok = rows + code.k() == pcm.n_prime() && dense.rank() == rows;

    let hidden = hidden_cols(pcm);
    let projection_injective_ok = dense.select_columns(&hidden).rank() == hidden.len();

    let mut words: Vec<BitVec> = Vec::new();
    if pcm.len() == code.len() {
        let k = code.k();
        if k <= 12 {
            for p in 0u32..(1 << k) {
                let payload: BitVec = (0..k).map(|b| p >> b & 1 == 1).collect();
                words.push(code.encode(&payload).expect("payload length is K"));
            }
        } else {
            let g = code.generator_matrix();
            words.extend(code.info_set().iter().map(|&i| g.row(i).clone()));
        }
    }
    let codeword_membership_ok = pcm.len() == code.len()
        && words.iter().all(|c| extends_with(&dense, &hidden, pcm, c));

    ValidationReport {
        rank_ok,
        codeword_membership_ok,
        projection_injective_ok,
        density: pcm.density(),
        codewords_checked: words.len(),
    }
}
