use super::ChannelOutput;
use crate::error::{ensure, Error, Result};
use crate::gf2::{gaussian_solve, BitVec, DenseBitMatrix, SolveResult};

/// Direct ML decoding: solves `H_E x = H_K c_K` for the erased bits `x` by
/// dense elimination. The solution lists erased positions in ascending
/// order.
pub fn brute_force_ml(h: &DenseBitMatrix, y: &ChannelOutput) -> Result<SolveResult> {
    ensure!(
        h.cols() == y.len(),
        InvalidInput,
        "PCM has {} columns, channel output has {} bits",
        h.cols(),
        y.len()
    );
    let erased = y.erased_positions();
    let mut rhs = BitVec::zeros(h.rows());
    for r in 0..h.rows() {
        let parity = h.row(r).ones_iter().filter(|&c| y.known[c]).fold(false, |acc, c| acc ^ y.values.get(c));
        rhs.set(r, parity);
    }
    let aug = h.select_columns(&erased).augment(&rhs)?;
    match gaussian_solve(&aug)? {
        SolveResult::Inconsistent => Err(Error::Internal(
            "known bits admit no codeword; not an erasure channel output".into(),
        )),
        other => Ok(other),
    }
}

/// Writes solved erased bits back into the received word.
pub fn fill_erasures(y: &ChannelOutput, erased_values: &BitVec) -> BitVec {
    let mut c = y.values.clone();
    for (j, i) in y.erased_positions().into_iter().enumerate() {
        c.set(i, erased_values.get(j));
    }
    c
}
