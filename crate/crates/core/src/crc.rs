//! CRC outer code: its parity checks over the input word, mapped into the
//! codeword domain and appended to a pruned PCM.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::factor_graph::{build_full_pcm, prune, PrunedPcm};
use crate::gf2::{BitVec, DenseBitMatrix, SparseBitMatrix};
use crate::polar::PolarCode;

/// A CRC of degree `m`. `poly` holds the coefficients of `x^{m-1} … x^0`;
/// the leading `x^m` term is implicit. Payload bits are fed most significant
/// (highest degree) first and the checksum is emitted the same way.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcSpec {
    pub degree: usize,
    pub poly: u64,
}

impl CrcSpec {
    /// `x^6 + x + 1`.
    pub const CRC6: CrcSpec = CrcSpec { degree: 6, poly: 0x03 };

    pub fn new(degree: usize, poly: u64) -> Result<Self> {
        ensure!(
            (1..=32).contains(&degree),
            InvalidInput,
            "CRC degree must be in 1..=32, got {degree}"
        );
        ensure!(
            poly >> degree == 0,
            InvalidInput,
            "polynomial {poly:#x} has terms at or above x^{degree}"
        );
        Ok(Self { degree, poly })
    }

    /// Degree 6 uses `x^6 + x + 1`; other degrees need an explicit polynomial.
    pub fn with_degree(degree: usize) -> Result<Self> {
        match degree {
            6 => Ok(Self::CRC6),
            _ => Err(Error::InvalidInput(format!(
                "no default polynomial for degree {degree}; pass one explicitly"
            ))),
        }
    }

    /// Parses `"0x03"` or `"03"`.
    pub fn parse_poly(s: &str) -> Result<u64> {
        let t = s.trim();
        let t = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
        u64::from_str_radix(t, 16).map_err(|e| Error::Parse(format!("bad CRC polynomial `{s}`: {e}")))
    }

    pub fn poly_hex(&self) -> String {
        format!("0x{:0width$x}", self.poly, width = self.degree.div_ceil(4))
    }

    /// Remainder of `p(x)·x^m` modulo the generator.
    pub fn checksum(&self, payload: &BitVec) -> BitVec {
        let m = self.degree;
        let mask = (1u64 << m) - 1;
        let mut reg = 0u64;
        for b in payload.iter() {
            let feedback = b ^ (reg >> (m - 1) & 1 == 1);
            reg = (reg << 1) & mask;
            if feedback {
                reg ^= self.poly;
            }
        }
        (0..m).map(|i| reg >> (m - 1 - i) & 1 == 1).collect()
    }

    /// `payload ‖ checksum`.
    pub fn attach(&self, payload: &BitVec) -> BitVec {
        let mut word = payload.clone();
        for b in self.checksum(payload).iter() {
            word.push(b);
        }
        word
    }

    /// Whether the last `m` bits are the checksum of the rest.
    pub fn verify(&self, word: &BitVec) -> bool {
        if word.len() < self.degree {
            return false;
        }
        let k = word.len() - self.degree;
        let payload: BitVec = word.iter().take(k).collect();
        let tail: BitVec = word.iter().skip(k).collect();
        self.checksum(&payload) == tail
    }
}

/// `H_CRC`: `m × N` checks over the full input word. The checksum sits on the
/// `m` highest information indices and the payload on the rest, ascending.
pub fn crc_parity_matrix(code: &PolarCode, crc: &CrcSpec) -> Result<DenseBitMatrix> {
    let k = code.k();
    let m = crc.degree;
    ensure!(m < k, Contract, "CRC degree {m} must be below K = {k}");
    let payload_len = k - m;
    let info = code.info_set();
    let mut rows = vec![BitVec::zeros(code.len()); m];
    for (i, row) in rows.iter_mut().enumerate() {
        row.set(info[payload_len + i], true);
    }
    // The checksum is linear in the payload: column j is the checksum of e_j.
    for j in 0..payload_len {
        let column = crc.checksum(&BitVec::unit(payload_len, j));
        for i in column.ones_iter() {
            rows[i].set(info[j], true);
        }
    }
    DenseBitMatrix::from_rows(code.len(), rows)
}

/// `H_CRC · G_N^T`: the same checks expressed over codeword bits.
pub fn codeword_domain_constraints(code: &PolarCode, crc: &CrcSpec) -> Result<DenseBitMatrix> {
    crc_parity_matrix(code, crc)?.mul(&code.generator_matrix().transpose())
}

/// Repeatedly replaces the heavier of two rows by their sum when the sum is
/// lighter than it. Pairs are swept in lexicographic order until a sweep
/// makes no replacement; on equal weights the later row is replaced.
pub fn greedy_density_reduction(rows: &DenseBitMatrix) -> DenseBitMatrix {
    let mut out = rows.clone();
    let r = out.rows();
    loop {
        let mut improved = false;
        for i in 0..r {
            for j in i + 1..r {
                let sum = out.row(i).xor(out.row(j));
                let (wi, wj) = (out.row(i).weight(), out.row(j).weight());
                let target = if wi > wj { i } else { j };
                if sum.weight() < wi.max(wj) {
                    *out.row_mut(target) = sum;
                    improved = true;
                }
            }
        }
        if !improved {
            return out;
        }
    }
}

/// A pruned PCM with codeword-domain CRC checks appended.
#[derive(Clone, Debug)]
pub struct AugmentedPcm {
    pub base: PrunedPcm,
    pub crc_rows: DenseBitMatrix,
    pub combined: SparseBitMatrix,
}

impl AugmentedPcm {
    /// The combined matrix as a PCM of the CRC subcode, with dimension
    /// `K − m`.
    pub fn to_pruned(&self) -> PrunedPcm {
        PrunedPcm {
            matrix: self.combined.clone(),
            cvn_cols: self.base.cvn_cols.clone(),
            k: self.base.k - self.crc_rows.rows(),
        }
    }
}

/// Re-indexes `rows` (over codeword bits) onto the CVN columns of `base`
/// and appends them.
pub fn augment(base: &PrunedPcm, rows: &DenseBitMatrix) -> Result<AugmentedPcm> {
    ensure!(
        rows.cols() == base.len(),
        Contract,
        "CRC rows have {} columns, code length is {}",
        rows.cols(),
        base.len()
    );
    let mut combined = base.matrix.clone();
    for r in 0..rows.rows() {
        let support = rows.row(r).ones_iter().map(|c| base.cvn_cols[c]).collect();
        combined.push_row(support)?;
    }
    let expected = base.matrix.rows() + rows.rows();
    let rank = combined.rank();
    if rank != expected {
        return Err(Error::Internal(format!(
            "augmented PCM has rank {rank}, expected {expected}"
        )));
    }
    Ok(AugmentedPcm {
        base: base.clone(),
        crc_rows: rows.clone(),
        combined,
    })
}

/// Pruned PCM of the CRC-concatenated code, optionally without CRC.
/// This is the production path: prune first, then append the reduced
/// codeword-domain CRC checks.
pub fn concatenated_pcm(code: &PolarCode, crc: Option<&CrcSpec>) -> Result<PrunedPcm> {
    let (pruned, _) = prune(&build_full_pcm(code))?;
    match crc {
        None => Ok(pruned),
        Some(crc) => {
            let rows = greedy_density_reduction(&codeword_domain_constraints(code, crc)?);
            Ok(augment(&pruned, &rows)?.to_pruned())
        }
    }
}

/// The alternative pipeline: CRC checks go into the full factor graph on
/// the input layer, and the result is pruned as a whole.
pub fn prune_with_crc_first(code: &PolarCode, crc: &CrcSpec) -> Result<PrunedPcm> {
    let h = crc_parity_matrix(code, crc)?;
    let full = build_full_pcm(code).with_input_constraints(h.row_vecs())?;
    Ok(prune(&full)?.0)
}
