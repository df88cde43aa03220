//! A polar code, its optional CRC, and the pruned PCM used to decode it.

use serde::{Deserialize, Serialize};

use crate::crc::{codeword_domain_constraints, concatenated_pcm, CrcSpec};
use crate::error::{ensure, Result};
use crate::factor_graph::PrunedPcm;
use crate::gf2::{BitVec, DenseBitMatrix};
use crate::polar::PolarCode;

#[derive(Clone, Debug)]
pub struct Scheme {
    pub code: PolarCode,
    pub crc: Option<CrcSpec>,
    pub pcm: PrunedPcm,
}

impl Scheme {
    /// Prunes the code's factor graph and appends CRC checks if any.
    pub fn build(code: PolarCode, crc: Option<CrcSpec>) -> Result<Self> {
        let pcm = concatenated_pcm(&code, crc.as_ref())?;
        Self::from_parts(code, crc, pcm)
    }

    /// Pairs a code with an already computed PCM, checking the shapes agree.
    pub fn from_parts(code: PolarCode, crc: Option<CrcSpec>, pcm: PrunedPcm) -> Result<Self> {
        let m = crc.map_or(0, |c| c.degree);
        ensure!(m < code.k() || m == 0, InvalidInput, "CRC degree {m} must be below K = {}", code.k());
        ensure!(
            pcm.len() == code.len() && pcm.k + m == code.k(),
            InvalidInput,
            "PCM for length {} and dimension {} does not fit P({}, {}) with a degree-{m} CRC",
            pcm.len(),
            pcm.k,
            code.len(),
            code.k()
        );
        Ok(Self { code, crc, pcm })
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }

    pub fn crc_degree(&self) -> usize {
        self.crc.map_or(0, |c| c.degree)
    }

    /// Free message bits: `K` minus the CRC degree.
    pub fn payload_len(&self) -> usize {
        self.code.k() - self.crc_degree()
    }

    pub fn encode(&self, payload: &BitVec) -> Result<BitVec> {
        ensure!(
            payload.len() == self.payload_len(),
            Contract,
            "payload has {} bits, expected {}",
            payload.len(),
            self.payload_len()
        );
        match &self.crc {
            Some(crc) => self.code.encode(&crc.attach(payload)),
            None => self.code.encode(payload),
        }
    }

    /// Dense PCM over codeword bits: the standard polar PCM stacked with the
    /// codeword-domain CRC checks.
    pub fn dense_pcm(&self) -> Result<DenseBitMatrix> {
        let h = self.code.standard_dense_pcm();
        match &self.crc {
            Some(crc) => h.vstack(&codeword_domain_constraints(&self.code, crc)?),
            None => Ok(h),
        }
    }
}

/// JSON code description. `info_set` lists 0-based indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    #[serde(rename = "N")]
    pub len: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub design_eps: f64,
    pub info_set: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crc_degree: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crc_poly: Option<String>,
}

impl CodeFile {
    pub fn describe(code: &PolarCode, crc: Option<&CrcSpec>) -> Self {
        Self {
            len: code.len(),
            k: code.k(),
            design_eps: code.design_eps(),
            info_set: code.info_set().to_vec(),
            crc_degree: crc.map(|c| c.degree),
            crc_poly: crc.map(CrcSpec::poly_hex),
        }
    }

    pub fn code(&self) -> Result<PolarCode> {
        ensure!(
            self.info_set.len() == self.k,
            InvalidInput,
            "info_set has {} entries but K = {}",
            self.info_set.len(),
            self.k
        );
        PolarCode::from_info_set(self.len, self.info_set.clone(), self.design_eps)
    }

    pub fn crc(&self) -> Result<Option<CrcSpec>> {
        match (self.crc_degree, &self.crc_poly) {
            (None, None) | (Some(0), None) => Ok(None),
            (Some(d), Some(p)) => Ok(Some(CrcSpec::new(d, CrcSpec::parse_poly(p)?)?)),
            (Some(d), None) => Ok(Some(CrcSpec::with_degree(d)?)),
            (None, Some(_)) => Err(crate::Error::InvalidInput("crc_poly given without crc_degree".into())),
        }
    }
}
