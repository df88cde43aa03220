//! On-disk form of a pruned PCM: the plain matrix text format, followed by
//! a `cvn` line and a line listing the codeword columns in bit order. A JSON
//! sidecar carries summary metadata.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::PrunedPcm;
use crate::error::{Error, Result};
use crate::gf2::text::{read_matrix_lines, write_matrix};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrunedMeta {
    #[serde(rename = "N")]
    pub len: usize,
    /// Polar dimension, CRC bits included.
    #[serde(rename = "K")]
    pub k: usize,
    pub crc: usize,
    pub n_prime: usize,
    pub rows: usize,
    pub density: f64,
    pub rank_ok: bool,
}

impl PrunedMeta {
    /// `crc` is the number of CRC rows appended to `pcm`.
    pub fn describe(pcm: &PrunedPcm, crc: usize, rank_ok: bool) -> Self {
        Self {
            len: pcm.len(),
            k: pcm.k + crc,
            crc,
            n_prime: pcm.n_prime(),
            rows: pcm.matrix.rows(),
            density: pcm.density(),
            rank_ok,
        }
    }
}

pub fn write_pruned<W: Write + ?Sized>(pcm: &PrunedPcm, out: &mut W) -> Result<()> {
    write_matrix(&pcm.matrix, out)?;
    writeln!(out, "cvn")?;
    let ids: Vec<String> = pcm.cvn_cols.iter().map(usize::to_string).collect();
    writeln!(out, "{}", ids.join(" "))?;
    Ok(())
}

pub fn read_pruned<R: BufRead>(input: R) -> Result<PrunedPcm> {
    let mut lines = input.lines();
    let matrix = read_matrix_lines(&mut lines)?;
    let tag = lines
        .next()
        .ok_or_else(|| Error::Parse("missing `cvn` trailer".into()))??;
    if tag.trim() != "cvn" {
        return Err(Error::Parse(format!("expected `cvn`, got `{tag}`")));
    }
    let ids = lines
        .next()
        .ok_or_else(|| Error::Parse("missing codeword column list".into()))??;
    let cvn_cols = ids
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad column id `{t}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if cvn_cols.iter().any(|&c| c >= matrix.cols()) {
        return Err(Error::Parse("codeword column out of range".into()));
    }
    let k = matrix
        .cols()
        .checked_sub(matrix.rows())
        .ok_or_else(|| Error::Parse("more rows than columns".into()))?;
    Ok(PrunedPcm {
        matrix,
        cvn_cols,
        k,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{build_full_pcm, prune};
    use super::*;
    use crate::polar::PolarCode;

    #[test]
    fn round_trip_and_golden_tiny() {
        let code = PolarCode::from_info_set(2, vec![1], 0.5).unwrap();
        let (p, _) = prune(&build_full_pcm(&code)).unwrap();
        let mut buf = Vec::new();
        write_pruned(&p, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "1 2\n0 1\ncvn\n0 1\n");
        assert_eq!(read_pruned(buf.as_slice()).unwrap(), p);

        let code = PolarCode::construct(64, 32, 0.5).unwrap();
        let (p, _) = prune(&build_full_pcm(&code)).unwrap();
        let mut buf = Vec::new();
        write_pruned(&p, &mut buf).unwrap();
        assert_eq!(read_pruned(buf.as_slice()).unwrap(), p);
    }

    #[test]
    fn rejects_missing_trailer() {
        assert!(read_pruned("1 2\n0 1\n".as_bytes()).is_err());
        assert!(read_pruned("1 2\n0 1\nxyz\n0 1\n".as_bytes()).is_err());
    }
}
