use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// Per-stage counters recorded during a decode.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "stage", rename_all = "snake_case")]
pub enum TraceEvent {
    Bp { n_d: usize, n_c: usize },
    /// Total references after a selection round.
    References { n_r: usize },
    /// Diagonal length after an extension step.
    Extension { l: usize },
    Final { n_r: usize, n_u: usize, n_e: usize },
}

/// One JSON object per line.
pub fn write_trace<W: Write>(events: &[TraceEvent], out: &mut W) -> Result<()> {
    for e in events {
        serde_json::to_writer(&mut *out, e)?;
        writeln!(out)?;
    }
    Ok(())
}
