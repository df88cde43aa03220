//! Exact ML erasure decoding over a pruned PCM: peeling, triangulation with
//! reference variables, back-substitution, and a small dense solve.

mod channel;
mod layout;
mod oracle;
mod stages;
mod trace;

pub use channel::ChannelOutput;
pub use layout::{check_layout, LayoutReport};
pub use oracle::{brute_force_ml, fill_erasures};
pub use stages::{
    back_substitute, bp_peel, bp_peel_with_order, diagonal_extension, solve_references, triangulate, AffineMap,
    ColStatus, DecodeState, ReferenceSolve, RowStatus,
};
pub use trace::{write_trace, TraceEvent};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor_graph::PrunedPcm;
use crate::gf2::{BitVec, SolveResult, SparseBitMatrix};

/// How reference variables are chosen when the diagonal cannot be extended.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectorPolicy {
    /// Uniformly among unknown codeword columns.
    RandomCvn { seed: u64 },
    /// The lowest unknown column of the lowest-indexed check with the
    /// fewest unknowns.
    #[default]
    MinResidualCheck,
}

impl SelectorPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            SelectorPolicy::RandomCvn { .. } => "random",
            SelectorPolicy::MinResidualCheck => "min-residual",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeMode {
    Baseline,
    Structured,
}

impl DecodeMode {
    pub fn name(&self) -> &'static str {
        match self {
            DecodeMode::Baseline => "baseline",
            DecodeMode::Structured => "structured",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecoderConfig {
    pub policy: SelectorPolicy,
    /// References chosen per selection round (`n'_r`).
    pub batch: usize,
    pub mode: DecodeMode,
    /// Keep the final permutation and working matrix in the outcome.
    pub keep_layout: bool,
    pub trace: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        Self {
            policy: SelectorPolicy::MinResidualCheck,
            batch: 1,
            mode: DecodeMode::Baseline,
            keep_layout: false,
            trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecodeStatus {
    BpSuccess,
    MlUnique,
    MlAmbiguous { nullity: usize },
}

impl DecodeStatus {
    pub fn is_unique(&self) -> bool {
        !matches!(self, DecodeStatus::MlAmbiguous { .. })
    }

    pub fn nullity(&self) -> usize {
        match self {
            DecodeStatus::MlAmbiguous { nullity } => *nullity,
            _ => 0,
        }
    }
}

/// XOR counts per stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct XorBreakdown {
    pub bp: usize,
    /// Row additions of the structured variant.
    pub elimination: usize,
    pub s1: usize,
    /// The `A`, `a` recursion: `(n_r + 1)(γ − n_u)`.
    pub recursion: usize,
    pub s2: usize,
    /// Forming the reduced system from `H^(2,2)`, `H^(2,3)`, `A` and `a`.
    pub system: usize,
    pub solve: usize,
    /// Evaluating `u = A r + a`.
    pub affine: usize,
}

impl XorBreakdown {
    pub fn total(&self) -> usize {
        self.bp + self.elimination + self.s1 + self.recursion + self.s2 + self.system + self.solve + self.affine
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DecodeStats {
    pub n_d: usize,
    pub n_c: usize,
    pub n_r: usize,
    pub n_u: usize,
    pub n_e: usize,
    pub xor_count: usize,
    pub xors: XorBreakdown,
    pub perm_count: usize,
    /// Mean row weight of the triangulated rows.
    pub dc1: f64,
    /// Mean row weight of the remaining rows.
    pub dc2: f64,
    /// Ones in `H^(1,3)`.
    pub gamma: usize,
    /// Ones in `H^(2,3)`.
    pub rho: usize,
    pub extension_steps: usize,
}

/// Final matrix arrangement: the permutation and the matrix it views (the
/// pruned PCM, or its row-reduced copy in structured mode).
#[derive(Clone, Debug)]
pub struct FinalLayout {
    pub view: crate::gf2::PermutationView,
    pub matrix: SparseBitMatrix,
    pub n_d: usize,
    pub n_c: usize,
    pub n_r: usize,
    pub n_u: usize,
    pub n_e: usize,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    pub codeword: BitVec,
    pub status: DecodeStatus,
    pub stats: DecodeStats,
    /// Codeword bits still unknown when peeling stopped.
    pub bp_unresolved_bits: usize,
    pub layout: Option<FinalLayout>,
    pub trace: Vec<TraceEvent>,
}

/// A pruned PCM prepared for repeated decoding.
#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    pcm: &'a PrunedPcm,
    is_cvn: Vec<bool>,
}

impl<'a> Decoder<'a> {
    pub fn new(pcm: &'a PrunedPcm) -> Self {
        let mut is_cvn = vec![false; pcm.n_prime()];
        for &c in &pcm.cvn_cols {
            is_cvn[c] = true;
        }
        Self { pcm, is_cvn }
    }

    pub fn pcm(&self) -> &PrunedPcm {
        self.pcm
    }

    pub fn decode(&self, y: &ChannelOutput, config: &DecoderConfig) -> Result<DecodeOutcome> {
        let pcm = self.pcm;
        let h = &pcm.matrix;
        let mut trace = Vec::new();
        let mut state = bp_peel(pcm, y)?;
        let bp_unresolved_bits = pcm
            .cvn_cols
            .iter()
            .filter(|&&c| state.col_status[c] != ColStatus::Known)
            .count();
        if config.trace {
            trace.push(TraceEvent::Bp {
                n_d: state.n_d(),
                n_c: state.n_c(),
            });
        }
        if state.n_d() == pcm.n_prime() {
            let layout = config.keep_layout.then(|| state.final_layout(h.clone()));
            let stats = DecodeStats {
                n_d: state.n_d(),
                n_c: state.n_c(),
                n_e: state.remaining_rows().len(),
                xor_count: state.bp_xors,
                xors: XorBreakdown {
                    bp: state.bp_xors,
                    ..Default::default()
                },
                perm_count: state.perm_count,
                ..Default::default()
            };
            if config.trace {
                trace.push(TraceEvent::Final {
                    n_r: 0,
                    n_u: 0,
                    n_e: stats.n_e,
                });
            }
            return Ok(DecodeOutcome {
                codeword: state.values.gather(&pcm.cvn_cols),
                status: DecodeStatus::BpSuccess,
                stats,
                bp_unresolved_bits,
                layout,
                trace,
            });
        }

        let structured = config.mode == DecodeMode::Structured;
        let mut work = structured.then(|| h.clone());
        let mut elimination_xors = 0usize;
        let mut rng = match config.policy {
            SelectorPolicy::RandomCvn { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
            SelectorPolicy::MinResidualCheck => None,
        };
        let steps = triangulate(
            &mut state,
            pcm,
            &self.is_cvn,
            config,
            rng.as_mut(),
            |st, new_rows| {
                if let Some(w) = work.as_mut() {
                    elimination_xors += eliminate_below(w, st, new_rows)?;
                }
                Ok(())
            },
            config.trace.then_some(&mut trace),
        )?;

        let matrix = work.as_ref().unwrap_or(h);
        let mut stats = state.block_stats(matrix);
        if structured && (stats.gamma != stats.n_u || stats.rho != 0) {
            return Err(Error::Internal(format!(
                "structured layout has gamma {} for {} diagonal rows and rho {}",
                stats.gamma, stats.n_u, stats.rho
            )));
        }
        let map = back_substitute(&state, matrix)?;
        let solved = solve_references(&state, matrix, &map)?;
        stats.extension_steps = steps;
        stats.xors = XorBreakdown {
            bp: state.bp_xors,
            elimination: elimination_xors,
            s1: map.s1_xors,
            recursion: map.recursion_xors,
            s2: solved.s2_xors,
            system: solved.system_xors,
            solve: solved.solve_xors,
            affine: 0,
        };
        let (r, status) = match solved.result {
            SolveResult::Unique(r) => (r, DecodeStatus::MlUnique),
            SolveResult::Ambiguous { particular, nullity } => (particular, DecodeStatus::MlAmbiguous { nullity }),
            SolveResult::Inconsistent => unreachable!("rejected by solve_references"),
        };
        let (u, affine_xors) = map.apply(&r);
        stats.xors.affine = affine_xors;
        stats.xor_count = stats.xors.total();

        let mut x = state.values.clone();
        for (i, &c) in state.ref_cols.iter().enumerate() {
            x.set(c, r.get(i));
        }
        for (k, &c) in state.diag_cols.iter().enumerate() {
            x.set(c, u.get(k));
        }
        if !h.mul_vec(&x)?.is_zero() {
            return Err(Error::Internal("decoded assignment violates the PCM".into()));
        }
        let codeword = x.gather(&pcm.cvn_cols);
        if (0..y.len()).any(|i| y.known[i] && codeword.get(i) != y.values.get(i)) {
            return Err(Error::Internal("decoded codeword contradicts known bits".into()));
        }
        if config.trace {
            trace.push(TraceEvent::Final {
                n_r: stats.n_r,
                n_u: stats.n_u,
                n_e: stats.n_e,
            });
        }
        let layout = if config.keep_layout {
            Some(state.final_layout(work.unwrap_or_else(|| h.clone())))
        } else {
            None
        };
        Ok(DecodeOutcome {
            codeword,
            status,
            stats,
            bp_unresolved_bits,
            layout,
            trace,
        })
    }
}

/// After a diagonal extension step, adds each new diagonal row into every
/// remaining row that holds its diagonal column. Each target is modified by
/// the new diagonal rows only, and no new diagonal row holds another's
/// diagonal column, so the order of these additions does not matter.
fn eliminate_below(work: &mut SparseBitMatrix, state: &DecodeState, new_rows: &[(usize, usize)]) -> Result<usize> {
    let mut xors = 0;
    for &(row, col) in new_rows {
        let targets: Vec<usize> = work
            .col(col)
            .iter()
            .copied()
            .filter(|&t| state.row_status[t] == RowStatus::Remaining)
            .collect();
        for t in targets {
            xors += work.row_xor(row, t)?;
        }
    }
    Ok(xors)
}

/// Four-stage ML decoding with the given configuration.
pub fn ml_decode(pcm: &PrunedPcm, y: &ChannelOutput, config: &DecoderConfig) -> Result<DecodeOutcome> {
    Decoder::new(pcm).decode(y, config)
}

/// The row-reduced variant: `H^(1,3) = I` and `H^(2,3) = 0` by construction.
pub fn structured_ml_decode(pcm: &PrunedPcm, y: &ChannelOutput, config: &DecoderConfig) -> Result<DecodeOutcome> {
    let config = DecoderConfig {
        mode: DecodeMode::Structured,
        ..*config
    };
    Decoder::new(pcm).decode(y, &config)
}
