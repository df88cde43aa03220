//! Monte-Carlo simulation over the erasure channel.

use std::io::Write;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decoder::{ChannelOutput, DecodeStatus, Decoder, DecoderConfig, SelectorPolicy};
use crate::error::{ensure, Error, Result};
use crate::gf2::BitVec;
use crate::scheme::Scheme;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_964;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BecConfig {
    pub eps: f64,
    pub seed: u64,
}

impl BecConfig {
    pub fn new(eps: f64, seed: u64) -> Result<Self> {
        ensure!((0.0..=1.0).contains(&eps), InvalidInput, "erasure probability {eps} outside [0, 1]");
        Ok(Self { eps, seed })
    }

    pub fn capacity(&self) -> f64 {
        1.0 - self.eps
    }
}

/// Counter-based generator: the key is `(seed, eps)`, the stream selects
/// the trial and what the numbers are used for.
fn stream(cfg: &BecConfig, trial: u64, purpose: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&cfg.seed.to_le_bytes());
    key[8..16].copy_from_slice(&cfg.eps.to_bits().to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial.wrapping_mul(2).wrapping_add(purpose));
    rng
}

/// Erases each bit of `c` independently with probability `eps`.
pub fn transmit(c: &BitVec, cfg: &BecConfig, trial: u64) -> ChannelOutput {
    let mut rng = stream(cfg, trial, 0);
    let erased: Vec<bool> = (0..c.len()).map(|_| rng.gen_bool(cfg.eps)).collect();
    ChannelOutput::erase(c, &erased).expect("mask matches codeword")
}

/// Outcome of one simulated frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub frame_error: bool,
    pub bit_errors: usize,
    pub n_r: usize,
    pub n_u: usize,
    pub n_e: usize,
    pub xors: usize,
    /// Peeling alone left codeword bits unresolved.
    pub bp_frame_error: bool,
    /// Codeword bits peeling left unresolved, counted as errors.
    pub bp_bit_errors: usize,
    pub bp_xors: usize,
}

/// Integer sums over trials. Merging is associative and commutative, so the
/// totals do not depend on how trials are split across workers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub trials: u64,
    pub bits_per_frame: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub n_r: u64,
    pub n_e: u64,
    pub n_u: u64,
    pub xors: u64,
    pub bp_frame_errors: u64,
    pub bp_bit_errors: u64,
    pub bp_xors: u64,
}

impl Tally {
    pub fn add(&mut self, r: &TrialRecord) {
        self.trials += 1;
        self.frame_errors += r.frame_error as u64;
        self.bit_errors += r.bit_errors as u64;
        self.n_r += r.n_r as u64;
        self.n_e += r.n_e as u64;
        self.n_u += r.n_u as u64;
        self.xors += r.xors as u64;
        self.bp_frame_errors += r.bp_frame_error as u64;
        self.bp_bit_errors += r.bp_bit_errors as u64;
        self.bp_xors += r.bp_xors as u64;
    }

    pub fn merge(mut self, o: Tally) -> Tally {
        self.trials += o.trials;
        self.bits_per_frame = self.bits_per_frame.max(o.bits_per_frame);
        self.frame_errors += o.frame_errors;
        self.bit_errors += o.bit_errors;
        self.n_r += o.n_r;
        self.n_e += o.n_e;
        self.n_u += o.n_u;
        self.xors += o.xors;
        self.bp_frame_errors += o.bp_frame_errors;
        self.bp_bit_errors += o.bp_bit_errors;
        self.bp_xors += o.bp_xors;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub trials: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub fer: f64,
    pub fer_lo: f64,
    pub fer_hi: f64,
    /// Bit errors over all transmitted codeword bits.
    pub ber: f64,
    pub mean_nr: f64,
    pub mean_ne: f64,
    pub mean_xors: f64,
    /// Rows left after peeling: triangulated plus remaining.
    pub mean_decode_rows: f64,
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

fn finish(trials: u64, bits: u64, frame_errors: u64, bit_errors: u64, n_r: u64, n_e: u64, xors: u64, rows: u64) -> AggregateStats {
    let t = trials as f64;
    let (fer_lo, fer_hi) = wilson_interval(frame_errors, trials);
    AggregateStats {
        trials,
        frame_errors,
        bit_errors,
        fer: frame_errors as f64 / t,
        fer_lo,
        fer_hi,
        ber: bit_errors as f64 / (t * bits as f64),
        mean_nr: n_r as f64 / t,
        mean_ne: n_e as f64 / t,
        mean_xors: xors as f64 / t,
        mean_decode_rows: rows as f64 / t,
    }
}

impl Tally {
    pub fn ml_stats(&self) -> AggregateStats {
        finish(
            self.trials,
            self.bits_per_frame,
            self.frame_errors,
            self.bit_errors,
            self.n_r,
            self.n_e,
            self.xors,
            self.n_u + self.n_e,
        )
    }

    pub fn bp_stats(&self) -> AggregateStats {
        finish(
            self.trials,
            self.bits_per_frame,
            self.bp_frame_errors,
            self.bp_bit_errors,
            0,
            0,
            self.bp_xors,
            0,
        )
    }
}

/// Aggregates ML results of frames of `bits_per_frame` bits.
pub fn aggregate(records: &[TrialRecord], bits_per_frame: usize) -> Result<AggregateStats> {
    ensure!(!records.is_empty(), InvalidInput, "no trial records to aggregate");
    ensure!(bits_per_frame > 0, InvalidInput, "frames must have at least one bit");
    let mut t = Tally {
        bits_per_frame: bits_per_frame as u64,
        ..Default::default()
    };
    for r in records {
        t.add(r);
    }
    Ok(t.ml_stats())
}

/// Runs one frame: random payload, CRC, encode, erase, decode, compare.
pub fn run_trial(scheme: &Scheme, decoder: &Decoder, cfg: &BecConfig, config: &DecoderConfig, trial: u64) -> Result<TrialRecord> {
    let mut rng = stream(cfg, trial, 1);
    let payload: BitVec = (0..scheme.payload_len()).map(|_| rng.gen_bool(0.5)).collect();
    let c = scheme.encode(&payload)?;
    let y = transmit(&c, cfg, trial);
    let mut config = *config;
    if let SelectorPolicy::RandomCvn { seed } = config.policy {
        config.policy = SelectorPolicy::RandomCvn {
            seed: seed ^ rng.next_u64(),
        };
    }
    let out = decoder.decode(&y, &config)?;
    let bit_errors = out.codeword.hamming_distance(&c);
    Ok(TrialRecord {
        frame_error: matches!(out.status, DecodeStatus::MlAmbiguous { .. }) || bit_errors > 0,
        bit_errors,
        n_r: out.stats.n_r,
        n_u: out.stats.n_u,
        n_e: out.stats.n_e,
        xors: out.stats.xor_count,
        bp_frame_error: out.bp_unresolved_bits > 0,
        bp_bit_errors: out.bp_unresolved_bits,
        bp_xors: out.stats.xors.bp,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub eps: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub decoder: DecoderConfig,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Also report peeling alone on the same erasure patterns.
    pub bp_baseline: bool,
}

/// One output line: a decoder at one erasure probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimRow {
    pub eps: f64,
    #[serde(rename = "N")]
    pub len: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub crc: usize,
    pub mode: String,
    pub policy: String,
    pub trials: u64,
    pub fer: f64,
    pub fer_lo: f64,
    pub fer_hi: f64,
    pub ber: f64,
    pub mean_nr: f64,
    pub mean_ne: f64,
    pub mean_xors: f64,
    pub mean_decode_rows: f64,
}

impl SimRow {
    fn new(scheme: &Scheme, eps: f64, mode: &str, policy: &str, s: &AggregateStats) -> Self {
        Self {
            eps,
            len: scheme.len(),
            k: scheme.code.k(),
            crc: scheme.crc_degree(),
            mode: mode.into(),
            policy: policy.into(),
            trials: s.trials,
            fer: s.fer,
            fer_lo: s.fer_lo,
            fer_hi: s.fer_hi,
            ber: s.ber,
            mean_nr: s.mean_nr,
            mean_ne: s.mean_ne,
            mean_xors: s.mean_xors,
            mean_decode_rows: s.mean_decode_rows,
        }
    }
}

/// Tallies `trials` frames at one erasure probability.
pub fn tally_point(scheme: &Scheme, eps: f64, cfg: &SimConfig) -> Result<Tally> {
    let bec = BecConfig::new(eps, cfg.seed)?;
    let decoder = Decoder::new(&scheme.pcm);
    let empty = Tally {
        bits_per_frame: scheme.len() as u64,
        ..Default::default()
    };
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let r = run_trial(scheme, &decoder, &bec, &cfg.decoder, t)?;
            let mut one = empty;
            one.add(&r);
            Ok(one)
        })
        .try_reduce(|| empty, |a, b| Ok(a.merge(b)))
}

/// Runs every erasure probability of the grid. Results depend only on the
/// configuration, never on the number of workers.
pub fn run_trials(scheme: &Scheme, cfg: &SimConfig) -> Result<Vec<SimRow>> {
    ensure!(cfg.trials >= 1, InvalidInput, "need at least one trial");
    ensure!(!cfg.eps.is_empty(), InvalidInput, "need at least one erasure probability");
    let work = || -> Result<Vec<SimRow>> {
        let mut rows = Vec::new();
        for &eps in &cfg.eps {
            let t = tally_point(scheme, eps, cfg)?;
            rows.push(SimRow::new(
                scheme,
                eps,
                cfg.decoder.mode.name(),
                cfg.decoder.policy.name(),
                &t.ml_stats(),
            ));
            if cfg.bp_baseline {
                rows.push(SimRow::new(scheme, eps, "bp", "none", &t.bp_stats()));
            }
        }
        Ok(rows)
    };
    match cfg.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidInput(format!("cannot start {n} workers: {e}")))?
            .install(work),
        None => work(),
    }
}

pub fn write_csv<W: Write>(rows: &[SimRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(rows: &[SimRow], out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, rows)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crc::CrcSpec;
    use crate::polar::PolarCode;

    fn scheme(len: usize, k: usize) -> Scheme {
        Scheme::build(PolarCode::construct(len, k, 0.5).unwrap(), None).unwrap()
    }

    fn config(eps: Vec<f64>, trials: u64) -> SimConfig {
        SimConfig {
            eps,
            trials,
            seed: 7,
            decoder: DecoderConfig::default(),
            workers: None,
            bp_baseline: true,
        }
    }

    #[test]
    fn transmit_extremes_and_concentration() {
        let c = BitVec::ones(100_000);
        let none = transmit(&c, &BecConfig::new(0.0, 1).unwrap(), 0);
        assert_eq!(none.erasures(), 0);
        let all = transmit(&c, &BecConfig::new(1.0, 1).unwrap(), 0);
        assert_eq!(all.erasures(), 100_000);
        let half = transmit(&c, &BecConfig::new(0.5, 1).unwrap(), 3);
        let sigma = (100_000f64 * 0.25).sqrt();
        assert!((half.erasures() as f64 - 50_000.0).abs() < 3.0 * sigma);
        assert!(BecConfig::new(1.5, 0).is_err());
        assert_eq!(BecConfig::new(0.3, 0).unwrap().capacity(), 0.7);
    }

    #[test]
    fn trials_use_distinct_streams() {
        let c = BitVec::zeros(64);
        let cfg = BecConfig::new(0.5, 9).unwrap();
        assert_ne!(transmit(&c, &cfg, 0), transmit(&c, &cfg, 1));
        assert_eq!(transmit(&c, &cfg, 5), transmit(&c, &cfg, 5));
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 10);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.35);
        let (lo, hi) = wilson_interval(10, 10);
        assert!(lo > 0.65 && hi > 1.0 - 1e-12);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn aggregate_exact_fractions() {
        let mut records = vec![TrialRecord::default(); 10];
        let s = aggregate(&records, 8).unwrap();
        assert_eq!((s.fer, s.ber), (0.0, 0.0));
        assert!(s.fer_hi > 0.0);
        for (i, r) in records.iter_mut().enumerate().take(4) {
            r.frame_error = true;
            r.bit_errors = 2;
            r.n_r = i;
        }
        let s = aggregate(&records, 8).unwrap();
        assert_eq!(s.fer, 0.4);
        assert_eq!(s.ber, 8.0 / 80.0);
        assert_eq!(s.mean_nr, 6.0 / 10.0);
        for r in &mut records {
            r.frame_error = true;
        }
        assert_eq!(aggregate(&records, 8).unwrap().fer, 1.0);
        assert!(aggregate(&[], 8).is_err());
    }

    #[test]
    fn extreme_channels() {
        let s = scheme(32, 16);
        let rows = run_trials(&s, &config(vec![0.0, 1.0], 20)).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!((rows[0].fer, rows[0].ber, rows[0].mean_nr), (0.0, 0.0, 0.0));
        assert_eq!(rows[2].fer, 1.0);
        assert_eq!(rows[3].fer, 1.0);
    }

    #[test]
    fn reproducible_and_worker_invariant() {
        let s = Scheme::build(PolarCode::construct(64, 38, 0.5).unwrap(), Some(CrcSpec::CRC6)).unwrap();
        let mut cfg = config(vec![0.35, 0.45], 300);
        cfg.workers = Some(1);
        let a = run_trials(&s, &cfg).unwrap();
        cfg.workers = Some(4);
        let b = run_trials(&s, &cfg).unwrap();
        assert_eq!(a, b);
        for pair in a.chunks(2) {
            assert!(pair[0].fer <= pair[1].fer);
            assert!(pair[0].ber <= pair[0].fer);
        }
    }

    #[test]
    fn csv_has_expected_header() {
        let s = scheme(16, 8);
        let rows = run_trials(&s, &config(vec![0.2], 5)).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "eps,N,K,crc,mode,policy,trials,fer,fer_lo,fer_hi,ber,mean_nr,mean_ne,mean_xors,mean_decode_rows"
        );
        assert_eq!(text.lines().count(), 3);
        let mut json = Vec::new();
        write_json(&rows, &mut json).unwrap();
        let back: Vec<SimRow> = serde_json::from_slice(&json).unwrap();
        assert_eq!(back, rows);
    }
}
