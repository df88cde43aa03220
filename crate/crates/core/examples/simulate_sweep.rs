// A small Monte-Carlo sweep with the peeling-only baseline on the same
// erasure patterns, written as CSV.

use polar_bec::crc::CrcSpec;
use polar_bec::decoder::DecoderConfig;
use polar_bec::polar::PolarCode;
use polar_bec::scheme::Scheme;
use polar_bec::sim::{run_trials, write_csv, SimConfig};

pub fn run_example() -> polar_bec::Result<()> {
    let scheme = Scheme::build(PolarCode::construct(128, 70, 0.5)?, Some(CrcSpec::CRC6))?;
    let cfg = SimConfig {
        eps: vec![0.3, 0.35, 0.4],
        trials: 300,
        seed: 2024,
        decoder: DecoderConfig::default(),
        workers: None,
        bp_baseline: true,
    };
    let rows = run_trials(&scheme, &cfg)?;
    write_csv(&rows, std::io::stdout())?;
    for pair in rows.chunks(2) {
        assert!(pair[0].fer <= pair[1].fer);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polar_bec::Result<()> {
    run_example()
}
