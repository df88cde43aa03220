// The row-reduced decoder variant: after every extension step the new
// diagonal rows are added into the remaining checks, so the final layout
// has an identity diagonal block and nothing below it.

use polar_bec::decoder::{check_layout, ml_decode, structured_ml_decode, ChannelOutput, DecoderConfig};
use polar_bec::gf2::BitVec;
use polar_bec::polar::PolarCode;
use polar_bec::scheme::Scheme;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> polar_bec::Result<()> {
    let scheme = Scheme::build(PolarCode::construct(128, 64, 0.5)?, None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let config = DecoderConfig {
        keep_layout: true,
        batch: 2,
        ..Default::default()
    };

    for _ in 0..4 {
        let payload: BitVec = (0..64).map(|_| rng.gen_bool(0.5)).collect();
        let c = scheme.encode(&payload)?;
        let erased: Vec<bool> = (0..128).map(|_| rng.gen_bool(0.45)).collect();
        let y = ChannelOutput::erase(&c, &erased)?;

        let plain = ml_decode(&scheme.pcm, &y, &config)?;
        let reduced = structured_ml_decode(&scheme.pcm, &y, &config)?;
        assert_eq!(plain.status, reduced.status);
        assert_eq!(plain.codeword, reduced.codeword);

        let report = check_layout(reduced.layout.as_ref().expect("layout kept"))?;
        println!(
            "{:?}: baseline gamma = {} rho = {}, structured identity = {} zero below = {}, {} elimination XORs",
            reduced.status,
            plain.stats.gamma,
            plain.stats.rho,
            report.h13_identity,
            report.h23_zero,
            reduced.stats.xors.elimination
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polar_bec::Result<()> {
    run_example()
}
