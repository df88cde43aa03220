// Cross-checks the sparse ML decoder against dense Gaussian elimination on
// the standard parity-check matrix.

use polar_bec::decoder::{brute_force_ml, fill_erasures, ml_decode, ChannelOutput, DecoderConfig};
use polar_bec::gf2::{BitVec, SolveResult};
use polar_bec::polar::PolarCode;
use polar_bec::scheme::Scheme;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> polar_bec::Result<()> {
    let scheme = Scheme::build(PolarCode::construct(32, 16, 0.5)?, None)?;
    let dense = scheme.dense_pcm()?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut unique, mut ambiguous) = (0, 0);

    for _ in 0..200 {
        let payload: BitVec = (0..16).map(|_| rng.gen_bool(0.5)).collect();
        let c = scheme.encode(&payload)?;
        let erased: Vec<bool> = (0..32).map(|_| rng.gen_bool(0.5)).collect();
        let y = ChannelOutput::erase(&c, &erased)?;

        let fast = ml_decode(&scheme.pcm, &y, &DecoderConfig::default())?;
        match brute_force_ml(&dense, &y)? {
            SolveResult::Unique(x) => {
                assert!(fast.status.is_unique());
                assert_eq!(fast.codeword, fill_erasures(&y, &x));
                unique += 1;
            }
            SolveResult::Ambiguous { nullity, .. } => {
                assert_eq!(fast.status.nullity(), nullity);
                ambiguous += 1;
            }
            SolveResult::Inconsistent => unreachable!("channel output is always consistent"),
        }
    }
    println!("200 frames agree: {unique} unique, {ambiguous} ambiguous");
    Ok(())
}

#[allow(dead_code)]
fn main() -> polar_bec::Result<()> {
    run_example()
}
