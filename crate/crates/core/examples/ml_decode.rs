// Decodes one noisy frame of a CRC-aided P(512, 262) code with the
// four-stage ML decoder.

use polar_bec::crc::CrcSpec;
use polar_bec::decoder::{Decoder, DecoderConfig};
use polar_bec::gf2::BitVec;
use polar_bec::polar::PolarCode;
use polar_bec::scheme::Scheme;
use polar_bec::sim::{transmit, BecConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> polar_bec::Result<()> {
    let scheme = Scheme::build(PolarCode::construct(512, 262, 0.5)?, Some(CrcSpec::CRC6))?;
    let decoder = Decoder::new(&scheme.pcm);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let channel = BecConfig::new(0.45, 7)?;

    for trial in 0..8 {
        let payload: BitVec = (0..scheme.payload_len()).map(|_| rng.gen_bool(0.5)).collect();
        let c = scheme.encode(&payload)?;
        let y = transmit(&c, &channel, trial);
        let out = decoder.decode(&y, &DecoderConfig::default())?;
        let s = &out.stats;
        println!(
            "frame {trial}: {} erasures, peeling left {} bits, {:?}, n_r = {}, n_e = {}, {} XORs",
            y.erasures(),
            out.bp_unresolved_bits,
            out.status,
            s.n_r,
            s.n_e,
            s.xor_count
        );
        if out.status.is_unique() {
            assert_eq!(out.codeword, c);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> polar_bec::Result<()> {
    run_example()
}
