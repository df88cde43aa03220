// Appends CRC-6 checks to a pruned PCM and compares against adding them
// to the full graph before pruning.

use polar_bec::crc::{
    codeword_domain_constraints, concatenated_pcm, greedy_density_reduction, prune_with_crc_first, CrcSpec,
};
use polar_bec::gf2::BitVec;
use polar_bec::polar::PolarCode;
use polar_bec::scheme::Scheme;

pub fn run_example() -> polar_bec::Result<()> {
    let crc = CrcSpec::CRC6;
    let code = PolarCode::construct(128, 70, 0.5)?;

    let rows = codeword_domain_constraints(&code, &crc)?;
    let reduced = greedy_density_reduction(&rows);
    println!("CRC rows over codeword bits: weight {} -> {} after reduction", rows.weight(), reduced.weight());

    let after = concatenated_pcm(&code, Some(&crc))?;
    let before = prune_with_crc_first(&code, &crc)?;
    println!("CRC added after pruning:  N' = {}", after.n_prime());
    println!("CRC added before pruning: N' = {}", before.n_prime());

    let scheme = Scheme::build(code, Some(crc))?;
    let payload = BitVec::from_support(scheme.payload_len(), &[0, 3, 17, 40, 63]);
    let c = scheme.encode(&payload)?;
    assert!(scheme.dense_pcm()?.mul_vec(&c)?.is_zero());
    println!("payload {} bits -> codeword {} bits, all checks satisfied", payload.len(), c.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> polar_bec::Result<()> {
    run_example()
}
