// Builds a polar code from BEC reliabilities and encodes a message two ways:
// with the butterfly encoder and with the dense generator matrix.

use polar_bec::gf2::BitVec;
use polar_bec::polar::{bec_channel_reliabilities, PolarCode};

pub fn run_example() -> polar_bec::Result<()> {
    let code = PolarCode::construct(16, 8, 0.5)?;
    println!("P(16, 8) information set: {:?}", code.info_set());

    let z = bec_channel_reliabilities(code.stages(), 0.5);
    let worst_info = code.info_set().iter().map(|&i| z[i]).fold(0.0, f64::max);
    let best_frozen = code.frozen_set().iter().map(|&i| z[i]).fold(1.0, f64::min);
    println!("worst information z = {worst_info:.4}, best frozen z = {best_frozen:.4}");
    assert!(worst_info <= best_frozen);

    let message = BitVec::from_bit_str("10110010").expect("bit string");
    let codeword = code.encode(&message)?;
    let via_matrix = code.generator_matrix().vec_mul(&code.expand(&message)?)?;
    println!("message  {message:?}\ncodeword {codeword:?}");
    assert_eq!(codeword, via_matrix);
    assert!(code.standard_dense_pcm().mul_vec(&codeword)?.is_zero());
    Ok(())
}

#[allow(dead_code)]
fn main() -> polar_bec::Result<()> {
    run_example()
}
