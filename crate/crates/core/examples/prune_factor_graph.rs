// Prunes the factor graph of P(256, 134) to a sparse parity-check matrix
// and checks it against the code.

use polar_bec::factor_graph::{build_full_pcm, prune, read_pruned, validate_pruned, write_pruned};
use polar_bec::polar::PolarCode;

pub fn run_example() -> polar_bec::Result<()> {
    let code = PolarCode::construct(256, 134, 0.5)?;
    let full = build_full_pcm(&code);
    println!(
        "full graph: {} checks x {} variables",
        full.matrix().rows(),
        full.matrix().cols()
    );

    let (pcm, stats) = prune(&full)?;
    println!(
        "pruned: {} checks x N' = {} variables, density {:.3}%",
        pcm.matrix.rows(),
        pcm.n_prime(),
        100.0 * pcm.density()
    );
    println!("{stats:?}");

    let report = validate_pruned(&pcm, &code);
    println!("{report:?}");
    assert!(report.all_ok());

    let mut file = Vec::new();
    write_pruned(&pcm, &mut file)?;
    assert_eq!(read_pruned(file.as_slice())?, pcm);
    println!("matrix file: {} bytes", file.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> polar_bec::Result<()> {
    run_example()
}
