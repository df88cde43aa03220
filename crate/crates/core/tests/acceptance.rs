// Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
// exits non-zero if any failed. Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use polar_bec::crc::{concatenated_pcm, prune_with_crc_first, CrcSpec};
use polar_bec::decoder::{
    back_substitute, bp_peel, bp_peel_with_order, brute_force_ml, check_layout, fill_erasures, ml_decode,
    structured_ml_decode, triangulate, ChannelOutput, DecodeStatus, Decoder, DecoderConfig, SelectorPolicy,
};
use polar_bec::factor_graph::{build_full_pcm, extends_to_assignment, prune, prune_graph, validate_pruned, PrunedPcm};
use polar_bec::gf2::{gaussian_solve, BitVec, DenseBitMatrix, SolveResult, SparseBitMatrix};
use polar_bec::polar::PolarCode;
use polar_bec::scheme::Scheme;
use polar_bec::sim::{run_trials, transmit, BecConfig, SimConfig};
use proptest::prelude::*;
use proptest::test_runner::{Config as PropConfig, RngAlgorithm, TestRng, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Pinned tolerances.
const ORACLE_TRIALS: usize = 1000;
const BAND_256_NPRIME: (usize, usize) = (320, 390);
const BAND_256_DENSITY: (f64, f64) = (0.005, 0.009);
const BAND_512_NPRIME: (usize, usize) = (700, 850);
const BAND_512_DENSITY: (f64, f64) = (0.0025, 0.0045);
const CRC_PIPELINE_SAMPLES: usize = 200;
const SCALING_TRIALS: u64 = 10_000;
const SCALING_MAX_NR_FRACTION: f64 = 0.002;
const DOMINANCE_TRIALS: u64 = 10_000;
const SELECTOR_SLACK: f64 = 1.05;
const STRUCTURED_TRIALS: usize = 1000;
const TREND_TRIALS: usize = 2000;
const TREND_EPS: f64 = 0.40;
const TREND_SIGMAS: f64 = 3.0;
const PROPERTY_CASES: u32 = 128;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn random_bits(len: usize, rng: &mut ChaCha8Rng) -> BitVec {
    (0..len).map(|_| rng.gen_bool(0.5)).collect()
}

fn erase(c: &BitVec, eps: f64, rng: &mut ChaCha8Rng) -> ChannelOutput {
    let erased: Vec<bool> = (0..c.len()).map(|_| rng.gen_bool(eps)).collect();
    ChannelOutput::erase(c, &erased).expect("lengths match")
}

fn pruned(code: &PolarCode) -> PrunedPcm {
    prune(&build_full_pcm(code)).expect("pruning succeeds").0
}

fn oracle_equivalence() -> Verdict {
    let mut disagreements = 0;
    let mut tally = [0usize; 3];
    for len in [8usize, 16, 32, 64] {
        let code = PolarCode::construct(len, len / 2, 0.5).unwrap();
        let pcm = pruned(&code);
        let dense = code.standard_dense_pcm();
        let codebook: Option<Vec<BitVec>> = (len <= 16).then(|| {
            (0..1u32 << code.k())
                .map(|m| code.encode(&(0..code.k()).map(|b| m >> b & 1 == 1).collect()).unwrap())
                .collect()
        });
        for eps in [0.3, 0.5] {
            let mut rng = ChaCha8Rng::seed_from_u64(len as u64 * 1000 + (eps * 10.0) as u64);
            for _ in 0..ORACLE_TRIALS {
                let c = code.encode(&random_bits(code.k(), &mut rng)).unwrap();
                let y = erase(&c, eps, &mut rng);
                let out = ml_decode(&pcm, &y, &DecoderConfig::default()).unwrap();
                let ok = match brute_force_ml(&dense, &y).unwrap() {
                    SolveResult::Unique(x) => {
                        tally[out.status.is_unique() as usize] += 1;
                        out.status.is_unique() && out.codeword == fill_erasures(&y, &x)
                    }
                    SolveResult::Ambiguous { nullity, .. } => {
                        tally[2] += 1;
                        out.status == DecodeStatus::MlAmbiguous { nullity }
                            && dense.mul_vec(&out.codeword).unwrap().is_zero()
                            && (0..len).all(|i| !y.known[i] || out.codeword.get(i) == y.values.get(i))
                    }
                    SolveResult::Inconsistent => false,
                };
                let counted = codebook.as_ref().is_none_or(|book| {
                    let fits = book
                        .iter()
                        .filter(|w| (0..len).all(|i| !y.known[i] || w.get(i) == y.values.get(i)))
                        .count();
                    fits == 1 << out.status.nullity()
                });
                if !(ok && counted) {
                    disagreements += 1;
                }
            }
        }
    }
    verdict(
        disagreements == 0,
        format!(
            "{disagreements} disagreements over {} frames ({} unique, {} ambiguous)",
            8 * ORACLE_TRIALS,
            tally[1],
            tally[2]
        ),
    )
}

fn pruned_golden_values() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for (len, k, (lo, hi), (dlo, dhi)) in [
        (256usize, 134usize, BAND_256_NPRIME, BAND_256_DENSITY),
        (512, 262, BAND_512_NPRIME, BAND_512_DENSITY),
    ] {
        let code = PolarCode::construct(len, k, 0.5).unwrap();
        let pcm = pruned(&code);
        let report = validate_pruned(&pcm, &code);
        let n = pcm.n_prime();
        let d = pcm.density();
        let ok = (lo..=hi).contains(&n) && (dlo..=dhi).contains(&d) && report.all_ok();
        pass &= ok;
        parts.push(format!(
            "P({len},{k}) N'={n} [{lo},{hi}] density={:.3}% [{:.2}%,{:.2}%] rank+projection={}",
            100.0 * d,
            100.0 * dlo,
            100.0 * dhi,
            report.all_ok()
        ));
    }
    verdict(pass, parts.join("; "))
}

fn crc_pipeline_comparison() -> Verdict {
    let toy = CrcSpec::new(3, 0x3).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for len in [64usize, 128] {
        let code = PolarCode::construct(len, len / 2 + toy.degree, 0.5).unwrap();
        let scheme = Scheme::build(code.clone(), Some(toy)).unwrap();
        let post = concatenated_pcm(&code, Some(&toy)).unwrap();
        let pre = prune_with_crc_first(&code, &toy).unwrap();
        let payload_len = scheme.payload_len();

        // Both PCMs have the CRC subcode's dimension and contain a basis of it,
        // so their projected codes coincide. Random words outside it must fail.
        let mut same = post.k == payload_len && pre.k == payload_len;
        for i in 0..payload_len {
            let c = scheme.encode(&BitVec::unit(payload_len, i)).unwrap();
            same &= extends_to_assignment(&post, &c) && extends_to_assignment(&pre, &c);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(len as u64);
        for _ in 0..CRC_PIPELINE_SAMPLES {
            let u = random_bits(code.k(), &mut rng);
            let c = code.encode(&u).unwrap();
            let valid = toy.verify(&u);
            same &= extends_to_assignment(&post, &c) == valid && extends_to_assignment(&pre, &c) == valid;
        }
        let larger = pre.n_prime() > post.n_prime();
        pass &= same && larger;
        parts.push(format!(
            "N={len}: same code={same}, N' before pruning {} > after {}: {larger}",
            pre.n_prime(),
            post.n_prime()
        ));
    }
    verdict(pass, parts.join("; "))
}

fn crc6_scheme(len: usize) -> Scheme {
    let code = PolarCode::construct(len, len / 2 + 6, 0.5).unwrap();
    Scheme::build(code, Some(CrcSpec::CRC6)).unwrap()
}

fn sim(eps: Vec<f64>, trials: u64, policy: SelectorPolicy, bp_baseline: bool) -> SimConfig {
    SimConfig {
        eps,
        trials,
        seed: 20_240_601,
        decoder: DecoderConfig {
            policy,
            ..Default::default()
        },
        workers: None,
        bp_baseline,
    }
}

fn reference_scaling() -> Verdict {
    let scheme = crc6_scheme(512);
    let rows = run_trials(
        &scheme,
        &sim(vec![0.37], SCALING_TRIALS, SelectorPolicy::MinResidualCheck, false),
    )
    .unwrap();
    let frac = rows[0].mean_nr / 512.0;
    verdict(
        frac < SCALING_MAX_NR_FRACTION,
        format!(
            "P(512,262)+CRC6 eps=0.37, {SCALING_TRIALS} trials: mean n_r = {:.4}, n_r/N = {:.5} < {SCALING_MAX_NR_FRACTION}",
            rows[0].mean_nr, frac
        ),
    )
}

fn dominance_and_selector() -> Verdict {
    let scheme = crc6_scheme(512);
    let grid: Vec<f64> = (0..8).map(|i| 0.30 + 0.02 * i as f64).collect();
    let rows = run_trials(
        &scheme,
        &sim(grid, DOMINANCE_TRIALS, SelectorPolicy::MinResidualCheck, true),
    )
    .unwrap();
    let mut dominance = true;
    for pair in rows.chunks(2) {
        dominance &= pair[0].fer <= pair[1].fer;
    }
    let worst = rows
        .chunks(2)
        .map(|p| format!("{:.2}:{:.4}<={:.4}", p[0].eps, p[0].fer, p[1].fer))
        .collect::<Vec<_>>()
        .join(" ");

    let mut selector = true;
    let mut parts = Vec::new();
    for eps in [0.35, 0.40] {
        let min = run_trials(&scheme, &sim(vec![eps], DOMINANCE_TRIALS, SelectorPolicy::MinResidualCheck, false)).unwrap();
        let rnd = run_trials(
            &scheme,
            &sim(vec![eps], DOMINANCE_TRIALS, SelectorPolicy::RandomCvn { seed: 0 }, false),
        )
        .unwrap();
        let ok = min[0].mean_nr <= rnd[0].mean_nr * SELECTOR_SLACK;
        selector &= ok;
        parts.push(format!("eps={eps}: min-residual n_r {:.4} vs random {:.4}", min[0].mean_nr, rnd[0].mean_nr));
    }
    verdict(
        dominance && selector,
        format!("ML fer <= BP fer at every point: {dominance} [{worst}]; selector: {selector} ({})", parts.join(", ")),
    )
}

fn structured_equivalence() -> Verdict {
    let mut mismatches = 0;
    let mut layout_failures = 0;
    let mut triangulated = 0;
    for (len, k) in [(32usize, 16usize), (128, 64)] {
        let code = PolarCode::construct(len, k, 0.5).unwrap();
        let pcm = pruned(&code);
        let mut rng = ChaCha8Rng::seed_from_u64(len as u64 + 77);
        let config = DecoderConfig {
            keep_layout: true,
            ..Default::default()
        };
        for _ in 0..STRUCTURED_TRIALS {
            let c = code.encode(&random_bits(k, &mut rng)).unwrap();
            let eps = rng.gen_range(0.3..0.6);
            let y = erase(&c, eps, &mut rng);
            let base = ml_decode(&pcm, &y, &config).unwrap();
            let st = structured_ml_decode(&pcm, &y, &config).unwrap();
            if base.status != st.status || base.codeword != st.codeword {
                mismatches += 1;
            }
            if st.status != DecodeStatus::BpSuccess {
                triangulated += 1;
                let b = check_layout(base.layout.as_ref().unwrap()).unwrap();
                let s = check_layout(st.layout.as_ref().unwrap()).unwrap();
                if !(b.h13_unit_lower_triangular && s.h13_identity && s.h23_zero && s.decoded_block_ok) {
                    layout_failures += 1;
                }
            }
        }
    }
    verdict(
        mismatches == 0 && layout_failures == 0,
        format!(
            "{mismatches} status/codeword mismatches over {} frames; {layout_failures} layout failures over {triangulated} triangulated instances",
            2 * STRUCTURED_TRIALS
        ),
    )
}

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn complexity_trend() -> Verdict {
    let mut identity_violations = 0;
    let mut points = Vec::new();
    for len in [128usize, 256, 512, 1024] {
        let code = PolarCode::construct(len, len / 2, 0.5).unwrap();
        let scheme = Scheme::build(code, None).unwrap();
        let decoder = Decoder::new(&scheme.pcm);
        let bec = BecConfig::new(TREND_EPS, 99).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let (mut nr, mut ne) = (Vec::new(), Vec::new());
        for t in 0..TREND_TRIALS {
            let c = scheme.encode(&random_bits(scheme.payload_len(), &mut rng)).unwrap();
            let y = transmit(&c, &bec, t as u64);
            let s = decoder.decode(&y, &DecoderConfig::default()).unwrap().stats;
            if s.xors.recursion != (s.n_r + 1) * (s.gamma - s.n_u) {
                identity_violations += 1;
            }
            nr.push(s.n_r as f64);
            ne.push(s.n_e as f64);
        }
        points.push((len, mean_and_se(&nr), mean_and_se(&ne)));
    }
    let within = |a: (f64, f64), b: (f64, f64)| b.0 <= a.0 + TREND_SIGMAS * (a.1 * a.1 + b.1 * b.1).sqrt();
    let monotone = points
        .windows(2)
        .all(|w| within(w[0].1, w[1].1) && within(w[0].2, w[1].2));
    let table = points
        .iter()
        .map(|(n, r, e)| format!("N={n}: n_r={:.3}±{:.3} n_e={:.3}±{:.3}", r.0, r.1, e.0, e.1))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(
        monotone && identity_violations == 0,
        format!("non-increasing within {TREND_SIGMAS} sigma: {monotone} [{table}]; xor identity violations: {identity_violations}"),
    )
}

fn property(name: &str, check: impl Fn(u64) -> Result<(), TestCaseError>) -> Result<(), String> {
    let config = PropConfig {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..PropConfig::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&any::<u64>(), check).map_err(|e| format!("{name}: {e}"))
}

fn dual_consistency(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = (rng.gen_range(2..12), rng.gen_range(1..40));
    let supports: Vec<Vec<usize>> = (0..rows)
        .map(|_| (0..cols).filter(|_| rng.gen_bool(0.2)).collect())
        .collect();
    let mut m = SparseBitMatrix::from_row_supports(cols, supports).unwrap();
    let mut dense = m.to_dense();
    prop_assert!(m.is_dual_consistent());
    for _ in 0..20 {
        let (a, b) = (rng.gen_range(0..rows), rng.gen_range(0..rows));
        if a == b {
            continue;
        }
        m.row_xor(a, b).unwrap();
        dense.row_xor(a, b).unwrap();
        prop_assert!(m.is_dual_consistent());
    }
    prop_assert_eq!(m.to_dense(), dense);
    Ok(())
}

fn small_code(rng: &mut ChaCha8Rng) -> (PolarCode, PrunedPcm) {
    let len = [16usize, 32, 64][rng.gen_range(0..3)];
    let k = rng.gen_range(1..len);
    let code = PolarCode::construct(len, k, rng.gen_range(0.2..0.8)).unwrap();
    let pcm = pruned(&code);
    (code, pcm)
}

fn schedule_invariance(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (code, pcm) = small_code(&mut rng);
    let c = code.encode(&random_bits(code.k(), &mut rng)).unwrap();
    let y = erase(&c, rng.gen_range(0.2..0.7), &mut rng);
    let forward: Vec<usize> = (0..pcm.matrix.rows()).collect();
    let backward: Vec<usize> = forward.iter().rev().copied().collect();
    let mut shuffled = forward.clone();
    shuffled.shuffle(&mut rng);
    let fixpoint = |order: &[usize]| {
        let s = bp_peel_with_order(&pcm, &y, order).unwrap();
        let mut v: Vec<(usize, bool)> = s.decoded_cols.iter().map(|&c| (c, s.values.get(c))).collect();
        v.sort_unstable();
        v
    };
    let reference = fixpoint(&forward);
    prop_assert_eq!(&fixpoint(&backward), &reference);
    prop_assert_eq!(&fixpoint(&shuffled), &reference);
    Ok(())
}

fn pruning_idempotence(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (_, pcm) = small_code(&mut rng);
    let (again, _) = prune_graph(&pcm.to_graph()).unwrap();
    prop_assert_eq!(again, pcm);
    Ok(())
}

/// The unique full assignment of the PCM variables that projects to `c`.
fn true_assignment(pcm: &PrunedPcm, c: &BitVec) -> BitVec {
    let dense = pcm.matrix.to_dense();
    let hidden: Vec<usize> = (0..pcm.n_prime()).filter(|x| !pcm.cvn_cols.contains(x)).collect();
    let rhs = dense.select_columns(&pcm.cvn_cols).mul_vec(c).unwrap();
    let Ok(SolveResult::Unique(xh)) = gaussian_solve(&dense.select_columns(&hidden).augment(&rhs).unwrap()) else {
        panic!("hidden variables not determined by the codeword")
    };
    let mut x = BitVec::zeros(pcm.n_prime());
    for (j, &col) in hidden.iter().enumerate() {
        x.set(col, xh.get(j));
    }
    for (i, &col) in pcm.cvn_cols.iter().enumerate() {
        x.set(col, c.get(i));
    }
    x
}

fn affine_correctness(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (code, pcm) = small_code(&mut rng);
    let c = code.encode(&random_bits(code.k(), &mut rng)).unwrap();
    let y = erase(&c, rng.gen_range(0.3..0.8), &mut rng);
    let mut is_cvn = vec![false; pcm.n_prime()];
    for &col in &pcm.cvn_cols {
        is_cvn[col] = true;
    }
    let mut state = bp_peel(&pcm, &y).unwrap();
    let config = DecoderConfig::default();
    triangulate(&mut state, &pcm, &is_cvn, &config, None, |_, _| Ok(()), None).unwrap();
    let map = back_substitute(&state, &pcm.matrix).unwrap();
    let x = true_assignment(&pcm, &c);
    let (u, _) = map.apply(&x.gather(&state.ref_cols));
    prop_assert_eq!(u, x.gather(&state.diag_cols));
    Ok(())
}

fn encoder_equivalence(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = 1usize << rng.gen_range(1..10);
    let k = rng.gen_range(0..=len);
    let code = PolarCode::construct(len, k, rng.gen_range(0.05..0.95)).unwrap();
    let payload = random_bits(k, &mut rng);
    let g: DenseBitMatrix = code.generator_matrix();
    prop_assert_eq!(code.encode(&payload).unwrap(), g.vec_mul(&code.expand(&payload).unwrap()).unwrap());
    Ok(())
}

fn invariant_suites() -> Verdict {
    let results = [
        property("sparse dual consistency", dual_consistency),
        property("BP schedule invariance", schedule_invariance),
        property("pruning idempotence", pruning_idempotence),
        property("affine-map correctness", affine_correctness),
        property("encoder equivalence", encoder_equivalence),
    ];
    let failures: Vec<String> = results.into_iter().filter_map(Result::err).collect();
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("5 suites x {PROPERTY_CASES} cases, zero failures")
        } else {
            failures.join("; ")
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("pruned PCM golden values", pruned_golden_values),
        ("CRC pipeline comparison", crc_pipeline_comparison),
        ("reference-variable scaling", reference_scaling),
        ("ML dominance and selector comparison", dominance_and_selector),
        ("structured-mode equivalence", structured_equivalence),
        ("complexity trend", complexity_trend),
        ("invariant suites", invariant_suites),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "ACCEPTANCE {id} {tag} {name} ({:.1}s): {}",
            start.elapsed().as_secs_f64(),
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    }
}
