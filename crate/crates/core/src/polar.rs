//! Polar code construction for the erasure channel and encoding.
//!
//! Conventions: bit indices are 0-based. The generator is
//! `G_N = B_N · F^{⊗n}` with `F = [[1,0],[1,1]]` and `B_N` the bit-reversal
//! permutation, and codewords are `c^T = u^T · G_N`. Because `B_N` commutes
//! with `F^{⊗n}` the encoder runs the butterflies on `u` in natural order and
//! bit-reverses the result.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::gf2::{BitVec, DenseBitMatrix};

/// Reverses the low `stages` bits of `i`.
pub fn bit_reverse(i: usize, stages: u32) -> usize {
    if stages == 0 {
        return 0;
    }
    i.reverse_bits() >> (usize::BITS - stages)
}

/// Erasure probability of every synthetic channel after `stages` levels of
/// polarization of a BEC with erasure probability `design_eps`.
///
/// Each level maps a channel with erasure probability `z` to the pair
/// `(2z − z², z²)`, placed at indices `2i` and `2i + 1`. The result is in
/// the bit-index order used by [`PolarCode::encode`].
pub fn bec_channel_reliabilities(stages: u32, design_eps: f64) -> Vec<f64> {
    let mut z = vec![design_eps];
    for _ in 0..stages {
        z = z
            .iter()
            .flat_map(|&z| [2.0 * z - z * z, z * z])
            .collect();
    }
    z
}

/// A polar code: blocklength, information set and the design parameter it
/// was built from. Frozen bits are always zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarCode {
    len: usize,
    stages: u32,
    info_set: Vec<usize>,
    frozen: Vec<bool>,
    design_eps: f64,
}

impl PolarCode {
    /// Picks the `k` synthetic channels with the smallest erasure
    /// probability; ties go to the smaller index.
    pub fn construct(len: usize, k: usize, design_eps: f64) -> Result<Self> {
        ensure!(
            len.is_power_of_two(),
            InvalidInput,
            "blocklength {len} is not a power of two"
        );
        ensure!(k <= len, InvalidInput, "K = {k} exceeds blocklength {len}");
        ensure!(
            design_eps > 0.0 && design_eps < 1.0,
            InvalidInput,
            "design erasure probability {design_eps} must lie in (0, 1)"
        );
        let stages = len.trailing_zeros();
        let z = bec_channel_reliabilities(stages, design_eps);
        let mut order: Vec<usize> = (0..len).collect();
        order.sort_by(|&a, &b| z[a].total_cmp(&z[b]).then(a.cmp(&b)));
        let mut info: Vec<usize> = order[..k].to_vec();
        info.sort_unstable();
        Self::from_info_set(len, info, design_eps)
    }

    /// Imports a code with an explicit information set.
    pub fn from_info_set(len: usize, info_set: Vec<usize>, design_eps: f64) -> Result<Self> {
        ensure!(
            len.is_power_of_two(),
            InvalidInput,
            "blocklength {len} is not a power of two"
        );
        ensure!(
            info_set.windows(2).all(|w| w[0] < w[1]),
            InvalidInput,
            "information set must be strictly increasing"
        );
        ensure!(
            info_set.last().is_none_or(|&i| i < len),
            InvalidInput,
            "information index out of range for N = {len}"
        );
        let mut frozen = vec![true; len];
        for &i in &info_set {
            frozen[i] = false;
        }
        Ok(Self {
            len,
            stages: len.trailing_zeros(),
            info_set,
            frozen,
            design_eps,
        })
    }

    /// Blocklength `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of butterfly stages, `log2 N`.
    pub fn stages(&self) -> u32 {
        self.stages
    }

    /// Dimension `K`.
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn info_set(&self) -> &[usize] {
        &self.info_set
    }

    pub fn frozen_set(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.frozen[i]).collect()
    }

    pub fn is_frozen(&self, i: usize) -> bool {
        self.frozen[i]
    }

    pub fn design_eps(&self) -> f64 {
        self.design_eps
    }

    /// Places `payload` on the information set, zeros elsewhere.
    pub fn expand(&self, payload: &BitVec) -> Result<BitVec> {
        ensure!(
            payload.len() == self.k(),
            Contract,
            "payload has {} bits, code dimension is {}",
            payload.len(),
            self.k()
        );
        let mut u = BitVec::zeros(self.len);
        for (j, &i) in self.info_set.iter().enumerate() {
            if payload.get(j) {
                u.set(i, true);
            }
        }
        Ok(u)
    }

    /// Inverse of [`expand`](Self::expand); ignores frozen positions.
    pub fn extract(&self, full_u: &BitVec) -> BitVec {
        full_u.gather(&self.info_set)
    }

    /// Encodes a `K`-bit payload.
    pub fn encode(&self, payload: &BitVec) -> Result<BitVec> {
        let u = self.expand(payload)?;
        Ok(encode_full(&u))
    }

    pub fn generator_matrix(&self) -> DenseBitMatrix {
        generator_matrix(self.len)
    }

    /// The dense `(N−K) × N` parity-check matrix. Row `j` is column `f_j`
    /// of `G_N` for the `j`-th frozen index, since `u = G_N^T c` and frozen
    /// coordinates of `u` are zero.
    pub fn standard_dense_pcm(&self) -> DenseBitMatrix {
        let gt = self.generator_matrix().transpose();
        let rows = self
            .frozen_set()
            .into_iter()
            .map(|f| gt.row(f).clone())
            .collect();
        DenseBitMatrix::from_rows(self.len, rows).expect("rows have length N")
    }
}

/// Runs the butterfly network on a full input word (frozen positions
/// included) and returns every layer: `layers[0] = u`, `layers[s + 1]` is the
/// state after stage `s`, which combines positions `j` and `j + 2^s`. The
/// codeword is `layers[n]` read in bit-reversed order.
pub fn encode_layers(full_u: &BitVec) -> Vec<BitVec> {
    let len = full_u.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let stages = len.trailing_zeros();
    let mut layers = Vec::with_capacity(stages as usize + 1);
    let mut w = full_u.clone();
    layers.push(w.clone());
    for s in 0..stages {
        let half = 1usize << s;
        for j in (0..len).filter(|j| j & half == 0) {
            if w.get(j + half) {
                w.flip(j);
            }
        }
        layers.push(w.clone());
    }
    layers
}

/// `u^T · G_N` in `O(N log N)`.
pub fn encode_full(full_u: &BitVec) -> BitVec {
    let len = full_u.len();
    let stages = len.trailing_zeros();
    let w = encode_layers(full_u).pop().expect("at least one layer");
    (0..len).map(|i| w.get(bit_reverse(i, stages))).collect()
}

/// `G_N = B_N · F^{⊗n}` as a dense matrix; row `i` encodes the unit word `e_i`.
pub fn generator_matrix(len: usize) -> DenseBitMatrix {
    let rows = (0..len).map(|i| encode_full(&BitVec::unit(len, i))).collect();
    DenseBitMatrix::from_rows(len, rows).expect("rows have length N")
}

/// `F^{⊗n}` built by Kronecker products.
pub fn kernel_power(stages: u32) -> DenseBitMatrix {
    let mut m = DenseBitMatrix::identity(1);
    for _ in 0..stages {
        let n = m.rows();
        let mut next = DenseBitMatrix::zeros(2 * n, 2 * n);
        for r in 0..n {
            for c in m.row(r).ones_iter() {
                // F = [[1,0],[1,1]]
                next.set(r, c, true);
                next.set(n + r, c, true);
                next.set(n + r, n + c, true);
            }
        }
        m = next;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn approx(a: &[f64], b: &[f64]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn reliabilities_small_cases() {
        assert!(approx(&bec_channel_reliabilities(1, 0.5), &[0.75, 0.25]));
        assert!(approx(
            &bec_channel_reliabilities(2, 0.5),
            &[0.9375, 0.5625, 0.4375, 0.0625]
        ));
    }

    #[test]
    fn reliabilities_conserve_mean() {
        for n in 0..8 {
            for eps in [0.1, 0.37, 0.5, 0.8] {
                let z = bec_channel_reliabilities(n, eps);
                let mean = z.iter().sum::<f64>() / z.len() as f64;
                assert!((mean - eps).abs() < 1e-9);
                assert!(z.iter().all(|&p| (0.0..=1.0).contains(&p)));
            }
        }
    }

    /// Erasure probability of synthetic channel `i` under genie-aided
    /// successive decoding, by enumerating every erasure pattern of a
    /// length-`N` BEC: bit `i` is lost iff some input word with `u_j = 0`
    /// for `j < i`, `u_i = 1` maps to a codeword that vanishes on every
    /// received position.
    fn genie_erasure_probability(len: usize, i: usize, eps: f64) -> f64 {
        let g = generator_matrix(len);
        let mut total = 0.0;
        for pattern in 0u32..(1 << len) {
            let erased: Vec<usize> = (0..len).filter(|b| pattern >> b & 1 == 1).collect();
            let known: Vec<usize> = (0..len).filter(|b| pattern >> b & 1 == 0).collect();
            let weight = eps.powi(erased.len() as i32) * (1.0 - eps).powi(known.len() as i32);
            // Rows i..N restricted to known positions; u_i is ambiguous iff row i
            // lies in the span of rows i+1..N on those positions.
            let tail = DenseBitMatrix::from_rows(
                known.len(),
                ((i + 1)..len).map(|r| g.row(r).gather(&known)).collect(),
            )
            .unwrap();
            let with_i = tail
                .vstack(&DenseBitMatrix::from_rows(known.len(), vec![g.row(i).gather(&known)]).unwrap())
                .unwrap();
            if with_i.rank() == tail.rank() {
                total += weight;
            }
        }
        total
    }

    #[test]
    fn reliabilities_match_genie_enumeration() {
        for len in [2usize, 4, 8] {
            let z = bec_channel_reliabilities(len.trailing_zeros(), 0.3);
            for (i, &zi) in z.iter().enumerate() {
                let brute = genie_erasure_probability(len, i, 0.3);
                assert!((brute - zi).abs() < 1e-9, "N={len} i={i}: {brute} vs {zi}");
            }
        }
    }

    #[test]
    fn construction_examples() {
        let c = PolarCode::construct(4, 2, 0.5).unwrap();
        assert_eq!(c.info_set(), &[2, 3]);
        let c = PolarCode::construct(2, 2, 0.5).unwrap();
        assert_eq!(c.info_set(), &[0, 1]);
        let c = PolarCode::construct(8, 0, 0.5).unwrap();
        assert!(c.info_set().is_empty());
        assert!(c.encode(&BitVec::zeros(0)).unwrap().is_zero());
        assert!(PolarCode::construct(8, 9, 0.5).is_err());
        assert!(PolarCode::construct(6, 2, 0.5).is_err());
        assert!(PolarCode::construct(8, 2, 1.0).is_err());
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_full(&BitVec::from_bit_str("10").unwrap()).to_string(), "10");
        assert_eq!(encode_full(&BitVec::from_bit_str("01").unwrap()).to_string(), "11");
        assert_eq!(encode_full(&BitVec::from_bit_str("0001").unwrap()).to_string(), "1111");
        assert_eq!(encode_full(&BitVec::from_bit_str("0011").unwrap()).to_string(), "0011");
        let code = PolarCode::construct(4, 2, 0.5).unwrap();
        assert!(code.encode(&BitVec::zeros(3)).is_err());
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generator_matrix(2), DenseBitMatrix::from_bit_strs(&["10", "11"]));
        assert_eq!(
            generator_matrix(4),
            DenseBitMatrix::from_bit_strs(&["1000", "1010", "1100", "1111"])
        );
        for n in 0..=6 {
            let f = kernel_power(n);
            assert_eq!(f.mul(&f).unwrap(), DenseBitMatrix::identity(1 << n));
            // G_N = B_N F^{⊗n}: row i of G is row rev(i) of F^{⊗n}.
            let g = generator_matrix(1 << n);
            for i in 0..(1 << n) {
                assert_eq!(g.row(i), f.row(bit_reverse(i, n)));
            }
        }
    }

    #[test]
    fn butterfly_matches_dense_generator_exhaustively() {
        for len in [2usize, 4, 8] {
            let g = generator_matrix(len);
            for word in 0u32..(1 << len) {
                let u: BitVec = (0..len).map(|b| word >> b & 1 == 1).collect();
                assert_eq!(encode_full(&u), g.vec_mul(&u).unwrap());
            }
        }
    }

    #[test]
    fn codebook_has_full_size() {
        for (len, k) in [(8usize, 4usize), (16, 8), (16, 11)] {
            let code = PolarCode::construct(len, k, 0.5).unwrap();
            let mut words: Vec<BitVec> = (0u32..(1 << k))
                .map(|p| code.encode(&(0..k).map(|b| p >> b & 1 == 1).collect()).unwrap())
                .collect();
            words.sort_by_key(|w| w.to_string());
            words.dedup();
            assert_eq!(words.len(), 1 << k);
        }
    }

    #[test]
    fn standard_pcm_small_case() {
        let code = PolarCode::from_info_set(2, vec![1], 0.5).unwrap();
        assert_eq!(code.standard_dense_pcm(), DenseBitMatrix::from_bit_strs(&["11"]));
    }

    #[test]
    fn standard_pcm_rank_and_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (len, k) in [(4usize, 2usize), (8, 4), (16, 8), (16, 3)] {
            let code = PolarCode::construct(len, k, 0.5).unwrap();
            let h = code.standard_dense_pcm();
            assert_eq!(h.rank(), len - k);
            assert_eq!(len - h.rank(), k, "null space dimension");
            for _ in 0..20 {
                let payload: BitVec = (0..k).map(|_| rng.gen_bool(0.5)).collect();
                let c = code.encode(&payload).unwrap();
                assert!(h.mul_vec(&c).unwrap().is_zero());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]
        #[test]
        fn butterfly_matches_dense_generator(stages in 4u32..=6, seed in any::<u64>()) {
            let len = 1usize << stages;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u: BitVec = (0..len).map(|_| rng.gen_bool(0.5)).collect();
            prop_assert_eq!(encode_full(&u), generator_matrix(len).vec_mul(&u).unwrap());
        }
    }
}
