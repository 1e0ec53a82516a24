//! Coset coding over a noiseless main channel with an erasure wiretapper.
//!
//! A secret of `k` bits selects one of the `2^k` cosets of an `(n, n-k)`
//! code `C`; the transmitted word is drawn uniformly from that coset. Bob
//! recovers the secret as a syndrome; the eavesdropper's ignorance is
//! governed by the rank of the generator columns she observed: a reveal
//! pattern is fully secured iff those columns are linearly independent,
//! and in general her conditional entropy is `k - mu + rank(G_mu)` bits
//! for `mu` revealed positions.

use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::gf2::{sparse_column_rank, BinaryMatrix, BitVector, LinearSolver};

#[derive(Debug, Error)]
pub enum CosetError {
    #[error("generator must have full row rank (rank {rank} of {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },
    #[error("secret length {got}, expected {expected}")]
    SecretLength { expected: usize, got: usize },
    #[error("word length {got}, expected {expected}")]
    WordLength { expected: usize, got: usize },
}

/// A configured coset-coding scheme over `{0,1}^n`.
pub struct WiretapCode {
    n: usize,
    k: usize,
    g: BinaryMatrix,
    /// Columns of G as sparse supports (row indices), for rank trials.
    g_cols: Vec<Vec<u32>>,
    /// Positions whose unit vectors form G*: the complement of G's pivot
    /// columns, in index order.
    g_star_positions: Vec<usize>,
    /// Syndrome former H with H G*^T = I and H G^T = 0; computed on first
    /// use.
    h: OnceLock<BinaryMatrix>,
}

/// Aggregate of a Monte Carlo security run.
#[derive(Debug, Clone)]
pub struct SecurityReport {
    pub trials: usize,
    pub secured_count: usize,
    pub secured_fraction: f64,
    /// Per-trial equivocation `k - mu + rank(G_mu)`, in trial order.
    pub equivocation_samples: Vec<u32>,
    pub mean_equivocation: f64,
    /// Mean equivocation divided by the block length, bits per channel use.
    pub mean_equivocation_rate: f64,
}

impl WiretapCode {
    /// Builds the scheme from a full-row-rank generator of `C`. The coset
    /// representatives `G*` are standard unit vectors chosen greedily in
    /// index order.
    pub fn build(g: BinaryMatrix) -> Result<Self, CosetError> {
        let n = g.n_cols();
        let l = g.n_rows();
        let pivots = g.pivot_columns();
        if pivots.len() != l {
            return Err(CosetError::RankDeficient { rank: pivots.len(), rows: l });
        }
        let mut is_pivot = vec![false; n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let g_star_positions: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut g_cols: Vec<Vec<u32>> = vec![Vec::new(); n];
        for r in 0..l {
            g.for_each_one_in_row(r, |c| g_cols[c].push(r as u32));
        }
        Ok(WiretapCode {
            n,
            k: n - l,
            g,
            g_cols,
            g_star_positions,
            h: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Secret bits per block.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generator(&self) -> &BinaryMatrix {
        &self.g
    }

    /// The coset-representative matrix G* (unit-vector rows).
    pub fn g_star(&self) -> BinaryMatrix {
        let rows: Vec<Vec<u32>> = self
            .g_star_positions
            .iter()
            .map(|&p| vec![p as u32])
            .collect();
        BinaryMatrix::from_sparse_rows(self.n, rows).expect("unit rows are valid")
    }

    /// The syndrome former: `H [G*; G]^T = [I | 0]`, so Bob's decode is
    /// `s = H x^T` exactly.
    pub fn syndrome_former(&self) -> &BinaryMatrix {
        self.h.get_or_init(|| {
            // Rows of H live in the nullspace of G; normalize a basis N so
            // that the columns at the G* positions form the identity.
            let solver = LinearSolver::new(&self.g);
            let basis = solver.nullspace();
            let n_mat = BinaryMatrix::from_rows(basis);
            let n_u = n_mat
                .select_columns(&self.g_star_positions)
                .expect("positions are sorted");
            let inv = n_u
                .invert()
                .expect("nullspace restricted to complement positions is invertible");
            inv.mat_mul(&n_mat).expect("dimensions agree")
        })
    }

    /// Encodes a secret: `x = s G* + v G` with `v` uniform from the seed.
    pub fn encode(&self, s: &BitVector, seed: u64) -> Result<BitVector, CosetError> {
        if s.len() != self.k {
            return Err(CosetError::SecretLength { expected: self.k, got: s.len() });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = BitVector::random(self.g.n_rows(), &mut rng);
        Ok(self.encode_with_randomness(s, &v))
    }

    /// Encode with explicit randomness (used by tests to enumerate cosets).
    pub fn encode_with_randomness(&self, s: &BitVector, v: &BitVector) -> BitVector {
        assert_eq!(s.len(), self.k);
        assert_eq!(v.len(), self.g.n_rows());
        let mut x = BitVector::zeros(self.n);
        for (i, &pos) in self.g_star_positions.iter().enumerate() {
            if s.get(i) {
                x.flip(pos);
            }
        }
        for r in v.iter_ones() {
            self.g.xor_row_into(r, &mut x);
        }
        x
    }

    /// Bob's decode over the noiseless main channel: `s = H x^T`.
    pub fn bob_decode(&self, x: &BitVector) -> Result<BitVector, CosetError> {
        if x.len() != self.n {
            return Err(CosetError::WordLength { expected: self.n, got: x.len() });
        }
        Ok(self
            .syndrome_former()
            .mat_vec(x)
            .expect("dimensions agree"))
    }

    /// Rank of the generator columns at the revealed positions.
    fn revealed_rank(&self, revealed: &[usize]) -> usize {
        let cols: Vec<Vec<u32>> = revealed
            .iter()
            .map(|&p| {
                assert!(p < self.n, "revealed position {p} out of range");
                self.g_cols[p].clone()
            })
            .collect();
        sparse_column_rank(self.g.n_rows(), &cols)
    }

    /// Whether a reveal pattern is fully secured: the revealed generator
    /// columns are linearly independent, making every coset consistent.
    pub fn is_secured(&self, revealed: &[usize]) -> bool {
        self.revealed_rank(revealed) == revealed.len()
    }

    /// Eve's conditional entropy `H(S | Z = z)` in bits for the pattern:
    /// `k - mu + rank(G_mu)`. Equals `k` exactly when nothing leaks
    /// usefully, 0 when everything is revealed.
    pub fn equivocation(&self, revealed: &[usize]) -> u32 {
        let rank = self.revealed_rank(revealed);
        (self.k + rank - revealed.len()) as u32
    }

    /// Samples i.i.d. reveal patterns (each position revealed with
    /// `leak_prob`) and aggregates security statistics. Trials run in
    /// parallel with per-trial counter-derived seeds.
    pub fn monte_carlo_security(
        &self,
        leak_prob: f64,
        trials: usize,
        seed: u64,
    ) -> SecurityReport {
        assert!(trials >= 1, "at least one trial");
        assert!((0.0..=1.0).contains(&leak_prob), "leak probability in [0,1]");
        let equivocation_samples: Vec<u32> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let revealed: Vec<usize> = {
                    use rand::Rng;
                    (0..self.n).filter(|_| rng.gen_bool(leak_prob)).collect()
                };
                self.equivocation(&revealed)
            })
            .collect();
        let secured_count = equivocation_samples
            .iter()
            .filter(|&&e| e as usize == self.k)
            .count();
        let mean_equivocation =
            equivocation_samples.iter().map(|&e| e as f64).sum::<f64>() / trials as f64;
        SecurityReport {
            trials,
            secured_count,
            secured_fraction: secured_count as f64 / trials as f64,
            equivocation_samples,
            mean_equivocation,
            mean_equivocation_rate: mean_equivocation / self.n as f64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeDistribution;
    use crate::degree::StackDist;
    use crate::ldpc::TannerGraph;

    fn tiny_code() -> WiretapCode {
        // C = {00, 11}: G = [1 1], k = 1, cosets {00,11} and {01,10}.
        let g = BinaryMatrix::from_rows(&[BitVector::from_bools(&[true, true])]);
        WiretapCode::build(g).unwrap()
    }

    fn hamming_generator() -> BinaryMatrix {
        let rows = [
            [1, 0, 0, 0, 1, 1, 0],
            [0, 1, 0, 0, 1, 0, 1],
            [0, 0, 1, 0, 0, 1, 1],
            [0, 0, 0, 1, 1, 1, 1],
        ];
        BinaryMatrix::from_rows(
            &rows
                .iter()
                .map(|r| BitVector::from_bools(&r.map(|b| b == 1)))
                .collect::<Vec<_>>(),
        )
    }

    #[test]
    fn build_tiny_code() {
        let code = tiny_code();
        assert_eq!(code.n(), 2);
        assert_eq!(code.k(), 1);
        // The two cosets partition {0,1}^2.
        let mut words = std::collections::HashSet::new();
        for s in 0..2u8 {
            for v in 0..2u8 {
                let x = code.encode_with_randomness(
                    &BitVector::from_bools(&[s == 1]),
                    &BitVector::from_bools(&[v == 1]),
                );
                words.insert(x.iter_ones().collect::<Vec<_>>());
            }
        }
        assert_eq!(words.len(), 4);
    }

    #[test]
    fn build_rejects_rank_deficient() {
        let g = BinaryMatrix::from_rows(&[
            BitVector::from_bools(&[true, true, false]),
            BitVector::from_bools(&[true, true, false]),
        ]);
        assert!(matches!(
            WiretapCode::build(g),
            Err(CosetError::RankDeficient { rank: 1, rows: 2 })
        ));
    }

    #[test]
    fn hamming_code_has_eight_cosets_and_valid_h() {
        let code = WiretapCode::build(hamming_generator()).unwrap();
        assert_eq!(code.k(), 3);
        let h = code.syndrome_former();
        // H G^T = 0, exhaustively over all 16 codewords.
        for mask in 0..16u32 {
            let mut cw = BitVector::zeros(7);
            for i in 0..4 {
                if mask >> i & 1 == 1 {
                    cw.xor_assign(&code.generator().row(i));
                }
            }
            assert!(h.mat_vec(&cw).unwrap().is_zero());
        }
        // H G*^T = I.
        let hg = h.mat_mul(&code.g_star().transpose()).unwrap();
        assert_eq!(hg, BinaryMatrix::identity(3));
    }

    #[test]
    fn encode_decode_round_trip() {
        let code = WiretapCode::build(hamming_generator()).unwrap();
        for seed in 0..50 {
            for s_bits in [[false; 3], [true; 3], [true, false, true]] {
                let s = BitVector::from_bools(&s_bits);
                let x = code.encode(&s, seed).unwrap();
                assert_eq!(code.bob_decode(&x).unwrap(), s);
            }
        }
        // Zero secret, zero randomness gives the zero word.
        let z = code.encode_with_randomness(
            &BitVector::zeros(3),
            &BitVector::zeros(4),
        );
        assert!(z.is_zero());
    }

    #[test]
    fn encode_uniform_within_coset() {
        // n=2 code, s=1: x must hit {01, 10} with frequency 1/2 ± 0.02.
        let code = tiny_code();
        let s = BitVector::from_bools(&[true]);
        let trials = 10_000;
        let mut count01 = 0;
        for seed in 0..trials {
            let x = code.encode(&s, seed).unwrap();
            let h = code.bob_decode(&x).unwrap();
            assert!(h.get(0));
            if x.get(1) && !x.get(0) {
                count01 += 1;
            }
        }
        let frac = count01 as f64 / trials as f64;
        assert!((frac - 0.5).abs() < 0.02, "frequency {frac}");
    }

    #[test]
    fn secured_patterns_small_code() {
        let code = tiny_code();
        assert!(code.is_secured(&[]));
        assert!(code.is_secured(&[0]));
        assert!(!code.is_secured(&[0, 1]));
        // Brute-force check for revealed = {0}: both cosets contain a word
        // with either value at position 0, so Eve learns nothing.
        for val in [false, true] {
            for s in [false, true] {
                let mut found = false;
                for v in [false, true] {
                    let x = code.encode_with_randomness(
                        &BitVector::from_bools(&[s]),
                        &BitVector::from_bools(&[v]),
                    );
                    if x.get(0) == val {
                        found = true;
                    }
                }
                assert!(found);
            }
        }
    }

    #[test]
    fn equivocation_extremes() {
        let code = WiretapCode::build(hamming_generator()).unwrap();
        assert_eq!(code.equivocation(&[]), 3);
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(code.equivocation(&all), 0);
    }

    /// Brute-force count of consistent cosets for a reveal pattern, given
    /// the revealed values of some transmitted word. Independent of the
    /// syndrome machinery: enumerates every coset element directly.
    fn consistent_coset_count(
        code: &WiretapCode,
        revealed: &[usize],
        reference: &BitVector,
    ) -> usize {
        let k = code.k();
        let l = code.generator().n_rows();
        let mut count = 0;
        for s_mask in 0..1u64 << k {
            let s = BitVector::from_bools(
                &(0..k).map(|i| s_mask >> i & 1 == 1).collect::<Vec<_>>(),
            );
            let mut consistent = false;
            for v_mask in 0..1u64 << l {
                let v = BitVector::from_bools(
                    &(0..l).map(|i| v_mask >> i & 1 == 1).collect::<Vec<_>>(),
                );
                let x = code.encode_with_randomness(&s, &v);
                if revealed.iter().all(|&p| x.get(p) == reference.get(p)) {
                    consistent = true;
                    break;
                }
            }
            if consistent {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn equivocation_closed_form_matches_brute_force_all_patterns() {
        // The mandatory oracle: for the simplex (Hamming-dual) code, every
        // reveal pattern's closed form k - mu + rank must equal
        // log2(#consistent cosets).
        let simplex = BinaryMatrix::from_rows(&[
            BitVector::from_bools(&[true, false, true, false, true, false, true]),
            BitVector::from_bools(&[false, true, true, false, false, true, true]),
            BitVector::from_bools(&[false, false, false, true, true, true, true]),
        ]);
        let code = WiretapCode::build(simplex).unwrap();
        let reference = code
            .encode(&BitVector::from_bools(&[true, false, true, true]), 99)
            .unwrap();
        for mask in 0..1u32 << 7 {
            let revealed: Vec<usize> = (0..7).filter(|&i| mask >> i & 1 == 1).collect();
            let count = consistent_coset_count(&code, &revealed, &reference);
            assert_eq!(
                code.equivocation(&revealed) as u32,
                (count as f64).log2().round() as u32,
                "pattern {revealed:?}"
            );
            assert!(count.is_power_of_two());
        }
    }

    #[test]
    fn equivocation_monotone_under_reveals() {
        let code = WiretapCode::build(hamming_generator()).unwrap();
        for mask in 0..1u32 << 7 {
            let revealed: Vec<usize> = (0..7).filter(|&i| mask >> i & 1 == 1).collect();
            let e = code.equivocation(&revealed);
            for extra in 0..7 {
                if revealed.contains(&extra) {
                    continue;
                }
                let mut bigger = revealed.clone();
                bigger.push(extra);
                bigger.sort_unstable();
                assert!(code.equivocation(&bigger) <= e);
            }
        }
    }

    #[test]
    fn coset_size_uniformity() {
        // Every consistent coset holds the same number of consistent words.
        let code = WiretapCode::build(hamming_generator()).unwrap();
        let reference = code.encode(&BitVector::from_bools(&[true, true, false]), 3).unwrap();
        for mask in [0u32, 0b1010101, 0b0001111, 0b1111111] {
            let revealed: Vec<usize> = (0..7).filter(|&i| mask >> i & 1 == 1).collect();
            let mut sizes = std::collections::HashSet::new();
            for s_mask in 0..8u32 {
                let s = BitVector::from_bools(&[
                    s_mask & 1 == 1,
                    s_mask >> 1 & 1 == 1,
                    s_mask >> 2 & 1 == 1,
                ]);
                let mut size = 0;
                for v_mask in 0..16u32 {
                    let v = BitVector::from_bools(
                        &(0..4).map(|i| v_mask >> i & 1 == 1).collect::<Vec<_>>(),
                    );
                    let x = code.encode_with_randomness(&s, &v);
                    if revealed.iter().all(|&p| x.get(p) == reference.get(p)) {
                        size += 1;
                    }
                }
                if size > 0 {
                    sizes.insert(size);
                }
            }
            assert_eq!(sizes.len(), 1, "pattern {revealed:?} sizes {sizes:?}");
        }
    }

    #[test]
    fn uniform_posterior_when_secured() {
        // For a secured pattern every secret is equally likely: the count
        // of encodings consistent with z is the same for all s.
        let code = WiretapCode::build(hamming_generator()).unwrap();
        let reference = code.encode(&BitVector::from_bools(&[false, true, true]), 8).unwrap();
        for mask in 0..1u32 << 7 {
            let revealed: Vec<usize> = (0..7).filter(|&i| mask >> i & 1 == 1).collect();
            if !code.is_secured(&revealed) {
                continue;
            }
            let mut counts = Vec::new();
            for s_mask in 0..8u32 {
                let s = BitVector::from_bools(&[
                    s_mask & 1 == 1,
                    s_mask >> 1 & 1 == 1,
                    s_mask >> 2 & 1 == 1,
                ]);
                let mut c = 0;
                for v_mask in 0..16u32 {
                    let v = BitVector::from_bools(
                        &(0..4).map(|i| v_mask >> i & 1 == 1).collect::<Vec<_>>(),
                    );
                    let x = code.encode_with_randomness(&s, &v);
                    if revealed.iter().all(|&p| x.get(p) == reference.get(p)) {
                        c += 1;
                    }
                }
                counts.push(c);
            }
            assert!(counts.windows(2).all(|w| w[0] == w[1]), "pattern {revealed:?}");
        }
    }

    #[test]
    fn monte_carlo_trivial_leak() {
        let code = WiretapCode::build(hamming_generator()).unwrap();
        let report = code.monte_carlo_security(0.0, 20, 1);
        assert_eq!(report.secured_fraction, 1.0);
        assert!(report.equivocation_samples.iter().all(|&e| e == 3));
        assert_eq!(report.mean_equivocation, 3.0);
    }

    #[test]
    fn monte_carlo_reproducible() {
        let dist = StackDist::from_edge(&DegreeDistribution::regular(3, 6));
        let g = TannerGraph::sample(&dist, 240, 17).unwrap().to_matrix();
        if g.rank() < g.n_rows() {
            return; // unlucky sample at this size; covered at scale elsewhere
        }
        let code = WiretapCode::build(g).unwrap();
        let a = code.monte_carlo_security(0.35, 50, 5);
        let b = code.monte_carlo_security(0.35, 50, 5);
        assert_eq!(a.equivocation_samples, b.equivocation_samples);
    }
}
