//! Nested parity-check construction for an erasure main channel with an
//! erasure wiretapper.
//!
//! `H1` (the parity check of a code with erasure threshold targeting the
//! wiretapper) contains `H2` (threshold targeting the main channel) as a
//! row subset; the remaining rows `H2_bar` carry the secret. Alice sends a
//! random solution of `[H2; H2_bar] x = [0; s]`, Bob peels on the Tanner
//! graph of `H2` and reads the secret back as `H2_bar x`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::degree::{de_threshold, split_residual, DegreeDistribution, StackDist};
use crate::gf2::{sparse_column_rank, BinaryMatrix, BitVector, LinearSolver};
use crate::ldpc::{repair_stack_bottom, ErasurePattern, PeelOutcome, TannerGraph};

#[derive(Debug, Error)]
pub enum NestedError {
    #[error("no nonnegative residual distribution: the pair (d1, d2) is infeasible")]
    ResidualInfeasible,
    #[error("could not sample a full-rank H2 in {attempts} attempts")]
    SampleFailed { attempts: usize },
    #[error("secret length {got}, expected {expected}")]
    SecretLength { expected: usize, got: usize },
    #[error("main-channel decode stuck with {resolved} erasures resolved")]
    DecodeStuck { resolved: usize },
    #[error("main-channel decode found a parity contradiction at check {check}")]
    DecodeInconsistent { check: usize },
    #[error(transparent)]
    Ldpc(#[from] crate::ldpc::LdpcError),
}

/// A nested pair of parity-check matrices with the derived encoder state.
pub struct NestedCode {
    n: usize,
    h2: BinaryMatrix,
    h2_bar: BinaryMatrix,
    h1: BinaryMatrix,
    graph2: TannerGraph,
    solver: LinearSolver,
    /// DE threshold of the full distribution `d1` (the wiretap target).
    d1_threshold: f64,
    /// Whether `threshold(d1) > 1 - r2`, i.e. whether the construction
    /// guarantees positive equivocation. Decoding works either way.
    equivocation_feasible: bool,
}

impl NestedCode {
    /// Samples `H2` from `d2` and the remaining rows from the residual
    /// distribution, stacking them into `H1`. `H2` must come out full row
    /// rank (redrawn on derived seeds otherwise); dependent residual rows
    /// are repaired bit-by-bit so that `rank(H1) = n(1 - r1)` holds.
    pub fn build(
        d1: &DegreeDistribution,
        d2: &DegreeDistribution,
        n: usize,
        seed: u64,
    ) -> Result<Self, NestedError> {
        let residual = split_residual(&StackDist::from_edge(d1), &StackDist::from_edge(d2))
            .ok_or(NestedError::ResidualInfeasible)?;
        let attempts = 20;
        for a in 0..attempts as u64 {
            let graph2 = TannerGraph::sample(&StackDist::from_edge(d2), n, seed.wrapping_add(2 * a))?;
            let h2 = graph2.to_matrix();
            if h2.rank() != h2.n_rows() {
                continue;
            }
            let h2_bar_raw = if residual.is_empty() {
                BinaryMatrix::from_sparse_rows(n, Vec::new()).expect("empty is valid")
            } else {
                TannerGraph::sample(&residual, n, seed.wrapping_add(2 * a + 1))?.to_matrix()
            };
            let (h2_bar, _flips) = repair_stack_bottom(&h2, &h2_bar_raw)?;
            let h1 = h2.stack(&h2_bar).expect("same column count");
            let solver = LinearSolver::new(&h1);
            debug_assert_eq!(solver.rank(), h1.n_rows());
            let d1_threshold = de_threshold(d1);
            let r2 = 1.0 - h2.n_rows() as f64 / n as f64;
            let equivocation_feasible = d1_threshold > 1.0 - r2;
            return Ok(NestedCode {
                n,
                h2,
                h2_bar,
                h1,
                graph2,
                solver,
                d1_threshold,
                equivocation_feasible,
            });
        }
        Err(NestedError::SampleFailed { attempts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Rate of the code with parity check `H1`.
    pub fn r1(&self) -> f64 {
        1.0 - self.h1.n_rows() as f64 / self.n as f64
    }

    /// Rate of the code with parity check `H2`.
    pub fn r2(&self) -> f64 {
        1.0 - self.h2.n_rows() as f64 / self.n as f64
    }

    /// Secret bits per block, `n (r2 - r1)`.
    pub fn secret_len(&self) -> usize {
        self.h2_bar.n_rows()
    }

    pub fn secrecy_rate(&self) -> f64 {
        self.secret_len() as f64 / self.n as f64
    }

    pub fn h1(&self) -> &BinaryMatrix {
        &self.h1
    }

    pub fn h2(&self) -> &BinaryMatrix {
        &self.h2
    }

    pub fn h2_bar(&self) -> &BinaryMatrix {
        &self.h2_bar
    }

    /// DE threshold of the full distribution (the design wiretap erasure).
    pub fn d1_threshold(&self) -> f64 {
        self.d1_threshold
    }

    pub fn equivocation_feasible(&self) -> bool {
        self.equivocation_feasible
    }

    /// Nullspace dimension of `H1`: each secret indexes `2^(n r1)`
    /// solutions.
    pub fn solutions_per_message(&self) -> usize {
        self.solver.nullspace().len()
    }

    /// Encodes by solving `[H2; H2_bar] x = [0; s]` and adding a seeded
    /// uniform kernel element.
    pub fn encode(&self, s: &BitVector, seed: u64) -> Result<BitVector, NestedError> {
        if s.len() != self.secret_len() {
            return Err(NestedError::SecretLength {
                expected: self.secret_len(),
                got: s.len(),
            });
        }
        let rhs = BitVector::zeros(self.h2.n_rows()).concat(s);
        let mut x = self
            .solver
            .solve(&rhs)
            .expect("H1 has full row rank, every syndrome is reachable");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coeffs = BitVector::random(self.solver.nullspace().len(), &mut rng);
        for i in coeffs.iter_ones() {
            x.xor_assign(&self.solver.nullspace()[i]);
        }
        Ok(x)
    }

    /// Bob's decode: peel erasures on the Tanner graph of `C2`, then read
    /// the secret as `H2_bar x`.
    pub fn decode(
        &self,
        bits: &BitVector,
        pattern: &ErasurePattern,
    ) -> Result<BitVector, NestedError> {
        let res = self.graph2.peel_decode(bits, pattern);
        match res.outcome {
            PeelOutcome::Decoded(x) => Ok(self.h2_bar.mat_vec(&x).expect("length n")),
            PeelOutcome::Stuck => Err(NestedError::DecodeStuck {
                resolved: res.resolved_count,
            }),
            PeelOutcome::Inconsistent { check } => Err(NestedError::DecodeInconsistent { check }),
        }
    }

    /// The guaranteed equivocation `n (eps_w - (1 - r2))` in bits, clamped
    /// at zero.
    pub fn equivocation_bound(&self, eps_w: f64) -> f64 {
        (self.n as f64 * (eps_w - (1.0 - self.r2()))).max(0.0)
    }

    /// Exact equivocation for a concrete erasure set:
    /// `rank(H1|_E) - rank(H2|_E)` bits.
    pub fn exact_equivocation(&self, erased: &[usize]) -> usize {
        let col_support = |m: &BinaryMatrix| -> Vec<Vec<u32>> {
            let mut cols = vec![Vec::new(); erased.len()];
            let mut index = std::collections::HashMap::new();
            for (j, &p) in erased.iter().enumerate() {
                index.insert(p, j);
            }
            for r in 0..m.n_rows() {
                m.for_each_one_in_row(r, |c| {
                    if let Some(&j) = index.get(&c) {
                        cols[j].push(r as u32);
                    }
                });
            }
            cols
        };
        let r1 = sparse_column_rank(self.h1.n_rows(), &col_support(&self.h1));
        let r2 = sparse_column_rank(self.h2.n_rows(), &col_support(&self.h2));
        r1 - r2
    }
}
