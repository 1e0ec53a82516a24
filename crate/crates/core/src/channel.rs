//! Channel models, sampling and capacity formulas.
//!
//! The erasure wiretap convention deserves a warning: an `EWT(ε)` has a
//! wiretapper observing through a `BEC(1-ε)`, so `ε` is the probability a
//! bit *leaks*. Constructors here always take the erasure probability; use
//! [`ChannelModel::erasure_wiretap`] to build from a leak probability.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gf2::BitVector;
use crate::ldpc::ErasurePattern;

const DMC_ROW_SUM_TOL: f64 = 1e-12;
const BLAHUT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("DMC row {row} sums to {sum}, expected 1")]
    RowNotNormalized { row: usize, sum: f64 },
    #[error("DMC transition matrix must be rectangular and nonempty")]
    MalformedTransitionMatrix,
    #[error("transmit is defined for binary channels only")]
    NonBinaryTransmit,
    #[error("secrecy capacity for general DMC pairs is not supported")]
    UnsupportedSecrecyPair,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A discrete memoryless channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelModel {
    /// The identity channel on bits.
    Noiseless,
    /// Binary erasure channel with the given erasure probability.
    Bec { erasure_prob: f64 },
    /// Binary symmetric channel with the given flip probability.
    Bsc { flip_prob: f64 },
    /// General DMC given by its transition matrix `p[k][j] = P(j | k)`.
    Dmc { transition: Vec<Vec<f64>> },
}

/// Output of [`ChannelModel::transmit`].
#[derive(Debug, Clone, PartialEq)]
pub enum Received {
    /// BSC / noiseless output: a full word.
    Bits(BitVector),
    /// BEC output: erased positions carry a zero bit and are listed in the
    /// pattern.
    Erased { bits: BitVector, pattern: ErasurePattern },
}

fn check_prob(p: f64) -> Result<f64, ChannelError> {
    if (0.0..=1.0).contains(&p) && p.is_finite() {
        Ok(p)
    } else {
        Err(ChannelError::ProbabilityOutOfRange(p))
    }
}

impl ChannelModel {
    pub fn noiseless() -> Self {
        ChannelModel::Noiseless
    }

    pub fn bec(erasure_prob: f64) -> Result<Self, ChannelError> {
        Ok(ChannelModel::Bec {
            erasure_prob: check_prob(erasure_prob)?,
        })
    }

    pub fn bsc(flip_prob: f64) -> Result<Self, ChannelError> {
        Ok(ChannelModel::Bsc {
            flip_prob: check_prob(flip_prob)?,
        })
    }

    /// The wiretapper's channel of an EWT(`leak_prob`): a BEC erasing with
    /// probability `1 - leak_prob`.
    pub fn erasure_wiretap(leak_prob: f64) -> Result<Self, ChannelError> {
        ChannelModel::bec(1.0 - check_prob(leak_prob)?)
    }

    pub fn dmc(transition: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        if transition.is_empty() || transition[0].is_empty() {
            return Err(ChannelError::MalformedTransitionMatrix);
        }
        let cols = transition[0].len();
        for (r, row) in transition.iter().enumerate() {
            if row.len() != cols {
                return Err(ChannelError::MalformedTransitionMatrix);
            }
            let mut sum = 0.0;
            for &p in row {
                check_prob(p)?;
                sum += p;
            }
            if (sum - 1.0).abs() > DMC_ROW_SUM_TOL {
                return Err(ChannelError::RowNotNormalized { row: r, sum });
            }
        }
        Ok(ChannelModel::Dmc { transition })
    }

    /// Parses a channel spec string: `noiseless`, `bec:<p>`, `bsc:<p>`,
    /// `dmc:<file>` (one row of transition probabilities per line).
    pub fn parse_spec(spec: &str) -> Result<Self, ChannelError> {
        let spec = spec.trim();
        if spec == "noiseless" {
            return Ok(ChannelModel::Noiseless);
        }
        if let Some(p) = spec.strip_prefix("bec:") {
            let p: f64 = p
                .parse()
                .map_err(|_| ChannelError::Parse(format!("bad probability in '{spec}'")))?;
            return ChannelModel::bec(p);
        }
        if let Some(p) = spec.strip_prefix("bsc:") {
            let p: f64 = p
                .parse()
                .map_err(|_| ChannelError::Parse(format!("bad probability in '{spec}'")))?;
            return ChannelModel::bsc(p);
        }
        if let Some(path) = spec.strip_prefix("dmc:") {
            let text = std::fs::read_to_string(path)?;
            let mut rows = Vec::new();
            for line in text.lines() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let row: Result<Vec<f64>, _> =
                    line.split_whitespace().map(str::parse::<f64>).collect();
                rows.push(row.map_err(|_| {
                    ChannelError::Parse(format!("bad transition row: '{line}'"))
                })?);
            }
            return ChannelModel::dmc(rows);
        }
        Err(ChannelError::Parse(format!("unknown channel spec '{spec}'")))
    }

    /// Number of input symbols.
    pub fn input_size(&self) -> usize {
        match self {
            ChannelModel::Dmc { transition } => transition.len(),
            _ => 2,
        }
    }

    /// Transition matrix `p[k][j] = P(j | k)`. BEC outputs are ordered
    /// (0, 1, erasure).
    pub fn transition_matrix(&self) -> Vec<Vec<f64>> {
        match self {
            ChannelModel::Noiseless => vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            ChannelModel::Bec { erasure_prob: d } => {
                vec![vec![1.0 - d, 0.0, *d], vec![0.0, 1.0 - d, *d]]
            }
            ChannelModel::Bsc { flip_prob: p } => {
                vec![vec![1.0 - p, *p], vec![*p, 1.0 - p]]
            }
            ChannelModel::Dmc { transition } => transition.clone(),
        }
    }

    /// Sends a word through the channel; i.i.d. per-symbol action, bit-exact
    /// reproducible for a fixed seed.
    pub fn transmit(&self, x: &BitVector, seed: u64) -> Result<Received, ChannelError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            ChannelModel::Noiseless => Ok(Received::Bits(x.clone())),
            ChannelModel::Bsc { flip_prob } => {
                let mut out = x.clone();
                for i in 0..out.len() {
                    if rng.gen_bool(*flip_prob) {
                        out.flip(i);
                    }
                }
                Ok(Received::Bits(out))
            }
            ChannelModel::Bec { erasure_prob } => {
                let mut bits = x.clone();
                let mut erased = Vec::new();
                for i in 0..bits.len() {
                    if rng.gen_bool(*erasure_prob) {
                        erased.push(i);
                        bits.set(i, false);
                    }
                }
                let pattern = ErasurePattern::new(x.len(), &erased).expect("in range");
                Ok(Received::Erased { bits, pattern })
            }
            ChannelModel::Dmc { .. } => Err(ChannelError::NonBinaryTransmit),
        }
    }

    /// Channel capacity in bits per use. BEC and BSC use the closed forms;
    /// general DMCs run Blahut-Arimoto to 1e-6.
    pub fn capacity(&self) -> f64 {
        match self {
            ChannelModel::Noiseless => 1.0,
            ChannelModel::Bec { erasure_prob } => 1.0 - erasure_prob,
            ChannelModel::Bsc { flip_prob } => 1.0 - binary_entropy(*flip_prob).unwrap(),
            ChannelModel::Dmc { transition } => blahut_arimoto(transition) / std::f64::consts::LN_2,
        }
    }

    /// Mutual information I(Q; channel) in nats for the given input
    /// distribution.
    pub fn mutual_information_nats(&self, q: &[f64]) -> f64 {
        let p = self.transition_matrix();
        assert_eq!(q.len(), p.len(), "input distribution size mismatch");
        mutual_information_nats(q, &p)
    }
}

fn mutual_information_nats(q: &[f64], p: &[Vec<f64>]) -> f64 {
    let n_out = p[0].len();
    let mut out_marginal = vec![0.0; n_out];
    for (k, row) in p.iter().enumerate() {
        for (j, &pj) in row.iter().enumerate() {
            out_marginal[j] += q[k] * pj;
        }
    }
    let mut mi = 0.0;
    for (k, row) in p.iter().enumerate() {
        if q[k] == 0.0 {
            continue;
        }
        for (j, &pj) in row.iter().enumerate() {
            if pj > 0.0 {
                mi += q[k] * pj * (pj / out_marginal[j]).ln();
            }
        }
    }
    mi
}

/// Blahut-Arimoto capacity (nats) of a transition matrix.
fn blahut_arimoto(p: &[Vec<f64>]) -> f64 {
    let k = p.len();
    let mut q = vec![1.0 / k as f64; k];
    loop {
        let n_out = p[0].len();
        let mut out_marginal = vec![0.0; n_out];
        for (i, row) in p.iter().enumerate() {
            for (j, &pj) in row.iter().enumerate() {
                out_marginal[j] += q[i] * pj;
            }
        }
        // d_k = exp( Σ_j P(j|k) ln(P(j|k)/r_j) )
        let d: Vec<f64> = p
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &pj)| pj > 0.0)
                    .map(|(j, &pj)| pj * (pj / out_marginal[j]).ln())
                    .sum::<f64>()
                    .exp()
            })
            .collect();
        let total: f64 = q.iter().zip(&d).map(|(qi, di)| qi * di).sum();
        // Capacity bracket: ln(total) <= C <= ln(max d).
        let lower = total.ln();
        let upper = d.iter().cloned().fold(f64::MIN, f64::max).ln();
        if upper - lower < BLAHUT_TOL {
            return lower;
        }
        for (qi, di) in q.iter_mut().zip(&d) {
            *qi *= di / total;
        }
    }
}

/// The binary entropy function in bits; endpoints return 0 by continuity.
pub fn binary_entropy(p: f64) -> Result<f64, ChannelError> {
    let p = check_prob(p)?;
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    Ok(-p * p.log2() - (1.0 - p) * (1.0 - p).log2())
}

/// Secrecy capacity `Capacity(main) − Capacity(wiretap)` for the symmetric
/// same-maximizer cases (any pair of noiseless/BEC/BSC). General DMC pairs
/// are rejected: that optimization is out of scope.
pub fn secrecy_capacity(
    main: &ChannelModel,
    wiretap: &ChannelModel,
) -> Result<f64, ChannelError> {
    let symmetric = |c: &ChannelModel| {
        matches!(
            c,
            ChannelModel::Noiseless | ChannelModel::Bec { .. } | ChannelModel::Bsc { .. }
        )
    };
    if !symmetric(main) || !symmetric(wiretap) {
        return Err(ChannelError::UnsupportedSecrecyPair);
    }
    Ok(main.capacity() - wiretap.capacity())
}
