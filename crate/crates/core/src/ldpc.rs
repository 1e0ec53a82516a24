//! Tanner graph sampling from degree-distribution ensembles and the
//! standard iterative (peeling) erasure decoder.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::degree::StackDist;
use crate::gf2::{BinaryMatrix, BitVector, Gf2Error};

#[derive(Debug, Error)]
pub enum LdpcError {
    #[error("cannot allocate {nodes} nodes to degree classes consistently at n = {n}")]
    InconsistentCounts { n: usize, nodes: usize },
    #[error("edge totals differ by {diff} after allocation; not fixable at the largest degree")]
    EdgeTotalMismatch { diff: i64 },
    #[error("top block of the stack is rank deficient; repairs apply to the bottom block only")]
    TopBlockRankDeficient,
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// A bipartite variable/check graph; multi-edges are removed in pairs at
/// construction so the derived matrix is the GF(2) adjacency.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    n_vars: usize,
    /// Per-check sorted variable neighbors.
    check_adj: Vec<Vec<u32>>,
    /// Per-variable sorted check neighbors.
    var_adj: Vec<Vec<u32>>,
    /// Degrees assigned by the sampler before multi-edge removal.
    sampled_var_degrees: Vec<u32>,
}

/// A set of erased positions in a word of fixed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    len: usize,
    erased: Vec<u32>,
}

impl ErasurePattern {
    pub fn new(len: usize, erased: &[usize]) -> Result<Self, Gf2Error> {
        let mut v: Vec<u32> = Vec::with_capacity(erased.len());
        for &p in erased {
            if p >= len {
                return Err(Gf2Error::IndexOutOfRange { index: p, bound: len });
            }
            v.push(p as u32);
        }
        v.sort_unstable();
        v.dedup();
        Ok(ErasurePattern { len, erased: v })
    }

    /// Bernoulli(`prob`) erasures at every position.
    pub fn sample<R: rand::Rng>(len: usize, prob: f64, rng: &mut R) -> Self {
        let erased = (0..len as u32).filter(|_| rng.gen_bool(prob)).collect();
        ErasurePattern { len, erased }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }

    pub fn erased_count(&self) -> usize {
        self.erased.len()
    }

    pub fn erased_positions(&self) -> &[u32] {
        &self.erased
    }

    pub fn is_erased(&self, pos: usize) -> bool {
        self.erased.binary_search(&(pos as u32)).is_ok()
    }

    /// The unerased (revealed) positions, ascending.
    pub fn revealed_positions(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len - self.erased.len());
        let mut it = self.erased.iter().peekable();
        for p in 0..self.len as u32 {
            if it.peek() == Some(&&p) {
                it.next();
            } else {
                out.push(p as usize);
            }
        }
        out
    }
}

/// Outcome of a peeling decode.
#[derive(Debug, Clone, PartialEq)]
pub enum PeelOutcome {
    /// All erasures resolved.
    Decoded(BitVector),
    /// No check with a single erased neighbor remained.
    Stuck,
    /// A fully known check has odd parity: the input is not consistent with
    /// any codeword.
    Inconsistent { check: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeelResult {
    pub outcome: PeelOutcome,
    /// Number of erasures resolved before stopping.
    pub resolved_count: usize,
}

impl TannerGraph {
    /// Samples a graph by configuration-model socket matching. Node counts
    /// per degree are rounded largest-remainder; the check side absorbs any
    /// edge-total slack at the largest degree (plus a single degree swap),
    /// or construction fails. Double edges are deleted in pairs. The result
    /// is deterministic for a fixed seed.
    pub fn sample(dist: &StackDist, n_vars: usize, seed: u64) -> Result<Self, LdpcError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let var_counts = largest_remainder(dist.vars.coeffs(), n_vars);
        let edge_total: i64 = var_counts.iter().map(|&(d, c)| d as i64 * c as i64).sum();
        let check_counts = check_allocation(&dist.rho, edge_total)?;

        // Assign degrees to variables in random order, then match sockets.
        let mut var_degrees: Vec<u32> = var_counts
            .iter()
            .flat_map(|&(d, c)| std::iter::repeat(d).take(c))
            .collect();
        debug_assert_eq!(var_degrees.len(), n_vars);
        var_degrees.shuffle(&mut rng);

        let mut var_sockets: Vec<u32> = Vec::with_capacity(edge_total as usize);
        for (v, &d) in var_degrees.iter().enumerate() {
            var_sockets.extend(std::iter::repeat(v as u32).take(d as usize));
        }
        let n_checks: usize = check_counts.iter().map(|&(_, c)| c).sum();
        let mut check_sockets: Vec<u32> = Vec::with_capacity(edge_total as usize);
        {
            let mut check = 0u32;
            for &(d, c) in &check_counts {
                for _ in 0..c {
                    check_sockets.extend(std::iter::repeat(check).take(d as usize));
                    check += 1;
                }
            }
        }
        debug_assert_eq!(var_sockets.len(), check_sockets.len());
        check_sockets.shuffle(&mut rng);

        // Multi-edge parity: keep an edge iff it occurs an odd number of times.
        let mut pair_count = std::collections::HashMap::new();
        for (&v, &c) in var_sockets.iter().zip(&check_sockets) {
            *pair_count.entry((c, v)).or_insert(0u32) ^= 1;
        }
        let mut check_adj = vec![Vec::new(); n_checks];
        let mut var_adj = vec![Vec::new(); n_vars];
        let mut kept: Vec<(u32, u32)> = pair_count
            .into_iter()
            .filter(|&(_, odd)| odd == 1)
            .map(|(e, _)| e)
            .collect();
        kept.sort_unstable();
        for (c, v) in kept {
            check_adj[c as usize].push(v);
            var_adj[v as usize].push(c);
        }
        Ok(TannerGraph {
            n_vars,
            check_adj,
            var_adj,
            sampled_var_degrees: var_degrees,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_checks(&self) -> usize {
        self.check_adj.len()
    }

    pub fn check_neighbors(&self, check: usize) -> &[u32] {
        &self.check_adj[check]
    }

    pub fn var_neighbors(&self, var: usize) -> &[u32] {
        &self.var_adj[var]
    }

    /// Degrees assigned by the sampler, before multi-edge removal.
    pub fn sampled_var_degrees(&self) -> &[u32] {
        &self.sampled_var_degrees
    }

    /// The parity-check matrix realized by this graph (checks as rows).
    pub fn to_matrix(&self) -> BinaryMatrix {
        BinaryMatrix::from_sparse_rows(self.n_vars, self.check_adj.clone())
            .expect("adjacency is sorted and in range")
    }

    /// Standard iterative erasure decoding: repeatedly solve checks with
    /// exactly one erased neighbor (FIFO order). Detects parity
    /// contradictions among fully-known checks.
    pub fn peel_decode(&self, received: &BitVector, pattern: &ErasurePattern) -> PeelResult {
        assert_eq!(received.len(), self.n_vars, "word length mismatch");
        assert_eq!(pattern.len(), self.n_vars, "pattern length mismatch");
        let mut bits = received.clone();
        let mut erased = vec![false; self.n_vars];
        for &p in pattern.erased_positions() {
            erased[p as usize] = true;
            bits.set(p as usize, false);
        }
        // Per-check erased-neighbor count and known-part parity.
        let mut count: Vec<u32> = Vec::with_capacity(self.n_checks());
        let mut parity: Vec<bool> = Vec::with_capacity(self.n_checks());
        for adj in &self.check_adj {
            let mut k = 0u32;
            let mut par = false;
            for &v in adj {
                if erased[v as usize] {
                    k += 1;
                } else {
                    par ^= bits.get(v as usize);
                }
            }
            count.push(k);
            parity.push(par);
        }
        let mut queue: std::collections::VecDeque<u32> = (0..self.n_checks() as u32)
            .filter(|&c| count[c as usize] == 1)
            .collect();
        let mut resolved = 0usize;
        while let Some(c) = queue.pop_front() {
            let c = c as usize;
            if count[c] != 1 {
                continue;
            }
            let v = self.check_adj[c]
                .iter()
                .map(|&v| v as usize)
                .find(|&v| erased[v])
                .expect("count says one erased neighbor");
            let value = parity[c];
            erased[v] = false;
            bits.set(v, value);
            resolved += 1;
            for &c2 in &self.var_adj[v] {
                let c2 = c2 as usize;
                count[c2] -= 1;
                if value {
                    parity[c2] = !parity[c2];
                }
                if count[c2] == 1 {
                    queue.push_back(c2 as u32);
                }
            }
        }
        // Fully known checks must have even parity.
        for c in 0..self.n_checks() {
            if count[c] == 0 && parity[c] {
                return PeelResult {
                    outcome: PeelOutcome::Inconsistent { check: c },
                    resolved_count: resolved,
                };
            }
        }
        if erased.iter().any(|&e| e) {
            PeelResult {
                outcome: PeelOutcome::Stuck,
                resolved_count: resolved,
            }
        } else {
            PeelResult {
                outcome: PeelOutcome::Decoded(bits),
                resolved_count: resolved,
            }
        }
    }
}

/// Raises a sampled stack `[top; bottom]` to full row rank by flipping
/// single bits of dependent `bottom` rows.
///
/// Selector matrices with all-even column weights (every (2,c)-regular
/// sample, for instance) are structurally rank deficient: their rows sum to
/// zero. The repair walks the bottom rows once; whenever a row fails to
/// extend the span, the lowest column whose unit vector is outside the span
/// is flipped in that row. The top block must be full rank on its own.
/// Returns the repaired bottom and the number of flips.
pub fn repair_stack_bottom(
    top: &BinaryMatrix,
    bottom: &BinaryMatrix,
) -> Result<(BinaryMatrix, usize), LdpcError> {
    use crate::gf2::IncrementalRank;
    let n = top.n_cols();
    let mut acc = IncrementalRank::new(n);
    for r in 0..top.n_rows() {
        if !acc.insert(&top.row(r)) {
            return Err(LdpcError::TopBlockRankDeficient);
        }
    }
    let mut flips = 0usize;
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(bottom.n_rows());
    for r in 0..bottom.n_rows() {
        let mut row = bottom.row(r);
        if !acc.insert(&row) {
            let mut unit = BitVector::zeros(n);
            let mut fixed = false;
            for c in 0..n {
                unit.set(c, true);
                if !acc.contains(&unit) {
                    row.flip(c);
                    let grew = acc.insert(&row);
                    debug_assert!(grew);
                    flips += 1;
                    fixed = true;
                    break;
                }
                unit.set(c, false);
            }
            debug_assert!(fixed, "span already full yet row dependent");
        }
        rows.push(row.iter_ones().map(|c| c as u32).collect());
    }
    let repaired = BinaryMatrix::from_sparse_rows(n, rows)?;
    Ok((repaired, flips))
}

/// Largest-remainder rounding of `n * coeff` per degree class; the counts
/// sum to exactly `n`.
fn largest_remainder(coeffs: &[(u32, f64)], n: usize) -> Vec<(u32, usize)> {
    let mut counts: Vec<(u32, usize, f64)> = coeffs
        .iter()
        .map(|&(d, c)| {
            let exact = c * n as f64;
            (d, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = counts.iter().map(|&(_, c, _)| c).sum();
    let leftover = n - assigned.min(n);
    // Distribute by descending remainder, ties to the larger degree.
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .2
            .partial_cmp(&counts[a].2)
            .unwrap()
            .then(counts[b].0.cmp(&counts[a].0))
    });
    for k in 0..leftover {
        let i = order[k % order.len()];
        counts[i].1 += 1;
    }
    counts.into_iter().map(|(d, c, _)| (d, c)).collect()
}

/// Check-node counts for a given edge total: round `ρ_j E / j` per degree,
/// then absorb the slack at the largest degree, optionally with one swap
/// between degree classes.
fn check_allocation(rho: &[(u32, f64)], edge_total: i64) -> Result<Vec<(u32, usize)>, LdpcError> {
    let mut counts: Vec<(u32, i64)> = rho
        .iter()
        .map(|&(d, c)| {
            let nodes = (c * edge_total as f64 / d as f64).round() as i64;
            (d, nodes)
        })
        .collect();
    let current: i64 = counts.iter().map(|&(d, c)| d as i64 * c).sum();
    let mut diff = edge_total - current;
    if diff != 0 {
        let last = counts.len() - 1;
        let big = counts[last].0 as i64;
        let adjust = if diff > 0 { diff / big } else { -((-diff) / big) };
        counts[last].1 += adjust;
        diff -= adjust * big;
    }
    if diff != 0 {
        // Move one node between degree classes differing by exactly `diff`.
        let degs: Vec<u32> = counts.iter().map(|&(d, _)| d).collect();
        let mut fixed = false;
        'outer: for i in 0..degs.len() {
            for j in 0..degs.len() {
                let delta = degs[j] as i64 - degs[i] as i64;
                if delta == diff && counts[i].1 > 0 {
                    counts[i].1 -= 1;
                    counts[j].1 += 1;
                    fixed = true;
                    break 'outer;
                }
            }
        }
        if !fixed {
            return Err(LdpcError::EdgeTotalMismatch { diff });
        }
    }
    if counts.iter().any(|&(_, c)| c < 0) {
        return Err(LdpcError::EdgeTotalMismatch { diff: 0 });
    }
    Ok(counts.into_iter().map(|(d, c)| (d, c as usize)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeDistribution;

    fn regular_stack(v: u32, c: u32) -> StackDist {
        StackDist::from_edge(&DegreeDistribution::regular(v, c))
    }

    #[test]
    fn regular_counts_exact() {
        let g = TannerGraph::sample(&regular_stack(3, 6), 100, 1).unwrap();
        assert_eq!(g.n_checks(), 50);
        assert_eq!(g.sampled_var_degrees().iter().filter(|&&d| d == 3).count(), 100);
    }

    #[test]
    fn same_seed_same_graph() {
        let a = TannerGraph::sample(&regular_stack(3, 6), 120, 9).unwrap();
        let b = TannerGraph::sample(&regular_stack(3, 6), 120, 9).unwrap();
        assert_eq!(a.check_adj, b.check_adj);
        let c = TannerGraph::sample(&regular_stack(3, 6), 120, 10).unwrap();
        assert_ne!(a.check_adj, c.check_adj);
    }

    #[test]
    fn regular_histogram_exact_at_scale() {
        let g = TannerGraph::sample(&regular_stack(3, 6), 10_000, 4).unwrap();
        assert!(g.sampled_var_degrees().iter().all(|&d| d == 3));
        assert_eq!(g.n_checks(), 5_000);
    }

    #[test]
    fn peel_zero_erasures_returns_input() {
        let g = TannerGraph::sample(&regular_stack(3, 6), 60, 2).unwrap();
        // Build a codeword: any vector in the nullspace of the check matrix.
        let m = g.to_matrix();
        let ns = m.nullspace();
        let cw = ns.first().cloned().unwrap_or_else(|| BitVector::zeros(60));
        let pat = ErasurePattern::new(60, &[]).unwrap();
        let res = g.peel_decode(&cw, &pat);
        assert_eq!(res.outcome, PeelOutcome::Decoded(cw));
        assert_eq!(res.resolved_count, 0);
    }

    #[test]
    fn peel_all_erased_is_stuck() {
        let g = TannerGraph::sample(&regular_stack(3, 6), 60, 3).unwrap();
        let pat = ErasurePattern::new(60, &(0..60).collect::<Vec<_>>()).unwrap();
        let res = g.peel_decode(&BitVector::zeros(60), &pat);
        assert_eq!(res.outcome, PeelOutcome::Stuck);
    }

    #[test]
    fn peel_detects_inconsistency() {
        let g = TannerGraph::sample(&regular_stack(3, 6), 60, 5).unwrap();
        // A non-codeword with no erasures must trip some check.
        let m = g.to_matrix();
        let mut w = BitVector::zeros(60);
        w.set(0, true);
        if m.mat_vec(&w).unwrap().is_zero() {
            // Exceedingly unlikely; skip rather than assert vacuously.
            return;
        }
        let pat = ErasurePattern::new(60, &[]).unwrap();
        match g.peel_decode(&w, &pat).outcome {
            PeelOutcome::Inconsistent { .. } => {}
            other => panic!("expected inconsistency, got {other:?}"),
        }
    }

    #[test]
    fn peel_success_below_threshold() {
        use rand::SeedableRng;
        // (3,6)-regular at erasure 0.30, below the 0.4294 threshold.
        let n = 2000;
        let g = TannerGraph::sample(&regular_stack(3, 6), n, 11).unwrap();
        let mut ok = 0;
        let trials = 200;
        for t in 0..trials {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1000);
            rng.set_stream(t as u64);
            let pat = ErasurePattern::sample(n, 0.30, &mut rng);
            let res = g.peel_decode(&BitVector::zeros(n), &pat);
            if matches!(res.outcome, PeelOutcome::Decoded(_)) {
                ok += 1;
            }
        }
        assert!(
            ok as f64 / trials as f64 >= 0.99,
            "success rate {}/{trials}",
            ok
        );
    }

    #[test]
    fn peel_monotone_in_unerasing() {
        use rand::SeedableRng;
        let n = 120;
        let g = TannerGraph::sample(&regular_stack(3, 6), n, 6).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let pat = ErasurePattern::sample(n, 0.5, &mut rng);
            let full = g.peel_decode(&BitVector::zeros(n), &pat);
            if !matches!(full.outcome, PeelOutcome::Decoded(_)) {
                continue;
            }
            // Un-erase one position: still decodable.
            if let Some(&p) = pat.erased_positions().first() {
                let rest: Vec<usize> = pat
                    .erased_positions()
                    .iter()
                    .skip(1)
                    .map(|&x| x as usize)
                    .collect();
                let _ = p;
                let sub = ErasurePattern::new(n, &rest).unwrap();
                let res = g.peel_decode(&BitVector::zeros(n), &sub);
                assert!(matches!(res.outcome, PeelOutcome::Decoded(_)));
            }
        }
    }

    #[test]
    fn graph_serializes_via_matrix_format() {
        let g = TannerGraph::sample(&regular_stack(3, 6), 30, 8).unwrap();
        let m = g.to_matrix();
        let mut buf = Vec::new();
        m.write_sparse_text(&mut buf).unwrap();
        let back = BinaryMatrix::read_sparse_text(&mut buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn erasure_pattern_helpers() {
        let p = ErasurePattern::new(6, &[1, 4]).unwrap();
        assert!(p.is_erased(1) && !p.is_erased(2));
        assert_eq!(p.revealed_positions(), vec![0, 2, 3, 5]);
        assert!(ErasurePattern::new(4, &[9]).is_err());
    }
}
