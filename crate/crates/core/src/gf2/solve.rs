use super::bitvec::{words_for, BitVector};
use super::matrix::BinaryMatrix;

/// A particular solution together with a kernel basis; the full solution set
/// is `particular + span(nullspace_basis)`.
#[derive(Debug, Clone)]
pub struct Solution {
    pub particular: BitVector,
    pub nullspace_basis: Vec<BitVector>,
}

/// Reduced row echelon factorization of a matrix, reusable across many
/// right-hand sides. `transform * a = rref`, so a system `a x = b` is
/// consistent iff `transform * b` vanishes on the zero rows of the RREF.
pub struct LinearSolver {
    n_cols: usize,
    rank: usize,
    /// RREF rows (only the first `rank` are nonzero), packed over n_cols.
    rref: Vec<Vec<u64>>,
    /// Row transform applied to the identity, packed over n_rows.
    transform: Vec<Vec<u64>>,
    /// Pivot column of each of the first `rank` rows.
    pivot_cols: Vec<usize>,
    nullspace: Vec<BitVector>,
}

impl LinearSolver {
    pub fn new(a: &BinaryMatrix) -> Self {
        let n_rows = a.n_rows();
        let n_cols = a.n_cols();
        let wpr = words_for(n_cols);
        let twp = words_for(n_rows);
        let mut rows: Vec<Vec<u64>> = (0..n_rows)
            .map(|r| {
                let mut row = vec![0u64; wpr];
                a.for_each_one_in_row(r, |c| row[c / 64] |= 1 << (c % 64));
                row
            })
            .collect();
        let mut transform: Vec<Vec<u64>> = (0..n_rows)
            .map(|r| {
                let mut row = vec![0u64; twp];
                row[r / 64] |= 1 << (r % 64);
                row
            })
            .collect();
        let mut pivot_cols = Vec::new();
        let mut pivot_row = 0usize;
        for col in 0..n_cols {
            if pivot_row == n_rows {
                break;
            }
            let (w, b) = (col / 64, col % 64);
            let Some(p) = (pivot_row..n_rows).find(|&r| rows[r][w] >> b & 1 == 1) else {
                continue;
            };
            rows.swap(pivot_row, p);
            transform.swap(pivot_row, p);
            let piv = rows[pivot_row].clone();
            let piv_t = transform[pivot_row].clone();
            for r in 0..n_rows {
                if r != pivot_row && rows[r][w] >> b & 1 == 1 {
                    for (a, b) in rows[r][w..].iter_mut().zip(&piv[w..]) {
                        *a ^= b;
                    }
                    for (a, b) in transform[r].iter_mut().zip(&piv_t) {
                        *a ^= b;
                    }
                }
            }
            pivot_cols.push(col);
            pivot_row += 1;
        }
        let rank = pivot_cols.len();

        // Kernel basis: one vector per free column, ascending.
        let mut is_pivot = vec![false; n_cols];
        for &c in &pivot_cols {
            is_pivot[c] = true;
        }
        let mut nullspace = Vec::with_capacity(n_cols - rank);
        for free in (0..n_cols).filter(|&c| !is_pivot[c]) {
            let mut v = BitVector::zeros(n_cols);
            v.set(free, true);
            let (w, b) = (free / 64, free % 64);
            for (r, &pc) in pivot_cols.iter().enumerate() {
                if rows[r][w] >> b & 1 == 1 {
                    v.set(pc, true);
                }
            }
            nullspace.push(v);
        }

        LinearSolver {
            n_cols,
            rank,
            rref: rows,
            transform,
            pivot_cols,
            nullspace,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn nullspace(&self) -> &[BitVector] {
        &self.nullspace
    }

    /// One particular solution of `a x = b` (free variables zero), or `None`
    /// when inconsistent.
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        let n_rows = self.transform.len();
        assert_eq!(b.len(), n_rows, "rhs length mismatch");
        let mut x = BitVector::zeros(self.n_cols);
        for r in 0..n_rows {
            // y_r = <transform_r, b>
            let mut acc = 0u64;
            for (t, w) in self.transform[r].iter().zip(b.words()) {
                acc ^= t & w;
            }
            let y = acc.count_ones() % 2 == 1;
            if r < self.rank {
                if y {
                    x.set(self.pivot_cols[r], true);
                }
            } else if y {
                return None;
            }
        }
        Some(x)
    }
}

/// Streaming GF(2) rank: feed vectors one at a time; `insert` reports whether
/// the vector enlarged the span.
pub struct IncrementalRank {
    words: usize,
    /// Pivot vector stored by its leading (lowest) set bit.
    pivots: Vec<Option<Box<[u64]>>>,
    rank: usize,
}

impl IncrementalRank {
    pub fn new(dim: usize) -> Self {
        IncrementalRank {
            words: words_for(dim),
            pivots: vec![None; dim],
            rank: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn insert(&mut self, v: &BitVector) -> bool {
        let mut work = v.words().to_vec();
        work.resize(self.words, 0);
        self.insert_words(work)
    }

    /// Whether `v` already lies in the span (reduces to zero).
    pub fn contains(&self, v: &BitVector) -> bool {
        let mut work = v.words().to_vec();
        work.resize(self.words, 0);
        loop {
            let Some(lead) = first_set_bit(&work) else {
                return true;
            };
            match &self.pivots[lead] {
                Some(p) => {
                    for (a, b) in work.iter_mut().zip(p.iter()) {
                        *a ^= b;
                    }
                }
                None => return false,
            }
        }
    }

    pub(crate) fn insert_words(&mut self, mut work: Vec<u64>) -> bool {
        loop {
            let Some(lead) = first_set_bit(&work) else {
                return false;
            };
            match &self.pivots[lead] {
                Some(p) => {
                    for (a, b) in work.iter_mut().zip(p.iter()) {
                        *a ^= b;
                    }
                }
                None => {
                    self.pivots[lead] = Some(work.into_boxed_slice());
                    self.rank += 1;
                    return true;
                }
            }
        }
    }
}

fn first_set_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .position(|&w| w != 0)
        .map(|i| i * 64 + words[i].trailing_zeros() as usize)
}

/// Rank of a sparse column collection over GF(2).
///
/// Degree-one rows and columns are structural pivots and are peeled off in
/// linear time; the residual core is eliminated densely. `dim` is the length
/// of each column vector.
pub fn sparse_column_rank(dim: usize, columns: &[Vec<u32>]) -> usize {
    let n_cols = columns.len();
    let mut col_rows: Vec<Vec<u32>> = columns.to_vec();
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); dim];
    for (ci, col) in col_rows.iter().enumerate() {
        for &r in col {
            row_cols[r as usize].push(ci as u32);
        }
    }
    let mut col_alive = vec![true; n_cols];
    let mut row_alive = vec![true; dim];
    let mut col_deg: Vec<u32> = col_rows.iter().map(|c| c.len() as u32).collect();
    let mut row_deg: Vec<u32> = row_cols.iter().map(|c| c.len() as u32).collect();
    let mut queue: std::collections::VecDeque<(bool, u32)> = std::collections::VecDeque::new();
    for (c, &d) in col_deg.iter().enumerate() {
        if d == 1 {
            queue.push_back((true, c as u32));
        }
    }
    for (r, &d) in row_deg.iter().enumerate() {
        if d == 1 {
            queue.push_back((false, r as u32));
        }
    }
    let mut rank = 0usize;
    let mut kill_col = |c: usize,
                        col_alive: &mut Vec<bool>,
                        row_deg: &mut Vec<u32>,
                        queue: &mut std::collections::VecDeque<(bool, u32)>,
                        row_alive: &Vec<bool>,
                        col_rows: &Vec<Vec<u32>>| {
        col_alive[c] = false;
        for &r in &col_rows[c] {
            let r = r as usize;
            if row_alive[r] {
                row_deg[r] -= 1;
                if row_deg[r] == 1 {
                    queue.push_back((false, r as u32));
                }
            }
        }
    };
    let mut kill_row = |r: usize,
                        row_alive: &mut Vec<bool>,
                        col_deg: &mut Vec<u32>,
                        queue: &mut std::collections::VecDeque<(bool, u32)>,
                        col_alive: &Vec<bool>,
                        row_cols: &Vec<Vec<u32>>| {
        row_alive[r] = false;
        for &c in &row_cols[r] {
            let c = c as usize;
            if col_alive[c] {
                col_deg[c] -= 1;
                if col_deg[c] == 1 {
                    queue.push_back((true, c as u32));
                }
            }
        }
    };
    while let Some((is_col, idx)) = queue.pop_front() {
        let idx = idx as usize;
        if is_col {
            if !col_alive[idx] || col_deg[idx] != 1 {
                continue;
            }
            let r = col_rows[idx]
                .iter()
                .map(|&r| r as usize)
                .find(|&r| row_alive[r])
                .expect("degree-1 column with no live row");
            rank += 1;
            kill_col(idx, &mut col_alive, &mut row_deg, &mut queue, &row_alive, &col_rows);
            kill_row(r, &mut row_alive, &mut col_deg, &mut queue, &col_alive, &row_cols);
        } else {
            if !row_alive[idx] || row_deg[idx] != 1 {
                continue;
            }
            let c = row_cols[idx]
                .iter()
                .map(|&c| c as usize)
                .find(|&c| col_alive[c])
                .expect("degree-1 row with no live column");
            rank += 1;
            kill_row(idx, &mut row_alive, &mut col_deg, &mut queue, &col_alive, &row_cols);
            kill_col(c, &mut col_alive, &mut row_deg, &mut queue, &row_alive, &col_rows);
        }
    }
    // Dense elimination of the residual core.
    let live_rows: Vec<usize> = (0..dim).filter(|&r| row_alive[r] && row_deg[r] > 0).collect();
    if live_rows.is_empty() {
        return rank;
    }
    let mut row_index = vec![u32::MAX; dim];
    for (i, &r) in live_rows.iter().enumerate() {
        row_index[r] = i as u32;
    }
    let mut acc = IncrementalRank::new(live_rows.len());
    for (c, col) in col_rows.iter().enumerate() {
        if !col_alive[c] || col_deg[c] == 0 {
            continue;
        }
        let mut words = vec![0u64; words_for(live_rows.len())];
        for &r in col {
            let r = r as usize;
            if row_alive[r] {
                let i = row_index[r] as usize;
                words[i / 64] ^= 1 << (i % 64);
            }
        }
        acc.insert_words(words);
    }
    rank + acc.rank()
}
