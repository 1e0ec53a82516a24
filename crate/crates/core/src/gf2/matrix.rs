use std::io::{BufRead, Write};

use super::bitvec::{words_for, BitVector};
use super::Gf2Error;

/// A matrix over GF(2), stored either as bit-packed dense rows or as
/// per-row sorted column indices (the coordinate form, sorted row-major).
///
/// Matrices are immutable once constructed; every operation returns a new
/// value. Elimination-style operations (`rank`, `solve`, `nullspace`,
/// `invert`) convert sparse inputs to dense first.
#[derive(Clone, PartialEq, Eq)]
pub struct BinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    repr: Repr,
}

#[derive(Clone, PartialEq, Eq)]
enum Repr {
    /// Row-major bit-packed rows, `words_per_row` words each.
    Dense { words_per_row: usize, bits: Vec<u64> },
    /// Sorted column indices per row.
    Sparse { rows: Vec<Vec<u32>> },
}

impl BinaryMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        let wpr = words_for(n_cols);
        BinaryMatrix {
            n_rows,
            n_cols,
            repr: Repr::Dense {
                words_per_row: wpr,
                bits: vec![0; n_rows * wpr],
            },
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BinaryMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVector]) -> Self {
        let n_cols = rows.first().map_or(0, |r| r.len());
        let wpr = words_for(n_cols);
        let mut bits = Vec::with_capacity(rows.len() * wpr);
        for r in rows {
            assert_eq!(r.len(), n_cols, "rows of unequal length");
            bits.extend_from_slice(r.words());
        }
        BinaryMatrix {
            n_rows: rows.len(),
            n_cols,
            repr: Repr::Dense { words_per_row: wpr, bits },
        }
    }

    /// Sparse matrix from (row, col) coordinates. Duplicate entries are
    /// rejected, matching the "no duplicate coordinates" invariant.
    pub fn from_coords(
        n_rows: usize,
        n_cols: usize,
        coords: &[(usize, usize)],
    ) -> Result<Self, Gf2Error> {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n_rows];
        for &(r, c) in coords {
            if r >= n_rows {
                return Err(Gf2Error::IndexOutOfRange { index: r, bound: n_rows });
            }
            if c >= n_cols {
                return Err(Gf2Error::IndexOutOfRange { index: c, bound: n_cols });
            }
            rows[r].push(c as u32);
        }
        for (r, row) in rows.iter_mut().enumerate() {
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                let c = row.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                return Err(Gf2Error::DuplicateEntry { row: r, col: c as usize });
            }
        }
        Ok(BinaryMatrix {
            n_rows,
            n_cols,
            repr: Repr::Sparse { rows },
        })
    }

    /// Sparse matrix from per-row support lists (each list sorted, in range,
    /// duplicate-free).
    pub fn from_sparse_rows(n_cols: usize, rows: Vec<Vec<u32>>) -> Result<Self, Gf2Error> {
        for (r, row) in rows.iter().enumerate() {
            for w in row.windows(2) {
                if w[0] >= w[1] {
                    return Err(Gf2Error::DuplicateEntry { row: r, col: w[1] as usize });
                }
            }
            if let Some(&last) = row.last() {
                if last as usize >= n_cols {
                    return Err(Gf2Error::IndexOutOfRange {
                        index: last as usize,
                        bound: n_cols,
                    });
                }
            }
        }
        Ok(BinaryMatrix {
            n_rows: rows.len(),
            n_cols,
            repr: Repr::Sparse { rows },
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.repr, Repr::Sparse { .. })
    }

    /// Number of ones.
    pub fn nnz(&self) -> usize {
        match &self.repr {
            Repr::Dense { bits, .. } => bits.iter().map(|w| w.count_ones() as usize).sum(),
            Repr::Sparse { rows } => rows.iter().map(Vec::len).sum(),
        }
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.n_rows && c < self.n_cols, "index out of range");
        match &self.repr {
            Repr::Dense { words_per_row, bits } => {
                bits[r * words_per_row + c / 64] >> (c % 64) & 1 == 1
            }
            Repr::Sparse { rows } => rows[r].binary_search(&(c as u32)).is_ok(),
        }
    }

    fn set(&mut self, r: usize, c: usize, value: bool) {
        match &mut self.repr {
            Repr::Dense { words_per_row, bits } => {
                let mask = 1u64 << (c % 64);
                let w = &mut bits[r * *words_per_row + c / 64];
                if value {
                    *w |= mask;
                } else {
                    *w &= !mask;
                }
            }
            Repr::Sparse { .. } => unreachable!("set on sparse"),
        }
    }

    /// Row as a fresh bit vector.
    pub fn row(&self, r: usize) -> BitVector {
        assert!(r < self.n_rows);
        match &self.repr {
            Repr::Dense { words_per_row, bits } => BitVector::from_words(
                self.n_cols,
                bits[r * words_per_row..(r + 1) * words_per_row].to_vec(),
            ),
            Repr::Sparse { rows } => {
                let mut v = BitVector::zeros(self.n_cols);
                for &c in &rows[r] {
                    v.set(c as usize, true);
                }
                v
            }
        }
    }

    /// Calls `f` for every column index with a one in row `r`, ascending.
    pub fn for_each_one_in_row<F: FnMut(usize)>(&self, r: usize, mut f: F) {
        match &self.repr {
            Repr::Dense { words_per_row, bits } => {
                for (wi, &w) in bits[r * words_per_row..(r + 1) * words_per_row]
                    .iter()
                    .enumerate()
                {
                    let mut w = w;
                    while w != 0 {
                        f(wi * 64 + w.trailing_zeros() as usize);
                        w &= w - 1;
                    }
                }
            }
            Repr::Sparse { rows } => {
                for &c in &rows[r] {
                    f(c as usize);
                }
            }
        }
    }

    /// XORs row `r` into `out` (lengths must agree).
    pub fn xor_row_into(&self, r: usize, out: &mut BitVector) {
        assert_eq!(out.len(), self.n_cols);
        match &self.repr {
            Repr::Dense { words_per_row, bits } => {
                let row = &bits[r * words_per_row..(r + 1) * words_per_row];
                for (o, w) in out.words_mut().iter_mut().zip(row) {
                    *o ^= w;
                }
            }
            Repr::Sparse { rows } => {
                for &c in &rows[r] {
                    out.flip(c as usize);
                }
            }
        }
    }

    pub fn to_dense(&self) -> BinaryMatrix {
        match &self.repr {
            Repr::Dense { .. } => self.clone(),
            Repr::Sparse { rows } => {
                let mut m = BinaryMatrix::zeros(self.n_rows, self.n_cols);
                for (r, row) in rows.iter().enumerate() {
                    for &c in row {
                        m.set(r, c as usize, true);
                    }
                }
                m
            }
        }
    }

    pub fn to_sparse(&self) -> BinaryMatrix {
        match &self.repr {
            Repr::Sparse { .. } => self.clone(),
            Repr::Dense { .. } => {
                let mut rows = vec![Vec::new(); self.n_rows];
                for (r, out) in rows.iter_mut().enumerate() {
                    self.for_each_one_in_row(r, |c| out.push(c as u32));
                }
                BinaryMatrix {
                    n_rows: self.n_rows,
                    n_cols: self.n_cols,
                    repr: Repr::Sparse { rows },
                }
            }
        }
    }

    /// Vertical stack, `self` on top.
    pub fn stack(&self, bottom: &BinaryMatrix) -> Result<BinaryMatrix, Gf2Error> {
        if self.n_cols != bottom.n_cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_cols,
                got: bottom.n_cols,
            });
        }
        let mut rows = Vec::with_capacity(self.n_rows + bottom.n_rows);
        for m in [self, bottom] {
            for r in 0..m.n_rows {
                let mut row = Vec::new();
                m.for_each_one_in_row(r, |c| row.push(c as u32));
                rows.push(row);
            }
        }
        BinaryMatrix::from_sparse_rows(self.n_cols, rows)
    }

    pub fn transpose(&self) -> BinaryMatrix {
        match &self.repr {
            Repr::Sparse { rows } => {
                let mut t_rows: Vec<Vec<u32>> = vec![Vec::new(); self.n_cols];
                for (r, row) in rows.iter().enumerate() {
                    for &c in row {
                        t_rows[c as usize].push(r as u32);
                    }
                }
                BinaryMatrix {
                    n_rows: self.n_cols,
                    n_cols: self.n_rows,
                    repr: Repr::Sparse { rows: t_rows },
                }
            }
            Repr::Dense { .. } => {
                let mut m = BinaryMatrix::zeros(self.n_cols, self.n_rows);
                for r in 0..self.n_rows {
                    self.for_each_one_in_row(r, |c| m.set(c, r, true));
                }
                m
            }
        }
    }

    /// Submatrix of the named columns, order preserved. Indices must be
    /// strictly increasing and in range.
    pub fn select_columns(&self, indices: &[usize]) -> Result<BinaryMatrix, Gf2Error> {
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Gf2Error::InvalidColumnSelection);
            }
        }
        if let Some(&last) = indices.last() {
            if last >= self.n_cols {
                return Err(Gf2Error::IndexOutOfRange { index: last, bound: self.n_cols });
            }
        }
        match &self.repr {
            Repr::Sparse { rows } => {
                let mut out_rows = Vec::with_capacity(self.n_rows);
                for row in rows {
                    let mut out = Vec::new();
                    let mut it = indices.iter().enumerate();
                    let mut cur = it.next();
                    for &c in row {
                        while let Some((j, &idx)) = cur {
                            match idx.cmp(&(c as usize)) {
                                std::cmp::Ordering::Less => cur = it.next(),
                                std::cmp::Ordering::Equal => {
                                    out.push(j as u32);
                                    cur = it.next();
                                    break;
                                }
                                std::cmp::Ordering::Greater => break,
                            }
                            let _ = j;
                        }
                    }
                    out_rows.push(out);
                }
                BinaryMatrix::from_sparse_rows(indices.len(), out_rows)
            }
            Repr::Dense { .. } => {
                let mut m = BinaryMatrix::zeros(self.n_rows, indices.len());
                for r in 0..self.n_rows {
                    for (j, &c) in indices.iter().enumerate() {
                        if self.get(r, c) {
                            m.set(r, j, true);
                        }
                    }
                }
                Ok(m)
            }
        }
    }

    /// Mod-2 matrix-vector product; cost proportional to the ones count for
    /// sparse storage.
    pub fn mat_vec(&self, v: &BitVector) -> Result<BitVector, Gf2Error> {
        if v.len() != self.n_cols {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_cols,
                got: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.n_rows);
        match &self.repr {
            Repr::Sparse { rows } => {
                for (r, row) in rows.iter().enumerate() {
                    let mut acc = false;
                    for &c in row {
                        acc ^= v.get(c as usize);
                    }
                    if acc {
                        out.set(r, true);
                    }
                }
            }
            Repr::Dense { words_per_row, bits } => {
                for r in 0..self.n_rows {
                    let mut acc = 0u64;
                    for (a, b) in bits[r * words_per_row..(r + 1) * words_per_row]
                        .iter()
                        .zip(v.words())
                    {
                        acc ^= a & b;
                    }
                    if acc.count_ones() % 2 == 1 {
                        out.set(r, true);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Mod-2 matrix product `self * other`; the result is dense.
    pub fn mat_mul(&self, other: &BinaryMatrix) -> Result<BinaryMatrix, Gf2Error> {
        if self.n_cols != other.n_rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_cols,
                got: other.n_rows,
            });
        }
        let other = other.to_dense();
        let (o_wpr, o_bits) = match &other.repr {
            Repr::Dense { words_per_row, bits } => (*words_per_row, bits),
            Repr::Sparse { .. } => unreachable!(),
        };
        let wpr = words_for(other.n_cols);
        let mut bits = vec![0u64; self.n_rows * wpr];
        for r in 0..self.n_rows {
            let out = &mut bits[r * wpr..(r + 1) * wpr];
            self.for_each_one_in_row(r, |k| {
                for (o, w) in out.iter_mut().zip(&o_bits[k * o_wpr..(k + 1) * o_wpr]) {
                    *o ^= w;
                }
            });
        }
        Ok(BinaryMatrix {
            n_rows: self.n_rows,
            n_cols: other.n_cols,
            repr: Repr::Dense { words_per_row: wpr, bits },
        })
    }

    /// Solves `t * u = y` for unit-lower-triangular `t` by forward
    /// substitution; cost proportional to the number of ones in `t`.
    pub fn back_substitute(&self, y: &BitVector) -> Result<BitVector, Gf2Error> {
        if self.n_rows != self.n_cols {
            return Err(Gf2Error::NotSquare { rows: self.n_rows, cols: self.n_cols });
        }
        if y.len() != self.n_rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_rows,
                got: y.len(),
            });
        }
        let mut u = BitVector::zeros(self.n_rows);
        for i in 0..self.n_rows {
            let mut acc = y.get(i);
            let mut diag_seen = false;
            let mut bad = false;
            self.for_each_one_in_row(i, |c| {
                if c < i {
                    if u.get(c) {
                        acc = !acc;
                    }
                } else if c == i {
                    diag_seen = true;
                } else {
                    bad = true;
                }
            });
            if bad || !diag_seen {
                return Err(Gf2Error::NotUnitLowerTriangular { row: i });
            }
            u.set(i, acc);
        }
        Ok(u)
    }

    /// GF(2) rank. Sparse inputs are converted to dense first.
    pub fn rank(&self) -> usize {
        let dense = self.to_dense();
        let (wpr, bits) = match dense.repr {
            Repr::Dense { words_per_row, bits } => (words_per_row, bits),
            Repr::Sparse { .. } => unreachable!(),
        };
        let mut rows: Vec<Vec<u64>> = bits.chunks(wpr.max(1)).map(|c| c.to_vec()).collect();
        if wpr == 0 {
            return 0;
        }
        echelonize(&mut rows, self.n_cols, false).len()
    }

    /// Basis of `{ v : self * v = 0 }`, deterministic (free columns in
    /// ascending order). The basis has `n_cols - rank` vectors.
    pub fn nullspace(&self) -> Vec<BitVector> {
        super::solve::LinearSolver::new(self).nullspace().to_vec()
    }

    /// Solves `self * x = b`, returning one particular solution and a basis
    /// of the kernel, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &BitVector) -> Result<Option<super::solve::Solution>, Gf2Error> {
        if b.len() != self.n_rows {
            return Err(Gf2Error::DimensionMismatch {
                expected: self.n_rows,
                got: b.len(),
            });
        }
        let solver = super::solve::LinearSolver::new(self);
        Ok(solver.solve(b).map(|particular| super::solve::Solution {
            particular,
            nullspace_basis: solver.nullspace().to_vec(),
        }))
    }

    /// Inverse of a square matrix, or `None` if singular.
    pub fn invert(&self) -> Option<BinaryMatrix> {
        if self.n_rows != self.n_cols {
            return None;
        }
        let n = self.n_rows;
        let dense = self.to_dense();
        let wpr = words_for(n);
        // Augmented rows [self | I].
        let mut rows: Vec<Vec<u64>> = (0..n)
            .map(|r| {
                let mut row = vec![0u64; 2 * wpr];
                dense.for_each_one_in_row(r, |c| row[c / 64] |= 1 << (c % 64));
                row[wpr + r / 64] |= 1 << (r % 64);
                row
            })
            .collect();
        // Gauss-Jordan over the left half.
        let mut pivot_row = 0;
        for col in 0..n {
            let (w, b) = (col / 64, col % 64);
            let Some(p) = (pivot_row..n).find(|&r| rows[r][w] >> b & 1 == 1) else {
                return None;
            };
            rows.swap(pivot_row, p);
            let piv = rows[pivot_row].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != pivot_row && row[w] >> b & 1 == 1 {
                    for (a, b) in row.iter_mut().zip(&piv) {
                        *a ^= b;
                    }
                }
            }
            pivot_row += 1;
        }
        let bits = rows
            .into_iter()
            .flat_map(|row| row[wpr..].to_vec())
            .collect();
        Some(BinaryMatrix {
            n_rows: n,
            n_cols: n,
            repr: Repr::Dense { words_per_row: wpr, bits },
        })
    }

    /// Columns of the row echelon form that carry a pivot, ascending.
    /// Pivots are chosen as the first nonzero in column order.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let dense = self.to_dense();
        let (wpr, bits) = match dense.repr {
            Repr::Dense { words_per_row, bits } => (words_per_row, bits),
            Repr::Sparse { .. } => unreachable!(),
        };
        if wpr == 0 {
            return Vec::new();
        }
        let mut rows: Vec<Vec<u64>> = bits.chunks(wpr).map(|c| c.to_vec()).collect();
        echelonize(&mut rows, self.n_cols, false)
    }

    /// Linearly independent vectors extending the row space, chosen greedily
    /// among standard unit vectors in index order. `count` defaults to the
    /// full complement `n_cols - rank`.
    pub fn row_space_complement(&self, count: Option<usize>) -> Result<Vec<BitVector>, Gf2Error> {
        let pivots = self.pivot_columns();
        let max = self.n_cols - pivots.len();
        let want = count.unwrap_or(max);
        if want > max {
            return Err(Gf2Error::ComplementTooLarge { requested: want, available: max });
        }
        let mut out = Vec::with_capacity(want);
        let mut piv_it = pivots.iter().peekable();
        for c in 0..self.n_cols {
            if out.len() == want {
                break;
            }
            if piv_it.peek() == Some(&&c) {
                piv_it.next();
                continue;
            }
            let mut v = BitVector::zeros(self.n_cols);
            v.set(c, true);
            out.push(v);
        }
        Ok(out)
    }

    /// Writes the sparse text form: a `n_rows n_cols nnz` header, then one
    /// `row col` line per one (0-based).
    pub fn write_sparse_text<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for r in 0..self.n_rows {
            let mut cols = Vec::new();
            self.for_each_one_in_row(r, |c| cols.push(c));
            for c in cols {
                writeln!(w, "{r} {c}")?;
            }
        }
        Ok(())
    }

    pub fn read_sparse_text<R: BufRead>(r: &mut R) -> Result<BinaryMatrix, Gf2Error> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::Parse("empty matrix file".into()))??;
        let mut it = header.split_whitespace();
        let parse = |s: Option<&str>| -> Result<usize, Gf2Error> {
            s.ok_or_else(|| Gf2Error::Parse("short header".into()))?
                .parse()
                .map_err(|_| Gf2Error::Parse(format!("bad header: {header}")))
        };
        let n_rows = parse(it.next())?;
        let n_cols = parse(it.next())?;
        let nnz = parse(it.next())?;
        let mut coords = Vec::with_capacity(nnz);
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let r: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Gf2Error::Parse(format!("bad entry line: {line}")))?;
            let c: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Gf2Error::Parse(format!("bad entry line: {line}")))?;
            coords.push((r, c));
        }
        if coords.len() != nnz {
            return Err(Gf2Error::Parse(format!(
                "expected {nnz} entries, found {}",
                coords.len()
            )));
        }
        BinaryMatrix::from_coords(n_rows, n_cols, &coords)
    }
}

impl std::fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} ({} ones)", self.n_rows, self.n_cols, self.nnz())?;
        if self.n_rows <= 16 && self.n_cols <= 80 {
            for r in 0..self.n_rows {
                for c in 0..self.n_cols {
                    write!(f, "{}", self.get(r, c) as u8)?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// In-place row echelon form; returns the pivot columns in order. Pivot for
/// each column is the first remaining row with a one there. With `reduced`
/// the rows above pivots are cleared too.
pub(crate) fn echelonize(rows: &mut Vec<Vec<u64>>, n_cols: usize, reduced: bool) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut pivot_row = 0;
    for col in 0..n_cols {
        if pivot_row == rows.len() {
            break;
        }
        let (w, b) = (col / 64, col % 64);
        let Some(p) = (pivot_row..rows.len()).find(|&r| rows[r][w] >> b & 1 == 1) else {
            continue;
        };
        rows.swap(pivot_row, p);
        let piv = std::mem::take(&mut rows[pivot_row]);
        let start = if reduced { 0 } else { pivot_row + 1 };
        for (r, row) in rows.iter_mut().enumerate().skip(start) {
            if r != pivot_row && !row.is_empty() && row[w] >> b & 1 == 1 {
                for (a, b) in row[w..].iter_mut().zip(&piv[w..]) {
                    *a ^= b;
                }
            }
        }
        rows[pivot_row] = piv;
        pivots.push(col);
        pivot_row += 1;
    }
    pivots
}
