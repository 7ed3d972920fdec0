//! Dense bit-packed linear algebra over GF(2).
//!
//! Everything the duality pipeline needs from mod-2 arithmetic lives here:
//! rank, row-basis selection with dependency bookkeeping, left inverses of
//! full-row-rank matrices, canonical kernel bases, and linear-system solving.
//! Matrices are row-major with each row packed into 64-bit words.

use std::fmt;
use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    /// Forced row indices are out of range, duplicated, dependent, or do not
    /// span the row space.
    #[error("forced rows do not form a basis of the row space")]
    ForcedRowsNotABasis,
    /// A left inverse was requested for a matrix with dependent rows.
    #[error("matrix rows are linearly dependent")]
    DependentRows,
    /// The supplied left inverse / row basis pair does not satisfy its
    /// defining contract for this matrix.
    #[error("inconsistent inputs: {0}")]
    InconsistentInputs(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("cannot parse bit matrix: {0}")]
    BadText(String),
}

/// Packed vector of GF(2) coordinates. Bits beyond `len` are kept zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Unit-like vector with ones at the given (zero-based) positions.
    pub fn from_indices(len: usize, indices: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &i in indices {
            assert!(i < len, "index {i} out of range for length {len}");
            v.set(i, true);
        }
        v
    }

    /// Parses a string of '0'/'1' characters.
    pub fn parse(text: &str) -> Result<Self, Gf2Error> {
        let mut v = Self::zeros(text.len());
        for (i, c) in text.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Gf2Error::BadText(format!("unexpected character {other:?}"))),
            }
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Number of ones.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// XOR `other` into `self`. Lengths must match.
    pub fn xor_with(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of mismatched lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    /// Parity of the overlap with `other` (the GF(2) dot product).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of mismatched lengths");
        let mut acc = 0u64;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= a & b;
        }
        acc.count_ones() & 1 == 1
    }

    /// Whether the overlap with `other` is empty.
    pub fn disjoint(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "overlap of mismatched lengths");
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Positions of ones, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + b)
                }
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.ones().next()
    }

    /// The low 64 coordinates packed into a word. Requires `len <= 64`.
    pub fn as_u64(&self) -> u64 {
        assert!(self.len <= 64, "vector longer than one word");
        self.words.first().copied().unwrap_or(0)
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

/// Dense GF(2) matrix stored as one [`BitVector`] per row.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].set(i, true);
        }
        m
    }

    /// Builds a matrix from rows that must share one length.
    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "ragged rows");
        }
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Parses rows of '0'/'1' strings (no header line).
    pub fn parse_rows(rows: &[&str]) -> Result<Self, Gf2Error> {
        let parsed: Result<Vec<_>, _> = rows.iter().map(|r| BitVector::parse(r)).collect();
        let parsed = parsed?;
        let cols = parsed.first().map_or(0, BitVector::len);
        if parsed.iter().any(|r| r.len() != cols) {
            return Err(Gf2Error::BadText("rows differ in length".into()));
        }
        Ok(Self::from_rows(parsed, cols))
    }

    /// Textual form: first line `rows cols`, then one '0'/'1' line per row.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.rows, self.cols);
        for r in &self.data {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }

    /// Parses the [`to_text`](Self::to_text) format.
    pub fn parse_text(text: &str) -> Result<Self, Gf2Error> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Gf2Error::BadText("empty input".into()))?;
        let mut parts = header.split_whitespace();
        let rows: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Gf2Error::BadText("bad header".into()))?;
        let cols: usize = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Gf2Error::BadText("bad header".into()))?;
        let mut data = Vec::with_capacity(rows);
        for _ in 0..rows {
            let line = lines
                .next()
                .ok_or_else(|| Gf2Error::BadText("missing rows".into()))?;
            let v = BitVector::parse(line.trim())?;
            if v.len() != cols {
                return Err(Gf2Error::BadText("row length differs from header".into()));
            }
            data.push(v);
        }
        Ok(Self::from_rows(data, cols))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.data.iter()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.data[i].ones() {
                t.data[j].set(i, true);
            }
        }
        t
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in self.data[i].ones() {
                out.data[i].xor_with(&other.data[k]);
            }
        }
        out
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len(), "vector length differs from columns");
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.data[i].dot(v) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn submatrix_rows(&self, indices: &[usize]) -> BitMatrix {
        let rows = indices.iter().map(|&i| self.data[i].clone()).collect();
        BitMatrix::from_rows(rows, self.cols)
    }

    /// Rank over GF(2). Does not modify the matrix.
    pub fn rank2(&self) -> usize {
        self.clone().rref().1.len()
    }

    /// In-place reduced row echelon form; returns the reduced matrix and the
    /// ordered pivot columns.
    pub fn rref(mut self) -> (BitMatrix, Vec<usize>) {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..self.cols {
            if next_row == self.rows {
                break;
            }
            let Some(p) = (next_row..self.rows).find(|&i| self.data[i].get(col)) else {
                continue;
            };
            self.data.swap(next_row, p);
            let pivot_row = self.data[next_row].clone();
            for (i, row) in self.data.iter_mut().enumerate() {
                if i != next_row && row.get(col) {
                    row.xor_with(&pivot_row);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        (self, pivots)
    }

    /// Inverse of a square matrix, if it exists.
    pub fn inverse(&self) -> Option<BitMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut work = self.clone();
        let mut inv = BitMatrix::identity(n);
        for col in 0..n {
            let p = (col..n).find(|&i| work.data[i].get(col))?;
            work.data.swap(col, p);
            inv.data.swap(col, p);
            let wrow = work.data[col].clone();
            let irow = inv.data[col].clone();
            for i in 0..n {
                if i != col && work.data[i].get(col) {
                    work.data[i].xor_with(&wrow);
                    inv.data[i].xor_with(&irow);
                }
            }
        }
        Some(inv)
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix({}x{})", self.rows, self.cols)
    }
}

/// A choice of independent rows together with the bookkeeping needed to
/// reconstruct the remaining ones.
///
/// `basis` stacks the independent rows in order; row `k` of `combos` gives the
/// combination of basis rows that reproduces dependent row `dependent[k]`
/// exactly. `pivots` are the pivot columns of the reduced echelon form of
/// `basis`; they index an invertible square submatrix.
#[derive(Clone, Debug)]
pub struct RowBasis {
    pub independent: Vec<usize>,
    pub dependent: Vec<usize>,
    pub basis: BitMatrix,
    pub combos: BitMatrix,
    pub pivots: Vec<usize>,
}

/// Selects a row basis of `a`.
///
/// The default policy scans rows first to last and keeps a row iff it is
/// independent of the rows kept so far. `forced` overrides the selection with
/// an explicit ordered list of row indices, which must be independent and span
/// the row space.
pub fn row_basis(a: &BitMatrix, forced: Option<&[usize]>) -> Result<RowBasis, Gf2Error> {
    let (independent, dependent) = match forced {
        Some(f) => {
            let mut seen = vec![false; a.rows()];
            for &i in f {
                if i >= a.rows() || seen[i] {
                    return Err(Gf2Error::ForcedRowsNotABasis);
                }
                seen[i] = true;
            }
            let sub = a.submatrix_rows(f);
            if sub.rank2() != f.len() || f.len() != a.rank2() {
                return Err(Gf2Error::ForcedRowsNotABasis);
            }
            let dependent = (0..a.rows()).filter(|i| !seen[*i]).collect();
            (f.to_vec(), dependent)
        }
        None => {
            let mut kept: Vec<BitVector> = Vec::new();
            let mut independent = Vec::new();
            let mut dependent = Vec::new();
            for i in 0..a.rows() {
                // Reduce a copy against the rows kept so far.
                let mut v = a.row(i).clone();
                for k in &kept {
                    let Some(p) = k.first_one() else { continue };
                    if v.get(p) {
                        v.xor_with(k);
                    }
                }
                if v.is_zero() {
                    dependent.push(i);
                } else {
                    // Keep the reduced form echelonized so `first_one` pivots
                    // stay distinct.
                    let p = v.first_one().unwrap();
                    for k in &mut kept {
                        if k.get(p) {
                            k.xor_with(&v);
                        }
                    }
                    kept.push(v);
                    independent.push(i);
                }
            }
            (independent, dependent)
        }
    };

    let basis = a.submatrix_rows(&independent);
    let rank = basis.rows();
    let basis_t = basis.transpose();
    let mut combos = BitMatrix::zeros(dependent.len(), rank);
    for (k, &d) in dependent.iter().enumerate() {
        let sol = solve2(&basis_t, a.row(d));
        let Some(x) = sol.particular else {
            return Err(Gf2Error::ForcedRowsNotABasis);
        };
        combos.data[k] = x;
    }
    let (_, pivots) = basis.clone().rref();
    Ok(RowBasis {
        independent,
        dependent,
        basis,
        combos,
        pivots,
    })
}

/// Left inverse of the transpose of a full-row-rank matrix: returns `Z` with
/// `Z * basisᵀ = I`.
///
/// The inverse is not unique when the matrix is wide; this routine pins the
/// choice by forcing every row of `Z` to vanish outside the pivot columns of
/// the reduced echelon form, which makes the result deterministic.
pub fn left_inverse(basis: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
    let r = basis.rows();
    let (_, pivots) = basis.clone().rref();
    if pivots.len() != r {
        return Err(Gf2Error::DependentRows);
    }
    // Square submatrix on the pivot columns, b[i][j] = basis[i][pivots[j]].
    let mut b = BitMatrix::zeros(r, r);
    for i in 0..r {
        for (j, &p) in pivots.iter().enumerate() {
            if basis.get(i, p) {
                b.set(i, j, true);
            }
        }
    }
    let w = b
        .transpose()
        .inverse()
        .ok_or(Gf2Error::DependentRows)?;
    let mut z = BitMatrix::zeros(r, basis.cols());
    for i in 0..r {
        for (j, &p) in pivots.iter().enumerate() {
            if w.get(i, j) {
                z.set(i, p, true);
            }
        }
    }
    debug_assert_eq!(z.mul(&basis.transpose()), BitMatrix::identity(r));
    Ok(z)
}

/// Canonical kernel basis of `a` given a row basis and its left inverse.
///
/// One row per non-pivot column `j`: the vector `basisᵀ·z_col(j) + ê_j`, which
/// the construction guarantees to be annihilated by `a` and to carry the only
/// one among non-pivot coordinates at position `j`, so the rows are
/// independent by inspection.
pub fn kernel_basis(
    a: &BitMatrix,
    basis: &RowBasis,
    left_inv: &BitMatrix,
) -> Result<BitMatrix, Gf2Error> {
    let r = basis.basis.rows();
    let n = basis.basis.cols();
    if left_inv.rows() != r || left_inv.cols() != n {
        return Err(Gf2Error::InconsistentInputs("left inverse has wrong shape"));
    }
    if left_inv.mul(&basis.basis.transpose()) != BitMatrix::identity(r) {
        return Err(Gf2Error::InconsistentInputs(
            "left inverse does not invert the basis",
        ));
    }
    let pivot_set: Vec<bool> = {
        let mut v = vec![false; n];
        for &p in &basis.pivots {
            v[p] = true;
        }
        v
    };
    let mut rows = Vec::with_capacity(n - r);
    for j in 0..n {
        if pivot_set[j] {
            continue;
        }
        let mut o = BitVector::zeros(n);
        o.set(j, true);
        for alpha in 0..r {
            if basis.basis.get(alpha, j) {
                o.xor_with(left_inv.row(alpha));
            }
        }
        if !a.mul_vec(&o).is_zero() {
            return Err(Gf2Error::InconsistentInputs(
                "kernel candidate not annihilated; basis does not span the row space",
            ));
        }
        rows.push(o);
    }
    Ok(BitMatrix::from_rows(rows, n))
}

/// Outcome of solving `a·x = y` over GF(2).
///
/// The solution set, when non-empty, is `particular ⊕ span(kernel)`.
/// Inconsistency is a value, not an error.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub satisfiable: bool,
    pub particular: Option<BitVector>,
    pub kernel: BitMatrix,
}

/// Gaussian elimination on the augmented system; free variables are set to
/// zero in the particular solution.
pub fn solve2(a: &BitMatrix, y: &BitVector) -> SolveResult {
    assert_eq!(y.len(), a.rows(), "right-hand side length differs from rows");
    let n = a.cols();
    let mut m = a.clone();
    let mut rhs = y.clone();
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut next_row = 0;
    for col in 0..n {
        if next_row == m.rows() {
            break;
        }
        let Some(p) = (next_row..m.rows()).find(|&i| m.data[i].get(col)) else {
            continue;
        };
        m.data.swap(next_row, p);
        if next_row != p {
            let (a, b) = (rhs.get(next_row), rhs.get(p));
            rhs.set(next_row, b);
            rhs.set(p, a);
        }
        let pivot_row = m.data[next_row].clone();
        let pivot_rhs = rhs.get(next_row);
        for i in 0..m.rows() {
            if i != next_row && m.data[i].get(col) {
                m.data[i].xor_with(&pivot_row);
                if pivot_rhs {
                    let v = rhs.get(i);
                    rhs.set(i, !v);
                }
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
    }
    let satisfiable = (next_row..m.rows()).all(|i| !rhs.get(i));
    let particular = satisfiable.then(|| {
        let mut x = BitVector::zeros(n);
        for &(row, col) in &pivots {
            if rhs.get(row) {
                x.set(col, true);
            }
        }
        x
    });
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut is_pivot = vec![false; n];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    let mut kernel_rows = Vec::with_capacity(n - pivot_cols.len());
    for f in 0..n {
        if is_pivot[f] {
            continue;
        }
        let mut v = BitVector::zeros(n);
        v.set(f, true);
        for &(row, col) in &pivots {
            if m.data[row].get(f) {
                v.set(col, true);
            }
        }
        kernel_rows.push(v);
    }
    SolveResult {
        satisfiable,
        particular,
        kernel: BitMatrix::from_rows(kernel_rows, n),
    }
}
