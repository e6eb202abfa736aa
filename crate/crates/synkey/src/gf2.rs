//! Exact arithmetic over GF(2): bit words, dense binary matrices,
//! syndrome products, and reduction to systematic form.
//!
//! Bit order convention: index 0 is the leftmost / first transmitted bit.
//! All serialization and all lexicographic comparisons follow this order.

use std::cmp::Ordering;
use std::fmt;
use std::ops::BitXor;

use crate::error::{Error, Result};

/// A fixed-length word of binary symbols, packed 64 bits per limb.
///
/// Bit `i` lives at `limbs[i / 64] >> (i % 64)`. Unused bits of the last
/// limb are kept at zero so that equality and hashing work limb-wise.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    len: usize,
    limbs: Vec<u64>,
}

impl BitWord {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            limbs: vec![0; len.div_ceil(64)],
        }
    }

    /// Builds a word from symbols given in transmission order.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut w = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                w.set(i, true);
            }
        }
        w
    }

    /// Parses a `0`/`1` string, index 0 first.
    pub fn parse(s: &str) -> Result<Self> {
        let mut w = Self::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => w.set(i, true),
                _ => return Err(Error::Parse(format!("invalid bit character {c:?}"))),
            }
        }
        Ok(w)
    }

    /// The weight-1 word with a one at position `j`.
    pub fn unit(len: usize, j: usize) -> Self {
        let mut w = Self::zeros(len);
        w.set(j, true);
        w
    }

    /// Decodes a word of length `len <= 64` from an integer where bit `i`
    /// of the word is bit `i` of `v`.
    pub fn from_lsb_u64(v: u64, len: usize) -> Self {
        assert!(len <= 64);
        assert!(len == 64 || v < (1u64 << len));
        Self {
            len,
            limbs: if len == 0 { vec![] } else { vec![v] },
        }
    }

    /// Encodes a word of length `<= 64` as an integer, bit `i` of the word
    /// at bit `i`. This is the canonical index encoding for syndromes and
    /// within-coset keys.
    pub fn to_lsb_u64(&self) -> u64 {
        assert!(self.len <= 64, "word too long for integer encoding");
        self.limbs.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.limbs[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.limbs[i >> 6] |= mask;
        } else {
            self.limbs[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.limbs[i >> 6] ^= 1u64 << (i & 63);
    }

    /// Hamming weight.
    pub fn weight(&self) -> u32 {
        self.limbs.iter().map(|l| l.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// In-place modulo-2 addition.
    ///
    /// # Panics
    ///
    /// Panics if the lengths differ.
    pub fn xor_in_place(&mut self, other: &BitWord) {
        assert_eq!(self.len, other.len, "xor of words with different lengths");
        for (a, b) in self.limbs.iter_mut().zip(other.limbs.iter()) {
            *a ^= *b;
        }
    }

    /// Parity of the AND with `other` (the GF(2) inner product).
    pub fn dot(&self, other: &BitWord) -> bool {
        assert_eq!(self.len, other.len, "dot of words with different lengths");
        self.limbs
            .iter()
            .zip(other.limbs.iter())
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    /// Positions of the ones, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// The sub-word made of `positions`, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitWord {
        let mut w = BitWord::zeros(positions.len());
        for (out, &i) in positions.iter().enumerate() {
            if self.get(i) {
                w.set(out, true);
            }
        }
        w
    }

    /// Hex encoding of the bits in transmission order, four bits per
    /// digit, first bit in the high position of the first digit.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0u8;
            for k in 0..4 {
                let i = chunk * 4 + k;
                if i < self.len && self.get(i) {
                    nibble |= 8 >> k;
                }
            }
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }
}

impl BitXor for &BitWord {
    type Output = BitWord;

    fn bitxor(self, rhs: &BitWord) -> BitWord {
        let mut out = self.clone();
        out.xor_in_place(rhs);
        out
    }
}

/// Lexicographic order on the symbol sequence: the first differing
/// position decides, with 0 < 1.
impl Ord for BitWord {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.len, other.len, "comparing words of different lengths");
        for (a, b) in self.limbs.iter().zip(other.limbs.iter()) {
            let d = a ^ b;
            if d != 0 {
                let i = d.trailing_zeros();
                return if (a >> i) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BitWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({self})")
    }
}

/// A dense binary matrix stored as one `BitWord` per row.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    data: Vec<BitWord>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitWord::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitWord>) -> Self {
        let cols = rows.first().map_or(0, BitWord::len);
        assert!(rows.iter().all(|r| r.len() == cols));
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Parses rows of `0`/`1` strings.
    pub fn parse_rows(lines: &[&str]) -> Result<Self> {
        let rows = lines
            .iter()
            .map(|l| BitWord::parse(l))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if rows.iter().any(|r| r.len() != first.len()) {
                return Err(Error::Parse("ragged matrix rows".into()));
            }
        }
        Ok(Self::from_rows(rows))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitWord {
        &self.data[r]
    }

    pub fn xor_row(&mut self, target: usize, source: usize) {
        assert_ne!(target, source);
        let (a, b) = if target < source {
            let (lo, hi) = self.data.split_at_mut(source);
            (&mut lo[target], &hi[0])
        } else {
            let (lo, hi) = self.data.split_at_mut(target);
            (&mut hi[0], &lo[source])
        };
        a.xor_in_place(b);
    }

    /// Column `c` as a word of length `rows`.
    pub fn column(&self, c: usize) -> BitWord {
        let mut w = BitWord::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                w.set(r, true);
            }
        }
        w
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut t = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    /// `[self | other]` side by side.
    pub fn hconcat(&self, other: &Gf2Matrix) -> Gf2Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Gf2Matrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.data[r].ones() {
                m.set(r, c, true);
            }
            for c in other.data[r].ones() {
                m.set(r, self.cols + c, true);
            }
        }
        m
    }

    /// Matrix-vector product over GF(2): `result[r]` is the parity of the
    /// entries of `x` selected by row `r`.
    ///
    /// # Panics
    ///
    /// Panics if `x.len() != self.cols()`.
    pub fn mul_vec(&self, x: &BitWord) -> BitWord {
        assert_eq!(
            x.len(),
            self.cols,
            "matrix-vector product dimension mismatch"
        );
        let mut out = BitWord::zeros(self.rows);
        for r in 0..self.rows {
            if self.data[r].dot(x) {
                out.set(r, true);
            }
        }
        out
    }

    /// Row echelon reduction in place; returns the pivot columns in the
    /// order their rows ended up (scanning columns left to right).
    fn reduce(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut next_row = 0;
        for col in 0..self.cols {
            if next_row == self.rows {
                break;
            }
            let Some(pr) = (next_row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.data.swap(next_row, pr);
            for r in 0..self.rows {
                if r != next_row && self.get(r, col) {
                    self.xor_row(r, next_row);
                }
            }
            pivots.push(col);
            next_row += 1;
        }
        pivots
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Gf2Matrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.reduce();
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Whether `x` lies in the row space of `self`.
    pub fn row_space_contains(&self, x: &BitWord) -> bool {
        assert_eq!(x.len(), self.cols);
        let (rref, pivots) = self.rref();
        let mut rem = x.clone();
        for (row, &col) in pivots.iter().enumerate() {
            if rem.get(col) {
                rem.xor_in_place(rref.row(row));
            }
        }
        rem.is_zero()
    }

    /// Reduces a full-row-rank matrix to the systematic form `[A^t | I]`
    /// together with the column permutation that produced it.
    ///
    /// Pivots are chosen scanning columns right to left, so a matrix whose
    /// trailing block is already invertible (in particular one already of
    /// the form `[A^t | I]`) comes back unchanged with the identity
    /// permutation.
    pub fn to_systematic(&self) -> Result<(Gf2Matrix, ColPerm)> {
        let mut r = self.clone();
        let (rows, cols) = (self.rows, self.cols);
        if rows > cols {
            return Err(Error::Rank(format!(
                "{rows}x{cols} matrix cannot have full row rank"
            )));
        }
        let mut used = vec![false; rows];
        // (column, row) pairs, columns strictly decreasing.
        let mut pivots: Vec<(usize, usize)> = Vec::with_capacity(rows);
        for col in (0..cols).rev() {
            if pivots.len() == rows {
                break;
            }
            let Some(pr) = (0..rows).find(|&i| !used[i] && r.get(i, col)) else {
                continue;
            };
            used[pr] = true;
            for i in 0..rows {
                if i != pr && r.get(i, col) {
                    r.xor_row(i, pr);
                }
            }
            pivots.push((col, pr));
        }
        if pivots.len() < rows {
            return Err(Error::Rank(format!(
                "rank {} < {} rows; drop dependent rows and retry",
                pivots.len(),
                rows
            )));
        }
        let mut is_pivot = vec![false; cols];
        for &(c, _) in &pivots {
            is_pivot[c] = true;
        }
        let mut forward: Vec<usize> = (0..cols).filter(|&c| !is_pivot[c]).collect();
        forward.extend(pivots.iter().rev().map(|&(c, _)| c));
        let perm = ColPerm { forward };
        // Row order: ascending pivot column, so the identity block comes
        // out with ones on its diagonal.
        let mut out = Gf2Matrix::zeros(rows, cols);
        for (new_r, &(_, old_r)) in pivots.iter().rev().enumerate() {
            for new_c in 0..cols {
                if r.get(old_r, perm.forward[new_c]) {
                    out.set(new_r, new_c, true);
                }
            }
        }
        Ok((out, perm))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// A recorded column permutation: `forward[new] = old`, i.e. column `new`
/// of the permuted matrix is column `forward[new]` of the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColPerm {
    forward: Vec<usize>,
}

impl ColPerm {
    pub fn identity(n: usize) -> Self {
        Self {
            forward: (0..n).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Original column index sitting at permuted position `new`.
    pub fn old_index(&self, new: usize) -> usize {
        self.forward[new]
    }

    /// Reorders word positions from original to permuted layout.
    pub fn apply(&self, x: &BitWord) -> BitWord {
        assert_eq!(x.len(), self.forward.len());
        let mut out = BitWord::zeros(x.len());
        for (new, &old) in self.forward.iter().enumerate() {
            if x.get(old) {
                out.set(new, true);
            }
        }
        out
    }

    /// Reorders word positions from permuted back to original layout.
    pub fn apply_inverse(&self, y: &BitWord) -> BitWord {
        assert_eq!(y.len(), self.forward.len());
        let mut out = BitWord::zeros(y.len());
        for (new, &old) in self.forward.iter().enumerate() {
            if y.get(new) {
                out.set(old, true);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> BitWord {
        BitWord::parse(s).unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(&w("101") ^ &w("011"), w("110"));
        let x = w("10110");
        assert!((&x ^ &x).is_zero());
        assert_eq!(&x ^ &BitWord::zeros(5), x);
    }

    #[test]
    fn mul_vec_zero_and_units() {
        let m = Gf2Matrix::parse_rows(&["110", "011"]).unwrap();
        assert!(m.mul_vec(&BitWord::zeros(3)).is_zero());
        for j in 0..3 {
            assert_eq!(m.mul_vec(&BitWord::unit(3, j)), m.column(j));
        }
    }

    #[test]
    fn lexicographic_order() {
        assert!(w("0011") < w("0101"));
        assert!(w("0101") < w("0110"));
        assert!(w("0111") < w("1000"));
        assert!(w("0001") < w("1000"));
        let mut v = vec![w("1100"), w("0011"), w("0101")];
        v.sort();
        assert_eq!(v, vec![w("0011"), w("0101"), w("1100")]);
    }

    #[test]
    fn hex_dump() {
        assert_eq!(w("1000").to_hex(), "8");
        assert_eq!(w("10110110").to_hex(), "b6");
        assert_eq!(w("101").to_hex(), "a");
    }

    #[test]
    fn systematic_fixed_point() {
        // Already of the form [A^t | I_2].
        let m = Gf2Matrix::parse_rows(&["0110", "1101"]).unwrap();
        let (r, perm) = m.to_systematic().unwrap();
        assert_eq!(r, m);
        assert!(perm.is_identity());
    }

    #[test]
    fn systematic_small_example() {
        let m = Gf2Matrix::parse_rows(&["110", "011"]).unwrap();
        let (r, perm) = m.to_systematic().unwrap();
        // Hand elimination with right-to-left pivots: pivot on column 2
        // (row 1), then column 1 (row 0), giving rows 110 and 101 with no
        // column swap needed.
        assert!(perm.is_identity());
        assert_eq!(r, Gf2Matrix::parse_rows(&["110", "101"]).unwrap());
        // Identity block in the trailing columns.
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(r.get(i, 1 + j), i == j);
            }
        }
    }

    #[test]
    fn systematic_rank_error() {
        let m = Gf2Matrix::parse_rows(&["110", "110"]).unwrap();
        assert!(matches!(m.to_systematic(), Err(Error::Rank(_))));
    }

    #[test]
    fn systematic_needs_permutation() {
        // Trailing 2x2 block is singular; a pivot must move.
        let m = Gf2Matrix::parse_rows(&["1010", "0110"]).unwrap();
        let (r, perm) = m.to_systematic().unwrap();
        assert!(!perm.is_identity());
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(r.get(i, 2 + j), i == j);
            }
        }
        // Row space is preserved: permute the reduced rows back and check
        // mutual membership.
        for i in 0..2 {
            let back = perm.apply_inverse(r.row(i));
            assert!(m.row_space_contains(&back));
        }
        for i in 0..2 {
            let fwd = perm.apply(m.row(i));
            assert!(r.row_space_contains(&fwd));
        }
    }

    #[test]
    fn select_and_ones() {
        let x = w("10110");
        assert_eq!(x.ones().collect::<Vec<_>>(), vec![0, 2, 3]);
        assert_eq!(x.select(&[0, 4, 2]), w("101"));
    }
}
