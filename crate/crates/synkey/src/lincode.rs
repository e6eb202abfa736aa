//! Systematic binary linear codes, coset-leader tables, maximum-likelihood
//! syndrome decoding, and exact error-probability computation.
//!
//! A code is held in systematic form: generator `G = [I_{n-m} | A]` and
//! parity check `P = [A^t | I_m]`. The standard array is never
//! materialized; the coset-leader table (2^m entries) plus the systematic
//! index rule (the first `n-m` bits of a word index it within its coset)
//! give equivalent indexing in 2^m memory.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::gf2::{BitWord, Gf2Matrix};

/// Default cap on the syndrome length for coset-table construction.
pub const DEFAULT_TABLE_BUDGET: u32 = 24;

/// A systematic binary `(n, n-m)` code.
#[derive(Clone, Debug)]
pub struct LinearCode {
    n: usize,
    m: usize,
    profile: Gf2Matrix,   // A, (n-m) x m
    generator: Gf2Matrix, // [I | A]
    parity: Gf2Matrix,    // [A^t | I]
}

impl LinearCode {
    /// Builds the code with generator `[I | A]` and parity check
    /// `[A^t | I]` from the profile matrix `A`. Any nonempty `A` is valid.
    pub fn from_profile(a: Gf2Matrix) -> Self {
        let (k, m) = (a.rows(), a.cols());
        assert!(k >= 1 && m >= 1, "profile must have at least 1 row and column");
        let generator = Gf2Matrix::identity(k).hconcat(&a);
        let parity = a.transpose().hconcat(&Gf2Matrix::identity(m));
        Self {
            n: k + m,
            m,
            profile: a,
            generator,
            parity,
        }
    }

    /// The (7,4) Hamming code in systematic form.
    pub fn hamming74() -> Self {
        let a = Gf2Matrix::parse_rows(&["011", "101", "110", "111"]).unwrap();
        Self::from_profile(a)
    }

    /// The length-`n` repetition code `{0^n, 1^n}`.
    pub fn repetition(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "repetition code needs n >= 2, got {n}"
            )));
        }
        let mut a = Gf2Matrix::zeros(1, n - 1);
        for c in 0..n - 1 {
            a.set(0, c, true);
        }
        Ok(Self::from_profile(a))
    }

    /// Samples the `(n, n-m)` ensemble: `A` uniform over `(n-m) x m`
    /// binary matrices, deterministically from `seed`.
    pub fn sample_random(n: usize, m: usize, seed: u64) -> Result<Self> {
        if m < 1 || m >= n {
            return Err(Error::Parameter(format!(
                "random code needs 1 <= m < n, got n={n} m={m}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = n - m;
        let mut a = Gf2Matrix::zeros(k, m);
        for r in 0..k {
            for c in 0..m {
                a.set(r, c, rng.gen::<bool>());
            }
        }
        Ok(Self::from_profile(a))
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Syndrome length.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension `n - m`.
    #[inline]
    pub fn k(&self) -> usize {
        self.n - self.m
    }

    pub fn generator(&self) -> &Gf2Matrix {
        &self.generator
    }

    pub fn parity(&self) -> &Gf2Matrix {
        &self.parity
    }

    pub fn profile(&self) -> &Gf2Matrix {
        &self.profile
    }

    /// `P x^t`.
    pub fn syndrome(&self, x: &BitWord) -> BitWord {
        self.parity.mul_vec(x)
    }

    /// Splits a word into its public coset id (the syndrome) and its
    /// within-coset index (the first `n-m` bits, which are pairwise
    /// distinct inside a coset of a systematic code). The pair is a
    /// bijection with `{0,1}^n`.
    pub fn coset_index(&self, x: &BitWord) -> Result<CosetIndex> {
        if x.len() != self.n {
            return Err(Error::Dimension(format!(
                "word length {} != n = {}",
                x.len(),
                self.n
            )));
        }
        if self.m > 63 || self.k() > 63 {
            return Err(Error::Capacity(
                "integer coset indexing needs m <= 63 and n-m <= 63".into(),
            ));
        }
        let mut index = 0u64;
        for i in 0..self.k() {
            if x.get(i) {
                index |= 1 << i;
            }
        }
        Ok(CosetIndex {
            coset: self.syndrome(x).to_lsb_u64(),
            index,
        })
    }

    /// Inverse of [`coset_index`](Self::coset_index): the unique word with
    /// the given within-coset index and syndrome.
    pub fn word_from_index(&self, coset: u64, index: u64) -> BitWord {
        // u G  ^  [0_{n-m} | s]: the second term is the coset member whose
        // information bits are all zero.
        let mut x = BitWord::zeros(self.n);
        for r in 0..self.k() {
            if (index >> r) & 1 == 1 {
                x.xor_in_place(self.generator.row(r));
            }
        }
        for i in 0..self.m {
            if (coset >> i) & 1 == 1 {
                x.flip(self.k() + i);
            }
        }
        x
    }

    /// All `2^{n-m}` codewords (test-scale only).
    pub fn codewords(&self) -> impl Iterator<Item = BitWord> + '_ {
        assert!(self.k() <= 24, "codeword enumeration is for small codes");
        (0u64..1 << self.k()).map(|u| self.word_from_index(0, u))
    }

    /// Plain text export: first line `n m`, then the rows of `A` as 0/1
    /// strings.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m);
        for r in 0..self.k() {
            s.push_str(&self.profile.row(r).to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty code file".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad code header".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse("bad code header".into()))?;
        if m < 1 || m >= n {
            return Err(Error::Parse(format!("code header needs 1 <= m < n, got {n} {m}")));
        }
        let rows: Vec<&str> = lines.map(str::trim).collect();
        if rows.len() != n - m {
            return Err(Error::Parse(format!(
                "expected {} profile rows, found {}",
                n - m,
                rows.len()
            )));
        }
        let a = Gf2Matrix::parse_rows(&rows)?;
        if a.cols() != m {
            return Err(Error::Parse(format!(
                "profile rows have {} columns, expected {m}",
                a.cols()
            )));
        }
        Ok(Self::from_profile(a))
    }
}

/// Public/secret split of a word: coset id `P x^t` and within-coset index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CosetIndex {
    pub coset: u64,
    pub index: u64,
}

/// Coset-leader table: for each of the `2^m` syndromes, the
/// lexicographically smallest minimum-weight member of the coset.
#[derive(Clone)]
pub struct CosetTable {
    n: usize,
    m: usize,
    leaders: Vec<u64>, // lsb encodings, indexed by syndrome lsb value
    weight_hist: Vec<u64>,
}

impl CosetTable {
    /// Builds the table under the default memory budget.
    pub fn build(code: &LinearCode) -> Result<Self> {
        Self::build_with_budget(code, DEFAULT_TABLE_BUDGET)
    }

    /// Builds the table, refusing syndromes longer than `max_m` bits.
    ///
    /// Enumerates words by increasing weight, within a weight in
    /// lexicographic order, so the first word reaching a syndrome is its
    /// leader under the deterministic tie-break.
    pub fn build_with_budget(code: &LinearCode, max_m: u32) -> Result<Self> {
        let (n, m) = (code.n(), code.m());
        if m as u32 > max_m {
            return Err(Error::Capacity(format!(
                "coset table needs 2^{m} entries, budget is 2^{max_m}"
            )));
        }
        if n > 63 {
            return Err(Error::Capacity(format!(
                "coset table construction supports n <= 63, got {n}"
            )));
        }
        // Syndrome of each unit word, as an integer.
        let unit_synd: Vec<u64> = (0..n)
            .map(|j| code.parity().column(j).to_lsb_u64())
            .collect();
        let size = 1usize << m;
        let mut leaders = vec![u64::MAX; size];
        let mut weight_hist = vec![0u64; n + 1];
        let mut filled = 0usize;
        'outer: for w in 0..=n as u32 {
            // Enumerate weight-w words in lexicographic order. A word
            // compares lexicographically like its big-endian encoding
            // (bit i of the word at bit n-1-i), so Gosper's hack over that
            // encoding visits each weight class in lex order.
            let mut v: u64 = if w == 0 { 0 } else { (1u64 << w) - 1 };
            loop {
                let mut s = 0u64;
                let mut bits = v;
                while bits != 0 {
                    let b = bits.trailing_zeros() as usize;
                    s ^= unit_synd[n - 1 - b];
                    bits &= bits - 1;
                }
                if leaders[s as usize] == u64::MAX {
                    // Convert big-endian enumeration value to lsb encoding.
                    let mut lsb = 0u64;
                    let mut bits = v;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        lsb |= 1 << (n - 1 - b);
                        bits &= bits - 1;
                    }
                    leaders[s as usize] = lsb;
                    weight_hist[w as usize] += 1;
                    filled += 1;
                    if filled == size {
                        break 'outer;
                    }
                }
                if w == 0 {
                    break;
                }
                // Gosper's hack: next integer with the same popcount.
                let c = v & v.wrapping_neg();
                let r = v + c;
                v = (((r ^ v) >> 2) / c) | r;
                if v >= 1u64 << n {
                    break;
                }
            }
        }
        debug_assert_eq!(filled, size, "parity check must have full row rank");
        Ok(Self {
            n,
            m,
            leaders,
            weight_hist,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Leader counts per Hamming weight.
    pub fn weight_hist(&self) -> &[u64] {
        &self.weight_hist
    }

    /// The coset leader for syndrome `s`.
    pub fn leader(&self, s: &BitWord) -> BitWord {
        assert_eq!(s.len(), self.m, "syndrome length mismatch");
        BitWord::from_lsb_u64(self.leaders[s.to_lsb_u64() as usize], self.n)
    }

    /// Integer-encoded leader lookup (bit `i` of the word at bit `i`),
    /// for enumeration-heavy callers.
    pub fn leader_lsb(&self, syndrome: u64) -> u64 {
        self.leaders[syndrome as usize]
    }

    /// Maximum-likelihood noise estimate `f_P(s)`: the most likely word
    /// with syndrome `s` under i.i.d. Bernoulli(`p`) noise, which for
    /// `p < 1/2` is the coset leader.
    pub fn ml_decode_noise(&self, s: &BitWord, p: f64) -> Result<BitWord> {
        if !(0.0 < p && p < 0.5) {
            return Err(Error::Domain(format!(
                "crossover probability must lie in (0, 1/2), got {p}"
            )));
        }
        if s.len() != self.m {
            return Err(Error::Dimension(format!(
                "syndrome length {} != m = {}",
                s.len(),
                self.m
            )));
        }
        Ok(self.leader(s))
    }

    /// Reconstruction of the far terminal's word from own observation
    /// `x2` and the communicated syndrome `s1`:
    /// `x2 ^ f_P(s1 ^ P x2^t)`. The result lies in the coset with
    /// syndrome `s1`.
    pub fn sw_reconstruct(
        &self,
        code: &LinearCode,
        x2: &BitWord,
        s1: &BitWord,
        p: f64,
    ) -> Result<BitWord> {
        if x2.len() != self.n {
            return Err(Error::Dimension(format!(
                "word length {} != n = {}",
                x2.len(),
                self.n
            )));
        }
        if s1.len() != self.m {
            return Err(Error::Dimension(format!(
                "syndrome length {} != m = {}",
                s1.len(),
                self.m
            )));
        }
        let delta = s1 ^ &code.syndrome(x2);
        let mut est = self.ml_decode_noise(&delta, p)?;
        est.xor_in_place(x2);
        Ok(est)
    }

    /// Exact average error probability of maximum-likelihood decoding on
    /// a BSC(`p`): the total probability of all non-leader words,
    /// computed from the leader weight enumerator.
    pub fn ml_error_prob_exact(&self, p: f64) -> Dyadic {
        assert!((0.0..=0.5).contains(&p));
        let pd = Dyadic::from_f64(p);
        let qd = Dyadic::one().sub(&pd);
        let mut covered = Dyadic::zero();
        for (w, &count) in self.weight_hist.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let term = pd
                .pow(w as u32)
                .mul(&qd.pow((self.n - w) as u32))
                .mul_u64(count);
            covered = covered.add(&term);
        }
        Dyadic::one().sub(&covered)
    }

    /// Error probability with the arithmetic mode used to obtain it.
    pub fn ml_error_prob(&self, p: f64) -> Result<(f64, ArithMode)> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::Domain(format!(
                "crossover probability must lie in [0, 1/2], got {p}"
            )));
        }
        Ok((self.ml_error_prob_exact(p).to_f64(), ArithMode::Rational))
    }
}

/// How a reported probability was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithMode {
    /// Exact rational arithmetic (power-of-two denominators).
    Rational,
    /// Double precision floating point.
    Float,
}

impl ArithMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ArithMode::Rational => "rational",
            ArithMode::Float => "float",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn w(s: &str) -> BitWord {
        BitWord::parse(s).unwrap()
    }

    #[test]
    fn construction_identity() {
        let code = LinearCode::hamming74();
        assert_eq!((code.n(), code.m(), code.k()), (7, 3, 4));
        for r in 0..code.k() {
            assert!(code.syndrome(code.generator().row(r)).is_zero());
        }
        let rep = LinearCode::repetition(2).unwrap();
        let words: Vec<_> = rep.codewords().collect();
        assert_eq!(words, vec![w("00"), w("11")]);
    }

    #[test]
    fn hamming_codewords_and_distance() {
        // Exhaustive oracle: enumerate all 16 codewords, check count and
        // minimum distance 3.
        let code = LinearCode::hamming74();
        let words: Vec<_> = code.codewords().collect();
        assert_eq!(words.len(), 16);
        let min_weight = words
            .iter()
            .filter(|c| !c.is_zero())
            .map(BitWord::weight)
            .min()
            .unwrap();
        assert_eq!(min_weight, 3);
        for c in &words {
            assert!(code.syndrome(c).is_zero());
        }
    }

    fn brute_force_leaders(code: &LinearCode) -> HashMap<u64, BitWord> {
        // Independent oracle: group all 2^n words by syndrome, take the
        // lexicographically smallest among the minimum-weight members.
        let n = code.n();
        let mut best: HashMap<u64, BitWord> = HashMap::new();
        for v in 0u64..1 << n {
            let x = BitWord::from_lsb_u64(v, n);
            let s = code.syndrome(&x).to_lsb_u64();
            match best.get(&s) {
                Some(b) if (b.weight(), b) <= (x.weight(), &x) => {}
                _ => {
                    best.insert(s, x);
                }
            }
        }
        best
    }

    #[test]
    fn hamming_coset_leaders() {
        let code = LinearCode::hamming74();
        let table = CosetTable::build(&code).unwrap();
        let oracle = brute_force_leaders(&code);
        assert_eq!(oracle.len(), 8);
        for (s, leader) in &oracle {
            assert!(leader.weight() <= 1);
            assert_eq!(&table.leader(&BitWord::from_lsb_u64(*s, 3)), leader);
        }
        assert_eq!(table.weight_hist()[0], 1);
        assert_eq!(table.weight_hist()[1], 7);
    }

    #[test]
    fn even_weight_code_leaders() {
        // m = 1, parity check is the all-ones row; the nonzero coset's
        // minimum-weight members are all weight-1 words, and the
        // lexicographically smallest is 0...01.
        let code = LinearCode::from_profile(Gf2Matrix::parse_rows(&["1", "1", "1"]).unwrap());
        assert_eq!((code.n(), code.m()), (4, 1));
        let table = CosetTable::build(&code).unwrap();
        assert_eq!(table.leader(&w("0")), w("0000"));
        assert_eq!(table.leader(&w("1")), w("0001"));
        let oracle = brute_force_leaders(&code);
        assert_eq!(oracle[&1], w("0001"));
    }

    #[test]
    fn repetition4_tie_break() {
        // Code {0000, 1111}: the coset of 1100 is {1100, 0011}, both
        // weight 2; the leader is the lexicographically smaller 0011.
        let code = LinearCode::repetition(4).unwrap();
        let table = CosetTable::build(&code).unwrap();
        let s = code.syndrome(&w("1100"));
        assert_eq!(table.leader(&s), w("0011"));
        assert_eq!(table.ml_decode_noise(&s, 0.1).unwrap(), w("0011"));
        let oracle = brute_force_leaders(&code);
        assert_eq!(oracle[&s.to_lsb_u64()], w("0011"));
    }

    #[test]
    fn ml_decode_examples() {
        let code = LinearCode::hamming74();
        let table = CosetTable::build(&code).unwrap();
        assert!(table
            .ml_decode_noise(&BitWord::zeros(3), 0.01)
            .unwrap()
            .is_zero());
        for j in 0..7 {
            let s = code.parity().column(j);
            assert_eq!(table.ml_decode_noise(&s, 0.01).unwrap(), BitWord::unit(7, j));
        }
        assert!(table.ml_decode_noise(&BitWord::zeros(3), 0.0).is_err());
        assert!(table.ml_decode_noise(&BitWord::zeros(3), 0.5).is_err());
    }

    #[test]
    fn sw_reconstruct_examples() {
        let code = LinearCode::hamming74();
        let table = CosetTable::build(&code).unwrap();
        let x1 = w("1011001");
        // Zero noise.
        let s1 = code.syndrome(&x1);
        assert_eq!(table.sw_reconstruct(&code, &x1, &s1, 0.01).unwrap(), x1);
        // Single error is corrected.
        let x2 = &x1 ^ &BitWord::unit(7, 3);
        assert_eq!(table.sw_reconstruct(&code, &x2, &s1, 0.01).unwrap(), x1);
        // Double error: wrong word, same coset.
        let x2 = &(&x1 ^ &BitWord::unit(7, 1)) ^ &BitWord::unit(7, 2);
        let rec = table.sw_reconstruct(&code, &x2, &s1, 0.01).unwrap();
        assert_ne!(rec, x1);
        assert_eq!(code.syndrome(&rec), s1);
    }

    #[test]
    fn coset_index_bijection() {
        let code = LinearCode::hamming74();
        let mut seen = std::collections::HashSet::new();
        for v in 0u64..128 {
            let x = BitWord::from_lsb_u64(v, 7);
            let ci = code.coset_index(&x).unwrap();
            assert!(seen.insert((ci.coset, ci.index)));
            assert_eq!(code.word_from_index(ci.coset, ci.index), x);
        }
        assert_eq!(
            code.coset_index(&BitWord::zeros(7)).unwrap(),
            CosetIndex { coset: 0, index: 0 }
        );
    }

    #[test]
    fn exact_error_probability() {
        // (3,1) repetition at p = 0.1: leaders are the zero word and the
        // three weight-1 words, so the error probability is 3p^2 - 2p^3.
        let rep3 = LinearCode::repetition(3).unwrap();
        let t = CosetTable::build(&rep3).unwrap();
        let p = 0.1;
        let (val, mode) = t.ml_error_prob(p).unwrap();
        assert_eq!(mode, ArithMode::Rational);
        assert!((val - (3.0 * p * p - 2.0 * p * p * p)).abs() < 1e-15);
        let pd = Dyadic::from_f64(p);
        let closed = pd
            .pow(2)
            .mul_u64(3)
            .sub(&pd.pow(3).mul_u64(2));
        assert_eq!(t.ml_error_prob_exact(p), closed);

        // (7,4) Hamming at p = 0.01: 1 - (1-p)^7 - 7 p (1-p)^6.
        let code = LinearCode::hamming74();
        let t = CosetTable::build(&code).unwrap();
        let p = 0.01f64;
        let q = 1.0 - p;
        let closed_f = 1.0 - q.powi(7) - 7.0 * p * q.powi(6);
        assert!((t.ml_error_prob(p).unwrap().0 - closed_f).abs() < 1e-15);
        assert!((closed_f - 0.002031).abs() < 5e-7);

        // Noiseless channel.
        assert_eq!(t.ml_error_prob(0.0).unwrap().0, 0.0);
    }

    #[test]
    fn random_ensemble() {
        let a = LinearCode::sample_random(8, 4, 1).unwrap();
        let b = LinearCode::sample_random(8, 4, 1).unwrap();
        assert_eq!(a.profile(), b.profile());
        let c = LinearCode::sample_random(8, 4, 2).unwrap();
        assert_ne!(a.profile(), c.profile());
        assert!(LinearCode::sample_random(8, 8, 0).is_err());

        // min over the ensemble <= ensemble mean.
        let probs: Vec<f64> = (0..100)
            .map(|seed| {
                let code = LinearCode::sample_random(10, 4, seed).unwrap();
                CosetTable::build(&code).unwrap().ml_error_prob(0.05).unwrap().0
            })
            .collect();
        let min = probs.iter().cloned().fold(f64::INFINITY, f64::min);
        let mean = probs.iter().sum::<f64>() / probs.len() as f64;
        assert!(min <= mean);
    }

    #[test]
    fn ensemble_error_improves_with_length() {
        // Fixed rate 1/2, exact error probabilities over a 200-seed
        // ensemble. The ensemble mean decreases with n (the averaging
        // argument behind the existence of good codes), and the
        // best-of-ensemble decreases on a grid wide enough that the
        // small-n optimum is outgrown.
        let stats = |n: usize, m: usize, p: f64| -> (f64, f64) {
            let probs: Vec<f64> = (0..200)
                .map(|seed| {
                    let code = LinearCode::sample_random(n, m, seed).unwrap();
                    CosetTable::build(&code).unwrap().ml_error_prob(p).unwrap().0
                })
                .collect();
            let min = probs.iter().cloned().fold(f64::INFINITY, f64::min);
            let mean = probs.iter().sum::<f64>() / probs.len() as f64;
            (min, mean)
        };
        let m8 = stats(8, 4, 0.05).1;
        let m12 = stats(12, 6, 0.05).1;
        let m16 = stats(16, 8, 0.05).1;
        assert!(m8 > m12 && m12 > m16, "means {m8} {m12} {m16}");
        let b8 = stats(8, 4, 0.01).0;
        let b16 = stats(16, 8, 0.01).0;
        let b20 = stats(20, 10, 0.01).0;
        assert!(b8 > b16 && b16 > b20, "minima {b8} {b16} {b20}");
    }

    #[test]
    fn text_round_trip() {
        let code = LinearCode::sample_random(9, 4, 3).unwrap();
        let text = code.to_text();
        let back = LinearCode::from_text(&text).unwrap();
        assert_eq!(back.profile(), code.profile());
        assert!(LinearCode::from_text("3 5\n1\n").is_err());
        assert!(LinearCode::from_text("").is_err());
    }

    #[test]
    fn table_budget() {
        let code = LinearCode::sample_random(12, 6, 0).unwrap();
        assert!(matches!(
            CosetTable::build_with_budget(&code, 5),
            Err(Error::Capacity(_))
        ));
    }
}
