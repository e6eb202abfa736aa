//! Method-of-types machinery: empirical types, typical sets, the
//! exponential probability bound for nontypical sets, and the regular
//! partition used for key extraction when the source is not uniform.
//!
//! A regular subset is a fixed-size set of same-type words inside one
//! coset. Because equal-type words have equal probability under an
//! i.i.d. source, indexing a word within its regular subset yields a key
//! that is exactly uniform and exactly independent of the syndrome; the
//! audits exercise that as a rational identity.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::lincode::LinearCode;
use crate::sources::{h, marginal_pmf, pair_pmf, SourceModel};

/// The empirical type of a word (or the joint type of a pair): exact
/// occurrence counts per symbol (pair). Two types are equal iff their
/// integer counts are equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeClass {
    counts: Vec<u64>,
    n: usize,
}

impl TypeClass {
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn n(&self) -> usize {
        self.n
    }
}

/// The type of `x`: counts of zeros and ones.
pub fn empirical_type(x: &BitWord) -> TypeClass {
    let ones = x.weight() as u64;
    TypeClass {
        counts: vec![x.len() as u64 - ones, ones],
        n: x.len(),
    }
}

/// The joint type of `(x, y)`: counts indexed `2 * x_i + y_i`.
pub fn joint_type(x: &BitWord, y: &BitWord) -> Result<TypeClass> {
    if x.len() != y.len() {
        return Err(Error::Dimension(format!(
            "joint type of words with lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let mut counts = vec![0u64; 4];
    for i in 0..x.len() {
        counts[2 * x.get(i) as usize + y.get(i) as usize] += 1;
    }
    Ok(TypeClass { counts, n: x.len() })
}

/// A strictly positive pmf on `{0, 1}`.
#[derive(Clone, Copy, Debug)]
pub struct BinaryPmf {
    p: [f64; 2],
}

impl BinaryPmf {
    pub fn new(p0: f64, p1: f64) -> Result<Self> {
        if p0 <= 0.0 || p1 <= 0.0 || (p0 + p1 - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "pmf must be strictly positive and sum to 1, got ({p0}, {p1})"
            )));
        }
        Ok(Self { p: [p0, p1] })
    }

    pub fn probs(&self) -> [f64; 2] {
        self.p
    }

    pub fn entropy(&self) -> f64 {
        h(self.p[1])
    }

    /// log2-probability of a word with the given type.
    fn log_prob(&self, t: &TypeClass) -> f64 {
        t.counts[0] as f64 * self.p[0].log2() + t.counts[1] as f64 * self.p[1].log2()
    }
}

/// A strictly positive joint pmf on `{0, 1}^2`, indexed `[x][y]`.
#[derive(Clone, Copy, Debug)]
pub struct JointBinaryPmf {
    p: [[f64; 2]; 2],
}

impl JointBinaryPmf {
    pub fn new(p: [[f64; 2]; 2]) -> Result<Self> {
        let total: f64 = p.iter().flatten().sum();
        if p.iter().flatten().any(|&v| v <= 0.0) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(
                "joint pmf must be strictly positive and sum to 1".into(),
            ));
        }
        Ok(Self { p })
    }

    pub fn x_marginal(&self) -> BinaryPmf {
        BinaryPmf {
            p: [self.p[0][0] + self.p[0][1], self.p[1][0] + self.p[1][1]],
        }
    }

    pub fn y_marginal(&self) -> BinaryPmf {
        BinaryPmf {
            p: [self.p[0][0] + self.p[1][0], self.p[0][1] + self.p[1][1]],
        }
    }

    pub fn joint_entropy(&self) -> f64 {
        -self
            .p
            .iter()
            .flatten()
            .map(|&v| v * v.log2())
            .sum::<f64>()
    }

    fn log_prob(&self, t: &TypeClass) -> f64 {
        let flat = [self.p[0][0], self.p[0][1], self.p[1][0], self.p[1][1]];
        t.counts
            .iter()
            .zip(flat.iter())
            .map(|(&c, &v)| c as f64 * v.log2())
            .sum()
    }
}

/// Whether `x` is typical with constant `xi`: its log2-probability lies in
/// the closed interval `[-n (H + xi), -n (H - xi)]`.
pub fn is_typical(x: &BitWord, pmf: &BinaryPmf, xi: f64) -> Result<bool> {
    if xi < 0.0 {
        return Err(Error::Domain(format!("xi must be >= 0, got {xi}")));
    }
    Ok(type_is_typical(&empirical_type(x), pmf, xi))
}

pub(crate) fn type_is_typical(t: &TypeClass, pmf: &BinaryPmf, xi: f64) -> bool {
    let n = t.n as f64;
    let log_p = pmf.log_prob(t);
    let entropy = pmf.entropy();
    -n * (entropy + xi) <= log_p && log_p <= -n * (entropy - xi)
}

/// Whether `(x, y)` is jointly typical: both marginals typical and the
/// pair probability inside the joint interval. A word is conditionally
/// typical given `y` exactly when the pair is jointly typical, and the
/// conditional typical set is empty whenever `y` itself is not typical.
pub fn is_joint_typical(
    x: &BitWord,
    y: &BitWord,
    pmf: &JointBinaryPmf,
    xi: f64,
) -> Result<bool> {
    if xi < 0.0 {
        return Err(Error::Domain(format!("xi must be >= 0, got {xi}")));
    }
    let jt = joint_type(x, y)?;
    Ok(joint_type_is_typical(&jt, pmf, xi))
}

pub(crate) fn joint_type_is_typical(jt: &TypeClass, pmf: &JointBinaryPmf, xi: f64) -> bool {
    let n = jt.n as f64;
    let x_type = TypeClass {
        counts: vec![jt.counts[0] + jt.counts[1], jt.counts[2] + jt.counts[3]],
        n: jt.n,
    };
    let y_type = TypeClass {
        counts: vec![jt.counts[0] + jt.counts[2], jt.counts[1] + jt.counts[3]],
        n: jt.n,
    };
    if !type_is_typical(&x_type, &pmf.x_marginal(), xi)
        || !type_is_typical(&y_type, &pmf.y_marginal(), xi)
    {
        return false;
    }
    let log_p = pmf.log_prob(jt);
    let entropy = pmf.joint_entropy();
    -n * (entropy + xi) <= log_p && log_p <= -n * (entropy - xi)
}

/// The exponential lower bound on the probability of the typical set:
/// `1 - (n+1)^|X| * 2^(-n xi^2 / (2 ln 2 [sum_a log2(1/P(a))]^2))`.
/// May be nonpositive (vacuous) for small `n`. Pass the flattened joint
/// pmf for the pair version (the alphabet-size exponent is the slice
/// length).
pub fn prop1_bound(probs: &[f64], xi: f64, n: usize) -> Result<f64> {
    if probs.iter().any(|&p| p <= 0.0) {
        return Err(Error::Domain("pmf must be strictly positive".into()));
    }
    if xi <= 0.0 {
        return Err(Error::Domain(format!("xi must be > 0, got {xi}")));
    }
    let log_sum: f64 = probs.iter().map(|&p| (1.0 / p).log2()).sum();
    let exponent = xi * xi / (2.0 * std::f64::consts::LN_2 * log_sum * log_sum);
    let alphabet = probs.len() as i32;
    Ok(1.0 - ((n + 1) as f64).powi(alphabet) * 2f64.powf(-(n as f64) * exponent))
}

/// Scheme constants for partition construction.
#[derive(Clone, Copy, Debug)]
pub struct PartitionParams {
    /// Typicality constant.
    pub xi: f64,
    /// Rate slack of the key range below the model's key capacity.
    pub eps_prime: f64,
    /// Explicit key range, replacing `floor(2^(n (I - eps_prime)))`.
    pub l_override: Option<u64>,
}

/// One regular subset: `L` words of one type (or one joint type with the
/// conditioning word) inside one coset, in lexicographic order.
#[derive(Clone, Debug)]
pub struct RegularSubset {
    pub coset: u64,
    pub type_class: TypeClass,
    pub words: Vec<BitWord>,
}

/// The deterministic regular partition: within each (coset, type) class
/// of typical words, words are sorted lexicographically and chopped into
/// consecutive blocks of exactly `L`; trailing remainders and all
/// nontypical words form the residual, which triggers the uniform-key
/// fallback.
pub struct RegularPartition {
    l: u64,
    n: usize,
    model_id: u8,
    subsets: Vec<RegularSubset>,
    membership: HashMap<BitWord, (u32, u64)>,
    residual: Vec<BitWord>,
    eps_measured: f64,
    x3: Option<BitWord>,
}

impl RegularPartition {
    /// Builds the partition for the two-terminal nonuniform model
    /// (marginal typicality, marginal types).
    pub fn build_model2(
        code: &LinearCode,
        model: &SourceModel,
        params: &PartitionParams,
    ) -> Result<Self> {
        let SourceModel::Model2 { p, .. } = model else {
            return Err(Error::Parameter(
                "marginal partition requires model 2".into(),
            ));
        };
        let eps = Self::validate(code, model, params, *p, 1.0)?;
        let m = marginal_pmf(model, 1);
        let pmf = BinaryPmf::new(m[0].to_f64(), m[1].to_f64())?;
        let l = Self::key_range(code.n(), model.capacity(), params)?;
        Self::build_inner(
            code,
            model.id(),
            l,
            eps,
            None,
            |x| Ok(type_is_typical(&empirical_type(x), &pmf, params.xi)),
            |x| Ok(empirical_type(x)),
        )
    }

    /// Builds the conditional partition for the private-key model given
    /// the helper's revealed word (conditional typicality, joint types
    /// with `x3`).
    pub fn build_model4(
        code: &LinearCode,
        model: &SourceModel,
        x3: &BitWord,
        params: &PartitionParams,
    ) -> Result<Self> {
        let SourceModel::Model4 { p, .. } = model else {
            return Err(Error::Parameter(
                "conditional partition requires model 4".into(),
            ));
        };
        if x3.len() != code.n() {
            return Err(Error::Dimension(format!(
                "conditioning word length {} != n = {}",
                x3.len(),
                code.n()
            )));
        }
        let eps = Self::validate(code, model, params, *p, 2.0)?;
        let pp = pair_pmf(model, 1, 3);
        let pmf = JointBinaryPmf::new([
            [pp[0][0].to_f64(), pp[0][1].to_f64()],
            [pp[1][0].to_f64(), pp[1][1].to_f64()],
        ])?;
        let l = Self::key_range(code.n(), model.capacity(), params)?;
        Self::build_inner(
            code,
            model.id(),
            l,
            eps,
            Some(x3.clone()),
            |x| Ok(joint_type_is_typical(&joint_type(x, x3)?, &pmf, params.xi)),
            |x| joint_type(x, x3),
        )
    }

    fn validate(
        code: &LinearCode,
        model: &SourceModel,
        params: &PartitionParams,
        p: f64,
        xi_factor: f64,
    ) -> Result<f64> {
        if params.xi < 0.0 {
            return Err(Error::Domain("xi must be >= 0".into()));
        }
        let eps = code.m() as f64 / code.n() as f64 - h(p);
        if params.eps_prime <= xi_factor * params.xi + eps {
            return Err(Error::Parameter(format!(
                "need eps_prime > {xi_factor} * xi + eps; got eps_prime = {}, xi = {}, \
                 measured code slack eps = {eps:.6}",
                params.eps_prime, params.xi
            )));
        }
        let _ = model;
        Ok(eps)
    }

    fn key_range(n: usize, rate: f64, params: &PartitionParams) -> Result<u64> {
        let l = match params.l_override {
            Some(l) => l,
            None => {
                let raw = 2f64.powf(n as f64 * (rate - params.eps_prime));
                if raw >= u32::MAX as f64 {
                    return Err(Error::Parameter(format!(
                        "key range 2^({n} * {:.4}) is not enumerable",
                        rate - params.eps_prime
                    )));
                }
                raw.floor() as u64
            }
        };
        if l < 1 {
            return Err(Error::Parameter(
                "key range L is below 1; lower eps_prime or override L".into(),
            ));
        }
        Ok(l)
    }

    fn build_inner(
        code: &LinearCode,
        model_id: u8,
        l: u64,
        eps_measured: f64,
        x3: Option<BitWord>,
        typical: impl Fn(&BitWord) -> Result<bool>,
        type_of: impl Fn(&BitWord) -> Result<TypeClass>,
    ) -> Result<Self> {
        let n = code.n();
        if n > 24 {
            return Err(Error::Capacity(format!(
                "partition construction enumerates 2^{n} words; n <= 24 required"
            )));
        }
        let mut classes: BTreeMap<(u64, TypeClass), Vec<BitWord>> = BTreeMap::new();
        let mut residual = Vec::new();
        for v in 0u64..1 << n {
            let x = BitWord::from_lsb_u64(v, n);
            if typical(&x)? {
                let key = (code.syndrome(&x).to_lsb_u64(), type_of(&x)?);
                classes.entry(key).or_default().push(x);
            } else {
                residual.push(x);
            }
        }
        let type_count = classes
            .keys()
            .map(|(_, t)| t)
            .collect::<std::collections::HashSet<_>>()
            .len();
        let type_bound = (n as u64 + 1).pow(if x3.is_some() { 4 } else { 2 });
        assert!(
            (type_count as u64) <= type_bound,
            "type count exceeds the method-of-types bound"
        );
        let mut subsets = Vec::new();
        let mut membership = HashMap::new();
        for ((coset, type_class), mut words) in classes {
            words.sort();
            let mut chunks = words.chunks_exact(l as usize);
            for chunk in &mut chunks {
                let id = subsets.len() as u32;
                for (k, w) in chunk.iter().enumerate() {
                    membership.insert(w.clone(), (id, k as u64));
                }
                subsets.push(RegularSubset {
                    coset,
                    type_class: type_class.clone(),
                    words: chunk.to_vec(),
                });
            }
            residual.extend_from_slice(chunks.remainder());
        }
        Ok(Self {
            l,
            n,
            model_id,
            subsets,
            membership,
            residual,
            eps_measured,
            x3,
        })
    }

    /// Key range `L`.
    pub fn l(&self) -> u64 {
        self.l
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model_id(&self) -> u8 {
        self.model_id
    }

    pub fn subsets(&self) -> &[RegularSubset] {
        &self.subsets
    }

    pub fn residual(&self) -> &[BitWord] {
        &self.residual
    }

    /// Measured code rate slack `m/n - h(p)`. Negative values mean the
    /// code is below the rate needed by the asymptotic error bound (the
    /// exact uniformity and secrecy identities hold regardless).
    pub fn eps_measured(&self) -> f64 {
        self.eps_measured
    }

    /// Whether the measured slack is in the asymptotic regime.
    pub fn regime_ok(&self) -> bool {
        self.eps_measured > 0.0
    }

    /// Conditioning word, for the conditional variant.
    pub fn conditioning_word(&self) -> Option<&BitWord> {
        self.x3.as_ref()
    }

    /// Within-subset index of `x`, or `None` when `x` is residual (the
    /// caller then draws a uniform fallback key).
    pub fn key_of(&self, x: &BitWord) -> Option<u64> {
        self.membership.get(x).map(|&(_, k)| k)
    }

    /// Subset id and index of `x`.
    pub fn locate(&self, x: &BitWord) -> Option<(u32, u64)> {
        self.membership.get(x).copied()
    }

    /// Debug dump: one line per subset, `coset-id type-counts L members`.
    pub fn dump_text(&self) -> String {
        let mut s = String::new();
        for sub in &self.subsets {
            let _ = write!(s, "{} {:?} {}", sub.coset, sub.type_class.counts(), self.l);
            for w in &sub.words {
                let _ = write!(s, " {w}");
            }
            s.push('\n');
        }
        s
    }
}
