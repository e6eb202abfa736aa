//! The four correlated binary source models: seeded samplers, exact
//! joint-distribution enumerators, closed-form key capacities, and tree
//! utilities for the multiterminal model.
//!
//! Terminals are numbered from 1. Every model satisfies an additive-noise
//! decomposition: each pair of adjacent terminals is connected by a
//! virtual binary symmetric channel.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::gf2::BitWord;

/// Default cap on `2^(d*n)` for exact enumeration.
pub const DEFAULT_AUDIT_BUDGET_BITS: u32 = 24;

/// Binary entropy in bits, with `h(0) = h(1) = 0` by continuity.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("entropy argument {p} outside [0, 1]")));
    }
    Ok(h(p))
}

pub(crate) fn h(p: f64) -> f64 {
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn check_open(name: &str, v: f64, lo: f64, hi: f64) -> Result<()> {
    if !(v > lo && v < hi) {
        return Err(Error::Domain(format!(
            "{name} must lie strictly in ({lo}, {hi}), got {v}"
        )));
    }
    Ok(())
}

/// One of the four joint source laws.
#[derive(Clone, Debug)]
pub enum SourceModel {
    /// Two terminals, both marginals uniform, disagreement probability `p`.
    Model1 { p: f64 },
    /// Two terminals: `X2 ~ Bernoulli(q)`, `X1 = X2 ^ V` with `V ~ Bernoulli(p)`.
    Model2 { p: f64, q: f64 },
    /// `d` terminals forming a Markov chain on a tree, each edge a
    /// BSC with its own crossover probability.
    Model3 { tree: TreeTopology },
    /// Three terminals; 1 and 2 extract a key private from helper 3.
    /// `(X2, X3)` is a Model-1 pair with parameter `q` and
    /// `X1 = X2 ^ X3 ^ V` with `V ~ Bernoulli(p)`.
    Model4 { p: f64, q: f64 },
}

impl SourceModel {
    pub fn model1(p: f64) -> Result<Self> {
        check_open("p", p, 0.0, 0.5)?;
        Ok(Self::Model1 { p })
    }

    pub fn model2(p: f64, q: f64) -> Result<Self> {
        check_open("p", p, 0.0, 0.5)?;
        check_open("q", q, 0.0, 1.0)?;
        Ok(Self::Model2 { p, q })
    }

    pub fn model3(tree: TreeTopology) -> Self {
        Self::Model3 { tree }
    }

    pub fn model4(p: f64, q: f64) -> Result<Self> {
        check_open("p", p, 0.0, 0.5)?;
        check_open("q", q, 0.0, 1.0)?;
        Ok(Self::Model4 { p, q })
    }

    pub fn id(&self) -> u8 {
        match self {
            Self::Model1 { .. } => 1,
            Self::Model2 { .. } => 2,
            Self::Model3 { .. } => 3,
            Self::Model4 { .. } => 4,
        }
    }

    /// Number of terminals `d`.
    pub fn terminals(&self) -> usize {
        match self {
            Self::Model1 { .. } | Self::Model2 { .. } => 2,
            Self::Model3 { tree } => tree.d(),
            Self::Model4 { .. } => 3,
        }
    }

    /// The closed-form key capacity in bits per source symbol: the secret
    /// key capacity for models 1-3 and the private key capacity (keys of
    /// terminals 1 and 2, private from 3) for model 4.
    pub fn capacity(&self) -> f64 {
        match self {
            Self::Model1 { p } => 1.0 - h(*p),
            Self::Model2 { p, q } | Self::Model4 { p, q } => {
                h(p + q - 2.0 * p * q) - h(*p)
            }
            Self::Model3 { tree } => 1.0 - h(tree.p_max()),
        }
    }

    /// Draws one length-`n` word per terminal, i.i.d. across positions,
    /// deterministically from `seed`.
    pub fn sample_sequences(&self, n: usize, seed: u64) -> Vec<BitWord> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let flips = |rng: &mut ChaCha8Rng, p: f64| -> BitWord {
            let mut w = BitWord::zeros(n);
            for i in 0..n {
                if rng.gen_bool(p) {
                    w.set(i, true);
                }
            }
            w
        };
        match self {
            Self::Model1 { p } => {
                let x2 = flips(&mut rng, 0.5);
                let v = flips(&mut rng, *p);
                vec![&x2 ^ &v, x2]
            }
            Self::Model2 { p, q } => {
                let x2 = flips(&mut rng, *q);
                let v = flips(&mut rng, *p);
                vec![&x2 ^ &v, x2]
            }
            Self::Model3 { tree } => {
                let mut words: Vec<Option<BitWord>> = vec![None; tree.d() + 1];
                words[tree.root()] = Some(flips(&mut rng, 0.5));
                for &(parent, child, p) in tree.bfs_edges() {
                    let noise = flips(&mut rng, p);
                    let x = words[parent].as_ref().unwrap() ^ &noise;
                    words[child] = Some(x);
                }
                (1..=tree.d()).map(|i| words[i].take().unwrap()).collect()
            }
            Self::Model4 { p, q } => {
                let x2 = flips(&mut rng, 0.5);
                let w = flips(&mut rng, *q);
                let v = flips(&mut rng, *p);
                let x3 = &x2 ^ &w;
                let x1 = &(&x2 ^ &x3) ^ &v;
                vec![x1, x2, x3]
            }
        }
    }

    /// The exact per-position joint pmf as a table over the `2^d` symbol
    /// patterns, index bit `t` (from zero) carrying terminal `t+1`'s symbol.
    pub fn position_pmf(&self) -> Vec<Dyadic> {
        let half = Dyadic::from_f64(0.5);
        match self {
            Self::Model1 { p } => {
                let pd = Dyadic::from_f64(*p);
                let qd = Dyadic::one().sub(&pd);
                // (x1, x2): agree -> (1-p)/2, disagree -> p/2.
                vec![
                    half.mul(&qd),
                    half.mul(&pd),
                    half.mul(&pd),
                    half.mul(&qd),
                ]
            }
            Self::Model2 { p, q } => {
                let pd = Dyadic::from_f64(*p);
                let pq = Dyadic::one().sub(&pd);
                let qd = Dyadic::from_f64(*q);
                let qq = Dyadic::one().sub(&qd);
                // index = x1 + 2 x2
                vec![
                    pq.mul(&qq), // (0,0): (1-p)(1-q)
                    pd.mul(&qq), // (1,0): p(1-q)
                    pd.mul(&qd), // (0,1): pq
                    pq.mul(&qd), // (1,1): q(1-p)
                ]
            }
            Self::Model3 { tree } => {
                let d = tree.d();
                let mut table = Vec::with_capacity(1 << d);
                for pattern in 0u32..1 << d {
                    let sym = |t: usize| (pattern >> (t - 1)) & 1;
                    let mut prob = half.clone();
                    for e in tree.edges() {
                        let pd = Dyadic::from_f64(e.p);
                        prob = prob.mul(&if sym(e.u) == sym(e.v) {
                            Dyadic::one().sub(&pd)
                        } else {
                            pd
                        });
                    }
                    table.push(prob);
                }
                table
            }
            Self::Model4 { p, q } => {
                let pd = Dyadic::from_f64(*p);
                let pq = Dyadic::one().sub(&pd);
                let qd = Dyadic::from_f64(*q);
                let qq = Dyadic::one().sub(&qd);
                let mut table = Vec::with_capacity(8);
                for pattern in 0u32..8 {
                    let (x1, x2, x3) = (pattern & 1, (pattern >> 1) & 1, (pattern >> 2) & 1);
                    let v = x1 ^ x2 ^ x3;
                    let w = x2 ^ x3;
                    let prob = half
                        .mul(&if w == 0 { qq.clone() } else { qd.clone() })
                        .mul(&if v == 0 { pq.clone() } else { pd.clone() });
                    table.push(prob);
                }
                table
            }
        }
    }

    /// Exact distribution over tuples of length-`n` words.
    pub fn exact_joint_pmf(&self, n: usize) -> Result<JointPmf> {
        JointPmf::new(self, n, DEFAULT_AUDIT_BUDGET_BITS)
    }

    /// Serializes to the plain key-value model file format.
    pub fn to_text(&self) -> String {
        let mut s = format!("model = {}\n", self.id());
        match self {
            Self::Model1 { p } => {
                let _ = writeln!(s, "p = {p}");
            }
            Self::Model2 { p, q } | Self::Model4 { p, q } => {
                let _ = writeln!(s, "p = {p}");
                let _ = writeln!(s, "q = {q}");
            }
            Self::Model3 { tree } => {
                for e in tree.edges() {
                    let _ = writeln!(s, "edge = {} {} {}", e.u, e.v, e.p);
                }
            }
        }
        s
    }

    /// Parses the model file format: `model = 1..4`, `p = ...`, `q = ...`,
    /// and `edge = i j p_ij` lines for the tree model.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut model: Option<u8> = None;
        let mut p: Option<f64> = None;
        let mut q: Option<f64> = None;
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected `key = value`, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "model" => {
                    model = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad model id {value:?}"))
                    })?)
                }
                "p" => {
                    p = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad p value {value:?}"))
                    })?)
                }
                "q" => {
                    q = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad q value {value:?}"))
                    })?)
                }
                "edge" => {
                    let parts: Vec<&str> = value.split_whitespace().collect();
                    if parts.len() != 3 {
                        return Err(Error::Parse(format!("bad edge line {value:?}")));
                    }
                    let u = parts[0].parse().map_err(|_| {
                        Error::Parse(format!("bad edge vertex {:?}", parts[0]))
                    })?;
                    let v = parts[1].parse().map_err(|_| {
                        Error::Parse(format!("bad edge vertex {:?}", parts[1]))
                    })?;
                    let pe = parts[2].parse().map_err(|_| {
                        Error::Parse(format!("bad edge probability {:?}", parts[2]))
                    })?;
                    edges.push((u, v, pe));
                }
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let need_p = || p.ok_or_else(|| Error::Parse("missing p".into()));
        let need_q = || q.ok_or_else(|| Error::Parse("missing q".into()));
        match model {
            Some(1) => Self::model1(need_p()?),
            Some(2) => Self::model2(need_p()?, need_q()?),
            Some(3) => {
                let d = edges.len() + 1;
                Ok(Self::model3(TreeTopology::new(d, edges)?))
            }
            Some(4) => Self::model4(need_p()?, need_q()?),
            Some(other) => Err(Error::Parse(format!("unknown model id {other}"))),
            None => Err(Error::Parse("missing model id".into())),
        }
    }
}

/// A tree edge between two terminals with its crossover probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub p: f64,
}

/// The topology of the multiterminal model: a tree on terminals
/// `1..=d` with a BSC on every edge. The designated root pair is the
/// first edge (in canonical sorted order) attaining the maximum
/// crossover probability.
#[derive(Clone, Debug)]
pub struct TreeTopology {
    d: usize,
    edges: Vec<TreeEdge>,
    adj: Vec<Vec<usize>>,
    /// (parent, child, p) in breadth-first order from the root.
    bfs_edges: Vec<(usize, usize, f64)>,
    root_pair: (usize, usize),
}

impl TreeTopology {
    pub fn new(d: usize, raw_edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Parameter(format!("tree needs d >= 2, got {d}")));
        }
        if raw_edges.len() != d - 1 {
            return Err(Error::Parameter(format!(
                "tree on {d} vertices needs {} edges, got {}",
                d - 1,
                raw_edges.len()
            )));
        }
        let mut edges: Vec<TreeEdge> = Vec::with_capacity(d - 1);
        for (u, v, p) in raw_edges {
            if u == v || u < 1 || v < 1 || u > d || v > d {
                return Err(Error::Parameter(format!("bad edge ({u}, {v})")));
            }
            check_open(&format!("p_({u},{v})"), p, 0.0, 0.5)?;
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            edges.push(TreeEdge { u, v, p });
        }
        edges.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)));
        let mut adj = vec![Vec::new(); d + 1];
        for (idx, e) in edges.iter().enumerate() {
            if adj[e.u].contains(&idx) {
                return Err(Error::Parameter(format!("duplicate edge ({}, {})", e.u, e.v)));
            }
            adj[e.u].push(idx);
            adj[e.v].push(idx);
        }
        // Ties in the maximum broken by canonical edge order.
        let root_edge = edges
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                a.p.partial_cmp(&b.p)
                    .unwrap()
                    .then(ib.cmp(ia)) // earlier edge wins ties
            })
            .map(|(_, e)| e)
            .unwrap();
        let root_pair = (root_edge.u, root_edge.v);
        // Connectivity check and BFS orientation from the root.
        let root = root_pair.0;
        let mut visited = vec![false; d + 1];
        visited[root] = true;
        let mut queue = std::collections::VecDeque::from([root]);
        let mut bfs_edges = Vec::with_capacity(d - 1);
        while let Some(u) = queue.pop_front() {
            for &ei in &adj[u] {
                let e = edges[ei];
                let w = if e.u == u { e.v } else { e.u };
                if !visited[w] {
                    visited[w] = true;
                    bfs_edges.push((u, w, e.p));
                    queue.push_back(w);
                }
            }
        }
        if visited.iter().skip(1).any(|&v| !v) {
            return Err(Error::Parameter("tree is not connected".into()));
        }
        Ok(Self {
            d,
            edges,
            adj,
            bfs_edges,
            root_pair,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub(crate) fn bfs_edges(&self) -> &[(usize, usize, f64)] {
        &self.bfs_edges
    }

    /// The maximum edge crossover probability.
    pub fn p_max(&self) -> f64 {
        let (u, v) = self.root_pair;
        self.edges
            .iter()
            .find(|e| (e.u, e.v) == (u, v))
            .unwrap()
            .p
    }

    /// The designated pair attaining `p_max`.
    pub fn root_pair(&self) -> (usize, usize) {
        self.root_pair
    }

    /// The reference terminal whose word every other terminal estimates.
    pub fn root(&self) -> usize {
        self.root_pair.0
    }

    /// The unique path from `i` to `j`, inclusive.
    pub fn path(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        if i < 1 || i > self.d || j < 1 || j > self.d {
            return Err(Error::Domain(format!("vertex out of range: ({i}, {j})")));
        }
        // DFS from i recording parents.
        let mut parent = vec![usize::MAX; self.d + 1];
        parent[i] = i;
        let mut stack = vec![i];
        while let Some(u) = stack.pop() {
            if u == j {
                break;
            }
            for &ei in &self.adj[u] {
                let e = self.edges[ei];
                let w = if e.u == u { e.v } else { e.u };
                if parent[w] == usize::MAX {
                    parent[w] = u;
                    stack.push(w);
                }
            }
        }
        let mut path = vec![j];
        let mut cur = j;
        while cur != i {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        Ok(path)
    }

    /// Crossover probability of the edge `(u, v)`.
    pub fn edge_p(&self, u: usize, v: usize) -> Option<f64> {
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.edges.iter().find(|e| (e.u, e.v) == (u, v)).map(|e| e.p)
    }
}

/// The exact joint law of one model at block length `n`, driven by the
/// per-position pmf table.
pub struct JointPmf {
    d: usize,
    n: usize,
    table: Vec<Dyadic>,
}

impl JointPmf {
    fn new(model: &SourceModel, n: usize, budget_bits: u32) -> Result<Self> {
        let d = model.terminals();
        if n < 1 {
            return Err(Error::Parameter("n must be >= 1".into()));
        }
        let bits = d
            .checked_mul(n)
            .filter(|&b| b <= budget_bits as usize)
            .ok_or_else(|| {
                Error::Capacity(format!(
                    "exact enumeration needs 2^({d}*{n}) outcomes, budget is 2^{budget_bits}"
                ))
            })?;
        let _ = bits;
        Ok(Self {
            d,
            n,
            table: model.position_pmf(),
        })
    }

    pub fn terminals(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Exact probability of a tuple of words, one per terminal.
    pub fn prob_of(&self, words: &[BitWord]) -> Dyadic {
        assert_eq!(words.len(), self.d);
        assert!(words.iter().all(|w| w.len() == self.n));
        // Count per-position symbol patterns, then take the product of
        // table entries raised to their multiplicities.
        let mut counts = vec![0u32; 1 << self.d];
        for i in 0..self.n {
            let mut pattern = 0usize;
            for (t, w) in words.iter().enumerate() {
                if w.get(i) {
                    pattern |= 1 << t;
                }
            }
            counts[pattern] += 1;
        }
        let mut prob = Dyadic::one();
        for (pattern, &c) in counts.iter().enumerate() {
            if c > 0 {
                prob = prob.mul(&self.table[pattern].pow(c));
            }
        }
        prob
    }

    /// Visits every outcome tuple with its exact probability.
    pub fn for_each(&self, mut f: impl FnMut(&[BitWord], &Dyadic)) {
        let total_bits = self.d * self.n;
        let mut words = vec![BitWord::zeros(self.n); self.d];
        for enc in 0u64..1 << total_bits {
            for (t, w) in words.iter_mut().enumerate() {
                for i in 0..self.n {
                    w.set(i, (enc >> (t * self.n + i)) & 1 == 1);
                }
            }
            let p = self.prob_of(&words);
            f(&words, &p);
        }
    }
}

/// Per-position marginal of one terminal, exact.
pub fn marginal_pmf(model: &SourceModel, terminal: usize) -> [Dyadic; 2] {
    let d = model.terminals();
    assert!((1..=d).contains(&terminal));
    let table = model.position_pmf();
    let mut out = [Dyadic::zero(), Dyadic::zero()];
    for (pattern, p) in table.iter().enumerate() {
        let sym = (pattern >> (terminal - 1)) & 1;
        out[sym] = out[sym].add(p);
    }
    out
}

/// Per-position joint pmf of two terminals, exact; indexed `[a][b]`.
pub fn pair_pmf(model: &SourceModel, ta: usize, tb: usize) -> [[Dyadic; 2]; 2] {
    let d = model.terminals();
    assert!((1..=d).contains(&ta) && (1..=d).contains(&tb) && ta != tb);
    let table = model.position_pmf();
    let mut out = [
        [Dyadic::zero(), Dyadic::zero()],
        [Dyadic::zero(), Dyadic::zero()],
    ];
    for (pattern, p) in table.iter().enumerate() {
        let a = (pattern >> (ta - 1)) & 1;
        let b = (pattern >> (tb - 1)) & 1;
        out[a][b] = out[a][b].add(p);
    }
    out
}

/// Chi-square goodness-of-fit statistic of sampled words against the
/// exact joint law (used by the sampler audits).
pub fn chi_square_statistic(model: &SourceModel, n: usize, samples: u64, seed: u64) -> f64 {
    let pmf = model.exact_joint_pmf(n).expect("budget");
    let d = model.terminals();
    let mut counts: HashMap<Vec<u64>, u64> = HashMap::new();
    for s in 0..samples {
        let words = model.sample_sequences(n, seed.wrapping_add(s));
        let key: Vec<u64> = words.iter().map(BitWord::to_lsb_u64).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    let mut stat = 0.0;
    let mut words = vec![BitWord::zeros(n); d];
    for enc in 0u64..1 << (d * n) {
        for (t, w) in words.iter_mut().enumerate() {
            for i in 0..n {
                w.set(i, (enc >> (t * n + i)) & 1 == 1);
            }
        }
        let expect = pmf.prob_of(&words).to_f64() * samples as f64;
        let key: Vec<u64> = words.iter().map(BitWord::to_lsb_u64).collect();
        let observed = counts.get(&key).copied().unwrap_or(0) as f64;
        stat += (observed - expect).powi(2) / expect;
    }
    stat
}
