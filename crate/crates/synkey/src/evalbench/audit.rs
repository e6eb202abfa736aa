//! Exhaustive secrecy, uniformity, and agreement audits.
//!
//! Every audit enumerates the model's underlying randomness (a uniform
//! word plus independent noise words), runs the deterministic key map on
//! integer-encoded words, and accumulates the exact joint distribution of
//! (key, transcript) in dyadic rationals. Fallback keys are marginalized
//! analytically: the whole distribution is scaled by the key range `L` so
//! that a fallback outcome contributes integer weight to every key value.
//! Zero leakage and exact uniformity are then integer identities, not
//! float comparisons.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::gf2::BitWord;
use crate::lincode::{ArithMode, CosetTable, LinearCode};
use crate::sources::{SourceModel, DEFAULT_AUDIT_BUDGET_BITS};
use crate::typicality::{PartitionParams, RegularPartition};

/// Scheme constants handed to the partition builder (models 2 and 4).
#[derive(Clone, Copy, Debug)]
pub struct SchemeParams {
    pub xi: f64,
    pub eps_prime: f64,
    pub l_override: Option<u64>,
}

impl Default for SchemeParams {
    fn default() -> Self {
        Self {
            xi: 0.05,
            eps_prime: 0.25,
            l_override: None,
        }
    }
}

impl SchemeParams {
    fn partition_params(&self) -> PartitionParams {
        PartitionParams {
            xi: self.xi,
            eps_prime: self.eps_prime,
            l_override: self.l_override,
        }
    }
}

/// Outcome of one exact audit.
#[derive(Clone, Debug)]
pub struct AuditReport {
    pub model: u8,
    pub code_id: String,
    pub n: usize,
    pub m: usize,
    pub params: String,
    /// Entropy of the reference terminal's key in bits.
    pub h_k_bits: f64,
    pub log_keyrange_bits: f64,
    /// Mutual information between the key and the eavesdropper's view
    /// (the transcript; for model 4, the transcript and the helper's
    /// word). Exactly zero when `leak_exact_zero`.
    pub leak_bits: f64,
    pub leak_exact_zero: bool,
    pub uniform_exact: bool,
    pub agree_prob: f64,
    /// Measured error exponent `-(1/n) log2 Pr{keys differ}`; infinite
    /// when the keys always agree.
    pub exponent: f64,
    pub arith: ArithMode,
    agree_scaled: Dyadic,
    total_scaled: Dyadic,
}

impl AuditReport {
    /// Exact test: `Pr{keys differ} == target`.
    pub fn disagreement_equals(&self, target: &Dyadic) -> bool {
        self.total_scaled.sub(&self.agree_scaled) == target.mul(&self.total_scaled)
    }

    pub fn disagree_prob(&self) -> f64 {
        self.total_scaled
            .sub(&self.agree_scaled)
            .ratio_f64(&self.total_scaled)
    }
}

/// Joint distribution of (key, transcript encoding), scaled by `L`.
struct JointDist {
    l: u64,
    map: BTreeMap<(u64, u64), Dyadic>,
}

impl JointDist {
    fn new(l: u64) -> Self {
        Self {
            l,
            map: BTreeMap::new(),
        }
    }

    /// Adds probability `p` for a resolved key (scaled contribution
    /// `p * L` on one key) or a fallback (`p` on every key). `slot` is
    /// the key value or -1 for fallback.
    fn add(&mut self, slot: i64, f: u64, p: &Dyadic) {
        if slot >= 0 {
            let entry = self
                .map
                .entry((slot as u64, f))
                .or_insert_with(Dyadic::zero);
            *entry = entry.add(&p.mul_u64(self.l));
        } else {
            for k in 0..self.l {
                let entry = self.map.entry((k, f)).or_insert_with(Dyadic::zero);
                *entry = entry.add(p);
            }
        }
    }

    fn key_marginals(&self) -> Vec<Dyadic> {
        let mut marg = vec![Dyadic::zero(); self.l as usize];
        for (&(k, _), p) in &self.map {
            marg[k as usize] = marg[k as usize].add(p);
        }
        marg
    }

    fn transcript_marginals(&self) -> BTreeMap<u64, Dyadic> {
        let mut marg = BTreeMap::new();
        for (&(_, f), p) in &self.map {
            let entry = marg.entry(f).or_insert_with(Dyadic::zero);
            *entry = entry.add(p);
        }
        marg
    }

    fn total(&self) -> Dyadic {
        self.map
            .values()
            .fold(Dyadic::zero(), |acc, p| acc.add(p))
    }

    /// Exact independence of key and transcript:
    /// `P(k, f) * total == P(k) * P(f)` for every pair.
    fn independent(&self, kmarg: &[Dyadic], fmarg: &BTreeMap<u64, Dyadic>, total: &Dyadic) -> bool {
        let zero = Dyadic::zero();
        for (f, pf) in fmarg {
            for (k, pk) in kmarg.iter().enumerate() {
                let pkf = self.map.get(&(k as u64, *f)).unwrap_or(&zero);
                if pkf.mul(total) != pk.mul(pf) {
                    return false;
                }
            }
        }
        true
    }

    fn entropy_bits(kmarg: &[Dyadic], total: &Dyadic) -> f64 {
        -kmarg
            .iter()
            .filter(|p| !p.is_zero())
            .map(|p| {
                let r = p.ratio_f64(total);
                r * r.log2()
            })
            .sum::<f64>()
    }

    fn mutual_information_bits(
        &self,
        kmarg: &[Dyadic],
        fmarg: &BTreeMap<u64, Dyadic>,
        total: &Dyadic,
    ) -> f64 {
        let mut mi = 0.0;
        for (&(k, f), pkf) in &self.map {
            if pkf.is_zero() {
                continue;
            }
            let joint = pkf.ratio_f64(total);
            let ratio = pkf.mul(total).ratio_f64(&kmarg[k as usize].mul(&fmarg[&f]));
            mi += joint * ratio.log2();
        }
        mi.max(0.0)
    }
}

/// Agreement bookkeeping over weight classes. Entries are counts of
/// outcomes per class; fallback involvement contributes agreement `1/L`,
/// handled by the `L^2` scaling.
struct AgreeAcc {
    eq: Vec<u64>,
    half: Vec<u64>,
    all: Vec<u64>,
}

impl AgreeAcc {
    fn new(classes: usize) -> Self {
        Self {
            eq: vec![0; classes],
            half: vec![0; classes],
            all: vec![0; classes],
        }
    }

    /// Two-terminal outcome with key slots (-1 = fallback).
    fn add_pair(&mut self, class: usize, k1: i64, k2: i64) {
        self.all[class] += 1;
        if k1 >= 0 && k2 >= 0 {
            if k1 == k2 {
                self.eq[class] += 1;
            }
        } else {
            self.half[class] += 1;
        }
    }

    /// Multi-terminal outcome with no fallback involved.
    fn add_resolved(&mut self, class: usize, all_equal: bool) {
        self.all[class] += 1;
        if all_equal {
            self.eq[class] += 1;
        }
    }

    fn finalize(&self, vals: &[Dyadic], l: u64) -> (Dyadic, Dyadic) {
        let mut agree = Dyadic::zero();
        let mut total = Dyadic::zero();
        for (c, val) in vals.iter().enumerate() {
            if self.all[c] == 0 {
                continue;
            }
            let eq_w = self.eq[c] * l * l + self.half[c] * l;
            if eq_w > 0 {
                agree = agree.add(&val.mul_u64(eq_w));
            }
            total = total.add(&val.mul_u64(self.all[c] * l * l));
        }
        (agree, total)
    }
}

/// Bernoulli weight-class values `p^w (1-p)^(n-w)`, exact.
fn bernoulli_vals(p: f64, n: usize) -> Vec<Dyadic> {
    let pd = Dyadic::from_f64(p);
    let qd = Dyadic::one().sub(&pd);
    (0..=n)
        .map(|w| pd.pow(w as u32).mul(&qd.pow((n - w) as u32)))
        .collect()
}

fn uniform_val(n: usize) -> Dyadic {
    Dyadic::from_f64(0.5).pow(n as u32)
}

fn budget_check(d: usize, n: usize) -> Result<()> {
    if d * n > DEFAULT_AUDIT_BUDGET_BITS as usize {
        return Err(Error::Capacity(format!(
            "audit enumerates 2^({d}*{n}) outcomes, budget is 2^{DEFAULT_AUDIT_BUDGET_BITS}"
        )));
    }
    Ok(())
}

fn syndrome_table(code: &LinearCode) -> Vec<u64> {
    let n = code.n();
    (0..1u64 << n)
        .map(|v| code.syndrome(&BitWord::from_lsb_u64(v, n)).to_lsb_u64())
        .collect()
}

fn partition_key_table(partition: &RegularPartition, n: usize) -> Vec<i64> {
    (0..1u64 << n)
        .map(|v| {
            partition
                .key_of(&BitWord::from_lsb_u64(v, n))
                .map_or(-1, |k| k as i64)
        })
        .collect()
}

/// Computes, by full enumeration, the exact joint law of the reference
/// key and the public transcript (plus the helper's word for model 4),
/// and reports uniformity, leakage, agreement, and the measured error
/// exponent. Fallback randomization is marginalized analytically.
pub fn exact_secrecy_audit(
    model: &SourceModel,
    code: &LinearCode,
    scheme: &SchemeParams,
    code_id: &str,
) -> Result<AuditReport> {
    let table = CosetTable::build(code)?;
    match model {
        SourceModel::Model1 { p } => audit_model1(model, code, &table, *p, code_id),
        SourceModel::Model2 { p, q } => {
            audit_model2(model, code, &table, *p, *q, scheme, code_id)
        }
        SourceModel::Model3 { tree } => audit_model3(model, code, &table, tree, code_id),
        SourceModel::Model4 { p, q } => {
            audit_model4(model, code, &table, *p, *q, scheme, code_id)
        }
    }
}

fn finish_report(
    model: &SourceModel,
    code: &LinearCode,
    code_id: &str,
    params: String,
    l: u64,
    dist: JointDist,
    agree_scaled: Dyadic,
    total_scaled: Dyadic,
) -> AuditReport {
    let kmarg = dist.key_marginals();
    let fmarg = dist.transcript_marginals();
    let total = dist.total();
    let uniform_exact = kmarg.windows(2).all(|w| w[0] == w[1]);
    let leak_exact_zero = dist.independent(&kmarg, &fmarg, &total);
    let h_k_bits = if uniform_exact {
        (l as f64).log2()
    } else {
        JointDist::entropy_bits(&kmarg, &total)
    };
    let leak_bits = if leak_exact_zero {
        0.0
    } else {
        dist.mutual_information_bits(&kmarg, &fmarg, &total)
    };
    let disagree = total_scaled.sub(&agree_scaled).ratio_f64(&total_scaled);
    let exponent = if disagree == 0.0 {
        f64::INFINITY
    } else {
        -disagree.log2() / code.n() as f64
    };
    AuditReport {
        model: model.id(),
        code_id: code_id.to_string(),
        n: code.n(),
        m: code.m(),
        params,
        h_k_bits,
        log_keyrange_bits: (l as f64).log2(),
        leak_bits,
        leak_exact_zero,
        uniform_exact,
        agree_prob: agree_scaled.ratio_f64(&total_scaled),
        exponent,
        arith: ArithMode::Rational,
        agree_scaled,
        total_scaled,
    }
}

fn audit_model1(
    model: &SourceModel,
    code: &LinearCode,
    table: &CosetTable,
    p: f64,
    code_id: &str,
) -> Result<AuditReport> {
    let n = code.n();
    budget_check(2, n)?;
    let size = 1usize << n;
    let s_table = syndrome_table(code);
    let mask = (1u64 << code.k()) - 1;
    let l = 1u64 << code.k();

    let px1 = uniform_val(n);
    let mut dist = JointDist::new(l);
    for x1 in 0..size {
        dist.add((x1 as u64 & mask) as i64, s_table[x1], &px1);
    }

    let noise_vals: Vec<Dyadic> = bernoulli_vals(p, n)
        .into_iter()
        .map(|v| v.mul(&px1))
        .collect();
    let mut acc = AgreeAcc::new(n + 1);
    for x1 in 0..size {
        let k1 = (x1 as u64 & mask) as i64;
        for v in 0..size {
            let x2 = x1 ^ v;
            let rec = x2 as u64 ^ table.leader_lsb(s_table[x1] ^ s_table[x2]);
            acc.add_pair(v.count_ones() as usize, k1, (rec & mask) as i64);
        }
    }
    let (agree, total) = acc.finalize(&noise_vals, l);
    Ok(finish_report(
        model,
        code,
        code_id,
        format!("p={p}"),
        l,
        dist,
        agree,
        total,
    ))
}

fn audit_model2(
    model: &SourceModel,
    code: &LinearCode,
    table: &CosetTable,
    p: f64,
    q: f64,
    scheme: &SchemeParams,
    code_id: &str,
) -> Result<AuditReport> {
    let n = code.n();
    budget_check(2, n)?;
    let partition = RegularPartition::build_model2(code, model, &scheme.partition_params())?;
    let l = partition.l();
    let size = 1usize << n;
    let s_table = syndrome_table(code);
    let key_table = partition_key_table(&partition, n);

    // Classes indexed by (weight of x2, weight of v).
    let q_vals = bernoulli_vals(q, n);
    let p_vals = bernoulli_vals(p, n);
    let mut vals = Vec::with_capacity((n + 1) * (n + 1));
    for qa in &q_vals {
        for pb in &p_vals {
            vals.push(qa.mul(pb));
        }
    }

    let mut dist = JointDist::new(l);
    let mut acc = AgreeAcc::new(vals.len());
    let mut dist_counts: BTreeMap<(i64, u64), Vec<u64>> = BTreeMap::new();
    for x2 in 0..size {
        let w2 = x2.count_ones() as usize;
        for v in 0..size {
            let class = w2 * (n + 1) + v.count_ones() as usize;
            let x1 = x2 ^ v;
            let k1 = key_table[x1];
            let f = s_table[x1];
            dist_counts.entry((k1, f)).or_insert_with(|| vec![0; vals.len()])[class] += 1;
            let rec = x2 as u64 ^ table.leader_lsb(s_table[x1] ^ s_table[x2]);
            acc.add_pair(class, k1, key_table[rec as usize]);
        }
    }
    for ((slot, f), counts) in dist_counts {
        let mut prob = Dyadic::zero();
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                prob = prob.add(&vals[c].mul_u64(count));
            }
        }
        dist.add(slot, f, &prob);
    }
    let (agree, total) = acc.finalize(&vals, l);
    let params = format!(
        "p={p} q={q} xi={} eps_prime={} L={l} eps_measured={:.6} regime_ok={}",
        scheme.xi,
        scheme.eps_prime,
        partition.eps_measured(),
        partition.regime_ok()
    );
    Ok(finish_report(
        model, code, code_id, params, l, dist, agree, total,
    ))
}

fn audit_model3(
    model: &SourceModel,
    code: &LinearCode,
    table: &CosetTable,
    tree: &crate::sources::TreeTopology,
    code_id: &str,
) -> Result<AuditReport> {
    let n = code.n();
    let m = code.m();
    let d = tree.d();
    budget_check(d, n)?;
    if d * m > 63 {
        return Err(Error::Capacity(
            "transcript encoding needs d * m <= 63".into(),
        ));
    }
    let size = 1usize << n;
    let s_table = syndrome_table(code);
    let mask = (1u64 << code.k()) - 1;
    let l = 1u64 << code.k();
    let root = tree.root();
    let bfs: Vec<(usize, usize, f64)> = tree.bfs_edges().to_vec();
    let paths: Vec<Vec<usize>> = (1..=d)
        .map(|i| tree.path(i, root).expect("valid vertices"))
        .collect();

    // Classes: one weight per edge, mixed-radix n+1.
    let edge_vals: Vec<Vec<Dyadic>> = bfs.iter().map(|&(_, _, p)| bernoulli_vals(p, n)).collect();
    let class_count = (n + 1).pow((d - 1) as u32);
    let mut vals = Vec::with_capacity(class_count);
    let base = uniform_val(n);
    for class in 0..class_count {
        let mut val = base.clone();
        let mut rem = class;
        for ev in &edge_vals {
            val = val.mul(&ev[rem % (n + 1)]);
            rem /= n + 1;
        }
        vals.push(val);
    }

    let mut acc = AgreeAcc::new(class_count);
    let mut dist_counts: BTreeMap<(i64, u64), Vec<u64>> = BTreeMap::new();
    let mut words = vec![0usize; d + 1];
    let total_outcomes = 1u64 << (d * n);
    for enc in 0..total_outcomes {
        words[root] = (enc & (size as u64 - 1)) as usize;
        let mut class = 0usize;
        for (ei, &(parent, child, _)) in bfs.iter().enumerate() {
            let v = ((enc >> ((ei + 1) * n)) & (size as u64 - 1)) as usize;
            words[child] = words[parent] ^ v;
            class += v.count_ones() as usize * (n + 1).pow(ei as u32);
        }
        let mut f_enc = 0u64;
        for i in 1..=d {
            f_enc |= s_table[words[i]] << ((i - 1) * m);
        }
        let k_root = (words[root] as u64 & mask) as i64;
        dist_counts
            .entry((k_root, f_enc))
            .or_insert_with(|| vec![0; class_count])[class] += 1;
        let mut all_equal = true;
        for i in 1..=d {
            if i == root {
                continue;
            }
            let mut est = words[i] as u64;
            for hop in paths[i - 1].windows(2) {
                est ^= table.leader_lsb(s_table[words[hop[0]]] ^ s_table[words[hop[1]]]);
            }
            if est & mask != words[root] as u64 & mask {
                all_equal = false;
                break;
            }
        }
        acc.add_resolved(class, all_equal);
    }
    let mut dist = JointDist::new(l);
    for ((slot, f), counts) in dist_counts {
        let mut prob = Dyadic::zero();
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                prob = prob.add(&vals[c].mul_u64(count));
            }
        }
        dist.add(slot, f, &prob);
    }
    let (agree, total) = acc.finalize(&vals, l);
    let edges_desc: Vec<String> = tree
        .edges()
        .iter()
        .map(|e| format!("({} {} {})", e.u, e.v, e.p))
        .collect();
    Ok(finish_report(
        model,
        code,
        code_id,
        format!("edges={} p_max={}", edges_desc.join(""), tree.p_max()),
        l,
        dist,
        agree,
        total,
    ))
}

fn audit_model4(
    model: &SourceModel,
    code: &LinearCode,
    table: &CosetTable,
    p: f64,
    q: f64,
    scheme: &SchemeParams,
    code_id: &str,
) -> Result<AuditReport> {
    let n = code.n();
    let m = code.m();
    budget_check(3, n)?;
    if n + m > 63 {
        return Err(Error::Capacity(
            "transcript encoding needs n + m <= 63".into(),
        ));
    }
    let size = 1usize << n;
    let s_table = syndrome_table(code);

    // One conditional partition per revealed helper word.
    let mut key_tables: Vec<Vec<i64>> = Vec::with_capacity(size);
    let mut l = 0u64;
    for x3 in 0..size {
        let word = BitWord::from_lsb_u64(x3 as u64, n);
        let partition =
            RegularPartition::build_model4(code, model, &word, &scheme.partition_params())?;
        l = partition.l();
        key_tables.push(partition_key_table(&partition, n));
    }

    let q_vals = bernoulli_vals(q, n);
    let p_vals = bernoulli_vals(p, n);
    let base = uniform_val(n);
    let mut vals = Vec::with_capacity((n + 1) * (n + 1));
    for qa in &q_vals {
        for pb in &p_vals {
            vals.push(base.mul(&qa.mul(pb)));
        }
    }

    let mut acc = AgreeAcc::new(vals.len());
    let mut dist_counts: BTreeMap<(i64, u64), Vec<u64>> = BTreeMap::new();
    for x2 in 0..size {
        for w in 0..size {
            let x3 = x2 ^ w;
            let ww = w.count_ones() as usize;
            let keys = &key_tables[x3];
            for v in 0..size {
                let class = ww * (n + 1) + v.count_ones() as usize;
                let x1 = w ^ v;
                let k1 = keys[x1];
                let f = ((x3 as u64) << m) | s_table[x1];
                dist_counts.entry((k1, f)).or_insert_with(|| vec![0; vals.len()])[class] +=
                    1;
                // Terminal 2 decodes from x2 ^ x3 = w.
                let rec = w as u64 ^ table.leader_lsb(s_table[x1] ^ s_table[w]);
                acc.add_pair(class, k1, keys[rec as usize]);
            }
        }
    }
    let mut dist = JointDist::new(l);
    for ((slot, f), counts) in dist_counts {
        let mut prob = Dyadic::zero();
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                prob = prob.add(&vals[c].mul_u64(count));
            }
        }
        dist.add(slot, f, &prob);
    }
    let (agree, total) = acc.finalize(&vals, l);
    let params = format!(
        "p={p} q={q} xi={} eps_prime={} L={l}",
        scheme.xi, scheme.eps_prime
    );
    Ok(finish_report(
        model, code, code_id, params, l, dist, agree, total,
    ))
}

/// Exact decoding-error monotonicity over a probability grid: returns the
/// values and whether they are strictly increasing (compared in exact
/// arithmetic).
pub fn monotonicity_check(table: &CosetTable, p_grid: &[f64]) -> Result<(bool, Vec<f64>)> {
    if p_grid.is_empty() {
        return Err(Error::Parameter("empty probability grid".into()));
    }
    if p_grid.iter().any(|&p| !(0.0 < p && p < 0.5)) {
        return Err(Error::Domain(
            "grid probabilities must lie strictly in (0, 1/2)".into(),
        ));
    }
    if p_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parameter("grid must be strictly increasing".into()));
    }
    let exact: Vec<Dyadic> = p_grid.iter().map(|&p| table.ml_error_prob_exact(p)).collect();
    let increasing = exact.windows(2).all(|w| w[0] < w[1]);
    Ok((increasing, exact.iter().map(Dyadic::to_f64).collect()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::keygen;
    use crate::sources::TreeTopology;

    #[test]
    fn model1_hamming_audit() {
        let code = LinearCode::hamming74();
        let model = SourceModel::model1(0.01).unwrap();
        let report =
            exact_secrecy_audit(&model, &code, &SchemeParams::default(), "hamming74").unwrap();
        assert!(report.uniform_exact);
        assert!(report.leak_exact_zero);
        assert_eq!(report.h_k_bits, 4.0);
        assert_eq!(report.log_keyrange_bits, 4.0);
        assert_eq!(report.leak_bits, 0.0);
        let table = CosetTable::build(&code).unwrap();
        assert!(report.disagreement_equals(&table.ml_error_prob_exact(0.01)));
        assert!((report.agree_prob - (1.0 - 0.0020310)).abs() < 1e-6);
        assert!(report.exponent > 0.0);
    }

    #[test]
    fn model1_random_code_audit_n10() {
        let code = LinearCode::sample_random(10, 4, 1).unwrap();
        let model = SourceModel::model1(0.05).unwrap();
        let report =
            exact_secrecy_audit(&model, &code, &SchemeParams::default(), "random:10,4,1")
                .unwrap();
        assert!(report.uniform_exact);
        assert!(report.leak_exact_zero);
        assert_eq!(report.h_k_bits, 6.0);
        let table = CosetTable::build(&code).unwrap();
        assert!(report.disagreement_equals(&table.ml_error_prob_exact(0.05)));
    }

    #[test]
    fn model2_audit_uniform_and_secret() {
        let code = LinearCode::sample_random(8, 4, 9).unwrap();
        let model = SourceModel::model2(0.1, 0.3).unwrap();
        let scheme = SchemeParams {
            xi: 0.04,
            eps_prime: 0.2,
            l_override: None,
        };
        let report = exact_secrecy_audit(&model, &code, &scheme, "random:8,4,9").unwrap();
        assert!(report.uniform_exact);
        assert!(report.leak_exact_zero);
        assert!(report.log_keyrange_bits >= 1.0);
        assert_eq!(report.h_k_bits, report.log_keyrange_bits);
    }

    #[test]
    fn model3_chain_audit() {
        let code = LinearCode::hamming74();
        let tree = TreeTopology::new(3, vec![(1, 2, 0.05), (2, 3, 0.1)]).unwrap();
        let model = SourceModel::model3(tree);
        let report =
            exact_secrecy_audit(&model, &code, &SchemeParams::default(), "hamming74").unwrap();
        assert!(report.uniform_exact);
        assert!(report.leak_exact_zero);
        assert_eq!(report.h_k_bits, 4.0);
        // Both leaves sit one hop from the root, so all keys agree
        // exactly when each hop's decode succeeds; the hops are driven by
        // independent edge noises.
        let table = CosetTable::build(&code).unwrap();
        let one = crate::exact::Dyadic::one();
        let succ = one
            .sub(&table.ml_error_prob_exact(0.05))
            .mul(&one.sub(&table.ml_error_prob_exact(0.1)));
        assert!(report.disagreement_equals(&one.sub(&succ)));
        assert!((report.agree_prob - 0.8125686).abs() < 1e-6);
    }

    #[test]
    fn model3_audit_matches_protocol_subsample() {
        // The integer-encoded enumeration must agree with the public
        // protocol functions on sampled outcomes.
        let code = LinearCode::hamming74();
        let table = CosetTable::build(&code).unwrap();
        let tree = TreeTopology::new(3, vec![(1, 2, 0.05), (2, 3, 0.1)]).unwrap();
        let model = SourceModel::model3(tree.clone());
        for seed in 0..200 {
            let words = model.sample_sequences(7, seed);
            let (keys, _) = keygen::run_model3(&code, &table, &tree, &words).unwrap();
            // Recompute with the audit's encoding.
            let enc: Vec<u64> = words.iter().map(BitWord::to_lsb_u64).collect();
            let s: Vec<u64> = words
                .iter()
                .map(|w| code.syndrome(w).to_lsb_u64())
                .collect();
            let mask = (1u64 << code.k()) - 1;
            let root = tree.root();
            for i in 1..=3usize {
                let mut est = enc[i - 1];
                if i != root {
                    for hop in tree.path(i, root).unwrap().windows(2) {
                        est ^= table.leader_lsb(s[hop[0] - 1] ^ s[hop[1] - 1]);
                    }
                }
                assert_eq!(keys.keys[i - 1], est & mask, "seed {seed} terminal {i}");
            }
        }
    }

    #[test]
    fn model4_audit_private_key() {
        let code = LinearCode::sample_random(5, 2, 3).unwrap();
        let model = SourceModel::model4(0.1, 0.3).unwrap();
        let scheme = SchemeParams {
            xi: 0.03,
            eps_prime: 0.3,
            l_override: Some(2),
        };
        let report = exact_secrecy_audit(&model, &code, &scheme, "random:5,2,3").unwrap();
        assert!(report.uniform_exact);
        assert!(report.leak_exact_zero, "leak = {}", report.leak_bits);
        assert_eq!(report.h_k_bits, 1.0);
    }

    #[test]
    fn audit_budget_enforced() {
        let code = LinearCode::sample_random(16, 8, 0).unwrap();
        let model = SourceModel::model1(0.05).unwrap();
        assert!(matches!(
            exact_secrecy_audit(&model, &code, &SchemeParams::default(), "x"),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn monotonicity_examples() {
        let rep3 = LinearCode::repetition(3).unwrap();
        let t = CosetTable::build(&rep3).unwrap();
        let (ok, vals) = monotonicity_check(&t, &[0.05, 0.1]).unwrap();
        assert!(ok);
        assert!((vals[0] - 0.00725).abs() < 1e-15);
        assert!((vals[1] - 0.028).abs() < 1e-15);

        let code = LinearCode::hamming74();
        let t = CosetTable::build(&code).unwrap();
        let grid: Vec<f64> = (0..10).map(|i| 0.01 + 0.39 * i as f64 / 9.0).collect();
        let (ok, _) = monotonicity_check(&t, &grid).unwrap();
        assert!(ok);

        // Near-zero crossover: values approach 0 from above, still
        // strictly ordered.
        let (ok, vals) = monotonicity_check(&t, &[1e-6, 1e-5, 1e-4]).unwrap();
        assert!(ok);
        assert!(vals[0] > 0.0);

        assert!(monotonicity_check(&t, &[0.2, 0.1]).is_err());
        assert!(monotonicity_check(&t, &[0.1, 0.6]).is_err());
        assert!(monotonicity_check(&t, &[]).is_err());
    }
}
