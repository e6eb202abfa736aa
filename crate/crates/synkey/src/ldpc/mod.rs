//! Sparse parity-check codes for the Slepian-Wolf step at block length
//! around 10^3: regular and irregular ensembles, alist import/export,
//! and the dense systematic lift used for key extraction.

mod decode;

pub use decode::{bp_syndrome_decode, BpConfig, BpOutcome};

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::{BitWord, Gf2Matrix};

/// A degree distribution pair from the edge perspective: `lambda` lists
/// (variable-node degree, fraction of edges attached to such nodes),
/// `rho` the same for check nodes.
#[derive(Clone, Debug)]
pub struct DegreeDistribution {
    lambda: Vec<(u32, f64)>,
    rho: Vec<(u32, f64)>,
}

impl DegreeDistribution {
    pub fn new(lambda: Vec<(u32, f64)>, rho: Vec<(u32, f64)>) -> Result<Self> {
        for (name, list) in [("lambda", &lambda), ("rho", &rho)] {
            if list.is_empty() {
                return Err(Error::Parameter(format!("{name} is empty")));
            }
            if list.iter().any(|&(d, f)| d < 1 || f <= 0.0) {
                return Err(Error::Parameter(format!(
                    "{name} needs positive degrees and fractions"
                )));
            }
            if list.windows(2).any(|w| w[0].0 >= w[1].0) {
                return Err(Error::Parameter(format!(
                    "{name} degrees must be strictly ascending"
                )));
            }
            let total: f64 = list.iter().map(|&(_, f)| f).sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Parameter(format!(
                    "{name} edge fractions sum to {total}, expected 1"
                )));
            }
        }
        Ok(Self { lambda, rho })
    }

    /// The optimized rate-1/2 profile with variable degrees up to 20 and
    /// check degrees 8 and 9.
    pub fn rate_half_profile() -> Self {
        Self::new(
            vec![
                (2, 0.234029),
                (3, 0.212425),
                (6, 0.146898),
                (7, 0.102840),
                (20, 0.303808),
            ],
            vec![(8, 0.71875), (9, 0.28125)],
        )
        .unwrap()
    }

    pub fn lambda(&self) -> &[(u32, f64)] {
        &self.lambda
    }

    pub fn rho(&self) -> &[(u32, f64)] {
        &self.rho
    }

    /// Design rate `1 - (sum rho_j / j) / (sum lambda_i / i)`.
    pub fn design_rate(&self) -> f64 {
        let li: f64 = self.lambda.iter().map(|&(d, f)| f / d as f64).sum();
        let ri: f64 = self.rho.iter().map(|&(d, f)| f / d as f64).sum();
        1.0 - ri / li
    }
}

/// A sparse parity-check code: per-check variable lists and per-variable
/// check lists, kept sorted and mutually consistent, with no repeated
/// edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdpcCode {
    n: usize,
    m: usize,
    check_vars: Vec<Vec<u32>>,
    var_checks: Vec<Vec<u32>>,
}

impl LdpcCode {
    /// Builds a (dv, dc)-regular code by random socket matching, with
    /// double edges resampled away and 4-cycles removed best-effort by
    /// bounded edge swaps. Seed-deterministic.
    pub fn regular(n: usize, dv: u32, dc: u32, seed: u64) -> Result<Self> {
        if dv < 2 || dc <= dv {
            return Err(Error::Parameter(format!(
                "regular code needs dv >= 2 and dc > dv, got ({dv}, {dc})"
            )));
        }
        let sockets = n
            .checked_mul(dv as usize)
            .ok_or_else(|| Error::Parameter("socket count overflow".into()))?;
        if sockets % dc as usize != 0 {
            return Err(Error::Parameter(format!(
                "n * dv = {sockets} is not divisible by dc = {dc}"
            )));
        }
        let m = sockets / dc as usize;
        let var_degrees = vec![dv; n];
        let check_degrees = vec![dc; m];
        Self::from_sockets(n, &var_degrees, &check_degrees, seed)
    }

    /// Builds an irregular code for a degree distribution pair.
    ///
    /// Edge fractions become node counts by largest-remainder rounding;
    /// when rounding leaves variable and check socket totals unequal, the
    /// check side is padded with nodes of the highest degree and the last
    /// padded node trimmed to absorb the remainder.
    pub fn irregular(n: usize, dist: &DegreeDistribution, seed: u64) -> Result<Self> {
        // Node fractions on the variable side: (lambda_i / i), normalized.
        let weights: Vec<f64> = dist.lambda.iter().map(|&(d, f)| f / d as f64).collect();
        let var_counts = largest_remainder(n, &weights);
        if var_counts.iter().any(|&c| c == 0) {
            return Err(Error::Parameter(
                "n too small: a variable-degree bucket rounded to zero nodes".into(),
            ));
        }
        let mut var_degrees = Vec::with_capacity(n);
        for (&(d, _), &count) in dist.lambda.iter().zip(&var_counts) {
            var_degrees.extend(std::iter::repeat(d).take(count));
        }
        let sockets: usize = var_degrees.iter().map(|&d| d as usize).sum();

        let check_weights: Vec<f64> = dist.rho.iter().map(|&(d, f)| f / d as f64).collect();
        let m_target = (sockets as f64 * check_weights.iter().sum::<f64>()).round() as usize;
        let check_counts = largest_remainder(m_target.max(1), &check_weights);
        if check_counts.iter().any(|&c| c == 0) {
            return Err(Error::Parameter(
                "n too small: a check-degree bucket rounded to zero nodes".into(),
            ));
        }
        let mut check_degrees = Vec::with_capacity(m_target);
        for (&(d, _), &count) in dist.rho.iter().zip(&check_counts) {
            check_degrees.extend(std::iter::repeat(d).take(count));
        }
        let dmax = dist.rho.last().unwrap().0;
        let mut have: usize = check_degrees.iter().map(|&d| d as usize).sum();
        while have < sockets {
            let add = dmax.min((sockets - have) as u32).max(1);
            check_degrees.push(add);
            have += add as usize;
        }
        while have > sockets {
            let excess = (have - sockets) as u32;
            let last = check_degrees.last_mut().unwrap();
            if *last > excess {
                *last -= excess;
                have -= excess as usize;
            } else {
                have -= *last as usize;
                check_degrees.pop();
            }
        }
        check_degrees.sort_unstable();
        if check_degrees.first().copied().unwrap_or(0) < 1 {
            return Err(Error::Parameter("check degree rounding failed".into()));
        }
        Self::from_sockets(n, &var_degrees, &check_degrees, seed)
    }

    fn from_sockets(
        n: usize,
        var_degrees: &[u32],
        check_degrees: &[u32],
        seed: u64,
    ) -> Result<Self> {
        let m = check_degrees.len();
        let total: usize = var_degrees.iter().map(|&d| d as usize).sum();
        debug_assert_eq!(
            total,
            check_degrees.iter().map(|&d| d as usize).sum::<usize>()
        );
        let mut sockets: Vec<u32> = Vec::with_capacity(total);
        for (v, &d) in var_degrees.iter().enumerate() {
            sockets.extend(std::iter::repeat(v as u32).take(d as usize));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        'attempt: for _ in 0..64 {
            sockets.shuffle(&mut rng);
            let mut check_vars: Vec<Vec<u32>> = Vec::with_capacity(m);
            let mut offset = 0;
            for &d in check_degrees {
                check_vars.push(sockets[offset..offset + d as usize].to_vec());
                offset += d as usize;
            }
            // Resample double edges by swapping an offender with a random
            // socket of another check.
            let mut rounds = 0;
            loop {
                let mut clean = true;
                for c in 0..m {
                    let dup = {
                        let list = &mut check_vars[c];
                        list.sort_unstable();
                        list.windows(2).position(|w| w[0] == w[1])
                    };
                    if let Some(slot) = dup {
                        clean = false;
                        let c2 = rng.gen_range(0..m);
                        if c2 == c {
                            continue;
                        }
                        let slot2 = rng.gen_range(0..check_vars[c2].len());
                        let a = check_vars[c][slot];
                        let b = check_vars[c2][slot2];
                        if check_vars[c].contains(&b) || check_vars[c2].contains(&a) {
                            continue;
                        }
                        check_vars[c][slot] = b;
                        check_vars[c2][slot2] = a;
                    }
                }
                if clean {
                    break;
                }
                rounds += 1;
                if rounds > 200 {
                    continue 'attempt;
                }
            }
            let mut code = Self::from_check_lists(n, check_vars)?;
            code.remove_four_cycles(&mut rng);
            return Ok(code);
        }
        Err(Error::Parameter(
            "socket matching failed to avoid double edges".into(),
        ))
    }

    /// Best-effort girth-6 repair: while two checks share a pair of
    /// variables, swap one of the offending edges with a random edge
    /// elsewhere, keeping all degrees intact. Bounded rounds.
    fn remove_four_cycles(&mut self, rng: &mut ChaCha8Rng) {
        for _ in 0..40 {
            let offenders = self.four_cycle_edges();
            if offenders.is_empty() {
                break;
            }
            let mut progress = false;
            for (c, v) in offenders {
                // An earlier swap in this round may have moved the edge.
                let Some(slot) = self.check_vars[c as usize].iter().position(|&x| x == v)
                else {
                    continue;
                };
                for _ in 0..30 {
                    let c2 = rng.gen_range(0..self.m);
                    if c2 == c as usize {
                        continue;
                    }
                    let slot2 = rng.gen_range(0..self.check_vars[c2].len());
                    let u = self.check_vars[c2][slot2];
                    if u == v
                        || self.check_vars[c as usize].contains(&u)
                        || self.check_vars[c2].contains(&v)
                    {
                        continue;
                    }
                    self.check_vars[c as usize][slot] = u;
                    self.check_vars[c2][slot2] = v;
                    progress = true;
                    break;
                }
            }
            self.rebuild_var_side();
            if !progress {
                break;
            }
        }
        for list in &mut self.check_vars {
            list.sort_unstable();
        }
        self.rebuild_var_side();
    }

    /// One offending edge per detected 4-cycle (pair of checks sharing
    /// two variables).
    fn four_cycle_edges(&self) -> Vec<(u32, u32)> {
        let mut seen: HashMap<(u32, u32), u32> = HashMap::new();
        let mut offenders = Vec::new();
        for (v, checks) in self.var_checks.iter().enumerate() {
            for i in 0..checks.len() {
                for j in i + 1..checks.len() {
                    let key = (checks[i], checks[j]);
                    if seen.insert(key, v as u32).is_some() {
                        offenders.push((key.1, v as u32));
                    }
                }
            }
        }
        offenders
    }

    fn rebuild_var_side(&mut self) {
        let mut var_checks = vec![Vec::new(); self.n];
        for (c, vars) in self.check_vars.iter().enumerate() {
            for &v in vars {
                var_checks[v as usize].push(c as u32);
            }
        }
        for list in &mut var_checks {
            list.sort_unstable();
        }
        self.var_checks = var_checks;
    }

    /// Builds from explicit per-check variable lists, validating bounds
    /// and rejecting repeated edges.
    pub fn from_check_lists(n: usize, check_vars: Vec<Vec<u32>>) -> Result<Self> {
        let m = check_vars.len();
        let mut sorted = check_vars;
        for list in &mut sorted {
            list.sort_unstable();
            if list.iter().any(|&v| v as usize >= n) {
                return Err(Error::Parameter("check references variable out of range".into()));
            }
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parameter("repeated edge in check".into()));
            }
        }
        let mut code = Self {
            n,
            m,
            check_vars: sorted,
            var_checks: Vec::new(),
        };
        code.rebuild_var_side();
        Ok(code)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of checks (nominal syndrome length).
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rate(&self) -> f64 {
        (self.n - self.m) as f64 / self.n as f64
    }

    pub fn check_vars(&self) -> &[Vec<u32>] {
        &self.check_vars
    }

    pub fn var_checks(&self) -> &[Vec<u32>] {
        &self.var_checks
    }

    pub fn edge_count(&self) -> usize {
        self.check_vars.iter().map(Vec::len).sum()
    }

    /// Histogram of variable degrees (index = degree).
    pub fn var_degree_hist(&self) -> Vec<usize> {
        let dmax = self.var_checks.iter().map(Vec::len).max().unwrap_or(0);
        let mut hist = vec![0; dmax + 1];
        for list in &self.var_checks {
            hist[list.len()] += 1;
        }
        hist
    }

    pub fn check_degree_hist(&self) -> Vec<usize> {
        let dmax = self.check_vars.iter().map(Vec::len).max().unwrap_or(0);
        let mut hist = vec![0; dmax + 1];
        for list in &self.check_vars {
            hist[list.len()] += 1;
        }
        hist
    }

    /// Sparse syndrome `H x^t`.
    pub fn syndrome(&self, x: &BitWord) -> BitWord {
        assert_eq!(x.len(), self.n, "syndrome of word with wrong length");
        let mut s = BitWord::zeros(self.m);
        for (c, vars) in self.check_vars.iter().enumerate() {
            let parity = vars.iter().fold(false, |acc, &v| acc ^ x.get(v as usize));
            if parity {
                s.set(c, true);
            }
        }
        s
    }

    /// Dense lift of the parity-check structure.
    pub fn dense_parity(&self) -> Gf2Matrix {
        let mut h = Gf2Matrix::zeros(self.m, self.n);
        for (c, vars) in self.check_vars.iter().enumerate() {
            for &v in vars {
                h.set(c, v as usize, true);
            }
        }
        h
    }

    /// Information positions for systematic key extraction: the columns
    /// outside the pivot set of the dense lift. When the lift is
    /// rank-deficient the dependent checks are dropped and the effective
    /// syndrome length reported.
    pub fn systematic_lift(&self) -> SystematicLift {
        let (_, pivots) = self.dense_parity().rref();
        let mut is_pivot = vec![false; self.n];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        SystematicLift {
            info_positions: (0..self.n).filter(|&c| !is_pivot[c]).collect(),
            m_effective: pivots.len(),
        }
    }

    /// Serializes in the conventional alist layout: sizes, maximum
    /// degrees, per-node degree lists, then 1-based adjacency lines
    /// padded with zeros to the maximum degree.
    pub fn to_alist(&self) -> String {
        let dv_max = self.var_checks.iter().map(Vec::len).max().unwrap_or(0);
        let dc_max = self.check_vars.iter().map(Vec::len).max().unwrap_or(0);
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m);
        let _ = writeln!(s, "{dv_max} {dc_max}");
        let degrees = |lists: &[Vec<u32>]| {
            lists
                .iter()
                .map(|l| l.len().to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        let _ = writeln!(s, "{}", degrees(&self.var_checks));
        let _ = writeln!(s, "{}", degrees(&self.check_vars));
        let lines = |lists: &[Vec<u32>], width: usize, out: &mut String| {
            for list in lists {
                let mut row: Vec<String> =
                    list.iter().map(|&x| (x + 1).to_string()).collect();
                row.resize(width, "0".to_string());
                let _ = writeln!(out, "{}", row.join(" "));
            }
        };
        lines(&self.var_checks, dv_max, &mut s);
        lines(&self.check_vars, dc_max, &mut s);
        s
    }

    pub fn from_alist(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut ints = |expect: usize| -> Result<Vec<usize>> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("truncated alist".into()))?;
            let vals = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad alist integer {t:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if expect > 0 && vals.len() != expect {
                return Err(Error::Parse(format!(
                    "alist line has {} fields, expected {expect}",
                    vals.len()
                )));
            }
            Ok(vals)
        };
        let header = ints(2)?;
        let (n, m) = (header[0], header[1]);
        let _max_degrees = ints(2)?;
        let var_degrees = ints(n)?;
        let check_degrees = ints(m)?;
        let mut read_adjacency = |degrees: &[usize], limit: usize| -> Result<Vec<Vec<u32>>> {
            degrees
                .iter()
                .map(|&d| {
                    let row = ints(0)?;
                    let mut list: Vec<u32> = row
                        .into_iter()
                        .filter(|&x| x != 0)
                        .map(|x| (x - 1) as u32)
                        .collect();
                    if list.len() != d {
                        return Err(Error::Parse(format!(
                            "adjacency row has {} entries, degree says {d}",
                            list.len()
                        )));
                    }
                    if list.iter().any(|&x| x as usize >= limit) {
                        return Err(Error::Parse("alist index out of range".into()));
                    }
                    list.sort_unstable();
                    Ok(list)
                })
                .collect()
        };
        let var_checks = read_adjacency(&var_degrees, m)?;
        let check_vars = read_adjacency(&check_degrees, n)?;
        let code = Self::from_check_lists(n, check_vars)?;
        if code.var_checks != var_checks {
            return Err(Error::Parse(
                "alist variable and check adjacency are inconsistent".into(),
            ));
        }
        Ok(code)
    }
}

/// Result of reducing the dense lift to systematic form.
#[derive(Clone, Debug)]
pub struct SystematicLift {
    /// Positions whose bits index a word within its coset, ascending.
    pub info_positions: Vec<usize>,
    /// Rank of the parity-check structure.
    pub m_effective: usize,
}

/// Apportions `total` into integer counts proportional to `weights`
/// (largest-remainder rounding; ties broken toward earlier entries).
fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let sum: f64 = weights.iter().sum();
    let quotas: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|&q| q.floor() as usize).collect();
    let mut short = total - counts.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = quotas[a] - quotas[a].floor();
        let fb = quotas[b] - quotas[b].floor();
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if short == 0 {
            break;
        }
        counts[i] += 1;
        short -= 1;
    }
    counts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_construction() {
        let code = LdpcCode::regular(12, 3, 6, 5).unwrap();
        assert_eq!(code.m(), 6);
        assert_eq!(code.edge_count(), 36);
        assert!(code.var_checks().iter().all(|l| l.len() == 3));
        assert!(code.check_vars().iter().all(|l| l.len() == 6));
        // Determinism.
        assert_eq!(code, LdpcCode::regular(12, 3, 6, 5).unwrap());
        assert_ne!(code, LdpcCode::regular(12, 3, 6, 6).unwrap());
        // Divisibility violation.
        assert!(LdpcCode::regular(10, 3, 4, 0).is_err());
        assert!(LdpcCode::regular(12, 1, 4, 0).is_err());
    }

    #[test]
    fn adjacency_is_consistent() {
        let code = LdpcCode::regular(120, 3, 6, 1).unwrap();
        for (c, vars) in code.check_vars().iter().enumerate() {
            assert!(vars.windows(2).all(|w| w[0] < w[1]), "unsorted or repeated");
            for &v in vars {
                assert!(code.var_checks()[v as usize].contains(&(c as u32)));
            }
        }
        for (v, checks) in code.var_checks().iter().enumerate() {
            for &c in checks {
                assert!(code.check_vars()[c as usize].contains(&(v as u32)));
            }
        }
    }

    #[test]
    fn four_cycles_removed_at_scale() {
        let code = LdpcCode::regular(1000, 3, 6, 7).unwrap();
        assert!(code.four_cycle_edges().is_empty());
    }

    #[test]
    fn irregular_profile_accepted() {
        let dist = DegreeDistribution::rate_half_profile();
        assert!((dist.design_rate() - 0.5).abs() < 1e-4);
        assert!(DegreeDistribution::new(
            vec![(2, 0.5), (3, 0.4)],
            vec![(6, 1.0)]
        )
        .is_err());
    }

    #[test]
    fn irregular_construction_rate() {
        let dist = DegreeDistribution::rate_half_profile();
        let code = LdpcCode::irregular(1000, &dist, 3).unwrap();
        let rate = code.rate();
        assert!((rate - 0.5).abs() < 0.01, "rate = {rate}");
        // Socket balance holds exactly.
        let var_sockets: usize = code.var_checks().iter().map(Vec::len).sum();
        let check_sockets: usize = code.check_vars().iter().map(Vec::len).sum();
        assert_eq!(var_sockets, check_sockets);
        // Variable-degree histogram follows the profile: degree-2 nodes
        // are lambda_2/2 / sum(lambda_i/i) of all nodes.
        let hist = code.var_degree_hist();
        let frac2 = hist[2] as f64 / 1000.0;
        assert!((frac2 - 0.234029 / 2.0 / 0.242188).abs() < 0.01, "{frac2}");
        assert_eq!(code, LdpcCode::irregular(1000, &dist, 3).unwrap());
        assert!(LdpcCode::irregular(10, &dist, 0).is_err());
    }

    #[test]
    fn alist_round_trip() {
        for code in [
            LdpcCode::regular(24, 3, 6, 2).unwrap(),
            LdpcCode::irregular(200, &DegreeDistribution::rate_half_profile(), 9).unwrap(),
        ] {
            let text = code.to_alist();
            let back = LdpcCode::from_alist(&text).unwrap();
            assert_eq!(back, code);
            assert_eq!(back.to_alist(), text);
        }
        assert!(LdpcCode::from_alist("4 2\n").is_err());
    }

    #[test]
    fn systematic_lift_full_rank_case() {
        let code = LdpcCode::regular(60, 3, 6, 11).unwrap();
        let lift = code.systematic_lift();
        assert_eq!(lift.info_positions.len(), code.n() - lift.m_effective);
        assert!(lift.m_effective <= code.m());
        // Distinct codewords have distinct information segments: x and y
        // in the same coset differ by a codeword, and a codeword with
        // zero information bits is zero.
        let h = code.dense_parity();
        let (rref, pivots) = h.rref();
        let _ = (rref, pivots);
    }

    #[test]
    fn largest_remainder_apportionment() {
        assert_eq!(largest_remainder(10, &[0.5, 0.5]), vec![5, 5]);
        assert_eq!(largest_remainder(7, &[0.5, 0.25, 0.25]), vec![3, 2, 2]);
        let counts = largest_remainder(1000, &[0.117, 0.071, 0.024, 0.015, 0.015]);
        assert_eq!(counts.iter().sum::<usize>(), 1000);
    }
}
