//! Syndrome belief propagation: sum-product decoding of the noise word
//! `v` with `H v^t = s` under i.i.d. Bernoulli(`p`) noise.

use crate::error::{Error, Result};
use crate::gf2::BitWord;

use super::LdpcCode;

/// Decoder settings. Messages and posteriors are clamped to
/// `[-clamp, clamp]`; the threshold is echoed into every outcome.
#[derive(Clone, Copy, Debug)]
pub struct BpConfig {
    pub max_iter: u32,
    pub clamp: f64,
}

impl Default for BpConfig {
    fn default() -> Self {
        Self {
            max_iter: 60,
            clamp: 25.0,
        }
    }
}

/// Decoding result. `converged` means the hard decision's syndrome
/// matched the target within the iteration budget; a `false` value is a
/// reported failure, never silently accepted.
#[derive(Clone, Debug)]
pub struct BpOutcome {
    pub estimate: BitWord,
    pub converged: bool,
    pub iterations: u32,
    pub clamp: f64,
}

/// Runs sum-product message passing for the noise word with syndrome `s`.
///
/// Channel log-likelihood ratio per bit is `ln((1-p)/p)`; check updates
/// carry the syndrome bit as a sign. Iteration stops as soon as the hard
/// decision satisfies the syndrome. A bit whose posterior is exactly zero
/// decides to 0. Deterministic in all inputs.
pub fn bp_syndrome_decode(
    code: &LdpcCode,
    s: &BitWord,
    p: f64,
    cfg: &BpConfig,
) -> Result<BpOutcome> {
    if !(0.0 < p && p < 0.5) {
        return Err(Error::Domain(format!(
            "crossover probability must lie in (0, 1/2), got {p}"
        )));
    }
    if s.len() != code.m() {
        return Err(Error::Dimension(format!(
            "syndrome length {} != m = {}",
            s.len(),
            code.m()
        )));
    }
    let n = code.n();
    let clamp = |x: f64| x.clamp(-cfg.clamp, cfg.clamp);

    // Flat edge layout, check-major: edge e connects check_of[e] to
    // var_of[e]; var_edges[v] lists the edges of variable v.
    let edge_count = code.edge_count();
    let mut var_of = Vec::with_capacity(edge_count);
    let mut check_start = Vec::with_capacity(code.m() + 1);
    let mut var_edges: Vec<Vec<u32>> = vec![Vec::new(); n];
    for vars in code.check_vars() {
        check_start.push(var_of.len());
        for &v in vars {
            var_edges[v as usize].push(var_of.len() as u32);
            var_of.push(v);
        }
    }
    check_start.push(var_of.len());

    let llr0 = ((1.0 - p) / p).ln();
    let mut v2c = vec![llr0; edge_count];
    let mut c2v = vec![0.0f64; edge_count];
    let mut posterior = vec![llr0; n];
    let mut estimate = BitWord::zeros(n);

    let mut iterations = 0;
    loop {
        for (v, &post) in posterior.iter().enumerate() {
            estimate.set(v, post < 0.0);
        }
        if code.syndrome(&estimate) == *s {
            return Ok(BpOutcome {
                estimate,
                converged: true,
                iterations,
                clamp: cfg.clamp,
            });
        }
        if iterations == cfg.max_iter {
            return Ok(BpOutcome {
                estimate,
                converged: false,
                iterations,
                clamp: cfg.clamp,
            });
        }
        iterations += 1;

        // Check pass: exclude-one products of tanh(m/2) via prefix and
        // suffix sweeps, sign flipped by the syndrome bit.
        for c in 0..code.m() {
            let (lo, hi) = (check_start[c], check_start[c + 1]);
            let sign = if s.get(c) { -1.0 } else { 1.0 };
            let mut prefix = sign;
            for e in lo..hi {
                c2v[e] = prefix;
                prefix *= (v2c[e] / 2.0).tanh();
            }
            let mut suffix = 1.0f64;
            for e in (lo..hi).rev() {
                c2v[e] = clamp(2.0 * (c2v[e] * suffix).atanh());
                suffix *= (v2c[e] / 2.0).tanh();
            }
        }

        // Variable pass: posterior and leave-one-out messages.
        for v in 0..n {
            let mut total = llr0;
            for &e in &var_edges[v] {
                total += c2v[e as usize];
            }
            posterior[v] = clamp(total);
            for &e in &var_edges[v] {
                v2c[e as usize] = clamp(total - c2v[e as usize]);
            }
        }
    }
}
