//! End-to-end key generation for the four models: public transcript
//! assembly, per-terminal reconstruction, and key extraction.
//!
//! Every protocol is a pure function of its inputs and seeds; the
//! exhaustive audits rely on that. Fallback randomness (models 2 and 4)
//! is private per terminal, derived from `(seed, terminal)`: terminals do
//! not share it, so fallback keys disagree, but they stay independent of
//! the observations and the transcript.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf2::BitWord;
use crate::lincode::{CosetTable, LinearCode};
use crate::seeding::terminal_seed;
use crate::sources::TreeTopology;
use crate::typicality::RegularPartition;

/// A public message: a syndrome, or a whole revealed observation
/// (helper terminal of model 4 only).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MessageKind {
    Syndrome,
    Reveal,
}

impl MessageKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MessageKind::Syndrome => "syndrome",
            MessageKind::Reveal => "reveal",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Message {
    pub terminal: usize,
    pub kind: MessageKind,
    pub word: BitWord,
}

/// Everything the eavesdropper sees, in transmission order.
#[derive(Clone, Debug, Default)]
pub struct Transcript {
    pub messages: Vec<Message>,
}

impl Transcript {
    /// One line per message: `terminal-id kind hex-bits`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for msg in &self.messages {
            s.push_str(&format!(
                "{} {} {}\n",
                msg.terminal,
                msg.kind.as_str(),
                msg.word.to_hex()
            ));
        }
        s
    }
}

/// Per-terminal keys, all in `[0, key_range)`.
#[derive(Clone, Debug)]
pub struct KeyOutcome {
    pub keys: Vec<u64>,
    pub key_range: u64,
    pub fallback_used: Vec<bool>,
}

impl KeyOutcome {
    pub fn all_equal(&self) -> bool {
        self.keys.windows(2).all(|w| w[0] == w[1])
    }
}

fn check_word(code: &LinearCode, x: &BitWord, what: &str) -> Result<()> {
    if x.len() != code.n() {
        return Err(Error::Dimension(format!(
            "{what} has length {}, code expects n = {}",
            x.len(),
            code.n()
        )));
    }
    Ok(())
}

/// Uniform terminals: terminal 1 communicates its syndrome, terminal 2
/// reconstructs by coset decoding, and both take the within-coset index
/// of their word as the key. Key range is `2^(n-m)`.
pub fn run_model1(
    code: &LinearCode,
    table: &CosetTable,
    x1: &BitWord,
    x2: &BitWord,
    p: f64,
) -> Result<(KeyOutcome, Transcript)> {
    check_word(code, x1, "x1")?;
    check_word(code, x2, "x2")?;
    let s1 = code.syndrome(x1);
    let rec = table.sw_reconstruct(code, x2, &s1, p)?;
    let k1 = code.coset_index(x1)?.index;
    let k2 = code.coset_index(&rec)?.index;
    let transcript = Transcript {
        messages: vec![Message {
            terminal: 1,
            kind: MessageKind::Syndrome,
            word: s1,
        }],
    };
    Ok((
        KeyOutcome {
            keys: vec![k1, k2],
            key_range: 1 << code.k(),
            fallback_used: vec![false, false],
        },
        transcript,
    ))
}

fn partition_key(
    partition: &RegularPartition,
    word: &BitWord,
    seed: u64,
    terminal: usize,
) -> (u64, bool) {
    match partition.key_of(word) {
        Some(k) => (k, false),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(terminal_seed(seed, terminal));
            (rng.gen_range(0..partition.l()), true)
        }
    }
}

/// Nonuniform terminals: same syndrome step as model 1, but keys index
/// the reconstructed word inside its regular subset; residual words get a
/// private uniform fallback key. Key range is the partition's `L`.
pub fn run_model2(
    code: &LinearCode,
    table: &CosetTable,
    partition: &RegularPartition,
    x1: &BitWord,
    x2: &BitWord,
    p: f64,
    seed: u64,
) -> Result<(KeyOutcome, Transcript)> {
    check_word(code, x1, "x1")?;
    check_word(code, x2, "x2")?;
    if partition.model_id() != 2 || partition.n() != code.n() {
        return Err(Error::Parameter(
            "partition was not built for this code and model".into(),
        ));
    }
    let s1 = code.syndrome(x1);
    let rec = table.sw_reconstruct(code, x2, &s1, p)?;
    let (k1, f1) = partition_key(partition, x1, seed, 1);
    let (k2, f2) = partition_key(partition, &rec, seed, 2);
    let transcript = Transcript {
        messages: vec![Message {
            terminal: 1,
            kind: MessageKind::Syndrome,
            word: s1,
        }],
    };
    Ok((
        KeyOutcome {
            keys: vec![k1, k2],
            key_range: partition.l(),
            fallback_used: vec![f1, f2],
        },
        transcript,
    ))
}

/// Markov chain on a tree: every terminal communicates its syndrome; each
/// terminal reconstructs the designated root terminal's word hop by hop
/// along its tree path, applying the coset-leader decoder to the XOR of
/// adjacent syndromes, and keys are within-coset indices of the root
/// estimates. The shared code must be built for the worst edge; quieter
/// edges only decode better.
pub fn run_model3(
    code: &LinearCode,
    table: &CosetTable,
    tree: &TreeTopology,
    words: &[BitWord],
) -> Result<(KeyOutcome, Transcript)> {
    let d = tree.d();
    if words.len() != d {
        return Err(Error::Parameter(format!(
            "expected {d} terminal words, got {}",
            words.len()
        )));
    }
    for (i, x) in words.iter().enumerate() {
        check_word(code, x, &format!("x{}", i + 1))?;
    }
    let p_max = tree.p_max();
    let syndromes: Vec<BitWord> = words.iter().map(|x| code.syndrome(x)).collect();
    let root = tree.root();
    let mut keys = Vec::with_capacity(d);
    for i in 1..=d {
        let estimate = if i == root {
            words[root - 1].clone()
        } else {
            let path = tree.path(i, root)?;
            let mut est = words[i - 1].clone();
            for hop in path.windows(2) {
                let delta = &syndromes[hop[0] - 1] ^ &syndromes[hop[1] - 1];
                est.xor_in_place(&table.ml_decode_noise(&delta, p_max)?);
            }
            est
        };
        keys.push(code.coset_index(&estimate)?.index);
    }
    let transcript = Transcript {
        messages: syndromes
            .into_iter()
            .enumerate()
            .map(|(i, word)| Message {
                terminal: i + 1,
                kind: MessageKind::Syndrome,
                word,
            })
            .collect(),
    };
    Ok((
        KeyOutcome {
            keys,
            key_range: 1 << code.k(),
            fallback_used: vec![false; d],
        },
        transcript,
    ))
}

/// Private key against a helper: terminal 3 reveals its word, terminal 1
/// communicates its syndrome, terminal 2 reconstructs terminal 1's word
/// from `x2 ^ x3`, and keys index the words inside the conditional
/// regular subsets built for the revealed `x3`.
pub fn run_model4(
    code: &LinearCode,
    table: &CosetTable,
    partition: &RegularPartition,
    x1: &BitWord,
    x2: &BitWord,
    x3: &BitWord,
    p: f64,
    seed: u64,
) -> Result<(KeyOutcome, Transcript)> {
    check_word(code, x1, "x1")?;
    check_word(code, x2, "x2")?;
    check_word(code, x3, "x3")?;
    if partition.model_id() != 4 || partition.conditioning_word() != Some(x3) {
        return Err(Error::Parameter(
            "partition was not built for this model and revealed word".into(),
        ));
    }
    let s1 = code.syndrome(x1);
    let side = x2 ^ x3;
    let rec = table.sw_reconstruct(code, &side, &s1, p)?;
    let (k1, f1) = partition_key(partition, x1, seed, 1);
    let (k2, f2) = partition_key(partition, &rec, seed, 2);
    let transcript = Transcript {
        messages: vec![
            Message {
                terminal: 3,
                kind: MessageKind::Reveal,
                word: x3.clone(),
            },
            Message {
                terminal: 1,
                kind: MessageKind::Syndrome,
                word: s1,
            },
        ],
    };
    Ok((
        KeyOutcome {
            keys: vec![k1, k2],
            key_range: partition.l(),
            fallback_used: vec![f1, f2],
        },
        transcript,
    ))
}
