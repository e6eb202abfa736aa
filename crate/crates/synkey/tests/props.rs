//! Property tests for the algebraic invariants that every module relies
//! on: coset-invariant syndromes, systematic-form correctness, index
//! bijectivity, and format round-trips.

use proptest::prelude::*;

use synkey::gf2::{BitWord, Gf2Matrix};
use synkey::ldpc::LdpcCode;
use synkey::lincode::{CosetTable, LinearCode};

fn arb_word(n: usize) -> impl Strategy<Value = BitWord> {
    prop::collection::vec(any::<bool>(), n).prop_map(|bits| {
        let mut w = BitWord::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            w.set(i, b);
        }
        w
    })
}

proptest! {
    #[test]
    fn xor_is_associative_and_commutative(
        a in arb_word(24),
        b in arb_word(24),
        c in arb_word(24),
    ) {
        prop_assert_eq!(&(&a ^ &b) ^ &c, &a ^ &(&b ^ &c));
        prop_assert_eq!(&a ^ &b, &b ^ &a);
    }

    #[test]
    fn syndrome_is_coset_invariant(
        seed in 0u64..1000,
        x in arb_word(12),
        u in 0u64..64,
    ) {
        // P (x ^ c) == P x for every codeword c.
        let code = LinearCode::sample_random(12, 6, seed).unwrap();
        let c = code.word_from_index(0, u);
        prop_assert_eq!(code.syndrome(&(&x ^ &c)), code.syndrome(&x));
    }

    #[test]
    fn coset_index_is_a_bijection(seed in 0u64..200, v in 0u64..4096) {
        let code = LinearCode::sample_random(12, 5, seed).unwrap();
        let x = BitWord::from_lsb_u64(v, 12);
        let ci = code.coset_index(&x).unwrap();
        prop_assert_eq!(code.word_from_index(ci.coset, ci.index), x);
    }

    #[test]
    fn reconstruction_stays_in_the_coset(
        seed in 0u64..100,
        x1 in arb_word(10),
        x2 in arb_word(10),
    ) {
        let code = LinearCode::sample_random(10, 4, seed).unwrap();
        let table = CosetTable::build(&code).unwrap();
        let s1 = code.syndrome(&x1);
        let rec = table.sw_reconstruct(&code, &x2, &s1, 0.05).unwrap();
        prop_assert_eq!(code.syndrome(&rec), s1);
        prop_assert_eq!(
            code.coset_index(&rec).unwrap().coset,
            code.coset_index(&x1).unwrap().coset
        );
    }

    #[test]
    fn systematic_form_preserves_row_space(rows in 2usize..6, seed in 0u64..500) {
        let cols = rows + 3;
        let mut rng_state = seed;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            rng_state >> 33
        };
        let mut m = Gf2Matrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, next() & 1 == 1);
            }
        }
        match m.to_systematic() {
            Err(_) => {
                // Rank-deficient draw; nothing to check.
            }
            Ok((sys, perm)) => {
                // Identity block in the trailing columns.
                for i in 0..rows {
                    for j in 0..rows {
                        prop_assert_eq!(sys.get(i, cols - rows + j), i == j);
                    }
                }
                // Mutual row-space membership through the permutation.
                for i in 0..rows {
                    prop_assert!(m.row_space_contains(&perm.apply_inverse(sys.row(i))));
                    prop_assert!(sys.row_space_contains(&perm.apply(m.row(i))));
                }
            }
        }
    }

    #[test]
    fn leader_decodes_itself(seed in 0u64..50, s_val in 0u64..16) {
        // f_P(P v^t) == v whenever v is a coset leader.
        let code = LinearCode::sample_random(10, 4, seed).unwrap();
        let table = CosetTable::build(&code).unwrap();
        let s = BitWord::from_lsb_u64(s_val, 4);
        let leader = table.leader(&s);
        let resynd = code.syndrome(&leader);
        prop_assert_eq!(&resynd, &s);
        prop_assert_eq!(table.ml_decode_noise(&resynd, 0.1).unwrap(), leader);
    }

    #[test]
    fn alist_round_trips(n in 24usize..60, seed in 0u64..50) {
        let n = n - n % 2; // keep n * 3 divisible by 6
        let code = LdpcCode::regular(n, 3, 6, seed).unwrap();
        let back = LdpcCode::from_alist(&code.to_alist()).unwrap();
        prop_assert_eq!(back, code);
    }

    #[test]
    fn code_text_round_trips(n in 4usize..12, seed in 0u64..100) {
        let m = n / 2;
        let code = LinearCode::sample_random(n, m, seed).unwrap();
        let back = LinearCode::from_text(&code.to_text()).unwrap();
        prop_assert_eq!(back.profile(), code.profile());
    }
}

#[test]
fn ml_identity_exhaustive_n10() {
    // Weighted decoding failure of the reconstruction step equals the
    // closed-form error probability, exhaustively over noise words.
    use synkey::exact::Dyadic;
    let code = LinearCode::sample_random(10, 4, 7).unwrap();
    let table = CosetTable::build(&code).unwrap();
    let p = 0.07;
    let pd = Dyadic::from_f64(p);
    let qd = Dyadic::one().sub(&pd);
    let mut failure = Dyadic::zero();
    for v in 0u64..1 << 10 {
        let noise = BitWord::from_lsb_u64(v, 10);
        let s = code.syndrome(&noise);
        if table.ml_decode_noise(&s, p).unwrap() != noise {
            failure = failure.add(
                &pd.pow(noise.weight())
                    .mul(&qd.pow(10 - noise.weight())),
            );
        }
    }
    assert_eq!(failure, table.ml_error_prob_exact(p));
}
