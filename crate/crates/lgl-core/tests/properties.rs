//! Randomized invariants tying the fast paths to first principles.
//!
//! Everything here re-derives its expectation from scratch: modular terms,
//! trial division, exact bigints. No fixture may call the code path it is
//! checking.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use lgl_core::arith::{factor_u64, gcd_u64, jacobi, powmod, primes_up_to};
use lgl_core::lucas::LucasParams;
use lgl_core::sieve::RankTable;
use lgl_core::{construct, moments, rank, smooth, torus, Error};

fn params_pool() -> &'static [LucasParams] {
    static POOL: OnceLock<Vec<LucasParams>> = OnceLock::new();
    POOL.get_or_init(|| {
        [(1, 1), (2, 1), (3, -1), (1, 2), (5, -2), (3, 2)]
            .iter()
            .map(|&(a1, a2)| LucasParams::new(a1, a2).unwrap())
            .collect()
    })
}

fn arb_params() -> impl Strategy<Value = LucasParams> {
    (0usize..params_pool().len()).prop_map(|i| params_pool()[i])
}

fn fib_table() -> &'static RankTable {
    static TABLE: OnceLock<RankTable> = OnceLock::new();
    TABLE.get_or_init(|| RankTable::build(&LucasParams::fibonacci(), 2000).unwrap())
}

fn coprime_to_a2(p: &LucasParams, m: u64) -> bool {
    gcd_u64(m, p.a2.unsigned_abs()) == 1
}

fn divides_term(p: &LucasParams, m: u64, n: u64) -> bool {
    p.term_mod(n, m).unwrap().value == 0
}

proptest! {
    #[test]
    fn recurrence_holds(p in arb_params(), n in 2u64..400) {
        let (a1, a2) = (BigInt::from(p.a1), BigInt::from(p.a2));
        let expect = &a1 * p.term(n - 1).unwrap() + &a2 * p.term(n - 2).unwrap();
        prop_assert_eq!(p.term(n).unwrap(), expect);
    }

    #[test]
    fn nondegenerate_terms_are_nonzero(p in arb_params(), n in 2u64..400) {
        prop_assert!(!p.term(n).unwrap().is_zero());
    }

    #[test]
    fn term_mod_matches_bigint(p in arb_params(), n in 0u64..500, m in 1u64..1_000_000) {
        let exact = p.term(n).unwrap().mod_floor(&BigInt::from(m));
        let fast = p.term_mod(n, m).unwrap().value;
        prop_assert_eq!(BigInt::from(fast), exact);
    }

    #[test]
    fn term_mod_big_matches_u64(p in arb_params(), n in 0u64..2000, m in 1u64..1_000_000) {
        let big = p.term_mod_big(&BigUint::from(n), &BigUint::from(m)).unwrap();
        let small = p.term_mod(n, m).unwrap().value;
        prop_assert_eq!(big, BigUint::from(small));
    }

    #[test]
    fn jacobi_is_multiplicative(a in -200i64..200, b in -200i64..200, k in 0u64..500) {
        let m = 2 * k + 1;
        let lhs = jacobi(a.saturating_mul(b), m).unwrap();
        let rhs = jacobi(a, m).unwrap() * jacobi(b, m).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi_matches_euler_criterion(a in -300i64..300, idx in 1usize..100) {
        let p = primes_up_to(541)[idx]; // odd primes up to the 100th
        let sym = jacobi(a, p).unwrap();
        let residue = powmod(a.rem_euclid(p as i64) as u64, (p - 1) / 2, p);
        let expect: i64 = if residue == 0 { 0 } else if residue == 1 { 1 } else { -1 };
        prop_assert_eq!(sym as i64, expect);
    }
}

// Divisibility structure of u_n: the seven clauses of the rank lemma.
proptest! {
    #[test]
    fn lemma_i_divisibility_index_set(p in arb_params(), m in 1u64..1500, n in 1u64..1500) {
        let divides = divides_term(&p, m, n);
        if coprime_to_a2(&p, m) {
            let z = rank::rank(&p, m).unwrap().z;
            prop_assert_eq!(divides, n % z == 0, "m={} n={} z={}", m, n, z);
        } else {
            prop_assert!(!divides, "m={} shares a factor with a2; it divides no term", m);
        }
    }

    #[test]
    fn lemma_ii_rank_divides_rank(p in arb_params(), m in 1u64..400, k in 1u64..6) {
        let n = m * k;
        prop_assume!(coprime_to_a2(&p, m * n));
        let zm = rank::rank(&p, m).unwrap().z;
        let zn = rank::rank(&p, n).unwrap().z;
        prop_assert_eq!(zn % zm, 0);
    }

    #[test]
    fn lemma_iii_prime_rank_divides_shift(p in arb_params(), idx in 1usize..300) {
        let q = primes_up_to(2000)[idx];
        prop_assume!((p.delta.rem_euclid(q as i64)) != 0 && (p.a2.rem_euclid(q as i64)) != 0);
        let z = rank::rank_prime(&p, q).unwrap().z;
        let eps = jacobi(p.delta, q).unwrap() as i64;
        prop_assert_eq!((q as i64 - eps) % z as i64, 0, "z({}) = {} must divide {}", q, z, q as i64 - eps);
    }

    #[test]
    fn lemma_iv_prime_power_rank_shape(p in arb_params(), idx in 0usize..46, k in 1u32..4) {
        let q = primes_up_to(200)[idx];
        prop_assume!(coprime_to_a2(&p, q));
        let zq = rank::rank_prime(&p, q).unwrap().z;
        let zqk = rank::rank_prime_power(&p, q, k).unwrap().z;
        prop_assert_eq!(zqk % zq, 0);
        let mut ratio = zqk / zq;
        let mut e = 0u32;
        while ratio % q == 0 {
            ratio /= q;
            e += 1;
        }
        prop_assert_eq!(ratio, 1, "z(q^k)/z(q) must be a power of q");
        prop_assert!(e < k, "exponent {} must stay below {}", e, k);
    }

    #[test]
    fn lemma_v_ell_of_prime_powers(p in arb_params(), idx in 0usize..15, k in 1u32..4) {
        let q = primes_up_to(50)[idx];
        prop_assume!(coprime_to_a2(&p, q));
        let ell = rank::ell(&p, q.pow(k)).unwrap();
        if p.delta.rem_euclid(q as i64) == 0 {
            prop_assert_eq!(ell, q.pow(k));
        } else {
            let zq = rank::rank_prime(&p, q).unwrap().z;
            prop_assert_eq!(ell, q.pow(k) * zq);
        }
    }

    #[test]
    fn lemma_vi_g_divides_g(p in arb_params(), m in 1u64..1000, k in 1u64..5) {
        let gm = rank::g_of(&p, m);
        let gn = rank::g_of(&p, m * k);
        prop_assert_eq!(gn % gm, 0, "g({}) = {} must divide g({}) = {}", m, gm, m * k, gn);
    }

    #[test]
    fn lemma_vii_g_multiples_are_ell_multiples(p in arb_params(), n in 1u64..300, m in 1u64..3000) {
        let n_divides = rank::g_of(&p, m) % n == 0;
        if coprime_to_a2(&p, n) {
            let ell = rank::ell(&p, n).unwrap();
            prop_assert_eq!(n_divides, m % ell == 0, "n={} m={} ell={}", n, m, ell);
        } else {
            prop_assert!(!n_divides);
        }
    }

    #[test]
    fn quotient_divides_g_iff_rank_condition(p in arb_params(), n in 1u64..2000, pick in 0usize..64) {
        let divisors: Vec<u64> = (1..=n).filter(|k| n % k == 0).collect();
        let d = n / divisors[pick % divisors.len()];
        let in_g = rank::g_of(&p, n) % d == 0;
        match rank::rank(&p, d) {
            Ok(r) => prop_assert_eq!(in_g, n % r.z == 0, "d={} z={}", d, r.z),
            Err(Error::RankUndefined { .. }) => prop_assert!(!in_g),
            Err(e) => return Err(TestCaseError::fail(format!("{e}"))),
        }
    }

    #[test]
    fn rank_membership_characterizes_bz(p in arb_params(), n in 1u64..1500, zc in 1u64..200) {
        // n has rank zc  iff  n | u_zc and n misses every maximal divisor
        let direct = divides_term(&p, n, zc)
            && factor_u64(zc).iter().all(|&(q, _)| !divides_term(&p, n, zc / q));
        let via_rank = matches!(rank::rank(&p, n), Ok(r) if r.z == zc);
        prop_assert_eq!(direct, via_rank);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_postconditions(p in arb_params(), m in 1u64..3000) {
        let squarefree: u64 = factor_u64(m).iter().map(|&(q, _)| q).product();
        let (m1, m2) = rank::split_coprime_rank(&p, squarefree).unwrap();
        let mut reduced = squarefree;
        for (q, _) in factor_u64(squarefree) {
            if q == 2
                || p.delta.rem_euclid(q as i64) == 0
                || p.a2.rem_euclid(q as i64) == 0
            {
                reduced /= q;
            }
        }
        prop_assert_eq!(m1 * m2, reduced);
        let z1 = rank::rank(&p, m1).unwrap().z;
        prop_assert_eq!(gcd_u64(m1, z1), 1);
        prop_assert!(2 * m1 * m1 >= reduced, "m1={} reduced={}", m1, reduced);
    }

    #[test]
    fn table_agrees_with_single_shot(n in 1u64..2000) {
        let t = fib_table();
        let p = t.params;
        prop_assert_eq!(t.z[n as usize], rank::rank(&p, n).unwrap().z);
        prop_assert_eq!(t.g[n as usize], rank::g_of(&p, n));
        prop_assert_eq!(t.omega[n as usize] as usize, factor_u64(n).len());
    }

    #[test]
    fn moment_sums_match_brute(x in 1u64..2000, lambda in 1u32..4) {
        let t = fib_table();
        let fast = moments::moment_sum(t, x, lambda).unwrap();
        let mut brute = BigUint::zero();
        for n in 1..=x {
            brute += BigUint::from(rank::g_of(&t.params, n)).pow(lambda);
        }
        prop_assert_eq!(fast, brute);
    }

    #[test]
    fn tail_counts_match_brute(x in 1u64..2000, y in 0u64..300) {
        let t = fib_table();
        let fast = moments::tail_count(t, x, y as f64).unwrap();
        let brute = (1..=x).filter(|&n| rank::g_of(&t.params, n) as f64 > y as f64).count() as u64;
        prop_assert_eq!(fast, brute);
    }

    #[test]
    fn psi_paths_agree(x in 1u64..20_000, y in 1u64..200) {
        prop_assert_eq!(smooth::psi_count_sieve(x, y), smooth::psi_count_recursive(x, y));
    }

    #[test]
    fn psi_monotone(x in 1u64..10_000, y in 1u64..150, dx in 0u64..50, dy in 0u64..20) {
        prop_assert!(smooth::psi_count(x + dx, y + dy) >= smooth::psi_count(x, y));
    }

    #[test]
    fn harvest_output_is_sound(
        p in arb_params(),
        yi in 6u32..50,
        span in 1u32..300,
        uncond in proptest::bool::ANY,
    ) {
        let y = yi as f64 / 2.0;
        let z = y + span as f64;
        let mode = if uncond {
            construct::HarvestMode::Unconditional
        } else {
            construct::HarvestMode::Conditional
        };
        let cfg = construct::HarvestConfig::new(y, z, 1, construct::DEFAULT_V, mode).unwrap();
        for q in construct::harvest(&p, &cfg).unwrap() {
            prop_assert!(lgl_core::arith::is_prime_u64(q));
            prop_assert!(q as f64 > y && q as f64 <= z);
            let shifted = match mode {
                construct::HarvestMode::Conditional => {
                    prop_assert!(q % 2 == 1);
                    prop_assert!(p.delta.rem_euclid(q as i64) != 0);
                    prop_assert!(p.a2.rem_euclid(q as i64) != 0);
                    (q as i64 - jacobi(p.delta, q).unwrap() as i64) as u64
                }
                construct::HarvestMode::Unconditional => {
                    let modulus = 8 * p.delta.unsigned_abs();
                    prop_assert_eq!(q % modulus, 1);
                    prop_assert_eq!(jacobi(p.delta, q).unwrap(), 1);
                    q - 1
                }
            };
            for (w, e) in factor_u64(shifted) {
                prop_assert!((w.pow(e) as f64) <= y, "q={}: {}^{} busts y={}", q, w, e, y);
            }
        }
    }

    #[test]
    fn lcm_up_to_contains_exactly_bounded_powers(y in 1u32..300, wi in 0usize..20, k in 1u32..6) {
        let m = construct::lcm_up_to(y as f64).unwrap();
        let w = primes_up_to(71)[wi];
        let wk = BigUint::from(w).pow(k);
        let divides = (&m % &wk).is_zero();
        prop_assert_eq!(divides, wk <= BigUint::from(y), "w^k = {} vs y = {}", w.pow(k.min(10)), y);
    }

    #[test]
    fn mult_order_is_minimal(a in 2u64..300, m in 1u64..3000) {
        match torus::mult_order(a, m) {
            Some(o) => {
                prop_assert!(m == 1 || powmod(a % m, o, m) == 1);
                for (w, _) in factor_u64(o) {
                    prop_assert!(m == 1 || powmod(a % m, o / w, m) != 1,
                        "order {} not minimal at prime {}", o, w);
                }
            }
            None => prop_assert!(gcd_u64(a, m) > 1),
        }
    }

    #[test]
    fn torus_decomposition_is_exact(a in 2u64..9, b in 2u64..9, n in 1u64..40) {
        let g = (BigUint::from(a).pow(n as u32) - BigUint::one())
            .gcd(&(BigUint::from(b).pow(n as u32) - BigUint::one()));
        let (exact, decomposed) = torus::torus_decomposition_check(a, b, n, &g).unwrap();
        prop_assert!((exact - decomposed).abs() < 1e-9);
    }

    #[test]
    fn torus_log_gcd_symmetry(a in 2u64..20, b in 2u64..20, n in 1u64..60) {
        let lhs = torus::torus_log_gcd(a, b, n).unwrap();
        let rhs = torus::torus_log_gcd(b, a, n).unwrap();
        prop_assert_eq!(lhs.to_bits(), rhs.to_bits());
    }
}

// Coefficient validation against a direct recurrence probe.
proptest! {
    #[test]
    fn params_accepted_iff_small_terms_behave(a1 in -6i64..=6, a2 in -6i64..=6) {
        let accepted = LucasParams::new(a1, a2).is_ok();
        let gcd_ok = a1 != 0 && a2 != 0 && gcd_u64(a1.unsigned_abs(), a2.unsigned_abs()) == 1;
        let brute = gcd_ok && {
            let delta_nonzero = a1 * a1 + 4 * a2 != 0;
            let (mut prev, mut cur) = (0i128, 1i128);
            let mut all_nonzero = true;
            for _ in 2..=6 {
                let next = a1 as i128 * cur + a2 as i128 * prev;
                prev = cur;
                cur = next;
                all_nonzero &= cur != 0;
            }
            delta_nonzero && all_nonzero
        };
        prop_assert_eq!(accepted, brute, "a1={} a2={}", a1, a2);
    }
}
