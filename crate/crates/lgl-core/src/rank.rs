//! Rank of appearance z(m): the least n >= 1 with m | u_n, plus the derived
//! quantities ell(m) = lcm(m, z(m)), g(n) = gcd(n, u_n), the modified Euler
//! function, and a greedy splitter that extracts a large divisor d | m with
//! gcd(d, z(d)) = 1.
//!
//! Every fast path here is shadowed by `rank_oracle`, which scans the
//! sequence mod m term by term. The test suite keeps them in agreement.

use serde::Serialize;

use crate::arith::{self, divisor_descent, factor_u64, gcd_u64};
use crate::error::{Error, Result};
use crate::lucas::{quad_symbol, LucasParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RankMethod {
    Oracle,
    DivisorDescent,
    Lifted,
    LcmCombined,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankResult {
    pub m: u64,
    pub z: u64,
    pub method: RankMethod,
}

/// True when z(m) exists, i.e. gcd(m, a2) = 1.
pub fn rank_defined(p: &LucasParams, m: u64) -> bool {
    gcd_u64(m, p.a2.unsigned_abs()) == 1
}

fn require_rank_defined(p: &LucasParams, m: u64) -> Result<()> {
    if rank_defined(p, m) {
        Ok(())
    } else {
        Err(Error::RankUndefined { m })
    }
}

/// Ground truth: scan u_1, u_2, ... mod m for the first zero residue.
///
/// `cap` bounds the scan; for valid inputs z(m) <= 2m, so any cap >= 2m
/// turns CapNotReached into a genuine bug signal.
pub fn rank_oracle(p: &LucasParams, m: u64, cap: u64) -> Result<RankResult> {
    if m == 0 {
        return Err(Error::InvalidArgument("rank needs m >= 1".into()));
    }
    require_rank_defined(p, m)?;
    for (n, r) in p.mod_seq(m).skip(1).take(cap as usize).enumerate() {
        if r == 0 {
            return Ok(RankResult {
                m,
                z: n as u64 + 1,
                method: RankMethod::Oracle,
            });
        }
    }
    Err(Error::CapNotReached { m, cap })
}

/// Oracle with the default 2m + 2 cap.
pub fn rank_oracle_default(p: &LucasParams, m: u64) -> Result<RankResult> {
    rank_oracle(p, m, 2 * m + 2)
}

/// z(q) for prime q.
///
/// For odd q coprime to 2*delta*a2 the rank divides q - (delta/q), so start
/// there and strip prime factors while divisibility survives. q = 2 and
/// q | delta skip the symbol argument and fall back to the oracle (for
/// q | delta the answer is z(q) = q, which the oracle confirms cheaply).
pub fn rank_prime(p: &LucasParams, q: u64) -> Result<RankResult> {
    if !arith::is_prime_u64(q) {
        return Err(Error::InvalidArgument(format!("rank_prime needs a prime, got {q}")));
    }
    require_rank_defined(p, q)?;
    if q == 2 || (p.delta as i128).rem_euclid(q as i128) == 0 {
        return rank_oracle_default(p, q);
    }
    let eps = quad_symbol(p.delta, q)?;
    debug_assert!(eps != 0, "q does not divide delta here");
    let start = if eps == 1 { q - 1 } else { q + 1 };
    let divides = |d: u64| p.term_mod(d, q).map(|r| r.value == 0).unwrap_or(false);
    if !divides(start) {
        return Err(Error::Internal(format!(
            "u_{{q - (delta/q)}} not divisible by q = {q}"
        )));
    }
    let z = divisor_descent(start, &factor_u64(start), divides);
    Ok(RankResult {
        m: q,
        z,
        method: RankMethod::DivisorDescent,
    })
}

/// z(q^k) = q^e z(q) with 0 <= e < k, found by lifting: multiply by q until
/// u_z vanishes mod q^k. Each stage is verified directly rather than assumed,
/// so a Wall-Sun-Sun-style surprise would surface as a changed e, not a
/// wrong answer.
pub fn rank_prime_power(p: &LucasParams, q: u64, k: u32) -> Result<RankResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("rank_prime_power needs k >= 1".into()));
    }
    let base = rank_prime(p, q)?;
    if k == 1 {
        return Ok(base);
    }
    let modulus = q
        .checked_pow(k)
        .ok_or_else(|| Error::CapacityExceeded(format!("{q}^{k} overflows u64")))?;
    let mut z = base.z;
    for _ in 0..k {
        if p.term_mod(z, modulus)?.value == 0 {
            return Ok(RankResult {
                m: modulus,
                z,
                method: RankMethod::Lifted,
            });
        }
        z = z
            .checked_mul(q)
            .ok_or_else(|| Error::CapacityExceeded(format!("z({q}^{k}) overflows u64")))?;
    }
    // e < k always holds; running off the end means the lift logic is broken
    Err(Error::Internal(format!(
        "rank lift for {q}^{k} exceeded exponent bound"
    )))
}

/// z(m) for arbitrary valid m, as the lcm of prime-power ranks.
pub fn rank(p: &LucasParams, m: u64) -> Result<RankResult> {
    if m == 0 {
        return Err(Error::InvalidArgument("rank needs m >= 1".into()));
    }
    require_rank_defined(p, m)?;
    if m == 1 {
        return Ok(RankResult {
            m: 1,
            z: 1,
            method: RankMethod::LcmCombined,
        });
    }
    let factors = factor_u64(m);
    if factors.len() == 1 {
        let (q, e) = factors[0];
        return rank_prime_power(p, q, e);
    }
    let mut z: u64 = 1;
    for &(q, e) in &factors {
        let part = rank_prime_power(p, q, e)?.z;
        z = arith::checked_lcm_u64(z, part)
            .ok_or_else(|| Error::CapacityExceeded(format!("z({m}) overflows u64")))?;
    }
    Ok(RankResult {
        m,
        z,
        method: RankMethod::LcmCombined,
    })
}

/// ell(m) = lcm(m, z(m)).
pub fn ell(p: &LucasParams, m: u64) -> Result<u64> {
    let z = rank(p, m)?.z;
    arith::checked_lcm_u64(m, z)
        .ok_or_else(|| Error::CapacityExceeded(format!("ell({m}) overflows u64")))
}

/// g(n) = gcd(n, u_n), with gcd(n, 0) = n. Total on n >= 1.
pub fn g_of(p: &LucasParams, n: u64) -> u64 {
    assert!(n >= 1, "g is defined on n >= 1");
    let r = p.term_mod(n, n).expect("modulus n >= 1").value;
    gcd_u64(n, r)
}

/// Modified Euler function: product over distinct primes q | n of
/// (q - (delta/q)). Defined here only when every prime of n is odd and
/// coprime to delta and a2.
pub fn phi_u(p: &LucasParams, n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidArgument("phi_u needs n >= 1".into()));
    }
    let mut acc: u128 = 1;
    for (q, _) in factor_u64(n) {
        if q == 2 {
            return Err(Error::InvalidArgument("phi_u excludes even n".into()));
        }
        if (p.delta as i128).rem_euclid(q as i128) == 0 {
            return Err(Error::InvalidArgument(format!(
                "phi_u excludes primes dividing the discriminant ({q})"
            )));
        }
        if (p.a2 as i128).rem_euclid(q as i128) == 0 {
            return Err(Error::InvalidArgument(format!(
                "phi_u excludes primes dividing a2 ({q})"
            )));
        }
        let eps = quad_symbol(p.delta, q)?;
        let factor = if eps == 1 { q - 1 } else { q + 1 };
        acc *= factor as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::CapacityExceeded(format!("phi_u({n}) overflows u64")));
        }
    }
    Ok(acc as u64)
}

/// Splits squarefree m into (m1, m2) with m1 m2 = m / gcd(m, 2 delta a2),
/// gcd(m1, z(m1)) = 1 and m2 | z(m1).
///
/// Greedy by size: take the largest prime, then repeatedly the largest
/// remaining prime that divides none of the ranks already collected. Any
/// rejected prime divides some z(q_j), which is what puts it in m2. Since
/// all primes here are odd and z(q) <= q + 1, a chosen prime can never
/// divide the rank of a smaller chosen one, giving the coprimality
/// postcondition; the 2 m1^2 >= m bound is checked by the test suite.
pub fn split_coprime_rank(p: &LucasParams, m: u64) -> Result<(u64, u64)> {
    if m == 0 {
        return Err(Error::InvalidArgument("split needs m >= 1".into()));
    }
    let factors = factor_u64(m);
    if factors.iter().any(|&(_, e)| e > 1) {
        return Err(Error::InvalidArgument(format!("{m} is not squarefree")));
    }
    let mut primes: Vec<u64> = factors
        .into_iter()
        .map(|(q, _)| q)
        .filter(|&q| {
            q != 2
                && (p.delta as i128).rem_euclid(q as i128) != 0
                && (p.a2 as i128).rem_euclid(q as i128) != 0
        })
        .collect();
    primes.sort_unstable_by(|a, b| b.cmp(a));
    let mut m1: u64 = 1;
    let mut m2: u64 = 1;
    let mut ranks: Vec<u64> = Vec::new();
    for q in primes {
        if ranks.iter().any(|&z| z % q == 0) {
            m2 *= q;
        } else {
            m1 *= q;
            ranks.push(rank_prime(p, q)?.z);
        }
    }
    Ok((m1, m2))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> LucasParams {
        LucasParams::fibonacci()
    }

    #[test]
    fn oracle_known_values() {
        let f = fib();
        assert_eq!(rank_oracle(&f, 10, 40).unwrap().z, 15);
        assert_eq!(rank_oracle(&f, 1, 4).unwrap().z, 1);
        assert_eq!(rank_oracle(&f, 7, 20).unwrap().z, 8);
        let pell = LucasParams::new(2, 1).unwrap();
        assert_eq!(rank_oracle(&pell, 3, 10).unwrap().z, 4);
    }

    #[test]
    fn oracle_error_paths() {
        let p = LucasParams::new(1, 2).unwrap();
        assert!(matches!(
            rank_oracle(&p, 6, 100),
            Err(Error::RankUndefined { m: 6 })
        ));
        let f = fib();
        assert!(matches!(
            rank_oracle(&f, 10, 3),
            Err(Error::CapNotReached { m: 10, cap: 3 })
        ));
    }

    #[test]
    fn prime_rank_descent_and_fallbacks() {
        let f = fib();
        assert_eq!(rank_prime(&f, 11).unwrap().z, 10);
        assert_eq!(rank_prime(&f, 13).unwrap().z, 7);
        // q | delta and q = 2 take the oracle path
        let five = rank_prime(&f, 5).unwrap();
        assert_eq!((five.z, five.method), (5, RankMethod::Oracle));
        assert_eq!(rank_prime(&f, 2).unwrap().z, 3);
        assert!(rank_prime(&f, 12).is_err());
    }

    #[test]
    fn prime_power_lifting() {
        let f = fib();
        assert_eq!(rank_prime_power(&f, 2, 2).unwrap().z, 6);
        assert_eq!(rank_prime_power(&f, 5, 2).unwrap().z, 25);
        assert_eq!(
            rank_prime_power(&f, 13, 1).unwrap().z,
            rank_prime(&f, 13).unwrap().z
        );
        // e < k: the lift ratio is a power of q below q^k
        for (q, k) in [(2u64, 5u32), (3, 4), (7, 3), (13, 2)] {
            let z1 = rank_prime(&f, q).unwrap().z;
            let zk = rank_prime_power(&f, q, k).unwrap().z;
            assert_eq!(zk % z1, 0);
            let ratio = zk / z1;
            let mut r = ratio;
            while r % q == 0 {
                r /= q;
            }
            assert_eq!(r, 1, "ratio {ratio} is not a power of {q}");
            assert!(ratio < q.pow(k));
        }
    }

    #[test]
    fn combined_rank_matches_oracle() {
        for (a1, a2) in [(1i64, 1i64), (2, 1), (3, -1), (1, 2), (-3, 5)] {
            let p = LucasParams::new(a1, a2).unwrap();
            for m in 1..=500u64 {
                if !rank_defined(&p, m) {
                    continue;
                }
                let fast = rank(&p, m).unwrap().z;
                let slow = rank_oracle_default(&p, m).unwrap().z;
                assert_eq!(fast, slow, "params ({a1},{a2}), m={m}");
            }
        }
    }

    #[test]
    fn ell_known_values() {
        let f = fib();
        assert_eq!(ell(&f, 10).unwrap(), 30);
        assert_eq!(ell(&f, 1).unwrap(), 1);
        assert_eq!(ell(&f, 25).unwrap(), 25);
    }

    #[test]
    fn g_known_values() {
        let f = fib();
        assert_eq!(g_of(&f, 12), 12);
        assert_eq!(g_of(&f, 1), 1);
        assert_eq!(g_of(&f, 10), 5);
        // direct definition cross-check on a small window
        for n in 1..=80u64 {
            let exact = f.term(n).unwrap();
            let expect = num_integer::gcd(
                num_bigint::BigInt::from(n),
                exact,
            );
            assert_eq!(num_bigint::BigInt::from(g_of(&f, n)), expect);
        }
    }

    #[test]
    fn phi_u_examples() {
        let f = fib();
        assert_eq!(phi_u(&f, 11).unwrap(), 10);
        assert_eq!(phi_u(&f, 1).unwrap(), 1);
        assert_eq!(phi_u(&f, 77).unwrap(), 80);
        assert!(phi_u(&f, 22).is_err());
        assert!(phi_u(&f, 55).is_err());
    }

    #[test]
    fn split_examples_and_postconditions() {
        let f = fib();
        assert_eq!(split_coprime_rank(&f, 91).unwrap(), (13, 7));
        assert_eq!(split_coprime_rank(&f, 1).unwrap(), (1, 1));
        assert_eq!(split_coprime_rank(&f, 21).unwrap(), (21, 1));
        assert!(split_coprime_rank(&f, 12).is_err());

        for m in 1..=2000u64 {
            if !arith::is_squarefree_u64(m) {
                continue;
            }
            let (m1, m2) = split_coprime_rank(&f, m).unwrap();
            let reduced: u64 = factor_u64(m)
                .iter()
                .map(|&(q, _)| q)
                .filter(|&q| q != 2 && q != 5)
                .product();
            assert_eq!(m1 * m2, reduced, "m={m}");
            let z1 = rank(&f, m1).unwrap().z;
            assert_eq!(gcd_u64(m1, z1), 1, "m={m}");
            if m2 > 1 {
                assert_eq!(z1 % m2, 0, "m={m}: m2 must divide z(m1)");
            }
            assert!(2 * m1 * m1 >= reduced, "m={m}");
        }
    }
}
