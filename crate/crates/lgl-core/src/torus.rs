//! Sums of log gcd(a^n - 1, b^n - 1) and their decomposition through
//! multiplicative orders.
//!
//! The driving identity: a prime power p^j divides gcd(a^n - 1, b^n - 1)
//! exactly when p divides neither base and lcm(ord(a, p^j), ord(b, p^j))
//! divides n. Summing log p over such prime powers recovers the log of the
//! gcd, which turns gcd sums into lattice-point counts over order conditions.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use serde::Serialize;

use crate::arith::{factor_big, factor_u64, gcd_u64, ln_big, powmod, primes_up_to, KahanSum};
use crate::error::{Error, Result};

/// Work guard for the exact double sum, in rough word-operation units.
const MAX_EXACT_WORK: f64 = 1e12;

/// Multiplicative order of a mod m: least k >= 1 with a^k = 1, or None when
/// gcd(a, m) > 1 and no power of a returns to 1.
pub fn mult_order(a: u64, m: u64) -> Option<u64> {
    assert!(m >= 1, "modulus must be positive");
    if m == 1 {
        return Some(1);
    }
    if gcd_u64(a, m) != 1 {
        return None;
    }
    let lambda_factors = carmichael_factors(m);
    let lambda: u64 = lambda_factors
        .iter()
        .fold(1u64, |acc, &(w, e)| {
            crate::arith::checked_lcm_u64(acc, w.pow(e)).expect("lambda(m) < m")
        });
    Some(order_by_descent(a % m, m, lambda, &lambda_factors))
}

/// Factorization of the Carmichael function lambda(m).
fn carmichael_factors(m: u64) -> Vec<(u64, u32)> {
    let mut acc: Vec<(u64, u32)> = Vec::new();
    let mut push = |w: u64, e: u32| {
        match acc.iter_mut().find(|(p, _)| *p == w) {
            Some((_, have)) => *have = (*have).max(e),
            None => acc.push((w, e)),
        }
    };
    for (p, k) in factor_u64(m) {
        let lp = if p == 2 {
            match k {
                1 => 1,
                2 => 2,
                _ => 1u64 << (k - 2),
            }
        } else {
            (p - 1) * p.pow(k - 1)
        };
        for (w, e) in factor_u64(lp.max(1)) {
            push(w, e);
        }
    }
    acc.sort_unstable();
    acc
}

/// Least divisor o of lambda with a^o = 1 mod m, given lambda's factorization.
fn order_by_descent(a: u64, m: u64, lambda: u64, lambda_factors: &[(u64, u32)]) -> u64 {
    debug_assert_eq!(powmod(a, lambda, m), 1, "lambda must annihilate a");
    let mut o = lambda;
    for &(w, _) in lambda_factors {
        while o % w == 0 && powmod(a, o / w, m) == 1 {
            o /= w;
        }
    }
    o
}

fn check_base(name: &str, v: u64) -> Result<()> {
    if v < 2 {
        return Err(Error::InvalidArgument(format!("base {name} = {v} must be at least 2")));
    }
    Ok(())
}

fn exact_gcd(a: u64, b: u64, n: u64) -> Result<BigUint> {
    check_base("a", a)?;
    check_base("b", b)?;
    if n == 0 {
        return Err(Error::InvalidArgument("exponent n must be positive".into()));
    }
    let bits = n as f64 * (a.max(b) as f64).log2();
    if bits > (1u64 << 22) as f64 {
        return Err(Error::CapacityExceeded(format!(
            "a^n needs about {bits:.0} bits; the exact-gcd budget stops at 2^22"
        )));
    }
    let n32 = u32::try_from(n).expect("bounded by the bit budget");
    let x = BigUint::from(a).pow(n32) - BigUint::one();
    let y = BigUint::from(b).pow(n32) - BigUint::one();
    Ok(x.gcd(&y))
}

/// Natural log of gcd(a^n - 1, b^n - 1), computed from the exact integers.
pub fn torus_log_gcd(a: u64, b: u64, n: u64) -> Result<f64> {
    Ok(ln_big(&exact_gcd(a, b, n)?))
}

/// Membership test for the decomposition: p^j | gcd(a^n - 1, b^n - 1)?
///
/// For moduli in u64 range this follows the order definition literally:
/// both orders finite and their lcm divides n. Larger prime powers use the
/// equivalent condition a^n = b^n = 1 mod p^j.
fn prime_power_contributes(a: u64, b: u64, n: u64, p: &BigUint, pj: &BigUint) -> bool {
    if let (Some(p64), Some(pj64)) = (u64::try_from(p).ok(), u64::try_from(pj).ok()) {
        let (Some(oa), Some(ob)) = (mult_order(a, pj64), mult_order(b, pj64)) else {
            debug_assert_eq!(u64::from(a % p64 == 0 || b % p64 == 0), 1);
            return false;
        };
        let l = crate::arith::checked_lcm_u64(oa, ob).expect("orders divide lambda(p^j)");
        return n % l == 0;
    }
    let nn = BigUint::from(n);
    BigUint::from(a).modpow(&nn, pj).is_one() && BigUint::from(b).modpow(&nn, pj).is_one()
}

/// Exact log-gcd next to its reconstruction as sum of log p over prime powers
/// p^j <= prime_cap whose order lcm divides n.
///
/// Any contributing prime power divides the gcd itself (both congruences
/// a^n = b^n = 1 hold mod p^j), so the enumeration only needs to walk the
/// gcd's prime-power divisors; everything else fails the order condition.
/// With prime_cap at least the gcd, the two components agree.
pub fn torus_decomposition_check(
    a: u64,
    b: u64,
    n: u64,
    prime_cap: &BigUint,
) -> Result<(f64, f64)> {
    let g = exact_gcd(a, b, n)?;
    let exact = ln_big(&g);
    let mut decomposed = KahanSum::default();
    for (p, e) in factor_big(&g)? {
        let lp = ln_big(&p);
        let mut pj = p.clone();
        for _ in 0..e {
            if pj > *prime_cap {
                break;
            }
            if prime_power_contributes(a, b, n, &p, &pj) {
                decomposed.add(lp);
            }
            pj *= &p;
        }
    }
    Ok((exact, decomposed.value()))
}

/// Averaged double torus sum with the comparator scales x log x and
/// x (log x)^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusReport {
    pub b: u64,
    pub x: u64,
    pub y: u64,
    /// (1/y) sum over 2 <= a <= y, n <= x of log gcd(a^n - 1, b^n - 1).
    pub total: f64,
    pub lower_comparator: f64,
    pub upper_comparator: f64,
    pub ratio_lower: f64,
    pub ratio_upper: f64,
    /// False when the order-based path truncated at a prime cap, making
    /// total a lower estimate.
    pub exact_path: bool,
    /// Finite stand-in for the averaging hypothesis: y >= x/(log x loglog x).
    pub y_regime_ok: bool,
}

fn finish_report(b: u64, x: u64, y: u64, total: f64, exact_path: bool) -> TorusReport {
    let lx = (x as f64).ln();
    let lower = x as f64 * lx;
    let upper = x as f64 * lx * lx;
    let ratio = |comp: f64| if comp > 0.0 { total / comp } else { f64::NAN };
    let y_regime_ok = x >= 16 && (y as f64) >= x as f64 / (lx * lx.ln());
    TorusReport {
        b,
        x,
        y,
        total,
        lower_comparator: lower,
        upper_comparator: upper,
        ratio_lower: ratio(lower),
        ratio_upper: ratio(upper),
        exact_path,
        y_regime_ok,
    }
}

/// Per-base inner sum over n <= x of log gcd(a^n - 1, b^n - 1), via running
/// powers and exact bigint gcds.
fn pair_log_sum(a: u64, b: u64, x: u64) -> f64 {
    let mut acc = KahanSum::default();
    let (mut pa, mut pb) = (BigUint::one(), BigUint::one());
    let (ba, bb) = (BigUint::from(a), BigUint::from(b));
    for _ in 1..=x {
        pa *= &ba;
        pb *= &bb;
        let g = (&pa - BigUint::one()).gcd(&(&pb - BigUint::one()));
        acc.add(ln_big(&g));
    }
    acc.value()
}

/// Sum over n <= x of log gcd(a^n - 1, b^n - 1) for one fixed pair.
pub fn single_pair_log_sum(a: u64, b: u64, x: u64) -> Result<f64> {
    check_base("a", a)?;
    check_base("b", b)?;
    if x == 0 {
        return Err(Error::InvalidArgument("range x must be positive".into()));
    }
    Ok(pair_log_sum(a, b, x))
}

/// Unconditional floor for the single-pair sum: each prime p <= x not
/// dividing ab has both orders dividing p - 1, so it contributes log p at
/// least floor(x/(p-1)) times.
pub fn chebyshev_floor(a: u64, b: u64, x: u64) -> f64 {
    let mut acc = KahanSum::default();
    for p in primes_up_to(x) {
        if a % p != 0 && b % p != 0 {
            acc.add((p as f64).ln() * (x / (p - 1)) as f64);
        }
    }
    acc.value()
}

/// Exact averaged double sum (1/y) over 2 <= a <= y, n <= x.
///
/// a = 1 is excluded: gcd(0, b^n - 1) = b^n - 1 would swamp the average with
/// a trivial term. The divisor stays y.
pub fn torus_average_sum(b: u64, x: u64, y: u64) -> Result<TorusReport> {
    check_base("b", b)?;
    if x == 0 || y == 0 {
        return Err(Error::InvalidArgument("x and y must be positive".into()));
    }
    let work = y.saturating_sub(1) as f64 * (x as f64).powi(2) * (b.max(y) as f64).log2();
    if work > MAX_EXACT_WORK {
        return Err(Error::CapacityExceeded(format!(
            "exact torus sum at b={b}, x={x}, y={y} is past the work budget; \
             shrink the ranges or use the accelerated path"
        )));
    }

    let a_values: Vec<u64> = (2..=y).collect();
    let partials: Vec<f64>;
    #[cfg(feature = "parallel")]
    {
        partials = if crate::exec::parallel_enabled() {
            use rayon::prelude::*;
            a_values.par_iter().map(|&a| pair_log_sum(a, b, x)).collect()
        } else {
            a_values.iter().map(|&a| pair_log_sum(a, b, x)).collect()
        };
    }
    #[cfg(not(feature = "parallel"))]
    {
        partials = a_values.iter().map(|&a| pair_log_sum(a, b, x)).collect();
    }

    let mut total = KahanSum::default();
    for v in partials {
        total.add(v);
    }
    Ok(finish_report(b, x, y, total.value() / y as f64, true))
}

/// Order-based lower estimate of the averaged sum, truncated at prime powers
/// <= prime_cap.
///
/// For each prime power the inner count over n is exactly
/// floor(x/lcm(orders)), so the only loss against the exact path is prime
/// powers beyond the cap.
pub fn torus_average_sum_accelerated(
    b: u64,
    x: u64,
    y: u64,
    prime_cap: u64,
) -> Result<TorusReport> {
    check_base("b", b)?;
    if x == 0 || y == 0 {
        return Err(Error::InvalidArgument("x and y must be positive".into()));
    }
    if prime_cap < 2 {
        return Err(Error::InvalidArgument("prime_cap must be at least 2".into()));
    }
    if prime_cap > 100_000_000 {
        return Err(Error::CapacityExceeded(format!(
            "prime_cap {prime_cap} exceeds the sieve budget 1e8"
        )));
    }

    let primes = primes_up_to(prime_cap);
    let per_prime = |&p: &u64| -> f64 {
        if b % p == 0 {
            return 0.0;
        }
        let mut acc = KahanSum::default();
        let lp = (p as f64).ln();
        let mut pj = p;
        loop {
            let lambda_factors = carmichael_factors(pj);
            let lambda = lambda_factors
                .iter()
                .fold(1u64, |l, &(w, e)| crate::arith::checked_lcm_u64(l, w.pow(e)).unwrap());
            let ob = order_by_descent(b % pj, pj, lambda, &lambda_factors);
            if ob <= x {
                for a in 2..=y {
                    if a % p == 0 {
                        continue;
                    }
                    let oa = order_by_descent(a % pj, pj, lambda, &lambda_factors);
                    if let Some(l) = crate::arith::checked_lcm_u64(oa, ob) {
                        acc.add(lp * (x / l) as f64);
                    }
                }
            }
            match pj.checked_mul(p) {
                Some(next) if next <= prime_cap => pj = next,
                _ => break,
            }
        }
        acc.value()
    };

    let partials: Vec<f64>;
    #[cfg(feature = "parallel")]
    {
        partials = if crate::exec::parallel_enabled() {
            use rayon::prelude::*;
            primes.par_iter().map(per_prime).collect()
        } else {
            primes.iter().map(per_prime).collect()
        };
    }
    #[cfg(not(feature = "parallel"))]
    {
        partials = primes.iter().map(per_prime).collect();
    }

    let mut total = KahanSum::default();
    for v in partials {
        total.add(v);
    }
    Ok(finish_report(b, x, y, total.value() / y as f64, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_examples() {
        assert_eq!(mult_order(2, 7), Some(3));
        assert_eq!(mult_order(17, 1), Some(1));
        assert_eq!(mult_order(2, 4), None);
        assert_eq!(mult_order(10, 17), Some(16));
        assert_eq!(mult_order(3, 2), Some(1));
    }

    #[test]
    fn order_matches_brute_scan() {
        for m in 1u64..=60 {
            for a in 2u64..=20 {
                let brute = (1..=m.max(1)).find(|&k| powmod(a % m.max(2), k, m.max(2)) == 1);
                let brute = if m == 1 { Some(1) } else { brute };
                assert_eq!(mult_order(a, m), brute, "a={a} m={m}");
            }
        }
    }

    #[test]
    fn log_gcd_examples() {
        assert!((torus_log_gcd(2, 3, 4).unwrap() - 5f64.ln()).abs() < 1e-12);
        assert_eq!(torus_log_gcd(2, 3, 1).unwrap(), 0.0);
        assert!((torus_log_gcd(2, 3, 6).unwrap() - 7f64.ln()).abs() < 1e-12);
        assert!(torus_log_gcd(1, 3, 4).is_err());
        assert!(matches!(
            torus_log_gcd(2, 3, u64::MAX),
            Err(Error::CapacityExceeded(_))
        ));
    }

    #[test]
    fn log_gcd_symmetric() {
        for a in 2u64..=6 {
            for b in 2u64..=6 {
                for n in 1u64..=20 {
                    assert_eq!(
                        torus_log_gcd(a, b, n).unwrap().to_bits(),
                        torus_log_gcd(b, a, n).unwrap().to_bits()
                    );
                }
            }
        }
    }

    #[test]
    fn gcd_divisibility_monotone() {
        for (a, b) in [(2u64, 3u64), (3, 10), (4, 9)] {
            for m in 1u64..=20 {
                for mult in 1u64..=3 {
                    let g1 = exact_gcd(a, b, m).unwrap();
                    let g2 = exact_gcd(a, b, m * mult).unwrap();
                    assert_eq!(&g2 % &g1, BigUint::ZERO, "gcd at {m} divides gcd at {}", m * mult);
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let cap5 = BigUint::from(5u32);
        let (e, d) = torus_decomposition_check(2, 3, 4, &cap5).unwrap();
        assert!((e - 5f64.ln()).abs() < 1e-12);
        assert!((d - 5f64.ln()).abs() < 1e-12);

        let (e, d) = torus_decomposition_check(2, 3, 1, &cap5).unwrap();
        assert_eq!((e, d), (0.0, 0.0));

        let (e, d) = torus_decomposition_check(2, 3, 6, &BigUint::from(7u32)).unwrap();
        assert!((e - 7f64.ln()).abs() < 1e-12);
        assert!((d - 7f64.ln()).abs() < 1e-12);

        // truncating cap drops the one prime
        let (e, d) = torus_decomposition_check(2, 3, 6, &cap5).unwrap();
        assert!(d < e);
        assert_eq!(d, 0.0);
    }

    #[test]
    fn decomposition_identity_small_grid() {
        for a in 2u64..=5 {
            for b in 2u64..=5 {
                for n in 1u64..=30 {
                    let g = exact_gcd(a, b, n).unwrap();
                    let (e, d) = torus_decomposition_check(a, b, n, &g).unwrap();
                    assert!((e - d).abs() < 1e-9, "a={a} b={b} n={n}: {e} vs {d}");
                }
            }
        }
    }

    // Walk every prime power up to the cap with u64 orders; no divisor-of-gcd
    // shortcut.
    fn decomposed_brute(a: u64, b: u64, n: u64, cap: u64) -> f64 {
        let mut acc = 0.0;
        for p in primes_up_to(cap) {
            let mut pj = p;
            loop {
                if let (Some(oa), Some(ob)) = (mult_order(a, pj), mult_order(b, pj)) {
                    let l = crate::arith::checked_lcm_u64(oa, ob).unwrap();
                    if n % l == 0 {
                        acc += (p as f64).ln();
                    }
                }
                match pj.checked_mul(p) {
                    Some(next) if next <= cap => pj = next,
                    _ => break,
                }
            }
        }
        acc
    }

    #[test]
    fn decomposition_matches_full_enumeration() {
        for n in 1u64..=20 {
            let (_, d) = torus_decomposition_check(2, 3, n, &BigUint::from(200u32)).unwrap();
            let brute = decomposed_brute(2, 3, n, 200);
            assert!((d - brute).abs() < 1e-9, "n={n}: {d} vs {brute}");
        }
    }

    #[test]
    fn average_examples() {
        let r = torus_average_sum(3, 2, 2).unwrap();
        assert_eq!(r.total, 0.0, "gcd(1,2) and gcd(3,8) are both 1");

        let r = torus_average_sum(3, 1, 3).unwrap();
        assert!((r.total - 2f64.ln() / 3.0).abs() < 1e-12);

        // y = 2 keeps only a = 2 = b
        let r = torus_average_sum(2, 4, 2).unwrap();
        let expected = (3f64.ln() + 7f64.ln() + 15f64.ln()) / 2.0;
        assert!((r.total - expected).abs() < 1e-12);
    }

    #[test]
    fn report_fields() {
        let r = torus_average_sum(3, 100, 20).unwrap();
        let lx = 100f64.ln();
        assert!((r.lower_comparator - 100.0 * lx).abs() < 1e-9);
        assert!((r.upper_comparator - 100.0 * lx * lx).abs() < 1e-9);
        assert!((r.ratio_lower - r.total / r.lower_comparator).abs() < 1e-12);
        assert!(r.exact_path);
        assert!(r.y_regime_ok, "20 >= 100/(ln 100 lnln 100) = 14.2");
        assert!(!torus_average_sum(3, 100, 10).unwrap().y_regime_ok);
        assert!(matches!(
            torus_average_sum(2, 2_000_000, 2),
            Err(Error::CapacityExceeded(_))
        ));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn average_is_thread_count_invariant() {
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| torus_average_sum(3, 60, 12).unwrap().total)
        };
        assert_eq!(run(1).to_bits(), run(4).to_bits());
    }

    #[test]
    fn accelerated_is_lower_estimate() {
        let exact = torus_average_sum(3, 30, 8).unwrap();
        let small = torus_average_sum_accelerated(3, 30, 8, 100).unwrap();
        let large = torus_average_sum_accelerated(3, 30, 8, 100_000).unwrap();
        assert!(!small.exact_path);
        assert!(small.total > 0.0);
        assert!(small.total <= large.total + 1e-9, "monotone in the cap");
        assert!(large.total <= exact.total + 1e-9, "truncation only loses mass");
    }

    #[test]
    fn chebyshev_floor_holds() {
        let lhs = single_pair_log_sum(2, 3, 200).unwrap();
        let rhs = chebyshev_floor(2, 3, 200);
        assert!(lhs >= rhs, "{lhs} < {rhs}");
        assert!(rhs > 0.0);
    }
}
