//! Shared integer arithmetic: primality, factoring, Jacobi symbols, and the
//! accurate-summation bits the analytic modules lean on.
//!
//! Everything here is deterministic. The factoring backends try cheap methods
//! first and escalate (trial division, Pollard rho, p-1, then ECM stage 1 with
//! a fixed curve schedule), so repeated runs always walk the same path.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// u64 primitives
// ---------------------------------------------------------------------------

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// lcm(a, b), or None on u64 overflow. lcm(0, x) = 0 by convention.
pub fn checked_lcm_u64(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    let g = gcd_u64(a, b);
    (a / g).checked_mul(b)
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The 12 smallest prime bases decide primality
/// for every u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho. Caller guarantees n is odd, composite, and
/// not too small; the c-offset escalation keeps it from stalling on bad seeds.
fn brent_rho_u64(n: u64) -> u64 {
    debug_assert!(n > 3 && n % 2 == 1 && !is_prime_u64(n));
    for c in 1..64u64 {
        let f = |x: u64| (mulmod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut power = 1u64;
        let mut lam = 0u64;
        while d == 1 {
            if lam == power {
                x = y;
                power <<= 1;
                lam = 0;
            }
            // batch gcd: accumulate |x - y| products 128 steps at a time
            let mut q = 1u64;
            let mut ys = y;
            let batch = 128.min(power - lam);
            for _ in 0..batch {
                ys = f(ys);
                q = mulmod(q, x.abs_diff(ys), n);
            }
            lam += batch;
            d = gcd_u64(q, n);
            y = ys;
        }
        if d != n {
            return d;
        }
        // batch collapsed; redo this c single-stepped before moving on
        let mut x = 2u64;
        let mut y = f(2);
        while x != y {
            let g = gcd_u64(x.abs_diff(y), n);
            if g > 1 {
                if g < n {
                    return g;
                }
                break;
            }
            x = f(x);
            y = f(f(y));
        }
    }
    unreachable!("rho exhausted offsets for n = {n}");
}

/// Prime factorization of n as sorted (prime, exponent) pairs. factor(1) = [].
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if n % p == 0 {
            let mut e = 0u32;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut stack = Vec::new();
    if n > 1 {
        stack.push(n);
    }
    let mut rest: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if is_prime_u64(m) {
            rest.push(m);
            continue;
        }
        let d = brent_rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
    rest.sort_unstable();
    let mut i = 0;
    while i < rest.len() {
        let p = rest[i];
        let mut e = 0u32;
        while i < rest.len() && rest[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort_unstable();
    out
}

pub fn is_squarefree_u64(n: u64) -> bool {
    n > 0 && factor_u64(n).iter().all(|&(_, e)| e == 1)
}

/// Largest prime factor; None for n < 2.
pub fn greatest_prime_factor_u64(n: u64) -> Option<u64> {
    factor_u64(n).last().map(|&(p, _)| p)
}

/// Minimal divisor d of n with divides(d) = true, assuming divides(n) holds
/// and the predicate is divisor-closed upward (divides(d) and d | e | n imply
/// divides(e)). This is the standard order-finding descent.
pub fn divisor_descent(mut n: u64, factors: &[(u64, u32)], divides: impl Fn(u64) -> bool) -> u64 {
    for &(p, e) in factors {
        for _ in 0..e {
            if n % p == 0 && divides(n / p) {
                n /= p;
            } else {
                break;
            }
        }
    }
    n
}

/// Simple sieve; returns all primes <= limit.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Jacobi symbol (a / m) for odd m >= 1. Handles negative a.
pub fn jacobi(a: i64, m: u64) -> Result<i8> {
    if m == 0 || m % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "jacobi symbol needs odd positive modulus, got {m}"
        )));
    }
    let mut a = (a as i128).rem_euclid(m as i128) as u64;
    let mut m = m;
    let mut t: i8 = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            t = -t;
        }
        a %= m;
    }
    Ok(if m == 1 { t } else { 0 })
}

// ---------------------------------------------------------------------------
// compensated summation
// ---------------------------------------------------------------------------

/// Kahan-compensated accumulator. Segment partials are merged in a fixed
/// order, which keeps float output byte-stable across worker counts.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn merge(&mut self, other: KahanSum) {
        self.add(other.sum);
        self.add(-other.c);
    }

    pub fn value(&self) -> f64 {
        self.sum - self.c
    }
}

// ---------------------------------------------------------------------------
// arbitrary-precision primality and factoring
// ---------------------------------------------------------------------------

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(1_000_000))
}

/// Miller-Rabin with the first 40 primes as fixed bases. Deterministically
/// correct below 3.3e24; beyond that the error bound is 4^-40 per composite,
/// and the fixed bases keep verdicts reproducible.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if n.is_even() {
        return false;
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0);
    let d: BigUint = &nm1 >> s;
    let bases: [u64; 40] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83,
        89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
    ];
    'base: for a in bases {
        let a = BigUint::from(a);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == nm1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

/// Pollard p-1, stage 1 only. Finds p | n when p - 1 is b1-smooth.
fn pollard_pm1(n: &BigUint, b1: u64, base: u64) -> Option<BigUint> {
    let mut a = BigUint::from(base) % n;
    if a.is_zero() || a.is_one() {
        return None;
    }
    for &p in trial_primes() {
        if p > b1 {
            break;
        }
        let mut pe = p;
        while pe <= b1 / p {
            pe *= p;
        }
        a = a.modpow(&BigUint::from(pe), n);
    }
    let g = (if a.is_zero() { n.clone() } else { &a - 1u32 }).gcd(n);
    if !g.is_one() && &g != n {
        Some(g)
    } else {
        None
    }
}

#[inline]
fn subm(a: &BigUint, b: &BigUint, n: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        n - b + a
    }
}

/// One curve of ECM stage 1 on a Montgomery curve from the Suyama
/// parameterization. Returns a nontrivial factor if the curve order over some
/// p | n is b1-smooth (or if curve setup itself hits a zero divisor).
fn ecm_stage1(n: &BigUint, sigma: u64, b1: u64) -> Option<BigUint> {
    let mulm = |a: &BigUint, b: &BigUint| (a * b) % n;
    let sqm = |a: &BigUint| (a * a) % n;

    let sigma = BigUint::from(sigma) % n;
    let u = subm(&sqm(&sigma), &BigUint::from(5u32), n);
    let v = (BigUint::from(4u32) * &sigma) % n;
    let x0 = mulm(&sqm(&u), &u);
    let z0 = mulm(&sqm(&v), &v);
    // a24 = (v-u)^3 (3u+v) / (16 u^3 v); a failed inversion is itself a factor
    let diff = subm(&v, &u, n);
    let num = mulm(&mulm(&sqm(&diff), &diff), &((BigUint::from(3u32) * &u + &v) % n));
    let den = (BigUint::from(16u32) * &x0 % n * &v) % n;
    let a24 = match den.modinv(n) {
        Some(inv) => mulm(&num, &inv),
        None => {
            let g = den.gcd(n);
            return if !g.is_one() && &g != n { Some(g) } else { None };
        }
    };

    let xdbl = |x: &BigUint, z: &BigUint| {
        let s = sqm(&((x + z) % n));
        let d = sqm(&subm(x, z, n));
        let t = subm(&s, &d, n); // 4xz
        (mulm(&s, &d), mulm(&t, &((&d + mulm(&a24, &t)) % n)))
    };
    // differential add: P1 + P2 given difference Pd
    let xadd = |x1: &BigUint, z1: &BigUint, x2: &BigUint, z2: &BigUint, xd: &BigUint, zd: &BigUint| {
        let a = mulm(&subm(x1, z1, n), &((x2 + z2) % n));
        let b = mulm(&((x1 + z1) % n), &subm(x2, z2, n));
        let x3 = mulm(zd, &sqm(&((&a + &b) % n)));
        let z3 = mulm(xd, &sqm(&subm(&a, &b, n)));
        (x3, z3)
    };
    // Montgomery ladder: (X:Z) -> [s](X:Z) for small scalar s
    let ladder = |s: u64, x: &BigUint, z: &BigUint| -> (BigUint, BigUint) {
        debug_assert!(s >= 2);
        let (mut x0c, mut z0c) = (x.clone(), z.clone());
        let (mut x1c, mut z1c) = xdbl(x, z);
        let top = 63 - s.leading_zeros() as u64;
        for i in (0..top).rev() {
            if (s >> i) & 1 == 1 {
                let (nx0, nz0) = xadd(&x0c, &z0c, &x1c, &z1c, x, z);
                let (nx1, nz1) = xdbl(&x1c, &z1c);
                x0c = nx0;
                z0c = nz0;
                x1c = nx1;
                z1c = nz1;
            } else {
                let (nx1, nz1) = xadd(&x0c, &z0c, &x1c, &z1c, x, z);
                let (nx0, nz0) = xdbl(&x0c, &z0c);
                x0c = nx0;
                z0c = nz0;
                x1c = nx1;
                z1c = nz1;
            }
        }
        (x0c, z0c)
    };

    let mut x = x0;
    let mut z = z0;
    for &p in trial_primes() {
        if p > b1 {
            break;
        }
        let mut pe = p;
        while pe <= b1 / p {
            pe *= p;
        }
        let mut rem = pe;
        while rem > 1 {
            // peel one factor p per ladder call; p^e may exceed u64 ladder comfort otherwise
            let (nx, nz) = ladder(p, &x, &z);
            x = nx;
            z = nz;
            rem /= p;
        }
        if z.is_zero() {
            break;
        }
    }
    let g = z.gcd(n);
    if !g.is_one() && &g != n {
        Some(g)
    } else {
        None
    }
}

/// Pollard rho (Brent cycle finding) over BigUint, capped. Catches the small
/// factors that slip past the trial-division bound without costing much when
/// it fails.
fn brent_rho_big(n: &BigUint, max_iters: u64) -> Option<BigUint> {
    let one = BigUint::one();
    for c in 1u32..=2 {
        let cbig = BigUint::from(c);
        let f = |x: &BigUint| (x * x + &cbig) % n;
        let mut y = BigUint::from(2u32);
        let mut power = 1u64;
        let mut lam = 0u64;
        let mut x = y.clone();
        let mut q = one.clone();
        let mut iters = 0u64;
        loop {
            if lam == power {
                x = y.clone();
                power <<= 1;
                lam = 0;
            }
            let batch = 128.min(power - lam);
            let ys = y.clone();
            for _ in 0..batch {
                y = f(&y);
                let d = if x >= y { &x - &y } else { &y - &x };
                q = (q * d) % n;
            }
            lam += batch;
            iters += batch;
            let g = q.gcd(n);
            if !g.is_one() {
                if &g != n {
                    return Some(g);
                }
                // backtrack single steps from the saved point
                let mut yb = ys.clone();
                loop {
                    yb = f(&yb);
                    let d = if x >= yb { &x - &yb } else { &yb - &x };
                    let g = d.gcd(n);
                    if !g.is_one() {
                        if &g != n {
                            return Some(g);
                        }
                        break;
                    }
                    if yb == y {
                        break;
                    }
                }
                break;
            }
            if iters >= max_iters {
                break;
            }
        }
    }
    None
}

/// Splits a composite that is > u64, not a perfect power, and not prime.
fn split_big(n: &BigUint) -> Result<BigUint> {
    if let Some(f) = brent_rho_big(n, 1 << 17) {
        return Ok(f);
    }
    for b1 in [2_000u64, 50_000, 1_000_000] {
        for base in [2u64, 3] {
            if let Some(f) = pollard_pm1(n, b1, base) {
                return Ok(f);
            }
        }
    }
    let mut sigma = 6u64;
    for (b1, curves) in [(2_000u64, 40u64), (20_000, 80), (200_000, 400)] {
        for _ in 0..curves {
            if let Some(f) = ecm_stage1(n, sigma, b1) {
                return Ok(f);
            }
            sigma += 1;
        }
    }
    Err(Error::Internal(format!(
        "factoring backends exhausted on {n} ({} bits)",
        n.bits()
    )))
}

/// Full factorization of an arbitrary-precision integer as sorted
/// (prime, exponent) pairs. factor_big(1) = [].
pub fn factor_big(n: &BigUint) -> Result<Vec<(BigUint, u32)>> {
    let mut out: Vec<(BigUint, u32)> = Vec::new();
    if n <= &BigUint::one() {
        return Ok(out);
    }
    if let Some(v) = n.to_u64() {
        return Ok(factor_u64(v)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect());
    }
    let mut m = n.clone();
    for &p in trial_primes() {
        let pb = BigUint::from(p);
        if (&m % &pb).is_zero() {
            let mut e = 0u32;
            while (&m % &pb).is_zero() {
                m /= &pb;
                e += 1;
            }
            out.push((pb, e));
        }
        if m.is_one() || m.to_u64().is_some() {
            break;
        }
    }
    let mut stack = vec![m];
    let mut primes: Vec<BigUint> = Vec::new();
    while let Some(m) = stack.pop() {
        if m.is_one() {
            continue;
        }
        if let Some(v) = m.to_u64() {
            for (p, e) in factor_u64(v) {
                for _ in 0..e {
                    primes.push(BigUint::from(p));
                }
            }
            continue;
        }
        if is_prime_big(&m) {
            primes.push(m);
            continue;
        }
        if let Some((root, k)) = perfect_power(&m) {
            for _ in 0..k {
                stack.push(root.clone());
            }
            continue;
        }
        let f = split_big(&m)?;
        stack.push(&m / &f);
        stack.push(f);
    }
    primes.sort();
    let mut i = 0;
    while i < primes.len() {
        let p = primes[i].clone();
        let mut e = 0u32;
        while i < primes.len() && primes[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort();
    Ok(out)
}

/// n = root^k with k >= 2 maximal, if such a form exists.
fn perfect_power(n: &BigUint) -> Option<(BigUint, u32)> {
    let bits = n.bits();
    for k in (2..=bits.min(64) as u32).rev() {
        let root = n.nth_root(k);
        if root.pow(k) == *n {
            return Some((root, k));
        }
    }
    None
}

/// Natural log of a big integer via the top 53 bits plus a power-of-two
/// shift. Relative error is a couple of ulps, independent of magnitude.
pub fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        return (n.to_u64().expect("fits") as f64).ln();
    }
    let shift = bits - 53;
    let top = (n >> shift).to_u64().expect("53 bits fit") as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Num;

    #[test]
    fn primes_up_to_small() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(13), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(primes_up_to(100).len(), 25);
    }

    #[test]
    fn miller_rabin_matches_sieve() {
        let primes = primes_up_to(20_000);
        let mut idx = 0;
        for n in 0..=20_000u64 {
            let in_sieve = idx < primes.len() && primes[idx] == n;
            if in_sieve {
                idx += 1;
            }
            assert_eq!(is_prime_u64(n), in_sieve, "disagree at {n}");
        }
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(!is_prime_u64(u64::MAX));
    }

    #[test]
    fn factor_u64_roundtrip() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(64), vec![(2, 6)]);
        assert_eq!(
            factor_u64(600_851_475_143),
            vec![(71, 1), (839, 1), (1471, 1), (6857, 1)]
        );
        for n in [2u64, 97, 1 << 32, 999_999_999_989, 10_000_000_000_000_061] {
            let f = factor_u64(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
    }

    #[test]
    fn jacobi_matches_euler_criterion() {
        for &p in primes_up_to(200).iter().skip(1) {
            for a in 1..p as i64 {
                let expect = match powmod(a as u64, (p - 1) / 2, p) {
                    1 => 1i8,
                    x if x == p - 1 => -1,
                    0 => 0,
                    _ => unreachable!(),
                };
                assert_eq!(jacobi(a, p).unwrap(), expect, "a={a} p={p}");
            }
        }
        // multiplicativity in the top argument across a composite modulus
        for a in -30i64..30 {
            for b in -30i64..30 {
                let m = 945u64;
                let lhs = jacobi(a * b, m).unwrap();
                let rhs = jacobi(a, m).unwrap() * jacobi(b, m).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
        assert!(jacobi(3, 10).is_err());
    }

    #[test]
    fn descent_finds_multiplicative_order() {
        // ord_101(2) divides 100; brute force agrees with the descent
        let p = 101u64;
        for a in 2..p {
            let brute = (1..)
                .scan(1u64, |acc, k| {
                    *acc = mulmod(*acc, a, p);
                    Some((k, *acc))
                })
                .find(|&(_, v)| v == 1)
                .unwrap()
                .0;
            let ord = divisor_descent(p - 1, &factor_u64(p - 1), |d| powmod(a, d, p) == 1);
            assert_eq!(ord, brute);
        }
    }

    #[test]
    fn kahan_beats_naive_on_hostile_input() {
        let mut k = KahanSum::new();
        k.add(1.0);
        for _ in 0..10_000_000 {
            k.add(1e-16);
        }
        assert!((k.value() - (1.0 + 1e-9)).abs() < 1e-12);

        // merging partials equals one sequential pass
        let xs: Vec<f64> = (1..=1000).map(|i| 1.0 / i as f64).collect();
        let mut whole = KahanSum::new();
        for &x in &xs {
            whole.add(x);
        }
        let mut merged = KahanSum::new();
        for chunk in xs.chunks(7) {
            let mut part = KahanSum::new();
            for &x in chunk {
                part.add(x);
            }
            merged.merge(part);
        }
        assert_eq!(whole.value(), merged.value());
    }

    #[test]
    fn big_primality_known_values() {
        assert!(is_prime_big(&BigUint::from(1_000_000_000_000_000_009u64)));
        let m127 = (BigUint::one() << 127) - 1u32;
        assert!(is_prime_big(&m127));
        let sq = &m127 * &m127;
        assert!(!is_prime_big(&sq));
    }

    #[test]
    fn factor_big_semiprime_and_powers() {
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(1_000_000_009u64);
        let n = &p * &q;
        assert_eq!(factor_big(&n).unwrap(), vec![(p.clone(), 1), (q, 1)]);
        let cube = p.pow(3u32);
        let big_cube = &cube * BigUint::from(123_456_791u64);
        let f = factor_big(&big_cube).unwrap();
        let back = f
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e));
        assert_eq!(back, big_cube);
        assert!(f.iter().any(|(_, e)| *e == 3));
    }

    #[test]
    fn factor_big_needs_ecm_tier() {
        // both prime factors have 11-digit-rough p-1 and p+1, so rho, p-1 and
        // p+1 all miss; only the elliptic curve tier cracks it
        let n = BigUint::from_str_radix("230693713976887011634040790123020741", 10).unwrap();
        let f = factor_big(&n).unwrap();
        assert_eq!(
            f,
            vec![
                (BigUint::from(61_557_605_176_233_223u64), 1),
                (BigUint::from(3_747_607_031_112_307_667u64), 1),
            ]
        );
    }

    #[test]
    fn ln_big_accuracy() {
        let n = BigUint::one() << 200;
        assert!((ln_big(&n) - 200.0 * std::f64::consts::LN_2).abs() < 1e-12);
        let t = BigUint::from(10u32).pow(30u32);
        let expect = 30.0 * std::f64::consts::LN_10;
        assert!((ln_big(&t) - expect).abs() / expect < 1e-14);
        assert_eq!(ln_big(&BigUint::from(1u32)), 0.0);
    }
}
