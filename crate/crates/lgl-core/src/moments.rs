//! Moment sums of g(n) = gcd(n, u_n): exact power moments, compensated log
//! moments, tail counts, the two ell-sums, and implied-exponent fits.
//!
//! All scans segment [1, x] into fixed windows (see `exec`), compute partials
//! per window, and fold them in window order, so results do not depend on
//! worker count. The power moments accumulate exactly: u128 fast path per
//! window, spilling to arbitrary precision on demand.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::arith::{ln_big, KahanSum};
use crate::error::{Error, Result};
use crate::exec::{map_segments, SCAN_SEGMENT};
use crate::sieve::RankTable;

fn check_scan(table: &RankTable, x: u64, lambda: u32) -> Result<()> {
    if x == 0 || x > table.n {
        return Err(Error::InvalidArgument(format!(
            "x = {x} outside table range 1..={}",
            table.n
        )));
    }
    if lambda == 0 {
        return Err(Error::InvalidArgument("lambda must be >= 1".into()));
    }
    Ok(())
}

fn pow_u128(base: u64, exp: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base as u128)?;
    }
    Some(acc)
}

/// Exact S_lambda(x) = sum over n <= x of g(n)^lambda.
pub fn moment_sum(table: &RankTable, x: u64, lambda: u32) -> Result<BigUint> {
    check_scan(table, x, lambda)?;
    let partials = map_segments(1, x, SCAN_SEGMENT, |s, e| {
        let mut small: u128 = 0;
        let mut big = BigUint::zero();
        for n in s..=e {
            let g = table.g[n as usize];
            match pow_u128(g, lambda).and_then(|t| small.checked_add(t)) {
                Some(next) => small = next,
                None => {
                    big += BigUint::from(small);
                    small = 0;
                    match pow_u128(g, lambda) {
                        Some(t) => small = t,
                        None => big += BigUint::from(g).pow(lambda),
                    }
                }
            }
        }
        big + BigUint::from(small)
    });
    Ok(partials.into_iter().sum())
}

/// Sum over n <= x of (log g(n))^lambda, Kahan-compensated.
pub fn log_moment_sum(table: &RankTable, x: u64, lambda: u32) -> Result<f64> {
    check_scan(table, x, lambda)?;
    let partials = map_segments(1, x, SCAN_SEGMENT, |s, e| {
        let mut acc = KahanSum::new();
        for n in s..=e {
            let g = table.g[n as usize];
            if g > 1 {
                acc.add((g as f64).ln().powi(lambda as i32));
            }
        }
        acc
    });
    let mut total = KahanSum::new();
    for p in partials {
        total.merge(p);
    }
    Ok(total.value())
}

/// #{n <= x : g(n) > y}.
pub fn tail_count(table: &RankTable, x: u64, y: f64) -> Result<u64> {
    check_scan(table, x, 1)?;
    let partials = map_segments(1, x, SCAN_SEGMENT, |s, e| {
        (s..=e)
            .filter(|&n| table.g[n as usize] as f64 > y)
            .count() as u64
    });
    Ok(partials.into_iter().sum())
}

/// Head and truncated tail of the ell-sums.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllSums {
    /// Sum over n <= x, z(n) defined, of n^lambda / ell(n).
    pub head: f64,
    /// Sum over x < n <= trunc_x, z(n) defined, of 1 / ell(n).
    pub tail: f64,
    /// Where the infinite tail was cut off.
    pub trunc_x: u64,
}

/// Both ell-sums in one call. Terms with gcd(n, a2) > 1 have no ell and are
/// skipped; with |a2| = 1 (the default here) nothing is skipped.
pub fn ell_sums(table: &RankTable, x: u64, trunc_x: u64, lambda: u32) -> Result<EllSums> {
    check_scan(table, x, lambda)?;
    if trunc_x < x || trunc_x > table.n {
        return Err(Error::InvalidArgument(format!(
            "truncation point {trunc_x} must lie in [{x}, {}]",
            table.n
        )));
    }
    let ell = |n: u64| -> Option<f64> {
        let z = table.z[n as usize];
        if z == 0 {
            return None;
        }
        let g = crate::arith::gcd_u64(n, z);
        Some(((n / g) as u128 * z as u128) as f64)
    };
    let head_parts = map_segments(1, x, SCAN_SEGMENT, |s, e| {
        let mut acc = KahanSum::new();
        for n in s..=e {
            if let Some(l) = ell(n) {
                acc.add((n as f64).powi(lambda as i32) / l);
            }
        }
        acc
    });
    let mut head = KahanSum::new();
    for p in head_parts {
        head.merge(p);
    }
    let mut tail = KahanSum::new();
    if trunc_x > x {
        let tail_parts = map_segments(x + 1, trunc_x, SCAN_SEGMENT, |s, e| {
            let mut acc = KahanSum::new();
            for n in s..=e {
                if let Some(l) = ell(n) {
                    acc.add(1.0 / l);
                }
            }
            acc
        });
        for p in tail_parts {
            tail.merge(p);
        }
    }
    Ok(EllSums {
        head: head.value(),
        tail: tail.value(),
        trunc_x,
    })
}

/// The exponent c making S = x^{lambda + 1 - c log_3 x / log_2 x}.
pub fn implied_exponent(x: u64, s: f64, lambda: u32) -> Result<f64> {
    if s < 1.0 {
        return Err(Error::InvalidArgument("implied exponent needs S >= 1".into()));
    }
    implied_exponent_from_ln(x, s.ln(), lambda)
}

/// Same fit with log S supplied directly, for sums too large for f64.
pub fn implied_exponent_from_ln(x: u64, ln_s: f64, lambda: u32) -> Result<f64> {
    if x < 16 {
        return Err(Error::InvalidArgument(format!(
            "implied exponent needs x >= 16 so the triple log is positive, got {x}"
        )));
    }
    let lx = (x as f64).ln();
    let l2 = lx.ln();
    let l3 = l2.ln();
    Ok((lambda as f64 + 1.0 - ln_s / lx) * l2 / l3)
}

/// Moment scan at several checkpoints.
#[derive(Clone, Debug)]
pub struct MomentReport {
    pub lambda: u32,
    pub checkpoints: Vec<u64>,
    pub sums: Vec<BigUint>,
    pub log_sums: Vec<f64>,
    pub implied_exponents: Vec<f64>,
    /// log-moment divided by x; empirically this mean settles toward a
    /// constant as x grows.
    pub mean_log_g: Vec<f64>,
}

pub fn moment_report(table: &RankTable, checkpoints: &[u64], lambda: u32) -> Result<MomentReport> {
    if checkpoints.is_empty() {
        return Err(Error::InvalidArgument("need at least one checkpoint".into()));
    }
    for w in checkpoints.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidArgument(
                "checkpoints must be strictly ascending".into(),
            ));
        }
    }
    let mut sums = Vec::with_capacity(checkpoints.len());
    let mut log_sums = Vec::with_capacity(checkpoints.len());
    let mut implied = Vec::with_capacity(checkpoints.len());
    let mut ratios = Vec::with_capacity(checkpoints.len());
    for &x in checkpoints {
        let s = moment_sum(table, x, lambda)?;
        let ls = log_moment_sum(table, x, lambda)?;
        let c = if x >= 16 {
            implied_exponent_from_ln(x, ln_big(&s), lambda)?
        } else {
            f64::NAN
        };
        sums.push(s);
        log_sums.push(ls);
        implied.push(c);
        ratios.push(ls / x as f64);
    }
    Ok(MomentReport {
        lambda,
        checkpoints: checkpoints.to_vec(),
        sums,
        log_sums,
        implied_exponents: implied,
        mean_log_g: ratios,
    })
}
