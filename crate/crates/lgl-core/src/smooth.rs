//! Smoothness counts: exact Psi(X, Y), the shifted-prime counts Pi and
//! Pi*, the AP-restricted variant, and Dickman-rho reference values.
//!
//! Counting is always exact; the rho and exp(-U log U) columns exist so
//! reports can show how far desk-scale truth sits from the asymptotics, and
//! are never used as ground truth.

use once_cell::sync::OnceCell;

use crate::arith::{self, primes_up_to};
use crate::error::{Error, Result};
use crate::exec::{map_segments, SCAN_SEGMENT};
use crate::lucas::{quad_symbol, LucasParams};
use serde::Serialize;

/// P(n), the greatest prime factor.
pub fn greatest_prime_factor(n: u64) -> Result<u64> {
    arith::greatest_prime_factor_u64(n)
        .ok_or_else(|| Error::InvalidArgument(format!("P(n) needs n >= 2, got {n}")))
}

/// Greatest-prime-factor table for 0..=limit, with gpf[1] = 1 (the
/// convention that makes p = 2 count in the shifted sums).
fn gpf_sieve(limit: u64) -> Vec<u32> {
    assert!(limit <= u32::MAX as u64, "gpf sieve limited to 32-bit range");
    let len = limit as usize + 1;
    let mut gpf = vec![0u32; len];
    if len > 1 {
        gpf[1] = 1;
    }
    for p in 2..len {
        if gpf[p] == 0 {
            // ascending prime order, so the last write per slot is P(n)
            for j in (p..len).step_by(p) {
                gpf[j] = p as u32;
            }
        }
    }
    gpf
}

/// Exact Psi(X, Y) = #{n <= X : n = 1 or P(n) <= Y} by direct sieve.
pub fn psi_count_sieve(x: u64, y: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let gpf = gpf_sieve(x);
    // the 1 counts n = 1
    1 + gpf[2..=x as usize].iter().filter(|&&g| g as u64 <= y).count() as u64
}

fn psi_rec(x: u64, allowed: usize, primes: &[u64]) -> u64 {
    // every smooth n <= x is 1 or p * (p-smooth m <= x/p) for its largest
    // prime p; summing over the allowed primes visits each n exactly once
    let mut total = 1u64;
    for i in 0..allowed {
        let p = primes[i];
        if p > x {
            break;
        }
        total += psi_rec(x / p, i + 1, primes);
    }
    total
}

/// Exact Psi(X, Y) by the Buchstab-style recursion; O(Psi) work, no tables.
pub fn psi_count_recursive(x: u64, y: u64) -> u64 {
    if x == 0 {
        return 0;
    }
    let primes = primes_up_to(y.min(x));
    psi_rec(x, primes.len(), &primes)
}

/// Exact Psi(X, Y): sieve for X up to 10^7, recursion beyond.
pub fn psi_count(x: u64, y: u64) -> u64 {
    if x <= 10_000_000 {
        psi_count_sieve(x, y)
    } else {
        psi_count_recursive(x, y)
    }
}

/// Pi(X, Y) = #{p <= X : P(p - 1) <= Y}, with P(1) = 1 so p = 2 counts.
pub fn pi_smooth(x: u64, y: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    let gpf = gpf_sieve(x);
    let parts = map_segments(2, x, SCAN_SEGMENT, |s, e| {
        (s..=e)
            .filter(|&p| gpf[p as usize] as u64 == p && gpf[p as usize - 1] as u64 <= y)
            .count() as u64
    });
    parts.into_iter().sum()
}

/// pi(X): prime counting via the same sieve, for domination checks and
/// report columns.
pub fn prime_count(x: u64) -> u64 {
    if x < 2 {
        return 0;
    }
    let gpf = gpf_sieve(x);
    (2..=x as usize).filter(|&p| gpf[p] as usize == p).count() as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PiStarBreakdown {
    /// Odd primes p <= X, p not dividing delta, with P(p - (delta/p)) <= Y.
    pub count: u64,
    /// Primes p <= X dividing 2 delta, where the symbol is degenerate.
    pub excluded: u64,
}

/// Pi*(X, Y) restricted to odd primes coprime to delta, with the excluded
/// primes (p | 2 delta) counted separately.
pub fn pi_smooth_star_detailed(p: &LucasParams, x: u64, y: u64) -> PiStarBreakdown {
    if x < 2 {
        return PiStarBreakdown { count: 0, excluded: 0 };
    }
    let gpf = gpf_sieve(x + 1); // shifted value can reach x + 1
    let parts = map_segments(2, x, SCAN_SEGMENT, |s, e| {
        let mut count = 0u64;
        let mut excluded = 0u64;
        for q in s..=e {
            if gpf[q as usize] as u64 != q {
                continue;
            }
            if q == 2 || (p.delta as i128).rem_euclid(q as i128) == 0 {
                excluded += 1;
                continue;
            }
            let eps = quad_symbol(p.delta, q).expect("odd modulus");
            let shifted = if eps == 1 { q - 1 } else { q + 1 };
            if gpf[shifted as usize] as u64 <= y {
                count += 1;
            }
        }
        (count, excluded)
    });
    let mut out = PiStarBreakdown { count: 0, excluded: 0 };
    for (c, e) in parts {
        out.count += c;
        out.excluded += e;
    }
    out
}

pub fn pi_smooth_star(p: &LucasParams, x: u64, y: u64) -> u64 {
    pi_smooth_star_detailed(p, x, y).count
}

/// #{x < p <= 2x : p prime, P(p - 1) <= x^beta, a | p - 1}.
///
/// beta is any positive real: the interesting regime is (15/(32 sqrt(e)), 1),
/// but beta >= 1 is accepted so unconstrained reference counts (x^beta >=
/// 2x) remain expressible.
pub fn smooth_ap_count(x: u64, beta: f64, a: u64) -> u64 {
    assert!(beta > 0.0, "beta must be positive");
    assert!(a >= 1, "modulus a must be >= 1");
    if x < 2 {
        return 0;
    }
    let hi = 2 * x;
    let gpf = gpf_sieve(hi);
    let bound = (x as f64).powf(beta);
    let parts = map_segments(x + 1, hi, SCAN_SEGMENT, |s, e| {
        (s..=e)
            .filter(|&p| {
                gpf[p as usize] as u64 == p
                    && (p - 1) % a == 0
                    && gpf[p as usize - 1] as f64 <= bound
            })
            .count() as u64
    });
    parts.into_iter().sum()
}

const RHO_STEP_INV: usize = 512;
const RHO_MAX_U: usize = 64;

fn rho_table() -> &'static [f64] {
    static TABLE: OnceCell<Vec<f64>> = OnceCell::new();
    TABLE.get_or_init(|| {
        let h = 1.0 / RHO_STEP_INV as f64;
        let len = RHO_MAX_U * RHO_STEP_INV + 1;
        let mut t = vec![0.0f64; len];
        for (i, slot) in t.iter_mut().enumerate().take(len.min(2 * RHO_STEP_INV + 1)) {
            let u = i as f64 * h;
            // exact on [0, 2]: 1, then 1 - log u
            *slot = if u <= 1.0 { 1.0 } else { 1.0 - u.ln() };
        }
        // u rho(u) = integral of rho over [u-1, u]; solving the trapezoid
        // form for the new endpoint keeps the deep tail positive and
        // relatively accurate, unlike differencing the delay ODE
        for i in 2 * RHO_STEP_INV + 1..len {
            let u = i as f64 * h;
            let interior: f64 = t[i - RHO_STEP_INV + 1..i].iter().sum();
            let acc = 0.5 * t[i - RHO_STEP_INV] + interior;
            t[i] = h * acc / (u - 0.5 * h);
        }
        t
    })
}

/// Dickman rho by table lookup with linear interpolation; exact branches on
/// [0, 2], zero beyond u = 64 (where rho < 1e-115).
pub fn dickman_rho(u: f64) -> f64 {
    if u < 0.0 {
        return 0.0;
    }
    if u <= 1.0 {
        return 1.0;
    }
    if u <= 2.0 {
        return 1.0 - u.ln();
    }
    if u >= RHO_MAX_U as f64 {
        return 0.0;
    }
    let t = rho_table();
    let pos = u * RHO_STEP_INV as f64;
    let i = pos.floor() as usize;
    let frac = pos - i as f64;
    t[i] * (1.0 - frac) + t[i + 1] * frac
}

/// U = log X / log Y, the single parameter of the smooth-count asymptotics.
pub fn smoothness_u(x: u64, y: u64) -> f64 {
    (x as f64).ln() / (y as f64).ln()
}

/// Reference column X * rho(U); 0 when Y < 2 leaves U undefined.
pub fn psi_dickman_reference(x: u64, y: u64) -> f64 {
    if x == 0 || y < 2 {
        return 0.0;
    }
    x as f64 * dickman_rho(smoothness_u(x, y))
}

/// Reference column X * exp(-U log U), the cruder standard estimate.
pub fn psi_canonical_reference(x: u64, y: u64) -> f64 {
    if x == 0 || y < 2 {
        return 0.0;
    }
    let u = smoothness_u(x, y);
    x as f64 * (-u * u.ln()).exp()
}

/// True when (X, Y) sits near the conjectural range U = exp((1+o(1)) sqrt(log X)):
/// within a factor 2 of log U = sqrt(log X). At desk scale nothing is
/// asserted about this regime; reports only tag it.
pub fn near_conjecture_regime(x: u64, y: u64) -> bool {
    if x < 3 || y < 2 {
        return false;
    }
    let u = smoothness_u(x, y);
    if u <= 1.0 {
        return false;
    }
    let ratio = u.ln() / (x as f64).ln().sqrt();
    (0.5..=2.0).contains(&ratio)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothMode {
    Generic,
    Shifted,
    ShiftedStar,
    ShiftedAp,
}

/// One smoothness query as reports carry it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SmoothnessQuery {
    pub x: u64,
    pub y: u64,
    pub u: f64,
    pub mode: SmoothMode,
    pub delta_or_a: i64,
    pub beta: Option<f64>,
}

impl SmoothnessQuery {
    pub fn new(x: u64, y: u64, mode: SmoothMode, delta_or_a: i64, beta: Option<f64>) -> Self {
        SmoothnessQuery {
            x,
            y,
            u: if y >= 2 { smoothness_u(x, y) } else { f64::INFINITY },
            mode,
            delta_or_a,
            beta,
        }
    }
}
