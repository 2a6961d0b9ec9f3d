//! Factory for self-dividing indices of the form n = 2sM_y.
//!
//! M_y = lcm(1..⌊y⌋) and s runs over products of r harvested primes. Every
//! prime q that the harvest admits has q ∓ 1 built from prime powers ≤ y, so
//! the rank of each prime power dividing n = 2sM_y again divides n, and n | u_n.
//! Assembly re-verifies that divisibility on every candidate and refuses to
//! emit anything that fails it.

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, is_prime_u64, jacobi, primes_up_to};
use crate::error::{Error, Result};
use crate::lucas::LucasParams;

/// Default exponent tying z to y in unconditional mode.
pub const DEFAULT_V: f64 = 3.516;

/// Upper end of the harvest window the prime sieve will accept.
pub const MAX_HARVEST_Z: f64 = 1e8;

/// ⌊y⌋ above this would put lcm_up_to past roughly a million digits.
const MAX_LCM_ARG: u64 = 2_000_000;

/// Which filter regime a harvest ran under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HarvestMode {
    /// Keep q when q - (Δ/q) is y-smooth and free of prime powers > y.
    Conditional,
    /// Additionally require q ≡ 1 mod 8|Δ|, which forces (Δ/q) = 1.
    Unconditional,
}

impl std::fmt::Display for HarvestMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarvestMode::Conditional => f.write_str("conditional"),
            HarvestMode::Unconditional => f.write_str("unconditional"),
        }
    }
}

/// Harvest window and assembly shape: primes from (y, z], products of r of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarvestConfig {
    pub y: f64,
    pub z: f64,
    pub r: usize,
    pub v: f64,
    pub mode: HarvestMode,
}

impl HarvestConfig {
    /// Explicit window. Invariants: y ≥ 3, z ≥ y, v > 1.
    pub fn new(y: f64, z: f64, r: usize, v: f64, mode: HarvestMode) -> Result<Self> {
        if !y.is_finite() || y < 3.0 {
            return Err(Error::InvalidArgument(format!(
                "harvest floor y = {y} must be a finite real >= 3"
            )));
        }
        if !z.is_finite() || z < y {
            return Err(Error::InvalidArgument(format!(
                "harvest ceiling z = {z} must be finite and >= y = {y}"
            )));
        }
        if !v.is_finite() || v <= 1.0 {
            return Err(Error::InvalidArgument(format!("exponent v = {v} must exceed 1")));
        }
        Ok(Self { y, z, r, v, mode })
    }

    /// Window sized for a target scale x.
    ///
    /// Conditional: y = log x/(log₂x)³, z = exp((log₂x)² - log₂x·log₄x),
    /// r = ⌊log x/(log₂x)²⌋. Unconditional: y = log x/log₂x, z = y^v,
    /// r = ⌊log x/(v·log₂x)⌋. y is clamped up to 3 and r up to 1 so that
    /// small x still produces a runnable configuration.
    pub fn for_target(x: f64, mode: HarvestMode, v: f64) -> Result<Self> {
        if !x.is_finite() || x < 16.0 {
            return Err(Error::InvalidArgument(format!(
                "target x = {x} must be at least 16 for the iterated logs to be defined"
            )));
        }
        let l1 = x.ln();
        let l2 = l1.ln();
        match mode {
            HarvestMode::Conditional => {
                let l3 = l2.ln();
                let l4 = l3.ln();
                let y = (l1 / (l2 * l2 * l2)).max(3.0);
                let z = (l2 * l2 - l2 * l4).exp().max(y);
                let r = ((l1 / (l2 * l2)).floor() as usize).max(1);
                Self::new(y, z, r, v, mode)
            }
            HarvestMode::Unconditional => {
                let y = (l1 / l2).max(3.0);
                let z = y.powf(v).max(y);
                let r = ((l1 / (v * l2)).floor() as usize).max(1);
                Self::new(y, z, r, v, mode)
            }
        }
    }
}

/// lcm(1, 2, ..., ⌊y⌋), computed as ∏_{p ≤ y} p^⌊log y/log p⌋.
pub fn lcm_up_to(y: f64) -> Result<BigUint> {
    if !y.is_finite() || y < 1.0 {
        return Err(Error::InvalidArgument(format!("lcm_up_to needs y >= 1, got {y}")));
    }
    let n = y.floor() as u64;
    if n > MAX_LCM_ARG {
        return Err(Error::CapacityExceeded(format!(
            "lcm(1..{n}) has about {} digits; the budget stops at lcm(1..{MAX_LCM_ARG})",
            (n as f64 * std::f64::consts::LOG10_E).round()
        )));
    }
    let mut acc = BigUint::one();
    for p in primes_up_to(n) {
        let mut pe = p;
        // largest power of p not exceeding n
        while pe <= n / p {
            pe *= p;
        }
        acc *= BigUint::from(pe);
    }
    Ok(acc)
}

/// True when every prime power w^k exactly dividing s is at most y.
///
/// This single check covers both harvest bullets: it implies P(s) ≤ y, and it
/// rules out proper prime powers > y dividing s.
fn prime_powers_bounded(s: u64, y: f64) -> bool {
    debug_assert!(s >= 1);
    factor_u64(s).into_iter().all(|(w, e)| {
        let we = w.checked_pow(e).expect("w^e divides s, so it fits u64");
        we as f64 <= y
    })
}

fn admits(p: &LucasParams, mode: HarvestMode, y: f64, q: u64) -> bool {
    match mode {
        HarvestMode::Conditional => {
            // q ∤ 2Δa2
            if q == 2 || p.delta.rem_euclid(q as i64) == 0 || p.a2.rem_euclid(q as i64) == 0 {
                return false;
            }
            let sym = jacobi(p.delta, q).expect("q is odd") as i64;
            debug_assert!(sym != 0, "q dividing delta was excluded above");
            let shifted = (q as i64 - sym) as u64;
            prime_powers_bounded(shifted, y)
        }
        HarvestMode::Unconditional => {
            let modulus = 8u128 * u128::from(p.delta.unsigned_abs());
            if u128::from(q) % modulus != 1 {
                return false;
            }
            prime_powers_bounded(q - 1, y)
        }
    }
}

/// Primes q ∈ (y, z] passing the mode's shifted-prime filters.
///
/// Deterministic and ordered ascending regardless of worker count.
pub fn harvest(p: &LucasParams, cfg: &HarvestConfig) -> Result<Vec<u64>> {
    if cfg.z > MAX_HARVEST_Z {
        return Err(Error::CapacityExceeded(format!(
            "harvest ceiling z = {:.3e} exceeds the sieve cap {MAX_HARVEST_Z:.0e}",
            cfg.z
        )));
    }
    let candidates: Vec<u64> = primes_up_to(cfg.z.floor() as u64)
        .into_iter()
        .filter(|&q| q as f64 > cfg.y)
        .collect();

    #[cfg(feature = "parallel")]
    if crate::exec::parallel_enabled() {
        use rayon::prelude::*;
        return Ok(candidates
            .par_chunks(4096)
            .flat_map_iter(|chunk| {
                chunk.iter().copied().filter(|&q| admits(p, cfg.mode, cfg.y, q)).collect::<Vec<_>>()
            })
            .collect());
    }

    Ok(candidates.into_iter().filter(|&q| admits(p, cfg.mode, cfg.y, q)).collect())
}

/// A verified self-dividing index n = 2sM_y with s = ∏ s_primes.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoprimeCertificate {
    pub n: BigUint,
    pub y: f64,
    pub m_y: BigUint,
    pub s_primes: Vec<u64>,
    pub mode: HarvestMode,
    pub verified: bool,
}

/// True iff n divides u_n, by fast doubling mod n.
pub fn verify_membership(p: &LucasParams, n: &BigUint) -> bool {
    assert!(!n.is_zero(), "membership is a question about positive n");
    p.term_mod_big(n, n).expect("positive modulus").is_zero()
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let r = idx.len();
    let mut i = r;
    while i > 0 {
        i -= 1;
        if idx[i] != i + n - r {
            idx[i] += 1;
            for j in i + 1..r {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Assemble up to `budget` certificates n = 2sM_y, s a product of r distinct
/// primes from `primes`, in lexicographic combination order over the sorted
/// list. Every candidate is verified before emission; a verification failure
/// aborts the stream, since it means the harvest admitted a prime it should
/// not have.
///
/// Requires a2 = ±1: the containment argument behind the construction breaks
/// down for other constant coefficients, so assembly refuses them.
pub fn assemble(
    p: &LucasParams,
    primes: &[u64],
    r: usize,
    y: f64,
    budget: usize,
    mode: HarvestMode,
) -> Result<Vec<PseudoprimeCertificate>> {
    if p.a2.unsigned_abs() != 1 {
        return Err(Error::InvalidCoefficients {
            a1: p.a1,
            a2: p.a2,
            reason: "the 2sM_y construction needs constant coefficient 1 or -1",
        });
    }
    if r > primes.len() {
        return Err(Error::InvalidArgument(format!(
            "r = {r} exceeds the {} primes supplied",
            primes.len()
        )));
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("supplied primes must be distinct".into()));
    }
    for &q in &sorted {
        if q == 2 || !is_prime_u64(q) || q as f64 <= y {
            return Err(Error::InvalidArgument(format!(
                "{q} is not an odd prime above y = {y}; pass harvest output"
            )));
        }
    }

    let m_y = lcm_up_to(y)?;
    let mut out = Vec::new();
    if budget == 0 {
        return Ok(out);
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        let s_primes: Vec<u64> = idx.iter().map(|&i| sorted[i]).collect();
        let mut n = BigUint::from(2u32) * &m_y;
        for &q in &s_primes {
            n *= BigUint::from(q);
        }
        if !verify_membership(p, &n) {
            return Err(Error::ConstructionFailure(format!(
                "n = 2 * {s_primes:?} * M_y failed u_n = 0 mod n; the harvest filter is unsound"
            )));
        }
        out.push(PseudoprimeCertificate {
            n,
            y,
            m_y: m_y.clone(),
            s_primes,
            mode,
            verified: true,
        });
        if out.len() == budget || !next_combination(&mut idx, sorted.len()) {
            break;
        }
    }
    Ok(out)
}
