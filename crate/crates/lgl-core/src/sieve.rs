//! Batch tables of z(n), g(n) and omega(n) up to N, with binary snapshots,
//! plus the queries built on top of them: B_z membership counts with their
//! conjecture-exponent ordinates, large-gcd counts, and enumeration of the
//! self-dividing set {n : n | u_n}.
//!
//! Construction order: smallest-prime-factor sieve, per-prime ranks (divisor
//! descent, factoring q - eps through the spf array when it is in range),
//! prime-power lifts, then one pass over all n combining prime-power ranks by
//! lcm along the spf factorization while also computing g(n) and omega(n).
//! The combining pass reads from a compact sorted lookup rather than the
//! growing table itself, so segments stay independent and can run on any
//! number of workers with identical results.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::arith::{factor_u64, gcd_u64};
use crate::error::{Error, Result};
use crate::lucas::{quad_symbol, LucasParams};
use crate::rank::rank_oracle_default;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default entries per construction segment.
pub const TABLE_SEGMENT: usize = 1 << 22;

/// Largest supported table size (index arrays use 32-bit smallest prime
/// factors).
pub const MAX_TABLE_N: u64 = u32::MAX as u64;

const SNAPSHOT_MAGIC: &[u8; 4] = b"LGL1";

pub struct RankTable {
    pub params: LucasParams,
    /// Table covers 1..=n.
    pub n: u64,
    /// z[i] = rank of appearance of i, or 0 where gcd(i, a2) > 1. Index 0
    /// unused.
    pub z: Vec<u64>,
    /// g[i] = gcd(i, u_i). Index 0 unused.
    pub g: Vec<u64>,
    /// Number of distinct prime factors. omega[1] = 0.
    pub omega: Vec<u8>,
    /// Smallest prime factor; spf[p] = p exactly for primes.
    pub spf: Vec<u32>,
}

fn spf_factor(mut x: u64, spf: &[u32]) -> Vec<(u64, u32)> {
    debug_assert!((x as usize) < spf.len());
    let mut out = Vec::new();
    while x > 1 {
        let q = spf[x as usize] as u64;
        let mut e = 0u32;
        while x % q == 0 {
            x /= q;
            e += 1;
        }
        out.push((q, e));
    }
    out
}

/// z(q) for a prime q, factoring q - eps via the spf table when possible.
fn prime_rank_in_table(p: &LucasParams, q: u64, spf: &[u32]) -> Result<u64> {
    if q == 2 || (p.delta as i128).rem_euclid(q as i128) == 0 {
        return rank_oracle_default(p, q).map(|r| r.z);
    }
    let eps = quad_symbol(p.delta, q)?;
    let start = if eps == 1 { q - 1 } else { q + 1 };
    let divides = |d: u64| p.term_mod(d, q).map(|r| r.value == 0).unwrap_or(false);
    if !divides(start) {
        return Err(Error::Internal(format!(
            "u_{{q - (delta/q)}} not divisible at prime {q}"
        )));
    }
    let factors = if (start as usize) < spf.len() {
        spf_factor(start, spf)
    } else {
        factor_u64(start)
    };
    Ok(crate::arith::divisor_descent(start, &factors, divides))
}

fn fill_segment(
    p: &LucasParams,
    spf: &[u32],
    lookup: &[(u64, u64)],
    base: usize,
    zc: &mut [u64],
    gc: &mut [u64],
    oc: &mut [u8],
) {
    for i in 0..zc.len() {
        let n = (base + i + 1) as u64;
        let mut m = n;
        let mut omega = 0u8;
        let mut zval: u64 = 1;
        let mut defined = true;
        while m > 1 {
            let q = spf[m as usize] as u64;
            let mut pe = 1u64;
            while m % q == 0 {
                m /= q;
                pe *= q;
            }
            omega += 1;
            if defined {
                let idx = lookup
                    .binary_search_by_key(&pe, |&(v, _)| v)
                    .unwrap_or_else(|_| panic!("prime power {pe} missing from rank lookup"));
                let zq = lookup[idx].1;
                if zq == 0 {
                    defined = false;
                } else {
                    let g = gcd_u64(zval, zq);
                    let l = (zval / g) as u128 * zq as u128;
                    debug_assert!(l <= u64::MAX as u128);
                    zval = l as u64;
                }
            }
        }
        zc[i] = if defined { zval } else { 0 };
        oc[i] = omega;
        gc[i] = gcd_u64(n, p.term_mod(n, n).expect("n >= 1").value);
    }
}

fn fill_tables(
    p: &LucasParams,
    spf: &[u32],
    lookup: &[(u64, u64)],
    segment: usize,
    z: &mut [u64],
    g: &mut [u64],
    omega: &mut [u8],
) {
    #[cfg(feature = "parallel")]
    if crate::exec::parallel_enabled() {
        z.par_chunks_mut(segment)
            .zip(g.par_chunks_mut(segment))
            .zip(omega.par_chunks_mut(segment))
            .enumerate()
            .for_each(|(ci, ((zc, gc), oc))| {
                fill_segment(p, spf, lookup, ci * segment, zc, gc, oc)
            });
        return;
    }
    for (ci, ((zc, gc), oc)) in z
        .chunks_mut(segment)
        .zip(g.chunks_mut(segment))
        .zip(omega.chunks_mut(segment))
        .enumerate()
    {
        fill_segment(p, spf, lookup, ci * segment, zc, gc, oc);
    }
}

impl RankTable {
    pub fn build(params: &LucasParams, n: u64) -> Result<Self> {
        Self::build_with_segment(params, n, TABLE_SEGMENT)
    }

    pub fn build_with_segment(params: &LucasParams, n: u64, segment: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("table needs N >= 1".into()));
        }
        if n > MAX_TABLE_N {
            return Err(Error::CapacityExceeded(format!(
                "table size {n} exceeds the {MAX_TABLE_N} cap"
            )));
        }
        if segment == 0 {
            return Err(Error::InvalidArgument("segment size must be positive".into()));
        }
        let len = n as usize + 1;

        let mut spf = vec![0u32; len];
        for i in 2..len {
            if spf[i] == 0 {
                for j in (i..len).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let primes: Vec<u64> = (2..len)
            .filter(|&i| spf[i] as usize == i)
            .map(|i| i as u64)
            .collect();

        // per-prime ranks; 0 marks rank-undefined primes (q | a2)
        let a2_abs = params.a2.unsigned_abs();
        let rank_of_prime = |&q: &u64| -> Result<u64> {
            if a2_abs % q == 0 {
                Ok(0)
            } else {
                prime_rank_in_table(params, q, &spf)
            }
        };
        #[cfg(feature = "parallel")]
        let prime_z: Vec<u64> = if crate::exec::parallel_enabled() {
            primes
                .par_chunks(4096)
                .map(|c| c.iter().map(rank_of_prime).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect()
        } else {
            primes.iter().map(rank_of_prime).collect::<Result<Vec<_>>>()?
        };
        #[cfg(not(feature = "parallel"))]
        let prime_z: Vec<u64> = primes.iter().map(rank_of_prime).collect::<Result<Vec<_>>>()?;

        // prime-power lifts: z(q^k) is z(q^{k-1}) or q times it
        let mut lookup: Vec<(u64, u64)> = primes
            .iter()
            .zip(prime_z.iter())
            .map(|(&q, &z)| (q, z))
            .collect();
        for (&q, &zq) in primes.iter().zip(prime_z.iter()) {
            if zq == 0 {
                let mut pe = q;
                while pe <= n / q {
                    pe *= q;
                    lookup.push((pe, 0));
                }
                continue;
            }
            let mut pe = q;
            let mut zcur = zq;
            while pe <= n / q {
                pe *= q;
                if params.term_mod(zcur, pe)?.value != 0 {
                    zcur = zcur.checked_mul(q).ok_or_else(|| {
                        Error::CapacityExceeded(format!("z({pe}) overflows u64"))
                    })?;
                    if params.term_mod(zcur, pe)?.value != 0 {
                        return Err(Error::Internal(format!(
                            "rank lift failed at prime power {pe}"
                        )));
                    }
                }
                lookup.push((pe, zcur));
            }
        }
        lookup.sort_unstable();

        let mut z = vec![0u64; len];
        let mut g = vec![0u64; len];
        let mut omega = vec![0u8; len];
        fill_tables(
            params,
            &spf,
            &lookup,
            segment,
            &mut z[1..],
            &mut g[1..],
            &mut omega[1..],
        );

        Ok(RankTable {
            params: *params,
            n,
            z,
            g,
            omega,
            spf,
        })
    }

    /// Binary layout: "LGL1", then little-endian u64 N, i64 a1, i64 a2, then
    /// z[1..=N] and g[1..=N] as little-endian u64. spf and omega are cheap to
    /// resieve, so they are not stored.
    pub fn save_snapshot(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(SNAPSHOT_MAGIC)?;
        w.write_all(&self.n.to_le_bytes())?;
        w.write_all(&self.params.a1.to_le_bytes())?;
        w.write_all(&self.params.a2.to_le_bytes())?;
        for arr in [&self.z, &self.g] {
            for chunk in arr[1..].chunks(4096) {
                let mut buf = Vec::with_capacity(chunk.len() * 8);
                for &v in chunk {
                    buf.extend_from_slice(&v.to_le_bytes());
                }
                w.write_all(&buf)?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads back (N, a1, a2) without loading the arrays.
    pub fn snapshot_header(path: &Path) -> Result<(u64, i64, i64)> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::Snapshot(format!(
                "{} is not a rank-table snapshot",
                path.display()
            )));
        }
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let a1 = i64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let a2 = i64::from_le_bytes(b8);
        Ok((n, a1, a2))
    }

    /// Loads a snapshot, insisting on matching coefficients. spf and omega
    /// are rebuilt by sieve.
    pub fn load_snapshot(params: &LucasParams, path: &Path) -> Result<Self> {
        let (n, a1, a2) = Self::snapshot_header(path)?;
        if a1 != params.a1 || a2 != params.a2 {
            return Err(Error::Snapshot(format!(
                "snapshot {} was built for (a1, a2) = ({a1}, {a2}), not ({}, {})",
                path.display(),
                params.a1,
                params.a2
            )));
        }
        if n == 0 || n > MAX_TABLE_N {
            return Err(Error::Snapshot(format!("implausible table size {n}")));
        }
        let expected = 28 + 16 * n;
        let actual = std::fs::metadata(path)?.len();
        if actual != expected {
            return Err(Error::Snapshot(format!(
                "snapshot {} is {actual} bytes, expected {expected}",
                path.display()
            )));
        }
        let mut r = BufReader::new(File::open(path)?);
        let mut skip = [0u8; 28];
        r.read_exact(&mut skip)?;
        let len = n as usize + 1;
        let mut read_arr = || -> Result<Vec<u64>> {
            let mut arr = vec![0u64; len];
            let mut buf = vec![0u8; 8 * 4096];
            let mut i = 1usize;
            while i < len {
                let take = (len - i).min(4096);
                let bytes = &mut buf[..8 * take];
                r.read_exact(bytes)?;
                for (k, v) in bytes.chunks_exact(8).enumerate() {
                    arr[i + k] = u64::from_le_bytes(v.try_into().expect("8-byte chunk"));
                }
                i += take;
            }
            Ok(arr)
        };
        let z = read_arr()?;
        let g = read_arr()?;

        let mut spf = vec![0u32; len];
        for i in 2..len {
            if spf[i] == 0 {
                for j in (i..len).step_by(i) {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                }
            }
        }
        let mut omega = vec![0u8; len];
        for (i, slot) in omega.iter_mut().enumerate().skip(2) {
            let mut m = i;
            let mut w = 0u8;
            while m > 1 {
                let q = spf[m] as usize;
                while m % q == 0 {
                    m /= q;
                }
                w += 1;
            }
            *slot = w;
        }
        Ok(RankTable {
            params: *params,
            n,
            z,
            g,
            omega,
            spf,
        })
    }

    /// Snapshot-backed build: loads `path` when it covers the request with
    /// matching coefficients, rebuilds (and overwrites) when the file is
    /// absent or too small, and refuses to touch a file built for different
    /// coefficients.
    pub fn load_or_build(params: &LucasParams, n: u64, path: &Path) -> Result<Self> {
        if path.exists() {
            let (file_n, a1, a2) = Self::snapshot_header(path)?;
            if a1 != params.a1 || a2 != params.a2 {
                return Err(Error::Snapshot(format!(
                    "snapshot {} was built for (a1, a2) = ({a1}, {a2}), not ({}, {})",
                    path.display(),
                    params.a1,
                    params.a2
                )));
            }
            if file_n >= n {
                return Self::load_snapshot(params, path);
            }
        }
        let table = Self::build(params, n)?;
        table.save_snapshot(path)?;
        Ok(table)
    }

    fn check_range(&self, x: u64) -> Result<()> {
        if x == 0 || x > self.n {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside table range 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    /// #{n <= x : z(n) defined and gcd(n, z(n)) > t}.
    pub fn large_gcd_count(&self, x: u64, t: f64) -> Result<u64> {
        self.check_range(x)?;
        let mut count = 0u64;
        for i in 1..=x as usize {
            if self.z[i] != 0 && gcd_u64(i as u64, self.z[i]) as f64 > t {
                count += 1;
            }
        }
        Ok(count)
    }

    /// All n <= x with n | u_n, ascending.
    pub fn enumerate_self_dividing(&self, x: u64) -> Result<Vec<u64>> {
        self.check_range(x)?;
        Ok((1..=x as usize)
            .filter(|&i| self.g[i] == i as u64)
            .map(|i| i as u64)
            .collect())
    }

    /// #{n <= x : omega(n) > a}.
    pub fn omega_tail_count(&self, x: u64, a: f64) -> Result<u64> {
        self.check_range(x)?;
        Ok((1..=x as usize)
            .filter(|&i| self.omega[i] as f64 > a)
            .count() as u64)
    }
}

/// One B_z trajectory: member counts of {n : z(n) = z} at each checkpoint,
/// with the conjecture exponent where defined.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BzSeries {
    pub z: u64,
    pub checkpoints: Vec<u64>,
    pub counts: Vec<u64>,
    /// Entry is None when the count is zero (log of zero) or t < 16 (third
    /// log not positive).
    pub ordinates: Vec<Option<f64>>,
}

/// log L(t) = log t * log_3 t / log_2 t, defined for t >= 16.
pub fn log_l(t: u64) -> Result<f64> {
    if t < 16 {
        return Err(Error::InvalidArgument(format!(
            "log L needs t >= 16 so the triple log is positive, got {t}"
        )));
    }
    let lt = (t as f64).ln();
    Ok(lt * lt.ln().ln() / lt.ln())
}

/// The exponent c with count = t / L(t)^c.
pub fn bz_ordinate(t: u64, count: u64) -> Result<f64> {
    if count < 1 {
        return Err(Error::InvalidArgument("ordinate needs count >= 1".into()));
    }
    Ok((t as f64 / count as f64).ln() / log_l(t)?)
}

/// Counts members of each requested B_z at each checkpoint in one scan of
/// the table.
pub fn bz_counts(table: &RankTable, zs: &[u64], checkpoints: &[u64]) -> Result<Vec<BzSeries>> {
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
    let &tmax = checkpoints.last().expect("nonempty");
    if checkpoints[0] == 0 {
        return Err(Error::InvalidArgument("checkpoints must be >= 1".into()));
    }
    table.check_range(tmax)?;

    let mut counts: Vec<Vec<u64>> = vec![Vec::with_capacity(checkpoints.len()); zs.len()];
    let mut running: Vec<u64> = vec![0; zs.len()];
    let mut ci = 0usize;
    for n in 1..=tmax {
        let zv = table.z[n as usize];
        if zv != 0 {
            // zs lists are tiny (tens); linear scan beats hashing here
            for (k, &zq) in zs.iter().enumerate() {
                if zq == zv {
                    running[k] += 1;
                }
            }
        }
        while ci < checkpoints.len() && checkpoints[ci] == n {
            for k in 0..zs.len() {
                counts[k].push(running[k]);
            }
            ci += 1;
        }
    }
    Ok(zs
        .iter()
        .zip(counts)
        .map(|(&z, counts)| {
            let ordinates = checkpoints
                .iter()
                .zip(&counts)
                .map(|(&t, &c)| {
                    if c >= 1 && t >= 16 {
                        Some(bz_ordinate(t, c).expect("validated domain"))
                    } else {
                        None
                    }
                })
                .collect();
            BzSeries {
                z,
                checkpoints: checkpoints.to_vec(),
                counts,
                ordinates,
            }
        })
        .collect())
}

/// Geometric checkpoint grid with `per_decade` points per decade, clamped to
/// [t_min, t_max], always including both endpoints. Gives plots a uniform
/// logarithmic abscissa without the caller hand-listing thresholds.
pub fn default_checkpoints(t_min: u64, t_max: u64, per_decade: u32) -> Result<Vec<u64>> {
    if t_min < 1 || t_min > t_max {
        return Err(Error::InvalidArgument(format!(
            "bad checkpoint range [{t_min}, {t_max}]"
        )));
    }
    if per_decade == 0 {
        return Err(Error::InvalidArgument("need at least one point per decade".into()));
    }
    let lo = (t_min as f64).log10();
    let hi = (t_max as f64).log10();
    let steps = ((hi - lo) * per_decade as f64).ceil() as u64;
    let mut out = vec![t_min];
    for k in 1..steps {
        let t = 10f64.powf(lo + (hi - lo) * k as f64 / steps as f64).round() as u64;
        let t = t.clamp(t_min, t_max);
        if t > *out.last().expect("nonempty") {
            out.push(t);
        }
    }
    if t_max > *out.last().expect("nonempty") {
        out.push(t_max);
    }
    Ok(out)
}
