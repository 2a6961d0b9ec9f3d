//! Validated Lucas-sequence parameters and term evaluation.
//!
//! A `LucasParams` is the pair (a1, a2) of the recurrence
//! u_n = a1 u_{n-1} + a2 u_{n-2} with u_0 = 0, u_1 = 1, checked to be
//! coprime, nonzero, and non-degenerate. Term access comes in three speeds:
//! exact (BigInt, digit-budgeted), modular with u64 modulus, and modular with
//! arbitrary-precision modulus and index.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{self, mulmod};
use crate::error::{Error, Result};

/// Default cap on exact-term size, in decimal digits.
pub const DEFAULT_TERM_DIGITS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LucasParams {
    pub a1: i64,
    pub a2: i64,
    /// Discriminant a1^2 + 4 a2 of the characteristic polynomial.
    pub delta: i64,
    /// Always false on a constructed value; kept so callers can see the
    /// invariant they are relying on.
    pub degenerate: bool,
}

/// A normalized residue u_n mod m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub value: u64,
    pub modulus: u64,
}

/// Accepts (a1, a2) iff both are nonzero, coprime, the discriminant is
/// nonzero, and the sequence is non-degenerate.
///
/// The root ratio is a root of unity in a quadratic field, so its order lies
/// in {1, 2, 3, 4, 6} and degeneracy is equivalent to u_n = 0 for some
/// n in [2, 6]. That makes the check finite: iterate six terms and look for
/// a zero.
pub fn validate_params(a1: i64, a2: i64) -> Result<LucasParams> {
    if a1 == 0 || a2 == 0 {
        return Err(Error::InvalidCoefficients {
            a1,
            a2,
            reason: "coefficients must be nonzero",
        });
    }
    if arith::gcd_u64(a1.unsigned_abs(), a2.unsigned_abs()) != 1 {
        return Err(Error::InvalidCoefficients {
            a1,
            a2,
            reason: "coefficients must be coprime",
        });
    }
    let delta = a1
        .checked_mul(a1)
        .and_then(|s| s.checked_add(a2.checked_mul(4)?))
        .ok_or(Error::InvalidCoefficients {
            a1,
            a2,
            reason: "discriminant overflows i64",
        })?;
    if delta == 0 {
        return Err(Error::DegenerateSequence {
            a1,
            a2,
            reason: "discriminant is zero",
        });
    }
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    for n in 2..=6u32 {
        let next = a1 * &cur + a2 * &prev;
        if next.is_zero() {
            return Err(Error::DegenerateSequence {
                a1,
                a2,
                reason: match n {
                    2 => "u_2 = 0",
                    3 => "u_3 = 0",
                    4 => "u_4 = 0",
                    5 => "u_5 = 0",
                    _ => "u_6 = 0",
                },
            });
        }
        prev = cur;
        cur = next;
    }
    Ok(LucasParams {
        a1,
        a2,
        delta,
        degenerate: false,
    })
}

impl LucasParams {
    pub fn new(a1: i64, a2: i64) -> Result<Self> {
        validate_params(a1, a2)
    }

    pub fn fibonacci() -> Self {
        validate_params(1, 1).expect("Fibonacci parameters are valid")
    }

    /// a1 reduced into [0, m).
    #[inline]
    pub fn a1_mod(&self, m: u64) -> u64 {
        (self.a1 as i128).rem_euclid(m as i128) as u64
    }

    /// a2 reduced into [0, m).
    #[inline]
    pub fn a2_mod(&self, m: u64) -> u64 {
        (self.a2 as i128).rem_euclid(m as i128) as u64
    }

    /// Exact u_n under the default digit budget.
    pub fn term(&self, n: u64) -> Result<BigInt> {
        self.term_with_budget(n, DEFAULT_TERM_DIGITS)
    }

    /// Exact u_n, erroring once intermediate magnitude exceeds `max_digits`
    /// decimal digits. Fast doubling, so cost is O(log n) big multiplies.
    pub fn term_with_budget(&self, n: u64, max_digits: u64) -> Result<BigInt> {
        // 10^d needs d*log2(10) bits; the slack absorbs the final add
        let bit_budget = (max_digits as f64 * std::f64::consts::LOG2_10) as u64 + 64;
        let (mut u, mut v) = (BigInt::zero(), BigInt::one()); // (u_k, u_{k+1}), k = 0
        if n == 0 {
            return Ok(u);
        }
        let a1 = BigInt::from(self.a1);
        let a2 = BigInt::from(self.a2);
        for i in (0..64 - n.leading_zeros() as u64).rev() {
            // (u_k, u_{k+1}) -> (u_{2k}, u_{2k+1})
            let even = &u * (2 * &v - &a1 * &u);
            let odd = &v * &v + &a2 * &u * &u;
            if (n >> i) & 1 == 1 {
                let next = &a1 * &odd + &a2 * &even;
                u = odd;
                v = next;
            } else {
                u = even;
                v = odd;
            }
            if u.magnitude().bits().max(v.magnitude().bits()) > bit_budget {
                return Err(Error::CapacityExceeded(format!(
                    "u_{n} exceeds the {max_digits}-digit term budget"
                )));
            }
        }
        Ok(u)
    }

    /// u_n mod m by fast doubling with u128 intermediates.
    pub fn term_mod(&self, n: u64, m: u64) -> Result<Residue> {
        if m == 0 {
            return Err(Error::InvalidArgument("modulus must be >= 1".into()));
        }
        if m == 1 {
            return Ok(Residue { value: 0, modulus: 1 });
        }
        let a1 = self.a1_mod(m);
        let a2 = self.a2_mod(m);
        let (mut u, mut v) = (0u64, 1u64);
        if n > 0 {
            for i in (0..64 - n.leading_zeros() as u64).rev() {
                // t = 2 u_{k+1} - a1 u_k, shifted by m to stay nonnegative
                let t = ((2 * v as u128 + (m - mulmod(a1, u, m)) as u128) % m as u128) as u64;
                let even = mulmod(u, t, m);
                let odd = ((mulmod(v, v, m) as u128 + mulmod(a2, mulmod(u, u, m), m) as u128)
                    % m as u128) as u64;
                if (n >> i) & 1 == 1 {
                    let next = ((mulmod(a1, odd, m) as u128 + mulmod(a2, even, m) as u128)
                        % m as u128) as u64;
                    u = odd;
                    v = next;
                } else {
                    u = even;
                    v = odd;
                }
            }
        }
        Ok(Residue { value: u, modulus: m })
    }

    /// u_n mod m for arbitrary-precision index and modulus.
    pub fn term_mod_big(&self, n: &BigUint, m: &BigUint) -> Result<BigUint> {
        if m.is_zero() {
            return Err(Error::InvalidArgument("modulus must be >= 1".into()));
        }
        if m.is_one() {
            return Ok(BigUint::zero());
        }
        let a1 = mod_floor_big(self.a1, m);
        let a2 = mod_floor_big(self.a2, m);
        let (mut u, mut v) = (BigUint::zero(), BigUint::one());
        for i in (0..n.bits()).rev() {
            let t = ((&v << 1u32) + m - (&a1 * &u) % m) % m;
            let even = (&u * &t) % m;
            let odd = (&v * &v + &a2 * &u % m * &u) % m;
            if n.bit(i) {
                let next = (&a1 * &odd + &a2 * &even) % m;
                u = odd;
                v = next;
            } else {
                u = even;
                v = odd;
            }
        }
        Ok(u)
    }

    /// Iterator over u_0 mod m, u_1 mod m, ... by direct recurrence. This is
    /// the reference path the oracles scan.
    pub fn mod_seq(&self, m: u64) -> ModSeq {
        assert!(m >= 1, "modulus must be >= 1");
        ModSeq {
            a1: self.a1_mod(m),
            a2: self.a2_mod(m),
            m,
            cur: 0,
            next: 1 % m,
        }
    }
}

/// x mod m in [0, m) for signed x.
fn mod_floor_big(x: i64, m: &BigUint) -> BigUint {
    let r = BigInt::from(x).mod_floor(&BigInt::from(m.clone()));
    r.to_biguint().expect("floor mod of positive modulus")
}

/// Infinite iterator of residues u_0, u_1, ... mod m.
#[derive(Clone, Debug)]
pub struct ModSeq {
    a1: u64,
    a2: u64,
    m: u64,
    cur: u64,
    next: u64,
}

impl Iterator for ModSeq {
    type Item = u64;

    #[inline]
    fn next(&mut self) -> Option<u64> {
        let out = self.cur;
        let step =
            ((mulmod(self.a1, self.next, self.m) as u128 + mulmod(self.a2, self.cur, self.m) as u128)
                % self.m as u128) as u64;
        self.cur = self.next;
        self.next = step;
        Some(out)
    }
}

/// Jacobi symbol (a / m) for odd m; the Legendre symbol when m is prime.
pub fn quad_symbol(a: i64, m: u64) -> Result<i8> {
    arith::jacobi(a, m)
}
