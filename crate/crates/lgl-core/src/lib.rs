//! Finite computations around Lucas sequences u_n = a1 u_{n-1} + a2 u_{n-2}:
//! ranks of appearance z(m), the self-divisibility gcd g(n) = gcd(n, u_n),
//! moment sums of g, smoothness counts, pseudoprime-style constructions of n
//! with n | u_n, and multiplicative-order sums on gcd(a^n - 1, b^n - 1).
//!
//! Scans run data-parallel when the `parallel` feature is on (default) and
//! fall back to an identical sequential path otherwise; outputs are
//! deterministic either way.

pub mod arith;
pub mod construct;
pub mod error;
pub mod exec;
pub mod lucas;
pub mod rank;
pub mod moments;
pub mod sieve;
pub mod smooth;
pub mod torus;

pub use error::{Error, Result};
pub use lucas::{LucasParams, Residue};
