//! Local densities `τ_p`, convergence-corrected factors `ω_p` and the
//! truncated Euler product `c_fin`.

use num_rational::BigRational;
use num_traits::Pow;
use rayon::prelude::*;
use serde::Serialize;

use super::polytope::{frac, q};
use super::ConstantsError;
use crate::arith::{is_prime, primes_up_to};
use crate::surface::BoundaryCase;

/// Primes per work unit in the product; fixed so that the floating-point
/// summation order never depends on the thread count.
const CHUNK: usize = 4096;

fn check_prime(p: u64) -> Result<(), ConstantsError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(ConstantsError::NotPrime(p))
    }
}

/// Exponent `k` of the convergence factor `(1 - 1/p)^k`; this is `6 - #D_i`.
pub fn convergence_rank(case: BoundaryCase) -> u32 {
    case.free_rank() as u32
}

/// `k` in the tail envelope `|log ω_p| ≤ k²/(p² - 1)`.
pub fn tail_rank(case: BoundaryCase) -> u32 {
    match case {
        BoundaryCase::BothSingular => 3,
        c => c.free_rank() as u32,
    }
}

/// `τ_p = #Ũ_i(F_p) / p²`.
pub fn tau_p(case: BoundaryCase, p: u64) -> Result<BigRational, ConstantsError> {
    check_prime(p)?;
    let p = p as i64;
    Ok(match case {
        BoundaryCase::BothSingular => q(1) + frac(2, p) - frac(1, p * p),
        c => q(1) + frac(c.free_rank() as i64, p),
    })
}

/// `ω_p = (1 - 1/p)^k τ_p`.
pub fn local_factor(case: BoundaryCase, p: u64) -> Result<BigRational, ConstantsError> {
    let tau = tau_p(case, p)?;
    let base = q(1) - frac(1, p as i64);
    Ok(Pow::pow(base, convergence_rank(case)) * tau)
}

fn local_factor_f64(case: BoundaryCase, p: f64) -> f64 {
    let x = 1.0 / p;
    let k = convergence_rank(case) as f64;
    let log_tau = match case {
        BoundaryCase::BothSingular => (2.0 * x - x * x).ln_1p(),
        c => (c.free_rank() as f64 * x).ln_1p(),
    };
    k * (-x).ln_1p() + log_tau
}

/// Truncated product over `p ≤ prime_bound`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerProduct {
    pub value: f64,
    /// Bound on `|log(c_fin / value)|`, namely `k² / (P - 1)`.
    pub log_tail_bound: f64,
    /// Bound on `|c_fin - value|`.
    pub tail_bound: f64,
    pub prime_bound: u64,
}

/// `∏_{p ≤ P} ω_p` together with a bound on the neglected tail: each factor
/// satisfies `|log ω_p| ≤ k²/(p² - 1)` and `∑_{n > P} 1/(n² - 1) ≤ 1/P`.
pub fn c_finite(case: BoundaryCase, prime_bound: u64) -> Result<EulerProduct, ConstantsError> {
    if prime_bound < 2 {
        return Err(ConstantsError::InvalidPrimeBound(prime_bound));
    }
    let primes = primes_up_to(prime_bound);
    let partial: Vec<f64> = primes
        .par_chunks(CHUNK)
        .map(|chunk| chunk.iter().map(|&p| local_factor_f64(case, p as f64)).sum::<f64>())
        .collect();
    let log_value: f64 = partial.iter().sum();
    let k = tail_rank(case) as f64;
    let log_tail_bound = k * k / (prime_bound - 1).max(1) as f64;
    let value = log_value.exp();
    Ok(EulerProduct {
        value,
        log_tail_bound,
        tail_bound: value * log_tail_bound.exp_m1(),
        prime_bound,
    })
}
