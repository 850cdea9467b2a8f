//! Point counts over `F_p`: the surface by exhaustive scan, its minimal
//! desingularization by blow-up bookkeeping, and the open parts `Ũ_i`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::is_prime;
use crate::constants::{tau_p, ConstantsError};
use crate::surface::BoundaryCase;

/// Largest prime for the exhaustive scan of `P⁴(F_p)`.
pub const SCAN_PRIME_LIMIT: u64 = 50;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("p = {p} exceeds the scan limit {limit}")]
    PrimeTooLarge { p: u64, limit: u64 },
    #[error("blow-up count {combinatorial} disagrees with scan-based count {from_scan} at p = {p}")]
    InternalMismatch { p: u64, combinatorial: u64, from_scan: u64 },
}

fn check_prime(p: u64) -> Result<(), CensusError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(CensusError::NotPrime(p))
    }
}

/// `#S(F_p)`, scanning representatives of `P⁴(F_p)` whose first nonzero entry is 1.
pub fn count_surface_fp(p: u64) -> Result<u64, CensusError> {
    check_prime(p)?;
    if p > SCAN_PRIME_LIMIT {
        return Err(CensusError::PrimeTooLarge { p, limit: SCAN_PRIME_LIMIT });
    }
    let on_s = |x: [u64; 5]| {
        let [x0, x1, x2, x3, x4] = x;
        (x0 * x0 + x0 * x3 + x2 * x4) % p == 0 && (x1 * x3 + (p - 1) * x2 * x2).is_multiple_of(p)
    };
    // Leading 1 in position `lead`, free entries after it.
    let count = (0..5usize)
        .into_par_iter()
        .map(|lead| {
            let free = 4 - lead as u32;
            let mut n = 0u64;
            for code in 0..p.pow(free) {
                let mut x = [0u64; 5];
                x[lead] = 1;
                let mut c = code;
                for slot in x.iter_mut().skip(lead + 1) {
                    *slot = c % p;
                    c /= p;
                }
                if on_s(x) {
                    n += 1;
                }
            }
            n
        })
        .sum();
    Ok(count)
}

/// `#S̃(F_p) = p² + 6p + 1`, cross-checked against `#S(F_p)` plus the
/// exceptional curves over the two singular points.
pub fn count_resolution_fp(p: u64) -> Result<u64, CensusError> {
    check_prime(p)?;
    // P² blown up in five rational points
    let combinatorial = p * p + 6 * p + 1;
    // A1: one line replaces a point; A3: a chain of three lines replaces a point.
    let from_scan = count_surface_fp(p)? + p + 3 * p;
    if combinatorial != from_scan {
        return Err(CensusError::InternalMismatch { p, combinatorial, from_scan });
    }
    Ok(combinatorial)
}

/// `#D_i(F_p)`: each component is a `P¹`; adjacent components share one point.
pub fn count_boundary_fp(case: BoundaryCase, p: u64) -> Result<u64, CensusError> {
    check_prime(p)?;
    let comps = case.components();
    Ok(comps.len() as u64 * (p + 1) - comps.internal_edges() as u64)
}

/// `#Ũ_i(F_p) = #S̃(F_p) - #D_i(F_p)`.
pub fn count_u_fp(case: BoundaryCase, p: u64) -> Result<u64, CensusError> {
    Ok(count_resolution_fp(p)? - count_boundary_fp(case, p)?)
}

/// One line of the census table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusRow {
    pub p: u64,
    pub i: usize,
    pub surface: u64,
    pub resolution: u64,
    pub open: u64,
    /// `p² τ_p`, an integer whenever the identity holds.
    pub p2_tau: String,
    #[serde(rename = "match")]
    pub matches: bool,
}

pub fn census_row(case: BoundaryCase, p: u64) -> Result<CensusRow, CensusError> {
    let surface = count_surface_fp(p)?;
    let resolution = count_resolution_fp(p)?;
    let open = count_u_fp(case, p)?;
    let tau = tau_p(case, p).map_err(|e| match e {
        ConstantsError::NotPrime(p) => CensusError::NotPrime(p),
        other => unreachable!("{other}"),
    })?;
    let p2_tau: BigRational = tau * BigRational::from_integer((p * p).into());
    let matches = p2_tau.is_integer() && p2_tau.to_u64() == Some(open);
    Ok(CensusRow { p, i: case.index(), surface, resolution, open, p2_tau: p2_tau.to_string(), matches })
}
