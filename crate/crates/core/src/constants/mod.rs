//! Leading constants: the volumes `α_{i,A}`, `c_∞ = C_i`, the exponent `b_i`,
//! the Euler product `c_fin` and the assembled prediction
//! `N_i(B) ≈ c_∞ c_fin B (log B)^{b_i - 1}`.

pub mod euler;
pub mod polytope;
pub mod quadrature;

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::picard::{coordinates_in_curve_basis, cox_class, log_anticanonical};
use crate::surface::{BoundaryCase, ClemensFace};
pub use euler::{c_finite, local_factor, tau_p, EulerProduct};
pub use polytope::{RationalPolytope, Relation};
pub use quadrature::tau_infinity_check;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstantsError {
    #[error("polytope is unbounded")]
    Unbounded,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime bound must be at least 2, got {0}")]
    InvalidPrimeBound(u64),
    #[error("height bound must be at least 3, got {0}")]
    InvalidBound(i64),
    #[error("adaptive quadrature did not converge")]
    QuadratureNonConvergence,
    #[error("{face} is not a maximal face of the Clemens complex of case {case}")]
    NotAMaximalFace { case: usize, face: String },
    #[error("cannot express the classes in the basis without E{0}")]
    NoBasis(usize),
    #[error("E{j} enters the normalizing equation with coefficient {coeff}, expected ±1")]
    EliminationCoefficient { j: usize, coeff: i64 },
}

/// Archimedean density attached to a maximal face: `8` for a vertex, `4` for an edge.
pub fn tau_face(face: &ClemensFace) -> i64 {
    match face.dimension() {
        0 => 8,
        _ => 4,
    }
}

/// The polytope whose volume is `α_{i,A}`, in the variables returned alongside it.
pub fn alpha_polytope(
    case: BoundaryCase,
    face: &ClemensFace,
) -> Result<(RationalPolytope, Vec<usize>), ConstantsError> {
    if !case.clemens_faces().contains(face) {
        return Err(ConstantsError::NotAMaximalFace { case: case.index(), face: face.to_string() });
    }
    let comps = case.components();
    let a_set = face.components;
    let j0 = a_set
        .iter()
        .find(|j| [3, 6, 7].contains(j))
        .expect("every maximal face meets E3, E6 or E7");
    let basis: Vec<usize> = (1..=7).filter(|&j| j != j0).collect();
    let pos = |j: usize| basis.iter().position(|&b| b == j).unwrap();
    let a = coordinates_in_curve_basis(&log_anticanonical(comps), &basis).ok_or(ConstantsError::NoBasis(j0))?;
    let b = coordinates_in_curve_basis(&cox_class(j0), &basis).ok_or(ConstantsError::NoBasis(j0))?;

    let j1 = a_set.iter().find(|&j| j != j0).unwrap_or(1);
    let s = a[pos(j1)];
    if s.abs() != 1 {
        return Err(ConstantsError::EliminationCoefficient { j: j1, coeff: s });
    }
    // t_{j1} = s (1 - Σ a_j t_j) over the curves off the boundary and the face itself;
    // a unit coefficient keeps the lattice normalization of the volume.
    let vars: Vec<usize> = (1..=7)
        .filter(|&j| j != j0 && j != j1 && (a_set.contains(j) || !comps.contains(j)))
        .collect();
    let bj1 = b[pos(j1)];
    let sum_a: Vec<i64> = vars.iter().map(|&j| a[pos(j)]).collect();
    let sum_b: Vec<i64> = vars.iter().map(|&j| b[pos(j)] - s * bj1 * a[pos(j)]).collect();
    let poly = RationalPolytope::new(vars.len());
    let poly = if s == 1 { poly.le(&sum_a, 1) } else { poly.ge(&sum_a, 1) };
    let poly = poly.ge(&sum_b, -s * bj1);
    Ok((poly, vars))
}

/// `α_{i,A}`, exactly.
pub fn alpha(case: BoundaryCase, face: &ClemensFace) -> Result<BigRational, ConstantsError> {
    alpha_polytope(case, face)?.0.volume()
}

/// `c_∞ = Σ_A α_{i,A} τ_A` over the maximal faces.
pub fn c_infinity(case: BoundaryCase) -> Result<BigRational, ConstantsError> {
    let mut total = BigRational::zero();
    for face in case.clemens_faces() {
        total += alpha(case, &face)? * polytope::q(tau_face(&face));
    }
    Ok(total)
}

/// Rank of the units of `U_i` modulo constants.
pub const UNIT_RANK: usize = 0;

/// `b_i = rk Pic Ũ_i - rk units + dim Clemens complex + 1`.
pub fn exponent_b(case: BoundaryCase) -> u32 {
    (case.free_rank() - UNIT_RANK + case.clemens_dimension() + 1) as u32
}

/// `c_∞ c_fin B (log B)^{b - 1}`.
pub fn predicted_count(case: BoundaryCase, bound: i64, prime_bound: u64) -> Result<f64, ConstantsError> {
    prediction(case, prime_bound)?.at(bound)
}

/// Everything needed to evaluate the leading term at any `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub case: BoundaryCase,
    pub c_inf: BigRational,
    pub b: u32,
    pub c_fin: EulerProduct,
}

impl Prediction {
    pub fn at(&self, bound: i64) -> Result<f64, ConstantsError> {
        if bound < 3 {
            return Err(ConstantsError::InvalidBound(bound));
        }
        let b = bound as f64;
        let c = self.c_inf.to_f64().expect("finite rational") * self.c_fin.value;
        Ok(c * b * b.ln().powi(self.b as i32 - 1))
    }

    pub fn report(&self, bound: Option<i64>) -> Result<PredictionReport, ConstantsError> {
        Ok(PredictionReport {
            i: self.case.index(),
            c_inf: self.c_inf.to_string(),
            b: self.b,
            c_fin: self.c_fin.value,
            tail_bound: self.c_fin.tail_bound,
            prime_bound: self.c_fin.prime_bound,
            bound,
            predicted: bound.map(|b| self.at(b)).transpose()?,
        })
    }
}

pub fn prediction(case: BoundaryCase, prime_bound: u64) -> Result<Prediction, ConstantsError> {
    Ok(Prediction { case, c_inf: c_infinity(case)?, b: exponent_b(case), c_fin: c_finite(case, prime_bound)? })
}

/// Serializable summary; `c_inf` is an exact fraction string.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionReport {
    pub i: usize,
    pub c_inf: String,
    pub b: u32,
    pub c_fin: f64,
    pub tail_bound: f64,
    pub prime_bound: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted: Option<f64>,
}
