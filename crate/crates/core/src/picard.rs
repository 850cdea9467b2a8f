//! Intersection theory on the Picard lattice of the minimal desingularization.
//!
//! The lattice is `Z^6` with basis `ℓ0..ℓ5`, `ℓ0² = 1`, `ℓi² = -1` for `i >= 1`
//! and all mixed products zero. The seven negative curves `E1..E7` and the two
//! further Cox generators `E8`, `E9` are fixed constants below; boundary
//! divisors are subsets of `{E1..E7}` stored as bitmasks.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// A class `a0 ℓ0 + … + a5 ℓ5`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DivisorClass(pub [i64; 6]);

impl DivisorClass {
    pub const ZERO: Self = Self([0; 6]);

    /// The basis vector `ℓk`.
    pub const fn ell(k: usize) -> Self {
        let mut c = [0; 6];
        c[k] = 1;
        Self(c)
    }

    pub fn coeffs(&self) -> [i64; 6] {
        self.0
    }

    pub fn intersect(&self, other: &Self) -> i64 {
        intersect(self, other)
    }

    pub fn self_intersection(&self) -> i64 {
        intersect(self, self)
    }
}

impl Add for DivisorClass {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl Sub for DivisorClass {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

impl Neg for DivisorClass {
    type Output = Self;
    fn neg(self) -> Self {
        Self(self.0.map(|a| -a))
    }
}

impl Mul<DivisorClass> for i64 {
    type Output = DivisorClass;
    fn mul(self, rhs: DivisorClass) -> DivisorClass {
        DivisorClass(rhs.0.map(|a| self * a))
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let sign = if a < 0 { "-" } else if first { "" } else { "+" };
            let mag = a.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}l{k}")?;
            } else {
                write!(f, "{sign}{mag}l{k}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Bilinear form with signature `(1, 5)`.
pub fn intersect(a: &DivisorClass, b: &DivisorClass) -> i64 {
    a.0[0] * b.0[0] - (1..6).map(|k| a.0[k] * b.0[k]).sum::<i64>()
}

/// `-K = 3ℓ0 - ℓ1 - … - ℓ5`.
pub fn anticanonical() -> DivisorClass {
    DivisorClass([3, -1, -1, -1, -1, -1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CurveKind {
    /// A `(-1)`-curve (strict transform of a line on the singular model).
    MinusOne,
    /// A `(-2)`-curve (contracted to a singular point).
    MinusTwo,
}

impl CurveKind {
    pub fn self_intersection(self) -> i64 {
        match self {
            CurveKind::MinusOne => -1,
            CurveKind::MinusTwo => -2,
        }
    }
}

/// Classes of the Cox generators `E1..E9`, indexed from zero.
pub const COX_CLASSES: [DivisorClass; 9] = [
    DivisorClass([0, 0, 0, 0, 0, 1]),   // E1 = ℓ5
    DivisorClass([0, 0, 0, 0, 1, 0]),   // E2 = ℓ4
    DivisorClass([1, -1, 0, 0, -1, -1]), // E3 = ℓ0 - ℓ1 - ℓ4 - ℓ5
    DivisorClass([0, 1, -1, 0, 0, 0]),  // E4 = ℓ1 - ℓ2
    DivisorClass([0, 0, 0, 1, 0, 0]),   // E5 = ℓ3
    DivisorClass([0, 0, 1, -1, 0, 0]),  // E6 = ℓ2 - ℓ3
    DivisorClass([1, -1, -1, -1, 0, 0]), // E7 = ℓ0 - ℓ1 - ℓ2 - ℓ3
    DivisorClass([1, 0, 0, 0, -1, 0]),  // E8 = ℓ0 - ℓ4
    DivisorClass([1, 0, 0, 0, 0, -1]),  // E9 = ℓ0 - ℓ5
];

/// Kinds of the negative curves `E1..E7`, indexed from zero.
pub const CURVE_KINDS: [CurveKind; 7] = [
    CurveKind::MinusOne,
    CurveKind::MinusOne,
    CurveKind::MinusTwo,
    CurveKind::MinusTwo,
    CurveKind::MinusOne,
    CurveKind::MinusTwo,
    CurveKind::MinusTwo,
];

/// Dual graph of `E1..E9` (1-based pairs). Every edge has multiplicity one.
pub const EDGES: [(usize, usize); 11] = [
    (8, 9),
    (7, 8),
    (7, 9),
    (1, 9),
    (2, 8),
    (1, 3),
    (2, 3),
    (5, 7),
    (5, 6),
    (4, 6),
    (3, 4),
];

/// Class of the Cox generator `E_j`, `1 <= j <= 9`.
pub fn cox_class(j: usize) -> DivisorClass {
    COX_CLASSES[j - 1]
}

/// Kind of the negative curve `E_j`, `1 <= j <= 7`.
pub fn curve_kind(j: usize) -> CurveKind {
    CURVE_KINDS[j - 1]
}

/// Whether `E_i` and `E_j` share an edge of the dual graph (`1 <= i, j <= 9`).
pub fn adjacent(i: usize, j: usize) -> bool {
    i != j && EDGES.iter().any(|&(a, b)| (a, b) == (i, j) || (a, b) == (j, i))
}

/// 25 unordered pairs `i < j` that are not joined by an edge; the matching
/// torsor coordinates must be coprime.
pub fn non_adjacent_pairs() -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(25);
    for i in 1..=9 {
        for j in i + 1..=9 {
            if !adjacent(i, j) {
                out.push((i, j));
            }
        }
    }
    out
}

/// A set of negative curves, bit `j - 1` standing for `E_j`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct CurveSet(u8);

impl CurveSet {
    pub const EMPTY: Self = Self(0);

    pub fn from_bits(bits: u8) -> Self {
        Self(bits & 0x7f)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn from_indices(indices: &[usize]) -> Self {
        let mut bits = 0u8;
        for &j in indices {
            assert!((1..=7).contains(&j), "E{j} is not a negative curve");
            bits |= 1 << (j - 1);
        }
        Self(bits)
    }

    pub fn contains(self, j: usize) -> bool {
        (1..=7).contains(&j) && self.0 & (1 << (j - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (1..=7).filter(move |&j| self.contains(j))
    }

    pub fn union(self, other: Self) -> Self {
        Self(self.0 | other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// All `2^7` subsets of `{E1..E7}`.
    pub fn all_subsets() -> impl Iterator<Item = Self> {
        (0u8..128).map(Self)
    }

    /// Sum of the classes of the members.
    pub fn class(self) -> DivisorClass {
        self.iter().fold(DivisorClass::ZERO, |acc, j| acc + cox_class(j))
    }

    /// Number of dual-graph edges with both ends in the set.
    pub fn internal_edges(self) -> usize {
        EDGES.iter().filter(|&&(a, b)| self.contains(a) && self.contains(b)).count()
    }

    /// Number of `(-1)`-curves in the set.
    pub fn minus_one_count(self) -> usize {
        self.iter().filter(|&j| curve_kind(j) == CurveKind::MinusOne).count()
    }
}

impl fmt::Debug for CurveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, j) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "E{j}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for CurveSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The log-anticanonical class `-K - D`.
pub fn log_anticanonical(boundary: CurveSet) -> DivisorClass {
    anticanonical() - boundary.class()
}

/// Nef test against the seven negative curves, which span the effective cone.
pub fn is_nef(l: &DivisorClass) -> bool {
    (1..=7).all(|j| intersect(l, &cox_class(j)) >= 0)
}

/// Big-and-nef test; for a nef class on a surface, bigness is `L² > 0`.
pub fn is_big_nef(l: &DivisorClass) -> bool {
    is_nef(l) && l.self_intersection() > 0
}

/// Combinatorial nef test for `-K - D` that only looks at the dual graph.
///
/// (i) a `(-2)`-curve meeting `D` lies in `D`; (ii) a negative curve meeting
/// two components of `D` (or one with multiplicity two) lies in `D`;
/// (iii) no negative curve meets more than two other components of `D`.
pub fn nef_criterion(boundary: CurveSet) -> bool {
    (1..=7).all(|e| {
        let inside = boundary.contains(e);
        let meets: Vec<i64> = boundary
            .iter()
            .filter(|&a| a != e)
            .map(|a| intersect(&cox_class(a), &cox_class(e)))
            .filter(|&m| m > 0)
            .collect();
        let total: i64 = meets.iter().sum();
        let cond_i = curve_kind(e) != CurveKind::MinusTwo || meets.is_empty() || inside;
        let cond_ii = inside || !(meets.len() >= 2 || meets.iter().any(|&m| m >= 2));
        let cond_iii = total <= 2;
        cond_i && cond_ii && cond_iii
    })
}

/// `(-K - D)² = 4 + 2(e - v) - N1` where `v = |D|`, `e` counts internal edges
/// and `N1` the `(-1)`-curves of `D`.
pub fn self_intersection_via_graph(boundary: CurveSet) -> i64 {
    let v = boundary.len() as i64;
    let e = boundary.internal_edges() as i64;
    let n1 = boundary.minus_one_count() as i64;
    4 + 2 * (e - v) - n1
}

/// Boundaries `D ⊆ {E1..E7}` for which `-K - D` is big and nef, in bitmask order.
pub fn classify_boundaries() -> Vec<CurveSet> {
    CurveSet::all_subsets()
        .filter(|&d| is_big_nef(&log_anticanonical(d)))
        .collect()
}

/// Gram matrix of `E1..E7`.
pub fn gram_matrix() -> [[i64; 7]; 7] {
    std::array::from_fn(|i| std::array::from_fn(|j| intersect(&COX_CLASSES[i], &COX_CLASSES[j])))
}

/// Express `target` in the basis `{[E_j] : j ∈ basis}` (six indices among 1..=7).
/// Returns `None` if the classes are not a `Z`-basis representation of `target`.
pub fn coordinates_in_curve_basis(target: &DivisorClass, basis: &[usize]) -> Option<Vec<i64>> {
    assert_eq!(basis.len(), 6);
    // Solve M c = target with M's columns the basis classes, using exact rationals.
    use num_rational::Rational64;
    let mut m: Vec<Vec<Rational64>> = (0..6)
        .map(|row| {
            let mut r: Vec<Rational64> =
                basis.iter().map(|&j| Rational64::from_integer(cox_class(j).0[row])).collect();
            r.push(Rational64::from_integer(target.0[row]));
            r
        })
        .collect();
    for col in 0..6 {
        let pivot = (col..6).find(|&r| m[r][col] != Rational64::from_integer(0))?;
        m.swap(col, pivot);
        let inv = Rational64::from_integer(1) / m[col][col];
        for k in col..7 {
            m[col][k] *= inv;
        }
        for r in 0..6 {
            if r != col && m[r][col] != Rational64::from_integer(0) {
                let factor = m[r][col];
                for k in col..7 {
                    let v = m[col][k] * factor;
                    m[r][k] -= v;
                }
            }
        }
    }
    m.iter()
        .map(|row| row[6].is_integer().then(|| row[6].to_integer()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> CurveSet {
        CurveSet::from_indices(ix)
    }

    #[test]
    fn intersection_examples() {
        let l0 = DivisorClass::ell(0);
        assert_eq!(intersect(&l0, &l0), 1);
        assert_eq!(intersect(&cox_class(3), &cox_class(4)), 1);
        let k = anticanonical();
        assert_eq!(k.self_intersection(), 4);
        assert_eq!(intersect(&k, &cox_class(7)), 0);
        assert_eq!(intersect(&k, &cox_class(5)), 1);
    }

    #[test]
    fn curve_table_matches_dual_graph() {
        for j in 1..=7 {
            assert_eq!(cox_class(j).self_intersection(), curve_kind(j).self_intersection());
        }
        for i in 1..=9 {
            for j in 1..=9 {
                if i == j {
                    continue;
                }
                let expected = if adjacent(i, j) { 1 } else { 0 };
                assert_eq!(intersect(&cox_class(i), &cox_class(j)), expected, "E{i}.E{j}");
            }
        }
        assert_eq!(non_adjacent_pairs().len(), 25);
    }

    #[test]
    fn principal_relation_vanishes() {
        let c = |j| cox_class(j);
        let rel = c(1) + c(2) + c(3) - 2 * c(5) - c(6) - c(7);
        assert_eq!(rel, DivisorClass::ZERO);
        // 2E1 + 2E2 + 3E3 + 2E4 + E6 is anticanonical.
        let k = 2 * c(1) + 2 * c(2) + 3 * c(3) + 2 * c(4) + c(6);
        assert_eq!(k, anticanonical());
    }

    #[test]
    fn nef_examples() {
        let k = anticanonical();
        assert!(is_nef(&k));
        assert!(is_big_nef(&k));
        let d3 = set(&[3, 4, 6, 7]);
        assert!(!is_nef(&log_anticanonical(d3)));
        assert!(!is_big_nef(&log_anticanonical(d3)));
        assert_eq!(intersect(&log_anticanonical(d3), &cox_class(5)), -1);
        assert!(is_nef(&log_anticanonical(set(&[7]))));
        assert!(is_big_nef(&log_anticanonical(set(&[7]))));
    }

    #[test]
    fn criterion_examples() {
        assert!(nef_criterion(set(&[7])));
        assert!(!nef_criterion(set(&[3])));
        assert!(nef_criterion(CurveSet::EMPTY));
    }

    #[test]
    fn graph_self_intersection_examples() {
        assert_eq!(self_intersection_via_graph(set(&[7])), 2);
        assert_eq!(self_intersection_via_graph(set(&[3, 4, 6])), 2);
        assert_eq!(self_intersection_via_graph(CurveSet::EMPTY), 4);
    }

    #[test]
    fn exhaustive_equivalences() {
        for d in CurveSet::all_subsets() {
            let l = log_anticanonical(d);
            assert_eq!(nef_criterion(d), is_nef(&l), "{d:?}");
            assert_eq!(self_intersection_via_graph(d), l.self_intersection(), "{d:?}");
        }
    }

    #[test]
    fn classification_is_exact() {
        let mut got = classify_boundaries();
        got.sort();
        let mut want = vec![
            CurveSet::EMPTY,
            set(&[7]),
            set(&[3, 4, 6]),
            set(&[3, 4, 5, 6, 7]),
            set(&[2, 3, 4, 6]),
            set(&[1, 3, 4, 6]),
        ];
        want.sort();
        assert_eq!(got, want);
        assert!(!got.contains(&set(&[3, 4, 6, 7])));
    }

    #[test]
    fn gram_matrix_is_adjacency_off_diagonal() {
        let g = gram_matrix();
        for i in 0..7 {
            for j in 0..7 {
                let want = if i == j {
                    curve_kind(i + 1).self_intersection()
                } else if adjacent(i + 1, j + 1) {
                    1
                } else {
                    0
                };
                assert_eq!(g[i][j], want);
            }
        }
    }

    #[test]
    fn curve_basis_coordinates() {
        // E7 = E1 + E2 + E3 - 2E5 - E6 in the basis without E7.
        let c = coordinates_in_curve_basis(&cox_class(7), &[1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(c, vec![1, 1, 1, 0, -2, -1]);
        // Dropping E4 leaves a dependent set; dropping E5 leaves an index-2 sublattice.
        assert!(coordinates_in_curve_basis(&cox_class(4), &[1, 2, 3, 5, 6, 7]).is_none());
        assert!(coordinates_in_curve_basis(&cox_class(5), &[1, 2, 3, 4, 6, 7]).is_none());
        for j0 in [1, 2, 3, 6, 7] {
            let basis: Vec<usize> = (1..=7).filter(|&j| j != j0).collect();
            assert!(coordinates_in_curve_basis(&cox_class(j0), &basis).is_some());
        }
        assert_eq!(format!("{}", anticanonical()), "3l0-l1-l2-l3-l4-l5");
    }
}
