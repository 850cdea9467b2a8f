//! The quartic surface `S ⊂ P⁴` given by
//! `x0² + x0 x3 + x2 x4 = x1 x3 - x2² = 0`, its six boundary cases and the
//! coordinate-side enumerator for `N_i(B)`.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{crt_combine, divisors_from_factorization, gcd, FactorTable};
use crate::picard::{adjacent, CurveSet};

/// Largest height bound accepted by the coordinate-side enumerator; keeps
/// every coordinate (at most about `B³`) inside `i64`.
pub const DIRECT_BOUND_LIMIT: i64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("{0:?} does not satisfy the defining equations")]
    NotOnSurface([i64; 5]),
    #[error("boundary case must be in 1..=6, got {0}")]
    InvalidCase(i64),
    #[error("height bound must be at least 1, got {0}")]
    InvalidBound(i64),
    #[error("height bound {bound} exceeds the enumerator guard {limit}")]
    BoundTooLarge { bound: i64, limit: i64 },
}

/// The six boundaries: the two singular points, both of them, and the three lines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BoundaryCase {
    /// `Z1 = Q1`, the `A1` point; `D1 = E7`.
    SingularA1,
    /// `Z2 = Q2`, the `A3` point; `D2 = E3 + E4 + E6`.
    SingularA3,
    /// `Z3 = Q1 ∪ Q2`; `D3 = D1 + D2`.
    BothSingular,
    /// `Z4 = L1`; `D4 = E3 + … + E7`.
    LineL1,
    /// `Z5 = L2`; `D5 = E2 + E3 + E4 + E6`.
    LineL2,
    /// `Z6 = L3`; `D6 = E1 + E3 + E4 + E6`.
    LineL3,
}

/// A maximal face of a Clemens complex: a vertex or an edge of the dual graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClemensFace {
    pub label: &'static str,
    pub components: CurveSet,
}

impl ClemensFace {
    pub fn dimension(&self) -> usize {
        self.components.len() - 1
    }
}

impl fmt::Display for ClemensFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// Labelled edges of the dual graph inside the boundary.
pub const FACE_A: [(&str, usize, usize); 6] = [
    ("A1", 3, 4),
    ("A2", 4, 6),
    ("A3", 5, 6),
    ("A4", 7, 5),
    ("A5", 2, 3),
    ("A6", 1, 3),
];

impl BoundaryCase {
    pub const ALL: [BoundaryCase; 6] = [
        BoundaryCase::SingularA1,
        BoundaryCase::SingularA3,
        BoundaryCase::BothSingular,
        BoundaryCase::LineL1,
        BoundaryCase::LineL2,
        BoundaryCase::LineL3,
    ];

    pub fn from_index(i: i64) -> Result<Self, SurfaceError> {
        match i {
            1..=6 => Ok(Self::ALL[(i - 1) as usize]),
            _ => Err(SurfaceError::InvalidCase(i)),
        }
    }

    pub fn index(self) -> usize {
        self as usize + 1
    }

    pub fn components(self) -> CurveSet {
        CurveSet::from_indices(match self {
            BoundaryCase::SingularA1 => &[7],
            BoundaryCase::SingularA3 => &[3, 4, 6],
            BoundaryCase::BothSingular => &[3, 4, 6, 7],
            BoundaryCase::LineL1 => &[3, 4, 5, 6, 7],
            BoundaryCase::LineL2 => &[2, 3, 4, 6],
            BoundaryCase::LineL3 => &[1, 3, 4, 6],
        })
    }

    /// `#D_i`, the number of boundary components.
    pub fn component_count(self) -> usize {
        self.components().len()
    }

    /// Rank of `Pic Ũ_i`, that is `6 - #D_i`.
    pub fn free_rank(self) -> usize {
        6 - self.component_count()
    }

    /// Faces of maximal dimension of the Clemens complex, read off the dual graph.
    pub fn clemens_faces(self) -> Vec<ClemensFace> {
        let comps = self.components();
        let edges: Vec<ClemensFace> = FACE_A
            .iter()
            .filter(|&&(_, a, b)| comps.contains(a) && comps.contains(b))
            .map(|&(label, a, b)| ClemensFace { label, components: CurveSet::from_indices(&[a, b]) })
            .collect();
        if !edges.is_empty() {
            return edges;
        }
        // No edges: every component is a maximal (0-dimensional) face.
        comps
            .iter()
            .map(|j| ClemensFace {
                label: VERTEX_LABELS[j - 1],
                components: CurveSet::from_indices(&[j]),
            })
            .collect()
    }

    /// Dimension of the Clemens complex.
    pub fn clemens_dimension(self) -> usize {
        self.clemens_faces().iter().map(ClemensFace::dimension).max().unwrap_or(0)
    }

    pub fn is_integral(self, p: &SurfacePoint) -> bool {
        let [x0, x1, x2, x3, x4] = p.0;
        let g3 = |a: i64, b: i64, c: i64| gcd(gcd(a, b), c);
        match self {
            BoundaryCase::SingularA1 => gcd(g3(x0, x2, x3), x4) == 1,
            BoundaryCase::SingularA3 => gcd(g3(x0, x1, x2), x3) == 1,
            BoundaryCase::BothSingular => {
                gcd(g3(x0, x2, x3), x4) == 1 && gcd(g3(x0, x1, x2), x3) == 1
            }
            BoundaryCase::LineL1 => g3(x0, x2, x3) == 1,
            BoundaryCase::LineL2 => g3(x0, x1, x2) == 1,
            BoundaryCase::LineL3 => g3(x0 + x3, x1, x2) == 1,
        }
    }

    pub fn height(self, p: &SurfacePoint) -> i64 {
        let [x0, x1, x2, x3, x4] = p.0.map(i64::abs);
        match self {
            BoundaryCase::SingularA1 => x0.max(x2).max(x3).max(x4),
            BoundaryCase::SingularA3 => x0.max(x1).max(x2).max(x3),
            BoundaryCase::BothSingular => x0.max(x2).max(x3).max(x1.min(x4)),
            BoundaryCase::LineL1 => x0.max(x2).max(x3),
            BoundaryCase::LineL2 => x0.max(x1).max(x2),
            BoundaryCase::LineL3 => (p.0[0] + p.0[3]).abs().max(x1).max(x2),
        }
    }
}

const VERTEX_LABELS: [&str; 7] = ["E1", "E2", "E3", "E4", "E5", "E6", "E7"];

impl fmt::Display for BoundaryCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Both defining forms vanish at `x`.
pub fn on_surface(x: &[i64; 5]) -> bool {
    let [x0, x1, x2, x3, x4] = x.map(|v| v as i128);
    x0 * x0 + x0 * x3 + x2 * x4 == 0 && x1 * x3 - x2 * x2 == 0
}

/// A primitive integer representative of a point of `S`, with `x2 > 0`,
/// or with first nonzero coordinate positive when `x2 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SurfacePoint(pub(crate) [i64; 5]);

impl SurfacePoint {
    pub fn coords(&self) -> [i64; 5] {
        self.0
    }

    /// Outside the lines, i.e. `x2 ≠ 0`.
    pub fn in_v(&self) -> bool {
        self.0[2] != 0
    }

    /// The involution `(x0 + x3, -x1, x2, -x3, x4)`, which swaps `L2` and `L3`.
    pub fn symmetry(&self) -> SurfacePoint {
        let [x0, x1, x2, x3, x4] = self.0;
        normalize(&[x0 + x3, -x1, x2, -x3, x4]).expect("the involution preserves S")
    }
}

impl fmt::Display for SurfacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d, e] = self.0;
        write!(f, "({a}:{b}:{c}:{d}:{e})")
    }
}

/// Divide out the content and fix the sign.
pub fn normalize(x: &[i64; 5]) -> Result<SurfacePoint, SurfaceError> {
    if x.iter().all(|&v| v == 0) {
        return Err(SurfaceError::ZeroVector);
    }
    if !on_surface(x) {
        return Err(SurfaceError::NotOnSurface(*x));
    }
    let g = x.iter().fold(0, |g, &v| gcd(g, v));
    let mut y = x.map(|v| v / g);
    let lead = if y[2] != 0 { y[2] } else { *y.iter().find(|&&v| v != 0).unwrap() };
    if lead < 0 {
        y = y.map(|v| -v);
    }
    Ok(SurfacePoint(y))
}

/// Residues `w mod p^k` with `w (w + c) ≡ 0 (mod p^k)`.
pub fn product_congruence_residues_pk(p: i64, k: u32, c: i64) -> Vec<i64> {
    let pk = p.pow(k);
    let cm = c.rem_euclid(pk);
    let v = if cm == 0 {
        k
    } else {
        let mut v = 0;
        let mut t = cm;
        while t % p == 0 {
            t /= p;
            v += 1;
        }
        v
    };
    if 2 * v >= k {
        // w ≡ 0 mod p^⌈k/2⌉
        let step = p.pow(k.div_ceil(2));
        (0..pk / step).map(|j| j * step).collect()
    } else {
        // two classes mod p^(k - v): w ≡ 0 and w ≡ -c
        let m = p.pow(k - v);
        let lifts = p.pow(v);
        let mut out = Vec::with_capacity(2 * lifts as usize);
        for a in [0, (-cm).rem_euclid(m)] {
            for j in 0..lifts {
                out.push(a + j * m);
            }
        }
        out
    }
}

/// Residues `w mod n` with `w (w + c) ≡ 0 (mod n)`, given the factorization of `n`.
pub fn product_congruence_residues(factorization: &[(u64, u32)], c: i64) -> (Vec<i64>, i64) {
    let mut residues = vec![0i64];
    let mut modulus = 1i64;
    for &(p, k) in factorization {
        let local = product_congruence_residues_pk(p as i64, k, c);
        let pk = (p as i64).pow(k);
        residues = crt_combine(&residues, modulus, &local, pk);
        modulus *= pk;
    }
    (residues, modulus)
}

fn check_bound(bound: i64) -> Result<(), SurfaceError> {
    if bound < 1 {
        return Err(SurfaceError::InvalidBound(bound));
    }
    if bound > DIRECT_BOUND_LIMIT {
        return Err(SurfaceError::BoundTooLarge { bound, limit: DIRECT_BOUND_LIMIT });
    }
    Ok(())
}

/// How the free coordinate `w` is stepped for fixed `(x1, x2, x3)`.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Stepping {
    /// Only the residues solving `w (w + c) ≡ 0 (mod x2)`.
    Residues,
    /// Every `w` in the window, testing the congruence directly.
    Scan,
}

struct DirectEnumerator<'a> {
    case: BoundaryCase,
    bound: i64,
    table: &'a FactorTable,
    stepping: Stepping,
}

impl DirectEnumerator<'_> {
    /// Visit every counted point with the given `x2`.
    fn visit_x2(&self, x2: i64, f: &mut impl FnMut(SurfacePoint)) {
        let b = self.bound;
        let f2: Vec<(u64, u32)> = self.table.factorize(x2 as u64);
        let sq: Vec<(u64, u32)> = f2.iter().map(|&(p, e)| (p, 2 * e)).collect();
        let x2sq = x2 * x2;
        for d in divisors_from_factorization(&sq) {
            let d = d as i64;
            if d > b {
                continue;
            }
            for sign in [1i64, -1] {
                // (x1, x3, c, shift): w ranges over [-B, B], x0 = w - shift.
                let (x1, x3) = match self.case {
                    BoundaryCase::SingularA1 | BoundaryCase::BothSingular | BoundaryCase::LineL1 => {
                        (sign * (x2sq / d), sign * d)
                    }
                    BoundaryCase::SingularA3 => {
                        if x2sq / d > b {
                            continue;
                        }
                        (sign * (x2sq / d), sign * d)
                    }
                    BoundaryCase::LineL2 | BoundaryCase::LineL3 => (sign * d, sign * (x2sq / d)),
                };
                let (c, shift) = match self.case {
                    // u = x0 + x3 is the bounded coordinate; u (u - x3) ≡ 0.
                    BoundaryCase::LineL3 => (-x3, x3),
                    _ => (x3, 0),
                };
                let mut emit = |w: i64| {
                    let x0 = w - shift;
                    let num = -(x0 as i128 * x0 as i128 + x0 as i128 * x3 as i128);
                    debug_assert_eq!(num % x2 as i128, 0);
                    let x4 = match i64::try_from(num / x2 as i128) {
                        Ok(v) => v,
                        Err(_) => return,
                    };
                    let x = [x0, x1, x2, x3, x4];
                    if x.iter().fold(0, |g, &v| gcd(g, v)) != 1 {
                        return;
                    }
                    let p = SurfacePoint(x);
                    if self.case.height(&p) <= b && self.case.is_integral(&p) {
                        f(p);
                    }
                };
                match self.stepping {
                    Stepping::Residues => {
                        let (res, m) = product_congruence_residues(&f2, c);
                        for r in res {
                            let mut w = crate::arith::first_in_class(-b, r, m);
                            while w <= b {
                                emit(w);
                                w += m;
                            }
                        }
                    }
                    Stepping::Scan => {
                        for w in -b..=b {
                            let lhs = w as i128 * (w as i128 + c as i128);
                            if lhs % x2 as i128 == 0 {
                                emit(w);
                            }
                        }
                    }
                }
            }
        }
    }

    fn count(&self) -> u64 {
        (1..=self.bound)
            .into_par_iter()
            .map(|x2| {
                let mut n = 0u64;
                self.visit_x2(x2, &mut |_| n += 1);
                n
            })
            .sum()
    }

    fn points(&self) -> Vec<SurfacePoint> {
        let mut pts: Vec<SurfacePoint> = (1..=self.bound)
            .into_par_iter()
            .flat_map_iter(|x2| {
                let mut v = Vec::new();
                self.visit_x2(x2, &mut |p| v.push(p));
                v
            })
            .collect();
        pts.sort_unstable();
        pts
    }
}

/// `N_i(B)`: primitive points of `S` with `x2 > 0`, integral for case `i`
/// and of height at most `B`.
pub fn enumerate_direct(case: BoundaryCase, bound: i64) -> Result<u64, SurfaceError> {
    check_bound(bound)?;
    let table = FactorTable::new(bound as u64);
    Ok(DirectEnumerator { case, bound, table: &table, stepping: Stepping::Residues }.count())
}

/// The points counted by [`enumerate_direct`], sorted.
pub fn direct_points(case: BoundaryCase, bound: i64) -> Result<Vec<SurfacePoint>, SurfaceError> {
    check_bound(bound)?;
    let table = FactorTable::new(bound as u64);
    Ok(DirectEnumerator { case, bound, table: &table, stepping: Stepping::Residues }.points())
}

/// Same count as [`enumerate_direct`] but stepping `x0` through its whole
/// window; quadratic in `B`, kept as a cross-check.
pub fn enumerate_direct_scan(case: BoundaryCase, bound: i64) -> Result<u64, SurfaceError> {
    check_bound(bound)?;
    let table = FactorTable::new(bound as u64);
    Ok(DirectEnumerator { case, bound, table: &table, stepping: Stepping::Scan }.count())
}

/// Clemens faces are cliques of the dual graph on the boundary components.
pub fn faces_are_cliques(case: BoundaryCase) -> bool {
    case.clemens_faces().iter().all(|face| {
        let v: Vec<usize> = face.components.iter().collect();
        face.components.is_subset(case.components())
            && v.iter().all(|&a| v.iter().all(|&b| a == b || adjacent(a, b)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: [i64; 5]) -> SurfacePoint {
        normalize(&x).unwrap()
    }

    #[test]
    fn on_surface_examples() {
        assert!(on_surface(&[-1, 1, 1, 1, 0]));
        assert!(on_surface(&[0, 1, 0, 0, 0]));
        assert!(!on_surface(&[1, 0, 0, 0, 0]));
        assert!(on_surface(&[2, 1, 2, 4, -6]));
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(pt([-2, 2, 2, 2, 0]).coords(), [-1, 1, 1, 1, 0]);
        assert_eq!(pt([1, -1, -1, -1, 0]).coords(), [-1, 1, 1, 1, 0]);
        assert_eq!(normalize(&[0; 5]), Err(SurfaceError::ZeroVector));
        assert_eq!(normalize(&[1, 0, 0, 0, 0]), Err(SurfaceError::NotOnSurface([1, 0, 0, 0, 0])));
        assert_eq!(pt([0, -3, 0, 0, 0]).coords(), [0, 1, 0, 0, 0]);
    }

    #[test]
    fn integrality_and_height_examples() {
        let p = pt([-1, 1, 1, 1, 0]);
        let q = pt([2, 1, 2, 4, -6]);
        use BoundaryCase::*;
        assert!(SingularA1.is_integral(&p));
        assert!(!SingularA1.is_integral(&q));
        assert!(SingularA3.is_integral(&q));
        assert_eq!(SingularA1.height(&p), 1);
        assert_eq!(BothSingular.height(&q), 4);
        assert_eq!(LineL3.height(&p), 1);
    }

    #[test]
    fn in_v_examples() {
        assert!(pt([-1, 1, 1, 1, 0]).in_v());
        assert!(!pt([0, 1, 0, 0, 0]).in_v());
        assert!(!pt([0, 0, 0, 0, 1]).in_v());
    }

    #[test]
    fn symmetry_examples() {
        let q = pt([2, 1, 2, 4, -6]);
        assert_eq!(q.symmetry().symmetry(), q);
        assert_eq!(pt([-1, 1, 1, 1, 0]).symmetry().coords(), [0, -1, 1, -1, 0]);
        assert_eq!(BoundaryCase::LineL2.height(&q), BoundaryCase::LineL3.height(&q.symmetry()));
    }

    #[test]
    fn case_metadata() {
        let sizes: Vec<usize> = BoundaryCase::ALL.iter().map(|c| c.component_count()).collect();
        assert_eq!(sizes, vec![1, 3, 4, 5, 4, 4]);
        let labels = |c: BoundaryCase| -> Vec<&str> { c.clemens_faces().iter().map(|f| f.label).collect() };
        assert_eq!(labels(BoundaryCase::SingularA1), vec!["E7"]);
        assert_eq!(labels(BoundaryCase::SingularA3), vec!["A1", "A2"]);
        assert_eq!(labels(BoundaryCase::BothSingular), vec!["A1", "A2"]);
        assert_eq!(labels(BoundaryCase::LineL1), vec!["A1", "A2", "A3", "A4"]);
        assert_eq!(labels(BoundaryCase::LineL2), vec!["A1", "A2", "A5"]);
        assert_eq!(labels(BoundaryCase::LineL3), vec!["A1", "A2", "A6"]);
        for c in BoundaryCase::ALL {
            assert!(faces_are_cliques(c));
            assert_eq!(BoundaryCase::from_index(c.index() as i64), Ok(c));
        }
        assert_eq!(BoundaryCase::from_index(7), Err(SurfaceError::InvalidCase(7)));
    }

    #[test]
    fn residues_match_brute_force() {
        for p in [2i64, 3, 5, 7] {
            for k in 1..=6u32 {
                let pk = p.pow(k);
                if pk > 800 {
                    continue;
                }
                for c in -40..40 {
                    let mut got = product_congruence_residues_pk(p, k, c);
                    got.sort();
                    let want: Vec<i64> = (0..pk).filter(|w| (w * (w + c)).rem_euclid(pk) == 0).collect();
                    assert_eq!(got, want, "p={p} k={k} c={c}");
                }
            }
        }
        let t = FactorTable::new(400);
        for n in 1..400i64 {
            for c in [-13, 0, 1, 6, 360] {
                let (mut got, m) = product_congruence_residues(&t.factorize(n as u64), c);
                assert_eq!(m, n);
                got.sort();
                let want: Vec<i64> = (0..n).filter(|w| (w * (w + c)).rem_euclid(n) == 0).collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn residue_and_scan_enumerators_agree() {
        for case in BoundaryCase::ALL {
            for b in [1, 7, 40] {
                assert_eq!(enumerate_direct(case, b), enumerate_direct_scan(case, b), "{case} {b}");
            }
        }
    }

    #[test]
    fn cases_five_and_six_agree() {
        for b in [10, 100] {
            assert_eq!(
                enumerate_direct(BoundaryCase::LineL2, b).unwrap(),
                enumerate_direct(BoundaryCase::LineL3, b).unwrap()
            );
        }
    }

    #[test]
    fn bound_guards() {
        assert_eq!(enumerate_direct(BoundaryCase::LineL1, 0), Err(SurfaceError::InvalidBound(0)));
        assert!(matches!(
            enumerate_direct(BoundaryCase::LineL1, DIRECT_BOUND_LIMIT + 1),
            Err(SurfaceError::BoundTooLarge { .. })
        ));
    }

    #[test]
    fn counted_points_are_valid() {
        for case in BoundaryCase::ALL {
            for p in direct_points(case, 60).unwrap() {
                let x = p.coords();
                assert!(on_surface(&x));
                assert_eq!(x.iter().fold(0, |g, &v| gcd(g, v)), 1);
                assert!(x[2] > 0);
                assert!(case.height(&p) >= 1);
                if case == BoundaryCase::BothSingular {
                    assert!(case.height(&p) <= BoundaryCase::SingularA3.height(&p));
                    assert!(case.height(&p) <= BoundaryCase::SingularA1.height(&p));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn symmetry_is_an_involution(
            g in 1i64..6, m in 1i64..8, n in 1i64..8, k in -6i64..6, shift in any::<bool>(), neg in any::<bool>()
        ) {
            // x1 = ±g m², x3 = ±g n², x2 = g m n; x2 divides x0 (x0 + x3) for x0 ∈ {k x2, k x2 - x3}.
            let s = if neg { -1 } else { 1 };
            let (x1, x2, x3) = (s * g * m * m, g * m * n, s * g * n * n);
            let x0 = k * x2 - if shift { x3 } else { 0 };
            let x4 = -(x0 * x0 + x0 * x3) / x2;
            let p = normalize(&[x0, x1, x2, x3, x4]).unwrap();
            let q = p.symmetry();
            prop_assert!(on_surface(&q.coords()));
            prop_assert_eq!(q.symmetry(), p);
            prop_assert_eq!(q.in_v(), p.in_v());
            prop_assert_eq!(BoundaryCase::LineL2.height(&p), BoundaryCase::LineL3.height(&q));
            prop_assert_eq!(BoundaryCase::LineL2.is_integral(&p), BoundaryCase::LineL3.is_integral(&q));
        }
    }
}
