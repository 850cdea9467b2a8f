//! Cox-coordinate side: the torsor equation
//! `η1 η9 + η2 η8 + η4 η5³ η6² η7 = 0`, coprimality along the dual graph,
//! projection through the anticanonical sections, heights in Cox coordinates
//! and the fast enumerator for `N_i(B)`.
//!
//! Counting fixes `η_j = 1` on the boundary and `η_j ≥ 1` on the remaining
//! curves `E1..E7`. The only sign left is the joint flip of `(η1, η9)`, which
//! gives a different point of `S`; so `N_i(B)` is twice the reduced count.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{count_in_class, first_in_class, gcd, gcd_i128, iroot4, isqrt, mod_inv};
use crate::picard::adjacent;
use crate::surface::{BoundaryCase, SurfacePoint};

/// Largest height bound accepted by [`enumerate_torsor`].
pub const TORSOR_BOUND_LIMIT: i64 = 1_000_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorsorError {
    #[error("η1 does not divide η2 η8 + η4 η5³ η6² η7")]
    NotDivisible,
    #[error("η1 = 0 leaves η9 undetermined")]
    ZeroLeadingCoefficient,
    #[error("all five anticanonical sections vanish")]
    AllSectionsZero,
    #[error("η{j} = {value} is not a unit on the boundary of case {case}")]
    BoundaryNotUnit { case: usize, j: usize, value: i64 },
    #[error("no monomial set is attached to case {0}")]
    NoMonomialSet(usize),
    #[error("height bound must be at least 1, got {0}")]
    InvalidBound(i64),
    #[error("height bound {bound} exceeds the enumerator guard {limit}")]
    BoundTooLarge { bound: i64, limit: i64 },
    #[error("projected coordinates overflow 64 bits")]
    Overflow,
}

/// `(η1, …, η9)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorsorPoint(pub [i64; 9]);

impl TorsorPoint {
    /// `η_j` for `j` in `1..=9`.
    #[inline]
    pub fn eta(&self, j: usize) -> i64 {
        self.0[j - 1]
    }

    pub fn satisfies_equation(&self) -> bool {
        let e = self.0.map(|v| v as i128);
        e[0] * e[8] + e[1] * e[7] + e[3] * e[4].pow(3) * e[5].pow(2) * e[6] == 0
    }

    /// `η1 ⋯ η7 ≠ 0`.
    pub fn over_v(&self) -> bool {
        self.0[..7].iter().all(|&v| v != 0)
    }

    /// Exchange `η1 ↔ η2` and `η8 ↔ η9`; this realizes the involution of `S`
    /// up to sign and carries case 5 onto case 6.
    pub fn swap(&self) -> TorsorPoint {
        let mut e = self.0;
        e.swap(0, 1);
        e.swap(7, 8);
        TorsorPoint(e)
    }

    /// Negate `η1` and `η9`.
    pub fn flip(&self) -> TorsorPoint {
        let mut e = self.0;
        e[0] = -e[0];
        e[8] = -e[8];
        TorsorPoint(e)
    }
}

/// Every pair not joined by an edge of the dual graph is coprime.
pub fn coprimality_ok(t: &TorsorPoint) -> bool {
    for i in 1..=9 {
        for j in i + 1..=9 {
            if !adjacent(i, j) && gcd(t.eta(i), t.eta(j)) != 1 {
                return false;
            }
        }
    }
    true
}

/// `η9 = -(η2 η8 + η4 η5³ η6² η7) / η1`.
pub fn solve_eta9(eta: [i64; 8]) -> Result<i64, TorsorError> {
    if eta[0] == 0 {
        return Err(TorsorError::ZeroLeadingCoefficient);
    }
    let e = eta.map(|v| v as i128);
    let num = e[1] * e[7] + e[3] * e[4].pow(3) * e[5].pow(2) * e[6];
    if num % e[0] != 0 {
        return Err(TorsorError::NotDivisible);
    }
    i64::try_from(-num / e[0]).map_err(|_| TorsorError::Overflow)
}

/// The anticanonical sections `s0, …, s4`.
pub fn sections(t: &TorsorPoint) -> [i128; 5] {
    let [e1, e2, e3, e4, e5, e6, e7, e8, e9] = t.0.map(|v| v as i128);
    [
        e2 * e3 * e4 * e5 * e6 * e7 * e8,
        e1 * e1 * e2 * e2 * e3.pow(3) * e4 * e4 * e6,
        e1 * e2 * e3 * e3 * e4 * e4 * e5 * e5 * e6 * e6 * e7,
        e3 * e4 * e4 * e5.pow(4) * e6.pow(3) * e7 * e7,
        e7 * e8 * e9,
    ]
}

/// The point of `S` with coordinates `(s0 : … : s4)`.
pub fn project(t: &TorsorPoint) -> Result<SurfacePoint, TorsorError> {
    let s = sections(t);
    let g = s.iter().fold(0, |g, &v| gcd_i128(g, v));
    if g == 0 {
        return Err(TorsorError::AllSectionsZero);
    }
    let mut x = [0i64; 5];
    for (xi, si) in x.iter_mut().zip(s) {
        *xi = i64::try_from(si / g).map_err(|_| TorsorError::Overflow)?;
    }
    Ok(crate::surface::normalize(&x).expect("sections satisfy the surface equations"))
}

fn check_boundary(case: BoundaryCase, t: &TorsorPoint) -> Result<(), TorsorError> {
    for j in case.components().iter() {
        if t.eta(j).abs() != 1 {
            return Err(TorsorError::BoundaryNotUnit { case: case.index(), j, value: t.eta(j) });
        }
    }
    Ok(())
}

/// `Ĥ_i(η)`, the height of the projected point written in Cox coordinates;
/// boundary coordinates must be `±1`.
pub fn cox_height(case: BoundaryCase, t: &TorsorPoint) -> Result<i64, TorsorError> {
    check_boundary(case, t)?;
    let [e1, e2, e3, e4, e5, e6, e7, e8, e9] = t.0.map(|v| (v as i128).abs());
    let h: i128 = match case {
        BoundaryCase::SingularA1 => (e2 * e3 * e4 * e5 * e6 * e8)
            .max(e1 * e2 * (e3 * e4 * e5 * e6).pow(2))
            .max(e3 * e4 * e4 * e5.pow(4) * e6.pow(3))
            .max(e8 * e9),
        BoundaryCase::SingularA3 => (e2 * e5 * e7 * e8).max((e1 * e2).pow(2)).max(e5.pow(4) * e7 * e7),
        BoundaryCase::BothSingular => (e2 * e5 * e8)
            .max(e1 * e2 * e5 * e5)
            .max(e5.pow(4))
            .max((e1 * e2).pow(2).min(e8 * e9)),
        BoundaryCase::LineL1 => (e2 * e8).max(e1 * e2).max(1),
        BoundaryCase::LineL2 => (e1 * e1).max(e1 * e5 * e5 * e7).max(e5 * e7 * e8),
        BoundaryCase::LineL3 => return cox_height(BoundaryCase::LineL2, &t.swap()),
    };
    i64::try_from(h).map_err(|_| TorsorError::Overflow)
}

/// gcd of the monomials of the set `M_i` attached to cases 1, 2, 4 and 5.
pub fn monomial_gcd(case: BoundaryCase, t: &TorsorPoint) -> Result<i64, TorsorError> {
    let [e1, e2, e3, e4, e5, e6, e7, e8, e9] = t.0.map(|v| v as i128);
    let monomials: Vec<i128> = match case {
        BoundaryCase::SingularA1 => vec![
            e2 * e3 * e4 * e5 * e6 * e8,
            e1 * e2 * (e3 * e4 * e5 * e6).pow(2),
            e3 * e4 * e4 * e5.pow(4) * e6.pow(3) * e7,
            e8 * e9,
        ],
        BoundaryCase::SingularA3 => vec![
            e2 * e5 * e7 * e8,
            (e1 * e2 * e3).pow(2) * e4,
            e4 * e5.pow(4) * e6 * e6 * e7 * e7,
        ],
        BoundaryCase::LineL1 => {
            vec![e2 * e8, e1 * e2 * e3 * e4 * e5 * e6, e4 * e5.pow(3) * e6 * e6 * e7]
        }
        BoundaryCase::LineL2 => {
            vec![e5 * e7 * e8, e1 * e1 * e2 * e3 * e3 * e4, e1 * e3 * e4 * e5 * e5 * e6 * e7]
        }
        other => return Err(TorsorError::NoMonomialSet(other.index())),
    };
    let g = monomials.into_iter().fold(0, gcd_i128);
    i64::try_from(g).map_err(|_| TorsorError::Overflow)
}

/// Chart in which torsor points are plotted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Chart {
    /// `x = η7 η5² η6 / (η1 η2 η3)`, `y = η8 / (η1 η3 η4 η5 η6)`.
    F,
    /// `(1/x, x/y)`.
    GPrime,
    /// `(x, 1/(x y))`.
    GDoublePrime,
}

/// Chart coordinates; `None` where the chart is undefined.
pub fn chart_coordinates(t: &TorsorPoint, chart: Chart) -> Option<(f64, f64)> {
    let e = t.0.map(|v| v as f64);
    let x = e[6] * e[4] * e[4] * e[5] / (e[0] * e[1] * e[2]);
    let y = e[7] / (e[0] * e[2] * e[3] * e[4] * e[5]);
    let (a, b) = match chart {
        Chart::F => (x, y),
        Chart::GPrime => (1.0 / x, x / y),
        Chart::GDoublePrime => (x, 1.0 / (x * y)),
    };
    (a.is_finite() && b.is_finite()).then_some((a, b))
}

fn check_bound(bound: i64) -> Result<(), TorsorError> {
    if bound < 1 {
        return Err(TorsorError::InvalidBound(bound));
    }
    if bound > TORSOR_BOUND_LIMIT {
        return Err(TorsorError::BoundTooLarge { bound, limit: TORSOR_BOUND_LIMIT });
    }
    Ok(())
}

/// At most two disjoint integer intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Windows {
    spans: [(i64, i64); 2],
    len: usize,
}

impl Windows {
    pub fn single(lo: i64, hi: i64) -> Self {
        let mut w = Windows { spans: [(0, -1); 2], len: 0 };
        w.push(lo, hi);
        w
    }

    fn push(&mut self, lo: i64, hi: i64) {
        if lo <= hi {
            self.spans[self.len] = (lo, hi);
            self.len += 1;
        }
    }

    pub fn spans(&self) -> &[(i64, i64)] {
        &self.spans[..self.len]
    }
}

#[inline]
fn quad(a: i64, b: i64, x: i64) -> i128 {
    let x = x as i128;
    a as i128 * x * x + b as i128 * x
}

/// Integers `x ∈ [lo, hi]` with `a x² + b x ≤ t` (`a > 0`), an interval.
fn sublevel(a: i64, b: i64, t: i128, lo: i64, hi: i64) -> Option<(i64, i64)> {
    if lo > hi {
        return None;
    }
    let f = (-b).div_euclid(2 * a);
    let c0 = f.clamp(lo, hi);
    let c1 = (f + 1).clamp(lo, hi);
    let m = if quad(a, b, c0) <= quad(a, b, c1) { c0 } else { c1 };
    if quad(a, b, m) > t {
        return None;
    }
    // leftmost in [lo, m]: q is nonincreasing there
    let (mut l, mut r) = (lo, m);
    while l < r {
        let mid = l + (r - l) / 2;
        if quad(a, b, mid) <= t {
            r = mid;
        } else {
            l = mid + 1;
        }
    }
    let left = l;
    let (mut l, mut r) = (m, hi);
    while l < r {
        let mid = r - (r - l) / 2;
        if quad(a, b, mid) <= t {
            l = mid;
        } else {
            r = mid - 1;
        }
    }
    Some((left, l))
}

/// Integers `x ∈ [lo, hi]` with `|a x² + b x| ≤ k` (`a > 0`, `k ≥ 0`).
pub fn quadratic_window(a: i64, b: i64, k: i128, lo: i64, hi: i64) -> Windows {
    let mut w = Windows { spans: [(0, -1); 2], len: 0 };
    let Some((i0, i1)) = sublevel(a, b, k, lo, hi) else {
        return w;
    };
    match sublevel(a, b, -k - 1, i0, i1) {
        None => w.push(i0, i1),
        Some((j0, j1)) => {
            w.push(i0, j0 - 1);
            w.push(j1 + 1, i1);
        }
    }
    w
}

/// Squarefree divisors of `n ≥ 1` with their Möbius value, by trial division.
fn mobius_divisors(mut n: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(1i64, 1i64)];
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            let len = out.len();
            for k in 0..len {
                let (d, mu) = out[k];
                out.push((d * p, -mu));
            }
        }
        p += 1;
    }
    if n > 1 {
        let len = out.len();
        for k in 0..len {
            let (d, mu) = out[k];
            out.push((d * n, -mu));
        }
    }
    out
}

/// All `η8` over one choice of the non-`η8/η9` coordinates.
struct Fiber<'a> {
    /// `η1..η7` filled in; `η8, η9` are set while walking.
    eta: [i64; 9],
    /// `η4 η5³ η6² η7`.
    c: i64,
    residue: i64,
    windows: Windows,
    /// Product of the coordinates that `η8` must be coprime to.
    sieve: i64,
    sieve_divisors: &'a [(i64, i64)],
}

impl Fiber<'_> {
    fn modulus(&self) -> i64 {
        self.eta[0]
    }

    /// `gcd(η9, η3) = 1` is the one condition not implied by the others.
    fn needs_walk(&self) -> bool {
        self.eta[2] != 1
    }

    fn eta9(&self, eta8: i64) -> i64 {
        let num = self.eta[1] as i128 * eta8 as i128 + self.c as i128;
        (-num / self.eta[0] as i128) as i64
    }

    fn count(&self) -> u64 {
        if self.needs_walk() {
            let mut n = 0;
            self.walk(|eta8, eta9| {
                if gcd(eta8, self.sieve) == 1 && gcd(eta9, self.eta[2]) == 1 {
                    n += 1;
                }
            });
            return n;
        }
        let m = self.modulus();
        let mut total = 0i64;
        for &(d, mu) in self.sieve_divisors {
            // η8 ≡ residue (mod η1), η8 ≡ 0 (mod d)
            let k = ((-self.residue).rem_euclid(d) as i128 * mod_inv(m, d).unwrap() as i128)
                .rem_euclid(d as i128) as i64;
            let r = self.residue + m * k;
            let md = m * d;
            for &(lo, hi) in self.windows.spans() {
                total += mu * count_in_class(lo, hi, r, md);
            }
        }
        total as u64
    }

    fn walk(&self, mut f: impl FnMut(i64, i64)) {
        let m = self.modulus();
        for &(lo, hi) in self.windows.spans() {
            let mut x = first_in_class(lo, self.residue, m);
            while x <= hi {
                f(x, self.eta9(x));
                x += m;
            }
        }
    }

    fn points(&self, out: &mut Vec<TorsorPoint>) {
        self.walk(|eta8, eta9| {
            let mut e = self.eta;
            e[7] = eta8;
            e[8] = eta9;
            let t = TorsorPoint(e);
            if coprimality_ok(&t) {
                out.push(t);
            }
        });
    }
}

/// Build the fiber over `η1..η7`; `η2` must be invertible modulo `η1`.
fn fiber<'a>(
    eta: [i64; 9],
    half_width: i64,
    product_bound: Option<i128>,
    sieve_divisors: &'a [(i64, i64)],
) -> Fiber<'a> {
    let [e1, e2, _, e4, e5, e6, e7, _, _] = eta;
    let c = e4 * e5.pow(3) * e6 * e6 * e7;
    let inv = mod_inv(e2, e1).expect("η1, η2 coprime");
    let residue = ((-(c as i128)) * inv as i128).rem_euclid(e1 as i128) as i64;
    let windows = match product_bound {
        // |η8 η9| ≤ B  ⇔  |η8 (η2 η8 + c)| ≤ B η1
        Some(k) => quadratic_window(e2, c, k, -half_width, half_width),
        None => Windows::single(-half_width, half_width),
    };
    Fiber {
        eta,
        c,
        residue,
        windows,
        sieve: eta[2] * eta[3] * eta[4] * eta[5],
        sieve_divisors,
    }
}

const ONE: [(i64, i64); 1] = [(1, 1)];

/// Visit every fiber with the given `η1`, for one of cases 1 to 5.
fn for_each_fiber(case: BoundaryCase, bound: i64, e1: i64, f: &mut dyn FnMut(&Fiber)) {
    let b = bound;
    let sb = isqrt(b);
    let kb = b as i128 * e1 as i128;
    match case {
        BoundaryCase::LineL1 => {
            for e2 in 1..=b / e1 {
                if gcd(e1, e2) != 1 {
                    continue;
                }
                f(&fiber([e1, e2, 1, 1, 1, 1, 1, 0, 0], b / e2, None, &ONE));
            }
        }
        BoundaryCase::SingularA3 => {
            if e1 > sb {
                return;
            }
            let r = sb / e1;
            let s4 = isqrt(sb);
            for e5 in 1..=s4 {
                if gcd(e1, e5) != 1 {
                    continue;
                }
                let mob = mobius_divisors(e5);
                for e7 in 1..=sb / (e5 * e5) {
                    if gcd(e1, e7) != 1 {
                        continue;
                    }
                    for e2 in 1..=r {
                        if gcd(e1, e2) != 1 || gcd(e2, e5) != 1 || gcd(e2, e7) != 1 {
                            continue;
                        }
                        let w = b / (e2 * e5 * e7);
                        f(&fiber([e1, e2, 1, 1, e5, 1, e7, 0, 0], w, None, &mob));
                    }
                }
            }
        }
        BoundaryCase::BothSingular => {
            for e5 in 1..=iroot4(b) {
                if gcd(e1, e5) != 1 || e1 * e5 * e5 > b {
                    continue;
                }
                let mob = mobius_divisors(e5);
                for e2 in 1..=b / (e1 * e5 * e5) {
                    if gcd(e1, e2) != 1 || gcd(e2, e5) != 1 {
                        continue;
                    }
                    let w = b / (e2 * e5);
                    // min(η1² η2², |η8 η9|) ≤ B holds outright when η1 η2 ≤ √B
                    let k = (e1 * e2 > sb).then_some(kb);
                    f(&fiber([e1, e2, 1, 1, e5, 1, 1, 0, 0], w, k, &mob));
                }
            }
        }
        BoundaryCase::LineL2 => {
            if e1 > sb {
                return;
            }
            for e5 in 1.. {
                if e1 * e5 * e5 > b {
                    break;
                }
                if gcd(e1, e5) != 1 {
                    continue;
                }
                let mob = mobius_divisors(e5);
                for e7 in 1..=b / (e1 * e5 * e5) {
                    if gcd(e1, e7) != 1 {
                        continue;
                    }
                    f(&fiber([e1, 1, 1, 1, e5, 1, e7, 0, 0], b / (e5 * e7), None, &mob));
                }
            }
        }
        BoundaryCase::SingularA1 => {
            for e2 in 1..=b / e1 {
                if gcd(e1, e2) != 1 {
                    continue;
                }
                // (η3 η4 η5 η6)² ≤ R and η3 η4² η5⁴ η6³ ≤ B
                let r = b / (e1 * e2);
                for e3 in 1..=isqrt(r) {
                    for e4 in 1..=isqrt(r) / e3 {
                        if gcd(e1, e4) != 1 || gcd(e2, e4) != 1 || e3 * e4 * e4 > b {
                            continue;
                        }
                        for e5 in 1..=isqrt(r) / (e3 * e4) {
                            if e3 as i128 * (e4 * e4) as i128 * (e5 as i128).pow(4) > b as i128 {
                                break;
                            }
                            if gcd(e1, e5) != 1 || gcd(e2, e5) != 1 || gcd(e3, e5) != 1 || gcd(e4, e5) != 1 {
                                continue;
                            }
                            for e6 in 1..=isqrt(r) / (e3 * e4 * e5) {
                                let lead = e3 as i128 * (e4 * e4) as i128 * (e5 as i128).pow(4);
                                if lead * (e6 as i128).pow(3) > b as i128 {
                                    break;
                                }
                                if gcd(e1, e6) != 1 || gcd(e2, e6) != 1 || gcd(e3, e6) != 1 {
                                    continue;
                                }
                                let mob = if e3 == 1 { mobius_divisors(e4 * e5 * e6) } else { Vec::new() };
                                let w = b / (e2 * e3 * e4 * e5 * e6);
                                f(&fiber([e1, e2, e3, e4, e5, e6, 1, 0, 0], w, Some(kb), &mob));
                            }
                        }
                    }
                }
            }
        }
        BoundaryCase::LineL3 => unreachable!("case 6 is counted through case 5"),
    }
}

fn eta1_range(case: BoundaryCase, bound: i64) -> std::ops::RangeInclusive<i64> {
    match case {
        BoundaryCase::SingularA3 | BoundaryCase::LineL2 => 1..=isqrt(bound),
        _ => 1..=bound,
    }
}

fn reduced_case(case: BoundaryCase) -> BoundaryCase {
    match case {
        BoundaryCase::LineL3 => BoundaryCase::LineL2,
        c => c,
    }
}

/// `N_i(B)` through the torsor parametrization.
pub fn enumerate_torsor(case: BoundaryCase, bound: i64) -> Result<u64, TorsorError> {
    check_bound(bound)?;
    let case = reduced_case(case);
    let reduced: u64 = eta1_range(case, bound)
        .into_par_iter()
        .map(|e1| {
            let mut n = 0;
            for_each_fiber(case, bound, e1, &mut |fb| n += fb.count());
            n
        })
        .sum();
    Ok(2 * reduced)
}

/// The torsor points behind [`enumerate_torsor`], one per counted point of `S`,
/// sorted. Intended for moderate bounds.
pub fn torsor_points(case: BoundaryCase, bound: i64) -> Result<Vec<TorsorPoint>, TorsorError> {
    check_bound(bound)?;
    let base = reduced_case(case);
    let mut pts: Vec<TorsorPoint> = eta1_range(base, bound)
        .into_par_iter()
        .flat_map_iter(|e1| {
            let mut v = Vec::new();
            for_each_fiber(base, bound, e1, &mut |fb| fb.points(&mut v));
            v
        })
        .flat_map_iter(|t| [t, t.flip()])
        .map(|t| if case == BoundaryCase::LineL3 { t.swap() } else { t })
        .collect();
    pts.sort_unstable();
    Ok(pts)
}
