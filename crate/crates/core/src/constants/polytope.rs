//! Exact volumes of small rational polytopes: vertex enumeration over active
//! sets, then a pulling triangulation through the face lattice.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ConstantsError;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

/// `{t ∈ Rⁿ : constraints}`, with `t ≥ 0` unless built with [`RationalPolytope::free`].
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPolytope {
    dim: usize,
    constraints: Vec<Constraint>,
    nonnegative: bool,
}

/// `a · x ≤ b`, or `a · x = b` when `equality`.
#[derive(Debug, Clone)]
struct Row {
    a: Vec<Q>,
    b: Q,
    equality: bool,
}

impl Row {
    fn eval(&self, x: &[Q]) -> Q {
        self.a.iter().zip(x).fold(Q::zero(), |s, (a, x)| s + a * x)
    }

    fn satisfied(&self, x: &[Q]) -> bool {
        let v = self.eval(x);
        if self.equality {
            v == self.b
        } else {
            v <= self.b
        }
    }

    fn tight(&self, x: &[Q]) -> bool {
        self.eval(x) == self.b
    }
}

impl RationalPolytope {
    pub fn new(dim: usize) -> Self {
        RationalPolytope { dim, constraints: Vec::new(), nonnegative: true }
    }

    /// Drop the implicit sign conditions.
    pub fn free(mut self) -> Self {
        self.nonnegative = false;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constrain(mut self, coeffs: Vec<Q>, relation: Relation, rhs: Q) -> Self {
        assert_eq!(coeffs.len(), self.dim, "constraint arity");
        self.constraints.push(Constraint { coeffs, relation, rhs });
        self
    }

    pub fn le(self, coeffs: &[i64], rhs: i64) -> Self {
        self.constrain(coeffs.iter().map(|&c| q(c)).collect(), Relation::Le, q(rhs))
    }

    pub fn ge(self, coeffs: &[i64], rhs: i64) -> Self {
        self.constrain(coeffs.iter().map(|&c| q(c)).collect(), Relation::Ge, q(rhs))
    }

    pub fn eq(self, coeffs: &[i64], rhs: i64) -> Self {
        self.constrain(coeffs.iter().map(|&c| q(c)).collect(), Relation::Eq, q(rhs))
    }

    /// Apply `t ↦ M t` to the coordinates: the image is `{s : M⁻¹ s ∈ P}`.
    /// `inverse` is `M⁻¹`; sign conditions become explicit constraints.
    pub fn transform(&self, inverse: &[Vec<i64>]) -> RationalPolytope {
        let n = self.dim;
        let pull = |c: &[Q]| -> Vec<Q> {
            (0..n).map(|j| (0..n).fold(Q::zero(), |s, i| s + &c[i] * q(inverse[i][j]))).collect()
        };
        let mut out = RationalPolytope::new(n).free();
        for c in &self.constraints {
            out = out.constrain(pull(&c.coeffs), c.relation, c.rhs.clone());
        }
        if self.nonnegative {
            for i in 0..n {
                let mut e = vec![Q::zero(); n];
                e[i] = Q::one();
                out = out.constrain(pull(&e), Relation::Ge, Q::zero());
            }
        }
        out
    }

    fn rows(&self) -> Vec<Row> {
        let mut rows = Vec::new();
        for c in &self.constraints {
            match c.relation {
                Relation::Le => rows.push(Row { a: c.coeffs.clone(), b: c.rhs.clone(), equality: false }),
                Relation::Ge => rows.push(Row {
                    a: c.coeffs.iter().map(|v| -v).collect(),
                    b: -c.rhs.clone(),
                    equality: false,
                }),
                Relation::Eq => rows.push(Row { a: c.coeffs.clone(), b: c.rhs.clone(), equality: true }),
            }
        }
        if self.nonnegative {
            for i in 0..self.dim {
                let mut a = vec![Q::zero(); self.dim];
                a[i] = -Q::one();
                rows.push(Row { a, b: Q::zero(), equality: false });
            }
        }
        rows
    }

    /// No nonzero direction `d` with `a · d ≤ 0` for every row (`= 0` for equalities).
    pub fn is_bounded(&self) -> bool {
        let n = self.dim;
        let base: Vec<Row> = self
            .rows()
            .into_iter()
            .map(|r| Row { a: r.a, b: Q::zero(), equality: r.equality })
            .collect();
        // With sign conditions the recession cone sits in the positive orthant.
        let patterns: Vec<u32> = if self.nonnegative { vec![0] } else { (0..1u32 << n).collect() };
        patterns.into_iter().all(|mask| {
            let sign = |i: usize| if mask >> i & 1 == 1 { -Q::one() } else { Q::one() };
            let mut rows = base.clone();
            for i in 0..n {
                let mut a = vec![Q::zero(); n];
                a[i] = -sign(i);
                rows.push(Row { a, b: Q::zero(), equality: false });
            }
            rows.push(Row { a: (0..n).map(sign).collect(), b: Q::one(), equality: true });
            vertices(&rows, n).is_empty()
        })
    }

    pub fn vertices(&self) -> Vec<Vec<Q>> {
        vertices(&self.rows(), self.dim)
    }

    /// Lebesgue volume in `Rⁿ`; zero when the polytope is not full-dimensional.
    pub fn volume(&self) -> Result<Q, ConstantsError> {
        if !self.is_bounded() {
            return Err(ConstantsError::Unbounded);
        }
        let n = self.dim;
        let rows = self.rows();
        let verts = vertices(&rows, n);
        if verts.is_empty() {
            return Ok(Q::zero());
        }
        let all: Vec<usize> = (0..verts.len()).collect();
        if affine_rank(&verts, &all) < n {
            return Ok(Q::zero());
        }
        let mut total = Q::zero();
        for simplex in triangulate(&verts, &rows, &all, n) {
            let v0 = &verts[simplex[0]];
            let m: Vec<Vec<Q>> = simplex[1..]
                .iter()
                .map(|&k| verts[k].iter().zip(v0).map(|(a, b)| a - b).collect())
                .collect();
            total += determinant(m).abs();
        }
        let fact: BigInt = (1..=n as u64).map(BigInt::from).product();
        Ok(total / Q::from_integer(fact))
    }
}

fn vertices(rows: &[Row], n: usize) -> Vec<Vec<Q>> {
    let eqs: Vec<&Row> = rows.iter().filter(|r| r.equality).collect();
    let ineqs: Vec<&Row> = rows.iter().filter(|r| !r.equality).collect();
    if eqs.len() > n {
        // Over-determined: fall back to choosing among all rows.
        return vertices_from(rows.iter().collect(), Vec::new(), rows, n);
    }
    vertices_from(ineqs, eqs, rows, n)
}

fn vertices_from(pool: Vec<&Row>, fixed: Vec<&Row>, rows: &[Row], n: usize) -> Vec<Vec<Q>> {
    let k = n - fixed.len();
    let mut found: BTreeSet<Vec<Q>> = BTreeSet::new();
    for combo in combinations(pool.len(), k) {
        let active: Vec<&Row> = fixed.iter().copied().chain(combo.iter().map(|&i| pool[i])).collect();
        let a: Vec<Vec<Q>> = active.iter().map(|r| r.a.clone()).collect();
        let b: Vec<Q> = active.iter().map(|r| r.b.clone()).collect();
        if let Some(x) = solve(a, b) {
            if rows.iter().all(|r| r.satisfied(&x)) {
                found.insert(x);
            }
        }
    }
    found.into_iter().collect()
}

fn combinations(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// Unique solution of the square system `a x = b`, if any.
fn solve(mut a: Vec<Vec<Q>>, mut b: Vec<Q>) -> Option<Vec<Q>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = Q::one() / &a[col][col];
        for j in col..n {
            a[col][j] = &a[col][j] * &inv;
        }
        b[col] = &b[col] * &inv;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..n {
                    let t = &f * &a[col][j];
                    a[r][j] -= t;
                }
                let t = &f * &b[col];
                b[r] -= t;
            }
        }
    }
    Some(b)
}

fn determinant(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut det = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(col, piv);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for j in col..n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    det
}

fn rank(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for col in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, piv);
        for i in r + 1..rows {
            if !m[i][col].is_zero() {
                let f = &m[i][col] / &m[r][col];
                for j in col..cols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn affine_rank(verts: &[Vec<Q>], idx: &[usize]) -> usize {
    let v0 = &verts[idx[0]];
    let m: Vec<Vec<Q>> = idx[1..]
        .iter()
        .map(|&k| verts[k].iter().zip(v0).map(|(a, b)| a - b).collect())
        .collect();
    rank(m)
}

/// Pulling triangulation of the `k`-dimensional face spanned by `face`:
/// cone from its first vertex over every facet not containing it.
fn triangulate(verts: &[Vec<Q>], rows: &[Row], face: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![face[0]]];
    }
    let apex = face[0];
    let mut facets: BTreeSet<Vec<usize>> = BTreeSet::new();
    for row in rows {
        if row.equality || face.iter().all(|&v| row.tight(&verts[v])) {
            continue;
        }
        let sub: Vec<usize> = face.iter().copied().filter(|&v| row.tight(&verts[v])).collect();
        if sub.len() >= k && !sub.contains(&apex) && affine_rank(verts, &sub) == k - 1 {
            facets.insert(sub);
        }
    }
    let mut out = Vec::new();
    for facet in facets {
        for mut s in triangulate(verts, rows, &facet, k - 1) {
            s.insert(0, apex);
            out.push(s);
        }
    }
    out
}
