#![allow(dead_code)]

use dpcount_core::surface::{normalize, BoundaryCase, SurfacePoint};
use dpcount_core::torsor::TorsorPoint;
use rand::Rng;

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Every counted point with height at most `bmax`, by scanning boxes for
/// `x1, x2, x3` and `x0`; `x4` follows from the first equation.
pub fn oracle_points(case: BoundaryCase, bmax: i64) -> Vec<(SurfacePoint, i64)> {
    let b = bmax;
    let (x1_box, x3_box, x0_box) = match case.index() {
        1 | 3 | 4 => (b * b, b, b),
        2 => (b, b, b),
        5 => (b, b * b, b),
        _ => (b, b * b, b + b * b),
    };
    let mut out = Vec::new();
    for x2 in 1..=b {
        for x1 in -x1_box..=x1_box {
            for x3 in -x3_box..=x3_box {
                if x1 * x3 != x2 * x2 {
                    continue;
                }
                for x0 in -x0_box..=x0_box {
                    let num = -(x0 * x0 + x0 * x3);
                    if num % x2 != 0 {
                        continue;
                    }
                    let x = [x0, x1, x2, x3, num / x2];
                    if x.iter().fold(0, |g, &v| gcd(g, v)) != 1 {
                        continue;
                    }
                    let p = normalize(&x).unwrap();
                    assert_eq!(p.coords(), x);
                    let h = case.height(&p);
                    if h <= b && case.is_integral(&p) {
                        out.push((p, h));
                    }
                }
            }
        }
    }
    out
}

/// `counts[B]` for every `B ≤ bmax`.
pub fn oracle_counts(case: BoundaryCase, bmax: i64) -> Vec<u64> {
    let mut counts = vec![0u64; bmax as usize + 1];
    for (_, h) in oracle_points(case, bmax) {
        for c in counts.iter_mut().skip(h as usize) {
            *c += 1;
        }
    }
    counts
}

const SMALL_PRIMES: [i64; 6] = [2, 3, 5, 7, 11, 13];

/// Cliques of the dual graph on `E1..E7`: no triangles, so vertices and edges.
const CLIQUES: [&[usize]; 13] = [
    &[1], &[2], &[3], &[4], &[5], &[6], &[7],
    &[1, 3], &[2, 3], &[5, 7], &[5, 6], &[4, 6], &[3, 4],
];

fn inv_mod(a: i64, m: i64) -> i64 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1);
    s0.rem_euclid(m)
}

/// A random integral torsor point with boundary coordinates `±1` for `case`:
/// each small prime is placed on a random clique of non-boundary curves, so
/// non-adjacent coordinates stay coprime; `η8` is drawn from its congruence
/// class and candidates failing the full coprimality check, or overflowing
/// i64, are redrawn.
pub fn sample_integral(case: BoundaryCase, rng: &mut impl Rng) -> TorsorPoint {
    let comps = case.components();
    loop {
        let mut e = [1i64; 9];
        for p in SMALL_PRIMES {
            if rng.gen_bool(0.5) {
                continue;
            }
            let clique = CLIQUES[rng.gen_range(0..CLIQUES.len())];
            if clique.iter().any(|&j| comps.contains(j)) {
                continue;
            }
            let k = rng.gen_range(1..=2);
            for &j in clique {
                e[j - 1] *= p.pow(k);
            }
        }
        for v in e.iter_mut().take(7) {
            if rng.gen_bool(0.5) {
                *v = -*v;
            }
        }
        let (e1, e2) = (e[0] as i128, e[1] as i128);
        let c = e[3] as i128 * (e[4] as i128).pow(3) * (e[5] as i128).pow(2) * e[6] as i128;
        let m = e1.abs() as i64;
        let r = if m == 1 {
            0
        } else {
            ((-c).rem_euclid(m as i128) * inv_mod(e2.rem_euclid(m as i128) as i64, m) as i128)
                .rem_euclid(m as i128) as i64
        };
        let e8 = r + m * rng.gen_range(-40..=40);
        let num = e2 * e8 as i128 + c;
        assert_eq!(num % e1, 0);
        e[7] = e8;
        let Ok(e9) = i64::try_from(-num / e1) else { continue };
        e[8] = e9;
        let t = TorsorPoint(e);
        // keep heights and coordinates within i64
        let fits = dpcount_core::torsor::cox_height(case, &t).is_ok()
            && dpcount_core::torsor::project(&t).is_ok();
        if fits && dpcount_core::torsor::coprimality_ok(&t) {
            return t;
        }
    }
}
