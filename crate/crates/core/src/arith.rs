//! Small integer toolkit shared by the enumerators: gcds, modular inverses,
//! residue-class counting, a smallest-prime-factor table and divisor lists.

use num_integer::Integer;

#[inline]
pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

#[inline]
pub fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// Extended Euclid: returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b) >= 0`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a as i128, b as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (old_r, old_s, old_t) = (-old_r, -old_s, -old_t);
    }
    (old_r as i64, old_s as i64, old_t as i64)
}

/// Inverse of `a` modulo `m > 0`, in `[0, m)`. `None` if not coprime.
pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    debug_assert!(m > 0);
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// Number of integers `x` in `[lo, hi]` with `x ≡ r (mod m)`.
#[inline]
pub fn count_in_class(lo: i64, hi: i64, r: i64, m: i64) -> i64 {
    debug_assert!(m > 0);
    if lo > hi {
        return 0;
    }
    (hi - r).div_euclid(m) - (lo - 1 - r).div_euclid(m)
}

/// Smallest element of `[lo, ..)` congruent to `r` modulo `m`.
#[inline]
pub fn first_in_class(lo: i64, r: i64, m: i64) -> i64 {
    lo + (r - lo).rem_euclid(m)
}

/// Integer square root, `floor(sqrt(n))`.
pub fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as i64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Largest `x >= 0` with `x^4 <= n`.
pub fn iroot4(n: i64) -> i64 {
    isqrt(isqrt(n))
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Primes up to and including `limit` (sieve of Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Smallest-prime-factor table on `[0, limit]`.
#[derive(Debug, Clone)]
pub struct FactorTable {
    spf: Vec<u32>,
}

impl FactorTable {
    pub fn new(limit: u64) -> Self {
        let n = limit.max(1) as usize;
        let mut spf = vec![0u32; n + 1];
        for i in 2..=n {
            if spf[i] != 0 {
                continue;
            }
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
        Self { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    /// Prime factorization `[(p, e)]` of `1 <= n <= limit`, primes ascending.
    pub fn factorize(&self, mut n: u64) -> Vec<(u64, u32)> {
        assert!(n >= 1 && n <= self.limit(), "{n} outside factor table");
        let mut out: Vec<(u64, u32)> = Vec::new();
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        out
    }

    /// Squarefree divisors of `n` paired with their Möbius value.
    pub fn mobius_divisors(&self, n: u64) -> Vec<(i64, i64)> {
        let mut out = vec![(1i64, 1i64)];
        for (p, _) in self.factorize(n) {
            let len = out.len();
            for k in 0..len {
                let (d, mu) = out[k];
                out.push((d * p as i64, -mu));
            }
        }
        out
    }
}

/// All positive divisors from a factorization, unsorted.
pub fn divisors_from_factorization(f: &[(u64, u32)]) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in f {
        let len = out.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for k in 0..len {
                out.push(out[k] * pk);
            }
        }
    }
    out
}

/// Combine residue sets modulo coprime `m1` and `m2` into residues modulo `m1 * m2`.
pub fn crt_combine(r1: &[i64], m1: i64, r2: &[i64], m2: i64) -> Vec<i64> {
    let m = m1 * m2;
    // x = a + m1 * ((b - a) * inv(m1) mod m2)
    let inv = mod_inv(m1, m2).expect("moduli must be coprime");
    let mut out = Vec::with_capacity(r1.len() * r2.len());
    for &a in r1 {
        for &b in r2 {
            let k = ((b - a) as i128 * inv as i128).rem_euclid(m2 as i128) as i64;
            out.push((a + m1 * k).rem_euclid(m));
        }
    }
    out
}
