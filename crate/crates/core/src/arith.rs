//! Small integer helpers: primality, divisor counts, Legendre symbols and
//! the genus of X0(p).

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Number of positive divisors of `n`.
pub fn divisor_count(n: u64) -> u64 {
    let mut count = 0;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            count += if d * d == n { 1 } else { 2 };
        }
        d += 1;
    }
    count
}

/// Legendre symbol `(a/p)` for an odd prime `p`, by brute force.
pub fn legendre(a: i64, p: u64) -> i64 {
    let p = p as i64;
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    if (1..p).any(|x| (x * x) % p == a) {
        1
    } else {
        -1
    }
}

/// Genus of X0(p) for prime `p`, which is also `dim S2(Gamma0(p))`.
///
/// Riemann-Hurwitz for the cover X0(p) -> X(1) of degree p + 1 with two
/// cusps, `nu2` elliptic points of order 2 and `nu3` of order 3.
pub fn genus_x0_prime(p: u64) -> u64 {
    assert!(is_prime(p), "genus formula needs a prime level");
    let (nu2, nu3) = match p {
        2 => (1, 0),
        3 => (0, 1),
        _ => ((1 + legendre(-1, p)) as u64, (1 + legendre(-3, p)) as u64),
    };
    // g = 1 + (p+1)/12 - nu2/4 - nu3/3 - cusps/2, scaled by 12 to stay integral
    let twelve_g = (p + 1) as i64 - 3 * nu2 as i64 - 4 * nu3 as i64;
    debug_assert!(twelve_g % 12 == 0);
    (twelve_g / 12) as u64
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1).then(|| old_s.rem_euclid(m))
}
