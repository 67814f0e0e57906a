//! Small integer helpers shared across modules.

use num_integer::Integer;

pub fn gcd(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    if a == 0 || b == 0 {
        0
    } else {
        a.lcm(&b)
    }
}

/// Least nonnegative residue.
pub fn modp(a: i64, n: i64) -> i64 {
    a.rem_euclid(n)
}

/// Inverse of `a` modulo `n`, if it exists. `n = 1` gives 0.
pub fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let e = Integer::extended_gcd(&modp(a, n), &n);
    if e.gcd != 1 {
        None
    } else {
        Some(modp(e.x, n))
    }
}

/// Returns `(g, x, y)` with `a*x + b*y = g = gcd(a, b)`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let e = Integer::extended_gcd(&a, &b);
    if e.gcd < 0 {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Prime factorization as (prime, exponent) pairs in increasing order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Positive divisors in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == vec![(n, 1)]
}

/// Units of Z/n in increasing order (`[0]` for n = 1).
pub fn units(n: i64) -> Vec<i64> {
    if n == 1 {
        return vec![0];
    }
    (1..n).filter(|&a| gcd(a, n) == 1).collect()
}

/// Multiplicative order of `a` modulo `n`; `a` must be a unit.
pub fn mult_order(a: i64, n: i64) -> u64 {
    if n == 1 {
        return 1;
    }
    let mut x = modp(a, n);
    let mut k = 1;
    while x != 1 {
        x = x * modp(a, n) % n;
        k += 1;
    }
    k
}

/// Smallest primitive root modulo `n`, assuming the unit group is cyclic.
pub fn primitive_root(n: i64) -> Option<i64> {
    if n <= 2 {
        return Some(modp(1, n.max(1)));
    }
    let phi = euler_phi(n as u64);
    (2..n).find(|&g| gcd(g, n) == 1 && mult_order(g, n) == phi)
}

pub fn pow_i64(base: i64, exp: u32) -> i64 {
    base.pow(exp)
}

pub fn factorial(k: u32) -> num_bigint::BigInt {
    (1..=k as u64).fold(num_bigint::BigInt::from(1), |acc, i| acc * i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divisors_and_phi() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        let brute = |n: u64| (1..=n).filter(|&a| gcd(a as i64, n as i64) == 1).count() as u64;
        for n in 1..60 {
            assert_eq!(euler_phi(n), brute(n), "phi({n})");
        }
    }

    #[test]
    fn inverses() {
        for n in 2..30 {
            for a in units(n) {
                let b = mod_inverse(a, n).unwrap();
                assert_eq!(a * b % n, 1);
            }
        }
        assert_eq!(mod_inverse(2, 4), None);
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(5), Some(2));
        assert_eq!(primitive_root(9), Some(2));
        assert_eq!(primitive_root(7), Some(3));
    }
}
