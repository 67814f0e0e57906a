//! Exact linear algebra over Q(ζ_L), with a modular shortcut for rank.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{factorize, is_prime};
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<CycNum>>;

pub fn identity(n: usize, l: u64) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { CycNum::one(l) } else { CycNum::zero(l) }).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let inner = b.len();
    if a.iter().any(|r| r.len() != inner) {
        return Err(Error::param("matrix shapes do not match"));
    }
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = CycNum::zero(row[0].conductor());
                    for (x, brow) in row.iter().zip(b) {
                        if !x.is_zero() && !brow[j].is_zero() {
                            acc = acc.checked_add(&x.checked_mul(&brow[j])?)?;
                        }
                    }
                    Ok(acc)
                })
                .collect()
        })
        .collect()
}

/// Solves A·X = B by Gauss–Jordan elimination; A must be square and invertible.
pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.len();
    if a.iter().any(|r| r.len() != n) || b.len() != n {
        return Err(Error::param("solve needs a square system"));
    }
    let mut a = a.clone();
    let mut b = b.clone();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::internal("singular matrix in exact solve"))?;
        a.swap(col, piv);
        b.swap(col, piv);
        let inv = a[col][col].inverse()?;
        a[col] = a[col].iter().map(|x| x * &inv).collect();
        b[col] = b[col].iter().map(|x| x * &inv).collect();
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for j in 0..n {
                let t = &a[col][j] * &f;
                a[r][j] = &a[r][j] - &t;
            }
            for j in 0..b[r].len() {
                let t = &b[col][j] * &f;
                b[r][j] = &b[r][j] - &t;
            }
        }
    }
    Ok(b)
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    let l = a.first().and_then(|r| r.first()).map_or(1, |x| x.conductor());
    solve(a, &identity(a.len(), l))
}

/// Rank by Gaussian elimination over the field.
pub fn rank_exact(rows: &Matrix) -> Result<usize> {
    let mut m = rows.clone();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = m[rank][col].inverse()?;
        m[rank] = m[rank].iter().map(|x| x * &inv).collect();
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in col..cols {
                let t = &m[rank][j] * &f;
                m[r][j] = &m[r][j] - &t;
            }
        }
        rank += 1;
    }
    Ok(rank)
}

/// A prime p ≡ 1 (mod L) together with a primitive L-th root of unity mod p.
fn split_prime(l: u64, start: u64) -> (u64, u64) {
    let mut p = (start / l + 1) * l + 1;
    loop {
        if is_prime(p) {
            let fac = factorize(p - 1);
            let g = (2..p)
                .find(|&g| fac.iter().all(|&(q, _)| pow_mod(g, (p - 1) / q, p) != 1))
                .expect("a prime has a primitive root");
            return (p, pow_mod(g, (p - 1) / l, p));
        }
        p += l;
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn reduce_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

/// Image under ζ_L ↦ ω in F_p, or None if p divides the denominator.
fn to_fp(x: &CycNum, p: u64, omega: u64) -> Option<u64> {
    let den = reduce_mod(x.denominator(), p);
    if den == 0 {
        return None;
    }
    let mut acc = 0u64;
    let mut w = 1u64;
    for c in x.numerators() {
        if !c.is_zero() {
            acc = (acc + (reduce_mod(c, p) as u128 * w as u128 % p as u128) as u64) % p;
        }
        w = ((w as u128 * omega as u128) % p as u128) as u64;
    }
    Some(((acc as u128 * pow_mod(den, p - 2, p) as u128) % p as u128) as u64)
}

fn rank_fp(m: &mut [Vec<u64>], p: u64) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][col], p - 2, p);
        for j in col..cols {
            m[rank][j] = ((m[rank][j] as u128 * inv as u128) % p as u128) as u64;
        }
        for r in rank + 1..m.len() {
            let f = m[r][col];
            if f == 0 {
                continue;
            }
            for j in col..cols {
                let t = ((m[rank][j] as u128 * f as u128) % p as u128) as u64;
                m[r][j] = (m[r][j] + p - t) % p;
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over Q(ζ_L). A reduction modulo a split prime never raises the rank,
/// so full rank there is a certificate; otherwise falls back to exact elimination.
pub fn rank(rows: &Matrix) -> Result<usize> {
    let Some(l) = rows.first().and_then(|r| r.first()).map(|x| x.conductor()) else {
        return Ok(0);
    };
    let full = rows.len().min(rows[0].len());
    let mut start = 1u64 << 30;
    for _ in 0..3 {
        let (p, omega) = split_prime(l, start);
        start = p;
        let reduced: Option<Vec<Vec<u64>>> = rows
            .iter()
            .map(|r| r.iter().map(|x| to_fp(x, p, omega)).collect())
            .collect();
        if let Some(mut m) = reduced {
            if rank_fp(&mut m, p) == full {
                return Ok(full);
            }
        }
    }
    rank_exact(rows)
}
