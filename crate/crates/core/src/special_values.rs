//! Bernoulli polynomials and partial zeta values divided by (2πi)^k.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::arith::factorial;
use crate::cyclotomic::{CycNum, Rational, ZetaAccumulator};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BernoulliPoly {
    pub degree: u32,
    /// Coefficient of t^i at index i.
    pub coeffs: Vec<Rational>,
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Bernoulli numbers b_0..b_n with b_1 = −1/2.
pub fn bernoulli_numbers(n: u32) -> Vec<Rational> {
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        let mut s = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            s += bj * Rational::from_integer(binomial(m + 1, j as u32));
        }
        b.push(-s / Rational::from_integer(BigInt::from(m + 1)));
    }
    b
}

pub fn bernoulli_polynomial(k: u32) -> BernoulliPoly {
    let b = bernoulli_numbers(k);
    let mut coeffs = vec![Rational::zero(); k as usize + 1];
    for (i, bi) in b.iter().enumerate() {
        coeffs[k as usize - i] = bi * Rational::from_integer(binomial(k, i as u32));
    }
    BernoulliPoly { degree: k, coeffs }
}

impl BernoulliPoly {
    /// Exact Horner evaluation.
    pub fn eval(&self, t: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }
}

/// (2πi)^{−k} Σ_{n ≡ m (N), n ≠ 0} n^{−k}, as an element of Q(ζ_N).
pub fn partial_zeta_scaled(m: i64, n: u64, k: u32) -> Result<CycNum> {
    if k < 2 {
        return Err(Error::domain(format!("partial zeta diverges at weight {k}")));
    }
    if n == 0 {
        return Err(Error::param("modulus must be positive"));
    }
    let bk = bernoulli_polynomial(k);
    let nn = BigInt::from(n);
    // −1/(k!N) Σ_j ζ^{−jm} B_k(j/N), accumulated over the common denominator N^k·den(B_k)
    let values: Vec<Rational> = (0..n)
        .map(|j| bk.eval(&Rational::new(BigInt::from(j), nn.clone())))
        .collect();
    let common = values
        .iter()
        .fold(BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
    let mut acc = ZetaAccumulator::new(n);
    for (j, v) in values.iter().enumerate() {
        let factor = v.numer() * (&common / v.denom());
        acc.add_zeta(-(j as i64) * m, &factor);
    }
    let den = -(common * factorial(k) * nn);
    Ok(acc.finish(den))
}
