//! Exact arithmetic in cyclotomic fields Q(ζ_L).
//!
//! Elements are stored in the power basis 1, ζ, …, ζ^{φ(L)−1} modulo the
//! cyclotomic polynomial Φ_L, as an integer numerator vector over a single
//! positive denominator kept in lowest terms. Equality is therefore plain
//! structural equality.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use parking_lot::RwLock;
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::arith::{divisors, gcd};
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Integer polynomial, coefficients from the constant term upwards.
pub type IntPoly = Vec<BigInt>;

/// Per-conductor data: Φ_L and the reductions of ζ^e for 0 ≤ e < L.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: u64,
    degree: usize,
    phi: IntPoly,
    powers: Vec<Vec<BigInt>>,
}

static FIELDS: OnceLock<RwLock<HashMap<u64, Arc<CyclotomicField>>>> = OnceLock::new();
static POLYS: OnceLock<RwLock<HashMap<u64, IntPoly>>> = OnceLock::new();

/// Exact quotient of `num` by the monic polynomial `den`.
fn divide_monic(num: &IntPoly, den: &IntPoly) -> IntPoly {
    let dn = den.len() - 1;
    if num.len() <= dn {
        return vec![BigInt::zero()];
    }
    let mut rem = num.clone();
    let mut quot = vec![BigInt::zero(); num.len() - dn];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()), "inexact cyclotomic division");
    quot
}

fn poly_mul(a: &IntPoly, b: &IntPoly) -> IntPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// The L-th cyclotomic polynomial, by dividing x^L − 1 by Φ_d for every
/// proper divisor d of L. Memoized.
pub fn cyclotomic_polynomial(l: u64) -> IntPoly {
    assert!(l >= 1, "conductor must be positive");
    let cache = POLYS.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(p) = cache.read().get(&l) {
        return p.clone();
    }
    let mut xl = vec![BigInt::zero(); l as usize + 1];
    xl[0] = BigInt::from(-1);
    xl[l as usize] = BigInt::one();
    let mut den: IntPoly = vec![BigInt::one()];
    for d in divisors(l) {
        if d < l {
            den = poly_mul(&den, &cyclotomic_polynomial(d));
        }
    }
    let phi = divide_monic(&xl, &den);
    cache.write().insert(l, phi.clone());
    phi
}

impl CyclotomicField {
    fn build(l: u64) -> Self {
        let phi = cyclotomic_polynomial(l);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(l as usize);
        let mut cur = vec![BigInt::zero(); degree];
        cur[0] = BigInt::one();
        for _ in 0..l {
            powers.push(cur.clone());
            // multiply by x and reduce with x^d = −Σ phi_i x^i
            let top = cur[degree - 1].clone();
            let mut next = vec![BigInt::zero(); degree];
            for i in (1..degree).rev() {
                next[i] = cur[i - 1].clone();
            }
            if !top.is_zero() {
                for i in 0..degree {
                    next[i] -= &top * &phi[i];
                }
            }
            cur = next;
        }
        CyclotomicField { conductor: l, degree, phi, powers }
    }

    /// Shared handle for conductor `l`.
    pub fn get(l: u64) -> Arc<CyclotomicField> {
        assert!(l >= 1, "conductor must be positive");
        let cache = FIELDS.get_or_init(|| RwLock::new(HashMap::new()));
        if let Some(f) = cache.read().get(&l) {
            return f.clone();
        }
        let f = Arc::new(Self::build(l));
        cache.write().entry(l).or_insert(f).clone()
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn polynomial(&self) -> &IntPoly {
        &self.phi
    }

    /// Power-basis coordinates of ζ^e.
    pub fn power(&self, e: i64) -> &[BigInt] {
        &self.powers[e.rem_euclid(self.conductor as i64) as usize]
    }
}

/// An element of Q(ζ_L).
#[derive(Clone)]
pub struct CycNum {
    field: Arc<CyclotomicField>,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycNum {
    fn from_parts(field: Arc<CyclotomicField>, num: Vec<BigInt>, den: BigInt) -> Self {
        let mut x = CycNum { field, num, den };
        x.normalize();
        x
    }

    fn normalize(&mut self) {
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in self.num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if self.num.iter().all(|c| c.is_zero()) {
            self.den = BigInt::one();
            return;
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn zero(l: u64) -> Self {
        let field = CyclotomicField::get(l);
        let d = field.degree;
        CycNum { field, num: vec![BigInt::zero(); d], den: BigInt::one() }
    }

    pub fn one(l: u64) -> Self {
        Self::from_int(l, 1)
    }

    pub fn from_int(l: u64, v: i64) -> Self {
        Self::from_bigint(l, BigInt::from(v))
    }

    pub fn from_bigint(l: u64, v: BigInt) -> Self {
        let mut x = Self::zero(l);
        x.num[0] = v;
        x
    }

    pub fn from_rational(l: u64, q: &Rational) -> Self {
        let mut x = Self::zero(l);
        x.num[0] = q.numer().clone();
        x.den = q.denom().clone();
        x.normalize();
        x
    }

    /// Builds an element from power-basis coordinates; the length must be φ(L).
    pub fn from_coeffs(l: u64, coeffs: &[Rational]) -> Result<Self> {
        let field = CyclotomicField::get(l);
        if coeffs.len() != field.degree {
            return Err(Error::param(format!(
                "expected {} coefficients for conductor {l}, got {}",
                field.degree,
                coeffs.len()
            )));
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(Self::from_parts(field, num, den))
    }

    /// Builds an element from integer numerators over a common denominator.
    pub fn from_numerators(l: u64, num: Vec<BigInt>, den: BigInt) -> Result<Self> {
        let field = CyclotomicField::get(l);
        if num.len() != field.degree || den.is_zero() {
            return Err(Error::param("bad numerator vector or zero denominator"));
        }
        Ok(Self::from_parts(field, num, den))
    }

    /// ζ_L^j reduced modulo Φ_L.
    pub fn zeta_pow(l: u64, j: i64) -> Self {
        let field = CyclotomicField::get(l);
        let num = field.power(j).to_vec();
        CycNum { field, num, den: BigInt::one() }
    }

    pub fn conductor(&self) -> u64 {
        self.field.conductor
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeffs(&self) -> Vec<Rational> {
        self.num
            .iter()
            .map(|c| Rational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(|c| c.is_zero())
    }

    /// The rational value, if the element lies in Q.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.num[1..].iter().all(|c| c.is_zero()) {
            Some(Rational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// True when every power-basis coordinate is an integer.
    pub fn is_integral_coords(&self) -> bool {
        self.den.is_one()
    }

    fn check(&self, other: &CycNum) -> Result<()> {
        if self.field.conductor != other.field.conductor {
            Err(Error::ConductorMismatch(self.field.conductor, other.field.conductor))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &CycNum) -> Result<CycNum> {
        self.check(other)?;
        Ok(self.add_unchecked(other, false))
    }

    pub fn checked_sub(&self, other: &CycNum) -> Result<CycNum> {
        self.check(other)?;
        Ok(self.add_unchecked(other, true))
    }

    pub fn checked_mul(&self, other: &CycNum) -> Result<CycNum> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn checked_div(&self, other: &CycNum) -> Result<CycNum> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    fn add_unchecked(&self, other: &CycNum, subtract: bool) -> CycNum {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if subtract { -other } else { other.clone() };
        }
        let (num, den) = if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| if subtract { a - b } else { a + b })
                .collect();
            (num, self.den.clone())
        } else {
            let den = self.den.lcm(&other.den);
            let fa = &den / &self.den;
            let fb = &den / &other.den;
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| {
                    if subtract {
                        a * &fa - b * &fb
                    } else {
                        a * &fa + b * &fb
                    }
                })
                .collect();
            (num, den)
        };
        CycNum::from_parts(self.field.clone(), num, den)
    }

    fn mul_unchecked(&self, other: &CycNum) -> CycNum {
        if self.is_zero() || other.is_zero() {
            return CycNum::zero(self.conductor());
        }
        let d = self.field.degree;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let num = self.field.reduce(prod);
        CycNum::from_parts(self.field.clone(), num, &self.den * &other.den)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm over Q
    /// applied to the coefficient polynomial and Φ_L.
    pub fn inverse(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let to_q = |v: &[BigInt]| -> Vec<Rational> {
            v.iter().map(|c| Rational::from_integer(c.clone())).collect()
        };
        let a = qpoly_trim(to_q(&self.num));
        let phi = qpoly_trim(to_q(&self.field.phi));
        // s·a + t·Φ = g with g a nonzero constant, since Φ_L is irreducible
        let (g, s) = qpoly_ext_gcd(a, phi);
        if g.len() != 1 {
            return Err(Error::internal("cyclotomic polynomial is not irreducible"));
        }
        let c = &g[0];
        let mut coeffs: Vec<Rational> = s.iter().map(|x| x / c).collect();
        coeffs.resize(self.field.degree, Rational::zero());
        // scale back by the stored denominator
        let den = Rational::from_integer(self.den.clone());
        let coeffs: Vec<Rational> = coeffs.into_iter().map(|x| x * &den).collect();
        CycNum::from_coeffs(self.conductor(), &coeffs)
    }

    /// Image under ζ_{L1} ↦ ζ_{L2}^{L2/L1}.
    pub fn embed(&self, l2: u64) -> Result<CycNum> {
        let l1 = self.conductor();
        if l2 % l1 != 0 {
            return Err(Error::param(format!("conductor {l1} does not divide {l2}")));
        }
        if l1 == l2 {
            return Ok(self.clone());
        }
        let m = (l2 / l1) as i64;
        let target = CyclotomicField::get(l2);
        let mut num = vec![BigInt::zero(); target.degree];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, p) in num.iter_mut().zip(target.power(i as i64 * m)) {
                if !p.is_zero() {
                    *acc += c * p;
                }
            }
        }
        Ok(CycNum::from_parts(target, num, self.den.clone()))
    }

    /// Image under the automorphism ζ ↦ ζ^a, gcd(a, L) = 1.
    pub fn galois(&self, a: i64) -> CycNum {
        let l = self.conductor() as i64;
        assert_eq!(gcd(a, l), 1, "Galois exponent must be a unit");
        let mut num = vec![BigInt::zero(); self.field.degree];
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, p) in num.iter_mut().zip(self.field.power(i as i64 * a)) {
                if !p.is_zero() {
                    *acc += c * p;
                }
            }
        }
        CycNum::from_parts(self.field.clone(), num, self.den.clone())
    }

    /// Smallest M dividing L with the element inside Q(ζ_M).
    pub fn minimal_conductor(&self) -> u64 {
        let l = self.conductor();
        for m in divisors(l) {
            let fixed = (1..=l as i64)
                .filter(|&a| gcd(a, l as i64) == 1 && (a - 1) % m as i64 == 0)
                .all(|a| self.galois(a) == *self);
            if fixed {
                return m;
            }
        }
        l
    }

    /// Multiplication by ζ_L^e.
    pub fn mul_zeta(&self, e: i64) -> CycNum {
        let mut acc = ZetaAccumulator::new(self.conductor());
        acc.add_shifted(&self.num, e, &BigInt::one());
        acc.finish(self.den.clone())
    }

    pub fn scale_int(&self, k: &BigInt) -> CycNum {
        let num = self.num.iter().map(|c| c * k).collect();
        CycNum::from_parts(self.field.clone(), num, self.den.clone())
    }

    pub fn scale(&self, q: &Rational) -> CycNum {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        CycNum::from_parts(self.field.clone(), num, &self.den * q.denom())
    }

    pub fn pow(&self, e: i64) -> Result<CycNum> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut out = CycNum::one(self.conductor());
        let mut b = base;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                out = out.mul_unchecked(&b);
            }
            b = b.mul_unchecked(&b);
            n >>= 1;
        }
        Ok(out)
    }

    /// Floating-point value at ζ_L = e^{2πi/L}. Evaluation is in f64, so
    /// requests beyond 53 bits are served at double precision.
    pub fn approx_complex(&self, _precision_bits: u32) -> Complex64 {
        let l = self.conductor() as f64;
        let den = self.den.to_f64().unwrap_or(f64::NAN);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * i as f64 / l);
            let q = Rational::new(c.clone(), self.den.clone());
            let v = q.to_f64().unwrap_or_else(|| c.to_f64().unwrap() / den);
            acc += w * v;
        }
        acc
    }
}

impl CyclotomicField {
    /// Reduces a vector of integer coefficients of ζ^0, ζ^1, … to the power basis.
    fn reduce(&self, coeffs: Vec<BigInt>) -> Vec<BigInt> {
        let d = self.degree;
        let mut out: Vec<BigInt> = Vec::with_capacity(d);
        let mut it = coeffs.into_iter();
        for _ in 0..d {
            out.push(it.next().unwrap_or_default());
        }
        for (i, c) in it.enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, p) in out.iter_mut().zip(self.power((i + d) as i64)) {
                if !p.is_zero() {
                    *acc += &c * p;
                }
            }
        }
        out
    }
}

/// Accumulates integer multiples of shifted elements in the group ring of
/// Z/L, reducing modulo Φ_L only once at the end.
pub struct ZetaAccumulator {
    field: Arc<CyclotomicField>,
    buf: Vec<BigInt>,
}

impl ZetaAccumulator {
    pub fn new(l: u64) -> Self {
        ZetaAccumulator {
            field: CyclotomicField::get(l),
            buf: vec![BigInt::zero(); l as usize],
        }
    }

    /// Adds `factor · (Σ num_i ζ^i) · ζ^shift`.
    pub fn add_shifted(&mut self, num: &[BigInt], shift: i64, factor: &BigInt) {
        let l = self.buf.len() as i64;
        for (i, c) in num.iter().enumerate() {
            if !c.is_zero() {
                self.buf[(i as i64 + shift).rem_euclid(l) as usize] += c * factor;
            }
        }
    }

    /// Adds `factor · ζ^shift`.
    pub fn add_zeta(&mut self, shift: i64, factor: &BigInt) {
        let l = self.buf.len() as i64;
        self.buf[shift.rem_euclid(l) as usize] += factor;
    }

    pub fn finish(self, den: BigInt) -> CycNum {
        let field = self.field.clone();
        let num = self.finish_numerators();
        CycNum::from_parts(field, num, den)
    }

    /// The reduced power-basis numerators, without dividing out common factors.
    pub fn finish_numerators(self) -> Vec<BigInt> {
        let d = self.field.degree;
        let mut num = vec![BigInt::zero(); d];
        for (e, c) in self.buf.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (acc, p) in num.iter_mut().zip(self.field.power(e as i64)) {
                if !p.is_zero() {
                    *acc += &c * p;
                }
            }
        }
        num
    }
}

fn qpoly_trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn qpoly_is_zero(p: &[Rational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

/// Polynomial division over Q: returns (quotient, remainder).
fn qpoly_divmod(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = qpoly_trim(b.to_vec());
    let mut r = qpoly_trim(a.to_vec());
    let db = b.len() - 1;
    if r.len() < b.len() {
        return (vec![Rational::zero()], r);
    }
    let lead = b[db].clone();
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() && !qpoly_is_zero(&r) {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (j, bj) in b.iter().enumerate() {
            r[shift + j] -= &c * bj;
        }
        q[shift] = c;
        r.pop();
        r = qpoly_trim(r);
    }
    (q, r)
}

fn qpoly_sub_mul(a: &[Rational], q: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut out = a.to_vec();
    let len = (q.len() + b.len() - 1).max(a.len());
    out.resize(len, Rational::zero());
    for (i, x) in q.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] -= x * y;
        }
    }
    qpoly_trim(out)
}

/// Returns (g, s) with s·a ≡ g modulo b, g = gcd(a, b) up to a constant.
fn qpoly_ext_gcd(a: Vec<Rational>, b: Vec<Rational>) -> (Vec<Rational>, Vec<Rational>) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (vec![Rational::one()], vec![Rational::zero()]);
    while !qpoly_is_zero(&r1) {
        let (q, r) = qpoly_divmod(&r0, &r1);
        let s = qpoly_sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    (r0, s0)
}

impl PartialEq for CycNum {
    fn eq(&self, other: &Self) -> bool {
        self.field.conductor == other.field.conductor && self.den == other.den && self.num == other.num
    }
}

impl Eq for CycNum {}

impl Hash for CycNum {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.field.conductor.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CycNum> for &CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                self.$checked(rhs).expect("cyclotomic arithmetic across conductors")
            }
        }
        impl $tr<CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: CycNum) -> CycNum {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&CycNum> for CycNum {
            type Output = CycNum;
            fn $method(self, rhs: &CycNum) -> CycNum {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        CycNum {
            field: self.field.clone(),
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl Neg for CycNum {
    type Output = CycNum;
    fn neg(self) -> CycNum {
        -&self
    }
}

/// Formats a rational as "p/q" (denominator always present).
pub fn rational_to_string(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s.trim(), "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

impl fmt::Display for CycNum {
    /// Human-readable form in the power basis, `z` standing for ζ_L.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, q) in self.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let neg = q.is_negative();
            let a = q.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{i}"),
            };
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycNum[{}]({})", self.conductor(), self)
    }
}

impl Serialize for CycNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("CycNum", 2)?;
        st.serialize_field("conductor", &self.conductor())?;
        let coeffs: Vec<String> = self.coeffs().iter().map(rational_to_string).collect();
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for CycNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            conductor: u64,
            coeffs: Vec<String>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.conductor == 0 {
            return Err(de::Error::custom("conductor must be positive"));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(de::Error::custom)?;
        CycNum::from_coeffs(raw.conductor, &coeffs).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> IntPoly {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
    }

    #[test]
    fn phi12_times_smaller_factors_is_x12_minus_1() {
        // oracle: the product of Φ_d over d | 12 must rebuild x^12 − 1
        let mut prod = ints(&[1]);
        for d in [1u64, 2, 3, 4, 6, 12] {
            prod = poly_mul(&prod, &cyclotomic_polynomial(d));
        }
        let mut expect = vec![BigInt::zero(); 13];
        expect[0] = BigInt::from(-1);
        expect[12] = BigInt::one();
        assert_eq!(prod, expect);
    }

    #[test]
    fn zeta_powers() {
        let i = CycNum::zeta_pow(4, 1);
        assert_eq!(i.coeffs(), vec![q(0, 1), q(1, 1)]);
        assert_eq!(CycNum::zeta_pow(4, 2), CycNum::from_int(4, -1));
        assert!(CycNum::zeta_pow(3, 3).is_one());
        assert_eq!(&i * &i, CycNum::from_int(4, -1));
        let z3 = CycNum::zeta_pow(3, 1);
        assert_eq!(&z3 + &CycNum::zeta_pow(3, 2), CycNum::from_int(3, -1));
    }

    #[test]
    fn mismatched_conductors_error() {
        let a = CycNum::one(3);
        let b = CycNum::one(4);
        assert_eq!(a.checked_add(&b), Err(Error::ConductorMismatch(3, 4)));
    }

    #[test]
    fn inverses() {
        let two = CycNum::from_int(5, 2);
        assert_eq!(two.inverse().unwrap(), CycNum::from_rational(5, &q(1, 2)));
        for l in [3u64, 5, 8, 12] {
            let z = CycNum::zeta_pow(l, 1);
            assert_eq!(z.inverse().unwrap(), CycNum::zeta_pow(l, l as i64 - 1));
        }
        let a = CycNum::one(4) + CycNum::zeta_pow(4, 1);
        let expect = (CycNum::one(4) - CycNum::zeta_pow(4, 1)).scale(&q(1, 2));
        assert_eq!(a.inverse().unwrap(), expect);
        assert_eq!(CycNum::zero(7).inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn embeddings() {
        let m1 = CycNum::from_int(2, -1);
        assert_eq!(m1.embed(4).unwrap(), CycNum::from_int(4, -1));
        assert_eq!(CycNum::zeta_pow(3, 1).embed(6).unwrap(), CycNum::zeta_pow(6, 2));
        assert!(CycNum::one(3).embed(4).is_err());
    }

    #[test]
    fn complex_values() {
        let i = CycNum::zeta_pow(4, 1).approx_complex(53);
        assert!((i - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let r = CycNum::from_rational(1, &q(-1, 12)).approx_complex(53);
        assert!((r.re + 1.0 / 12.0).abs() < 1e-15 && r.im == 0.0);
        let w = CycNum::zeta_pow(3, 1).approx_complex(53);
        let exact = Complex64::new(
            (2.0 * std::f64::consts::PI / 3.0).cos(),
            (2.0 * std::f64::consts::PI / 3.0).sin(),
        );
        assert!((w - exact).norm() < 1e-9);
        assert!((w.im - 0.866_025_403_784_438_6).abs() < 1e-9);
    }

    #[test]
    fn minimal_conductor_detects_subfields() {
        // ζ_12^4 = ζ_3
        assert_eq!(CycNum::zeta_pow(12, 4).minimal_conductor(), 3);
        assert_eq!(CycNum::zeta_pow(12, 3).minimal_conductor(), 4);
        assert_eq!(CycNum::from_int(12, 7).minimal_conductor(), 1);
        assert_eq!(CycNum::zeta_pow(12, 1).minimal_conductor(), 12);
    }

    #[test]
    fn json_round_trip() {
        let x = CycNum::from_coeffs(5, &[q(1, 2), q(-3, 1), q(0, 1), q(7, 9)]).unwrap();
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"conductor":5,"coeffs":["1/2","-3/1","0/1","7/9"]}"#);
        let y: CycNum = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn display() {
        let x = CycNum::from_coeffs(4, &[q(-1, 2), q(1, 1)]).unwrap();
        assert_eq!(x.to_string(), "-1/2 + z");
    }
}
