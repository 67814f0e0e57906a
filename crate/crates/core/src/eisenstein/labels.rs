use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::arith::{factorize, lcm};
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::modgroup::{LatticePoint, ResidueMatrix};
use crate::special_values::partial_zeta_scaled;

/// E: the normalized series E_k(λ, N). G: the unnormalized series scaled by (2πi)^{−k}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Kind {
    E,
    G,
}

/// ε_N.
pub fn epsilon(n: u32) -> BigRational {
    if n <= 2 {
        BigRational::new(1.into(), 2.into())
    } else {
        BigRational::from_integer(1.into())
    }
}

/// A finite linear combination of level-N series of one kind, over Q(ζ_L).
/// Keys are the lexicographically smaller of ±λ; E(−λ) = (−1)^k E(λ) and
/// likewise for G.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    pub kind: Kind,
    pub weight: u32,
    pub level: u32,
    pub conductor: u64,
    pub terms: BTreeMap<LatticePoint, CycNum>,
}

impl Combination {
    pub fn new(kind: Kind, weight: u32, level: u32, conductor: u64) -> Self {
        debug_assert_eq!(conductor % level as u64, 0);
        Combination { kind, weight, level, conductor, terms: BTreeMap::new() }
    }

    pub fn single(kind: Kind, weight: u32, p: LatticePoint) -> Self {
        let mut c = Self::new(kind, weight, p.n, p.n as u64);
        c.add_term(p, &CycNum::one(p.n as u64));
        c
    }

    fn sign(&self, s: i32) -> i64 {
        if s < 0 && self.weight % 2 == 1 {
            -1
        } else {
            1
        }
    }

    /// Adds coef·X(λ), embedding coef into the combination's field.
    pub fn add_term(&mut self, p: LatticePoint, coef: &CycNum) {
        debug_assert_eq!(p.n, self.level);
        if coef.is_zero() {
            return;
        }
        let (q, s) = p.sign_canonical();
        let mut c = coef.embed(self.conductor).expect("coefficient conductor divides the field");
        if self.sign(s) < 0 {
            c = -c;
        }
        let e = self.terms.entry(q).or_insert_with(|| CycNum::zero(self.conductor));
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&q);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The field Q(ζ_l) for l a multiple of the current conductor.
    pub fn embed(&self, l: u64) -> Result<Combination> {
        let terms = self
            .terms
            .iter()
            .map(|(p, c)| Ok((*p, c.embed(l)?)))
            .collect::<Result<_>>()?;
        Ok(Combination { conductor: l, terms, ..self.clone() })
    }

    fn compatible(&self, other: &Combination) -> Result<u64> {
        if self.kind != other.kind || self.weight != other.weight || self.level != other.level {
            return Err(Error::param("combinations of different kind, weight or level"));
        }
        Ok(lcm(self.conductor as i64, other.conductor as i64) as u64)
    }

    pub fn add(&self, other: &Combination) -> Result<Combination> {
        let l = self.compatible(other)?;
        let mut out = self.embed(l)?;
        for (p, c) in &other.terms {
            out.add_term(*p, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycNum) -> Result<Combination> {
        let l = lcm(self.conductor as i64, c.conductor() as i64) as u64;
        let c = c.embed(l)?;
        let mut out = Combination::new(self.kind, self.weight, self.level, l);
        for (p, a) in &self.terms {
            out.add_term(*p, &(&a.embed(l)? * &c));
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Combination) -> Result<Combination> {
        self.add(&other.scale(&CycNum::from_int(1, -1))?)
    }

    /// f|_k γ: each label λ moves to λγ.
    pub fn slash(&self, g: &ResidueMatrix) -> Combination {
        let mut out = Combination::new(self.kind, self.weight, self.level, self.conductor);
        for (p, c) in &self.terms {
            out.add_term(p.act(g), c);
        }
        out
    }

    /// Constant term at ∞ of a single label.
    pub fn label_constant_term(kind: Kind, weight: u32, p: &LatticePoint) -> Result<CycNum> {
        let n = p.n;
        let l = n as u64;
        if p.x != 0 {
            return Ok(CycNum::zero(l));
        }
        match kind {
            Kind::E => {
                let ni = n as i64;
                let y = p.y as i64;
                let mut v = 0i64;
                if (y - 1).rem_euclid(ni) == 0 {
                    v += 1;
                }
                if (y + 1).rem_euclid(ni) == 0 {
                    v += if weight % 2 == 0 { 1 } else { -1 };
                }
                Ok(CycNum::from_rational(l, &(epsilon(n) * BigRational::from_integer(v.into()))))
            }
            Kind::G => partial_zeta_scaled(p.y as i64, l, weight),
        }
    }

    /// π_∞ of the combination.
    pub fn constant_term(&self) -> Result<CycNum> {
        let mut acc = CycNum::zero(self.conductor);
        for (p, c) in &self.terms {
            let v = Self::label_constant_term(self.kind, self.weight, p)?.embed(self.conductor)?;
            acc = &acc + &(&v * c);
        }
        Ok(acc)
    }

    /// π_∞(f|γ).
    pub fn constant_term_at(&self, g: &ResidueMatrix) -> Result<CycNum> {
        self.slash(g).constant_term()
    }

    /// Coefficient of 1/(π·Im τ); independent of λ for each kind.
    pub fn nonhol(&self) -> CycNum {
        let total = self.terms.values().fold(CycNum::zero(self.conductor), |a, c| &a + c);
        &total * &CycNum::from_rational(self.conductor, &nonhol_per_label(self.kind, self.weight, self.level))
    }
}

/// Weight-2 nonholomorphic coefficient of one series: 1/(4N²) for scaled G,
/// −6ε_N/(N²·Π_{p|N}(1−p⁻²)) for E.
pub fn nonhol_per_label(kind: Kind, weight: u32, n: u32) -> BigRational {
    if weight != 2 {
        return BigRational::from_integer(0.into());
    }
    let n2 = BigInt::from(n as u64 * n as u64);
    match kind {
        Kind::G => BigRational::new(1.into(), 4 * n2),
        Kind::E => {
            let mut prod = BigRational::from_integer(1.into());
            for (p, _) in factorize(n as u64) {
                let p2 = BigInt::from(p * p);
                prod *= BigRational::new(&p2 - 1, p2);
            }
            -epsilon(n) * BigRational::from_integer(6.into()) / (BigRational::from_integer(n2) * prod)
        }
    }
}
