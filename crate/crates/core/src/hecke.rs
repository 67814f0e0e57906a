//! Diamond and T_p operators on Γ₁(N) and Γ₀(N) orbital-sum labels, and the
//! q-expansion form of T_p used to check them.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;

use crate::arith::{gcd, is_prime, lcm, mod_inverse, modp};
use crate::cyclotomic::CycNum;
use crate::eisenstein::{Combination, Kind, SpectralData};
use crate::error::{Error, Result};
use crate::modgroup::{CongruenceSubgroup, LatticePoint, ResidueMatrix};
use crate::qseries::QExpansion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    /// E^{(1)}(λ) = Σ_{n < N/δ₁} E((λ₁, λ₂ + δ₁n)), keyed by (λ₁, λ₂ mod δ₁).
    Gamma1,
    /// E^{(0)} keyed by (0,1), (N/2,1) or (δ, λ₀ mod gcd(δ, N/δ)).
    Gamma0,
}

/// δ₁ = gcd(λ₁, N), with δ₁ = N for λ₁ = 0.
fn delta1(x: i64, n: i64) -> i64 {
    if x.rem_euclid(n) == 0 {
        n
    } else {
        gcd(x, n)
    }
}

/// Canonical Γ₁(N) label of (λ₁, λ₂).
pub fn gamma1_label(n: u32, x: i64, y: i64) -> Result<(u32, u32)> {
    let ni = n as i64;
    if LatticePoint::new(n, x, y).is_none() {
        return Err(Error::param(format!("({x},{y}) does not have order {n}")));
    }
    let d = delta1(x, ni);
    Ok((modp(x, ni) as u32, modp(y, d) as u32))
}

/// Canonical Γ₀(N) label of (δ, λ₀) where δ = gcd(λ₁, N) describes the orbit.
pub fn gamma0_label(n: u32, delta: i64, l0: i64) -> Result<(u32, u32)> {
    let ni = n as i64;
    if n < 3 {
        return Err(Error::param("Γ₀(N) labels need N ≥ 3"));
    }
    let d = delta1(delta, ni);
    if d == ni {
        return Ok((0, 1));
    }
    if 2 * d == ni {
        return Ok((n / 2, 1));
    }
    let g = gcd(d, ni / d);
    if gcd(l0, g) != 1 {
        return Err(Error::param(format!("λ₀ = {l0} is not coprime to gcd({d}, {})", ni / d)));
    }
    Ok((d as u32, modp(l0, g) as u32))
}

/// All Γ₀(N) labels, in the order (0,1), type II by (δ, λ₀), then (N/2,1).
pub fn gamma0_labels(n: u32) -> Vec<(u32, u32)> {
    let ni = n as i64;
    let mut out = vec![(0, 1)];
    for d in crate::arith::divisors(n as u64).into_iter().map(|d| d as i64) {
        if 2 * d >= ni {
            continue;
        }
        let g = gcd(d, ni / d);
        for l0 in 0..g {
            if gcd(l0, g) == 1 {
                out.push((d as u32, l0 as u32));
            }
        }
    }
    if n % 2 == 0 {
        out.push((n / 2, 1));
    }
    out
}

/// All Γ₁(N) labels (λ₁, λ₂ mod δ₁) in lexicographic order.
pub fn gamma1_labels(n: u32) -> Vec<(u32, u32)> {
    let ni = n as i64;
    let mut out = Vec::new();
    for x in 0..ni {
        let d = delta1(x, ni);
        for y in 0..d {
            if gcd(gcd(x, y), ni) == 1 {
                out.push((x as u32, y as u32));
            }
        }
    }
    out
}

/// Integer combination of orbital-sum labels of one family and kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelCombination {
    pub kind: Kind,
    pub family: Family,
    pub weight: u32,
    pub level: u32,
    pub conductor: u64,
    pub terms: BTreeMap<(u32, u32), CycNum>,
}

impl LabelCombination {
    pub fn new(kind: Kind, family: Family, weight: u32, level: u32) -> Self {
        LabelCombination { kind, family, weight, level, conductor: level as u64, terms: BTreeMap::new() }
    }

    /// A single label with coefficient 1, canonicalized.
    pub fn label(kind: Kind, family: Family, weight: u32, level: u32, a: i64, b: i64) -> Result<Self> {
        let mut c = Self::new(kind, family, weight, level);
        let key = c.canonical(a, b)?;
        c.terms.insert(key, CycNum::one(level as u64));
        Ok(c)
    }

    fn canonical(&self, a: i64, b: i64) -> Result<(u32, u32)> {
        match self.family {
            Family::Gamma1 => gamma1_label(self.level, a, b),
            Family::Gamma0 => gamma0_label(self.level, a, b),
        }
    }

    fn push(&mut self, a: i64, b: i64, c: &CycNum) -> Result<()> {
        let key = self.canonical(a, b)?;
        let c = c.embed(lcm(self.conductor as i64, c.conductor() as i64) as u64)?;
        if c.conductor() != self.conductor {
            *self = self.embed(c.conductor())?;
        }
        let e = self.terms.entry(key).or_insert_with(|| CycNum::zero(c.conductor()));
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn embed(&self, l: u64) -> Result<Self> {
        let terms = self.terms.iter().map(|(k, c)| Ok((*k, c.embed(l)?))).collect::<Result<_>>()?;
        Ok(LabelCombination { conductor: l, terms, ..self.clone() })
    }

    fn empty_like(&self) -> Self {
        LabelCombination { terms: BTreeMap::new(), ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.kind, self.family, self.weight, self.level) != (other.kind, other.family, other.weight, other.level) {
            return Err(Error::param("label combinations of different shape"));
        }
        let mut out = self.clone();
        for (&(a, b), c) in &other.terms {
            out.push(a as i64, b as i64, c)?;
        }
        Ok(out)
    }

    pub fn scale(&self, s: &CycNum) -> Result<Self> {
        let mut out = self.empty_like();
        for (&(a, b), c) in &self.terms {
            out.push(a as i64, b as i64, &(&c.embed(lcm(c.conductor() as i64, s.conductor() as i64) as u64)?
                * &s.embed(lcm(c.conductor() as i64, s.conductor() as i64) as u64)?))?;
        }
        Ok(out)
    }

    /// Every coefficient is a rational integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.as_rational().is_some_and(|q| q.is_integer()))
    }

    /// The Γ₁(N) labels making up each term (Γ₀ labels expand per the
    /// orbit description; Γ₁ labels are returned as they are).
    pub fn to_gamma1(&self) -> Result<LabelCombination> {
        if self.family == Family::Gamma1 {
            return Ok(self.clone());
        }
        let n = self.level as i64;
        let mut out = LabelCombination { family: Family::Gamma1, ..self.empty_like() };
        for (&(d, l0), c) in &self.terms {
            let d = d as i64;
            if d == 0 {
                for y in 0..n {
                    if gcd(y, n) == 1 {
                        out.push(0, y, c)?;
                    }
                }
            } else if 2 * d == n {
                for y in 0..d {
                    if gcd(y, d) == 1 {
                        out.push(d, y, c)?;
                    }
                }
            } else {
                let m = n / d;
                let g = gcd(d, m);
                for a in 0..m {
                    if gcd(a, m) != 1 {
                        continue;
                    }
                    for y in 0..d {
                        if gcd(y, d) == 1 && modp(a * y - l0 as i64, g) == 0 {
                            out.push(a * d, y, c)?;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// The underlying combination of level-N series.
    pub fn to_lattice(&self) -> Result<Combination> {
        let g1 = self.to_gamma1()?;
        let n = self.level;
        let ni = n as i64;
        let mut out = Combination::new(self.kind, self.weight, n, self.conductor);
        for (&(x, y), c) in &g1.terms {
            let d = delta1(x as i64, ni);
            for s in 0..ni / d {
                out.add_term(LatticePoint::new(n, x as i64, y as i64 + d * s).expect("label has order N"), c);
            }
        }
        Ok(out)
    }

    pub fn expand(&self, j: usize) -> Result<QExpansion> {
        self.to_lattice()?.expand(j)
    }
}

impl fmt::Display for LabelCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match (self.kind, self.family) {
            (Kind::E, Family::Gamma1) => "E1",
            (Kind::E, Family::Gamma0) => "E0",
            (Kind::G, Family::Gamma1) => "G1",
            (Kind::G, Family::Gamma0) => "G0",
        };
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})*{tag}({a},{b})")?;
        }
        Ok(())
    }
}

impl Serialize for LabelCombination {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        struct Term<'a> {
            label: [u32; 2],
            coeff: &'a CycNum,
        }
        let terms: Vec<_> = self.terms.iter().map(|(&(a, b), c)| Term { label: [a, b], coeff: c }).collect();
        let mut st = s.serialize_struct("LabelCombination", 5)?;
        st.serialize_field("kind", &self.kind)?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("weight", &self.weight)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

fn check_unit(d: i64, n: u32) -> Result<i64> {
    mod_inverse(d, n as i64).ok_or_else(|| Error::param(format!("{d} is not coprime to {n}")))
}

/// ⟨d⟩: (λ₁, λ₂) ↦ (d⁻¹λ₁, dλ₂) on Γ₁ labels; the identity on Γ₀ labels.
pub fn diamond(d: i64, c: &LabelCombination) -> Result<LabelCombination> {
    let di = check_unit(d, c.level)?;
    if c.family == Family::Gamma0 {
        return Ok(c.clone());
    }
    let mut out = c.empty_like();
    for (&(x, y), a) in &c.terms {
        out.push(di * x as i64, d * y as i64, a)?;
    }
    Ok(out)
}

fn check_prime(p: u64, n: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::param(format!("{p} is not prime")));
    }
    if n as u64 % p == 0 {
        return Err(Error::param(format!("p = {p} divides the level {n}")));
    }
    Ok(())
}

/// T_p on labels, p ∤ N.
pub fn tp_label(p: u64, c: &LabelCombination) -> Result<LabelCombination> {
    check_prime(p, c.level)?;
    let pi = p as i64;
    let inv = check_unit(pi, c.level)?;
    let pk = CycNum::from_bigint(1, BigInt::from(p).pow(c.weight - 1));
    let n = c.level as i64;
    let mut out = c.empty_like();
    for (&(a, b), coef) in &c.terms {
        let scaled = &coef.embed(c.conductor)? * &pk.embed(c.conductor)?;
        let (a, b) = (a as i64, b as i64);
        match c.family {
            Family::Gamma1 => {
                out.push(a, pi * b, &scaled)?;
                out.push(inv * a, b, coef)?;
            }
            Family::Gamma0 if a == 0 || 2 * a == n => {
                out.push(a, b, &scaled)?;
                out.push(a, b, coef)?;
            }
            Family::Gamma0 => {
                let g = gcd(a, n / a);
                let ginv = mod_inverse(pi, g).unwrap_or(0);
                out.push(a, pi * b, &scaled)?;
                out.push(a, ginv * b, coef)?;
            }
        }
    }
    Ok(out)
}

/// b_j = a_{jp} + p^{k−1}·a'_{j/p} on an expansion with integral exponents,
/// with a' the coefficients of `twist` (⟨p⟩f; pass f itself for trivial
/// character). Truncation drops to ⌊J/p⌋; nonhol picks up the same weights.
pub fn tp_qexp_twisted(f: &QExpansion, twist: &QExpansion, p: u64, k: u32) -> Result<QExpansion> {
    if !is_prime(p) {
        return Err(Error::param(format!("{p} is not prime")));
    }
    let f = integral(f)?;
    let t = integral(twist)?;
    let l = lcm(f.conductor as i64, t.conductor as i64) as u64;
    let (f, t) = (f.embed(l)?, t.embed(l)?);
    let pk = CycNum::from_bigint(l, BigInt::from(p).pow(k - 1));
    let p = p as usize;
    let jmax = f.truncation().min(t.truncation() * p) / p;
    let mut out = QExpansion::zero(k, 1, l, jmax);
    for j in 0..=jmax {
        let mut v = f.coeffs[j * p].clone();
        if j % p == 0 {
            v = &v + &(&pk * &t.coeffs[j / p]);
        }
        out.coeffs[j] = v;
    }
    out.nonhol = &f.nonhol + &(&pk * &t.nonhol);
    Ok(out)
}

pub fn tp_qexp(f: &QExpansion, p: u64, k: u32) -> Result<QExpansion> {
    tp_qexp_twisted(f, f, p, k)
}

fn integral(f: &QExpansion) -> Result<QExpansion> {
    f.project(1).map_err(|_| Error::domain("T_p on q-expansions needs integral exponents"))
}

/// ⟨d⟩f through the slash action of (d⁻¹, 0; 0, d) ∈ Γ₀(N); independent of
/// the label substitution rule.
pub fn diamond_by_slash(d: i64, c: &LabelCombination) -> Result<Combination> {
    let di = check_unit(d, c.level)?;
    let m = ResidueMatrix::new(c.level, di, 0, 0, d).ok_or_else(|| Error::internal("diamond matrix"))?;
    Ok(c.to_lattice()?.slash(&m))
}

/// Spectral-basis coordinates on Γ₁(N) of a combination of E-kind Γ₁ labels:
/// each label is ±E_x, or 2E_x on an irregular cusp when N ≥ 3.
pub fn gamma1_spectral_coordinates(c: &LabelCombination) -> Result<BTreeMap<usize, CycNum>> {
    if c.kind != Kind::E {
        return Err(Error::param("spectral coordinates need E-kind labels"));
    }
    let c = c.to_gamma1()?;
    let n = c.level;
    let data = SpectralData::new(&CongruenceSubgroup::gamma1(n));
    let mut out: BTreeMap<usize, CycNum> = BTreeMap::new();
    for (&(x, y), a) in &c.terms {
        let p = LatticePoint::new(n, x as i64, y as i64).expect("label has order N");
        let i = data
            .classes
            .iter()
            .position(|cl| cl.orbit.contains(&p) || cl.orbit.contains(&p.neg()))
            .ok_or_else(|| Error::internal("label outside every cusp class"))?;
        let orbit = data.attached_orbit(i);
        let factor: i64 = if n >= 3 && !orbit.regular {
            2
        } else if orbit.contains(&p) || c.weight % 2 == 0 {
            1
        } else {
            -1
        };
        let e = out.entry(i).or_insert_with(|| CycNum::zero(c.conductor));
        *e = &*e + &a.scale_int(&BigInt::from(factor));
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// Spectral basis element E_{k,x} of Γ₁(N) written in Γ₁ labels.
pub fn gamma1_spectral_element(n: u32, i: usize, k: u32) -> Result<LabelCombination> {
    let data = SpectralData::new(&CongruenceSubgroup::gamma1(n));
    let orbit = data.attached_orbit(i);
    let p = orbit.representative();
    let mut c = LabelCombination::label(Kind::E, Family::Gamma1, k, n, p.x as i64, p.y as i64)?;
    if n >= 3 && !orbit.regular {
        c = c.scale(&CycNum::from_rational(1, &num_rational::BigRational::new(BigInt::one(), 2.into())))?;
    }
    Ok(c)
}
