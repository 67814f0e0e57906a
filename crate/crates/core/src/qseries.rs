//! Truncated expansions in q_N = e(τ/N) with cyclotomic coefficients, plus the
//! coefficient of 1/(π·Im τ) carried at weight 2.

use std::fmt::Write as _;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::lcm;
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExpansion {
    pub weight: u32,
    /// Exponents are j/qden in e(τ).
    pub qden: u32,
    pub conductor: u64,
    /// a_0..a_J.
    pub coeffs: Vec<CycNum>,
    /// Coefficient of 1/(π·Im τ).
    pub nonhol: CycNum,
}

impl QExpansion {
    pub fn zero(weight: u32, qden: u32, conductor: u64, truncation: usize) -> Self {
        QExpansion {
            weight,
            qden,
            conductor,
            coeffs: vec![CycNum::zero(conductor); truncation + 1],
            nonhol: CycNum::zero(conductor),
        }
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficient(&self, j: usize) -> Option<&CycNum> {
        self.coeffs.get(j)
    }

    pub fn constant_term(&self) -> &CycNum {
        &self.coeffs[0]
    }

    pub fn is_holomorphic(&self) -> bool {
        self.nonhol.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.nonhol.is_zero() && self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn truncate(&self, j: usize) -> QExpansion {
        let mut out = self.clone();
        out.coeffs.truncate(j.min(self.truncation()) + 1);
        out
    }

    /// Same series over Q(ζ_l), l a multiple of the conductor.
    pub fn embed(&self, l: u64) -> Result<QExpansion> {
        if l == self.conductor {
            return Ok(self.clone());
        }
        Ok(QExpansion {
            weight: self.weight,
            qden: self.qden,
            conductor: l,
            coeffs: self.coeffs.iter().map(|c| c.embed(l)).collect::<Result<_>>()?,
            nonhol: self.nonhol.embed(l)?,
        })
    }

    /// Rewrites in q_M for a multiple M of qden: a_j moves to index j·M/qden.
    pub fn reindex(&self, m: u32) -> Result<QExpansion> {
        if m == 0 || m % self.qden != 0 {
            return Err(Error::param(format!("cannot re-index q_{} into q_{m}", self.qden)));
        }
        let f = (m / self.qden) as usize;
        let mut coeffs = vec![CycNum::zero(self.conductor); self.truncation() * f + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            coeffs[j * f] = c.clone();
        }
        Ok(QExpansion { qden: m, coeffs, ..self.clone() })
    }

    /// Inverse of `reindex`: keeps indices divisible by qden/m, failing if any
    /// other coefficient is nonzero.
    pub fn project(&self, m: u32) -> Result<QExpansion> {
        if m == 0 || self.qden % m != 0 {
            return Err(Error::param(format!("cannot project q_{} onto q_{m}", self.qden)));
        }
        let f = (self.qden / m) as usize;
        if self.coeffs.iter().enumerate().any(|(j, c)| j % f != 0 && !c.is_zero()) {
            return Err(Error::domain(format!("series has exponents outside (1/{m})Z")));
        }
        let coeffs = self.coeffs.iter().step_by(f).cloned().collect();
        Ok(QExpansion { qden: m, coeffs, ..self.clone() })
    }

    fn align(&self, other: &QExpansion) -> Result<(QExpansion, QExpansion)> {
        if self.weight != other.weight {
            return Err(Error::param(format!("weight mismatch: {} vs {}", self.weight, other.weight)));
        }
        let (a, b) = (self.qden as i64, other.qden as i64);
        if a % b != 0 && b % a != 0 {
            return Err(Error::param(format!("incompatible q-denominators {a} and {b}")));
        }
        let m = lcm(a, b) as u32;
        let l = lcm(self.conductor as i64, other.conductor as i64) as u64;
        let x = self.reindex(m)?.embed(l)?;
        let y = other.reindex(m)?.embed(l)?;
        let j = x.truncation().min(y.truncation());
        Ok((x.truncate(j), y.truncate(j)))
    }

    pub fn add(&self, other: &QExpansion) -> Result<QExpansion> {
        let (mut x, y) = self.align(other)?;
        for (a, b) in x.coeffs.iter_mut().zip(&y.coeffs) {
            *a = &*a + b;
        }
        x.nonhol = &x.nonhol + &y.nonhol;
        Ok(x)
    }

    pub fn sub(&self, other: &QExpansion) -> Result<QExpansion> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QExpansion {
        QExpansion {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            nonhol: -&self.nonhol,
            ..self.clone()
        }
    }

    pub fn scale(&self, c: &CycNum) -> Result<QExpansion> {
        let l = lcm(self.conductor as i64, c.conductor() as i64) as u64;
        let c = c.embed(l)?;
        let x = self.embed(l)?;
        Ok(QExpansion {
            coeffs: x.coeffs.iter().map(|a| a * &c).collect(),
            nonhol: &x.nonhol * &c,
            ..x
        })
    }

    /// Equality up to the smaller truncation, after aligning q-denominators
    /// and conductors.
    pub fn agrees_with(&self, other: &QExpansion) -> Result<bool> {
        let (x, y) = self.align(other)?;
        Ok(x == y)
    }

    /// Largest minimal conductor over all coefficients (lcm).
    pub fn coefficient_conductor(&self) -> u64 {
        self.coeffs
            .iter()
            .chain(std::iter::once(&self.nonhol))
            .fold(1i64, |acc, c| lcm(acc, c.minimal_conductor() as i64)) as u64
    }

    /// One line per nonzero coefficient: `q^(j/N): value`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "weight {} in q_{} over Q(zeta_{}), truncated at q_{}^{}",
            self.weight,
            self.qden,
            self.conductor,
            self.qden,
            self.truncation()
        );
        if !self.nonhol.is_zero() {
            let _ = writeln!(s, "  1/(pi Im tau): {}", self.nonhol);
        }
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let _ = writeln!(s, "  q^({j}/{}): {}", self.qden, c);
            }
        }
        s
    }
}

impl Serialize for QExpansion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("QExpansion", 7)?;
        st.serialize_field("weight", &self.weight)?;
        st.serialize_field("qden", &self.qden)?;
        st.serialize_field("conductor", &self.conductor)?;
        st.serialize_field("truncation", &self.truncation())?;
        st.serialize_field("coeffs", &self.coeffs)?;
        st.serialize_field("nonhol", &self.nonhol)?;
        st.serialize_field("holomorphic", &self.is_holomorphic())?;
        st.end()
    }
}
