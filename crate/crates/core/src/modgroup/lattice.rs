use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::matrix::ResidueMatrix;
use super::subgroup::CongruenceSubgroup;
use crate::arith::{gcd, modp};

/// A point of Λ_N: a pair in (Z/N)² of additive order exactly N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    pub n: u32,
    pub x: u32,
    pub y: u32,
}

impl LatticePoint {
    /// Reduces mod `n`; `None` if the order is not exactly `n`.
    pub fn new(n: u32, x: i64, y: i64) -> Option<Self> {
        let p = Self::reduce(n, x, y);
        if gcd(gcd(p.x as i64, p.y as i64), n as i64) == 1 {
            Some(p)
        } else {
            None
        }
    }

    pub(crate) fn reduce(n: u32, x: i64, y: i64) -> Self {
        LatticePoint { n, x: modp(x, n as i64) as u32, y: modp(y, n as i64) as u32 }
    }

    pub fn neg(&self) -> Self {
        Self::reduce(self.n, -(self.x as i64), -(self.y as i64))
    }

    /// Scalar multiple u·λ.
    pub fn scale(&self, u: i64) -> Self {
        Self::reduce(self.n, u * self.x as i64, u * self.y as i64)
    }

    /// Right action λ ↦ λγ (row vector times matrix).
    pub fn act(&self, g: &ResidueMatrix) -> Self {
        debug_assert_eq!(self.n, g.n);
        let (x, y) = (self.x as i64, self.y as i64);
        let [a, b, c, d] = g.entries();
        Self::reduce(self.n, x * a + y * c, x * b + y * d)
    }

    /// Lexicographically smaller of ±λ, with the sign that maps it to λ.
    pub fn sign_canonical(&self) -> (Self, i32) {
        let m = self.neg();
        if m < *self {
            (m, -1)
        } else {
            (*self, 1)
        }
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Serialize for LatticePoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.x, self.y].serialize(s)
    }
}

/// Λ_N, in lexicographic order.
pub fn lambda_points(n: u32) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for x in 0..n as i64 {
        for y in 0..n as i64 {
            if let Some(p) = LatticePoint::new(n, x, y) {
                out.push(p);
            }
        }
    }
    out
}

/// A G-orbit in Λ_N.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LatticeOrbit {
    pub points: BTreeSet<LatticePoint>,
    pub regular: bool,
}

impl LatticeOrbit {
    pub fn from_points(points: BTreeSet<LatticePoint>) -> Self {
        let regular = points.iter().all(|p| !points.contains(&p.neg()));
        LatticeOrbit { points, regular }
    }

    pub fn representative(&self) -> LatticePoint {
        *self.points.iter().next().expect("empty orbit")
    }

    pub fn neg(&self) -> LatticeOrbit {
        LatticeOrbit {
            points: self.points.iter().map(|p| p.neg()).collect(),
            regular: self.regular,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.points.contains(p)
    }
}

pub fn orbit_of(g: &CongruenceSubgroup, p: LatticePoint) -> LatticeOrbit {
    LatticeOrbit::from_points(g.elements().iter().map(|m| p.act(m)).collect())
}

/// The partition of Λ_N into G-orbits, ordered by least point.
pub fn orbits(g: &CongruenceSubgroup) -> Vec<LatticeOrbit> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in lambda_points(g.level()) {
        if seen.contains(&p) {
            continue;
        }
        let o = orbit_of(g, p);
        seen.extend(o.points.iter().copied());
        out.push(o);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::factorize;

    #[test]
    fn small_lambda_sets() {
        assert_eq!(lambda_points(1), vec![LatticePoint { n: 1, x: 0, y: 0 }]);
        let l2: Vec<(u32, u32)> = lambda_points(2).iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(l2, vec![(0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn lambda_counts_match_brute_force() {
        // oracle: direct gcd filter over all N² pairs, and N²Π(1 − p⁻²)
        for n in 1..=24u32 {
            let brute = (0..n)
                .flat_map(|x| (0..n).map(move |y| (x, y)))
                .filter(|&(x, y)| num_integer::Integer::gcd(&num_integer::Integer::gcd(&x, &y), &n) == 1)
                .count();
            let formula = factorize(n as u64)
                .iter()
                .fold((n * n) as u64, |acc, &(p, _)| acc / (p * p) * (p * p - 1));
            assert_eq!(lambda_points(n).len(), brute);
            assert_eq!(brute as u64, formula);
        }
        assert_eq!(lambda_points(4).len(), 12);
    }
}
