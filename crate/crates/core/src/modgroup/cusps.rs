use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::lattice::{orbit_of, orbits, LatticeOrbit, LatticePoint};
use super::matrix::ResidueMatrix;
use super::subgroup::CongruenceSubgroup;
use crate::arith::{ext_gcd, gcd};

/// A cusp of G with its invariants. ∞ is stored as 1/0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cusp {
    pub numerator: i64,
    pub denominator: i64,
    pub amplitude: u32,
    pub regular: bool,
    /// |or_{G,N}(x)|, the size of the G-orbit of x in C(Γ(N)).
    pub orbit_size: u32,
    /// Lexicographically least point of O ∪ −O, where O is the attached orbit.
    pub point: LatticePoint,
}

impl Cusp {
    pub fn is_infinity(&self) -> bool {
        self.denominator == 0
    }

    /// ∞ first, then lexicographic on (numerator, denominator).
    pub fn order_key(&self) -> (bool, i64, i64) {
        (!self.is_infinity(), self.numerator, self.denominator)
    }

    /// A matrix of SL₂(Z) sending ∞ to this cusp.
    pub fn scaling_matrix(&self) -> [i64; 4] {
        scaling_matrix(self.numerator, self.denominator)
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "oo")
        } else if self.denominator == 1 {
            write!(f, "{}", self.numerator)
        } else {
            write!(f, "{}/{}", self.numerator, self.denominator)
        }
    }
}

/// γ = (a, b; c, d) ∈ SL₂(Z) with γ∞ = a/c.
pub fn scaling_matrix(a: i64, c: i64) -> [i64; 4] {
    let (g, x, y) = ext_gcd(a, c);
    assert_eq!(g, 1, "cusp representative must be a reduced fraction");
    // a·x + c·y = 1, so (a, −y; c, x) has determinant 1
    [a, -y, c, x]
}

/// Reduced fraction x with φ_N(x) = [λ]: lift λ to a coprime integer pair
/// (λ₁′, λ₂′) and return −λ₂′/λ₁′ (∞ = (1, 0)).
pub fn cusp_from_point(p: &LatticePoint) -> (i64, i64) {
    let n = p.n as i64;
    let (x, y) = (p.x as i64, p.y as i64);
    if n == 1 || (x == 0 && (y == 1 || y == n - 1)) {
        return (1, 0);
    }
    let (lx, ly) = if x == 0 {
        (n, y)
    } else {
        let mut ly = y;
        while gcd(x, ly) != 1 {
            ly += n;
        }
        (x, ly)
    };
    (-ly, lx)
}

/// φ_N(α/β) = (β, −α) mod N.
pub fn point_from_cusp(n: u32, num: i64, den: i64) -> LatticePoint {
    LatticePoint::reduce(n, den, -num)
}

/// Least h > 0 with ±γT^hγ⁻¹ ∈ G, and whether only the minus sign occurs.
pub fn amplitude_search(g: &CongruenceSubgroup, num: i64, den: i64) -> (u32, bool) {
    let n = g.level();
    let (a, c) = (num, den);
    for h in 1..=n as i64 {
        // γT^hγ⁻¹ = I + h·(−ac, a²; −c², ac)
        let m = ResidueMatrix::new(n, 1 - h * a * c, h * a * a, -h * c * c, 1 + h * a * c)
            .expect("conjugate of T^h has determinant 1");
        let plus = g.contains(&m);
        let minus = g.contains(&m.neg());
        if plus || minus {
            return (h as u32, minus && !plus);
        }
    }
    unreachable!("T^N lies in Γ(N) ⊆ G")
}

pub fn amplitude(g: &CongruenceSubgroup, num: i64, den: i64) -> u32 {
    amplitude_search(g, num, den).0
}

/// Size of the G-orbit of x in C(Γ(N)) via the action on Λ_N^±.
pub fn orbit_size_in_cusps(g: &CongruenceSubgroup, num: i64, den: i64) -> u32 {
    let p = point_from_cusp(g.level(), num, den);
    let o = orbit_of(g, p);
    let union: BTreeSet<_> = o.points.iter().flat_map(|q| [*q, q.neg()]).collect();
    let pm = if g.level() >= 3 { 2 } else { 1 };
    (union.len() / pm) as u32
}

/// A cusp together with the orbit of its lattice point.
#[derive(Debug, Clone)]
pub struct CuspClass {
    pub cusp: Cusp,
    /// The orbit O containing `cusp.point`.
    pub orbit: LatticeOrbit,
}

impl CuspClass {
    /// O ∪ −O.
    pub fn union(&self) -> BTreeSet<LatticePoint> {
        self.orbit.points.iter().flat_map(|q| [*q, q.neg()]).collect()
    }
}

/// One entry per G-orbit on Λ_N^±, sorted with ∞ first.
pub fn cusp_classes(g: &CongruenceSubgroup) -> Vec<CuspClass> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for o in orbits(g) {
        let rep = o.representative();
        if seen.contains(&rep) {
            continue;
        }
        let union: BTreeSet<_> = o.points.iter().flat_map(|q| [*q, q.neg()]).collect();
        seen.extend(union.iter().copied());
        let point = *union.iter().next().unwrap();
        let (num, den) = cusp_from_point(&point);
        let (amp, irregular) = amplitude_search(g, num, den);
        let pm = if g.level() >= 3 { 2 } else { 1 };
        let cusp = Cusp {
            numerator: num,
            denominator: den,
            amplitude: amp,
            regular: g.contains_minus_id() || !irregular,
            orbit_size: (union.len() / pm) as u32,
            point,
        };
        let orbit = if o.contains(&point) { o } else { o.neg() };
        out.push(CuspClass { cusp, orbit });
    }
    out.sort_by(|a, b| a.cusp.order_key().cmp(&b.cusp.order_key()));
    out
}

pub fn cusps(g: &CongruenceSubgroup) -> Vec<Cusp> {
    cusp_classes(g).into_iter().map(|c| c.cusp).collect()
}

/// A cusp of least amplitude, ties broken by the cusp order (∞ first).
pub fn min_amplitude_cusp(g: &CongruenceSubgroup) -> Cusp {
    cusps(g)
        .into_iter()
        .min_by(|a, b| match a.amplitude.cmp(&b.amplitude) {
            Ordering::Equal => a.order_key().cmp(&b.order_key()),
            o => o,
        })
        .expect("every group has a cusp")
}

/// The class in `classes` containing the cusp x (any representative).
pub fn locate_cusp(classes: &[CuspClass], n: u32, num: i64, den: i64) -> Option<usize> {
    let p = point_from_cusp(n, num, den);
    classes
        .iter()
        .position(|c| c.orbit.contains(&p) || c.orbit.contains(&p.neg()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_counts() {
        assert_eq!(cusps(&CongruenceSubgroup::gamma0(12)).len(), 6);
        assert_eq!(cusps(&CongruenceSubgroup::gamma(1)).len(), 1);
        assert!(cusps(&CongruenceSubgroup::gamma(1))[0].is_infinity());
        let c = cusps(&CongruenceSubgroup::gamma1(4));
        assert_eq!(c.len(), 3);
        assert_eq!(c.iter().filter(|x| !x.regular).count(), 1);
        let irr = c.iter().find(|x| !x.regular).unwrap();
        // the irregular cusp is the class of 1/2
        let g = CongruenceSubgroup::gamma1(4);
        let classes = cusp_classes(&g);
        let idx = locate_cusp(&classes, 4, 1, 2).unwrap();
        assert_eq!(classes[idx].cusp, *irr);
    }

    #[test]
    fn amplitudes() {
        for n in 1..=8 {
            let g = CongruenceSubgroup::gamma(n);
            assert!(cusps(&g).iter().all(|c| c.amplitude == n));
            assert_eq!(amplitude(&CongruenceSubgroup::gamma0(n), 1, 0), 1);
        }
        let g = CongruenceSubgroup::gamma1(4);
        // −γTγ⁻¹ = (1,3;0,1) mod 4 already lies in Γ₁(4)
        assert_eq!(amplitude_search(&g, 1, 2), (1, true));
        assert_eq!(scaling_matrix(1, 2), [1, 0, 2, 1]);
    }

    #[test]
    fn orbit_sizes() {
        for n in 3..=12u32 {
            let phi = crate::arith::euler_phi(n as u64) as u32;
            assert_eq!(orbit_size_in_cusps(&CongruenceSubgroup::gamma0(n), 1, 0), phi / 2);
            assert_eq!(orbit_size_in_cusps(&CongruenceSubgroup::gamma1(n), 1, 0), 1);
            assert!(cusps(&CongruenceSubgroup::gamma(n)).iter().all(|c| c.orbit_size == 1));
        }
    }

    #[test]
    fn minimal_amplitude_is_infinity_for_families() {
        for n in 1..=12 {
            assert!(min_amplitude_cusp(&CongruenceSubgroup::gamma0(n)).is_infinity());
            assert!(min_amplitude_cusp(&CongruenceSubgroup::gamma1(n)).is_infinity());
            assert!(min_amplitude_cusp(&CongruenceSubgroup::gamma(n)).is_infinity());
        }
    }

    #[test]
    fn lifted_representatives_map_back() {
        for n in 1..=12 {
            for p in super::super::lattice::lambda_points(n) {
                let (a, c) = cusp_from_point(&p);
                assert_eq!(gcd(a, c), 1);
                let q = point_from_cusp(n, a, c);
                assert!(q == p || q == p.neg(), "{p} -> {a}/{c}");
            }
        }
    }
}
