use std::collections::BTreeSet;

use super::lattice::{lambda_points, orbits, LatticeOrbit, LatticePoint};
use super::subgroup::{CongruenceSubgroup, GroupSpec};
use crate::arith::gcd;

/// A set of representatives of Λ_N / ±, admissible for some subgroup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleReps {
    pub n: u32,
    pub chosen: BTreeSet<LatticePoint>,
}

impl AdmissibleReps {
    pub fn contains(&self, p: &LatticePoint) -> bool {
        self.chosen.contains(p)
    }

    pub fn len(&self) -> usize {
        self.chosen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chosen.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LatticePoint> {
        self.chosen.iter()
    }

    /// The chosen point μ and the sign s with λ = s·μ.
    pub fn resolve(&self, p: &LatticePoint) -> (LatticePoint, i32) {
        if self.chosen.contains(p) {
            (*p, 1)
        } else {
            let m = p.neg();
            debug_assert!(self.chosen.contains(&m), "{p} has no representative");
            (m, -1)
        }
    }

    /// Meets every ± class once.
    pub fn is_section(&self) -> bool {
        let mut classes = BTreeSet::new();
        for p in &self.chosen {
            if !classes.insert(p.sign_canonical().0) {
                return false;
            }
        }
        classes.len() == lambda_points(self.n).iter().map(|p| p.sign_canonical().0).collect::<BTreeSet<_>>().len()
    }

    /// Section property plus: every regular orbit is inside or disjoint.
    pub fn is_admissible(&self, orbits: &[LatticeOrbit]) -> bool {
        self.is_section()
            && orbits.iter().filter(|o| o.regular).all(|o| {
                let hit = o.points.iter().filter(|p| self.chosen.contains(p)).count();
                hit == 0 || hit == o.len()
            })
    }
}

/// The explicit set A_N (types I, II, III); A_N = Λ_N for N ≤ 2.
pub fn standard_reps(n: u32) -> AdmissibleReps {
    let mut chosen = BTreeSet::new();
    if n <= 2 {
        chosen.extend(lambda_points(n));
        return AdmissibleReps { n, chosen };
    }
    let ni = n as i64;
    for y in 1..ni {
        if 2 * y < ni && gcd(y, ni) == 1 {
            chosen.insert(LatticePoint::reduce(n, 0, y));
        }
    }
    for x in 1..ni {
        if 2 * x >= ni {
            break;
        }
        for y in 0..ni {
            if let Some(p) = LatticePoint::new(n, x, y) {
                chosen.insert(p);
            }
        }
    }
    if n % 2 == 0 {
        let h = ni / 2;
        if n == 4 {
            chosen.insert(LatticePoint::reduce(n, 2, 1));
        } else {
            for y in 0..ni {
                if 4 * y < ni && gcd(y, h) == 1 {
                    chosen.insert(LatticePoint::reduce(n, h, y));
                    chosen.insert(LatticePoint::reduce(n, h, h + y));
                }
            }
        }
    }
    AdmissibleReps { n, chosen }
}

/// Generic construction: per ± pair of regular orbits, the orbit holding the
/// least point; on irregular orbits, the lexicographically smaller of ±λ.
pub fn generic_reps(g: &CongruenceSubgroup) -> AdmissibleReps {
    let n = g.level();
    let mut chosen = BTreeSet::new();
    let mut done = BTreeSet::new();
    for o in orbits(g) {
        let least = o.representative();
        if done.contains(&least) {
            continue;
        }
        if o.regular {
            let neg = o.neg();
            done.extend(neg.points.iter().copied());
            // orbits are visited by least point, so o holds the least point of o ∪ −o
            chosen.extend(o.points.iter().copied());
        } else {
            chosen.extend(o.points.iter().map(|p| p.sign_canonical().0));
        }
        done.extend(o.points.iter().copied());
    }
    AdmissibleReps { n, chosen }
}

/// A_N for Γ(N,t) and Γ₀(N) (re-verified), otherwise the generic construction.
pub fn admissible_reps(g: &CongruenceSubgroup) -> AdmissibleReps {
    let explicit = matches!(
        g.spec(),
        GroupSpec::Gamma { .. } | GroupSpec::Gamma1 { .. } | GroupSpec::Gamma0 { .. } | GroupSpec::GammaNt { .. }
    );
    if explicit {
        let a = standard_reps(g.level());
        if a.is_admissible(&orbits(g)) {
            return a;
        }
    }
    generic_reps(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_levels() {
        assert_eq!(standard_reps(2).len(), 3);
        assert_eq!(standard_reps(1).len(), 1);
        let a = standard_reps(4);
        assert!(a.contains(&LatticePoint::reduce(4, 2, 1)));
        assert!(!a.contains(&LatticePoint::reduce(4, 2, 3)));
    }

    #[test]
    fn standard_set_is_admissible_for_families() {
        for n in 1..=24u32 {
            let a = standard_reps(n);
            assert!(a.is_section(), "N = {n}");
            assert_eq!(a.len(), lambda_points(n).len() / if n >= 3 { 2 } else { 1 });
            assert!(a.is_admissible(&orbits(&CongruenceSubgroup::gamma0(n))), "Γ0({n})");
            for t in crate::arith::divisors(n as u64) {
                let g = CongruenceSubgroup::gamma_nt(n, t as u32).unwrap();
                assert!(a.is_admissible(&orbits(&g)), "Γ({n},{t})");
            }
        }
    }

    #[test]
    fn generic_is_admissible() {
        for n in 1..=12 {
            for g in [CongruenceSubgroup::gamma0(n), CongruenceSubgroup::gamma1(n)] {
                assert!(generic_reps(&g).is_admissible(&orbits(&g)));
            }
        }
    }
}
