//! Orbit lists for Γ(N,t) and Γ₀(N) written out by type, independent of the
//! group closure code.

use std::collections::BTreeSet;

use super::lattice::{LatticeOrbit, LatticePoint};
use crate::arith::{divisors, euler_phi, gcd, lcm};
use crate::error::{Error, Result};

fn orbit(points: impl IntoIterator<Item = LatticePoint>) -> LatticeOrbit {
    LatticeOrbit::from_points(points.into_iter().collect())
}

fn sorted(mut v: Vec<LatticeOrbit>) -> Vec<LatticeOrbit> {
    v.sort_by_key(|o| o.representative());
    v
}

pub fn closed_form_orbits_gamma_nt(n: u32, t: u32) -> Result<Vec<LatticeOrbit>> {
    if n == 0 || t == 0 || n % t != 0 {
        return Err(Error::param(format!("Γ(N,t) needs t | N, got N = {n}, t = {t}")));
    }
    let p = |x: i64, y: i64| LatticePoint::reduce(n, x, y);
    match n {
        1 => return Ok(vec![orbit([p(0, 0)])]),
        2 if t == 1 => return Ok(vec![orbit([p(0, 1)]), orbit([p(1, 0), p(1, 1)])]),
        2 => return Ok(vec![orbit([p(0, 1)]), orbit([p(1, 0)]), orbit([p(1, 1)])]),
        _ => {}
    }
    let (ni, ti) = (n as i64, t as i64);
    let mut out = Vec::new();
    // type I: (0, λ₂) fixed
    for y in 0..ni {
        if gcd(y, ni) == 1 {
            out.push(orbit([p(0, y)]));
        }
    }
    // type II: 0 < λ₁ < N/2, λ₀ mod gcd(tλ₁, N), plus negatives
    for x in 1..ni {
        if 2 * x >= ni {
            break;
        }
        let step = gcd(ti * x, ni);
        for l0 in 0..step {
            if gcd(gcd(l0, x), ni) != 1 {
                continue;
            }
            let o = orbit((0..ni / step).map(|j| p(x, l0 + j * step)));
            out.push(o.neg());
            out.push(o);
        }
    }
    // type III: λ₁ = N/2
    if n % 2 == 0 {
        let h = ni / 2;
        for y in 0..ni {
            if gcd(y, h) != 1 {
                continue;
            }
            if t % 2 == 1 {
                if y < h {
                    out.push(orbit([p(h, y), p(h, y + h)]));
                }
            } else {
                out.push(orbit([p(h, y)]));
            }
        }
    }
    Ok(sorted(out))
}

pub fn closed_form_orbits_gamma0(n: u32) -> Result<Vec<LatticeOrbit>> {
    if n < 3 {
        return Err(Error::param(format!("closed form for Γ₀(N) needs N ≥ 3, got {n}")));
    }
    let ni = n as i64;
    let p = |x: i64, y: i64| LatticePoint::reduce(n, x, y);
    let mut out = Vec::new();
    out.push(orbit((0..ni).filter(|&y| gcd(y, ni) == 1).map(|y| p(0, y))));
    for d in divisors(n as u64).into_iter().map(|d| d as i64) {
        if 2 * d >= ni {
            continue;
        }
        let m = ni / d;
        let g = gcd(d, m);
        for l0 in 0..g {
            if gcd(l0, g) != 1 {
                continue;
            }
            let mut x = BTreeSet::new();
            for a in 1..ni {
                if 2 * a * d >= ni {
                    break;
                }
                if gcd(a, m) != 1 {
                    continue;
                }
                for l2 in 0..d {
                    if gcd(l2, d) == 1 && (a * l2 - l0).rem_euclid(g) == 0 {
                        x.extend((0..m).map(|j| p(a * d, l2 + j * d)));
                    }
                }
            }
            let neg: Vec<_> = x.iter().map(|q| q.neg()).collect();
            x.extend(neg);
            out.push(LatticeOrbit::from_points(x));
        }
    }
    if n % 2 == 0 {
        let h = ni / 2;
        out.push(orbit((0..ni).filter(|&y| gcd(y, h) == 1).map(|y| p(h, y))));
    }
    Ok(sorted(out))
}

/// |(δ₁, λ₀)Γ₀(N)| = (N/δ₁)·φ(lcm(δ₁, N/δ₁)), δ₁ = gcd(λ₁, N).
pub fn orbit_size_formula_gamma0(n: u32, delta1: u32) -> u64 {
    let (ni, d) = (n as i64, delta1 as i64);
    (ni / d) as u64 * euler_phi(lcm(d, ni / d) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modgroup::lattice::orbits;
    use crate::modgroup::subgroup::CongruenceSubgroup;

    #[test]
    fn level_two() {
        let o = closed_form_orbits_gamma_nt(2, 1).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[1].len(), 2);
        assert!(closed_form_orbits_gamma_nt(6, 4).is_err());
        assert!(closed_form_orbits_gamma0(2).is_err());
    }

    #[test]
    fn matches_group_orbits() {
        for n in 1..=12u32 {
            for t in divisors(n as u64) {
                let g = CongruenceSubgroup::gamma_nt(n, t as u32).unwrap();
                assert_eq!(orbits(&g), closed_form_orbits_gamma_nt(n, t as u32).unwrap(), "Γ({n},{t})");
            }
            if n >= 3 {
                assert_eq!(orbits(&CongruenceSubgroup::gamma0(n)), closed_form_orbits_gamma0(n).unwrap(), "Γ0({n})");
            }
        }
    }

    #[test]
    fn gamma0_orbit_sizes() {
        for n in 3..=24u32 {
            for o in closed_form_orbits_gamma0(n).unwrap() {
                let r = o.representative();
                let d1 = if r.x == 0 { n } else { gcd(r.x as i64, n as i64) as u32 };
                assert_eq!(o.len() as u64, orbit_size_formula_gamma0(n, d1), "N = {n}, {r}");
            }
        }
    }
}
