//! Dirichlet characters mod N and the nebentypus Eisenstein series built from
//! Γ₁(N) orbital sums.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::arith::{divisors, euler_phi, factorize as factor_int, gcd, lcm, modp, primitive_root, units};
use crate::cyclotomic::CycNum;
use crate::eisenstein::{BasisElement, BasisKind, Combination, EisensteinBasis, Kind};
use crate::error::{Error, Result};
use crate::hecke::{gamma0_labels, Family, LabelCombination};
use crate::modgroup::{Cusp, CongruenceSubgroup, LatticeOrbit, LatticePoint, ResidueMatrix};
use crate::modgroup::cusps::{cusp_classes, locate_cusp};

/// Cyclic factors of U_N: generators lifted by CRT, with their orders.
#[derive(Debug, Clone)]
struct UnitGroup {
    gens: Vec<(i64, u64)>,
    exponent: u64,
    /// residue → exponent vector in the generators
    dlog: BTreeMap<i64, Vec<u64>>,
}

fn crt_lift(g: i64, q: i64, n: i64) -> i64 {
    // x ≡ g mod q, x ≡ 1 mod n/q
    let m = n / q;
    (0..n).step_by(1).find(|&x| modp(x - g, q) == 0 && modp(x - 1, m) == 0).expect("CRT")
}

impl UnitGroup {
    fn new(n: u64) -> Self {
        let ni = n as i64;
        let mut gens = Vec::new();
        for (p, a) in factor_int(n) {
            let q = p.pow(a) as i64;
            let local: Vec<(i64, u64)> = if p == 2 {
                match a {
                    1 => vec![],
                    2 => vec![(-1, 2)],
                    _ => vec![(-1, 2), (5, 1 << (a - 2))],
                }
            } else {
                vec![(primitive_root(q).expect("odd prime powers are cyclic"), euler_phi(q as u64))]
            };
            for (g, o) in local {
                gens.push((crt_lift(modp(g, q), q, ni), o));
            }
        }
        let exponent = gens.iter().fold(1u64, |e, &(_, o)| lcm(e as i64, o as i64) as u64);
        let mut dlog = BTreeMap::new();
        let mut stack = vec![(1 % ni.max(1), vec![])];
        while let Some((u, v)) = stack.pop() {
            let i = v.len();
            if i == gens.len() {
                dlog.insert(modp(u, ni.max(1)), v);
                continue;
            }
            let (g, o) = gens[i];
            let mut x = u;
            for b in 0..o {
                let mut w = v.clone();
                w.push(b);
                stack.push((x, w));
                x = modp(x * g, ni.max(1));
            }
        }
        UnitGroup { gens, exponent, dlog }
    }
}

/// χ: U_N → μ_e with e = exponent of U_N; values stored as exponents of ζ_e.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    pub modulus: u64,
    pub index: usize,
    /// χ(g_i) = ζ_{ord_i}^{a_i}
    pub exponents: Vec<u64>,
    group: Arc<UnitGroup>,
}

impl PartialEq for DirichletCharacter {
    fn eq(&self, o: &Self) -> bool {
        self.modulus == o.modulus && self.exponents == o.exponents
    }
}

impl Eq for DirichletCharacter {}

impl DirichletCharacter {
    /// e = exponent of U_N (at least 1).
    pub fn conductor_of_values(&self) -> u64 {
        self.group.exponent
    }

    /// log_ζe χ(u), or None when gcd(u, N) > 1.
    pub fn log(&self, u: i64) -> Option<u64> {
        let n = self.modulus as i64;
        if gcd(u, n) != 1 {
            return None;
        }
        let v = &self.group.dlog[&modp(u, n)];
        let e = self.group.exponent;
        Some(
            v.iter()
                .zip(&self.exponents)
                .zip(&self.group.gens)
                .map(|((b, a), (_, o))| b * a * (e / o))
                .sum::<u64>()
                % e,
        )
    }

    /// χ(u) as a rational number of turns in [0, 1).
    pub fn phase(&self, u: i64) -> Option<BigRational> {
        self.log(u)
            .map(|l| BigRational::new((l as i64).into(), (self.group.exponent as i64).into()))
    }

    /// χ(u) in Q(ζ_e); zero off the units.
    pub fn value(&self, u: i64) -> CycNum {
        let e = self.group.exponent;
        match self.log(u) {
            Some(l) => CycNum::zeta_pow(e, l as i64),
            None => CycNum::zero(e),
        }
    }

    /// χ(u)^{-1} in Q(ζ_e); zero off the units.
    pub fn value_inv(&self, u: i64) -> CycNum {
        let e = self.group.exponent;
        match self.log(u) {
            Some(l) => CycNum::zeta_pow(e, -(l as i64)),
            None => CycNum::zero(e),
        }
    }

    /// χ(−1) = ±1.
    pub fn parity(&self) -> i32 {
        if self.modulus <= 2 || self.log(-1) == Some(0) {
            1
        } else {
            -1
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponents.iter().all(|&a| a == 0)
    }

    pub fn order(&self) -> u64 {
        self.group
            .gens
            .iter()
            .zip(&self.exponents)
            .fold(1, |acc, (&(_, o), &a)| lcm(acc as i64, (o / gcd(a as i64, o as i64) as u64) as i64) as u64)
    }

    /// The full value table over U_N, in increasing residue order.
    pub fn table(&self) -> Vec<(i64, CycNum)> {
        units(self.modulus as i64).into_iter().map(|u| (u, self.value(u))).collect()
    }

    fn same_phase(a: &BigRational, b: &BigRational) -> bool {
        let d = a - b;
        d.is_integer()
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let table: Vec<_> = self.table().into_iter().map(|(u, v)| (u, v)).collect();
        let mut st = s.serialize_struct("DirichletCharacter", 5)?;
        st.serialize_field("modulus", &self.modulus)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("parity", &self.parity())?;
        st.serialize_field("order", &self.order())?;
        st.serialize_field("values", &table)?;
        st.end()
    }
}

/// All φ(N) characters, lexicographic in the exponent vectors; index 0 is trivial.
pub fn enumerate_characters(n: u64) -> Vec<DirichletCharacter> {
    let group = Arc::new(UnitGroup::new(n.max(1)));
    let mut vecs: Vec<Vec<u64>> = vec![vec![]];
    for &(_, o) in &group.gens {
        vecs = vecs
            .into_iter()
            .flat_map(|v| (0..o).map(move |a| {
                let mut w = v.clone();
                w.push(a);
                w
            }))
            .collect();
    }
    vecs.into_iter()
        .enumerate()
        .map(|(index, exponents)| DirichletCharacter { modulus: n.max(1), index, exponents, group: group.clone() })
        .collect()
}

/// χ is trivial on ker(U_N → U_{lcm(δ, N/δ)}).
pub fn is_delta_good(chi: &DirichletCharacter, delta: u64) -> bool {
    let n = chi.modulus;
    let m = lcm(delta as i64, (n / delta) as i64);
    units(n as i64).into_iter().filter(|&u| modp(u - 1, m) == 0).all(|u| chi.log(u) == Some(0))
}

/// All (χ₁ mod N/δ, χ₂ mod δ) with χ = χ₁χ₂ on U_N, in enumeration order.
pub fn factorizations(chi: &DirichletCharacter, delta: u64) -> Result<Vec<(DirichletCharacter, DirichletCharacter)>> {
    let n = chi.modulus;
    if delta == 0 || n % delta != 0 {
        return Err(Error::param(format!("{delta} does not divide {n}")));
    }
    let us = units(n as i64);
    let mut out = Vec::new();
    for c1 in enumerate_characters(n / delta) {
        for c2 in enumerate_characters(delta) {
            let ok = us.iter().all(|&u| {
                let lhs = chi.phase(u).unwrap();
                let rhs = c1.phase(u).unwrap() + c2.phase(u).unwrap();
                DirichletCharacter::same_phase(&lhs, &rhs)
            });
            if ok {
                out.push((c1.clone(), c2));
            }
        }
    }
    Ok(out)
}

/// The first factorization in enumeration order.
pub fn factorize(chi: &DirichletCharacter, delta: u64) -> Result<(DirichletCharacter, DirichletCharacter)> {
    factorizations(chi, delta)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::domain(format!("χ#{} is not {delta}-good mod {}", chi.index, chi.modulus)))
}

/// δ attached to a Γ₀ label.
fn label_delta(n: u32, label: (u32, u32)) -> u64 {
    if label.0 == 0 {
        n as u64
    } else {
        label.0 as u64
    }
}

pub fn nebentypus_labels(n: u32, chi: &DirichletCharacter) -> Vec<(u32, u32)> {
    gamma0_labels(n).into_iter().filter(|&l| is_delta_good(chi, label_delta(n, l))).collect()
}

/// Coefficient field for the nebentypus series: Q(ζ_L), L = lcm(N, e).
pub fn nebentypus_conductor(n: u32, chi: &DirichletCharacter) -> u64 {
    lcm(n as i64, chi.conductor_of_values() as i64) as u64
}

/// E^{(0)}_{k,χ₁,χ₂}(label) as a combination of Γ₁ labels.
pub fn nebentypus_labels_with(
    n: u32,
    chi1: &DirichletCharacter,
    chi2: &DirichletCharacter,
    label: (u32, u32),
    k: u32,
    l: u64,
) -> Result<LabelCombination> {
    let ni = n as i64;
    let half = CycNum::from_rational(l, &BigRational::new(1.into(), 2.into()));
    let mut c = LabelCombination::new(Kind::E, Family::Gamma1, k, n).embed(l)?;
    let mut add = |x: i64, y: i64, v: CycNum| -> Result<()> {
        let t = LabelCombination::label(Kind::E, Family::Gamma1, k, n, x, y)?.scale(&(&v.embed(l)? * &half))?;
        c = c.add(&t)?;
        Ok(())
    };
    let (d, l0) = (label.0 as i64, label.1 as i64);
    if d == 0 {
        for y in 0..ni {
            if gcd(y, ni) == 1 {
                add(0, y, chi2.value_inv(y))?;
            }
        }
    } else if 2 * d == ni {
        for y in 0..d {
            if gcd(y, d) == 1 {
                add(d, y, chi2.value_inv(y))?;
            }
        }
    } else {
        let m = ni / d;
        let g = gcd(d, m);
        for a in 0..m {
            if gcd(a, m) != 1 {
                continue;
            }
            for y in 0..d {
                if gcd(y, d) == 1 && modp(a * y - l0, g) == 0 {
                    let v = &chi1.value(a).embed(l)? * &chi2.value_inv(y).embed(l)?;
                    add(a * d, y, v)?;
                }
            }
        }
    }
    Ok(c)
}

/// The factorization used for a label: (trivial, χ) on (0,1), the one with
/// χ₂ mod N/2 on (N/2,1), and the first in enumeration order otherwise.
pub fn label_factorization(n: u32, chi: &DirichletCharacter, label: (u32, u32)) -> Result<(DirichletCharacter, DirichletCharacter)> {
    factorize(chi, label_delta(n, label))
}

/// E^{(0)}_{k,χ}(label, N) as Γ₁ label combination over Q(ζ_L).
pub fn nebentypus_combination(n: u32, chi: &DirichletCharacter, label: (u32, u32), k: u32) -> Result<LabelCombination> {
    if n < 3 {
        return Err(Error::param("nebentypus series need N ≥ 3"));
    }
    if !is_delta_good(chi, label_delta(n, label)) {
        return Err(Error::domain(format!("χ#{} is not good for the label {:?}", chi.index, label)));
    }
    let (c1, c2) = label_factorization(n, chi, label)?;
    nebentypus_labels_with(n, &c1, &c2, label, k, nebentypus_conductor(n, chi))
}

pub fn nebentypus_series(n: u32, chi: &DirichletCharacter, label: (u32, u32), k: u32, j: usize) -> Result<crate::qseries::QExpansion> {
    nebentypus_combination(n, chi, label, k)?.expand(j)
}

/// Whether E_k(N, χ) is covered by the nebentypus construction, and the reason if not.
pub fn nebentypus_applies(chi: &DirichletCharacter, k: u32) -> Result<bool> {
    if chi.parity() != if k % 2 == 0 { 1 } else { -1 } {
        return Ok(false);
    }
    if k == 2 && chi.is_trivial() {
        return Err(Error::domain(
            "weight 2 with trivial character: use the spectral basis of gamma0(N)",
        ));
    }
    Ok(true)
}

/// Basis of E_k(N, χ); empty when the parity does not match.
pub fn nebentypus_basis(n: u32, chi: &DirichletCharacter, k: u32, j: usize) -> Result<EisensteinBasis> {
    if n < 3 {
        return Err(Error::param("nebentypus bases need N ≥ 3"));
    }
    let mut elements = Vec::new();
    if nebentypus_applies(chi, k)? {
        let g0 = CongruenceSubgroup::gamma0(n);
        let classes = cusp_classes(&g0);
        for label in nebentypus_labels(n, chi) {
            let comb = nebentypus_combination(n, chi, label, k)?;
            let lattice = comb.to_lattice()?;
            let p = label_point(n, label);
            let i = locate_point(&classes, &p)?;
            elements.push(BasisElement {
                cusp: classes[i].cusp.clone(),
                orbit: classes[i].orbit.clone(),
                qexp: lattice.expand(j)?,
                combination: lattice,
            });
        }
    }
    Ok(EisensteinBasis {
        group: format!("gamma0:{n} chi#{}", chi.index),
        level: n,
        weight: k,
        kind: BasisKind::Nebentypus,
        elements,
    })
}

fn locate_point(classes: &[crate::modgroup::CuspClass], p: &LatticePoint) -> Result<usize> {
    classes
        .iter()
        .position(|c| c.orbit.contains(p) || c.orbit.contains(&p.neg()))
        .ok_or_else(|| Error::internal("label point in no cusp class"))
}

/// A lattice point (δ, λ₂) in the orbit of a Γ₀ label, with λ₂ ≡ λ₀ mod gcd(δ, N/δ).
pub fn label_point(n: u32, label: (u32, u32)) -> LatticePoint {
    let ni = n as i64;
    let (d, l0) = (label.0 as i64, label.1 as i64);
    if d == 0 {
        return LatticePoint::new(n, 0, 1).expect("(0,1)");
    }
    let g = gcd(d, ni / d);
    let y = (0..d.max(1) * g.max(1) + ni)
        .find(|&y| gcd(y, d) == 1 && modp(y - l0, g) == 0 && gcd(gcd(d, y), ni) == 1)
        .expect("label has a lift");
    LatticePoint::new(n, d, y).expect("label lift has order N")
}

/// A matrix γ ∈ SL₂(Z/N) with λγ = (0, 1).
pub fn matrix_to_infinity(p: &LatticePoint) -> ResidueMatrix {
    let n = p.n as i64;
    let (x, y) = (p.x as i64, p.y as i64);
    // γ⁻¹ = (a, b; x, y) has (0,1)γ⁻¹ = λ
    for a in 0..n {
        for b in 0..n {
            if let Some(m) = ResidueMatrix::new(p.n, a, b, x, y) {
                return m.inverse();
            }
        }
    }
    unreachable!("SL₂(Z/N) acts transitively on Λ_N")
}

/// π_∞(E_χ(λ′)|γ_λ) over the labels of one character.
pub fn independence_matrix(n: u32, chi: &DirichletCharacter, k: u32) -> Result<Vec<Vec<CycNum>>> {
    let labels = nebentypus_labels(n, chi);
    let combos: Vec<Combination> = labels
        .iter()
        .map(|&l| nebentypus_combination(n, chi, l, k)?.to_lattice())
        .collect::<Result<_>>()?;
    labels
        .iter()
        .map(|&l| {
            let g = matrix_to_infinity(&label_point(n, l));
            combos.iter().map(|c| c.constant_term_at(&g)).collect()
        })
        .collect()
}

/// Σ_d χ(d)·χ′(d)⁻¹ over U_N.
pub fn orthogonality_sum(a: &DirichletCharacter, b: &DirichletCharacter) -> CycNum {
    let e = a.conductor_of_values();
    units(a.modulus as i64)
        .into_iter()
        .fold(CycNum::zero(e), |acc, u| &acc + &(&a.value(u) * &b.value_inv(u).embed(e).expect("same modulus")))
}

/// ½ Σ_{δ|N} φ(δ)φ(N/δ).
pub fn half_phi_convolution(n: u64) -> BigRational {
    let s: u64 = divisors(n).into_iter().map(|d| euler_phi(d) * euler_phi(n / d)).sum();
    BigRational::new((s as i64).into(), 2.into())
}

/// Cusp of Γ₀(N) attached to a label.
pub fn label_cusp(n: u32, label: (u32, u32)) -> Result<Cusp> {
    let g0 = CongruenceSubgroup::gamma0(n);
    let classes = cusp_classes(&g0);
    let p = label_point(n, label);
    let (num, den) = crate::modgroup::cusps::cusp_from_point(&p);
    let i = locate_cusp(&classes, n, num, den).ok_or_else(|| Error::internal("no cusp for label"))?;
    Ok(classes[i].cusp.clone())
}

/// The Γ₀(N)-orbit of a label.
pub fn label_orbit(n: u32, label: (u32, u32)) -> LatticeOrbit {
    crate::modgroup::lattice::orbit_of(&CongruenceSubgroup::gamma0(n), label_point(n, label))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn character_counts() {
        assert_eq!(enumerate_characters(1).len(), 1);
        let c5 = enumerate_characters(5);
        let mut orders: Vec<_> = c5.iter().map(|c| c.order()).collect();
        orders.sort();
        assert_eq!(orders, vec![1, 2, 4, 4]);
        assert_eq!(c5[0].conductor_of_values(), 4);
        let c8 = enumerate_characters(8);
        assert_eq!(c8.len(), 4);
        assert!(c8.iter().all(|c| c.order() <= 2));
        for n in 1..=30u64 {
            let cs = enumerate_characters(n);
            assert_eq!(cs.len() as u64, euler_phi(n));
            assert!(cs[0].is_trivial());
        }
    }

    #[test]
    fn multiplicative_and_orthogonal() {
        for n in [7u64, 12, 15, 16] {
            let cs = enumerate_characters(n);
            let us = units(n as i64);
            for c in &cs {
                assert!(c.value(1).is_one());
                for &a in &us {
                    for &b in &us {
                        assert_eq!(c.value(a * b), &c.value(a) * &c.value(b));
                    }
                }
            }
            for a in &cs {
                for b in &cs {
                    let s = orthogonality_sum(a, b);
                    let want = if a == b { euler_phi(n) as i64 } else { 0 };
                    assert_eq!(s, CycNum::from_int(a.conductor_of_values(), want));
                }
            }
        }
    }

    #[test]
    fn delta_good_and_factorization() {
        let cs = enumerate_characters(12);
        for c in &cs {
            assert!(is_delta_good(c, 1));
            assert_eq!(is_delta_good(c, 2), c.log(7) == Some(0));
            let (c1, c2) = factorize(c, 1).unwrap();
            assert!(c2.is_trivial());
            assert_eq!(c1.exponents, c.exponents);
        }
        assert!(is_delta_good(&cs[0], 4));
    }

    #[test]
    fn gamma_lambda_sends_label_to_infinity() {
        for n in 3..=12u32 {
            for l in gamma0_labels(n) {
                let p = label_point(n, l);
                assert_eq!(p.act(&matrix_to_infinity(&p)), LatticePoint::new(n, 0, 1).unwrap());
            }
        }
    }

    #[test]
    fn nebentypus_series_transform_by_chi() {
        for n in [5u32, 7, 8, 9, 12] {
            let g0 = CongruenceSubgroup::gamma0(n);
            let mats: Vec<_> = crate::modgroup::sl2_mod(n).iter().cloned().filter(|m| g0.contains(m)).collect();
            for chi in enumerate_characters(n as u64) {
                for k in [3u32, 4] {
                    if !nebentypus_applies(&chi, k).unwrap() {
                        continue;
                    }
                    for l in nebentypus_labels(n, &chi) {
                        let f = nebentypus_combination(n, &chi, l, k).unwrap().to_lattice().unwrap();
                        for m in mats.iter().step_by(5) {
                            let d = m.entries()[3];
                            let want = f.scale(&chi.value(d).embed(f.conductor).unwrap()).unwrap();
                            assert_eq!(f.slash(m), want, "N={n} chi#{} {l:?}", chi.index);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn constant_terms_at_label_cusps_are_diagonal() {
        for n in 3..=12u32 {
            for chi in enumerate_characters(n as u64) {
                let k = if chi.parity() == 1 { 4 } else { 3 };
                let labels = nebentypus_labels(n, &chi);
                let m = independence_matrix(n, &chi, k).unwrap();
                for (i, row) in m.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        if i == j {
                            let (_, c2) = label_factorization(n, &chi, labels[i]).unwrap();
                            let y = label_point(n, labels[i]).y as i64;
                            let want = c2.value_inv(y).embed(v.conductor()).unwrap();
                            assert_eq!(*v, want, "N={n} chi#{} {:?}", chi.index, labels[i]);
                        } else {
                            assert!(v.is_zero(), "N={n} chi#{} ({i},{j})", chi.index);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn label_counts_sum_to_gamma1_cusps() {
        for n in 3..=16u64 {
            let cs = enumerate_characters(n);
            for parity in [1, -1] {
                let total: usize =
                    cs.iter().filter(|c| c.parity() == parity).map(|c| nebentypus_labels(n as u32, c).len()).sum();
                let want = if n == 4 {
                    if parity == 1 { 3 } else { 2 }
                } else {
                    let h = half_phi_convolution(n);
                    h.to_integer().try_into().unwrap()
                };
                assert_eq!(total, want, "N={n} parity {parity}");
            }
        }
    }

    #[test]
    fn other_factorizations_rescale_by_psi() {
        for n in [8u32, 12, 16] {
            for chi in enumerate_characters(n as u64) {
                let k = if chi.parity() == 1 { 4 } else { 3 };
                let l = nebentypus_conductor(n, &chi);
                for label in nebentypus_labels(n, &chi) {
                    let d = label_delta(n, label);
                    let fs = factorizations(&chi, d).unwrap();
                    let (a1, a2) = &fs[0];
                    let base = nebentypus_labels_with(n, a1, a2, label, k, l).unwrap();
                    for (b1, b2) in &fs[1..] {
                        let other = nebentypus_labels_with(n, b1, b2, label, k, l).unwrap();
                        // ψ = b₁/a₁ evaluated at a lift of λ₀ prime to N/δ
                        let m = (n as u64 / d) as i64;
                        let g = gcd(d as i64, m);
                        let a0 = (0..m.max(1) * g.max(1) + 1)
                            .find(|&a| gcd(a, m) == 1 && modp(a - label.1 as i64, g) == 0)
                            .unwrap();
                        let psi = &b1.value(a0).embed(l).unwrap() * &a1.value_inv(a0).embed(l).unwrap();
                        assert_eq!(other, base.scale(&psi).unwrap(), "N={n} chi#{} {label:?}", chi.index);
                    }
                }
            }
        }
    }
}
