//! The full invariant suite, runnable over a level range. Each check reports
//! how many cases it covered and the first few failures.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{divisors, euler_phi, gcd, is_prime};
use crate::characters::{
    enumerate_characters, half_phi_convolution, independence_matrix, nebentypus_applies, nebentypus_basis,
    nebentypus_labels,
};
use crate::cyclotomic::CycNum;
use crate::eisenstein::{
    c_vector, e_series, epsilon, g_series, s_tilde_matrix, Combination, EisensteinBasis, Kind, SpectralData,
};
use crate::error::{Error, Result};
use crate::hecke::{
    diamond, diamond_by_slash, gamma0_labels, gamma1_labels, gamma1_spectral_coordinates, gamma1_spectral_element,
    tp_label, tp_qexp, tp_qexp_twisted, Family, LabelCombination,
};
use crate::linalg;
use crate::modgroup::{
    closed_form_orbits_gamma0, closed_form_orbits_gamma_nt, cusps, lambda_points, orbits, CongruenceSubgroup,
    GroupSpec, LatticeOrbit, LatticePoint,
};
use crate::special_values::partial_zeta_scaled;

/// Level window for the suite; each check additionally applies its own ceiling.
#[derive(Debug, Clone, Copy)]
pub struct Config {
    pub min_level: u32,
    pub max_level: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config { min_level: 1, max_level: 24 }
    }
}

impl Config {
    fn levels(&self, lo: u32, hi: u32) -> impl Iterator<Item = u32> {
        self.min_level.max(lo)..=self.max_level.min(hi)
    }

    fn admits(&self, n: u32) -> bool {
        (self.min_level..=self.max_level).contains(&n)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
    pub seconds: f64,
}

#[derive(Debug, Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.cases += other.cases;
        self.failures.extend(other.failures);
        self
    }

    fn absorb(&mut self, r: Result<Tally>, context: impl FnOnce() -> String) {
        match r {
            Ok(t) => {
                self.cases += t.cases;
                self.failures.extend(t.failures);
            }
            Err(e) => {
                self.cases += 1;
                self.failures.push(format!("{}: {e}", context()));
            }
        }
    }
}

pub const NAMES: [&str; 10] = [
    "level-one classical expansions",
    "generic orbits equal the closed forms",
    "dimension table",
    "G/E exactness",
    "constant-term indicator",
    "weight-2 holomorphy and rationality",
    "Hecke operators",
    "nebentypus bases",
    "partial zeta values numerically",
    "level inclusion of scaled G-series",
];

/// Runs one numbered check (1..=10).
pub fn run_check(id: u8, cfg: &Config) -> CheckResult {
    let start = Instant::now();
    let r = match id {
        1 => level_one(cfg),
        2 => orbit_oracle(cfg),
        3 => dimension_table(cfg),
        4 => g_e_exactness(cfg),
        5 => indicator_matrix(cfg),
        6 => holomorphy_rationality(cfg),
        7 => hecke(cfg),
        8 => nebentypus(cfg),
        9 => numeric_zeta(cfg),
        10 => level_inclusion(cfg),
        _ => Err(Error::param(format!("no check numbered {id}"))),
    };
    let t = match r {
        Ok(t) => t,
        Err(e) => Tally { cases: 1, failures: vec![e.to_string()] },
    };
    let mut failures = t.failures;
    let total = failures.len();
    failures.truncate(10);
    if total > 10 {
        failures.push(format!("... {} more", total - 10));
    }
    CheckResult {
        id,
        name: NAMES.get(id.wrapping_sub(1) as usize).copied().unwrap_or("unknown"),
        passed: failures.is_empty(),
        cases: t.cases,
        failures,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(cfg: &Config) -> Vec<CheckResult> {
    (1..=10).map(|i| run_check(i, cfg)).collect()
}

fn sigma(n: u64, e: u32) -> BigInt {
    (1..=n).filter(|d| n % d == 0).map(|d| BigInt::from(d).pow(e)).sum()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn level_one(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    if !cfg.admits(1) {
        return Ok(t);
    }
    let p = LatticePoint::new(1, 0, 0).expect("(0,0) has order 1");
    for (k, c) in [(4u32, 240i64), (6, -504)] {
        let f = e_series(&p, k, 30)?;
        t.check(f.coeffs[0].is_one(), || format!("E_{k}: constant term {}", f.coeffs[0]));
        for n in 1..=30u64 {
            let want = CycNum::from_bigint(1, sigma(n, k - 1) * c);
            t.check(f.coeffs[n as usize] == want, || format!("E_{k}: a_{n} = {}", f.coeffs[n as usize]));
        }
    }
    for f in [e_series(&p, 2, 30)?, g_series(&p, 2, 30)?] {
        let a0 = f.coeffs[0].as_rational().ok_or_else(|| Error::internal("non-rational a_0"))?;
        for n in 1..=30u64 {
            let r = f.coeffs[n as usize].as_rational().map(|a| a / &a0);
            let want = BigRational::from_integer(sigma(n, 1) * -24);
            t.check(r.as_ref() == Some(&want), || format!("weight 2: a_{n}/a_0 = {r:?}"));
        }
        let r = f.nonhol.as_rational().map(|a| a / &a0);
        t.check(r == Some(rat(-3, 1)), || format!("weight 2: nonhol/a_0 = {r:?}"));
    }
    Ok(t)
}

fn partition(o: &[LatticeOrbit]) -> BTreeSet<(Vec<LatticePoint>, bool)> {
    o.iter().map(|o| (o.points.iter().copied().collect(), o.regular)).collect()
}

fn orbit_oracle(cfg: &Config) -> Result<Tally> {
    let mut jobs = Vec::new();
    for n in cfg.levels(1, 24) {
        for t in divisors(n as u64) {
            jobs.push((n, Some(t as u32)));
        }
        if n >= 3 {
            jobs.push((n, None));
        }
    }
    let t = jobs
        .par_iter()
        .map(|&(n, t)| {
            let mut tally = Tally::default();
            let r = (|| -> Result<Tally> {
                let mut tl = Tally::default();
                let (g, closed) = match t {
                    Some(t) => (CongruenceSubgroup::gamma_nt(n, t)?, closed_form_orbits_gamma_nt(n, t)?),
                    None => (CongruenceSubgroup::gamma0(n), closed_form_orbits_gamma0(n)?),
                };
                let ok = partition(&orbits(&g)) == partition(&closed);
                tl.check(ok, || format!("{}: generic and closed-form orbits differ", g.spec()));
                Ok(tl)
            })();
            tally.absorb(r, || format!("N={n} t={t:?}"));
            tally
        })
        .reduce(Tally::default, Tally::merge);
    let mut t = t;
    if cfg.admits(4) {
        let g = CongruenceSubgroup::gamma1(4);
        let p = LatticePoint::new(4, 2, 1).expect("(2,1) has order 4");
        let o = orbits(&g).into_iter().find(|o| o.contains(&p));
        t.check(o.as_ref().is_some_and(|o| !o.regular && o.len() == 2), || "gamma1(4): orbit of (2,1) should be irregular of size 2".into());
    }
    Ok(t)
}

/// Groups for the dimension, indicator and rationality checks (level ≤ 16).
pub fn dimension_groups(cfg: &Config) -> Vec<CongruenceSubgroup> {
    let mut out = Vec::new();
    for n in cfg.levels(1, 16) {
        out.push(CongruenceSubgroup::gamma(n));
        out.push(CongruenceSubgroup::gamma1(n));
        out.push(CongruenceSubgroup::gamma0(n));
        for t in divisors(n as u64) {
            let t = t as u32;
            if t != 1 && t != n {
                out.push(CongruenceSubgroup::gamma_nt(n, t).expect("t divides N"));
            }
        }
    }
    for spec in [
        GroupSpec::Larcher { p: 4, q: 2, r: 4, chi: 2, tau: 1 },
        GroupSpec::Larcher { p: 3, q: 3, r: 3, chi: 3, tau: 1 },
    ] {
        if let Ok(g) = CongruenceSubgroup::new(&spec) {
            if cfg.admits(g.level()) && g.level() <= 16 {
                out.push(g);
            }
        }
    }
    out
}

/// Case table from the cusp list alone.
fn case_table(g: &CongruenceSubgroup, k: u32) -> usize {
    let cs = cusps(g);
    match k {
        2 => cs.len() - 1,
        _ if k % 2 == 0 => cs.len(),
        _ if g.contains_minus_id() => 0,
        _ => cs.iter().filter(|c| c.regular).count(),
    }
}

fn classical_cusp_count(g: &CongruenceSubgroup) -> Option<usize> {
    let n = g.level() as u64;
    match g.spec() {
        GroupSpec::Gamma0 { .. } => Some(divisors(n).iter().map(|&d| euler_phi(gcd(d as i64, (n / d) as i64) as u64)).sum::<u64>() as usize),
        GroupSpec::Gamma1 { .. } => Some(match n {
            1 => 1,
            2 => 2,
            3 => 2,
            4 => 3,
            _ => divisors(n).iter().map(|&d| euler_phi(d) * euler_phi(n / d)).sum::<u64>() as usize / 2,
        }),
        GroupSpec::Gamma { .. } => {
            let l = lambda_points(n as u32).len();
            Some(if n <= 2 { l } else { l / 2 })
        }
        _ => None,
    }
}

fn dimension_table(cfg: &Config) -> Result<Tally> {
    Ok(dimension_groups(cfg)
        .par_iter()
        .map(|g| {
            let mut t = Tally::default();
            let d = SpectralData::new(g);
            if let Some(c) = classical_cusp_count(g) {
                t.check(c == d.classes.len(), || format!("{}: {} cusps, classical count {c}", g.spec(), d.classes.len()));
            }
            if let GroupSpec::Gamma1 { n } = g.spec() {
                let irregular = d.classes.iter().filter(|c| !c.cusp.regular).count();
                let want = usize::from(*n == 4);
                t.check(irregular == want, || format!("{}: {irregular} irregular cusps", g.spec()));
            }
            for k in 2..=7u32 {
                let r = d.basis_combinations(Kind::E, k).map(|b| {
                    let mut tl = Tally::default();
                    let want = case_table(g, k);
                    tl.check(b.len() == want, || format!("{} k={k}: {} elements, table says {want}", g.spec(), b.len()));
                    tl
                });
                t.absorb(r, || format!("{} k={k}", g.spec()));
            }
            t
        })
        .reduce(Tally::default, Tally::merge))
}

fn g_e_exactness(cfg: &Config) -> Result<Tally> {
    let mut t = Tally::default();
    for n in cfg.levels(1, 16) {
        for k in 2..=6u32 {
            if n <= 2 && k % 2 == 1 {
                let c = c_vector(n, k)?;
                t.check(c.is_empty(), || format!("N={n} k={k}: odd weight at N ≤ 2 should be the zero space"));
            } else {
                let m = s_tilde_matrix(n, k)?;
                let inv = linalg::inverse(&m)?;
                let id = linalg::identity(m.len(), n as u64);
                t.check(linalg::mat_mul(&m, &inv)? == id && linalg::mat_mul(&inv, &m)? == id, || {
                    format!("N={n} k={k}: S̃·S̃⁻¹ is not the identity")
                });
            }
            let eps = epsilon(n);
            let ni = n as i64;
            for p in lambda_points(n) {
                let f = e_series(&p, k, 0)?;
                let mut v = 0i64;
                if p.x == 0 {
                    if (p.y as i64 - 1).rem_euclid(ni) == 0 {
                        v += 1;
                    }
                    if (p.y as i64 + 1).rem_euclid(ni) == 0 {
                        v += if k % 2 == 0 { 1 } else { -1 };
                    }
                }
                let want = CycNum::from_rational(n as u64, &(&eps * BigRational::from_integer(v.into())));
                t.check(f.coeffs[0] == want, || format!("N={n} k={k} {p}: constant term {}", f.coeffs[0]));
            }
        }
    }
    Ok(t)
}

fn indicator_for_group(g: &CongruenceSubgroup) -> Result<Tally> {
    let mut t = Tally::default();
    let d = SpectralData::new(g);
    for k in 2..=7u32 {
        let valid: Vec<usize> =
            (0..d.classes.len()).filter(|&i| d.series_combination(i, Kind::E, k).is_ok()).collect();
        let forms: Vec<Combination> =
            valid.iter().map(|&i| d.series_combination(i, Kind::E, k)?.to_g()).collect::<Result<_>>()?;
        let mats: Vec<_> = d
            .classes
            .iter()
            .map(|c| {
                let [a, b, cc, dd] = c.cusp.scaling_matrix();
                crate::modgroup::ResidueMatrix::new(g.level(), a, b, cc, dd).ok_or_else(|| Error::internal("scaling matrix"))
            })
            .collect::<Result<_>>()?;
        // rows: series E_{k,x}; columns: cusps y
        let mut table = Vec::new();
        for (xi, f) in valid.iter().zip(&forms) {
            let mut row = Vec::new();
            for (yi, m) in mats.iter().enumerate() {
                let v = f.constant_term_at(m)?;
                let ok = if *xi == yi {
                    v.is_one() || (k % 2 == 1 && (-&v).is_one())
                } else {
                    v.is_zero()
                };
                t.check(ok, || format!("{} k={k}: π(E_x|γ_y) = {v} for x={}, y={}", g.spec(), d.classes[*xi].cusp, d.classes[yi].cusp));
                row.push(v);
            }
            table.push(row);
        }
        if k == 2 && !valid.is_empty() {
            // basis elements E_x − r·E_{x0}
            let x0 = d.x0();
            let r0 = valid.iter().position(|&i| i == x0).expect("x0 carries a series");
            for (i, c) in d.basis_combinations(Kind::E, 2)? {
                let gform = c.to_g()?;
                let r = CycNum::from_rational(g.level() as u64, &d.orbit_ratio(i));
                let ri = valid.iter().position(|&v| v == i).expect("series exists at even weight");
                for (yi, m) in mats.iter().enumerate() {
                    let want = &table[ri][yi] - &(&r * &table[r0][yi]);
                    let v = gform.constant_term_at(m)?;
                    t.check(v == want, || format!("{} k=2: basis element at {} has π = {v} at {}", g.spec(), d.classes[i].cusp, d.classes[yi].cusp));
                }
            }
        }
    }
    Ok(t)
}

fn indicator_matrix(cfg: &Config) -> Result<Tally> {
    Ok(dimension_groups(cfg)
        .par_iter()
        .map(|g| {
            let mut t = Tally::default();
            t.absorb(indicator_for_group(g), || g.spec().to_string());
            t
        })
        .reduce(Tally::default, Tally::merge))
}

fn holomorphy_for_group(g: &CongruenceSubgroup) -> Result<Tally> {
    let mut t = Tally::default();
    let d = SpectralData::new(g);
    let n = g.level() as u64;
    let j = 2 * g.level() as usize + 4;
    for k in 2..=7u32 {
        for kind in [Kind::E, Kind::G] {
            let b: EisensteinBasis = d.basis(kind, k, j)?;
            for e in &b.elements {
                if k == 2 {
                    t.check(e.qexp.nonhol.is_zero(), || format!("{} {kind:?} k=2 at {}: nonhol {}", g.spec(), e.cusp, e.qexp.nonhol));
                }
                let c = e.qexp.coefficient_conductor();
                t.check(n % c == 0, || format!("{} {kind:?} k={k} at {}: conductor {c}", g.spec(), e.cusp));
            }
        }
    }
    Ok(t)
}

fn holomorphy_rationality(cfg: &Config) -> Result<Tally> {
    Ok(dimension_groups(cfg)
        .par_iter()
        .map(|g| {
            let mut t = Tally::default();
            t.absorb(holomorphy_for_group(g), || g.spec().to_string());
            t
        })
        .reduce(Tally::default, Tally::merge))
}

const HECKE_PRIMES: [u64; 4] = [2, 3, 5, 7];

/// T_p through labels against T_p on q-expansions, using ⟨p⟩ by slashing.
fn commuting_square(c: &LabelCombination, p: u64, jq: usize) -> Result<bool> {
    let n = c.level as usize;
    let k = c.weight;
    let lhs = tp_label(p, c)?.expand(jq * n)?.project(1)?;
    let f = c.expand(jq * n * p as usize)?;
    let twist = diamond_by_slash(p as i64, c)?.expand(jq * n * p as usize)?;
    let rhs = tp_qexp_twisted(&f, &twist, p, k)?;
    Ok(lhs == rhs)
}

fn hecke_level(n: u32) -> Result<Tally> {
    let mut t = Tally::default();
    let jq = 6;
    for k in 2..=4u32 {
        for p in HECKE_PRIMES.iter().copied().filter(|p| n as u64 % p != 0) {
            let pk1 = BigInt::from(p).pow(k - 1) + BigInt::from(1);
            for (x, y) in gamma1_labels(n) {
                let c = LabelCombination::label(Kind::E, Family::Gamma1, k, n, x as i64, y as i64)?;
                t.check(commuting_square(&c, p, jq)?, || format!("N={n} k={k} p={p}: square fails on E1({x},{y})"));
                let img = tp_label(p, &c)?;
                t.check(img.is_integral(), || format!("N={n} k={k} p={p}: T_p E1({x},{y}) not integral"));
            }
            for (a, b) in if n >= 3 { gamma0_labels(n) } else { vec![] } {
                let c = LabelCombination::label(Kind::E, Family::Gamma0, k, n, a as i64, b as i64)?;
                let lhs = tp_label(p, &c)?.expand(jq * n as usize)?.project(1)?;
                let rhs = tp_qexp(&c.expand(jq * n as usize * p as usize)?, p, k)?;
                t.check(lhs == rhs, || format!("N={n} k={k} p={p}: square fails on E0({a},{b})"));
                let eigen = (a == 0 && b == 1) || (2 * a == n && b == 1);
                if eigen {
                    let scaled = c.scale(&CycNum::from_bigint(1, pk1.clone()))?;
                    let via_g1 = tp_label(p, &c.to_gamma1()?)?;
                    t.check(via_g1 == scaled.to_gamma1()? && rhs == c.expand(jq * n as usize)?.project(1)?.scale(&CycNum::from_bigint(1, pk1.clone()))?, || {
                        format!("N={n} k={k} p={p}: E0({a},{b}) is not a (p^(k-1)+1)-eigenvector")
                    });
                }
            }
            // spectral coordinates of T_p E_x stay integral, including the ½-scaled class at N = 4
            let data = SpectralData::new(&CongruenceSubgroup::gamma1(n));
            for i in 0..data.classes.len() {
                if data.series_combination(i, Kind::E, k).is_err() {
                    continue;
                }
                let e = gamma1_spectral_element(n, i, k)?;
                let coords = gamma1_spectral_coordinates(&tp_label(p, &e)?)?;
                let ok = coords.values().all(|v| v.as_rational().is_some_and(|q| q.is_integer()));
                t.check(ok, || format!("N={n} k={k} p={p}: T_p E_x has non-integral coordinates at cusp {i}"));
            }
            // commutativity with the other primes and with diamonds
            for q in HECKE_PRIMES.iter().copied().filter(|&q| q != p && n as u64 % q != 0) {
                for (x, y) in gamma1_labels(n) {
                    let c = LabelCombination::label(Kind::E, Family::Gamma1, k, n, x as i64, y as i64)?;
                    t.check(tp_label(p, &tp_label(q, &c)?)? == tp_label(q, &tp_label(p, &c)?)?, || {
                        format!("N={n} k={k}: T_{p}T_{q} ≠ T_{q}T_{p} on E1({x},{y})")
                    });
                }
            }
            for d in crate::arith::units(n as i64) {
                for (x, y) in gamma1_labels(n) {
                    let c = LabelCombination::label(Kind::E, Family::Gamma1, k, n, x as i64, y as i64)?;
                    t.check(diamond(d, &tp_label(p, &c)?)? == tp_label(p, &diamond(d, &c)?)?, || {
                        format!("N={n} k={k} p={p}: ⟨{d}⟩ does not commute with T_p on E1({x},{y})")
                    });
                }
            }
        }
    }
    Ok(t)
}

fn hecke(cfg: &Config) -> Result<Tally> {
    let levels: Vec<u32> = cfg.levels(1, 12).collect();
    Ok(levels
        .par_iter()
        .map(|&n| {
            let mut t = Tally::default();
            t.absorb(hecke_level(n), || format!("N={n}"));
            t
        })
        .reduce(Tally::default, Tally::merge))
}

fn coefficient_rows(bases: &[&EisensteinBasis], l: u64, cols: usize) -> Result<linalg::Matrix> {
    let mut rows = Vec::new();
    for b in bases {
        for e in &b.elements {
            let f = e.qexp.embed(l)?;
            rows.push(f.coeffs.iter().take(cols).cloned().collect());
        }
    }
    Ok(rows)
}

fn nebentypus_level(n: u32) -> Result<Tally> {
    let mut t = Tally::default();
    let chars = enumerate_characters(n as u64);
    let e = chars[0].conductor_of_values();
    let l = num_integer::lcm(n as u64, e);
    let g1 = SpectralData::new(&CongruenceSubgroup::gamma1(n));
    let g0 = CongruenceSubgroup::gamma0(n);
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    for k in 2..=4u32 {
        let dim = g1.dimension(k);
        let j = (dim + 8) * n as usize;
        let mut bases = Vec::new();
        for chi in &chars {
            let b = match nebentypus_applies(chi, k) {
                Ok(true) => nebentypus_basis(n, chi, k, j)?,
                Ok(false) => continue,
                // weight 2, trivial character: the spectral basis of Γ₀(N)
                Err(_) => SpectralData::new(&g0).basis(Kind::E, 2, j)?,
            };
            let own = coefficient_rows(&[&b], l, j + 1)?;
            t.check(linalg::rank(&own)? == b.len(), || format!("N={n} k={k} χ#{}: basis is dependent", chi.index));
            if nebentypus_applies(chi, k).unwrap_or(false) {
                let m = independence_matrix(n, chi, k)?;
                let diag = m.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(jj, v)| (i == jj) != v.is_zero()));
                t.check(diag, || format!("N={n} k={k} χ#{}: constant-term matrix is not diagonal and invertible", chi.index));
                let mats: Vec<_> = g0.elements().choose_multiple(&mut rng, 5).cloned().collect();
                for el in &b.elements {
                    for m in &mats {
                        let f = &el.combination;
                        let want = f.scale(&chi.value(m.entries()[3]).embed(f.conductor)?)?;
                        t.check(f.slash(m) == want, || format!("N={n} k={k} χ#{}: slash by {:?} is not χ(d)", chi.index, m.entries()));
                    }
                }
            }
            bases.push(b);
        }
        let total: usize = bases.iter().map(|b| b.len()).sum();
        t.check(total == dim, || format!("N={n} k={k}: Σ dim E_k(N,χ) = {total}, dim E_k(Γ₁(N)) = {dim}"));
        let all: Vec<&EisensteinBasis> = bases.iter().collect();
        let rows = coefficient_rows(&all, l, j + 1)?;
        t.check(linalg::rank(&rows)? == dim, || format!("N={n} k={k}: union of nebentypus bases has deficient rank"));
    }
    for parity in [1, -1] {
        let total: usize = chars.iter().filter(|c| c.parity() == parity).map(|c| nebentypus_labels(n, c).len()).sum();
        let want = if n == 4 {
            if parity == 1 { 3 } else { 2 }
        } else {
            let h = half_phi_convolution(n as u64);
            h.to_integer().try_into().unwrap_or(usize::MAX)
        };
        t.check(total == want, || format!("N={n} parity {parity}: {total} labels, expected {want}"));
    }
    Ok(t)
}

fn nebentypus(cfg: &Config) -> Result<Tally> {
    let levels: Vec<u32> = cfg.levels(3, 12).collect();
    Ok(levels
        .par_iter()
        .map(|&n| {
            let mut t = Tally::default();
            t.absorb(nebentypus_level(n), || format!("N={n}"));
            t
        })
        .reduce(Tally::default, Tally::merge))
}

/// Σ_{j≥0} (x + j)^{−k} by Euler–Maclaurin, for x large.
fn hurwitz_tail(x: f64, k: u32) -> f64 {
    let kf = k as f64;
    let f = x.powf(-kf);
    f * (x / (kf - 1.0) + 0.5 + kf / (12.0 * x) - kf * (kf + 1.0) * (kf + 2.0) / (720.0 * x.powi(3)))
}

/// Exact value times (2πi)^k against Σ_{0 < |n| ≤ M, n ≡ m} n^{−k} plus its
/// Euler–Maclaurin tail; the raw partial sum must sit within the rigorous
/// tail bound.
pub fn numeric_partial_zeta(n: u32, k: u32, m_max: u64) -> Result<Vec<(i64, f64, f64, f64)>> {
    let nn = n as usize;
    let mut sums = vec![(0.0f64, 0.0f64); nn];
    for j in (1..=m_max).rev() {
        let v = (j as f64).powi(-(k as i32));
        let s = if k % 2 == 0 { v } else { -v };
        for (r, w) in [(j as usize % nn, v), ((nn - j as usize % nn) % nn, s)] {
            // Neumaier summation per residue
            let (sum, comp) = &mut sums[r];
            let t = *sum + w;
            if sum.abs() >= w.abs() {
                *comp += (*sum - t) + w;
            } else {
                *comp += (w - t) + *sum;
            }
            *sum = t;
        }
    }
    let two_pi_i_k = Complex64::new(0.0, 2.0 * std::f64::consts::PI).powu(k);
    let nf = n as f64;
    let mut out = Vec::new();
    for m in 0..n as i64 {
        let exact = (partial_zeta_scaled(m, n as u64, k)?.approx_complex(53) * two_pi_i_k).re;
        let partial = sums[m as usize].0 + sums[m as usize].1;
        // first terms beyond M on each side: n = M + a, a ≡ m − M, and −n with n ≡ −m
        let tail = |res: i64| -> f64 {
            let a = (res - m_max as i64).rem_euclid(n as i64);
            let a = if a == 0 { n as i64 } else { a };
            let start = m_max as f64 + a as f64;
            nf.powf(-(k as f64)) * hurwitz_tail(start / nf, k)
        };
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let corrected = partial + tail(m) + sign * tail(-m);
        let bound = 2.0 * ((m_max as f64 + 1.0).powf(-(k as f64)) + (m_max as f64 + 1.0).powf(1.0 - k as f64) / (nf * (k as f64 - 1.0)));
        // rounding in the partial sum is far below 1e-12
        out.push((m, exact, corrected, ((exact - partial).abs() - 1e-12).max(0.0) / bound));
    }
    Ok(out)
}

fn numeric_zeta(cfg: &Config) -> Result<Tally> {
    let jobs: Vec<(u32, u32)> = cfg.levels(1, 12).flat_map(|n| [2u32, 3, 4, 6].map(|k| (n, k))).collect();
    Ok(jobs
        .par_iter()
        .map(|&(n, k)| {
            let mut t = Tally::default();
            match numeric_partial_zeta(n, k, 1_000_000) {
                Ok(rows) => {
                    for (m, exact, approx, ratio) in rows {
                        t.check((exact - approx).abs() < 1e-9 && ratio <= 1.0, || {
                            format!("N={n} k={k} m={m}: exact {exact:.15}, numeric {approx:.15}")
                        });
                    }
                }
                Err(e) => t.failures.push(format!("N={n} k={k}: {e}")),
            }
            t
        })
        .reduce(Tally::default, Tally::merge))
}

/// Every level-δ scaled G-series as a level-N combination, checked on
/// q-expansions (q_δ re-indexed to q_N) including the weight-2 term.
pub fn inclusion_check(delta: u32, n: u32, k: u32, j: usize) -> Result<Vec<(LatticePoint, bool)>> {
    let mut out = Vec::new();
    for mu in lambda_points(delta) {
        let g = Combination::single(Kind::G, k, mu);
        let lifted = g.raise_level(n)?.to_g()?;
        let lhs = g.expand(j)?.reindex(n)?;
        let rhs = lifted.expand(j * (n / delta) as usize)?;
        out.push((mu, lhs.agrees_with(&rhs)?));
    }
    Ok(out)
}

fn level_inclusion(cfg: &Config) -> Result<Tally> {
    let mut jobs = Vec::new();
    for n in cfg.levels(1, 12) {
        for d in divisors(n as u64) {
            for k in 2..=4u32 {
                jobs.push((d as u32, n, k));
            }
        }
    }
    Ok(jobs
        .par_iter()
        .map(|&(d, n, k)| {
            let mut t = Tally::default();
            match inclusion_check(d, n, k, 12) {
                Ok(rows) => {
                    for (mu, ok) in rows {
                        t.check(ok, || format!("δ={d} N={n} k={k}: G({mu}) not matched at level N"));
                    }
                }
                Err(e) => t.failures.push(format!("δ={d} N={n} k={k}: {e}")),
            }
            t
        })
        .reduce(Tally::default, Tally::merge))
}

/// Smallest prime p ≢ 0 mod N, for callers that need a default Hecke prime.
pub fn default_prime(n: u32) -> u64 {
    (2u64..).find(|&p| is_prime(p) && n as u64 % p != 0).expect("primes are unbounded")
}
