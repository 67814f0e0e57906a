use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use parking_lot::Mutex;

use super::labels::{epsilon, Combination, Kind};
use crate::arith::{divisors, factorial, gcd, mod_inverse, modp, units};
use crate::cyclotomic::{CycNum, ZetaAccumulator};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::modgroup::{lambda_points, LatticePoint};
use crate::qseries::QExpansion;
use crate::special_values::partial_zeta_scaled;

/// Representatives R of U_N/±1: units u with 2u < N (all of U_N for N ≤ 2).
pub fn half_units(n: u32) -> Vec<i64> {
    let ni = n as i64;
    if n <= 2 {
        return vec![1 % ni];
    }
    units(ni).into_iter().filter(|&u| 2 * u < ni).collect()
}

/// Index in R and sign s with v ≡ s·R[i].
fn resolve_unit(r: &[i64], n: i64, v: i64) -> (usize, i32) {
    let v = modp(v, n);
    if let Some(i) = r.iter().position(|&u| u == v) {
        return (i, 1);
    }
    let i = r.iter().position(|&u| u == modp(-v, n)).expect("unit is ± a representative");
    (i, -1)
}

/// Matrix of multiplication by σ = Σ_{u∈R} S̃(u)[u⁻¹] on the group ring of U_N
/// modulo [−1] = (−1)^k, in the basis [v], v ∈ R. Column j is σ·[R_j].
/// G̃(λ) = (σ·E)(λ) with [v]E(λ) = E(vλ).
pub fn s_tilde_matrix(n: u32, k: u32) -> Result<Matrix> {
    let ni = n as i64;
    let l = n as u64;
    let r = half_units(n);
    let d = r.len();
    let mut m = vec![vec![CycNum::zero(l); d]; d];
    for &u in &r {
        let s = partial_zeta_scaled(u, l, k)?;
        let ui = mod_inverse(u, ni).unwrap_or(0);
        for (j, &v) in r.iter().enumerate() {
            let (i, sg) = resolve_unit(&r, ni, ui * v);
            let term = if sg < 0 && k % 2 == 1 { -&s } else { s.clone() };
            m[i][j] = &m[i][j] + &term;
        }
    }
    Ok(m)
}

type CKey = (u32, u32);

fn c_cache() -> &'static Mutex<HashMap<CKey, Arc<Vec<CycNum>>>> {
    static CACHE: OnceLock<Mutex<HashMap<CKey, Arc<Vec<CycNum>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Coefficients c_w (w ∈ R) of σ⁻¹, so that E(λ) = Σ_w c_w G̃(wλ).
/// Empty when the space is zero (odd k, N ≤ 2).
pub fn c_vector(n: u32, k: u32) -> Result<Arc<Vec<CycNum>>> {
    if k < 2 {
        return Err(Error::domain(format!("weight {k} < 2")));
    }
    if let Some(c) = c_cache().lock().get(&(n, k)) {
        return Ok(c.clone());
    }
    let c = if n <= 2 && k % 2 == 1 {
        Vec::new()
    } else {
        let m = s_tilde_matrix(n, k)?;
        let d = m.len();
        let mut e1 = vec![vec![CycNum::zero(n as u64)]; d];
        e1[0][0] = CycNum::one(n as u64);
        linalg::solve(&m, &e1)?.into_iter().map(|mut row| row.remove(0)).collect()
    };
    let c = Arc::new(c);
    c_cache().lock().insert((n, k), c.clone());
    Ok(c)
}

impl Combination {
    /// The same function written in G-labels.
    pub fn to_g(&self) -> Result<Combination> {
        if self.kind == Kind::G {
            return Ok(self.clone());
        }
        let c = c_vector(self.level, self.weight)?;
        let r = half_units(self.level);
        let mut out = Combination::new(Kind::G, self.weight, self.level, self.conductor);
        for (p, a) in &self.terms {
            for (w, cw) in r.iter().zip(c.iter()) {
                out.add_term(p.scale(*w), &(&cw.embed(self.conductor)? * a));
            }
        }
        Ok(out)
    }

    /// The same function written in E-labels: G̃(λ) = Σ_{u∈R} S̃(u)E(u⁻¹λ).
    pub fn to_e(&self) -> Result<Combination> {
        if self.kind == Kind::E {
            return Ok(self.clone());
        }
        let n = self.level;
        let mut out = Combination::new(Kind::E, self.weight, n, self.conductor);
        if n <= 2 && self.weight % 2 == 1 {
            return Ok(out);
        }
        for u in half_units(n) {
            let s = partial_zeta_scaled(u, n as u64, self.weight)?.embed(self.conductor)?;
            let ui = mod_inverse(u, n as i64).unwrap_or(0);
            for (p, a) in &self.terms {
                out.add_term(p.scale(ui), &(&s * a));
            }
        }
        Ok(out)
    }

    /// The same function in E-labels of level m, a multiple of the level:
    /// E_δ(μ) = (ε_δ/ε_m)·Σ_{λ ∈ Λ_m, λ ≡ μ mod δ} E_m(λ).
    pub fn raise_level(&self, m: u32) -> Result<Combination> {
        let d = self.level;
        if m == 0 || m % d != 0 {
            return Err(Error::param(format!("{m} is not a multiple of the level {d}")));
        }
        let e = self.to_e()?;
        let l = num_integer::lcm(self.conductor, m as u64);
        let ratio = CycNum::from_rational(l, &(epsilon(d) / epsilon(m)));
        let mut by_residue: HashMap<(u32, u32), Vec<LatticePoint>> = HashMap::new();
        for p in lambda_points(m) {
            by_residue.entry((p.x % d, p.y % d)).or_default().push(p);
        }
        let mut out = Combination::new(Kind::E, self.weight, m, l);
        for (p, a) in &e.terms {
            let c = &a.embed(l)? * &ratio;
            for q in by_residue.get(&(p.x, p.y)).into_iter().flatten() {
                out.add_term(*q, &c);
            }
        }
        Ok(out)
    }

    /// q_N-expansion to order J.
    pub fn expand(&self, j: usize) -> Result<QExpansion> {
        let js: Vec<usize> = (1..=j).collect();
        let mut f = QExpansion::zero(self.weight, self.level, self.conductor, j);
        let g = self.to_g()?;
        for (i, v) in g.coefficients_at(&js)? {
            f.coeffs[i] = v;
        }
        // read off the G-form, independently of the E-label formulas
        f.coeffs[0] = g.constant_term()?;
        f.nonhol = g.nonhol();
        Ok(f)
    }

    /// Fourier coefficients a_j for j ≥ 1 of a G-combination, at the listed indices.
    pub fn coefficients_at(&self, js: &[usize]) -> Result<Vec<(usize, CycNum)>> {
        if self.kind != Kind::G {
            return self.to_g()?.coefficients_at(js);
        }
        let k = self.weight;
        let n = self.level as i64;
        let l = self.conductor;
        let shift = (l / self.level as u64) as i64;
        // common denominator
        let mut den = BigInt::one();
        for c in self.terms.values() {
            den = den.lcm(c.denominator());
        }
        let mut by_x: HashMap<i64, Vec<(i64, Vec<BigInt>)>> = HashMap::new();
        for (p, c) in &self.terms {
            let f = &den / c.denominator();
            by_x.entry(p.x as i64)
                .or_default()
                .push((p.y as i64, c.numerators().iter().map(|a| a * &f).collect()));
        }
        let deg = CycNum::zero(l).numerators().len();
        // W[(x, ρ)] = Σ_{labels at x} d_μ ζ_N^{ρ·y}
        let mut w: HashMap<(i64, i64), Option<Vec<BigInt>>> = HashMap::new();
        let mut table = |x: i64, rho: i64| -> Option<Vec<BigInt>> {
            w.entry((x, rho))
                .or_insert_with(|| {
                    let labels = by_x.get(&x)?;
                    let mut acc = ZetaAccumulator::new(l);
                    for (y, num) in labels {
                        acc.add_shifted(num, rho * y * shift, &BigInt::one());
                    }
                    Some(acc.finish_numerators())
                })
                .clone()
        };
        let neg = k % 2 == 1;
        let mut out = Vec::with_capacity(js.len());
        for &j in js {
            let mut acc = vec![BigInt::zero(); deg];
            if j == 0 {
                return Err(Error::param("coefficients_at covers j ≥ 1 only"));
            }
            for r in divisors(j as u64) {
                let m = (j as u64 / r) as i64;
                let r = r as i64;
                let rk = BigInt::from(r).pow(k - 1);
                if let Some(v) = table(modp(m, n), modp(r, n)) {
                    for (a, b) in acc.iter_mut().zip(&v) {
                        *a += b * &rk;
                    }
                }
                if let Some(v) = table(modp(-m, n), modp(-r, n)) {
                    for (a, b) in acc.iter_mut().zip(&v) {
                        if neg {
                            *a -= b * &rk;
                        } else {
                            *a += b * &rk;
                        }
                    }
                }
            }
            let mut d = &den * factorial(k - 1) * BigInt::from(n).pow(k);
            if neg {
                d = -d;
            }
            out.push((j, CycNum::from_numerators(l, acc, d)?));
        }
        Ok(out)
    }
}

/// (2πi)^{−k}·G_k(τ, λ, N) to order J in q_N.
pub fn g_series(p: &LatticePoint, k: u32, j: usize) -> Result<QExpansion> {
    if k < 2 {
        return Err(Error::domain(format!("weight {k} < 2: the series diverges")));
    }
    Combination::single(Kind::G, k, *p).expand(j)
}

/// E_k(τ, λ, N) to order J in q_N.
pub fn e_series(p: &LatticePoint, k: u32, j: usize) -> Result<QExpansion> {
    if k < 2 {
        return Err(Error::domain(format!("weight {k} < 2: the series diverges")));
    }
    Combination::single(Kind::E, k, *p).expand(j)
}

/// G^{(t)}(λ, N) = Σ_{n < N/δ_t} G̃((λ₁, λ₂ + δ_t n)) from its closed Fourier
/// formula, as a q_N-expansion to order J.
pub fn closed_form_series_gamma_nt(p: &LatticePoint, t: u32, k: u32, j: usize) -> Result<QExpansion> {
    let n = p.n;
    if t == 0 || n % t != 0 {
        return Err(Error::param(format!("t = {t} does not divide N = {n}")));
    }
    if k < 2 {
        return Err(Error::domain(format!("weight {k} < 2")));
    }
    let ni = n as i64;
    let (x, y) = (p.x as i64, p.y as i64);
    let d1 = gcd(x, ni);
    let dt = gcd(t as i64 * x, ni);
    let l = n as u64;
    let mut f = QExpansion::zero(k, n, l, j);
    if x == 0 {
        f.coeffs[0] = partial_zeta_scaled(y, dt as u64, k)?.embed(l)?;
    }
    if k == 2 {
        f.nonhol = CycNum::from_rational(l, &num_rational::BigRational::new(1.into(), BigInt::from(4 * dt * ni)));
    }
    let step = (ni * d1 / dt) as usize;
    let modulus = ni / d1;
    let target = x / d1;
    let mut d = factorial(k - 1) * BigInt::from(dt).pow(k);
    if k % 2 == 1 {
        d = -d;
    }
    let zeta_unit = ni / dt;
    let mut i = 1usize;
    while i * step <= j {
        let mut acc = ZetaAccumulator::new(l);
        for r in divisors(i as u64) {
            let m = (i as u64 / r) as i64;
            let r = r as i64;
            let rk = BigInt::from(r).pow(k - 1);
            if modp(m - target, modulus) == 0 {
                acc.add_zeta(r * y * zeta_unit, &rk);
            }
            if modp(-m - target, modulus) == 0 {
                let s = if k % 2 == 1 { -&rk } else { rk.clone() };
                acc.add_zeta(-r * y * zeta_unit, &s);
            }
        }
        f.coeffs[i * step] = acc.finish(d.clone());
        i += 1;
    }
    Ok(f)
}
