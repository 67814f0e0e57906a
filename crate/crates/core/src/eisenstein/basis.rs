use std::collections::BTreeSet;

use num_rational::BigRational;
use serde::Serialize;

use super::labels::{Combination, Kind};
use crate::arith::mod_inverse;
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::modgroup::cusps::{cusp_classes, locate_cusp, min_amplitude_cusp};
use crate::modgroup::{admissible_reps, AdmissibleReps, CongruenceSubgroup, Cusp, CuspClass, LatticeOrbit, LatticePoint, ResidueMatrix};
use crate::qseries::QExpansion;

/// Cusps, admissible representatives and the attached point sets of one group.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub group: CongruenceSubgroup,
    pub classes: Vec<CuspClass>,
    pub reps: AdmissibleReps,
}

impl SpectralData {
    pub fn new(g: &CongruenceSubgroup) -> Self {
        SpectralData { group: g.clone(), classes: cusp_classes(g), reps: admissible_reps(g) }
    }

    pub fn level(&self) -> u32 {
        self.group.level()
    }

    pub fn cusps(&self) -> Vec<Cusp> {
        self.classes.iter().map(|c| c.cusp.clone()).collect()
    }

    pub fn locate(&self, x: &Cusp) -> Result<usize> {
        locate_cusp(&self.classes, self.level(), x.numerator, x.denominator)
            .ok_or_else(|| Error::param(format!("{x} is not a cusp representative")))
    }

    /// (O ∪ −O) ∩ A for the cusp with index i.
    pub fn support(&self, i: usize) -> Vec<LatticePoint> {
        self.classes[i].union().into_iter().filter(|p| self.reps.contains(p)).collect()
    }

    /// The G-orbit attached to cusp i, taken inside A when regular.
    pub fn attached_orbit(&self, i: usize) -> LatticeOrbit {
        let o = &self.classes[i].orbit;
        if o.regular && !o.points.iter().all(|p| self.reps.contains(p)) {
            o.neg()
        } else {
            o.clone()
        }
    }

    fn check_weight(&self, i: usize, k: u32) -> Result<()> {
        if k < 2 {
            return Err(Error::domain(format!("weight {k} < 2")));
        }
        if k % 2 == 1 {
            if self.group.contains_minus_id() {
                return Err(Error::EmptySpace(format!("odd weight {k} and −1 lies in the group")));
            }
            if !self.classes[i].cusp.regular {
                return Err(Error::domain(format!(
                    "odd weight {k} at the irregular cusp {}",
                    self.classes[i].cusp
                )));
            }
        }
        Ok(())
    }

    /// E_{k,x} (kind E) or G_{k,x} (kind G) as a label combination.
    pub fn series_combination(&self, i: usize, kind: Kind, k: u32) -> Result<Combination> {
        self.check_weight(i, k)?;
        let n = self.level();
        let mut c = Combination::new(kind, k, n, n as u64);
        let one = CycNum::one(n as u64);
        for p in self.support(i) {
            c.add_term(p, &one);
        }
        Ok(c)
    }

    /// Orbital sum Σ_{λ∈O} of one kind.
    pub fn orbital_sum(kind: Kind, o: &LatticeOrbit, k: u32) -> Combination {
        let n = o.representative().n;
        let mut c = Combination::new(kind, k, n, n as u64);
        let one = CycNum::one(n as u64);
        for p in &o.points {
            c.add_term(*p, &one);
        }
        c
    }

    /// Index of the cusp of least amplitude.
    pub fn x0(&self) -> usize {
        let c = min_amplitude_cusp(&self.group);
        self.locate(&c).expect("least-amplitude cusp is listed")
    }

    /// |or(x)|/|or(x₀)|.
    pub fn orbit_ratio(&self, i: usize) -> BigRational {
        let x0 = self.x0();
        BigRational::new(
            (self.classes[i].cusp.orbit_size as i64).into(),
            (self.classes[x0].cusp.orbit_size as i64).into(),
        )
    }

    /// Basis label combinations with the cusp index they belong to.
    pub fn basis_combinations(&self, kind: Kind, k: u32) -> Result<Vec<(usize, Combination)>> {
        if k < 2 {
            return Err(Error::domain(format!("weight {k} < 2")));
        }
        let mut out = Vec::new();
        if k % 2 == 1 {
            if self.group.contains_minus_id() {
                return Ok(out);
            }
            for i in 0..self.classes.len() {
                if self.classes[i].cusp.regular {
                    out.push((i, self.series_combination(i, kind, k)?));
                }
            }
        } else if k == 2 {
            let x0 = self.x0();
            let base = self.series_combination(x0, kind, k)?;
            for i in 0..self.classes.len() {
                if i == x0 {
                    continue;
                }
                let r = CycNum::from_rational(self.level() as u64, &self.orbit_ratio(i));
                out.push((i, self.series_combination(i, kind, k)?.sub(&base.scale(&r)?)?));
            }
        } else {
            for i in 0..self.classes.len() {
                out.push((i, self.series_combination(i, kind, k)?));
            }
        }
        Ok(out)
    }

    /// Dimension from the cusp data alone.
    pub fn dimension(&self, k: u32) -> usize {
        let c = self.classes.len();
        match k {
            0 | 1 => 0,
            2 => c - 1,
            _ if k % 2 == 0 => c,
            _ if self.group.contains_minus_id() => 0,
            _ => self.classes.iter().filter(|x| x.cusp.regular).count(),
        }
    }

    pub fn basis(&self, kind: Kind, k: u32, j: usize) -> Result<EisensteinBasis> {
        let elements = self
            .basis_combinations(kind, k)?
            .into_iter()
            .map(|(i, c)| {
                Ok(BasisElement {
                    cusp: self.classes[i].cusp.clone(),
                    orbit: self.attached_orbit(i),
                    qexp: c.expand(j)?,
                    combination: c,
                })
            })
            .collect::<Result<_>>()?;
        Ok(EisensteinBasis {
            group: self.group.spec().to_string(),
            level: self.level(),
            weight: k,
            kind: match kind {
                Kind::E => BasisKind::Spectral,
                Kind::G => BasisKind::Unnormalized,
            },
            elements,
        })
    }

    /// ε_A(δ): δ⁻¹·supp(x) is ±supp(y); returns (y, sign). On irregular
    /// targets the sign is +1.
    pub fn epsilon_a(&self, i: usize, delta: i64) -> Result<(usize, i32)> {
        let n = self.level() as i64;
        let di = mod_inverse(delta, n).ok_or_else(|| Error::param(format!("{delta} is not a unit mod {n}")))?;
        let moved: BTreeSet<_> = self.support(i).iter().map(|p| p.scale(di)).collect();
        let first = *moved.iter().next().expect("supports are nonempty");
        let y = self
            .classes
            .iter()
            .position(|c| c.orbit.contains(&first) || c.orbit.contains(&first.neg()))
            .ok_or_else(|| Error::internal("scaled point lies in no cusp class"))?;
        let target: BTreeSet<_> = self.support(y).into_iter().collect();
        if moved == target {
            Ok((y, 1))
        } else if moved.iter().map(|p| p.neg()).collect::<BTreeSet<_>>() == target {
            Ok((y, -1))
        } else if !self.classes[y].cusp.regular {
            Ok((y, 1))
        } else {
            Err(Error::internal("scaled support is not ± a support"))
        }
    }
}

/// π_∞(f|γ) for γ ∈ SL₂(Z) given by its entries.
pub fn constant_term_at_cusp(f: &Combination, gamma: [i64; 4]) -> Result<CycNum> {
    let [a, b, c, d] = gamma;
    let m = ResidueMatrix::new(f.level, a, b, c, d)
        .ok_or_else(|| Error::param("matrix does not have determinant 1"))?;
    f.constant_term_at(&m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BasisKind {
    Spectral,
    Unnormalized,
    Nebentypus,
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisElement {
    pub cusp: Cusp,
    pub orbit: LatticeOrbit,
    #[serde(skip)]
    pub combination: Combination,
    pub qexp: QExpansion,
}

#[derive(Debug, Clone, Serialize)]
pub struct EisensteinBasis {
    pub group: String,
    pub level: u32,
    pub weight: u32,
    pub kind: BasisKind,
    pub elements: Vec<BasisElement>,
}

impl EisensteinBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:?} basis of weight {} for {} ({} elements)\n",
            self.kind,
            self.weight,
            self.group,
            self.elements.len()
        );
        for e in &self.elements {
            s.push_str(&format!("cusp {} (orbit of {}):\n", e.cusp, e.orbit.representative()));
            s.push_str(&e.qexp.to_text());
        }
        s
    }
}

pub fn spectral_series(g: &CongruenceSubgroup, x: &Cusp, k: u32, j: usize) -> Result<QExpansion> {
    let d = SpectralData::new(g);
    d.series_combination(d.locate(x)?, Kind::E, k)?.expand(j)
}

pub fn unnormalized_series(g: &CongruenceSubgroup, x: &Cusp, k: u32, j: usize) -> Result<QExpansion> {
    let d = SpectralData::new(g);
    d.series_combination(d.locate(x)?, Kind::G, k)?.expand(j)
}

pub fn spectral_basis(g: &CongruenceSubgroup, k: u32, j: usize) -> Result<EisensteinBasis> {
    SpectralData::new(g).basis(Kind::E, k, j)
}

pub fn unnormalized_basis(g: &CongruenceSubgroup, k: u32, j: usize) -> Result<EisensteinBasis> {
    SpectralData::new(g).basis(Kind::G, k, j)
}

pub fn orbital_sum(kind: Kind, o: &LatticeOrbit, k: u32, j: usize) -> Result<QExpansion> {
    SpectralData::orbital_sum(kind, o, k).expand(j)
}
