use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::matrix::{closure, sl2_mod, ResidueMatrix};
use crate::arith::{gcd, lcm, modp};
use crate::error::{Error, Result};

/// Descriptor of a congruence subgroup, with the CLI string grammar
/// `gamma:N`, `gamma1:N`, `gamma0:N`, `gammaNt:N,t`, `larcher:p,q,r,chi,tau`,
/// `gens:N:a,b,c,d;a,b,c,d;...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum GroupSpec {
    Gamma { n: u32 },
    Gamma1 { n: u32 },
    Gamma0 { n: u32 },
    #[serde(rename = "gammaNt")]
    GammaNt { n: u32, t: u32 },
    Larcher { p: u32, q: u32, r: u32, chi: u32, tau: u32 },
    Generated { n: u32, gens: Vec<[i64; 4]> },
}

fn parse_u32(s: &str) -> Result<u32> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("expected a nonnegative integer, got {s:?}")))
}

fn parse_list(s: &str, len: usize) -> Result<Vec<u32>> {
    let v = s.split(',').map(parse_u32).collect::<Result<Vec<_>>>()?;
    if v.len() != len {
        return Err(Error::Parse(format!("expected {len} comma-separated values in {s:?}")));
    }
    Ok(v)
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("group spec {s:?} lacks ':'")))?;
        let spec = match head {
            "gamma" => GroupSpec::Gamma { n: parse_u32(rest)? },
            "gamma1" => GroupSpec::Gamma1 { n: parse_u32(rest)? },
            "gamma0" => GroupSpec::Gamma0 { n: parse_u32(rest)? },
            "gammaNt" => {
                let v = parse_list(rest, 2)?;
                GroupSpec::GammaNt { n: v[0], t: v[1] }
            }
            "larcher" => {
                let v = parse_list(rest, 5)?;
                GroupSpec::Larcher { p: v[0], q: v[1], r: v[2], chi: v[3], tau: v[4] }
            }
            "gens" => {
                let (n, mats) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Parse("gens spec needs N:matrices".into()))?;
                let n = parse_u32(n)?;
                let mut gens = Vec::new();
                for m in mats.split(';').filter(|m| !m.trim().is_empty()) {
                    let v = m
                        .split(',')
                        .map(|x| {
                            x.trim()
                                .parse::<i64>()
                                .map_err(|_| Error::Parse(format!("bad matrix entry {x:?}")))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    if v.len() != 4 {
                        return Err(Error::Parse(format!("matrix {m:?} needs 4 entries")));
                    }
                    gens.push([v[0], v[1], v[2], v[3]]);
                }
                GroupSpec::Generated { n, gens }
            }
            _ => return Err(Error::Parse(format!("unknown group family {head:?}"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Gamma { n } => write!(f, "gamma:{n}"),
            GroupSpec::Gamma1 { n } => write!(f, "gamma1:{n}"),
            GroupSpec::Gamma0 { n } => write!(f, "gamma0:{n}"),
            GroupSpec::GammaNt { n, t } => write!(f, "gammaNt:{n},{t}"),
            GroupSpec::Larcher { p, q, r, chi, tau } => write!(f, "larcher:{p},{q},{r},{chi},{tau}"),
            GroupSpec::Generated { n, gens } => {
                let mats: Vec<String> = gens
                    .iter()
                    .map(|m| format!("{},{},{},{}", m[0], m[1], m[2], m[3]))
                    .collect();
                write!(f, "gens:{n}:{}", mats.join(";"))
            }
        }
    }
}

/// A congruence subgroup given by its image in SL₂(Z/level); the group
/// represented is the full preimage in SL₂(Z).
#[derive(Debug, Clone)]
pub struct CongruenceSubgroup {
    level: u32,
    elements: Vec<ResidueMatrix>,
    members: HashSet<ResidueMatrix>,
    contains_minus_id: bool,
    spec: GroupSpec,
}

impl CongruenceSubgroup {
    fn from_elements(level: u32, elements: Vec<ResidueMatrix>, spec: GroupSpec) -> Self {
        let members: HashSet<_> = elements.iter().copied().collect();
        let contains_minus_id = members.contains(&ResidueMatrix::minus_identity(level));
        CongruenceSubgroup { level, elements, members, contains_minus_id, spec }
    }

    fn filtered(level: u32, spec: GroupSpec, pred: impl Fn(&ResidueMatrix) -> bool) -> Self {
        let elements = sl2_mod(level).iter().copied().filter(|m| pred(m)).collect();
        Self::from_elements(level, elements, spec)
    }

    pub fn new(spec: &GroupSpec) -> Result<Self> {
        let positive = |v: u32, what: &str| {
            if v == 0 {
                Err(Error::param(format!("{what} must be positive")))
            } else {
                Ok(v)
            }
        };
        let spec = spec.clone();
        let g = match spec {
            GroupSpec::Gamma { n } => {
                let n = positive(n, "level")?;
                Self::gamma_nt_filter(n, n, spec)
            }
            GroupSpec::Gamma1 { n } => {
                let n = positive(n, "level")?;
                Self::gamma_nt_filter(n, 1, spec)
            }
            GroupSpec::GammaNt { n, t } => {
                let n = positive(n, "level")?;
                if t == 0 || n % t != 0 {
                    return Err(Error::param(format!("t = {t} must divide N = {n}")));
                }
                Self::gamma_nt_filter(n, t, spec)
            }
            GroupSpec::Gamma0 { n } => {
                let n = positive(n, "level")?;
                Self::filtered(n, spec, |m| m.c == 0)
            }
            GroupSpec::Larcher { p, q, r, chi, tau } => {
                for (v, w) in [(p, "p"), (q, "q"), (r, "r"), (chi, "chi")] {
                    positive(v, w)?;
                }
                let (pi, qi, ri, ci) = (p as i64, q as i64, r as i64, chi as i64);
                if (qi * ri) % pi != 0 {
                    return Err(Error::param("larcher: p must divide qr"));
                }
                if gcd(pi, qi * ri / pi) % ci != 0 {
                    return Err(Error::param("larcher: chi must divide gcd(p, qr/p)"));
                }
                let level = lcm(lcm(pi * ci, qi), ri * ci) as u32;
                let g = Self::filtered(level, spec, |m| {
                    let [a, b, c, d] = m.entries();
                    modp(a - 1, pi) == 0
                        && modp(d - 1, pi) == 0
                        && modp(b, qi) == 0
                        && modp(c, ri) == 0
                        && modp(c / ri - tau as i64 * ((a - 1) / pi), ci) == 0
                });
                if !g.is_closed() {
                    return Err(Error::param(format!(
                        "larcher:{p},{q},{r},{chi},{tau} is not closed under multiplication"
                    )));
                }
                g
            }
            GroupSpec::Generated { n, ref gens } => {
                let n = positive(n, "level")?;
                let mats = gens
                    .iter()
                    .map(|m| {
                        ResidueMatrix::new(n, m[0], m[1], m[2], m[3]).ok_or_else(|| {
                            Error::param(format!("generator {m:?} has determinant ≠ 1 mod {n}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                let elements = closure(n, &mats);
                Self::from_elements(n, elements, spec)
            }
        };
        Ok(g)
    }

    fn gamma_nt_filter(n: u32, t: u32, spec: GroupSpec) -> Self {
        let one = 1 % n;
        Self::filtered(n, spec, |m| m.a == one && m.d == one && m.c == 0 && m.b % t == 0)
    }

    pub fn gamma(n: u32) -> Self {
        Self::new(&GroupSpec::Gamma { n }).expect("valid level")
    }

    pub fn gamma1(n: u32) -> Self {
        Self::new(&GroupSpec::Gamma1 { n }).expect("valid level")
    }

    pub fn gamma0(n: u32) -> Self {
        Self::new(&GroupSpec::Gamma0 { n }).expect("valid level")
    }

    pub fn gamma_nt(n: u32, t: u32) -> Result<Self> {
        Self::new(&GroupSpec::GammaNt { n, t })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn elements(&self) -> &[ResidueMatrix] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, m: &ResidueMatrix) -> bool {
        self.members.contains(m)
    }

    pub fn contains_minus_id(&self) -> bool {
        self.contains_minus_id
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// The (N, t) parameters when the group is Γ(N), Γ₁(N) or Γ(N, t).
    pub fn gamma_nt_params(&self) -> Option<(u32, u32)> {
        match self.spec {
            GroupSpec::Gamma { n } => Some((n, n)),
            GroupSpec::Gamma1 { n } => Some((n, 1)),
            GroupSpec::GammaNt { n, t } => Some((n, t)),
            _ => None,
        }
    }

    pub fn is_gamma0(&self) -> bool {
        matches!(self.spec, GroupSpec::Gamma0 { .. })
    }

    /// Checks identity, products and inverses.
    pub fn is_closed(&self) -> bool {
        self.members.contains(&ResidueMatrix::identity(self.level))
            && self.elements.iter().all(|x| self.members.contains(&x.inverse()))
            && self
                .elements
                .iter()
                .all(|x| self.elements.iter().all(|y| self.members.contains(&x.mul(y))))
    }
}

impl PartialEq for CongruenceSubgroup {
    /// Equality of the represented groups (same level and image).
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.elements == other.elements
    }
}
