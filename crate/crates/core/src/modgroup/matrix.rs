use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use parking_lot::RwLock;
use serde::Serialize;

use crate::arith::modp;

/// An element of SL₂(Z/N).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ResidueMatrix {
    pub n: u32,
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
}

impl ResidueMatrix {
    /// Reduces integer entries mod `n`; returns `None` unless ad − bc ≡ 1.
    pub fn new(n: u32, a: i64, b: i64, c: i64, d: i64) -> Option<Self> {
        let m = Self::reduce(n, a, b, c, d);
        if modp(a * d - b * c - 1, n as i64) == 0 {
            Some(m)
        } else {
            None
        }
    }

    fn reduce(n: u32, a: i64, b: i64, c: i64, d: i64) -> Self {
        let r = |x: i64| modp(x, n as i64) as u32;
        ResidueMatrix { n, a: r(a), b: r(b), c: r(c), d: r(d) }
    }

    pub fn identity(n: u32) -> Self {
        Self::reduce(n, 1, 0, 0, 1)
    }

    pub fn minus_identity(n: u32) -> Self {
        Self::reduce(n, -1, 0, 0, -1)
    }

    /// S = (0, −1; 1, 0).
    pub fn s(n: u32) -> Self {
        Self::reduce(n, 0, -1, 1, 0)
    }

    /// T = (1, 1; 0, 1).
    pub fn t(n: u32) -> Self {
        Self::reduce(n, 1, 1, 0, 1)
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a as i64, self.b as i64, self.c as i64, self.d as i64]
    }

    pub fn mul(&self, o: &ResidueMatrix) -> ResidueMatrix {
        debug_assert_eq!(self.n, o.n);
        let [a, b, c, d] = self.entries();
        let [e, f, g, h] = o.entries();
        Self::reduce(self.n, a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)
    }

    pub fn inverse(&self) -> ResidueMatrix {
        let [a, b, c, d] = self.entries();
        Self::reduce(self.n, d, -b, -c, a)
    }

    pub fn neg(&self) -> ResidueMatrix {
        let [a, b, c, d] = self.entries();
        Self::reduce(self.n, -a, -b, -c, -d)
    }

    /// Image under reduction to a divisor `m` of the modulus.
    pub fn reduce_to(&self, m: u32) -> ResidueMatrix {
        let [a, b, c, d] = self.entries();
        Self::reduce(m, a, b, c, d)
    }
}

impl fmt::Display for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{};{},{}) mod {}", self.a, self.b, self.c, self.d, self.n)
    }
}

/// Breadth-first closure of `gens` under multiplication, including the identity.
pub fn closure(n: u32, gens: &[ResidueMatrix]) -> Vec<ResidueMatrix> {
    let id = ResidueMatrix::identity(n);
    let mut seen: HashSet<ResidueMatrix> = HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = x.mul(g);
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    out
}

static SL2: OnceLock<RwLock<HashMap<u32, Arc<Vec<ResidueMatrix>>>>> = OnceLock::new();

/// SL₂(Z/N) as the closure of the images of S and T. Memoized.
pub fn sl2_mod(n: u32) -> Arc<Vec<ResidueMatrix>> {
    assert!(n >= 1);
    let cache = SL2.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(g) = cache.read().get(&n) {
        return g.clone();
    }
    let g = Arc::new(closure(n, &[ResidueMatrix::s(n), ResidueMatrix::t(n)]));
    cache.write().entry(n).or_insert(g).clone()
}
