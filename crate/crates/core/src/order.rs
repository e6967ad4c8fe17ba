//! Coordinate selection orders: permutation heuristics × build strategies.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unordered coordinate pair stored as `(hi, lo)` with `hi > lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "[usize; 2]", try_from = "[usize; 2]")]
pub struct Pair {
    hi: usize,
    lo: usize,
}

impl Pair {
    /// Normalizes `(a, b)` into `(max, min)`. Panics when `a == b`.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "a pair needs two distinct indices");
        Pair {
            hi: a.max(b),
            lo: a.min(b),
        }
    }

    pub fn hi(self) -> usize {
        self.hi
    }

    pub fn lo(self) -> usize {
        self.lo
    }

    pub fn contains(self, v: usize) -> bool {
        self.hi == v || self.lo == v
    }

    /// The endpoint other than `v`, if `v` is an endpoint.
    pub fn other(self, v: usize) -> Option<usize> {
        if v == self.hi {
            Some(self.lo)
        } else if v == self.lo {
            Some(self.hi)
        } else {
            None
        }
    }

    fn shared(self, other: Pair) -> Option<usize> {
        if other.contains(self.hi) {
            Some(self.hi)
        } else if other.contains(self.lo) {
            Some(self.lo)
        } else {
            None
        }
    }
}

impl From<Pair> for [usize; 2] {
    fn from(p: Pair) -> Self {
        [p.hi, p.lo]
    }
}

impl TryFrom<[usize; 2]> for Pair {
    type Error = Error;
    fn try_from([a, b]: [usize; 2]) -> Result<Self> {
        if a == b {
            return Err(Error::invalid(format!("degenerate pair ({a}, {b})")));
        }
        Ok(Pair::new(a, b))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.hi, self.lo)
    }
}

/// A bijection of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(p: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; p.len()];
        for &v in &p {
            if v >= p.len() || std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!("not a permutation: {p:?}")));
            }
        }
        Ok(Permutation(p))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Lexicographic successor in place; false when already the last permutation.
    fn advance(&mut self) -> bool {
        next_permutation(&mut self.0)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    /// Natural index order.
    Ordered,
    /// Smallest to largest diagonal element.
    S2Lde,
    /// Largest to smallest diagonal element.
    L2Sde,
    /// Smallest and largest diagonal elements interleaved.
    Ide,
}

impl Heuristic {
    pub const ALL: [Heuristic; 4] = [
        Heuristic::Ordered,
        Heuristic::S2Lde,
        Heuristic::L2Sde,
        Heuristic::Ide,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Heuristic::Ordered => "ordered",
            Heuristic::S2Lde => "s2lde",
            Heuristic::L2Sde => "l2sde",
            Heuristic::Ide => "ide",
        }
    }

    /// Ties between equal diagonal values keep ascending index order.
    pub fn permutation(self, diag: &[f64]) -> Permutation {
        let n = diag.len();
        let ascending = || {
            let mut p: Vec<usize> = (0..n).collect();
            p.sort_by(|&a, &b| diag[a].total_cmp(&diag[b]));
            p
        };
        let p = match self {
            Heuristic::Ordered => (0..n).collect(),
            Heuristic::S2Lde => ascending(),
            Heuristic::L2Sde => {
                let mut p: Vec<usize> = (0..n).collect();
                p.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]));
                p
            }
            Heuristic::Ide => {
                let tmp = ascending();
                let (mut lo, mut hi) = (0, n);
                let mut p = Vec::with_capacity(n);
                while lo < hi {
                    p.push(tmp[lo]);
                    lo += 1;
                    if lo < hi {
                        hi -= 1;
                        p.push(tmp[hi]);
                    }
                }
                p
            }
        };
        Permutation(p)
    }
}

impl fmt::Display for Heuristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Heuristic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Heuristic::ALL
            .into_iter()
            .find(|h| h.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown heuristic {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Build {
    /// Completes one row of the permuted matrix at a time.
    Build1,
    /// Grows a leading principal block outward from the diagonal.
    Build2,
}

impl Build {
    pub const ALL: [Build; 2] = [Build::Build1, Build::Build2];

    pub fn as_str(self) -> &'static str {
        match self {
            Build::Build1 => "build1",
            Build::Build2 => "build2",
        }
    }

    pub fn order(self, p: &Permutation) -> SelectionOrder {
        match self {
            Build::Build1 => build1_order(p),
            Build::Build2 => build2_order(p),
        }
    }
}

impl fmt::Display for Build {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Build {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Build::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown build {s:?}")))
    }
}

/// A heuristic paired with a build strategy, e.g. `ordered+build2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct VariantSpec {
    pub heuristic: Heuristic,
    pub build: Build,
}

impl VariantSpec {
    pub fn new(heuristic: Heuristic, build: Build) -> Self {
        VariantSpec { heuristic, build }
    }

    /// The eight variants, build-major.
    pub fn all() -> Vec<VariantSpec> {
        Build::ALL
            .into_iter()
            .flat_map(|b| {
                Heuristic::ALL
                    .into_iter()
                    .map(move |h| VariantSpec::new(h, b))
            })
            .collect()
    }

    pub fn order(&self, diag: &[f64]) -> SelectionOrder {
        self.build.order(&self.heuristic.permutation(diag))
    }
}

impl fmt::Display for VariantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.heuristic, self.build)
    }
}

impl FromStr for VariantSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (h, b) = s
            .split_once('+')
            .ok_or_else(|| Error::invalid(format!("variant {s:?} is not HEURISTIC+BUILD")))?;
        Ok(VariantSpec::new(h.parse()?, b.parse()?))
    }
}

impl From<VariantSpec> for String {
    fn from(v: VariantSpec) -> Self {
        v.to_string()
    }
}

impl TryFrom<String> for VariantSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Ordered list of every unordered pair of `0..n`, each exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SelectionOrder {
    n: usize,
    pairs: Vec<Pair>,
}

impl SelectionOrder {
    /// Validates that `pairs` covers every pair of `0..n` exactly once.
    pub fn new(n: usize, pairs: Vec<Pair>) -> Result<Self> {
        let expected = n * n.saturating_sub(1) / 2;
        if pairs.len() != expected {
            return Err(Error::invalid(format!(
                "order has {} pairs, dimension {n} needs {expected}",
                pairs.len()
            )));
        }
        let mut seen = vec![false; expected];
        for p in &pairs {
            if p.hi >= n {
                return Err(Error::IndexOutOfRange {
                    index: p.hi,
                    dim: n,
                });
            }
            let k = p.hi * (p.hi - 1) / 2 + p.lo;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::invalid(format!("pair {p} repeated in order")));
            }
        }
        Ok(SelectionOrder { n, pairs })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn iter(&self) -> impl Iterator<Item = Pair> + '_ {
        self.pairs.iter().copied()
    }

    /// 1-based iteration at which `pair` is revealed.
    pub fn position(&self, pair: Pair) -> Option<usize> {
        self.pairs.iter().position(|&p| p == pair).map(|k| k + 1)
    }
}

/// `(p1,p2), (p1,p3), …, (p1,pn), (p2,p3), …, (p(n-1),pn)`.
pub fn build1_order(p: &Permutation) -> SelectionOrder {
    let p = p.as_slice();
    let n = p.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            pairs.push(Pair::new(p[a], p[b]));
        }
    }
    SelectionOrder { n, pairs }
}

/// `(p2,p1), (p3,p2), (p3,p1), (p4,p3), …, (p4,p1), …, (pn,p(n-1)), …, (pn,p1)`.
pub fn build2_order(p: &Permutation) -> SelectionOrder {
    let p = p.as_slice();
    let n = p.len();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for a in 1..n {
        for b in (0..a).rev() {
            pairs.push(Pair::new(p[a], p[b]));
        }
    }
    SelectionOrder { n, pairs }
}

/// Recovers the permutation Build 1 would need to produce `order`, if any.
fn build1_preimage(order: &SelectionOrder) -> Option<Permutation> {
    let n = order.n;
    let pairs = &order.pairs;
    let p = match n {
        0 | 1 => (0..n).collect(),
        2 => vec![pairs[0].lo, pairs[0].hi],
        _ => {
            let first = pairs[0].shared(pairs[1])?;
            let mut p = vec![first];
            p.extend(
                pairs[..n - 1]
                    .iter()
                    .map(|q| q.other(first))
                    .collect::<Option<Vec<_>>>()?,
            );
            p
        }
    };
    let p = Permutation::new(p).ok()?;
    (build1_order(&p) == *order).then_some(p)
}

/// Recovers the permutation Build 2 would need to produce `order`, if any.
fn build2_preimage(order: &SelectionOrder) -> Option<Permutation> {
    let n = order.n;
    let pairs = &order.pairs;
    let p = match n {
        0 | 1 => (0..n).collect(),
        2 => vec![pairs[0].lo, pairs[0].hi],
        _ => {
            // (p2,p1) then (p3,p2): the shared index is p2.
            let second = pairs[0].shared(pairs[1])?;
            let mut p = vec![pairs[0].other(second)?, second];
            // Pair (p_{k}, p_{k-1}) opens block k; its fresh endpoint is p_k.
            let mut start = 1;
            for k in 2..n {
                let q = pairs[start];
                p.push(q.other(p[k - 1])?);
                start += k;
            }
            p
        }
    };
    let p = Permutation::new(p).ok()?;
    (build2_order(&p) == *order).then_some(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnumerationMode {
    /// Build 1 and Build 2 over every permutation of the indices, deduplicated.
    PermBuild,
    /// Every ordering of the `n(n-1)/2` pairs.
    AllPairs,
}

impl EnumerationMode {
    pub fn as_str(self) -> &'static str {
        match self {
            EnumerationMode::PermBuild => "perm-build",
            EnumerationMode::AllPairs => "all-pairs",
        }
    }

    pub fn max_dim(self) -> usize {
        match self {
            EnumerationMode::PermBuild => 10,
            EnumerationMode::AllPairs => 4,
        }
    }

    /// Number of orders before deduplication (`2·n!` or `(n(n-1)/2)!`), as a float
    /// since the latter overflows quickly.
    pub fn raw_count(self, n: usize) -> f64 {
        let factorial = |k: usize| (1..=k).fold(1.0f64, |acc, v| acc * v as f64);
        match self {
            EnumerationMode::PermBuild => 2.0 * factorial(n),
            EnumerationMode::AllPairs => factorial(n * n.saturating_sub(1) / 2),
        }
    }
}

impl fmt::Display for EnumerationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EnumerationMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perm-build" | "perm_x_build" => Ok(EnumerationMode::PermBuild),
            "all-pairs" | "all_pair_orders" => Ok(EnumerationMode::AllPairs),
            _ => Err(Error::invalid(format!("unknown enumeration mode {s:?}"))),
        }
    }
}

/// Lazily enumerates selection orders for dimension `n`.
pub fn enumerate_orders(n: usize, mode: EnumerationMode) -> Result<OrderStream> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if n > mode.max_dim() {
        return Err(Error::Infeasible {
            mode: mode.as_str(),
            n,
            max_n: mode.max_dim(),
            required: mode.raw_count(n),
        });
    }
    let inner = match mode {
        EnumerationMode::PermBuild => StreamState::PermBuild {
            perm: Some(Permutation::identity(n)),
            pending: None,
        },
        EnumerationMode::AllPairs => {
            let pairs: Vec<Pair> = build1_order(&Permutation::identity(n)).pairs;
            let mut sorted = pairs;
            sorted.sort();
            StreamState::AllPairs {
                pairs: Some(sorted),
            }
        }
    };
    Ok(OrderStream { n, inner })
}

/// Single-consumer stream returned by [`enumerate_orders`].
pub struct OrderStream {
    n: usize,
    inner: StreamState,
}

enum StreamState {
    PermBuild {
        perm: Option<Permutation>,
        pending: Option<SelectionOrder>,
    },
    AllPairs {
        pairs: Option<Vec<Pair>>,
    },
}

impl Iterator for OrderStream {
    type Item = SelectionOrder;

    fn next(&mut self) -> Option<SelectionOrder> {
        let n = self.n;
        match &mut self.inner {
            StreamState::PermBuild { perm, pending } => loop {
                if let Some(order) = pending.take() {
                    return Some(order);
                }
                let p = perm.as_mut()?;
                let current = p.clone();
                if !p.advance() {
                    *perm = None;
                }
                // Emit each distinct order once: only from its canonical
                // preimage, and Build 2 orders only if Build 1 cannot produce them.
                let b1 = build1_order(&current);
                let emit1 = build1_preimage(&b1).as_ref() == Some(&current);
                let b2 = build2_order(&current);
                let emit2 = build2_preimage(&b2).as_ref() == Some(&current)
                    && build1_preimage(&b2).is_none();
                match (emit1, emit2) {
                    (true, true) => {
                        *pending = Some(b2);
                        return Some(b1);
                    }
                    (true, false) => return Some(b1),
                    (false, true) => return Some(b2),
                    (false, false) => continue,
                }
            },
            StreamState::AllPairs { pairs } => {
                let current = pairs.as_mut()?;
                let out = SelectionOrder {
                    n,
                    pairs: current.clone(),
                };
                if !next_permutation(current) {
                    *pairs = None;
                }
                Some(out)
            }
        }
    }
}
