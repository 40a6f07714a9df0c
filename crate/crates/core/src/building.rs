//! The standard simplex `Ω` of side `n` in the apartment of `GL_r`: vertices,
//! oriented facets, closure order, level-map index checks. Newton points of
//! `B(GL_r, μ)` with the dominance order.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;

use crate::drinfeld::DrinfeldModule;
use crate::{Error, Result};

/// `m = (m_1, …, m_{r-1})` with `n ≥ m_1 ≥ … ≥ m_{r-1} ≥ 0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex(Vec<usize>);

fn is_vertex(m: &[usize], n: usize) -> bool {
    m.windows(2).all(|w| w[0] >= w[1]) && m.first().is_none_or(|&x| x <= n)
}

impl Vertex {
    pub fn new(m: Vec<usize>, n: usize) -> Result<Self> {
        if !is_vertex(&m, n) {
            return Err(Error::InvalidParameter(format!("{m:?} is not a vertex for n = {n}")));
        }
        Ok(Self(m))
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All vertices of `Ω`, lexicographically sorted.
pub fn enumerate_vertices(r: usize, n: usize) -> Vec<Vertex> {
    fn rec(len: usize, bound: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vertex>) {
        if prefix.len() == len {
            out.push(Vertex(prefix.clone()));
            return;
        }
        for x in 0..=bound {
            prefix.push(x);
            rec(len, x, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(r.saturating_sub(1), n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// `τ(v)`: the entry `v_i` moved to position `τ(i)` (one-based `τ`).
pub fn permute(tau: &[usize], v: &[usize]) -> Vec<usize> {
    let mut out = vec![0; v.len()];
    for (i, &t) in tau.iter().enumerate() {
        out[t - 1] = v[i];
    }
    out
}

fn is_permutation(tau: &[usize], len: usize) -> bool {
    let mut seen = vec![false; len];
    tau.len() == len
        && tau.iter().all(|&t| {
            let ok = (1..=len).contains(&t) && !seen[t - 1];
            if ok {
                seen[t - 1] = true;
            }
            ok
        })
}

fn permutations(len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(len - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, len);
            out.push(p);
        }
    }
    out.sort();
    out
}

/// `m + τ(1^{(j)})` for `j = 0..=dim`, scaled by `step`.
fn facet_points(base: &[usize], dim: usize, tau: &[usize], step: usize) -> Vec<Vec<usize>> {
    (0..=dim)
        .map(|j| {
            let mut v = base.to_vec();
            for &t in &tau[..j] {
                v[t - 1] += step;
            }
            v
        })
        .collect()
}

/// The facet with vertices `m + τ(1^{(j)})`, `0 ≤ j ≤ dim`, with `τ`
/// canonicalized to the lexicographically least permutation giving the same
/// vertex set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Facet {
    base: Vertex,
    dim: usize,
    tau: Vec<usize>,
    n: usize,
}

impl Facet {
    pub fn new(base: Vec<usize>, dim: usize, tau: Vec<usize>, n: usize) -> Result<Self> {
        let len = base.len();
        if !is_permutation(&tau, len) || dim > len {
            return Err(Error::InvalidParameter("orientation must be a permutation of 1..r-1".into()));
        }
        let points = facet_points(&base, dim, &tau, 1);
        if !points.iter().all(|v| is_vertex(v, n)) {
            return Err(Error::InvalidSubsimplex);
        }
        let set: BTreeSet<Vec<usize>> = points.into_iter().collect();
        let tau = permutations(len)
            .into_iter()
            .find(|p| facet_points(&base, dim, p, 1).into_iter().collect::<BTreeSet<_>>() == set)
            .expect("τ itself qualifies");
        Ok(Self { base: Vertex(base), dim, tau, n })
    }

    pub fn base(&self) -> &Vertex {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tau(&self) -> &[usize] {
        &self.tau
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        facet_points(&self.base.0, self.dim, &self.tau, 1).into_iter().map(Vertex).collect()
    }
}

impl fmt::Display for Facet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let csv = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "facet: base={} dim={} tau={}", csv(&self.base.0), self.dim, csv(&self.tau))
    }
}

/// `(0,…,0), (1,0,…,0), …, (1,…,1)`.
pub fn base_alcove(r: usize, n: usize) -> Result<Facet> {
    Facet::new(vec![0; r - 1], r - 1, (1..r).collect(), n)
}

/// `f ≺ f'`: the vertices of `f` are among those of `f'`.
pub fn closure_leq(f: &Facet, g: &Facet) -> bool {
    f.vertices().is_subset(&g.vertices())
}

/// All facets of `Ω`, deduplicated and sorted.
pub fn enumerate_facets(r: usize, n: usize) -> Vec<Facet> {
    let mut out = BTreeSet::new();
    for v in enumerate_vertices(r, n) {
        for dim in 0..r {
            for tau in permutations(r - 1) {
                if let Ok(f) = Facet::new(v.0.clone(), dim, tau, n) {
                    out.insert(f);
                }
            }
        }
    }
    out.into_iter().collect()
}

/// Two vertices span an edge: one dominates the other with coordinate gaps
/// in `{0, 1}`.
pub fn is_edge(a: &Vertex, b: &Vertex) -> bool {
    let gaps = |x: &Vertex, y: &Vertex| x.0.iter().zip(&y.0).all(|(u, v)| u >= v && u - v <= 1);
    a != b && (gaps(a, b) || gaps(b, a))
}

/// Every `m + ñ_τ^{(i)}`, `0 ≤ i ≤ r-1`, is a vertex of `Ω`.
pub fn validate_subsimplex(m: &[usize], n_tilde: usize, tau: &[usize], r: usize, n: usize) -> bool {
    m.len() + 1 == r
        && is_vertex(m, n)
        && n_tilde <= n
        && is_permutation(tau, r - 1)
        && facet_points(m, r - 1, tau, n_tilde).iter().all(|v| is_vertex(v, n))
}

/// A decreasing vector of rational slopes, each value `a/b` occurring with
/// multiplicity divisible by `b`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NewtonPoint(Vec<Ratio<i64>>);

impl NewtonPoint {
    pub fn new(slopes: Vec<Ratio<i64>>) -> Result<Self> {
        if slopes.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParameter("slopes must be decreasing".into()));
        }
        let mut i = 0;
        while i < slopes.len() {
            let j = i + slopes[i..].iter().take_while(|s| **s == slopes[i]).count();
            if (j - i) as i64 % slopes[i].denom() != 0 {
                return Err(Error::InvalidParameter(format!("slope {} has multiplicity {}", slopes[i], j - i)));
            }
            i = j;
        }
        Ok(Self(slopes))
    }

    /// `(1/h, …, 1/h, 0, …, 0)` of length `r`.
    pub fn of_height(r: usize, h: usize) -> Self {
        let mut s = vec![Ratio::from_integer(0); r];
        for x in s.iter_mut().take(h) {
            *x = Ratio::new(1, h as i64);
        }
        Self(s)
    }

    pub fn slopes(&self) -> &[Ratio<i64>] {
        &self.0
    }
}

impl fmt::Display for NewtonPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Partial sums of `u` bounded by those of `u'`, with equal totals.
pub fn newton_leq(u: &NewtonPoint, v: &NewtonPoint) -> Result<bool> {
    if u.0.len() != v.0.len() {
        return Err(Error::LengthMismatch(u.0.len(), v.0.len()));
    }
    let (mut a, mut b) = (Ratio::from_integer(0), Ratio::from_integer(0));
    for (x, y) in u.0.iter().zip(&v.0) {
        a += x;
        b += y;
        if a > b {
            return Ok(false);
        }
    }
    Ok(a == b)
}

/// `B(GL_r, μ)` for `μ = (1, 0, …, 0)` by exhaustive search over slopes with
/// denominators at most `r` in `[0, 1]`.
pub fn enumerate_b(r: usize, mu: &[i64]) -> Result<Vec<NewtonPoint>> {
    let mut expected_mu = vec![0; r];
    if r == 0 {
        return Err(Error::UnsupportedMu);
    }
    expected_mu[0] = 1;
    if mu != expected_mu.as_slice() {
        return Err(Error::UnsupportedMu);
    }
    let mu = NewtonPoint(mu.iter().map(|&x| Ratio::from_integer(x)).collect());
    let candidates: Vec<Ratio<i64>> = {
        let set: BTreeSet<Ratio<i64>> =
            (1..=r as i64).flat_map(|b| (0..=b).map(move |a| Ratio::new(a, b))).collect();
        set.into_iter().rev().collect()
    };
    fn rec(cands: &[Ratio<i64>], len: usize, prefix: &mut Vec<Ratio<i64>>, out: &mut Vec<Vec<Ratio<i64>>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for (i, c) in cands.iter().enumerate() {
            prefix.push(*c);
            rec(&cands[i..], len, prefix, out);
            prefix.pop();
        }
    }
    let mut all = Vec::new();
    rec(&candidates, r, &mut Vec::new(), &mut all);
    let mut out: Vec<NewtonPoint> = all
        .into_iter()
        .filter_map(|s| NewtonPoint::new(s).ok())
        .filter(|u| newton_leq(u, &mu).unwrap_or(false))
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    Ok(out)
}

/// `(1/h, …, 1/h, 0, …, 0)` for a Drinfeld module over a field in
/// characteristic `p`.
pub fn newton_of_drinfeld(e: &DrinfeldModule) -> Result<NewtonPoint> {
    let h = e.height()?;
    if h == 0 {
        return Err(Error::NotCharacteristicP);
    }
    Ok(NewtonPoint::of_height(e.rank(), h))
}
