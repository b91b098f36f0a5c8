//! Relaxed witness filtration on a landmark set.
//!
//! A simplex `σ ⊂ L` is witnessed by `w` at relaxation `α` when
//! `d(w, l)² ≤ d(w, l')² + α` for every `l ∈ σ` and `l' ∈ L ∖ σ`. The smallest
//! such `α` for one witness is
//!
//! ```text
//! α_w(σ) = max(0, max_{l ∈ σ} d(w, l)² − min_{l' ∉ σ} d(w, l')²)
//! ```
//!
//! and the raw appearance of `σ` is the minimum of `α_w(σ)` over all
//! witnesses. Appearances are then lifted so that every simplex enters no
//! earlier than its facets. Times are in squared-distance units.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;

/// A vertex, edge or triangle on landmark indices, vertices strictly increasing.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Simplex {
    verts: [u32; 3],
    len: u8,
}

impl Simplex {
    pub fn vertex(a: u32) -> Self {
        Self {
            verts: [a, 0, 0],
            len: 1,
        }
    }

    /// Panics unless `a < b`.
    pub fn edge(a: u32, b: u32) -> Self {
        assert!(a < b, "edge vertices must be increasing");
        Self {
            verts: [a, b, 0],
            len: 2,
        }
    }

    /// Panics unless `a < b < c`.
    pub fn triangle(a: u32, b: u32, c: u32) -> Self {
        assert!(a < b && b < c, "triangle vertices must be increasing");
        Self {
            verts: [a, b, c],
            len: 3,
        }
    }

    /// Sorts a vertex list of length 1 to 3, rejecting duplicates.
    pub fn from_vertices(vertices: &[u32]) -> Result<Self> {
        let mut v = vertices.to_vec();
        v.sort_unstable();
        if v.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::param(format!("repeated vertex in {vertices:?}")));
        }
        match v.as_slice() {
            [a] => Ok(Self::vertex(*a)),
            [a, b] => Ok(Self::edge(*a, *b)),
            [a, b, c] => Ok(Self::triangle(*a, *b, *c)),
            _ => Err(Error::param(format!(
                "simplices have 1 to 3 vertices, got {}",
                vertices.len()
            ))),
        }
    }

    #[inline]
    pub fn vertices(&self) -> &[u32] {
        &self.verts[..self.len as usize]
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.len as usize - 1
    }

    /// Codimension-one faces; empty for a vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let v = self.vertices();
        let n = if self.len == 1 { 0 } else { v.len() };
        (0..n).map(move |skip| {
            let mut rest = [0u32; 2];
            let mut k = 0;
            for (i, &x) in v.iter().enumerate() {
                if i != skip {
                    rest[k] = x;
                    k += 1;
                }
            }
            match k {
                1 => Simplex::vertex(rest[0]),
                _ => Simplex::edge(rest[0], rest[1]),
            }
        })
    }
}

impl Ord for Simplex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.vertices().cmp(other.vertices())
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.vertices())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilteredSimplex {
    pub simplex: Simplex,
    /// Relaxation at which the simplex enters, squared-distance units.
    pub appearance: f64,
}

impl FilteredSimplex {
    #[inline]
    pub fn dim(&self) -> usize {
        self.simplex.dim()
    }

    /// Filtration order: appearance, then dimension, then vertices.
    pub fn filtration_cmp(&self, other: &Self) -> Ordering {
        self.appearance
            .total_cmp(&other.appearance)
            .then(self.dim().cmp(&other.dim()))
            .then(self.simplex.cmp(&other.simplex))
    }
}

/// Face-closed, monotone family of simplices of dimension at most two, every
/// appearance in `[0, alpha_max]`. Simplices are stored in filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessFiltration {
    simplices: Vec<FilteredSimplex>,
    alpha_max: f64,
    n_landmarks: usize,
}

impl WitnessFiltration {
    /// Builds a filtration from explicit simplices, sorting them and checking
    /// every invariant.
    pub fn from_simplices(
        mut simplices: Vec<FilteredSimplex>,
        alpha_max: f64,
        n_landmarks: usize,
    ) -> Result<Self> {
        simplices.sort_by(FilteredSimplex::filtration_cmp);
        let f = Self {
            simplices,
            alpha_max,
            n_landmarks,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn alpha_max(&self) -> f64 {
        self.alpha_max
    }

    pub fn n_landmarks(&self) -> usize {
        self.n_landmarks
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// Simplices present at relaxation `alpha`.
    pub fn at(&self, alpha: f64) -> impl Iterator<Item = &FilteredSimplex> {
        self.simplices.iter().filter(move |s| s.appearance <= alpha)
    }

    /// Checks face closure, monotonicity, uniqueness, range and order.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_max > 0.0 && self.alpha_max.is_finite()) {
            return Err(Error::Internal(format!(
                "alpha_max must be positive and finite, got {}",
                self.alpha_max
            )));
        }
        let mut times: HashMap<Simplex, f64> = HashMap::with_capacity(self.simplices.len());
        for s in &self.simplices {
            if !(0.0..=self.alpha_max).contains(&s.appearance) {
                return Err(Error::Internal(format!(
                    "{:?} appears at {} outside [0, {}]",
                    s.simplex, s.appearance, self.alpha_max
                )));
            }
            if s.simplex.vertices().iter().any(|&v| v as usize >= self.n_landmarks) {
                return Err(Error::Internal(format!(
                    "{:?} references a vertex beyond {} landmarks",
                    s.simplex, self.n_landmarks
                )));
            }
            if times.insert(s.simplex, s.appearance).is_some() {
                return Err(Error::Internal(format!("duplicate simplex {:?}", s.simplex)));
            }
        }
        for s in &self.simplices {
            for face in s.simplex.facets() {
                match times.get(&face) {
                    None => {
                        return Err(Error::Internal(format!(
                            "{:?} is missing its face {face:?}",
                            s.simplex
                        )))
                    }
                    Some(&t) if t > s.appearance => {
                        return Err(Error::Internal(format!(
                            "{:?} at {} precedes its face {face:?} at {t}",
                            s.simplex, s.appearance
                        )))
                    }
                    _ => {}
                }
            }
        }
        if self
            .simplices
            .windows(2)
            .any(|w| w[0].filtration_cmp(&w[1]) == Ordering::Greater)
        {
            return Err(Error::Internal("simplices are not in filtration order".into()));
        }
        Ok(())
    }
}

/// Dense triangle storage while `C(L₀, 3)` stays moderate, hashed otherwise.
enum TriangleTable {
    Dense(Vec<f64>),
    Sparse(HashMap<(u32, u32, u32), f64>),
}

const DENSE_TRIANGLE_LIMIT: usize = 1 << 23;

#[inline]
fn binom2(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

#[inline]
fn binom3(n: usize) -> usize {
    n * n.saturating_sub(1) * n.saturating_sub(2) / 6
}

#[inline]
fn triangle_index(a: usize, b: usize, c: usize) -> usize {
    binom3(c) + binom2(b) + a
}

/// Minimum raw appearance per candidate simplex, indexed by landmark.
struct AppearanceTable {
    n: usize,
    vertex: Vec<f64>,
    edge: Vec<f64>,
    triangle: TriangleTable,
}

impl AppearanceTable {
    fn new(n: usize) -> Self {
        let triangle = if binom3(n) <= DENSE_TRIANGLE_LIMIT {
            TriangleTable::Dense(vec![f64::INFINITY; binom3(n)])
        } else {
            TriangleTable::Sparse(HashMap::new())
        };
        Self {
            n,
            vertex: vec![f64::INFINITY; n],
            edge: vec![f64::INFINITY; n * n],
            triangle,
        }
    }

    #[inline]
    fn offer_vertex(&mut self, a: usize, alpha: f64) {
        let slot = &mut self.vertex[a];
        *slot = slot.min(alpha);
    }

    #[inline]
    fn offer_edge(&mut self, a: usize, b: usize, alpha: f64) {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let slot = &mut self.edge[a * self.n + b];
        *slot = slot.min(alpha);
    }

    #[inline]
    fn offer_triangle(&mut self, a: usize, b: usize, c: usize, alpha: f64) {
        let mut v = [a, b, c];
        v.sort_unstable();
        match &mut self.triangle {
            TriangleTable::Dense(t) => {
                let slot = &mut t[triangle_index(v[0], v[1], v[2])];
                *slot = slot.min(alpha);
            }
            TriangleTable::Sparse(m) => {
                let slot = m
                    .entry((v[0] as u32, v[1] as u32, v[2] as u32))
                    .or_insert(f64::INFINITY);
                *slot = slot.min(alpha);
            }
        }
    }

    /// Applies monotone lifting and keeps everything at or below `alpha_max`.
    fn into_simplices(self, alpha_max: f64) -> Vec<FilteredSimplex> {
        let n = self.n;
        let mut out = Vec::new();
        let vertex: Vec<f64> = self.vertex;
        for (a, &t) in vertex.iter().enumerate() {
            if t <= alpha_max {
                out.push(FilteredSimplex {
                    simplex: Simplex::vertex(a as u32),
                    appearance: t,
                });
            }
        }
        let mut edge = vec![f64::INFINITY; n * n];
        for a in 0..n {
            if vertex[a] > alpha_max {
                continue;
            }
            for b in a + 1..n {
                let raw = self.edge[a * n + b];
                if raw > alpha_max {
                    continue;
                }
                let t = raw.max(vertex[a]).max(vertex[b]);
                if t <= alpha_max {
                    edge[a * n + b] = t;
                    out.push(FilteredSimplex {
                        simplex: Simplex::edge(a as u32, b as u32),
                        appearance: t,
                    });
                }
            }
        }
        let mut lift = |a: usize, b: usize, c: usize, raw: f64| {
            if raw > alpha_max {
                return;
            }
            let t = raw
                .max(edge[a * n + b])
                .max(edge[a * n + c])
                .max(edge[b * n + c]);
            if t <= alpha_max {
                out.push(FilteredSimplex {
                    simplex: Simplex::triangle(a as u32, b as u32, c as u32),
                    appearance: t,
                });
            }
        };
        match self.triangle {
            TriangleTable::Dense(t) => {
                for c in 2..n {
                    for b in 1..c {
                        let base = binom3(c) + binom2(b);
                        for a in 0..b {
                            lift(a, b, c, t[base + a]);
                        }
                    }
                }
            }
            TriangleTable::Sparse(m) => {
                for ((a, b, c), raw) in m {
                    lift(a as usize, b as usize, c as usize, raw);
                }
            }
        }
        out.sort_by(FilteredSimplex::filtration_cmp);
        out
    }
}

/// Builds the relaxed witness filtration up to `alpha_max`, simplices of
/// dimension at most `max_dim` (which must be 2).
///
/// Every column of `d` is a witness. For each witness only the landmarks
/// within `alpha_max` of its `(k+1)`-th nearest squared distance can appear
/// in a `k`-vertex simplex it witnesses, so candidates are enumerated from
/// that sorted prefix.
pub fn build_witness_filtration(
    d: &DistanceMatrix,
    alpha_max: f64,
    max_dim: usize,
) -> Result<WitnessFiltration> {
    if !(alpha_max > 0.0 && alpha_max.is_finite()) {
        return Err(Error::param(format!(
            "alpha_max must be positive and finite, got {alpha_max}"
        )));
    }
    if max_dim != 2 {
        return Err(Error::param(format!(
            "only max_dim = 2 is supported, got {max_dim}"
        )));
    }
    let n_land = d.n_landmarks();
    if n_land == 0 {
        return Err(Error::param("landmark set is empty"));
    }
    if n_land > u32::MAX as usize {
        return Err(Error::param("too many landmarks"));
    }

    let mut table = AppearanceTable::new(n_land);
    let mut sq = vec![0.0f64; n_land];
    let mut prefix: Vec<(f64, usize)> = Vec::with_capacity(n_land);

    for w in 0..d.n_witnesses() {
        for (l, s) in sq.iter_mut().enumerate() {
            let x = d.get(l, w);
            *s = x * x;
        }
        // Fourth-smallest squared distance bounds every useful candidate.
        let mut smallest = [f64::INFINITY; 4];
        for &s in &sq {
            if s < smallest[3] {
                let mut k = 3;
                while k > 0 && smallest[k - 1] > s {
                    smallest[k] = smallest[k - 1];
                    k -= 1;
                }
                smallest[k] = s;
            }
        }
        let cutoff = smallest[3] + alpha_max;
        prefix.clear();
        prefix.extend(
            sq.iter()
                .enumerate()
                .filter(|(_, &s)| s <= cutoff)
                .map(|(l, &s)| (s, l)),
        );
        prefix.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        witness_candidates(&prefix, n_land, alpha_max, &mut table);
    }

    let simplices = table.into_simplices(alpha_max);
    Ok(WitnessFiltration {
        simplices,
        alpha_max,
        n_landmarks: n_land,
    })
}

/// Offers every simplex one witness can see, given its sorted nearest
/// landmarks `prefix` (a true prefix of the full sorted order).
fn witness_candidates(
    prefix: &[(f64, usize)],
    n_land: usize,
    alpha_max: f64,
    table: &mut AppearanceTable,
) {
    let m = prefix.len();
    // Smallest squared distance outside a set, addressed by the first sorted
    // position the set does not cover.
    let outside = |g: usize| -> f64 {
        if g < m {
            prefix[g].0
        } else if g < n_land {
            // Unreachable for the positions used below: the prefix always
            // holds at least min(4, n_land) entries.
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    };
    let relax = |top: usize, g: usize| -> f64 { (prefix[top].0 - outside(g)).max(0.0) };

    for (p, &(_, vertex)) in prefix[..m].iter().enumerate() {
        let alpha = relax(p, if p == 0 { 1 } else { 0 });
        if alpha > alpha_max {
            break;
        }
        table.offer_vertex(vertex, alpha);
    }

    for q in 1..m {
        if q >= 3 && relax(q, 2) > alpha_max {
            break;
        }
        for p in 0..q {
            let g = match (p, q) {
                (0, 1) => 2,
                (0, _) => 1,
                _ => 0,
            };
            let alpha = relax(q, g);
            if alpha <= alpha_max {
                table.offer_edge(prefix[p].1, prefix[q].1, alpha);
            }
        }
    }

    for r in 2..m {
        if r >= 3 && relax(r, 3) > alpha_max {
            break;
        }
        for q in 1..r {
            for p in 0..q {
                let g = match (p, q, r) {
                    (0, 1, 2) => 3,
                    (0, 1, _) => 2,
                    (0, _, _) => 1,
                    _ => 0,
                };
                let alpha = relax(r, g);
                if alpha <= alpha_max {
                    table.offer_triangle(prefix[p].1, prefix[q].1, prefix[r].1, alpha);
                }
            }
        }
    }
}
