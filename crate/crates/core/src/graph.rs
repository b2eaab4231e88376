//! Simple graphs, bond indexing, generators and non-backtracking walks.
//!
//! Bonds are numbered edge by edge in sorted edge order: edge `e = (i, j)`
//! with `i < j` owns bond `2e = [i, j]` and bond `2e + 1 = [j, i]`, so the
//! reversal is `b ^ 1` and the edge is `b / 2`.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{linalg, Error, Result};

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list in any order or orientation.
    ///
    /// Rejects loops, repeated edges and out-of-range endpoints.
    pub fn from_edges(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::param("a graph needs at least one vertex"));
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::param(format!(
                    "edge ({a}, {b}) references a vertex outside 0..{vertex_count}"
                )));
            }
            if a == b {
                return Err(Error::param(format!("loop at vertex {a}")));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(Error::param(format!("repeated edge ({a}, {b})")));
            }
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut neighbors = vec![Vec::new(); vertex_count];
        for &(a, b) in &edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Graph { vertex_count, edges, neighbors })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbours of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.neighbors.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.vertex_count && self.neighbors[a].binary_search(&b).is_ok()
    }

    /// Index of the edge joining `a` and `b` in [`Graph::edges`].
    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    /// The common degree, if every vertex has the same one.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        self.neighbors.iter().all(|l| l.len() == d).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.vertex_count
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> Mat<f64> {
        let mut a = Mat::<f64>::zeros(self.vertex_count, self.vertex_count);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }
}

/// Oriented edges of a graph with the reversal map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondIndex {
    bonds: Vec<(usize, usize)>,
    // out_bonds[v][p]: the bond leaving v towards its p-th neighbour
    out_bonds: Vec<Vec<usize>>,
    // port[b]: position of the terminus of b among the neighbours of its origin
    port: Vec<usize>,
}

impl BondIndex {
    pub fn new(graph: &Graph) -> Self {
        let mut bonds = Vec::with_capacity(2 * graph.edge_count());
        for &(i, j) in graph.edges() {
            bonds.push((i, j));
            bonds.push((j, i));
        }
        let mut out_bonds: Vec<Vec<usize>> =
            (0..graph.vertex_count()).map(|v| vec![0; graph.degree(v)]).collect();
        let mut port = vec![0; bonds.len()];
        for (b, &(i, j)) in bonds.iter().enumerate() {
            let p = graph.neighbors(i).binary_search(&j).expect("bond endpoints are adjacent");
            out_bonds[i][p] = b;
            port[b] = p;
        }
        BondIndex { bonds, out_bonds, port }
    }

    /// Number of bonds `B = 2|E|`.
    pub fn len(&self) -> usize {
        self.bonds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty()
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    /// `[origin, terminus]` of bond `b`.
    pub fn bond(&self, b: usize) -> (usize, usize) {
        self.bonds[b]
    }

    pub fn origin(&self, b: usize) -> usize {
        self.bonds[b].0
    }

    pub fn terminus(&self, b: usize) -> usize {
        self.bonds[b].1
    }

    #[inline]
    pub fn reverse(&self, b: usize) -> usize {
        b ^ 1
    }

    #[inline]
    pub fn edge_of(&self, b: usize) -> usize {
        b / 2
    }

    /// Position of `terminus(b)` in the sorted neighbour list of `origin(b)`.
    pub fn port(&self, b: usize) -> usize {
        self.port[b]
    }

    /// Bonds leaving `v`, ordered like the neighbours of `v`.
    pub fn outgoing(&self, v: usize) -> &[usize] {
        &self.out_bonds[v]
    }

    /// Bond `[i, j]`, if the edge exists.
    pub fn find(&self, i: usize, j: usize) -> Option<usize> {
        let list = self.out_bonds.get(i)?;
        list.iter().copied().find(|&b| self.bonds[b].1 == j)
    }

    /// Bonds `b'` with `b -> b'` allowed: `b'` starts where `b` ends and `b' != rev(b)`.
    pub fn nonbacktracking_successors(&self, b: usize) -> impl Iterator<Item = usize> + '_ {
        let rev = self.reverse(b);
        self.out_bonds[self.terminus(b)].iter().copied().filter(move |&s| s != rev)
    }
}

/// Positive per-edge lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeLengths {
    lengths: Vec<f64>,
}

impl EdgeLengths {
    pub fn new(lengths: Vec<f64>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::param("at least one edge length is required"));
        }
        if let Some((e, &l)) = lengths.iter().enumerate().find(|(_, l)| !(l.is_finite() && **l > 0.0)) {
            return Err(Error::param(format!("edge {e} has non-positive length {l}")));
        }
        Ok(EdgeLengths { lengths })
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.lengths
    }

    pub fn get(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    /// `L_tot`.
    pub fn total(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// `L̄ = L_tot / |E|`.
    pub fn mean(&self) -> f64 {
        self.total() / self.lengths.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.lengths.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Relative spread `ΔL = (L_max - L_min) / L̄`.
    pub fn relative_spread(&self) -> f64 {
        (self.max() - self.min()) / self.mean()
    }

    /// Length of every bond, `L_b = L_{edge(b)}`.
    pub fn bond_lengths(&self) -> Vec<f64> {
        self.lengths.iter().flat_map(|&l| [l, l]).collect()
    }
}

/// Distribution of i.i.d. edge lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthDistribution {
    Uniform { lo: f64, hi: f64 },
}

impl LengthDistribution {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let d = LengthDistribution::Uniform { lo, hi };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            LengthDistribution::Uniform { lo, hi } => {
                if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi <= lo {
                    return Err(Error::param(format!(
                        "uniform lengths need 0 < lo < hi, got lo = {lo}, hi = {hi}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Lower cut-off `δ` with `P(L < δ) = 0`.
    pub fn delta(&self) -> f64 {
        match *self {
            LengthDistribution::Uniform { lo, .. } => lo,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            LengthDistribution::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
        }
    }

    /// `|E e^{ikL}|`.
    pub fn char_fn_modulus(&self, k: f64) -> f64 {
        match *self {
            LengthDistribution::Uniform { lo, hi } => {
                let x = k * (hi - lo);
                if x.abs() < 1e-12 {
                    1.0
                } else {
                    (2.0 * libm::sin(x / 2.0) / x).abs()
                }
            }
        }
    }

    /// Monotone envelope `f(k) >= |E e^{ikL}|`.
    pub fn envelope(&self, k: f64) -> f64 {
        match *self {
            LengthDistribution::Uniform { lo, hi } => {
                let x = k.abs() * (hi - lo);
                if x <= 2.0 {
                    1.0
                } else {
                    2.0 / x
                }
            }
        }
    }
}

/// Draws `edge_count` i.i.d. lengths, deterministic in `seed`.
pub fn sample_lengths(
    edge_count: usize,
    distribution: LengthDistribution,
    seed: u64,
) -> Result<EdgeLengths> {
    distribution.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    EdgeLengths::new((0..edge_count).map(|_| distribution.sample(&mut rng)).collect())
}

/// Restart budget of [`random_regular_graph`].
pub const MAX_GENERATION_ATTEMPTS: usize = 10_000;

/// Uniformly paired random `d`-regular simple connected graph.
///
/// Points are paired one random pair at a time; a pair that would form a
/// loop or a repeated edge is redrawn, and the whole pairing restarts when
/// no admissible pair is left or the result is disconnected.
pub fn random_regular_graph(n: usize, d: usize, seed: u64) -> Result<Graph> {
    if d == 0 || d >= n {
        return Err(Error::param(format!("need 1 <= d < n, got n = {n}, d = {d}")));
    }
    if (n * d) % 2 == 1 {
        return Err(Error::param(format!("n·d must be even, got n = {n}, d = {d}")));
    }
    if d == 1 && n != 2 {
        return Err(Error::param("a connected 1-regular graph has exactly two vertices"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        if let Some(edges) = try_pairing(n, d, &mut rng) {
            let edges: Vec<(usize, usize)> = edges.into_iter().collect();
            let g = Graph::from_edges(n, &edges)?;
            if g.is_connected() {
                return Ok(g);
            }
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_GENERATION_ATTEMPTS })
}

fn try_pairing(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Option<BTreeSet<(usize, usize)>> {
    let mut points: Vec<usize> = (0..n * d).map(|p| p / d).collect();
    let mut edges = BTreeSet::new();
    let mut misses = 0usize;
    while !points.is_empty() {
        let r = points.len();
        let i = rng.random_range(0..r);
        let mut j = rng.random_range(0..r - 1);
        if j >= i {
            j += 1;
        }
        let (u, v) = (points[i], points[j]);
        let key = (u.min(v), u.max(v));
        if u != v && !edges.contains(&key) {
            edges.insert(key);
            let (hi, lo) = (i.max(j), i.min(j));
            points.swap_remove(hi);
            points.swap_remove(lo);
            misses = 0;
            continue;
        }
        misses += 1;
        if misses > 8 * r + 16 {
            let admissible = (0..r).any(|a| {
                (a + 1..r).any(|b| {
                    let (u, v) = (points[a], points[b]);
                    u != v && !edges.contains(&(u.min(v), u.max(v)))
                })
            });
            if !admissible {
                return None;
            }
            misses = 0;
        }
    }
    Some(edges)
}

/// Star with centre `0` and leaves `1..=edge_count`.
pub fn star_graph(edge_count: usize) -> Result<Graph> {
    if edge_count == 0 {
        return Err(Error::param("a star needs at least one edge"));
    }
    let edges: Vec<(usize, usize)> = (1..=edge_count).map(|i| (0, i)).collect();
    Graph::from_edges(edge_count + 1, &edges)
}

pub fn cycle_graph(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::param("a cycle needs at least three vertices"));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::from_edges(n, &edges)
}

pub fn complete_graph(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("a complete graph needs at least two vertices"));
    }
    let edges: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    Graph::from_edges(n, &edges)
}

/// Length of the shortest cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }
}

/// Girth by breadth-first search from every vertex.
pub fn girth(g: &Graph) -> Girth {
    let n = g.vertex_count();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    for root in 0..n {
        dist.iter_mut().for_each(|x| *x = usize::MAX);
        dist[root] = 0;
        parent[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for &w in g.neighbors(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u;
                    queue.push_back(w);
                } else if parent[u] != w && parent[w] != u {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    if best == usize::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    }
}

/// Second largest eigenvalue modulus of `A/d` for a `d`-regular graph.
///
/// One copy of the eigenvalue `1` is removed; the rest is maximised in
/// modulus. Bipartite graphs give `1`.
pub fn adjacency_spectral_gap(g: &Graph, d: usize) -> Result<f64> {
    if g.regular_degree() != Some(d) || d == 0 {
        return Err(Error::param(format!("graph is not {d}-regular")));
    }
    let mut a = g.adjacency_matrix();
    let scale = 1.0 / d as f64;
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            a[(i, j)] *= scale;
        }
    }
    let mut eig = linalg::symmetric_eigenvalues(a.as_ref())?;
    // the top eigenvalue is 1 for a regular graph; drop exactly one copy
    eig.pop();
    Ok(eig.iter().fold(0.0f64, |m, x| m.max(x.abs())).min(1.0))
}

/// `N_t(b, b2)`: non-backtracking walks from `b2` to `b` with `t` transitions.
pub fn count_nonbacktracking_paths(bonds: &BondIndex, b: usize, b2: usize, t: usize) -> u64 {
    nonbacktracking_counts_from(bonds, b2, t)[b]
}

/// `N_t(·, b2)` for every target bond.
pub fn nonbacktracking_counts_from(bonds: &BondIndex, b2: usize, t: usize) -> Vec<u64> {
    let mut cur = vec![0u64; bonds.len()];
    cur[b2] = 1;
    for _ in 0..t {
        let mut next = vec![0u64; bonds.len()];
        for (src, &c) in cur.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for s in bonds.nonbacktracking_successors(src) {
                next[s] = next[s].saturating_add(c);
            }
        }
        cur = next;
    }
    cur
}

/// Largest `N_t(b, b')` over all bond pairs.
pub fn max_nonbacktracking_count(bonds: &BondIndex, t: usize) -> u64 {
    (0..bonds.len())
        .map(|b2| nonbacktracking_counts_from(bonds, b2, t).into_iter().max().unwrap_or(0))
        .max()
        .unwrap_or(0)
}
