use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::parse_error;
use crate::linalg::{dense_cap, DenseHermitian};
use crate::{Error, Result};

/// Undirected regular graph given by sorted neighbor lists. A self-loop
/// appears once in its vertex's list and counts once toward the degree.
pub trait AdjacencyOracle: Send + Sync {
    fn vertex_count(&self) -> usize;
    fn degree(&self) -> usize;
    fn neighbors(&self, v: usize) -> Vec<usize>;
}

impl<T: AdjacencyOracle + ?Sized> AdjacencyOracle for Arc<T> {
    fn vertex_count(&self) -> usize {
        (**self).vertex_count()
    }
    fn degree(&self) -> usize {
        (**self).degree()
    }
    fn neighbors(&self, v: usize) -> Vec<usize> {
        (**self).neighbors(v)
    }
}

/// Checks sorted unique in-range neighbor lists, symmetry and regularity.
pub fn check_graph(g: &dyn AdjacencyOracle) -> Result<()> {
    let n = g.vertex_count();
    for v in 0..n {
        let nb = g.neighbors(v);
        if nb.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::MalformedRow {
                row: v,
                reason: "neighbor list is not sorted and unique".into(),
            });
        }
        if let Some(&u) = nb.iter().find(|&&u| u >= n) {
            return Err(Error::MalformedRow {
                row: v,
                reason: format!("neighbor {u} out of range"),
            });
        }
        if nb.len() != g.degree() {
            return Err(Error::NotRegular {
                vertex: v,
                expected: g.degree(),
                found: nb.len(),
            });
        }
        for &u in &nb {
            if g.neighbors(u).binary_search(&v).is_err() {
                return Err(Error::SymmetryViolation { row: v, col: u });
            }
        }
    }
    Ok(())
}

/// Dense 0/1 adjacency matrix under the active cap.
pub fn adjacency_matrix(g: &dyn AdjacencyOracle) -> Result<DenseHermitian> {
    let n = g.vertex_count();
    let cap = dense_cap();
    if n > cap {
        return Err(Error::DenseCapExceeded { dimension: n, cap });
    }
    let mut m = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        for u in g.neighbors(v) {
            m[(v, u)] = 1.0;
        }
    }
    DenseHermitian::from_real(m)
}

/// Explicit regular graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    degree: usize,
    adjacency: Vec<Vec<usize>>,
}

impl AdjacencyOracle for Graph {
    fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adjacency[v].clone()
    }
}

impl Graph {
    /// Validates and wraps neighbor lists (each is sorted here).
    pub fn new(degree: usize, mut adjacency: Vec<Vec<usize>>) -> Result<Self> {
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        let g = Self { degree, adjacency };
        check_graph(&g)?;
        Ok(g)
    }

    pub fn from_edges(n: usize, degree: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParameter(format!("edge ({u}, {v}) out of range")));
            }
            adjacency[u].push(v);
            if u != v {
                adjacency[v].push(u);
            }
        }
        Self::new(degree, adjacency)
    }

    /// Copies any oracle into an explicit graph.
    pub fn from_oracle(g: &dyn AdjacencyOracle) -> Result<Self> {
        Self::new(g.degree(), (0..g.vertex_count()).map(|v| g.neighbors(v)).collect())
    }

    pub fn complete(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("complete graph needs n ≥ 1".into()));
        }
        Self::new(n - 1, (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect())
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter("cycle needs n ≥ 3".into()));
        }
        Self::new(2, (0..n).map(|v| vec![(v + n - 1) % n, (v + 1) % n]).collect())
    }

    /// Simple `d`-regular graph from the pairing model, retrying until the
    /// pairing has no loops or repeated edges.
    pub fn random_regular(n: usize, d: usize, seed: u64) -> Result<Self> {
        if d >= n || (n * d) % 2 == 1 {
            return Err(Error::InvalidParameter(format!(
                "no simple {d}-regular graph on {n} vertices"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        const ATTEMPTS: usize = 100_000;
        'attempt: for _ in 0..ATTEMPTS {
            points.shuffle(&mut rng);
            let mut adjacency = vec![Vec::with_capacity(d); n];
            for pair in points.chunks(2) {
                let (u, v) = (pair[0], pair[1]);
                if u == v || adjacency[u].contains(&v) {
                    continue 'attempt;
                }
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
            return Self::new(d, adjacency);
        }
        Err(Error::BudgetInfeasible(format!(
            "pairing model found no simple {d}-regular graph on {n} vertices in {ATTEMPTS} attempts"
        )))
    }

    /// `graph <N> <degree>` then `u: v1 v2 …` per vertex.
    pub fn to_text(&self) -> String {
        let mut out = format!("graph {} {}\n", self.adjacency.len(), self.degree);
        for (u, nb) in self.adjacency.iter().enumerate() {
            let list: Vec<String> = nb.iter().map(usize::to_string).collect();
            writeln!(out, "{u}: {}", list.join(" ")).expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| parse_error(1, "missing `graph <N> <degree>` header"))?;
        let (n, degree) = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["graph", n, d] => (
                n.parse::<usize>()
                    .map_err(|e| parse_error(line_no, format!("bad vertex count: {e}")))?,
                d.parse::<usize>()
                    .map_err(|e| parse_error(line_no, format!("bad degree: {e}")))?,
            ),
            _ => return Err(parse_error(line_no, "expected `graph <N> <degree>`")),
        };
        let mut adjacency: Vec<Option<Vec<usize>>> = vec![None; n];
        for (line_no, line) in lines {
            let (head, tail) = line
                .split_once(':')
                .ok_or_else(|| parse_error(line_no, "expected `u: v1 v2 …`"))?;
            let u: usize = head
                .trim()
                .parse()
                .map_err(|e| parse_error(line_no, format!("bad vertex: {e}")))?;
            if u >= n {
                return Err(parse_error(line_no, format!("vertex {u} out of range")));
            }
            if adjacency[u].is_some() {
                return Err(parse_error(line_no, format!("vertex {u} listed twice")));
            }
            let nb = tail
                .split_whitespace()
                .map(|s| s.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_error(line_no, format!("bad neighbor: {e}")))?;
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_error(line_no, "neighbors must be sorted and unique"));
            }
            adjacency[u] = Some(nb);
        }
        Self::new(degree, adjacency.into_iter().map(Option::unwrap_or_default).collect())
    }
}

/// A vertex permutation `v ↦ images[v]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidParameter("images do not form a permutation".into()));
            }
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Swaps `q` and `r`, fixing everything else.
    pub fn transposition(n: usize, q: usize, r: usize) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        if q >= n || r >= n {
            return Err(Error::InvalidParameter(format!("({q} {r}) out of range")));
        }
        images.swap(q, r);
        Ok(Self { images })
    }

    /// `2j ↔ 2j + 1` for every `j`; `n` must be even.
    pub fn pairing(n: usize) -> Result<Self> {
        if n % 2 == 1 {
            return Err(Error::InvalidParameter("pairing needs an even vertex count".into()));
        }
        Ok(Self {
            images: (0..n).map(|v| v ^ 1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.images[v]
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.images.len()];
        for (v, &i) in self.images.iter().enumerate() {
            images[i] = v;
        }
        Self { images }
    }

    /// True when `N(π(v)) = π(N(v))` for every vertex.
    pub fn is_automorphism_of(&self, g: &dyn AdjacencyOracle) -> bool {
        if self.images.len() != g.vertex_count() {
            return false;
        }
        (0..g.vertex_count()).all(|v| {
            let mut mapped: Vec<usize> = g.neighbors(v).into_iter().map(|u| self.images[u]).collect();
            mapped.sort_unstable();
            mapped == g.neighbors(self.images[v])
        })
    }

    /// `perm <N>` then one image per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("perm {}\n", self.images.len());
        for i in &self.images {
            writeln!(out, "{i}").expect("writing to a String");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| parse_error(1, "missing `perm <N>` header"))?;
        let n = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["perm", n] => n
                .parse::<usize>()
                .map_err(|e| parse_error(line_no, format!("bad size: {e}")))?,
            _ => return Err(parse_error(line_no, "expected `perm <N>`")),
        };
        let mut images = Vec::with_capacity(n);
        for (line_no, line) in lines {
            images.push(
                line.parse::<usize>()
                    .map_err(|e| parse_error(line_no, format!("bad image: {e}")))?,
            );
        }
        if images.len() != n {
            return Err(parse_error(
                text.lines().count(),
                format!("expected {n} images, found {}", images.len()),
            ));
        }
        Self::new(images)
    }
}

/// The graph with vertex `v` renamed `perm(v)`.
pub fn relabel(g: &dyn AdjacencyOracle, perm: &Permutation) -> Result<Graph> {
    let n = g.vertex_count();
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let mut adjacency = vec![Vec::new(); n];
    for v in 0..n {
        adjacency[perm.apply(v)] = g.neighbors(v).into_iter().map(|u| perm.apply(u)).collect();
    }
    Graph::new(g.degree(), adjacency)
}

/// Returns `supplied` if it is an automorphism of `g` exchanging `q` and
/// `r`. Without a candidate, the pairing `v ↔ v ⊕ 1` (when `r = q ⊕ 1`) and
/// the transposition `(q r)` are tried in that order.
pub fn find_exchanging_automorphism(
    g: &dyn AdjacencyOracle,
    q: usize,
    r: usize,
    supplied: Option<&Permutation>,
) -> Result<Permutation> {
    let n = g.vertex_count();
    let candidates = match supplied {
        Some(p) => vec![p.clone()],
        None => {
            let mut c = Vec::new();
            if q ^ 1 == r {
                if let Ok(p) = Permutation::pairing(n) {
                    c.push(p);
                }
            }
            if let Ok(p) = Permutation::transposition(n, q, r) {
                c.push(p);
            }
            c
        }
    };
    candidates
        .into_iter()
        .find(|p| p.len() == n && p.apply(q) == r && p.apply(r) == q && p.is_automorphism_of(g))
        .ok_or(Error::MissingAutomorphism { q, r })
}
