//! One-dimensional clique filtrations of the complete graph and their
//! staircase boundary matrices.
//!
//! An [`EdgeOrder`] ranks all `C(n,2)` edges. A triangle enters the clique
//! filtration together with its last edge, so its *entry time* is the largest
//! rank among its three edges. Sorting the triangles by entry time makes the
//! boundary matrix staircase shaped: the pivot of every column is its entry
//! time. Triangles sharing an entry time form a *tie class* whose internal
//! order is chosen by a [`TiePolicy`].

use crate::error::{Error, Result};
use crate::z2core::{Row, SparseColumn, StaircaseMatrix};

pub type Vertex = u32;
pub type Edge = (Vertex, Vertex);
/// Vertices in strictly increasing order.
pub type Triangle = [Vertex; 3];

pub fn n_edges(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

pub fn n_triangles(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2) / 6
    }
}

/// A total order on the edges of the complete graph on `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrder {
    n: usize,
    edges: Vec<Edge>,
    rank: Vec<u32>,
}

impl EdgeOrder {
    /// Validates that `edges` lists every `u < v` pair exactly once.
    pub fn new(n: usize, edges: Vec<Edge>) -> Result<Self> {
        if edges.len() != n_edges(n) {
            return Err(Error::Validation(format!(
                "expected {} edges for n={n}, got {}",
                n_edges(n),
                edges.len()
            )));
        }
        let mut rank = vec![u32::MAX; n * n];
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u >= v || v as usize >= n {
                return Err(Error::Validation(format!(
                    "edge {i} ({u},{v}) is not a pair u<v of vertices below {n}"
                )));
            }
            let slot = &mut rank[u as usize * n + v as usize];
            if *slot != u32::MAX {
                return Err(Error::Validation(format!("duplicate edge ({u},{v})")));
            }
            *slot = i as u32;
            rank[v as usize * n + u as usize] = i as u32;
        }
        Ok(EdgeOrder { n, edges, rank })
    }

    /// Edges in lexicographic order `(0,1), (0,2), ..., (n-2,n-1)`.
    pub fn lexicographic(n: usize) -> Self {
        Self::new(n, lex_edges(n)).expect("lexicographic order is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of edges, `C(n,2)`.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, rank: usize) -> Edge {
        self.edges[rank]
    }

    /// Rank of the edge `{u, v}`; endpoint order does not matter.
    pub fn rank(&self, u: Vertex, v: Vertex) -> u32 {
        debug_assert!(u != v);
        self.rank[u as usize * self.n + v as usize]
    }

    /// Sorted ranks of the three edges of `t`.
    pub fn triangle_rows(&self, t: Triangle) -> [Row; 3] {
        let [a, b, c] = t;
        let mut r = [self.rank(a, b), self.rank(a, c), self.rank(b, c)];
        r.sort_unstable();
        r
    }

    pub fn entry_time(&self, t: Triangle) -> Row {
        self.triangle_rows(t)[2]
    }
}

pub fn lex_edges(n: usize) -> Vec<Edge> {
    let n = n as Vertex;
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

pub fn all_triangles(n: usize) -> Vec<Triangle> {
    let n = n as Vertex;
    let mut out = Vec::with_capacity(n_triangles(n as usize));
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                out.push([a, b, c]);
            }
        }
    }
    out
}

/// How to order triangles that share an entry time.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TiePolicy {
    /// Within a tie class, ascending by the rank of the middle edge, then of
    /// the smallest edge.
    #[default]
    LexByOtherEdges,
    /// The full column sequence, given explicitly. Must list every triangle
    /// once with non-decreasing entry times.
    Explicit(Vec<Triangle>),
}

/// Triangles in column order with their entry times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnOrder {
    triangles: Vec<Triangle>,
    entry_times: Vec<Row>,
}

impl ColumnOrder {
    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn entry_times(&self) -> &[Row] {
        &self.entry_times
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

pub fn build_columns(e: &EdgeOrder, policy: &TiePolicy) -> Result<ColumnOrder> {
    match policy {
        TiePolicy::LexByOtherEdges => {
            let mut keyed: Vec<([Row; 3], Triangle)> = all_triangles(e.n())
                .into_iter()
                .map(|t| (e.triangle_rows(t), t))
                .collect();
            keyed.sort_unstable_by_key(|&([lo, mid, hi], _)| (hi, mid, lo));
            let entry_times = keyed.iter().map(|(r, _)| r[2]).collect();
            let triangles = keyed.into_iter().map(|(_, t)| t).collect();
            Ok(ColumnOrder {
                triangles,
                entry_times,
            })
        }
        TiePolicy::Explicit(seq) => explicit_columns(e, seq),
    }
}

fn explicit_columns(e: &EdgeOrder, seq: &[Triangle]) -> Result<ColumnOrder> {
    let n = e.n();
    if seq.len() != n_triangles(n) {
        return Err(Error::BadPolicy(format!(
            "explicit order lists {} triangles, expected {}",
            seq.len(),
            n_triangles(n)
        )));
    }
    let mut seen = vec![false; n * n * n];
    let mut entry_times = Vec::with_capacity(seq.len());
    for (j, &t) in seq.iter().enumerate() {
        let [a, b, c] = t;
        if !(a < b && b < c && (c as usize) < n) {
            return Err(Error::BadPolicy(format!("column {j}: {t:?} is not a triangle on {n} vertices")));
        }
        let key = (a as usize * n + b as usize) * n + c as usize;
        if std::mem::replace(&mut seen[key], true) {
            return Err(Error::BadPolicy(format!("column {j}: triangle {t:?} listed twice")));
        }
        let et = e.entry_time(t);
        if let Some(&prev) = entry_times.last() {
            if et < prev {
                return Err(Error::BadPolicy(format!(
                    "column {j}: entry time {et} after {prev}; ties may only be reordered within their class"
                )));
            }
        }
        entry_times.push(et);
    }
    Ok(ColumnOrder {
        triangles: seq.to_vec(),
        entry_times,
    })
}

/// An edge order together with a compatible column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    edge_order: EdgeOrder,
    column_order: ColumnOrder,
}

impl Filtration {
    pub fn new(edge_order: EdgeOrder, policy: &TiePolicy) -> Result<Self> {
        let column_order = build_columns(&edge_order, policy)?;
        Ok(Filtration {
            edge_order,
            column_order,
        })
    }

    /// Filtration with the default tie policy.
    pub fn with_default_ties(edge_order: EdgeOrder) -> Self {
        Self::new(edge_order, &TiePolicy::LexByOtherEdges).expect("default tie policy never fails")
    }

    /// Assembles a filtration from an explicit column sequence, reporting
    /// inconsistencies as validation errors.
    pub fn from_parts(edge_order: EdgeOrder, triangles: Vec<Triangle>) -> Result<Self> {
        let column_order = explicit_columns(&edge_order, &triangles).map_err(|e| match e {
            Error::BadPolicy(msg) => Error::Validation(msg),
            other => other,
        })?;
        Ok(Filtration {
            edge_order,
            column_order,
        })
    }

    pub fn edge_order(&self) -> &EdgeOrder {
        &self.edge_order
    }

    pub fn column_order(&self) -> &ColumnOrder {
        &self.column_order
    }

    pub fn n(&self) -> usize {
        self.edge_order.n()
    }

    /// Recomputes entry times from the edge ranks and checks them against
    /// the stored column order.
    pub fn is_consistent(&self) -> bool {
        let co = &self.column_order;
        co.triangles.len() == n_triangles(self.n())
            && co
                .triangles
                .iter()
                .zip(&co.entry_times)
                .all(|(&t, &et)| self.edge_order.entry_time(t) == et)
            && co.entry_times.windows(2).all(|w| w[0] <= w[1])
    }
}

/// The degree-one boundary matrix: rows are edges by rank, columns are
/// triangles in column order.
pub fn boundary_matrix(f: &Filtration) -> StaircaseMatrix {
    let e = f.edge_order();
    let cols = f
        .column_order()
        .triangles()
        .iter()
        .map(|&t| SparseColumn::new(e.triangle_rows(t).to_vec()).expect("distinct edge ranks"))
        .collect();
    let m = StaircaseMatrix::unchecked(e.m(), cols);
    debug_assert!(m.is_staircase());
    m
}
