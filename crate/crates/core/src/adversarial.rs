//! Explicit clique filtration on `n = 5p + 1` vertices whose reduction has
//! fill-up `Θ(n⁴)` and cost `Θ(n⁷)`.
//!
//! Vertices are a `roof` plus five groups `A, B, C, D, E` of `p` vertices
//! each. Edges are split into eight blocks I–VIII that enter the filtration
//! one block after another:
//!
//! * I: stars from the roof to `A`, `B`, `E`; the paths `a_0…a_{p-1}` and
//!   `e_0…e_{p-1}`; `a_0c_0`; `b_{p-1}e_0`; the last `(p+1)/2` vertices of
//!   `E` joined to all of `D`.
//! * II: `C × D` without the matching `c_i d_i`.
//! * III: `B × C`.
//! * IV: a *cascade* along an Eulerian circuit of (`C ∪ D`, II) starting at
//!   `c_0`. The circuit's vertices are cut into `p` windows of `p` vertices,
//!   consecutive windows sharing an endpoint, and window `j` is joined to
//!   `a_j` in circuit order.
//! * V: `a_{p-1} × B`.
//! * VI: the same cascade on (`B ∪ C`, III without `b_i c_i`) from
//!   `b_{p-1}`, joined to the vertices of `E`.
//! * VII: `{b_{(p-1)/2}, …, b_{p-1}} × D`, by decreasing `B` index, then
//!   decreasing `D` index.
//! * VIII: everything else.
//!
//! Blocks I, II, III and VIII are shuffled with the seed. Inside a tie class
//! the designated step triangle is put first; the rest keep the default
//! order. Each cascade step triangle joins a cascade edge to its predecessor,
//! so reducing a column that lands on a cascade pivot walks the whole cascade
//! down and collects one II (resp. III) entry per step.

use std::collections::HashSet;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::flagfilt::{build_columns, lex_edges, Edge, EdgeOrder, Filtration, TiePolicy, Triangle, Vertex};
use crate::randmodels::Seed;
use crate::z2core::{ReductionStats, StaircaseMatrix};

/// Group size of the construction: odd and at least 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorstCaseParams {
    p: usize,
}

impl WorstCaseParams {
    pub fn new(p: usize) -> Result<Self> {
        if p < 3 || p.is_multiple_of(2) {
            return Err(Error::InvalidP(p));
        }
        Ok(WorstCaseParams { p })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        5 * self.p + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeGroup {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIII,
}

impl EdgeGroup {
    pub const ALL: [EdgeGroup; 8] = [
        EdgeGroup::I,
        EdgeGroup::II,
        EdgeGroup::III,
        EdgeGroup::IV,
        EdgeGroup::V,
        EdgeGroup::VI,
        EdgeGroup::VII,
        EdgeGroup::VIII,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            EdgeGroup::I => "I",
            EdgeGroup::II => "II",
            EdgeGroup::III => "III",
            EdgeGroup::IV => "IV",
            EdgeGroup::V => "V",
            EdgeGroup::VI => "VI",
            EdgeGroup::VII => "VII",
            EdgeGroup::VIII => "VIII",
        }
    }
}

/// Vertex numbering: roof, then `A, B, C, D, E` with `p` vertices each.
#[derive(Debug, Clone, Copy)]
struct Layout {
    p: usize,
}

impl Layout {
    const ROOF: Vertex = 0;
    fn a(&self, i: usize) -> Vertex {
        (1 + i) as Vertex
    }
    fn b(&self, i: usize) -> Vertex {
        (1 + self.p + i) as Vertex
    }
    fn c(&self, i: usize) -> Vertex {
        (1 + 2 * self.p + i) as Vertex
    }
    fn d(&self, i: usize) -> Vertex {
        (1 + 3 * self.p + i) as Vertex
    }
    fn e(&self, i: usize) -> Vertex {
        (1 + 4 * self.p + i) as Vertex
    }
}

fn edge(u: Vertex, v: Vertex) -> Edge {
    (u.min(v), u.max(v))
}

fn triangle_of(x: Edge, y: Edge) -> Option<Triangle> {
    let mut vs = vec![x.0, x.1, y.0, y.1];
    vs.sort_unstable();
    vs.dedup();
    (vs.len() == 3).then(|| [vs[0], vs[1], vs[2]])
}

/// Eulerian circuit by Hierholzer's algorithm, always leaving a vertex along
/// its smallest unused neighbour.
///
/// `adjacency[v]` lists the neighbours of `v`; each undirected edge appears in
/// both lists. Every vertex must have even degree and the edges must form a
/// single connected component containing `start`.
pub fn eulerian_path(adjacency: &[Vec<usize>], start: usize) -> Result<Vec<usize>> {
    let nv = adjacency.len();
    if start >= nv || adjacency[start].is_empty() {
        return Err(Error::NotEulerian(format!("start vertex {start} has no edges")));
    }
    let mut incident: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nv];
    let mut n_edges = 0;
    for (u, nbrs) in adjacency.iter().enumerate() {
        if nbrs.len() % 2 == 1 {
            return Err(Error::NotEulerian(format!("vertex {u} has odd degree {}", nbrs.len())));
        }
        for &v in nbrs {
            if v >= nv || v == u {
                return Err(Error::NotEulerian(format!("bad neighbour {v} of {u}")));
            }
            if u < v {
                incident[u].push((v, n_edges));
                incident[v].push((u, n_edges));
                n_edges += 1;
            }
        }
    }
    let listed: usize = adjacency.iter().map(Vec::len).sum();
    if listed != 2 * n_edges {
        return Err(Error::NotEulerian("adjacency lists are not symmetric".into()));
    }
    for inc in &mut incident {
        inc.sort_unstable();
    }

    let mut used = vec![false; n_edges];
    let mut next = vec![0usize; nv];
    let mut stack = vec![start];
    let mut circuit = Vec::with_capacity(n_edges + 1);
    while let Some(&v) = stack.last() {
        let inc = &incident[v];
        while next[v] < inc.len() && used[inc[next[v]].1] {
            next[v] += 1;
        }
        if let Some(&(w, id)) = inc.get(next[v]) {
            used[id] = true;
            stack.push(w);
        } else {
            circuit.push(v);
            stack.pop();
        }
    }
    if circuit.len() != n_edges + 1 {
        return Err(Error::NotEulerian("edges are not connected".into()));
    }
    circuit.reverse();
    Ok(circuit)
}

/// Eulerian circuit of the bipartite graph `X × Y` minus the matching
/// `x_i y_i`, starting at `x_start`, such that every cascade window
/// (positions `j(p-1) ..= (j+1)(p-1)`) visits `p` distinct vertices.
/// Vertices `0..p` are `X`, `p..2p` are `Y`.
///
/// Depth-first search over trails with backtracking. The first attempt tries
/// the smallest admissible neighbour first, so it agrees with
/// [`eulerian_path`] whenever no backtracking is needed; if it exhausts its
/// step budget, later attempts use neighbour orders shuffled by a fixed
/// stream, keeping the result a function of `p` and `x_start` alone.
fn windowed_circuit(p: usize, x_start: usize) -> Result<Vec<usize>> {
    const ATTEMPTS: u64 = 2_000;
    const BUDGET: u64 = 200_000;
    let nv = 2 * p;
    let sorted: Vec<Vec<usize>> = (0..nv)
        .map(|v| {
            if v < p {
                (0..p).filter(|&k| k != v).map(|k| p + k).collect()
            } else {
                (0..p).filter(|&k| k != v - p).collect()
            }
        })
        .collect();
    let seed = Seed::new(0x5eed_c1c0);
    for attempt in 0..ATTEMPTS {
        let mut nbrs = sorted.clone();
        if attempt > 0 {
            let mut rng = seed.rng(&format!("circuit/{p}/{x_start}"), attempt);
            for list in &mut nbrs {
                list.shuffle(&mut rng);
            }
        }
        if let Some(c) = windowed_trail_search(p, x_start, &nbrs, BUDGET) {
            return Ok(c);
        }
    }
    Err(Error::NotEulerian(format!("no window-distinct circuit found for p={p}")))
}

fn windowed_trail_search(p: usize, start: usize, nbrs: &[Vec<usize>], budget: u64) -> Option<Vec<usize>> {
    let nv = 2 * p;
    let total = p * (p - 1);
    let w = p - 1;
    let mut used = vec![false; nv * nv];
    let mut trail = vec![start];
    let mut choice = vec![0usize];
    let mut steps = 0u64;
    while trail.len() <= total {
        steps += 1;
        if steps > budget {
            return None;
        }
        let pos = trail.len();
        let v = trail[pos - 1];
        let window_start = ((pos - 1) / w) * w;
        let k = choice[pos - 1];
        let next = nbrs[v][k..]
            .iter()
            .position(|&u| !used[v * nv + u] && !trail[window_start..].contains(&u));
        match next {
            Some(off) => {
                let u = nbrs[v][k + off];
                choice[pos - 1] = k + off + 1;
                used[v * nv + u] = true;
                used[u * nv + v] = true;
                trail.push(u);
                choice.push(0);
            }
            None => {
                if pos == 1 {
                    return None;
                }
                trail.pop();
                choice.pop();
                let u = trail[pos - 2];
                used[u * nv + v] = false;
                used[v * nv + u] = false;
            }
        }
    }
    Some(trail)
}

/// Cascade edges: window `j` of the circuit (positions `j(p-1) ..= (j+1)(p-1)`)
/// joined to `hub(j)`, skipping position 0 (that edge belongs to block I).
fn cascade_edges(p: usize, circuit: &[Vertex], hub: impl Fn(usize) -> Vertex) -> Vec<Edge> {
    let mut out = Vec::with_capacity(p * p - 1);
    for j in 0..p {
        let window = &circuit[j * (p - 1)..=(j + 1) * (p - 1)];
        let skip = usize::from(j == 0);
        out.extend(window[skip..].iter().map(|&v| edge(hub(j), v)));
    }
    out
}

#[derive(Debug, Clone)]
pub struct WorstCase {
    pub params: WorstCaseParams,
    pub filtration: Filtration,
    /// Block of the edge at each rank.
    pub groups: Vec<EdgeGroup>,
    /// Designated step triangle for each pivot row, where the construction
    /// prescribes one.
    pub designated: Vec<Option<Triangle>>,
    /// The two Eulerian circuits, as vertex ids.
    pub circuit_ii: Vec<Vertex>,
    pub circuit_vi: Vec<Vertex>,
}

impl WorstCase {
    pub fn rows_in(&self, g: EdgeGroup) -> impl Iterator<Item = usize> + '_ {
        self.groups
            .iter()
            .enumerate()
            .filter(move |(_, &h)| h == g)
            .map(|(i, _)| i)
    }

    pub fn group_sizes(&self) -> [usize; 8] {
        let mut sizes = [0; 8];
        for &g in &self.groups {
            sizes[g as usize] += 1;
        }
        sizes
    }

    /// Plain-text sidecar: one `rank u v group` line per edge.
    pub fn groups_sidecar(&self) -> String {
        let e = self.filtration.edge_order();
        let mut out = format!("groups v1\np {}\nedges {}\n", self.params.p(), e.m());
        for (i, (&(u, v), g)) in e.edges().iter().zip(&self.groups).enumerate() {
            out.push_str(&format!("{i} {u} {v} {}\n", g.label()));
        }
        out
    }
}

pub fn worst_case_filtration(params: WorstCaseParams, seed: Seed) -> Result<WorstCase> {
    let p = params.p();
    let n = params.n();
    let l = Layout { p };
    let half = (p - 1) / 2;

    let mut blocks: Vec<(EdgeGroup, Vec<Edge>)> = Vec::with_capacity(8);

    let mut g1 = Vec::new();
    for i in 0..p {
        g1.push(edge(Layout::ROOF, l.a(i)));
        g1.push(edge(Layout::ROOF, l.b(i)));
        g1.push(edge(Layout::ROOF, l.e(i)));
    }
    for i in 0..p - 1 {
        g1.push(edge(l.a(i), l.a(i + 1)));
        g1.push(edge(l.e(i), l.e(i + 1)));
    }
    g1.push(edge(l.a(0), l.c(0)));
    g1.push(edge(l.b(p - 1), l.e(0)));
    for i in half..p {
        for k in 0..p {
            g1.push(edge(l.e(i), l.d(k)));
        }
    }
    g1.shuffle(&mut seed.rng("worst/I", p as u64));
    blocks.push((EdgeGroup::I, g1));

    let mut g2: Vec<Edge> = (0..p)
        .flat_map(|i| (0..p).filter(move |&k| k != i).map(move |k| (i, k)))
        .map(|(i, k)| edge(l.c(i), l.d(k)))
        .collect();
    g2.shuffle(&mut seed.rng("worst/II", p as u64));
    blocks.push((EdgeGroup::II, g2));

    let mut g3: Vec<Edge> = (0..p)
        .flat_map(|i| (0..p).map(move |k| (i, k)))
        .map(|(i, k)| edge(l.b(i), l.c(k)))
        .collect();
    g3.shuffle(&mut seed.rng("worst/III", p as u64));
    blocks.push((EdgeGroup::III, g3));

    // C is X, D is Y; circuit from c_0.
    let circuit_ii: Vec<Vertex> = windowed_circuit(p, 0)?
        .into_iter()
        .map(|v| if v < p { l.c(v) } else { l.d(v - p) })
        .collect();
    blocks.push((EdgeGroup::IV, cascade_edges(p, &circuit_ii, |j| l.a(j))));

    blocks.push((EdgeGroup::V, (0..p).map(|i| edge(l.a(p - 1), l.b(i))).collect()));

    // B is X, C is Y; circuit from b_{p-1}.
    let circuit_vi: Vec<Vertex> = windowed_circuit(p, p - 1)?
        .into_iter()
        .map(|v| if v < p { l.b(v) } else { l.c(v - p) })
        .collect();
    blocks.push((EdgeGroup::VI, cascade_edges(p, &circuit_vi, |j| l.e(j))));

    let g7: Vec<Edge> = (half..p)
        .rev()
        .flat_map(|i| (0..p).rev().map(move |k| (i, k)))
        .map(|(i, k)| edge(l.b(i), l.d(k)))
        .collect();
    blocks.push((EdgeGroup::VII, g7));

    let placed: HashSet<Edge> = blocks.iter().flat_map(|(_, es)| es.iter().copied()).collect();
    let placed_count: usize = blocks.iter().map(|(_, es)| es.len()).sum();
    if placed.len() != placed_count {
        return Err(Error::Invariant(format!(
            "p={p}: construction placed an edge twice (a cascade window repeats a vertex)"
        )));
    }
    let mut g8: Vec<Edge> = lex_edges(n).into_iter().filter(|e| !placed.contains(e)).collect();
    g8.shuffle(&mut seed.rng("worst/VIII", p as u64));
    blocks.push((EdgeGroup::VIII, g8));

    let mut edges = Vec::with_capacity(n * (n - 1) / 2);
    let mut groups = Vec::with_capacity(edges.capacity());
    for (g, es) in &blocks {
        groups.extend(std::iter::repeat_n(*g, es.len()));
        edges.extend_from_slice(es);
    }
    let order = EdgeOrder::new(n, edges)?;

    // Designated step triangles, keyed by pivot rank.
    let mut designated: Vec<Option<Triangle>> = vec![None; order.m()];
    let mut designate = |t: Triangle, pivot: Edge| -> Result<()> {
        let r = order.rank(pivot.0, pivot.1);
        if order.entry_time(t) != r {
            return Err(Error::Invariant(format!(
                "step triangle {t:?} does not enter with edge {pivot:?}"
            )));
        }
        designated[r as usize] = Some(t);
        Ok(())
    };
    let block = |g: EdgeGroup| &blocks[g as usize].1;
    for (first, g) in [
        (edge(l.a(0), l.c(0)), EdgeGroup::IV),
        (edge(l.b(p - 1), l.e(0)), EdgeGroup::VI),
    ] {
        let mut prev = first;
        for &cur in block(g) {
            let t = triangle_of(prev, cur)
                .ok_or_else(|| Error::Invariant(format!("cascade edges {prev:?} {cur:?} share no vertex")))?;
            designate(t, cur)?;
            prev = cur;
        }
    }
    for &(u, v) in block(EdgeGroup::V) {
        let b = if u == l.a(p - 1) { v } else { u };
        designate([Layout::ROOF, l.a(p - 1), b], (u, v))?;
    }
    for &(b, dv) in block(EdgeGroup::VII) {
        // the E vertex in the upper half whose VI edge to b enters last
        let best = (half..p)
            .map(|i| l.e(i))
            .filter(|&ev| groups[order.rank(ev, b) as usize] == EdgeGroup::VI)
            .max_by_key(|&ev| order.rank(ev, b));
        if let Some(ev) = best {
            let mut t = [b, dv, ev];
            t.sort_unstable();
            designate(t, (b, dv))?;
        }
    }

    // Default column order with each designated triangle moved to the front
    // of its tie class.
    let lex = build_columns(&order, &TiePolicy::LexByOtherEdges)?;
    let (tris, times) = (lex.triangles(), lex.entry_times());
    let mut seq = Vec::with_capacity(tris.len());
    let mut start = 0;
    while start < tris.len() {
        let t0 = times[start];
        let end = start + times[start..].iter().take_while(|&&t| t == t0).count();
        let class = &tris[start..end];
        match designated[t0 as usize] {
            Some(step) => {
                seq.push(step);
                seq.extend(class.iter().copied().filter(|&t| t != step));
            }
            None => seq.extend_from_slice(class),
        }
        start = end;
    }
    let filtration = Filtration::new(order, &TiePolicy::Explicit(seq))?;

    Ok(WorstCase {
        params,
        filtration,
        groups,
        designated,
        circuit_ii,
        circuit_vi,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorstCaseAudit {
    pub p: usize,
    pub n: usize,
    /// Reduced columns with a block-III pivot and at least `p²/8` block-II
    /// entries.
    pub fat_columns: usize,
    /// Reduced columns with a block-II pivot.
    pub group_ii_pivots: usize,
    pub fill_up: u64,
    pub cost: u64,
    /// `fat_columns >= p²/4`; only asserted from `p = 7` on.
    pub fat_bound: Option<bool>,
}

impl std::fmt::Display for WorstCaseAudit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "p={} n={} fill_up={} cost={} fat_columns={} group_ii_pivots={} fat_bound={}",
            self.p,
            self.n,
            self.fill_up,
            self.cost,
            self.fat_columns,
            self.group_ii_pivots,
            match self.fat_bound {
                Some(true) => "ok",
                Some(false) => "FAILED",
                None => "n/a",
            }
        )
    }
}

pub fn worst_case_audit(w: &WorstCase, reduced: &StaircaseMatrix, stats: &ReductionStats) -> WorstCaseAudit {
    let p = w.params.p();
    let mut fat = 0;
    let mut ii_pivots = 0;
    for col in reduced.columns() {
        let Some(piv) = col.pivot() else { continue };
        match w.groups[piv as usize] {
            EdgeGroup::III => {
                let in_ii = col
                    .rows()
                    .iter()
                    .filter(|&&r| w.groups[r as usize] == EdgeGroup::II)
                    .count();
                if 8 * in_ii >= p * p {
                    fat += 1;
                }
            }
            EdgeGroup::II => ii_pivots += 1,
            _ => {}
        }
    }
    WorstCaseAudit {
        p,
        n: w.params.n(),
        fat_columns: fat,
        group_ii_pivots: ii_pivots,
        fill_up: stats.fill_up,
        cost: stats.cost,
        fat_bound: (p >= 7).then_some(4 * fat >= p * p),
    }
}
