//! First Betti numbers along a clique filtration.
//!
//! `β₁(K_i)` is read off the single reduction already performed: an edge is
//! *positive* when it closes a cycle in the graph of the edges before it, and
//! every non-zero reduced column kills one cycle at its entry time. So
//! `β₁(K_i) = #{positive edges of rank < i} - #{non-zero reduced columns with
//! entry time < i}`. [`betti1_bruteforce`] recomputes the same number from
//! scratch by dense elimination and serves as the oracle for it.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::flagfilt::{all_triangles, boundary_matrix, EdgeOrder, Filtration};
use crate::randmodels::{sample_order, Model, Seed};
use crate::z2core::{reduce, ReductionStats, StaircaseMatrix};

/// Disjoint sets with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a as usize] < self.size[b as usize] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b as usize] = a;
        self.size[a as usize] += self.size[b as usize];
        true
    }
}

/// Ranks of the edges that close a cycle when inserted, ascending.
pub fn positive_edges(e: &EdgeOrder) -> Vec<usize> {
    let mut ds = DisjointSets::new(e.n());
    e.edges()
        .iter()
        .enumerate()
        .filter(|(_, &(u, v))| !ds.union(u, v))
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Betti1Profile {
    /// `values[i] = β₁(K_i)` for `i = 0..=m`.
    pub values: Vec<u32>,
}

impl Betti1Profile {
    /// `Σ_i i·[β₁(K_i) > 0]`.
    pub fn weighted_support(&self) -> u64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0)
            .map(|(i, _)| i as u64)
            .sum()
    }
}

pub fn betti1_profile(f: &Filtration, reduced: &StaircaseMatrix) -> Result<Betti1Profile> {
    let e = f.edge_order();
    let m = e.m();
    let entry = f.column_order().entry_times();
    if reduced.n_rows() != m || reduced.n_cols() != entry.len() {
        return Err(Error::InconsistentInput(format!(
            "reduced matrix is {}x{}, filtration needs {}x{}",
            reduced.n_rows(),
            reduced.n_cols(),
            m,
            entry.len()
        )));
    }
    let positive = positive_edges(e);
    let mut is_positive = vec![false; m];
    let mut births = vec![0i64; m + 1];
    for &p in &positive {
        is_positive[p] = true;
        births[p + 1] += 1;
    }
    let mut deaths = vec![0i64; m + 1];
    for (col, &t) in reduced.columns().iter().zip(entry) {
        if let Some(p) = col.pivot() {
            if p > t || !is_positive[p as usize] {
                return Err(Error::InconsistentInput(format!(
                    "reduced pivot {p} of a column entering at {t} cannot kill a cycle"
                )));
            }
            deaths[t as usize + 1] += 1;
        }
    }
    let mut values = Vec::with_capacity(m + 1);
    let mut alive = 0i64;
    for i in 0..=m {
        alive += births[i] - deaths[i];
        if alive < 0 {
            return Err(Error::InconsistentInput(format!("negative Betti number at {i}")));
        }
        values.push(alive as u32);
    }
    Ok(Betti1Profile { values })
}

/// Rank over GF(2) of a set of bit vectors.
fn gf2_rank(mut vectors: Vec<Vec<u64>>) -> usize {
    let mut rank = 0;
    let words = vectors.first().map_or(0, Vec::len);
    for bit in 0..words * 64 {
        let (w, mask) = (bit / 64, 1u64 << (bit % 64));
        let Some(k) = (rank..vectors.len()).find(|&k| vectors[k][w] & mask != 0) else {
            continue;
        };
        vectors.swap(rank, k);
        let pivot = vectors[rank].clone();
        for v in vectors.iter_mut().skip(rank + 1) {
            if v[w] & mask != 0 {
                for (x, y) in v.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn bitvec(len: usize, ones: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut v = vec![0u64; len.div_ceil(64).max(1)];
    for i in ones {
        v[i / 64] ^= 1 << (i % 64);
    }
    v
}

/// `β₁(K_i)` from scratch: `i - rank ∂₁ - rank ∂₂` of the complex on the
/// first `i` edges, both ranks by dense elimination.
pub fn betti1_bruteforce(e: &EdgeOrder, i: usize) -> usize {
    assert!(i <= e.m());
    let n = e.n();
    let d1: Vec<Vec<u64>> = e.edges()[..i]
        .iter()
        .map(|&(u, v)| bitvec(n, [u as usize, v as usize]))
        .collect();
    let d2: Vec<Vec<u64>> = all_triangles(n)
        .into_iter()
        .map(|[a, b, c]| [e.rank(a, b), e.rank(a, c), e.rank(b, c)])
        .filter(|r| r.iter().all(|&x| (x as usize) < i))
        .map(|r| bitvec(i, r.map(|x| x as usize)))
        .collect();
    i - gf2_rank(d1) - gf2_rank(d2)
}

/// Every critical index `p` has `β₁(K_{p+1}) > 0`, where `K_{p+1}` is the
/// first complex containing edge `p`.
pub fn critical_implies_cycle(profile: &Betti1Profile, stats: &ReductionStats) -> bool {
    stats
        .critical_indices
        .iter()
        .all(|&p| profile.values.get(p as usize + 1).is_some_and(|&b| b > 0))
}

/// Deterministic fill-up bound: `3·C(n,2) + Σ_i i·[β₁(K_i) > 0]`.
pub fn fillup_betti_bound(profile: &Betti1Profile) -> u64 {
    let m = (profile.values.len() - 1) as u64;
    3 * m + profile.weighted_support()
}

/// About 30 geometrically spaced prefix lengths in `1..=m`, always ending at `m`.
pub fn default_grid(m: usize) -> Vec<usize> {
    const POINTS: usize = 30;
    let mut grid: Vec<usize> = (0..POINTS)
        .map(|k| {
            let t = k as f64 / (POINTS - 1) as f64;
            (m as f64).powf(t).round() as usize
        })
        .collect();
    grid.push(m);
    grid.retain(|&i| (1..=m).contains(&i));
    grid.sort_unstable();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq)]
pub struct BettiScanResult {
    pub model: String,
    pub n: usize,
    pub trials: usize,
    pub grid: Vec<usize>,
    pub p_hat: Vec<f64>,
    /// Probability level defining the reported threshold.
    pub level: f64,
    /// Smallest grid point from which on every estimate is below `level`.
    pub threshold_t: Option<usize>,
    /// `r · max_{i ≥ T} p̂(i)`, the `A` for which `P(β₁(K_i) > 0) < A/r`
    /// holds empirically beyond `T`.
    pub a_param: Option<f64>,
    /// `T / (n ln n)`.
    pub c_nlogn: Option<f64>,
}

impl BettiScanResult {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("model,n,trials,i,p_hat\n");
        for (&i, &p) in self.grid.iter().zip(&self.p_hat) {
            out.push_str(&format!("{},{},{},{},{:.6}\n", self.model, self.n, self.trials, i, p));
        }
        out
    }

    /// Three-point moving average (window shrinks at the ends).
    pub fn smoothed(&self) -> Vec<f64> {
        let p = &self.p_hat;
        (0..p.len())
            .map(|k| {
                let lo = k.saturating_sub(1);
                let hi = (k + 1).min(p.len() - 1);
                p[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
            })
            .collect()
    }

    /// After the peak of the smoothed curve, no step rises by more than
    /// `n_sigma` binomial standard deviations.
    pub fn decreasing_after_peak(&self, n_sigma: f64) -> bool {
        let s = self.smoothed();
        let peak = s
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(k, _)| k);
        s[peak..].windows(2).all(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let sigma = (mid * (1.0 - mid) / self.trials as f64).sqrt();
            w[1] <= w[0] + n_sigma * sigma
        })
    }
}

/// Fraction of sampled filtrations with `β₁(K_i) > 0` at each grid point.
pub fn betti_probability_scan(
    model: Model,
    n: usize,
    trials: usize,
    grid: &[usize],
    seed: Seed,
    exec: Execution,
) -> Result<BettiScanResult> {
    if trials == 0 {
        return Err(Error::Config("scan needs at least one trial".into()));
    }
    if matches!(model, Model::Worst) {
        return Err(Error::Config("scans are defined for the er and vr models".into()));
    }
    let m = n * n.saturating_sub(1) / 2;
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid.iter().any(|&i| i > m) {
        return Err(Error::Config(format!(
            "grid must be strictly increasing within 0..={m}"
        )));
    }
    let ids: Vec<u64> = (0..trials as u64).collect();
    let positive: Vec<Result<Vec<bool>>> = exec.map(&ids, |&t| {
        let f = Filtration::with_default_ties(sample_order(model, n, seed, "scan", t)?);
        let (reduced, _) = reduce(&boundary_matrix(&f))?;
        let profile = betti1_profile(&f, &reduced)?;
        Ok(grid.iter().map(|&i| profile.values[i] > 0).collect())
    });
    let mut counts = vec![0usize; grid.len()];
    for row in positive {
        for (c, hit) in counts.iter_mut().zip(row?) {
            *c += hit as usize;
        }
    }
    let p_hat: Vec<f64> = counts.iter().map(|&c| c as f64 / trials as f64).collect();

    let level = 0.05;
    let tail_start = p_hat
        .iter()
        .rposition(|&p| p >= level)
        .map_or(0, |k| k + 1);
    let threshold_t = grid.get(tail_start).copied();
    let a_param = threshold_t.map(|_| {
        m as f64 * p_hat[tail_start..].iter().copied().fold(0.0, f64::max)
    });
    let c_nlogn = threshold_t.map(|t| t as f64 / (n as f64 * (n as f64).ln()));
    Ok(BettiScanResult {
        model: model.tag(),
        n,
        trials,
        grid: grid.to_vec(),
        p_hat,
        level,
        threshold_t,
        a_param,
        c_nlogn,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flagfilt::tests::four_vertex_order;

    #[test]
    fn positive_edges_four_vertex() {
        assert_eq!(positive_edges(&four_vertex_order()), vec![3, 4, 5]);
    }

    #[test]
    fn positive_edges_small_cases() {
        assert!(positive_edges(&EdgeOrder::lexicographic(2)).is_empty());
        // star from vertex 0 first: a spanning tree
        for n in 2..10 {
            let pos = positive_edges(&EdgeOrder::lexicographic(n));
            assert!(pos.iter().all(|&p| p >= n - 1));
            assert_eq!(pos.len(), n * (n - 1) / 2 - (n - 1));
        }
    }

    #[test]
    fn four_vertex_profile() {
        let f = Filtration::with_default_ties(four_vertex_order());
        let (red, stats) = reduce(&boundary_matrix(&f)).unwrap();
        let prof = betti1_profile(&f, &red).unwrap();
        assert_eq!(prof.values, vec![0, 0, 0, 0, 1, 0, 0]);
        assert!(critical_implies_cycle(&prof, &stats));
        assert_eq!(betti1_bruteforce(f.edge_order(), 4), 1);
        assert_eq!(betti1_bruteforce(f.edge_order(), 0), 0);
        assert_eq!(betti1_bruteforce(f.edge_order(), 6), 0);
        assert!(stats.fill_up <= fillup_betti_bound(&prof));
    }

    #[test]
    fn three_vertices_never_have_cycles() {
        for edges in [vec![(0, 1), (1, 2), (0, 2)], vec![(0, 2), (0, 1), (1, 2)]] {
            let f = Filtration::with_default_ties(EdgeOrder::new(3, edges).unwrap());
            let (red, _) = reduce(&boundary_matrix(&f)).unwrap();
            assert_eq!(betti1_profile(&f, &red).unwrap().values, vec![0, 0, 0, 0]);
        }
    }

    #[test]
    fn profile_rejects_foreign_matrix() {
        let f = Filtration::with_default_ties(four_vertex_order());
        let other = StaircaseMatrix::from_rows(6, vec![vec![0]]).unwrap();
        assert!(matches!(betti1_profile(&f, &other), Err(Error::InconsistentInput(_))));
        // the unreduced matrix has a pivot (4) that is not the reduced one for acd
        let d = boundary_matrix(&f);
        let g = Filtration::with_default_ties(EdgeOrder::lexicographic(4));
        assert!(betti1_profile(&g, &d).is_err());
    }

    #[test]
    fn no_critical_indices_is_vacuous() {
        let f = Filtration::with_default_ties(EdgeOrder::new(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap());
        let (red, stats) = reduce(&boundary_matrix(&f)).unwrap();
        assert!(stats.critical_indices.is_empty());
        assert!(critical_implies_cycle(&betti1_profile(&f, &red).unwrap(), &stats));
    }

    #[test]
    fn gf2_rank_basics() {
        assert_eq!(gf2_rank(vec![]), 0);
        assert_eq!(gf2_rank(vec![vec![0b011], vec![0b110], vec![0b101]]), 2);
        assert_eq!(gf2_rank(vec![vec![0b001], vec![0b010], vec![0b100]]), 3);
    }

    #[test]
    fn default_grid_shape() {
        let g = default_grid(435);
        assert!(g.len() >= 20 && g.len() <= 31);
        assert_eq!(*g.last().unwrap(), 435);
        assert_eq!(g[0], 1);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn scan_at_full_complex_is_zero() {
        let m = 10 * 9 / 2;
        for model in [Model::Er, Model::Vr { dim: 2 }] {
            let r = betti_probability_scan(model, 10, 20, &[m], Seed::new(3), Execution::Serial).unwrap();
            assert_eq!(r.p_hat, vec![0.0]);
        }
    }

    #[test]
    fn scan_rejects_bad_grid() {
        let s = Seed::new(0);
        assert!(betti_probability_scan(Model::Er, 6, 5, &[3, 2], s, Execution::Serial).is_err());
        assert!(betti_probability_scan(Model::Er, 6, 5, &[16], s, Execution::Serial).is_err());
        assert!(betti_probability_scan(Model::Er, 6, 0, &[1], s, Execution::Serial).is_err());
    }

    #[test]
    fn scan_csv_layout() {
        let r = betti_probability_scan(Model::Er, 8, 10, &[5, 28], Seed::new(1), Execution::Serial).unwrap();
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "model,n,trials,i,p_hat");
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("er,8,10,28,"));
    }
}
