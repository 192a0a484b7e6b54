use std::collections::BTreeMap;

use serde::Serialize;

use super::{xor_merge, Row, SparseColumn, StaircaseMatrix};
use crate::error::{Error, Result};

const NO_OWNER: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, Default)]
pub struct ReduceOptions {
    /// Record, for every column, the indices of the columns added to it.
    pub log_additions: bool,
}

/// Counters and index sets gathered while reducing one matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStats {
    pub rows: usize,
    pub cols: usize,
    /// Non-zero entries of the reduced matrix.
    pub fill_up: u64,
    /// Sum of `#M'_j` over all additions `M_i += M'_j`.
    pub cost: u64,
    /// Entries touched by the merges (`#M_i + #M'_j` per addition). Not part
    /// of the cost model; kept for comparison with wall-clock time.
    pub merge_work: u64,
    pub additions_per_column: Vec<u32>,
    /// Reduced pivots that are also pivots of the input, ascending.
    pub step_indices: Vec<Row>,
    /// Reduced pivots that are not pivots of the input, ascending.
    pub critical_indices: Vec<Row>,
    /// Pivot row of the reduced matrix to the column owning it.
    pub pivot_pairs: BTreeMap<Row, usize>,
    /// Columns added to each column, in order. Only with
    /// [`ReduceOptions::log_additions`].
    pub addition_log: Option<Vec<Vec<u32>>>,
}

#[derive(Serialize)]
struct StatsRecord<'a> {
    fill_up: u64,
    cost: u64,
    r: usize,
    c: usize,
    n_step: usize,
    n_critical: usize,
    additions_total: u64,
    critical_indices: &'a [Row],
    #[serde(skip_serializing_if = "Option::is_none")]
    additions_per_column: Option<&'a [u32]>,
}

impl ReductionStats {
    pub fn additions_total(&self) -> u64 {
        self.additions_per_column.iter().map(|&a| a as u64).sum()
    }

    /// Machine-readable record; `with_additions` appends the per-column
    /// addition counts.
    pub fn to_json(&self, with_additions: bool) -> String {
        let rec = StatsRecord {
            fill_up: self.fill_up,
            cost: self.cost,
            r: self.rows,
            c: self.cols,
            n_step: self.step_indices.len(),
            n_critical: self.critical_indices.len(),
            additions_total: self.additions_total(),
            critical_indices: &self.critical_indices,
            additions_per_column: with_additions.then_some(&self.additions_per_column[..]),
        };
        serde_json::to_string_pretty(&rec).expect("stats record serializes")
    }
}

pub fn reduce(m: &StaircaseMatrix) -> Result<(StaircaseMatrix, ReductionStats)> {
    reduce_with(m, ReduceOptions::default())
}

/// Standard left-to-right reduction.
///
/// Column `i` repeatedly absorbs the already-final column that owns its
/// current pivot until the pivot is unowned or the column vanishes.
pub fn reduce_with(
    m: &StaircaseMatrix,
    opts: ReduceOptions,
) -> Result<(StaircaseMatrix, ReductionStats)> {
    let r = m.n_rows();
    if !m.is_staircase() {
        return Err(Error::InvalidMatrix(
            "input to reduction is not staircase shaped".into(),
        ));
    }
    if m.columns().iter().any(|c| c.pivot().is_some_and(|p| p as usize >= r)) {
        return Err(Error::InvalidMatrix("row index out of bounds".into()));
    }
    if m.n_cols() >= NO_OWNER as usize {
        return Err(Error::InvalidMatrix("too many columns".into()));
    }

    let mut owner = vec![NO_OWNER; r];
    let mut reduced: Vec<SparseColumn> = Vec::with_capacity(m.n_cols());
    let mut additions = Vec::with_capacity(m.n_cols());
    let mut log = opts.log_additions.then(|| Vec::with_capacity(m.n_cols()));
    let mut cost = 0u64;
    let mut merge_work = 0u64;
    let mut scratch: Vec<Row> = Vec::new();

    for (i, col) in m.columns().iter().enumerate() {
        let mut cur = col.rows().to_vec();
        let mut added = 0u32;
        let mut added_cols = Vec::new();
        while let Some(&p) = cur.last() {
            let j = owner[p as usize];
            if j == NO_OWNER {
                break;
            }
            let other = reduced[j as usize].rows();
            cost += other.len() as u64;
            merge_work += (cur.len() + other.len()) as u64;
            xor_merge(&cur, other, &mut scratch);
            std::mem::swap(&mut cur, &mut scratch);
            added += 1;
            if log.is_some() {
                added_cols.push(j);
            }
        }
        if let Some(&p) = cur.last() {
            owner[p as usize] = i as u32;
        }
        cur.shrink_to_fit();
        reduced.push(SparseColumn(cur));
        additions.push(added);
        if let Some(log) = log.as_mut() {
            log.push(added_cols);
        }
    }

    let reduced = StaircaseMatrix::unchecked(r, reduced);
    let (step_indices, critical_indices) = classify_indices(m, &reduced)?;
    let pivot_pairs = owner
        .iter()
        .enumerate()
        .filter(|(_, &o)| o != NO_OWNER)
        .map(|(p, &o)| (p as Row, o as usize))
        .collect();
    let stats = ReductionStats {
        rows: r,
        cols: m.n_cols(),
        fill_up: reduced.nnz(),
        cost,
        merge_work,
        additions_per_column: additions,
        step_indices,
        critical_indices,
        pivot_pairs,
        addition_log: log,
    };
    Ok((reduced, stats))
}

/// Splits the pivots of `reduced` into step indices (also pivots of
/// `original`) and critical indices (not).
pub fn classify_indices(
    original: &StaircaseMatrix,
    reduced: &StaircaseMatrix,
) -> Result<(Vec<Row>, Vec<Row>)> {
    if original.n_rows() != reduced.n_rows() || original.n_cols() != reduced.n_cols() {
        return Err(Error::MismatchedShapes(format!(
            "original is {}x{}, reduced is {}x{}",
            original.n_rows(),
            original.n_cols(),
            reduced.n_rows(),
            reduced.n_cols()
        )));
    }
    let r = original.n_rows();
    let mut is_original_pivot = vec![false; r];
    for p in original.columns().iter().filter_map(SparseColumn::pivot) {
        is_original_pivot[p as usize] = true;
    }
    let mut reduced_pivots: Vec<Row> = reduced
        .columns()
        .iter()
        .filter_map(SparseColumn::pivot)
        .collect();
    reduced_pivots.sort_unstable();
    reduced_pivots.dedup();
    let (step, critical) = reduced_pivots
        .into_iter()
        .partition(|&p| is_original_pivot[p as usize]);
    Ok((step, critical))
}

/// `cost <= c * fill_up`.
pub fn check_cost_bound(stats: &ReductionStats, c: usize) -> bool {
    (stats.cost as u128) <= (c as u128) * (stats.fill_up as u128)
}
