//! Sparse GF(2) columns, staircase matrices and the instrumented
//! left-to-right reduction.

mod reduce;

pub use reduce::{check_cost_bound, classify_indices, reduce, reduce_with, ReduceOptions, ReductionStats};

use crate::error::{Error, Result};

/// Row index type. Rows are edges, so `u32` is plenty at any feasible scale.
pub type Row = u32;

/// A GF(2) column stored as its strictly increasing support.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SparseColumn(Vec<Row>);

impl SparseColumn {
    pub fn zero() -> Self {
        SparseColumn(Vec::new())
    }

    /// Builds a column from a strictly increasing row sequence.
    pub fn new(rows: Vec<Row>) -> Result<Self> {
        if rows.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMatrix(format!(
                "column rows not strictly increasing: {rows:?}"
            )));
        }
        Ok(SparseColumn(rows))
    }

    /// Builds a column from any row multiset, cancelling pairs (GF(2) sum of
    /// unit vectors).
    pub fn from_unsorted(mut rows: Vec<Row>) -> Self {
        rows.sort_unstable();
        let mut out: Vec<Row> = Vec::with_capacity(rows.len());
        for r in rows {
            if out.last() == Some(&r) {
                out.pop();
            } else {
                out.push(r);
            }
        }
        SparseColumn(out)
    }

    pub fn rows(&self) -> &[Row] {
        &self.0
    }

    pub fn into_rows(self) -> Vec<Row> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Lowest non-zero row, if any.
    pub fn pivot(&self) -> Option<Row> {
        self.0.last().copied()
    }

    pub fn contains(&self, row: Row) -> bool {
        self.0.binary_search(&row).is_ok()
    }

    /// GF(2) sum, i.e. the symmetric difference of the supports.
    pub fn add(&self, other: &SparseColumn) -> SparseColumn {
        let mut out = Vec::with_capacity(self.len() + other.len());
        xor_merge(&self.0, &other.0, &mut out);
        SparseColumn(out)
    }
}

/// Free-function form of [`SparseColumn::add`].
pub fn column_add(a: &SparseColumn, b: &SparseColumn) -> SparseColumn {
    a.add(b)
}

/// Free-function form of [`SparseColumn::pivot`].
pub fn pivot(a: &SparseColumn) -> Option<Row> {
    a.pivot()
}

/// Merges two sorted supports into `out`, dropping rows present in both.
pub(crate) fn xor_merge(a: &[Row], b: &[Row], out: &mut Vec<Row>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        if x < y {
            out.push(x);
            i += 1;
        } else if y < x {
            out.push(y);
            j += 1;
        } else {
            i += 1;
            j += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// A GF(2) matrix whose non-zero columns have non-decreasing pivots.
///
/// Construction through [`StaircaseMatrix::new`] validates row bounds, column
/// sortedness and the staircase shape. [`StaircaseMatrix::unchecked`] skips
/// the staircase check and is meant for reduced outputs, which are generally
/// not staircase shaped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseMatrix {
    rows: usize,
    columns: Vec<SparseColumn>,
}

impl StaircaseMatrix {
    pub fn new(rows: usize, columns: Vec<SparseColumn>) -> Result<Self> {
        let m = StaircaseMatrix { rows, columns };
        m.check_rows()?;
        if let Some((i, j)) = first_staircase_violation(&m.columns) {
            return Err(Error::InvalidMatrix(format!(
                "not staircase shaped: column {j} has pivot {:?} below pivot {:?} of column {i}",
                m.columns[j].pivot(),
                m.columns[i].pivot()
            )));
        }
        Ok(m)
    }

    /// Builds a matrix from raw row lists, validating everything.
    pub fn from_rows(rows: usize, columns: Vec<Vec<Row>>) -> Result<Self> {
        let cols = columns
            .into_iter()
            .map(SparseColumn::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, cols)
    }

    pub(crate) fn unchecked(rows: usize, columns: Vec<SparseColumn>) -> Self {
        StaircaseMatrix { rows, columns }
    }

    fn check_rows(&self) -> Result<()> {
        for (j, col) in self.columns.iter().enumerate() {
            if let Some(p) = col.pivot() {
                if p as usize >= self.rows {
                    return Err(Error::InvalidMatrix(format!(
                        "column {j} has row {p} but the matrix has {} rows",
                        self.rows
                    )));
                }
            }
            if col.rows().windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidMatrix(format!(
                    "column {j} rows not strictly increasing"
                )));
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[SparseColumn] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &SparseColumn {
        &self.columns[j]
    }

    /// Total number of non-zero entries.
    pub fn nnz(&self) -> u64 {
        self.columns.iter().map(|c| c.len() as u64).sum()
    }

    pub fn is_staircase(&self) -> bool {
        first_staircase_violation(&self.columns).is_none()
    }
}

fn first_staircase_violation(columns: &[SparseColumn]) -> Option<(usize, usize)> {
    let mut last: Option<(usize, Row)> = None;
    for (j, col) in columns.iter().enumerate() {
        if let Some(p) = col.pivot() {
            if let Some((i, q)) = last {
                if p < q {
                    return Some((i, j));
                }
            }
            last = Some((j, p));
        }
    }
    None
}

/// True iff the non-zero columns' pivots are non-decreasing and every row is
/// in bounds.
pub fn validate_staircase(m: &StaircaseMatrix) -> bool {
    m.check_rows().is_ok() && m.is_staircase()
}
