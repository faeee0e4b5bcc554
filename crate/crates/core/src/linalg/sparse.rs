//! Sparse vectors and matrices over [`Rational`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::rational::Rational;
use crate::error::{Error, Result};

/// A sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    len: usize,
    entries: Vec<(usize, Rational)>,
}

impl SparseVec {
    pub fn zeros(len: usize) -> Self {
        SparseVec {
            len,
            entries: Vec::new(),
        }
    }

    /// Builds from `(index, value)` pairs in any order; duplicates are summed.
    pub fn from_entries(len: usize, entries: impl IntoIterator<Item = (usize, Rational)>) -> Self {
        let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in entries {
            assert!(i < len, "index {i} out of range for length {len}");
            *acc.entry(i).or_default() += v;
        }
        SparseVec {
            len,
            entries: acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Builds from entries already sorted by index with no zeros or duplicates.
    pub(crate) fn from_sorted_unchecked(len: usize, entries: Vec<(usize, Rational)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(i, v)| *i < len && !v.is_zero()));
        SparseVec { len, entries }
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVec {
            len: values.len(),
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(i, v)| (i, v.clone()))
                .collect(),
        }
    }

    pub fn unit(len: usize, index: usize) -> Self {
        SparseVec::from_sorted_unchecked(len, vec![(index, Rational::one())])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Rational)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Rational)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, index: usize) -> Rational {
        match self.entries.binary_search_by_key(&index, |(i, _)| *i) {
            Ok(p) => self.entries[p].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> SparseVec {
        if c.is_zero() {
            return SparseVec::zeros(self.len);
        }
        SparseVec {
            len: self.len,
            entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect(),
        }
    }

    /// `self + c * other`, merging the two sorted entry lists.
    pub fn axpy(&self, c: &Rational, other: &SparseVec) -> SparseVec {
        assert_eq!(self.len, other.len, "axpy length mismatch");
        if c.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c * y));
                        b.next();
                    } else {
                        let s = x + &(c * y);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec {
            len: self.len,
            entries: out,
        }
    }

    pub fn add(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseVec) -> SparseVec {
        self.axpy(&-Rational::one(), other)
    }

    pub fn dot(&self, other: &SparseVec) -> Rational {
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
        let mut acc = Rational::zero();
        while let (Some((i, x)), Some((j, y))) = (a.peek(), b.peek()) {
            if i < j {
                a.next();
            } else if j < i {
                b.next();
            } else {
                acc += x * y;
                a.next();
                b.next();
            }
        }
        acc
    }

    /// Keeps only the entries whose index satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(usize) -> bool) -> SparseVec {
        SparseVec {
            len: self.len,
            entries: self
                .entries
                .iter()
                .filter(|(i, _)| keep(*i))
                .cloned()
                .collect(),
        }
    }

    /// Kronecker product: index `i * other.len + j`.
    pub fn kron(&self, other: &SparseVec) -> SparseVec {
        let mut entries = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, x) in &self.entries {
            for (j, y) in &other.entries {
                entries.push((i * other.len + j, x * y));
            }
        }
        SparseVec {
            len: self.len * other.len,
            entries,
        }
    }
}

/// A sparse matrix stored row by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseOperator {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseOperator {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseOperator {
            nrows,
            ncols,
            rows: vec![SparseVec::zeros(ncols); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseOperator {
            nrows: n,
            ncols: n,
            rows: (0..n).map(|i| SparseVec::unit(n, i)).collect(),
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<SparseVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == ncols), "row length mismatch");
        SparseOperator {
            nrows: rows.len(),
            ncols,
            rows,
        }
    }

    /// Builds the operator whose `j`-th column is `cols[j]`.
    pub fn from_columns(nrows: usize, cols: Vec<SparseVec>) -> Self {
        let ncols = cols.len();
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nrows];
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), nrows, "column length mismatch");
            for (i, v) in col.into_entries() {
                rows[i].push((j, v));
            }
        }
        SparseOperator {
            nrows,
            ncols,
            rows: rows
                .into_iter()
                .map(|r| SparseVec::from_sorted_unchecked(ncols, r))
                .collect(),
        }
    }

    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Rational)>,
    ) -> Self {
        let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
        for (i, j, v) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of range");
            *acc.entry((i, j)).or_default() += v;
        }
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nrows];
        for ((i, j), v) in acc {
            if !v.is_zero() {
                rows[i].push((j, v));
            }
        }
        SparseOperator {
            nrows,
            ncols,
            rows: rows
                .into_iter()
                .map(|r| SparseVec::from_sorted_unchecked(ncols, r))
                .collect(),
        }
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        SparseOperator::from_rows(
            ncols,
            rows.iter().map(|r| SparseVec::from_dense(r)).collect(),
        )
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(SparseVec::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(SparseVec::is_zero)
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.rows[i].get(j)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Rational)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, j, v)))
    }

    pub fn is_diagonal(&self) -> bool {
        self.nrows == self.ncols && self.triplets().all(|(i, j, _)| i == j)
    }

    pub fn diagonal(&self) -> Vec<Rational> {
        (0..self.nrows.min(self.ncols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn transpose(&self) -> SparseOperator {
        let mut cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row.iter() {
                cols[j].push((i, v.clone()));
            }
        }
        SparseOperator {
            nrows: self.ncols,
            ncols: self.nrows,
            rows: cols
                .into_iter()
                .map(|c| SparseVec::from_sorted_unchecked(self.nrows, c))
                .collect(),
        }
    }

    /// Columns as sparse vectors.
    pub fn columns(&self) -> Vec<SparseVec> {
        self.transpose().rows
    }

    pub fn apply(&self, v: &SparseVec) -> Result<SparseVec> {
        if v.len() != self.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: v.len(),
            });
        }
        let entries: Vec<(usize, Rational)> = self
            .rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let x = r.dot(v);
                (!x.is_zero()).then_some((i, x))
            })
            .collect();
        Ok(SparseVec::from_sorted_unchecked(self.nrows, entries))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &SparseOperator) -> Result<SparseOperator> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
                for (k, a) in row.iter() {
                    for (j, b) in other.rows[k].iter() {
                        *acc.entry(j).or_default() += a * b;
                    }
                }
                SparseVec::from_sorted_unchecked(
                    other.ncols,
                    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
                )
            })
            .collect();
        Ok(SparseOperator {
            nrows: self.nrows,
            ncols: other.ncols,
            rows,
        })
    }

    /// Composition of a chain, applied right to left: `ops[0] ∘ ops[1] ∘ …`.
    pub fn compose_all<'a>(
        ops: impl IntoIterator<Item = &'a SparseOperator>,
    ) -> Result<SparseOperator> {
        let mut iter = ops.into_iter();
        let first = iter
            .next()
            .expect("compose_all needs at least one operator")
            .clone();
        iter.try_fold(first, |acc, op| acc.compose(op))
    }

    pub fn scale(&self, c: &Rational) -> SparseOperator {
        SparseOperator {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self.rows.iter().map(|r| r.scale(c)).collect(),
        }
    }

    pub fn axpy(&self, c: &Rational, other: &SparseOperator) -> Result<SparseOperator> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch {
                expected: self.nrows * self.ncols,
                found: other.nrows * other.ncols,
            });
        }
        Ok(SparseOperator {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.axpy(c, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.axpy(&Rational::one(), other)
    }

    pub fn sub(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.axpy(&-Rational::one(), other)
    }

    /// `self ∘ other − other ∘ self`.
    pub fn commutator(&self, other: &SparseOperator) -> Result<SparseOperator> {
        self.compose(other)?.sub(&other.compose(self)?)
    }

    /// Row-major flattening; index `i * ncols + j`.
    pub fn vectorize(&self) -> SparseVec {
        let entries = self
            .triplets()
            .map(|(i, j, v)| (i * self.ncols + j, v.clone()))
            .collect();
        SparseVec::from_sorted_unchecked(self.nrows * self.ncols, entries)
    }

    /// Inverse of [`SparseOperator::vectorize`].
    pub fn from_vectorized(nrows: usize, ncols: usize, v: &SparseVec) -> Result<Self> {
        if v.len() != nrows * ncols {
            return Err(Error::DimensionMismatch {
                expected: nrows * ncols,
                found: v.len(),
            });
        }
        Ok(SparseOperator::from_triplets(
            nrows,
            ncols,
            v.iter().map(|(k, x)| (k / ncols, k % ncols, x.clone())),
        ))
    }

    /// Keeps the entries at positions where `keep(row, col)` holds.
    pub fn mask(&self, mut keep: impl FnMut(usize, usize) -> bool) -> SparseOperator {
        SparseOperator {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self
                .rows
                .iter()
                .enumerate()
                .map(|(i, r)| r.filter(|j| keep(i, j)))
                .collect(),
        }
    }

    /// Text export: a `dims R C` header then one `row col num/den` line per
    /// stored entry, 0-based, row-major.
    pub fn to_triplet_text(&self) -> String {
        let mut out = format!("dims {} {}\n", self.nrows, self.ncols);
        for (i, j, v) in self.triplets() {
            writeln!(out, "{} {} {}/{}", i, j, v.numer(), v.denom()).unwrap();
        }
        out
    }

    pub fn from_triplet_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing dims header".into()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("dims") {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let parse_usize = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::Parse(format!("missing {what}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("bad {what}")))
        };
        let nrows = parse_usize(parts.next(), "row count")?;
        let ncols = parse_usize(parts.next(), "column count")?;
        let mut triplets = Vec::new();
        for line in lines {
            let mut p = line.split_whitespace();
            let i = parse_usize(p.next(), "row index")?;
            let j = parse_usize(p.next(), "column index")?;
            let v: Rational = p
                .next()
                .ok_or_else(|| Error::Parse(format!("missing value in {line:?}")))?
                .parse()
                .map_err(|e: super::rational::ParseRationalError| Error::Parse(e.to_string()))?;
            if i >= nrows || j >= ncols {
                return Err(Error::Parse(format!("entry ({i}, {j}) out of range")));
            }
            triplets.push((i, j, v));
        }
        Ok(SparseOperator::from_triplets(nrows, ncols, triplets))
    }
}
