//! Reduced row-echelon subspaces and exact nullspaces.
//!
//! [`OperatorSubspace`] keeps its basis in reduced row-echelon form, so two
//! subspaces are equal exactly when their bases are identical. Nullspaces of
//! large sparse systems go through [`sparse_nullspace`], a Markowitz-ordered
//! elimination that keeps fill-in low on the very sparse commutator systems.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::rational::Rational;
use super::sparse::{SparseOperator, SparseVec};
use crate::error::{Error, Result};

/// A subspace of `Q^ambient_dim` held as a reduced row-echelon basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorSubspace {
    ambient_dim: usize,
    // Sorted by pivot; each row has a 1 at its pivot (its leading column) and
    // every other row is 0 there.
    basis: Vec<SparseVec>,
}

impl OperatorSubspace {
    pub fn zero(ambient_dim: usize) -> Self {
        OperatorSubspace {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|b| b.leading().expect("nonzero basis row").0)
            .collect()
    }

    fn check_len(&self, v: &SparseVec) -> Result<()> {
        if v.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Reduces `v` against the basis. The result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &SparseVec) -> Result<SparseVec> {
        self.check_len(v)?;
        let mut v = v.clone();
        for row in &self.basis {
            let (p, _) = row.leading().expect("nonzero basis row");
            let c = v.get(p);
            if !c.is_zero() {
                v = v.axpy(&-c, row);
            }
        }
        Ok(v)
    }

    pub fn contains(&self, v: &SparseVec) -> Result<bool> {
        Ok(self.reduce(v)?.is_zero())
    }

    /// Adds one vector to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &SparseVec) -> Result<bool> {
        let r = self.reduce(v)?;
        let Some((p, lead)) = r.leading() else {
            return Ok(false);
        };
        let r = r.scale(&lead.recip());
        for row in &mut self.basis {
            let c = row.get(p);
            if !c.is_zero() {
                *row = row.axpy(&-c, &r);
            }
        }
        let at = self
            .basis
            .partition_point(|b| b.leading().expect("nonzero basis row").0 < p);
        self.basis.insert(at, r);
        Ok(true)
    }

    pub fn is_subspace_of(&self, other: &OperatorSubspace) -> Result<bool> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: other.ambient_dim,
                found: self.ambient_dim,
            });
        }
        for b in &self.basis {
            if !other.contains(b)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Subspace equality. Reduced echelon bases are canonical, so this is a
    /// structural comparison.
    pub fn equal(&self, other: &OperatorSubspace) -> Result<bool> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(self.basis == other.basis)
    }

    pub fn sum(&self, other: &OperatorSubspace) -> Result<OperatorSubspace> {
        let mut out = self.clone();
        for b in &other.basis {
            out.insert(b)?;
        }
        Ok(out)
    }

    /// Intersection via the kernel of `[A | -B]` on coefficient space.
    pub fn intersection(&self, other: &OperatorSubspace) -> Result<OperatorSubspace> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        let (a, b) = (self.dim(), other.dim());
        // Column k of the system is basis vector k; rows are ambient coordinates.
        let mut cols: Vec<SparseVec> = self.basis.clone();
        cols.extend(other.basis.iter().map(|v| v.scale(&-Rational::one())));
        let system = SparseOperator::from_columns(self.ambient_dim, cols);
        let kernel = nullspace(&system);
        let mut out = OperatorSubspace::zero(self.ambient_dim);
        for k in kernel.basis() {
            let mut v = SparseVec::zeros(self.ambient_dim);
            for (i, c) in k.iter().filter(|(i, _)| *i < a) {
                v = v.axpy(c, &self.basis[i]);
            }
            out.insert(&v)?;
        }
        debug_assert!(out.dim() <= a.min(b));
        Ok(out)
    }

    /// The linear combination `Σ coeffs[k] · basis[k]`.
    pub fn combine(&self, coeffs: &SparseVec) -> SparseVec {
        let mut v = SparseVec::zeros(self.ambient_dim);
        for (k, c) in coeffs.iter() {
            v = v.axpy(c, &self.basis[k]);
        }
        v
    }
}

/// Reduced echelon basis of the span of `vectors`.
pub fn echelonize(vectors: &[SparseVec]) -> Result<OperatorSubspace> {
    let Some(first) = vectors.first() else {
        return Err(Error::Empty(
            "echelonize needs at least one vector to fix the ambient dimension",
        ));
    };
    let mut space = OperatorSubspace::zero(first.len());
    for v in vectors {
        space.insert(v)?;
    }
    Ok(space)
}

/// Echelonizes with an explicit ambient dimension, allowing an empty input.
pub fn echelonize_in(ambient_dim: usize, vectors: &[SparseVec]) -> Result<OperatorSubspace> {
    let mut space = OperatorSubspace::zero(ambient_dim);
    for v in vectors {
        space.insert(v)?;
    }
    Ok(space)
}

pub fn rank(vectors: &[SparseVec]) -> Result<usize> {
    Ok(echelonize(vectors)?.dim())
}

pub fn matrix_rank(a: &SparseOperator) -> usize {
    a.ncols() - nullspace(a).dim()
}

/// `{x : A x = 0}` as a reduced echelon subspace of `Q^ncols`.
pub fn nullspace(a: &SparseOperator) -> OperatorSubspace {
    let basis = sparse_nullspace(a.ncols(), a.rows().to_vec());
    let mut space = OperatorSubspace::zero(a.ncols());
    for b in &basis {
        space
            .insert(b)
            .expect("nullspace vectors have the ambient length");
    }
    space
}

/// Nullspace basis of the system whose equations are `rows` (each of length
/// `ncols`), one vector per free column.
///
/// Pivoting is Markowitz-style: repeatedly take the shortest remaining
/// equation and, within it, the column occurring in the fewest equations.
/// Ties break on the lowest index so the result is deterministic.
pub fn sparse_nullspace(ncols: usize, rows: Vec<SparseVec>) -> Vec<SparseVec> {
    let mut rows: Vec<Option<SparseVec>> = rows
        .into_iter()
        .map(|r| {
            assert_eq!(r.len(), ncols, "equation length mismatch");
            (!r.is_zero()).then_some(r)
        })
        .collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); ncols];
    let mut queue: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (k, r) in rows.iter().enumerate() {
        if let Some(r) = r {
            for (c, _) in r.iter() {
                col_rows[c].insert(k);
            }
            queue.insert((r.nnz(), k));
        }
    }

    // (pivot column, pivot equation) in elimination order.
    let mut pivots: Vec<(usize, SparseVec)> = Vec::new();
    let mut is_pivot = vec![false; ncols];

    while let Some((_, k)) = queue.pop_first() {
        let prow = rows[k].take().expect("queued row is live");
        let (pcol, _) = prow
            .iter()
            .min_by_key(|(c, _)| (col_rows[*c].len(), *c))
            .expect("queued rows are nonzero");
        for (c, _) in prow.iter() {
            col_rows[c].remove(&k);
        }
        let pval = prow.get(pcol);
        let targets: Vec<usize> = col_rows[pcol].iter().copied().collect();
        for t in targets {
            let old = rows[t].take().expect("indexed row is live");
            queue.remove(&(old.nnz(), t));
            let factor = -(old.get(pcol) / &pval);
            let new = old.axpy(&factor, &prow);
            // Update column membership for entries that appeared or vanished.
            {
                let (mut a, mut b) = (old.iter().peekable(), new.iter().peekable());
                loop {
                    match (a.peek(), b.peek()) {
                        (Some((i, _)), Some((j, _))) if i == j => {
                            a.next();
                            b.next();
                        }
                        (Some((i, _)), Some((j, _))) if i < j => {
                            col_rows[*i].remove(&t);
                            a.next();
                        }
                        (Some(_), Some((j, _))) => {
                            col_rows[*j].insert(t);
                            b.next();
                        }
                        (Some((i, _)), None) => {
                            col_rows[*i].remove(&t);
                            a.next();
                        }
                        (None, Some((j, _))) => {
                            col_rows[*j].insert(t);
                            b.next();
                        }
                        (None, None) => break,
                    }
                }
            }
            if !new.is_zero() {
                queue.insert((new.nnz(), t));
                rows[t] = Some(new);
            }
        }
        is_pivot[pcol] = true;
        pivots.push((pcol, prow));
    }

    // Each pivot equation only involves its own pivot, later pivots and free
    // columns, so back-substitution runs in reverse elimination order.
    let free: Vec<usize> = (0..ncols).filter(|c| !is_pivot[*c]).collect();
    free.iter()
        .map(|&f| {
            let mut x: BTreeMap<usize, Rational> = BTreeMap::new();
            x.insert(f, Rational::one());
            for (pcol, prow) in pivots.iter().rev() {
                let mut s = Rational::zero();
                let mut pval = Rational::zero();
                for (c, v) in prow.iter() {
                    if c == *pcol {
                        pval = v.clone();
                    } else if let Some(xc) = x.get(&c) {
                        s += v * xc;
                    }
                }
                if !s.is_zero() {
                    x.insert(*pcol, -(s / pval));
                }
            }
            SparseVec::from_entries(ncols, x)
        })
        .collect()
}

/// Dimension bookkeeping for a direct-sum check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectSumCheck {
    pub part_dims: Vec<usize>,
    pub sum_dim: usize,
    pub direct: bool,
}

/// Checks whether a family of subspaces is independent: the dimension of the
/// sum equals the sum of the dimensions.
pub fn direct_sum(parts: &[&OperatorSubspace]) -> Result<(OperatorSubspace, DirectSumCheck)> {
    let ambient = parts
        .first()
        .map(|p| p.ambient_dim())
        .ok_or(Error::Empty("direct_sum needs at least one part"))?;
    let mut total = OperatorSubspace::zero(ambient);
    for p in parts {
        total = total.sum(p)?;
    }
    let part_dims: Vec<usize> = parts.iter().map(|p| p.dim()).collect();
    let direct = part_dims.iter().sum::<usize>() == total.dim();
    let sum_dim = total.dim();
    Ok((
        total,
        DirectSumCheck {
            part_dims,
            sum_dim,
            direct,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn v(xs: &[i64]) -> SparseVec {
        SparseVec::from_dense(&xs.iter().map(|x| q(*x)).collect::<Vec<_>>())
    }

    #[test]
    fn standard_basis_spans_everything() {
        let s = echelonize(&[v(&[1, 0]), v(&[0, 1])]).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.basis(), &[v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(s.pivot_cols(), vec![0, 1]);
    }

    #[test]
    fn proportional_rows_collapse() {
        let s = echelonize(&[v(&[1, 2]), v(&[2, 4])]).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.basis(), &[v(&[1, 2])]);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(matches!(
            echelonize(&[v(&[1, 2]), v(&[1, 2, 3])]),
            Err(Error::DimensionMismatch { .. })
        ));
        let s = echelonize(&[v(&[1, 0])]).unwrap();
        assert!(s.contains(&v(&[1])).is_err());
        assert!(s.equal(&OperatorSubspace::zero(3)).is_err());
    }

    #[test]
    fn nullspace_examples() {
        let zero = SparseOperator::zero(3, 3);
        assert_eq!(nullspace(&zero).dim(), 3);
        let id = SparseOperator::identity(3);
        assert_eq!(nullspace(&id).dim(), 0);
        let a = SparseOperator::from_dense(&[vec![q(1), q(1)], vec![q(2), q(2)]]);
        let k = nullspace(&a);
        assert_eq!(k.dim(), 1);
        assert_eq!(k.basis(), &[v(&[1, -1])]);
    }

    #[test]
    fn containment() {
        let s = echelonize(&[v(&[1, 0])]).unwrap();
        assert!(s.contains(&v(&[2, 0])).unwrap());
        assert!(!s.contains(&v(&[0, 1])).unwrap());
    }

    #[test]
    fn span_is_order_independent() {
        let vs = vec![
            v(&[1, 2, 3, 0]),
            v(&[0, 1, -1, 2]),
            v(&[1, 3, 2, 2]),
            v(&[5, 0, 0, 1]),
        ];
        let mut shuffled = vs.clone();
        shuffled.reverse();
        shuffled.swap(0, 2);
        let a = echelonize(&vs).unwrap();
        let b = echelonize(&shuffled).unwrap();
        assert!(a.equal(&b).unwrap());
        assert_eq!(a.dim(), 3);
    }

    #[test]
    fn intersection_of_planes() {
        let a = echelonize(&[v(&[1, 0, 0]), v(&[0, 1, 0])]).unwrap();
        let b = echelonize(&[v(&[0, 1, 0]), v(&[0, 0, 1])]).unwrap();
        let i = a.intersection(&b).unwrap();
        assert_eq!(i.basis(), &[v(&[0, 1, 0])]);
        let (_, check) = direct_sum(&[&a, &b]).unwrap();
        assert!(!check.direct);
        assert_eq!(check.sum_dim, 3);
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..6, 1usize..7).prop_flat_map(|(m, n)| {
            proptest::collection::vec(
                proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..4], n),
                m,
            )
        })
    }

    fn to_op(rows: &[Vec<i64>]) -> SparseOperator {
        SparseOperator::from_dense(
            &rows
                .iter()
                .map(|r| r.iter().map(|x| q(*x)).collect())
                .collect::<Vec<_>>(),
        )
    }

    proptest! {
        #[test]
        fn rank_nullity(rows in small_matrix()) {
            let a = to_op(&rows);
            let k = nullspace(&a);
            let r = echelonize_in(a.ncols(), a.rows()).unwrap().dim();
            prop_assert_eq!(r + k.dim(), a.ncols());
            for x in k.basis() {
                prop_assert!(a.apply(x).unwrap().is_zero());
            }
        }

        #[test]
        fn echelonize_is_idempotent(rows in small_matrix()) {
            let a = to_op(&rows);
            let s = echelonize_in(a.ncols(), a.rows()).unwrap();
            let again = echelonize_in(a.ncols(), s.basis()).unwrap();
            prop_assert_eq!(&s, &again);
            for b in s.basis() {
                prop_assert!(b.leading().unwrap().1.is_one());
            }
            let pivots = s.pivot_cols();
            prop_assert!(pivots.windows(2).all(|w| w[0] < w[1]));
            for (k, b) in s.basis().iter().enumerate() {
                for (j, p) in pivots.iter().enumerate() {
                    if j != k {
                        prop_assert!(b.get(*p).is_zero());
                    }
                }
            }
        }

        #[test]
        fn equality_is_an_equivalence(x in small_matrix(), y in small_matrix()) {
            let a = to_op(&x);
            let sa = echelonize_in(a.ncols(), a.rows()).unwrap();
            prop_assert!(sa.equal(&sa).unwrap());
            let b = to_op(&y);
            if b.ncols() == a.ncols() {
                let sb = echelonize_in(b.ncols(), b.rows()).unwrap();
                let ab = sa.equal(&sb).unwrap();
                prop_assert_eq!(ab, sb.equal(&sa).unwrap());
                let mutual = sa.is_subspace_of(&sb).unwrap() && sb.is_subspace_of(&sa).unwrap();
                prop_assert_eq!(ab, mutual);
            }
        }
    }
}
