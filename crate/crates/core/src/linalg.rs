//! Exact sparse linear algebra over the rationals.
//!
//! Everything here works with [`Q`] (arbitrary precision, always reduced).
//! Subspaces are stored in reduced row echelon form, which makes them
//! canonical: two equal subspaces of the same ambient space have
//! structurally identical [`SubspaceBasis`] values.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("subspace is not contained in the ambient subspace")]
    NotSubspace,
}

/// Sparse coordinate vector; entries sorted by index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Q)>,
}

impl SparseVec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        Self {
            entries: vec![(i, Q::one())],
        }
    }

    /// Builds from `(index, value)` pairs in any order; duplicates are summed.
    pub fn from_pairs<I: IntoIterator<Item = (usize, Q)>>(pairs: I) -> Self {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, c) in pairs {
            *acc.entry(i).or_insert_with(Q::zero) += c;
        }
        Self {
            entries: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, c)| (i, c.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, c) in &self.entries {
            out[*i] = c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> + '_ {
        self.entries.iter().map(|(i, c)| (*i, c))
    }

    pub fn get(&self, i: usize) -> Option<&Q> {
        self.entries
            .binary_search_by_key(&i, |(j, _)| *j)
            .ok()
            .map(|pos| &self.entries[pos].1)
    }

    pub fn leading(&self) -> Option<(usize, &Q)> {
        self.entries.first().map(|(i, c)| (*i, c))
    }

    /// Largest index with a nonzero entry.
    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    pub fn scale(&mut self, c: &Q) {
        if c.is_zero() {
            self.entries.clear();
            return;
        }
        for (_, v) in self.entries.iter_mut() {
            *v *= c;
        }
    }

    pub fn scaled(&self, c: &Q) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// Returns `self + c * other`.
    pub fn add_scaled(&self, other: &SparseVec, c: &Q) -> SparseVec {
        if c.is_zero() || other.is_zero() {
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
                        out.push((*j, y * c));
                        b.next();
                    } else {
                        let s = x + y * c;
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
                    out.push((*j, y * c));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVec { entries: out }
    }

    pub fn dot(&self, other: &SparseVec) -> Q {
        let mut acc = Q::zero();
        let (mut a, mut b) = (
            self.entries.iter().peekable(),
            other.entries.iter().peekable(),
        );
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

    /// Pushes an entry whose index is larger than every stored index.
    pub(crate) fn push_unchecked(&mut self, i: usize, c: Q) {
        debug_assert!(self.entries.last().is_none_or(|(j, _)| *j < i));
        if !c.is_zero() {
            self.entries.push((i, c));
        }
    }
}

impl fmt::Display for SparseVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, c)) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}: {c}")?;
        }
        write!(f, "}}")
    }
}

/// Sparse rational matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl RationalMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![SparseVec::new(); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            data: (0..n).map(SparseVec::unit).collect(),
        }
    }

    pub fn from_rows(cols: usize, data: Vec<SparseVec>) -> Self {
        debug_assert!(data.iter().all(|r| r.max_index().is_none_or(|m| m < cols)));
        Self {
            rows: data.len(),
            cols,
            data,
        }
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().map(|r| SparseVec::from_dense(r)).collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| q(x)).collect())
            .collect();
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn row_vecs(&self) -> &[SparseVec] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.data[r].get(c).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(SparseVec::is_zero)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(SparseVec::nnz).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut cols: Vec<SparseVec> = vec![SparseVec::new(); self.cols];
        for (r, row) in self.data.iter().enumerate() {
            for (c, v) in row.iter() {
                cols[c].push_unchecked(r, v.clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data: cols,
        }
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &RationalMatrix) -> Result<RationalMatrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let data = self
            .data
            .iter()
            .map(|row| {
                let mut acc = SparseVec::new();
                for (k, c) in row.iter() {
                    acc = acc.add_scaled(&other.data[k], c);
                }
                acc
            })
            .collect();
        Ok(RationalMatrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Applies the matrix to a column vector.
    pub fn apply(&self, v: &SparseVec) -> Result<SparseVec, LinalgError> {
        if v.max_index().is_some_and(|m| m >= self.cols) {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                found: v.max_index().unwrap() + 1,
            });
        }
        Ok(SparseVec::from_pairs(
            self.data.iter().enumerate().map(|(r, row)| (r, row.dot(v))),
        ))
    }

    pub fn rank(&self) -> usize {
        SubspaceBasis::span(self.cols, self.data.iter().cloned()).dim()
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let cells: Vec<String> = (0..self.cols).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// A subspace of `Q^ambient_dim` stored as the nonzero rows of its RREF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    ambient_dim: usize,
    /// pivot column -> reduced row (leading entry 1, zero in every other pivot column)
    rows: BTreeMap<usize, SparseVec>,
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            rows: BTreeMap::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            rows: (0..ambient_dim).map(|i| (i, SparseVec::unit(i))).collect(),
        }
    }

    pub fn span<I: IntoIterator<Item = SparseVec>>(ambient_dim: usize, vectors: I) -> Self {
        let mut s = Self::zero(ambient_dim);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Basis vectors in order of increasing pivot.
    pub fn basis(&self) -> impl Iterator<Item = &SparseVec> + '_ {
        self.rows.values()
    }

    pub fn basis_vec(&self) -> Vec<SparseVec> {
        self.rows.values().cloned().collect()
    }

    pub(crate) fn row_at_pivot(&self, p: usize) -> Option<&SparseVec> {
        self.rows.get(&p)
    }

    /// Projects `v` along the subspace: the result has zeros in every pivot
    /// column and differs from `v` by an element of the subspace.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let hits: Vec<(usize, Q)> = v
            .iter()
            .filter(|(i, _)| self.rows.contains_key(i))
            .map(|(i, c)| (i, -c.clone()))
            .collect();
        let mut out = v.clone();
        for (p, c) in hits {
            out = out.add_scaled(&self.rows[&p], &c);
        }
        out
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the spanning set. Returns `true` when the dimension grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        debug_assert!(v.max_index().is_none_or(|m| m < self.ambient_dim));
        let mut r = self.reduce(&v);
        let Some((p, lead)) = r.leading() else {
            return false;
        };
        let inv = lead.recip();
        r.scale(&inv);
        for row in self.rows.values_mut() {
            if let Some(c) = row.get(p) {
                let c = -c.clone();
                *row = row.add_scaled(&r, &c);
            }
        }
        self.rows.insert(p, r);
        true
    }

    /// Subspace sum, by concatenation and re-reduction.
    pub fn sum(&self, other: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
        self.check_same_ambient(other)?;
        let mut out = self.clone();
        for v in other.basis() {
            out.insert(v.clone());
        }
        Ok(out)
    }

    /// Subspace intersection, as the image of the left kernel of the
    /// stacked bases.
    pub fn intersection(&self, other: &SubspaceBasis) -> Result<SubspaceBasis, LinalgError> {
        self.check_same_ambient(other)?;
        let a = self.basis_vec();
        let b = other.basis_vec();
        let stacked = RationalMatrix::from_rows(
            self.ambient_dim,
            a.iter().chain(b.iter()).cloned().collect(),
        );
        let relations = kernel(&stacked.transpose());
        let vectors = relations.basis().map(|rel| {
            let mut acc = SparseVec::new();
            for (i, c) in rel.iter() {
                if i < a.len() {
                    acc = acc.add_scaled(&a[i], c);
                }
            }
            acc
        });
        Ok(SubspaceBasis::span(
            self.ambient_dim,
            vectors.collect::<Vec<_>>(),
        ))
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.ambient_dim == other.ambient_dim && self.basis().all(|v| other.contains(v))
    }

    fn check_same_ambient(&self, other: &SubspaceBasis) -> Result<(), LinalgError> {
        if self.ambient_dim != other.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }
}

/// Reduced row echelon form and pivot columns; zero rows are kept at the bottom.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let s = SubspaceBasis::span(m.cols, m.data.iter().cloned());
    let pivots = s.pivots();
    let mut data: Vec<SparseVec> = s.rows.into_values().collect();
    data.resize(m.rows, SparseVec::new());
    (
        RationalMatrix {
            rows: m.rows,
            cols: m.cols,
            data,
        },
        pivots,
    )
}

/// Right null space `{ v : m v = 0 }`.
pub fn kernel(m: &RationalMatrix) -> SubspaceBasis {
    let reduced = SubspaceBasis::span(m.cols, m.data.iter().cloned());
    let mut is_pivot = vec![false; m.cols];
    for p in reduced.rows.keys() {
        is_pivot[*p] = true;
    }
    let vectors: Vec<SparseVec> = (0..m.cols)
        .filter(|c| !is_pivot[*c])
        .map(|free| {
            let mut pairs: Vec<(usize, Q)> = vec![(free, Q::one())];
            for (p, row) in &reduced.rows {
                if let Some(c) = row.get(free) {
                    pairs.push((*p, -c.clone()));
                }
            }
            SparseVec::from_pairs(pairs)
        })
        .collect();
    SubspaceBasis::span(m.cols, vectors)
}

/// Coset representatives of `ambient / sub`. The representatives have zeros
/// in every pivot column of `sub` and are themselves in reduced echelon form.
pub fn quotient_basis(
    ambient: &SubspaceBasis,
    sub: &SubspaceBasis,
) -> Result<Vec<SparseVec>, LinalgError> {
    if ambient.ambient_dim != sub.ambient_dim {
        return Err(LinalgError::DimensionMismatch {
            expected: ambient.ambient_dim,
            found: sub.ambient_dim,
        });
    }
    if !sub.is_subspace_of(ambient) {
        return Err(LinalgError::NotSubspace);
    }
    let complement =
        SubspaceBasis::span(ambient.ambient_dim, ambient.basis().map(|v| sub.reduce(v)));
    Ok(complement.basis_vec())
}

/// Membership test; on success returns the coefficients with respect to
/// the basis of `s` (in pivot order).
pub fn membership(v: &SparseVec, s: &SubspaceBasis) -> Result<Option<Vec<Q>>, LinalgError> {
    if let Some(m) = v.max_index() {
        if m >= s.ambient_dim {
            return Err(LinalgError::DimensionMismatch {
                expected: s.ambient_dim,
                found: m + 1,
            });
        }
    }
    if !s.contains(v) {
        return Ok(None);
    }
    Ok(Some(
        s.rows
            .keys()
            .map(|p| v.get(*p).cloned().unwrap_or_else(Q::zero))
            .collect(),
    ))
}

/// Clears denominators of a rational vector and divides by the content,
/// making the first nonzero entry positive. Used for display.
pub fn primitive_integer_vector(v: &SparseVec) -> SparseVec {
    use num_integer::Integer;
    if v.is_zero() {
        return v.clone();
    }
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let ints: Vec<(usize, BigInt)> = v
        .iter()
        .map(|(i, c)| (i, (c * Q::from_integer(lcm.clone())).to_integer()))
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, (_, n)| acc.gcd(n));
    let sign = if ints[0].1.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    SparseVec::from_pairs(
        ints.into_iter()
            .map(|(i, n)| (i, Q::from_integer(&n / &g * &sign))),
    )
}
