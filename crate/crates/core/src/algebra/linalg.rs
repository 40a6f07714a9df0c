//! Dense linear algebra over a [`Scalars`] context.
//!
//! Elimination only ever divides by units, so the same routines serve fields
//! and (for invertibility questions) local rings.

use super::Scalars;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    /// Builds a matrix from row vectors; all rows must have length `cols`.
    pub fn from_rows(rows: Vec<Vec<E>>, cols: usize) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Self { rows: n, cols, data })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<E>], rows: usize) -> Result<Self> {
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
        }
        Ok(Self::from_fn(rows, columns.len(), |i, j| columns[j][i].clone()))
    }

    pub fn zeros<S: Scalars<Elem = E>>(s: &S, rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, s.zero())
    }

    pub fn identity<S: Scalars<Elem = E>>(s: &S, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { s.one() } else { s.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &E {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: E) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<E> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row_vectors(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<F: Clone>(&self, f: impl FnMut(&E) -> F) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul<S: Scalars<Elem = E>>(&self, s: &S, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = Self::zeros(s, self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.get(i, l);
                if s.is_zero(a) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = s.add(out.get(i, j), &s.mul(a, other.get(l, j)));
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add<S: Scalars<Elem = E>>(&self, s: &S, other: &Self) -> Result<Self> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch {
                expected: self.rows * self.cols,
                found: other.rows * other.cols,
            });
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| s.add(self.get(i, j), other.get(i, j))))
    }

    pub fn apply<S: Scalars<Elem = E>>(&self, s: &S, v: &[E]) -> Result<Vec<E>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| {
                let mut acc = s.zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !s.is_zero(a) && !s.is_zero(x) {
                        acc = s.add(&acc, &s.mul(a, x));
                    }
                }
                acc
            })
            .collect())
    }

    pub fn pow<S: Scalars<Elem = E>>(&self, s: &S, e: u32) -> Result<Self> {
        let mut acc = Self::identity(s, self.rows);
        for _ in 0..e {
            acc = acc.mul(s, self)?;
        }
        Ok(acc)
    }

    pub fn is_zero<S: Scalars<Elem = E>>(&self, s: &S) -> bool {
        self.data.iter().all(|x| s.is_zero(x))
    }

    /// Inverse by Gauss-Jordan elimination with unit pivots.
    pub fn inverse<S: Scalars<Elem = E>>(&self, s: &S) -> Option<Self> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.row_vectors();
        let mut b = Self::identity(s, n).row_vectors();
        for col in 0..n {
            let piv = (col..n).find(|&i| s.is_unit(&a[i][col]))?;
            a.swap(col, piv);
            b.swap(col, piv);
            let inv = s.inv(&a[col][col])?;
            scale_row(s, &mut a[col], &inv);
            scale_row(s, &mut b[col], &inv);
            for i in 0..n {
                if i != col && !s.is_zero(&a[i][col]) {
                    let f = a[i][col].clone();
                    let (ac, bc) = (a[col].clone(), b[col].clone());
                    axpy(s, &mut a[i], &f, &ac);
                    axpy(s, &mut b[i], &f, &bc);
                }
            }
        }
        Self::from_rows(b, n).ok()
    }
}

fn scale_row<S: Scalars>(s: &S, row: &mut [S::Elem], c: &S::Elem) {
    for x in row.iter_mut() {
        *x = s.mul(x, c);
    }
}

/// `row -= f * other`
fn axpy<S: Scalars>(s: &S, row: &mut [S::Elem], f: &S::Elem, other: &[S::Elem]) {
    for (x, y) in row.iter_mut().zip(other) {
        if !s.is_zero(y) {
            *x = s.sub(x, &s.mul(f, y));
        }
    }
}

/// Reduced row echelon form of the given rows. Returns the nonzero rows and
/// their pivot columns.
pub fn rref<S: Scalars>(s: &S, rows: &[Vec<S::Elem>], ncols: usize) -> (Vec<Vec<S::Elem>>, Vec<usize>) {
    let mut a: Vec<Vec<S::Elem>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(piv) = (r..a.len()).find(|&i| s.is_unit(&a[i][col])) else {
            continue;
        };
        a.swap(r, piv);
        let inv = s.inv(&a[r][col]).unwrap();
        scale_row(s, &mut a[r], &inv);
        let pr = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !s.is_zero(&row[col]) {
                let f = row[col].clone();
                axpy(s, row, &f, &pr);
            }
        }
        pivots.push(col);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank<S: Scalars>(s: &S, m: &Matrix<S::Elem>) -> usize {
    rref(s, &m.row_vectors(), m.cols()).1.len()
}

/// Basis of `{v : M v = 0}`, one vector per free column, in increasing order
/// of the free column.
pub fn nullspace<S: Scalars>(s: &S, m: &Matrix<S::Elem>) -> Vec<Vec<S::Elem>> {
    let n = m.cols();
    let (rows, pivots) = rref(s, &m.row_vectors(), n);
    let mut out = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![s.zero(); n];
        v[free] = s.one();
        for (row, &p) in rows.iter().zip(&pivots) {
            v[p] = s.neg(&row[free]);
        }
        out.push(v);
    }
    out
}

/// A particular solution of `M x = b` with all free variables zero.
pub fn solve<S: Scalars>(s: &S, m: &Matrix<S::Elem>, b: &[S::Elem]) -> Option<Vec<S::Elem>> {
    if b.len() != m.rows() {
        return None;
    }
    let n = m.cols();
    let aug: Vec<Vec<S::Elem>> = (0..m.rows())
        .map(|i| {
            let mut row = m.row(i).to_vec();
            row.push(b[i].clone());
            row
        })
        .collect();
    let (rows, pivots) = rref(s, &aug, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![s.zero(); n];
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// A subspace of `S^dim` held in canonical reduced row echelon form, so equal
/// subspaces compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace<E> {
    dim: usize,
    rows: Vec<Vec<E>>,
    pivots: Vec<usize>,
}

impl<E: Clone + PartialEq> Subspace<E> {
    pub fn zero(dim: usize) -> Self {
        Self { dim, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn spanned_by<S: Scalars<Elem = E>>(s: &S, dim: usize, vectors: &[Vec<E>]) -> Result<Self> {
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
            }
        }
        let (rows, pivots) = rref(s, vectors, dim);
        Ok(Self { dim, rows, pivots })
    }

    pub fn full<S: Scalars<Elem = E>>(s: &S, dim: usize) -> Self {
        let id = Matrix::identity(s, dim);
        Self { dim, rows: id.row_vectors(), pivots: (0..dim).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn basis(&self) -> &[Vec<E>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Normal form of `v` modulo the subspace: zero exactly on the members.
    pub fn reduce<S: Scalars<Elem = E>>(&self, s: &S, v: &[E]) -> Vec<E> {
        let mut w = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !s.is_zero(&w[p]) {
                let f = w[p].clone();
                axpy(s, &mut w, &f, row);
            }
        }
        w
    }

    pub fn contains<S: Scalars<Elem = E>>(&self, s: &S, v: &[E]) -> bool {
        self.reduce(s, v).iter().all(|x| s.is_zero(x))
    }

    pub fn is_subspace_of<S: Scalars<Elem = E>>(&self, s: &S, other: &Self) -> bool {
        self.rows.iter().all(|r| other.contains(s, r))
    }

    /// Adds `v` to the span; returns the reduced residual when it was new.
    pub fn insert<S: Scalars<Elem = E>>(&mut self, s: &S, v: &[E]) -> Option<Vec<E>> {
        let w = self.reduce(s, v);
        let p = w.iter().position(|x| !s.is_zero(x))?;
        let residual = w.clone();
        let mut w = w;
        let inv = s.inv(&w[p]).expect("subspaces need field scalars");
        scale_row(s, &mut w, &inv);
        for row in self.rows.iter_mut() {
            if !s.is_zero(&row[p]) {
                let f = row[p].clone();
                axpy(s, row, &f, &w);
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.rows.insert(at, w);
        self.pivots.insert(at, p);
        Some(residual)
    }

    /// Coordinates of `v` on the complement spanned by the non-pivot unit
    /// vectors; identifies the quotient space with `S^(dim - dimension)`.
    pub fn quotient_coords<S: Scalars<Elem = E>>(&self, s: &S, v: &[E]) -> Vec<E> {
        let w = self.reduce(s, v);
        (0..self.dim).filter(|c| !self.pivots.contains(c)).map(|c| w[c].clone()).collect()
    }
}

/// A linear endomorphism, applied under a scalar context.
pub trait LinearMap<S: Scalars> {
    fn dims(&self) -> (usize, usize);
    fn apply(&self, s: &S, v: &[S::Elem]) -> Vec<S::Elem>;
}

impl<S: Scalars> LinearMap<S> for Matrix<S::Elem> {
    fn dims(&self) -> (usize, usize) {
        (self.cols(), self.rows())
    }

    fn apply(&self, s: &S, v: &[S::Elem]) -> Vec<S::Elem> {
        Matrix::apply(self, s, v).expect("dimension checked by caller")
    }
}

/// A linear map given by a closure on coordinate vectors.
pub struct FnMap<F> {
    pub dim: usize,
    pub f: F,
}

impl<S: Scalars, F: Fn(&[S::Elem]) -> Vec<S::Elem>> LinearMap<S> for FnMap<F> {
    fn dims(&self) -> (usize, usize) {
        (self.dim, self.dim)
    }

    fn apply(&self, _s: &S, v: &[S::Elem]) -> Vec<S::Elem> {
        (self.f)(v)
    }
}

/// Smallest subspace of `S^dim` containing `seeds` and stable under `maps`.
pub fn span_closure<S: Scalars>(
    s: &S,
    dim: usize,
    seeds: &[Vec<S::Elem>],
    maps: &[&dyn LinearMap<S>],
) -> Result<Subspace<S::Elem>> {
    for m in maps {
        let (a, b) = m.dims();
        if a != dim || b != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: if a != dim { a } else { b } });
        }
    }
    let mut space = Subspace::zero(dim);
    let mut queue = Vec::new();
    for v in seeds {
        if v.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
        }
        if let Some(w) = space.insert(s, v) {
            queue.push(w);
        }
    }
    while let Some(v) = queue.pop() {
        for m in maps {
            let image = m.apply(s, &v);
            if let Some(w) = space.insert(s, &image) {
                queue.push(w);
            }
        }
        if space.dimension() == dim {
            break;
        }
    }
    Ok(space)
}

/// A finite module over `F[z]/(z^k)` presented by its dimension over the
/// field `F` and the matrix of multiplication by `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModule<E> {
    pub k: usize,
    pub zeta: Matrix<E>,
}

impl<E: Clone + PartialEq> FiniteModule<E> {
    pub fn new(k: usize, zeta: Matrix<E>) -> Result<Self> {
        if zeta.rows() != zeta.cols() {
            return Err(Error::DimensionMismatch { expected: zeta.rows(), found: zeta.cols() });
        }
        Ok(Self { k, zeta })
    }

    pub fn dim(&self) -> usize {
        self.zeta.rows()
    }

    /// Dimension of `M / zM` over the residue field.
    pub fn fibre_dim<S: Scalars<Elem = E>>(&self, s: &S) -> usize {
        self.dim() - rank(s, &self.zeta)
    }

    /// Free of rank `r` iff the length is `r·k` and the fibre has dimension `r`.
    pub fn check_free_of_rank<S: Scalars<Elem = E>>(&self, s: &S, r: usize) -> bool {
        self.dim() == r * self.k && self.fibre_dim(s) == r
    }

    /// The rank when the module is free.
    pub fn free_rank<S: Scalars<Elem = E>>(&self, s: &S) -> Option<usize> {
        let r = self.fibre_dim(s);
        self.check_free_of_rank(s, r).then_some(r)
    }
}
