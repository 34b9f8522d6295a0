//! Dense exact linear algebra over F_p.
//!
//! Vectors are rows of residues. Every subspace is held in reduced row-echelon
//! form, which is unique, so subspace equality is plain equality of the basis
//! matrices.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::field::PrimeField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("row {row} has length {found}, expected {expected}")]
    InconsistentRowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("ambient dimensions differ: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
}

/// A dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: PrimeField,
    ncols: usize,
    rows: Vec<Vec<u8>>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix over F_{} ({}x{})", self.field.p(), self.nrows(), self.ncols)?;
        for row in &self.rows {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl Matrix {
    pub fn zeros(field: PrimeField, nrows: usize, ncols: usize) -> Self {
        Self {
            field,
            ncols,
            rows: vec![vec![0; ncols]; nrows],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.rows[i][i] = 1;
        }
        m
    }

    /// Builds a matrix from rows, reducing nothing: entries must already be residues.
    pub fn from_rows(field: PrimeField, ncols: usize, rows: Vec<Vec<u8>>) -> Result<Self, LinalgError> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(LinalgError::InconsistentRowLength {
                    row: i,
                    expected: ncols,
                    found: row.len(),
                });
            }
        }
        Ok(Self { field, ncols, rows })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<u8>] {
        &self.rows
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.rows[r][c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.rows[r][c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&v| v == 0))
    }

    pub fn column(&self, c: usize) -> Vec<u8> {
        self.rows.iter().map(|r| r[c]).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.ncols, other.nrows(), "matrix product shape mismatch");
        let f = self.field;
        let p = f.p() as u32;
        let mut out = Matrix::zeros(f, self.nrows(), other.ncols);
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc = vec![0u32; other.ncols];
            for (k, &a) in row.iter().enumerate() {
                if a == 0 {
                    continue;
                }
                for (slot, &b) in acc.iter_mut().zip(&other.rows[k]) {
                    *slot = (*slot + a as u32 * b as u32) % p;
                }
            }
            out.rows[i] = acc.into_iter().map(|v| v as u8).collect();
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> Matrix {
        assert_eq!(self.nrows(), self.ncols, "power of a non-square matrix");
        let mut acc = Matrix::identity(self.field, self.ncols);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Matrix-vector product `M v`.
    pub fn apply(&self, v: &[u8]) -> Vec<u8> {
        let f = self.field;
        self.rows
            .iter()
            .map(|row| row.iter().zip(v).fold(0u8, |acc, (&a, &b)| f.mul_add(a, b, acc)))
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut ech = Echelon::new(self.field, self.ncols);
        for row in &self.rows {
            ech.insert(row);
        }
        ech.rank()
    }
}

/// Incrementally maintained reduced row-echelon basis.
///
/// Rows are kept fully reduced: each row is zero in every other row's pivot
/// column, so reducing a vector needs one pass over the rows it touches.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: PrimeField,
    ambient: usize,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
    /// column -> index into `rows`, `usize::MAX` when the column has no pivot
    pivot_row: Vec<usize>,
}

impl Echelon {
    pub fn new(field: PrimeField, ambient: usize) -> Self {
        Self {
            field,
            ambient,
            rows: Vec::new(),
            pivots: Vec::new(),
            pivot_row: vec![usize::MAX; ambient],
        }
    }

    pub fn from_subspace(s: &Subspace) -> Self {
        let mut ech = Self::new(s.field, s.ambient);
        for (row, &c) in s.basis.iter().zip(&s.pivots) {
            ech.pivot_row[c] = ech.rows.len();
            ech.rows.push(row.clone());
            ech.pivots.push(c);
        }
        ech
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    /// Replaces `x` by its remainder modulo the current row space.
    pub fn reduce(&self, x: &mut [u8]) {
        debug_assert_eq!(x.len(), self.ambient);
        let p = self.field.p() as u32;
        let hits: Vec<(usize, u32)> = self
            .pivots
            .iter()
            .enumerate()
            .filter(|&(_, &c)| x[c] != 0)
            .map(|(r, &c)| (r, p - x[c] as u32))
            .collect();
        if hits.is_empty() {
            return;
        }
        let mut acc: Vec<u32> = x.iter().map(|&v| v as u32).collect();
        let step = (p - 1) * (p - 1);
        let budget = ((u32::MAX - p) / step).max(1);
        let mut pending = 0;
        for (r, coef) in hits {
            for (a, &b) in acc.iter_mut().zip(&self.rows[r]) {
                *a += coef * b as u32;
            }
            pending += 1;
            if pending == budget {
                acc.iter_mut().for_each(|a| *a %= p);
                pending = 0;
            }
        }
        for (xi, a) in x.iter_mut().zip(acc) {
            *xi = (a % p) as u8;
        }
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        let mut x = v.to_vec();
        self.reduce(&mut x);
        x.iter().all(|&c| c == 0)
    }

    /// Adds `v` to the row space. Returns true when the rank grew.
    pub fn insert(&mut self, v: &[u8]) -> bool {
        let mut x = v.to_vec();
        self.insert_owned(&mut x)
    }

    /// Like [`Echelon::insert`] but reuses the caller's buffer, leaving the
    /// reduced remainder (normalized when it became a new row) in it.
    pub fn insert_owned(&mut self, x: &mut [u8]) -> bool {
        self.reduce(x);
        let Some(c) = x.iter().position(|&v| v != 0) else {
            return false;
        };
        let f = self.field;
        let inv = f.inv(x[c]);
        if inv != 1 {
            x.iter_mut().for_each(|v| *v = f.mul(*v, inv));
        }
        let p = f.p() as u32;
        for row in &mut self.rows {
            let a = row[c];
            if a == 0 {
                continue;
            }
            let coef = p - a as u32;
            for (r, &b) in row.iter_mut().zip(x.iter()) {
                *r = ((*r as u32 + coef * b as u32) % p) as u8;
            }
        }
        self.pivot_row[c] = self.rows.len();
        self.rows.push(x.to_vec());
        self.pivots.push(c);
        true
    }

    pub fn into_subspace(self) -> Subspace {
        let mut pairs: Vec<(usize, Vec<u8>)> = self.pivots.into_iter().zip(self.rows).collect();
        pairs.sort_by_key(|(c, _)| *c);
        let (pivots, basis) = pairs.into_iter().unzip();
        Subspace {
            field: self.field,
            ambient: self.ambient,
            basis,
            pivots,
        }
    }

    pub fn to_subspace(&self) -> Subspace {
        self.clone().into_subspace()
    }
}

/// Returns the reduced row-echelon form of `rows` and its rank.
///
/// The result does not depend on the order of the input rows.
pub fn rref(field: PrimeField, rows: &[Vec<u8>]) -> Result<(Vec<Vec<u8>>, usize), LinalgError> {
    let Some(first) = rows.first() else {
        return Ok((Vec::new(), 0));
    };
    let m = Matrix::from_rows(field, first.len(), rows.to_vec())?;
    let s = Subspace::span(field, m.ncols(), m.rows())?;
    let rank = s.dim();
    Ok((s.basis, rank))
}

/// Right null space `{v : M v = 0}` of a matrix.
pub fn kernel(m: &Matrix) -> Subspace {
    let field = m.field();
    let n = m.ncols();
    let mut ech = Echelon::new(field, n);
    for row in m.rows() {
        ech.insert(row);
    }
    let row_space = ech.into_subspace();
    let mut free_vectors = Vec::new();
    let mut pivot_iter = 0;
    for col in 0..n {
        if pivot_iter < row_space.pivots.len() && row_space.pivots[pivot_iter] == col {
            pivot_iter += 1;
            continue;
        }
        let mut v = vec![0u8; n];
        v[col] = 1;
        for (row, &pc) in row_space.basis.iter().zip(&row_space.pivots) {
            v[pc] = field.neg(row[col]);
        }
        free_vectors.push(v);
    }
    Subspace::span(field, n, &free_vectors).expect("kernel vectors have ambient length")
}

/// A subspace of F_p^ambient held in canonical reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Subspace {
    #[serde(skip)]
    field: PrimeField,
    ambient: usize,
    basis: Vec<Vec<u8>>,
    #[serde(skip)]
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subspace(dim {} in F_{}^{}, pivots {:?})",
            self.dim(),
            self.field.p(),
            self.ambient,
            self.pivots
        )
    }
}

impl Subspace {
    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Self {
            field,
            ambient,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        let id = Matrix::identity(field, ambient);
        Self {
            field,
            ambient,
            basis: id.rows,
            pivots: (0..ambient).collect(),
        }
    }

    pub fn span(field: PrimeField, ambient: usize, vectors: &[Vec<u8>]) -> Result<Self, LinalgError> {
        let mut ech = Echelon::new(field, ambient);
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != ambient {
                return Err(LinalgError::InconsistentRowLength {
                    row: i,
                    expected: ambient,
                    found: v.len(),
                });
            }
            ech.insert(v);
        }
        Ok(ech.into_subspace())
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: usize) -> Result<(), LinalgError> {
        if self.ambient != other {
            return Err(LinalgError::AmbientMismatch {
                left: self.ambient,
                right: other,
            });
        }
        Ok(())
    }

    pub fn contains(&self, v: &[u8]) -> Result<bool, LinalgError> {
        self.check_ambient(v.len())?;
        Ok(Echelon::from_subspace(self).contains(v))
    }

    /// The join `A + B`.
    pub fn sum(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_ambient(other.ambient)?;
        let mut ech = Echelon::from_subspace(self);
        for v in &other.basis {
            ech.insert(v);
        }
        Ok(ech.into_subspace())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, LinalgError> {
        self.check_ambient(other.ambient)?;
        let ech = Echelon::from_subspace(other);
        Ok(self.basis.iter().all(|v| ech.contains(v)))
    }

    /// `dim(A ∩ B)`, via `dim A + dim B - dim(A + B)`.
    pub fn intersection_dim(&self, other: &Subspace) -> Result<usize, LinalgError> {
        let s = self.sum(other)?;
        Ok(self.dim() + other.dim() - s.dim())
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[u8]) -> Option<Vec<u8>> {
        if v.len() != self.ambient || !Echelon::from_subspace(self).contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|&c| v[c]).collect())
    }

    /// The vector `Σ coeffs[i] · basis[i]`.
    pub fn combine(&self, coeffs: &[u8]) -> Vec<u8> {
        let f = self.field;
        let mut out = vec![0u8; self.ambient];
        for (&a, row) in coeffs.iter().zip(&self.basis) {
            if a == 0 {
                continue;
            }
            for (o, &b) in out.iter_mut().zip(row) {
                *o = f.mul_add(a, b, *o);
            }
        }
        out
    }
}
