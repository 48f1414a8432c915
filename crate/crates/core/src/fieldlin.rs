//! Dense linear algebra over a prime field GF(p).

use crate::error::{Error, Result};
use std::fmt;

/// The prime field GF(p). Elements are stored as `u32` in `0..p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Field {
    p: u32,
}

impl Default for Field {
    fn default() -> Self {
        Field { p: 2 }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn new(p: u64) -> Result<Field> {
        if p >= (1u64 << 31) || !is_prime(p) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Field { p: p as u32 })
    }

    pub fn gf2() -> Field {
        Field { p: 2 }
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.p
    }

    /// Reduce an arbitrary integer into `0..p`.
    #[inline]
    pub fn reduce(&self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1u32 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a % self.p != 0, "inverse of zero");
        self.pow(a, self.p as u64 - 2)
    }

    /// `(-1)^k` as a field element.
    #[inline]
    pub fn sign(&self, k: usize) -> u32 {
        if k % 2 == 0 {
            1 % self.p
        } else {
            self.neg(1)
        }
    }
}

/// A dense matrix over GF(p), stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<GF({})>{}x{}{:?}", self.field.p, self.rows, self.cols, self.to_rows())
    }
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref {
    pub matrix: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % field.p;
        }
        m
    }

    /// Build from integer rows; entries are reduced mod p.
    pub fn from_rows(field: Field, rows: &[Vec<i64>]) -> Result<Matrix> {
        let c = rows.first().map_or(0, |row| row.len());
        Matrix::from_rows_with_cols(field, rows, c)
    }

    /// Build from integer rows with an explicit column count (useful for zero rows).
    pub fn from_rows_with_cols(field: Field, rows: &[Vec<i64>], cols: usize) -> Result<Matrix> {
        let mut m = Matrix::zeros(field, rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{cols} columns"),
                    found: format!("{} in row {i}", row.len()),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                m.data[i * cols + j] = field.reduce(x);
            }
        }
        Ok(m)
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, f: impl Fn(usize, usize) -> u32) -> Matrix {
        let mut m = Matrix::zeros(field, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j) % field.p;
            }
        }
        m
    }

    /// A single column vector.
    pub fn column(field: Field, v: &[u32]) -> Matrix {
        Matrix::from_fn(field, v.len(), 1, |i, _| v[i])
    }

    #[inline]
    pub fn field(&self) -> Field {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[u32] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    fn check_field(&self, other: &Matrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.p, other.field.p));
        }
        Ok(())
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        let p = self.field.p as u64;
        let mut out = Matrix::zeros(self.field, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (x, &b) in acc.iter_mut().zip(orow) {
                    *x = (*x + a * b as u64) % p;
                }
            }
            for j in 0..other.cols {
                out.data[i * other.cols + j] = acc[j] as u32;
            }
        }
        Ok(out)
    }

    /// Product that panics on shape mismatch; for internal use where shapes are invariants.
    pub(crate) fn dot(&self, other: &Matrix) -> Matrix {
        self.mul(other).expect("matrix shapes agree")
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        let mut out = self.clone();
        for (x, &y) in out.data.iter_mut().zip(&other.data) {
            *x = self.field.add(*x, y);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.add(&other.scale(self.field.neg(1)))
    }

    pub fn scale(&self, c: u32) -> Matrix {
        let mut out = self.clone();
        for x in out.data.iter_mut() {
            *x = self.field.mul(*x, c % self.field.p);
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Horizontal concatenation. `rows` is used when the list is empty.
    pub fn hstack(field: Field, rows: usize, blocks: &[&Matrix]) -> Result<Matrix> {
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut off = 0;
        for b in blocks {
            if b.rows != rows {
                return Err(Error::DimensionMismatch {
                    expected: format!("{rows} rows"),
                    found: format!("{} rows", b.rows),
                });
            }
            out.set_block(0, off, b);
            off += b.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation. `cols` is used when the list is empty.
    pub fn vstack(field: Field, cols: usize, blocks: &[&Matrix]) -> Result<Matrix> {
        let rows: usize = blocks.iter().map(|b| b.rows).sum();
        let mut out = Matrix::zeros(field, rows, cols);
        let mut off = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::DimensionMismatch {
                    expected: format!("{cols} columns"),
                    found: format!("{} columns", b.cols),
                });
            }
            out.set_block(off, 0, b);
            off += b.rows;
        }
        Ok(out)
    }

    /// Copy `b` into `self` with its top-left corner at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    /// Add `b` into `self` at `(r0, c0)`.
    pub fn add_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        for i in 0..b.rows {
            for j in 0..b.cols {
                let idx = (r0 + i) * self.cols + c0 + j;
                self.data[idx] = self.field.add(self.data[idx], b.get(i, j));
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(self.field, rows, cols, |i, j| self.get(r0 + i, c0 + j))
    }

    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, self.rows, cols.len(), |i, j| self.get(i, cols[j]))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), self.cols, |i, j| self.get(rows[i], j))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Matrix) -> Result<Matrix> {
        self.check_field(other)?;
        let f = self.field;
        Ok(Matrix::from_fn(f, self.rows * other.rows, self.cols * other.cols, |i, j| {
            f.mul(self.get(i / other.rows, j / other.cols), other.get(i % other.rows, j % other.cols))
        }))
    }

    /// Row-reduce, restricting pivot search to the first `limit` columns.
    fn rref_limited(&self, limit: usize) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..limit.min(m.cols) {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c));
            for j in 0..m.cols {
                let idx = r * m.cols + j;
                m.data[idx] = f.mul(m.data[idx], inv);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in c..m.cols {
                    let v = f.mul(factor, m.data[r * m.cols + j]);
                    let idx = i * m.cols + j;
                    m.data[idx] = f.sub(m.data[idx], v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { matrix: m, pivots }
    }

    /// Reduced row echelon form: leftmost pivot column, first nonzero row.
    pub fn rref(&self) -> Rref {
        self.rref_limited(self.cols)
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    /// Basis of the null space as the columns of a `cols x k` matrix.
    ///
    /// Column `t` has a 1 at the `t`-th free column and zeros at the other free columns,
    /// so the coordinates of a kernel vector are its entries at [`Matrix::free_columns`].
    pub fn kernel_basis(&self) -> Matrix {
        self.kernel_with_free().0
    }

    /// Kernel basis together with the free columns it is normalised at.
    pub fn kernel_with_free(&self) -> (Matrix, Vec<usize>) {
        let Rref { matrix: r, pivots } = self.rref();
        let free = complement(&pivots, self.cols);
        let f = self.field;
        let mut k = Matrix::zeros(f, self.cols, free.len());
        for (t, &fc) in free.iter().enumerate() {
            k.set(fc, t, 1);
            for (i, &pc) in pivots.iter().enumerate() {
                k.set(pc, t, f.neg(r.get(i, fc)));
            }
        }
        (k, free)
    }

    /// Columns not holding a pivot of the RREF.
    pub fn free_columns(&self) -> Vec<usize> {
        complement(&self.rref().pivots, self.cols)
    }

    /// Some `X` with `self * X = b`; free variables are set to zero.
    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        self.check_field(b)?;
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch {
                expected: format!("{} rows", self.rows),
                found: format!("{} rows", b.rows),
            });
        }
        let aug = Matrix::hstack(self.field, self.rows, &[self, b])?;
        let Rref { matrix: r, pivots } = aug.rref_limited(self.cols);
        for i in pivots.len()..r.rows {
            if (self.cols..r.cols).any(|j| r.get(i, j) != 0) {
                return Err(Error::NoSolution);
            }
        }
        let mut x = Matrix::zeros(self.field, self.cols, b.cols);
        for (i, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(pc, j, r.get(i, self.cols + j));
            }
        }
        Ok(x)
    }

    /// Indices of a maximal linearly independent set of columns (the RREF pivots).
    pub fn image_pivots(&self) -> Vec<usize> {
        self.rref().pivots
    }

    /// Coordinates not hit by pivots of the column space.
    ///
    /// The standard basis vectors at these indices span a complement of the column space.
    pub fn complement_pivots(&self) -> Vec<usize> {
        let pivots = self.transpose().rref().pivots;
        complement(&pivots, self.rows)
    }
}

fn complement(sorted: &[usize], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - sorted.len());
    let mut it = sorted.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}

/// A quotient `V / W` with explicit projection and section.
///
/// `W` is the column space of the input. The quotient basis is the standard basis
/// vectors of `V` at the complement pivots, so `proj * lift = I`.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// `dim(V/W) x dim V`
    pub proj: Matrix,
    /// `dim V x dim(V/W)`
    pub lift: Matrix,
    /// Indices into the standard basis of `V` representing the quotient basis.
    pub basis: Vec<usize>,
}

impl Quotient {
    /// Quotient of `GF(p)^ambient` by the span of the columns of `w`.
    pub fn new(w: &Matrix) -> Quotient {
        let f = w.field;
        let n = w.rows;
        let Rref { matrix: r, pivots } = w.transpose().rref();
        let q = complement(&pivots, n);
        let mut proj = Matrix::zeros(f, q.len(), n);
        for (t, &qi) in q.iter().enumerate() {
            proj.set(t, qi, 1);
        }
        for (i, &pc) in pivots.iter().enumerate() {
            for (t, &qi) in q.iter().enumerate() {
                proj.set(t, pc, f.neg(r.get(i, qi)));
            }
        }
        let mut lift = Matrix::zeros(f, n, q.len());
        for (t, &qi) in q.iter().enumerate() {
            lift.set(qi, t, 1);
        }
        Quotient { proj, lift, basis: q }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// A finite chain complex given by its boundary maps.
///
/// `boundaries[i]` is the map `C_{i+1} -> C_i`, a `dims[i] x dims[i+1]` matrix.
#[derive(Debug, Clone)]
pub struct ChainComplex {
    pub dims: Vec<usize>,
    pub boundaries: Vec<Matrix>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<Matrix>) -> Result<ChainComplex> {
        if boundaries.len() + 1 != dims.len().max(1) {
            return Err(Error::DimensionMismatch {
                expected: format!("{} boundary maps", dims.len().saturating_sub(1)),
                found: format!("{}", boundaries.len()),
            });
        }
        for (i, b) in boundaries.iter().enumerate() {
            if b.shape() != (dims[i], dims[i + 1]) {
                return Err(Error::DimensionMismatch {
                    expected: format!("{}x{}", dims[i], dims[i + 1]),
                    found: format!("{}x{}", b.rows, b.cols),
                });
            }
        }
        for i in 1..boundaries.len() {
            if !boundaries[i - 1].mul(&boundaries[i])?.is_zero() {
                return Err(Error::NotAComplex(i));
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    /// Dimensions of the homology groups, one per degree.
    pub fn homology_dims(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.boundaries.iter().map(|b| b.rank()).collect();
        (0..self.dims.len())
            .map(|d| {
                let out_rank = if d == 0 { 0 } else { ranks[d - 1] };
                let in_rank = ranks.get(d).copied().unwrap_or(0);
                self.dims[d] - out_rank - in_rank
            })
            .collect()
    }
}

/// Homology dimensions of a complex given by `dims` and boundary maps.
pub fn homology_dims(dims: &[usize], boundaries: &[Matrix]) -> Result<Vec<usize>> {
    Ok(ChainComplex::new(dims.to_vec(), boundaries.to_vec())?.homology_dims())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(f: Field, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(f, &rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rejects_composite() {
        assert!(Field::new(4).is_err());
        assert!(Field::new(1).is_err());
        assert!(Field::new(7).is_ok());
    }

    #[test]
    fn inverse_mod_seven() {
        let f = Field::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
    }

    #[test]
    fn rref_pivot_choice() {
        let f = Field::new(5).unwrap();
        let a = m(f, &[&[0, 2, 4], &[1, 1, 1], &[1, 3, 1]]);
        let r = a.rref();
        assert_eq!(r.pivots, vec![0, 1, 2]);
        assert_eq!(r.matrix, Matrix::identity(f, 3));
    }

    #[test]
    fn kernel_over_gf2() {
        let f = Field::gf2();
        let a = m(f, &[&[1, 1, 0], &[0, 1, 1]]);
        let k = a.kernel_basis();
        assert_eq!(k.shape(), (3, 1));
        assert!(a.dot(&k).is_zero());
        assert_eq!(k.col(0), vec![1, 1, 1]);
    }

    #[test]
    fn solve_inconsistent() {
        let f = Field::new(3).unwrap();
        let a = m(f, &[&[1, 1], &[1, 1]]);
        let b = m(f, &[&[1], &[2]]);
        assert_eq!(a.solve(&b), Err(Error::NoSolution));
    }

    #[test]
    fn quotient_roundtrip() {
        let f = Field::new(3).unwrap();
        let w = m(f, &[&[1], &[2], &[0]]);
        let q = Quotient::new(&w);
        assert_eq!(q.dim(), 2);
        assert!(q.proj.dot(&w).is_zero());
        assert_eq!(q.proj.dot(&q.lift), Matrix::identity(f, 2));
    }

    #[test]
    fn empty_shapes() {
        let f = Field::gf2();
        let a = Matrix::zeros(f, 0, 3);
        assert_eq!(a.rank(), 0);
        assert_eq!(a.kernel_basis().shape(), (3, 3));
        let b = Matrix::zeros(f, 2, 0);
        assert_eq!(b.kernel_basis().shape(), (0, 0));
        assert_eq!(Quotient::new(&b).dim(), 2);
    }

    #[test]
    fn homology_of_interval() {
        // two vertices and one edge
        let f = Field::gf2();
        let d1 = m(f, &[&[1], &[1]]);
        assert_eq!(homology_dims(&[2, 1], &[d1]).unwrap(), vec![1, 0]);
    }
}
