//! Dense complex matrix kernels.
//!
//! Row-major storage, sized for operators on Hilbert spaces of dimension
//! up to ~100. Hermitian eigendecomposition and SVD are built on cyclic
//! Jacobi rotations, which are deterministic and keep full accuracy on the
//! highly degenerate spectra (projectors, clustered eigenvalues) this
//! domain produces.

mod eigen;
mod psd;
mod svd;

pub use eigen::{cluster_eigenspaces, hermitian_eigen, EigenCluster, HermitianEigensystem};
pub use psd::{psd_pinv, psd_pinv_sqrt, psd_sqrt, support_projector, PsdFunctions};
pub use svd::{
    complete_columns, determinant, null_space, orthonormalize_spanning, pseudo_inverse, svd, Svd,
};

use crate::error::{Error, Result};
use crate::scalar::{cone, cr, czero, Scalar, C};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Scalar> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = cone();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Build from nested rows of complex entries.
    pub fn from_rows(rows: Vec<Vec<C<T>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Build from nested rows of real entries.
    pub fn from_real_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::from_rows(
            rows.into_iter()
                .map(|row| row.into_iter().map(cr).collect())
                .collect(),
        )
    }

    pub fn diag(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = cr(*v);
        }
        m
    }

    /// Rank-one projector |v><v| / <v|v>.
    pub fn projector_onto(v: &[C<T>]) -> Self {
        let n2: T = v.iter().map(|z| z.norm_sqr()).sum();
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj() / cr(n2))
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C<T>]) {
        for i in 0..self.rows {
            self[(i, j)] = v[i];
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(dim: usize, cols: &[Vec<C<T>>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, v) in cols.iter().enumerate() {
            m.set_column(j, v);
        }
        m
    }

    /// Horizontal concatenation of column blocks.
    pub fn hcat(blocks: &[&ComplexMatrix<T>]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            for j in 0..b.cols {
                for i in 0..rows {
                    m[(i, off + j)] = b[(i, j)];
                }
            }
            off += b.cols;
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        self.scale_c(cr(s))
    }

    pub fn scale_c(&self, s: C<T>) -> Self {
        let mut out = self.clone();
        for z in &mut out.data {
            *z = *z * s;
        }
        out
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    /// Frobenius inner product <A, B> = tr(A^dag B).
    pub fn inner(&self, other: &Self) -> C<T> {
        debug_assert_eq!(self.rows, other.rows);
        debug_assert_eq!(self.cols, other.cols);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * *b)
            .sum()
    }

    pub fn distance(&self, other: &Self) -> T {
        (self - other).frobenius_norm()
    }

    /// Frobenius norm of A - A^dag.
    pub fn hermitian_asymmetry(&self) -> T {
        let mut s = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let d = self[(i, j)] - self[(j, i)].conj();
                s = s + d.norm_sqr();
            }
        }
        s.sqrt()
    }

    /// (A + A^dag) / 2.
    pub fn hermitian_part(&self) -> Self {
        let half = T::from_f64_lossy(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * cr(half)
        })
    }

    /// Frobenius norm of the commutator [A, B].
    pub fn commutator_norm(&self, other: &Self) -> T {
        (&(self * other) - &(other * self)).frobenius_norm()
    }

    /// Apply the matrix to a vector.
    pub fn apply(&self, v: &[C<T>]) -> Vec<C<T>> {
        debug_assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| self[(i, j)] * v[j])
                    .fold(czero(), |a, b| a + b)
            })
            .collect()
    }

    /// Real part of tr(A B); the physically meaningful trace for products
    /// of Hermitian operators.
    pub fn re_trace_product(&self, other: &Self) -> T {
        debug_assert_eq!(self.cols, other.rows);
        let mut s = T::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                let p = self[(i, k)] * other[(k, i)];
                s = s + p.re;
            }
        }
        s
    }

    pub fn validate_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite)
        }
    }

    pub fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "{}x{} matrix is not square",
                self.rows, self.cols
            )))
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = *a + *b;
        }
        out
    }
}

impl<T: Scalar> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        debug_assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a = *a - *b;
        }
        out
    }
}

impl<T: Scalar> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        let mut out = self.clone();
        for z in &mut out.data {
            *z = -*z;
        }
        out
    }
}

impl<T: Scalar> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        debug_assert_eq!(self.cols, rhs.rows);
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = &self.data[i * self.cols + j];
                write!(f, "{:?}{:+?}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Wire format: {"dim":[r,c],"re":[[...]],"im":[[...]]}, row-major.
impl<T: Scalar + Serialize> Serialize for ComplexMatrix<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let re: Vec<Vec<T>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].re).collect())
            .collect();
        let im: Vec<Vec<T>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].im).collect())
            .collect();
        let mut st = serializer.serialize_struct("ComplexMatrix", 3)?;
        st.serialize_field("dim", &[self.rows, self.cols])?;
        st.serialize_field("re", &re)?;
        st.serialize_field("im", &im)?;
        st.end()
    }
}

impl<'de, T: Scalar + Deserialize<'de>> Deserialize<'de> for ComplexMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw<T> {
            dim: [usize; 2],
            re: Vec<Vec<T>>,
            im: Vec<Vec<T>>,
        }
        let raw = Raw::<T>::deserialize(deserializer)?;
        let [r, c] = raw.dim;
        let shape_ok = |m: &Vec<Vec<T>>| m.len() == r && m.iter().all(|row| row.len() == c);
        if !shape_ok(&raw.re) || !shape_ok(&raw.im) {
            return Err(de::Error::custom("re/im shape does not match dim"));
        }
        let mut data = Vec::with_capacity(r * c);
        for i in 0..r {
            for j in 0..c {
                data.push(C::new(raw.re[i][j], raw.im[i][j]));
            }
        }
        Ok(ComplexMatrix {
            rows: r,
            cols: c,
            data,
        })
    }
}
