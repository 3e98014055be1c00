//! Dense exact matrices over a [`Field`].
//!
//! Row-major storage; vectors are columns, so a linear map `V -> W` is a
//! `dim W x dim V` matrix and "f then g" is the product `g * f`.

use crate::field::Field;

#[derive(Clone, PartialEq)]
pub struct Mat<F: Field> {
    pub field: F,
    pub rows: usize,
    pub cols: usize,
    data: Vec<F::Elem>,
}

impl<F: Field> std::fmt::Debug for Mat<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|c| format!("{:?}", self.at(r, c))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<F: Field> Mat<F> {
    pub fn zeros(field: F, rows: usize, cols: usize) -> Self {
        Mat { field, rows, cols, data: vec![field.zero(); rows * cols] }
    }

    pub fn identity(field: F, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    pub fn from_fn(field: F, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F::Elem) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { field, rows, cols, data }
    }

    pub fn from_rows(field: F, rows: Vec<Vec<F::Elem>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Mat { field, rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64_rows(field: F, rows: &[&[i64]]) -> Self {
        Self::from_rows(
            field,
            rows.iter().map(|r| r.iter().map(|&n| field.from_i64(n)).collect()).collect(),
        )
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(field: F, dim: usize, cols: &[Vec<F::Elem>]) -> Self {
        let mut m = Self::zeros(field, dim, cols.len());
        for (c, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), dim);
            for (r, x) in v.iter().enumerate() {
                m.set(r, c, x.clone());
            }
        }
        m
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &F::Elem {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: F::Elem) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[F::Elem] {
        &self.data
    }

    pub fn col(&self, c: usize) -> Vec<F::Elem> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| self.field.is_zero(x))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && *self == Self::identity(self.field, self.rows)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.field.add(a, b)).collect();
        Mat { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| self.field.sub(a, b)).collect();
        Mat { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        let data = self.data.iter().map(|a| self.field.neg(a)).collect();
        Mat { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let data = self.data.iter().map(|a| self.field.mul(a, c)).collect();
        Mat { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    /// `self * other` (matrix product).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if f.is_zero(a) {
                    continue;
                }
                for c in 0..other.cols {
                    let cur = &mut out.data[r * other.cols + c];
                    f.add_mul_assign(cur, a, other.at(k, c));
                }
            }
        }
        out
    }

    /// Composite "self then g", i.e. `g * self`.
    pub fn then(&self, g: &Self) -> Self {
        g.mul(self)
    }

    /// Apply to a column vector.
    pub fn apply(&self, v: &[F::Elem]) -> Vec<F::Elem> {
        assert_eq!(v.len(), self.cols);
        let f = self.field;
        let mut out = vec![f.zero(); self.rows];
        for r in 0..self.rows {
            let mut acc = f.zero();
            for c in 0..self.cols {
                f.add_mul_assign(&mut acc, self.at(r, c), &v[c]);
            }
            out[r] = acc;
        }
        out
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.field, self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    /// Kronecker product; indices pair as `(i, j) -> i * other.rows + j`.
    pub fn kron(&self, other: &Self) -> Self {
        let f = self.field;
        Self::from_fn(f, self.rows * other.rows, self.cols * other.cols, |r, c| {
            let (r1, r2) = (r / other.rows, r % other.rows);
            let (c1, c2) = (c / other.cols, c % other.cols);
            f.mul(self.at(r1, c1), other.at(r2, c2))
        })
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows);
        Self::from_fn(self.field, self.rows, self.cols + other.cols, |r, c| {
            if c < self.cols { self.at(r, c).clone() } else { other.at(r, c - self.cols).clone() }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols);
        Self::from_fn(self.field, self.rows + other.rows, self.cols, |r, c| {
            if r < self.rows { self.at(r, c).clone() } else { other.at(r - self.rows, c).clone() }
        })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(self.field, rows.len(), cols.len(), |r, c| self.at(rows[r], cols[c]).clone())
    }

    /// Block-diagonal assembly of a list of matrices.
    pub fn block_diag(field: F, blocks: &[&Self]) -> Self {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(field, rows, cols);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for r in 0..b.rows {
                for c in 0..b.cols {
                    out.set(ro + r, co + c, b.at(r, c).clone());
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    /// Reduced row echelon form. Returns the reduced matrix and the pivot
    /// columns in order.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0usize;
        for col in 0..m.cols {
            if row >= m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !f.is_zero(m.at(r, col))) else { continue };
            if pr != row {
                for c in 0..m.cols {
                    m.data.swap(row * m.cols + c, pr * m.cols + c);
                }
            }
            let inv = f.inv(m.at(row, col)).unwrap();
            for c in col..m.cols {
                let v = f.mul(m.at(row, c), &inv);
                m.set(row, c, v);
            }
            for r in 0..m.rows {
                if r == row || f.is_zero(m.at(r, col)) {
                    continue;
                }
                let factor = f.neg(m.at(r, col));
                for c in col..m.cols {
                    let t = f.mul(&factor, m.at(row, c));
                    let v = f.add(m.at(r, c), &t);
                    m.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        if let Some(r) = self.field.rank_override(self.rows, self.cols, &self.data) {
            return r;
        }
        self.rref().1.len()
    }

    /// Basis of the kernel (columns solving `self * x = 0`), derived from
    /// the reduced echelon form; deterministic.
    pub fn kernel_basis(&self) -> Vec<Vec<F::Elem>> {
        let f = self.field;
        let (r, pivots) = self.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![f.zero(); self.cols];
            v[free] = f.one();
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = f.neg(r.at(prow, free));
            }
            basis.push(v);
        }
        basis
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Solve `self * x = b` for one particular solution, if consistent.
    pub fn solve(&self, b: &[F::Elem]) -> Option<Vec<F::Elem>> {
        assert_eq!(b.len(), self.rows);
        let f = self.field;
        let aug = self.hstack(&Mat::from_cols(f, self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c == self.cols) {
            return None; // pivot in the constant column: inconsistent
        }
        let mut x = vec![f.zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = r.at(prow, self.cols).clone();
        }
        Some(x)
    }

    /// Solve `self * X = B` columnwise; `None` if any column is inconsistent.
    pub fn solve_mat(&self, b: &Self) -> Option<Self> {
        assert_eq!(self.rows, b.rows);
        let f = self.field;
        let aug = self.hstack(b);
        let (r, pivots) = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut x = Mat::zeros(f, self.cols, b.cols);
        for (prow, &pcol) in pivots.iter().enumerate() {
            for c in 0..b.cols {
                x.set(pcol, c, r.at(prow, self.cols + c).clone());
            }
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let aug = self.hstack(&Self::identity(self.field, self.rows));
        let (r, pivots) = aug.rref();
        if pivots.len() != self.rows || pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        Some(Self::from_fn(self.field, self.rows, self.rows, |i, j| r.at(i, self.cols + j).clone()))
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// A generalized inverse `k` with `self * k * self == self`; always
    /// exists over a field. Deterministic (pivot-column construction).
    pub fn pseudo_inverse(&self) -> Self {
        let f = self.field;
        let (_, pivots) = self.rref();
        let r = pivots.len();
        if r == 0 {
            return Mat::zeros(f, self.cols, self.rows);
        }
        // B = pivot columns of self: m x r, full column rank, im B = im self.
        let all_rows: Vec<usize> = (0..self.rows).collect();
        let b = self.submatrix(&all_rows, &pivots);
        // Extend B to an invertible m x m matrix by standard basis vectors.
        let (_, ext_pivots) = b.hstack(&Self::identity(f, self.rows)).rref();
        let p_cols: Vec<usize> = ext_pivots.iter().map(|&c| c).collect();
        debug_assert_eq!(p_cols.len(), self.rows);
        let ext = b.hstack(&Self::identity(f, self.rows));
        let p = ext.submatrix(&all_rows, &p_cols);
        let pinv = p.inverse().expect("extended basis must be invertible");
        // k sends im self back through the pivot coordinates, kills the rest.
        let mut k = Mat::zeros(f, self.cols, self.rows);
        for (l, &col) in pivots.iter().enumerate() {
            for j in 0..self.rows {
                k.set(col, j, pinv.at(l, j).clone());
            }
        }
        debug_assert!(self.mul(&k).mul(self) == *self);
        k
    }

    /// Pivot columns of the column span: indices of a deterministic basis
    /// of the image, plus indices extending it to the full ambient space.
    pub fn column_space_pivots(&self) -> Vec<usize> {
        self.rref().1
    }

    pub fn map_scalars<G: Field>(&self, g: G, mut conv: impl FnMut(&F::Elem) -> G::Elem) -> Mat<G> {
        Mat { field: g, rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| conv(x)).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Fp, Rat};

    fn f101() -> Fp {
        Fp::new(101)
    }

    #[test]
    fn mul_identity() {
        let f = f101();
        let a = Mat::from_i64_rows(f, &[&[1, 2], &[3, 4]]);
        let i = Mat::identity(f, 2);
        assert_eq!(a.mul(&i), a);
        assert_eq!(i.mul(&a), a);
    }

    #[test]
    fn rref_rank_kernel() {
        let f = f101();
        let a = Mat::from_i64_rows(f, &[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(a.rank(), 2);
        let k = a.kernel_basis();
        assert_eq!(k.len(), 1);
        for v in &k {
            assert!(a.apply(v).iter().all(|x| f.is_zero(x)));
        }
    }

    #[test]
    fn solve_and_inverse() {
        let f = f101();
        let a = Mat::from_i64_rows(f, &[&[2, 1], &[1, 1]]);
        let x = a.solve(&[f.from_i64(3), f.from_i64(2)]).unwrap();
        assert_eq!(a.apply(&x), vec![3, 2]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        let sing = Mat::from_i64_rows(f, &[&[1, 2], &[2, 4]]);
        assert!(sing.inverse().is_none());
        assert!(sing.solve(&[f.from_i64(0), f.from_i64(1)]).is_none());
    }

    #[test]
    fn pseudo_inverse_law() {
        let f = f101();
        for a in [
            Mat::from_i64_rows(f, &[&[1, 2, 3], &[2, 4, 6]]),
            Mat::from_i64_rows(f, &[&[0, 0], &[0, 0]]),
            Mat::from_i64_rows(f, &[&[1, 0], &[0, 1], &[5, 7]]),
        ] {
            let k = a.pseudo_inverse();
            assert_eq!(a.mul(&k).mul(&a), a);
        }
    }

    #[test]
    fn kron_dims() {
        let f = f101();
        let a = Mat::from_i64_rows(f, &[&[1, 2], &[3, 4]]);
        let b = Mat::from_i64_rows(f, &[&[0, 1], &[1, 0]]);
        let k = a.kron(&b);
        assert_eq!((k.rows, k.cols), (4, 4));
        assert_eq!(*k.at(0, 1), 1); // a11 * b01
        assert_eq!(*k.at(2, 3), 4); // a22 * b01
    }

    #[test]
    fn rational_rank_override_agrees() {
        let q = Rat;
        let a = Mat::from_i64_rows(q, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        assert_eq!(a.rank(), 2);
        assert_eq!(a.rref().1.len(), 2);
    }

    #[test]
    fn rational_halves() {
        let q = Rat;
        let half = q.parse("1/2").unwrap();
        let a = Mat::from_cols(q, 1, &[vec![half.clone()]]);
        let inv = a.inverse().unwrap();
        assert_eq!(q.format(inv.at(0, 0)), "2");
    }
}
