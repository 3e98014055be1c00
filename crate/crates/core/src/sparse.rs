//! Sparse exact row reduction for the large, mostly-empty matrices that
//! show up in cochain complexes. Dense elimination handles everything up
//! to a few hundred columns; these routines take over beyond that.

use crate::field::Field;
use crate::matrix::Mat;

/// Sorted-by-column sparse vector.
pub type SparseVec<F> = Vec<(u32, <F as Field>::Elem)>;

pub fn sv_from_dense<F: Field>(f: F, v: &[F::Elem]) -> SparseVec<F> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !f.is_zero(x))
        .map(|(i, x)| (i as u32, x.clone()))
        .collect()
}

pub fn sv_to_dense<F: Field>(f: F, len: usize, v: &[(u32, F::Elem)]) -> Vec<F::Elem> {
    let mut out = vec![f.zero(); len];
    for (i, x) in v {
        out[*i as usize] = x.clone();
    }
    out
}

/// `a + c * b`, merging sorted entries.
fn sv_add_mul<F: Field>(f: F, a: &[(u32, F::Elem)], c: &F::Elem, b: &[(u32, F::Elem)]) -> SparseVec<F> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            let v = f.mul(c, &b[j].1);
            if !f.is_zero(&v) {
                out.push((b[j].0, v));
            }
            j += 1;
        } else {
            let mut v = a[i].1.clone();
            f.add_mul_assign(&mut v, c, &b[j].1);
            if !f.is_zero(&v) {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

fn sv_scale<F: Field>(f: F, a: &mut SparseVec<F>, c: &F::Elem) {
    for (_, x) in a.iter_mut() {
        *x = f.mul(x, c);
    }
}

/// A sparse matrix held as a bag of rows. Only reduction-style queries
/// are supported; structural mutation happens before construction.
pub struct SparseMat<F: Field> {
    pub field: F,
    pub rows: usize,
    pub cols: usize,
    pub row_data: Vec<SparseVec<F>>,
}

impl<F: Field> SparseMat<F> {
    pub fn new(field: F, rows: usize, cols: usize) -> Self {
        SparseMat { field, rows, cols, row_data: vec![Vec::new(); rows] }
    }

    pub fn push_entry(&mut self, r: usize, c: usize, v: F::Elem) {
        if !self.field.is_zero(&v) {
            self.row_data[r].push((c as u32, v));
        }
    }

    /// Sort and combine duplicate coordinates; call once after batch insertion.
    pub fn normalize(&mut self) {
        let f = self.field;
        for row in self.row_data.iter_mut() {
            row.sort_by_key(|(c, _)| *c);
            let mut out: SparseVec<F> = Vec::with_capacity(row.len());
            for (c, v) in row.drain(..) {
                match out.last_mut() {
                    Some((lc, lv)) if *lc == c => *lv = f.add(lv, &v),
                    _ => out.push((c, v)),
                }
            }
            out.retain(|(_, v)| !f.is_zero(v));
            *row = out;
        }
    }

    pub fn nnz(&self) -> usize {
        self.row_data.iter().map(|r| r.len()).sum()
    }

    pub fn from_dense(m: &Mat<F>) -> Self {
        let mut s = SparseMat::new(m.field, m.rows, m.cols);
        for r in 0..m.rows {
            for c in 0..m.cols {
                if !m.field.is_zero(m.at(r, c)) {
                    s.push_entry(r, c, m.at(r, c).clone());
                }
            }
        }
        s
    }

    /// Rank by row reduction with lightest-rows-first ordering.
    pub fn rank(&self) -> usize {
        let f = self.field;
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_by_key(|&r| self.row_data[r].len());
        // pivot column -> reduced row with leading entry 1 at that column
        let mut pivots: std::collections::HashMap<u32, SparseVec<F>> = std::collections::HashMap::new();
        for r in order {
            let mut row = self.row_data[r].clone();
            loop {
                let Some((lead, lv)) = row.first().cloned() else { break };
                match pivots.get(&lead) {
                    Some(p) => {
                        let c = f.neg(&lv);
                        row = sv_add_mul(f, &row, &c, p);
                    }
                    None => {
                        let inv = f.inv(&lv).unwrap();
                        sv_scale(f, &mut row, &inv);
                        pivots.insert(lead, row);
                        break;
                    }
                }
            }
        }
        pivots.len()
    }
}

/// Reduced row echelon data for a short-and-wide sparse system; rows are
/// kept sparse throughout so kernels of surjections with many columns
/// stay cheap.
pub struct SparseRref<F: Field> {
    pub field: F,
    pub cols: usize,
    /// (pivot column, fully reduced row with 1 at the pivot), sorted by column.
    pub pivot_rows: Vec<(u32, SparseVec<F>)>,
}

impl<F: Field> SparseRref<F> {
    pub fn compute(m: &SparseMat<F>) -> Self {
        let f = m.field;
        let mut pivot_rows: Vec<(u32, SparseVec<F>)> = Vec::new();
        let mut order: Vec<usize> = (0..m.rows).collect();
        order.sort_by_key(|&r| m.row_data[r].len());
        for r in order {
            let mut row = m.row_data[r].clone();
            // Eliminate every pivot-column entry. Pivot rows carry no other
            // pivot columns (RREF invariant), so new entries land strictly
            // to the right and one pass suffices.
            let mut i = 0;
            while i < row.len() {
                let (c, v) = row[i].clone();
                match pivot_rows.binary_search_by_key(&c, |(pc, _)| *pc) {
                    Ok(idx) => {
                        let coeff = f.neg(&v);
                        let prow = pivot_rows[idx].1.clone();
                        row = sv_add_mul(f, &row, &coeff, &prow);
                    }
                    Err(_) => i += 1,
                }
            }
            let Some((lead, lv)) = row.first().cloned() else { continue };
            let inv = f.inv(&lv).unwrap();
            sv_scale(f, &mut row, &inv);
            // Back-eliminate the new pivot column from existing rows.
            let updates: Vec<usize> = pivot_rows
                .iter()
                .enumerate()
                .filter(|(_, (_, pr))| pr.binary_search_by_key(&lead, |(c, _)| *c).is_ok())
                .map(|(i, _)| i)
                .collect();
            for i in updates {
                let coeff = {
                    let pr = &pivot_rows[i].1;
                    let k = pr.binary_search_by_key(&lead, |(c, _)| *c).unwrap();
                    f.neg(&pr[k].1)
                };
                pivot_rows[i].1 = sv_add_mul(f, &pivot_rows[i].1, &coeff, &row);
            }
            let ins = pivot_rows.binary_search_by_key(&lead, |(c, _)| *c).unwrap_err();
            pivot_rows.insert(ins, (lead, row));
        }
        SparseRref { field: f, cols: m.cols, pivot_rows }
    }

    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }

    pub fn pivot_cols(&self) -> Vec<usize> {
        self.pivot_rows.iter().map(|(c, _)| *c as usize).collect()
    }

    /// Kernel basis as sparse column vectors, one per free column, in
    /// column order (the deterministic echelon parametrization).
    pub fn kernel_basis(&self) -> Vec<SparseVec<F>> {
        let f = self.field;
        let pivot_set: std::collections::HashSet<u32> =
            self.pivot_rows.iter().map(|(c, _)| *c).collect();
        let mut basis = Vec::new();
        for free in 0..self.cols as u32 {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v: SparseVec<F> = vec![(free, f.one())];
            for (pcol, prow) in &self.pivot_rows {
                if let Ok(k) = prow.binary_search_by_key(&free, |(c, _)| *c) {
                    v.push((*pcol, f.neg(&prow[k].1)));
                }
            }
            v.sort_by_key(|(c, _)| *c);
            basis.push(v);
        }
        basis
    }

    /// Coordinates of `v` with respect to the pivot-column parametrization:
    /// returns `x` with `x[pivot row] = v`-consistent reduction, or `None`
    /// if `v` is outside the row space's column span. Used to express
    /// vectors in a kernel basis.
    pub fn reduce(&self, v: &[(u32, F::Elem)]) -> SparseVec<F> {
        let f = self.field;
        let mut row: SparseVec<F> = v.to_vec();
        let mut i = 0;
        while i < row.len() {
            let (c, lv) = row[i].clone();
            match self.pivot_rows.binary_search_by_key(&c, |(pc, _)| *pc) {
                Ok(idx) => {
                    let coeff = f.neg(&lv);
                    let pr = self.pivot_rows[idx].1.clone();
                    row = sv_add_mul(f, &row, &coeff, &pr);
                }
                Err(_) => i += 1,
            }
        }
        row
    }
}
