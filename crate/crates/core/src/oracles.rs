//! Independent verification routines. Everything here recomputes a
//! quantity by a route disjoint from the main pipeline it checks: nerve
//! cohomology by simplicial cochain ranks, one-sided Ext over a poset by
//! the category algebra and a bar-type cochain complex, centers by a
//! direct commutant solve, and subdivision counts by brute-force chain
//! enumeration. Used by the test and acceptance suites.

use std::sync::Arc;

use crate::diagram::{DiagModule, Diagram};
use crate::error::Result;
use crate::field::Field;
use crate::fincat::{FinCat, MorId, ObjId};
use crate::matrix::Mat;
use crate::ralg::Algebra;
use crate::sparse::SparseMat;

/// Nondegenerate chains of length `p` in the category, enumerated by a
/// plain depth-first walk over the composition table.
fn chains(cat: &FinCat, p: usize) -> Vec<Vec<MorId>> {
    if p == 0 {
        return vec![vec![]];
    }
    let mut out: Vec<Vec<MorId>> = Vec::new();
    let nonid = cat.nonidentity_morphisms();
    fn extend(cat: &FinCat, nonid: &[MorId], cur: &mut Vec<MorId>, left: usize, out: &mut Vec<Vec<MorId>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for &m in nonid {
            if cur.last().map_or(true, |&l| cat.cod(l) == cat.dom(m)) {
                cur.push(m);
                extend(cat, nonid, cur, left - 1, out);
                cur.pop();
            }
        }
    }
    extend(cat, &nonid, &mut Vec::new(), p, &mut out);
    out
}

/// Simplicial cohomology dimensions of the nerve with coefficients in
/// the field, degrees `0..=n_max`, by cochain ranks on nondegenerate
/// chains (alternating-sum coboundary; degenerate faces drop out).
pub fn nerve_cohomology<F: Field>(f: F, cat: &FinCat, n_max: usize) -> Vec<usize> {
    // For degree 0 the "chains" are the objects.
    let chain_count = |p: usize| -> usize {
        if p == 0 {
            cat.n_objects()
        } else {
            chains(cat, p).len()
        }
    };
    let mut ranks = Vec::with_capacity(n_max + 1);
    for p in 0..=n_max {
        let rows = chain_count(p);
        let high = if p == 0 {
            chains(cat, 1)
        } else {
            chains(cat, p + 1)
        };
        let lows: Vec<Vec<MorId>> = if p == 0 { vec![] } else { chains(cat, p) };
        let low_index: std::collections::HashMap<&[MorId], usize> =
            lows.iter().enumerate().map(|(k, c)| (c.as_slice(), k)).collect();
        let mut delta = SparseMat::new(f, rows, high.len());
        for (col, c) in high.iter().enumerate() {
            if p == 0 {
                // delta f (v) = f(cod v) - f(dom v).
                let v = c[0];
                delta.push_entry(cat.cod(v), col, f.one());
                delta.push_entry(cat.dom(v), col, f.neg(&f.one()));
                continue;
            }
            for l in 0..=p + 1 {
                let face: Option<Vec<MorId>> = if l == 0 {
                    Some(c[1..].to_vec())
                } else if l == p + 1 {
                    Some(c[..p].to_vec())
                } else {
                    let comp = cat.compose(c[l - 1], c[l]).expect("chain composable");
                    if cat.is_identity(comp) {
                        None
                    } else {
                        let mut v = Vec::with_capacity(p);
                        v.extend_from_slice(&c[..l - 1]);
                        v.push(comp);
                        v.extend_from_slice(&c[l + 1..]);
                        Some(v)
                    }
                };
                if let Some(face) = face {
                    let row = low_index[face.as_slice()];
                    let sign = if l % 2 == 0 { f.one() } else { f.neg(&f.one()) };
                    delta.push_entry(row, col, sign);
                }
            }
        }
        delta.normalize();
        ranks.push(delta.rank());
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for p in 0..=n_max {
        let below = if p == 0 { 0 } else { ranks[p - 1] };
        out.push(chain_count(p) - ranks[p] - below);
    }
    out
}

/// Brute-force subdivision counts: nondegenerate simplices and the
/// number of distinct triples `[tau, sigma, v]`, enumerating monotone
/// witnesses directly over the composition table.
pub fn subdivision_counts_bruteforce(cat: &FinCat) -> (usize, usize) {
    let mut simplices: Vec<(ObjId, Vec<MorId>)> = Vec::new();
    for o in 0..cat.n_objects() {
        simplices.push((o, vec![]));
    }
    let mut p = 1usize;
    loop {
        let level = chains(cat, p);
        if level.is_empty() {
            break;
        }
        for c in level {
            simplices.push((cat.dom(c[0]), c));
        }
        p += 1;
    }
    let vertex = |(base, chain): &(ObjId, Vec<MorId>), t: usize| -> ObjId {
        if t == 0 { *base } else { cat.cod(chain[t - 1]) }
    };
    let segment = |s: &(ObjId, Vec<MorId>), a: usize, b: usize| -> MorId {
        let mut acc = cat.id(vertex(s, a));
        for m in &s.1[a..b] {
            acc = cat.compose(acc, *m).unwrap();
        }
        acc
    };
    let mut triples: std::collections::HashSet<(usize, usize, MorId)> = Default::default();
    let index: std::collections::HashMap<(ObjId, Vec<MorId>), usize> =
        simplices.iter().cloned().enumerate().map(|(k, s)| (s, k)).collect();
    // Recursive subset enumeration (ascending point lists).
    fn subsets(n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = vec![];
        for start in 0..n {
            let mut stack = vec![vec![start]];
            while let Some(cur) = stack.pop() {
                out.push(cur.clone());
                for next in cur.last().unwrap() + 1..n {
                    let mut ext = cur.clone();
                    ext.push(next);
                    stack.push(ext);
                }
            }
        }
        out
    }
    for (tid, tau) in simplices.iter().enumerate() {
        for points in subsets(tau.1.len() + 1) {
            // Restricted chain; skip degenerate results.
            let mut chain = Vec::new();
            let mut ok = true;
            for w in points.windows(2) {
                let m = segment(tau, w[0], w[1]);
                if cat.is_identity(m) {
                    ok = false;
                    break;
                }
                chain.push(m);
            }
            if !ok {
                continue;
            }
            let sigma = (vertex(tau, points[0]), chain);
            let sid = index[&sigma];
            let carrier = segment(tau, 0, points[0]);
            triples.insert((tid, sid, carrier));
        }
    }
    (simplices.len(), triples.len())
}

/// The category algebra of a diagram over a finite poset, with the
/// one-sided module `Sigma M = (+)_i M^i`; `(a phi^{hi}) . m_i` lands in
/// `M^h` as `a . T^{hi}(m_i)`. Built directly from the definitions, so
/// Ext computed over it is independent of the diagram-side pipeline.
pub struct CategoryAlgebra<F: Field> {
    pub algebra: Algebra<F>,
    /// `(i, j, offset, dim A^i)` blocks of the algebra basis.
    pub blocks: Vec<(ObjId, ObjId, usize, usize)>,
}

pub fn category_algebra<F: Field>(a: &Arc<Diagram<F>>) -> Result<CategoryAlgebra<F>> {
    let base = &a.base;
    if !base.is_poset() {
        return Err(crate::error::Error::NotAPoset("category algebra needs a poset".into()));
    }
    let f = a.field();
    let mut blocks = Vec::new();
    let mut dim = 0usize;
    for i in 0..base.n_objects() {
        for j in 0..base.n_objects() {
            if base.leq(i, j).is_some() {
                blocks.push((i, j, dim, a.algebras[i].dim));
                dim += a.algebras[i].dim;
            }
        }
    }
    let block = |i: ObjId, j: ObjId| blocks.iter().position(|&(a, b, _, _)| a == i && b == j);
    let mut left_mul = vec![Mat::zeros(f, dim, dim); dim];
    for &(h, i, off1, d1) in &blocks {
        let phi = &a.maps[base.leq(h, i).unwrap()].mat;
        for &(j, l, off2, d2) in &blocks {
            if j != i {
                continue;
            }
            let target = block(h, l).unwrap();
            let off3 = blocks[target].2;
            for s in 0..d1 {
                for t in 0..d2 {
                    let prod = a.algebras[h].left_mul(s).apply(&phi.col(t));
                    for (r, c) in prod.into_iter().enumerate() {
                        if !f.is_zero(&c) {
                            let cur = left_mul[off1 + s].at(off3 + r, off2 + t).clone();
                            left_mul[off1 + s].set(off3 + r, off2 + t, f.add(&cur, &c));
                        }
                    }
                }
            }
        }
    }
    let mut unit = vec![f.zero(); dim];
    for &(i, j, off, _) in &blocks {
        if i == j {
            for (s, c) in a.algebras[i].unit.iter().enumerate() {
                unit[off + s] = c.clone();
            }
        }
    }
    Ok(CategoryAlgebra { algebra: Algebra::new(f, left_mul, unit)?, blocks })
}

/// The one-sided module `Sigma M` over the category algebra.
pub fn sigma_module<F: Field>(
    ca: &CategoryAlgebra<F>,
    a: &Arc<Diagram<F>>,
    m: &DiagModule<F>,
) -> Vec<Mat<F>> {
    let f = a.field();
    let base = &a.base;
    let mdims: Vec<usize> = m.dims();
    let mut offsets = Vec::with_capacity(mdims.len());
    let mut total = 0usize;
    for &d in &mdims {
        offsets.push(total);
        total += d;
    }
    // Action of each category-algebra basis element (e_s phi^{hi}).
    ca.blocks
        .iter()
        .flat_map(|&(h, i, _, d1)| (0..d1).map(move |s| (h, i, s)))
        .map(|(h, i, s)| {
            let mut act = Mat::zeros(f, total, total);
            let t_hi = &m.trans[base.leq(h, i).unwrap()];
            let composed = t_hi.then(&m.modules[h].action[s]);
            for x in 0..mdims[i] {
                for (r, c) in composed.col(x).into_iter().enumerate() {
                    if !f.is_zero(&c) {
                        act.set(offsets[h] + r, offsets[i] + x, c);
                    }
                }
            }
            act
        })
        .collect()
}

/// One-sided Ext over a single algebra by the bar-type cochain complex
/// `Hom_k(B^(x)n (x) U, V)` with the usual alternating-sum differential
/// (module action in the last slot).
pub fn ext_single_bar<F: Field>(
    b: &Algebra<F>,
    u_action: &[Mat<F>],
    v_action: &[Mat<F>],
    n_max: usize,
) -> Vec<usize> {
    let f = b.field;
    let udim = u_action.first().map_or(0, |m| m.rows);
    let vdim = v_action.first().map_or(0, |m| m.rows);
    if udim == 0 || vdim == 0 {
        return vec![0; n_max + 1];
    }
    let bdim = b.dim;
    let mut prod_by_result: Vec<Vec<(usize, usize, F::Elem)>> = vec![Vec::new(); bdim];
    for p in 0..bdim {
        let lp = b.left_mul(p);
        for q in 0..bdim {
            for r in 0..bdim {
                let c = lp.at(r, q);
                if !f.is_zero(c) {
                    prod_by_result[r].push((p, q, c.clone()));
                }
            }
        }
    }
    let cdim = |deg: usize| bdim.pow(deg as u32) * udim * vdim;
    let mut ranks = Vec::with_capacity(n_max + 1);
    for deg in 0..=n_max {
        let rows = cdim(deg);
        let cols = cdim(deg + 1);
        let mut delta = SparseMat::new(f, rows, cols);
        let encode = |tup: &[usize], uu: usize, vv: usize| -> usize {
            let mut ix = 0usize;
            for &t in tup {
                ix = ix * bdim + t;
            }
            (ix * udim + uu) * vdim + vv
        };
        let tuple_count = bdim.pow(deg as u32);
        let mut tuple = vec![0usize; deg];
        for tix in 0..tuple_count {
            let mut rest = tix;
            for slot in (0..deg).rev() {
                tuple[slot] = rest % bdim;
                rest /= bdim;
            }
            for uu in 0..udim {
                for vv in 0..vdim {
                    let row = (tix * udim + uu) * vdim + vv;
                    // a_1 . f(a_2.., x): the V-action twists the output.
                    let mut ext = vec![0usize; deg + 1];
                    ext[1..].copy_from_slice(&tuple);
                    for a1 in 0..bdim {
                        ext[0] = a1;
                        for vv2 in 0..vdim {
                            let c = v_action[a1].at(vv2, vv);
                            if !f.is_zero(c) {
                                delta.push_entry(row, encode(&ext, uu, vv2), c.clone());
                            }
                        }
                    }
                    // Middle contractions of consecutive tensor slots.
                    for i in 1..=deg {
                        let neg = i % 2 == 1;
                        for (p, q, c) in &prod_by_result[tuple[i - 1]] {
                            let mut ext = Vec::with_capacity(deg + 1);
                            ext.extend_from_slice(&tuple[..i - 1]);
                            ext.push(*p);
                            ext.push(*q);
                            ext.extend_from_slice(&tuple[i..]);
                            let val = if neg { f.neg(c) } else { c.clone() };
                            delta.push_entry(row, encode(&ext, uu, vv), val);
                        }
                    }
                    // Last slot acts on U.
                    let neg = (deg + 1) % 2 == 1;
                    let mut ext = vec![0usize; deg + 1];
                    ext[..deg].copy_from_slice(&tuple);
                    for an in 0..bdim {
                        ext[deg] = an;
                        for uu2 in 0..udim {
                            let c = u_action[an].at(uu, uu2);
                            if !f.is_zero(c) {
                                let val = if neg { f.neg(c) } else { c.clone() };
                                delta.push_entry(row, encode(&ext, uu2, vv), val);
                            }
                        }
                    }
                }
            }
        }
        delta.normalize();
        ranks.push(delta.rank());
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for deg in 0..=n_max {
        let below = if deg == 0 { 0 } else { ranks[deg - 1] };
        out.push(cdim(deg) - ranks[deg] - below);
    }
    out
}

/// Dimension of the center of an algebra by a direct commutant solve.
pub fn center_dimension<F: Field>(b: &Algebra<F>) -> usize {
    let f = b.field;
    let n = b.dim;
    let mut sys = SparseMat::new(f, n * n, n);
    let mut row = 0usize;
    for s in 0..n {
        let l = b.left_mul(s);
        let r = b.right_mul(s);
        let diff = l.sub(&r);
        for out in 0..n {
            for x in 0..n {
                if !f.is_zero(diff.at(out, x)) {
                    sys.push_entry(row + out, x, diff.at(out, x).clone());
                }
            }
        }
        row += n;
    }
    sys.normalize();
    n - sys.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn f101() -> Fp {
        Fp::new(101)
    }

    #[test]
    fn nerve_of_named_categories() {
        let f = f101();
        assert_eq!(nerve_cohomology(f, &FinCat::interval(), 2), vec![1, 0, 0]);
        assert_eq!(nerve_cohomology(f, &FinCat::parallel_pair(), 2), vec![1, 1, 0]);
        assert_eq!(nerve_cohomology(f, &FinCat::chain(3), 2), vec![1, 0, 0]);
        // Commutative square poset is contractible too.
        let square = FinCat::poset(
            &["0", "a", "b", "1"],
            &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
        )
        .unwrap();
        assert_eq!(nerve_cohomology(f, &square, 2), vec![1, 0, 0]);
    }

    #[test]
    fn bruteforce_subdivision_counts() {
        assert_eq!(subdivision_counts_bruteforce(&FinCat::interval()), (3, 5));
        assert_eq!(subdivision_counts_bruteforce(&FinCat::parallel_pair()), (4, 8));
        assert_eq!(subdivision_counts_bruteforce(&FinCat::terminal()), (1, 1));
    }

    #[test]
    fn center_dimensions() {
        let f = f101();
        assert_eq!(center_dimension(&Algebra::matrix2(f)), 1);
        assert_eq!(center_dimension(&Algebra::dual_numbers(f)), 2);
        assert_eq!(center_dimension(&Algebra::product_of_scalars(f, 3)), 3);
        assert_eq!(center_dimension(&Algebra::upper_triangular2(f)), 1);
    }

    #[test]
    fn single_bar_ext_dual_numbers() {
        // Ext^n_{k[x]/x^2}(k, k) = k for all n.
        let f = f101();
        let b = Algebra::dual_numbers(f);
        let triv = vec![Mat::identity(f, 1), Mat::zeros(f, 1, 1)];
        let dims = ext_single_bar(&b, &triv, &triv, 3);
        assert_eq!(dims, vec![1, 1, 1, 1]);
        // Semisimple: Ext vanishes above zero.
        let m2 = Algebra::matrix2(f);
        let col = vec![
            Mat::from_i64_rows(f, &[&[1, 0], &[0, 0]]),
            Mat::from_i64_rows(f, &[&[0, 1], &[0, 0]]),
            Mat::from_i64_rows(f, &[&[0, 0], &[1, 0]]),
            Mat::from_i64_rows(f, &[&[0, 0], &[0, 1]]),
        ];
        assert_eq!(ext_single_bar(&m2, &col, &col, 2), vec![1, 0, 0]);
    }

    #[test]
    fn category_algebra_of_interval_matches_bang() {
        let f = f101();
        let k = std::sync::Arc::new(Algebra::scalar(f));
        let a = Arc::new(crate::diagram::Diagram::constant(
            Arc::new(FinCat::interval()),
            k,
        ));
        let ca = category_algebra(&a).unwrap();
        assert_eq!(ca.algebra.dim, 3);
        assert_eq!(ca.algebra.products(), Algebra::upper_triangular2(f).products());
    }
}
