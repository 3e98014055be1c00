//! Relative Ext of diagram modules and Hochschild cohomology of a single
//! algebra, by cochain ranks.
//!
//! For Ext the cochain spaces are `C^n = (+)_j Hom_k(V^(n)_j, N^j)` where
//! `P_n = F(V^(n))` is a resolution level; the differential evaluates the
//! embedded map `(a (x) t)_w -> a . T_N^w psi(t)` on the level's transfer
//! vectors, so the large induced modules are never materialized.

use std::collections::HashMap;
use std::sync::Arc;

use crate::diagram::{DiagModule, Diagram};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Mat;
use crate::ralg::Algebra;
use crate::sparse::SparseMat;

use super::resolution::{BarProvider, KernelProvider, LevelProvider};

/// Which resolution backs the Ext computation; the two must agree, and
/// the acceptance suite checks they do.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResolutionKind {
    /// Induced covers iterated on kernels (the default).
    Natural,
    /// Iterated covers without kernel minimization.
    Bar,
}

#[derive(Clone, Copy, Debug)]
pub struct ExtOptions {
    pub kind: ResolutionKind,
    /// Bound on the total dimension of any resolution level or cochain
    /// space; exceeded sizes abort with the required size in the error.
    pub budget: usize,
}

impl Default for ExtOptions {
    fn default() -> Self {
        ExtOptions { kind: ResolutionKind::Natural, budget: default_budget() }
    }
}

/// Budget default, overridable through the environment.
pub fn default_budget() -> usize {
    std::env::var("DIAGCOH_BUDGET")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(400_000)
}

/// Dimensions of `Ext^0 .. Ext^{n_max}` of diagram modules `M, N` over
/// the same diagram.
pub fn ext_diagram<F: Field>(
    m: &Arc<DiagModule<F>>,
    n: &Arc<DiagModule<F>>,
    n_max: usize,
    opts: &ExtOptions,
) -> Result<Vec<usize>> {
    assert_eq!(
        m.diagram.as_ref(),
        n.diagram.as_ref(),
        "Ext requires modules over one diagram"
    );
    match opts.kind {
        ResolutionKind::Natural => {
            let provider = KernelProvider::new(m, opts.budget)?;
            ext_with_provider(provider, m.diagram.clone(), n, n_max)
        }
        ResolutionKind::Bar => {
            let provider = BarProvider::new(m, opts.budget);
            ext_with_provider(provider, m.diagram.clone(), n, n_max)
        }
    }
}

fn ext_with_provider<F: Field, P: LevelProvider<F>>(
    mut provider: P,
    diagram: Arc<Diagram<F>>,
    n: &Arc<DiagModule<F>>,
    n_max: usize,
) -> Result<Vec<usize>> {
    let f = diagram.field();
    let ndims: Vec<usize> = n.dims();
    let nobj = diagram.base.n_objects();

    let cochain_dim = |vd: &[usize]| -> usize {
        vd.iter().zip(&ndims).map(|(v, nd)| v * nd).sum()
    };

    let mut ranks: Vec<usize> = Vec::with_capacity(n_max + 1);
    let mut cdims: Vec<usize> = Vec::with_capacity(n_max + 2);
    let mut vdims_prev = provider.level_dims(0)?;
    cdims.push(cochain_dim(&vdims_prev));
    for deg in 0..=n_max {
        let layout = provider.layout(deg)?;
        let transfers = provider.transfers(deg)?;
        let vdims_next: Vec<usize> = transfers.iter().map(|t| t.len()).collect();
        cdims.push(cochain_dim(&vdims_next));
        // Sparse differential, rows indexed by the C^deg basis
        // (j, t, x), columns by the C^{deg+1} basis (j', q, x').
        let mut row_off = vec![0usize; nobj];
        let mut acc = 0usize;
        for j in 0..nobj {
            row_off[j] = acc;
            acc += vdims_prev[j] * ndims[j];
        }
        let rows_total = acc;
        let mut col_off = vec![0usize; nobj];
        let mut acc = 0usize;
        for j in 0..nobj {
            col_off[j] = acc;
            acc += vdims_next[j] * ndims[j];
        }
        let cols_total = acc;
        let mut delta = SparseMat::new(f, rows_total, cols_total);
        // Memoized evaluation matrices rho_a . T^w per (j', w, a).
        let mut memo: HashMap<(usize, usize, usize), Mat<F>> = HashMap::new();
        for jp in 0..nobj {
            for (q, tv) in transfers[jp].iter().enumerate() {
                for (flat, val) in tv {
                    let (b, a, t) = layout.decode(jp, *flat as usize);
                    let (j, w, _) = layout.blocks[jp][b];
                    let bmat = memo.entry((jp, w, a)).or_insert_with(|| {
                        n.modules[jp].action[a].mul(&n.trans[w])
                    });
                    for x in 0..ndims[j] {
                        let row = row_off[j] + t * ndims[j] + x;
                        for xp in 0..ndims[jp] {
                            let coef = f.mul(val, bmat.at(xp, x));
                            if !f.is_zero(&coef) {
                                let col = col_off[jp] + q * ndims[jp] + xp;
                                delta.push_entry(row, col, coef);
                            }
                        }
                    }
                }
            }
        }
        delta.normalize();
        ranks.push(delta.rank());
        vdims_prev = vdims_next;
    }
    let mut out = Vec::with_capacity(n_max + 1);
    for deg in 0..=n_max {
        let below = if deg == 0 { 0 } else { ranks[deg - 1] };
        out.push(cdims[deg] - ranks[deg] - below);
    }
    Ok(out)
}

/// Hochschild cohomology `H^0 .. H^{n_max}` of `b` with coefficients in
/// the bimodule given by commuting left/right action matrices, via the
/// standard cochain complex `C^n = Hom_k(B^(x)n, X)` with the alternating
/// sum coboundary.
pub fn hochschild_algebra<F: Field>(
    b: &Algebra<F>,
    left: &[Mat<F>],
    right: &[Mat<F>],
    n_max: usize,
    budget: usize,
) -> Result<Vec<usize>> {
    let f = b.field;
    let xdim = left.first().map_or(0, |m| m.rows);
    if xdim == 0 {
        return Ok(vec![0; n_max + 1]);
    }
    let bdim = b.dim;
    // C^{n_max+1} must fit the budget.
    let top = bdim.checked_pow(n_max as u32 + 1).and_then(|p| p.checked_mul(xdim));
    match top {
        Some(t) if t <= budget => {}
        _ => {
            return Err(Error::BudgetExceeded {
                what: format!("Hochschild cochains up to degree {}", n_max + 1),
                required: top.unwrap_or(usize::MAX),
                budget,
            })
        }
    }
    // Structure constants grouped by result index: for each r the list of
    // (p, q, c_pq^r).
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

    let cdim = |deg: usize| bdim.pow(deg as u32) * xdim;
    let mut ranks = Vec::with_capacity(n_max + 1);
    for deg in 0..=n_max {
        let rows = cdim(deg);
        let cols = cdim(deg + 1);
        let mut delta = SparseMat::new(f, rows, cols);
        // Iterate over the C^deg basis: tuple T (deg entries) and xi.
        let mut tuple = vec![0usize; deg];
        let tuple_count = bdim.pow(deg as u32);
        let encode = |tup: &[usize], xi: usize| -> usize {
            let mut ix = 0usize;
            for &t in tup {
                ix = ix * bdim + t;
            }
            ix * xdim + xi
        };
        for tix in 0..tuple_count {
            // Decode tix into the tuple.
            let mut rest = tix;
            for slot in (0..deg).rev() {
                tuple[slot] = rest % bdim;
                rest /= bdim;
            }
            for xi in 0..xdim {
                let row = tix * xdim + xi;
                // Term 1: a_1 . f(a_2..a_{deg+1}).
                let mut ext_tuple = vec![0usize; deg + 1];
                ext_tuple[1..].copy_from_slice(&tuple);
                for u in 0..bdim {
                    ext_tuple[0] = u;
                    for eta in 0..xdim {
                        let c = left[u].at(eta, xi);
                        if !f.is_zero(c) {
                            delta.push_entry(row, encode(&ext_tuple, eta), c.clone());
                        }
                    }
                }
                // Middle terms: (-1)^i f(.., a_i a_{i+1}, ..).
                for i in 1..=deg {
                    let base_sign = i % 2 == 1;
                    for (p, q, c) in &prod_by_result[tuple[i - 1]] {
                        let mut ext = Vec::with_capacity(deg + 1);
                        ext.extend_from_slice(&tuple[..i - 1]);
                        ext.push(*p);
                        ext.push(*q);
                        ext.extend_from_slice(&tuple[i..]);
                        let val = if base_sign { f.neg(c) } else { c.clone() };
                        delta.push_entry(row, encode(&ext, xi), val);
                    }
                }
                // Last term: (-1)^{deg+1} f(a_1..a_deg) . a_{deg+1}.
                let mut ext_tuple = vec![0usize; deg + 1];
                ext_tuple[..deg].copy_from_slice(&tuple);
                let last_sign = (deg + 1) % 2 == 1;
                for u in 0..bdim {
                    ext_tuple[deg] = u;
                    for eta in 0..xdim {
                        let c = right[u].at(eta, xi);
                        if !f.is_zero(c) {
                            let val = if last_sign { f.neg(c) } else { c.clone() };
                            delta.push_entry(row, encode(&ext_tuple, eta), val);
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
    Ok(out)
}

/// Hochschild cohomology of `b` with coefficients in itself.
pub fn hochschild_self<F: Field>(b: &Algebra<F>, n_max: usize, budget: usize) -> Result<Vec<usize>> {
    let left: Vec<Mat<F>> = (0..b.dim).map(|s| b.left_mul(s).clone()).collect();
    let right: Vec<Mat<F>> = (0..b.dim).map(|s| b.right_mul(s)).collect();
    hochschild_algebra(b, &left, &right, n_max, budget)
}

/// Cohomology of a diagram with coefficients in a bimodule, realized as
/// relative Ext over the enveloping diagram of the regular bimodule
/// against `m`.
pub fn diagram_cohomology<F: Field>(
    a: &Arc<Diagram<F>>,
    env: &Arc<Diagram<F>>,
    m: &Arc<DiagModule<F>>,
    n_max: usize,
    opts: &ExtOptions,
) -> Result<Vec<usize>> {
    let reg = Arc::new(DiagModule::regular_bimodule(a, env));
    ext_diagram(&reg, m, n_max, opts)
}
