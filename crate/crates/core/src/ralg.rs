//! Finite-dimensional unital algebras over an exact field, their
//! morphisms and left modules, Hom-space solvers, quotients, the twisted
//! tensor along an algebra map, and colimits of module diagrams.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::fincat::FinCat;
use crate::matrix::Mat;
use crate::sparse::{SparseMat, SparseRref};

/// An algebra given by structure constants, stored as the family of
/// left-multiplication matrices `L_s = (e_s . -)` plus the unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Algebra<F: Field> {
    pub field: F,
    pub dim: usize,
    left_mul: Vec<Mat<F>>,
    pub unit: Vec<F::Elem>,
}

impl<F: Field> Algebra<F> {
    pub fn new(field: F, left_mul: Vec<Mat<F>>, unit: Vec<F::Elem>) -> Result<Self> {
        let dim = left_mul.len();
        let a = Algebra { field, dim, left_mul, unit };
        a.check().map_err(Error::Invalid)?;
        Ok(a)
    }

    /// From raw structure constants: `products[s][t]` is the coordinate
    /// vector of `e_s * e_t`.
    pub fn from_products(field: F, products: Vec<Vec<Vec<F::Elem>>>, unit: Vec<F::Elem>) -> Result<Self> {
        let dim = products.len();
        let mut left_mul = Vec::with_capacity(dim);
        for row in &products {
            if row.len() != dim || row.iter().any(|v| v.len() != dim) {
                return Err(Error::Invalid(vec!["ragged structure constant table".into()]));
            }
            left_mul.push(Mat::from_fn(field, dim, dim, |r, t| row[t][r].clone()));
        }
        Self::new(field, left_mul, unit)
    }

    fn check(&self) -> std::result::Result<(), Vec<String>> {
        let mut violations = Vec::new();
        let f = self.field;
        if self.unit.len() != self.dim || self.left_mul.iter().any(|m| m.rows != self.dim || m.cols != self.dim) {
            return Err(vec!["dimension mismatch in algebra data".into()]);
        }
        if self.dim == 0 {
            return Err(vec!["algebras are unital; dimension zero is not allowed".into()]);
        }
        let lu = self.left_action_of(&self.unit);
        if !lu.is_identity() {
            violations.push("left unit law fails: L(unit) != id".into());
        }
        let ru = self.right_action_of(&self.unit);
        if !ru.is_identity() {
            violations.push("right unit law fails: R(unit) != id".into());
        }
        // Associativity over all basis triples: (e_s y) e_u = e_s (y e_u)
        // for basis y is exactly L_s R_u = R_u L_s.
        let rights: Vec<Mat<F>> = (0..self.dim).map(|u| self.right_mul(u)).collect();
        for s in 0..self.dim {
            for (u, r) in rights.iter().enumerate() {
                if self.left_mul[s].mul(r) != r.mul(&self.left_mul[s]) {
                    violations.push(format!("associativity fails on basis pair (e{s}, -, e{u})"));
                }
            }
        }
        let _ = f;
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn left_mul(&self, s: usize) -> &Mat<F> {
        &self.left_mul[s]
    }

    /// Right multiplication by `e_u`: columns are `e_t * e_u`.
    pub fn right_mul(&self, u: usize) -> Mat<F> {
        let f = self.field;
        Mat::from_fn(f, self.dim, self.dim, |r, t| self.left_mul[t].at(r, u).clone())
    }

    /// `L(x) = sum_s x_s L_s`, the matrix of left multiplication by `x`.
    pub fn left_action_of(&self, x: &[F::Elem]) -> Mat<F> {
        let f = self.field;
        let mut out = Mat::zeros(f, self.dim, self.dim);
        for (s, c) in x.iter().enumerate() {
            if !f.is_zero(c) {
                out = out.add(&self.left_mul[s].scale(c));
            }
        }
        out
    }

    pub fn right_action_of(&self, x: &[F::Elem]) -> Mat<F> {
        let f = self.field;
        let mut out = Mat::zeros(f, self.dim, self.dim);
        for (u, c) in x.iter().enumerate() {
            if !f.is_zero(c) {
                out = out.add(&self.right_mul(u).scale(c));
            }
        }
        out
    }

    pub fn mul_elems(&self, x: &[F::Elem], y: &[F::Elem]) -> Vec<F::Elem> {
        self.left_action_of(x).apply(y)
    }

    /// Tensor product algebra; basis pairs `(s, u) -> s * dim_b + u`.
    pub fn tensor(a: &Algebra<F>, b: &Algebra<F>) -> Algebra<F> {
        let f = a.field;
        let left_mul: Vec<Mat<F>> = (0..a.dim * b.dim)
            .map(|i| a.left_mul[i / b.dim].kron(&b.left_mul[i % b.dim]))
            .collect();
        let mut unit = vec![f.zero(); a.dim * b.dim];
        for s in 0..a.dim {
            for u in 0..b.dim {
                unit[s * b.dim + u] = f.mul(&a.unit[s], &b.unit[u]);
            }
        }
        let alg = Algebra { field: f, dim: a.dim * b.dim, left_mul, unit };
        debug_assert!(alg.check().is_ok());
        alg
    }

    /// Opposite algebra: left multiplication becomes right multiplication.
    pub fn opposite(&self) -> Algebra<F> {
        let left_mul = (0..self.dim).map(|s| self.right_mul(s)).collect();
        let alg = Algebra { field: self.field, dim: self.dim, left_mul, unit: self.unit.clone() };
        debug_assert!(alg.check().is_ok());
        alg
    }

    /// Structure constants as nested vectors, `[s][t] -> e_s e_t`.
    pub fn products(&self) -> Vec<Vec<Vec<F::Elem>>> {
        (0..self.dim)
            .map(|s| (0..self.dim).map(|t| self.left_mul[s].col(t)).collect())
            .collect()
    }

    // ---- canned algebras ----

    /// The base field as an algebra.
    pub fn scalar(field: F) -> Algebra<F> {
        Algebra::new(field, vec![Mat::identity(field, 1)], vec![field.one()]).unwrap()
    }

    /// `k x k x ... x k` (n factors), componentwise product.
    pub fn product_of_scalars(field: F, n: usize) -> Algebra<F> {
        let left_mul = (0..n)
            .map(|s| {
                Mat::from_fn(field, n, n, |r, t| {
                    if r == s && t == s { field.one() } else { field.zero() }
                })
            })
            .collect();
        Algebra::new(field, left_mul, vec![field.one(); n]).unwrap()
    }

    /// Dual numbers `k[x]/(x^2)`, basis `{1, x}`.
    pub fn dual_numbers(field: F) -> Algebra<F> {
        let one = Mat::identity(field, 2);
        let x = Mat::from_i64_rows(field, &[&[0, 0], &[1, 0]]);
        Algebra::new(field, vec![one, x], vec![field.one(), field.zero()]).unwrap()
    }

    /// Upper triangular 2x2 matrices, basis `{E11, E12, E22}`.
    pub fn upper_triangular2(field: F) -> Algebra<F> {
        // L_{E11}: E11*E11 = E11, E11*E12 = E12, E11*E22 = 0.
        let l11 = Mat::from_i64_rows(field, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        // L_{E12}: only E12*E22 = E12 survives.
        let l12 = Mat::from_i64_rows(field, &[&[0, 0, 0], &[0, 0, 1], &[0, 0, 0]]);
        // L_{E22}: only E22*E22 = E22 survives.
        let l22 = Mat::from_i64_rows(field, &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 1]]);
        Algebra::new(field, vec![l11, l12, l22], vec![field.one(), field.zero(), field.one()])
            .unwrap()
    }

    /// Full 2x2 matrix algebra, basis `{E11, E12, E21, E22}` with
    /// `E_{ab} E_{cd} = [b=c] E_{ad}`.
    pub fn matrix2(field: F) -> Algebra<F> {
        let f = field;
        let idx = |a: usize, b: usize| a * 2 + b;
        let mut left_mul = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                let mut m = Mat::zeros(f, 4, 4);
                for c in 0..2 {
                    for d in 0..2 {
                        if b == c {
                            m.set(idx(a, d), idx(c, d), f.one());
                        }
                    }
                }
                left_mul.push(m);
            }
        }
        let mut unit = vec![f.zero(); 4];
        unit[idx(0, 0)] = f.one();
        unit[idx(1, 1)] = f.one();
        Algebra::new(f, left_mul, unit).unwrap()
    }
}

/// A unit-preserving multiplicative map between algebras.
#[derive(Clone, Debug)]
pub struct AlgebraMap<F: Field> {
    pub source: Arc<Algebra<F>>,
    pub target: Arc<Algebra<F>>,
    pub mat: Mat<F>,
}

impl<F: Field> AlgebraMap<F> {
    pub fn new(source: Arc<Algebra<F>>, target: Arc<Algebra<F>>, mat: Mat<F>) -> Result<Self> {
        let m = AlgebraMap { source, target, mat };
        m.check().map_err(Error::Invalid)?;
        Ok(m)
    }

    fn check(&self) -> std::result::Result<(), Vec<String>> {
        let mut violations = Vec::new();
        if self.mat.rows != self.target.dim || self.mat.cols != self.source.dim {
            return Err(vec!["algebra map has wrong shape".into()]);
        }
        if self.mat.apply(&self.source.unit) != self.target.unit {
            violations.push("unit not preserved".into());
        }
        // phi(e_s x) = phi(e_s) phi(x) for all basis x:
        // mat . L_s = L_target(mat e_s) . mat.
        for s in 0..self.source.dim {
            let lhs = self.source.left_mul(s).then(&self.mat);
            let rhs = self.mat.then(&self.target.left_action_of(&self.mat.col(s)));
            if lhs != rhs {
                violations.push(format!("multiplicativity fails at basis element e{s}"));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn identity(a: Arc<Algebra<F>>) -> Self {
        AlgebraMap { mat: Mat::identity(a.field, a.dim), source: a.clone(), target: a }
    }

    pub fn apply(&self, x: &[F::Elem]) -> Vec<F::Elem> {
        self.mat.apply(x)
    }

    /// Diagrammatic composite `self` then `g`.
    pub fn then(&self, g: &AlgebraMap<F>) -> AlgebraMap<F> {
        AlgebraMap {
            source: self.source.clone(),
            target: g.target.clone(),
            mat: self.mat.then(&g.mat),
        }
    }

    /// The same linear map as a morphism of opposite algebras.
    pub fn opposite(&self, op_source: Arc<Algebra<F>>, op_target: Arc<Algebra<F>>) -> AlgebraMap<F> {
        AlgebraMap { source: op_source, target: op_target, mat: self.mat.clone() }
    }

    /// Tensor of two maps.
    pub fn tensor(f: &AlgebraMap<F>, g: &AlgebraMap<F>, source: Arc<Algebra<F>>, target: Arc<Algebra<F>>) -> AlgebraMap<F> {
        AlgebraMap { source, target, mat: f.mat.kron(&g.mat) }
    }
}

/// A left module given by one action matrix per algebra basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct Module<F: Field> {
    pub algebra: Arc<Algebra<F>>,
    pub dim: usize,
    pub action: Vec<Mat<F>>,
}

impl<F: Field> Module<F> {
    pub fn new(algebra: Arc<Algebra<F>>, action: Vec<Mat<F>>) -> Result<Self> {
        let dim = action.first().map_or(0, |m| m.rows);
        let m = Module { algebra, dim, action };
        m.check().map_err(Error::Invalid)?;
        Ok(m)
    }

    /// Zero module needs no action data.
    pub fn zero(algebra: Arc<Algebra<F>>) -> Self {
        let f = algebra.field;
        let action = (0..algebra.dim).map(|_| Mat::zeros(f, 0, 0)).collect();
        Module { algebra, dim: 0, action }
    }

    pub fn regular(algebra: Arc<Algebra<F>>) -> Self {
        let action = (0..algebra.dim).map(|s| algebra.left_mul(s).clone()).collect();
        Module { dim: algebra.dim, algebra, action }
    }

    fn check(&self) -> std::result::Result<(), Vec<String>> {
        let mut violations = Vec::new();
        let a = &self.algebra;
        if self.action.len() != a.dim || self.action.iter().any(|m| m.rows != self.dim || m.cols != self.dim) {
            return Err(vec!["module action has wrong shape".into()]);
        }
        if self.dim == 0 {
            return Ok(());
        }
        if !self.action_of(&a.unit).is_identity() {
            violations.push("unit does not act as identity".into());
        }
        for s in 0..a.dim {
            for t in 0..a.dim {
                let lhs = self.action[s].mul(&self.action[t]);
                let rhs = self.action_of(&a.left_mul(s).col(t));
                if lhs != rhs {
                    violations.push(format!("action incompatible with product on (e{s}, e{t})"));
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn action_of(&self, x: &[F::Elem]) -> Mat<F> {
        let f = self.algebra.field;
        let mut out = Mat::zeros(f, self.dim, self.dim);
        for (s, c) in x.iter().enumerate() {
            if !f.is_zero(c) {
                out = out.add(&self.action[s].scale(c));
            }
        }
        out
    }

    pub fn direct_sum(algebra: Arc<Algebra<F>>, parts: &[&Module<F>]) -> Module<F> {
        let f = algebra.field;
        let action = (0..algebra.dim)
            .map(|s| {
                let blocks: Vec<&Mat<F>> = parts.iter().map(|p| &p.action[s]).collect();
                Mat::block_diag(f, &blocks)
            })
            .collect();
        Module { dim: parts.iter().map(|p| p.dim).sum(), algebra, action }
    }

    /// Restriction along `phi`: the same space with `a` acting as `phi(a)`.
    /// `self` must be a module over `phi`'s target.
    pub fn restrict(&self, phi: &AlgebraMap<F>) -> Module<F> {
        let action = (0..phi.source.dim)
            .map(|s| self.action_of(&phi.mat.col(s)))
            .collect();
        Module { algebra: phi.source.clone(), dim: self.dim, action }
    }
}

/// A basis of a space of linear maps (e.g. `Hom_A(M, N)`).
#[derive(Clone, Debug)]
pub struct LinMapSpace<F: Field> {
    pub basis: Vec<Mat<F>>,
}

impl<F: Field> LinMapSpace<F> {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Basis of all `A`-linear maps `M -> N`: matrices commuting with every
/// basis action. `gens` restricts the commutation constraints to a
/// generating family (enough: the commutant condition is multiplicative).
pub fn hom_space_gen<F: Field>(m: &Module<F>, n: &Module<F>, gens: &[Vec<F::Elem>]) -> LinMapSpace<F> {
    let f = m.algebra.field;
    let (dm, dn) = (m.dim, n.dim);
    if dm == 0 || dn == 0 {
        return LinMapSpace { basis: vec![] };
    }
    // Unknown X is dn x dm, vectorized row-major.
    let unknowns = dn * dm;
    let mut sys = SparseMat::new(f, gens.len() * unknowns, unknowns);
    let mut row = 0usize;
    for g in gens {
        let am = m.action_of(g);
        let an = n.action_of(g);
        // X * am - an * X = 0, entry (i, j).
        for i in 0..dn {
            for j in 0..dm {
                for k in 0..dm {
                    sys.push_entry(row, i * dm + k, am.at(k, j).clone());
                }
                for k in 0..dn {
                    sys.push_entry(row, k * dm + j, f.neg(an.at(i, k)));
                }
                row += 1;
            }
        }
    }
    sys.normalize();
    let rref = SparseRref::compute(&sys);
    let basis = rref
        .kernel_basis()
        .into_iter()
        .map(|kv| {
            let dense = crate::sparse::sv_to_dense(f, unknowns, &kv);
            Mat::from_fn(f, dn, dm, |r, c| dense[r * dm + c].clone())
        })
        .collect();
    LinMapSpace { basis }
}

pub fn hom_space<F: Field>(m: &Module<F>, n: &Module<F>) -> LinMapSpace<F> {
    let f = m.algebra.field;
    let gens: Vec<Vec<F::Elem>> = (0..m.algebra.dim)
        .map(|s| {
            let mut v = vec![f.zero(); m.algebra.dim];
            v[s] = f.one();
            v
        })
        .collect();
    hom_space_gen(m, n, &gens)
}

/// A quotient of `k^ambient` presented by a projection with chosen
/// section; `proj . sect = id` and `ker proj` is the relation span.
/// Pivoting is deterministic, so bases are reproducible.
#[derive(Clone, Debug)]
pub struct Quotient<F: Field> {
    pub ambient: usize,
    pub proj: Mat<F>,
    pub sect: Mat<F>,
}

impl<F: Field> Quotient<F> {
    pub fn from_relations(field: F, ambient: usize, relations: &[Vec<F::Elem>]) -> Quotient<F> {
        let rel = Mat::from_rows(field, relations.to_vec());
        let rel = if relations.is_empty() { Mat::zeros(field, 0, ambient) } else { rel };
        let (rref, pivots) = rel.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..ambient).filter(|c| !pivot_set.contains(c)).collect();
        let q = free.len();
        let mut proj = Mat::zeros(field, q, ambient);
        for (fi, &c) in free.iter().enumerate() {
            proj.set(fi, c, field.one());
        }
        for (prow, &pcol) in pivots.iter().enumerate() {
            for (fi, &c) in free.iter().enumerate() {
                proj.set(fi, pcol, field.neg(rref.at(prow, c)));
            }
        }
        let mut sect = Mat::zeros(field, ambient, q);
        for (fi, &c) in free.iter().enumerate() {
            sect.set(c, fi, field.one());
        }
        debug_assert!(proj.mul(&sect).is_identity());
        Quotient { ambient, proj, sect }
    }

    pub fn dim(&self) -> usize {
        self.proj.rows
    }

    /// Push a linear map `ambient -> ambient'` down to the quotients;
    /// panics (debug) if the map does not preserve relations.
    pub fn descend(&self, map: &Mat<F>, target: &Quotient<F>) -> Mat<F> {
        let descended = target.proj.mul(map).mul(&self.sect);
        debug_assert!(
            {
                let direct = target.proj.mul(map);
                let via = descended.mul(&self.proj);
                direct == via
            },
            "map does not descend to the quotient"
        );
        descended
    }
}

/// The twisted tensor `B (x)_phi M` for `phi : A -> B` and `M` a left
/// `A`-module: the plain tensor `B (x) M` modulo
/// `a (x) b.m - a phi(b) (x) m`, as a left `B`-module, together with the
/// canonical surjection from the plain tensor space.
#[derive(Clone)]
pub struct TwistedTensor<F: Field> {
    pub module: Module<F>,
    pub quotient: Quotient<F>,
}

pub fn twisted_tensor<F: Field>(phi: &AlgebraMap<F>, m: &Module<F>) -> TwistedTensor<F> {
    let f = phi.source.field;
    let b = &phi.target;
    let nb = b.dim;
    let nm = m.dim;
    let ambient = nb * nm;
    // Index (i, x) -> i * nm + x.
    let mut relations = Vec::new();
    for i in 0..nb {
        for s in 0..phi.source.dim {
            let phib = phi.mat.col(s);
            let aphib = b.mul_elems(&basis_vec(f, nb, i), &phib);
            for x in 0..nm {
                let bm = m.action[s].col(x);
                let mut rel = vec![f.zero(); ambient];
                for (y, c) in bm.iter().enumerate() {
                    rel[i * nm + y] = c.clone();
                }
                for (j, c) in aphib.iter().enumerate() {
                    rel[j * nm + x] = f.sub(&rel[j * nm + x], c);
                }
                relations.push(rel);
            }
        }
    }
    let quotient = Quotient::from_relations(f, ambient, &relations);
    // Left B-action on B (x) M descends.
    let action: Vec<Mat<F>> = (0..nb)
        .map(|s| {
            let plain = b.left_mul(s).kron(&Mat::identity(f, nm));
            quotient.descend(&plain, &quotient)
        })
        .collect();
    let module = Module { algebra: phi.target.clone(), dim: quotient.dim(), action };
    debug_assert!(module.check().is_ok());
    TwistedTensor { module, quotient }
}

pub fn basis_vec<F: Field>(f: F, n: usize, i: usize) -> Vec<F::Elem> {
    let mut v = vec![f.zero(); n];
    v[i] = f.one();
    v
}

/// Colimit of a functor from a finite index category to modules over a
/// fixed algebra, by coequalizer presentation: the direct sum of all
/// objects modulo `x_at_dom - map(x)_at_cod`. Returns the module and the
/// per-object structure maps into the colimit.
pub struct ModuleColimit<F: Field> {
    pub module: Module<F>,
    pub quotient: Quotient<F>,
    /// Offset of each index object inside the ambient direct sum.
    pub offsets: Vec<usize>,
    /// Structure map of each index object into the colimit.
    pub injections: Vec<Mat<F>>,
}

pub fn module_colimit<F: Field>(
    index: &FinCat,
    objects: &[Module<F>],
    maps: &[Mat<F>],
) -> Result<ModuleColimit<F>> {
    assert_eq!(objects.len(), index.n_objects());
    assert_eq!(maps.len(), index.n_morphisms());
    let algebra = objects
        .first()
        .map(|m| m.algebra.clone())
        .ok_or_else(|| Error::Invalid(vec!["colimit over the empty category: supply the zero module".into()]))?;
    let f = algebra.field;
    // Functoriality of the input diagram.
    let mut violations = Vec::new();
    for m in 0..index.n_morphisms() {
        let (d, c) = (index.dom(m), index.cod(m));
        if maps[m].rows != objects[c].dim || maps[m].cols != objects[d].dim {
            violations.push(format!("map {:?} has wrong shape", index.morphism_name(m)));
        }
    }
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    for o in 0..index.n_objects() {
        if !maps[index.id(o)].is_identity() {
            violations.push(format!("identity of {:?} is not the identity map", index.object_name(o)));
        }
    }
    for u in 0..index.n_morphisms() {
        for v in 0..index.n_morphisms() {
            if let Some(uv) = index.compose(u, v) {
                if maps[u].then(&maps[v]) != maps[uv] {
                    violations.push(format!(
                        "diagram not functorial on ({:?},{:?})",
                        index.morphism_name(u),
                        index.morphism_name(v)
                    ));
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }

    let mut offsets = Vec::with_capacity(objects.len());
    let mut total = 0usize;
    for m in objects {
        offsets.push(total);
        total += m.dim;
    }
    let mut relations = Vec::new();
    for m in index.nonidentity_morphisms() {
        let (d, c) = (index.dom(m), index.cod(m));
        for x in 0..objects[d].dim {
            let mut rel = vec![f.zero(); total];
            rel[offsets[d] + x] = f.one();
            for (y, coeff) in maps[m].col(x).iter().enumerate() {
                rel[offsets[c] + y] = f.sub(&rel[offsets[c] + y], coeff);
            }
            relations.push(rel);
        }
    }
    let quotient = Quotient::from_relations(f, total, &relations);
    let action: Vec<Mat<F>> = (0..algebra.dim)
        .map(|s| {
            let blocks: Vec<&Mat<F>> = objects.iter().map(|m| &m.action[s]).collect();
            let plain = Mat::block_diag(f, &blocks);
            quotient.descend(&plain, &quotient)
        })
        .collect();
    let module = Module { algebra, dim: quotient.dim(), action };
    debug_assert!(module.check().is_ok());
    let injections = objects
        .iter()
        .enumerate()
        .map(|(o, m)| {
            Mat::from_fn(f, quotient.dim(), m.dim, |r, c| {
                quotient.proj.at(r, offsets[o] + c).clone()
            })
        })
        .collect();
    Ok(ModuleColimit { module, quotient, offsets, injections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn f101() -> Fp {
        Fp::new(101)
    }

    #[test]
    fn canned_algebras_validate() {
        let f = f101();
        for a in [
            Algebra::scalar(f),
            Algebra::product_of_scalars(f, 2),
            Algebra::dual_numbers(f),
            Algebra::upper_triangular2(f),
            Algebra::matrix2(f),
        ] {
            assert!(a.check().is_ok());
        }
    }

    #[test]
    fn tensor_and_opposite() {
        let f = f101();
        let a = Algebra::upper_triangular2(f);
        let k = Algebra::scalar(f);
        // k (x) A has A's dimension and table.
        let ka = Algebra::tensor(&k, &a);
        assert_eq!(ka.dim, a.dim);
        assert_eq!(ka.products(), a.products());
        // (A^op)^op = A bit-exactly.
        assert_eq!(a.opposite().opposite(), a);
        let b = Algebra::matrix2(f);
        assert_eq!(Algebra::tensor(&a, &b).dim, a.dim * b.dim);
    }

    #[test]
    fn restrict_along_projection() {
        let f = f101();
        let kk = Arc::new(Algebra::product_of_scalars(f, 2));
        let k = Arc::new(Algebra::scalar(f));
        // First projection k x k -> k.
        let proj = AlgebraMap::new(kk.clone(), k.clone(), Mat::from_i64_rows(f, &[&[1, 0]])).unwrap();
        let m = Module::regular(k.clone());
        let r = m.restrict(&proj);
        // (0, 1) acts as zero on the restricted module.
        assert!(r.action[1].is_zero());
        assert!(r.action[0].is_identity());
        // Restriction along the identity changes nothing.
        let idm = AlgebraMap::identity(kk.clone());
        let reg = Module::regular(kk);
        assert_eq!(reg.restrict(&idm), reg);
    }

    #[test]
    fn twisted_tensor_dimensions() {
        let f = f101();
        let kk = Arc::new(Algebra::product_of_scalars(f, 2));
        let k = Arc::new(Algebra::scalar(f));
        // Identity: A (x)_A M = M.
        let ida = AlgebraMap::identity(kk.clone());
        let m = Module::regular(kk.clone());
        let t = twisted_tensor(&ida, &m);
        assert_eq!(t.module.dim, m.dim);
        // First projection k x k -> k, M the regular k x k module:
        // dimension drops to 1.
        let proj = AlgebraMap::new(kk.clone(), k.clone(), Mat::from_i64_rows(f, &[&[1, 0]])).unwrap();
        let t = twisted_tensor(&proj, &m);
        assert_eq!(t.module.dim, 1);
        // Zero module tensors to zero.
        let z = Module::zero(kk.clone());
        let t = twisted_tensor(&ida, &z);
        assert_eq!(t.module.dim, 0);
    }

    #[test]
    fn twisted_tensor_along_identity_is_invertible_canonically() {
        // The canonical map m -> class(1 (x) m) is invertible for phi = id.
        let f = f101();
        let a = Arc::new(Algebra::dual_numbers(f));
        let ida = AlgebraMap::identity(a.clone());
        let m = Module::regular(a.clone());
        let t = twisted_tensor(&ida, &m);
        let mut canon = Mat::zeros(f, t.module.dim, m.dim);
        for x in 0..m.dim {
            // 1 (x) e_x in the ambient tensor space.
            let mut amb = vec![f.zero(); a.dim * m.dim];
            for (i, c) in a.unit.iter().enumerate() {
                amb[i * m.dim + x] = c.clone();
            }
            let q = t.quotient.proj.apply(&amb);
            for (r, v) in q.into_iter().enumerate() {
                canon.set(r, x, v);
            }
        }
        assert!(canon.is_invertible());
    }

    #[test]
    fn hom_space_dimensions() {
        let f = f101();
        let k = Arc::new(Algebra::scalar(f));
        let reg = Module::regular(k.clone());
        assert_eq!(hom_space(&reg, &reg).dim(), 1);

        let kk = Arc::new(Algebra::product_of_scalars(f, 2));
        // Simples supported on each factor.
        let s1 = Module::new(
            kk.clone(),
            vec![Mat::identity(f, 1), Mat::zeros(f, 1, 1)],
        )
        .unwrap();
        let s2 = Module::new(
            kk.clone(),
            vec![Mat::zeros(f, 1, 1), Mat::identity(f, 1)],
        )
        .unwrap();
        assert_eq!(hom_space(&s1, &s2).dim(), 0);

        // Schur: the column module of M_2 has endomorphism dimension 1.
        let m2 = Arc::new(Algebra::matrix2(f));
        let col = Module::new(
            m2.clone(),
            vec![
                Mat::from_i64_rows(f, &[&[1, 0], &[0, 0]]),
                Mat::from_i64_rows(f, &[&[0, 1], &[0, 0]]),
                Mat::from_i64_rows(f, &[&[0, 0], &[1, 0]]),
                Mat::from_i64_rows(f, &[&[0, 0], &[0, 1]]),
            ],
        )
        .unwrap();
        assert_eq!(hom_space(&col, &col).dim(), 1);
    }

    #[test]
    fn hom_dim_invariant_under_base_change() {
        let f = f101();
        let a = Arc::new(Algebra::dual_numbers(f));
        let m = Module::regular(a.clone());
        let d0 = hom_space(&m, &m).dim();
        // Conjugate the module by an invertible matrix.
        let g = Mat::from_i64_rows(f, &[&[1, 3], &[2, 7]]);
        let gi = g.inverse().unwrap();
        let conj = Module::new(
            a.clone(),
            m.action.iter().map(|s| g.mul(s).mul(&gi)).collect(),
        )
        .unwrap();
        assert_eq!(hom_space(&conj, &conj).dim(), d0);
        assert_eq!(hom_space(&m, &conj).dim(), d0);
    }

    #[test]
    fn colimit_examples() {
        let f = f101();
        let k = Arc::new(Algebra::scalar(f));
        let reg = Module::regular(k.clone());
        // One-object index: the module itself.
        let term = FinCat::terminal();
        let col = module_colimit(&term, &[reg.clone()], &[Mat::identity(f, 1)]).unwrap();
        assert_eq!(col.module.dim, 1);
        // Two objects, no maps: direct sum.
        let disc = FinCat::discrete(&["x", "y"]);
        let col = module_colimit(
            &disc,
            &[reg.clone(), reg.clone()],
            &[Mat::identity(f, 1), Mat::identity(f, 1)],
        )
        .unwrap();
        assert_eq!(col.module.dim, 2);
        // Coequalizer of id and the coordinate swap on k^2: dimension 1.
        let pp = FinCat::parallel_pair();
        let k2 = Module::new(k.clone(), vec![Mat::identity(f, 2)]).unwrap();
        let idm = Mat::identity(f, 2);
        let swap = Mat::from_i64_rows(f, &[&[0, 1], &[1, 0]]);
        let maps: Vec<Mat<Fp>> = (0..pp.n_morphisms())
            .map(|m| match pp.morphism_name(m) {
                "u" => idm.clone(),
                "v" => swap.clone(),
                _ => Mat::identity(f, 2),
            })
            .collect();
        let col = module_colimit(&pp, &[k2.clone(), k2.clone()], &maps).unwrap();
        assert_eq!(col.module.dim, 2 + 2 - 2 - 1);
    }

    #[test]
    fn colimit_universal_property() {
        // Cocone factorization exists and is unique for a pushout-shaped
        // diagram of scalars.
        let f = f101();
        let k = Arc::new(Algebra::scalar(f));
        let span = FinCat::poset(&["m", "a", "b"], &[("m", "a"), ("m", "b")]).unwrap();
        let reg = Module::regular(k.clone());
        let objects = vec![reg.clone(), reg.clone(), reg.clone()];
        let maps: Vec<Mat<Fp>> = (0..span.n_morphisms()).map(|_| Mat::identity(f, 1)).collect();
        let col = module_colimit(&span, &objects, &maps).unwrap();
        assert_eq!(col.module.dim, 1);
        // Cocone: every object maps by identity to k; factorization g must
        // satisfy g . inj_x = cocone_x.
        let inj = &col.injections;
        // Solve for g from the first injection and check the others.
        let g = inj[0].transpose().solve_mat(&Mat::identity(f, 1)).unwrap().transpose();
        for i in 0..3 {
            assert_eq!(g.mul(&inj[i]), Mat::identity(f, 1));
        }
    }

    #[test]
    fn functoriality_violation_detected() {
        let f = f101();
        let k = Arc::new(Algebra::scalar(f));
        let chain = FinCat::chain(2);
        let reg = Module::regular(k.clone());
        // Assign 2x the identity on one generator so that composites
        // disagree with the long map (which we set to id).
        let maps: Vec<Mat<Fp>> = (0..chain.n_morphisms())
            .map(|m| {
                if chain.morphism_name(m) == "0<1" {
                    Mat::from_i64_rows(f, &[&[2]])
                } else {
                    Mat::identity(f, 1)
                }
            })
            .collect();
        let err = module_colimit(&chain, &[reg.clone(), reg.clone(), reg.clone()], &maps);
        assert!(err.is_err());
    }
}
