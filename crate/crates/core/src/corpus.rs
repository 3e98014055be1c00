//! Seeded instance generation: the named desk-scale categories with
//! constant and non-constant diagrams, plus reproducible random deltas,
//! posets, diagrams, and modules. Random diagrams come from menus of
//! algebras and verified algebra maps, assigned along free categories or
//! pulled back along rank functors, so functoriality holds by
//! construction and every instance re-validates.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{DiagModule, Diagram};
use crate::field::Field;
use crate::fincat::{FinCat, Functor, ObjId};
use crate::matrix::Mat;
use crate::ralg::{hom_space, Algebra, AlgebraMap, Module};

/// One corpus entry: a base category with a diagram, a pair of one-sided
/// modules, and a bimodule over the enveloping diagram.
pub struct Instance<F: Field> {
    pub name: String,
    pub base: Arc<FinCat>,
    pub diagram: Arc<Diagram<F>>,
    pub module_m: Arc<DiagModule<F>>,
    pub module_n: Arc<DiagModule<F>>,
    pub env: Arc<Diagram<F>>,
    pub bimodule: Arc<DiagModule<F>>,
}

impl<F: Field> Instance<F> {
    /// Rough growth ratio of resolution levels over the given category:
    /// the max over objects of `dim A^i * sum_j |Hom(i,j)|`. Keeps the
    /// degree-3 suites inside their budgets.
    pub fn growth_ratio(&self, cat: &FinCat, dims: &[usize]) -> usize {
        (0..cat.n_objects())
            .map(|i| {
                let homs: usize = (0..cat.n_objects()).map(|j| cat.hom(i, j).len()).sum();
                dims[i] * homs
            })
            .max()
            .unwrap_or(0)
    }

    pub fn adims(&self) -> Vec<usize> {
        self.diagram.algebras.iter().map(|a| a.dim).collect()
    }

    /// Suitable for degree-3 Ext comparisons on both `C` and `C'`.
    pub fn ext_ready(&self) -> bool {
        let adims = self.adims();
        if self.growth_ratio(&self.base, &adims) > 8 {
            return false;
        }
        if let Ok(sub) = crate::subdivision::subdivide(&self.base) {
            let sub_dims: Vec<usize> = sub
                .simplices
                .iter()
                .map(|s| self.diagram.algebras[s.base].dim)
                .collect();
            self.growth_ratio(&sub.cat, &sub_dims) <= 10
        } else {
            false
        }
    }

    /// Suitable for the poset-side comparison of diagram Ext against
    /// Hochschild cohomology of the `!` algebra.
    pub fn scct_ready(&self) -> bool {
        if !self.base.is_poset() {
            return false;
        }
        let bang_dim: usize = (0..self.base.n_objects())
            .flat_map(|i| (0..self.base.n_objects()).map(move |j| (i, j)))
            .filter(|&(i, j)| self.base.leq(i, j).is_some())
            .map(|(i, _)| self.diagram.algebras[i].dim)
            .sum();
        bang_dim <= 14
    }
}

/// Which algebras random diagrams draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum AlgKind {
    Scalar,
    TwoScalars,
    Dual,
    Ut2,
}

fn make_algebra<F: Field>(f: F, kind: AlgKind) -> Arc<Algebra<F>> {
    Arc::new(match kind {
        AlgKind::Scalar => Algebra::scalar(f),
        AlgKind::TwoScalars => Algebra::product_of_scalars(f, 2),
        AlgKind::Dual => Algebra::dual_numbers(f),
        AlgKind::Ut2 => Algebra::upper_triangular2(f),
    })
}

/// Verified algebra maps `source -> target` between menu algebras.
fn map_menu<F: Field>(
    f: F,
    src_kind: AlgKind,
    src: &Arc<Algebra<F>>,
    tgt_kind: AlgKind,
    tgt: &Arc<Algebra<F>>,
) -> Vec<AlgebraMap<F>> {
    use AlgKind::*;
    let m = |rows: &[&[i64]]| Mat::from_i64_rows(f, rows);
    let mats: Vec<Mat<F>> = match (src_kind, tgt_kind) {
        (Scalar, _) => {
            // The unit map always works.
            vec![Mat::from_cols(f, tgt.dim, &[tgt.unit.clone()])]
        }
        (TwoScalars, Scalar) => vec![m(&[&[1, 0]]), m(&[&[0, 1]])],
        (TwoScalars, TwoScalars) => vec![m(&[&[1, 0], &[0, 1]]), m(&[&[0, 1], &[1, 0]])],
        (TwoScalars, Dual) => vec![m(&[&[1, 0], &[0, 0]]), m(&[&[0, 1], &[0, 0]])],
        (TwoScalars, Ut2) => vec![m(&[&[1, 0], &[0, 0], &[0, 1]])],
        (Dual, Scalar) => vec![m(&[&[1, 0]])],
        (Dual, TwoScalars) => vec![m(&[&[1, 0], &[1, 0]])],
        (Dual, Dual) => vec![m(&[&[1, 0], &[0, 1]]), m(&[&[1, 0], &[0, 2]])],
        (Dual, Ut2) => vec![m(&[&[1, 0], &[0, 1], &[1, 0]])],
        (Ut2, Scalar) => vec![m(&[&[1, 0, 0]]), m(&[&[0, 0, 1]])],
        (Ut2, TwoScalars) => vec![m(&[&[1, 0, 0], &[0, 0, 1]])],
        (Ut2, Dual) => vec![m(&[&[1, 0, 0], &[0, 0, 0]])],
        (Ut2, Ut2) => vec![Mat::identity(f, 3)],
    };
    mats.into_iter()
        .map(|mat| AlgebraMap::new(src.clone(), tgt.clone(), mat).expect("menu maps are verified"))
        .collect()
}

/// Menu modules over a menu algebra.
fn module_menu<F: Field>(f: F, kind: AlgKind, alg: &Arc<Algebra<F>>) -> Vec<Module<F>> {
    use AlgKind::*;
    let m = |rows: &[&[i64]]| Mat::from_i64_rows(f, rows);
    match kind {
        Scalar => vec![
            Module::regular(alg.clone()),
            Module::new(alg.clone(), vec![Mat::identity(f, 2)]).unwrap(),
        ],
        TwoScalars => vec![
            Module::new(alg.clone(), vec![m(&[&[1]]), m(&[&[0]])]).unwrap(),
            Module::new(alg.clone(), vec![m(&[&[0]]), m(&[&[1]])]).unwrap(),
            Module::regular(alg.clone()),
        ],
        Dual => vec![
            Module::new(alg.clone(), vec![m(&[&[1]]), m(&[&[0]])]).unwrap(),
            Module::regular(alg.clone()),
        ],
        Ut2 => vec![
            Module::new(alg.clone(), vec![m(&[&[1]]), m(&[&[0]]), m(&[&[0]])]).unwrap(),
            Module::new(alg.clone(), vec![m(&[&[0]]), m(&[&[0]]), m(&[&[1]])]).unwrap(),
            Module::new(
                alg.clone(),
                vec![
                    m(&[&[1, 0], &[0, 0]]),
                    m(&[&[0, 1], &[0, 0]]),
                    m(&[&[0, 0], &[0, 1]]),
                ],
            )
            .unwrap(),
        ],
    }
}

/// A random delta: the free category on a sparse random acyclic graph.
pub fn random_delta_category(seed: u64, max_nodes: usize, max_edges: usize) -> Arc<FinCat> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes);
    let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut edges: Vec<(String, String, String)> = Vec::new();
    let n_edges = rng.gen_range(1..=max_edges);
    for e in 0..n_edges {
        let i = rng.gen_range(0..n - 1);
        let j = rng.gen_range(i + 1..n);
        edges.push((format!("e{e}"), names[i].clone(), names[j].clone()));
    }
    let edge_refs: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    Arc::new(FinCat::free_on_graph(&name_refs, &edge_refs).expect("acyclic by construction"))
}

fn random_module_over<F: Field>(
    rng: &mut ChaCha8Rng,
    d: &Arc<Diagram<F>>,
    kinds: &[AlgKind],
) -> Arc<DiagModule<F>> {
    let f = d.field();
    let base = &d.base;
    // Pick a menu module per object, then sample transitions on the
    // hom-space of every morphism consistently: assign edge transitions
    // freely only when the base is free; otherwise solve all morphisms.
    // Posets and free categories in this corpus both admit the generic
    // approach below: sample a transition for a generating morphism set
    // and extend by composition, retrying on the rare inconsistency.
    'outer: for _attempt in 0..20 {
        let modules: Vec<Module<F>> = (0..base.n_objects())
            .map(|i| {
                let menu = module_menu(f, kinds[i], &d.algebras[i]);
                menu[rng.gen_range(0..menu.len())].clone()
            })
            .collect();
        // Factorization order: treat every nonidentity morphism; process
        // them in increasing "length" so composites can be derived.
        let mut trans: Vec<Option<Mat<F>>> = vec![None; base.n_morphisms()];
        for o in 0..base.n_objects() {
            trans[base.id(o)] = Some(Mat::identity(f, modules[o].dim));
        }
        // Repeatedly: if some morphism factors as u.v with both known,
        // compose; otherwise sample it from the hom space.
        let mut remaining: Vec<usize> = base.nonidentity_morphisms();
        while !remaining.is_empty() {
            let mut progressed = false;
            // Derive all composites first.
            for &w in remaining.clone().iter() {
                for u in 0..base.n_morphisms() {
                    for v in 0..base.n_morphisms() {
                        if base.is_identity(u) || base.is_identity(v) {
                            continue;
                        }
                        if base.compose(u, v) == Some(w) {
                            if let (Some(tu), Some(tv)) = (&trans[u], &trans[v]) {
                                let composed = tu.mul(tv);
                                match &trans[w] {
                                    Some(existing) if existing != &composed => continue 'outer,
                                    Some(_) => {}
                                    None => {
                                        trans[w] = Some(composed);
                                        progressed = true;
                                    }
                                }
                            }
                        }
                    }
                }
            }
            remaining.retain(|&w| trans[w].is_none());
            if remaining.is_empty() {
                break;
            }
            if !progressed {
                // Sample a shortest unknown: one that is not a composite
                // of two unknown nonidentity morphisms.
                let w = remaining[0];
                let (dv, cv) = (base.dom(w), base.cod(w));
                let phi = &d.maps[w];
                let restricted = modules[dv].restrict(phi);
                let homs = hom_space(&modules[cv], &restricted);
                if homs.dim() == 0 {
                    trans[w] = Some(Mat::zeros(f, modules[dv].dim, modules[cv].dim));
                } else {
                    let mut acc = Mat::zeros(f, modules[dv].dim, modules[cv].dim);
                    for b in &homs.basis {
                        let c = f.from_i64(rng.gen_range(0..5));
                        acc = acc.add(&b.scale(&c));
                    }
                    trans[w] = Some(acc);
                }
            }
        }
        let trans: Vec<Mat<F>> = trans.into_iter().map(|t| t.unwrap()).collect();
        match DiagModule::new(d.clone(), modules, trans) {
            Ok(m) => return Arc::new(m),
            Err(_) => continue,
        }
    }
    // Fall back to the zero module; always valid.
    Arc::new(DiagModule::zero(d.clone()))
}

/// Skyscraper bimodule: zero away from `at`, a chosen bimodule over
/// `A^at` there. Valid over any delta (no nonidentity endomorphisms).
fn skyscraper_bimodule<F: Field>(
    env: &Arc<Diagram<F>>,
    a: &Arc<Diagram<F>>,
    at: ObjId,
) -> Arc<DiagModule<F>> {
    let f = a.field();
    let modules: Vec<Module<F>> = (0..a.base.n_objects())
        .map(|i| {
            if i == at {
                // A^at as a bimodule over itself.
                let alg = &a.algebras[at];
                let dim = alg.dim;
                let action: Vec<Mat<F>> = (0..dim * dim)
                    .map(|st| alg.left_mul(st / dim).mul(&alg.right_mul(st % dim)))
                    .collect();
                Module { algebra: env.algebras[i].clone(), dim, action }
            } else {
                Module::zero(env.algebras[i].clone())
            }
        })
        .collect();
    let trans = (0..a.base.n_morphisms())
        .map(|v| {
            let (dv, cv) = (a.base.dom(v), a.base.cod(v));
            Mat::zeros(f, modules[dv].dim, modules[cv].dim)
        })
        .map(|z| if z.rows == z.cols && z.rows > 0 { Mat::identity(f, z.rows) } else { z })
        .collect();
    let m = DiagModule { diagram: env.clone(), modules, trans };
    debug_assert!(m.check().is_ok());
    Arc::new(m)
}

fn assemble<F: Field>(
    name: String,
    diagram: Arc<Diagram<F>>,
    rng: &mut ChaCha8Rng,
    kinds: &[AlgKind],
) -> Instance<F> {
    let base = diagram.base.clone();
    let module_m = random_module_over(rng, &diagram, kinds);
    let module_n = random_module_over(rng, &diagram, kinds);
    let env = Arc::new(diagram.enveloping());
    let bimodule = match rng.gen_range(0..3) {
        0 => Arc::new(DiagModule::regular_bimodule(&diagram, &env)),
        1 => skyscraper_bimodule(&env, &diagram, 0),
        _ => skyscraper_bimodule(&env, &diagram, base.n_objects() - 1),
    };
    Instance { name, base, diagram, module_m, module_n, env, bimodule }
}

fn constant_diagram<F: Field>(f: F, base: FinCat, kind: AlgKind) -> Arc<Diagram<F>> {
    Arc::new(Diagram::constant(Arc::new(base), make_algebra(f, kind)))
}

/// A non-constant diagram over a poset, pulled back from a random chain
/// diagram along the height functor (functorial by construction).
fn random_poset_diagram<F: Field>(
    f: F,
    rng: &mut ChaCha8Rng,
    base: Arc<FinCat>,
) -> (Arc<Diagram<F>>, Vec<AlgKind>) {
    // Height of each object = longest chain strictly below it.
    let n = base.n_objects();
    let mut height = vec![0usize; n];
    for _ in 0..n {
        for i in 0..n {
            for j in 0..n {
                if i != j && base.leq(i, j).is_some() {
                    height[j] = height[j].max(height[i] + 1);
                }
            }
        }
    }
    let max_h = height.iter().copied().max().unwrap_or(0);
    let chain = Arc::new(FinCat::chain(max_h));
    // Random menu data along the chain, glued by composition.
    let kinds_chain: Vec<AlgKind> = (0..=max_h)
        .map(|_| {
            [AlgKind::Scalar, AlgKind::TwoScalars, AlgKind::Dual][rng.gen_range(0..3)]
        })
        .collect();
    let algebras: Vec<Arc<Algebra<F>>> =
        kinds_chain.iter().map(|&k| make_algebra(f, k)).collect();
    // Edge maps phi : A^{t+1} -> A^t; extend to all pairs by composing.
    let edge_maps: Vec<AlgebraMap<F>> = (0..max_h)
        .map(|t| {
            let menu = map_menu(f, kinds_chain[t + 1], &algebras[t + 1], kinds_chain[t], &algebras[t]);
            menu[rng.gen_range(0..menu.len())].clone()
        })
        .collect();
    let maps: Vec<AlgebraMap<F>> = (0..chain.n_morphisms())
        .map(|v| {
            let (dv, cv) = (chain.dom(v), chain.cod(v));
            let mut acc = AlgebraMap::identity(algebras[cv].clone());
            for t in (dv..cv).rev() {
                acc = acc.then(&edge_maps[t]);
            }
            AlgebraMap { source: algebras[cv].clone(), target: algebras[dv].clone(), mat: acc.mat }
        })
        .collect();
    let chain_diagram = Diagram::new(chain.clone(), algebras, maps).expect("chain diagrams are functorial");
    // Height functor base -> chain.
    let ob_map: Vec<ObjId> = height.clone();
    let mor_map: Vec<usize> = (0..base.n_morphisms())
        .map(|m| chain.leq(height[base.dom(m)], height[base.cod(m)]).expect("height is monotone"))
        .collect();
    let functor = Functor::new(base.clone(), chain, ob_map, mor_map).expect("height is a functor");
    let pulled = Arc::new(crate::diagram::pullback_diagram(&functor, &chain_diagram));
    let kinds: Vec<AlgKind> = (0..n).map(|i| kinds_chain[height[i]]).collect();
    (pulled, kinds)
}

/// The four named categories plus constant-k diagrams and a pair of
/// non-constant poset diagrams; deterministic given the seed.
pub fn named_instances<F: Field>(f: F, seed: u64) -> Vec<Instance<F>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let square = FinCat::poset(
        &["0", "a", "b", "1"],
        &[("0", "a"), ("0", "b"), ("a", "1"), ("b", "1")],
    )
    .unwrap();
    let mut out = Vec::new();
    for (name, base) in [
        ("interval", FinCat::interval()),
        ("chain3", FinCat::chain(2)),
        ("square", square.clone()),
        ("parallel_pair", FinCat::parallel_pair()),
    ] {
        let d = constant_diagram(f, base, AlgKind::Scalar);
        let kinds = vec![AlgKind::Scalar; d.base.n_objects()];
        out.push(assemble(format!("{name}_k"), d, &mut rng, &kinds));
    }
    // Non-constant diagrams over the interval and the 3-chain.
    for (name, base) in [("interval", FinCat::interval()), ("chain3", FinCat::chain(2))] {
        let arc_base = Arc::new(base);
        let (d, kinds) = random_poset_diagram(f, &mut rng, arc_base);
        out.push(assemble(format!("{name}_mixed"), d, &mut rng, &kinds));
    }
    out
}

/// A seeded random instance: either a random small free-category base
/// with constant algebra, or a named poset with a pulled-back diagram.
pub fn random_instance<F: Field>(f: F, seed: u64) -> Instance<F> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let flavor = rng.gen_range(0..4);
    match flavor {
        0 => {
            // Random delta with a constant algebra.
            let base = random_delta_category(rng.gen(), 4, 3);
            let kind = [AlgKind::Scalar, AlgKind::TwoScalars, AlgKind::Dual][rng.gen_range(0..3)];
            let d = Arc::new(Diagram::constant(base, make_algebra(f, kind)));
            let kinds = vec![kind; d.base.n_objects()];
            assemble(format!("rnd{seed}_delta"), d, &mut rng, &kinds)
        }
        1 => {
            // Random poset (closure of a sparse DAG) with a pulled-back
            // mixed diagram.
            let n = rng.gen_range(2..=4usize);
            let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let mut rels = Vec::new();
            for _ in 0..rng.gen_range(1..=n) {
                let i = rng.gen_range(0..n - 1);
                let j = rng.gen_range(i + 1..n);
                rels.push((refs[i], refs[j]));
            }
            let base = Arc::new(FinCat::poset(&refs, &rels).unwrap());
            let (d, kinds) = random_poset_diagram(f, &mut rng, base);
            assemble(format!("rnd{seed}_poset"), d, &mut rng, &kinds)
        }
        2 => {
            // Named small poset with a constant nontrivial algebra.
            let kind =
                [AlgKind::TwoScalars, AlgKind::Dual, AlgKind::Ut2][rng.gen_range(0..3)];
            let d = constant_diagram(f, FinCat::interval(), kind);
            let kinds = vec![kind; 2];
            assemble(format!("rnd{seed}_interval2"), d, &mut rng, &kinds)
        }
        _ => {
            // Parallel pair or chain with constant scalars but random
            // modules (module variety carries the content here).
            let base = if rng.gen_bool(0.5) {
                FinCat::parallel_pair()
            } else {
                FinCat::chain(rng.gen_range(1..=3))
            };
            let d = constant_diagram(f, base, AlgKind::Scalar);
            let kinds = vec![AlgKind::Scalar; d.base.n_objects()];
            assemble(format!("rnd{seed}_modvar"), d, &mut rng, &kinds)
        }
    }
}

/// The full acceptance corpus: named instances plus `n_random` seeded
/// random ones.
pub fn acceptance_corpus<F: Field>(f: F, seed: u64, n_random: usize) -> Vec<Instance<F>> {
    let mut out = named_instances(f, seed);
    for k in 0..n_random {
        out.push(random_instance(f, seed.wrapping_add(k as u64)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn f101() -> Fp {
        Fp::new(101)
    }

    #[test]
    fn named_instances_validate() {
        let instances = named_instances(f101(), 7);
        assert_eq!(instances.len(), 6);
        for inst in &instances {
            assert!(inst.module_m.check().is_ok());
            assert!(inst.module_n.check().is_ok());
            assert!(inst.bimodule.check().is_ok());
        }
    }

    #[test]
    fn random_instances_validate_and_reproduce() {
        for seed in 0..10 {
            let a = random_instance(f101(), seed);
            let b = random_instance(f101(), seed);
            assert_eq!(a.module_m.dims(), b.module_m.dims(), "seed {seed} not reproducible");
            assert!(a.module_m.check().is_ok());
            assert!(a.bimodule.check().is_ok());
        }
    }

    #[test]
    fn random_deltas_are_deltas() {
        for seed in 0..25 {
            let c = random_delta_category(seed, 5, 5);
            assert!(c.is_delta(), "seed {seed}");
        }
    }

    #[test]
    fn corpus_has_enough_ext_ready_instances() {
        let corpus = acceptance_corpus(f101(), 11, 24);
        let ext_ready = corpus.iter().filter(|i| i.ext_ready()).count();
        assert!(ext_ready >= 20, "only {ext_ready} ext-ready instances");
        let scct_ready = corpus.iter().filter(|i| i.scct_ready()).count();
        assert!(scct_ready >= 6, "only {scct_ready} scct-ready instances");
    }
}
