//! Barycentric subdivision of a finite category.
//!
//! Objects of the subdivision are the nondegenerate simplices of `C`
//! (chains of composable nonidentity morphisms); a map `tau -> sigma` is
//! a triple `[tau, sigma, v]` where some strictly monotone reindexing `f`
//! realizes `sigma` as `tau . f` and `v` is the composite of the first
//! `f(0)` arrows of `tau`. Composition is `[tau,sigma,u].[sigma,omega,v]
//! = [tau,omega,uv]`.
//!
//! Degenerate simplices are excluded throughout. In a delta, composites
//! of nonidentity morphisms are nonidentity, so the nondegenerate
//! fragment is closed under every operation here and the enumeration is
//! finite; for other categories only the dimension-capped truncation is
//! available.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fincat::{FinCat, Functor, MorId, ObjId};

/// A nondegenerate simplex: a chain of `p` composable nonidentity
/// morphisms, with the base object kept explicitly so 0-simplices of
/// different objects stay distinct.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Simplex {
    pub base: ObjId,
    pub chain: Vec<MorId>,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.chain.len()
    }

    /// Vertex `t` of the chain, `0 <= t <= dim`.
    pub fn vertex(&self, cat: &FinCat, t: usize) -> ObjId {
        if t == 0 {
            self.base
        } else {
            cat.cod(self.chain[t - 1])
        }
    }

    /// The composite `tau(a -> b)` of arrows `a+1 ..= b`, as a morphism of
    /// the base category.
    pub fn arrow(&self, cat: &FinCat, a: usize, b: usize) -> MorId {
        cat.compose_chain(self.vertex(cat, a), &self.chain[a..b])
            .expect("chain is composable")
    }

    /// Restriction along a strictly monotone map given by its image set
    /// `points` (ascending vertices of `self`). Returns `None` when the
    /// restricted chain is degenerate (possible only outside deltas).
    pub fn restrict(&self, cat: &FinCat, points: &[usize]) -> Option<Simplex> {
        let base = self.vertex(cat, points[0]);
        let mut chain = Vec::with_capacity(points.len() - 1);
        for w in points.windows(2) {
            let m = self.arrow(cat, w[0], w[1]);
            if cat.is_identity(m) {
                return None;
            }
            chain.push(m);
        }
        Some(Simplex { base, chain })
    }

    pub fn name(&self, cat: &FinCat) -> String {
        if self.chain.is_empty() {
            format!("[{}]", cat.object_name(self.base))
        } else {
            format!(
                "[{}]",
                self.chain
                    .iter()
                    .map(|&m| cat.morphism_name(m).to_string())
                    .collect::<Vec<_>>()
                    .join("|")
            )
        }
    }
}

/// The subdivision `C'` together with the bookkeeping that ties its
/// objects and morphisms back to `C`.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub base: Arc<FinCat>,
    pub cat: Arc<FinCat>,
    pub simplices: Vec<Simplex>,
    /// Carrier `v` of each morphism of `C'`.
    pub carriers: Vec<MorId>,
    /// Lexicographically least monotone witness of each morphism, as the
    /// ascending list of selected vertices of the domain simplex.
    pub witnesses: Vec<Vec<usize>>,
    simplex_index: HashMap<Simplex, ObjId>,
    mor_index: HashMap<(ObjId, ObjId, MorId), MorId>,
}

/// Full subdivision; requires a delta so the enumeration is finite.
pub fn subdivide(base: &Arc<FinCat>) -> Result<Subdivision> {
    if let Some(reason) = base.delta_violation() {
        return Err(Error::NotADelta(format!("{reason}; use the capped subdivision")));
    }
    Ok(subdivide_inner(base, usize::MAX))
}

/// Full subcategory of `C'` on simplices of dimension at most `p_max`;
/// defined for every finite category.
pub fn subdivide_capped(base: &Arc<FinCat>, p_max: usize) -> Subdivision {
    subdivide_inner(base, p_max)
}

fn subdivide_inner(base: &Arc<FinCat>, p_max: usize) -> Subdivision {
    let cat = base.as_ref();
    // Enumerate chains by depth-first extension; in a delta the chain
    // length is bounded by the object count, so `p_max` only matters for
    // non-delta inputs.
    let mut simplices: Vec<Simplex> = (0..cat.n_objects())
        .map(|o| Simplex { base: o, chain: vec![] })
        .collect();
    let nonid = cat.nonidentity_morphisms();
    let mut frontier: Vec<Simplex> = simplices.clone();
    let mut dim = 0usize;
    while !frontier.is_empty() && dim < p_max {
        let mut next = Vec::new();
        for s in &frontier {
            let at = s.vertex(cat, s.dim());
            for &m in &nonid {
                if cat.dom(m) == at {
                    let mut chain = s.chain.clone();
                    chain.push(m);
                    next.push(Simplex { base: s.base, chain });
                }
            }
        }
        simplices.extend(next.iter().cloned());
        frontier = next;
        dim += 1;
    }
    simplices.sort_by(|a, b| (a.dim(), a.base, &a.chain).cmp(&(b.dim(), b.base, &b.chain)));
    let simplex_index: HashMap<Simplex, ObjId> =
        simplices.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();

    // Morphisms: for each tau and each nonempty vertex subset, the
    // restriction gives a target sigma and a carrier; the same carrier
    // with a different witness is the same morphism.
    let per_tau: Vec<Vec<(ObjId, MorId, Vec<usize>)>> = crate::par::map_slice(&simplices, |tau| {
        let p = tau.dim();
        let mut found: Vec<(ObjId, MorId, Vec<usize>)> = Vec::new();
        for mask in 1u64..(1u64 << (p + 1)) {
            let points: Vec<usize> = (0..=p).filter(|t| mask >> t & 1 == 1).collect();
            let Some(sigma) = tau.restrict(cat, &points) else { continue };
            let sigma_id = simplex_index[&sigma];
            let carrier = tau.arrow(cat, 0, points[0]);
            found.push((sigma_id, carrier, points));
        }
        found
    });

    let mut mor_index: HashMap<(ObjId, ObjId, MorId), MorId> = HashMap::new();
    let mut mors: Vec<(String, ObjId, ObjId)> = Vec::new();
    let mut carriers: Vec<MorId> = Vec::new();
    let mut witnesses: Vec<Vec<usize>> = Vec::new();
    for (tau_id, found) in per_tau.iter().enumerate() {
        for (sigma_id, carrier, points) in found {
            let key = (tau_id, *sigma_id, *carrier);
            match mor_index.get(&key) {
                Some(&m) => {
                    if points < &witnesses[m] {
                        witnesses[m] = points.clone();
                    }
                }
                None => {
                    let name = if tau_id == *sigma_id && cat.is_identity(*carrier) {
                        format!("id@{}", simplices[tau_id].name(cat))
                    } else {
                        format!(
                            "{}>{}:{}",
                            simplices[tau_id].name(cat),
                            simplices[*sigma_id].name(cat),
                            cat.morphism_name(*carrier)
                        )
                    };
                    mor_index.insert(key, mors.len());
                    carriers.push(*carrier);
                    witnesses.push(points.clone());
                    mors.push((name, tau_id, *sigma_id));
                }
            }
        }
    }

    let identity: Vec<MorId> = simplices
        .iter()
        .enumerate()
        .map(|(k, s)| mor_index[&(k, k, cat.id(s.base))])
        .collect();

    let by_dom: Vec<Vec<MorId>> = {
        let mut v = vec![Vec::new(); simplices.len()];
        for (m, entry) in mors.iter().enumerate() {
            v[entry.1].push(m);
        }
        v
    };
    let mut compose: HashMap<(MorId, MorId), MorId> = HashMap::new();
    for m1 in 0..mors.len() {
        let mid = mors[m1].2;
        for &m2 in &by_dom[mid] {
            let uv = cat
                .compose(carriers[m1], carriers[m2])
                .expect("carriers compose along simplex vertices");
            let m12 = mor_index[&(mors[m1].1, mors[m2].2, uv)];
            compose.insert((m1, m2), m12);
        }
    }

    let names: Vec<String> = simplices.iter().map(|s| s.name(cat)).collect();
    let sub = FinCat::from_parts(names, mors, identity, compose)
        .expect("subdivision laws hold by construction");
    Subdivision {
        base: base.clone(),
        cat: Arc::new(sub),
        simplices,
        carriers,
        witnesses,
        simplex_index,
        mor_index,
    }
}

impl Subdivision {
    pub fn simplex_id(&self, s: &Simplex) -> Option<ObjId> {
        self.simplex_index.get(s).copied()
    }

    pub fn morphism_id(&self, tau: ObjId, sigma: ObjId, carrier: MorId) -> Option<MorId> {
        self.mor_index.get(&(tau, sigma, carrier)).copied()
    }

    /// The functor `d : C' -> C`, `d(tau) = tau(0)` and `d[tau,sigma,v] = v`.
    pub fn d_functor(&self) -> Functor {
        Functor::new(
            self.cat.clone(),
            self.base.clone(),
            self.simplices.iter().map(|s| s.base).collect(),
            self.carriers.clone(),
        )
        .expect("d is a functor")
    }

    /// Ordered hom-pairs carrying at least two distinct carriers; empty on
    /// the whole delta corpus so far, recorded by tests.
    pub fn multi_carrier_pairs(&self) -> Vec<(ObjId, ObjId)> {
        let mut count: HashMap<(ObjId, ObjId), usize> = HashMap::new();
        for &(tau, sigma, _) in self.mor_index.keys() {
            *count.entry((tau, sigma)).or_insert(0) += 1;
        }
        let mut v: Vec<(ObjId, ObjId)> =
            count.into_iter().filter(|&(_, n)| n > 1).map(|(k, _)| k).collect();
        v.sort();
        v
    }
}

/// The functor `f' : D' -> C'` induced on subdivisions by `f : D -> C`,
/// acting on simplices by postcomposition and on maps by
/// `[tau,sigma,v] -> [f'tau, f'sigma, f(v)]`. Fails with
/// `DegeneracyCollapse` when `f` sends some nonidentity morphism to an
/// identity.
pub fn subdivide_functor(
    f: &Functor,
    sub_source: &Subdivision,
    sub_target: &Subdivision,
) -> Result<Functor> {
    assert_eq!(f.source.as_ref(), sub_source.base.as_ref());
    assert_eq!(f.target.as_ref(), sub_target.base.as_ref());
    let mut ob_map = Vec::with_capacity(sub_source.simplices.len());
    for s in &sub_source.simplices {
        let mut chain = Vec::with_capacity(s.chain.len());
        for &m in &s.chain {
            let fm = f.on_morphism(m);
            if f.target.is_identity(fm) {
                return Err(Error::DegeneracyCollapse {
                    morphism: f.source.morphism_name(m).to_string(),
                });
            }
            chain.push(fm);
        }
        let image = Simplex { base: f.on_object(s.base), chain };
        ob_map.push(
            sub_target
                .simplex_id(&image)
                .expect("image simplex exists in the full subdivision"),
        );
    }
    let mut mor_map = Vec::with_capacity(sub_source.cat.n_morphisms());
    for m in 0..sub_source.cat.n_morphisms() {
        let tau = sub_source.cat.dom(m);
        let sigma = sub_source.cat.cod(m);
        let v = f.on_morphism(sub_source.carriers[m]);
        mor_map.push(
            sub_target
                .morphism_id(ob_map[tau], ob_map[sigma], v)
                .expect("image map exists: the same witness applies"),
        );
    }
    Functor::new(sub_source.cat.clone(), sub_target.cat.clone(), ob_map, mor_map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(c: FinCat) -> Arc<FinCat> {
        Arc::new(c)
    }

    #[test]
    fn terminal_subdivides_to_terminal() {
        let sub = subdivide(&arc(FinCat::terminal())).unwrap();
        assert_eq!(sub.cat.n_objects(), 1);
        assert_eq!(sub.cat.n_morphisms(), 1);
    }

    #[test]
    fn interval_subdivision_counts() {
        // Two 0-simplices and one 1-simplex; 3 identities plus the two
        // face maps of the 1-simplex.
        let sub = subdivide(&arc(FinCat::interval())).unwrap();
        assert_eq!(sub.cat.n_objects(), 3);
        assert_eq!(sub.cat.n_morphisms(), 5);
        assert!(sub.cat.is_poset());
    }

    #[test]
    fn parallel_pair_subdivision_is_circle_poset() {
        let sub = subdivide(&arc(FinCat::parallel_pair())).unwrap();
        assert_eq!(sub.cat.n_objects(), 4);
        assert_eq!(sub.cat.n_morphisms(), 8);
        assert!(sub.cat.is_poset());
        assert!(sub.multi_carrier_pairs().is_empty());
    }

    #[test]
    fn d_functor_values() {
        let base = arc(FinCat::interval());
        let sub = subdivide(&base).unwrap();
        let d = sub.d_functor();
        // The 1-simplex goes to its 0th vertex, object 0.
        let one_simplex = sub.simplices.iter().position(|s| s.dim() == 1).unwrap();
        assert_eq!(d.on_object(one_simplex), 0);
        // Identity of a simplex maps to the identity of tau(0).
        let idm = sub.cat.id(one_simplex);
        assert_eq!(d.on_morphism(idm), base.id(0));
    }

    #[test]
    fn d_carries_face_map_to_arrow() {
        let base = arc(FinCat::parallel_pair());
        let u = base.morphism_index("u").unwrap();
        let sub = subdivide(&base).unwrap();
        let d = sub.d_functor();
        let u_simplex = sub.simplex_id(&Simplex { base: 0, chain: vec![u] }).unwrap();
        let b_simplex = sub.simplex_id(&Simplex { base: 1, chain: vec![] }).unwrap();
        let m = sub.morphism_id(u_simplex, b_simplex, u).unwrap();
        assert_eq!(d.on_morphism(m), u);
    }

    #[test]
    fn capped_subdivision_of_idempotent_endo() {
        let endo = FinCat::build(
            vec!["x".into()],
            vec![
                ("idx".into(), "x".into(), "x".into()),
                ("e".into(), "x".into(), "x".into()),
            ],
            vec![("x".into(), "idx".into())],
            vec![("e".into(), "e".into(), "e".into())],
        )
        .unwrap();
        let endo = arc(endo);
        assert!(subdivide(&endo).is_err());
        let sub = subdivide_capped(&endo, 2);
        // 0-simplex x, chains (e) and (e,e).
        assert_eq!(sub.cat.n_objects(), 3);
        assert!(sub.cat.is_delta());
    }

    #[test]
    fn cap_zero_gives_discrete() {
        let sub = subdivide_capped(&arc(FinCat::parallel_pair()), 0);
        assert_eq!(sub.cat.n_objects(), 2);
        assert_eq!(sub.cat.n_morphisms(), 2);
    }

    #[test]
    fn cap_inactive_matches_full() {
        let base = arc(FinCat::chain(2));
        let full = subdivide(&base).unwrap();
        let capped = subdivide_capped(&base, 10);
        assert_eq!(full.cat.as_ref(), capped.cat.as_ref());
    }

    #[test]
    fn hom_respects_dimension() {
        let sub = subdivide(&arc(FinCat::chain(2))).unwrap();
        for tau in 0..sub.cat.n_objects() {
            for sigma in 0..sub.cat.n_objects() {
                if sub.simplices[tau].dim() < sub.simplices[sigma].dim() {
                    assert!(sub.cat.hom(tau, sigma).is_empty());
                }
            }
        }
    }

    #[test]
    fn every_base_morphism_is_a_carrier_from_its_one_simplex() {
        let base = arc(FinCat::chain(2));
        let sub = subdivide(&base).unwrap();
        for m in base.nonidentity_morphisms() {
            let tau = sub
                .simplex_id(&Simplex { base: base.dom(m), chain: vec![m] })
                .unwrap();
            let target = sub
                .simplex_id(&Simplex { base: base.cod(m), chain: vec![] })
                .unwrap();
            assert!(sub.morphism_id(tau, target, m).is_some());
        }
    }

    #[test]
    fn induced_functor_on_subdivisions() {
        let small = arc(FinCat::interval());
        let big = arc(FinCat::chain(2));
        // Inclusion of the interval as 0 < 1 inside 0 < 1 < 2.
        let ob_map = vec![0, 1];
        let mor_map: Vec<MorId> = (0..small.n_morphisms())
            .map(|m| {
                let (d, c) = (small.dom(m), small.cod(m));
                big.hom(d, c)[0]
            })
            .collect();
        let f = Functor::new(small.clone(), big.clone(), ob_map, mor_map).unwrap();
        let sub_small = subdivide(&small).unwrap();
        let sub_big = subdivide(&big).unwrap();
        let fp = subdivide_functor(&f, &sub_small, &sub_big).unwrap();
        // Naturality square d_C . f' = f . d_D holds exactly.
        let d_small = sub_small.d_functor();
        let d_big = sub_big.d_functor();
        let left = fp.then(&d_big).unwrap();
        let right = d_small.then(&f).unwrap();
        assert_eq!(left.ob_map, right.ob_map);
        assert_eq!(left.mor_map, right.mor_map);
        // Identity functor subdivides to the identity.
        let idf = Functor::identity(small.clone());
        let idp = subdivide_functor(&idf, &sub_small, &sub_small).unwrap();
        assert_eq!(idp.ob_map, (0..sub_small.cat.n_objects()).collect::<Vec<_>>());
    }

    #[test]
    fn collapsing_functor_is_rejected() {
        let small = arc(FinCat::interval());
        let term = arc(FinCat::terminal());
        let f = Functor::new(small.clone(), term.clone(), vec![0, 0], vec![0, 0, 0]).unwrap();
        let sub_small = subdivide(&small).unwrap();
        let sub_term = subdivide(&term).unwrap();
        let err = subdivide_functor(&f, &sub_small, &sub_term).unwrap_err();
        assert!(matches!(err, Error::DegeneracyCollapse { .. }));
    }

    #[test]
    fn double_subdivision_of_delta_is_poset() {
        let base = arc(FinCat::parallel_pair());
        let once = subdivide(&base).unwrap();
        assert!(once.cat.is_delta());
        let twice = subdivide(&once.cat).unwrap();
        assert!(twice.cat.is_poset());
        // The nerve of the parallel pair is a circle: after two
        // subdivisions we see the octagon.
        assert_eq!(twice.cat.n_objects(), 8);
        assert_eq!(twice.cat.nonidentity_morphisms().len(), 8);
    }
}
