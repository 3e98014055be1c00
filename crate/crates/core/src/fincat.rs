//! Finite categories as explicit data: objects, morphisms, and a fully
//! materialized composition table, with exhaustive law checking.
//!
//! Composition is written diagrammatically throughout: `compose(u, v)` is
//! "u then v", defined when `cod(u) == dom(v)`, with `dom(uv) = dom(u)`
//! and `cod(uv) = cod(v)`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
struct MorInfo {
    name: String,
    dom: ObjId,
    cod: ObjId,
}

/// A finite category. Morphism identity is nominal: two distinct ids with
/// equal endpoints are distinct morphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    objects: Vec<String>,
    morphisms: Vec<MorInfo>,
    identity: Vec<MorId>,
    compose: HashMap<(MorId, MorId), MorId>,
    hom: Vec<Vec<Vec<MorId>>>,
}

impl FinCat {
    /// Build and validate. On failure the error lists every violated law
    /// with the offending elements.
    pub fn build(
        objects: Vec<String>,
        morphisms: Vec<(String, String, String)>,
        identities: Vec<(String, String)>,
        compositions: Vec<(String, String, String)>,
    ) -> Result<Self> {
        let mut violations = Vec::new();
        let mut obj_idx = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_idx.insert(o.clone(), i).is_some() {
                violations.push(format!("duplicate object name {o:?}"));
            }
        }
        let mut mor_idx = HashMap::new();
        let mut mors = Vec::new();
        for (name, dom, cod) in &morphisms {
            let d = obj_idx.get(dom).copied();
            let c = obj_idx.get(cod).copied();
            if d.is_none() {
                violations.push(format!("morphism {name:?} has unknown domain {dom:?}"));
            }
            if c.is_none() {
                violations.push(format!("morphism {name:?} has unknown codomain {cod:?}"));
            }
            if mor_idx.insert(name.clone(), mors.len()).is_some() {
                violations.push(format!("duplicate morphism name {name:?}"));
            }
            mors.push(MorInfo {
                name: name.clone(),
                dom: d.unwrap_or(0),
                cod: c.unwrap_or(0),
            });
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }

        // Identities must be explicitly listed, one per object.
        let mut identity = vec![usize::MAX; objects.len()];
        for (obj, mor) in &identities {
            match (obj_idx.get(obj), mor_idx.get(mor)) {
                (Some(&o), Some(&m)) => {
                    if mors[m].dom != o || mors[m].cod != o {
                        violations.push(format!(
                            "identity {mor:?} of {obj:?} is not an endomorphism of {obj:?}"
                        ));
                    }
                    if identity[o] != usize::MAX {
                        violations.push(format!("two identities listed for {obj:?}"));
                    }
                    identity[o] = m;
                }
                _ => violations.push(format!("identity entry ({obj:?}, {mor:?}) has unknown names")),
            }
        }
        for (o, &id) in identity.iter().enumerate() {
            if id == usize::MAX {
                violations.push(format!("object {:?} has no explicit identity", objects[o]));
            }
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }

        let mut table: HashMap<(MorId, MorId), MorId> = HashMap::new();
        // Identity compositions are forced by the laws; fill them first.
        for (m, info) in mors.iter().enumerate() {
            table.insert((identity[info.dom], m), m);
            table.insert((m, identity[info.cod]), m);
        }
        for (u, v, w) in &compositions {
            match (mor_idx.get(u), mor_idx.get(v), mor_idx.get(w)) {
                (Some(&u), Some(&v), Some(&w)) => {
                    if mors[u].cod != mors[v].dom {
                        violations.push(format!(
                            "composition entry ({0:?},{1:?}) is not composable: cod {0:?} != dom {1:?}",
                            mors[u].name, mors[v].name
                        ));
                        continue;
                    }
                    if mors[w].dom != mors[u].dom || mors[w].cod != mors[v].cod {
                        violations.push(format!(
                            "composite of {:?} then {:?} must go {} -> {}, but {:?} does not",
                            mors[u].name,
                            mors[v].name,
                            objects[mors[u].dom],
                            objects[mors[v].cod],
                            mors[w].name
                        ));
                    }
                    if let Some(&prev) = table.get(&(u, v)) {
                        if prev != w {
                            violations.push(format!(
                                "conflicting composites for ({:?},{:?}): {:?} vs {:?}",
                                mors[u].name, mors[v].name, mors[prev].name, mors[w].name
                            ));
                        }
                    }
                    table.insert((u, v), w);
                }
                _ => violations.push(format!("composition entry ({u:?},{v:?},{w:?}) has unknown names")),
            }
        }
        // Totality on composable pairs.
        for u in 0..mors.len() {
            for v in 0..mors.len() {
                if mors[u].cod == mors[v].dom && !table.contains_key(&(u, v)) {
                    violations.push(format!(
                        "missing composite for composable pair ({:?},{:?})",
                        mors[u].name, mors[v].name
                    ));
                }
            }
        }
        if !violations.is_empty() {
            return Err(Error::Invalid(violations));
        }

        let cat = FinCat::assemble(objects, mors, identity, table);
        cat.check_laws().map_err(Error::Invalid)?;
        Ok(cat)
    }

    fn assemble(
        objects: Vec<String>,
        morphisms: Vec<MorInfo>,
        identity: Vec<MorId>,
        compose: HashMap<(MorId, MorId), MorId>,
    ) -> Self {
        let mut hom = vec![vec![Vec::new(); objects.len()]; objects.len()];
        for (m, info) in morphisms.iter().enumerate() {
            hom[info.dom][info.cod].push(m);
        }
        FinCat { objects, morphisms, identity, compose, hom }
    }

    /// Construct from already-indexed data, validating all laws. Used by
    /// generated categories (subdivisions, opposites, comma categories).
    pub fn from_parts(
        objects: Vec<String>,
        morphisms: Vec<(String, ObjId, ObjId)>,
        identity: Vec<MorId>,
        compose: HashMap<(MorId, MorId), MorId>,
    ) -> Result<Self> {
        let mors = morphisms
            .into_iter()
            .map(|(name, dom, cod)| MorInfo { name, dom, cod })
            .collect();
        let cat = FinCat::assemble(objects, mors, identity, compose);
        cat.check_laws().map_err(Error::Invalid)?;
        Ok(cat)
    }

    /// Exhaustive check of unit laws, composability bookkeeping, and
    /// associativity over all composable triples.
    fn check_laws(&self) -> std::result::Result<(), Vec<String>> {
        let mut violations = Vec::new();
        for (o, &id) in self.identity.iter().enumerate() {
            let info = &self.morphisms[id];
            if info.dom != o || info.cod != o {
                violations.push(format!("identity of {:?} has wrong endpoints", self.objects[o]));
            }
        }
        for (&(u, v), &w) in &self.compose {
            let (iu, iv, iw) = (&self.morphisms[u], &self.morphisms[v], &self.morphisms[w]);
            if iu.cod != iv.dom {
                violations.push(format!("table entry ({:?},{:?}) not composable", iu.name, iv.name));
            }
            if iw.dom != iu.dom || iw.cod != iv.cod {
                violations.push(format!(
                    "composite ({:?},{:?}) = {:?} has wrong endpoints",
                    iu.name, iv.name, iw.name
                ));
            }
        }
        for m in 0..self.morphisms.len() {
            let info = &self.morphisms[m];
            if self.compose.get(&(self.identity[info.dom], m)) != Some(&m) {
                violations.push(format!("left identity law fails for {:?}", info.name));
            }
            if self.compose.get(&(m, self.identity[info.cod])) != Some(&m) {
                violations.push(format!("right identity law fails for {:?}", info.name));
            }
        }
        for u in 0..self.morphisms.len() {
            for &v in self.out_of(self.morphisms[u].cod) {
                let uv = match self.compose.get(&(u, v)) {
                    Some(&uv) => uv,
                    None => {
                        violations.push(format!(
                            "missing composite ({:?},{:?})",
                            self.morphisms[u].name, self.morphisms[v].name
                        ));
                        continue;
                    }
                };
                for &w in self.out_of(self.morphisms[v].cod) {
                    let vw = self.compose[&(v, w)];
                    let left = self.compose.get(&(uv, w));
                    let right = self.compose.get(&(u, vw));
                    if left != right || left.is_none() {
                        violations.push(format!(
                            "associativity fails on ({:?},{:?},{:?})",
                            self.morphisms[u].name, self.morphisms[v].name, self.morphisms[w].name
                        ));
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o]
    }

    pub fn morphism_name(&self, m: MorId) -> &str {
        &self.morphisms[m].name
    }

    pub fn object_index(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn morphism_index(&self, name: &str) -> Option<MorId> {
        self.morphisms.iter().position(|m| m.name == name)
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.morphisms[m].dom
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.morphisms[m].cod
    }

    pub fn id(&self, o: ObjId) -> MorId {
        self.identity[o]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identity[self.morphisms[m].dom] == m
    }

    /// `u` then `v`; `None` when not composable.
    pub fn compose(&self, u: MorId, v: MorId) -> Option<MorId> {
        self.compose.get(&(u, v)).copied()
    }

    /// Compose a chain of morphisms left to right; empty chain yields the
    /// identity at `at`.
    pub fn compose_chain(&self, at: ObjId, chain: &[MorId]) -> Option<MorId> {
        let mut acc = self.identity[at];
        for &m in chain {
            acc = self.compose(acc, m)?;
        }
        Some(acc)
    }

    pub fn hom(&self, i: ObjId, j: ObjId) -> &[MorId] {
        &self.hom[i][j]
    }

    fn out_of(&self, o: ObjId) -> std::iter::FlatMap<std::slice::Iter<'_, Vec<MorId>>, std::slice::Iter<'_, MorId>, fn(&Vec<MorId>) -> std::slice::Iter<'_, MorId>> {
        self.hom[o].iter().flat_map(|v| v.iter())
    }

    pub fn morphisms_from(&self, o: ObjId) -> Vec<MorId> {
        self.hom[o].iter().flatten().copied().collect()
    }

    pub fn nonidentity_morphisms(&self) -> Vec<MorId> {
        (0..self.morphisms.len()).filter(|&m| !self.is_identity(m)).collect()
    }

    /// A delta: the only endomorphisms are identities, and `Hom(i,j)` and
    /// `Hom(j,i)` are never both inhabited for distinct `i`, `j`.
    pub fn is_delta(&self) -> bool {
        self.delta_violation().is_none()
    }

    pub fn delta_violation(&self) -> Option<String> {
        for m in 0..self.morphisms.len() {
            let info = &self.morphisms[m];
            if info.dom == info.cod && !self.is_identity(m) {
                return Some(format!("nonidentity endomorphism {:?}", info.name));
            }
        }
        for i in 0..self.objects.len() {
            for j in (i + 1)..self.objects.len() {
                if !self.hom[i][j].is_empty() && !self.hom[j][i].is_empty() {
                    return Some(format!(
                        "two-cycle between {:?} and {:?}",
                        self.objects[i], self.objects[j]
                    ));
                }
            }
        }
        None
    }

    /// A poset: a delta with at most one morphism between any ordered pair.
    pub fn is_poset(&self) -> bool {
        self.is_delta()
            && self
                .hom
                .iter()
                .all(|row| row.iter().all(|h| h.len() <= 1))
    }

    pub fn opposite(&self) -> FinCat {
        let morphisms = self
            .morphisms
            .iter()
            .map(|m| MorInfo { name: m.name.clone(), dom: m.cod, cod: m.dom })
            .collect();
        let compose = self.compose.iter().map(|(&(u, v), &w)| ((v, u), w)).collect();
        let cat = FinCat::assemble(self.objects.clone(), morphisms, self.identity.clone(), compose);
        debug_assert!(cat.check_laws().is_ok());
        cat
    }

    /// For posets: the unique morphism `i -> j` if present.
    pub fn leq(&self, i: ObjId, j: ObjId) -> Option<MorId> {
        self.hom[i][j].first().copied()
    }

    /// DOT rendering of the underlying graph: objects as nodes, nonidentity
    /// morphisms as edges.
    pub fn to_dot(&self, name: &str) -> String {
        let mut s = format!("digraph {:?} {{\n", name);
        for o in &self.objects {
            s.push_str(&format!("  {:?};\n", o));
        }
        for m in self.nonidentity_morphisms() {
            let info = &self.morphisms[m];
            s.push_str(&format!(
                "  {:?} -> {:?} [label={:?}];\n",
                self.objects[info.dom], self.objects[info.cod], info.name
            ));
        }
        s.push_str("}\n");
        s
    }

    // ---- canned categories ----

    pub fn terminal() -> FinCat {
        FinCat::build(
            vec!["*".into()],
            vec![("id@*".into(), "*".into(), "*".into())],
            vec![("*".into(), "id@*".into())],
            vec![],
        )
        .unwrap()
    }

    pub fn discrete(names: &[&str]) -> FinCat {
        let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let morphisms = objects
            .iter()
            .map(|o| (format!("id@{o}"), o.clone(), o.clone()))
            .collect();
        let identities = objects.iter().map(|o| (o.clone(), format!("id@{o}"))).collect();
        FinCat::build(objects, morphisms, identities, vec![]).unwrap()
    }

    /// Poset category from a reflexive-transitive closure of the given
    /// strict relations on named objects.
    pub fn poset(names: &[&str], relations: &[(&str, &str)]) -> Result<FinCat> {
        let objects: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let n = objects.len();
        let idx = |s: &str| objects.iter().position(|o| o == s);
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            le[i][i] = true;
        }
        for (a, b) in relations {
            let (i, j) = match (idx(a), idx(b)) {
                (Some(i), Some(j)) => (i, j),
                _ => return Err(Error::Parse(format!("unknown object in relation ({a},{b})"))),
            };
            le[i][j] = true;
        }
        // Warshall closure.
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(Error::NotAPoset(format!(
                        "cycle between {:?} and {:?}",
                        objects[i], objects[j]
                    )));
                }
            }
        }
        let mut morphisms = Vec::new();
        let mut identities = Vec::new();
        let mname = |i: usize, j: usize, objects: &[String]| {
            if i == j {
                format!("id@{}", objects[i])
            } else {
                format!("{}<{}", objects[i], objects[j])
            }
        };
        for i in 0..n {
            for j in 0..n {
                if le[i][j] {
                    morphisms.push((mname(i, j, &objects), objects[i].clone(), objects[j].clone()));
                    if i == j {
                        identities.push((objects[i].clone(), mname(i, j, &objects)));
                    }
                }
            }
        }
        let mut compositions = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if le[i][j] && le[j][k] && i != j && j != k {
                        compositions.push((
                            mname(i, j, &objects),
                            mname(j, k, &objects),
                            mname(i, k, &objects),
                        ));
                    }
                }
            }
        }
        FinCat::build(objects, morphisms, identities, compositions)
    }

    /// The linear poset `0 < 1 < ... < n`.
    pub fn chain(n: usize) -> FinCat {
        let names: Vec<String> = (0..=n).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let rels: Vec<(&str, &str)> = (0..n).map(|i| (refs[i], refs[i + 1])).collect();
        FinCat::poset(&refs, &rels).unwrap()
    }

    pub fn interval() -> FinCat {
        FinCat::chain(1)
    }

    /// Two objects with two parallel nonidentity arrows; a delta that is
    /// not a poset, whose nerve is a circle.
    pub fn parallel_pair() -> FinCat {
        FinCat::build(
            vec!["a".into(), "b".into()],
            vec![
                ("id@a".into(), "a".into(), "a".into()),
                ("id@b".into(), "b".into(), "b".into()),
                ("u".into(), "a".into(), "b".into()),
                ("v".into(), "a".into(), "b".into()),
            ],
            vec![("a".into(), "id@a".into()), ("b".into(), "id@b".into())],
            vec![],
        )
        .unwrap()
    }

    /// Free category on a directed graph: morphisms are paths, composition
    /// is concatenation. Requires the graph to be acyclic.
    pub fn free_on_graph(nodes: &[&str], edges: &[(&str, &str, &str)]) -> Result<FinCat> {
        let objects: Vec<String> = nodes.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| objects.iter().position(|o| o == s);
        let mut edge_list: Vec<(String, usize, usize)> = Vec::new();
        for (name, a, b) in edges {
            let (i, j) = match (idx(a), idx(b)) {
                (Some(i), Some(j)) => (i, j),
                _ => return Err(Error::Parse(format!("unknown node in edge {name:?}"))),
            };
            if i == j {
                return Err(Error::Parse(format!("loop edge {name:?} makes the free category infinite")));
            }
            edge_list.push((name.to_string(), i, j));
        }
        // Enumerate all paths (cycle-free by acyclicity check below).
        let mut reach = vec![vec![false; objects.len()]; objects.len()];
        for &(_, i, j) in &edge_list {
            reach[i][j] = true;
        }
        for k in 0..objects.len() {
            for i in 0..objects.len() {
                for j in 0..objects.len() {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        for i in 0..objects.len() {
            if reach[i][i] {
                return Err(Error::Parse(format!(
                    "graph has a cycle through {:?}; free category would be infinite",
                    objects[i]
                )));
            }
        }
        // Paths as sequences of edge indices, found by DFS from every node.
        let mut paths: Vec<(Vec<usize>, usize, usize)> = Vec::new();
        fn extend(
            edge_list: &[(String, usize, usize)],
            cur: &mut Vec<usize>,
            from: usize,
            at: usize,
            paths: &mut Vec<(Vec<usize>, usize, usize)>,
        ) {
            for (e, &(_, a, b)) in edge_list.iter().enumerate() {
                if a == at {
                    cur.push(e);
                    paths.push((cur.clone(), from, b));
                    extend(edge_list, cur, from, b, paths);
                    cur.pop();
                }
            }
        }
        for o in 0..objects.len() {
            extend(&edge_list, &mut Vec::new(), o, o, &mut paths);
        }
        let path_name = |p: &[usize]| -> String {
            p.iter().map(|&e| edge_list[e].0.clone()).collect::<Vec<_>>().join("*")
        };
        let mut morphisms: Vec<(String, String, String)> = objects
            .iter()
            .map(|o| (format!("id@{o}"), o.clone(), o.clone()))
            .collect();
        let identities = objects.iter().map(|o| (o.clone(), format!("id@{o}"))).collect();
        for (p, a, b) in &paths {
            morphisms.push((path_name(p), objects[*a].clone(), objects[*b].clone()));
        }
        let mut compositions = Vec::new();
        for (p, _, pb) in &paths {
            for (q, qa, _) in &paths {
                if pb == qa {
                    let mut pq = p.clone();
                    pq.extend(q);
                    compositions.push((path_name(p), path_name(q), path_name(&pq)));
                }
            }
        }
        FinCat::build(objects, morphisms, identities, compositions)
    }
}

/// A functor between finite categories; preservation of endpoints,
/// identities, and composition is checked exhaustively at construction.
#[derive(Clone, Debug)]
pub struct Functor {
    pub source: Arc<FinCat>,
    pub target: Arc<FinCat>,
    pub ob_map: Vec<ObjId>,
    pub mor_map: Vec<MorId>,
}

impl Functor {
    pub fn new(
        source: Arc<FinCat>,
        target: Arc<FinCat>,
        ob_map: Vec<ObjId>,
        mor_map: Vec<MorId>,
    ) -> Result<Self> {
        let f = Functor { source, target, ob_map, mor_map };
        f.check().map_err(Error::Invalid)?;
        Ok(f)
    }

    fn check(&self) -> std::result::Result<(), Vec<String>> {
        let mut violations = Vec::new();
        let (s, t) = (&self.source, &self.target);
        if self.ob_map.len() != s.n_objects() || self.mor_map.len() != s.n_morphisms() {
            return Err(vec!["functor maps have wrong lengths".into()]);
        }
        for m in 0..s.n_morphisms() {
            let fm = self.mor_map[m];
            if t.dom(fm) != self.ob_map[s.dom(m)] || t.cod(fm) != self.ob_map[s.cod(m)] {
                violations.push(format!("endpoints not preserved on {:?}", s.morphism_name(m)));
            }
        }
        for o in 0..s.n_objects() {
            if self.mor_map[s.id(o)] != t.id(self.ob_map[o]) {
                violations.push(format!("identity not preserved at {:?}", s.object_name(o)));
            }
        }
        for u in 0..s.n_morphisms() {
            for v in 0..s.n_morphisms() {
                if let Some(uv) = s.compose(u, v) {
                    let lhs = t.compose(self.mor_map[u], self.mor_map[v]);
                    if lhs != Some(self.mor_map[uv]) {
                        violations.push(format!(
                            "composition not preserved on ({:?},{:?})",
                            s.morphism_name(u),
                            s.morphism_name(v)
                        ));
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn identity(cat: Arc<FinCat>) -> Functor {
        Functor {
            ob_map: (0..cat.n_objects()).collect(),
            mor_map: (0..cat.n_morphisms()).collect(),
            source: cat.clone(),
            target: cat,
        }
    }

    /// Diagrammatic composite: `self` then `g`.
    pub fn then(&self, g: &Functor) -> Result<Functor> {
        assert_eq!(
            self.target.as_ref(),
            g.source.as_ref(),
            "functor composition endpoint mismatch"
        );
        Functor::new(
            self.source.clone(),
            g.target.clone(),
            self.ob_map.iter().map(|&o| g.ob_map[o]).collect(),
            self.mor_map.iter().map(|&m| g.mor_map[m]).collect(),
        )
    }

    pub fn on_object(&self, o: ObjId) -> ObjId {
        self.ob_map[o]
    }

    pub fn on_morphism(&self, m: MorId) -> MorId {
        self.mor_map[m]
    }

    /// Constant functor at an object of `target`.
    pub fn constant(source: Arc<FinCat>, target: Arc<FinCat>, at: ObjId) -> Functor {
        Functor {
            ob_map: vec![at; source.n_objects()],
            mor_map: vec![target.id(at); source.n_morphisms()],
            source,
            target,
        }
    }
}

/// The comma category `i/f` for a functor `f : D -> C` and an object `i`
/// of `C`: objects are pairs `(w, sigma)` with `w : i -> f(sigma)`, and a
/// map `(u, tau) -> (w, sigma)` is a `D`-map `v : tau -> sigma` with
/// `u(fv) = w`.
#[derive(Clone, Debug)]
pub struct CommaCat {
    pub cat: Arc<FinCat>,
    /// For each comma object, the pair `(w, sigma)`.
    pub objects: Vec<(MorId, ObjId)>,
    /// For each comma morphism, the underlying `D`-map `v`.
    pub d_map: Vec<MorId>,
    pub anchor: ObjId,
}

pub fn comma_category(f: &Functor, i: ObjId) -> CommaCat {
    let c = &f.target;
    let d = &f.source;
    let mut objects: Vec<(MorId, ObjId)> = Vec::new();
    for sigma in 0..d.n_objects() {
        for &w in c.hom(i, f.on_object(sigma)) {
            objects.push((w, sigma));
        }
    }
    let obj_index: HashMap<(MorId, ObjId), usize> =
        objects.iter().enumerate().map(|(k, &p)| (p, k)).collect();
    let names: Vec<String> = objects
        .iter()
        .map(|&(w, s)| format!("({},{})", c.morphism_name(w), d.object_name(s)))
        .collect();

    let mut mors: Vec<(String, ObjId, ObjId)> = Vec::new();
    let mut d_map: Vec<MorId> = Vec::new();
    let mut mor_index: HashMap<(usize, usize, MorId), usize> = HashMap::new();
    for (a, &(u, tau)) in objects.iter().enumerate() {
        for v in 0..d.n_morphisms() {
            if d.dom(v) != tau {
                continue;
            }
            let sigma = d.cod(v);
            let w = match c.compose(u, f.on_morphism(v)) {
                Some(w) => w,
                None => continue,
            };
            let b = obj_index[&(w, sigma)];
            let name = format!("[{}->{}:{}]", names[a], names[b], d.morphism_name(v));
            mor_index.insert((a, b, v), mors.len());
            d_map.push(v);
            mors.push((name, a, b));
        }
    }
    let mut identity = vec![usize::MAX; objects.len()];
    for (k, &(_, sigma)) in objects.iter().enumerate() {
        identity[k] = mor_index[&(k, k, d.id(sigma))];
    }
    let mut compose = HashMap::new();
    for (m1, &(a, b, _)) in mor_index.iter().map(|(k, v)| (*v, k)) {
        for (m2, &(b2, e, _)) in mor_index.iter().map(|(k, v)| (*v, k)) {
            if b == b2 {
                let v12 = f.source.compose(d_map[m1], d_map[m2]).expect("composable in D");
                let m12 = mor_index[&(a, e, v12)];
                compose.insert((m1, m2), m12);
            }
        }
    }
    let cat = FinCat::from_parts(names, mors, identity, compose)
        .expect("comma category laws hold by construction");
    CommaCat { cat: Arc::new(cat), objects, d_map, anchor: i }
}

impl CommaCat {
    /// The functor `i/f -> h/f` induced by `v : h -> i`, acting on objects
    /// by `(w, sigma) -> (vw, sigma)`.
    pub fn induced(&self, f: &Functor, v: MorId, target_comma: &CommaCat) -> Result<Functor> {
        let c = &f.target;
        assert_eq!(c.cod(v), self.anchor);
        assert_eq!(c.dom(v), target_comma.anchor);
        let obj_index: HashMap<(MorId, ObjId), usize> = target_comma
            .objects
            .iter()
            .enumerate()
            .map(|(k, &p)| (p, k))
            .collect();
        let ob_map: Vec<ObjId> = self
            .objects
            .iter()
            .map(|&(w, sigma)| obj_index[&(c.compose(v, w).expect("composable"), sigma)])
            .collect();
        // Comma morphisms are determined by endpoints plus the D-map.
        let mut tgt_mor: HashMap<(usize, usize, MorId), MorId> = HashMap::new();
        for m in 0..target_comma.cat.n_morphisms() {
            tgt_mor.insert(
                (target_comma.cat.dom(m), target_comma.cat.cod(m), target_comma.d_map[m]),
                m,
            );
        }
        let mor_map: Vec<MorId> = (0..self.cat.n_morphisms())
            .map(|m| tgt_mor[&(ob_map[self.cat.dom(m)], ob_map[self.cat.cod(m)], self.d_map[m])])
            .collect();
        Functor::new(self.cat.clone(), target_comma.cat.clone(), ob_map, mor_map)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn terminal_is_valid() {
        let t = FinCat::terminal();
        assert_eq!(t.n_objects(), 1);
        assert_eq!(t.n_morphisms(), 1);
        assert!(t.is_delta());
        assert!(t.is_poset());
    }

    #[test]
    fn interval_is_poset() {
        let c = FinCat::interval();
        assert_eq!(c.n_objects(), 2);
        assert_eq!(c.n_morphisms(), 3);
        assert!(c.is_poset());
    }

    #[test]
    fn associativity_violation_names_triple() {
        // A three-step chain with a deliberately wrong composite (uv)w.
        let objects = vec!["0".into(), "1".into(), "2".into(), "3".into()];
        let mk = |n: &str, a: &str, b: &str| (n.to_string(), a.to_string(), b.to_string());
        let morphisms = vec![
            mk("id0", "0", "0"),
            mk("id1", "1", "1"),
            mk("id2", "2", "2"),
            mk("id3", "3", "3"),
            mk("u", "0", "1"),
            mk("v", "1", "2"),
            mk("w", "2", "3"),
            mk("uv", "0", "2"),
            mk("vw", "1", "3"),
            mk("uvw", "0", "3"),
            mk("bad", "0", "3"),
        ];
        let identities = (0..4).map(|i| (i.to_string(), format!("id{i}"))).collect();
        let compositions = vec![
            mk("u", "v", "uv"),
            mk("v", "w", "vw"),
            mk("uv", "w", "bad"), // (uv)w != u(vw)
            mk("u", "vw", "uvw"),
        ];
        let err = FinCat::build(objects, morphisms, identities, compositions).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("associativity"), "got: {msg}");
        assert!(msg.contains("\"u\"") && msg.contains("\"v\"") && msg.contains("\"w\""));
    }

    #[test]
    fn missing_identity_rejected() {
        let err = FinCat::build(
            vec!["x".into()],
            vec![("idx".into(), "x".into(), "x".into())],
            vec![],
            vec![],
        )
        .unwrap_err();
        assert!(err.to_string().contains("no explicit identity"));
    }

    #[test]
    fn delta_and_poset_predicates() {
        assert!(FinCat::terminal().is_delta());
        let pp = FinCat::parallel_pair();
        assert!(pp.is_delta());
        assert!(!pp.is_poset());
        // One nonidentity idempotent endomorphism e with e.e = e.
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
        assert!(!endo.is_delta());
    }

    #[test]
    fn poset_implies_delta_on_samples() {
        for c in [FinCat::terminal(), FinCat::interval(), FinCat::chain(3)] {
            assert!(c.is_poset());
            assert!(c.is_delta());
        }
    }

    #[test]
    fn comma_over_identity_counts_homs() {
        // comma_category(i, identity) has sum_sigma |Hom(i, sigma)| objects.
        let c = Arc::new(FinCat::interval());
        let f = Functor::identity(c.clone());
        let comma0 = comma_category(&f, 0);
        assert_eq!(comma0.objects.len(), 2);
        assert_eq!(comma0.cat.nonidentity_morphisms().len(), 1);
        let comma1 = comma_category(&f, 1);
        assert_eq!(comma1.objects.len(), 1);
    }

    #[test]
    fn comma_constant_functor_and_empty() {
        let interval = Arc::new(FinCat::interval());
        let term = Arc::new(FinCat::terminal());
        // Constant functor from the terminal category at object 1.
        let f = Functor::constant(term.clone(), interval.clone(), 1);
        let comma0 = comma_category(&f, 0);
        assert_eq!(comma0.objects.len(), 1); // Hom(0,1) is a singleton
        // Anchor with empty Hom(i, f sigma) for all sigma: constant at 0, anchor 1.
        let g = Functor::constant(term, interval, 0);
        let comma1 = comma_category(&g, 1);
        assert_eq!(comma1.objects.len(), 0);
    }

    #[test]
    fn induced_comma_functor_preserves_composition() {
        let c = Arc::new(FinCat::chain(2));
        let f = Functor::identity(c.clone());
        let comma2 = comma_category(&f, 2);
        let comma0 = comma_category(&f, 0);
        let v = c.hom(0, 2)[0];
        // Functor validity (checked in construction) includes composition.
        let ind = comma2.induced(&f, v, &comma0).unwrap();
        assert_eq!(ind.ob_map.len(), comma2.objects.len());
    }

    #[test]
    fn free_category_on_dag() {
        let c = FinCat::free_on_graph(&["a", "b", "c"], &[("e", "a", "b"), ("f", "b", "c"), ("g", "a", "c")])
            .unwrap();
        // paths: e, f, g, e*f plus 3 identities
        assert_eq!(c.n_morphisms(), 7);
        assert!(c.is_delta());
        assert!(!c.is_poset()); // two distinct paths a -> c
        let cyc = FinCat::free_on_graph(&["a", "b"], &[("e", "a", "b"), ("f", "b", "a")]);
        assert!(cyc.is_err());
    }

    #[test]
    fn opposite_involution() {
        let c = FinCat::chain(2);
        assert_eq!(c.opposite().opposite(), c);
    }
}
