//! The workspace document format: one self-contained JSON tree naming
//! categories, functors, diagrams, modules, bimodules, maps, complexes,
//! and instance groupings. Scalars are strings (`"3"`, `"-2/7"`) so the
//! same document reads identically over any field; the field itself is a
//! document-level key. Every entity passes its module's validator on
//! load, and emitted documents re-enter the format unchanged (the formal
//! grammar ships in `docs/FORMAT.md`).

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagMap, DiagModule, Diagram};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::fincat::{FinCat, Functor};
use crate::homalg::ChainComplex;
use crate::matrix::Mat;
use crate::ralg::{Algebra, AlgebraMap, Module};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RawDocument {
    pub field: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub categories: BTreeMap<String, RawCategory>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub functors: BTreeMap<String, RawFunctor>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagrams: BTreeMap<String, RawDiagram>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub modules: BTreeMap<String, RawModule>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bimodules: BTreeMap<String, RawBimodule>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, RawMap>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub complexes: BTreeMap<String, RawComplex>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub instances: Vec<RawInstance>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawCategory {
    pub objects: Vec<String>,
    pub morphisms: Vec<RawMorphism>,
    pub identities: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub compose: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawMorphism {
    pub id: String,
    pub dom: String,
    pub cod: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawFunctor {
    pub source: String,
    pub target: String,
    pub objects: BTreeMap<String, String>,
    pub morphisms: BTreeMap<String, String>,
}

pub type RawMatrix = Vec<Vec<String>>;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawAlgebra {
    pub dim: usize,
    pub unit: Vec<String>,
    /// `products[s][t]` is the coordinate vector of `e_s e_t`.
    pub products: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawDiagram {
    pub base: String,
    pub algebras: BTreeMap<String, RawAlgebra>,
    /// Per nonidentity morphism: the matrix of `phi^v : A^cod -> A^dom`.
    pub maps: BTreeMap<String, RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawSpace {
    pub dim: usize,
    /// One action matrix per algebra basis element.
    pub actions: Vec<RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawModule {
    pub diagram: String,
    pub spaces: BTreeMap<String, RawSpace>,
    pub maps: BTreeMap<String, RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawBimoduleSpace {
    pub dim: usize,
    pub left: Vec<RawMatrix>,
    pub right: Vec<RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawBimodule {
    pub diagram: String,
    pub spaces: BTreeMap<String, RawBimoduleSpace>,
    pub maps: BTreeMap<String, RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawMap {
    pub source: String,
    pub target: String,
    pub components: BTreeMap<String, RawMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawComplex {
    /// Term names by degree, index 0 first.
    pub terms: Vec<String>,
    /// Map names, `differentials[k] : terms[k+1] -> terms[k]`.
    pub differentials: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawInstance {
    pub name: String,
    pub category: String,
    pub diagram: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module_m: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module_n: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bimodule: Option<String>,
}

/// The document-level field choice.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Fp(u64),
    Q,
}

impl FieldSpec {
    pub fn parse(s: &str) -> Result<FieldSpec> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Q);
        }
        if let Some(rest) = s.strip_prefix('F').or_else(|| s.strip_prefix('f')) {
            let p: u64 = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad field spec {s:?}")))?;
            if !crate::field::is_prime(p) {
                return Err(Error::Parse(format!("field modulus {p} is not prime")));
            }
            return Ok(FieldSpec::Fp(p));
        }
        Err(Error::Parse(format!(
            "bad field spec {s:?} (expected e.g. \"F101\" or \"Q\")"
        )))
    }

    pub fn display(&self) -> String {
        match self {
            FieldSpec::Fp(p) => format!("F{p}"),
            FieldSpec::Q => "Q".into(),
        }
    }
}

pub fn parse_document(json: &str) -> Result<RawDocument> {
    serde_json::from_str(json).map_err(|e| Error::Parse(format!("document: {e}")))
}

pub fn emit_document(doc: &RawDocument) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

/// A fully resolved and validated workspace over a concrete field.
pub struct Workspace<F: Field> {
    pub field: F,
    pub categories: BTreeMap<String, Arc<FinCat>>,
    pub functors: BTreeMap<String, Functor>,
    pub diagrams: BTreeMap<String, Arc<Diagram<F>>>,
    pub envs: BTreeMap<String, Arc<Diagram<F>>>,
    pub modules: BTreeMap<String, Arc<DiagModule<F>>>,
    pub bimodules: BTreeMap<String, Arc<DiagModule<F>>>,
    pub maps: BTreeMap<String, DiagMap<F>>,
    pub complexes: BTreeMap<String, Arc<ChainComplex<F>>>,
    pub instances: Vec<RawInstance>,
}

fn parse_matrix<F: Field>(f: F, raw: &RawMatrix, rows: usize, cols: usize, what: &str) -> Result<Mat<F>> {
    if raw.len() != rows || raw.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse(format!(
            "{what}: expected a {rows}x{cols} matrix, found {}x{}",
            raw.len(),
            raw.first().map_or(0, |r| r.len())
        )));
    }
    let mut m = Mat::zeros(f, rows, cols);
    for (r, row) in raw.iter().enumerate() {
        for (c, s) in row.iter().enumerate() {
            m.set(r, c, f.parse(s).map_err(Error::Parse)?);
        }
    }
    Ok(m)
}

fn format_matrix<F: Field>(f: F, m: &Mat<F>) -> RawMatrix {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| f.format(m.at(r, c))).collect())
        .collect()
}

pub fn resolve<F: Field>(f: F, raw: &RawDocument) -> Result<Workspace<F>> {
    let mut categories = BTreeMap::new();
    for (name, rc) in &raw.categories {
        let cat = FinCat::build(
            rc.objects.clone(),
            rc.morphisms
                .iter()
                .map(|m| (m.id.clone(), m.dom.clone(), m.cod.clone()))
                .collect(),
            rc.identities.iter().map(|(o, m)| (o.clone(), m.clone())).collect(),
            rc.compose.clone(),
        )
        .map_err(|e| Error::Parse(format!("category {name:?}: {e}")))?;
        categories.insert(name.clone(), Arc::new(cat));
    }

    let mut functors = BTreeMap::new();
    for (name, rf) in &raw.functors {
        let source = categories
            .get(&rf.source)
            .ok_or_else(|| Error::UnknownRef { kind: "category", name: rf.source.clone() })?;
        let target = categories
            .get(&rf.target)
            .ok_or_else(|| Error::UnknownRef { kind: "category", name: rf.target.clone() })?;
        let ob_map = (0..source.n_objects())
            .map(|o| {
                let image = rf.objects.get(source.object_name(o)).ok_or_else(|| {
                    Error::Parse(format!("functor {name:?}: object {:?} unmapped", source.object_name(o)))
                })?;
                target
                    .object_index(image)
                    .ok_or_else(|| Error::UnknownRef { kind: "object", name: image.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        let mor_map = (0..source.n_morphisms())
            .map(|m| {
                let mname = source.morphism_name(m);
                if let Some(image) = rf.morphisms.get(mname) {
                    target
                        .morphism_index(image)
                        .ok_or_else(|| Error::UnknownRef { kind: "morphism", name: image.clone() })
                } else if source.is_identity(m) {
                    Ok(target.id(ob_map[source.dom(m)]))
                } else {
                    Err(Error::Parse(format!("functor {name:?}: morphism {mname:?} unmapped")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let func = Functor::new(source.clone(), target.clone(), ob_map, mor_map)
            .map_err(|e| Error::Parse(format!("functor {name:?}: {e}")))?;
        functors.insert(name.clone(), func);
    }

    let mut diagrams = BTreeMap::new();
    let mut envs = BTreeMap::new();
    for (name, rd) in &raw.diagrams {
        let base = categories
            .get(&rd.base)
            .ok_or_else(|| Error::UnknownRef { kind: "category", name: rd.base.clone() })?;
        let mut algebras = Vec::with_capacity(base.n_objects());
        for o in 0..base.n_objects() {
            let oname = base.object_name(o);
            let ra = rd.algebras.get(oname).ok_or_else(|| {
                Error::Parse(format!("diagram {name:?}: no algebra at object {oname:?}"))
            })?;
            let mut products = Vec::with_capacity(ra.dim);
            for s in 0..ra.dim {
                let mut row = Vec::with_capacity(ra.dim);
                for t in 0..ra.dim {
                    let entry = ra
                        .products
                        .get(s)
                        .and_then(|r| r.get(t))
                        .ok_or_else(|| Error::Parse(format!("diagram {name:?}: truncated products at {oname:?}")))?;
                    if entry.len() != ra.dim {
                        return Err(Error::Parse(format!(
                            "diagram {name:?}: product vector of wrong length at {oname:?}"
                        )));
                    }
                    row.push(
                        entry
                            .iter()
                            .map(|x| f.parse(x).map_err(Error::Parse))
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                products.push(row);
            }
            let unit = ra
                .unit
                .iter()
                .map(|x| f.parse(x).map_err(Error::Parse))
                .collect::<Result<Vec<_>>>()?;
            let alg = Algebra::from_products(f, products, unit)
                .map_err(|e| Error::Parse(format!("diagram {name:?} at {oname:?}: {e}")))?;
            algebras.push(Arc::new(alg));
        }
        let maps = (0..base.n_morphisms())
            .map(|v| {
                let vname = base.morphism_name(v);
                let (dv, cv) = (base.dom(v), base.cod(v));
                let mat = if let Some(rawm) = rd.maps.get(vname) {
                    parse_matrix(f, rawm, algebras[dv].dim, algebras[cv].dim, &format!("map of {vname:?}"))?
                } else if base.is_identity(v) {
                    Mat::identity(f, algebras[dv].dim)
                } else {
                    return Err(Error::Parse(format!(
                        "diagram {name:?}: no map for morphism {vname:?}"
                    )));
                };
                AlgebraMap::new(algebras[cv].clone(), algebras[dv].clone(), mat)
                    .map_err(|e| Error::Parse(format!("diagram {name:?} map {vname:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let d = Diagram::new(base.clone(), algebras, maps)
            .map_err(|e| Error::Parse(format!("diagram {name:?}: {e}")))?;
        let d = Arc::new(d);
        envs.insert(name.clone(), Arc::new(d.enveloping()));
        diagrams.insert(name.clone(), d);
    }

    let mut modules = BTreeMap::new();
    for (name, rm) in &raw.modules {
        let d = diagrams
            .get(&rm.diagram)
            .ok_or_else(|| Error::UnknownRef { kind: "diagram", name: rm.diagram.clone() })?;
        let m = resolve_module(f, name, d, &rm.spaces, &rm.maps, |sp| &sp.actions, |sp| sp.dim)?;
        modules.insert(name.clone(), Arc::new(m));
    }

    let mut bimodules = BTreeMap::new();
    for (name, rb) in &raw.bimodules {
        let d = diagrams
            .get(&rb.diagram)
            .ok_or_else(|| Error::UnknownRef { kind: "diagram", name: rb.diagram.clone() })?;
        let env = envs[&rb.diagram].clone();
        let base = &d.base;
        let mut dims = Vec::new();
        let mut left = Vec::new();
        let mut right = Vec::new();
        for o in 0..base.n_objects() {
            let oname = base.object_name(o);
            let sp = rb.spaces.get(oname).ok_or_else(|| {
                Error::Parse(format!("bimodule {name:?}: no space at object {oname:?}"))
            })?;
            let adim = d.algebras[o].dim;
            if sp.left.len() != adim || sp.right.len() != adim {
                return Err(Error::Parse(format!(
                    "bimodule {name:?} at {oname:?}: need {adim} left and right action matrices"
                )));
            }
            dims.push(sp.dim);
            left.push(
                sp.left
                    .iter()
                    .map(|m| parse_matrix(f, m, sp.dim, sp.dim, "left action"))
                    .collect::<Result<Vec<_>>>()?,
            );
            right.push(
                sp.right
                    .iter()
                    .map(|m| parse_matrix(f, m, sp.dim, sp.dim, "right action"))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let trans = (0..base.n_morphisms())
            .map(|v| {
                let vname = base.morphism_name(v);
                let (dv, cv) = (base.dom(v), base.cod(v));
                if let Some(rawm) = rb.maps.get(vname) {
                    parse_matrix(f, rawm, dims[dv], dims[cv], &format!("bimodule map {vname:?}"))
                } else if base.is_identity(v) {
                    Ok(Mat::identity(f, dims[dv]))
                } else {
                    Err(Error::Parse(format!("bimodule {name:?}: no map for {vname:?}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let bm = DiagModule::bimodule_from_actions(&env, d, &dims, &left, &right, trans)
            .map_err(|e| Error::Parse(format!("bimodule {name:?}: {e}")))?;
        bimodules.insert(name.clone(), Arc::new(bm));
    }

    let mut maps = BTreeMap::new();
    for (name, rm) in &raw.maps {
        let lookup = |n: &String| -> Result<Arc<DiagModule<F>>> {
            modules
                .get(n)
                .or_else(|| bimodules.get(n))
                .cloned()
                .ok_or_else(|| Error::UnknownRef { kind: "module", name: n.clone() })
        };
        let source = lookup(&rm.source)?;
        let target = lookup(&rm.target)?;
        let base = &source.diagram.base;
        let comps = (0..base.n_objects())
            .map(|o| {
                let oname = base.object_name(o);
                let raw = rm.components.get(oname).ok_or_else(|| {
                    Error::Parse(format!("map {name:?}: missing component at {oname:?}"))
                })?;
                parse_matrix(
                    f,
                    raw,
                    target.modules[o].dim,
                    source.modules[o].dim,
                    &format!("map {name:?} at {oname:?}"),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let dm = DiagMap::new(source, target, comps)
            .map_err(|e| Error::Parse(format!("map {name:?}: {e}")))?;
        maps.insert(name.clone(), dm);
    }

    let mut complexes = BTreeMap::new();
    for (name, rc) in &raw.complexes {
        let terms = rc
            .terms
            .iter()
            .map(|t| {
                modules
                    .get(t)
                    .or_else(|| bimodules.get(t))
                    .cloned()
                    .ok_or_else(|| Error::UnknownRef { kind: "module", name: t.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        let diffs = rc
            .differentials
            .iter()
            .map(|dn| {
                maps.get(dn)
                    .cloned()
                    .ok_or_else(|| Error::UnknownRef { kind: "map", name: dn.clone() })
            })
            .collect::<Result<Vec<_>>>()?;
        let diagram = terms
            .first()
            .map(|t| t.diagram.clone())
            .ok_or_else(|| Error::Parse(format!("complex {name:?} has no terms")))?;
        let c = ChainComplex::new(diagram, terms, diffs)
            .map_err(|e| Error::Parse(format!("complex {name:?}: {e}")))?;
        complexes.insert(name.clone(), Arc::new(c));
    }

    for inst in &raw.instances {
        for (kind, key) in [("category", Some(&inst.category)), ("diagram", Some(&inst.diagram))] {
            if let Some(key) = key {
                let known = match kind {
                    "category" => categories.contains_key(key),
                    _ => diagrams.contains_key(key),
                };
                if !known {
                    return Err(Error::UnknownRef { kind: "instance reference", name: key.clone() });
                }
            }
        }
        for key in [&inst.module_m, &inst.module_n] {
            if let Some(k) = key {
                if !modules.contains_key(k) {
                    return Err(Error::UnknownRef { kind: "module", name: k.clone() });
                }
            }
        }
        if let Some(b) = &inst.bimodule {
            if !bimodules.contains_key(b) {
                return Err(Error::UnknownRef { kind: "bimodule", name: b.clone() });
            }
        }
    }

    Ok(Workspace {
        field: f,
        categories,
        functors,
        diagrams,
        envs,
        modules,
        bimodules,
        maps,
        complexes,
        instances: raw.instances.clone(),
    })
}

#[allow(clippy::too_many_arguments)]
fn resolve_module<F: Field, S>(
    f: F,
    name: &str,
    d: &Arc<Diagram<F>>,
    spaces: &BTreeMap<String, S>,
    maps: &BTreeMap<String, RawMatrix>,
    actions_of: impl Fn(&S) -> &Vec<RawMatrix>,
    dim_of: impl Fn(&S) -> usize,
) -> Result<DiagModule<F>> {
    let base = &d.base;
    let mut mods = Vec::with_capacity(base.n_objects());
    for o in 0..base.n_objects() {
        let oname = base.object_name(o);
        let sp = spaces
            .get(oname)
            .ok_or_else(|| Error::Parse(format!("module {name:?}: no space at object {oname:?}")))?;
        let dim = dim_of(sp);
        let raw_actions = actions_of(sp);
        if raw_actions.len() != d.algebras[o].dim {
            return Err(Error::Parse(format!(
                "module {name:?} at {oname:?}: need {} action matrices",
                d.algebras[o].dim
            )));
        }
        let action = raw_actions
            .iter()
            .map(|m| parse_matrix(f, m, dim, dim, &format!("action in {name:?} at {oname:?}")))
            .collect::<Result<Vec<_>>>()?;
        let m = Module::new(d.algebras[o].clone(), action)
            .map_err(|e| Error::Parse(format!("module {name:?} at {oname:?}: {e}")))?;
        mods.push(m);
    }
    let trans = (0..base.n_morphisms())
        .map(|v| {
            let vname = base.morphism_name(v);
            let (dv, cv) = (base.dom(v), base.cod(v));
            if let Some(rawm) = maps.get(vname) {
                parse_matrix(f, rawm, mods[dv].dim, mods[cv].dim, &format!("module map {vname:?}"))
            } else if base.is_identity(v) {
                Ok(Mat::identity(f, mods[dv].dim))
            } else {
                Err(Error::Parse(format!("module {name:?}: no map for {vname:?}")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    DiagModule::new(d.clone(), mods, trans).map_err(|e| Error::Parse(format!("module {name:?}: {e}")))
}

// ---- emission ----

pub fn category_to_raw(cat: &FinCat) -> RawCategory {
    RawCategory {
        objects: (0..cat.n_objects()).map(|o| cat.object_name(o).to_string()).collect(),
        morphisms: (0..cat.n_morphisms())
            .map(|m| RawMorphism {
                id: cat.morphism_name(m).to_string(),
                dom: cat.object_name(cat.dom(m)).to_string(),
                cod: cat.object_name(cat.cod(m)).to_string(),
            })
            .collect(),
        identities: (0..cat.n_objects())
            .map(|o| (cat.object_name(o).to_string(), cat.morphism_name(cat.id(o)).to_string()))
            .collect(),
        compose: {
            let mut entries = Vec::new();
            for u in 0..cat.n_morphisms() {
                for v in 0..cat.n_morphisms() {
                    if cat.is_identity(u) || cat.is_identity(v) {
                        continue;
                    }
                    if let Some(w) = cat.compose(u, v) {
                        entries.push((
                            cat.morphism_name(u).to_string(),
                            cat.morphism_name(v).to_string(),
                            cat.morphism_name(w).to_string(),
                        ));
                    }
                }
            }
            entries
        },
    }
}

pub fn algebra_to_raw<F: Field>(f: F, a: &Algebra<F>) -> RawAlgebra {
    RawAlgebra {
        dim: a.dim,
        unit: a.unit.iter().map(|x| f.format(x)).collect(),
        products: a
            .products()
            .into_iter()
            .map(|row| row.into_iter().map(|v| v.iter().map(|x| f.format(x)).collect()).collect())
            .collect(),
    }
}

pub fn diagram_to_raw<F: Field>(f: F, name_base: &str, d: &Diagram<F>) -> RawDiagram {
    RawDiagram {
        base: name_base.to_string(),
        algebras: (0..d.base.n_objects())
            .map(|o| (d.base.object_name(o).to_string(), algebra_to_raw(f, &d.algebras[o])))
            .collect(),
        maps: d
            .base
            .nonidentity_morphisms()
            .into_iter()
            .map(|v| (d.base.morphism_name(v).to_string(), format_matrix(f, &d.maps[v].mat)))
            .collect(),
    }
}

pub fn module_to_raw<F: Field>(f: F, diagram_name: &str, m: &DiagModule<F>) -> RawModule {
    let base = &m.diagram.base;
    RawModule {
        diagram: diagram_name.to_string(),
        spaces: (0..base.n_objects())
            .map(|o| {
                (
                    base.object_name(o).to_string(),
                    RawSpace {
                        dim: m.modules[o].dim,
                        actions: m.modules[o].action.iter().map(|a| format_matrix(f, a)).collect(),
                    },
                )
            })
            .collect(),
        maps: base
            .nonidentity_morphisms()
            .into_iter()
            .map(|v| (base.morphism_name(v).to_string(), format_matrix(f, &m.trans[v])))
            .collect(),
    }
}

/// Emit a bimodule (a module over the enveloping diagram) by splitting
/// its action into the left and right parts.
pub fn bimodule_to_raw<F: Field>(
    f: F,
    diagram_name: &str,
    a: &Diagram<F>,
    m: &DiagModule<F>,
) -> RawBimodule {
    let base = &a.base;
    RawBimodule {
        diagram: diagram_name.to_string(),
        spaces: (0..base.n_objects())
            .map(|o| {
                let adim = a.algebras[o].dim;
                let dim = m.modules[o].dim;
                let mut left = Vec::with_capacity(adim);
                let mut right = Vec::with_capacity(adim);
                for s in 0..adim {
                    // a (x) 1 and 1 (x) b actions.
                    let mut l = Mat::zeros(f, dim, dim);
                    let mut r = Mat::zeros(f, dim, dim);
                    for (t, c) in a.algebras[o].unit.iter().enumerate() {
                        if !f.is_zero(c) {
                            l = l.add(&m.modules[o].action[s * adim + t].scale(c));
                            r = r.add(&m.modules[o].action[t * adim + s].scale(c));
                        }
                    }
                    left.push(format_matrix(f, &l));
                    right.push(format_matrix(f, &r));
                }
                (base.object_name(o).to_string(), RawBimoduleSpace { dim, left, right })
            })
            .collect(),
        maps: base
            .nonidentity_morphisms()
            .into_iter()
            .map(|v| (base.morphism_name(v).to_string(), format_matrix(f, &m.trans[v])))
            .collect(),
    }
}

/// Serialize a corpus into one self-contained document.
pub fn corpus_to_document<F: Field>(f: F, spec: &str, instances: &[crate::corpus::Instance<F>]) -> RawDocument {
    let mut doc = RawDocument { field: spec.to_string(), ..Default::default() };
    for inst in instances {
        let cat_name = format!("{}.cat", inst.name);
        let dia_name = format!("{}.A", inst.name);
        let m_name = format!("{}.M", inst.name);
        let n_name = format!("{}.N", inst.name);
        let b_name = format!("{}.B", inst.name);
        doc.categories.insert(cat_name.clone(), category_to_raw(&inst.base));
        doc.diagrams.insert(dia_name.clone(), diagram_to_raw(f, &cat_name, &inst.diagram));
        doc.modules.insert(m_name.clone(), module_to_raw(f, &dia_name, &inst.module_m));
        doc.modules.insert(n_name.clone(), module_to_raw(f, &dia_name, &inst.module_n));
        doc.bimodules.insert(
            b_name.clone(),
            bimodule_to_raw(f, &dia_name, &inst.diagram, &inst.bimodule),
        );
        doc.instances.push(RawInstance {
            name: inst.name.clone(),
            category: cat_name,
            diagram: dia_name,
            module_m: Some(m_name),
            module_n: Some(n_name),
            bimodule: Some(b_name),
        });
    }
    doc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;

    fn f101() -> Fp {
        Fp::new(101)
    }

    #[test]
    fn field_specs() {
        assert_eq!(FieldSpec::parse("F101").unwrap(), FieldSpec::Fp(101));
        assert_eq!(FieldSpec::parse("q").unwrap(), FieldSpec::Q);
        assert!(FieldSpec::parse("F91").is_err());
        assert!(FieldSpec::parse("R").is_err());
    }

    #[test]
    fn corpus_document_round_trip() {
        let f = f101();
        let instances = crate::corpus::named_instances(f, 3);
        let doc = corpus_to_document(f, "F101", &instances[..2]);
        let text = emit_document(&doc);
        let reparsed = parse_document(&text).unwrap();
        let ws = resolve(f, &reparsed).unwrap();
        assert_eq!(ws.categories.len(), 2);
        assert_eq!(ws.modules.len(), 4);
        assert_eq!(ws.bimodules.len(), 2);
        // Re-emission is byte-identical (normalization is stable).
        let doc2 = {
            let mut d = RawDocument { field: "F101".into(), ..Default::default() };
            d.categories = reparsed.categories.clone();
            d.diagrams = reparsed.diagrams.clone();
            d.modules = reparsed.modules.clone();
            d.bimodules = reparsed.bimodules.clone();
            d.instances = reparsed.instances.clone();
            d
        };
        assert_eq!(emit_document(&doc2), text);
    }

    #[test]
    fn unknown_reference_is_named() {
        let text = r#"{
            "field": "F101",
            "modules": {"M": {"diagram": "nope", "spaces": {}, "maps": {}}}
        }"#;
        let raw = parse_document(text).unwrap();
        let err = match resolve(f101(), &raw) {
            Err(e) => e,
            Ok(_) => panic!("expected an unknown-reference error"),
        };
        let msg = err.to_string();
        assert!(msg.contains("nope"), "got: {msg}");
    }

    #[test]
    fn subdivision_closure_through_format() {
        // The subdivided category serializes and re-validates.
        let f = f101();
        let base = std::sync::Arc::new(FinCat::parallel_pair());
        let sub = crate::subdivision::subdivide(&base).unwrap();
        let raw = category_to_raw(&sub.cat);
        let mut doc = RawDocument { field: "F101".into(), ..Default::default() };
        doc.categories.insert("sub".into(), raw);
        let text = emit_document(&doc);
        let ws = resolve(f, &parse_document(&text).unwrap()).unwrap();
        assert_eq!(ws.categories["sub"].n_objects(), 4);
        assert!(ws.categories["sub"].is_poset());
    }

    #[test]
    fn bad_scalar_reports_location() {
        let text = r#"{
            "field": "F101",
            "categories": {"pt": {"objects": ["x"], "morphisms": [{"id": "i", "dom": "x", "cod": "x"}], "identities": {"x": "i"}}},
            "diagrams": {"A": {"base": "pt", "algebras": {"x": {"dim": 1, "unit": ["oops"], "products": [[["1"]]]}}, "maps": {}}}
        }"#;
        let raw = parse_document(text).unwrap();
        let err = match resolve(f101(), &raw) {
            Err(e) => e,
            Ok(_) => panic!("expected a scalar parse error"),
        };
        assert!(err.to_string().contains("oops"));
    }
}
