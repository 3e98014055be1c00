//! Command-line pipelines over workspace documents: validation,
//! subdivision, the `!` construction, Ext and Hochschild dimensions, and
//! the three comparison suites. Exit status is 0 exactly when every
//! verdict in the report passes.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use diagcoh::bang::{bang_algebra, bang_module, gcct_pipeline};
use diagcoh::corpus;
use diagcoh::diagram::{pullback_diagram, pullback_module, DiagModule, Diagram};
use diagcoh::doc::{
    self, algebra_to_raw, category_to_raw, corpus_to_document, emit_document, parse_document,
    FieldSpec, RawDocument, Workspace,
};
use diagcoh::field::{Fp, Rat};
use diagcoh::homalg::{
    diagram_cohomology, ext_diagram, hochschild_algebra, ExtOptions, ResolutionKind,
};
use diagcoh::report::Report;
use diagcoh::subdivision::{subdivide, subdivide_capped, Subdivision};
use diagcoh::{Field, Mat};

#[derive(Parser)]
#[command(name = "diagcoh", about = "Exact cohomology of diagrams of algebras", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Workspace document (JSON).
    document: PathBuf,
    /// Override the document's field (e.g. F101, F7, Q).
    #[arg(long)]
    field: Option<String>,
    /// Write the JSON report (or emitted document) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Size budget for cochain spaces and resolution levels.
    #[arg(long)]
    budget: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate every entity in a document.
    Validate(Common),
    /// Subdivide a category, optionally repeatedly or dimension-capped.
    Subdivide {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        category: String,
        #[arg(long, default_value_t = 1)]
        times: usize,
        /// Dimension cap for non-delta inputs.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Build the ! algebra (and bimodule) of a diagram over a poset.
    Bang {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        bimodule: Option<String>,
    },
    /// Relative Ext dimensions of a pair of modules.
    Ext {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        module: String,
        #[arg(long = "module2")]
        module2: String,
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        /// Resolution backing the computation: natural or bar.
        #[arg(long, default_value = "natural")]
        resolution: String,
    },
    /// Hochschild cohomology of a single algebra (a one-object diagram).
    Hochschild {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        bimodule: String,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Diagram cohomology with coefficients in a bimodule.
    Diagcoh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        diagram: String,
        #[arg(long)]
        bimodule: String,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Run one of the comparison suites over the document's instances.
    Compare {
        /// invariance | scct | gcct
        which: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        max_degree: Option<usize>,
        /// For gcct: force the literal double subdivision.
        #[arg(long, default_value_t = false)]
        double: bool,
    },
    /// Emit the canonical acceptance corpus as a document.
    GenCorpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of seeded random instances in addition to the named ones.
        #[arg(long, default_value_t = 12)]
        random: usize,
        #[arg(long, default_value = "F101")]
        field: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// DOT rendering of a category's underlying graph.
    NerveDot {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        category: String,
    },
}

/// Resolve the document over the concrete field and run the body once,
/// monomorphized per field.
macro_rules! with_field {
    ($spec:expr, $raw:expr, |$ws:ident| $body:block) => {
        match $spec {
            FieldSpec::Fp(p) => {
                let resolved = doc::resolve(Fp::new(p), $raw)?;
                let $ws: &Workspace<Fp> = &resolved;
                $body
            }
            FieldSpec::Q => {
                let resolved = doc::resolve(Rat, $raw)?;
                let $ws: &Workspace<Rat> = &resolved;
                $body
            }
        }
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load(common: &Common) -> Result<(RawDocument, FieldSpec)> {
    let text = std::fs::read_to_string(&common.document)
        .with_context(|| format!("reading {}", common.document.display()))?;
    let raw = parse_document(&text)?;
    let spec = match &common.field {
        Some(s) => FieldSpec::parse(s)?,
        None => FieldSpec::parse(&raw.field)?,
    };
    Ok((raw, spec))
}

fn write_out(common: &Common, content: &str) -> Result<()> {
    match &common.out {
        Some(p) => std::fs::write(p, content).with_context(|| format!("writing {}", p.display()))?,
        None => {}
    }
    Ok(())
}

fn emit_report(common: &Common, mut report: Report) -> Result<bool> {
    report.finish();
    print!("{}", report.human());
    write_out(common, &report.to_json())?;
    Ok(report.passed())
}

fn ext_options(common: &Common, kind: ResolutionKind) -> ExtOptions {
    ExtOptions {
        kind,
        budget: common.budget.unwrap_or_else(diagcoh::homalg::default_budget),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::GenCorpus { seed, random, field, out } => {
            let spec = FieldSpec::parse(&field)?;
            let text = match spec {
                FieldSpec::Fp(p) => {
                    let f = Fp::new(p);
                    let instances = corpus::acceptance_corpus(f, seed, random);
                    emit_document(&corpus_to_document(f, &spec.display(), &instances))
                }
                FieldSpec::Q => {
                    let f = Rat;
                    let instances = corpus::acceptance_corpus(f, seed, random);
                    emit_document(&corpus_to_document(f, &spec.display(), &instances))
                }
            };
            match out {
                Some(p) => std::fs::write(&p, &text)
                    .with_context(|| format!("writing {}", p.display()))?,
                None => println!("{text}"),
            }
            Ok(true)
        }
        Command::Validate(common) => {
            let (raw, spec) = load(&common)?;
            with_field!(spec, &raw, |ws| {
                let mut report = Report::new("validate", &spec.display())
                    .input(&common.document.display().to_string());
                report.count("categories", ws.categories.len());
                report.count("functors", ws.functors.len());
                report.count("diagrams", ws.diagrams.len());
                report.count("modules", ws.modules.len());
                report.count("bimodules", ws.bimodules.len());
                report.count("maps", ws.maps.len());
                report.count("complexes", ws.complexes.len());
                report.verdict("all entities valid", true);
                emit_report(&common, report)
            })
        }
        Command::Subdivide { common, category, times, cap } => {
            let (raw, spec) = load(&common)?;
            with_field!(spec, &raw, |ws| {
                let mut cat = ws
                    .categories
                    .get(&category)
                    .ok_or_else(|| anyhow!("unknown category {category:?}"))?
                    .clone();
                let mut report = Report::new("subdivide", &spec.display())
                    .input(&common.document.display().to_string());
                let mut last: Option<Subdivision> = None;
                for round in 1..=times {
                    let sub = match cap {
                        Some(p) => subdivide_capped(&cat, p),
                        None => subdivide(&cat)?,
                    };
                    report.count(&format!("round {round} objects"), sub.cat.n_objects());
                    report.count(&format!("round {round} morphisms"), sub.cat.n_morphisms());
                    report.verdict(&format!("round {round} is a delta"), sub.cat.is_delta());
                    if round >= 2 {
                        report.verdict(&format!("round {round} is a poset"), sub.cat.is_poset());
                    }
                    cat = sub.cat.clone();
                    last = Some(sub);
                }
                if let Some(sub) = &last {
                    let mut outdoc = RawDocument { field: spec.display(), ..Default::default() };
                    outdoc
                        .categories
                        .insert(format!("{category}'"), category_to_raw(&sub.cat));
                    let text = emit_document(&outdoc);
                    report.digest_witness("subdivided category", text.as_bytes());
                    report.finish();
                    print!("{}", report.human());
                    write_out(&common, &text)?;
                    return Ok(report.passed());
                }
                emit_report(&common, report)
            })
        }
        Command::Bang { common, diagram, bimodule } => {
            let (raw, spec) = load(&common)?;
            with_field!(spec, &raw, |ws| {
                let d = ws
                    .diagrams
                    .get(&diagram)
                    .ok_or_else(|| anyhow!("unknown diagram {diagram:?}"))?;
                let bang = bang_algebra(d)?;
                let mut report = Report::new("bang", &spec.display())
                    .input(&common.document.display().to_string());
                report.count("dim A!", bang.algebra.dim);
                report.verdict("A! validates", true);
                // Emit A! as a one-object diagram so it re-enters the format.
                let mut outdoc = RawDocument { field: spec.display(), ..Default::default() };
                let pt = diagcoh::fincat::FinCat::terminal();
                outdoc.categories.insert("pt".into(), category_to_raw(&pt));
                let raw_alg = algebra_to_raw(ws.field, &bang.algebra);
                outdoc.diagrams.insert(
                    format!("{diagram}!"),
                    doc::RawDiagram {
                        base: "pt".into(),
                        algebras: [("*".to_string(), raw_alg)].into_iter().collect(),
                        maps: Default::default(),
                    },
                );
                if let Some(bname) = &bimodule {
                    let bm = ws
                        .bimodules
                        .get(bname)
                        .ok_or_else(|| anyhow!("unknown bimodule {bname:?}"))?;
                    let bng = bang_module(&bang, bm)?;
                    report.count("dim M!", bng.dim);
                    report.verdict("M! validates", true);
                    // As a bimodule over the one-object diagram.
                    let pt_arc = Arc::new(pt.clone());
                    let bang_diag = Arc::new(Diagram::constant(pt_arc, bang.algebra.clone()));
                    let raw_bim = doc::RawBimodule {
                        diagram: format!("{diagram}!"),
                        spaces: [(
                            "*".to_string(),
                            doc::RawBimoduleSpace {
                                dim: bng.dim,
                                left: bng.left.iter().map(|m| mat_raw(ws.field, m)).collect(),
                                right: bng.right.iter().map(|m| mat_raw(ws.field, m)).collect(),
                            },
                        )]
                        .into_iter()
                        .collect(),
                        maps: Default::default(),
                    };
                    let _ = bang_diag;
                    outdoc.bimodules.insert(format!("{bname}!"), raw_bim);
                }
                let text = emit_document(&outdoc);
                report.digest_witness("bang document", text.as_bytes());
                report.finish();
                print!("{}", report.human());
                write_out(&common, &text)?;
                Ok(report.passed())
            })
        }
        Command::Ext { common, diagram, module, module2, max_degree, resolution } => {
            let (raw, spec) = load(&common)?;
            let kind = match resolution.as_str() {
                "natural" => ResolutionKind::Natural,
                "bar" => ResolutionKind::Bar,
                other => bail!("unknown resolution kind {other:?}"),
            };
            with_field!(spec, &raw, |ws| {
                let _ = ws
                    .diagrams
                    .get(&diagram)
                    .ok_or_else(|| anyhow!("unknown diagram {diagram:?}"))?;
                let m = ws
                    .modules
                    .get(&module)
                    .ok_or_else(|| anyhow!("unknown module {module:?}"))?;
                let n = ws
                    .modules
                    .get(&module2)
                    .ok_or_else(|| anyhow!("unknown module {module2:?}"))?;
                let dims = ext_diagram(m, n, max_degree, &ext_options(&common, kind))?;
                let mut report = Report::new("ext", &spec.display())
                    .input(&common.document.display().to_string());
                report.dims(&format!("Ext({module},{module2})"), dims);
                report.verdict("computed", true);
                emit_report(&common, report)
            })
        }
        Command::Hochschild { common, diagram, bimodule, max_degree } => {
            let (raw, spec) = load(&common)?;
            with_field!(spec, &raw, |ws| {
                let d = ws
                    .diagrams
                    .get(&diagram)
                    .ok_or_else(|| anyhow!("unknown diagram {diagram:?}"))?;
                if d.base.n_objects() != 1 {
                    bail!("hochschild expects a one-object diagram (a single algebra); use `bang` first");
                }
                let bm = ws
                    .bimodules
                    .get(&bimodule)
                    .ok_or_else(|| anyhow!("unknown bimodule {bimodule:?}"))?;
                let (left, right) = split_actions(d, bm, 0);
                let budget = common.budget.unwrap_or_else(diagcoh::homalg::default_budget);
                let dims = hochschild_algebra(&d.algebras[0], &left, &right, max_degree, budget)?;
                let mut report = Report::new("hochschild", &spec.display())
                    .input(&common.document.display().to_string());
                report.dims(&format!("H({diagram},{bimodule})"), dims);
                report.verdict("computed", true);
                emit_report(&common, report)
            })
        }
        Command::Diagcoh { common, diagram, bimodule, max_degree } => {
            let (raw, spec) = load(&common)?;
            with_field!(spec, &raw, |ws| {
                let d = ws
                    .diagrams
                    .get(&diagram)
                    .ok_or_else(|| anyhow!("unknown diagram {diagram:?}"))?;
                let env = ws.envs.get(&diagram).expect("resolved with diagram");
                let bm = ws
                    .bimodules
                    .get(&bimodule)
                    .ok_or_else(|| anyhow!("unknown bimodule {bimodule:?}"))?;
                let dims = diagram_cohomology(
                    d,
                    env,
                    bm,
                    max_degree,
                    &ext_options(&common, ResolutionKind::Natural),
                )?;
                let mut report = Report::new("diagcoh", &spec.display())
                    .input(&common.document.display().to_string());
                report.dims(&format!("H({diagram},{bimodule})"), dims);
                report.verdict("computed", true);
                emit_report(&common, report)
            })
        }
        Command::Compare { common, which, max_degree, double } => {
            let (raw, spec) = load(&common)?;
            with_field!(spec, &raw, |ws| {
                match which.as_str() {
                    "invariance" => compare_invariance(&common, &spec, ws, max_degree.unwrap_or(3)),
                    "scct" => compare_scct(&common, &spec, ws, max_degree.unwrap_or(2)),
                    "gcct" => compare_gcct(&common, &spec, ws, max_degree.unwrap_or(2), double),
                    other => bail!("unknown comparison {other:?} (expected invariance|scct|gcct)"),
                }
            })
        }
        Command::NerveDot { common, category } => {
            let (raw, spec) = load(&common)?;
            with_field!(spec, &raw, |ws| {
                let cat = ws
                    .categories
                    .get(&category)
                    .ok_or_else(|| anyhow!("unknown category {category:?}"))?;
                let dot = cat.to_dot(&category);
                match &common.out {
                    Some(p) => std::fs::write(p, &dot)
                        .with_context(|| format!("writing {}", p.display()))?,
                    None => print!("{dot}"),
                }
                Ok(true)
            })
        }
    }
}

fn split_actions<F: Field>(
    a: &Arc<Diagram<F>>,
    m: &Arc<DiagModule<F>>,
    o: usize,
) -> (Vec<Mat<F>>, Vec<Mat<F>>) {
    let f = a.field();
    let adim = a.algebras[o].dim;
    let dim = m.modules[o].dim;
    let mut left = Vec::with_capacity(adim);
    let mut right = Vec::with_capacity(adim);
    for s in 0..adim {
        let mut l = Mat::zeros(f, dim, dim);
        let mut r = Mat::zeros(f, dim, dim);
        for (t, c) in a.algebras[o].unit.iter().enumerate() {
            if !f.is_zero(c) {
                l = l.add(&m.modules[o].action[s * adim + t].scale(c));
                r = r.add(&m.modules[o].action[t * adim + s].scale(c));
            }
        }
        left.push(l);
        right.push(r);
    }
    (left, right)
}

fn mat_raw<F: Field>(f: F, m: &Mat<F>) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|r| (0..m.cols).map(|c| f.format(m.at(r, c))).collect())
        .collect()
}

fn compare_invariance<F: Field>(
    common: &Common,
    spec: &FieldSpec,
    ws: &Workspace<F>,
    max_degree: usize,
) -> Result<bool> {
    let mut report = Report::new("compare invariance", &spec.display())
        .input(&common.document.display().to_string());
    let opts = ext_options(common, ResolutionKind::Natural);
    let mut ran = 0usize;
    for inst in &ws.instances {
        let (Some(mn), Some(nn)) = (&inst.module_m, &inst.module_n) else { continue };
        let m = &ws.modules[mn];
        let n = &ws.modules[nn];
        let cat = &ws.categories[&inst.category];
        let sub = subdivide(cat)?;
        let d = sub.d_functor();
        let a = &ws.diagrams[&inst.diagram];
        let ap = Arc::new(pullback_diagram(&d, a));
        let mp = Arc::new(pullback_module(&d, &ap, m));
        let np = Arc::new(pullback_module(&d, &ap, n));
        let both = ext_diagram(m, n, max_degree, &opts)
            .and_then(|lhs| ext_diagram(&mp, &np, max_degree, &opts).map(|rhs| (lhs, rhs)));
        let (lhs, rhs) = match both {
            Ok(pair) => pair,
            Err(diagcoh::Error::BudgetExceeded { required, .. }) => {
                report.count(&format!("{} skipped (needs budget {required})", inst.name), required);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        report.dims(&format!("{} Ext", inst.name), lhs.clone());
        report.dims(&format!("{} Ext'", inst.name), rhs.clone());
        report.verdict(&format!("{} invariance", inst.name), lhs == rhs);
        ran += 1;
    }
    report.count("instances", ran);
    if ran == 0 {
        report.verdict("at least one instance", false);
    }
    emit_report(common, report)
}

fn compare_scct<F: Field>(
    common: &Common,
    spec: &FieldSpec,
    ws: &Workspace<F>,
    max_degree: usize,
) -> Result<bool> {
    let mut report = Report::new("compare scct", &spec.display())
        .input(&common.document.display().to_string());
    let opts = ext_options(common, ResolutionKind::Natural);
    let mut ran = 0usize;
    for inst in &ws.instances {
        let Some(bn) = &inst.bimodule else { continue };
        let cat = &ws.categories[&inst.category];
        if !cat.is_poset() {
            continue;
        }
        let a = &ws.diagrams[&inst.diagram];
        let env = &ws.envs[&inst.diagram];
        let bm = &ws.bimodules[bn];
        let bang = bang_algebra(a)?;
        let bmod = bang_module(&bang, bm)?;
        let both = diagram_cohomology(a, env, bm, max_degree, &opts).and_then(|lhs| {
            hochschild_algebra(&bang.algebra, &bmod.left, &bmod.right, max_degree, opts.budget)
                .map(|rhs| (lhs, rhs))
        });
        let (lhs, rhs) = match both {
            Ok(pair) => pair,
            Err(diagcoh::Error::BudgetExceeded { required, .. }) => {
                report.count(&format!("{} skipped (needs budget {required})", inst.name), required);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        report.dims(&format!("{} Ext_env", inst.name), lhs.clone());
        report.dims(&format!("{} H(A!,M!)", inst.name), rhs.clone());
        report.verdict(&format!("{} scct", inst.name), lhs == rhs);
        ran += 1;
    }
    report.count("poset instances", ran);
    if ran == 0 {
        report.verdict("at least one poset instance", false);
    }
    emit_report(common, report)
}

fn compare_gcct<F: Field>(
    common: &Common,
    spec: &FieldSpec,
    ws: &Workspace<F>,
    max_degree: usize,
    double: bool,
) -> Result<bool> {
    let mut report = Report::new("compare gcct", &spec.display())
        .input(&common.document.display().to_string());
    let opts = ext_options(common, ResolutionKind::Natural);
    let mut ran = 0usize;
    for inst in &ws.instances {
        let Some(bn) = &inst.bimodule else { continue };
        let a = &ws.diagrams[&inst.diagram];
        if !a.base.is_delta() {
            continue;
        }
        let bm = &ws.bimodules[bn];
        let gr = match gcct_pipeline(a, bm, max_degree, double, &opts) {
            Ok(gr) => gr,
            Err(diagcoh::Error::BudgetExceeded { required, .. }) => {
                report.count(&format!("{} skipped (needs budget {required})", inst.name), required);
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        report.dims(&format!("{} H(A,M)", inst.name), gr.lhs.clone());
        report.dims(&format!("{} H(A!,M!) after {} subdivision(s)", inst.name, gr.subdivisions_used), gr.rhs.clone());
        report.count(&format!("{} dim A!", inst.name), gr.bang_dim);
        report.verdict(&format!("{} gcct", inst.name), gr.agree());
        ran += 1;
    }
    report.count("instances", ran);
    if ran == 0 {
        report.verdict("at least one delta instance", false);
    }
    emit_report(common, report)
}
