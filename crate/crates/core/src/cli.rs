//! The `relbetti` command line.

use crate::collections::BuiltinKind;
use crate::error::{Error, Result};
use crate::fieldlin::Field;
use crate::homalg::{self, Resolution};
use crate::io;
use crate::pmod::{BettiDiagram, PersistenceModule};
use crate::poset::{self, Poset};
use crate::random;
use crate::relative::{self, CollectionFunctor, RelativeResolution, StatusReport};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use std::io::{Read, Write};
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_SIZE: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::HypothesisNotVerified(..)
        | Error::NotThin(..)
        | Error::NotSemilattice(..)
        | Error::MeetHypothesisFailed(..) => EXIT_HYPOTHESIS,
        Error::SizeBoundExceeded(_) => EXIT_SIZE,
        Error::Io(_) | Error::Json(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

#[derive(Debug, Parser)]
#[command(name = "relbetti", version, about = "Standard and relative Betti diagrams of poset modules")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Prime characteristic (overrides the input's "field"; default 2)
    #[arg(long, global = true)]
    pub field: Option<u64>,
    /// Bound on enumerated antichains and upsets
    #[arg(long, global = true)]
    pub max_antichains: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Resolution,
    Koszul,
}

#[derive(Debug, Args)]
pub struct ModuleInput {
    /// Module JSON file, or `-` for stdin
    #[arg(default_value = "-")]
    pub input: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check functoriality of a module, and of a collection if given
    Validate {
        #[command(flatten)]
        m: ModuleInput,
        #[arg(long)]
        collection: Option<String>,
    },
    /// Standard Betti diagram
    Betti {
        #[command(flatten)]
        m: ModuleInput,
        #[arg(long, value_enum, default_value_t = Method::Resolution)]
        method: Method,
        #[arg(long, default_value_t = 8)]
        dmax: usize,
    },
    /// Relative Betti diagram
    Rbetti {
        #[command(flatten)]
        m: ModuleInput,
        #[arg(long)]
        collection: String,
        #[arg(long, value_enum, default_value_t = Method::Koszul)]
        method: Method,
        #[arg(long, default_value_t = 8)]
        dmax: usize,
        /// Compute via Koszul complexes even when the degeneracy hypothesis fails
        #[arg(long)]
        force: bool,
    },
    /// Minimal free resolution
    Resolve {
        #[command(flatten)]
        m: ModuleInput,
        #[arg(long, default_value_t = 8)]
        dmax: usize,
    },
    /// Minimal relative resolution
    Rresolve {
        #[command(flatten)]
        m: ModuleInput,
        #[arg(long)]
        collection: String,
        #[arg(long, default_value_t = 8)]
        dmax: usize,
    },
    /// One Koszul complex; over J of the collection when one is given
    Koszul {
        #[command(flatten)]
        m: ModuleInput,
        #[arg(long)]
        at: String,
        #[arg(long)]
        collection: Option<String>,
    },
    /// Thinness, flatness and degeneracy of a collection
    Check {
        #[arg(long)]
        collection: String,
        /// Indexing poset (JSON, file, or grid:n,r); defaults to the module's poset
        #[arg(long)]
        poset: Option<String>,
        /// Module whose poset indexes the collection
        #[arg(long)]
        module: Option<String>,
        #[arg(long)]
        thin: bool,
        #[arg(long)]
        flat: bool,
        #[arg(long)]
        degeneracy: bool,
    },
    /// Example inputs
    Demo {
        #[command(subcommand)]
        which: Demo,
    },
}

#[derive(Debug, Subcommand)]
pub enum Demo {
    /// The module M0 on grid(5,2)
    M0,
    /// A random module
    Random {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Indexing poset (JSON, file, or grid:n,r); random when omitted
        #[arg(long)]
        poset: Option<String>,
    },
}

struct Ctx<'a> {
    field: Option<Field>,
    max: usize,
    format: Format,
    stdin: &'a mut dyn Read,
}

impl Ctx<'_> {
    fn module(&mut self, input: &str) -> Result<Arc<PersistenceModule>> {
        let v = if input == "-" {
            let mut s = String::new();
            self.stdin.read_to_string(&mut s)?;
            serde_json::from_str(&s)?
        } else {
            io::value_from_arg(input)?
        };
        Ok(Arc::new(io::module_from_json(&v, self.field)?))
    }

    fn collection(&self, s: &str, i: &Arc<Poset>, field: Field) -> Result<CollectionFunctor> {
        io::collection_from_arg(s, i, field, self.max)
    }
}

/// Parse arguments and run; returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match execute(&cli, stdin) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, stdin: &mut dyn Read) -> Result<String> {
    let field = cli.global.field.map(Field::new).transpose()?;
    let max = cli.global.max_antichains.unwrap_or_else(poset::default_max_antichains);
    let mut ctx = Ctx { field, max, format: cli.global.format, stdin };
    match &cli.command {
        Command::Validate { m, collection } => {
            let m = ctx.module(&m.input)?;
            let mut o = Map::new();
            o.insert("module".into(), json!("ok"));
            if let Some(c) = collection {
                let p = ctx.collection(c, m.poset_arc(), m.field())?;
                p.validate()?;
                o.insert("collection".into(), json!("ok"));
            }
            render_plain(&ctx, Value::Object(o))
        }
        Command::Betti { m, method, dmax } => {
            let m = ctx.module(&m.input)?;
            let b = match method {
                Method::Resolution => homalg::betti(&m, *dmax)?,
                Method::Koszul => homalg::betti_koszul_all(&m, *dmax)?,
            };
            render_betti(&ctx, &b, m.poset(), Map::new())
        }
        Command::Rbetti { m, collection, method, dmax, force } => {
            let m = ctx.module(&m.input)?;
            let p = ctx.collection(collection, m.poset_arc(), m.field())?;
            let mut extra = Map::new();
            extra.insert("collection".into(), json!(p.label()));
            let b = match method {
                Method::Resolution => {
                    extra.insert("status".into(), json!("verified"));
                    relative::relative_betti(&p, &m, *dmax)?
                }
                Method::Koszul => {
                    let (b, verified) = relative::relative_betti_koszul_all(&p, &m, *dmax, *force)?;
                    extra.insert("status".into(), json!(if verified { "verified" } else { "unverified" }));
                    b
                }
            };
            render_betti(&ctx, &b, p.j_poset(), extra)
        }
        Command::Resolve { m, dmax } => {
            let m = ctx.module(&m.input)?;
            let r = homalg::minimal_resolution(&m, *dmax)?;
            render_resolution(&ctx, resolution_terms(&r), &r.betti(), m.poset(), r.complete, Map::new())
        }
        Command::Rresolve { m, collection, dmax } => {
            let m = ctx.module(&m.input)?;
            let p = ctx.collection(collection, m.poset_arc(), m.field())?;
            let r = relative::relative_minimal_resolution(&p, &m, *dmax)?;
            let mut extra = Map::new();
            extra.insert("collection".into(), json!(p.label()));
            extra.insert("p_exact".into(), json!(r.p_exact));
            render_resolution(&ctx, relative_terms(&r), &r.betti(), p.j_poset(), r.complete, extra)
        }
        Command::Koszul { m, at, collection } => {
            let m = ctx.module(&m.input)?;
            let (module, label) = match collection {
                Some(c) => {
                    let p = ctx.collection(c, m.poset_arc(), m.field())?;
                    p.require_thin()?;
                    (relative::r_functor(&p, &m)?.module, Some(p.label().to_string()))
                }
                None => (m.clone(), None),
            };
            let q = module.poset();
            let a = q.index_of(at)?;
            let k = homalg::koszul(&module, a)?;
            let cells: Vec<Value> = k
                .cells
                .iter()
                .map(|lv| {
                    Value::Array(
                        lv.iter()
                            .map(|(s, meet)| {
                                let subset: Vec<&str> = s.iter().map(|&i| q.name(k.order[i])).collect();
                                json!({"subset": subset, "meet": q.name(*meet)})
                            })
                            .collect(),
                    )
                })
                .collect();
            let diffs: Vec<Value> = k.complex.boundaries.iter().map(io::matrix_to_json).collect();
            let mut o = Map::new();
            o.insert("at".into(), json!(at));
            o.insert("dims".into(), json!(k.complex.dims));
            o.insert("differentials".into(), Value::Array(diffs));
            o.insert("homology".into(), json!(k.homology()));
            o.insert("cells".into(), Value::Array(cells));
            if let Some(l) = label {
                o.insert("collection".into(), json!(l));
            }
            render_plain(&ctx, Value::Object(o))
        }
        Command::Check { collection, poset, module, thin, flat, degeneracy } => {
            let (i, fld) = match (poset, module) {
                (Some(p), _) => (Arc::new(io::poset_from_arg(p)?), ctx.field.unwrap_or_else(Field::gf2)),
                (None, Some(m)) => {
                    let m = ctx.module(m)?;
                    (m.poset_arc().clone(), m.field())
                }
                (None, None) => return Err(Error::Invalid("check needs --poset or --module".into())),
            };
            let p = ctx.collection(collection, &i, fld)?;
            let all = !(*thin || *flat || *degeneracy);
            let mut o = Map::new();
            o.insert("collection".into(), json!(p.label()));
            o.insert("size".into(), json!(p.j_poset().len()));
            if *thin || all {
                o.insert("thin".into(), status_json(&p, &p.thin_report()));
            }
            if *flat || all {
                o.insert("flat".into(), status_json(&p, &p.flat_report()));
            }
            if *degeneracy || all {
                let v = match p.degeneracy_report() {
                    Ok(r) => status_json(&p, &r),
                    Err(e) => json!({"holds": false, "error": e.to_string()}),
                };
                o.insert("degeneracy".into(), v);
            }
            render_plain(&ctx, Value::Object(o))
        }
        Command::Demo { which } => {
            let m = match which {
                Demo::M0 => {
                    let m = PersistenceModule::m0_demo();
                    match ctx.field {
                        Some(f) if f != m.field() => PersistenceModule::indicator(m.poset_arc().clone(), f, &m.support()),
                        _ => m,
                    }
                }
                Demo::Random { seed, poset } => {
                    let mut rng = random::rng(*seed);
                    let p = match poset {
                        Some(s) => io::poset_from_arg(s)?,
                        None => random::random_upper_semilattice(&mut rng, 4, 8),
                    };
                    let f = ctx.field.unwrap_or_else(Field::gf2);
                    random::random_module(&mut rng, &Arc::new(p), f, 3, 3)?
                }
            };
            Ok(io::to_canonical_string(&io::module_to_json(&m)))
        }
    }
}

fn status_json(p: &CollectionFunctor, r: &StatusReport) -> Value {
    let j = p.j_poset();
    match r.witness {
        Some((a, b)) => json!({"holds": r.holds, "witness": [j.name(a), j.name(b)]}),
        None => json!({"holds": r.holds}),
    }
}

fn render_plain(ctx: &Ctx, v: Value) -> Result<String> {
    match ctx.format {
        Format::Json => Ok(io::to_canonical_string(&v)),
        Format::Table => Ok(table_of(&v)),
        Format::Dot => Err(Error::Invalid("dot output is only available for Betti diagrams and resolutions".into())),
    }
}

fn table_of(v: &Value) -> String {
    let mut s = String::new();
    if let Value::Object(o) = v {
        for (k, x) in o {
            s.push_str(&format!("{k}\t{x}\n"));
        }
    }
    s
}

fn betti_table(b: &BettiDiagram, p: &Poset) -> String {
    let mut s = String::from("d\tat\tmult\n");
    for (d, a, m) in b.iter() {
        s.push_str(&format!("{d}\t{}\t{m}\n", p.name(a)));
    }
    s
}

fn render_betti(ctx: &Ctx, b: &BettiDiagram, p: &Poset, extra: Map<String, Value>) -> Result<String> {
    match ctx.format {
        Format::Json => {
            let mut v = io::betti_to_json(b, p);
            v.as_object_mut().expect("object").extend(extra);
            Ok(io::to_canonical_string(&v))
        }
        Format::Table => Ok(betti_table(b, p)),
        Format::Dot => Ok(dot_of(&terms_from_betti(b), p)),
    }
}

/// `terms[d]` lists `(element, multiplicity)` in element order.
type Terms = Vec<Vec<(usize, usize)>>;

fn terms_from_betti(b: &BettiDiagram) -> Terms {
    let len = b.max_degree().map_or(0, |d| d + 1);
    let mut t: Terms = vec![Vec::new(); len];
    for (d, a, m) in b.iter() {
        t[d].push((a, m));
    }
    t
}

fn grouped(elems: &[usize]) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = Vec::new();
    let mut sorted = elems.to_vec();
    sorted.sort_unstable();
    for a in sorted {
        match v.last_mut() {
            Some((b, m)) if *b == a => *m += 1,
            _ => v.push((a, 1)),
        }
    }
    v
}

fn resolution_terms(r: &Resolution) -> Terms {
    r.terms.iter().map(|t| grouped(t.generators())).collect()
}

fn relative_terms(r: &RelativeResolution) -> Terms {
    r.terms.iter().map(|t| grouped(&t.summands)).collect()
}

fn dot_of(terms: &Terms, p: &Poset) -> String {
    let mut s = String::from("digraph resolution {\n  rankdir=RL;\n  M [label=\"M\"];\n");
    for (d, t) in terms.iter().enumerate() {
        let label: Vec<String> =
            t.iter().map(|&(a, m)| if m == 1 { p.name(a).to_string() } else { format!("{}^{m}", p.name(a)) }).collect();
        s.push_str(&format!("  C{d} [shape=box, label=\"C{d}: {}\"];\n", label.join(" + ").replace('"', "\\\"")));
        if d == 0 {
            s.push_str("  C0 -> M;\n");
        } else {
            s.push_str(&format!("  C{d} -> C{};\n", d - 1));
        }
    }
    s.push_str("}\n");
    s
}

fn render_resolution(
    ctx: &Ctx,
    terms: Terms,
    b: &BettiDiagram,
    p: &Poset,
    complete: bool,
    extra: Map<String, Value>,
) -> Result<String> {
    match ctx.format {
        Format::Json => {
            let ts: Vec<Value> = terms
                .iter()
                .enumerate()
                .map(|(d, t)| {
                    let summands: Vec<Value> = t.iter().map(|&(a, m)| json!({"at": p.name(a), "mult": m})).collect();
                    json!({"d": d, "summands": summands})
                })
                .collect();
            let mut v = io::betti_to_json(b, p);
            let o = v.as_object_mut().expect("object");
            o.insert("terms".into(), Value::Array(ts));
            o.insert("complete".into(), json!(complete));
            o.insert("length".into(), json!(terms.iter().rposition(|t| !t.is_empty()).unwrap_or(0)));
            o.extend(extra);
            Ok(io::to_canonical_string(&v))
        }
        Format::Table => Ok(betti_table(b, p)),
        Format::Dot => Ok(dot_of(&terms, p)),
    }
}

/// Names of the builtin collections, for help text and tests.
pub fn builtin_names() -> Vec<&'static str> {
    BuiltinKind::ALL.iter().map(|k| k.name()).collect()
}
