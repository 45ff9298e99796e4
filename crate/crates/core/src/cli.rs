//! Command-line front end.
//!
//! Every command produces a [`Report`]. Exit codes: 0 ok, 1 invalid input
//! object, 2 usage, I/O or parse error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::action::{check_derived_action, semidirect_product, ActionSet};
use crate::algebra::{validate_algebra, Table, DEFAULT_BUDGET};
use crate::catalog::{self, Payload};
use crate::derivation::{enumerate_derivations, is_regular_in, kernel_image_predicate, whitehead_group, Derivation, Regularity, WhiteheadMonoid};
use crate::derived::{
    derived_action_general, derived_action_regular, derived_crossed_module, derived_iso, iterate_chain,
    transport_derivation,
};
use crate::error::Error;
use crate::groupoid::{delta, roundtrip_groupoid, roundtrip_xmod, theta, validate_groupoid};
use crate::homotopy::{check_natural_iso_of, equivalence_sweep, validate_xmod_homotopy};
use crate::report::ValidationReport;
use crate::text::{self, parse_index_list, Library};
use crate::xmod::{validate_crossed_module, CrossedModule};

#[derive(Debug, Parser)]
#[command(name = "xmodlab", version, about = "Finite crossed modules, internal groupoids and derivations")]
pub struct Cli {
    #[command(flatten)]
    pub opts: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Upper bound on candidate maps examined by enumerations.
    #[arg(long, global = true, env = "XMODLAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Also write the report to this path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Element ordering; only `fixed` exists.
    #[arg(long, global = true, value_parser = ["fixed"], default_value = "fixed")]
    pub seed_order: String,
    /// Extra files searched for named objects after the main file.
    #[arg(long = "lib", global = true)]
    pub libs: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct FileArgs {
    /// Input file.
    pub file: PathBuf,
    /// Check only the block with this name.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Debug, Args)]
pub struct XmodArgs {
    /// Crossed module name (file, `--lib` files, then catalog).
    #[arg(long)]
    pub xmod: String,
    /// Optional file with named blocks.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DerivationArgs {
    #[command(flatten)]
    pub base: XmodArgs,
    /// Derivation table as a list of A-indices, one per element of B.
    #[arg(long, conflicts_with = "index")]
    pub d: Option<String>,
    /// Position of the derivation in the lexicographic enumeration.
    #[arg(long)]
    pub index: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check algebra blocks against the group and operation axioms.
    ValidateAlgebra(FileArgs),
    /// Check action blocks against D1–D12 and the semidirect product.
    ValidateAction(FileArgs),
    /// Check crossed-module blocks against CM1–CM4.
    ValidateXmod(FileArgs),
    /// Check groupoid blocks.
    ValidateGroupoid(FileArgs),
    /// The internal groupoid of a crossed module.
    ToGroupoid {
        #[command(flatten)]
        x: XmodArgs,
        /// Write the groupoid in text format here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// The crossed module of an internal groupoid.
    FromGroupoid {
        /// Groupoid name (file, `--lib` files, then catalog).
        #[arg(long)]
        groupoid: String,
        /// Optional file with named blocks.
        file: Option<PathBuf>,
        /// Write the crossed module in text format here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Round trip through groupoids and back, with the comparison isomorphism.
    Roundtrip {
        /// Start from this crossed module.
        #[arg(long, required_unless_present = "groupoid", conflicts_with = "groupoid")]
        xmod: Option<String>,
        /// Start from this groupoid.
        #[arg(long)]
        groupoid: Option<String>,
        /// Optional file with named blocks.
        file: Option<PathBuf>,
    },
    /// Enumerate derivations with regularity and the kernel-image probe.
    Derivations(XmodArgs),
    /// The Whitehead group of regular derivations.
    Whitehead(XmodArgs),
    /// Check homotopy blocks, or sweep all tables between two morphisms.
    HomotopyCheck {
        /// Input file.
        file: PathBuf,
        /// Check only the homotopy block with this name.
        #[arg(long)]
        name: Option<String>,
        /// Check every table `d` between `--from` and `--to`.
        #[arg(long, requires_all = ["from", "to"])]
        sweep: bool,
        /// Source morphism of the sweep.
        #[arg(long)]
        from: Option<String>,
        /// Target morphism of the sweep.
        #[arg(long)]
        to: Option<String>,
    },
    /// Derived action, derived crossed module and transported derivation.
    Derive(DerivationArgs),
    /// The chain of derived crossed modules of a regular derivation.
    DeriveChain {
        #[command(flatten)]
        d: DerivationArgs,
        /// Stop after this many derived stages.
        #[arg(long, default_value_t = crate::derived::DEFAULT_MAX_STAGES)]
        max_stages: usize,
    },
    /// Built-in objects.
    Catalog {
        #[command(subcommand)]
        cmd: CatalogCommand,
    },
}

#[derive(Debug, Subcommand)]
pub enum CatalogCommand {
    /// List entry names and kinds.
    List,
    /// Show one entry; `--emit` writes it in text format.
    Show {
        name: String,
        /// Write the entry in text format here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Invalid,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Invalid => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub status: Status,
    pub findings: Value,
    pub timing_ms: u64,
    #[serde(skip)]
    pub summary: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let status = match self.status {
            Status::Ok => "ok",
            Status::Invalid => "invalid",
            Status::Error => "error",
        };
        let mut out = format!("{}: {status}\n", self.command);
        for line in &self.summary {
            out.push_str("  ");
            out.push_str(line);
            out.push('\n');
        }
        out
    }
}

struct Outcome {
    status: Status,
    findings: Value,
    summary: Vec<String>,
}

impl Outcome {
    fn new(valid: bool, findings: Value, summary: Vec<String>) -> Self {
        Outcome {
            status: if valid { Status::Ok } else { Status::Invalid },
            findings,
            summary,
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::ValidateAlgebra(_) => "validate-algebra",
        Command::ValidateAction(_) => "validate-action",
        Command::ValidateXmod(_) => "validate-xmod",
        Command::ValidateGroupoid(_) => "validate-groupoid",
        Command::ToGroupoid { .. } => "to-groupoid",
        Command::FromGroupoid { .. } => "from-groupoid",
        Command::Roundtrip { .. } => "roundtrip",
        Command::Derivations(_) => "derivations",
        Command::Whitehead(_) => "whitehead",
        Command::HomotopyCheck { .. } => "homotopy-check",
        Command::Derive(_) => "derive",
        Command::DeriveChain { .. } => "derive-chain",
        Command::Catalog {
            cmd: CatalogCommand::List,
        } => "catalog list",
        Command::Catalog {
            cmd: CatalogCommand::Show { .. },
        } => "catalog show",
    }
}

/// Failures outside the algebra layer.
#[derive(Debug)]
enum Failure {
    Io(PathBuf, std::io::Error),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Run<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Run<()> {
    std::fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "DimensionMismatch",
        Error::IndexOutOfRange { .. } => "IndexOutOfRange",
        Error::SignatureMismatch(_) => "SignatureMismatch",
        Error::MalformedSignature(_) => "MalformedSignature",
        Error::BudgetExceeded { .. } => "BudgetExceeded",
        Error::InvalidAlgebra { .. } => "InvalidAlgebra",
        Error::InvalidMorphism(_) => "InvalidMorphism",
        Error::InvalidAction(_) => "InvalidAction",
        Error::InvalidCrossedModule(_) => "InvalidCrossedModule",
        Error::InvalidXModMorphism(_) => "InvalidXModMorphism",
        Error::InvalidGroupoid(_) => "InvalidGroupoid",
        Error::InvalidFunctor(_) => "InvalidFunctor",
        Error::InvalidDerivation(_) => "InvalidDerivation",
        Error::InvalidHomotopy(_) => "InvalidHomotopy",
        Error::NotASection(_) => "NotASection",
        Error::NotKernel(_) => "NotKernel",
        Error::NotComposable(_) => "NotComposable",
        Error::EndpointMismatch(_) => "EndpointMismatch",
        Error::NotDeltaImage(_) => "NotDeltaImage",
        Error::BaseMismatch => "BaseMismatch",
        Error::NotRegular => "NotRegular",
        Error::RoundTripFailure(_) => "RoundTripFailure",
        Error::InternalInconsistency(_) => "InternalInconsistency",
        Error::UnknownName(_) => "UnknownName",
        Error::Parse { .. } => "ParseError",
    }
}

fn failure_outcome(f: &Failure) -> Outcome {
    match f {
        Failure::Io(path, e) => {
            let kind = if e.kind() == std::io::ErrorKind::NotFound {
                "FileNotFound"
            } else {
                "IoError"
            };
            let msg = format!("{}: {e}", path.display());
            Outcome {
                status: Status::Error,
                findings: json!({ "error": kind, "message": msg }),
                summary: vec![format!("{kind}: {msg}")],
            }
        }
        Failure::Lib(e) => {
            let status = if e.is_invalid_object() {
                Status::Invalid
            } else {
                Status::Error
            };
            let mut findings = json!({ "error": error_kind(e), "message": e.to_string() });
            if let Some(r) = e.report() {
                findings["violations"] = json!(r.violations);
            }
            if let Error::Parse { line, .. } = e {
                findings["line"] = json!(line);
            }
            Outcome {
                status,
                findings,
                summary: vec![format!("{}: {e}", error_kind(e))],
            }
        }
    }
}

/// What a run writes to the terminal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses arguments and runs the command.
pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Output {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Output {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let report = execute(&cli);
    let text = if cli.opts.json {
        report.to_json() + "\n"
    } else {
        report.to_text()
    };
    if let Some(path) = &cli.opts.out {
        if let Err(e) = std::fs::write(path, report.to_json() + "\n") {
            return Output {
                code: 2,
                stdout: text,
                stderr: format!("cannot write {}: {e}\n", path.display()),
            };
        }
    }
    Output {
        code: report.status.exit_code(),
        stdout: text,
        stderr: String::new(),
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Report {
    let start = Instant::now();
    let outcome = dispatch(cli).unwrap_or_else(|f| failure_outcome(&f));
    Report {
        schema: 1,
        command: command_name(&cli.command).to_string(),
        status: outcome.status,
        findings: outcome.findings,
        timing_ms: start.elapsed().as_millis() as u64,
        summary: outcome.summary,
    }
}

fn library(main: Option<&Path>, libs: &[PathBuf]) -> Run<(Library, Vec<text::Block>)> {
    let mut lib = Library::new();
    let mut own = Vec::new();
    if let Some(p) = main {
        let src = read(p)?;
        own = text::parse_blocks(&src)?;
        lib.add_text(&src)?;
    }
    for p in libs {
        lib.add_text(&read(p)?)?;
    }
    Ok((lib, own))
}

fn selected(blocks: &[text::Block], keyword: &str, name: &Option<String>) -> Run<Vec<String>> {
    let names: Vec<String> = blocks
        .iter()
        .filter(|b| b.keyword() == keyword)
        .map(|b| b.name.clone())
        .collect();
    match name {
        Some(n) if names.contains(n) => Ok(vec![n.clone()]),
        Some(n) => Err(Error::UnknownName(n.clone()).into()),
        None if names.is_empty() => Err(Error::parse(1, format!("no {keyword} block in file")).into()),
        None => Ok(names),
    }
}

fn rows(t: &Table) -> Value {
    json!(t.to_rows())
}

fn action_json(act: &ActionSet) -> Value {
    let ops = act.actor().signature().binary_ops();
    let star: serde_json::Map<String, Value> = ops
        .iter()
        .zip(act.star_tables())
        .map(|(op, t)| (op.clone(), rows(t)))
        .collect();
    json!({ "dot": rows(act.dot_table()), "star": star })
}

fn action_digest(act: &ActionSet) -> String {
    let mut h = Sha256::new();
    let mut feed = |t: &Table| {
        h.update(format!("{}x{}:", t.rows(), t.cols()));
        for v in t.data() {
            h.update(format!("{v},"));
        }
        h.update(";");
    };
    feed(act.dot_table());
    for t in act.star_tables() {
        feed(t);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn report_json(r: &ValidationReport) -> Value {
    json!({ "valid": r.is_valid(), "violations": r.violations, "notes": r.notes })
}

fn summarize(name: &str, r: &ValidationReport) -> String {
    if r.is_valid() {
        format!("{name}: valid")
    } else {
        let v: Vec<String> = r.violations.iter().map(ToString::to_string).collect();
        format!("{name}: {}", v.join("; "))
    }
}

fn dispatch(cli: &Cli) -> Run<Outcome> {
    let opts = &cli.opts;
    let budget = opts.budget;
    match &cli.command {
        Command::ValidateAlgebra(a) => {
            let (lib, own) = library(Some(&a.file), &opts.libs)?;
            let mut items = Vec::new();
            let mut summary = Vec::new();
            let mut all = true;
            for name in selected(&own, "algebra", &a.name)? {
                let p = lib.algebra_tables(&name)?;
                let r = validate_algebra(&p.tables)?;
                all &= r.is_valid();
                summary.push(summarize(&name, &r));
                let mut item = json!({ "name": name, "order": p.tables.order, "report": report_json(&r) });
                if p.zero_in_file != 0 {
                    item["renumbered_zero_from"] = json!(p.zero_in_file);
                    summary.push(format!("{name}: identity {} renumbered to 0", p.zero_in_file));
                }
                items.push(item);
            }
            Ok(Outcome::new(all, json!({ "algebras": items }), summary))
        }
        Command::ValidateAction(a) => {
            let (lib, own) = library(Some(&a.file), &opts.libs)?;
            let mut items = Vec::new();
            let mut summary = Vec::new();
            let mut all = true;
            for name in selected(&own, "action", &a.name)? {
                let act = lib.action(&name)?;
                let r = check_derived_action(&act)?;
                let (_, semi) = semidirect_product(&act)?;
                if semi.is_valid() != r.is_valid() {
                    return Err(Error::InternalInconsistency(format!(
                        "`{name}`: D1–D12 and the semidirect product disagree"
                    ))
                    .into());
                }
                all &= r.is_valid();
                summary.push(summarize(&name, &r));
                items.push(json!({
                    "name": name,
                    "report": report_json(&r),
                    "semidirect_product_valid": semi.is_valid(),
                }));
            }
            Ok(Outcome::new(all, json!({ "actions": items }), summary))
        }
        Command::ValidateXmod(a) => {
            let (lib, own) = library(Some(&a.file), &opts.libs)?;
            let mut items = Vec::new();
            let mut summary = Vec::new();
            let mut all = true;
            for name in selected(&own, "xmod", &a.name)? {
                let (alpha, act) = lib.xmod_parts(&name)?;
                let r = validate_crossed_module(&alpha, &act)?;
                all &= r.is_valid();
                summary.push(summarize(&name, &r));
                items.push(json!({ "name": name, "report": report_json(&r) }));
            }
            Ok(Outcome::new(all, json!({ "xmods": items }), summary))
        }
        Command::ValidateGroupoid(a) => {
            let (lib, own) = library(Some(&a.file), &opts.libs)?;
            let mut items = Vec::new();
            let mut summary = Vec::new();
            let mut all = true;
            for name in selected(&own, "groupoid", &a.name)? {
                let (c1, c0, d0, d1, eps) = lib.groupoid_parts(&name)?;
                let r = validate_groupoid(&c1, &c0, &d0, &d1, &eps)?;
                all &= r.is_valid();
                summary.push(summarize(&name, &r));
                items.push(json!({ "name": name, "report": report_json(&r) }));
            }
            Ok(Outcome::new(all, json!({ "groupoids": items }), summary))
        }
        Command::ToGroupoid { x, emit } => {
            let (lib, _) = library(x.file.as_deref(), &opts.libs)?;
            let xm = lib.xmod(&x.xmod)?;
            let g = delta(&xm)?;
            if let Some(p) = emit {
                write(p, &text::write_groupoid(&g))?;
            }
            let summary = vec![format!(
                "{}: |C1| = {}, |C0| = {}",
                g.name(),
                g.c1().order(),
                g.c0().order()
            )];
            Ok(Outcome::new(
                true,
                json!({
                    "xmod": x.xmod,
                    "groupoid": g.name(),
                    "c1_order": g.c1().order(),
                    "c0_order": g.c0().order(),
                    "d0": g.d0().map(),
                    "d1": g.d1().map(),
                    "eps": g.eps().map(),
                }),
                summary,
            ))
        }
        Command::FromGroupoid { groupoid, file, emit } => {
            let (lib, _) = library(file.as_deref(), &opts.libs)?;
            let g = lib.groupoid(groupoid)?;
            let x = theta(&g)?;
            if let Some(p) = emit {
                write(p, &text::write_xmod(&x))?;
            }
            let summary = vec![format!("{}: |A| = {}, |B| = {}", x.name(), x.a().order(), x.b().order())];
            Ok(Outcome::new(
                true,
                json!({
                    "groupoid": groupoid,
                    "xmod": x.name(),
                    "a_order": x.a().order(),
                    "b_order": x.b().order(),
                    "alpha": x.alpha().map(),
                    "action": action_json(x.action()),
                }),
                summary,
            ))
        }
        Command::Roundtrip { xmod, groupoid, file } => {
            let (lib, _) = library(file.as_deref(), &opts.libs)?;
            if let Some(name) = xmod {
                let x = lib.xmod(name)?;
                let m = roundtrip_xmod(&x)?;
                Ok(Outcome::new(
                    true,
                    json!({ "xmod": name, "direction": "theta(delta(x)) -> x", "f1": m.f1().map(), "f0": m.f0().map() }),
                    vec![format!("θδ({name}) ≅ {name}: f1 = {:?}, f0 = {:?}", m.f1().map(), m.f0().map())],
                ))
            } else {
                let name = groupoid.as_deref().expect("clap enforces one of the two");
                let g = lib.groupoid(name)?;
                let f = roundtrip_groupoid(&g)?;
                Ok(Outcome::new(
                    true,
                    json!({ "groupoid": name, "direction": "delta(theta(g)) -> g", "f1": f.f1().map(), "f0": f.f0().map() }),
                    vec![format!("δθ({name}) ≅ {name}: f1 = {:?}, f0 = {:?}", f.f1().map(), f.f0().map())],
                ))
            }
        }
        Command::Derivations(x) => {
            let (lib, _) = library(x.file.as_deref(), &opts.libs)?;
            let base = lib.xmod(&x.xmod)?;
            derivations(&base, budget)
        }
        Command::Whitehead(x) => {
            let (lib, _) = library(x.file.as_deref(), &opts.libs)?;
            let base = lib.xmod(&x.xmod)?;
            let w = whitehead_group(&base, budget)?;
            let iso = if w.group.order() <= 8 {
                catalog::identify_group(&w.group, budget)?
            } else {
                None
            };
            let summary = vec![
                format!("{} derivations", w.monoid_order),
                format!("Whitehead group of order {}", w.elements.len()),
                format!("isomorphism type: {}", iso.unwrap_or("unidentified")),
            ];
            Ok(Outcome::new(
                true,
                json!({
                    "xmod": x.xmod,
                    "derivation_count": w.monoid_order,
                    "group_order": w.elements.len(),
                    "elements": w.elements.iter().map(Derivation::table).collect::<Vec<_>>(),
                    "cayley_table": rows(&w.table),
                    "isomorphism_type": iso,
                }),
                summary,
            ))
        }
        Command::HomotopyCheck {
            file,
            name,
            sweep,
            from,
            to,
        } => {
            let (lib, own) = library(Some(file), &opts.libs)?;
            if *sweep {
                let f = lib.xmorph(from.as_deref().expect("required"))?;
                let g = lib.xmorph(to.as_deref().expect("required"))?;
                let (count, valid) = equivalence_sweep(&f, &g, budget)?;
                return Ok(Outcome::new(
                    true,
                    json!({ "checked": count, "valid": valid, "agreement": true }),
                    vec![format!("{count} tables checked, {} homotopies, conditions agree", valid.len())],
                ));
            }
            let mut items = Vec::new();
            let mut summary = Vec::new();
            let mut all = true;
            for n in selected(&own, "homotopy", name)? {
                let (f, g, d) = lib.homotopy_parts(&n)?;
                let r = validate_xmod_homotopy(&f, &g, &d)?;
                let nat = check_natural_iso_of(&f, &g, &d)?;
                if r.is_valid() != nat.is_valid() {
                    return Err(Error::InternalInconsistency(format!(
                        "`{n}`: H-i…H-v and the natural-isomorphism conditions disagree"
                    ))
                    .into());
                }
                all &= r.is_valid();
                summary.push(summarize(&n, &r));
                items.push(json!({ "name": n, "report": report_json(&r), "natural_iso_valid": nat.is_valid() }));
            }
            Ok(Outcome::new(all, json!({ "homotopies": items }), summary))
        }
        Command::Derive(a) => {
            let (_, d) = pick_derivation(a, opts)?;
            derive(&d)
        }
        Command::DeriveChain { d: a, max_stages } => {
            let (_, d) = pick_derivation(a, opts)?;
            let chain = iterate_chain(&d, *max_stages)?;
            let stages: Vec<Value> = chain
                .stages
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    json!({
                        "stage": k,
                        "alpha": s.xmod.alpha().map(),
                        "action_digest": action_digest(s.xmod.action()),
                        "iso_from_previous": { "f1": s.link.f1().map(), "f0": s.link.f0().map() },
                        "derivation": s.derivation.table(),
                    })
                })
                .collect();
            let mut summary: Vec<String> = chain
                .stages
                .iter()
                .enumerate()
                .map(|(k, s)| format!("stage {k}: alpha = {:?}", s.xmod.alpha().map()))
                .collect();
            summary.push(match chain.period {
                Some(p) => format!("period {p}, ord(σ_d) = {}", chain.sigma_order),
                None => format!("no repetition within {max_stages} stages, ord(σ_d) = {}", chain.sigma_order),
            });
            Ok(Outcome::new(
                true,
                json!({
                    "derivation": d.table(),
                    "period": chain.period,
                    "sigma_order": chain.sigma_order,
                    "stages": stages,
                }),
                summary,
            ))
        }
        Command::Catalog { cmd } => match cmd {
            CatalogCommand::List => {
                let entries: Vec<Value> = catalog::names()
                    .into_iter()
                    .map(|(n, k)| json!({ "name": n, "kind": k }))
                    .collect();
                let summary = catalog::names().into_iter().map(|(n, k)| format!("{k:9} {n}")).collect();
                Ok(Outcome::new(true, json!({ "entries": entries }), summary))
            }
            CatalogCommand::Show { name, emit } => {
                let entry = catalog::load(name)?;
                let (text, details) = match &entry.payload {
                    Payload::Algebra(a) => (
                        text::write_algebra(a),
                        json!({ "order": a.order(), "add": rows(&a.tables().add), "binary_ops": a.signature().binary_ops() }),
                    ),
                    Payload::Action(a) => (text::write_action(a), action_json(a)),
                    Payload::Xmod(x) => (
                        text::write_xmod(x),
                        json!({ "a_order": x.a().order(), "b_order": x.b().order(), "alpha": x.alpha().map(), "action": action_json(x.action()) }),
                    ),
                    Payload::Groupoid(g) => (
                        text::write_groupoid(g),
                        json!({ "c1_order": g.c1().order(), "c0_order": g.c0().order(), "d0": g.d0().map(), "d1": g.d1().map(), "eps": g.eps().map() }),
                    ),
                };
                if let Some(p) = emit {
                    write(p, &text)?;
                }
                let summary = text.lines().map(str::to_owned).collect();
                Ok(Outcome::new(
                    true,
                    json!({ "name": name, "kind": entry.kind, "details": details, "text": text }),
                    summary,
                ))
            }
        },
    }
}

fn pick_derivation(a: &DerivationArgs, opts: &GlobalOpts) -> Run<(Arc<CrossedModule>, Derivation)> {
    let (lib, _) = library(a.base.file.as_deref(), &opts.libs)?;
    let base = lib.xmod(&a.base.xmod)?;
    let d = match (&a.d, a.index) {
        (Some(s), _) => Derivation::new(base.clone(), parse_index_list(s)?)?,
        (None, Some(i)) => {
            let all = enumerate_derivations(&base, opts.budget)?;
            let n = all.len();
            all.into_iter()
                .nth(i)
                .ok_or_else(|| Error::UnknownName(format!("derivation #{i} (there are {n})")))?
        }
        (None, None) => Derivation::zero(&base),
    };
    Ok((base, d))
}

fn derivations(base: &Arc<CrossedModule>, budget: u64) -> Run<Outcome> {
    let monoid = WhiteheadMonoid::new(base, budget)?;
    let mut items = Vec::new();
    let mut probes = Vec::new();
    let mut summary = Vec::new();
    for d in &monoid.elements {
        let reg = is_regular_in(d, &monoid)?;
        let in_kernel = kernel_image_predicate(d);
        let flagged = in_kernel && !d.is_zero();
        if flagged {
            probes.push(d.table().to_vec());
        }
        let mut item = json!({
            "d": d.table(),
            "theta": d.theta(),
            "sigma": d.sigma(),
            "regular": reg.is_regular(),
            "image_in_ker_alpha": in_kernel,
        });
        match &reg {
            Regularity::Regular { inverse } => item["inverse"] = json!(inverse),
            Regularity::Singular { witness } => item["theta_collision"] = json!([witness.0, witness.1]),
            Regularity::Unknown => {}
        }
        summary.push(format!(
            "d = {:?}: {}{}",
            d.table(),
            if reg.is_regular() { "regular" } else { "singular" },
            if flagged { ", nonzero with image in ker α" } else { "" }
        ));
        items.push(item);
    }
    if !probes.is_empty() {
        summary.push(format!(
            "flagged: {} nonzero derivation(s) with image in ker α",
            probes.len()
        ));
    }
    Ok(Outcome::new(
        true,
        json!({
            "xmod": base.name(),
            "count": monoid.len(),
            "derivations": items,
            "kernel_image_probe": {
                "flagged": !probes.is_empty(),
                "counterexamples": probes,
            },
        }),
        summary,
    ))
}

fn derive(d: &Derivation) -> Run<Outcome> {
    let general = derived_action_general(d)?;
    let mut findings = json!({
        "derivation": d.table(),
        "theta": d.theta(),
        "sigma": d.sigma(),
        "general_action": action_json(&general),
    });
    let mut summary = vec![format!("d = {:?}", d.table())];
    match derived_action_regular(d) {
        Ok(regular) => {
            let x = derived_crossed_module(d)?;
            let iso = derived_iso(d)?;
            let moved = transport_derivation(d)?;
            findings["regular"] = json!(true);
            findings["regular_action"] = action_json(&regular);
            findings["derived_alpha"] = json!(x.alpha().map());
            findings["iso"] = json!({ "f1": iso.f1().map(), "f0": iso.f0().map(), "covering": true });
            findings["transported"] = json!(moved.table());
            summary.push(format!("alpha_d = {:?}", x.alpha().map()));
            summary.push(format!("iso (1, σ⁻¹): f0 = {:?}", iso.f0().map()));
            summary.push(format!("d' = {:?}", moved.table()));
        }
        Err(Error::NotRegular) => {
            findings["regular"] = json!(false);
            summary.push("singular: only the general derived action exists".into());
        }
        Err(e) => return Err(e.into()),
    }
    Ok(Outcome::new(true, findings, summary))
}
