//! Command-line front end.
//!
//! Features are numbered from 1 on the command line and in every output
//! record. Exit statuses: 0 success, 1 domain error, 2 input or parse error,
//! 3 internal invariant violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::bench::{bench, load_dataset, BenchError, BenchRow};
use crate::dlc::{compile_dl, parse_dl, DlError};
use crate::enumerate::{enumerate_tree_cxps, membership, EnumerationConfig, MembershipKind, XpEnumerator};
use crate::explain::{find_axp, find_cxp, DeletionOrder, ExplainError, Explanation, XpKind};
use crate::features::FeatureSet;
use crate::model::{DecisionGraph, Instance, ModelError};
use crate::schema::{model_to_json, parse_model};
use crate::validate::{validate, ValidationReport};
use crate::xpg::{Xpg, XpgError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<XpgError> for CliError {
    fn from(e: XpgError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<ExplainError> for CliError {
    fn from(e: ExplainError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<DlError> for CliError {
    fn from(e: DlError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::Io(_) | BenchError::Schema(_) => CliError::Input(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "xpg", version, about = "Formal abductive and contrastive explanations for decision graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a model file and report structural problems.
    Validate {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compute one explanation, all of them, or all CXps of a tree.
    Explain(ExplainArgs),
    /// Decide whether a feature occurs in some explanation.
    Membership {
        model: PathBuf,
        #[command(flatten)]
        instance: InstanceArgs,
        /// Feature name or 1-based index.
        #[arg(long)]
        feature: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Enumerate every explanation of every distinct dataset row and summarize.
    Bench {
        model: PathBuf,
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
    },
    /// Compile a decision list to an OBDD model file.
    CompileDl {
        dl: PathBuf,
        out: PathBuf,
        /// Variable order as a comma-separated 1-based permutation.
        #[arg(long)]
        order: Option<String>,
    },
    /// Print the explanation graph (DOT) or the final clause database (DIMACS).
    Dump {
        model: PathBuf,
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = DumpWhat::Dot)]
        what: DumpWhat,
    },
}

#[derive(Args, Debug)]
pub struct InstanceArgs {
    /// Instance values in feature order, comma separated.
    #[arg(short = 'v', long = "values", conflicts_with = "index")]
    pub values: Option<String>,
    /// 1-based row of the dataset given with --data.
    #[arg(short = 'i', long = "index", requires = "data")]
    pub index: Option<usize>,
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExplainArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum, default_value_t = Mode::Axp)]
    pub mode: Mode,
    /// Initial fixed set for AXp extraction (names or 1-based indices).
    #[arg(long)]
    pub seed_axp: Option<String>,
    /// Initial free set for CXp extraction (names or 1-based indices).
    #[arg(long)]
    pub seed_cxp: Option<String>,
    /// Deletion order: asc, desc or perm:<1-based list>.
    #[arg(long, default_value = "asc")]
    pub order: String,
    /// Stop after this many explanations.
    #[arg(long)]
    pub limit: Option<usize>,
    /// Stop enumerating after this many seconds.
    #[arg(long)]
    pub budget: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Axp,
    Cxp,
    Enumerate,
    CxpsTree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DumpWhat {
    Dot,
    Dimacs,
}

/// One explanation as printed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct XpOutput {
    pub kind: XpKind,
    pub features: Vec<usize>,
    pub names: Vec<String>,
    pub literals: String,
    /// Seconds spent producing this record.
    pub elapsed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipOutput {
    pub feature: usize,
    pub name: String,
    pub in_axp: bool,
    pub in_cxp: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidateOutput {
    pub status: &'static str,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

pub fn load_model(path: &Path) -> Result<DecisionGraph, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_instance(dg: &DecisionGraph, args: &InstanceArgs) -> Result<Instance, CliError> {
    match (&args.values, args.index, &args.data) {
        (Some(values), _, _) => {
            let fields: Vec<&str> = values.split(',').map(str::trim).collect();
            Instance::parse(dg, &fields).map_err(|e| CliError::Domain(e.to_string()))
        }
        (None, Some(i), Some(data)) => {
            let rows = load_dataset(dg, data)?;
            i.checked_sub(1)
                .and_then(|k| rows.get(k).cloned())
                .ok_or_else(|| CliError::Input(format!("row {i} out of range (dataset has {} rows)", rows.len())))
        }
        _ => Err(CliError::Input("an instance is required: use -v or -i with --data".into())),
    }
}

/// Resolves a feature given by name or 1-based index to its 0-based index.
pub fn resolve_feature(dg: &DecisionGraph, token: &str) -> Result<usize, CliError> {
    let token = token.trim();
    if let Some(i) = dg.feature_index(token) {
        return Ok(i);
    }
    match token.parse::<usize>() {
        Ok(i) if (1..=dg.num_features()).contains(&i) => Ok(i - 1),
        _ => Err(CliError::Domain(format!("unknown feature {token}"))),
    }
}

fn parse_feature_list(dg: &DecisionGraph, text: &str) -> Result<FeatureSet, CliError> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| resolve_feature(dg, t))
        .collect()
}

pub fn parse_order(dg: &DecisionGraph, text: &str) -> Result<DeletionOrder, CliError> {
    match text.trim() {
        "asc" => Ok(DeletionOrder::Ascending),
        "desc" => Ok(DeletionOrder::Descending),
        other => match other.strip_prefix("perm:") {
            Some(list) => {
                let p = list
                    .split(',')
                    .map(|t| resolve_feature(dg, t))
                    .collect::<Result<Vec<_>, _>>()?;
                DeletionOrder::Permutation(p.clone()).sequence(dg.num_features())?;
                Ok(DeletionOrder::Permutation(p))
            }
            None => Err(CliError::Input(format!("unknown order {other:?}; use asc, desc or perm:<list>"))),
        },
    }
}

pub fn render_explanation(dg: &DecisionGraph, v: &Instance, xp: &Explanation, elapsed: Duration) -> XpOutput {
    let names: Vec<String> = xp.features.iter().map(|i| dg.features()[i].name.clone()).collect();
    let literals = xp
        .features
        .iter()
        .map(|i| {
            let f = &dg.features()[i];
            format!("{}={}", f.name, f.render_value(&v.values[i]))
        })
        .collect::<Vec<_>>()
        .join(" ∧ ");
    XpOutput {
        kind: xp.kind,
        features: xp.features.iter().map(|i| i + 1).collect(),
        names,
        literals,
        elapsed: elapsed.as_secs_f64(),
    }
}

struct Printer<'w> {
    out: &'w mut dyn Write,
    format: Format,
    header_done: bool,
}

impl<'w> Printer<'w> {
    fn new(out: &'w mut dyn Write, format: Format) -> Self {
        Printer { out, format, header_done: false }
    }

    /// Writes one record: a JSON line, or a tab-separated row preceded once
    /// by `header`.
    fn record<T: Serialize>(&mut self, value: &T, header: &[&str], cells: Vec<String>) -> Result<(), CliError> {
        match self.format {
            Format::Jsonl => {
                let line = serde_json::to_string(value).map_err(|e| CliError::Internal(e.to_string()))?;
                writeln!(self.out, "{line}")?;
            }
            Format::Table => {
                if !self.header_done {
                    writeln!(self.out, "{}", header.join("\t"))?;
                    self.header_done = true;
                }
                writeln!(self.out, "{}", cells.join("\t"))?;
            }
        }
        self.out.flush()?;
        Ok(())
    }

    fn explanation(&mut self, rec: &XpOutput) -> Result<(), CliError> {
        let cells = vec![
            rec.kind.to_string(),
            join(&rec.features),
            rec.names.join(","),
            rec.literals.clone(),
            format!("{:.6}", rec.elapsed),
        ];
        self.record(rec, &["kind", "features", "names", "literals", "elapsed"], cells)
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn cmd_validate(path: &Path, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let dg = load_model(path)?;
    let report: ValidationReport = validate(&dg);
    let rec = ValidateOutput {
        status: if report.is_ok() { "OK" } else { "ERROR" },
        errors: report.errors.iter().map(ToString::to_string).collect(),
        warnings: report.warnings.iter().map(ToString::to_string).collect(),
    };
    match format {
        Format::Jsonl => {
            writeln!(out, "{}", serde_json::to_string(&rec).map_err(|e| CliError::Internal(e.to_string()))?)?;
        }
        Format::Table => {
            writeln!(out, "{}", rec.status)?;
            for e in &rec.errors {
                writeln!(out, "error\t{e}")?;
            }
            for w in &rec.warnings {
                writeln!(out, "warning\t{w}")?;
            }
        }
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(CliError::Domain(format!("{} validation error(s)", report.errors.len())))
    }
}

fn cmd_explain(args: &ExplainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let dg = load_model(&args.model)?;
    let v = load_instance(&dg, &args.instance)?;
    let x = Xpg::build(&dg, &v)?;
    let m = dg.num_features();
    let order = parse_order(&dg, &args.order)?;
    let mut printer = Printer::new(out, args.format);
    let started = Instant::now();
    match args.mode {
        Mode::Axp => {
            let seed = match &args.seed_axp {
                Some(s) => parse_feature_list(&dg, s)?,
                None => FeatureSet::full(m),
            };
            let xp = find_axp(&x, &seed, &order)?;
            printer.explanation(&render_explanation(&dg, &v, &xp, started.elapsed()))?;
        }
        Mode::Cxp => {
            let xp = match &args.seed_cxp {
                Some(s) => Some(find_cxp(&x, &parse_feature_list(&dg, s)?, &order)?),
                // a constant prediction has no CXp at all
                None => find_cxp(&x, &FeatureSet::full(m), &order).ok(),
            };
            if let Some(xp) = xp {
                printer.explanation(&render_explanation(&dg, &v, &xp, started.elapsed()))?;
            }
        }
        Mode::Enumerate => {
            let config = EnumerationConfig {
                order,
                limit: args.limit,
                budget: args.budget.map(Duration::from_secs_f64),
                ..Default::default()
            };
            for rec in XpEnumerator::new(&x, config) {
                printer.explanation(&render_explanation(&dg, &v, &rec.explanation, rec.elapsed))?;
            }
        }
        Mode::CxpsTree => {
            let cxps = enumerate_tree_cxps(&x).map_err(|e| CliError::Domain(e.to_string()))?;
            let each = started.elapsed() / cxps.len().max(1) as u32;
            for c in cxps.into_iter().take(args.limit.unwrap_or(usize::MAX)) {
                printer.explanation(&render_explanation(&dg, &v, &Explanation::cxp(c), each))?;
            }
        }
    }
    Ok(())
}

fn cmd_membership(
    model: &Path,
    instance: &InstanceArgs,
    feature: &str,
    format: Format,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let dg = load_model(model)?;
    let v = load_instance(&dg, instance)?;
    let i = resolve_feature(&dg, feature)?;
    let x = Xpg::build(&dg, &v)?;
    let member = membership(&x, i, MembershipKind::Either);
    let rec = MembershipOutput {
        feature: i + 1,
        name: dg.features()[i].name.clone(),
        in_axp: member,
        in_cxp: member,
    };
    let cells = vec![rec.feature.to_string(), rec.name.clone(), rec.in_axp.to_string(), rec.in_cxp.to_string()];
    Printer::new(out, format).record(&rec, &["feature", "name", "in_axp", "in_cxp"], cells)
}

fn cmd_bench(model: &Path, data: &Path, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    let dg = load_model(model)?;
    let rows = load_dataset(&dg, data)?;
    let row: BenchRow = bench(&dg, &rows)?;
    let cells = row.cells();
    Printer::new(out, format).record(&row, &BenchRow::HEADER, cells)
}

fn cmd_compile_dl(dl: &Path, target: &Path, order: Option<&str>, out: &mut dyn Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(dl).map_err(|e| CliError::Input(format!("{}: {e}", dl.display())))?;
    let list = parse_dl(&text)?;
    let order = order
        .map(|o| {
            o.split(',')
                .map(|t| match t.trim().parse::<usize>() {
                    Ok(i) if i >= 1 => Ok(i - 1),
                    _ => Err(CliError::Input(format!("bad variable {t:?} in order"))),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .transpose()?;
    let bdd = compile_dl(&list, order.as_deref()).map_err(|e| CliError::Domain(e.to_string()))?;
    let dg = bdd.to_decision_graph();
    std::fs::write(target, model_to_json(&dg))?;
    writeln!(out, "wrote {} ({} nodes)", target.display(), dg.nodes().len())?;
    Ok(())
}

fn cmd_dump(model: &Path, instance: &InstanceArgs, what: DumpWhat, out: &mut dyn Write) -> Result<(), CliError> {
    let dg = load_model(model)?;
    let v = load_instance(&dg, instance)?;
    let x = Xpg::build(&dg, &v)?;
    match what {
        DumpWhat::Dot => write!(out, "{}", x.to_dot())?,
        DumpWhat::Dimacs => {
            let mut it = XpEnumerator::new(&x, EnumerationConfig::default());
            it.by_ref().for_each(drop);
            write!(out, "{}", it.oracle().to_dimacs())?;
        }
    }
    Ok(())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate { model, format } => cmd_validate(model, *format, out),
        Command::Explain(args) => cmd_explain(args, out),
        Command::Membership { model, instance, feature, format } => {
            cmd_membership(model, instance, feature, *format, out)
        }
        Command::Bench { model, data, format } => cmd_bench(model, data, *format, out),
        Command::CompileDl { dl, out: target, order } => cmd_compile_dl(dl, target, order.as_deref(), out),
        Command::Dump { model, instance, what } => cmd_dump(model, instance, *what, out),
    }
}

/// Parses `args`, runs the command against `out` and returns the exit status.
/// Diagnostics go to standard error.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&cli, out)))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(CliError::Internal(msg))
        });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("xpg: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn run_str(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = main_with_args(std::iter::once("xpg").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    fn hardware_path() -> String {
        concat!(env!("CARGO_MANIFEST_DIR"), "/data/hardware_tree.json").to_owned()
    }

    #[test]
    fn feature_resolution() {
        let dt = fixtures::hardware_tree();
        assert_eq!(resolve_feature(&dt, "CreditRating").unwrap(), 3);
        assert_eq!(resolve_feature(&dt, "1").unwrap(), 0);
        assert!(matches!(resolve_feature(&dt, "5"), Err(CliError::Domain(_))));
        assert!(matches!(resolve_feature(&dt, "Colour"), Err(CliError::Domain(_))));
        assert_eq!(parse_feature_list(&dt, "1,Student").unwrap(), FeatureSet::from([0, 2]));
    }

    #[test]
    fn order_parsing() {
        let dt = fixtures::hardware_tree();
        assert_eq!(parse_order(&dt, "desc").unwrap(), DeletionOrder::Descending);
        assert_eq!(
            parse_order(&dt, "perm:4,2,1,3").unwrap(),
            DeletionOrder::Permutation(vec![3, 1, 0, 2])
        );
        assert!(parse_order(&dt, "perm:1,1,2,3").is_err());
        assert!(matches!(parse_order(&dt, "random"), Err(CliError::Input(_))));
    }

    #[test]
    fn literal_rendering() {
        let dt = fixtures::hardware_tree();
        let v = Instance::parse(&dt, &["O", "L", "Y", "P"]).unwrap();
        let rec = render_explanation(&dt, &v, &Explanation::axp(FeatureSet::from([0, 3])), Duration::ZERO);
        assert_eq!(rec.features, vec![1, 4]);
        assert_eq!(rec.names, vec!["Age", "CreditRating"]);
        assert_eq!(rec.literals, "Age=O ∧ CreditRating=P");
    }

    #[test]
    fn explain_axp_jsonl() {
        let (code, out) = run_str(&["explain", &hardware_path(), "-v", "O,L,Y,P", "--format", "jsonl"]);
        assert_eq!(code, 0);
        let rec: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(rec["kind"], "AXp");
        assert_eq!(rec["features"], serde_json::json!([1, 4]));
    }

    #[test]
    fn exit_statuses() {
        assert_eq!(run_str(&["validate", &hardware_path()]), (0, "OK\n".to_owned()));
        assert_eq!(run_str(&["validate", "/nonexistent/model.json"]).0, 2);
        assert_eq!(run_str(&["explain", &hardware_path(), "-v", "O,L,Y,Q"]).0, 1);
        assert_eq!(run_str(&["membership", &hardware_path(), "-v", "O,L,Y,P", "--feature", "9"]).0, 1);
        assert_eq!(run_str(&["explain"]).0, 2);
        assert_eq!(run_str(&["--help"]).0, 0);
    }
}
