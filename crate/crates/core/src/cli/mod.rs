//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 computation error (degree cap,
//! factorization budget, failed consistency checks), 4 refuted hypothesis in
//! `discard`.

pub mod deffile;

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use thiserror::Error;

use crate::branchcheck::{self, BranchError};
use crate::catalog::{self, ggs_group, non_is_table_vectors, CatalogError, DefiningVector};
use crate::hausdorff::{
    hausdorff_dimension_with, BranchStructure, HausdorffError, HausdorffOptions, HausdorffResult,
    IndexData, Normality, SubgroupSpec,
};
use crate::quotients::{LogValue, QuotientError, QuotientTable};
use crate::tree::{SelfSimilarGroup, TreeError, DEFAULT_DEGREE_CAP};

pub use deffile::{parse_definition, DefinitionError};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_COMPUTATION: u8 = 3;
pub const EXIT_REFUTED: u8 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Computation(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Computation(_) | CliError::Io(_) => EXIT_COMPUTATION,
        }
    }
}

impl From<TreeError> for CliError {
    fn from(e: TreeError) -> Self {
        match e {
            TreeError::DegreeCapExceeded { .. } => CliError::Computation(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<QuotientError> for CliError {
    fn from(e: QuotientError) -> Self {
        match e {
            QuotientError::Tree(t) => t.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<HausdorffError> for CliError {
    fn from(e: HausdorffError) -> Self {
        match e {
            HausdorffError::Quotient(q) => q.into(),
            HausdorffError::ZeroIndex
            | HausdorffError::ZeroWitness
            | HausdorffError::BadLowerCentral(_)
            | HausdorffError::NotNormal => CliError::Usage(e.to_string()),
            other => CliError::Computation(other.to_string()),
        }
    }
}

impl From<BranchError> for CliError {
    fn from(e: BranchError) -> Self {
        match e {
            BranchError::Hausdorff(h) => h.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<DefinitionError> for CliError {
    fn from(e: DefinitionError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(name = "branch-hdim", version, about = "Hausdorff dimension of closures of regular branch groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Orders and base-m logarithmic orders of the congruence quotients G_n.
    Quotients(LevelsArgs),
    /// The sequence s_n(G).
    Sn(LevelsArgs),
    /// Hausdorff dimension of the closure from a branch structure.
    Hdim(HdimArgs),
    /// Logarithmic orders, s-sequence and dimension for the non-IS GGS-groups on T_4.
    GgsTable(TableArgs),
    /// Try to refute a branch structure from the s-sequence.
    Discard(DiscardArgs),
    /// Validate a group definition.
    Validate(SourceArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct GroupSource {
    /// Preset: "ggs:m:e1,e2,.." or "second-grigorchuk".
    #[arg(long)]
    pub preset: Option<String>,
    /// Group-definition file.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Markdown,
    Csv,
    Record,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,
    /// Digits printed for approximate values.
    #[arg(long, default_value_t = 12)]
    pub digits: usize,
    /// Maximum number of points of a level action.
    #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: usize,
}

#[derive(Args, Debug)]
pub struct SourceArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[arg(long, default_value_t = DEFAULT_DEGREE_CAP)]
    pub degree_cap: usize,
}

#[derive(Args, Debug)]
pub struct LevelsArgs {
    #[command(flatten)]
    pub source: GroupSource,
    /// Number of levels to compute.
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
#[group(multiple = false)]
pub struct SubgroupArgs {
    /// Verbal subgroup: derived, gammaC (C >= 2) or whole.
    #[arg(long)]
    pub verbal: Option<String>,
    /// Generators of K as comma-separated words.
    #[arg(long)]
    pub words: Option<String>,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct IndexArgs {
    /// |G:K|.
    #[arg(long)]
    pub index: Option<String>,
    /// Level k with K >= St_G(k).
    #[arg(long)]
    pub witness_level: Option<usize>,
    /// Guess |G:K| from stabilisation of |G_n:K_n| (heuristic).
    #[arg(long)]
    pub auto: bool,
}

#[derive(Args, Debug)]
pub struct HdimArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[command(flatten)]
    pub subgroup: SubgroupArgs,
    /// Assert that the subgroup given by --words is normal.
    #[arg(long)]
    pub normal: bool,
    #[command(flatten)]
    pub index: IndexArgs,
    /// Deepest level examined by --auto.
    #[arg(long, default_value_t = 5)]
    pub auto_max_level: usize,
    /// Run the growth-law check at level t+2 when it has at most this many vertices.
    #[arg(long, default_value_t = 1024)]
    pub extra_check_points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Restrict to these defining vectors, e.g. "1,0,0;1,-1,2".
    #[arg(long)]
    pub vectors: Option<String>,
    /// Rows computed concurrently.
    #[arg(long, default_value_t = 8)]
    pub jobs: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct DiscardArgs {
    #[command(flatten)]
    pub source: GroupSource,
    #[command(flatten)]
    pub subgroup: SubgroupArgs,
    #[arg(long)]
    pub normal: bool,
    /// Level k with K >= St_G(k), from an external source.
    #[arg(long)]
    pub witness_level: usize,
    /// Check s_n for k < n <= horizon.
    #[arg(long)]
    pub horizon: usize,
    /// Also test St_G(k) <= K at level k+1 (needs --verbal or --words).
    #[arg(long)]
    pub check_containment: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn load_group(source: &GroupSource, degree_cap: usize) -> Result<SelfSimilarGroup, CliError> {
    let group = match (&source.preset, &source.file) {
        (Some(p), None) => catalog::preset(p)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_definition(&text)?
        }
        _ => return Err(CliError::Usage("give exactly one of --preset or --file".into())),
    };
    Ok(group.with_degree_cap(degree_cap))
}

fn subgroup_spec(
    group: &SelfSimilarGroup,
    args: &SubgroupArgs,
    normal: bool,
) -> Result<Option<SubgroupSpec>, CliError> {
    if let Some(v) = &args.verbal {
        let v = v.trim();
        let spec = match v {
            "derived" => SubgroupSpec::Derived,
            "whole" => SubgroupSpec::Whole,
            _ => {
                let c = v
                    .strip_prefix("gamma")
                    .and_then(|c| c.trim_start_matches('_').parse::<usize>().ok())
                    .filter(|&c| c >= 2)
                    .ok_or_else(|| CliError::Usage(format!("unknown verbal subgroup {v:?}")))?;
                SubgroupSpec::LowerCentral(c)
            }
        };
        return Ok(Some(spec));
    }
    if let Some(words) = &args.words {
        let words = words
            .split(',')
            .map(|w| group.parse_word(w))
            .collect::<Result<Vec<_>, _>>()?;
        let normality = if normal { Normality::Asserted } else { Normality::Closure };
        return Ok(Some(SubgroupSpec::Words { words, normality }));
    }
    Ok(None)
}

fn join(values: &[LogValue], digits: usize) -> String {
    values.iter().map(|v| v.render(digits)).collect::<Vec<_>>().join(",")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn compute_table(group: SelfSimilarGroup, levels: usize) -> Result<QuotientTable, CliError> {
    if levels == 0 {
        return Err(CliError::Usage("--levels must be at least 1".into()));
    }
    Ok(QuotientTable::compute(group, levels)?)
}

pub fn cmd_quotients(args: &LevelsArgs) -> Result<String, CliError> {
    let group = load_group(&args.source, args.output.degree_cap)?;
    let table = compute_table(group, args.levels)?;
    let digits = args.output.digits;
    let mut out = String::new();
    match args.output.format {
        Format::Markdown => {
            out.push_str("| n | \\|G_n\\| | L_n |\n| --- | --- | --- |\n");
            for n in 1..=table.n_max() {
                let _ = writeln!(out, "| {n} | {} | {} |", table.order(n)?, table.log(n)?.render(digits));
            }
        }
        Format::Csv => out.push_str(&table.to_csv(digits)),
        Format::Record => {
            for n in 1..=table.n_max() {
                let _ = writeln!(out, "n={n} order={} log={}", table.order(n)?, table.log(n)?.render(digits));
            }
        }
    }
    Ok(out)
}

pub fn cmd_sn(args: &LevelsArgs) -> Result<String, CliError> {
    let group = load_group(&args.source, args.output.degree_cap)?;
    if args.levels < 2 {
        return Err(CliError::Usage("s_n needs --levels of at least 2".into()));
    }
    let table = compute_table(group, args.levels)?;
    let s = table.s_sequence()?;
    let digits = args.output.digits;
    let mut out = String::new();
    match args.output.format {
        Format::Markdown => {
            out.push_str("| n | s_n |\n| --- | --- |\n");
            for (i, v) in s.iter().enumerate() {
                let _ = writeln!(out, "| {} | {} |", i + 1, v.render(digits));
            }
        }
        Format::Csv => {
            out.push_str("n,s\n");
            for (i, v) in s.iter().enumerate() {
                let _ = writeln!(out, "{},{}", i + 1, csv_field(&v.render(digits)));
            }
        }
        Format::Record => {
            let _ = writeln!(out, "s={}", join(&s, digits));
        }
    }
    Ok(out)
}

fn render_result(r: &HausdorffResult, format: Format, digits: usize) -> String {
    match format {
        Format::Record => r.to_record(digits),
        Format::Csv => {
            let mut out = String::from("group,subgroup,hdim,mode,tier,index,omega,s,alpha,beta\n");
            let mode = if r.is_exact() { "exact" } else { "approximate" };
            let fields = [
                r.group.clone(),
                r.subgroup.clone(),
                r.hdim.render(digits),
                mode.into(),
                r.tier.to_string(),
                r.index.to_string(),
                r.omega.to_string(),
                join(&r.s_used, digits),
                r.alpha.render(digits),
                r.beta.render(digits),
            ];
            out.push_str(&fields.iter().map(|f| csv_field(f)).collect::<Vec<_>>().join(","));
            out.push('\n');
            out
        }
        Format::Markdown => {
            let mut out = String::from("| field | value |\n| --- | --- |\n");
            for line in r.to_record(digits).lines() {
                if let Some((k, v)) = line.split_once('=') {
                    let _ = writeln!(out, "| {k} | {} |", v.replace('|', "\\|"));
                }
            }
            out
        }
    }
}

pub fn cmd_hdim(args: &HdimArgs) -> Result<String, CliError> {
    let group = load_group(&args.source, args.output.degree_cap)?;
    let subgroup = subgroup_spec(&group, &args.subgroup, args.normal)?;
    let index = match (&args.index.index, args.index.witness_level, args.index.auto) {
        (Some(i), None, false) => IndexData::Explicit(
            i.trim().parse::<BigUint>().map_err(|_| CliError::Usage(format!("bad index {i:?}")))?,
        ),
        (None, Some(k), false) => IndexData::Witness(k),
        (None, None, true) => IndexData::Auto { max_level: args.auto_max_level },
        _ => return Err(CliError::Usage("give one of --index, --witness-level, --auto".into())),
    };
    let subgroup = match (subgroup, &index) {
        (Some(s), _) => s,
        // with an explicit index the subgroup only labels the result
        (None, IndexData::Explicit(_)) => SubgroupSpec::Derived,
        (None, _) => return Err(CliError::Usage("--witness-level and --auto need --verbal or --words".into())),
    };
    let mut table = QuotientTable::new(group);
    let options = HausdorffOptions { extra_check_points: args.extra_check_points };
    let result = hausdorff_dimension_with(&mut table, &BranchStructure { subgroup, index }, &options)?;
    Ok(render_result(&result, args.output.format, args.output.digits))
}

/// One row of the GGS table.
#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub vector: DefiningVector,
    pub logs: Vec<LogValue>,
    pub s: Vec<LogValue>,
    pub hdim: LogValue,
}

/// Computes `L_1..L_5`, `s_1..s_4` and the dimension via the index route with
/// `|G:G'| = 16`.
pub fn ggs_table_row(vector: &DefiningVector, degree_cap: usize) -> Result<TableRow, CliError> {
    let group = ggs_group(vector).with_degree_cap(degree_cap);
    let mut table = QuotientTable::compute(group, 5)?;
    let logs = table.logs();
    let s = table.s_sequence()?;
    let bs = BranchStructure {
        subgroup: SubgroupSpec::Derived,
        index: IndexData::Explicit(BigUint::from(16u32)),
    };
    let result = hausdorff_dimension_with(&mut table, &bs, &HausdorffOptions::default())?;
    Ok(TableRow { vector: vector.clone(), logs, s, hdim: result.hdim })
}

fn parse_vectors(text: &str) -> Result<Vec<DefiningVector>, CliError> {
    text.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| DefiningVector::parse(4, t.trim().trim_start_matches('(').trim_end_matches(')')))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::from)
}

pub fn cmd_ggs_table(args: &TableArgs) -> Result<String, CliError> {
    let vectors = match &args.vectors {
        Some(v) => parse_vectors(v)?,
        None => non_is_table_vectors(),
    };
    if vectors.is_empty() {
        return Err(CliError::Usage("no defining vectors selected".into()));
    }
    let jobs = args.jobs.max(1);
    let cap = args.output.degree_cap;
    let mut rows: Vec<Result<TableRow, CliError>> = Vec::with_capacity(vectors.len());
    for chunk in vectors.chunks(jobs) {
        let computed: Vec<_> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|v| scope.spawn(move || ggs_table_row(v, cap)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("row worker panicked")).collect()
        });
        rows.extend(computed);
    }
    let rows = rows.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(render_table(&rows, args.output.format, args.output.digits))
}

pub fn render_table(rows: &[TableRow], format: Format, digits: usize) -> String {
    let mut out = String::new();
    match format {
        Format::Markdown => {
            out.push_str("| Defining vector | (log\\|G_n\\|)_{n=1}^5 | (s_n(G))_{n=1}^4 | hdim_{W_4} |\n");
            out.push_str("| --- | --- | --- | --- |\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "| {} | ({}) | ({}) | {} |",
                    r.vector,
                    join(&r.logs, digits),
                    join(&r.s, digits),
                    r.hdim.render(digits)
                );
            }
        }
        Format::Csv => {
            out.push_str("vector,L1,L2,L3,L4,L5,s1,s2,s3,s4,hdim\n");
            for r in rows {
                let mut fields = vec![csv_field(&r.vector.to_string())];
                fields.extend(r.logs.iter().map(|v| csv_field(&v.render(digits))));
                fields.extend(r.s.iter().map(|v| csv_field(&v.render(digits))));
                fields.push(csv_field(&r.hdim.render(digits)));
                let _ = writeln!(out, "{}", fields.join(","));
            }
        }
        Format::Record => {
            for r in rows {
                let _ = writeln!(out, "vector={}", r.vector);
                let _ = writeln!(out, "logs={}", join(&r.logs, digits));
                let _ = writeln!(out, "s={}", join(&r.s, digits));
                let _ = writeln!(out, "hdim={}", r.hdim.render(digits));
                out.push('\n');
            }
        }
    }
    out
}

/// Returns the rendered verdict and whether it refutes the hypothesis.
pub fn cmd_discard(args: &DiscardArgs) -> Result<(String, bool), CliError> {
    if args.horizon <= args.witness_level {
        return Err(BranchError::EmptyRange { k: args.witness_level, horizon: args.horizon }.into());
    }
    let group = load_group(&args.source, args.output.degree_cap)?;
    let subgroup = subgroup_spec(&group, &args.subgroup, args.normal)?;
    let mut table = QuotientTable::new(group);
    let mut verdict = branchcheck::discard_by_s(&mut table, args.witness_level, args.horizon)?;
    if args.check_containment {
        let spec = subgroup.ok_or_else(|| {
            CliError::Usage("--check-containment needs --verbal or --words".into())
        })?;
        let k = args.witness_level;
        let evidence = branchcheck::verify_stabilizer_containment(&mut table, &spec, k, k + 1)?;
        verdict.notes.push(format!("containment check: {evidence}"));
        if evidence.is_refuted() {
            verdict.notes.push("the witness level itself is refuted".into());
        }
    }
    let refuted = verdict.is_refuted();
    let text = match args.output.format {
        Format::Record => verdict.to_record(args.output.digits),
        Format::Csv => {
            let rec = verdict.to_record(args.output.digits);
            let values: Vec<String> = rec
                .lines()
                .filter_map(|l| l.split_once('=').map(|(_, v)| csv_field(v)))
                .collect();
            format!("verdict,witness,levels_checked,notes\n{}\n", values.join(","))
        }
        Format::Markdown => {
            let mut out = format!("{verdict}\n");
            for note in &verdict.notes {
                let _ = writeln!(out, "- {note}");
            }
            out
        }
    };
    Ok((text, refuted))
}

pub fn cmd_validate(args: &SourceArgs) -> Result<String, CliError> {
    let group = load_group(&args.source, args.degree_cap)?;
    let report = group.validate();
    let mut out = format!("{report}\n");
    for note in group.notes() {
        let _ = writeln!(out, "note: {note}");
    }
    if report.is_valid() {
        Ok(out)
    } else {
        Err(CliError::Usage(out))
    }
}

/// Runs a parsed command, writing its output; returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    let (text, code) = match &cli.command {
        Command::Quotients(a) => (cmd_quotients(a)?, 0),
        Command::Sn(a) => (cmd_sn(a)?, 0),
        Command::Hdim(a) => (cmd_hdim(a)?, 0),
        Command::GgsTable(a) => (cmd_ggs_table(a)?, 0),
        Command::Discard(a) => {
            let (text, refuted) = cmd_discard(a)?;
            (text, if refuted { EXIT_REFUTED } else { 0 })
        }
        Command::Validate(a) => (cmd_validate(a)?, 0),
    };
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(code)
}
