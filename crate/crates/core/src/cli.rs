//! Command-line front end.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value as Json};

use crate::classify::{classify_corpus_lenient, tie_rate, ClassifiedEdit, EditKind, Scheme};
use crate::corpus::CorpusBundle;
use crate::error::Error;
use crate::matrix::ConfusionMatrix;
use crate::stats;

#[derive(Debug, Parser)]
#[command(name = "synerr", version, about = "Syntactic error types for GEC corpora")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One report line per merged edit.
    Classify {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Confusion matrix of source vs target labels.
    Matrix {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Per-edit report from `classify` instead of a corpus.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Unchanged-label fractions per proficiency level.
    Levels {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Matrix file, one per --level.
        #[arg(long)]
        matrix: Vec<PathBuf>,
        /// Level tag, one per corpus or matrix, in order.
        #[arg(long)]
        level: Vec<String>,
        #[command(flatten)]
        filter: FilterArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Upper bound on recall of systems against a gold matrix.
    Recall {
        #[arg(long)]
        gold: PathBuf,
        /// System matrix (repeatable).
        #[arg(long, required = true)]
        matrix: Vec<PathBuf>,
        /// System name, one per --matrix (defaults to the file stem).
        #[arg(long)]
        level: Vec<String>,
        #[arg(long, default_value = "upos")]
        scheme: Scheme,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Overlap with an external taxonomy, plus matrix statistics.
    Compare {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Per-edit report from `classify`.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Joint count table: SE types down, external types across.
        #[arg(long)]
        joint: Option<PathBuf>,
        /// Matrix file (repeatable); two files are also correlated.
        #[arg(long)]
        matrix: Vec<PathBuf>,
        /// Second scheme to associate with --scheme on corpus input.
        #[arg(long)]
        against: Option<Scheme>,
        #[arg(long, default_value_t = 30)]
        min_count: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Args)]
pub struct CorpusArgs {
    #[arg(long)]
    pub m2: Vec<PathBuf>,
    #[arg(long = "src-conllu")]
    pub src_conllu: Vec<PathBuf>,
    #[arg(long = "cor-conllu")]
    pub cor_conllu: Vec<PathBuf>,
    /// upos, deprel or feature:<Name>[:<UPOS>]
    #[arg(long, default_value = "upos")]
    pub scheme: Scheme,
    #[arg(long, default_value_t = 0)]
    pub annotator: u32,
}

#[derive(Debug, Clone, Args)]
pub struct FilterArgs {
    #[arg(long, value_delimiter = ',', default_value = "add,del,rep")]
    pub kinds: Vec<EditKind>,
    #[arg(long, value_delimiter = ',')]
    pub exclude_labels: Vec<String>,
}

impl FilterArgs {
    fn exclude(&self) -> BTreeSet<String> {
        self.exclude_labels.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    pub format: Format,
    /// Decimal places for fractions.
    #[arg(long, default_value_t = 3)]
    pub decimals: usize,
}

/// Why a command failed; decides the exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or malformed input, bad arguments (exit 1).
    Input(String),
    /// Some sentences did not align with their parses (exit 2).
    Alignment(Vec<String>),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => 1,
            Failure::Alignment(_) => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
}

#[derive(Debug, Clone)]
struct Table {
    name: &'static str,
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
    /// TSV header line (matrix files leave the corner empty).
    tsv_header: Option<Vec<String>>,
}

impl Table {
    fn new(name: &'static str, columns: &[&str]) -> Table {
        let columns: Vec<String> = columns.iter().map(|c| c.to_string()).collect();
        Table {
            name,
            tsv_header: Some(columns.clone()),
            columns,
            rows: Vec::new(),
        }
    }
}

/// Everything a command prints on stdout.
#[derive(Debug, Default)]
pub struct Output {
    tables: Vec<Table>,
}

impl Output {
    pub fn render(&self, format: Format, decimals: usize) -> String {
        match format {
            Format::Tsv => self.to_tsv(decimals),
            Format::Json => self.to_json(decimals),
        }
    }

    fn to_tsv(&self, decimals: usize) -> String {
        let mut out = String::new();
        let multi = self.tables.len() > 1;
        for (i, t) in self.tables.iter().enumerate() {
            if multi {
                if i > 0 {
                    out.push('\n');
                }
                let _ = writeln!(out, "# {}", t.name);
            }
            if let Some(h) = &t.tsv_header {
                out.push_str(&h.join("\t"));
                out.push('\n');
            }
            for row in &t.rows {
                let cells: Vec<String> = row
                    .iter()
                    .map(|c| match c {
                        Cell::Str(s) => s.clone(),
                        Cell::Int(n) => n.to_string(),
                        Cell::Float(f) if f.is_nan() => "NA".to_string(),
                        Cell::Float(f) => format!("{f:.decimals$}"),
                    })
                    .collect();
                out.push_str(&cells.join("\t"));
                out.push('\n');
            }
        }
        out
    }

    fn to_json(&self, decimals: usize) -> String {
        let mut root = Map::new();
        for t in &self.tables {
            let rows: Vec<Json> = t
                .rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Json> = t
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(k, c)| {
                            let v = match c {
                                Cell::Str(s) => Json::from(s.as_str()),
                                Cell::Int(n) => Json::from(*n),
                                Cell::Float(f) => format!("{f:.decimals$}")
                                    .parse::<f64>()
                                    .ok()
                                    .and_then(serde_json::Number::from_f64)
                                    .map_or(Json::Null, Json::Number),
                            };
                            (k.clone(), v)
                        })
                        .collect();
                    Json::Object(obj)
                })
                .collect();
            root.insert(t.name.to_string(), Json::Array(rows));
        }
        let mut s = serde_json::to_string_pretty(&Json::Object(root)).unwrap_or_default();
        s.push('\n');
        s
    }
}

/// Result of running a command: stdout content, stderr notes, and failure if any.
#[derive(Debug, Default)]
pub struct Run {
    pub stdout: String,
    pub stderr: Vec<String>,
    pub failure: Option<Failure>,
}

impl Run {
    pub fn exit_code(&self) -> i32 {
        self.failure.as_ref().map_or(0, Failure::exit_code)
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = execute(&cli.command);
    let _ = io::stdout().lock().write_all(result.stdout.as_bytes());
    let mut err = io::stderr().lock();
    for line in &result.stderr {
        let _ = writeln!(err, "{line}");
    }
    result.exit_code()
}

/// Runs a parsed command without touching the process streams.
pub fn execute(command: &Command) -> Run {
    let mut run = Run::default();
    let (output, format, decimals) = match command {
        Command::Classify { corpus, output } => (cmd_classify(corpus, &mut run), output.format, output.decimals),
        Command::Matrix {
            corpus,
            report,
            filter,
            output,
        } => (
            cmd_matrix(corpus, report.as_deref(), filter, &mut run),
            output.format,
            output.decimals,
        ),
        Command::Levels {
            corpus,
            matrix,
            level,
            filter,
            output,
        } => (
            cmd_levels(corpus, matrix, level, filter, &mut run),
            output.format,
            output.decimals,
        ),
        Command::Recall {
            gold,
            matrix,
            level,
            scheme,
            output,
        } => (cmd_recall(gold, matrix, level, scheme), output.format, output.decimals),
        Command::Compare {
            corpus,
            report,
            joint,
            matrix,
            against,
            min_count,
            output,
        } => (
            cmd_compare(
                corpus,
                report.as_deref(),
                joint.as_deref(),
                matrix,
                against.as_ref(),
                *min_count,
                &mut run,
            ),
            output.format,
            output.decimals,
        ),
    };
    match output {
        Ok(out) => run.stdout = out.render(format, decimals),
        Err(f) => run.failure = Some(f),
    }
    match &run.failure {
        Some(Failure::Input(msg)) => run.stderr.push(format!("error: {msg}")),
        Some(Failure::Alignment(msgs)) => {
            run.stderr.extend(msgs.iter().map(|m| format!("alignment error: {m}")))
        }
        None => {}
    }
    run
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_bundles(corpus: &CorpusArgs) -> Result<Vec<CorpusBundle>, Failure> {
    let n = corpus.m2.len();
    if corpus.src_conllu.len() != n || corpus.cor_conllu.len() != n {
        return Err(Failure::Input(format!(
            "need one --src-conllu and --cor-conllu per --m2 (got {}, {}, {})",
            n,
            corpus.src_conllu.len(),
            corpus.cor_conllu.len()
        )));
    }
    (0..n)
        .map(|i| {
            CorpusBundle::load(&corpus.m2[i], &corpus.src_conllu[i], &corpus.cor_conllu[i])
                .map_err(|e| Failure::Input(format!("{}: {e}", corpus.m2[i].display())))
        })
        .collect()
}

fn load_bundle(corpus: &CorpusArgs) -> Result<CorpusBundle, Failure> {
    let mut bundles = load_bundles(corpus)?;
    match bundles.len() {
        1 => Ok(bundles.remove(0)),
        0 => Err(Failure::Input("missing --m2/--src-conllu/--cor-conllu".into())),
        n => Err(Failure::Input(format!("expected one corpus, got {n}"))),
    }
}

/// Classifies leniently, recording misaligned sentences for the exit status.
fn classify_bundle(
    bundle: &CorpusBundle,
    scheme: &Scheme,
    annotator: u32,
    run: &mut Run,
) -> Vec<ClassifiedEdit> {
    let (edits, errors) = classify_corpus_lenient(bundle, scheme, annotator);
    note_errors(errors, run);
    edits
}

fn note_errors(errors: Vec<Error>, run: &mut Run) {
    if errors.is_empty() {
        return;
    }
    let msgs: Vec<String> = errors.iter().map(ToString::to_string).collect();
    let alignment_only = errors.iter().all(|e| {
        matches!(
            e,
            Error::AlignmentError { .. } | Error::FormMismatch { .. } | Error::SpanOutOfBounds { .. }
        )
    });
    let failure = if alignment_only {
        Failure::Alignment(msgs)
    } else {
        Failure::Input(msgs.join("; "))
    };
    run.failure = match (run.failure.take(), failure) {
        (Some(Failure::Input(a)), _) => Some(Failure::Input(a)),
        (_, Failure::Input(b)) => Some(Failure::Input(b)),
        (Some(Failure::Alignment(mut a)), Failure::Alignment(b)) => {
            a.extend(b);
            Some(Failure::Alignment(a))
        }
        (None, f) => Some(f),
    };
}

fn read_report(path: &Path) -> Result<Vec<ClassifiedEdit>, Failure> {
    let mut edits = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(|e| Failure::Input(e.to_string()))?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let edit = ClassifiedEdit::from_report_line(line.trim_end_matches('\r'))
            .map_err(|e| Failure::Input(format!("{}:{}: {e}", path.display(), i + 1)))?;
        edits.push(edit);
    }
    Ok(edits)
}

fn read_matrix(path: &Path, scheme: &Scheme) -> Result<ConfusionMatrix, Failure> {
    ConfusionMatrix::read_tsv(open(path)?, scheme.clone())
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

const REPORT_COLUMNS: [&str; 9] = [
    "sentence_index",
    "edit_index",
    "kind",
    "scheme",
    "src_label",
    "tgt_label",
    "src_rep",
    "tgt_rep",
    "external_type",
];

fn cmd_classify(corpus: &CorpusArgs, run: &mut Run) -> Result<Output, Failure> {
    let bundle = load_bundle(corpus)?;
    let edits = classify_bundle(&bundle, &corpus.scheme, corpus.annotator, run);
    if let Some(rate) = tie_rate(&edits) {
        run.stderr.push(format!("tie rate: {rate:.4}"));
    }
    let mut table = Table::new("edits", &REPORT_COLUMNS);
    table.tsv_header = None;
    table.rows = edits
        .iter()
        .map(|e| e.report_fields().into_iter().map(Cell::Str).collect())
        .collect();
    Ok(Output { tables: vec![table] })
}

fn matrix_table(m: &ConfusionMatrix) -> Table {
    let axis = m.axis();
    let mut columns = vec!["source".to_string()];
    columns.extend(axis.iter().map(|s| s.to_string()));
    let mut header = vec![String::new()];
    header.extend(axis.iter().map(|s| s.to_string()));
    let rows = axis
        .iter()
        .enumerate()
        .map(|(i, label)| {
            std::iter::once(Cell::Str(label.to_string()))
                .chain(m.row(i).iter().map(|&n| Cell::Int(n)))
                .collect()
        })
        .collect();
    Table {
        name: "matrix",
        columns,
        rows,
        tsv_header: Some(header),
    }
}

fn report_scheme(edits: &[ClassifiedEdit], fallback: &Scheme) -> Scheme {
    edits.first().map_or_else(|| fallback.clone(), |e| e.scheme.clone())
}

fn cmd_matrix(
    corpus: &CorpusArgs,
    report: Option<&Path>,
    filter: &FilterArgs,
    run: &mut Run,
) -> Result<Output, Failure> {
    let (edits, scheme) = match report {
        Some(path) => {
            let edits = read_report(path)?;
            let scheme = report_scheme(&edits, &corpus.scheme);
            (edits, scheme)
        }
        None => {
            let bundle = load_bundle(corpus)?;
            (
                classify_bundle(&bundle, &corpus.scheme, corpus.annotator, run),
                corpus.scheme.clone(),
            )
        }
    };
    let m = stats::build_matrix(&scheme, &edits, &filter.kinds, &filter.exclude())?;
    Ok(Output {
        tables: vec![matrix_table(&m)],
    })
}

fn cmd_levels(
    corpus: &CorpusArgs,
    matrices: &[PathBuf],
    levels: &[String],
    filter: &FilterArgs,
    run: &mut Run,
) -> Result<Output, Failure> {
    let mut columns: Vec<(String, ConfusionMatrix)> = Vec::new();
    if !matrices.is_empty() {
        if !corpus.m2.is_empty() {
            return Err(Failure::Input("give either corpora or --matrix files, not both".into()));
        }
        if levels.len() != matrices.len() {
            return Err(Failure::Input(format!(
                "need one --level per --matrix (got {} and {})",
                levels.len(),
                matrices.len()
            )));
        }
        for (tag, path) in levels.iter().zip(matrices) {
            columns.push((tag.clone(), read_matrix(path, &corpus.scheme)?));
        }
    } else {
        let bundles = load_bundles(corpus)?;
        if bundles.is_empty() {
            return Err(Failure::Input("missing --matrix or --m2 inputs".into()));
        }
        if levels.len() != bundles.len() {
            return Err(Failure::Input(format!(
                "need one --level per corpus (got {} and {})",
                levels.len(),
                bundles.len()
            )));
        }
        for (tag, bundle) in levels.iter().zip(&bundles) {
            let (m, errors) = stats::levels_matrix_lenient(
                bundle,
                &corpus.scheme,
                corpus.annotator,
                &filter.kinds,
                &filter.exclude(),
            );
            note_errors(errors, run);
            columns.push((tag.clone(), m));
        }
    }
    if !matches!(corpus.scheme, Scheme::Upos) || !matrices.is_empty() {
        let universe = stats::union_universe(columns.iter().map(|(_, m)| m));
        for (_, m) in columns.iter_mut() {
            *m = stats::with_universe(m, &universe);
        }
    }
    let mut table = stats::levels_table(&columns)?;
    let exclude = filter.exclude();
    table.rows.retain(|r| !exclude.contains(&r.label));
    let mut names = vec!["label"];
    names.extend(table.levels.iter().map(String::as_str));
    let mut out = Table::new("levels", &names);
    out.rows = table
        .rows
        .iter()
        .map(|r| {
            std::iter::once(Cell::Str(r.label.clone()))
                .chain(r.fractions.iter().map(|f| Cell::Float(f.unwrap_or(f64::NAN))))
                .collect()
        })
        .collect();
    Ok(Output { tables: vec![out] })
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn cmd_recall(
    gold: &Path,
    matrices: &[PathBuf],
    names: &[String],
    scheme: &Scheme,
) -> Result<Output, Failure> {
    if !names.is_empty() && names.len() != matrices.len() {
        return Err(Failure::Input(format!(
            "need one --level per --matrix (got {} and {})",
            names.len(),
            matrices.len()
        )));
    }
    let gold_m = read_matrix(gold, scheme)?;
    let mut bounds = Vec::new();
    let mut systems = Vec::new();
    for (i, path) in matrices.iter().enumerate() {
        systems.push(names.get(i).cloned().unwrap_or_else(|| file_stem(path)));
        bounds.push(stats::recall_bound(&read_matrix(path, scheme)?, &gold_m)?);
    }
    let mut columns = vec!["label".to_string(), "gold".to_string()];
    for s in &systems {
        columns.push(s.clone());
        columns.push(format!("{s}_ratio"));
    }
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new("recall", &cols);
    let first = &bounds[0];
    for (i, row) in first.rows.iter().enumerate() {
        let mut cells = vec![Cell::Str(row.label.clone()), Cell::Int(row.gold)];
        for b in &bounds {
            cells.push(Cell::Int(b.rows[i].system));
            cells.push(Cell::Float(b.rows[i].ratio));
        }
        table.rows.push(cells);
    }
    let mut overall = vec![Cell::Str("Overall".into()), Cell::Int(first.gold_total)];
    for b in &bounds {
        overall.push(Cell::Int(b.system_total));
        overall.push(Cell::Float(b.overall));
    }
    table.rows.push(overall);
    Ok(Output {
        tables: vec![table],
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    corpus: &CorpusArgs,
    report: Option<&Path>,
    joint: Option<&Path>,
    matrices: &[PathBuf],
    against: Option<&Scheme>,
    min_count: u64,
    run: &mut Run,
) -> Result<Output, Failure> {
    let mut tables = Vec::new();
    let mut association = None;
    let joint_counts = match (joint, report, corpus.m2.is_empty()) {
        (Some(path), _, _) => Some(stats::read_joint_table(open(path)?)?),
        (None, Some(path), _) => Some(stats::joint_counts(&read_report(path)?)),
        (None, None, false) => {
            let bundle = load_bundle(corpus)?;
            let edits = classify_bundle(&bundle, &corpus.scheme, corpus.annotator, run);
            if let Some(other) = against {
                let (b, _) = classify_corpus_lenient(&bundle, other, corpus.annotator);
                let c = stats::scheme_contingency(&edits, &b);
                association = Some((other.clone(), c.cramers_v()));
            }
            Some(stats::joint_counts(&edits))
        }
        (None, None, true) => None,
    };
    if joint_counts.is_none() && matrices.is_empty() {
        return Err(Failure::Input(
            "compare needs --joint, --report, a corpus or --matrix".into(),
        ));
    }
    if let Some(joint) = joint_counts {
        let o = stats::taxonomy_overlap(&joint, min_count);
        let mut rows = Table::new(
            "taxonomy_overlap",
            &["se_type", "total", "argmax", "max_frac", "top3_frac"],
        );
        rows.rows = o
            .rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Str(r.se_type.clone()),
                    Cell::Int(r.total),
                    Cell::Str(r.argmax.clone()),
                    Cell::Float(r.max_frac),
                    Cell::Float(r.top3_frac),
                ]
            })
            .collect();
        tables.push(rows);
        let mut summary = Table::new("taxonomy_summary", &["statistic", "value"]);
        let opt = |v: Option<f64>| Cell::Float(v.unwrap_or(f64::NAN));
        summary.rows = vec![
            vec![Cell::Str("types".into()), Cell::Int(o.rows.len() as u64)],
            vec![Cell::Str("min_count".into()), Cell::Int(o.min_count)],
            vec![Cell::Str("mean_max_frac".into()), opt(o.mean_max_frac)],
            vec![Cell::Str("mean_top3_frac".into()), opt(o.mean_top3_frac)],
            vec![Cell::Str("weighted_max_frac".into()), opt(o.weighted_max_frac)],
            vec![Cell::Str("weighted_top3_frac".into()), opt(o.weighted_top3_frac)],
        ];
        tables.push(summary);
    }
    if let Some((other, v)) = association {
        let mut t = Table::new("scheme_association", &["scheme_a", "scheme_b", "cramers_v"]);
        t.rows.push(vec![
            Cell::Str(corpus.scheme.to_string()),
            Cell::Str(other.to_string()),
            Cell::Float(v.unwrap_or(f64::NAN)),
        ]);
        tables.push(t);
    }
    if !matrices.is_empty() {
        let loaded: Vec<(String, ConfusionMatrix)> = matrices
            .iter()
            .map(|p| Ok((file_stem(p), read_matrix(p, &corpus.scheme)?)))
            .collect::<Result<_, Failure>>()?;
        let mut t = Table::new(
            "matrix_statistics",
            &["matrix", "total", "se_total", "cramers_v", "entropy_nats", "effective_types"],
        );
        for (name, m) in &loaded {
            let se = off_diagonal(m);
            let entropy = stats::entropy_effective(se.iter().copied()).ok();
            t.rows.push(vec![
                Cell::Str(name.clone()),
                Cell::Int(m.total()),
                Cell::Int(se.iter().sum()),
                Cell::Float(stats::cramers_v(m).unwrap_or(f64::NAN)),
                Cell::Float(entropy.map_or(f64::NAN, |e| e.nats)),
                Cell::Float(entropy.map_or(f64::NAN, |e| e.effective)),
            ]);
        }
        tables.push(t);
        if let [(_, a), (_, b)] = loaded.as_slice() {
            let cmp = stats::compare_distributions(a, b)?;
            let mut t = Table::new(
                "distribution_comparison",
                &["normalization", "pearson", "mean_abs_diff", "types"],
            );
            for (name, c) in [("per_token", cmp.per_token), ("per_se", cmp.per_se)] {
                t.rows.push(vec![
                    Cell::Str(name.into()),
                    Cell::Float(c.r),
                    Cell::Float(c.mean_abs_diff),
                    Cell::Int(c.n as u64),
                ]);
            }
            tables.push(t);
        }
    }
    Ok(Output { tables })
}

/// Counts of every off-diagonal cell, i.e. of each SE type.
fn off_diagonal(m: &ConfusionMatrix) -> Vec<u64> {
    let side = m.axis().len();
    let mut out = Vec::new();
    for i in 0..side {
        for j in 0..side {
            if i != j {
                out.push(m.cell(i, j));
            }
        }
    }
    out
}
