//! Command-line front end. Results go to standard output, diagnostics to
//! standard error. Exit codes: 0 success, 1 usage error, 2 validation or
//! resource-limit error (including a failing `verify`).

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::contraction::{decide, noncomputable_table, Bank, Model};
use crate::enumerate::{count_basis, enumerate_basis, DataMode, EnumerationSpec, KindFilter, DEFAULT_MAX_CLASSES};
use crate::error::{Error, Result};
use crate::eval::{eval_naive_p, eval_p, DenseTensor, GraphData, Scalar, DEFAULT_NAIVE_BUDGET, DEFAULT_ORDER_CAP};
use crate::features::{compute_features, features_to_json, load_dataset, write_features};
use crate::molien::{asymptotic_counts, cycle_index_series, CountKind};
use crate::multigraph::parse_signature;
use crate::par;
use crate::verify;

/// Environment variable overriding the enumeration class ceiling.
pub const MAX_CLASSES_ENV: &str = "EQPOLY_MAX_CLASSES";

#[derive(Parser, Debug)]
#[command(name = "eqpoly", version, about = "Equivariant graph polynomial bases")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Invariant,
    Equivariant,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OracleArg {
    Molien,
    Enumerate,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    General,
    Simple,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum OutputArg {
    Node,
    Edge,
    Both,
    Invariant,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModelArg {
    Node,
    Edge,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Node => Model::Node,
            ModelArg::Edge => Model::Edge,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Basis size per degree, one coefficient per line.
    Count {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Highest degree.
        #[arg(long)]
        order: usize,
        /// Number of graph nodes (default: large enough for the stable count).
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, value_enum, default_value = "molien")]
        oracle: OracleArg,
    },
    /// List basis graphs grouped by degree.
    Enumerate {
        #[arg(long)]
        max_degree: usize,
        #[arg(long, value_enum, default_value = "general")]
        mode: ModeArg,
        #[arg(long, value_enum, default_value = "both")]
        output: OutputArg,
        #[arg(long)]
        connected: bool,
        #[arg(long)]
        max_nodes: Option<usize>,
    },
    /// Whether a contraction model computes a basis element.
    Decide {
        #[arg(long, value_enum)]
        model: ModelArg,
        /// Signature such as "ij,jk,ik->ii".
        #[arg(long)]
        h: String,
        /// Interpret on simple graph data.
        #[arg(long)]
        simple: bool,
    },
    /// Non-computable counts per degree.
    Table {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 3)]
        min_degree: usize,
        #[arg(long)]
        max_degree: usize,
        /// Print rows with their signatures as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a basis polynomial on a graph file.
    Eval {
        #[arg(long)]
        h: String,
        /// JSON file with "n" and either "edges" (simple graph) or "matrix".
        #[arg(long)]
        graph: PathBuf,
        /// Use the brute-force sum instead of a contraction plan.
        #[arg(long)]
        naive: bool,
    },
    /// Evaluate non-computable basis elements on a dataset.
    Features {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        min_degree: usize,
        #[arg(long)]
        max_degree: usize,
        /// JSON-lines dataset.
        #[arg(long)]
        dataset: PathBuf,
        /// Output file (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Keep columns that vanish on the whole dataset.
        #[arg(long)]
        keep_zero: bool,
    },
    /// Run the cross-check suites.
    Verify,
}

fn max_classes() -> Result<usize> {
    match std::env::var(MAX_CLASSES_ENV) {
        Err(_) => Ok(DEFAULT_MAX_CLASSES),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::ResourceLimit(format!("{MAX_CLASSES_ENV}={v} is not a positive integer"))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    n: usize,
    #[serde(default)]
    edges: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    matrix: Option<Vec<Vec<f64>>>,
}

fn load_graph(path: &PathBuf) -> Result<GraphData> {
    let f: GraphFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    match (f.edges, f.matrix) {
        (Some(edges), None) => GraphData::from_edges(f.n, &edges),
        (None, Some(rows)) => {
            if rows.len() != f.n || rows.iter().any(|r| r.len() != f.n) {
                return Err(Error::Dimension(format!("matrix must be {0} x {0}", f.n)));
            }
            GraphData::general(f.n, rows.into_iter().flatten().collect())
        }
        _ => Err(Error::InvalidGraph("graph file needs exactly one of \"edges\" or \"matrix\"".into())),
    }
}

fn tensor_json<T: Scalar + serde::Serialize>(t: &DenseTensor<T>) -> Value {
    match t.order {
        0 => json!(t.data[0]),
        1 => json!(t.data),
        _ => json!(t.data.chunks(t.n.max(1)).collect::<Vec<_>>()),
    }
}

fn format_table(model: Model, rows: &[crate::contraction::TableRow]) -> String {
    let label = match model {
        Model::Node => "F_n",
        Model::Edge => "F_e",
    };
    let cells: Vec<String> = rows.iter().map(|r| format!("{}/{}", r.noncomputable, r.relevant)).collect();
    let width = cells.iter().map(String::len).max().unwrap_or(1).max(2);
    let mut out = format!("{:<6}", "degree");
    for r in rows {
        write!(out, "  {:>width$}", r.degree).unwrap();
    }
    out.push('\n');
    write!(out, "{label:<6}").unwrap();
    for c in &cells {
        write!(out, "  {c:>width$}").unwrap();
    }
    out.push('\n');
    out
}

/// Run a parsed command, returning its standard output and whether it succeeded.
pub fn run(cli: &Cli) -> Result<(String, bool)> {
    let out = match &cli.command {
        Command::Count {
            kind,
            order,
            nodes,
            oracle,
        } => {
            let (ck, filter, d) = match kind {
                KindArg::Invariant => (CountKind::Invariant, KindFilter::Invariant, 0),
                KindArg::Equivariant => (CountKind::Equivariant, KindFilter::Both, 2),
            };
            let counts: Vec<String> = match oracle {
                OracleArg::Molien => {
                    let series = match nodes {
                        Some(n) if *n >= 1 => cycle_index_series(*n, 2, d, *order),
                        Some(_) => return Err(Error::InvalidGraph("--nodes must be at least 1".into())),
                        None => asymptotic_counts(ck, *order),
                    };
                    series.coefficients.iter().map(|c| c.to_string()).collect()
                }
                OracleArg::Enumerate => {
                    let mut spec = EnumerationSpec::new(*order, DataMode::General, filter).with_max_classes(max_classes()?);
                    if let Some(n) = nodes {
                        spec = spec.with_max_nodes(*n);
                    }
                    count_basis(&spec)?.iter().map(|c| c.to_string()).collect()
                }
            };
            counts.iter().map(|c| format!("{c}\n")).collect()
        }
        Command::Enumerate {
            max_degree,
            mode,
            output,
            connected,
            max_nodes,
        } => {
            let mode = match mode {
                ModeArg::General => DataMode::General,
                ModeArg::Simple => DataMode::Simple,
            };
            let filter = match output {
                OutputArg::Node => KindFilter::Node,
                OutputArg::Edge => KindFilter::Edge,
                OutputArg::Both => KindFilter::Both,
                OutputArg::Invariant => KindFilter::Invariant,
            };
            let mut spec = EnumerationSpec::new(*max_degree, mode, filter)
                .connected(*connected)
                .with_max_classes(max_classes()?);
            if let Some(n) = max_nodes {
                spec = spec.with_max_nodes(*n);
            }
            let mut out = String::new();
            for (degree, group) in enumerate_basis(&spec)?.iter().enumerate() {
                writeln!(out, "# degree={degree} count={}", group.len()).unwrap();
                for h in group {
                    writeln!(out, "{h}").unwrap();
                }
            }
            out
        }
        Command::Decide { model, h, simple } => {
            let bank = Bank::for_model((*model).into());
            let parsed = parse_signature(h, *simple)?;
            let graph = if *simple {
                match parsed.simplify_for_simple_data() {
                    None => {
                        let v = json!({"computable": true, "identically_zero": true});
                        return Ok((format!("{v}\n"), true));
                    }
                    Some(g) => g,
                }
            } else {
                parsed
            };
            let verdict = decide(&graph, &bank);
            let mut v = json!({ "computable": verdict.computable });
            if let Some(plan) = &verdict.plan {
                v["plan"] = serde_json::to_value(plan)?;
            }
            if let Some(stuck) = &verdict.stuck {
                v["stuck"] = json!(stuck.to_string());
            }
            format!("{v}\n")
        }
        Command::Table {
            model,
            min_degree,
            max_degree,
            json,
        } => {
            let model: Model = (*model).into();
            let rows = noncomputable_table(model, *min_degree, *max_degree)?;
            if *json {
                format!("{}\n", serde_json::to_string(&rows)?)
            } else {
                format_table(model, &rows)
            }
        }
        Command::Eval { h, graph, naive } => {
            let h = parse_signature(h, false)?;
            let x = load_graph(graph)?;
            let v = if x.is_binary() {
                let t: DenseTensor<i64> = if *naive {
                    eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET)?
                } else {
                    eval_p(&h, &x, DEFAULT_ORDER_CAP)?
                };
                tensor_json(&t)
            } else {
                let t: DenseTensor<f64> = if *naive {
                    eval_naive_p(&h, &x, DEFAULT_NAIVE_BUDGET)?
                } else {
                    eval_p(&h, &x, DEFAULT_ORDER_CAP)?
                };
                tensor_json(&t)
            };
            format!("{v}\n")
        }
        Command::Features {
            model,
            min_degree,
            max_degree,
            dataset,
            out,
            keep_zero,
        } => {
            let ds = load_dataset(dataset)?;
            let table = compute_features(&ds, (*model).into(), *min_degree, *max_degree, !keep_zero)?;
            match out {
                Some(path) => {
                    write_features(&table, path)?;
                    let summary = json!({
                        "graphs": table.graphs.len(),
                        "node_columns": table.columns.node.len(),
                        "edge_columns": table.columns.edge.len(),
                        "out": path.display().to_string(),
                    });
                    format!("{summary}\n")
                }
                None => format!("{}\n", features_to_json(&table)?),
            }
        }
        Command::Verify => {
            let reports = verify::run_all(cli.seed)?;
            let mut out = String::new();
            for r in &reports {
                eprintln!(
                    "{} {} ({} checks, {} failures, {:.2}s)",
                    if r.passed() { "PASS" } else { "FAIL" },
                    r.name,
                    r.checks,
                    r.failures,
                    r.seconds
                );
                for e in &r.examples {
                    eprintln!("  {e}");
                }
                writeln!(out, "{}", serde_json::to_string(r)?).unwrap();
            }
            let ok = reports.iter().all(verify::SuiteReport::passed);
            return Ok((out, ok));
        }
    };
    Ok((out, true))
}

/// Parse `args` (including the program name), run, print, and return the exit code.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let jobs = cli.jobs.map(|j| j as usize);
    match par::with_jobs(jobs, || run(&cli)) {
        Ok((out, ok)) => {
            print!("{out}");
            if ok {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Result<(String, bool)> {
        let cli = Cli::try_parse_from(std::iter::once("eqpoly").chain(args.iter().copied())).unwrap();
        run(&cli)
    }

    #[test]
    fn count_one_per_line() {
        let (out, ok) = run_args(&["count", "--kind", "equivariant", "--order", "4"]).unwrap();
        assert!(ok);
        assert_eq!(out, "2\n15\n117\n877\n6719\n");
        let (out, _) = run_args(&["count", "--kind", "invariant", "--order", "3", "--oracle", "enumerate"]).unwrap();
        assert_eq!(out, "1\n2\n11\n52\n");
    }

    #[test]
    fn decide_examples() {
        let (out, _) = run_args(&["decide", "--model", "node", "--h", "ij,jk,ik->ii", "--simple"]).unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["computable"], json!(false));
        assert!(v.get("plan").is_none());
        let (out, _) = run_args(&["decide", "--model", "node", "--h", "ii,ij->jj", "--simple"]).unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v, json!({"computable": true, "identically_zero": true}));
        let (out, _) = run_args(&["decide", "--model", "edge", "--h", "ij,jk,ik->ii"]).unwrap();
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["computable"], json!(true));
        assert!(v["plan"]["steps"].is_array());
    }

    #[test]
    fn enumerate_headers() {
        let (out, _) = run_args(&["enumerate", "--max-degree", "1", "--output", "invariant"]).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "# degree=0 count=1");
        assert_eq!(lines[2], "# degree=1 count=2");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn table_layout() {
        let (out, _) = run_args(&["table", "--model", "edge", "--max-degree", "5"]).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("degree"));
        let cells: Vec<&str> = lines[1].split_whitespace().collect();
        assert_eq!(cells, ["F_e", "0/18", "0/53", "1/174"]);
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(main_with_args(["eqpoly", "count", "--bogus"]), 1);
        assert_eq!(main_with_args(["eqpoly", "--jobs", "0", "verify"]), 1);
        assert_eq!(main_with_args(["eqpoly", "decide", "--model", "node", "--h", "ij->"]), 0);
    }

    #[test]
    fn validation_errors_exit_two() {
        assert_eq!(main_with_args(["eqpoly", "decide", "--model", "node", "--h", "ij,->"]), 2);
    }

    #[test]
    fn tensor_json_shapes() {
        assert_eq!(tensor_json(&DenseTensor::scalar(3i64)), json!(3));
        let m = DenseTensor { order: 2, n: 2, data: vec![1i64, 2, 3, 4] };
        assert_eq!(tensor_json(&m), json!([[1, 2], [3, 4]]));
    }
}
