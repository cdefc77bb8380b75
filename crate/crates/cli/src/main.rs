//! Command-line front end for CI implication queries.

mod graphfile;
mod problem;
mod report;

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ciapprox::distmodel::{counterexample_row, intersection_counterexample, sweep, JointDistribution, SweepRow};
use ciapprox::graphsep::{d_separates, pairwise_basis, recursive_basis, u_separates};
use ciapprox::shannon::{parse_rational, BoundKind};
use ciapprox::{parse_triple, CiTriple};

use problem::{parse_problem, Mode, ProblemFile};
use report::{set_name, QueryResult};

#[derive(Parser)]
#[command(name = "ciapprox", version, about = "Exact and approximate implication of conditional independence statements")]
struct Cli {
    /// Emit one JSON object per line instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Answer the queries of a problem file in the mode it names.
    Run { file: PathBuf },
    /// Decide exact implication.
    Implies {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: ImpliesMode,
    },
    /// Least lambda with lambda * h(assumptions) >= h(query) on every polymatroid.
    Minlambda { file: PathBuf },
    /// Certify or refute one value of lambda.
    Checklambda {
        file: PathBuf,
        /// Rational such as 3/2; defaults to the file's lambda line.
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Check min lambda against the bound for a family of assumptions.
    VerifyBound {
        file: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// d-separation queries on a DAG file.
    Dsep {
        file: PathBuf,
        #[arg(long)]
        query: Vec<String>,
    },
    /// Separation queries on an undirected graph file.
    Usep {
        file: PathBuf,
        #[arg(long)]
        query: Vec<String>,
    },
    /// Print the recursive basis of a DAG file.
    Basis { file: PathBuf },
    /// Entropy vector of a distribution file.
    Entropy {
        file: PathBuf,
        /// Also print the pairwise saturated statements that hold up to this tolerance.
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Information quantities of the intersection counterexample.
    Counterexample {
        #[arg(long, default_value_t = 0.01)]
        x: f64,
        #[arg(long, default_value_t = 0.01)]
        y: f64,
        /// Emit CSV over x = y at these values instead.
        #[arg(long, num_args = 0.., value_delimiter = ',')]
        sweep: Option<Vec<f64>>,
        /// Print the underlying twelve-bit distribution.
        #[arg(long)]
        dump: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ImpliesMode {
    Positive,
    Shannon,
    Semigraphoid,
    Graphoid,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Saturated,
    Recursive,
    Marginal,
}

const DEFAULT_SWEEP: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
    }
}

fn load_problem(path: &Path) -> Result<ProblemFile> {
    let text = read_input(path)?;
    parse_problem(&text).map_err(|d| anyhow!("{}: {d}", path.display()))
}

struct Output {
    json: bool,
    out: io::StdoutLock<'static>,
}

impl Output {
    fn emit<T: Serialize>(&mut self, value: &T, text: impl FnOnce() -> String) -> Result<()> {
        if self.json {
            writeln!(self.out, "{}", serde_json::to_string(value)?)?;
        } else {
            writeln!(self.out, "{}", text())?;
        }
        Ok(())
    }

    fn results(&mut self, results: &[QueryResult]) -> Result<bool> {
        for r in results {
            self.emit(r, || r.render())?;
        }
        Ok(results.iter().all(|r| r.positive))
    }
}

#[derive(Serialize)]
struct SepResult<'a> {
    query: String,
    answer: &'a str,
    positive: bool,
}

fn separation_queries(extra: &[String], names: &[String], from_file: &[CiTriple]) -> Result<Vec<CiTriple>> {
    let mut qs = from_file.to_vec();
    for q in extra {
        qs.push(parse_triple(q, names).map_err(|e| anyhow!("query {q:?}: {e}"))?);
    }
    if qs.is_empty() {
        bail!("no queries given");
    }
    Ok(qs)
}

fn separations(
    out: &mut Output,
    qs: &[CiTriple],
    names: &[String],
    mut test: impl FnMut(&CiTriple) -> ciapprox::Result<bool>,
) -> Result<bool> {
    let mut all = true;
    for t in qs {
        let sep = test(t)?;
        all &= sep;
        let r = SepResult {
            query: t.display_with(names).to_string(),
            answer: if sep { "separated" } else { "connected" },
            positive: sep,
        };
        out.emit(&r, || format!("{}: {}", r.query, r.answer))?;
    }
    Ok(all)
}

fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("x,y,i_ab,i_ab_c,i_ac_b,i_a_bc,ratio");
    for r in rows {
        s.push_str(&format!("\n{},{},{},{},{},{},{}", r.x, r.y, r.i_ab, r.i_ab_c, r.i_ac_b, r.i_a_bc, r.ratio));
    }
    s
}

/// Returns whether every answer was positive.
fn execute(cli: Cli) -> Result<bool> {
    let mut out = Output { json: cli.json, out: io::stdout().lock() };
    match cli.command {
        Command::Run { file } => {
            let p = load_problem(&file)?;
            let mode = p.mode.ok_or_else(|| anyhow!("{}: missing mode line", file.display()))?;
            out.results(&report::run(&p, mode)?)
        }
        Command::Implies { file, mode } => {
            let mode = match mode {
                ImpliesMode::Positive => Mode::Positive,
                ImpliesMode::Shannon => Mode::Shannon,
                ImpliesMode::Semigraphoid => Mode::SemiGraphoid,
                ImpliesMode::Graphoid => Mode::Graphoid,
            };
            out.results(&report::run(&load_problem(&file)?, mode)?)
        }
        Command::Minlambda { file } => out.results(&report::run(&load_problem(&file)?, Mode::MinLambda)?),
        Command::Checklambda { file, lambda } => {
            let mut p = load_problem(&file)?;
            if let Some(l) = lambda {
                p.params.lambda = Some(parse_rational(&l)?);
            }
            out.results(&report::run(&p, Mode::CheckLambda)?)
        }
        Command::VerifyBound { file, kind } => {
            let kind = match kind {
                KindArg::Saturated => BoundKind::Saturated,
                KindArg::Recursive => BoundKind::Recursive,
                KindArg::Marginal => BoundKind::Marginal,
            };
            out.results(&report::run_bound(&load_problem(&file)?, kind)?)
        }
        Command::Dsep { file, query } => {
            let g = graphfile::parse_dag(&read_input(&file)?).map_err(|d| anyhow!("{}: {d}", file.display()))?;
            let qs = separation_queries(&query, &g.vars, &g.query)?;
            separations(&mut out, &qs, &g.vars, |t| d_separates(&g.graph, t.x(), t.y(), t.z()))
        }
        Command::Usep { file, query } => {
            let g = graphfile::parse_ugraph(&read_input(&file)?).map_err(|d| anyhow!("{}: {d}", file.display()))?;
            let qs = separation_queries(&query, &g.vars, &g.query)?;
            separations(&mut out, &qs, &g.vars, |t| u_separates(&g.graph, t.x(), t.y(), t.z()))
        }
        Command::Basis { file } => {
            let g = graphfile::parse_dag(&read_input(&file)?).map_err(|d| anyhow!("{}: {d}", file.display()))?;
            let basis: Vec<String> =
                recursive_basis(&g.graph).iter().map(|t| t.display_with(&g.vars).to_string()).collect();
            out.emit(&basis, || basis.join("\n"))?;
            Ok(true)
        }
        Command::Entropy { file, eps } => {
            let d = JointDistribution::parse(&read_input(&file)?)?;
            let h = d.entropy_vector()?;
            let names = d.names();
            let values: Vec<report::Value> = (1u32..1 << names.len())
                .map(ciapprox::VarSet::from_bits)
                .map(|s| report::Value { set: set_name(s, names), h: h.get(s).expect("in range").to_string() })
                .collect();
            out.emit(&values, || values.iter().map(|v| format!("h({}) = {}", v.set, v.h)).collect::<Vec<_>>().join("\n"))?;
            if let Some(eps) = eps {
                let pairs: Vec<String> =
                    pairwise_basis(&h, &eps)?.iter().map(|t| t.display_with(names).to_string()).collect();
                out.emit(&pairs, || pairs.join("\n"))?;
            }
            Ok(true)
        }
        Command::Counterexample { x, y, sweep: points, dump } => {
            if dump {
                let g = intersection_counterexample(x, y)?;
                write!(out.out, "{}", g.base().dump())?;
                return Ok(true);
            }
            match points {
                Some(points) => {
                    let points = if points.is_empty() { DEFAULT_SWEEP.to_vec() } else { points };
                    let rows = sweep(&points.iter().map(|&v| (v, v)).collect::<Vec<_>>())?;
                    if out.json {
                        for r in &rows {
                            out.emit(r, String::new)?;
                        }
                    } else {
                        writeln!(out.out, "{}", sweep_csv(&rows))?;
                    }
                }
                None => {
                    let r = counterexample_row(x, y)?;
                    out.emit(&r, || {
                        format!(
                            "I(A;B) = {}\nI(A;B|C) = {}\nI(A;C|B) = {}\nI(A;BC) = {}\nratio = {}",
                            r.i_ab, r.i_ab_c, r.i_ac_b, r.i_a_bc, r.ratio
                        )
                    })?;
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
