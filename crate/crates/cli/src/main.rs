use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use toeplab::compgraph::{self, SimpleGraph};
use toeplab::spectra::{self, residue_block_matrix, residue_classes};
use toeplab::verify::{self, VerifyOptions};
use toeplab::walks::{self, format_offsets, Stabilization};
use toeplab::{goldens, Execution, ToeplitzSpec, Walk};

/// Boolean Toeplitz matrices T_n<S;T>: powers, periods, competition graphs and walks.
///
/// A SPEC is a literal such as `T8<1,4;2,5>` or a path to a JSON file of the
/// form {"n": 8, "S": [1, 4], "T": [2, 5]}.
///
/// Exit codes: 0 success, 1 violation or golden mismatch, 2 usage error,
/// 3 invalid spec, 4 format not available for the subcommand, 5 computation error.
#[derive(Parser, Debug)]
#[command(name = "toeplab", version, about, long_about)]
struct Cli {
    /// Output format.
    #[arg(long, short, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Args, Debug)]
struct SpecArg {
    /// Spec literal or JSON file path.
    spec: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// The matrix (text, JSON) or its digraph (DOT: solid s-arcs, dashed t-arcs).
    Build(SpecArg),
    /// A^m.
    Power {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, short)]
        m: u64,
    },
    /// Measured matrix index and period against the predicted d/d'.
    Period(SpecArg),
    /// Competition index, period, limit of A^m (A^T)^m and the residue block check.
    Competition(SpecArg),
    /// The m-step competition graph C^m(D).
    Graph {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, short, default_value_t = 1)]
        m: u64,
    },
    /// Offset sets P_i, Q_i, R_i, or the index from which they coincide.
    Psets {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, short, required_unless_present = "stabilize")]
        i: Option<usize>,
        #[arg(long, conflicts_with = "i")]
        stabilize: bool,
        /// Largest i scanned; defaults to the power index plus two periods.
        #[arg(long, requires = "stabilize")]
        horizon: Option<usize>,
    },
    /// Walk with prescribed numbers of s_i-arcs and t_j-arcs for i, j >= 2.
    Walk {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        start: usize,
        /// Counts of s_2, ..., s_k1 arcs.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        s_counts: Vec<usize>,
        /// Counts of t_2, ..., t_k2 arcs.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        t_counts: Vec<usize>,
        /// Also fix the numbers of s_1 and t_1 arcs.
        #[arg(long, requires_all = ["s1_count", "t1_count"])]
        exact: bool,
        #[arg(long, requires = "exact")]
        s1_count: Option<usize>,
        #[arg(long, requires = "exact")]
        t1_count: Option<usize>,
    },
    /// Competition-index upper bound, its hypothesis and the measured index.
    Bound(SpecArg),
    /// Check every theorem predicate on all instances up to a size.
    Verify {
        #[arg(long)]
        nmax: usize,
        /// Include instances that violate the conditions.
        #[arg(long)]
        all: bool,
        /// Worker threads.
        #[arg(long, env = "TOEPLAB_JOBS")]
        jobs: Option<usize>,
        /// Run on the calling thread only.
        #[arg(long)]
        sequential: bool,
        /// Matrix products allowed per instance while finding the power cycle.
        #[arg(long, default_value_t = spectra::DEFAULT_BUDGET)]
        budget: usize,
    },
    /// Recompute the worked examples and compare against embedded outputs.
    Examples,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

const VIOLATION: u8 = 1;
const INVALID_SPEC: u8 = 3;
const BAD_FORMAT: u8 = 4;
const COMPUTATION: u8 = 5;

type Outcome = Result<(String, u8), Failure>;

fn computation(e: toeplab::Error) -> Failure {
    Failure::new(COMPUTATION, e.to_string())
}

fn load_spec(arg: &SpecArg) -> Result<ToeplitzSpec, Failure> {
    let path = Path::new(&arg.spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::new(INVALID_SPEC, format!("{}: {e}", path.display())))?;
        return serde_json::from_str(&text)
            .map_err(|e| Failure::new(INVALID_SPEC, format!("{}: {e}", path.display())));
    }
    arg.spec
        .parse()
        .map_err(|e: toeplab::Error| Failure::new(INVALID_SPEC, e.to_string()))
}

fn allow(format: Format, allowed: &[Format], command: &str) -> Result<(), Failure> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(Failure::new(
            BAD_FORMAT,
            format!("{command} has no {format:?} output").to_lowercase(),
        ))
    }
}

fn json_line(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

fn ok(out: String) -> Outcome {
    Ok((out, 0))
}

fn run(cli: Cli) -> Outcome {
    use Format::*;
    let format = cli.format;
    match cli.command {
        Command::Build(arg) => {
            let spec = load_spec(&arg)?;
            let a = spec.build_matrix();
            ok(match format {
                Text => a.to_text(),
                Json => json_line(&json!({
                    "spec": spec,
                    "cond1": spec.cond1(),
                    "cond2": spec.cond2(),
                    "matrix": a,
                })),
                Dot => compgraph::digraph_dot(&spec),
            })
        }
        Command::Power { spec, m } => {
            allow(format, &[Text, Json], "power")?;
            let a = load_spec(&spec)?.build_matrix().power(m);
            ok(if format == Json {
                json_line(&a)
            } else {
                a.to_text()
            })
        }
        Command::Period(arg) => {
            allow(format, &[Text, Json], "period")?;
            let spec = load_spec(&arg)?;
            let tail = spectra::power_tail(&spec.build_matrix()).map_err(computation)?;
            let (d, dp) = (spec.gcd_sum(), spec.d_prime());
            ok(if format == Json {
                json_line(&json!({
                    "spec": spec,
                    "index": tail.index,
                    "period": tail.period,
                    "predicted": spec.predicted_period(),
                    "d": d,
                    "d_prime": dp,
                    "conditions": spec.conditions_hold(),
                }))
            } else {
                format!(
                    "period={} predicted={} (d={d}, d'={dp})\n",
                    tail.period,
                    spec.predicted_period()
                )
            })
        }
        Command::Competition(arg) => {
            allow(format, &[Text, Json], "competition")?;
            let spec = load_spec(&arg)?;
            competition(&spec, format)
        }
        Command::Graph { spec, m } => {
            let spec = load_spec(&spec)?;
            let g = compgraph::m_step_graph(&spec.build_matrix(), m).map_err(computation)?;
            ok(match format {
                Text => edge_list(&g),
                Json => json_line(&g),
                Dot => g.to_dot(&format!("C^{m}({spec})")),
            })
        }
        Command::Psets {
            spec,
            i,
            stabilize,
            horizon,
        } => {
            allow(format, &[Text, Json], "psets")?;
            let spec = load_spec(&spec)?;
            if stabilize {
                stabilization(&spec, horizon, format)
            } else {
                let i = i.expect("clap enforces --i");
                if i == 0 {
                    return Err(Failure::new(2, "--i must be at least 1"));
                }
                let s = walks::step_sets(&spec, i);
                ok(match format {
                    Json => json_line(&s),
                    _ if s.all_equal() => format!("i={i} P=Q=R={}\n", format_offsets(&s.p)),
                    _ => format!(
                        "i={i} P={} Q={} R={}\n",
                        format_offsets(&s.p),
                        format_offsets(&s.q),
                        format_offsets(&s.r)
                    ),
                })
            }
        }
        Command::Walk {
            spec,
            start,
            s_counts,
            t_counts,
            exact,
            s1_count,
            t1_count,
        } => {
            allow(format, &[Text, Json], "walk")?;
            let spec = load_spec(&spec)?;
            let walk = if exact {
                walks::extend_walk_exact(
                    &spec,
                    start,
                    s1_count.unwrap_or(0),
                    t1_count.unwrap_or(0),
                    &s_counts,
                    &t_counts,
                )
            } else {
                walks::build_walk_with_counts(&spec, start, &s_counts, &t_counts)
            }
            .map_err(computation)?;
            ok(if format == Json {
                json_line(&walk)
            } else {
                render_walk(&spec, &walk)
            })
        }
        Command::Bound(arg) => {
            allow(format, &[Text, Json], "bound")?;
            let spec = load_spec(&arg)?;
            let bound = walks::competition_index_bound(&spec);
            let readings = walks::bound_hypothesis_readings(&spec);
            let comp = spectra::competition_tail(&spec.build_matrix()).map_err(computation)?;
            let applies = spec.conditions_hold() && readings.vacuous;
            let holds = (comp.index as u64) <= bound;
            ok(if format == Json {
                json_line(&json!({
                    "spec": spec,
                    "bound": bound,
                    "conditions": spec.conditions_hold(),
                    "hypothesis": readings.vacuous,
                    "hypothesis_strict": readings.strict,
                    "competition_index": comp.index,
                    "holds": holds,
                }))
            } else {
                format!(
                    "bound={bound} competition_index={} conditions={} hypothesis={} (strict={}) {}\n",
                    comp.index,
                    spec.conditions_hold(),
                    readings.vacuous,
                    readings.strict,
                    match (applies, holds) {
                        (false, _) => "not applicable",
                        (true, true) => "holds",
                        (true, false) => "VIOLATED",
                    }
                )
            })
            .map(|(out, _)| (out, if applies && !holds { VIOLATION } else { 0 }))
        }
        Command::Verify {
            nmax,
            all,
            jobs,
            sequential,
            budget,
        } => {
            allow(format, &[Text, Json], "verify")?;
            if !(2..64).contains(&nmax) {
                return Err(Failure::new(2, "--nmax must be in 2..=63"));
            }
            let opts = VerifyOptions {
                budget,
                execution: if sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
                jobs,
            };
            let (out, summary) = if format == Json {
                let reports = verify::sweep_reports(nmax, !all, &opts);
                let out: String = reports.iter().map(json_line).collect();
                (out, verify::summarize(&reports))
            } else {
                let summary = verify::sweep(nmax, !all, &opts);
                (summary.render_table(), summary)
            };
            Ok((out, if summary.is_clean() { 0 } else { VIOLATION }))
        }
        Command::Examples => {
            allow(format, &[Text, Json], "examples")?;
            let results = goldens::run_all();
            let clean = results.iter().all(|g| g.matches());
            let out = if format == Json {
                json_line(&results)
            } else {
                let mut out = String::new();
                for g in &results {
                    if g.matches() {
                        out.push_str(&format!("ok       {}\n", g.name));
                    } else {
                        out.push_str(&format!(
                            "MISMATCH {}\n--- expected\n{}\n--- actual\n{}\n",
                            g.name, g.expected, g.actual
                        ));
                    }
                }
                let matched = results.iter().filter(|g| g.matches()).count();
                out.push_str(&format!("{matched}/{} examples match\n", results.len()));
                out
            };
            Ok((out, if clean { 0 } else { VIOLATION }))
        }
    }
}

fn competition(spec: &ToeplitzSpec, format: Format) -> Outcome {
    let a = spec.build_matrix();
    let seq = spectra::power_sequence(&a, spectra::DEFAULT_BUDGET).map_err(computation)?;
    let tail = spectra::competition_tail_from(&seq);
    let d = spec.gcd_sum() as usize;
    let limit = spectra::limit_of(&tail).ok();
    let block_check = match (&limit, residue_block_matrix(spec.n(), d)) {
        (Some(l), Ok(blocks)) => Some(*l == blocks.expected),
        _ => None,
    };
    let cliques = compgraph::limit_graph_from(&seq)
        .ok()
        .filter(|(g, _)| g.is_clique_union())
        .map(|(g, _)| g.components());
    let classes: Vec<Vec<usize>> = residue_classes(spec.n(), d)
        .into_iter()
        .filter(|c| !c.is_empty())
        .collect();
    if format == Format::Json {
        return ok(json_line(&json!({
            "spec": spec,
            "index": tail.index,
            "period": tail.period,
            "limit": limit,
            "block_check": block_check,
            "cliques": cliques,
            "residue_classes": classes,
        })));
    }
    let mut out = format!("index={} period={}\n", tail.index, tail.period);
    match &limit {
        Some(l) => out.push_str(&format!("limit\n{l}")),
        None => out.push_str("limit: none (period > 1)\n"),
    }
    out.push_str(&format!(
        "block_check={}\n",
        match block_check {
            Some(true) => "matches",
            Some(false) => "differs",
            None => "unavailable",
        }
    ));
    let show = |cs: &[Vec<usize>]| {
        cs.iter()
            .map(|c| {
                format!(
                    "{{{}}}",
                    c.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    out.push_str(&format!("residue_classes={}\n", show(&classes)));
    match cliques {
        Some(cs) => out.push_str(&format!("limit_cliques={}\n", show(&cs))),
        None => out.push_str("limit_cliques=none\n"),
    }
    ok(out)
}

fn stabilization(spec: &ToeplitzSpec, horizon: Option<usize>, format: Format) -> Outcome {
    let seq = spectra::power_sequence(&spec.build_matrix(), spectra::DEFAULT_BUDGET)
        .map_err(computation)?;
    let horizon =
        horizon.unwrap_or(seq.tail.index + 2 * seq.tail.period * spec.predicted_period() as usize);
    let sets = walks::scan_step_sets(spec, &seq, horizon);
    let result = walks::stabilization_from(spec, &seq, &sets);
    if format == Format::Json {
        return ok(json_line(&result));
    }
    ok(match result {
        Stabilization::Certified { m } => format!("certified m={m} (horizon {horizon})\n"),
        Stabilization::Never => format!("never: sets differ in every period (horizon {horizon})\n"),
        Stabilization::Uncertified { horizon, needed } => {
            format!("uncertified: horizon {horizon} below the {needed} needed\n")
        }
    })
}

fn edge_list(g: &SimpleGraph) -> String {
    let mut out = format!("n={} edges={}\n", g.n(), g.edges().len());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

fn render_walk(spec: &ToeplitzSpec, walk: &Walk) -> String {
    let path: Vec<String> = walk.vertices.iter().map(usize::to_string).collect();
    let mut out = format!("{}\nlength={}\n", path.join(" -> "), walk.len());
    for (k, &s) in spec.s().iter().enumerate() {
        out.push_str(&format!(
            "s_{}={s}: {}\n",
            k + 1,
            walk.count(toeplab::ArcKind::S, k + 1)
        ));
    }
    for (k, &t) in spec.t().iter().enumerate() {
        out.push_str(&format!(
            "t_{}={t}: {}\n",
            k + 1,
            walk.count(toeplab::ArcKind::T, k + 1)
        ));
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).is_err() {
                return ExitCode::from(COMPUTATION);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("toeplab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
