//! `locality`: generators, checkers and experiments for finite structures.
//!
//! Exit codes: 0 success / equivalent / pass / true, 1 distinguished /
//! inconclusive / false / invalid, 2 usage, I/O or parse error, 3 search
//! budget exhausted.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use locality::ball_types::census;
use locality::ef::{play, GameConfig};
use locality::families::{
    cycle, dipath, disjoint_copies, double_path_gadget, k5_subdivision, linear_order, planar_pair, split_cycle,
    ColoredCycle, Family,
};
use locality::format::{parse_structure, parse_unpointed, write_structure};
use locality::hanf::{hanf_pair_check, hanf_sequence_check, threshold_experiment, SequenceConfig, SeriesClass};
use locality::logic::{evaluate, is_local, parse_formula, Assignment, Var};
use locality::{census_compare, components, Error, FiniteStructure, PointedStructure};

use report::{render, Format, Report, Table};

#[derive(Parser)]
#[command(
    name = "locality",
    version,
    about = "Locality toolkit for finite relational structures"
)]
struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Maximum game positions per EF search.
    #[arg(long, global = true, default_value_t = GameConfig::default().budget, value_parser = clap::value_parser!(u64).range(1..))]
    budget: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated structure file.
    Gen {
        #[command(subcommand)]
        family: Generator,
        /// Output path; stdout when absent.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Check a structure file.
    Validate { file: PathBuf },
    /// Evaluate a formula on a structure.
    Eval {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        formula: String,
        /// Variable binding `name=element`; repeatable.
        #[arg(long = "assign", value_parser = parse_binding)]
        assign: Vec<(String, usize)>,
    },
    /// Play the Ehrenfeucht–Fraïssé game from the files' points.
    Ef {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        m: usize,
        /// Re-evaluate the extracted sentence on both structures.
        #[arg(long)]
        sentence: bool,
    },
    /// Ball-type census at radius `m`.
    Census {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Hanf's condition for a pair at rank `m`.
    HanfPair {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        m: usize,
    },
    /// Prefix evidence that a family is a Hanf sequence.
    HanfSeq {
        #[arg(long)]
        family: String,
        #[arg(long = "max-m")]
        max_m: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 5)]
        window: usize,
        /// Defaults to three times the window.
        #[arg(long = "growth-threshold")]
        growth_threshold: Option<usize>,
    },
    /// Partition a family prefix into m-equivalence classes.
    Threshold {
        #[arg(long)]
        family: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        horizon: usize,
    },
    /// Check a one-variable formula against its ball relativization on a corpus.
    LocalCheck {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        l: usize,
        #[arg(long, required = true, num_args = 1..)]
        corpus: Vec<PathBuf>,
    },
    /// Split a coloured cycle into two cycles with the same n-ball census.
    Split {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Colours as integers below 2^k, repeated around the cycle.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        pattern: Vec<u32>,
        /// Also write the split structure here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Generator {
    /// Directed path on `n` vertices.
    Dipath { n: usize },
    /// Strict linear order on `n` elements.
    Order { n: usize },
    /// Undirected cycle on `n` vertices.
    Cycle { n: usize },
    /// Coloured cycle with `k` unary predicates.
    Ccycle {
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        pattern: Vec<u32>,
    },
    /// `k` disjoint copies of a structure file.
    Copies { file: PathBuf, k: usize },
    /// K5 with `n` new vertices on every edge.
    K5sub { n: usize },
    /// Two `n`-vertex paths closed through a shared center.
    Gadget { n: usize },
    /// One side of the planar pair: `a` is `k5sub n`, `b` is five gadgets.
    Planarpair {
        n: usize,
        #[arg(long, value_enum)]
        side: Side,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    A,
    B,
}

fn parse_binding(text: &str) -> Result<(String, usize), String> {
    let (name, value) = text.split_once('=').ok_or("expected name=element")?;
    let value = value.parse().map_err(|e| format!("bad element: {e}"))?;
    Ok((name.to_string(), value))
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Outcome<()> {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Outcome<PointedStructure> {
    Ok(parse_structure(&read(path)?)?)
}

fn load_plain(path: &Path) -> Outcome<FiniteStructure> {
    Ok(parse_unpointed(&read(path)?)?)
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let config = GameConfig { budget: cli.budget };
    match run(cli.command, &config) {
        Ok(Some(report)) => {
            print!("{}", render(&report, cli.format));
            ExitCode::from(report.exit)
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Failure::Core(e @ Error::BudgetExhausted { .. })) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command, game: &GameConfig) -> Outcome<Option<Report>> {
    Ok(Some(match command {
        Command::Gen { family, out } => {
            let s = generate(family)?;
            let text = write_structure(&s.unpointed()) + "\n";
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            return Ok(None);
        }
        Command::Validate { file } => validate(&file)?,
        Command::Eval {
            structure,
            formula,
            assign,
        } => {
            let p = load(&structure)?;
            let f = parse_formula(&formula)?;
            let assignment: Assignment = assign.iter().map(|(v, e)| (Var::new(v.clone()), *e)).collect();
            let value = evaluate(&p.structure, &f, &assignment)?;
            Report {
                command: "eval",
                config: json!({"structure": path_str(&structure), "formula": formula, "assign": assign}),
                result: json!({"value": value, "quantifier_rank": f.quantifier_rank()}),
                table: Table::pairs([
                    ("value", value.to_string()),
                    ("quantifier_rank", f.quantifier_rank().to_string()),
                ]),
                exit: if value { 0 } else { 1 },
            }
        }
        Command::Ef { a, b, m, sentence } => {
            let (pa, pb) = (load(&a)?, load(&b)?);
            let verdict = play(&pa, &pb, m, game, true)?;
            let text = verdict.distinguishing_sentence.as_ref().map(|f| f.to_string());
            let mut result = json!({
                "duplicator_wins": verdict.duplicator_wins,
                "rounds": verdict.rounds,
                "positions": verdict.positions,
                "sentence": text,
                "sentence_rank": verdict.distinguishing_sentence.as_ref().map(|f| f.quantifier_rank()),
            });
            let mut table = Table::pairs([
                ("duplicator_wins", verdict.duplicator_wins.to_string()),
                ("rounds", m.to_string()),
                ("positions", verdict.positions.to_string()),
                ("sentence", text.clone().unwrap_or_default()),
            ]);
            if let (true, Some(f)) = (sentence, &verdict.distinguishing_sentence) {
                let at = |p: &PointedStructure| -> Outcome<bool> {
                    let assignment = p
                        .points
                        .iter()
                        .enumerate()
                        .map(|(i, &e)| (Var::new(format!("x{i}")), e))
                        .collect();
                    Ok(evaluate(&p.structure, f, &assignment)?)
                };
                let (on_a, on_b) = (at(&pa)?, at(&pb)?);
                result["sentence_on_a"] = json!(on_a);
                result["sentence_on_b"] = json!(on_b);
                table.push(vec!["sentence_on_a".into(), on_a.to_string()]);
                table.push(vec!["sentence_on_b".into(), on_b.to_string()]);
            }
            Report {
                command: "ef",
                config: json!({"a": path_str(&a), "b": path_str(&b), "m": m, "sentence": sentence, "budget": game.budget}),
                result,
                table,
                exit: if verdict.duplicator_wins { 0 } else { 1 },
            }
        }
        Command::Census { structure, m } => {
            let s = load_plain(&structure)?;
            let c = census(&s, m);
            let mut table = Table::new(&["code", "radius", "count"]);
            let rows: Vec<Value> = c
                .counts
                .iter()
                .map(|(code, &count)| {
                    table.push(vec![code.to_hex(), m.to_string(), count.to_string()]);
                    json!({"code": code, "count": count, "representative": c.representatives[code]})
                })
                .collect();
            Report {
                command: "census",
                config: json!({"structure": path_str(&structure), "m": m}),
                result: json!({"radius": m, "total": c.total(), "types": rows}),
                table,
                exit: 0,
            }
        }
        Command::HanfPair { a, b, m } => {
            let (sa, sb) = (load_plain(&a)?, load_plain(&b)?);
            let cert = hanf_pair_check(&sa, &sb, m)?;
            let mut table = Table::new(&["code", "left", "right"]);
            for r in &cert.rows {
                table.push(vec![r.code.to_hex(), r.left.to_string(), r.right.to_string()]);
            }
            table.push(vec!["# e".into(), cert.e.to_string(), String::new()]);
            table.push(vec![
                "# verdict".into(),
                if cert.passed() { "pass" } else { "inconclusive" }.into(),
                String::new(),
            ]);
            Report {
                command: "hanf-pair",
                config: json!({"a": path_str(&a), "b": path_str(&b), "m": m}),
                result: serde_json::to_value(&cert).expect("certificate serializes"),
                table,
                exit: if cert.passed() { 0 } else { 1 },
            }
        }
        Command::HanfSeq {
            family,
            max_m,
            horizon,
            window,
            growth_threshold,
        } => {
            let fam = Family::by_name(&family)?;
            let cfg = SequenceConfig {
                max_m,
                horizon,
                window,
                growth_threshold,
            };
            let report = hanf_sequence_check(&fam, &cfg)?;
            let mut table = Table::new(&["m", "code", "class", "counts"]);
            for e in &report.entries {
                let class = match e.class {
                    SeriesClass::Stabilized(c) => format!("stabilized({c})"),
                    SeriesClass::Growing => "growing".into(),
                    SeriesClass::Undecided => "undecided".into(),
                };
                let counts = e.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
                table.push(vec![e.m.to_string(), e.code.to_hex(), class, counts]);
            }
            let ok = report.undecided().next().is_none() && report.degree_bound_settled();
            Report {
                command: "hanf-seq",
                config: json!({"family": family, "max_m": max_m, "horizon": horizon, "window": window,
                               "growth_threshold": report.growth_threshold}),
                result: serde_json::to_value(&report).expect("report serializes"),
                table,
                exit: if ok { 0 } else { 1 },
            }
        }
        Command::Threshold { family, m, horizon } => {
            let fam = Family::by_name(&family)?;
            let report = threshold_experiment(&fam, m, horizon, game)?;
            let mut table = Table::new(&["index", "class"]);
            let mut class_of = vec![0; horizon];
            for (c, members) in report.classes.iter().enumerate() {
                members.iter().for_each(|&i| class_of[i - 1] = c);
            }
            for (i, c) in class_of.iter().enumerate() {
                table.push(vec![(i + 1).to_string(), c.to_string()]);
            }
            table.push(vec![
                "# n_emp".into(),
                report.n_emp.map_or("none".into(), |n| n.to_string()),
            ]);
            Report {
                command: "threshold",
                config: json!({"family": family, "m": m, "horizon": horizon, "budget": game.budget}),
                result: serde_json::to_value(&report).expect("report serializes"),
                table,
                exit: if report.n_emp.is_some() { 0 } else { 1 },
            }
        }
        Command::LocalCheck { formula, l, corpus } => {
            let f = parse_formula(&formula)?;
            let structures = corpus.iter().map(|p| load_plain(p)).collect::<Outcome<Vec<_>>>()?;
            let verdict = is_local(&f, l, &structures)?;
            let mut pairs = vec![("is_local", verdict.is_local.to_string())];
            if let Some(w) = &verdict.witness {
                pairs.push(("witness_file", path_str(&corpus[w.structure])));
                pairs.push(("witness_element", w.element.to_string()));
            }
            Report {
                command: "local-check",
                config: json!({"formula": formula, "l": l, "corpus": corpus.iter().map(|p| path_str(p)).collect::<Vec<_>>()}),
                result: serde_json::to_value(&verdict).expect("verdict serializes"),
                table: Table::pairs(pairs),
                exit: if verdict.is_local { 0 } else { 1 },
            }
        }
        Command::Split {
            length,
            n,
            k,
            pattern,
            out,
        } => {
            let c = ColoredCycle::from_pattern(length, k, &pattern)?;
            let split = split_cycle(&c, n)?;
            let original = c.structure();
            let parts = components(&split.structure).len();
            let mut table = Table::new(&["radius", "identical"]);
            let mut radii = Vec::new();
            let mut identical = true;
            for r in 0..=n {
                let cmp = census_compare(&original, &split.structure, r)?;
                identical &= cmp.identical();
                table.push(vec![r.to_string(), cmp.identical().to_string()]);
                radii.push(json!({"radius": r, "identical": cmp.identical(), "rows": cmp.rows}));
            }
            if let Some(path) = &out {
                write(path, &(write_structure(&split.structure.clone().unpointed()) + "\n"))?;
            }
            Report {
                command: "split",
                config: json!({"length": length, "n": n, "k": k, "pattern": pattern,
                               "out": out.as_deref().map(path_str)}),
                result: json!({"a": split.a, "b": split.b, "components": parts, "censuses": radii}),
                table,
                exit: if parts == 2 && identical { 0 } else { 1 },
            }
        }
    }))
}

fn generate(family: Generator) -> Outcome<FiniteStructure> {
    Ok(match family {
        Generator::Dipath { n } => dipath(n)?,
        Generator::Order { n } => linear_order(n)?,
        Generator::Cycle { n } => cycle(n)?,
        Generator::Ccycle { n, k, pattern } => ColoredCycle::from_pattern(n, k, &pattern)?.structure(),
        Generator::Copies { file, k } => disjoint_copies(&load_plain(&file)?, k)?,
        Generator::K5sub { n } => k5_subdivision(n),
        Generator::Gadget { n } => double_path_gadget(n)?,
        Generator::Planarpair { n, side } => {
            let (a, b) = planar_pair(n)?;
            match side {
                Side::A => a,
                Side::B => b,
            }
        }
    })
}

fn validate(file: &Path) -> Outcome<Report> {
    let config = json!({"file": path_str(file)});
    let text = read(file)?;
    let (valid, problem) = match parse_structure(&text) {
        Ok(_) => (true, None),
        Err(e @ (Error::InvalidStructure(_) | Error::UnknownRelation(_))) => (false, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let mut pairs = vec![("valid", valid.to_string())];
    if let Some(p) = &problem {
        pairs.push(("problem", p.clone()));
    }
    Ok(Report {
        command: "validate",
        config,
        result: json!({"valid": valid, "problem": problem}),
        table: Table::pairs(pairs),
        exit: if valid { 0 } else { 1 },
    })
}
