use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use prefsynth::acceptance::CountingFunction;
use prefsynth::dataword::{evaluate, DataWord};
use prefsynth::efgames::{fo_equiv_pointed, preffo_equiv_words_with, EfBudget};
use prefsynth::synth::cutoffs::{cutoffs, CutoffOptions};
use prefsynth::synth::playout::{interactive_play, parse_script, playout, seeded_script, Playout};
use prefsynth::synth::{depth_for, prepare, search_with_jobs, Options, Prepared, SearchRegion};
use prefsynth::tokengame::{solve_descent, Strategy};
use prefsynth::typespace::{TypeBudget, TypeSpace};
use prefsynth::{parse_formula_file, Alphabet, Error, Formula, LetterId, Player};

/// Synthesis for prefix first-order specifications over data words.
#[derive(Parser)]
#[command(name = "prefsynth", version)]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Per-player type orders.
    Types(TypesArgs),
    /// Counting functions accepted by a formula.
    Acc(AccArgs),
    /// Equivalence of two words by game search.
    Ef(EfArgs),
    /// Solve the token game for fixed process counts.
    Solve(SolveArgs),
    /// Search process counts for a System win.
    Search(SearchArgs),
    /// Cutoff bounds on the number of processes.
    Cutoffs(CutoffArgs),
    /// Replay a strategy on data words.
    Play(PlayArgs),
    /// Evaluate a formula on a data word.
    Check(CheckArgs),
}

#[derive(Args)]
struct FormulaArgs {
    /// Formula file with `sys:` and `env:` lines.
    #[arg(long)]
    formula: PathBuf,
    /// Type depth; defaults to the quantifier depth.
    #[arg(long)]
    k: Option<usize>,
    /// Work on type orders that are not trees.
    #[arg(long)]
    allow_dag: bool,
}

impl FormulaArgs {
    fn load(&self) -> anyhow::Result<(Formula, usize)> {
        let f = load_formula(&self.formula)?;
        let k = self.k.unwrap_or_else(|| depth_for(&f));
        Ok((f, k))
    }

    fn options(&self) -> Options {
        Options {
            allow_dag: self.allow_dag,
            ..Options::default()
        }
    }

    fn prepare(&self) -> anyhow::Result<Prepared> {
        let (f, k) = self.load()?;
        Ok(prepare(&f, k, &self.options())?)
    }
}

#[derive(Args)]
struct TypesArgs {
    /// Take the alphabet from a formula file.
    #[arg(long, conflicts_with_all = ["sys", "env"])]
    formula: Option<PathBuf>,
    /// System actions, comma separated.
    #[arg(long, value_delimiter = ',')]
    sys: Vec<String>,
    /// Environment actions, comma separated.
    #[arg(long, value_delimiter = ',')]
    env: Vec<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value = "text")]
    format: TypesFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum TypesFormat {
    Text,
    Dot,
}

#[derive(Args)]
struct AccArgs {
    #[command(flatten)]
    f: FormulaArgs,
    /// Print every member.
    #[arg(long)]
    list: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Logic {
    Preffo,
    Fo,
}

#[derive(Args)]
struct EfArgs {
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value = "preffo")]
    logic: Logic,
    /// Longest word accepted by the game search.
    #[arg(long, default_value_t = 12)]
    max_positions: usize,
    word1: String,
    word2: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    f: FormulaArgs,
    #[arg(long)]
    ns: usize,
    #[arg(long)]
    ne: usize,
    /// Write the positional strategy as JSON.
    #[arg(long)]
    strategy: Option<PathBuf>,
    /// Also run the backward-induction solver and compare.
    #[arg(long)]
    cross_check: bool,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    f: FormulaArgs,
    #[arg(long)]
    max_ns: usize,
    #[arg(long)]
    max_ne: usize,
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct CutoffArgs {
    #[arg(long)]
    formula: PathBuf,
    #[arg(long)]
    k: Option<usize>,
    /// Report f_S for n_E up to this value.
    #[arg(long, default_value_t = 2)]
    max_ne: usize,
}

#[derive(Args)]
struct PlayArgs {
    #[arg(long)]
    formula: PathBuf,
    #[arg(long)]
    ns: usize,
    #[arg(long)]
    ne: usize,
    /// Strategy file written by `solve --strategy`.
    #[arg(long)]
    strategy: PathBuf,
    #[arg(long)]
    allow_dag: bool,
    /// One Environment round per line.
    #[arg(long, conflicts_with_all = ["random", "interactive"])]
    script: Option<PathBuf>,
    /// Random Environment rounds from this seed.
    #[arg(long, conflicts_with = "interactive")]
    random: Option<u64>,
    /// Read Environment rounds from standard input.
    #[arg(long)]
    interactive: bool,
    /// Most Environment extensions in a random script.
    #[arg(long, default_value_t = 6)]
    max_extensions: usize,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long)]
    formula: PathBuf,
    /// Data word in text or JSON form.
    #[arg(long)]
    word: PathBuf,
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_formula(path: &Path) -> anyhow::Result<Formula> {
    parse_formula_file(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn print_json(v: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json output"));
}

fn cmd_types(a: &TypesArgs, json_out: bool) -> anyhow::Result<u8> {
    let (alphabet, k) = match &a.formula {
        Some(path) => {
            let f = load_formula(path)?;
            let k = a.k.unwrap_or_else(|| depth_for(&f));
            (f.alphabet().clone(), k)
        }
        None => {
            let k = a.k.ok_or_else(|| anyhow!("--k is required without --formula"))?;
            (Alphabet::new(&a.sys, &a.env)?, k)
        }
    };
    let ts = TypeSpace::build_unchecked(&alphabet, k, &TypeBudget::default())?;
    if json_out {
        print_json(&ts.to_json());
    } else {
        match a.format {
            TypesFormat::Text => print!("{}", ts.render_text()),
            TypesFormat::Dot => print!("{}", ts.render_dot()),
        }
        for p in [Player::Environment, Player::System] {
            if !ts.tree(p).is_tree() {
                eprintln!("note: the {p} type order is not a tree");
            }
        }
    }
    Ok(0)
}

fn cmd_acc(a: &AccArgs, json_out: bool) -> anyhow::Result<u8> {
    let p = a.f.prepare()?;
    let Some(count) = p.acc.count() else {
        let msg = "too many counting functions to enumerate";
        if json_out {
            print_json(&json!({ "k": p.ts.depth(), "enumerated": false, "reason": msg }));
        } else {
            println!("{msg}");
        }
        return Ok(2);
    };
    let members: Vec<CountingFunction> = if a.list { p.acc.members() } else { Vec::new() };
    let stats = p.acc.untagged_projection(&p.ts);
    if json_out {
        let list: Vec<String> = members.iter().map(|c| c.render(&p.ts)).collect();
        print_json(&json!({
            "k": p.ts.depth(),
            "tagged_types": p.ts.tagged_len(),
            "universe": p.acc.universe(),
            "accepted": count,
            "members": if a.list { Some(list) } else { None },
            "untagged": stats.map(|s| json!({
                "functions": s.functions,
                "members": s.members,
                "ambiguous": s.ambiguous,
            })),
        }));
    } else {
        println!(
            "|Acc| = {count} of {} counting functions over {} tagged types (k = {})",
            p.acc.universe().map_or("?".into(), |u| u.to_string()),
            p.ts.tagged_len(),
            p.ts.depth()
        );
        if let Some(s) = stats {
            println!(
                "untagged: {} functions, {} accepted, {} ambiguous",
                s.functions, s.members, s.ambiguous
            );
        }
        for c in &members {
            println!("{}", c.render(&p.ts));
        }
    }
    Ok(0)
}

/// Letters are the distinct characters of both words.
fn ef_letters(w1: &str, w2: &str) -> (Vec<LetterId>, Vec<LetterId>) {
    let mut chars: Vec<char> = w1.chars().chain(w2.chars()).collect();
    chars.sort_unstable();
    chars.dedup();
    let id = |c: char| LetterId(chars.binary_search(&c).unwrap() as u16);
    (w1.chars().map(id).collect(), w2.chars().map(id).collect())
}

fn cmd_ef(a: &EfArgs, json_out: bool) -> anyhow::Result<u8> {
    let clean = |w: &str| if w == "-" || w == "ε" { String::new() } else { w.to_string() };
    let (w1, w2) = (clean(&a.word1), clean(&a.word2));
    let (u, v) = ef_letters(&w1, &w2);
    let budget = EfBudget {
        max_rounds: a.k.max(EfBudget::default().max_rounds),
        max_positions: a.max_positions,
    };
    let eq = match a.logic {
        Logic::Preffo => preffo_equiv_words_with(&u, &v, a.k, &budget)?,
        Logic::Fo => fo_equiv_pointed(&u, &[], &v, &[], a.k, &budget)?,
    };
    let verdict = if eq { "equivalent" } else { "distinguishable" };
    if json_out {
        print_json(&json!({ "k": a.k, "equivalent": eq }));
    } else {
        println!("{verdict}");
    }
    Ok(if eq { 0 } else { 1 })
}

fn cmd_solve(a: &SolveArgs, json_out: bool) -> anyhow::Result<u8> {
    let p = a.f.prepare()?;
    let g = p.game(a.ns, a.ne, &a.f.options().game)?;
    let r = prefsynth::tokengame::solve_buchi(&g);
    let winner = r.winner(g.initial_vertex());
    let agrees = a.cross_check.then(|| &solve_descent(&g) == r.winning_region());
    let strategy = Strategy::from_solution(&g, &r, &p.formula);
    if let Some(path) = &a.strategy {
        fs::write(path, strategy.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    if json_out {
        print_json(&json!({
            "k": p.ts.depth(),
            "ns": a.ns,
            "ne": a.ne,
            "winner": winner,
            "stats": r.stats,
            "strategy_entries": strategy.moves.len(),
            "oracle_agrees": agrees,
            "moves": "per_player_trees",
        }));
    } else {
        println!("winner: {winner}");
        println!(
            "k = {}, configurations: {}, vertices: {}, edges: {}, fixpoint iterations: {}",
            p.ts.depth(),
            r.stats.configurations,
            r.stats.vertices,
            r.stats.edges,
            r.stats.iterations
        );
        println!("tokens move within their owner's type order only");
        if let Some(ok) = agrees {
            println!("backward induction {}", if ok { "agrees" } else { "DISAGREES" });
        }
        if let Some(path) = &a.strategy {
            println!("strategy with {} entries written to {}", strategy.moves.len(), path.display());
        }
    }
    if agrees == Some(false) {
        bail!("solvers disagree");
    }
    Ok(if winner == Player::System { 0 } else { 1 })
}

fn cmd_search(a: &SearchArgs, json_out: bool) -> anyhow::Result<u8> {
    let p = a.f.prepare()?;
    let region = SearchRegion {
        max_ns: a.max_ns,
        max_ne: a.max_ne,
    };
    let report = search_with_jobs(&p, &region, &a.f.options(), a.jobs)?;
    if json_out {
        print_json(&serde_json::to_value(&report)?);
    } else {
        for o in &report.pairs {
            use prefsynth::synth::PairOutcome::*;
            match o {
                SystemWins { ns, ne, vertices } => println!("({ns},{ne}): System wins ({vertices} vertices)"),
                EnvironmentWins { ns, ne, vertices } => {
                    println!("({ns},{ne}): Environment wins ({vertices} vertices)")
                }
                OverBudget { ns, ne, reason } => println!("({ns},{ne}): not solved, {reason}"),
            }
        }
        match report.found {
            Some((ns, ne)) => println!("first winning pair: ({ns},{ne})"),
            None => println!(
                "no winning pair with n_S <= {} and n_E <= {}; this is not a proof that none exists",
                a.max_ns, a.max_ne
            ),
        }
    }
    Ok(if report.found.is_some() { 0 } else { 2 })
}

fn cmd_cutoffs(a: &CutoffArgs, json_out: bool) -> anyhow::Result<u8> {
    let f = load_formula(&a.formula)?;
    let k = a.k.unwrap_or_else(|| depth_for(&f));
    let opts = CutoffOptions {
        max_ne: a.max_ne,
        ..CutoffOptions::default()
    };
    let report = cutoffs(f.alphabet(), k, &opts)?;
    if json_out {
        print_json(&serde_json::to_value(&report)?);
    } else {
        print!("{}", report.render_text());
    }
    Ok(if report.types.is_some() { 0 } else { 2 })
}

fn print_playout(p: &Playout, json_out: bool) {
    if json_out {
        print_json(&json!({
            "word": p.word.to_json(),
            "rounds": p.transcript,
            "configuration": p.configuration.to_string(),
            "satisfied": p.satisfied,
        }));
        return;
    }
    for (i, r) in p.transcript.iter().enumerate() {
        let env = if r.env_events.is_empty() { "pass".to_string() } else { r.env_events.join(", ") };
        let sys = if r.sys_events.is_empty() { "pass".to_string() } else { r.sys_events.join(", ") };
        println!("round {}: env {env} | sys {sys} | {}", i + 1, r.configuration);
    }
    print!("{}", p.word.to_text());
    println!("formula {}", if p.satisfied { "holds" } else { "fails" });
}

fn cmd_play(a: &PlayArgs, json_out: bool) -> anyhow::Result<u8> {
    let f = load_formula(&a.formula)?;
    let strategy = Strategy::from_json(&read(&a.strategy)?)
        .with_context(|| format!("in {}", a.strategy.display()))?;
    let opts = Options {
        allow_dag: a.allow_dag,
        ..Options::default()
    };
    let ts = if opts.allow_dag {
        TypeSpace::build_unchecked(f.alphabet(), strategy.k, &opts.types)?
    } else {
        prefsynth::typespace::build_typespace_with(f.alphabet(), strategy.k, &opts.types)?
    };
    strategy.check_compatible(&ts, a.ns, a.ne)?;
    let p = if a.interactive {
        let stdin = io::stdin();
        let out = io::stdout();
        interactive_play(&f, &ts, &strategy, stdin.lock(), out.lock())?
    } else {
        let script = match (&a.script, a.random) {
            (Some(path), _) => parse_script(&read(path)?, &ts, &strategy)?,
            (None, Some(seed)) => seeded_script(ts.alphabet(), a.ne, a.max_extensions, seed),
            (None, None) => Vec::new(),
        };
        let p = playout(&f, &ts, &strategy, &script)?;
        print_playout(&p, json_out);
        p
    };
    Ok(if p.satisfied { 0 } else { 1 })
}

fn cmd_check(a: &CheckArgs, json_out: bool) -> anyhow::Result<u8> {
    let f = load_formula(&a.formula)?;
    let w = DataWord::parse_any(&read(&a.word)?, f.alphabet())
        .with_context(|| format!("in {}", a.word.display()))?;
    let holds = evaluate(&f, &w)?;
    if json_out {
        print_json(&json!({ "holds": holds }));
    } else {
        println!("{holds}");
    }
    Ok(if holds { 0 } else { 1 })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Budget(_)) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Types(a) => cmd_types(a, cli.json),
        Cmd::Acc(a) => cmd_acc(a, cli.json),
        Cmd::Ef(a) => cmd_ef(a, cli.json),
        Cmd::Solve(a) => cmd_solve(a, cli.json),
        Cmd::Search(a) => cmd_search(a, cli.json),
        Cmd::Cutoffs(a) => cmd_cutoffs(a, cli.json),
        Cmd::Play(a) => cmd_play(a, cli.json),
        Cmd::Check(a) => cmd_check(a, cli.json),
    };
    let _ = io::stdout().flush();
    match res {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            if matches!(e.downcast_ref::<Error>(), Some(Error::NotATree(_))) {
                eprintln!("hint: pass --allow-dag to work on the type order as it is");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
