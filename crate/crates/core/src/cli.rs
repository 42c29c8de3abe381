//! Text formats and the command-line front end.
//!
//! Game files hold one directive per line (`#` starts a comment):
//!
//! ```text
//! vertex a I
//! vertex b II
//! edge a b
//! edge b a
//! edge b b
//! start a
//! components 1
//! target 0 0 a
//! ```
//!
//! Strategy files describe a Mealy automaton over arena vertices:
//! `player <I|II>`, `memory <id> [init]`, and
//! `step <mem> <vertex> -> <mem'> [<choice>]` with a choice exactly at the
//! player's vertices.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::arena::{validate_arena, Arena, ArenaError, Player, RawArena, StrategyAutomaton, Vertex};
use crate::davis::{self, DavisContext};
use crate::harness::{campaign, gen_instance, GenParams};
use crate::mullersolve::{self, SubGameObjective};
use crate::payoff::Sigma3Payoff;
use crate::verify::{brute_force_winner, verify_i, verify_ii, BruteForceCaps, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("line {0}: syntax error")]
    SyntaxError(usize),
    #[error("line {0}: {1}")]
    SemanticError(usize, String),
}

fn semantic(line: usize, reason: impl Into<String>) -> CliError {
    CliError::SemanticError(line, reason.into())
}

/// Non-comment lines with their 1-based numbers, split into words.
fn directives(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let words: Vec<&str> = line.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn parse_player(word: &str, line: usize) -> Result<Player, CliError> {
    word.parse().map_err(|_| CliError::SyntaxError(line))
}

fn parse_number(word: &str, line: usize) -> Result<usize, CliError> {
    word.parse().map_err(|_| CliError::SyntaxError(line))
}

pub fn parse_game(text: &str) -> Result<(Arena, Sigma3Payoff), CliError> {
    let mut vertices: Vec<(String, Player)> = Vec::new();
    let mut declared: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, String, String)> = Vec::new();
    let mut start: Option<(usize, String)> = None;
    let mut components: Option<(usize, usize)> = None;
    let mut targets: Vec<(usize, usize, usize, Vec<String>)> = Vec::new();
    let mut last_line = 0;
    for (line, words) in directives(text) {
        last_line = line;
        match words.as_slice() {
            ["vertex", id, owner] => {
                let owner = parse_player(owner, line)?;
                if declared.insert(id.to_string(), line).is_some() {
                    return Err(semantic(line, format!("vertex {id} declared twice")));
                }
                vertices.push((id.to_string(), owner));
            }
            ["edge", from, to] => edges.push((line, from.to_string(), to.to_string())),
            ["start", id] => {
                if start.is_some() {
                    return Err(semantic(line, "start given twice"));
                }
                start = Some((line, id.to_string()));
            }
            ["components", k] => {
                if components.is_some() {
                    return Err(semantic(line, "components given twice"));
                }
                components = Some((line, parse_number(k, line)?));
            }
            ["target", k, j, ids @ ..] if !ids.is_empty() => targets.push((
                line,
                parse_number(k, line)?,
                parse_number(j, line)?,
                ids.iter().map(|s| s.to_string()).collect(),
            )),
            _ => return Err(CliError::SyntaxError(line)),
        }
    }
    let known = |id: &str, line: usize| {
        declared
            .contains_key(id)
            .then_some(())
            .ok_or_else(|| semantic(line, format!("undeclared vertex {id}")))
    };
    for (line, from, to) in &edges {
        known(from, *line)?;
        known(to, *line)?;
    }
    let Some((start_line, start)) = start else {
        return Err(semantic(last_line + 1, "missing start"));
    };
    known(&start, start_line)?;
    let Some((components_line, k_count)) = components else {
        return Err(semantic(last_line + 1, "missing components"));
    };
    if k_count == 0 {
        return Err(semantic(components_line, "at least one component is required"));
    }
    let mut sets: Vec<Vec<Option<Vec<String>>>> = vec![Vec::new(); k_count];
    for (line, k, j, ids) in &targets {
        if *k >= k_count {
            return Err(semantic(*line, format!("component {k} out of range")));
        }
        for id in ids {
            known(id, *line)?;
        }
        let comp = &mut sets[*k];
        if comp.len() <= *j {
            comp.resize(*j + 1, None);
        }
        if comp[*j].is_some() {
            return Err(semantic(*line, format!("target {k} {j} given twice")));
        }
        comp[*j] = Some(ids.clone());
    }
    let raw = RawArena {
        vertices,
        edges: edges.into_iter().map(|(_, a, b)| (a, b)).collect(),
        start,
    };
    let arena = validate_arena(&raw).map_err(|e| match &e {
        ArenaError::DeadEnd(id) => semantic(declared[id], e.to_string()),
        _ => semantic(last_line, e.to_string()),
    })?;
    let mut components = Vec::with_capacity(k_count);
    for (k, comp) in sets.into_iter().enumerate() {
        if comp.is_empty() {
            return Err(semantic(components_line, format!("component {k} has no targets")));
        }
        let mut families = Vec::with_capacity(comp.len());
        for (j, target) in comp.into_iter().enumerate() {
            let ids = target.ok_or_else(|| semantic(components_line, format!("target {k} {j} missing")))?;
            families.push(ids.iter().map(|id| arena.vertex(id).unwrap()).collect());
        }
        components.push(families);
    }
    let payoff = Sigma3Payoff::new(arena.len(), components)
        .map_err(|e| semantic(components_line, e.to_string()))?;
    Ok((arena, payoff))
}

pub fn print_game(arena: &Arena, payoff: &Sigma3Payoff) -> String {
    let mut out = String::new();
    for v in 0..arena.len() {
        writeln!(out, "vertex {} {}", arena.name(v), arena.owner(v)).unwrap();
    }
    for v in 0..arena.len() {
        for &w in arena.successors(v) {
            writeln!(out, "edge {} {}", arena.name(v), arena.name(w)).unwrap();
        }
    }
    writeln!(out, "start {}", arena.name(arena.start())).unwrap();
    writeln!(out, "components {}", payoff.component_count()).unwrap();
    for k in 0..payoff.component_count() {
        for j in 0..payoff.target_count(k) {
            write!(out, "target {k} {j}").unwrap();
            for v in payoff.target(k, j).ones() {
                write!(out, " {}", arena.name(v)).unwrap();
            }
            writeln!(out).unwrap();
        }
    }
    out
}

pub fn print_strategy(arena: &Arena, strategy: &StrategyAutomaton) -> String {
    let mut out = String::new();
    writeln!(out, "player {}", strategy.player()).unwrap();
    for m in 0..strategy.memory_count() {
        let init = if m == strategy.init() { " init" } else { "" };
        writeln!(out, "memory m{m}{init}").unwrap();
    }
    for m in 0..strategy.memory_count() {
        for v in 0..arena.len() {
            write!(out, "step m{m} {} -> m{}", arena.name(v), strategy.next_memory(m, v)).unwrap();
            if let Some(t) = strategy.choice(m, v) {
                write!(out, " {}", arena.name(t)).unwrap();
            }
            writeln!(out).unwrap();
        }
    }
    out
}

pub fn parse_strategy(arena: &Arena, text: &str) -> Result<StrategyAutomaton, CliError> {
    let mut player: Option<Player> = None;
    let mut memories: HashMap<String, usize> = HashMap::new();
    let mut init: Option<usize> = None;
    let mut steps: Vec<(usize, String, String, String, Option<String>)> = Vec::new();
    let mut last_line = 0;
    for (line, words) in directives(text) {
        last_line = line;
        match words.as_slice() {
            ["player", p] => {
                if player.replace(parse_player(p, line)?).is_some() {
                    return Err(semantic(line, "player given twice"));
                }
            }
            ["memory", id, rest @ ..] if rest.len() <= 1 => {
                let next = memories.len();
                if memories.insert(id.to_string(), next).is_some() {
                    return Err(semantic(line, format!("memory {id} declared twice")));
                }
                match rest {
                    [] => {}
                    ["init"] => {
                        if init.replace(next).is_some() {
                            return Err(semantic(line, "two initial memories"));
                        }
                    }
                    _ => return Err(CliError::SyntaxError(line)),
                }
            }
            ["step", m, v, "->", m2, rest @ ..] if rest.len() <= 1 => steps.push((
                line,
                m.to_string(),
                v.to_string(),
                m2.to_string(),
                rest.first().map(|s| s.to_string()),
            )),
            _ => return Err(CliError::SyntaxError(line)),
        }
    }
    let player = player.ok_or_else(|| semantic(last_line + 1, "missing player"))?;
    let init = init.ok_or_else(|| semantic(last_line + 1, "missing initial memory"))?;
    let count = memories.len();
    let n = arena.len();
    let mut update: Vec<Vec<Option<usize>>> = vec![vec![None; n]; count];
    let mut choose: Vec<Vec<Option<Vertex>>> = vec![vec![None; n]; count];
    for (line, m, v, m2, choice) in steps {
        let mem = |id: &str| {
            memories
                .get(id)
                .copied()
                .ok_or_else(|| semantic(line, format!("undeclared memory {id}")))
        };
        let vertex = |id: &str| {
            arena
                .vertex(id)
                .ok_or_else(|| semantic(line, format!("undeclared vertex {id}")))
        };
        let (m, v, m2) = (mem(&m)?, vertex(&v)?, mem(&m2)?);
        if update[m][v].is_some() {
            return Err(semantic(line, "step given twice"));
        }
        update[m][v] = Some(m2);
        match (arena.owner(v) == player, choice) {
            (true, Some(c)) => {
                let c = vertex(&c)?;
                if !arena.has_edge(v, c) {
                    return Err(semantic(line, "choice is not a successor"));
                }
                choose[m][v] = Some(c);
            }
            (true, None) => return Err(semantic(line, "missing choice at an owned vertex")),
            (false, Some(_)) => return Err(semantic(line, "choice at a vertex the player does not own")),
            (false, None) => {}
        }
    }
    let update = update
        .into_iter()
        .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| semantic(last_line + 1, "some memory/vertex pair has no step"))?;
    StrategyAutomaton::new(&arena.graph(), player, init, update, choose)
        .map_err(|e| semantic(last_line + 1, e.to_string()))
}

/// Stage table for one component: closure index and one line per position.
pub fn print_stages(arena: &Arena, ctx: &DavisContext, stages: &davis::PhiStages) -> String {
    let mut out = String::new();
    writeln!(out, "component {}", ctx.dodged()).unwrap();
    writeln!(out, "closure {}", stages.closure()).unwrap();
    for xi in 0..=stages.closure() {
        let names: Vec<String> = stages
            .sequence
            .stage(xi)
            .ones()
            .map(|p| position_name(arena, ctx, p))
            .collect();
        writeln!(out, "stage {xi}: {}", names.join(" ")).unwrap();
    }
    for p in 0..ctx.space_len() {
        let rank = stages.rank(p).map_or("none".to_string(), |r| r.to_string());
        writeln!(out, "rank {} {rank}", position_name(arena, ctx, p)).unwrap();
    }
    out
}

fn position_name(arena: &Arena, ctx: &DavisContext, p: usize) -> String {
    format!("{}/{}", arena.name(ctx.space().vertex(p)), ctx.obligation(p))
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREEMENT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_REFUTED: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sigma3", about = "Solve and certify games with unions of generalized-Buchi payoffs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide the winner and extract a verified strategy.
    Solve {
        file: PathBuf,
        #[arg(long)]
        emit_strategy: Option<PathBuf>,
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Also compare with the direct solver and brute force.
        #[arg(long)]
        against_oracle: bool,
    },
    /// Check that a strategy file wins for the given player.
    Verify {
        file: PathBuf,
        strategy: PathBuf,
        #[arg(long)]
        winner: Player,
    },
    /// Print the operator's stages and ranks for one component.
    Stages {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        component: usize,
    },
    /// Print a random instance.
    Gen {
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        shape: Shape,
    },
    /// Cross-check a range of random instances.
    Campaign {
        /// Seed range `a..b` (end exclusive).
        #[arg(long)]
        seeds: String,
        #[command(flatten)]
        shape: Shape,
    },
}

#[derive(clap::Args, Debug)]
struct Shape {
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long)]
    components: Option<usize>,
    #[arg(long)]
    targets: Option<usize>,
}

impl Shape {
    fn params(&self, seed: u64) -> GenParams {
        let mut p = GenParams::default().with_seed(seed);
        if let Some(n) = self.vertices {
            p.vertices = n..=n;
        }
        if let Some(k) = self.components {
            p.components = k..=k;
        }
        if let Some(j) = self.targets {
            p.targets = j..=j;
        }
        p
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run_command(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_command_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_command_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

struct Failure(i32, String);

fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure(EXIT_INPUT, e.to_string())
}

fn internal<E: std::fmt::Display>(e: E) -> Failure {
    Failure(EXIT_DISAGREEMENT, e.to_string())
}

fn load_game(path: &PathBuf) -> Result<(Arena, Sigma3Payoff), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))?;
    parse_game(&text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Solve {
            file,
            emit_strategy,
            certificate,
            against_oracle,
        } => {
            let (arena, payoff) = load_game(&file)?;
            let g = arena.graph();
            let sol = davis::solve(&g, &payoff).map_err(internal)?;
            writeln!(out, "winner: {}", sol.winner).map_err(input)?;
            if let Some(path) = emit_strategy {
                write_file(&path, &print_strategy(&arena, &sol.strategy))?;
            }
            if let Some(path) = certificate {
                write_file(&path, &sol.certificate.to_string())?;
            }
            if against_oracle {
                let direct = mullersolve::solve(&g, &SubGameObjective::payoff_only(&payoff, &g))
                    .map_err(internal)?
                    .winner_at(g.root());
                let brute = brute_force_winner(&arena, &payoff, 1, BruteForceCaps::default()).ok();
                writeln!(out, "direct: {direct}").map_err(input)?;
                match brute {
                    Some(b) => writeln!(out, "brute force: {b}").map_err(input)?,
                    None => writeln!(out, "brute force: skipped (too large)").map_err(input)?,
                }
                if direct != sol.winner || brute.is_some_and(|b| b != sol.winner) {
                    writeln!(out, "engines disagree").map_err(input)?;
                    return Ok(EXIT_DISAGREEMENT);
                }
            }
            Ok(EXIT_OK)
        }
        Command::Verify {
            file,
            strategy,
            winner,
        } => {
            let (arena, payoff) = load_game(&file)?;
            let text = std::fs::read_to_string(&strategy)
                .map_err(|e| input(format!("{}: {e}", strategy.display())))?;
            let strat = parse_strategy(&arena, &text)
                .map_err(|e| input(format!("{}: {e}", strategy.display())))?;
            if strat.player() != winner {
                return Err(input(format!("strategy is for Player {}", strat.player())));
            }
            let g = arena.graph();
            let verdict = match winner {
                Player::I => verify_i(&g, &payoff, &strat),
                Player::II => verify_ii(&g, &payoff, &strat),
            }
            .map_err(input)?;
            match verdict {
                Verdict::Certified => {
                    writeln!(out, "certified").map_err(input)?;
                    Ok(EXIT_OK)
                }
                Verdict::Refuted(play) => {
                    let (stem, cycle) = play.vertices(&g);
                    writeln!(
                        out,
                        "refuted: stem [{}] cycle [{}]",
                        arena.format_path(&stem),
                        arena.format_path(&cycle)
                    )
                    .map_err(input)?;
                    Ok(EXIT_REFUTED)
                }
            }
        }
        Command::Stages { file, component } => {
            let (arena, payoff) = load_game(&file)?;
            if component >= payoff.component_count() {
                return Err(input(format!("component {component} does not exist")));
            }
            let ctx = DavisContext::new(&arena.graph(), &payoff, component).map_err(input)?;
            let stages = ctx.phi_stages().map_err(internal)?;
            write!(out, "{}", print_stages(&arena, &ctx, &stages)).map_err(input)?;
            Ok(EXIT_OK)
        }
        Command::Gen { seed, shape } => {
            let inst = gen_instance(&shape.params(seed));
            write!(out, "{}", print_game(&inst.arena, &inst.payoff)).map_err(input)?;
            Ok(EXIT_OK)
        }
        Command::Campaign { seeds, shape } => {
            let (a, b) = seeds
                .split_once("..")
                .and_then(|(a, b)| Some((a.parse::<u64>().ok()?, b.parse::<u64>().ok()?)))
                .filter(|(a, b)| a <= b)
                .ok_or_else(|| input(format!("bad seed range {seeds}")))?;
            let reports = campaign(&shape.params(0), a..b);
            writeln!(out, "seed winner certified stages nodes").map_err(input)?;
            let mut failed = 0;
            for (seed, report) in &reports {
                writeln!(out, "{seed} {report}").map_err(input)?;
                failed += usize::from(!report.passed());
            }
            writeln!(out, "{} instances, {failed} failed", reports.len()).map_err(input)?;
            Ok(if failed == 0 { EXIT_OK } else { EXIT_DISAGREEMENT })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX1P: &str = "vertex a I\nvertex b II\nedge a b\nedge b a\nedge b b\nstart a\ncomponents 1\ntarget 0 0 a\n";

    #[test]
    fn parses_the_canonical_example() {
        let (arena, payoff) = parse_game(EX1P).unwrap();
        assert_eq!(arena.len(), 2);
        assert_eq!(arena.successors(1), &[0, 1]);
        assert_eq!(payoff.component_count(), 1);
        assert!(payoff.in_target(0, 0, 0));
        assert_eq!(print_game(&arena, &payoff), EX1P);
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let text = format!("# game\n\n{}", EX1P.replace("start a", "start a  # here"));
        assert!(parse_game(&text).is_ok());
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let missing_start = EX1P.replace("start a\n", "");
        assert!(matches!(parse_game(&missing_start), Err(CliError::SemanticError(..))));
        let bad_target = EX1P.replace("target 0 0 a", "target 0 0 c");
        assert_eq!(
            parse_game(&bad_target).unwrap_err(),
            CliError::SemanticError(8, "undeclared vertex c".into())
        );
        let garbage = EX1P.replace("edge a b", "edge a");
        assert_eq!(parse_game(&garbage).unwrap_err(), CliError::SyntaxError(3));
        let bad_owner = EX1P.replace("vertex b II", "vertex b III");
        assert_eq!(parse_game(&bad_owner).unwrap_err(), CliError::SyntaxError(2));
        let dead = "vertex a I\nvertex b II\nedge a b\nstart a\ncomponents 1\ntarget 0 0 a\n";
        assert!(matches!(parse_game(dead), Err(CliError::SemanticError(2, _))));
        let gap = EX1P.replace("target 0 0 a", "target 0 1 a");
        assert!(matches!(parse_game(&gap), Err(CliError::SemanticError(..))));
    }

    #[test]
    fn strategies_round_trip() {
        let (arena, _) = parse_game(EX1P).unwrap();
        let g = arena.graph();
        let tau = StrategyAutomaton::positional(&g, Player::II, |_| 1).unwrap();
        let text = print_strategy(&arena, &tau);
        assert_eq!(parse_strategy(&arena, &text).unwrap(), tau);
        let missing = text.replace("step m0 b -> m0 b\n", "");
        assert!(matches!(parse_strategy(&arena, &missing), Err(CliError::SemanticError(..))));
        let extra = text.replace("step m0 a -> m0", "step m0 a -> m0 b");
        assert!(matches!(parse_strategy(&arena, &extra), Err(CliError::SemanticError(..))));
    }
}
