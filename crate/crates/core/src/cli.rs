//! Command-line front end.
//!
//! Exit codes: 0 success, 1 analysis refused (a cap was hit, or the query has
//! no answer such as a witness for an unreachable subset), 2 input error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::automaton::{classify_shape, standardize, Automaton};
use crate::decision::{decide, DecideOptions, Outcome, PipelineReport};
use crate::error::Error;
use crate::format::{parse_automaton, serialize_automaton};
use crate::oracle::{self, DEFAULT_MAX_STATES};
use crate::par::{self, Strategy};
use crate::perm_group::{DEFAULT_BLOCK_LATTICE_CAP, DEFAULT_GROUP_CAP};
use crate::random::random_almost_group;
use crate::rystsov::{build_hierarchy_with, dot_export};
use crate::state_set::StateSet;

#[derive(Parser, Debug)]
#[command(
    name = "almost-group",
    version,
    about = "Complete reachability of almost-group automata"
)]
pub struct Cli {
    #[command(flatten)]
    pub caps: Caps,

    /// Run every search on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Caps {
    /// Largest state count the power-set oracle accepts.
    #[arg(long, global = true, env = "ORACLE_MAX_STATES", default_value_t = DEFAULT_MAX_STATES)]
    pub oracle_max_states: usize,

    /// Largest permutation group enumerated explicitly.
    #[arg(long, global = true, env = "GROUP_MAX_ELEMENTS", default_value_t = DEFAULT_GROUP_CAP)]
    pub group_cap: usize,

    /// Largest number of blocks collected when scanning the block lattice.
    #[arg(long, global = true, env = "BLOCK_LATTICE_MAX", default_value_t = DEFAULT_BLOCK_LATTICE_CAP)]
    pub block_lattice_cap: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse a file and classify its alphabet.
    Validate { file: PathBuf },
    /// Print the full pipeline report.
    Analyze {
        file: PathBuf,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
        /// Report inconclusive instead of running the power-set search.
        #[arg(long)]
        no_oracle_fallback: bool,
    },
    /// Decide complete reachability.
    Decide {
        file: PathBuf,
        /// Report inconclusive instead of running the power-set search.
        #[arg(long)]
        no_oracle_fallback: bool,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive subset reachability.
    Oracle {
        file: PathBuf,
        /// List up to N unreachable subsets.
        #[arg(long, value_name = "N")]
        list_unreachable: Option<usize>,
        /// Print a shortest word reaching the subset, e.g. `{1,3}`.
        #[arg(long, value_name = "SUBSET")]
        witness: Option<String>,
        /// Longest shortest witness per subset size.
        #[arg(long)]
        stats: bool,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Build the Rystsov graph hierarchy.
    Rystsov {
        file: PathBuf,
        /// Level to detail and export (default: the last one).
        #[arg(long)]
        level: Option<usize>,
        /// Write the chosen level as Graphviz DOT (`-` for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Label DOT edges with witness words.
        #[arg(long)]
        labels: bool,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Blocks of imprimitivity containing the excluded state.
    Blocks {
        file: PathBuf,
        /// Include the trivial blocks.
        #[arg(long)]
        all: bool,
        /// Print the system of imprimitivity generated by this block.
        #[arg(long, value_name = "BLOCK")]
        system: Option<String>,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Generate random almost-group automata.
    Random {
        /// Number of states.
        #[arg(long, short = 'n')]
        states: usize,
        /// Number of permutation letters.
        #[arg(long, short = 'm', default_value_t = 1)]
        perms: usize,
        /// ChaCha8 seed of the first instance.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of instances, with seeds `seed, seed + 1, …`.
        #[arg(long, default_value_t = 1)]
        count: usize,
        /// Follow the collapse with a random permutation.
        #[arg(long)]
        post_permute: bool,
        /// Decide each instance instead of printing it.
        #[arg(long)]
        decide: bool,
        /// Emit JSON instead of text.
        #[arg(long)]
        json: bool,
    },
}

/// Resolved settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub options: DecideOptions,
}

impl RunConfig {
    fn from_cli(cli: &Cli) -> std::result::Result<RunConfig, Failure> {
        let caps = &cli.caps;
        if caps.oracle_max_states == 0 || caps.group_cap == 0 || caps.block_lattice_cap == 0 {
            return Err(Failure {
                code: 2,
                msg: "caps must be positive".into(),
            });
        }
        Ok(RunConfig {
            options: DecideOptions {
                oracle_fallback: true,
                oracle_max_states: cli.caps.oracle_max_states,
                group_cap: cli.caps.group_cap,
                block_lattice_cap: cli.caps.block_lattice_cap,
                strategy: if cli.sequential {
                    Strategy::Sequential
                } else {
                    Strategy::default()
                },
            },
        })
    }
}

struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            _ if e.is_cap() => 1,
            Error::NotTransitive | Error::Unreachable(_) | Error::TheoremViolation(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Failure {
        Failure {
            code: 1,
            msg: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<String, Failure>;

/// Runs the CLI against the given writers and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match RunConfig::from_cli(&cli).and_then(|cfg| dispatch(&cli.command, &cfg)) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.msg);
            f.code
        }
    }
}

fn load(path: &PathBuf) -> std::result::Result<Automaton, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        msg: format!("{}: {e}", path.display()),
    })?;
    parse_automaton(&text).map_err(|e| Failure {
        code: 2,
        msg: format!("{}: {e}", path.display()),
    })
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> CmdResult {
    match cmd {
        Command::Validate { file } => cmd_validate(&load(file)?),
        Command::Analyze {
            file,
            json,
            no_oracle_fallback,
        } => {
            let a = load(file)?;
            let opts = DecideOptions {
                oracle_fallback: !no_oracle_fallback,
                ..cfg.options.clone()
            };
            let (_, report) = decide(&a, &opts)?;
            if *json {
                Ok(serde_json::to_string_pretty(&report)? + "\n")
            } else {
                Ok(format_report(&report))
            }
        }
        Command::Decide {
            file,
            no_oracle_fallback,
            json,
        } => {
            let a = load(file)?;
            let opts = DecideOptions {
                oracle_fallback: !no_oracle_fallback,
                ..cfg.options.clone()
            };
            let (outcome, _) = decide(&a, &opts)?;
            if *json {
                Ok(serde_json::to_string_pretty(&outcome)? + "\n")
            } else {
                Ok(format!("{outcome}\n"))
            }
        }
        Command::Oracle {
            file,
            list_unreachable,
            witness,
            stats,
            json,
        } => cmd_oracle(&load(file)?, cfg, *list_unreachable, witness.as_deref(), *stats, *json),
        Command::Rystsov {
            file,
            level,
            dot,
            labels,
            json,
        } => cmd_rystsov(&load(file)?, cfg, *level, dot.as_ref(), *labels, *json),
        Command::Blocks {
            file,
            all,
            system,
            json,
        } => cmd_blocks(&load(file)?, cfg, *all, system.as_deref(), *json),
        Command::Random {
            states,
            perms,
            seed,
            count,
            post_permute,
            decide,
            json,
        } => cmd_random(cfg, *states, *perms, *seed, *count, *post_permute, *decide, *json),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_validate(a: &Automaton) -> CmdResult {
    let shape = classify_shape(a)?;
    let gens = shape.generators(a);
    let names: Vec<&str> = shape.perm_letters.iter().map(|&i| a.letter(i).name.as_str()).collect();
    let mut s = String::new();
    writeln!(s, "states: {}", a.n()).unwrap();
    writeln!(s, "permutation letters: {}", names.join(", ")).unwrap();
    writeln!(s, "defect letter: {}", a.letter(shape.defect_letter).name).unwrap();
    writeln!(
        s,
        "excl = {}, dupl = {}, coll = {}",
        shape.e + 1,
        shape.d + 1,
        shape.coll_set()
    )
    .unwrap();
    writeln!(s, "standardized: {}", yes_no(shape.standardized)).unwrap();
    writeln!(s, "transitive: {}", yes_no(gens.is_transitive())).unwrap();
    Ok(s)
}

/// Human-readable rendering of a [`PipelineReport`].
pub fn format_report(r: &PipelineReport) -> String {
    let mut s = String::new();
    writeln!(s, "states: {}", r.states).unwrap();
    writeln!(
        s,
        "letters: permutations [{}], defect letter {}",
        r.shape.permutation_letters.join(", "),
        r.shape.defect_letter
    )
    .unwrap();
    writeln!(
        s,
        "e = {}, dupl(a) = {}, coll(a) = {{{},{}}}, standardized: {}",
        r.shape.excluded_state,
        r.shape.duplicated_state,
        r.shape.collapsed_pair[0],
        r.shape.collapsed_pair[1],
        yes_no(r.shape.standardized)
    )
    .unwrap();
    if let Some(w) = &r.standardization_word {
        writeln!(s, "standardization word: {}", if w.is_empty() { "ε" } else { w }).unwrap();
    }
    writeln!(s, "transitive: {}", yes_no(r.transitive)).unwrap();
    if let Some(blocks) = &r.blocks_containing_e {
        let list: Vec<String> = blocks.iter().map(StateSet::to_string).collect();
        writeln!(
            s,
            "nontrivial blocks containing e: {}",
            if list.is_empty() { "none".into() } else { list.join(" ") }
        )
        .unwrap();
    }
    for l in &r.levels {
        let comps: Vec<String> = l.components.iter().map(StateSet::to_string).collect();
        writeln!(
            s,
            "level {}: {} vertices, {} edges, components {}; C_e = {}",
            l.k,
            l.vertices.len(),
            l.edges.len(),
            comps.join(" "),
            l.c_e
        )
        .unwrap();
    }
    if let Some(stop) = r.stop_reason {
        writeln!(s, "stop: {stop:?}").unwrap();
    }
    for c in &r.core_checks {
        writeln!(
            s,
            "core at level {}: block {}, {} blocks in system, |core| = {}, transitive: {}",
            c.level,
            c.block,
            c.blocks_in_system,
            c.core_order,
            yes_no(c.transitive)
        )
        .unwrap();
    }
    for w in &r.warnings {
        writeln!(s, "warning: {w}").unwrap();
    }
    writeln!(s, "verdict: {}", r.outcome).unwrap();
    s
}

fn cmd_oracle(
    a: &Automaton,
    cfg: &RunConfig,
    list: Option<usize>,
    witness: Option<&str>,
    stats: bool,
    json: bool,
) -> CmdResult {
    let table = oracle::reachable_subsets_with(a, cfg.options.oracle_max_states, cfg.options.strategy)?;
    let total = (1usize << a.n()) - 1;
    let unreachable = list.map(|k| table.unreachable(k));
    let witness_word = match witness {
        Some(text) => {
            let p = StateSet::parse_one_indexed(text, a.n()).map_err(|m| Failure { code: 2, msg: m })?;
            if p.is_empty() {
                return Err(Failure {
                    code: 2,
                    msg: "the empty set is never reachable".into(),
                });
            }
            Some((p, a.format_word(&table.shortest_witness(p)?)))
        }
        None => None,
    };
    let stats = stats.then(|| table.witness_length_stats());
    if json {
        let v = json!({
            "states": a.n(),
            "reachable": table.reachable_count(),
            "total": total,
            "completely_reachable": table.is_completely_reachable(),
            "unreachable": unreachable,
            "witness": witness_word.as_ref().map(|(p, w)| json!({"subset": p, "word": w})),
            "stats": stats,
        });
        return Ok(serde_json::to_string_pretty(&v)? + "\n");
    }
    let mut s = String::new();
    writeln!(
        s,
        "reachable: {} of {} non-empty subsets",
        table.reachable_count(),
        total
    )
    .unwrap();
    writeln!(s, "completely reachable: {}", yes_no(table.is_completely_reachable())).unwrap();
    if let Some(list) = unreachable {
        for p in list {
            writeln!(s, "unreachable {p}").unwrap();
        }
    }
    if let Some((p, w)) = witness_word {
        writeln!(s, "witness {p}: {w}").unwrap();
    }
    if let Some(st) = stats {
        writeln!(s, "size  reachable  max-witness  bound 2n(n-k)").unwrap();
        for x in &st.per_size {
            let flag = if x.exceeds_bound { "  EXCEEDS BOUND" } else { "" };
            writeln!(
                s,
                "{:>4}  {:>9}  {:>11}  {:>13}{}",
                x.k, x.reachable, x.max_length, x.bound, flag
            )
            .unwrap();
        }
    }
    Ok(s)
}

fn cmd_rystsov(
    a: &Automaton,
    cfg: &RunConfig,
    level: Option<usize>,
    dot: Option<&PathBuf>,
    labels: bool,
    json: bool,
) -> CmdResult {
    let shape = classify_shape(a)?;
    let gens = shape.generators(a);
    if !gens.is_transitive() {
        return Err(Error::NotTransitive.into());
    }
    let (std, _) = standardize(a, &shape)?;
    let std_shape = classify_shape(&std)?;
    let h = build_hierarchy_with(&std, &std_shape, cfg.options.strategy)?;
    let chosen = h.level(level.unwrap_or(h.levels.len()))?;
    if let Some(path) = dot {
        if path.as_os_str() == "-" {
            return Ok(dot_export(chosen, &std, labels));
        }
        std::fs::write(path, dot_export(chosen, &std, labels)).map_err(|e| Failure {
            code: 2,
            msg: format!("{}: {e}", path.display()),
        })?;
    }
    let summaries: Vec<_> = h
        .levels
        .iter()
        .map(|l| crate::decision::LevelSummary::new(&std, l))
        .collect();
    if json {
        let v = json!({ "levels": summaries, "stop_reason": h.stop_reason });
        return Ok(serde_json::to_string_pretty(&v)? + "\n");
    }
    let mut s = String::new();
    for l in &summaries {
        let comps: Vec<String> = l.components.iter().map(StateSet::to_string).collect();
        writeln!(
            s,
            "level {}: {} vertices, {} edges, components {}; C_e = {}",
            l.k,
            l.vertices.len(),
            l.edges.len(),
            comps.join(" "),
            l.c_e
        )
        .unwrap();
    }
    writeln!(s, "stop: {:?}", h.stop_reason).unwrap();
    writeln!(s, "edges of level {}:", chosen.k).unwrap();
    for e in &summaries[chosen.k - 1].edges {
        writeln!(
            s,
            "  {} -> {}  via {} (excl {}, dupl {})",
            e.source, e.target, e.witness, e.excl, e.dupl
        )
        .unwrap();
    }
    Ok(s)
}

fn cmd_blocks(a: &Automaton, cfg: &RunConfig, all: bool, system: Option<&str>, json: bool) -> CmdResult {
    let shape = classify_shape(a)?;
    let gens = shape.generators(a);
    if let Some(spec) = system {
        let b = StateSet::parse_one_indexed(spec, a.n()).map_err(|m| Failure { code: 2, msg: m })?;
        let sys = gens.system_from_block(b)?;
        if json {
            return Ok(serde_json::to_string_pretty(&sys.blocks)? + "\n");
        }
        return Ok(sys.blocks.iter().map(|b| format!("{b}\n")).collect());
    }
    let blocks = gens.blocks_containing(shape.e, all, cfg.options.block_lattice_cap)?;
    if json {
        return Ok(serde_json::to_string_pretty(&blocks)? + "\n");
    }
    Ok(blocks.iter().map(|b| format!("{b}\n")).collect())
}

#[allow(clippy::too_many_arguments)]
fn cmd_random(
    cfg: &RunConfig,
    states: usize,
    perms: usize,
    seed: u64,
    count: usize,
    post_permute: bool,
    decide_each: bool,
    json: bool,
) -> CmdResult {
    let seeds: Vec<u64> = (0..count as u64).map(|i| seed.wrapping_add(i)).collect();
    let automata = seeds
        .iter()
        .map(|&s| random_almost_group(states, perms, s, post_permute))
        .collect::<crate::error::Result<Vec<_>>>()?;
    if !decide_each && json {
        let rows: Vec<_> = seeds
            .iter()
            .zip(&automata)
            .map(|(sd, a)| {
                let letters: Vec<_> = a
                    .letters()
                    .iter()
                    .map(|l| json!({ "name": l.name, "images": l.map.images().iter().map(|q| q + 1).collect::<Vec<_>>() }))
                    .collect();
                json!({ "seed": sd, "states": a.n(), "letters": letters })
            })
            .collect();
        return Ok(serde_json::to_string_pretty(&rows)? + "\n");
    }
    if !decide_each {
        let mut s = String::new();
        for (sd, a) in seeds.iter().zip(&automata) {
            if count > 1 {
                writeln!(s, "# seed {sd}").unwrap();
            }
            s.push_str(&serialize_automaton(a));
        }
        return Ok(s);
    }
    // Instances are independent; each one's pipeline runs sequentially.
    let inner = DecideOptions {
        strategy: Strategy::Sequential,
        ..cfg.options.clone()
    };
    let results = par::map_jobs(cfg.options.strategy, &automata, |a| decide(a, &inner).map(|(o, _)| o));
    let mut s = String::new();
    let mut rows = Vec::new();
    for (sd, r) in seeds.iter().zip(results) {
        let outcome: Outcome = r?;
        if json {
            rows.push(json!({ "seed": sd, "outcome": outcome }));
        } else {
            writeln!(s, "seed {sd}: {outcome}").unwrap();
        }
    }
    if json {
        return Ok(serde_json::to_string_pretty(&rows)? + "\n");
    }
    Ok(s)
}
