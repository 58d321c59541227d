//! Command-line surface for the Artin defining-graph calculus.
//!
//! Exit codes: 0 affirmative/success, 1 negative, 2 inconclusive (budget),
//! 3 usage errors, 4 file or parse errors, 5 domain errors (bad moves,
//! violated preconditions). JSON payloads go to stdout, diagnostics to
//! stderr; all outputs are deterministic for identical inputs and flags.

use artin_core::certify::{self, VerdictLevel};
use artin_core::gog::{ExpansionSpec, GraphOfGroups, NodeColour};
use artin_core::ribbon::{self, RibbonLetter};
use artin_core::twist::{self, DehnTwistSpec, TwistStepDto, TwistVerdict};
use artin_core::{coxeter, gog, DefiningGraph};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;
use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULT_BUDGET: usize = 100_000;

#[derive(Parser)]
#[command(
    name = "artin",
    about = "Calculus of Artin defining graphs: chunks, twists, ribbons, graphs of groups, certification",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Big-chunk decomposition and separating vertices of a graph.
    Chunks { file: PathBuf },
    /// Classification summary (spherical, large, right-angled, ...) of the
    /// whole graph or a subset.
    Classify {
        file: PathBuf,
        /// Comma-separated vertex names; defaults to all vertices.
        #[arg(long)]
        subset: Option<String>,
    },
    /// All elementary twist moves available on a graph.
    Twists { file: PathBuf },
    /// Breadth-first twist orbit modulo isomorphism.
    Orbit {
        file: PathBuf,
        /// Maximum number of canonical forms to store.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Worker threads for frontier expansion.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Decide twist equivalence of two graphs (exit 0 yes / 1 no / 2
    /// inconclusive); prints a replay-verified witness on yes.
    Equiv {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        /// Verify a previously emitted witness file instead of searching.
        #[arg(long, hide = true)]
        replay: Option<PathBuf>,
    },
    /// The crushed graph-of-groups decomposition of a one-ended graph.
    Mgs {
        file: PathBuf,
        /// Emit Graphviz text instead of JSON.
        #[arg(long)]
        dot: bool,
    },
    /// Operations on serialized graphs of groups.
    Gog {
        #[command(subcommand)]
        op: GogOp,
    },
    /// Shortest odd-path ribbon witness conjugating s to t.
    RibbonWitness {
        file: PathBuf,
        s: String,
        t: String,
    },
    /// Validate a ribbon word (a JSON letter list) between two vertices.
    RibbonValidate {
        file: PathBuf,
        word: PathBuf,
        source: String,
        target: String,
    },
    /// Compile a Dehn twist (given by a ribbon word) into elementary twists.
    DehnCompile { file: PathBuf, spec: PathBuf },
    /// Certify the strong twist conjecture hypotheses (exit 0 iff
    /// strong_certified).
    Certify { file: PathBuf },
}

#[derive(Subcommand)]
enum GogOp {
    /// Collapse until no collapsible link remains (least link first).
    Reduce { file: PathBuf },
    /// Collapse one link by index.
    Collapse {
        file: PathBuf,
        #[arg(long)]
        link: usize,
    },
    /// Split a node in two (elementary expansion).
    Expand {
        file: PathBuf,
        #[command(flatten)]
        spec: ExpandArgs,
    },
    /// Indices of links that survive some reduction.
    Surviving { file: PathBuf },
}

#[derive(Args)]
struct ExpandArgs {
    /// Node id to split.
    #[arg(long)]
    node: usize,
    /// Group kept on the split node (comma-separated vertices).
    #[arg(long)]
    kept: String,
    /// Group of the new node.
    #[arg(long)]
    split: String,
    /// Group of the fresh link.
    #[arg(long)]
    link_group: String,
    /// Id for the new node.
    #[arg(long)]
    new_id: usize,
    /// Colour of the new node.
    #[arg(long, default_value = "plain")]
    new_colour: String,
    /// Link indices whose `a` endpoint moves to the new node.
    #[arg(long, value_delimiter = ',')]
    move_a: Vec<usize>,
    /// Link indices whose `b` endpoint moves to the new node.
    #[arg(long, value_delimiter = ',')]
    move_b: Vec<usize>,
}

enum Failure {
    /// File system or document syntax problems.
    Input(String),
    /// Precondition or move failures inside the calculus.
    Domain(String),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Domain(m) => f.write_str(m),
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 4,
            Failure::Domain(_) => 5,
        }
    }
}

fn domain<E: fmt::Display>(e: E) -> Failure {
    Failure::Domain(e.to_string())
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &PathBuf) -> Result<DefiningGraph, Failure> {
    DefiningGraph::parse(&read_file(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_gog(path: &PathBuf) -> Result<GraphOfGroups, Failure> {
    GraphOfGroups::parse(&read_file(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_vertex_list(text: &str) -> BTreeSet<String> {
    text.split(',')
        .map(|s| s.trim().to_owned())
        .filter(|s| !s.is_empty())
        .collect()
}

/// Prints without panicking when the consumer closes the pipe early.
fn emit(text: &str) {
    use std::io::Write;
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    let _ = writeln!(lock, "{text}");
}

fn print_json(value: &serde_json::Value) {
    emit(&serde_json::to_string_pretty(value).expect("valid JSON"));
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}

fn dispatch(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Chunks { file } => {
            let g = load_graph(&file)?;
            let dec = g.big_chunks();
            print_json(&serde_json::to_value(&dec).expect("serializable"));
            Ok(0)
        }
        Command::Classify { file, subset } => {
            let g = load_graph(&file)?;
            let subset = match subset {
                Some(text) => parse_vertex_list(&text),
                None => g.vertex_set(),
            };
            let class = coxeter::classify(&g, &subset).map_err(domain)?;
            print_json(&serde_json::to_value(&class).expect("serializable"));
            Ok(0)
        }
        Command::Twists { file } => {
            let g = load_graph(&file)?;
            let moves = twist::enumerate_twists(&g).map_err(domain)?;
            print_json(&serde_json::to_value(&moves).expect("serializable"));
            Ok(0)
        }
        Command::Orbit { file, budget, jobs } => {
            let g = load_graph(&file)?;
            let orbit = twist::twist_orbit_jobs(&g, budget, jobs.max(1)).map_err(domain)?;
            let certificates: Vec<String> =
                orbit.representatives.keys().map(|c| c.to_hex()).collect();
            let tree: Vec<serde_json::Value> = orbit
                .tree
                .iter()
                .map(|e| {
                    json!({
                        "parent": e.parent.to_hex(),
                        "child": e.child.to_hex(),
                        "move": {
                            "J": e.mv.j.iter().collect::<Vec<_>>(),
                            "B": e.mv.b.iter().collect::<Vec<_>>(),
                        },
                    })
                })
                .collect();
            print_json(&json!({
                "size": orbit.size(),
                "truncated": orbit.truncated,
                "certificates": certificates,
                "tree": tree,
            }));
            Ok(if orbit.truncated { 2 } else { 0 })
        }
        Command::Equiv {
            file1,
            file2,
            budget,
            replay,
        } => {
            let g1 = load_graph(&file1)?;
            let g2 = load_graph(&file2)?;
            if let Some(witness_path) = replay {
                let dtos: Vec<TwistStepDto> = serde_json::from_str(&read_file(&witness_path)?)
                    .map_err(|e| Failure::Input(format!("{}: {e}", witness_path.display())))?;
                return match verify_witness(&g1, &g2, &dtos) {
                    Ok(()) => {
                        print_json(&json!({"replay": "ok"}));
                        Ok(0)
                    }
                    Err(reason) => {
                        eprintln!("witness does not replay: {reason}");
                        Ok(1)
                    }
                };
            }
            match twist::are_twist_equivalent(&g1, &g2, budget).map_err(domain)? {
                TwistVerdict::Equivalent { witness } => {
                    let dtos = witness.to_dtos();
                    // Hidden verification pass: never print an unreplayable
                    // witness.
                    verify_witness(&g1, &g2, &dtos).map_err(Failure::Domain)?;
                    print_json(&json!({
                        "verdict": "yes",
                        "witness": serde_json::to_value(&dtos).expect("serializable"),
                    }));
                    Ok(0)
                }
                TwistVerdict::NotEquivalent { reason } => {
                    print_json(&json!({"verdict": "no", "reason": reason}));
                    Ok(1)
                }
                TwistVerdict::Inconclusive { explored } => {
                    print_json(&json!({
                        "verdict": "inconclusive",
                        "explored": explored,
                        "budget": budget,
                    }));
                    Ok(2)
                }
            }
        }
        Command::Mgs { file, dot } => {
            let g = load_graph(&file)?;
            let ms = gog::build_ms(&g).map_err(domain)?;
            if dot {
                emit(ms.to_dot().trim_end());
            } else {
                emit(&ms.to_json());
            }
            Ok(0)
        }
        Command::Gog { op } => run_gog(op),
        Command::RibbonWitness { file, s, t } => {
            let g = load_graph(&file)?;
            for v in [&s, &t] {
                if !g.contains_vertex(v) {
                    return Err(Failure::Domain(format!("unknown vertex `{v}`")));
                }
            }
            match ribbon::ribbon_witness(&g, &s, &t) {
                Some(word) => {
                    print_json(&json!({
                        "source": word.source,
                        "target": word.target,
                        "letters": serde_json::to_value(&word.letters).expect("serializable"),
                        "chain": word.chain,
                    }));
                    Ok(0)
                }
                None => {
                    print_json(&json!({"witness": null}));
                    Ok(1)
                }
            }
        }
        Command::RibbonValidate {
            file,
            word,
            source,
            target,
        } => {
            let g = load_graph(&file)?;
            let letters: Vec<RibbonLetter> = serde_json::from_str(&read_file(&word)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", word.display())))?;
            match ribbon::validate_ribbon(&g, &letters, &source, &target) {
                Ok(valid) => {
                    print_json(&json!({"valid": true, "chain": valid.chain}));
                    Ok(0)
                }
                Err(e) => {
                    print_json(&json!({"valid": false, "reason": e.to_string()}));
                    Ok(1)
                }
            }
        }
        Command::DehnCompile { file, spec } => {
            let g = load_graph(&file)?;
            let spec_file: DehnSpecFile = serde_json::from_str(&read_file(&spec)?)
                .map_err(|e| Failure::Input(format!("{}: {e}", spec.display())))?;
            let h = ribbon::validate_ribbon(&g, &spec_file.h, &spec_file.r, &spec_file.r)
                .map_err(domain)?;
            let spec = DehnTwistSpec {
                r: spec_file.r,
                b: spec_file.b.into_iter().collect(),
                c: spec_file.c.into_iter().collect(),
                h,
            };
            let seq = twist::compile_dehn_twist(&g, &spec).map_err(domain)?;
            print_json(&serde_json::to_value(seq.to_dtos()).expect("serializable"));
            Ok(0)
        }
        Command::Certify { file } => {
            let g = load_graph(&file)?;
            let verdict = certify::strong_twist_verdict(&g).map_err(domain)?;
            print_json(&serde_json::to_value(&verdict).expect("serializable"));
            Ok(if verdict.level == VerdictLevel::StrongCertified {
                0
            } else {
                1
            })
        }
    }
}

fn run_gog(op: GogOp) -> Result<u8, Failure> {
    match op {
        GogOp::Reduce { file } => {
            let gog = load_gog(&file)?;
            emit(&gog.reduce().to_json());
            Ok(0)
        }
        GogOp::Collapse { file, link } => {
            let gog = load_gog(&file)?;
            let out = gog.collapse(link).map_err(domain)?;
            emit(&out.gog.to_json());
            Ok(0)
        }
        GogOp::Expand { file, spec } => {
            let gog = load_gog(&file)?;
            let colour = match spec.new_colour.as_str() {
                "black" => NodeColour::Black,
                "white" => NodeColour::White,
                "plain" => NodeColour::Plain,
                other => {
                    return Err(Failure::Input(format!(
                        "unknown colour `{other}` (black, white, plain)"
                    )))
                }
            };
            let expansion = ExpansionSpec {
                node: spec.node,
                kept_group: parse_vertex_list(&spec.kept),
                split_group: parse_vertex_list(&spec.split),
                link_group: parse_vertex_list(&spec.link_group),
                new_node_id: spec.new_id,
                new_colour: colour,
                move_a: spec.move_a.into_iter().collect(),
                move_b: spec.move_b.into_iter().collect(),
            };
            let out = gog.expand(&expansion).map_err(domain)?;
            emit(&out.gog.to_json());
            Ok(0)
        }
        GogOp::Surviving { file } => {
            let gog = load_gog(&file)?;
            let surviving: Vec<usize> = gog.surviving_links().into_iter().collect();
            print_json(&json!({
                "surviving": surviving,
                "collapsible": gog.collapsible_links(),
                "betti": gog.betti(),
            }));
            Ok(0)
        }
    }
}

#[derive(Deserialize)]
struct DehnSpecFile {
    r: String,
    #[serde(rename = "B")]
    b: Vec<String>,
    #[serde(rename = "C")]
    c: Vec<String>,
    h: Vec<RibbonLetter>,
}

/// Replays a serialized witness from `g1` and checks the result lands in
/// `g2`'s isomorphism class.
fn verify_witness(
    g1: &DefiningGraph,
    g2: &DefiningGraph,
    dtos: &[TwistStepDto],
) -> Result<(), String> {
    let seq = twist::TwistSequence::from_dtos(g1, dtos).map_err(|e| e.to_string())?;
    let state = seq.replay(g1).map_err(|e| e.to_string())?;
    if state.graph.is_isomorphic(g2).is_none() {
        return Err("replayed graph is not isomorphic to the target".into());
    }
    Ok(())
}
