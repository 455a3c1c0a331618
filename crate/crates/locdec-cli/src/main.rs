//! `locdec` — local distributed decision on small graphs, from the command
//! line.
//!
//! Every subcommand reads the line-oriented file formats documented in the
//! library's `textio` module, prints a deterministic `key value` report to
//! stdout (never timing, never paths, never the `--workers` setting), and
//! reports wall time on stderr.  Exit codes: 0 for accept / found /
//! no-counterexample / all-pass, 1 for reject / not-found /
//! counterexample-found / suite-failure, 2 for input errors, with a
//! diagnostic on stderr naming the offending field or line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use locdec::anonymize::{run_lifted, OracleN};
use locdec::graph::{IdentityAssignment, Instance};
use locdec::languages::{self, Language};
use locdec::lift::{
    find_t_local_isomorphism, is_homomorphism, is_t_local_isomorphism,
    lift_closure_counterexample, NodeMap,
};
use locdec::nld::{acceptance_oracle, honest_certificates, verify};
use locdec::semantics::{hereditary_decider, identity_tiebreak_coloring_decider, Verdict};
use locdec::suite::{self, CriterionOutcome, CRITERION_COUNT};
use locdec::textio;
use locdec::Error;

#[derive(Parser)]
#[command(
    name = "locdec",
    version,
    about = "Local distributed decision, identity lifting, and map-certificate verification on small graphs"
)]
struct Cli {
    /// Worker threads for the data-parallel paths; results are identical
    /// for every setting.  Ignored by sequential builds.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DeciderKind {
    /// Anonymous rule: vote yes iff the own ball, read as an instance,
    /// belongs to the language (which must be hereditary).
    Hereditary,
    /// Identity-reading radius-1 coloring rule: vote no iff a neighbor
    /// shares the input and has the larger identity.
    IdColoring,
}

#[derive(Subcommand)]
enum Command {
    /// Run a local decider on an instance and report per-node votes.
    Decide {
        /// Language name: coloring, independent-set, forest, size-at-most:K,
        /// or path-pattern:FILE.
        #[arg(long)]
        language: String,
        /// Instance file (may carry trailing `id` lines).
        #[arg(long)]
        instance: PathBuf,
        /// Identity file overriding any identities in the instance file.
        #[arg(long)]
        ids: Option<PathBuf>,
        /// Ball radius the decider sees.
        #[arg(long)]
        radius: usize,
        #[arg(long, value_enum, default_value_t = DeciderKind::Hereditary)]
        decider: DeciderKind,
    },
    /// Run the anonymized lift of the identity-reading coloring rule under
    /// per-node size bounds, reporting exact replay counts.
    LiftDecider {
        /// Must be `coloring`: the lift wraps the identity tie-break
        /// coloring rule.
        #[arg(long)]
        language: String,
        #[arg(long)]
        instance: PathBuf,
        /// Must be 1, the radius of the wrapped rule.
        #[arg(long)]
        radius: usize,
        /// Uniform upper bound on the instance size handed to every node.
        #[arg(long, conflicts_with = "oracle_bounds")]
        oracle_bound: Option<u64>,
        /// File with one per-node bound per line.
        #[arg(long)]
        oracle_bounds: Option<PathBuf>,
    },
    /// Find a t-local isomorphism between two instances, or verify a given
    /// node map.
    LiftCheck {
        #[arg(long)]
        source: PathBuf,
        #[arg(long)]
        target: PathBuf,
        /// Locality radius.
        #[arg(long)]
        t: usize,
        /// Map file (one 0-based target node per source node); when given
        /// the map is verified instead of searched for.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Scan all instances up to a size cap for a language's closure failure
    /// under t-local projection: a nonmember mapping onto a member.
    ClosureSearch {
        #[arg(long)]
        language: String,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        max_nodes: usize,
        /// Comma-separated hex symbols (`-` for the empty symbol); defaults
        /// to the language's finite alphabet, or the empty symbol alone.
        #[arg(long)]
        alphabet: Option<String>,
    },
    /// Emit honest certificates for an instance: every node cites the
    /// instance itself under a breadth-first labeling.
    NldProve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        language: String,
        /// Write the certificate lines here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify an instance against a certificate file at radius t.
    NldVerify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        certs: PathBuf,
        #[arg(long)]
        language: String,
        #[arg(long)]
        t: usize,
    },
    /// Decide certificate existence independently of any verifier run: does
    /// the instance project onto a member map by a t-local isomorphism?
    NldOracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        language: String,
        #[arg(long)]
        t: usize,
        /// Cap on cited map sizes tried by the search.
        #[arg(long, default_value_t = 8)]
        max_target_nodes: usize,
    },
    /// Run the acceptance batteries and print one line per criterion.
    Suite {
        /// Run a single criterion (1 through 10) instead of all of them.
        #[arg(long, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..=CRITERION_COUNT as u64 + 1))]
        only: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_workers(cli.workers);
    let started = Instant::now();
    let result = dispatch(cli.command);
    eprintln!("elapsed_ms {}", started.elapsed().as_millis());
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

#[cfg(feature = "parallel")]
fn configure_workers(workers: Option<usize>) {
    if let Some(n) = workers {
        // 0 falls back to rayon's default sizing, like omitting the flag.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_workers(_workers: Option<usize>) {}

/// Collects `key=value` lines and prints them in one write so reports are
/// never interleaved.
struct Report(String);

impl Report {
    fn new(command: &str) -> Self {
        Report(format!("command={command}\n"))
    }

    fn kv(&mut self, key: &str, value: impl std::fmt::Display) {
        let _ = writeln!(self.0, "{key}={value}");
    }

    fn print(self) {
        print!("{}", self.0);
    }
}

fn read_instance(path: &Path) -> Result<(Instance, Option<IdentityAssignment>), Error> {
    textio::parse_instance(&std::fs::read_to_string(path)?)
}

fn resolve_alphabet(spec: Option<&str>, language: &Language) -> Result<Vec<Vec<u8>>, Error> {
    match spec {
        Some(csv) => textio::parse_symbol_csv(csv),
        None => Ok(language
            .finite_alphabet()
            .map(|a| a.to_vec())
            .unwrap_or_else(|| vec![Vec::new()])),
    }
}

fn symbols_to_csv(alphabet: &[Vec<u8>]) -> String {
    alphabet
        .iter()
        .map(|s| {
            if s.is_empty() {
                "-".to_string()
            } else {
                hex::encode(s)
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn verdict_code(verdict: Verdict) -> ExitCode {
    match verdict {
        Verdict::Accept => ExitCode::SUCCESS,
        Verdict::Reject => ExitCode::from(1),
    }
}

fn dispatch(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Decide {
            language,
            instance,
            ids,
            radius,
            decider,
        } => decide(&language, &instance, ids.as_deref(), radius, decider),
        Command::LiftDecider {
            language,
            instance,
            radius,
            oracle_bound,
            oracle_bounds,
        } => lift_decider(
            &language,
            &instance,
            radius,
            oracle_bound,
            oracle_bounds.as_deref(),
        ),
        Command::LiftCheck {
            source,
            target,
            t,
            map,
        } => lift_check(&source, &target, t, map.as_deref()),
        Command::ClosureSearch {
            language,
            t,
            max_nodes,
            alphabet,
        } => closure_search(&language, t, max_nodes, alphabet.as_deref()),
        Command::NldProve {
            instance,
            language,
            out,
        } => nld_prove(&instance, &language, out.as_deref()),
        Command::NldVerify {
            instance,
            certs,
            language,
            t,
        } => nld_verify(&instance, &certs, &language, t),
        Command::NldOracle {
            instance,
            language,
            t,
            max_target_nodes,
        } => nld_oracle(&instance, &language, t, max_target_nodes),
        Command::Suite { only } => run_suite(only),
    }
}

fn decide(
    language: &str,
    instance_path: &Path,
    ids_path: Option<&Path>,
    radius: usize,
    kind: DeciderKind,
) -> Result<ExitCode, Error> {
    let language = languages::from_spec(language)?;
    let (instance, embedded_ids) = read_instance(instance_path)?;
    let ids = match ids_path {
        Some(path) => Some(textio::parse_ids(
            &std::fs::read_to_string(path)?,
            instance.node_count(),
        )?),
        None => embedded_ids,
    };

    let decider = match kind {
        DeciderKind::Hereditary => hereditary_decider(&language, radius)?,
        DeciderKind::IdColoring => {
            if radius != 1 {
                return Err(Error::RadiusMismatch(radius, 1));
            }
            identity_tiebreak_coloring_decider()
        }
    };
    let decision = decider.run(&instance, ids.as_ref())?;

    let mut report = Report::new("decide");
    report.kv("language", language.name());
    report.kv(
        "decider",
        match kind {
            DeciderKind::Hereditary => "hereditary",
            DeciderKind::IdColoring => "id-coloring",
        },
    );
    report.kv("radius", radius);
    report.kv("nodes", instance.node_count());
    for (v, vote) in decision.votes.iter().enumerate() {
        report.kv(&format!("node.{v}.vote"), vote);
    }
    report.kv("verdict", decision.verdict);
    report.print();
    Ok(verdict_code(decision.verdict))
}

fn lift_decider(
    language: &str,
    instance_path: &Path,
    radius: usize,
    oracle_bound: Option<u64>,
    oracle_bounds: Option<&Path>,
) -> Result<ExitCode, Error> {
    let language = languages::from_spec(language)?;
    if language.name() != "coloring" {
        return Err(Error::LanguageParameter(format!(
            "lift-decider wraps the identity tie-break coloring rule; \
             --language must be coloring, not {}",
            language.name()
        )));
    }
    if radius != 1 {
        return Err(Error::RadiusMismatch(radius, 1));
    }
    let (instance, _) = read_instance(instance_path)?;
    let oracle = match (oracle_bound, oracle_bounds) {
        (Some(bound), None) => OracleN::uniform(instance.node_count(), bound)?,
        (None, Some(path)) => OracleN::per_node(textio::parse_bounds(
            &std::fs::read_to_string(path)?,
            instance.node_count(),
        )?)?,
        _ => {
            return Err(Error::LanguageParameter(
                "exactly one of --oracle-bound and --oracle-bounds is required".into(),
            ));
        }
    };

    let rule = identity_tiebreak_coloring_decider();
    let run = run_lifted(&instance, &rule, &oracle)?;

    let mut report = Report::new("lift-decider");
    report.kv("language", language.name());
    report.kv("radius", radius);
    report.kv("nodes", instance.node_count());
    let mut planned_total = 0u128;
    let mut performed_total = 0u128;
    for (v, node) in run.nodes.iter().enumerate() {
        report.kv(&format!("node.{v}.ball_nodes"), node.ball_nodes);
        report.kv(&format!("node.{v}.planned"), node.planned);
        report.kv(&format!("node.{v}.performed"), node.performed);
        report.kv(&format!("node.{v}.vote"), node.vote);
        planned_total += node.planned;
        performed_total += node.performed;
    }
    report.kv("planned_total", planned_total);
    report.kv("performed_total", performed_total);
    report.kv("verdict", run.verdict);
    report.print();
    Ok(verdict_code(run.verdict))
}

fn format_map(map: &NodeMap) -> String {
    map.map()
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn lift_check(
    source_path: &Path,
    target_path: &Path,
    t: usize,
    map_path: Option<&Path>,
) -> Result<ExitCode, Error> {
    let (source, _) = read_instance(source_path)?;
    let (target, _) = read_instance(target_path)?;

    let mut report = Report::new("lift-check");
    report.kv("t", t);
    report.kv("source_nodes", source.node_count());
    report.kv("target_nodes", target.node_count());

    let code = match map_path {
        Some(path) => {
            let images = textio::parse_map(&std::fs::read_to_string(path)?)?;
            let map = NodeMap::new(source, target, images)?;
            let homomorphism = is_homomorphism(&map);
            let local = is_t_local_isomorphism(&map, t)?;
            report.kv("mode", "verify");
            report.kv("map", format_map(&map));
            report.kv("homomorphism", homomorphism);
            report.kv("t_local_isomorphism", local);
            if local {
                report.kv("onto", map.is_onto());
            }
            if local {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        None => {
            report.kv("mode", "search");
            match find_t_local_isomorphism(&source, &target, t)? {
                Some(map) => {
                    report.kv("found", true);
                    report.kv("map", format_map(&map));
                    report.kv("onto", map.is_onto());
                    ExitCode::SUCCESS
                }
                None => {
                    report.kv("found", false);
                    ExitCode::from(1)
                }
            }
        }
    };
    report.print();
    Ok(code)
}

fn closure_search(
    language: &str,
    t: usize,
    max_nodes: usize,
    alphabet: Option<&str>,
) -> Result<ExitCode, Error> {
    let language = languages::from_spec(language)?;
    let alphabet = resolve_alphabet(alphabet, &language)?;
    let outcome = lift_closure_counterexample(&language, t, max_nodes, &alphabet)?;

    let mut report = Report::new("closure-search");
    report.kv("language", language.name());
    report.kv("t", t);
    report.kv("max_nodes", max_nodes);
    report.kv("alphabet", symbols_to_csv(&alphabet));
    report.kv("instances", outcome.instances_enumerated);
    report.kv("candidate_pairs", outcome.candidate_pairs);
    let code = match &outcome.counterexample {
        Some(map) => {
            report.kv("counterexample", "found");
            report.kv(
                "first_hit_index",
                outcome.first_hit_index.expect("hit implies index"),
            );
            report.kv("source_nodes", map.source().node_count());
            report.kv("source_edges", map.source().graph().edge_count());
            report.kv("source_member", language.is_member(map.source()));
            report.kv("target_nodes", map.target().node_count());
            report.kv("target_edges", map.target().graph().edge_count());
            report.kv("target_member", language.is_member(map.target()));
            report.kv("map", format_map(map));
            ExitCode::from(1)
        }
        None => {
            report.kv("counterexample", "none");
            ExitCode::SUCCESS
        }
    };
    report.print();
    Ok(code)
}

fn nld_prove(
    instance_path: &Path,
    language: &str,
    out: Option<&Path>,
) -> Result<ExitCode, Error> {
    let language = languages::from_spec(language)?;
    let (instance, _) = read_instance(instance_path)?;
    let certs = honest_certificates(&instance)?;
    let text = textio::format_certificates(&certs);
    match out {
        Some(path) => {
            std::fs::write(path, &text)?;
            let mut report = Report::new("nld-prove");
            report.kv("language", language.name());
            report.kv("nodes", instance.node_count());
            report.kv(
                "bytes_total",
                certs.iter().map(|c| c.len() as u64).sum::<u64>(),
            );
            report.kv("member", language.is_member(&instance));
            report.kv("written", true);
            report.print();
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn nld_verify(
    instance_path: &Path,
    certs_path: &Path,
    language: &str,
    t: usize,
) -> Result<ExitCode, Error> {
    let language = languages::from_spec(language)?;
    let (instance, _) = read_instance(instance_path)?;
    let certs = textio::parse_certificates(
        &std::fs::read_to_string(certs_path)?,
        instance.node_count(),
    )?;
    let decision = verify(&instance, &certs, &language, t)?;

    let mut report = Report::new("nld-verify");
    report.kv("language", language.name());
    report.kv("t", t);
    report.kv("nodes", instance.node_count());
    for (v, vote) in decision.votes.iter().enumerate() {
        report.kv(&format!("node.{v}.vote"), vote);
    }
    report.kv("verdict", decision.verdict);
    report.print();
    Ok(verdict_code(decision.verdict))
}

fn nld_oracle(
    instance_path: &Path,
    language: &str,
    t: usize,
    max_target_nodes: usize,
) -> Result<ExitCode, Error> {
    let language = languages::from_spec(language)?;
    let (instance, _) = read_instance(instance_path)?;
    let accepting = acceptance_oracle(&instance, &language, t, max_target_nodes)?;

    let mut report = Report::new("nld-oracle");
    report.kv("language", language.name());
    report.kv("t", t);
    report.kv("max_target_nodes", max_target_nodes);
    report.kv("nodes", instance.node_count());
    report.kv("accepting", accepting);
    report.print();
    Ok(if accepting {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_suite(only: Option<usize>) -> Result<ExitCode, Error> {
    let ids: Vec<usize> = match only {
        Some(id) => vec![id],
        None => (1..=CRITERION_COUNT + 1).collect(),
    };

    let mut all_pass = true;
    let mut passed = 0usize;
    for id in &ids {
        let outcome = if *id <= CRITERION_COUNT {
            suite::run_criterion(*id).expect("id validated above")
        } else {
            determinism_criterion()
        };
        println!("{outcome}");
        if outcome.pass {
            passed += 1;
        } else {
            all_pass = false;
        }
    }
    println!("suite {} ({passed}/{} criteria)", if all_pass { "pass" } else { "fail" }, ids.len());
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

/// Criterion 10: every command's stdout is byte-identical across repeat runs
/// and `--workers` settings.  Spawns this same binary on generated fixture
/// files in a scratch directory.
fn determinism_criterion() -> CriterionOutcome {
    match determinism_battery() {
        Ok((commands, variants, mismatches)) => CriterionOutcome {
            id: CRITERION_COUNT + 1,
            title: "reports are byte-identical across runs and workers",
            pass: mismatches == 0,
            detail: format!(
                "commands={commands} runs_per_command={variants} mismatching_commands={mismatches}"
            ),
        },
        Err(err) => CriterionOutcome {
            id: CRITERION_COUNT + 1,
            title: "reports are byte-identical across runs and workers",
            pass: false,
            detail: format!("battery could not run: {err}"),
        },
    }
}

fn determinism_battery() -> Result<(usize, usize, usize), Error> {
    use locdec::enumerate::{cycle, path};

    let dir = std::env::temp_dir().join(format!("locdec-suite-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let write_instance = |name: &str, instance: &Instance| -> Result<String, Error> {
        let path = dir.join(name);
        std::fs::write(&path, textio::format_instance(instance, None))?;
        Ok(path.to_string_lossy().into_owned())
    };

    let triangle = Instance::new(
        cycle(3),
        vec![b"1".to_vec(), b"2".to_vec(), b"3".to_vec()],
    )
    .expect("three inputs for three nodes");
    let mono_edge = Instance::uniform(path(2), b"1");
    let c8 = Instance::uniform(cycle(8), b"");
    let c4 = Instance::uniform(cycle(4), b"");

    let triangle_file = write_instance("triangle.g", &triangle)?;
    let mono_file = write_instance("mono-edge.g", &mono_edge)?;
    let c8_file = write_instance("c8.g", &c8)?;
    let c4_file = write_instance("c4.g", &c4)?;

    let certs_file = dir.join("triangle.certs");
    std::fs::write(
        &certs_file,
        textio::format_certificates(&honest_certificates(&triangle)?),
    )?;
    let certs_file = certs_file.to_string_lossy().into_owned();

    let commands: Vec<Vec<String>> = vec![
        vec![
            "decide".into(),
            "--language".into(),
            "coloring".into(),
            "--instance".into(),
            triangle_file.clone(),
            "--radius".into(),
            "1".into(),
        ],
        vec![
            "decide".into(),
            "--language".into(),
            "coloring".into(),
            "--instance".into(),
            mono_file.clone(),
            "--radius".into(),
            "1".into(),
        ],
        vec![
            "lift-decider".into(),
            "--language".into(),
            "coloring".into(),
            "--instance".into(),
            triangle_file.clone(),
            "--radius".into(),
            "1".into(),
            "--oracle-bound".into(),
            "5".into(),
        ],
        vec![
            "lift-check".into(),
            "--source".into(),
            c8_file.clone(),
            "--target".into(),
            c4_file.clone(),
            "--t".into(),
            "1".into(),
        ],
        vec![
            "closure-search".into(),
            "--language".into(),
            "size-at-most:4".into(),
            "--t".into(),
            "1".into(),
            "--max-nodes".into(),
            "6".into(),
        ],
        vec![
            "nld-prove".into(),
            "--instance".into(),
            triangle_file.clone(),
            "--language".into(),
            "coloring".into(),
        ],
        vec![
            "nld-verify".into(),
            "--instance".into(),
            triangle_file.clone(),
            "--certs".into(),
            certs_file.clone(),
            "--language".into(),
            "coloring".into(),
            "--t".into(),
            "1".into(),
        ],
        vec![
            "nld-oracle".into(),
            "--instance".into(),
            c8_file.clone(),
            "--language".into(),
            "size-at-most:4".into(),
            "--t".into(),
            "1".into(),
            "--max-target-nodes".into(),
            "4".into(),
        ],
    ];

    let exe = std::env::current_exe()?;
    let variants: [&[&str]; 4] = [
        &[],
        &[],
        &["--workers", "1"],
        &["--workers", "2"],
    ];

    let mut mismatches = 0usize;
    for args in &commands {
        let mut outputs: Vec<(Vec<u8>, Option<i32>)> = Vec::new();
        for extra in &variants {
            let output = std::process::Command::new(&exe)
                .args(args.iter())
                .args(extra.iter())
                .output()?;
            outputs.push((output.stdout, output.status.code()));
        }
        let (first_out, first_code) = &outputs[0];
        if !outputs
            .iter()
            .all(|(out, code)| out == first_out && code == first_code)
        {
            mismatches += 1;
        }
    }

    let _ = std::fs::remove_dir_all(&dir);
    Ok((commands.len(), variants.len(), mismatches))
}
