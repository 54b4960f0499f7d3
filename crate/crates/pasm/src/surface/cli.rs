//! Command-line front end. Exit codes: 0 success, 1 diagnostics (parse or
//! usage errors, unreadable files), 2 a property violation, 3 a runtime
//! error such as a clash or a range error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::gallery::{self, verify_gallery};
use crate::machine::{canonical_updates, check_isomorphism_preservation, Halt, Machine};
use crate::sample::{mutate, random_permutation, random_state};
use crate::state::State;
use crate::synthesis::{machine_oracle, observed_updates, synthesize_machine, synthesize_rule, SynthesisError};
use crate::witness::{check_bounded_exploration, extract_witness, w_similar};

use super::{parse_machine, parse_state_with, print_state, Diagnostics};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTICS: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "pasm", version, about = "Run, check and synthesise parallel abstract state machines")]
pub struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a machine from a state until a fixpoint, a failure or the step limit.
    Run {
        machine: PathBuf,
        state: PathBuf,
        #[arg(long, default_value_t = 100)]
        max_steps: usize,
        /// Write every state of the run to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Print the update set of one step and the successor state.
    Step { machine: PathBuf, state: PathBuf },
    /// Print the witness terms extracted from the machine's rule.
    Witness {
        machine: PathBuf,
        /// Add the single-column subterms of every tuple-headed term.
        #[arg(long)]
        closure: bool,
    },
    /// Sample state pairs and check bounded exploration and isomorphism invariance.
    CheckPostulates {
        machine: PathBuf,
        #[arg(long, default_value_t = 200)]
        pairs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_atoms: usize,
        /// Mutate this state instead of generating random instances.
        #[arg(long)]
        state: Option<PathBuf>,
    },
    /// Synthesise a rule (one state) or a guarded machine (several states)
    /// from the given machine used as an oracle, and check it on the states.
    Synthesize {
        machine: PathBuf,
        #[arg(required = true)]
        states: Vec<PathBuf>,
    },
    /// Parse machine and state files and report diagnostics.
    Parse {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Machine whose vocabulary state files without one are read against.
        #[arg(long)]
        machine: Option<PathBuf>,
    },
    /// Compare every gallery machine with its reference oracle.
    VerifyGallery {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// A finished command: exit code, report text and its JSON form.
struct Outcome {
    code: i32,
    text: String,
    json: Json,
}

impl Outcome {
    fn new(code: i32, text: String, json: Json) -> Outcome {
        Outcome { code, text, json }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report to `out` and failures to `err`. Returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_DIAGNOSTICS } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run { machine, state, max_steps, trace } => cmd_run(machine, state, *max_steps, trace.as_deref()),
        Command::Step { machine, state } => cmd_step(machine, state),
        Command::Witness { machine, closure } => cmd_witness(machine, *closure),
        Command::CheckPostulates { machine, pairs, seed, max_atoms, state } => {
            cmd_check(machine, *pairs, *seed, *max_atoms, state.as_deref())
        }
        Command::Synthesize { machine, states } => cmd_synthesize(machine, states),
        Command::Parse { files, machine } => cmd_parse(files, machine.as_deref()),
        Command::VerifyGallery { seed } => Ok(cmd_verify(*seed)),
    };
    let outcome = result.unwrap_or_else(|o| o);
    let written = if cli.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&outcome.json).expect("reports serialise"))
    } else if outcome.code == EXIT_DIAGNOSTICS {
        write!(err, "{}", outcome.text)
    } else {
        write!(out, "{}", outcome.text)
    };
    if written.is_err() {
        return EXIT_RUNTIME;
    }
    outcome.code
}

type CmdResult = Result<Outcome, Outcome>;

fn failure(code: i32, message: String) -> Outcome {
    Outcome::new(code, format!("{message}\n"), json!({ "error": message, "exit": code }))
}

fn read(path: &Path) -> Result<String, Outcome> {
    std::fs::read_to_string(path).map_err(|e| failure(EXIT_DIAGNOSTICS, format!("{}: {e}", path.display())))
}

fn diagnostics(path: &Path, src: &str, d: &Diagnostics) -> Outcome {
    let items: Vec<Json> = d
        .0
        .iter()
        .map(|x| {
            let (line, col) = x.span.line_col(src);
            json!({ "line": line, "column": col, "message": x.message })
        })
        .collect();
    Outcome::new(
        EXIT_DIAGNOSTICS,
        format!("{}\n", d.render(&path.display().to_string(), src)),
        json!({ "file": path.display().to_string(), "diagnostics": items }),
    )
}

fn load_machine(path: &Path) -> Result<Machine, Outcome> {
    let src = read(path)?;
    parse_machine(&src).map_err(|d| diagnostics(path, &src, &d))
}

fn load_state(path: &Path, m: &Machine) -> Result<State, Outcome> {
    let src = read(path)?;
    let s = parse_state_with(&src, Some(&m.vocab)).map_err(|d| diagnostics(path, &src, &d))?;
    m.check_state(&s).map_err(|e| failure(EXIT_DIAGNOSTICS, format!("{}: {e}", path.display())))?;
    Ok(s)
}

fn cmd_run(machine: &Path, state: &Path, max_steps: usize, trace_path: Option<&Path>) -> CmdResult {
    let m = load_machine(machine)?;
    let s0 = load_state(state, &m)?;
    let trace = m.run(&s0, max_steps).map_err(|e| failure(EXIT_RUNTIME, e.to_string()))?;
    if let Some(p) = trace_path {
        let mut body = String::new();
        for (i, s) in trace.states.iter().enumerate() {
            body += &format!("// state {i}\n{}\n", print_state(s));
        }
        std::fs::write(p, body).map_err(|e| failure(EXIT_RUNTIME, format!("{}: {e}", p.display())))?;
    }
    let detail = match &trace.halt {
        Halt::Clash(locs) => format!(" at {}", locs.join(", ")),
        Halt::RangeError(e) => format!(": {e}"),
        _ => String::new(),
    };
    let code = match trace.halt {
        Halt::Fixpoint | Halt::StepLimit => EXIT_OK,
        Halt::Clash(_) | Halt::RangeError(_) => EXIT_RUNTIME,
    };
    let last = print_state(trace.last());
    let mut text = format!("halt: {}{detail}\nsteps: {}\n", trace.halt.as_str(), trace.steps());
    for (i, u) in trace.updates.iter().enumerate() {
        text += &format!("step {}: {}\n", i + 1, u.render(&m.vocab).join(", "));
    }
    text += &format!("final state:\n{last}");
    if !text.ends_with('\n') {
        text.push('\n');
    }
    let updates: Vec<Vec<String>> = trace.updates.iter().map(|u| u.render(&m.vocab)).collect();
    let json = json!({
        "halt": trace.halt.as_str(),
        "detail": detail.trim_start_matches([':', ' ']).trim_start_matches("at "),
        "steps": trace.steps(),
        "updates": updates,
        "final": last,
    });
    Ok(Outcome::new(code, text, json))
}

fn cmd_step(machine: &Path, state: &Path) -> CmdResult {
    let m = load_machine(machine)?;
    let s = load_state(state, &m)?;
    let (next, out) = m.step(&s).map_err(|e| failure(EXIT_RUNTIME, e.to_string()))?;
    let updates = out.updates.render(&m.vocab);
    let printed = print_state(&next);
    let mut text = String::from("updates:\n");
    for u in &updates {
        text += &format!("  {u}\n");
    }
    text += &format!("next state:\n{printed}");
    if !text.ends_with('\n') {
        text.push('\n');
    }
    Ok(Outcome::new(EXIT_OK, text, json!({ "updates": updates, "next": printed })))
}

fn cmd_witness(machine: &Path, closure: bool) -> CmdResult {
    let m = load_machine(machine)?;
    let mut w = extract_witness(&m.rule);
    if closure {
        w = w.subterm_closure();
    }
    let terms: Vec<String> = w.iter().map(|t| t.render(&m.vocab)).collect();
    let text = terms.iter().map(|t| format!("{t}\n")).collect();
    Ok(Outcome::new(EXIT_OK, text, json!({ "terms": terms })))
}

fn cmd_check(machine: &Path, pairs: usize, seed: u64, max_atoms: usize, base: Option<&Path>) -> CmdResult {
    let m = load_machine(machine)?;
    let base = base.map(|p| load_state(p, &m)).transpose()?;
    let w = extract_witness(&m.rule);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fixture = gallery::fixture(&m.name).filter(|f| f.machine().vocab == m.vocab);
    let (generator, sample) = match (&base, fixture) {
        (Some(b), _) => {
            let sample: Vec<(State, State)> = (0..pairs)
                .map(|_| {
                    let s = mutate(b, &mut rng, 3);
                    let t = mutate(&s, &mut rng, 3);
                    (s, t)
                })
                .collect();
            ("mutations of the given state", sample)
        }
        (None, Some(f)) => ("gallery instances", gallery::sample_pairs(f, &m, &mut rng, pairs)),
        (None, None) => {
            let sample = (0..pairs)
                .map(|_| {
                    let s = random_state(&m.vocab, &mut rng, max_atoms);
                    let t = mutate(&s, &mut rng, 3);
                    (s, t)
                })
                .collect();
            ("random states over the vocabulary", sample)
        }
    };
    let rep = check_bounded_exploration(&m, &w, &sample);
    let mut iso_checked = 0;
    let mut iso_failed = Vec::new();
    for (i, (s, _)) in sample.iter().enumerate() {
        let z = random_permutation(s, &mut rng);
        match check_isomorphism_preservation(&m, s, &z) {
            Ok(true) => iso_checked += 1,
            Ok(false) => {
                iso_checked += 1;
                iso_failed.push(i);
            }
            // A step that fails is outside the property; it is counted below.
            Err(_) => {}
        }
    }
    let ok = rep.ok() && iso_failed.is_empty();
    let mut text = format!(
        "machine {}, seed {seed}, {} pairs ({generator})\nbounded exploration: {} coinciding, {} one-sided errors, {} violations\nisomorphism: {} checked, {} violations\n",
        m.name,
        rep.pairs,
        rep.coinciding,
        rep.errors,
        rep.violations.len(),
        iso_checked,
        iso_failed.len()
    );
    for v in &rep.violations {
        let show = |r: &Result<crate::state::UpdateSet, String>| match r {
            Ok(u) => u.render(&m.vocab).join(", "),
            Err(e) => format!("error: {e}"),
        };
        text += &format!("  pair {}: {{{}}} vs {{{}}}\n", v.index, show(&v.left), show(&v.right));
    }
    for i in &iso_failed {
        text += &format!("  isomorphism fails on sample {i}\n");
    }
    text += if ok { "result: ok\n" } else { "result: VIOLATION\n" };
    let json = json!({
        "machine": m.name,
        "seed": seed,
        "pairs": rep.pairs,
        "generator": generator,
        "coinciding": rep.coinciding,
        "one_sided_errors": rep.errors,
        "exploration_violations": rep.violations.iter().map(|v| v.index).collect::<Vec<_>>(),
        "isomorphism_checked": iso_checked,
        "isomorphism_violations": iso_failed,
        "ok": ok,
    });
    Ok(Outcome::new(if ok { EXIT_OK } else { EXIT_VIOLATION }, text, json))
}

fn synthesis_failure(e: SynthesisError) -> Outcome {
    let code = match e {
        SynthesisError::CriticalityViolation(_) | SynthesisError::CoverageGap => EXIT_VIOLATION,
        _ => EXIT_RUNTIME,
    };
    failure(code, e.to_string())
}

fn cmd_synthesize(machine: &Path, paths: &[PathBuf]) -> CmdResult {
    let m = load_machine(machine)?;
    let states = paths.iter().map(|p| load_state(p, &m)).collect::<Result<Vec<_>, _>>()?;
    let w = extract_witness(&m.rule);
    let oracle = machine_oracle(&m);
    let (synth, classes) = if states.len() == 1 {
        let rule = synthesize_rule(&oracle, &states[0], &w).map_err(synthesis_failure)?;
        let sm = Machine::new("synthesized", m.vocab.clone(), rule)
            .map_err(|e| synthesis_failure(SynthesisError::IllFormed(e)))?;
        (sm, 1)
    } else {
        let sm = synthesize_machine(&oracle, &states, &w).map_err(synthesis_failure)?;
        let n = sm.representatives.len();
        (sm.machine, n)
    };
    let mut text = format!("{}\n", synth.render().trim_end());
    let mut report = Vec::new();
    let mut ok = true;
    for (p, s) in paths.iter().zip(&states) {
        let expected = observed_updates(&oracle, s).map_err(synthesis_failure)?;
        let similar = w_similar(&states[0], s, &w);
        let got = synth.updates(s).map(|o| canonical_updates(&o).nontrivial(s));
        let agrees = got.as_ref().is_ok_and(|u| *u == expected);
        ok &= agrees;
        text += &format!(
            "// {}: {} (similar to the first state: {similar})\n",
            p.display(),
            if agrees { "agrees with the oracle" } else { "DISAGREES with the oracle" }
        );
        report.push(json!({ "state": p.display().to_string(), "agrees": agrees, "similar_to_first": similar }));
    }
    let json = json!({ "rule": synth.render(), "classes": classes, "states": report, "ok": ok });
    Ok(Outcome::new(if ok { EXIT_OK } else { EXIT_VIOLATION }, text, json))
}

fn cmd_parse(files: &[PathBuf], machine: Option<&Path>) -> CmdResult {
    let m = machine.map(load_machine).transpose()?;
    let mut text = String::new();
    let mut items = Vec::new();
    let mut failed = false;
    for path in files {
        let src = read(path)?;
        let is_state = path.extension().is_some_and(|e| e == "state");
        let result = if is_state {
            parse_state_with(&src, m.as_ref().map(|m| &m.vocab)).map(|_| ())
        } else {
            parse_machine(&src).map(|_| ())
        };
        match result {
            Ok(()) => {
                text += &format!("{}: ok\n", path.display());
                items.push(json!({ "file": path.display().to_string(), "ok": true }));
            }
            Err(d) => {
                failed = true;
                let o = diagnostics(path, &src, &d);
                text += &o.text;
                let mut j = o.json;
                j["ok"] = json!(false);
                items.push(j);
            }
        }
    }
    let code = if failed { EXIT_DIAGNOSTICS } else { EXIT_OK };
    Ok(Outcome::new(code, text, json!({ "files": items })))
}

fn cmd_verify(seed: u64) -> Outcome {
    let rep = verify_gallery(seed, &mut |_, _, _| {});
    let fixtures: Vec<Json> = rep
        .fixtures
        .iter()
        .map(|c| {
            json!({
                "fixture": c.fixture,
                "cases": c.cases,
                "steps": c.steps,
                "inconclusive": c.inconclusive,
                "failures": c.failures,
            })
        })
        .collect();
    let code = if rep.ok() { EXIT_OK } else { EXIT_VIOLATION };
    Outcome::new(code, rep.render(), json!({ "seed": seed, "fixtures": fixtures, "ok": rep.ok() }))
}
