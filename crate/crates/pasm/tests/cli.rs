//! Exit codes and reports of the command-line front end, run in process.

use std::path::PathBuf;

use pasm::surface::cli::{run_cli, EXIT_DIAGNOSTICS, EXIT_OK, EXIT_RUNTIME};

fn gallery(file: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/gallery").join(file).display().to_string()
}

fn scratch(name: &str, body: &str) -> String {
    let dir = std::env::temp_dir().join(format!("pasm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("pasm").chain(args.iter().copied());
    let code = run_cli(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn run_reports_the_halt_reason() {
    let (code, out, _) = cli(&["run", &gallery("circuit.pasm"), &gallery("circuit.state")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("halt: fixpoint\n"), "{out}");
    // The complement machine flips edges forever.
    let (code, out, _) = cli(&["run", &gallery("complement.pasm"), &gallery("k3.state"), "--max-steps", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("halt: step_limit\nsteps: 2\n"), "{out}");
}

#[test]
fn trace_file_holds_every_state() {
    let trace = std::env::temp_dir().join(format!("pasm-trace-{}.txt", std::process::id()));
    let t = trace.display().to_string();
    let (code, _, _) = cli(&["run", &gallery("complement.pasm"), &gallery("k3.state"), "--max-steps", "3", "--trace", &t]);
    assert_eq!(code, EXIT_OK);
    let body = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(body.matches("// state ").count(), 4);
}

#[test]
fn clash_is_a_runtime_error() {
    let m = scratch("clash.pasm", "machine clash\nvocab\n n/0 bridge dynamic\nend\nrule\n n := 1\n n := 2\n");
    let s = scratch("clash.state", "fun n = 0\n");
    let (code, out, _) = cli(&["run", &m, &s]);
    assert_eq!(code, EXIT_RUNTIME);
    assert!(out.starts_with("halt: clash at n"), "{out}");
    let (code, _, _) = cli(&["step", &m, &s]);
    assert_eq!(code, EXIT_RUNTIME);
}

#[test]
fn parse_errors_carry_a_span() {
    let m = scratch("broken.pasm", "machine b\nvocab\n a/0 bridge dynamic\nend\nrule\n par a := 1\n");
    let (code, _, err) = cli(&["parse", &m]);
    assert_eq!(code, EXIT_DIAGNOSTICS);
    assert!(err.contains("broken.pasm:6:2: error:"), "{err}");
    let (code, out, _) = cli(&["parse", &m, "--json"]);
    assert_eq!(code, EXIT_DIAGNOSTICS);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["files"][0]["diagnostics"][0]["line"], 6);
}

#[test]
fn missing_files_and_bad_flags_are_diagnostics() {
    assert_eq!(cli(&["witness", "/nonexistent.pasm"]).0, EXIT_DIAGNOSTICS);
    assert_eq!(cli(&["run", &gallery("fo.pasm")]).0, EXIT_DIAGNOSTICS);
    assert_eq!(cli(&["frobnicate"]).0, EXIT_DIAGNOSTICS);
    assert_eq!(cli(&["--help"]).0, EXIT_OK);
}

#[test]
fn witness_prints_one_term_per_line() {
    let (code, out, _) = cli(&["witness", &gallery("complement.pasm")]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 6);
    assert!(out.lines().all(|l| l.starts_with("{{ ")));
    let (_, closed, _) = cli(&["witness", &gallery("complement.pasm"), "--closure"]);
    assert!(closed.lines().count() > 6);
}

#[test]
fn check_postulates_passes_on_the_complement_machine() {
    let (code, out, _) = cli(&["check-postulates", &gallery("complement.pasm"), "--pairs", "200", "--seed", "42"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.ends_with("result: ok\n"));
    let (code, out, _) =
        cli(&["check-postulates", &gallery("complement.pasm"), "--pairs", "20", "--state", &gallery("k3.state"), "--json"]);
    assert_eq!(code, EXIT_OK);
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["generator"], "mutations of the given state");
}

#[test]
fn check_postulates_generates_states_for_unknown_machines() {
    let m = scratch(
        "swap.pasm",
        "machine swap\nvocab\n R/2 bridge dynamic relational\n c/0 bridge dynamic\nend\nrule\n forall x, y with R(x, y) do\n R(y, x) := true\n enddo\n c := c\n",
    );
    let (code, out, _) = cli(&["check-postulates", &m, "--pairs", "60", "--seed", "3", "--max-atoms", "3"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("random states over the vocabulary"));
}

#[test]
fn synthesize_over_several_states_builds_a_guarded_machine() {
    let empty = scratch("empty3.state", "carrier @a @b @c\nfun V(@a) = true\nfun V(@b) = true\nfun V(@c) = true\n");
    let (code, out, _) = cli(&["synthesize", &gallery("complement.pasm"), &gallery("k3.state"), &empty, "--json"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let j: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(j["ok"], true);
    assert_eq!(j["classes"], 1);
}

#[test]
fn verify_gallery_is_seeded() {
    let (code, a, _) = cli(&["verify-gallery", "--seed", "11"]);
    assert_eq!(code, EXIT_OK, "{a}");
    assert_eq!(cli(&["verify-gallery", "--seed", "11"]).1, a);
    assert!(a.starts_with("gallery verification, seed 11\n"));
}
