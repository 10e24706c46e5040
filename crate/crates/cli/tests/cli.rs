use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stableforms"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn theta_writes_identical_files_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["theta", "--form", "E8", "--genus", "2", "--trace-bound", "4", "--out", "a.txt"];
    let first = run(dir.path(), &args);
    assert_eq!(first.status.code(), Some(0));
    assert!(stdout(&first).contains("[2,-1; -1,2]"));
    let a = std::fs::read(dir.path().join("a.txt")).unwrap();
    let second = run(dir.path(), &args);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(a, std::fs::read(dir.path().join("a.txt")).unwrap());
    assert!(String::from_utf8(a).unwrap().starts_with("expansion genus=2 weight=4/1 trace_bound=4 form=E8\n"));
}

#[test]
fn theta_default_output_in_working_directory() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["theta", "--form", "D16PLUS", "--genus", "1", "--trace-bound", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("theta_D16PLUS_g1_b4.txt")).unwrap();
    assert!(text.contains("\n2: 480\n"));
    assert!(text.contains("\n4: 61920\n"));
}

#[test]
fn unknown_form_and_bad_arguments_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["theta", "--form", "A2"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["theta", "--genus", "x"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["theta", "--trace-bound", "3"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["nonsense"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn budget_exhaustion_is_a_computational_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &["theta", "--genus", "3", "--trace-bound", "6", "--budget", "10", "--out", "x.txt"],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("x.txt").exists());
}

#[test]
fn igusa_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let g0 = run(dir.path(), &["igusa", "--genus", "0", "--trace-bound", "4"]);
    assert_eq!(g0.status.code(), Some(0));
    assert!(stdout(&g0).contains(": zero"));
    let g2 = run(dir.path(), &["igusa", "--genus", "2", "--trace-bound", "4"]);
    assert_eq!(g2.status.code(), Some(0));
    assert!(stdout(&g2).contains("identically zero"));
    let g4 = run(dir.path(), &["igusa", "--genus", "4", "--trace-bound", "8"]);
    assert_eq!(g4.status.code(), Some(0));
    let text = stdout(&g4);
    assert!(text.contains("witness T = [2,-1,-1,-1; -1,2,0,0; -1,0,2,0; -1,0,0,2]; difference 5160960"));
    assert!(text.contains("singular coefficients all zero"));
}

#[test]
fn cache_reuse_and_stale_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["stable-check", "--form", "E8", "--genus", "2", "--trace-bound", "4", "--cache", "c"];
    let first = run(dir.path(), &args);
    assert_eq!(first.status.code(), Some(0));
    assert!(stdout(&first).contains("genus 2 -> 1: coherent"));
    let second = run(dir.path(), &args);
    assert!(stdout(&second).contains("using cached"));

    let path = dir.path().join("c/theta_E8_g2_b4.txt");
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replace("2 0 2: 30240", "2 0 2: 30241")).unwrap();
    let third = run(dir.path(), &args);
    assert_eq!(third.status.code(), Some(0));
    assert!(stdout(&third).contains("rejecting"));
    assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn injected_fault_is_localised() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["stable-check", "--form", "E8", "--genus", "2", "--trace-bound", "4", "--cache", "c"];
    assert_eq!(run(dir.path(), &args).status.code(), Some(0));

    // Re-sign the tampered file so the checksum passes and only the content is wrong.
    let path = dir.path().join("c/theta_E8_g2_b4.txt");
    let text = std::fs::read_to_string(&path).unwrap();
    let body: String = text.lines().filter(|l| !l.starts_with("checksum")).map(|l| format!("{l}\n")).collect();
    let body = body.replace("\n2 0 0: 240\n", "\n2 0 0: 241\n");
    let e = stableforms::Expansion::from_cache_str(&format!("{body}checksum sha256=0\n"));
    assert!(e.is_err());
    let fixed = resign(&body);
    std::fs::write(&path, fixed).unwrap();

    let o = run(dir.path(), &args);
    assert_eq!(o.status.code(), Some(2));
    let text = stdout(&o);
    assert!(text.contains("genus 1 -> 0: coherent"));
    assert!(text.contains("genus 2 -> 1: 1 failure(s) at [2]"));
}

fn resign(body: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(body.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("{body}checksum sha256={hex}\n")
}

#[test]
fn operators_pass_and_single_point_schedule_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["operators", "--genus", "2", "--trace-bound", "4", "--pairs", "10", "--samples", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(dir.path(), &["operators", "--genus", "2", "--trace-bound", "4", "--t-schedule", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(run(dir.path(), &["operators", "--genus", "1"]).status.code(), Some(1));
}

#[test]
fn grenier_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["grenier", "decompose", "--matrix", "2,1,0,1,2,1,0,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rescaled"));
    let o = run(dir.path(), &["grenier", "decompose", "--matrix", "1,0,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("rescaled"));
    assert_eq!(run(dir.path(), &["grenier", "decompose", "--matrix", "1,2,3"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["grenier", "decompose", "--matrix", "1,2,2,1"]).status.code(), Some(1));
    let o = run(dir.path(), &["grenier", "limit", "--s", "1.5,-0.5,2", "--x", "0.3,-1,2", "--w", "2,1,0,1,2,1,0,1,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(run(dir.path(), &["grenier", "limit", "--s", "1", "--x", "1,2"]).status.code(), Some(1));
}
