//! End-to-end tests of the subposet binary: verb output, exit codes,
//! report files, and determinism modulo the elapsed-time field.

use std::path::Path;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_env(args, &[])
}

fn run_with_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_subposet"));
    cmd.args(args).env_remove("SUBPOSET_JOBS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn strip_elapsed(text: &str) -> String {
    text.lines().filter(|l| !l.starts_with("elapsed_ms=")).collect::<Vec<_>>().join("\n")
}

#[test]
fn info_prints_shape_and_bounds() {
    let (code, stdout, _) = run(&["info", "Q + D3 * D3 + D3"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "expr=Q + D3 * D3 + D3\nsize=21\nL=11\nb=15\ne=15\n");

    let (code, stdout, _) = run(&["info", "B", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "expr=B\nsize=4\nL=2\nb=2\ne=2\nn=4\ndouble_chain_bound=10\n\
         bound_kind=sharp-sigma\npath_embedding_bound=14\n"
    );

    // Series sums and glued products of bases keep b integral.
    let (code, stdout, _) = run(&["info", "E + B", "--n", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("b=3\n"), "{stdout}");
    assert!(stdout.contains("bound_kind=sharp-sigma\n"), "{stdout}");
}

#[test]
fn verify_golden_record() {
    let (code, stdout, _) = run(&["verify", "B", "--n", "4"]);
    assert_eq!(code, 0);
    let want = "\
claim=verify
expr=B
n=4
value=10
expected=10
verdict=pass
note=b = e = 2; the target is the sum of the 2 largest binomials
note=exact branch: complete search over all families
witness=family
family 4
{1}
{2}
{3}
{4}
{1,2}
{1,3}
{2,3}
{1,4}
{2,4}
{3,4}";
    assert_eq!(strip_elapsed(&stdout), want);
}

#[test]
fn verify_triple_chain() {
    let (code, stdout, _) = run(&["verify", "E + E + E", "--n", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("value=10\n"), "{stdout}");
    assert!(stdout.contains("verdict=pass\n"), "{stdout}");
}

#[test]
fn verify_property_pathway() {
    let (code, stdout, _) = run(&["verify", "B + B", "--n", "6"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict=property-pass\n"), "{stdout}");
    assert!(stdout.contains("value=62\n"), "{stdout}");
    assert!(stdout.contains("note=finite evidence at this n"), "{stdout}");
}

#[test]
fn exit_codes_cover_all_outcomes() {
    let (code, _, _) = run(&["verify", "B", "--n", "3"]);
    assert_eq!(code, 0, "pass");

    let (code, stdout, _) = run(&["window-check", "B", "--m", "3/2"]);
    assert_eq!(code, 1, "a refuted check fails");
    assert!(stdout.contains("verdict=fail\n"));
    assert!(stdout.contains("witness=window-subset\n"));

    let (code, stdout, _) = run(&["la", "B", "--n", "4", "--budget", "3"]);
    assert_eq!(code, 2, "budget exhaustion is inconclusive");
    assert!(stdout.contains("verdict=inconclusive\n"));
    assert!(stdout.contains("value=10 <= La <= 16\n"));

    let (code, _, stderr) = run(&["la", "--n", "3"]);
    assert_eq!(code, 3, "missing argument is usage");
    assert!(!stderr.is_empty());

    let (code, _, stderr) = run(&["info", "B * B"]);
    assert_eq!(code, 3, "glue precondition failure is usage");
    assert!(stderr.contains("error:"), "{stderr}");

    let (code, _, stderr) = run(&["info", "B + X"]);
    assert_eq!(code, 3, "unknown base is usage");
    assert!(stderr.contains("error:"), "{stderr}");

    let (code, _, _) = run(&["--help"]);
    assert_eq!(code, 0, "help is not an error");
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.report");
    let (code, stdout, _) =
        run(&["verify", "D3", "--n", "4", "--report", report.to_str().unwrap()]);
    assert_eq!(code, 0);
    let file = std::fs::read_to_string(&report).unwrap();
    assert_eq!(file, stdout);
    assert!(file.contains("expected=14\n"));

    let missing = dir.path().join("no/such/dir/x.report");
    let (code, _, stderr) =
        run(&["verify", "D3", "--n", "4", "--report", missing.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(stderr.contains("x.report"), "{stderr}");
}

#[test]
fn reports_are_deterministic_modulo_elapsed() {
    let args = ["e-scan", "D3", "--n-max", "6"];
    let (c1, s1, _) = run(&args);
    let (c2, s2, _) = run(&args);
    assert_eq!(c1, 0);
    assert_eq!(c1, c2);
    assert_eq!(strip_elapsed(&s1), strip_elapsed(&s2));
    // Two certificates, blank-line separated.
    assert!(s1.contains("claim=e-lower-scan\n"));
    assert!(s1.contains("\n\nclaim=e-upper-witness\n"));
}

#[test]
fn jobs_flag_and_environment_agree() {
    let (c1, s1, _) = run(&["audit-double-chains", "--n", "5", "--jobs", "2"]);
    let (c2, s2, _) = run_with_env(&["audit-double-chains", "--n", "5"], &[("SUBPOSET_JOBS", "2")]);
    let (c3, s3, _) = run(&["audit-double-chains", "--n", "5"]);
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(strip_elapsed(&s1), strip_elapsed(&s2));
    assert_eq!(strip_elapsed(&s1), strip_elapsed(&s3));
    assert!(s1.contains("value=32/32 subset counts match\n"));

    let (code, _, stderr) = run_with_env(&["audit-double-chains", "--n", "3"], &[("SUBPOSET_JOBS", "zero")]);
    assert_eq!(code, 3);
    assert!(stderr.contains("SUBPOSET_JOBS"), "{stderr}");
}

#[test]
fn free_check_reads_family_files() {
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("family.txt");
    std::fs::write(&fam, "family 3\n{1}\n{2}\n{1,2}\n{1,2,3}\n").unwrap();
    let fam = fam.to_str().unwrap();

    let (code, stdout, _) = run(&["free-check", fam, "Q"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("verdict=pass\n"));
    assert!(stdout.contains("value=all 4 members avoid the pattern\n"));

    let (code, stdout, _) = run(&["free-check", fam, "B"]);
    assert_eq!(code, 1);
    assert!(stdout.contains("verdict=fail\n"));
    assert!(stdout.contains("witness=embedding\n"));

    let (code, _, stderr) = run(&["free-check", dir.path().join("nope.txt").to_str().unwrap(), "B"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("nope.txt"), "{stderr}");
}

#[test]
fn custom_poset_atoms_load_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let vee = dir.path().join("vee.poset");
    std::fs::write(&vee, "poset 3\n0 < 1\n0 < 2\n").unwrap();

    // Half-integral b prints as a fraction and forces the coarse bound:
    // (3/2) * C(4,2) = 9.
    let (code, stdout, _) = run(&["info", &format!("@{}", vee.display()), "--n", "4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("size=3\n"), "{stdout}");
    assert!(stdout.contains("L=2\n"), "{stdout}");
    assert!(stdout.contains("b=3/2\n"), "{stdout}");
    assert!(stdout.contains("double_chain_bound=9\n"), "{stdout}");
    assert!(stdout.contains("bound_kind=coarse\n"), "{stdout}");
    // No e line: the composition calculus needs base leaves.
    assert!(!stdout.contains("\ne="), "{stdout}");

    // Custom atoms compose with bases.
    let (code, stdout, _) = run(&["info", &format!("E + @{}", vee.display())]);
    assert_eq!(code, 0);
    assert!(stdout.contains("size=4\n"), "{stdout}");

    let (code, _, stderr) = run(&["info", "@/no/such/file.poset"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("file.poset"), "{stderr}");
}

#[test]
fn window_check_defaults_to_b() {
    let (code, stdout, _) = run(&["window-check", "D3"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("m=3\n"), "{stdout}");
    assert!(stdout.contains("verdict=pass\n"), "{stdout}");

    // S' needs the quoting-free alias on most shells.
    let (code, stdout, _) = run(&["window-check", "Sp"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("expr=S'\n"), "{stdout}");
}

#[test]
fn la_witness_family_is_printed_in_file_format() {
    let (code, stdout, _) = run(&["la", "E + E", "--n", "3"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("value=3\n"), "{stdout}");
    let tail = stdout.split("witness=family\n").nth(1).expect("witness block");
    assert!(tail.starts_with("family 3\n"), "{tail}");
    // The witness is itself a valid family file.
    let dir = tempfile::tempdir().unwrap();
    let fam = dir.path().join("witness.txt");
    std::fs::write(&fam, tail).unwrap();
    let (code, _, _) = run(&["free-check", fam.to_str().unwrap(), "E + E"]);
    assert_eq!(code, 0, "round-trip through free-check");
}

#[test]
fn report_paths_exist_for_all_certificate_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    let cases: Vec<(Vec<&str>, std::path::PathBuf)> = vec![
        (vec!["la", "B", "--n", "3"], p("la.report")),
        (vec!["verify", "B", "--n", "3"], p("verify.report")),
        (vec!["audit-double-chains", "--n", "3"], p("audit.report")),
        (vec!["window-check", "B"], p("window.report")),
        (vec!["e-scan", "B"], p("escan.report")),
    ];
    for (mut args, path) in cases {
        args.push("--report");
        args.push(path.to_str().unwrap());
        let (code, stdout, _) = run(&args);
        assert_eq!(code, 0, "{args:?}");
        assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout, "{args:?}");
    }
    check_free_report(&p("free.report"));
}

fn check_free_report(path: &Path) {
    let fam = path.with_file_name("fam.txt");
    std::fs::write(&fam, "family 2\n{1}\n").unwrap();
    let (code, stdout, _) = run(&[
        "free-check",
        fam.to_str().unwrap(),
        "B",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(path).unwrap(), stdout);
}
