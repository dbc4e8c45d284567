use std::path::{Path, PathBuf};

use strongeq::cli::run;

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples/programs")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path: PathBuf = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn strongeq(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["strongeq"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const COLOUR_BLOCK: &str = "\
(#true -> (forall X1 ((X1 = r) -> colour(X1)) and
           forall X2 ((X2 = g) -> colour(X2)) and
           forall X3 ((X3 = b) -> colour(X3))))
";

#[test]
fn translate_pool_golden() {
    let (code, out, err) = strongeq(&["translate", &corpus("ex08.b.lp")]);
    assert_eq!(code, 0);
    assert_eq!(out, COLOUR_BLOCK);
    assert_eq!(err, "info: output semantics: classical logic\n");
}

#[test]
fn translate_choice_golden() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "c.lp", "{p}.\n:- not p, q.\n");
    let (code, out, err) = strongeq(&["translate", &file]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "(p -> p')\n(q -> q')\n(#true -> (p or not p'))\n(#true -> (p' or not p'))\n\
         ((not p' and q) -> #false)\n((not p' and q') -> #false)\n"
    );
    assert_eq!(err, "info: mapped to output semantics: classical logic\n");
}

#[test]
fn translate_tptp_contains_mapped_lines() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "c.lp", "{p}.\n:- not p, q.\n");
    let (code, out, _) = strongeq(&["translate", &file, "--format", "tptp"]);
    assert_eq!(code, 0);
    for line in [
        "$true => (p | (~p__prime__))",
        "$true => (p__prime__ | (~p__prime__))",
        "((~p__prime__) & q) => $false",
        "((~p__prime__) & q__prime__) => $false",
    ] {
        assert!(out.contains(line), "missing {line} in\n{out}");
    }
    strongeq::render::check_tff(&out).unwrap();
}

#[test]
fn translate_simplify_flag() {
    let (code, out, _) = strongeq(&["translate", &corpus("ex08.b.lp"), "--simplify"]);
    assert_eq!(code, 0);
    assert_eq!(out, "(colour(r) and colour(g) and colour(b))\n");
}

#[test]
fn verify_human_pair_golden() {
    let (code, out, err) = strongeq(&[
        "verify",
        &corpus("ex08.a.lp"),
        &corpus("ex08.b.lp"),
        "--format",
        "human",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(
        out,
        "\
(((#true -> forall X1 ((X1 = r) -> colour(X1))) and
  (#true -> forall X2 ((X2 = g) -> colour(X2))) and
  (#true -> forall X3 ((X3 = b) -> colour(X3))))
<->
 ((#true -> (forall X4 ((X4 = r) -> colour(X4)) and
             forall X5 ((X5 = g) -> colour(X5)) and
             forall X6 ((X6 = b) -> colour(X6))))))
"
    );
}

#[test]
fn verify_default_is_tptp_with_conjecture() {
    let (code, out, _) = strongeq(&["verify", &corpus("ex14.a.lp"), &corpus("ex14.b.lp")]);
    assert_eq!(code, 0);
    let summary = strongeq::render::check_tff(&out).unwrap();
    assert_eq!(summary.conjectures, 1);
    assert!(out.contains("tff(se, conjecture,"));
}

#[test]
fn oracle_exit_codes() {
    let (code, out, _) = strongeq(&["oracle", &corpus("ex13.a.lp"), &corpus("ex13.b.lp")]);
    assert_eq!((code, out.as_str()), (0, "StronglyEquivalent\n"));

    let (code, out, _) = strongeq(&["oracle", &corpus("ex12.a.lp"), &corpus("ex12.b.lp")]);
    assert_eq!(code, 1);
    assert_eq!(out, "NotStronglyEquivalent\nwitness: <{}, {p, q}>\n");
}

#[test]
fn oracle_bounded_is_labelled() {
    let (code, out, _) = strongeq(&["oracle", &corpus("ex22.a.lp"), &corpus("ex22.b.lp")]);
    assert_eq!(code, 2);
    assert!(out.contains("this is not a decision"), "{out}");
    assert!(out.contains("NotRefuted"));

    let (code, out, _) = strongeq(&["oracle", &corpus("ex24.a.lp"), &corpus("ex24.b.lp"), "--domain", "a,b"]);
    assert_eq!(code, 1);
    assert!(out.contains("RefutedOnInstances"), "{out}");
}

#[test]
fn usage_errors_exit_3() {
    let (code, _, _) = strongeq(&["translate"]);
    assert_eq!(code, 3);
    let (code, _, err) = strongeq(&["translate", "/nonexistent/file.lp"]);
    assert_eq!(code, 3);
    assert!(err.starts_with("error:"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.lp", "p(X :- q.\n");
    let (code, _, err) = strongeq(&["translate", &bad]);
    assert_eq!(code, 3);
    assert!(err.contains("bad.lp:1"), "{err}");

    let (code, _, _) = strongeq(&["verify", &corpus("ex14.a.lp")]);
    assert_eq!(code, 3);
}

#[test]
fn output_is_deterministic() {
    let args = ["verify", &corpus("ex22.a.lp"), &corpus("ex22.b.lp")];
    let first = strongeq(&args);
    for _ in 0..3 {
        assert_eq!(strongeq(&args), first);
    }
}
