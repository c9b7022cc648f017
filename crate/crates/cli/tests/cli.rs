use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn gsf(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gsf")).args(args).output().expect("run gsf");
    let text = |b: Vec<u8>| String::from_utf8(b).unwrap();
    (out.status.code().unwrap(), text(out.stdout), text(out.stderr))
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gsf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn identity_runs_to_two() {
    let (code, out, _) = gsf(&["run", example("identity.gsf").to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "2 : Int"));
}

#[test]
fn sealed_misuse_is_a_runtime_error() {
    let (code, out, _) = gsf(&["run", example("g_int_true.gsf").to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("runtime error"), "{out}");
}

#[test]
fn two_seals_agree() {
    let (code, out, _) = gsf(&["diff", example("two_seals.lseal").to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "Agree"));
}

#[test]
fn co_divergence_agrees() {
    let (code, out, _) = gsf(&["diff", example("omega.ldyn").to_str().unwrap(), "--max-steps", "2000"]);
    assert_eq!((code, out.trim()), (0, "Agree"));
    let (code, _, _) = gsf(&["run", example("omega.ldyn").to_str().unwrap(), "--max-steps", "2000"]);
    assert_eq!(code, 3);
}

#[test]
fn dip_flag_changes_the_outcome() {
    let f = example("implicit.gsf");
    assert_eq!(gsf(&["run", f.to_str().unwrap()]).0, 1);
    let (code, out, _) = gsf(&["run", "--dip", f.to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "1 : ?"));
}

#[test]
fn type_and_parse_errors() {
    let bad_type = scratch("bad.gsf", "1 + true");
    assert_eq!(gsf(&["run", bad_type.to_str().unwrap()]).0, 2);
    assert_eq!(gsf(&["typecheck", bad_type.to_str().unwrap()]).0, 2);
    let bad_syntax = scratch("bad_syntax.gsf", "\\x:. x");
    let (code, _, err) = gsf(&["run", bad_syntax.to_str().unwrap()]);
    assert_eq!(code, 4);
    assert!(!err.is_empty());
}

#[test]
fn typecheck_prints_the_type() {
    let (code, out, _) = gsf(&["typecheck", example("ascribed_id.gsf").to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "?"));
}

#[test]
fn json_trace_follows_the_schema() {
    let (code, out, _) = gsf(&["run", "--trace=json", example("ascribed_id.gsf").to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let steps = v.as_array().unwrap();
    let rules: Vec<&str> = steps.iter().map(|s| s["rule"].as_str().unwrap()).collect();
    assert_eq!(rules, ["RappT", "Rasc", "Rapp", "Rasc"]);
    assert_eq!(steps[0]["store"][0]["name"], "a0");
    assert_eq!(steps[0]["store"][0]["type"], "Int");
    assert_eq!(steps[3]["term"], "<Int,Int> 1 :: ?");
    assert_eq!(steps[3]["outcome"]["kind"], "value");
    assert!(steps[0].get("trans").is_none());
    let (_, out, _) = gsf(&["run", "--trace=json", "--trace-trans", example("ascribed_id.gsf").to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.as_array().unwrap().iter().any(|s| s.get("trans").is_some()));
}

#[test]
fn text_trace_and_elaboration() {
    let (code, out, _) = gsf(&["run", "--trace", "--emit-eps", example("ascribed_id.gsf").to_str().unwrap()]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[0].starts_with("(<forall X.X->X,forall X.X->X>"), "{out}");
    assert!(lines[1].contains("RappT"));
    assert_eq!(*lines.last().unwrap(), "1 : ?");
}

#[test]
fn embed_prints_a_gradual_program() {
    let (code, out, _) = gsf(&["embed", example("two_seals.lseal").to_str().unwrap(), "--from", "seal"]);
    assert_eq!(code, 0);
    let again = scratch("embedded.gsf", &out);
    let (code, out, _) = gsf(&["run", again.to_str().unwrap()]);
    assert_eq!((code, out.trim()), (0, "2 : ?"));
}

#[test]
fn precision_and_lockstep() {
    let a = scratch("a.gsf", "(\\x:Int. x + 1) 2");
    let b = scratch("b.gsf", "(\\x:?. x + 1) 2");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());
    assert_eq!(gsf(&["precision", a, b]).1.trim(), "true");
    assert_eq!(gsf(&["precision", b, a]).1.trim(), "false");
    assert_eq!(gsf(&["precision", "--strict", a, b]).1.trim(), "true");
    let (code, out, _) = gsf(&["lockstep", a, b]);
    assert_eq!(code, 0);
    assert!(out.starts_with("Held"), "{out}");
}
