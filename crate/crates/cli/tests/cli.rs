use std::path::PathBuf;
use std::process::{Command, Output};

use mmp_cli::instance::parse_instance;
use mmp_cli::report::{Envelope, Report};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn mmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mmp")).args(args).output().expect("binary runs")
}

fn json_of(cmd: &str, name: &str, extra: &[&str]) -> (Envelope, String) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let f = fixture(name);
    let mut args = vec![cmd, f.to_str().unwrap(), "--json", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = mmp(&args);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    (Envelope::from_json(&text).unwrap(), text)
}

#[test]
fn f1_trace() {
    let (env, _) = json_of("run", "f1.json", &[]);
    assert_eq!(env.format, 1);
    let Report::Run(t) = env.report else { panic!("wrong report") };
    let kinds: Vec<_> = t.steps.iter().map(|s| (s.kind.as_str(), s.lambda.as_str())).collect();
    assert_eq!(kinds, [("Divisorial", "1"), ("MoriFiber", "3/4")]);
    assert_eq!(t.final_model.rays.len(), 3);
    assert!(t.steps[0].ledger.as_ref().unwrap().non_decreasing);
    assert_eq!(t.fibration_base.unwrap().rank, 0);
}

#[test]
fn quadric_flip_trace() {
    let (env, _) = json_of("run", "quadric_flip.json", &[]);
    let Report::Run(t) = env.report else { panic!("wrong report") };
    assert_eq!(t.steps.len(), 1);
    assert_eq!(t.steps[0].kind, "Flip");
    assert_eq!(t.outcome, "MinimalModel");
    // the flipped fan uses the other diagonal
    let mut cones = t.final_model.cones.clone();
    cones.iter_mut().for_each(|c| c.sort());
    cones.sort();
    assert_eq!(cones, vec![vec![0, 1, 3], vec![1, 2, 3]]);
}

#[test]
fn thresholds() {
    let (env, _) = json_of("threshold", "p2.json", &[]);
    let Report::Threshold(t) = env.report else { panic!("wrong report") };
    assert_eq!(t.lambda, "3");
    let q = t.rationality.unwrap();
    assert!(q.holds);
    assert_eq!((q.v.as_str(), q.bound.as_str()), ("3", "3"));
}

#[test]
fn chambers_and_sing() {
    let (env, _) = json_of("chambers", "f1.json", &[]);
    let Report::Chambers(c) = env.report else { panic!("wrong report") };
    assert_eq!(c.cells.len(), 2);
    assert!(c.nef_cell.is_some() && c.coarsest && c.subdivision);
    assert_eq!(c.seed, 7);
    assert!(c.verified_samples > 0);
    let (env, _) = json_of("sing", "quadric_flip.json", &[]);
    let Report::Sing(s) = env.report else { panic!("wrong report") };
    assert!(s.terminal && s.klt);
}

#[test]
fn glue_and_output() {
    let (env, _) = json_of("glue", "f1xp1.json", &["--r", "1"]);
    let Report::Glue(g) = env.report else { panic!("wrong report") };
    assert_eq!(g.patches.len(), 2);
    assert_eq!(g.scales.len(), 1);
    let glued = g.scales[0].glued.as_ref().expect("outputs agree on the overlap");
    assert!(g.scales[0].base_change.iter().all(|&b| b));
    let (env, _) = json_of("output-at-scale", "f1xp1.json", &["--r", "1"]);
    let Report::OutputAtScale(o) = env.report else { panic!("wrong report") };
    let mut a = glued.cones.iter().map(|c| c.iter().map(|&i| glued.rays[i].clone()).collect::<Vec<_>>()).collect::<Vec<_>>();
    let mut b = o.model.cones.iter().map(|c| c.iter().map(|&i| o.model.rays[i].clone()).collect::<Vec<_>>()).collect::<Vec<_>>();
    for x in a.iter_mut().chain(b.iter_mut()) {
        x.sort();
    }
    a.sort();
    b.sort();
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    let bad = fixture("bad_rays.json");
    let o = mmp(&["run", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    let missing = mmp(&["run", "/nonexistent/instance.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let no_base = fixture("f1.json");
    assert_eq!(mmp(&["glue", no_base.to_str().unwrap()]).status.code(), Some(3));
    // output at a scale below the last threshold needs the fibre step
    assert_eq!(mmp(&["output-at-scale", no_base.to_str().unwrap(), "--r", "1/2"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let weird = dir.path().join("w.json");
    std::fs::write(&weird, std::fs::read_to_string(fixture("p2.json")).unwrap().replace("\"A\"", "\"B\"")).unwrap();
    assert_eq!(mmp(&["run", weird.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exit_code_mapping() {
    use mmp_core::Error;
    assert_eq!(mmp_cli::exit_code(&Error::Parse("x".into())), 2);
    assert_eq!(mmp_cli::exit_code(&Error::Precondition("x".into())), 3);
    assert_eq!(mmp_cli::exit_code(&Error::Invariant("x".into())), 4);
}

#[test]
fn reports_round_trip_and_repeat() {
    for (cmd, name) in [("run", "f1.json"), ("chambers", "f1.json"), ("threshold", "p2.json"), ("glue", "f1xp1.json")] {
        let (env, text) = json_of(cmd, name, &[]);
        assert_eq!(Envelope::from_json(&env.to_json()).unwrap(), env);
        let (_, again) = json_of(cmd, name, &[]);
        assert_eq!(text, again, "{cmd} {name} is not reproducible");
    }
}

#[test]
fn fixtures_parse() {
    for name in ["f1.json", "p2.json", "quadric_flip.json", "f1xp1.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        parse_instance(&text).unwrap();
    }
}
