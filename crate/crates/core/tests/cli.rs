use std::path::PathBuf;
use std::process::Command as Proc;

use bass_serre::cli::{run, Command, GogDocument, EXIT_DECIDED, EXIT_ERROR, EXIT_UNKNOWN};
use bass_serre::decide::DEFAULT_DEPTH;
use bass_serre::error::Error;

const FIXTURES: [&str; 7] = ["trefoil", "klein", "z6", "sl2", "s3dbl", "z4dbl", "jsj"];

fn path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.gog"))
}

fn source(name: &str) -> String {
    std::fs::read_to_string(path(name)).unwrap()
}

fn go(name: &str, cmd: Command) -> (i32, String) {
    let r = run(&cmd, &source(name), DEFAULT_DEPTH);
    (r.code, r.text)
}

#[test]
fn print_parse_round_trip() {
    for f in FIXTURES {
        let doc = GogDocument::parse(&source(f)).unwrap();
        let again = GogDocument::parse(&doc.render()).unwrap();
        assert_eq!(doc, again, "{f}");
        assert_eq!(doc.render(), again.render());
        doc.build().unwrap();
    }
}

#[test]
fn every_fixture_validates() {
    for f in FIXTURES {
        let (code, text) = go(f, Command::Validate);
        assert_eq!(code, EXIT_DECIDED);
        assert!(text.starts_with("VALID: yes"), "{f}: {text}");
    }
}

#[test]
fn jsj_presentation_counts() {
    let (code, text) = go("jsj", Command::Present);
    assert_eq!(code, EXIT_DECIDED);
    assert!(text.contains("GENERATORS: 16\n"));
    assert!(text.contains("RELATIONS: 20\n"));
    assert!(text.contains("RELATION: S1.y1 S2.z2^-1\n"));
    // Symbolic files refuse the concrete deciders.
    let (code, text) = go("jsj", Command::Center);
    assert_eq!(code, EXIT_ERROR, "{text}");
}

#[test]
fn conj_on_equal_words_is_yes_with_empty_conjugator() {
    let (code, text) = go("s3dbl", Command::Conj { u: "s.g3 sp.g5".into(), v: "s.g3 sp.g5".into() });
    assert_eq!(code, EXIT_DECIDED);
    assert_eq!(text, "CONJUGATE: YES\nCONJUGATOR: eps\n");
}

#[test]
fn centers_from_files() {
    assert_eq!(go("klein", Command::Center), (EXIT_DECIDED, "CENTER: ⟨t0^2⟩\n".into()));
    assert_eq!(go("trefoil", Command::Center), (EXIT_DECIDED, "CENTER: ⟨A.g0^2⟩\n".into()));
    assert_eq!(go("s3dbl", Command::Center), (EXIT_DECIDED, "CENTER: trivial\n".into()));
    assert_eq!(go("sl2", Command::Center), (EXIT_DECIDED, "CENTER: ⟨A.g2⟩\n".into()));
    assert_eq!(go("z6", Command::Center).0, EXIT_DECIDED);
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(go("klein", Command::SansCircuit).0, EXIT_UNKNOWN);
    assert_eq!(go("s3dbl", Command::SansCircuit), (EXIT_DECIDED, "SANS_CIRCUIT: YES\n".into()));
    let (code, text) = go("sl2", Command::SansCircuit);
    assert_eq!(code, EXIT_DECIDED);
    assert!(text.starts_with("SANS_CIRCUIT: NO\n"));
    assert_eq!(go("sl2", Command::Centralizer { word: "A.g1".into() }).0, EXIT_UNKNOWN);
    assert_eq!(go("klein", Command::Conj { u: "t0".into(), v: "t0^2".into() }), (EXIT_DECIDED, "CONJUGATE: NO\n".into()));
    assert_eq!(go("klein", Command::Commute { x: "A.g0".into(), y: "t0".into() }), (EXIT_DECIDED, "COMMUTE: NO\n".into()));
    assert_eq!(go("klein", Command::Nf { word: "A.g9".into() }).0, EXIT_ERROR);
}

#[test]
fn commute_and_centralizer_reports() {
    let (_, text) = go("klein", Command::Commute { x: "t0^2".into(), y: "t0^4".into() });
    assert!(text.contains("CLASS: CYCLIC\n") && text.contains("W: t0\n") && text.contains("J: 2\n") && text.contains("K: 4\n"), "{text}");
    let (_, text) = go("klein", Command::Commute { x: "A.g0".into(), y: "t0^2".into() });
    assert!(text.contains("CLASS: CIRCUIT_LABEL\n") && text.contains("LABEL: t0^2\n"), "{text}");
    let (code, text) = go("s3dbl", Command::Centralizer { word: "s.g3 sp.g3".into() });
    assert_eq!(code, EXIT_DECIDED);
    assert!(text.starts_with("CENTRALIZER: CYCLIC\n"), "{text}");
}

#[test]
fn trajet_and_double_commands() {
    let (code, text) = go("s3dbl", Command::Trajet { from: "g5@s".into(), to: "g5@sp".into() });
    assert_eq!(code, EXIT_DECIDED);
    assert!(text.starts_with("TRAJET: YES\nLENGTH: 1\n"), "{text}");
    let (code, text) = go("s3dbl", Command::Trajet { from: "g3@s".into(), to: "g2@sp".into() });
    assert_eq!((code, text.as_str()), (EXIT_DECIDED, "TRAJET: NO\n"));
    let (code, text) = go("s3dbl", Command::Double { base: "s".into(), subgroups: vec!["g2".into()] });
    assert_eq!(code, EXIT_DECIDED);
    assert!(text.contains("PAIRS: 36\nAGREE: 36\n"), "{text}");
    let (code, text) = go("z4dbl", Command::Double { base: "s".into(), subgroups: vec!["g2".into()] });
    assert_eq!(code, EXIT_DECIDED);
    assert!(text.contains("PAIRS: 16\nAGREE: 16\n"), "{text}");
}

#[test]
fn parse_errors_carry_positions() {
    let bad = "vertex A abelian rank=1\nedge e from=A to=Q\n";
    match GogDocument::parse(bad) {
        Err(Error::Parse { line: 2, msg, .. }) => assert!(msg.contains("`Q`"), "{msg}"),
        other => panic!("{other:?}"),
    }
    match GogDocument::parse("vertex A finite order=2 table=0 1 1\n") {
        Err(Error::Parse { line: 1, col, .. }) => assert!(col > 20),
        other => panic!("{other:?}"),
    }
    assert!(matches!(GogDocument::parse("  phi- g0 = g0\n"), Err(Error::Parse { line: 1, .. })));
    assert!(matches!(GogDocument::parse("vertex A cyclic n=3\n"), Err(Error::Parse { line: 1, .. })));
    // Not a Latin square: fails in the backend.
    let doc = GogDocument::parse("vertex A finite order=2 table=0 1 0 1\n").unwrap();
    assert!(matches!(doc.build(), Err(Error::InvalidGroup(_))));
    let r = run(&Command::Validate, "vertex A finite order=2 table=0 1 0 1\n", DEFAULT_DEPTH);
    assert!(r.text.starts_with("VALID: no\n"), "{}", r.text);
}

#[test]
fn invalid_edge_images_are_reported() {
    let src = "vertex A finite order=4 table=0 1 2 3 1 2 3 0 2 3 0 1 3 0 1 2\n\
               edge e from=A to=A\n  group finite order=2 table=0 1 1 0\n  phi- g1 = g1\n  phi+ g1 = g2\n";
    let r = run(&Command::Validate, src, DEFAULT_DEPTH);
    assert!(r.text.starts_with("VALID: no\nVIOLATION: edge e: phi-"), "{}", r.text);
}

#[test]
fn binary_prints_reports_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_bass-serre");
    let out = Proc::new(bin).arg(path("klein")).arg("center").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "CENTER: ⟨t0^2⟩\n");
    let out = Proc::new(bin).arg(path("klein")).arg("sans-circuit").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Proc::new(bin).arg("/nonexistent.gog").arg("validate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
