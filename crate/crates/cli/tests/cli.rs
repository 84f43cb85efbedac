use std::path::PathBuf;
use std::process::{Command, Output};

use wordlogic::automata::io::{load, Automaton};
use wordlogic::logic::{Binding, Compiler, Library};
use wordlogic::sequences::BuiltinSequence;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordlogic")).args(args).output().expect("run wordlogic")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap_or(-1)
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn data(name: &str) -> String {
    format!("{}/../core/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn decide_reports_truth_through_exit_code() {
    let o = run(&["decide", "An Ei $Closed(i,n)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("true"));
    assert_eq!(code(&["decide", "En n<n"]), 1);
    let o = run(&["decide", "An n<5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample: n=5"), "{}", stdout(&o));
    let o = run(&["decide", "-s", "fib", "Ei X[i]=1 & X[i+1]=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&["decide", "Ei i <"]), 2);
    assert_eq!(code(&["decide", "-s", "nonsense", "Ei i=i"]), 2);
    assert_eq!(code(&["decide", "Ei $Nope(i)"]), 2);
    assert_eq!(code(&["accept-set", "i < n"]), 2);
    assert_eq!(code(&["rep", "eval", "/nonexistent/file.rep"]), 2);
    let o = run(&["--json", "decide", "Ei i <"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "usage");
}

#[test]
fn accept_set_lists_values() {
    let o = run(&["accept-set", "-s", "pd", "Ei $Priv(i,n)", "--bound", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("4 states"), "{text}");
    assert!(text.contains("n <= 12: 0,1,2,3,5,7,9,11"), "{text}");
    let lsd = run(&["--lsd", "--json", "accept-set", "-s", "pd", "Ei $Priv(i,n)", "--bound", "12"]);
    let v: serde_json::Value = serde_json::from_slice(&lsd.stdout).unwrap();
    assert_eq!(v["values"], serde_json::json!([0, 1, 2, 3, 5, 7, 9, 11]));
}

#[test]
fn count_prints_one_line_per_length() {
    let o = run(&["count", "closed", "--from", "10", "--to", "12"]);
    assert_eq!(stdout(&o), "10 10\n11 8\n12 12\n");
    let o = run(&["count", "--formula", "$Pal(i,n) & ~$Occurs(i,0,n,i+n-1)", "--to", "5"]);
    assert_eq!(stdout(&o), "0 1\n1 2\n2 2\n3 2\n4 2\n5 0\n");
}

#[test]
fn representation_files_round_trip() {
    let built = scratch("closed.rep");
    let o = run(&["rep", "build", "closed"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&built, &o.stdout).unwrap();
    let min = scratch("closed_min.json");
    let o = run(&["--json", "rep", "minimize", built.to_str().unwrap()]);
    std::fs::write(&min, &o.stdout).unwrap();
    let o = run(&["rep", "eval", min.to_str().unwrap(), "--to", "7"]);
    assert_eq!(stdout(&o).trim(), "1,2,2,2,4,4,6,4");
    assert_eq!(code(&["rep", "equal", min.to_str().unwrap(), &data("closed_tm_min.rep")]), 0);
    assert_eq!(code(&["rep", "equal", min.to_str().unwrap(), &data("priv_tm.rep")]), 1);
    let o = run(&["rep", "verify", built.to_str().unwrap(), &data("closed_tm.rel"), "--bound", "512"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("ok")).count(), 11);
    assert_eq!(code(&["rep", "piecewise", min.to_str().unwrap(), "--bound", "2048"]), 0);
    assert_eq!(code(&["rep", "verify", &data("priv_tm.rep"), &data("closed_tm.rel"), "--bound", "64"]), 1);
}

#[test]
fn export_reloads_to_the_same_automaton() {
    let formula = "$Closed(i,n)";
    let expected = Compiler::new(Library::stdlib())
        .compile_str(formula, &Binding::new(BuiltinSequence::PeriodDoubling))
        .unwrap()
        .dfa;
    for format in ["text", "json"] {
        let path = scratch(&format!("closed_pd.{format}"));
        let status = run(&["export", "-s", "pd", formula, "--format", format, "-o", path.to_str().unwrap()]).status;
        assert!(status.success());
        match load(&std::fs::read_to_string(&path).unwrap()).unwrap() {
            Automaton::Dfa(d) => assert_eq!(d.equivalent(&expected).ok(), Some(true)),
            Automaton::Dfao(_) => panic!("expected a Dfa"),
        }
    }
    let dot = stdout(&run(&["export", "--format", "dot"]));
    assert!(dot.starts_with("digraph"), "{dot}");
    match load(&stdout(&run(&["export", "-s", "fib"]))).unwrap() {
        Automaton::Dfao(m) => assert_eq!(m.num_states(), 2),
        Automaton::Dfa(_) => panic!("expected a Dfao"),
    }
}

#[test]
fn crosscheck_and_oracle_commands() {
    let o = run(&["crosscheck", "-s", "pd", "Priv", "--bound", "48"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 mismatches"), "{}", stdout(&o));
    assert_eq!(code(&["crosscheck", "NoOracle"]), 2);
    let o = run(&["--json", "oracle", "word", "aabb"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["closed"], false);
    assert_eq!(v["rich"], true);
    let o = run(&["oracle", "maxpal", "-s", "pf", "--max-len", "16"]);
    assert_eq!(stdout(&o), "001100\n011000110\n0111001001110\n1000110110001\n100111001\n110011\n");
    let o = run(&["oracle", "palcount", "-s", "tm", "8"]);
    assert_eq!(stdout(&o).trim(), "9");
}

#[test]
fn predicate_files_extend_the_library() {
    let path = scratch("extra.prd");
    std::fs::write(&path, "def Square(i,n) := Ej n = 2*j & $FactorEq(i,i+j,j);\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&["-P", p, "decide", "~Ei Ej j>0 & $Square(i,2*j) & $FactorEq(i,i+2*j,j)"]), 0);
    let o = run(&["-P", p, "accept-set", "Ei n>0 & $Square(i,n)", "--bound", "20"]);
    assert!(stdout(&o).contains("n <= 20: 2,4,6,8,12,16"), "{}", stdout(&o));
    let o = run(&["-P", p, "decide", "-s", "fib", "Ei Ej j>0 & $FactorEq(i,i+j,j) & $FactorEq(i,i+2*j,j)"]);
    assert_eq!(o.status.code(), Some(0));
}
