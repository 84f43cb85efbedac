use num_traits::ToPrimitive;
use wordlogic::counting::{
    minimize_rep, parse_relations, Counted, reps_equal, verify_piecewise_formula, verify_relations, LinearRep, Q,
};
use wordlogic::logic::{Binding, Compiler, Library};
use wordlogic::sequences::BuiltinSequence;

const CLOSED: &str = include_str!("../data/closed_tm.rep");
const CLOSED_MIN: &str = include_str!("../data/closed_tm_min.rep");
const PRIV: &str = include_str!("../data/priv_tm.rep");

fn count(formula: &str) -> LinearRep {
    let mut c = Compiler::new(Library::stdlib());
    let compiled = c.compile_str(formula, &Binding::new(BuiltinSequence::ThueMorse)).unwrap();
    LinearRep::from_compiled(&compiled, "i").unwrap()
}

fn ints(xs: &[Q]) -> Vec<i64> {
    xs.iter()
        .map(|x| {
            assert!(x.is_integer(), "{x}");
            x.to_integer().to_i64().unwrap()
        })
        .collect()
}

fn closed() -> LinearRep {
    count(Counted::Closed.formula())
}

#[test]
fn closed_counts_match_table() {
    let rep = closed();
    assert!(rep.is_zero_stable());
    assert_eq!(ints(&rep.table(15)), vec![1, 2, 2, 2, 4, 4, 6, 4, 8, 8, 10, 8, 12, 8, 8, 8]);
}

#[test]
fn closed_rep_agrees_with_reference_reps() {
    let rep = closed();
    let reference: LinearRep = CLOSED.parse().unwrap();
    let reference_min: LinearRep = CLOSED_MIN.parse().unwrap();
    assert_eq!(reference.dim(), 31);
    assert!(reps_equal(&rep, &reference));
    assert!(reps_equal(&reference, &reference_min));
    let min = minimize_rep(&rep);
    assert_eq!(min.dim(), 10);
    assert_eq!(minimize_rep(&reference).dim(), 10);
    assert_eq!(minimize_rep(&min).dim(), 10);
    assert_eq!(reference_min.eval(10), Q::from_integer(10.into()));
    let t = rep.table(4096);
    assert_eq!(t, min.table(4096));
    assert!(ints(&t).iter().all(|&x| x >= 0));
}

#[test]
fn closed_relations_and_closed_form() {
    let rep = closed();
    let rels = parse_relations(include_str!("../data/closed_tm.rel")).unwrap();
    assert_eq!(rels.len(), 11);
    for check in verify_relations(&rels, &rep, 2048) {
        assert!(check.holds, "{check:?}");
    }
    let sweep = verify_piecewise_formula(&rep, 32768);
    assert!(sweep.holds(), "{sweep:?}");
    assert_eq!(sweep.checked, 32768 - 7);
}

#[test]
fn privileged_counts() {
    let rep = count(Counted::Privileged.formula());
    assert_eq!(ints(&rep.table(16)), vec![1, 2, 2, 2, 2, 0, 4, 0, 8, 0, 8, 0, 4, 0, 0, 0, 0]);
    let reference: LinearRep = PRIV.parse().unwrap();
    assert_eq!(reference.dim(), 30);
    assert!(reps_equal(&rep, &reference));
    assert!(!reps_equal(&rep, &closed()));
    assert_ne!(rep.eval(10), closed().eval(10));
    let rels = parse_relations(include_str!("../data/priv_tm.rel")).unwrap();
    assert_eq!(rels.len(), 16);
    for check in verify_relations(&rels, &rep, 2048) {
        assert!(check.holds, "{check:?}");
    }
}

#[test]
fn privileged_palindrome_counts() {
    let rep = count(Counted::PrivilegedPalindrome.formula());
    assert_eq!(ints(&rep.table(16)), vec![1, 2, 2, 2, 2, 0, 4, 0, 4, 0, 4, 0, 4, 0, 0, 0, 0]);
    let rels = parse_relations(include_str!("../data/privpal_tm.rel")).unwrap();
    assert_eq!(rels.len(), 13);
    for check in verify_relations(&rels, &rep, 2048) {
        assert!(check.holds, "{check:?}");
    }
}
