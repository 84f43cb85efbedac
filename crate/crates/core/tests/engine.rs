use proptest::prelude::*;
use wordlogic::automata::{Alphabet, BoolOp, Dfa};
use wordlogic::logic::{Binding, Compiler, Library};
use wordlogic::numeration::{DigitOrder, NumerationSystem};
use wordlogic::sequences::{BuiltinSequence, ALL};

fn random_dfa(states: usize) -> impl Strategy<Value = Dfa> {
    let alpha = Alphabet::new(1, 2);
    (
        proptest::collection::vec(0..states as u32, states * 2),
        proptest::collection::vec(any::<bool>(), states),
    )
        .prop_map(move |(trans, acc)| Dfa::new(alpha, 0, trans, acc).unwrap())
}

fn words(max_len: usize) -> Vec<Vec<usize>> {
    (0..=max_len)
        .flat_map(|n| (0usize..1 << n).map(move |b| (0..n).map(|k| b >> k & 1).collect()))
        .collect()
}

fn systems() -> Vec<NumerationSystem> {
    let mut out = Vec::new();
    for s in [NumerationSystem::base(2), NumerationSystem::base(3), NumerationSystem::zeckendorf()] {
        out.push(s);
        out.push(s.with_order(DigitOrder::Lsd));
    }
    out
}

proptest! {
    #[test]
    fn minimization_preserves_language(d in random_dfa(6)) {
        let m = d.minimize();
        prop_assert!(m.num_states() <= d.num_states());
        prop_assert_eq!(m.minimize().num_states(), m.num_states());
        for w in words(8) {
            prop_assert_eq!(d.accepts(&w), m.accepts(&w));
        }
    }

    #[test]
    fn products_follow_boolean_laws(a in random_dfa(4), b in random_dfa(4)) {
        let and = a.product(&b, BoolOp::And).unwrap();
        let or = a.complement().product(&b.complement(), BoolOp::Or).unwrap().complement();
        prop_assert_eq!(and.equivalent(&or).ok(), Some(true));
        for w in words(7) {
            prop_assert_eq!(and.accepts(&w), a.accepts(&w) && b.accepts(&w));
        }
    }

    #[test]
    fn reversal_reverses_words(d in random_dfa(5)) {
        let r = d.reverse();
        for w in words(7) {
            let rev: Vec<usize> = w.iter().rev().copied().collect();
            prop_assert_eq!(d.accepts(&w), r.accepts(&rev));
        }
        prop_assert_eq!(r.reverse().equivalent(&d).ok(), Some(true));
    }

    #[test]
    fn canonical_digits_round_trip(n in 0u64..1_000_000) {
        for s in systems() {
            let w = s.to_canonical(n);
            prop_assert_eq!(s.from_digits(&w).ok(), Some(n));
            prop_assert!(s.validity_automaton(1).accepts(&w.letters()));
        }
    }

    #[test]
    fn addition_automata_add(x in 0u64..5000, y in 0u64..5000) {
        for s in systems() {
            let add = s.addition_automaton();
            prop_assert!(s.accepts(&add, &[x, y, x + y]));
            prop_assert!(!s.accepts(&add, &[x, y, x + y + 1]));
        }
    }
}

#[test]
fn sequences_match_their_morphisms() {
    for seq in ALL {
        let prefix = seq.prefix(3000);
        for (n, &c) in prefix.iter().enumerate() {
            assert_eq!(seq.eval(n as u64), c, "{seq} at {n}");
        }
        if let Some((m, start)) = seq.morphism() {
            assert_eq!(m.fixed_point_prefix(start, 3000), prefix, "{seq}");
        }
        let sys = seq.system();
        let lsd = seq.dfao_for(DigitOrder::Lsd);
        for n in 0..3000u64 {
            let letters = sys.with_order(DigitOrder::Lsd).to_canonical(n).letters();
            assert_eq!(lsd.eval(&letters), prefix[n as usize], "{seq} lsd at {n}");
        }
    }
}

#[test]
fn sequence_prefixes() {
    let show = |s: BuiltinSequence| -> String { s.prefix(16).iter().map(|d| d.to_string()).collect() };
    assert_eq!(show(BuiltinSequence::ThueMorse), "0110100110010110");
    assert_eq!(show(BuiltinSequence::RudinShapiro), "0001001000011101");
    assert_eq!(show(BuiltinSequence::Fibonacci), "0100101001001010");
    assert_eq!(show(BuiltinSequence::PeriodDoubling), "1011101010111011");
}

fn decide(seq: BuiltinSequence, text: &str) -> bool {
    Compiler::new(Library::stdlib()).decide_str(text, &Binding::new(seq)).unwrap().truth
}

#[test]
fn classical_word_properties() {
    use BuiltinSequence::*;
    let overlap = "Ei Ep p>0 & $FactorEq(i,i+p,p+1)";
    let cube = "Ei Ep p>0 & $FactorEq(i,i+p,2*p)";
    let fourth = "Ei Ep p>0 & $FactorEq(i,i+p,3*p)";
    assert!(!decide(ThueMorse, overlap));
    assert!(decide(RudinShapiro, overlap));
    assert!(decide(Fibonacci, cube));
    assert!(!decide(Fibonacci, fourth));
    assert!(decide(Paperfolding, "An Ei $Pal(i,n) => n <= 13"));
    assert!(!decide(Paperfolding, "Ei $Pal(i,14)"));
    assert!(decide(ThueMorse, "Ai Ej j>i & X[j] = X[i]"));
}

#[test]
fn free_variables_enumerate_in_order() {
    let mut c = Compiler::new(Library::stdlib());
    let sum = c.compile_str("x + y = z & x < y", &Binding::builtin_only()).unwrap();
    assert_eq!(sum.vars, ["x", "y", "z"]);
    let got = sum.enumerate(3);
    assert_eq!(got, vec![vec![0, 1, 1], vec![0, 2, 2], vec![0, 3, 3], vec![1, 2, 3]]);
    let d = c.decide_str("Ex Ey x + y = 7 & x = 2*y + 1", &Binding::builtin_only()).unwrap();
    assert!(d.truth);
    assert_eq!(d.example, Some(vec![5, 2]));
}
