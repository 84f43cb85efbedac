use proptest::prelude::*;
use wordlogic::oracle::*;
use wordlogic::sequences::BuiltinSequence;

fn binary_words(max_len: usize) -> impl Iterator<Item = Vec<u8>> {
    (0..=max_len).flat_map(|n| (0u32..1 << n).map(move |bits| (0..n).map(|k| (bits >> k & 1) as u8).collect()))
}

#[test]
fn characterizations_agree_on_short_binary_words() {
    for w in binary_words(11) {
        assert_eq!(is_privileged(&w), has_property_p(&w), "{w:?}");
        assert_eq!(is_rich(&w), is_rich_by_suffixes(&w), "{w:?}");
        assert_eq!(is_trapezoidal(&w), is_trapezoidal_by_rk(&w), "{w:?}");
        assert_eq!(Some(is_balanced(&w)), is_balanced_coven_hedlund(&w), "{w:?}");
        if is_privileged(&w) {
            assert!(is_closed(&w), "{w:?}");
        }
        assert!(palindromic_factors(&w).len() <= w.len() + 1);
    }
}

proptest! {
    #[test]
    fn ternary_rich_and_trapezoidal(w in proptest::collection::vec(0u8..3, 0..=12)) {
        prop_assert_eq!(is_rich(&w), is_rich_by_suffixes(&w));
        prop_assert_eq!(is_trapezoidal(&w), is_trapezoidal_by_rk(&w));
        prop_assert_eq!(is_privileged(&w), has_property_p(&w));
        prop_assert!(palindromic_factors(&w).len() <= w.len() + 1);
    }

    #[test]
    fn palindrome_tree_counts(w in proptest::collection::vec(0u8..3, 0..=40)) {
        let counts = palindrome_counts(&w);
        for n in 0..=w.len() {
            prop_assert_eq!(counts[n], palindromic_factors(&w[..n]).len());
        }
    }

    #[test]
    fn three_letters_are_never_trapezoidal(w in proptest::collection::vec(0u8..3, 3..=12)) {
        let all = (0..3).all(|c| w.contains(&c));
        prop_assume!(all);
        prop_assert!(!is_trapezoidal(&w));
    }
}

#[test]
fn thue_morse_factor_counts() {
    let rich = distinct_property_factors(BuiltinSequence::ThueMorse, Property::Rich, 17).unwrap();
    assert_eq!((rich.total, rich.longest), (161, Some(16)));
    let trap = distinct_property_factors(BuiltinSequence::ThueMorse, Property::Trapezoidal, 9).unwrap();
    assert_eq!((trap.total, trap.longest), (43, Some(8)));
    let bal = distinct_property_factors(BuiltinSequence::ThueMorse, Property::Balanced, 9).unwrap();
    assert_eq!((bal.total, bal.longest), (41, Some(8)));
    let any = distinct_property_factors(BuiltinSequence::ThueMorse, Property::Any, 4).unwrap();
    assert_eq!(any.per_length, vec![1, 2, 4, 6, 10]);
}

#[test]
fn doubling_does_not_change_stable_counts() {
    let a = distinct_property_factors(BuiltinSequence::Paperfolding, Property::Closed, 12).unwrap();
    let b = distinct_property_factors_capped(BuiltinSequence::Paperfolding, Property::Closed, 12, 1 << 22).unwrap();
    assert_eq!(a, b);
    let mut index = FactorIndex::new(BuiltinSequence::RudinShapiro, DEFAULT_CAP);
    let (f, len) = index.factors(20).unwrap();
    let bigger: std::collections::BTreeSet<Vec<u32>> =
        BuiltinSequence::RudinShapiro.prefix(4 * len).windows(20).map(<[u32]>::to_vec).collect();
    assert_eq!(f, bigger.into_iter().collect::<Vec<_>>());
}

#[test]
fn small_cap_reports_instability() {
    let err = distinct_property_factors_capped(BuiltinSequence::RudinShapiro, Property::Any, 10, 1024);
    assert!(matches!(err, Err(wordlogic::Error::NotStabilized { cap: 1024 })));
}

#[test]
fn maximal_palindromes_of_sequences() {
    let rs = stable_maximal_palindromes(BuiltinSequence::RudinShapiro, 20).unwrap();
    assert!(rs.contains(&vec![0, 1, 0, 0, 0, 1, 0]));
    let pf = stable_maximal_palindromes(BuiltinSequence::Paperfolding, 20).unwrap();
    assert!(pf.contains(&vec![0, 0, 1, 1, 0, 0]));
    assert!(stable_maximal_palindromes(BuiltinSequence::Fibonacci, 30).unwrap().is_empty());
    let tm = stable_maximal_palindromes(BuiltinSequence::ThueMorse, 14).unwrap();
    let lens: std::collections::BTreeSet<usize> = tm.iter().map(Vec::len).collect();
    assert_eq!(lens.into_iter().collect::<Vec<_>>(), vec![3, 12]);
    let prefix = BuiltinSequence::Fibonacci.prefix(400);
    assert!(maximal_palindromes(&prefix, 100).is_empty());
}
