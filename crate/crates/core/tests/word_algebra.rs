use curvepull_core::words::conjugacy_equal;
use curvepull_core::{Alphabet, Letter, Word};
use proptest::prelude::*;

fn letter() -> impl Strategy<Value = Letter> {
    (0usize..2, prop::bool::ANY).prop_map(|(g, inv)| if inv { Letter::neg(g) } else { Letter::pos(g) })
}

fn raw(max: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(letter(), 0..=max)
}

fn word(max: usize) -> impl Strategy<Value = Word> {
    raw(max).prop_map(Word::reduce)
}

// Stack-free reference: delete adjacent inverse pairs until none remain.
fn naive_reduce(mut v: Vec<Letter>) -> Vec<Letter> {
    loop {
        let hit = v.windows(2).position(|p| p[0] == p[1].inverse());
        match hit {
            Some(i) => {
                v.drain(i..i + 2);
            }
            None => return v,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn reduce_idempotent_and_matches_reference(v in raw(32)) {
        let w = Word::reduce(v.clone());
        prop_assert_eq!(Word::reduce(w.letters().to_vec()), w.clone());
        let reference = naive_reduce(v);
        prop_assert_eq!(w.letters(), reference.as_slice());
    }

    #[test]
    fn mul_associative(a in word(32), b in word(32), c in word(32)) {
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    #[test]
    fn inverse_laws(u in word(32)) {
        prop_assert_eq!(u.inverse().inverse(), u.clone());
        prop_assert!(u.mul(&u.inverse()).is_identity());
        prop_assert!(u.inverse().mul(&u).is_identity());
    }

    #[test]
    fn cyclic_reduce_round_trip(u in word(32)) {
        prop_assume!(!u.is_identity());
        let (core, conj) = u.cyclic_reduce().unwrap();
        prop_assert!(core.as_word().is_cyclically_reduced());
        prop_assert_eq!(core.as_word().conj(&conj), u);
    }

    #[test]
    fn primitive_root_power(u in word(12), k in 1i64..5) {
        prop_assume!(!u.is_identity());
        let (core, _) = u.pow(k).cyclic_reduce().unwrap();
        let (root, e) = core.primitive_root();
        prop_assert_eq!(root.as_word().pow(e as i64), core.as_word().clone());
        prop_assert_eq!(e as i64 % k, 0);
    }

    #[test]
    fn conjugacy_is_an_equivalence(u in word(10), g in word(6), h in word(6), other in word(10)) {
        let v = u.conj(&g);
        let w = v.conj(&h);
        prop_assert!(conjugacy_equal(&u, &u));
        prop_assert!(conjugacy_equal(&u, &v) && conjugacy_equal(&v, &u));
        prop_assert!(conjugacy_equal(&u, &w));
        // Conjugation preserves exponent sums, so a mismatch there rules it out.
        if (0..2).any(|i| u.exponent_sum(i) != other.exponent_sum(i)) {
            prop_assert!(!conjugacy_equal(&u, &other));
        }
        prop_assert_eq!(conjugacy_equal(&u, &other), conjugacy_equal(&other, &w));
    }

    #[test]
    fn format_parse_round_trip(u in word(20)) {
        let al = Alphabet::new("x", "y");
        prop_assert_eq!(al.parse(&al.format(&u)).unwrap(), u);
    }

    #[test]
    fn shortlex_order(u in word(8), v in word(8)) {
        let by_key = (u.len(), u.letters().iter().map(|l| l.code()).collect::<Vec<_>>())
            .cmp(&(v.len(), v.letters().iter().map(|l| l.code()).collect::<Vec<_>>()));
        prop_assert_eq!(u.cmp(&v), by_key);
    }
}

#[test]
fn documented_examples() {
    let al = Alphabet::new("x", "y");
    let w = |s: &str| al.parse(s).unwrap();
    let (core, conj) = w("y x x y^-1").cyclic_reduce().unwrap();
    assert_eq!(core.as_word(), &w("x x"));
    assert_eq!(conj, w("y^-1"));
    assert_eq!(core.primitive_root(), (curvepull_core::CyclicWord::new(w("x")).unwrap(), 2));
    assert!(conjugacy_equal(&w("y^-1 x^-1"), &w("x^-1 y^-1")));
    let (c, k) = w("x y x y").cyclic_reduce().unwrap();
    assert_eq!(c.as_word(), &w("x y x y"));
    assert!(k.is_identity());
    assert_eq!(c.primitive_root().1, 2);
    assert!(w("x y").cyclic_reduce().is_ok());
    assert!(Word::identity().cyclic_reduce().is_err());
}
