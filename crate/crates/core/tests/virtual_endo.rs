use curvepull_core::endo::{build_wn, WordHom};
use curvepull_core::verify::random_word;
use curvepull_core::{builtin, LoadedMap, Nucleus, Word};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn basis(map: &LoadedMap) -> Vec<Word> {
    map.endo.parity().schreier_basis().into_iter().map(|(_, w)| w).collect()
}

// Random element of H as a product of Schreier generators and their inverses.
fn random_in_h(rng: &mut StdRng, basis: &[Word], len: usize) -> Word {
    (0..len).fold(Word::identity(), |acc, _| {
        let g = &basis[rng.random_range(0..basis.len())];
        if rng.random_bool(0.5) {
            acc.mul(g)
        } else {
            acc.mul(&g.inverse())
        }
    })
}

#[test]
fn homomorphism_on_domain() {
    for name in ["rabbit", "dendrite"] {
        let m = builtin(name).unwrap();
        let b = basis(&m);
        let mut rng = StdRng::seed_from_u64(10_000);
        for _ in 0..10_000 {
            let (lu, lv) = (rng.random_range(0..8), rng.random_range(0..8));
            let u = random_in_h(&mut rng, &b, lu);
            let v = random_in_h(&mut rng, &b, lv);
            assert!(m.endo.in_domain(&u) && m.endo.in_domain(&v));
            let lhs = m.endo.apply(&u.mul(&v)).unwrap();
            let rhs = m.endo.apply(&u).unwrap().mul(&m.endo.apply(&v).unwrap());
            assert_eq!(lhs, rhs, "{name}: u = {}, v = {}", m.format_word(&u), m.format_word(&v));
        }
    }
}

#[test]
fn generator_images() {
    let r = builtin("rabbit").unwrap();
    let p = |s: &str| r.parse_word(s).unwrap();
    assert_eq!(r.endo.apply(&p("x")).unwrap(), p("y"));
    assert_eq!(r.endo.apply(&p("y y")).unwrap(), p("y^-1 x^-1"));
    assert_eq!(r.endo.apply(&p("y^-1 x y")).unwrap(), Word::identity());
    assert!(r.endo.apply(&p("y")).is_err());

    let d = builtin("dendrite").unwrap();
    let p = |s: &str| d.parse_word(s).unwrap();
    assert_eq!(d.endo.apply(&p("a a")).unwrap(), Word::identity());
    assert_eq!(d.endo.apply(&p("b")).unwrap(), p("b^-1 a^-1"));
    assert_eq!(d.endo.apply(&p("a^-1 b a")).unwrap(), p("b"));
}

#[test]
fn hat_agrees_with_psi_on_domain() {
    let mut rng = StdRng::seed_from_u64(3);
    for name in ["rabbit", "dendrite"] {
        let m = builtin(name).unwrap();
        let t = m.endo.parity().transversal_word();
        for _ in 0..2_000 {
            let len = rng.random_range(0..20);
            let w = random_word(&mut rng, len);
            let expected = if m.endo.in_domain(&w) {
                m.endo.apply(&w).unwrap()
            } else {
                m.endo.apply(&t.inverse().mul(&w)).unwrap()
            };
            assert_eq!(m.endo.apply_hat(&w), expected);
        }
    }
}

#[test]
fn rabbit_psi_cubed_of_nucleus_conjugates_is_an_axis_power() {
    let m = builtin("rabbit").unwrap();
    let mut checked = 0;
    for axis in 0..3 {
        for v in Nucleus::rabbit().elements() {
            for t in (-4i64..=4).filter(|&t| t != 0) {
                let u = m.axes.word(axis).pow(t).conj(v);
                let Ok(h) = m.endo.apply_iter(&u, 3) else {
                    continue;
                };
                checked += 1;
                let power = h.is_identity()
                    || (0..3).any(|b| (1..=16).any(|k| {
                        let a = m.axes.word(b).pow(k);
                        a == h || a.inverse() == h
                    }));
                assert!(power, "{}^{t} by {} gives {}", m.axes.name(axis), m.format_word(v), m.format_word(&h));
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn section_identities() {
    let d = builtin("dendrite").unwrap();
    let sigma = WordHom::dendrite_section();
    let mut rng = StdRng::seed_from_u64(84);
    for _ in 0..1_000 {
        let len = rng.random_range(0..24);
        let g = random_word(&mut rng, len);
        assert_eq!(d.endo.apply(&sigma.apply(&g)).unwrap(), g);
    }
    let b = Word::generator(1);
    for n in 1..=12 {
        let wn = build_wn(&sigma, n);
        assert_eq!(d.endo.apply_iter(&b.conj(&wn), n).unwrap(), b, "n = {n}");
    }
}

#[test]
fn nucleus_absorbs_short_words() {
    let m = builtin("rabbit").unwrap();
    let n = Nucleus::rabbit();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1_000 {
        let len = rng.random_range(0..30);
        let w = random_word(&mut rng, len);
        let orb = m.endo.hat_orbit(&w, 200, Some(&n));
        assert!(orb.entered_nucleus.is_some(), "{} never reaches N", m.format_word(&w));
    }
}
