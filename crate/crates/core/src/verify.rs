//! Machine checks of the identities the two built-in maps are known to
//! satisfy, and bounded sweeps over curve space.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::One;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::curves::{
    canonicalize, decompose_twist, enumerate_curves, orbit, sweep, Classification, Curve,
    CurveError, OrbitResult,
};
use crate::endo::{build_wn, hat2_table, verify_contraction_closure, Nucleus, WordHom};
use crate::mapdef::{builtin, LoadedMap};
use crate::words::{Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("suite requires {requires}")]
    NotApplicable { requires: &'static str },
    #[error("unknown suite `{0}`")]
    UnknownSuite(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Which built-in a loaded map coincides with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Known {
    Rabbit,
    Dendrite,
    Other,
}

pub fn identify(map: &LoadedMap) -> Known {
    let same = |name: &str| builtin(name).is_ok_and(|b| b.definition == map.definition);
    if same("rabbit") {
        Known::Rabbit
    } else if same("dendrite") {
        Known::Dendrite
    } else {
        Known::Other
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    NucleusTable,
    Recursions,
    Section,
    LengthDecrease,
}

impl Suite {
    pub const ALL: [Suite; 4] = [
        Suite::NucleusTable,
        Suite::Recursions,
        Suite::Section,
        Suite::LengthDecrease,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Suite::NucleusTable => "table7",
            Suite::Recursions => "recursions",
            Suite::Section => "prop84",
            Suite::LengthDecrease => "lemma83",
        }
    }

    pub fn from_name(s: &str) -> Result<Suite, VerifyError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| VerifyError::UnknownSuite(s.to_string()))
    }

    pub fn applies_to(self, known: Known) -> bool {
        match self {
            Suite::NucleusTable => known == Known::Rabbit,
            Suite::Recursions => known != Known::Other,
            Suite::Section | Suite::LengthDecrease => known == Known::Dendrite,
        }
    }

    fn requirement(self) -> &'static str {
        match self {
            Suite::NucleusTable => "rabbit",
            Suite::Recursions => "rabbit or dendrite",
            Suite::Section | Suite::LengthDecrease => "dendrite",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    /// Depth for the `w_n` checks.
    pub depth: usize,
    /// Random samples per randomized check.
    pub samples: usize,
    pub max_word_len: usize,
    pub seed: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            depth: 12,
            samples: 10_000,
            max_word_len: 24,
            seed: 0x7ab_b17,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckItem {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub items: Vec<CheckItem>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.items.iter().filter(|i| i.pass).count()
    }

    pub fn all_pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

pub fn run_suite(map: &LoadedMap, suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport, VerifyError> {
    let known = identify(map);
    if !suite.applies_to(known) {
        return Err(VerifyError::NotApplicable {
            requires: suite.requirement(),
        });
    }
    let items = match suite {
        Suite::NucleusTable => nucleus_table(map),
        Suite::Recursions => recursions(map, known, opts),
        Suite::Section => section(map, opts)?,
        Suite::LengthDecrease => length_decrease(map, opts),
    };
    Ok(SuiteReport { suite, items })
}

pub fn random_word(rng: &mut impl Rng, len: usize) -> Word {
    let all = [Letter::pos(0), Letter::neg(0), Letter::pos(1), Letter::neg(1)];
    let mut v: Vec<Letter> = Vec::with_capacity(len);
    while v.len() < len {
        let l = all[rng.random_range(0..4)];
        if v.last() != Some(&l.inverse()) {
            v.push(l);
        }
    }
    Word::reduce(v)
}

/// Rows and columns `1, x, x⁻¹, y, y⁻¹, z⁻¹, z` and the expected
/// `ψ̂²(ab)` entries, in rabbit word syntax.
pub const NUCLEUS_HEADERS: [&str; 7] = ["1", "x", "x^-1", "y", "y^-1", "z^-1", "z"];
pub const NUCLEUS_TABLE: [[&str; 7]; 7] = [
    ["1", "1", "z^-1", "1", "1", "1", "y"],
    ["1", "z", "1", "1", "1", "1", "y"],
    ["z^-1", "1", "z^-1", "1", "1", "1", "y"],
    ["1", "1", "z^-1", "x", "1", "x", "z^-1"],
    ["1", "x^-1", "y", "1", "1", "1", "y"],
    ["1", "1", "z^-1", "y^-1", "1", "y^-1", "1"],
    ["y", "1", "z^-1", "1", "1", "1", "y"],
];

/// Computed `ψ̂²(ab)` table with the expected entries alongside.
pub fn nucleus_table_entries(map: &LoadedMap) -> Vec<(String, String, Word, Word)> {
    let parse = |s: &str| map.parse_word(s).expect("table entries parse");
    let heads: Vec<Word> = NUCLEUS_HEADERS.iter().map(|s| parse(s)).collect();
    let got = hat2_table(&map.endo, &heads, &heads);
    let mut out = Vec::with_capacity(49);
    for (i, row) in got.into_iter().enumerate() {
        for (j, value) in row.into_iter().enumerate() {
            out.push((
                NUCLEUS_HEADERS[i].to_string(),
                NUCLEUS_HEADERS[j].to_string(),
                value,
                parse(NUCLEUS_TABLE[i][j]),
            ));
        }
    }
    out
}

fn nucleus_table(map: &LoadedMap) -> Vec<CheckItem> {
    let mut items: Vec<CheckItem> = nucleus_table_entries(map)
        .into_iter()
        .map(|(a, b, got, want)| CheckItem {
            label: format!("({a})({b})"),
            pass: got == want,
            detail: format!("got {}, expected {}", map.format_word(&got), map.format_word(&want)),
        })
        .collect();
    let closed = verify_contraction_closure(&map.endo, &Nucleus::rabbit());
    items.push(CheckItem {
        label: "closure N*N -> N".into(),
        pass: closed,
        detail: if closed { "closed".into() } else { "not closed".into() },
    });
    items
}

/// `(prefix, factor when w ∈ H, factor when w ∉ H)` for `ψ̂(prefix·w)`.
fn recursion_table(known: Known) -> &'static [(&'static str, &'static str, &'static str)] {
    match known {
        Known::Rabbit => &[
            ("x", "y", "1"),
            ("x^-1", "y^-1", "1"),
            ("y", "1", "y^-1 x^-1"),
            ("y^-1", "x y", "1"),
        ],
        Known::Dendrite => &[
            ("a", "1", "1"),
            ("a^-1", "1", "1"),
            ("b", "c", "b"),
            ("b^-1", "c^-1", "b^-1"),
            ("c", "b^-1", "c^-1"),
            ("c^-1", "c", "b"),
        ],
        Known::Other => &[],
    }
}

fn recursions(map: &LoadedMap, known: Known, opts: &SuiteOptions) -> Vec<CheckItem> {
    let psi = &map.endo;
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let samples: Vec<Word> = (0..opts.samples)
        .map(|_| {
            let len = rng.random_range(0..=opts.max_word_len);
            random_word(&mut rng, len)
        })
        .collect();
    let mut items = Vec::new();
    for &(prefix, in_h, out_h) in recursion_table(known) {
        let p = map.parse_word(prefix).expect("prefix parses");
        for (case, factor) in [("w in H", in_h), ("w not in H", out_h)] {
            let f = map.parse_word(factor).expect("factor parses");
            let want_in = case == "w in H";
            let mut tried = 0;
            let mut bad = 0;
            for w in samples.iter().filter(|w| psi.in_domain(w) == want_in) {
                tried += 1;
                if psi.apply_hat(&p.mul(w)) != f.mul(&psi.apply_hat(w)) {
                    bad += 1;
                }
            }
            items.push(CheckItem {
                label: format!("hat({prefix} w) = {factor} hat(w), {case}"),
                pass: bad == 0 && tried > 0,
                detail: format!("{}/{tried} hold", tried - bad),
            });
        }
    }
    if known == Known::Dendrite {
        let bad = samples
            .iter()
            .filter(|w| map.axis_length(&psi.apply_hat(w)) > map.axis_length(w))
            .count();
        items.push(CheckItem {
            label: "|hat(w)| <= |w|".into(),
            pass: bad == 0,
            detail: format!("{}/{} hold", samples.len() - bad, samples.len()),
        });
    }
    items
}

/// Pullback orbit of `(b, w_n)`: `n` weight-one steps ending on the bare
/// `b` axis.
pub fn section_orbit_check(map: &LoadedMap, wn: &Word, n: usize) -> Result<bool, CurveError> {
    let start = canonicalize(&map.axes, 1, wn);
    let res = orbit(&map.endo, &map.axes, &start, n + 4)?;
    let bare_b = canonicalize(&map.axes, 1, &Word::identity());
    let head_ok = res.trajectory.len() >= n
        && res.trajectory[..n].iter().all(|s| s.weight == Rational64::one() && s.target.is_some())
        && res.trajectory[n - 1].target.as_ref() == Some(&bare_b);
    let tail_ok = matches!(res.classification, Classification::EventuallyTrivial { steps } if steps == n + 3);
    Ok(head_ok && tail_ok)
}

fn section(map: &LoadedMap, opts: &SuiteOptions) -> Result<Vec<CheckItem>, VerifyError> {
    let psi = &map.endo;
    let sigma = WordHom::dendrite_section();
    let mut rng = StdRng::seed_from_u64(opts.seed ^ 0x5ec7);
    let mut bad = 0;
    for _ in 0..opts.samples {
        let len = rng.random_range(0..=opts.max_word_len);
        let g = random_word(&mut rng, len);
        if psi.apply(&sigma.apply(&g)).ok().as_ref() != Some(&g) {
            bad += 1;
        }
    }
    let mut items = vec![CheckItem {
        label: "psi(sigma(g)) = g".into(),
        pass: bad == 0,
        detail: format!("{}/{} hold", opts.samples - bad, opts.samples),
    }];
    let b = Word::generator(1);
    for n in 1..=opts.depth {
        let wn = build_wn(&sigma, n);
        let twist = b.conj(&wn);
        let exact = psi.apply_iter(&twist, n).ok() == Some(b.clone());
        let orbit_ok = section_orbit_check(map, &wn, n)?;
        items.push(CheckItem {
            label: format!("n = {n}"),
            pass: exact && orbit_ok,
            detail: format!(
                "|w_n| = {}, psi^n(b^w_n) = b: {exact}, orbit: {orbit_ok}",
                wn.len()
            ),
        });
    }
    Ok(items)
}

/// For `w ∉ H` with `ψ̂(w) ∉ H`: `ψ²(b^w) = b^v`, returning the shortest
/// such `v` in the axis metric.
pub fn second_iterate_conjugator(map: &LoadedMap, w: &Word) -> Option<Word> {
    let b = Word::generator(1);
    let h = map.endo.apply_iter(&b.conj(w), 2).ok()?;
    let (curve, t) = decompose_twist(&map.axes, &h).ok()?;
    if curve.axis() != 1 || t != 1 {
        return None;
    }
    let v = curve.conjugator().clone();
    let span = v.len() as i64 + 2;
    (-span..=span)
        .map(|k| b.pow(k).mul(&v))
        .min_by_key(|u| (map.axis_length(u), u.clone()))
}

fn length_decrease(map: &LoadedMap, opts: &SuiteOptions) -> Vec<CheckItem> {
    let psi = &map.endo;
    let mut rng = StdRng::seed_from_u64(opts.seed ^ 0x83);
    let mut tried = 0;
    let mut bad = Vec::new();
    for _ in 0..opts.samples {
        let len = rng.random_range(1..=opts.max_word_len);
        let w = random_word(&mut rng, len);
        if psi.in_domain(&w) || psi.in_domain(&psi.apply_hat(&w)) {
            continue;
        }
        tried += 1;
        let ok = second_iterate_conjugator(map, &w)
            .is_some_and(|v| map.axis_length(&v) < map.axis_length(&w));
        if !ok {
            bad.push(w);
        }
    }
    let mut detail = format!("{}/{tried} hold", tried - bad.len());
    if let Some(w) = bad.first() {
        detail.push_str(&format!("; first counterexample w = {}", map.format_word(w)));
    }
    vec![CheckItem {
        label: "psi^2(b^w) = b^v with |v| < |w|".into(),
        pass: bad.is_empty() && tried > 0,
        detail,
    }]
}

/// Outcome of a bounded sweep over all curves with short conjugators.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub max_len: usize,
    pub max_steps: usize,
    pub results: Vec<OrbitResult>,
    /// `(classification label, steps)` → count, where steps is the number of
    /// pullbacks until triviality or until the cycle closes.
    pub histogram: BTreeMap<(String, usize), usize>,
    pub counterexamples: Vec<(Curve, String)>,
}

impl SweepReport {
    pub fn count(&self, label: &str) -> usize {
        self.histogram
            .iter()
            .filter(|((l, _), _)| l == label)
            .map(|(_, c)| c)
            .sum()
    }
}

/// Trivialization bound for the `z² + i` map in terms of conjugator length.
pub fn dendrite_step_bound(conjugator_len: usize) -> usize {
    4 * conjugator_len + 3
}

pub fn run_sweep(map: &LoadedMap, max_len: usize, max_steps: usize) -> Result<SweepReport, VerifyError> {
    let curves = enumerate_curves(&map.axes, max_len);
    let results = sweep(&map.endo, &map.axes, &curves, max_steps)?;
    let known = identify(map);
    let three_cycle: Vec<Curve> = (0..3)
        .map(|a| canonicalize(&map.axes, a, &Word::identity()))
        .collect();
    let mut histogram = BTreeMap::new();
    let mut counterexamples = Vec::new();
    for r in &results {
        let steps = r.trajectory.len();
        *histogram
            .entry((r.classification.label().to_string(), steps))
            .or_insert(0) += 1;
        let problem = match &r.classification {
            Classification::Unresolved { .. } => Some("unresolved".to_string()),
            Classification::EntersCycle { cycle, product, .. } => {
                if known == Known::Dendrite {
                    Some("dendrite orbit entered a cycle".to_string())
                } else if known == Known::Rabbit && !same_set(cycle, &three_cycle) {
                    Some("cycle differs from the axis three-cycle".to_string())
                } else if *product >= Rational64::one() {
                    Some(format!("cycle weight product {product} >= 1"))
                } else {
                    None
                }
            }
            Classification::EventuallyTrivial { steps } => {
                let bound = dendrite_step_bound(r.start.conjugator().len());
                (known == Known::Dendrite && *steps > bound)
                    .then(|| format!("trivial after {steps} steps, bound {bound}"))
            }
        };
        if let Some(p) = problem {
            counterexamples.push((r.start.clone(), p));
        }
    }
    Ok(SweepReport {
        max_len,
        max_steps,
        results,
        histogram,
        counterexamples,
    })
}

fn same_set(a: &[Curve], b: &[Curve]) -> bool {
    a.len() == b.len() && a.iter().all(|c| b.contains(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()).unwrap(), s);
        }
        assert!(Suite::from_name("nope").is_err());
    }

    #[test]
    fn applicability() {
        let r = builtin("rabbit").unwrap();
        let err = run_suite(&r, Suite::LengthDecrease, &SuiteOptions::default()).unwrap_err();
        assert_eq!(err.to_string(), "suite requires dendrite");
        let d = builtin("dendrite").unwrap();
        assert!(run_suite(&d, Suite::NucleusTable, &SuiteOptions::default()).is_err());
        assert_eq!(identify(&r), Known::Rabbit);
        assert_eq!(identify(&d), Known::Dendrite);
    }

    #[test]
    fn table_suite_passes() {
        let r = builtin("rabbit").unwrap();
        let rep = run_suite(&r, Suite::NucleusTable, &SuiteOptions::default()).unwrap();
        let bad: Vec<_> = rep.items.iter().filter(|i| !i.pass).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert_eq!(rep.items.len(), 50);
    }

    #[test]
    fn small_sweeps() {
        let r = builtin("rabbit").unwrap();
        let rep = run_sweep(&r, 0, 1000).unwrap();
        assert_eq!(rep.results.len(), 3);
        assert_eq!(rep.count("cycle"), 3);
        assert!(rep.counterexamples.is_empty());

        let d = builtin("dendrite").unwrap();
        let rep = run_sweep(&d, 0, 1000).unwrap();
        assert_eq!(rep.count("trivial"), 3);
        assert!(rep
            .results
            .iter()
            .all(|r| matches!(r.classification, Classification::EventuallyTrivial { steps } if steps <= 3)));
    }
}
