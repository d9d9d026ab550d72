//! Curves on the four-punctured sphere as conjugates of three twist axes,
//! and the pullback relation they follow under `ψ`.
//!
//! A curve is stored as `(axis, conjugator)` and stands for the twist
//! `conjugator⁻¹ · axis · conjugator`. The centralizer of a primitive axis
//! word is the cyclic group it generates, so conjugators are taken modulo
//! left multiplication by axis powers; the canonical representative is the
//! shortlex-least word of that coset.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::endo::VirtualEndo;
use crate::words::{Alphabet, CyclicWord, Letter, Word, WordError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("twist exponent must be nonzero")]
    ZeroExponent,
    #[error("image {image:?} is not a power of a conjugate of an axis")]
    NonTwistImage { image: Word },
    #[error("unknown axis `{0}`")]
    UnknownAxis(String),
    #[error("malformed curve expression `{0}`")]
    BadExpression(String),
    #[error(transparent)]
    Word(#[from] WordError),
}

/// The three twist axes: the two generators and one derived word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisSet {
    names: [String; 3],
    words: [Word; 3],
}

impl AxisSet {
    /// The caller guarantees each word is cyclically reduced, primitive and
    /// that no two are conjugate (map loading checks this).
    pub fn new(names: [String; 3], words: [Word; 3]) -> Self {
        AxisSet { names, words }
    }

    pub fn word(&self, axis: usize) -> &Word {
        &self.words[axis]
    }

    pub fn name(&self, axis: usize) -> &str {
        &self.names[axis]
    }

    pub fn words(&self) -> &[Word; 3] {
        &self.words
    }

    pub fn names(&self) -> &[String; 3] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Matches a cyclic word against the axes up to rotation and inversion.
    /// Returns `(axis, sign, q)` with `root = q⁻¹ · axis^sign · q`.
    fn match_root(&self, root: &CyclicWord) -> Option<(usize, i64, Word)> {
        for (i, a) in self.words.iter().enumerate() {
            for sign in [1i64, -1] {
                let oriented = if sign == 1 { a.clone() } else { a.inverse() };
                let Some(cw) = CyclicWord::new(oriented.clone()) else {
                    continue;
                };
                if let Some(k) = root.rotation_offset(&cw) {
                    // root = A[k..] A[..k] = P⁻¹ A P with P = A[..k]
                    let q = Word::reduce(oriented.letters()[..k].iter().copied());
                    return Some((i, sign, q));
                }
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Curve {
    axis: u8,
    conjugator: Word,
}

impl Curve {
    pub fn axis(&self) -> usize {
        self.axis as usize
    }

    pub fn conjugator(&self) -> &Word {
        &self.conjugator
    }

    pub fn display<'a>(&'a self, axes: &'a AxisSet, alphabet: &'a Alphabet) -> DisplayCurve<'a> {
        DisplayCurve {
            curve: self,
            axes,
            alphabet,
        }
    }
}

pub struct DisplayCurve<'a> {
    curve: &'a Curve,
    axes: &'a AxisSet,
    alphabet: &'a Alphabet,
}

impl fmt::Display for DisplayCurve<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.axes.name(self.curve.axis());
        if self.curve.conjugator.is_identity() {
            write!(f, "{name}")
        } else {
            write!(f, "{name}^({})", self.alphabet.format(&self.curve.conjugator))
        }
    }
}

/// Shortlex-least element of the coset `⟨axis⟩ · w`.
///
/// `k ↦ |axisᵏ · w|` is convex with a flat bottom at most two wide, so a
/// descent from `w` followed by a look at both neighbours finds it.
pub fn canonical_conjugator(axis: &Word, w: &Word) -> Word {
    let up = axis.clone();
    let down = axis.inverse();
    let mut cur = w.clone();
    for step in [&up, &down] {
        loop {
            let next = step.mul(&cur);
            if next.len() < cur.len() {
                cur = next;
            } else {
                break;
            }
        }
    }
    let mut best = cur.clone();
    for step in [&up, &down] {
        let n = step.mul(&cur);
        if n.len() == cur.len() && n < best {
            best = n;
        }
    }
    best
}

pub fn canonicalize(axes: &AxisSet, axis: usize, conjugator: &Word) -> Curve {
    Curve {
        axis: axis as u8,
        conjugator: canonical_conjugator(axes.word(axis), conjugator),
    }
}

/// Reduced word of `(axisⁿ)^conjugator`.
pub fn twist_word(axes: &AxisSet, c: &Curve, n: i64) -> Result<Word, CurveError> {
    if n == 0 {
        return Err(CurveError::ZeroExponent);
    }
    Ok(axes.word(c.axis()).pow(n).conj(&c.conjugator))
}

/// `g⁻¹ · twist · g` as a curve.
pub fn act(axes: &AxisSet, g: &Word, c: &Curve) -> Curve {
    canonicalize(axes, c.axis(), &c.conjugator.mul(g))
}

/// Decomposes a nonidentity twist power `h = (axisᵗ)^v` into the curve and
/// the signed exponent.
pub fn decompose_twist(axes: &AxisSet, h: &Word) -> Result<(Curve, i64), CurveError> {
    let (core, conj) = h.cyclic_reduce()?;
    let (root, e) = core.primitive_root();
    let (axis, sign, q) = axes
        .match_root(&root)
        .ok_or_else(|| CurveError::NonTwistImage { image: h.clone() })?;
    Ok((canonicalize(axes, axis, &q.mul(&conj)), sign * e as i64))
}

/// One application of the pullback relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackStep {
    /// `None` when the preimage is trivial.
    pub target: Option<Curve>,
    /// Power of the twist fed to `ψ` (1 or 2).
    pub s: u8,
    /// Exponent of the image twist along the target axis.
    pub t: i64,
    /// `|t| / s`.
    pub weight: Rational64,
}

impl PullbackStep {
    pub fn is_trivial(&self) -> bool {
        self.target.is_none()
    }
}

pub fn pullback(psi: &VirtualEndo, axes: &AxisSet, c: &Curve) -> Result<PullbackStep, CurveError> {
    let g = twist_word(axes, c, 1)?;
    let s: u8 = if psi.in_domain(&g) { 1 } else { 2 };
    let h = psi
        .apply(&g.pow(s as i64))
        .expect("the square of any element lies in an index-2 subgroup");
    if h.is_identity() {
        return Ok(PullbackStep {
            target: None,
            s,
            t: 0,
            weight: Rational64::zero(),
        });
    }
    let (target, t) = decompose_twist(axes, &h)?;
    Ok(PullbackStep {
        target: Some(target),
        s,
        t,
        weight: Rational64::new(t.abs(), s as i64),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// The preimage is trivial after `steps` pullbacks.
    EventuallyTrivial { steps: usize },
    EntersCycle {
        preperiod: usize,
        cycle: Vec<Curve>,
        weights: Vec<Rational64>,
        product: Rational64,
    },
    Unresolved { max_steps: usize },
}

impl Classification {
    pub fn label(&self) -> &'static str {
        match self {
            Classification::EventuallyTrivial { .. } => "trivial",
            Classification::EntersCycle { .. } => "cycle",
            Classification::Unresolved { .. } => "unresolved",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitResult {
    pub start: Curve,
    pub trajectory: Vec<PullbackStep>,
    pub classification: Classification,
}

pub fn orbit(
    psi: &VirtualEndo,
    axes: &AxisSet,
    start: &Curve,
    max_steps: usize,
) -> Result<OrbitResult, CurveError> {
    let mut seen: HashMap<Curve, usize> = HashMap::new();
    seen.insert(start.clone(), 0);
    let mut trajectory = Vec::new();
    let mut cur = start.clone();
    for i in 0..max_steps {
        let step = pullback(psi, axes, &cur)?;
        let target = step.target.clone();
        trajectory.push(step);
        let Some(next) = target else {
            return Ok(OrbitResult {
                start: start.clone(),
                trajectory,
                classification: Classification::EventuallyTrivial { steps: i + 1 },
            });
        };
        if let Some(&first) = seen.get(&next) {
            let mut cycle = Vec::new();
            let mut c = start.clone();
            for (k, st) in trajectory.iter().enumerate() {
                if k >= first {
                    cycle.push(c.clone());
                }
                c = st.target.clone().expect("nontrivial along a cycle");
            }
            let weights: Vec<Rational64> =
                trajectory[first..].iter().map(|s| s.weight).collect();
            let product = weights.iter().fold(Rational64::one(), |acc, w| acc * w);
            return Ok(OrbitResult {
                start: start.clone(),
                trajectory,
                classification: Classification::EntersCycle {
                    preperiod: first,
                    cycle,
                    weights,
                    product,
                },
            });
        }
        seen.insert(next.clone(), i + 1);
        cur = next;
    }
    Ok(OrbitResult {
        start: start.clone(),
        trajectory,
        classification: Classification::Unresolved { max_steps },
    })
}

/// All reduced words of length at most `max_len`, in shortlex order.
pub fn reduced_words(max_len: usize) -> Vec<Word> {
    let letters = [Letter::pos(0), Letter::neg(0), Letter::pos(1), Letter::neg(1)];
    let mut out = vec![Word::identity()];
    let mut layer = vec![Word::identity()];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(layer.len() * 3);
        for w in &layer {
            for &l in &letters {
                if w.last() != Some(l.inverse()) {
                    let mut v = w.letters().to_vec();
                    v.push(l);
                    next.push(Word::from_reduced(v));
                }
            }
        }
        next.sort();
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

/// Every canonical curve whose conjugator has length at most `max_len`.
pub fn enumerate_curves(axes: &AxisSet, max_len: usize) -> Vec<Curve> {
    let words = reduced_words(max_len);
    let mut set = BTreeSet::new();
    for axis in 0..3 {
        for w in &words {
            set.insert(canonicalize(axes, axis, w));
        }
    }
    set.into_iter().collect()
}

/// Orbit of every curve in `curves`, computed in parallel on the current
/// rayon pool and returned in input order.
pub fn sweep(
    psi: &VirtualEndo,
    axes: &AxisSet,
    curves: &[Curve],
    max_steps: usize,
) -> Result<Vec<OrbitResult>, CurveError> {
    curves
        .par_iter()
        .map(|c| orbit(psi, axes, c, max_steps))
        .collect()
}

/// Parses `AXIS` or `AXIS^(WORD)`.
pub fn parse_curve(axes: &AxisSet, alphabet: &Alphabet, text: &str) -> Result<Curve, CurveError> {
    let text = text.trim();
    let (name, conj) = match text.split_once('^') {
        None => (text, Word::identity()),
        Some((name, rest)) => {
            let rest = rest.trim();
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| CurveError::BadExpression(text.to_string()))?;
            (name.trim(), alphabet.parse(inner)?)
        }
    };
    let axis = axes
        .index_of(name)
        .ok_or_else(|| CurveError::UnknownAxis(name.to_string()))?;
    Ok(canonicalize(axes, axis, &conj))
}
