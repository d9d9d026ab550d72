//! Reduced words in the free group on two generators.
//!
//! Every [`Word`] is kept freely reduced, so equality of group elements is
//! equality of letter sequences. Generators are bare indices `0` and `1`;
//! names only appear when parsing or printing through an [`Alphabet`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("trivial element has no cyclic core")]
    Trivial,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("malformed token `{0}`")]
    BadToken(String),
}

/// A generator or inverse generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    generator: u8,
    inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, sign: i8) -> Self {
        assert!(generator < 2, "generator index out of range");
        assert!(sign == 1 || sign == -1, "sign must be +1 or -1");
        Letter {
            generator: generator as u8,
            inverse: sign < 0,
        }
    }

    pub fn pos(generator: usize) -> Self {
        Letter::new(generator, 1)
    }

    pub fn neg(generator: usize) -> Self {
        Letter::new(generator, -1)
    }

    pub fn generator(self) -> usize {
        self.generator as usize
    }

    pub fn sign(self) -> i8 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    pub fn inverse(self) -> Self {
        Letter {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Dense code in `0..4`, handy for table lookups.
    pub fn code(self) -> usize {
        2 * self.generator as usize + self.inverse as usize
    }
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn generator(g: usize) -> Self {
        Word(vec![Letter::pos(g)])
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(raw: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in raw {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Wraps letters that are already known to be reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn mul(&self, other: &Word) -> Word {
        let a = &self.0;
        let b = &other.0;
        let mut k = 0;
        while k < a.len() && k < b.len() && a[a.len() - 1 - k] == b[k].inverse() {
            k += 1;
        }
        let mut out = Vec::with_capacity(a.len() + b.len() - 2 * k);
        out.extend_from_slice(&a[..a.len() - k]);
        out.extend_from_slice(&b[k..]);
        Word(out)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `self^w = w⁻¹ · self · w` (conjugation as a right action).
    pub fn conj(&self, w: &Word) -> Word {
        w.inverse().mul(self).mul(w)
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Exponent sum of generator `g`.
    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.0
            .iter()
            .filter(|l| l.generator() == g)
            .map(|l| l.sign() as i64)
            .sum()
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.first(), self.last()) {
            (Some(f), Some(l)) => self.len() == 1 || f != l.inverse(),
            _ => true,
        }
    }

    /// Splits `self` as `conj(core, conjugator)` with `core` cyclically
    /// reduced.
    pub fn cyclic_reduce(&self) -> Result<(CyclicWord, Word), WordError> {
        if self.is_identity() {
            return Err(WordError::Trivial);
        }
        let n = self.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        let core = Word(self.0[k..n - k].to_vec());
        // self = p · core · p⁻¹ with p = self[..k], so the conjugator is p⁻¹
        let conjugator = Word(self.0[..k].to_vec()).inverse();
        Ok((CyclicWord(core), conjugator))
    }

    /// Word length when each occurrence of a word in `extra` (or its
    /// inverse) may be spelled as a single letter.
    ///
    /// For a third generator `c` with `g0 · g1 · c = 1` the Cayley graph on
    /// `{g0, g1, c}` is a tree of triangles, and this tiling length is the
    /// exact word metric.
    pub fn length_over(&self, extra: &[Word]) -> usize {
        let pieces: Vec<Word> = extra
            .iter()
            .flat_map(|w| [w.clone(), w.inverse()])
            .filter(|w| w.len() > 1)
            .collect();
        let n = self.len();
        let mut best = vec![usize::MAX; n + 1];
        best[0] = 0;
        for i in 1..=n {
            best[i] = best[i - 1] + 1;
            for p in &pieces {
                let k = p.len();
                if k <= i && self.0[i - k..i] == p.0[..] {
                    best[i] = best[i].min(best[i - k] + 1);
                }
            }
        }
        best[n]
    }
}

/// Shortlex order: shorter words first, then lexicographic on letters.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Mul<&Word> for &Word {
    type Output = Word;

    fn mul(self, rhs: &Word) -> Word {
        Word::mul(self, rhs)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word::reduce(iter)
    }
}

/// A nonempty cyclically reduced word, standing for its conjugacy class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicWord(Word);

impl CyclicWord {
    pub fn new(w: Word) -> Option<Self> {
        (!w.is_identity() && w.is_cyclically_reduced()).then_some(CyclicWord(w))
    }

    pub fn as_word(&self) -> &Word {
        &self.0
    }

    pub fn into_word(self) -> Word {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rotate(&self, k: usize) -> CyclicWord {
        let mut v = self.0 .0.clone();
        let n = v.len();
        v.rotate_left(k % n);
        CyclicWord(Word(v))
    }

    /// The offset `k` with `self == other.rotate(k)`, if any.
    pub fn rotation_offset(&self, other: &CyclicWord) -> Option<usize> {
        let n = self.len();
        if n != other.len() {
            return None;
        }
        let a = self.0.letters();
        let b = other.0.letters();
        (0..n).find(|&k| (0..n).all(|i| a[i] == b[(i + k) % n]))
    }

    pub fn is_rotation_of(&self, other: &CyclicWord) -> bool {
        self.rotation_offset(other).is_some()
    }

    pub fn inverse(&self) -> CyclicWord {
        CyclicWord(self.0.inverse())
    }

    /// `(root, e)` with `self = root^e` and `e` maximal.
    pub fn primitive_root(&self) -> (CyclicWord, u32) {
        let a = self.0.letters();
        let n = a.len();
        for d in 1..=n {
            if n.is_multiple_of(d) && (d..n).all(|i| a[i] == a[i - d]) {
                return (CyclicWord(Word(a[..d].to_vec())), (n / d) as u32);
            }
        }
        unreachable!("the whole word is a period of itself")
    }
}

pub fn conjugacy_equal(u: &Word, v: &Word) -> bool {
    match (u.cyclic_reduce(), v.cyclic_reduce()) {
        (Err(_), Err(_)) => true,
        (Ok((cu, _)), Ok((cv, _))) => cu.is_rotation_of(&cv),
        _ => false,
    }
}

/// Generator names plus any derived names that expand to words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    generators: [String; 2],
    derived: Vec<(String, Word)>,
}

impl Alphabet {
    pub fn new(g0: impl Into<String>, g1: impl Into<String>) -> Self {
        Alphabet {
            generators: [g0.into(), g1.into()],
            derived: Vec::new(),
        }
    }

    pub fn with_derived(mut self, name: impl Into<String>, w: Word) -> Self {
        self.derived.push((name.into(), w));
        self
    }

    pub fn generator_names(&self) -> &[String; 2] {
        &self.generators
    }

    pub fn derived(&self) -> &[(String, Word)] {
        &self.derived
    }

    /// Resolves a generator or derived name to its word.
    pub fn lookup(&self, name: &str) -> Option<Word> {
        if let Some(g) = self.generators.iter().position(|n| n == name) {
            return Some(Word::generator(g));
        }
        self.derived
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, w)| w.clone())
    }

    /// Parses whitespace-separated tokens `g`, `g^-1` or `g^N`; `1` is the
    /// identity.
    pub fn parse(&self, text: &str) -> Result<Word, WordError> {
        let mut out = Word::identity();
        for tok in text.split_whitespace() {
            out = out.mul(&self.parse_token(tok)?);
        }
        Ok(out)
    }

    fn parse_token(&self, tok: &str) -> Result<Word, WordError> {
        if tok == "1" {
            return Ok(Word::identity());
        }
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e
                    .parse()
                    .map_err(|_| WordError::BadToken(tok.to_string()))?;
                (n, e)
            }
            None => (tok, 1),
        };
        if name.is_empty() {
            return Err(WordError::BadToken(tok.to_string()));
        }
        let base = self
            .lookup(name)
            .ok_or_else(|| WordError::UnknownGenerator(name.to_string()))?;
        Ok(base.pow(exp))
    }

    /// Letter-by-letter rendering using generator names only.
    pub fn format(&self, w: &Word) -> String {
        if w.is_identity() {
            return "1".to_string();
        }
        w.letters()
            .iter()
            .map(|l| {
                let name = &self.generators[l.generator()];
                if l.is_inverse() {
                    format!("{name}^-1")
                } else {
                    name.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn display<'a>(&'a self, w: &'a Word) -> DisplayWord<'a> {
        DisplayWord { alphabet: self, word: w }
    }
}

pub struct DisplayWord<'a> {
    alphabet: &'a Alphabet,
    word: &'a Word,
}

impl fmt::Display for DisplayWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.alphabet.format(self.word))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> Alphabet {
        let z = Word::reduce([Letter::neg(1), Letter::neg(0)]);
        Alphabet::new("x", "y").with_derived("z", z)
    }

    fn w(s: &str) -> Word {
        xy().parse(s).unwrap()
    }

    /// Naive oracle: repeatedly delete the first cancelling pair.
    fn naive_reduce(mut v: Vec<Letter>) -> Vec<Letter> {
        loop {
            let pos = v.windows(2).position(|p| p[0] == p[1].inverse());
            match pos {
                Some(i) => {
                    v.drain(i..i + 2);
                }
                None => return v,
            }
        }
    }

    #[test]
    fn reduce_examples() {
        assert!(w("x x^-1").is_identity());
        assert!(w("y^-1 x^-1 x y").is_identity());
        assert_eq!(w("y y y^-1 x"), w("y x"));
        let raw = vec![Letter::pos(1), Letter::pos(1), Letter::neg(1), Letter::pos(0)];
        assert_eq!(naive_reduce(raw), w("y x").letters());
    }

    #[test]
    fn mul_inv_conj_examples() {
        assert!(w("x").mul(&w("x^-1")).is_identity());
        assert_eq!(w("x").conj(&w("y")), w("y^-1 x y"));
        assert_eq!(w("y^-1 x^-1").inverse(), w("x y"));
        assert_eq!(w("z"), w("y^-1 x^-1"));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, c) = w("y^-1 x y").cyclic_reduce().unwrap();
        assert_eq!(core.as_word(), &w("x"));
        assert_eq!(c, w("y"));

        let (core, c) = w("x y x y").cyclic_reduce().unwrap();
        assert_eq!(core.as_word(), &w("x y x y"));
        assert!(c.is_identity());

        let input = w("y x x y^-1");
        let (core, c) = input.cyclic_reduce().unwrap();
        assert_eq!(core.as_word(), &w("x^2"));
        assert_eq!(c, w("y^-1"));
        let (root, e) = core.primitive_root();
        assert_eq!((root.as_word(), e), (&w("x"), 2));
        assert_eq!(w("x^2").conj(&w("y^-1")), input);

        assert_eq!(Word::identity().cyclic_reduce(), Err(WordError::Trivial));
    }

    #[test]
    fn primitive_root_examples() {
        let c = |s: &str| CyclicWord::new(w(s)).unwrap();
        assert_eq!(c("x x x").primitive_root(), (c("x"), 3));
        assert_eq!(c("x y x y").primitive_root(), (c("x y"), 2));
        assert_eq!(c("x y").primitive_root(), (c("x y"), 1));
    }

    #[test]
    fn conjugacy_examples() {
        assert!(conjugacy_equal(&w("x"), &w("y^-1 x y")));
        assert!(!conjugacy_equal(&w("x"), &w("y")));
        assert!(conjugacy_equal(&w("y^-1 x^-1"), &w("x^-1 y^-1")));
        assert!(!conjugacy_equal(&w("x"), &w("x^-1")));
    }

    #[test]
    fn parse_and_format() {
        let a = xy();
        assert_eq!(a.format(&w("z^2")), "y^-1 x^-1 y^-1 x^-1");
        assert_eq!(a.format(&Word::identity()), "1");
        assert_eq!(w("x^3 x^-2"), w("x"));
        assert!(matches!(a.parse("q"), Err(WordError::UnknownGenerator(_))));
        assert!(matches!(a.parse("x^a"), Err(WordError::BadToken(_))));
        assert_eq!(a.parse(&a.format(&w("z x^-1 y"))).unwrap(), w("z x^-1 y"));
    }

    #[test]
    fn shortlex_order() {
        assert!(w("y") < w("x x"));
        assert!(w("x") < w("x^-1"));
        assert!(w("x^-1") < w("y"));
    }

    /// Breadth-first distance in the Cayley graph over {x, y, z}.
    fn bfs_lengths(radius: usize) -> std::collections::HashMap<Word, usize> {
        let gens: Vec<Word> = ["x", "y", "z", "x^-1", "y^-1", "z^-1"]
            .iter()
            .map(|s| w(s))
            .collect();
        let mut dist = std::collections::HashMap::new();
        dist.insert(Word::identity(), 0);
        let mut frontier = vec![Word::identity()];
        for r in 1..=radius {
            let mut next = Vec::new();
            for v in &frontier {
                for g in &gens {
                    let u = v.mul(g);
                    if !dist.contains_key(&u) {
                        dist.insert(u.clone(), r);
                        next.push(u);
                    }
                }
            }
            frontier = next;
        }
        dist
    }

    #[test]
    fn tiled_length_matches_cayley_bfs() {
        let z = w("z");
        let dist = bfs_lengths(5);
        for (g, d) in dist {
            assert_eq!(g.length_over(std::slice::from_ref(&z)), d, "{}", xy().format(&g));
        }
    }
}
