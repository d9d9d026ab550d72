//! Map-definition files and the built-in maps.
//!
//! ```text
//! map rabbit
//! gen x parity 0
//! gen y parity 1
//! axis z = y^-1 x^-1
//! schreier x -> y
//! schreier y y -> y^-1 x^-1
//! schreier y^-1 x y -> 1
//! ```
//!
//! `#` starts a comment. Words use the syntax of [`Alphabet::parse`]; the
//! derived axis name may appear in `schreier` lines.

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::curves::AxisSet;
use crate::endo::{EndoError, ParityHom, VirtualEndo};
use crate::words::{conjugacy_equal, Alphabet, CyclicWord, Word, WordError};

pub const RABBIT: &str = "\
# Douady rabbit
map rabbit
gen x parity 0
gen y parity 1
axis z = y^-1 x^-1
schreier x -> y
schreier y y -> y^-1 x^-1
schreier y^-1 x y -> 1
";

pub const DENDRITE: &str = "\
# z^2 + i
map dendrite
gen a parity 1
gen b parity 0
axis c = b^-1 a^-1
schreier a a -> 1
schreier b -> b^-1 a^-1
schreier a^-1 b a -> b
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagnosticCode {
    Syntax,
    UnknownGenerator,
    ParityNotSurjective,
    NotSchreierBasis,
    DuplicateAxis,
    BadAxis,
    MissingDeclaration,
    DuplicateDeclaration,
}

impl DiagnosticCode {
    pub fn code(self) -> &'static str {
        match self {
            DiagnosticCode::Syntax => "E001",
            DiagnosticCode::UnknownGenerator => "E002",
            DiagnosticCode::ParityNotSurjective => "E003",
            DiagnosticCode::NotSchreierBasis => "E004",
            DiagnosticCode::DuplicateAxis => "E005",
            DiagnosticCode::BadAxis => "E006",
            DiagnosticCode::MissingDeclaration => "E007",
            DiagnosticCode::DuplicateDeclaration => "E008",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{column}: {} {message}", code.code())]
pub struct MapDefError {
    pub code: DiagnosticCode,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl MapDefError {
    fn new(code: DiagnosticCode, line: usize, column: usize, message: impl Into<String>) -> Self {
        MapDefError {
            code,
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Parse(#[from] MapDefError),
    #[error("{}:{source}", path.display())]
    InFile {
        path: PathBuf,
        source: MapDefError,
    },
    #[error("unknown map `{0}`")]
    UnknownMap(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapDefinition {
    pub name: String,
    pub generators: [String; 2],
    pub parity: [u8; 2],
    pub axis_name: String,
    pub axis_word: Word,
    /// `(schreier generator, image)`, in file order.
    pub schreier: Vec<(Word, Word)>,
}

/// A validated map ready for computation.
#[derive(Clone, Debug)]
pub struct LoadedMap {
    pub definition: MapDefinition,
    pub alphabet: Alphabet,
    pub axes: AxisSet,
    pub endo: VirtualEndo,
}

impl LoadedMap {
    pub fn name(&self) -> &str {
        &self.definition.name
    }

    /// Word length over the two generators and the derived axis.
    pub fn axis_length(&self, w: &Word) -> usize {
        w.length_over(std::slice::from_ref(self.axes.word(2)))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, WordError> {
        self.alphabet.parse(text)
    }

    pub fn format_word(&self, w: &Word) -> String {
        self.alphabet.format(w)
    }
}

struct Located<T> {
    line: usize,
    column: usize,
    value: T,
}

pub fn parse_mapdef(text: &str) -> Result<MapDefinition, MapDefError> {
    use DiagnosticCode::*;

    let mut name: Option<Located<String>> = None;
    let mut gens: Vec<Located<(String, u8)>> = Vec::new();
    let mut axis: Option<Located<(String, String)>> = None;
    let mut schreier: Vec<Located<(String, String)>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let line = line.split('#').next().unwrap_or("");
        let trimmed = line.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let col = line.len() - trimmed.len() + 1;
        let (keyword, rest) = trimmed
            .split_once(char::is_whitespace)
            .unwrap_or((trimmed.trim_end(), ""));
        let rest_col = col + keyword.len() + 1;
        let rest = rest.trim();
        let syntax = |msg: &str| MapDefError::new(Syntax, line_no, col, msg);
        match keyword {
            "map" => {
                if rest.is_empty() || rest.split_whitespace().count() != 1 {
                    return Err(syntax("expected `map NAME`"));
                }
                if name.is_some() {
                    return Err(MapDefError::new(DuplicateDeclaration, line_no, col, "duplicate `map` line"));
                }
                name = Some(Located { line: line_no, column: col, value: rest.to_string() });
            }
            "gen" => {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 || toks[1] != "parity" {
                    return Err(syntax("expected `gen NAME parity BIT`"));
                }
                if !valid_name(toks[0]) {
                    return Err(syntax("invalid generator name"));
                }
                let bit = match toks[2] {
                    "0" => 0,
                    "1" => 1,
                    _ => return Err(syntax("parity bit must be 0 or 1")),
                };
                if gens.len() == 2 {
                    return Err(MapDefError::new(DuplicateDeclaration, line_no, col, "more than two generators"));
                }
                if gens.iter().any(|g| g.value.0 == toks[0]) {
                    return Err(MapDefError::new(DuplicateDeclaration, line_no, col, format!("generator `{}` declared twice", toks[0])));
                }
                gens.push(Located { line: line_no, column: col, value: (toks[0].to_string(), bit) });
            }
            "axis" => {
                let (lhs, rhs) = rest.split_once('=').ok_or_else(|| syntax("expected `axis NAME = WORD`"))?;
                let lhs = lhs.trim();
                if !valid_name(lhs) {
                    return Err(syntax("invalid axis name"));
                }
                if axis.is_some() {
                    return Err(MapDefError::new(DuplicateDeclaration, line_no, col, "more than one derived axis"));
                }
                axis = Some(Located { line: line_no, column: rest_col, value: (lhs.to_string(), rhs.trim().to_string()) });
            }
            "schreier" => {
                let (lhs, rhs) = rest.split_once("->").ok_or_else(|| syntax("expected `schreier WORD -> WORD`"))?;
                schreier.push(Located { line: line_no, column: rest_col, value: (lhs.trim().to_string(), rhs.trim().to_string()) });
            }
            other => return Err(syntax(&format!("unknown keyword `{other}`"))),
        }
    }

    let end = text.lines().count().max(1);
    let missing = |what: &str| MapDefError::new(MissingDeclaration, end, 1, format!("missing {what}"));
    let name = name.ok_or_else(|| missing("`map` line"))?;
    if gens.len() != 2 {
        return Err(missing("generator declarations (need exactly 2)"));
    }
    let axis = axis.ok_or_else(|| missing("`axis` line"))?;
    if schreier.len() != 3 {
        return Err(missing("schreier lines (need exactly 3)"));
    }

    let generators = [gens[0].value.0.clone(), gens[1].value.0.clone()];
    let parity = [gens[0].value.1, gens[1].value.1];
    if parity == [0, 0] {
        return Err(MapDefError::new(ParityNotSurjective, gens[1].line, gens[1].column, "parity not surjective"));
    }
    let (axis_name, axis_text) = &axis.value;
    if generators.contains(axis_name) {
        return Err(MapDefError::new(DuplicateAxis, axis.line, axis.column, format!("axis `{axis_name}` reuses a generator name")));
    }

    let base = Alphabet::new(generators[0].clone(), generators[1].clone());
    let word_err = |loc_line: usize, loc_col: usize, e: WordError| match e {
        WordError::UnknownGenerator(g) => MapDefError::new(UnknownGenerator, loc_line, loc_col, format!("unknown generator `{g}`")),
        other => MapDefError::new(Syntax, loc_line, loc_col, other.to_string()),
    };
    let axis_word = base.parse(axis_text).map_err(|e| word_err(axis.line, axis.column, e))?;
    check_axes(&generators, &axis_word).map_err(|(code, msg)| MapDefError::new(code, axis.line, axis.column, msg))?;

    let alphabet = base.with_derived(axis_name.clone(), axis_word.clone());
    let mut pairs = Vec::with_capacity(3);
    for s in &schreier {
        let lhs = alphabet.parse(&s.value.0).map_err(|e| word_err(s.line, s.column, e))?;
        let rhs = alphabet.parse(&s.value.1).map_err(|e| word_err(s.line, s.column, e))?;
        pairs.push((lhs, rhs));
    }
    let p = ParityHom::new(parity).map_err(|_| MapDefError::new(ParityNotSurjective, gens[1].line, gens[1].column, "parity not surjective"))?;
    if let Err(EndoError::NotSchreierBasis { expected }) = VirtualEndo::from_images(p, &pairs) {
        let expected: Vec<String> = expected.iter().map(|w| alphabet.format(w)).collect();
        let at = schreier
            .iter()
            .zip(&pairs)
            .find(|(_, (lhs, _))| !p.schreier_basis().iter().any(|(_, b)| b == lhs))
            .map(|(s, _)| (s.line, s.column))
            .unwrap_or((schreier[0].line, schreier[0].column));
        return Err(MapDefError::new(
            NotSchreierBasis,
            at.0,
            at.1,
            format!("not a Schreier basis; expected left-hand sides {{{}}}", expected.join(", ")),
        ));
    }

    Ok(MapDefinition {
        name: name.value,
        generators,
        parity,
        axis_name: axis_name.clone(),
        axis_word,
        schreier: pairs,
    })
}

fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn check_axes(generators: &[String; 2], axis: &Word) -> Result<(), (DiagnosticCode, String)> {
    if axis.is_identity() {
        return Err((DiagnosticCode::BadAxis, "axis word is trivial".to_string()));
    }
    for (g, name) in generators.iter().enumerate() {
        let gw = Word::generator(g);
        if conjugacy_equal(axis, &gw) || conjugacy_equal(axis, &gw.inverse()) {
            return Err((DiagnosticCode::DuplicateAxis, format!("axis is conjugate to generator `{name}`")));
        }
    }
    let cw = CyclicWord::new(axis.clone()).ok_or((
        DiagnosticCode::BadAxis,
        "axis word must be cyclically reduced".to_string(),
    ))?;
    if cw.primitive_root().1 != 1 {
        return Err((DiagnosticCode::BadAxis, "axis word is a proper power".to_string()));
    }
    Ok(())
}

impl MapDefinition {
    pub fn load(&self) -> LoadedMap {
        let alphabet = Alphabet::new(self.generators[0].clone(), self.generators[1].clone())
            .with_derived(self.axis_name.clone(), self.axis_word.clone());
        let axes = AxisSet::new(
            [self.generators[0].clone(), self.generators[1].clone(), self.axis_name.clone()],
            [Word::generator(0), Word::generator(1), self.axis_word.clone()],
        );
        let parity = ParityHom::new(self.parity).expect("validated at parse time");
        let endo = VirtualEndo::from_images(parity, &self.schreier).expect("validated at parse time");
        LoadedMap {
            definition: self.clone(),
            alphabet,
            axes,
            endo,
        }
    }

    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for MapDefinition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alphabet = Alphabet::new(self.generators[0].clone(), self.generators[1].clone());
        writeln!(f, "map {}", self.name)?;
        for g in 0..2 {
            writeln!(f, "gen {} parity {}", self.generators[g], self.parity[g])?;
        }
        writeln!(f, "axis {} = {}", self.axis_name, alphabet.format(&self.axis_word))?;
        for (lhs, rhs) in &self.schreier {
            writeln!(f, "schreier {} -> {}", alphabet.format(lhs), alphabet.format(rhs))?;
        }
        Ok(())
    }
}

pub fn builtin(name: &str) -> Result<LoadedMap, LoadError> {
    let text = match name {
        "rabbit" => RABBIT,
        "dendrite" => DENDRITE,
        other => return Err(LoadError::UnknownMap(other.to_string())),
    };
    Ok(parse_mapdef(text).expect("built-in definitions are valid").load())
}

pub fn load_file(path: &Path) -> Result<LoadedMap, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_mapdef(&text)
        .map(|d| d.load())
        .map_err(|source| LoadError::InFile {
            path: path.to_path_buf(),
            source,
        })
}

/// Resolves a `--map` argument: a built-in name, a file path, or
/// `NAME` / `NAME.map` inside one of `dirs`.
pub fn resolve(spec: &str, dirs: &[PathBuf]) -> Result<LoadedMap, LoadError> {
    if let Ok(m) = builtin(spec) {
        return Ok(m);
    }
    let direct = Path::new(spec);
    if direct.is_file() {
        return load_file(direct);
    }
    for dir in dirs {
        for candidate in [dir.join(spec), dir.join(format!("{spec}.map"))] {
            if candidate.is_file() {
                return load_file(&candidate);
            }
        }
    }
    Err(LoadError::UnknownMap(spec.to_string()))
}
