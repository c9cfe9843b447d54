//! Gauss diagram formulas: arrow-diagram patterns, their text format, and
//! the signed embedding count.

mod eval;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::diagram::Sign;
use crate::error::PatternError;

pub use eval::{brute_force_evaluate, evaluate};
pub use parse::{parse_pattern, parse_pattern_with};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Head,
    Tail,
}

/// One arrow of a term. `head` and `tail` are 0-based component indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternArrow {
    pub name: String,
    pub head: usize,
    pub tail: usize,
    pub sign: Option<Sign>,
}

/// `words[c]` lists the endpoints on component `c` in order from its base
/// point, as (arrow index, role).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub coeff: i64,
    pub arrows: Vec<PatternArrow>,
    pub words: Vec<Vec<(usize, Role)>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pattern {
    pub name: String,
    pub components: usize,
    pub terms: Vec<Term>,
}

impl Pattern {
    /// Formal sum of two patterns on the same number of components.
    pub fn sum(&self, other: &Pattern) -> Result<Pattern, PatternError> {
        if self.components != other.components {
            return Err(PatternError::ComponentCount {
                pattern: other.components,
                diagram: self.components,
            });
        }
        Ok(Pattern {
            name: format!("{}+{}", self.name, other.name),
            components: self.components,
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        })
    }

    pub fn scale(&self, k: i64) -> Pattern {
        let mut p = self.clone();
        for t in &mut p.terms {
            t.coeff *= k;
        }
        p
    }

    pub fn max_arity(&self) -> usize {
        self.terms.iter().map(|t| t.arrows.len()).max().unwrap_or(0)
    }
}

/// Renders back to the DSL; `parse_pattern(p.to_string())` reproduces `p`.
impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pattern {} {{", self.name)?;
        writeln!(f, "  components {};", self.components)?;
        for t in &self.terms {
            write!(f, "  term {:+} {{", t.coeff)?;
            let mut signed = vec![false; t.arrows.len()];
            for (c, word) in t.words.iter().enumerate() {
                if word.is_empty() {
                    continue;
                }
                write!(f, " comp{}:", c + 1)?;
                for &(a, role) in word {
                    let arrow = &t.arrows[a];
                    let r = match role {
                        Role::Head => 'H',
                        Role::Tail => 'T',
                    };
                    write!(f, " {}{}", arrow.name, r)?;
                    if let (Some(s), false) = (arrow.sign, signed[a]) {
                        write!(f, ":{}", s.symbol())?;
                        signed[a] = true;
                    }
                }
                f.write_str(";")?;
            }
            writeln!(f, " }}")?;
        }
        f.write_str("}")
    }
}

/// A permutation of {1, 2, 3}, written as its images, e.g. `231` sends
/// 1 to 2, 2 to 3 and 3 to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Perm([usize; 3]);

impl Perm {
    pub fn identity() -> Self {
        Perm([1, 2, 3])
    }

    pub fn all() -> [Perm; 6] {
        [[1, 2, 3], [1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]].map(Perm)
    }

    /// Image of `x` in 1..=3.
    pub fn image(&self, x: usize) -> usize {
        self.0[x - 1]
    }
}

impl FromStr for Perm {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits: Vec<usize> = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, ',' | ' ' | '(' | ')'))
            .map(|c| c.to_digit(10).map(|d| d as usize))
            .collect::<Option<_>>()
            .ok_or_else(|| PatternError::Permutation(s.to_string()))?;
        let mut sorted = digits.clone();
        sorted.sort_unstable();
        if sorted != [1, 2, 3] {
            return Err(PatternError::Permutation(s.to_string()));
        }
        Ok(Perm([digits[0], digits[1], digits[2]]))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.0[0], self.0[1], self.0[2])
    }
}

impl Serialize for Perm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub const BUILTIN_NAMES: [&str; 4] = ["lk", "mu123", "lambda", "nu"];

const EMBEDDED: [(&str, &str); 4] = [
    ("lk", include_str!("../../patterns/lk.gdf")),
    ("mu123", include_str!("../../patterns/mu123.gdf")),
    ("lambda", include_str!("../../patterns/lambda.gdf")),
    ("nu", include_str!("../../patterns/nu.gdf")),
];

/// Whether a pattern's file uses `i`/`j`/`k` component placeholders.
pub fn is_templated(name: &str) -> bool {
    matches!(name, "lambda" | "nu")
}

/// Environment variable naming a directory of `*.gdf` files that replaces
/// the compiled-in patterns.
pub const PATTERN_DIR_ENV: &str = "TRICOBRACKET_PATTERN_DIR";

/// Pattern sources by name, either compiled in or read from a directory.
#[derive(Clone, Debug)]
pub struct PatternLibrary {
    sources: BTreeMap<String, (Option<PathBuf>, String)>,
}

impl PatternLibrary {
    pub fn embedded() -> Self {
        PatternLibrary {
            sources: EMBEDDED
                .iter()
                .map(|(n, s)| (n.to_string(), (None, s.to_string())))
                .collect(),
        }
    }

    /// Reads every `*.gdf` file of `dir`; the file stem is the pattern name.
    pub fn from_dir(dir: &Path) -> Result<Self, PatternError> {
        let io = |e: std::io::Error| PatternError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        };
        let mut sources = BTreeMap::new();
        for entry in std::fs::read_dir(dir).map_err(io)? {
            let path = entry.map_err(io)?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("gdf") {
                continue;
            }
            let Some(stem) = path.file_stem().and_then(|s| s.to_str()) else {
                continue;
            };
            let text = std::fs::read_to_string(&path).map_err(|e| PatternError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            sources.insert(stem.to_string(), (Some(path.clone()), text));
        }
        Ok(PatternLibrary { sources })
    }

    /// The directory named by `TRICOBRACKET_PATTERN_DIR` if set, else the
    /// embedded patterns.
    pub fn from_env() -> Result<Self, PatternError> {
        match std::env::var_os(PATTERN_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::from_dir(Path::new(&dir)),
            _ => Ok(Self::embedded()),
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sources.keys().map(String::as_str)
    }

    pub fn path(&self, name: &str) -> Option<&Path> {
        self.sources.get(name).and_then(|(p, _)| p.as_deref())
    }

    /// Loads a pattern. `sigma` fills in `i`, `j`, `k` for templated files
    /// and defaults to the identity; plain files ignore it.
    pub fn get(&self, name: &str, sigma: Option<Perm>) -> Result<Pattern, PatternError> {
        let (_, text) = self
            .sources
            .get(name)
            .ok_or_else(|| PatternError::UnknownPattern(name.to_string()))?;
        let sigma = sigma.unwrap_or_else(Perm::identity);
        parse_pattern_with(text, Some(&sigma))
    }

    /// Parses every pattern under every permutation.
    pub fn check(&self) -> Vec<(String, Result<Pattern, PatternError>)> {
        self.sources
            .keys()
            .map(|name| {
                let mut first = self.get(name, None);
                if first.is_ok() {
                    for sigma in Perm::all() {
                        if let Err(e) = self.get(name, Some(sigma)) {
                            first = Err(e);
                            break;
                        }
                    }
                }
                (name.clone(), first)
            })
            .collect()
    }
}

/// A shipped pattern. `sigma` is required for `lambda` and `nu`.
pub fn builtin_pattern(name: &str, sigma: Option<Perm>) -> Result<Pattern, PatternError> {
    let (_, text) = EMBEDDED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| PatternError::UnknownPattern(name.to_string()))?;
    if is_templated(name) && sigma.is_none() {
        return Err(PatternError::MissingPermutation(name.to_string()));
    }
    parse_pattern_with(text, sigma.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{Diagram, Kind};

    #[test]
    fn perm_parsing() {
        let p: Perm = "231".parse().unwrap();
        assert_eq!((p.image(1), p.image(2), p.image(3)), (2, 3, 1));
        assert_eq!(p.to_string(), "231");
        assert!("112".parse::<Perm>().is_err());
        assert!("12".parse::<Perm>().is_err());
        assert_eq!("1,2,3".parse::<Perm>().unwrap(), Perm::identity());
    }

    #[test]
    fn builtin_shapes() {
        let lk = builtin_pattern("lk", None).unwrap();
        assert_eq!((lk.components, lk.terms.len(), lk.max_arity()), (2, 1, 1));
        let mu = builtin_pattern("mu123", None).unwrap();
        assert_eq!(mu.components, 3);
        assert_eq!(mu.terms.len(), 3);
        assert!(mu.terms.iter().all(|t| t.arrows.len() == 2));
        assert!(builtin_pattern("lambda", None).is_err());
        assert!(builtin_pattern("knot", None).is_err());
    }

    #[test]
    fn lambda_permutes_components() {
        let id = builtin_pattern("lambda", Some(Perm::identity())).unwrap();
        let sigma: Perm = "231".parse().unwrap();
        let p = builtin_pattern("lambda", Some(sigma)).unwrap();
        assert_eq!(id.terms.len(), p.terms.len());
        for (a, b) in id.terms.iter().zip(&p.terms) {
            assert_eq!(a.coeff, b.coeff);
            for x in &a.arrows {
                let y = b.arrows.iter().find(|y| y.name == x.name).unwrap();
                assert_eq!(sigma.image(x.head + 1) - 1, y.head);
                assert_eq!(sigma.image(x.tail + 1) - 1, y.tail);
            }
            let names = |t: &Term, w: &[(usize, Role)]| -> Vec<(String, Role)> {
                w.iter().map(|&(i, r)| (t.arrows[i].name.clone(), r)).collect()
            };
            for c in 0..3 {
                assert_eq!(names(a, &a.words[c]), names(b, &b.words[sigma.image(c + 1) - 1]));
            }
        }
    }

    #[test]
    fn display_round_trips() {
        let lib = PatternLibrary::embedded();
        for name in BUILTIN_NAMES {
            for sigma in Perm::all() {
                let p = lib.get(name, Some(sigma)).unwrap();
                assert_eq!(parse_pattern(&p.to_string()).unwrap(), p, "{name} {sigma}");
            }
        }
        let signed = parse_pattern("pattern s { components 1; term -3 { comp1: aT:- bH aH bT:+; } }").unwrap();
        assert_eq!(parse_pattern(&signed.to_string()).unwrap(), signed);
    }

    #[test]
    fn linking_number_examples() {
        let lk = builtin_pattern("lk", None).unwrap();
        let d = Diagram::parse("(circle) O1+ ; (circle) U1+", Kind::Knotted).unwrap();
        assert_eq!(evaluate(&lk, &d).unwrap(), 1);
        let d = Diagram::parse("(circle) U1- ; (circle) O1-", Kind::Knotted).unwrap();
        assert_eq!(evaluate(&lk, &d).unwrap(), 0);
        let d = Diagram::parse("(circle) O1+ U1+ ; (circle)", Kind::Knotted).unwrap();
        assert_eq!(evaluate(&lk, &d).unwrap(), 0);
        let flat = Diagram::parse("(circle) 1+ ; (circle) 1+", Kind::Flat).unwrap();
        assert_eq!(evaluate(&lk, &flat), Err(PatternError::FlatDiagram));
        let one = Diagram::parse("(circle) O1+ U1+", Kind::Knotted).unwrap();
        assert!(matches!(evaluate(&lk, &one), Err(PatternError::ComponentCount { .. })));
    }

    #[test]
    fn bilinear_and_injective() {
        let two = parse_pattern("pattern two { components 1; term +1 { comp1: aT bT aH bH; } }").unwrap();
        let d = Diagram::parse("(circle) O1+ U1+", Kind::Knotted).unwrap();
        assert_eq!(evaluate(&two, &d).unwrap(), 0);
        let tref = Diagram::parse("(circle) O1+ O2- U1+ U2-", Kind::Knotted).unwrap();
        assert_eq!(evaluate(&two, &tref).unwrap(), -1);
        let sum = two.sum(&two.scale(3)).unwrap();
        assert_eq!(evaluate(&sum, &tref).unwrap(), -4);
        assert_eq!(brute_force_evaluate(&sum, &tref).unwrap(), -4);
    }
}
