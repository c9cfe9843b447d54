//! Pointed, ordered Gauss diagrams of flat curves and virtual knots/links.
//!
//! A diagram is a list of components (circles or long lines), each a sequence
//! of endpoint slots read from its base point. Every crossing label occupies
//! exactly two slots. Knotted diagrams mark one endpoint of each arrow as the
//! over-crossing and carry the writhe; flat diagrams carry the local
//! orientation sign relative to the first-visited branch.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{DiagramError, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }

    pub fn from_bool(positive: bool) -> Sign {
        if positive {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_bool(self == rhs)
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        s.value() as i8
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;
    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Pos),
            -1 => Ok(Sign::Neg),
            _ => Err(format!("sign must be 1 or -1, got {v}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Flat,
    Knotted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Circle,
    Line,
}

impl Shape {
    fn keyword(self) -> &'static str {
        match self {
            Shape::Circle => "(circle)",
            Shape::Line => "(line)",
        }
    }

    /// Parses a comma-separated component list such as `circle,circle,line`.
    pub fn parse_list(list: &str) -> Result<Vec<Shape>, DiagramError> {
        let shapes = list
            .split(',')
            .map(|s| s.trim().parse())
            .collect::<Result<Vec<Shape>, _>>()?;
        if shapes.is_empty() {
            return Err(DiagramError::ComponentSpec(list.to_string()));
        }
        Ok(shapes)
    }
}

impl FromStr for Shape {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "circle" | "(circle)" => Ok(Shape::Circle),
            "line" | "(line)" => Ok(Shape::Line),
            other => Err(DiagramError::ComponentSpec(other.to_string())),
        }
    }
}

/// A position in the global traversal: component index, then slot index from
/// the component's base point. The derived order is the first-visit order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct Slot {
    pub comp: usize,
    pub pos: usize,
}

impl Slot {
    pub fn new(comp: usize, pos: usize) -> Slot {
        Slot { comp, pos }
    }

    /// True when `other` is the slot right after `self` on the same component.
    pub fn precedes(self, other: Slot) -> bool {
        self.comp == other.comp && self.pos + 1 == other.pos
    }
}

impl From<(usize, usize)> for Slot {
    fn from((comp, pos): (usize, usize)) -> Slot {
        Slot { comp, pos }
    }
}

impl From<Slot> for (usize, usize) {
    fn from(s: Slot) -> (usize, usize) {
        (s.comp, s.pos)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    First,
    Second,
}

/// One endpoint occurrence as written in a Gauss code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Token {
    pub label: Label,
    pub sign: Sign,
    /// `Some(true)` for an over endpoint, `Some(false)` for under, `None` on flat diagrams.
    pub over: Option<bool>,
}

impl Token {
    pub fn flat(label: Label, sign: Sign) -> Token {
        Token {
            label,
            sign,
            over: None,
        }
    }

    pub fn knotted(label: Label, sign: Sign, over: bool) -> Token {
        Token {
            label,
            sign,
            over: Some(over),
        }
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.over {
            Some(true) => write!(f, "O{}{}", self.label, self.sign.symbol()),
            Some(false) => write!(f, "U{}{}", self.label, self.sign.symbol()),
            None => write!(f, "{}{}", self.label, self.sign.symbol()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    label: Label,
    first: Slot,
    second: Slot,
    sign: Sign,
    over: Option<End>,
}

impl Arrow {
    pub fn label(&self) -> Label {
        self.label
    }

    /// The endpoint met first in the global traversal.
    pub fn first(&self) -> Slot {
        self.first
    }

    pub fn second(&self) -> Slot {
        self.second
    }

    pub fn endpoint(&self, end: End) -> Slot {
        match end {
            End::First => self.first,
            End::Second => self.second,
        }
    }

    /// Writhe for knotted arrows, local orientation sign for flat ones.
    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn over_end(&self) -> Option<End> {
        self.over
    }

    pub fn over_slot(&self) -> Option<Slot> {
        self.over.map(|e| self.endpoint(e))
    }

    pub fn under_slot(&self) -> Option<Slot> {
        self.over.map(|e| match e {
            End::First => self.second,
            End::Second => self.first,
        })
    }

    /// Sign of the underlying flat crossing, measured in the frame
    /// (first-visited branch, second-visited branch).
    pub fn local_sign(&self) -> Sign {
        match self.over {
            None | Some(End::First) => self.sign,
            Some(End::Second) => -self.sign,
        }
    }

    pub fn is_intra(&self) -> bool {
        self.first.comp == self.second.comp
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    shape: Shape,
    slots: Vec<Label>,
}

impl Component {
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn slots(&self) -> &[Label] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }
}

/// Raw component data: shape plus tokens from the base point.
pub type Part = (Shape, Vec<Token>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    kind: Kind,
    components: Vec<Component>,
    arrows: BTreeMap<Label, Arrow>,
}

impl Diagram {
    /// Builds and validates a diagram from per-component token lists.
    pub fn new(kind: Kind, parts: Vec<Part>) -> Result<Diagram, ParseError> {
        let mut seen: BTreeMap<Label, Vec<(Slot, Token)>> = BTreeMap::new();
        let mut components = Vec::with_capacity(parts.len());
        let mut index = 0;
        for (comp, (shape, tokens)) in parts.into_iter().enumerate() {
            let mut slots = Vec::with_capacity(tokens.len());
            for (pos, tok) in tokens.into_iter().enumerate() {
                match (kind, tok.over) {
                    (Kind::Flat, Some(_)) => {
                        return Err(ParseError::Token {
                            index,
                            token: tok.to_string(),
                            message: "over/under marker on a flat diagram".into(),
                        })
                    }
                    (Kind::Knotted, None) => {
                        return Err(ParseError::Token {
                            index,
                            token: tok.to_string(),
                            message: "missing over/under marker on a knotted diagram".into(),
                        })
                    }
                    _ => {}
                }
                if tok.label.0 == 0 {
                    return Err(ParseError::Token {
                        index,
                        token: tok.to_string(),
                        message: "labels are positive integers".into(),
                    });
                }
                seen.entry(tok.label).or_default().push((Slot::new(comp, pos), tok));
                slots.push(tok.label);
                index += 1;
            }
            components.push(Component { shape, slots });
        }

        let mut arrows = BTreeMap::new();
        for (label, occ) in seen {
            if occ.len() != 2 {
                return Err(ParseError::Label {
                    label,
                    message: format!("appears {} times, expected exactly 2", occ.len()),
                });
            }
            let (s1, t1) = occ[0];
            let (s2, t2) = occ[1];
            if t1.sign != t2.sign {
                return Err(ParseError::Label {
                    label,
                    message: "signs at the two occurrences disagree".into(),
                });
            }
            let over = match (t1.over, t2.over) {
                (None, None) => None,
                (Some(true), Some(false)) => Some(End::First),
                (Some(false), Some(true)) => Some(End::Second),
                (Some(true), Some(true)) => {
                    return Err(ParseError::Label {
                        label,
                        message: "two O markers".into(),
                    })
                }
                _ => {
                    return Err(ParseError::Label {
                        label,
                        message: "two U markers".into(),
                    })
                }
            };
            arrows.insert(
                label,
                Arrow {
                    label,
                    first: s1,
                    second: s2,
                    sign: t1.sign,
                    over,
                },
            );
        }
        Ok(Diagram {
            kind,
            components,
            arrows,
        })
    }

    pub fn parse(text: &str, kind: Kind) -> Result<Diagram, ParseError> {
        let parts = parse_parts(text, Some(kind))?;
        Diagram::new(kind, parts)
    }

    /// Parses a Gauss code, taking the kind from the presence of O/U markers.
    /// Codes without any crossing tokens are read as `fallback`.
    pub fn parse_auto(text: &str, fallback: Kind) -> Result<Diagram, ParseError> {
        let parts = parse_parts(text, None)?;
        let kind = match parts.iter().flat_map(|(_, t)| t.iter()).next() {
            Some(t) if t.over.is_some() => Kind::Knotted,
            Some(_) => Kind::Flat,
            None => fallback,
        };
        Diagram::new(kind, parts)
    }

    pub fn unlink(kind: Kind, shapes: &[Shape]) -> Diagram {
        Diagram {
            kind,
            components: shapes
                .iter()
                .map(|&shape| Component {
                    shape,
                    slots: Vec::new(),
                })
                .collect(),
            arrows: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn crossing_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> + '_ {
        self.arrows.values()
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.arrows.keys().copied()
    }

    pub fn arrow(&self, label: Label) -> Result<&Arrow, DiagramError> {
        self.arrows.get(&label).ok_or(DiagramError::UnknownLabel(label))
    }

    pub fn label_at(&self, slot: Slot) -> Label {
        self.components[slot.comp].slots[slot.pos]
    }

    pub fn token_at(&self, slot: Slot) -> Token {
        let label = self.label_at(slot);
        let arrow = &self.arrows[&label];
        let over = arrow.over_slot().map(|o| o == slot);
        Token {
            label,
            sign: arrow.sign,
            over,
        }
    }

    pub fn next_label(&self) -> Label {
        Label(self.arrows.keys().next_back().map_or(1, |l| l.0 + 1))
    }

    /// Per-component token lists, the inverse of [`Diagram::new`].
    pub fn parts(&self) -> Vec<Part> {
        self.components
            .iter()
            .enumerate()
            .map(|(c, comp)| {
                let tokens = (0..comp.len())
                    .map(|p| self.token_at(Slot::new(c, p)))
                    .collect();
                (comp.shape, tokens)
            })
            .collect()
    }

    /// Sign of the underlying flat crossing: the stored sign on flat
    /// diagrams; on knotted ones the writhe if the over branch is visited
    /// first and its negative otherwise.
    pub fn flat_sign(&self, label: Label) -> Result<Sign, DiagramError> {
        Ok(self.arrow(label)?.local_sign())
    }

    /// Sends a flat curve to the virtual link diagram with writhe equal to the
    /// flat sign and the over branch at the first visit.
    pub fn iota(&self) -> Result<Diagram, DiagramError> {
        if self.kind != Kind::Flat {
            return Err(DiagramError::KindMismatch {
                expected: Kind::Flat,
                found: self.kind,
            });
        }
        let mut d = self.clone();
        d.kind = Kind::Knotted;
        for a in d.arrows.values_mut() {
            a.over = Some(End::First);
        }
        Ok(d)
    }

    /// Forgets over/under data, keeping the flat sign of every crossing.
    pub fn shadow(&self) -> Diagram {
        let mut d = self.clone();
        d.kind = Kind::Flat;
        for a in d.arrows.values_mut() {
            a.sign = a.local_sign();
            a.over = None;
        }
        d
    }

    /// A knotted diagram carrying the same geometry: `iota` for flat input.
    pub(crate) fn geometric(&self) -> Diagram {
        match self.kind {
            Kind::Flat => self.iota().expect("flat diagram"),
            Kind::Knotted => self.clone(),
        }
    }

    /// Rebuilds a diagram of `kind` from knotted parts whose arrows carry
    /// geometric over markers; flat output keeps only the flat signs.
    pub(crate) fn from_geometric(kind: Kind, parts: Vec<Part>) -> Diagram {
        let d = Diagram::new(Kind::Knotted, parts).expect("geometric rebuild");
        match kind {
            Kind::Knotted => d,
            Kind::Flat => d.shadow(),
        }
    }

    /// Changes crossing `label`: swaps over and under and negates the writhe.
    pub fn crossing_change(&self, label: Label) -> Result<Diagram, DiagramError> {
        if self.kind != Kind::Knotted {
            return Err(DiagramError::KindMismatch {
                expected: Kind::Knotted,
                found: self.kind,
            });
        }
        let mut d = self.clone();
        let a = d
            .arrows
            .get_mut(&label)
            .ok_or(DiagramError::UnknownLabel(label))?;
        a.sign = -a.sign;
        a.over = a.over.map(|e| match e {
            End::First => End::Second,
            End::Second => End::First,
        });
        Ok(d)
    }

    /// Relabels crossings 1, 2, ... in first-visit order.
    pub fn canonical(&self) -> Diagram {
        let mut map = BTreeMap::new();
        for comp in &self.components {
            for &l in &comp.slots {
                let next = Label(map.len() as u32 + 1);
                map.entry(l).or_insert(next);
            }
        }
        let parts = self
            .parts()
            .into_iter()
            .map(|(shape, toks)| {
                let toks = toks
                    .into_iter()
                    .map(|t| Token {
                        label: map[&t.label],
                        ..t
                    })
                    .collect();
                (shape, toks)
            })
            .collect();
        Diagram::new(self.kind, parts).expect("relabeling preserves validity")
    }

    /// Canonical Gauss code.
    pub fn serialize(&self) -> String {
        self.canonical().to_string()
    }

    pub fn same_up_to_labels(&self, other: &Diagram) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, comp) in self.components.iter().enumerate() {
            if c > 0 {
                f.write_str(" ; ")?;
            }
            f.write_str(comp.shape.keyword())?;
            for p in 0..comp.len() {
                write!(f, " {}", self.token_at(Slot::new(c, p)))?;
            }
        }
        Ok(())
    }
}

fn parse_token(raw: &str, index: usize, kind: Option<Kind>) -> Result<Token, ParseError> {
    let err = |message: &str| ParseError::Token {
        index,
        token: raw.to_string(),
        message: message.to_string(),
    };
    let (over, rest) = match raw.as_bytes().first() {
        Some(b'O') => (Some(true), &raw[1..]),
        Some(b'U') => (Some(false), &raw[1..]),
        _ => (None, raw),
    };
    match (kind, over) {
        (Some(Kind::Flat), Some(_)) => return Err(err("over/under marker on a flat diagram")),
        (Some(Kind::Knotted), None) => {
            return Err(err("missing over/under marker on a knotted diagram"))
        }
        _ => {}
    }
    let sign = match rest.chars().last() {
        Some('+') => Sign::Pos,
        Some('-') => Sign::Neg,
        _ => return Err(err("expected a trailing sign + or -")),
    };
    let digits = &rest[..rest.len() - 1];
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(err("expected a positive integer label"));
    }
    let label: u32 = digits.parse().map_err(|_| err("label out of range"))?;
    if label == 0 {
        return Err(err("labels are positive integers"));
    }
    Ok(Token {
        label: Label(label),
        sign,
        over,
    })
}

fn parse_parts(text: &str, kind: Option<Kind>) -> Result<Vec<Part>, ParseError> {
    let spaced = text.replace(';', " ; ");
    let mut parts: Vec<Part> = Vec::new();
    let mut expect_component = true;
    let mut index = 0;
    for raw in spaced.split_whitespace() {
        if raw == ";" {
            if expect_component {
                return Err(ParseError::Syntax("empty component before ';'".into()));
            }
            expect_component = true;
            continue;
        }
        if expect_component {
            let shape = match raw {
                "(circle)" => Shape::Circle,
                "(line)" => Shape::Line,
                other => {
                    return Err(ParseError::Syntax(format!(
                        "expected (circle) or (line), found {other:?}"
                    )))
                }
            };
            parts.push((shape, Vec::new()));
            expect_component = false;
            continue;
        }
        let tok = parse_token(raw, index, kind)?;
        index += 1;
        parts.last_mut().expect("component open").1.push(tok);
    }
    if parts.is_empty() {
        return Err(ParseError::Syntax("no components".into()));
    }
    if expect_component {
        return Err(ParseError::Syntax("trailing ';'".into()));
    }
    Ok(parts)
}

/// A seeded random Gauss diagram with `n` crossings spread over components of
/// the given shapes. Endpoint order, signs and over markers are uniform.
pub fn random_diagram(
    n: usize,
    shapes: &[Shape],
    kind: Kind,
    seed: u64,
) -> Result<Diagram, DiagramError> {
    if shapes.is_empty() {
        return Err(DiagramError::ComponentSpec("no components".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ends: Vec<u32> = (1..=n as u32).flat_map(|l| [l, l]).collect();
    ends.shuffle(&mut rng);

    let mut cuts: Vec<usize> = (1..shapes.len()).map(|_| rng.gen_range(0..=ends.len())).collect();
    cuts.sort_unstable();
    cuts.push(ends.len());

    let signs: Vec<Sign> = (0..n).map(|_| Sign::from_bool(rng.gen())).collect();
    let over_first: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
    let mut met = vec![false; n];

    let mut parts = Vec::with_capacity(shapes.len());
    let mut start = 0;
    for (&shape, &end) in shapes.iter().zip(&cuts) {
        let tokens = ends[start..end]
            .iter()
            .map(|&l| {
                let i = (l - 1) as usize;
                let first = !met[i];
                met[i] = true;
                let over = match kind {
                    Kind::Flat => None,
                    Kind::Knotted => Some(first == over_first[i]),
                };
                Token {
                    label: Label(l),
                    sign: signs[i],
                    over,
                }
            })
            .collect();
        parts.push((shape, tokens));
        start = end;
    }
    Ok(Diagram::new(kind, parts)?.canonical())
}
