//! Seifert splices of one or two crossings and the intersection pairing of
//! the resulting components.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::diagram::{Diagram, Label, Shape, Slot};
use crate::error::DiagramError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PairClass {
    Parallel,
    Interleaved,
}

/// Interleaved iff exactly one endpoint of `cj` lies strictly between the two
/// endpoints of `ci` in the global traversal order.
pub fn classify_pair(d: &Diagram, ci: Label, cj: Label) -> Result<PairClass, DiagramError> {
    if ci == cj {
        return Err(DiagramError::SameLabel(ci));
    }
    let a = d.arrow(ci)?;
    let b = d.arrow(cj)?;
    let inside = |s: Slot| a.first() < s && s < a.second();
    Ok(if inside(b.first()) != inside(b.second()) {
        PairClass::Interleaved
    } else {
        PairClass::Parallel
    })
}

/// Which output components play the roles C1, C2 (and C3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Roles {
    #[serde(rename = "C1")]
    pub c1: usize,
    #[serde(rename = "C2")]
    pub c2: usize,
    #[serde(rename = "C3", skip_serializing_if = "Option::is_none")]
    pub c3: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothingResult {
    pub diagram: Diagram,
    pub smoothed: Vec<Label>,
    pub roles: Roles,
}

impl SmoothingResult {
    pub fn roles_json(&self) -> String {
        let mut out = format!("{{\"C1\": {}, \"C2\": {}", self.roles.c1, self.roles.c2);
        if let Some(c3) = self.roles.c3 {
            out.push_str(&format!(", \"C3\": {c3}"));
        }
        out.push('}');
        out
    }
}

fn single_component(d: &Diagram) -> Result<(), DiagramError> {
    if d.component_count() != 1 {
        return Err(DiagramError::Shape(format!(
            "smoothing needs a one-component diagram, got {} components",
            d.component_count()
        )));
    }
    Ok(())
}

/// Follows the spliced curve from `start` until it closes up (or, on a line,
/// runs off the end). Entry points reached by a jump are added to `entered`.
fn walk(
    len: usize,
    line: bool,
    partner: &HashMap<usize, usize>,
    start: usize,
    entered: &mut BTreeSet<usize>,
) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = start;
    entered.insert(start);
    loop {
        if cur == len {
            if line || start == 0 {
                break;
            }
            cur = 0;
        }
        if let Some(&other) = partner.get(&cur) {
            cur = other + 1;
            if cur == start || (cur == len && start == 0 && !line) {
                break;
            }
            entered.insert(cur);
            continue;
        }
        out.push(cur);
        cur += 1;
    }
    out
}

/// Splices a one-component diagram at every crossing in `labels` along the
/// orientation. The first output component contains the original base point;
/// the others follow in the order their arcs are first met after the
/// first-visit endpoint of each crossing in `labels`, each based right after
/// that endpoint. Flat input stays flat; all other arrows keep their data.
pub fn seifert_splice(d: &Diagram, labels: &[Label]) -> Result<Diagram, DiagramError> {
    single_component(d)?;
    let geo = d.geometric();
    let (shape, tokens) = geo.parts().remove(0);
    let line = shape == Shape::Line;
    let mut partner = HashMap::new();
    let mut firsts = Vec::with_capacity(labels.len());
    for (i, &l) in labels.iter().enumerate() {
        if labels[..i].contains(&l) {
            return Err(DiagramError::SameLabel(l));
        }
        let a = geo.arrow(l)?;
        partner.insert(a.first().pos, a.second().pos);
        partner.insert(a.second().pos, a.first().pos);
        firsts.push(a.first().pos);
    }
    let len = tokens.len();
    let mut entered = BTreeSet::new();
    let mut parts = vec![(shape, walk(len, line, &partner, 0, &mut entered))];
    for p in firsts {
        if entered.contains(&(p + 1)) {
            continue;
        }
        parts.push((Shape::Circle, walk(len, line, &partner, p + 1, &mut entered)));
    }
    let parts = parts
        .into_iter()
        .map(|(shape, idx)| (shape, idx.into_iter().map(|i| tokens[i]).collect()))
        .collect();
    Ok(Diagram::from_geometric(d.kind(), parts))
}

/// Smooths one crossing of a one-component diagram. Output components are
/// (base-point component, chord-interior component). C1 is the component
/// entered right after the crossing's first-visit endpoint, C2 the other;
/// `mirror` swaps them. The sign of the crossing does not enter: a rule
/// that swapped the roles of negative crossings would give the two crossings
/// of a Reidemeister II bigon opposite indices.
pub fn smooth_one_with(d: &Diagram, c: Label, mirror: bool) -> Result<SmoothingResult, DiagramError> {
    single_component(d)?;
    d.arrow(c)?;
    let diagram = seifert_splice(d, &[c])?;
    debug_assert_eq!(diagram.component_count(), 2);
    let interior_first = !mirror;
    let roles = if interior_first {
        Roles { c1: 1, c2: 0, c3: None }
    } else {
        Roles { c1: 0, c2: 1, c3: None }
    };
    Ok(SmoothingResult {
        diagram,
        smoothed: vec![c],
        roles,
    })
}

pub fn smooth_one(d: &Diagram, c: Label) -> Result<SmoothingResult, DiagramError> {
    smooth_one_with(d, c, false)
}

/// Smooths a parallel pair into three pointed components ordered
/// (C1, C2, C3): the base-point component, the circle after `ci`'s
/// first-visit endpoint, and the circle after `cj`'s.
pub fn smooth_pair(d: &Diagram, ci: Label, cj: Label) -> Result<SmoothingResult, DiagramError> {
    single_component(d)?;
    if classify_pair(d, ci, cj)? != PairClass::Parallel {
        return Err(DiagramError::NotParallel(ci, cj));
    }
    let diagram = seifert_splice(d, &[ci, cj])?;
    debug_assert_eq!(diagram.component_count(), 3);
    Ok(SmoothingResult {
        diagram,
        smoothed: vec![ci, cj],
        roles: Roles {
            c1: 0,
            c2: 1,
            c3: Some(2),
        },
    })
}

/// Algebraic intersection number of components `a` and `b`: each arrow
/// joining them counts its flat sign, negated when its first-visit endpoint
/// lies on `b`.
pub fn intersection_number(d: &Diagram, a: usize, b: usize) -> Result<i64, DiagramError> {
    let count = d.component_count();
    for index in [a, b] {
        if index >= count {
            return Err(DiagramError::ComponentOutOfRange { index, count });
        }
    }
    if a == b {
        return Err(DiagramError::Shape(
            "intersection number needs two distinct components".into(),
        ));
    }
    Ok(d
        .arrows()
        .filter_map(|arrow| {
            let (f, s) = (arrow.first().comp, arrow.second().comp);
            let s_val = arrow.local_sign().value();
            match (f, s) {
                (f, s) if f == a && s == b => Some(s_val),
                (f, s) if f == b && s == a => Some(-s_val),
                _ => None,
            }
        })
        .sum())
}
