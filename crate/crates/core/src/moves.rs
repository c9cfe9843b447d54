//! Oriented Reidemeister moves on Gauss diagrams: kinks (R1a/R1b), the
//! same-direction bigon (R2a) and the triangle move (R3a), for knotted
//! diagrams and for their flat shadows.
//!
//! Moves never cross a base point: every component is treated as an
//! interval starting at its base point, so the gap before slot 0 and the gap
//! after the last slot of a circle are different insertion points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, Kind, Label, Part, Sign, Slot, Token};
use crate::error::DiagramError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    R1a,
    R1b,
    R2a,
    R3a,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Insert,
    Delete,
    LeftToRight,
    RightToLeft,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveParams {
    /// Sign of the first inserted arrow: writhe on knotted diagrams, flat
    /// sign for flat R2a. Unused for flat R1 (the kind fixes the curl).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sign: Option<Sign>,
    /// Knotted R2a only: 1 if the strand at the earlier gap passes over, 2 otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over_strand: Option<u8>,
}

/// A located move. Insert sites list gaps (a gap `(c, p)` sits just before
/// slot `p` of component `c`); delete and R3a sites list the endpoint slots
/// they rewrite, strand by strand.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MoveSite {
    #[serde(rename = "move")]
    pub kind: MoveKind,
    pub direction: Direction,
    pub slots: Vec<Slot>,
    #[serde(default)]
    pub params: MoveParams,
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?} at", self.kind, self.direction)?;
        for s in &self.slots {
            write!(f, " {}:{}", s.comp, s.pos)?;
        }
        if let Some(s) = self.params.sign {
            write!(f, " sign {}", s.symbol())?;
        }
        if let Some(o) = self.params.over_strand {
            write!(f, " over {o}")?;
        }
        Ok(())
    }
}

fn curl_kind(curl: Sign) -> MoveKind {
    match curl {
        Sign::Pos => MoveKind::R1a,
        Sign::Neg => MoveKind::R1b,
    }
}

fn gaps(d: &Diagram) -> Vec<Slot> {
    d.components()
        .iter()
        .enumerate()
        .flat_map(|(c, comp)| (0..=comp.len()).map(move |p| Slot::new(c, p)))
        .collect()
}

fn r1_delete_site(d: &Diagram, label: Label) -> Option<MoveSite> {
    let a = d.arrow(label).ok()?;
    if !a.first().precedes(a.second()) {
        return None;
    }
    Some(MoveSite {
        kind: curl_kind(a.local_sign()),
        direction: Direction::Delete,
        slots: vec![a.first(), a.second()],
        params: MoveParams::default(),
    })
}

/// `a` must be the arrow met first on the earlier strand.
fn r2_delete_site(d: &Diagram, a: Label, b: Label) -> Option<MoveSite> {
    let (x, y) = (d.arrow(a).ok()?, d.arrow(b).ok()?);
    if !x.first().precedes(y.first()) || !x.second().precedes(y.second()) {
        return None;
    }
    if x.local_sign() == y.local_sign() {
        return None;
    }
    if d.kind() == Kind::Knotted && (x.over_end() != y.over_end() || x.sign() == y.sign()) {
        return None;
    }
    Some(MoveSite {
        kind: MoveKind::R2a,
        direction: Direction::Delete,
        slots: vec![x.first(), y.first(), x.second(), y.second()],
        params: MoveParams::default(),
    })
}

/// Detects a triangle on three arrows. The six endpoints must split into
/// three strands of two adjacent slots; for knotted diagrams the strands must
/// be layered top/middle/bottom. Orientation compatibility comes from three
/// lines in the plane: with `D(P, Q)` the sign of the frame (tangent of P,
/// tangent of Q) at their crossing and `t_i` recording which crossing comes
/// first on strand i, a triangle exists iff
/// `t1 t2 = D(1,3) D(2,3)` and `t1 t3 = D(1,2) D(2,3)`.
fn r3_site(d: &Diagram, labels: [Label; 3]) -> Option<MoveSite> {
    let mut ends: Vec<Slot> = Vec::with_capacity(6);
    for &l in &labels {
        let a = d.arrow(l).ok()?;
        ends.push(a.first());
        ends.push(a.second());
    }
    ends.sort_unstable();
    let strands: Vec<[Slot; 2]> = ends.chunks(2).map(|c| [c[0], c[1]]).collect();
    for [s, t] in &strands {
        if !s.precedes(*t) || d.label_at(*s) == d.label_at(*t) {
            return None;
        }
    }
    let lab = |s: Slot| d.label_at(s);
    let on = |k: usize, l: Label| strands[k].iter().any(|&s| lab(s) == l);
    let shared = |i: usize, j: usize| -> Label {
        let l = lab(strands[i][0]);
        if on(j, l) {
            l
        } else {
            lab(strands[i][1])
        }
    };
    let (x, y, z) = (shared(0, 1), shared(0, 2), shared(1, 2));

    if d.kind() == Kind::Knotted {
        let mut overs: Vec<usize> = strands
            .iter()
            .map(|st| st.iter().filter(|&&s| d.token_at(s).over == Some(true)).count())
            .collect();
        overs.sort_unstable();
        if overs != [0, 1, 2] {
            return None;
        }
    }

    // frame sign of (tangent of strand p, tangent of the other strand) at crossing l
    let frame = |p: usize, l: Label| -> i64 {
        let a = d.arrow(l).expect("label of a strand");
        let own_first = strands[p].contains(&a.first());
        a.local_sign().value() * if own_first { 1 } else { -1 }
    };
    let t1: i64 = if lab(strands[0][0]) == x { 1 } else { -1 };
    let t2: i64 = if lab(strands[1][0]) == x { 1 } else { -1 };
    let t3: i64 = if lab(strands[2][0]) == y { 1 } else { -1 };
    let d12 = frame(0, x);
    let d13 = frame(0, y);
    let d23 = frame(1, z);
    if t1 * t2 != d13 * d23 || t1 * t3 != d12 * d23 {
        return None;
    }
    Some(MoveSite {
        kind: MoveKind::R3a,
        direction: if t1 == 1 {
            Direction::LeftToRight
        } else {
            Direction::RightToLeft
        },
        slots: strands.into_iter().flatten().collect(),
        params: MoveParams::default(),
    })
}

fn insert_sites(d: &Diagram, out: &mut Vec<MoveSite>) {
    let gaps = gaps(d);
    let signs = [Sign::Pos, Sign::Neg];
    for &g in &gaps {
        for curl in signs {
            match d.kind() {
                Kind::Flat => out.push(MoveSite {
                    kind: curl_kind(curl),
                    direction: Direction::Insert,
                    slots: vec![g],
                    params: MoveParams::default(),
                }),
                Kind::Knotted => {
                    for eps in signs {
                        out.push(MoveSite {
                            kind: curl_kind(curl),
                            direction: Direction::Insert,
                            slots: vec![g],
                            params: MoveParams {
                                sign: Some(eps),
                                over_strand: None,
                            },
                        });
                    }
                }
            }
        }
    }
    for (i, &g1) in gaps.iter().enumerate() {
        for &g2 in &gaps[i..] {
            for s in signs {
                let overs: &[Option<u8>] = match d.kind() {
                    Kind::Flat => &[None],
                    Kind::Knotted => &[Some(1), Some(2)],
                };
                for &over_strand in overs {
                    out.push(MoveSite {
                        kind: MoveKind::R2a,
                        direction: Direction::Insert,
                        slots: vec![g1, g2],
                        params: MoveParams {
                            sign: Some(s),
                            over_strand,
                        },
                    });
                }
            }
        }
    }
}

fn delete_and_slide_sites(d: &Diagram, out: &mut Vec<MoveSite>) {
    let labels: Vec<Label> = d.labels().collect();
    out.extend(labels.iter().filter_map(|&l| r1_delete_site(d, l)));
    // R2 and R3 only involve crossings that follow each other on a strand
    let mut follows: BTreeSet<(Label, Label)> = BTreeSet::new();
    let mut adjacent: BTreeMap<Label, BTreeSet<Label>> = BTreeMap::new();
    for comp in d.components() {
        for w in comp.slots().windows(2) {
            if w[0] != w[1] {
                follows.insert((w[0], w[1]));
                adjacent.entry(w[0]).or_default().insert(w[1]);
                adjacent.entry(w[1]).or_default().insert(w[0]);
            }
        }
    }
    for &(a, b) in &follows {
        out.extend(r2_delete_site(d, a, b));
    }
    for (&a, near) in &adjacent {
        for &b in near.range(a..) {
            for &c in near.range(b..) {
                if c != b && adjacent[&b].contains(&c) {
                    out.extend(r3_site(d, [a, b, c]));
                }
            }
        }
    }
}

/// Every applicable move site of `d`.
pub fn enumerate_moves(d: &Diagram) -> Vec<MoveSite> {
    let mut out = Vec::new();
    insert_sites(d, &mut out);
    delete_and_slide_sites(d, &mut out);
    out
}

/// Only the sites that remove crossings or slide a strand.
pub fn enumerate_local_moves(d: &Diagram) -> Vec<MoveSite> {
    let mut out = Vec::new();
    delete_and_slide_sites(d, &mut out);
    out
}

fn inapplicable(site: &MoveSite, why: &str) -> DiagramError {
    DiagramError::InapplicableMove(format!("{site}: {why}"))
}

fn check_gap(d: &Diagram, g: Slot, site: &MoveSite) -> Result<(), DiagramError> {
    match d.components().get(g.comp) {
        Some(c) if g.pos <= c.len() => Ok(()),
        _ => Err(inapplicable(site, "gap out of range")),
    }
}

fn check_slot(d: &Diagram, s: Slot, site: &MoveSite) -> Result<Label, DiagramError> {
    match d.components().get(s.comp) {
        Some(c) if s.pos < c.len() => Ok(d.label_at(s)),
        _ => Err(inapplicable(site, "slot out of range")),
    }
}

/// Inserts token runs at gaps; runs at the same gap keep their given order.
fn insert_runs(mut parts: Vec<Part>, mut runs: Vec<(Slot, Vec<Token>)>) -> Vec<Part> {
    // later gaps first so earlier indices stay valid; stable for equal gaps
    runs.reverse();
    runs.sort_by(|a, b| b.0.cmp(&a.0));
    for (g, toks) in runs {
        let slots = &mut parts[g.comp].1;
        slots.splice(g.pos..g.pos, toks);
    }
    parts
}

fn remove_labels(parts: Vec<Part>, labels: &[Label]) -> Vec<Part> {
    parts
        .into_iter()
        .map(|(shape, toks)| {
            (
                shape,
                toks.into_iter().filter(|t| !labels.contains(&t.label)).collect(),
            )
        })
        .collect()
}

/// Applies a site returned by [`enumerate_moves`].
pub fn apply_move(d: &Diagram, site: &MoveSite) -> Result<Diagram, DiagramError> {
    let parts = d.parts();
    let kind = d.kind();
    let parts = match (site.kind, site.direction) {
        (MoveKind::R1a | MoveKind::R1b, Direction::Insert) => {
            let [g] = site.slots[..] else {
                return Err(inapplicable(site, "R1 insert takes one gap"));
            };
            check_gap(d, g, site)?;
            let curl = if site.kind == MoveKind::R1a {
                Sign::Pos
            } else {
                Sign::Neg
            };
            let l = d.next_label();
            let toks = match (kind, site.params.sign, site.params.over_strand) {
                (Kind::Flat, None, None) => vec![Token::flat(l, curl), Token::flat(l, curl)],
                (Kind::Knotted, Some(eps), None) => {
                    let over_first = eps == curl;
                    vec![Token::knotted(l, eps, over_first), Token::knotted(l, eps, !over_first)]
                }
                _ => return Err(inapplicable(site, "parameters do not fit the diagram kind")),
            };
            insert_runs(parts, vec![(g, toks)])
        }
        (MoveKind::R2a, Direction::Insert) => {
            let [g1, g2] = site.slots[..] else {
                return Err(inapplicable(site, "R2a insert takes two gaps"));
            };
            check_gap(d, g1, site)?;
            check_gap(d, g2, site)?;
            if g1 > g2 {
                return Err(inapplicable(site, "gaps must be in traversal order"));
            }
            let a = d.next_label();
            let b = Label(a.0 + 1);
            let (run1, run2) = match (kind, site.params.sign, site.params.over_strand) {
                (Kind::Flat, Some(s), None) => (
                    vec![Token::flat(a, s), Token::flat(b, -s)],
                    vec![Token::flat(a, s), Token::flat(b, -s)],
                ),
                (Kind::Knotted, Some(e), Some(o @ (1 | 2))) => {
                    let top = o == 1;
                    (
                        vec![Token::knotted(a, e, top), Token::knotted(b, -e, top)],
                        vec![Token::knotted(a, e, !top), Token::knotted(b, -e, !top)],
                    )
                }
                _ => return Err(inapplicable(site, "parameters do not fit the diagram kind")),
            };
            insert_runs(parts, vec![(g1, run1), (g2, run2)])
        }
        (MoveKind::R1a | MoveKind::R1b, Direction::Delete) => {
            let [s, _] = site.slots[..] else {
                return Err(inapplicable(site, "R1 delete takes two slots"));
            };
            let l = check_slot(d, s, site)?;
            if r1_delete_site(d, l).as_ref() != Some(site) {
                return Err(inapplicable(site, "no kink there"));
            }
            remove_labels(parts, &[l])
        }
        (MoveKind::R2a, Direction::Delete) => {
            let [s1, s2, ..] = site.slots[..] else {
                return Err(inapplicable(site, "R2a delete takes four slots"));
            };
            let a = check_slot(d, s1, site)?;
            let b = check_slot(d, s2, site)?;
            if r2_delete_site(d, a, b).as_ref() != Some(site) {
                return Err(inapplicable(site, "no bigon there"));
            }
            remove_labels(parts, &[a, b])
        }
        (MoveKind::R3a, Direction::LeftToRight | Direction::RightToLeft) => {
            if site.slots.len() != 6 {
                return Err(inapplicable(site, "R3a takes six slots"));
            }
            let mut labels = Vec::with_capacity(6);
            for &s in &site.slots {
                labels.push(check_slot(d, s, site)?);
            }
            labels.sort_unstable();
            labels.dedup();
            let [a, b, c] = labels[..] else {
                return Err(inapplicable(site, "slots must cover three arrows"));
            };
            if r3_site(d, [a, b, c]).as_ref() != Some(site) {
                return Err(inapplicable(site, "no triangle there"));
            }
            let mut parts = parts;
            for pair in site.slots.chunks(2) {
                let toks = &mut parts[pair[0].comp].1;
                toks.swap(pair[0].pos, pair[1].pos);
            }
            parts
        }
        _ => return Err(inapplicable(site, "direction does not fit the move")),
    };
    Ok(Diagram::new(kind, parts).expect("moves preserve validity"))
}

/// Coarse class of a site, used to balance random walks.
fn class(site: &MoveSite) -> (MoveKind, bool) {
    (site.kind, site.direction == Direction::Insert)
}

/// A seeded random walk: each step picks uniformly among the move classes
/// (kind, insert or not) that have an applicable site, then uniformly among
/// that class's sites.
pub fn random_walk(d: &Diagram, steps: usize, seed: u64) -> (Diagram, Vec<MoveSite>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut trace = Vec::with_capacity(steps);
    for _ in 0..steps {
        let site = random_site(&cur, &mut rng);
        cur = apply_move(&cur, &site).expect("enumerated site applies");
        trace.push(site);
    }
    (cur, trace)
}

pub fn random_site<R: Rng>(d: &Diagram, rng: &mut R) -> MoveSite {
    let mut classes: BTreeMap<(MoveKind, bool), Vec<MoveSite>> = BTreeMap::new();
    for kind in [MoveKind::R1a, MoveKind::R1b, MoveKind::R2a] {
        classes.insert((kind, true), Vec::new());
    }
    for s in enumerate_local_moves(d) {
        classes.entry(class(&s)).or_default().push(s);
    }
    let keys: Vec<_> = classes.keys().copied().collect();
    let key = *keys.choose(rng).expect("insert classes always exist");
    if key.1 {
        return random_insert(d, key.0, rng);
    }
    classes[&key].choose(rng).expect("nonempty class").clone()
}

/// A uniform insert site of the given kind, drawn without listing them all.
fn random_insert<R: Rng>(d: &Diagram, kind: MoveKind, rng: &mut R) -> MoveSite {
    let gaps = gaps(d);
    let knotted = d.kind() == Kind::Knotted;
    let (slots, params) = if kind == MoveKind::R2a {
        // uniform over pairs i <= j
        let (i, j) = loop {
            let (i, j) = (rng.gen_range(0..gaps.len()), rng.gen_range(0..gaps.len()));
            if i <= j {
                break (i, j);
            }
        };
        let params = MoveParams {
            sign: Some(Sign::from_bool(rng.gen())),
            over_strand: knotted.then(|| rng.gen_range(1..=2)),
        };
        (vec![gaps[i], gaps[j]], params)
    } else {
        let params = MoveParams {
            sign: knotted.then(|| Sign::from_bool(rng.gen())),
            over_strand: None,
        };
        (vec![*gaps.choose(rng).expect("a gap")], params)
    };
    MoveSite {
        kind,
        direction: Direction::Insert,
        slots,
        params,
    }
}

/// Replays a trace produced by [`random_walk`].
pub fn replay(d: &Diagram, trace: &[MoveSite]) -> Result<Diagram, DiagramError> {
    trace.iter().try_fold(d.clone(), |cur, s| apply_move(&cur, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{random_diagram, Shape};
    use crate::smoothing::{classify_pair, PairClass};

    fn knot(s: &str) -> Diagram {
        Diagram::parse(s, Kind::Knotted).unwrap()
    }

    fn inverse_of(before: &Diagram, after: &Diagram, site: &MoveSite) -> bool {
        enumerate_local_moves(after).iter().any(|inv| {
            let compatible = match site.direction {
                Direction::Insert => inv.direction == Direction::Delete && inv.kind == site.kind,
                Direction::Delete => false,
                _ => inv.kind == MoveKind::R3a && inv.direction != site.direction,
            };
            compatible && apply_move(after, inv).unwrap().same_up_to_labels(before)
        })
    }

    #[test]
    fn empty_circle_has_only_inserts() {
        let sites = enumerate_moves(&knot("(circle)"));
        assert!(!sites.is_empty());
        assert!(sites.iter().all(|s| s.direction == Direction::Insert));
        assert!(sites.iter().any(|s| s.kind == MoveKind::R1a));
        assert!(sites.iter().any(|s| s.kind == MoveKind::R1b));
        assert!(sites.iter().any(|s| s.kind == MoveKind::R2a));
    }

    #[test]
    fn kink_can_be_deleted() {
        let d = knot("(circle) O1+ U1+");
        let del: Vec<_> = enumerate_local_moves(&d);
        assert_eq!(del.len(), 1);
        assert_eq!(del[0].kind, MoveKind::R1a);
        let out = apply_move(&d, &del[0]).unwrap();
        assert_eq!(out.to_string(), "(circle)");
        // under-first positive kink curls the other way
        let d = knot("(circle) U1+ O1+");
        assert_eq!(enumerate_local_moves(&d)[0].kind, MoveKind::R1b);
    }

    #[test]
    fn r1_insert_on_unknot() {
        let d = knot("(circle)");
        let site = MoveSite {
            kind: MoveKind::R1a,
            direction: Direction::Insert,
            slots: vec![Slot::new(0, 0)],
            params: MoveParams {
                sign: Some(Sign::Pos),
                over_strand: None,
            },
        };
        let out = apply_move(&d, &site).unwrap();
        assert_eq!(out.to_string(), "(circle) O1+ U1+");
        let s = crate::smoothing::smooth_one(&out, Label(1)).unwrap();
        assert_eq!(s.diagram.crossing_count(), 0);
    }

    #[test]
    fn r2_insert_is_interleaved_with_opposite_signs() {
        let d = knot("(line) O1+ U1+");
        for site in enumerate_moves(&d)
            .into_iter()
            .filter(|s| s.kind == MoveKind::R2a && s.direction == Direction::Insert)
        {
            let out = apply_move(&d, &site).unwrap();
            let (a, b) = (Label(2), Label(3));
            assert_eq!(classify_pair(&out, a, b).unwrap(), PairClass::Interleaved);
            let ea = out.arrow(a).unwrap().sign().value();
            let eb = out.arrow(b).unwrap().sign().value();
            assert_eq!(ea + eb, 0);
            assert_eq!(
                out.flat_sign(a).unwrap().value() + out.flat_sign(b).unwrap().value(),
                0
            );
            assert!(inverse_of(&d, &out, &site), "{site}");
        }
    }

    #[test]
    fn r2_at_a_single_gap() {
        let d = knot("(circle)");
        let site = MoveSite {
            kind: MoveKind::R2a,
            direction: Direction::Insert,
            slots: vec![Slot::new(0, 0), Slot::new(0, 0)],
            params: MoveParams {
                sign: Some(Sign::Neg),
                over_strand: Some(2),
            },
        };
        let out = apply_move(&d, &site).unwrap();
        assert_eq!(out.to_string(), "(circle) U1- U2+ O1- O2+");
        let back = enumerate_local_moves(&out);
        assert_eq!(back.len(), 1);
        assert_eq!(apply_move(&out, &back[0]).unwrap().to_string(), "(circle)");
    }

    #[test]
    fn inapplicable_sites_are_rejected() {
        let d = knot("(circle) O1+ O2+ U1+ U2+");
        let bogus = MoveSite {
            kind: MoveKind::R1a,
            direction: Direction::Delete,
            slots: vec![Slot::new(0, 0), Slot::new(0, 1)],
            params: MoveParams::default(),
        };
        assert!(matches!(apply_move(&d, &bogus), Err(DiagramError::InapplicableMove(_))));
        let far = MoveSite {
            kind: MoveKind::R1a,
            direction: Direction::Insert,
            slots: vec![Slot::new(0, 9)],
            params: MoveParams {
                sign: Some(Sign::Pos),
                over_strand: None,
            },
        };
        assert!(apply_move(&d, &far).is_err());
        let flat_params = MoveSite {
            params: MoveParams::default(),
            ..far.clone()
        };
        assert!(apply_move(&d, &MoveSite { slots: vec![Slot::new(0, 1)], ..flat_params }).is_err());
    }

    /// Three-strand positive braid words, each strand read as its own
    /// component. A letter s_i lets the strand at position i pass over the
    /// one at i+1 while moving right, which is a positive crossing.
    fn braid_closure(word: &[usize]) -> Diagram {
        let mut at = [0usize, 1, 2]; // component at each position
        let mut parts: Vec<Part> = (0..3).map(|_| (Shape::Circle, Vec::new())).collect();
        for (n, &i) in word.iter().enumerate() {
            let l = Label(n as u32 + 1);
            let (left, right) = (at[i], at[i + 1]);
            parts[left].1.push(Token::knotted(l, Sign::Pos, true));
            parts[right].1.push(Token::knotted(l, Sign::Pos, false));
            at.swap(i, i + 1);
        }
        Diagram::new(Kind::Knotted, parts).unwrap()
    }

    #[test]
    fn r3_turns_one_braid_relation_side_into_the_other() {
        let lhs = braid_closure(&[0, 1, 0]);
        let rhs = braid_closure(&[1, 0, 1]);
        let sites: Vec<_> = enumerate_local_moves(&lhs)
            .into_iter()
            .filter(|s| s.kind == MoveKind::R3a)
            .collect();
        assert_eq!(sites.len(), 1, "{lhs}");
        let out = apply_move(&lhs, &sites[0]).unwrap();
        assert!(out.same_up_to_labels(&rhs), "{out} vs {rhs}");
        assert!(inverse_of(&lhs, &out, &sites[0]));
        // cyclic layering is not a triangle move
        let cyclic = knot("(circle) O1+ U3+ ; (circle) U1+ O2+ ; (circle) U2+ O3+");
        assert!(enumerate_local_moves(&cyclic).is_empty());
    }

    /// Three straight lines with random directions and a random layering;
    /// translating one line across the opposite vertex is an R3 move. The
    /// Gauss diagram before the move must expose a site turning it into the
    /// diagram after the move.
    #[test]
    fn r3_matches_planar_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 400 {
            let dirs: Vec<(f64, f64)> = (0..3)
                .map(|_| {
                    let t: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                    (t.cos(), t.sin())
                })
                .collect();
            let det = |u: (f64, f64), v: (f64, f64)| u.0 * v.1 - u.1 * v.0;
            if (0..3).any(|i| (0..3).any(|j| i != j && det(dirs[i], dirs[j]).abs() < 0.05)) {
                continue;
            }
            let offsets: Vec<(f64, f64)> = (0..3)
                .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let mut layer = [0usize, 1, 2];
            layer.shuffle(&mut rng);
            let flat = rng.gen_bool(0.5);
            let mover = rng.gen_range(0..3);
            let build = |shift: f64| -> Diagram {
                // line k: offsets[k] + s * dirs[k]; the mover is translated along its normal
                let base = |k: usize| {
                    if k == mover {
                        let n = (-dirs[k].1, dirs[k].0);
                        (offsets[k].0 + shift * n.0, offsets[k].1 + shift * n.1)
                    } else {
                        offsets[k]
                    }
                };
                let mut hits: Vec<Vec<(f64, Token)>> = vec![Vec::new(); 3];
                let mut label = 0;
                for i in 0..3 {
                    for j in i + 1..3 {
                        label += 1;
                        let (pi, pj) = (base(i), base(j));
                        let w = (pj.0 - pi.0, pj.1 - pi.1);
                        let den = det(dirs[i], dirs[j]);
                        let si = det(w, dirs[j]) / den;
                        let sj = det(w, dirs[i]) / den;
                        let i_over = layer[i] < layer[j];
                        let (top, bottom) = if i_over { (i, j) } else { (j, i) };
                        let eps = Sign::from_bool(det(dirs[top], dirs[bottom]) > 0.0);
                        let l = Label(label);
                        let (ti, tj) = if flat {
                            // flat sign is the frame of the first-visited branch: comp i < j
                            let s = Sign::from_bool(det(dirs[i], dirs[j]) > 0.0);
                            (Token::flat(l, s), Token::flat(l, s))
                        } else {
                            (Token::knotted(l, eps, i_over), Token::knotted(l, eps, !i_over))
                        };
                        hits[i].push((si, ti));
                        hits[j].push((sj, tj));
                    }
                }
                let parts = hits
                    .into_iter()
                    .map(|mut h| {
                        h.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                        (Shape::Line, h.into_iter().map(|(_, t)| t).collect())
                    })
                    .collect();
                let kind = if flat { Kind::Flat } else { Kind::Knotted };
                Diagram::new(kind, parts).unwrap()
            };
            // signed distance of the opposite vertex from the mover's line
            let others: Vec<usize> = (0..3).filter(|&k| k != mover).collect();
            let (a, b) = (others[0], others[1]);
            let w = (offsets[b].0 - offsets[a].0, offsets[b].1 - offsets[a].1);
            let sa = det(w, dirs[b]) / det(dirs[a], dirs[b]);
            let vertex = (offsets[a].0 + sa * dirs[a].0, offsets[a].1 + sa * dirs[a].1);
            let n = (-dirs[mover].1, dirs[mover].0);
            let h = (vertex.0 - offsets[mover].0) * n.0 + (vertex.1 - offsets[mover].1) * n.1;
            let before = build(h - 0.5);
            let after = build(h + 0.5);
            let sites: Vec<_> = enumerate_local_moves(&before)
                .into_iter()
                .filter(|s| s.kind == MoveKind::R3a)
                .collect();
            assert_eq!(sites.len(), 1, "{before}");
            assert_eq!(apply_move(&before, &sites[0]).unwrap(), after);
            // a non-move: reversing one strand's order alone must not be a site
            let mut parts = before.parts();
            parts[0].1.swap(0, 1);
            let broken = Diagram::new(before.kind(), parts).unwrap();
            assert!(enumerate_local_moves(&broken).iter().all(|s| s.kind != MoveKind::R3a));
            checked += 1;
        }
    }

    #[test]
    fn walks_are_replayable() {
        let d = knot("(circle) O1+ O2+ U1+ U2+");
        let (same, trace) = random_walk(&d, 0, 3);
        assert_eq!(same, d);
        assert!(trace.is_empty());
        let (a, trace) = random_walk(&d, 30, 5);
        let (b, trace_b) = random_walk(&d, 30, 5);
        assert_eq!(a, b);
        assert_eq!(trace, trace_b);
        assert_eq!(replay(&d, &trace).unwrap(), a);
    }

    #[test]
    fn every_insert_has_an_inverse_delete() {
        for seed in 0..20 {
            for kind in [Kind::Flat, Kind::Knotted] {
                let d = random_diagram(3, &[Shape::Circle, Shape::Line], kind, seed).unwrap();
                let sites = enumerate_moves(&d);
                for site in sites.iter().filter(|s| s.direction == Direction::Insert).step_by(7) {
                    let out = apply_move(&d, site).unwrap();
                    assert!(inverse_of(&d, &out, site), "{d} {site}");
                }
                for site in sites.iter().filter(|s| s.kind == MoveKind::R3a) {
                    let out = apply_move(&d, site).unwrap();
                    assert!(inverse_of(&d, &out, site), "{d} {site}");
                }
            }
        }
    }

    #[test]
    fn trace_json_shape() {
        let site = MoveSite {
            kind: MoveKind::R2a,
            direction: Direction::Insert,
            slots: vec![Slot::new(0, 1), Slot::new(1, 0)],
            params: MoveParams {
                sign: Some(Sign::Neg),
                over_strand: Some(1),
            },
        };
        let json = serde_json::to_string(&site).unwrap();
        assert_eq!(
            json,
            r#"{"move":"R2a","direction":"insert","slots":[[0,1],[1,0]],"params":{"sign":-1,"over_strand":1}}"#
        );
        let back: MoveSite = serde_json::from_str(&json).unwrap();
        assert_eq!(back, site);
    }
}
