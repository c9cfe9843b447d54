//! Pairing of arrow-diagram patterns with Gauss diagrams: the signed count
//! of embeddings. A pattern arrow's tail goes to the over endpoint of the
//! diagram arrow and its head to the under endpoint; every pattern component
//! word must appear in the same order along the matching diagram component,
//! read from its base point.

use super::{Pattern, Role, Term};
use crate::diagram::{Arrow, Diagram, Kind, Slot};
use crate::error::PatternError;

fn check_shape(p: &Pattern, d: &Diagram) -> Result<(), PatternError> {
    if d.kind() != Kind::Knotted {
        return Err(PatternError::FlatDiagram);
    }
    if p.components != d.component_count() {
        return Err(PatternError::ComponentCount {
            pattern: p.components,
            diagram: d.component_count(),
        });
    }
    Ok(())
}

fn end_slot(a: &Arrow, role: Role) -> Slot {
    match role {
        Role::Tail => a.over_slot(),
        Role::Head => a.under_slot(),
    }
    .expect("knotted arrow")
}

/// Order constraint `slot(a, ra) < slot(b, rb)`, checked once both arrows
/// are assigned.
struct Before {
    a: usize,
    ra: Role,
    b: usize,
    rb: Role,
}

struct TermMatcher<'d> {
    coeff: i64,
    candidates: Vec<Vec<&'d Arrow>>,
    // constraints grouped by the later of their two arrows
    checks: Vec<Vec<Before>>,
}

impl<'d> TermMatcher<'d> {
    fn new(term: &Term, d: &'d Diagram) -> Self {
        let candidates = term
            .arrows
            .iter()
            .map(|pa| {
                d.arrows()
                    .filter(|a| {
                        a.over_slot().map(|s| s.comp) == Some(pa.tail)
                            && a.under_slot().map(|s| s.comp) == Some(pa.head)
                            && pa.sign.map_or(true, |s| s == a.sign())
                    })
                    .collect()
            })
            .collect();
        let mut checks: Vec<Vec<Before>> = (0..term.arrows.len()).map(|_| Vec::new()).collect();
        for word in &term.words {
            for (i, &(a, ra)) in word.iter().enumerate() {
                for &(b, rb) in &word[i + 1..] {
                    checks[a.max(b)].push(Before { a, ra, b, rb });
                }
            }
        }
        TermMatcher {
            coeff: term.coeff,
            candidates,
            checks,
        }
    }

    fn count(&self, chosen: &mut Vec<&'d Arrow>) -> i64 {
        let k = chosen.len();
        if k == self.candidates.len() {
            return self.coeff * chosen.iter().map(|a| a.sign().value()).product::<i64>();
        }
        let mut total = 0;
        for &cand in &self.candidates[k] {
            if chosen.iter().any(|c| c.label() == cand.label()) {
                continue;
            }
            chosen.push(cand);
            let ok = self.checks[k]
                .iter()
                .all(|c| end_slot(chosen[c.a], c.ra) < end_slot(chosen[c.b], c.rb));
            if ok {
                total += self.count(chosen);
            }
            chosen.pop();
        }
        total
    }
}

/// The Gauss diagram formula `<p, d>`.
pub fn evaluate(p: &Pattern, d: &Diagram) -> Result<i64, PatternError> {
    check_shape(p, d)?;
    Ok(p.terms
        .iter()
        .map(|t| TermMatcher::new(t, d).count(&mut Vec::with_capacity(t.arrows.len())))
        .sum())
}

/// Reference implementation of [`evaluate`]: tries every ordered tuple of
/// distinct diagram arrows and checks each condition directly.
pub fn brute_force_evaluate(p: &Pattern, d: &Diagram) -> Result<i64, PatternError> {
    check_shape(p, d)?;
    let all: Vec<&Arrow> = d.arrows().collect();
    let mut total = 0;
    for term in &p.terms {
        let m = term.arrows.len();
        let mut idx = vec![0usize; m];
        if m > all.len() {
            continue;
        }
        loop {
            let distinct = (0..m).all(|i| (i + 1..m).all(|j| idx[i] != idx[j]));
            if distinct && embeds(term, &idx.iter().map(|&i| all[i]).collect::<Vec<_>>()) {
                let signs: i64 = idx.iter().map(|&i| all[i].sign().value()).product();
                total += term.coeff * signs;
            }
            // odometer over all m-tuples
            let mut pos = 0;
            while pos < m {
                idx[pos] += 1;
                if idx[pos] < all.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == m {
                break;
            }
        }
    }
    Ok(total)
}

fn embeds(term: &Term, image: &[&Arrow]) -> bool {
    for (pa, a) in term.arrows.iter().zip(image) {
        let (Some(over), Some(under)) = (a.over_slot(), a.under_slot()) else {
            return false;
        };
        if over.comp != pa.tail || under.comp != pa.head {
            return false;
        }
        if let Some(s) = pa.sign {
            if s != a.sign() {
                return false;
            }
        }
    }
    for (comp, word) in term.words.iter().enumerate() {
        let slots: Vec<Slot> = word
            .iter()
            .map(|&(k, role)| match role {
                Role::Tail => image[k].over_slot().unwrap(),
                Role::Head => image[k].under_slot().unwrap(),
            })
            .collect();
        if slots.iter().any(|s| s.comp != comp) {
            return false;
        }
        if slots.windows(2).any(|w| w[0].pos >= w[1].pos) {
            return false;
        }
    }
    true
}
