//! Seeded invariance fuzzing: random diagrams, random move walks, and a
//! comparison of the invariant at every step.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{random_diagram, Diagram, Kind, Label, Sign, Slot};
use crate::error::{DiagramError, Result};
use crate::invariants::{Invariant, Value};
use crate::moves::{
    apply_move, enumerate_local_moves, random_site, Direction, MoveKind, MoveParams, MoveSite,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzConfig {
    pub diagrams: usize,
    /// Upper bound; each start diagram has between 0 and this many crossings.
    pub crossings: usize,
    pub steps: usize,
    pub seed: u64,
    /// Also take self-crossing changes (link homotopy) as steps.
    pub self_crossing_changes: bool,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            diagrams: 100,
            crossings: 8,
            steps: 20,
            seed: 0,
            self_crossing_changes: false,
        }
    }
}

/// One step of a walk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Step {
    Move(MoveSite),
    CrossingChange { crossing_change: Label },
}

impl Step {
    pub fn apply(&self, d: &Diagram) -> Result<Diagram, DiagramError> {
        match self {
            Step::Move(s) => apply_move(d, s),
            Step::CrossingChange { crossing_change } => d.crossing_change(*crossing_change),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub diagram_index: usize,
    pub seed: u64,
    /// Start diagram; replaying `trace` from it reproduces `after`.
    pub start: String,
    pub trace: Vec<Step>,
    pub before: String,
    pub after: String,
    pub expected: Value,
    pub found: Value,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub invariant: String,
    pub config: FuzzConfig,
    pub evaluations: usize,
    pub crossing_changes: usize,
    pub violations: Vec<Violation>,
}

impl FuzzSummary {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Violations where a polynomial did not vanish at t = 1.
    pub fn nonzero_at_one(&self) -> usize {
        self.violations.iter().filter(|v| v.reason == NONZERO_AT_ONE).count()
    }
}

fn case_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// The start diagram of case `index`, and the seed of its walk.
pub fn start_diagram(inv: &Invariant, cfg: &FuzzConfig, index: usize) -> (Diagram, u64) {
    let seed = case_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(0..=cfg.crossings);
    let kind = inv.kind().unwrap_or(Kind::Knotted);
    let d = random_diagram(n, &inv.shapes(index), kind, rng.gen()).expect("nonempty shapes");
    (d, seed)
}

fn new_labels(before: &Diagram, after: &Diagram) -> Vec<Label> {
    after.labels().filter(|l| before.arrow(*l).is_err()).collect()
}

/// The two endpoints of `labels` on component `comp`, in order.
fn ends_on(d: &Diagram, labels: &[Label], comp: usize) -> Vec<Slot> {
    let mut v: Vec<Slot> = labels
        .iter()
        .flat_map(|&l| {
            let a = d.arrow(l).expect("fresh label");
            [a.first(), a.second()]
        })
        .filter(|s| s.comp == comp)
        .collect();
    v.sort_unstable();
    v
}

fn random_gap<R: Rng>(d: &Diagram, comp: usize, rng: &mut R) -> Slot {
    Slot::new(comp, rng.gen_range(0..=d.components()[comp].len()))
}

fn r2_insert<R: Rng>(d: &Diagram, a: Slot, b: Slot, rng: &mut R) -> MoveSite {
    let (g1, g2) = if a <= b { (a, b) } else { (b, a) };
    MoveSite {
        kind: MoveKind::R2a,
        direction: Direction::Insert,
        slots: vec![g1, g2],
        params: MoveParams {
            sign: Some(Sign::from_bool(rng.gen())),
            over_strand: (d.kind() == Kind::Knotted).then(|| rng.gen_range(1..=2)),
        },
    }
}

/// Three Reidemeister II insertions that leave a triangle behind: a bigon
/// x, y between strands 1 and 2, a bigon z, w from between x and y on
/// strand 2 to strand 3, and a bigon u, v from between x and y on strand 1
/// to between z and w on strand 3. Whether the triangle x, z, u admits a
/// Reidemeister III move depends on the random signs and layers. Strands
/// sit on distinct components when there are enough of them.
fn triangle_steps<R: Rng>(d: &Diagram, rng: &mut R) -> Vec<(Step, Diagram)> {
    let n = d.component_count();
    let mut comps: Vec<usize> = (0..n).collect();
    comps.shuffle(rng);
    let pick = |i: usize, rng: &mut R| if n >= 3 { comps[i] } else { rng.gen_range(0..n) };
    let (c1, c2, c3) = (pick(0, rng), pick(1, rng), pick(2, rng));
    let mut out = Vec::with_capacity(3);

    let s1 = r2_insert(d, random_gap(d, c1, rng), random_gap(d, c2, rng), rng);
    let Ok(d1) = apply_move(d, &s1) else { return out };
    let xy = new_labels(d, &d1);
    out.push((Step::Move(s1), d1.clone()));
    // one endpoint of each of x, y on each strand; a same-component bigon
    // puts all four on c1 = c2, and then the later pair is strand 2
    let e1 = ends_on(&d1, &xy, c1);
    let e2 = ends_on(&d1, &xy, c2);
    let (mid1, mid2) = if c1 == c2 {
        (Slot::new(c1, e1[1].pos), Slot::new(c2, e2[3].pos))
    } else {
        (Slot::new(c1, e1[1].pos), Slot::new(c2, e2[1].pos))
    };

    let s2 = r2_insert(&d1, mid2, random_gap(&d1, c3, rng), rng);
    let Ok(d2) = apply_move(&d1, &s2) else { return out };
    let zw = new_labels(&d1, &d2);
    out.push((Step::Move(s2), d2.clone()));
    let z = zw.iter().map(|&l| d2.arrow(l).expect("fresh label")).min_by_key(|a| a.first()).expect("two labels");
    // the strand 3 endpoint of z is the one away from strand 2
    let z3 = if z.first().comp == c2 && z.first().pos >= mid2.pos && z.first().pos <= mid2.pos + 1 {
        z.second()
    } else {
        z.first()
    };
    // strand 1 moved if the second insertion landed before it on the same component
    let mid1 = Slot::new(c1, ends_on(&d2, &xy, c1).first().map_or(mid1.pos, |s| s.pos + 1));

    let s3 = r2_insert(&d2, mid1, Slot::new(z3.comp, z3.pos + 1), rng);
    if let Ok(d3) = apply_move(&d2, &s3) {
        out.push((Step::Move(s3), d3));
    }
    out
}

/// A walk of `cfg.steps` steps from `d`; returns each step with the diagram
/// it produced. Reidemeister III sites are rare in random diagrams, so the
/// walk takes one whenever it can with probability 1/2 and sometimes builds
/// a triangle for a later step to slide across.
pub fn walk(d: &Diagram, cfg: &FuzzConfig, seed: u64) -> Vec<(Step, Diagram)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.rotate_left(17));
    let mut cur = d.clone();
    let mut out = Vec::with_capacity(cfg.steps);
    while out.len() < cfg.steps {
        let intra: Vec<Label> = if cfg.self_crossing_changes && cur.kind() == Kind::Knotted {
            cur.arrows().filter(|a| a.is_intra()).map(|a| a.label()).collect()
        } else {
            Vec::new()
        };
        if let Some(&l) = intra.choose(&mut rng).filter(|_| rng.gen_bool(0.4)) {
            let step = Step::CrossingChange { crossing_change: l };
            cur = step.apply(&cur).expect("intra crossing");
            out.push((step, cur.clone()));
            continue;
        }
        let r3: Vec<MoveSite> = enumerate_local_moves(&cur).into_iter().filter(|s| s.kind == MoveKind::R3a).collect();
        let site = match r3.choose(&mut rng) {
            Some(s) if rng.gen_bool(0.5) => s.clone(),
            _ if rng.gen_bool(0.2) => {
                for (step, next) in triangle_steps(&cur, &mut rng) {
                    if out.len() < cfg.steps {
                        cur = next.clone();
                        out.push((step, next));
                    }
                }
                continue;
            }
            _ => random_site(&cur, &mut rng),
        };
        cur = apply_move(&cur, &site).expect("generated steps apply");
        out.push((Step::Move(site), cur.clone()));
    }
    out
}

const NONZERO_AT_ONE: &str = "value at t = 1 is not 0";

/// Every polynomial computed is checked at t = 1; values equal to the start
/// value inherit its check.
fn differs(expected: &Value, found: &Value) -> Option<&'static str> {
    if found.as_poly().is_some_and(|p| p.eval_at_one() != 0) {
        Some(NONZERO_AT_ONE)
    } else if found != expected {
        Some("value changed")
    } else {
        None
    }
}

fn run_case(inv: &Invariant, cfg: &FuzzConfig, index: usize) -> Result<(usize, usize, Option<Violation>)> {
    let (start, seed) = start_diagram(inv, cfg, index);
    let expected = inv.compute(&start)?;
    let violation = |trace: &[Step], before: &Diagram, after: &Diagram, found: Value, reason: &str| Violation {
        diagram_index: index,
        seed,
        start: start.serialize(),
        trace: trace.to_vec(),
        before: before.serialize(),
        after: after.serialize(),
        expected: expected.clone(),
        found,
        reason: reason.to_string(),
    };
    if let Some(reason) = differs(&expected, &expected) {
        return Ok((1, 0, Some(violation(&[], &start, &start, expected.clone(), reason))));
    }
    let mut evaluations = 1;
    let mut changes = 0;
    let mut trace = Vec::with_capacity(cfg.steps + 1);
    let mut before = start.clone();
    let states = std::iter::once((None, start.clone())).chain(walk(&start, cfg, seed).into_iter().map(|(s, d)| (Some(s), d)));
    for (step, after) in states {
        if let Some(step) = step {
            if matches!(step, Step::CrossingChange { .. }) {
                changes += 1;
            }
            trace.push(step);
            let found = inv.compute(&after)?;
            evaluations += 1;
            if let Some(reason) = differs(&expected, &found) {
                return Ok((evaluations, changes, Some(violation(&trace, &before, &after, found, reason))));
            }
        }
        // every deletion and slide of the current diagram, off the walk
        for site in enumerate_local_moves(&after) {
            let next = apply_move(&after, &site).expect("enumerated site applies");
            let found = inv.compute(&next)?;
            evaluations += 1;
            if let Some(reason) = differs(&expected, &found) {
                trace.push(Step::Move(site));
                return Ok((evaluations, changes, Some(violation(&trace, &after, &next, found, reason))));
            }
        }
        before = after;
    }
    Ok((evaluations, changes, None))
}

/// Runs the fuzz campaign; cases run in parallel and are reported in index
/// order. Errors (for example a pattern that does not fit the diagrams) abort
/// the run.
pub fn fuzz(inv: &Invariant, cfg: &FuzzConfig) -> Result<FuzzSummary> {
    let results: Vec<_> = (0..cfg.diagrams)
        .into_par_iter()
        .map(|i| run_case(inv, cfg, i))
        .collect::<Result<_>>()?;
    let mut summary = FuzzSummary {
        invariant: inv.name().to_string(),
        config: *cfg,
        evaluations: 0,
        crossing_changes: 0,
        violations: Vec::new(),
    };
    for (evals, changes, v) in results {
        summary.evaluations += evals;
        summary.crossing_changes += changes;
        summary.violations.extend(v);
    }
    Ok(summary)
}

/// Replays a violation's trace from its start diagram.
pub fn replay_steps(start: &Diagram, trace: &[Step]) -> Result<Diagram, DiagramError> {
    trace.iter().try_fold(start.clone(), |cur, s| s.apply(&cur))
}
