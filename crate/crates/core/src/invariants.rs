//! Index polynomials and triple invariants built from smoothings.

use std::fmt;

use serde::Serialize;

use crate::diagram::{Diagram, Kind, Label, Shape, Sign};
use crate::error::{DiagramError, PatternError, Result};
use crate::gdf::{builtin_pattern, evaluate, Pattern};
use crate::poly::LaurentPoly;
use crate::smoothing::{classify_pair, intersection_number, smooth_one_with, smooth_pair, PairClass};

/// An invariant value: an integer or a Laurent polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Poly(LaurentPoly),
}

impl Value {
    /// `t -> t^-1` on polynomials; integers are returned unchanged.
    pub fn mirror(&self) -> Value {
        match self {
            Value::Poly(p) => Value::Poly(p.mirror()),
            v => v.clone(),
        }
    }

    pub fn as_poly(&self) -> Option<&LaurentPoly> {
        match self {
            Value::Poly(p) => Some(p),
            Value::Int(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Poly(p) => write!(f, "{p}"),
        }
    }
}

fn require_kind(d: &Diagram, kind: Kind) -> Result<(), DiagramError> {
    if d.kind() != kind {
        return Err(DiagramError::KindMismatch {
            expected: kind,
            found: d.kind(),
        });
    }
    Ok(())
}

fn require_one(d: &Diagram, shape: Option<Shape>, what: &str) -> Result<(), DiagramError> {
    let ok = d.component_count() == 1 && shape.map_or(true, |s| d.components()[0].shape() == s);
    if !ok {
        return Err(DiagramError::Shape(format!(
            "{what} needs a single {} component, got {}",
            match shape {
                Some(Shape::Circle) => "circle",
                Some(Shape::Line) => "line",
                None => "circle or line",
            },
            d.serialize()
        )));
    }
    Ok(())
}

/// Exponent of the crossing `c`: the intersection number `C2 . C1` of the two
/// components of its smoothing.
pub fn crossing_index(d: &Diagram, c: Label, mirror: bool) -> Result<i64, DiagramError> {
    let s = smooth_one_with(d, c, mirror)?;
    intersection_number(&s.diagram, s.roles.c2, s.roles.c1)
}

fn index_sum(d: &Diagram, mirror: bool, weight: impl Fn(Label) -> Sign) -> Result<LaurentPoly, DiagramError> {
    let mut out = LaurentPoly::zero();
    for c in d.labels() {
        let e = crossing_index(d, c, mirror)?;
        out.add_term(weight(c).value(), e);
        out.add_term(-weight(c).value(), 0);
    }
    Ok(out)
}

/// Affine index polynomial `sum eps(c) (t^index(c) - 1)` of a closed knotted
/// diagram. `mirror` swaps the C1/C2 roles of every smoothing.
pub fn affine_index_with(d: &Diagram, mirror: bool) -> Result<LaurentPoly, DiagramError> {
    require_kind(d, Kind::Knotted)?;
    require_one(d, Some(Shape::Circle), "affine index")?;
    index_sum(d, mirror, |c| d.arrow(c).expect("label").sign())
}

pub fn affine_index(d: &Diagram) -> Result<LaurentPoly, DiagramError> {
    affine_index_with(d, false)
}

/// The same sum for a pointed flat curve, weighted by `sgn`.
pub fn flat_index_with(d: &Diagram, mirror: bool) -> Result<LaurentPoly, DiagramError> {
    require_kind(d, Kind::Flat)?;
    require_one(d, None, "flat index")?;
    index_sum(d, mirror, |c| d.arrow(c).expect("label").sign())
}

pub fn flat_index(d: &Diagram) -> Result<LaurentPoly, DiagramError> {
    flat_index_with(d, false)
}

/// Milnor's triple linking number with the shipped pattern.
pub fn mu123(d: &Diagram) -> Result<i64> {
    let p = builtin_pattern("mu123", None)?;
    Ok(evaluate(&p, d)?)
}

/// Unordered parallel pairs `(ci, cj)` of a one-component diagram, with `ci`
/// the chord whose first endpoint comes earlier.
pub fn parallel_pairs(d: &Diagram) -> Vec<(Label, Label)> {
    let mut labels: Vec<_> = d.arrows().map(|a| (a.first(), a.label())).collect();
    labels.sort_unstable();
    let mut out = Vec::new();
    for (i, &(_, ci)) in labels.iter().enumerate() {
        for &(_, cj) in &labels[i + 1..] {
            if classify_pair(d, ci, cj) == Ok(PairClass::Parallel) {
                out.push((ci, cj));
            }
        }
    }
    out
}

/// How the pattern value of a smoothed parallel pair is read off.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Reading {
    /// Evaluate on the smoothed diagram, keeping every remaining crossing's
    /// writhe and over/under data.
    #[default]
    Diagram,
    /// Forget over/under data and evaluate on `iota` of the smoothed curve.
    Curve,
}

/// Pattern value of the three-component smoothing at a parallel pair.
pub fn pair_value(d: &Diagram, ci: Label, cj: Label, pattern: &Pattern, reading: Reading) -> Result<i64> {
    let s = smooth_pair(d, ci, cj)?;
    let target = match (reading, s.diagram.kind()) {
        (Reading::Diagram, Kind::Knotted) => s.diagram,
        _ => s.diagram.shadow().iota()?,
    };
    Ok(evaluate(pattern, &target)?)
}

fn triple_sum(d: &Diagram, pattern: &Pattern, reading: Reading) -> Result<LaurentPoly> {
    if pattern.components != 3 {
        return Err(PatternError::ComponentCount {
            pattern: pattern.components,
            diagram: 3,
        }
        .into());
    }
    let mut out = LaurentPoly::zero();
    for (ci, cj) in parallel_pairs(d) {
        let v = pair_value(d, ci, cj, pattern, reading)?;
        let w = 2 * (d.arrow(ci)?.sign() * d.arrow(cj)?.sign()).value();
        out.add_term(w, v);
        out.add_term(-w, 0);
    }
    Ok(out)
}

/// `2 sum eps(ci) eps(cj) (t^v - 1)` over the parallel pairs of a long
/// knotted diagram, where `v` is the pattern evaluated on the smoothing at
/// the pair, read as a link diagram.
pub fn triple_invariant(d: &Diagram, pattern: &Pattern) -> Result<LaurentPoly> {
    triple_invariant_with(d, pattern, Reading::Diagram)
}

/// [`triple_invariant`] with an explicit reading of the smoothings.
///
/// With [`Reading::Diagram`] the sum is not preserved by Reidemeister II:
/// smoothing either crossing of the bigon leaves the other one behind with
/// over/under and writhe swapped, which a pattern with positive
/// coefficients sees. [`Reading::Curve`] is preserved, but `iota` makes every
/// arrow run from a lower to a higher component, so `mu123`, `lambda` and
/// `nu` with the identity permutation always give 0 there.
pub fn triple_invariant_with(d: &Diagram, pattern: &Pattern, reading: Reading) -> Result<LaurentPoly> {
    require_kind(d, Kind::Knotted)?;
    require_one(d, Some(Shape::Line), "triple invariant")?;
    triple_sum(d, pattern, reading)
}

/// The flat version for a pointed curve: signs are `sgn`, and the pattern is
/// evaluated on `iota` of each smoothing.
pub fn flat_triple_invariant(d: &Diagram, pattern: &Pattern) -> Result<LaurentPoly> {
    require_kind(d, Kind::Flat)?;
    require_one(d, None, "flat triple invariant")?;
    triple_sum(d, pattern, Reading::Curve)
}

/// An invariant selected at run time, with its pattern and conventions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Invariant {
    AffineIndex { mirror: bool },
    FlatIndex { mirror: bool },
    /// A Gauss diagram formula evaluated on the whole diagram; `mu123` is the
    /// shipped instance.
    Formula(Pattern),
    Triple(Pattern, Reading),
    FlatTriple(Pattern),
    /// Intersection number of two components.
    Intersection(usize, usize),
}

impl Invariant {
    pub fn name(&self) -> &'static str {
        match self {
            Invariant::AffineIndex { .. } => "affine-index",
            Invariant::FlatIndex { .. } => "flat-index",
            Invariant::Formula(_) => "formula",
            Invariant::Triple(..) => "triple",
            Invariant::FlatTriple(_) => "flat-triple",
            Invariant::Intersection(..) => "intersection",
        }
    }

    /// The diagram kind the invariant is defined on; `None` if both work.
    pub fn kind(&self) -> Option<Kind> {
        match self {
            Invariant::AffineIndex { .. } | Invariant::Formula(_) | Invariant::Triple(..) => Some(Kind::Knotted),
            Invariant::FlatIndex { .. } | Invariant::FlatTriple(_) => Some(Kind::Flat),
            Invariant::Intersection(..) => None,
        }
    }

    /// Component shapes of random inputs; `variant` alternates circles and
    /// lines where either is allowed.
    pub fn shapes(&self, variant: usize) -> Vec<Shape> {
        let alt = if variant % 2 == 0 { Shape::Circle } else { Shape::Line };
        match self {
            Invariant::AffineIndex { .. } => vec![Shape::Circle],
            Invariant::Triple(..) => vec![Shape::Line],
            Invariant::FlatIndex { .. } | Invariant::FlatTriple(_) => vec![alt],
            Invariant::Formula(p) => vec![alt; p.components],
            Invariant::Intersection(a, b) => vec![alt; a.max(b) + 1],
        }
    }

    pub fn compute(&self, d: &Diagram) -> Result<Value> {
        Ok(match self {
            Invariant::AffineIndex { mirror } => Value::Poly(affine_index_with(d, *mirror)?),
            Invariant::FlatIndex { mirror } => Value::Poly(flat_index_with(d, *mirror)?),
            Invariant::Formula(p) => Value::Int(evaluate(p, d)?),
            Invariant::Triple(p, r) => Value::Poly(triple_invariant_with(d, p, *r)?),
            Invariant::FlatTriple(p) => Value::Poly(flat_triple_invariant(d, p)?),
            Invariant::Intersection(a, b) => Value::Int(intersection_number(d, *a, *b)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdf::Perm;

    fn knot(s: &str) -> Diagram {
        Diagram::parse(s, Kind::Knotted).unwrap()
    }

    fn flat(s: &str) -> Diagram {
        Diagram::parse(s, Kind::Flat).unwrap()
    }

    #[test]
    fn affine_index_fixtures() {
        assert!(affine_index(&knot("(circle)")).unwrap().is_zero());
        assert!(affine_index(&knot("(circle) O1+ U1+")).unwrap().is_zero());
        assert!(affine_index(&knot("(circle) U1- O1-")).unwrap().is_zero());
        let tref = affine_index(&knot("(circle) O1+ O2+ U1+ U2+")).unwrap();
        assert_eq!(tref.to_string(), "t^-1 - 2 + t");
        assert!(affine_index(&knot("(line) O1+ U1+")).is_err());
        assert!(affine_index(&flat("(circle) 1+ 1+")).is_err());
    }

    #[test]
    fn flat_index_fixtures() {
        assert!(flat_index(&flat("(circle)")).unwrap().is_zero());
        assert!(flat_index(&flat("(circle) 1+ 1+")).unwrap().is_zero());
        let d = flat("(circle) 1+ 2- 1+ 2- 3+ 3+");
        assert_eq!(flat_index(&d).unwrap(), affine_index(&d.iota().unwrap()).unwrap());
    }

    #[test]
    fn mirror_inverts_t() {
        let d = knot("(circle) O1+ O2- U3+ U1+ O3+ U2-");
        assert_eq!(affine_index_with(&d, true).unwrap(), affine_index(&d).unwrap().mirror());
    }

    #[test]
    fn mu123_fixtures() {
        let borromean = knot("(circle) O1+ U5- O2- U6+ ; (circle) O4- U1+ O3+ U2- ; (circle) O5- U3+ O6+ U4-");
        assert_eq!(mu123(&borromean).unwrap().abs(), 1);
        assert_eq!(mu123(&knot("(circle) ; (circle) ; (circle)")).unwrap(), 0);
        assert_eq!(mu123(&knot("(circle) O1+ O2- ; (circle) U1+ U2- ; (circle)")).unwrap(), 0);
        assert!(mu123(&knot("(circle) O1+ U1+")).is_err());
    }

    #[test]
    fn triple_invariant_fixtures() {
        let mu = builtin_pattern("mu123", None).unwrap();
        assert!(triple_invariant(&knot("(line) O1+ O2+ U1+ U2+"), &mu).unwrap().is_zero());
        assert!(triple_invariant(&knot("(line) O1+ O2+ U2+ U1+"), &mu).unwrap().is_zero());
        assert!(triple_invariant(&knot("(circle) O1+ O2+ U2+ U1+"), &mu).is_err());
        let lk = builtin_pattern("lk", None).unwrap();
        assert!(triple_invariant(&knot("(line) O1+ O2+ U2+ U1+"), &lk).is_err());
        let nu = builtin_pattern("nu", Some(Perm::identity())).unwrap();
        assert!(flat_triple_invariant(&flat("(circle) 1+ 2+ 2+ 1+"), &nu).unwrap().is_zero());
        assert!(flat_triple_invariant(&flat("(line) 1+ 2+ 1+ 2+"), &nu).unwrap().is_zero());
    }

    // values from an independent list-surgery script
    #[test]
    fn eight_crossing_long_knot() {
        let d = knot("(line) U5- U3- O6- U2- U1- U8- O1- O3- O2- U4- O5- U7+ O4- O8- U6- O7+");
        let mu = builtin_pattern("mu123", None).unwrap();
        let nu = builtin_pattern("nu", Some(Perm::identity())).unwrap();
        let want_mu: LaurentPoly = [(0, -10), (1, 6), (2, 4)].into_iter().collect();
        let want_nu: LaurentPoly = [(-2, 2), (-1, 2), (0, -4), (1, -2), (2, 2)].into_iter().collect();
        assert_eq!(triple_invariant(&d, &mu).unwrap(), want_mu);
        assert_eq!(triple_invariant(&d, &nu).unwrap(), want_nu);
        assert!(triple_invariant_with(&d, &mu, Reading::Curve).unwrap().is_zero());
    }

    #[test]
    fn parallel_pairs_are_ordered_by_first_visit() {
        let d = knot("(line) O2+ O1+ U1+ O3- U3- U2+");
        let pairs = parallel_pairs(&d.canonical());
        assert_eq!(pairs, vec![(Label(1), Label(2)), (Label(1), Label(3)), (Label(2), Label(3))]);
    }
}
