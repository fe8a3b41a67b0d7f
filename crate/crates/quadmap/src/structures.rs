//! Quadratic maps carrying marked-point structure: a pair of distinct
//! unramified rational fixed points, or an unramified rational 2-cycle.
//!
//! Both structures admit a normal form after moving the marked points to
//! (1:0) and (0:1): `(X^2 + aXY : bXY + cY^2)` for fixed pairs and
//! `(aXY + bY^2 : X^2 + cXY)` for 2-cycles. The only automorphisms fixing
//! both marked points are the diagonal scalings, so a triple's residual data
//! is the coefficient vector (a, b, c) up to a one-parameter action — which
//! is what makes per-prime good reduction of the *structure* decidable by a
//! closed valuation criterion on (a, b, c).
//!
//! Watch the renormalization when deriving those criteria. For fixed pairs,
//! conjugating by diag(alpha, 1) and rescaling the first form monic gives
//! (a, b, c) -> (a/alpha, b, c/alpha). For 2-cycles the rescaling divides by
//! alpha^2, giving (a, b, c) -> (a/alpha^2, b/alpha^3, c/alpha) — the
//! exponents (2, 3, 1) are easy to get wrong and change which triples count
//! as good, e.g. (9, 54, 3) at p = 3 is good precisely because of the cubed
//! denominator. Both actions are pinned against the generic conjugation
//! pipeline in the tests.

use std::fmt;

use num_traits::Zero;

use crate::exactnum::{valuation, Prime, Rational};
use crate::projmap::{Mobius, ProjPoint, QuadMap};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Validated triples
// ---------------------------------------------------------------------------

/// A map with two distinct rational fixed points, both unramified.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPairTriple {
    map: QuadMap,
    p1: ProjPoint,
    p2: ProjPoint,
}

/// A map with a rational 2-cycle P1 <-> P2, both points unramified.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoCycleTriple {
    map: QuadMap,
    p1: ProjPoint,
    p2: ProjPoint,
}

/// Check the four clauses of the fixed-pair structure, reporting the first
/// violated one: distinctness, fixedness of each point, unramifiedness of
/// each point.
pub fn validate_fixed_pair(
    phi: &QuadMap,
    p1: &ProjPoint,
    p2: &ProjPoint,
) -> Result<FixedPairTriple> {
    if p1 == p2 {
        return Err(Error::PointsEqual);
    }
    if &phi.evaluate(p1) != p1 {
        return Err(Error::NotFixed(1));
    }
    if &phi.evaluate(p2) != p2 {
        return Err(Error::NotFixed(2));
    }
    if phi.local_degree(p1) != 1 {
        return Err(Error::Ramified(1));
    }
    if phi.local_degree(p2) != 1 {
        return Err(Error::Ramified(2));
    }
    Ok(FixedPairTriple {
        map: phi.clone(),
        p1: p1.clone(),
        p2: p2.clone(),
    })
}

/// Check the 2-cycle structure: distinct points swapped by the map, both
/// unramified.
pub fn validate_two_cycle(
    phi: &QuadMap,
    p1: &ProjPoint,
    p2: &ProjPoint,
) -> Result<TwoCycleTriple> {
    if p1 == p2 {
        return Err(Error::PointsEqual);
    }
    if &phi.evaluate(p1) != p2 || &phi.evaluate(p2) != p1 {
        return Err(Error::NotTwoCycle);
    }
    if phi.local_degree(p1) != 1 {
        return Err(Error::Ramified(1));
    }
    if phi.local_degree(p2) != 1 {
        return Err(Error::Ramified(2));
    }
    Ok(TwoCycleTriple {
        map: phi.clone(),
        p1: p1.clone(),
        p2: p2.clone(),
    })
}

impl FixedPairTriple {
    pub fn map(&self) -> &QuadMap {
        &self.map
    }

    pub fn p1(&self) -> &ProjPoint {
        &self.p1
    }

    pub fn p2(&self) -> &ProjPoint {
        &self.p2
    }

    /// Conjugate the whole structure: the map by f, the marked points by
    /// f^{-1}. The structure survives conjugation, so revalidation cannot
    /// fail on a valid input.
    pub fn conjugate(&self, f: &Mobius) -> FixedPairTriple {
        validate_fixed_pair(
            &self.map.conjugate(f),
            &f.apply_inverse(&self.p1),
            &f.apply_inverse(&self.p2),
        )
        .expect("conjugation preserves the fixed-pair structure")
    }
}

impl TwoCycleTriple {
    pub fn map(&self) -> &QuadMap {
        &self.map
    }

    pub fn p1(&self) -> &ProjPoint {
        &self.p1
    }

    pub fn p2(&self) -> &ProjPoint {
        &self.p2
    }

    pub fn conjugate(&self, f: &Mobius) -> TwoCycleTriple {
        validate_two_cycle(
            &self.map.conjugate(f),
            &f.apply_inverse(&self.p1),
            &f.apply_inverse(&self.p2),
        )
        .expect("conjugation preserves the 2-cycle structure")
    }
}

impl fmt::Display for FixedPairTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};P1={};P2={}", self.map, self.p1, self.p2)
    }
}

impl fmt::Display for TwoCycleTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};P1={};P2={}", self.map, self.p1, self.p2)
    }
}

// ---------------------------------------------------------------------------
// Normal forms
// ---------------------------------------------------------------------------

/// Coefficients of `(X^2 + aXY : bXY + cY^2)` with marked points (1:0), (0:1).
/// All of a, b, c are nonzero (a and b express unramifiedness of the marked
/// points, c divides the resultant) and the resultant c(c - ab) is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPairNormalForm {
    a: Rational,
    b: Rational,
    c: Rational,
}

/// Coefficients of `(aXY + bY^2 : X^2 + cXY)` with P1 = (1:0) -> (0:1) -> P1.
/// All of a, b, c are nonzero (a, c express unramifiedness, b divides the
/// resultant) and the resultant b(b - ac) is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCycleNormalForm {
    a: Rational,
    b: Rational,
    c: Rational,
}

impl FixedPairNormalForm {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<FixedPairNormalForm> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidParameter(
                "marked fixed points are ramified when a or b vanishes".into(),
            ));
        }
        if c.is_zero() || (&c - &a * &b).is_zero() {
            return Err(Error::InvalidParameter(
                "c(c - ab) must be nonzero".into(),
            ));
        }
        Ok(FixedPairNormalForm { a, b, c })
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> FixedPairNormalForm {
        use crate::exactnum::rat_int;
        FixedPairNormalForm::new(rat_int(a), rat_int(b), rat_int(c)).unwrap()
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    /// The represented map (X^2 + aXY : bXY + cY^2).
    pub fn to_map(&self) -> QuadMap {
        use crate::exactnum::rat_int;
        use crate::projmap::BinaryQuadForm;
        QuadMap::new(
            BinaryQuadForm::new(rat_int(1), self.a.clone(), rat_int(0)),
            BinaryQuadForm::new(rat_int(0), self.b.clone(), self.c.clone()),
        )
        .expect("nonzero resultant c(c - ab)")
    }

    /// The represented triple with marked points (1:0) and (0:1).
    pub fn to_triple(&self) -> FixedPairTriple {
        validate_fixed_pair(&self.to_map(), &ProjPoint::infinity(), &ProjPoint::from_i64(0, 1))
            .expect("normal-form coefficients satisfy the structure")
    }
}

impl TwoCycleNormalForm {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<TwoCycleNormalForm> {
        if a.is_zero() || c.is_zero() {
            return Err(Error::InvalidParameter(
                "marked cycle points are ramified when a or c vanishes".into(),
            ));
        }
        if b.is_zero() || (&b - &a * &c).is_zero() {
            return Err(Error::InvalidParameter(
                "b(b - ac) must be nonzero".into(),
            ));
        }
        Ok(TwoCycleNormalForm { a, b, c })
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> TwoCycleNormalForm {
        use crate::exactnum::rat_int;
        TwoCycleNormalForm::new(rat_int(a), rat_int(b), rat_int(c)).unwrap()
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    /// The represented map (aXY + bY^2 : X^2 + cXY).
    pub fn to_map(&self) -> QuadMap {
        use crate::exactnum::rat_int;
        use crate::projmap::BinaryQuadForm;
        QuadMap::new(
            BinaryQuadForm::new(rat_int(0), self.a.clone(), self.b.clone()),
            BinaryQuadForm::new(rat_int(1), self.c.clone(), rat_int(0)),
        )
        .expect("nonzero resultant b(b - ac)")
    }

    /// The represented triple with marked points (1:0) and (0:1).
    pub fn to_triple(&self) -> TwoCycleTriple {
        validate_two_cycle(&self.to_map(), &ProjPoint::infinity(), &ProjPoint::from_i64(0, 1))
            .expect("normal-form coefficients satisfy the structure")
    }
}

impl fmt::Display for FixedPairNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

impl fmt::Display for TwoCycleNormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.a, self.b, self.c)
    }
}

/// Move the marked points to (1:0) and (0:1) and scale the first form monic.
/// Returns the normal form and the Mobius f used, so the input triple is
/// recovered by conjugating the normalized triple with f^{-1}.
pub fn fixed_pair_normal_form(
    triple: &FixedPairTriple,
) -> (FixedPairNormalForm, Mobius) {
    let f = Mobius::from_columns(&triple.p1, &triple.p2)
        .expect("marked points are distinct");
    let moved = triple.conjugate(&f);
    let a_form = moved.map().form_a();
    let b_form = moved.map().form_b();
    // With (1:0) and (0:1) both fixed, the corner coefficients vanish.
    assert!(b_form.c[0].is_zero() && a_form.c[2].is_zero());
    let lead = &a_form.c[0];
    let nf = FixedPairNormalForm::new(
        &a_form.c[1] / lead,
        &b_form.c[1] / lead,
        &b_form.c[2] / lead,
    )
    .expect("validated triple yields nonzero a, b, c(c - ab)");
    (nf, f)
}

/// Move the cycle to (1:0) -> (0:1) -> (1:0) and scale the second form monic.
pub fn two_cycle_normal_form(triple: &TwoCycleTriple) -> (TwoCycleNormalForm, Mobius) {
    let f = Mobius::from_columns(&triple.p1, &triple.p2)
        .expect("marked points are distinct");
    let moved = triple.conjugate(&f);
    let a_form = moved.map().form_a();
    let b_form = moved.map().form_b();
    // (1:0) -> (0:1) kills a0; (0:1) -> (1:0) kills b2.
    assert!(a_form.c[0].is_zero() && b_form.c[2].is_zero());
    let lead = &b_form.c[0];
    let nf = TwoCycleNormalForm::new(
        &a_form.c[1] / lead,
        &a_form.c[2] / lead,
        &b_form.c[1] / lead,
    )
    .expect("validated cycle yields nonzero a, c, b(b - ac)");
    (nf, f)
}

// ---------------------------------------------------------------------------
// Invariants and per-prime goodness
// ---------------------------------------------------------------------------

/// ab/c — constant on the diagonal orbit of a fixed-pair normal form, hence
/// an invariant of the structured conjugacy class.
pub fn u_invariant(nf: &FixedPairNormalForm) -> Rational {
    &nf.a * &nf.b / &nf.c
}

/// ac/b — the corresponding invariant for 2-cycle normal forms.
pub fn cycle_invariant(nf: &TwoCycleNormalForm) -> Rational {
    &nf.a * &nf.c / &nf.b
}

/// Does some diagonal rescaling of the fixed-pair form have good reduction
/// at p with both marked points unramified?
///
/// The action (a, b, c) -> (a/alpha, b, c/alpha) leaves b alone and shifts
/// v_p(a), v_p(c), v_p(c - ab) in lockstep, so goodness holds exactly when
/// v_p(b) = 0 and v_p(a) = v_p(c) = v_p(c - ab).
pub fn triple_good_at(nf: &FixedPairNormalForm, p: Prime) -> bool {
    let va = valuation(&nf.a, p).expect("a is nonzero");
    let vb = valuation(&nf.b, p).expect("b is nonzero");
    let vc = valuation(&nf.c, p).expect("c is nonzero");
    let vres = valuation(&(&nf.c - &nf.a * &nf.b), p).expect("c - ab is nonzero");
    vb == 0 && va == vc && vc == vres
}

/// The 2-cycle analogue. Here the action is (a, b, c) -> (a/a^2 ... see the
/// module docs: (a/alpha^2, b/alpha^3, c/alpha), so with s = v_p(c) the
/// scaled triple is simultaneously p-unital exactly when v_p(a) = 2s,
/// v_p(b) = 3s, and v_p(b - ac) = 3s.
pub fn cycle_good_at(nf: &TwoCycleNormalForm, p: Prime) -> bool {
    let va = valuation(&nf.a, p).expect("a is nonzero");
    let vb = valuation(&nf.b, p).expect("b is nonzero");
    let vc = valuation(&nf.c, p).expect("c is nonzero");
    let vres = valuation(&(&nf.b - &nf.a * &nf.c), p).expect("b - ac is nonzero");
    va == 2 * vc && vb == 3 * vc && vres == 3 * vc
}
