//! Multipliers and Milnor invariants of quadratic rational maps.
//!
//! A quadratic map has three fixed points counted with multiplicity, with
//! multipliers lambda_1, lambda_2, lambda_3. The elementary symmetric
//! functions sigma_1, sigma_2, sigma_3 of the multipliers are rational in the
//! coefficients even when the fixed points are not, and (sigma_1, sigma_2)
//! classifies the map up to conjugacy; sigma_3 = sigma_1 - 2 identically.
//!
//! The computation here never extracts a fixed point. Writing
//! `F(X,Y) = Y*A - X*B` and dehomogenizing to a cubic f(z), the multiplier
//! function `lambda(z) = (A'B - AB')/B^2` is inverted modulo f inside the
//! 3-dimensional algebra Q[z]/(f); traces of multiplication operators give
//! the power sums of the multipliers (with multiplicity — parabolic points
//! need no special casing), and Newton's identities recover the sigma_i.
//! When f degenerates below degree 3 (a fixed point sits at infinity with
//! top coefficient zero), the map is first conjugated by a shear; at most
//! three shears can fail, one per fixed point.

use num_traits::Zero;

use crate::exactnum::{rat_int, Rational};
use crate::projmap::{BinaryQuadForm, Mobius, ProjPoint, QuadMap};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Dense univariate polynomials over Q (internal)
// ---------------------------------------------------------------------------

/// Coefficients low -> high; normalized so the top coefficient is nonzero.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<Rational>);

impl Poly {
    fn new(mut coeffs: Vec<Rational>) -> Poly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly(coeffs)
    }

    fn zero() -> Poly {
        Poly(Vec::new())
    }

    fn constant(c: Rational) -> Poly {
        Poly::new(vec![c])
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    fn coeff(&self, i: usize) -> Rational {
        self.0.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    fn sub(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    fn scale(&self, t: &Rational) -> Poly {
        Poly::new(self.0.iter().map(|c| c * t).collect())
    }

    fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat_int(i as i64))
                .collect(),
        )
    }

    /// Exact Euclidean division; the divisor must be nonzero.
    fn divrem(&self, divisor: &Poly) -> (Poly, Poly) {
        let d = divisor.degree().expect("division by zero polynomial");
        let lead = divisor.0[d].clone();
        let mut rem = self.clone();
        let mut quot = vec![Rational::zero(); self.0.len().saturating_sub(d)];
        while let Some(r) = rem.degree() {
            if r < d {
                break;
            }
            let factor = &rem.0[r] / &lead;
            quot[r - d] = factor.clone();
            let mut shifted = vec![Rational::zero(); r - d];
            shifted.extend(divisor.0.iter().map(|c| c * &factor));
            rem = rem.sub(&Poly::new(shifted));
        }
        (Poly::new(quot), rem)
    }

    fn rem(&self, divisor: &Poly) -> Poly {
        self.divrem(divisor).1
    }

    /// Inverse of `self` modulo `f` via the extended Euclidean algorithm.
    /// Panics if the two are not coprime — callers are responsible for the
    /// coprimality invariant and it is a theorem at every call site here.
    fn inverse_mod(&self, f: &Poly) -> Poly {
        let (mut r0, mut r1) = (f.clone(), self.rem(f));
        let (mut t0, mut t1) = (Poly::zero(), Poly::constant(rat_int(1)));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let t = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            t0 = t1;
            t1 = t;
        }
        assert_eq!(r0.degree(), Some(0), "inverse_mod requires coprime inputs");
        let g_inv = rat_int(1) / r0.0[0].clone();
        t0.scale(&g_inv).rem(f)
    }
}

// ---------------------------------------------------------------------------
// Milnor points
// ---------------------------------------------------------------------------

/// The point (sigma_1, sigma_2) of the moduli plane, with sigma_3 carried
/// along as a consistency check (sigma_3 = sigma_1 - 2 always).
///
/// Serializes to JSON as `{"sigma1": "...", "sigma2": "...", "sigma3": "..."}`
/// with the canonical rational string in each slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilnorPoint {
    sigma1: Rational,
    sigma2: Rational,
    sigma3: Rational,
}

impl serde::Serialize for MilnorPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("MilnorPoint", 3)?;
        s.serialize_field("sigma1", &self.sigma1.to_string())?;
        s.serialize_field("sigma2", &self.sigma2.to_string())?;
        s.serialize_field("sigma3", &self.sigma3.to_string())?;
        s.end()
    }
}

impl MilnorPoint {
    pub fn new(sigma1: Rational, sigma2: Rational, sigma3: Rational) -> MilnorPoint {
        assert_eq!(
            sigma3,
            &sigma1 - rat_int(2),
            "sigma_3 must equal sigma_1 - 2"
        );
        MilnorPoint {
            sigma1,
            sigma2,
            sigma3,
        }
    }

    pub fn sigma1(&self) -> &Rational {
        &self.sigma1
    }

    pub fn sigma2(&self) -> &Rational {
        &self.sigma2
    }

    pub fn sigma3(&self) -> &Rational {
        &self.sigma3
    }

    /// Build from the three multipliers via the elementary symmetric functions.
    pub fn from_multipliers(l1: &Rational, l2: &Rational, l3: &Rational) -> MilnorPoint {
        MilnorPoint::new(
            l1 + l2 + l3,
            l1 * l2 + l1 * l3 + l2 * l3,
            l1 * l2 * l3,
        )
    }
}

// ---------------------------------------------------------------------------
// Fixed points and multipliers
// ---------------------------------------------------------------------------

/// Binary cubic form `c0 X^3 + c1 X^2 Y + c2 X Y^2 + c3 Y^3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryCubicForm {
    pub c: [Rational; 4],
}

impl BinaryCubicForm {
    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        &self.c[0] * x * x * x
            + &self.c[1] * x * x * y
            + &self.c[2] * x * y * y
            + &self.c[3] * y * y * y
    }
}

/// The cubic form `F = Y*A - X*B` whose projective roots are the fixed points.
pub fn fixed_point_form(phi: &QuadMap) -> BinaryCubicForm {
    let [a0, a1, a2] = &phi.form_a().c;
    let [b0, b1, b2] = &phi.form_b().c;
    let form = BinaryCubicForm {
        c: [-b0.clone(), a0 - b1, a1 - b2, a2.clone()],
    };
    // F == 0 would force A = zX*B/Y identically, contradicting Res != 0.
    assert!(
        form.c.iter().any(|c| !c.is_zero()),
        "fixed-point form of a nondegenerate map cannot vanish"
    );
    form
}

/// Multiplier of `phi` at a fixed point P, i.e. the derivative of the map in
/// an affine chart where P is finite. Errors if P is not fixed.
pub fn multiplier(phi: &QuadMap, p: &ProjPoint) -> Result<Rational> {
    if &phi.evaluate(p) != p {
        return Err(Error::PointNotFixed);
    }
    let [a0, a1, a2] = &phi.form_a().c;
    let [b0, b1, b2] = &phi.form_b().c;
    if p.is_infinity() {
        // Chart w = Y/X; the map is w -> B(1,w)/A(1,w) and w = 0 is fixed,
        // so b0 = 0 and the derivative there is b1/a0.
        debug_assert!(b0.is_zero());
        Ok(b1 / a0)
    } else {
        // Finite chart z = X/Y: lambda = (A'B - AB')/B^2 at z = x.
        let x = p.x();
        let a = a0 * x * x + a1 * x + a2;
        let b = b0 * x * x + b1 * x + b2;
        let two = rat_int(2);
        let a_prime = &two * a0 * x + a1;
        let b_prime = &two * b0 * x + b1;
        debug_assert!(!b.is_zero(), "B cannot vanish at a finite fixed point");
        Ok((a_prime * &b - a * b_prime) / (&b * &b))
    }
}

// ---------------------------------------------------------------------------
// sigma invariants by traces in Q[z]/(f)
// ---------------------------------------------------------------------------

/// Milnor invariants (sigma_1, sigma_2, sigma_3) of the three fixed-point
/// multipliers, computed exactly with no root extraction.
pub fn sigma_invariants(phi: &QuadMap) -> MilnorPoint {
    // Need the dehomogenized fixed-point cubic to have honest degree 3,
    // which fails exactly when (1:0) is fixed (b0 = 0). Conjugating by the
    // shear (X : kX+Y) moves (1:k) to infinity, and at most three k hit a
    // fixed point.
    let working;
    let phi = if !phi.form_b().c[0].is_zero() {
        phi
    } else {
        let mut chosen = None;
        for k in 1..=4i64 {
            let candidate = phi.conjugate(&Mobius::shear(k));
            if !candidate.form_b().c[0].is_zero() {
                chosen = Some(candidate);
                break;
            }
        }
        working = chosen.expect("a quadratic map has at most three fixed points");
        &working
    };

    let [a0, a1, a2] = &phi.form_a().c;
    let [b0, b1, b2] = &phi.form_b().c;

    // f(z) = A(z,1) - z B(z,1), made monic (same quotient algebra).
    let f = {
        let lead = -b0.clone();
        Poly::new(vec![
            a2 / &lead,
            (a1 - b2) / &lead,
            (a0 - b1) / &lead,
            rat_int(1),
        ])
    };
    let a_poly = Poly::new(vec![a2.clone(), a1.clone(), a0.clone()]);
    let b_poly = Poly::new(vec![b2.clone(), b1.clone(), b0.clone()]);

    // lambda = (A'B - AB') / B^2 as an element of Q[z]/(f). B is invertible
    // mod f: a common root of B and f would be a common root of A and B,
    // impossible with nonzero resultant.
    let num = a_poly.derivative().mul(&b_poly).sub(&a_poly.mul(&b_poly.derivative()));
    let den = b_poly.mul(&b_poly);
    let m = num.rem(&f).mul(&den.rem(&f).inverse_mod(&f)).rem(&f);

    // Traces of multiplication operators on the basis {1, z, z^2}: for
    // monic f = z^3 + c2 z^2 + c1 z + c0 the power sums of the roots are
    // p1 = -c2, p2 = c2^2 - 2 c1, and tr(g) = 3 g0 + g1 p1 + g2 p2.
    let c2 = f.coeff(2);
    let c1 = f.coeff(1);
    let p1 = -&c2;
    let p2 = &c2 * &c2 - rat_int(2) * &c1;
    let trace = |g: &Poly| -> Rational {
        rat_int(3) * g.coeff(0) + g.coeff(1) * &p1 + g.coeff(2) * &p2
    };

    let m2 = m.mul(&m).rem(&f);
    let m3 = m2.mul(&m).rem(&f);
    let t1 = trace(&m);
    let t2 = trace(&m2);
    let t3 = trace(&m3);

    // Newton's identities for three values.
    let e1 = t1.clone();
    let e2 = (&t1 * &t1 - &t2) / rat_int(2);
    let e3 = (&t1 * &t1 * &t1 - rat_int(3) * &t1 * &t2 + rat_int(2) * &t3) / rat_int(6);
    MilnorPoint::new(e1, e2, e3)
}

// ---------------------------------------------------------------------------
// Closed forms for (a X^2 + b Y^2 : c X^2 + d Y^2)
// ---------------------------------------------------------------------------

/// The two auxiliary quantities attached to `(a X^2 + b Y^2 : c X^2 + d Y^2)`;
/// only defined when ad - bc is nonzero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CpnfInvariants {
    /// A = ad / (ad - bc).
    pub a: Rational,
    /// Sigma = (a^3 b + c d^3) / (ad - bc)^2.
    pub sigma: Rational,
}

/// Closed-form invariants of `(a X^2 + b Y^2 : c X^2 + d Y^2)`:
/// sigma_1 = 8A - 6 and sigma_2 = 8A^2 - 20A + 4 Sigma + 12.
/// Requires ad - bc nonzero (the resultant of the form pair is its square).
pub fn cpnf_invariants(
    a: &Rational,
    b: &Rational,
    c: &Rational,
    d: &Rational,
) -> Result<(CpnfInvariants, MilnorPoint)> {
    let det = a * d - b * c;
    if det.is_zero() {
        return Err(Error::DegenerateNormalForm);
    }
    let cap_a = a * d / &det;
    let cap_sigma = (a * a * a * b + c * d * d * d) / (&det * &det);
    let sigma1 = rat_int(8) * &cap_a - rat_int(6);
    let sigma2 = rat_int(8) * &cap_a * &cap_a - rat_int(20) * &cap_a
        + rat_int(4) * &cap_sigma
        + rat_int(12);
    let sigma3 = &sigma1 - rat_int(2);
    Ok((
        CpnfInvariants {
            a: cap_a,
            sigma: cap_sigma,
        },
        MilnorPoint::new(sigma1, sigma2, sigma3),
    ))
}

/// The map `(X^2 + l1 XY : l2 XY + Y^2)`, which fixes (0:1) and (1:0) with
/// multipliers l1 and l2; its resultant is 1 - l1 l2.
pub fn fixed_point_normal_form(l1: &Rational, l2: &Rational) -> Result<QuadMap> {
    QuadMap::new(
        BinaryQuadForm::new(rat_int(1), l1.clone(), rat_int(0)),
        BinaryQuadForm::new(rat_int(0), l2.clone(), rat_int(1)),
    )
}

/// Third multiplier of the two-parameter form: (2 - l1 - l2)/(1 - l1 l2).
pub fn third_multiplier(l1: &Rational, l2: &Rational) -> Result<Rational> {
    let denom = rat_int(1) - l1 * l2;
    if denom.is_zero() {
        return Err(Error::DegenerateNormalForm);
    }
    Ok((rat_int(2) - l1 - l2) / denom)
}
