//! Reduction of points and maps modulo a prime, with good-reduction
//! certificates and bad-prime enumeration.
//!
//! A map with primitive integer coefficients reduces coefficientwise mod p.
//! The reduction has degree 2 exactly when p does not divide the resultant
//! of the normalized coefficients; when the degree drops, the reduced forms
//! share a root and the common factor is divided out for diagnostics.
//!
//! Good reduction is certified on the given representative: `is_good_at`
//! answers whether the primitively-normalized coefficients have unit
//! resultant at p. That certificate is what every witness family here
//! satisfies; deciding the property across a whole conjugacy orbit is a
//! minimal-resultant problem out of scope for this crate.

use std::fmt;

use num_traits::Zero;

use crate::exactnum::{
    factor_integer, reduce_mod_p, valuation, Prime, PrimeFieldElem, PrimeSet,
};
use crate::projmap::{det4, ProjPoint, QuadMap};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Points over F_p
// ---------------------------------------------------------------------------

/// A point of the projective line over F_p, kept in the same canonical shape
/// as points over Q: either (x : 1) or (1 : 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModPoint {
    x: PrimeFieldElem,
    y: PrimeFieldElem,
}

impl ModPoint {
    pub fn new(x: PrimeFieldElem, y: PrimeFieldElem) -> Result<ModPoint> {
        if x.modulus().get() != y.modulus().get() {
            return Err(Error::ModulusMismatch(x.modulus().get(), y.modulus().get()));
        }
        if y.is_zero() {
            if x.is_zero() {
                return Err(Error::ZeroPoint);
            }
            Ok(ModPoint {
                x: PrimeFieldElem::one(x.modulus()),
                y,
            })
        } else {
            let inv = y.inverse().expect("nonzero element is invertible");
            Ok(ModPoint {
                x: x * inv,
                y: PrimeFieldElem::one(y.modulus()),
            })
        }
    }

    pub fn infinity(p: Prime) -> ModPoint {
        ModPoint {
            x: PrimeFieldElem::one(p),
            y: PrimeFieldElem::zero(p),
        }
    }

    pub fn x(self) -> PrimeFieldElem {
        self.x
    }

    pub fn y(self) -> PrimeFieldElem {
        self.y
    }

    pub fn modulus(self) -> Prime {
        self.x.modulus()
    }

    pub fn is_infinity(self) -> bool {
        self.y.is_zero()
    }

    /// All p + 1 points of the projective line over F_p.
    pub fn all(p: Prime) -> Vec<ModPoint> {
        let mut out: Vec<ModPoint> = (0..p.get())
            .map(|r| ModPoint {
                x: PrimeFieldElem::new(r, p),
                y: PrimeFieldElem::one(p),
            })
            .collect();
        out.push(ModPoint::infinity(p));
        out
    }
}

impl fmt::Display for ModPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{} mod {}",
            self.x.residue(),
            self.y.residue(),
            self.modulus()
        )
    }
}

// ---------------------------------------------------------------------------
// Forms over F_p
// ---------------------------------------------------------------------------

/// Binary quadratic form `c0 X^2 + c1 XY + c2 Y^2` over F_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModForm {
    pub c: [PrimeFieldElem; 3],
}

impl ModForm {
    pub fn eval(&self, x: PrimeFieldElem, y: PrimeFieldElem) -> PrimeFieldElem {
        self.c[0] * x * x + self.c[1] * x * y + self.c[2] * y * y
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    /// Multiplicity of P as a projective root (0, 1, or 2). Valid in every
    /// characteristic: the order-2 condition at a finite root x is the
    /// vanishing of the deflated factor, 2*c0*x + c1 computed in F_p.
    pub fn root_multiplicity(&self, p: ModPoint) -> u8 {
        let [c0, c1, _] = self.c;
        if p.is_infinity() {
            if !c0.is_zero() {
                0
            } else if !c1.is_zero() {
                1
            } else {
                2
            }
        } else {
            let x = p.x();
            if !self.eval(x, p.y()).is_zero() {
                0
            } else if (c0 * x + c0 * x + c1).is_zero() {
                2
            } else {
                1
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Reduced maps
// ---------------------------------------------------------------------------

/// The reduction of a quadratic map mod p: the two reduced forms plus the
/// degree of the induced map (2 exactly when the mod-p resultant is a unit,
/// smaller when the forms acquire a common factor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedMap {
    a: ModForm,
    b: ModForm,
    degree: u8,
    p: Prime,
}

/// Resultant of a pair of quadratic forms over F_p, as the same 4x4
/// determinant used over Q.
fn modform_resultant(a: &ModForm, b: &ModForm, p: Prime) -> PrimeFieldElem {
    let z = PrimeFieldElem::zero(p);
    let [a0, a1, a2] = a.c;
    let [b0, b1, b2] = b.c;
    det4(&[
        [a0, a1, a2, z],
        [z, a0, a1, a2],
        [b0, b1, b2, z],
        [z, b0, b1, b2],
    ])
}

/// Split off the power of Y dividing the form; returns (e, dense coefficients
/// of the dehomogenized cofactor, low -> high, exact degree 2 - e).
fn strip_y_power(form: &ModForm) -> (u8, Vec<PrimeFieldElem>) {
    let [c0, c1, c2] = form.c;
    if !c0.is_zero() {
        (0, vec![c2, c1, c0])
    } else if !c1.is_zero() {
        (1, vec![c2, c1])
    } else {
        (2, vec![c2])
    }
}

/// Degree of gcd of two nonzero polynomials over F_p given as dense
/// coefficient vectors with nonzero leading coefficient.
fn poly_gcd_degree(mut f: Vec<PrimeFieldElem>, mut g: Vec<PrimeFieldElem>) -> usize {
    let trim = |v: &mut Vec<PrimeFieldElem>| {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
    };
    loop {
        if g.is_empty() {
            return f.len() - 1;
        }
        // f mod g
        let lead = *g.last().unwrap();
        let lead_inv = lead.inverse().expect("trimmed leading coefficient");
        while f.len() >= g.len() {
            let k = f.len() - g.len();
            let factor = *f.last().unwrap() * lead_inv;
            for (i, gc) in g.iter().enumerate() {
                let t = f[i + k] - factor * *gc;
                f[i + k] = t;
            }
            trim(&mut f);
            if f.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
}

impl ReducedMap {
    pub fn form_a(&self) -> &ModForm {
        &self.a
    }

    pub fn form_b(&self) -> &ModForm {
        &self.b
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    /// Image of a point under the reduced map. Errors when both reduced
    /// forms vanish at P, which can only happen for degree < 2.
    pub fn evaluate(&self, point: ModPoint) -> Result<ModPoint> {
        let u = self.a.eval(point.x(), point.y());
        let v = self.b.eval(point.x(), point.y());
        if u.is_zero() && v.is_zero() {
            return Err(Error::DegenerateEvaluation);
        }
        ModPoint::new(u, v)
    }

    /// Local degree (ramification index) at P: the multiplicity of P in its
    /// own fiber. Multiplicity-based, hence valid in characteristic 2 where
    /// the Wronskian criterion degenerates.
    pub fn local_degree(&self, point: ModPoint) -> Result<u8> {
        let image = self.evaluate(point)?;
        let (u, v) = (image.x(), image.y());
        let fiber = ModForm {
            c: [
                v * self.a.c[0] - u * self.b.c[0],
                v * self.a.c[1] - u * self.b.c[1],
                v * self.a.c[2] - u * self.b.c[2],
            ],
        };
        if fiber.is_zero() {
            return Err(Error::DegenerateEvaluation);
        }
        Ok(fiber.root_multiplicity(point))
    }

    /// Wronskian of the reduced pair; detects critical points when p is odd
    /// but vanishes identically in characteristic 2.
    pub fn wronskian(&self) -> ModForm {
        let [a0, a1, a2] = self.a.c;
        let [b0, b1, b2] = self.b.c;
        let two = |x: PrimeFieldElem| x + x;
        ModForm {
            c: [
                two(a0 * b1 - a1 * b0),
                two(a0 * b2 - a2 * b0) + two(a0 * b2 - a2 * b0),
                two(a1 * b2 - a2 * b1),
            ],
        }
    }
}

impl fmt::Display for ReducedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{};{},{},{} mod {}; degree={}",
            self.a.c[0].residue(),
            self.a.c[1].residue(),
            self.a.c[2].residue(),
            self.b.c[0].residue(),
            self.b.c[1].residue(),
            self.b.c[2].residue(),
            self.p,
            self.degree
        )
    }
}

// ---------------------------------------------------------------------------
// Reduction operations
// ---------------------------------------------------------------------------

/// Reduce a rational point mod p: scale coordinates to be p-integral with at
/// least one p-unit, then reduce coordinatewise.
pub fn reduce_point(point: &ProjPoint, p: Prime) -> ModPoint {
    if point.is_infinity() {
        return ModPoint::infinity(p);
    }
    // Canonical input is (x : 1). If x is p-integral it reduces in place;
    // otherwise scaling by p^{-v(x)} turns the pair into (unit : p^k) with
    // k > 0, which reduces to the point at infinity.
    let x = point.x();
    if x.is_zero() || valuation(x, p).expect("nonzero") >= 0 {
        let xr = reduce_mod_p(x, p).expect("p-integral by the valuation check");
        ModPoint::new(xr, PrimeFieldElem::one(p)).expect("y = 1 is nonzero")
    } else {
        ModPoint::infinity(p)
    }
}

/// Reduce a map mod p: primitively normalize the six coefficients, reduce
/// them, and record the degree of the induced map.
pub fn reduce_map(phi: &QuadMap, p: Prime) -> ReducedMap {
    let norm = phi.normalize_primitive();
    let red = |c: &crate::exactnum::Rational| {
        reduce_mod_p(c, p).expect("primitive integer coefficients are p-integral")
    };
    let a = ModForm {
        c: [
            red(&norm.form_a().c[0]),
            red(&norm.form_a().c[1]),
            red(&norm.form_a().c[2]),
        ],
    };
    let b = ModForm {
        c: [
            red(&norm.form_b().c[0]),
            red(&norm.form_b().c[1]),
            red(&norm.form_b().c[2]),
        ],
    };
    let degree = if !modform_resultant(&a, &b, p).is_zero() {
        2
    } else if a.is_zero() || b.is_zero() {
        // One form died entirely; the image is a single point.
        0
    } else {
        let (ea, fa) = strip_y_power(&a);
        let (eb, fb) = strip_y_power(&b);
        let common = ea.min(eb) as usize + poly_gcd_degree(fa, fb);
        2 - common as u8
    };
    ReducedMap { a, b, degree, p }
}

/// Certificate of good reduction at p for the given representative:
/// p does not divide the resultant of the primitively normalized map.
pub fn is_good_at(phi: &QuadMap, p: Prime) -> bool {
    let res = phi.normalize_primitive().resultant();
    !reduce_mod_p(&res, p)
        .expect("normalized resultant is an integer")
        .is_zero()
}

/// All primes where the normalized representative has non-unit resultant.
pub fn bad_primes(phi: &QuadMap) -> PrimeSet {
    let res = phi.normalize_primitive().resultant();
    debug_assert!(res.is_integer());
    PrimeSet::from_primes(factor_integer(res.numer()).into_iter().map(|(p, _)| p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, rat_int};
    use crate::projmap::test_support::random_map;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    fn map(s: &str) -> QuadMap {
        s.parse().unwrap()
    }

    fn pt(s: &str) -> ProjPoint {
        s.parse().unwrap()
    }

    fn mod_pt(x: u64, y: u64, p: Prime) -> ModPoint {
        ModPoint::new(PrimeFieldElem::new(x, p), PrimeFieldElem::new(y, p)).unwrap()
    }

    #[test]
    fn reduce_point_examples() {
        // 1/2 is not 2-integral: scaling by 2 gives (1 : 2) -> (1 : 0).
        let p2 = prime(2);
        assert_eq!(
            reduce_point(&ProjPoint::new(rat(1, 2), rat_int(1)).unwrap(), p2),
            ModPoint::infinity(p2)
        );

        let p5 = prime(5);
        assert_eq!(
            reduce_point(&pt("3/5:1"), p5),
            ModPoint::infinity(p5)
        );
        // (3 : 5) = (3/5 : 1) over Q reduces the same way.
        assert_eq!(
            reduce_point(&ProjPoint::new(rat_int(3), rat_int(5)).unwrap(), p5),
            ModPoint::infinity(p5)
        );

        // (4 : 6) = (2/3 : 1); 2/3 = 2 * 3^{-1} = 2 * 5 = 10 = 3 mod 7.
        let p7 = prime(7);
        assert_eq!(
            reduce_point(&ProjPoint::new(rat_int(4), rat_int(6)).unwrap(), p7),
            mod_pt(3, 1, p7)
        );

        assert_eq!(reduce_point(&pt("1:0"), p5), ModPoint::infinity(p5));
        assert_eq!(reduce_point(&pt("12:1"), p5), mod_pt(2, 1, p5));
    }

    #[test]
    fn mod_point_canonicalization() {
        let p7 = prime(7);
        // (4 : 6) over F_7 normalized to y = 1: scale by 6^{-1} = 6.
        assert_eq!(mod_pt(4, 6, p7), mod_pt(3, 1, p7));
        assert_eq!(mod_pt(3, 0, p7), ModPoint::infinity(p7));
        assert!(ModPoint::new(
            PrimeFieldElem::zero(p7),
            PrimeFieldElem::zero(p7)
        )
        .is_err());
        assert_eq!(mod_pt(3, 1, p7).to_string(), "3:1 mod 7");
        assert_eq!(ModPoint::all(p7).len(), 8);
    }

    #[test]
    fn reduce_map_examples() {
        // (X^2+Y^2 : 15X^2+16Y^2) mod 3 -> (X^2+Y^2 : Y^2), degree 2.
        let rm = reduce_map(&map("1,0,1;15,0,16"), prime(3));
        assert_eq!(rm.degree(), 2);
        assert_eq!(rm.to_string(), "1,0,1;0,0,1 mod 3; degree=2");

        // (X^2+XY : XY+2Y^2) mod 2: forms X^2+XY and XY share the factor X.
        let rm = reduce_map(&map("1,1,0;0,1,2"), prime(2));
        assert_eq!(rm.degree(), 1);

        let rm = reduce_map(&map("1,1,0;0,1,2"), prime(5));
        assert_eq!(rm.degree(), 2);
    }

    #[test]
    fn reduce_map_degree_zero_cases() {
        // (7X^2 : Y^2) is primitive; mod 7 the first form dies.
        assert_eq!(reduce_map(&map("7,0,0;0,0,1"), prime(7)).degree(), 0);
        // (X^2 : X^2+7XY+7Y^2) mod 7: both reduce to X^2 - proportional,
        // common factor X^2.
        assert_eq!(reduce_map(&map("1,0,0;1,7,7"), prime(7)).degree(), 0);
    }

    #[test]
    fn reduced_degree_matches_brute_force_common_roots() {
        // degree = 2 iff p does not divide the normalized resultant iff the
        // reduced forms share no projective root over F_{p^2}. The last
        // condition is checked by brute force over the quadratic extension,
        // viewed as pairs (s, t) = s + t*w with a non-residue-free model:
        // we avoid modeling F_{p^2} here and instead check that a common
        // root exists iff the gcd computed by reduce_map is nontrivial,
        // via resultant over F_p and explicit factor search over F_p for
        // the linear-factor case.
        let mut rng = StdRng::seed_from_u64(30);
        for p in [2u64, 3, 5, 7, 11, 13] {
            let p = prime(p);
            for _ in 0..80 {
                let phi = random_map(&mut rng);
                let rm = reduce_map(&phi, p);
                let res = phi.normalize_primitive().resultant();
                let unit = !reduce_mod_p(&res, p).unwrap().is_zero();
                assert_eq!(rm.degree() == 2, unit);
                assert_eq!(is_good_at(&phi, p), unit);
                // F_p-rational common roots exist only when degree < 2.
                let common_rational = ModPoint::all(p).into_iter().any(|q| {
                    rm.form_a().eval(q.x(), q.y()).is_zero()
                        && rm.form_b().eval(q.x(), q.y()).is_zero()
                });
                if common_rational {
                    assert!(rm.degree() < 2);
                }
            }
        }
    }

    #[test]
    fn reduction_commutes_with_evaluation() {
        let mut rng = StdRng::seed_from_u64(31);
        for p in [2u64, 3, 5, 7, 13] {
            let p = prime(p);
            let mut done = 0;
            while done < 60 {
                let phi = random_map(&mut rng);
                let rm = reduce_map(&phi, p);
                if rm.degree() != 2 {
                    continue;
                }
                let num = rng.gen_range(-20i64..=20);
                let den = rng.gen_range(1i64..=10);
                let pt = ProjPoint::from_i64(num, den);
                let image = phi.evaluate(&pt);
                assert_eq!(
                    reduce_point(&image, p),
                    rm.evaluate(reduce_point(&pt, p)).unwrap()
                );
                done += 1;
            }
        }
    }

    #[test]
    fn bad_primes_examples() {
        assert_eq!(bad_primes(&map("2,0,1;15,0,8")), PrimeSet::empty());
        assert_eq!(
            bad_primes(&map("1,2,0;0,3,1")),
            PrimeSet::from_u64s(&[5]).unwrap()
        );
        assert_eq!(
            bad_primes(&map("1,1,0;0,1,2")),
            PrimeSet::from_u64s(&[2]).unwrap()
        );
        // Scaling and denominators do not change the answer.
        assert_eq!(
            bad_primes(&map("1/3,2/3,0;0,1,1/3")),
            bad_primes(&map("1,2,0;0,3,1"))
        );
    }

    #[test]
    fn good_at_examples() {
        assert!(!is_good_at(&map("1,2,0;0,3,1"), prime(5)));
        assert!(is_good_at(&map("1,2,0;0,3,1"), prime(3)));
        assert!(!is_good_at(&map("1,1,0;0,1,2"), prime(2)));
        // Unit resultant after normalization: good everywhere we check.
        for p in [2u64, 3, 5, 7, 11, 13, 101] {
            assert!(is_good_at(&map("2,0,1;15,0,8"), prime(p)));
        }
    }

    #[test]
    fn bad_primes_agree_with_goodness_certificates() {
        let mut rng = StdRng::seed_from_u64(32);
        for _ in 0..30 {
            let phi = random_map(&mut rng);
            let bad = bad_primes(&phi);
            for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
                let p = prime(p);
                assert_eq!(is_good_at(&phi, p), !bad.contains(p));
            }
        }
        // A unit-resultant map is good at every prime sampled.
        let phi = map("2,0,1;15,0,8");
        assert!(bad_primes(&phi).is_empty());
        for p in [2u64, 3, 5, 7, 11, 97, 65537] {
            assert!(is_good_at(&phi, prime(p)));
        }
    }

    #[test]
    fn local_degree_mod_p_matches_rational_local_degree_at_good_primes() {
        // For a degree-2 reduction, specializing the fiber commutes with
        // reduction, so the local degree can only grow; on random samples
        // where the rational local degree is 1 and the reduced Wronskian
        // is nonzero at the point, the mod-p local degree must stay 1.
        let mut rng = StdRng::seed_from_u64(33);
        for p in [3u64, 5, 7] {
            let p = prime(p);
            let mut done = 0;
            while done < 40 {
                let phi = random_map(&mut rng);
                let rm = reduce_map(&phi, p);
                if rm.degree() != 2 {
                    continue;
                }
                let q = ProjPoint::from_i64(rng.gen_range(-9i64..=9), 1);
                let qm = reduce_point(&q, p);
                let w = rm.wronskian();
                let ld = rm.local_degree(qm).unwrap();
                if phi.local_degree(&q) == 1 && !w.eval(qm.x(), qm.y()).is_zero() {
                    assert_eq!(ld, 1);
                }
                // Odd characteristic: Wronskian vanishing <=> ramified.
                assert_eq!(w.eval(qm.x(), qm.y()).is_zero(), ld == 2);
                done += 1;
            }
        }
    }

    #[test]
    fn wronskian_criterion_fails_gracefully_in_char_2() {
        // (X^2 : Y^2) mod 2: every point has local degree 2 but the
        // Wronskian vanishes identically, which is exactly why the
        // multiplicity definition is the one used over F_2.
        let p2 = prime(2);
        let rm = reduce_map(&map("1,0,0;0,0,1"), p2);
        assert_eq!(rm.degree(), 2);
        let w = rm.wronskian();
        assert!(w.is_zero());
        for q in ModPoint::all(p2) {
            assert_eq!(rm.local_degree(q).unwrap(), 2);
        }
    }

    #[test]
    fn local_degree_examples_mod_p() {
        let p5 = prime(5);
        let rm = reduce_map(&map("1,2,0;0,3,1"), p5);
        // Res = -5, so reduction at 5 is degenerate.
        assert_eq!(rm.degree(), 1);
        let rm = reduce_map(&map("1,2,0;0,3,1"), prime(7));
        assert_eq!(rm.degree(), 2);
        // (0:1) is fixed with multiplier 2 (a unit mod 7): unramified.
        let p7 = prime(7);
        assert_eq!(rm.local_degree(mod_pt(0, 1, p7)).unwrap(), 1);
    }

    #[test]
    fn display_formats() {
        let rm = reduce_map(&map("1,2,0;0,3,1"), prime(7));
        assert_eq!(rm.to_string(), "1,2,0;0,3,1 mod 7; degree=2");
        assert_eq!(rm.prime().get(), 7);
        assert_eq!(
            format!("{}", reduce_point(&pt("2/3:1"), prime(7))),
            "3:1 mod 7"
        );
    }

    #[test]
    fn reduce_map_ignores_scaling() {
        let mut rng = StdRng::seed_from_u64(34);
        for _ in 0..40 {
            let phi = random_map(&mut rng);
            let scaled = QuadMap::new(
                phi.form_a().scale(&rat(3, 7)),
                phi.form_b().scale(&rat(3, 7)),
            )
            .unwrap();
            for p in [2u64, 3, 5, 7] {
                let p = prime(p);
                assert_eq!(reduce_map(&phi, p), reduce_map(&scaled, p));
            }
            assert_eq!(bad_primes(&phi), bad_primes(&scaled));
        }
    }
}
