//! Explicit witness families: for each prime p and integer N, a list of N
//! maps with unit resultant whose Milnor invariants all share one sigma_1
//! value while their sigma_2 values stay pairwise distinct — a computable
//! witness that everywhere-good-reduction classes pile up on a single line —
//! plus a two-parameter family with prescribed fixed-point multipliers whose
//! image sweeps out explicit lines in the (sigma_1, sigma_2)-plane.
//!
//! Every closed form here is cross-checked against the trace-based
//! `sigma_invariants` pipeline, which shares no code path with these
//! formulas.

use num_traits::Zero;
use serde::ser::{Serialize, SerializeMap, SerializeSeq, Serializer};

use crate::exactnum::{rat_int, Prime, PrimeSet, Rational};
use crate::invariants::{fixed_point_normal_form, sigma_invariants, MilnorPoint};
use crate::projmap::QuadMap;
use crate::reduction::bad_primes;
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// The one-parameter-per-n family with unit resultant
// ---------------------------------------------------------------------------

/// The N maps `(p^n X^2 + Y^2 : (p^{2N} - 1) X^2 + p^{2N-n} Y^2)` for
/// 0 <= n <= N-1. Each has ad - bc = 1 (asserted), hence resultant 1 and
/// good reduction at every prime.
pub fn cpnf_family(p: Prime, cap_n: u32) -> Result<Vec<QuadMap>> {
    if cap_n < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    let two_n = 2 * cap_n as i64;
    let p2n = p.pow_rational(two_n);
    let mut maps = Vec::with_capacity(cap_n as usize);
    for n in 0..cap_n as i64 {
        let a = p.pow_rational(n);
        let b = rat_int(1);
        let c = &p2n - rat_int(1);
        let d = p.pow_rational(two_n - n);
        assert_eq!(&a * &d - &b * &c, rat_int(1), "family determinant must be 1");
        let phi = QuadMap::from_forms_i64_free(a, b, c, d);
        maps.push(phi);
    }
    Ok(maps)
}

impl QuadMap {
    /// `(a X^2 + b Y^2 : c X^2 + d Y^2)` with ad - bc != 0.
    fn from_forms_i64_free(a: Rational, b: Rational, c: Rational, d: Rational) -> QuadMap {
        use crate::projmap::BinaryQuadForm;
        QuadMap::new(
            BinaryQuadForm::new(a, Rational::zero(), b),
            BinaryQuadForm::new(c, Rational::zero(), d),
        )
        .expect("nonzero determinant gives nonzero resultant")
    }
}

/// Closed-form Milnor invariants of the family member (p, N, n):
/// sigma_1 = 8 p^{2N} - 6 and
/// sigma_2 = 8 p^{4N} - 20 p^{2N} + 4 (p^{3n} + (p^{2N} - 1) p^{6N - 3n}) + 12.
pub fn family_sigma_closed(p: Prime, cap_n: u32, n: u32) -> Result<MilnorPoint> {
    if cap_n < 1 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if n >= cap_n {
        return Err(Error::InvalidParameter(format!(
            "n must satisfy 0 <= n <= N-1, got n={n}, N={cap_n}"
        )));
    }
    let nn = n as i64;
    let big_n = cap_n as i64;
    let p2n = p.pow_rational(2 * big_n);
    let sigma = p.pow_rational(3 * nn) + (&p2n - rat_int(1)) * p.pow_rational(6 * big_n - 3 * nn);
    let sigma1 = rat_int(8) * &p2n - rat_int(6);
    let sigma2 = rat_int(8) * p.pow_rational(4 * big_n) - rat_int(20) * &p2n
        + rat_int(4) * sigma
        + rat_int(12);
    let sigma3 = &sigma1 - rat_int(2);
    Ok(MilnorPoint::new(sigma1, sigma2, sigma3))
}

// ---------------------------------------------------------------------------
// The two-parameter family with prescribed multipliers
// ---------------------------------------------------------------------------

/// The map `(X^2 + alpha XY : ((1 - beta)/alpha) XY + Y^2)`, which fixes
/// (0:1) and (1:0) with multipliers alpha and (1 - beta)/alpha, and has
/// resultant exactly beta (asserted). Errors when alpha or beta is zero.
pub fn fpnf_map(alpha: &Rational, beta: &Rational) -> Result<QuadMap> {
    if alpha.is_zero() {
        return Err(Error::InvalidParameter("alpha must be nonzero".into()));
    }
    if beta.is_zero() {
        return Err(Error::InvalidParameter("beta must be nonzero".into()));
    }
    let l2 = (rat_int(1) - beta) / alpha;
    let phi = fixed_point_normal_form(alpha, &l2)?;
    assert_eq!(&phi.resultant(), beta, "resultant of the family member");
    Ok(phi)
}

// ---------------------------------------------------------------------------
// Density witness report
// ---------------------------------------------------------------------------

/// One family member's row in a [`DensityWitness`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityRow {
    pub n: u32,
    pub sigma2: Rational,
    /// Always empty: each member has resultant 1.
    pub bad_primes: PrimeSet,
}

/// Verified table for the family at (p, N): all N members share
/// sigma_1 = 8 p^{2N} - 6, their sigma_2 values are pairwise distinct, every
/// member has empty bad-prime set, and the closed-form invariants agree with
/// the trace-based pipeline. Construction fails if any of that is violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityWitness {
    pub p: Prime,
    pub cap_n: u32,
    pub sigma1: Rational,
    pub rows: Vec<DensityRow>,
}

impl Serialize for DensityWitness {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        struct Rows<'a>(&'a [DensityRow]);
        struct Row<'a>(&'a DensityRow);
        struct Primes<'a>(&'a PrimeSet);
        impl Serialize for Primes<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for p in self.0.iter() {
                    seq.serialize_element(&p.get())?;
                }
                seq.end()
            }
        }
        impl Serialize for Row<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut m = serializer.serialize_map(Some(3))?;
                m.serialize_entry("n", &self.0.n)?;
                m.serialize_entry("sigma2", &self.0.sigma2.to_string())?;
                m.serialize_entry("bad_primes", &Primes(&self.0.bad_primes))?;
                m.end()
            }
        }
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(
                &self,
                serializer: S,
            ) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = serializer.serialize_seq(Some(self.0.len()))?;
                for r in self.0 {
                    seq.serialize_element(&Row(r))?;
                }
                seq.end()
            }
        }
        let mut m = serializer.serialize_map(Some(4))?;
        m.serialize_entry("p", &self.p.get())?;
        m.serialize_entry("N", &self.cap_n)?;
        m.serialize_entry("sigma1", &self.sigma1.to_string())?;
        m.serialize_entry("rows", &Rows(&self.rows))?;
        m.end()
    }
}

/// Compute the family at (p, N) through the trace pipeline, verify every
/// claimed property, and return the table. Any failed check is an error,
/// never a silently wrong table.
pub fn density_witness(p: Prime, cap_n: u32) -> Result<DensityWitness> {
    let members = cpnf_family(p, cap_n)?;
    let expected_sigma1 = rat_int(8) * p.pow_rational(2 * cap_n as i64) - rat_int(6);
    let mut rows: Vec<DensityRow> = Vec::with_capacity(members.len());
    for (n, phi) in members.iter().enumerate() {
        let traced = sigma_invariants(phi);
        let closed = family_sigma_closed(p, cap_n, n as u32)?;
        if traced != closed {
            return Err(Error::WitnessFailure(format!(
                "closed-form invariants disagree with the trace pipeline at n={n}"
            )));
        }
        if traced.sigma1() != &expected_sigma1 {
            return Err(Error::WitnessFailure(format!(
                "sigma1 at n={n} is {}, expected {}",
                traced.sigma1(),
                expected_sigma1
            )));
        }
        let bad = bad_primes(phi);
        if !bad.is_empty() {
            return Err(Error::WitnessFailure(format!(
                "member n={n} has nonempty bad-prime set {bad}"
            )));
        }
        if rows.iter().any(|r| r.sigma2 == *traced.sigma2()) {
            return Err(Error::WitnessFailure(format!(
                "sigma2 at n={n} repeats an earlier value"
            )));
        }
        rows.push(DensityRow {
            n: n as u32,
            sigma2: traced.sigma2().clone(),
            bad_primes: bad,
        });
    }
    Ok(DensityWitness {
        p,
        cap_n,
        sigma1: expected_sigma1,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Line membership for the two-parameter family
// ---------------------------------------------------------------------------

/// Verified statement that the invariants of `fpnf_map(alpha, z)` satisfy the
/// linear relation attached to alpha: 2 sigma_1 - sigma_2 = 3 when alpha = 1,
/// and 2 sigma_1 + sigma_2 = 1 when alpha = -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineMembership {
    pub alpha: Rational,
    pub z: Rational,
    pub point: MilnorPoint,
    /// The relation that was verified, as human-readable text.
    pub relation: String,
}

/// Compute the invariants of `fpnf_map(alpha, z)` for alpha in {1, -1} and
/// verify the corresponding line equation exactly.
pub fn line_membership(alpha: &Rational, z: &Rational) -> Result<LineMembership> {
    let one = rat_int(1);
    if alpha != &one && alpha != &rat_int(-1) {
        return Err(Error::InvalidParameter("alpha must be 1 or -1".into()));
    }
    if z.is_zero() {
        return Err(Error::InvalidParameter("z must be nonzero".into()));
    }
    let phi = fpnf_map(alpha, z)?;
    let point = sigma_invariants(&phi);
    let (lhs, rhs, relation) = if alpha == &one {
        (
            rat_int(2) * point.sigma1() - point.sigma2(),
            rat_int(3),
            "2*sigma1 - sigma2 = 3",
        )
    } else {
        (
            rat_int(2) * point.sigma1() + point.sigma2(),
            rat_int(1),
            "2*sigma1 + sigma2 = 1",
        )
    };
    if lhs != rhs {
        return Err(Error::WitnessFailure(format!(
            "line relation failed at alpha={alpha}, z={z}: lhs={lhs}"
        )));
    }
    Ok(LineMembership {
        alpha: alpha.clone(),
        z: z.clone(),
        point,
        relation: relation.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{rat, valuation};
    use crate::invariants::cpnf_invariants;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    #[test]
    fn family_members_match_pinned_formulas() {
        let f = cpnf_family(prime(2), 1).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].to_string(), "1,0,1;3,0,4");

        let f = cpnf_family(prime(2), 2).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0].to_string(), "1,0,1;15,0,16");
        assert_eq!(f[1].to_string(), "2,0,1;15,0,8");

        let f = cpnf_family(prime(3), 1).unwrap();
        assert_eq!(f[0].to_string(), "1,0,1;8,0,9");

        assert!(matches!(
            cpnf_family(prime(2), 0),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn closed_sigma_matches_pinned_values() {
        let m = family_sigma_closed(prime(2), 1, 0).unwrap();
        assert_eq!(m.sigma1(), &rat_int(26));
        assert_eq!(m.sigma2(), &rat_int(832));
        assert_eq!(m.sigma3(), &rat_int(24));

        let m = family_sigma_closed(prime(2), 2, 0).unwrap();
        assert_eq!(m.sigma1(), &rat_int(122));
        assert_eq!(m.sigma2(), &rat_int(247504));

        let m = family_sigma_closed(prime(2), 2, 1).unwrap();
        assert_eq!(m.sigma1(), &rat_int(122));
        assert_eq!(m.sigma2(), &rat_int(32492));

        let m = family_sigma_closed(prime(3), 1, 0).unwrap();
        assert_eq!(m.sigma1(), &rat_int(66));

        assert!(matches!(
            family_sigma_closed(prime(2), 2, 2),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn closed_sigma_matches_trace_pipeline_and_quadratic_form_route() {
        for (p, cap_n) in [(2u64, 1u32), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2), (7, 1)] {
            let p = prime(p);
            let members = cpnf_family(p, cap_n).unwrap();
            for (n, phi) in members.iter().enumerate() {
                let closed = family_sigma_closed(p, cap_n, n as u32).unwrap();
                let traced = sigma_invariants(phi);
                assert_eq!(closed, traced, "p={p:?} N={cap_n} n={n}");
                // Third route: the member is (a X^2 + b Y^2 : c X^2 + d Y^2),
                // so the closed forms for that shape must agree as well.
                let a = &phi.form_a().c[0];
                let b = &phi.form_a().c[2];
                let c = &phi.form_b().c[0];
                let d = &phi.form_b().c[2];
                let (_, via_shape) = cpnf_invariants(a, b, c, d).unwrap();
                assert_eq!(via_shape, traced);
            }
        }
    }

    #[test]
    fn sigma2_offsets_have_exact_p_adic_valuation() {
        // The distinctness mechanism: v_p(p^{3n} + (p^{2N}-1) p^{6N-3n}) = 3n.
        for (p, cap_n) in [(2u64, 5u32), (3, 4), (5, 3), (13, 2)] {
            let pr = prime(p);
            for n in 0..cap_n as i64 {
                let big_n = cap_n as i64;
                let sigma = pr.pow_rational(3 * n)
                    + (pr.pow_rational(2 * big_n) - rat_int(1))
                        * pr.pow_rational(6 * big_n - 3 * n);
                assert_eq!(valuation(&sigma, pr).unwrap(), 3 * n);
            }
        }
    }

    #[test]
    fn two_parameter_members_match_pinned_values() {
        let phi = fpnf_map(&rat_int(1), &rat_int(1)).unwrap();
        assert_eq!(phi.to_string(), "1,1,0;0,0,1");
        let m = sigma_invariants(&phi);
        assert_eq!((m.sigma1(), m.sigma2()), (&rat_int(2), &rat_int(1)));

        let m = sigma_invariants(&fpnf_map(&rat_int(-1), &rat_int(2)).unwrap());
        assert_eq!((m.sigma1(), m.sigma2()), (&rat_int(1), &rat_int(-1)));

        let phi = fpnf_map(&rat_int(2), &rat_int(3)).unwrap();
        assert_eq!(phi.resultant(), rat_int(3));

        assert!(matches!(
            fpnf_map(&rat_int(0), &rat_int(1)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            fpnf_map(&rat_int(1), &rat_int(0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn two_parameter_members_have_bad_primes_within_s() {
        let s = PrimeSet::from_u64s(&[2, 3]).unwrap();
        let mut rng = StdRng::seed_from_u64(50);
        for _ in 0..60 {
            let mut draw = || {
                let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
                let e2: i64 = rng.gen_range(-4..=4);
                let e3: i64 = rng.gen_range(-4..=4);
                rat_int(sign)
                    * prime(2).pow_rational(e2)
                    * prime(3).pow_rational(e3)
            };
            let alpha = draw();
            let beta = draw();
            let phi = fpnf_map(&alpha, &beta).unwrap();
            let bad = bad_primes(&phi);
            assert!(
                bad.is_subset(&s),
                "alpha={alpha} beta={beta} bad={bad}"
            );
        }
    }

    #[test]
    fn density_witness_pinned_examples() {
        let w = density_witness(prime(2), 5).unwrap();
        assert_eq!(w.rows.len(), 5);
        assert_eq!(w.sigma1, rat_int(8186));
        let mut seen = std::collections::BTreeSet::new();
        for row in &w.rows {
            assert!(row.bad_primes.is_empty());
            assert!(seen.insert(row.sigma2.clone()), "sigma2 repeated");
        }

        let w = density_witness(prime(2), 1).unwrap();
        assert_eq!(w.rows.len(), 1);

        let w = density_witness(prime(3), 3).unwrap();
        assert_eq!(w.sigma1, rat_int(5826));
        assert_eq!(w.rows.len(), 3);
    }

    #[test]
    fn density_witness_json_shape() {
        let w = density_witness(prime(2), 1).unwrap();
        let v = serde_json::to_value(&w).unwrap();
        assert_eq!(
            v,
            serde_json::json!({
                "p": 2,
                "N": 1,
                "sigma1": "26",
                "rows": [{"n": 0, "sigma2": "832", "bad_primes": []}],
            })
        );
        // Key order is part of the byte-level contract.
        let text = serde_json::to_string(&w).unwrap();
        assert_eq!(
            text,
            "{\"p\":2,\"N\":1,\"sigma1\":\"26\",\"rows\":[{\"n\":0,\"sigma2\":\"832\",\"bad_primes\":[]}]}"
        );
    }

    #[test]
    fn line_membership_pinned_examples() {
        let r = line_membership(&rat_int(1), &rat_int(1)).unwrap();
        assert_eq!((r.point.sigma1(), r.point.sigma2()), (&rat_int(2), &rat_int(1)));
        assert_eq!(r.relation, "2*sigma1 - sigma2 = 3");

        let r = line_membership(&rat_int(-1), &rat_int(2)).unwrap();
        assert_eq!((r.point.sigma1(), r.point.sigma2()), (&rat_int(1), &rat_int(-1)));
        assert_eq!(r.relation, "2*sigma1 + sigma2 = 1");

        let r = line_membership(&rat_int(1), &rat_int(5)).unwrap();
        assert_eq!((r.point.sigma1(), r.point.sigma2()), (&rat_int(-2), &rat_int(-7)));

        assert!(matches!(
            line_membership(&rat_int(1), &rat_int(0)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            line_membership(&rat_int(3), &rat_int(1)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn line_membership_matches_closed_parametrization() {
        let zs = [
            rat_int(1),
            rat_int(2),
            rat_int(3),
            rat_int(5),
            rat_int(-1),
            rat_int(-2),
            rat(1, 2),
            rat(-3, 7),
            rat(22, 5),
        ];
        for z in &zs {
            let r = line_membership(&rat_int(1), z).unwrap();
            assert_eq!(r.point.sigma1(), &(rat_int(3) - z));
            assert_eq!(r.point.sigma2(), &(rat_int(3) - rat_int(2) * z));

            let w = z + rat_int(4) / z;
            let r = line_membership(&rat_int(-1), z).unwrap();
            assert_eq!(r.point.sigma1(), &(rat_int(-3) + &w));
            assert_eq!(r.point.sigma2(), &(rat_int(7) - rat_int(2) * &w));
        }
    }

    #[test]
    fn random_parameters_stay_on_their_line() {
        let mut rng = StdRng::seed_from_u64(51);
        for _ in 0..40 {
            let num: i64 = rng.gen_range(-30..=30);
            let den: i64 = rng.gen_range(1..=12);
            let z = rat(num, den);
            if z.is_zero() {
                continue;
            }
            for alpha in [rat_int(1), rat_int(-1)] {
                let r = line_membership(&alpha, &z).unwrap();
                let lhs = if alpha == rat_int(1) {
                    rat_int(2) * r.point.sigma1() - r.point.sigma2()
                } else {
                    rat_int(2) * r.point.sigma1() + r.point.sigma2()
                };
                let rhs = if alpha == rat_int(1) { rat_int(3) } else { rat_int(1) };
                assert_eq!(lhs, rhs);
            }
        }
    }
}
