//! S-units, a bounded-exhaustive solver for the unit equation x + y = 1,
//! and the covering certificate tying unit-equation solutions to the
//! structured normal forms of good reduction.
//!
//! The solver enumerates x = ±prod p^{e_p} over a finite exponent box and
//! keeps the pairs (x, 1-x) whose second coordinate is again an S-unit. It
//! is exhaustive within the box, not provably complete; completeness is
//! evidenced by stabilization tests (the true solution set is finite, by
//! the classical unit-equation theorem, but with no effective bound used
//! here). Everything downstream treats the bound as an explicit parameter.
//!
//! `covering_check` is the computable content of the finiteness theorems for
//! structured triples: every normal form (a, b, c) whose coefficients and
//! resultant are S-units yields a unit-equation solution, so its invariant
//! (ab/c for fixed pairs, ac/b for 2-cycles) must land in the finite list of
//! solution y-coordinates. The check enumerates all such triples inside a
//! coefficient box and asserts exactly that.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::exactnum::{is_s_unit, Prime, PrimeSet, Rational};
use crate::structures::{
    cycle_invariant, u_invariant, FixedPairNormalForm, TwoCycleNormalForm,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// S-units
// ---------------------------------------------------------------------------

/// A nonzero rational of the form sign * prod_{p in S} p^{e_p}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SUnit {
    sign: i8,
    exponents: BTreeMap<Prime, i64>,
}

impl SUnit {
    pub fn new(sign: i8, exponents: BTreeMap<Prime, i64>) -> Result<SUnit> {
        if sign != 1 && sign != -1 {
            return Err(Error::InvalidParameter("sign must be +1 or -1".into()));
        }
        Ok(SUnit { sign, exponents })
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn exponents(&self) -> &BTreeMap<Prime, i64> {
        &self.exponents
    }

    pub fn value(&self) -> Rational {
        let mut v = Rational::one();
        for (&p, &e) in &self.exponents {
            v *= p.pow_rational(e);
        }
        if self.sign < 0 {
            -v
        } else {
            v
        }
    }
}

/// All S-units with every exponent in [-bound, bound], ordered
/// lexicographically by exponent vector (primes ascending, exponents
/// ascending), positive sign before negative at each vector.
pub fn enumerate_s_units(s: &PrimeSet, bound: u32) -> Vec<SUnit> {
    let primes: Vec<Prime> = s.iter().collect();
    let b = bound as i64;
    let mut out = Vec::new();
    let mut exps = vec![-b; primes.len()];
    loop {
        let map: BTreeMap<Prime, i64> =
            primes.iter().copied().zip(exps.iter().copied()).collect();
        out.push(SUnit::new(1, map.clone()).unwrap());
        out.push(SUnit::new(-1, map).unwrap());
        // advance the exponent vector (rightmost fastest would be
        // colexicographic; lexicographic wants leftmost slowest, so
        // increment from the right)
        let mut i = primes.len();
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if exps[i] < b {
                exps[i] += 1;
                for e in &mut exps[i + 1..] {
                    *e = -b;
                }
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// The unit equation x + y = 1
// ---------------------------------------------------------------------------

/// All solutions found inside the exponent box, sorted by x.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitEquationSolutionSet {
    s: PrimeSet,
    bound: u32,
    solutions: Vec<(Rational, Rational)>,
}

impl UnitEquationSolutionSet {
    pub fn s(&self) -> &PrimeSet {
        &self.s
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn solutions(&self) -> &[(Rational, Rational)] {
        &self.solutions
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn contains(&self, x: &Rational, y: &Rational) -> bool {
        self.solutions
            .binary_search_by(|(sx, sy)| sx.cmp(x).then_with(|| sy.cmp(y)))
            .is_ok()
    }

    /// Sorted, deduplicated y-coordinates: the u-values indexing the curves
    /// that cover all good-reduction structured classes.
    pub fn u_values(&self) -> Vec<Rational> {
        let set: BTreeSet<Rational> =
            self.solutions.iter().map(|(_, y)| y.clone()).collect();
        set.into_iter().collect()
    }
}

/// Solve x + y = 1 for x an S-unit inside the exponent box and y an S-unit
/// with no exponent restriction; y's membership is checked exactly.
pub fn solve_unit_equation(s: &PrimeSet, bound: u32) -> UnitEquationSolutionSet {
    let mut solutions = Vec::new();
    for su in enumerate_s_units(s, bound) {
        let x = su.value();
        let y = Rational::one() - &x;
        if y.is_zero() {
            continue;
        }
        if is_s_unit(&y, s) {
            solutions.push((x, y));
        }
    }
    solutions.sort();
    solutions.dedup();
    UnitEquationSolutionSet {
        s: s.clone(),
        bound,
        solutions,
    }
}

/// The covering list: sorted deduplicated y-coordinates of the solution set.
pub fn covering_set(s: &PrimeSet, bound: u32) -> Vec<Rational> {
    solve_unit_equation(s, bound).u_values()
}

// ---------------------------------------------------------------------------
// Covering certificate for structured normal forms
// ---------------------------------------------------------------------------

/// Outcome of the exhaustive normal-form enumeration. `violations` is empty
/// exactly when every enumerated invariant landed inside the covering set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringReport {
    pub s: PrimeSet,
    pub coeff_bound: u32,
    pub eq_bound: u32,
    /// covering_set(s, eq_bound), the allowed u-values.
    pub covering: Vec<Rational>,
    /// Number of fixed-pair triples (a,b,c) enumerated with S-unit resultant.
    pub fixed_pair_count: u64,
    /// Distinct ab/c values among them, sorted.
    pub fixed_pair_u_values: Vec<Rational>,
    pub two_cycle_count: u64,
    /// Distinct ac/b values, sorted.
    pub two_cycle_u_values: Vec<Rational>,
    /// Human-readable descriptions of triples whose invariant escaped the
    /// covering set. Always empty when the finiteness theorems hold.
    pub violations: Vec<String>,
}

/// Numerator/denominator pair in machine integers for the hot enumeration
/// path; den > 0, the fraction need not be reduced. None on overflow, at
/// which point the caller falls back to exact arithmetic.
#[derive(Debug, Clone, Copy)]
struct SmallFrac {
    num: i128,
    den: i128,
}

fn small_of(su: &SUnit) -> Option<SmallFrac> {
    let mut num: i128 = su.sign() as i128;
    let mut den: i128 = 1;
    for (&p, &e) in su.exponents() {
        let p = p.get() as i128;
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                num = num.checked_mul(p)?;
            } else {
                den = den.checked_mul(p)?;
            }
        }
    }
    Some(SmallFrac { num, den })
}

/// Is z - x*y a nonzero S-unit? Exact i128 arithmetic; None on overflow.
fn small_diff_is_s_unit(
    x: SmallFrac,
    y: SmallFrac,
    z: SmallFrac,
    primes: &[u64],
) -> Option<bool> {
    let xy_num = x.num.checked_mul(y.num)?;
    let xy_den = x.den.checked_mul(y.den)?;
    // z - xy over the common denominator z.den * xy_den (S-smooth, so only
    // the numerator decides S-unit membership).
    let lhs = z.num.checked_mul(xy_den)?;
    let rhs = xy_num.checked_mul(z.den)?;
    let mut n = lhs.checked_sub(rhs)?;
    if n == 0 {
        return Some(false);
    }
    n = n.abs();
    for &p in primes {
        let p = p as i128;
        while n % p == 0 {
            n /= p;
        }
    }
    Some(n == 1)
}

fn exact_diff_is_s_unit(x: &Rational, y: &Rational, z: &Rational, s: &PrimeSet) -> bool {
    let d = z - x * y;
    !d.is_zero() && is_s_unit(&d, s)
}

/// Enumerate every normal-form triple (a, b, c) with coordinates drawn from
/// the S-unit box and S-unit resultant, and check that each invariant lies
/// in covering_set(s, eq_bound). Both structure kinds are checked: fixed
/// pairs need c - ab an S-unit and contribute u = ab/c; 2-cycles need
/// b - ac and contribute u = ac/b.
///
/// The filter runs on machine integers (overflow falls back to exact
/// arithmetic); every surviving triple is reconstructed through the typed
/// normal-form constructors and its invariant recomputed exactly.
pub fn covering_check(s: &PrimeSet, coeff_bound: u32, eq_bound: u32) -> CoveringReport {
    let units = enumerate_s_units(s, coeff_bound);
    let values: Vec<Rational> = units.iter().map(SUnit::value).collect();
    let smalls: Vec<Option<SmallFrac>> = units.iter().map(small_of).collect();
    let primes: Vec<u64> = s.iter().map(Prime::get).collect();

    let covering = covering_set(s, eq_bound);
    let cover: BTreeSet<Rational> = covering.iter().cloned().collect();

    let mut fixed_pair_count = 0u64;
    let mut two_cycle_count = 0u64;
    let mut pair_us = BTreeSet::new();
    let mut cycle_us = BTreeSet::new();
    let mut violations = Vec::new();

    let n = units.len();
    for ia in 0..n {
        for ib in 0..n {
            for ic in 0..n {
                let fast = |x: usize, y: usize, z: usize| -> bool {
                    match (smalls[x], smalls[y], smalls[z]) {
                        (Some(fx), Some(fy), Some(fz)) => {
                            match small_diff_is_s_unit(fx, fy, fz, &primes) {
                                Some(ans) => ans,
                                None => exact_diff_is_s_unit(
                                    &values[x], &values[y], &values[z], s,
                                ),
                            }
                        }
                        _ => exact_diff_is_s_unit(&values[x], &values[y], &values[z], s),
                    }
                };
                // Fixed pair: resultant c(c - ab); c is a unit already.
                if fast(ia, ib, ic) {
                    fixed_pair_count += 1;
                    let nf = FixedPairNormalForm::new(
                        values[ia].clone(),
                        values[ib].clone(),
                        values[ic].clone(),
                    )
                    .expect("S-unit coefficients with S-unit resultant");
                    let u = u_invariant(&nf);
                    if cover.contains(&u) {
                        pair_us.insert(u);
                    } else {
                        violations.push(format!(
                            "fixed pair ({},{},{}) has u = {} outside the covering set",
                            values[ia], values[ib], values[ic], u
                        ));
                    }
                }
                // 2-cycle: resultant b(b - ac).
                if fast(ia, ic, ib) {
                    two_cycle_count += 1;
                    let nf = TwoCycleNormalForm::new(
                        values[ia].clone(),
                        values[ib].clone(),
                        values[ic].clone(),
                    )
                    .expect("S-unit coefficients with S-unit resultant");
                    let u = cycle_invariant(&nf);
                    if cover.contains(&u) {
                        cycle_us.insert(u);
                    } else {
                        violations.push(format!(
                            "2-cycle ({},{},{}) has u = {} outside the covering set",
                            values[ia], values[ib], values[ic], u
                        ));
                    }
                }
            }
        }
    }

    CoveringReport {
        s: s.clone(),
        coeff_bound,
        eq_bound,
        covering,
        fixed_pair_count,
        fixed_pair_u_values: pair_us.into_iter().collect(),
        two_cycle_count,
        two_cycle_u_values: cycle_us.into_iter().collect(),
        violations,
    }
}
