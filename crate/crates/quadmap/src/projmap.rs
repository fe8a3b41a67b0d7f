//! Quadratic rational maps on P^1 and the PGL_2 action.
//!
//! A map is an ordered pair of binary quadratic forms `(A : B)`; it is a
//! degree-2 morphism exactly when the 4x4 resultant determinant of the pair
//! is nonzero, and that determinant is the specific Sylvester layout
//!
//! ```text
//!     | a0 a1 a2 0  |
//!     | 0  a0 a1 a2 |
//!     | b0 b1 b2 0  |
//!     | 0  b0 b1 b2 |
//! ```
//!
//! Conjugation `phi^f = f^-1 . phi . f` is implemented with the adjugate
//! matrix instead of the literal inverse, so the whole pipeline stays
//! division-free; the result is then rescaled to primitive integer
//! coefficients. The un-normalized adjugate composition scales the resultant
//! by `det(f)^6` (pinned by a test below), while composing with the true
//! inverse scales it by `det(f)^2`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{parse_rational, Rational};
use crate::{Error, Result};

/// 2x2 matrix of rationals.
pub type Mat2 = [[Rational; 2]; 2];

/// 3x3 determinant by cofactor expansion. `T` is any commutative ring type.
fn det3<T>(m: &[[T; 3]; 3]) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| {
        m[r1][c1].clone() * m[r2][c2].clone() - m[r1][c2].clone() * m[r2][c1].clone()
    };
    m[0][0].clone() * minor(1, 2, 1, 2) - m[0][1].clone() * minor(1, 2, 0, 2)
        + m[0][2].clone() * minor(1, 2, 0, 1)
}

/// 4x4 determinant by Laplace expansion along the first row.
pub(crate) fn det4<T>(m: &[[T; 4]; 4]) -> T
where
    T: Clone + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T>,
{
    let submatrix = |skip_col: usize| -> [[T; 3]; 3] {
        let mut rows = Vec::with_capacity(3);
        for r in 1..4 {
            let mut cols = Vec::with_capacity(3);
            for c in 0..4 {
                if c != skip_col {
                    cols.push(m[r][c].clone());
                }
            }
            rows.push([cols[0].clone(), cols[1].clone(), cols[2].clone()]);
        }
        [rows[0].clone(), rows[1].clone(), rows[2].clone()]
    };
    let term = |c: usize| m[0][c].clone() * det3(&submatrix(c));
    term(0) - term(1) + term(2) - term(3)
}

// ---------------------------------------------------------------------------
// Binary quadratic forms
// ---------------------------------------------------------------------------

/// Binary quadratic form `c0 X^2 + c1 XY + c2 Y^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryQuadForm {
    pub c: [Rational; 3],
}

impl BinaryQuadForm {
    pub fn new(c0: Rational, c1: Rational, c2: Rational) -> BinaryQuadForm {
        BinaryQuadForm { c: [c0, c1, c2] }
    }

    pub fn from_i64(c0: i64, c1: i64, c2: i64) -> BinaryQuadForm {
        BinaryQuadForm::new(
            Rational::from_integer(c0.into()),
            Rational::from_integer(c1.into()),
            Rational::from_integer(c2.into()),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    pub fn eval(&self, x: &Rational, y: &Rational) -> Rational {
        &self.c[0] * x * x + &self.c[1] * x * y + &self.c[2] * y * y
    }

    pub fn scale(&self, t: &Rational) -> BinaryQuadForm {
        BinaryQuadForm::new(&self.c[0] * t, &self.c[1] * t, &self.c[2] * t)
    }

    fn add(&self, other: &BinaryQuadForm) -> BinaryQuadForm {
        BinaryQuadForm::new(
            &self.c[0] + &other.c[0],
            &self.c[1] + &other.c[1],
            &self.c[2] + &other.c[2],
        )
    }

    /// Substitute `X -> m00 X + m01 Y`, `Y -> m10 X + m11 Y`.
    pub fn compose_linear(&self, m: &Mat2) -> BinaryQuadForm {
        let [a, b] = [&m[0][0], &m[0][1]];
        let [c, d] = [&m[1][0], &m[1][1]];
        let [q0, q1, q2] = [&self.c[0], &self.c[1], &self.c[2]];
        let two = Rational::from_integer(2.into());
        BinaryQuadForm::new(
            q0 * a * a + q1 * a * c + q2 * c * c,
            &two * q0 * a * b + q1 * (a * d + b * c) + &two * q2 * c * d,
            q0 * b * b + q1 * b * d + q2 * d * d,
        )
    }
}

/// Multiplicity of the projective point as a root of the form (0, 1, or 2).
///
/// Dehomogenize in a chart where the point is finite and divide out the known
/// linear factor exactly, once per multiplicity step.
pub(crate) fn root_multiplicity(form: &BinaryQuadForm, p: &ProjPoint) -> u8 {
    let [c0, c1, c2] = [&form.c[0], &form.c[1], &form.c[2]];
    if p.y().is_zero() {
        // P = (1:0); look at the trailing coefficients of form(1, w).
        if !c0.is_zero() {
            0
        } else if !c1.is_zero() {
            1
        } else {
            2
        }
    } else {
        // P = (x:1) in the affine chart; g(z) = c0 z^2 + c1 z + c2.
        let x = p.x();
        let g = c0 * x * x + c1 * x + c2;
        if !g.is_zero() {
            return 0;
        }
        let two = Rational::from_integer(2.into());
        let g_prime = two * c0 * x + c1;
        if g_prime.is_zero() {
            2
        } else {
            1
        }
    }
}

// ---------------------------------------------------------------------------
// Projective points
// ---------------------------------------------------------------------------

/// A point of P^1(Q), stored in the canonical representative:
/// `(x : 1)` when finite, `(1 : 0)` at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjPoint {
    x: Rational,
    y: Rational,
}

impl ProjPoint {
    pub fn new(x: Rational, y: Rational) -> Result<ProjPoint> {
        if x.is_zero() && y.is_zero() {
            return Err(Error::ZeroPoint);
        }
        if y.is_zero() {
            Ok(ProjPoint {
                x: Rational::one(),
                y: Rational::zero(),
            })
        } else {
            Ok(ProjPoint {
                x: x / &y,
                y: Rational::one(),
            })
        }
    }

    pub fn from_i64(x: i64, y: i64) -> ProjPoint {
        ProjPoint::new(
            Rational::from_integer(x.into()),
            Rational::from_integer(y.into()),
        )
        .expect("nonzero coordinates")
    }

    pub fn infinity() -> ProjPoint {
        ProjPoint::from_i64(1, 0)
    }

    pub fn x(&self) -> &Rational {
        &self.x
    }

    pub fn y(&self) -> &Rational {
        &self.y
    }

    pub fn is_infinity(&self) -> bool {
        self.y.is_zero()
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.x, self.y)
    }
}

impl FromStr for ProjPoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<ProjPoint> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 2 {
            return Err(Error::Parse(format!("bad point {s:?}: expected \"x:y\"")));
        }
        ProjPoint::new(parse_rational(parts[0])?, parse_rational(parts[1])?)
    }
}

// ---------------------------------------------------------------------------
// Mobius transformations
// ---------------------------------------------------------------------------

/// An element of PGL_2(Q) as an invertible 2x2 rational matrix
/// `f(X:Y) = (a X + b Y : c X + d Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mobius {
    m: Mat2,
}

impl Mobius {
    pub fn new(m: Mat2) -> Result<Mobius> {
        let f = Mobius { m };
        if f.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(f)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Mobius> {
        let r = |n: i64| Rational::from_integer(BigInt::from(n));
        Mobius::new([[r(a), r(b)], [r(c), r(d)]])
    }

    pub fn identity() -> Mobius {
        Mobius::from_i64(1, 0, 0, 1).expect("identity is invertible")
    }

    /// Shear `(X : Y) -> (X : kX + Y)`.
    pub fn shear(k: i64) -> Mobius {
        Mobius::from_i64(1, 0, k, 1).expect("shears are invertible")
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.m
    }

    pub fn det(&self) -> Rational {
        &self.m[0][0] * &self.m[1][1] - &self.m[0][1] * &self.m[1][0]
    }

    /// Adjugate matrix: `det(f) * f^-1`, but with no division anywhere.
    pub fn adjugate(&self) -> Mat2 {
        [
            [self.m[1][1].clone(), -self.m[0][1].clone()],
            [-self.m[1][0].clone(), self.m[0][0].clone()],
        ]
    }

    pub fn inverse(&self) -> Mobius {
        let det = self.det();
        let adj = self.adjugate();
        Mobius::new([
            [&adj[0][0] / &det, &adj[0][1] / &det],
            [&adj[1][0] / &det, &adj[1][1] / &det],
        ])
        .expect("inverse of invertible matrix is invertible")
    }

    /// Matrix whose columns are the canonical representatives of two
    /// distinct points, i.e. the Mobius map sending `(1:0) -> p1`,
    /// `(0:1) -> p2`.
    pub fn from_columns(p1: &ProjPoint, p2: &ProjPoint) -> Result<Mobius> {
        if p1 == p2 {
            return Err(Error::PointsEqual);
        }
        Mobius::new([
            [p1.x().clone(), p2.x().clone()],
            [p1.y().clone(), p2.y().clone()],
        ])
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        let x = &self.m[0][0] * p.x() + &self.m[0][1] * p.y();
        let y = &self.m[1][0] * p.x() + &self.m[1][1] * p.y();
        ProjPoint::new(x, y).expect("invertible matrix maps points to points")
    }

    /// Apply `f^-1` without dividing (adjugate acts the same projectively).
    pub fn apply_inverse(&self, p: &ProjPoint) -> ProjPoint {
        let adj = self.adjugate();
        let x = &adj[0][0] * p.x() + &adj[0][1] * p.y();
        let y = &adj[1][0] * p.x() + &adj[1][1] * p.y();
        ProjPoint::new(x, y).expect("invertible matrix maps points to points")
    }

    /// Composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &Mobius) -> Mobius {
        let a = &self.m;
        let b = &other.m;
        let mut m: Mat2 = [
            [Rational::zero(), Rational::zero()],
            [Rational::zero(), Rational::zero()],
        ];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j];
            }
        }
        Mobius::new(m).expect("product of invertible matrices is invertible")
    }
}

impl fmt::Display for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{};{},{}",
            self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1]
        )
    }
}

impl FromStr for Mobius {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mobius> {
        let rows: Vec<&str> = s.split(';').collect();
        if rows.len() != 2 {
            return Err(Error::Parse(format!(
                "bad matrix {s:?}: expected \"a,b;c,d\""
            )));
        }
        let mut entries = Vec::with_capacity(4);
        for row in rows {
            let cols: Vec<&str> = row.split(',').collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "bad matrix {s:?}: expected \"a,b;c,d\""
                )));
            }
            for c in cols {
                entries.push(parse_rational(c)?);
            }
        }
        let mut it = entries.into_iter();
        let m: Mat2 = [
            [it.next().unwrap(), it.next().unwrap()],
            [it.next().unwrap(), it.next().unwrap()],
        ];
        Mobius::new(m)
    }
}

// ---------------------------------------------------------------------------
// Quadratic rational maps
// ---------------------------------------------------------------------------

/// A quadratic rational map `phi(X:Y) = (A(X,Y) : B(X,Y))`, resultant nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadMap {
    a: BinaryQuadForm,
    b: BinaryQuadForm,
}

impl QuadMap {
    pub fn new(a: BinaryQuadForm, b: BinaryQuadForm) -> Result<QuadMap> {
        let phi = QuadMap { a, b };
        if phi.resultant().is_zero() {
            return Err(Error::DegenerateMap);
        }
        Ok(phi)
    }

    pub fn from_i64(a: [i64; 3], b: [i64; 3]) -> Result<QuadMap> {
        QuadMap::new(
            BinaryQuadForm::from_i64(a[0], a[1], a[2]),
            BinaryQuadForm::from_i64(b[0], b[1], b[2]),
        )
    }

    pub fn form_a(&self) -> &BinaryQuadForm {
        &self.a
    }

    pub fn form_b(&self) -> &BinaryQuadForm {
        &self.b
    }

    /// The 4x4 resultant determinant of the pair of forms.
    pub fn resultant(&self) -> Rational {
        let z = Rational::zero;
        let [a0, a1, a2] = self.a.c.clone();
        let [b0, b1, b2] = self.b.c.clone();
        let m = [
            [a0.clone(), a1.clone(), a2.clone(), z()],
            [z(), a0, a1, a2],
            [b0.clone(), b1.clone(), b2.clone(), z()],
            [z(), b0, b1, b2],
        ];
        det4(&m)
    }

    /// Rescale both forms by one rational so all six coefficients are
    /// coprime integers and the first nonzero coefficient (in the order
    /// a0,a1,a2,b0,b1,b2) is positive. Same point of P^5, canonical
    /// integer representative.
    pub fn normalize_primitive(&self) -> QuadMap {
        let coeffs: Vec<&Rational> = self.a.c.iter().chain(self.b.c.iter()).collect();
        let mut denom_lcm = BigInt::one();
        for q in &coeffs {
            denom_lcm = denom_lcm.lcm(q.denom());
        }
        let ints: Vec<BigInt> = coeffs
            .iter()
            .map(|q| q.numer() * (&denom_lcm / q.denom()))
            .collect();
        let mut g = BigInt::zero();
        for n in &ints {
            g = g.gcd(n);
        }
        debug_assert!(!g.is_zero(), "map has a nonzero coefficient");
        let first_nonzero_negative = ints
            .iter()
            .find(|n| !n.is_zero())
            .map(|n| n.is_negative())
            .unwrap_or(false);
        if first_nonzero_negative {
            g = -g;
        }
        let scaled: Vec<Rational> = ints
            .iter()
            .map(|n| Rational::from_integer(n / &g))
            .collect();
        QuadMap::new(
            BinaryQuadForm::new(scaled[0].clone(), scaled[1].clone(), scaled[2].clone()),
            BinaryQuadForm::new(scaled[3].clone(), scaled[4].clone(), scaled[5].clone()),
        )
        .expect("rescaling cannot kill the resultant")
    }

    pub fn evaluate(&self, p: &ProjPoint) -> ProjPoint {
        let ax = self.a.eval(p.x(), p.y());
        let bx = self.b.eval(p.x(), p.y());
        ProjPoint::new(ax, bx).expect("nonzero resultant leaves no common root")
    }

    /// `(outer) . (A,B) . (inner)` where `outer` is a 2x2 matrix acting on
    /// the pair of forms and `inner` substitutes into each form.
    fn sandwich(&self, outer: &Mat2, inner: &Mobius) -> (BinaryQuadForm, BinaryQuadForm) {
        let a_sub = self.a.compose_linear(inner.matrix());
        let b_sub = self.b.compose_linear(inner.matrix());
        let c = a_sub.scale(&outer[0][0]).add(&b_sub.scale(&outer[0][1]));
        let d = a_sub.scale(&outer[1][0]).add(&b_sub.scale(&outer[1][1]));
        (c, d)
    }

    /// Division-free conjugate `phi^f = adj(f) . phi . f`, not rescaled.
    /// Scales the resultant by `det(f)^6`.
    pub fn conjugate_raw(&self, f: &Mobius) -> QuadMap {
        let (c, d) = self.sandwich(&f.adjugate(), f);
        QuadMap::new(c, d).expect("conjugation preserves nonzero resultant")
    }

    /// Conjugate by `f` and rescale to the primitive integer representative.
    pub fn conjugate(&self, f: &Mobius) -> QuadMap {
        self.conjugate_raw(f).normalize_primitive()
    }

    /// Conjugate with the literal inverse `f^-1 . phi . f`. This is the
    /// representative for which the resultant transforms by exactly
    /// `det(f)^2`.
    pub fn conjugate_with_inverse(&self, f: &Mobius) -> QuadMap {
        let inv = f.inverse();
        let (c, d) = self.sandwich(inv.matrix(), f);
        QuadMap::new(c, d).expect("conjugation preserves nonzero resultant")
    }

    /// Wronskian `A_X B_Y - A_Y B_X`: a quadratic form whose roots are the
    /// critical points whenever the characteristic is not 2.
    pub fn wronskian(&self) -> BinaryQuadForm {
        let [a0, a1, a2] = &self.a.c;
        let [b0, b1, b2] = &self.b.c;
        let two = Rational::from_integer(2.into());
        let four = Rational::from_integer(4.into());
        BinaryQuadForm::new(
            &two * (a0 * b1 - a1 * b0),
            &four * (a0 * b2 - a2 * b0),
            &two * (a1 * b2 - a2 * b1),
        )
    }

    /// Local degree of phi at P: the multiplicity of P inside its own fiber.
    ///
    /// With `Q = phi(P) = (u:v)`, the fiber is cut out by
    /// `G = v A - u B`, and the local degree is the multiplicity of P as a
    /// root of G. This definition involves no derivatives, so it is the one
    /// that stays correct in characteristic 2 after reduction.
    pub fn local_degree(&self, p: &ProjPoint) -> u8 {
        let q = self.evaluate(p);
        let g = self.a.scale(q.y()).add(&self.b.scale(&-q.x()));
        let m = root_multiplicity(&g, p);
        debug_assert!(m >= 1, "P always lies in its own fiber");
        m
    }

    /// Fiber form `G = v A - u B` over a target point `(u:v)`; the roots of G
    /// are exactly the preimages of that point.
    pub fn fiber_form(&self, target: &ProjPoint) -> BinaryQuadForm {
        self.a
            .scale(target.y())
            .add(&self.b.scale(&-target.x().clone()))
    }
}

impl fmt::Display for QuadMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{};{},{},{}",
            self.a.c[0], self.a.c[1], self.a.c[2], self.b.c[0], self.b.c[1], self.b.c[2]
        )
    }
}

impl FromStr for QuadMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<QuadMap> {
        let halves: Vec<&str> = s.split(';').collect();
        if halves.len() != 2 {
            return Err(Error::Parse(format!(
                "bad map {s:?}: expected \"a0,a1,a2;b0,b1,b2\""
            )));
        }
        let mut forms = Vec::with_capacity(2);
        for half in halves {
            let cs: Vec<&str> = half.split(',').collect();
            if cs.len() != 3 {
                return Err(Error::Parse(format!(
                    "bad map {s:?}: each form needs exactly 3 coefficients"
                )));
            }
            forms.push(BinaryQuadForm::new(
                parse_rational(cs[0])?,
                parse_rational(cs[1])?,
                parse_rational(cs[2])?,
            ));
        }
        let b = forms.pop().unwrap();
        let a = forms.pop().unwrap();
        QuadMap::new(a, b)
    }
}
