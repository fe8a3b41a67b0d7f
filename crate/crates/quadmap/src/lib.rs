//! Exact arithmetic for quadratic rational maps on the projective line over Q.
//!
//! A quadratic rational map is a pair of binary quadratic forms
//! `phi(X:Y) = (A(X,Y) : B(X,Y))` with nonzero resultant. Everything here is
//! computed over Q with arbitrary-precision rationals — there are no floats
//! and no root extractions anywhere in the crate.
//!
//! What the library covers:
//!
//! * [`projmap`] — forms, maps, projective points, Mobius transformations,
//!   the 4x4 resultant determinant, PGL2 conjugation, local degrees.
//! * [`invariants`] — multipliers at fixed points and the Milnor invariants
//!   (sigma1, sigma2, sigma3), computed via traces in a quotient algebra so
//!   that no fixed point ever has to be extracted.
//! * [`reduction`] — reduction of points and maps modulo a prime, good/bad
//!   primes via the integer resultant.
//! * [`structures`] — maps marked with a pair of fixed points or a 2-cycle,
//!   their normal forms, the u-invariants, and valuation criteria for good
//!   reduction of the marked structure.
//! * [`sunit`] — a bounded-exhaustive solver for x + y = 1 in S-units and the
//!   covering checks tying solutions to the u-invariants above.
//! * [`families`] — explicit families with unit resultant realising many
//!   residue classes of invariants, plus density witnesses.
//! * [`cli`] — the `quadmap` command-line front end.

pub mod cli;
pub mod exactnum;
pub mod families;
pub mod invariants;
pub mod projmap;
pub mod reduction;
pub mod structures;
pub mod sunit;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
