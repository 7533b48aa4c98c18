//! Exact computer algebra for a locally nilpotent derivation over the cusp.
//!
//! The engine constructs the extension ring `B = Q[T,X,Y][z]` with
//! `z^2 = T^8*(X + T*Y)^2 + 1`, the subring `S` whose `T`-exponents avoid the
//! single gap of the numerical semigroup generated by 2 and 3, and the
//! derivation `T ↦ 0, X ↦ T^3, Y ↦ -T^2, z ↦ 0`. On top of that it provides
//! kernel-membership tests in rectified coordinates, enumeration of kernel
//! monomials, and certified infeasibility verdicts showing that the kernel
//! element `T^2*P^(d+1)` is not generated by bounded-degree kernel elements
//! modulo a power of `T`, which is the finite, machine-checkable core of the
//! non-finite-generation obstruction.
//!
//! Everything is exact: scalars are arbitrary-precision rationals and no
//! operation ever rounds. All values are immutable after construction and
//! all operations are pure functions, so sharing across threads is safe.

pub mod cusp;
pub mod derivation;
pub mod expr;
pub mod kernel;
pub mod linalg;
pub mod poly;
pub mod rat;
pub mod rings;
pub mod sample;

pub use cusp::{CuspInstance, NegativeControl, VerificationConfig, VerificationReport};
pub use derivation::{Derivation, DerivationError, LndReport, NilpotencyIndex, NilpotencyReport};
pub use expr::{parse_and_eval, parse_expr, ExprAst, ParseError};
pub use kernel::{
    kernel_basis, kernel_membership_via_coordinates, obstruction_certificate, truncate_mod_t,
    KernelBasis, KernelMonomial, ObstructionCertificate, PCoordElem,
};
pub use linalg::{solve_linear, LinAlgError, Mat, SolveOutcome};
pub use poly::{Monomial, Poly, Var};
pub use rat::Rat;
pub use rings::{ExtElem, ExtRingSpec, NumericalSemigroup, RingError, SubringSpec};
