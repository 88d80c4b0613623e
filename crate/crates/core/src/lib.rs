//! Exact computation of Drinfeld modules, the Drinfeld modular forms g, Δ
//! and h as truncated t-expansions, Moore determinants and the Weil pairing,
//! together with verification suites that check the classical identities
//! relating them as exact equalities.
//!
//! Layout:
//! - [`exactfield`]: F_q, F_q[T], F_q(T), F_{q^n} and level fields F_q(λ).
//! - [`skew`]: F_q-linear polynomials, Drinfeld modules, Moore determinants
//!   and the Weil pairing formula.
//! - [`series`]: truncated Laurent series and the level-one expansions.
//! - [`level`]: Eisenstein series of degree-one level and the identity suites
//!   built on them.
//! - [`torsionlab`]: Drinfeld modules over finite fields and empirical Weil
//!   pairing checks.
//! - [`moduli`]: j, j̃, weighted projective points and decorated pairs.
//! - [`suites`]: the named suites run by the command line.
//! - [`report`]: JSON report types shared by the suites and the CLI.

pub mod error;
pub mod exactfield;
pub mod level;
pub mod moduli;
pub mod report;
pub mod series;
pub mod skew;
pub mod suites;
pub mod torsionlab;

pub use error::{Error, Result};
