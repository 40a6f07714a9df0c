//! Computer algebra for Drinfeld modules over finite local rings.
//!
//! The crate works with `A = F_q[T]` and the prime `p = (T)`. Coefficients live
//! in rings `R = F_{q^m}[z]/(z^k)`; Drinfeld modules are skew polynomials
//! `e_T ∈ R{τ}`, torsion schemes are monic additive polynomials in `R[t]`, and
//! level structures are checked through Cartier divisors in the affine line.
//!
//! Layout:
//! - [`algebra`]: finite fields, local rings, dense linear algebra, span closure.
//! - [`skewpoly`]: twisted polynomials, additive polynomials, kernel points.
//! - [`drinfeld`]: the action `a ↦ e_a`, torsion divisors, height, quotients.
//! - [`finshtuka`]: torsion shtukas, the `Dr_q` presentation, naive flags.
//! - [`level`]: M-structures, cyclicity, `Γ₀(p^n)` flags and level maps.
//! - [`building`]: simplex combinatorics and Newton points.

pub mod algebra;
pub mod building;
pub mod drinfeld;
mod error;
pub mod finshtuka;
pub mod level;
pub mod skewpoly;

pub use error::{Error, Result};
