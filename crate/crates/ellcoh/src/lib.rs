//! Exact computation of the rational cohomology of moduli spaces of n-pointed
//! genus-1 curves with full level-N structure.
//!
//! The pipeline works entirely over exact rationals:
//!
//! 1. `forest`: a finite bigraded differential algebra A_n modelling the
//!    configuration space F(E, n) of n distinct points on an elliptic curve,
//!    with its basis of decorated admissible forests, an sl2 action, an
//!    SL2(Z) action, and the symmetric-group action.
//! 2. `cohomology`: blockwise kernels/images of the differential, sl2 isotypic
//!    multiplicities, and the reduced algebra B_n (quotient by the classes of
//!    sum(a_i), sum(b_i)).
//! 3. `modular`: dimensions of spaces of modular forms and cusp forms for the
//!    principal congruence subgroups, and the weight data W(k, N).
//! 4. `gamma`: group cohomology H^1(Gamma(N), V_k) from shipped free
//!    presentations (derived by coset enumeration), plus the amalgam route at
//!    level 1.
//! 5. `repring`: the representation ring bookkeeping (sl2 multiplicities,
//!    symmetric-group class functions, polynomials in t, u, v).
//! 6. `assemble`: the two-column first-quadrant page combining both sides,
//!    Betti numbers, Poincare-Serre and equivariant mixed Hodge polynomials,
//!    caching and serialization.
//!
//! All public computations are deterministic: identical inputs produce
//! byte-identical serialized outputs.

pub mod arith;
pub mod assemble;
pub mod cohomology;
pub mod error;
pub mod forest;
pub mod gamma;
pub mod linalg;
pub mod modular;
pub mod oracles;
pub mod partitions;
pub mod repring;
pub mod selftest;

pub use error::Error;

/// Crate version string used in result metadata and cache keys.
pub fn version() -> &'static str {
    env!("CARGO_PKG_VERSION")
}
