//! Polynomial algebra: dense complex polynomials, Chebyshev polynomials of
//! the second kind, simultaneous root finding and exact resultants over Z[λ].

mod chebyshev;
mod dense;
mod resultant;
mod roots;

pub use chebyshev::{chebyshev_u, chebyshev_u_eval, chebyshev_u_poly};
pub use dense::DensePoly;
pub use resultant::{resultant_eliminate_x, IntBivarPoly, IntPoly};
pub use roots::{poly_roots, RootSet, DEFAULT_ROOT_TOL};
