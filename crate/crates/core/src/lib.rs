//! Green's functions of the transient simple random walk on `Z^d` and on the
//! subgraphs obtained from it by folding: the half-lattice, the orthant, the
//! partially constrained spaces `N_0^m x Z^(d-m)` and the strip
//! `[0, L-1] x Z^(d-1)`.
//!
//! Every Green's function here uses the normalization
//! `G(x, y) = E_x[#visits to y] / pi(y)`, where `pi(y)` is the sum of the
//! conductances at `y`. For the simple walk on `Z^d` this is the classical
//! expected visit count divided by `2d`.
//!
//! The crate is organised bottom-up:
//!
//! * [`bessel`]: exponentially scaled modified Bessel functions `e^-z I_k(z)`.
//! * [`lattice`]: `g(x, y)` on `Z^d` from its Bessel-product integral.
//! * [`reflection`]: closed forms on the folded domains built from `g`.
//! * [`network`]: finite weighted graphs, killed Green's functions and the
//!   graph surgery that justifies the reflection formulas.
//! * [`mc`]: Monte Carlo visit-count estimators used as a statistical oracle.
//! * [`checks`]: named groups of cross-checks between the above.

pub mod bessel;
pub mod checks;
mod error;
pub mod lattice;
pub mod mc;
pub mod network;
mod quadrature;
pub mod reflection;

pub use error::{GreenError, Result};
pub use lattice::{
    green_full, green_full_origin, green_origin_gamma, EstimateKind, GreenEstimate, GreenEvaluator,
    LatticePoint, QuadratureConfig,
};
pub use reflection::DomainSpec;
