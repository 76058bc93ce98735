//! Numerical Hodge-Riemann theory for mixed Kahler classes at desk scale.
//!
//! * [`numkernel`]: dense complex linear algebra with explicit tolerances.
//! * [`exterior`]: the exterior algebra of a complex vector space, positive
//!   (1,1)-forms, pullbacks and the pointwise metric.
//! * [`lefschetz`]: Hodge-Riemann pairs `(nu, omega)` on a vector space, the
//!   operators `L`, `Lambda`, `*`, primitive decompositions and metrics.
//! * [`ring`]: bigraded Poincare-duality rings (tori, Kunneth products,
//!   projective bundles) and the same machinery executed inside them.
//! * [`ineqlab`]: seeded sweeps probing the local comparison inequalities.
//!
//! [`hodge`] holds the algorithms shared by the local and ring settings.

pub mod error;
pub mod exterior;
pub mod hodge;
pub mod ineqlab;
pub mod lefschetz;
pub mod numkernel;
pub mod ring;

pub use error::{Error, Result};
pub use numkernel::{CMatrix, C64};
