//! Quantum mixture analysis toolkit.
//!
//! Builds joint states from preparation specifications, classifies the
//! distinguishability of the alternatives, reduces and purifies states,
//! simulates which-path interference scenarios, and runs randomized
//! verification suites over the whole theory.
//!
//! Layering, bottom up:
//! - [`tensor`]: dense complex linear-algebra kernel (products, partial
//!   trace, eigendecomposition, Schmidt, Gram realization),
//! - [`state`]: physically-typed layouts, kets, density operators,
//!   descriptor sets,
//! - [`correlation`]: conditional probabilities, hermeticity, and the
//!   (in)distinguishability predicates,
//! - [`mixing`]: joint-state construction for every mixing regime,
//!   phase averaging, purification, ensemble steering,
//! - [`scenarios`]: N-slit screens, visibility, detector conditioning,
//!   preparation estimators,
//! - [`verify`]: seeded randomized property suites with machine-readable
//!   reports.

pub mod correlation;
pub mod error;
pub mod mixing;
pub mod scenarios;
pub mod state;
pub mod tensor;
pub mod tol;
pub mod verify;

pub use correlation::{classify_gram, Classification, CorrelatedForm, PointerSearch};
pub use error::{Error, Result};
pub use mixing::{GramSpec, MixResult, PhaseModel};
pub use state::{DensityOp, DescriptorSet, Ket, SystemLayout};
pub use tensor::{CMat, CVec};
pub use tol::{Tolerances, MAX_DIM};
pub use verify::{SuiteConfig, SuiteReport};
