//! Deterministic numeric kernels shared by the rest of the crate.

pub mod circular;
pub mod eigen;
pub mod fmt;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;

pub use circular::{fit_von_mises, VonMisesFit};
pub use eigen::{sym_eigen, sym_eigenvalues, EigenSpectrum};
pub use quad::quad_1d;
pub use rng::RngStream;
pub use special::bessel_i0;
pub use stats::ls_through_origin;
