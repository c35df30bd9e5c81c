//! Exact finite-group and finite-field machinery for sum-product and
//! growth experiments in the Heisenberg groups H_n(F_p) and the affine
//! group Aff(F_p).

pub mod cyclo;
pub mod energy;
pub mod field;
pub mod fourier;
pub mod freiman;
pub mod group;
pub mod incidence;
pub mod set;
