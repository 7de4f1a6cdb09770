//! Dense complex linear algebra.

pub mod eigen;
pub mod matrix;
pub mod unitary;

pub use eigen::{hermitian_eigen, projection_rank, reconstruct, unitary_eigen, HermitianEigen, UnitaryEigen};
pub use matrix::{ComplexMatrix, C64, ONE, ZERO};
pub use unitary::{
    exp_i_hermitian, exp_skew_hermitian, unitarity_defect, unitary_geodesic, unitary_log, Geodesic, SpectralLog,
};
