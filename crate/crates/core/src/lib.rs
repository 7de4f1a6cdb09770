#![no_std]

extern crate alloc;

pub mod algebra;
pub mod basic;
pub mod certificate;
pub mod config;
pub mod error;
pub mod grid;
pub mod hnj;
pub mod homotopy;
pub mod ktheory;
pub mod linalg;
pub mod pipelines;
pub mod random;
pub mod sequence;

pub use config::{Resolution, Tolerances};
pub use error::{Endpoint, Error, Result};
pub use linalg::{ComplexMatrix, C64};
