//! parasol: numerical analysis of 2b-order parabolic systems.
//!
//! The toolkit covers: Petrovskii parabolicity and strong-ellipticity sweeps
//! of the matrix symbol, fundamental matrices of frozen-coefficient systems
//! via Fourier-Laplace inversion, singular-integral potentials with kernels
//! of mixed parabolic homogeneity, parabolic Sobolev/Morrey/BMO/VMO norms,
//! the (p, lambda)-plane regularity classifier, and reproduction of the
//! classical counterexample families for non-parabolic systems.

pub mod classifier;
pub mod cli;
pub mod counterexamples;
pub mod error;
pub mod field;
pub mod fft;
pub mod fit;
pub mod fundsol;
pub mod gridio;
pub mod norms;
pub mod potentials;
pub mod specfile;
pub mod symbol;

pub use error::{Error, Result};
