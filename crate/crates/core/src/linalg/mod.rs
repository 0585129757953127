//! Exact rational matrix algebra: the negated intersection matrix `M`, its
//! Moore–Penrose pseudoinverse, effective resistances and PSD certificates.

mod bareiss;
mod sparse;
mod matrix;
mod pinv;
mod psd;

pub use bareiss::{bareiss_inverse, BareissInverse};
pub use matrix::RatMatrix;
pub use pinv::{
    build_laplacian, effective_resistance, penrose_report, pseudoinverse, pseudoinverse_bordered,
    PenroseReport, PinvMethod, PseudoinverseResult,
};
pub use psd::{psd_certificate, PsdCertificate, PsdWitness};
