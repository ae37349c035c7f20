//! Core library: exact q-expansion arithmetic, eigenform coefficient
//! acquisition with Hecke extension, the maximal Galois-image counting
//! model over Z/m, and the prime/gcd statistics built on top of them.

pub mod arith;
pub mod coeffs;
pub mod error;
pub mod galois;
pub mod qseries;
pub mod sieve;
pub mod stats;

pub use coeffs::{
    CoefficientTable, FormDescriptor, FullCoefficientTable, PrimeCoefficientTable, Source,
};
pub use error::{Error, Result};
pub use galois::{ImageCounts, TraceDetHistogram, WeightPair};
pub use qseries::{EisensteinKind, Level1Form, QSeries};
pub use stats::{DensityEstimate, ExperimentConfig, FormPairDataset};
