//! Square-root MMSE V-BLAST detection with a division-light inverse Cholesky
//! factorization, operation counting, and a Monte Carlo harness.
//!
//! ```
//! use vblast::simkit::gen_channel;
//! use vblast::{detect_proposed, AssumedOrder, Constellation, DetectionProblem};
//!
//! let cons = Constellation::qpsk();
//! let h = gen_channel(1, 4, 4);
//! let sent: Vec<_> = (0..4).map(|k| cons.point(k)).collect();
//! let received: Vec<_> = (0..4)
//!     .map(|r| (0..4).map(|c| h.row(r)[c] * sent[c]).sum())
//!     .collect();
//! let problem = DetectionProblem::new(h, received, 1e-3, cons).unwrap();
//! let result = detect_proposed(&problem, &AssumedOrder::identity(4)).unwrap();
//! assert_eq!(result.decisions, sent);
//! ```

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constellation;
pub mod detectors;
pub mod error;
pub mod exec;
pub mod flops;
pub mod invchol;
pub mod matcore;
pub mod report;
pub mod rotations;
pub mod simkit;

#[cfg(test)]
mod testutil;

pub use constellation::{Constellation, ConstellationKind};
pub use detectors::{
    detect_oracle, detect_previous, detect_proposed, AssumedOrder, DetectionProblem,
    DetectionResult, DetectorKind, Feedback,
};
pub use error::{Error, Result};
pub use flops::{FlopCounter, FlopEstimate};
pub use invchol::{conventional_inv_chol, inv_chol, InvCholFactor};
pub use matcore::{ComplexMatrix, HermitianMatrix, Permutation, UpperTriangular, C64};
pub use rotations::{retriangularize, TriangularizationMode};
