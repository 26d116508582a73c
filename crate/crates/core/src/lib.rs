//! Exact verification toolkit for the subspace lattice, weighted hypercubes,
//! symplectic dual polar graphs and commutative association schemes.

pub mod cube;
pub mod dense;
pub mod dualpolar;
pub mod error;
pub mod field;
pub mod fq;
pub mod graph;
pub mod lattice;
pub mod operator;
pub mod poly;
pub mod qcomb;
pub mod quotient;
pub mod report;
pub mod scalar;
pub mod scheme;
pub mod suites;
pub mod ws;

pub use error::{Error, Result};
pub use field::{Field, FieldElem};
pub use fq::{MatFq, Subspace};
pub use operator::Operator;
pub use report::{Check, Report, Status};
pub use scalar::{ExactScalar, QuarterInt, ScalarRing};
