//! Hilbert vectors of Jacobian modules of reduced plane curves.
//!
//! The crate computes, for a ternary form `f`, the graded dimensions of the
//! Milnor algebra `S/J_f` and of the Jacobian module `N(f)` (the saturation of
//! `J_f` modulo `J_f`) by exact linear algebra, recovers the degrees of a
//! minimal resolution of the syzygy module of `J_f`, and checks the closed-form
//! descriptions of `N(f)` for free, nearly free, plus-one generated, 3-syzygy,
//! maximal Tjurina and nodal curves against that oracle.

pub mod check;
pub mod error;
pub mod field;
pub mod graded;
pub mod hilbert;
pub mod linalg;
pub mod parse;
pub mod poly;
pub mod report;
pub mod syzygy;
pub mod theory;

mod par;

pub use check::{analyze, analyze_formulas, Analysis, CheckStatus};
pub use error::AnalysisError;
pub use field::{Field, FieldConfig, FieldError, FieldKind, Fp, PrimeField, RationalField};
pub use graded::{CurveEngine, JacobianModuleVector, MilnorHilbert};
pub use hilbert::{HilbertVector, Source};
pub use linalg::{DenseMatrix, RrefResult, Strategy};
pub use parse::{parse_poly, parse_poly_in, ParseError};
pub use poly::{monomial_basis, HomogeneousPoly, JacobianTriple, Monomial, Var};
pub use report::{AnalysisReport, RunConfig};
pub use syzygy::{ResolutionProfile, SearchHint};
pub use theory::{CurveClass, CurveTag, NodalMetadata};
