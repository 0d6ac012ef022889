//! Variable selection for boolean symbolic objects.
//!
//! A [`KnowledgeBase`] holds symbolic objects (assertions) described by
//! set-valued variables. [`minset_plus`] picks a small subset of variables
//! that keeps the objects as distinguishable from each other as the full set
//! does, using a per-variable discrimination matrix. [`minset`] and
//! [`minset_partial_naive`] are the boolean and matrix-free variants.

pub mod discrimination;
pub mod error;
pub mod experiment;
pub mod generator;
pub mod io;
pub mod measures;
pub mod model;
pub mod quality;
pub mod selection;

pub use discrimination::{DiscriminationMatrix, MAX_YD_LABEL, TOLERANCE};
pub use error::{Error, Result};
pub use generator::{
    generate_individuals, generate_objects, impute_missing, refine_interval, synthetic_kb, synthetic_kb_with, GenerationSpec, OutputKind,
    SyntheticShape,
};
pub use measures::Measure;
pub use model::{
    Assertion, Domain, IndividualTable, Interval, IntervalUnion, KnowledgeBase, Scalar, ValueSet, VariableKind,
    VariableSpec,
};
pub use quality::{
    extent_discrimination, overlap_percentage, quality_report, real_extent, QualityReport, SelectionSummary,
};
pub use selection::{
    minset, minset_on_matrix, minset_partial_naive, minset_plus, minset_plus_on_matrix, naive_select, run, Algorithm,
    SelectionResult, StepAction, TraceStep,
};
