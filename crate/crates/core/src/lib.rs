//! Numerical classification of parametrized families of real functions and
//! sequences: window chains between member graphs, orbit-separation criteria
//! for sequences, and a sensitivity taxonomy from convergence along parameter
//! sequences.

pub mod classifier;
pub mod cli;
pub mod discrete;
pub mod error;
pub mod expr;
pub mod families;
pub mod model;
pub mod report;
pub mod scanner;
pub mod taxonomy;

pub use classifier::{classify_kind, Verdict};
pub use error::{Error, Result};
pub use families::{builtin_catalog, find_family, FamilySpec};
pub use model::{Label, Parameter, RealInterval, ScanConfig, Strength, Window, WindowKind};
pub use report::Report;
