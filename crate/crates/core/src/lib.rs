//! Exact, size-optimal confidence intervals for the number of special items
//! `M` in a finite population of size `N`, from a sample of size `n` drawn
//! without replacement.
//!
//! ```
//! use hyperci::{cstar_table, Hypergeometric, Params};
//!
//! let kernel = Hypergeometric::new(Params::new(500, 100, 0.05).unwrap());
//! let table = cstar_table(&kernel).unwrap();
//! assert_eq!(table.interval(13), (40, 102));
//! assert_eq!(table.total_size(), 7129);
//! ```

pub mod acceptance;
pub mod certify;
pub mod error;
pub mod hypergeom;
pub mod invert;
pub mod io;
pub mod model;
pub mod monotonize;
pub mod oracle;
pub mod pivot;

pub use acceptance::{amo_half, amo_half_with, amo_interval, reflect_full, AcceptanceFamily, Stage};
pub use error::{Error, Result};
pub use hypergeom::{Hypergeometric, LogProb, Params, Support};
pub use invert::{
    coverage, coverage_curve, cstar_table, cstar_table_with, invert, total_size_diff, ConfidenceTable, Method,
};
pub use model::MassModel;
pub use monotonize::{adjust, center_interval, construct, optimal_family, symmetrize, AdjustmentTrace, Construction};
pub use oracle::{parse_rational, ExactProb, Oracle, ORACLE_CAP};
pub use pivot::{pivot_ci, pivot_ci_with, pivot_table, pivot_table_with, Search};
