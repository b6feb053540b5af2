//! Search and verification engine for partition regularity of sum-product
//! patterns over the rationals and the naturals.
//!
//! The crate is organized bottom-up:
//!
//! - [`arith`]: exact rationals, the size function, bounded enumeration, and
//!   good linear forms.
//! - [`coloring`]: finitely described colorings, including the auxiliary
//!   product colorings and affine compositions used by the constructions.
//! - [`pattern`] and [`search`]: formal patterns, instantiation, and
//!   canonical-order witness search.
//! - [`searchers`]: Schur, van der Waerden, polynomial and multidimensional
//!   polynomial van der Waerden, Folkman, and Ramsey-degree searches.
//! - [`pipeline`]: step-by-step execution of the constructive arguments
//!   with every intermediate claim checked.
//! - [`sat`]: CNF encodings of avoidance problems and an external solver
//!   client.
//! - [`store`]: run configurations and the JSON result store.

pub mod arith;
pub mod coloring;
pub mod error;
pub mod pattern;
pub mod pipeline;
pub mod sat;
pub mod search;
pub mod searchers;
pub mod store;

pub use arith::{
    enumerate_good_polys, enumerate_rationals, eval_good_poly, CoeffMode, GoodPolynomial,
    Rational, RationalMode,
};
pub use coloring::{ColorId, Coloring, Descriptor, Domain};
pub use error::{Error, Result};
pub use pattern::{catalog_pattern, is_monochromatic, sum_product_pattern, Pattern, Term};
pub use search::{pattern_search, SearchBudget, SearchOutcome, VarDomain, Witness};
