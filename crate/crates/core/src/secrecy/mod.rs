//! Security measures of a protocol instance: the error probability, the
//! user's information about the query index, and the user's information about
//! files other than the one retrieved. All are exact or computed from full
//! enumerations; nothing here samples except the choice of file sets for
//! large cells.
//!
//! The default paths work on the frame backend's Bell-diagonal description of
//! the views; the `*_dense` variants rebuild every state as a matrix and serve
//! as the reference.

pub mod bounds;
pub mod cell;
pub mod diagonal;
pub mod error_measure;
pub mod lemma1;
pub mod report;
pub mod server;
pub mod user;
pub mod views;

pub use bounds::{reduced_first, reduced_state_bound, trace_power, TraceBound};
pub use cell::{grid, Cell, Scheme, EXHAUSTIVE_FILE_SETS, SAMPLED_FILE_SETS};
pub use diagonal::{DiagonalLayout, DiagonalTable, DiagonalViews};
pub use error_measure::{error_measure, ErrorReport};
pub use lemma1::{lemma1_check, lemma1_check_dense, Lemma1Entry, Lemma1Report};
pub use report::{decimal, rational, Checks, SecurityReport};
pub use server::{
    server_secrecy, server_secrecy_dense, server_secrecy_filtered, BetaEntry, ServerReport,
};
pub use user::{user_secrecy, GammaEntry, UserReport};
pub use views::{answer_code, BlockViews, ViewFilter};
