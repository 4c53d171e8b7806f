//! The retrieval protocols.
//!
//! * [`primitives`]: teleportation with an operation and two-sum transmission.
//! * [`program`] and [`engine`]: per-block step programs and their
//!   interpreter on the dense or the Bell-frame backend.
//! * [`run_qspir`], [`run_qspir_three_server`], [`run_classical_baseline`]:
//!   full runs producing [`ProtocolTranscript`]s.

pub mod config;
pub mod engine;
pub mod frame;
pub mod primitives;
pub mod program;
mod qspir;
pub mod queries;
mod transcript;

pub use config::{Backend, Mode, ProtocolConfig, Variant};
pub use engine::{execute_block, BlockBranch, BlockView, BranchProbability, Exec};
pub use frame::{frame_swap_update, BellLink, FrameState};
pub use primitives::{
    teleport_branches, teleport_with_operation, two_sum_branches, two_sum_transmit, StepOrder,
    TeleportBranch,
};
pub use program::BlockProgram;
pub use qspir::{
    branch_exponent, run_classical_baseline, run_qspir, run_qspir_ordered, run_qspir_three_server,
    three_server_branches, ThreeServerBranch, MAX_BRANCH_EXPONENT,
};
pub use queries::{make_queries, server_answer, QuerySet};
pub use transcript::{ProtocolKind, ProtocolTranscript};
