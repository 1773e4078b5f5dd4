//! Dynamic programs on bidirectional trees.

mod bmr;
mod engine;
mod msr;
mod search;

pub use bmr::{dp_bmr_exact, mmr_via_bmr, BmrOutcome, BmrTable, MmrOutcome};
pub(crate) use engine::{Engine, EngineOptions, StorageBuckets};
pub use engine::{FrontierEntry, MsrTable};
pub use msr::{dp_msr_tree, dp_msr_tree_fptas, dp_msr_tree_with_table, fptas_rounds, fptas_rounds_by, MsrTreeOutcome};
pub use search::{dual_binary_search, SearchOutcome};
