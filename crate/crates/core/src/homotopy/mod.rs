//! Edge paths on Γ and the constructive homotopies between them.

pub mod control;
pub mod diam;
pub mod path;
pub mod primitive;
pub mod refdisk;

pub use control::{
    budget_c, budget_c_affine, budget_d, eliminate_planes, four_to_four_at, four_to_two_at, pinch, pinch_at, reduce,
    shorten, shorten_at, ReduceOutcome, DEFAULT_K,
};
pub use diam::{diam_connect, diam_power, diam_step, DiamChain};
pub use path::{apply_move, EdgePath, Move, MoveKind, MoveLog, VertexRecord, Worker};
pub use primitive::{
    contract_loop_at, contract_primitive, orthogonalize_at, orthogonalize_primitive, pl_invariant, pl_reduce,
    transform_at, PrimitivePath,
};
pub use refdisk::ReferenceDisk;
