//! Deciding exact local discrimination of orthogonal bipartite pure states.
//!
//! Alice and Bob share one of several known, mutually orthogonal pure states
//! and may use only local operations and classical communication (LOCC) to
//! find out which. This crate decides when that is possible, constructs the
//! witnesses (a measurement basis and a two-step protocol) when it is, and
//! certifies impossibility when it is not:
//!
//! - [`basis_search`]: numerical search over the Bloch sphere for a first-
//!   mover basis that splits the set into branch-wise orthogonal components.
//! - [`classify`]: exact classification of 2×2 sets, including the
//!   asymmetric cases where only one party may start.
//! - [`povm`]: enumeration of POVM elimination branches proving that no
//!   nontrivial first measurement exists — nonlocality without entanglement.
//! - [`protocol`]: Kraus-operator measurement engine and exact simulation of
//!   the two-step discrimination protocol.
//! - [`numerics`]: the dense complex linear algebra underneath.
//! - [`states`]: the data model and the named example sets.
//! - [`random`]: seeded generators for property and acceptance testing.

pub mod basis_search;
pub mod classify;
pub mod error;
pub mod numerics;
pub mod povm;
pub mod protocol;
pub mod random;
pub mod states;

pub use basis_search::{SearchConfig, SearchResult, SearchStatus, find_basis, is_distinguishing_basis, orthogonality_residual};
pub use classify::{Verdict, VerdictKind, classify_2x2, classify_2xn_first, product_count};
pub use error::{Error, Result};
pub use numerics::{C64, CMatrix, HermitianOperator, HermitianSubspace};
pub use povm::{
    BranchOutcome, BranchRecord, EliminationBranch, FirstMoveVerdict, FirstMoveVerdictKind,
    admissible_subspace, branch_witness, first_move_verdict, nwe_report,
    verify_nonlocality_without_entanglement,
};
pub use protocol::{
    KrausMeasurement, SimulationReport, TwoStepProtocol, apply_measurement, build_protocol,
    build_protocol_with_tol, simulate,
};
pub use states::{
    BasisDecomposition, BipartiteState, NamedParams, Party, QubitBasis, StateSet,
    apply_local_unitaries, decompose_in_basis, named_set, named_set_catalog, set_from_json,
    set_to_json,
};
