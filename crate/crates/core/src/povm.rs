//! Can a party perform *any* nontrivial first measurement?
//!
//! A first measurement consistent with exact discrimination must, for every
//! pair of states, either keep the pair orthogonal or eliminate one member
//! outright. For a PSD element M this splits into elimination branches: a
//! subset E of states with (M⊗I)∣ψ_i⟩ = 0, plus ⟨ψ_i∣(M⊗I)∣ψ_j⟩ = 0 for all
//! surviving pairs. Each branch is a real-linear constraint system on the
//! Hermitian space; a branch yields a witness when its solution space
//! contains a PSD element that is not a multiple of the identity. If all 2^l
//! branches fail, every consistent POVM element is trivial and the party
//! cannot go first — for an all-product set on both sides, that is
//! nonlocality without entanglement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{
    CMatrix, HermitianFunctional, HermitianOperator, HermitianSubspace, hermitian_nullspace,
    psd_feasible,
};
use crate::states::{Party, StateSet};

/// Cap on the acting party's dimension (constraint systems stay desk-scale).
pub const MAX_PARTY_DIM: usize = 6;
/// Cap on the set size (2^l branches).
pub const MAX_SET_SIZE: usize = 12;
/// Constraint-satisfaction tolerance for emitted witnesses.
pub const WITNESS_CONSTRAINT_TOL: f64 = 1e-8;
/// Minimum Frobenius distance from span{I} for a witness to count as nontrivial.
pub const NONTRIVIALITY_TOL: f64 = 1e-6;

/// A choice of which states the POVM element annihilates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EliminationBranch {
    /// Zero-based indices into the state set, strictly increasing.
    pub eliminated: Vec<usize>,
}

impl EliminationBranch {
    pub fn new(mut eliminated: Vec<usize>) -> Self {
        eliminated.sort_unstable();
        eliminated.dedup();
        Self { eliminated }
    }

    pub fn empty() -> Self {
        Self { eliminated: Vec::new() }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.eliminated.binary_search(&i).is_ok()
    }
}

impl std::fmt::Display for EliminationBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.eliminated.is_empty() {
            write!(f, "{{}}")
        } else {
            write!(f, "{{")?;
            for (k, i) in self.eliminated.iter().enumerate() {
                if k > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{i}")?;
            }
            write!(f, "}}")
        }
    }
}

/// How one branch was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchOutcome {
    /// The solution space is exactly span{I}: only trivial elements.
    TrivialOnly,
    /// A nontrivial PSD element exists (witness emitted).
    Witness,
    /// No PSD element is consistent with this branch.
    Infeasible,
}

/// Per-branch certificate entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BranchRecord {
    pub branch: EliminationBranch,
    pub subspace_dim: usize,
    pub outcome: BranchOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FirstMoveVerdictKind {
    CannotGoFirst,
    MayGoFirst,
}

/// Whether a party can open an exact-discrimination protocol with a
/// nontrivial measurement.
///
/// `CannotGoFirst` is exact: the certificate covers every branch, so every
/// consistent POVM element is proportional to the identity. `MayGoFirst`
/// only asserts a valid nontrivial first move exists — a one-step necessary
/// condition, not a full distinguishability claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FirstMoveVerdict {
    pub kind: FirstMoveVerdictKind,
    pub party: Party,
    pub witness: Option<HermitianOperator>,
    pub certificate: Vec<BranchRecord>,
}

impl FirstMoveVerdict {
    pub fn may_go_first(&self) -> bool {
        self.kind == FirstMoveVerdictKind::MayGoFirst
    }
}

/// Precomputed constraint rows for every pair and every elimination choice,
/// so branch enumeration only stacks slices.
struct ConstraintCache {
    dim: usize,
    /// Two real rows per unordered pair (i, j), i < j.
    pair_rows: Vec<((usize, usize), [HermitianFunctional; 2])>,
    /// For each state, 2·d·d_other real rows expressing (M⊗I)∣ψ⟩ = 0.
    elim_rows: Vec<Vec<HermitianFunctional>>,
}

fn build_cache(set: &StateSet, party: Party) -> ConstraintCache {
    let d = set.party_dim(party);
    let party_major: Vec<CMatrix> = set.states().iter().map(|s| s.amps_for(party)).collect();
    let d_other = party_major[0].cols();

    // ⟨ψ_i∣(M⊗I)∣ψ_j⟩ = tr(M · A_j A_i†): two real functionals per pair.
    let mut pair_rows = Vec::new();
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            let k = party_major[j].matmul(&party_major[i].adjoint());
            pair_rows.push((
                (i, j),
                [
                    HermitianFunctional::re_trace(k.clone()),
                    HermitianFunctional::im_trace(k),
                ],
            ));
        }
    }

    // (M·A_i)[r][c] = tr(M·G) with G carrying column c of A_i in its r-th column.
    let mut elim_rows = Vec::new();
    for amps in &party_major {
        let mut rows = Vec::with_capacity(2 * d * d_other);
        for r in 0..d {
            for c_idx in 0..d_other {
                let mut g = CMatrix::zeros(d, d);
                for k in 0..d {
                    g[(k, r)] = amps[(k, c_idx)];
                }
                rows.push(HermitianFunctional::re_trace(g.clone()));
                rows.push(HermitianFunctional::im_trace(g));
            }
        }
        elim_rows.push(rows);
    }

    ConstraintCache { dim: d, pair_rows, elim_rows }
}

fn branch_constraints(cache: &ConstraintCache, branch: &EliminationBranch) -> Vec<HermitianFunctional> {
    let mut rows = Vec::new();
    for ((i, j), fs) in &cache.pair_rows {
        if !branch.contains(*i) && !branch.contains(*j) {
            rows.extend_from_slice(fs);
        }
    }
    for &i in &branch.eliminated {
        rows.extend_from_slice(&cache.elim_rows[i]);
    }
    rows
}

fn check_caps(set: &StateSet, party: Party) -> Result<()> {
    let d = set.party_dim(party);
    if d > MAX_PARTY_DIM {
        return Err(Error::Size(format!(
            "{party} holds a {d}-dimensional system; the verifier caps at {MAX_PARTY_DIM}"
        )));
    }
    Ok(())
}

/// The real-linear space of Hermitian M (acting on `party`'s side) that
/// annihilate every eliminated state and keep every surviving pair
/// orthogonal.
pub fn admissible_subspace(
    set: &StateSet,
    party: Party,
    branch: &EliminationBranch,
) -> Result<HermitianSubspace> {
    check_caps(set, party)?;
    if branch.eliminated.iter().any(|&i| i >= set.len()) {
        return Err(Error::Validation(format!(
            "branch {branch} indexes past the set size {}",
            set.len()
        )));
    }
    let cache = build_cache(set, party);
    let rows = branch_constraints(&cache, branch);
    Ok(hermitian_nullspace(cache.dim, &rows))
}

/// A nontrivial PSD element of the branch's solution space, if one exists.
///
/// Empty branch: the identity always solves it (the input set is orthogonal),
/// so dimension 1 means span{I} exactly and there is nothing nontrivial;
/// dimension ≥ 2 yields the explicit witness I + H/2 with H a unit-norm
/// traceless element — its eigenvalues stay ≥ 1/2, so no eigensolve is
/// needed to certify positivity. Nonempty branch: any PSD element of the
/// space annihilates a state, hence cannot be a nonzero multiple of the
/// identity; delegate existence to the Dykstra feasibility search.
pub fn branch_witness(
    subspace: &HermitianSubspace,
    branch: &EliminationBranch,
) -> Result<Option<HermitianOperator>> {
    if branch.eliminated.is_empty() {
        let d = subspace.ambient_dim();
        let identity = HermitianOperator::identity(d);
        debug_assert!(
            subspace.distance(&identity) < 1e-9 * (d as f64).sqrt(),
            "identity must lie in the empty-branch solution space"
        );
        if subspace.dim() <= 1 {
            return Ok(None);
        }
        // Some basis element has a traceless part of Frobenius norm ≥ 1/√2.
        for b in subspace.basis() {
            let traceless = b.add_scaled(&identity, -b.trace() / d as f64);
            let norm = traceless.frobenius_norm();
            if norm > 0.5 {
                return Ok(Some(identity.add_scaled(&traceless.scale(1.0 / norm), 0.5)));
            }
        }
        unreachable!("a ≥2-dimensional space containing I has a large traceless direction");
    }
    psd_feasible(subspace)
}

/// Exhaustive first-measurement verdict for one party.
///
/// Branches are enumerated by subset size, then lexicographically; the first
/// witness ends the scan. Emitted witnesses are verified (PSD within 1e-9,
/// branch constraints within 1e-8, distance from span{I} above 1e-6) before
/// being returned. An indeterminate branch aborts the verdict: a
/// `CannotGoFirst` certificate must be total.
pub fn first_move_verdict(set: &StateSet, party: Party) -> Result<FirstMoveVerdict> {
    check_caps(set, party)?;
    let l = set.len();
    if l > MAX_SET_SIZE {
        return Err(Error::Size(format!(
            "{l} states means 2^{l} elimination branches; the verifier caps at {MAX_SET_SIZE}"
        )));
    }
    let cache = build_cache(set, party);
    let mut certificate = Vec::with_capacity(1usize << l);

    for branch in subsets_by_size(l) {
        let rows = branch_constraints(&cache, &branch);
        let subspace = hermitian_nullspace(cache.dim, &rows);
        let witness = branch_witness(&subspace, &branch).map_err(|e| match e {
            Error::NumericalIndeterminate(msg) => Error::NumericalIndeterminate(format!(
                "branch {branch} of the {party} verdict: {msg}"
            )),
            other => other,
        })?;

        match witness {
            Some(w) => {
                verify_witness(&w, &rows, &subspace)?;
                certificate.push(BranchRecord {
                    branch: branch.clone(),
                    subspace_dim: subspace.dim(),
                    outcome: BranchOutcome::Witness,
                });
                return Ok(FirstMoveVerdict {
                    kind: FirstMoveVerdictKind::MayGoFirst,
                    party,
                    witness: Some(w),
                    certificate,
                });
            }
            None => {
                let outcome = if branch.eliminated.is_empty() {
                    BranchOutcome::TrivialOnly
                } else {
                    BranchOutcome::Infeasible
                };
                certificate.push(BranchRecord {
                    branch,
                    subspace_dim: subspace.dim(),
                    outcome,
                });
            }
        }
    }

    Ok(FirstMoveVerdict {
        kind: FirstMoveVerdictKind::CannotGoFirst,
        party,
        witness: None,
        certificate,
    })
}

fn verify_witness(
    w: &HermitianOperator,
    rows: &[HermitianFunctional],
    subspace: &HermitianSubspace,
) -> Result<()> {
    let lam_min = w.min_eigenvalue();
    if lam_min < -1e-9 {
        return Err(Error::NumericalIndeterminate(format!(
            "witness fails positivity: λ_min = {lam_min:.3e}"
        )));
    }
    for f in rows {
        let v = f.evaluate(w);
        if v.abs() > WITNESS_CONSTRAINT_TOL {
            return Err(Error::NumericalIndeterminate(format!(
                "witness violates a branch constraint by {v:.3e}"
            )));
        }
    }
    if w.distance_from_scalar() <= NONTRIVIALITY_TOL {
        return Err(Error::NumericalIndeterminate(
            "witness is numerically proportional to the identity".into(),
        ));
    }
    debug_assert!(subspace.distance(w) < 1e-7);
    Ok(())
}

/// All subsets of {0..l}, ordered by size then lexicographically by their
/// sorted index lists.
fn subsets_by_size(l: usize) -> impl Iterator<Item = EliminationBranch> {
    (0..=l).flat_map(move |size| combinations(l, size).into_iter().map(EliminationBranch::new))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn recurse(n: usize, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            recurse(n, k, i + 1, current, out);
            current.pop();
        }
    }
    recurse(n, k, 0, &mut current, &mut out);
    out
}

/// Report combining both parties' verdicts with the separability check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NweReport {
    /// True exactly when the set is fully separable yet neither party can
    /// perform a nontrivial first measurement.
    pub nonlocality_without_entanglement: bool,
    pub all_product: bool,
    pub alice: FirstMoveVerdict,
    pub bob: FirstMoveVerdict,
}

/// Full report for the nonlocality-without-entanglement decision.
pub fn nwe_report(set: &StateSet) -> Result<NweReport> {
    let all_product = crate::classify::product_count(set) == set.len();
    let alice = first_move_verdict(set, Party::Alice)?;
    let bob = first_move_verdict(set, Party::Bob)?;
    Ok(NweReport {
        nonlocality_without_entanglement: all_product
            && !alice.may_go_first()
            && !bob.may_go_first(),
        all_product,
        alice,
        bob,
    })
}

/// True exactly when all states are product states and neither party can go
/// first: a proof of exact LOCC-indistinguishability of a fully separable set.
pub fn verify_nonlocality_without_entanglement(set: &StateSet) -> Result<bool> {
    Ok(nwe_report(set)?.nonlocality_without_entanglement)
}
