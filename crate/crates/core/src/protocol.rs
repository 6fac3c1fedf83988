//! Kraus-operator measurement engine and the two-step discrimination
//! protocol: the first mover measures their qubit in a witness basis, the
//! other party measures in the orthonormal basis induced on their side by
//! the first outcome, and the joint outcome names the state.

use serde::{Deserialize, Serialize};

use crate::basis_search::{FORM_CHECK_TOL, is_distinguishing_basis};
use crate::error::{Error, Result};
use crate::numerics::{C64, CMatrix, MatrixDoc, vdot, vnorm};
use crate::states::{BipartiteState, Party, QubitBasis, StateSet, decompose_in_basis};

/// Completeness tolerance: Σ M†M must equal the identity this closely.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Outcome probabilities below this are treated as zero (no post-state).
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// A general measurement as a list of Kraus operators on the joint space,
/// one per outcome.
#[derive(Debug, Clone)]
pub struct KrausMeasurement {
    operators: Vec<CMatrix>,
}

impl KrausMeasurement {
    /// Validate completeness: Σ_m M_m†M_m = I within [`COMPLETENESS_TOL`].
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::Validation("a measurement needs at least one outcome".into()));
        }
        let dim = operators[0].cols();
        for (m, op) in operators.iter().enumerate() {
            if op.cols() != dim || op.rows() != dim {
                return Err(Error::Dimension(format!(
                    "Kraus operator {m} is {}×{}, expected {dim}×{dim}",
                    op.rows(),
                    op.cols()
                )));
            }
        }
        let mut sum = CMatrix::zeros(dim, dim);
        for op in &operators {
            sum = sum.add(&op.adjoint().matmul(op));
        }
        let defect = sum.sub(&CMatrix::identity(dim)).max_abs();
        if defect > COMPLETENESS_TOL {
            return Err(Error::Validation(format!(
                "measurement is incomplete: ‖ΣM†M − I‖_max = {defect:.3e}"
            )));
        }
        Ok(Self { operators })
    }

    /// Projective measurement onto an orthonormal basis of the joint space.
    pub fn projective(basis_vectors: &[Vec<C64>]) -> Result<Self> {
        let ops = basis_vectors.iter().map(|v| CMatrix::outer(v, v)).collect();
        Self::new(ops)
    }

    /// A local projective measurement onto `party`'s basis vectors, each
    /// pre-tensored with the identity on the other side.
    pub fn local_projective(
        party: Party,
        vectors: &[Vec<C64>],
        d_a: usize,
        d_b: usize,
    ) -> Result<Self> {
        let ops = vectors
            .iter()
            .map(|v| {
                let p = CMatrix::outer(v, v);
                match party {
                    Party::Alice => p.kron(&CMatrix::identity(d_b)),
                    Party::Bob => CMatrix::identity(d_a).kron(&p),
                }
            })
            .collect();
        Self::new(ops)
    }

    pub fn outcomes(&self) -> usize {
        self.operators.len()
    }

    pub fn operator(&self, m: usize) -> &CMatrix {
        &self.operators[m]
    }
}

/// Apply a measurement: outcome probabilities p(m) = ⟨ψ∣M_m†M_m∣ψ⟩ with the
/// renormalized post-state M_m∣ψ⟩/√p(m) for every outcome above
/// [`PROBABILITY_FLOOR`]. Probabilities over all outcomes sum to 1.
pub fn apply_measurement(
    state: &BipartiteState,
    meas: &KrausMeasurement,
) -> Result<Vec<(usize, f64, BipartiteState)>> {
    let (d_a, d_b) = state.dims();
    let dim = d_a * d_b;
    if meas.operator(0).cols() != dim {
        return Err(Error::Dimension(format!(
            "measurement acts on dimension {}, state lives in {dim}",
            meas.operator(0).cols()
        )));
    }
    let psi = state.flat();
    let mut out = Vec::new();
    for (m, op) in meas.operators.iter().enumerate() {
        let mapped = op.matvec(psi);
        let p = mapped.iter().map(|c| c.norm_sqr()).sum::<f64>();
        if p <= PROBABILITY_FLOOR {
            continue;
        }
        let scale = 1.0 / p.sqrt();
        let post: Vec<C64> = mapped.iter().map(|c| c * scale).collect();
        let post_state = BipartiteState::new(d_a, d_b, &post, state.label())?;
        out.push((m, p, post_state));
    }
    Ok(out)
}

/// Where a joint outcome points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomeLabel {
    /// The protocol declares this state label.
    State(String),
    /// Padding direction never hit by a set member; declared a failure.
    Abort,
}

/// The two-step protocol: a first-mover qubit basis plus one responder basis
/// per first outcome, with the joint outcome map.
#[derive(Debug, Clone)]
pub struct TwoStepProtocol {
    /// First mover's measurement basis (carries the party).
    pub first_basis: QubitBasis,
    /// Responder's orthonormal basis for first outcomes 0 and 1.
    pub responder_bases: [Vec<Vec<C64>>; 2],
    /// `outcome_map[b][k]`: meaning of (first outcome b, responder outcome k).
    pub outcome_map: [Vec<OutcomeLabel>; 2],
}

/// Build the protocol from a valid witness basis.
///
/// For each first outcome b, the responder basis starts with the normalized
/// nonzero η_b vectors (pairwise orthogonal because the witness is valid,
/// then exactly orthonormalized), completed to a full basis by Gram–Schmidt
/// over the canonical unit vectors in index order; completion directions
/// map to [`OutcomeLabel::Abort`].
pub fn build_protocol(set: &StateSet, witness: &QubitBasis) -> Result<TwoStepProtocol> {
    build_protocol_with_tol(set, witness, FORM_CHECK_TOL)
}

/// [`build_protocol`] with an explicit witness acceptance tolerance.
pub fn build_protocol_with_tol(
    set: &StateSet,
    witness: &QubitBasis,
    tol: f64,
) -> Result<TwoStepProtocol> {
    if !is_distinguishing_basis(set, witness, tol)? {
        return Err(Error::WitnessInvalid(format!(
            "basis (θ = {:.6}, φ = {:.6}) for {} does not satisfy the η-orthogonality \
             conditions at tolerance {tol:.0e}",
            witness.theta, witness.phi, witness.party
        )));
    }
    let d_other = match witness.party {
        Party::Alice => set.dims().1,
        Party::Bob => set.dims().0,
    };

    let decs: Vec<_> = set
        .states()
        .iter()
        .map(|s| decompose_in_basis(s, witness))
        .collect::<Result<Vec<_>>>()?;

    let mut responder_bases: [Vec<Vec<C64>>; 2] = [Vec::new(), Vec::new()];
    let mut outcome_map: [Vec<OutcomeLabel>; 2] = [Vec::new(), Vec::new()];

    for b in 0..2 {
        let mut basis: Vec<Vec<C64>> = Vec::with_capacity(d_other);
        let mut labels: Vec<OutcomeLabel> = Vec::with_capacity(d_other);
        for (i, dec) in decs.iter().enumerate() {
            let eta = if b == 0 { &dec.eta0 } else { &dec.eta1 };
            let norm = vnorm(eta);
            if norm <= 1e-8 {
                // This state never produces first outcome b.
                continue;
            }
            let mut v: Vec<C64> = eta.iter().map(|c| c / norm).collect();
            // The η are orthogonal to working precision; clean up exactly.
            for u in &basis {
                let overlap = vdot(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
            let rnorm = vnorm(&v);
            if rnorm < 1.0 - 1e-6 {
                return Err(Error::WitnessInvalid(format!(
                    "η vectors for first outcome {b} are not orthogonal enough: \
                     state {i} collapses under orthonormalization"
                )));
            }
            for x in &mut v {
                *x /= rnorm;
            }
            basis.push(v);
            labels.push(OutcomeLabel::State(set.get(i).label().to_string()));
        }
        // Complete with canonical unit vectors.
        for k in 0..d_other {
            if basis.len() == d_other {
                break;
            }
            let mut v = vec![C64::ZERO; d_other];
            v[k] = C64::ONE;
            for u in &basis {
                let overlap = vdot(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
            let norm = vnorm(&v);
            if norm < 1e-10 {
                continue; // already spanned
            }
            for x in &mut v {
                *x /= norm;
            }
            basis.push(v);
            labels.push(OutcomeLabel::Abort);
        }
        responder_bases[b] = basis;
        outcome_map[b] = labels;
    }

    Ok(TwoStepProtocol {
        first_basis: *witness,
        responder_bases,
        outcome_map,
    })
}

/// Exact per-state outcome distribution and success probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateReport {
    pub label: String,
    /// (first outcome, responder outcome, probability, meaning).
    pub outcomes: Vec<(usize, usize, f64, OutcomeLabel)>,
    pub success: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationReport {
    pub per_state: Vec<StateReport>,
    pub min_success: f64,
}

/// Run the protocol on every state of the set, composing the two projective
/// measurements through the Kraus engine. Distributions are exact, not
/// sampled; each must sum to 1 within 1e-9.
pub fn simulate(protocol: &TwoStepProtocol, set: &StateSet) -> Result<SimulationReport> {
    let (d_a, d_b) = set.dims();
    let party = protocol.first_basis.party;
    let v = protocol.first_basis.vector().to_vec();
    let w = protocol.first_basis.perp_vector().to_vec();
    let first = KrausMeasurement::local_projective(party, &[v, w], d_a, d_b)?;
    let responder_meas: [KrausMeasurement; 2] = [
        KrausMeasurement::local_projective(party.other(), &protocol.responder_bases[0], d_a, d_b)?,
        KrausMeasurement::local_projective(party.other(), &protocol.responder_bases[1], d_a, d_b)?,
    ];

    let mut per_state = Vec::with_capacity(set.len());
    let mut min_success = f64::INFINITY;
    for state in set.states() {
        let mut outcomes = Vec::new();
        let mut success = 0.0;
        let mut total = 0.0;
        for (b, p_first, post) in apply_measurement(state, &first)? {
            for (k, p_second, _final_state) in apply_measurement(&post, &responder_meas[b])? {
                let p = (p_first * p_second).max(0.0);
                total += p;
                let meaning = protocol.outcome_map[b][k].clone();
                if meaning == OutcomeLabel::State(state.label().to_string()) {
                    success += p;
                }
                outcomes.push((b, k, p, meaning));
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Validation(format!(
                "outcome distribution for `{}` sums to {total:.12}, expected 1",
                state.label()
            )));
        }
        min_success = min_success.min(success);
        per_state.push(StateReport {
            label: state.label().to_string(),
            outcomes,
            success,
        });
    }
    Ok(SimulationReport { per_state, min_success })
}

/// Serialization shim for measurements (row-major [re, im] matrices).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausDoc {
    pub operators: Vec<MatrixDoc>,
}

impl KrausDoc {
    pub fn from_measurement(m: &KrausMeasurement) -> Self {
        Self { operators: m.operators.iter().map(MatrixDoc::from_matrix).collect() }
    }
}
