//! Bipartite pure states, orthogonal state sets, qubit bases, and the
//! ∣0⟩η₀ + ∣1⟩η₁ decomposition, plus the named example sets used throughout
//! the test and acceptance suites.
//!
//! Amplitudes are stored as a d_A × d_B complex matrix with `amps[a][b]` the
//! coefficient of ∣a⟩_A ∣b⟩_B; the canonical flat ordering is row-major,
//! index a·d_B + b. Throughout, ∣0±1⟩ denotes (∣0⟩ ± ∣1⟩)/√2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{C64, CMatrix, singular_values, svd, vdot, vnorm};

/// Frobenius-norm window within which state amplitudes are renormalized
/// rather than rejected; larger deviations are user errors.
pub const NORM_REPAIR_WINDOW: f64 = 1e-6;
/// Pairwise-orthogonality tolerance for state sets.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
/// Threshold on the second Schmidt coefficient below which a state counts
/// as a product state. States are unit-norm, so absolute = relative.
pub const PRODUCT_TOL: f64 = 1e-9;

/// Which party holds a subsystem or measures first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Alice,
    Bob,
}

impl Party {
    pub fn other(self) -> Self {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::Alice => write!(f, "Alice"),
            Party::Bob => write!(f, "Bob"),
        }
    }
}

impl std::str::FromStr for Party {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alice" | "a" => Ok(Party::Alice),
            "bob" | "b" => Ok(Party::Bob),
            other => Err(Error::Validation(format!("unknown party `{other}`"))),
        }
    }
}

/// A normalized bipartite pure state with a display label.
#[derive(Debug, Clone)]
pub struct BipartiteState {
    d_a: usize,
    d_b: usize,
    amps: CMatrix,
    label: String,
}

impl BipartiteState {
    /// Build from flat row-major amplitudes (index a·d_B + b).
    ///
    /// Requires d_A ≥ 2 and d_B ≥ 1. Norms inside `1 ± 1e-6` are repaired by
    /// exact renormalization; anything further off is rejected.
    pub fn new(d_a: usize, d_b: usize, amps: &[C64], label: impl Into<String>) -> Result<Self> {
        if d_a < 2 || d_b < 1 {
            return Err(Error::Dimension(format!(
                "state dimensions must satisfy d_A ≥ 2, d_B ≥ 1; got ({d_a}, {d_b})"
            )));
        }
        if amps.len() != d_a * d_b {
            return Err(Error::Validation(format!(
                "expected {} amplitudes for a {d_a}×{d_b} state, got {}",
                d_a * d_b,
                amps.len()
            )));
        }
        if let Some(idx) = amps.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Validation(format!(
                "non-finite amplitude at flat index {idx}"
            )));
        }
        let norm = vnorm(amps);
        if norm == 0.0 {
            return Err(Error::Validation("zero state vector".into()));
        }
        if (norm - 1.0).abs() > NORM_REPAIR_WINDOW {
            return Err(Error::Validation(format!(
                "state norm {norm:.9} outside the repair window 1 ± {NORM_REPAIR_WINDOW:.0e}"
            )));
        }
        let data: Vec<C64> = amps.iter().map(|c| c / norm).collect();
        Ok(Self {
            d_a,
            d_b,
            amps: CMatrix::from_vec(d_a, d_b, data),
            label: label.into(),
        })
    }

    /// Build from an amplitude matrix (rows = Alice index).
    pub fn from_matrix(amps: CMatrix, label: impl Into<String>) -> Result<Self> {
        let (d_a, d_b) = (amps.rows(), amps.cols());
        Self::new(d_a, d_b, amps.data(), label)
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn amps(&self) -> &CMatrix {
        &self.amps
    }

    /// Amplitudes flattened row-major (a·d_B + b).
    pub fn flat(&self) -> &[C64] {
        self.amps.data()
    }

    /// Amplitude matrix with the given party's index running over rows.
    pub fn amps_for(&self, party: Party) -> CMatrix {
        match party {
            Party::Alice => self.amps.clone(),
            Party::Bob => self.amps.transpose(),
        }
    }

    pub fn party_dim(&self, party: Party) -> usize {
        match party {
            Party::Alice => self.d_a,
            Party::Bob => self.d_b,
        }
    }

    /// ⟨self∣other⟩.
    pub fn inner(&self, other: &Self) -> C64 {
        vdot(self.flat(), other.flat())
    }

    /// Schmidt coefficients, descending.
    pub fn schmidt_values(&self) -> Vec<f64> {
        singular_values(&self.amps)
    }

    /// Number of Schmidt coefficients at or above [`PRODUCT_TOL`].
    pub fn schmidt_rank(&self) -> usize {
        self.schmidt_values().iter().filter(|&&s| s >= PRODUCT_TOL).count()
    }

    /// True exactly when the second Schmidt coefficient is below [`PRODUCT_TOL`].
    pub fn is_product(&self) -> bool {
        let s = self.schmidt_values();
        s.len() < 2 || s[1] < PRODUCT_TOL
    }

    /// Local factors (alice, bob) of a product state, unit-norm, or `None`
    /// for entangled states.
    pub fn product_factors(&self) -> Option<(Vec<C64>, Vec<C64>)> {
        if !self.is_product() {
            return None;
        }
        let dec = svd(&self.amps);
        let alice: Vec<C64> = (0..self.d_a).map(|i| dec.u[(i, 0)]).collect();
        let bob: Vec<C64> = (0..self.d_b).map(|i| dec.v[(i, 0)].conj()).collect();
        Some((alice, bob))
    }

    /// Same state with a replacement label.
    pub fn relabeled(&self, label: impl Into<String>) -> Self {
        let mut s = self.clone();
        s.label = label.into();
        s
    }
}

/// An ordered set of mutually orthogonal states of common dimensions.
#[derive(Debug, Clone)]
pub struct StateSet {
    states: Vec<BipartiteState>,
}

impl StateSet {
    pub fn new(states: Vec<BipartiteState>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Validation("state set must contain at least one state".into()));
        }
        let dims = states[0].dims();
        for (k, s) in states.iter().enumerate() {
            if s.dims() != dims {
                return Err(Error::Dimension(format!(
                    "state {k} has dimensions {:?}, expected {:?}",
                    s.dims(),
                    dims
                )));
            }
        }
        let capacity = dims.0 * dims.1;
        if states.len() > capacity {
            return Err(Error::Validation(format!(
                "{} states cannot be mutually orthogonal in a {}×{} space",
                states.len(),
                dims.0,
                dims.1
            )));
        }
        for i in 0..states.len() {
            for j in (i + 1)..states.len() {
                let overlap = states[i].inner(&states[j]).norm();
                if overlap >= ORTHOGONALITY_TOL {
                    return Err(Error::Validation(format!(
                        "states {i} and {j} are not orthogonal: ∣⟨ψ_{i}∣ψ_{j}⟩∣ = {overlap:.3e}"
                    )));
                }
            }
        }
        Ok(Self { states })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.states[0].dims()
    }

    pub fn party_dim(&self, party: Party) -> usize {
        self.states[0].party_dim(party)
    }

    pub fn states(&self) -> &[BipartiteState] {
        &self.states
    }

    pub fn get(&self, i: usize) -> &BipartiteState {
        &self.states[i]
    }

    /// Subset of the states, in the given index order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let states = indices.iter().map(|&i| self.states[i].clone()).collect();
        Self::new(states)
    }
}

/// An ordered orthonormal qubit basis {v, v⊥} on one party's side,
/// parametrized by Bloch angles:
///
/// v = (cos(θ/2), e^{iφ} sin(θ/2)),  v⊥ = (−e^{−iφ} sin(θ/2), cos(θ/2)).
///
/// The first nonzero component of v is real and nonnegative by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitBasis {
    pub theta: f64,
    pub phi: f64,
    pub party: Party,
}

impl QubitBasis {
    /// Construct with validated angle ranges: θ ∈ [0, π], φ ∈ [0, 2π).
    pub fn new(party: Party, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=std::f64::consts::PI).contains(&theta) || !theta.is_finite() {
            return Err(Error::Validation(format!("θ = {theta} outside [0, π]")));
        }
        if !(0.0..std::f64::consts::TAU).contains(&phi) || !phi.is_finite() {
            return Err(Error::Validation(format!("φ = {phi} outside [0, 2π)")));
        }
        Ok(Self { theta, phi, party })
    }

    /// Construct from arbitrary real angles, wrapping into the canonical
    /// ranges using the sphere identities (θ, φ) ~ (−θ, φ+π) ~ (2π−θ, φ+π).
    pub fn canonical(party: Party, theta: f64, phi: f64) -> Self {
        let tau = std::f64::consts::TAU;
        let pi = std::f64::consts::PI;
        let mut t = theta.rem_euclid(tau);
        let mut p = phi;
        if t > pi {
            t = tau - t;
            p += pi;
        }
        let mut p = p.rem_euclid(tau);
        // θ on the poles leaves φ undetermined; pin it to zero.
        if t < 1e-15 || (pi - t) < 1e-15 {
            p = 0.0;
        }
        if p >= tau {
            p = 0.0;
        }
        Self { theta: t, phi: p, party }
    }

    /// Canonical basis from an arbitrary unit vector on the party's qubit:
    /// the global phase is fixed so the first nonzero component is real ≥ 0.
    pub fn from_vector(party: Party, v: &[C64; 2]) -> Self {
        let a0 = v[0].norm();
        let a1 = v[1].norm();
        let theta = 2.0 * a1.atan2(a0);
        let phi = if a0 > 1e-12 && a1 > 1e-12 {
            (v[1] * v[0].conj()).arg()
        } else {
            0.0
        };
        Self::canonical(party, theta, phi)
    }

    /// The basis vector v.
    pub fn vector(&self) -> [C64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [C64::new(c, 0.0), C64::from_polar(s, self.phi)]
    }

    /// The orthogonal complement v⊥.
    pub fn perp_vector(&self) -> [C64; 2] {
        let (s, c) = (self.theta / 2.0).sin_cos();
        [-C64::from_polar(s, -self.phi), C64::new(c, 0.0)]
    }
}

/// Components of a state in a qubit basis: ∣ψ⟩ = ∣v⟩η₀ + ∣v⊥⟩η₁.
/// The η vectors are unnormalized; their squared norms sum to 1.
#[derive(Debug, Clone)]
pub struct BasisDecomposition {
    pub eta0: Vec<C64>,
    pub eta1: Vec<C64>,
}

impl BasisDecomposition {
    /// ⟨η₀∣η₀⟩ (the probability of the first-mover outcome 0).
    pub fn weight0(&self) -> f64 {
        self.eta0.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn weight1(&self) -> f64 {
        self.eta1.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Decompose a state in a qubit basis on the basis party's side.
///
/// For Bob the roles are swapped by transposing the amplitude matrix, which
/// preserves all inner products; reported η vectors then live on Alice's side.
pub fn decompose_in_basis(state: &BipartiteState, basis: &QubitBasis) -> Result<BasisDecomposition> {
    if state.party_dim(basis.party) != 2 {
        return Err(Error::Dimension(format!(
            "{} holds a {}-dimensional system; the qubit decomposition needs 2",
            basis.party,
            state.party_dim(basis.party)
        )));
    }
    let amps = state.amps_for(basis.party);
    let d_other = amps.cols();
    let v = basis.vector();
    let w = basis.perp_vector();
    let mut eta0 = vec![C64::ZERO; d_other];
    let mut eta1 = vec![C64::ZERO; d_other];
    for b in 0..d_other {
        for a in 0..2 {
            eta0[b] += v[a].conj() * amps[(a, b)];
            eta1[b] += w[a].conj() * amps[(a, b)];
        }
    }
    Ok(BasisDecomposition { eta0, eta1 })
}

/// Rebuild the party-major amplitude matrix ∣v⟩η₀ + ∣v⊥⟩η₁ from a
/// decomposition; used by roundtrip invariants.
pub fn reconstruct_from_decomposition(basis: &QubitBasis, dec: &BasisDecomposition) -> CMatrix {
    let v = basis.vector();
    let w = basis.perp_vector();
    let d_other = dec.eta0.len();
    CMatrix::from_fn(2, d_other, |a, b| v[a] * dec.eta0[b] + w[a] * dec.eta1[b])
}

/// Apply local unitaries U_A ⊗ U_B to every state of a set.
pub fn apply_local_unitaries(set: &StateSet, u_a: &CMatrix, u_b: &CMatrix) -> Result<StateSet> {
    let (d_a, d_b) = set.dims();
    if u_a.rows() != d_a || u_a.cols() != d_a || u_b.rows() != d_b || u_b.cols() != d_b {
        return Err(Error::Dimension(format!(
            "unitary dimensions ({}×{}, {}×{}) do not match state dimensions ({d_a}, {d_b})",
            u_a.rows(),
            u_a.cols(),
            u_b.rows(),
            u_b.cols()
        )));
    }
    for (name, u) in [("U_A", u_a), ("U_B", u_b)] {
        let defect = u.unitarity_defect();
        if defect > 1e-10 {
            return Err(Error::Validation(format!(
                "{name} is not unitary: ‖U†U − I‖_max = {defect:.3e}"
            )));
        }
    }
    let u_b_t = u_b.transpose();
    let states = set
        .states()
        .iter()
        .map(|s| BipartiteState::from_matrix(u_a.matmul(s.amps()).matmul(&u_b_t), s.label()))
        .collect::<Result<Vec<_>>>()?;
    StateSet::new(states)
}

// ── Named example sets ──────────────────────────────────────────────────

/// Parameters for the parametrized named families.
#[derive(Debug, Clone)]
pub enum NamedParams {
    /// Triplet ∣0⟩η₀ + ∣1⟩η₁, ∣0⟩η₀⊥, ∣1⟩η₁⊥ with ‖η₀‖² + ‖η₁‖² = 1.
    Triplet { eta0: [C64; 2], eta1: [C64; 2] },
    /// Product quadruple ∣0⟩φ, ∣1⟩θ, ∣0⟩φ⊥, ∣1⟩θ⊥ with unit φ, θ.
    Product { phi: [C64; 2], theta: [C64; 2] },
}

/// Names accepted by [`named_set`], with a short description each.
pub fn named_set_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("bell4", "the four maximally entangled qubit-pair states"),
        ("computational4", "∣0⟩∣0⟩, ∣1⟩∣0⟩, ∣0⟩∣1⟩, ∣1⟩∣1⟩ — the symmetric product basis"),
        ("gv4", "∣0⟩∣0⟩, ∣1⟩∣0+1⟩, ∣0⟩∣1⟩, ∣1⟩∣0−1⟩ — distinguishable only if Alice measures first"),
        ("domino9", "the nine 3×3 domino product states, jointly indistinguishable by LOCC"),
        ("triplet3", "∣0⟩η₀ + ∣1⟩η₁, ∣0⟩η₀⊥, ∣1⟩η₁⊥ (parametrized; default η₀ = (1/√2, 0), η₁ = (0, 1/√2))"),
        ("product4", "∣0⟩φ, ∣1⟩θ, ∣0⟩φ⊥, ∣1⟩θ⊥ (parametrized; default φ = ∣0⟩, θ = ∣0+1⟩)"),
    ]
}

/// Construct one of the named sets shipped with the library.
///
/// `triplet3` and `product4` take [`NamedParams`]; when omitted, defaults
/// yield {Φ⁺, ∣0⟩∣1⟩, ∣1⟩∣0⟩} and the gv4 set respectively. The domino9
/// ordering follows the conventional indices ψ₁..ψ₉.
pub fn named_set(name: &str, params: Option<NamedParams>) -> Result<StateSet> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::ZERO;
    let o = C64::ONE;
    let h = C64::new(r, 0.0);
    match name {
        "bell4" => {
            let states = vec![
                BipartiteState::new(2, 2, &[h, z, z, h], "Phi+")?,
                BipartiteState::new(2, 2, &[h, z, z, -h], "Phi-")?,
                BipartiteState::new(2, 2, &[z, h, h, z], "Psi+")?,
                BipartiteState::new(2, 2, &[z, h, -h, z], "Psi-")?,
            ];
            StateSet::new(states)
        }
        "computational4" => {
            let states = vec![
                BipartiteState::new(2, 2, &[o, z, z, z], "00")?,
                BipartiteState::new(2, 2, &[z, z, o, z], "10")?,
                BipartiteState::new(2, 2, &[z, o, z, z], "01")?,
                BipartiteState::new(2, 2, &[z, z, z, o], "11")?,
            ];
            StateSet::new(states)
        }
        "gv4" => {
            // product4 with φ = ∣0⟩, θ = ∣0+1⟩, written out so the ∣0−1⟩
            // amplitudes match the conventional signs exactly.
            let states = vec![
                BipartiteState::new(2, 2, &[o, z, z, z], "psi1")?,
                BipartiteState::new(2, 2, &[z, z, h, h], "psi2")?,
                BipartiteState::new(2, 2, &[z, o, z, z], "psi3")?,
                BipartiteState::new(2, 2, &[z, z, h, -h], "psi4")?,
            ];
            StateSet::new(states)
        }
        "domino9" => {
            let mut states = Vec::with_capacity(9);
            let mut push = |label: &str, entries: &[(usize, usize, f64)]| -> Result<()> {
                let mut amps = vec![z; 9];
                for &(a, b, val) in entries {
                    amps[a * 3 + b] = C64::new(val, 0.0);
                }
                states.push(BipartiteState::new(3, 3, &amps, label)?);
                Ok(())
            };
            push("psi1", &[(1, 1, 1.0)])?;
            push("psi2", &[(0, 0, r), (0, 1, r)])?;
            push("psi3", &[(0, 0, r), (0, 1, -r)])?;
            push("psi4", &[(2, 1, r), (2, 2, r)])?;
            push("psi5", &[(2, 1, r), (2, 2, -r)])?;
            push("psi6", &[(1, 0, r), (2, 0, r)])?;
            push("psi7", &[(1, 0, r), (2, 0, -r)])?;
            push("psi8", &[(0, 2, r), (1, 2, r)])?;
            push("psi9", &[(0, 2, r), (1, 2, -r)])?;
            StateSet::new(states)
        }
        "triplet3" => {
            let (eta0, eta1) = match params {
                Some(NamedParams::Triplet { eta0, eta1 }) => (eta0, eta1),
                None => ([h, z], [z, h]),
                Some(other) => {
                    return Err(Error::Validation(format!(
                        "triplet3 expects Triplet parameters, got {other:?}"
                    )));
                }
            };
            let total = vnorm(&eta0).powi(2) + vnorm(&eta1).powi(2);
            if (total - 1.0).abs() > NORM_REPAIR_WINDOW {
                return Err(Error::Validation(format!(
                    "triplet3 requires ‖η₀‖² + ‖η₁‖² = 1, got {total:.9}"
                )));
            }
            // ψ₂ and ψ₃ carry unit vectors orthogonal to the η rays. A zero η
            // leaves its ray unconstrained; ∣0⟩ is the deterministic choice.
            let e0p = unit_perp2(&eta0);
            let e1p = unit_perp2(&eta1);
            let states = vec![
                BipartiteState::new(2, 2, &[eta0[0], eta0[1], eta1[0], eta1[1]], "psi1")?,
                BipartiteState::new(2, 2, &[e0p[0], e0p[1], z, z], "psi2")?,
                BipartiteState::new(2, 2, &[z, z, e1p[0], e1p[1]], "psi3")?,
            ];
            StateSet::new(states)
        }
        "product4" => {
            let (phi, theta) = match params {
                Some(NamedParams::Product { phi, theta }) => (phi, theta),
                None => ([o, z], [h, h]),
                Some(other) => {
                    return Err(Error::Validation(format!(
                        "product4 expects Product parameters, got {other:?}"
                    )));
                }
            };
            for (name, v) in [("φ", &phi), ("θ", &theta)] {
                let n = vnorm(v);
                if (n - 1.0).abs() > NORM_REPAIR_WINDOW {
                    return Err(Error::Validation(format!(
                        "product4 factor {name} has norm {n:.9}, expected 1"
                    )));
                }
            }
            let php = perp2(&phi);
            let thp = perp2(&theta);
            let states = vec![
                BipartiteState::new(2, 2, &[phi[0], phi[1], z, z], "psi1")?,
                BipartiteState::new(2, 2, &[z, z, theta[0], theta[1]], "psi2")?,
                BipartiteState::new(2, 2, &[php[0], php[1], z, z], "psi3")?,
                BipartiteState::new(2, 2, &[z, z, thp[0], thp[1]], "psi4")?,
            ];
            StateSet::new(states)
        }
        other => Err(Error::UnknownName(other.to_string())),
    }
}

/// The vector orthogonal to (a, b) in ℂ²: (−b̄, ā), not normalized.
pub fn perp2(v: &[C64; 2]) -> [C64; 2] {
    [-v[1].conj(), v[0].conj()]
}

/// Unit vector orthogonal to v in ℂ²; falls back to ∣0⟩ when v ≈ 0.
fn unit_perp2(v: &[C64; 2]) -> [C64; 2] {
    let n = vnorm(v);
    if n < 1e-9 {
        return [C64::ONE, C64::ZERO];
    }
    let p = perp2(v);
    [p[0] / n, p[1] / n]
}

// ── Canonical JSON document ─────────────────────────────────────────────

#[derive(Debug, Serialize, Deserialize)]
struct StateDoc {
    label: String,
    amps: Vec<[f64; 2]>,
}

/// Canonical on-disk representation:
/// `{"dims":[dA,dB],"states":[{"label":…,"amps":[[re,im],…]},…]}` with
/// amps of length dA·dB in row-major order.
#[derive(Debug, Serialize, Deserialize)]
struct StateSetDoc {
    dims: [usize; 2],
    states: Vec<StateDoc>,
}

/// Serialize a set to the canonical JSON document.
pub fn set_to_json(set: &StateSet) -> String {
    let (d_a, d_b) = set.dims();
    let doc = StateSetDoc {
        dims: [d_a, d_b],
        states: set
            .states()
            .iter()
            .map(|s| StateDoc {
                label: s.label().to_string(),
                amps: s.flat().iter().map(|c| [c.re, c.im]).collect(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("document serialization cannot fail")
}

/// Parse the canonical JSON document into a validated state set.
pub fn set_from_json(text: &str) -> Result<StateSet> {
    let doc: StateSetDoc = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let [d_a, d_b] = doc.dims;
    let states = doc
        .states
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            let amps: Vec<C64> = s.amps.iter().map(|&[re, im]| C64::new(re, im)).collect();
            BipartiteState::new(d_a, d_b, &amps, s.label)
                .map_err(|e| Error::Parse(format!("state {k}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    StateSet::new(states)
}
