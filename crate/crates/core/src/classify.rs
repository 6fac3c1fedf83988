//! Exact classification of orthogonal 2×2 state sets, with asymmetry
//! verdicts, plus the numerical 2×n first-mover decision.
//!
//! The closed-form facts used here:
//! - any two orthogonal states admit a distinguishing basis for either
//!   qubit-holding party;
//! - three orthogonal 2×2 states are LOCC-distinguishable iff at least two
//!   are product states, and the first mover's side is read off the product
//!   pair whose factors on that side are orthogonal;
//! - four orthogonal 2×2 states are LOCC-distinguishable iff all four are
//!   product states pairing into two orthogonal rays on the first mover's
//!   side with orthogonal partners on the other side.

use serde::{Deserialize, Serialize};

use crate::basis_search::{FORM_CHECK_TOL, SearchConfig, find_basis, is_distinguishing_basis};
use crate::error::{Error, Result};
use crate::numerics::{C64, CMatrix, vdot};
use crate::states::{Party, QubitBasis, StateSet, perp2};

/// Tolerance for ray orthogonality/parallelism in the exact form checks.
pub const FACTOR_TOL: f64 = 1e-9;

/// Classification outcome for a 2×2 set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    SymmetricDistinguishable,
    AliceFirstOnly,
    BobFirstOnly,
    LocallyIndistinguishable,
    /// Reserved for future non-qubit extensions; never produced by
    /// [`classify_2x2`].
    Undetermined,
}

/// A classification verdict with witness bases where they exist.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    pub alice_witness: Option<QubitBasis>,
    pub bob_witness: Option<QubitBasis>,
    /// Which classification rule fired, in words.
    pub rationale: String,
}

impl Verdict {
    /// True when some LOCC protocol distinguishes the set exactly.
    pub fn distinguishable(&self) -> bool {
        matches!(
            self.kind,
            VerdictKind::SymmetricDistinguishable
                | VerdictKind::AliceFirstOnly
                | VerdictKind::BobFirstOnly
        )
    }
}

/// Number of product states (Schmidt rank 1) in the set.
pub fn product_count(set: &StateSet) -> usize {
    set.states().iter().filter(|s| s.is_product()).count()
}

/// Exact first-mover form check for 2×2 sets of size 3 or 4.
///
/// Returns the induced basis when the set takes the distinguishing form for
/// `party` going first, canonicalized with the smaller (θ, φ) of the two ray
/// orientations. Sizes 1 and 2 return `None`: those cases are always
/// distinguishable and handled by search instead.
pub fn exact_first_move_basis(set: &StateSet, party: Party) -> Option<QubitBasis> {
    if set.dims() != (2, 2) {
        return None;
    }
    match set.len() {
        3 => exact_triplet_basis(set, party),
        4 => exact_quadruple_basis(set, party),
        _ => None,
    }
}

/// Factor of a product state on the given party's side, unit-norm.
fn side_factor(state: &crate::states::BipartiteState, party: Party) -> Option<Vec<C64>> {
    let (a, b) = state.product_factors()?;
    Some(match party {
        Party::Alice => a,
        Party::Bob => b,
    })
}

fn canonical_candidates(party: Party, ray: &[C64]) -> [QubitBasis; 2] {
    let v = [ray[0], ray[1]];
    let w = perp2(&v);
    [
        QubitBasis::from_vector(party, &v),
        QubitBasis::from_vector(party, &w),
    ]
}

/// Pick the orientation with the lexicographically smaller (θ, φ).
fn smaller_orientation(party: Party, ray: &[C64]) -> QubitBasis {
    let [b1, b2] = canonical_candidates(party, ray);
    if (b1.theta, b1.phi) <= (b2.theta, b2.phi) { b1 } else { b2 }
}

/// Triplet form: two product states whose `party`-side factors are mutually
/// orthogonal, with the full η-orthogonality recheck in the induced basis.
fn exact_triplet_basis(set: &StateSet, party: Party) -> Option<QubitBasis> {
    let factors: Vec<Option<Vec<C64>>> =
        set.states().iter().map(|s| side_factor(s, party)).collect();
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            let (Some(fi), Some(fj)) = (&factors[i], &factors[j]) else {
                continue;
            };
            if vdot(fi, fj).norm() >= FACTOR_TOL {
                continue;
            }
            let basis = smaller_orientation(party, fi);
            if is_distinguishing_basis(set, &basis, FORM_CHECK_TOL).unwrap_or(false) {
                return Some(basis);
            }
        }
    }
    None
}

/// Quadruple form: the four `party`-side factors fall into exactly two
/// orthogonal rays, each carrying two states whose other-side factors are
/// orthogonal.
fn exact_quadruple_basis(set: &StateSet, party: Party) -> Option<QubitBasis> {
    let mut factors = Vec::with_capacity(4);
    for s in set.states() {
        factors.push(side_factor(s, party)?); // all four must be product states
    }
    let other: Vec<Vec<C64>> = set
        .states()
        .iter()
        .map(|s| side_factor(s, party.other()).expect("product state has both factors"))
        .collect();

    // Group states by ray equality against the first factor.
    let mut same = vec![0usize];
    let mut perp = Vec::new();
    for k in 1..4 {
        let overlap = vdot(&factors[0], &factors[k]).norm();
        if overlap >= 1.0 - FACTOR_TOL {
            same.push(k);
        } else if overlap < FACTOR_TOL {
            perp.push(k);
        } else {
            return None; // some factor is neither parallel nor orthogonal
        }
    }
    if same.len() != 2 || perp.len() != 2 {
        return None;
    }
    // Partners sharing a ray must be orthogonal on the other side.
    if vdot(&other[same[0]], &other[same[1]]).norm() >= FACTOR_TOL {
        return None;
    }
    if vdot(&other[perp[0]], &other[perp[1]]).norm() >= FACTOR_TOL {
        return None;
    }
    // The two perp-group factors must really span the same ray.
    if vdot(&factors[perp[0]], &factors[perp[1]]).norm() < 1.0 - FACTOR_TOL {
        return None;
    }

    let basis = smaller_orientation(party, &factors[0]);
    if is_distinguishing_basis(set, &basis, FORM_CHECK_TOL).unwrap_or(false) {
        Some(basis)
    } else {
        None
    }
}

/// Closed-form distinguishing basis for an orthogonal pair of states, for
/// the party holding a qubit. Always exists: the 2×2 cross matrix
/// K[a][a'] = Σ_b conj(A₁[a,b])·A₂[a',b] is traceless, and its numerical
/// range — an ellipse centered at the origin — contains zero.
pub(crate) fn orthogonal_pair_basis(set: &StateSet, party: Party) -> Result<QubitBasis> {
    if set.len() != 2 {
        return Err(Error::Validation(format!(
            "pair construction needs exactly 2 states, got {}",
            set.len()
        )));
    }
    if set.party_dim(party) != 2 {
        return Err(Error::Dimension(format!(
            "{party} holds a {}-dimensional system; the pair construction needs 2",
            set.party_dim(party)
        )));
    }
    let a1 = set.get(0).amps_for(party);
    let a2 = set.get(1).amps_for(party);
    let n = a1.cols();
    let k = CMatrix::from_fn(2, 2, |a, ap| {
        (0..n).map(|b| a1[(a, b)].conj() * a2[(ap, b)]).sum()
    });

    // Solve w†Kw = 0 for unit w; then v = conj(w) zeroes ⟨η₀¹∣η₀²⟩, and
    // tracelessness forces the η₁ overlap to vanish as well.
    let k00 = k[(0, 0)];
    let (t, chi);
    if k00.norm() < 1e-14 {
        t = 0.0;
        chi = 0.0;
    } else {
        // Need g(χ) = (K₀₁e^{iχ} + K₁₀e^{−iχ})/2 to be a real multiple of K₀₀.
        let b = k00.conj() * k[(0, 1)];
        let c = k00.conj() * k[(1, 0)];
        chi = (-(b.im + c.im)).atan2(b.re - c.re);
        let g = (k[(0, 1)] * C64::from_polar(1.0, chi) + k[(1, 0)] * C64::from_polar(1.0, -chi)) * 0.5;
        let lambda = (k00.conj() * g).re / k00.norm_sqr();
        // cos t + λ sin t = 0 on t ∈ (0, π).
        t = 1.0f64.atan2(-lambda);
    }
    let w = [
        C64::new((t / 2.0).cos(), 0.0),
        C64::from_polar((t / 2.0).sin(), chi),
    ];
    let v = [w[0].conj(), w[1].conj()];
    Ok(QubitBasis::from_vector(party, &v))
}

/// First-mover decision for a 2×n set (n free, first mover holds the qubit):
/// delegates to the grid search, so `Found` is exactly rechecked while a
/// negative answer carries numerical-only confidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum FirstMoverSearch {
    Found(QubitBasis),
    NoBasisFound { floor: f64 },
}

pub fn classify_2xn_first(
    set: &StateSet,
    party: Party,
    config: &SearchConfig,
) -> Result<FirstMoverSearch> {
    let res = find_basis(set, party, config)?;
    Ok(if res.found() {
        FirstMoverSearch::Found(res.basis.expect("found result carries a basis"))
    } else {
        FirstMoverSearch::NoBasisFound { floor: res.grid_floor }
    })
}

/// Exact verdict for an orthogonal set of 2×2 states (1 ≤ l ≤ 4).
pub fn classify_2x2(set: &StateSet) -> Result<Verdict> {
    if set.dims() != (2, 2) {
        return Err(Error::Dimension(format!(
            "classification covers 2×2 sets; got {:?}",
            set.dims()
        )));
    }
    if set.len() > 4 {
        return Err(Error::Size(format!(
            "a 2×2 space admits at most 4 orthogonal states, got {}",
            set.len()
        )));
    }

    match set.len() {
        1 => Ok(Verdict {
            kind: VerdictKind::SymmetricDistinguishable,
            alice_witness: Some(QubitBasis::canonical(Party::Alice, 0.0, 0.0)),
            bob_witness: Some(QubitBasis::canonical(Party::Bob, 0.0, 0.0)),
            rationale: "a single state needs no measurement at all".into(),
        }),
        2 => classify_pair(set),
        _ => classify_with_forms(set),
    }
}

/// Pairs: always distinguishable; direction(s) determined by search with the
/// closed-form construction as a safety net for grid misses.
fn classify_pair(set: &StateSet) -> Result<Verdict> {
    let config = SearchConfig::default();
    let mut witnesses = [None, None];
    for (slot, party) in [(0usize, Party::Alice), (1usize, Party::Bob)] {
        let found = match classify_2xn_first(set, party, &config)? {
            FirstMoverSearch::Found(b) => Some(b),
            FirstMoverSearch::NoBasisFound { .. } => {
                let b = orthogonal_pair_basis(set, party)?;
                is_distinguishing_basis(set, &b, FORM_CHECK_TOL)?.then_some(b)
            }
        };
        witnesses[slot] = found;
    }
    let [alice_witness, bob_witness] = witnesses;
    let kind = match (&alice_witness, &bob_witness) {
        (Some(_), Some(_)) => VerdictKind::SymmetricDistinguishable,
        (Some(_), None) => VerdictKind::AliceFirstOnly,
        (None, Some(_)) => VerdictKind::BobFirstOnly,
        (None, None) => {
            return Err(Error::NumericalIndeterminate(
                "no distinguishing basis located for an orthogonal pair, \
                 though one must exist"
                    .into(),
            ));
        }
    };
    Ok(Verdict {
        kind,
        alice_witness,
        bob_witness,
        rationale: "two orthogonal states always admit a first-mover basis for \
                    the qubit holder"
            .into(),
    })
}

/// Sizes 3 and 4: exact product-count gate, then the exact form checks.
fn classify_with_forms(set: &StateSet) -> Result<Verdict> {
    let l = set.len();
    let pc = product_count(set);
    let required = if l == 3 { 2 } else { 4 };
    if pc < required {
        return Ok(Verdict {
            kind: VerdictKind::LocallyIndistinguishable,
            alice_witness: None,
            bob_witness: None,
            rationale: format!(
                "{l} orthogonal two-qubit states are locally distinguishable only \
                 with at least {required} product states; this set has {pc}"
            ),
        });
    }
    let alice_witness = exact_first_move_basis(set, Party::Alice);
    let bob_witness = exact_first_move_basis(set, Party::Bob);
    let kind = match (&alice_witness, &bob_witness) {
        (Some(_), Some(_)) => VerdictKind::SymmetricDistinguishable,
        (Some(_), None) => VerdictKind::AliceFirstOnly,
        (None, Some(_)) => VerdictKind::BobFirstOnly,
        (None, None) => VerdictKind::LocallyIndistinguishable,
    };
    let rationale = match kind {
        VerdictKind::LocallyIndistinguishable => format!(
            "{pc} product states, but no side pairs them into orthogonal rays \
             with orthogonal partners"
        ),
        VerdictKind::SymmetricDistinguishable => {
            "both sides carry the paired-orthogonal-ray form".into()
        }
        _ => "exactly one side carries the paired-orthogonal-ray form".into(),
    };
    Ok(Verdict { kind, alice_witness, bob_witness, rationale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::vnorm;
    use crate::states::{BipartiteState, named_set};

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn state(amps: &[C64], label: &str) -> BipartiteState {
        BipartiteState::new(2, 2, amps, label).unwrap()
    }

    #[test]
    fn product_count_examples() {
        assert_eq!(product_count(&named_set("bell4", None).unwrap()), 0);
        assert_eq!(product_count(&named_set("domino9", None).unwrap()), 9);

        let z = C64::ZERO;
        let mixed = StateSet::new(vec![
            state(&[c(R, 0.0), z, z, c(R, 0.0)], "Phi+"),
            state(&[z, C64::ONE, z, z], "01"),
            state(&[z, z, C64::ONE, z], "10"),
        ])
        .unwrap();
        assert_eq!(product_count(&mixed), 2);
    }

    #[test]
    fn bell4_locally_indistinguishable() {
        let v = classify_2x2(&named_set("bell4", None).unwrap()).unwrap();
        assert_eq!(v.kind, VerdictKind::LocallyIndistinguishable);
        assert!(v.alice_witness.is_none() && v.bob_witness.is_none());
    }

    #[test]
    fn computational4_symmetric() {
        let v = classify_2x2(&named_set("computational4", None).unwrap()).unwrap();
        assert_eq!(v.kind, VerdictKind::SymmetricDistinguishable);
        let aw = v.alice_witness.unwrap();
        let bw = v.bob_witness.unwrap();
        assert!(aw.theta < 1e-9);
        assert!(bw.theta < 1e-9);
    }

    #[test]
    fn gv4_alice_first_only() {
        let v = classify_2x2(&named_set("gv4", None).unwrap()).unwrap();
        assert_eq!(v.kind, VerdictKind::AliceFirstOnly);
        let aw = v.alice_witness.unwrap();
        assert!(aw.theta < 1e-9);
        assert!(v.bob_witness.is_none());
    }

    #[test]
    fn bell_plus_cross_products_symmetric() {
        // {Φ⁺, ∣0⟩∣1⟩, ∣1⟩∣0⟩}: the computational basis works on both sides.
        let set = named_set("triplet3", None).unwrap();
        let v = classify_2x2(&set).unwrap();
        assert_eq!(v.kind, VerdictKind::SymmetricDistinguishable);
        assert!(is_distinguishing_basis(&set, &v.alice_witness.unwrap(), 1e-8).unwrap());
        assert!(is_distinguishing_basis(&set, &v.bob_witness.unwrap(), 1e-8).unwrap());
    }

    #[test]
    fn entangled_triplet_with_nonorthogonal_bob_factors_is_alice_only() {
        // {(∣0⟩∣0⟩ + ∣1⟩∣+⟩)/√2, ∣0⟩∣1⟩, ∣1⟩∣−⟩}: Bob's product factors
        // ∣1⟩ and ∣−⟩ overlap by 1/√2, so only Alice can start.
        let z = C64::ZERO;
        let h = c(0.5, 0.0);
        let set = StateSet::new(vec![
            state(&[c(R, 0.0), z, h, h], "psi1"),
            state(&[z, C64::ONE, z, z], "psi2"),
            state(&[z, z, c(R, 0.0), c(-R, 0.0)], "psi3"),
        ])
        .unwrap();
        let v = classify_2x2(&set).unwrap();
        assert_eq!(v.kind, VerdictKind::AliceFirstOnly);
        assert!(exact_first_move_basis(&set, Party::Bob).is_none());

        // Cross-check: the numerical search floor on Bob's side is positive.
        match classify_2xn_first(&set, Party::Bob, &SearchConfig::default()).unwrap() {
            FirstMoverSearch::NoBasisFound { floor } => assert!(floor > 1e-4),
            FirstMoverSearch::Found(_) => panic!("Bob must not find a basis"),
        }
    }

    #[test]
    fn bell_triplet_indistinguishable() {
        // Product count 0 < 2.
        let set = named_set("bell4", None).unwrap().select(&[0, 1, 2]).unwrap();
        let v = classify_2x2(&set).unwrap();
        assert_eq!(v.kind, VerdictKind::LocallyIndistinguishable);
    }

    #[test]
    fn all_product_triplet_symmetric() {
        // {∣0⟩∣0⟩, ∣+⟩∣1⟩, ∣−⟩∣1⟩}: three product states; both parties can start.
        let z = C64::ZERO;
        let set = StateSet::new(vec![
            state(&[C64::ONE, z, z, z], "00"),
            state(&[z, c(R, 0.0), z, c(R, 0.0)], "p1"),
            state(&[z, c(R, 0.0), z, c(-R, 0.0)], "m1"),
        ])
        .unwrap();
        assert_eq!(product_count(&set), 3);
        let v = classify_2x2(&set).unwrap();
        assert_eq!(v.kind, VerdictKind::SymmetricDistinguishable);
    }

    #[test]
    fn one_product_state_triplet_indistinguishable() {
        // ∣00⟩ plus an entangled orthogonal pair supported on the complement.
        let z = C64::ZERO;
        let a = c(0.6, 0.0);
        let b = c(0.0, 0.8);
        let set = StateSet::new(vec![
            state(&[C64::ONE, z, z, z], "00"),
            state(&[z, a, b, z], "e1"),
            state(&[z, -b.conj(), a.conj(), z], "e2"),
        ])
        .unwrap();
        assert_eq!(product_count(&set), 1);
        let v = classify_2x2(&set).unwrap();
        assert_eq!(v.kind, VerdictKind::LocallyIndistinguishable);
    }

    #[test]
    fn pair_always_symmetric() {
        let set = named_set("bell4", None).unwrap().select(&[0, 1]).unwrap();
        let v = classify_2x2(&set).unwrap();
        assert_eq!(v.kind, VerdictKind::SymmetricDistinguishable);
        let aw = v.alice_witness.unwrap();
        assert!((aw.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn closed_form_pair_basis_always_validates() {
        // Deterministic sweep over a family of orthogonal pairs.
        for k in 0..20u32 {
            let x = 0.1 + 0.04 * k as f64;
            let v1 = [
                c(x.cos(), 0.0),
                c(0.3 * x.sin(), 0.2),
                c(0.5 * x.cos() * x.sin(), -0.1),
                c(0.4, 0.1 * x.sin()),
            ];
            let n1 = vnorm(&v1);
            let v1: Vec<C64> = v1.iter().map(|a| a / n1).collect();
            // Orthogonalize a second raw vector against the first.
            let raw2 = [c(0.2, -0.3), c(0.8, 0.1), c(-0.4, x.cos()), c(0.3, 0.25)];
            let overlap = vdot(&v1, &raw2);
            let mut v2: Vec<C64> = raw2.iter().zip(&v1).map(|(r, u)| r - overlap * u).collect();
            let n2 = vnorm(&v2);
            for a in &mut v2 {
                *a /= n2;
            }
            let set = StateSet::new(vec![
                BipartiteState::new(2, 2, &v1, "s1").unwrap(),
                BipartiteState::new(2, 2, &v2, "s2").unwrap(),
            ])
            .unwrap();
            for party in [Party::Alice, Party::Bob] {
                let basis = orthogonal_pair_basis(&set, party).unwrap();
                assert!(
                    is_distinguishing_basis(&set, &basis, 1e-9).unwrap(),
                    "k={k} party={party}"
                );
            }
        }
    }

    #[test]
    fn verdict_kind_invariant_under_permutation() {
        let gv = named_set("gv4", None).unwrap();
        let perms: [[usize; 4]; 3] = [[3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]];
        for p in perms {
            let permuted = gv.select(&p).unwrap();
            let v = classify_2x2(&permuted).unwrap();
            assert_eq!(v.kind, VerdictKind::AliceFirstOnly);
        }
    }

    #[test]
    fn classify_2xn_on_domino_core_subspace() {
        // Domino states 1,4,5,6,7 live on Alice's {∣1⟩, ∣2⟩} rows; restricted
        // there they form a 2×3 set admitting no first-mover basis for Alice.
        let domino = named_set("domino9", None).unwrap();
        let indices = [0usize, 3, 4, 5, 6];
        let restricted: Vec<BipartiteState> = indices
            .iter()
            .map(|&i| {
                let s = domino.get(i);
                let amps: Vec<C64> = (1..3).flat_map(|a| (0..3).map(move |b| s.amps()[(a, b)])).collect();
                BipartiteState::new(2, 3, &amps, s.label()).unwrap()
            })
            .collect();
        let set = StateSet::new(restricted).unwrap();
        match classify_2xn_first(&set, Party::Alice, &SearchConfig::default()).unwrap() {
            FirstMoverSearch::NoBasisFound { floor } => assert!(floor > 1e-4, "floor {floor}"),
            FirstMoverSearch::Found(_) => panic!("restricted domino set must block Alice"),
        }
    }

    #[test]
    fn rejects_non_2x2_and_oversized() {
        let domino = named_set("domino9", None).unwrap();
        assert!(matches!(classify_2x2(&domino), Err(Error::Dimension(_))));
    }
}
