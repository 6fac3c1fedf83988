//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers once its assertions hold. Tolerances are pinned in
//! the assertions themselves.
//!
//! Run with `cargo test -p loccdist-cli --test acceptance -- --nocapture`.

use std::process::Command;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use loccdist::classify::{FirstMoverSearch, classify_2xn_first, exact_first_move_basis};
use loccdist::numerics::C64;
use loccdist::povm::FirstMoveVerdictKind;
use loccdist::random::{
    QuadKind, TripletKind, random_orthogonal_pair, random_quad, random_triplet, random_unit_vector,
    random_unitary, scramble,
};
use loccdist::states::{Party, QubitBasis, named_set};
use loccdist::{
    BipartiteState, KrausMeasurement, SearchConfig, SearchStatus, StateSet, VerdictKind,
    apply_measurement, build_protocol, classify_2x2, decompose_in_basis, find_basis,
    first_move_verdict, orthogonality_residual, simulate,
};

fn bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_loccdist"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

/// Coarse-then-fine search: a cheap 6° pass, with any negative answer
/// re-checked at the full 2° default resolution.
fn searched_found(set: &StateSet, party: Party) -> bool {
    let coarse = SearchConfig { grid_step_deg: 6.0, ..SearchConfig::default() };
    match find_basis(set, party, &coarse).unwrap().status {
        SearchStatus::Found => true,
        SearchStatus::NotFoundAtResolution => {
            find_basis(set, party, &SearchConfig::default()).unwrap().found()
        }
    }
}

/// Criterion 1: the nine domino states block both parties (512-branch
/// certificates) and witness nonlocality without entanglement, via the CLI,
/// in under 10 seconds.
#[test]
fn criterion_1_domino9_blocked_both_parties() {
    let start = Instant::now();

    let (code, out) = bin(&["first-move", "--named", "domino9", "--party", "alice", "--json"]);
    assert_eq!(code, 0);
    let alice: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(alice["kind"], "CannotGoFirst");
    assert_eq!(alice["certificate"].as_array().unwrap().len(), 512);

    let (code, out) = bin(&["first-move", "--named", "domino9", "--party", "bob", "--json"]);
    assert_eq!(code, 0);
    let bob: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(bob["kind"], "CannotGoFirst");
    assert_eq!(bob["certificate"].as_array().unwrap().len(), 512);

    let (code, out) = bin(&["verify-nwe", "--named", "domino9", "--json"]);
    assert_eq!(code, 0);
    let nwe: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(nwe["nonlocality_without_entanglement"], true);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1: PASS — domino9 CannotGoFirst for both parties (512 branches each), \
         verify-nwe true, {elapsed:?} total"
    );
}

/// Criterion 2: Bell-set indistinguishability, classifier and POVM verifier
/// agreeing.
#[test]
fn criterion_2_bell4_indistinguishable_with_cross_agreement() {
    let bell = named_set("bell4", None).unwrap();
    assert_eq!(loccdist::product_count(&bell), 0);
    let verdict = classify_2x2(&bell).unwrap();
    assert_eq!(verdict.kind, VerdictKind::LocallyIndistinguishable);

    for party in [Party::Alice, Party::Bob] {
        let fm = first_move_verdict(&bell, party).unwrap();
        assert_eq!(fm.kind, FirstMoveVerdictKind::CannotGoFirst, "{party}");
        assert!(!verdict.distinguishable() || fm.may_go_first(), "cross-agreement");
    }
    println!(
        "ACCEPTANCE 2: PASS — bell4 LocallyIndistinguishable (0 product states) and \
         CannotGoFirst for both parties"
    );
}

/// Independent dense-grid residual oracle for the gv4 set with Bob first:
/// raw amplitude arithmetic only, no library search or decomposition code.
fn gv4_bob_dense_grid_floor() -> f64 {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    // Bob-major amplitude matrices bm[i][b][a] (rows = Bob index, all real):
    // ∣0⟩∣0⟩, ∣1⟩∣0+1⟩, ∣0⟩∣1⟩, ∣1⟩∣0−1⟩.
    let bm: [[[f64; 2]; 2]; 4] = [
        [[1.0, 0.0], [0.0, 0.0]],
        [[0.0, r], [0.0, r]],
        [[0.0, 0.0], [1.0, 0.0]],
        [[0.0, r], [0.0, -r]],
    ];

    let mut floor = f64::INFINITY;
    let steps_t = 721; // 0.25° over [0, π]
    let steps_p = 1440; // 0.25° over [0, 2π)
    for it in 0..steps_t {
        let theta = std::f64::consts::PI * it as f64 / (steps_t - 1) as f64;
        let (s, c) = (theta / 2.0).sin_cos();
        for ip in 0..steps_p {
            let phi = std::f64::consts::TAU * ip as f64 / steps_p as f64;
            let (sp, cp) = phi.sin_cos();
            // v = (c, s·e^{iφ}), v⊥ = (−s·e^{−iφ}, c). With real amplitudes:
            // η₀[a] = c·bm[0][a] + s·e^{−iφ}·bm[1][a],
            // η₁[a] = −s·e^{iφ}·bm[0][a] + c·bm[1][a].
            let mut eta0 = [[(0.0f64, 0.0f64); 2]; 4];
            let mut eta1 = [[(0.0f64, 0.0f64); 2]; 4];
            for i in 0..4 {
                for a in 0..2 {
                    let x0 = bm[i][0][a];
                    let x1 = bm[i][1][a];
                    eta0[i][a] = (c * x0 + s * cp * x1, -s * sp * x1);
                    eta1[i][a] = (-s * cp * x0 + c * x1, -s * sp * x0);
                }
            }
            let mut f = 0.0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    let mut g0 = (0.0f64, 0.0f64);
                    let mut g1 = (0.0f64, 0.0f64);
                    for a in 0..2 {
                        let (xr, xi) = eta0[i][a];
                        let (yr, yi) = eta0[j][a];
                        g0.0 += xr * yr + xi * yi;
                        g0.1 += xr * yi - xi * yr;
                        let (xr, xi) = eta1[i][a];
                        let (yr, yi) = eta1[j][a];
                        g1.0 += xr * yr + xi * yi;
                        g1.1 += xr * yi - xi * yr;
                    }
                    f += g0.0 * g0.0 + g0.1 * g0.1 + g1.0 * g1.0 + g1.1 * g1.1;
                }
            }
            floor = floor.min(f);
        }
    }
    floor
}

/// Criterion 3: the gv4 asymmetry, with the Bob-side floor pinned by the
/// dense-grid oracle.
#[test]
fn criterion_3_gv4_asymmetry() {
    let gv = named_set("gv4", None).unwrap();
    let verdict = classify_2x2(&gv).unwrap();
    assert_eq!(verdict.kind, VerdictKind::AliceFirstOnly);

    let alice = find_basis(&gv, Party::Alice, &SearchConfig::default()).unwrap();
    assert!(alice.found());
    assert!(alice.residual < 1e-9, "residual {}", alice.residual);
    let protocol = build_protocol(&gv, &alice.basis.unwrap()).unwrap();
    let report = simulate(&protocol, &gv).unwrap();
    for sr in &report.per_state {
        assert!((sr.success - 1.0).abs() < 1e-9, "{}: {}", sr.label, sr.success);
    }

    let bob = find_basis(&gv, Party::Bob, &SearchConfig::default()).unwrap();
    assert_eq!(bob.status, SearchStatus::NotFoundAtResolution);
    assert!(bob.grid_floor > 1e-4, "floor {}", bob.grid_floor);

    // Oracle: dense 0.25° grid evaluated from raw amplitudes. The analytic
    // minimum of the Bob-side residual is 1/2; the oracle and the search
    // floor must both land there.
    let oracle = gv4_bob_dense_grid_floor();
    assert!((oracle - 0.5).abs() < 1e-9, "oracle floor {oracle}");
    assert!((bob.grid_floor - oracle).abs() < 1e-9, "search {} vs oracle {oracle}", bob.grid_floor);

    println!(
        "ACCEPTANCE 3: PASS — gv4 AliceFirstOnly; Alice residual {:.3e}, min success \
         {:.12}; Bob floor {:.9} (oracle {:.9})",
        alice.residual, report.min_success, bob.grid_floor, oracle
    );
}

/// Criterion 4: 200 random orthogonal pairs, every one Found with a perfect
/// simulated protocol. Zero failures permitted.
#[test]
fn criterion_4_random_pairs_always_distinguishable() {
    let mut rng = ChaCha8Rng::seed_from_u64(40_000_001);
    let coarse = SearchConfig { grid_step_deg: 6.0, ..SearchConfig::default() };
    let mut worst_success: f64 = 1.0;
    for trial in 0..200 {
        let d_b = 2 + trial % 3;
        let set = random_orthogonal_pair(&mut rng, 2, d_b).unwrap();
        let res = match find_basis(&set, Party::Alice, &coarse).unwrap() {
            r if r.found() => r,
            _ => find_basis(&set, Party::Alice, &SearchConfig::default()).unwrap(),
        };
        assert!(res.found(), "trial {trial} (d_b = {d_b}): no basis found");
        let protocol = build_protocol(&set, &res.basis.unwrap()).unwrap();
        let report = simulate(&protocol, &set).unwrap();
        assert!(
            (report.min_success - 1.0).abs() < 1e-9,
            "trial {trial}: success {}",
            report.min_success
        );
        worst_success = worst_success.min(report.min_success);
    }
    println!(
        "ACCEPTANCE 4: PASS — 200/200 random orthogonal pairs (d_b ∈ {{2,3,4}}) found and \
         simulated; worst success {worst_success:.12}"
    );
}

/// Criterion 5: on 500 generated 2×2 sets spanning sizes 3–4 and product
/// counts 0–4, the exact classifier and the numerical search agree on
/// distinguishability in every case, and every asymmetric verdict has a
/// failing exact form check on the opposite side.
#[test]
fn criterion_5_exact_vs_numerical_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(50_000_001);
    let mut counts = [0usize; 3]; // [indistinguishable, symmetric, asymmetric]
    for trial in 0..500 {
        let set = match trial % 8 {
            0 => random_triplet(&mut rng, TripletKind::NoProducts).unwrap(),
            1 => random_triplet(&mut rng, TripletKind::OneProduct).unwrap(),
            2 => random_triplet(&mut rng, TripletKind::PlantedForm).unwrap(),
            3 => random_triplet(&mut rng, TripletKind::AllProducts).unwrap(),
            4 => random_quad(&mut rng, QuadKind::NoProducts).unwrap(),
            5 => random_quad(&mut rng, QuadKind::OneProduct).unwrap(),
            6 => random_quad(&mut rng, QuadKind::TwoProducts).unwrap(),
            _ => random_quad(&mut rng, QuadKind::PlantedForm).unwrap(),
        };
        let verdict = classify_2x2(&set).unwrap();
        let found_somewhere = searched_found(&set, Party::Alice) || searched_found(&set, Party::Bob);
        assert_eq!(
            verdict.distinguishable(),
            found_somewhere,
            "trial {trial}: classifier {:?} vs search {found_somewhere}",
            verdict.kind
        );
        match verdict.kind {
            VerdictKind::AliceFirstOnly => {
                assert!(exact_first_move_basis(&set, Party::Bob).is_none(), "trial {trial}");
                counts[2] += 1;
            }
            VerdictKind::BobFirstOnly => {
                assert!(exact_first_move_basis(&set, Party::Alice).is_none(), "trial {trial}");
                counts[2] += 1;
            }
            VerdictKind::SymmetricDistinguishable => counts[1] += 1,
            VerdictKind::LocallyIndistinguishable => counts[0] += 1,
            VerdictKind::Undetermined => panic!("trial {trial}: Undetermined"),
        }
    }
    println!(
        "ACCEPTANCE 5: PASS — 500/500 agreement; {} indistinguishable, {} symmetric, \
         {} asymmetric",
        counts[0], counts[1], counts[2]
    );
}

/// Criterion 6: invariance under 50 random local-unitary conjugations of
/// each named set; residual covariance within 1e-10 and decomposition
/// roundtrips within 1e-12 on the qubit-sided sets.
#[test]
fn criterion_6_invariance_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(60_000_001);
    let qubit_sets = ["bell4", "gv4", "computational4"];
    for name in qubit_sets {
        let set = named_set(name, None).unwrap();
        let base_kind = classify_2x2(&set).unwrap().kind;
        let base_fm: Vec<_> = [Party::Alice, Party::Bob]
            .map(|p| first_move_verdict(&set, p).unwrap().kind)
            .into_iter()
            .collect();
        for k in 0..50 {
            let u_a = random_unitary(&mut rng, 2);
            let u_b = random_unitary(&mut rng, 2);
            let rotated = loccdist::apply_local_unitaries(&set, &u_a, &u_b).unwrap();

            assert_eq!(classify_2x2(&rotated).unwrap().kind, base_kind, "{name} #{k}");
            for (slot, party) in [Party::Alice, Party::Bob].into_iter().enumerate() {
                assert_eq!(
                    first_move_verdict(&rotated, party).unwrap().kind,
                    base_fm[slot],
                    "{name} #{k} {party}"
                );
            }

            // Residual covariance: transform the basis with the unitary.
            let theta = 0.2 + 2.5 * (k as f64) / 50.0;
            let phi = 5.9 * (k as f64) / 50.0;
            let basis = QubitBasis::canonical(Party::Alice, theta, phi);
            let f0 = orthogonality_residual(&set, &basis).unwrap();
            let v = basis.vector();
            let tv = [
                u_a[(0, 0)] * v[0] + u_a[(0, 1)] * v[1],
                u_a[(1, 0)] * v[0] + u_a[(1, 1)] * v[1],
            ];
            let tbasis = QubitBasis::from_vector(Party::Alice, &tv);
            let f1 = orthogonality_residual(&rotated, &tbasis).unwrap();
            assert!((f0 - f1).abs() < 1e-10, "{name} #{k}: {f0} vs {f1}");

            // Decomposition roundtrip on the rotated set.
            for s in rotated.states() {
                let d = decompose_in_basis(s, &tbasis).unwrap();
                let rebuilt = loccdist::states::reconstruct_from_decomposition(&tbasis, &d);
                assert!(rebuilt.frobenius_dist(&s.amps_for(Party::Alice)) < 1e-12);
            }
        }
    }

    // domino9 has no qubit side, so only the first-move kind applies.
    let domino = named_set("domino9", None).unwrap();
    for k in 0..50 {
        let rotated = scramble(&mut rng, &domino).unwrap();
        for party in [Party::Alice, Party::Bob] {
            let fm = first_move_verdict(&rotated, party).unwrap();
            assert_eq!(fm.kind, FirstMoveVerdictKind::CannotGoFirst, "domino9 #{k} {party}");
        }
    }
    println!(
        "ACCEPTANCE 6: PASS — 50 conjugations × 4 sets: classification and first-move \
         kinds stable; residual covariance ≤ 1e-10; roundtrips ≤ 1e-12"
    );
}

/// Criterion 7: probability conservation of the measurement engine on 100
/// random states with random complete Kraus measurements built by
/// partitioning an orthonormal basis into projectors.
#[test]
fn criterion_7_measurement_conservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(70_000_001);
    for trial in 0..100 {
        let d_a = 2 + trial % 2;
        let d_b = 1 + trial % 3;
        let dim = d_a * d_b;
        let u = random_unitary(&mut rng, dim);
        // Partition the columns into contiguous groups of random sizes and
        // sum each group's projectors into one POVM outcome.
        let mut ops = Vec::new();
        let mut col = 0usize;
        while col < dim {
            let take = 1 + (rand::Rng::random_range(&mut rng, 0..dim - col));
            let take = take.min(dim - col);
            let mut m = loccdist::CMatrix::zeros(dim, dim);
            for j in col..col + take {
                let vj: Vec<C64> = (0..dim).map(|i| u[(i, j)]).collect();
                m = m.add(&loccdist::CMatrix::outer(&vj, &vj));
            }
            ops.push(m);
            col += take;
        }
        let meas = KrausMeasurement::new(ops).unwrap();

        let v = random_unit_vector(&mut rng, dim);
        let state = BipartiteState::new(d_a, d_b, &v, format!("t{trial}")).unwrap();
        let outcomes = apply_measurement(&state, &meas).unwrap();
        let total: f64 = outcomes.iter().map(|(_, p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-9, "trial {trial}: Σp = {total}");
        for (m, _, post) in &outcomes {
            let norm: f64 = post.flat().iter().map(|c| c.norm_sqr()).sum();
            assert!((norm.sqrt() - 1.0).abs() < 1e-10, "trial {trial} outcome {m}");
        }
    }
    println!(
        "ACCEPTANCE 7: PASS — 100/100 random Kraus measurements conserve probability \
         within 1e-9 with unit-norm post-states within 1e-10"
    );
}

/// The classifier heeds both directions of the search (regression guard for
/// the agreement criterion): the planted gv4 family must stay one-sided.
#[test]
fn planted_asymmetric_quads_block_the_other_side() {
    let mut rng = ChaCha8Rng::seed_from_u64(90_210);
    let mut one_sided = 0;
    for _ in 0..10 {
        let set = random_quad(&mut rng, QuadKind::PlantedForm).unwrap();
        let verdict = classify_2x2(&set).unwrap();
        match verdict.kind {
            VerdictKind::AliceFirstOnly => {
                one_sided += 1;
                assert!(matches!(
                    classify_2xn_first(&set, Party::Bob, &SearchConfig::default()).unwrap(),
                    FirstMoverSearch::NoBasisFound { floor } if floor > 1e-6
                ));
            }
            VerdictKind::BobFirstOnly => {
                one_sided += 1;
                assert!(matches!(
                    classify_2xn_first(&set, Party::Alice, &SearchConfig::default()).unwrap(),
                    FirstMoverSearch::NoBasisFound { floor } if floor > 1e-6
                ));
            }
            VerdictKind::SymmetricDistinguishable => {}
            other => panic!("unexpected {other:?}"),
        }
    }
    assert!(one_sided >= 5, "random product quadruples are generically one-sided");
}
