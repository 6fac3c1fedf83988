//! Seeded generators for property tests, the acceptance suite, and benches:
//! Haar-random unitaries, random orthogonal state families, and 2×2 sets
//! with controlled product counts (planted distinguishable forms or their
//! spoiled counterparts).

use rand::Rng;
use rand::seq::SliceRandom;

use crate::error::Result;
use crate::numerics::{C64, CMatrix, vdot, vnorm};
use crate::states::{BipartiteState, NamedParams, StateSet, apply_local_unitaries, named_set};

/// Standard-normal complex entry (real and imaginary parts independent).
fn gaussian_c64(rng: &mut impl Rng) -> C64 {
    // Box–Muller; two uniforms per component pair.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    C64::new(r * c, r * s)
}

/// Random unit vector in ℂ^d.
pub fn random_unit_vector(rng: &mut impl Rng, d: usize) -> Vec<C64> {
    loop {
        let mut v: Vec<C64> = (0..d).map(|_| gaussian_c64(rng)).collect();
        let n = vnorm(&v);
        if n > 1e-6 {
            for x in &mut v {
                *x /= n;
            }
            return v;
        }
    }
}

/// Haar-random d×d unitary via QR of a Ginibre matrix with the phase fix
/// that makes the R diagonal real positive.
pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    loop {
        // Modified Gram–Schmidt on random columns.
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
        let mut ok = true;
        for _ in 0..d {
            let mut v: Vec<C64> = (0..d).map(|_| gaussian_c64(rng)).collect();
            for u in &cols {
                let overlap = vdot(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= overlap * y;
                }
            }
            let n = vnorm(&v);
            if n < 1e-8 {
                ok = false;
                break;
            }
            for x in &mut v {
                *x /= n;
            }
            cols.push(v);
        }
        if ok {
            return CMatrix::from_fn(d, d, |i, j| cols[j][i]);
        }
    }
}

/// A pair of orthonormal random states on a d_A × d_B system.
pub fn random_orthogonal_pair(rng: &mut impl Rng, d_a: usize, d_b: usize) -> Result<StateSet> {
    let dim = d_a * d_b;
    let v1 = random_unit_vector(rng, dim);
    let v2 = loop {
        let raw = random_unit_vector(rng, dim);
        let overlap = vdot(&v1, &raw);
        let mut w: Vec<C64> = raw.iter().zip(&v1).map(|(r, u)| r - overlap * u).collect();
        let n = vnorm(&w);
        if n > 1e-3 {
            for x in &mut w {
                *x /= n;
            }
            break w;
        }
    };
    StateSet::new(vec![
        BipartiteState::new(d_a, d_b, &v1, "pair0")?,
        BipartiteState::new(d_a, d_b, &v2, "pair1")?,
    ])
}

/// Product-count classes for generated 2×2 triplets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TripletKind {
    /// Three entangled states: locally indistinguishable.
    NoProducts,
    /// Exactly one product state: locally indistinguishable.
    OneProduct,
    /// Planted distinguishing form with an entangled first state.
    PlantedForm,
    /// Three product states: symmetrically distinguishable.
    AllProducts,
}

/// Product-count classes for generated 2×2 quadruples. (Three product states
/// plus an entangled fourth cannot be mutually orthogonal in 2×2, so the
/// realizable counts are 0, 1, 2, and 4.)
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    NoProducts,
    OneProduct,
    TwoProducts,
    /// Planted paired-ray product form: distinguishable.
    PlantedForm,
}

/// Entanglement floor for "definitely entangled" draws: the second Schmidt
/// coefficient must clear this, far above the product-state threshold.
const ENTANGLED_FLOOR: f64 = 1e-3;

fn is_clearly_entangled(amps: &[C64]) -> bool {
    let m = CMatrix::from_vec(2, 2, amps.to_vec());
    let s = crate::numerics::singular_values(&m);
    s[1] > ENTANGLED_FLOOR
}

/// Scramble a set with random local unitaries and a random state order;
/// preserves every classification-relevant property.
pub fn scramble(rng: &mut impl Rng, set: &StateSet) -> Result<StateSet> {
    let (d_a, d_b) = set.dims();
    let u_a = random_unitary(rng, d_a);
    let u_b = random_unitary(rng, d_b);
    let rotated = apply_local_unitaries(set, &u_a, &u_b)?;
    let mut states: Vec<BipartiteState> = rotated.states().to_vec();
    states.shuffle(rng);
    StateSet::new(states)
}

/// Random orthogonal 2×2 triplet of the requested class, scrambled.
pub fn random_triplet(rng: &mut impl Rng, kind: TripletKind) -> Result<StateSet> {
    let set = match kind {
        TripletKind::NoProducts => loop {
            let u = random_unitary(rng, 4);
            let states: Vec<BipartiteState> = (0..3)
                .map(|j| {
                    let col: Vec<C64> = (0..4).map(|i| u[(i, j)]).collect();
                    BipartiteState::new(2, 2, &col, format!("s{j}"))
                })
                .collect::<Result<_>>()?;
            if states.iter().all(|s| is_clearly_entangled(s.flat())) {
                break StateSet::new(states)?;
            }
        },
        TripletKind::OneProduct => {
            let a = random_unit_vector(rng, 2);
            let b = random_unit_vector(rng, 2);
            let product: Vec<C64> = (0..4).map(|k| a[k / 2] * b[k % 2]).collect();
            // Entangled orthonormal pair in the 3-dimensional complement.
            let mut comp: Vec<Vec<C64>> = Vec::new();
            while comp.len() < 2 {
                let mut w = random_unit_vector(rng, 4);
                let overlap = vdot(&product, &w);
                for (x, y) in w.iter_mut().zip(&product) {
                    *x -= overlap * y;
                }
                for u in &comp {
                    let overlap = vdot(u, &w);
                    for (x, y) in w.iter_mut().zip(u) {
                        *x -= overlap * y;
                    }
                }
                let n = vnorm(&w);
                if n < 1e-3 {
                    continue;
                }
                for x in &mut w {
                    *x /= n;
                }
                if is_clearly_entangled(&w) {
                    comp.push(w);
                }
            }
            let states = vec![
                BipartiteState::new(2, 2, &product, "s0")?,
                BipartiteState::new(2, 2, &comp[0], "s1")?,
                BipartiteState::new(2, 2, &comp[1], "s2")?,
            ];
            StateSet::new(states)?
        }
        TripletKind::PlantedForm => loop {
            // ∣0⟩η₀ + ∣1⟩η₁ with generic η: entangled first state.
            let mix: f64 = rng.random_range(0.25..0.75);
            let e0 = random_unit_vector(rng, 2);
            let e1 = random_unit_vector(rng, 2);
            let eta0 = [e0[0] * mix.sqrt(), e0[1] * mix.sqrt()];
            let eta1 = [e1[0] * (1.0 - mix).sqrt(), e1[1] * (1.0 - mix).sqrt()];
            let set = named_set("triplet3", Some(NamedParams::Triplet { eta0, eta1 }))?;
            if is_clearly_entangled(set.get(0).flat()) {
                break set;
            }
        },
        TripletKind::AllProducts => {
            let a = random_unit_vector(rng, 2);
            let b = random_unit_vector(rng, 2);
            let c = random_unit_vector(rng, 2);
            let ap = crate::states::perp2(&[a[0], a[1]]);
            let bp = crate::states::perp2(&[b[0], b[1]]);
            let mk = |x: &[C64], y: &[C64], label: &str| {
                let amps: Vec<C64> = (0..4).map(|k| x[k / 2] * y[k % 2]).collect();
                BipartiteState::new(2, 2, &amps, label)
            };
            StateSet::new(vec![
                mk(&a, &b, "s0")?,
                mk(&a, &bp, "s1")?,
                mk(&ap, &c, "s2")?,
            ])?
        }
    };
    scramble(rng, &set)
}

/// Random orthogonal 2×2 quadruple of the requested class, scrambled.
pub fn random_quad(rng: &mut impl Rng, kind: QuadKind) -> Result<StateSet> {
    let set = match kind {
        QuadKind::NoProducts => loop {
            let u = random_unitary(rng, 4);
            let states: Vec<BipartiteState> = (0..4)
                .map(|j| {
                    let col: Vec<C64> = (0..4).map(|i| u[(i, j)]).collect();
                    BipartiteState::new(2, 2, &col, format!("s{j}"))
                })
                .collect::<Result<_>>()?;
            if states.iter().all(|s| is_clearly_entangled(s.flat())) {
                break StateSet::new(states)?;
            }
        },
        QuadKind::OneProduct => loop {
            let a = random_unit_vector(rng, 2);
            let b = random_unit_vector(rng, 2);
            let product: Vec<C64> = (0..4).map(|k| a[k / 2] * b[k % 2]).collect();
            let mut comp: Vec<Vec<C64>> = Vec::new();
            let mut attempts = 0;
            while comp.len() < 3 && attempts < 200 {
                attempts += 1;
                let mut w = random_unit_vector(rng, 4);
                let overlap = vdot(&product, &w);
                for (x, y) in w.iter_mut().zip(&product) {
                    *x -= overlap * y;
                }
                for u in &comp {
                    let overlap = vdot(u, &w);
                    for (x, y) in w.iter_mut().zip(u) {
                        *x -= overlap * y;
                    }
                }
                let n = vnorm(&w);
                if n < 1e-3 {
                    continue;
                }
                for x in &mut w {
                    *x /= n;
                }
                if is_clearly_entangled(&w) {
                    comp.push(w);
                }
            }
            if comp.len() < 3 {
                continue; // complement basis kept landing near product states
            }
            let mut states = vec![BipartiteState::new(2, 2, &product, "s0")?];
            for (i, w) in comp.iter().enumerate() {
                states.push(BipartiteState::new(2, 2, w, format!("s{}", i + 1))?);
            }
            // The last complement vector can be forced product by the other
            // three; keep only genuine one-product draws.
            let set = StateSet::new(states)?;
            if crate::classify::product_count(&set) == 1 {
                break set;
            }
        },
        QuadKind::TwoProducts => {
            // {a⊗b, a⊥⊗b⊥} plus an entangled rotation of {a⊗b⊥, a⊥⊗b}.
            let a = random_unit_vector(rng, 2);
            let b = random_unit_vector(rng, 2);
            let ap = crate::states::perp2(&[a[0], a[1]]);
            let bp = crate::states::perp2(&[b[0], b[1]]);
            let outer = |x: &[C64], y: &[C64]| -> Vec<C64> {
                (0..4).map(|k| x[k / 2] * y[k % 2]).collect()
            };
            let e1 = outer(&a, &bp);
            let e2 = outer(&ap, &b);
            let mix: f64 = rng.random_range(0.2..(std::f64::consts::FRAC_PI_2 - 0.2));
            let (s, c) = mix.sin_cos();
            let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let m1: Vec<C64> = e1.iter().zip(&e2).map(|(x, y)| x * c + y * s * phase).collect();
            let m2: Vec<C64> = e1
                .iter()
                .zip(&e2)
                .map(|(x, y)| -x * s * phase.conj() + y * c)
                .collect();
            StateSet::new(vec![
                BipartiteState::new(2, 2, &outer(&a, &b), "s0")?,
                BipartiteState::new(2, 2, &outer(&ap, &bp), "s1")?,
                BipartiteState::new(2, 2, &m1, "s2")?,
                BipartiteState::new(2, 2, &m2, "s3")?,
            ])?
        }
        QuadKind::PlantedForm => {
            let phi = random_unit_vector(rng, 2);
            let theta = random_unit_vector(rng, 2);
            named_set(
                "product4",
                Some(NamedParams::Product {
                    phi: [phi[0], phi[1]],
                    theta: [theta[0], theta[1]],
                }),
            )?
        }
    };
    scramble(rng, &set)
}
