//! Global search for a qubit basis that puts an orthogonal state set into
//! the ∣0⟩η₀ + ∣1⟩η₁ form with all η-Gram off-diagonals vanishing.
//!
//! The search is a coarse (θ, φ) grid over the Bloch sphere followed by
//! derivative-free simplex refinement from the best grid points. `Found`
//! results are exact up to the per-pair recheck tolerance; `NotFoundAtResolution`
//! is a numerical non-witness, not an impossibility proof — exact negative
//! verdicts come from the classifier or the POVM verifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{C64, vdot};
use crate::states::{BasisDecomposition, Party, QubitBasis, StateSet, decompose_in_basis};

/// Per-pair Gram tolerance for the exact distinguishing-form recheck.
pub const FORM_CHECK_TOL: f64 = 1e-8;

/// Knobs for [`find_basis`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Grid resolution over (θ, φ), in degrees.
    pub grid_step_deg: f64,
    /// Number of best grid points to refine.
    pub refine_starts: usize,
    /// Simplex iterations per refinement start.
    pub refine_iters: usize,
    /// Residual threshold below which a refined basis may count as Found.
    pub zero_tol: f64,
    /// When false, the grid scan stops at the first exact hit instead of
    /// sweeping the whole sphere for an accurate floor.
    pub report_floor: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid_step_deg: 2.0,
            refine_starts: 10,
            refine_iters: 200,
            zero_tol: 1e-9,
            report_floor: true,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.grid_step_deg > 0.0 && self.grid_step_deg <= 45.0) {
            return Err(Error::Validation(format!(
                "grid step {} degrees outside (0, 45]",
                self.grid_step_deg
            )));
        }
        if !(self.zero_tol > 0.0 && self.zero_tol <= 1e-6) {
            return Err(Error::Validation(format!(
                "zero tolerance {} outside (0, 1e-6]",
                self.zero_tol
            )));
        }
        if self.refine_starts == 0 || self.refine_iters == 0 {
            return Err(Error::Validation(
                "refine_starts and refine_iters must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Found,
    NotFoundAtResolution,
}

/// Outcome of [`find_basis`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchResult {
    pub status: SearchStatus,
    /// The witness basis when found; otherwise the best candidate seen.
    pub basis: Option<QubitBasis>,
    /// Residual at the reported basis.
    pub residual: f64,
    /// Minimum residual observed across the grid and all refinements.
    pub grid_floor: f64,
}

impl SearchResult {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::Found
    }
}

fn decompose_all(set: &StateSet, basis: &QubitBasis) -> Result<Vec<BasisDecomposition>> {
    set.states().iter().map(|s| decompose_in_basis(s, basis)).collect()
}

fn residual_of(decs: &[BasisDecomposition]) -> f64 {
    let l = decs.len();
    let mut f = 0.0;
    for i in 0..l {
        for j in (i + 1)..l {
            f += vdot(&decs[i].eta0, &decs[j].eta0).norm_sqr();
            f += vdot(&decs[i].eta1, &decs[j].eta1).norm_sqr();
        }
    }
    f
}

/// Σ_{i<j} ∣⟨η₀ⁱ∣η₀ʲ⟩∣² + ∣⟨η₁ⁱ∣η₁ʲ⟩∣²: zero exactly when the set takes the
/// distinguishing form in this basis, smooth in (θ, φ).
pub fn orthogonality_residual(set: &StateSet, basis: &QubitBasis) -> Result<f64> {
    Ok(residual_of(&decompose_all(set, basis)?))
}

/// Exact per-pair check: every off-diagonal η-Gram magnitude below `tol`
/// (both branches). This is the authoritative witness validation; unlike the
/// summed residual it cannot hide one bad pair among many good ones.
pub fn is_distinguishing_basis(set: &StateSet, basis: &QubitBasis, tol: f64) -> Result<bool> {
    let decs = decompose_all(set, basis)?;
    let l = decs.len();
    for i in 0..l {
        for j in (i + 1)..l {
            if vdot(&decs[i].eta0, &decs[j].eta0).norm() >= tol {
                return Ok(false);
            }
            if vdot(&decs[i].eta1, &decs[j].eta1).norm() >= tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Search the Bloch sphere for a basis in which `party`, measuring first,
/// can start a perfect discrimination protocol.
///
/// Coarse grid over θ ∈ [0, π], φ ∈ [0, 2π), then simplex refinement from
/// the `refine_starts` best grid points. A candidate is Found only if its
/// residual is below `zero_tol` *and* the exact per-pair check passes at
/// [`FORM_CHECK_TOL`]; among qualifying candidates the smallest (θ, φ) wins,
/// so runs are deterministic.
pub fn find_basis(set: &StateSet, party: Party, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    if set.party_dim(party) != 2 {
        return Err(Error::Dimension(format!(
            "{party} holds a {}-dimensional system; the basis search needs 2",
            set.party_dim(party)
        )));
    }

    // A single state is distinguishable by doing nothing.
    if set.len() == 1 {
        return Ok(SearchResult {
            status: SearchStatus::Found,
            basis: Some(QubitBasis::canonical(party, 0.0, 0.0)),
            residual: 0.0,
            grid_floor: 0.0,
        });
    }

    let party_major: Vec<_> = set.states().iter().map(|s| s.amps_for(party)).collect();
    let d_other = party_major[0].cols();
    let eval = |theta: f64, phi: f64| -> f64 {
        // Raw evaluation without angle canonicalization: smooth for the optimizer.
        let (s, c) = (theta / 2.0).sin_cos();
        let v = [C64::new(c, 0.0), C64::from_polar(s, phi)];
        let w = [-C64::from_polar(s, -phi), C64::new(c, 0.0)];
        let decs: Vec<(Vec<_>, Vec<_>)> = party_major
            .iter()
            .map(|amps| {
                let mut eta0 = vec![C64::ZERO; d_other];
                let mut eta1 = vec![C64::ZERO; d_other];
                for b in 0..d_other {
                    for a in 0..2 {
                        eta0[b] += v[a].conj() * amps[(a, b)];
                        eta1[b] += w[a].conj() * amps[(a, b)];
                    }
                }
                (eta0, eta1)
            })
            .collect();
        let l = decs.len();
        let mut f = 0.0;
        for i in 0..l {
            for j in (i + 1)..l {
                f += vdot(&decs[i].0, &decs[j].0).norm_sqr();
                f += vdot(&decs[i].1, &decs[j].1).norm_sqr();
            }
        }
        f
    };

    let step = config.grid_step_deg.to_radians();
    let n_theta = (std::f64::consts::PI / step).ceil() as usize;
    let n_phi = (std::f64::consts::TAU / step).ceil() as usize;

    let mut grid: Vec<(f64, f64, f64)> = Vec::with_capacity((n_theta + 1) * n_phi);
    let mut floor = f64::INFINITY;
    'scan: for it in 0..=n_theta {
        let theta = (it as f64 * step).min(std::f64::consts::PI);
        for ip in 0..n_phi {
            let phi = ip as f64 * step;
            if phi >= std::f64::consts::TAU {
                continue;
            }
            let f = eval(theta, phi);
            floor = floor.min(f);
            grid.push((f, theta, phi));
            if !config.report_floor && f < config.zero_tol {
                // Early exit: grid scan order is (θ, φ)-lexicographic, so the
                // first hit already satisfies the tie-break.
                break 'scan;
            }
        }
    }

    grid.sort_by(|a, b| (a.0, a.1, a.2).partial_cmp(&(b.0, b.1, b.2)).expect("finite residuals"));
    let starts = grid.iter().take(config.refine_starts.max(1));

    let mut qualifying: Vec<(f64, f64, f64)> = Vec::new(); // (θ, φ, residual), canonical
    let mut best_candidate: Option<(f64, f64, f64)> = None; // lowest residual seen

    let mut consider = |theta: f64, phi: f64, set: &StateSet, floor: &mut f64| -> Result<()> {
        let basis = QubitBasis::canonical(party, theta, phi);
        let f = orthogonality_residual(set, &basis)?;
        *floor = floor.min(f);
        if best_candidate.is_none_or(|(_, _, bf)| f < bf) {
            best_candidate = Some((basis.theta, basis.phi, f));
        }
        if f < config.zero_tol && is_distinguishing_basis(set, &basis, FORM_CHECK_TOL)? {
            qualifying.push((basis.theta, basis.phi, f));
        }
        Ok(())
    };

    for &(f0, t0, p0) in starts {
        consider(t0, p0, set, &mut floor)?;
        if f0 == 0.0 {
            continue;
        }
        let ((t, p), fmin) = nelder_mead(&eval, (t0, p0), step.max(1e-3) / 2.0, config.refine_iters);
        floor = floor.min(fmin);
        consider(t, p, set, &mut floor)?;
    }

    if !qualifying.is_empty() {
        qualifying.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).expect("finite angles"));
        let (theta, phi, residual) = qualifying[0];
        return Ok(SearchResult {
            status: SearchStatus::Found,
            basis: Some(QubitBasis::canonical(party, theta, phi)),
            residual,
            grid_floor: floor.min(residual),
        });
    }

    let basis = best_candidate.map(|(t, p, _)| QubitBasis::canonical(party, t, p));
    Ok(SearchResult {
        status: SearchStatus::NotFoundAtResolution,
        basis,
        residual: best_candidate.map_or(floor, |(_, _, f)| f),
        grid_floor: floor,
    })
}

/// Minimal Nelder–Mead on two parameters with standard coefficients.
/// Returns the best vertex and its value after `iters` iterations or once
/// the simplex has collapsed.
fn nelder_mead(
    f: &dyn Fn(f64, f64) -> f64,
    start: (f64, f64),
    scale: f64,
    iters: usize,
) -> ((f64, f64), f64) {
    const ALPHA: f64 = 1.0; // reflection
    const GAMMA: f64 = 2.0; // expansion
    const RHO: f64 = 0.5; // contraction
    const SIGMA: f64 = 0.5; // shrink

    let mut simplex = [
        (start.0, start.1, 0.0),
        (start.0 + scale, start.1, 0.0),
        (start.0, start.1 + scale, 0.0),
    ];
    for v in &mut simplex {
        v.2 = f(v.0, v.1);
    }

    for _ in 0..iters {
        simplex.sort_by(|a, b| a.2.total_cmp(&b.2));
        let [best, mid, worst] = simplex;

        let spread = (best.0 - worst.0).abs().max((best.1 - worst.1).abs());
        if spread < 1e-13 {
            break;
        }

        let cx = (best.0 + mid.0) / 2.0;
        let cy = (best.1 + mid.1) / 2.0;

        let rx = cx + ALPHA * (cx - worst.0);
        let ry = cy + ALPHA * (cy - worst.1);
        let fr = f(rx, ry);

        if fr < best.2 {
            let ex = cx + GAMMA * (rx - cx);
            let ey = cy + GAMMA * (ry - cy);
            let fe = f(ex, ey);
            simplex[2] = if fe < fr { (ex, ey, fe) } else { (rx, ry, fr) };
        } else if fr < mid.2 {
            simplex[2] = (rx, ry, fr);
        } else {
            let (kx, ky) = if fr < worst.2 { (rx, ry) } else { (worst.0, worst.1) };
            let sx = cx + RHO * (kx - cx);
            let sy = cy + RHO * (ky - cy);
            let fs = f(sx, sy);
            if fs < worst.2.min(fr) {
                simplex[2] = (sx, sy, fs);
            } else {
                // Shrink toward the best vertex.
                for v in simplex.iter_mut().skip(1) {
                    v.0 = best.0 + SIGMA * (v.0 - best.0);
                    v.1 = best.1 + SIGMA * (v.1 - best.1);
                    v.2 = f(v.0, v.1);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.2.total_cmp(&b.2));
    ((simplex[0].0, simplex[0].1), simplex[0].2)
}
