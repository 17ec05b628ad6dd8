//! Order-`n` resonances: the two-level effective model, Shirley's
//! Bloch-Siegert shift, numerical anticrossing search and IPR maps.

use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{build_lattice_hamiltonian, LatticeParams, TridiagonalMatrix, Truncation};
use crate::spectral::{check_ascending, converge_truncation, eigh_tridiagonal, ipr, select_anchored_eigenstate};

/// Points in the coarse scan of [`find_anticrossing`].
pub const COARSE_POINTS: usize = 101;
/// Golden-section stopping width, in units of F.
pub const REFINE_TOLERANCE: f64 = 1e-8;
/// Doubling-test tolerance used for every emitted result.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-10;

/// Eigenpairs of the 2×2 model `[[ε/2, -V], [-V, -ε/2 + F]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelResult {
    pub e_plus: f64,
    pub e_minus: f64,
    /// `Δ = sqrt((ε - F)² + 4V²)`
    pub gap: f64,
    /// `θ = asin(2V/Δ) ∈ [0, π/2]`
    pub mixing_angle: f64,
}

impl TwoLevelResult {
    /// `|φ₊⟩ = cos(θ/2)|1⟩ − sin(θ/2)|0⟩` as `(c₀, c₁)`.
    ///
    /// With `θ` restricted to `[0, π/2]` this is the upper eigenvector only
    /// for `ε <= F`; above resonance the roles of the two sites swap.
    pub fn upper_state(&self) -> (f64, f64) {
        let half = self.mixing_angle / 2.0;
        (-half.sin(), half.cos())
    }

    /// `|φ₋⟩ = cos(θ/2)|0⟩ + sin(θ/2)|1⟩` as `(c₀, c₁)`.
    pub fn lower_state(&self) -> (f64, f64) {
        let half = self.mixing_angle / 2.0;
        (half.cos(), half.sin())
    }
}

/// The 2×2 matrix on sites 0 and 1.
pub fn two_level_hamiltonian(epsilon: f64, f: f64, v: f64) -> TridiagonalMatrix {
    TridiagonalMatrix::new(0, alloc::vec![epsilon / 2.0, -epsilon / 2.0 + f], alloc::vec![-v])
        .expect("2x2 shape is valid")
}

fn two_level_gap(epsilon: f64, f: f64, v: f64) -> f64 {
    Float::hypot(epsilon - f, 2.0 * v)
}

pub fn two_level_effective(epsilon: f64, f: f64, v: f64) -> Result<TwoLevelResult> {
    if v < 0.0 || !v.is_finite() {
        return Err(Error::InvalidParameter("V must be finite and >= 0"));
    }
    if !(f > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter("F must be > 0 and epsilon finite"));
    }
    let gap = two_level_gap(epsilon, f, v);
    if gap == 0.0 {
        return Err(Error::DegenerateTwoLevel);
    }
    let mixing_angle = (2.0 * v / gap).min(1.0).asin();
    Ok(TwoLevelResult {
        e_plus: (f + gap) / 2.0,
        e_minus: (f - gap) / 2.0,
        gap,
        mixing_angle,
    })
}

/// `P_{0→1}(t) = (4V²/Δ²) sin²(Δt/2)`; zero when `Δ = 0`.
pub fn rabi_transfer_probability(epsilon: f64, f: f64, v: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter("t must be >= 0"));
    }
    let gap = two_level_gap(epsilon, f, v);
    if gap == 0.0 {
        return Ok(0.0);
    }
    let amplitude = (2.0 * v / gap).powi(2);
    Ok(amplitude * (gap * t / 2.0).sin().powi(2))
}

/// Shirley's Bloch-Siegert shift of the order-`n` resonance.
pub fn shirley_shift(n: u32, v: f64, f: f64) -> f64 {
    let base = v * v / f;
    if n == 0 {
        base
    } else {
        let n = n as f64;
        (2.0 * n + 1.0) / (n * (n + 1.0)) * base
    }
}

/// Gap between the eigenstates anchored at sites `0` and `2n+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapEvaluation {
    pub gap: f64,
    /// One of the anchors had weight below the warning threshold.
    pub weakly_anchored: bool,
    /// Both anchors picked the same eigenpair; the gap was taken between the
    /// two eigenpairs with the largest weight on the two sites.
    pub shared_anchor: bool,
}

pub fn gap_at(epsilon: f64, n: u32, v: f64, f: f64, trunc: Truncation) -> Result<GapEvaluation> {
    let params = LatticeParams::new(v, epsilon, f)?;
    let spec = eigh_tridiagonal(&build_lattice_hamiltonian(&params, trunc))?;
    let partner = 2 * n as i64 + 1;
    let a = select_anchored_eigenstate(&spec, 0)?;
    let b = select_anchored_eigenstate(&spec, partner)?;
    let weakly_anchored = a.weakly_anchored || b.weakly_anchored;
    if a.index != b.index {
        return Ok(GapEvaluation {
            gap: (b.eigenvalue - a.eigenvalue).abs(),
            weakly_anchored,
            shared_anchor: false,
        });
    }

    let mut ranked: Vec<(usize, f64)> = (0..spec.dimension())
        .filter(|&k| !spec.is_edge_state(k))
        .map(|k| (k, spec.component(k, 0).powi(2) + spec.component(k, partner).powi(2)))
        .collect();
    if ranked.len() < 2 {
        return Err(Error::NoInteriorStates { dimension: spec.dimension() });
    }
    ranked.sort_by(|x, y| y.1.total_cmp(&x.1));
    let (first, second) = (ranked[0].0, ranked[1].0);
    Ok(GapEvaluation {
        gap: (spec.eigenvalue(first) - spec.eigenvalue(second)).abs(),
        weakly_anchored,
        shared_anchor: true,
    })
}

/// Located minimum of [`gap_at`] near `ε = (2n+1)F`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnticrossingResult {
    pub order: u32,
    pub v: f64,
    pub f: f64,
    pub epsilon_star: f64,
    pub gap_min: f64,
    /// `(2n+1)F − δ` with `δ` from [`shirley_shift`].
    pub shirley_prediction: f64,
    /// Number of [`gap_at`] calls.
    pub evaluations: usize,
    pub truncation_used: Truncation,
    pub bracket: (f64, f64),
    /// Gap of every coarse-scan point, for diagnostics.
    pub coarse_scan: Vec<(f64, f64)>,
    pub weakly_anchored: bool,
}

impl AnticrossingResult {
    /// `(2n+1)F − ε*`
    pub fn numerical_shift(&self) -> f64 {
        (2 * self.order + 1) as f64 * self.f - self.epsilon_star
    }
}

/// Search bracket `[(2n+1)F − max(4δ, F/2), (2n+1)F + F/2]`.
pub fn anticrossing_bracket(n: u32, v: f64, f: f64) -> (f64, f64) {
    let centre = (2 * n + 1) as f64 * f;
    let below = (4.0 * shirley_shift(n, v, f)).max(f / 2.0);
    (centre - below, centre + f / 2.0)
}

/// Truncation passing the doubling test at both ends and the centre of the bracket.
fn bracket_truncation(n: u32, v: f64, f: f64, bracket: (f64, f64)) -> Result<Truncation> {
    let centre = (2 * n + 1) as f64 * f;
    let mut trunc = Truncation::new(1)?;
    for eps in [bracket.0, centre, bracket.1] {
        let t = converge_truncation(&LatticeParams::new(v, eps, f)?, CONVERGENCE_TOLERANCE)?;
        trunc = trunc.max(t);
    }
    // the partner site 2n+1 has to sit inside the anchoring interior
    while (trunc.half_width() as i64) / 2 < 2 * n as i64 + 1 {
        trunc = trunc.doubled();
    }
    Ok(trunc)
}

pub fn find_anticrossing(n: u32, v: f64, f: f64) -> Result<AnticrossingResult> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidParameter("V must be > 0"));
    }
    if !(f > 0.0) || !f.is_finite() {
        return Err(Error::InvalidParameter("F must be > 0"));
    }
    let bracket = anticrossing_bracket(n, v, f);
    let trunc = bracket_truncation(n, v, f, bracket)?;

    let mut evaluations = 0usize;
    let mut weakly_anchored = false;
    let mut objective = |eps: f64| -> Result<f64> {
        evaluations += 1;
        let g = gap_at(eps, n, v, f, trunc)?;
        weakly_anchored |= g.weakly_anchored;
        Ok(g.gap)
    };

    let step = (bracket.1 - bracket.0) / (COARSE_POINTS - 1) as f64;
    let mut coarse_scan = Vec::with_capacity(COARSE_POINTS);
    for i in 0..COARSE_POINTS {
        let eps = bracket.0 + step * i as f64;
        coarse_scan.push((eps, objective(eps)?));
    }
    let best = coarse_scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
        .unwrap();
    if best == 0 || best == COARSE_POINTS - 1 {
        return Err(Error::NoInteriorMinimum { lower: bracket.0, upper: bracket.1 });
    }

    let (epsilon_star, gap_min) = golden_section(
        &mut objective,
        coarse_scan[best - 1].0,
        coarse_scan[best + 1].0,
        REFINE_TOLERANCE * f,
        coarse_scan[best],
    )?;

    Ok(AnticrossingResult {
        order: n,
        v,
        f,
        epsilon_star,
        gap_min,
        shirley_prediction: (2 * n + 1) as f64 * f - shirley_shift(n, v, f),
        evaluations,
        truncation_used: trunc,
        bracket,
        coarse_scan,
        weakly_anchored,
    })
}

/// Golden-section minimisation on `[a, b]` down to width `tol`. Returns the
/// best point seen, including `seed`.
fn golden_section<O>(objective: &mut O, mut a: f64, mut b: f64, tol: f64, seed: (f64, f64)) -> Result<(f64, f64)>
where
    O: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut best = seed;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    for (x, fx) in [(c, fc), (d, fd)] {
        if fx < best.1 {
            best = (x, fx);
        }
    }
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c)?;
            if fc < best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d)?;
            if fd < best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// IPR of the site-0 anchored eigenstate over a `(V, ε)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct IprGrid {
    pub v_values: Vec<f64>,
    pub epsilon_values: Vec<f64>,
    /// `ipr[i][j]` at `(v_values[i], epsilon_values[j])`.
    pub ipr: Vec<Vec<f64>>,
}

/// IPR of the eigenstate anchored at site 0, at converged truncation.
pub fn anchored_ipr(v: f64, epsilon: f64, f: f64) -> Result<f64> {
    let params = LatticeParams::new(v, epsilon, f)?;
    let trunc = converge_truncation(&params, CONVERGENCE_TOLERANCE)?;
    let spec = eigh_tridiagonal(&build_lattice_hamiltonian(&params, trunc))?;
    ipr(&select_anchored_eigenstate(&spec, 0)?.state)
}

pub fn validate_ipr_grids(v_grid: &[f64], epsilon_grid: &[f64]) -> Result<()> {
    check_ascending(v_grid, "V grid must be non-empty and strictly ascending")?;
    check_ascending(epsilon_grid, "epsilon grid must be non-empty and strictly ascending")?;
    if v_grid[0] <= 0.0 {
        return Err(Error::InvalidGrid("V grid must be positive"));
    }
    Ok(())
}

pub fn ipr_map(v_grid: &[f64], epsilon_grid: &[f64], f: f64) -> Result<IprGrid> {
    validate_ipr_grids(v_grid, epsilon_grid)?;
    let ipr = v_grid
        .iter()
        .map(|&v| epsilon_grid.iter().map(|&eps| anchored_ipr(v, eps, f)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(IprGrid { v_values: v_grid.to_vec(), epsilon_values: epsilon_grid.to_vec(), ipr })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn two_level_at_resonance() {
        let r = two_level_effective(1.0, 1.0, 0.2).unwrap();
        assert!((r.gap - 0.4).abs() < 1e-15);
        assert!((r.e_plus - 0.7).abs() < 1e-15);
        assert!((r.e_minus - 0.3).abs() < 1e-15);
        assert!((r.mixing_angle - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn two_level_uncoupled_and_detuned() {
        let r = two_level_effective(2.0, 1.0, 0.0).unwrap();
        assert_eq!(r.gap, 1.0);
        assert_eq!(r.mixing_angle, 0.0);

        let r = two_level_effective(0.9579, 1.0, 0.2).unwrap();
        let expect = (0.0421f64 * 0.0421 + 0.16).sqrt();
        assert!((r.gap - expect).abs() < 1e-15);
        assert!((r.gap - 0.40221).abs() < 1e-5);

        assert_eq!(two_level_effective(1.0, 1.0, 0.0), Err(Error::DegenerateTwoLevel));
    }

    #[test]
    fn two_level_matches_eigensolver() {
        for &(eps, v) in &[(1.0, 0.2), (0.7, 0.05), (1.9, 0.6), (-0.4, 0.3)] {
            let r = two_level_effective(eps, 1.0, v).unwrap();
            let s = eigh_tridiagonal(&two_level_hamiltonian(eps, 1.0, v)).unwrap();
            assert!((s.eigenvalue(0) - r.e_minus).abs() < 1e-12);
            assert!((s.eigenvalue(1) - r.e_plus).abs() < 1e-12);
            assert!((r.e_plus - r.e_minus - r.gap).abs() < 1e-14);
            if eps > 1.0 {
                continue;
            }
            // eigenvectors agree up to sign
            let (c0, c1) = r.lower_state();
            let dot = s.vector(0)[0] * c0 + s.vector(0)[1] * c1;
            assert!((dot.abs() - 1.0).abs() < 1e-12);
            let (c0, c1) = r.upper_state();
            let dot = s.vector(1)[0] * c0 + s.vector(1)[1] * c1;
            assert!((dot.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn transfer_probability_examples() {
        assert_eq!(rabi_transfer_probability(1.3, 1.0, 0.2, 0.0).unwrap(), 0.0);
        let v = 0.17;
        let t = PI / (2.0 * v);
        assert!((rabi_transfer_probability(1.0, 1.0, v, t).unwrap() - 1.0).abs() < 1e-15);

        let gap = (0.25f64 + 0.04).sqrt();
        let p = rabi_transfer_probability(1.5, 1.0, 0.1, PI / gap).unwrap();
        assert!((p - 0.04 / 0.29).abs() < 1e-15);
        assert!((p - 0.1379).abs() < 1e-4);

        assert_eq!(rabi_transfer_probability(1.0, 1.0, 0.0, 3.0).unwrap(), 0.0);
        assert!(rabi_transfer_probability(1.0, 1.0, 0.1, -1.0).is_err());
    }

    #[test]
    fn shirley_examples() {
        assert!((shirley_shift(0, 0.2, 1.0) - 0.04).abs() < 1e-15);
        assert!((shirley_shift(1, 0.2, 1.0) - 0.06).abs() < 1e-15);
        assert!((shirley_shift(2, 1.0, 1.0) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn gap_far_from_resonance() {
        let t = Truncation::new(40).unwrap();
        let g = gap_at(3.0, 0, 0.05, 1.0, t).unwrap();
        assert!(!g.shared_anchor);
        assert!((g.gap - 2.0).abs() < 0.05 * 0.05 * 4.0, "gap {}", g.gap);
    }

    #[test]
    fn gap_at_quoted_points() {
        let t = Truncation::new(40).unwrap();
        let g0 = gap_at(0.9579, 0, 0.2, 1.0, t).unwrap();
        assert!((g0.gap - 0.3958).abs() < 5e-4, "gap {}", g0.gap);
        let g2 = gap_at(4.11467, 2, 1.0, 1.0, t).unwrap();
        assert!((g2.gap - 0.03208).abs() < 5e-5, "gap {}", g2.gap);
    }

    #[test]
    fn small_coupling_shift_matches_shirley() {
        let (v, f) = (0.02, 1.0);
        let r = find_anticrossing(0, v, f).unwrap();
        let shift = r.numerical_shift();
        let predicted = v * v / f;
        assert!((shift / predicted - 1.0).abs() <= 0.05, "shift {shift}");
    }

    #[test]
    fn anticrossing_scan_brackets_minimum() {
        let r = find_anticrossing(0, 0.2, 1.0).unwrap();
        assert!(r.gap_min > 0.0);
        assert!(r.bracket.0 <= r.epsilon_star && r.epsilon_star <= r.bracket.1);
        assert!(r.coarse_scan.iter().all(|&(_, g)| g >= r.gap_min));
        assert!(r.numerical_shift() > 0.0);
        assert!(r.evaluations > COARSE_POINTS);
    }

    #[test]
    fn anticrossing_requires_positive_coupling() {
        assert!(find_anticrossing(0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ipr_map_limits() {
        let v_grid = [0.02, 0.05];
        let eps_grid = [0.4, 2.0, 2.5];
        let map = ipr_map(&v_grid, &eps_grid, 1.0).unwrap();
        assert_eq!(map.ipr.len(), 2);
        assert!(map.ipr.iter().all(|row| row.len() == 3));
        for &eps in &[2.0, 2.5] {
            let j = eps_grid.iter().position(|&e| e == eps).unwrap();
            let v = v_grid[0];
            let value = map.ipr[0][j];
            assert!(1.0 - value <= 4.0 * v * v / ((eps - 1.0) * (eps - 1.0)), "ipr {value}");
        }
        assert!(ipr_map(&[0.0, 0.1], &eps_grid, 1.0).is_err());
        assert!(ipr_map(&[0.1], &[2.0, 1.0], 1.0).is_err());
    }
}
