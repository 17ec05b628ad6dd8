//! Time evolution of a particle that starts on one Wannier site.
//!
//! The Hamiltonian is time independent, so `|ψ(t)⟩ = Σ_k e^{-i e_k t}
//! ⟨φ_k|ψ(0)⟩ |φ_k⟩` is evaluated directly from one eigendecomposition.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::ops::RangeInclusive;

use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{build_lattice_hamiltonian, LatticeParams, StateVector, Truncation};
use crate::spectral::{eigh_tridiagonal, Spectrum};

/// Sites whose occupation never reaches this value are not stored.
pub const STORE_THRESHOLD: f64 = 1e-12;
/// Largest tolerated `|Σ_n P_n(t) − 1|` before the run is rejected.
pub const NORM_DRIFT_LIMIT: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 400;
/// The default grid covers this many periods `2π/Δ_min`.
pub const DEFAULT_SPAN_PERIODS: f64 = 1.1;

/// Occupation probabilities `P_n(t)` on a contiguous range of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    first_site: i64,
    /// `probabilities[i][k]` is `P_{first_site + k}(times[i])`.
    probabilities: Vec<Vec<f64>>,
}

impl Trajectory {
    #[inline]
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn site_range(&self) -> RangeInclusive<i64> {
        let width = self.probabilities.first().map_or(0, |row| row.len()) as i64;
        self.first_site..=self.first_site + width - 1
    }

    /// Row of probabilities at time index `i`, aligned with [`Self::site_range`].
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.probabilities[i]
    }

    /// `P_site(times[i])`; zero for sites that were not stored.
    pub fn probability(&self, i: usize, site: i64) -> f64 {
        let k = site - self.first_site;
        let row = &self.probabilities[i];
        if (0..row.len() as i64).contains(&k) {
            row[k as usize]
        } else {
            0.0
        }
    }

    /// `P_site(t)` over the whole time grid.
    pub fn series(&self, site: i64) -> Vec<f64> {
        (0..self.times.len()).map(|i| self.probability(i, site)).collect()
    }

    /// `max_i |Σ_n P_n(t_i) − 1|` over the stored sites.
    pub fn max_norm_error(&self) -> f64 {
        self.probabilities
            .iter()
            .map(|row| (row.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// `samples` uniform points on `[0, 1.1 · 2π/Δ_min]`.
pub fn default_time_grid(gap_min: f64, samples: usize) -> Result<Vec<f64>> {
    if !(gap_min > 0.0) || !gap_min.is_finite() {
        return Err(Error::InvalidParameter("gap must be > 0"));
    }
    uniform_grid(0.0, DEFAULT_SPAN_PERIODS * TAU / gap_min, samples)
}

pub fn uniform_grid(start: f64, stop: f64, samples: usize) -> Result<Vec<f64>> {
    if samples < 2 || !(stop > start) {
        return Err(Error::InvalidGrid("time grid needs >= 2 samples and stop > start"));
    }
    let dt = (stop - start) / (samples - 1) as f64;
    Ok((0..samples).map(|i| start + dt * i as f64).collect())
}

/// Eigendecomposition of a lattice Hamiltonian, reused across times.
#[derive(Debug, Clone)]
pub struct SpectralPropagator {
    spec: Spectrum,
}

impl SpectralPropagator {
    pub fn new(params: &LatticeParams, trunc: Truncation) -> Result<Self> {
        let spec = eigh_tridiagonal(&build_lattice_hamiltonian(params, trunc))?;
        Ok(Self { spec })
    }

    #[inline]
    pub fn spectrum(&self) -> &Spectrum {
        &self.spec
    }

    /// `e^{−iHt}|ψ⟩`
    pub fn propagate(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        let spec = &self.spec;
        if state.offset() != spec.offset() || state.len() != spec.dimension() {
            return Err(Error::InvalidParameter("state does not match the truncation"));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); spec.dimension()];
        for k in 0..spec.dimension() {
            let overlap: Complex64 = spec.vector(k).iter().zip(state.amplitudes()).map(|(&phi, &a)| a * phi).sum();
            if overlap == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (s, c) = Float::sin_cos(spec.eigenvalue(k) * t);
            let coeff = Complex64::new(c, -s) * overlap;
            for (a, &phi) in out.iter_mut().zip(spec.vector(k)) {
                *a += coeff * phi;
            }
        }
        Ok(StateVector::new(spec.offset(), out))
    }
}

pub fn evolve(params: &LatticeParams, initial_site: i64, times: &[f64], trunc: Truncation) -> Result<Trajectory> {
    let limit = trunc.half_width() as i64 / 2;
    if initial_site.abs() > limit {
        return Err(Error::SiteOutOfRange { site: initial_site, limit });
    }
    if times.is_empty() || times[0] < 0.0 || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidGrid("times must be non-empty, finite and start at t >= 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidGrid("times must be ascending"));
    }

    let propagator = SpectralPropagator::new(params, trunc)?;
    let spec = propagator.spectrum();
    let dim = spec.dimension();
    let start_row = (initial_site - spec.offset()) as usize;
    let initial = StateVector::wannier(initial_site, trunc)?;

    let mut full = Vec::with_capacity(times.len());
    for &t in times {
        let psi = propagator.propagate(&initial, t)?;
        let probs: Vec<f64> = psi.amplitudes().iter().map(|a| a.norm_sqr()).collect();
        let drift = (probs.iter().sum::<f64>() - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift { drift });
        }
        full.push(probs);
    }

    let peak: Vec<f64> = (0..dim)
        .map(|n| full.iter().map(|row| row[n]).fold(0.0, f64::max))
        .collect();
    let lo = peak.iter().position(|&p| p >= STORE_THRESHOLD).unwrap_or(start_row);
    let hi = peak.iter().rposition(|&p| p >= STORE_THRESHOLD).unwrap_or(start_row);
    let probabilities = full.into_iter().map(|row| row[lo..=hi].to_vec()).collect();

    Ok(Trajectory {
        times: times.to_vec(),
        first_site: spec.offset() + lo as i64,
        probabilities,
    })
}

/// Summary of a periodic jump from site 0 to `target_site`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpMetrics {
    pub target_site: i64,
    /// `max_t P_target(t)`
    pub max_transfer: f64,
    /// Twice the time of the first maximum of `P_target`.
    pub period_estimate: f64,
    /// `max_t max_k P_k(t)` over sites strictly between 0 and the target.
    pub intermediate_ceiling: f64,
}

/// The first maximum is the peak of the first excursion of `P_target` above
/// 90% of its overall maximum; the excursion ends when `P_target` falls
/// below half its maximum. The peak time is refined by a parabola through
/// the three samples around it.
pub fn jump_metrics(traj: &Trajectory, target_site: i64) -> Result<JumpMetrics> {
    let series = traj.series(target_site);
    let times = traj.times();
    let max_transfer = series.iter().copied().fold(0.0, f64::max);
    let no_peak = Error::NoInteriorMaximum { target_site };
    if max_transfer <= 0.0 {
        return Err(no_peak);
    }

    let start = series.iter().position(|&p| p >= 0.9 * max_transfer).ok_or(no_peak.clone())?;
    let end = series[start..]
        .iter()
        .position(|&p| p < 0.5 * max_transfer)
        .map(|j| start + j)
        .ok_or(no_peak.clone())?;
    let mut peak = start;
    for i in start..end {
        if series[i] > series[peak] {
            peak = i;
        }
    }
    if peak == 0 || peak + 1 >= series.len() {
        return Err(no_peak);
    }
    let t_peak = parabolic_peak(
        (times[peak - 1], series[peak - 1]),
        (times[peak], series[peak]),
        (times[peak + 1], series[peak + 1]),
    );

    let (lo, hi) = if target_site > 0 { (1, target_site - 1) } else { (target_site + 1, -1) };
    let mut intermediate_ceiling: f64 = 0.0;
    for site in lo..=hi {
        for i in 0..times.len() {
            intermediate_ceiling = intermediate_ceiling.max(traj.probability(i, site));
        }
    }

    Ok(JumpMetrics {
        target_site,
        max_transfer,
        period_estimate: 2.0 * t_peak,
        intermediate_ceiling,
    })
}

/// Vertex of the parabola through three points; falls back to the middle
/// point when the points are collinear or the vertex leaves the interval.
fn parabolic_peak(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let d1 = (b.1 - a.1) / (b.0 - a.0);
    let d2 = (c.1 - b.1) / (c.0 - b.0);
    let curvature = (d2 - d1) / (c.0 - a.0);
    if curvature >= 0.0 {
        return b.0;
    }
    // p(t) = a.1 + d1 (t - a.0) + curvature (t - a.0)(t - b.0)
    let slope_at_b = d1 + curvature * (b.0 - a.0);
    let t = b.0 - slope_at_b / (2.0 * curvature);
    if t < a.0 || t > c.0 {
        b.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ode;

    fn p(v: f64, e: f64, f: f64) -> LatticeParams {
        LatticeParams::new(v, e, f).unwrap()
    }

    #[test]
    fn starts_localized() {
        let t = Truncation::new(20).unwrap();
        let traj = evolve(&p(0.3, 0.8, 1.0), 2, &[0.0, 1.0], t).unwrap();
        for site in traj.site_range() {
            let expect = if site == 2 { 1.0 } else { 0.0 };
            assert!((traj.probability(0, site) - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn no_hopping_means_no_motion() {
        let t = Truncation::new(20).unwrap();
        let times = uniform_grid(0.0, 50.0, 101).unwrap();
        let traj = evolve(&p(0.0, 0.6, 1.0), 0, &times, t).unwrap();
        assert_eq!(traj.site_range(), 0..=0);
        assert!(traj.series(0).iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn parabola_vertex() {
        // p(t) = 1 - (t - 0.3)²
        let f = |t: f64| 1.0 - (t - 0.3) * (t - 0.3);
        let t = parabolic_peak((0.0, f(0.0)), (0.5, f(0.5)), (1.0, f(1.0)));
        assert!((t - 0.3).abs() < 1e-14);
        let t = parabolic_peak((0.0, f(0.0)), (0.4, f(0.4)), (1.1, f(1.1)));
        assert!((t - 0.3).abs() < 1e-14);
    }

    #[test]
    fn jump_metrics_on_a_pure_two_level_signal() {
        // hand-built trajectory: P_1 = sin²(Δt/2), P_0 = cos²(Δt/2)
        let gap = 0.4;
        let times = default_time_grid(gap, 400).unwrap();
        let probabilities = times
            .iter()
            .map(|&t| {
                let s = (gap * t / 2.0).sin().powi(2);
                alloc::vec![1.0 - s, s]
            })
            .collect();
        let traj = Trajectory { times, first_site: 0, probabilities };
        let m = jump_metrics(&traj, 1).unwrap();
        assert!((m.max_transfer - 1.0).abs() < 1e-4);
        assert!((m.period_estimate / (TAU / gap) - 1.0).abs() < 1e-4);
        assert_eq!(m.intermediate_ceiling, 0.0);
    }

    #[test]
    fn too_short_a_span_is_rejected() {
        let t = Truncation::new(40).unwrap();
        let times = uniform_grid(0.0, 4.0, 50).unwrap();
        let traj = evolve(&p(0.2, 0.9579, 1.0), 0, &times, t).unwrap();
        assert!(matches!(jump_metrics(&traj, 1), Err(Error::NoInteriorMaximum { target_site: 1 })));
    }

    #[test]
    fn input_validation() {
        let t = Truncation::new(20).unwrap();
        let params = p(0.2, 1.0, 1.0);
        assert!(evolve(&params, 11, &[0.0], t).is_err());
        assert!(evolve(&params, 0, &[], t).is_err());
        assert!(evolve(&params, 0, &[-1.0, 0.0], t).is_err());
        assert!(evolve(&params, 0, &[1.0, 0.0], t).is_err());
        assert!(default_time_grid(0.0, 400).is_err());
    }

    /// `(Σ_k |⟨0|φ_k⟩⟨target|φ_k⟩|)²`, an upper bound on `P_target(t)`.
    fn overlap_bound(prop: &SpectralPropagator, target: i64) -> f64 {
        let spec = prop.spectrum();
        let sum: f64 = (0..spec.dimension())
            .map(|k| (spec.component(k, 0) * spec.component(k, target)).abs())
            .sum();
        sum * sum
    }

    fn resonant_run(n: u32, v: f64) -> (crate::resonance::AnticrossingResult, LatticeParams, Trajectory) {
        let r = crate::resonance::find_anticrossing(n, v, 1.0).unwrap();
        let params = p(v, r.epsilon_star, 1.0);
        let times = default_time_grid(r.gap_min, DEFAULT_SAMPLES).unwrap();
        let traj = evolve(&params, 0, &times, Truncation::default()).unwrap();
        (r, params, traj)
    }

    #[test]
    fn matches_direct_integration_on_a_small_lattice() {
        let trunc = Truncation::new(3).unwrap();
        let params = p(0.4, 0.9, 1.0);
        let matrix = build_lattice_hamiltonian(&params, trunc);
        let prop = SpectralPropagator::new(&params, trunc).unwrap();
        let start = StateVector::wannier(1, trunc).unwrap();
        let mut psi = start.amplitudes().to_vec();
        let step = 1e-3;
        let mut t = 0.0;
        for _ in 0..8 {
            ode::propagate(|_, x, y| matrix.apply_complex(x, y), &mut psi, t, t + 0.75, (0.75 / step) as usize);
            t += 0.75;
            let exact = prop.propagate(&start, t).unwrap();
            for (a, b) in psi.iter().zip(exact.amplitudes()) {
                assert!((a - b).norm() < 1e-6);
            }
        }
    }

    #[test]
    fn first_order_resonance_oscillates_between_two_sites() {
        let (r, params, traj) = resonant_run(0, 0.2);
        assert!(traj.max_norm_error() < 1e-10);
        let m = jump_metrics(&traj, 1).unwrap();
        assert!((m.period_estimate * r.gap_min / TAU - 1.0).abs() < 0.01);
        // the peak transfer is limited by how the two sites share the
        // dressed states, not by the two-level envelope
        let bound = overlap_bound(&SpectralPropagator::new(&params, Truncation::default()).unwrap(), 1);
        assert!(m.max_transfer <= bound + 1e-12);
        assert!(bound - m.max_transfer < 0.01);
        assert!(m.max_transfer > 0.97);
        let others: f64 = traj
            .site_range()
            .filter(|&s| s != 0 && s != 1)
            .flat_map(|s| traj.series(s))
            .fold(0.0, f64::max);
        // neighbours are only virtually populated, detuned by F + ε
        assert!(others < 4.0 * 0.04 / (1.0 + params.epsilon()).powi(2));
    }

    #[test]
    fn second_order_resonance_jumps_to_site_five() {
        let (r, params, traj) = resonant_run(2, 1.0);
        assert!(traj.max_norm_error() < 1e-10);
        let m = jump_metrics(&traj, 5).unwrap();
        assert!((m.period_estimate * r.gap_min / TAU - 1.0).abs() < 0.02);
        let bound = overlap_bound(&SpectralPropagator::new(&params, Truncation::default()).unwrap(), 5);
        assert!(m.max_transfer <= bound + 1e-12);
        assert!(bound - m.max_transfer < 0.01);
        assert!(m.max_transfer > 4.0 * m.intermediate_ceiling);
    }

    #[test]
    fn revival_after_one_period_at_weak_coupling() {
        let (_, params, traj) = resonant_run(0, 0.05);
        let period = jump_metrics(&traj, 1).unwrap().period_estimate;
        let times = uniform_grid(0.0, period, 100).unwrap();
        let later: Vec<f64> = times.iter().map(|t| t + period).collect();
        let a = evolve(&params, 0, &times, Truncation::default()).unwrap();
        let b = evolve(&params, 0, &later, Truncation::default()).unwrap();
        for site in -3..=4 {
            for (x, y) in a.series(site).iter().zip(b.series(site)) {
                assert!((x - y).abs() <= 2e-3);
            }
        }
    }

    #[test]
    fn off_resonance_stays_put() {
        let times = uniform_grid(0.0, 200.0, 801).unwrap();
        let traj = evolve(&p(0.1, 2.0, 1.0), 0, &times, Truncation::default()).unwrap();
        let escape = traj.series(0).iter().map(|p0| 1.0 - p0).fold(0.0, f64::max);
        assert!(escape <= 0.05);
    }

}
