//! Eigendecomposition of real symmetric tridiagonal matrices and the
//! spectral quantities built on it: site-anchored eigenstates, inverse
//! participation ratio, ε sweeps and truncation convergence.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{build_lattice_hamiltonian, LatticeParams, StateVector, TridiagonalMatrix, Truncation};

/// Sites at each end of the window whose weight marks an eigenvector as a
/// truncation artifact.
pub const EDGE_SITES: usize = 4;
/// Weight on the edge sites above which an eigenvector is flagged.
pub const EDGE_WEIGHT_THRESHOLD: f64 = 1e-6;
/// Anchor weight below which a selected eigenstate is reported as weakly anchored.
pub const WEAK_ANCHOR_WEIGHT: f64 = 0.1;
/// Half-widths tried by [`converge_truncation`], in order.
pub const DOUBLING_SEQUENCE: [usize; 4] = [20, 40, 80, 160];

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues in ascending order with matching unit-norm real eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    offset: i64,
    eigenvalues: Vec<f64>,
    vectors: Vec<Vec<f64>>,
    edge_flags: Vec<bool>,
    diagonal: Vec<f64>,
}

impl Spectrum {
    #[inline]
    pub fn offset(&self) -> i64 {
        self.offset
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    #[inline]
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    #[inline]
    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// Components of eigenvector `k`, indexed by row.
    #[inline]
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    pub fn state(&self, k: usize) -> StateVector {
        StateVector::from_real(self.offset, &self.vectors[k])
    }

    /// `⟨site|φ_k⟩`, zero outside the window.
    pub fn component(&self, k: usize, site: i64) -> f64 {
        let row = site - self.offset;
        if (0..self.dimension() as i64).contains(&row) {
            self.vectors[k][row as usize]
        } else {
            0.0
        }
    }

    /// Eigenvector `k` carries more than [`EDGE_WEIGHT_THRESHOLD`] of its
    /// norm on the outermost [`EDGE_SITES`] sites at either end.
    #[inline]
    pub fn is_edge_state(&self, k: usize) -> bool {
        self.edge_flags[k]
    }

    /// Largest `|⟨n|φ_k⟩|` row, as an absolute site.
    pub fn peak_site(&self, k: usize) -> i64 {
        let v = &self.vectors[k];
        let mut best = 0;
        for (i, x) in v.iter().enumerate() {
            if x.abs() > v[best].abs() {
                best = i;
            }
        }
        self.offset + best as i64
    }

    /// Eigenvalues of eigenvectors that are neither edge states nor peaked
    /// outside `|n| <= limit`.
    pub fn central_eigenvalues(&self, limit: i64) -> Vec<f64> {
        (0..self.dimension())
            .filter(|&k| !self.edge_flags[k] && self.peak_site(k).abs() <= limit)
            .map(|k| self.eigenvalues[k])
            .collect()
    }

    /// `max_k ‖H φ_k − e_k φ_k‖_∞`.
    pub fn max_residual(&self, matrix: &TridiagonalMatrix) -> f64 {
        let mut worst: f64 = 0.0;
        for (e, v) in self.eigenvalues.iter().zip(&self.vectors) {
            let hv = matrix.apply_real(v);
            for (a, b) in hv.iter().zip(v) {
                worst = worst.max((a - e * b).abs());
            }
        }
        worst
    }

    /// `max_{j,k} |⟨φ_j|φ_k⟩ − δ_jk|`.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.dimension() {
            for k in j..self.dimension() {
                let dot: f64 = self.vectors[j].iter().zip(&self.vectors[k]).map(|(a, b)| a * b).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Full eigendecomposition by implicit-shift QL.
///
/// Eigenvectors are returned with their largest-magnitude component positive.
pub fn eigh_tridiagonal(matrix: &TridiagonalMatrix) -> Result<Spectrum> {
    let n = matrix.dimension();
    let mut d = matrix.diag().to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(matrix.offdiag());
    // column-major eigenvector storage: z[col][row]
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut c = vec![0.0; n];
            c[i] = 1.0;
            c
        })
        .collect();

    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(Error::NoConvergence { dimension: n });
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = Float::hypot(p, 1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = Float::hypot(p, e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (left, right) = z.split_at_mut(i + 1);
                    let zi = &mut left[i];
                    let zi1 = &mut right[0];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let t = *b;
                        *b = s * *a + c * t;
                        *a = c * *a - s * t;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| {
            let mut v = core::mem::take(&mut z[i]);
            fix_phase(&mut v);
            v
        })
        .collect();
    let edge_flags = vectors.iter().map(|v| edge_weight(v) > EDGE_WEIGHT_THRESHOLD).collect();

    Ok(Spectrum {
        offset: matrix.offset(),
        eigenvalues,
        vectors,
        edge_flags,
        diagonal: matrix.diag().to_vec(),
    })
}

fn fix_phase(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn edge_weight(v: &[f64]) -> f64 {
    let n = v.len();
    if n <= 2 * EDGE_SITES {
        // too small to have an interior
        return 0.0;
    }
    v[..EDGE_SITES].iter().chain(&v[n - EDGE_SITES..]).map(|x| x * x).sum()
}

/// Eigenpair selected by its overlap with a Wannier site.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredState {
    pub index: usize,
    pub eigenvalue: f64,
    pub state: StateVector,
    /// `|⟨site|φ⟩|²`
    pub weight: f64,
    /// Set when `weight` is below [`WEAK_ANCHOR_WEIGHT`].
    pub weakly_anchored: bool,
}

/// Half-width implied by a spectrum's window (the window is `[-N, N]`).
fn interior_limit(spec: &Spectrum) -> i64 {
    let half_width = (spec.dimension() as i64 - 1) / 2;
    half_width / 2
}

/// Eigenpair with the largest weight on `site`; ties go to the eigenvalue
/// closest to the site's on-site energy. Edge states are never selected.
pub fn select_anchored_eigenstate(spec: &Spectrum, site: i64) -> Result<AnchoredState> {
    let limit = interior_limit(spec);
    if site.abs() > limit {
        return Err(Error::SiteOutOfRange { site, limit });
    }
    let row = (site - spec.offset) as usize;
    let onsite = spec.diagonal[row];

    let mut best: Option<(usize, f64)> = None;
    for k in 0..spec.dimension() {
        if spec.edge_flags[k] {
            continue;
        }
        let w = spec.vectors[k][row] * spec.vectors[k][row];
        best = match best {
            None => Some((k, w)),
            Some((bk, bw)) => {
                let scale = w.max(bw).max(f64::MIN_POSITIVE);
                if (w - bw).abs() <= 1e-12 * scale {
                    let closer = (spec.eigenvalues[k] - onsite).abs() < (spec.eigenvalues[bk] - onsite).abs();
                    if closer {
                        Some((k, w))
                    } else {
                        Some((bk, bw))
                    }
                } else if w > bw {
                    Some((k, w))
                } else {
                    Some((bk, bw))
                }
            }
        };
    }
    let (index, weight) = best.ok_or(Error::NoInteriorStates { dimension: spec.dimension() })?;
    Ok(AnchoredState {
        index,
        eigenvalue: spec.eigenvalues[index],
        state: spec.state(index),
        weight,
        weakly_anchored: weight < WEAK_ANCHOR_WEIGHT,
    })
}

/// Inverse participation ratio `Σ|c_n|⁴ / (Σ|c_n|²)²`.
pub fn ipr(state: &StateVector) -> Result<f64> {
    let mut sum2 = 0.0;
    let mut sum4 = 0.0;
    for c in state.amplitudes() {
        let p = c.norm_sqr();
        sum2 += p;
        sum4 += p * p;
    }
    if sum2 == 0.0 {
        return Err(Error::ZeroState);
    }
    Ok(sum4 / (sum2 * sum2))
}

/// Eigenvalues inside an energy window for each ε of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub epsilon_values: Vec<f64>,
    /// `levels[i]` holds the ascending in-window eigenvalues at `epsilon_values[i]`.
    pub levels: Vec<Vec<f64>>,
}

pub(crate) fn check_ascending(grid: &[f64], what: &'static str) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidGrid(what));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid(what));
    }
    Ok(())
}

/// Eigenvalues in `[window.0, window.1]` at a single ε, edge states excluded.
pub fn window_levels(params: &LatticeParams, window: (f64, f64), trunc: Truncation) -> Result<Vec<f64>> {
    let spec = eigh_tridiagonal(&build_lattice_hamiltonian(params, trunc))?;
    Ok((0..spec.dimension())
        .filter(|&k| !spec.is_edge_state(k))
        .map(|k| spec.eigenvalue(k))
        .filter(|e| (window.0..=window.1).contains(e))
        .collect())
}

pub fn validate_sweep(epsilon_grid: &[f64], window: (f64, f64)) -> Result<()> {
    check_ascending(epsilon_grid, "epsilon grid must be non-empty and strictly ascending")?;
    if !(window.0 < window.1) {
        return Err(Error::InvalidParameter("energy window must satisfy lower < upper"));
    }
    Ok(())
}

pub fn spectrum_sweep(
    v: f64,
    f: f64,
    epsilon_grid: &[f64],
    window: (f64, f64),
    trunc: Truncation,
) -> Result<SweepTable> {
    validate_sweep(epsilon_grid, window)?;
    let levels = epsilon_grid
        .iter()
        .map(|&eps| window_levels(&LatticeParams::new(v, eps, f)?, window, trunc))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { epsilon_values: epsilon_grid.to_vec(), levels })
}

/// Largest shift of the central eigenvalues of the `N` window against the
/// nearest eigenvalue of the `2N` window.
pub fn doubling_change(params: &LatticeParams, trunc: Truncation) -> Result<f64> {
    let small = eigh_tridiagonal(&build_lattice_hamiltonian(params, trunc))?;
    let large = eigh_tridiagonal(&build_lattice_hamiltonian(params, trunc.doubled()))?;
    let reference = large.eigenvalues();
    let limit = trunc.half_width() as i64 / 2;
    let central = small.central_eigenvalues(limit);
    if central.is_empty() {
        return Err(Error::NoInteriorStates { dimension: small.dimension() });
    }
    let mut worst: f64 = 0.0;
    for e in central {
        let i = reference.partition_point(|&x| x < e);
        let mut nearest = f64::INFINITY;
        if i < reference.len() {
            nearest = nearest.min((reference[i] - e).abs());
        }
        if i > 0 {
            nearest = nearest.min((reference[i - 1] - e).abs());
        }
        worst = worst.max(nearest);
    }
    Ok(worst)
}

/// Smallest half-width in [`DOUBLING_SEQUENCE`] whose central eigenvalues
/// move by less than `tol` when the window is doubled.
pub fn converge_truncation(params: &LatticeParams, tol: f64) -> Result<Truncation> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be > 0"));
    }
    let mut last_change = f64::INFINITY;
    for &n in &DOUBLING_SEQUENCE {
        let trunc = Truncation::new(n)?;
        last_change = doubling_change(params, trunc)?;
        if last_change < tol {
            return Ok(trunc);
        }
    }
    Err(Error::TruncationNotConverged {
        half_width: *DOUBLING_SEQUENCE.last().unwrap(),
        change: last_change,
    })
}
