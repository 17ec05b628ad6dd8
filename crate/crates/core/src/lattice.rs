//! Binary tight-binding lattice in a static force.
//!
//! The on-site energy of Wannier site `n` is `F n + (ε/2)(-1)^n` and every
//! nearest-neighbour pair is coupled by `-V`. The infinite chain is cut to the
//! sites `-N..=N` with hard walls.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hopping `V`, on-site mismatch `ε` and static force `F` (ħ = 1).
///
/// `epsilon` may be negative; that describes the even-parity Rabi chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    v: f64,
    epsilon: f64,
    f: f64,
}

impl LatticeParams {
    pub fn new(v: f64, epsilon: f64, f: f64) -> Result<Self> {
        if !(v.is_finite() && epsilon.is_finite() && f.is_finite()) {
            return Err(Error::InvalidParameter("V, epsilon and F must be finite"));
        }
        if v < 0.0 {
            return Err(Error::InvalidParameter("V must be >= 0"));
        }
        if f <= 0.0 {
            return Err(Error::InvalidParameter("F must be > 0"));
        }
        Ok(Self { v, epsilon, f })
    }

    #[inline]
    pub fn v(&self) -> f64 {
        self.v
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.v, epsilon, self.f)
    }
}

/// Retained sites `n ∈ [-N, N]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Truncation {
    half_width: usize,
}

impl Truncation {
    pub const DEFAULT_HALF_WIDTH: usize = 40;

    pub fn new(half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(Error::InvalidParameter("truncation half-width must be >= 1"));
        }
        Ok(Self { half_width })
    }

    #[inline]
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Site index of the first retained row, `-N`.
    #[inline]
    pub fn offset(&self) -> i64 {
        -(self.half_width as i64)
    }

    pub fn doubled(&self) -> Self {
        Self { half_width: 2 * self.half_width }
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        let n = self.half_width as i64;
        -n..=n
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self { half_width: Self::DEFAULT_HALF_WIDTH }
    }
}

/// `(-1)^n` as a float.
#[inline]
pub(crate) fn alternating_sign(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// On-site energy `F n + (ε/2)(-1)^n` of Wannier site `n`.
pub fn onsite_energy(n: i64, params: &LatticeParams) -> f64 {
    params.f * n as f64 + (params.epsilon / 2.0) * alternating_sign(n)
}

/// Real symmetric tridiagonal matrix whose rows are labelled by absolute
/// site indices starting at `offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    offset: i64,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(offset: i64, diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidParameter("tridiagonal matrix must be non-empty"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(
                "off-diagonal length must be one less than the diagonal length",
            ));
        }
        Ok(Self { offset, diag, offdiag })
    }

    #[inline]
    pub fn offset(&self) -> i64 {
        self.offset
    }

    #[inline]
    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    #[inline]
    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    /// Absolute site label of row `k`.
    #[inline]
    pub fn site(&self, k: usize) -> i64 {
        self.offset + k as i64
    }

    /// Row of absolute site `n`, if retained.
    pub fn row(&self, n: i64) -> Option<usize> {
        let k = n - self.offset;
        (0..self.dimension() as i64).contains(&k).then_some(k as usize)
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.dimension())
            .map(|k| {
                let mut s = self.diag[k].abs();
                if k > 0 {
                    s += self.offdiag[k - 1].abs();
                }
                if k + 1 < self.dimension() {
                    s += self.offdiag[k].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let d = self.dimension();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            m[(k, k)] = self.diag[k];
        }
        for (k, &b) in self.offdiag.iter().enumerate() {
            m[(k, k + 1)] = b;
            m[(k + 1, k)] = b;
        }
        m
    }

    /// `y = H x` for a real vector.
    pub fn apply_real(&self, x: &[f64]) -> Vec<f64> {
        let d = self.dimension();
        assert_eq!(x.len(), d, "vector length does not match matrix dimension");
        let mut y = vec![0.0; d];
        for k in 0..d {
            let mut acc = self.diag[k] * x[k];
            if k > 0 {
                acc += self.offdiag[k - 1] * x[k - 1];
            }
            if k + 1 < d {
                acc += self.offdiag[k] * x[k + 1];
            }
            y[k] = acc;
        }
        y
    }

    /// `y = H x` for a complex vector, written into `y`.
    pub fn apply_complex(&self, x: &[Complex64], y: &mut [Complex64]) {
        let d = self.dimension();
        assert!(x.len() == d && y.len() == d, "vector length does not match matrix dimension");
        for k in 0..d {
            let mut acc = x[k] * self.diag[k];
            if k > 0 {
                acc += x[k - 1] * self.offdiag[k - 1];
            }
            if k + 1 < d {
                acc += x[k + 1] * self.offdiag[k];
            }
            y[k] = acc;
        }
    }
}

/// Truncated lattice Hamiltonian: `diag[k] = onsite_energy(-N + k)`, every
/// coupling `-V`.
pub fn build_lattice_hamiltonian(params: &LatticeParams, trunc: Truncation) -> TridiagonalMatrix {
    let diag = trunc.sites().map(|n| onsite_energy(n, params)).collect();
    let offdiag = vec![-params.v; trunc.dimension() - 1];
    TridiagonalMatrix { offset: trunc.offset(), diag, offdiag }
}

/// Amplitudes `c_n` on a window of absolute sites starting at `offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    offset: i64,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(offset: i64, amplitudes: Vec<Complex64>) -> Self {
        Self { offset, amplitudes }
    }

    pub fn from_real(offset: i64, amplitudes: &[f64]) -> Self {
        Self {
            offset,
            amplitudes: amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
        }
    }

    /// Wannier state `|site⟩` on the window of `trunc`.
    pub fn wannier(site: i64, trunc: Truncation) -> Result<Self> {
        let limit = trunc.half_width() as i64;
        if site.abs() > limit {
            return Err(Error::SiteOutOfRange { site, limit });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); trunc.dimension()];
        amplitudes[(site - trunc.offset()) as usize] = Complex64::new(1.0, 0.0);
        Ok(Self { offset: trunc.offset(), amplitudes })
    }

    #[inline]
    pub fn offset(&self) -> i64 {
        self.offset
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Amplitude at absolute site `n`; zero outside the window.
    pub fn amplitude(&self, n: i64) -> Complex64 {
        let k = n - self.offset;
        if (0..self.len() as i64).contains(&k) {
            self.amplitudes[k as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn sites(&self) -> impl Iterator<Item = i64> {
        let start = self.offset;
        start..start + self.len() as i64
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-12
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            offset: self.offset,
            amplitudes: self.amplitudes.iter().map(|&c| c * factor).collect(),
        }
    }

    /// Shift every amplitude by `shift` sites, keeping the window fixed.
    fn shifted(&self, shift: i64) -> Shifted {
        let len = self.len() as i64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        let mut leaked = 0.0;
        for (k, &c) in self.amplitudes.iter().enumerate() {
            let target = k as i64 + shift;
            if (0..len).contains(&target) {
                out[target as usize] = c;
            } else {
                leaked += c.norm_sqr();
            }
        }
        Shifted { state: Self { offset: self.offset, amplitudes: out }, leaked_norm: leaked }
    }
}

/// Result of a shift: the shifted state plus the norm pushed out of the window.
#[derive(Debug, Clone, PartialEq)]
pub struct Shifted {
    pub state: StateVector,
    pub leaked_norm: f64,
}

impl Shifted {
    #[inline]
    pub fn leaked(&self) -> bool {
        self.leaked_norm > 0.0
    }
}

/// Euclidean-algebra generators `E₊`, `E₋`, `E₀`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    /// `E₊|n⟩ = |n+1⟩`
    Raise,
    /// `E₋|n⟩ = |n-1⟩`
    Lower,
    /// `E₀|n⟩ = n|n⟩`
    Number,
}

pub fn apply_ladder(which: Ladder, state: &StateVector) -> Shifted {
    match which {
        Ladder::Raise => state.shifted(1),
        Ladder::Lower => state.shifted(-1),
        Ladder::Number => {
            let amplitudes = state
                .sites()
                .zip(&state.amplitudes)
                .map(|(n, &c)| c * n as f64)
                .collect();
            Shifted {
                state: StateVector { offset: state.offset, amplitudes },
                leaked_norm: 0.0,
            }
        }
    }
}

/// `E₊^{2m}`: move the state by `2m` sites.
pub fn translate_even(state: &StateVector, m: i64) -> Shifted {
    state.shifted(2 * m)
}
