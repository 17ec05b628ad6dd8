//! Semiclassical Rabi model `H(t) = (Ω/2)σz − 2λ σx cos ωt` and its Floquet
//! Hamiltonian.
//!
//! The Floquet matrix lives on `|s, n⟩` (spin `s = ±`, Fourier index `n`),
//! ordered n-major and spin-minor: `|+,−N⟩, |−,−N⟩, |+,−N+1⟩, …`. The parity
//! `Π = −σz(−1)^n` splits it into two tridiagonal chains; the odd chain is
//! the binary lattice with `F = ω`, `ε = Ω`, `V = λ`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Float;

use crate::error::{Error, Result};
use crate::lattice::{alternating_sign, build_lattice_hamiltonian, LatticeParams, TridiagonalMatrix, Truncation};
use crate::ode;
use crate::spectral::{eigh_tridiagonal, select_anchored_eigenstate};

/// Default number of RK4 steps per drive period.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 10_000;
/// Coarsest step accepted by [`monodromy_quasienergies`], as a fraction of the period.
pub const MAX_STEP_FRACTION: f64 = 1e-3;
/// Tolerated `max |U†U − I|` of the one-period propagator.
pub const UNITARITY_LIMIT: f64 = 1e-8;

/// Two-level splitting `Ω`, drive frequency `ω` and coupling `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiParams {
    splitting: f64,
    frequency: f64,
    coupling: f64,
}

impl RabiParams {
    pub fn new(splitting: f64, frequency: f64, coupling: f64) -> Result<Self> {
        if !(splitting.is_finite() && frequency.is_finite() && coupling.is_finite()) {
            return Err(Error::InvalidParameter("Omega, omega and lambda must be finite"));
        }
        if splitting < 0.0 {
            return Err(Error::InvalidParameter("Omega must be >= 0"));
        }
        if frequency <= 0.0 {
            return Err(Error::InvalidParameter("omega must be > 0"));
        }
        if coupling < 0.0 {
            return Err(Error::InvalidParameter("lambda must be >= 0"));
        }
        Ok(Self { splitting, frequency, coupling })
    }

    /// `Ω`
    #[inline]
    pub fn splitting(&self) -> f64 {
        self.splitting
    }

    /// `ω`
    #[inline]
    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    /// `λ`
    #[inline]
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    #[inline]
    pub fn period(&self) -> f64 {
        TAU / self.frequency
    }
}

/// Eigenvalue of `σz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    #[inline]
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    fn flipped(self) -> Self {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `Π = +1`
    Even,
    /// `Π = −1`
    Odd,
}

impl Parity {
    #[inline]
    pub fn eigenvalue(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    /// Spin carried by Fourier index `n` in this parity chain.
    pub fn chain_spin(self, n: i64) -> Spin {
        // Π = −s(−1)^n  ⇒  s = −Π(−1)^n
        if -self.eigenvalue() * alternating_sign(n) > 0.0 {
            Spin::Up
        } else {
            Spin::Down
        }
    }
}

/// Position of `|s, n⟩` in the n-major, spin-minor ordering.
#[inline]
pub fn basis_index(spin: Spin, n: i64, trunc: Truncation) -> usize {
    let block = (n + trunc.half_width() as i64) as usize;
    2 * block + if spin == Spin::Up { 0 } else { 1 }
}

/// Dense Floquet Hamiltonian on `2(2N+1)` states.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetMatrix {
    trunc: Truncation,
    matrix: DMatrix<f64>,
}

impl FloquetMatrix {
    #[inline]
    pub fn truncation(&self) -> Truncation {
        self.trunc
    }

    #[inline]
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    #[inline]
    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn element(&self, s: Spin, n: i64, s2: Spin, n2: i64) -> f64 {
        self.matrix[(basis_index(s, n, self.trunc), basis_index(s2, n2, self.trunc))]
    }

    /// Restriction to one parity sector, as a chain indexed by `n`.
    ///
    /// Also returns the largest coupling from that sector to the other one,
    /// which vanishes when the matrix commutes with `Π`.
    pub fn parity_sector(&self, parity: Parity) -> (TridiagonalMatrix, f64) {
        let t = self.trunc;
        let rows: Vec<usize> = t.sites().map(|n| basis_index(parity.chain_spin(n), n, t)).collect();
        let diag = rows.iter().map(|&r| self.matrix[(r, r)]).collect();
        let offdiag = rows.windows(2).map(|w| self.matrix[(w[0], w[1])]).collect();

        let mut inside = vec![false; self.dimension()];
        rows.iter().for_each(|&r| inside[r] = true);
        let mut leak: f64 = 0.0;
        for &r in &rows {
            for c in 0..self.dimension() {
                if !inside[c] {
                    leak = leak.max(self.matrix[(r, c)].abs());
                }
            }
        }
        let chain = TridiagonalMatrix::new(t.offset(), diag, offdiag).expect("chain shape is valid");
        (chain, leak)
    }
}

/// `⟨s,n|H_F|s',n'⟩ = (sΩ/2 + ωn) δ_{ss'} δ_{nn'} − λ δ_{s,−s'} δ_{n,n'±1}`.
pub fn build_floquet_hamiltonian(rabi: &RabiParams, trunc: Truncation) -> FloquetMatrix {
    let dim = 2 * trunc.dimension();
    let mut matrix = DMatrix::zeros(dim, dim);
    let half = rabi.splitting / 2.0;
    for n in trunc.sites() {
        for s in [Spin::Up, Spin::Down] {
            let i = basis_index(s, n, trunc);
            matrix[(i, i)] = s.sign() * half + rabi.frequency * n as f64;
            if n < trunc.half_width() as i64 {
                let j = basis_index(s.flipped(), n + 1, trunc);
                matrix[(i, j)] = -rabi.coupling;
                matrix[(j, i)] = -rabi.coupling;
            }
        }
    }
    FloquetMatrix { trunc, matrix }
}

/// Diagonal of `Π = −σz(−1)^n` in the Floquet basis.
pub fn parity_operator(trunc: Truncation) -> Vec<f64> {
    let mut diag = vec![0.0; 2 * trunc.dimension()];
    for n in trunc.sites() {
        for s in [Spin::Up, Spin::Down] {
            diag[basis_index(s, n, trunc)] = -s.sign() * alternating_sign(n);
        }
    }
    diag
}

/// `max |Π H − H Π|` entrywise.
pub fn parity_commutator_norm(h: &FloquetMatrix) -> f64 {
    let parity = parity_operator(h.trunc);
    let mut worst: f64 = 0.0;
    for i in 0..h.dimension() {
        for j in 0..h.dimension() {
            let c = parity[i] * h.matrix[(i, j)] - h.matrix[(i, j)] * parity[j];
            worst = worst.max(c.abs());
        }
    }
    worst
}

/// Parity chain: on-site `s(n)Ω/2 + ωn`, couplings `−λ`.
pub fn build_parity_chain(rabi: &RabiParams, parity: Parity, trunc: Truncation) -> TridiagonalMatrix {
    let half = rabi.splitting / 2.0;
    let diag = trunc
        .sites()
        .map(|n| parity.chain_spin(n).sign() * half + rabi.frequency * n as f64)
        .collect();
    let offdiag = vec![-rabi.coupling; trunc.dimension() - 1];
    TridiagonalMatrix::new(trunc.offset(), diag, offdiag).expect("chain shape is valid")
}

/// Lattice parameters whose Hamiltonian equals the given parity chain.
pub fn lattice_from_rabi(rabi: &RabiParams, parity: Parity) -> LatticeParams {
    let epsilon = match parity {
        Parity::Odd => rabi.splitting,
        Parity::Even => -rabi.splitting,
    };
    LatticeParams::new(rabi.coupling, epsilon, rabi.frequency).expect("Rabi parameters map to a valid lattice")
}

/// Floquet Hamiltonian in the `|±x⟩ ⊗ |n⟩` basis, block-major (all `+x`
/// states, then all `−x` states), with `|+x⟩ = (|+⟩ + |−⟩)/√2` and
/// `|−x⟩ = (|−⟩ − |+⟩)/√2`. This phase choice puts `−Ω/2` in the
/// off-diagonal blocks.
pub fn floquet_in_x_basis(h: &FloquetMatrix) -> DMatrix<f64> {
    let t = h.trunc;
    let m = t.dimension();
    let mut w = DMatrix::zeros(2 * m, 2 * m);
    for (k, n) in t.sites().enumerate() {
        let up = basis_index(Spin::Up, n, t);
        let down = basis_index(Spin::Down, n, t);
        // column k: |+x, n⟩, column m + k: |−x, n⟩
        w[(up, k)] = FRAC_1_SQRT_2;
        w[(down, k)] = FRAC_1_SQRT_2;
        w[(up, m + k)] = -FRAC_1_SQRT_2;
        w[(down, m + k)] = FRAC_1_SQRT_2;
    }
    w.transpose() * &h.matrix * w
}

/// `U = (1/√2) [[1, 1], [(−1)^n, −(−1)^n]]` on `|±x⟩ ⊗ |n⟩`, block-major.
pub fn fulton_gouterman(trunc: Truncation) -> DMatrix<f64> {
    let m = trunc.dimension();
    let mut u = DMatrix::zeros(2 * m, 2 * m);
    for (k, n) in trunc.sites().enumerate() {
        let sign = alternating_sign(n);
        u[(k, k)] = FRAC_1_SQRT_2;
        u[(k, m + k)] = FRAC_1_SQRT_2;
        u[(m + k, k)] = sign * FRAC_1_SQRT_2;
        u[(m + k, m + k)] = -sign * FRAC_1_SQRT_2;
    }
    u
}

/// Outcome of `U† H_F U`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDiagonalization {
    pub transformed: DMatrix<f64>,
    /// Largest entry of the two off-diagonal blocks.
    pub offdiag_norm: f64,
    /// `max |upper-left − even chain|`
    pub even_block_error: f64,
    /// `max |lower-right − odd chain|`
    pub odd_block_error: f64,
}

pub fn block_diagonalize(rabi: &RabiParams, trunc: Truncation) -> BlockDiagonalization {
    let h = build_floquet_hamiltonian(rabi, trunc);
    let hx = floquet_in_x_basis(&h);
    let u = fulton_gouterman(trunc);
    let transformed = u.transpose() * hx * &u;

    let m = trunc.dimension();
    let upper_right = transformed.view((0, m), (m, m)).amax();
    let lower_left = transformed.view((m, 0), (m, m)).amax();
    let even = build_parity_chain(rabi, Parity::Even, trunc).to_dense();
    let odd = build_parity_chain(rabi, Parity::Odd, trunc).to_dense();
    let even_block_error = (transformed.view((0, 0), (m, m)) - even).amax();
    let odd_block_error = (transformed.view((m, m), (m, m)) - odd).amax();

    BlockDiagonalization {
        transformed,
        offdiag_norm: upper_right.max(lower_left),
        even_block_error,
        odd_block_error,
    }
}

/// Floquet eigenvector coefficients `c_{s,n}` in the n-major basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetVector {
    trunc: Truncation,
    coeffs: Vec<f64>,
}

impl FloquetVector {
    pub fn new(trunc: Truncation, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != 2 * trunc.dimension() {
            return Err(Error::InvalidParameter("coefficient count must be 2(2N+1)"));
        }
        Ok(Self { trunc, coeffs })
    }

    /// Embed a parity-chain vector (indexed by `n`, offset `−N`) into `|s,n⟩`.
    pub fn from_chain(parity: Parity, trunc: Truncation, chain: &[f64]) -> Result<Self> {
        if chain.len() != trunc.dimension() {
            return Err(Error::InvalidParameter("chain vector length must be 2N+1"));
        }
        let mut coeffs = vec![0.0; 2 * trunc.dimension()];
        for (k, n) in trunc.sites().enumerate() {
            coeffs[basis_index(parity.chain_spin(n), n, trunc)] = chain[k];
        }
        Ok(Self { trunc, coeffs })
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficient(&self, s: Spin, n: i64) -> f64 {
        if n.unsigned_abs() as usize > self.trunc.half_width() {
            return 0.0;
        }
        self.coeffs[basis_index(s, n, self.trunc)]
    }

    /// `E₊^{2m}`: `c_{s,n} → c_{s,n+2m}`. Returns the leaked norm alongside.
    pub fn translated(&self, m: i64) -> (Self, f64) {
        let t = self.trunc;
        let mut coeffs = vec![0.0; self.coeffs.len()];
        let mut leaked = 0.0;
        for n in t.sites() {
            for s in [Spin::Up, Spin::Down] {
                let c = self.coeffs[basis_index(s, n, t)];
                let target = n + 2 * m;
                if target.unsigned_abs() as usize <= t.half_width() {
                    coeffs[basis_index(s, target, t)] = c;
                } else {
                    leaked += c * c;
                }
            }
        }
        (Self { trunc: t, coeffs }, leaked)
    }
}

/// Physical two-level state `a₊|+⟩ + a₋|−⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinState {
    pub up: Complex64,
    pub down: Complex64,
}

impl SpinState {
    pub fn norm_sqr(&self) -> f64 {
        self.up.norm_sqr() + self.down.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= 1e-10
    }

    pub fn max_difference(&self, other: &SpinState) -> f64 {
        (self.up - other.up).norm().max((self.down - other.down).norm())
    }
}

/// `e^{−iet} Σ_n e^{inωt} (c_{+,n}, c_{−,n})`.
pub fn physical_state(vector: &FloquetVector, quasienergy: f64, omega: f64, t: f64) -> SpinState {
    let mut up = Complex64::new(0.0, 0.0);
    let mut down = Complex64::new(0.0, 0.0);
    for n in vector.trunc.sites() {
        let phase = Complex64::from_polar(1.0, n as f64 * omega * t);
        up += phase * vector.coefficient(Spin::Up, n);
        down += phase * vector.coefficient(Spin::Down, n);
    }
    let global = Complex64::from_polar(1.0, -quasienergy * t);
    SpinState { up: global * up, down: global * down }
}

/// Fold into the zone `(−ω/2, ω/2]`.
pub fn fold_quasienergy(e: f64, omega: f64) -> f64 {
    let mut r = e - omega * Float::floor(e / omega);
    if r >= omega {
        r -= omega;
    }
    if r > omega / 2.0 {
        r - omega
    } else {
        r
    }
}

/// Distance on the circle of circumference `ω`.
pub fn zone_distance(a: f64, b: f64, omega: f64) -> f64 {
    let d = fold_quasienergy(a - b, omega).abs();
    d.min(omega - d)
}

/// Apply `H(t) = (Ω/2)σz − 2λ cos(ωt) σx`.
fn apply_rabi(rabi: &RabiParams, t: f64, x: &[Complex64], y: &mut [Complex64]) {
    let half = rabi.splitting / 2.0;
    let drive = -2.0 * rabi.coupling * Float::cos(rabi.frequency * t);
    y[0] = x[0] * half + x[1] * drive;
    y[1] = x[1] * (-half) + x[0] * drive;
}

/// Propagate a spin state from `t0` to `t1` with RK4.
pub fn propagate_spin(rabi: &RabiParams, state: SpinState, t0: f64, t1: f64, steps: usize) -> SpinState {
    let mut psi = [state.up, state.down];
    ode::propagate(|t, x, y| apply_rabi(rabi, t, x, y), &mut psi, t0, t1, steps);
    SpinState { up: psi[0], down: psi[1] }
}

/// One-period propagator `U(T)` as `[[u00, u01], [u10, u11]]`, plus its
/// unitarity defect `max |U†U − I|`.
pub fn one_period_propagator(rabi: &RabiParams, step: f64) -> Result<([[Complex64; 2]; 2], f64)> {
    let period = rabi.period();
    if !(step > 0.0) || step > period * MAX_STEP_FRACTION {
        return Err(Error::InvalidParameter("step must be > 0 and <= period / 1000"));
    }
    let steps = Float::ceil(period / step) as usize;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let col0 = propagate_spin(rabi, SpinState { up: one, down: zero }, 0.0, period, steps);
    let col1 = propagate_spin(rabi, SpinState { up: zero, down: one }, 0.0, period, steps);
    let u = [[col0.up, col1.up], [col0.down, col1.down]];

    let mut drift: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let dot: Complex64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
            let target = if i == j { one } else { zero };
            drift = drift.max((dot - target).norm());
        }
    }
    Ok((u, drift))
}

/// Quasienergies from the one-period propagator, folded into `(−ω/2, ω/2]`
/// and sorted ascending.
pub fn monodromy_quasienergies(rabi: &RabiParams, step: f64) -> Result<(f64, f64)> {
    let (u, drift) = one_period_propagator(rabi, step)?;
    if drift > UNITARITY_LIMIT {
        return Err(Error::UnitarityDrift { drift });
    }
    let trace = u[0][0] + u[1][1];
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let disc = (trace * trace / 4.0 - det).sqrt();
    let period = rabi.period();
    let mut pair = [trace / 2.0 + disc, trace / 2.0 - disc].map(|mu| {
        // μ = e^{−ieT}
        let e = -mu.arg() / period;
        fold_quasienergy(e, rabi.frequency)
    });
    pair.sort_by(f64::total_cmp);
    Ok((pair[0], pair[1]))
}

/// Folded eigenvalues of the odd and even chains at the eigenstates anchored
/// on `n = 0`, sorted ascending.
pub fn central_chain_quasienergies(rabi: &RabiParams, trunc: Truncation) -> Result<(f64, f64)> {
    let mut out = [0.0; 2];
    for (slot, parity) in [Parity::Odd, Parity::Even].into_iter().enumerate() {
        let spec = eigh_tridiagonal(&build_parity_chain(rabi, parity, trunc))?;
        let anchored = select_anchored_eigenstate(&spec, 0)?;
        out[slot] = fold_quasienergy(anchored.eigenvalue, rabi.frequency);
    }
    out.sort_by(f64::total_cmp);
    Ok((out[0], out[1]))
}

/// Largest zone distance between two quasienergy pairs under the better of
/// the two pairings.
pub fn pair_mismatch(a: (f64, f64), b: (f64, f64), omega: f64) -> f64 {
    let straight = zone_distance(a.0, b.0, omega).max(zone_distance(a.1, b.1, omega));
    let crossed = zone_distance(a.0, b.1, omega).max(zone_distance(a.1, b.0, omega));
    straight.min(crossed)
}

/// Summary of the lattice ↔ Rabi consistency checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub mapping_exact: bool,
    pub fg_offdiag_norm: f64,
    pub parity_commutator_norm: f64,
    pub monodromy_vs_floquet_max_err: f64,
}

pub fn verify(rabi: &RabiParams, trunc: Truncation, step: f64) -> Result<VerificationReport> {
    let odd_chain = build_parity_chain(rabi, Parity::Odd, trunc);
    let lattice = build_lattice_hamiltonian(&lattice_from_rabi(rabi, Parity::Odd), trunc);
    let floquet = build_floquet_hamiltonian(rabi, trunc);
    let (sector, leak) = floquet.parity_sector(Parity::Odd);
    let mapping_exact = odd_chain == lattice && sector == odd_chain && leak == 0.0;

    let fg = block_diagonalize(rabi, trunc);
    let monodromy = monodromy_quasienergies(rabi, step)?;
    let chains = central_chain_quasienergies(rabi, trunc)?;

    Ok(VerificationReport {
        mapping_exact,
        fg_offdiag_norm: fg.offdiag_norm,
        parity_commutator_norm: parity_commutator_norm(&floquet),
        monodromy_vs_floquet_max_err: pair_mismatch(monodromy, chains, rabi.frequency),
    })
}
