//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use binlattice::output::{AnticrossReport, VerifyReport};
use binlattice_core::dynamics::{default_time_grid, evolve, jump_metrics, uniform_grid, SpectralPropagator};
use binlattice_core::lattice::{build_lattice_hamiltonian, translate_even, LatticeParams, StateVector, Truncation};
use binlattice_core::ode;
use binlattice_core::rabi::{
    block_diagonalize, build_parity_chain, central_chain_quasienergies, monodromy_quasienergies, pair_mismatch,
    physical_state, FloquetVector, Parity, RabiParams,
};
use binlattice_core::resonance::{anchored_ipr, find_anticrossing, shirley_shift, CONVERGENCE_TOLERANCE};
use binlattice_core::spectral::{converge_truncation, eigh_tridiagonal, select_anchored_eigenstate};

type Outcome = Result<(bool, String), String>;

fn cli_json<T: serde::de::DeserializeOwned>(args: &[&str]) -> Result<T, String> {
    let mut argv = vec!["binlattice"];
    argv.extend_from_slice(args);
    let out = binlattice::execute(argv).map_err(|e| e.to_string())?;
    serde_json::from_str(&out.text).map_err(|e| e.to_string())
}

fn lattice(v: f64, eps: f64) -> LatticeParams {
    LatticeParams::new(v, eps, 1.0).unwrap()
}

fn anticross(order: &str, v: &str, eps: f64, gap: f64, tol: f64) -> Outcome {
    let r: AnticrossReport = cli_json(&["anticross", "--order", order, "--V", v, "--F", "1"])?;
    let ok = (r.epsilon_star - eps).abs() <= tol && (r.gap_min - gap).abs() <= tol;
    Ok((ok, format!("epsilon* = {}, gap_min = {} (N = {})", r.epsilon_star, r.gap_min, r.half_width)))
}

fn criterion_1() -> Outcome {
    anticross("0", "0.2", 0.9579, 0.3958, 5e-4)
}

fn criterion_2() -> Outcome {
    anticross("2", "1", 4.11467, 0.03208, 5e-5)
}

fn jump(v: f64, eps: f64, target: i64, gap: f64) -> Result<(f64, f64, f64), String> {
    let params = lattice(v, eps);
    let trunc = converge_truncation(&params, CONVERGENCE_TOLERANCE).map_err(|e| e.to_string())?;
    let times = default_time_grid(gap, 400).map_err(|e| e.to_string())?;
    let traj = evolve(&params, 0, &times, trunc).map_err(|e| e.to_string())?;
    let m = jump_metrics(&traj, target).map_err(|e| e.to_string())?;
    Ok((m.max_transfer, m.period_estimate, m.intermediate_ceiling))
}

fn criterion_3() -> Outcome {
    let gap = find_anticrossing(2, 1.0, 1.0).map_err(|e| e.to_string())?.gap_min;
    let (peak, period, ceiling) = jump(1.0, 4.11467, 5, gap)?;
    let expected = TAU / gap;
    let ok = peak >= 0.9 && (period / expected - 1.0).abs() <= 0.02;
    Ok((
        ok,
        format!("max P_5 = {peak:.4} (need >= 0.9), period {period:.2} vs {expected:.2}, intermediate ceiling {ceiling:.3}"),
    ))
}

fn criterion_4() -> Outcome {
    let (peak, period, _) = jump(0.2, 0.9579, 1, 0.3958)?;
    let expected = TAU / 0.3958;
    let ok = peak >= 0.99 && (period / expected - 1.0).abs() <= 0.01;
    Ok((ok, format!("max P_1 = {peak:.4} (need >= 0.99), period {period:.4} vs {expected:.4}")))
}

fn criterion_5() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for n in 0..3u32 {
        let r = find_anticrossing(n, 0.05, 1.0).map_err(|e| e.to_string())?;
        let predicted = shirley_shift(n, 0.05, 1.0);
        let rel = (r.numerical_shift() - predicted).abs() / predicted;
        worst = worst.max(rel);
        parts.push(format!("n={n}: {rel:.2e}"));
    }
    Ok((worst <= 0.05, format!("relative shift errors {}", parts.join(", "))))
}

fn criterion_6() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 0..3u32 {
        let r = find_anticrossing(n, 0.2, 1.0).map_err(|e| e.to_string())?;
        let x = anchored_ipr(0.2, r.epsilon_star, 1.0).map_err(|e| e.to_string())?;
        ok &= (x - 0.5).abs() <= 0.02;
        parts.push(format!("n={n}: {x:.4}"));
    }
    let off = anchored_ipr(0.1, 2.0, 1.0).map_err(|e| e.to_string())?;
    ok &= off > 0.95;
    Ok((ok, format!("IPR at anticrossings {}; off resonance {off:.4}", parts.join(", "))))
}

fn criterion_7() -> Outcome {
    let rabi = RabiParams::new(0.3, 1.0, 0.2).unwrap();
    let trunc = Truncation::default();
    let chain = build_parity_chain(&rabi, Parity::Odd, trunc);
    let lat = build_lattice_hamiltonian(&LatticeParams::new(0.2, 0.3, 1.0).unwrap(), trunc);
    let same_bits = chain.diag().iter().zip(lat.diag()).all(|(a, b)| a.to_bits() == b.to_bits())
        && chain.offdiag().iter().zip(lat.offdiag()).all(|(a, b)| a.to_bits() == b.to_bits());
    Ok((chain == lat && same_bits, format!("{} diagonal and {} coupling entries compared", lat.diag().len(), lat.offdiag().len())))
}

fn criterion_8() -> Outcome {
    let rabi = RabiParams::new(0.3, 1.0, 0.2).unwrap();
    let fg = block_diagonalize(&rabi, Truncation::new(40).unwrap());
    let ok = fg.offdiag_norm < 1e-12 && fg.even_block_error < 1e-12 && fg.odd_block_error < 1e-12;
    Ok((
        ok,
        format!(
            "off-diagonal {:.1e}, even block {:.1e}, odd block {:.1e}",
            fg.offdiag_norm, fg.even_block_error, fg.odd_block_error
        ),
    ))
}

fn criterion_9() -> Outcome {
    let rabi = RabiParams::new(0.3, 1.0, 0.2).unwrap();
    let pair = monodromy_quasienergies(&rabi, rabi.period() / 10_000.0).map_err(|e| e.to_string())?;
    let chains = central_chain_quasienergies(&rabi, Truncation::new(40).unwrap()).map_err(|e| e.to_string())?;
    let err = pair_mismatch(pair, chains, 1.0);
    let report: VerifyReport = cli_json(&["verify", "--Omega", "0.3", "--omega", "1", "--lambda", "0.2"])?;
    let ok = err <= 1e-6 && report.monodromy_vs_floquet_max_err <= 1e-6 && report.mapping_exact;
    Ok((ok, format!("monodromy {pair:?} vs chains {chains:?}, mismatch {err:.1e}")))
}

fn criterion_10() -> Outcome {
    let mut failures = Vec::new();

    // unitarity
    let mut worst_norm: f64 = 0.0;
    for &(v, eps) in &[(0.2, 0.9579), (1.0, 4.11467), (0.1, 2.0), (0.6, 1.3), (0.05, 0.0)] {
        let params = lattice(v, eps);
        let trunc = converge_truncation(&params, CONVERGENCE_TOLERANCE).map_err(|e| e.to_string())?;
        let times = uniform_grid(0.0, 300.0, 200).unwrap();
        let traj = evolve(&params, 0, &times, trunc).map_err(|e| e.to_string())?;
        worst_norm = worst_norm.max(traj.max_norm_error());
    }
    if worst_norm > 1e-10 {
        failures.push(format!("norm drift {worst_norm:.1e}"));
    }

    // ladder spacing and residuals
    let mut worst_ladder: f64 = 0.0;
    let mut worst_residual: f64 = 0.0;
    for &(v, eps) in &[(0.2, 0.9579), (1.0, 4.11467), (0.5, 0.3), (0.9, 2.5)] {
        let params = lattice(v, eps);
        let trunc = Truncation::default();
        let h = build_lattice_hamiltonian(&params, trunc);
        let spec = eigh_tridiagonal(&h).map_err(|e| e.to_string())?;
        worst_residual = worst_residual.max(spec.max_residual(&h) / h.inf_norm());
        for e in spec.central_eigenvalues(trunc.half_width() as i64 / 2 - 2) {
            let miss = spec.eigenvalues().iter().map(|x| (x - e - 2.0).abs()).fold(f64::INFINITY, f64::min);
            worst_ladder = worst_ladder.max(miss);
        }
    }
    if worst_ladder > 1e-8 {
        failures.push(format!("ladder miss {worst_ladder:.1e}"));
    }
    if worst_residual > 1e-10 {
        failures.push(format!("relative residual {worst_residual:.1e}"));
    }

    // physical state does not depend on the even translation
    let rabi = RabiParams::new(0.3, 1.0, 0.2).unwrap();
    let trunc = Truncation::default();
    let spec = eigh_tridiagonal(&build_parity_chain(&rabi, Parity::Odd, trunc)).map_err(|e| e.to_string())?;
    let anchor = select_anchored_eigenstate(&spec, 0).map_err(|e| e.to_string())?;
    let vector = FloquetVector::from_chain(Parity::Odd, trunc, spec.vector(anchor.index)).unwrap();
    let mut worst_m: f64 = 0.0;
    for m in [-2, 1, 3] {
        let (moved, _) = vector.translated(m);
        for k in 0..100 {
            let t = 0.25 * k as f64;
            let a = physical_state(&vector, anchor.eigenvalue, 1.0, t);
            let b = physical_state(&moved, anchor.eigenvalue + 2.0 * m as f64, 1.0, t);
            worst_m = worst_m.max(a.max_difference(&b));
        }
    }
    if worst_m > 1e-8 {
        failures.push(format!("m dependence {worst_m:.1e}"));
    }

    // spectral propagation against direct integration on a 7-site lattice
    let small = Truncation::new(3).unwrap();
    let params = lattice(0.45, 0.8);
    let h = build_lattice_hamiltonian(&params, small);
    let prop = SpectralPropagator::new(&params, small).map_err(|e| e.to_string())?;
    let start = StateVector::wannier(0, small).unwrap();
    let mut psi = start.amplitudes().to_vec();
    ode::propagate(|_, x, y| h.apply_complex(x, y), &mut psi, 0.0, 10.0, 10_000);
    let exact = prop.propagate(&start, 10.0).map_err(|e| e.to_string())?;
    let worst_ode = psi.iter().zip(exact.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    if worst_ode > 1e-6 {
        failures.push(format!("integrator mismatch {worst_ode:.1e}"));
    }

    // translation keeps the IPR
    let spec = eigh_tridiagonal(&build_lattice_hamiltonian(&lattice(0.2, 0.9579), trunc)).map_err(|e| e.to_string())?;
    let state = select_anchored_eigenstate(&spec, 0).map_err(|e| e.to_string())?.state;
    let moved = translate_even(&state, 2);
    let ipr_gap = (binlattice_core::spectral::ipr(&state).unwrap() - binlattice_core::spectral::ipr(&moved.state).unwrap()).abs();
    if ipr_gap > 1e-12 {
        failures.push(format!("IPR translation change {ipr_gap:.1e}"));
    }

    let summary = format!(
        "norm {worst_norm:.1e}, ladder {worst_ladder:.1e}, residual {worst_residual:.1e}, m {worst_m:.1e}, integrator {worst_ode:.1e}"
    );
    Ok((failures.is_empty(), if failures.is_empty() { summary } else { format!("{summary}; failed: {}", failures.join(", ")) }))
}

fn main() {
    let criteria: [(u32, Duration, fn() -> Outcome); 10] = [
        (1, Duration::from_secs(2), criterion_1),
        (2, Duration::from_secs(10), criterion_2),
        (3, Duration::from_secs(10), criterion_3),
        (4, Duration::from_secs(2), criterion_4),
        (5, Duration::from_secs(30), criterion_5),
        (6, Duration::from_secs(10), criterion_6),
        (7, Duration::from_millis(100), criterion_7),
        (8, Duration::from_secs(1), criterion_8),
        (9, Duration::from_secs(5), criterion_9),
        (10, Duration::from_secs(60), criterion_10),
    ];
    let mut failed = Vec::new();
    for (n, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= limit, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {n}: {} {detail} [{:.3} s, limit {:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs_f64()
        );
        if !ok {
            failed.push(n);
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
