//! Grid work spread over a rayon pool. Results are collected in grid order,
//! so output does not depend on the thread count.

use binlattice_core::lattice::{LatticeParams, Truncation};
use binlattice_core::resonance::{anchored_ipr, validate_ipr_grids, IprGrid};
use binlattice_core::spectral::{validate_sweep, window_levels, SweepTable};
use binlattice_core::Result;
use rayon::prelude::*;

pub fn spectrum_sweep(v: f64, f: f64, epsilon_grid: &[f64], window: (f64, f64), trunc: Truncation) -> Result<SweepTable> {
    validate_sweep(epsilon_grid, window)?;
    let levels = epsilon_grid
        .par_iter()
        .map(|&eps| window_levels(&LatticeParams::new(v, eps, f)?, window, trunc))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { epsilon_values: epsilon_grid.to_vec(), levels })
}

pub fn ipr_map(v_grid: &[f64], epsilon_grid: &[f64], f: f64) -> Result<IprGrid> {
    validate_ipr_grids(v_grid, epsilon_grid)?;
    let ipr = v_grid
        .par_iter()
        .map(|&v| {
            epsilon_grid
                .par_iter()
                .map(|&eps| anchored_ipr(v, eps, f))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IprGrid { v_values: v_grid.to_vec(), epsilon_values: epsilon_grid.to_vec(), ipr })
}
