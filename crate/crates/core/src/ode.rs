//! Classical fourth-order Runge-Kutta for `i dψ/dt = H(t) ψ`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Workspace for repeated RK4 steps on vectors of a fixed length.
pub struct Rk4 {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Rk4 {
    pub fn new(dimension: usize) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            k1: vec![zero; dimension],
            k2: vec![zero; dimension],
            k3: vec![zero; dimension],
            k4: vec![zero; dimension],
            tmp: vec![zero; dimension],
        }
    }

    /// Advance `psi` from `t` to `t + h`. `apply_h(t, x, y)` must write `H(t) x` into `y`.
    pub fn step<H>(&mut self, apply_h: &mut H, t: f64, h: f64, psi: &mut [Complex64])
    where
        H: FnMut(f64, &[Complex64], &mut [Complex64]),
    {
        let half = 0.5 * h;

        apply_h(t, psi, &mut self.k1);
        scale(&mut self.k1);
        axpy(&mut self.tmp, psi, half, &self.k1);

        apply_h(t + half, &self.tmp, &mut self.k2);
        scale(&mut self.k2);
        axpy(&mut self.tmp, psi, half, &self.k2);

        apply_h(t + half, &self.tmp, &mut self.k3);
        scale(&mut self.k3);
        axpy(&mut self.tmp, psi, h, &self.k3);

        apply_h(t + h, &self.tmp, &mut self.k4);
        scale(&mut self.k4);

        let w = h / 6.0;
        for i in 0..psi.len() {
            psi[i] += (self.k1[i] + (self.k2[i] + self.k3[i]) * 2.0 + self.k4[i]) * w;
        }
    }
}

fn scale(k: &mut [Complex64]) {
    k.iter_mut().for_each(|x| *x *= MINUS_I);
}

fn axpy(out: &mut [Complex64], x: &[Complex64], a: f64, k: &[Complex64]) {
    for ((o, &xi), &ki) in out.iter_mut().zip(x).zip(k) {
        *o = xi + ki * a;
    }
}

/// Propagate `psi` from `t0` to `t1` in `steps` equal RK4 steps.
pub fn propagate<H>(mut apply_h: H, psi: &mut [Complex64], t0: f64, t1: f64, steps: usize)
where
    H: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let mut rk = Rk4::new(psi.len());
    let h = (t1 - t0) / steps as f64;
    for j in 0..steps {
        rk.step(&mut apply_h, t0 + j as f64 * h, h, psi);
    }
}
